//! Sweeps, EP grouping and the CSV/JSON writers.

use std::io::Write;
use std::path::{Path, PathBuf};

use serde_json::{json, Value};

use ptframe::algebra::C64;
use ptframe::models::Model;
use ptframe::spectra::{detect_eps_with, linspace, sweep, EPReport, Frame, SweepResult};

use crate::config::{Format, Job};
use crate::CliError;

/// EP reports from different frames closer than this (relative to the
/// location's magnitude) are grouped under one record.
pub const EP_GROUP_TOL: f64 = 1e-6;

pub struct FrameData {
    pub frame: Frame,
    pub sweep: SweepResult,
    pub eps: Vec<EPReport>,
    /// Branch indices sorted by `(Re, Im)` at the start of the range.
    pub order: Vec<usize>,
}

pub fn run_sweep(job: &Job) -> Result<Vec<FrameData>, CliError> {
    let name = job.param.as_deref().expect("sweeping job has a parameter");
    let r = job.grid.expect("sweeping job has a range");
    let grid = linspace(r.start, r.stop, r.count);
    job.frames
        .iter()
        .map(|&frame| {
            let s = sweep(&job.model, name, &grid, frame)?;
            let eps = detect_eps_with(&s, &job.model, frame, &job.thresholds)?;
            let mut order: Vec<usize> = (0..s.branch_count()).collect();
            order.sort_by(|&a, &b| {
                let (x, y) = (s.branches[a][0], s.branches[b][0]);
                x.re.total_cmp(&y.re).then(x.im.total_cmp(&y.im))
            });
            Ok(FrameData {
                frame,
                sweep: s,
                eps,
                order,
            })
        })
        .collect()
}

fn column(frame: Frame, label: &str, part: &str) -> String {
    format!("{}_{label}_{part}", frame.as_str())
}

fn columns(job: &Job, data: &[FrameData]) -> Vec<String> {
    let mut cols = vec![job.param.clone().unwrap_or_default()];
    for d in data {
        for &b in &d.order {
            cols.push(column(d.frame, &d.sweep.labels[b], "re"));
            cols.push(column(d.frame, &d.sweep.labels[b], "im"));
        }
    }
    cols
}

fn complex(z: C64) -> Value {
    json!([z.re, z.im])
}

pub fn parameters_json(model: &Model) -> Value {
    let mut map = serde_json::Map::new();
    for &name in model.parameter_names() {
        if let Ok(v) = model.parameter(name) {
            map.insert(name.into(), json!(v));
        }
    }
    match model {
        Model::H2(p) => {
            map.insert("n_max".into(), json!(p.n_max));
        }
        Model::H3(p) => {
            map.insert("n_max".into(), json!(p.n_max));
        }
        Model::H1(_) => {}
    }
    Value::Object(map)
}

fn ep_record(e: &EPReport) -> Value {
    json!({
        "frame": e.frame.as_str(),
        "location": e.location,
        "labels": e.labels,
        "branch_ids": e.branch_ids,
        "eigenvalue": complex(e.eigenvalue),
        "eigenvalue_gap": e.eigenvalue_gap,
        "gap_threshold": e.gap_threshold,
        "vector_coalescence": e.vector_coalescence,
        "order_estimate": e.order_estimate,
        "refinement_width": e.refinement_width,
        "converged": e.converged,
        "geometric_expectations": e.geometric_expectations,
    })
}

/// Reports from all frames grouped by location.
pub fn grouped_eps(data: &[FrameData]) -> Vec<Value> {
    let mut all: Vec<&EPReport> = data.iter().flat_map(|d| d.eps.iter()).collect();
    all.sort_by(|a, b| a.location.total_cmp(&b.location));
    let mut groups: Vec<Vec<&EPReport>> = Vec::new();
    for e in all {
        match groups.last_mut() {
            Some(g)
                if (e.location - g[0].location).abs()
                    <= EP_GROUP_TOL * g[0].location.abs().max(1.0) =>
            {
                g.push(e)
            }
            _ => groups.push(vec![e]),
        }
    }
    groups
        .into_iter()
        .map(|g| {
            let mean = g.iter().map(|e| e.location).sum::<f64>() / g.len() as f64;
            let mut frames: Vec<&str> = g.iter().map(|e| e.frame.as_str()).collect();
            frames.dedup();
            json!({
                "location": mean,
                "frames": frames,
                "reports": g.iter().map(|e| ep_record(e)).collect::<Vec<_>>(),
            })
        })
        .collect()
}

fn flagged_steps(data: &[FrameData]) -> Vec<Value> {
    let mut out = Vec::new();
    for d in data {
        for (k, st) in d.sweep.steps.iter().enumerate() {
            if st.ambiguous || st.discontinuous {
                out.push(json!({
                    "frame": d.frame.as_str(),
                    "from": d.sweep.grid[k],
                    "to": d.sweep.grid[k + 1],
                    "min_overlap": st.min_overlap,
                    "max_jump": st.max_jump,
                    "ambiguous": st.ambiguous,
                    "discontinuous": st.discontinuous,
                }));
            }
        }
    }
    out
}

pub fn meta(job: &Job, command: &str, columns: &[String], data: &[FrameData]) -> Value {
    let r = job.grid;
    json!({
        "command": command,
        "version": env!("CARGO_PKG_VERSION"),
        "model": job.model.name(),
        "parameters": parameters_json(&job.model),
        "swept": job.param.as_ref().zip(r).map(|(p, r)| json!({
            "name": p, "start": r.start, "stop": r.stop, "count": r.count,
        })),
        "frames": job.frames.iter().map(|f| f.as_str()).collect::<Vec<_>>(),
        "defaults": job.defaults.iter().map(|d| json!({
            "name": d.name,
            "value": d.value,
            "note": "not stated for this figure; default value used",
        })).collect::<Vec<_>>(),
        "thresholds": {
            "gap": job.thresholds.gap,
            "coalescence": job.thresholds.coalescence,
            "refine_width": job.thresholds.refine_width,
        },
        "columns": columns,
        "branches": data.iter().flat_map(|d| d.order.iter().map(move |&b| json!({
            "frame": d.frame.as_str(),
            "label": d.sweep.labels[b],
            "state": d.sweep.states[b].map(|(c, n)| [c, n]),
        }))).collect::<Vec<_>>(),
        "flagged_steps": flagged_steps(data),
        "eps": grouped_eps(data),
    })
}

fn sidecar_path(out: &Path) -> PathBuf {
    let mut name = out.as_os_str().to_owned();
    name.push(".meta.json");
    PathBuf::from(name)
}

fn sink(out: Option<&Path>) -> Result<Box<dyn Write>, CliError> {
    Ok(match out {
        Some(p) => Box::new(std::io::BufWriter::new(
            std::fs::File::create(p).map_err(|e| CliError::Io(format!("{}: {e}", p.display())))?,
        )),
        None => Box::new(std::io::stdout().lock()),
    })
}

fn write_json(out: Option<&Path>, v: &Value) -> Result<(), CliError> {
    let mut w = sink(out)?;
    serde_json::to_writer_pretty(&mut w, v)?;
    writeln!(w)?;
    w.flush()?;
    Ok(())
}

fn write_csv(
    job: &Job,
    header: &[String],
    rows: Vec<Vec<String>>,
    meta: &Value,
) -> Result<(), CliError> {
    let mut w = csv::Writer::from_writer(sink(job.out.as_deref())?);
    w.write_record(header)?;
    for row in rows {
        w.write_record(&row)?;
    }
    w.flush()?;
    if let Some(out) = &job.out {
        write_json(Some(&sidecar_path(out)), meta)?;
    }
    Ok(())
}

fn num(x: f64) -> String {
    format!("{x:.16e}")
}

pub fn write_sweep(job: &Job, data: &[FrameData], figure: Option<u8>) -> Result<(), CliError> {
    let cols = columns(job, data);
    let command = figure.map_or("sweep".to_string(), |n| format!("figure {n}"));
    let meta = meta(job, &command, &cols, data);
    let grid = &data[0].sweep.grid;
    match job.format {
        Format::Csv => {
            let rows = (0..grid.len())
                .map(|k| {
                    let mut row = vec![num(grid[k])];
                    for d in data {
                        for &b in &d.order {
                            let z = d.sweep.branches[b][k];
                            row.push(num(z.re));
                            row.push(num(z.im));
                        }
                    }
                    row
                })
                .collect();
            write_csv(job, &cols, rows, &meta)
        }
        Format::Json => {
            let branches: Vec<Value> = data
                .iter()
                .flat_map(|d| {
                    d.order.iter().map(move |&b| {
                        let zs = &d.sweep.branches[b];
                        json!({
                            "frame": d.frame.as_str(),
                            "label": d.sweep.labels[b],
                            "state": d.sweep.states[b].map(|(c, n)| [c, n]),
                            "re": zs.iter().map(|z| z.re).collect::<Vec<_>>(),
                            "im": zs.iter().map(|z| z.im).collect::<Vec<_>>(),
                        })
                    })
                })
                .collect();
            write_json(
                job.out.as_deref(),
                &json!({
                    "meta": meta,
                    "parameter": job.param,
                    "grid": grid,
                    "branches": branches,
                }),
            )
        }
    }
}

pub const EP_COLUMNS: [&str; 11] = [
    "location",
    "frame",
    "labels",
    "eigenvalue_re",
    "eigenvalue_im",
    "eigenvalue_gap",
    "gap_threshold",
    "vector_coalescence",
    "order_estimate",
    "refinement_width",
    "converged",
];

pub fn write_eps(job: &Job, data: &[FrameData]) -> Result<(), CliError> {
    let cols = columns(job, data);
    let meta = meta(job, "ep-find", &cols, data);
    match job.format {
        Format::Json => write_json(
            job.out.as_deref(),
            &json!({ "meta": meta, "eps": grouped_eps(data) }),
        ),
        Format::Csv => {
            let mut reports: Vec<&EPReport> = data.iter().flat_map(|d| d.eps.iter()).collect();
            reports.sort_by(|a, b| a.location.total_cmp(&b.location));
            let rows = reports
                .into_iter()
                .map(|e| {
                    vec![
                        num(e.location),
                        e.frame.as_str().to_string(),
                        e.labels.join(";"),
                        num(e.eigenvalue.re),
                        num(e.eigenvalue.im),
                        num(e.eigenvalue_gap),
                        num(e.gap_threshold),
                        num(e.vector_coalescence),
                        e.order_estimate.to_string(),
                        num(e.refinement_width),
                        e.converged.to_string(),
                    ]
                })
                .collect();
            let header: Vec<String> = EP_COLUMNS.iter().map(|s| s.to_string()).collect();
            write_csv(job, &header, rows, &meta)
        }
    }
}

/// `check` always writes JSON.
pub fn emit_json(job: &Job, v: &Value) -> Result<(), CliError> {
    write_json(job.out.as_deref(), v)
}
