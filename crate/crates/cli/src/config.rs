//! Flags, JSON config files and their resolution into a runnable job.

use std::collections::BTreeMap;
use std::path::PathBuf;
use std::str::FromStr;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Deserialize;

use ptframe::models::{H1Params, H2Params, H3Params, Model};
use ptframe::spectra::{Frame, Thresholds};

use crate::CliError;

#[derive(Debug, Parser)]
#[command(
    name = "ptframe",
    version,
    about = "Hidden PT symmetry checks and exceptional-point sweeps"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Branch data for figure 1, 2 or 3 (defaults can be overridden).
    Figure {
        #[arg(value_parser = clap::value_parser!(u8).range(1..=3))]
        number: u8,
        #[command(flatten)]
        opts: Options,
    },
    /// Eigenvalue branches over a parameter range, with EP annotations.
    Sweep(Options),
    /// Hidden-PT certification report at a single parameter point.
    Check(Options),
    /// Sweep and report exceptional points only.
    #[command(name = "ep-find")]
    EpFind(Options),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ModelKind {
    H1,
    H2,
    H3,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum FrameChoice {
    If,
    Ef,
    Both,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Csv,
    Json,
}

/// Geometric part used by `check`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum H0Choice {
    /// The model's own split.
    Model,
    /// `−iγ a†a` only (a deliberately wrong split, for comparison).
    ModeA,
}

/// `start:stop:count`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RangeSpec {
    pub start: f64,
    pub stop: f64,
    pub count: usize,
}

impl FromStr for RangeSpec {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        let parts: Vec<&str> = s.split(':').collect();
        if parts.len() != 3 {
            return Err(format!("range '{s}' is not start:stop:count"));
        }
        let num = |x: &str| {
            x.trim()
                .parse::<f64>()
                .map_err(|e| format!("range '{s}': {e}"))
        };
        let count = parts[2]
            .trim()
            .parse::<usize>()
            .map_err(|e| format!("range '{s}': count: {e}"))?;
        Ok(RangeSpec {
            start: num(parts[0])?,
            stop: num(parts[1])?,
            count,
        })
    }
}

impl<'de> Deserialize<'de> for RangeSpec {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Raw {
            Text(String),
            Triple(f64, f64, usize),
        }
        match Raw::deserialize(d)? {
            Raw::Text(s) => s.parse().map_err(serde::de::Error::custom),
            Raw::Triple(start, stop, count) => Ok(RangeSpec { start, stop, count }),
        }
    }
}

/// Every setting, from flags or from a JSON config with the same keys
/// (snake_case or kebab-case). Flags win.
#[derive(Clone, Debug, Default, Args, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Options {
    #[arg(long)]
    pub model: Option<ModelKind>,
    #[arg(long)]
    pub frame: Option<FrameChoice>,
    /// Swept parameter name, e.g. kappa or gamma_e.
    #[arg(long)]
    pub param: Option<String>,
    /// start:stop:count
    #[arg(long)]
    pub range: Option<RangeSpec>,
    #[arg(long, allow_hyphen_values = true)]
    pub g: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    #[serde(alias = "gamma-a")]
    pub gamma_a: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    #[serde(alias = "gamma-b")]
    pub gamma_b: Option<f64>,
    /// Gain/loss contrast; alternative to --gamma-a/--gamma-b.
    #[arg(long, allow_hyphen_values = true)]
    pub kappa: Option<f64>,
    /// Mean loss rate; alternative to --gamma-a/--gamma-b.
    #[arg(long, allow_hyphen_values = true)]
    pub gamma: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    pub omega: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    #[serde(alias = "gamma-e")]
    pub gamma_e: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    pub epsilon: Option<f64>,
    #[arg(long)]
    #[serde(alias = "n-max")]
    pub n_max: Option<usize>,
    /// Output file; stdout when absent.
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long)]
    pub format: Option<Format>,
    /// JSON file with the same keys as the flags.
    #[arg(long)]
    #[serde(skip)]
    pub config: Option<PathBuf>,
    /// EP eigenvalue-gap threshold.
    #[arg(long)]
    #[serde(alias = "gap-tol")]
    pub gap_tol: Option<f64>,
    /// EP eigenvector-coalescence threshold.
    #[arg(long)]
    #[serde(alias = "coalescence-tol")]
    pub coalescence_tol: Option<f64>,
    /// Bracket width counted as a converged EP refinement.
    #[arg(long)]
    #[serde(alias = "refine-width")]
    pub refine_width: Option<f64>,
    /// Geometric part for `check`.
    #[arg(long, value_enum)]
    pub h0: Option<H0Choice>,
    /// Seed for random initial states in `check`.
    #[arg(long)]
    pub seed: Option<u64>,
}

macro_rules! overlay {
    ($hi:expr, $lo:expr; $($f:ident),*) => {
        Options { $($f: $hi.$f.or($lo.$f),)* }
    };
}

impl Options {
    /// Fields of `self`, falling back to `other`.
    pub fn or(self, other: Options) -> Options {
        overlay!(self, other; model, frame, param, range, g, gamma_a, gamma_b, kappa, gamma,
            omega, gamma_e, epsilon, n_max, out, format, config, gap_tol, coalescence_tol,
            refine_width, h0, seed)
    }

    pub fn load_file(path: &std::path::Path) -> Result<Options, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Config(format!("cannot read config {}: {e}", path.display())))?;
        serde_json::from_str(&text)
            .map_err(|e| CliError::Config(format!("config {}: {e}", path.display())))
    }

    /// Flags over the config file named by `--config`, if any.
    pub fn with_file(self) -> Result<Options, CliError> {
        match self.config.clone() {
            Some(path) => Ok(self.or(Options::load_file(&path)?)),
            None => Ok(self),
        }
    }
}

/// A value the source figure does not print, filled in by default.
#[derive(Clone, Debug, PartialEq)]
pub struct NamedDefault {
    pub name: &'static str,
    pub value: f64,
}

pub fn figure_defaults(n: u8, user: &Options) -> (Options, Vec<NamedDefault>) {
    let mut unprinted = Vec::new();
    let mut note = |name: &'static str, value: f64, given: Option<f64>| {
        if given.is_none() {
            unprinted.push(NamedDefault { name, value });
        }
        Some(value)
    };
    let opts = match n {
        1 => Options {
            model: Some(ModelKind::H1),
            omega: Some(1.0),
            param: Some("gamma_e".into()),
            range: Some(RangeSpec {
                start: 0.0,
                stop: 4.0,
                count: 401,
            }),
            ..Options::default()
        },
        2 => Options {
            model: Some(ModelKind::H2),
            g: Some(1.0),
            gamma: note("gamma", 0.3, user.gamma.or(user.gamma_a)),
            n_max: Some(4),
            param: Some("kappa".into()),
            range: Some(RangeSpec {
                start: 0.0,
                stop: 2.0,
                count: 401,
            }),
            ..Options::default()
        },
        _ => {
            let g = user.g.unwrap_or(1.0);
            Options {
                model: Some(ModelKind::H3),
                g: Some(1.0),
                gamma: note("gamma", 0.1, user.gamma.or(user.gamma_a)),
                epsilon: note("epsilon", 0.1, user.epsilon),
                n_max: Some(12),
                param: Some("kappa".into()),
                // the driven model is singular at kappa = g
                range: Some(RangeSpec {
                    start: 0.0,
                    stop: g - 1e-3,
                    count: 201,
                }),
                ..Options::default()
            }
        }
    };
    (
        Options {
            frame: Some(FrameChoice::Both),
            ..opts
        },
        unprinted,
    )
}

/// Fully validated settings.
#[derive(Clone, Debug)]
pub struct Job {
    /// Model at the start of the range (or at the single point for `check`).
    pub model: Model,
    pub frames: Vec<Frame>,
    pub param: Option<String>,
    pub grid: Option<RangeSpec>,
    pub out: Option<PathBuf>,
    pub format: Format,
    pub thresholds: Thresholds,
    pub h0: H0Choice,
    pub seed: u64,
    pub defaults: Vec<NamedDefault>,
}

fn config_err(msg: impl Into<String>) -> CliError {
    CliError::Config(msg.into())
}

fn positive(name: &str, x: Option<f64>) -> Result<Option<f64>, CliError> {
    match x {
        Some(v) if !(v.is_finite() && v > 0.0) => Err(config_err(format!(
            "{name} must be a positive number, got {v}"
        ))),
        _ => Ok(x),
    }
}

fn model_from(o: &Options, kind: ModelKind, swept: Option<(&str, f64)>) -> Result<Model, CliError> {
    let mut vals: BTreeMap<&str, f64> = BTreeMap::new();
    for (k, v) in [
        ("g", o.g),
        ("gamma_a", o.gamma_a),
        ("gamma_b", o.gamma_b),
        ("kappa", o.kappa),
        ("gamma", o.gamma),
        ("omega", o.omega),
        ("gamma_e", o.gamma_e),
        ("epsilon", o.epsilon),
    ] {
        if let Some(v) = v {
            vals.insert(k, v);
        }
    }
    // the swept parameter starts at the range start; fill it in only where
    // it is not implied by other settings (kappa/gamma vs gamma_a/gamma_b)
    let rates_given = vals.contains_key("gamma_a") && vals.contains_key("gamma_b");
    if let Some((name, start)) = swept {
        let implied = rates_given && (name == "kappa" || name == "gamma");
        if !implied {
            vals.insert(name, start);
        }
    }
    let need = |k: &str| {
        vals.get(k)
            .copied()
            .ok_or_else(|| config_err(format!("model {kind:?} needs --{}", k.replace('_', "-"))))
    };
    let n_max = || {
        o.n_max
            .ok_or_else(|| config_err("bosonic models need --n-max"))
    };

    let model = match kind {
        ModelKind::H1 => Model::H1(H1Params::new(need("omega")?, need("gamma_e")?)?),
        ModelKind::H2 | ModelKind::H3 => {
            let g = need("g")?;
            let balanced = vals.contains_key("kappa") || vals.contains_key("gamma");
            let (ga, gb) = if rates_given {
                if balanced {
                    return Err(config_err(
                        "give either gamma_a/gamma_b or kappa/gamma, not both",
                    ));
                }
                (vals["gamma_a"], vals["gamma_b"])
            } else if vals.contains_key("gamma_a") || vals.contains_key("gamma_b") {
                return Err(config_err("gamma_a and gamma_b must be given together"));
            } else {
                let (k, m) = (need("kappa")?, need("gamma")?);
                (m + k, m - k)
            };
            if kind == ModelKind::H2 {
                Model::H2(H2Params::new(g, ga, gb, n_max()?)?)
            } else {
                Model::H3(H3Params::new(g, ga, gb, need("epsilon")?, n_max()?)?)
            }
        }
    };
    let model = match swept {
        Some((name, start)) if model.parameter_names().contains(&name) => {
            model.with_parameter(name, start)?
        }
        _ => model,
    };
    Ok(model)
}

impl Job {
    /// Resolves merged options. `sweeping` requires a parameter and range.
    pub fn resolve(
        o: Options,
        defaults: Vec<NamedDefault>,
        sweeping: bool,
    ) -> Result<Job, CliError> {
        let kind = o.model.ok_or_else(|| config_err("missing --model"))?;
        let (param, grid) = if sweeping {
            let param = o
                .param
                .clone()
                .ok_or_else(|| config_err("missing --param"))?;
            let r = o.range.ok_or_else(|| config_err("missing --range"))?;
            if r.count < 2 {
                return Err(config_err(format!(
                    "range needs at least 2 points, got {}",
                    r.count
                )));
            }
            if !(r.start.is_finite() && r.stop.is_finite()) || r.start >= r.stop {
                return Err(config_err(format!(
                    "range start must be below stop, got {}:{}",
                    r.start, r.stop
                )));
            }
            (Some(param), Some(r))
        } else {
            (None, None)
        };
        let swept = param.as_deref().zip(grid.map(|r| r.start));
        let model = model_from(&o, kind, swept)?;
        if let Some(p) = &param {
            if !model.parameter_names().contains(&p.as_str()) {
                return Err(config_err(format!(
                    "model {} has no parameter '{p}' (expected one of {:?})",
                    model.name(),
                    model.parameter_names()
                )));
            }
        }
        let frames = match o.frame.unwrap_or(FrameChoice::Both) {
            FrameChoice::If => vec![Frame::Initial],
            FrameChoice::Ef => vec![Frame::Equilibrium],
            FrameChoice::Both => vec![Frame::Initial, Frame::Equilibrium],
        };
        let base = Thresholds::default();
        let thresholds = Thresholds {
            gap: positive("gap_tol", o.gap_tol)?.unwrap_or(base.gap),
            coalescence: positive("coalescence_tol", o.coalescence_tol)?
                .unwrap_or(base.coalescence),
            refine_width: positive("refine_width", o.refine_width)?.unwrap_or(base.refine_width),
        };
        let h0 = o.h0.unwrap_or(H0Choice::Model);
        if h0 == H0Choice::ModeA && kind == ModelKind::H1 {
            return Err(config_err("--h0 mode-a needs a bosonic model"));
        }
        Ok(Job {
            model,
            frames,
            param,
            grid,
            out: o.out,
            format: o.format.unwrap_or(Format::Csv),
            thresholds,
            h0,
            seed: o.seed.unwrap_or(0),
            defaults,
        })
    }
}
