//! Parameter sweeps, eigenvalue branch tracking and exceptional-point
//! detection.
//!
//! Grid points are diagonalized in parallel; branches are then stitched
//! together sequentially by an optimal assignment on eigenvalue distance and
//! eigenvector overlap. EPs are located as minima of the pairwise
//! coalescence metric `m(θ) = min |E_i − E_j| + (1 − |v_i†v_j|)` and
//! refined by golden-section search.
//!
//! Bosonic models are followed on the four supermode states
//! `(1,0), (0,1), (2,0), (0,2)`. For `H2` the number-conserving sectors
//! `N ∈ {1, 2}` are diagonalized on their own, which is exact at any cutoff.

use rayon::prelude::*;

use crate::algebra::{eig, inner, CMatrix, CVector, C64};
use crate::error::{Error, Result};
use crate::models::Model;

/// Eigenvalue-gap detection threshold.
pub const GAP_TOL: f64 = 1e-6;
/// Eigenvector coalescence threshold `1 − |v_i†v_j|`.
pub const COALESCENCE_TOL: f64 = 1e-3;
/// Bracket width below which a refinement counts as converged.
pub const REFINE_WIDTH: f64 = 1e-8;
/// Relative difference of the two cheapest assignments that flags a step.
pub const AMBIGUITY_RATIO: f64 = 0.1;
/// Overlap weight as a fraction of the median eigenvalue spacing.
pub const WEIGHT_FACTOR: f64 = 0.1;

const MAX_GOLDEN_STEPS: usize = 300;
/// Bracket shrink over which a refined minimum must keep improving...
const PLATEAU_SHRINK: f64 = 1e-3;
/// ...by at least this factor, or it is not an EP.
const PLATEAU_RATIO: f64 = 0.9;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Frame {
    /// The original Hamiltonian `H`.
    Initial,
    /// The equilibrium frame, governed by `H_pt`.
    Equilibrium,
}

impl Frame {
    pub fn as_str(self) -> &'static str {
        match self {
            Frame::Initial => "if",
            Frame::Equilibrium => "ef",
        }
    }
}

impl std::str::FromStr for Frame {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "if" | "initial" => Ok(Frame::Initial),
            "ef" | "equilibrium" => Ok(Frame::Equilibrium),
            _ => Err(Error::Parameter(format!("unknown frame '{s}'"))),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Thresholds {
    pub gap: f64,
    pub coalescence: f64,
    pub refine_width: f64,
}

impl Default for Thresholds {
    fn default() -> Self {
        Thresholds {
            gap: GAP_TOL,
            coalescence: COALESCENCE_TOL,
            refine_width: REFINE_WIDTH,
        }
    }
}

/// Eigenpairs of one model at one parameter point, in one frame.
#[derive(Clone, Debug)]
pub struct Spectrum {
    pub values: Vec<C64>,
    /// Unit-norm right eigenvectors in the diagonalized (sub)space.
    pub vectors: Vec<CVector>,
    pub conditions: Vec<f64>,
    /// Frobenius norm of the diagonalized matrix.
    pub scale: f64,
}

/// Basis indices diagonalized for `model`; `None` means the full space.
pub fn support(model: &Model) -> Option<Vec<usize>> {
    match model {
        Model::H2(p) => Some(p.layout().indices_with_total_in(&[1, 2])),
        _ => None,
    }
}

fn restrict(m: &CMatrix, support: Option<&[usize]>) -> CMatrix {
    match support {
        Some(idx) => m.restrict(idx),
        None => m.clone(),
    }
}

fn from_eig(r: crate::algebra::EigResult, scale: f64) -> Spectrum {
    Spectrum {
        vectors: (0..r.len()).map(|i| r.right(i)).collect(),
        values: r.eigenvalues,
        conditions: r.conditions,
        scale,
    }
}

/// Diagonalizes `model` in `frame`.
///
/// For the driven model the dense `H_pt` is not used: its spectrum on the
/// truncated space is highly degenerate. Instead `H` is diagonalized and
/// each eigenvalue is shifted by the biorthogonal expectation of `H0`,
/// which is exact wherever the two parts commute.
pub fn spectrum(model: &Model, frame: Frame) -> Result<Spectrum> {
    let d = model.build()?;
    let sup = support(model);
    let sup = sup.as_deref();
    match (model, frame) {
        (Model::H3(_), Frame::Equilibrium) => {
            let r = eig(&d.h)?;
            let h0 = &d.h0;
            let shifted: Vec<C64> = (0..r.len())
                .map(|i| {
                    let (v, w) = (r.right(i), r.left(i));
                    r.eigenvalues[i] - inner(&w, &h0.apply(&v)) / inner(&w, &v)
                })
                .collect();
            let mut s = from_eig(r, d.h_pt.frobenius_norm());
            s.values = shifted;
            Ok(s)
        }
        (_, Frame::Initial) => {
            let m = restrict(&d.h, sup);
            Ok(from_eig(eig(&m)?, m.frobenius_norm()))
        }
        (_, Frame::Equilibrium) => {
            let m = restrict(&d.h_pt, sup);
            Ok(from_eig(eig(&m)?, m.frobenius_norm()))
        }
    }
}

fn overlap(v: &CVector, w: &CVector) -> f64 {
    inner(v, w).norm().min(1.0)
}

fn median(mut xs: Vec<f64>) -> f64 {
    if xs.is_empty() {
        return 0.0;
    }
    xs.sort_by(f64::total_cmp);
    let n = xs.len();
    if n % 2 == 1 {
        xs[n / 2]
    } else {
        (xs[n / 2 - 1] + xs[n / 2]) / 2.0
    }
}

/// `WEIGHT_FACTOR` × median of all pairwise eigenvalue distances.
pub fn default_weight(values: &[C64]) -> f64 {
    let mut d = Vec::with_capacity(values.len() * values.len().saturating_sub(1) / 2);
    for i in 0..values.len() {
        for j in i + 1..values.len() {
            d.push((values[i] - values[j]).norm());
        }
    }
    WEIGHT_FACTOR * median(d)
}

/// Minimum-cost assignment of every row to a distinct column
/// (`rows ≤ cols`), by the Hungarian method with potentials.
pub fn assign(cost: &[Vec<f64>]) -> Vec<usize> {
    let n = cost.len();
    if n == 0 {
        return Vec::new();
    }
    let m = cost[0].len();
    assert!(n <= m, "assignment needs rows <= cols");
    let big = cost
        .iter()
        .flatten()
        .copied()
        .filter(|c| c.is_finite())
        .fold(0.0f64, |a, c| a.max(c.abs()))
        * 4.0
        + 1.0;
    let at = |i: usize, j: usize| {
        let c = cost[i][j];
        if c.is_finite() {
            c
        } else {
            big
        }
    };

    // 1-based potentials; column 0 is a sentinel.
    let mut u = vec![0.0; n + 1];
    let mut v = vec![0.0; m + 1];
    let mut p = vec![0usize; m + 1];
    let mut way = vec![0usize; m + 1];
    for i in 1..=n {
        p[0] = i;
        let mut j0 = 0;
        let mut minv = vec![f64::INFINITY; m + 1];
        let mut used = vec![false; m + 1];
        loop {
            used[j0] = true;
            let i0 = p[j0];
            let mut delta = f64::INFINITY;
            let mut j1 = 0;
            for j in 1..=m {
                if !used[j] {
                    let cur = at(i0 - 1, j - 1) - u[i0] - v[j];
                    if cur < minv[j] {
                        minv[j] = cur;
                        way[j] = j0;
                    }
                    if minv[j] < delta {
                        delta = minv[j];
                        j1 = j;
                    }
                }
            }
            for j in 0..=m {
                if used[j] {
                    u[p[j]] += delta;
                    v[j] -= delta;
                } else {
                    minv[j] -= delta;
                }
            }
            j0 = j1;
            if p[j0] == 0 {
                break;
            }
        }
        loop {
            let j1 = way[j0];
            p[j0] = p[j1];
            j0 = j1;
            if j0 == 0 {
                break;
            }
        }
    }
    let mut out = vec![0; n];
    for j in 1..=m {
        if p[j] != 0 {
            out[p[j] - 1] = j - 1;
        }
    }
    out
}

#[derive(Clone, Debug, PartialEq)]
pub struct TrackStep {
    /// `permutation[i]` is the index in `next` continuing entry `i` of `prev`.
    pub permutation: Vec<usize>,
    /// Rows whose two cheapest candidates differ by less than
    /// [`AMBIGUITY_RATIO`].
    pub ambiguous: Vec<bool>,
    pub cost: f64,
    /// Smallest `|v_i†v_π(i)|` over the matched pairs.
    pub min_overlap: f64,
}

impl TrackStep {
    pub fn is_ambiguous(&self) -> bool {
        self.ambiguous.iter().any(|&a| a)
    }
}

fn match_pairs(
    prev_values: &[C64],
    prev_vectors: &[CVector],
    next: &Spectrum,
    w: f64,
) -> TrackStep {
    let cost: Vec<Vec<f64>> = prev_values
        .iter()
        .zip(prev_vectors)
        .map(|(e, v)| {
            next.values
                .iter()
                .zip(&next.vectors)
                .map(|(f, u)| (e - f).norm() + w * (1.0 - overlap(v, u)))
                .collect()
        })
        .collect();
    let permutation = assign(&cost);
    let ambiguous = cost
        .iter()
        .map(|row| {
            if row.len() < 2 {
                return false;
            }
            let mut r = row.clone();
            r.sort_by(f64::total_cmp);
            r[1] - r[0] < AMBIGUITY_RATIO * r[1] || r[1] == 0.0
        })
        .collect();
    let total = permutation
        .iter()
        .enumerate()
        .map(|(i, &j)| cost[i][j])
        .sum();
    let min_overlap = permutation
        .iter()
        .enumerate()
        .map(|(i, &j)| overlap(&prev_vectors[i], &next.vectors[j]))
        .fold(1.0, f64::min);
    TrackStep {
        permutation,
        ambiguous,
        cost: total,
        min_overlap,
    }
}

/// Optimal branch matching between two consecutive eigendecompositions,
/// with the default overlap weight.
pub fn track_step(
    prev: &crate::algebra::EigResult,
    next: &crate::algebra::EigResult,
) -> Result<TrackStep> {
    track_step_weighted(prev, next, default_weight(&prev.eigenvalues))
}

pub fn track_step_weighted(
    prev: &crate::algebra::EigResult,
    next: &crate::algebra::EigResult,
    w: f64,
) -> Result<TrackStep> {
    if prev.len() != next.len() || prev.right_vectors.rows() != next.right_vectors.rows() {
        return Err(Error::Dimension(format!(
            "track_step: {} vs {} eigenpairs",
            prev.len(),
            next.len()
        )));
    }
    let prev_vectors: Vec<CVector> = (0..prev.len()).map(|i| prev.right(i)).collect();
    let next = from_eig(next.clone(), 0.0);
    Ok(match_pairs(&prev.eigenvalues, &prev_vectors, &next, w))
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct StepSummary {
    pub min_overlap: f64,
    pub ambiguous: bool,
    /// Largest `|E_b(θ_{k+1}) − E_b(θ_k)|` over branches.
    pub max_jump: f64,
    /// Jump much larger than on the neighbouring steps (expected at EPs).
    pub discontinuous: bool,
}

#[derive(Clone, Debug)]
pub struct SweepResult {
    pub model: Model,
    pub parameter_name: String,
    pub grid: Vec<f64>,
    pub frame: Frame,
    pub labels: Vec<String>,
    /// Supermode occupation `(n_c, n_d)` of each branch, if any.
    pub states: Vec<Option<(usize, usize)>>,
    /// `branches[b][k]` is branch `b` at grid point `k`.
    pub branches: Vec<Vec<C64>>,
    pub vectors: Vec<Vec<CVector>>,
    /// One entry per grid interval.
    pub steps: Vec<StepSummary>,
}

impl SweepResult {
    pub fn branch_count(&self) -> usize {
        self.branches.len()
    }

    /// Coalescence metric over tracked pairs at each grid point.
    pub fn coalescence_metric(&self) -> Vec<f64> {
        (0..self.grid.len())
            .map(|k| pair_metric(self, k).0)
            .collect()
    }
}

/// Smallest pair metric at grid point `k` and the pair attaining it.
fn pair_metric(s: &SweepResult, k: usize) -> (f64, usize, usize) {
    let mut best = (f64::INFINITY, 0, 0);
    for i in 0..s.branches.len() {
        for j in i + 1..s.branches.len() {
            let m = (s.branches[i][k] - s.branches[j][k]).norm()
                + (1.0 - overlap(&s.vectors[i][k], &s.vectors[j][k]));
            if m < best.0 {
                best = (m, i, j);
            }
        }
    }
    best
}

fn check_grid(grid: &[f64]) -> Result<()> {
    if grid.len() < 2 {
        return Err(Error::Parameter(format!(
            "sweep needs at least 2 grid points, got {}",
            grid.len()
        )));
    }
    if grid.iter().any(|x| !x.is_finite()) {
        return Err(Error::Parameter("grid has non-finite points".into()));
    }
    let up = grid.windows(2).all(|w| w[1] > w[0]);
    let down = grid.windows(2).all(|w| w[1] < w[0]);
    if !(up || down) {
        return Err(Error::Parameter("grid must be strictly monotone".into()));
    }
    Ok(())
}

/// `count` evenly spaced points from `start` to `stop` inclusive.
pub fn linspace(start: f64, stop: f64, count: usize) -> Vec<f64> {
    match count {
        0 => Vec::new(),
        1 => vec![start],
        _ => (0..count)
            .map(|k| {
                if k == count - 1 {
                    stop
                } else {
                    start + (stop - start) * k as f64 / (count - 1) as f64
                }
            })
            .collect(),
    }
}

fn at_point(name: &str, value: f64, e: Error) -> Error {
    Error::AtGridPoint {
        parameter: name.to_string(),
        value,
        source: Box::new(e),
    }
}

/// Initial branch selection: all eigenpairs of `H1` sorted by `(Re, Im)`,
/// or the eigenpairs closest to the closed-form values of the tracked
/// supermode states.
/// Occupation `(n_c, n_d)` of a tracked supermode state.
type State = Option<(usize, usize)>;

fn initial_branches(model: &Model, frame: Frame, s: &Spectrum) -> Result<(Vec<usize>, Vec<State>)> {
    let states = model.tracked_states();
    if states.is_empty() {
        let mut idx: Vec<usize> = (0..s.values.len()).collect();
        idx.sort_by(|&a, &b| {
            s.values[a]
                .re
                .total_cmp(&s.values[b].re)
                .then(s.values[a].im.total_cmp(&s.values[b].im))
        });
        let n = idx.len();
        return Ok((idx, vec![None; n]));
    }
    if s.values.len() < states.len() {
        return Err(Error::Dimension(format!(
            "{} eigenpairs cannot host {} tracked states",
            s.values.len(),
            states.len()
        )));
    }
    let mut cost = Vec::with_capacity(states.len());
    for &(nc, nd) in states {
        let (e_if, e_ef) = model.analytic(nc, nd)?;
        let target = if frame == Frame::Initial { e_if } else { e_ef };
        cost.push(s.values.iter().map(|e| (e - target).norm()).collect());
    }
    Ok((assign(&cost), states.iter().map(|&st| Some(st)).collect()))
}

pub fn sweep(
    model: &Model,
    parameter_name: &str,
    grid: &[f64],
    frame: Frame,
) -> Result<SweepResult> {
    check_grid(grid)?;
    model.parameter(parameter_name)?;

    let evaluated: Vec<Result<Spectrum>> = grid
        .par_iter()
        .map(|&x| {
            model
                .with_parameter(parameter_name, x)
                .and_then(|m| spectrum(&m, frame))
                .map_err(|e| at_point(parameter_name, x, e))
        })
        .collect();
    // first failure in grid order, independent of scheduling
    let spectra: Vec<Spectrum> = evaluated.into_iter().collect::<Result<_>>()?;

    let start = model.with_parameter(parameter_name, grid[0])?;
    let (first, states) = initial_branches(&start, frame, &spectra[0])?;
    let nb = first.len();
    let mut values: Vec<C64> = first.iter().map(|&i| spectra[0].values[i]).collect();
    let mut vecs: Vec<CVector> = first
        .iter()
        .map(|&i| spectra[0].vectors[i].clone())
        .collect();
    let mut branches: Vec<Vec<C64>> = values.iter().map(|&e| vec![e]).collect();
    let mut vectors: Vec<Vec<CVector>> = vecs.iter().map(|v| vec![v.clone()]).collect();
    let mut steps = Vec::with_capacity(grid.len() - 1);

    for k in 1..grid.len() {
        let w = default_weight(&spectra[k - 1].values);
        let step = match_pairs(&values, &vecs, &spectra[k], w);
        let mut max_jump: f64 = 0.0;
        for b in 0..nb {
            let j = step.permutation[b];
            let e = spectra[k].values[j];
            max_jump = max_jump.max((e - values[b]).norm());
            values[b] = e;
            vecs[b] = spectra[k].vectors[j].clone();
            branches[b].push(e);
            vectors[b].push(vecs[b].clone());
        }
        steps.push(StepSummary {
            min_overlap: step.min_overlap,
            ambiguous: step.is_ambiguous(),
            max_jump,
            discontinuous: false,
        });
    }
    let jumps: Vec<f64> = steps.iter().map(|s| s.max_jump).collect();
    for (k, s) in steps.iter_mut().enumerate() {
        let left = if k > 0 { jumps[k - 1] } else { 0.0 };
        let right = jumps.get(k + 1).copied().unwrap_or(0.0);
        let neighbours = left.max(right);
        s.discontinuous = jumps.len() > 1 && s.max_jump > 1e-12 && s.max_jump > 4.0 * neighbours;
    }

    let labels = (1..=nb).map(|b| format!("E{b}")).collect();
    Ok(SweepResult {
        model: *model,
        parameter_name: parameter_name.to_string(),
        grid: grid.to_vec(),
        frame,
        labels,
        states,
        branches,
        vectors,
        steps,
    })
}

/// `(θ_k, max_b |Im E_b(θ_k)|)` for every grid point.
pub fn reality_check(s: &SweepResult) -> Vec<(f64, f64)> {
    s.grid
        .iter()
        .enumerate()
        .map(|(k, &x)| {
            let worst = s.branches.iter().map(|b| b[k].im.abs()).fold(0.0, f64::max);
            (x, worst)
        })
        .collect()
}

#[derive(Clone, Debug, PartialEq)]
pub struct EPReport {
    pub parameter_name: String,
    pub frame: Frame,
    /// Refined parameter value.
    pub location: f64,
    pub branch_ids: Vec<usize>,
    pub labels: Vec<String>,
    /// Mean eigenvalue of the coalescing group.
    pub eigenvalue: C64,
    /// Largest pairwise eigenvalue distance among the reported branches.
    pub eigenvalue_gap: f64,
    /// Threshold `eigenvalue_gap` was accepted against; exceeds the
    /// configured gap only where round-off of a higher-order EP dominates.
    pub gap_threshold: f64,
    /// Largest `1 − |v_i†v_j|` between reported branches whose eigenvectors
    /// coalesce with each other.
    pub vector_coalescence: f64,
    pub order_estimate: usize,
    pub refinement_width: f64,
    pub converged: bool,
    /// `⟨v|G|v⟩` of the geometric number operator (`N` or `N_ε`) on each
    /// reported eigenvector.
    pub geometric_expectations: Vec<f64>,
}

struct Refiner<'a> {
    model: &'a Model,
    name: &'a str,
    frame: Frame,
}

impl Refiner<'_> {
    fn spectrum_at(&self, x: f64) -> Result<Spectrum> {
        spectrum(&self.model.with_parameter(self.name, x)?, self.frame)
    }

    /// Pair metric at `x` for the eigenpairs that best continue `refs`.
    fn metric(&self, x: f64, refs: [&CVector; 2]) -> f64 {
        let Ok(s) = self.spectrum_at(x) else {
            return f64::INFINITY;
        };
        if s.values.len() < 2 {
            return f64::INFINITY;
        }
        let best_for = |r: &CVector, skip: Option<usize>| {
            (0..s.values.len())
                .filter(|&p| Some(p) != skip)
                .max_by(|&a, &b| overlap(r, &s.vectors[a]).total_cmp(&overlap(r, &s.vectors[b])))
                .expect("at least two eigenpairs")
        };
        let p = best_for(refs[0], None);
        let q = best_for(refs[1], Some(p));
        (s.values[p] - s.values[q]).norm() + (1.0 - overlap(&s.vectors[p], &s.vectors[q]))
    }

    /// Golden-section search on `[lo, hi]`, continued to the resolution of
    /// the floating-point grid: second-order EPs only close the eigenvalue
    /// gap as `√|θ − θ_EP|`.
    fn golden(&self, lo: f64, hi: f64, seed: (f64, f64), refs: [&CVector; 2]) -> (f64, f64) {
        let inv_phi = (5f64.sqrt() - 1.0) / 2.0;
        let (mut a, mut b) = (lo, hi);
        let mut c = b - inv_phi * (b - a);
        let mut d = a + inv_phi * (b - a);
        let mut fc = self.metric(c, refs);
        let mut fd = self.metric(d, refs);
        let mut best = seed;
        for (x, f) in [(c, fc), (d, fd)] {
            if f < best.1 {
                best = (x, f);
            }
        }
        let mut checkpoint = (b - a, best.1);
        for _ in 0..MAX_GOLDEN_STEPS {
            let floor = 4.0 * f64::EPSILON * a.abs().max(b.abs()).max(f64::MIN_POSITIVE);
            if b - a <= floor {
                break;
            }
            // near an EP the metric falls like a fractional power of the
            // width; a smooth minimum plateaus, so stop refining it
            if b - a <= checkpoint.0 * PLATEAU_SHRINK {
                if best.1 > PLATEAU_RATIO * checkpoint.1 {
                    break;
                }
                checkpoint = (b - a, best.1);
            }
            if fc <= fd {
                b = d;
                d = c;
                fd = fc;
                c = b - inv_phi * (b - a);
                fc = self.metric(c, refs);
                if fc < best.1 {
                    best = (c, fc);
                }
            } else {
                a = c;
                c = d;
                fc = fd;
                d = a + inv_phi * (b - a);
                fd = self.metric(d, refs);
                if fd < best.1 {
                    best = (d, fd);
                }
            }
        }
        (best.0, b - a)
    }
}

struct Group {
    members: Vec<usize>,
    /// Coalescence cluster of each member.
    cluster_of: Vec<usize>,
    threshold: f64,
    mean: C64,
}

/// Clusters eigenpairs by eigenvector coalescence, keeps clusters whose
/// eigenvalue spread is below the gap threshold (raised to the
/// `(u‖M‖)^(1/k)` round-off floor of a `k`-fold Jordan block), and merges
/// clusters sharing a mean eigenvalue.
fn coalescing_groups(s: &Spectrum, th: &Thresholds) -> Vec<Group> {
    let n = s.values.len();
    let mut parent: Vec<usize> = (0..n).collect();
    fn find(p: &mut [usize], mut i: usize) -> usize {
        while p[i] != i {
            p[i] = p[p[i]];
            i = p[i];
        }
        i
    }
    for i in 0..n {
        for j in i + 1..n {
            if 1.0 - overlap(&s.vectors[i], &s.vectors[j]) < th.coalescence {
                let (ri, rj) = (find(&mut parent, i), find(&mut parent, j));
                if ri != rj {
                    parent[ri.max(rj)] = ri.min(rj);
                }
            }
        }
    }
    let mut clusters: Vec<Vec<usize>> = Vec::new();
    let mut root_slot = vec![usize::MAX; n];
    for i in 0..n {
        let r = find(&mut parent, i);
        if root_slot[r] == usize::MAX {
            root_slot[r] = clusters.len();
            clusters.push(Vec::new());
        }
        clusters[root_slot[r]].push(i);
    }

    let mut accepted: Vec<(Vec<usize>, f64, C64)> = Vec::new();
    for c in clusters.into_iter().filter(|c| c.len() >= 2) {
        let spread = max_pairwise(&c.iter().map(|&i| s.values[i]).collect::<Vec<_>>());
        let floor = 10.0 * (f64::EPSILON * s.scale).powf(1.0 / c.len() as f64);
        let threshold = th.gap.max(floor);
        if spread <= threshold {
            let mean = c.iter().map(|&i| s.values[i]).sum::<C64>() / c.len() as f64;
            accepted.push((c, threshold, mean));
        }
    }

    let mut groups: Vec<Group> = Vec::new();
    for (ci, (members, threshold, mean)) in accepted.into_iter().enumerate() {
        match groups.iter_mut().find(|g| (g.mean - mean).norm() <= th.gap) {
            Some(g) => {
                let total = g.members.len() + members.len();
                g.mean =
                    (g.mean * g.members.len() as f64 + mean * members.len() as f64) / total as f64;
                g.cluster_of.extend(std::iter::repeat_n(ci, members.len()));
                g.members.extend(members);
                // members of two clusters may differ by both spreads plus the merge tolerance
                g.threshold = 2.0 * g.threshold.max(threshold) + th.gap;
            }
            None => groups.push(Group {
                cluster_of: vec![ci; members.len()],
                members,
                threshold,
                mean,
            }),
        }
    }
    groups
}

fn max_pairwise(values: &[C64]) -> f64 {
    let mut m: f64 = 0.0;
    for i in 0..values.len() {
        for j in i + 1..values.len() {
            m = m.max((values[i] - values[j]).norm());
        }
    }
    m
}

pub fn detect_eps(s: &SweepResult, model: &Model, frame: Frame) -> Result<Vec<EPReport>> {
    detect_eps_with(s, model, frame, &Thresholds::default())
}

/// Locates EPs along a sweep.
///
/// Every interior local minimum of the tracked-pair metric is refined; the
/// refined point is reported once per group of coalescing eigenpairs that
/// contains at least two tracked branches.
pub fn detect_eps_with(
    s: &SweepResult,
    model: &Model,
    frame: Frame,
    th: &Thresholds,
) -> Result<Vec<EPReport>> {
    if frame != s.frame {
        return Err(Error::Parameter(format!(
            "sweep was computed in frame {} but detection requested in {}",
            s.frame.as_str(),
            frame.as_str()
        )));
    }
    let name = s.parameter_name.as_str();
    let refiner = Refiner { model, name, frame };
    let metric: Vec<(f64, usize, usize)> = (0..s.grid.len()).map(|k| pair_metric(s, k)).collect();
    let candidates: Vec<usize> = (1..s.grid.len().saturating_sub(1))
        .filter(|&k| metric[k].0 < metric[k - 1].0 && metric[k].0 <= metric[k + 1].0)
        .collect();

    let mut reports: Vec<EPReport> = Vec::new();
    for k in candidates {
        let (m, i, j) = metric[k];
        let (lo, hi) = {
            let (x, y) = (s.grid[k - 1], s.grid[k + 1]);
            (x.min(y), x.max(y))
        };
        let refs = [&s.vectors[i][k], &s.vectors[j][k]];
        let (x, width) = refiner.golden(lo, hi, (s.grid[k], m), refs);

        let at = model.with_parameter(name, x)?;
        let spec = spectrum(&at, frame).map_err(|e| at_point(name, x, e))?;
        let geometric = restrict(&at.geometric_number()?, support(&at).as_deref());

        // which eigenpair continues each tracked branch
        let ref_values: Vec<C64> = s.branches.iter().map(|b| b[k]).collect();
        let ref_vectors: Vec<CVector> = s.vectors.iter().map(|v| v[k].clone()).collect();
        let owner = match_pairs(
            &ref_values,
            &ref_vectors,
            &spec,
            default_weight(&spec.values),
        )
        .permutation;

        for g in coalescing_groups(&spec, th) {
            let mut ids: Vec<(usize, usize)> = owner
                .iter()
                .enumerate()
                .filter_map(|(b, p)| g.members.iter().position(|m| m == p).map(|pos| (b, pos)))
                .collect();
            if ids.len() < 2 {
                continue;
            }
            ids.sort();
            let vals: Vec<C64> = ids.iter().map(|&(b, _)| spec.values[owner[b]]).collect();
            let mut coalescence: f64 = 0.0;
            for a in 0..ids.len() {
                for c in a + 1..ids.len() {
                    if g.cluster_of[ids[a].1] == g.cluster_of[ids[c].1] {
                        let (va, vc) = (
                            &spec.vectors[owner[ids[a].0]],
                            &spec.vectors[owner[ids[c].0]],
                        );
                        coalescence = coalescence.max(1.0 - overlap(va, vc));
                    }
                }
            }
            let geometric_expectations = ids
                .iter()
                .map(|&(b, _)| {
                    let v = &spec.vectors[owner[b]];
                    (inner(v, &geometric.apply(v)) / inner(v, v)).re
                })
                .collect();
            let branch_ids: Vec<usize> = ids.iter().map(|&(b, _)| b).collect();
            let report = EPReport {
                parameter_name: name.to_string(),
                frame,
                location: x,
                labels: branch_ids.iter().map(|&b| s.labels[b].clone()).collect(),
                eigenvalue: g.mean,
                eigenvalue_gap: max_pairwise(&vals),
                gap_threshold: g.threshold,
                vector_coalescence: coalescence,
                order_estimate: branch_ids.len(),
                refinement_width: width,
                converged: width <= th.refine_width,
                geometric_expectations,
                branch_ids,
            };
            let duplicate = reports.iter().any(|r| {
                r.branch_ids == report.branch_ids && (r.location - report.location).abs() <= th.gap
            });
            if !duplicate {
                reports.push(report);
            }
        }
    }
    reports.sort_by(|a, b| {
        a.location
            .total_cmp(&b.location)
            .then(a.branch_ids.cmp(&b.branch_ids))
    });
    Ok(reports)
}
