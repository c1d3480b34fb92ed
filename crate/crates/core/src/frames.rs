//! Equilibrium-frame transformation and hidden-PT certification.
//!
//! For `H = H_pt + H0` the substitution `ψ = S(t) ψ̃` with `S = exp(−i H0 t)`
//! turns the Schrödinger equation for `H` into one for
//! `H̃ = S⁻¹ H_pt S`. When `[H_pt, H0] = 0`, `H̃ = H_pt` and every eigenvalue
//! of `H` splits as `E = Ẽ + E⁰` over a shared eigenvector.
//!
//! Truncated bosonic models only commute away from the Fock cutoff, so the
//! commutator, drift and eigenpair checks accept an optional `region`: a list
//! of basis indices on which the identity is evaluated.

use crate::algebra::{
    eig, ensure_same_square, expm, inner, vector_norm, CMatrix, CVector, EigResult, C64, I,
};
use crate::error::{Error, Result};
use crate::symmetry::{pt_residual_with_tol, ParityOperator};

/// Largest admissible `‖H − H_pt − H0‖_F / ‖H‖_F` for a valid split.
pub const SUM_TOL: f64 = 1e-12;
/// Default certification threshold for the commutator and PT residuals.
pub const CERTIFY_TOL: f64 = 1e-10;
/// Largest admissible 1-norm condition number of `S(t)`.
pub const MAX_FRAME_CONDITION: f64 = 1e12;
/// Eigenpairs with condition above this are treated as defective.
pub const MAX_PAIR_CONDITION: f64 = 1e8;

#[derive(Clone, Debug)]
pub struct Decomposition {
    pub h: CMatrix,
    pub h_pt: CMatrix,
    pub h0: CMatrix,
    pub sum_residual: f64,
    /// `‖[H_pt, H0]‖_F / (‖H_pt‖_F ‖H0‖_F)`, restricted to `region` if set.
    pub commutator_residual: f64,
    pub pt_residual: f64,
    pub tol: f64,
    /// Basis indices on which commutation is claimed; `None` means everywhere.
    pub region: Option<Vec<usize>>,
}

impl Decomposition {
    pub fn is_valid(&self) -> bool {
        self.sum_residual <= SUM_TOL
    }

    /// Valid split whose parts commute and whose first part is PT-symmetric.
    pub fn is_certified(&self) -> bool {
        self.is_valid() && self.commutator_residual <= self.tol && self.pt_residual <= self.tol
    }

    pub fn dim(&self) -> usize {
        self.h.dim()
    }
}

fn ratio(num: f64, den: f64) -> f64 {
    if num == 0.0 {
        0.0
    } else {
        num / den.max(f64::MIN_POSITIVE)
    }
}

fn restricted_norm(m: &CMatrix, region: Option<&[usize]>) -> f64 {
    match region {
        Some(idx) => m.restrict(idx).frobenius_norm(),
        None => m.frobenius_norm(),
    }
}

pub fn check_decomposition(
    h: &CMatrix,
    h_pt: &CMatrix,
    h0: &CMatrix,
    p: &ParityOperator,
) -> Result<Decomposition> {
    check_decomposition_on(h, h_pt, h0, p, None, CERTIFY_TOL)
}

pub fn check_decomposition_on(
    h: &CMatrix,
    h_pt: &CMatrix,
    h0: &CMatrix,
    p: &ParityOperator,
    region: Option<Vec<usize>>,
    tol: f64,
) -> Result<Decomposition> {
    ensure_same_square("check_decomposition", &[h, h_pt, h0, p.matrix()])?;
    let remainder = &(h - h_pt) - h0;
    let sum_residual = ratio(remainder.frobenius_norm(), h.frobenius_norm());
    let comm = crate::algebra::commutator(h_pt, h0)?;
    let commutator_residual = ratio(
        restricted_norm(&comm, region.as_deref()),
        h_pt.frobenius_norm() * h0.frobenius_norm(),
    );
    let pt = pt_residual_with_tol(h_pt, p, tol)?.residual;
    Ok(Decomposition {
        h: h.clone(),
        h_pt: h_pt.clone(),
        h0: h0.clone(),
        sum_residual,
        commutator_residual,
        pt_residual: pt,
        tol,
        region,
    })
}

/// `S(t) = exp(−i H0 t)`. Not unitary unless `H0` is Hermitian.
pub fn ef_frame_operator(h0: &CMatrix, t: f64) -> Result<CMatrix> {
    expm(&h0.scale(-I * t))
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct FrameCheck {
    pub time: f64,
    /// `‖S⁻¹ H_pt S − H_pt‖_F / ‖H_pt‖_F`.
    pub drift: f64,
    /// `‖ψ_IF(t) − S(t) ψ_EF(t)‖₂` when an initial state was supplied.
    pub evolution_gap: Option<f64>,
    /// 1-norm condition number of `S(t)`.
    pub frame_condition: f64,
}

fn frame_pair(h0: &CMatrix, t: f64) -> Result<(CMatrix, CMatrix, f64)> {
    let s = ef_frame_operator(h0, t)?;
    // S⁻¹ = exp(+i H0 t); no explicit inversion
    let s_inv = expm(&h0.scale(I * t))?;
    let cond = s.norm_1() * s_inv.norm_1();
    if !(cond <= MAX_FRAME_CONDITION) {
        return Err(Error::IllConditioned {
            condition: cond,
            context: format!("frame operator S(t) at t = {t}; use a smaller |t|"),
        });
    }
    Ok((s, s_inv, cond))
}

pub fn ef_drift(h_pt: &CMatrix, h0: &CMatrix, t: f64) -> Result<FrameCheck> {
    ef_drift_on(h_pt, h0, t, None)
}

/// Drift of `H_pt` under the frame change, optionally measured on a block.
pub fn ef_drift_on(
    h_pt: &CMatrix,
    h0: &CMatrix,
    t: f64,
    region: Option<&[usize]>,
) -> Result<FrameCheck> {
    ensure_same_square("ef_drift", &[h_pt, h0])?;
    let (s, s_inv, cond) = frame_pair(h0, t)?;
    let transformed = &(&s_inv * h_pt) * &s;
    let diff = &transformed - h_pt;
    Ok(FrameCheck {
        time: t,
        drift: ratio(
            restricted_norm(&diff, region),
            restricted_norm(h_pt, region),
        ),
        evolution_gap: None,
        frame_condition: cond,
    })
}

/// `expm(−iHt)·ψ0`.
pub fn evolve(h: &CMatrix, psi0: &CVector, t: f64) -> Result<CVector> {
    if !h.is_square() || h.rows() != psi0.len() {
        return Err(Error::Dimension(format!(
            "evolve: operator {}x{} with state of length {}",
            h.rows(),
            h.cols(),
            psi0.len()
        )));
    }
    if vector_norm(psi0) == 0.0 {
        return Err(Error::Parameter("initial state has zero norm".into()));
    }
    Ok(expm(&h.scale(-I * t))?.apply(psi0))
}

/// Drift plus `‖ψ_IF(t) − S(t) ψ_EF(t)‖₂`, where `ψ_IF` evolves under
/// `H_pt + H0` and `ψ_EF` under `H_pt`, both from `psi0`.
pub fn frame_check(
    h_pt: &CMatrix,
    h0: &CMatrix,
    psi0: &CVector,
    t: f64,
    region: Option<&[usize]>,
) -> Result<FrameCheck> {
    let mut check = ef_drift_on(h_pt, h0, t, region)?;
    let psi_if = evolve(&(h_pt + h0), psi0, t)?;
    let psi_ef = evolve(h_pt, psi0, t)?;
    let s = ef_frame_operator(h0, t)?;
    let mapped = s.apply(&psi_ef);
    check.evolution_gap = Some(vector_norm(&(&psi_if - &mapped)));
    Ok(check)
}

/// `‖ψ_IF(t) − S(t) ψ_EF(t)‖₂` for many initial states, reusing the three
/// propagators.
pub fn evolution_gaps(
    h_pt: &CMatrix,
    h0: &CMatrix,
    states: &[CVector],
    t: f64,
) -> Result<Vec<f64>> {
    ensure_same_square("evolution_gaps", &[h_pt, h0])?;
    if let Some(bad) = states.iter().find(|s| s.len() != h_pt.rows()) {
        return Err(Error::Dimension(format!(
            "evolution_gaps: state of length {} for dimension {}",
            bad.len(),
            h_pt.rows()
        )));
    }
    let u_if = expm(&(h_pt + h0).scale(-I * t))?;
    let u_ef = expm(&h_pt.scale(-I * t))?;
    let map = &ef_frame_operator(h0, t)? * &u_ef;
    Ok(states
        .iter()
        .map(|psi| vector_norm(&(&u_if.apply(psi) - &map.apply(psi))))
        .collect())
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SumCheck {
    pub e: C64,
    pub e_tilde: C64,
    pub e0: C64,
    /// `|E − Ẽ − E⁰|`.
    pub gap: f64,
}

/// Eigenvalue of `x_eig` whose left vector overlaps `v` most; near-ties are
/// resolved by proximity to the Rayleigh quotient `rho`.
fn matched_eigenvalue(x_eig: &EigResult, v: &CVector, rho: C64) -> C64 {
    let overlaps: Vec<f64> = (0..x_eig.len())
        .map(|j| inner(&x_eig.left(j), v).norm())
        .collect();
    let best = overlaps.iter().copied().fold(0.0, f64::max);
    let mut pick = 0;
    let mut pick_dist = f64::INFINITY;
    for (j, &o) in overlaps.iter().enumerate() {
        if o >= best * (1.0 - 1e-9) {
            let d = (x_eig.eigenvalues[j] - rho).norm();
            if d < pick_dist {
                pick = j;
                pick_dist = d;
            }
        }
    }
    x_eig.eigenvalues[pick]
}

pub fn eigenvalue_sum_check(decomp: &Decomposition) -> Result<Vec<SumCheck>> {
    eigenvalue_sum_check_on(decomp, None)
}

/// Splits each eigenvalue of `H` into eigenvalues of `H_pt` and `H0` sharing
/// its eigenvector. With `support`, only eigenpairs whose right vector lies
/// inside the given basis indices (weight outside ≤ 1e−12) are checked.
pub fn eigenvalue_sum_check_on(
    decomp: &Decomposition,
    support: Option<&[usize]>,
) -> Result<Vec<SumCheck>> {
    if !decomp.is_certified() {
        return Err(Error::Parameter(
            "decomposition is not certified; the sum relation does not apply".into(),
        ));
    }
    let full = eig(&decomp.h)?;
    let pt = eig(&decomp.h_pt)?;
    let geo = eig(&decomp.h0)?;

    let selected: Vec<usize> = (0..full.len())
        .filter(|&i| match support {
            None => true,
            Some(idx) => {
                let v = full.right(i);
                let inside: f64 = idx.iter().map(|&k| v[k].norm_sqr()).sum();
                1.0 - inside <= 1e-12
            }
        })
        .collect();
    let worst = selected
        .iter()
        .map(|&i| full.conditions[i])
        .fold(1.0, f64::max);
    if !(worst < MAX_PAIR_CONDITION) {
        return Err(Error::NearExceptionalPoint(worst));
    }

    Ok(selected
        .into_iter()
        .map(|i| {
            let v = full.right(i);
            let w = full.left(i);
            let wv = inner(&w, &v);
            let rq = |x: &CMatrix| inner(&w, &x.apply(&v)) / wv;
            let e = full.eigenvalues[i];
            let e_tilde = matched_eigenvalue(&pt, &v, rq(&decomp.h_pt));
            let e0 = matched_eigenvalue(&geo, &v, rq(&decomp.h0));
            SumCheck {
                e,
                e_tilde,
                e0,
                gap: (e - e_tilde - e0).norm(),
            }
        })
        .collect())
}
