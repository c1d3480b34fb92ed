//! Parity operators, the antilinear PT action and symmetry residuals.
//!
//! Time reversal is entrywise complex conjugation in the fixed Fock/qubit
//! basis, so the PT image of an operator is `P·conj(H)·P` (P is its own
//! inverse and real).

use crate::algebra::{
    condition_1, ensure_same_square, inverse, CMatrix, SpaceLayout, Subsystem, ONE,
};
use crate::error::{Error, Result};

pub const DEFAULT_TOL: f64 = 1e-10;

const ETA_MAX_CONDITION: f64 = 1e12;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ParityKind {
    QubitSigmaX,
    TwoModeShufflePhase,
}

#[derive(Clone, Debug)]
pub struct ParityOperator {
    matrix: CMatrix,
    layout: SpaceLayout,
    kind: ParityKind,
}

impl ParityOperator {
    pub fn matrix(&self) -> &CMatrix {
        &self.matrix
    }

    pub fn layout(&self) -> &SpaceLayout {
        &self.layout
    }

    pub fn kind(&self) -> ParityKind {
        self.kind
    }

    pub fn dim(&self) -> usize {
        self.matrix.dim()
    }

    /// `(PT) X (PT) = P·conj(X)·P`.
    pub fn pt_image(&self, x: &CMatrix) -> CMatrix {
        &(&self.matrix * &x.conj()) * &self.matrix
    }

    /// `asym(X) = P·conj(X)·P − X`; zero iff `X` is PT-symmetric.
    pub fn asymmetry(&self, x: &CMatrix) -> CMatrix {
        &self.pt_image(x) - x
    }
}

/// `σ_x = σ_eg + σ_ge` on a single qubit.
pub fn parity_qubit() -> ParityOperator {
    ParityOperator {
        matrix: CMatrix::from_real(&[&[0.0, 1.0], &[1.0, 0.0]]),
        layout: SpaceLayout::qubit(),
        kind: ParityKind::QubitSigmaX,
    }
}

/// Permutation swapping two equal tensor factors of dimension `d`:
/// `|i⟩⊗|j⟩ ↦ |j⟩⊗|i⟩`.
pub fn perfect_shuffle(d: usize) -> CMatrix {
    let mut p = CMatrix::zeros(d * d, d * d);
    for i in 0..d {
        for j in 0..d {
            p.set(j * d + i, i * d + j, ONE);
        }
    }
    p
}

/// `P = P_S · exp(iπ(a†a + b†b))` on two modes of equal cutoff.
pub fn parity_two_mode(layout: &SpaceLayout) -> Result<ParityOperator> {
    let d = match layout.subsystems() {
        [Subsystem::Boson { cutoff: na }, Subsystem::Boson { cutoff: nb }] => {
            if na != nb {
                return Err(Error::Layout(format!(
                    "exchange parity needs equal cutoffs, got {na} and {nb}"
                )));
            }
            na + 1
        }
        _ => {
            return Err(Error::Layout(
                "exchange parity needs exactly two bosonic modes".into(),
            ))
        }
    };
    let shuffle = perfect_shuffle(d);
    // exp(iπN) is diagonal with entries (−1)^(n_a + n_b)
    let phase = CMatrix::diag(
        &(0..layout.dim())
            .map(|i| {
                if layout.total_occupation(i).is_multiple_of(2) {
                    ONE
                } else {
                    -ONE
                }
            })
            .collect::<Vec<_>>(),
    );
    Ok(ParityOperator {
        matrix: &shuffle * &phase,
        layout: layout.clone(),
        kind: ParityKind::TwoModeShufflePhase,
    })
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SymmetryReport {
    /// Relative Frobenius residual.
    pub residual: f64,
    pub is_symmetric: bool,
    pub tol: f64,
}

impl SymmetryReport {
    fn new(residual: f64, tol: f64) -> Self {
        SymmetryReport {
            residual,
            is_symmetric: residual <= tol,
            tol,
        }
    }
}

fn relative(num: f64, den: f64) -> f64 {
    num / den.max(f64::EPSILON)
}

pub fn pt_residual(h: &CMatrix, p: &ParityOperator) -> Result<SymmetryReport> {
    pt_residual_with_tol(h, p, DEFAULT_TOL)
}

/// `‖P·conj(H)·P − H‖_F / ‖H‖_F`.
pub fn pt_residual_with_tol(h: &CMatrix, p: &ParityOperator, tol: f64) -> Result<SymmetryReport> {
    ensure_same_square("pt_residual", &[h, p.matrix()])?;
    Ok(SymmetryReport::new(
        relative(p.asymmetry(h).frobenius_norm(), h.frobenius_norm()),
        tol,
    ))
}

pub fn pseudo_hermiticity_residual(h: &CMatrix, eta: &CMatrix) -> Result<SymmetryReport> {
    pseudo_hermiticity_residual_with_tol(h, eta, DEFAULT_TOL)
}

/// `‖η H η⁻¹ − H†‖_F / ‖H‖_F`.
pub fn pseudo_hermiticity_residual_with_tol(
    h: &CMatrix,
    eta: &CMatrix,
    tol: f64,
) -> Result<SymmetryReport> {
    ensure_same_square("pseudo_hermiticity_residual", &[h, eta])?;
    let cond = condition_1(eta);
    if !(cond < ETA_MAX_CONDITION) {
        return Err(Error::IllConditioned {
            condition: cond,
            context: "metric eta is singular or ill-conditioned".into(),
        });
    }
    let eta_inv = inverse(eta)?;
    let lhs = &(eta * h) * &eta_inv;
    Ok(SymmetryReport::new(
        relative(lhs.distance(&h.adjoint()), h.frobenius_norm()),
        tol,
    ))
}

/// True when every entry is real to within `tol`.
pub fn is_real(m: &CMatrix, tol: f64) -> bool {
    m.as_array().iter().all(|z| z.im.abs() <= tol)
}
