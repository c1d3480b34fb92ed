//! The three model Hamiltonians, their supermode transformations and
//! closed-form spectra.
//!
//! * `H1`: a driven two-level atom with polarization decay, basis `(e, g)`.
//! * `H2`: two coupled lossy bosonic modes.
//! * `H3`: the same modes with coherent drive and a compensating constant.
//!
//! Each builder returns the full Hamiltonian together with its split into a
//! PT-symmetric part and a commuting geometric part `H0`.

use crate::algebra::{
    annihilation, creation, number, total_number, CMatrix, SpaceLayout, C64, I, ONE, ZERO,
};
use crate::error::{Error, Result};
use crate::frames::{check_decomposition_on, Decomposition, CERTIFY_TOL};
use crate::symmetry::{parity_qubit, parity_two_mode, ParityOperator};

/// Excitation margin kept away from the Fock cutoff in driven-model checks.
pub const INTERIOR_MARGIN: usize = 2;

/// The four states tracked in the bosonic figures, as `(n_c, n_d)`.
pub const TRACKED_STATES: [(usize, usize); 4] = [(1, 0), (0, 1), (2, 0), (0, 2)];

fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

fn finite(name: &str, x: f64) -> Result<()> {
    if x.is_finite() {
        Ok(())
    } else {
        Err(Error::Parameter(format!("{name} must be finite, got {x}")))
    }
}

fn check_coupling(g: f64) -> Result<()> {
    finite("g", g)?;
    if g <= 0.0 {
        return Err(Error::Parameter(format!("g must be > 0, got {g}")));
    }
    Ok(())
}

fn check_cutoff(n_max: usize) -> Result<()> {
    if n_max < 2 {
        return Err(Error::Parameter(format!("n_max must be >= 2, got {n_max}")));
    }
    Ok(())
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct H1Params {
    pub omega: f64,
    pub gamma_e: f64,
}

impl H1Params {
    pub fn new(omega: f64, gamma_e: f64) -> Result<Self> {
        finite("omega", omega)?;
        finite("gamma_e", gamma_e)?;
        if omega <= 0.0 {
            return Err(Error::Parameter(format!("omega must be > 0, got {omega}")));
        }
        if gamma_e < 0.0 {
            return Err(Error::Parameter(format!(
                "gamma_e must be >= 0, got {gamma_e}"
            )));
        }
        Ok(H1Params { omega, gamma_e })
    }
}

/// Coupled modes with loss rates `gamma_a`, `gamma_b`.
///
/// Negative rates (gain) are accepted so that `κ` can be swept past `γ` at
/// fixed `γ`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct H2Params {
    pub g: f64,
    pub gamma_a: f64,
    pub gamma_b: f64,
    pub n_max: usize,
}

impl H2Params {
    pub fn new(g: f64, gamma_a: f64, gamma_b: f64, n_max: usize) -> Result<Self> {
        check_coupling(g)?;
        finite("gamma_a", gamma_a)?;
        finite("gamma_b", gamma_b)?;
        check_cutoff(n_max)?;
        Ok(H2Params {
            g,
            gamma_a,
            gamma_b,
            n_max,
        })
    }

    /// From the balanced/common rates: `γa = γ + κ`, `γb = γ − κ`.
    pub fn from_kappa(g: f64, kappa: f64, gamma: f64, n_max: usize) -> Result<Self> {
        finite("kappa", kappa)?;
        finite("gamma", gamma)?;
        Self::new(g, gamma + kappa, gamma - kappa, n_max)
    }

    pub fn kappa(&self) -> f64 {
        (self.gamma_a - self.gamma_b) / 2.0
    }

    pub fn gamma(&self) -> f64 {
        (self.gamma_a + self.gamma_b) / 2.0
    }

    /// Principal `√(g² − κ²)`; purely imaginary past the EP.
    pub fn lambda(&self) -> C64 {
        principal_lambda(self.g, self.kappa())
    }

    pub fn layout(&self) -> SpaceLayout {
        SpaceLayout::two_modes(self.n_max).expect("cutoff validated")
    }
}

fn principal_lambda(g: f64, kappa: f64) -> C64 {
    c(g * g - kappa * kappa, 0.0).sqrt()
}

/// Driven coupled modes. Requires `|κ| < g`: every derived constant
/// diverges at `λ = 0`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct H3Params {
    pub g: f64,
    pub gamma_a: f64,
    pub gamma_b: f64,
    pub epsilon: f64,
    pub n_max: usize,
}

impl H3Params {
    pub fn new(g: f64, gamma_a: f64, gamma_b: f64, epsilon: f64, n_max: usize) -> Result<Self> {
        let base = H2Params::new(g, gamma_a, gamma_b, n_max)?;
        finite("epsilon", epsilon)?;
        if epsilon < 0.0 {
            return Err(Error::Parameter(format!(
                "epsilon must be >= 0, got {epsilon}"
            )));
        }
        let kappa = base.kappa();
        if kappa.abs() >= g {
            return Err(Error::SpectralSingularity(format!(
                "|kappa| = {} >= g = {g}",
                kappa.abs()
            )));
        }
        Ok(H3Params {
            g,
            gamma_a,
            gamma_b,
            epsilon,
            n_max,
        })
    }

    pub fn from_kappa(g: f64, kappa: f64, gamma: f64, epsilon: f64, n_max: usize) -> Result<Self> {
        finite("kappa", kappa)?;
        finite("gamma", gamma)?;
        Self::new(g, gamma + kappa, gamma - kappa, epsilon, n_max)
    }

    pub fn undriven(&self) -> H2Params {
        H2Params {
            g: self.g,
            gamma_a: self.gamma_a,
            gamma_b: self.gamma_b,
            n_max: self.n_max,
        }
    }

    pub fn kappa(&self) -> f64 {
        (self.gamma_a - self.gamma_b) / 2.0
    }

    pub fn gamma(&self) -> f64 {
        (self.gamma_a + self.gamma_b) / 2.0
    }

    pub fn lambda(&self) -> f64 {
        (self.g * self.g - self.kappa() * self.kappa()).sqrt()
    }

    /// `θ = γ(g − iκ)/λ²`.
    pub fn theta(&self) -> C64 {
        c(self.g, -self.kappa()) * (self.gamma() / self.lambda().powi(2))
    }

    /// `χ = 2γε²/λ²`.
    pub fn chi(&self) -> f64 {
        2.0 * self.gamma() * self.epsilon.powi(2) / self.lambda().powi(2)
    }

    /// `λ₀ = −2gε²/λ²`.
    pub fn lambda0(&self) -> f64 {
        -2.0 * self.g * self.epsilon.powi(2) / self.lambda().powi(2)
    }

    pub fn layout(&self) -> SpaceLayout {
        SpaceLayout::two_modes(self.n_max).expect("cutoff validated")
    }

    /// Basis states at least [`INTERIOR_MARGIN`] excitations below the cutoff.
    pub fn interior(&self) -> Vec<usize> {
        self.layout()
            .indices_with_total_at_most(self.n_max - INTERIOR_MARGIN)
    }
}

pub fn build_h1(p: &H1Params) -> Result<(CMatrix, Decomposition)> {
    let (w, ge) = (c(p.omega, 0.0), p.gamma_e);
    let h = CMatrix::from_rows(&[vec![c(0.0, -ge), w], vec![w, ZERO]]);
    let h_pt = CMatrix::from_rows(&[vec![c(0.0, -ge / 2.0), w], vec![w, c(0.0, ge / 2.0)]]);
    let h0 = CMatrix::identity(2).scale(c(0.0, -ge / 2.0));
    let d = check_decomposition_on(&h, &h_pt, &h0, &parity_qubit(), None, CERTIFY_TOL)?;
    Ok((h, d))
}

struct Ladders {
    a: CMatrix,
    ad: CMatrix,
    b: CMatrix,
    bd: CMatrix,
    na: CMatrix,
    nb: CMatrix,
}

impl Ladders {
    fn new(layout: &SpaceLayout) -> Result<Self> {
        Ok(Ladders {
            a: annihilation(layout, 0)?,
            ad: creation(layout, 0)?,
            b: annihilation(layout, 1)?,
            bd: creation(layout, 1)?,
            na: number(layout, 0)?,
            nb: number(layout, 1)?,
        })
    }

    /// `a†b + b†a`.
    fn hop(&self) -> CMatrix {
        &(&self.ad * &self.b) + &(&self.bd * &self.a)
    }

    /// PT-symmetric core `g·hop − iκ a†a + iκ b†b`.
    fn coupled(&self, g: f64, kappa: f64) -> CMatrix {
        let gain_loss = &self.na.scale(c(0.0, -kappa)) + &self.nb.scale(c(0.0, kappa));
        &self.hop().scale(c(g, 0.0)) + &gain_loss
    }
}

pub fn build_h2(p: &H2Params) -> Result<(CMatrix, Decomposition)> {
    let layout = p.layout();
    let l = Ladders::new(&layout)?;
    let h = &(&l.hop().scale(c(p.g, 0.0)) + &l.na.scale(c(0.0, -p.gamma_a)))
        + &l.nb.scale(c(0.0, -p.gamma_b));
    let h_pt = l.coupled(p.g, p.kappa());
    let h0 = total_number(&layout).scale(c(0.0, -p.gamma()));
    let parity = parity_two_mode(&layout)?;
    let d = check_decomposition_on(&h, &h_pt, &h0, &parity, None, CERTIFY_TOL)?;
    Ok((h, d))
}

/// Driven model. The commutator of the split is evaluated on
/// [`H3Params::interior`], since the truncated ladder algebra fails at the
/// cutoff.
pub fn build_h3(p: &H3Params) -> Result<(CMatrix, Decomposition)> {
    let layout = p.layout();
    let l = Ladders::new(&layout)?;
    let eps = p.epsilon;
    let theta = p.theta();
    let a_drive = &l.a - &l.ad;
    let b_drive = &l.b - &l.bd;

    let h = {
        let hop = l.hop().scale(c(p.g, 0.0));
        let da = a_drive.scale(I * eps * (ONE - I * theta));
        let db = b_drive.scale(I * eps * (ONE - I * theta.conj()));
        let loss = &l.na.scale(c(0.0, -p.gamma_a)) + &l.nb.scale(c(0.0, -p.gamma_b));
        let shift = layout.identity().scale(c(0.0, -p.chi()));
        &(&(&(&hop + &da) + &db) + &loss) + &shift
    };
    let h_pt =
        &(&l.coupled(p.g, p.kappa()) + &a_drive.scale(c(0.0, eps))) + &b_drive.scale(c(0.0, eps));
    let h0 = &(&(&a_drive.scale(theta * eps) + &b_drive.scale(theta.conj() * eps))
        + &total_number(&layout).scale(c(0.0, -p.gamma())))
        + &layout.identity().scale(c(0.0, -p.chi()));
    let parity = parity_two_mode(&layout)?;
    let d = check_decomposition_on(&h, &h_pt, &h0, &parity, Some(p.interior()), CERTIFY_TOL)?;
    Ok((h, d))
}

/// Displaced supermodes absorbing the coherent drive.
#[derive(Clone, Debug)]
pub struct DisplacedModes {
    pub eps_c: C64,
    pub eps_d: C64,
    pub c_eps: CMatrix,
    pub c_eps_plus: CMatrix,
    pub d_eps: CMatrix,
    pub d_eps_plus: CMatrix,
}

impl DisplacedModes {
    /// `N_ε = c_ε⁺c_ε + d_ε⁺d_ε`.
    pub fn number(&self) -> CMatrix {
        &(&self.c_eps_plus * &self.c_eps) + &(&self.d_eps_plus * &self.d_eps)
    }
}

/// Complex rotation `[c, d]ᵀ = R [a, b]ᵀ` with
/// `R = [[cos α/2, sin α/2], [−sin α/2, cos α/2]]`.
///
/// Note `c⁺` is built from `a†, b†` with the same (unconjugated) `R`, so
/// `c⁺ ≠ c†` unless `κ = 0`.
#[derive(Clone, Debug)]
pub struct SupermodeMap {
    pub r: CMatrix,
    pub lambda: C64,
    pub alpha_half_sin: C64,
    pub alpha_half_cos: C64,
    pub c: CMatrix,
    pub c_plus: CMatrix,
    pub d: CMatrix,
    pub d_plus: CMatrix,
    pub displaced: Option<DisplacedModes>,
}

impl SupermodeMap {
    pub fn nc(&self) -> CMatrix {
        &self.c_plus * &self.c
    }

    pub fn nd(&self) -> CMatrix {
        &self.d_plus * &self.d
    }
}

/// `cos(α/2) = √((λ − iκ)/2λ)` on the principal branch, and
/// `sin(α/2) = g/(2λ cos(α/2))`. The latter equals the principal
/// `√((λ + iκ)/2λ)` for `|κ| < g` and keeps `2 sin cos = g/λ` past the EP,
/// where independent principal roots would flip its sign.
fn half_angles(g: f64, kappa: f64, lambda: C64) -> (C64, C64) {
    let cos = ((lambda - c(0.0, kappa)) / (lambda * 2.0)).sqrt();
    let sin = c(g, 0.0) / (lambda * cos * 2.0);
    (sin, cos)
}

fn rotation(g: f64, kappa: f64, n_max: usize) -> Result<SupermodeMap> {
    let lambda = principal_lambda(g, kappa);
    if lambda.norm() <= f64::EPSILON * g {
        return Err(Error::SingularSupermodes);
    }
    let (sin, cos) = half_angles(g, kappa, lambda);
    let layout = SpaceLayout::two_modes(n_max)?;
    let l = Ladders::new(&layout)?;
    let mix = |x: &CMatrix, y: &CMatrix, p: C64, q: C64| &x.scale(p) + &y.scale(q);
    Ok(SupermodeMap {
        r: CMatrix::from_rows(&[vec![cos, sin], vec![-sin, cos]]),
        lambda,
        alpha_half_sin: sin,
        alpha_half_cos: cos,
        c: mix(&l.a, &l.b, cos, sin),
        c_plus: mix(&l.ad, &l.bd, cos, sin),
        d: mix(&l.a, &l.b, -sin, cos),
        d_plus: mix(&l.ad, &l.bd, -sin, cos),
        displaced: None,
    })
}

pub fn supermodes(p: &H2Params) -> Result<SupermodeMap> {
    rotation(p.g, p.kappa(), p.n_max)
}

/// Supermodes plus the displaced set `c_ε = ic + ε_c/λ`,
/// `c_ε⁺ = −ic⁺ + ε_c/λ`, `d_ε = id − ε_d/λ`, `d_ε⁺ = −id⁺ − ε_d/λ`, with
/// `ε_c = ε(cos + sin)` and `ε_d = ε(cos − sin)` of `α/2`.
pub fn driven_supermodes(p: &H3Params) -> Result<SupermodeMap> {
    let mut map = rotation(p.g, p.kappa(), p.n_max)?;
    let (sin, cos, lambda) = (map.alpha_half_sin, map.alpha_half_cos, map.lambda);
    let eps_c = (cos + sin) * p.epsilon;
    let eps_d = (cos - sin) * p.epsilon;
    let id = p.layout().identity();
    let shift_c = id.scale(eps_c / lambda);
    let shift_d = id.scale(eps_d / lambda);
    map.displaced = Some(DisplacedModes {
        eps_c,
        eps_d,
        c_eps: &map.c.scale(I) + &shift_c,
        c_eps_plus: &map.c_plus.scale(-I) + &shift_c,
        d_eps: &map.d.scale(I) - &shift_d,
        d_eps_plus: &map.d_plus.scale(-I) - &shift_d,
    });
    Ok(map)
}

fn check_occupations(n_c: usize, n_d: usize, n_max: usize) -> Result<()> {
    if n_c + n_d > n_max {
        return Err(Error::Parameter(format!(
            "occupations ({n_c}, {n_d}) exceed cutoff {n_max}"
        )));
    }
    Ok(())
}

/// `(E_IF, E_EF)` of the supermode Fock state `|n_c, n_d⟩`.
pub fn analytic_eigs_h2(p: &H2Params, n_c: usize, n_d: usize) -> Result<(C64, C64)> {
    check_occupations(n_c, n_d, p.n_max)?;
    let lambda = p.lambda();
    let gamma = c(0.0, p.gamma());
    let (nc, nd) = (n_c as f64, n_d as f64);
    let e_if = (lambda - gamma) * nc - (lambda + gamma) * nd;
    let e_ef = lambda * (nc - nd);
    Ok((e_if, e_ef))
}

/// Same as [`analytic_eigs_h2`] shifted by `λ₀`.
pub fn analytic_eigs_h3(p: &H3Params, n_c: usize, n_d: usize) -> Result<(C64, C64)> {
    let (e_if, e_ef) = analytic_eigs_h2(&p.undriven(), n_c, n_d)?;
    let l0 = c(p.lambda0(), 0.0);
    Ok((e_if + l0, e_ef + l0))
}

/// Fits `β` so that `H − βG` is as PT-symmetric as possible.
///
/// `asym(X) = P·conj(X)·P − X` is only real-linear, so the problem is a real
/// least-squares fit in `(Re β, Im β)` against `asym(G)` and `asym(iG)`.
/// When only one direction is informative (e.g. `G` itself PT-symmetric, so
/// only `Im β` is seen) the minimum-norm solution is returned.
///
/// Returns `(β, ‖asym(H − βG)‖_F / ‖H − βG‖_F)`.
pub fn fit_scalar_generator(h: &CMatrix, g: &CMatrix, p: &ParityOperator) -> Result<(C64, f64)> {
    crate::algebra::ensure_same_square("fit_scalar_generator", &[h, g, p.matrix()])?;
    let target = p.asymmetry(h);
    let a1 = p.asymmetry(g);
    let a2 = p.asymmetry(&g.scale(I));
    let re_dot = |x: &CMatrix, y: &CMatrix| -> f64 {
        x.as_array()
            .iter()
            .zip(y.as_array().iter())
            .map(|(u, v)| (u.conj() * v).re)
            .sum()
    };
    let (g11, g12, g22) = (re_dot(&a1, &a1), re_dot(&a1, &a2), re_dot(&a2, &a2));
    let (r1, r2) = (re_dot(&a1, &target), re_dot(&a2, &target));
    let trace = g11 + g22;
    if !(trace > f64::EPSILON * f64::EPSILON * h.frobenius_norm().powi(2).max(1.0)) {
        return Err(Error::Unidentifiable);
    }

    // Eigen-decomposition of the symmetric 2x2 Gram matrix for a pseudo-inverse.
    let mean = trace / 2.0;
    let spread = (((g11 - g22) / 2.0).powi(2) + g12 * g12).sqrt();
    let (mu1, mu2) = (mean + spread, mean - spread);
    let u1 = if g12.abs() > 0.0 || g11 >= g22 {
        let (x, y) = if g12.abs() > 0.0 {
            (g12, mu1 - g11)
        } else {
            (1.0, 0.0)
        };
        let n = x.hypot(y);
        (x / n, y / n)
    } else {
        (0.0, 1.0)
    };
    let u2 = (-u1.1, u1.0);
    let mut beta = (0.0, 0.0);
    for (mu, u) in [(mu1, u1), (mu2, u2)] {
        if mu > 1e-12 * mu1 {
            let k = (u.0 * r1 + u.1 * r2) / mu;
            beta.0 += k * u.0;
            beta.1 += k * u.1;
        }
    }
    let beta = c(beta.0, beta.1);
    let rest = h - &g.scale(beta);
    let num = p.asymmetry(&rest).frobenius_norm();
    let residual = if num == 0.0 {
        0.0
    } else {
        num / rest.frobenius_norm().max(f64::MIN_POSITIVE)
    };
    Ok((beta, residual))
}

/// Any of the three models, addressable by parameter name for sweeps.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Model {
    H1(H1Params),
    H2(H2Params),
    H3(H3Params),
}

impl Model {
    pub fn name(&self) -> &'static str {
        match self {
            Model::H1(_) => "h1",
            Model::H2(_) => "h2",
            Model::H3(_) => "h3",
        }
    }

    pub fn build(&self) -> Result<Decomposition> {
        Ok(match self {
            Model::H1(p) => build_h1(p)?.1,
            Model::H2(p) => build_h2(p)?.1,
            Model::H3(p) => build_h3(p)?.1,
        })
    }

    pub fn parity(&self) -> Result<ParityOperator> {
        match self {
            Model::H1(_) => Ok(parity_qubit()),
            Model::H2(p) => parity_two_mode(&p.layout()),
            Model::H3(p) => parity_two_mode(&p.layout()),
        }
    }

    pub fn parameter_names(&self) -> &'static [&'static str] {
        match self {
            Model::H1(_) => &["omega", "gamma_e"],
            Model::H2(_) => &["g", "gamma_a", "gamma_b", "kappa", "gamma"],
            Model::H3(_) => &["g", "gamma_a", "gamma_b", "kappa", "gamma", "epsilon"],
        }
    }

    fn unknown(&self, name: &str) -> Error {
        Error::Parameter(format!(
            "model {} has no parameter '{name}' (expected one of {:?})",
            self.name(),
            self.parameter_names()
        ))
    }

    pub fn parameter(&self, name: &str) -> Result<f64> {
        let (g, ga, gb, kappa, gamma) = match self {
            Model::H1(p) => {
                return match name {
                    "omega" => Ok(p.omega),
                    "gamma_e" => Ok(p.gamma_e),
                    _ => Err(self.unknown(name)),
                }
            }
            Model::H2(p) => (p.g, p.gamma_a, p.gamma_b, p.kappa(), p.gamma()),
            Model::H3(p) => {
                if name == "epsilon" {
                    return Ok(p.epsilon);
                }
                (p.g, p.gamma_a, p.gamma_b, p.kappa(), p.gamma())
            }
        };
        match name {
            "g" => Ok(g),
            "gamma_a" => Ok(ga),
            "gamma_b" => Ok(gb),
            "kappa" => Ok(kappa),
            "gamma" => Ok(gamma),
            _ => Err(self.unknown(name)),
        }
    }

    /// Copy with one parameter replaced. `kappa` keeps `gamma` fixed and
    /// vice versa.
    pub fn with_parameter(&self, name: &str, value: f64) -> Result<Model> {
        if !self.parameter_names().contains(&name) {
            return Err(self.unknown(name));
        }
        match *self {
            Model::H1(p) => Ok(Model::H1(match name {
                "omega" => H1Params::new(value, p.gamma_e)?,
                _ => H1Params::new(p.omega, value)?,
            })),
            Model::H2(p) => {
                let (g, ga, gb) = rates(name, value, p.g, p.gamma_a, p.gamma_b);
                Ok(Model::H2(H2Params::new(g, ga, gb, p.n_max)?))
            }
            Model::H3(p) => {
                if name == "epsilon" {
                    return Ok(Model::H3(H3Params::new(
                        p.g, p.gamma_a, p.gamma_b, value, p.n_max,
                    )?));
                }
                let (g, ga, gb) = rates(name, value, p.g, p.gamma_a, p.gamma_b);
                Ok(Model::H3(H3Params::new(g, ga, gb, p.epsilon, p.n_max)?))
            }
        }
    }

    /// Supermode labels whose branches figures follow; empty for `H1`,
    /// whose two eigenvalues are both tracked.
    pub fn tracked_states(&self) -> &'static [(usize, usize)] {
        match self {
            Model::H1(_) => &[],
            _ => &TRACKED_STATES,
        }
    }

    /// Closed-form `(E_IF, E_EF)` for a supermode label (bosonic models) or
    /// for branch `n_c ∈ {0, 1}` of `H1` (`n_d` ignored).
    pub fn analytic(&self, n_c: usize, n_d: usize) -> Result<(C64, C64)> {
        match self {
            Model::H1(p) => {
                let root = c(p.omega.powi(2) - p.gamma_e.powi(2) / 4.0, 0.0).sqrt();
                let e_ef = if n_c == 0 { root } else { -root };
                Ok((e_ef + c(0.0, -p.gamma_e / 2.0), e_ef))
            }
            Model::H2(p) => analytic_eigs_h2(p, n_c, n_d),
            Model::H3(p) => analytic_eigs_h3(p, n_c, n_d),
        }
    }

    /// Geometric-part operator whose eigenvalues label IF coalescence groups:
    /// `N` for `H2`, `N_ε` for `H3`, `I` for `H1`.
    pub fn geometric_number(&self) -> Result<CMatrix> {
        match self {
            Model::H1(_) => Ok(CMatrix::identity(2)),
            Model::H2(p) => Ok(total_number(&p.layout())),
            Model::H3(p) => Ok(driven_supermodes(p)?
                .displaced
                .expect("driven map carries displaced modes")
                .number()),
        }
    }
}

fn rates(name: &str, value: f64, g: f64, ga: f64, gb: f64) -> (f64, f64, f64) {
    let (kappa, gamma) = ((ga - gb) / 2.0, (ga + gb) / 2.0);
    match name {
        "g" => (value, ga, gb),
        "gamma_a" => (g, value, gb),
        "gamma_b" => (g, ga, value),
        "kappa" => (g, gamma + value, gamma - value),
        _ => (g, value + kappa, value - kappa),
    }
}
