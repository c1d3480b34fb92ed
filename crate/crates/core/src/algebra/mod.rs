//! Dense complex operators on truncated qubit/boson product spaces.
//!
//! Basis ordering is fixed throughout the crate: the last subsystem varies
//! fastest, so for two modes with cutoff `n` the state `|n_a, n_b>` sits at
//! index `n_a * (n + 1) + n_b`. A qubit's local basis is `(e, g)`.

mod eig;
mod expm;
mod linalg;

pub use eig::{eig, EigResult, EIG_TOL};
pub use expm::expm;
pub use linalg::{condition_1, inverse, solve};

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use ndarray::{s, Array1, Array2};
use num_complex::Complex64;

use crate::error::{Error, Result};

pub type C64 = Complex64;
pub type CVector = Array1<C64>;

pub const ZERO: C64 = C64::new(0.0, 0.0);
pub const ONE: C64 = C64::new(1.0, 0.0);
pub const I: C64 = C64::new(0.0, 1.0);

/// Dense complex matrix. Entries are always finite.
#[derive(Clone, PartialEq)]
pub struct CMatrix(Array2<C64>);

impl CMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        CMatrix(Array2::zeros((rows, cols)))
    }

    pub fn identity(n: usize) -> Self {
        CMatrix(Array2::eye(n))
    }

    /// Wraps an array, rejecting NaN or infinite entries.
    pub fn from_array(a: Array2<C64>) -> Result<Self> {
        if a.iter().all(|z| z.re.is_finite() && z.im.is_finite()) {
            Ok(CMatrix(a))
        } else {
            Err(Error::Parameter("matrix has non-finite entries".into()))
        }
    }

    pub fn from_fn(rows: usize, cols: usize, f: impl FnMut((usize, usize)) -> C64) -> Self {
        CMatrix(Array2::from_shape_fn((rows, cols), f))
    }

    pub fn from_real(rows: &[&[f64]]) -> Self {
        let n = rows.len();
        let m = rows.first().map_or(0, |r| r.len());
        Self::from_fn(n, m, |(i, j)| C64::new(rows[i][j], 0.0))
    }

    pub fn from_rows(rows: &[Vec<C64>]) -> Self {
        let n = rows.len();
        let m = rows.first().map_or(0, |r| r.len());
        Self::from_fn(n, m, |(i, j)| rows[i][j])
    }

    pub fn diag(d: &[C64]) -> Self {
        let mut m = Self::zeros(d.len(), d.len());
        for (k, &v) in d.iter().enumerate() {
            m.0[[k, k]] = v;
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.0.nrows()
    }

    pub fn cols(&self) -> usize {
        self.0.ncols()
    }

    pub fn is_square(&self) -> bool {
        self.rows() == self.cols()
    }

    /// Dimension of a square matrix.
    pub fn dim(&self) -> usize {
        debug_assert!(self.is_square());
        self.rows()
    }

    pub fn as_array(&self) -> &Array2<C64> {
        &self.0
    }

    pub fn into_array(self) -> Array2<C64> {
        self.0
    }

    pub fn get(&self, i: usize, j: usize) -> C64 {
        self.0[[i, j]]
    }

    pub fn set(&mut self, i: usize, j: usize, v: C64) {
        self.0[[i, j]] = v;
    }

    pub fn column(&self, j: usize) -> CVector {
        self.0.column(j).to_owned()
    }

    pub fn adjoint(&self) -> Self {
        CMatrix(self.0.t().mapv(|z| z.conj()))
    }

    pub fn conj(&self) -> Self {
        CMatrix(self.0.mapv(|z| z.conj()))
    }

    pub fn transpose(&self) -> Self {
        CMatrix(self.0.t().to_owned())
    }

    pub fn scale(&self, c: C64) -> Self {
        CMatrix(&self.0 * c)
    }

    pub fn dot(&self, other: &CMatrix) -> Self {
        assert_eq!(
            self.cols(),
            other.rows(),
            "matrix product dimension mismatch"
        );
        CMatrix(self.0.dot(&other.0))
    }

    pub fn apply(&self, v: &CVector) -> CVector {
        assert_eq!(self.cols(), v.len(), "matrix-vector dimension mismatch");
        self.0.dot(v)
    }

    pub fn kron(&self, other: &CMatrix) -> Self {
        let (r1, c1) = (self.rows(), self.cols());
        let (r2, c2) = (other.rows(), other.cols());
        let mut out = Array2::zeros((r1 * r2, c1 * c2));
        for i in 0..r1 {
            for j in 0..c1 {
                let a = self.0[[i, j]];
                if a == ZERO {
                    continue;
                }
                let mut block = out.slice_mut(s![i * r2..(i + 1) * r2, j * c2..(j + 1) * c2]);
                block.zip_mut_with(&other.0, |o, &b| *o = a * b);
            }
        }
        CMatrix(out)
    }

    pub fn trace(&self) -> C64 {
        self.0.diag().sum()
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.0.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    /// Maximum absolute column sum.
    pub fn norm_1(&self) -> f64 {
        self.0
            .columns()
            .into_iter()
            .map(|c| c.iter().map(|z| z.norm()).sum::<f64>())
            .fold(0.0, f64::max)
    }

    pub fn max_abs(&self) -> f64 {
        self.0.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    /// Principal submatrix on the given basis indices.
    pub fn restrict(&self, indices: &[usize]) -> Self {
        Self::from_fn(indices.len(), indices.len(), |(i, j)| {
            self.0[[indices[i], indices[j]]]
        })
    }

    pub fn is_finite(&self) -> bool {
        self.0.iter().all(|z| z.re.is_finite() && z.im.is_finite())
    }

    /// `‖self − other‖_F`.
    pub fn distance(&self, other: &CMatrix) -> f64 {
        assert_eq!(self.0.dim(), other.0.dim());
        self.0
            .iter()
            .zip(other.0.iter())
            .map(|(a, b)| (a - b).norm_sqr())
            .sum::<f64>()
            .sqrt()
    }
}

impl fmt::Debug for CMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "CMatrix{:?}", self.0)
    }
}

impl Add for &CMatrix {
    type Output = CMatrix;
    fn add(self, rhs: &CMatrix) -> CMatrix {
        CMatrix(&self.0 + &rhs.0)
    }
}

impl Sub for &CMatrix {
    type Output = CMatrix;
    fn sub(self, rhs: &CMatrix) -> CMatrix {
        CMatrix(&self.0 - &rhs.0)
    }
}

impl Mul for &CMatrix {
    type Output = CMatrix;
    fn mul(self, rhs: &CMatrix) -> CMatrix {
        self.dot(rhs)
    }
}

impl Mul<C64> for &CMatrix {
    type Output = CMatrix;
    fn mul(self, rhs: C64) -> CMatrix {
        self.scale(rhs)
    }
}

impl Mul<f64> for &CMatrix {
    type Output = CMatrix;
    fn mul(self, rhs: f64) -> CMatrix {
        self.scale(C64::new(rhs, 0.0))
    }
}

impl Neg for &CMatrix {
    type Output = CMatrix;
    fn neg(self) -> CMatrix {
        CMatrix(-&self.0)
    }
}

/// `AB − BA`.
pub fn commutator(a: &CMatrix, b: &CMatrix) -> Result<CMatrix> {
    if !a.is_square() || !b.is_square() || a.dim() != b.dim() {
        return Err(Error::Dimension(format!(
            "commutator of {}x{} and {}x{}",
            a.rows(),
            a.cols(),
            b.rows(),
            b.cols()
        )));
    }
    Ok(&a.dot(b) - &b.dot(a))
}

/// `v†w`.
pub fn inner(v: &CVector, w: &CVector) -> C64 {
    v.iter().zip(w.iter()).map(|(a, b)| a.conj() * b).sum()
}

pub fn vector_norm(v: &CVector) -> f64 {
    v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

pub fn normalized(v: &CVector) -> CVector {
    let n = vector_norm(v);
    v.mapv(|z| z / n)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Subsystem {
    Qubit,
    /// Bosonic mode keeping occupations `0..=cutoff`.
    Boson {
        cutoff: usize,
    },
}

impl Subsystem {
    pub fn dim(self) -> usize {
        match self {
            Subsystem::Qubit => 2,
            Subsystem::Boson { cutoff } => cutoff + 1,
        }
    }
}

/// Qubit level. Local basis order is `(e, g)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Level {
    E,
    G,
}

impl Level {
    fn index(self) -> usize {
        match self {
            Level::E => 0,
            Level::G => 1,
        }
    }
}

/// Ordered list of subsystems; the last one is fastest-varying.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SpaceLayout {
    subsystems: Vec<Subsystem>,
}

impl SpaceLayout {
    pub fn new(subsystems: Vec<Subsystem>) -> Result<Self> {
        if subsystems.is_empty() {
            return Err(Error::Layout("no subsystems".into()));
        }
        if subsystems
            .iter()
            .any(|s| matches!(s, Subsystem::Boson { cutoff: 0 }))
        {
            return Err(Error::Layout("boson cutoff must be >= 1".into()));
        }
        Ok(SpaceLayout { subsystems })
    }

    pub fn qubit() -> Self {
        SpaceLayout {
            subsystems: vec![Subsystem::Qubit],
        }
    }

    pub fn single_mode(n_max: usize) -> Result<Self> {
        Self::new(vec![Subsystem::Boson { cutoff: n_max }])
    }

    /// Two bosonic modes `a, b` with a uniform cutoff.
    pub fn two_modes(n_max: usize) -> Result<Self> {
        Self::new(vec![
            Subsystem::Boson { cutoff: n_max },
            Subsystem::Boson { cutoff: n_max },
        ])
    }

    pub fn subsystems(&self) -> &[Subsystem] {
        &self.subsystems
    }

    pub fn dim(&self) -> usize {
        self.subsystems.iter().map(|s| s.dim()).product()
    }

    /// Flat basis index of the local level tuple.
    pub fn index(&self, levels: &[usize]) -> usize {
        assert_eq!(levels.len(), self.subsystems.len());
        self.subsystems.iter().zip(levels).fold(0, |acc, (s, &l)| {
            assert!(l < s.dim());
            acc * s.dim() + l
        })
    }

    /// Local level tuple of a flat basis index.
    pub fn levels(&self, mut index: usize) -> Vec<usize> {
        let mut out = vec![0; self.subsystems.len()];
        for (k, s) in self.subsystems.iter().enumerate().rev() {
            out[k] = index % s.dim();
            index /= s.dim();
        }
        out
    }

    /// Sum of bosonic occupations of a basis state.
    pub fn total_occupation(&self, index: usize) -> usize {
        self.levels(index)
            .iter()
            .zip(&self.subsystems)
            .filter(|(_, s)| matches!(s, Subsystem::Boson { .. }))
            .map(|(l, _)| *l)
            .sum()
    }

    /// Basis indices whose total bosonic occupation is at most `max_total`.
    pub fn indices_with_total_at_most(&self, max_total: usize) -> Vec<usize> {
        (0..self.dim())
            .filter(|&i| self.total_occupation(i) <= max_total)
            .collect()
    }

    /// Basis indices whose total bosonic occupation lies in `totals`.
    pub fn indices_with_total_in(&self, totals: &[usize]) -> Vec<usize> {
        (0..self.dim())
            .filter(|&i| totals.contains(&self.total_occupation(i)))
            .collect()
    }

    pub fn identity(&self) -> CMatrix {
        CMatrix::identity(self.dim())
    }

    /// Embeds a local operator on subsystem `site` as `I ⊗ … ⊗ op ⊗ … ⊗ I`.
    pub fn embed(&self, site: usize, local: &CMatrix) -> CMatrix {
        let d = self.subsystems[site].dim();
        assert_eq!(local.rows(), d);
        assert_eq!(local.cols(), d);
        let left: usize = self.subsystems[..site].iter().map(|s| s.dim()).product();
        let right: usize = self.subsystems[site + 1..]
            .iter()
            .map(|s| s.dim())
            .product();
        CMatrix::identity(left)
            .kron(local)
            .kron(&CMatrix::identity(right))
    }

    fn boson_cutoff(&self, mode: usize) -> Result<usize> {
        match self.subsystems.get(mode) {
            Some(Subsystem::Boson { cutoff }) => Ok(*cutoff),
            _ => Err(Error::NotBosonic(mode)),
        }
    }
}

/// Truncated single-mode ladder matrix with `<n-1|a|n> = √n`.
fn local_annihilation(cutoff: usize) -> CMatrix {
    let d = cutoff + 1;
    CMatrix::from_fn(d, d, |(i, j)| {
        if j == i + 1 {
            C64::new((j as f64).sqrt(), 0.0)
        } else {
            ZERO
        }
    })
}

pub fn annihilation(layout: &SpaceLayout, mode: usize) -> Result<CMatrix> {
    let cutoff = layout.boson_cutoff(mode)?;
    Ok(layout.embed(mode, &local_annihilation(cutoff)))
}

pub fn creation(layout: &SpaceLayout, mode: usize) -> Result<CMatrix> {
    Ok(annihilation(layout, mode)?.adjoint())
}

/// `a†a` on one mode.
pub fn number(layout: &SpaceLayout, mode: usize) -> Result<CMatrix> {
    let cutoff = layout.boson_cutoff(mode)?;
    let local = CMatrix::diag(
        &(0..=cutoff)
            .map(|n| C64::new(n as f64, 0.0))
            .collect::<Vec<_>>(),
    );
    Ok(layout.embed(mode, &local))
}

/// Total occupation over all bosonic modes.
pub fn total_number(layout: &SpaceLayout) -> CMatrix {
    let d: Vec<C64> = (0..layout.dim())
        .map(|i| C64::new(layout.total_occupation(i) as f64, 0.0))
        .collect();
    CMatrix::diag(&d)
}

/// Embedded `|bra><ket|` on a qubit site.
pub fn qubit_op(layout: &SpaceLayout, site: usize, bra: Level, ket: Level) -> Result<CMatrix> {
    match layout.subsystems().get(site) {
        Some(Subsystem::Qubit) => {
            let mut local = CMatrix::zeros(2, 2);
            local.set(bra.index(), ket.index(), ONE);
            Ok(layout.embed(site, &local))
        }
        _ => Err(Error::NotQubit(site)),
    }
}

pub(crate) fn ensure_same_square(what: &str, mats: &[&CMatrix]) -> Result<usize> {
    let n = mats[0].rows();
    for m in mats {
        if !m.is_square() || m.rows() != n {
            return Err(Error::Dimension(format!(
                "{what}: expected {n}x{n}, got {}x{}",
                m.rows(),
                m.cols()
            )));
        }
    }
    Ok(n)
}
