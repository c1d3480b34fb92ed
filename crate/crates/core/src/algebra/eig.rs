//! General complex eigensolver: Householder reduction to Hessenberg form,
//! single-shift QR iteration to complex Schur form, then triangular
//! substitution for right and left eigenvectors.
//!
//! Near exceptional points the eigenvector matrix is close to singular. The
//! solver never inverts it; instead each eigenvalue gets the condition number
//! `1 / |w†v|` (unit `w`, `v`) and `condition_estimate` is the largest of them.

use ndarray::Array2;

use super::{CMatrix, C64};
use crate::error::{Error, Result};

/// Relative residual tolerance the solver guarantees away from EPs:
/// `‖Mv − Ev‖₂ ≤ EIG_TOL · ‖M‖`.
pub const EIG_TOL: f64 = 1e-10;

const MAX_SWEEPS_PER_EIGENVALUE: usize = 60;

#[derive(Clone, Debug)]
pub struct EigResult {
    pub eigenvalues: Vec<C64>,
    /// Unit-norm right eigenvectors as columns.
    pub right_vectors: CMatrix,
    /// Unit-norm left eigenvectors as columns: `w†M = E w†`.
    pub left_vectors: CMatrix,
    pub residual_norms: Vec<f64>,
    /// Per-eigenvalue condition numbers `1/|wᵢ†vᵢ|`.
    pub conditions: Vec<f64>,
    pub condition_estimate: f64,
    pub tol: f64,
}

impl EigResult {
    pub fn len(&self) -> usize {
        self.eigenvalues.len()
    }

    pub fn is_empty(&self) -> bool {
        self.eigenvalues.is_empty()
    }

    pub fn right(&self, i: usize) -> super::CVector {
        self.right_vectors.column(i)
    }

    pub fn left(&self, i: usize) -> super::CVector {
        self.left_vectors.column(i)
    }
}

/// Row-major square work matrix.
struct Work {
    n: usize,
    a: Vec<C64>,
}

impl Work {
    fn from(m: &CMatrix) -> Self {
        let n = m.rows();
        Work {
            n,
            a: m.as_array().iter().copied().collect(),
        }
    }

    fn identity(n: usize) -> Self {
        let mut a = vec![C64::new(0.0, 0.0); n * n];
        for k in 0..n {
            a[k * n + k] = C64::new(1.0, 0.0);
        }
        Work { n, a }
    }

    #[inline]
    fn at(&self, i: usize, j: usize) -> C64 {
        self.a[i * self.n + j]
    }

    #[inline]
    fn at_mut(&mut self, i: usize, j: usize) -> &mut C64 {
        &mut self.a[i * self.n + j]
    }

    fn frobenius(&self) -> f64 {
        self.a.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }
}

fn hessenberg(h: &mut Work, q: &mut Work) {
    let n = h.n;
    if n < 3 {
        return;
    }
    let mut v = vec![C64::new(0.0, 0.0); n];
    for k in 0..n - 2 {
        let xnorm = (k + 1..n)
            .map(|i| h.at(i, k).norm_sqr())
            .sum::<f64>()
            .sqrt();
        if xnorm == 0.0 {
            continue;
        }
        let x0 = h.at(k + 1, k);
        let phase = if x0.norm() == 0.0 {
            C64::new(1.0, 0.0)
        } else {
            x0 / x0.norm()
        };
        let alpha = -phase * xnorm;
        for i in k + 1..n {
            v[i] = h.at(i, k);
        }
        v[k + 1] -= alpha;
        let vnorm = (k + 1..n).map(|i| v[i].norm_sqr()).sum::<f64>().sqrt();
        if vnorm == 0.0 {
            continue;
        }
        for vi in v.iter_mut().take(n).skip(k + 1) {
            *vi /= vnorm;
        }
        // H <- (I - 2vv†) H
        for j in k..n {
            let mut s = C64::new(0.0, 0.0);
            for i in k + 1..n {
                s += v[i].conj() * h.at(i, j);
            }
            let s2 = s * 2.0;
            for i in k + 1..n {
                *h.at_mut(i, j) -= v[i] * s2;
            }
        }
        // H <- H (I - 2vv†), Q <- Q (I - 2vv†)
        for m in [&mut *h, &mut *q] {
            for i in 0..n {
                let mut s = C64::new(0.0, 0.0);
                for j in k + 1..n {
                    s += m.at(i, j) * v[j];
                }
                let s2 = s * 2.0;
                for j in k + 1..n {
                    *m.at_mut(i, j) -= s2 * v[j].conj();
                }
            }
        }
        for i in k + 2..n {
            *h.at_mut(i, k) = C64::new(0.0, 0.0);
        }
    }
}

/// Rotation `[[c, s], [-s̄, c]]` mapping `(x, y)` to `(r, 0)`.
#[inline]
fn givens(x: C64, y: C64) -> (f64, C64) {
    let ay = y.norm();
    if ay == 0.0 {
        return (1.0, C64::new(0.0, 0.0));
    }
    let ax = x.norm();
    if ax == 0.0 {
        return (0.0, y.conj() / ay);
    }
    let r = ax.hypot(ay);
    (ax / r, (x / ax) * y.conj() / r)
}

fn wilkinson_shift(a: C64, b: C64, c: C64, d: C64) -> C64 {
    let half = (a - d) * 0.5;
    let disc = (half * half + b * c).sqrt();
    let mid = (a + d) * 0.5;
    let (l1, l2) = (mid + disc, mid - disc);
    if (l1 - d).norm() <= (l2 - d).norm() {
        l1
    } else {
        l2
    }
}

fn schur(h: &mut Work, z: &mut Work) -> Result<()> {
    let n = h.n;
    if n < 2 {
        return Ok(());
    }
    let eps = f64::EPSILON;
    let hnorm = h.frobenius().max(f64::MIN_POSITIVE);
    let budget = MAX_SWEEPS_PER_EIGENVALUE * n;
    let mut total = 0usize;
    let mut its = 0usize;
    let mut hi = n - 1;
    let mut rots: Vec<(f64, C64)> = Vec::with_capacity(n);

    while hi > 0 {
        let mut l = hi;
        while l > 0 {
            let mut s = h.at(l - 1, l - 1).norm() + h.at(l, l).norm();
            if s == 0.0 {
                s = hnorm;
            }
            if h.at(l, l - 1).norm() <= eps * s {
                *h.at_mut(l, l - 1) = C64::new(0.0, 0.0);
                break;
            }
            l -= 1;
        }
        if l == hi {
            hi -= 1;
            its = 0;
            continue;
        }
        its += 1;
        total += 1;
        if total > budget {
            return Err(Error::NonConvergence(format!(
                "{total} QR sweeps exhausted with active window [{l}, {hi}] of {n}; \
                 trailing subdiagonal |h| = {:.3e}",
                h.at(hi, hi - 1).norm()
            )));
        }
        let mu = if its.is_multiple_of(11) {
            // exceptional shift to break cycles
            h.at(hi, hi) + C64::new(0.75 * h.at(hi, hi - 1).norm(), 0.0)
        } else {
            wilkinson_shift(
                h.at(hi - 1, hi - 1),
                h.at(hi - 1, hi),
                h.at(hi, hi - 1),
                h.at(hi, hi),
            )
        };

        for k in l..=hi {
            *h.at_mut(k, k) -= mu;
        }
        rots.clear();
        for k in l..hi {
            let (c, s) = givens(h.at(k, k), h.at(k + 1, k));
            for j in k..n {
                let x = h.at(k, j);
                let y = h.at(k + 1, j);
                *h.at_mut(k, j) = x * c + s * y;
                *h.at_mut(k + 1, j) = -s.conj() * x + y * c;
            }
            *h.at_mut(k + 1, k) = C64::new(0.0, 0.0);
            rots.push((c, s));
        }
        for (idx, k) in (l..hi).enumerate() {
            let (c, s) = rots[idx];
            for i in 0..=k + 1 {
                let x = h.at(i, k);
                let y = h.at(i, k + 1);
                *h.at_mut(i, k) = x * c + s.conj() * y;
                *h.at_mut(i, k + 1) = -s * x + y * c;
            }
            for i in 0..n {
                let x = z.at(i, k);
                let y = z.at(i, k + 1);
                *z.at_mut(i, k) = x * c + s.conj() * y;
                *z.at_mut(i, k + 1) = -s * x + y * c;
            }
        }
        for k in l..=hi {
            *h.at_mut(k, k) += mu;
        }
    }
    Ok(())
}

const RESCALE_AT: f64 = 1e150;

/// `a / b` without forming `|b|²`, which underflows for guarded pivots.
#[inline]
fn div(a: C64, b: C64) -> C64 {
    let s = b.norm();
    (a * (b.conj() / s)) / s
}

fn right_vectors(t: &Work, z: &Work, smin: f64) -> Array2<C64> {
    let n = t.n;
    let mut out = Array2::zeros((n, n));
    let mut y = vec![C64::new(0.0, 0.0); n];
    for k in 0..n {
        let lambda = t.at(k, k);
        y.iter_mut().for_each(|v| *v = C64::new(0.0, 0.0));
        y[k] = C64::new(1.0, 0.0);
        for i in (0..k).rev() {
            let mut acc = C64::new(0.0, 0.0);
            for (j, yj) in y.iter().enumerate().take(k + 1).skip(i + 1) {
                acc += t.at(i, j) * yj;
            }
            let mut den = t.at(i, i) - lambda;
            if den.norm() < smin {
                den = C64::new(smin, 0.0);
            }
            y[i] = -div(acc, den);
            if y[i].norm() > RESCALE_AT {
                let f = 1.0 / y[i].norm();
                y.iter_mut().take(k + 1).for_each(|v| *v *= f);
            }
        }
        let mut norm2 = 0.0;
        for r in 0..n {
            let mut acc = C64::new(0.0, 0.0);
            for (j, yj) in y.iter().enumerate().take(k + 1) {
                acc += z.at(r, j) * yj;
            }
            out[[r, k]] = acc;
            norm2 += acc.norm_sqr();
        }
        let norm = norm2.sqrt();
        out.column_mut(k).mapv_inplace(|v| v / norm);
    }
    out
}

fn left_vectors(t: &Work, z: &Work, smin: f64) -> Array2<C64> {
    let n = t.n;
    let mut out = Array2::zeros((n, n));
    let mut x = vec![C64::new(0.0, 0.0); n];
    for k in 0..n {
        let lambda = t.at(k, k);
        x.iter_mut().for_each(|v| *v = C64::new(0.0, 0.0));
        x[k] = C64::new(1.0, 0.0);
        for j in k + 1..n {
            let mut acc = C64::new(0.0, 0.0);
            for (i, xi) in x.iter().enumerate().take(j).skip(k) {
                acc += xi * t.at(i, j);
            }
            let mut den = t.at(j, j) - lambda;
            if den.norm() < smin {
                den = C64::new(smin, 0.0);
            }
            x[j] = -div(acc, den);
            if x[j].norm() > RESCALE_AT {
                let f = 1.0 / x[j].norm();
                x.iter_mut().skip(k).take(j + 1 - k).for_each(|v| *v *= f);
            }
        }
        // w = Z x̄ so that w†M = λ w†
        let mut norm2 = 0.0;
        for r in 0..n {
            let mut acc = C64::new(0.0, 0.0);
            for (j, xj) in x.iter().enumerate().skip(k) {
                acc += z.at(r, j) * xj.conj();
            }
            out[[r, k]] = acc;
            norm2 += acc.norm_sqr();
        }
        let norm = norm2.sqrt();
        out.column_mut(k).mapv_inplace(|v| v / norm);
    }
    out
}

/// All eigenvalues with unit-norm right and left eigenvectors.
pub fn eig(m: &CMatrix) -> Result<EigResult> {
    if !m.is_square() {
        return Err(Error::Dimension(format!(
            "eig of a {}x{} matrix",
            m.rows(),
            m.cols()
        )));
    }
    if !m.is_finite() {
        return Err(Error::Parameter("eig input has non-finite entries".into()));
    }
    let n = m.rows();
    let mut t = Work::from(m);
    let mut z = Work::identity(n);
    hessenberg(&mut t, &mut z);
    schur(&mut t, &mut z)?;

    let tnorm = t.frobenius();
    let smin = (f64::EPSILON * tnorm).max(f64::MIN_POSITIVE * 1e10);
    let right = right_vectors(&t, &z, smin);
    let left = left_vectors(&t, &z, smin);
    let eigenvalues: Vec<C64> = (0..n).map(|k| t.at(k, k)).collect();

    let a = m.as_array();
    let residual_norms: Vec<f64> = (0..n)
        .map(|k| {
            let v = right.column(k);
            let mv = a.dot(&v);
            mv.iter()
                .zip(v.iter())
                .map(|(x, y)| (x - eigenvalues[k] * y).norm_sqr())
                .sum::<f64>()
                .sqrt()
        })
        .collect();
    let conditions: Vec<f64> = (0..n)
        .map(|k| {
            let s: C64 = left
                .column(k)
                .iter()
                .zip(right.column(k).iter())
                .map(|(w, v)| w.conj() * v)
                .sum();
            if s.norm() == 0.0 {
                f64::INFINITY
            } else {
                1.0 / s.norm()
            }
        })
        .collect();
    let condition_estimate = conditions.iter().copied().fold(1.0, f64::max);

    Ok(EigResult {
        eigenvalues,
        right_vectors: CMatrix::from_array(right)?,
        left_vectors: CMatrix::from_array(left)?,
        residual_norms,
        conditions,
        condition_estimate,
        tol: EIG_TOL,
    })
}
