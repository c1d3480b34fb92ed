use ndarray::Array2;

use super::{CMatrix, C64};
use crate::error::{Error, Result};

/// LU factorization with partial pivoting, stored packed.
struct Lu {
    lu: Array2<C64>,
    perm: Vec<usize>,
}

impl Lu {
    fn new(a: &CMatrix) -> Result<Self> {
        if !a.is_square() {
            return Err(Error::Dimension("LU of a non-square matrix".into()));
        }
        let n = a.rows();
        let mut lu = a.as_array().clone();
        let mut perm: Vec<usize> = (0..n).collect();
        let scale = a.max_abs();
        for k in 0..n {
            let (p, pmax) = (k..n)
                .map(|i| (i, lu[[i, k]].norm()))
                .fold(
                    (k, -1.0),
                    |best, cur| if cur.1 > best.1 { cur } else { best },
                );
            if pmax <= f64::EPSILON * scale * n as f64 || pmax == 0.0 {
                return Err(Error::IllConditioned {
                    condition: f64::INFINITY,
                    context: format!("singular pivot in column {k}"),
                });
            }
            if p != k {
                for j in 0..n {
                    lu.swap([k, j], [p, j]);
                }
                perm.swap(k, p);
            }
            let pivot = lu[[k, k]];
            for i in k + 1..n {
                let f = lu[[i, k]] / pivot;
                lu[[i, k]] = f;
                if f != C64::new(0.0, 0.0) {
                    for j in k + 1..n {
                        let u = lu[[k, j]];
                        lu[[i, j]] -= f * u;
                    }
                }
            }
        }
        Ok(Lu { lu, perm })
    }

    fn solve_in_place(&self, b: &mut Array2<C64>) {
        let n = self.lu.nrows();
        let permuted = Array2::from_shape_fn(b.dim(), |(i, j)| b[[self.perm[i], j]]);
        *b = permuted;
        for c in 0..b.ncols() {
            for i in 0..n {
                let mut acc = b[[i, c]];
                for k in 0..i {
                    acc -= self.lu[[i, k]] * b[[k, c]];
                }
                b[[i, c]] = acc;
            }
            for i in (0..n).rev() {
                let mut acc = b[[i, c]];
                for k in i + 1..n {
                    acc -= self.lu[[i, k]] * b[[k, c]];
                }
                b[[i, c]] = acc / self.lu[[i, i]];
            }
        }
    }
}

/// Solves `A X = B`.
pub fn solve(a: &CMatrix, b: &CMatrix) -> Result<CMatrix> {
    if b.rows() != a.rows() {
        return Err(Error::Dimension("solve: right-hand side rows".into()));
    }
    let lu = Lu::new(a)?;
    let mut x = b.as_array().clone();
    lu.solve_in_place(&mut x);
    CMatrix::from_array(x)
}

pub fn inverse(a: &CMatrix) -> Result<CMatrix> {
    solve(a, &CMatrix::identity(a.rows()))
}

/// 1-norm condition number `‖A‖₁‖A⁻¹‖₁`; infinite when `A` is singular.
pub fn condition_1(a: &CMatrix) -> f64 {
    match inverse(a) {
        Ok(inv) => a.norm_1() * inv.norm_1(),
        Err(_) => f64::INFINITY,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn inverse_of_complex_matrix() {
        let a = CMatrix::from_rows(&[
            vec![C64::new(0.0, 0.0), C64::new(2.0, 1.0), C64::new(1.0, 0.0)],
            vec![C64::new(1.0, -1.0), C64::new(0.5, 0.0), C64::new(0.0, 3.0)],
            vec![C64::new(2.0, 0.0), C64::new(0.0, 0.0), C64::new(1.0, 1.0)],
        ]);
        let inv = inverse(&a).unwrap();
        assert!((&a * &inv).distance(&CMatrix::identity(3)) < 1e-14);
        assert!(condition_1(&a) < 100.0);
    }

    #[test]
    fn singular_matrix_detected() {
        let a = CMatrix::from_real(&[&[1.0, 2.0], &[2.0, 4.0]]);
        assert!(inverse(&a).is_err());
        assert!(condition_1(&a).is_infinite());
    }
}
