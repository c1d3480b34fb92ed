//! Matrix exponential by scaling and squaring with a [13/13] Padé approximant.

use super::{solve, CMatrix, C64};
use crate::error::{Error, Result};

const PADE13: [f64; 14] = [
    64764752532480000.0,
    32382376266240000.0,
    7771770303897600.0,
    1187353796428800.0,
    129060195264000.0,
    10559470521600.0,
    670442572800.0,
    33522128640.0,
    1323241920.0,
    40840800.0,
    960960.0,
    16380.0,
    182.0,
    1.0,
];

// 1-norm bound below which [13/13] Padé reaches unit roundoff.
const THETA13: f64 = 5.371920351148152;

fn lin(terms: &[(f64, &CMatrix)], n: usize) -> CMatrix {
    let mut out = CMatrix::zeros(n, n);
    for (c, m) in terms {
        out = &out + &m.scale(C64::new(*c, 0.0));
    }
    out
}

pub fn expm(m: &CMatrix) -> Result<CMatrix> {
    if !m.is_square() {
        return Err(Error::Dimension(format!(
            "expm of a {}x{} matrix",
            m.rows(),
            m.cols()
        )));
    }
    let n = m.rows();
    let norm = m.norm_1();
    if norm == 0.0 {
        return Ok(CMatrix::identity(n));
    }
    let s = if norm > THETA13 {
        (norm / THETA13).log2().ceil().max(0.0) as i32
    } else {
        0
    };
    let a = m.scale(C64::new(0.5f64.powi(s), 0.0));
    let id = CMatrix::identity(n);
    let a2 = &a * &a;
    let a4 = &a2 * &a2;
    let a6 = &a4 * &a2;
    let b = &PADE13;

    let u_inner = &a6 * &lin(&[(b[13], &a6), (b[11], &a4), (b[9], &a2)], n);
    let u_outer = lin(
        &[
            (1.0, &u_inner),
            (b[7], &a6),
            (b[5], &a4),
            (b[3], &a2),
            (b[1], &id),
        ],
        n,
    );
    let u = &a * &u_outer;
    let v_inner = &a6 * &lin(&[(b[12], &a6), (b[10], &a4), (b[8], &a2)], n);
    let v = lin(
        &[
            (1.0, &v_inner),
            (b[6], &a6),
            (b[4], &a4),
            (b[2], &a2),
            (b[0], &id),
        ],
        n,
    );

    let mut r = solve(&(&v - &u), &(&v + &u))?;
    for _ in 0..s {
        r = &r * &r;
    }
    if !r.is_finite() {
        return Err(Error::Parameter("matrix exponential overflowed".into()));
    }
    Ok(r)
}
