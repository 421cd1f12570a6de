#![allow(dead_code)]

use losmimo::{Complex64, ComplexMatrix};

/// log2 det(I + r·A·A†) via a Cholesky factorization written from scratch.
#[allow(clippy::needless_range_loop)]
pub fn oracle_capacity(a: &ComplexMatrix, rho: f64) -> f64 {
    let n = a.dim();
    let r = rho / n as f64;
    let mut m = vec![vec![Complex64::new(0.0, 0.0); n]; n];
    for i in 0..n {
        for j in 0..n {
            let mut acc = Complex64::new(0.0, 0.0);
            for k in 0..n {
                acc += a[(i, k)] * a[(j, k)].conj();
            }
            m[i][j] = acc * r;
        }
        m[i][i] += 1.0;
    }
    let mut l = vec![vec![Complex64::new(0.0, 0.0); n]; n];
    let mut log2det = 0.0;
    for j in 0..n {
        let mut d = m[j][j].re;
        for k in 0..j {
            d -= l[j][k].norm_sqr();
        }
        let ljj = d.sqrt();
        l[j][j] = Complex64::new(ljj, 0.0);
        log2det += 2.0 * ljj.log2();
        for i in j + 1..n {
            let mut s = m[i][j];
            for k in 0..j {
                s -= l[i][k] * l[j][k].conj();
            }
            l[i][j] = s / ljj;
        }
    }
    log2det
}

pub fn rel_close(a: f64, b: f64, tol: f64) -> bool {
    (a - b).abs() <= tol * a.abs().max(b.abs()).max(f64::MIN_POSITIVE)
}

pub fn cis(theta: f64) -> Complex64 {
    Complex64::from_polar(1.0, theta)
}
