//! Cyclic Jacobi eigensolver for dense Hermitian matrices.
//!
//! Sweeps visit the pairs `(p, q)`, `p < q`, in row-major order, so the result is
//! a deterministic function of the input.

use crate::error::{Error, Result};
use crate::linalg::{DenseMatrix, C64, ZERO};

const MAX_SWEEPS: usize = 100;

/// Eigenvalues (ascending) and the unitary whose columns are the eigenvectors.
#[derive(Debug, Clone)]
pub struct HermitianEigen {
    pub values: Vec<f64>,
    pub vectors: DenseMatrix,
}

pub fn hermitian_eigenvalues(a: &DenseMatrix) -> Result<Vec<f64>> {
    jacobi(a, false).map(|e| e.values)
}

pub fn hermitian_eigen(a: &DenseMatrix) -> Result<HermitianEigen> {
    jacobi(a, true)
}

fn off_diagonal_sq(a: &[C64], n: usize) -> f64 {
    let mut s = 0.0;
    for p in 0..n {
        for q in (p + 1)..n {
            s += a[p * n + q].norm_sqr();
        }
    }
    2.0 * s
}

fn jacobi(input: &DenseMatrix, want_vectors: bool) -> Result<HermitianEigen> {
    if !input.is_square() {
        return Err(Error::NotSquare(input.rows(), input.cols()));
    }
    let n = input.rows();
    // Work on the Hermitian part so round-off asymmetry cannot stall the sweep.
    let mut a: Vec<C64> = vec![ZERO; n * n];
    for i in 0..n {
        for j in 0..n {
            a[i * n + j] = (input[(i, j)] + input[(j, i)].conj()) * 0.5;
        }
    }
    let mut v = if want_vectors {
        DenseMatrix::identity(n).entries().to_vec()
    } else {
        Vec::new()
    };

    let total: f64 = a.iter().map(|z| z.norm_sqr()).sum();
    let threshold = (f64::EPSILON * f64::EPSILON) * total.max(f64::MIN_POSITIVE);

    for _ in 0..MAX_SWEEPS {
        if off_diagonal_sq(&a, n) <= threshold {
            break;
        }
        for p in 0..n {
            for q in (p + 1)..n {
                let apq = a[p * n + q];
                let r = apq.norm();
                if r == 0.0 {
                    continue;
                }
                let app = a[p * n + p].re;
                let aqq = a[q * n + q].re;
                if r <= f64::EPSILON * 1e-3 * (app.abs() + aqq.abs()) {
                    a[p * n + q] = ZERO;
                    a[q * n + p] = ZERO;
                    continue;
                }
                // Phase to make the pivot real, then a real rotation.
                let phase = apq / r;
                let theta = (aqq - app) / (2.0 * r);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let t = if theta == 0.0 { 1.0 } else { t };
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                let e = phase.conj();
                // U = diag(1, e) · [[c, s], [-s, c]]
                let u_pp = C64::new(c, 0.0);
                let u_pq = C64::new(s, 0.0);
                let u_qp = e * (-s);
                let u_qq = e * c;

                // A <- A U (columns p, q)
                for k in 0..n {
                    let akp = a[k * n + p];
                    let akq = a[k * n + q];
                    a[k * n + p] = akp * u_pp + akq * u_qp;
                    a[k * n + q] = akp * u_pq + akq * u_qq;
                }
                // A <- U† A (rows p, q)
                for k in 0..n {
                    let apk = a[p * n + k];
                    let aqk = a[q * n + k];
                    a[p * n + k] = u_pp.conj() * apk + u_qp.conj() * aqk;
                    a[q * n + k] = u_pq.conj() * apk + u_qq.conj() * aqk;
                }
                a[p * n + q] = ZERO;
                a[q * n + p] = ZERO;
                a[p * n + p] = C64::new(a[p * n + p].re, 0.0);
                a[q * n + q] = C64::new(a[q * n + q].re, 0.0);

                if want_vectors {
                    for k in 0..n {
                        let vkp = v[k * n + p];
                        let vkq = v[k * n + q];
                        v[k * n + p] = vkp * u_pp + vkq * u_qp;
                        v[k * n + q] = vkp * u_pq + vkq * u_qq;
                    }
                }
            }
        }
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| a[i * n + i].re.total_cmp(&a[j * n + j].re));
    let values = order.iter().map(|&i| a[i * n + i].re).collect();
    let vectors = if want_vectors {
        DenseMatrix::from_fn(n, n, |r, c| v[r * n + order[c]])
    } else {
        DenseMatrix::zeros(0, 0)
    };
    Ok(HermitianEigen { values, vectors })
}
