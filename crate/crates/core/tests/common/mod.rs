#![allow(dead_code)]

use entsym::groups::{twisted_group_algebra, Cocycle2, FiniteAbelianGroup, GradedAlgebra, Subgroup};
use entsym::{DenseMatrix, C64};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

pub fn cmat(rows: usize, cols: usize) -> impl Strategy<Value = DenseMatrix> {
    prop::collection::vec((-1.0..1.0f64, -1.0..1.0f64), rows * cols).prop_map(move |v| {
        DenseMatrix::from_vec(rows, cols, v.into_iter().map(|(a, b)| C64::new(a, b)).collect()).unwrap()
    })
}

pub fn cvec(n: usize) -> impl Strategy<Value = Vec<C64>> {
    prop::collection::vec((-1.0..1.0f64, -1.0..1.0f64), n)
        .prop_map(|v| v.into_iter().map(|(a, b)| C64::new(a, b)).collect())
}

pub fn hermitian(n: usize) -> impl Strategy<Value = DenseMatrix> {
    cmat(n, n).prop_map(|m| (&m + &m.dagger()).scale_re(0.5))
}

pub fn untwisted(orders: &[usize]) -> GradedAlgebra {
    let g = FiniteAbelianGroup::new(orders.to_vec()).unwrap();
    twisted_group_algebra(&Subgroup::whole(&g), &Cocycle2::trivial(&g)).unwrap()
}

/// Index-loop Kronecker product.
pub fn kron_oracle(a: &DenseMatrix, b: &DenseMatrix) -> DenseMatrix {
    let (ra, ca) = a.shape();
    let (rb, cb) = b.shape();
    let mut out = DenseMatrix::zeros(ra * rb, ca * cb);
    for i in 0..ra {
        for j in 0..ca {
            for k in 0..rb {
                for l in 0..cb {
                    out[(i * rb + k, j * cb + l)] = a[(i, j)] * b[(k, l)];
                }
            }
        }
    }
    out
}
