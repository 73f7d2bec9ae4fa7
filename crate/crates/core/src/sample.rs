//! Random instances for property tests, calibration runs and demos.

use std::sync::Arc;

use rand::seq::SliceRandom;
use rand::Rng;
use rand_distr::{Distribution, Exp1, StandardNormal};

use crate::coding::ClassicalChannel;
use crate::cpmaps::ChannelMap;
use crate::error::{Error, Result};
use crate::frobenius::FrobeniusAlgebra;
use crate::groups::{fourier_matrix, GradedAlgebra, Subgroup};
use crate::linalg::{tensor, DenseMatrix, C64};

/// Entries with independent standard normal real and imaginary parts.
pub fn gaussian_matrix<R: Rng + ?Sized>(rows: usize, cols: usize, rng: &mut R) -> DenseMatrix {
    DenseMatrix::from_fn(rows, cols, |_, _| {
        C64::new(StandardNormal.sample(rng), StandardNormal.sample(rng))
    })
}

/// Haar-ish unitary from Gram–Schmidt on a Gaussian matrix.
pub fn random_unitary<R: Rng + ?Sized>(n: usize, rng: &mut R) -> DenseMatrix {
    let g = gaussian_matrix(n, n, rng);
    let mut cols: Vec<Vec<C64>> = Vec::with_capacity(n);
    for c in 0..n {
        let mut v = g.col(c);
        for q in &cols {
            let overlap: C64 = q.iter().zip(&v).map(|(a, b)| a.conj() * b).sum();
            v.iter_mut().zip(q).for_each(|(x, a)| *x -= overlap * a);
        }
        let norm = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        v.iter_mut().for_each(|x| *x /= norm);
        cols.push(v);
    }
    DenseMatrix::from_fn(n, n, |r, c| cols[c][r])
}

/// Uniform on the probability simplex.
pub fn random_distribution<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Vec<f64> {
    let w: Vec<f64> = (0..n).map(|_| Exp1.sample(rng)).collect();
    let s: f64 = w.iter().sum();
    w.into_iter().map(|x| x / s).collect()
}

/// A weakly symmetric channel with `|Y| = outputs` and `|X|` a multiple of it:
/// cyclic shifts of one distribution, then random relabelling of inputs and outputs.
pub fn random_weakly_symmetric<R: Rng + ?Sized>(
    outputs: usize,
    repeats: usize,
    rng: &mut R,
) -> Result<ClassicalChannel> {
    if outputs == 0 || repeats == 0 {
        return Err(Error::ZeroDimension);
    }
    let base = random_distribution(outputs, rng);
    let inputs = outputs * repeats;
    let mut yperm: Vec<usize> = (0..outputs).collect();
    let mut xperm: Vec<usize> = (0..inputs).collect();
    yperm.shuffle(rng);
    xperm.shuffle(rng);
    let mut rows = vec![vec![0.0; inputs]; outputs];
    for x in 0..inputs {
        for y in 0..outputs {
            rows[yperm[y]][xperm[x]] = base[(y + outputs - x % outputs) % outputs];
        }
    }
    ClassicalChannel::from_rows(&rows)
}

/// Index table of `(a, b) ↦ χ_a · conj χ_b` on the listed dual of `l`.
fn dual_quotients(l: &Subgroup) -> Vec<usize> {
    let duals = l.dual();
    let n = duals.len();
    let mut table = vec![0; n * n];
    for a in 0..n {
        for b in 0..n {
            let q: Vec<C64> = duals[a].1.iter().zip(&duals[b].1).map(|(x, y)| x * y.conj()).collect();
            table[a * n + b] = duals
                .iter()
                .position(|(_, v)| v.iter().zip(&q).all(|(x, y)| (x - y).norm() < 1e-9))
                .expect("dual group is closed under quotients");
        }
    }
    table
}

/// Covariant endo-channel of an untwisted `A(L,1)` whose factor-basis matrix is
/// `F[a,b] = p(χ_a conj χ_b)` for a distribution `p` on `L*`.
pub fn covariant_channel_from(alg: &GradedAlgebra, p: &[f64]) -> Result<ChannelMap> {
    if !alg.is_untwisted() {
        return Err(Error::TwistedInput);
    }
    let l = alg.subgroup();
    let n = l.order();
    if p.len() != n {
        return Err(Error::DimensionMismatch {
            context: "covariant channel distribution",
            expected: n,
            found: p.len(),
        });
    }
    let quot = dual_quotients(l);
    let f = DenseMatrix::from_fn(n, n, |a, b| C64::new(p[quot[a * n + b]], 0.0));
    let mu = fourier_matrix(l);
    let m = mu.matmul(&f)?.matmul(&mu.dagger())?;
    ChannelMap::new(alg.algebra().clone(), alg.algebra().clone(), m)
}

pub fn random_covariant_channel<R: Rng + ?Sized>(alg: &GradedAlgebra, rng: &mut R) -> Result<ChannelMap> {
    let p = random_distribution(alg.subgroup().order(), rng);
    covariant_channel_from(alg, &p)
}

/// `X ↦ Σ_k s_k K_k X K_k†` on each pair of blocks, written in the algebra bases.
/// All signs positive gives a completely positive map; mixed signs give a
/// Hermitian-preserving map that is usually not.
pub fn random_kraus_map<R: Rng + ?Sized>(
    source: Arc<FrobeniusAlgebra>,
    target: Arc<FrobeniusAlgebra>,
    rank: usize,
    negative_terms: usize,
    rng: &mut R,
) -> Result<ChannelMap> {
    let ps = source.presentation().ok_or(Error::NoPresentation)?;
    let pt = target.presentation().ok_or(Error::NoPresentation)?;
    let mut standard = DenseMatrix::zeros(target.dim(), source.dim());
    let mut row0 = 0;
    for &nt in &pt.blocks {
        let mut col0 = 0;
        for &ns in &ps.blocks {
            let mut block = DenseMatrix::zeros(nt * nt, ns * ns);
            for k in 0..rank + negative_terms {
                let kraus = gaussian_matrix(nt, ns, rng);
                let term = tensor(&kraus, &kraus.conj());
                let sign = if k < rank { 1.0 } else { -1.0 };
                block = &block + &term.scale_re(sign);
            }
            // coordinates of X in block n are √n vec(X)
            let rescale = (nt as f64 / ns as f64).sqrt();
            for r in 0..nt * nt {
                for c in 0..ns * ns {
                    standard[(row0 + r, col0 + c)] = block[(r, c)] * rescale;
                }
            }
            col0 += ns * ns;
        }
        row0 += nt * nt;
    }
    let m = pt.to_standard.dagger().matmul(&standard)?.matmul(&ps.to_standard)?;
    ChannelMap::new(source, target, m)
}

/// Blockwise conjugation `X ↦ U X U†` by independent random unitaries.
pub fn random_unitary_channel<R: Rng + ?Sized>(
    alg: Arc<FrobeniusAlgebra>,
    rng: &mut R,
) -> Result<ChannelMap> {
    let p = alg.presentation().ok_or(Error::NoPresentation)?;
    let mut standard = DenseMatrix::zeros(alg.dim(), alg.dim());
    let mut off = 0;
    for &n in &p.blocks {
        let u = random_unitary(n, rng);
        let block = tensor(&u, &u.conj());
        for r in 0..n * n {
            for c in 0..n * n {
                standard[(off + r, off + c)] = block[(r, c)];
            }
        }
        off += n * n;
    }
    let m = p.to_standard.dagger().matmul(&standard)?.matmul(&p.to_standard)?;
    ChannelMap::new(alg.clone(), alg, m)
}

/// A random element of the algebra with Gaussian coordinates.
pub fn random_element<R: Rng + ?Sized>(dim: usize, rng: &mut R) -> Vec<C64> {
    gaussian_matrix(dim, 1, rng).col(0)
}
