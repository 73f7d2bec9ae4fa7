//! Completely positive maps and channels between Frobenius algebras.

use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::eigen::hermitian_eigenvalues;
use crate::error::{Error, Result};
use crate::frobenius::{check_star_cohomomorphism, tensor_product, FrobeniusAlgebra, MorphismReport};
use crate::linalg::{tensor, DenseMatrix, Tolerance, C64, ZERO};

/// Above this carrier dimension of `A ⊗ B`, `is_channel` prefers the Choi test
/// when both algebras carry a presentation.
pub const CP_OPERATOR_MAX_DIM: usize = 256;

/// A linear map between algebra carriers. Verification is always recomputed.
#[derive(Debug, Clone)]
pub struct ChannelMap {
    source: Arc<FrobeniusAlgebra>,
    target: Arc<FrobeniusAlgebra>,
    matrix: DenseMatrix,
}

impl ChannelMap {
    pub fn new(
        source: Arc<FrobeniusAlgebra>,
        target: Arc<FrobeniusAlgebra>,
        matrix: DenseMatrix,
    ) -> Result<Self> {
        if matrix.shape() != (target.dim(), source.dim()) {
            return Err(Error::ShapeMismatch {
                left: (target.dim(), source.dim()),
                right: matrix.shape(),
            });
        }
        Ok(ChannelMap {
            source,
            target,
            matrix,
        })
    }

    pub fn identity(alg: Arc<FrobeniusAlgebra>) -> Self {
        let n = alg.dim();
        ChannelMap {
            source: alg.clone(),
            target: alg,
            matrix: DenseMatrix::identity(n),
        }
    }

    /// `x ↦ ε_A(x) u_B / dim(B)`: forget the input, emit the normalised unit.
    pub fn completely_mixing(source: Arc<FrobeniusAlgebra>, target: Arc<FrobeniusAlgebra>) -> Self {
        let matrix = target
            .unit_matrix()
            .matmul(&source.counit_matrix())
            .expect("column times row")
            .scale_re(1.0 / target.dim() as f64);
        ChannelMap {
            source,
            target,
            matrix,
        }
    }

    pub fn source(&self) -> &Arc<FrobeniusAlgebra> {
        &self.source
    }

    pub fn target(&self) -> &Arc<FrobeniusAlgebra> {
        &self.target
    }

    pub fn matrix(&self) -> &DenseMatrix {
        &self.matrix
    }

    pub fn with_matrix(&self, matrix: DenseMatrix) -> Result<Self> {
        ChannelMap::new(self.source.clone(), self.target.clone(), matrix)
    }

    pub fn verify(&self, tol: &Tolerance) -> Result<ChannelReport> {
        is_channel(self, tol)
    }
}

/// `outer ∘ inner`.
pub fn compose(outer: &ChannelMap, inner: &ChannelMap) -> Result<ChannelMap> {
    if !Arc::ptr_eq(&inner.target, &outer.source) && *inner.target != *outer.source {
        return Err(Error::NotComposable);
    }
    Ok(ChannelMap {
        source: inner.source.clone(),
        target: outer.target.clone(),
        matrix: outer.matrix.matmul(&inner.matrix)?,
    })
}

/// `f ⊗ g` between the tensor-product algebras.
pub fn tensor_maps(f: &ChannelMap, g: &ChannelMap) -> Result<ChannelMap> {
    let source = Arc::new(tensor_product(&f.source, &g.source)?);
    let target = Arc::new(tensor_product(&f.target, &g.target)?);
    ChannelMap::new(source, target, tensor(&f.matrix, &g.matrix))
}

/// The operator whose positivity decides complete positivity.
#[derive(Debug, Clone)]
pub struct CpWitness {
    pub operator: DenseMatrix,
    pub min_eigenvalue: f64,
    pub hermitian_residual: f64,
    /// Spectral radius of the Hermitian part.
    pub scale: f64,
}

impl CpWitness {
    fn from_operator(operator: DenseMatrix) -> Result<Self> {
        let (min, herm, scale) = spectrum_summary(&[&operator])?;
        Ok(CpWitness {
            operator,
            min_eigenvalue: min,
            hermitian_residual: herm,
            scale,
        })
    }

    pub fn is_positive(&self, tol: &Tolerance) -> bool {
        decide(self.min_eigenvalue, self.hermitian_residual, self.scale, tol)
    }
}

fn decide(min: f64, herm: f64, scale: f64, tol: &Tolerance) -> bool {
    herm <= tol.epsilon * scale && min >= -tol.epsilon * scale
}

/// (min eigenvalue, Hermiticity residual, spectral radius) over a direct sum.
fn spectrum_summary(blocks: &[&DenseMatrix]) -> Result<(f64, f64, f64)> {
    let mut min = f64::INFINITY;
    let mut herm = 0.0f64;
    let mut radius = 0.0f64;
    for b in blocks {
        herm = herm.max(b.hermitian_residual());
        let evals = hermitian_eigenvalues(&(*b + &b.dagger()).scale_re(0.5))?;
        for x in evals {
            min = min.min(x);
            radius = radius.max(x.abs());
        }
    }
    if !min.is_finite() {
        min = 0.0;
    }
    Ok((min, herm, radius))
}

/// `Φ(f) = (id_A ⊗ m_B)(id_A ⊗ f ⊗ id_B)(m_A† ⊗ id_B)`, an endomorphism of `A ⊗ B`.
///
/// This leg ordering is the one that agrees with the Choi test; see the
/// calibration tests.
pub fn cp_condition_operator(f: &ChannelMap) -> Result<CpWitness> {
    let a = &f.source;
    let b = &f.target;
    let (na, nb) = (a.dim(), b.dim());
    let n = na * nb;
    let mut op = DenseMatrix::zeros(n, n);
    for i in 0..na {
        for &(p, q, c) in a.coproduct_of_basis(i) {
            // e_p ⊗ f(e_q) ⊗ e_j, multiplied on the right two legs
            for r in 0..nb {
                let w = c * f.matrix[(r, q)];
                if w == ZERO {
                    continue;
                }
                for j in 0..nb {
                    for &(k, d) in b.product_of_basis(r, j) {
                        op[(p * nb + k, i * nb + j)] += w * d;
                    }
                }
            }
        }
    }
    CpWitness::from_operator(op)
}

fn block_offsets(blocks: &[usize]) -> Vec<usize> {
    let mut out = Vec::with_capacity(blocks.len());
    let mut acc = 0;
    for &n in blocks {
        out.push(acc);
        acc += n * n;
    }
    out
}

/// Choi blocks `Σ_ij E_ij ⊗ f̃(E_ij)^{(t)}` for every source block `s` and target
/// block `t`, in `(s, t)` lexicographic order. `f̃` is `f` moved to the standard
/// multimatrix layouts through the algebras' presentations.
pub fn choi_blocks(f: &ChannelMap) -> Result<Vec<DenseMatrix>> {
    let pa = f.source.presentation().ok_or(Error::NoPresentation)?;
    let pb = f.target.presentation().ok_or(Error::NoPresentation)?;
    // Map from standard source coordinates to standard target coordinates.
    let ft = pb
        .to_standard
        .matmul(&f.matrix)?
        .matmul(&pa.to_standard.dagger())?;
    let oa = block_offsets(&pa.blocks);
    let ob = block_offsets(&pb.blocks);
    let mut out = Vec::with_capacity(pa.blocks.len() * pb.blocks.len());
    for (s, &ns) in pa.blocks.iter().enumerate() {
        // E_ij sits at √n_s |ij⟩ in block s.
        let ws = (ns as f64).sqrt();
        for (t, &mt) in pb.blocks.iter().enumerate() {
            let wt = 1.0 / (mt as f64).sqrt();
            let dim = ns * mt;
            let mut m = DenseMatrix::zeros(dim, dim);
            for i in 0..ns {
                for j in 0..ns {
                    let col = oa[s] + i * ns + j;
                    for k in 0..mt {
                        for l in 0..mt {
                            let row = ob[t] + k * mt + l;
                            m[(i * mt + k, j * mt + l)] = ft[(row, col)] * ws * wt;
                        }
                    }
                }
            }
            out.push(m);
        }
    }
    Ok(out)
}

/// The full Choi matrix: the direct sum over source blocks of `Σ_ij E_ij ⊗ f̃(E_ij)`.
pub fn choi_matrix(f: &ChannelMap) -> Result<DenseMatrix> {
    let pa = f.source.presentation().ok_or(Error::NoPresentation)?;
    let pb = f.target.presentation().ok_or(Error::NoPresentation)?;
    let blocks = choi_blocks(f)?;
    let mt: usize = pb.blocks.iter().sum();
    let total: usize = pa.blocks.iter().map(|n| n * mt).sum();
    let mut out = DenseMatrix::zeros(total, total);
    let mut offset = 0;
    let mut idx = 0;
    for &ns in &pa.blocks {
        let mut inner = 0;
        for &m in &pb.blocks {
            let blk = &blocks[idx];
            idx += 1;
            // Within source block s, rows are (i, y) with y running over Σ m_t.
            for i in 0..ns {
                for k in 0..m {
                    for j in 0..ns {
                        for l in 0..m {
                            out[(offset + i * mt + inner + k, offset + j * mt + inner + l)] =
                                blk[(i * m + k, j * m + l)];
                        }
                    }
                }
            }
            inner += m;
        }
        offset += ns * mt;
    }
    Ok(out)
}

/// Spectral summary of the Choi blocks.
pub fn choi_witness(f: &ChannelMap) -> Result<(f64, f64, f64)> {
    let blocks = choi_blocks(f)?;
    let refs: Vec<&DenseMatrix> = blocks.iter().collect();
    spectrum_summary(&refs)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CpMethod {
    FrobeniusOperator,
    Choi,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ChannelReport {
    pub cp: bool,
    pub method: CpMethod,
    pub min_eigenvalue: f64,
    pub scale: f64,
    pub hermitian_residual: f64,
    /// `‖ε_B ∘ f − ε_A‖` in max-abs norm.
    pub counit_residual: f64,
    pub channel: bool,
}

pub fn counit_residual(f: &ChannelMap) -> f64 {
    let eps_b = f.target.counit();
    (0..f.source.dim())
        .map(|j| {
            let v: C64 = eps_b.iter().enumerate().map(|(k, e)| e * f.matrix[(k, j)]).sum();
            (v - f.source.unit()[j].conj()).norm()
        })
        .fold(0.0, f64::max)
}

/// Channel test with an explicit choice of CP criterion.
pub fn is_channel_with(f: &ChannelMap, tol: &Tolerance, method: CpMethod) -> Result<ChannelReport> {
    let (min, herm, scale) = match method {
        CpMethod::FrobeniusOperator => {
            let w = cp_condition_operator(f)?;
            (w.min_eigenvalue, w.hermitian_residual, w.scale)
        }
        CpMethod::Choi => choi_witness(f)?,
    };
    let cp = decide(min, herm, scale, tol);
    let counit_residual = counit_residual(f);
    Ok(ChannelReport {
        cp,
        method,
        min_eigenvalue: min,
        scale,
        hermitian_residual: herm,
        counit_residual,
        channel: cp && tol.accepts(counit_residual),
    })
}

/// CP condition plus counit preservation. Small instances use the Frobenius CP
/// operator; large ones fall back to the Choi blocks when presentations exist.
pub fn is_channel(f: &ChannelMap, tol: &Tolerance) -> Result<ChannelReport> {
    let big = f.source.dim() * f.target.dim() > CP_OPERATOR_MAX_DIM;
    let presented = f.source.presentation().is_some() && f.target.presentation().is_some();
    let method = if big && presented {
        CpMethod::Choi
    } else {
        CpMethod::FrobeniusOperator
    };
    is_channel_with(f, tol, method)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CohomChannelReport {
    pub cohomomorphism: MorphismReport,
    pub precondition_met: bool,
    pub channel: ChannelReport,
    /// False only if a *-cohomomorphism fails to be a channel.
    pub consistent: bool,
}

/// Checks that a *-cohomomorphism between special algebras is a channel.
pub fn check_cohom_is_channel(
    f: &DenseMatrix,
    a: Arc<FrobeniusAlgebra>,
    b: Arc<FrobeniusAlgebra>,
    tol: &Tolerance,
) -> Result<CohomChannelReport> {
    let cohomomorphism = check_star_cohomomorphism(f, &a, &b)?;
    let map = ChannelMap::new(a, b, f.clone())?;
    let channel = is_channel(&map, tol)?;
    let precondition_met = cohomomorphism.holds(tol);
    Ok(CohomChannelReport {
        cohomomorphism,
        precondition_met,
        channel,
        consistent: !precondition_met || channel.channel,
    })
}
