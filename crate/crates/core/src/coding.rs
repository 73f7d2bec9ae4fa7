//! Entanglement-assisted coding schemes and classical capacities.

use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::cpmaps::{is_channel, ChannelMap, ChannelReport};
use crate::error::{Error, Result};
use crate::frobenius::{commutative_algebra, matrix_algebra, max_entangled_element, tensor_product, FrobeniusAlgebra};
use crate::groups::{twisted_group_algebra, Cocycle2, GradedAlgebra, Subgroup};
use crate::linalg::{tensor, DenseMatrix, Tolerance, ZERO};
use crate::symmetry::{
    apply_first, coding_scheme_equations, naturality_check, transform_with_pairs, EntangledPair,
    UptInstance,
};

/// `D ∘ (N ⊗ id) ∘ (E ⊗ id) ∘ (id_X ⊗ Ψ)` should equal `T`.
#[derive(Debug, Clone)]
pub struct CodingScheme {
    /// `E: X ⊗ B(H) -> A`.
    pub encode: ChannelMap,
    /// `N: A -> B`.
    pub channel: ChannelMap,
    /// `D: B ⊗ B(H) -> Y`.
    pub decode: ChannelMap,
    /// `T: X -> Y`.
    pub target: ChannelMap,
    pub resource_dim: usize,
}

impl CodingScheme {
    pub fn new(
        encode: ChannelMap,
        channel: ChannelMap,
        decode: ChannelMap,
        target: ChannelMap,
        resource_dim: usize,
    ) -> Result<Self> {
        let dd = resource_dim * resource_dim;
        let checks = [
            ("encoder input", target.source().dim() * dd, encode.source().dim()),
            ("encoder output", channel.source().dim(), encode.target().dim()),
            ("decoder input", channel.target().dim() * dd, decode.source().dim()),
            ("decoder output", target.target().dim(), decode.target().dim()),
        ];
        for (context, expected, found) in checks {
            if expected != found {
                return Err(Error::DimensionMismatch {
                    context,
                    expected,
                    found,
                });
            }
        }
        let m = matrix_algebra(resource_dim)?;
        if **encode.target() != **channel.source()
            || **encode.source() != tensor_product(target.source(), &m)?
            || **decode.source() != tensor_product(channel.target(), &m)?
            || **decode.target() != **target.target()
        {
            return Err(Error::NotComposable);
        }
        Ok(CodingScheme {
            encode,
            channel,
            decode,
            target,
            resource_dim,
        })
    }

    /// The composite pipeline as a matrix `X -> Y`.
    pub fn pipeline(&self) -> Result<DenseMatrix> {
        let psi = max_entangled_element(self.resource_dim)?;
        let dd = self.resource_dim * self.resource_dim;
        let nx = self.target.source().dim();
        let mut out = DenseMatrix::zeros(self.target.target().dim(), nx);
        for x in 0..nx {
            let mut input = vec![ZERO; nx * psi.len()];
            input[x * psi.len()..(x + 1) * psi.len()].copy_from_slice(&psi);
            let a = apply_first(self.encode.matrix(), &input, dd);
            let b = apply_first(self.channel.matrix(), &a, dd);
            let y = self.decode.matrix().apply(&b)?;
            for (r, z) in y.into_iter().enumerate() {
                out[(r, x)] = z;
            }
        }
        Ok(out)
    }

    /// Channel reports for `E`, `N`, `D`, `T` in that order.
    pub fn channel_reports(&self, tol: &Tolerance) -> Result<[ChannelReport; 4]> {
        Ok([
            is_channel(&self.encode, tol)?,
            is_channel(&self.channel, tol)?,
            is_channel(&self.decode, tol)?,
            is_channel(&self.target, tol)?,
        ])
    }
}

/// Pipeline residual `max |D ∘ (N ⊗ id) ∘ (E ⊗ id) ∘ (id ⊗ Ψ) − T|`.
pub fn verify_scheme(s: &CodingScheme) -> Result<f64> {
    s.pipeline()?.max_abs_diff(s.target.matrix())
}

/// `V ⊗ I` for a carrier-level unitary `V` acting on the first factor.
fn on_first(v: &DenseMatrix, rest: usize) -> DenseMatrix {
    tensor(v, &DenseMatrix::identity(rest))
}

/// The untwisted algebra over `Z_d × Z_d`, its pair, and the unitaries that
/// identify `A` with `C^{d²}` and `A'` with `M_d`.
struct StandardInstance {
    pair: EntangledPair,
    kappa: DenseMatrix,
    iota: DenseMatrix,
    classical: Arc<FrobeniusAlgebra>,
    quantum: Arc<FrobeniusAlgebra>,
    resource: Arc<FrobeniusAlgebra>,
}

fn standard_instance(d: usize) -> Result<StandardInstance> {
    let upt = UptInstance::clock_shift(d)?;
    let group = upt.group().clone();
    let alg = twisted_group_algebra(&Subgroup::whole(&group), &Cocycle2::trivial(&group))?;
    let pair = EntangledPair::new(&alg, &upt)?;
    let kappa = alg
        .algebra()
        .presentation()
        .ok_or(Error::NoPresentation)?
        .to_standard
        .clone();
    let iota = pair
        .twisted
        .algebra()
        .presentation()
        .ok_or(Error::NoPresentation)?
        .to_standard
        .clone();
    Ok(StandardInstance {
        pair,
        kappa,
        iota,
        classical: Arc::new(commutative_algebra(d * d)?),
        quantum: Arc::new(matrix_algebra(d)?),
        resource: Arc::new(matrix_algebra(d)?),
    })
}

/// Teleportation of a `d`-level system: `T = id_{M_d}` from `N = id_{C^{d²}}`.
/// Encoder `v`, decoder `u`, transported to the standard algebras.
pub fn teleportation(d: usize) -> Result<CodingScheme> {
    let s = standard_instance(d)?;
    let dd = d * d;
    let enc = s
        .kappa
        .matmul(s.pair.v.matrix())?
        .matmul(&on_first(&s.iota.dagger(), dd))?;
    let dec = s
        .iota
        .matmul(s.pair.u.matrix())?
        .matmul(&on_first(&s.kappa.dagger(), dd))?;
    let qm = Arc::new(tensor_product(&s.quantum, &s.resource)?);
    let cm = Arc::new(tensor_product(&s.classical, &s.resource)?);
    CodingScheme::new(
        ChannelMap::new(qm, s.classical.clone(), enc)?,
        ChannelMap::identity(s.classical.clone()),
        ChannelMap::new(cm, s.quantum.clone(), dec)?,
        ChannelMap::identity(s.quantum.clone()),
        d,
    )
}

/// Dense coding: `T = id_{C^{d²}}` from `N = id_{M_d}`. Encoder `u`, decoder `v`.
pub fn dense_coding(d: usize) -> Result<CodingScheme> {
    let s = standard_instance(d)?;
    let dd = d * d;
    let enc = s
        .iota
        .matmul(s.pair.u.matrix())?
        .matmul(&on_first(&s.kappa.dagger(), dd))?;
    let dec = s
        .kappa
        .matmul(s.pair.v.matrix())?
        .matmul(&on_first(&s.iota.dagger(), dd))?;
    let qm = Arc::new(tensor_product(&s.quantum, &s.resource)?);
    let cm = Arc::new(tensor_product(&s.classical, &s.resource)?);
    CodingScheme::new(
        ChannelMap::new(cm, s.quantum.clone(), enc)?,
        ChannelMap::identity(s.quantum.clone()),
        ChannelMap::new(qm, s.classical.clone(), dec)?,
        ChannelMap::identity(s.classical.clone()),
        d,
    )
}

const STOCHASTIC_TOL: f64 = 1e-12;
const BUCKET: f64 = 1e-9;

/// A classical channel `p(y|x)`, stored column-stochastic: column `x` is the
/// output distribution for input `x`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "ChannelRows", into = "ChannelRows")]
pub struct ClassicalChannel {
    outputs: usize,
    inputs: usize,
    data: Vec<f64>,
}

/// Serialized form: rows indexed by output `y`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ChannelRows {
    pub matrix: Vec<Vec<f64>>,
}

impl TryFrom<ChannelRows> for ClassicalChannel {
    type Error = Error;
    fn try_from(rows: ChannelRows) -> Result<Self> {
        ClassicalChannel::from_rows(&rows.matrix)
    }
}

impl From<ClassicalChannel> for ChannelRows {
    fn from(c: ClassicalChannel) -> Self {
        ChannelRows {
            matrix: (0..c.outputs).map(|y| c.row(y).to_vec()).collect(),
        }
    }
}

impl ClassicalChannel {
    /// `rows[y][x] = p(y|x)`.
    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let outputs = rows.len();
        let inputs = rows.first().map_or(0, Vec::len);
        if outputs == 0 || inputs == 0 {
            return Err(Error::ZeroDimension);
        }
        if rows.iter().any(|r| r.len() != inputs) {
            return Err(Error::Ragged);
        }
        let data: Vec<f64> = rows.iter().flatten().copied().collect();
        if let Some(bad) = data.iter().find(|&&p| !(p >= 0.0)) {
            return Err(Error::NotStochastic(format!("entry {bad} is negative")));
        }
        for x in 0..inputs {
            let s: f64 = (0..outputs).map(|y| data[y * inputs + x]).sum();
            if (s - 1.0).abs() > STOCHASTIC_TOL {
                return Err(Error::NotStochastic(format!("column {x} sums to {s}")));
            }
        }
        Ok(ClassicalChannel {
            outputs,
            inputs,
            data,
        })
    }

    pub fn identity(n: usize) -> Result<Self> {
        let rows: Vec<Vec<f64>> = (0..n)
            .map(|y| (0..n).map(|x| if x == y { 1.0 } else { 0.0 }).collect())
            .collect();
        Self::from_rows(&rows)
    }

    pub fn binary_symmetric(p: f64) -> Result<Self> {
        Self::from_rows(&[vec![1.0 - p, p], vec![p, 1.0 - p]])
    }

    /// Comma-separated rows, one output per line; `#` starts a comment.
    pub fn from_csv(text: &str) -> Result<Self> {
        let rows = text
            .lines()
            .map(|l| l.split('#').next().unwrap_or("").trim())
            .filter(|l| !l.is_empty())
            .map(|l| {
                l.split(',')
                    .map(|t| {
                        t.trim()
                            .parse::<f64>()
                            .map_err(|e| Error::Parse(format!("{t:?}: {e}")))
                    })
                    .collect::<Result<Vec<_>>>()
            })
            .collect::<Result<Vec<_>>>()?;
        Self::from_rows(&rows)
    }

    /// Either `{"matrix": [[...]]}` or a bare array of rows.
    pub fn from_json(text: &str) -> Result<Self> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Doc {
            Wrapped(ChannelRows),
            Bare(Vec<Vec<f64>>),
        }
        let doc: Doc = serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
        match doc {
            Doc::Wrapped(r) => Self::from_rows(&r.matrix),
            Doc::Bare(r) => Self::from_rows(&r),
        }
    }

    /// Read the real part of a column-stochastic complex matrix.
    pub fn from_matrix(m: &DenseMatrix, tol: f64) -> Result<Self> {
        let worst_imag = m.entries().iter().map(|z| z.im.abs()).fold(0.0, f64::max);
        if worst_imag > tol {
            return Err(Error::NotStochastic(format!("imaginary part {worst_imag:e}")));
        }
        let rows: Vec<Vec<f64>> = (0..m.rows())
            .map(|r| {
                m.row(r)
                    .iter()
                    .map(|z| if z.re.abs() <= tol { 0.0 } else { z.re })
                    .collect()
            })
            .collect();
        // Round-off from basis changes; renormalise columns within the tolerance.
        let cols = m.cols();
        let mut fixed = rows.clone();
        for x in 0..cols {
            let s: f64 = rows.iter().map(|r| r[x]).sum();
            if (s - 1.0).abs() > tol {
                return Err(Error::NotStochastic(format!("column {x} sums to {s}")));
            }
            for r in fixed.iter_mut() {
                r[x] /= s;
            }
        }
        Self::from_rows(&fixed)
    }

    pub fn inputs(&self) -> usize {
        self.inputs
    }

    pub fn outputs(&self) -> usize {
        self.outputs
    }

    pub fn prob(&self, y: usize, x: usize) -> f64 {
        self.data[y * self.inputs + x]
    }

    pub fn row(&self, y: usize) -> &[f64] {
        &self.data[y * self.inputs..(y + 1) * self.inputs]
    }

    /// Output distribution for input `x`.
    pub fn column(&self, x: usize) -> Vec<f64> {
        (0..self.outputs).map(|y| self.prob(y, x)).collect()
    }

    /// `c ⊗ d` on paired inputs and outputs.
    pub fn product(&self, other: &ClassicalChannel) -> ClassicalChannel {
        let outputs = self.outputs * other.outputs;
        let inputs = self.inputs * other.inputs;
        let mut data = vec![0.0; outputs * inputs];
        for y1 in 0..self.outputs {
            for y2 in 0..other.outputs {
                for x1 in 0..self.inputs {
                    for x2 in 0..other.inputs {
                        data[(y1 * other.outputs + y2) * inputs + x1 * other.inputs + x2] =
                            self.prob(y1, x1) * other.prob(y2, x2);
                    }
                }
            }
        }
        ClassicalChannel {
            outputs,
            inputs,
            data,
        }
    }
}

fn sorted(mut v: Vec<f64>) -> Vec<f64> {
    v.sort_by(f64::total_cmp);
    v
}

/// Output distributions are permutations of one another and the uniform input
/// distribution gives the uniform output distribution.
pub fn is_weakly_symmetric(c: &ClassicalChannel) -> bool {
    let reference = sorted(c.column(0));
    let permuted = (1..c.inputs()).all(|x| {
        sorted(c.column(x))
            .iter()
            .zip(&reference)
            .all(|(a, b)| (a - b).abs() <= BUCKET)
    });
    let uniform_out = 1.0 / c.outputs() as f64;
    let unital = (0..c.outputs()).all(|y| {
        let s: f64 = c.row(y).iter().sum::<f64>() / c.inputs() as f64;
        (s - uniform_out).abs() <= BUCKET
    });
    permuted && unital
}

/// Shannon entropy in bits, with `0 log 0 = 0`.
pub fn entropy_bits(p: &[f64]) -> f64 {
    -p.iter().filter(|&&x| x > 0.0).map(|&x| x * x.log2()).sum::<f64>()
}

/// `log₂|Y| − H(p(·|x))` for a weakly symmetric channel.
pub fn capacity_weakly_symmetric(c: &ClassicalChannel) -> Result<f64> {
    if !is_weakly_symmetric(c) {
        return Err(Error::NotWeaklySymmetric);
    }
    Ok(((c.outputs() as f64).log2() - entropy_bits(&c.column(0))).max(0.0))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BlahutArimoto {
    /// Lower bound at termination, in bits.
    pub capacity: f64,
    pub upper_bound: f64,
    pub iterations: usize,
    pub converged: bool,
}

/// Blahut–Arimoto iteration from the uniform input distribution, stopping when
/// the standard upper and lower capacity bounds are within `tol`.
pub fn blahut_arimoto(c: &ClassicalChannel, max_iterations: usize, tol: f64) -> BlahutArimoto {
    let (nx, ny) = (c.inputs(), c.outputs());
    let mut r = vec![1.0 / nx as f64; nx];
    let mut lower = 0.0;
    let mut upper = f64::INFINITY;
    let mut iterations = 0;
    let mut converged = false;
    while iterations < max_iterations {
        iterations += 1;
        let q: Vec<f64> = (0..ny)
            .map(|y| (0..nx).map(|x| c.prob(y, x) * r[x]).sum())
            .collect();
        let divergence: Vec<f64> = (0..nx)
            .map(|x| {
                (0..ny)
                    .filter(|&y| c.prob(y, x) > 0.0)
                    .map(|y| c.prob(y, x) * (c.prob(y, x) / q[y]).log2())
                    .sum()
            })
            .collect();
        let weights: Vec<f64> = r.iter().zip(&divergence).map(|(p, d)| p * d.exp2()).collect();
        let z: f64 = weights.iter().sum();
        lower = z.log2();
        upper = divergence.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        if upper - lower < tol {
            converged = true;
            break;
        }
        r = weights.iter().map(|w| w / z).collect();
    }
    BlahutArimoto {
        capacity: lower.max(0.0),
        upper_bound: upper,
        iterations,
        converged,
    }
}

/// Capacities of a covariant classical channel and of its quantum image.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CapacityReport {
    pub stochastic: ClassicalChannel,
    pub capacity_bits: f64,
    pub blahut_arimoto_bits: f64,
    pub blahut_arimoto_iterations: usize,
    /// `C_E` of the classical channel, equal to `C`.
    pub entanglement_assisted_bits: f64,
    /// `C_E` of the transformed channel, certified by the coding schemes below.
    pub image_entanglement_assisted_bits: f64,
    /// Half of `C_E`, from teleportation and dense coding.
    pub image_quantum_entanglement_assisted_qubits: f64,
    pub coding_residuals: [f64; 2],
    pub naturality_residuals: [f64; 2],
    pub certificate: bool,
}

/// For a covariant channel `f: A(L₁,1) -> A(L₂,1)` whose factor-basis matrix
/// is weakly symmetric, compute `C` and certify that the transformed channel
/// interconverts with `f` using entanglement, so `C_E` carries over.
pub fn entanglement_assisted_capacity_report(
    f: &ChannelMap,
    a1: &GradedAlgebra,
    a2: &GradedAlgebra,
    upt: &UptInstance,
    tol: &Tolerance,
) -> Result<CapacityReport> {
    let p1 = EntangledPair::new(a1, upt)?;
    let p2 = if Arc::ptr_eq(a1.algebra(), a2.algebra()) {
        p1.clone()
    } else {
        EntangledPair::new(a2, upt)?
    };
    let t = transform_with_pairs(f, &p1, &p2, tol)?;
    let stochastic = ClassicalChannel::from_matrix(&t.stochastic, 1e-9)?;
    let capacity_bits = capacity_weakly_symmetric(&stochastic)?;
    let ba = blahut_arimoto(&stochastic, 10_000, 1e-12);
    let (c1, c2) = coding_scheme_equations(f, &t.map, &p1, &p2)?;
    let (n1, n2) = naturality_check(f, &t.map, &p1, &p2)?;
    let certificate = [c1, c2, n1, n2].iter().all(|&r| tol.accepts(r))
        && is_channel(&t.map, tol)?.channel;
    Ok(CapacityReport {
        stochastic,
        capacity_bits,
        blahut_arimoto_bits: ba.capacity,
        blahut_arimoto_iterations: ba.iterations,
        entanglement_assisted_bits: capacity_bits,
        image_entanglement_assisted_bits: capacity_bits,
        image_quantum_entanglement_assisted_qubits: capacity_bits / 2.0,
        coding_residuals: [c1, c2],
        naturality_residuals: [n1, n2],
        certificate,
    })
}
