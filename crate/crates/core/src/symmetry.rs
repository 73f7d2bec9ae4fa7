//! Entanglement-symmetries of group-graded channels.
//!
//! A projective representation `π` of `G` with cocycle `ψ` gives a unitary
//! pseudonatural transformation with components `α_g = π(g)`. From it we build
//! the encoder/decoder pair `u: A ⊗ B(H) -> A'` and `v: A' ⊗ B(H) -> A`, where
//! `A' = A(L, ψ̄ φ)` is the twist of `A = A(L, φ)` on the same graded space,
//! and the transformation of covariant channels that keeps the graded-basis
//! matrix fixed.

use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::coding::{verify_scheme, CodingScheme};
use crate::cpmaps::{compose, is_channel, ChannelMap, ChannelReport};
use crate::error::{Error, Result};
use crate::frobenius::{max_entangled_element, matrix_algebra, tensor_product};
use crate::groups::{
    fourier_matrix, is_covariant, is_grading_preserving, twist, Cocycle2, FiniteAbelianGroup,
    GradedAlgebra, ProjectiveRep,
};
use crate::linalg::{cap, cup, tensor, DenseMatrix, Tolerance, C64, ZERO};

/// `α_g = π(g)` for a projective representation with cocycle `ψ`.
#[derive(Debug, Clone)]
pub struct UptInstance {
    rep: ProjectiveRep,
}

impl UptInstance {
    pub fn new(rep: ProjectiveRep) -> Self {
        UptInstance { rep }
    }

    /// Clock and shift matrices on `C^d` over `Z_d × Z_d`.
    pub fn clock_shift(d: usize) -> Result<Self> {
        Ok(UptInstance::new(crate::groups::clock_shift_rep(d)?))
    }

    /// Degree 1, trivial cocycle: the identity transformation.
    pub fn trivial(group: &FiniteAbelianGroup) -> Self {
        UptInstance::new(ProjectiveRep::trivial(group))
    }

    pub fn rep(&self) -> &ProjectiveRep {
        &self.rep
    }

    pub fn group(&self) -> &FiniteAbelianGroup {
        self.rep.group()
    }

    pub fn cocycle(&self) -> &Cocycle2 {
        self.rep.cocycle()
    }

    pub fn degree(&self) -> usize {
        self.rep.degree()
    }

    pub fn component(&self, g: usize) -> &DenseMatrix {
        self.rep.matrix(g)
    }

    /// Component of the dual transformation, `conj π(g)`.
    pub fn dual_component(&self, g: usize) -> DenseMatrix {
        self.rep.matrix(g).conj()
    }

    /// Monoidality of the components is the projective relation.
    pub fn monoidality_residual(&self) -> f64 {
        self.rep.residual()
    }

    /// Residuals of the four pull-through identities
    /// `(α ⊗ α*) cup = cup`, `cap (α ⊗ α*) = cap`, `(α* ⊗ α) cup = cup`,
    /// `cap (α* ⊗ α) = cap`, worst case over `g`.
    pub fn pull_through_residuals(&self) -> [f64; 4] {
        let d = self.degree();
        let (cu, ca) = (cup(d), cap(d));
        let mut out = [0.0f64; 4];
        for g in 0..self.group().order() {
            let a = self.component(g);
            let ad = self.dual_component(g);
            let left = tensor(a, &ad);
            let right = tensor(&ad, a);
            let r = [
                left.matmul(&cu).unwrap().max_abs_diff(&cu).unwrap(),
                ca.matmul(&left).unwrap().max_abs_diff(&ca).unwrap(),
                right.matmul(&cu).unwrap().max_abs_diff(&cu).unwrap(),
                ca.matmul(&right).unwrap().max_abs_diff(&ca).unwrap(),
            ];
            for (o, x) in out.iter_mut().zip(r) {
                *o = o.max(x);
            }
        }
        out
    }

    /// `A(L, ψ̄ φ)`, presented as a matrix algebra through `conj π` when
    /// `deg(π)² = |L|` and the cocycles match.
    pub fn twisted(&self, alg: &GradedAlgebra) -> Result<GradedAlgebra> {
        if alg.group() != self.group() {
            return Err(Error::GroupMismatch);
        }
        let out = twist(alg, self.cocycle())?;
        if out.algebra().presentation().is_none() && self.degree().pow(2) == out.dim() {
            let rep = self.rep.conj();
            if let Ok(presented) = out.clone().with_rep_presentation(&rep) {
                return Ok(presented);
            }
        }
        Ok(out)
    }
}

/// Which matrix built from `π(g)` enters `Tr[W σ]` in the encoder/decoder.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RepVariant {
    Plain,
    Transpose,
    Conjugate,
    Dagger,
}

impl RepVariant {
    pub const ALL: [RepVariant; 4] = [
        RepVariant::Plain,
        RepVariant::Transpose,
        RepVariant::Conjugate,
        RepVariant::Dagger,
    ];

    fn apply(self, m: &DenseMatrix) -> DenseMatrix {
        match self {
            RepVariant::Plain => m.clone(),
            RepVariant::Transpose => m.transpose(),
            RepVariant::Conjugate => m.conj(),
            RepVariant::Dagger => m.dagger(),
        }
    }
}

/// The variant used by [`build_u`].
pub const U_VARIANT: RepVariant = RepVariant::Transpose;
/// The variant used by [`build_v`].
pub const V_VARIANT: RepVariant = RepVariant::Dagger;

/// Carrier matrix of `a_g ⊗ σ ↦ d · Tr[W(g) σ] · a_g` from `A ⊗ B(H)`, where
/// `B(H)` is `matrix_algebra(d)` and `a_g` runs over the graded basis.
fn homogeneous_trace_map(alg: &GradedAlgebra, upt: &UptInstance, variant: RepVariant) -> DenseMatrix {
    let d = upt.degree();
    let n = alg.dim();
    let dd = d * d;
    let s = (d as f64).sqrt();
    let mut m = DenseMatrix::zeros(n, n * dd);
    for k in 0..n {
        let w = variant.apply(upt.component(alg.degree_of(k)));
        // Basis vector |ij⟩ of matrix_algebra(d) is E_ij / √d.
        for i in 0..d {
            for j in 0..d {
                m[(k, k * dd + i * d + j)] = w[(j, i)] * s;
            }
        }
    }
    m
}


/// `u` with an explicit variant, from `A ⊗ B(H)` to `twisted`.
pub fn build_u_with(
    alg: &GradedAlgebra,
    twisted: &GradedAlgebra,
    upt: &UptInstance,
    variant: RepVariant,
) -> Result<ChannelMap> {
    if alg.group() != upt.group() {
        return Err(Error::GroupMismatch);
    }
    let source = Arc::new(tensor_product(alg.algebra(), &matrix_algebra(upt.degree())?)?);
    ChannelMap::new(source, twisted.algebra().clone(), homogeneous_trace_map(alg, upt, variant))
}

/// `v` with an explicit variant, from `twisted ⊗ B(H)` back to `alg`.
pub fn build_v_with(
    alg: &GradedAlgebra,
    twisted: &GradedAlgebra,
    upt: &UptInstance,
    variant: RepVariant,
) -> Result<ChannelMap> {
    if alg.group() != upt.group() {
        return Err(Error::GroupMismatch);
    }
    let source = Arc::new(tensor_product(twisted.algebra(), &matrix_algebra(upt.degree())?)?);
    ChannelMap::new(source, alg.algebra().clone(), homogeneous_trace_map(twisted, upt, variant))
}

/// `u(a_g ⊗ σ) = d · Tr[π(g)ᵀ σ] · a_g'`.
pub fn build_u(alg: &GradedAlgebra, upt: &UptInstance) -> Result<ChannelMap> {
    let twisted = upt.twisted(alg)?;
    build_u_with(alg, &twisted, upt, U_VARIANT)
}

/// `v(a_g' ⊗ σ) = d · Tr[π(g)† σ] · a_g`, built from the dual components.
pub fn build_v(alg: &GradedAlgebra, upt: &UptInstance) -> Result<ChannelMap> {
    let twisted = upt.twisted(alg)?;
    build_v_with(alg, &twisted, upt, V_VARIANT)
}

/// The encoder/decoder pair for one algebra, sharing algebra handles.
#[derive(Debug, Clone)]
pub struct EntangledPair {
    pub algebra: GradedAlgebra,
    pub twisted: GradedAlgebra,
    pub u: ChannelMap,
    pub v: ChannelMap,
    pub resource_dim: usize,
}

impl EntangledPair {
    pub fn new(alg: &GradedAlgebra, upt: &UptInstance) -> Result<Self> {
        Self::with_variants(alg, upt, U_VARIANT, V_VARIANT)
    }

    pub fn with_variants(
        alg: &GradedAlgebra,
        upt: &UptInstance,
        u_variant: RepVariant,
        v_variant: RepVariant,
    ) -> Result<Self> {
        let twisted = upt.twisted(alg)?;
        let u = build_u_with(alg, &twisted, upt, u_variant)?;
        let v = build_v_with(alg, &twisted, upt, v_variant)?;
        Ok(EntangledPair {
            algebra: alg.clone(),
            twisted,
            u,
            v,
            resource_dim: upt.degree(),
        })
    }
}

/// Apply `m` to the first factor of `x ∈ V ⊗ W`, `dim W = rest`.
pub(crate) fn apply_first(m: &DenseMatrix, x: &[C64], rest: usize) -> Vec<C64> {
    let mut out = vec![ZERO; m.rows() * rest];
    for c in 0..m.cols() {
        let block = &x[c * rest..(c + 1) * rest];
        if block.iter().all(|z| *z == ZERO) {
            continue;
        }
        for r in 0..m.rows() {
            let a = m[(r, c)];
            if a == ZERO {
                continue;
            }
            let dst = &mut out[r * rest..(r + 1) * rest];
            for (o, &b) in dst.iter_mut().zip(block) {
                *o += a * b;
            }
        }
    }
    out
}

/// `dec ∘ (enc ⊗ id) ∘ (id ⊗ Ψ)` as a matrix, for `enc: X ⊗ M -> A` and
/// `dec: A ⊗ M -> Y` with `M = matrix_algebra(d)`.
fn entangled_round_trip(enc: &DenseMatrix, dec: &DenseMatrix, nx: usize, d: usize) -> Result<DenseMatrix> {
    let psi = max_entangled_element(d)?;
    let dd = d * d;
    let mut out = DenseMatrix::zeros(dec.rows(), nx);
    for x in 0..nx {
        let mut input = vec![ZERO; nx * psi.len()];
        input[x * psi.len()..(x + 1) * psi.len()].copy_from_slice(&psi);
        let mid = apply_first(enc, &input, dd);
        let y = dec.apply(&mid)?;
        for (r, z) in y.into_iter().enumerate() {
            out[(r, x)] = z;
        }
    }
    Ok(out)
}

/// `(‖v ∘ (u ⊗ id) ∘ (id ⊗ Ψ) − id_A‖, ‖u ∘ (v ⊗ id) ∘ (id ⊗ Ψ) − id_A'‖)`.
pub fn entanglement_invertibility(pair: &EntangledPair) -> Result<(f64, f64)> {
    let d = pair.resource_dim;
    let n = pair.algebra.dim();
    let eye = DenseMatrix::identity(n);
    let r1 = entangled_round_trip(pair.u.matrix(), pair.v.matrix(), n, d)?.max_abs_diff(&eye)?;
    let r2 = entangled_round_trip(pair.v.matrix(), pair.u.matrix(), n, d)?.max_abs_diff(&eye)?;
    Ok((r1, r2))
}

/// A covariant channel carried across to the twisted algebras.
#[derive(Debug, Clone)]
pub struct TransformedChannel {
    /// Same graded-basis matrix, now between the twisted algebras.
    pub map: ChannelMap,
    pub source: GradedAlgebra,
    pub target: GradedAlgebra,
    /// The input's stochastic matrix in the factor bases, `μ₂† f^μ μ₁`.
    pub stochastic: DenseMatrix,
    /// Largest graded-basis entry between different degrees.
    pub off_diagonal: f64,
}

impl TransformedChannel {
    /// `f^μ`, the graded-basis matrix.
    pub fn f_mu(&self) -> &DenseMatrix {
        self.map.matrix()
    }
}

fn check_on(f: &ChannelMap, a1: &GradedAlgebra, a2: &GradedAlgebra) -> Result<()> {
    if **f.source() != **a1.algebra() {
        return Err(Error::AlgebraMismatch("source"));
    }
    if **f.target() != **a2.algebra() {
        return Err(Error::AlgebraMismatch("target"));
    }
    Ok(())
}

/// Carry a covariant channel `A(L₁,1) -> A(L₂,1)` to `A(L₁,ψ̄) -> A(L₂,ψ̄)`.
///
/// The twisted algebras are built by `twist_source` / `twist_target` so callers
/// can share handles with an [`EntangledPair`].
pub fn transform_channel_into(
    f: &ChannelMap,
    a1: &GradedAlgebra,
    a2: &GradedAlgebra,
    t1: &GradedAlgebra,
    t2: &GradedAlgebra,
    tol: &Tolerance,
) -> Result<TransformedChannel> {
    check_on(f, a1, a2)?;
    if !a1.is_untwisted() || !a2.is_untwisted() {
        return Err(Error::TwistedInput);
    }
    let cov = is_covariant(f.matrix(), a1, a2)?;
    if !tol.accepts(cov) {
        return Err(Error::NotCovariant(cov));
    }
    let report = is_channel(f, tol)?;
    if !report.channel {
        return Err(Error::NotChannel {
            min_eigenvalue: report.min_eigenvalue,
            counit: report.counit_residual,
        });
    }
    if t1.subgroup() != a1.subgroup() || t2.subgroup() != a2.subgroup() {
        return Err(Error::GroupMismatch);
    }
    let mu1 = fourier_matrix(a1.subgroup());
    let mu2 = fourier_matrix(a2.subgroup());
    let stochastic = mu2.dagger().matmul(f.matrix())?.matmul(&mu1)?;
    let f_mu = mu2.matmul(&stochastic)?.matmul(&mu1.dagger())?;
    let off_diagonal = is_grading_preserving(&f_mu, a1, a2)?;
    let map = ChannelMap::new(t1.algebra().clone(), t2.algebra().clone(), f_mu)?;
    Ok(TransformedChannel {
        map,
        source: t1.clone(),
        target: t2.clone(),
        stochastic,
        off_diagonal,
    })
}

/// [`transform_channel_into`] with the twisted algebras built from `ψ`.
pub fn transform_channel(
    f: &ChannelMap,
    a1: &GradedAlgebra,
    a2: &GradedAlgebra,
    psi: &Cocycle2,
    tol: &Tolerance,
) -> Result<TransformedChannel> {
    let t1 = twist(a1, psi)?;
    let t2 = if Arc::ptr_eq(a1.algebra(), a2.algebra()) {
        t1.clone()
    } else {
        twist(a2, psi)?
    };
    transform_channel_into(f, a1, a2, &t1, &t2, tol)
}

/// Transform using the twisted algebras of two entangled pairs.
pub fn transform_with_pairs(
    f: &ChannelMap,
    p1: &EntangledPair,
    p2: &EntangledPair,
    tol: &Tolerance,
) -> Result<TransformedChannel> {
    transform_channel_into(f, &p1.algebra, &p2.algebra, &p1.twisted, &p2.twisted, tol)
}

/// Residuals of `u₂ ∘ (f ⊗ id) = f' ∘ u₁` and `v₂ ∘ (f' ⊗ id) = f ∘ v₁`.
pub fn naturality_check(
    f: &ChannelMap,
    f_prime: &ChannelMap,
    p1: &EntangledPair,
    p2: &EntangledPair,
) -> Result<(f64, f64)> {
    if p1.resource_dim != p2.resource_dim {
        return Err(Error::DimensionMismatch {
            context: "resource dimension",
            expected: p1.resource_dim,
            found: p2.resource_dim,
        });
    }
    let eye = DenseMatrix::identity(p1.resource_dim.pow(2));
    let lhs_u = p2.u.matrix().matmul(&tensor(f.matrix(), &eye))?;
    let rhs_u = f_prime.matrix().matmul(p1.u.matrix())?;
    let lhs_v = p2.v.matrix().matmul(&tensor(f_prime.matrix(), &eye))?;
    let rhs_v = f.matrix().matmul(p1.v.matrix())?;
    Ok((lhs_u.max_abs_diff(&rhs_u)?, lhs_v.max_abs_diff(&rhs_v)?))
}

/// `(u_{A₁}, f', v_{A₂})` codes `f` from `f'`; `(v_{A₁}, f, u_{A₂})` codes `f'` from `f`.
pub fn coding_schemes(
    f: &ChannelMap,
    f_prime: &ChannelMap,
    p1: &EntangledPair,
    p2: &EntangledPair,
) -> Result<(CodingScheme, CodingScheme)> {
    let forward = CodingScheme::new(
        p1.u.clone(),
        f_prime.clone(),
        p2.v.clone(),
        f.clone(),
        p1.resource_dim,
    )?;
    let backward = CodingScheme::new(
        p1.v.clone(),
        f.clone(),
        p2.u.clone(),
        f_prime.clone(),
        p1.resource_dim,
    )?;
    Ok((forward, backward))
}

/// Pipeline residuals of both schemes from [`coding_schemes`].
pub fn coding_scheme_equations(
    f: &ChannelMap,
    f_prime: &ChannelMap,
    p1: &EntangledPair,
    p2: &EntangledPair,
) -> Result<(f64, f64)> {
    let (a, b) = coding_schemes(f, f_prime, p1, p2)?;
    Ok((verify_scheme(&a)?, verify_scheme(&b)?))
}

/// `(‖T(g ∘ f) − T(g) ∘ T(f)‖, ‖T(id) − id‖)` for composable covariant channels.
pub fn equivalence_functor_check(
    f: &ChannelMap,
    g: &ChannelMap,
    algebras: [&GradedAlgebra; 3],
    psi: &Cocycle2,
    tol: &Tolerance,
) -> Result<(f64, f64)> {
    let [a1, a2, a3] = algebras;
    let gf = compose(g, f)?;
    let t: Vec<GradedAlgebra> = algebras
        .iter()
        .map(|a| twist(a, psi))
        .collect::<Result<_>>()?;
    let tgf = transform_channel_into(&gf, a1, a3, &t[0], &t[2], tol)?;
    let tf = transform_channel_into(f, a1, a2, &t[0], &t[1], tol)?;
    let tg = transform_channel_into(g, a2, a3, &t[1], &t[2], tol)?;
    let composed = compose(&tg.map, &tf.map)?;
    let r_compose = tgf.map.matrix().max_abs_diff(composed.matrix())?;
    let id = ChannelMap::identity(a1.algebra().clone());
    let tid = transform_channel_into(&id, a1, a1, &t[0], &t[0], tol)?;
    let r_id = tid.map.matrix().max_abs_diff(&DenseMatrix::identity(a1.dim()))?;
    Ok((r_compose, r_id))
}

/// Outcome of carrying a transformed channel back through the diagonal
/// isomorphisms `i: A(L, ψ̄|_L) -> A(L, 1)` that each twisted algebra's
/// presentation provides when `ψ|_L` is a coboundary.
#[derive(Debug, Clone)]
pub struct CaveatReport {
    /// `i₂ ∘ f^μ ∘ i₁†` on the untwisted algebras, graded basis.
    pub image: ChannelMap,
    /// `max |i₂ f^μ i₁† − f|`, both in the graded basis.
    pub difference: f64,
    pub original: ChannelReport,
    pub image_report: ChannelReport,
}

/// The diagonal `i = μ · to_standard` of a coboundary-twisted algebra.
fn trivialising_iso(alg: &GradedAlgebra) -> Result<DenseMatrix> {
    let p = alg.algebra().presentation().ok_or(Error::NoPresentation)?;
    if p.blocks.iter().any(|&b| b != 1) {
        return Err(Error::NoPresentation);
    }
    Ok(fourier_matrix(alg.subgroup()).matmul(&p.to_standard)?)
}

pub fn coboundary_caveat(
    f: &ChannelMap,
    a1: &GradedAlgebra,
    a2: &GradedAlgebra,
    psi: &Cocycle2,
    tol: &Tolerance,
) -> Result<CaveatReport> {
    let t = transform_channel(f, a1, a2, psi, tol)?;
    let i1 = trivialising_iso(&t.source)?;
    let i2 = trivialising_iso(&t.target)?;
    let m = i2.matmul(t.f_mu())?.matmul(&i1.dagger())?;
    let image = ChannelMap::new(a1.algebra().clone(), a2.algebra().clone(), m)?;
    let difference = image.matrix().max_abs_diff(f.matrix())?;
    Ok(CaveatReport {
        difference,
        original: is_channel(f, tol)?,
        image_report: is_channel(&image, tol)?,
        image,
    })
}
