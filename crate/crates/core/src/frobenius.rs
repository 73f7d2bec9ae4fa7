//! Frobenius algebras in Hilb, stored as sparse structure constants.
//!
//! An algebra of dimension `n` is a multiplication `m: A ⊗ A -> A` and a unit
//! `u: C -> A` on the based space `C^n`; the coalgebra is the adjoint
//! (`δ = m†`, `ε = u†`). Structure constants are kept sparse so that algebras of
//! a few hundred dimensions (tensor products with a resource algebra) stay
//! cheap to verify. [`FrobeniusAlgebra::mult_matrix`] materialises the dense
//! `n x n²` matrix when a diagram needs it.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{kron_vec, swap, tensor, DenseMatrix, Tolerance, C64, ONE, ZERO};

/// Dropped from structure constants when importing dense data.
const SPARSITY_CUTOFF: f64 = 0.0;

/// A unitary identification of the carrier with a standard multimatrix layout.
///
/// `to_standard` maps carrier coordinates to the carrier coordinates of
/// `multimatrix_algebra(blocks)` and is a unitary *-isomorphism.
#[derive(Debug, Clone, PartialEq)]
pub struct Presentation {
    pub blocks: Vec<usize>,
    pub to_standard: DenseMatrix,
}

impl Presentation {
    pub fn standard(blocks: &[usize]) -> Self {
        let dim = blocks.iter().map(|n| n * n).sum();
        Presentation {
            blocks: blocks.to_vec(),
            to_standard: DenseMatrix::identity(dim),
        }
    }
}

#[derive(Clone)]
pub struct FrobeniusAlgebra {
    dim: usize,
    /// `products[i * dim + j]` lists `(k, c)` with `e_i e_j = Σ c e_k`.
    products: Vec<Vec<(usize, C64)>>,
    /// `coproducts[k]` lists `(i, j, conj c)`, i.e. `δ(e_k) = Σ conj(c) e_i ⊗ e_j`.
    coproducts: Vec<Vec<(usize, usize, C64)>>,
    unit: Vec<C64>,
    presentation: Option<Presentation>,
    label: String,
}

impl fmt::Debug for FrobeniusAlgebra {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("FrobeniusAlgebra")
            .field("label", &self.label)
            .field("dim", &self.dim)
            .field("blocks", &self.presentation.as_ref().map(|p| &p.blocks))
            .finish()
    }
}

impl PartialEq for FrobeniusAlgebra {
    fn eq(&self, other: &Self) -> bool {
        self.dim == other.dim
            && self.unit == other.unit
            && self.products == other.products
    }
}

impl FrobeniusAlgebra {
    /// Build from sparse structure constants.
    pub fn from_products(
        dim: usize,
        products: Vec<Vec<(usize, C64)>>,
        unit: Vec<C64>,
    ) -> Result<Self> {
        if dim == 0 {
            return Err(Error::ZeroDimension);
        }
        if products.len() != dim * dim {
            return Err(Error::DimensionMismatch {
                context: "structure constants",
                expected: dim * dim,
                found: products.len(),
            });
        }
        if unit.len() != dim {
            return Err(Error::DimensionMismatch {
                context: "unit",
                expected: dim,
                found: unit.len(),
            });
        }
        if let Some(&(k, _)) = products.iter().flatten().find(|(k, _)| *k >= dim) {
            return Err(Error::DimensionMismatch {
                context: "structure constant index",
                expected: dim,
                found: k,
            });
        }
        let mut coproducts = vec![Vec::new(); dim];
        for i in 0..dim {
            for j in 0..dim {
                for &(k, c) in &products[i * dim + j] {
                    coproducts[k].push((i, j, c.conj()));
                }
            }
        }
        Ok(FrobeniusAlgebra {
            dim,
            products,
            coproducts,
            unit,
            presentation: None,
            label: String::new(),
        })
    }

    /// Build from a dense multiplication `n x n²` and unit `n x 1`.
    pub fn from_dense(mult: &DenseMatrix, unit: &DenseMatrix) -> Result<Self> {
        let n = mult.rows();
        if n == 0 {
            return Err(Error::ZeroDimension);
        }
        if mult.cols() != n * n {
            return Err(Error::DimensionMismatch {
                context: "multiplication columns",
                expected: n * n,
                found: mult.cols(),
            });
        }
        if unit.shape() != (n, 1) {
            return Err(Error::ShapeMismatch {
                left: (n, 1),
                right: unit.shape(),
            });
        }
        let products = (0..n * n)
            .map(|col| {
                (0..n)
                    .filter_map(|k| {
                        let c = mult[(k, col)];
                        (c.norm() > SPARSITY_CUTOFF).then_some((k, c))
                    })
                    .collect()
            })
            .collect();
        Self::from_products(n, products, unit.col(0))
    }

    pub fn with_label(mut self, label: impl Into<String>) -> Self {
        self.label = label.into();
        self
    }

    pub fn with_presentation(mut self, presentation: Presentation) -> Result<Self> {
        if presentation.to_standard.shape() != (self.dim, self.dim) {
            return Err(Error::ShapeMismatch {
                left: (self.dim, self.dim),
                right: presentation.to_standard.shape(),
            });
        }
        let block_dim: usize = presentation.blocks.iter().map(|n| n * n).sum();
        if block_dim != self.dim {
            return Err(Error::DimensionMismatch {
                context: "presentation blocks",
                expected: self.dim,
                found: block_dim,
            });
        }
        self.presentation = Some(presentation);
        Ok(self)
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn presentation(&self) -> Option<&Presentation> {
        self.presentation.as_ref()
    }

    pub fn unit(&self) -> &[C64] {
        &self.unit
    }

    pub fn counit(&self) -> Vec<C64> {
        self.unit.iter().map(|z| z.conj()).collect()
    }

    pub fn unit_matrix(&self) -> DenseMatrix {
        DenseMatrix::column(&self.unit)
    }

    pub fn counit_matrix(&self) -> DenseMatrix {
        self.unit_matrix().dagger()
    }

    pub fn product_of_basis(&self, i: usize, j: usize) -> &[(usize, C64)] {
        &self.products[i * self.dim + j]
    }

    pub fn coproduct_of_basis(&self, k: usize) -> &[(usize, usize, C64)] {
        &self.coproducts[k]
    }

    /// Dense `n x n²` multiplication matrix.
    pub fn mult_matrix(&self) -> DenseMatrix {
        let n = self.dim;
        let mut m = DenseMatrix::zeros(n, n * n);
        for col in 0..n * n {
            for &(k, c) in &self.products[col] {
                m[(k, col)] += c;
            }
        }
        m
    }

    pub fn comult_matrix(&self) -> DenseMatrix {
        self.mult_matrix().dagger()
    }

    pub fn multiply(&self, a: &[C64], b: &[C64]) -> Vec<C64> {
        let n = self.dim;
        let mut out = vec![ZERO; n];
        for (i, &x) in a.iter().enumerate() {
            if x == ZERO {
                continue;
            }
            for (j, &y) in b.iter().enumerate() {
                if y == ZERO {
                    continue;
                }
                let xy = x * y;
                for &(k, c) in &self.products[i * n + j] {
                    out[k] += xy * c;
                }
            }
        }
        out
    }

    /// `m` applied to a vector of `A ⊗ A`.
    pub fn multiply_tensor(&self, v: &[C64]) -> Vec<C64> {
        let n = self.dim;
        let mut out = vec![ZERO; n];
        for (col, &x) in v.iter().enumerate() {
            if x == ZERO {
                continue;
            }
            for &(k, c) in &self.products[col] {
                out[k] += x * c;
            }
        }
        out
    }

    /// `δ = m†` applied to a vector, returned in `A ⊗ A`.
    pub fn comultiply(&self, x: &[C64]) -> Vec<C64> {
        let n = self.dim;
        let mut out = vec![ZERO; n * n];
        for (k, &z) in x.iter().enumerate() {
            if z == ZERO {
                continue;
            }
            for &(i, j, c) in &self.coproducts[k] {
                out[i * n + j] += z * c;
            }
        }
        out
    }

    pub fn counit_of(&self, x: &[C64]) -> C64 {
        self.unit.iter().zip(x).map(|(u, a)| u.conj() * a).sum()
    }

    /// The Frobenius cup `m† ∘ u`, a vector in `A ⊗ A`.
    pub fn frobenius_cup(&self) -> Vec<C64> {
        self.comultiply(&self.unit)
    }

    /// Left multiplication `L_a = m(a ⊗ -)` as an `n x n` matrix.
    pub fn left_multiplication(&self, a: &[C64]) -> DenseMatrix {
        let n = self.dim;
        let mut m = DenseMatrix::zeros(n, n);
        for (i, &x) in a.iter().enumerate() {
            if x == ZERO {
                continue;
            }
            for j in 0..n {
                for &(k, c) in &self.products[i * n + j] {
                    m[(k, j)] += x * c;
                }
            }
        }
        m
    }

    pub fn basis(&self, i: usize) -> Vec<C64> {
        let mut v = vec![ZERO; self.dim];
        v[i] = ONE;
        v
    }

    pub fn element(&self, coords: Vec<C64>) -> Result<AlgebraElement<'_>> {
        AlgebraElement::new(self, coords)
    }

    /// `a* = (⟨a| ⊗ id) ∘ m† ∘ u`: the cap built from the unit, bent against the
    /// complex conjugate of `a`.
    pub fn involution(&self, a: &[C64]) -> Vec<C64> {
        let n = self.dim;
        let cup = self.frobenius_cup();
        (0..n)
            .map(|k| (0..n).map(|i| a[i].conj() * cup[i * n + k]).sum())
            .collect()
    }

    /// Multiply every structure constant by `scale_m` and the unit by `scale_u`.
    pub fn rescaled(&self, scale_m: f64, scale_u: f64) -> FrobeniusAlgebra {
        let products = self
            .products
            .iter()
            .map(|terms| terms.iter().map(|&(k, c)| (k, c * scale_m)).collect())
            .collect();
        let unit = self.unit.iter().map(|&z| z * scale_u).collect();
        FrobeniusAlgebra::from_products(self.dim, products, unit).expect("same shape")
    }

    /// Multiply the product `e_i e_j` by `phase(i, j)` and the unit by `unit_scale`.
    pub fn twisted(&self, phase: impl Fn(usize, usize) -> C64, unit_scale: C64) -> FrobeniusAlgebra {
        let n = self.dim;
        let mut products = self.products.clone();
        for i in 0..n {
            for j in 0..n {
                let p = phase(i, j);
                for term in &mut products[i * n + j] {
                    term.1 *= p;
                }
            }
        }
        let unit = self.unit.iter().map(|&z| z * unit_scale).collect();
        FrobeniusAlgebra::from_products(n, products, unit).expect("same shape")
    }
}

/// An element of a specific algebra.
#[derive(Debug, Clone)]
pub struct AlgebraElement<'a> {
    algebra: &'a FrobeniusAlgebra,
    coords: Vec<C64>,
}

impl<'a> AlgebraElement<'a> {
    pub fn new(algebra: &'a FrobeniusAlgebra, coords: Vec<C64>) -> Result<Self> {
        if coords.len() != algebra.dim() {
            return Err(Error::DimensionMismatch {
                context: "algebra element",
                expected: algebra.dim(),
                found: coords.len(),
            });
        }
        Ok(AlgebraElement { algebra, coords })
    }

    pub fn coords(&self) -> &[C64] {
        &self.coords
    }

    pub fn into_coords(self) -> Vec<C64> {
        self.coords
    }

    pub fn algebra(&self) -> &'a FrobeniusAlgebra {
        self.algebra
    }

    pub fn star(&self) -> AlgebraElement<'a> {
        AlgebraElement {
            algebra: self.algebra,
            coords: self.algebra.involution(&self.coords),
        }
    }

    pub fn mul(&self, other: &AlgebraElement<'_>) -> AlgebraElement<'a> {
        AlgebraElement {
            algebra: self.algebra,
            coords: self.algebra.multiply(&self.coords, &other.coords),
        }
    }

    /// Value of the raw functional `u†`.
    pub fn counit(&self) -> C64 {
        self.algebra.counit_of(&self.coords)
    }

    /// `u† / dim(A)`, which sends the unit to 1 for a special algebra.
    pub fn normalized_functional(&self) -> C64 {
        self.counit() / self.algebra.dim() as f64
    }

    /// Positive iff left multiplication is a positive operator.
    pub fn is_positive(&self, tol: &Tolerance) -> Result<bool> {
        let l = self.algebra.left_multiplication(&self.coords);
        Ok(crate::linalg::is_psd(&l, tol)?.psd)
    }
}

/// Residuals of the algebra axioms, each the max-abs norm of `LHS - RHS`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AlgebraReport {
    pub assoc: f64,
    pub unital: f64,
    pub frobenius: f64,
    pub special: f64,
    pub symmetric: f64,
    pub commutative: f64,
    pub standard: f64,
}

/// Flags recomputed from an [`AlgebraReport`] at a given tolerance.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct AlgebraFlags {
    pub frobenius: bool,
    pub special: bool,
    pub symmetric: bool,
    pub commutative: bool,
    pub standard: bool,
}

impl AlgebraReport {
    pub fn flags(&self, tol: &Tolerance) -> AlgebraFlags {
        AlgebraFlags {
            frobenius: self.is_frobenius(tol),
            special: tol.accepts(self.special),
            symmetric: tol.accepts(self.symmetric),
            commutative: tol.accepts(self.commutative),
            standard: tol.accepts(self.standard),
        }
    }

    pub fn is_frobenius(&self, tol: &Tolerance) -> bool {
        tol.accepts(self.assoc) && tol.accepts(self.unital) && tol.accepts(self.frobenius)
    }

    /// Worst residual among the axioms every constructor in this crate should meet.
    pub fn max_ssfa_residual(&self) -> f64 {
        [self.assoc, self.unital, self.frobenius, self.special, self.symmetric, self.standard]
            .into_iter()
            .fold(0.0, f64::max)
    }
}

/// Scratch accumulator for sparse vectors over a fixed dimension.
struct Accumulator {
    values: Vec<C64>,
    touched: Vec<usize>,
}

impl Accumulator {
    fn new(n: usize) -> Self {
        Accumulator {
            values: vec![ZERO; n],
            touched: Vec::new(),
        }
    }

    fn add(&mut self, idx: usize, c: C64) {
        if self.values[idx] == ZERO {
            self.touched.push(idx);
        }
        self.values[idx] += c;
    }

    /// Max-abs entry, then reset.
    fn drain_max(&mut self) -> f64 {
        let mut worst = 0.0f64;
        for &i in &self.touched {
            worst = worst.max(self.values[i].norm());
            self.values[i] = ZERO;
        }
        self.touched.clear();
        worst
    }
}

fn max_abs(v: &[C64]) -> f64 {
    v.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

/// Residuals of associativity, unitality, the Frobenius equation, speciality
/// (`m m† = id`), symmetry (`ε m σ = ε m`), commutativity (`m σ = m`) and
/// standardness (left trace = right trace on the matrix units of `End(A)`).
pub fn check_algebra(alg: &FrobeniusAlgebra) -> AlgebraReport {
    let n = alg.dim();
    let mut acc = Accumulator::new(n);

    // (e_i e_j) e_k - e_i (e_j e_k)
    let mut assoc = 0.0f64;
    for i in 0..n {
        for j in 0..n {
            let ij = alg.product_of_basis(i, j);
            for k in 0..n {
                for &(l, c) in ij {
                    for &(t, d) in alg.product_of_basis(l, k) {
                        acc.add(t, c * d);
                    }
                }
                for &(l, c) in alg.product_of_basis(j, k) {
                    for &(t, d) in alg.product_of_basis(i, l) {
                        acc.add(t, -(c * d));
                    }
                }
                assoc = assoc.max(acc.drain_max());
            }
        }
    }

    let mut unital = 0.0f64;
    for j in 0..n {
        let e = alg.basis(j);
        let mut left = alg.multiply(alg.unit(), &e);
        let mut right = alg.multiply(&e, alg.unit());
        left[j] -= ONE;
        right[j] -= ONE;
        unital = unital.max(max_abs(&left)).max(max_abs(&right));
    }

    // (id ⊗ m)(δ ⊗ id) = δ m = (m ⊗ id)(id ⊗ δ), on e_i ⊗ e_j.
    let mut acc2 = Accumulator::new(n * n);
    let mut frobenius = 0.0f64;
    for i in 0..n {
        for j in 0..n {
            // middle: δ(e_i e_j)
            let middle: Vec<(usize, C64)> = {
                for &(k, c) in alg.product_of_basis(i, j) {
                    for &(a, b, d) in alg.coproduct_of_basis(k) {
                        acc2.add(a * n + b, c * d);
                    }
                }
                let items = acc2.touched.iter().map(|&t| (t, acc2.values[t])).collect();
                for &t in &acc2.touched {
                    acc2.values[t] = ZERO;
                }
                acc2.touched.clear();
                items
            };
            // left: Σ δ(e_i) = a ⊗ b, then a ⊗ (b e_j)
            for &(a, b, d) in alg.coproduct_of_basis(i) {
                for &(t, c) in alg.product_of_basis(b, j) {
                    acc2.add(a * n + t, d * c);
                }
            }
            for &(t, c) in &middle {
                acc2.add(t, -c);
            }
            frobenius = frobenius.max(acc2.drain_max());
            // right: δ(e_j) = a ⊗ b, then (e_i a) ⊗ b
            for &(a, b, d) in alg.coproduct_of_basis(j) {
                for &(t, c) in alg.product_of_basis(i, a) {
                    acc2.add(t * n + b, d * c);
                }
            }
            for &(t, c) in &middle {
                acc2.add(t, -c);
            }
            frobenius = frobenius.max(acc2.drain_max());
        }
    }

    let mut special = 0.0f64;
    for k in 0..n {
        for &(i, j, c) in alg.coproduct_of_basis(k) {
            for &(t, d) in alg.product_of_basis(i, j) {
                acc.add(t, c * d);
            }
        }
        acc.add(k, -ONE);
        special = special.max(acc.drain_max());
    }

    // Bilinear form Q_ij = ε(e_i e_j).
    let counit = alg.counit();
    let form = |i: usize, j: usize| -> C64 {
        alg.product_of_basis(i, j)
            .iter()
            .map(|&(k, c)| counit[k] * c)
            .sum()
    };
    let q = DenseMatrix::from_fn(n, n, form);
    let mut symmetric = 0.0f64;
    let mut commutative = 0.0f64;
    for i in 0..n {
        for j in 0..n {
            symmetric = symmetric.max((q[(i, j)] - q[(j, i)]).norm());
            if j > i {
                for &(k, c) in alg.product_of_basis(i, j) {
                    acc.add(k, c);
                }
                for &(k, c) in alg.product_of_basis(j, i) {
                    acc.add(k, -c);
                }
                commutative = commutative.max(acc.drain_max());
            }
        }
    }

    // Standardness on matrix units |a⟩⟨b|: left(a,b) = (Q Cᵀ)_ab, right(a,b) = (Qᵀ C)_ab,
    // with C the coefficient matrix of the Frobenius cup.
    let cup = alg.frobenius_cup();
    let cmat = DenseMatrix::from_fn(n, n, |i, j| cup[i * n + j]);
    let left = q.matmul(&cmat.transpose()).expect("square");
    let right = q.transpose().matmul(&cmat).expect("square");
    let standard = left.max_abs_diff(&right).expect("same shape");

    AlgebraReport {
        assoc,
        unital,
        frobenius,
        special,
        symmetric,
        commutative,
        standard,
    }
}

/// `B(H)` on the carrier `H ⊗ H`: `m = (1/√d) id ⊗ cap ⊗ id`, `u = √d cup`.
pub fn matrix_algebra(d: usize) -> Result<FrobeniusAlgebra> {
    if d == 0 {
        return Err(Error::ZeroDimension);
    }
    let n = d * d;
    let s = 1.0 / (d as f64).sqrt();
    let mut products = vec![Vec::new(); n * n];
    for a in 0..d {
        for b in 0..d {
            for e in 0..d {
                // |a b⟩ · |b e⟩ = (1/√d) |a e⟩
                products[(a * d + b) * n + (b * d + e)].push((a * d + e, C64::new(s, 0.0)));
            }
        }
    }
    let mut unit = vec![ZERO; n];
    for k in 0..d {
        unit[k * d + k] = C64::new((d as f64).sqrt(), 0.0);
    }
    Ok(FrobeniusAlgebra::from_products(n, products, unit)?
        .with_presentation(Presentation::standard(&[d]))?
        .with_label(format!("M{d}")))
}

/// The *-isomorphism `X ↦ √d (X ⊗ 1) Σ_i |i⟩⊗|i⟩` from `M_d` onto `matrix_algebra(d)`.
pub fn bh_iso(x: &DenseMatrix) -> Result<Vec<C64>> {
    if !x.is_square() {
        return Err(Error::NotSquare(x.rows(), x.cols()));
    }
    let s = (x.rows() as f64).sqrt();
    Ok(x.entries().iter().map(|&z| z * s).collect())
}

pub fn bh_iso_inverse(v: &[C64], d: usize) -> Result<DenseMatrix> {
    if v.len() != d * d {
        return Err(Error::DimensionMismatch {
            context: "bh_iso inverse",
            expected: d * d,
            found: v.len(),
        });
    }
    let s = 1.0 / (d as f64).sqrt();
    DenseMatrix::from_vec(d, d, v.iter().map(|&z| z * s).collect())
}

/// The `d² x d²` matrix of `bh_iso` acting on row-major vectorised operators.
pub fn bh_iso_matrix(d: usize) -> DenseMatrix {
    DenseMatrix::identity(d * d).scale_re((d as f64).sqrt())
}

/// `⊕ M_{n_i}` with blocks laid out in list order, each in `bh_iso`'s basis.
///
/// The counit is the special trace `Σ n_i Tr_i(p_i x)`.
pub fn multimatrix_algebra(blocks: &[usize]) -> Result<FrobeniusAlgebra> {
    if blocks.is_empty() {
        return Err(Error::EmptyBlocks);
    }
    if blocks.contains(&0) {
        return Err(Error::ZeroDimension);
    }
    let n: usize = blocks.iter().map(|b| b * b).sum();
    let mut products = vec![Vec::new(); n * n];
    let mut unit = vec![ZERO; n];
    let mut offset = 0;
    for &d in blocks {
        let block = matrix_algebra(d)?;
        let bn = d * d;
        for i in 0..bn {
            for j in 0..bn {
                products[(offset + i) * n + offset + j] = block
                    .product_of_basis(i, j)
                    .iter()
                    .map(|&(k, c)| (offset + k, c))
                    .collect();
            }
            unit[offset + i] = block.unit()[i];
        }
        offset += bn;
    }
    let label = format!(
        "{}",
        blocks
            .iter()
            .map(|b| format!("M{b}"))
            .collect::<Vec<_>>()
            .join("+")
    );
    Ok(FrobeniusAlgebra::from_products(n, products, unit)?
        .with_presentation(Presentation::standard(blocks))?
        .with_label(label))
}

/// The commutative algebra `C^k` (as `multimatrix_algebra([1; k])`).
pub fn commutative_algebra(k: usize) -> Result<FrobeniusAlgebra> {
    multimatrix_algebra(&vec![1; k])
}

/// Permutation taking the standard layout of `⊕_s M_{a_s} ⊗ ⊕_t M_{b_t}` to the
/// standard layout of `⊕_{(s,t)} M_{a_s b_t}` (pairs in lexicographic order).
fn product_block_permutation(a: &[usize], b: &[usize]) -> (Vec<usize>, DenseMatrix) {
    let na: usize = a.iter().map(|x| x * x).sum();
    let nb: usize = b.iter().map(|x| x * x).sum();
    let n = na * nb;
    let offsets = |blocks: &[usize]| {
        let mut o = Vec::with_capacity(blocks.len());
        let mut acc = 0;
        for &x in blocks {
            o.push(acc);
            acc += x * x;
        }
        o
    };
    let oa = offsets(a);
    let ob = offsets(b);
    let mut blocks = Vec::new();
    let mut perm = DenseMatrix::zeros(n, n);
    let mut out_offset = 0;
    for (s, &da) in a.iter().enumerate() {
        for (t, &db) in b.iter().enumerate() {
            let dd = da * db;
            blocks.push(dd);
            // |i j⟩ ⊗ |k l⟩ in M_a ⊗ M_b  ->  |(i,k) (j,l)⟩ in M_{ab}
            for i in 0..da {
                for j in 0..da {
                    for k in 0..db {
                        for l in 0..db {
                            let src = (oa[s] + i * da + j) * nb + ob[t] + k * db + l;
                            let row = (i * db + k) * dd + (j * db + l);
                            perm[(out_offset + row, src)] = ONE;
                        }
                    }
                }
            }
            out_offset += dd * dd;
        }
    }
    (blocks, perm)
}

/// Tensor product: `m = (m_A ⊗ m_B)(id ⊗ σ ⊗ id)`, `u = u_A ⊗ u_B`.
pub fn tensor_product(a: &FrobeniusAlgebra, b: &FrobeniusAlgebra) -> Result<FrobeniusAlgebra> {
    let (na, nb) = (a.dim(), b.dim());
    let n = na * nb;
    let mut products = vec![Vec::new(); n * n];
    for i1 in 0..na {
        for j1 in 0..na {
            let pa = a.product_of_basis(i1, j1);
            if pa.is_empty() {
                continue;
            }
            for i2 in 0..nb {
                for j2 in 0..nb {
                    let pb = b.product_of_basis(i2, j2);
                    if pb.is_empty() {
                        continue;
                    }
                    let slot = &mut products[(i1 * nb + i2) * n + (j1 * nb + j2)];
                    for &(k1, c1) in pa {
                        for &(k2, c2) in pb {
                            slot.push((k1 * nb + k2, c1 * c2));
                        }
                    }
                }
            }
        }
    }
    let unit = kron_vec(a.unit(), b.unit());
    let mut alg = FrobeniusAlgebra::from_products(n, products, unit)?
        .with_label(format!("({})⊗({})", a.label(), b.label()));
    if let (Some(pa), Some(pb)) = (a.presentation(), b.presentation()) {
        let (blocks, perm) = product_block_permutation(&pa.blocks, &pb.blocks);
        let to_standard = perm.matmul(&tensor(&pa.to_standard, &pb.to_standard))?;
        alg = alg.with_presentation(Presentation {
            blocks,
            to_standard,
        })?;
    }
    Ok(alg)
}

/// The dense multiplication of a tensor product, composed literally from
/// `m_A ⊗ m_B` and the middle swap.
pub fn tensor_product_mult_diagram(a: &FrobeniusAlgebra, b: &FrobeniusAlgebra) -> DenseMatrix {
    let (na, nb) = (a.dim(), b.dim());
    let middle = tensor(
        &tensor(&DenseMatrix::identity(na), &swap(nb, na)),
        &DenseMatrix::identity(nb),
    );
    tensor(&a.mult_matrix(), &b.mult_matrix())
        .matmul(&middle)
        .expect("shapes agree")
}

/// Residuals of the three *-homomorphism equations for `f: A -> B`:
/// `f m_A = m_B (f ⊗ f)`, `f u_A = u_B`, and involution preservation
/// `(id_A ⊗ f) cup_A = (f† ⊗ id_B) cup_B`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MorphismReport {
    pub multiplicative: f64,
    pub unit: f64,
    pub involutive: f64,
    pub unitary: bool,
}

impl MorphismReport {
    pub fn max(&self) -> f64 {
        self.multiplicative.max(self.unit).max(self.involutive)
    }

    pub fn holds(&self, tol: &Tolerance) -> bool {
        tol.accepts(self.max())
    }

    pub fn is_unitary_star_iso(&self, tol: &Tolerance) -> bool {
        self.unitary && self.holds(tol)
    }
}

fn check_map_shape(f: &DenseMatrix, a: &FrobeniusAlgebra, b: &FrobeniusAlgebra) -> Result<()> {
    if f.shape() != (b.dim(), a.dim()) {
        return Err(Error::ShapeMismatch {
            left: (b.dim(), a.dim()),
            right: f.shape(),
        });
    }
    Ok(())
}

fn columns(f: &DenseMatrix) -> Vec<Vec<C64>> {
    (0..f.cols()).map(|c| f.col(c)).collect()
}

/// Involution-compatibility residual `‖(id_A ⊗ f) cup_A − (f† ⊗ id_B) cup_B‖`.
fn involution_residual(f: &DenseMatrix, a: &FrobeniusAlgebra, b: &FrobeniusAlgebra) -> f64 {
    let (na, nb) = (a.dim(), b.dim());
    let mut out = vec![ZERO; na * nb];
    let cup_a = a.frobenius_cup();
    for i in 0..na {
        for j in 0..na {
            let c = cup_a[i * na + j];
            if c == ZERO {
                continue;
            }
            for k in 0..nb {
                out[i * nb + k] += c * f[(k, j)];
            }
        }
    }
    let cup_b = b.frobenius_cup();
    for k in 0..nb {
        for l in 0..nb {
            let c = cup_b[k * nb + l];
            if c == ZERO {
                continue;
            }
            // f† e_k has coordinates conj(f[k, i])
            for i in 0..na {
                out[i * nb + l] -= c * f[(k, i)].conj();
            }
        }
    }
    max_abs(&out)
}

fn unitary_flag(f: &DenseMatrix) -> bool {
    f.is_square() && f.is_unitary(&Tolerance::new(1e-9).expect("valid"))
}

pub fn check_star_homomorphism(
    f: &DenseMatrix,
    a: &FrobeniusAlgebra,
    b: &FrobeniusAlgebra,
) -> Result<MorphismReport> {
    check_map_shape(f, a, b)?;
    let cols = columns(f);
    let na = a.dim();
    let mut multiplicative = 0.0f64;
    for i in 0..na {
        for j in 0..na {
            let mut lhs = vec![ZERO; b.dim()];
            for &(k, c) in a.product_of_basis(i, j) {
                for (o, fk) in lhs.iter_mut().zip(&cols[k]) {
                    *o += c * fk;
                }
            }
            let rhs = b.multiply(&cols[i], &cols[j]);
            let r = lhs.iter().zip(&rhs).map(|(x, y)| (x - y).norm()).fold(0.0, f64::max);
            multiplicative = multiplicative.max(r);
        }
    }
    let fu = f.apply(a.unit())?;
    let unit = fu
        .iter()
        .zip(b.unit())
        .map(|(x, y)| (x - y).norm())
        .fold(0.0, f64::max);
    Ok(MorphismReport {
        multiplicative,
        unit,
        involutive: involution_residual(f, a, b),
        unitary: unitary_flag(f),
    })
}

/// Residuals of the three *-cohomomorphism equations for `f: A -> B`:
/// `(f ⊗ f) δ_A = δ_B f`, `ε_B f = ε_A`, and `(f ⊗ id_A) cup_A = (id_B ⊗ f†) cup_B`.
pub fn check_star_cohomomorphism(
    f: &DenseMatrix,
    a: &FrobeniusAlgebra,
    b: &FrobeniusAlgebra,
) -> Result<MorphismReport> {
    check_map_shape(f, a, b)?;
    let cols = columns(f);
    let (na, nb) = (a.dim(), b.dim());
    let mut multiplicative = 0.0f64;
    let mut out = vec![ZERO; nb * nb];
    for k in 0..na {
        out.iter_mut().for_each(|z| *z = ZERO);
        for &(i, j, c) in a.coproduct_of_basis(k) {
            for (p, &x) in cols[i].iter().enumerate() {
                if x == ZERO {
                    continue;
                }
                let cx = c * x;
                for (q, &y) in cols[j].iter().enumerate() {
                    out[p * nb + q] += cx * y;
                }
            }
        }
        let rhs = b.comultiply(&cols[k]);
        let r = out.iter().zip(&rhs).map(|(x, y)| (x - y).norm()).fold(0.0, f64::max);
        multiplicative = multiplicative.max(r);
    }
    let eps_b = b.counit();
    let unit = (0..na)
        .map(|k| {
            let lhs: C64 = eps_b.iter().zip(&cols[k]).map(|(e, x)| e * x).sum();
            (lhs - a.unit()[k].conj()).norm()
        })
        .fold(0.0, f64::max);
    // (f ⊗ id_A) cup_A − (id_B ⊗ f†) cup_B, a vector in B ⊗ A; the swap of the
    // *-homomorphism condition for f†.
    let fd = f.dagger();
    let involutive = {
        let mut v = vec![ZERO; nb * na];
        let cup_a = a.frobenius_cup();
        for i in 0..na {
            for j in 0..na {
                let c = cup_a[i * na + j];
                if c == ZERO {
                    continue;
                }
                for p in 0..nb {
                    v[p * na + j] += c * f[(p, i)];
                }
            }
        }
        let cup_b = b.frobenius_cup();
        for k in 0..nb {
            for l in 0..nb {
                let c = cup_b[k * nb + l];
                if c == ZERO {
                    continue;
                }
                for q in 0..na {
                    v[k * na + q] -= c * fd[(q, l)];
                }
            }
        }
        max_abs(&v)
    };
    Ok(MorphismReport {
        multiplicative,
        unit,
        involutive,
        unitary: unitary_flag(f),
    })
}

/// The maximally entangled state as an element of `M_d ⊗ M_d`:
/// `(1/d²) Σ_ij |i j⟩ ⊗ |i j⟩`, normalised so the raw counit gives 1.
pub fn max_entangled_element(d: usize) -> Result<Vec<C64>> {
    if d == 0 {
        return Err(Error::ZeroDimension);
    }
    let n = d * d;
    let mut v = vec![ZERO; n * n];
    let w = 1.0 / (n as f64);
    for i in 0..d {
        for j in 0..d {
            let k = i * d + j;
            v[k * n + k] = C64::new(w, 0.0);
        }
    }
    Ok(v)
}
