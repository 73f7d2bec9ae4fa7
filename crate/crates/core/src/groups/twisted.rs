use std::sync::Arc;

use super::{is_coboundary, Character, Cocycle2, FiniteAbelianGroup, ProjectiveRep, Subgroup};
use crate::error::{Error, Result};
use crate::frobenius::{FrobeniusAlgebra, Presentation};
use crate::linalg::{nullity, DenseMatrix, C64, ZERO};

/// A Frobenius algebra with an orthonormal basis graded by a finite abelian group.
///
/// Built by [`twisted_group_algebra`]: basis vector `p` is `ĝ` for the `p`-th
/// element `g` of the subgroup `L`, and `grading[p]` is its index in `G`.
#[derive(Debug, Clone)]
pub struct GradedAlgebra {
    algebra: Arc<FrobeniusAlgebra>,
    subgroup: Subgroup,
    cocycle: Cocycle2,
}

impl GradedAlgebra {
    pub fn algebra(&self) -> &Arc<FrobeniusAlgebra> {
        &self.algebra
    }

    pub fn dim(&self) -> usize {
        self.algebra.dim()
    }

    pub fn group(&self) -> &FiniteAbelianGroup {
        self.subgroup.group()
    }

    pub fn subgroup(&self) -> &Subgroup {
        &self.subgroup
    }

    /// The twisting cocycle, as a cocycle on the ambient group.
    pub fn cocycle(&self) -> &Cocycle2 {
        &self.cocycle
    }

    /// Degree (as a `G`-index) of each basis vector.
    pub fn grading(&self) -> &[usize] {
        self.subgroup.elements()
    }

    pub fn degree_of(&self, basis: usize) -> usize {
        self.subgroup.elements()[basis]
    }

    /// True if the cocycle restricted to `L` is identically 1.
    pub fn is_untwisted(&self) -> bool {
        let els = self.subgroup.elements();
        els.iter()
            .all(|&g| els.iter().all(|&h| (self.cocycle.value(g, h) - 1.0).norm() < 1e-12))
    }

    /// Replace the presentation by one built from a projective representation
    /// `ρ` of `L` whose cocycle matches this algebra's, with `deg(ρ)² = |L|`:
    /// `ĝ ↦ vec(ρ(g)) / √deg`.
    pub fn with_rep_presentation(self, rep: &ProjectiveRep) -> Result<Self> {
        if rep.group() != self.group() {
            return Err(Error::GroupMismatch);
        }
        let d = rep.degree();
        let n = self.dim();
        if d * d != n {
            return Err(Error::DimensionMismatch {
                context: "representation degree squared",
                expected: n,
                found: d * d,
            });
        }
        let els = self.subgroup.elements();
        let worst = els
            .iter()
            .flat_map(|&g| els.iter().map(move |&h| (g, h)))
            .map(|(g, h)| (rep.cocycle().value(g, h) - self.cocycle.value(g, h)).norm())
            .fold(0.0, f64::max);
        if worst > 1e-10 {
            return Err(Error::InvalidRepresentation(worst));
        }
        let s = 1.0 / (d as f64).sqrt();
        let mut to_standard = DenseMatrix::zeros(n, n);
        for (p, &g) in els.iter().enumerate() {
            for (k, z) in rep.matrix(g).entries().iter().enumerate() {
                to_standard[(k, p)] = z * s;
            }
        }
        let algebra = (*self.algebra).clone().with_presentation(Presentation {
            blocks: vec![d],
            to_standard,
        })?;
        Ok(GradedAlgebra {
            algebra: Arc::new(algebra),
            ..self
        })
    }
}

/// `A(L, φ)`: `m(ĝ ⊗ ĥ) = |L|^{-1/2} φ(g,h) (g+h)^`, `u = |L|^{1/2} conj φ(0,0) ê`.
///
/// When `φ|_L` is a coboundary the algebra is commutative and gets a presentation
/// through the characters of `L`.
pub fn twisted_group_algebra(l: &Subgroup, phi: &Cocycle2) -> Result<GradedAlgebra> {
    if l.group() != phi.group() {
        return Err(Error::GroupMismatch);
    }
    let report = phi.report();
    if report.cocycle_identity > 1e-10 {
        return Err(Error::InvalidCocycle(report.cocycle_identity));
    }
    let group = l.group();
    let els = l.elements();
    let n = els.len();
    let s = (n as f64).sqrt();
    let mut products = Vec::with_capacity(n * n);
    for &g in els {
        for &h in els {
            let k = l.position(group.add(g, h)).expect("subgroup is closed");
            products.push(vec![(k, phi.value(g, h) / s)]);
        }
    }
    let mut unit = vec![ZERO; n];
    unit[0] = phi.value(0, 0).conj() * s;
    let mut algebra = FrobeniusAlgebra::from_products(n, products, unit)?;

    let restricted = restrict(phi, l);
    if let Some(theta) = is_coboundary_on(&restricted, l) {
        // diag(θ) carries A(L, φ) onto A(L, 1); μ† then lands in C^{|L|}.
        let mu = fourier_matrix(l);
        let to_standard = mu.dagger().matmul(&DenseMatrix::diagonal(&theta))?;
        algebra = algebra.with_presentation(Presentation {
            blocks: vec![1; n],
            to_standard,
        })?;
    }
    let label = if phi.is_trivial(1e-12) { "A(L,1)" } else { "A(L,φ)" };
    Ok(GradedAlgebra {
        algebra: Arc::new(algebra.with_label(label)),
        subgroup: l.clone(),
        cocycle: phi.clone(),
    })
}

/// `φ|_L` as a table indexed by positions in `L`.
fn restrict(phi: &Cocycle2, l: &Subgroup) -> Vec<C64> {
    let els = l.elements();
    els.iter()
        .flat_map(|&g| els.iter().map(move |&h| phi.value(g, h)))
        .collect()
}

/// Trivialise a cocycle on `L`, given by its table over `L`'s positions, by
/// pulling it back to a cyclic decomposition of `L`.
fn is_coboundary_on(table: &[C64], l: &Subgroup) -> Option<Vec<C64>> {
    let n = l.order();
    let (iso_group, to_l) = cyclic_decomposition(l)?;
    let pos: Vec<usize> = to_l.iter().map(|&g| l.position(g).expect("in L")).collect();
    let pulled: Vec<C64> = (0..n * n)
        .map(|idx| table[pos[idx / n] * n + pos[idx % n]])
        .collect();
    let full = Cocycle2::new(iso_group, pulled).ok()?;
    let theta = is_coboundary(&full)?;
    let mut out = vec![ZERO; n];
    for (i, &p) in pos.iter().enumerate() {
        out[p] = theta[i];
    }
    Some(out)
}

/// An isomorphism `⊕ Z_{n_i} -> L`, returned as the image (in `G`-indices) of
/// every element of the decomposition, when a greedy choice of independent
/// cyclic generators succeeds.
fn cyclic_decomposition(l: &Subgroup) -> Option<(FiniteAbelianGroup, Vec<usize>)> {
    let g = l.group();
    let element_order = |x: usize| {
        let mut k = 1;
        let mut y = x;
        while y != 0 {
            y = g.add(y, x);
            k += 1;
        }
        k
    };
    // Greedy: repeatedly add the element of largest order whose cyclic group
    // meets the span so far only in 0.
    let mut gens: Vec<(usize, usize)> = Vec::new();
    let mut span = vec![0usize];
    while span.len() < l.order() {
        let mut best: Option<(usize, usize)> = None;
        for &x in l.elements() {
            let ord = element_order(x);
            let mut y = x;
            let mut independent = true;
            for _ in 1..ord {
                if span.contains(&y) {
                    independent = false;
                    break;
                }
                y = g.add(y, x);
            }
            if independent && best.map_or(true, |(_, o)| ord > o) {
                best = Some((x, ord));
            }
        }
        let (x, ord) = best?;
        let mut next = Vec::with_capacity(span.len() * ord);
        for &s in &span {
            let mut y = s;
            for _ in 0..ord {
                next.push(y);
                y = g.add(y, x);
            }
        }
        span = next;
        gens.push((x, ord));
    }
    let orders: Vec<usize> = gens.iter().map(|&(_, o)| o).collect();
    let group = FiniteAbelianGroup::new(orders).ok()?;
    let images = (0..group.order())
        .map(|i| {
            group
                .element(i)
                .iter()
                .zip(&gens)
                .fold(0, |acc, (&a, &(x, _))| (0..a).fold(acc, |y, _| g.add(y, x)))
        })
        .collect();
    Some((group, images))
}

/// `A(L, ψ̄ φ)`: same graded space, multiplication scaled by `conj ψ(g_i, g_j)`.
pub fn twist(alg: &GradedAlgebra, psi: &Cocycle2) -> Result<GradedAlgebra> {
    let phi = psi.conj().mul(alg.cocycle())?;
    twisted_group_algebra(alg.subgroup(), &phi)
}

/// `μ_{g,χ} = |L|^{-1/2} χ(g)`: factor-basis coordinates to graded-basis coordinates.
///
/// Columns follow the order of [`Subgroup::dual`].
pub fn fourier_matrix(l: &Subgroup) -> DenseMatrix {
    let duals = l.dual();
    let s = 1.0 / (l.order() as f64).sqrt();
    DenseMatrix::from_fn(l.order(), duals.len(), |g, chi| duals[chi].1[g] * s)
}

/// The factor basis `c_χ = |L|^{-1/2} Σ_g χ(g) ĝ` of an untwisted algebra, as columns.
pub fn factor_basis(alg: &GradedAlgebra) -> Result<DenseMatrix> {
    if !alg.is_untwisted() {
        return Err(Error::TwistedInput);
    }
    Ok(fourier_matrix(alg.subgroup()))
}

/// The action of `ξ ∈ G*` in the graded basis: `ĝ ↦ ξ(g) ĝ`. In the factor
/// basis this permutes `c_χ ↦ c_{ξ|_L χ}`.
pub fn character_action(xi: &Character, alg: &GradedAlgebra) -> DenseMatrix {
    let g = alg.group();
    let diag: Vec<C64> = alg.grading().iter().map(|&x| xi.value_at(g, x)).collect();
    DenseMatrix::diagonal(&diag)
}

/// `max_ξ ‖f D₁(ξ) − D₂(ξ) f‖` over generators `ξ` of `G*`.
pub fn is_covariant(f: &DenseMatrix, a1: &GradedAlgebra, a2: &GradedAlgebra) -> Result<f64> {
    check_graded_pair(f, a1, a2)?;
    let mut worst = 0.0f64;
    for xi in a1.group().dual_generators() {
        let lhs = f.matmul(&character_action(&xi, a1))?;
        let rhs = character_action(&xi, a2).matmul(f)?;
        worst = worst.max(lhs.max_abs_diff(&rhs)?);
    }
    Ok(worst)
}

/// Largest entry of `f` connecting basis vectors of different degree.
pub fn is_grading_preserving(f: &DenseMatrix, a1: &GradedAlgebra, a2: &GradedAlgebra) -> Result<f64> {
    check_graded_pair(f, a1, a2)?;
    let mut worst = 0.0f64;
    for (r, &gr) in a2.grading().iter().enumerate() {
        for (c, &gc) in a1.grading().iter().enumerate() {
            if gr != gc {
                worst = worst.max(f[(r, c)].norm());
            }
        }
    }
    Ok(worst)
}

fn check_graded_pair(f: &DenseMatrix, a1: &GradedAlgebra, a2: &GradedAlgebra) -> Result<()> {
    if a1.group() != a2.group() {
        return Err(Error::GroupMismatch);
    }
    if f.shape() != (a2.dim(), a1.dim()) {
        return Err(Error::ShapeMismatch {
            left: (a2.dim(), a1.dim()),
            right: f.shape(),
        });
    }
    Ok(())
}

/// Dimension of the centre, as the common kernel of `a ↦ a e_j − e_j a`.
pub fn center_dimension(alg: &FrobeniusAlgebra) -> usize {
    let n = alg.dim();
    let mut stacked = DenseMatrix::zeros(n * n, n);
    for j in 0..n {
        for i in 0..n {
            for &(k, c) in alg.product_of_basis(i, j) {
                stacked[(j * n + k, i)] += c;
            }
            for &(k, c) in alg.product_of_basis(j, i) {
                stacked[(j * n + k, i)] -= c;
            }
        }
    }
    nullity(&stacked, 1e-10)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::frobenius::{check_algebra, check_star_homomorphism, multimatrix_algebra};
    use crate::groups::{clock_shift_rep, weyl_cocycle};
    use crate::linalg::{Tolerance, ONE};

    fn whole(orders: &[usize]) -> Subgroup {
        Subgroup::whole(&FiniteAbelianGroup::new(orders.to_vec()).unwrap())
    }

    #[test]
    fn z2_algebra_is_c_plus_c() {
        let l = whole(&[2]);
        let a = twisted_group_algebra(&l, &Cocycle2::trivial(l.group())).unwrap();
        let p = a.algebra().presentation().unwrap().clone();
        assert_eq!(p.blocks, vec![1, 1]);
        let target = multimatrix_algebra(&[1, 1]).unwrap();
        let h = check_star_homomorphism(&p.to_standard, a.algebra(), &target).unwrap();
        assert!(h.is_unitary_star_iso(&Tolerance::default()), "{h:?}");
    }

    #[test]
    fn z2_fourier_matrix() {
        let mu = fourier_matrix(&whole(&[2]));
        let s = 1.0 / 2f64.sqrt();
        let expect = DenseMatrix::from_real_rows(&[vec![s, s], vec![s, -s]]).unwrap();
        assert!(mu.max_abs_diff(&expect).unwrap() < 1e-15);
    }

    #[test]
    fn z3_factor_idempotents() {
        let l = whole(&[3]);
        let a = twisted_group_algebra(&l, &Cocycle2::trivial(l.group())).unwrap();
        let c = factor_basis(&a).unwrap();
        let alg = a.algebra();
        let mut sum = vec![ZERO; 3];
        for i in 0..3 {
            for j in 0..3 {
                let p = alg.multiply(&c.col(i), &c.col(j));
                let expect: Vec<C64> = if i == j { c.col(i) } else { vec![ZERO; 3] };
                assert!(p.iter().zip(&expect).all(|(x, y)| (x - y).norm() < 1e-12));
            }
            for (s, x) in sum.iter_mut().zip(c.col(i)) {
                *s += x;
            }
        }
        assert!(sum.iter().zip(alg.unit()).all(|(x, y)| (x - y).norm() < 1e-12));
    }

    #[test]
    fn weyl_algebra_is_central_simple() {
        let psi = weyl_cocycle(2).unwrap();
        let l = Subgroup::whole(psi.group());
        let a = twisted_group_algebra(&l, &psi).unwrap();
        assert_eq!(a.dim(), 4);
        assert_eq!(center_dimension(a.algebra()), 1);
        assert!(a.algebra().presentation().is_none());
        let r = check_algebra(a.algebra());
        assert!(r.max_ssfa_residual() < 1e-12);
        assert!(r.commutative > 0.5);
        let norm: f64 = a.algebra().unit().iter().map(|z| z.norm_sqr()).sum();
        assert!((norm - 4.0).abs() < 1e-12);
    }

    #[test]
    fn rep_presentation_is_star_iso() {
        for d in [2, 3] {
            let rep = clock_shift_rep(d).unwrap();
            let l = Subgroup::whole(rep.group());
            let a = twisted_group_algebra(&l, rep.cocycle()).unwrap();
            let a = a.with_rep_presentation(&rep).unwrap();
            let p = a.algebra().presentation().unwrap();
            let target = multimatrix_algebra(&[d]).unwrap();
            let h = check_star_homomorphism(&p.to_standard, a.algebra(), &target).unwrap();
            assert!(h.is_unitary_star_iso(&Tolerance::default()), "{h:?}");
        }
    }

    #[test]
    fn subgroup_algebra_gets_presentation() {
        let g = FiniteAbelianGroup::new(vec![4, 2]).unwrap();
        let l = Subgroup::generated(&g, &[vec![2, 1]]).unwrap();
        let a = twisted_group_algebra(&l, &Cocycle2::trivial(&g)).unwrap();
        assert_eq!(a.dim(), 2);
        let p = a.algebra().presentation().unwrap();
        let target = multimatrix_algebra(&p.blocks).unwrap();
        let h = check_star_homomorphism(&p.to_standard, a.algebra(), &target).unwrap();
        assert!(h.holds(&Tolerance::default()));
    }

    #[test]
    fn coboundary_twist_presentation() {
        let g = FiniteAbelianGroup::new(vec![2, 2]).unwrap();
        let phi = [ONE, C64::new(0.0, 1.0), C64::from_polar(1.0, 0.4), C64::new(-1.0, 0.0)];
        let psi = Cocycle2::coboundary(&g, &phi).unwrap();
        let a = twisted_group_algebra(&Subgroup::whole(&g), &psi).unwrap();
        let p = a.algebra().presentation().unwrap();
        let target = multimatrix_algebra(&[1, 1, 1, 1]).unwrap();
        let h = check_star_homomorphism(&p.to_standard, a.algebra(), &target).unwrap();
        assert!(h.is_unitary_star_iso(&Tolerance::default()), "{h:?}");
    }

    #[test]
    fn character_action_permutes_factor_basis() {
        let l = whole(&[3]);
        let a = twisted_group_algebra(&l, &Cocycle2::trivial(l.group())).unwrap();
        let mu = factor_basis(&a).unwrap();
        let xi = &l.group().dual_group()[1];
        let p = mu.dagger().matmul(&character_action(xi, &a)).unwrap().matmul(&mu).unwrap();
        for c in 0..3 {
            let col = p.col(c);
            let ones = col.iter().filter(|z| (*z - ONE).norm() < 1e-12).count();
            let zeros = col.iter().filter(|z| z.norm() < 1e-12).count();
            assert_eq!((ones, zeros), (1, 2));
        }
    }

    #[test]
    fn swapping_two_factor_states_is_not_covariant() {
        let l = whole(&[3]);
        let a = twisted_group_algebra(&l, &Cocycle2::trivial(l.group())).unwrap();
        let mu = factor_basis(&a).unwrap();
        let perm = DenseMatrix::from_real_rows(&[
            vec![0., 1., 0.],
            vec![1., 0., 0.],
            vec![0., 0., 1.],
        ])
        .unwrap();
        let f = mu.matmul(&perm).unwrap().matmul(&mu.dagger()).unwrap();
        assert!(is_covariant(&f, &a, &a).unwrap() > 0.1);
        assert!(is_grading_preserving(&f, &a, &a).unwrap() > 0.1);
        let id = DenseMatrix::identity(3);
        assert_eq!(is_covariant(&id, &a, &a).unwrap(), 0.0);
    }

    #[test]
    fn twisted_input_has_no_factor_basis() {
        let psi = weyl_cocycle(2).unwrap();
        let a = twisted_group_algebra(&Subgroup::whole(psi.group()), &psi).unwrap();
        assert!(matches!(factor_basis(&a), Err(Error::TwistedInput)));
    }
}
