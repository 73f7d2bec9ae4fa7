use super::{root_of_unity, weyl_cocycle, Cocycle2, FiniteAbelianGroup};
use crate::error::{Error, Result};
use crate::linalg::{nullity, DenseMatrix, Tolerance, C64, ONE};

const REP_TOL: f64 = 1e-10;

/// Unitaries `π(g)` with `π(g) π(h) = ψ(g, h) π(g + h)`.
#[derive(Debug, Clone, PartialEq)]
pub struct ProjectiveRep {
    cocycle: Cocycle2,
    degree: usize,
    matrices: Vec<DenseMatrix>,
}

impl ProjectiveRep {
    pub fn new(cocycle: Cocycle2, matrices: Vec<DenseMatrix>) -> Result<Self> {
        let n = cocycle.group().order();
        if matrices.len() != n {
            return Err(Error::DimensionMismatch {
                context: "representation matrices",
                expected: n,
                found: matrices.len(),
            });
        }
        let degree = matrices[0].rows();
        if degree == 0 {
            return Err(Error::ZeroDimension);
        }
        for m in &matrices {
            if m.shape() != (degree, degree) {
                return Err(Error::ShapeMismatch {
                    left: (degree, degree),
                    right: m.shape(),
                });
            }
        }
        let rep = ProjectiveRep {
            cocycle,
            degree,
            matrices,
        };
        let r = rep.residual();
        if r > REP_TOL {
            return Err(Error::InvalidRepresentation(r));
        }
        Ok(rep)
    }

    /// The degree-1 representation `g ↦ 1` of the trivial cocycle.
    pub fn trivial(group: &FiniteAbelianGroup) -> Self {
        ProjectiveRep {
            cocycle: Cocycle2::trivial(group),
            degree: 1,
            matrices: vec![DenseMatrix::scalar(ONE); group.order()],
        }
    }

    pub fn cocycle(&self) -> &Cocycle2 {
        &self.cocycle
    }

    pub fn group(&self) -> &FiniteAbelianGroup {
        self.cocycle.group()
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn matrix(&self, g: usize) -> &DenseMatrix {
        &self.matrices[g]
    }

    pub fn matrices(&self) -> &[DenseMatrix] {
        &self.matrices
    }

    /// Entrywise conjugate, a representation of the conjugate cocycle.
    pub fn conj(&self) -> Self {
        ProjectiveRep {
            cocycle: self.cocycle.conj(),
            degree: self.degree,
            matrices: self.matrices.iter().map(|m| m.conj()).collect(),
        }
    }

    /// Worst of the unitarity defects and `‖π(g)π(h) − ψ(g,h)π(g+h)‖`.
    pub fn residual(&self) -> f64 {
        let group = self.group();
        let n = group.order();
        let eye = DenseMatrix::identity(self.degree);
        let mut worst = 0.0f64;
        for g in 0..n {
            let pg = &self.matrices[g];
            let gram = pg.dagger().matmul(pg).expect("square");
            worst = worst.max(gram.max_abs_diff(&eye).expect("square"));
            for h in 0..n {
                let lhs = pg.matmul(&self.matrices[h]).expect("square");
                let rhs = self.matrices[group.add(g, h)].scale(self.cocycle.value(g, h));
                worst = worst.max(lhs.max_abs_diff(&rhs).expect("square"));
            }
        }
        worst
    }

    /// Dimension of the commutant `{X : π(g) X = X π(g) ∀g}`.
    pub fn commutant_dimension(&self) -> usize {
        let d = self.degree;
        let eye = DenseMatrix::identity(d);
        let mut stacked = DenseMatrix::zeros(self.matrices.len() * d * d, d * d);
        for (k, p) in self.matrices.iter().enumerate() {
            // vec(P X − X P) = (P ⊗ I − I ⊗ Pᵀ) vec(X) in row-major vectorisation
            let op = &crate::linalg::tensor(p, &eye) - &crate::linalg::tensor(&eye, &p.transpose());
            for r in 0..d * d {
                for c in 0..d * d {
                    stacked[(k * d * d + r, c)] = op[(r, c)];
                }
            }
        }
        nullity(&stacked, 1e-10)
    }

    pub fn is_irreducible(&self) -> bool {
        self.commutant_dimension() == 1
    }

    pub fn is_unitary(&self, tol: &Tolerance) -> bool {
        self.matrices.iter().all(|m| m.is_unitary(tol))
    }
}

/// `π(a₁, a₂) = X^{a₁} Z^{a₂}` on `C^d`, with `X|j⟩ = |j+1⟩` and `Z = diag(ω^j)`.
pub fn clock_shift_rep(d: usize) -> Result<ProjectiveRep> {
    let cocycle = weyl_cocycle(d)?;
    let group = cocycle.group().clone();
    let matrices = (0..group.order())
        .map(|g| {
            let a = group.element(g);
            // X^{a₁} Z^{a₂} |j⟩ = ω^{a₂ j} |j + a₁⟩
            DenseMatrix::from_fn(d, d, |r, c| {
                if r == (c + a[0]) % d {
                    root_of_unity(a[1] * c, d)
                } else {
                    C64::new(0.0, 0.0)
                }
            })
        })
        .collect();
    ProjectiveRep::new(cocycle, matrices)
}
