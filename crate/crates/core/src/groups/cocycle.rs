use serde::{Deserialize, Serialize};

use super::{root_of_unity, FiniteAbelianGroup};
use crate::error::{Error, Result};
use crate::linalg::{C64, ONE};

const UNIT_MODULUS_TOL: f64 = 1e-10;
const COCYCLE_TOL: f64 = 1e-10;
/// Residual below which a trivialising phase is accepted.
const COBOUNDARY_TOL: f64 = 1e-9;

/// A `U(1)`-valued 2-cocycle, stored as a full `|G| x |G|` table.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Cocycle2 {
    group: FiniteAbelianGroup,
    table: Vec<C64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CocycleReport {
    pub unit_modulus: f64,
    /// `max |ψ(g,h)ψ(g+h,k) − ψ(h,k)ψ(g,h+k)|`.
    pub cocycle_identity: f64,
}

/// Residuals of a raw table. Fails if an entry is far from the unit circle.
pub fn check_cocycle(group: &FiniteAbelianGroup, table: &[C64]) -> Result<CocycleReport> {
    let n = group.order();
    if table.len() != n * n {
        return Err(Error::DimensionMismatch {
            context: "cocycle table",
            expected: n * n,
            found: table.len(),
        });
    }
    let mut unit_modulus = 0.0f64;
    for (idx, z) in table.iter().enumerate() {
        let dev = (z.norm() - 1.0).abs();
        if !(dev <= UNIT_MODULUS_TOL) {
            return Err(Error::NotUnitModulus(idx / n, idx % n, z.norm()));
        }
        unit_modulus = unit_modulus.max(dev);
    }
    let add = group.addition_table();
    let mut cocycle_identity = 0.0f64;
    for g in 0..n {
        for h in 0..n {
            let gh = add[g * n + h];
            for k in 0..n {
                let lhs = table[g * n + h] * table[gh * n + k];
                let rhs = table[h * n + k] * table[g * n + add[h * n + k]];
                cocycle_identity = cocycle_identity.max((lhs - rhs).norm());
            }
        }
    }
    Ok(CocycleReport {
        unit_modulus,
        cocycle_identity,
    })
}

impl Cocycle2 {
    pub fn new(group: FiniteAbelianGroup, table: Vec<C64>) -> Result<Self> {
        let report = check_cocycle(&group, &table)?;
        if report.cocycle_identity > COCYCLE_TOL {
            return Err(Error::InvalidCocycle(report.cocycle_identity));
        }
        Ok(Cocycle2 { group, table })
    }

    pub fn trivial(group: &FiniteAbelianGroup) -> Self {
        let n = group.order();
        Cocycle2 {
            group: group.clone(),
            table: vec![ONE; n * n],
        }
    }

    /// `∂φ(g, h) = φ(g) φ(h) / φ(g + h)`.
    pub fn coboundary(group: &FiniteAbelianGroup, phi: &[C64]) -> Result<Self> {
        let n = group.order();
        if phi.len() != n {
            return Err(Error::DimensionMismatch {
                context: "coboundary phase",
                expected: n,
                found: phi.len(),
            });
        }
        if let Some((i, z)) = phi
            .iter()
            .enumerate()
            .find(|(_, z)| !((z.norm() - 1.0).abs() <= UNIT_MODULUS_TOL))
        {
            return Err(Error::NotUnitModulus(i, i, z.norm()));
        }
        let add = group.addition_table();
        let table = (0..n * n)
            .map(|idx| {
                let (g, h) = (idx / n, idx % n);
                phi[g] * phi[h] / phi[add[idx]]
            })
            .collect();
        Ok(Cocycle2 {
            group: group.clone(),
            table,
        })
    }

    pub fn group(&self) -> &FiniteAbelianGroup {
        &self.group
    }

    pub fn table(&self) -> &[C64] {
        &self.table
    }

    pub fn value(&self, g: usize, h: usize) -> C64 {
        self.table[g * self.group.order() + h]
    }

    pub fn conj(&self) -> Self {
        Cocycle2 {
            group: self.group.clone(),
            table: self.table.iter().map(|z| z.conj()).collect(),
        }
    }

    pub fn mul(&self, other: &Cocycle2) -> Result<Self> {
        if self.group != other.group {
            return Err(Error::GroupMismatch);
        }
        Ok(Cocycle2 {
            group: self.group.clone(),
            table: self.table.iter().zip(&other.table).map(|(a, b)| a * b).collect(),
        })
    }

    /// `ψ(g, h) · conj ψ(h, g)`; trivial exactly when the twisted algebra is commutative.
    pub fn alternating(&self, g: usize, h: usize) -> C64 {
        self.value(g, h) * self.value(h, g).conj()
    }

    pub fn symmetry_residual(&self) -> f64 {
        let n = self.group.order();
        let mut worst = 0.0f64;
        for g in 0..n {
            for h in (g + 1)..n {
                worst = worst.max((self.value(g, h) - self.value(h, g)).norm());
            }
        }
        worst
    }

    pub fn is_trivial(&self, tol: f64) -> bool {
        self.table.iter().all(|z| (z - ONE).norm() <= tol)
    }

    pub fn report(&self) -> CocycleReport {
        check_cocycle(&self.group, &self.table).expect("validated on construction")
    }

    /// `max |∂φ − ψ|` for a candidate trivialising phase.
    pub fn coboundary_residual(&self, phi: &[C64]) -> f64 {
        let n = self.group.order();
        let add = self.group.addition_table();
        (0..n * n)
            .map(|idx| {
                let (g, h) = (idx / n, idx % n);
                (phi[g] * phi[h] / phi[add[idx]] - self.table[idx]).norm()
            })
            .fold(0.0, f64::max)
    }
}

/// `ψ((a₁,a₂),(b₁,b₂)) = ω^{a₂ b₁}` on `Z_d × Z_d`, `ω = e^{2πi/d}`.
pub fn weyl_cocycle(d: usize) -> Result<Cocycle2> {
    let group = FiniteAbelianGroup::new(vec![d, d])?;
    let n = group.order();
    let mut table = Vec::with_capacity(n * n);
    for g in 0..n {
        let a = group.element(g);
        for h in 0..n {
            let b = group.element(h);
            let e = (a[1] * b[0]) % d;
            table.push(root_of_unity(e, d));
        }
    }
    Ok(Cocycle2 { group, table })
}

/// A phase `φ` with `∂φ = ψ`, if one exists.
///
/// On an abelian group a cocycle is a coboundary exactly when it is symmetric.
/// In that case the central extension it defines is abelian and splits; a
/// splitting `g ↦ (λ(g), g)` is built generator by generator and `φ = 1/λ`.
pub fn is_coboundary(psi: &Cocycle2) -> Option<Vec<C64>> {
    if psi.symmetry_residual() > COBOUNDARY_TOL {
        return None;
    }
    let group = psi.group();
    let n = group.order();
    let c0 = psi.value(0, 0);
    // Normalised cocycle ψ / ψ(0,0), so (1, 0) is the identity of the extension.
    let norm = |g: usize, h: usize| psi.value(g, h) / c0;

    let gens = group.generators();
    let mut lifts = Vec::with_capacity(gens.len());
    for (&e, &order) in gens.iter().zip(group.orders()) {
        // (1, e)^order = (c, 0)
        let mut acc = ONE;
        let mut pos = 0;
        for _ in 0..order {
            acc *= norm(pos, e);
            pos = group.add(pos, e);
        }
        let t = C64::from_polar(1.0, -acc.arg() / order as f64);
        lifts.push((t, e));
    }

    let mut lambda = vec![ONE; n];
    for (g, slot) in lambda.iter_mut().enumerate() {
        let coords = group.element(g);
        let (mut val, mut pos) = (ONE, 0);
        for (&a, &(t, e)) in coords.iter().zip(&lifts) {
            for _ in 0..a {
                val *= t * norm(pos, e);
                pos = group.add(pos, e);
            }
        }
        *slot = val;
    }
    let phi: Vec<C64> = lambda.iter().map(|l| c0 / l).collect();
    (psi.coboundary_residual(&phi) <= COBOUNDARY_TOL).then_some(phi)
}

/// `φ` with `ψ₁ = ψ₂ · ∂φ`, if the two are cohomologous.
pub fn cohomologous(psi1: &Cocycle2, psi2: &Cocycle2) -> Result<Option<Vec<C64>>> {
    Ok(is_coboundary(&psi1.mul(&psi2.conj())?))
}
