//! Finite abelian groups, their characters, cocycles, projective
//! representations and twisted group algebras.

mod cocycle;
mod rep;
mod twisted;

pub use cocycle::{check_cocycle, cohomologous, is_coboundary, weyl_cocycle, Cocycle2, CocycleReport};
pub use rep::{clock_shift_rep, ProjectiveRep};
pub use twisted::{
    center_dimension, character_action, factor_basis, fourier_matrix, is_covariant,
    is_grading_preserving, twist, twisted_group_algebra, GradedAlgebra,
};

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::C64;

/// `⊕ Z_{n_i}`. Elements are indexed in mixed radix, first factor most significant.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FiniteAbelianGroup {
    orders: Vec<usize>,
}

impl FiniteAbelianGroup {
    /// An empty list gives the trivial group.
    pub fn new(orders: Vec<usize>) -> Result<Self> {
        if orders.iter().any(|&n| n < 2) {
            return Err(Error::InvalidGroup(orders));
        }
        Ok(FiniteAbelianGroup { orders })
    }

    pub fn cyclic(n: usize) -> Result<Self> {
        Self::new(vec![n])
    }

    pub fn trivial() -> Self {
        FiniteAbelianGroup { orders: Vec::new() }
    }

    pub fn orders(&self) -> &[usize] {
        &self.orders
    }

    pub fn order(&self) -> usize {
        self.orders.iter().product()
    }

    pub fn rank(&self) -> usize {
        self.orders.len()
    }

    pub fn element(&self, mut idx: usize) -> Vec<usize> {
        let mut out = vec![0; self.orders.len()];
        for (slot, &n) in out.iter_mut().zip(&self.orders).rev() {
            *slot = idx % n;
            idx /= n;
        }
        out
    }

    pub fn index(&self, g: &[usize]) -> Result<usize> {
        if g.len() != self.orders.len() || g.iter().zip(&self.orders).any(|(a, n)| a >= n) {
            return Err(Error::NotInGroup(g.to_vec()));
        }
        Ok(g.iter().zip(&self.orders).fold(0, |acc, (a, n)| acc * n + a))
    }

    /// Index of `g` after reducing each coordinate mod its order.
    pub fn index_mod(&self, g: &[i64]) -> Result<usize> {
        if g.len() != self.orders.len() {
            return Err(Error::NotInGroup(g.iter().map(|&x| x as usize).collect()));
        }
        Ok(g.iter()
            .zip(&self.orders)
            .fold(0, |acc, (&a, &n)| acc * n + a.rem_euclid(n as i64) as usize))
    }

    pub fn add(&self, i: usize, j: usize) -> usize {
        let (a, b) = (self.element(i), self.element(j));
        a.iter()
            .zip(&b)
            .zip(&self.orders)
            .fold(0, |acc, ((x, y), n)| acc * n + (x + y) % n)
    }

    pub fn neg(&self, i: usize) -> usize {
        self.element(i)
            .iter()
            .zip(&self.orders)
            .fold(0, |acc, (x, n)| acc * n + (n - x) % n)
    }

    /// `table[i * |G| + j] = i + j`.
    pub fn addition_table(&self) -> Vec<usize> {
        let n = self.order();
        let mut t = Vec::with_capacity(n * n);
        for i in 0..n {
            for j in 0..n {
                t.push(self.add(i, j));
            }
        }
        t
    }

    pub fn generators(&self) -> Vec<usize> {
        (0..self.rank())
            .map(|i| {
                let mut g = vec![0; self.rank()];
                g[i] = 1;
                self.index(&g).expect("unit vector")
            })
            .collect()
    }

    /// `G*`, indexed like `G` through the exponent tuple.
    pub fn dual_group(&self) -> Vec<Character> {
        (0..self.order())
            .map(|k| Character {
                orders: self.orders.clone(),
                exponents: self.element(k),
            })
            .collect()
    }

    /// Characters whose exponent is a unit vector; they generate `G*`.
    pub fn dual_generators(&self) -> Vec<Character> {
        self.generators()
            .into_iter()
            .map(|k| Character {
                orders: self.orders.clone(),
                exponents: self.element(k),
            })
            .collect()
    }
}

pub fn dual_group(g: &FiniteAbelianGroup) -> Vec<Character> {
    g.dual_group()
}

/// `χ_k(g) = exp(2πi Σ k_i g_i / n_i)`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Character {
    orders: Vec<usize>,
    exponents: Vec<usize>,
}

impl Character {
    pub fn new(group: &FiniteAbelianGroup, exponents: Vec<usize>) -> Result<Self> {
        group.index(&exponents)?;
        Ok(Character {
            orders: group.orders().to_vec(),
            exponents,
        })
    }

    pub fn exponents(&self) -> &[usize] {
        &self.exponents
    }

    pub fn is_trivial(&self) -> bool {
        self.exponents.iter().all(|&k| k == 0)
    }

    pub fn value(&self, g: &[usize]) -> C64 {
        let l = self.orders.iter().fold(1, |acc, &n| lcm(acc, n));
        let k: usize = self
            .exponents
            .iter()
            .zip(g)
            .zip(&self.orders)
            .map(|((&k, &a), &n)| (k * a % n) * (l / n))
            .sum();
        root_of_unity(k, l)
    }

    pub fn value_at(&self, group: &FiniteAbelianGroup, idx: usize) -> C64 {
        self.value(&group.element(idx))
    }
}

/// A subgroup `L ≤ G`, stored as the sorted list of `G`-indices it contains.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Subgroup {
    group: FiniteAbelianGroup,
    elements: Vec<usize>,
}

impl Subgroup {
    /// The subgroup generated by `generators` (given as element tuples).
    pub fn generated(group: &FiniteAbelianGroup, generators: &[Vec<usize>]) -> Result<Self> {
        let gens = generators
            .iter()
            .map(|g| group.index(g))
            .collect::<Result<Vec<_>>>()?;
        let mut member = vec![false; group.order()];
        member[0] = true;
        let mut frontier = vec![0];
        while let Some(x) = frontier.pop() {
            for &g in &gens {
                let y = group.add(x, g);
                if !member[y] {
                    member[y] = true;
                    frontier.push(y);
                }
            }
        }
        Ok(Subgroup {
            group: group.clone(),
            elements: (0..group.order()).filter(|&i| member[i]).collect(),
        })
    }

    pub fn whole(group: &FiniteAbelianGroup) -> Self {
        Subgroup {
            group: group.clone(),
            elements: (0..group.order()).collect(),
        }
    }

    pub fn group(&self) -> &FiniteAbelianGroup {
        &self.group
    }

    pub fn elements(&self) -> &[usize] {
        &self.elements
    }

    pub fn order(&self) -> usize {
        self.elements.len()
    }

    pub fn position(&self, g: usize) -> Option<usize> {
        self.elements.binary_search(&g).ok()
    }

    pub fn contains(&self, g: usize) -> bool {
        self.position(g).is_some()
    }

    /// `L*` as value tables over `elements()`, with the index in `G*` of one
    /// character restricting to each. Ordered by first appearance in `G*`.
    pub fn dual(&self) -> Vec<(usize, Vec<C64>)> {
        let mut out: Vec<(usize, Vec<C64>)> = Vec::new();
        for (k, chi) in self.group.dual_group().iter().enumerate() {
            let values: Vec<C64> = self
                .elements
                .iter()
                .map(|&g| chi.value_at(&self.group, g))
                .collect();
            if !out.iter().any(|(_, v)| same_values(v, &values)) {
                out.push((k, values));
            }
        }
        out
    }

    /// The restriction homomorphism `G* -> L*`, as an index map into `dual()`.
    pub fn restriction(&self) -> Vec<usize> {
        let duals = self.dual();
        self.group
            .dual_group()
            .iter()
            .map(|chi| {
                let values: Vec<C64> = self
                    .elements
                    .iter()
                    .map(|&g| chi.value_at(&self.group, g))
                    .collect();
                duals
                    .iter()
                    .position(|(_, v)| same_values(v, &values))
                    .expect("restriction lands in L*")
            })
            .collect()
    }
}

/// `exp(2πi k / n)`, exact at multiples of a quarter turn.
pub fn root_of_unity(k: usize, n: usize) -> C64 {
    let k = k % n;
    if (4 * k) % n == 0 {
        return [C64::new(1.0, 0.0), C64::new(0.0, 1.0), C64::new(-1.0, 0.0), C64::new(0.0, -1.0)][4 * k / n];
    }
    C64::from_polar(1.0, 2.0 * PI * k as f64 / n as f64)
}

fn gcd(a: usize, b: usize) -> usize {
    if b == 0 { a } else { gcd(b, a % b) }
}

fn lcm(a: usize, b: usize) -> usize {
    a / gcd(a, b) * b
}

fn same_values(a: &[C64], b: &[C64]) -> bool {
    a.iter().zip(b).all(|(x, y)| (x - y).norm() < 1e-9)
}

pub fn restriction(l: &Subgroup) -> Vec<usize> {
    l.restriction()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn z2_dual() {
        let g = FiniteAbelianGroup::cyclic(2).unwrap();
        let d = g.dual_group();
        assert_eq!(d.len(), 2);
        assert!(d[0].is_trivial());
        assert!((d[1].value(&[1]) + 1.0).norm() < 1e-15);
    }

    #[test]
    fn dual_order_matches() {
        let g = FiniteAbelianGroup::new(vec![2, 3]).unwrap();
        assert_eq!(g.dual_group().len(), 6);
    }

    #[test]
    fn characters_are_homomorphisms() {
        let g = FiniteAbelianGroup::new(vec![3, 4]).unwrap();
        for chi in g.dual_group() {
            for a in 0..g.order() {
                for b in 0..g.order() {
                    let lhs = chi.value_at(&g, g.add(a, b));
                    let rhs = chi.value_at(&g, a) * chi.value_at(&g, b);
                    assert!((lhs - rhs).norm() < 1e-12);
                }
            }
        }
    }

    #[test]
    fn indexing_round_trips() {
        let g = FiniteAbelianGroup::new(vec![2, 3, 4]).unwrap();
        for i in 0..g.order() {
            assert_eq!(g.index(&g.element(i)).unwrap(), i);
            assert_eq!(g.add(i, g.neg(i)), 0);
        }
        assert_eq!(g.element(1), vec![0, 0, 1]);
        assert!(g.index(&[2, 0, 0]).is_err());
        assert!(FiniteAbelianGroup::new(vec![1]).is_err());
    }

    #[test]
    fn restriction_from_z4_to_z2() {
        let g = FiniteAbelianGroup::cyclic(4).unwrap();
        let l = Subgroup::generated(&g, &[vec![2]]).unwrap();
        assert_eq!(l.elements(), &[0, 2]);
        let r = l.restriction();
        let mut counts = vec![0; l.dual().len()];
        for &x in &r {
            counts[x] += 1;
        }
        assert_eq!(counts, vec![2, 2]);
    }

    #[test]
    fn bad_generator() {
        let g = FiniteAbelianGroup::cyclic(4).unwrap();
        assert!(matches!(Subgroup::generated(&g, &[vec![5]]), Err(Error::NotInGroup(_))));
    }
}
