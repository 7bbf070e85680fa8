//! Finite Abelian groups `Z_{d₁} × … × Z_{d_m}`, their real-torus extensions
//! `R_{d₁} × … × R_{d_m}`, and characters.
//!
//! Groups keep the factor presentation they were built with. Elements are
//! enumerated in mixed radix with the first coordinate most significant.

use num_rational::Rational64;
use num_traits::{Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::flatmat::{lcm, CyclotomicInt, Phase};

#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "GroupSpec", into = "GroupSpec")]
pub struct AbelianGroup {
    moduli: Vec<u64>,
    order: usize,
}

#[derive(Serialize, Deserialize)]
struct GroupSpec {
    moduli: Vec<u64>,
}

impl TryFrom<GroupSpec> for AbelianGroup {
    type Error = Error;
    fn try_from(s: GroupSpec) -> Result<Self> {
        AbelianGroup::new(s.moduli)
    }
}

impl From<AbelianGroup> for GroupSpec {
    fn from(g: AbelianGroup) -> Self {
        GroupSpec { moduli: g.moduli }
    }
}

impl AbelianGroup {
    pub fn new(moduli: Vec<u64>) -> Result<Self> {
        if moduli.iter().any(|&d| d == 0) {
            return Err(Error::InvalidGroup(format!("modulus 0 in {moduli:?}")));
        }
        let order = moduli
            .iter()
            .try_fold(1usize, |acc, &d| acc.checked_mul(d as usize))
            .ok_or_else(|| Error::InvalidGroup("order overflows".into()))?;
        Ok(Self { moduli, order })
    }

    pub fn cyclic(n: u64) -> Self {
        Self::new(vec![n]).expect("cyclic group of order 0")
    }

    pub fn moduli(&self) -> &[u64] {
        &self.moduli
    }

    pub fn rank(&self) -> usize {
        self.moduli.len()
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn zero(&self) -> GroupElement {
        GroupElement(vec![0; self.rank()])
    }

    pub fn contains(&self, g: &GroupElement) -> bool {
        g.0.len() == self.rank() && g.0.iter().zip(&self.moduli).all(|(x, d)| x < d)
    }

    fn check(&self, g: &GroupElement) -> Result<()> {
        if g.0.len() != self.rank() {
            return Err(Error::DimensionMismatch { expected: self.rank(), got: g.0.len() });
        }
        if !self.contains(g) {
            return Err(Error::NotInGroup(g.0.clone()));
        }
        Ok(())
    }

    /// Reduces arbitrary integer coordinates into the group.
    pub fn element(&self, coords: &[i64]) -> Result<GroupElement> {
        if coords.len() != self.rank() {
            return Err(Error::DimensionMismatch { expected: self.rank(), got: coords.len() });
        }
        Ok(GroupElement(
            coords.iter().zip(&self.moduli).map(|(&x, &d)| x.rem_euclid(d as i64) as u64).collect(),
        ))
    }

    /// The element at position `idx` of the enumeration.
    pub fn element_at(&self, mut idx: usize) -> GroupElement {
        assert!(idx < self.order);
        let mut coords = vec![0u64; self.rank()];
        for (c, &d) in coords.iter_mut().zip(&self.moduli).rev() {
            *c = (idx % d as usize) as u64;
            idx /= d as usize;
        }
        GroupElement(coords)
    }

    /// Position of `g` in the enumeration.
    pub fn index_of(&self, g: &GroupElement) -> usize {
        g.0.iter().zip(&self.moduli).fold(0, |acc, (&x, &d)| acc * d as usize + x as usize)
    }

    pub fn elements(&self) -> impl Iterator<Item = GroupElement> + '_ {
        (0..self.order).map(move |i| self.element_at(i))
    }

    pub fn add(&self, g: &GroupElement, h: &GroupElement) -> Result<GroupElement> {
        self.check(g)?;
        self.check(h)?;
        Ok(self.add_unchecked(g, h))
    }

    pub(crate) fn add_unchecked(&self, g: &GroupElement, h: &GroupElement) -> GroupElement {
        GroupElement(
            g.0.iter().zip(&h.0).zip(&self.moduli).map(|((a, b), d)| (a + b) % d).collect(),
        )
    }

    pub fn neg(&self, g: &GroupElement) -> GroupElement {
        GroupElement(g.0.iter().zip(&self.moduli).map(|(&a, &d)| (d - a) % d).collect())
    }

    pub fn sub(&self, g: &GroupElement, h: &GroupElement) -> GroupElement {
        self.add_unchecked(g, &self.neg(h))
    }

    /// `k·g`.
    pub fn scalar(&self, k: i64, g: &GroupElement) -> GroupElement {
        GroupElement(
            g.0.iter()
                .zip(&self.moduli)
                .map(|(&a, &d)| (k * a as i64).rem_euclid(d as i64) as u64)
                .collect(),
        )
    }

    /// Index table `add[i][j] = index(elem_i + elem_j)`.
    pub fn addition_table(&self) -> Vec<Vec<usize>> {
        let elems: Vec<GroupElement> = self.elements().collect();
        elems
            .iter()
            .map(|g| elems.iter().map(|h| self.index_of(&self.add_unchecked(g, h))).collect())
            .collect()
    }

    /// Index table `neg[i] = index(-elem_i)`.
    pub fn negation_table(&self) -> Vec<usize> {
        self.elements().map(|g| self.index_of(&self.neg(&g))).collect()
    }

    pub fn torus_zero(&self) -> TorusElement {
        TorusElement(vec![Rational64::zero(); self.rank()])
    }

    /// Reduces rational coordinates into `[0, dᵢ)`.
    pub fn torus(&self, coords: &[Rational64]) -> Result<TorusElement> {
        if coords.len() != self.rank() {
            return Err(Error::DimensionMismatch { expected: self.rank(), got: coords.len() });
        }
        Ok(TorusElement(
            coords.iter().zip(&self.moduli).map(|(&x, &d)| reduce_mod(x, d)).collect(),
        ))
    }

    pub fn embed(&self, g: &GroupElement) -> TorusElement {
        TorusElement(g.0.iter().map(|&x| Rational64::from_integer(x as i64)).collect())
    }

    pub fn torus_add(&self, a: &TorusElement, b: &TorusElement) -> TorusElement {
        TorusElement(
            a.0.iter()
                .zip(&b.0)
                .zip(&self.moduli)
                .map(|((&x, &y), &d)| reduce_mod(x + y, d))
                .collect(),
        )
    }

    pub fn torus_sub(&self, a: &TorusElement, b: &TorusElement) -> TorusElement {
        TorusElement(
            a.0.iter()
                .zip(&b.0)
                .zip(&self.moduli)
                .map(|((&x, &y), &d)| reduce_mod(x - y, d))
                .collect(),
        )
    }

    /// Membership in `G̃*`: some coordinate is a non-zero integer.
    pub fn in_torus_star(&self, x: &TorusElement) -> bool {
        x.0.iter().zip(&self.moduli).any(|(&c, &d)| {
            let c = reduce_mod(c, d);
            c.is_integer() && !c.is_zero()
        })
    }

    /// Membership in `G* = G \ {0}` for a torus element.
    pub fn in_group_star(&self, x: &TorusElement) -> bool {
        x.is_integral() && !x.0.iter().all(Zero::is_zero)
    }
}

pub(crate) fn reduce_mod(x: Rational64, d: u64) -> Rational64 {
    let d = Rational64::from_integer(d as i64);
    let r = x - (x / d).floor() * d;
    if r.is_negative() {
        r + d
    } else {
        r
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct GroupElement(pub Vec<u64>);

impl GroupElement {
    pub fn coords(&self) -> &[u64] {
        &self.0
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(|&x| x == 0)
    }
}

/// Element of `G̃`; coordinates are kept reduced into `[0, dᵢ)`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct TorusElement(pub Vec<Rational64>);

impl TorusElement {
    pub fn coords(&self) -> &[Rational64] {
        &self.0
    }

    pub fn is_integral(&self) -> bool {
        self.0.iter().all(Rational64::is_integer)
    }

    /// The embedded group element when all coordinates are integers.
    pub fn to_group_element(&self) -> Option<GroupElement> {
        self.is_integral().then(|| GroupElement(self.0.iter().map(|c| *c.numer() as u64).collect()))
    }

    /// Least common denominator of the coordinates.
    pub fn denom_lcm(&self) -> u64 {
        self.0.iter().fold(1, |acc, c| lcm(acc, *c.denom() as u64))
    }
}

/// `Σⱼ aⱼbⱼ/dⱼ mod 1`, so that `χ_a(b) = exp(2πi·phase)`.
pub fn character(a: &TorusElement, b: &TorusElement, g: &AbelianGroup) -> Result<Phase> {
    for x in [a, b] {
        if x.0.len() != g.rank() {
            return Err(Error::DimensionMismatch { expected: g.rank(), got: x.0.len() });
        }
    }
    let sum = a
        .0
        .iter()
        .zip(&b.0)
        .zip(&g.moduli)
        .fold(Rational64::zero(), |acc, ((&x, &y), &d)| acc + x * y / Rational64::from_integer(d as i64));
    Ok(Phase::from_ratio(sum))
}

/// Character phase on group elements.
pub fn character_of(a: &GroupElement, b: &GroupElement, g: &AbelianGroup) -> Phase {
    let mut sum = Rational64::zero();
    for ((&x, &y), &d) in a.0.iter().zip(&b.0).zip(&g.moduli) {
        sum += Rational64::new(((x * y) % d) as i64, d as i64);
    }
    Phase::from_ratio(sum)
}

/// `Σ_{y∈G} χ_y(x)` as an exact cyclotomic integer.
pub fn character_sum(x: &TorusElement, g: &AbelianGroup) -> Result<CyclotomicInt> {
    let phases: Result<Vec<Phase>> =
        g.elements().map(|y| character(&g.embed(&y), x, g)).collect();
    let phases = phases?;
    let n = phases.iter().fold(1, |acc, p| lcm(acc, p.denom()));
    let mut z = CyclotomicInt::zero(n as usize);
    for p in &phases {
        z.add_root(p.exponent(n) as usize, 1);
    }
    Ok(z)
}

/// True iff `Σ_{y∈G} χ_y(x) = 0`, decided by exact cyclotomic arithmetic.
pub fn character_sum_is_zero(x: &TorusElement, g: &AbelianGroup) -> Result<bool> {
    Ok(character_sum(x, g)?.is_zero())
}

/// Every factor presentation (ordered factorisation into moduli ≥ 2) of
/// groups of order `n`.
pub fn presentations_of_order(n: u64) -> Vec<AbelianGroup> {
    fn rec(rest: u64, prefix: &mut Vec<u64>, out: &mut Vec<Vec<u64>>) {
        if rest == 1 {
            out.push(prefix.clone());
            return;
        }
        for d in 2..=rest {
            if rest % d == 0 {
                prefix.push(d);
                rec(rest / d, prefix, out);
                prefix.pop();
            }
        }
    }
    if n == 1 {
        return vec![AbelianGroup::new(vec![1]).unwrap()];
    }
    let mut out = Vec::new();
    rec(n, &mut Vec::new(), &mut out);
    out.into_iter().map(|m| AbelianGroup::new(m).unwrap()).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn r(n: i64, d: i64) -> Rational64 {
        Rational64::new(n, d)
    }

    #[test]
    fn addition() {
        let g = AbelianGroup::new(vec![2, 3]).unwrap();
        let a = GroupElement(vec![1, 2]);
        let b = GroupElement(vec![1, 1]);
        assert!(g.add(&a, &b).unwrap().is_zero());
        let z6 = AbelianGroup::cyclic(6);
        for x in z6.elements() {
            assert_eq!(z6.add(&x, &z6.zero()).unwrap(), x);
        }
        let z2 = AbelianGroup::cyclic(2);
        assert_eq!(z2.add(&GroupElement(vec![1]), &GroupElement(vec![1])).unwrap(), GroupElement(vec![0]));
        assert!(matches!(
            g.add(&a, &GroupElement(vec![1])),
            Err(Error::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn enumeration_is_bijective() {
        let g = AbelianGroup::new(vec![2, 3, 2]).unwrap();
        let elems: Vec<_> = g.elements().collect();
        assert_eq!(elems.len(), 12);
        for (i, e) in elems.iter().enumerate() {
            assert_eq!(g.index_of(e), i);
        }
        let mut sorted = elems.clone();
        sorted.dedup();
        assert_eq!(sorted.len(), 12);
        assert!(AbelianGroup::new(vec![3, 0]).is_err());
    }

    #[test]
    fn character_values() {
        let z2x3 = AbelianGroup::new(vec![2, 3]).unwrap();
        let a = z2x3.embed(&GroupElement(vec![1, 1]));
        let b = z2x3.embed(&GroupElement(vec![1, 2]));
        assert_eq!(character(&a, &b, &z2x3).unwrap(), Phase::new(1, 6));
        let zero = z2x3.torus_zero();
        assert_eq!(character(&zero, &b, &z2x3).unwrap(), Phase::zero());
        let z7 = AbelianGroup::cyclic(7);
        let x = z7.embed(&GroupElement(vec![3]));
        let y = z7.embed(&GroupElement(vec![5]));
        assert_eq!(character(&x, &y, &z7).unwrap(), Phase::new(15, 7));
    }

    #[test]
    fn character_sums_on_z2() {
        let z2 = AbelianGroup::cyclic(2);
        let t = |q| z2.torus(&[q]).unwrap();
        assert!(character_sum_is_zero(&t(r(1, 1)), &z2).unwrap());
        assert!(!character_sum_is_zero(&t(r(0, 1)), &z2).unwrap());
        assert!(!character_sum_is_zero(&t(r(1, 2)), &z2).unwrap());
        // 1 + i
        let s = character_sum(&t(r(1, 2)), &z2).unwrap();
        assert!((s.to_complex() - num_complex::Complex64::new(1.0, 1.0)).norm() < 1e-12);
    }

    #[test]
    fn torus_reduction() {
        let g = AbelianGroup::new(vec![2, 3]).unwrap();
        let x = g.torus(&[r(-1, 2), r(7, 2)]).unwrap();
        assert_eq!(x.0, vec![r(3, 2), r(1, 2)]);
        assert!(!g.in_torus_star(&x));
        let y = g.torus(&[r(1, 2), r(2, 1)]).unwrap();
        assert!(g.in_torus_star(&y));
        assert!(!g.in_group_star(&y));
        assert_eq!(g.torus(&[r(1, 1), r(3, 1)]).unwrap().to_group_element(), Some(GroupElement(vec![1, 0])));
    }

    #[test]
    fn presentations() {
        let p12: Vec<Vec<u64>> = presentations_of_order(12).iter().map(|g| g.moduli().to_vec()).collect();
        assert!(p12.contains(&vec![12]));
        assert!(p12.contains(&vec![2, 6]));
        assert!(p12.contains(&vec![3, 2, 2]));
        assert!(p12.iter().all(|m| m.iter().product::<u64>() == 12));
    }
}
