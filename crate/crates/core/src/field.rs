//! `GF(p^k)` in a polynomial basis, plus the integer lift used by the
//! characteristic-two half-square map.
//!
//! Elements are coefficient vectors (ascending degree) over `Z_p`, so the
//! additive group is literally `Z_p^k` with the element's coefficients as
//! group coordinates.

use num_rational::Rational64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::group::{AbelianGroup, GroupElement, TorusElement};

pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    let mut d = 2;
    while d * d <= n {
        if n % d == 0 {
            return false;
        }
        d += 1;
    }
    true
}

/// `(p, k)` with `n = p^k`, or `None` when `n` is not a prime power.
pub fn prime_power(n: u64) -> Option<(u64, usize)> {
    if n < 2 {
        return None;
    }
    let p = (2..=n).find(|d| n % d == 0)?;
    let (mut m, mut k) = (n, 0);
    while m % p == 0 {
        m /= p;
        k += 1;
    }
    (m == 1).then_some((p, k))
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct FieldElement(pub Vec<u64>);

impl FieldElement {
    pub fn coeffs(&self) -> &[u64] {
        &self.0
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(|&c| c == 0)
    }

    pub fn to_group_element(&self) -> GroupElement {
        GroupElement(self.0.clone())
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "FieldSpec", into = "FieldSpec")]
pub struct FiniteField {
    p: u64,
    k: usize,
    h: Vec<u64>,
}

#[derive(Serialize, Deserialize)]
struct FieldSpec {
    p: u64,
    k: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    h: Option<Vec<u64>>,
}

impl TryFrom<FieldSpec> for FiniteField {
    type Error = Error;
    fn try_from(s: FieldSpec) -> Result<Self> {
        match s.h {
            Some(h) => FiniteField::new(s.p, s.k, h),
            None => FiniteField::with_default_modulus(s.p, s.k),
        }
    }
}

impl From<FiniteField> for FieldSpec {
    fn from(f: FiniteField) -> Self {
        FieldSpec { p: f.p, k: f.k, h: Some(f.h) }
    }
}

/// Remainder of `a` modulo `m` over `Z_p` (`m` monic).
fn poly_rem_mod_p(a: &[u64], m: &[u64], p: u64) -> Vec<u64> {
    let dm = m.len() - 1;
    let mut r = a.to_vec();
    for i in (dm..r.len()).rev() {
        let c = r[i] % p;
        if c != 0 {
            for (j, &mj) in m.iter().enumerate() {
                r[i - dm + j] = (r[i - dm + j] + (p - c) * mj) % p;
            }
        }
    }
    r.truncate(dm);
    r.iter().map(|c| c % p).collect()
}

fn monic_polys(p: u64, deg: usize) -> impl Iterator<Item = Vec<u64>> {
    let count = p.pow(deg as u32);
    (0..count).map(move |mut m| {
        let mut c = Vec::with_capacity(deg + 1);
        for _ in 0..deg {
            c.push(m % p);
            m /= p;
        }
        c.push(1);
        c
    })
}

/// Irreducibility over `Z_p` by trial division with monic polynomials of
/// degree up to `deg(h)/2`.
pub fn is_irreducible(h: &[u64], p: u64) -> bool {
    let k = h.len() - 1;
    (1..=k / 2).all(|d| monic_polys(p, d).all(|f| poly_rem_mod_p(h, &f, p).iter().any(|&c| c != 0)))
}

impl FiniteField {
    pub fn new(p: u64, k: usize, h: Vec<u64>) -> Result<Self> {
        if !is_prime(p) {
            return Err(Error::InvalidField(format!("{p} is not prime")));
        }
        if k == 0 {
            return Err(Error::InvalidField("degree must be positive".into()));
        }
        if h.len() != k + 1 || h[k] != 1 {
            return Err(Error::InvalidField(format!("modulus {h:?} is not monic of degree {k}")));
        }
        if h.iter().any(|&c| c >= p) {
            return Err(Error::InvalidField(format!("modulus {h:?} has coefficients outside Z_{p}")));
        }
        if !is_irreducible(&h, p) {
            return Err(Error::InvalidField(format!("modulus {h:?} is reducible over Z_{p}")));
        }
        Ok(Self { p, k, h })
    }

    /// Uses the smallest monic irreducible modulus, comparing coefficient
    /// lists from the highest degree down.
    pub fn with_default_modulus(p: u64, k: usize) -> Result<Self> {
        if !is_prime(p) {
            return Err(Error::InvalidField(format!("{p} is not prime")));
        }
        if k == 0 {
            return Err(Error::InvalidField("degree must be positive".into()));
        }
        let h = monic_polys(p, k)
            .find(|h| is_irreducible(h, p))
            .expect("an irreducible polynomial exists in every degree");
        Ok(Self { p, k, h })
    }

    /// `GF(n)` for a prime power `n` with the default modulus.
    pub fn of_order(n: u64) -> Result<Self> {
        let (p, k) = prime_power(n).ok_or(Error::NotPrimePower(n))?;
        Self::with_default_modulus(p, k)
    }

    pub fn p(&self) -> u64 {
        self.p
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn modulus(&self) -> &[u64] {
        &self.h
    }

    pub fn order(&self) -> usize {
        self.p.pow(self.k as u32) as usize
    }

    /// The additive group `Z_p^k`.
    pub fn additive_group(&self) -> AbelianGroup {
        AbelianGroup::new(vec![self.p; self.k]).expect("valid moduli")
    }

    pub fn element(&self, coeffs: Vec<u64>) -> Result<FieldElement> {
        if coeffs.len() != self.k {
            return Err(Error::DimensionMismatch { expected: self.k, got: coeffs.len() });
        }
        if coeffs.iter().any(|&c| c >= self.p) {
            return Err(Error::Domain(format!("coefficients {coeffs:?} outside Z_{}", self.p)));
        }
        Ok(FieldElement(coeffs))
    }

    /// Element whose base-`p` digits (least significant first) are the coefficients.
    pub fn from_int(&self, mut u: u64) -> FieldElement {
        let mut c = vec![0; self.k];
        for x in c.iter_mut() {
            *x = u % self.p;
            u /= self.p;
        }
        FieldElement(c)
    }

    pub fn zero(&self) -> FieldElement {
        FieldElement(vec![0; self.k])
    }

    pub fn one(&self) -> FieldElement {
        self.from_int(1)
    }

    /// Elements in the enumeration order of [`additive_group`](Self::additive_group).
    pub fn elements(&self) -> Vec<FieldElement> {
        self.additive_group().elements().map(|g| FieldElement(g.0)).collect()
    }

    pub fn index_of(&self, x: &FieldElement) -> usize {
        self.additive_group().index_of(&x.to_group_element())
    }

    pub fn add(&self, a: &FieldElement, b: &FieldElement) -> FieldElement {
        FieldElement(a.0.iter().zip(&b.0).map(|(x, y)| (x + y) % self.p).collect())
    }

    pub fn neg(&self, a: &FieldElement) -> FieldElement {
        FieldElement(a.0.iter().map(|x| (self.p - x) % self.p).collect())
    }

    pub fn sub(&self, a: &FieldElement, b: &FieldElement) -> FieldElement {
        self.add(a, &self.neg(b))
    }

    pub fn mul(&self, a: &FieldElement, b: &FieldElement) -> FieldElement {
        let mut prod = vec![0u64; 2 * self.k - 1];
        for (i, x) in a.0.iter().enumerate() {
            for (j, y) in b.0.iter().enumerate() {
                prod[i + j] = (prod[i + j] + x * y) % self.p;
            }
        }
        let mut r = poly_rem_mod_p(&prod, &self.h, self.p);
        r.resize(self.k, 0);
        FieldElement(r)
    }

    pub fn scalar(&self, c: u64, a: &FieldElement) -> FieldElement {
        FieldElement(a.0.iter().map(|x| x * (c % self.p) % self.p).collect())
    }

    pub fn pow(&self, a: &FieldElement, mut e: u64) -> FieldElement {
        let mut base = a.clone();
        let mut acc = self.one();
        while e > 0 {
            if e & 1 == 1 {
                acc = self.mul(&acc, &base);
            }
            base = self.mul(&base, &base);
            e >>= 1;
        }
        acc
    }

    pub fn inv(&self, a: &FieldElement) -> Result<FieldElement> {
        if a.is_zero() {
            return Err(Error::Domain("inverse of zero".into()));
        }
        Ok(self.pow(a, self.order() as u64 - 2))
    }

    /// `x²/2` for `x ∈ GF(2^k)`, as an element of `R_2^k`.
    ///
    /// `x` is lifted to a 0/1 integer polynomial, squared over the integers
    /// and reduced modulo `h` over the integers. The coefficients are then
    /// halved and reduced modulo 2, giving coordinates in `{0, 1/2, 1, 3/2}`.
    pub fn half_square(&self, x: &FieldElement) -> Result<TorusElement> {
        if self.p != 2 {
            return Err(Error::Domain(format!("half_square needs characteristic 2, got {}", self.p)));
        }
        let k = self.k;
        let mut sq = vec![0i64; 2 * k - 1];
        for (i, &a) in x.0.iter().enumerate() {
            for (j, &b) in x.0.iter().enumerate() {
                sq[i + j] += (a * b) as i64;
            }
        }
        for i in (k..sq.len()).rev() {
            let c = sq[i];
            if c != 0 {
                for (j, &hj) in self.h.iter().enumerate() {
                    sq[i - k + j] -= c * hj as i64;
                }
            }
        }
        sq.truncate(k);
        sq.resize(k, 0);
        Ok(TorusElement(
            sq.iter().map(|&c| Rational64::new(c.rem_euclid(4), 2)).collect(),
        ))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn prime_powers() {
        assert_eq!(prime_power(27), Some((3, 3)));
        assert_eq!(prime_power(16), Some((2, 4)));
        assert_eq!(prime_power(6), None);
        assert_eq!(prime_power(1), None);
    }

    #[test]
    fn gf3_and_gf4() {
        let f3 = FiniteField::of_order(3).unwrap();
        let two = f3.from_int(2);
        assert_eq!(f3.mul(&two, &two), f3.one());
        let f4 = FiniteField::of_order(4).unwrap();
        assert_eq!(f4.modulus(), &[1, 1, 1]);
        let x = f4.element(vec![0, 1]).unwrap();
        assert_eq!(f4.mul(&x, &x), f4.element(vec![1, 1]).unwrap());
    }

    #[test]
    fn default_moduli() {
        assert_eq!(FiniteField::of_order(8).unwrap().modulus(), &[1, 1, 0, 1]);
        assert_eq!(FiniteField::of_order(9).unwrap().modulus(), &[1, 0, 1]);
        assert_eq!(FiniteField::of_order(16).unwrap().modulus(), &[1, 1, 0, 0, 1]);
        assert!(FiniteField::new(2, 2, vec![1, 0, 1]).is_err());
        assert!(FiniteField::new(4, 1, vec![0, 1]).is_err());
    }

    #[test]
    fn inverses_in_gf8() {
        let f = FiniteField::of_order(8).unwrap();
        for a in f.elements().into_iter().filter(|a| !a.is_zero()) {
            assert_eq!(f.mul(&a, &f.inv(&a).unwrap()), f.one());
        }
        assert!(f.inv(&f.zero()).is_err());
    }

    #[test]
    fn frobenius_is_bijective_in_char_two() {
        for k in 1..=4 {
            let f = FiniteField::with_default_modulus(2, k).unwrap();
            let mut squares: Vec<FieldElement> =
                f.elements().iter().map(|x| f.mul(x, x)).collect();
            squares.sort();
            squares.dedup();
            assert_eq!(squares.len(), f.order());
        }
    }

    #[test]
    fn squaring_is_two_to_one_on_odd_prime_fields() {
        for p in [3u64, 5, 7, 11, 13] {
            let f = FiniteField::of_order(p).unwrap();
            let mut counts = std::collections::HashMap::new();
            for x in f.elements().iter().filter(|x| !x.is_zero()) {
                *counts.entry(f.mul(x, x)).or_insert(0) += 1;
            }
            assert!(counts.values().all(|&c| c == 2), "p={p}");
        }
    }

    #[test]
    fn half_square_values() {
        let f2 = FiniteField::of_order(2).unwrap();
        assert_eq!(f2.half_square(&f2.zero()).unwrap().0, vec![Rational64::new(0, 1)]);
        assert_eq!(f2.half_square(&f2.one()).unwrap().0, vec![Rational64::new(1, 2)]);
        assert!(FiniteField::of_order(3).unwrap().half_square(&f2.zero()).is_err());
        for k in 1..=4 {
            let f = FiniteField::with_default_modulus(2, k).unwrap();
            for x in f.elements() {
                let t = f.half_square(&x).unwrap();
                assert!(t.0.iter().all(|c| 2 % c.denom() == 0));
            }
        }
    }
}
