//! Exact arithmetic in cyclotomic rings.
//!
//! An element of order `N` is stored as a coefficient vector of length `N`
//! over the powers `1, ζ, ζ², …, ζ^{N-1}` with `ζ = exp(2πi/N)`. This
//! representation is redundant: the value is zero exactly when the
//! coefficient polynomial is divisible by the cyclotomic polynomial `Φ_N`.
//! Reduction modulo `Φ_N` gives the canonical form used for equality and
//! zero tests.
//!
//! Two coefficient types are provided. [`CyclotomicInt`] holds machine
//! integers and backs the hot inner-product kernels; [`Cyclo`] holds exact
//! rationals and is the scalar type of the exact backend.

use std::collections::HashMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::sync::{Arc, Mutex, OnceLock};

use num_bigint::BigInt;
use num_complex::Complex64;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

fn phi_cache() -> &'static Mutex<HashMap<usize, Arc<Vec<i64>>>> {
    static CACHE: OnceLock<Mutex<HashMap<usize, Arc<Vec<i64>>>>> = OnceLock::new();
    CACHE.get_or_init(|| Mutex::new(HashMap::new()))
}

/// The `n`-th cyclotomic polynomial, coefficients in ascending degree order.
///
/// Obtained by exact division of `x^n - 1` by `Φ_d` for every proper divisor
/// `d` of `n`.
pub fn cyclotomic_polynomial(n: usize) -> Arc<Vec<i64>> {
    assert!(n >= 1, "cyclotomic polynomial of order 0");
    if let Some(p) = phi_cache().lock().unwrap().get(&n) {
        return Arc::clone(p);
    }
    let mut num = vec![0i64; n + 1];
    num[0] = -1;
    num[n] = 1;
    for d in 1..n {
        if n % d == 0 {
            let div = cyclotomic_polynomial(d);
            num = exact_div_monic(&num, &div);
        }
    }
    let arc = Arc::new(num);
    phi_cache().lock().unwrap().insert(n, Arc::clone(&arc));
    arc
}

fn exact_div_monic(num: &[i64], den: &[i64]) -> Vec<i64> {
    let dn = den.len() - 1;
    let mut rem = num.to_vec();
    let qlen = num.len() - dn;
    let mut quot = vec![0i64; qlen];
    for i in (0..qlen).rev() {
        let c = rem[i + dn];
        quot[i] = c;
        if c != 0 {
            for (j, &dj) in den.iter().enumerate() {
                rem[i + j] -= c * dj;
            }
        }
    }
    debug_assert!(rem.iter().all(|&r| r == 0), "inexact cyclotomic division");
    quot
}

/// Euler's totient, i.e. the degree of `Φ_n`.
pub fn totient(n: usize) -> usize {
    cyclotomic_polynomial(n).len() - 1
}

pub fn lcm(a: u64, b: u64) -> u64 {
    a.lcm(&b)
}

fn lift_index(j: usize, from: usize, to: usize) -> usize {
    j * (to / from)
}

/// Integer combination `Σ coeffs[j]·ζ_N^j`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct CyclotomicInt {
    order: usize,
    coeffs: Vec<i64>,
}

impl CyclotomicInt {
    pub fn zero(order: usize) -> Self {
        assert!(order >= 1);
        Self { order, coeffs: vec![0; order] }
    }

    pub fn from_coeffs(coeffs: Vec<i64>) -> Self {
        assert!(!coeffs.is_empty());
        Self { order: coeffs.len(), coeffs }
    }

    /// `ζ_N^exp`.
    pub fn root(order: usize, exp: u64) -> Self {
        let mut z = Self::zero(order);
        z.coeffs[(exp % order as u64) as usize] = 1;
        z
    }

    pub fn constant(order: usize, c: i64) -> Self {
        let mut z = Self::zero(order);
        z.coeffs[0] = c;
        z
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn coeffs(&self) -> &[i64] {
        &self.coeffs
    }

    /// Adds `c·ζ^exp` in place.
    pub fn add_root(&mut self, exp: usize, c: i64) {
        self.coeffs[exp % self.order] += c;
    }

    pub fn lift(&self, order: usize) -> Self {
        if order == self.order {
            return self.clone();
        }
        assert!(order % self.order == 0, "cannot lift order {} to {}", self.order, order);
        let mut z = Self::zero(order);
        for (j, &c) in self.coeffs.iter().enumerate() {
            z.coeffs[lift_index(j, self.order, order)] = c;
        }
        z
    }

    /// Complex conjugate: `ζ^j ↦ ζ^{-j}`.
    pub fn conj(&self) -> Self {
        let n = self.order;
        let mut z = Self::zero(n);
        for (j, &c) in self.coeffs.iter().enumerate() {
            z.coeffs[(n - j) % n] = c;
        }
        z
    }

    pub fn norm_sq(&self) -> Self {
        self * &self.conj()
    }

    pub fn pow(&self, k: u32) -> Self {
        let mut acc = Self::constant(self.order, 1);
        for _ in 0..k {
            acc = &acc * self;
        }
        acc
    }

    /// Remainder modulo `Φ_N`: the canonical power-basis coordinates.
    pub fn reduce(&self) -> Vec<i64> {
        let phi = cyclotomic_polynomial(self.order);
        let deg = phi.len() - 1;
        let mut a: Vec<i128> = self.coeffs.iter().map(|&c| c as i128).collect();
        for i in (deg..a.len()).rev() {
            let c = a[i];
            if c != 0 {
                for (j, &pj) in phi.iter().enumerate() {
                    a[i - deg + j] -= c * pj as i128;
                }
            }
        }
        a.truncate(deg);
        a.into_iter()
            .map(|c| i64::try_from(c).expect("cyclotomic coefficient overflow"))
            .collect()
    }

    /// Exact zero test by divisibility by `Φ_N`.
    pub fn is_zero(&self) -> bool {
        if self.coeffs.iter().all(|&c| c == 0) {
            return true;
        }
        self.reduce().iter().all(|&c| c == 0)
    }

    /// The value as an integer, if it is one.
    pub fn as_integer(&self) -> Option<i64> {
        let r = self.reduce();
        if r.iter().skip(1).all(|&c| c == 0) {
            Some(r.first().copied().unwrap_or(0))
        } else {
            None
        }
    }

    pub fn to_complex(&self) -> Complex64 {
        eval_complex(self.order, self.coeffs.iter().map(|&c| c as f64))
    }
}

fn eval_complex(order: usize, coeffs: impl Iterator<Item = f64>) -> Complex64 {
    let mut acc = Complex64::new(0.0, 0.0);
    for (j, c) in coeffs.enumerate() {
        if c != 0.0 {
            let theta = 2.0 * std::f64::consts::PI * j as f64 / order as f64;
            acc += Complex64::from_polar(c, theta);
        }
    }
    acc
}

fn binary_int(a: &CyclotomicInt, b: &CyclotomicInt, f: impl Fn(i64, i64) -> i64) -> CyclotomicInt {
    let n = lcm(a.order as u64, b.order as u64) as usize;
    let (a, b) = (a.lift(n), b.lift(n));
    CyclotomicInt {
        order: n,
        coeffs: a.coeffs.iter().zip(&b.coeffs).map(|(&x, &y)| f(x, y)).collect(),
    }
}

impl Add for &CyclotomicInt {
    type Output = CyclotomicInt;
    fn add(self, rhs: Self) -> CyclotomicInt {
        binary_int(self, rhs, |x, y| x + y)
    }
}

impl Sub for &CyclotomicInt {
    type Output = CyclotomicInt;
    fn sub(self, rhs: Self) -> CyclotomicInt {
        binary_int(self, rhs, |x, y| x - y)
    }
}

impl Mul for &CyclotomicInt {
    type Output = CyclotomicInt;
    fn mul(self, rhs: Self) -> CyclotomicInt {
        let n = lcm(self.order as u64, rhs.order as u64) as usize;
        let (a, b) = (self.lift(n), rhs.lift(n));
        let mut out = vec![0i64; n];
        for (i, &x) in a.coeffs.iter().enumerate() {
            if x == 0 {
                continue;
            }
            for (j, &y) in b.coeffs.iter().enumerate() {
                if y != 0 {
                    out[(i + j) % n] += x * y;
                }
            }
        }
        CyclotomicInt { order: n, coeffs: out }
    }
}

/// Exact element of `Q(ζ_N)` with rational coefficients.
#[derive(Clone, Debug)]
pub struct Cyclo {
    order: usize,
    coeffs: Vec<BigRational>,
}

impl Cyclo {
    pub fn zero() -> Self {
        Self { order: 1, coeffs: vec![BigRational::zero()] }
    }

    pub fn one() -> Self {
        Self::from_rational(BigRational::one())
    }

    pub fn from_rational(q: BigRational) -> Self {
        Self { order: 1, coeffs: vec![q] }
    }

    pub fn from_int(z: &CyclotomicInt) -> Self {
        Self::from_scaled_int(z, &BigRational::one())
    }

    /// `scale · z`.
    pub fn from_scaled_int(z: &CyclotomicInt, scale: &BigRational) -> Self {
        Self {
            order: z.order,
            coeffs: z
                .coeffs
                .iter()
                .map(|&c| scale * BigRational::from_integer(BigInt::from(c)))
                .collect(),
        }
    }

    /// `ζ_N^exp`.
    pub fn root(order: usize, exp: u64) -> Self {
        Self::from_int(&CyclotomicInt::root(order, exp))
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn lift(&self, order: usize) -> Self {
        if order == self.order {
            return self.clone();
        }
        assert!(order % self.order == 0);
        let mut coeffs = vec![BigRational::zero(); order];
        for (j, c) in self.coeffs.iter().enumerate() {
            coeffs[lift_index(j, self.order, order)] = c.clone();
        }
        Self { order, coeffs }
    }

    pub fn conj(&self) -> Self {
        let n = self.order;
        let mut coeffs = vec![BigRational::zero(); n];
        for (j, c) in self.coeffs.iter().enumerate() {
            coeffs[(n - j) % n] = c.clone();
        }
        Self { order: n, coeffs }
    }

    pub fn scale(&self, q: &BigRational) -> Self {
        Self { order: self.order, coeffs: self.coeffs.iter().map(|c| c * q).collect() }
    }

    pub fn pow(&self, k: u32) -> Self {
        let mut acc = Self::one();
        for _ in 0..k {
            acc = &acc * self;
        }
        acc
    }

    /// Canonical coordinates modulo `Φ_N`.
    pub fn reduce(&self) -> Vec<BigRational> {
        let phi = cyclotomic_polynomial(self.order);
        let deg = phi.len() - 1;
        let mut a = self.coeffs.clone();
        for i in (deg..a.len()).rev() {
            if !a[i].is_zero() {
                let c = a[i].clone();
                for (j, &pj) in phi.iter().enumerate() {
                    if pj != 0 {
                        a[i - deg + j] -= &c * BigRational::from_integer(BigInt::from(pj));
                    }
                }
            }
        }
        a.truncate(deg);
        a
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(Zero::is_zero) || self.reduce().iter().all(Zero::is_zero)
    }

    /// The value as a rational number, if it is one.
    pub fn as_rational(&self) -> Option<BigRational> {
        let r = self.reduce();
        if r.iter().skip(1).all(Zero::is_zero) {
            Some(r.into_iter().next().unwrap_or_else(BigRational::zero))
        } else {
            None
        }
    }

    /// Sign of a value known to be real. Decided exactly when the value is
    /// rational, otherwise from the floating-point approximation.
    pub fn real_sign(&self) -> i8 {
        match self.as_rational() {
            Some(q) if q.is_zero() => 0,
            Some(q) if q.is_positive() => 1,
            Some(_) => -1,
            None => {
                let re = self.to_complex().re;
                if re > 0.0 {
                    1
                } else if re < 0.0 {
                    -1
                } else {
                    0
                }
            }
        }
    }

    pub fn to_complex(&self) -> Complex64 {
        eval_complex(self.order, self.coeffs.iter().map(|c| c.to_f64().unwrap_or(f64::NAN)))
    }
}

fn binary_q(a: &Cyclo, b: &Cyclo, f: impl Fn(&BigRational, &BigRational) -> BigRational) -> Cyclo {
    let n = lcm(a.order as u64, b.order as u64) as usize;
    let (a, b) = (a.lift(n), b.lift(n));
    Cyclo { order: n, coeffs: a.coeffs.iter().zip(&b.coeffs).map(|(x, y)| f(x, y)).collect() }
}

impl Add for &Cyclo {
    type Output = Cyclo;
    fn add(self, rhs: Self) -> Cyclo {
        binary_q(self, rhs, |x, y| x + y)
    }
}

impl Sub for &Cyclo {
    type Output = Cyclo;
    fn sub(self, rhs: Self) -> Cyclo {
        binary_q(self, rhs, |x, y| x - y)
    }
}

impl Mul for &Cyclo {
    type Output = Cyclo;
    fn mul(self, rhs: Self) -> Cyclo {
        let n = lcm(self.order as u64, rhs.order as u64) as usize;
        let (a, b) = (self.lift(n), rhs.lift(n));
        let mut out = vec![BigRational::zero(); n];
        for (i, x) in a.coeffs.iter().enumerate() {
            if x.is_zero() {
                continue;
            }
            for (j, y) in b.coeffs.iter().enumerate() {
                if !y.is_zero() {
                    out[(i + j) % n] += x * y;
                }
            }
        }
        Cyclo { order: n, coeffs: out }
    }
}

impl Neg for &Cyclo {
    type Output = Cyclo;
    fn neg(self) -> Cyclo {
        Cyclo { order: self.order, coeffs: self.coeffs.iter().map(|c| -c).collect() }
    }
}

impl PartialEq for Cyclo {
    fn eq(&self, other: &Self) -> bool {
        (self - other).is_zero()
    }
}

impl fmt::Display for Cyclo {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if let Some(q) = self.as_rational() {
            return write!(f, "{q}");
        }
        let mut first = true;
        for (j, c) in self.reduce().iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            write!(f, "({c})*z{}^{j}", self.order)?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_cyclotomic_polynomials() {
        assert_eq!(*cyclotomic_polynomial(1), vec![-1, 1]);
        assert_eq!(*cyclotomic_polynomial(2), vec![1, 1]);
        assert_eq!(*cyclotomic_polynomial(4), vec![1, 0, 1]);
        assert_eq!(*cyclotomic_polynomial(6), vec![1, -1, 1]);
        assert_eq!(*cyclotomic_polynomial(12), vec![1, 0, -1, 0, 1]);
        // Φ_105 is the first with a coefficient of absolute value 2.
        assert!(cyclotomic_polynomial(105).iter().any(|&c| c == -2));
        assert_eq!(totient(60), 16);
    }

    #[test]
    fn sum_of_all_roots_vanishes() {
        for n in 2..40 {
            let z = CyclotomicInt::from_coeffs(vec![1; n]);
            assert!(z.is_zero(), "order {n}");
        }
        assert!(!CyclotomicInt::from_coeffs(vec![1, 1, 0, 0]).is_zero());
    }

    #[test]
    fn norm_of_gauss_sum() {
        // Quadratic Gauss sum over Z_5 has squared modulus 5.
        let mut g = CyclotomicInt::zero(5);
        for x in 0..5u64 {
            g.add_root((x * x % 5) as usize, 1);
        }
        assert_eq!(g.norm_sq().as_integer(), Some(5));
        assert_eq!(g.as_integer(), None);
    }

    #[test]
    fn rational_arithmetic_lifts_orders() {
        let i = Cyclo::root(4, 1);
        let w = Cyclo::root(3, 1);
        let prod = &i * &w;
        assert_eq!(prod.order(), 12);
        assert_eq!(prod, Cyclo::root(12, 7));
        let minus_one = &i * &i;
        assert_eq!(minus_one.as_rational(), Some(-BigRational::one()));
        assert_eq!((&w * &w.conj()).as_rational(), Some(BigRational::one()));
    }
}
