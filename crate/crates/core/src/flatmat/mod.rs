//! Unit-modulus ("flat") matrices stored as phase arrays.
//!
//! Entry `(i, j)` of a [`FlatMatrix`] is `ζ_N^{a_ij}` with `N = nroot`, or
//! that value divided by `√n` when the matrix is flagged as normalized.
//! Rows multiply entrywise (Schur product) by adding exponents.

mod cyclotomic;

pub use cyclotomic::{cyclotomic_polynomial, lcm, totient, Cyclo, CyclotomicInt};

use std::fmt;

use num_bigint::BigInt;
use num_complex::Complex64;
use num_integer::Integer;
use num_rational::{BigRational, Rational64};
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::vector::{ExactVector, FloatVector};

/// A point of the circle group, `exp(2πi·value)` with `value ∈ [0, 1)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Phase(Rational64);

impl Phase {
    pub fn new(num: i64, den: i64) -> Self {
        Self::from_ratio(Rational64::new(num, den))
    }

    pub fn from_ratio(r: Rational64) -> Self {
        let f = r - r.floor();
        Phase(f)
    }

    pub fn zero() -> Self {
        Phase(Rational64::zero())
    }

    pub fn value(&self) -> Rational64 {
        self.0
    }

    pub fn denom(&self) -> u64 {
        *self.0.denom() as u64
    }

    /// Exponent `a` with `self = a / nroot`; `nroot` must be a multiple of the denominator.
    pub fn exponent(&self, nroot: u64) -> u64 {
        assert!(nroot % self.denom() == 0, "phase {} not an {}-th root", self.0, nroot);
        (*self.0.numer() as u64) * (nroot / self.denom())
    }

    pub fn add(&self, other: &Phase) -> Phase {
        Phase::from_ratio(self.0 + other.0)
    }

    pub fn to_complex(&self) -> Complex64 {
        let v = *self.0.numer() as f64 / *self.0.denom() as f64;
        Complex64::from_polar(1.0, 2.0 * std::f64::consts::PI * v)
    }
}

impl fmt::Display for Phase {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// A row of unit-modulus entries `ζ_N^{exps[j]}`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct PhaseRow {
    nroot: u64,
    exps: Vec<u64>,
}

impl PhaseRow {
    pub fn new(nroot: u64, exps: Vec<u64>) -> Self {
        assert!(nroot >= 1);
        let exps = exps.into_iter().map(|a| a % nroot).collect();
        Self { nroot, exps }
    }

    pub fn ones(nroot: u64, len: usize) -> Self {
        Self { nroot, exps: vec![0; len] }
    }

    pub fn nroot(&self) -> u64 {
        self.nroot
    }

    pub fn exps(&self) -> &[u64] {
        &self.exps
    }

    pub fn len(&self) -> usize {
        self.exps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.exps.is_empty()
    }

    pub fn lift(&self, nroot: u64) -> Self {
        assert!(nroot % self.nroot == 0);
        let f = nroot / self.nroot;
        Self { nroot, exps: self.exps.iter().map(|a| a * f).collect() }
    }

    pub fn phase(&self, j: usize) -> Phase {
        Phase::new(self.exps[j] as i64, self.nroot as i64)
    }

    /// True iff every entry equals 1.
    pub fn is_ones(&self) -> bool {
        self.exps.iter().all(|&a| a == 0)
    }
}

fn align(u: &PhaseRow, v: &PhaseRow) -> Result<(PhaseRow, PhaseRow)> {
    if u.len() != v.len() {
        return Err(Error::DimensionMismatch { expected: u.len(), got: v.len() });
    }
    let n = lcm(u.nroot, v.nroot);
    Ok((u.lift(n), v.lift(n)))
}

/// Entrywise product `u ∘ v`.
pub fn schur(u: &PhaseRow, v: &PhaseRow) -> Result<PhaseRow> {
    let (u, v) = align(u, v)?;
    let n = u.nroot;
    Ok(PhaseRow { nroot: n, exps: u.exps.iter().zip(&v.exps).map(|(a, b)| (a + b) % n).collect() })
}

/// Entrywise power `u^{(k)}`; negative `k` is allowed on unit-modulus entries.
pub fn schur_power(u: &PhaseRow, k: i64) -> PhaseRow {
    let n = u.nroot as i64;
    PhaseRow {
        nroot: u.nroot,
        exps: u.exps.iter().map(|&a| (a as i64 * k).rem_euclid(n) as u64).collect(),
    }
}

/// `⟨u|v⟩ = Σ conj(u_j) v_j` for unit-modulus rows.
pub fn inner(u: &PhaseRow, v: &PhaseRow) -> Result<CyclotomicInt> {
    let (u, v) = align(u, v)?;
    let n = u.nroot;
    let mut z = CyclotomicInt::zero(n as usize);
    for (a, b) in u.exps.iter().zip(&v.exps) {
        z.add_root(((b + n - a) % n) as usize, 1);
    }
    Ok(z)
}

/// Matrix of unit-modulus entries stored as exponents of `ζ_nroot`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FlatMatrix {
    nroot: u64,
    phases: Vec<Vec<u64>>,
    normalized: bool,
}

impl FlatMatrix {
    pub fn new(nroot: u64, phases: Vec<Vec<u64>>, normalized: bool) -> Result<Self> {
        if nroot == 0 {
            return Err(Error::Parse("nroot must be positive".into()));
        }
        if let Some(first) = phases.first() {
            let w = first.len();
            if let Some(bad) = phases.iter().find(|r| r.len() != w) {
                return Err(Error::DimensionMismatch { expected: w, got: bad.len() });
            }
        }
        let phases = phases
            .into_iter()
            .map(|r| r.into_iter().map(|a| a % nroot).collect())
            .collect();
        Ok(Self { nroot, phases, normalized }.canonical())
    }

    /// Builds from exact phases, choosing the least common root order.
    pub fn from_phases(rows: &[Vec<Phase>], normalized: bool) -> Result<Self> {
        let n = rows.iter().flatten().fold(1, |acc, p| lcm(acc, p.denom()));
        let phases = rows.iter().map(|r| r.iter().map(|p| p.exponent(n)).collect()).collect();
        Self::new(n, phases, normalized)
    }

    pub fn from_rows(rows: &[PhaseRow], normalized: bool) -> Result<Self> {
        let n = rows.iter().fold(1, |acc, r| lcm(acc, r.nroot));
        let phases = rows.iter().map(|r| r.lift(n).exps).collect();
        Self::new(n, phases, normalized)
    }

    /// Reduces `nroot` to the least order that still represents every entry.
    fn canonical(mut self) -> Self {
        let g = self.phases.iter().flatten().fold(self.nroot, |g, &a| g.gcd(&a));
        if g > 1 {
            self.nroot /= g;
            for r in &mut self.phases {
                for a in r.iter_mut() {
                    *a /= g;
                }
            }
        }
        self
    }

    pub fn nroot(&self) -> u64 {
        self.nroot
    }

    pub fn nrows(&self) -> usize {
        self.phases.len()
    }

    pub fn ncols(&self) -> usize {
        self.phases.first().map_or(0, Vec::len)
    }

    pub fn is_normalized(&self) -> bool {
        self.normalized
    }

    pub fn with_normalized(mut self, normalized: bool) -> Self {
        self.normalized = normalized;
        self
    }

    pub fn exps(&self) -> &[Vec<u64>] {
        &self.phases
    }

    pub fn exponent(&self, i: usize, j: usize) -> u64 {
        self.phases[i][j]
    }

    pub fn phase(&self, i: usize, j: usize) -> Phase {
        Phase::new(self.phases[i][j] as i64, self.nroot as i64)
    }

    pub fn row(&self, i: usize) -> PhaseRow {
        PhaseRow { nroot: self.nroot, exps: self.phases[i].clone() }
    }

    pub fn rows(&self) -> Vec<PhaseRow> {
        (0..self.nrows()).map(|i| self.row(i)).collect()
    }

    pub fn column(&self, j: usize) -> PhaseRow {
        PhaseRow { nroot: self.nroot, exps: self.phases.iter().map(|r| r[j]).collect() }
    }

    pub fn transpose(&self) -> Self {
        let phases = (0..self.ncols()).map(|j| self.column(j).exps).collect();
        Self { nroot: self.nroot, phases, normalized: self.normalized }
    }

    /// Squared scale of every entry: `1/nrows` when normalized, else 1.
    pub fn entry_scale_sq(&self) -> BigRational {
        if self.normalized {
            BigRational::new(BigInt::one(), BigInt::from(self.nrows()))
        } else {
            BigRational::one()
        }
    }

    /// Columns as exact vectors, honouring the normalization flag.
    pub fn columns(&self) -> Vec<ExactVector> {
        let s = self.entry_scale_sq();
        (0..self.ncols())
            .map(|j| ExactVector::from_phases(self.nroot, &self.column(j).exps, s.clone()))
            .collect()
    }

    pub fn float_columns(&self) -> Vec<FloatVector> {
        use crate::vector::Vector;
        self.columns().iter().map(Vector::to_float).collect()
    }

    /// Returns a copy with entry `(i, j)` shifted by `delta`.
    pub fn perturbed(&self, i: usize, j: usize, delta: Phase) -> Self {
        let n = lcm(self.nroot, delta.denom());
        let mut m = self.lift(n);
        m.phases[i][j] = (m.phases[i][j] + delta.exponent(n)) % n;
        m.canonical()
    }

    pub fn lift(&self, nroot: u64) -> Self {
        assert!(nroot % self.nroot == 0);
        let f = nroot / self.nroot;
        Self {
            nroot,
            phases: self.phases.iter().map(|r| r.iter().map(|a| a * f).collect()).collect(),
            normalized: self.normalized,
        }
    }

    /// `diag(d) · self`.
    pub fn diag_mul(&self, d: &PhaseRow) -> Result<Self> {
        if d.len() != self.nrows() {
            return Err(Error::DimensionMismatch { expected: self.nrows(), got: d.len() });
        }
        let rows: Result<Vec<PhaseRow>> = (0..self.nrows())
            .map(|i| {
                let r = self.row(i);
                schur(&r, &PhaseRow::new(d.nroot, vec![d.exps[i]; r.len()]))
            })
            .collect();
        Self::from_rows(&rows?, self.normalized)
    }

    /// Tensor (Kronecker) product.
    pub fn kron(&self, other: &Self) -> Self {
        let n = lcm(self.nroot, other.nroot);
        let (a, b) = (self.lift(n), other.lift(n));
        let mut phases = Vec::new();
        for ra in &a.phases {
            for rb in &b.phases {
                phases.push(
                    ra.iter().flat_map(|x| rb.iter().map(move |y| (x + y) % n)).collect(),
                );
            }
        }
        Self { nroot: n, phases, normalized: self.normalized && other.normalized }.canonical()
    }

    pub fn to_complex_rows(&self) -> Vec<Vec<Complex64>> {
        let s = if self.normalized { 1.0 / (self.nrows() as f64).sqrt() } else { 1.0 };
        self.phases
            .iter()
            .map(|r| {
                r.iter()
                    .map(|&a| {
                        Complex64::from_polar(
                            s,
                            2.0 * std::f64::consts::PI * a as f64 / self.nroot as f64,
                        )
                    })
                    .collect()
            })
            .collect()
    }
}

/// True iff the square flat matrix has pairwise orthogonal rows.
pub fn is_hadamard(b: &FlatMatrix) -> Result<bool> {
    Ok(first_non_orthogonal_rows(b)?.is_none())
}

/// Lexicographically first pair of distinct non-orthogonal rows, if any.
pub fn first_non_orthogonal_rows(b: &FlatMatrix) -> Result<Option<(usize, usize)>> {
    if b.nrows() != b.ncols() {
        return Err(Error::NotSquare { rows: b.nrows(), cols: b.ncols() });
    }
    let rows = b.rows();
    for i in 0..rows.len() {
        for j in i + 1..rows.len() {
            if !inner(&rows[i], &rows[j])?.is_zero() {
                return Ok(Some((i, j)));
            }
        }
    }
    Ok(None)
}

/// Float-backend Hadamard test for matrices given by complex rows of unit
/// modulus. Returns the verdict and the largest `|⟨R_i|R_j⟩|` seen.
pub fn is_hadamard_float(rows: &[Vec<Complex64>], tol: f64) -> Result<(bool, f64)> {
    let n = rows.len();
    if let Some(bad) = rows.iter().find(|r| r.len() != n) {
        return Err(Error::NotSquare { rows: n, cols: bad.len() });
    }
    let mut worst = 0.0f64;
    for i in 0..n {
        for j in i + 1..n {
            let z: Complex64 = rows[i].iter().zip(&rows[j]).map(|(x, y)| x.conj() * y).sum();
            worst = worst.max(z.norm());
        }
    }
    Ok((worst <= tol, worst))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn fourier(n: u64) -> FlatMatrix {
        FlatMatrix::new(n, (0..n).map(|i| (0..n).map(|j| i * j).collect()).collect(), false)
            .unwrap()
    }

    #[test]
    fn schur_identity_and_inverse() {
        let u = PhaseRow::new(6, vec![1, 4, 5]);
        assert_eq!(schur(&u, &PhaseRow::ones(6, 3)).unwrap(), u);
        assert!(schur(&u, &schur_power(&u, -1)).unwrap().is_ones());
        assert!(schur_power(&u, 0).is_ones());
        assert!(schur(&u, &PhaseRow::ones(6, 2)).is_err());
    }

    #[test]
    fn fourier_row_group_law() {
        let f = fourier(3);
        assert!(schur(&f.row(1), &f.row(2)).unwrap().is_ones());
        let f4 = fourier(4);
        assert_eq!(schur_power(&f4.row(1), 2), f4.row(2));
        assert_eq!(schur_power(&f.row(1), -1), f.row(2));
    }

    #[test]
    fn inner_products() {
        let f2 = fourier(2);
        assert_eq!(inner(&f2.row(0), &f2.row(0)).unwrap().as_integer(), Some(2));
        assert!(inner(&f2.row(0), &f2.row(1)).unwrap().is_zero());
        let u = PhaseRow::new(5, vec![0, 3, 1]);
        let v = PhaseRow::new(5, vec![2, 2, 4]);
        let a = inner(&u, &v).unwrap();
        let b = inner(&v, &u).unwrap();
        assert_eq!(a, b.conj());
    }

    #[test]
    fn hadamard_checks() {
        for n in 1..=12 {
            assert!(is_hadamard(&fourier(n)).unwrap(), "F_{n}");
        }
        let ones = FlatMatrix::new(1, vec![vec![0; 3]; 3], false).unwrap();
        assert!(!is_hadamard(&ones).unwrap());
        let rect = FlatMatrix::new(2, vec![vec![0, 1, 1]; 2], false).unwrap();
        assert!(matches!(is_hadamard(&rect), Err(Error::NotSquare { .. })));
    }

    #[test]
    fn canonical_root_order() {
        let m = FlatMatrix::new(8, vec![vec![0, 4], vec![4, 0]], true).unwrap();
        assert_eq!(m.nroot(), 2);
        assert_eq!(m.phase(0, 1), Phase::new(1, 2));
    }
}
