//! Vectors and vector systems in the exact and float backends.
//!
//! An [`ExactVector`] stores `sqrt(scale_sq) · (e_0, …, e_{n-1})` where each
//! entry `e_j` is zero, a root of unity `ζ_N^a`, or (rarely) a general
//! element of `Q(ζ_N)`. Only squared quantities are ever formed, so every
//! value the verifiers need stays inside `Q(ζ_N)`.

use std::collections::HashMap;
use std::fmt::Debug;
use std::sync::Arc;

use num_bigint::BigInt;
use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::{One, Zero};
use rayon::prelude::*;

use crate::backend::Scalar;
use crate::error::{Error, Result};
use crate::flatmat::{lcm, Cyclo, CyclotomicInt};

/// Operations the verifiers need from a vector type.
pub trait Vector: Clone + Debug + Send + Sync + Sized + 'static {
    type Scalar: Scalar;
    type Weight: Clone + Debug + Send + Sync;
    /// A Schur product of rows of a stacked column matrix.
    type Row: Clone + Debug + Send + Sync;

    fn dim(&self) -> usize;

    /// `⟨x|x⟩`.
    fn norm_sq(&self) -> Self::Scalar;

    /// `|⟨x|y⟩|²`.
    fn angle_sq(&self, other: &Self) -> Self::Scalar;

    fn is_orthogonal(&self, other: &Self, tol: f64) -> bool;

    /// `n·|⟨x|y⟩|² = 1`.
    fn is_unbiased(&self, other: &Self, n: usize, tol: f64) -> bool {
        let target = Self::Scalar::from_ratio(&BigRational::new(BigInt::one(), BigInt::from(n)));
        self.angle_sq(other).minus(&target).is_zero_tol(tol)
    }

    /// Scales the vector by the weight `w`, so `⟨x|x⟩` picks up a factor `w²`.
    fn weighted(&self, w: &Self::Weight) -> Self;

    fn to_float(&self) -> FloatVector;

    /// True iff every entry has squared modulus exactly `q`.
    fn is_flat_with(&self, q: &BigRational, tol: f64) -> bool;

    /// Rows `w_S = ∘_{i∈S} w_i` of the matrix whose columns are `cols`,
    /// one per multiset `S` of row indices.
    fn multiset_rows(cols: &[Self], multisets: &[Vec<usize>]) -> Vec<Self::Row>;

    /// `⟨a|b⟩` for rows built by [`Vector::multiset_rows`] from the same columns.
    fn row_inner(a: &Self::Row, b: &Self::Row) -> Self::Scalar;

    /// `B₀† v` where `B₀` has columns `basis`.
    fn change_basis(basis: &[Self], v: &Self) -> Result<Self>;

    /// `Σ_{i,j} |⟨x_i|x_j⟩|^{2k}`.
    fn welch_pair_sum(xs: &[Self], k: u32) -> Self::Scalar {
        let rows: Vec<Self::Scalar> = (0..xs.len())
            .into_par_iter()
            .map(|i| {
                let mut acc = Self::Scalar::zero();
                for j in 0..xs.len() {
                    acc = acc.plus(&xs[i].angle_sq(&xs[j]).pow(k));
                }
                acc
            })
            .collect();
        rows.iter().fold(Self::Scalar::zero(), |acc, r| acc.plus(r))
    }
}

/// One coordinate of an [`ExactVector`], before the common scale.
#[derive(Clone, Debug, PartialEq)]
pub enum Entry {
    Zero,
    Root(u64),
    General(Cyclo),
}

impl Entry {
    fn to_cyclo(&self, nroot: u64) -> Cyclo {
        match self {
            Entry::Zero => Cyclo::zero(),
            Entry::Root(a) => Cyclo::root(nroot as usize, *a),
            Entry::General(c) => c.clone(),
        }
    }
}

/// Exact vector `sqrt(scale_sq) · entries` with entries over `ζ_nroot`.
#[derive(Clone, Debug, PartialEq)]
pub struct ExactVector {
    nroot: u64,
    scale_sq: BigRational,
    entries: Vec<Entry>,
}

impl ExactVector {
    pub fn new(nroot: u64, scale_sq: BigRational, entries: Vec<Entry>) -> Self {
        assert!(nroot >= 1);
        let entries = entries
            .into_iter()
            .map(|e| match e {
                Entry::Root(a) => Entry::Root(a % nroot),
                other => other,
            })
            .collect();
        Self { nroot, scale_sq, entries }
    }

    /// Flat vector `sqrt(scale_sq)·(ζ^{a_0}, …)`.
    pub fn from_phases(nroot: u64, exps: &[u64], scale_sq: BigRational) -> Self {
        Self::new(nroot, scale_sq, exps.iter().map(|&a| Entry::Root(a)).collect())
    }

    pub fn from_optional_phases(nroot: u64, exps: &[Option<u64>], scale_sq: BigRational) -> Self {
        Self::new(
            nroot,
            scale_sq,
            exps.iter().map(|a| a.map_or(Entry::Zero, Entry::Root)).collect(),
        )
    }

    /// The standard basis vector `e_i` of `Cⁿ`.
    pub fn basis_vector(n: usize, i: usize) -> Self {
        let entries = (0..n).map(|j| if j == i { Entry::Root(0) } else { Entry::Zero }).collect();
        Self::new(1, BigRational::one(), entries)
    }

    pub fn nroot(&self) -> u64 {
        self.nroot
    }

    pub fn scale_sq(&self) -> &BigRational {
        &self.scale_sq
    }

    pub fn entries(&self) -> &[Entry] {
        &self.entries
    }

    pub fn is_pure(&self) -> bool {
        !self.entries.iter().any(|e| matches!(e, Entry::General(_)))
    }

    pub fn lift(&self, nroot: u64) -> Self {
        if nroot == self.nroot {
            return self.clone();
        }
        assert!(nroot % self.nroot == 0);
        let f = nroot / self.nroot;
        Self {
            nroot,
            scale_sq: self.scale_sq.clone(),
            entries: self
                .entries
                .iter()
                .map(|e| match e {
                    Entry::Root(a) => Entry::Root(a * f),
                    other => other.clone(),
                })
                .collect(),
        }
    }

    /// Unscaled inner product `Σ conj(e_j) f_j`.
    pub fn raw_inner(&self, other: &Self) -> Cyclo {
        let n = lcm(self.nroot, other.nroot);
        let (fa, fb) = (n / self.nroot, n / other.nroot);
        let mut counts = CyclotomicInt::zero(n as usize);
        let mut general = Cyclo::zero();
        for (x, y) in self.entries.iter().zip(&other.entries) {
            match (x, y) {
                (Entry::Zero, _) | (_, Entry::Zero) => {}
                (Entry::Root(a), Entry::Root(b)) => {
                    counts.add_root(((b * fb + n - (a * fa) % n) % n) as usize, 1)
                }
                _ => {
                    general = &general
                        + &(&x.to_cyclo(self.nroot).conj() * &y.to_cyclo(other.nroot));
                }
            }
        }
        &Cyclo::from_int(&counts) + &general
    }

    /// Integer fast path of [`raw_inner`](Self::raw_inner) for pure vectors
    /// sharing a root order.
    fn raw_inner_int(&self, other: &Self) -> CyclotomicInt {
        debug_assert_eq!(self.nroot, other.nroot);
        let n = self.nroot;
        let mut counts = CyclotomicInt::zero(n as usize);
        for (x, y) in self.entries.iter().zip(&other.entries) {
            if let (Entry::Root(a), Entry::Root(b)) = (x, y) {
                counts.add_root(((b + n - a) % n) as usize, 1);
            }
        }
        counts
    }

    fn fast_pair(&self, other: &Self) -> Option<CyclotomicInt> {
        (self.nroot == other.nroot && self.is_pure() && other.is_pure())
            .then(|| self.raw_inner_int(other))
    }
}

fn common_nroot(xs: &[ExactVector]) -> u64 {
    xs.iter().fold(1, |acc, x| lcm(acc, x.nroot))
}

/// Interns the distinct scales of `xs`.
fn scale_classes(xs: &[ExactVector]) -> (Vec<usize>, Vec<BigRational>) {
    let mut vals: Vec<BigRational> = Vec::new();
    let mut index: HashMap<BigRational, usize> = HashMap::new();
    let ids = xs
        .iter()
        .map(|x| {
            *index.entry(x.scale_sq.clone()).or_insert_with(|| {
                vals.push(x.scale_sq.clone());
                vals.len() - 1
            })
        })
        .collect();
    (ids, vals)
}

/// Schur-product row over exact columns; column `c` carries the factor
/// `class_vals[class[c]]`.
#[derive(Clone, Debug)]
pub struct ExactRow {
    nroot: u64,
    class: Arc<Vec<usize>>,
    class_vals: Arc<Vec<BigRational>>,
    entries: Vec<Entry>,
}

impl Vector for ExactVector {
    type Scalar = Cyclo;
    type Weight = BigRational;
    type Row = ExactRow;

    fn dim(&self) -> usize {
        self.entries.len()
    }

    fn norm_sq(&self) -> Cyclo {
        if self.is_pure() {
            let nnz = self.entries.iter().filter(|e| !matches!(e, Entry::Zero)).count();
            return Cyclo::from_rational(&self.scale_sq * BigRational::from_integer(nnz.into()));
        }
        self.raw_inner(self).scale(&self.scale_sq)
    }

    fn angle_sq(&self, other: &Self) -> Cyclo {
        let s = &self.scale_sq * &other.scale_sq;
        match self.fast_pair(other) {
            Some(c) => Cyclo::from_scaled_int(&c.norm_sq(), &s),
            None => {
                let c = self.raw_inner(other);
                (&c * &c.conj()).scale(&s)
            }
        }
    }

    fn is_orthogonal(&self, other: &Self, _tol: f64) -> bool {
        match self.fast_pair(other) {
            Some(c) => c.is_zero(),
            None => self.raw_inner(other).is_zero(),
        }
    }

    fn is_unbiased(&self, other: &Self, n: usize, _tol: f64) -> bool {
        // n·s·|c|² = 1 with |c|² forced to be the integer den/num.
        let q = &self.scale_sq * &other.scale_sq * BigRational::from_integer(n.into());
        match self.fast_pair(other) {
            Some(c) => match c.norm_sq().as_integer() {
                Some(m) => q * BigRational::from_integer(m.into()) == BigRational::one(),
                None => false,
            },
            None => {
                let c = self.raw_inner(other);
                (&(&c * &c.conj()).scale(&q) - &Cyclo::one()).is_zero()
            }
        }
    }

    fn weighted(&self, w: &BigRational) -> Self {
        Self { scale_sq: &self.scale_sq * w * w, ..self.clone() }
    }

    fn to_float(&self) -> FloatVector {
        let s = num_traits::ToPrimitive::to_f64(&self.scale_sq).unwrap_or(f64::NAN).sqrt();
        FloatVector(
            self.entries
                .iter()
                .map(|e| match e {
                    Entry::Zero => Complex64::new(0.0, 0.0),
                    Entry::Root(a) => Complex64::from_polar(
                        s,
                        2.0 * std::f64::consts::PI * *a as f64 / self.nroot as f64,
                    ),
                    Entry::General(c) => c.to_complex() * s,
                })
                .collect(),
        )
    }

    fn is_flat_with(&self, q: &BigRational, _tol: f64) -> bool {
        self.entries.iter().all(|e| match e {
            Entry::Zero => false,
            Entry::Root(_) => &self.scale_sq == q,
            Entry::General(c) => {
                (&(c * &c.conj()).scale(&self.scale_sq) - &Cyclo::from_rational(q.clone())).is_zero()
            }
        })
    }

    fn multiset_rows(cols: &[Self], multisets: &[Vec<usize>]) -> Vec<ExactRow> {
        let n = common_nroot(cols);
        let cols: Vec<ExactVector> = cols.iter().map(|c| c.lift(n)).collect();
        let (ids, vals) = scale_classes(&cols);
        let mut by_len: HashMap<usize, Arc<Vec<BigRational>>> = HashMap::new();
        let class = Arc::new(ids);
        multisets
            .iter()
            .map(|ms| {
                let k = ms.len();
                let class_vals = by_len
                    .entry(k)
                    .or_insert_with(|| {
                        Arc::new(vals.iter().map(|v| num_traits::pow(v.clone(), k)).collect())
                    })
                    .clone();
                let entries = cols
                    .iter()
                    .map(|c| {
                        let mut exp = 0u64;
                        let mut general: Option<Cyclo> = None;
                        for &i in ms {
                            match &c.entries[i] {
                                Entry::Zero => return Entry::Zero,
                                Entry::Root(a) => exp = (exp + a) % n,
                                Entry::General(g) => {
                                    general = Some(match general {
                                        Some(acc) => &acc * g,
                                        None => g.clone(),
                                    })
                                }
                            }
                        }
                        match general {
                            None => Entry::Root(exp),
                            Some(g) => Entry::General(&g * &Cyclo::root(n as usize, exp)),
                        }
                    })
                    .collect();
                ExactRow { nroot: n, class: Arc::clone(&class), class_vals, entries }
            })
            .collect()
    }

    fn row_inner(a: &ExactRow, b: &ExactRow) -> Cyclo {
        let n = a.nroot;
        let nclass = a.class_vals.len();
        let mut counts = vec![CyclotomicInt::zero(n as usize); nclass];
        let mut general = vec![Cyclo::zero(); nclass];
        let mut any_general = false;
        for (c, (x, y)) in a.entries.iter().zip(&b.entries).enumerate() {
            let cls = a.class[c];
            match (x, y) {
                (Entry::Zero, _) | (_, Entry::Zero) => {}
                (Entry::Root(p), Entry::Root(q)) => {
                    counts[cls].add_root(((q + n - p) % n) as usize, 1)
                }
                _ => {
                    any_general = true;
                    general[cls] =
                        &general[cls] + &(&x.to_cyclo(n).conj() * &y.to_cyclo(b.nroot));
                }
            }
        }
        let mut acc = Cyclo::zero();
        for cls in 0..nclass {
            let mut term = Cyclo::from_int(&counts[cls]);
            if any_general {
                term = &term + &general[cls];
            }
            acc = &acc + &term.scale(&a.class_vals[cls]);
        }
        acc
    }

    fn change_basis(basis: &[Self], v: &Self) -> Result<Self> {
        let s0 = basis.first().map(|b| b.scale_sq.clone()).ok_or(Error::EmptySystem)?;
        if basis.iter().any(|b| b.scale_sq != s0) {
            return Err(Error::Domain(
                "basis change needs columns of a common scale in the exact backend".into(),
            ));
        }
        let n = lcm(common_nroot(basis), v.nroot);
        let entries = basis
            .iter()
            .map(|b| {
                let c = b.raw_inner(v).lift(n as usize);
                if c.is_zero() {
                    return Entry::Zero;
                }
                (0..n)
                    .find(|&e| (&c - &Cyclo::root(n as usize, e)).is_zero())
                    .map_or(Entry::General(c), Entry::Root)
            })
            .collect();
        Ok(ExactVector::new(n, &s0 * &v.scale_sq, entries))
    }

    fn welch_pair_sum(xs: &[Self], k: u32) -> Cyclo {
        if !xs.iter().all(ExactVector::is_pure) {
            let rows: Vec<Cyclo> = (0..xs.len())
                .into_par_iter()
                .map(|i| {
                    xs.iter().fold(Cyclo::zero(), |acc, y| &acc + &xs[i].angle_sq(y).pow(k))
                })
                .collect();
            return rows.iter().fold(Cyclo::zero(), |acc, r| &acc + r);
        }
        let n = common_nroot(xs);
        let xs: Vec<ExactVector> = xs.iter().map(|x| x.lift(n)).collect();
        let (ids, vals) = scale_classes(&xs);
        let nc = vals.len();
        let nu = n as usize;
        // acc[ci * nc + cj][e]: Σ |c_ij|^{2k} coefficients per scale-class pair.
        let acc = (0..xs.len())
            .into_par_iter()
            .fold(
                || vec![vec![0i128; nu]; nc * nc],
                |mut acc, i| {
                    for j in 0..xs.len() {
                        let p = xs[i].raw_inner_int(&xs[j]).norm_sq().pow(k);
                        let slot = &mut acc[ids[i] * nc + ids[j]];
                        for (e, &c) in p.coeffs().iter().enumerate() {
                            slot[e] += c as i128;
                        }
                    }
                    acc
                },
            )
            .reduce(
                || vec![vec![0i128; nu]; nc * nc],
                |mut a, b| {
                    for (x, y) in a.iter_mut().zip(b) {
                        for (p, q) in x.iter_mut().zip(y) {
                            *p += q;
                        }
                    }
                    a
                },
            );
        let mut total = Cyclo::zero();
        for ci in 0..nc {
            for cj in 0..nc {
                let scale = num_traits::pow(&vals[ci] * &vals[cj], k as usize);
                let coeffs: Vec<BigRational> = acc[ci * nc + cj]
                    .iter()
                    .map(|&c| &scale * BigRational::from_integer(BigInt::from(c)))
                    .collect();
                total = &total + &cyclo_from_rationals(coeffs);
            }
        }
        total
    }
}

fn cyclo_from_rationals(coeffs: Vec<BigRational>) -> Cyclo {
    let n = coeffs.len();
    coeffs.into_iter().enumerate().fold(Cyclo::zero(), |acc, (e, c)| {
        if c.is_zero() {
            acc
        } else {
            &acc + &Cyclo::root(n, e as u64).scale(&c)
        }
    })
}

/// Double precision complex vector.
#[derive(Clone, Debug, PartialEq)]
pub struct FloatVector(pub Vec<Complex64>);

impl FloatVector {
    pub fn inner(&self, other: &Self) -> Complex64 {
        self.0.iter().zip(&other.0).map(|(x, y)| x.conj() * y).sum()
    }
}

/// Neumaier-compensated sum.
fn compensated_sum(xs: impl Iterator<Item = f64>) -> f64 {
    let (mut sum, mut comp) = (0.0f64, 0.0f64);
    for x in xs {
        let t = sum + x;
        if sum.abs() >= x.abs() {
            comp += (sum - t) + x;
        } else {
            comp += (x - t) + sum;
        }
        sum = t;
    }
    sum + comp
}

impl Vector for FloatVector {
    type Scalar = Complex64;
    type Weight = f64;
    type Row = Vec<Complex64>;

    fn dim(&self) -> usize {
        self.0.len()
    }

    fn norm_sq(&self) -> Complex64 {
        Complex64::new(compensated_sum(self.0.iter().map(|z| z.norm_sqr())), 0.0)
    }

    fn angle_sq(&self, other: &Self) -> Complex64 {
        Complex64::new(self.inner(other).norm_sqr(), 0.0)
    }

    fn is_orthogonal(&self, other: &Self, tol: f64) -> bool {
        self.inner(other).norm() <= tol
    }

    fn weighted(&self, w: &f64) -> Self {
        FloatVector(self.0.iter().map(|z| z * w).collect())
    }

    fn to_float(&self) -> FloatVector {
        self.clone()
    }

    fn is_flat_with(&self, q: &BigRational, tol: f64) -> bool {
        let q = num_traits::ToPrimitive::to_f64(q).unwrap_or(f64::NAN);
        self.0.iter().all(|z| (z.norm_sqr() - q).abs() <= tol)
    }

    fn multiset_rows(cols: &[Self], multisets: &[Vec<usize>]) -> Vec<Vec<Complex64>> {
        multisets
            .iter()
            .map(|ms| {
                cols.iter()
                    .map(|c| ms.iter().fold(Complex64::new(1.0, 0.0), |acc, &i| acc * c.0[i]))
                    .collect()
            })
            .collect()
    }

    fn row_inner(a: &Vec<Complex64>, b: &Vec<Complex64>) -> Complex64 {
        a.iter().zip(b).map(|(x, y)| x.conj() * y).sum()
    }

    fn change_basis(basis: &[Self], v: &Self) -> Result<Self> {
        Ok(FloatVector(basis.iter().map(|b| b.inner(v)).collect()))
    }

    fn welch_pair_sum(xs: &[Self], k: u32) -> Complex64 {
        let rows: Vec<f64> = (0..xs.len())
            .into_par_iter()
            .map(|i| {
                compensated_sum(xs.iter().map(|y| xs[i].inner(y).norm_sqr().powi(k as i32)))
            })
            .collect();
        Complex64::new(compensated_sum(rows.into_iter()), 0.0)
    }
}

/// A finite sequence of vectors in a common space, optionally weighted.
#[derive(Clone, Debug)]
pub struct VectorSystem<V: Vector> {
    vectors: Vec<V>,
    weights: Option<Vec<V::Weight>>,
}

impl<V: Vector> VectorSystem<V> {
    pub fn new(vectors: Vec<V>) -> Result<Self> {
        if let Some(first) = vectors.first() {
            let n = first.dim();
            if let Some(bad) = vectors.iter().find(|v| v.dim() != n) {
                return Err(Error::DimensionMismatch { expected: n, got: bad.dim() });
            }
        }
        Ok(Self { vectors, weights: None })
    }

    pub fn with_weights(mut self, weights: Vec<V::Weight>) -> Result<Self> {
        if weights.len() != self.vectors.len() {
            return Err(Error::DimensionMismatch {
                expected: self.vectors.len(),
                got: weights.len(),
            });
        }
        self.weights = Some(weights);
        Ok(self)
    }

    pub fn vectors(&self) -> &[V] {
        &self.vectors
    }

    pub fn weights(&self) -> Option<&[V::Weight]> {
        self.weights.as_deref()
    }

    pub fn len(&self) -> usize {
        self.vectors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vectors.is_empty()
    }

    /// Ambient dimension, `None` for an empty system.
    pub fn dim(&self) -> Option<usize> {
        self.vectors.first().map(Vector::dim)
    }

    /// The vectors with weights applied.
    pub fn effective(&self) -> Vec<V> {
        match &self.weights {
            None => self.vectors.clone(),
            Some(ws) => self.vectors.iter().zip(ws).map(|(v, w)| v.weighted(w)).collect(),
        }
    }
}

impl VectorSystem<ExactVector> {
    pub fn to_float(&self) -> VectorSystem<FloatVector> {
        VectorSystem {
            vectors: self.vectors.iter().map(Vector::to_float).collect(),
            weights: self.weights.as_ref().map(|ws| {
                ws.iter().map(|w| num_traits::ToPrimitive::to_f64(w).unwrap_or(f64::NAN)).collect()
            }),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(n: i64, d: i64) -> BigRational {
        BigRational::new(n.into(), d.into())
    }

    fn fourier_col(n: u64, j: u64) -> ExactVector {
        let exps: Vec<u64> = (0..n).map(|i| i * j % n).collect();
        ExactVector::from_phases(n, &exps, q(1, n as i64))
    }

    #[test]
    fn exact_angles() {
        let e0 = ExactVector::basis_vector(3, 0);
        let f1 = fourier_col(3, 1);
        assert_eq!(e0.angle_sq(&f1).as_rational(), Some(q(1, 3)));
        assert!(e0.is_unbiased(&f1, 3, 0.0));
        assert_eq!(f1.norm_sq().as_rational(), Some(q(1, 1)));
        assert!(f1.is_orthogonal(&fourier_col(3, 2), 0.0));
        assert!(!f1.is_unbiased(&f1, 3, 0.0));
    }

    #[test]
    fn float_agrees_with_exact() {
        let a = fourier_col(5, 2);
        let b = ExactVector::from_phases(5, &[0, 1, 1, 3, 0], q(1, 5));
        let exact = a.angle_sq(&b).to_complex().re;
        let float = a.to_float().angle_sq(&b.to_float()).re;
        assert!((exact - float).abs() < 1e-12);
    }

    #[test]
    fn change_basis_recognizes_roots() {
        let f: Vec<ExactVector> = (0..3).map(|j| fourier_col(3, j)).collect();
        let e1 = ExactVector::basis_vector(3, 1);
        let w = ExactVector::change_basis(&f, &e1).unwrap();
        assert!(w.is_pure());
        assert!(w.is_flat_with(&q(1, 3), 0.0));
    }

    #[test]
    fn pair_sum_matches_generic_route() {
        let xs: Vec<ExactVector> = vec![
            ExactVector::basis_vector(3, 0),
            fourier_col(3, 1),
            ExactVector::from_phases(3, &[0, 0, 1], q(1, 3)),
        ];
        for k in 1..=3 {
            let fast = ExactVector::welch_pair_sum(&xs, k);
            let slow = xs.iter().fold(Cyclo::zero(), |acc, x| {
                xs.iter().fold(acc, |acc, y| &acc + &x.angle_sq(y).pow(k))
            });
            assert_eq!(fast, slow, "k={k}");
        }
    }
}
