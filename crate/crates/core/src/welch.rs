//! Welch bounds and the Schur-product equality criterion.
//!
//! For vectors `x_i ∈ Cⁿ` and `k ≥ 1`:
//!
//! ```text
//! C(n+k-1, k) · Σ_{i,j} |⟨x_i|x_j⟩|^{2k}  ≥  (Σ_i ⟨x_i|x_i⟩^k)²
//! ```
//!
//! Equality holds iff the Schur products of all `k`-multisets of rows of the
//! stacked column matrix, each scaled by the square root of its multinomial
//! coefficient, have equal length and are pairwise orthogonal. Square roots
//! are never formed: lengths are compared as `multinomial · ‖w_S‖²`.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::One;
use rayon::prelude::*;
use serde_json::{json, Value};

use crate::backend::Scalar;
use crate::error::{Error, Result};
use crate::vector::{Vector, VectorSystem};

pub fn binomial(n: u64, k: u64) -> BigInt {
    let mut acc = BigInt::one();
    for i in 0..k {
        acc = acc * BigInt::from(n - i) / BigInt::from(i + 1);
    }
    acc
}

fn factorial(n: u64) -> BigInt {
    (1..=n).fold(BigInt::one(), |acc, i| acc * BigInt::from(i))
}

/// `k! / (k₁!⋯k_n!)` for a sorted multiset of indices.
pub fn multinomial(multiset: &[usize]) -> BigInt {
    let mut denom = BigInt::one();
    let mut i = 0;
    while i < multiset.len() {
        let j = multiset[i..].iter().take_while(|&&x| x == multiset[i]).count();
        denom *= factorial(j as u64);
        i += j;
    }
    factorial(multiset.len() as u64) / denom
}

/// All `k`-multisets of `{0, …, n-1}` as sorted index lists, in
/// lexicographic order.
pub fn multisets(n: usize, k: usize) -> Vec<Vec<usize>> {
    fn rec(start: usize, n: usize, k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for i in start..n {
            cur.push(i);
            rec(i, n, k, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    rec(0, n, k, &mut Vec::new(), &mut out);
    out
}

/// Both sides of the Welch bound for one `k`.
#[derive(Clone, Debug)]
pub struct WelchReport<S: Scalar> {
    pub k: u32,
    pub dim: usize,
    pub lhs: S,
    pub rhs: S,
    pub margin: S,
    pub attained: bool,
}

impl<S: Scalar> WelchReport<S> {
    pub fn to_json(&self) -> Value {
        json!({
            "k": self.k,
            "dim": self.dim,
            "lhs": self.lhs.to_json(),
            "rhs": self.rhs.to_json(),
            "margin": self.margin.to_json(),
            "attained": self.attained,
        })
    }
}

fn check_k(k: u32) -> Result<()> {
    if k == 0 {
        return Err(Error::Domain("Welch bound needs k >= 1".into()));
    }
    Ok(())
}

/// Evaluates both sides of the Welch bound. Weights scale their vectors.
///
/// In the float backend the margin is compared against
/// `tol · max(1, |rhs|)`.
pub fn welch_report<V: Vector>(
    system: &VectorSystem<V>,
    k: u32,
    tol: f64,
) -> Result<WelchReport<V::Scalar>> {
    check_k(k)?;
    let xs = system.effective();
    let n = system.dim().ok_or(Error::EmptySystem)?;
    let coef = BigRational::from_integer(binomial((n + k as usize - 1) as u64, k as u64));
    let lhs = V::Scalar::from_ratio(&coef).times(&V::welch_pair_sum(&xs, k));
    let trace = xs.iter().fold(V::Scalar::zero(), |acc, x| acc.plus(&x.norm_sq().pow(k)));
    let rhs = trace.times(&trace);
    let margin = lhs.minus(&rhs);
    let scale = rhs.to_complex().norm().max(1.0);
    let attained = margin.is_zero_tol(tol * scale);
    Ok(WelchReport { k, dim: n, lhs, rhs, margin, attained })
}

/// One entry of the W-set: the Schur product of a multiset of rows.
#[derive(Clone, Debug)]
pub struct WSetEntry<R> {
    pub multiset: Vec<usize>,
    /// Multinomial coefficient; it multiplies squared norms, never the row.
    pub coefficient: BigInt,
    pub row: R,
}

#[derive(Clone, Debug)]
pub struct WSet<V: Vector> {
    pub dim: usize,
    pub k: usize,
    pub entries: Vec<WSetEntry<V::Row>>,
}

impl<V: Vector> WSet<V> {
    /// `coefficient · ‖w_S‖²` for entry `i`.
    pub fn scaled_norm_sq(&self, i: usize) -> V::Scalar {
        let e = &self.entries[i];
        V::Scalar::from_ratio(&BigRational::from_integer(e.coefficient.clone()))
            .times(&V::row_inner(&e.row, &e.row))
    }

    pub fn inner(&self, i: usize, j: usize) -> V::Scalar {
        V::row_inner(&self.entries[i].row, &self.entries[j].row)
    }
}

/// Builds the W-set of the matrix whose columns are `cols` (all in `C^dim`).
pub fn build_wset<V: Vector>(cols: &[V], dim: usize, k: usize) -> Result<WSet<V>> {
    if k == 0 {
        return Err(Error::Domain("W-set needs k >= 1".into()));
    }
    if let Some(bad) = cols.iter().find(|c| c.dim() != dim) {
        return Err(Error::DimensionMismatch { expected: dim, got: bad.dim() });
    }
    let ms = multisets(dim, k);
    let rows = V::multiset_rows(cols, &ms);
    let entries = ms
        .into_iter()
        .zip(rows)
        .map(|(multiset, row)| WSetEntry { coefficient: multinomial(&multiset), multiset, row })
        .collect();
    Ok(WSet { dim, k, entries })
}

/// Why the equality criterion failed.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum WSetWitness {
    /// Scaled squared lengths of the two multisets differ.
    UnequalLength(Vec<usize>, Vec<usize>),
    /// The two Schur products are not orthogonal.
    NotOrthogonal(Vec<usize>, Vec<usize>),
}

impl WSetWitness {
    pub fn to_json(&self) -> Value {
        match self {
            WSetWitness::UnequalLength(a, b) => json!({"kind": "unequal_length", "multisets": [a, b]}),
            WSetWitness::NotOrthogonal(a, b) => json!({"kind": "not_orthogonal", "multisets": [a, b]}),
        }
    }
}

#[derive(Clone, Debug)]
pub struct WelchVerdict {
    pub k: u32,
    pub attained: bool,
    pub witness: Option<WSetWitness>,
}

/// Decides Welch equality through the W-set: true iff all entries have
/// equal scaled length and are pairwise orthogonal. The witness is the
/// lexicographically first failing pair.
pub fn attains_welch<V: Vector>(system: &VectorSystem<V>, k: u32, tol: f64) -> Result<WelchVerdict> {
    check_k(k)?;
    let n = system.dim().ok_or(Error::EmptySystem)?;
    let cols = system.effective();
    let w = build_wset(&cols, n, k as usize)?;
    let m = w.entries.len();
    let norms: Vec<V::Scalar> = (0..m).into_par_iter().map(|i| w.scaled_norm_sq(i)).collect();
    let scale = norms.iter().map(|x| x.to_complex().norm()).fold(1.0f64, f64::max);
    if let Some(j) = (1..m).find(|&j| !norms[j].minus(&norms[0]).is_zero_tol(tol * scale)) {
        return Ok(WelchVerdict {
            k,
            attained: false,
            witness: Some(WSetWitness::UnequalLength(
                w.entries[0].multiset.clone(),
                w.entries[j].multiset.clone(),
            )),
        });
    }
    let first_bad: Option<(usize, usize)> = (0..m)
        .into_par_iter()
        .filter_map(|i| {
            (i + 1..m).find(|&j| !w.inner(i, j).is_zero_tol(tol * scale)).map(|j| (i, j))
        })
        .min();
    Ok(WelchVerdict {
        k,
        attained: first_bad.is_none(),
        witness: first_bad.map(|(i, j)| {
            WSetWitness::NotOrthogonal(w.entries[i].multiset.clone(), w.entries[j].multiset.clone())
        }),
    })
}

/// Complex projective `t`-design test: Welch equality for every `k ≤ t`.
pub fn is_t_design<V: Vector>(system: &VectorSystem<V>, t: u32, tol: f64) -> Result<bool> {
    for k in 1..=t {
        if !attains_welch(system, k, tol)?.attained {
            return Ok(false);
        }
    }
    Ok(t >= 1)
}

/// Upper bound on the number of MUBs in `Cⁿ`, `n ≥ 2`.
pub fn max_mub_bound(n: u64) -> u64 {
    n + 1
}

/// Both sides of the `k = 2` Welch bound evaluated on a hypothetical system
/// of `n + 2` MUBs: `(n(n+1)(n+2)(2n+1)/2, n²(n+2)²)`. The first is smaller
/// for every `n ≥ 2`, which rules such a system out.
pub fn excess_mub_welch_sides(n: u64) -> (BigInt, BigInt) {
    let n = BigInt::from(n);
    let lhs = &n * (&n + 1) * (&n + 2) * (2 * &n + 1) / 2;
    let rhs = &n * &n * (&n + 2) * (&n + 2);
    (lhs, rhs)
}

/// `n²(n+1)²`, the common value of both sides for a complete MUB system.
pub fn complete_mub_welch_value(n: u64) -> BigInt {
    let n = BigInt::from(n);
    &n * &n * (&n + 1) * (&n + 1)
}

/// Lossy view of a scalar margin, for reports.
pub fn margin_f64<S: Scalar>(s: &S) -> f64 {
    s.to_complex().re
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::flatmat::Cyclo;
    use crate::vector::ExactVector;

    fn q(n: i64, d: i64) -> BigRational {
        BigRational::new(n.into(), d.into())
    }

    fn standard_basis(n: usize) -> VectorSystem<ExactVector> {
        VectorSystem::new((0..n).map(|i| ExactVector::basis_vector(n, i)).collect()).unwrap()
    }

    #[test]
    fn counting_helpers() {
        assert_eq!(binomial(4, 2), BigInt::from(6));
        assert_eq!(multisets(3, 2).len(), 6);
        assert_eq!(multisets(2, 2), vec![vec![0, 0], vec![0, 1], vec![1, 1]]);
        assert_eq!(multinomial(&[0, 1]), BigInt::from(2));
        assert_eq!(multinomial(&[1, 1]), BigInt::from(1));
        assert_eq!(multinomial(&[0, 0, 2]), BigInt::from(3));
    }

    #[test]
    fn wset_shapes() {
        let cols = standard_basis(2).effective();
        let w1 = build_wset(&cols, 2, 1).unwrap();
        assert!(w1.entries.iter().all(|e| e.coefficient == BigInt::one()));
        let w2 = build_wset(&cols, 2, 2).unwrap();
        let coefs: Vec<BigInt> = w2.entries.iter().map(|e| e.coefficient.clone()).collect();
        assert_eq!(coefs, vec![BigInt::from(1), BigInt::from(2), BigInt::from(1)]);
        assert_eq!(build_wset(&standard_basis(3).effective(), 3, 2).unwrap().entries.len(), 6);
    }

    #[test]
    fn single_basis() {
        for n in 2..6 {
            let s = standard_basis(n);
            let r1 = welch_report(&s, 1, 0.0).unwrap();
            assert!(r1.attained);
            assert_eq!(r1.lhs.as_rational(), Some(q((n * n) as i64, 1)));
            let r2 = welch_report(&s, 2, 0.0).unwrap();
            assert!(!r2.attained);
            assert_eq!(r2.lhs.as_rational(), Some(q((n * (n + 1) / 2 * n) as i64, 1)));
            assert_eq!(r2.rhs.as_rational(), Some(q((n * n) as i64, 1)));
            assert!(!attains_welch(&s, 2, 0.0).unwrap().attained);
            assert!(attains_welch(&s, 1, 0.0).unwrap().attained);
        }
    }

    #[test]
    fn single_unit_vector_is_not_a_frame() {
        let s = VectorSystem::new(vec![ExactVector::basis_vector(3, 1)]).unwrap();
        let v = attains_welch(&s, 1, 0.0).unwrap();
        assert!(!v.attained);
        assert!(!welch_report(&s, 1, 0.0).unwrap().attained);
        assert!(v.witness.is_some());
    }

    #[test]
    fn weights_scale_norms() {
        let s = standard_basis(2).with_weights(vec![q(2, 1), q(2, 1)]).unwrap();
        let r = welch_report(&s, 1, 0.0).unwrap();
        assert_eq!(r.rhs, Cyclo::from_rational(q(64, 1)));
        assert!(r.attained);
    }

    #[test]
    fn excess_system_contradiction() {
        for n in 2..50u64 {
            let (l, r) = excess_mub_welch_sides(n);
            assert!(l < r);
        }
        assert_eq!(max_mub_bound(7), 8);
        assert_eq!(complete_mub_welch_value(2), BigInt::from(36));
    }

    #[test]
    fn rejects_bad_inputs() {
        let empty: VectorSystem<ExactVector> = VectorSystem::new(vec![]).unwrap();
        assert!(matches!(welch_report(&empty, 1, 0.0), Err(Error::EmptySystem)));
        assert!(welch_report(&standard_basis(2), 0, 0.0).is_err());
    }
}
