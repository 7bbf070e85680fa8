//! Verification of MUB and MUH systems.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::One;
use rayon::prelude::*;
use serde_json::{json, Value};

use crate::backend::Scalar;
use crate::error::{Error, Result};
use crate::flatmat::{first_non_orthogonal_rows, FlatMatrix};
use crate::vector::{ExactVector, FloatVector, Vector, VectorSystem};
use crate::welch::multisets;

/// Number of individual failures kept in a verdict; the total is always counted.
pub const MAX_REPORTED_FAILURES: usize = 32;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum Form {
    #[default]
    Raw,
    /// First basis is the identity, the others are flat.
    MuhStandard,
}

/// Orthonormal bases of a common space `Cⁿ`, each stored as its columns.
#[derive(Clone, Debug)]
pub struct BasisSystem<V: Vector> {
    bases: Vec<Vec<V>>,
    form: Form,
}

impl<V: Vector> BasisSystem<V> {
    pub fn new(bases: Vec<Vec<V>>) -> Result<Self> {
        if let Some(first) = bases.first() {
            let n = first.len();
            for b in &bases {
                if b.len() != n {
                    return Err(Error::DimensionMismatch { expected: n, got: b.len() });
                }
                if let Some(bad) = b.iter().find(|c| c.dim() != n) {
                    return Err(Error::DimensionMismatch { expected: n, got: bad.dim() });
                }
            }
        }
        Ok(Self { bases, form: Form::Raw })
    }

    pub fn with_form(mut self, form: Form) -> Self {
        self.form = form;
        self
    }

    pub fn form(&self) -> Form {
        self.form
    }

    pub fn bases(&self) -> &[Vec<V>] {
        &self.bases
    }

    pub fn len(&self) -> usize {
        self.bases.len()
    }

    pub fn is_empty(&self) -> bool {
        self.bases.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.bases.first().map_or(0, Vec::len)
    }

    /// All basis vectors as one sequence, basis by basis.
    pub fn union(&self) -> VectorSystem<V> {
        VectorSystem::new(self.bases.iter().flatten().cloned().collect())
            .expect("bases share a dimension")
    }

    pub fn to_float(&self) -> BasisSystem<FloatVector> {
        BasisSystem {
            bases: self.bases.iter().map(|b| b.iter().map(Vector::to_float).collect()).collect(),
            form: self.form,
        }
    }
}

impl BasisSystem<ExactVector> {
    /// `{I} ∪ {H₁, …}` from flat matrices, each taken as a normalized basis.
    pub fn from_muh(hs: &[FlatMatrix]) -> Result<Self> {
        let n = hs.first().map_or(0, FlatMatrix::nrows);
        let identity = (0..n).map(|i| ExactVector::basis_vector(n, i)).collect();
        let mut bases = vec![identity];
        bases.extend(hs.iter().map(|h| h.clone().with_normalized(true).columns()));
        Ok(Self::new(bases)?.with_form(Form::MuhStandard))
    }

    pub fn from_matrices(ms: &[FlatMatrix]) -> Result<Self> {
        Self::new(ms.iter().map(FlatMatrix::columns).collect())
    }
}

/// `|⟨x|y⟩|²`.
pub fn angle_sq<V: Vector>(x: &V, y: &V) -> Result<V::Scalar> {
    if x.dim() != y.dim() {
        return Err(Error::DimensionMismatch { expected: x.dim(), got: y.dim() });
    }
    Ok(x.angle_sq(y))
}

#[derive(Clone, Debug)]
pub struct MubFailure<S> {
    pub bases: (usize, usize),
    pub columns: (usize, usize),
    pub angle_sq: S,
}

#[derive(Clone, Debug)]
pub struct MubVerdict<S> {
    pub dim: usize,
    pub count: usize,
    pub is_mub: bool,
    pub is_complete: bool,
    /// More than `n + 1` bases were supplied with `n ≥ 2`.
    pub exceeds_bound: bool,
    pub failure_count: usize,
    /// Lexicographically first failures, at most [`MAX_REPORTED_FAILURES`].
    pub failures: Vec<MubFailure<S>>,
}

impl<S: Scalar> MubVerdict<S> {
    pub fn to_json(&self) -> Value {
        json!({
            "dim": self.dim,
            "bases": self.count,
            "is_mub": self.is_mub,
            "is_complete": self.is_complete,
            "exceeds_bound": self.exceeds_bound,
            "failure_count": self.failure_count,
            "failures": self.failures.iter().map(|f| json!({
                "bases": [f.bases.0, f.bases.1],
                "columns": [f.columns.0, f.columns.1],
                "angle_sq": f.angle_sq.to_json(),
            })).collect::<Vec<_>>(),
        })
    }
}

/// First violation of orthonormality inside one basis, as `(col_a, col_b)`;
/// `col_a == col_b` flags a non-unit column.
pub fn orthonormality_violation<V: Vector>(basis: &[V], tol: f64) -> Option<(usize, usize)> {
    let one = V::Scalar::one();
    for (a, x) in basis.iter().enumerate() {
        if !x.norm_sq().minus(&one).is_zero_tol(tol) {
            return Some((a, a));
        }
        for (b, y) in basis.iter().enumerate().skip(a + 1) {
            if !x.is_orthogonal(y, tol) {
                return Some((a, b));
            }
        }
    }
    None
}

/// Checks every inter-basis column pair for `n·|⟨x|y⟩|² = 1`.
///
/// Fails with [`Error::NotOrthonormal`] when some basis is not orthonormal.
/// Systems with more than `n + 1` bases (`n ≥ 2`) are rejected before any
/// pair is examined.
pub fn is_mub_system<V: Vector>(system: &BasisSystem<V>, tol: f64) -> Result<MubVerdict<V::Scalar>> {
    let n = system.dim();
    let count = system.len();
    if n >= 2 && count as u64 > crate::welch::max_mub_bound(n as u64) {
        return Ok(MubVerdict {
            dim: n,
            count,
            is_mub: false,
            is_complete: false,
            exceeds_bound: true,
            failure_count: 0,
            failures: vec![],
        });
    }
    let bad: Option<(usize, (usize, usize))> = system
        .bases
        .par_iter()
        .enumerate()
        .filter_map(|(i, b)| orthonormality_violation(b, tol).map(|v| (i, v)))
        .min();
    if let Some((basis, (col_a, col_b))) = bad {
        return Err(Error::NotOrthonormal { basis, col_a, col_b });
    }
    let pairs: Vec<(usize, usize)> =
        (0..count).flat_map(|i| (i + 1..count).map(move |j| (i, j))).collect();
    let per_pair: Vec<(usize, Vec<MubFailure<V::Scalar>>)> = pairs
        .par_iter()
        .map(|&(i, j)| {
            let mut total = 0;
            let mut kept = Vec::new();
            for (a, x) in system.bases[i].iter().enumerate() {
                for (b, y) in system.bases[j].iter().enumerate() {
                    if !x.is_unbiased(y, n, tol) {
                        total += 1;
                        if kept.len() < MAX_REPORTED_FAILURES {
                            kept.push(MubFailure {
                                bases: (i, j),
                                columns: (a, b),
                                angle_sq: x.angle_sq(y),
                            });
                        }
                    }
                }
            }
            (total, kept)
        })
        .collect();
    let failure_count = per_pair.iter().map(|p| p.0).sum();
    let failures =
        per_pair.into_iter().flat_map(|p| p.1).take(MAX_REPORTED_FAILURES).collect::<Vec<_>>();
    let is_mub = failure_count == 0;
    Ok(MubVerdict {
        dim: n,
        count,
        is_mub,
        is_complete: is_mub && count == n + 1,
        exceeds_bound: false,
        failure_count,
        failures,
    })
}

/// Result of rewriting a system relative to its first basis.
#[derive(Clone, Debug)]
pub struct MuhNormalization<V: Vector> {
    pub system: BasisSystem<V>,
    /// `(basis, column)` of columns that are not flat with squared modulus `1/n`.
    pub non_flat: Vec<(usize, usize)>,
}

/// Applies `B₀†` to every basis so the first becomes the identity, and
/// reports which columns of the remaining bases are not flat.
pub fn normalize_to_muh<V: Vector>(system: &BasisSystem<V>, tol: f64) -> Result<MuhNormalization<V>> {
    let b0 = system.bases.first().ok_or(Error::EmptySystem)?;
    let n = system.dim();
    let target = BigRational::new(BigInt::one(), BigInt::from(n));
    let mut non_flat = Vec::new();
    let mut bases = Vec::with_capacity(system.len());
    for (i, b) in system.bases.iter().enumerate() {
        let nb: Vec<V> = b.iter().map(|v| V::change_basis(b0, v)).collect::<Result<_>>()?;
        if i > 0 {
            for (c, v) in nb.iter().enumerate() {
                if !v.is_flat_with(&target, tol) {
                    non_flat.push((i, c));
                }
            }
        }
        bases.push(nb);
    }
    Ok(MuhNormalization {
        system: BasisSystem::new(bases)?.with_form(Form::MuhStandard),
        non_flat,
    })
}

/// `Tr(Y_x† Y_y) = |⟨x|y⟩|² − 1/n` for the traceless density matrices
/// `Y_x = |x⟩⟨x| − I/n`.
pub fn density_trace<V: Vector>(x: &V, y: &V, tol: f64) -> Result<V::Scalar> {
    if x.dim() != y.dim() {
        return Err(Error::DimensionMismatch { expected: x.dim(), got: y.dim() });
    }
    let one = V::Scalar::one();
    for (i, v) in [x, y].into_iter().enumerate() {
        if !v.norm_sq().minus(&one).is_zero_tol(tol) {
            return Err(Error::NotUnit(i));
        }
    }
    let inv_n = V::Scalar::from_ratio(&BigRational::new(BigInt::one(), BigInt::from(x.dim())));
    Ok(x.angle_sq(y).minus(&inv_n))
}

/// True iff `Y_x` and `Y_y` are orthogonal in the trace inner product.
pub fn density_orthogonal<V: Vector>(x: &V, y: &V, tol: f64) -> Result<bool> {
    Ok(density_trace(x, y, tol)?.is_zero_tol(tol))
}

/// Why the Schur-product criterion rejected a family of flat matrices.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum GlavnajaWitness {
    /// Matrix `matrix` has non-orthogonal columns `a`, `b`.
    NotHadamard { matrix: usize, a: usize, b: usize },
    /// `w_i∘w_j` and `w_k∘w_l` are not orthogonal.
    NotOrthogonal([usize; 2], [usize; 2]),
}

impl GlavnajaWitness {
    pub fn to_json(&self) -> Value {
        match self {
            GlavnajaWitness::NotHadamard { matrix, a, b } => {
                json!({"kind": "not_hadamard", "matrix": matrix, "pair": [a, b]})
            }
            GlavnajaWitness::NotOrthogonal(u, v) => {
                json!({"kind": "not_orthogonal", "vertices": [u, v]})
            }
        }
    }
}

#[derive(Clone, Debug)]
pub struct GlavnajaVerdict {
    pub complete: bool,
    pub witness: Option<GlavnajaWitness>,
}

/// Schur-product criterion on column data: `n` Hadamards of order `n`
/// (each given as its columns) form a complete MUH system iff the
/// products `w_i∘w_j` (`i ≤ j`) of rows of their concatenation are
/// pairwise orthogonal. Inputs are assumed flat.
pub fn glavnaja_check_columns<V: Vector>(hs: &[Vec<V>], tol: f64) -> Result<GlavnajaVerdict> {
    let n = hs.len();
    for h in hs {
        if h.len() != n {
            return Err(Error::DimensionMismatch { expected: n, got: h.len() });
        }
        if let Some(bad) = h.iter().find(|c| c.dim() != n) {
            return Err(Error::DimensionMismatch { expected: n, got: bad.dim() });
        }
    }
    for (m, h) in hs.iter().enumerate() {
        for a in 0..n {
            for b in a + 1..n {
                if !h[a].is_orthogonal(&h[b], tol) {
                    return Ok(GlavnajaVerdict {
                        complete: false,
                        witness: Some(GlavnajaWitness::NotHadamard { matrix: m, a, b }),
                    });
                }
            }
        }
    }
    let cols: Vec<V> = hs.iter().flatten().cloned().collect();
    let verts = multisets(n, 2);
    let rows = V::multiset_rows(&cols, &verts);
    let scale = rows
        .first()
        .map_or(1.0, |r| V::row_inner(r, r).to_complex().norm().max(1.0));
    let bad: Option<(usize, usize)> = (0..rows.len())
        .into_par_iter()
        .filter_map(|i| {
            (i + 1..rows.len())
                .find(|&j| !V::row_inner(&rows[i], &rows[j]).is_zero_tol(tol * scale))
                .map(|j| (i, j))
        })
        .min();
    Ok(GlavnajaVerdict {
        complete: bad.is_none(),
        witness: bad.map(|(i, j)| {
            GlavnajaWitness::NotOrthogonal([verts[i][0], verts[i][1]], [verts[j][0], verts[j][1]])
        }),
    })
}

/// Schur-product criterion for `n` flat `n×n` matrices.
pub fn glavnaja_check(hs: &[FlatMatrix]) -> Result<GlavnajaVerdict> {
    let n = hs.len();
    for (m, h) in hs.iter().enumerate() {
        if h.nrows() != n || h.ncols() != n {
            return Err(Error::DimensionMismatch { expected: n, got: h.nrows().max(h.ncols()) });
        }
        if let Some((a, b)) = first_non_orthogonal_rows(&h.transpose())? {
            return Ok(GlavnajaVerdict {
                complete: false,
                witness: Some(GlavnajaWitness::NotHadamard { matrix: m, a, b }),
            });
        }
    }
    let cols: Vec<Vec<ExactVector>> =
        hs.iter().map(|h| h.clone().with_normalized(false).columns()).collect();
    glavnaja_check_columns(&cols, 0.0)
}
