//! Relative difference sets and their correspondence with fractional
//! planar functions.
//!
//! A fractional planar `f: G → Ñ` with `f(0) = 0` has fractional part
//! `x ↦ {Sx}` for a rational matrix `S`. The group `K′` on pairs `(x; y)`,
//! `x ∈ G`, `y ∈ N`, with carry rule
//! `(x; y) + (z; t) = (x + z; y + t + Σᵢ sᵢ·[xᵢ + zᵢ ≥ dᵢ])`, where `sᵢ = dᵢ·S_{·i}`,
//! contains `R = {(x; f(x) − Sx)}` as a semiregular relative difference set
//! with forbidden subgroup `{(0; y)}`. Conversely a semiregular set in any
//! `K` yields such an `f` after choosing coset representatives.
//!
//! Semiregular `(n, n, n, 1)` sets are only known to exist for prime powers
//! `n`; nothing here depends on that, the routines only check certificates.

use num_integer::Integer;
use num_rational::Rational64;
use num_traits::Zero;
use serde_json::{json, Value};

use crate::constructions::{check_planarity, PlanarityLevel, TorusFunction};
use crate::error::{Error, Result};
use crate::group::{presentations_of_order, AbelianGroup, GroupElement, TorusElement};

/// `S` with `S_{ji} = s_{ji}/dᵢ`: rows indexed by the coordinates of `N`,
/// columns by the generators of `G`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct StructureMatrix {
    entries: Vec<Vec<Rational64>>,
}

impl StructureMatrix {
    pub fn entries(&self) -> &[Vec<Rational64>] {
        &self.entries
    }

    pub fn is_zero(&self) -> bool {
        self.entries.iter().flatten().all(Zero::is_zero)
    }

    /// `Sx` with `x` read as integers in `[0, dᵢ)`.
    pub fn apply(&self, x: &GroupElement) -> Vec<Rational64> {
        self.entries
            .iter()
            .map(|row| row.iter().zip(&x.0).map(|(s, &xi)| s * Rational64::from_integer(xi as i64)).sum())
            .collect()
    }

    pub fn to_json(&self) -> Value {
        Value::Array(
            self.entries
                .iter()
                .map(|row| row.iter().map(|r| json!([r.numer(), r.denom()])).collect())
                .collect(),
        )
    }
}

/// The group `K′` on pairs `(x; y)` with the carry rule above.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ExtensionGroup {
    base: AbelianGroup,
    fiber: AbelianGroup,
    carry: Vec<GroupElement>,
}

impl ExtensionGroup {
    /// `carry[i]` is added to the fiber when coordinate `i` of the base wraps.
    pub fn new(base: AbelianGroup, fiber: AbelianGroup, carry: Vec<GroupElement>) -> Result<Self> {
        if carry.len() != base.rank() {
            return Err(Error::DimensionMismatch { expected: base.rank(), got: carry.len() });
        }
        if let Some(bad) = carry.iter().find(|c| !fiber.contains(c)) {
            return Err(Error::NotInGroup(bad.0.clone()));
        }
        Ok(Self { base, fiber, carry })
    }

    pub fn base(&self) -> &AbelianGroup {
        &self.base
    }

    pub fn fiber(&self) -> &AbelianGroup {
        &self.fiber
    }

    pub fn carry(&self) -> &[GroupElement] {
        &self.carry
    }

    pub fn order(&self) -> usize {
        self.base.order() * self.fiber.order()
    }

    /// Splits an element index into base and fiber elements.
    pub fn split(&self, i: usize) -> (GroupElement, GroupElement) {
        let n = self.fiber.order();
        (self.base.element_at(i / n), self.fiber.element_at(i % n))
    }

    pub fn join(&self, x: &GroupElement, y: &GroupElement) -> usize {
        self.base.index_of(x) * self.fiber.order() + self.fiber.index_of(y)
    }

    pub fn add(&self, i: usize, j: usize) -> usize {
        let ((x, y), (z, t)) = (self.split(i), self.split(j));
        let mut b = self.fiber.add_unchecked(&y, &t);
        for (k, &d) in self.base.moduli().iter().enumerate() {
            if x.0[k] + z.0[k] >= d {
                b = self.fiber.add_unchecked(&b, &self.carry[k]);
            }
        }
        self.join(&self.base.add_unchecked(&x, &z), &b)
    }

    pub fn neg(&self, i: usize) -> usize {
        let (x, y) = self.split(i);
        let mut t = self.fiber.neg(&y);
        for (k, &xk) in x.0.iter().enumerate() {
            if xk != 0 {
                t = self.fiber.sub(&t, &self.carry[k]);
            }
        }
        self.join(&self.base.neg(&x), &t)
    }

    pub fn structure(&self) -> StructureMatrix {
        let entries = (0..self.fiber.rank())
            .map(|j| {
                self.base
                    .moduli()
                    .iter()
                    .enumerate()
                    .map(|(i, &d)| Rational64::new(self.carry[i].0[j] as i64, d as i64))
                    .collect()
            })
            .collect();
        StructureMatrix { entries }
    }

    /// `ψ(x; y) = y + Sx` in `Ñ`.
    pub fn psi(&self, i: usize) -> TorusElement {
        let (x, y) = self.split(i);
        let sx = self.structure().apply(&x);
        let coords: Vec<Rational64> =
            y.0.iter().zip(&sx).map(|(&a, s)| Rational64::from_integer(a as i64) + s).collect();
        self.fiber.torus(&coords).expect("fiber rank")
    }
}

/// The ambient group of a relative difference set. Elements are indexed in
/// lexicographic order of their coordinate vectors.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum AmbientGroup {
    Product(AbelianGroup),
    Extension(ExtensionGroup),
}

impl AmbientGroup {
    pub fn order(&self) -> usize {
        match self {
            AmbientGroup::Product(g) => g.order(),
            AmbientGroup::Extension(e) => e.order(),
        }
    }

    /// Length of a coordinate vector.
    pub fn width(&self) -> usize {
        match self {
            AmbientGroup::Product(g) => g.rank(),
            AmbientGroup::Extension(e) => e.base.rank() + e.fiber.rank(),
        }
    }

    pub fn add(&self, i: usize, j: usize) -> usize {
        match self {
            AmbientGroup::Product(g) => {
                g.index_of(&g.add_unchecked(&g.element_at(i), &g.element_at(j)))
            }
            AmbientGroup::Extension(e) => e.add(i, j),
        }
    }

    pub fn neg(&self, i: usize) -> usize {
        match self {
            AmbientGroup::Product(g) => g.index_of(&g.neg(&g.element_at(i))),
            AmbientGroup::Extension(e) => e.neg(i),
        }
    }

    pub fn sub(&self, i: usize, j: usize) -> usize {
        self.add(i, self.neg(j))
    }

    /// `k·i` for `k ≥ 0`.
    pub fn times(&self, k: u64, i: usize) -> usize {
        (0..k).fold(0, |acc, _| self.add(acc, i))
    }

    pub fn coords(&self, i: usize) -> Vec<u64> {
        match self {
            AmbientGroup::Product(g) => g.element_at(i).0,
            AmbientGroup::Extension(e) => {
                let (x, y) = e.split(i);
                x.0.into_iter().chain(y.0).collect()
            }
        }
    }

    pub fn index_of(&self, coords: &[u64]) -> Result<usize> {
        if coords.len() != self.width() {
            return Err(Error::DimensionMismatch { expected: self.width(), got: coords.len() });
        }
        let check = |g: &AbelianGroup, c: &[u64]| -> Result<GroupElement> {
            let el = GroupElement(c.to_vec());
            if g.contains(&el) {
                Ok(el)
            } else {
                Err(Error::NotInGroup(coords.to_vec()))
            }
        };
        match self {
            AmbientGroup::Product(g) => Ok(g.index_of(&check(g, coords)?)),
            AmbientGroup::Extension(e) => {
                let (xs, ys) = coords.split_at(e.base.rank());
                Ok(e.join(&check(&e.base, xs)?, &check(&e.fiber, ys)?))
            }
        }
    }

    /// Order of the element with index `i`.
    pub fn element_order(&self, i: usize) -> u64 {
        let mut k = 1;
        let mut acc = i;
        while acc != 0 {
            acc = self.add(acc, i);
            k += 1;
        }
        k
    }
}

/// `(m, n, r, λ)`: `|K| = nm`, `|N| = n`, `|R| = r`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct RdsParams {
    pub m: usize,
    pub n: usize,
    pub r: usize,
    pub lambda: usize,
}

impl RdsParams {
    pub fn to_json(&self) -> Value {
        json!([self.m, self.n, self.r, self.lambda])
    }
}

/// A candidate relative difference set `R ⊆ K` with forbidden subgroup `N`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RelativeDifferenceSet {
    group: AmbientGroup,
    forbidden: Vec<usize>,
    set: Vec<usize>,
    params: RdsParams,
}

impl RelativeDifferenceSet {
    /// Element indices for `N` and `R`; `N` is sorted and deduplicated.
    pub fn new(group: AmbientGroup, forbidden: Vec<usize>, set: Vec<usize>, params: RdsParams) -> Result<Self> {
        let k = group.order();
        if let Some(&bad) = forbidden.iter().chain(&set).find(|&&i| i >= k) {
            return Err(Error::Domain(format!("element index {bad} outside a group of order {k}")));
        }
        let mut forbidden = forbidden;
        forbidden.sort_unstable();
        forbidden.dedup();
        Ok(Self { group, forbidden, set, params })
    }

    /// Parameters read off the sizes, with `λ = r(r − 1)/(|K| − |N|)`
    /// rounded down.
    pub fn with_inferred_params(group: AmbientGroup, forbidden: Vec<usize>, set: Vec<usize>) -> Result<Self> {
        let mut d = Self::new(group, forbidden, set, RdsParams { m: 0, n: 0, r: 0, lambda: 0 })?;
        let (k, n, r) = (d.group.order(), d.forbidden.len(), d.set.len());
        d.params = RdsParams {
            m: if n == 0 { 0 } else { k / n },
            n,
            r,
            lambda: if k > n { r * r.saturating_sub(1) / (k - n) } else { 0 },
        };
        Ok(d)
    }

    pub fn group(&self) -> &AmbientGroup {
        &self.group
    }

    pub fn forbidden(&self) -> &[usize] {
        &self.forbidden
    }

    pub fn set(&self) -> &[usize] {
        &self.set
    }

    pub fn params(&self) -> RdsParams {
        self.params
    }

    fn check_subgroup(&self) -> Result<Vec<bool>> {
        let mut member = vec![false; self.group.order()];
        for &i in &self.forbidden {
            member[i] = true;
        }
        if !member[0] {
            return Err(Error::NotSubgroup("N does not contain 0".into()));
        }
        for &a in &self.forbidden {
            for &b in &self.forbidden {
                if !member[self.group.sub(a, b)] {
                    return Err(Error::NotSubgroup(format!(
                        "{:?} − {:?} is not in N",
                        self.group.coords(a),
                        self.group.coords(b)
                    )));
                }
            }
        }
        Ok(member)
    }

    /// Coset index of every element of `K` (numbered by smallest member)
    /// and the smallest member of each coset.
    fn cosets(&self) -> (Vec<usize>, Vec<usize>) {
        let mut coset = vec![usize::MAX; self.group.order()];
        let mut reps = Vec::new();
        for a in 0..self.group.order() {
            if coset[a] == usize::MAX {
                for &n in &self.forbidden {
                    coset[self.group.add(a, n)] = reps.len();
                }
                reps.push(a);
            }
        }
        (coset, reps)
    }
}

/// What made a candidate fail.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum RdsViolation {
    /// A stated parameter disagrees with the data.
    Size { what: &'static str, expected: usize, got: usize },
    /// A non-zero element of `N` arises as a difference.
    Forbidden { element: Vec<u64>, count: usize },
    /// An element outside `N` arises the wrong number of times.
    Multiplicity { element: Vec<u64>, count: usize, expected: usize },
}

impl RdsViolation {
    pub fn to_json(&self) -> Value {
        match self {
            RdsViolation::Size { what, expected, got } => {
                json!({"kind": "size", "what": what, "expected": expected, "got": got})
            }
            RdsViolation::Forbidden { element, count } => {
                json!({"kind": "forbidden_difference", "element": element, "count": count})
            }
            RdsViolation::Multiplicity { element, count, expected } => {
                json!({"kind": "multiplicity", "element": element, "count": count, "expected": expected})
            }
        }
    }
}

#[derive(Clone, Debug)]
pub struct RdsReport {
    pub valid: bool,
    /// Number of ordered pairs `(r₁, r₂)` with `r₁ − r₂ = b`, per element `b`.
    pub counts: Vec<usize>,
    /// Sum of `counts` over each coset of `N`, cosets ordered by smallest member.
    pub coset_counts: Vec<usize>,
    pub semiregular: bool,
    pub splitting: bool,
    pub violation: Option<RdsViolation>,
}

impl RdsReport {
    pub fn to_json(&self) -> Value {
        json!({
            "valid": self.valid,
            "counts": self.counts,
            "coset_counts": self.coset_counts,
            "semiregular": self.semiregular,
            "splitting": self.splitting,
            "violation": self.violation.as_ref().map(RdsViolation::to_json),
        })
    }
}

/// Counts all differences of ordered pairs from `R` and checks them against
/// the stated parameters.
pub fn verify_rds(d: &RelativeDifferenceSet) -> Result<RdsReport> {
    let member = d.check_subgroup()?;
    let g = &d.group;
    let mut counts = vec![0usize; g.order()];
    for &a in &d.set {
        for &b in &d.set {
            counts[g.sub(a, b)] += 1;
        }
    }
    let (coset, reps) = d.cosets();
    let mut coset_counts = vec![0usize; reps.len()];
    for (b, &c) in counts.iter().enumerate() {
        coset_counts[coset[b]] += c;
    }
    let p = d.params;
    let sizes = [
        ("|K|", p.m * p.n, g.order()),
        ("|N|", p.n, d.forbidden.len()),
        ("|R|", p.r, d.set.len()),
    ];
    let mut violation = sizes
        .iter()
        .find(|s| s.1 != s.2)
        .map(|&(what, expected, got)| RdsViolation::Size { what, expected, got });
    if violation.is_none() {
        violation = (1..g.order()).find_map(|b| {
            let c = counts[b];
            if member[b] {
                (c != 0).then(|| RdsViolation::Forbidden { element: g.coords(b), count: c })
            } else {
                (c != p.lambda).then(|| RdsViolation::Multiplicity {
                    element: g.coords(b),
                    count: c,
                    expected: p.lambda,
                })
            }
        });
    }
    let valid = violation.is_none();
    Ok(RdsReport {
        valid,
        counts,
        coset_counts,
        semiregular: valid && p.r == p.m,
        splitting: is_splitting(d)?,
        violation,
    })
}

/// `r = m`.
pub fn is_semiregular(d: &RelativeDifferenceSet) -> bool {
    d.set.len() * d.forbidden.len() == d.group.order()
}

/// Elements (as ids) generating a subgroup isomorphic to `Z_{d₁} × …`, one
/// per modulus, found by depth-first search in id order.
fn find_basis(
    ids: &[usize],
    zero: usize,
    add: &dyn Fn(usize, usize) -> usize,
    moduli: &[u64],
) -> Option<Vec<usize>> {
    let order = |e: usize| {
        let (mut acc, mut k) = (e, 1u64);
        while acc != zero {
            acc = add(acc, e);
            k += 1;
        }
        k
    };
    fn rec(
        ids: &[usize],
        add: &dyn Fn(usize, usize) -> usize,
        order: &dyn Fn(usize) -> u64,
        moduli: &[u64],
        span: Vec<usize>,
        chosen: &mut Vec<usize>,
    ) -> bool {
        let Some(&d) = moduli.get(chosen.len()) else { return true };
        for &e in ids {
            if order(e) != d {
                continue;
            }
            let mut next = span.clone();
            let mut multiple = e;
            for _ in 1..d {
                for &s in &span {
                    next.push(add(s, multiple));
                }
                multiple = add(multiple, e);
            }
            let mut sorted = next.clone();
            sorted.sort_unstable();
            sorted.dedup();
            if sorted.len() != span.len() * d as usize {
                continue;
            }
            chosen.push(e);
            if rec(ids, add, order, moduli, next, chosen) {
                return true;
            }
            chosen.pop();
        }
        false
    }
    let mut chosen = Vec::new();
    rec(ids, add, &order, moduli, vec![zero], &mut chosen).then_some(chosen)
}

/// Quotient `K/N` as coset ids with its addition.
struct Quotient<'a> {
    d: &'a RelativeDifferenceSet,
    coset: Vec<usize>,
    reps: Vec<usize>,
}

impl<'a> Quotient<'a> {
    fn new(d: &'a RelativeDifferenceSet) -> Self {
        let (coset, reps) = d.cosets();
        Self { d, coset, reps }
    }

    fn add(&self, a: usize, b: usize) -> usize {
        self.coset[self.d.group.add(self.reps[a], self.reps[b])]
    }

    /// A basis of `K/N` with the given moduli, or with the first
    /// presentation (fewest factors first) that admits one.
    fn basis(&self, moduli: Option<&[u64]>) -> Result<(AbelianGroup, Vec<usize>)> {
        let ids: Vec<usize> = (0..self.reps.len()).collect();
        let add = |a, b| self.add(a, b);
        let candidates = match moduli {
            Some(m) => vec![AbelianGroup::new(m.to_vec())?],
            None => {
                let mut ps = presentations_of_order(self.reps.len() as u64);
                ps.sort_by(|a, b| (a.rank(), a.moduli()).cmp(&(b.rank(), b.moduli())));
                ps
            }
        };
        for g in candidates {
            if g.order() != self.reps.len() {
                return Err(Error::Parameter(format!(
                    "presentation {:?} does not have order |K/N| = {}",
                    g.moduli(),
                    self.reps.len()
                )));
            }
            if let Some(b) = find_basis(&ids, 0, &add, g.moduli()) {
                return Ok((g, b));
            }
        }
        Err(Error::Parameter("K/N has no basis with the requested presentation".into()))
    }
}

/// Whether `N` has a complement in `K`: some basis `q₁, …` of `K/N` lifts to
/// elements `cᵢ` with `dᵢ·cᵢ = 0`.
pub fn is_splitting(d: &RelativeDifferenceSet) -> Result<bool> {
    d.check_subgroup()?;
    let q = Quotient::new(d);
    let (g, basis) = q.basis(None)?;
    let k = &d.group;
    Ok(basis.iter().zip(g.moduli()).all(|(&b, &di)| {
        let rep = q.reps[b];
        d.forbidden.iter().any(|&n| k.times(di, k.add(rep, n)) == 0)
    }))
}

/// A semiregular relative difference set built from a fractional planar function.
#[derive(Clone, Debug)]
pub struct PlanarRds {
    pub rds: RelativeDifferenceSet,
    pub structure: StructureMatrix,
}

/// `R = {(x; f(x) − Sx)}` in `K′`, relative to `{(0; y)}`.
pub fn planar_to_rds(f: &TorusFunction) -> Result<PlanarRds> {
    let (g, n) = (f.domain().clone(), f.codomain().clone());
    if g.order() != n.order() {
        return Err(Error::DimensionMismatch { expected: g.order(), got: n.order() });
    }
    let v = check_planarity(f, PlanarityLevel::General)?;
    if let Some(w) = v.witness {
        return Err(Error::ConditionViolated { level: "general".into(), witness: w });
    }
    let f = f.normalized();
    let frac = |r: Rational64| r - r.floor();
    // Column i of S is the fractional part of f(eᵢ).
    let mut carry = Vec::with_capacity(g.rank());
    for (i, &di) in g.moduli().iter().enumerate() {
        let mut e = vec![0i64; g.rank()];
        e[i] = 1;
        let fe = f.value(&g.element(&e)?);
        let s: Vec<i64> = fe
            .0
            .iter()
            .map(|&c| {
                let t = frac(c) * Rational64::from_integer(di as i64);
                if t.is_integer() {
                    Ok(t.to_integer())
                } else {
                    Err(Error::SelfCheck(format!("fractional part of f(e_{i}) has denominator not dividing {di}")))
                }
            })
            .collect::<Result<_>>()?;
        carry.push(n.element(&s)?);
    }
    let ext = ExtensionGroup::new(g.clone(), n.clone(), carry)?;
    let structure = ext.structure();
    let mut set = Vec::with_capacity(g.order());
    for (x, value) in g.elements().zip(f.table()) {
        let sx = structure.apply(&x);
        let y: Vec<Rational64> = value.0.iter().zip(&sx).map(|(a, b)| a - b).collect();
        if !y.iter().all(Rational64::is_integer) {
            return Err(Error::SelfCheck(format!("f − Sx is not integral at {:?}", x.0)));
        }
        let y = n.element(&y.iter().map(Rational64::to_integer).collect::<Vec<_>>())?;
        set.push(ext.join(&x, &y));
    }
    let group = if structure.is_zero() {
        AmbientGroup::Product(AbelianGroup::new(
            g.moduli().iter().chain(n.moduli()).copied().collect(),
        )?)
    } else {
        AmbientGroup::Extension(ext)
    };
    let forbidden = (0..n.order()).collect();
    let params = RdsParams { m: g.order(), n: n.order(), r: g.order(), lambda: 1 };
    let rds = RelativeDifferenceSet::new(group, forbidden, set, params)?;
    let report = verify_rds(&rds)?;
    if !report.valid {
        return Err(Error::SelfCheck(format!("constructed set fails: {:?}", report.violation)));
    }
    Ok(PlanarRds { rds, structure })
}

/// A fractional planar function recovered from a semiregular set.
#[derive(Clone, Debug)]
pub struct PlanarFromRds {
    pub function: TorusFunction,
    pub structure: StructureMatrix,
    /// Smallest members `gᵢ` of the cosets forming the chosen basis of `K/N`.
    pub generators: Vec<usize>,
    /// Elements of `K` forming the chosen basis of `N`.
    pub fiber_basis: Vec<usize>,
}

impl PlanarFromRds {
    /// `φ(x; y) = y + Σ xᵢgᵢ` in `K`.
    pub fn phi(&self, k: &AmbientGroup, x: &GroupElement, y: &GroupElement) -> usize {
        let mut acc = 0;
        for (&xi, &g) in x.0.iter().zip(&self.generators) {
            acc = k.add(acc, k.times(xi, g));
        }
        for (&yj, &b) in y.0.iter().zip(&self.fiber_basis) {
            acc = k.add(acc, k.times(yj, b));
        }
        acc
    }
}

/// `f(x) = ψ(φ⁻¹(r_x))` where `r_x` is the member of `R` in the coset of
/// `Σ xᵢgᵢ`. `n_moduli` fixes the presentation of `N`; `g_moduli` that of
/// `G ≅ K/N` (both chosen automatically when absent). Coset representatives
/// are the smallest members of their cosets.
pub fn rds_to_planar(
    d: &RelativeDifferenceSet,
    n_moduli: Option<&[u64]>,
    g_moduli: Option<&[u64]>,
) -> Result<PlanarFromRds> {
    let report = verify_rds(d)?;
    if !report.valid {
        return Err(Error::Parameter(format!("not a relative difference set: {:?}", report.violation)));
    }
    let k = &d.group;
    let q = Quotient::new(d);
    let mut in_coset: Vec<Option<usize>> = vec![None; q.reps.len()];
    for &r in &d.set {
        let c = q.coset[r];
        if in_coset[c].replace(r).is_some() {
            return Err(Error::NotSemiregular(format!("coset of {:?} meets R twice", k.coords(q.reps[c]))));
        }
    }
    if let Some(c) = in_coset.iter().position(Option::is_none) {
        return Err(Error::NotSemiregular(format!("coset of {:?} misses R", k.coords(q.reps[c]))));
    }

    let (g, basis) = q.basis(g_moduli)?;
    let generators: Vec<usize> = basis.iter().map(|&b| q.reps[b]).collect();

    let add = |a, b| k.add(a, b);
    let n_group = match n_moduli {
        Some(m) => AbelianGroup::new(m.to_vec())?,
        None => {
            let mut ps = presentations_of_order(d.forbidden.len() as u64);
            ps.sort_by(|a, b| (a.rank(), a.moduli()).cmp(&(b.rank(), b.moduli())));
            ps.into_iter()
                .find(|p| find_basis(&d.forbidden, 0, &add, p.moduli()).is_some())
                .ok_or_else(|| Error::Parameter("N admits no cyclic decomposition".into()))?
        }
    };
    if n_group.order() != d.forbidden.len() {
        return Err(Error::Parameter(format!(
            "presentation {:?} does not have order |N| = {}",
            n_group.moduli(),
            d.forbidden.len()
        )));
    }
    let fiber_basis = find_basis(&d.forbidden, 0, &add, n_group.moduli())
        .ok_or_else(|| Error::Parameter(format!("N is not isomorphic to {:?}", n_group.moduli())))?;
    let mut fiber_coords = vec![None; k.order()];
    for y in n_group.elements() {
        let mut acc = 0;
        for (&yj, &b) in y.0.iter().zip(&fiber_basis) {
            acc = k.add(acc, k.times(yj, b));
        }
        fiber_coords[acc] = Some(y);
    }
    let coords_in_n = |e: usize| fiber_coords[e].clone().expect("element of N");

    let carry: Vec<GroupElement> = generators
        .iter()
        .zip(g.moduli())
        .map(|(&gi, &di)| coords_in_n(k.times(di, gi)))
        .collect();
    let structure = ExtensionGroup::new(g.clone(), n_group.clone(), carry)?.structure();

    let mut values = Vec::with_capacity(g.order());
    for x in g.elements() {
        let mut gx = 0;
        for (&xi, &gi) in x.0.iter().zip(&generators) {
            gx = k.add(gx, k.times(xi, gi));
        }
        let r = in_coset[q.coset[gx]].expect("checked above");
        let y = coords_in_n(k.sub(r, gx));
        let sx = structure.apply(&x);
        let coords: Vec<Rational64> =
            y.0.iter().zip(&sx).map(|(&a, s)| Rational64::from_integer(a as i64) + s).collect();
        values.push(n_group.torus(&coords)?);
    }
    let function = TorusFunction::new(g, n_group, values)?;
    if function.domain().order() == function.codomain().order() {
        let v = check_planarity(&function, PlanarityLevel::General)?;
        if let Some(w) = v.witness {
            return Err(Error::SelfCheck(format!("recovered function violates `general` at {w:?}")));
        }
    }
    Ok(PlanarFromRds { function, structure, generators, fiber_basis })
}

/// True iff every entry in column `i` of `S` has a denominator dividing `d_i`.
pub fn structure_is_consistent(s: &StructureMatrix, g: &AbelianGroup) -> bool {
    s.entries.iter().all(|row| {
        row.iter().zip(g.moduli()).all(|(r, &d)| (d as i64).is_multiple_of(r.denom()))
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::FiniteField;

    fn z4_example() -> RelativeDifferenceSet {
        let k = AmbientGroup::Product(AbelianGroup::cyclic(4));
        RelativeDifferenceSet::new(k, vec![0, 2], vec![0, 1], RdsParams { m: 2, n: 2, r: 2, lambda: 1 }).unwrap()
    }

    fn z3_square() -> RelativeDifferenceSet {
        let g = AbelianGroup::new(vec![3, 3]).unwrap();
        let k = AmbientGroup::Product(g.clone());
        let set = (0..3u64).map(|x| g.index_of(&GroupElement(vec![x, x * x % 3]))).collect();
        let forbidden = (0..3u64).map(|y| g.index_of(&GroupElement(vec![0, y]))).collect();
        RelativeDifferenceSet::new(k, forbidden, set, RdsParams { m: 3, n: 3, r: 3, lambda: 1 }).unwrap()
    }

    #[test]
    fn verify_examples() {
        let r = verify_rds(&z4_example()).unwrap();
        assert!(r.valid && r.semiregular && !r.splitting);
        assert_eq!(r.counts, vec![2, 1, 0, 1]);
        let r = verify_rds(&z3_square()).unwrap();
        assert!(r.valid && r.semiregular && r.splitting);

        let k = AmbientGroup::Product(AbelianGroup::cyclic(4));
        let bad = RelativeDifferenceSet::new(k.clone(), vec![0, 2], vec![0, 2], RdsParams { m: 2, n: 2, r: 2, lambda: 1 }).unwrap();
        let r = verify_rds(&bad).unwrap();
        assert_eq!(r.violation, Some(RdsViolation::Multiplicity { element: vec![1], count: 0, expected: 1 }));
        assert_eq!(r.counts[2], 2);
        let not_sub = RelativeDifferenceSet::new(k, vec![0, 1], vec![0], RdsParams { m: 2, n: 2, r: 1, lambda: 0 }).unwrap();
        assert!(matches!(verify_rds(&not_sub), Err(Error::NotSubgroup(_))));
    }

    #[test]
    fn half_square_gives_z4() {
        let f = TorusFunction::half_square(&FiniteField::of_order(2).unwrap()).unwrap();
        let out = planar_to_rds(&f).unwrap();
        assert_eq!(out.structure.entries(), &[vec![Rational64::new(1, 2)]]);
        let AmbientGroup::Extension(e) = out.rds.group() else { panic!("expected K′") };
        // (1; 0) has order 4.
        assert_eq!(out.rds.group().element_order(e.join(&GroupElement(vec![1]), &GroupElement(vec![0]))), 4);
        assert!(!verify_rds(&out.rds).unwrap().splitting);
    }

    #[test]
    fn square_gives_splitting_set() {
        let f = TorusFunction::square(&FiniteField::of_order(3).unwrap());
        let out = planar_to_rds(&f).unwrap();
        assert!(out.structure.is_zero());
        assert_eq!(out.rds, z3_square());
    }

    #[test]
    fn z4_recovers_half_square() {
        let out = rds_to_planar(&z4_example(), None, None).unwrap();
        let g = out.function.domain().clone();
        let n = out.function.codomain();
        assert_eq!(out.function.value(&g.element(&[0]).unwrap()), &n.torus_zero());
        assert_eq!(out.function.value(&g.element(&[1]).unwrap()).0, vec![Rational64::new(1, 2)]);
    }

    #[test]
    fn trivial_set() {
        let k = AmbientGroup::Product(AbelianGroup::cyclic(1));
        let d = RelativeDifferenceSet::new(k, vec![0], vec![0], RdsParams { m: 1, n: 1, r: 1, lambda: 1 }).unwrap();
        let out = rds_to_planar(&d, None, None).unwrap();
        assert!(out.function.table().iter().all(|v| v.0.iter().all(Zero::is_zero)));
    }

    #[test]
    fn non_semiregular_rejected() {
        // {1, 2, 4} is a (7, 3, 1) difference set in Z₇, i.e. a (7, 1, 3, 1) relative one.
        let k = AmbientGroup::Product(AbelianGroup::cyclic(7));
        let d = RelativeDifferenceSet::new(k, vec![0], vec![1, 2, 4], RdsParams { m: 7, n: 1, r: 3, lambda: 1 }).unwrap();
        let r = verify_rds(&d).unwrap();
        assert!(r.valid && !r.semiregular);
        assert!(matches!(rds_to_planar(&d, None, None), Err(Error::NotSemiregular(_))));
    }
}
