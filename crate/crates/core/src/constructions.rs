//! Fourier matrices, homogeneous MUH systems built from functions into a
//! torus, the planarity conditions on such functions, and the known planar
//! families over finite fields.

use std::collections::HashMap;

use num_integer::Integer;
use num_rational::Rational64;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::field::{prime_power, FieldElement, FiniteField};
use crate::flatmat::{is_hadamard, schur, schur_power, FlatMatrix, Phase};
use crate::group::{character, character_of, AbelianGroup, GroupElement, TorusElement};
use crate::mubcheck::{is_mub_system, BasisSystem};
use crate::vector::ExactVector;

/// A function `f: G → Ñ`, tabulated in the enumeration order of `G`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TorusFunction {
    domain: AbelianGroup,
    codomain: AbelianGroup,
    table: Vec<TorusElement>,
}

impl TorusFunction {
    /// Values are reduced into the torus of `codomain`.
    pub fn new(domain: AbelianGroup, codomain: AbelianGroup, values: Vec<TorusElement>) -> Result<Self> {
        if values.len() != domain.order() {
            return Err(Error::DimensionMismatch { expected: domain.order(), got: values.len() });
        }
        let table = values.iter().map(|v| codomain.torus(&v.0)).collect::<Result<_>>()?;
        Ok(Self { domain, codomain, table })
    }

    pub fn from_fn(
        domain: AbelianGroup,
        codomain: AbelianGroup,
        f: impl Fn(&GroupElement) -> TorusElement,
    ) -> Result<Self> {
        let values = domain.elements().map(|g| f(&g)).collect();
        Self::new(domain, codomain, values)
    }

    /// A map `GF(q) → GF(q)` viewed on the additive group `Z_p^k`.
    pub fn from_field_map(field: &FiniteField, f: impl Fn(&FieldElement) -> FieldElement) -> Self {
        let g = field.additive_group();
        let values = field.elements().iter().map(|x| g.embed(&f(x).to_group_element())).collect();
        Self::new(g.clone(), g, values).expect("field map is total")
    }

    /// `x ↦ x²`.
    pub fn square(field: &FiniteField) -> Self {
        Self::from_field_map(field, |x| field.mul(x, x))
    }

    /// `x ↦ x²/2` into the torus of `Z_2^k`.
    pub fn half_square(field: &FiniteField) -> Result<Self> {
        let g = field.additive_group();
        let values = field.elements().iter().map(|x| field.half_square(x)).collect::<Result<_>>()?;
        Self::new(g.clone(), g, values)
    }

    pub fn domain(&self) -> &AbelianGroup {
        &self.domain
    }

    pub fn codomain(&self) -> &AbelianGroup {
        &self.codomain
    }

    pub fn table(&self) -> &[TorusElement] {
        &self.table
    }

    pub fn value(&self, g: &GroupElement) -> &TorusElement {
        &self.table[self.domain.index_of(g)]
    }

    pub fn is_integer_valued(&self) -> bool {
        self.table.iter().all(TorusElement::is_integral)
    }

    /// `f − f(0)`.
    pub fn normalized(&self) -> Self {
        let c = self.table[0].clone();
        Self {
            domain: self.domain.clone(),
            codomain: self.codomain.clone(),
            table: self.table.iter().map(|v| self.codomain.torus_sub(v, &c)).collect(),
        }
    }
}

/// Character table of `G`: entry `(i, j)` is `χ_j(i)`.
pub fn fourier_matrix(g: &AbelianGroup) -> FlatMatrix {
    let elems: Vec<GroupElement> = g.elements().collect();
    let rows: Vec<Vec<Phase>> = elems
        .iter()
        .map(|i| elems.iter().map(|j| character_of(j, i, g)).collect())
        .collect();
    FlatMatrix::from_phases(&rows, false).expect("square table")
}

/// Rows `(χ_j(x))_j` for shift points `x ∈ G̃`; Hadamard when every
/// difference of two shift points lies in `G̃*`.
pub fn shifted_fourier(g: &AbelianGroup, xs: &[TorusElement]) -> Result<FlatMatrix> {
    if xs.len() != g.order() {
        return Err(Error::DimensionMismatch { expected: g.order(), got: xs.len() });
    }
    let xs: Vec<TorusElement> = xs.iter().map(|x| g.torus(&x.0)).collect::<Result<_>>()?;
    for a in 0..xs.len() {
        for b in a + 1..xs.len() {
            if !g.in_torus_star(&g.torus_sub(&xs[a], &xs[b])) {
                return Err(Error::ShiftCollision { a, b });
            }
        }
    }
    let cols: Vec<TorusElement> = g.elements().map(|j| g.embed(&j)).collect();
    let rows: Vec<Vec<Phase>> = xs
        .iter()
        .map(|x| cols.iter().map(|j| character(j, x, g)).collect::<Result<_>>())
        .collect::<Result<_>>()?;
    let m = FlatMatrix::from_phases(&rows, false)?;
    if !is_hadamard(&m)? {
        return Err(Error::SelfCheck("shifted Fourier matrix is not Hadamard".into()));
    }
    Ok(m)
}

/// A flat `A` and a Hadamard `H` of the same order.
#[derive(Clone, Debug)]
pub struct HomogeneousSpec {
    a: FlatMatrix,
    h: FlatMatrix,
}

impl HomogeneousSpec {
    pub fn new(a: FlatMatrix, h: FlatMatrix) -> Result<Self> {
        for m in [&a, &h] {
            if m.nrows() != m.ncols() {
                return Err(Error::NotSquare { rows: m.nrows(), cols: m.ncols() });
            }
        }
        if a.nrows() != h.nrows() {
            return Err(Error::DimensionMismatch { expected: a.nrows(), got: h.nrows() });
        }
        if !is_hadamard(&h)? {
            return Err(Error::Parameter("H is not a Hadamard matrix".into()));
        }
        Ok(Self { a, h })
    }

    pub fn a(&self) -> &FlatMatrix {
        &self.a
    }

    pub fn h(&self) -> &FlatMatrix {
        &self.h
    }
}

/// The normalized matrices `diag(v_r)·H` for the columns `v_r` of `A`.
pub fn homogeneous_system(spec: &HomogeneousSpec) -> Vec<FlatMatrix> {
    (0..spec.a.ncols())
        .map(|r| {
            spec.h
                .diag_mul(&spec.a.column(r))
                .expect("orders agree")
                .with_normalized(true)
        })
        .collect()
}

/// `A_{ℓ,r} = χ_r(f(ℓ))`, rows indexed by `G`, columns by `N`.
pub fn function_matrix(f: &TorusFunction) -> Result<FlatMatrix> {
    let n = &f.codomain;
    let rs: Vec<TorusElement> = n.elements().map(|r| n.embed(&r)).collect();
    let rows: Vec<Vec<Phase>> = f
        .table
        .iter()
        .map(|v| rs.iter().map(|r| character(r, v, n)).collect::<Result<_>>())
        .collect::<Result<_>>()?;
    FlatMatrix::from_phases(&rows, false)
}

/// Matrices `(v^{(r)}_k)_ℓ = χ_k(ℓ)·χ_r(f(ℓ))/√n` for `r ∈ N`.
pub fn mub_from_function(f: &TorusFunction) -> Result<Vec<FlatMatrix>> {
    if f.domain.order() != f.codomain.order() {
        return Err(Error::DimensionMismatch { expected: f.domain.order(), got: f.codomain.order() });
    }
    let spec = HomogeneousSpec { a: function_matrix(f)?, h: fourier_matrix(&f.domain) };
    Ok(homogeneous_system(&spec))
}

/// Which pairs of pairs with equal sums must be separated by `f`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum PlanarityLevel {
    /// `f: G → N` and equal value sums force equal pairs.
    Uslovie,
    /// Value-sum differences lie in `N*`.
    General,
    /// Value-sum differences lie in `Ñ*`.
    MostGeneral,
}

impl PlanarityLevel {
    pub fn name(self) -> &'static str {
        match self {
            PlanarityLevel::Uslovie => "uslovie",
            PlanarityLevel::General => "general",
            PlanarityLevel::MostGeneral => "most-general",
        }
    }

    pub fn parse(s: &str) -> Result<Self> {
        match s {
            "uslovie" => Ok(PlanarityLevel::Uslovie),
            "general" => Ok(PlanarityLevel::General),
            "most-general" | "most_general" => Ok(PlanarityLevel::MostGeneral),
            other => Err(Error::Parameter(format!("unknown planarity condition `{other}`"))),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PlanarityVerdict {
    pub level: PlanarityLevel,
    pub holds: bool,
    /// Indices `[g₁, g₂, g₃, g₄]` with `g₁ + g₂ = g₃ + g₄`, `{g₁,g₂} ≠ {g₃,g₄}`.
    pub witness: Option<[usize; 4]>,
}

/// Decides a planarity condition by enumerating, for every `s ∈ G`, the
/// pairs `{g₁, g₂}` with `g₁ + g₂ = s`.
pub fn check_planarity(f: &TorusFunction, level: PlanarityLevel) -> Result<PlanarityVerdict> {
    if level == PlanarityLevel::Uslovie && !f.is_integer_valued() {
        return Err(Error::Parameter("condition `uslovie` needs an integer-valued function".into()));
    }
    let g = &f.domain;
    let n = &f.codomain;
    let table = g.addition_table();
    let mut classes: Vec<Vec<(usize, usize)>> = vec![Vec::new(); g.order()];
    for a in 0..g.order() {
        for b in a..g.order() {
            classes[table[a][b]].push((a, b));
        }
    }
    let separated = |d: &TorusElement| match level {
        PlanarityLevel::Uslovie | PlanarityLevel::General => n.in_group_star(d),
        PlanarityLevel::MostGeneral => n.in_torus_star(d),
    };
    let witness = classes
        .par_iter()
        .filter_map(|class| {
            let sums: Vec<TorusElement> =
                class.iter().map(|&(a, b)| n.torus_add(&f.table[a], &f.table[b])).collect();
            for i in 0..class.len() {
                for j in i + 1..class.len() {
                    if !separated(&n.torus_sub(&sums[i], &sums[j])) {
                        let ((a, b), (c, d)) = (class[i], class[j]);
                        return Some([a, b, c, d]);
                    }
                }
            }
            None
        })
        .min();
    Ok(PlanarityVerdict { level, holds: witness.is_none(), witness })
}

/// `x ↦ f(x + a) − f(x)` for each `a`, as torus values.
fn derivative_values(f: &TorusFunction, a: usize) -> Vec<TorusElement> {
    let table = f.domain.addition_table();
    (0..f.domain.order())
        .map(|x| f.codomain.torus_sub(&f.table[table[x][a]], &f.table[x]))
        .collect()
}

/// Every equation `f(x + a) − f(x) = b` with `a ≠ 0` has at most one solution.
pub fn is_diff_uniform(f: &TorusFunction) -> bool {
    (1..f.domain.order()).all(|a| {
        let mut seen = HashMap::new();
        derivative_values(f, a).into_iter().all(|v| seen.insert(v, ()).is_none())
    })
}

/// Every equation `f(x + a) − f(x) = b` with `a ≠ 0`, `b ∈ N` has exactly
/// `|G|/|N|` solutions.
pub fn is_perfect_nonlinear(f: &TorusFunction) -> Result<bool> {
    let (m, n) = (f.domain.order(), f.codomain.order());
    if m % n != 0 {
        return Err(Error::Parameter(format!("|N| = {n} does not divide |G| = {m}")));
    }
    Ok((1..m).all(|a| {
        let mut counts = vec![0usize; n];
        for v in derivative_values(f, a) {
            match v.to_group_element() {
                Some(b) => counts[f.codomain.index_of(&b)] += 1,
                None => return false,
            }
        }
        counts.iter().all(|&c| c == m / n)
    }))
}

/// Planar power maps and polynomials over `GF(p^k)`, `p` odd.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PlanarFamily {
    /// `x^{p^α + 1}` with `k / gcd(k, α)` odd.
    DembowskiOstrom { alpha: u32 },
    /// `x^{(3^α + 1)/2}` over `GF(3^k)` with `α` odd and `gcd(k, α) = 1`.
    CoulterMatthews { alpha: u32 },
    /// `x¹⁰ − u·x⁶ − u²·x²` over `GF(3^k)`, `k` odd, `u ≠ 0` given by its
    /// base-3 digits.
    DingYuan { u: u64 },
}

impl PlanarFamily {
    pub fn name(&self) -> &'static str {
        match self {
            PlanarFamily::DembowskiOstrom { .. } => "dembowski-ostrom",
            PlanarFamily::CoulterMatthews { .. } => "coulter-matthews",
            PlanarFamily::DingYuan { .. } => "ding-yuan",
        }
    }
}

/// Tabulates a planar family member, checking the parameter constraints and
/// asserting the result satisfies `uslovie`.
pub fn planar_family(field: &FiniteField, family: PlanarFamily) -> Result<TorusFunction> {
    let (p, k) = (field.p(), field.k() as u64);
    if p == 2 {
        return Err(Error::Parameter("planar families need odd characteristic".into()));
    }
    let f = match family {
        PlanarFamily::DembowskiOstrom { alpha } => {
            if (k / k.gcd(&(alpha as u64))) % 2 == 0 {
                return Err(Error::Parameter(format!("k / gcd(k, {alpha}) must be odd")));
            }
            let e = p.pow(alpha) + 1;
            TorusFunction::from_field_map(field, |x| field.pow(x, e))
        }
        PlanarFamily::CoulterMatthews { alpha } => {
            if p != 3 {
                return Err(Error::Parameter("coulter-matthews needs p = 3".into()));
            }
            if alpha % 2 == 0 || k.gcd(&(alpha as u64)) != 1 {
                return Err(Error::Parameter(format!("alpha = {alpha} must be odd and coprime to k")));
            }
            let e = (3u64.pow(alpha) + 1) / 2;
            TorusFunction::from_field_map(field, |x| field.pow(x, e))
        }
        PlanarFamily::DingYuan { u } => {
            if p != 3 || k % 2 == 0 {
                return Err(Error::Parameter("ding-yuan needs p = 3 and k odd".into()));
            }
            let u = field.from_int(u);
            if u.is_zero() {
                return Err(Error::Parameter("u must be non-zero".into()));
            }
            let u2 = field.mul(&u, &u);
            TorusFunction::from_field_map(field, |x| {
                let t = field.sub(&field.pow(x, 10), &field.mul(&u, &field.pow(x, 6)));
                field.sub(&t, &field.mul(&u2, &field.pow(x, 2)))
            })
        }
    };
    let v = check_planarity(&f, PlanarityLevel::Uslovie)?;
    if let Some(w) = v.witness {
        return Err(Error::ConditionViolated { level: "uslovie".into(), witness: w });
    }
    Ok(f)
}

/// `D_Δ` for one offset.
#[derive(Clone, Debug)]
pub struct DifferenceMatrix {
    pub delta: GroupElement,
    pub matrix: FlatMatrix,
    pub is_hadamard: bool,
}

/// The matrices `D_Δ` with rows `R_{i+Δ} ∘ R_i^{(−1)}`, `i ∈ G`, for every
/// `Δ ≠ 0`, where the rows `R_i` of `a` are indexed by `g`.
pub fn difference_matrices(a: &FlatMatrix, g: &AbelianGroup) -> Result<Vec<DifferenceMatrix>> {
    if a.nrows() != g.order() {
        return Err(Error::DimensionMismatch { expected: g.order(), got: a.nrows() });
    }
    let table = g.addition_table();
    let rows = a.rows();
    let inverses: Vec<_> = rows.iter().map(|r| schur_power(r, -1)).collect();
    (1..g.order())
        .map(|d| {
            let ds = (0..g.order())
                .map(|i| schur(&rows[table[i][d]], &inverses[i]))
                .collect::<Result<Vec<_>>>()?;
            let matrix = FlatMatrix::from_rows(&ds, false)?;
            Ok(DifferenceMatrix { delta: g.element_at(d), is_hadamard: is_hadamard(&matrix)?, matrix })
        })
        .collect()
}

/// The fractional planar function used for dimension `p^k`: `x²` for odd
/// `p`, `x²/2` for `p = 2`.
pub fn default_planar_function(n: u64) -> Result<TorusFunction> {
    let field = FiniteField::of_order(n).map_err(|_| Error::NotPrimePower(n))?;
    if field.p() == 2 {
        TorusFunction::half_square(&field)
    } else {
        Ok(TorusFunction::square(&field))
    }
}

/// A complete set of `n + 1` MUBs for a prime power `n`: the identity
/// followed by the `n` matrices built from [`default_planar_function`].
/// The result is verified exactly before it is returned.
pub fn prime_power_mub(n: u64) -> Result<BasisSystem<ExactVector>> {
    if n < 2 || prime_power(n).is_none() {
        return Err(Error::NotPrimePower(n));
    }
    system_from_function(&default_planar_function(n)?)
}

/// `{I} ∪ mub_from_function(f)`, verified to be complete.
pub fn system_from_function(f: &TorusFunction) -> Result<BasisSystem<ExactVector>> {
    let system = BasisSystem::from_muh(&mub_from_function(f)?)?;
    let verdict = is_mub_system(&system, 0.0)?;
    if !verdict.is_complete {
        return Err(Error::SelfCheck(format!(
            "constructed system of dimension {} is not a complete MUB set ({} failing pairs)",
            system.dim(),
            verdict.failure_count
        )));
    }
    Ok(system)
}

/// A torus element of `N` from rational coordinates.
pub fn torus_point(n: &AbelianGroup, coords: &[(i64, i64)]) -> Result<TorusElement> {
    n.torus(&coords.iter().map(|&(a, b)| Rational64::new(a, b)).collect::<Vec<_>>())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mubcheck::glavnaja_check;

    fn field(n: u64) -> FiniteField {
        FiniteField::of_order(n).unwrap()
    }

    #[test]
    fn fourier_examples() {
        let f2 = fourier_matrix(&AbelianGroup::cyclic(2));
        assert_eq!(f2.nroot(), 2);
        assert_eq!(f2.exps(), &[vec![0, 0], vec![0, 1]]);
        let f5 = fourier_matrix(&AbelianGroup::cyclic(5));
        for i in 0..5 {
            for j in 0..5 {
                assert_eq!(f5.exponent(i, j), (i * j % 5) as u64);
            }
        }
        let klein = fourier_matrix(&AbelianGroup::new(vec![2, 2]).unwrap());
        assert_eq!(klein, f2.kron(&f2));
        assert_eq!(klein, klein.transpose());
    }

    #[test]
    fn shifted_fourier_examples() {
        let g = AbelianGroup::cyclic(2);
        let xs: Vec<TorusElement> = g.elements().map(|x| g.embed(&x)).collect();
        assert_eq!(shifted_fourier(&g, &xs).unwrap(), fourier_matrix(&g));
        let half = vec![torus_point(&g, &[(0, 1)]).unwrap(), torus_point(&g, &[(1, 2)]).unwrap()];
        assert_eq!(shifted_fourier(&g, &half), Err(Error::ShiftCollision { a: 0, b: 1 }));
        let shifted = vec![torus_point(&g, &[(3, 10)]).unwrap(), torus_point(&g, &[(13, 10)]).unwrap()];
        let m = shifted_fourier(&g, &shifted).unwrap();
        assert!(crate::flatmat::is_hadamard_float(&m.to_complex_rows(), 1e-12).unwrap().0);
    }

    #[test]
    fn homogeneous_examples() {
        let h = fourier_matrix(&AbelianGroup::cyclic(3));
        let ones = FlatMatrix::new(1, vec![vec![0; 3]; 3], false).unwrap();
        let sys = homogeneous_system(&HomogeneousSpec::new(ones, h.clone()).unwrap());
        assert!(sys.iter().all(|m| *m == h.clone().with_normalized(true)));
        assert!(!is_mub_system(&BasisSystem::from_muh(&sys).unwrap(), 0.0).unwrap().is_mub);
        assert!(HomogeneousSpec::new(h.clone(), FlatMatrix::new(1, vec![vec![0; 3]; 3], false).unwrap()).is_err());

        let sq = TorusFunction::square(&field(3));
        let spec = HomogeneousSpec::new(function_matrix(&sq).unwrap(), h).unwrap();
        let sys = homogeneous_system(&spec);
        assert!(is_mub_system(&BasisSystem::from_muh(&sys).unwrap(), 0.0).unwrap().is_complete);

        let hs = TorusFunction::half_square(&field(4)).unwrap();
        let sys = mub_from_function(&hs).unwrap();
        assert!(is_mub_system(&BasisSystem::from_muh(&sys).unwrap(), 0.0).unwrap().is_complete);
    }

    #[test]
    fn function_constructions() {
        let sq = TorusFunction::square(&field(3));
        assert!(glavnaja_check(&mub_from_function(&sq).unwrap()).unwrap().complete);
        let g = AbelianGroup::cyclic(3);
        let zero = TorusFunction::from_fn(g.clone(), g.clone(), |_| g.torus_zero()).unwrap();
        assert!(!glavnaja_check(&mub_from_function(&zero).unwrap()).unwrap().complete);

        // χ_r(1/2) = i^r gives {F₂, diag(1, i)·F₂}.
        let hs = TorusFunction::half_square(&field(2)).unwrap();
        let sys = mub_from_function(&hs).unwrap();
        assert_eq!(sys[0], fourier_matrix(&AbelianGroup::cyclic(2)).with_normalized(true));
        assert_eq!(sys[1], FlatMatrix::new(4, vec![vec![0, 0], vec![1, 3]], true).unwrap());

        let mismatch = TorusFunction::from_fn(g.clone(), AbelianGroup::cyclic(2), |_| {
            AbelianGroup::cyclic(2).torus_zero()
        })
        .unwrap();
        assert!(mub_from_function(&mismatch).is_err());
    }

    #[test]
    fn planarity_examples() {
        for p in [3, 5, 7] {
            let v = check_planarity(&TorusFunction::square(&field(p)), PlanarityLevel::Uslovie).unwrap();
            assert!(v.holds);
            let g = AbelianGroup::cyclic(p);
            let lin = TorusFunction::from_fn(g.clone(), g.clone(), |x| g.embed(&g.scalar(2, x))).unwrap();
            let v = check_planarity(&lin, PlanarityLevel::Uslovie).unwrap();
            let [a, b, c, d] = v.witness.unwrap();
            assert_eq!((a + b) % p as usize, (c + d) % p as usize);
        }
        let hs = TorusFunction::half_square(&field(2)).unwrap();
        assert!(check_planarity(&hs, PlanarityLevel::General).unwrap().holds);
        assert!(check_planarity(&hs, PlanarityLevel::Uslovie).is_err());
        assert_eq!(PlanarityLevel::parse("most-general").unwrap(), PlanarityLevel::MostGeneral);
    }

    #[test]
    fn families() {
        let f9 = field(9);
        assert_eq!(
            planar_family(&f9, PlanarFamily::DembowskiOstrom { alpha: 0 }).unwrap(),
            TorusFunction::square(&f9)
        );
        assert_eq!(
            planar_family(&field(3), PlanarFamily::CoulterMatthews { alpha: 1 }).unwrap(),
            TorusFunction::square(&field(3))
        );
        assert!(planar_family(&field(3), PlanarFamily::DingYuan { u: 1 }).is_ok());
        assert!(planar_family(&field(27), PlanarFamily::CoulterMatthews { alpha: 1 }).is_ok());
        assert!(planar_family(&field(27), PlanarFamily::DingYuan { u: 1 }).is_ok());
        assert!(planar_family(&field(27), PlanarFamily::DembowskiOstrom { alpha: 1 }).is_ok());
        assert!(planar_family(&f9, PlanarFamily::DembowskiOstrom { alpha: 1 }).is_err());
        assert!(planar_family(&field(4), PlanarFamily::DembowskiOstrom { alpha: 1 }).is_err());
        assert!(planar_family(&field(5), PlanarFamily::CoulterMatthews { alpha: 1 }).is_err());
        assert!(planar_family(&f9, PlanarFamily::DingYuan { u: 1 }).is_err());
        assert!(planar_family(&field(3), PlanarFamily::DingYuan { u: 0 }).is_err());
    }

    #[test]
    fn difference_matrix_examples() {
        for p in [3, 5, 7] {
            let a = function_matrix(&TorusFunction::square(&field(p))).unwrap();
            let ds = difference_matrices(&a, &AbelianGroup::cyclic(p)).unwrap();
            assert_eq!(ds.len(), p as usize - 1);
            assert!(ds.iter().all(|d| d.is_hadamard));
        }
        let g = AbelianGroup::new(vec![2, 3]).unwrap();
        let ds = difference_matrices(&fourier_matrix(&g), &g).unwrap();
        assert!(ds.iter().all(|d| !d.is_hadamard));
        assert!(difference_matrices(&FlatMatrix::new(1, vec![vec![0]], false).unwrap(), &AbelianGroup::cyclic(1))
            .unwrap()
            .is_empty());
    }

    #[test]
    fn differential_uniformity() {
        let sq = TorusFunction::square(&field(5));
        assert!(is_diff_uniform(&sq));
        assert!(is_perfect_nonlinear(&sq).unwrap());
        let g = AbelianGroup::cyclic(4);
        let c = TorusFunction::from_fn(g.clone(), g.clone(), |_| g.torus_zero()).unwrap();
        assert!(!is_diff_uniform(&c));
        assert!(!is_perfect_nonlinear(&c).unwrap());
        let wide = TorusFunction::from_fn(g.clone(), AbelianGroup::cyclic(3), |_| {
            AbelianGroup::cyclic(3).torus_zero()
        })
        .unwrap();
        assert!(is_perfect_nonlinear(&wide).is_err());
    }

    #[test]
    fn prime_power_systems() {
        for n in [2, 3, 4, 8, 9] {
            assert_eq!(prime_power_mub(n).unwrap().len(), n as usize + 1);
        }
        assert_eq!(prime_power_mub(6).unwrap_err(), Error::NotPrimePower(6));
        assert_eq!(prime_power_mub(1).unwrap_err(), Error::NotPrimePower(1));
    }
}
