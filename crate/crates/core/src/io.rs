//! JSON interchange formats.
//!
//! * group: `{"moduli": [d₁, …]}`
//! * extension group: `{"base": group, "fiber": group, "carry": [[…], …]}`
//! * torus element: one entry per coordinate, each an integer, a
//!   `[num, den]` pair or a `"num/den"` string; written as pairs. A rank-one
//!   element may also be given as a bare integer or string
//! * matrix: `{"nroot": N, "phases": [[a or null, …], …], "normalized": bool}`
//!   with entry `ζ_N^a` (`null` is a zero entry), scaled by `1/√rows` when
//!   normalized; or `{"re": [[…]], "im": [[…]]}` for floating point data
//! * system: `{"dim": n, "form": "raw" | "muh-standard", "bases": [matrix, …]}`,
//!   each matrix holding one basis as its columns; optional `"weights"`
//! * function: `{"group": group, "codomain": group, "table": [[g, value], …]}`
//! * relative difference set: `{"K": group, "N": [element, …], "R": [element, …],
//!   "params": [m, n, r, λ]}` with elements as coordinate arrays
//!
//! Output goes through `serde_json::Value`, whose maps keep keys sorted, so
//! serialization is byte-stable.

use num_bigint::BigInt;
use num_complex::Complex64;
use num_rational::{BigRational, Rational64};
use num_traits::One;
use serde_json::{json, Map, Value};

use crate::constructions::TorusFunction;
use crate::error::{Error, Result};
use crate::flatmat::FlatMatrix;
use crate::group::{AbelianGroup, GroupElement, TorusElement};
use crate::mubcheck::{BasisSystem, Form};
use crate::rds::{AmbientGroup, ExtensionGroup, RdsParams, RelativeDifferenceSet};
use crate::vector::{Entry, ExactVector, FloatVector, VectorSystem};

fn parse_err(msg: impl Into<String>) -> Error {
    Error::Parse(msg.into())
}

fn as_u64(v: &Value, what: &str) -> Result<u64> {
    v.as_u64().ok_or_else(|| parse_err(format!("{what}: expected a non-negative integer, got {v}")))
}

fn as_array<'a>(v: &'a Value, what: &str) -> Result<&'a Vec<Value>> {
    v.as_array().ok_or_else(|| parse_err(format!("{what}: expected an array")))
}

fn field<'a>(v: &'a Value, key: &str) -> Result<&'a Value> {
    v.get(key).ok_or_else(|| parse_err(format!("missing key `{key}`")))
}

pub fn group_to_json(g: &AbelianGroup) -> Value {
    json!({ "moduli": g.moduli() })
}

pub fn group_from_json(v: &Value) -> Result<AbelianGroup> {
    let moduli = as_array(field(v, "moduli")?, "moduli")?
        .iter()
        .map(|d| as_u64(d, "modulus"))
        .collect::<Result<_>>()?;
    AbelianGroup::new(moduli)
}

pub fn element_to_json(g: &GroupElement) -> Value {
    json!(g.0)
}

pub fn element_from_json(v: &Value, g: &AbelianGroup) -> Result<GroupElement> {
    let coords: Vec<u64> =
        as_array(v, "element")?.iter().map(|c| as_u64(c, "coordinate")).collect::<Result<_>>()?;
    let e = GroupElement(coords);
    if e.0.len() != g.rank() {
        return Err(Error::DimensionMismatch { expected: g.rank(), got: e.0.len() });
    }
    if !g.contains(&e) {
        return Err(Error::NotInGroup(e.0));
    }
    Ok(e)
}

pub fn rational_to_json(r: &Rational64) -> Value {
    json!([r.numer(), r.denom()])
}

pub fn rational_from_json(v: &Value) -> Result<Rational64> {
    let bad = || parse_err(format!("expected a rational, got {v}"));
    match v {
        Value::Number(n) => n.as_i64().map(Rational64::from_integer).ok_or_else(bad),
        Value::Array(a) if a.len() == 2 => {
            let (p, q) = (a[0].as_i64().ok_or_else(bad)?, a[1].as_i64().ok_or_else(bad)?);
            if q == 0 {
                return Err(bad());
            }
            Ok(Rational64::new(p, q))
        }
        Value::String(s) => s.trim().parse::<Rational64>().map_err(|_| bad()),
        _ => Err(bad()),
    }
}

pub fn torus_to_json(x: &TorusElement) -> Value {
    Value::Array(x.0.iter().map(rational_to_json).collect())
}

/// A bare number or string is accepted for rank-one groups.
pub fn torus_from_json(v: &Value, g: &AbelianGroup) -> Result<TorusElement> {
    if !v.is_array() && g.rank() == 1 {
        return g.torus(&[rational_from_json(v)?]);
    }
    let coords: Vec<Rational64> =
        as_array(v, "torus element")?.iter().map(rational_from_json).collect::<Result<_>>()?;
    g.torus(&coords)
}

pub fn matrix_to_json(m: &FlatMatrix) -> Value {
    json!({ "nroot": m.nroot(), "phases": m.exps(), "normalized": m.is_normalized() })
}

/// A matrix as read from JSON.
#[derive(Clone, Debug, PartialEq)]
pub enum MatrixData {
    /// Entries `ζ^a` or zero.
    Exact { nroot: u64, phases: Vec<Vec<Option<u64>>>, normalized: bool },
    Float(Vec<Vec<Complex64>>),
}

impl MatrixData {
    pub fn nrows(&self) -> usize {
        match self {
            MatrixData::Exact { phases, .. } => phases.len(),
            MatrixData::Float(rows) => rows.len(),
        }
    }

    pub fn ncols(&self) -> usize {
        match self {
            MatrixData::Exact { phases, .. } => phases.first().map_or(0, Vec::len),
            MatrixData::Float(rows) => rows.first().map_or(0, Vec::len),
        }
    }

    /// The flat matrix, when every entry is a root of unity.
    pub fn to_flat(&self) -> Result<FlatMatrix> {
        match self {
            MatrixData::Exact { nroot, phases, normalized } => {
                let rows = phases
                    .iter()
                    .map(|r| r.iter().map(|a| a.ok_or_else(|| Error::NotFlat("zero entry".into()))).collect())
                    .collect::<Result<_>>()?;
                FlatMatrix::new(*nroot, rows, *normalized)
            }
            MatrixData::Float(_) => Err(Error::Parse("exact matrix required, got floating point data".into())),
        }
    }

    pub fn exact_columns(&self) -> Result<Vec<ExactVector>> {
        let MatrixData::Exact { nroot, phases, normalized } = self else {
            return Err(Error::Parse("exact matrix required, got floating point data".into()));
        };
        let scale = if *normalized {
            BigRational::new(BigInt::one(), BigInt::from(phases.len()))
        } else {
            BigRational::one()
        };
        Ok((0..self.ncols())
            .map(|j| {
                let col: Vec<Option<u64>> = phases.iter().map(|r| r[j]).collect();
                ExactVector::from_optional_phases(*nroot, &col, scale.clone())
            })
            .collect())
    }

    pub fn float_columns(&self) -> Result<Vec<FloatVector>> {
        match self {
            MatrixData::Exact { .. } => Ok(self.exact_columns()?.iter().map(crate::vector::Vector::to_float).collect()),
            MatrixData::Float(rows) => Ok((0..self.ncols())
                .map(|j| FloatVector(rows.iter().map(|r| r[j]).collect()))
                .collect()),
        }
    }

    pub fn is_exact(&self) -> bool {
        matches!(self, MatrixData::Exact { .. })
    }
}

pub fn matrix_from_json(v: &Value) -> Result<MatrixData> {
    if let Some(re) = v.get("re") {
        let parse = |x: &Value| -> Result<Vec<Vec<f64>>> {
            as_array(x, "rows")?
                .iter()
                .map(|r| {
                    as_array(r, "row")?
                        .iter()
                        .map(|e| e.as_f64().ok_or_else(|| parse_err("expected a number")))
                        .collect()
                })
                .collect()
        };
        let re = parse(re)?;
        let im = match v.get("im") {
            Some(im) => parse(im)?,
            None => re.iter().map(|r| vec![0.0; r.len()]).collect(),
        };
        if re.len() != im.len() || re.iter().zip(&im).any(|(a, b)| a.len() != b.len()) {
            return Err(parse_err("`re` and `im` shapes differ"));
        }
        let rows: Vec<Vec<Complex64>> = re
            .iter()
            .zip(&im)
            .map(|(a, b)| a.iter().zip(b).map(|(&x, &y)| Complex64::new(x, y)).collect())
            .collect();
        check_rectangular(rows.iter().map(Vec::len))?;
        return Ok(MatrixData::Float(rows));
    }
    let nroot = as_u64(field(v, "nroot")?, "nroot")?;
    if nroot == 0 {
        return Err(parse_err("nroot must be positive"));
    }
    let phases: Vec<Vec<Option<u64>>> = as_array(field(v, "phases")?, "phases")?
        .iter()
        .map(|r| {
            as_array(r, "row")?
                .iter()
                .map(|a| if a.is_null() { Ok(None) } else { as_u64(a, "phase").map(|a| Some(a % nroot)) })
                .collect()
        })
        .collect::<Result<_>>()?;
    check_rectangular(phases.iter().map(Vec::len))?;
    let normalized = match v.get("normalized") {
        None => false,
        Some(b) => b.as_bool().ok_or_else(|| parse_err("`normalized` must be a boolean"))?,
    };
    Ok(MatrixData::Exact { nroot, phases, normalized })
}

fn check_rectangular(lens: impl Iterator<Item = usize>) -> Result<()> {
    let lens: Vec<usize> = lens.collect();
    if let Some(&w) = lens.first() {
        if let Some(&bad) = lens.iter().find(|&&l| l != w) {
            return Err(Error::DimensionMismatch { expected: w, got: bad });
        }
    }
    Ok(())
}

/// A system file: bases as matrices plus optional vector weights.
#[derive(Clone, Debug)]
pub struct SystemData {
    pub form: Form,
    pub bases: Vec<MatrixData>,
    pub weights: Option<Vec<Rational64>>,
}

impl SystemData {
    pub fn is_exact(&self) -> bool {
        self.bases.iter().all(MatrixData::is_exact)
    }

    pub fn exact(&self) -> Result<BasisSystem<ExactVector>> {
        let bases = self.bases.iter().map(MatrixData::exact_columns).collect::<Result<_>>()?;
        Ok(BasisSystem::new(bases)?.with_form(self.form))
    }

    pub fn float(&self) -> Result<BasisSystem<FloatVector>> {
        let bases = self.bases.iter().map(MatrixData::float_columns).collect::<Result<_>>()?;
        Ok(BasisSystem::new(bases)?.with_form(self.form))
    }

    /// All columns of all bases as one weighted exact system.
    pub fn exact_vectors(&self) -> Result<VectorSystem<ExactVector>> {
        let mut cols = Vec::new();
        for b in &self.bases {
            cols.extend(b.exact_columns()?);
        }
        let system = VectorSystem::new(cols)?;
        match &self.weights {
            None => Ok(system),
            Some(w) => system.with_weights(
                w.iter()
                    .map(|r| BigRational::new(BigInt::from(*r.numer()), BigInt::from(*r.denom())))
                    .collect(),
            ),
        }
    }

    /// All columns of all bases as one weighted floating point system.
    pub fn float_vectors(&self) -> Result<VectorSystem<FloatVector>> {
        let mut cols = Vec::new();
        for b in &self.bases {
            cols.extend(b.float_columns()?);
        }
        let system = VectorSystem::new(cols)?;
        match &self.weights {
            None => Ok(system),
            Some(w) => system.with_weights(w.iter().map(|r| *r.numer() as f64 / *r.denom() as f64).collect()),
        }
    }
}

/// Reads a system file; a bare matrix is read as a one-basis system.
pub fn system_from_json(v: &Value) -> Result<SystemData> {
    let (bases, form) = match v.get("bases") {
        Some(b) => {
            let form = match v.get("form").and_then(Value::as_str) {
                None | Some("raw") => Form::Raw,
                Some("muh-standard") => Form::MuhStandard,
                Some(other) => return Err(parse_err(format!("unknown form `{other}`"))),
            };
            (as_array(b, "bases")?.iter().map(matrix_from_json).collect::<Result<Vec<_>>>()?, form)
        }
        None if v.is_array() => {
            (as_array(v, "bases")?.iter().map(matrix_from_json).collect::<Result<Vec<_>>>()?, Form::Raw)
        }
        None => (vec![matrix_from_json(v)?], Form::Raw),
    };
    let weights = match v.get("weights") {
        None | Some(Value::Null) => None,
        Some(w) => Some(as_array(w, "weights")?.iter().map(rational_from_json).collect::<Result<_>>()?),
    };
    Ok(SystemData { form, bases, weights })
}

fn form_name(form: Form) -> &'static str {
    match form {
        Form::Raw => "raw",
        Form::MuhStandard => "muh-standard",
    }
}

/// Serializes an exact system whose vectors all have root-of-unity or zero
/// entries and squared scale `1` or `1/n`.
pub fn system_to_json(system: &BasisSystem<ExactVector>) -> Result<Value> {
    let n = system.dim();
    let inv_n = BigRational::new(BigInt::one(), BigInt::from(n.max(1)));
    let mut bases = Vec::with_capacity(system.len());
    for basis in system.bases() {
        let nroot = basis.iter().fold(1, |acc, c| crate::flatmat::lcm(acc, c.nroot()));
        let scale = basis.first().map(|c| c.scale_sq().clone()).unwrap_or_else(BigRational::one);
        let normalized = if scale == inv_n && n > 1 {
            true
        } else if scale.is_one() {
            false
        } else {
            return Err(Error::Parse(format!("cannot serialize squared scale {scale}")));
        };
        let mut phases = vec![vec![Value::Null; basis.len()]; n];
        for (j, col) in basis.iter().enumerate() {
            if *col.scale_sq() != scale {
                return Err(Error::Parse("columns of one basis carry different scales".into()));
            }
            let col = col.lift(nroot);
            for (i, e) in col.entries().iter().enumerate() {
                phases[i][j] = match e {
                    Entry::Zero => Value::Null,
                    Entry::Root(a) => json!(a),
                    Entry::General(_) => {
                        return Err(Error::Parse("entry is not a root of unity".into()))
                    }
                };
            }
        }
        bases.push(json!({ "nroot": nroot, "phases": phases, "normalized": normalized }));
    }
    Ok(json!({ "dim": n, "form": form_name(system.form()), "bases": bases }))
}

pub fn function_to_json(f: &TorusFunction) -> Value {
    let table: Vec<Value> = f
        .domain()
        .elements()
        .zip(f.table())
        .map(|(g, v)| json!([element_to_json(&g), torus_to_json(v)]))
        .collect();
    json!({
        "group": group_to_json(f.domain()),
        "codomain": group_to_json(f.codomain()),
        "table": table,
    })
}

pub fn function_from_json(v: &Value) -> Result<TorusFunction> {
    let g = group_from_json(field(v, "group")?)?;
    let n = match v.get("codomain") {
        Some(c) => group_from_json(c)?,
        None => g.clone(),
    };
    let mut values: Vec<Option<TorusElement>> = vec![None; g.order()];
    for entry in as_array(field(v, "table")?, "table")? {
        let pair = as_array(entry, "table entry")?;
        if pair.len() != 2 {
            return Err(parse_err("table entries are [element, value] pairs"));
        }
        let x = element_from_json(&pair[0], &g)?;
        let idx = g.index_of(&x);
        if values[idx].is_some() {
            return Err(parse_err(format!("duplicate table entry for {:?}", x.0)));
        }
        values[idx] = Some(torus_from_json(&pair[1], &n)?);
    }
    let values = values
        .into_iter()
        .enumerate()
        .map(|(i, v)| v.ok_or_else(|| parse_err(format!("no value for {:?}", g.element_at(i).0))))
        .collect::<Result<_>>()?;
    TorusFunction::new(g, n, values)
}

pub fn ambient_to_json(k: &AmbientGroup) -> Value {
    match k {
        AmbientGroup::Product(g) => group_to_json(g),
        AmbientGroup::Extension(e) => json!({
            "base": group_to_json(e.base()),
            "fiber": group_to_json(e.fiber()),
            "carry": e.carry().iter().map(element_to_json).collect::<Vec<_>>(),
        }),
    }
}

pub fn ambient_from_json(v: &Value) -> Result<AmbientGroup> {
    if v.get("moduli").is_some() {
        return Ok(AmbientGroup::Product(group_from_json(v)?));
    }
    let base = group_from_json(field(v, "base")?)?;
    let fiber = group_from_json(field(v, "fiber")?)?;
    let carry = as_array(field(v, "carry")?, "carry")?
        .iter()
        .map(|c| element_from_json(c, &fiber))
        .collect::<Result<_>>()?;
    Ok(AmbientGroup::Extension(ExtensionGroup::new(base, fiber, carry)?))
}

pub fn rds_to_json(d: &RelativeDifferenceSet) -> Value {
    let k = d.group();
    let p = d.params();
    json!({
        "K": ambient_to_json(k),
        "N": d.forbidden().iter().map(|&i| k.coords(i)).collect::<Vec<_>>(),
        "R": d.set().iter().map(|&i| k.coords(i)).collect::<Vec<_>>(),
        "params": [p.m, p.n, p.r, p.lambda],
    })
}

pub fn rds_from_json(v: &Value) -> Result<RelativeDifferenceSet> {
    let k = ambient_from_json(field(v, "K")?)?;
    let elems = |key: &str| -> Result<Vec<usize>> {
        as_array(field(v, key)?, key)?
            .iter()
            .map(|e| {
                let c: Vec<u64> =
                    as_array(e, "element")?.iter().map(|x| as_u64(x, "coordinate")).collect::<Result<_>>()?;
                k.index_of(&c)
            })
            .collect()
    };
    let (n, r) = (elems("N")?, elems("R")?);
    match v.get("params") {
        None | Some(Value::Null) => RelativeDifferenceSet::with_inferred_params(k, n, r),
        Some(p) => {
            let p: Vec<usize> =
                as_array(p, "params")?.iter().map(|x| as_u64(x, "param").map(|x| x as usize)).collect::<Result<_>>()?;
            let [m, n_, r_, lambda] = p[..] else {
                return Err(parse_err("params must be [m, n, r, lambda]"));
            };
            RelativeDifferenceSet::new(k, n, r, RdsParams { m, n: n_, r: r_, lambda })
        }
    }
}

/// Reads a JSON document, mapping syntax errors to [`Error::Parse`].
pub fn parse(text: &str) -> Result<Value> {
    serde_json::from_str(text).map_err(|e| parse_err(e.to_string()))
}

/// Pretty-printed JSON with a trailing newline.
pub fn render(v: &Value) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("values serialize");
    s.push('\n');
    s
}

/// Object with sorted keys from pairs; convenience for report assembly.
pub fn object(pairs: impl IntoIterator<Item = (&'static str, Value)>) -> Value {
    Value::Object(pairs.into_iter().map(|(k, v)| (k.to_string(), v)).collect::<Map<_, _>>())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::constructions::prime_power_mub;
    use crate::field::FiniteField;
    use crate::mubcheck::is_mub_system;

    #[test]
    fn system_round_trip() {
        let s = prime_power_mub(4).unwrap();
        let v = system_to_json(&s).unwrap();
        let text = render(&v);
        let back = system_from_json(&parse(&text).unwrap()).unwrap();
        assert_eq!(back.form, Form::MuhStandard);
        let exact = back.exact().unwrap();
        assert_eq!(render(&system_to_json(&exact).unwrap()), text);
        assert!(is_mub_system(&exact, 0.0).unwrap().is_complete);
        assert!(is_mub_system(&back.float().unwrap(), 1e-9).unwrap().is_complete);
    }

    #[test]
    fn float_matrix() {
        let v = json!({"re": [[1.0, 1.0], [1.0, -1.0]], "im": [[0.0, 0.0], [0.0, 0.0]]});
        let m = matrix_from_json(&v).unwrap();
        assert!(!m.is_exact());
        assert!(m.exact_columns().is_err());
        assert_eq!(m.float_columns().unwrap()[1].0[1], Complex64::new(-1.0, 0.0));
        assert!(matrix_from_json(&json!({"re": [[1.0], [1.0, 2.0]]})).is_err());
    }

    #[test]
    fn function_round_trip() {
        let f = TorusFunction::half_square(&FiniteField::of_order(4).unwrap()).unwrap();
        let v = function_to_json(&f);
        assert_eq!(function_from_json(&v).unwrap(), f);
        let g = json!({"group": {"moduli": [2]}, "table": [[[0], [0]], [[1], "1/2"]]});
        let h = function_from_json(&g).unwrap();
        assert_eq!(h.table()[1].0, vec![Rational64::new(1, 2)]);
        let missing = json!({"group": {"moduli": [2]}, "table": [[[0], [0]]]});
        assert!(function_from_json(&missing).is_err());
    }

    #[test]
    fn rds_round_trip() {
        let v = json!({"K": {"moduli": [4]}, "N": [[0], [2]], "R": [[0], [1]], "params": [2, 2, 2, 1]});
        let d = rds_from_json(&v).unwrap();
        assert_eq!(rds_to_json(&d), v);
        let f = TorusFunction::half_square(&FiniteField::of_order(2).unwrap()).unwrap();
        let out = crate::rds::planar_to_rds(&f).unwrap();
        let w = rds_to_json(&out.rds);
        assert_eq!(rds_from_json(&w).unwrap(), out.rds);
    }

    #[test]
    fn rationals() {
        assert_eq!(rational_from_json(&json!(3)).unwrap(), Rational64::from_integer(3));
        assert_eq!(rational_from_json(&json!([2, 4])).unwrap(), Rational64::new(1, 2));
        assert_eq!(rational_from_json(&json!("3/2")).unwrap(), Rational64::new(3, 2));
        assert!(rational_from_json(&json!([1, 0])).is_err());
        assert!(rational_from_json(&json!(0.5)).is_err());
    }
}
