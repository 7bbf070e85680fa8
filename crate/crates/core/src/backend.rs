//! Scalar backends.
//!
//! Every verdict in the crate is computed generically over a [`Scalar`]:
//! exact cyclotomic arithmetic ([`Cyclo`]) or double precision complex
//! numbers ([`Complex64`]) compared against a tolerance.

use std::fmt::Debug;

use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::ToPrimitive;
use serde_json::{json, Value};

use crate::flatmat::Cyclo;

/// Default absolute tolerance of the float backend.
pub const DEFAULT_TOL: f64 = 1e-9;

/// Which arithmetic a computation runs in.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum BackendKind {
    #[default]
    Exact,
    Float,
}

pub trait Scalar: Clone + Debug + Send + Sync + 'static {
    const EXACT: bool;

    fn zero() -> Self;
    fn one() -> Self;
    fn from_ratio(q: &BigRational) -> Self;
    fn plus(&self, other: &Self) -> Self;
    fn minus(&self, other: &Self) -> Self;
    fn times(&self, other: &Self) -> Self;
    fn conj(&self) -> Self;

    fn pow(&self, k: u32) -> Self {
        let mut acc = Self::one();
        for _ in 0..k {
            acc = acc.times(self);
        }
        acc
    }

    /// Zero test. The exact backend ignores `tol`.
    fn is_zero_tol(&self, tol: f64) -> bool;

    /// Sign of a real value: exact where possible, else within `tol`.
    fn real_sign(&self, tol: f64) -> i8;

    fn to_complex(&self) -> Complex64;

    /// JSON rendering used in reports.
    fn to_json(&self) -> Value;
}

impl Scalar for Cyclo {
    const EXACT: bool = true;

    fn zero() -> Self {
        Cyclo::zero()
    }
    fn one() -> Self {
        Cyclo::one()
    }
    fn from_ratio(q: &BigRational) -> Self {
        Cyclo::from_rational(q.clone())
    }
    fn plus(&self, other: &Self) -> Self {
        self + other
    }
    fn minus(&self, other: &Self) -> Self {
        self - other
    }
    fn times(&self, other: &Self) -> Self {
        self * other
    }
    fn conj(&self) -> Self {
        Cyclo::conj(self)
    }
    fn pow(&self, k: u32) -> Self {
        Cyclo::pow(self, k)
    }
    fn is_zero_tol(&self, _tol: f64) -> bool {
        self.is_zero()
    }
    fn real_sign(&self, _tol: f64) -> i8 {
        Cyclo::real_sign(self)
    }
    fn to_complex(&self) -> Complex64 {
        Cyclo::to_complex(self)
    }
    fn to_json(&self) -> Value {
        match self.as_rational() {
            Some(q) => Value::String(q.to_string()),
            None => {
                let z = self.to_complex();
                json!({
                    "cyclotomic": self.to_string(),
                    "approx": [z.re, z.im],
                })
            }
        }
    }
}

impl Scalar for Complex64 {
    const EXACT: bool = false;

    fn zero() -> Self {
        Complex64::new(0.0, 0.0)
    }
    fn one() -> Self {
        Complex64::new(1.0, 0.0)
    }
    fn from_ratio(q: &BigRational) -> Self {
        Complex64::new(q.to_f64().unwrap_or(f64::NAN), 0.0)
    }
    fn plus(&self, other: &Self) -> Self {
        self + other
    }
    fn minus(&self, other: &Self) -> Self {
        self - other
    }
    fn times(&self, other: &Self) -> Self {
        self * other
    }
    fn conj(&self) -> Self {
        Complex64::conj(self)
    }
    fn pow(&self, k: u32) -> Self {
        self.powu(k)
    }
    fn is_zero_tol(&self, tol: f64) -> bool {
        self.norm() <= tol
    }
    fn real_sign(&self, tol: f64) -> i8 {
        if self.re > tol {
            1
        } else if self.re < -tol {
            -1
        } else {
            0
        }
    }
    fn to_complex(&self) -> Complex64 {
        *self
    }
    fn to_json(&self) -> Value {
        if self.im == 0.0 {
            json!(self.re)
        } else {
            json!([self.re, self.im])
        }
    }
}
