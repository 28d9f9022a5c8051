//! Arithmetic backends for the analysis: exact rational functions in the
//! crossover probability `p`, truncated power series in `p`, and plain `f64`
//! at a fixed `p`. All linear algebra is generic over the [`Ring`] trait so
//! one pipeline serves the exact, series, and numeric modes.

mod poly;
mod ratfn;
mod series;

pub use poly::Poly;
pub use ratfn::RatFn;
pub use series::Series;

use num::{BigRational, FromPrimitive, One};
use thiserror::Error;

/// Exact rational number used for all symbolic coefficients.
pub type Rat = BigRational;

/// Builds a rational from an integer pair, panicking on zero denominator.
pub fn rat(num: i64, den: i64) -> Rat {
    assert!(den != 0);
    Rat::new(num.into(), den.into())
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ScalarError {
    #[error("division by zero polynomial")]
    DivByZeroPoly,
    #[error("division by zero")]
    DivByZero,
    #[error("series pole at p=0")]
    PoleAtZero,
    #[error("non-unit series divisor")]
    NonUnitDivisor,
    #[error("series precision exhausted")]
    PrecisionExhausted,
    #[error("operation requires the numeric backend")]
    NumericOnly,
}

/// Commutative ring of scalars with enough division for Gaussian elimination.
///
/// The ring object carries backend context (series order, numeric evaluation
/// point); elements are immutable values.
pub trait Ring: Clone + Send + Sync {
    type Elem: Clone + PartialEq + std::fmt::Debug + Send + Sync;

    fn zero(&self) -> Self::Elem;
    fn one(&self) -> Self::Elem;
    fn add(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem;
    fn sub(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem;
    fn mul(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem;
    fn div(&self, a: &Self::Elem, b: &Self::Elem) -> Result<Self::Elem, ScalarError>;
    fn neg(&self, a: &Self::Elem) -> Self::Elem;
    fn is_zero(&self, a: &Self::Elem) -> bool;

    /// Zero test with a tolerance; exact backends ignore `tol`.
    fn is_zero_tol(&self, a: &Self::Elem, _tol: f64) -> bool {
        self.is_zero(a)
    }

    /// Embeds an exact rational constant.
    fn from_rational(&self, r: &Rat) -> Self::Elem;

    /// The channel parameter `p` as a ring element (its numeric value for
    /// the `f64` backend).
    fn p(&self) -> Self::Elem;

    /// Embeds a numeric probability; only the `f64` backend supports this.
    fn from_f64(&self, _x: f64) -> Result<Self::Elem, ScalarError> {
        Err(ScalarError::NumericOnly)
    }

    /// Extracts the numeric value when this is the `f64` backend.
    fn as_f64(&self, _a: &Self::Elem) -> Option<f64> {
        None
    }

    /// Pivot preference for elimination; `None` marks an unusable pivot.
    /// Larger is better.
    fn pivot_score(&self, a: &Self::Elem) -> Option<f64>;

    /// Evaluates the element at a numeric `p` (identity for `f64`).
    fn eval_f64(&self, a: &Self::Elem, p: f64) -> f64;

    fn from_u64(&self, n: u64) -> Self::Elem {
        self.from_rational(&Rat::from_u64(n).unwrap())
    }

    fn name(&self) -> &'static str;
}

/// Exact backend: elements are reduced rational functions in `p`.
#[derive(Clone, Debug, Default)]
pub struct RatFnRing;

impl Ring for RatFnRing {
    type Elem = RatFn;

    fn zero(&self) -> RatFn {
        RatFn::zero()
    }
    fn one(&self) -> RatFn {
        RatFn::one()
    }
    fn add(&self, a: &RatFn, b: &RatFn) -> RatFn {
        a.add(b)
    }
    fn sub(&self, a: &RatFn, b: &RatFn) -> RatFn {
        a.sub(b)
    }
    fn mul(&self, a: &RatFn, b: &RatFn) -> RatFn {
        a.mul(b)
    }
    fn div(&self, a: &RatFn, b: &RatFn) -> Result<RatFn, ScalarError> {
        a.div(b)
    }
    fn neg(&self, a: &RatFn) -> RatFn {
        a.neg()
    }
    fn is_zero(&self, a: &RatFn) -> bool {
        a.is_zero()
    }
    fn from_rational(&self, r: &Rat) -> RatFn {
        RatFn::constant(r.clone())
    }
    fn p(&self) -> RatFn {
        RatFn::from_poly(Poly::x())
    }
    fn pivot_score(&self, a: &RatFn) -> Option<f64> {
        if a.is_zero() {
            None
        } else {
            // Prefer structurally simple pivots to limit degree growth.
            let d = a.num().degree().unwrap_or(0) + a.den().degree().unwrap_or(0);
            Some(-(d as f64))
        }
    }
    fn eval_f64(&self, a: &RatFn, p: f64) -> f64 {
        a.eval_f64(p)
    }
    fn name(&self) -> &'static str {
        "exact"
    }
}

/// Truncated power series backend; all elements share the ring's order.
#[derive(Clone, Debug)]
pub struct SeriesRing {
    order: usize,
}

impl SeriesRing {
    pub fn new(order: usize) -> Self {
        SeriesRing { order }
    }
    pub fn order(&self) -> usize {
        self.order
    }
    pub fn from_series(&self, s: &Series) -> Series {
        s.refit(self.order)
    }
}

impl Ring for SeriesRing {
    type Elem = Series;

    fn zero(&self) -> Series {
        Series::zero(self.order)
    }
    fn one(&self) -> Series {
        Series::constant(Rat::one(), self.order)
    }
    fn add(&self, a: &Series, b: &Series) -> Series {
        a.add(b)
    }
    fn sub(&self, a: &Series, b: &Series) -> Series {
        a.sub(b)
    }
    fn mul(&self, a: &Series, b: &Series) -> Series {
        a.mul(b)
    }
    fn div(&self, a: &Series, b: &Series) -> Result<Series, ScalarError> {
        a.div(b)
    }
    fn neg(&self, a: &Series) -> Series {
        a.neg()
    }
    fn is_zero(&self, a: &Series) -> bool {
        a.is_zero_known()
    }
    fn from_rational(&self, r: &Rat) -> Series {
        Series::constant(r.clone(), self.order)
    }
    fn p(&self) -> Series {
        Series::x(self.order)
    }
    fn pivot_score(&self, a: &Series) -> Option<f64> {
        // Lowest valuation first: dividing by p^v costs v coefficients of
        // precision in every row it touches.
        a.valuation().map(|v| -(v as f64))
    }
    fn eval_f64(&self, a: &Series, p: f64) -> f64 {
        a.eval_f64(p)
    }
    fn name(&self) -> &'static str {
        "series"
    }
}

/// Double precision backend at a fixed channel parameter.
#[derive(Clone, Debug)]
pub struct F64Ring {
    /// Numeric value of `p` (BSC crossover); unused for DMC channels.
    pub p: f64,
}

impl F64Ring {
    pub fn new(p: f64) -> Self {
        F64Ring { p }
    }
}

impl Ring for F64Ring {
    type Elem = f64;

    fn zero(&self) -> f64 {
        0.0
    }
    fn one(&self) -> f64 {
        1.0
    }
    fn add(&self, a: &f64, b: &f64) -> f64 {
        a + b
    }
    fn sub(&self, a: &f64, b: &f64) -> f64 {
        a - b
    }
    fn mul(&self, a: &f64, b: &f64) -> f64 {
        a * b
    }
    fn div(&self, a: &f64, b: &f64) -> Result<f64, ScalarError> {
        if *b == 0.0 {
            Err(ScalarError::DivByZero)
        } else {
            Ok(a / b)
        }
    }
    fn neg(&self, a: &f64) -> f64 {
        -a
    }
    fn is_zero(&self, a: &f64) -> bool {
        *a == 0.0
    }
    fn is_zero_tol(&self, a: &f64, tol: f64) -> bool {
        a.abs() <= tol
    }
    fn from_rational(&self, r: &Rat) -> f64 {
        rat_to_f64(r)
    }
    fn p(&self) -> f64 {
        self.p
    }
    fn from_f64(&self, x: f64) -> Result<f64, ScalarError> {
        Ok(x)
    }
    fn as_f64(&self, a: &f64) -> Option<f64> {
        Some(*a)
    }
    fn pivot_score(&self, a: &f64) -> Option<f64> {
        if *a == 0.0 {
            None
        } else {
            Some(a.abs())
        }
    }
    fn eval_f64(&self, a: &f64, _p: f64) -> f64 {
        *a
    }
    fn name(&self) -> &'static str {
        "numeric"
    }
}

/// Lossless-enough conversion of a big rational to `f64`.
pub fn rat_to_f64(r: &Rat) -> f64 {
    use num::ToPrimitive;
    r.to_f64().unwrap_or_else(|| {
        // Fall back to a scaled division when components overflow f64.
        let n = r.numer();
        let d = r.denom();
        let bits = n.bits().max(d.bits()) as i64 - 500;
        if bits > 0 {
            let shifted_n = n >> bits as u64;
            let shifted_d = d >> bits as u64;
            shifted_n.to_f64().unwrap_or(f64::NAN) / shifted_d.to_f64().unwrap_or(f64::NAN)
        } else {
            f64::NAN
        }
    })
}

/// Formats a rational as the wire format `"±N/D"`.
pub fn rat_string(r: &Rat) -> String {
    format!("{}/{}", r.numer(), r.denom())
}

/// Parses the `"±N/D"` wire format (a bare integer is also accepted).
pub fn parse_rat(s: &str) -> Option<Rat> {
    use num::BigInt;
    use std::str::FromStr;
    match s.split_once('/') {
        Some((n, d)) => Some(Rat::new(
            BigInt::from_str(n.trim()).ok()?,
            BigInt::from_str(d.trim()).ok()?,
        )),
        None => Some(Rat::from(BigInt::from_str(s.trim()).ok()?)),
    }
}
