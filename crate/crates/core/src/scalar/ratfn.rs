//! Reduced rational functions in `p` over the exact rationals.

use super::poly::Poly;
use super::series::Series;
use super::{rat_string, Rat, ScalarError};
use num::{One, Zero};
use serde::ser::SerializeStruct;
use serde::{Serialize, Serializer};

/// `num/den` with `gcd(num, den) = 1` and a monic denominator.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RatFn {
    num: Poly,
    den: Poly,
}

impl RatFn {
    pub fn new(num: Poly, den: Poly) -> Result<Self, ScalarError> {
        if den.is_zero() {
            return Err(ScalarError::DivByZeroPoly);
        }
        Ok(Self::reduced(num, den))
    }

    fn reduced(num: Poly, den: Poly) -> Self {
        if num.is_zero() {
            return RatFn {
                num: Poly::zero(),
                den: Poly::one(),
            };
        }
        let g = Poly::gcd(&num, &den);
        let (num, _) = num.divrem(&g).expect("gcd divides");
        let (den, _) = den.divrem(&g).expect("gcd divides");
        // Canonical scaling: monic denominator.
        let lead = den.leading().expect("nonzero").clone();
        let inv = Rat::one() / lead;
        RatFn {
            num: num.scale(&inv),
            den: den.scale(&inv),
        }
    }

    pub fn zero() -> Self {
        RatFn {
            num: Poly::zero(),
            den: Poly::one(),
        }
    }

    pub fn one() -> Self {
        RatFn {
            num: Poly::one(),
            den: Poly::one(),
        }
    }

    pub fn constant(c: Rat) -> Self {
        RatFn {
            num: Poly::constant(c),
            den: Poly::one(),
        }
    }

    pub fn from_poly(p: Poly) -> Self {
        RatFn {
            num: p,
            den: Poly::one(),
        }
    }

    pub fn num(&self) -> &Poly {
        &self.num
    }

    pub fn den(&self) -> &Poly {
        &self.den
    }

    pub fn is_zero(&self) -> bool {
        self.num.is_zero()
    }

    pub fn add(&self, other: &RatFn) -> RatFn {
        let num = self
            .num
            .mul(&other.den)
            .add(&other.num.mul(&self.den));
        let den = self.den.mul(&other.den);
        Self::reduced(num, den)
    }

    pub fn sub(&self, other: &RatFn) -> RatFn {
        let num = self
            .num
            .mul(&other.den)
            .sub(&other.num.mul(&self.den));
        let den = self.den.mul(&other.den);
        Self::reduced(num, den)
    }

    pub fn neg(&self) -> RatFn {
        RatFn {
            num: self.num.neg(),
            den: self.den.clone(),
        }
    }

    pub fn mul(&self, other: &RatFn) -> RatFn {
        Self::reduced(self.num.mul(&other.num), self.den.mul(&other.den))
    }

    pub fn div(&self, other: &RatFn) -> Result<RatFn, ScalarError> {
        if other.is_zero() {
            return Err(ScalarError::DivByZeroPoly);
        }
        Ok(Self::reduced(
            self.num.mul(&other.den),
            self.den.mul(&other.num),
        ))
    }

    pub fn eval_f64(&self, p: f64) -> f64 {
        self.num.eval_f64(p) / self.den.eval_f64(p)
    }

    pub fn eval_rat(&self, p: &Rat) -> Result<Rat, ScalarError> {
        let d = self.den.eval_rat(p);
        if d.is_zero() {
            return Err(ScalarError::DivByZero);
        }
        Ok(self.num.eval_rat(p) / d)
    }

    /// Equality as functions of `p` (independent of canonical scaling).
    pub fn equivalent(&self, other: &RatFn) -> bool {
        self.num.mul(&other.den) == other.num.mul(&self.den)
    }

    /// Maclaurin expansion to `p^order`; requires `den(0) != 0`.
    pub fn series(&self, order: usize) -> Result<Series, ScalarError> {
        let d0 = self.den.coeff(0);
        if d0.is_zero() {
            return Err(ScalarError::PoleAtZero);
        }
        let mut out = Vec::with_capacity(order + 1);
        for k in 0..=order {
            let mut c = self.num.coeff(k);
            for j in 1..=k {
                c -= self.den.coeff(j) * &out[k - j];
            }
            out.push(c / &d0);
        }
        Ok(Series::from_coeffs(out, order))
    }
}

impl std::fmt::Display for RatFn {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        if self.den == Poly::one() {
            write!(f, "{}", self.num)
        } else {
            write!(f, "({}) / ({})", self.num, self.den)
        }
    }
}

impl Serialize for RatFn {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        let mut st = serializer.serialize_struct("RatFn", 2)?;
        let num: Vec<String> = self.num.coeffs().iter().map(rat_string).collect();
        let den: Vec<String> = self.den.coeffs().iter().map(rat_string).collect();
        st.serialize_field("num", &num)?;
        st.serialize_field("den", &den)?;
        st.end()
    }
}
