//! Truncated power series in `p` with exact rational coefficients and
//! per-element precision tracking.
//!
//! Precision semantics: `coeffs[0..prec]` are trusted; anything beyond is
//! garbage left over from divisions by non-units (`p^v`-valued pivots during
//! elimination shift the trusted window down by `v`). All ring operations
//! propagate the trusted window, so the solver can tell when a requested
//! order is no longer backed by exact arithmetic and retry with guard terms.

use super::{rat_string, Rat, ScalarError};
use num::{One, Zero};
use serde::ser::SerializeStruct;
use serde::{Serialize, Serializer};

#[derive(Clone, Debug)]
pub struct Series {
    coeffs: Vec<Rat>,
    /// Number of trusted leading coefficients (0..=order+1).
    prec: usize,
}

impl Series {
    pub fn zero(order: usize) -> Self {
        Series {
            coeffs: vec![Rat::zero(); order + 1],
            prec: order + 1,
        }
    }

    pub fn constant(c: Rat, order: usize) -> Self {
        let mut s = Series::zero(order);
        s.coeffs[0] = c;
        s
    }

    /// The monomial `p` (truncated if order is 0).
    pub fn x(order: usize) -> Self {
        let mut s = Series::zero(order);
        if order >= 1 {
            s.coeffs[1] = Rat::one();
        }
        s
    }

    pub fn from_coeffs(mut coeffs: Vec<Rat>, order: usize) -> Self {
        coeffs.resize(order + 1, Rat::zero());
        Series {
            coeffs,
            prec: order + 1,
        }
    }

    pub fn order(&self) -> usize {
        self.coeffs.len() - 1
    }

    /// Trusted coefficient count.
    pub fn prec(&self) -> usize {
        self.prec
    }

    pub fn coeff(&self, k: usize) -> Rat {
        self.coeffs.get(k).cloned().unwrap_or_else(Rat::zero)
    }

    /// Trusted coefficients only.
    pub fn known_coeffs(&self) -> &[Rat] {
        &self.coeffs[..self.prec]
    }

    /// Re-truncates to a new order, keeping at most the trusted window.
    pub fn refit(&self, order: usize) -> Series {
        let mut coeffs: Vec<Rat> = self.coeffs.iter().take(order + 1).cloned().collect();
        coeffs.resize(order + 1, Rat::zero());
        Series {
            coeffs,
            prec: self.prec.min(order + 1),
        }
    }

    /// Index of the first trusted nonzero coefficient.
    /// `None` when all trusted coefficients vanish.
    pub fn valuation(&self) -> Option<usize> {
        self.coeffs[..self.prec].iter().position(|c| !c.is_zero())
    }

    /// True when every trusted coefficient is zero.
    pub fn is_zero_known(&self) -> bool {
        self.valuation().is_none()
    }

    pub fn add(&self, other: &Series) -> Series {
        let prec = self.prec.min(other.prec);
        let mut coeffs = self.coeffs.clone();
        for (c, o) in coeffs.iter_mut().zip(&other.coeffs) {
            *c += o;
        }
        Series { coeffs, prec }
    }

    pub fn sub(&self, other: &Series) -> Series {
        let prec = self.prec.min(other.prec);
        let mut coeffs = self.coeffs.clone();
        for (c, o) in coeffs.iter_mut().zip(&other.coeffs) {
            *c -= o;
        }
        Series { coeffs, prec }
    }

    pub fn neg(&self) -> Series {
        Series {
            coeffs: self.coeffs.iter().map(|c| -c.clone()).collect(),
            prec: self.prec,
        }
    }

    pub fn mul(&self, other: &Series) -> Series {
        let n = self.coeffs.len();
        let prec = self.prec.min(other.prec);
        let mut coeffs = vec![Rat::zero(); n];
        for (i, a) in self.coeffs.iter().enumerate().take(prec) {
            if a.is_zero() {
                continue;
            }
            for (j, b) in other.coeffs.iter().enumerate().take(prec - i) {
                if !b.is_zero() {
                    coeffs[i + j] += a * b;
                }
            }
        }
        Series { coeffs, prec }
    }

    /// Division; the divisor's valuation must not exceed the dividend's
    /// trusted window. Dividing by `p^v * unit` costs `v` coefficients of
    /// precision.
    pub fn div(&self, other: &Series) -> Result<Series, ScalarError> {
        let v = other.valuation().ok_or(ScalarError::DivByZero)?;
        let prec = self.prec.min(other.prec);
        if v >= prec {
            return Err(ScalarError::PrecisionExhausted);
        }
        let n = self.coeffs.len();
        let out_prec = prec - v;
        // Shift both operands down by v; the dividend must also be divisible
        // by p^v as a function, but truncation cannot verify that, so we
        // simply shift (elimination only divides entries from the pivot's
        // column, where divisibility holds).
        let a = |k: usize| -> Rat { self.coeff(k + v) };
        let b0 = other.coeff(v);
        let mut out = vec![Rat::zero(); n];
        for k in 0..out_prec {
            let mut c = a(k);
            for j in 1..=k {
                c -= other.coeff(v + j) * &out[k - j];
            }
            out[k] = c / &b0;
        }
        Ok(Series {
            coeffs: out,
            prec: out_prec,
        })
    }

    pub fn eval_f64(&self, p: f64) -> f64 {
        let mut acc = 0.0;
        for c in self.coeffs[..self.prec].iter().rev() {
            acc = acc * p + super::rat_to_f64(c);
        }
        acc
    }
}

/// Trusted prefixes must agree; untrusted tails are ignored.
impl PartialEq for Series {
    fn eq(&self, other: &Series) -> bool {
        let prec = self.prec.min(other.prec);
        self.coeffs[..prec] == other.coeffs[..prec]
    }
}

impl std::fmt::Display for Series {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let mut first = true;
        for (k, c) in self.coeffs[..self.prec].iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            if !first {
                write!(f, " + ")?;
            }
            write!(f, "({})p^{}", c, k)?;
            first = false;
        }
        if first {
            write!(f, "0")?;
        }
        write!(f, " + O(p^{})", self.prec)
    }
}

impl Serialize for Series {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        let mut st = serializer.serialize_struct("Series", 2)?;
        let coeffs: Vec<String> = self.coeffs[..self.prec].iter().map(rat_string).collect();
        st.serialize_field("coefficients", &coeffs)?;
        st.serialize_field("order", &(self.prec.saturating_sub(1)))?;
        st.end()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::rat;

    #[test]
    fn mul_truncates() {
        let order = 3;
        // (1 + p)^2 = 1 + 2p + p^2
        let a = Series::from_coeffs(vec![rat(1, 1), rat(1, 1)], order);
        let sq = a.mul(&a);
        assert_eq!(sq.coeff(0), rat(1, 1));
        assert_eq!(sq.coeff(1), rat(2, 1));
        assert_eq!(sq.coeff(2), rat(1, 1));
        assert_eq!(sq.coeff(3), rat(0, 1));
    }

    #[test]
    fn unit_division_keeps_precision() {
        let order = 4;
        let one = Series::constant(rat(1, 1), order);
        let den = Series::from_coeffs(vec![rat(1, 1), rat(-1, 1)], order);
        let inv = one.div(&den).unwrap();
        assert_eq!(inv.prec(), order + 1);
        for k in 0..=order {
            assert_eq!(inv.coeff(k), rat(1, 1));
        }
    }

    #[test]
    fn non_unit_division_costs_precision() {
        let order = 5;
        let p2 = Series::from_coeffs(vec![rat(0, 1), rat(0, 1), rat(1, 1)], order);
        let p = Series::x(order);
        let q = p2.div(&p).unwrap();
        assert_eq!(q.prec(), order); // one coefficient lost
        assert_eq!(q.coeff(1), rat(1, 1));
        assert!(p.div(&Series::zero(order)).is_err());
    }

    #[test]
    fn precision_propagates_through_ops() {
        let order = 6;
        let p = Series::x(order);
        let p3 = p.mul(&p).mul(&p);
        let lossy = p3.div(&p.mul(&p)).unwrap(); // prec = 5
        assert_eq!(lossy.prec(), 5);
        let combined = lossy.add(&Series::constant(rat(1, 1), order));
        assert_eq!(combined.prec(), 5);
    }
}
