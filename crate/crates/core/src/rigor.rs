//! Certified scalar arithmetic on `[lo, hi]` enclosures.
//!
//! Every real quantity that feeds an inequality decision is computed as a
//! `DirectedValue`: a pair of `f64` endpoints guaranteed to bracket the exact
//! mathematical result. Soundness rests on outward widening after every
//! endpoint evaluation.
//!
//! Widening rule (load-bearing, do not change without re-running the
//! randomized oracle suite):
//!
//! * `+ - * /` and `sqrt` are correctly rounded by IEEE 754, so the
//!   round-to-nearest endpoint result is within 1/2 ulp of the exact value;
//!   widening each endpoint outward by [`ARITH_ULPS`] = 1 ulp encloses it.
//! * `ln` and `exp` go through libm, which is not correctly rounded. Faithful
//!   rounding (< 1 ulp error) is assumed and each endpoint is widened outward
//!   by [`TRANS_ULPS`] = 2 ulps.
//! * Non-integer powers are composed as `exp(y * ln(x))`, so they inherit the
//!   transcendental rule; integer powers are chains of interval products.
//!
//! Comparisons are decided only when the enclosures separate:
//! `definitely_less(a, b)` holds iff `a.hi < b.lo`. Anything else is
//! undecided and callers must treat the inequality as failed.

use crate::error::{Error, Result};

/// Outward widening (ulps) after correctly-rounded operations.
pub const ARITH_ULPS: u32 = 1;
/// Outward widening (ulps) after libm transcendentals.
pub const TRANS_ULPS: u32 = 2;

/// A certified real: the exact value lies in `[lo, hi]`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DirectedValue {
    lo: f64,
    hi: f64,
}

fn step_down(mut x: f64, ulps: u32) -> f64 {
    for _ in 0..ulps {
        x = x.next_down();
    }
    x
}

fn step_up(mut x: f64, ulps: u32) -> f64 {
    for _ in 0..ulps {
        x = x.next_up();
    }
    x
}

impl DirectedValue {
    pub const ZERO: DirectedValue = DirectedValue { lo: 0.0, hi: 0.0 };
    pub const ONE: DirectedValue = DirectedValue { lo: 1.0, hi: 1.0 };

    /// Build from endpoints. Panics on NaN or inverted endpoints: those are
    /// always implementation bugs, never data.
    pub fn new(lo: f64, hi: f64) -> DirectedValue {
        assert!(!lo.is_nan() && !hi.is_nan(), "NaN endpoint");
        assert!(lo <= hi, "inverted enclosure [{lo}, {hi}]");
        DirectedValue { lo, hi }
    }

    /// A point enclosure for a value known to be exactly representable.
    pub fn point(x: f64) -> DirectedValue {
        DirectedValue::new(x, x)
    }

    /// Integers up to 2^53 in magnitude are exact; beyond that the enclosure
    /// widens outward around the rounded conversion.
    pub fn from_int(v: i64) -> DirectedValue {
        let x = v as f64;
        if x as i64 == v && v.abs() <= (1_i64 << 53) {
            DirectedValue::point(x)
        } else {
            DirectedValue::new(x.next_down(), x.next_up())
        }
    }

    /// Enclosure of the exact rational `num / den`.
    pub fn from_ratio(num: i64, den: i64) -> Result<DirectedValue> {
        DirectedValue::from_int(num).div(DirectedValue::from_int(den))
    }

    /// Enclosure of pi (the f64 constant is within 1/2 ulp of pi).
    pub fn pi() -> DirectedValue {
        let p = std::f64::consts::PI;
        DirectedValue::new(p.next_down(), p.next_up())
    }

    pub fn lo(&self) -> f64 {
        self.lo
    }

    pub fn hi(&self) -> f64 {
        self.hi
    }

    pub fn width(&self) -> f64 {
        self.hi - self.lo
    }

    /// (hi - lo) / |lo|; meaningful when the enclosure excludes zero.
    pub fn rel_width(&self) -> f64 {
        self.width() / self.lo.abs()
    }

    pub fn contains(&self, x: f64) -> bool {
        self.lo <= x && x <= self.hi
    }

    fn widened(lo: f64, hi: f64, ulps: u32) -> DirectedValue {
        DirectedValue::new(step_down(lo, ulps), step_up(hi, ulps))
    }

    pub fn div(self, rhs: DirectedValue) -> Result<DirectedValue> {
        if rhs.lo <= 0.0 && rhs.hi >= 0.0 {
            return Err(Error::IndeterminateDivision);
        }
        let c = [
            self.lo / rhs.lo,
            self.lo / rhs.hi,
            self.hi / rhs.lo,
            self.hi / rhs.hi,
        ];
        let lo = c.iter().copied().fold(f64::INFINITY, f64::min);
        let hi = c.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        Ok(DirectedValue::widened(lo, hi, ARITH_ULPS))
    }

    pub fn recip(self) -> Result<DirectedValue> {
        DirectedValue::ONE.div(self)
    }

    pub fn sqrt(self) -> Result<DirectedValue> {
        if self.lo < 0.0 {
            return Err(Error::Domain("sqrt of an enclosure with negative lower endpoint"));
        }
        let out = DirectedValue::widened(self.lo.sqrt(), self.hi.sqrt(), ARITH_ULPS);
        Ok(DirectedValue::new(out.lo.max(0.0), out.hi))
    }

    pub fn ln(self) -> Result<DirectedValue> {
        if self.lo <= 0.0 {
            return Err(Error::Domain("ln of an enclosure with nonpositive lower endpoint"));
        }
        Ok(DirectedValue::widened(self.lo.ln(), self.hi.ln(), TRANS_ULPS))
    }

    /// Total: overflow saturates the upper endpoint at infinity; the lower
    /// endpoint is clamped at 0 since exp is positive.
    pub fn exp(self) -> DirectedValue {
        let out = DirectedValue::widened(self.lo.exp(), self.hi.exp(), TRANS_ULPS);
        DirectedValue::new(out.lo.max(0.0), out.hi)
    }

    /// exp(x) - 1 through the cancellation-free libm primitive, so arguments
    /// near zero keep absolute widths at the scale of the result instead of
    /// the scale of 1. Monotone; widened by [`TRANS_ULPS`]; clamped above -1.
    pub fn exp_m1(self) -> DirectedValue {
        let out = DirectedValue::widened(self.lo.exp_m1(), self.hi.exp_m1(), TRANS_ULPS);
        DirectedValue::new(out.lo.max(-1.0), out.hi)
    }

    /// ln(1 + x), cancellation-free: keeps full relative precision when x is
    /// far below the f64 resolution around 1 (where `(ONE + x).ln()` would
    /// collapse to an enclosure containing 0).
    pub fn ln_1p(self) -> Result<DirectedValue> {
        if self.lo <= -1.0 {
            return Err(Error::Domain("ln_1p of an enclosure reaching -1"));
        }
        Ok(DirectedValue::widened(self.lo.ln_1p(), self.hi.ln_1p(), TRANS_ULPS))
    }

    /// Integer power by binary exponentiation on intervals. Negative
    /// exponents require an enclosure excluding zero.
    pub fn powi(self, e: i32) -> Result<DirectedValue> {
        if e < 0 {
            return self.powi(-e)?.recip();
        }
        let mut acc = DirectedValue::ONE;
        let mut base = self;
        let mut e = e as u32;
        while e > 0 {
            if e & 1 == 1 {
                acc = acc * base;
            }
            e >>= 1;
            if e > 0 {
                base = base * base;
            }
        }
        Ok(acc)
    }

    /// Real power, composed as `exp(e * ln(self))`; requires a certifiably
    /// positive base.
    pub fn powf(self, e: DirectedValue) -> Result<DirectedValue> {
        Ok((e * self.ln()?).exp())
    }

    /// Enclosure of `min(x, y)` over the inputs.
    pub fn min(self, rhs: DirectedValue) -> DirectedValue {
        DirectedValue::new(self.lo.min(rhs.lo), self.hi.min(rhs.hi))
    }

    /// Enclosure of `max(x, y)` over the inputs.
    pub fn max(self, rhs: DirectedValue) -> DirectedValue {
        DirectedValue::new(self.lo.max(rhs.lo), self.hi.max(rhs.hi))
    }

    /// Certified strict comparison: true only when every value in `self` is
    /// below every value in `rhs`.
    pub fn definitely_less(&self, rhs: &DirectedValue) -> bool {
        self.hi < rhs.lo
    }

    /// Certified non-strict comparison.
    pub fn definitely_le(&self, rhs: &DirectedValue) -> bool {
        self.hi <= rhs.lo
    }

    pub fn definitely_greater(&self, rhs: &DirectedValue) -> bool {
        rhs.definitely_less(self)
    }

    pub fn definitely_ge(&self, rhs: &DirectedValue) -> bool {
        rhs.definitely_le(self)
    }
}

impl std::ops::Add for DirectedValue {
    type Output = DirectedValue;
    fn add(self, rhs: DirectedValue) -> DirectedValue {
        DirectedValue::widened(self.lo + rhs.lo, self.hi + rhs.hi, ARITH_ULPS)
    }
}

impl std::ops::Sub for DirectedValue {
    type Output = DirectedValue;
    fn sub(self, rhs: DirectedValue) -> DirectedValue {
        DirectedValue::widened(self.lo - rhs.hi, self.hi - rhs.lo, ARITH_ULPS)
    }
}

impl std::ops::Mul for DirectedValue {
    type Output = DirectedValue;
    fn mul(self, rhs: DirectedValue) -> DirectedValue {
        let c = [
            self.lo * rhs.lo,
            self.lo * rhs.hi,
            self.hi * rhs.lo,
            self.hi * rhs.hi,
        ];
        let lo = c.iter().copied().fold(f64::INFINITY, f64::min);
        let hi = c.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        DirectedValue::widened(lo, hi, ARITH_ULPS)
    }
}

impl std::ops::Neg for DirectedValue {
    type Output = DirectedValue;
    fn neg(self) -> DirectedValue {
        DirectedValue::new(-self.hi, -self.lo)
    }
}

impl std::fmt::Display for DirectedValue {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "[{:e}, {:e}]", self.lo, self.hi)
    }
}

/// An exact decimal `units / 10^scale`, used wherever grid semantics matter
/// (the eta search grid, epsilon). Keeps the textual form reproducible.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Decimal {
    units: i64,
    scale: u32,
}

impl Decimal {
    pub fn new(units: i64, scale: u32) -> Result<Decimal> {
        if scale > 18 {
            return Err(Error::Parse(format!("decimal scale {scale} too large")));
        }
        Ok(Decimal { units, scale })
    }

    pub fn units(&self) -> i64 {
        self.units
    }

    pub fn scale(&self) -> u32 {
        self.scale
    }

    pub fn parse(text: &str) -> Result<Decimal> {
        let bad = || Error::Parse(format!("not a plain decimal: {text:?}"));
        let (int_part, frac_part) = match text.split_once('.') {
            Some((i, f)) => (i, f),
            None => (text, ""),
        };
        if int_part.is_empty() && frac_part.is_empty() {
            return Err(bad());
        }
        let digits: String = [int_part, frac_part].concat();
        if digits.is_empty() || !digits.bytes().all(|b| b.is_ascii_digit()) {
            return Err(bad());
        }
        if digits.len() > 18 {
            return Err(Error::Parse(format!("too many digits: {text:?}")));
        }
        let units: i64 = digits.parse().map_err(|_| bad())?;
        Decimal::new(units, frac_part.len() as u32)
    }

    /// Tight enclosure of the exact decimal value.
    pub fn to_dv(&self) -> DirectedValue {
        DirectedValue::from_ratio(self.units, 10_i64.pow(self.scale))
            .expect("power of ten is nonzero")
    }

    /// One grid step smaller at the same scale; None below zero.
    pub fn step_down(&self) -> Option<Decimal> {
        if self.units <= 0 {
            None
        } else {
            Some(Decimal { units: self.units - 1, scale: self.scale })
        }
    }

    pub fn is_positive(&self) -> bool {
        self.units > 0
    }
}

impl std::fmt::Display for Decimal {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        if self.scale == 0 {
            return write!(f, "{}", self.units);
        }
        let q = 10_i64.pow(self.scale);
        let int = self.units / q;
        let frac = (self.units % q).unsigned_abs();
        write!(f, "{}.{:0width$}", int, frac, width = self.scale as usize)
    }
}
