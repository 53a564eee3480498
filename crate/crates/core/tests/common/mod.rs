//! Shared test oracles: a multiprecision mirror of the enclosure ops and an
//! exhaustive cover enumerator for net content. Everything here is
//! independent of the library's own computation paths.

#![allow(dead_code)]

use astro_float::{BigFloat, Consts, RoundingMode};
use num_rational::Ratio;
use std::cmp::Ordering;

use bourgain::net::radical::Elem;
use bourgain::net::{DigitalSet, ExactValue, Scale};

/// ~58 decimal digits; comfortably past the 50-digit oracle requirement.
pub const ORACLE_BITS: usize = 192;

pub struct Oracle {
    pub cc: Consts,
}

impl Oracle {
    pub fn new() -> Oracle {
        Oracle { cc: Consts::new().expect("constants cache") }
    }

    pub fn embed(&self, x: f64) -> BigFloat {
        BigFloat::from_f64(x, ORACLE_BITS)
    }

    /// Bit-exact conversion covering subnormals, which `from_f64` mangles:
    /// decompose into integer mantissa times a power of two, both exact.
    pub fn embed_exact(&mut self, x: f64) -> BigFloat {
        if x == 0.0 {
            return BigFloat::from_f64(0.0, ORACLE_BITS);
        }
        let bits = x.to_bits();
        let negative = bits >> 63 == 1;
        let exp_bits = ((bits >> 52) & 0x7ff) as i32;
        let frac = bits & ((1u64 << 52) - 1);
        let (mant, e2) = if exp_bits == 0 {
            (frac, -1074)
        } else {
            (frac | (1u64 << 52), exp_bits - 1075)
        };
        // mant < 2^53 converts exactly; 2^e2 is exact in binary floats
        let m = BigFloat::from_f64(mant as f64, ORACLE_BITS);
        let two = BigFloat::from_f64(2.0, ORACLE_BITS);
        let scale = self.powi(&two, e2);
        let v = self.mul(&m, &scale);
        if negative {
            v.neg()
        } else {
            v
        }
    }

    pub fn add(&mut self, a: &BigFloat, b: &BigFloat) -> BigFloat {
        a.add(b, ORACLE_BITS, RoundingMode::None)
    }

    pub fn sub(&mut self, a: &BigFloat, b: &BigFloat) -> BigFloat {
        a.sub(b, ORACLE_BITS, RoundingMode::None)
    }

    pub fn mul(&mut self, a: &BigFloat, b: &BigFloat) -> BigFloat {
        a.mul(b, ORACLE_BITS, RoundingMode::None)
    }

    pub fn div(&mut self, a: &BigFloat, b: &BigFloat) -> BigFloat {
        a.div(b, ORACLE_BITS, RoundingMode::None)
    }

    pub fn sqrt(&mut self, a: &BigFloat) -> BigFloat {
        a.sqrt(ORACLE_BITS, RoundingMode::None)
    }

    pub fn ln(&mut self, a: &BigFloat) -> BigFloat {
        a.ln(ORACLE_BITS, RoundingMode::None, &mut self.cc)
    }

    pub fn exp(&mut self, a: &BigFloat) -> BigFloat {
        a.exp(ORACLE_BITS, RoundingMode::None, &mut self.cc)
    }

    /// exp(x) - 1 without cancellation: a plain series for small arguments
    /// (converges past full precision in ~30 terms), exp - 1 at extended
    /// precision otherwise.
    pub fn exp_m1(&mut self, a: &BigFloat) -> BigFloat {
        let half = BigFloat::from_f64(2.0_f64.powi(-8), ORACLE_BITS);
        let neg_half = half.neg();
        if matches!(a.cmp(&half), Some(s) if s <= 0)
            && matches!(a.cmp(&neg_half), Some(s) if s >= 0)
        {
            // x * (1 + x/2 * (1 + x/3 * (...)))
            let p = ORACLE_BITS + 64;
            let rm = RoundingMode::None;
            let mut acc = BigFloat::from_f64(1.0, p);
            for k in (2..=40u64).rev() {
                let kf = BigFloat::from_f64(k as f64, p);
                acc = acc.mul(a, p, rm).div(&kf, p, rm).add(&BigFloat::from_f64(1.0, p), p, rm);
            }
            acc.mul(a, p, rm)
        } else {
            let p = ORACLE_BITS + 128;
            let one = BigFloat::from_f64(1.0, p);
            a.exp(p, RoundingMode::None, &mut self.cc)
                .sub(&one, p, RoundingMode::None)
        }
    }

    /// ln(1 + x) without cancellation, mirroring exp_m1: alternating series
    /// for small arguments, extended-precision ln otherwise.
    pub fn ln_1p(&mut self, a: &BigFloat) -> BigFloat {
        let half = BigFloat::from_f64(2.0_f64.powi(-8), ORACLE_BITS);
        let neg_half = half.neg();
        if matches!(a.cmp(&half), Some(s) if s <= 0)
            && matches!(a.cmp(&neg_half), Some(s) if s >= 0)
        {
            // x * (1 - x (1/2 - x (1/3 - ...)))
            let p = ORACLE_BITS + 64;
            let rm = RoundingMode::None;
            let mut acc = BigFloat::from_f64(0.0, p);
            for k in (1..=40u64).rev() {
                let inv_k = BigFloat::from_f64(1.0, p).div(&BigFloat::from_f64(k as f64, p), p, rm);
                acc = inv_k.sub(&a.mul(&acc, p, rm), p, rm);
            }
            a.mul(&acc, p, rm)
        } else {
            let p = ORACLE_BITS + 128;
            let one = BigFloat::from_f64(1.0, p);
            one.add(a, p, RoundingMode::None)
                .ln(p, RoundingMode::None, &mut self.cc)
        }
    }

    pub fn powi(&mut self, a: &BigFloat, e: i32) -> BigFloat {
        if e < 0 {
            let p = self.powi(a, -e);
            return self.div(&BigFloat::from_f64(1.0, ORACLE_BITS), &p);
        }
        let mut acc = BigFloat::from_f64(1.0, ORACLE_BITS);
        let mut base = a.clone();
        let mut e = e as u32;
        while e > 0 {
            if e & 1 == 1 {
                acc = self.mul(&acc, &base);
            }
            e >>= 1;
            if e > 0 {
                base = self.mul(&base, &base);
            }
        }
        acc
    }

    pub fn powf(&mut self, a: &BigFloat, e: &BigFloat) -> BigFloat {
        a.pow(e, ORACLE_BITS, RoundingMode::None, &mut self.cc)
    }

    pub fn le(&self, a: &BigFloat, b: &BigFloat) -> bool {
        matches!(a.cmp(b), Some(s) if s <= 0)
    }

    /// lo <= value <= hi, with endpoints embedded bit-exactly.
    pub fn contained(&mut self, lo: f64, value: &BigFloat, hi: f64) -> bool {
        let lo = self.embed_exact(lo);
        let hi = self.embed_exact(hi);
        self.le(&lo, value) && self.le(value, &hi)
    }
}

/// Every antichain cover cost of the subtree rooted at `level` over the
/// given leaves, by explicit enumeration (no min-combining at internal
/// nodes). The caller takes the global minimum. Panics past `cap` covers.
fn cover_costs(
    scale: &Scale,
    set: &DigitalSet,
    level: u32,
    leaves: &[&Vec<u32>],
    delta_depth: i32,
    cap: usize,
) -> Vec<Elem> {
    let field = scale.field();
    if level == set.depth {
        return vec![scale.side_pow_s(level)];
    }
    let mut groups: std::collections::BTreeMap<Vec<u32>, Vec<&Vec<u32>>> =
        std::collections::BTreeMap::new();
    let shift = set.m.pow(set.depth - level - 1);
    for leaf in leaves {
        let key: Vec<u32> = leaf.iter().map(|c| c / shift).collect();
        groups.entry(key).or_default().push(leaf);
    }
    let mut combos: Vec<Elem> = vec![field.zero()];
    for (_, group) in groups {
        let child = cover_costs(scale, set, level + 1, &group, delta_depth, cap);
        let mut next = Vec::with_capacity(combos.len() * child.len());
        for a in &combos {
            for b in &child {
                next.push(field.add(a, b));
            }
        }
        assert!(next.len() <= cap, "cover enumeration blew past cap");
        combos = next;
    }
    if level as i32 >= delta_depth {
        combos.push(scale.side_pow_s(level));
    }
    combos
}

/// Exhaustive minimum over all antichain covers; exponential, test-only.
pub fn brute_force_content(set: &DigitalSet, s: Ratio<i64>, delta_depth: i32) -> ExactValue {
    let scale = Scale::new(set.m, s).expect("valid scale");
    let field = *scale.field();
    if set.cubes.is_empty() {
        return ExactValue::new(field, field.zero());
    }
    let leaves: Vec<&Vec<u32>> = set.cubes.iter().collect();
    let costs = cover_costs(&scale, set, 0, &leaves, delta_depth, 400_000);
    let min = costs
        .into_iter()
        .reduce(|a, b| if field.cmp(&b, &a) == Ordering::Less { b } else { a })
        .expect("nonempty");
    ExactValue::new(field, min)
}

/// Number of covers the enumeration would produce, to keep generated sets
/// tractable.
pub fn cover_count(set: &DigitalSet, delta_depth: i32) -> f64 {
    fn count(set: &DigitalSet, level: u32, leaves: &[&Vec<u32>], delta_depth: i32) -> f64 {
        if level == set.depth {
            return 1.0;
        }
        let mut groups: std::collections::BTreeMap<Vec<u32>, Vec<&Vec<u32>>> =
            std::collections::BTreeMap::new();
        let shift = set.m.pow(set.depth - level - 1);
        for leaf in leaves {
            let key: Vec<u32> = leaf.iter().map(|c| c / shift).collect();
            groups.entry(key).or_default().push(leaf);
        }
        let mut prod = 1.0f64;
        for (_, group) in groups {
            prod *= count(set, level + 1, &group, delta_depth);
        }
        if level as i32 >= delta_depth {
            prod += 1.0;
        }
        prod
    }
    let leaves: Vec<&Vec<u32>> = set.cubes.iter().collect();
    if leaves.is_empty() {
        return 1.0;
    }
    count(set, 0, &leaves, delta_depth)
}
