//! Exact arithmetic in the field Q(u), u = b^(1/q).
//!
//! Side lengths are powers of the grid arity m, so every quantity the
//! net-content DP and the mass construction touch lives in the field
//! generated by a single radical: with s = p/q in lowest terms and
//! m = b^g (b not a perfect power), m^(-s) is an integer power of
//! u = b^(1/q'), and `1, u, ..., u^(q'-1)` is a basis of Q(u) over Q.
//! Elements are coefficient vectors in that basis, so equality is
//! coefficientwise and sign evaluation terminates for nonzero elements by
//! interval refinement of u.

use std::cmp::Ordering;

use num_bigint::BigInt;

use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};

/// The field descriptor: u = base^(1/index), minimal polynomial
/// X^index - base over Q (base is not a perfect power when index > 1).
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct RadicalField {
    base: u64,
    index: u32,
}

/// A field element: coefficients of 1, u, ..., u^(index-1).
#[derive(Clone, Debug, PartialEq)]
pub struct Elem {
    coeffs: Vec<BigRational>,
}

impl RadicalField {
    /// `base` must not be a perfect power unless index == 1; the caller
    /// (Scale) guarantees this by construction.
    pub fn new(base: u64, index: u32) -> RadicalField {
        assert!(base >= 2 && index >= 1);
        RadicalField { base, index }
    }

    pub fn base(&self) -> u64 {
        self.base
    }

    pub fn index(&self) -> u32 {
        self.index
    }

    pub fn zero(&self) -> Elem {
        Elem { coeffs: vec![BigRational::zero(); self.index as usize] }
    }

    pub fn one(&self) -> Elem {
        self.from_rational(BigRational::one())
    }

    pub fn from_rational(&self, r: BigRational) -> Elem {
        let mut e = self.zero();
        e.coeffs[0] = r;
        e
    }

    pub fn is_zero(&self, a: &Elem) -> bool {
        a.coeffs.iter().all(|c| c.is_zero())
    }

    /// The rational value when the element is degree zero.
    pub fn as_rational(&self, a: &Elem) -> Option<BigRational> {
        if a.coeffs[1..].iter().all(|c| c.is_zero()) {
            Some(a.coeffs[0].clone())
        } else {
            None
        }
    }

    pub fn add(&self, a: &Elem, b: &Elem) -> Elem {
        Elem {
            coeffs: a
                .coeffs
                .iter()
                .zip(&b.coeffs)
                .map(|(x, y)| x + y)
                .collect(),
        }
    }

    pub fn sub(&self, a: &Elem, b: &Elem) -> Elem {
        Elem {
            coeffs: a
                .coeffs
                .iter()
                .zip(&b.coeffs)
                .map(|(x, y)| x - y)
                .collect(),
        }
    }

    pub fn mul(&self, a: &Elem, b: &Elem) -> Elem {
        let q = self.index as usize;
        let base = BigRational::from_integer(BigInt::from(self.base));
        let mut out = vec![BigRational::zero(); q];
        for (i, x) in a.coeffs.iter().enumerate() {
            if x.is_zero() {
                continue;
            }
            for (j, y) in b.coeffs.iter().enumerate() {
                if y.is_zero() {
                    continue;
                }
                let prod = x * y;
                let e = i + j;
                if e < q {
                    out[e] += prod;
                } else {
                    // u^q = base
                    out[e - q] += prod * &base;
                }
            }
        }
        Elem { coeffs: out }
    }

    /// Multiplicative inverse via the extended Euclidean algorithm against
    /// the minimal polynomial.
    pub fn inv(&self, a: &Elem) -> Result<Elem> {
        if self.is_zero(a) {
            return Err(Error::Domain("inverse of zero"));
        }
        if let Some(r) = self.as_rational(a) {
            return Ok(self.from_rational(r.recip()));
        }
        // minimal polynomial X^index - base
        let mut min_poly = vec![BigRational::zero(); self.index as usize + 1];
        min_poly[0] = -BigRational::from_integer(BigInt::from(self.base));
        min_poly[self.index as usize] = BigRational::one();
        let (g, s) = poly_ext_gcd(&a.coeffs, &min_poly);
        // g is a nonzero constant since the minimal polynomial is irreducible
        assert_eq!(poly_degree(&g), Some(0), "gcd with minimal polynomial");
        let ginv = g[0].recip();
        let mut coeffs: Vec<BigRational> = s.iter().map(|c| c * &ginv).collect();
        coeffs.resize(self.index as usize, BigRational::zero());
        Ok(Elem { coeffs })
    }

    pub fn div(&self, a: &Elem, b: &Elem) -> Result<Elem> {
        Ok(self.mul(a, &self.inv(b)?))
    }

    /// u^e for e >= 0: a monomial after reducing by u^index = base.
    pub fn u_pow(&self, e: u64) -> Elem {
        let q = self.index as u64;
        let carry = e / q;
        let rem = (e % q) as usize;
        let mut out = self.zero();
        out.coeffs[rem] = BigRational::from_integer(BigInt::from(self.base).pow(carry as u32));
        out
    }

    /// u^(-e): also a monomial, shifted into the basis range.
    pub fn u_pow_neg(&self, e: u64) -> Elem {
        let q = self.index as u64;
        let carry = e / q;
        let rem = e % q;
        let base = BigInt::from(self.base);
        let mut out = self.zero();
        if rem == 0 {
            out.coeffs[0] = BigRational::new(BigInt::one(), base.pow(carry as u32));
        } else {
            // u^{-e} = u^{q - rem} / base^{carry + 1}
            out.coeffs[(q - rem) as usize] =
                BigRational::new(BigInt::one(), base.pow(carry as u32 + 1));
        }
        out
    }

    /// Sign of the element's real value. Zero detection is exact (all basis
    /// coordinates zero); otherwise interval refinement of u terminates.
    pub fn sign(&self, a: &Elem) -> Ordering {
        if self.is_zero(a) {
            return Ordering::Equal;
        }
        if let Some(r) = self.as_rational(a) {
            return r.cmp(&BigRational::zero());
        }
        let mut bits = 16u32;
        loop {
            let (lo, hi) = self.eval_interval(a, bits);
            if lo.is_positive() {
                return Ordering::Greater;
            }
            if hi.is_negative() {
                return Ordering::Less;
            }
            assert!(bits <= 4096, "sign refinement exhausted on nonzero element");
            bits *= 2;
        }
    }

    pub fn cmp(&self, a: &Elem, b: &Elem) -> Ordering {
        self.sign(&self.sub(a, b))
    }

    /// Rational interval enclosing u to `bits` fractional bits.
    fn u_interval(&self, bits: u32) -> (BigRational, BigRational) {
        let scaled = BigInt::from(self.base) << (self.index * bits) as usize;
        let root = scaled.nth_root(self.index);
        let den = BigInt::one() << bits as usize;
        (
            BigRational::new(root.clone(), den.clone()),
            BigRational::new(root + 1, den),
        )
    }

    /// Rational interval enclosing the element's value.
    pub fn eval_interval(&self, a: &Elem, bits: u32) -> (BigRational, BigRational) {
        let (ulo, uhi) = self.u_interval(bits);
        let mut lo = BigRational::zero();
        let mut hi = BigRational::zero();
        let mut plo = BigRational::one();
        let mut phi = BigRational::one();
        for (j, c) in a.coeffs.iter().enumerate() {
            if j > 0 {
                plo *= &ulo;
                phi *= &uhi;
            }
            if c.is_zero() {
                continue;
            }
            if c.is_positive() {
                lo += c * &plo;
                hi += c * &phi;
            } else {
                lo += c * &phi;
                hi += c * &plo;
            }
        }
        (lo, hi)
    }

    pub fn to_f64(&self, a: &Elem) -> f64 {
        let (lo, hi) = self.eval_interval(a, 96);
        let mid = (lo + hi) / BigRational::from_integer(BigInt::from(2));
        mid.to_f64().unwrap_or(f64::NAN)
    }

    /// Canonical text form: a plain `p/q` when rational, otherwise a sum of
    /// `c * b^(j/q)` terms.
    pub fn format(&self, a: &Elem) -> String {
        if let Some(r) = self.as_rational(a) {
            return r.to_string();
        }
        let mut parts = Vec::new();
        for (j, c) in a.coeffs.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            let coeff = if c.is_negative() {
                format!("({c})")
            } else {
                c.to_string()
            };
            let part = match j {
                0 => coeff,
                _ => format!("{}*{}^({}/{})", coeff, self.base, j, self.index),
            };
            parts.push(part);
        }
        parts.join(" + ")
    }
}

fn poly_degree(p: &[BigRational]) -> Option<usize> {
    p.iter().rposition(|c| !c.is_zero())
}

fn poly_trim(mut p: Vec<BigRational>) -> Vec<BigRational> {
    while p.len() > 1 && p.last().is_some_and(|c| c.is_zero()) {
        p.pop();
    }
    p
}

fn poly_divmod(num: &[BigRational], den: &[BigRational]) -> (Vec<BigRational>, Vec<BigRational>) {
    let dd = poly_degree(den).expect("division by zero polynomial");
    let lead = den[dd].clone();
    let mut rem = num.to_vec();
    let nd = match poly_degree(&rem) {
        Some(d) if d >= dd => d,
        _ => return (vec![BigRational::zero()], poly_trim(rem)),
    };
    let mut quot = vec![BigRational::zero(); nd - dd + 1];
    for k in (0..=(nd - dd)).rev() {
        let coeff = &rem[k + dd] / &lead;
        if coeff.is_zero() {
            continue;
        }
        quot[k] = coeff.clone();
        for j in 0..=dd {
            let t = &den[j] * &coeff;
            rem[k + j] -= t;
        }
    }
    (poly_trim(quot), poly_trim(rem))
}

fn poly_sub_mul(a: &[BigRational], q: &[BigRational], b: &[BigRational]) -> Vec<BigRational> {
    // a - q*b
    let mut out = a.to_vec();
    let need = q.len() + b.len();
    if out.len() < need {
        out.resize(need, BigRational::zero());
    }
    for (i, qc) in q.iter().enumerate() {
        if qc.is_zero() {
            continue;
        }
        for (j, bc) in b.iter().enumerate() {
            let t = qc * bc;
            out[i + j] -= t;
        }
    }
    poly_trim(out)
}

/// Returns (g, s) with s*a == g (mod b) and g = gcd(a, b).
fn poly_ext_gcd(a: &[BigRational], b: &[BigRational]) -> (Vec<BigRational>, Vec<BigRational>) {
    let mut r0 = poly_trim(a.to_vec());
    let mut r1 = poly_trim(b.to_vec());
    let mut s0 = vec![BigRational::one()];
    let mut s1 = vec![BigRational::zero()];
    while poly_degree(&r1).is_some() {
        let (q, r) = poly_divmod(&r0, &r1);
        let s = poly_sub_mul(&s0, &q, &s1);
        r0 = r1;
        r1 = r;
        s0 = s1;
        s1 = s;
    }
    (r0, s0)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rat(n: i64, d: i64) -> BigRational {
        BigRational::new(BigInt::from(n), BigInt::from(d))
    }

    #[test]
    fn rational_field_degenerates() {
        let f = RadicalField::new(3, 1);
        let a = f.from_rational(rat(2, 3));
        let b = f.from_rational(rat(1, 6));
        assert_eq!(f.as_rational(&f.add(&a, &b)).unwrap(), rat(5, 6));
        assert_eq!(f.sign(&f.sub(&a, &b)), Ordering::Greater);
        assert_eq!(f.as_rational(&f.div(&a, &b).unwrap()).unwrap(), rat(4, 1));
    }

    #[test]
    fn sqrt2_arithmetic() {
        // u = 2^(1/2): (1 + u)(u - 1) = 1
        let f = RadicalField::new(2, 2);
        let one = f.one();
        let u = f.u_pow(1);
        let a = f.add(&one, &u);
        let b = f.sub(&u, &one);
        assert_eq!(f.as_rational(&f.mul(&a, &b)).unwrap(), rat(1, 1));
        // and the inverse of 1 + u is u - 1
        assert_eq!(f.inv(&a).unwrap(), b);
    }

    #[test]
    fn sign_of_radical_comparison() {
        // 3^(1/2) vs 7/4: 1.732... < 1.75
        let f = RadicalField::new(3, 2);
        let u = f.u_pow(1);
        let r = f.from_rational(rat(7, 4));
        assert_eq!(f.cmp(&u, &r), Ordering::Less);
        let r = f.from_rational(rat(17, 10));
        assert_eq!(f.cmp(&u, &r), Ordering::Greater);
    }

    #[test]
    fn fourth_root_powers() {
        // u = 3^(1/4): u^4 = 3, u^-4 = 1/3, u^-2 = u^2/3
        let f = RadicalField::new(3, 4);
        assert_eq!(f.as_rational(&f.u_pow(4)).unwrap(), rat(3, 1));
        assert_eq!(f.as_rational(&f.u_pow_neg(4)).unwrap(), rat(1, 3));
        let x = f.u_pow_neg(2);
        let square = f.mul(&x, &x);
        assert_eq!(f.as_rational(&square).unwrap(), rat(1, 3));
        // u^-2 * u^2 = 1
        assert_eq!(f.as_rational(&f.mul(&x, &f.u_pow(2))).unwrap(), rat(1, 1));
    }

    #[test]
    fn inverse_roundtrip_degree_four() {
        let f = RadicalField::new(2, 4);
        // x = 3/2 - u + u^3/5
        let mut x = f.zero();
        x.coeffs[0] = rat(3, 2);
        x.coeffs[1] = rat(-1, 1);
        x.coeffs[3] = rat(1, 5);
        let xi = f.inv(&x).unwrap();
        assert_eq!(f.as_rational(&f.mul(&x, &xi)).unwrap(), rat(1, 1));
    }

    #[test]
    fn format_values() {
        let f = RadicalField::new(3, 2);
        assert_eq!(f.format(&f.from_rational(rat(3, 16))), "3/16");
        let mut x = f.zero();
        x.coeffs[0] = rat(1, 2);
        x.coeffs[1] = rat(-1, 4);
        assert_eq!(f.format(&x), "1/2 + (-1/4)*3^(1/2)");
    }
}
