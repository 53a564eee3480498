//! Certified lower-bound engine.
//!
//! Given a grid arity m, an estimate constant alpha valid on an s-range of
//! width epsilon, and parameters (eta, h, d), this module certifies
//! admissibility and assembles the dimension-gap bound
//! `lambda * rho / (lambda + rho)`. Every inequality is decided on
//! enclosures; an undecided comparison marks the tuple inadmissible.

use serde_json::json;

use crate::error::{Error, Result};
use crate::rigor::{Decimal, DirectedValue};

/// The eta parameter: either an exact decimal from the search grid, or a
/// derived enclosure (the large-n preset's closed form).
#[derive(Clone, Debug)]
pub enum EtaParam {
    Decimal(Decimal),
    Enclosure { value: DirectedValue, label: String },
}

impl EtaParam {
    pub fn dv(&self) -> DirectedValue {
        match self {
            EtaParam::Decimal(d) => d.to_dv(),
            EtaParam::Enclosure { value, .. } => *value,
        }
    }
}

impl std::fmt::Display for EtaParam {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            EtaParam::Decimal(d) => write!(f, "{d}"),
            EtaParam::Enclosure { label, .. } => write!(f, "{label}"),
        }
    }
}

/// One candidate configuration for the bound engine.
#[derive(Clone, Debug)]
pub struct ParameterTuple {
    pub n: u32,
    pub m: u32,
    pub eta: EtaParam,
    pub h: u32,
    pub d: u32,
    pub epsilon: Decimal,
}

impl ParameterTuple {
    pub fn validate(&self) -> Result<()> {
        if self.n < 3 || self.m < 5 || self.h < 1 || self.d < 1 {
            return Err(Error::Config(format!(
                "parameters out of range: n={} m={} h={} d={}",
                self.n, self.m, self.h, self.d
            )));
        }
        let eta = self.eta.dv();
        if eta.lo() <= 0.0 || eta.hi() >= 1.0 {
            return Err(Error::Config("eta must lie strictly inside (0, 1)".into()));
        }
        if !self.epsilon.is_positive() {
            return Err(Error::Config("epsilon must be positive".into()));
        }
        Ok(())
    }
}

/// The pieces of the contraction factor: V is the outer-shell volume term,
/// Pi the escape-probability term, and gamma the combined factor
/// `V + (1 - 2h/m)^{n/2} * Pi`.
#[derive(Clone, Copy, Debug)]
pub struct GammaParts {
    pub v: DirectedValue,
    pub pi: DirectedValue,
    pub gamma: DirectedValue,
}

/// Largest admissible eta: `((1 - m^-n) / (2 - m^-n)) / alpha`. The lower
/// endpoint is the safe threshold.
pub fn eta_max(n: u32, m: u32, alpha: &DirectedValue) -> Result<DirectedValue> {
    let m_neg_n = DirectedValue::from_int(m as i64).powi(-(n as i32))?;
    (DirectedValue::ONE - m_neg_n)
        .div(DirectedValue::from_int(2) - m_neg_n)?
        .div(*alpha)
}

/// V, Pi, and gamma for the tuple. When h >= m/2 there is no interior region
/// left and all three collapse to 1 by convention.
pub fn gamma_parts(p: &ParameterTuple) -> Result<GammaParts> {
    p.validate()?;
    if 2 * p.h >= p.m {
        return Ok(GammaParts {
            v: DirectedValue::ONE,
            pi: DirectedValue::ONE,
            gamma: DirectedValue::ONE,
        });
    }
    let eta = p.eta.dv();
    let n = p.n as i64;
    // x = 1 - 2h/m, strictly positive here
    let x = DirectedValue::ONE
        - DirectedValue::from_int(2 * p.h as i64).div(DirectedValue::from_int(p.m as i64))?;
    let v = (DirectedValue::ONE - x.powi(p.n as i32)?).sqrt()?;
    // Pi = eta^{-1/2} (1-eta)^{h m^{d-1} / 2}; the possibly half-integral
    // exponent goes through exp/ln, with ln(1 - eta) taken cancellation-free
    // so eta below the f64 resolution around 1 still yields a finite bound.
    let k = DirectedValue::from_int(p.h as i64)
        * DirectedValue::from_int(p.m as i64).powi(p.d as i32 - 1)?
        * DirectedValue::from_ratio(1, 2)?;
    let pi = eta.sqrt()?.recip()? * (k * (-eta).ln_1p()?).exp();
    // gamma = V + x^{n/2} Pi, the half-integral power via exp/ln
    let x_pow = x.powf(DirectedValue::from_ratio(n, 2)?)?;
    let gamma = v + x_pow * pi;
    Ok(GammaParts { v, pi, gamma })
}

/// `-log_m(gamma)`; zero when gamma is not certifiably below 1.
pub fn lambda(m: u32, gamma: &DirectedValue) -> DirectedValue {
    if gamma.hi() >= 1.0 {
        return DirectedValue::ZERO;
    }
    assert!(gamma.lo() > 0.0, "gamma enclosure must be positive");
    (-gamma.ln().expect("positive"))
        .div(DirectedValue::from_int(m as i64).ln().expect("m > 1"))
        .expect("ln m > 0")
}

fn eta_admissible(n: u32, m: u32, alpha: &DirectedValue, eta: &DirectedValue) -> Result<bool> {
    let m_neg_n = DirectedValue::from_int(m as i64).powi(-(n as i32))?;
    let lhs = (DirectedValue::from_int(2) - m_neg_n) * *alpha * *eta;
    let rhs = DirectedValue::ONE - m_neg_n;
    Ok(lhs.definitely_le(&rhs))
}

/// The content-smallness exponent
/// `min{epsilon, 0.914186 (1 - alpha eta)(1 - m^-n) m^{-(d+1)n} / ln m}`;
/// zero when eta is not certifiably admissible.
pub fn rho(
    n: u32,
    m: u32,
    alpha: &DirectedValue,
    eta: &DirectedValue,
    d: u32,
    epsilon: &Decimal,
) -> Result<DirectedValue> {
    if !eta_admissible(n, m, alpha, eta)? {
        return Ok(DirectedValue::ZERO);
    }
    let m_dv = DirectedValue::from_int(m as i64);
    let m_neg_n = m_dv.powi(-(n as i32))?;
    let c = DirectedValue::from_ratio(914_186, 1_000_000)?;
    let v = c
        * (DirectedValue::ONE - *alpha * *eta)
        * (DirectedValue::ONE - m_neg_n)
        * m_dv.powi(-((d as i32 + 1) * n as i32))?
        .div(m_dv.ln()?)?;
    // Admissibility certifies alpha*eta <= 1/2, so every factor is
    // nonnegative; a lower endpoint pushed below zero by outward widening
    // can be clamped.
    let v = DirectedValue::new(v.lo().max(0.0), v.hi());
    Ok(epsilon.to_dv().min(v))
}

/// Independent re-verification that rho satisfies the geometric-series
/// inequality
/// `(m^n - 1)(m^{rho-n} + ... + m^{(d+1)(rho-n)}) < 1 - a m^{(d+1)(rho-n)}`
/// with `a = alpha eta`. Both sides are evaluated as enclosures; true only
/// when the strict inequality is decided. An undecided precondition or
/// comparison yields false.
pub fn prelemma_check(
    n: u32,
    m: u32,
    d: u32,
    a: &DirectedValue,
    rho: &DirectedValue,
) -> bool {
    let Ok(m_neg_n) = DirectedValue::from_int(m as i64).powi(-(n as i32)) else {
        return false;
    };
    let lhs_pre = (DirectedValue::from_int(2) - m_neg_n) * *a;
    if !lhs_pre.definitely_le(&(DirectedValue::ONE - m_neg_n)) {
        return false;
    }
    let m_dv = DirectedValue::from_int(m as i64);
    // Both sides sit within O(m^{-(d+1)n}) of 1, far below double-precision
    // resolution there, so the comparison is rewritten around the exact
    // telescoping identity (m^n - 1) sum_j m^{-jn} = 1 - m^{-Dn} (D = d+1):
    //
    //   (m^n - 1) sum_j m^{-jn} (m^{j rho} - 1)  <  m^{-Dn} (1 - a m^{D rho})
    //
    // an equivalent inequality between small quantities, with every
    // m^{j rho} - 1 computed cancellation-free.
    let Ok(ln_m) = m_dv.ln() else { return false };
    let big = d + 1;
    let drift_m1 =
        |j: u32| (*rho * DirectedValue::from_int(j as i64) * ln_m).exp_m1();
    let mut lhs = DirectedValue::ZERO;
    for j in 1..=big {
        let Ok(exact) = m_dv.powi(-((j * n) as i32)) else { return false };
        lhs = lhs + exact * drift_m1(j);
    }
    let Ok(m_pow_n) = m_dv.powi(n as i32) else { return false };
    lhs = (m_pow_n - DirectedValue::ONE) * lhs;
    let Ok(m_neg_big) = m_dv.powi(-((big * n) as i32)) else { return false };
    let top = DirectedValue::ONE + drift_m1(big);
    let rhs = m_neg_big * (DirectedValue::ONE - *a * top);
    lhs.definitely_less(&rhs)
}

/// The certified output record: all assembled quantities plus the flags that
/// explain admissibility.
#[derive(Clone, Debug)]
pub struct BoundCertificate {
    pub params: ParameterTuple,
    pub alpha: DirectedValue,
    pub v: DirectedValue,
    pub pi: DirectedValue,
    pub gamma: DirectedValue,
    pub lambda: DirectedValue,
    pub rho: DirectedValue,
    pub bound: DirectedValue,
    pub eta_admissible: bool,
    pub gamma_below_one: bool,
    pub prelemma_verified: bool,
    pub admissible: bool,
}

/// Assemble a certificate. Inadmissibility is a result, not an error: the
/// flags record which hypothesis failed and the bound collapses to zero.
pub fn certify(p: &ParameterTuple, alpha: &DirectedValue) -> Result<BoundCertificate> {
    p.validate()?;
    let parts = gamma_parts(p)?;
    let eta = p.eta.dv();
    let eta_ok = eta_admissible(p.n, p.m, alpha, &eta)?;
    let gamma_ok = parts.gamma.hi() < 1.0;
    let lam = lambda(p.m, &parts.gamma);
    let r = rho(p.n, p.m, alpha, &eta, p.d, &p.epsilon)?;
    let a = *alpha * eta;
    let prelemma = prelemma_check(p.n, p.m, p.d, &a, &r);
    let admissible = eta_ok && gamma_ok && prelemma;
    let bound = if !admissible || lam.hi() == 0.0 || r.hi() == 0.0 {
        DirectedValue::ZERO
    } else {
        (lam * r).div(lam + r)?
    };
    Ok(BoundCertificate {
        params: p.clone(),
        alpha: *alpha,
        v: parts.v,
        pi: parts.pi,
        gamma: parts.gamma,
        lambda: lam,
        rho: r,
        bound,
        eta_admissible: eta_ok,
        gamma_below_one: gamma_ok,
        prelemma_verified: prelemma,
        admissible,
    })
}

impl BoundCertificate {
    /// Short reason string for an inadmissible certificate.
    pub fn failure_reason(&self) -> Option<&'static str> {
        if self.admissible {
            return None;
        }
        if !self.gamma_below_one {
            Some("gamma >= 1")
        } else if !self.eta_admissible {
            Some("eta inadmissible")
        } else {
            Some("prelemma check failed")
        }
    }

    /// Flat JSON with both endpoints of every enclosure. Keys are sorted, so
    /// output is byte-identical across runs for one version.
    pub fn to_json(&self, version: &str) -> serde_json::Value {
        json!({
            "version": version,
            "n": self.params.n,
            "m": self.params.m,
            "eta": self.params.eta.to_string(),
            "eta_lo": self.params.eta.dv().lo(),
            "eta_hi": self.params.eta.dv().hi(),
            "h": self.params.h,
            "d": self.params.d,
            "epsilon": self.params.epsilon.to_string(),
            "alpha_lo": self.alpha.lo(),
            "alpha_hi": self.alpha.hi(),
            "v_lo": self.v.lo(),
            "v_hi": self.v.hi(),
            "pi_lo": self.pi.lo(),
            "pi_hi": self.pi.hi(),
            "gamma_lo": self.gamma.lo(),
            "gamma_hi": self.gamma.hi(),
            "lambda_lo": self.lambda.lo(),
            "lambda_hi": self.lambda.hi(),
            "rho_lo": self.rho.lo(),
            "rho_hi": self.rho.hi(),
            "bound_lo": self.bound.lo(),
            "bound_hi": self.bound.hi(),
            "eta_admissible": self.eta_admissible,
            "gamma_below_one": self.gamma_below_one,
            "prelemma_verified": self.prelemma_verified,
            "admissible": self.admissible,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::estimate::{alpha3, alpha4};

    fn tuple(n: u32, m: u32, eta: &str, h: u32, d: u32) -> ParameterTuple {
        ParameterTuple {
            n,
            m,
            eta: EtaParam::Decimal(Decimal::parse(eta).unwrap()),
            h,
            d,
            epsilon: Decimal::parse("0.000001").unwrap(),
        }
    }

    #[test]
    fn eta_max_reference_values() {
        let a9 = alpha3(9).unwrap();
        let e = eta_max(3, 9, &a9.dv()).unwrap();
        assert!((e.lo() - 0.008204).abs() < 1e-5, "{e}");
        assert!(e.lo() > 0.0046, "0.0046 admissible");
        let a5 = alpha3(5).unwrap();
        let e = eta_max(3, 5, &a5.dv()).unwrap();
        assert!((e.lo() - 0.001643).abs() < 1e-6, "{e}");
        assert!(e.lo() > 0.0005);
    }

    #[test]
    fn eta_max_shrinks_with_alpha() {
        let small = eta_max(3, 9, &DirectedValue::from_int(100)).unwrap();
        let big = eta_max(3, 9, &DirectedValue::from_int(100_000)).unwrap();
        assert!(big.definitely_less(&small));
        assert!(big.hi() < 1e-5);
    }

    #[test]
    fn gamma_reference_n3_m9() {
        let parts = gamma_parts(&tuple(3, 9, "0.0046", 3, 4)).unwrap();
        assert!(parts.gamma.lo() > 0.9996 && parts.gamma.hi() < 0.9997, "{}", parts.gamma);
        // gamma < V + Pi (the coarse split)
        assert!(parts.gamma.definitely_less(&(parts.v + parts.pi)));
        assert!((parts.v.lo() - 0.9813067629).abs() < 1e-9);
        assert!((parts.pi.lo() - 0.09528762364).abs() < 1e-9);
    }

    #[test]
    fn gamma_reference_n4_m11() {
        let parts = gamma_parts(&tuple(4, 11, "0.00026", 4, 5)).unwrap();
        assert!(parts.gamma.lo() > 0.9995 && parts.gamma.hi() < 0.9996, "{}", parts.gamma);
    }

    #[test]
    fn gamma_collapses_when_h_too_big() {
        let parts = gamma_parts(&tuple(3, 9, "0.0046", 5, 4)).unwrap();
        assert_eq!(parts.gamma, DirectedValue::ONE);
        assert_eq!(parts.v, DirectedValue::ONE);
        assert_eq!(parts.pi, DirectedValue::ONE);
    }

    #[test]
    fn gamma_rejects_eta_out_of_range() {
        let mut p = tuple(3, 9, "0.0046", 3, 4);
        p.eta = EtaParam::Decimal(Decimal::parse("1.5").unwrap());
        assert!(gamma_parts(&p).is_err());
    }

    #[test]
    fn lambda_conventions() {
        assert_eq!(lambda(9, &DirectedValue::ONE), DirectedValue::ZERO);
        // log_m(1/m) = -1 so lambda = 1
        let inv_m = DirectedValue::from_ratio(1, 9).unwrap();
        let l = lambda(9, &inv_m);
        assert!(l.contains(1.0));
        // Table row: lambda(9, gamma(...)) ~ 1.616e-4
        let parts = gamma_parts(&tuple(3, 9, "0.0046", 3, 4)).unwrap();
        let l = lambda(9, &parts.gamma);
        assert!(l.lo() > 1.616e-4 && l.hi() < 1.617e-4, "{l}");
    }

    #[test]
    fn rho_reference_values() {
        let a = alpha3(9).unwrap();
        let eta = Decimal::parse("0.0046").unwrap().to_dv();
        let eps = Decimal::parse("0.000001").unwrap();
        let r = rho(3, 9, &a.dv(), &eta, 4, &eps).unwrap();
        assert!(r.lo() > 1.452e-15 && r.hi() < 1.453e-15, "{r}");

        let a = alpha4(11).unwrap();
        let eta = Decimal::parse("0.00026").unwrap().to_dv();
        let r = rho(4, 11, &a.dv(), &eta, 5, &eps).unwrap();
        assert!(r.lo() > 2.199e-26 && r.hi() < 2.2e-26, "{r}");
    }

    #[test]
    fn rho_zero_for_inadmissible_eta() {
        let a = alpha3(9).unwrap();
        let eta = Decimal::parse("0.9").unwrap().to_dv();
        let eps = Decimal::parse("0.000001").unwrap();
        let r = rho(3, 9, &a.dv(), &eta, 4, &eps).unwrap();
        assert_eq!(r, DirectedValue::ZERO);
    }

    #[test]
    fn prelemma_examples() {
        // Table row values pass
        let a = alpha3(9).unwrap().dv() * Decimal::parse("0.0046").unwrap().to_dv();
        let r = DirectedValue::point(1.452e-15);
        assert!(prelemma_check(3, 9, 4, &a, &r));
        // rho = 0 passes whenever a < 1
        let third = DirectedValue::from_ratio(1, 3).unwrap();
        assert!(prelemma_check(3, 9, 4, &third, &DirectedValue::ZERO));
        // far above the admissible range fails
        assert!(!prelemma_check(3, 9, 4, &third, &DirectedValue::point(0.1)));
    }

    #[test]
    fn certify_headline_n3() {
        let a = alpha3(9).unwrap();
        let cert = certify(&tuple(3, 9, "0.0046", 3, 4), &a.dv()).unwrap();
        assert!(cert.admissible);
        assert!(cert.prelemma_verified);
        assert!(cert.bound.lo() >= 1.452e-15, "{}", cert.bound);
        assert!(cert.bound.lo() <= 1.45272e-15 && cert.bound.hi() >= 1.45270e-15);
    }

    #[test]
    fn certify_headline_n4() {
        let a = alpha4(11).unwrap();
        let cert = certify(&tuple(4, 11, "0.00026", 4, 5), &a.dv()).unwrap();
        assert!(cert.admissible);
        assert!(cert.bound.lo() >= 2.199e-26, "{}", cert.bound);
    }

    #[test]
    fn certify_inadmissible_eta_reports_reason() {
        let a = alpha3(9).unwrap();
        let cert = certify(&tuple(3, 9, "0.9", 3, 4), &a.dv()).unwrap();
        assert!(!cert.admissible);
        assert_eq!(cert.failure_reason(), Some("eta inadmissible"));
        assert_eq!(cert.bound, DirectedValue::ZERO);
    }

    #[test]
    fn bound_is_harmonic_mean_like() {
        // lambda = rho gives bound = lambda / 2
        let lam = DirectedValue::point(0.25);
        let b = (lam * lam).div(lam + lam).unwrap();
        assert!(b.contains(0.125));
        assert!(b.rel_width() < 1e-14);
    }

    #[test]
    fn json_is_flat_and_deterministic() {
        let a = alpha3(9).unwrap();
        let cert = certify(&tuple(3, 9, "0.0046", 3, 4), &a.dv()).unwrap();
        let j1 = serde_json::to_string(&cert.to_json("0.1.0")).unwrap();
        let j2 = serde_json::to_string(&cert.to_json("0.1.0")).unwrap();
        assert_eq!(j1, j2);
        let v: serde_json::Value = serde_json::from_str(&j1).unwrap();
        assert!(v["bound_lo"].is_number());
        assert_eq!(v["eta"], "0.0046");
        assert!(v["admissible"].as_bool().unwrap());
    }
}
