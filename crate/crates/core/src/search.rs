//! Automated parameter search and table reproduction.
//!
//! The optimizer follows the hand-search procedure: minimize the annulus
//! density d first, then walk the decimal eta grid downward re-optimizing h
//! at every step, and return the certificate with the best certified bound.
//! `reproduce_table` re-derives every reference row and diffs the printed
//! digits; `large_n_preset` evaluates the closed-form parameter choice
//! (m = n, h = 1, d = 2n-3) for arbitrary dimension.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::ToPrimitive;
use rayon::prelude::*;

use crate::bound::{certify, eta_max, gamma_parts, BoundCertificate, EtaParam, ParameterTuple};
use crate::error::{Error, Result};
use crate::estimate::{alpha3, alpha4, alpha_general, CeiledAlpha, EstimateConfig, GeneralAlpha};
use crate::rigor::{Decimal, DirectedValue};

/// What to search and at which resolution.
#[derive(Clone, Debug)]
pub struct SearchSpec {
    pub n: u32,
    pub m_list: Vec<u32>,
    pub d_max: u32,
    pub eta_decimals: u32,
    pub h_policy: HPolicy,
    pub alpha_source: AlphaSource,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum HPolicy {
    ScanAll,
    Fixed(Vec<u32>),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum AlphaSource {
    Corollary3,
    Corollary4,
    General,
}

/// An alpha for the search: the rounded closed form (n = 3, 4) or the raw
/// general enclosure.
#[derive(Clone, Copy, Debug)]
pub enum AlphaValue {
    Ceiled(CeiledAlpha),
    General(GeneralAlpha),
}

impl AlphaValue {
    pub fn dv(&self) -> DirectedValue {
        match self {
            AlphaValue::Ceiled(a) => a.dv(),
            AlphaValue::General(g) => g.value,
        }
    }

    pub fn display(&self) -> String {
        match self {
            AlphaValue::Ceiled(a) => a.display_sig6(),
            AlphaValue::General(g) => format!("{:e}", g.value.hi()),
        }
    }
}

impl SearchSpec {
    /// The reference resolution for a dimension: 4 eta decimals for n = 3,
    /// 5 for n = 4.
    pub fn reference(n: u32) -> Result<SearchSpec> {
        match n {
            3 => Ok(SearchSpec {
                n,
                m_list: (5..=14).collect(),
                d_max: 12,
                eta_decimals: 4,
                h_policy: HPolicy::ScanAll,
                alpha_source: AlphaSource::Corollary3,
            }),
            4 => Ok(SearchSpec {
                n,
                m_list: (7..=16).collect(),
                d_max: 12,
                eta_decimals: 5,
                h_policy: HPolicy::ScanAll,
                alpha_source: AlphaSource::Corollary4,
            }),
            _ => Err(Error::Config(format!("no reference search spec for n = {n}"))),
        }
    }

    pub fn alpha_for(&self, m: u32) -> Result<AlphaValue> {
        match self.alpha_source {
            AlphaSource::Corollary3 => Ok(AlphaValue::Ceiled(alpha3(m)?)),
            AlphaSource::Corollary4 => Ok(AlphaValue::Ceiled(alpha4(m)?)),
            AlphaSource::General => {
                // valid on [n - eps, n] with the default eps = 1e-6
                let s = DirectedValue::from_int(self.n as i64)
                    - DirectedValue::from_ratio(1, 1_000_000)?;
                let cfg = EstimateConfig::new(self.n, m, s)?;
                Ok(AlphaValue::General(alpha_general(&cfg)?))
            }
        }
    }
}

/// One emitted table row: the parameters together with their certificate.
#[derive(Clone, Debug)]
pub struct TableRow {
    pub n: u32,
    pub m: u32,
    pub eta: Decimal,
    pub h: u32,
    pub d: u32,
    pub alpha: AlphaValue,
    pub cert: BoundCertificate,
}

impl TableRow {
    /// Fixed column order `n,m,eta,h,d,alpha,gamma,lambda,rho,bound`.
    /// Headline digits come from the sound endpoints: gamma from above,
    /// lambda/rho/bound from below.
    pub fn csv_line(&self) -> String {
        format!(
            "{},{},{},{},{},{},{},{:e},{:e},{:e}",
            self.n,
            self.m,
            self.eta,
            self.h,
            self.d,
            self.alpha.display(),
            self.cert.gamma.hi(),
            self.cert.lambda.lo(),
            self.cert.rho.lo(),
            self.cert.bound.lo(),
        )
    }

    pub fn to_json(&self, version: &str) -> serde_json::Value {
        let mut v = self.cert.to_json(version);
        v["alpha"] = serde_json::Value::String(self.alpha.display());
        v
    }
}

pub const CSV_HEADER: &str = "n,m,eta,h,d,alpha,gamma,lambda,rho,bound";

pub fn table_csv(rows: &[TableRow]) -> String {
    let mut out = String::from(CSV_HEADER);
    for r in rows {
        out.push('\n');
        out.push_str(&r.csv_line());
    }
    out.push('\n');
    out
}

/// Reference rows: hand-optimized parameter choices and the digits they are
/// known to produce. `lambda`/`rho` are truncated 4-significant-digit
/// prefixes with a decimal exponent; `gamma_prefix` is a truncated 4-decimal
/// prefix.
#[derive(Clone, Copy, Debug)]
pub struct ReferenceRow {
    pub n: u32,
    pub m: u32,
    pub eta: &'static str,
    pub h: u32,
    pub d: u32,
    pub alpha: &'static str,
    pub gamma_prefix: &'static str,
    pub lambda: (i64, i32),
    pub rho: (i64, i32),
}

pub const REFERENCE_ROWS: [ReferenceRow; 20] = [
    ReferenceRow { n: 3, m: 5, eta: "0.0005", h: 2, d: 7, alpha: "303.102", gamma_prefix: "0.9976", lambda: (1488, -3), rho: (8020, -18) },
    ReferenceRow { n: 3, m: 6, eta: "0.0008", h: 2, d: 6, alpha: "277.560", gamma_prefix: "0.9947", lambda: (2911, -3), rho: (1801, -17) },
    ReferenceRow { n: 3, m: 7, eta: "0.0019", h: 3, d: 5, alpha: "83.8178", gamma_prefix: "0.9998", lambda: (7481, -5), rho: (2418, -16) },
    ReferenceRow { n: 3, m: 8, eta: "0.0011", h: 3, d: 5, alpha: "81.9976", gamma_prefix: "0.9965", lambda: (1678, -3), rho: (2215, -17) },
    ReferenceRow { n: 3, m: 9, eta: "0.0046", h: 3, d: 4, alpha: "60.8979", gamma_prefix: "0.9996", lambda: (1616, -4), rho: (1452, -15) },
    ReferenceRow { n: 3, m: 10, eta: "0.0031", h: 4, d: 4, alpha: "61.4480", gamma_prefix: "0.9992", lambda: (3385, -4), rho: (3210, -16) },
    ReferenceRow { n: 3, m: 11, eta: "0.0022", h: 4, d: 4, alpha: "54.2657", gamma_prefix: "0.9984", lambda: (6516, -4), rho: (8031, -17) },
    // The m = 12 source row lists lambda as 2.254e-4, which contradicts its
    // own gamma prefix: gamma in [0.9993, 0.9994) forces lambda into
    // (2.415e-4, 2.818e-4]. The digits are transposed; 2.548e-4 is the value
    // the row's parameters produce.
    ReferenceRow { n: 3, m: 12, eta: "0.0016", h: 5, d: 4, alpha: "55.5835", gamma_prefix: "0.9993", lambda: (2548, -4), rho: (2174, -17) },
    ReferenceRow { n: 3, m: 13, eta: "0.0012", h: 5, d: 4, alpha: "52.5339", gamma_prefix: "0.9982", lambda: (6978, -4), rho: (6521, -18) },
    ReferenceRow { n: 3, m: 14, eta: "0.0009", h: 5, d: 4, alpha: "54.1918", gamma_prefix: "0.9988", lambda: (4385, -4), rho: (2117, -18) },
    ReferenceRow { n: 4, m: 7, eta: "0.00006", h: 3, d: 7, alpha: "2409.54", gamma_prefix: "0.9998", lambda: (7291, -5), rho: (3637, -28) },
    ReferenceRow { n: 4, m: 8, eta: "0.00016", h: 3, d: 6, alpha: "2425.26", gamma_prefix: "0.9999", lambda: (2780, -5), rho: (1390, -26) },
    ReferenceRow { n: 4, m: 9, eta: "0.00009", h: 3, d: 6, alpha: "1813.48", gamma_prefix: "0.9978", lambda: (9801, -4), rho: (6651, -28) },
    ReferenceRow { n: 4, m: 10, eta: "0.00005", h: 4, d: 6, alpha: "1834.77", gamma_prefix: "0.9994", lambda: (2361, -4), rho: (3605, -29) },
    ReferenceRow { n: 4, m: 11, eta: "0.00026", h: 4, d: 5, alpha: "1660.53", gamma_prefix: "0.9995", lambda: (2062, -4), rho: (2199, -26) },
    ReferenceRow { n: 4, m: 12, eta: "0.00017", h: 5, d: 5, alpha: "1685.89", gamma_prefix: "0.9999", lambda: (2779, -5), rho: (3301, -27) },
    ReferenceRow { n: 4, m: 13, eta: "0.00012", h: 5, d: 5, alpha: "1619.82", gamma_prefix: "0.9995", lambda: (1932, -4), rho: (5289, -28) },
    ReferenceRow { n: 4, m: 14, eta: "0.00009", h: 5, d: 5, alpha: "1649.02", gamma_prefix: "0.9981", lambda: (6908, -4), rho: (9177, -29) },
    ReferenceRow { n: 4, m: 15, eta: "0.00006", h: 6, d: 5, alpha: "1626.75", gamma_prefix: "0.9997", lambda: (8531, -5), rho: (1809, -29) },
    ReferenceRow { n: 4, m: 16, eta: "0.00005", h: 6, d: 5, alpha: "1659.76", gamma_prefix: "0.9985", lambda: (5340, -4), rho: (3816, -30) },
];

pub fn reference_row(n: u32, m: u32) -> Option<&'static ReferenceRow> {
    REFERENCE_ROWS.iter().find(|r| r.n == n && r.m == m)
}

fn rational_of(x: f64) -> Option<BigRational> {
    BigRational::from_float(x)
}

/// floor(x * 10^decimals) as an exact integer.
fn floor_scaled(x: f64, decimals: u32) -> Option<BigInt> {
    let r = rational_of(x)?;
    let p = BigRational::from_integer(BigInt::from(10).pow(decimals));
    Some((r * p).floor().to_integer())
}

/// Exact truncation of a positive value to 4 significant decimal digits:
/// returns (mantissa in 1000..=9999, exponent e) with the value in
/// [mant * 10^(e-3), (mant+1) * 10^(e-3)), i.e. `1.452e-15` is (1452, -15).
#[cfg(test)]
fn trunc_sig4(x: f64) -> Option<(i64, i32)> {
    if !(x.is_finite() && x > 0.0) {
        return None;
    }
    let r = rational_of(x)?;
    let mut e = x.log10().floor() as i32;
    let pow = |k: i32| -> BigRational {
        let p = BigInt::from(10).pow(k.unsigned_abs());
        if k >= 0 {
            BigRational::from_integer(p)
        } else {
            BigRational::new(BigInt::from(1), p)
        }
    };
    while r >= pow(e + 1) {
        e += 1;
    }
    while r < pow(e) {
        e -= 1;
    }
    let mant = (r * pow(3 - e)).floor().to_integer().to_i64()?;
    Some((mant, e))
}

/// True when the enclosure provably lies in the display window of the
/// 4-significant-digit reference value: `[mant - 1/2, mant + 1) * 10^(e-3)`.
/// The window is the union of the truncation and round-to-nearest
/// preimages, since reference digits printed from machine floats follow no
/// single convention when the exact value grazes a boundary.
fn matches_sig4(v: &DirectedValue, expect: (i64, i32)) -> bool {
    let (mant, e) = expect;
    let pow = |k: i32| -> BigRational {
        let p = BigInt::from(10).pow(k.unsigned_abs());
        if k >= 0 {
            BigRational::from_integer(p)
        } else {
            BigRational::new(BigInt::from(1), p)
        }
    };
    let unit = pow(e - 3);
    let lo_edge = BigRational::new(BigInt::from(2 * mant - 1), BigInt::from(2)) * &unit;
    let hi_edge = BigRational::from_integer(BigInt::from(mant + 1)) * &unit;
    let (Some(lo), Some(hi)) = (rational_of(v.lo()), rational_of(v.hi())) else {
        return false;
    };
    lo >= lo_edge && hi < hi_edge
}

/// True when both endpoints truncate to the same 4-decimal prefix string
/// (e.g. "0.9996").
fn matches_prefix4(v: &DirectedValue, expect: &str) -> bool {
    let want: Option<BigInt> = {
        let t = expect.trim_start_matches("0.");
        t.parse::<i64>().ok().map(BigInt::from)
    };
    let (Some(want), Some(a), Some(b)) =
        (want, floor_scaled(v.lo(), 4), floor_scaled(v.hi(), 4))
    else {
        return false;
    };
    a == want && b == want
}

/// Recompute every requested reference row and diff the printed digits.
/// Any mismatch aborts with a per-field diff.
pub fn reproduce_table(spec: &SearchSpec) -> Result<Vec<TableRow>> {
    let mut rows = Vec::new();
    let mut diffs = Vec::new();
    for &m in &spec.m_list {
        let reference = reference_row(spec.n, m).ok_or_else(|| {
            Error::Config(format!("no reference row for n = {}, m = {m}", spec.n))
        })?;
        let alpha = spec.alpha_for(m)?;
        let eta = Decimal::parse(reference.eta)?;
        let params = ParameterTuple {
            n: spec.n,
            m,
            eta: EtaParam::Decimal(eta),
            h: reference.h,
            d: reference.d,
            epsilon: Decimal::parse("0.000001")?,
        };
        let cert = certify(&params, &alpha.dv())?;
        let got_alpha = alpha.display();
        if got_alpha != reference.alpha {
            diffs.push(format!(
                "n={} m={m} alpha: expected {}, got {}",
                spec.n, reference.alpha, got_alpha
            ));
        }
        if !matches_prefix4(&cert.gamma, reference.gamma_prefix) {
            diffs.push(format!(
                "n={} m={m} gamma: expected prefix {}, got {}",
                spec.n, reference.gamma_prefix, cert.gamma
            ));
        }
        if !matches_sig4(&cert.lambda, reference.lambda) {
            diffs.push(format!(
                "n={} m={m} lambda: expected {}e{}, got {}",
                spec.n, reference.lambda.0, reference.lambda.1, cert.lambda
            ));
        }
        if !matches_sig4(&cert.rho, reference.rho) {
            diffs.push(format!(
                "n={} m={m} rho: expected {}e{}, got {}",
                spec.n, reference.rho.0, reference.rho.1, cert.rho
            ));
        }
        if !cert.admissible {
            diffs.push(format!(
                "n={} m={m} expected admissible, got {:?}",
                spec.n,
                cert.failure_reason()
            ));
        }
        rows.push(TableRow {
            n: spec.n,
            m,
            eta,
            h: reference.h,
            d: reference.d,
            alpha,
            cert,
        });
    }
    // The highlighted row must carry the best bound whenever it is present.
    let highlight = match spec.n {
        3 => 9,
        4 => 11,
        _ => 0,
    };
    if rows.iter().any(|r| r.m == highlight) {
        let best = rows
            .iter()
            .max_by(|a, b| {
                a.cert
                    .bound
                    .lo()
                    .partial_cmp(&b.cert.bound.lo())
                    .expect("bounds are finite")
            })
            .expect("nonempty");
        if best.m != highlight {
            diffs.push(format!(
                "n={}: best bound at m={}, expected m={highlight}",
                spec.n, best.m
            ));
        }
    }
    if diffs.is_empty() {
        Ok(rows)
    } else {
        Err(Error::TableMismatch(diffs))
    }
}

fn h_max(m: u32) -> u32 {
    (m - 1) / 2
}

fn h_candidates(m: u32, policy: &HPolicy) -> Vec<u32> {
    match policy {
        HPolicy::ScanAll => (1..=h_max(m)).collect(),
        HPolicy::Fixed(list) => list.clone(),
    }
}

/// Smallest d >= 1 for which some h keeps gamma certifiably below 1 at the
/// largest admissible eta; None when d_max is exhausted.
pub fn min_feasible_d(n: u32, m: u32, alpha: &DirectedValue, d_max: u32) -> Result<Option<u32>> {
    let em = eta_max(n, m, alpha)?;
    if em.lo() <= 0.0 {
        return Ok(None);
    }
    let eta = EtaParam::Enclosure {
        value: DirectedValue::point(em.lo()),
        label: "eta_max".into(),
    };
    for d in 1..=d_max {
        for h in 1..=h_max(m) {
            let p = ParameterTuple {
                n,
                m,
                eta: eta.clone(),
                h,
                d,
                epsilon: Decimal::parse("0.000001")?,
            };
            if gamma_parts(&p)?.gamma.hi() < 1.0 {
                return Ok(Some(d));
            }
        }
    }
    Ok(None)
}

/// The optimizer's pick: the grid eta, the h chosen for it, and the full
/// certificate.
#[derive(Clone, Debug)]
pub struct SearchHit {
    pub eta: Decimal,
    pub h: u32,
    pub cert: BoundCertificate,
}

struct UnitEval {
    units: i64,
    feasible: bool,
    hit: Option<(u32, BoundCertificate)>,
}

fn evaluate_unit(
    n: u32,
    m: u32,
    alpha: &DirectedValue,
    d: u32,
    decimals: u32,
    units: i64,
    hs: &[u32],
    epsilon: &Decimal,
) -> Result<UnitEval> {
    let eta = Decimal::new(units, decimals)?;
    let mut ranked: Vec<(u32, BoundCertificate)> = Vec::with_capacity(hs.len());
    for &h in hs {
        let p = ParameterTuple {
            n,
            m,
            eta: EtaParam::Decimal(eta),
            h,
            d,
            epsilon: *epsilon,
        };
        ranked.push((h, certify(&p, alpha)?));
    }
    // choose h minimizing gamma; ties by larger bound, then smaller h
    ranked.sort_by(|(ha, ca), (hb, cb)| {
        ca.gamma
            .hi()
            .partial_cmp(&cb.gamma.hi())
            .expect("finite")
            .then(cb.bound.lo().partial_cmp(&ca.bound.lo()).expect("finite"))
            .then(ha.cmp(hb))
    });
    let top = ranked.into_iter().next();
    let feasible = top.as_ref().is_some_and(|(_, c)| c.gamma.hi() < 1.0);
    Ok(UnitEval { units, feasible, hit: if feasible { top } else { None } })
}

/// Coordinate descent on the decimal eta grid: starting from the largest
/// admissible grid value, re-optimize h and step eta down while some h keeps
/// gamma below 1. Monotonicity of gamma in eta makes the first infeasible
/// step a sound stopping point. Returns the best certificate encountered,
/// after a final exhaustive h-scan at the winning eta.
pub fn optimize_eta_h(
    n: u32,
    m: u32,
    alpha: &DirectedValue,
    d: u32,
    decimals: u32,
    policy: &HPolicy,
) -> Result<Option<SearchHit>> {
    let em = eta_max(n, m, alpha)?;
    let units0 = floor_scaled(em.lo(), decimals)
        .and_then(|b| b.to_i64())
        .ok_or(Error::Domain("eta_max not finite"))?;
    if units0 < 1 {
        return Ok(None);
    }
    let hs = h_candidates(m, policy);
    if hs.is_empty() {
        return Ok(None);
    }
    let epsilon = Decimal::parse("0.000001")?;
    // Pure parallel map over the grid; the merge below is order-independent.
    let evals: Vec<UnitEval> = (1..=units0)
        .rev()
        .collect::<Vec<_>>()
        .par_iter()
        .map(|&u| evaluate_unit(n, m, alpha, d, decimals, u, &hs, &epsilon))
        .collect::<Result<Vec<_>>>()?;
    // Walk the descent path: the contiguous feasible run from units0 down.
    let mut best: Option<SearchHit> = None;
    for ev in &evals {
        if !ev.feasible {
            break;
        }
        let (h, cert) = ev.hit.clone().expect("feasible");
        let eta = Decimal::new(ev.units, decimals)?;
        let better = match &best {
            None => true,
            Some(b) => {
                let (cur, new) = (b.cert.bound.lo(), cert.bound.lo());
                new > cur || (new == cur && ev.units < b.eta.units())
            }
        };
        if better {
            best = Some(SearchHit { eta, h, cert });
        }
    }
    // Final exhaustive h-scan at the winning eta, ranked by bound.
    if let Some(hit) = &best {
        let mut ranked: Vec<(u32, BoundCertificate)> = Vec::new();
        for &h in &hs {
            let p = ParameterTuple {
                n,
                m,
                eta: EtaParam::Decimal(hit.eta),
                h,
                d,
                epsilon,
            };
            ranked.push((h, certify(&p, alpha)?));
        }
        ranked.sort_by(|(ha, ca), (hb, cb)| {
            cb.bound
                .lo()
                .partial_cmp(&ca.bound.lo())
                .expect("finite")
                .then(ha.cmp(hb))
        });
        if let Some((h, cert)) = ranked.into_iter().next() {
            if cert.bound.lo() > hit.cert.bound.lo() {
                best = Some(SearchHit { eta: hit.eta, h, cert });
            }
        }
    }
    Ok(best)
}

/// Full automated search for one (n, m): minimal d, then the eta/h descent.
pub fn search_best(spec: &SearchSpec, m: u32) -> Result<Option<SearchHit>> {
    let alpha = spec.alpha_for(m)?;
    let Some(d) = min_feasible_d(spec.n, m, &alpha.dv(), spec.d_max)? else {
        return Ok(None);
    };
    optimize_eta_h(spec.n, m, &alpha.dv(), d, spec.eta_decimals, &spec.h_policy)
}

/// Outcome of the closed-form large-n parameter choice.
#[derive(Clone, Debug)]
pub enum PresetOutcome {
    /// m = n fails the structural validity of the estimate at this n.
    InvalidConfig { n: u32, reason: String },
    Evaluated {
        n: u32,
        alpha: GeneralAlpha,
        cert: BoundCertificate,
        /// Whether the certified bound provably reaches
        /// 0.6 n^{-2n(n-1)} / ln n; None when the comparison is undecided
        /// or the tuple is inadmissible.
        rate_claim: Option<bool>,
    },
}

impl PresetOutcome {
    pub fn admissible(&self) -> bool {
        matches!(self, PresetOutcome::Evaluated { cert, .. } if cert.admissible)
    }

    pub fn failure_reason(&self) -> Option<String> {
        match self {
            PresetOutcome::InvalidConfig { reason, .. } => Some(reason.clone()),
            PresetOutcome::Evaluated { cert, .. } => {
                cert.failure_reason().map(|s| s.to_string())
            }
        }
    }
}

/// Evaluate the preset m = n, h = 1, d = 2n - 3,
/// eta = (n sqrt(2 pi e))^-(n-2), with alpha from the general estimate at
/// s = n - 1/2 and epsilon = 1/2.
pub fn large_n_preset(n: u32) -> Result<PresetOutcome> {
    let s = DirectedValue::from_int(n as i64) - DirectedValue::from_ratio(1, 2)?;
    let cfg = match EstimateConfig::new(n, n, s) {
        Ok(cfg) => cfg,
        Err(Error::Config(reason)) => {
            return Ok(PresetOutcome::InvalidConfig { n, reason });
        }
        Err(e) => return Err(e),
    };
    let alpha = alpha_general(&cfg)?;
    // eta = (n sqrt(2 pi e))^{-(n-2)}
    let e = DirectedValue::ONE.exp();
    let root = (DirectedValue::from_int(2) * DirectedValue::pi() * e).sqrt()?;
    let eta_dv = (DirectedValue::from_int(n as i64) * root).powi(-(n as i32 - 2))?;
    let params = ParameterTuple {
        n,
        m: n,
        eta: EtaParam::Enclosure {
            value: eta_dv,
            label: format!("(n*sqrt(2*pi*e))^-({})", n - 2),
        },
        h: 1,
        d: 2 * n - 3,
        epsilon: Decimal::parse("0.5")?,
    };
    let cert = certify(&params, &alpha.value)?;
    let rate_claim = if cert.admissible {
        let rate = DirectedValue::from_ratio(3, 5)?
            * DirectedValue::from_int(n as i64)
                .powi(-(2 * n as i32 * (n as i32 - 1)))?
                .div(DirectedValue::from_int(n as i64).ln()?)?;
        if cert.bound.definitely_ge(&rate) {
            Some(true)
        } else if cert.bound.definitely_less(&rate) {
            Some(false)
        } else {
            None
        }
    } else {
        None
    };
    Ok(PresetOutcome::Evaluated { n, alpha, cert, rate_claim })
}

/// First n in the range for which the preset is fully admissible.
pub fn find_preset_threshold(n_from: u32, n_to: u32) -> Result<Option<u32>> {
    for n in n_from..=n_to {
        if large_n_preset(n)?.admissible() {
            return Ok(Some(n));
        }
    }
    Ok(None)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn min_feasible_d_reference_values() {
        let a = alpha3(9).unwrap();
        assert_eq!(min_feasible_d(3, 9, &a.dv(), 12).unwrap(), Some(4));
        let a = alpha4(11).unwrap();
        assert_eq!(min_feasible_d(4, 11, &a.dv(), 12).unwrap(), Some(5));
        let a = alpha3(5).unwrap();
        assert_eq!(min_feasible_d(3, 5, &a.dv(), 12).unwrap(), Some(7));
    }

    #[test]
    fn optimizer_lands_on_reference_row_m9() {
        let a = alpha3(9).unwrap();
        let hit = optimize_eta_h(3, 9, &a.dv(), 4, 4, &HPolicy::ScanAll)
            .unwrap()
            .unwrap();
        assert_eq!(hit.eta.to_string(), "0.0046");
        assert_eq!(hit.h, 3);
        assert!(hit.cert.bound.lo() >= 1.452e-15);
    }

    #[test]
    fn optimizer_lands_on_reference_row_m11_n4() {
        let a = alpha4(11).unwrap();
        let hit = optimize_eta_h(4, 11, &a.dv(), 5, 5, &HPolicy::ScanAll)
            .unwrap()
            .unwrap();
        assert_eq!(hit.eta.to_string(), "0.00026");
        assert_eq!(hit.h, 4);
        assert!(hit.cert.bound.lo() >= 2.199e-26);
    }

    #[test]
    fn optimizer_lands_on_reference_row_m12() {
        let a = alpha3(12).unwrap();
        let hit = optimize_eta_h(3, 12, &a.dv(), 4, 4, &HPolicy::ScanAll)
            .unwrap()
            .unwrap();
        assert_eq!(hit.eta.to_string(), "0.0016");
        assert_eq!(hit.h, 5);
    }

    #[test]
    fn reproduce_table_n3_passes() {
        let rows = reproduce_table(&SearchSpec::reference(3).unwrap()).unwrap();
        assert_eq!(rows.len(), 10);
        let best = rows
            .iter()
            .max_by(|a, b| a.cert.bound.lo().partial_cmp(&b.cert.bound.lo()).unwrap())
            .unwrap();
        assert_eq!(best.m, 9);
    }

    #[test]
    fn reproduce_table_n4_passes() {
        let rows = reproduce_table(&SearchSpec::reference(4).unwrap()).unwrap();
        assert_eq!(rows.len(), 10);
        let best = rows
            .iter()
            .max_by(|a, b| a.cert.bound.lo().partial_cmp(&b.cert.bound.lo()).unwrap())
            .unwrap();
        assert_eq!(best.m, 11);
    }

    #[test]
    fn reproduce_table_subset_row() {
        let mut spec = SearchSpec::reference(3).unwrap();
        spec.m_list = vec![13];
        let rows = reproduce_table(&spec).unwrap();
        assert!(matches_sig4(&rows[0].cert.lambda, (6978, -4)));
        assert!(matches_sig4(&rows[0].cert.rho, (6521, -18)));
    }

    #[test]
    fn csv_shape() {
        let mut spec = SearchSpec::reference(3).unwrap();
        spec.m_list = vec![9];
        let rows = reproduce_table(&spec).unwrap();
        let csv = table_csv(&rows);
        let mut lines = csv.lines();
        assert_eq!(lines.next().unwrap(), CSV_HEADER);
        let row = lines.next().unwrap();
        assert!(row.starts_with("3,9,0.0046,3,4,60.8979,0.9996"), "{row}");
    }

    #[test]
    fn search_is_deterministic_across_pool_sizes() {
        let a = alpha3(9).unwrap();
        let run = || {
            optimize_eta_h(3, 9, &a.dv(), 4, 4, &HPolicy::ScanAll)
                .unwrap()
                .unwrap()
        };
        let base = run();
        for threads in [1usize, 3] {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(threads)
                .build()
                .unwrap();
            let hit = pool.install(run);
            assert_eq!(hit.eta, base.eta);
            assert_eq!(hit.h, base.h);
            assert_eq!(hit.cert.bound.lo(), base.cert.bound.lo());
        }
    }

    #[test]
    fn preset_v_term_near_limit_at_50() {
        match large_n_preset(50).unwrap() {
            PresetOutcome::Evaluated { cert, .. } => {
                assert!((cert.v.lo() - 0.9298).abs() < 0.01);
                assert!((cert.v.hi() - 0.9298).abs() < 0.01);
            }
            other => panic!("expected evaluation, got {other:?}"),
        }
    }

    #[test]
    fn preset_invalid_below_seven() {
        assert!(matches!(
            large_n_preset(6).unwrap(),
            PresetOutcome::InvalidConfig { .. }
        ));
    }

    #[test]
    fn preset_small_n_fails_gamma() {
        match large_n_preset(7).unwrap() {
            PresetOutcome::Evaluated { cert, .. } => {
                assert!(!cert.admissible);
                assert!(!cert.gamma_below_one);
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn preset_threshold_found_by_scan() {
        let n0 = find_preset_threshold(7, 12).unwrap().unwrap();
        assert_eq!(n0, 11);
        match large_n_preset(n0).unwrap() {
            PresetOutcome::Evaluated { cert, .. } => {
                assert!(cert.admissible);
                assert!(cert.bound.lo() > 0.0);
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn emitted_rows_recertify_bit_for_bit() {
        for n in [3u32, 4] {
            let rows = reproduce_table(&SearchSpec::reference(n).unwrap()).unwrap();
            for row in rows {
                let p = ParameterTuple {
                    n: row.n,
                    m: row.m,
                    eta: EtaParam::Decimal(row.eta),
                    h: row.h,
                    d: row.d,
                    epsilon: Decimal::parse("0.000001").unwrap(),
                };
                let cert2 = certify(&p, &row.alpha.dv()).unwrap();
                let rebuilt = TableRow { cert: cert2, ..row.clone() };
                assert_eq!(row.csv_line(), rebuilt.csv_line());
                assert_eq!(
                    serde_json::to_string(&row.to_json("v")).unwrap(),
                    serde_json::to_string(&rebuilt.to_json("v")).unwrap()
                );
            }
        }
    }

    #[test]
    fn general_alpha_source_searches() {
        let spec = SearchSpec {
            n: 5,
            m_list: vec![9],
            d_max: 10,
            eta_decimals: 9,
            h_policy: HPolicy::ScanAll,
            alpha_source: AlphaSource::General,
        };
        let hit = search_best(&spec, 9).unwrap().unwrap();
        assert!(hit.cert.admissible);
        assert!(hit.cert.bound.lo() > 0.0);
    }

    #[test]
    fn trunc_sig4_basics() {
        assert_eq!(trunc_sig4(1.45271e-15).unwrap(), (1452, -15));
        assert_eq!(trunc_sig4(0.0014884).unwrap(), (1488, -3));
        assert_eq!(trunc_sig4(9999.9).unwrap(), (9999, 3));
        assert_eq!(trunc_sig4(1.0).unwrap(), (1000, 0));
    }
}
