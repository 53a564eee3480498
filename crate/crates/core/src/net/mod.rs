//! m-adic net content and the constant-1 mass construction on digital sets.
//!
//! A `DigitalSet` is a finite union of same-depth m-adic cubes inside the
//! unit cube: the computable stand-in for a compact set. Net content is
//! computed exactly by dynamic programming over the cube tree; the mass
//! construction rescales leaf masses bottom-up so that every cube constraint
//! `mu(Q) <= (side Q)^s` holds while the total mass stays at least the
//! s-content. All arithmetic is exact in the radical field generated by
//! m^(-s) (see [`radical`]).

pub mod radical;

use std::cmp::Ordering;
use std::collections::{BTreeMap, BTreeSet};

use num_integer::Integer;
use num_rational::Ratio;
use serde::{Deserialize, Serialize};
use serde_json::json;

use crate::error::{Error, Result};
use radical::{Elem, RadicalField};

/// One half-open m-adic cube: at depth k the unit cube splits into m^(kn)
/// cells of side m^(-k), addressed by integer coordinates.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub struct MadicCube {
    pub m: u32,
    pub depth: u32,
    pub coords: Vec<u32>,
}

impl MadicCube {
    pub fn new(m: u32, depth: u32, coords: Vec<u32>) -> Result<MadicCube> {
        if m < 2 {
            return Err(Error::Config(format!("grid arity {m} < 2")));
        }
        let extent = m
            .checked_pow(depth)
            .ok_or_else(|| Error::Config("m^depth overflows".into()))?;
        if coords.iter().any(|&c| c >= extent) {
            return Err(Error::Config(format!(
                "coordinates {coords:?} outside [0, {extent})"
            )));
        }
        Ok(MadicCube { m, depth, coords })
    }

    pub fn dimension(&self) -> u32 {
        self.coords.len() as u32
    }

    /// side = m^(-depth)
    pub fn side(&self) -> f64 {
        (self.m as f64).powi(-(self.depth as i32))
    }

    /// diam = sqrt(n) * side
    pub fn diam(&self) -> f64 {
        (self.dimension() as f64).sqrt() * self.side()
    }

    /// vol = side^n
    pub fn volume(&self) -> f64 {
        self.side().powi(self.dimension() as i32)
    }

    /// The unique cube one generation up.
    pub fn parent(&self) -> Option<MadicCube> {
        if self.depth == 0 {
            return None;
        }
        Some(MadicCube {
            m: self.m,
            depth: self.depth - 1,
            coords: self.coords.iter().map(|c| c / self.m).collect(),
        })
    }

    /// All m^n cubes one generation down.
    pub fn children(&self) -> Vec<MadicCube> {
        let n = self.coords.len();
        let m = self.m;
        let mut out = Vec::with_capacity((m as usize).pow(n as u32));
        let mut offsets = vec![0u32; n];
        loop {
            let coords: Vec<u32> = self
                .coords
                .iter()
                .zip(&offsets)
                .map(|(c, o)| c * m + o)
                .collect();
            out.push(MadicCube { m, depth: self.depth + 1, coords });
            let mut axis = n;
            loop {
                if axis == 0 {
                    return out;
                }
                axis -= 1;
                offsets[axis] += 1;
                if offsets[axis] < m {
                    break;
                }
                offsets[axis] = 0;
            }
        }
    }

    pub fn contains(&self, other: &MadicCube) -> bool {
        if other.depth < self.depth || self.m != other.m {
            return false;
        }
        let q = self.m.pow(other.depth - self.depth);
        self.coords.len() == other.coords.len()
            && other
                .coords
                .iter()
                .zip(&self.coords)
                .all(|(oc, sc)| oc / q == *sc)
    }
}

/// A finite set of occupied m-adic cubes at one depth inside the unit cube.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DigitalSet {
    pub n: u32,
    pub m: u32,
    pub depth: u32,
    pub cubes: BTreeSet<Vec<u32>>,
}

impl DigitalSet {
    pub fn new(n: u32, m: u32, depth: u32, cubes: BTreeSet<Vec<u32>>) -> Result<DigitalSet> {
        let set = DigitalSet { n, m, depth, cubes };
        set.validate()?;
        Ok(set)
    }

    pub fn validate(&self) -> Result<()> {
        if self.n < 1 {
            return Err(Error::Config("field 'n': dimension must be >= 1".into()));
        }
        if self.m < 2 {
            return Err(Error::Config("field 'm': grid arity must be >= 2".into()));
        }
        let Some(extent) = self.m.checked_pow(self.depth) else {
            return Err(Error::Config(format!(
                "field 'depth': m^depth overflows at m={}, depth={}",
                self.m, self.depth
            )));
        };
        for (i, c) in self.cubes.iter().enumerate() {
            if c.len() != self.n as usize {
                return Err(Error::Config(format!(
                    "field 'cubes[{i}]': expected {} coordinates, found {}",
                    self.n,
                    c.len()
                )));
            }
            if let Some(bad) = c.iter().find(|&&x| x >= extent) {
                return Err(Error::Config(format!(
                    "field 'cubes[{i}]': coordinate {bad} outside [0, {extent})"
                )));
            }
        }
        Ok(())
    }

    /// Parse the on-disk JSON form, reporting the line/column on syntax
    /// errors and the offending field on semantic ones.
    pub fn from_json_str(text: &str) -> Result<DigitalSet> {
        let set: DigitalSet = serde_json::from_str(text).map_err(|e| {
            Error::Parse(format!("line {}, column {}: {e}", e.line(), e.column()))
        })?;
        set.validate()?;
        Ok(set)
    }

    pub fn to_json(&self) -> serde_json::Value {
        json!({
            "n": self.n,
            "m": self.m,
            "depth": self.depth,
            "cubes": self.cubes.iter().collect::<Vec<_>>(),
        })
    }

    pub fn is_empty(&self) -> bool {
        self.cubes.is_empty()
    }

    /// The occupied cells as cube values.
    pub fn madic_cubes(&self) -> impl Iterator<Item = MadicCube> + '_ {
        self.cubes.iter().map(|c| MadicCube {
            m: self.m,
            depth: self.depth,
            coords: c.clone(),
        })
    }
}

/// Parse an exact exponent: "p/q" or a bare integer.
pub fn parse_ratio(text: &str) -> Result<Ratio<i64>> {
    let bad = || Error::Parse(format!("expected P/Q or an integer, got {text:?}"));
    let (p, q) = match text.split_once('/') {
        Some((p, q)) => (p, q),
        None => (text, "1"),
    };
    let p: i64 = p.trim().parse().map_err(|_| bad())?;
    let q: i64 = q.trim().parse().map_err(|_| bad())?;
    if q <= 0 {
        return Err(bad());
    }
    Ok(Ratio::new(p, q))
}

/// Ties the exponent s to the grid arity m: side^s values become integer
/// powers of a single radical, and this struct knows that radical.
#[derive(Clone, Copy, Debug)]
pub struct Scale {
    m: u32,
    s: Ratio<i64>,
    field: RadicalField,
    /// m^(-s) = u^(-unit_exp)
    unit_exp: u64,
}

fn perfect_power(m: u64) -> (u64, u32) {
    for g in (2..=m.ilog2()).rev() {
        let guess = (m as f64).powf(1.0 / g as f64).round() as u64;
        for b in guess.saturating_sub(1)..=guess + 1 {
            if b >= 2 && b.checked_pow(g) == Some(m) {
                return (b, g);
            }
        }
    }
    (m, 1)
}

impl Scale {
    pub fn new(m: u32, s: Ratio<i64>) -> Result<Scale> {
        if s <= Ratio::new(0, 1) {
            return Err(Error::Config(format!("s must be positive, got {s}")));
        }
        if *s.numer() > 1_000 || *s.denom() > 64 {
            return Err(Error::Config(format!("s = {s} out of supported range")));
        }
        let (b, g) = if m >= 4 { perfect_power(m as u64) } else { (m as u64, 1) };
        // m^(-p/q) = b^(-(g p)/q) = u^(-unit_exp), u = b^(1/index)
        let num = g as i64 * s.numer();
        let den = *s.denom();
        let gcd = num.gcd(&den);
        let unit_exp = (num / gcd) as u64;
        let index = (den / gcd) as u32;
        Ok(Scale { m, s, field: RadicalField::new(b, index), unit_exp })
    }

    pub fn field(&self) -> &RadicalField {
        &self.field
    }

    pub fn s(&self) -> Ratio<i64> {
        self.s
    }

    pub fn m(&self) -> u32 {
        self.m
    }

    /// (side of a depth-k cube)^s = m^(-k s), exactly.
    pub fn side_pow_s(&self, depth: u32) -> Elem {
        self.field.u_pow_neg(self.unit_exp * depth as u64)
    }
}

/// An exact value together with the field it lives in.
#[derive(Clone, Debug)]
pub struct ExactValue {
    field: RadicalField,
    elem: Elem,
}

impl ExactValue {
    pub fn new(field: RadicalField, elem: Elem) -> ExactValue {
        ExactValue { field, elem }
    }

    pub fn elem(&self) -> &Elem {
        &self.elem
    }

    pub fn field(&self) -> &RadicalField {
        &self.field
    }

    pub fn to_f64(&self) -> f64 {
        self.field.to_f64(&self.elem)
    }

    /// Comparison is defined only within one field.
    pub fn cmp(&self, other: &ExactValue) -> Option<Ordering> {
        (self.field == other.field).then(|| self.field.cmp(&self.elem, &other.elem))
    }
}

impl std::fmt::Display for ExactValue {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}", self.field.format(&self.elem))
    }
}

fn ancestor(coords: &[u32], m: u32, levels_up: u32) -> Vec<u32> {
    let q = m.pow(levels_up);
    coords.iter().map(|c| c / q).collect()
}

fn group_by_ancestor<'a, I>(
    keys: I,
    m: u32,
    levels_up: u32,
) -> BTreeMap<Vec<u32>, Vec<&'a Vec<u32>>>
where
    I: IntoIterator<Item = &'a Vec<u32>>,
{
    let mut groups: BTreeMap<Vec<u32>, Vec<&'a Vec<u32>>> = BTreeMap::new();
    for k in keys {
        groups.entry(ancestor(k, m, levels_up)).or_default().push(k);
    }
    groups
}

/// The restricted net content M^s_delta of the set, computed exactly by
/// dynamic programming over the cube tree. `delta_depth` is the shallowest
/// generation allowed in a cover (`delta = m^-delta_depth`); the unit cube
/// itself is available only when `delta_depth <= 0`.
pub fn net_content(set: &DigitalSet, s: Ratio<i64>, delta_depth: i32) -> Result<ExactValue> {
    set.validate()?;
    if s > Ratio::new(set.n as i64, 1) {
        return Err(Error::Config(format!("s = {s} exceeds dimension n = {}", set.n)));
    }
    if delta_depth > set.depth as i32 {
        return Err(Error::Resolution { requested: delta_depth, depth: set.depth });
    }
    let scale = Scale::new(set.m, s)?;
    let field = *scale.field();
    if set.is_empty() {
        return Ok(ExactValue::new(field, field.zero()));
    }
    let leaves: Vec<&Vec<u32>> = set.cubes.iter().collect();
    let value = dp_cost(&scale, set, 0, &leaves, delta_depth);
    Ok(ExactValue::new(field, value))
}

fn dp_cost(
    scale: &Scale,
    set: &DigitalSet,
    level: u32,
    leaves: &[&Vec<u32>],
    delta_depth: i32,
) -> Elem {
    let field = scale.field();
    if level == set.depth {
        debug_assert_eq!(leaves.len(), 1);
        return scale.side_pow_s(level);
    }
    let groups = group_by_ancestor(leaves.iter().copied(), set.m, set.depth - level - 1);
    let mut sum = field.zero();
    for (_, group) in groups {
        let child = dp_cost(scale, set, level + 1, &group, delta_depth);
        sum = field.add(&sum, &child);
    }
    if level as i32 >= delta_depth {
        let own = scale.side_pow_s(level);
        if field.cmp(&own, &sum) == Ordering::Less {
            return own;
        }
    }
    sum
}

/// A nonnegative mass per occupied depth-k cube, representing a measure
/// that is uniform inside each leaf cube.
#[derive(Clone, Debug)]
pub struct MassFunction {
    pub base: DigitalSet,
    pub mass: BTreeMap<Vec<u32>, Elem>,
    scale: Scale,
}

impl MassFunction {
    pub fn scale(&self) -> &Scale {
        &self.scale
    }

    pub fn s(&self) -> Ratio<i64> {
        self.scale.s()
    }

    pub fn total_mass(&self) -> ExactValue {
        let field = self.scale.field();
        let mut total = field.zero();
        for v in self.mass.values() {
            total = field.add(&total, v);
        }
        ExactValue::new(*field, total)
    }

    /// On-disk form: the base set's fields plus the exponent and the mass
    /// list. Masses are exact strings: plain rationals where possible,
    /// otherwise sums over the documented radical basis.
    pub fn to_json(&self) -> serde_json::Value {
        let field = self.scale.field();
        let mass: Vec<serde_json::Value> = self
            .mass
            .iter()
            .map(|(coords, elem)| {
                let mut row: Vec<serde_json::Value> =
                    coords.iter().map(|&c| json!(c)).collect();
                row.push(json!(field.format(elem)));
                serde_json::Value::Array(row)
            })
            .collect();
        let mut out = self.base.to_json();
        out["s"] = json!(self.scale.s().to_string());
        if field.index() > 1 {
            out["radical"] = json!({ "base": field.base(), "index": field.index() });
        }
        out["mass"] = serde_json::Value::Array(mass);
        out
    }
}

/// Bottom-up constant-1 mass construction: start every occupied leaf at
/// side^s and, walking the levels upward, rescale any overfull cube's
/// subtree so its total is exactly (side Q)^s. Terminates without a limit
/// step because the set is resolved at finite depth.
///
/// The lemma behind the construction assumes s > n - 1; smaller s is
/// accepted (the constraints still hold) and flagged by
/// [`FrostmanReport::within_hypothesis`].
pub fn frostman(set: &DigitalSet, s: Ratio<i64>) -> Result<MassFunction> {
    set.validate()?;
    if set.is_empty() {
        return Err(Error::EmptySet);
    }
    let scale = Scale::new(set.m, s)?;
    let field = *scale.field();
    let mut mass: BTreeMap<Vec<u32>, Elem> = set
        .cubes
        .iter()
        .map(|c| (c.clone(), scale.side_pow_s(set.depth)))
        .collect();
    for level in (0..set.depth).rev() {
        let cap = scale.side_pow_s(level);
        let keys: Vec<Vec<u32>> = mass.keys().cloned().collect();
        let groups = group_by_ancestor(keys.iter(), set.m, set.depth - level);
        for (_, group) in groups {
            let mut total = field.zero();
            for k in &group {
                total = field.add(&total, &mass[*k]);
            }
            if field.cmp(&total, &cap) == Ordering::Greater {
                let factor = field.div(&cap, &total)?;
                for k in group {
                    let e = mass.get_mut(k).expect("key from map");
                    *e = field.mul(e, &factor);
                }
            }
        }
    }
    Ok(MassFunction { base: set.clone(), mass, scale })
}

/// A single failed check in a mass-function verification.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ConstraintViolation {
    pub depth: u32,
    pub coords: Vec<u32>,
    pub kind: &'static str,
}

/// Outcome of checking every cube constraint and the total-vs-content
/// inequality. Tight cubes are where the mass meets (side Q)^s exactly:
/// the construction's stopping cubes.
#[derive(Clone, Debug)]
pub struct FrostmanReport {
    pub violations: Vec<ConstraintViolation>,
    pub tight_cubes: Vec<(u32, Vec<u32>)>,
    pub total_mass: ExactValue,
    pub content: ExactValue,
    pub total_ge_content: bool,
    pub within_hypothesis: bool,
}

impl FrostmanReport {
    pub fn passed(&self) -> bool {
        self.violations.is_empty() && self.total_ge_content
    }
}

/// Check all cube constraints at every depth, the support condition, and
/// the total-mass-vs-content inequality. Violations are report entries, not
/// errors.
pub fn verify_frostman(mu: &MassFunction) -> Result<FrostmanReport> {
    let scale = &mu.scale;
    let field = scale.field();
    let depth = mu.base.depth;
    let mut violations = Vec::new();
    let mut tight = Vec::new();
    for (coords, _) in mu.mass.iter().filter(|(c, _)| !mu.base.cubes.contains(*c)) {
        violations.push(ConstraintViolation {
            depth,
            coords: coords.clone(),
            kind: "mass outside support",
        });
    }
    for level in (0..=depth).rev() {
        let cap = scale.side_pow_s(level);
        let keys: Vec<Vec<u32>> = mu.mass.keys().cloned().collect();
        let groups = group_by_ancestor(keys.iter(), mu.base.m, depth - level);
        for (anc, group) in groups {
            let mut total = field.zero();
            for k in &group {
                total = field.add(&total, &mu.mass[*k]);
            }
            match field.cmp(&total, &cap) {
                Ordering::Greater => violations.push(ConstraintViolation {
                    depth: level,
                    coords: anc,
                    kind: "mass exceeds side^s",
                }),
                Ordering::Equal => tight.push((level, anc)),
                Ordering::Less => {}
            }
        }
    }
    let total_mass = mu.total_mass();
    let content = net_content(&mu.base, scale.s(), 0)?;
    let total_ge_content =
        field.cmp(total_mass.elem(), content.elem()) != Ordering::Less;
    let within_hypothesis = scale.s() > Ratio::new(mu.base.n as i64 - 1, 1);
    Ok(FrostmanReport {
        violations,
        tight_cubes: tight,
        total_mass,
        content,
        total_ge_content,
        within_hypothesis,
    })
}
