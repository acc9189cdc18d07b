//! Bang-bang weights `m = κ` on a finite union of intervals `E`, `-1` elsewhere.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Slack used when comparing a weight mean against the `-m0` bound.
pub const ADMISSIBILITY_SLACK: f64 = 1e-12;

/// An open interval `(a, b)` with `a < b`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "[f64; 2]", into = "[f64; 2]")]
pub struct IntervalDomain {
    a: f64,
    b: f64,
}

impl IntervalDomain {
    pub fn new(a: f64, b: f64) -> Result<Self> {
        if !(a.is_finite() && b.is_finite()) || a >= b {
            return Err(Error::InvalidDomain(format!("need finite a < b, got ({a}, {b})")));
        }
        Ok(IntervalDomain { a, b })
    }

    pub fn a(&self) -> f64 {
        self.a
    }

    pub fn b(&self) -> f64 {
        self.b
    }

    pub fn length(&self) -> f64 {
        self.b - self.a
    }

    pub fn midpoint(&self) -> f64 {
        0.5 * (self.a + self.b)
    }

    /// Closed containment of another interval, with absolute slack `tol`.
    pub fn contains_interval(&self, other: &IntervalDomain, tol: f64) -> bool {
        other.a >= self.a - tol && other.b <= self.b + tol
    }

    pub fn translated(&self, offset: f64) -> Result<Self> {
        IntervalDomain::new(self.a + offset, self.b + offset)
    }
}

impl TryFrom<[f64; 2]> for IntervalDomain {
    type Error = Error;

    fn try_from(v: [f64; 2]) -> Result<Self> {
        IntervalDomain::new(v[0], v[1])
    }
}

impl From<IntervalDomain> for [f64; 2] {
    fn from(d: IntervalDomain) -> Self {
        [d.a, d.b]
    }
}

/// A constant-weight stretch of the domain, produced by [`BangBangWeight::pieces`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Piece {
    pub start: f64,
    pub end: f64,
    pub value: f64,
}

impl Piece {
    pub fn length(&self) -> f64 {
        self.end - self.start
    }
}

/// `m = κ χ_E − χ_{Ω∖E}` with `E` a sorted union of disjoint open intervals.
///
/// At a segment endpoint `evaluate` returns the right-limit value (the left
/// limit at the right end of the domain). This only matters pointwise.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawWeight", into = "RawWeight")]
pub struct BangBangWeight {
    domain: IntervalDomain,
    kappa: f64,
    segments: Vec<IntervalDomain>,
}

#[derive(Serialize, Deserialize)]
struct RawWeight {
    domain: IntervalDomain,
    kappa: f64,
    segments: Vec<IntervalDomain>,
}

impl TryFrom<RawWeight> for BangBangWeight {
    type Error = Error;

    fn try_from(raw: RawWeight) -> Result<Self> {
        BangBangWeight::new(raw.domain, raw.kappa, raw.segments)
    }
}

impl From<BangBangWeight> for RawWeight {
    fn from(w: BangBangWeight) -> Self {
        RawWeight { domain: w.domain, kappa: w.kappa, segments: w.segments }
    }
}

impl BangBangWeight {
    /// Validates the segment list. Segments may touch but not overlap, and
    /// must be sorted by left endpoint. A set `E` of measure `0` or `|Ω|`
    /// gives a weight that does not change sign.
    pub fn new(domain: IntervalDomain, kappa: f64, segments: Vec<IntervalDomain>) -> Result<Self> {
        if !(kappa.is_finite() && kappa > 0.0) {
            return Err(Error::InvalidWeight(format!("kappa must be positive, got {kappa}")));
        }
        for s in &segments {
            if !domain.contains_interval(s, 0.0) {
                return Err(Error::InvalidWeight(format!(
                    "segment ({}, {}) not inside domain ({}, {})",
                    s.a, s.b, domain.a, domain.b
                )));
            }
        }
        for pair in segments.windows(2) {
            if pair[1].a < pair[0].b {
                return Err(Error::InvalidWeight(
                    "segments must be sorted and pairwise disjoint".to_string(),
                ));
            }
        }
        let total: f64 = segments.iter().map(IntervalDomain::length).sum();
        if total <= 0.0 || total >= domain.length() {
            return Err(Error::NoSignChange);
        }
        Ok(BangBangWeight { domain, kappa, segments })
    }

    /// Weight with a single favourable interval `E = (start, end)`.
    pub fn single(domain: IntervalDomain, kappa: f64, start: f64, end: f64) -> Result<Self> {
        BangBangWeight::new(domain, kappa, vec![IntervalDomain::new(start, end)?])
    }

    pub fn domain(&self) -> IntervalDomain {
        self.domain
    }

    pub fn kappa(&self) -> f64 {
        self.kappa
    }

    pub fn segments(&self) -> &[IntervalDomain] {
        &self.segments
    }

    /// `|E|`.
    pub fn total_length(&self) -> f64 {
        self.segments.iter().map(IntervalDomain::length).sum()
    }

    pub fn evaluate(&self, x: f64) -> f64 {
        let inside = self.segments.iter().any(|s| {
            (s.a <= x && x < s.b) || (x == self.domain.b && s.b == self.domain.b)
        });
        if inside {
            self.kappa
        } else {
            -1.0
        }
    }

    /// Constant-weight pieces covering the domain from left to right.
    /// Zero-length pieces are dropped.
    pub fn pieces(&self) -> Vec<Piece> {
        let mut out = Vec::with_capacity(2 * self.segments.len() + 1);
        let mut cursor = self.domain.a;
        for s in &self.segments {
            if s.a > cursor {
                out.push(Piece { start: cursor, end: s.a, value: -1.0 });
            }
            out.push(Piece { start: s.a, end: s.b, value: self.kappa });
            cursor = s.b;
        }
        if self.domain.b > cursor {
            out.push(Piece { start: cursor, end: self.domain.b, value: -1.0 });
        }
        out
    }

    /// Shift domain and segments together.
    pub fn translated(&self, offset: f64) -> Result<Self> {
        let segments =
            self.segments.iter().map(|s| s.translated(offset)).collect::<Result<Vec<_>>>()?;
        BangBangWeight::new(self.domain.translated(offset)?, self.kappa, segments)
    }

    /// Mirror image under `x ↦ a + b − x`.
    pub fn reflected(&self) -> Result<Self> {
        let (a, b) = (self.domain.a, self.domain.b);
        let mut segments = self
            .segments
            .iter()
            .map(|s| IntervalDomain::new(a + b - s.b, a + b - s.a))
            .collect::<Result<Vec<_>>>()?;
        segments.reverse();
        BangBangWeight::new(self.domain, self.kappa, segments)
    }

    /// Same domain and κ, different favourable set.
    pub fn with_segments(&self, segments: Vec<IntervalDomain>) -> Result<Self> {
        BangBangWeight::new(self.domain, self.kappa, segments)
    }
}

/// `m0`, `κ`, `β` describing the admissible class of weights.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AdmissibilityParams {
    pub m0: f64,
    pub kappa: f64,
    pub beta: f64,
}

impl AdmissibilityParams {
    /// Requires `m0 ∈ (−κ, 1)` for `β > 0` and `m0 ∈ (0, 1)` for `β = 0`.
    pub fn new(m0: f64, kappa: f64, beta: f64) -> Result<Self> {
        if !(kappa.is_finite() && kappa > 0.0) {
            return Err(Error::InvalidParams(format!("kappa must be positive, got {kappa}")));
        }
        if !(beta.is_finite() && beta >= 0.0) {
            return Err(Error::InvalidParams(format!("beta must be >= 0, got {beta}")));
        }
        let lower = if beta > 0.0 { -kappa } else { 0.0 };
        if !(m0 > lower && m0 < 1.0) {
            return Err(Error::InvalidParams(format!(
                "m0 = {m0} outside ({lower}, 1) for beta = {beta}"
            )));
        }
        Ok(AdmissibilityParams { m0, kappa, beta })
    }

    /// Saturating volume fraction `c = (1 − m0)/(1 + κ)`.
    pub fn c(&self) -> f64 {
        (1.0 - self.m0) / (1.0 + self.kappa)
    }
}

/// `(1/|Ω|) ∫_Ω m`.
pub fn weight_mean(w: &BangBangWeight) -> f64 {
    let len = w.domain.length();
    let e = w.total_length();
    (w.kappa * e - (len - e)) / len
}

/// Outcome of [`check_admissible`].
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Admissibility {
    pub admissible: bool,
    pub mean: f64,
    /// `true` when the mean sits on the `-m0` bound (within slack).
    pub constraint_active: bool,
    pub violations: Vec<String>,
}

pub fn check_admissible(w: &BangBangWeight, p: &AdmissibilityParams) -> Admissibility {
    let mean = weight_mean(w);
    let mut violations = Vec::new();
    if mean > -p.m0 + ADMISSIBILITY_SLACK {
        violations.push(format!("mean weight {mean} exceeds -m0 = {}", -p.m0));
    }
    if w.total_length() <= 0.0 {
        violations.push("favourable set E has zero measure".to_string());
    }
    if (w.kappa - p.kappa).abs() > ADMISSIBILITY_SLACK * p.kappa.max(1.0) {
        violations.push(format!("weight kappa {} differs from class kappa {}", w.kappa, p.kappa));
    }
    Admissibility {
        admissible: violations.is_empty(),
        mean,
        constraint_active: (mean + p.m0).abs() <= ADMISSIBILITY_SLACK,
        violations,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn unit() -> IntervalDomain {
        IntervalDomain::new(0.0, 1.0).unwrap()
    }

    #[test]
    fn mean_examples() {
        let w = BangBangWeight::single(unit(), 1.0, 0.0, 0.25).unwrap();
        assert_eq!(weight_mean(&w), -0.5);
        let w = BangBangWeight::single(unit(), 1.0, 0.0, 0.5).unwrap();
        assert_eq!(weight_mean(&w), 0.0);
        let d = IntervalDomain::new(0.0, 2.0).unwrap();
        let w = BangBangWeight::single(d, 3.0, 0.5, 1.0).unwrap();
        assert_eq!(weight_mean(&w), 0.0);
    }

    #[test]
    fn admissibility_examples() {
        let p = AdmissibilityParams::new(0.5, 1.0, 0.0).unwrap();
        let w = BangBangWeight::single(unit(), 1.0, 0.0, 0.25).unwrap();
        let r = check_admissible(&w, &p);
        assert!(r.admissible && r.constraint_active);

        let w = BangBangWeight::single(unit(), 1.0, 0.0, 0.3).unwrap();
        let r = check_admissible(&w, &p);
        assert!(!r.admissible);
        assert_eq!(r.violations.len(), 1);

        let p = AdmissibilityParams::new(0.2, 2.0, 1.0).unwrap();
        let w = BangBangWeight::single(unit(), 2.0, 0.0, p.c()).unwrap();
        let r = check_admissible(&w, &p);
        assert!(r.admissible && r.constraint_active);
    }

    #[test]
    fn evaluate_uses_right_limits() {
        let w = BangBangWeight::new(
            unit(),
            2.0,
            vec![IntervalDomain::new(0.2, 0.4).unwrap(), IntervalDomain::new(0.6, 1.0).unwrap()],
        )
        .unwrap();
        assert_eq!(w.evaluate(0.2), 2.0);
        assert_eq!(w.evaluate(0.4), -1.0);
        assert_eq!(w.evaluate(0.1), -1.0);
        assert_eq!(w.evaluate(1.0), 2.0);
        let pieces = w.pieces();
        assert_eq!(pieces.len(), 4);
        assert_eq!(pieces[3].value, 2.0);
        assert!((pieces.iter().map(Piece::length).sum::<f64>() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn rejects_bad_inputs() {
        assert!(IntervalDomain::new(1.0, 1.0).is_err());
        assert!(BangBangWeight::single(unit(), 0.0, 0.1, 0.2).is_err());
        assert!(BangBangWeight::single(unit(), 1.0, 0.5, 1.5).is_err());
        assert_eq!(BangBangWeight::single(unit(), 1.0, 0.0, 1.0), Err(Error::NoSignChange));
        let overlapping =
            vec![IntervalDomain::new(0.1, 0.5).unwrap(), IntervalDomain::new(0.4, 0.6).unwrap()];
        assert!(BangBangWeight::new(unit(), 1.0, overlapping).is_err());
        assert!(AdmissibilityParams::new(0.0, 1.0, 0.0).is_err());
        assert!(AdmissibilityParams::new(-0.5, 1.0, 1.0).is_ok());
        assert!(AdmissibilityParams::new(-1.5, 1.0, 1.0).is_err());
    }

    #[test]
    fn json_shape() {
        let w = BangBangWeight::single(unit(), 1.5, 0.25, 0.5).unwrap();
        let s = serde_json::to_string(&w).unwrap();
        assert_eq!(s, r#"{"domain":[0.0,1.0],"kappa":1.5,"segments":[[0.25,0.5]]}"#);
        let back: BangBangWeight = serde_json::from_str(&s).unwrap();
        assert_eq!(back, w);
        let bad = r#"{"domain":[0.0,1.0],"kappa":1.5,"segments":[[0.5,0.25]]}"#;
        assert!(serde_json::from_str::<BangBangWeight>(bad).is_err());
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        proptest! {
            #[test]
            fn saturating_set_hits_the_bound(m0 in 0.01f64..0.99, kappa in 0.1f64..10.0,
                                             shift in 0.0f64..1.0) {
                let p = AdmissibilityParams::new(m0, kappa, 0.0).unwrap();
                let c = p.c();
                let s = shift * (1.0 - c);
                let w = BangBangWeight::single(unit(), kappa, s, s + c).unwrap();
                prop_assert!((weight_mean(&w) + m0).abs() < 1e-12);
                prop_assert!(check_admissible(&w, &p).admissible);
            }

            #[test]
            fn two_valued(x in 0.0f64..1.0, s in 0.0f64..0.5, len in 0.01f64..0.5) {
                let w = BangBangWeight::single(unit(), 3.0, s, s + len).unwrap();
                let v = w.evaluate(x);
                prop_assert!(v == 3.0 || v == -1.0);
            }

            #[test]
            fn admissibility_translation_invariant(s in 0.0f64..0.6, off in -0.3f64..0.3) {
                let p = AdmissibilityParams::new(0.4, 1.0, 1.0).unwrap();
                let w = BangBangWeight::single(unit(), 1.0, s, s + 0.3).unwrap();
                let t = w.translated(off).unwrap();
                prop_assert_eq!(check_admissible(&w, &p).admissible,
                                check_admissible(&t, &p).admissible);
            }
        }
    }
}
