//! Verification reports and the tolerance registry.

use crate::error::{Result, SjError};
use crate::space::{GroupJson, PointJson};
use serde::{Deserialize, Serialize};

/// Per-family tolerances, read from `tolerances.json` at build time.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Tolerances {
    pub connection: f64,
    pub lemma_inverse: f64,
    pub explicit_connection: f64,
    pub metric_invariance: f64,
    pub covariance: f64,
    pub negative_control: f64,
    pub corpus_slash: f64,
    pub exact: f64,
    pub eisenstein: f64,
    pub holomorphy: f64,
    pub invariance: f64,
    pub lemmas: f64,
}

const REGISTRY: &str = include_str!("../../tolerances.json");

impl Tolerances {
    pub fn registry() -> Self {
        serde_json::from_str(REGISTRY).expect("tolerances.json is valid")
    }

    /// Registry with every entry replaced by `tol`, as the command line's `--tol`.
    pub fn uniform(tol: f64) -> Result<Self> {
        if !(tol >= 0.0) {
            return Err(SjError::Config(format!("tolerance must be nonnegative, got {tol}")));
        }
        let mut t = Self::registry();
        for v in [
            &mut t.connection,
            &mut t.lemma_inverse,
            &mut t.explicit_connection,
            &mut t.metric_invariance,
            &mut t.covariance,
            &mut t.corpus_slash,
            &mut t.eisenstein,
            &mut t.holomorphy,
            &mut t.invariance,
            &mut t.lemmas,
        ] {
            *v = tol;
        }
        Ok(t)
    }
}

/// The sample with the largest residual.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Offender {
    pub index: usize,
    pub point: PointJson,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub group: Option<GroupJson>,
}

/// Outcome of one claim.
///
/// For ordinary claims `pass` means `max_residual < tolerance` (or `== 0` when the
/// tolerance is exactly 0). Negative controls pass when `max_residual > tolerance`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct VerificationReport {
    pub claim: String,
    pub anchor: String,
    pub n: usize,
    pub m: usize,
    pub samples: usize,
    pub max_residual: f64,
    pub mean_residual: f64,
    pub tolerance: f64,
    pub pass: bool,
    pub seed: u64,
    pub elapsed_ms: u64,
    #[serde(skip_serializing_if = "std::ops::Not::not")]
    pub negative: bool,
    #[serde(skip_serializing_if = "is_zero")]
    pub resampled: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub worst: Option<Offender>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
}

fn is_zero(v: &usize) -> bool {
    *v == 0
}

/// One measured sample.
#[derive(Clone, Debug)]
pub struct Measured {
    pub index: usize,
    pub residual: f64,
    pub offender: Option<Offender>,
}

impl Measured {
    pub fn bare(index: usize, residual: f64) -> Self {
        Measured { index, residual, offender: None }
    }
}

/// Claim metadata shared by all checks.
#[derive(Clone, Debug)]
pub struct ClaimMeta {
    pub claim: String,
    pub anchor: String,
    pub n: usize,
    pub m: usize,
    pub seed: u64,
    pub tolerance: f64,
    pub negative: bool,
}

impl ClaimMeta {
    pub fn new(claim: impl Into<String>, anchor: &str, (n, m): (usize, usize), seed: u64, tolerance: f64) -> Self {
        ClaimMeta { claim: claim.into(), anchor: anchor.to_string(), n, m, seed, tolerance, negative: false }
    }

    pub fn negative(mut self) -> Self {
        self.negative = true;
        self
    }
}

fn passes(max: f64, tol: f64, negative: bool) -> bool {
    if !max.is_finite() {
        return false;
    }
    match (negative, tol == 0.0) {
        (true, _) => max > tol,
        (false, true) => max == 0.0,
        (false, false) => max < tol,
    }
}

/// Aggregate samples. An empty sample set fails.
pub fn aggregate(meta: ClaimMeta, measured: Vec<Measured>, resampled: usize) -> VerificationReport {
    let samples = measured.len();
    let mut max = f64::NEG_INFINITY;
    let mut sum = 0.0;
    let mut worst: Option<&Measured> = None;
    for s in &measured {
        sum += s.residual;
        if !max.is_nan() && (s.residual.is_nan() || s.residual > max) {
            max = s.residual;
            worst = Some(s);
        }
    }
    let mean = if samples > 0 { sum / samples as f64 } else { f64::NAN };
    VerificationReport {
        pass: samples > 0 && passes(max, meta.tolerance, meta.negative),
        claim: meta.claim,
        anchor: meta.anchor,
        n: meta.n,
        m: meta.m,
        samples,
        max_residual: if samples > 0 { max } else { f64::NAN },
        mean_residual: mean,
        tolerance: meta.tolerance,
        seed: meta.seed,
        elapsed_ms: 0,
        negative: meta.negative,
        resampled,
        worst: worst.and_then(|w| w.offender.clone()),
        note: None,
    }
}

/// JSON array of reports, pretty-printed.
pub fn reports_json(reports: &[VerificationReport]) -> String {
    let v: Vec<serde_json::Value> = reports
        .iter()
        .map(|r| {
            let mut v = serde_json::to_value(r).expect("report serializes");
            for key in ["max_residual", "mean_residual"] {
                if let Some(x) = v.get(key) {
                    if x.is_null() {
                        v[key] = serde_json::Value::String("NaN".into());
                    }
                }
            }
            v
        })
        .collect();
    serde_json::to_string_pretty(&v).expect("reports serialize")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn registry_parses() {
        let t = Tolerances::registry();
        assert_eq!(t.covariance, 1e-7);
        assert_eq!(t.exact, 0.0);
    }

    #[test]
    fn aggregation_is_order_independent() {
        let meta = || ClaimMeta::new("c", "a", (1, 1), 0, 1e-3);
        let a = aggregate(meta(), vec![Measured::bare(0, 1e-5), Measured::bare(1, 2e-4)], 0);
        let b = aggregate(meta(), vec![Measured::bare(1, 2e-4), Measured::bare(0, 1e-5)], 0);
        assert_eq!(a.max_residual, b.max_residual);
        assert!((a.mean_residual - b.mean_residual).abs() < 1e-20);
        assert!(a.pass);
    }

    #[test]
    fn negative_controls_invert_the_test() {
        let m = ClaimMeta::new("c", "a", (1, 1), 0, 1e-2).negative();
        assert!(aggregate(m.clone(), vec![Measured::bare(0, 0.5)], 0).pass);
        assert!(!aggregate(m, vec![Measured::bare(0, 1e-3)], 0).pass);
    }

    #[test]
    fn nan_fails() {
        let m = ClaimMeta::new("c", "a", (1, 1), 0, 1.0);
        assert!(!aggregate(m, vec![Measured::bare(0, 0.1), Measured::bare(1, f64::NAN)], 0).pass);
    }
}
