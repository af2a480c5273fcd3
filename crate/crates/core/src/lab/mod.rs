//! Numerical experiments built on the classifier and the norm engine:
//! scaling identities, counterexample rates, embedding constants,
//! interpolation ratios, the s -> 0 / s -> 1 limits, and exact checks of the
//! exponent algebra.

mod batch;
mod checks;
mod constants;
mod counterexample;
mod interp;
mod scaling;

pub use batch::{acceptance_batch, partition_report, round_trip_report, ROUND_TRIP_FLOAT_TOL};
pub use checks::{curve_round_trip, partition_check, CurveRoundTrip, PartitionSummary};
pub use constants::{bmo_chain, estimate_embedding_constant, STRESS_BAND};
pub use counterexample::{counterexample_run, lemma_parameters, predicted_slope};
pub use interp::{bbm_limit_sweep, verify_interpolation};
pub use scaling::{verify_bounded_scaling_bounds, verify_scaling_identity};

use serde::Serialize;
use serde_json::Value;

use crate::error::{Error, Result};
use crate::exponent::DomainKind;
use crate::norms::ConcreteDomain;
use crate::report::{ser_f64, ser_f64_opt, ser_f64_vec};

/// Every pass/fail threshold used by the experiments.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Tolerances {
    /// Relative quadrature tolerance for each norm evaluation.
    pub quadrature: f64,
    /// Relative deviation allowed in the scaling identity and the bounded
    /// sandwich.
    pub scaling: f64,
    /// Relative slope error allowed in counterexample fits.
    pub slope: f64,
    /// Relative deviation allowed at the s -> 0 and s -> 1 endpoints.
    pub bbm: f64,
    /// Largest |slope| counted as "no power-law trend".
    pub stress_slope: f64,
    /// Deviation of the interpolation ratio from 1 at theta in {0, 1}.
    pub endpoint: f64,
    /// Largest relative lower-order correction allowed at the largest fitted
    /// epsilon of a counterexample run.
    pub preasymptotic: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances {
            quadrature: 1e-6,
            scaling: 1e-3,
            slope: 0.05,
            bbm: 0.05,
            stress_slope: 0.05,
            endpoint: 1e-6,
            preasymptotic: 1e-3,
        }
    }
}

/// The default schedule 2^{-k}, k = 0..6.
pub fn default_epsilons() -> Vec<f64> {
    (0..=6).map(|k| 0.5f64.powi(k)).collect()
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum ExperimentKind {
    ScalingIdentity,
    BoundedScaling,
    Counterexample,
    EmbeddingConstant,
    BmoChain,
    Interpolation,
    BbmLimit,
    Partition,
    CurveRoundTrip,
}

impl ExperimentKind {
    pub fn as_str(self) -> &'static str {
        match self {
            ExperimentKind::ScalingIdentity => "scaling-identity",
            ExperimentKind::BoundedScaling => "bounded-scaling",
            ExperimentKind::Counterexample => "counterexample",
            ExperimentKind::EmbeddingConstant => "embedding-constant",
            ExperimentKind::BmoChain => "bmo-chain",
            ExperimentKind::Interpolation => "interpolation",
            ExperimentKind::BbmLimit => "bbm-limit",
            ExperimentKind::Partition => "partition",
            ExperimentKind::CurveRoundTrip => "curve-round-trip",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ExperimentReport {
    pub kind: ExperimentKind,
    /// Short identifier, unique within a batch.
    pub name: String,
    pub inputs: Value,
    /// What the schedule varies: "epsilon", "theta", "s", "function", ...
    pub parameter: String,
    #[serde(serialize_with = "ser_f64_vec")]
    pub schedule: Vec<f64>,
    #[serde(serialize_with = "ser_f64_vec")]
    pub measured: Vec<f64>,
    #[serde(serialize_with = "ser_f64_vec")]
    pub predicted: Vec<f64>,
    #[serde(skip_serializing_if = "Option::is_none", serialize_with = "ser_f64_opt")]
    pub fitted_exponent: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none", serialize_with = "ser_f64_opt")]
    pub predicted_exponent: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none", serialize_with = "ser_f64_opt")]
    pub fit_residual: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none", serialize_with = "ser_f64_opt")]
    pub constant: Option<f64>,
    /// The statistic compared against `threshold` to decide `pass`.
    #[serde(serialize_with = "ser_f64")]
    pub deviation: f64,
    #[serde(serialize_with = "ser_f64")]
    pub threshold: f64,
    pub pass: bool,
    pub notes: Vec<String>,
}

impl ExperimentReport {
    pub(crate) fn new(kind: ExperimentKind, name: impl Into<String>, inputs: Value, parameter: &str) -> Self {
        ExperimentReport {
            kind,
            name: name.into(),
            inputs,
            parameter: parameter.into(),
            schedule: Vec::new(),
            measured: Vec::new(),
            predicted: Vec::new(),
            fitted_exponent: None,
            predicted_exponent: None,
            fit_residual: None,
            constant: None,
            deviation: 0.0,
            threshold: 0.0,
            pass: false,
            notes: Vec::new(),
        }
    }

    /// One-line summary used by the CLI and the acceptance log.
    pub fn summary(&self) -> String {
        format!(
            "{} {}: {} (deviation {:.3e}, threshold {:.3e})",
            self.kind.as_str(),
            self.name,
            if self.pass { "pass" } else { "FAIL" },
            self.deviation,
            self.threshold
        )
    }
}

/// Ordinary least squares fit of y = a + b x; returns (b, a, rms residual).
pub fn fit_line(x: &[f64], y: &[f64]) -> Result<(f64, f64, f64)> {
    if x.len() != y.len() || x.len() < 2 {
        return Err(Error::Precondition(format!("a line fit needs at least two points, got {}", x.len())));
    }
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let sxx: f64 = x.iter().map(|v| (v - mx).powi(2)).sum();
    if sxx == 0.0 {
        return Err(Error::Precondition("line fit with a single abscissa".into()));
    }
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
    let b = sxy / sxx;
    let a = my - b * mx;
    let rss: f64 = x.iter().zip(y).map(|(u, v)| (v - a - b * u).powi(2)).sum();
    Ok((b, a, (rss / n).sqrt()))
}

/// Slope of log r against log eps, dropping the largest eps when asked.
pub fn fit_loglog(eps: &[f64], r: &[f64], drop_largest: bool) -> Result<(f64, f64)> {
    let mut pairs: Vec<(f64, f64)> = eps.iter().copied().zip(r.iter().copied()).collect();
    pairs.sort_by(|a, b| b.0.total_cmp(&a.0));
    if drop_largest && pairs.len() > 2 {
        pairs.remove(0);
    }
    if pairs.iter().any(|&(e, v)| !(e > 0.0) || !(v > 0.0)) {
        return Err(Error::Precondition("log-log fit needs positive values".into()));
    }
    let x: Vec<f64> = pairs.iter().map(|p| p.0.ln()).collect();
    let y: Vec<f64> = pairs.iter().map(|p| p.1.ln()).collect();
    let (b, _, res) = fit_line(&x, &y)?;
    Ok((b, res))
}

/// The concrete domain used for a domain kind: R^N, or [-1, 1]^N.
pub fn reference_domain(kind: DomainKind, dim: u32) -> Result<ConcreteDomain> {
    match kind {
        DomainKind::WholeSpace => Ok(ConcreteDomain::whole(dim)),
        DomainKind::BoundedLipschitz => ConcreteDomain::boxed(dim, [-1.0, -1.0], [1.0, 1.0]),
    }
}

fn check_schedule(eps: &[f64]) -> Result<()> {
    if eps.is_empty() {
        return Err(Error::Precondition("empty epsilon schedule".into()));
    }
    if let Some(e) = eps.iter().find(|e| !(**e > 0.0 && **e <= 1.0)) {
        return Err(Error::Precondition(format!("epsilon must lie in (0,1], got {e}")));
    }
    Ok(())
}

/// Sorts a schedule in decreasing order and removes duplicates.
pub(crate) fn sorted_schedule(eps: &[f64]) -> Result<Vec<f64>> {
    check_schedule(eps)?;
    let mut v = eps.to_vec();
    v.sort_by(|a, b| b.total_cmp(a));
    v.dedup();
    Ok(v)
}

pub(crate) fn rel_dev(measured: f64, predicted: f64) -> f64 {
    if predicted == 0.0 {
        measured.abs()
    } else {
        ((measured - predicted) / predicted).abs()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn line_fit_exact() {
        let x = [0.0, 1.0, 2.0, 3.0];
        let y: Vec<f64> = x.iter().map(|v| 2.0 - 0.5 * v).collect();
        let (b, a, r) = fit_line(&x, &y).unwrap();
        assert!((b + 0.5).abs() < 1e-14 && (a - 2.0).abs() < 1e-14 && r < 1e-14);
    }

    #[test]
    fn loglog_drops_largest() {
        let eps = default_epsilons();
        let mut r: Vec<f64> = eps.iter().map(|e| e.powf(-1.0 / 3.0)).collect();
        r[0] = 100.0;
        let (b, res) = fit_loglog(&eps, &r, true).unwrap();
        assert!((b + 1.0 / 3.0).abs() < 1e-12 && res < 1e-12);
    }
}
