//! Exact checks of the exponent algebra: partition of the target square
//! into region and complement, and reconstruction of targets from the
//! connecting curve.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::exponent::{
    connecting_q, connecting_q_f64, coverage, gamma_curve, gamma_curve_f64, rat, to_f64, CurveLemma, DomainKind,
    ExtReal, GridSpec, Rational, SobolevIndex,
};

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PartitionSummary {
    pub source: String,
    pub domain: DomainKind,
    pub cells: usize,
    pub region: usize,
    pub complement: usize,
    /// Cells covered by both or by neither, as (s~, 1/p~) strings.
    pub violations: Vec<(String, String)>,
}

/// Covers an n x n rational grid over (s~, 1/p~) in [0,1]^2 and records the
/// cells not covered by exactly one of region and complement.
pub fn partition_check(source: &SobolevIndex, domain: DomainKind, n: u32) -> Result<PartitionSummary> {
    if n < 2 {
        return Err(Error::Precondition("partition grid needs at least 2 points per axis".into()));
    }
    let grid = GridSpec::unit(n, n);
    let rows: Vec<(usize, usize, Vec<(String, String)>)> = (0..n)
        .into_par_iter()
        .map(|j| {
            let inv_p = grid.inv_p_at(j);
            let pt = ExtReal::Finite(inv_p.clone()).recip();
            let mut region = 0;
            let mut complement = 0;
            let mut bad = Vec::new();
            for i in 0..n {
                let st = grid.s_at(i);
                let target = SobolevIndex::new(source.dim, st.clone(), pt.clone())?;
                let c = coverage(source, &target, domain)?;
                region += c.in_region as usize;
                complement += c.in_complement as usize;
                if c.in_region == c.in_complement {
                    bad.push((st.to_string(), inv_p.to_string()));
                }
            }
            Ok((region, complement, bad))
        })
        .collect::<Result<_>>()?;
    let mut out = PartitionSummary {
        source: format!("N={} s={} p={}", source.dim, source.s, source.p),
        domain,
        cells: (n * n) as usize,
        region: 0,
        complement: 0,
        violations: Vec::new(),
    };
    for (r, c, bad) in rows {
        out.region += r;
        out.complement += c;
        out.violations.extend(bad);
    }
    Ok(out)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CurveRoundTrip {
    pub source: String,
    pub lemma: CurveLemma,
    pub samples: usize,
    /// Samples where the rational round trip is not exact.
    pub exact_failures: usize,
    /// Largest float error over s~, 1/p~ and p~/p~ - 1.
    pub float_max_error: f64,
    /// Samples landing on the q = inf limiting branch.
    pub limiting: usize,
}

/// Draws `count` random admissible targets (rational coordinates with
/// denominators up to 997) and reconstructs each from (q, t~).
pub fn curve_round_trip(source: &SobolevIndex, lemma: CurveLemma, count: usize, seed: u64) -> Result<CurveRoundTrip> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = CurveRoundTrip {
        source: format!("N={} s={} p={}", source.dim, source.s, source.p),
        lemma,
        samples: 0,
        exact_failures: 0,
        float_max_error: 0.0,
        limiting: 0,
    };
    let s_hi = to_f64(&source.s);
    let mut attempts = 0usize;
    while out.samples < count {
        attempts += 1;
        if attempts > 1000 * count.max(1) {
            return Err(Error::Precondition(format!("could not draw admissible targets for {lemma:?}")));
        }
        let den: i64 = rng.gen_range(2..=997);
        let st = rat(rng.gen_range(0..=den), den) * &source.s;
        let pden: i64 = rng.gen_range(2..=997);
        let inv_p = rat(rng.gen_range(0..=pden), pden);
        let pt = ExtReal::Finite(inv_p).recip();
        let target = SobolevIndex::new(source.dim, st.clone(), pt.clone())?;
        let Ok(curve) = connecting_q(source, &target, lemma) else { continue };
        out.samples += 1;
        out.limiting += curve.limiting as usize;
        let end = SobolevIndex::new(source.dim, Rational::from_integer(0.into()), curve.q.clone())?;
        let back = gamma_curve(source, &end, &curve.theta_tilde)?;
        if back.s != st || back.p != pt {
            out.exact_failures += 1;
        }
        let (s, p) = (s_hi, source.p_f64());
        let (stf, ptf) = (to_f64(&st), pt.to_f64());
        let (q, theta) = connecting_q_f64(s, p, stf, ptf);
        let (s_back, p_back) = gamma_curve_f64(s, p, 0.0, q, theta);
        let mut err = (s_back - stf).abs().max((1.0 / p_back - 1.0 / ptf).abs());
        if ptf.is_finite() {
            err = err.max((p_back / ptf - 1.0).abs());
        }
        out.float_max_error = out.float_max_error.max(err);
    }
    Ok(out)
}
