//! The acceptance batch behind `soblab report`.

use rayon::prelude::*;
use serde_json::json;

use super::{
    bbm_limit_sweep, bmo_chain, counterexample_run, curve_round_trip, estimate_embedding_constant,
    lemma_parameters, partition_check, reference_domain, verify_bounded_scaling_bounds, verify_interpolation,
    verify_scaling_identity, ExperimentKind, ExperimentReport,
};
use crate::config::CliConfig;
use crate::corpus::{builtin, by_label, make_bump};
use crate::error::Result;
use crate::exponent::{CurveLemma, DomainKind, SobolevIndex, Tag};
use crate::norms::{BallFamily, ConcreteDomain};

/// Largest float error accepted in the curve round trip.
pub const ROUND_TRIP_FLOAT_TOL: f64 = 1e-12;

type Job<'a> = (ExperimentKind, String, Box<dyn Fn() -> Result<ExperimentReport> + Send + Sync + 'a>);

fn idx(n: u32, sp: &str) -> Result<SobolevIndex> {
    SobolevIndex::parse(n, sp)
}

fn domain_name(d: DomainKind) -> &'static str {
    match d {
        DomainKind::WholeSpace => "rn",
        DomainKind::BoundedLipschitz => "bounded",
    }
}

/// Partition of the target square as an experiment report.
pub fn partition_report(source: &SobolevIndex, domain: DomainKind, n: u32) -> Result<ExperimentReport> {
    let r = partition_check(source, domain, n)?;
    let mut rep = ExperimentReport::new(
        ExperimentKind::Partition,
        format!("N{}-({},{})-{}", source.dim, source.s, source.p, domain_name(domain)),
        json!({"dim": source.dim, "source": format!("({},{})", source.s, source.p), "domain": domain_name(domain), "grid": n}),
        "count",
    );
    rep.measured = vec![r.region as f64, r.complement as f64, r.violations.len() as f64];
    rep.deviation = r.violations.len() as f64;
    rep.threshold = 0.0;
    rep.pass = r.violations.is_empty() && r.region + r.complement == r.cells;
    rep.notes.push("measured holds [region cells, complement cells, violations]".into());
    for (s, inv_p) in r.violations.iter().take(20) {
        rep.notes.push(format!("violation at s~ = {s}, 1/p~ = {inv_p}"));
    }
    Ok(rep)
}

/// Curve round trip as an experiment report.
pub fn round_trip_report(source: &SobolevIndex, lemma: CurveLemma, count: usize, seed: u64) -> Result<ExperimentReport> {
    let r = curve_round_trip(source, lemma, count, seed)?;
    let mut rep = ExperimentReport::new(
        ExperimentKind::CurveRoundTrip,
        format!("N{}-({},{})-{lemma:?}", source.dim, source.s, source.p),
        json!({"dim": source.dim, "source": format!("({},{})", source.s, source.p), "lemma": format!("{lemma:?}"), "samples": count, "seed": seed}),
        "count",
    );
    rep.measured = vec![r.samples as f64, r.exact_failures as f64, r.limiting as f64];
    rep.deviation = r.float_max_error;
    rep.threshold = ROUND_TRIP_FLOAT_TOL;
    rep.pass = r.exact_failures == 0 && r.samples == count && r.float_max_error <= ROUND_TRIP_FLOAT_TOL;
    rep.notes.push("measured holds [samples, rational failures, limiting-branch samples]".into());
    Ok(rep)
}

fn failed(kind: ExperimentKind, name: String, err: String) -> ExperimentReport {
    let mut rep = ExperimentReport::new(kind, name, json!({}), "none");
    rep.deviation = f64::INFINITY;
    rep.pass = false;
    rep.notes.push(format!("error: {err}"));
    rep
}

/// Runs every acceptance experiment. Jobs run in parallel; the result order
/// is the job order. A job that errors yields a failing report carrying the
/// error message.
pub fn acceptance_batch(cfg: &CliConfig) -> Result<Vec<ExperimentReport>> {
    let tol = cfg.tolerances;
    let eps = cfg.epsilons.clone();
    let mut jobs: Vec<Job> = Vec::new();

    let regimes = [(2u32, "0.5,2"), (1, "0.5,2"), (1, "0.9,2")];
    for (n, sp) in regimes {
        for d in [DomainKind::WholeSpace, DomainKind::BoundedLipschitz] {
            let res = cfg.partition_resolution;
            jobs.push((
                ExperimentKind::Partition,
                format!("N{n}-{sp}-{}", domain_name(d)),
                Box::new(move || partition_report(&idx(n, sp)?, d, res)),
            ));
        }
    }
    for (n, sp, lemma) in [
        (2u32, "0.5,2", CurveLemma::SubcriticalCont),
        (2, "0.5,2", CurveLemma::SubcriticalCompact),
        (1, "0.5,2", CurveLemma::Critical),
    ] {
        let (count, seed) = (cfg.round_trip_samples, cfg.seed);
        jobs.push((
            ExperimentKind::CurveRoundTrip,
            format!("N{n}-{sp}-{lemma:?}"),
            Box::new(move || round_trip_report(&idx(n, sp)?, lemma, count, seed)),
        ));
    }

    let scaling_eps = [1.0, 0.5, 0.25, 0.125];
    for label in ["tent", "bump"] {
        for tag in [Tag::Lemma2_3, Tag::Lemma2_4, Tag::Lemma2_5, Tag::Lemma2_6] {
            jobs.push((
                ExperimentKind::ScalingIdentity,
                format!("{label}-{tag}"),
                Box::new(move || {
                    let src = idx(1, "0.5,2")?;
                    let (g, b) = lemma_parameters(tag, &src)?;
                    let mut r = verify_scaling_identity(&by_label(label)?, &src, g, b, &scaling_eps, &tol)?;
                    r.name = format!("{}-{tag}", r.name);
                    Ok(r)
                }),
            ));
        }
    }
    jobs.push((
        ExperimentKind::BoundedScaling,
        "bump-box".into(),
        Box::new(move || {
            let dom = reference_domain(DomainKind::BoundedLipschitz, 1)?;
            verify_bounded_scaling_bounds(&make_bump(1, 0.5)?, &idx(1, "0.5,2")?, 0.0, &scaling_eps, &dom, &tol)
        }),
    ));

    for (n, a, b, d) in [
        (1u32, "0.5,2", "0.5,6", DomainKind::WholeSpace),
        (1, "0.5,2", "0.5,1", DomainKind::WholeSpace),
        (1, "0.5,2", "0.5,4", DomainKind::WholeSpace),
        (1, "0.9,2", "0.9,4", DomainKind::WholeSpace),
        (1, "0.5,2", "0.5,6", DomainKind::BoundedLipschitz),
        (2, "0.5,2", "0.75,2", DomainKind::WholeSpace),
    ] {
        let eps = eps.clone();
        jobs.push((
            ExperimentKind::Counterexample,
            format!("N{n}-{a}-{b}-{}", domain_name(d)),
            Box::new(move || counterexample_run(&idx(n, a)?, &idx(n, b)?, d, &eps, &tol, None)),
        ));
    }

    for (n, a, b, d) in [
        (1u32, "0.5,2", "0.25,2", DomainKind::BoundedLipschitz),
        (1, "0.9,2", "0.4,inf", DomainKind::WholeSpace),
        (2, "0.5,2", "0.25,2", DomainKind::WholeSpace),
    ] {
        let eps = eps.clone();
        jobs.push((
            ExperimentKind::EmbeddingConstant,
            format!("N{n}-{a}-{b}-{}", domain_name(d)),
            Box::new(move || estimate_embedding_constant(&idx(n, a)?, &idx(n, b)?, d, &builtin(), &eps, &tol)),
        ));
    }

    jobs.push((
        ExperimentKind::BmoChain,
        "N1-0.5,2".into(),
        Box::new(move || {
            let corpus: Vec<_> = ["bump", "tent", "gaussian"].iter().map(|l| by_label(l)).collect::<Result<_>>()?;
            let family = BallFamily::grid(1, -2.0, 2.0, 7, 2.0, 4)?;
            bmo_chain(&idx(1, "0.5,2")?, &corpus, &family, &tol)
        }),
    ));

    for u in builtin() {
        jobs.push((
            ExperimentKind::Interpolation,
            u.label.clone(),
            Box::new(move || {
                let dom = if u.effective_support().is_some() {
                    ConcreteDomain::whole(u.dim)
                } else {
                    reference_domain(DomainKind::BoundedLipschitz, u.dim)?
                };
                let first = idx(u.dim, "0,2")?;
                let second = idx(u.dim, "0.8,2")?;
                verify_interpolation(&u, &dom, &first, &second, &[0.0, 0.25, 0.5, 0.75, 1.0], &tol)
            }),
        ));
    }

    jobs.push((
        ExperimentKind::BbmLimit,
        "bump-p2".into(),
        Box::new(move || {
            bbm_limit_sweep(&by_label("bump")?, &ConcreteDomain::whole(1), 2.0, &[0.001, 0.25, 0.5, 0.75, 0.999], &tol)
        }),
    ));

    Ok(jobs
        .par_iter()
        .map(|(kind, name, job)| job().unwrap_or_else(|e| failed(*kind, name.clone(), e.to_string())))
        .collect())
}
