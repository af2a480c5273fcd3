//! `soblab`: embedding classification, region figures, norms and experiments.
//!
//! Exit codes: 0 ok, 1 other failure, 2 usage/parse/config error,
//! 3 index outside the theorems' hypotheses, 4 unknown corpus label,
//! 5 experiment failed or tolerance not reached.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde_json::json;

use soblab::config::{parse_epsilons, parse_resolution, CliConfig, Format};
use soblab::corpus::{by_label, parse_manifest, TestFunction};
use soblab::exponent::{
    classify_compact, classify_continuous, region_sample, ChainMode, Compactness, Continuity, DomainKind, GridSpec, SobolevIndex, Tag,
};
use soblab::lab::{
    acceptance_batch, counterexample_run, lemma_parameters, reference_domain, verify_bounded_scaling_bounds,
    verify_interpolation, verify_scaling_identity, ExperimentReport,
};
use soblab::norms::{full_norm, lp_norm, seminorm, ConcreteDomain, NormReport};
use soblab::report::{region_csv, region_svg, summary_csv, to_json};
use soblab::Error;

const HYPOTHESIS: &str = "the embedding theorems cover 0 <= s <= 1, 1 <= p <= inf, and s > 0 unless the target equals the source";

#[derive(Parser)]
#[command(name = "soblab", version, about = "Fractional Sobolev embeddings: classification and numerical checks")]
struct Cli {
    /// Flat key = value config file.
    #[arg(long, global = true, value_name = "FILE")]
    config: Option<PathBuf>,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Continuity/compactness verdict for one source/target pair.
    Classify {
        #[arg(long)]
        dim: u32,
        #[arg(long, value_name = "S,P")]
        source: String,
        #[arg(long, value_name = "S,P")]
        target: String,
        #[arg(long, default_value = "rn")]
        domain: String,
        /// Which question `justification` answers: continuous or compact.
        #[arg(long, default_value = "continuous")]
        mode: String,
    },
    /// Verdict grid over the target square as CSV and SVG (and JSON).
    Region {
        #[arg(long)]
        dim: u32,
        #[arg(long, value_name = "S,P")]
        source: String,
        #[arg(long, default_value = "rn")]
        domain: String,
        #[arg(long, default_value = "continuous")]
        mode: String,
        /// NSxNP; defaults to region.resolution from the config.
        #[arg(long)]
        resolution: Option<String>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// ||u||_{W^{s,p}} together with its L^p and seminorm parts.
    Norm {
        #[arg(long)]
        dim: u32,
        #[arg(long)]
        s: String,
        #[arg(long)]
        p: String,
        #[command(flatten)]
        func: FnArgs,
        #[arg(long, default_value = "rn")]
        domain: String,
        /// Relative quadrature tolerance; defaults to tol.quadrature.
        #[arg(long)]
        tol: Option<f64>,
    },
    /// Scaling identity for v_eps = eps^gamma u(x / eps^beta).
    Scaling {
        #[arg(long, default_value_t = 1)]
        dim: u32,
        #[arg(long, value_name = "S,P")]
        source: String,
        #[command(flatten)]
        func: FnArgs,
        /// Take gamma and beta from a scaling lemma, e.g. Lemma-2.4.
        #[arg(long, conflicts_with_all = ["gamma", "beta"])]
        lemma: Option<String>,
        #[arg(long, allow_hyphen_values = true)]
        gamma: Option<f64>,
        #[arg(long, allow_hyphen_values = true)]
        beta: Option<f64>,
        #[arg(long, default_value = "rn")]
        domain: String,
        #[arg(long, default_value = "1,0.5,0.25,0.125")]
        eps: String,
    },
    /// Blow-up rate of a non-embedding family.
    Counterexample {
        #[arg(long)]
        dim: u32,
        #[arg(long, value_name = "S,P")]
        source: String,
        #[arg(long, value_name = "S,P")]
        target: String,
        #[arg(long, default_value = "rn")]
        domain: String,
        /// Probe function; the default is a bump suited to the domain.
        #[arg(long = "fn")]
        label: Option<String>,
        #[arg(long)]
        manifest: Option<PathBuf>,
        /// Epsilon schedule; defaults to the config schedule.
        #[arg(long)]
        eps: Option<String>,
    },
    /// Interpolation inequality along theta.
    Interpolate {
        #[command(flatten)]
        func: FnArgs,
        #[arg(long, value_name = "S,P")]
        first: String,
        #[arg(long, value_name = "S,P")]
        second: String,
        #[arg(long, default_value = "0,0.25,0.5,0.75,1")]
        thetas: String,
        /// rn or bounded; the default is rn for decaying functions, bounded otherwise.
        #[arg(long)]
        domain: Option<String>,
    },
    /// Full acceptance batch: summary.csv, one JSON per experiment, region figures.
    Report {
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Args)]
struct FnArgs {
    /// Corpus label.
    #[arg(long = "fn")]
    label: String,
    /// JSON corpus manifest searched before the built-in corpus.
    #[arg(long)]
    manifest: Option<PathBuf>,
}

enum Failure {
    Lib(Error),
    Failed(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Lib(e)
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        Failure::Lib(Error::Io(e))
    }
}

type Outcome = std::result::Result<(), Failure>;

fn exit_code(e: &Error) -> u8 {
    match e {
        Error::Parse(_) | Error::Config(_) | Error::DimensionMismatch(..) => 2,
        Error::InvalidIndex(_) | Error::Unsupported(_) => 3,
        Error::UnknownLabel(_) => 4,
        Error::Tolerance(_) => 5,
        Error::Precondition(_) | Error::Io(_) => 1,
    }
}

fn index(dim: u32, pair: &str) -> soblab::Result<SobolevIndex> {
    SobolevIndex::parse(dim, pair)
}

fn load_function(label: &str, manifest: Option<&Path>) -> soblab::Result<TestFunction> {
    if let Some(path) = manifest {
        let text = fs::read_to_string(path)?;
        if let Some(f) = parse_manifest(&text)?.into_iter().find(|f| f.label == label) {
            return Ok(f);
        }
    }
    by_label(label)
}

fn parse_list(v: &str, what: &str) -> soblab::Result<Vec<f64>> {
    v.split(',')
        .map(|t| t.trim().parse::<f64>().map_err(|_| Error::Parse(format!("{what}: not a number: {t:?}"))))
        .collect()
}

fn print_json<T: serde::Serialize>(value: &T) -> soblab::Result<()> {
    print!("{}", to_json(value)?);
    Ok(())
}

fn experiment(rep: ExperimentReport) -> Outcome {
    print_json(&rep)?;
    if rep.pass {
        Ok(())
    } else {
        Err(Failure::Failed(rep.summary()))
    }
}

/// Joins `parts` with '-' into a portable file name: '/' becomes '_', other
/// punctuation becomes '-', and runs of '-' collapse.
fn file_stem(parts: &[&str]) -> String {
    let mut out = String::new();
    for c in parts.join("-").chars() {
        let c = match c {
            '/' => '_',
            c if c.is_ascii_alphanumeric() || c == '.' || c == '_' => c,
            _ => '-',
        };
        if !(c == '-' && (out.is_empty() || out.ends_with('-'))) {
            out.push(c);
        }
    }
    out.trim_end_matches('-').to_string()
}

fn write_region(
    dir: &Path,
    cfg: &CliConfig,
    source: &SobolevIndex,
    domain: DomainKind,
    mode: ChainMode,
    grid: &GridSpec,
    stem: &str,
) -> soblab::Result<Vec<PathBuf>> {
    let sample = region_sample(source, domain, mode, grid)?;
    let mut written = Vec::new();
    let mut put = |ext: &str, body: String| -> soblab::Result<()> {
        let path = dir.join(format!("{stem}.{ext}"));
        fs::write(&path, body)?;
        written.push(path);
        Ok(())
    };
    if cfg.wants(Format::Csv) {
        put("csv", region_csv(&sample)?)?;
    }
    if cfg.wants(Format::Svg) {
        put("svg", region_svg(&sample, grid))?;
    }
    if cfg.wants(Format::Json) {
        put("json", to_json(&sample)?)?;
    }
    Ok(written)
}

fn cmd_classify(dim: u32, source: &str, target: &str, domain: &str, mode: &str) -> Outcome {
    let (src, tgt) = (index(dim, source)?, index(dim, target)?);
    let (d, m): (DomainKind, ChainMode) = (domain.parse()?, mode.parse()?);
    let v = match m {
        ChainMode::Continuous => classify_continuous(&src, &tgt, d)?,
        ChainMode::Compact => classify_compact(&src, &tgt, d)?,
    };
    print_json(&v)?;
    if v.continuous == Continuity::Unsupported || v.compact == Compactness::Unsupported {
        let why = v.note.clone().unwrap_or_else(|| "no theorem applies".into());
        return Err(Failure::Lib(Error::Unsupported(why)));
    }
    Ok(())
}

fn cmd_norm(cfg: &CliConfig, dim: u32, s: &str, p: &str, func: &FnArgs, domain: &str, tol: Option<f64>) -> Outcome {
    let idx = SobolevIndex::parse(dim, &format!("{s},{p}"))?;
    let u = load_function(&func.label, func.manifest.as_deref())?;
    if u.dim != dim {
        return Err(Error::DimensionMismatch(dim, u.dim).into());
    }
    let dom = reference_domain(domain.parse()?, dim)?;
    let tol = tol.unwrap_or(cfg.tolerances.quadrature);
    if !(1e-12..=1e-2).contains(&tol) {
        return Err(Error::Parse(format!("--tol {tol:e} outside [1e-12, 1e-2]")).into());
    }
    let (sf, pf) = (idx.s_f64(), idx.p_f64());
    let norm = full_norm(&u, &dom, &idx, tol)?;
    let lp = lp_norm(&u, &dom, pf, tol)?;
    let semi: Option<NormReport> = if sf > 0.0 { Some(seminorm(&u, &dom, sf, pf, tol)?) } else { None };
    print_json(&json!({
        "function": u.label,
        "index": idx.to_string(),
        "domain": domain_label(&dom),
        "norm": norm,
        "lp": lp,
        "seminorm": semi,
    }))?;
    let parts = [Some(&norm), Some(&lp), semi.as_ref()];
    if parts.iter().flatten().all(|r| r.converged) {
        Ok(())
    } else {
        Err(Error::Tolerance(format!("quadrature did not reach relative tolerance {tol}")).into())
    }
}

fn domain_label(dom: &ConcreteDomain) -> &'static str {
    if dom.is_bounded() {
        "bounded"
    } else {
        "rn"
    }
}

#[allow(clippy::too_many_arguments)]
fn cmd_scaling(
    cfg: &CliConfig,
    dim: u32,
    source: &str,
    func: &FnArgs,
    lemma: Option<&str>,
    gamma: Option<f64>,
    beta: Option<f64>,
    domain: &str,
    eps: &str,
) -> Outcome {
    let idx = index(dim, source)?;
    let u = load_function(&func.label, func.manifest.as_deref())?;
    let eps = parse_list(eps, "eps")?;
    let (gamma, beta) = match (lemma, gamma, beta) {
        (Some(l), _, _) => lemma_parameters(l.parse::<Tag>()?, &idx)?,
        (None, Some(g), b) => (g, b.unwrap_or(1.0)),
        (None, None, _) => return Err(Error::Parse("scaling needs --lemma or --gamma".into()).into()),
    };
    let kind: DomainKind = domain.parse()?;
    let rep = match kind {
        DomainKind::WholeSpace => verify_scaling_identity(&u, &idx, gamma, beta, &eps, &cfg.tolerances)?,
        DomainKind::BoundedLipschitz => {
            let dom = reference_domain(kind, dim)?;
            verify_bounded_scaling_bounds(&u, &idx, gamma, &eps, &dom, &cfg.tolerances)?
        }
    };
    experiment(rep)
}

#[allow(clippy::too_many_arguments)]
fn cmd_counterexample(
    cfg: &CliConfig,
    dim: u32,
    source: &str,
    target: &str,
    domain: &str,
    label: Option<&str>,
    manifest: Option<&Path>,
    eps: Option<&str>,
) -> Outcome {
    let (src, tgt) = (index(dim, source)?, index(dim, target)?);
    let probe = label.map(|l| load_function(l, manifest)).transpose()?;
    let eps = match eps {
        Some(e) => parse_epsilons(e)?,
        None => cfg.epsilons.clone(),
    };
    experiment(counterexample_run(&src, &tgt, domain.parse()?, &eps, &cfg.tolerances, probe.as_ref())?)
}

fn cmd_interpolate(cfg: &CliConfig, func: &FnArgs, first: &str, second: &str, thetas: &str, domain: Option<&str>) -> Outcome {
    let u = load_function(&func.label, func.manifest.as_deref())?;
    let (a, b) = (index(u.dim, first)?, index(u.dim, second)?);
    let kind = match domain {
        Some(d) => d.parse()?,
        None if u.effective_support().is_some() => DomainKind::WholeSpace,
        None => DomainKind::BoundedLipschitz,
    };
    let dom = reference_domain(kind, u.dim)?;
    let thetas = parse_list(thetas, "thetas")?;
    experiment(verify_interpolation(&u, &dom, &a, &b, &thetas, &cfg.tolerances)?)
}

/// Region figures written by `report`: one per regime and mode.
const FIGURES: &[(u32, &str, DomainKind, ChainMode)] = &[
    (2, "1/2,2", DomainKind::WholeSpace, ChainMode::Continuous),
    (2, "1/2,2", DomainKind::BoundedLipschitz, ChainMode::Compact),
    (1, "1/2,2", DomainKind::WholeSpace, ChainMode::Continuous),
    (1, "1/2,2", DomainKind::BoundedLipschitz, ChainMode::Compact),
    (1, "9/10,2", DomainKind::WholeSpace, ChainMode::Continuous),
];

fn domain_str(d: DomainKind) -> &'static str {
    match d {
        DomainKind::WholeSpace => "rn",
        DomainKind::BoundedLipschitz => "bounded",
    }
}

fn mode_str(m: ChainMode) -> &'static str {
    match m {
        ChainMode::Continuous => "continuous",
        ChainMode::Compact => "compact",
    }
}

fn cmd_report(cfg: &CliConfig, out: Option<PathBuf>) -> Outcome {
    let dir = out.unwrap_or_else(|| cfg.output_dir.clone());
    fs::create_dir_all(&dir)?;
    let reports = acceptance_batch(cfg)?;
    if cfg.wants(Format::Csv) {
        fs::write(dir.join("summary.csv"), summary_csv(&reports)?)?;
    }
    if cfg.wants(Format::Json) {
        for (i, r) in reports.iter().enumerate() {
            let stem = file_stem(&[&format!("{i:02}"), r.kind.as_str(), &r.name]);
            fs::write(dir.join(format!("{stem}.json")), to_json(r)?)?;
        }
    }
    let (ns, np) = cfg.region_resolution;
    let grid = GridSpec::unit(ns, np);
    for (n, sp, d, m) in FIGURES {
        let stem = file_stem(&["region", &format!("N{n}"), sp, domain_str(*d), mode_str(*m)]);
        write_region(&dir, cfg, &index(*n, sp)?, *d, *m, &grid, &stem)?;
    }
    for r in &reports {
        println!("{}", r.summary());
    }
    let passed = reports.iter().filter(|r| r.pass).count();
    println!("{passed}/{} experiments passed; output in {}", reports.len(), dir.display());
    if passed == reports.len() {
        Ok(())
    } else {
        Err(Failure::Failed(format!("{} experiments failed", reports.len() - passed)))
    }
}

fn run(cli: Cli) -> Outcome {
    let cfg = match &cli.config {
        Some(path) => CliConfig::load(path)?,
        None => CliConfig::default(),
    };
    match cli.cmd {
        Cmd::Classify { dim, source, target, domain, mode } => cmd_classify(dim, &source, &target, &domain, &mode),
        Cmd::Region { dim, source, domain, mode, resolution, out } => {
            let (ns, np) = match resolution {
                Some(r) => parse_resolution(&r)?,
                None => cfg.region_resolution,
            };
            let src = index(dim, &source)?;
            let (d, m): (DomainKind, ChainMode) = (domain.parse()?, mode.parse()?);
            let dir = out.unwrap_or_else(|| cfg.output_dir.clone());
            fs::create_dir_all(&dir)?;
            let stem = file_stem(&["region", &format!("N{dim}"), &source, domain_str(d), mode_str(m)]);
            for path in write_region(&dir, &cfg, &src, d, m, &GridSpec::unit(ns, np), &stem)? {
                println!("{}", path.display());
            }
            Ok(())
        }
        Cmd::Norm { dim, s, p, func, domain, tol } => cmd_norm(&cfg, dim, &s, &p, &func, &domain, tol),
        Cmd::Scaling { dim, source, func, lemma, gamma, beta, domain, eps } => {
            cmd_scaling(&cfg, dim, &source, &func, lemma.as_deref(), gamma, beta, &domain, &eps)
        }
        Cmd::Counterexample { dim, source, target, domain, label, manifest, eps } => cmd_counterexample(
            &cfg,
            dim,
            &source,
            &target,
            &domain,
            label.as_deref(),
            manifest.as_deref(),
            eps.as_deref(),
        ),
        Cmd::Interpolate { func, first, second, thetas, domain } => {
            cmd_interpolate(&cfg, &func, &first, &second, &thetas, domain.as_deref())
        }
        Cmd::Report { out } => cmd_report(&cfg, out),
    }
}

fn init_threads() -> Result<(), String> {
    let Ok(v) = std::env::var("SOBLAB_THREADS") else {
        return Ok(());
    };
    let n: usize = v
        .trim()
        .parse()
        .ok()
        .filter(|n| *n >= 1)
        .ok_or_else(|| format!("SOBLAB_THREADS must be a positive integer, got {v:?}"))?;
    rayon::ThreadPoolBuilder::new().num_threads(n).build_global().map_err(|e| e.to_string())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    if let Err(msg) = init_threads() {
        eprintln!("soblab: {msg}");
        return ExitCode::from(2);
    }
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Failed(msg)) => {
            eprintln!("soblab: {msg}");
            ExitCode::from(5)
        }
        Err(Failure::Lib(e)) => {
            let code = exit_code(&e);
            match code {
                2 => eprintln!("soblab: {e}\nRun `soblab --help` for usage."),
                3 => eprintln!("soblab: {e}; {HYPOTHESIS}"),
                _ => eprintln!("soblab: {e}"),
            }
            ExitCode::from(code)
        }
    }
}
