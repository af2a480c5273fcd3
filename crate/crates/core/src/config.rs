//! Flat `key = value` configuration for the CLI and batch runs.
//!
//! Blank lines and lines starting with `#` are ignored. Unknown or repeated
//! keys are errors, as are values outside the documented ranges.

use std::collections::BTreeSet;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::lab::{default_epsilons, Tolerances};

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Json,
    Csv,
    Svg,
}

impl FromStr for Format {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "json" => Ok(Format::Json),
            "csv" => Ok(Format::Csv),
            "svg" => Ok(Format::Svg),
            _ => Err(Error::Config(format!("unknown format {s:?} (expected json, csv or svg)"))),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CliConfig {
    pub tolerances: Tolerances,
    /// Schedule for counterexample fits and stress runs.
    pub epsilons: Vec<f64>,
    /// Region plot resolution (s~ points, 1/p~ points).
    pub region_resolution: (u32, u32),
    /// Points per axis of the partition grid.
    pub partition_resolution: u32,
    pub round_trip_samples: usize,
    pub seed: u64,
    pub output_dir: PathBuf,
    pub formats: BTreeSet<Format>,
}

impl Default for CliConfig {
    fn default() -> Self {
        CliConfig {
            tolerances: Tolerances::default(),
            epsilons: default_epsilons(),
            region_resolution: (101, 101),
            partition_resolution: 100,
            round_trip_samples: 1000,
            seed: 20_240_601,
            output_dir: PathBuf::from("soblab-out"),
            formats: [Format::Json, Format::Csv, Format::Svg].into_iter().collect(),
        }
    }
}

/// Every accepted key with its range, in the order used by `--help`.
pub const KEYS: &[(&str, &str)] = &[
    ("tol.quadrature", "relative quadrature tolerance, [1e-12, 1e-2]"),
    ("tol.scaling", "scaling identity deviation, (0, 1)"),
    ("tol.slope", "relative slope error, (0, 1)"),
    ("tol.bbm", "s -> 0 / s -> 1 endpoint deviation, (0, 1)"),
    ("tol.stress_slope", "embedding-constant stress slope, (0, 1)"),
    ("tol.endpoint", "interpolation endpoint deviation, (0, 1)"),
    ("tol.preasymptotic", "lower-order term at the largest fitted epsilon, (0, 1)"),
    ("epsilons", "comma-separated values in (0, 1], 3 to 32 entries"),
    ("region.resolution", "NSxNP, each in [1, 1000]"),
    ("partition.resolution", "points per axis, [2, 1000]"),
    ("round_trip.samples", "[1, 100000]"),
    ("seed", "unsigned integer"),
    ("output_dir", "path"),
    ("formats", "comma-separated subset of json, csv, svg"),
];

fn parse_f64(key: &str, v: &str) -> Result<f64> {
    v.parse::<f64>().map_err(|_| Error::Config(format!("{key}: not a number: {v:?}")))
}

fn in_open_unit(key: &str, v: &str) -> Result<f64> {
    let x = parse_f64(key, v)?;
    if x > 0.0 && x < 1.0 {
        Ok(x)
    } else {
        Err(Error::Config(format!("{key}: {x} outside (0, 1)")))
    }
}

fn int_in<T: FromStr + PartialOrd + Copy + std::fmt::Display>(key: &str, v: &str, lo: T, hi: T) -> Result<T> {
    let x: T = v.parse().map_err(|_| Error::Config(format!("{key}: not an integer: {v:?}")))?;
    if x < lo || x > hi {
        return Err(Error::Config(format!("{key}: {x} outside [{lo}, {hi}]")));
    }
    Ok(x)
}

/// Comma-separated epsilon schedule; every value in (0, 1].
pub fn parse_epsilons(v: &str) -> Result<Vec<f64>> {
    let eps: Vec<f64> = v.split(',').map(|t| parse_f64("epsilons", t.trim())).collect::<Result<_>>()?;
    if !(3..=32).contains(&eps.len()) {
        return Err(Error::Config(format!("epsilons: need 3 to 32 values, got {}", eps.len())));
    }
    if let Some(e) = eps.iter().find(|e| !(**e > 0.0 && **e <= 1.0)) {
        return Err(Error::Config(format!("epsilons: {e} outside (0, 1]")));
    }
    Ok(eps)
}

/// `NSxNP`, for example `101x101`.
pub fn parse_resolution(v: &str) -> Result<(u32, u32)> {
    let (a, b) = v
        .split_once(['x', 'X'])
        .ok_or_else(|| Error::Config(format!("resolution: expected NSxNP, got {v:?}")))?;
    Ok((int_in("resolution", a.trim(), 1, 1000)?, int_in("resolution", b.trim(), 1, 1000)?))
}

impl CliConfig {
    pub fn parse(text: &str) -> Result<CliConfig> {
        let mut cfg = CliConfig::default();
        let mut seen = BTreeSet::new();
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| Error::Config(format!("line {}: expected key = value", lineno + 1)))?;
            let (key, value) = (key.trim(), value.trim());
            if !seen.insert(key.to_string()) {
                return Err(Error::Config(format!("line {}: duplicate key {key}", lineno + 1)));
            }
            cfg.set(key, value).map_err(|e| match e {
                Error::Config(m) => Error::Config(format!("line {}: {m}", lineno + 1)),
                other => other,
            })?;
        }
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<CliConfig> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Config(format!("cannot read {}: {e}", path.display())))?;
        CliConfig::parse(&text)
    }

    fn set(&mut self, key: &str, v: &str) -> Result<()> {
        let t = &mut self.tolerances;
        match key {
            "tol.quadrature" => {
                let x = parse_f64(key, v)?;
                if !(1e-12..=1e-2).contains(&x) {
                    return Err(Error::Config(format!("{key}: {x} outside [1e-12, 1e-2]")));
                }
                t.quadrature = x;
            }
            "tol.scaling" => t.scaling = in_open_unit(key, v)?,
            "tol.slope" => t.slope = in_open_unit(key, v)?,
            "tol.bbm" => t.bbm = in_open_unit(key, v)?,
            "tol.stress_slope" => t.stress_slope = in_open_unit(key, v)?,
            "tol.endpoint" => t.endpoint = in_open_unit(key, v)?,
            "tol.preasymptotic" => t.preasymptotic = in_open_unit(key, v)?,
            "epsilons" => self.epsilons = parse_epsilons(v)?,
            "region.resolution" => self.region_resolution = parse_resolution(v)?,
            "partition.resolution" => self.partition_resolution = int_in(key, v, 2, 1000)?,
            "round_trip.samples" => self.round_trip_samples = int_in(key, v, 1, 100_000)?,
            "seed" => self.seed = int_in(key, v, 0, u64::MAX)?,
            "output_dir" => {
                if v.is_empty() {
                    return Err(Error::Config("output_dir: empty path".into()));
                }
                self.output_dir = PathBuf::from(v);
            }
            "formats" => {
                let f: BTreeSet<Format> = v.split(',').map(|t| t.trim().parse()).collect::<Result<_>>()?;
                if f.is_empty() {
                    return Err(Error::Config("formats: empty".into()));
                }
                self.formats = f;
            }
            _ => return Err(Error::Config(format!("unknown key {key:?}"))),
        }
        Ok(())
    }

    pub fn wants(&self, f: Format) -> bool {
        self.formats.contains(&f)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_and_overrides() {
        let cfg = CliConfig::parse("# comment\n\ntol.slope = 0.1\nepsilons = 1, 0.5, 0.25\nformats = csv,json\nregion.resolution = 2x3\n").unwrap();
        assert_eq!(cfg.tolerances.slope, 0.1);
        assert_eq!(cfg.tolerances.quadrature, 1e-6);
        assert_eq!(cfg.epsilons, vec![1.0, 0.5, 0.25]);
        assert_eq!(cfg.region_resolution, (2, 3));
        assert!(cfg.wants(Format::Csv) && !cfg.wants(Format::Svg));
    }

    #[test]
    fn rejects_bad_input() {
        for text in [
            "colour = red",
            "tol.slope = 2",
            "tol.quadrature = 0.5",
            "epsilons = 1, 0",
            "epsilons = 1",
            "formats = png",
            "seed = -1",
            "partition.resolution = 1",
            "tol.bbm = 0.1\ntol.bbm = 0.2",
            "no equals sign",
        ] {
            assert!(matches!(CliConfig::parse(text), Err(Error::Config(_))), "{text}");
        }
    }
}
