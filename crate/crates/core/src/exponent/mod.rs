//! Exact arithmetic over Sobolev indices (N, s, p).
//!
//! Indices are rationals; `p = +inf` is its own value. Classification never
//! touches floating point.

mod classify;
mod curves;
mod region;

pub use classify::{
    classify, classify_compact, classify_continuous, coverage, BoundaryFlag, Coverage, Compactness, Continuity,
    EmbeddingVerdict, Tag,
};
pub use curves::{
    connecting_q, connecting_q_f64, curve_chain_check, gamma_curve, gamma_curve_f64,
    interpolation_exponents, ChainMode, ConnectingCurve, CurveLemma, CurvePoint,
};
pub use region::{region_sample, GridSpec, Polyline, RegionCell, RegionSample};

use std::cmp::Ordering;
use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Serialize, Serializer};

use crate::error::{Error, Result};

pub type Rational = BigRational;

pub fn rat(n: i64, d: i64) -> Rational {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

pub fn int(n: i64) -> Rational {
    BigRational::from_integer(BigInt::from(n))
}

pub fn to_f64(q: &Rational) -> f64 {
    q.to_f64().unwrap_or(f64::NAN)
}

/// Exact conversion of a finite float.
pub fn from_f64(x: f64) -> Result<Rational> {
    BigRational::from_float(x).ok_or_else(|| Error::Parse(format!("non-finite value {x}")))
}

/// Parses "3", "-2", "0.25", "1e-3", "8/3" exactly.
pub fn parse_rational(text: &str) -> Result<Rational> {
    let t = text.trim();
    let bad = || Error::Parse(format!("not a rational number: {text:?}"));
    if t.is_empty() {
        return Err(bad());
    }
    if let Some((a, b)) = t.split_once('/') {
        let n = parse_rational(a)?;
        let d = parse_rational(b)?;
        if d.is_zero() {
            return Err(Error::Parse(format!("zero denominator in {text:?}")));
        }
        return Ok(n / d);
    }
    let (mant, exp) = match t.find(['e', 'E']) {
        Some(i) => (&t[..i], t[i + 1..].parse::<i32>().map_err(|_| bad())?),
        None => (t, 0),
    };
    let (neg, digits) = match mant.strip_prefix('-') {
        Some(r) => (true, r),
        None => (false, mant.strip_prefix('+').unwrap_or(mant)),
    };
    let (ip, fp) = digits.split_once('.').unwrap_or((digits, ""));
    if ip.is_empty() && fp.is_empty() {
        return Err(bad());
    }
    if !ip.chars().chain(fp.chars()).all(|c| c.is_ascii_digit()) {
        return Err(bad());
    }
    let all: String = format!("{ip}{fp}");
    let n = BigInt::from_str(if all.is_empty() { "0" } else { &all }).map_err(|_| bad())?;
    let scale = exp - fp.len() as i32;
    let ten = BigInt::from(10);
    let mut q = BigRational::from_integer(n);
    if scale >= 0 {
        q *= BigRational::from_integer(num_traits::pow(ten, scale as usize));
    } else {
        q /= BigRational::from_integer(num_traits::pow(ten, (-scale) as usize));
    }
    Ok(if neg { -q } else { q })
}

/// A rational or +infinity. `1/inf = 0` and `1/0 = inf`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum ExtReal {
    Finite(Rational),
    Infinity,
}

impl ExtReal {
    pub fn int(n: i64) -> Self {
        ExtReal::Finite(int(n))
    }

    pub fn is_infinite(&self) -> bool {
        matches!(self, ExtReal::Infinity)
    }

    pub fn finite(&self) -> Option<&Rational> {
        match self {
            ExtReal::Finite(q) => Some(q),
            ExtReal::Infinity => None,
        }
    }

    /// Reciprocal for nonnegative values.
    pub fn recip(&self) -> ExtReal {
        match self {
            ExtReal::Infinity => ExtReal::Finite(Rational::zero()),
            ExtReal::Finite(q) if q.is_zero() => ExtReal::Infinity,
            ExtReal::Finite(q) => ExtReal::Finite(q.recip()),
        }
    }

    pub fn to_f64(&self) -> f64 {
        match self {
            ExtReal::Finite(q) => to_f64(q),
            ExtReal::Infinity => f64::INFINITY,
        }
    }

    pub fn from_f64(x: f64) -> Result<Self> {
        if x == f64::INFINITY {
            Ok(ExtReal::Infinity)
        } else {
            Ok(ExtReal::Finite(from_f64(x)?))
        }
    }

    pub fn cmp_q(&self, q: &Rational) -> Ordering {
        match self {
            ExtReal::Finite(a) => a.cmp(q),
            ExtReal::Infinity => Ordering::Greater,
        }
    }

    pub fn lt_q(&self, q: &Rational) -> bool {
        self.cmp_q(q) == Ordering::Less
    }
    pub fn le_q(&self, q: &Rational) -> bool {
        self.cmp_q(q) != Ordering::Greater
    }
    pub fn ge_q(&self, q: &Rational) -> bool {
        self.cmp_q(q) != Ordering::Less
    }
    pub fn eq_q(&self, q: &Rational) -> bool {
        self.cmp_q(q) == Ordering::Equal
    }
}

impl PartialOrd for ExtReal {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for ExtReal {
    fn cmp(&self, other: &Self) -> Ordering {
        match (self, other) {
            (ExtReal::Finite(a), ExtReal::Finite(b)) => a.cmp(b),
            (ExtReal::Finite(_), ExtReal::Infinity) => Ordering::Less,
            (ExtReal::Infinity, ExtReal::Finite(_)) => Ordering::Greater,
            (ExtReal::Infinity, ExtReal::Infinity) => Ordering::Equal,
        }
    }
}

impl fmt::Display for ExtReal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ExtReal::Finite(q) => write!(f, "{q}"),
            ExtReal::Infinity => write!(f, "inf"),
        }
    }
}

impl FromStr for ExtReal {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "inf" | "+inf" | "infinity" | "+infinity" => Ok(ExtReal::Infinity),
            other => parse_rational(other).map(ExtReal::Finite),
        }
    }
}

impl Serialize for ExtReal {
    fn serialize<S: Serializer>(&self, ser: S) -> std::result::Result<S::Ok, S::Error> {
        ser.serialize_str(&self.to_string())
    }
}

/// A smoothness/integrability pair in dimension N.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct SobolevIndex {
    pub dim: u32,
    pub s: Rational,
    pub p: ExtReal,
}

impl SobolevIndex {
    pub fn new(dim: u32, s: Rational, p: ExtReal) -> Result<Self> {
        if dim == 0 {
            return Err(Error::InvalidIndex("dimension must be at least 1".into()));
        }
        if s.is_negative() || s > Rational::one() {
            return Err(Error::InvalidIndex(format!("s = {s} outside [0,1]")));
        }
        if let ExtReal::Finite(q) = &p {
            if *q < Rational::one() {
                return Err(Error::InvalidIndex(format!("p = {q} below 1")));
            }
        }
        Ok(SobolevIndex { dim, s, p })
    }

    /// Parses `"s,p"` with `p` possibly `inf`.
    pub fn parse(dim: u32, pair: &str) -> Result<Self> {
        let (a, b) = pair
            .split_once(',')
            .ok_or_else(|| Error::Parse(format!("expected s,p but got {pair:?}")))?;
        Self::new(dim, parse_rational(a)?, b.parse()?)
    }

    pub fn from_f64(dim: u32, s: f64, p: f64) -> Result<Self> {
        Self::new(dim, from_f64(s)?, ExtReal::from_f64(p)?)
    }

    pub fn s_f64(&self) -> f64 {
        to_f64(&self.s)
    }

    pub fn p_f64(&self) -> f64 {
        self.p.to_f64()
    }

    pub fn n(&self) -> Rational {
        int(self.dim as i64)
    }

    /// The product sp; `None` for the excluded pair s = 0, p = inf.
    pub fn sp(&self) -> Option<ExtReal> {
        match &self.p {
            ExtReal::Finite(p) => Some(ExtReal::Finite(&self.s * p)),
            ExtReal::Infinity if self.s.is_zero() => None,
            ExtReal::Infinity => Some(ExtReal::Infinity),
        }
    }

    /// s - N/p, the Hölder exponent reached in the supercritical case.
    pub fn holder_exponent(&self) -> Rational {
        match &self.p {
            ExtReal::Finite(p) => &self.s - self.n() / p,
            ExtReal::Infinity => self.s.clone(),
        }
    }
}

impl fmt::Display for SobolevIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(N={}, s={}, p={})", self.dim, self.s, self.p)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Regime {
    Subcritical,
    Critical,
    Supercritical,
    Unsupported,
}

impl fmt::Display for Regime {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let t = match self {
            Regime::Subcritical => "subcritical",
            Regime::Critical => "critical",
            Regime::Supercritical => "supercritical",
            Regime::Unsupported => "unsupported",
        };
        f.write_str(t)
    }
}

pub fn regime(idx: &SobolevIndex) -> Regime {
    match idx.sp() {
        None => Regime::Unsupported,
        Some(sp) => match sp.cmp_q(&idx.n()) {
            Ordering::Less => Regime::Subcritical,
            Ordering::Equal => Regime::Critical,
            Ordering::Greater => Regime::Supercritical,
        },
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub enum DomainKind {
    #[serde(rename = "rn")]
    WholeSpace,
    #[serde(rename = "bounded")]
    BoundedLipschitz,
}

impl FromStr for DomainKind {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "rn" | "whole" | "whole-space" => Ok(DomainKind::WholeSpace),
            "bounded" => Ok(DomainKind::BoundedLipschitz),
            _ => Err(Error::Parse(format!("unknown domain kind {s:?}"))),
        }
    }
}

/// Np/(N - sp), defined for subcritical indices.
pub fn sobolev_conjugate(idx: &SobolevIndex) -> Result<ExtReal> {
    if regime(idx) != Regime::Subcritical {
        return Err(Error::Precondition(format!(
            "Sobolev conjugate needs sp < N, got {idx}"
        )));
    }
    let p = idx.p.finite().expect("subcritical p is finite");
    let n = idx.n();
    Ok(ExtReal::Finite(&n * p / (&n - &idx.s * p)))
}

/// Np/(N - (s - s~)p); `Infinity` when the denominator is not positive,
/// meaning every target integrability is admissible.
pub fn max_target_p(source: &SobolevIndex, s_tilde: &Rational) -> Result<ExtReal> {
    if s_tilde.is_negative() || *s_tilde > source.s {
        return Err(Error::Precondition(format!(
            "need 0 <= s~ <= s, got s~ = {s_tilde}, s = {}",
            source.s
        )));
    }
    Ok(max_target_p_unchecked(source, s_tilde))
}

pub(crate) fn max_target_p_unchecked(source: &SobolevIndex, s_tilde: &Rational) -> ExtReal {
    match &source.p {
        ExtReal::Infinity => ExtReal::Infinity,
        ExtReal::Finite(p) => {
            let n = source.n();
            let den = &n - (&source.s - s_tilde) * p;
            if den.is_positive() {
                ExtReal::Finite(&n * p / den)
            } else {
                ExtReal::Infinity
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_decimals_and_fractions() {
        assert_eq!(parse_rational("0.25").unwrap(), rat(1, 4));
        assert_eq!(parse_rational("8/3").unwrap(), rat(8, 3));
        assert_eq!(parse_rational("-1.5e1").unwrap(), int(-15));
        assert_eq!(parse_rational("2.5e-1").unwrap(), rat(1, 4));
        assert!(parse_rational("abc").is_err());
        assert!(parse_rational("1/0").is_err());
        assert_eq!("inf".parse::<ExtReal>().unwrap(), ExtReal::Infinity);
    }

    #[test]
    fn regimes() {
        let r = |n, s: &str| regime(&SobolevIndex::parse(n, s).unwrap());
        assert_eq!(r(2, "0.5,2"), Regime::Subcritical);
        assert_eq!(r(1, "0.5,2"), Regime::Critical);
        assert_eq!(r(2, "0.8,inf"), Regime::Supercritical);
        assert_eq!(r(2, "0,inf"), Regime::Unsupported);
    }

    #[test]
    fn conjugates() {
        let c = |n, s: &str| sobolev_conjugate(&SobolevIndex::parse(n, s).unwrap()).unwrap();
        assert_eq!(c(2, "0.5,2"), ExtReal::int(4));
        assert_eq!(c(1, "0.5,1"), ExtReal::int(2));
        assert_eq!(c(3, "0,2"), ExtReal::int(2));
        assert!(sobolev_conjugate(&SobolevIndex::parse(1, "0.5,2").unwrap()).is_err());
    }

    #[test]
    fn max_target() {
        let src = SobolevIndex::parse(2, "0.5,2").unwrap();
        assert_eq!(max_target_p(&src, &rat(1, 4)).unwrap(), ExtReal::Finite(rat(8, 3)));
        assert_eq!(max_target_p(&src, &rat(1, 2)).unwrap(), ExtReal::int(2));
        let crit = SobolevIndex::parse(1, "0.5,2").unwrap();
        assert_eq!(max_target_p(&crit, &rat(1, 4)).unwrap(), ExtReal::int(4));
        let sup = SobolevIndex::parse(1, "0.9,2").unwrap();
        assert_eq!(max_target_p(&sup, &rat(1, 10)).unwrap(), ExtReal::Infinity);
    }

    #[test]
    fn rejects_bad_indices() {
        assert!(SobolevIndex::parse(1, "1.5,2").is_err());
        assert!(SobolevIndex::parse(1, "0.5,0.5").is_err());
        assert!(SobolevIndex::parse(0, "0.5,2").is_err());
    }
}
