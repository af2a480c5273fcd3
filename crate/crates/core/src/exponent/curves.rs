//! The interpolation curve between two indices and the connecting curve
//! through the origin side of the region.

use num_traits::{One, Signed, Zero};
use serde::Serialize;

use super::{
    classify_compact, classify_continuous, int, max_target_p_unchecked, regime, DomainKind,
    EmbeddingVerdict, ExtReal, Rational, Regime, SobolevIndex,
};
use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CurvePoint {
    #[serde(serialize_with = "ser_rational")]
    pub theta: Rational,
    #[serde(serialize_with = "ser_rational")]
    pub s: Rational,
    pub p: ExtReal,
}

pub(crate) fn ser_rational<S: serde::Serializer>(
    q: &Rational,
    ser: S,
) -> std::result::Result<S::Ok, S::Error> {
    ser.serialize_str(&q.to_string())
}

fn unit_interval(theta: &Rational, what: &str) -> Result<()> {
    if theta.is_negative() || *theta > Rational::one() {
        return Err(Error::Precondition(format!("{what} = {theta} outside [0,1]")));
    }
    Ok(())
}

/// s_t = t s~ + (1-t) s and 1/p_t = (1-t)/p + t/p~.
pub fn gamma_curve(
    source: &SobolevIndex,
    target: &SobolevIndex,
    theta: &Rational,
) -> Result<CurvePoint> {
    if source.dim != target.dim {
        return Err(Error::DimensionMismatch(source.dim, target.dim));
    }
    unit_interval(theta, "theta")?;
    Ok(curve_point(&source.s, &source.p, &target.s, &target.p, theta))
}

fn curve_point(s: &Rational, p: &ExtReal, st: &Rational, pt: &ExtReal, theta: &Rational) -> CurvePoint {
    let one = Rational::one();
    let rest = &one - theta;
    let s_theta = theta * st + &rest * s;
    let inv = |e: &ExtReal| e.recip().finite().cloned().unwrap_or_else(Rational::zero);
    let inv_p = &rest * inv(p) + theta * inv(pt);
    CurvePoint { theta: theta.clone(), s: s_theta, p: ExtReal::Finite(inv_p).recip() }
}

/// Float twin of [`gamma_curve`]; infinite exponents are `f64::INFINITY`.
pub fn gamma_curve_f64(s: f64, p: f64, st: f64, pt: f64, theta: f64) -> (f64, f64) {
    let s_theta = theta * st + (1.0 - theta) * s;
    let inv_p = (1.0 - theta) / p + theta / pt;
    (s_theta, 1.0 / inv_p)
}

/// Interpolated pair (s_t, p_t) with s_t = t s1 + (1-t) s2 and
/// 1/p_t = t/p1 + (1-t)/p2.
pub fn interpolation_exponents(
    s1: &Rational,
    p1: &ExtReal,
    s2: &Rational,
    p2: &ExtReal,
    theta: &Rational,
) -> Result<(Rational, ExtReal)> {
    if s1.is_negative() || s1 > s2 || *s2 > Rational::one() {
        return Err(Error::Precondition(format!("need 0 <= s1 <= s2 <= 1, got {s1}, {s2}")));
    }
    for p in [p1, p2] {
        if p.lt_q(&Rational::one()) {
            return Err(Error::Precondition(format!("integrability {p} below 1")));
        }
    }
    unit_interval(theta, "theta")?;
    let pt = curve_point(s2, p2, s1, p1, theta);
    Ok((pt.s, pt.p))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum CurveLemma {
    SubcriticalCont,
    SubcriticalCompact,
    Critical,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ConnectingCurve {
    pub q: ExtReal,
    #[serde(serialize_with = "ser_rational")]
    pub theta_tilde: Rational,
    pub range_lo: ExtReal,
    pub range_hi: ExtReal,
    pub hi_inclusive: bool,
    /// Set when s~p~ = sp in the critical case: the point is reached only
    /// in the limit q -> inf, where the curve is the straight segment to (0, inf).
    pub limiting: bool,
}

impl ConnectingCurve {
    pub fn q_in_range(&self) -> bool {
        let above = self.q >= self.range_lo;
        let below = if self.hi_inclusive { self.q <= self.range_hi } else { self.q < self.range_hi };
        above && below
    }
}

/// Finds q and t~ = 1 - s~/s such that the curve from (s,p) to (0,q)
/// passes through (s~,p~) at t~.
pub fn connecting_q(
    source: &SobolevIndex,
    target: &SobolevIndex,
    lemma: CurveLemma,
) -> Result<ConnectingCurve> {
    if source.dim != target.dim {
        return Err(Error::DimensionMismatch(source.dim, target.dim));
    }
    let (s, st, pt) = (&source.s, &target.s, &target.p);
    let p = source
        .p
        .finite()
        .ok_or_else(|| Error::Precondition("connecting curve needs finite p".into()))?;
    if s.is_zero() {
        return Err(Error::Precondition("connecting curve needs s > 0".into()));
    }
    let reg = regime(source);
    let n = int(source.dim as i64);
    let pmax = max_target_p_unchecked(source, st);
    let outside = || Error::Precondition(format!("target {target} outside the region for {lemma:?}"));
    let one = Rational::one();
    let (lo, hi, hi_inclusive) = match lemma {
        CurveLemma::SubcriticalCont => {
            if reg != Regime::Subcritical || st.is_negative() || st > s || pt.lt_q(p) || *pt > pmax {
                return Err(outside());
            }
            (ExtReal::Finite(p.clone()), max_target_p_unchecked(source, &Rational::zero()), true)
        }
        CurveLemma::SubcriticalCompact => {
            if reg != Regime::Subcritical || st.is_negative() || st >= s {
                return Err(outside());
            }
            let low = s * p / (s * p - (p - &one) * st);
            if pt.lt_q(&low) || *pt >= pmax {
                return Err(outside());
            }
            (ExtReal::int(1), max_target_p_unchecked(source, &Rational::zero()), false)
        }
        CurveLemma::Critical => {
            let ok = if st.is_zero() {
                pt.ge_q(p) && !pt.is_infinite()
            } else {
                !st.is_negative() && st <= s && pt.ge_q(p) && pt.le_q(&(&n / st))
            };
            if reg != Regime::Critical || !ok {
                return Err(outside());
            }
            (ExtReal::Finite(p.clone()), ExtReal::Infinity, true)
        }
    };
    let theta_tilde = &one - st / s;
    let (q, limiting) = if st == s || pt.eq_q(p) {
        (ExtReal::Finite(p.clone()), false)
    } else {
        let ptq = pt.finite().expect("finite target integrability");
        let den = s * p - st * ptq;
        if den.is_zero() {
            (ExtReal::Infinity, true)
        } else {
            (ExtReal::Finite(p * ptq * (s - st) / den), false)
        }
    };
    Ok(ConnectingCurve { q, theta_tilde, range_lo: lo, range_hi: hi, hi_inclusive, limiting })
}

/// Float twin of [`connecting_q`] without region checks; returns (q, t~).
pub fn connecting_q_f64(s: f64, p: f64, st: f64, pt: f64) -> (f64, f64) {
    let theta = 1.0 - st / s;
    if st == s || pt == p {
        return (p, theta);
    }
    let den = s * p - st * pt;
    if den == 0.0 {
        (f64::INFINITY, theta)
    } else {
        (p * pt * (s - st) / den, theta)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum ChainMode {
    Continuous,
    Compact,
}

impl std::str::FromStr for ChainMode {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "continuous" => Ok(ChainMode::Continuous),
            "compact" => Ok(ChainMode::Compact),
            _ => Err(Error::Parse(format!("unknown mode {s:?} (expected continuous or compact)"))),
        }
    }
}

/// Classifies the pair (curve(t1), curve(t2)) with the first point as source.
pub fn curve_chain_check(
    source: &SobolevIndex,
    target: &SobolevIndex,
    theta1: &Rational,
    theta2: &Rational,
    domain: DomainKind,
    mode: ChainMode,
) -> Result<EmbeddingVerdict> {
    unit_interval(theta1, "theta1")?;
    unit_interval(theta2, "theta2")?;
    if theta1 > theta2 {
        return Err(Error::Precondition(format!("need theta1 <= theta2, got {theta1} > {theta2}")));
    }
    if mode == ChainMode::Compact && (theta1.is_zero() || theta1 == theta2) {
        return Err(Error::Precondition("compact chains need 0 < theta1 < theta2".into()));
    }
    let a = gamma_curve(source, target, theta1)?;
    let b = gamma_curve(source, target, theta2)?;
    let ia = SobolevIndex::new(source.dim, a.s, a.p)?;
    let ib = SobolevIndex::new(source.dim, b.s, b.p)?;
    match mode {
        ChainMode::Continuous => classify_continuous(&ia, &ib, domain),
        ChainMode::Compact => classify_compact(&ia, &ib, domain),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exponent::{rat, Compactness, Continuity};

    fn idx(n: u32, sp: &str) -> SobolevIndex {
        SobolevIndex::parse(n, sp).unwrap()
    }

    #[test]
    fn curve_examples() {
        let g = gamma_curve(&idx(1, "0.5,2"), &idx(1, "0.25,4"), &rat(1, 2)).unwrap();
        assert_eq!((g.s, g.p), (rat(3, 8), ExtReal::Finite(rat(8, 3))));
        let g = gamma_curve(&idx(1, "0.5,2"), &idx(1, "0.25,4"), &rat(0, 1)).unwrap();
        assert_eq!((g.s, g.p), (rat(1, 2), ExtReal::int(2)));
        let g = gamma_curve(&idx(1, "1,inf"), &idx(1, "0,1"), &rat(1, 2)).unwrap();
        assert_eq!((g.s, g.p), (rat(1, 2), ExtReal::int(2)));
        assert!(gamma_curve(&idx(1, "1,inf"), &idx(1, "0,1"), &rat(3, 2)).is_err());
    }

    #[test]
    fn interpolation_examples() {
        let (s, p) = interpolation_exponents(&rat(1, 5), &ExtReal::int(2), &rat(4, 5), &ExtReal::int(2), &rat(1, 2)).unwrap();
        assert_eq!((s, p), (rat(1, 2), ExtReal::int(2)));
        let (s, p) = interpolation_exponents(&rat(0, 1), &ExtReal::Infinity, &rat(1, 1), &ExtReal::int(1), &rat(1, 2)).unwrap();
        assert_eq!((s, p), (rat(1, 2), ExtReal::int(2)));
        assert!(interpolation_exponents(&rat(1, 2), &ExtReal::int(2), &rat(1, 4), &ExtReal::int(2), &rat(1, 2)).is_err());
    }

    #[test]
    fn connecting_examples() {
        let src = idx(2, "0.5,2");
        let c = connecting_q(&src, &idx(2, "0.25,8/3"), CurveLemma::SubcriticalCont).unwrap();
        assert_eq!((c.q.clone(), c.theta_tilde.clone()), (ExtReal::int(4), rat(1, 2)));
        assert!(c.q_in_range());
        let c = connecting_q(&src, &idx(2, "0.25,2"), CurveLemma::SubcriticalCont).unwrap();
        assert_eq!((c.q, c.theta_tilde), (ExtReal::int(2), rat(1, 2)));
        let c = connecting_q(&src, &src, CurveLemma::SubcriticalCont).unwrap();
        assert_eq!((c.q, c.theta_tilde), (ExtReal::int(2), rat(0, 1)));
        assert!(connecting_q(&src, &idx(2, "0.25,3"), CurveLemma::SubcriticalCont).is_err());
    }

    #[test]
    fn critical_curve_limit() {
        let src = idx(1, "0.5,2");
        let c = connecting_q(&src, &idx(1, "0.25,4"), CurveLemma::Critical).unwrap();
        assert!(c.limiting);
        assert_eq!(c.q, ExtReal::Infinity);
        let g = gamma_curve(&src, &SobolevIndex::new(1, rat(0, 1), c.q).unwrap(), &c.theta_tilde).unwrap();
        assert_eq!((g.s, g.p), (rat(1, 4), ExtReal::int(4)));
    }

    #[test]
    fn chain_examples() {
        let src = idx(2, "0.5,2");
        let tgt = idx(2, "0.25,8/3");
        let v = curve_chain_check(&src, &tgt, &rat(1, 4), &rat(3, 4), DomainKind::WholeSpace, ChainMode::Continuous).unwrap();
        assert_eq!(v.continuous, Continuity::Yes);
        let v = curve_chain_check(&src, &tgt, &rat(0, 1), &rat(1, 1), DomainKind::WholeSpace, ChainMode::Continuous).unwrap();
        assert_eq!(v.continuous, Continuity::Yes);
        assert!(curve_chain_check(&src, &tgt, &rat(0, 1), &rat(1, 2), DomainKind::BoundedLipschitz, ChainMode::Compact).is_err());
        let v = curve_chain_check(&src, &idx(2, "0.25,2.5"), &rat(1, 4), &rat(3, 4), DomainKind::BoundedLipschitz, ChainMode::Compact).unwrap();
        assert_eq!(v.compact, Compactness::Yes);
    }
}
