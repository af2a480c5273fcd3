//! Continuous and compact embedding verdicts for W^{s,p} -> W^{s~,p~}.

use std::collections::BTreeSet;
use std::fmt;

use num_traits::{One, Zero};
use serde::{Serialize, Serializer};

use super::{int, max_target_p_unchecked, regime, DomainKind, ExtReal, Rational, Regime, SobolevIndex};
use crate::error::{Error, Result};

/// Name of the result that settles a verdict.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Tag {
    Thm1_1,
    Thm1_2,
    Thm1_3,
    Cor1_4,
    Thm1_5,
    Cor1_6,
    Thm1_7,
    Thm1_8,
    Thm1_9,
    Thm1_10,
    Thm1_11,
    Lemma2_3,
    Lemma2_4,
    Lemma2_5,
    Lemma2_6,
    Lemma2_7,
    Prop2_8,
    Prop2_9,
    Prop2_10,
    Prop2_11,
    Prop2_12,
    Prop2_13,
    Prop2_14,
    Prop2_15,
    Prop2_16,
    None,
}

impl Tag {
    pub const ALL: [Tag; 26] = [
        Tag::Thm1_1,
        Tag::Thm1_2,
        Tag::Thm1_3,
        Tag::Cor1_4,
        Tag::Thm1_5,
        Tag::Cor1_6,
        Tag::Thm1_7,
        Tag::Thm1_8,
        Tag::Thm1_9,
        Tag::Thm1_10,
        Tag::Thm1_11,
        Tag::Lemma2_3,
        Tag::Lemma2_4,
        Tag::Lemma2_5,
        Tag::Lemma2_6,
        Tag::Lemma2_7,
        Tag::Prop2_8,
        Tag::Prop2_9,
        Tag::Prop2_10,
        Tag::Prop2_11,
        Tag::Prop2_12,
        Tag::Prop2_13,
        Tag::Prop2_14,
        Tag::Prop2_15,
        Tag::Prop2_16,
        Tag::None,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            Tag::Thm1_1 => "Thm-1.1",
            Tag::Thm1_2 => "Thm-1.2",
            Tag::Thm1_3 => "Thm-1.3",
            Tag::Cor1_4 => "Cor-1.4",
            Tag::Thm1_5 => "Thm-1.5",
            Tag::Cor1_6 => "Cor-1.6",
            Tag::Thm1_7 => "Thm-1.7",
            Tag::Thm1_8 => "Thm-1.8",
            Tag::Thm1_9 => "Thm-1.9",
            Tag::Thm1_10 => "Thm-1.10",
            Tag::Thm1_11 => "Thm-1.11",
            Tag::Lemma2_3 => "Lemma-2.3",
            Tag::Lemma2_4 => "Lemma-2.4",
            Tag::Lemma2_5 => "Lemma-2.5",
            Tag::Lemma2_6 => "Lemma-2.6",
            Tag::Lemma2_7 => "Lemma-2.7",
            Tag::Prop2_8 => "Prop-2.8",
            Tag::Prop2_9 => "Prop-2.9",
            Tag::Prop2_10 => "Prop-2.10",
            Tag::Prop2_11 => "Prop-2.11",
            Tag::Prop2_12 => "Prop-2.12",
            Tag::Prop2_13 => "Prop-2.13",
            Tag::Prop2_14 => "Prop-2.14",
            Tag::Prop2_15 => "Prop-2.15",
            Tag::Prop2_16 => "Prop-2.16",
            Tag::None => "none",
        }
    }
}

impl fmt::Display for Tag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl std::str::FromStr for Tag {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        Tag::ALL
            .into_iter()
            .find(|t| t.as_str().eq_ignore_ascii_case(s))
            .ok_or_else(|| Error::Parse(format!("unknown tag {s:?}")))
    }
}

impl Serialize for Tag {
    fn serialize<S: Serializer>(&self, ser: S) -> std::result::Result<S::Ok, S::Error> {
        ser.serialize_str(self.as_str())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Continuity {
    Yes,
    No,
    Unsupported,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Compactness {
    Yes,
    No,
    NotApplicable,
    Unsupported,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub enum BoundaryFlag {
    #[serde(rename = "target-p-max")]
    TargetPMax,
    #[serde(rename = "critical-curve-sp=N")]
    CriticalCurve,
    #[serde(rename = "holder-line")]
    HolderLine,
}

impl BoundaryFlag {
    pub fn as_str(self) -> &'static str {
        match self {
            BoundaryFlag::TargetPMax => "target-p-max",
            BoundaryFlag::CriticalCurve => "critical-curve-sp=N",
            BoundaryFlag::HolderLine => "holder-line",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct EmbeddingVerdict {
    pub continuous: Continuity,
    pub compact: Compactness,
    /// Tag answering the question that was asked (continuity or compactness).
    pub justification: Tag,
    pub continuous_tag: Tag,
    pub compact_tag: Tag,
    /// The optimality statement a non-embedding lemma is used for.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub optimality: Option<Tag>,
    pub boundary_flags: BTreeSet<BoundaryFlag>,
    pub trivial: bool,
    pub regime: Regime,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
}

pub fn classify_continuous(
    source: &SobolevIndex,
    target: &SobolevIndex,
    domain: DomainKind,
) -> Result<EmbeddingVerdict> {
    let mut v = classify(source, target, domain)?;
    v.justification = v.continuous_tag;
    Ok(v)
}

pub fn classify_compact(
    source: &SobolevIndex,
    target: &SobolevIndex,
    domain: DomainKind,
) -> Result<EmbeddingVerdict> {
    let mut v = classify(source, target, domain)?;
    if v.compact != Compactness::NotApplicable {
        v.justification = v.compact_tag;
    }
    Ok(v)
}

struct Ctx<'a> {
    src: &'a SobolevIndex,
    s: &'a Rational,
    p: &'a ExtReal,
    st: &'a Rational,
    pt: &'a ExtReal,
    n: Rational,
    regime: Regime,
    bounded: bool,
}

impl Ctx<'_> {
    fn pmax(&self) -> ExtReal {
        max_target_p_unchecked(self.src, self.st)
    }

    /// N / s~ with N/0 = inf.
    fn n_over_st(&self) -> ExtReal {
        if self.st.is_zero() {
            ExtReal::Infinity
        } else {
            ExtReal::Finite(&self.n / self.st)
        }
    }

    fn sigma(&self) -> Rational {
        self.src.holder_exponent()
    }

    fn s_eq_p_eq_one(&self) -> bool {
        self.s.is_one() && self.p.eq_q(&Rational::one())
    }

    fn theorem(&self) -> Tag {
        match (self.regime, self.bounded) {
            (Regime::Subcritical, false) => Tag::Thm1_1,
            (Regime::Subcritical, true) => Tag::Thm1_2,
            (Regime::Critical, false) => Tag::Thm1_5,
            (Regime::Critical, true) => Tag::Thm1_7,
            (_, false) => Tag::Thm1_9,
            (_, true) => Tag::Thm1_10,
        }
    }

    fn optimality(&self) -> Tag {
        match (self.regime, self.bounded) {
            (Regime::Subcritical, false) => Tag::Prop2_8,
            (Regime::Subcritical, true) => Tag::Prop2_9,
            (Regime::Critical, false) => Tag::Prop2_11,
            (Regime::Critical, true) => Tag::Prop2_12,
            (_, false) => Tag::Prop2_14,
            (_, true) => Tag::Prop2_15,
        }
    }

    fn compact_theorem(&self) -> Tag {
        match self.regime {
            Regime::Subcritical => Tag::Cor1_4,
            Regime::Critical => Tag::Thm1_8,
            _ => Tag::Thm1_11,
        }
    }

    fn compact_optimality(&self) -> Tag {
        match self.regime {
            Regime::Subcritical => Tag::Prop2_10,
            Regime::Critical => Tag::Prop2_13,
            _ => Tag::Prop2_16,
        }
    }

    fn scaling_lemma(&self) -> Tag {
        match self.regime {
            Regime::Subcritical => Tag::Lemma2_4,
            Regime::Critical => Tag::Lemma2_5,
            _ => Tag::Lemma2_6,
        }
    }

    /// The region of the governing continuity theorem, read literally except
    /// that the Hölder block of a p = inf source on a bounded domain leaves out
    /// s~ = s with finite p~ (covered by the optimality statement instead).
    fn in_region(&self) -> bool {
        let (s, p, st, pt) = (self.s, self.p, self.st, self.pt);
        let one = Rational::one();
        match (self.regime, self.bounded) {
            (Regime::Subcritical, false) => st <= s && pt >= p && *pt <= self.pmax(),
            (Regime::Subcritical, true) => st < s && pt.ge_q(&one) && *pt <= self.pmax(),
            (Regime::Critical, false) => {
                let upper = *pt <= self.n_over_st();
                (st.is_zero() && pt >= p && !pt.is_infinite()) || (!st.is_zero() && st <= s && pt >= p && upper)
            }
            (Regime::Critical, true) => {
                (st.is_zero() && !pt.is_infinite())
                    || (!st.is_zero() && st < s && *pt <= self.n_over_st())
            }
            (_, false) => {
                let sigma = self.sigma();
                (*st <= sigma && pt >= p) || (*st > sigma && st <= s && pt >= p && *pt <= self.pmax())
            }
            (_, true) => {
                let sigma = self.sigma();
                (*st <= sigma && (st < s || pt.is_infinite()))
                    || (*st > sigma && st < s && *pt <= self.pmax())
            }
        }
    }

    /// Which non-embedding statement covers the point, if any.
    fn complement(&self) -> Option<Tag> {
        let (s, p, st, pt) = (self.s, self.p, self.st, self.pt);
        if s.is_zero() {
            return None;
        }
        let lemma = self.scaling_lemma();
        if !self.bounded {
            if pt < p {
                return Some(if p.is_infinite() { Tag::Prop2_14 } else { Tag::Lemma2_3 });
            }
            if st > s {
                return Some(lemma);
            }
        } else {
            let footnote = st.is_one() && s.is_one();
            if st >= s && pt < p && !footnote {
                return Some(self.optimality());
            }
            if st > s && pt >= p {
                return Some(lemma);
            }
            if st > s || pt < p {
                return None;
            }
        }
        // Remaining: s~ <= s and p~ >= p.
        match self.regime {
            Regime::Subcritical => (*pt > self.pmax()).then_some(lemma),
            Regime::Critical => {
                if !st.is_zero() {
                    (*pt > self.n_over_st()).then_some(lemma)
                } else if pt.is_infinite() {
                    if self.src.dim >= 2 {
                        Some(lemma)
                    } else if p.eq_q(&Rational::one()) {
                        None
                    } else {
                        Some(self.optimality())
                    }
                } else {
                    None
                }
            }
            _ => (*st > self.sigma() && *pt > self.pmax()).then_some(lemma),
        }
    }

    fn in_compact_region(&self) -> bool {
        let (s, st, pt) = (self.s, self.st, self.pt);
        match self.regime {
            Regime::Subcritical => st < s && *pt < self.pmax(),
            Regime::Critical => {
                (st.is_zero() && !pt.is_infinite())
                    || (!st.is_zero() && st < s && *pt < self.n_over_st())
            }
            _ => {
                let sigma = self.sigma();
                let corner = *st == sigma && pt.is_infinite();
                (*st <= sigma && st < s && !corner) || (*st > sigma && st < s && *pt < self.pmax())
            }
        }
    }

    fn flags(&self) -> BTreeSet<BoundaryFlag> {
        let mut out = BTreeSet::new();
        let (s, p, st, pt) = (self.s, self.p, self.st, self.pt);
        if st > s {
            return out;
        }
        match self.regime {
            Regime::Subcritical => {
                if *pt == self.pmax() {
                    out.insert(BoundaryFlag::TargetPMax);
                }
            }
            Regime::Critical => {
                if let Some(q) = pt.finite() {
                    if !st.is_zero() && st * q == self.n {
                        out.insert(BoundaryFlag::CriticalCurve);
                    }
                }
            }
            Regime::Supercritical => {
                let sigma = self.sigma();
                if *st == sigma {
                    out.insert(BoundaryFlag::HolderLine);
                    if pt.is_infinite() && !p.is_infinite() {
                        out.insert(BoundaryFlag::TargetPMax);
                    }
                } else if *st > sigma && !pt.is_infinite() && *pt == self.pmax() {
                    out.insert(BoundaryFlag::TargetPMax);
                }
            }
            Regime::Unsupported => {}
        }
        out
    }
}

/// Full verdict: continuity and, on bounded domains, compactness.
pub fn classify(
    source: &SobolevIndex,
    target: &SobolevIndex,
    domain: DomainKind,
) -> Result<EmbeddingVerdict> {
    if source.dim != target.dim {
        return Err(Error::DimensionMismatch(source.dim, target.dim));
    }
    let reg = regime(source);
    let bounded = domain == DomainKind::BoundedLipschitz;
    let na = if bounded { Compactness::Unsupported } else { Compactness::NotApplicable };
    let mut v = EmbeddingVerdict {
        continuous: Continuity::Unsupported,
        compact: na,
        justification: Tag::None,
        continuous_tag: Tag::None,
        compact_tag: Tag::None,
        optimality: None,
        boundary_flags: BTreeSet::new(),
        trivial: false,
        regime: reg,
        note: None,
    };
    if reg == Regime::Unsupported {
        v.note = Some("source has s = 0 and p = inf, which no embedding result covers".into());
        return Ok(v);
    }
    let c = Ctx {
        src: source,
        s: &source.s,
        p: &source.p,
        st: &target.s,
        pt: &target.p,
        n: int(source.dim as i64),
        regime: reg,
        bounded,
    };
    v.boundary_flags = c.flags();

    let hypotheses = !c.s.is_zero() && !c.s_eq_p_eq_one();
    let trivial = c.st == c.s && c.pt == c.p;
    let footnote = bounded && c.s.is_one() && c.st.is_one() && *c.pt <= *c.p;
    let w11 = c.src.dim == 1 && c.s_eq_p_eq_one() && c.st.is_zero() && c.pt.is_infinite();
    let horizontal = bounded && c.s_eq_p_eq_one() && c.st < c.s && c.pt == c.p;

    // Continuity.
    if trivial {
        v.continuous = Continuity::Yes;
        v.continuous_tag = c.theorem();
        v.trivial = true;
        v.note = Some("identical spaces".into());
    } else if footnote {
        v.continuous = Continuity::Yes;
        v.continuous_tag = c.theorem();
        v.note = Some("s~ = s = 1 with p~ <= p on a bounded domain".into());
    } else if w11 {
        v.continuous = Continuity::Yes;
        v.continuous_tag = c.theorem();
        v.note = Some("W^{1,1} embeds in L^inf in dimension one".into());
    } else if horizontal {
        v.continuous = Continuity::Yes;
        v.continuous_tag = Tag::Lemma2_7;
    } else if hypotheses && c.in_region() {
        v.continuous = Continuity::Yes;
        v.continuous_tag = c.theorem();
    } else if let Some(tag) = c.complement() {
        v.continuous = Continuity::No;
        v.continuous_tag = tag;
        if matches!(tag, Tag::Lemma2_3 | Tag::Lemma2_4 | Tag::Lemma2_5 | Tag::Lemma2_6) {
            v.optimality = Some(c.optimality());
        }
    } else {
        v.note = Some(if c.s.is_zero() {
            "source with s = 0: only the identity embedding is covered".into()
        } else if c.s_eq_p_eq_one() {
            "the governing theorem requires s != p; no stated special case applies".into()
        } else {
            "point not covered by any stated result".into()
        });
        return Ok(v);
    }

    if !bounded {
        return Ok(v);
    }

    // Compactness on bounded domains.
    match v.continuous {
        Continuity::No => {
            v.compact = Compactness::No;
            v.compact_tag = v.continuous_tag;
        }
        Continuity::Unsupported => {}
        Continuity::Yes => {
            if trivial || footnote {
                v.compact = Compactness::No;
                v.compact_tag = c.compact_optimality();
            } else if horizontal {
                v.compact = Compactness::Yes;
                v.compact_tag = Tag::Lemma2_7;
            } else if w11 {
                v.compact = Compactness::Unsupported;
            } else if c.in_compact_region() {
                v.compact = Compactness::Yes;
                v.compact_tag = c.compact_theorem();
            } else {
                v.compact = Compactness::No;
                v.compact_tag = c.compact_optimality();
            }
        }
    }
    Ok(v)
}

/// Membership of a target in the admissible region and in the union of the
/// non-embedding statements, evaluated independently of each other.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct Coverage {
    pub in_region: bool,
    pub in_complement: bool,
}

pub fn coverage(source: &SobolevIndex, target: &SobolevIndex, domain: DomainKind) -> Result<Coverage> {
    if source.dim != target.dim {
        return Err(Error::DimensionMismatch(source.dim, target.dim));
    }
    let reg = regime(source);
    if reg == Regime::Unsupported {
        return Ok(Coverage { in_region: false, in_complement: false });
    }
    let bounded = domain == DomainKind::BoundedLipschitz;
    let c = Ctx {
        src: source,
        s: &source.s,
        p: &source.p,
        st: &target.s,
        pt: &target.p,
        n: int(source.dim as i64),
        regime: reg,
        bounded,
    };
    let hypotheses = !c.s.is_zero() && !c.s_eq_p_eq_one();
    let trivial = c.st == c.s && c.pt == c.p;
    let footnote = bounded && c.s.is_one() && c.st.is_one() && *c.pt <= *c.p;
    let w11 = c.src.dim == 1 && c.s_eq_p_eq_one() && c.st.is_zero() && c.pt.is_infinite();
    let horizontal = bounded && c.s_eq_p_eq_one() && c.st < c.s && c.pt == c.p;
    Ok(Coverage {
        in_region: trivial || footnote || w11 || horizontal || (hypotheses && c.in_region()),
        in_complement: c.complement().is_some(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn idx(n: u32, sp: &str) -> SobolevIndex {
        SobolevIndex::parse(n, sp).unwrap()
    }

    fn cont(n: u32, src: &str, tgt: &str, d: DomainKind) -> EmbeddingVerdict {
        classify_continuous(&idx(n, src), &idx(n, tgt), d).unwrap()
    }

    #[test]
    fn subcritical_examples() {
        let rn = DomainKind::WholeSpace;
        let bd = DomainKind::BoundedLipschitz;
        let v = cont(2, "0.5,2", "0.25,2.5", rn);
        assert_eq!((v.continuous, v.justification), (Continuity::Yes, Tag::Thm1_1));
        assert_eq!(v.compact, Compactness::NotApplicable);
        let v = cont(2, "0.5,2", "0.25,3", rn);
        assert_eq!((v.continuous, v.justification), (Continuity::No, Tag::Lemma2_4));
        assert_eq!(v.optimality, Some(Tag::Prop2_8));
        let v = cont(2, "0.5,2", "0.25,1.5", bd);
        assert_eq!((v.continuous, v.justification), (Continuity::Yes, Tag::Thm1_2));
        let v = cont(2, "0.5,2", "0.25,1.5", rn);
        assert_eq!((v.continuous, v.justification), (Continuity::No, Tag::Lemma2_3));
    }

    #[test]
    fn compact_examples() {
        let bd = DomainKind::BoundedLipschitz;
        let v = classify_compact(&idx(2, "0.5,2"), &idx(2, "0.25,8/3"), bd).unwrap();
        assert_eq!(v.continuous, Continuity::Yes);
        assert_eq!(v.compact, Compactness::No);
        assert!(v.boundary_flags.contains(&BoundaryFlag::TargetPMax));
        let v = classify_compact(&idx(2, "0.5,2"), &idx(2, "0.25,2.5"), bd).unwrap();
        assert_eq!((v.compact, v.justification), (Compactness::Yes, Tag::Cor1_4));
        let v = classify_compact(&idx(2, "0.5,2"), &idx(2, "0.25,2.5"), DomainKind::WholeSpace)
            .unwrap();
        assert_eq!(v.compact, Compactness::NotApplicable);
    }

    #[test]
    fn special_cases() {
        let rn = DomainKind::WholeSpace;
        let v = cont(1, "1,1", "0,inf", rn);
        assert_eq!(v.continuous, Continuity::Yes);
        let v = cont(2, "1,2", "0,inf", rn);
        assert_eq!((v.continuous, v.justification), (Continuity::No, Tag::Lemma2_5));
        let v = cont(1, "0.5,2", "0,inf", rn);
        assert_eq!((v.continuous, v.justification), (Continuity::No, Tag::Prop2_11));
        let v = cont(2, "1,1", "0.5,1.2", rn);
        assert_eq!(v.continuous, Continuity::Unsupported);
        let v = cont(2, "1,1", "0.5,1.5", rn);
        assert_eq!((v.continuous, v.justification), (Continuity::No, Tag::Lemma2_4));
        let v = cont(2, "0.5,2", "0.5,2", rn);
        assert!(v.trivial);
        let v = classify(&idx(2, "0,inf"), &idx(2, "0,inf"), rn).unwrap();
        assert_eq!(v.regime, Regime::Unsupported);
        assert_eq!(v.continuous, Continuity::Unsupported);
        assert!(classify(&idx(2, "0.5,2"), &idx(1, "0.5,2"), rn).is_err());
    }

    #[test]
    fn horizontal_compactness_without_s_ne_p() {
        let bd = DomainKind::BoundedLipschitz;
        let v = classify_compact(&idx(2, "1,1"), &idx(2, "0.5,1"), bd).unwrap();
        assert_eq!((v.compact, v.justification), (Compactness::Yes, Tag::Lemma2_7));
    }
}
