//! Verdict grids over the (s~, 1/p~) unit square.

use num_traits::{One, Zero};
use serde::Serialize;

use super::curves::ser_rational;
use super::{
    classify, int, to_f64, ChainMode, DomainKind, EmbeddingVerdict, ExtReal, Rational, Regime,
    SobolevIndex,
};
use crate::error::{Error, Result};

/// Grid in (s~, 1/p~) coordinates; endpoints included.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct GridSpec {
    pub ns: u32,
    pub np: u32,
    #[serde(serialize_with = "ser_rational")]
    pub s_lo: Rational,
    #[serde(serialize_with = "ser_rational")]
    pub s_hi: Rational,
    #[serde(serialize_with = "ser_rational")]
    pub inv_p_lo: Rational,
    #[serde(serialize_with = "ser_rational")]
    pub inv_p_hi: Rational,
}

impl GridSpec {
    /// The full unit square.
    pub fn unit(ns: u32, np: u32) -> Self {
        GridSpec {
            ns,
            np,
            s_lo: Rational::zero(),
            s_hi: Rational::one(),
            inv_p_lo: Rational::zero(),
            inv_p_hi: Rational::one(),
        }
    }

    fn coord(lo: &Rational, hi: &Rational, i: u32, n: u32) -> Rational {
        if n <= 1 {
            lo.clone()
        } else {
            lo + (hi - lo) * int(i as i64) / int(n as i64 - 1)
        }
    }

    pub fn s_at(&self, i: u32) -> Rational {
        Self::coord(&self.s_lo, &self.s_hi, i, self.ns)
    }

    pub fn inv_p_at(&self, j: u32) -> Rational {
        Self::coord(&self.inv_p_lo, &self.inv_p_hi, j, self.np)
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct RegionCell {
    #[serde(serialize_with = "ser_rational")]
    pub s_tilde: Rational,
    #[serde(serialize_with = "ser_rational")]
    pub inv_p_tilde: Rational,
    pub p_tilde: ExtReal,
    pub verdict: EmbeddingVerdict,
}

#[derive(Clone, Debug, Serialize)]
pub struct Polyline {
    pub name: String,
    /// Points in (s~, 1/p~) coordinates.
    pub points: Vec<(f64, f64)>,
}

#[derive(Clone, Debug, Serialize)]
pub struct RegionSample {
    pub source: String,
    pub domain: DomainKind,
    pub mode: ChainMode,
    pub cells: Vec<RegionCell>,
    pub curves: Vec<Polyline>,
}

pub fn region_sample(
    source: &SobolevIndex,
    domain: DomainKind,
    mode: ChainMode,
    grid: &GridSpec,
) -> Result<RegionSample> {
    if grid.ns == 0 || grid.np == 0 {
        return Err(Error::Precondition("grid resolution must be positive".into()));
    }
    let zero = Rational::zero();
    let one = Rational::one();
    let in_unit = |q: &Rational| *q >= zero && *q <= one;
    for q in [&grid.s_lo, &grid.s_hi, &grid.inv_p_lo, &grid.inv_p_hi] {
        if !in_unit(q) {
            return Err(Error::Precondition(format!("grid bound {q} outside [0,1]")));
        }
    }
    let mut cells = Vec::with_capacity((grid.ns * grid.np) as usize);
    for j in 0..grid.np {
        let inv = grid.inv_p_at(j);
        let pt = ExtReal::Finite(inv.clone()).recip();
        for i in 0..grid.ns {
            let st = grid.s_at(i);
            let target = SobolevIndex::new(source.dim, st.clone(), pt.clone())?;
            let mut verdict = classify(source, &target, domain)?;
            verdict.justification = match mode {
                ChainMode::Continuous => verdict.continuous_tag,
                ChainMode::Compact => verdict.compact_tag,
            };
            cells.push(RegionCell { s_tilde: st, inv_p_tilde: inv.clone(), p_tilde: pt.clone(), verdict });
        }
    }
    Ok(RegionSample {
        source: source.to_string(),
        domain,
        mode,
        cells,
        curves: boundary_curves(source),
    })
}

fn boundary_curves(source: &SobolevIndex) -> Vec<Polyline> {
    const SAMPLES: usize = 64;
    let n = source.dim as f64;
    let s = to_f64(&source.s);
    let inv_p = 1.0 / source.p.to_f64();
    let mut curves = vec![
        Polyline { name: "s-tilde=s".into(), points: vec![(s, 0.0), (s, 1.0)] },
        Polyline { name: "p-tilde=p".into(), points: vec![(0.0, inv_p), (1.0, inv_p)] },
    ];
    let line = |name: &str, lo: f64, hi: f64, f: &dyn Fn(f64) -> f64| {
        let pts = (0..=SAMPLES)
            .map(|k| {
                let x = lo + (hi - lo) * k as f64 / SAMPLES as f64;
                (x, f(x).clamp(0.0, 1.0))
            })
            .collect();
        Polyline { name: name.into(), points: pts }
    };
    match super::regime(source) {
        Regime::Subcritical => {
            curves.push(line("target-p-max", 0.0, s, &|x| inv_p - (s - x) / n));
        }
        Regime::Critical => {
            curves.push(line("critical-curve-sp=N", 0.0, s, &|x| x / n));
        }
        Regime::Supercritical => {
            let sigma = to_f64(&source.holder_exponent()).max(0.0);
            curves.push(line("target-p-max", sigma, s, &|x| inv_p - (s - x) / n));
            curves.push(Polyline { name: "holder-line".into(), points: vec![(sigma, 0.0), (sigma, 1.0)] });
        }
        Regime::Unsupported => {}
    }
    curves
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exponent::Continuity;

    #[test]
    fn single_cell_at_source() {
        let src = SobolevIndex::parse(2, "0.5,2").unwrap();
        let g = GridSpec {
            ns: 1,
            np: 1,
            s_lo: src.s.clone(),
            s_hi: src.s.clone(),
            inv_p_lo: crate::exponent::rat(1, 2),
            inv_p_hi: crate::exponent::rat(1, 2),
        };
        let r = region_sample(&src, DomainKind::WholeSpace, ChainMode::Continuous, &g).unwrap();
        assert_eq!(r.cells.len(), 1);
        assert_eq!(r.cells[0].verdict.continuous, Continuity::Yes);
    }

    #[test]
    fn grid_size() {
        let src = SobolevIndex::parse(2, "0.5,2").unwrap();
        let r = region_sample(&src, DomainKind::WholeSpace, ChainMode::Continuous, &GridSpec::unit(2, 2)).unwrap();
        assert_eq!(r.cells.len(), 4);
        assert!(r.cells.iter().any(|c| c.p_tilde.is_infinite()));
    }
}
