//! Machine-readable output: canonical JSON, CSV tables and SVG region plots.
//!
//! Floats are written with 12 significant digits and non-finite values as the
//! strings "inf", "-inf" and "nan", so identical inputs give identical bytes.

use std::fmt::Write as _;

use serde::{Serialize, Serializer};
use serde_json::{Number, Value};

use crate::error::{Error, Result};
use crate::exponent::{ChainMode, Compactness, Continuity, GridSpec, RegionCell, RegionSample};
use crate::lab::ExperimentReport;

/// `x` rounded to 12 significant digits.
pub fn round12(x: f64) -> f64 {
    if x == 0.0 || !x.is_finite() {
        return x;
    }
    format!("{x:.11e}").parse().unwrap_or(x)
}

/// Text form used in CSV cells and file names.
pub fn fmt_num(x: f64) -> String {
    if x.is_nan() {
        "nan".into()
    } else if x.is_infinite() {
        if x > 0.0 { "inf".into() } else { "-inf".into() }
    } else {
        let r = round12(x);
        if r == 0.0 { "0".into() } else { r.to_string() }
    }
}

/// JSON value of a float: a rounded number, or a string when not finite.
pub fn num(x: f64) -> Value {
    if x.is_finite() {
        Number::from_f64(round12(x)).map_or(Value::Null, Value::Number)
    } else {
        Value::String(fmt_num(x))
    }
}

pub(crate) fn ser_f64<S: Serializer>(x: &f64, ser: S) -> std::result::Result<S::Ok, S::Error> {
    num(*x).serialize(ser)
}

pub(crate) fn ser_f64_vec<S: Serializer>(v: &[f64], ser: S) -> std::result::Result<S::Ok, S::Error> {
    Value::Array(v.iter().map(|x| num(*x)).collect()).serialize(ser)
}

pub(crate) fn ser_f64_opt<S: Serializer>(x: &Option<f64>, ser: S) -> std::result::Result<S::Ok, S::Error> {
    x.map_or(Value::Null, num).serialize(ser)
}

fn canonicalize(v: &mut Value) {
    match v {
        Value::Number(n) => {
            if let (None, None, Some(x)) = (n.as_i64(), n.as_u64(), n.as_f64()) {
                *v = num(x);
            }
        }
        Value::Array(items) => items.iter_mut().for_each(canonicalize),
        Value::Object(map) => map.values_mut().for_each(canonicalize),
        _ => {}
    }
}

/// Pretty JSON with sorted keys and rounded floats, newline terminated.
pub fn to_json<T: Serialize>(value: &T) -> Result<String> {
    let mut v = serde_json::to_value(value).map_err(|e| Error::Parse(e.to_string()))?;
    canonicalize(&mut v);
    let mut out = serde_json::to_string_pretty(&v).map_err(|e| Error::Parse(e.to_string()))?;
    out.push('\n');
    Ok(out)
}

fn compact_json(v: &Value) -> String {
    let mut v = v.clone();
    canonicalize(&mut v);
    v.to_string()
}

fn csv_string(write: impl FnOnce(&mut csv::Writer<Vec<u8>>) -> csv::Result<()>) -> Result<String> {
    let mut w = csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(Vec::new());
    write(&mut w).map_err(|e| Error::Io(e.into()))?;
    let bytes = w.into_inner().map_err(|e| Error::Io(e.into_error()))?;
    String::from_utf8(bytes).map_err(|e| Error::Parse(e.to_string()))
}

fn opt(x: Option<f64>) -> String {
    x.map(fmt_num).unwrap_or_default()
}

/// One row per experiment.
pub fn summary_csv(reports: &[ExperimentReport]) -> Result<String> {
    csv_string(|w| {
        w.write_record([
            "kind",
            "name",
            "params",
            "predicted_exponent",
            "fitted_exponent",
            "constant",
            "deviation",
            "threshold",
            "pass",
        ])?;
        for r in reports {
            w.write_record([
                r.kind.as_str().to_string(),
                r.name.clone(),
                compact_json(&r.inputs),
                opt(r.predicted_exponent),
                opt(r.fitted_exponent),
                opt(r.constant),
                fmt_num(r.deviation),
                fmt_num(r.threshold),
                r.pass.to_string(),
            ])?;
        }
        Ok(())
    })
}

fn continuity_str(c: Continuity) -> &'static str {
    match c {
        Continuity::Yes => "yes",
        Continuity::No => "no",
        Continuity::Unsupported => "unsupported",
    }
}

fn compactness_str(c: Compactness) -> &'static str {
    match c {
        Compactness::Yes => "yes",
        Compactness::No => "no",
        Compactness::NotApplicable => "not-applicable",
        Compactness::Unsupported => "unsupported",
    }
}

/// One row per grid point, rows ordered by 1/p~ then s~.
pub fn region_csv(sample: &RegionSample) -> Result<String> {
    csv_string(|w| {
        w.write_record([
            "s_tilde",
            "inv_p_tilde",
            "p_tilde",
            "continuous",
            "compact",
            "justification",
            "boundary_flags",
            "trivial",
        ])?;
        for c in &sample.cells {
            let flags: Vec<&str> = c.verdict.boundary_flags.iter().map(|f| f.as_str()).collect();
            w.write_record([
                c.s_tilde.to_string(),
                c.inv_p_tilde.to_string(),
                c.p_tilde.to_string(),
                continuity_str(c.verdict.continuous).into(),
                compactness_str(c.verdict.compact).into(),
                c.verdict.justification.as_str().into(),
                flags.join(";"),
                c.verdict.trivial.to_string(),
            ])?;
        }
        Ok(())
    })
}

const PLOT: f64 = 400.0;
const MARGIN: f64 = 50.0;

fn px(x: f64) -> f64 {
    MARGIN + PLOT * x
}

fn py(y: f64) -> f64 {
    MARGIN + PLOT * (1.0 - y)
}

fn admissible(c: &RegionCell, mode: ChainMode) -> Option<bool> {
    match mode {
        ChainMode::Continuous => match c.verdict.continuous {
            Continuity::Yes => Some(true),
            Continuity::No => Some(false),
            Continuity::Unsupported => None,
        },
        ChainMode::Compact => match c.verdict.compact {
            Compactness::Yes => Some(true),
            Compactness::No | Compactness::NotApplicable => Some(false),
            Compactness::Unsupported => None,
        },
    }
}

fn curve_color(name: &str) -> &'static str {
    match name {
        "s-tilde=s" | "p-tilde=p" => "#555555",
        "holder-line" => "#2b8cbe",
        _ => "#d7301f",
    }
}

/// Unit-square plot with s~ horizontal and 1/p~ vertical: admissible cells
/// shaded, unsupported cells grey, boundary curves as polylines.
pub fn region_svg(sample: &RegionSample, grid: &GridSpec) -> String {
    let step = |lo: f64, hi: f64, n: u32| if n > 1 { (hi - lo) / (n - 1) as f64 } else { 1.0 };
    let to = crate::exponent::to_f64;
    let ds = step(to(&grid.s_lo), to(&grid.s_hi), grid.ns);
    let dp = step(to(&grid.inv_p_lo), to(&grid.inv_p_hi), grid.np);
    let size = PLOT + 2.0 * MARGIN;
    let mut out = String::new();
    let _ = writeln!(out, r#"<?xml version="1.0" encoding="UTF-8"?>"#);
    let _ = writeln!(
        out,
        r#"<svg xmlns="http://www.w3.org/2000/svg" version="1.1" width="{size}" height="{size}" viewBox="0 0 {size} {size}">"#
    );
    let _ = writeln!(out, "<title>source {} {:?} {:?}</title>", sample.source, sample.domain, sample.mode);
    let _ = writeln!(out, r##"<rect x="0" y="0" width="{size}" height="{size}" fill="#ffffff"/>"##);
    let _ = writeln!(out, r#"<g id="cells" stroke="none">"#);
    for c in &sample.cells {
        let fill = match admissible(c, sample.mode) {
            Some(true) => "#9ecae1",
            Some(false) => continue,
            None => "#d9d9d9",
        };
        let (x, y) = (to(&c.s_tilde), to(&c.inv_p_tilde));
        let x0 = (x - ds / 2.0).clamp(0.0, 1.0);
        let x1 = (x + ds / 2.0).clamp(0.0, 1.0);
        let y0 = (y - dp / 2.0).clamp(0.0, 1.0);
        let y1 = (y + dp / 2.0).clamp(0.0, 1.0);
        let _ = writeln!(
            out,
            r#"<rect x="{:.3}" y="{:.3}" width="{:.3}" height="{:.3}" fill="{fill}"/>"#,
            px(x0),
            py(y1),
            PLOT * (x1 - x0),
            PLOT * (y1 - y0)
        );
    }
    let _ = writeln!(out, "</g>");
    let _ = writeln!(out, r#"<g id="curves" fill="none" stroke-width="2">"#);
    for curve in &sample.curves {
        let pts: Vec<String> = curve.points.iter().map(|(x, y)| format!("{:.3},{:.3}", px(*x), py(*y))).collect();
        let _ = writeln!(
            out,
            r#"<polyline data-name="{}" stroke="{}" points="{}"/>"#,
            curve.name,
            curve_color(&curve.name),
            pts.join(" ")
        );
    }
    let _ = writeln!(out, "</g>");
    let _ = writeln!(
        out,
        r##"<rect x="{MARGIN}" y="{MARGIN}" width="{PLOT}" height="{PLOT}" fill="none" stroke="#000000"/>"##
    );
    let _ = writeln!(out, r##"<g id="axes" font-family="sans-serif" font-size="12" fill="#000000">"##);
    for t in [0.0, 0.5, 1.0] {
        let _ = writeln!(out, r#"<text x="{:.3}" y="{:.3}" text-anchor="middle">{t}</text>"#, px(t), py(0.0) + 16.0);
        let _ = writeln!(out, r#"<text x="{:.3}" y="{:.3}" text-anchor="end">{t}</text>"#, px(0.0) - 6.0, py(t) + 4.0);
    }
    let _ = writeln!(out, r#"<text x="{:.3}" y="{:.3}" text-anchor="middle">s~</text>"#, px(0.5), py(0.0) + 36.0);
    let _ = writeln!(
        out,
        r#"<text x="{:.3}" y="{:.3}" text-anchor="middle" transform="rotate(-90 {:.3} {:.3})">1/p~</text>"#,
        px(0.0) - 34.0,
        py(0.5),
        px(0.0) - 34.0,
        py(0.5)
    );
    let _ = writeln!(out, "</g>");
    let _ = writeln!(out, "</svg>");
    out
}
