//! Analytic test functions and the rescaling transforms applied to them.
//!
//! Every function is `x -> amp * base(lambda * (x - center))` for one of a
//! few canonical profiles, so rescaled copies stay in closed form and their
//! metadata can be transformed exactly. Points are `[f64; 2]`; the second
//! coordinate is ignored in dimension one.

use std::collections::BTreeMap;
use std::f64::consts::PI;
use std::sync::OnceLock;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::norms::special::gamma;

pub type Point = [f64; 2];

#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(tag = "family", rename_all = "lowercase")]
pub enum Profile {
    /// exp(1 - 1/(1 - |y/R|^2)) inside B_R.
    Bump { radius: f64 },
    /// max(0, 1 - |y|/R), dimension one only.
    Tent { radius: f64 },
    /// exp(-|y|^2 / (2 sigma^2)).
    Gaussian { sigma: f64 },
    /// Bump times cos(k y_1).
    Oscillatory { k: f64, radius: f64 },
    Constant { value: f64 },
    /// slope * y_1.
    Linear { slope: f64 },
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct TestFunction {
    pub label: String,
    pub dim: u32,
    pub profile: Profile,
    pub amplitude: f64,
    pub lambda: f64,
    pub center: Point,
}

/// Largest value of |d/dr bump| for the unit bump.
fn unit_bump_slope() -> f64 {
    static MAX: OnceLock<f64> = OnceLock::new();
    *MAX.get_or_init(|| {
        let mut best = 0.0f64;
        for i in 1..20_000 {
            let r = i as f64 / 20_000.0;
            let t = 1.0 - r * r;
            best = best.max((1.0 - 1.0 / t).exp() * 2.0 * r / (t * t));
        }
        best
    })
}

/// Radius beyond which a unit-width Gaussian is below 1e-20 of its peak.
const GAUSSIAN_CUTOFF: f64 = 9.6;

impl TestFunction {
    fn new(label: impl Into<String>, dim: u32, profile: Profile) -> Self {
        TestFunction { label: label.into(), dim, profile, amplitude: 1.0, lambda: 1.0, center: [0.0, 0.0] }
    }

    fn local(&self, x: &Point) -> Point {
        let y0 = self.lambda * (x[0] - self.center[0]);
        let y1 = if self.dim > 1 { self.lambda * (x[1] - self.center[1]) } else { 0.0 };
        [y0, y1]
    }

    pub fn eval(&self, x: &Point) -> f64 {
        let y = self.local(x);
        self.amplitude * base(&self.profile, &y)
    }

    pub fn eval1(&self, x: f64) -> f64 {
        self.eval(&[x, 0.0])
    }

    pub fn has_gradient(&self) -> bool {
        true
    }

    pub fn gradient(&self, x: &Point) -> Point {
        let y = self.local(x);
        let g = base_gradient(&self.profile, &y);
        let c = self.amplitude * self.lambda;
        [c * g[0], if self.dim > 1 { c * g[1] } else { 0.0 }]
    }

    /// Multiplies the function by `c`.
    pub fn times(&self, c: f64) -> TestFunction {
        TestFunction { amplitude: self.amplitude * c, label: format!("{}*{c}", self.label), ..self.clone() }
    }

    /// Support ball (center, radius) if compact.
    pub fn support(&self) -> Option<(Point, f64)> {
        let r = match self.profile {
            Profile::Bump { radius } | Profile::Tent { radius } | Profile::Oscillatory { radius, .. } => radius,
            _ => return None,
        };
        Some((self.center, r / self.lambda))
    }

    /// Support ball, or for the Gaussian a ball outside which the function is
    /// below 1e-20 of its peak.
    pub fn effective_support(&self) -> Option<(Point, f64)> {
        match self.profile {
            Profile::Gaussian { sigma } => Some((self.center, GAUSSIAN_CUTOFF * sigma / self.lambda)),
            _ => self.support(),
        }
    }

    pub fn lipschitz_constant(&self) -> Option<f64> {
        let c = self.amplitude.abs() * self.lambda;
        let base = match self.profile {
            Profile::Bump { radius } => unit_bump_slope() / radius,
            Profile::Tent { radius } => 1.0 / radius,
            Profile::Gaussian { sigma } => (-0.5f64).exp() / sigma,
            Profile::Oscillatory { k, radius } => unit_bump_slope() / radius + k.abs(),
            Profile::Constant { .. } => 0.0,
            Profile::Linear { slope } => slope.abs(),
        };
        Some(c * base * (1.0 + 1e-9))
    }

    pub fn sup_norm(&self) -> Option<f64> {
        let a = self.amplitude.abs();
        match self.profile {
            Profile::Constant { value } => Some(a * value.abs()),
            Profile::Linear { .. } => None,
            _ => Some(a),
        }
    }

    /// Points in dimension one where the function or its derivative has a
    /// jump in regularity.
    pub fn breakpoints(&self) -> Vec<f64> {
        if self.dim != 1 {
            return Vec::new();
        }
        let c = self.center[0];
        match self.profile {
            Profile::Tent { radius } => {
                let r = radius / self.lambda;
                vec![c - r, c, c + r]
            }
            Profile::Bump { radius } | Profile::Oscillatory { radius, .. } => {
                let r = radius / self.lambda;
                vec![c - r, c + r]
            }
            _ => Vec::new(),
        }
    }

    /// Closed-form ||u||_p for finite p when known.
    pub fn closed_lp(&self, p: f64) -> Option<f64> {
        let n = self.dim as f64;
        let a = self.amplitude.abs();
        let base_pp = match self.profile {
            Profile::Tent { radius } => 2.0 * radius / (p + 1.0),
            Profile::Gaussian { sigma } => (2.0 * PI * sigma * sigma / p).powf(n / 2.0),
            _ => return None,
        };
        Some(a * (base_pp / self.lambda.powf(n)).powf(1.0 / p))
    }

    /// Closed-form ||grad u||_p for finite p when known.
    pub fn closed_grad_lp(&self, p: f64) -> Option<f64> {
        let a = self.amplitude.abs();
        let base_pp = match self.profile {
            Profile::Tent { radius } => 2.0 * radius * radius.powf(-p),
            Profile::Gaussian { sigma } if self.dim == 1 => {
                let alpha = p / (2.0 * sigma * sigma);
                sigma.powf(-2.0 * p) * gamma((p + 1.0) / 2.0) * alpha.powf(-(p + 1.0) / 2.0)
            }
            _ => return None,
        };
        let n = self.dim as f64;
        Some(a * (base_pp * self.lambda.powf(p - n)).powf(1.0 / p))
    }
}

fn bump_value(r2: f64, radius: f64) -> f64 {
    let t = 1.0 - r2 / (radius * radius);
    if t <= 0.0 {
        0.0
    } else {
        (1.0 - 1.0 / t).exp()
    }
}

fn base(profile: &Profile, y: &Point) -> f64 {
    let r2 = y[0] * y[0] + y[1] * y[1];
    match *profile {
        Profile::Bump { radius } => bump_value(r2, radius),
        Profile::Tent { radius } => (1.0 - y[0].abs() / radius).max(0.0),
        Profile::Gaussian { sigma } => (-r2 / (2.0 * sigma * sigma)).exp(),
        Profile::Oscillatory { k, radius } => bump_value(r2, radius) * (k * y[0]).cos(),
        Profile::Constant { value } => value,
        Profile::Linear { slope } => slope * y[0],
    }
}

fn bump_gradient(y: &Point, radius: f64) -> Point {
    let r2 = y[0] * y[0] + y[1] * y[1];
    let t = 1.0 - r2 / (radius * radius);
    if t <= 0.0 {
        return [0.0, 0.0];
    }
    let u = (1.0 - 1.0 / t).exp();
    let c = -2.0 * u / (radius * radius * t * t);
    [c * y[0], c * y[1]]
}

fn base_gradient(profile: &Profile, y: &Point) -> Point {
    match *profile {
        Profile::Bump { radius } => bump_gradient(y, radius),
        Profile::Tent { radius } => {
            if y[0].abs() >= radius || y[0] == 0.0 {
                [0.0, 0.0]
            } else {
                [-y[0].signum() / radius, 0.0]
            }
        }
        Profile::Gaussian { sigma } => {
            let r2 = y[0] * y[0] + y[1] * y[1];
            let c = -(-r2 / (2.0 * sigma * sigma)).exp() / (sigma * sigma);
            [c * y[0], c * y[1]]
        }
        Profile::Oscillatory { k, radius } => {
            let r2 = y[0] * y[0] + y[1] * y[1];
            let b = bump_value(r2, radius);
            let g = bump_gradient(y, radius);
            let (s, c) = (k * y[0]).sin_cos();
            [g[0] * c - b * k * s, g[1] * c]
        }
        Profile::Constant { .. } => [0.0, 0.0],
        Profile::Linear { slope } => [slope, 0.0],
    }
}

fn positive(name: &str, v: f64) -> Result<f64> {
    if v > 0.0 && v.is_finite() {
        Ok(v)
    } else {
        Err(Error::Precondition(format!("{name} must be positive, got {v}")))
    }
}

fn check_dim(dim: u32) -> Result<u32> {
    if dim == 0 || dim > 2 {
        return Err(Error::Unsupported(format!("test functions exist for N in {{1,2}}, got {dim}")));
    }
    Ok(dim)
}

pub fn make_bump(dim: u32, radius: f64) -> Result<TestFunction> {
    Ok(TestFunction::new(format!("bump-N{dim}-R{radius}"), check_dim(dim)?, Profile::Bump { radius: positive("radius", radius)? }))
}

pub fn make_tent(radius: f64) -> Result<TestFunction> {
    Ok(TestFunction::new(format!("tent-R{radius}"), 1, Profile::Tent { radius: positive("radius", radius)? }))
}

pub fn make_gaussian(dim: u32, sigma: f64) -> Result<TestFunction> {
    Ok(TestFunction::new(format!("gaussian-N{dim}-s{sigma}"), check_dim(dim)?, Profile::Gaussian { sigma: positive("sigma", sigma)? }))
}

pub fn make_oscillatory(dim: u32, k: f64, radius: f64) -> Result<TestFunction> {
    Ok(TestFunction::new(
        format!("oscillatory-N{dim}-k{k}-R{radius}"),
        check_dim(dim)?,
        Profile::Oscillatory { k: positive("k", k)?, radius: positive("radius", radius)? },
    ))
}

pub fn make_constant(dim: u32, value: f64) -> Result<TestFunction> {
    Ok(TestFunction::new(format!("constant-N{dim}"), check_dim(dim)?, Profile::Constant { value }))
}

pub fn make_linear(dim: u32, slope: f64) -> Result<TestFunction> {
    Ok(TestFunction::new(format!("linear-N{dim}"), check_dim(dim)?, Profile::Linear { slope }))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ScalingVariant {
    /// v(x) = eps^gamma u(eps^beta x).
    WholeSpace,
    /// v(x) = eps^gamma u(c + (x - x0)/eps) for u supported in B_R(c);
    /// v is supported in B_{eps R}(x0).
    BoundedTranslate,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ScalingSpec {
    pub gamma: f64,
    pub beta: f64,
    pub epsilon: f64,
    pub center: Point,
    pub variant: ScalingVariant,
}

impl ScalingSpec {
    pub fn whole_space(gamma: f64, beta: f64, epsilon: f64) -> Self {
        ScalingSpec { gamma, beta, epsilon, center: [0.0, 0.0], variant: ScalingVariant::WholeSpace }
    }

    pub fn bounded_translate(gamma: f64, epsilon: f64, center: Point) -> Self {
        ScalingSpec { gamma, beta: -1.0, epsilon, center, variant: ScalingVariant::BoundedTranslate }
    }
}

pub fn scale_function(u: &TestFunction, spec: &ScalingSpec) -> Result<TestFunction> {
    let eps = spec.epsilon;
    if !(eps > 0.0 && eps <= 1.0) {
        return Err(Error::Precondition(format!("epsilon must lie in (0,1], got {eps}")));
    }
    let amp = eps.powf(spec.gamma);
    let mut v = u.clone();
    v.amplitude = u.amplitude * amp;
    match spec.variant {
        ScalingVariant::WholeSpace => {
            let k = eps.powf(spec.beta);
            v.lambda = u.lambda * k;
            v.center = [u.center[0] / k, u.center[1] / k];
        }
        ScalingVariant::BoundedTranslate => {
            if u.support().is_none() {
                return Err(Error::Precondition(format!(
                    "bounded-translate scaling needs a compactly supported function, {} is not",
                    u.label
                )));
            }
            v.lambda = u.lambda / eps;
            v.center = spec.center;
        }
    }
    v.label = format!("{}|eps={eps},gamma={},beta={}", u.label, spec.gamma, spec.beta);
    Ok(v)
}

/// One entry of a corpus manifest.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ManifestEntry {
    pub label: String,
    pub family: String,
    #[serde(default)]
    pub parameters: BTreeMap<String, f64>,
}

impl ManifestEntry {
    pub fn build(&self) -> Result<TestFunction> {
        let get = |k: &str, default: Option<f64>| -> Result<f64> {
            self.parameters
                .get(k)
                .copied()
                .or(default)
                .ok_or_else(|| Error::Parse(format!("{}: missing parameter {k}", self.label)))
        };
        let dim = get("dim", Some(1.0))? as u32;
        let mut f = match self.family.as_str() {
            "bump" => make_bump(dim, get("radius", Some(1.0))?)?,
            "tent" => make_tent(get("radius", Some(1.0))?)?,
            "gaussian" => make_gaussian(dim, get("sigma", Some(1.0))?)?,
            "oscillatory" => make_oscillatory(dim, get("k", None)?, get("radius", Some(1.0))?)?,
            "constant" => make_constant(dim, get("value", Some(1.0))?)?,
            "linear" => make_linear(dim, get("slope", Some(1.0))?)?,
            other => return Err(Error::UnknownLabel(format!("family {other}"))),
        };
        f.label = self.label.clone();
        Ok(f)
    }
}

pub fn parse_manifest(json: &str) -> Result<Vec<TestFunction>> {
    let entries: Vec<ManifestEntry> =
        serde_json::from_str(json).map_err(|e| Error::Parse(format!("corpus manifest: {e}")))?;
    entries.iter().map(ManifestEntry::build).collect()
}

/// The built-in corpus, in a fixed order.
pub fn builtin() -> Vec<TestFunction> {
    let mk = |label: &str, f: Result<TestFunction>| {
        let mut f = f.expect("built-in parameters are valid");
        f.label = label.into();
        f
    };
    vec![
        mk("bump", make_bump(1, 1.0)),
        mk("tent", make_tent(1.0)),
        mk("gaussian", make_gaussian(1, 1.0)),
        mk("oscillatory", make_oscillatory(1, 6.0, 1.0)),
        mk("bump2d", make_bump(2, 1.0)),
        mk("gaussian2d", make_gaussian(2, 1.0)),
        mk("constant", make_constant(1, 1.0)),
        mk("linear", make_linear(1, 1.0)),
    ]
}

pub fn by_label(label: &str) -> Result<TestFunction> {
    builtin()
        .into_iter()
        .find(|f| f.label == label)
        .ok_or_else(|| Error::UnknownLabel(label.to_string()))
}
