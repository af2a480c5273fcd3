//! Gamma function and the Gagliardo normalizing constant.

use std::f64::consts::PI;

use crate::error::{Error, Result};

const LANCZOS_G: f64 = 7.0;
const LANCZOS: [f64; 9] = [
    0.999_999_999_999_809_9,
    676.520_368_121_885_1,
    -1_259.139_216_722_402_8,
    771.323_428_777_653_1,
    -176.615_029_162_140_6,
    12.507_343_278_686_905,
    -0.138_571_095_265_720_12,
    9.984_369_578_019_572e-6,
    1.505_632_735_149_311_6e-7,
];

/// Gamma for real arguments, Lanczos with reflection below 1/2.
pub fn gamma(x: f64) -> f64 {
    if x < 0.5 {
        PI / ((PI * x).sin() * gamma(1.0 - x))
    } else {
        let x = x - 1.0;
        let mut a = LANCZOS[0];
        let t = x + LANCZOS_G + 0.5;
        for (i, c) in LANCZOS.iter().enumerate().skip(1) {
            a += c / (x + i as f64);
        }
        // Split the power to stay finite up to x ~ 170.
        let h = t.powf(0.5 * (x + 0.5));
        (2.0 * PI).sqrt() * h * (h * (-t).exp()) * a
    }
}

/// c_{N,s,p} = s 2^{2s-1} Gamma((ps+p+N-2)/2) / (pi^{N/2} Gamma(1-s)).
pub fn normalizing_constant(dim: u32, s: f64, p: f64) -> Result<f64> {
    if !(s > 0.0 && s < 1.0) {
        return Err(Error::Precondition(format!("normalizing constant needs 0 < s < 1, got {s}")));
    }
    if !(p >= 1.0 && p.is_finite()) || dim == 0 {
        return Err(Error::Precondition(format!("normalizing constant needs 1 <= p < inf, got {p}")));
    }
    let n = dim as f64;
    let num = s * 2f64.powf(2.0 * s - 1.0) * gamma((p * s + p + n - 2.0) / 2.0);
    Ok(num / (PI.powf(n / 2.0) * gamma(1.0 - s)))
}

/// Volume of the unit ball in R^N.
pub fn unit_ball_volume(dim: u32) -> f64 {
    let n = dim as f64;
    PI.powf(n / 2.0) / gamma(n / 2.0 + 1.0)
}
