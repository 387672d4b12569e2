//! Explicit constants of the curvature estimates, each with the formula
//! string recorded in reports.

use std::f64::consts::E;

use crate::error::{Error, Result};
use crate::gaussian::volume_growth_constant;
use crate::vecops::unit_ball_volume;

pub const V0_FORMULA: &str = "exp(-1/4)*(4*pi)^(n/2)*lambda0";

/// C(n, λ₀, a) = (4/a²) V₀ e^{3a²/4} in ∫_{B_{R-2a}}|A|² ≤ C Rⁿ e^{-aR/2}.
pub fn decay_constant(n: usize, lambda0: f64, a: f64) -> f64 {
    4.0 / (a * a) * volume_growth_constant(n, lambda0) * (0.75 * a * a).exp()
}
pub const DECAY_FORMULA: &str = "(4/a^2)*V0*exp(3*a^2/4)";

/// C' = 1/8 + 2 C_meas².
pub fn mean_value_constant(c_meas: f64) -> f64 {
    0.125 + 2.0 * c_meas * c_meas
}
pub const MEAN_VALUE_FORMULA: &str = "1/8 + 2*C_meas^2";

/// ε = ωₙ 2^{-n} e^{-2n}.
pub fn choi_schoen_epsilon(n: usize) -> f64 {
    unit_ball_volume(n) * 2f64.powi(-(n as i32)) * (-2.0 * n as f64).exp()
}
pub const CHOI_SCHOEN_FORMULA: &str = "omega_n*2^(-n)*exp(-2n)";

/// D = 2/(n+1) - q² - aq.
pub fn ssy_d(n: usize, q: f64, a: f64) -> f64 {
    2.0 / (n as f64 + 1.0) - q * q - a * q
}

/// Default a = (√(2/(n+1)) - q)/2.
pub fn ssy_default_a(n: usize, q: f64) -> f64 {
    ((2.0 / (n as f64 + 1.0)).sqrt() - q) / 2.0
}

/// C(n,q,a) = max{2 + 2(1+q)²(1+q/a)/D, n(1+q)²/((n+1)D)}.
pub fn ssy_constant(n: usize, q: f64, a: f64) -> Result<f64> {
    if !(q >= 0.0) || !(a > 0.0) {
        return Err(Error::InvalidParameter(format!(
            "need q >= 0 and a > 0, got q={q}, a={a}"
        )));
    }
    let d = ssy_d(n, q, a);
    if !(d > 0.0) {
        return Err(Error::InvalidParameter(format!(
            "D = 2/(n+1) - q^2 - a*q = {d} must be positive"
        )));
    }
    let nf = n as f64;
    let q1 = (1.0 + q) * (1.0 + q);
    Ok((2.0 + 2.0 * q1 * (1.0 + q / a) / d).max(nf * q1 / ((nf + 1.0) * d)))
}
pub const SSY_FORMULA: &str = "max(2 + 2*(1+q)^2*(1+q/a)/D, n*(1+q)^2/((n+1)*D)), D = 2/(n+1) - q^2 - a*q";

pub const KAPPA1: f64 = E;

/// e^{9/4}.
pub fn kappa2() -> f64 {
    (2.25f64).exp()
}

/// C₂ = 4 κ₁ 2ⁿ V₀.
pub fn lemma_p2(n: usize, lambda0: f64) -> f64 {
    4.0 * KAPPA1 * 2f64.powi(n as i32) * volume_growth_constant(n, lambda0)
}
pub const LEMMA_P2_FORMULA: &str = "4*e*2^n*V0";

/// C₄ = 5 κ₁ κ₂ C_ssy(n, 0, a₀) 4ⁿ V₀.
pub fn lemma_p4(n: usize, lambda0: f64) -> Result<f64> {
    let c = ssy_constant(n, 0.0, ssy_default_a(n, 0.0))?;
    Ok(5.0 * KAPPA1 * kappa2() * c * 4f64.powi(n as i32) * volume_growth_constant(n, lambda0))
}
pub const LEMMA_P4_FORMULA: &str = "5*e*exp(9/4)*C_ssy(n,q=0)*4^n*V0";

/// Hölder interpolation C_p = C₂^{(4-p)/2} C₄^{(p-2)/2}.
pub fn lemma_p(n: usize, p: f64, lambda0: f64) -> Result<f64> {
    if !(2.0..=4.0).contains(&p) {
        return Err(Error::InvalidParameter(format!("p must lie in [2, 4], got {p}")));
    }
    let c2 = lemma_p2(n, lambda0);
    let c4 = lemma_p4(n, lambda0)?;
    Ok(c2.powf((4.0 - p) / 2.0) * c4.powf((p - 2.0) / 2.0))
}
pub const LEMMA_P_FORMULA: &str = "C2^((4-p)/2)*C4^((p-2)/2)";

/// C = e³ V₀ in ∫|A|²η² ≤ (C/k) r₀^{n-2}.
pub fn log_cutoff_constant(n: usize, lambda0: f64) -> f64 {
    E.powi(3) * volume_growth_constant(n, lambda0)
}
pub const LOG_CUTOFF_FORMULA: &str = "exp(3)*V0";

/// θ = min(1, 1/|x₀|).
pub fn theta(x0_norm: f64) -> f64 {
    if x0_norm <= 1.0 {
        1.0
    } else {
        1.0 / x0_norm
    }
}
