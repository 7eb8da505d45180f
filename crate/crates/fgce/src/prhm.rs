//! Proportional (reversed) hazard transforms and the gamma-weighted
//! moment route to their measures.
//!
//! Raising a cdf to a power `theta > 0` multiplies the reversed hazard
//! rate by `theta`; raising the survival does the same to the hazard
//! rate. Both transforms act as simple shifts in hazard coordinates, so
//! the precision handles of the base model carry over exactly. On top of
//! the transformed models this module provides the weighted moment
//!
//! `E_theta(alpha) = (1/Gamma(alpha)) int_0^inf R_theta(w) w^{alpha-1} e^{-w} dw`
//!
//! with `R_theta` the inverse of the transformed cdf in reversed-hazard
//! coordinates. The measure of the transformed law telescopes through
//! these moments, which gives an independent evaluation route and a
//! one-step recurrence in the order.

use crate::error::{Error, Result};
use crate::model::{AlphaParam, CdfModel, MeasureReport};
use crate::quad::{adaptive_gk, adaptive_tail, tanh_sinh, QuadratureConfig};
use crate::special::{gamma, ln1mexp};

fn check_theta(theta: f64) -> Result<()> {
    if theta > 0.0 && theta.is_finite() {
        Ok(())
    } else {
        Err(Error::InvalidScale(theta))
    }
}

/// Model with cdf `F^theta` (proportional reversed hazard transform).
pub fn prhm_model(base: &CdfModel, theta: f64) -> Result<CdfModel> {
    check_theta(theta)?;
    let sup = base.support();
    let b = base.clone();
    // ln F through the survival keeps digits where F is close to one
    let ln_f = move |x: f64| (-b.survival(x)).ln_1p();
    let mut out = {
        let ln_f = ln_f.clone();
        CdfModel::new(sup, move |x| (theta * ln_f(x)).exp())
    };
    {
        let ln_f = ln_f.clone();
        out = out.with_survival(move |x| -(theta * ln_f(x)).exp_m1());
    }
    if base.has_pdf() {
        let b = base.clone();
        let ln_f = ln_f.clone();
        out = out.with_pdf(move |x| {
            let tilt = if theta == 1.0 { 0.0 } else { (theta - 1.0) * ln_f(x) };
            theta * tilt.exp() * b.pdf(x).unwrap_or(0.0)
        });
    }
    if base.has_cdf_inverse() {
        let b = base.clone();
        out = out.with_quantile(move |u| {
            b.x_at_cdf((u.ln() / theta).exp()).expect("inverse checked above")
        });
        let b = base.clone();
        out = out.with_inv_rev_hazard(move |w| {
            b.x_at_rev_hazard(w / theta).expect("inverse checked above")
        });
        let b = base.clone();
        out = out.with_inv_hazard(move |w| {
            b.x_at_rev_hazard(-ln1mexp(w) / theta).expect("inverse checked above")
        });
    }
    Ok(out)
}

/// Model with survival `S^theta` (proportional hazard transform).
pub fn phm_model(base: &CdfModel, theta: f64) -> Result<CdfModel> {
    check_theta(theta)?;
    let sup = base.support();
    let b = base.clone();
    let ln_s = move |x: f64| (-b.cdf(x)).ln_1p();
    let mut out = {
        let ln_s = ln_s.clone();
        CdfModel::new(sup, move |x| -(theta * ln_s(x)).exp_m1())
    };
    {
        let ln_s = ln_s.clone();
        out = out.with_survival(move |x| (theta * ln_s(x)).exp());
    }
    if base.has_pdf() {
        let b = base.clone();
        let ln_s = ln_s.clone();
        out = out.with_pdf(move |x| {
            let tilt = if theta == 1.0 { 0.0 } else { (theta - 1.0) * ln_s(x) };
            theta * tilt.exp() * b.pdf(x).unwrap_or(0.0)
        });
    }
    if base.has_survival_inverse() {
        let b = base.clone();
        out = out.with_quantile(move |u| {
            b.x_at_hazard(-(-u).ln_1p() / theta).expect("inverse checked above")
        });
        let b = base.clone();
        out = out.with_inv_hazard(move |w| {
            b.x_at_hazard(w / theta).expect("inverse checked above")
        });
        let b = base.clone();
        out = out.with_inv_rev_hazard(move |w| {
            b.x_at_hazard(-ln1mexp(w) / theta).expect("inverse checked above")
        });
    }
    Ok(out)
}

/// Gamma-weighted inverse moment of the transformed law.
///
/// Prefers the reversed-hazard coordinate route; falls back to an x-space
/// integral when the base has a pdf but no cdf inverse, and reports
/// [`Error::MissingQuantile`] when neither route is available.
pub fn e_theta(base: &CdfModel, theta: f64, alpha: AlphaParam, cfg: &QuadratureConfig) -> Result<f64> {
    check_theta(theta)?;
    let a = alpha.get();
    let w_hi = 50.0 + 10.0 * a;
    if base.has_cdf_inverse() {
        let b = base.clone();
        let g = move |w: f64| {
            let x = b.x_at_rev_hazard(w / theta).unwrap_or(f64::NAN);
            if !x.is_finite() {
                return 0.0;
            }
            x * w.powf(a - 1.0) * (-w).exp()
        };
        let head = tanh_sinh(&g, 0.0, 2.0, cfg)?;
        let tail = adaptive_gk(&g, 2.0, w_hi, cfg)?;
        return Ok((head.value + tail.value) / gamma(a));
    }
    if base.has_pdf() {
        let sup = base.support();
        let b = base.clone();
        let g = move |x: f64| {
            let lf = (-b.survival(x)).ln_1p();
            if !lf.is_finite() {
                return 0.0;
            }
            let f = b.pdf(x).unwrap_or(0.0);
            // w = -theta ln F, dw = -theta f/F dx
            let val = theta * x * (theta * -lf).powf(a - 1.0) * ((theta - 1.0) * lf).exp() * f;
            if val.is_finite() {
                val
            } else {
                0.0
            }
        };
        let res = if sup.is_bounded() {
            tanh_sinh(&g, sup.lower(), sup.upper(), cfg)?
        } else {
            let cut = base.quantile_or_bisect(0.99).max(sup.lower() + 1.0);
            let head = tanh_sinh(&g, sup.lower(), cut, cfg)?;
            let scale = (cut - sup.lower()).max(1.0);
            head.plus(adaptive_tail(&g, cut, scale, cfg)?)
        };
        return Ok(res.value / gamma(a));
    }
    Err(Error::MissingQuantile)
}

/// Measure of the transformed law, by direct quadrature of `F^theta`.
pub fn fgce_prhm(base: &CdfModel, theta: f64, alpha: AlphaParam, cfg: &QuadratureConfig) -> Result<MeasureReport> {
    crate::measure::fgce(&prhm_model(base, theta)?, alpha, cfg)
}

/// Measure of the transformed law through the moment identity
/// `fgce(alpha) = E_theta(alpha) - E_theta(alpha + 1)`.
pub fn fgce_prhm_via_moments(
    base: &CdfModel,
    theta: f64,
    alpha: AlphaParam,
    cfg: &QuadratureConfig,
) -> Result<MeasureReport> {
    let a = alpha.get();
    let lhs = e_theta(base, theta, alpha, cfg)?;
    let rhs = e_theta(base, theta, AlphaParam::new(a + 1.0)?, cfg)?;
    let value = lhs - rhs;
    if !value.is_finite() {
        return Err(Error::DivergentIntegral);
    }
    Ok(MeasureReport {
        value,
        method: crate::model::Method::QuadratureU,
        err_estimate: f64::NAN,
    })
}

/// One step of the order recurrence: given the measure at order `alpha`,
/// returns it at `alpha + 1` using two weighted moments.
pub fn recurrence_step(
    base: &CdfModel,
    theta: f64,
    alpha: AlphaParam,
    fgce_at_alpha: f64,
    cfg: &QuadratureConfig,
) -> Result<f64> {
    let a = alpha.get();
    let ea = e_theta(base, theta, alpha, cfg)?;
    let ea2 = e_theta(base, theta, AlphaParam::new(a + 2.0)?, cfg)?;
    Ok(ea - ea2 - fgce_at_alpha)
}

/// Telescoped `n`-step form of the recurrence, reaching order `alpha + n`
/// from order `alpha` with four weighted moments in total.
pub fn recurrence_n(
    base: &CdfModel,
    theta: f64,
    alpha: AlphaParam,
    fgce_at_alpha: f64,
    n: u32,
    cfg: &QuadratureConfig,
) -> Result<f64> {
    if n == 0 {
        return Ok(fgce_at_alpha);
    }
    let a = alpha.get();
    let sign = if n % 2 == 0 { 1.0 } else { -1.0 };
    let ean = e_theta(base, theta, AlphaParam::new(a + n as f64)?, cfg)?;
    let ean1 = e_theta(base, theta, AlphaParam::new(a + n as f64 + 1.0)?, cfg)?;
    let ea = e_theta(base, theta, alpha, cfg)?;
    let ea1 = e_theta(base, theta, AlphaParam::new(a + 1.0)?, cfg)?;
    Ok(sign * fgce_at_alpha + ean - ean1 - sign * (ea - ea1))
}

/// Past-life measure of the transformed law at inspection time `t`.
pub fn dyn_fgce_prhm(
    base: &CdfModel,
    theta: f64,
    alpha: AlphaParam,
    t: f64,
    cfg: &QuadratureConfig,
) -> Result<MeasureReport> {
    crate::dynamic::dyn_fgce(&prhm_model(base, theta)?, alpha, t, cfg)
}

/// Residual-life survival measure of the hazard-transformed law.
pub fn dyn_fgcre_phm(
    base: &CdfModel,
    theta: f64,
    alpha: AlphaParam,
    t: f64,
    cfg: &QuadratureConfig,
) -> Result<MeasureReport> {
    crate::dynamic::dyn_fgcre(&phm_model(base, theta)?, alpha, t, cfg)
}
