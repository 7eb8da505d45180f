//! The fractional measures.
//!
//! For a nonnegative variable with cdf `F` supported on `(l0, l)` and order
//! `alpha > 0`, the two primary quantities are
//!
//! * [`fgce`], `(1/Gamma(alpha+1)) int F(x) (-ln F(x))^alpha dx`, weighting
//!   the lower part of the distribution, and
//! * [`fgcre`], the same construction on the survival function
//!   `(1/Gamma(alpha+1)) int S(x) (-ln S(x))^alpha dx`, weighting the tail.
//!
//! At `alpha = 1` both reduce to the classical cumulative entropies. The
//! module also provides the normalized form, the `alpha -> 0` limit, the
//! quantile-space and expectation representations used as independent
//! cross-checks, differential entropy, affine transforms, and the mean.
//!
//! # Integration strategy
//!
//! The integrand `phi(F) = F(-ln F)^alpha` carries mass arbitrarily deep
//! into the region where `F` is within one ulp of 0 or 1, so plain
//! quadrature over x cannot reach tight tolerances. Each integral is split
//! into a central region (adaptive Gauss-Kronrod between the points holding
//! cdf mass `eps = 1e-6` on each side) plus endpoint windows evaluated in
//! transformed coordinates: mass space `v = F` near the lower end and
//! reversed-hazard space `w = -ln F` near the upper end (mirrored for the
//! survival version). In those coordinates every node is analytically exact
//! whenever the model provides a quantile or tail inverse. Models without
//! any invertible handle fall back to endpoint shrinking, with the skipped
//! sliver bounded by the integrand's monotone envelope and charged to
//! `err_estimate`.

use crate::error::{Error, Result};
use crate::model::{AlphaParam, CdfModel, MeasureReport, Method};
use crate::quad::{adaptive_gk, adaptive_tail, tanh_sinh, QuadResult, QuadratureConfig};
use crate::special::gamma;

/// Cdf mass inside each analytic endpoint window.
pub(crate) const MASS_WINDOW: f64 = 1e-6;

/// The measure integrand in probability space: `v (-ln v)^alpha` on (0, 1),
/// zero outside.
pub(crate) fn phi(alpha: f64, v: f64) -> f64 {
    if v <= 0.0 || v >= 1.0 {
        return 0.0;
    }
    v * (-v.ln()).powf(alpha)
}

// Global maximum of phi(alpha, .), attained at v = e^{-alpha}.
fn phi_max(alpha: f64) -> f64 {
    (-alpha).exp() * alpha.powf(alpha)
}

// Window near the v -> 0 end of a probability coordinate:
// int_0^eps phi(v) / f(x(v)) dv. Divergence (an effective power-law
// exponent at or below -1, e.g. heavy tails below the convergence order)
// is caught by the endpoint probe inside tanh_sinh.
fn v_window<X: Fn(f64) -> Option<f64>>(
    m: &CdfModel,
    alpha: f64,
    eps: f64,
    x_of_v: X,
    cfg: &QuadratureConfig,
) -> Result<QuadResult> {
    let h = |v: f64| -> f64 {
        let Some(x) = x_of_v(v) else { return 0.0 };
        let Some(d) = m.pdf(x) else { return 0.0 };
        if !(d > 0.0) || !d.is_finite() {
            return 0.0;
        }
        let val = phi(alpha, v) / d;
        if val.is_finite() {
            val
        } else {
            0.0
        }
    };
    tanh_sinh(h, 0.0, eps, cfg)
}

// Window near the v -> 1 end, written in w = -ln v space:
// int_0^{w_eps} e^{-2w} w^alpha / f(x(w)) dw.
fn w_window<X: Fn(f64) -> Option<f64>>(
    m: &CdfModel,
    alpha: f64,
    w_eps: f64,
    x_of_w: X,
    cfg: &QuadratureConfig,
) -> Result<QuadResult> {
    let h = |w: f64| -> f64 {
        let Some(x) = x_of_w(w) else { return 0.0 };
        let Some(d) = m.pdf(x) else { return 0.0 };
        if !(d > 0.0) || !d.is_finite() {
            return 0.0;
        }
        let val = (-2.0 * w).exp() * w.powf(alpha) / d;
        if val.is_finite() {
            val
        } else {
            0.0
        }
    };
    tanh_sinh(h, 0.0, w_eps, cfg)
}

// Unnormalized int phi(F(x)) dx over the support.
fn fgce_raw(m: &CdfModel, alpha: f64, cfg: &QuadratureConfig) -> Result<QuadResult> {
    let sup = m.support();
    let eps = MASS_WINDOW;
    let w_eps = -(-eps).ln_1p(); // -ln(1 - eps)
    let jx = |x: f64| phi(alpha, m.cdf(x));
    let mut total = QuadResult::zero();

    // lower end: F -> 0
    let x_lo = if m.has_cdf_inverse() {
        let x_lo = m.x_at_cdf(eps).expect("cdf inverse checked");
        if m.has_pdf() {
            total = total.plus(v_window(m, alpha, eps, |v| m.x_at_cdf(v), cfg)?);
        } else {
            total = total.plus(tanh_sinh(jx, sup.lower(), x_lo, cfg)?);
        }
        x_lo
    } else {
        let span = effective_span(m);
        let x_lo = sup.lower() + cfg.endpoint_shrink * span;
        let vlo = m.cdf(x_lo);
        let env = if vlo <= (-alpha).exp() { phi(alpha, vlo) } else { phi_max(alpha) };
        total.err += (x_lo - sup.lower()) * env;
        x_lo
    };

    // upper end: F -> 1, w = -ln F -> 0
    let (x_hi, upper) = if m.has_pdf() && m.has_cdf_inverse() {
        let x_hi = m.x_at_rev_hazard(w_eps).expect("cdf inverse checked");
        let piece = w_window(m, alpha, w_eps, |w| m.x_at_rev_hazard(w), cfg)?;
        (x_hi, piece)
    } else if sup.is_bounded() {
        if m.has_cdf_inverse() {
            let x_hi = m.x_at_rev_hazard(w_eps).expect("cdf inverse checked");
            (x_hi, tanh_sinh(jx, x_hi, sup.upper(), cfg)?)
        } else {
            let span = effective_span(m);
            let x_hi = sup.upper() - cfg.endpoint_shrink * span;
            let vhi = m.cdf(x_hi);
            let env = if vhi >= (-alpha).exp() { phi(alpha, vhi) } else { phi_max(alpha) };
            let mut piece = QuadResult::zero();
            piece.err = (sup.upper() - x_hi) * env;
            (x_hi, piece)
        }
    } else {
        // unbounded and not fully invertible: integrate the visible tail,
        // with the octave probe guarding against divergence
        let x_hi = m.quantile_or_bisect(1.0 - eps);
        let scale = (x_hi - sup.lower()).max(1e-12);
        (x_hi, adaptive_tail(jx, x_hi, scale, cfg)?)
    };
    total = total.plus(upper);

    if x_lo < x_hi {
        total = total.plus(adaptive_gk(jx, x_lo, x_hi, cfg)?);
    } else if sup.is_bounded() {
        // windows collided (tiny support): one graded pass over everything
        total = tanh_sinh(jx, sup.lower(), sup.upper(), cfg)?;
    }
    if !total.value.is_finite() {
        return Err(Error::DivergentIntegral);
    }
    Ok(total)
}

// Unnormalized int phi(S(x)) dx over the support.
fn fgcre_raw(m: &CdfModel, alpha: f64, cfg: &QuadratureConfig) -> Result<QuadResult> {
    let sup = m.support();
    let eps = MASS_WINDOW;
    let w_eps = -(-eps).ln_1p();
    let jx = |x: f64| phi(alpha, m.survival(x));
    let mut total = QuadResult::zero();

    // lower end: S -> 1, w = -ln S -> 0
    let x_lo = if m.has_pdf() && m.has_survival_inverse() {
        let x_lo = m.x_at_hazard(w_eps).expect("survival inverse checked");
        total = total.plus(w_window(m, alpha, w_eps, |w| m.x_at_hazard(w), cfg)?);
        x_lo
    } else if m.has_survival_inverse() {
        let x_lo = m.x_at_hazard(w_eps).expect("survival inverse checked");
        total = total.plus(tanh_sinh(jx, sup.lower(), x_lo, cfg)?);
        x_lo
    } else {
        let span = effective_span(m);
        let x_lo = sup.lower() + cfg.endpoint_shrink * span;
        let vlo = m.survival(x_lo);
        let env = if vlo >= (-alpha).exp() { phi(alpha, vlo) } else { phi_max(alpha) };
        total.err += (x_lo - sup.lower()) * env;
        x_lo
    };

    // upper end: S -> 0
    let (x_hi, upper) = if m.has_pdf() && m.has_survival_inverse() {
        let x_hi = m.x_at_survival(eps).expect("survival inverse checked");
        let piece = v_window(m, alpha, eps, |v| m.x_at_survival(v), cfg)?;
        (x_hi, piece)
    } else if sup.is_bounded() {
        let x_hi = m.quantile_or_bisect(1.0 - eps);
        (x_hi, tanh_sinh(jx, x_hi, sup.upper(), cfg)?)
    } else {
        let x_hi = m.quantile_or_bisect(1.0 - eps);
        let scale = (x_hi - sup.lower()).max(1e-12);
        (x_hi, adaptive_tail(jx, x_hi, scale, cfg)?)
    };
    total = total.plus(upper);

    if x_lo < x_hi {
        total = total.plus(adaptive_gk(jx, x_lo, x_hi, cfg)?);
    } else if sup.is_bounded() {
        total = tanh_sinh(jx, sup.lower(), sup.upper(), cfg)?;
    }
    if !total.value.is_finite() {
        return Err(Error::DivergentIntegral);
    }
    Ok(total)
}

// Characteristic width used by shrink fallbacks and probes.
fn effective_span(m: &CdfModel) -> f64 {
    let sup = m.support();
    if sup.is_bounded() {
        sup.len()
    } else {
        (m.quantile_or_bisect(0.5) - sup.lower()).max(1e-12)
    }
}

/// Fractional generalized cumulative entropy of the model at order `alpha`.
pub fn fgce(m: &CdfModel, alpha: AlphaParam, cfg: &QuadratureConfig) -> Result<MeasureReport> {
    cfg.check()?;
    m.probe()?;
    let a = alpha.get();
    let raw = fgce_raw(m, a, cfg)?;
    let g = gamma(a + 1.0);
    Ok(MeasureReport {
        value: raw.value / g,
        method: Method::QuadratureX,
        err_estimate: raw.err / g,
    })
}

/// Fractional cumulative residual entropy (the survival-side analogue).
pub fn fgcre(m: &CdfModel, alpha: AlphaParam, cfg: &QuadratureConfig) -> Result<MeasureReport> {
    cfg.check()?;
    m.probe()?;
    let a = alpha.get();
    let raw = fgcre_raw(m, a, cfg)?;
    let g = gamma(a + 1.0);
    Ok(MeasureReport {
        value: raw.value / g,
        method: Method::QuadratureX,
        err_estimate: raw.err / g,
    })
}

/// Classical cumulative entropy, the order-one specialization of [`fgce`].
pub fn cumulative_entropy(m: &CdfModel, cfg: &QuadratureConfig) -> Result<MeasureReport> {
    fgce(m, AlphaParam::one(), cfg)
}

/// Classical cumulative residual entropy, order-one [`fgcre`].
pub fn cumulative_residual_entropy(m: &CdfModel, cfg: &QuadratureConfig) -> Result<MeasureReport> {
    fgcre(m, AlphaParam::one(), cfg)
}

/// Normalized measure: `fgce(alpha) / fgce(1)^alpha`.
///
/// Scale-free: invariant under `X -> cX` for `c > 0`.
pub fn nfgce(m: &CdfModel, alpha: AlphaParam, cfg: &QuadratureConfig) -> Result<MeasureReport> {
    let num = fgce(m, alpha, cfg)?;
    let den = fgce(m, AlphaParam::one(), cfg)?;
    if !(den.value > 1e-12) {
        return Err(Error::ZeroDenominator("order-one measure vanishes"));
    }
    let a = alpha.get();
    let denom = den.value.powf(a);
    let value = num.value / denom;
    let err = num.err_estimate / denom
        + a * num.value.abs() * den.err_estimate / (den.value * denom);
    Ok(MeasureReport {
        value,
        method: num.method,
        err_estimate: err,
    })
}

/// The `alpha -> 0+` limit of [`fgce`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Alpha0Limit {
    /// Bounded support: the limit is `upper - mean`.
    Finite(f64),
    /// Unbounded support: the measure grows without bound as `alpha -> 0`.
    Infinite,
}

/// Limit of the measure as the order tends to zero: `upper - E[X]` on
/// bounded supports, infinite otherwise.
pub fn fgce_alpha0_limit(m: &CdfModel, cfg: &QuadratureConfig) -> Result<Alpha0Limit> {
    let sup = m.support();
    if !sup.is_bounded() {
        return Ok(Alpha0Limit::Infinite);
    }
    let mean = model_mean(m, cfg)?;
    Ok(Alpha0Limit::Finite(sup.upper() - mean))
}

/// Mean of the model: the hint if present, otherwise
/// `lower + int S(x) dx` by quadrature. Heavy tails without a finite mean
/// surface as [`Error::DivergentIntegral`].
pub fn model_mean(m: &CdfModel, cfg: &QuadratureConfig) -> Result<f64> {
    if let Some(mu) = m.mean_hint() {
        return Ok(mu);
    }
    let sup = m.support();
    let s = |x: f64| m.survival(x);
    let r = if sup.is_bounded() {
        adaptive_gk(s, sup.lower(), sup.upper(), cfg)?
    } else {
        let mid = m.quantile_or_bisect(0.9);
        let head = adaptive_gk(s, sup.lower(), mid, cfg)?;
        let scale = (mid - sup.lower()).max(1e-12);
        head.plus(adaptive_tail(s, mid, scale, cfg)?)
    };
    Ok(sup.lower() + r.value)
}

/// The integrated reversed-hazard tail
/// `xi_alpha(x) = (1/Gamma(alpha+1)) int_x^upper (-ln F(t))^alpha dt`.
///
/// Its expectation under the model equals [`fgce`]; its derivative is
/// `-(-ln F(x))^alpha / Gamma(alpha+1)`.
pub fn xi_alpha(m: &CdfModel, alpha: AlphaParam, x: f64, cfg: &QuadratureConfig) -> Result<f64> {
    cfg.check()?;
    let sup = m.support();
    if !(x >= sup.lower()) || !(x < sup.upper()) {
        return Err(Error::OutOfDomain(format!(
            "xi_alpha needs lower <= x < upper, got x={x}"
        )));
    }
    let a = alpha.get();
    let g = gamma(a + 1.0);
    if m.has_pdf() && m.has_cdf_inverse() {
        // substituting w = -ln F(t) turns the integral into
        // int_0^{-ln F(x)} w^alpha e^{-w} / f(x(w)) dw, exact in the tail
        let fx = m.cdf(x);
        let w_top = if fx > 0.0 { (-fx.ln()).min(746.0) } else { 746.0 };
        let h = |w: f64| -> f64 {
            let Some(t) = m.x_at_rev_hazard(w) else { return 0.0 };
            let Some(d) = m.pdf(t) else { return 0.0 };
            if !(d > 0.0) || !d.is_finite() {
                return 0.0;
            }
            let val = w.powf(a) * (-w).exp() / d;
            if val.is_finite() {
                val
            } else {
                0.0
            }
        };
        let r = if w_top <= 4.0 {
            tanh_sinh(h, 0.0, w_top, cfg)?
        } else {
            tanh_sinh(h, 0.0, 4.0, cfg)?.plus(adaptive_gk(h, 4.0, w_top, cfg)?)
        };
        Ok(r.value / g)
    } else {
        let k = |t: f64| {
            let v = m.cdf(t);
            if v <= 0.0 || v >= 1.0 {
                0.0
            } else {
                (-v.ln()).powf(a)
            }
        };
        let r = if sup.is_bounded() {
            adaptive_gk(k, x, sup.upper(), cfg)?
        } else {
            let mid = m.quantile_or_bisect(1.0 - MASS_WINDOW).max(x + 1.0);
            let head = adaptive_gk(k, x, mid, cfg)?;
            head.plus(adaptive_tail(k, mid, (mid - x).max(1.0), cfg)?)
        };
        Ok(r.value / g)
    }
}

/// Computes [`fgce`] through the identity `CE_alpha = E[xi_alpha(X)]`,
/// a genuinely different route used to cross-check the direct quadrature.
pub fn fgce_via_xi_expectation(
    m: &CdfModel,
    alpha: AlphaParam,
    cfg: &QuadratureConfig,
) -> Result<MeasureReport> {
    cfg.check()?;
    if !m.has_pdf() {
        return Err(Error::MissingPdf);
    }
    let eps = MASS_WINDOW;
    let w_eps = -(-eps).ln_1p();
    let xi_at = |x: f64| xi_alpha(m, alpha, x, cfg).unwrap_or(f64::NAN);
    let r = if m.has_cdf_inverse() {
        // E[xi(X)] = int_0^1 xi(x(u)) du, split as windows + center
        let lo = tanh_sinh(
            |u: f64| m.x_at_cdf(u).map(&xi_at).unwrap_or(0.0),
            0.0,
            eps,
            cfg,
        )?;
        let mid = adaptive_gk(
            |u: f64| m.x_at_cdf(u).map(&xi_at).unwrap_or(0.0),
            eps,
            1.0 - eps,
            cfg,
        )?;
        let hi = tanh_sinh(
            |w: f64| {
                m.x_at_rev_hazard(w)
                    .map(|x| xi_at(x) * (-w).exp())
                    .unwrap_or(0.0)
            },
            0.0,
            w_eps,
            cfg,
        )?;
        lo.plus(mid).plus(hi)
    } else {
        let sup = m.support();
        let integrand = |x: f64| {
            let d = m.pdf(x).unwrap_or(0.0);
            if d > 0.0 {
                xi_at(x) * d
            } else {
                0.0
            }
        };
        let x_lo = m.quantile_or_bisect(eps);
        let x_hi = m.quantile_or_bisect(1.0 - eps);
        let mut r = adaptive_gk(integrand, x_lo, x_hi, cfg)?;
        if sup.is_bounded() {
            r = r.plus(adaptive_gk(integrand, sup.lower(), x_lo, cfg)?);
            r = r.plus(adaptive_gk(integrand, x_hi, sup.upper(), cfg)?);
        } else {
            r = r.plus(adaptive_gk(integrand, sup.lower(), x_lo, cfg)?);
            r = r.plus(adaptive_tail(integrand, x_hi, (x_hi - x_lo).max(1.0), cfg)?);
        }
        r
    };
    if !r.value.is_finite() {
        return Err(Error::DivergentIntegral);
    }
    Ok(MeasureReport {
        value: r.value,
        method: Method::QuadratureX,
        err_estimate: r.err,
    })
}

/// Computes [`fgce`] in quantile space:
/// `(1/Gamma(alpha+1)) int_0^1 u (-ln u)^alpha / f(F^{-1}(u)) du`.
///
/// Requires both a density and a quantile. Tagged
/// [`Method::QuadratureU`], the second independent route.
pub fn fgce_quantile_form(
    m: &CdfModel,
    alpha: AlphaParam,
    cfg: &QuadratureConfig,
) -> Result<MeasureReport> {
    cfg.check()?;
    if !m.has_pdf() {
        return Err(Error::MissingPdf);
    }
    if !m.has_quantile() {
        return Err(Error::MissingQuantile);
    }
    let a = alpha.get();
    let eps = MASS_WINDOW;
    let w_eps = -(-eps).ln_1p();
    let h = |u: f64| -> f64 {
        let Some(x) = m.quantile(u) else { return 0.0 };
        let Some(d) = m.pdf(x) else { return 0.0 };
        if !(d > 0.0) || !d.is_finite() {
            return 0.0;
        }
        let val = phi(a, u) / d;
        if val.is_finite() {
            val
        } else {
            0.0
        }
    };
    let lo = v_window(m, a, eps, |v| m.x_at_cdf(v), cfg)?;
    let mid = adaptive_gk(h, eps, 1.0 - eps, cfg)?;
    let hi = w_window(m, a, w_eps, |w| m.x_at_rev_hazard(w), cfg)?;
    let r = lo.plus(mid).plus(hi);
    let g = gamma(a + 1.0);
    Ok(MeasureReport {
        value: r.value / g,
        method: Method::QuadratureU,
        err_estimate: r.err / g,
    })
}

/// Differential entropy `-int f ln f`, used by the entropy-based lower
/// bound on the measure.
pub fn differential_entropy(m: &CdfModel, cfg: &QuadratureConfig) -> Result<f64> {
    cfg.check()?;
    if !m.has_pdf() {
        return Err(Error::MissingPdf);
    }
    let eps = MASS_WINDOW;
    let w_eps = -(-eps).ln_1p();
    if m.has_cdf_inverse() {
        // H = -int_0^1 ln f(Q(u)) du
        let lnf_at = |x: f64| -> f64 {
            let d = m.pdf(x).unwrap_or(0.0);
            if d > 0.0 && d.is_finite() {
                d.ln()
            } else {
                0.0
            }
        };
        let lo = tanh_sinh(|u: f64| m.x_at_cdf(u).map(&lnf_at).unwrap_or(0.0), 0.0, eps, cfg)?;
        let mid = adaptive_gk(
            |u: f64| m.x_at_cdf(u).map(&lnf_at).unwrap_or(0.0),
            eps,
            1.0 - eps,
            cfg,
        )?;
        let hi = tanh_sinh(
            |w: f64| {
                m.x_at_rev_hazard(w)
                    .map(|x| lnf_at(x) * (-w).exp())
                    .unwrap_or(0.0)
            },
            0.0,
            w_eps,
            cfg,
        )?;
        Ok(-(lo.value + mid.value + hi.value))
    } else {
        let sup = m.support();
        let integrand = |x: f64| {
            let d = m.pdf(x).unwrap_or(0.0);
            if d > 0.0 && d.is_finite() {
                d * d.ln()
            } else {
                0.0
            }
        };
        let x_lo = m.quantile_or_bisect(eps);
        let x_hi = m.quantile_or_bisect(1.0 - eps);
        let mut r = adaptive_gk(integrand, x_lo, x_hi, cfg)?;
        r = r.plus(tanh_sinh(integrand, sup.lower(), x_lo, cfg)?);
        if sup.is_bounded() {
            r = r.plus(tanh_sinh(integrand, x_hi, sup.upper(), cfg)?);
        } else {
            r = r.plus(adaptive_tail(integrand, x_hi, (x_hi - x_lo).max(1.0), cfg)?);
        }
        Ok(-r.value)
    }
}

/// The model of `cX + b` for `c > 0`, `b >= 0`, propagating every handle.
///
/// The measures react predictably: the value scales by `c` and ignores `b`.
pub fn affine_transform(m: &CdfModel, c: f64, b: f64) -> Result<CdfModel> {
    if !(c > 0.0) || !c.is_finite() {
        return Err(Error::InvalidScale(c));
    }
    if !(b >= 0.0) || !b.is_finite() {
        return Err(Error::PreconditionUnmet(format!(
            "shift must be nonnegative and finite, got {b}"
        )));
    }
    let sup = m.support();
    let new_sup = crate::model::SupportInterval::new(c * sup.lower() + b, c * sup.upper() + b)?;
    let mm = m.clone();
    let mut out = CdfModel::new(new_sup, move |x| mm.cdf((x - b) / c));
    {
        let mm = m.clone();
        out = out.with_survival(move |x| mm.survival((x - b) / c));
    }
    if m.has_pdf() {
        let mm = m.clone();
        out = out.with_pdf(move |x| mm.pdf((x - b) / c).unwrap_or(0.0) / c);
    }
    if m.has_quantile() {
        let mm = m.clone();
        out = out.with_quantile(move |u| c * mm.quantile(u).unwrap_or(f64::NAN) + b);
    }
    if m.has_cdf_inverse() {
        let mm = m.clone();
        out = out.with_inv_rev_hazard(move |w| c * mm.x_at_rev_hazard(w).unwrap_or(f64::NAN) + b);
    }
    if m.has_survival_inverse() {
        let mm = m.clone();
        out = out.with_inv_hazard(move |w| c * mm.x_at_hazard(w).unwrap_or(f64::NAN) + b);
    }
    if let Some(mu) = m.mean_hint() {
        out = out.with_mean(c * mu + b);
    }
    Ok(out)
}
