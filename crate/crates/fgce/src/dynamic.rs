//! Time-conditioned measures: the entropy of the past life `[X | X <= t]`
//! and of the residual life `[X | X > t]` as the inspection time sweeps
//! the support.
//!
//! Both conditioned laws are built as full [`CdfModel`]s, so every
//! integration route (windows, handles, closed-form cross-checks) applies
//! to them unchanged. Precision-critical handles are propagated through
//! the conditioning in hazard coordinates, where truncation is a shift:
//! `-ln F_past(x) = -ln F(x) - ln F(t)` and likewise on the survival side.

use crate::bounds::{bound_power_of_ce, bound_triplet, BoundReport};
use crate::error::{Error, Result};
use crate::measure::{fgce, fgcre};
use crate::model::{AlphaParam, CdfModel, MeasureReport, SupportInterval};
use crate::quad::{adaptive_gk, adaptive_tail, QuadratureConfig};
use crate::special::ln1mexp;

/// Law of `[X | X <= t]` on `(lower, t)`.
///
/// `t` may sit anywhere in `(lower, upper]`; the mass seen by time `t`
/// must be positive. Handles of the base model are propagated whenever
/// they exist, keeping deep-tail precision intact under conditioning.
pub fn past_model(m: &CdfModel, t: f64) -> Result<CdfModel> {
    let sup = m.support();
    if !(t > sup.lower() && t <= sup.upper()) {
        return Err(Error::PreconditionUnmet(format!(
            "inspection time {t} outside ({}, {}]",
            sup.lower(),
            sup.upper()
        )));
    }
    let ft = m.cdf(t);
    if !(ft > 0.0) {
        return Err(Error::ZeroMass);
    }
    let support = SupportInterval::new(sup.lower(), t)?;
    let base = m.clone();
    let mut out = CdfModel::new(support, move |x| base.cdf(x) / ft);
    if m.has_pdf() {
        let base = m.clone();
        out = out.with_pdf(move |x| base.pdf(x).unwrap_or(0.0) / ft);
    }
    {
        let base = m.clone();
        out = out.with_survival(move |x| (ft - base.cdf(x)) / ft);
    }
    if m.has_cdf_inverse() {
        // -ln F(t), exact when F(t) is close to one
        let shift = -ft.ln();
        let base = m.clone();
        out = out.with_quantile(move |u| {
            base.x_at_cdf(u * ft).expect("inverse checked above")
        });
        let base = m.clone();
        out = out.with_inv_rev_hazard(move |w| {
            base.x_at_rev_hazard(w + shift).expect("inverse checked above")
        });
        let base = m.clone();
        out = out.with_inv_hazard(move |w| {
            // F(x) = F(t)(1 - e^{-w}) in log form
            base.x_at_rev_hazard(shift - ln1mexp(w)).expect("inverse checked above")
        });
    }
    Ok(out)
}

/// Law of `[X | X > t]` on `(t, upper)`.
///
/// `t` may sit anywhere in `[lower, upper)`; the mass beyond `t` must be
/// positive. The measures of this law match those of the shifted residual
/// life `X - t | X > t`, which never enter the integrands directly.
pub fn residual_model(m: &CdfModel, t: f64) -> Result<CdfModel> {
    let sup = m.support();
    if !(t >= sup.lower() && t < sup.upper()) {
        return Err(Error::PreconditionUnmet(format!(
            "inspection time {t} outside [{}, {})",
            sup.lower(),
            sup.upper()
        )));
    }
    let st = m.survival(t);
    if !(st > 0.0) {
        return Err(Error::ZeroMass);
    }
    let support = SupportInterval::new(t, sup.upper())?;
    let base = m.clone();
    let mut out = CdfModel::new(support, move |x| (base.cdf(x) - (1.0 - st)) / st);
    if m.has_pdf() {
        let base = m.clone();
        out = out.with_pdf(move |x| base.pdf(x).unwrap_or(0.0) / st);
    }
    {
        let base = m.clone();
        out = out.with_survival(move |x| base.survival(x) / st);
    }
    if m.has_survival_inverse() {
        // -ln S(t), exact when S(t) is close to one
        let shift = -st.ln();
        let base = m.clone();
        out = out.with_quantile(move |u| {
            base.x_at_survival(st * (1.0 - u)).expect("inverse checked above")
        });
        let base = m.clone();
        out = out.with_inv_hazard(move |w| {
            base.x_at_hazard(w + shift).expect("inverse checked above")
        });
        let base = m.clone();
        out = out.with_inv_rev_hazard(move |w| {
            // S(x) = S(t)(1 - e^{-w}) in log form
            base.x_at_hazard(shift - ln1mexp(w)).expect("inverse checked above")
        });
    }
    Ok(out)
}

/// Measure of the past life `[X | X <= t]` at order `alpha`.
pub fn dyn_fgce(m: &CdfModel, alpha: AlphaParam, t: f64, cfg: &QuadratureConfig) -> Result<MeasureReport> {
    fgce(&past_model(m, t)?, alpha, cfg)
}

/// Survival-side measure of the residual life `[X | X > t]`.
pub fn dyn_fgcre(m: &CdfModel, alpha: AlphaParam, t: f64, cfg: &QuadratureConfig) -> Result<MeasureReport> {
    fgcre(&residual_model(m, t)?, alpha, cfg)
}

/// Normalized past-life measure `dyn_fgce(alpha) / dyn_fgce(1)^alpha`.
pub fn dyn_nfgce(m: &CdfModel, alpha: AlphaParam, t: f64, cfg: &QuadratureConfig) -> Result<MeasureReport> {
    crate::measure::nfgce(&past_model(m, t)?, alpha, cfg)
}

/// Mean inactivity time `t - E[X | X <= t]`, the vanishing-order limit of
/// [`dyn_fgce`].
pub fn mean_inactivity(m: &CdfModel, t: f64, cfg: &QuadratureConfig) -> Result<f64> {
    let sup = m.support();
    if !(t > sup.lower() && t <= sup.upper()) {
        return Err(Error::PreconditionUnmet(format!(
            "inspection time {t} outside ({}, {}]",
            sup.lower(),
            sup.upper()
        )));
    }
    let ft = m.cdf(t);
    if !(ft > 0.0) {
        return Err(Error::ZeroMass);
    }
    let base = m.clone();
    let mass = adaptive_gk(move |x| base.cdf(x), sup.lower(), t, cfg)?;
    Ok(mass.value / ft)
}

/// Mean residual life `E[X - t | X > t]`, the vanishing-order limit of
/// [`dyn_fgcre`].
pub fn mean_residual_life(m: &CdfModel, t: f64, cfg: &QuadratureConfig) -> Result<f64> {
    let sup = m.support();
    if !(t >= sup.lower() && t < sup.upper()) {
        return Err(Error::PreconditionUnmet(format!(
            "inspection time {t} outside [{}, {})",
            sup.lower(),
            sup.upper()
        )));
    }
    let st = m.survival(t);
    if !(st > 0.0) {
        return Err(Error::ZeroMass);
    }
    let tail = if sup.is_bounded() {
        let base = m.clone();
        adaptive_gk(move |x| base.survival(x), t, sup.upper(), cfg)?
    } else {
        let cut = m.quantile_or_bisect(0.9999).max(t + 1.0);
        let base = m.clone();
        let head = adaptive_gk(move |x| base.survival(x), t, cut, cfg)?;
        let base = m.clone();
        let scale = (cut - t).max(1.0);
        head.plus(adaptive_tail(move |x| base.survival(x), cut, scale, cfg)?)
    };
    Ok(tail.value / st)
}

/// One evaluation point of a monotonicity scan.
#[derive(Debug, Clone, Copy)]
pub struct MonotoneWitness {
    pub t_before: f64,
    pub t_after: f64,
    pub value_before: f64,
    pub value_after: f64,
}

/// Outcome of scanning `t -> dyn_fgce(t)` along a grid.
#[derive(Debug, Clone)]
pub struct MonotoneReport {
    pub nondecreasing: bool,
    pub witness: Option<MonotoneWitness>,
    pub values: Vec<(f64, f64)>,
}

/// Checks that the past-life measure is nondecreasing in the inspection
/// time along `times` (which must be strictly increasing and interior).
pub fn idfce_check(
    m: &CdfModel,
    alpha: AlphaParam,
    times: &[f64],
    cfg: &QuadratureConfig,
) -> Result<MonotoneReport> {
    if times.len() < 2 {
        return Err(Error::PreconditionUnmet("need at least two inspection times".into()));
    }
    if times.windows(2).any(|p| !(p[1] > p[0])) {
        return Err(Error::PreconditionUnmet("inspection times must be strictly increasing".into()));
    }
    let mut values = Vec::with_capacity(times.len());
    for &t in times {
        let v = dyn_fgce(m, alpha, t, cfg)?;
        values.push((t, v.value));
    }
    let mut witness = None;
    for p in values.windows(2) {
        let slack = 1e-9 * p[0].1.abs().max(1.0);
        if p[1].1 < p[0].1 - slack {
            witness = Some(MonotoneWitness {
                t_before: p[0].0,
                t_after: p[1].0,
                value_before: p[0].1,
                value_after: p[1].1,
            });
            break;
        }
    }
    Ok(MonotoneReport { nondecreasing: witness.is_none(), witness, values })
}

/// Every applicable static bound evaluated on the past model at `t`.
///
/// The truncated support makes the power-of-order-one sandwich apply
/// with scale `t - lower`, and the direct triplet bounds follow with
/// the conditioned density. Returns one report per inequality.
pub fn dyn_bounds_report(
    m: &CdfModel,
    alpha: AlphaParam,
    t: f64,
    cfg: &QuadratureConfig,
) -> Result<Vec<BoundReport>> {
    let past = past_model(m, t)?;
    let mut out = Vec::new();
    out.extend(bound_power_of_ce(&past, alpha, cfg)?);
    out.extend(bound_triplet(&past, alpha, cfg)?);
    Ok(out)
}
