//! Distribution models and shared report types.
//!
//! A [`CdfModel`] presents a nonnegative random variable through its cdf
//! plus whatever analytic handles are available. The optional handles
//! matter for accuracy: composing `quantile(1 - eps)` in f64 loses the
//! upper tail at `eps ~ 1e-16`, while the measures integrate weight far
//! deeper into the tail than that. Models that can invert their tails
//! exactly should provide [`CdfModel::with_inv_rev_hazard`] (solves
//! `-ln F(x) = w`) and [`CdfModel::with_inv_hazard`] (solves
//! `-ln S(x) = w`); the integrators then work in `w`-space where every
//! node is analytically exact.

use std::fmt;
use std::sync::Arc;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::quad::bisect_increasing;

/// Shared closure type for model components.
pub type ScalarFn = Arc<dyn Fn(f64) -> f64 + Send + Sync>;

/// The fractional order. Strictly positive and finite by construction.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AlphaParam(f64);

impl AlphaParam {
    pub fn new(alpha: f64) -> Result<Self> {
        if alpha > 0.0 && alpha.is_finite() {
            Ok(Self(alpha))
        } else {
            Err(Error::InvalidAlpha(alpha))
        }
    }

    /// Order one, where the fractional measure reduces to the classical one.
    pub fn one() -> Self {
        Self(1.0)
    }

    pub fn get(self) -> f64 {
        self.0
    }
}

/// Support interval `(lower, upper)` of a nonnegative variable; `upper`
/// may be infinite.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SupportInterval {
    lower: f64,
    upper: f64,
}

impl SupportInterval {
    pub fn new(lower: f64, upper: f64) -> Result<Self> {
        let ok = lower.is_finite() && lower >= 0.0 && upper > lower;
        if ok && !upper.is_nan() {
            Ok(Self { lower, upper })
        } else {
            Err(Error::InvalidSupport { lower, upper })
        }
    }

    pub fn lower(&self) -> f64 {
        self.lower
    }

    pub fn upper(&self) -> f64 {
        self.upper
    }

    pub fn is_bounded(&self) -> bool {
        self.upper.is_finite()
    }

    /// Length of the interval; infinite for unbounded supports.
    pub fn len(&self) -> f64 {
        self.upper - self.lower
    }

    pub fn contains(&self, x: f64) -> bool {
        x > self.lower && x < self.upper
    }
}

/// How a reported value was obtained.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    /// Evaluated from an analytic formula.
    ClosedForm,
    /// Quadrature over the observation axis.
    QuadratureX,
    /// Quadrature over a probability-transformed axis.
    QuadratureU,
    /// Finite sum over an empirical sample.
    Empirical,
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Method::ClosedForm => "closed_form",
            Method::QuadratureX => "quadrature_x",
            Method::QuadratureU => "quadrature_u",
            Method::Empirical => "empirical",
        };
        f.write_str(s)
    }
}

/// A computed measure value with its provenance and error estimate.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct MeasureReport {
    pub value: f64,
    pub method: Method,
    pub err_estimate: f64,
}

impl MeasureReport {
    pub fn closed(value: f64) -> Self {
        Self {
            value,
            method: Method::ClosedForm,
            err_estimate: 4.0 * f64::EPSILON * value.abs(),
        }
    }
}

/// A distribution model built around its cdf.
#[derive(Clone)]
pub struct CdfModel {
    support: SupportInterval,
    cdf: ScalarFn,
    pdf: Option<ScalarFn>,
    quantile: Option<ScalarFn>,
    survival: Option<ScalarFn>,
    inv_rev_hazard: Option<ScalarFn>,
    inv_hazard: Option<ScalarFn>,
    mean: Option<f64>,
}

impl fmt::Debug for CdfModel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("CdfModel")
            .field("support", &self.support)
            .field("pdf", &self.pdf.is_some())
            .field("quantile", &self.quantile.is_some())
            .field("survival", &self.survival.is_some())
            .field("inv_rev_hazard", &self.inv_rev_hazard.is_some())
            .field("inv_hazard", &self.inv_hazard.is_some())
            .field("mean", &self.mean)
            .finish()
    }
}

impl CdfModel {
    /// Builds a model from the cdf alone.
    ///
    /// The integration routines assume `cdf` is continuous and varies on
    /// scales commensurate with the support. A jump, or a feature much
    /// narrower than the span, can drift into the gap between the
    /// outermost node of a quadrature panel and its endpoint, where both
    /// embedded rules see only the surrounding branch and the panel is
    /// accepted with its error unseen. Step functions fitted to data are
    /// better served by the exact spacing sums in the empirical module.
    pub fn new(support: SupportInterval, cdf: impl Fn(f64) -> f64 + Send + Sync + 'static) -> Self {
        Self {
            support,
            cdf: Arc::new(cdf),
            pdf: None,
            quantile: None,
            survival: None,
            inv_rev_hazard: None,
            inv_hazard: None,
            mean: None,
        }
    }

    pub fn with_pdf(mut self, pdf: impl Fn(f64) -> f64 + Send + Sync + 'static) -> Self {
        self.pdf = Some(Arc::new(pdf));
        self
    }

    pub fn with_quantile(mut self, q: impl Fn(f64) -> f64 + Send + Sync + 'static) -> Self {
        self.quantile = Some(Arc::new(q));
        self
    }

    pub fn with_survival(mut self, s: impl Fn(f64) -> f64 + Send + Sync + 'static) -> Self {
        self.survival = Some(Arc::new(s));
        self
    }

    /// Exact solver for `-ln F(x) = w`, `w > 0`.
    pub fn with_inv_rev_hazard(mut self, g: impl Fn(f64) -> f64 + Send + Sync + 'static) -> Self {
        self.inv_rev_hazard = Some(Arc::new(g));
        self
    }

    /// Exact solver for `-ln S(x) = w`, `w > 0`.
    pub fn with_inv_hazard(mut self, g: impl Fn(f64) -> f64 + Send + Sync + 'static) -> Self {
        self.inv_hazard = Some(Arc::new(g));
        self
    }

    pub fn with_mean(mut self, mean: f64) -> Self {
        self.mean = Some(mean);
        self
    }

    pub fn support(&self) -> SupportInterval {
        self.support
    }

    /// Cdf evaluated with saturation outside the support and clamped
    /// into [0, 1].
    pub fn cdf(&self, x: f64) -> f64 {
        if x <= self.support.lower {
            return 0.0;
        }
        if x >= self.support.upper {
            return 1.0;
        }
        (self.cdf)(x).clamp(0.0, 1.0)
    }

    /// Survival function; uses the dedicated closure when present (which
    /// preserves precision near 1 - F ~ 0), otherwise `1 - cdf`.
    pub fn survival(&self, x: f64) -> f64 {
        if x <= self.support.lower {
            return 1.0;
        }
        if x >= self.support.upper {
            return 0.0;
        }
        match &self.survival {
            Some(s) => s(x).clamp(0.0, 1.0),
            None => (1.0 - (self.cdf)(x)).clamp(0.0, 1.0),
        }
    }

    pub fn has_pdf(&self) -> bool {
        self.pdf.is_some()
    }

    pub fn has_quantile(&self) -> bool {
        self.quantile.is_some()
    }

    /// Density at `x`; zero outside the support, `None` if the model
    /// carries no density.
    pub fn pdf(&self, x: f64) -> Option<f64> {
        let f = self.pdf.as_ref()?;
        if self.support.contains(x) {
            Some(f(x).max(0.0))
        } else {
            Some(0.0)
        }
    }

    /// Quantile at probability `u` in [0, 1], if the model provides one.
    pub fn quantile(&self, u: f64) -> Option<f64> {
        let q = self.quantile.as_ref()?;
        if u <= 0.0 {
            return Some(self.support.lower);
        }
        if u >= 1.0 {
            return Some(self.support.upper);
        }
        Some(q(u).clamp(self.support.lower, self.support.upper))
    }

    /// Point where `F = v`, for `v` in (0, 1). Prefers the quantile, falls
    /// back to the reversed-hazard inverse.
    pub fn x_at_cdf(&self, v: f64) -> Option<f64> {
        if let Some(x) = self.quantile(v) {
            return Some(x);
        }
        self.inv_rev_hazard
            .as_ref()
            .map(|g| g(-v.ln()).clamp(self.support.lower, self.support.upper))
    }

    /// Point where `S = v`, for `v` in (0, 1). Prefers the hazard inverse,
    /// which stays exact deep into the upper tail.
    pub fn x_at_survival(&self, v: f64) -> Option<f64> {
        if let Some(g) = &self.inv_hazard {
            return Some(g(-v.ln()).clamp(self.support.lower, self.support.upper));
        }
        self.quantile(1.0 - v)
    }

    /// Point where `-ln F = w`, for `w > 0`. The quantile fallback
    /// `Q(e^{-w})` collapses for `w` below ~1e-16; native handles do not.
    pub fn x_at_rev_hazard(&self, w: f64) -> Option<f64> {
        if let Some(g) = &self.inv_rev_hazard {
            return Some(g(w).clamp(self.support.lower, self.support.upper));
        }
        self.quantile((-w).exp())
    }

    /// Point where `-ln S = w`, for `w > 0`.
    pub fn x_at_hazard(&self, w: f64) -> Option<f64> {
        if let Some(g) = &self.inv_hazard {
            return Some(g(w).clamp(self.support.lower, self.support.upper));
        }
        self.quantile(-(-w).exp_m1())
    }

    /// True when the model can map cdf levels back to points exactly
    /// (a quantile or a reversed-hazard inverse).
    pub(crate) fn has_cdf_inverse(&self) -> bool {
        self.quantile.is_some() || self.inv_rev_hazard.is_some()
    }

    /// True when the model can map survival levels back to points
    /// (a hazard inverse or a quantile).
    pub(crate) fn has_survival_inverse(&self) -> bool {
        self.quantile.is_some() || self.inv_hazard.is_some()
    }

    pub fn mean_hint(&self) -> Option<f64> {
        self.mean
    }

    /// Quantile through the closure when present, otherwise by bisection
    /// of the cdf (expanding the bracket geometrically on unbounded
    /// supports).
    pub fn quantile_or_bisect(&self, p: f64) -> f64 {
        if let Some(x) = self.quantile(p) {
            return x;
        }
        let lo = self.support.lower;
        let mut hi = if self.support.is_bounded() {
            self.support.upper
        } else {
            let mut h = lo.abs().max(1.0);
            while self.cdf(lo + h) < p && h < 1e300 {
                h *= 2.0;
            }
            lo + h
        };
        if hi <= lo {
            hi = lo + f64::MIN_POSITIVE;
        }
        bisect_increasing(|x| self.cdf(x), lo, hi, p)
    }

    /// Cheap sanity probe used by measure entry points: the cdf must be
    /// nondecreasing along a grid spanning the bulk of the distribution.
    pub(crate) fn probe(&self) -> Result<()> {
        let lo = self.support.lower;
        let hi = if self.support.is_bounded() {
            self.support.upper
        } else {
            self.quantile_or_bisect(0.999)
        };
        if !(hi > lo) || hi.is_nan() {
            return Err(Error::InvalidModel("could not bracket the distribution's mass"));
        }
        let n = 33;
        let mut prev = 0.0;
        for i in 0..=n {
            let x = lo + (hi - lo) * i as f64 / n as f64;
            let v = self.cdf(x);
            if v.is_nan() || v < prev - 1e-12 {
                return Err(Error::InvalidModel("cdf is not nondecreasing on its support"));
            }
            prev = v;
        }
        Ok(())
    }

    /// Full validation: runs [`CdfModel::probe`] plus consistency checks of
    /// the optional handles against the cdf on interior points.
    pub fn validate(&self) -> Result<()> {
        self.probe()?;
        for i in 1..20 {
            let p = i as f64 / 20.0;
            let x = self.quantile_or_bisect(p);
            if !x.is_finite() {
                continue;
            }
            let back = self.cdf(x);
            // inversion is only a contract of the explicit handles; a step
            // cdf without them has no interior point with F(x) = p
            if let Some(xi) = self.x_at_cdf(p) {
                if (self.cdf(xi) - p).abs() > 1e-6 {
                    return Err(Error::InvalidModel("inverse handles do not invert the cdf"));
                }
            }
            if let Some(xs) = self.x_at_survival(p) {
                if (self.survival(xs) - p).abs() > 1e-6 {
                    return Err(Error::InvalidModel("survival handles do not invert the survival"));
                }
            }
            if let Some(s) = self.survival.as_ref() {
                if (s(x) - (1.0 - back)).abs() > 1e-8 {
                    return Err(Error::InvalidModel("survival disagrees with 1 - cdf"));
                }
            }
            if self.pdf.is_some() {
                // central difference over a mass-aware step
                let h = 1e-6 * (x.abs().max(1.0));
                let (a, b) = (x - h, x + h);
                let num = (self.cdf(b) - self.cdf(a)) / (b - a);
                let f = self.pdf(x).unwrap();
                if (num - f).abs() > 1e-3 * f.abs().max(1.0) {
                    return Err(Error::InvalidModel("pdf disagrees with the cdf derivative"));
                }
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn unit_uniform() -> CdfModel {
        let sup = SupportInterval::new(0.0, 1.0).unwrap();
        CdfModel::new(sup, |x| x)
            .with_pdf(|_| 1.0)
            .with_quantile(|u| u)
            .with_mean(0.5)
    }

    #[test]
    fn alpha_param_screens_inputs() {
        assert!(AlphaParam::new(0.5).is_ok());
        assert!(matches!(AlphaParam::new(0.0), Err(Error::InvalidAlpha(_))));
        assert!(AlphaParam::new(-1.0).is_err());
        assert!(AlphaParam::new(f64::NAN).is_err());
        assert!(AlphaParam::new(f64::INFINITY).is_err());
        assert_eq!(AlphaParam::one().get(), 1.0);
    }

    #[test]
    fn support_interval_rules() {
        assert!(SupportInterval::new(0.0, 1.0).is_ok());
        assert!(SupportInterval::new(0.0, f64::INFINITY).is_ok());
        assert!(SupportInterval::new(-0.1, 1.0).is_err());
        assert!(SupportInterval::new(1.0, 1.0).is_err());
        assert!(SupportInterval::new(2.0, 1.0).is_err());
        let s = SupportInterval::new(0.5, f64::INFINITY).unwrap();
        assert!(!s.is_bounded());
        assert!(s.contains(1.0));
        assert!(!s.contains(0.5));
    }

    #[test]
    fn cdf_saturates_outside_support() {
        let m = unit_uniform();
        assert_eq!(m.cdf(-1.0), 0.0);
        assert_eq!(m.cdf(2.0), 1.0);
        assert_eq!(m.survival(-1.0), 1.0);
        assert_eq!(m.survival(2.0), 0.0);
        assert_eq!(m.pdf(2.0), Some(0.0));
    }

    #[test]
    fn tail_inverse_fallbacks_agree_with_cdf() {
        let m = unit_uniform();
        let w = 0.7f64;
        let x = m.x_at_rev_hazard(w).unwrap();
        assert!((m.cdf(x) - (-w).exp()).abs() < 1e-12);
        let x = m.x_at_hazard(w).unwrap();
        assert!((m.survival(x) - (-w).exp()).abs() < 1e-12);
        let x = m.x_at_survival(0.25).unwrap();
        assert!((x - 0.75).abs() < 1e-12);
    }

    #[test]
    fn bisection_quantile_matches_closure() {
        let sup = SupportInterval::new(0.0, f64::INFINITY).unwrap();
        // exponential(1) by cdf alone
        let m = CdfModel::new(sup, |x: f64| -(-x).exp_m1());
        for &p in &[0.1, 0.5, 0.9, 0.999] {
            let x = m.quantile_or_bisect(p);
            assert!(
                (x - -(1.0f64 - p).ln()).abs() < 1e-9 * (1.0 + x),
                "p={p}, x={x}"
            );
        }
    }

    #[test]
    fn probe_rejects_decreasing_cdf() {
        let sup = SupportInterval::new(0.0, 1.0).unwrap();
        let bad = CdfModel::new(sup, |x| 1.0 - x);
        assert!(matches!(bad.probe(), Err(Error::InvalidModel(_))));
    }

    #[test]
    fn validate_accepts_consistent_model() {
        assert!(unit_uniform().validate().is_ok());
    }

    #[test]
    fn validate_rejects_wrong_pdf() {
        let sup = SupportInterval::new(0.0, 1.0).unwrap();
        let m = CdfModel::new(sup, |x| x).with_pdf(|_| 2.0).with_quantile(|u| u);
        assert!(m.validate().is_err());
    }
}
