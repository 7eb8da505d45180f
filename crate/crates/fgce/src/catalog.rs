//! Parametric catalog: the families with known closed forms plus two
//! first-passage laws, each exposed as a fully equipped [`CdfModel`].
//!
//! Every model carries precision-critical handles written in expm1/ln1p
//! form, so the integrators can resolve tail mass far beyond what plain
//! `f64` cdf/quantile composition can represent. Sampling is by inverse
//! transform from a named counter-based stream (see [`crate::rng`]).

use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::model::{AlphaParam, CdfModel, MeasureReport, SupportInterval};
use crate::quad::QuadratureConfig;
use crate::special::{exp_integral, gamma, ln1mexp, riemann_zeta};

/// The distributions the crate knows in closed or semi-closed form.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum CatalogDistribution {
    /// Uniform on (0, l).
    Uniform { l: f64 },
    /// Power law `F = (x/l)^b` on (0, l).
    Power { b: f64, l: f64 },
    /// Frechet `F = exp(-b x^{-eta})` on (0, inf).
    Frechet { b: f64, eta: f64 },
    /// Bounded Frechet-type law `F = exp(b(1 - l/x))` on (0, l).
    BoundedFrechet { b: f64, l: f64 },
    /// Standard half-logistic `F = tanh(x)` on (0, inf).
    HalfLogistic,
    /// Exponential with rate lambda.
    Exponential { lambda: f64 },
    /// Uniform on the lattice {1, ..., n} (cdf steps of height 1/n).
    DiscreteUniform { n: u32 },
    /// First-passage time of a linear birth-death process (rates
    /// lambda < mu), raised to the power theta.
    BirthDeathPassage { lambda: f64, mu: f64, theta: f64 },
    /// First-crossing time of a geometric counting process, power theta.
    GeomCounting { lambda: f64, theta: f64 },
}

use CatalogDistribution::*;

fn pos(v: f64) -> Result<f64> {
    if v > 0.0 && v.is_finite() {
        Ok(v)
    } else {
        Err(Error::InvalidScale(v))
    }
}

impl CatalogDistribution {
    /// Parameter screening shared by every constructor path.
    pub fn validate(&self) -> Result<()> {
        match *self {
            Uniform { l } => pos(l).map(drop),
            Power { b, l } => pos(b).and(pos(l)).map(drop),
            Frechet { b, eta } => pos(b).and(pos(eta)).map(drop),
            BoundedFrechet { b, l } => pos(b).and(pos(l)).map(drop),
            HalfLogistic => Ok(()),
            Exponential { lambda } => pos(lambda).map(drop),
            DiscreteUniform { n } => {
                if n >= 1 {
                    Ok(())
                } else {
                    Err(Error::InvalidModel("discrete uniform needs n >= 1"))
                }
            }
            BirthDeathPassage { lambda, mu, theta } => {
                pos(lambda)?;
                pos(mu)?;
                pos(theta)?;
                if lambda < mu {
                    Ok(())
                } else {
                    Err(Error::OutOfDomain(format!(
                        "birth-death passage needs lambda < mu, got {lambda} >= {mu}"
                    )))
                }
            }
            GeomCounting { lambda, theta } => pos(lambda).and(pos(theta)).map(drop),
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            Uniform { .. } => "uniform",
            Power { .. } => "power",
            Frechet { .. } => "frechet",
            BoundedFrechet { .. } => "boundedfrechet",
            HalfLogistic => "halflogistic",
            Exponential { .. } => "exponential",
            DiscreteUniform { .. } => "discreteuniform",
            BirthDeathPassage { .. } => "birthdeath",
            GeomCounting { .. } => "geomcounting",
        }
    }

    /// Builds the fully equipped model for this distribution.
    pub fn to_cdf_model(&self) -> Result<CdfModel> {
        self.validate()?;
        let m = match *self {
            Uniform { l } => {
                let sup = SupportInterval::new(0.0, l)?;
                CdfModel::new(sup, move |x| x / l)
                    .with_pdf(move |_| 1.0 / l)
                    .with_quantile(move |u| l * u)
                    .with_survival(move |x| (l - x) / l)
                    .with_inv_rev_hazard(move |w| l * (-w).exp())
                    .with_inv_hazard(move |w| -l * (-w).exp_m1())
                    .with_mean(0.5 * l)
            }
            Power { b, l } => {
                let sup = SupportInterval::new(0.0, l)?;
                CdfModel::new(sup, move |x| (x / l).powf(b))
                    .with_pdf(move |x| b * (x / l).powf(b - 1.0) / l)
                    .with_quantile(move |u| l * u.powf(1.0 / b))
                    .with_survival(move |x| -(b * (x / l).ln()).exp_m1())
                    .with_inv_rev_hazard(move |w| l * (-w / b).exp())
                    .with_inv_hazard(move |w| l * (ln1mexp(w) / b).exp())
                    .with_mean(l * b / (b + 1.0))
            }
            Frechet { b, eta } => {
                let sup = SupportInterval::new(0.0, f64::INFINITY)?;
                let mut m = CdfModel::new(sup, move |x| (-b * x.powf(-eta)).exp())
                    .with_pdf(move |x| b * eta * x.powf(-eta - 1.0) * (-b * x.powf(-eta)).exp())
                    .with_quantile(move |u| (b / -u.ln()).powf(1.0 / eta))
                    .with_survival(move |x| -(-b * x.powf(-eta)).exp_m1())
                    .with_inv_rev_hazard(move |w| (b / w).powf(1.0 / eta))
                    .with_inv_hazard(move |w| (b / -ln1mexp(w)).powf(1.0 / eta));
                if eta > 1.0 {
                    m = m.with_mean(b.powf(1.0 / eta) * gamma(1.0 - 1.0 / eta));
                }
                m
            }
            BoundedFrechet { b, l } => {
                let sup = SupportInterval::new(0.0, l)?;
                let mut m = CdfModel::new(sup, move |x| (b * (1.0 - l / x)).exp())
                    .with_pdf(move |x| (b * (1.0 - l / x)).exp() * b * l / (x * x))
                    .with_quantile(move |u| l * b / (b - u.ln()))
                    .with_survival(move |x| -(b * (1.0 - l / x)).exp_m1())
                    // -ln F = b(l - x)/x solves to x = l b/(b + w), exact
                    // arbitrarily close to the upper endpoint
                    .with_inv_rev_hazard(move |w| l * b / (b + w))
                    .with_inv_hazard(move |w| l * b / (b - ln1mexp(w)));
                if b < 300.0 {
                    let e2 = exp_integral(2.0, b, &QuadratureConfig::default())
                        .expect("beta > 0 by construction");
                    m = m.with_mean(l * (1.0 - b.exp() * e2));
                }
                m
            }
            HalfLogistic => {
                let sup = SupportInterval::new(0.0, f64::INFINITY)?;
                CdfModel::new(sup, |x: f64| x.tanh())
                    .with_pdf(|x: f64| {
                        let c = x.cosh();
                        1.0 / (c * c)
                    })
                    .with_quantile(|u: f64| u.atanh())
                    .with_survival(|x: f64| {
                        let q = (-2.0 * x).exp();
                        2.0 * q / (1.0 + q)
                    })
                    .with_inv_rev_hazard(|w: f64| {
                        // atanh(e^{-w}) with 1 - e^{-w} kept exact near w = 0
                        if w > std::f64::consts::LN_2 {
                            (-w).exp().atanh()
                        } else {
                            let s = -(-w).exp_m1();
                            0.5 * ((2.0 - s) / s).ln()
                        }
                    })
                    .with_inv_hazard(|w: f64| {
                        // solve 2q/(1+q) = e^{-w} for q = e^{-2x}
                        let s = (-w).exp();
                        0.5 * ((2.0 - s) / s).ln()
                    })
                    .with_mean(std::f64::consts::LN_2)
            }
            Exponential { lambda } => {
                let sup = SupportInterval::new(0.0, f64::INFINITY)?;
                CdfModel::new(sup, move |x| -(-lambda * x).exp_m1())
                    .with_pdf(move |x| lambda * (-lambda * x).exp())
                    .with_quantile(move |u| -(-u).ln_1p() / lambda)
                    .with_survival(move |x| (-lambda * x).exp())
                    .with_inv_hazard(move |w| w / lambda)
                    .with_inv_rev_hazard(move |w| -ln1mexp(w) / lambda)
                    .with_mean(1.0 / lambda)
            }
            DiscreteUniform { n } => {
                let nf = n as f64;
                let sup = SupportInterval::new(0.0, nf)?;
                // pure step cdf: an atom of mass 1/n at each lattice point
                CdfModel::new(sup, move |x| x.floor().clamp(0.0, nf) / nf)
                    .with_mean(0.5 * (nf + 1.0))
            }
            BirthDeathPassage { lambda, mu, theta } => {
                let sup = SupportInterval::new(0.0, f64::INFINITY)?;
                let d = mu - lambda;
                // ln(mu e^{dx} - lambda), stable against e^{dx} overflow
                let ln_den = move |x: f64| {
                    let t = d * x;
                    if t > 700.0 {
                        mu.ln() + t
                    } else {
                        (mu * t.exp() - lambda).ln()
                    }
                };
                let ln_sb = move |x: f64| d.ln() - ln_den(x);
                // base pdf mu (mu-lambda)^2 e^{dx} / (mu e^{dx} - lambda)^2
                let ln_fb = move |x: f64| mu.ln() + 2.0 * d.ln() + d * x - 2.0 * ln_den(x);
                let ln_f_base = move |x: f64| (-(ln_sb(x)).exp()).ln_1p();
                // inverse of the base cdf given u = F_base and s = 1 - u,
                // each supplied in whichever form is exact: solving
                // F_base(x) = u gives e^{dx} = 1 + u d / (mu s)
                let x_of_us = move |u: f64, s: f64| (u * d / (mu * s)).ln_1p() / d;
                CdfModel::new(sup, move |x| (theta * ln_f_base(x)).exp())
                    .with_pdf(move |x| {
                        // skip the tilt term at theta = 1: ln F_base hits
                        // -inf once the base survival rounds to one
                        let tilt = if theta == 1.0 { 0.0 } else { (theta - 1.0) * ln_f_base(x) };
                        theta * (tilt + ln_fb(x)).exp()
                    })
                    .with_survival(move |x| -(theta * ln_f_base(x)).exp_m1())
                    .with_inv_rev_hazard(move |w| {
                        let u = (-w / theta).exp();
                        let s = -(-w / theta).exp_m1();
                        x_of_us(u, s)
                    })
                    .with_inv_hazard(move |w| {
                        let g = ln1mexp(w) / theta; // ln F_base
                        x_of_us(g.exp(), -g.exp_m1())
                    })
            }
            GeomCounting { lambda, theta } => {
                let sup = SupportInterval::new(0.0, f64::INFINITY)?;
                // ln F_base = -ln(1 + 1/(lambda x))
                let ln_f_base = move |x: f64| -(1.0 / (lambda * x)).ln_1p();
                CdfModel::new(sup, move |x| (theta * ln_f_base(x)).exp())
                    .with_pdf(move |x| {
                        let fb = lambda / ((1.0 + lambda * x) * (1.0 + lambda * x));
                        theta * ((theta - 1.0) * ln_f_base(x)).exp() * fb
                    })
                    .with_survival(move |x| -(theta * ln_f_base(x)).exp_m1())
                    .with_quantile(move |u| {
                        let v = (u.ln() / theta).exp();
                        let one_minus_v = -(u.ln() / theta).exp_m1();
                        v / (lambda * one_minus_v)
                    })
                    .with_inv_rev_hazard(move |w| 1.0 / (lambda * (w / theta).exp_m1()))
                    .with_inv_hazard(move |w| {
                        // S^{-1}(e^{-w}): 1/(lambda x) = e^{-ln F_base} - 1
                        1.0 / (lambda * (-ln1mexp(w) / theta).exp_m1())
                    })
            }
        };
        Ok(m)
    }

    /// Closed-form value of the measure where one is known.
    ///
    /// Frechet requires `alpha > 1/eta` (the integral diverges otherwise);
    /// Whether a closed form of the measure exists for this family at
    /// some order (domain restrictions may still apply per order).
    pub fn has_closed_form(&self) -> bool {
        !matches!(*self, BirthDeathPassage { .. } | GeomCounting { .. })
    }

    /// the first-passage laws have no closed form and report
    /// [`Error::OutOfDomain`].
    pub fn closed_form_fgce(&self, alpha: AlphaParam, cfg: &QuadratureConfig) -> Result<MeasureReport> {
        self.validate()?;
        let a = alpha.get();
        let v = match *self {
            Uniform { l } => l / 2.0f64.powf(a + 1.0),
            Power { b, l } => l * b.powf(a) / (b + 1.0).powf(a + 1.0),
            Frechet { b, eta } => {
                if a <= 1.0 / eta {
                    return Err(Error::OutOfDomain(format!(
                        "frechet measure needs alpha > 1/eta, got alpha={a}, eta={eta}"
                    )));
                }
                b.powf(1.0 / eta) / (eta * gamma(a + 1.0)) * gamma(a - 1.0 / eta)
            }
            BoundedFrechet { b, l } => {
                let ea = exp_integral(a, b, cfg)?;
                (l * b / a) * (b.exp() * (a + b) * ea - 1.0)
            }
            HalfLogistic => riemann_zeta(a + 1.0)? / 2.0f64.powf(a + 1.0),
            Exponential { lambda } => (riemann_zeta(a + 1.0)? - 1.0) / lambda,
            DiscreteUniform { n } => {
                let nf = n as f64;
                let mut s = 0.0;
                for k in 1..n {
                    let p = k as f64 / nf;
                    s += p * (-p.ln()).powf(a);
                }
                s / gamma(a + 1.0)
            }
            BirthDeathPassage { .. } | GeomCounting { .. } => {
                return Err(Error::OutOfDomain(format!(
                    "no closed form for {}",
                    self.name()
                )));
            }
        };
        Ok(MeasureReport::closed(v))
    }

    /// Closed-form normalized measure `fgce(alpha)/fgce(1)^alpha` where
    /// both pieces exist in closed form.
    pub fn closed_form_nfgce(&self, alpha: AlphaParam, cfg: &QuadratureConfig) -> Result<MeasureReport> {
        self.validate()?;
        let a = alpha.get();
        let v = match *self {
            Uniform { l } => (l / 2.0).powf(1.0 - a),
            Power { b, l } => (l / (b + 1.0)).powf(1.0 - a),
            Frechet { b, eta } => {
                if !(eta > 1.0) || a <= 1.0 / eta {
                    return Err(Error::OutOfDomain(format!(
                        "normalized frechet measure needs eta > 1 and alpha > 1/eta, got alpha={a}, eta={eta}"
                    )));
                }
                b.powf((1.0 - a) / eta) * gamma(a - 1.0 / eta)
                    / (eta.powf(1.0 - a) * gamma(a + 1.0) * gamma(1.0 - 1.0 / eta).powf(a))
            }
            BoundedFrechet { b, l } => {
                let ea = exp_integral(a, b, cfg)?;
                let e1 = exp_integral(1.0, b, cfg)?;
                let num = b.exp() * (a + b) * ea - 1.0;
                let den = b.exp() * (1.0 + b) * e1 - 1.0;
                ((l * b).powf(1.0 - a) / a) * num / den.powf(a)
            }
            _ => {
                // ratio of the closed forms when both sides exist
                let ca = self.closed_form_fgce(alpha, cfg)?.value;
                let c1 = self.closed_form_fgce(AlphaParam::one(), cfg)?.value;
                if !(c1 > 0.0) {
                    return Err(Error::ZeroDenominator("order-one measure vanishes"));
                }
                ca / c1.powf(a)
            }
        };
        Ok(MeasureReport::closed(v))
    }

    /// Inverse-transform sample of length `n` from stream `(seed, stream)`.
    pub fn sample(&self, n: usize, seed: u64, stream: u64) -> Result<Vec<f64>> {
        let m = self.to_cdf_model()?;
        if !m.has_quantile() {
            return Err(Error::MissingQuantile);
        }
        let mut rng = crate::rng::substream(seed, stream);
        Ok((0..n)
            .map(|_| {
                let u = crate::rng::unit_open(&mut rng);
                m.quantile(u).expect("quantile checked above")
            })
            .collect())
    }
}

impl fmt::Display for CatalogDistribution {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            Uniform { l } => write!(f, "uniform:l={l}"),
            Power { b, l } => write!(f, "power:b={b},l={l}"),
            Frechet { b, eta } => write!(f, "frechet:b={b},eta={eta}"),
            BoundedFrechet { b, l } => write!(f, "boundedfrechet:b={b},l={l}"),
            HalfLogistic => write!(f, "halflogistic"),
            Exponential { lambda } => write!(f, "exponential:lambda={lambda}"),
            DiscreteUniform { n } => write!(f, "discreteuniform:n={n}"),
            BirthDeathPassage { lambda, mu, theta } => {
                write!(f, "birthdeath:lambda={lambda},mu={mu},theta={theta}")
            }
            GeomCounting { lambda, theta } => {
                write!(f, "geomcounting:lambda={lambda},theta={theta}")
            }
        }
    }
}

fn parse_params(spec: &str) -> Result<Vec<(String, f64)>> {
    let mut out = Vec::new();
    if spec.trim().is_empty() {
        return Ok(out);
    }
    for piece in spec.split(',') {
        let (k, v) = piece
            .split_once('=')
            .ok_or_else(|| Error::ParseError(format!("expected key=value, got '{piece}'")))?;
        let v: f64 = v
            .trim()
            .parse()
            .map_err(|_| Error::ParseError(format!("'{}' is not a number", v.trim())))?;
        out.push((k.trim().to_ascii_lowercase(), v));
    }
    Ok(out)
}

struct Params(Vec<(String, f64)>);

impl Params {
    fn take(&mut self, key: &str) -> Result<f64> {
        let idx = self
            .0
            .iter()
            .position(|(k, _)| k == key)
            .ok_or_else(|| Error::ParseError(format!("missing parameter '{key}'")))?;
        Ok(self.0.remove(idx).1)
    }

    fn finish(self) -> Result<()> {
        if let Some((k, _)) = self.0.first() {
            return Err(Error::ParseError(format!("unknown parameter '{k}'")));
        }
        Ok(())
    }
}

impl FromStr for CatalogDistribution {
    type Err = Error;

    /// Parses specs like `uniform:l=1`, `frechet:b=1,eta=2`,
    /// `halflogistic`, `birthdeath:lambda=1,mu=2,theta=4`.
    fn from_str(s: &str) -> Result<Self> {
        let (name, rest) = match s.split_once(':') {
            Some((n, r)) => (n, r),
            None => (s, ""),
        };
        let mut p = Params(parse_params(rest)?);
        let d = match name.trim().to_ascii_lowercase().as_str() {
            "uniform" => Uniform { l: p.take("l")? },
            "power" => Power { b: p.take("b")?, l: p.take("l")? },
            "frechet" => Frechet { b: p.take("b")?, eta: p.take("eta")? },
            "boundedfrechet" | "bounded_frechet" => BoundedFrechet { b: p.take("b")?, l: p.take("l")? },
            "halflogistic" | "half_logistic" => HalfLogistic,
            "exponential" | "exp" => Exponential { lambda: p.take("lambda")? },
            "discreteuniform" | "discrete_uniform" => {
                let n = p.take("n")?;
                if n.fract() != 0.0 || n < 1.0 || n > u32::MAX as f64 {
                    return Err(Error::ParseError(format!("n must be a positive integer, got {n}")));
                }
                DiscreteUniform { n: n as u32 }
            }
            "birthdeath" | "birthdeathpassage" => BirthDeathPassage {
                lambda: p.take("lambda")?,
                mu: p.take("mu")?,
                theta: p.take("theta")?,
            },
            "geomcounting" => GeomCounting {
                lambda: p.take("lambda")?,
                theta: p.take("theta")?,
            },
            other => {
                return Err(Error::ParseError(format!("unknown distribution '{other}'")));
            }
        };
        p.finish()?;
        d.validate()?;
        Ok(d)
    }
}

/// Every catalog entry with placeholder parameters, for listings.
pub fn catalog_entries() -> Vec<(&'static str, &'static str)> {
    vec![
        ("uniform", "uniform:l=1"),
        ("power", "power:b=2,l=1"),
        ("frechet", "frechet:b=1,eta=2"),
        ("boundedfrechet", "boundedfrechet:b=1,l=1"),
        ("halflogistic", "halflogistic"),
        ("exponential", "exponential:lambda=1"),
        ("discreteuniform", "discreteuniform:n=5"),
        ("birthdeath", "birthdeath:lambda=1,mu=2,theta=4"),
        ("geomcounting", "geomcounting:lambda=1,theta=2"),
    ]
}
