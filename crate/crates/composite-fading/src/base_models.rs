//! Base (non-composited) fading models: the kappa-mu envelope distribution, its
//! Extreme limit, and the gamma shadowing weight, each with pdf, log-pdf and an exact
//! sampler.
//!
//! All densities are assembled in log space and exponentiated last; the samplers use
//! the Poisson-mixture construction (draw a Poisson cluster count, then a gamma
//! power), which is exact and directly checkable against the pdfs.

use std::error::Error;
use std::fmt;

use rand::Rng;
use rand_distr::{Distribution, Gamma, Poisson};

use crate::special_fns::{ln_bessel_i, ln_gamma_unchecked};

#[derive(Debug, Clone, PartialEq)]
pub enum ModelError {
    InvalidParam {
        name: &'static str,
        value: f64,
        requirement: &'static str,
    },
    InvalidArgument {
        name: &'static str,
        value: f64,
        requirement: &'static str,
    },
}

impl fmt::Display for ModelError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ModelError::InvalidParam {
                name,
                value,
                requirement,
            } => write!(f, "parameter {name} = {value} violates: {requirement}"),
            ModelError::InvalidArgument {
                name,
                value,
                requirement,
            } => write!(f, "argument {name} = {value} violates: {requirement}"),
        }
    }
}

impl Error for ModelError {}

fn require_positive(name: &'static str, value: f64) -> Result<f64, ModelError> {
    if value.is_finite() && value > 0.0 {
        Ok(value)
    } else {
        Err(ModelError::InvalidParam {
            name,
            value,
            requirement: "must be finite and > 0",
        })
    }
}

fn require_nonneg_arg(name: &'static str, value: f64) -> Result<f64, ModelError> {
    if value.is_finite() && value >= 0.0 {
        Ok(value)
    } else {
        Err(ModelError::InvalidArgument {
            name,
            value,
            requirement: "must be finite and >= 0",
        })
    }
}

/// One evaluation of a density that may carry a discrete probability mass at zero
/// alongside its continuous part.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MixedDensity {
    /// Probability of the exact value zero.
    pub atom_weight: f64,
    /// Continuous density evaluated at the query point.
    pub continuous: f64,
}

/// kappa-mu envelope distribution.
///
/// kappa is the dominant-to-scattered power ratio, mu the (real-valued) cluster
/// number, r_hat the rms envelope sqrt(E[R^2]).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KappaMuParams {
    kappa: f64,
    mu: f64,
    r_hat: f64,
}

impl KappaMuParams {
    pub fn new(kappa: f64, mu: f64, r_hat: f64) -> Result<Self, ModelError> {
        Ok(KappaMuParams {
            kappa: require_positive("kappa", kappa)?,
            mu: require_positive("mu", mu)?,
            r_hat: require_positive("r_hat", r_hat)?,
        })
    }

    pub fn kappa(&self) -> f64 {
        self.kappa
    }

    pub fn mu(&self) -> f64 {
        self.mu
    }

    pub fn r_hat(&self) -> f64 {
        self.r_hat
    }

    // ln of the constant factor multiplying rho^mu e^{-mu(1+kappa)rho^2} I_{mu-1}(..)
    fn ln_front(&self) -> f64 {
        let k = self.kappa;
        let mu = self.mu;
        2.0f64.ln() + mu.ln() + 0.5 * (mu + 1.0) * (1.0 + k).ln()
            - 0.5 * (mu - 1.0) * k.ln()
            - mu * k
            - self.r_hat.ln()
    }

    /// ln p_R(r). At r = 0 this is the log of the analytic limit (-inf when the
    /// density vanishes there, +inf when it diverges, see `envelope_pdf`).
    pub fn ln_envelope_pdf(&self, r: f64) -> Result<f64, ModelError> {
        let r = require_nonneg_arg("r", r)?;
        if r == 0.0 {
            return Ok(self.envelope_limit_at_zero().ln());
        }
        let mu = self.mu;
        let k = self.kappa;
        // Work from ln(rho): r/r_hat can under- or overflow f64 while its log stays
        // representable, and the log is what every factor below actually needs.
        let ln_rho = r.ln() - self.r_hat.ln();
        let alpha = mu * (k * (1.0 + k)).sqrt(); // half the Bessel argument slope
        if ln_rho > 300.0 {
            // The Gaussian factor outruns the Bessel growth long before here.
            return Ok(f64::NEG_INFINITY);
        }
        let rho = ln_rho.exp();
        let bessel_arg = 2.0 * alpha * rho;
        let ln_i = if bessel_arg < 1e-290 {
            // leading-order I_{mu-1}(z) = (z/2)^(mu-1) / Gamma(mu); keeps the
            // rho^(mu-1) singular factor in log form when bessel_arg underflows
            (mu - 1.0) * (alpha.ln() + ln_rho) - ln_gamma_unchecked(mu)
        } else {
            ln_bessel_i(mu - 1.0, bessel_arg).expect("order mu-1 > -1, finite arg >= 0")
        };
        Ok(self.ln_front() + mu * ln_rho - mu * (1.0 + k) * rho * rho + ln_i)
    }

    // p_R(r) ~ coef * r^{2mu-1} near zero, so the limit is 0 / finite / +inf as mu
    // passes 1/2.
    fn envelope_limit_at_zero(&self) -> f64 {
        let mu = self.mu;
        if mu > 0.5 {
            0.0
        } else if mu < 0.5 {
            f64::INFINITY
        } else {
            let k = self.kappa;
            let half_arg_coef = mu * (k * (1.0 + k)).sqrt(); // half the Bessel argument slope
            (self.ln_front() + (mu - 1.0) * half_arg_coef.ln() - ln_gamma_unchecked(mu)
                - (2.0 * mu - 1.0) * self.r_hat.ln())
            .exp()
        }
    }

    /// Envelope pdf p_R(r) for r >= 0.
    pub fn envelope_pdf(&self, r: f64) -> Result<f64, ModelError> {
        let r = require_nonneg_arg("r", r)?;
        if r == 0.0 {
            return Ok(self.envelope_limit_at_zero());
        }
        Ok(self.ln_envelope_pdf(r)?.exp())
    }

    /// Power pdf p_W(w) = p_R(sqrt w) / (2 sqrt w) for w >= 0.
    ///
    /// The w = 0 value is the limit of that transformed expression, which behaves
    /// like w^{mu-1}: 0 for mu > 1, (1+kappa) e^{-kappa} / r_hat^2 for mu = 1
    /// (the exponential/Rayleigh-power case), +inf for mu < 1.
    pub fn power_pdf(&self, w: f64) -> Result<f64, ModelError> {
        let w = require_nonneg_arg("w", w)?;
        if w == 0.0 {
            let mu = self.mu;
            return Ok(if mu > 1.0 {
                0.0
            } else if mu < 1.0 {
                f64::INFINITY
            } else {
                let k = self.kappa;
                (1.0 + k) * (-k).exp() / (self.r_hat * self.r_hat)
            });
        }
        let r = w.sqrt();
        Ok((self.ln_envelope_pdf(r)? - (2.0 * r).ln()).exp())
    }

    /// Exact draw: cluster count P ~ Poisson(mu kappa), power G ~ Gamma(mu + P, 1),
    /// envelope R = r_hat sqrt(G / (mu (1 + kappa))).
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        let lambda = self.mu * self.kappa;
        let p: f64 = Poisson::new(lambda)
            .expect("lambda > 0 by construction")
            .sample(rng);
        let g = Gamma::new(self.mu + p, 1.0)
            .expect("shape > 0 by construction")
            .sample(rng);
        self.r_hat * (g / (self.mu * (1.0 + self.kappa))).sqrt()
    }
}

/// kappa-mu Extreme distribution for the normalized envelope rho = R / r_hat: the
/// severe-fading limit kappa -> inf, mu -> 0 at fixed m = mu (1+kappa)^2 / (1+2kappa).
///
/// Carries a probability atom e^{-2m} at rho = 0; the continuous part is
/// 4m I_1(4 m rho) e^{-2m (1 + rho^2)}.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KappaMuExtremeParams {
    m: f64,
}

impl KappaMuExtremeParams {
    pub fn new(m: f64) -> Result<Self, ModelError> {
        Ok(KappaMuExtremeParams {
            m: require_positive("m", m)?,
        })
    }

    pub fn m(&self) -> f64 {
        self.m
    }

    pub fn atom_weight(&self) -> f64 {
        (-2.0 * self.m).exp()
    }

    /// ln of the continuous part at rho > 0 (-inf at rho = 0 since I_1(0) = 0).
    pub fn ln_continuous_pdf(&self, rho: f64) -> Result<f64, ModelError> {
        let rho = require_nonneg_arg("rho", rho)?;
        let m = self.m;
        let arg = 4.0 * m * rho;
        if !arg.is_finite() {
            // see KappaMuParams::ln_envelope_pdf: the e^{-2m rho^2} factor wins
            return Ok(f64::NEG_INFINITY);
        }
        let ln_i = ln_bessel_i(1.0, arg).expect("order 1, finite arg >= 0");
        Ok((4.0 * m).ln() + ln_i - 2.0 * m * (1.0 + rho * rho))
    }

    /// Atom weight plus continuous density at rho.
    pub fn pdf(&self, rho: f64) -> Result<MixedDensity, ModelError> {
        Ok(MixedDensity {
            atom_weight: self.atom_weight(),
            continuous: self.ln_continuous_pdf(rho)?.exp(),
        })
    }

    /// Exact draw: P ~ Poisson(2m); P = 0 gives exactly 0, else rho = sqrt(G / 2m)
    /// with G ~ Gamma(P, 1).
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        let p: f64 = Poisson::new(2.0 * self.m)
            .expect("2m > 0 by construction")
            .sample(rng);
        if p == 0.0 {
            return 0.0;
        }
        let g = Gamma::new(p, 1.0).expect("shape > 0").sample(rng);
        (g / (2.0 * self.m)).sqrt()
    }
}

/// Gamma shadowing weight: shape b, scale omega, density
/// y^(b-1) e^(-y/omega) / (Gamma(b) omega^b) with mean b*omega.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GammaShadowParams {
    b: f64,
    omega: f64,
}

impl GammaShadowParams {
    pub fn new(b: f64, omega: f64) -> Result<Self, ModelError> {
        Ok(GammaShadowParams {
            b: require_positive("b", b)?,
            omega: require_positive("omega", omega)?,
        })
    }

    pub fn b(&self) -> f64 {
        self.b
    }

    pub fn omega(&self) -> f64 {
        self.omega
    }

    pub fn ln_pdf(&self, y: f64) -> Result<f64, ModelError> {
        let y = require_nonneg_arg("y", y)?;
        if y == 0.0 {
            return Ok(self.pdf(0.0)?.ln());
        }
        Ok((self.b - 1.0) * y.ln() - y / self.omega
            - ln_gamma_unchecked(self.b)
            - self.b * self.omega.ln())
    }

    /// pdf at y >= 0; the y = 0 limit is 0 / (1/omega) / +inf as b passes 1.
    pub fn pdf(&self, y: f64) -> Result<f64, ModelError> {
        let y = require_nonneg_arg("y", y)?;
        if y == 0.0 {
            return Ok(if self.b > 1.0 {
                0.0
            } else if self.b < 1.0 {
                f64::INFINITY
            } else {
                1.0 / self.omega
            });
        }
        Ok(self.ln_pdf(y)?.exp())
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        Gamma::new(self.b, self.omega)
            .expect("shape and scale > 0 by construction")
            .sample(rng)
    }
}

/// Nakagami-m figure equivalent to a kappa-mu fade: m = mu (1+kappa)^2 / (1+2kappa),
/// the inverse squared coefficient of variation of the power.
pub fn nakagami_m_equivalent(kappa: f64, mu: f64) -> Result<f64, ModelError> {
    let kappa = require_positive("kappa", kappa)?;
    let mu = require_positive("mu", mu)?;
    Ok(mu * (1.0 + kappa) * (1.0 + kappa) / (1.0 + 2.0 * kappa))
}

/// Recover mu from the power mean and variance at known kappa:
/// mu = (mean^2 / var) (1+2kappa) / (1+kappa)^2. Accepts kappa = 0 (Nakagami case).
pub fn mu_from_moments(
    mean_power: f64,
    var_power: f64,
    kappa: f64,
) -> Result<f64, ModelError> {
    let mean_power = require_positive("mean_power", mean_power)?;
    let var_power = require_positive("var_power", var_power)?;
    if !kappa.is_finite() || kappa < 0.0 {
        return Err(ModelError::InvalidParam {
            name: "kappa",
            value: kappa,
            requirement: "must be finite and >= 0",
        });
    }
    let snr2 = mean_power * mean_power / var_power;
    Ok(snr2 * (1.0 + 2.0 * kappa) / ((1.0 + kappa) * (1.0 + kappa)))
}
