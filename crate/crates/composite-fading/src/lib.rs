//! Composite fading distributions: kappa-mu and kappa-mu Extreme multipath with
//! gamma-distributed shadowing.
//!
//! The library evaluates each composite density three independent ways and is built so
//! the three can be cross-checked against each other:
//!
//! * `composite::composite_envelope_pdf_numeric` compounds the conditional multipath
//!   density against the gamma shadowing weight by adaptive quadrature. This is the
//!   ground truth everything else is measured against.
//! * `composite::kappa_mu_gamma_envelope_pdf_series` and
//!   `composite::kmu_extreme_gamma_envelope_pdf_series` evaluate the closed-form
//!   Bessel-K series for the same densities.
//! * `validation::sample_composite` draws from the exact compound construction
//!   (gamma scale draw, then the conditional Poisson-gamma multipath draw), and
//!   `validation::goodness_of_fit` ties the sampler back to the quadrature CDF.
//!
//! All density assembly happens in log space; see `special_fns` for the scalar
//! building blocks (ln-gamma, modified Bessel I and K including scaled and ln forms).

pub mod base_models;
pub mod composite;
pub mod quadrature;
pub mod special_fns;
pub mod validation;
