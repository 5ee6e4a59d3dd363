//! Stochastic-optics model of the post-selected interferometer.
//!
//! Classical fields with a random amplitude standing in for vacuum
//! fluctuations: the arm-1 field `E1` is Gaussian with mean `<E1> = E0/sqrt(2)`
//! and RMS width `sigma` (arm 2 may fluctuate too, with width `sigma2`,
//! frozen by default). A square-law detector at the dark port clicks with
//! probability `eta |t E1 - r E0/sqrt(2)|^2`, so Bayes' rule turns a click
//! into a posterior over `E1` whose mean is pulled upward. The conditioned
//! intensity gain
//!
//! ```text
//! D_I = E[E1^2 | click] - E[E1^2]
//!     = [4 sigma^2 t / (sqrt(2) delta) + 2 t^2 sigma^4 / (E0^2 delta^2)]
//!       / [1 + t^2 sigma^2 / (E0^2 delta^2)]
//! ```
//!
//! reduces to `2 sigma^2 (1 + delta) / delta` when post-selection is
//! dominated by the beamsplitter imbalance, i.e. `(sigma/(delta E0))^2 << 1`,
//! and with the vacuum identification `sigma = 1/2` reproduces the quantum
//! weak-value shift `(1 + 1/delta)/2` exactly. The closed form above is
//! exact for the unclamped quadratic likelihood; [`intensity_shift_quadrature`]
//! recomputes it by direct numerical integration and serves as the
//! independent oracle at any parameter values, including where the
//! approximations fail.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::quadrature::{self, QuadOptions};
use crate::quantum::{outside_first_order, InterferometerParams, SQRT_2};

const SQRT_2PI: f64 = 2.506_628_274_631_000_7;

/// Integration window half-width in units of sigma. The integrands are a
/// Gaussian times a quadratic, so the truncated tail mass is < 1e-20.
pub const QUAD_WINDOW_SIGMAS: f64 = 12.0;

/// Gaussian prior of the stochastic field model.
///
/// Units: `|E|^2` is a photon number, so `E0` plays the role of the coherent
/// amplitude `alpha`. `sigma = 0` (a frozen field) is allowed for the moment
/// formulas and Monte Carlo; density evaluations require `sigma > 0`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct NoisePrior {
    mean_e1: f64,
    sigma: f64,
    sigma2: f64,
    e0: f64,
}

/// Vacuum-fluctuation width reproducing coherent-state statistics in
/// photon-number units.
pub const VACUUM_SIGMA: f64 = 0.5;

impl NoisePrior {
    /// Balanced first beamsplitter: `<E1> = E0/sqrt(2)`, arm 2 frozen.
    pub fn new(e0: f64, sigma: f64) -> Result<Self> {
        if !e0.is_finite() || e0 < 0.0 {
            return Err(Error::domain(format!(
                "input amplitude E0 must be finite and non-negative, got {e0}"
            )));
        }
        if !sigma.is_finite() || sigma < 0.0 {
            return Err(Error::domain(format!(
                "fluctuation width sigma must be finite and non-negative, got {sigma}"
            )));
        }
        Ok(NoisePrior {
            mean_e1: e0 / SQRT_2,
            sigma,
            sigma2: 0.0,
            e0,
        })
    }

    /// `sigma = 1/2`, the width that mimics vacuum fluctuations.
    pub fn vacuum(e0: f64) -> Result<Self> {
        NoisePrior::new(e0, VACUUM_SIGMA)
    }

    /// Let arm 2 fluctuate as well.
    pub fn with_sigma2(mut self, sigma2: f64) -> Result<Self> {
        if !sigma2.is_finite() || sigma2 < 0.0 {
            return Err(Error::domain(format!(
                "fluctuation width sigma2 must be finite and non-negative, got {sigma2}"
            )));
        }
        self.sigma2 = sigma2;
        Ok(self)
    }

    /// Override the arm-1 mean. The closed-form posterior normalizer assumes
    /// `<E1> = E0/sqrt(2)`; with an override the posterior is normalized
    /// numerically instead.
    pub fn with_mean_e1(mut self, mean_e1: f64) -> Result<Self> {
        if !mean_e1.is_finite() {
            return Err(Error::domain("mean <E1> must be finite".to_string()));
        }
        self.mean_e1 = mean_e1;
        Ok(self)
    }

    pub fn mean_e1(&self) -> f64 {
        self.mean_e1
    }

    /// Arm-2 field, frozen at its mean `E0/sqrt(2)`.
    pub fn mean_e2(&self) -> f64 {
        self.e0 / SQRT_2
    }

    pub fn sigma(&self) -> f64 {
        self.sigma
    }

    pub fn sigma2(&self) -> f64 {
        self.sigma2
    }

    pub fn e0(&self) -> f64 {
        self.e0
    }

    /// Whether the arm-1 mean still equals `E0/sqrt(2)` (bit-exactly, as set
    /// by the constructor), which is what the printed normalizer requires.
    pub fn has_symmetric_mean(&self) -> bool {
        self.mean_e1 == self.e0 / SQRT_2
    }
}

/// Regime of the stochastic model per the validity ratio `(sigma/(delta E0))^2`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Regime {
    Valid,
    Marginal,
    Broken,
}

impl std::fmt::Display for Regime {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Regime::Valid => write!(f, "valid"),
            Regime::Marginal => write!(f, "marginal"),
            Regime::Broken => write!(f, "broken"),
        }
    }
}

pub const REGIME_VALID_BELOW: f64 = 0.05;
pub const REGIME_MARGINAL_BELOW: f64 = 0.5;

/// The fraction of dark-port clicks attributable to fluctuations rather
/// than imbalance; the model tracks quantum theory only when it is small.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ValidityReport {
    pub ratio: f64,
    pub regime: Regime,
}

/// `ratio = (sigma / (delta E0))^2`, classified against the 0.05 / 0.5
/// thresholds. `sigma = 0` is Valid regardless of `E0`.
pub fn validity(params: &InterferometerParams, prior: &NoisePrior) -> ValidityReport {
    let ratio = if prior.sigma() == 0.0 {
        0.0
    } else {
        let scale = params.delta() * prior.e0();
        if scale == 0.0 {
            f64::INFINITY
        } else {
            (prior.sigma() / scale).powi(2)
        }
    };
    let regime = if ratio < REGIME_VALID_BELOW {
        Regime::Valid
    } else if ratio < REGIME_MARGINAL_BELOW {
        Regime::Marginal
    } else {
        Regime::Broken
    };
    ValidityReport { ratio, regime }
}

/// Gaussian prior density of the arm-1 field.
pub fn prior_pdf(e1: f64, prior: &NoisePrior) -> Result<f64> {
    let sigma = prior.sigma();
    if sigma <= 0.0 {
        return Err(Error::domain(
            "prior density requires sigma > 0".to_string(),
        ));
    }
    let z = (e1 - prior.mean_e1()) / sigma;
    Ok((-0.5 * z * z).exp() / (sigma * SQRT_2PI))
}

/// Dark-port field amplitude for given arm fields: `t E1 - r E2`.
pub fn dark_amplitude(e1: f64, e2: f64, params: &InterferometerParams) -> f64 {
    params.t() * e1 - params.r() * e2
}

/// Click probability of the square-law dark-port detector,
/// `min(1, eta (t E1 - r E0/sqrt(2))^2)`. The quadratic saturates at 1;
/// everywhere this crate relies on the unclamped form the clamp is verified
/// inactive (see [`clamp_engages_within`]).
pub fn click_likelihood(e1: f64, params: &InterferometerParams, prior: &NoisePrior) -> f64 {
    let y = dark_amplitude(e1, prior.mean_e2(), params);
    (params.eta() * y * y).min(1.0)
}

/// Efficiency-free quadratic click likelihood, marginalized over the arm-2
/// fluctuations: `(t E1 - r E0/sqrt(2))^2 + r^2 sigma2^2`. This is the
/// kernel of the Bayes posterior (eta cancels in the normalization).
pub fn likelihood_quadratic(e1: f64, params: &InterferometerParams, prior: &NoisePrior) -> f64 {
    let y = dark_amplitude(e1, prior.mean_e2(), params);
    y * y + (params.r() * prior.sigma2()).powi(2)
}

/// Field value where the click likelihood vanishes: `(r/t) E0/sqrt(2)`,
/// which is `<E1> (1-delta)/(1+delta)` with first-order coefficients.
pub fn posterior_zero(params: &InterferometerParams, prior: &NoisePrior) -> f64 {
    params.r() / params.t() * prior.mean_e2()
}

/// Expected quadratic likelihood under the prior; this is the closed-form
/// Bayes normalizer `E0^2 delta^2 + t^2 sigma^2 (+ r^2 sigma2^2)` when the
/// mean is symmetric.
fn closed_form_normalizer(params: &InterferometerParams, prior: &NoisePrior) -> f64 {
    let m = dark_amplitude(prior.mean_e1(), prior.mean_e2(), params);
    m * m + (params.t() * prior.sigma()).powi(2) + (params.r() * prior.sigma2()).powi(2)
}

fn quad_window(prior: &NoisePrior) -> (f64, f64) {
    let half = QUAD_WINDOW_SIGMAS * prior.sigma();
    (prior.mean_e1() - half, prior.mean_e1() + half)
}

/// Posterior density of the arm-1 field given a dark-port click.
///
/// With the symmetric mean `<E1> = E0/sqrt(2)` the printed normalizer
/// `sigma sqrt(2 pi) (E0^2 delta^2 + sigma^2 t^2)` is used (extended by
/// `r^2 sigma2^2` when arm 2 fluctuates); otherwise the density is
/// normalized by numerical integration over +/- 12 sigma.
pub fn posterior_pdf(e1: f64, params: &InterferometerParams, prior: &NoisePrior) -> Result<f64> {
    if prior.sigma() <= 0.0 {
        return Err(Error::domain(
            "posterior density requires sigma > 0".to_string(),
        ));
    }
    let normalizer = if prior.has_symmetric_mean() {
        closed_form_normalizer(params, prior)
    } else {
        let (a, b) = quad_window(prior);
        let opts = QuadOptions::default();
        quadrature::integrate(
            |e| likelihood_quadratic(e, params, prior) * gaussian_unchecked(e, prior),
            a,
            b,
            &opts,
        )?
        .value
    };
    if !(normalizer > 1e-300) {
        return Err(Error::DegenerateNormalizer(format!(
            "expected likelihood under the prior is {normalizer:.3e}"
        )));
    }
    Ok(likelihood_quadratic(e1, params, prior) * prior_pdf(e1, prior)? / normalizer)
}

fn gaussian_unchecked(e1: f64, prior: &NoisePrior) -> f64 {
    let z = (e1 - prior.mean_e1()) / prior.sigma();
    (-0.5 * z * z).exp() / (prior.sigma() * SQRT_2PI)
}

/// Mean shift of the shifted-Gaussian posterior approximation,
/// `2 t sigma^2 / (E0 delta)`.
pub fn posterior_gaussian_shift(params: &InterferometerParams, prior: &NoisePrior) -> Result<f64> {
    let scale = prior.e0() * params.delta();
    if scale <= 0.0 {
        return Err(Error::domain(
            "gaussian-approximation shift requires E0 > 0".to_string(),
        ));
    }
    Ok(2.0 * params.t() * prior.sigma().powi(2) / scale)
}

/// Shifted-Gaussian approximation of the posterior, renormalized to a unit
/// integral (the derivation's constant prefactor `exp[-2 t^2 sigma^2 /
/// (E0^2 delta^2)]` is dropped). The accompanying [`ValidityReport`] tells
/// the caller whether the approximation is trustworthy; a `Broken` regime is
/// reported, not raised.
pub fn posterior_gaussian_approx(
    e1: f64,
    params: &InterferometerParams,
    prior: &NoisePrior,
) -> Result<(f64, ValidityReport)> {
    if prior.sigma() <= 0.0 {
        return Err(Error::domain(
            "gaussian approximation requires sigma > 0".to_string(),
        ));
    }
    let shift = posterior_gaussian_shift(params, prior)?;
    let z = (e1 - prior.mean_e1() - shift) / prior.sigma();
    let density = (-0.5 * z * z).exp() / (prior.sigma() * SQRT_2PI);
    Ok((density, validity(params, prior)))
}

/// Literal unnormalized shifted-Gaussian form, prefactor included, for
/// comparison against the printed expression.
pub fn posterior_gaussian_unnormalized(
    e1: f64,
    params: &InterferometerParams,
    prior: &NoisePrior,
) -> Result<f64> {
    let (density, _) = posterior_gaussian_approx(e1, params, prior)?;
    let scale = prior.e0() * params.delta();
    let prefactor = (-2.0 * (params.t() * prior.sigma() / scale).powi(2)).exp();
    Ok(prefactor * density)
}

/// Exact factorization of the closed-form shift,
/// `D_I = leading (1 + b) / (1 + a)` with `leading = 4 sigma^2 t / (sqrt(2) delta)`.
/// For small delta, `a ~ sigma^2/(2 E0^2 delta^2)` and `b ~ delta a`.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct ShiftBreakdown {
    pub leading: f64,
    pub a: f64,
    pub b: f64,
}

fn shift_closed_form(params: &InterferometerParams, prior: &NoisePrior, sigma2: f64) -> Result<f64> {
    let delta = params.delta();
    let t = params.t();
    let e0 = prior.e0();
    let sigma = prior.sigma();
    if e0 <= 0.0 {
        return Err(Error::domain(
            "closed-form intensity shift requires E0 > 0".to_string(),
        ));
    }
    let scale2 = (e0 * delta).powi(2);
    let num = 4.0 * sigma.powi(2) * t / (SQRT_2 * delta) + 2.0 * (t * sigma.powi(2)).powi(2) / scale2;
    let den = 1.0 + ((t * sigma).powi(2) + (params.r() * sigma2).powi(2)) / scale2;
    Ok(num / den)
}

/// Closed-form post-selected intensity shift (arm-2 field frozen).
///
/// Exact for the unclamped quadratic likelihood and the symmetric mean;
/// rejects priors with `sigma2 != 0` (use [`intensity_shift_two_arm`]).
pub fn intensity_shift_exact(params: &InterferometerParams, prior: &NoisePrior) -> Result<f64> {
    if prior.sigma2() != 0.0 {
        return Err(Error::domain(
            "intensity_shift_exact assumes a frozen arm 2; use intensity_shift_two_arm for sigma2 > 0"
                .to_string(),
        ));
    }
    shift_closed_form(params, prior, 0.0)
}

/// The `leading (1+b)/(1+a)` factorization of [`intensity_shift_exact`].
pub fn intensity_shift_breakdown(
    params: &InterferometerParams,
    prior: &NoisePrior,
) -> Result<ShiftBreakdown> {
    if prior.e0() <= 0.0 {
        return Err(Error::domain(
            "closed-form intensity shift requires E0 > 0".to_string(),
        ));
    }
    let delta = params.delta();
    let t = params.t();
    let sigma = prior.sigma();
    let leading = 4.0 * sigma.powi(2) * t / (SQRT_2 * delta);
    let a = (t * sigma / (prior.e0() * delta)).powi(2);
    let b = t * sigma.powi(2) / (SQRT_2 * prior.e0().powi(2) * delta);
    Ok(ShiftBreakdown { leading, a, b })
}

/// Closed-form shift with arm-2 fluctuations of width `sigma2`; reduces to
/// [`intensity_shift_exact`] at `sigma2 = 0` and to the same small-ratio
/// approximation when `sigma2 = sigma`.
pub fn intensity_shift_two_arm(params: &InterferometerParams, prior: &NoisePrior) -> Result<f64> {
    shift_closed_form(params, prior, prior.sigma2())
}

/// Small-ratio, small-delta approximation `2 sigma^2 (1 + delta) / delta`.
/// Never fails; the validity report flags where it is meaningless.
pub fn intensity_shift_approx(
    params: &InterferometerParams,
    prior: &NoisePrior,
) -> (f64, ValidityReport) {
    let delta = params.delta();
    let value = 2.0 * prior.sigma().powi(2) * (1.0 + delta) / delta;
    (value, validity(params, prior))
}

/// The approximate shift at the vacuum width `sigma = 1/2`:
/// `(1 + 1/delta)/2`, identical to the quantum prediction.
pub fn intensity_shift_vacuum(delta: f64) -> Result<f64> {
    if !delta.is_finite() || delta <= 0.0 {
        return Err(Error::domain(format!(
            "imbalance delta must be positive, got {delta}"
        )));
    }
    Ok(0.5 * (1.0 + 1.0 / delta))
}

/// Conditional moment `E[E1^k | click]` by adaptive quadrature of the
/// unapproximated posterior over +/- 12 sigma.
pub fn conditional_moment(
    k: u32,
    params: &InterferometerParams,
    prior: &NoisePrior,
) -> Result<f64> {
    if prior.sigma() == 0.0 {
        return Ok(prior.mean_e1().powi(k as i32));
    }
    let (a, b) = quad_window(prior);
    let opts = QuadOptions::default();
    let z = quadrature::integrate(
        |e| likelihood_quadratic(e, params, prior) * gaussian_unchecked(e, prior),
        a,
        b,
        &opts,
    )?
    .value;
    if !(z > 1e-300) {
        return Err(Error::DegenerateNormalizer(format!(
            "expected likelihood under the prior is {z:.3e}"
        )));
    }
    let m = quadrature::integrate(
        |e| e.powi(k as i32) * likelihood_quadratic(e, params, prior) * gaussian_unchecked(e, prior),
        a,
        b,
        &opts,
    )?
    .value;
    Ok(m / z)
}

/// Intensity shift by direct numerical integration:
/// `E[E1^2 | click] - E[E1^2]`, both moments evaluated by adaptive
/// quadrature of the same integrand family. Valid at any `delta`, any
/// validity ratio, and any `sigma2 >= 0`; this is the oracle the closed
/// forms are checked against.
pub fn intensity_shift_quadrature(
    params: &InterferometerParams,
    prior: &NoisePrior,
) -> Result<f64> {
    if prior.sigma() == 0.0 {
        // Frozen field: conditioning cannot move a point mass.
        return Ok(0.0);
    }
    let (a, b) = quad_window(prior);
    let opts = QuadOptions::default();
    let conditioned = conditional_moment(2, params, prior)?;
    let unconditioned = quadrature::integrate(
        |e| e * e * gaussian_unchecked(e, prior),
        a,
        b,
        &opts,
    )?
    .value;
    Ok(conditioned - unconditioned)
}

/// Whether the saturation clamp of [`click_likelihood`] would engage
/// anywhere within `k_sigma` standard deviations of both fields' means.
/// The closed forms and the quadrature oracle assume it does not.
pub fn clamp_engages_within(
    params: &InterferometerParams,
    prior: &NoisePrior,
    k_sigma: f64,
) -> bool {
    let m = dark_amplitude(prior.mean_e1(), prior.mean_e2(), params).abs();
    let spread = params.t() * prior.sigma() + params.r().abs() * prior.sigma2();
    let max_dark = m + k_sigma * spread;
    params.eta() * max_dark * max_dark > 1.0
}

/// Validity flag of the first-order formulas, re-exported for report builders.
pub fn first_order_flag(params: &InterferometerParams) -> bool {
    outside_first_order(params.delta())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quantum::{quantum_shift, BsMode};
    use approx::{assert_abs_diff_eq, assert_relative_eq};

    fn params(delta: f64, mode: BsMode) -> InterferometerParams {
        InterferometerParams::new(delta, mode).unwrap()
    }

    #[test]
    fn prior_peak_and_normalization() {
        // <E1> = 10 as in the density figure: E0 = 10 sqrt(2).
        let prior = NoisePrior::new(10.0 * SQRT_2, 0.5).unwrap();
        assert_abs_diff_eq!(prior.mean_e1(), 10.0, epsilon = 1e-12);
        let peak = prior_pdf(prior.mean_e1(), &prior).unwrap();
        assert_abs_diff_eq!(peak, 1.0 / (0.5 * SQRT_2PI), epsilon = 1e-15);

        let opts = QuadOptions::default();
        let total = quadrature::integrate(
            |e| prior_pdf(e, &prior).unwrap(),
            prior.mean_e1() - 10.0 * 0.5,
            prior.mean_e1() + 10.0 * 0.5,
            &opts,
        )
        .unwrap()
        .value;
        assert_abs_diff_eq!(total, 1.0, epsilon = 1e-10);
    }

    #[test]
    fn prior_pdf_requires_positive_sigma() {
        let prior = NoisePrior::new(10.0, 0.0).unwrap();
        assert!(prior_pdf(7.0, &prior).is_err());
    }

    #[test]
    fn likelihood_zero_and_mean_value() {
        let p = params(0.1, BsMode::FirstOrder).with_eta(1.0).unwrap();
        let prior = NoisePrior::new(10.0, 0.5).unwrap();
        let zero = posterior_zero(&p, &prior);
        assert_abs_diff_eq!(click_likelihood(zero, &p, &prior), 0.0, epsilon = 1e-25);
        assert_abs_diff_eq!(zero, prior.mean_e1() * 0.9 / 1.1, epsilon = 1e-12);
        // At the prior mean the dark amplitude is E0 delta = 1.
        assert_abs_diff_eq!(
            dark_amplitude(prior.mean_e1(), prior.mean_e2(), &p),
            1.0,
            epsilon = 1e-12
        );
        assert_abs_diff_eq!(click_likelihood(prior.mean_e1(), &p, &prior), 1.0, epsilon = 1e-12);
        let dead = params(0.1, BsMode::FirstOrder).with_eta(0.0).unwrap();
        assert_eq!(click_likelihood(8.0, &dead, &prior), 0.0);
    }

    #[test]
    fn posterior_integrates_to_one_symmetric_and_overridden() {
        let p = params(0.1, BsMode::FirstOrder);
        let prior = NoisePrior::new(10.0, 0.5).unwrap();
        let opts = QuadOptions::default();
        let (a, b) = quad_window(&prior);
        let total = quadrature::integrate(|e| posterior_pdf(e, &p, &prior).unwrap(), a, b, &opts)
            .unwrap()
            .value;
        assert_abs_diff_eq!(total, 1.0, epsilon = 1e-8);

        let shifted = prior.with_mean_e1(6.5).unwrap();
        assert!(!shifted.has_symmetric_mean());
        let (a, b) = quad_window(&shifted);
        let total = quadrature::integrate(|e| posterior_pdf(e, &p, &shifted).unwrap(), a, b, &opts)
            .unwrap()
            .value;
        assert_abs_diff_eq!(total, 1.0, epsilon = 1e-8);
    }

    #[test]
    fn posterior_mean_collapses_with_sigma() {
        let p = params(0.1, BsMode::FirstOrder);
        let prior = NoisePrior::new(10.0, 1e-6).unwrap();
        let mean = conditional_moment(1, &p, &prior).unwrap();
        assert_abs_diff_eq!(mean, prior.mean_e1(), epsilon = 1e-5);
    }

    #[test]
    fn gaussian_shift_frozen_value_and_scalings() {
        let p = params(0.1, BsMode::FirstOrder);
        let prior = NoisePrior::new(10.0, 0.5).unwrap();
        // 2 t sigma^2 / (E0 delta) with t = 1.1/sqrt(2).
        assert_abs_diff_eq!(
            posterior_gaussian_shift(&p, &prior).unwrap(),
            0.388_908_729_652_601_15,
            epsilon = 1e-15
        );
        // Cross-check against the quadrature posterior mean within O(ratio).
        let ratio = validity(&p, &prior).ratio;
        let quad_shift = conditional_moment(1, &p, &prior).unwrap() - prior.mean_e1();
        assert!(
            (posterior_gaussian_shift(&p, &prior).unwrap() - quad_shift).abs()
                < ratio * quad_shift.abs()
        );

        let tiny = NoisePrior::new(10.0, 1e-9).unwrap();
        assert!(posterior_gaussian_shift(&p, &tiny).unwrap() < 1e-17);

        // 1/delta scaling at fixed sigma, E0.
        let s1 = posterior_gaussian_shift(&params(0.05, BsMode::FirstOrder), &prior).unwrap();
        let s2 = posterior_gaussian_shift(&params(0.1, BsMode::FirstOrder), &prior).unwrap();
        let t1 = params(0.05, BsMode::FirstOrder).t();
        let t2 = params(0.1, BsMode::FirstOrder).t();
        assert_relative_eq!(s1 / s2, 2.0 * t1 / t2, epsilon = 1e-12);
    }

    #[test]
    fn gaussian_approx_reports_regime_and_renormalizes() {
        let p = params(0.05, BsMode::FirstOrder);
        let prior = NoisePrior::new(2.0, 0.5).unwrap();
        let (density, report) = posterior_gaussian_approx(prior.mean_e1(), &p, &prior).unwrap();
        assert_eq!(report.regime, Regime::Broken);
        assert!(density > 0.0);
        // Renormalized approximation integrates to 1 even where it is invalid.
        let opts = QuadOptions::default();
        let shift = posterior_gaussian_shift(&p, &prior).unwrap();
        let total = quadrature::integrate(
            |e| posterior_gaussian_approx(e, &p, &prior).unwrap().0,
            prior.mean_e1() + shift - 12.0 * 0.5,
            prior.mean_e1() + shift + 12.0 * 0.5,
            &opts,
        )
        .unwrap()
        .value;
        assert_abs_diff_eq!(total, 1.0, epsilon = 1e-10);
        // The literal unnormalized form is the renormalized one times the
        // dropped prefactor.
        let lit = posterior_gaussian_unnormalized(9.0, &p, &prior).unwrap();
        let (ren, _) = posterior_gaussian_approx(9.0, &p, &prior).unwrap();
        let pref = (-2.0 * (p.t() * 0.5 / (2.0 * 0.05)).powi(2)).exp();
        assert_relative_eq!(lit, ren * pref, epsilon = 1e-14);
    }

    #[test]
    fn exact_shift_reference_values() {
        let p = params(0.1, BsMode::FirstOrder);
        let prior = NoisePrior::new(10.0, 0.5).unwrap();
        let d = intensity_shift_exact(&p, &prior).unwrap();
        assert_abs_diff_eq!(d, 4.843_105_320_304_017, epsilon = 1e-12);
        // Quadrature oracle agrees to the stated tolerance.
        let q = intensity_shift_quadrature(&p, &prior).unwrap();
        assert_relative_eq!(d, q, epsilon = 1e-6);
        // In the validity limit the shift reaches the quantum value.
        let bright = NoisePrior::new(1000.0, 0.5).unwrap();
        let d = intensity_shift_exact(&p, &bright).unwrap();
        assert_relative_eq!(d, 5.5, epsilon = 1e-3);
        // sigma -> 0: no fluctuations, no shift.
        let frozen = NoisePrior::new(10.0, 0.0).unwrap();
        assert_eq!(intensity_shift_exact(&p, &frozen).unwrap(), 0.0);
    }

    #[test]
    fn breakdown_factorization_is_exact() {
        for &(delta, e0, sigma) in &[(0.1, 10.0, 0.5), (0.3, 4.0, 1.0), (1.0, 10.0, 0.5)] {
            let p = params(delta, BsMode::FirstOrder);
            let prior = NoisePrior::new(e0, sigma).unwrap();
            let d = intensity_shift_exact(&p, &prior).unwrap();
            let parts = intensity_shift_breakdown(&p, &prior).unwrap();
            assert_relative_eq!(
                d,
                parts.leading * (1.0 + parts.b) / (1.0 + parts.a),
                epsilon = 1e-14
            );
        }
    }

    #[test]
    fn two_arm_reduction_and_ordering() {
        let p = params(0.1, BsMode::FirstOrder);
        let frozen2 = NoisePrior::new(10.0, 0.5).unwrap();
        assert_eq!(
            intensity_shift_two_arm(&p, &frozen2).unwrap(),
            intensity_shift_exact(&p, &frozen2).unwrap()
        );
        let both = frozen2.with_sigma2(0.5).unwrap();
        let d2 = intensity_shift_two_arm(&p, &both).unwrap();
        assert!(d2 < intensity_shift_exact(&p, &frozen2).unwrap());
        // Quadrature handles the marginalized arm-2 fluctuations too.
        assert_relative_eq!(
            d2,
            intensity_shift_quadrature(&p, &both).unwrap(),
            epsilon = 1e-6
        );
        assert!(intensity_shift_exact(&p, &both).is_err());
        // sigma2 = sigma stays within O(ratio) of the approximation.
        let bright = NoisePrior::new(100.0, 0.5).unwrap().with_sigma2(0.5).unwrap();
        let ratio = validity(&p, &bright).ratio;
        let (approx, _) = intensity_shift_approx(&p, &bright);
        let d = intensity_shift_two_arm(&p, &bright).unwrap();
        assert!((d - approx).abs() / approx < 3.0 * ratio);
    }

    #[test]
    fn approx_shift_examples() {
        let prior = NoisePrior::new(10.0, 0.5).unwrap();
        let (v, _) = intensity_shift_approx(&params(0.1, BsMode::FirstOrder), &prior);
        assert_abs_diff_eq!(v, 5.5, epsilon = 1e-12);
        // Formula value at delta = 1 is 2 sigma^2 * 2 = 1.0, flagged by the
        // Broken/first-order machinery (the exact base shift there is 1/2).
        let p1 = params(1.0, BsMode::ExactUnitary);
        let (v, report) = intensity_shift_approx(&p1, &prior);
        assert_abs_diff_eq!(v, 1.0, epsilon = 1e-12);
        assert!(first_order_flag(&p1));
        assert!(report.ratio > 0.0);
        let wide = NoisePrior::new(10.0, 1.0).unwrap();
        let (v, _) = intensity_shift_approx(&params(0.1, BsMode::FirstOrder), &wide);
        assert_abs_diff_eq!(v, 22.0, epsilon = 1e-12);
    }

    #[test]
    fn vacuum_shift_equals_quantum_shift() {
        assert_abs_diff_eq!(intensity_shift_vacuum(0.1).unwrap(), 5.5, epsilon = 1e-13);
        assert_abs_diff_eq!(
            intensity_shift_vacuum(1.0 / 9.0).unwrap(),
            5.0,
            epsilon = 1e-12
        );
        assert_abs_diff_eq!(intensity_shift_vacuum(1.0).unwrap(), 1.0, epsilon = 0.0);
        for &delta in &[0.013, 0.1, 0.37, 0.82, 1.0] {
            assert_abs_diff_eq!(
                intensity_shift_vacuum(delta).unwrap(),
                quantum_shift(delta).unwrap(),
                epsilon = 1e-13
            );
        }
        assert!(intensity_shift_vacuum(0.0).is_err());
    }

    #[test]
    fn quadrature_base_shift_at_full_imbalance() {
        let p = params(1.0, BsMode::ExactUnitary);
        let prior = NoisePrior::new(10.0, 0.5).unwrap();
        let d = intensity_shift_quadrature(&p, &prior).unwrap();
        assert_abs_diff_eq!(d, 0.5, epsilon = 0.02);
        // With t^2 = r^2 = 1/2 the closed form collapses to exactly 2 sigma^2.
        assert_abs_diff_eq!(intensity_shift_exact(&p, &prior).unwrap(), 0.5, epsilon = 1e-12);
    }

    #[test]
    fn quadrature_sigma_zero_limit() {
        let p = params(0.1, BsMode::FirstOrder);
        let frozen = NoisePrior::new(10.0, 0.0).unwrap();
        assert_eq!(intensity_shift_quadrature(&p, &frozen).unwrap(), 0.0);
        let tiny = NoisePrior::new(10.0, 1e-5).unwrap();
        assert!(intensity_shift_quadrature(&p, &tiny).unwrap() < 1e-8);
    }

    #[test]
    fn validity_examples() {
        let p = params(0.1, BsMode::FirstOrder);
        let prior = NoisePrior::new(10.0, 0.5).unwrap();
        let report = validity(&p, &prior);
        assert_abs_diff_eq!(report.ratio, 0.25, epsilon = 1e-14);
        assert_eq!(report.regime, Regime::Marginal);

        let frozen = NoisePrior::new(10.0, 0.0).unwrap();
        let report = validity(&p, &frozen);
        assert_eq!(report.ratio, 0.0);
        assert_eq!(report.regime, Regime::Valid);

        let dark = NoisePrior::new(0.0, 0.5).unwrap();
        assert_eq!(validity(&p, &dark).regime, Regime::Broken);
    }

    #[test]
    fn deviation_from_quantum_shrinks_with_brightness() {
        let p = params(0.1, BsMode::FirstOrder);
        let dq = quantum_shift(0.1).unwrap();
        let mut last = f64::INFINITY;
        for &e0 in &[2.0, 5.0, 10.0, 30.0, 80.0, 200.0] {
            let prior = NoisePrior::new(e0, 0.5).unwrap();
            let gap = (intensity_shift_quadrature(&p, &prior).unwrap() - dq).abs();
            assert!(gap <= last + 1e-12, "gap not monotone at E0 = {e0}");
            last = gap;
        }
    }

    #[test]
    fn clamp_detection() {
        let p = params(0.1, BsMode::FirstOrder).with_eta(1.0).unwrap();
        let prior = NoisePrior::new(10.0, 0.5).unwrap();
        // eta = 1 with E0 delta = 1 saturates immediately.
        assert!(clamp_engages_within(&p, &prior, 1.0));
        let small = p.with_eta(1e-3).unwrap();
        assert!(!clamp_engages_within(&small, &prior, 12.0));
    }
}
