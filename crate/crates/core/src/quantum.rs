//! Closed-form quantum predictions for the imbalanced Mach-Zehnder
//! interferometer.
//!
//! The second beamsplitter is parametrized by an imbalance `delta` through
//! `t - r = sqrt(2) * delta`. Post-selecting on a dark-port detection makes
//! the conditioned photon number in arm 1 (the weak value) much larger than
//! the unconditioned mean: the intensity shift is `1/2 + 1/(2 delta)` to
//! first order, an amplification of order `1/delta`.
//!
//! Everything in this module is a first-order-in-delta formula. The
//! truncated Fock-space engine in [`crate::fock_oracle`] validates these
//! formulas to all orders.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub const SQRT_2: f64 = std::f64::consts::SQRT_2;

/// First-order formulas are accurate to ~10% of the leading 1/(2 delta)
/// term up to here; callers get a machine-readable flag beyond it.
pub const FIRST_ORDER_DELTA_MAX: f64 = 0.2;

/// How the beamsplitter coefficients `(t, r)` derive from the imbalance.
///
/// Both modes satisfy `t - r = sqrt(2) * delta` exactly. `FirstOrder` uses
/// the printed small-delta forms `t = (1+delta)/sqrt(2)`,
/// `r = (1-delta)/sqrt(2)` (not unitary: `t^2 + r^2 = 1 + delta^2`), while
/// `ExactUnitary` additionally enforces `t^2 + r^2 = 1`, which is required
/// for meaningful `delta = 1` checks (there `r = -t = -1/sqrt(2)`).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum BsMode {
    FirstOrder,
    ExactUnitary,
}

impl std::fmt::Display for BsMode {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            BsMode::FirstOrder => write!(f, "first-order"),
            BsMode::ExactUnitary => write!(f, "exact-unitary"),
        }
    }
}

/// Beamsplitter coefficients `(t, r)` for imbalance `delta` in the given mode.
///
/// `ExactUnitary` solves `t - r = sqrt(2) delta`, `t^2 + r^2 = 1` with
/// `t >= |r|`.
pub fn bs_coefficients(delta: f64, mode: BsMode) -> Result<(f64, f64)> {
    if !delta.is_finite() || delta <= 0.0 || delta > 1.0 {
        return Err(Error::domain(format!(
            "imbalance delta must lie in (0, 1], got {delta}"
        )));
    }
    Ok(match mode {
        BsMode::FirstOrder => ((1.0 + delta) / SQRT_2, (1.0 - delta) / SQRT_2),
        BsMode::ExactUnitary => {
            let t = (SQRT_2 * delta + (2.0 - 2.0 * delta * delta).sqrt()) / 2.0;
            (t, t - SQRT_2 * delta)
        }
    })
}

/// Interferometer configuration: imbalance, derived beamsplitter
/// coefficients, and dark-port detector efficiency.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct InterferometerParams {
    delta: f64,
    bs_mode: BsMode,
    t: f64,
    r: f64,
    eta: f64,
}

impl InterferometerParams {
    /// Unit detector efficiency; use [`with_eta`](Self::with_eta) to change it.
    pub fn new(delta: f64, bs_mode: BsMode) -> Result<Self> {
        let (t, r) = bs_coefficients(delta, bs_mode)?;
        Ok(InterferometerParams {
            delta,
            bs_mode,
            t,
            r,
            eta: 1.0,
        })
    }

    /// `eta = 0` is a dead detector: allowed, clicks never happen.
    pub fn with_eta(mut self, eta: f64) -> Result<Self> {
        if !eta.is_finite() || eta < 0.0 || eta > 1.0 {
            return Err(Error::domain(format!(
                "detector efficiency eta must lie in [0, 1], got {eta}"
            )));
        }
        self.eta = eta;
        Ok(self)
    }

    pub fn delta(&self) -> f64 {
        self.delta
    }

    pub fn bs_mode(&self) -> BsMode {
        self.bs_mode
    }

    pub fn t(&self) -> f64 {
        self.t
    }

    pub fn r(&self) -> f64 {
        self.r
    }

    pub fn eta(&self) -> f64 {
        self.eta
    }
}

/// Real, non-negative coherent-state amplitude; `|alpha|^2` is a photon
/// number.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Serialize)]
pub struct CoherentAmplitude(f64);

impl CoherentAmplitude {
    pub fn new(alpha: f64) -> Result<Self> {
        if !alpha.is_finite() || alpha < 0.0 {
            return Err(Error::domain(format!(
                "coherent amplitude must be finite and non-negative, got {alpha}"
            )));
        }
        Ok(CoherentAmplitude(alpha))
    }

    pub fn value(&self) -> f64 {
        self.0
    }

    /// Mean photon number `|alpha|^2`.
    pub fn photons(&self) -> f64 {
        self.0 * self.0
    }
}

fn check_delta_positive(delta: f64) -> Result<()> {
    if !delta.is_finite() || delta <= 0.0 {
        return Err(Error::domain(format!(
            "imbalance delta must be positive, got {delta}"
        )));
    }
    Ok(())
}

/// Weak value of the arm-1 photon number for a single-photon input,
/// post-selected on the dark port: `1/2 + 1/(2 delta)`.
pub fn weak_value_fock(delta: f64) -> Result<f64> {
    check_delta_positive(delta)?;
    Ok(0.5 + 0.5 / delta)
}

/// Weak value of the arm-1 photon number for a coherent-state input with an
/// extra dark-port photon heralded: `|alpha|^2/2 + 1/2 + 1/(2 delta)`.
///
/// `alpha = 0` is rejected: the dark-port amplitude `alpha * delta`
/// vanishes and the post-selection becomes degenerate at first order.
pub fn weak_value_coherent(alpha: CoherentAmplitude, delta: f64) -> Result<f64> {
    check_delta_positive(delta)?;
    if alpha.value() == 0.0 {
        return Err(Error::DegeneratePostSelection {
            magnitude: 0.0,
            threshold: f64::MIN_POSITIVE,
        });
    }
    Ok(alpha.photons() / 2.0 + 0.5 + 0.5 / delta)
}

/// Unconditioned mean photon number in arm 1: `|alpha|^2 / 2`.
pub fn mean_photons_arm1(alpha: CoherentAmplitude) -> f64 {
    alpha.photons() / 2.0
}

/// Post-selected intensity shift `D_I = <n1>_w - <n1> = 1/2 + 1/(2 delta)`,
/// independent of `alpha` at first order.
///
/// Evaluates at any `delta > 0`; beyond [`FIRST_ORDER_DELTA_MAX`] the
/// first-order form overshoots (at `delta = 1` it gives 1 where the exact
/// base shift is 1/2), see [`outside_first_order`].
pub fn quantum_shift(delta: f64) -> Result<f64> {
    check_delta_positive(delta)?;
    Ok(0.5 + 0.5 / delta)
}

/// Weak value of the photon number in the unmeasured arm,
/// `1 - weak_value_fock(delta)`; negative (anomalous) for `delta < 1`.
pub fn arm2_weak_value_fock(delta: f64) -> Result<f64> {
    Ok(1.0 - weak_value_fock(delta)?)
}

/// True when the arm-2 weak value leaves the photon-number spectrum, i.e.
/// `|alpha|^2 + 1 <= 1/delta` (boundary inclusive).
pub fn is_anomalous(alpha: CoherentAmplitude, delta: f64) -> bool {
    alpha.photons() + 1.0 <= 1.0 / delta
}

/// Machine-readable validity flag: the first-order formulas carry O(delta)
/// corrections exceeding ~10% of the amplified term beyond this point.
pub fn outside_first_order(delta: f64) -> bool {
    delta > FIRST_ORDER_DELTA_MAX
}
