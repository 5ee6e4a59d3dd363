//! Brute-force truncated two-mode Fock-space engine.
//!
//! Validates the first-order weak-value formulas of [`crate::quantum`] to
//! all orders in the imbalance. States live in the arm basis (modes 1 and 2
//! inside the interferometer), where the number operator being measured is
//! diagonal; the dark output mode is the combination `a_D = t a_1 - r a_2`
//! fixed by the beamsplitter transformation, so post-selecting a dark-port
//! photon means evaluating
//!
//! ```text
//! <n1>_w = <i| a_D n1 |i> / <i| a_D |i>
//! ```
//!
//! with no interferometer time evolution and no first-order truncation.
//! For a balanced input the coherent eigenvalue algebra gives
//! `<n1>_w = |alpha|^2/2 + t/(sqrt(2) delta)` for either coefficient mode;
//! tests pin the matrix numerics against that identity.

use ndarray::Array2;
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::quantum::{bs_coefficients, BsMode, CoherentAmplitude, SQRT_2};

/// Truncation leakage bound guaranteed by the constructor guard.
pub const MAX_LEAKAGE: f64 = 1e-8;

/// Overlap magnitude below which post-selection is considered degenerate.
pub const POST_SELECTION_EPS: f64 = 1e-12;

/// Dense two-mode state on a per-mode Fock cutoff (inclusive).
///
/// Amplitudes are indexed `[n1, n2]`. States are not required to be
/// normalized; the norm is tracked explicitly.
#[derive(Debug, Clone)]
pub struct TwoModeState {
    cutoff: usize,
    amps: Array2<Complex64>,
}

impl TwoModeState {
    pub fn zero(cutoff: usize) -> Result<Self> {
        if cutoff < 1 {
            return Err(Error::domain("Fock cutoff must be at least 1".to_string()));
        }
        Ok(TwoModeState {
            cutoff,
            amps: Array2::zeros((cutoff + 1, cutoff + 1)),
        })
    }

    pub fn cutoff(&self) -> usize {
        self.cutoff
    }

    pub fn amplitude(&self, n1: usize, n2: usize) -> Complex64 {
        self.amps[(n1, n2)]
    }

    pub fn set_amplitude(&mut self, n1: usize, n2: usize, value: Complex64) {
        self.amps[(n1, n2)] = value;
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amps.iter().map(|a| a.norm_sqr()).sum()
    }

    pub fn norm(&self) -> f64 {
        self.norm_sqr().sqrt()
    }

    /// `<self|other>`.
    pub fn inner(&self, other: &TwoModeState) -> Complex64 {
        self.amps
            .iter()
            .zip(other.amps.iter())
            .map(|(a, b)| a.conj() * b)
            .sum()
    }

    /// Multiply each amplitude by `f(n1, n2)`; covers every diagonal
    /// operator (photon numbers in particular).
    pub fn apply_diagonal(&self, f: impl Fn(usize, usize) -> f64) -> TwoModeState {
        let mut out = self.clone();
        for ((n1, n2), a) in out.amps.indexed_iter_mut() {
            *a *= f(n1, n2);
        }
        out
    }

    /// Apply a single-mode operator matrix to mode 1 or mode 2.
    pub fn apply_mode(&self, op: &ModeOperator, mode: Mode) -> TwoModeState {
        let m = op.matrix();
        let dim = self.cutoff + 1;
        assert_eq!(m.nrows(), dim, "operator cutoff mismatch");
        let mut out = TwoModeState {
            cutoff: self.cutoff,
            amps: Array2::zeros((dim, dim)),
        };
        for ((i, j), v) in m.indexed_iter() {
            if *v == 0.0 {
                continue;
            }
            for k in 0..dim {
                match mode {
                    Mode::Arm1 => out.amps[(i, k)] += *v * self.amps[(j, k)],
                    Mode::Arm2 => out.amps[(k, i)] += *v * self.amps[(k, j)],
                }
            }
        }
        out
    }

    /// Dark-mode annihilation `t a_1 - r a_2` applied in one pass.
    pub fn apply_dark_annihilation(&self, t: f64, r: f64) -> TwoModeState {
        let dim = self.cutoff + 1;
        let mut out = TwoModeState {
            cutoff: self.cutoff,
            amps: Array2::zeros((dim, dim)),
        };
        for n1 in 0..dim {
            for n2 in 0..dim {
                let mut v = Complex64::new(0.0, 0.0);
                if n1 + 1 < dim {
                    v += t * ((n1 + 1) as f64).sqrt() * self.amps[(n1 + 1, n2)];
                }
                if n2 + 1 < dim {
                    v -= r * ((n2 + 1) as f64).sqrt() * self.amps[(n1, n2 + 1)];
                }
                out.amps[(n1, n2)] = v;
            }
        }
        out
    }

    /// Dark-mode creation `t a_1^dag - r a_2^dag`; amplitude pushed past the
    /// cutoff is dropped, consistent with the truncation.
    pub fn apply_dark_creation(&self, t: f64, r: f64) -> TwoModeState {
        let dim = self.cutoff + 1;
        let mut out = TwoModeState {
            cutoff: self.cutoff,
            amps: Array2::zeros((dim, dim)),
        };
        for n1 in 0..dim {
            for n2 in 0..dim {
                let mut v = Complex64::new(0.0, 0.0);
                if n1 > 0 {
                    v += t * (n1 as f64).sqrt() * self.amps[(n1 - 1, n2)];
                }
                if n2 > 0 {
                    v -= r * (n2 as f64).sqrt() * self.amps[(n1, n2 - 1)];
                }
                out.amps[(n1, n2)] = v;
            }
        }
        out
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Mode {
    Arm1,
    Arm2,
}

/// Which elementary single-mode operator a [`ModeOperator`] matrix holds.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OperatorKind {
    Annihilation,
    Creation,
    Number,
}

/// Dense single-mode operator matrix on the truncated Fock ladder.
#[derive(Debug, Clone)]
pub struct ModeOperator {
    kind: OperatorKind,
    matrix: Array2<f64>,
}

impl ModeOperator {
    /// `a[n-1, n] = sqrt(n)`, all other entries zero.
    pub fn annihilation(cutoff: usize) -> Self {
        let dim = cutoff + 1;
        let mut m = Array2::zeros((dim, dim));
        for n in 1..dim {
            m[(n - 1, n)] = (n as f64).sqrt();
        }
        ModeOperator {
            kind: OperatorKind::Annihilation,
            matrix: m,
        }
    }

    pub fn creation(cutoff: usize) -> Self {
        ModeOperator {
            kind: OperatorKind::Creation,
            matrix: Self::annihilation(cutoff).matrix.t().to_owned(),
        }
    }

    pub fn number(cutoff: usize) -> Self {
        let dim = cutoff + 1;
        let mut m = Array2::zeros((dim, dim));
        for n in 0..dim {
            m[(n, n)] = n as f64;
        }
        ModeOperator {
            kind: OperatorKind::Number,
            matrix: m,
        }
    }

    pub fn kind(&self) -> OperatorKind {
        self.kind
    }

    pub fn matrix(&self) -> &Array2<f64> {
        &self.matrix
    }
}

/// Truncated coherent amplitudes `e^{-|alpha|^2/2} alpha^n / sqrt(n!)`.
fn coherent_column(alpha: f64, cutoff: usize) -> Vec<f64> {
    let mut col = Vec::with_capacity(cutoff + 1);
    let mut c = (-alpha * alpha / 2.0).exp();
    col.push(c);
    for n in 1..=cutoff {
        c *= alpha / (n as f64).sqrt();
        col.push(c);
    }
    col
}

/// Product coherent state `|alpha_1>|alpha_2>` in the truncated space,
/// renormalized to unit norm after the truncation-leakage guard
/// (`alpha^2 <= cutoff/4` per mode, and measured leakage below
/// [`MAX_LEAKAGE`]) has passed.
pub fn coherent_two_mode(alpha_1: f64, alpha_2: f64, cutoff: usize) -> Result<TwoModeState> {
    let mut state = TwoModeState::zero(cutoff)?;
    for &alpha in &[alpha_1, alpha_2] {
        if !alpha.is_finite() {
            return Err(Error::domain("coherent amplitude must be finite".to_string()));
        }
        if alpha * alpha > cutoff as f64 / 4.0 {
            return Err(Error::CutoffTooSmall {
                alpha,
                cutoff,
                leakage: f64::NAN,
            });
        }
    }
    let col1 = coherent_column(alpha_1, cutoff);
    let col2 = coherent_column(alpha_2, cutoff);
    for (n1, c1) in col1.iter().enumerate() {
        for (n2, c2) in col2.iter().enumerate() {
            state.amps[(n1, n2)] = Complex64::new(c1 * c2, 0.0);
        }
    }
    let norm_sqr = state.norm_sqr();
    let leakage = 1.0 - norm_sqr;
    if leakage >= MAX_LEAKAGE {
        return Err(Error::CutoffTooSmall {
            alpha: alpha_1.abs().max(alpha_2.abs()),
            cutoff,
            leakage,
        });
    }
    let scale = 1.0 / norm_sqr.sqrt();
    state.amps.mapv_inplace(|a| a * scale);
    Ok(state)
}

fn weak_value_ratio(
    pre: &TwoModeState,
    post_bra: &TwoModeState,
    observable: impl Fn(usize, usize) -> f64,
) -> Result<f64> {
    let denominator = post_bra.inner(pre);
    if denominator.norm() < POST_SELECTION_EPS {
        return Err(Error::DegeneratePostSelection {
            magnitude: denominator.norm(),
            threshold: POST_SELECTION_EPS,
        });
    }
    let numerator = post_bra.inner(&pre.apply_diagonal(observable));
    Ok((numerator / denominator).re)
}

fn arm_weak_value(
    alpha: CoherentAmplitude,
    delta: f64,
    bs_mode: BsMode,
    cutoff: usize,
    observable: impl Fn(usize, usize) -> f64,
) -> Result<f64> {
    let (t, r) = bs_coefficients(delta, bs_mode)?;
    let arm = alpha.value() / SQRT_2;
    let pre = coherent_two_mode(arm, arm, cutoff)?;
    // A dark-port detection heralds an extra dark-mode photon:
    // |f~> = a_D^dag |i>, unnormalized.
    let post = pre.apply_dark_creation(t, r);
    weak_value_ratio(&pre, &post, observable)
}

/// Weak value of the arm-1 photon number for a coherent input, exact in
/// `delta` up to truncation error.
pub fn weak_value_exact(
    alpha: CoherentAmplitude,
    delta: f64,
    bs_mode: BsMode,
    cutoff: usize,
) -> Result<f64> {
    arm_weak_value(alpha, delta, bs_mode, cutoff, |n1, _| n1 as f64)
}

/// Arm-2 companion of [`weak_value_exact`].
pub fn weak_value_exact_arm2(
    alpha: CoherentAmplitude,
    delta: f64,
    bs_mode: BsMode,
    cutoff: usize,
) -> Result<f64> {
    arm_weak_value(alpha, delta, bs_mode, cutoff, |_, n2| n2 as f64)
}

fn single_photon_states(delta: f64, bs_mode: BsMode) -> Result<(TwoModeState, TwoModeState)> {
    let (t, r) = bs_coefficients(delta, bs_mode)?;
    // |i> = (|1,0> + |0,1>)/sqrt(2); the dark-port photon state is
    // a_D^dagger |0,0> = t |1,0> - r |0,1>.
    let mut pre = TwoModeState::zero(2)?;
    pre.set_amplitude(1, 0, Complex64::new(1.0 / SQRT_2, 0.0));
    pre.set_amplitude(0, 1, Complex64::new(1.0 / SQRT_2, 0.0));
    let mut post = TwoModeState::zero(2)?;
    post.set_amplitude(1, 0, Complex64::new(t, 0.0));
    post.set_amplitude(0, 1, Complex64::new(-r, 0.0));
    Ok((pre, post))
}

/// Single-photon weak value `<f|n1|i>/<f|i>` evaluated in the truncated
/// space: `t/(t - r)`, which is `1/2 + 1/(2 delta)` with first-order
/// coefficients.
pub fn weak_value_single_photon(delta: f64, bs_mode: BsMode) -> Result<f64> {
    let (pre, post) = single_photon_states(delta, bs_mode)?;
    weak_value_ratio(&pre, &post, |n1, _| n1 as f64)
}

/// Arm-2 companion of [`weak_value_single_photon`]: `-r/(t - r)`.
pub fn weak_value_single_photon_arm2(delta: f64, bs_mode: BsMode) -> Result<f64> {
    let (pre, post) = single_photon_states(delta, bs_mode)?;
    weak_value_ratio(&pre, &post, |_, n2| n2 as f64)
}

/// Photon-addition sum rule oracle: `<n1>_w + <n2>_w`. Equals
/// `|alpha|^2 + 1` for a coherent input and 1 for a single photon
/// (`alpha = 0` delegates to the single-photon states, where the coherent
/// post-selection would be degenerate).
pub fn weak_value_sum(
    alpha: CoherentAmplitude,
    delta: f64,
    bs_mode: BsMode,
    cutoff: usize,
) -> Result<f64> {
    if alpha.value() == 0.0 {
        return Ok(weak_value_single_photon(delta, bs_mode)?
            + weak_value_single_photon_arm2(delta, bs_mode)?);
    }
    Ok(weak_value_exact(alpha, delta, bs_mode, cutoff)?
        + weak_value_exact_arm2(alpha, delta, bs_mode, cutoff)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quantum::{weak_value_coherent, weak_value_fock};
    use approx::{assert_abs_diff_eq, assert_relative_eq};

    fn amp(a: f64) -> CoherentAmplitude {
        CoherentAmplitude::new(a).unwrap()
    }

    /// Independent closed form from coherent-state normal ordering:
    /// for arm amplitude alpha/sqrt(2) and dark eigenvalue alpha*delta,
    /// <n1>_w = |alpha|^2/2 + t * (alpha/sqrt(2)) / (alpha * delta).
    fn normal_ordering_identity(alpha: f64, delta: f64, bs_mode: BsMode) -> f64 {
        let (t, _) = bs_coefficients(delta, bs_mode).unwrap();
        alpha * alpha / 2.0 + t / (SQRT_2 * delta)
    }

    #[test]
    fn vacuum_and_poisson_amplitudes() {
        let vac = coherent_two_mode(0.0, 0.0, 4).unwrap();
        assert_abs_diff_eq!(vac.amplitude(0, 0).re, 1.0, epsilon = 1e-15);
        assert_abs_diff_eq!(vac.norm(), 1.0, epsilon = 1e-15);

        let st = coherent_two_mode(1.0, 0.0, 20).unwrap();
        let mut fact = 1.0;
        for n in 0..6 {
            if n > 0 {
                fact *= n as f64;
            }
            let expected = (-0.5f64).exp() / fact.sqrt();
            assert_abs_diff_eq!(st.amplitude(n, 0).re, expected, epsilon = 1e-12);
        }
        assert_abs_diff_eq!(st.amplitude(0, 1).re, 0.0, epsilon = 0.0);
    }

    #[test]
    fn truncation_norm_within_bound() {
        let st = coherent_two_mode(2.0, 0.2, 40).unwrap();
        assert_abs_diff_eq!(st.norm(), 1.0, epsilon = 1e-8);
    }

    #[test]
    fn cutoff_guard_rejects() {
        assert!(matches!(
            coherent_two_mode(4.0, 0.0, 40),
            Err(Error::CutoffTooSmall { .. })
        ));
        // Inside the amplitude guard but with measurable leakage.
        assert!(matches!(
            coherent_two_mode(0.5, 0.0, 1),
            Err(Error::CutoffTooSmall { .. })
        ));
    }

    #[test]
    fn ladder_matrix_entries_and_commutator() {
        let cutoff = 12;
        let a = ModeOperator::annihilation(cutoff);
        for n in 1..=cutoff {
            assert_abs_diff_eq!(a.matrix()[(n - 1, n)], (n as f64).sqrt(), epsilon = 0.0);
        }
        let ad = ModeOperator::creation(cutoff);
        let comm = a.matrix().dot(ad.matrix()) - ad.matrix().dot(a.matrix());
        for n in 0..=cutoff {
            let expected = if n < cutoff { 1.0 } else { -(cutoff as f64) };
            assert_abs_diff_eq!(comm[(n, n)], expected, epsilon = 1e-12);
        }
    }

    #[test]
    fn mode_application_matches_dark_annihilation() {
        let (t, r) = bs_coefficients(0.3, BsMode::ExactUnitary).unwrap();
        let st = coherent_two_mode(1.0, 0.7, 24).unwrap();
        let a = ModeOperator::annihilation(24);
        let via_modes = {
            let a1 = st.apply_mode(&a, Mode::Arm1);
            let a2 = st.apply_mode(&a, Mode::Arm2);
            let mut out = TwoModeState::zero(24).unwrap();
            for n1 in 0..=24 {
                for n2 in 0..=24 {
                    out.set_amplitude(
                        n1,
                        n2,
                        t * a1.amplitude(n1, n2) - r * a2.amplitude(n1, n2),
                    );
                }
            }
            out
        };
        let direct = st.apply_dark_annihilation(t, r);
        for n1 in 0..=24 {
            for n2 in 0..=24 {
                assert_abs_diff_eq!(
                    via_modes.amplitude(n1, n2).re,
                    direct.amplitude(n1, n2).re,
                    epsilon = 1e-14
                );
            }
        }
    }

    #[test]
    fn dark_creation_is_adjoint_of_dark_annihilation() {
        let (t, r) = bs_coefficients(0.2, BsMode::ExactUnitary).unwrap();
        let psi = coherent_two_mode(0.8, 0.5, 16).unwrap();
        let phi = coherent_two_mode(0.3, 0.9, 16).unwrap();
        let lhs = psi.apply_dark_creation(t, r).inner(&phi);
        let rhs = psi.inner(&phi.apply_dark_annihilation(t, r));
        assert_abs_diff_eq!(lhs.re, rhs.re, epsilon = 1e-12);
        assert_abs_diff_eq!(lhs.im, rhs.im, epsilon = 1e-12);
    }

    #[test]
    fn exact_weak_value_matches_normal_ordering_identity() {
        // Frozen expected values from the identity, which is independent of
        // the matrix path under test.
        let w = weak_value_exact(amp(2.0), 0.05, BsMode::ExactUnitary, 40).unwrap();
        assert_abs_diff_eq!(w, normal_ordering_identity(2.0, 0.05, BsMode::ExactUnitary), epsilon = 1e-10);
        assert_abs_diff_eq!(w, 12.487_492_177_719_089, epsilon = 1e-9);

        let w = weak_value_exact(amp(2.0), 0.05, BsMode::FirstOrder, 40).unwrap();
        assert_abs_diff_eq!(w, 12.5, epsilon = 1e-9);

        let w = weak_value_exact(amp(1.0), 1.0, BsMode::ExactUnitary, 30).unwrap();
        assert_abs_diff_eq!(w, 1.0, epsilon = 1e-10);
    }

    #[test]
    fn first_order_oracle_reproduces_coherent_formula() {
        for &alpha in &[0.5, 1.0, 2.0] {
            for &delta in &[0.05, 0.1, 0.3, 0.5] {
                let w = weak_value_exact(amp(alpha), delta, BsMode::FirstOrder, 40).unwrap();
                let formula = weak_value_coherent(amp(alpha), delta).unwrap();
                assert_abs_diff_eq!(w, formula, epsilon = 1e-8);
            }
        }
    }

    #[test]
    fn exact_unitary_deviation_is_order_delta() {
        for &alpha in &[0.5, 1.0, 2.0] {
            for &delta in &[0.05, 0.1, 0.3, 0.5] {
                let w = weak_value_exact(amp(alpha), delta, BsMode::ExactUnitary, 40).unwrap();
                let formula = weak_value_coherent(amp(alpha), delta).unwrap();
                let gap = (w - formula).abs();
                assert!(gap <= delta, "gap {gap} exceeds delta {delta}");
                // The gap is exactly (t_first - t_exact)/(sqrt(2) delta).
                let (t_first, _) = bs_coefficients(delta, BsMode::FirstOrder).unwrap();
                let (t_exact, _) = bs_coefficients(delta, BsMode::ExactUnitary).unwrap();
                assert_abs_diff_eq!(gap, (t_first - t_exact) / (SQRT_2 * delta), epsilon = 1e-8);
            }
        }
    }

    #[test]
    fn single_photon_examples() {
        assert_abs_diff_eq!(
            weak_value_single_photon(0.1, BsMode::FirstOrder).unwrap(),
            5.5,
            epsilon = 1e-12
        );
        assert_abs_diff_eq!(
            weak_value_single_photon(1.0, BsMode::ExactUnitary).unwrap(),
            0.5,
            epsilon = 1e-13
        );
        assert_abs_diff_eq!(
            weak_value_single_photon(0.5, BsMode::FirstOrder).unwrap(),
            1.5,
            epsilon = 1e-13
        );
        // First-order mode agrees with the printed formula at any delta.
        for &delta in &[0.02, 0.1, 0.4, 1.0] {
            assert_abs_diff_eq!(
                weak_value_single_photon(delta, BsMode::FirstOrder).unwrap(),
                weak_value_fock(delta).unwrap(),
                epsilon = 1e-11
            );
        }
    }

    #[test]
    fn sum_rule() {
        let s = weak_value_sum(amp(2.0), 0.1, BsMode::ExactUnitary, 40).unwrap();
        assert_abs_diff_eq!(s, 5.0, epsilon = 1e-8);
        let s = weak_value_sum(amp(0.0), 0.3, BsMode::ExactUnitary, 8).unwrap();
        assert_abs_diff_eq!(s, 1.0, epsilon = 1e-12);
        let s = weak_value_sum(amp(1.0), 1.0, BsMode::ExactUnitary, 30).unwrap();
        assert_abs_diff_eq!(s, 2.0, epsilon = 1e-9);
    }

    #[test]
    fn cutoff_convergence() {
        for &alpha in &[1.0, 2.0] {
            let w40 = weak_value_exact(amp(alpha), 0.1, BsMode::ExactUnitary, 40).unwrap();
            let w80 = weak_value_exact(amp(alpha), 0.1, BsMode::ExactUnitary, 80).unwrap();
            assert!((w40 - w80).abs() < 1e-8);
        }
    }

    #[test]
    fn degenerate_post_selection() {
        let err = weak_value_exact(amp(0.0), 0.1, BsMode::ExactUnitary, 20).unwrap_err();
        assert!(matches!(err, Error::DegeneratePostSelection { .. }));
    }

    #[test]
    fn arm2_oracle_matches_first_order_formula() {
        let w2 = weak_value_single_photon_arm2(0.1, BsMode::FirstOrder).unwrap();
        assert_abs_diff_eq!(w2, -4.5, epsilon = 1e-12);
        let w2 = weak_value_single_photon_arm2(1.0 / 3.0, BsMode::FirstOrder).unwrap();
        assert_relative_eq!(w2, -1.0, epsilon = 1e-12);
    }
}
