//! Exact phases for the hyperbolic-secant pulse models: the two-state
//! Rosen-Zener solution, its three-state ladder and V extensions, the
//! large-detuning Stirling asymptotics, and the inverse problem of choosing
//! a detuning that produces a prescribed gate phase.
//!
//! All quantities are dimensionless: α = Ω₀T, δ = ΔT. Phases from the gamma
//! formulas are single-point representatives in (-π, π]; parameter sweeps
//! make them continuous with [`unwrap_sweep`] / [`align_branch`].

use crate::approx::sech_ae2_dimensionless;
use crate::specfn::{self, SpecFnError};
use num_complex::Complex64;
use std::f64::consts::PI;
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ExactError {
    #[error(transparent)]
    Pole(#[from] SpecFnError),
    #[error("target phase {target} unattainable: must lie in (0, {max}] for n = {n}")]
    Unattainable { target: f64, max: f64, n: u32 },
    #[error("asymptotic expansion undefined at zero detuning")]
    ZeroDetuning,
    #[error("pulse-area index n must be >= 1")]
    ZeroIndex,
}

/// Dimensionless parameters of a sech-pulse model. The κ arm weights matter
/// only for the V configuration.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RzParameters {
    /// Peak Rabi frequency times pulse width, Ω₀T.
    pub alpha: f64,
    /// Detuning times pulse width, ΔT.
    pub delta: f64,
    pub kappa12: f64,
    pub kappa13: f64,
}

impl RzParameters {
    pub fn two_state(alpha: f64, delta: f64) -> Self {
        Self {
            alpha,
            delta,
            kappa12: 1.0,
            kappa13: 0.0,
        }
    }

    pub fn v_system(alpha: f64, delta: f64, kappa12: f64, kappa13: f64) -> Self {
        Self {
            alpha,
            delta,
            kappa12,
            kappa13,
        }
    }

    /// κ = √(κ₁₂² + κ₁₃²), the bright-state coupling weight.
    pub fn kappa(&self) -> f64 {
        self.kappa12.hypot(self.kappa13)
    }
}

/// Phase of the gamma-function ratio with coupling offset ±α/2 around
/// ½ + iδ/2, reduced to (-π, π].
fn rz_arg(alpha: f64, delta: f64) -> Result<f64, ExactError> {
    let z = Complex64::new(0.5, 0.5 * delta);
    let off = Complex64::new(0.5 * alpha, 0.0);
    Ok(specfn::arg_gamma_ratio(&[z, z], &[z - off, z + off])?)
}

/// Exact Rosen-Zener gate phase,
/// φ = arg[ Γ(½+iδ/2)² / (Γ(½+iδ/2-α/2) Γ(½+iδ/2+α/2)) ].
pub fn rz_phase(p: &RzParameters) -> Result<f64, ExactError> {
    if p.alpha == 0.0 {
        return Ok(0.0);
    }
    rz_arg(p.alpha, p.delta)
}

/// Rosen-Zener phase at the transition-free pulse areas α = 2n:
/// nπ + 2 Σₖ arg(2k - 1 - iδ), k = 1..n, as a continuous function of δ
/// (no mod-2π reduction): it falls monotonically from nπ at δ = 0 to 0.
pub fn rz_phase_zero_transition(n: u32, delta: f64) -> f64 {
    let mut sum = 0.0;
    for k in 1..=n {
        sum += (delta / (2.0 * k as f64 - 1.0)).atan();
    }
    n as f64 * PI - 2.0 * sum
}

/// Inverts [`rz_phase_zero_transition`]: the δ ≥ 0 producing `target_phase`
/// at pulse area index `n`, found by bracketing bisection to |Δφ| < 1e-12.
pub fn design_detuning(target_phase: f64, n: u32) -> Result<f64, ExactError> {
    if n == 0 {
        return Err(ExactError::ZeroIndex);
    }
    let max = n as f64 * PI;
    if !(target_phase > 0.0 && target_phase <= max) {
        return Err(ExactError::Unattainable {
            target: target_phase,
            max,
            n,
        });
    }
    if target_phase == max {
        return Ok(0.0);
    }
    let f = |d: f64| rz_phase_zero_transition(n, d) - target_phase;
    // f(0) = nπ - target > 0 and f is monotone decreasing to -target.
    let mut hi = 1.0;
    while f(hi) > 0.0 {
        hi *= 2.0;
        debug_assert!(hi < 1e18);
    }
    let mut lo = 0.0;
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if f(mid) > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
        if f(lo).abs() < 1e-13 && hi - lo < 1e-14 * hi.max(1.0) {
            break;
        }
    }
    let delta = 0.5 * (lo + hi);
    debug_assert!(f(delta).abs() < 1e-12);
    Ok(delta)
}

/// Exact phase of state 1 in the equal-coupling ladder (Δ₃ = 2Δ₂ = 2Δ):
/// twice the two-state Rosen-Zener phase at effective coupling α/√2,
/// reduced to (-π, π].
///
/// The doubling is forced by the exact factorization of the ladder
/// amplitude into the square of a two-state amplitude, and is confirmed by
/// the numerical propagator (α = 2√2, δ = 1 gives π, not π/2).
pub fn ladder_exact_phase(alpha: f64, delta: f64) -> Result<f64, ExactError> {
    if alpha == 0.0 {
        return Ok(0.0);
    }
    let arg = rz_arg(alpha / std::f64::consts::SQRT_2, delta)?;
    Ok(specfn::reduce_angle(2.0 * arg))
}

/// Exact phase of state 1 in the V system with proportional sech arms and
/// equal detunings.
///
/// The Morris-Shore transformation maps the V system onto one dark state
/// plus a single two-state system with coupling κΩ₀ that contains state 1
/// itself, so the phase is the plain Rosen-Zener phase at coupling κα — with
/// no factor of 2, as the numerical propagator confirms (κα = 2, δ = 1
/// gives π/2).
pub fn v_exact_phase(p: &RzParameters) -> Result<f64, ExactError> {
    let coupling = p.kappa() * p.alpha;
    if coupling == 0.0 {
        return Ok(0.0);
    }
    rz_arg(coupling, p.delta)
}

/// Stirling asymptotics of the Rosen-Zener phase for |δ| ≫ max(1, α):
/// α²/(2δ) - α²(α² - 2)/(12δ³). This is the same arithmetic as the sech
/// second-order adiabatic-elimination closed form.
pub fn rz_asymptotic_phase(alpha: f64, delta: f64) -> Result<f64, ExactError> {
    if delta == 0.0 {
        return Err(ExactError::ZeroDetuning);
    }
    Ok(sech_ae2_dimensionless(alpha, delta))
}

/// Large-detuning asymptotics of [`ladder_exact_phase`]:
/// α²/(2δ) - α²(α² - 4)/(24δ³), i.e. twice the two-state expansion at
/// coupling α/√2. The third state shows up only in the δ⁻³ term.
pub fn ladder_asymptotic_phase(alpha: f64, delta: f64) -> Result<f64, ExactError> {
    if delta == 0.0 {
        return Err(ExactError::ZeroDetuning);
    }
    Ok(2.0 * sech_ae2_dimensionless(alpha / std::f64::consts::SQRT_2, delta))
}

/// Large-detuning asymptotics of [`v_exact_phase`]:
/// κ²α²/(2δ) - κ²α²(κ²α² - 2)/(12δ³). The leading term is the sum of the
/// two independent arm phases; the arms mix only at order δ⁻³.
pub fn v_asymptotic_phase(p: &RzParameters) -> Result<f64, ExactError> {
    if p.delta == 0.0 {
        return Err(ExactError::ZeroDetuning);
    }
    Ok(sech_ae2_dimensionless(p.kappa() * p.alpha, p.delta))
}

/// Shifts `raw` by the 2π multiple that lands it nearest `reference`.
pub fn align_branch(reference: f64, raw: f64) -> f64 {
    raw + 2.0 * PI * ((reference - raw) / (2.0 * PI)).round()
}

/// Makes a parameter sweep of mod-2π phases continuous in place: each value
/// is moved to the branch nearest its predecessor. Anchor the first entry
/// in the small-coupling regime (φ → 0) for an absolute branch.
pub fn unwrap_sweep(values: &mut [f64]) {
    for i in 1..values.len() {
        values[i] = align_branch(values[i - 1], values[i]);
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const SQRT_2: f64 = std::f64::consts::SQRT_2;

    #[test]
    fn design_table_phases() {
        // At α = 2 the exact phase collapses to π - 2 arctan δ.
        let cases = [
            (1.0, PI / 2.0),
            (3.0f64.sqrt(), PI / 3.0),
            (1.0 + SQRT_2, PI / 4.0),
            (2.0 + 3.0f64.sqrt(), PI / 6.0),
        ];
        for (delta, want) in cases {
            let got = rz_phase(&RzParameters::two_state(2.0, delta)).unwrap();
            assert!((got - want).abs() < 1e-12, "δ = {delta}: {got} vs {want}");
        }
        assert_eq!(rz_phase(&RzParameters::two_state(0.0, 3.0)).unwrap(), 0.0);
    }

    #[test]
    fn odd_pulse_area_at_resonance_is_a_pole() {
        // Full population transfer leaves state 1 empty: no phase exists.
        assert!(matches!(
            rz_phase(&RzParameters::two_state(1.0, 0.0)),
            Err(ExactError::Pole(_))
        ));
        assert!(matches!(
            rz_phase(&RzParameters::two_state(3.0, 0.0)),
            Err(ExactError::Pole(_))
        ));
        // Even areas are transition-free and well defined.
        assert!(rz_phase(&RzParameters::two_state(2.0, 0.0)).is_ok());
    }

    #[test]
    fn huge_detuning_stays_finite() {
        // At α = 2 the gamma formula collapses to π - 2 arctan δ; δ = 1000
        // exercises the overflow-safe path of the reflected log-gamma.
        let got = rz_phase(&RzParameters::two_state(2.0, 1000.0)).unwrap();
        let want = PI - 2.0 * 1000.0f64.atan();
        assert!(got.is_finite());
        assert!((got - want).abs() < 1e-10, "{got} vs {want}");
    }

    #[test]
    fn zero_transition_closed_form() {
        assert!((rz_phase_zero_transition(1, 0.0) - PI).abs() < 1e-15);
        assert!((rz_phase_zero_transition(1, 1.0) - PI / 2.0).abs() < 1e-15);
        // n = 2, δ = √3: 2π - 2(π/3 + π/6) = π.
        assert!((rz_phase_zero_transition(2, 3.0f64.sqrt()) - PI).abs() < 1e-14);
    }

    #[test]
    fn zero_transition_matches_gamma_formula_mod_2pi() {
        for n in 1..=4u32 {
            for k in 0..=20 {
                let delta = 10.0 * k as f64 / 20.0;
                let closed = rz_phase_zero_transition(n, delta);
                let gamma = rz_phase(&RzParameters::two_state(2.0 * n as f64, delta)).unwrap();
                let diff = specfn::reduce_angle(closed - gamma);
                assert!(
                    diff.abs() < 1e-10,
                    "n = {n}, δ = {delta}: {closed} vs {gamma}"
                );
            }
        }
    }

    #[test]
    fn design_detuning_known_values() {
        assert!((design_detuning(PI / 2.0, 1).unwrap() - 1.0).abs() < 1e-10);
        assert!((design_detuning(PI / 3.0, 1).unwrap() - 3.0f64.sqrt()).abs() < 1e-10);
        assert!((design_detuning(PI / 4.0, 1).unwrap() - (1.0 + SQRT_2)).abs() < 1e-10);
        assert!(
            (design_detuning(PI / 6.0, 1).unwrap() - (2.0 + 3.0f64.sqrt())).abs() < 1e-10
        );
        assert_eq!(design_detuning(PI, 1).unwrap(), 0.0);
    }

    #[test]
    fn design_detuning_roundtrip() {
        for n in [1u32, 2, 3] {
            for target in [PI / 2.0, PI / 3.0, PI / 4.0, PI / 6.0, PI] {
                let delta = design_detuning(target, n).unwrap();
                let back = rz_phase_zero_transition(n, delta);
                assert!((back - target).abs() < 1e-10, "n = {n}, target = {target}");
            }
        }
    }

    #[test]
    fn design_detuning_rejects_unattainable() {
        assert!(matches!(
            design_detuning(0.0, 1),
            Err(ExactError::Unattainable { .. })
        ));
        assert!(matches!(
            design_detuning(-1.0, 2),
            Err(ExactError::Unattainable { .. })
        ));
        assert!(matches!(
            design_detuning(1.1 * PI, 1),
            Err(ExactError::Unattainable { .. })
        ));
        assert!(design_detuning(1.1 * PI, 2).is_ok());
        assert!(matches!(design_detuning(1.0, 0), Err(ExactError::ZeroIndex)));
    }

    #[test]
    fn ladder_phase_values() {
        assert_eq!(ladder_exact_phase(0.0, 1.0).unwrap(), 0.0);
        // Twice the two-state π/2 at effective coupling 2.
        let got = ladder_exact_phase(2.0 * SQRT_2, 1.0).unwrap();
        assert!((got - PI).abs() < 1e-12, "got {got}");
        // At δ = 0 the doubled phase 2π reduces to 0 — matching the
        // propagator, whose ladder amplitude (cos²) never leaves the
        // positive real axis.
        let got = ladder_exact_phase(2.0 * SQRT_2, 0.0).unwrap();
        assert!(got.abs() < 1e-12, "got {got}");
    }

    #[test]
    fn v_phase_values() {
        // Degenerate single arm reduces to the plain Rosen-Zener phase.
        let p = RzParameters::v_system(2.0, 1.0, 1.0, 0.0);
        let got = v_exact_phase(&p).unwrap();
        let want = rz_phase(&RzParameters::two_state(2.0, 1.0)).unwrap();
        assert!((got - want).abs() < 1e-14);

        // Equal arms, κ = √2: coupling κα = 2 at δ = 1 gives π/2.
        let p = RzParameters::v_system(SQRT_2, 1.0, 1.0, 1.0);
        assert!((v_exact_phase(&p).unwrap() - PI / 2.0).abs() < 1e-12);

        let zero = RzParameters::v_system(0.0, 1.0, 1.0, 1.0);
        assert_eq!(v_exact_phase(&zero).unwrap(), 0.0);
    }

    #[test]
    fn asymptotics_match_exact_at_large_detuning() {
        let asym = rz_asymptotic_phase(2.0, 100.0).unwrap();
        let exact = rz_phase(&RzParameters::two_state(2.0, 100.0)).unwrap();
        assert!((asym - exact).abs() < 1e-4);

        let asym = ladder_asymptotic_phase(2.0, 150.0).unwrap();
        let exact = ladder_exact_phase(2.0, 150.0).unwrap();
        assert!((asym - exact).abs() < 1e-4);

        let p = RzParameters::v_system(1.5, 120.0, 1.0, 1.0);
        let asym = v_asymptotic_phase(&p).unwrap();
        let exact = v_exact_phase(&p).unwrap();
        assert!((asym - exact).abs() < 1e-4);

        assert!(matches!(
            rz_asymptotic_phase(1.0, 0.0),
            Err(ExactError::ZeroDetuning)
        ));
    }

    #[test]
    fn ladder_asymptotic_leading_term_is_two_state() {
        // α²/(2δ) leads both expansions; the third state enters at δ⁻³.
        let alpha = 2.0;
        for delta in [50.0, 100.0, 200.0] {
            let ladder = ladder_asymptotic_phase(alpha, delta).unwrap();
            let two = rz_asymptotic_phase(alpha, delta).unwrap();
            let leading = alpha * alpha / (2.0 * delta);
            assert!((ladder - leading).abs() < 2.0 * leading / (delta * delta));
            // Difference is exactly α⁴/(24δ³).
            let want = alpha.powi(4) / (24.0 * delta.powi(3));
            assert!(((ladder - two) - want).abs() < 1e-15);
        }
    }

    #[test]
    fn branch_alignment() {
        assert_eq!(align_branch(0.1, 0.2), 0.2);
        assert!((align_branch(6.0, -0.5) - (2.0 * PI - 0.5)).abs() < 1e-12);
        let mut vals = vec![3.0, -3.1, 3.05, -3.0];
        unwrap_sweep(&mut vals);
        for w in vals.windows(2) {
            assert!((w[1] - w[0]).abs() <= PI);
        }
    }
}
