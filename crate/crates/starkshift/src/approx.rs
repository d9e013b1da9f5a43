//! Approximate phase formulas: adiabatic elimination (first and second
//! order), adiabatic and superadiabatic phases, the loss-corrected phase and
//! population, adiabaticity diagnostics, and the three-state variants with
//! their large-detuning asymptotics.
//!
//! Conventions: the gate phase is the accumulated phase of state 1, positive
//! for positive detuning. Every single-field formula is odd under Δ → -Δ, so
//! negative detunings are evaluated at |Δ| and sign-flipped; this matches the
//! numerical propagator and the exact Rosen-Zener values.

use crate::dynamics::SystemSpec;
use crate::pulse::{PulseShape, DEFAULT_SUPPORT_TOL};
use crate::quad;
use thiserror::Error;

/// Absolute tolerance for all phase quadratures; far below any phase claim.
const QUAD_TOL: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ApproxError {
    #[error("adiabatic elimination is undefined at zero detuning")]
    ZeroDetuning,
    #[error("two-photon resonance crossed: 4 Δ₂ Δ₃ - Ω₂₃(t)² changes sign inside the pulse")]
    TwoPhotonPole,
    #[error("quasienergy cubic is degenerate (p = {p:e} below {threshold:e})")]
    Degenerate { p: f64, threshold: f64 },
    #[error("adiabatic branch approaches another quasienergy (gap {gap:e} at t = {t})")]
    BranchCross { t: f64, gap: f64 },
    #[error("adiabatic threshold undefined for a Gaussian pulse with Ω₀T <= 1")]
    ThresholdUndefined,
    #[error("operation needs a three-state system, got {0}")]
    NotThreeState(String),
}

/// How a phase value was obtained.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Method {
    Ae,
    Ae2,
    Adiabatic,
    Superadiabatic,
    Lossy,
    Ae3Ladder,
    Ae3V,
    Adiabatic3,
    Numeric,
    ExactRz,
    ExactLadder,
    ExactV,
}

impl Method {
    /// Stable lowercase tag used in CLI arguments and CSV headers.
    pub fn tag(&self) -> &'static str {
        match self {
            Method::Ae => "ae",
            Method::Ae2 => "ae2",
            Method::Adiabatic => "adiabatic",
            Method::Superadiabatic => "superadiabatic",
            Method::Lossy => "lossy",
            Method::Ae3Ladder => "ae3_ladder",
            Method::Ae3V => "ae3_v",
            Method::Adiabatic3 => "adiabatic3",
            Method::Numeric => "numeric",
            Method::ExactRz => "exact_rz",
            Method::ExactLadder => "exact_ladder",
            Method::ExactV => "exact_v",
        }
    }

    pub fn from_tag(tag: &str) -> Option<Self> {
        Some(match tag {
            "ae" => Method::Ae,
            "ae2" => Method::Ae2,
            "adiabatic" | "aa" => Method::Adiabatic,
            "superadiabatic" | "sa" => Method::Superadiabatic,
            "lossy" => Method::Lossy,
            "ae3_ladder" => Method::Ae3Ladder,
            "ae3_v" => Method::Ae3V,
            "adiabatic3" | "aa3" => Method::Adiabatic3,
            "numeric" => Method::Numeric,
            "exact_rz" => Method::ExactRz,
            "exact_ladder" => Method::ExactLadder,
            "exact_v" => Method::ExactV,
            _ => return None,
        })
    }
}

impl std::fmt::Display for Method {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.tag())
    }
}

/// A phase value tagged with its method. `population1` stays 1 except for
/// the loss-corrected estimate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhaseEstimate {
    pub method: Method,
    pub phase: f64,
    pub population1: f64,
}

impl PhaseEstimate {
    pub fn new(method: Method, phase: f64) -> Self {
        Self {
            method,
            phase,
            population1: 1.0,
        }
    }
}

/// Adiabaticity diagnostics of a single-field two-state problem.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AdiabaticDiagnostics {
    /// Peak of the mixing angle |θ| = ½ |arctan(Ω/Δ)|.
    pub mixing_angle_peak: f64,
    /// Peak of the nonadiabatic coupling ratio |θ̇| / λ.
    pub nonadiabatic_ratio_peak: f64,
    /// Shape-specific detuning above which evolution turns adiabatic; absent
    /// for tabulated pulses.
    pub threshold_detuning: Option<f64>,
}

fn window(pulse: &PulseShape) -> (f64, f64) {
    pulse
        .support_window(DEFAULT_SUPPORT_TOL)
        .expect("default support tolerance is valid")
}

fn union_window(a: &PulseShape, b: &PulseShape) -> (f64, f64) {
    let (alo, ahi) = window(a);
    let (blo, bhi) = window(b);
    (alo.min(blo), ahi.max(bhi))
}

/// Steady-state adiabatic-elimination phase, ∫ Ω²/(4Δ) dt.
pub fn phase_ae(pulse: &PulseShape, delta: f64) -> Result<PhaseEstimate, ApproxError> {
    if delta == 0.0 {
        return Err(ApproxError::ZeroDetuning);
    }
    let (lo, hi) = window(pulse);
    let phase = quad::integrate(|t| pulse.value(t).powi(2) / (4.0 * delta), lo, hi, QUAD_TOL);
    Ok(PhaseEstimate::new(Method::Ae, phase))
}

/// Second-order adiabatic-elimination phase,
/// ∫ [Ω²/(4Δ) - (Ω⁴ + 4ΩΩ̈)/(16Δ³)] dt.
///
/// Gaussian and sech envelopes take closed-form fast paths; the quadrature
/// route stays available as [`phase_ae2_quadrature`] and the two agree to
/// better than 1e-10.
pub fn phase_ae2(pulse: &PulseShape, delta: f64) -> Result<PhaseEstimate, ApproxError> {
    if delta == 0.0 {
        return Err(ApproxError::ZeroDetuning);
    }
    let phase = match pulse {
        PulseShape::Gaussian { omega0, width } => {
            gaussian_ae2_closed_form(*omega0, *width, delta)
        }
        PulseShape::Sech { omega0, width } => sech_ae2_closed_form(*omega0, *width, delta),
        PulseShape::Tabulated(_) => return phase_ae2_quadrature(pulse, delta),
    };
    Ok(PhaseEstimate::new(Method::Ae2, phase))
}

/// The AE2 phase by direct quadrature of the two-term integrand.
pub fn phase_ae2_quadrature(
    pulse: &PulseShape,
    delta: f64,
) -> Result<PhaseEstimate, ApproxError> {
    if delta == 0.0 {
        return Err(ApproxError::ZeroDetuning);
    }
    let (lo, hi) = window(pulse);
    let d3 = 16.0 * delta.powi(3);
    let phase = quad::integrate(
        |t| {
            let w = pulse.value(t);
            let wdd = pulse.second_deriv(t);
            w * w / (4.0 * delta) - (w.powi(4) + 4.0 * w * wdd) / d3
        },
        lo,
        hi,
        QUAD_TOL,
    );
    Ok(PhaseEstimate::new(Method::Ae2, phase))
}

/// Ω₀²T√π/(4√2 Δ) - Ω₀²√π (Ω₀²T² - 4√2) / (32 Δ³ T), via the dimensionless
/// products α = Ω₀T and δ = ΔT.
fn gaussian_ae2_closed_form(omega0: f64, width: f64, delta: f64) -> f64 {
    let sqrt_pi = std::f64::consts::PI.sqrt();
    let sqrt2 = std::f64::consts::SQRT_2;
    let a = omega0 * width;
    let d = delta * width;
    a * a * sqrt_pi / (4.0 * sqrt2 * d) - a * a * sqrt_pi * (a * a - 4.0 * sqrt2) / (32.0 * d * d * d)
}

/// Ω₀²T/(2Δ) - Ω₀²(Ω₀²T² - 2)/(12 Δ³ T); identical to the Stirling
/// asymptotics of the exact Rosen-Zener phase.
fn sech_ae2_closed_form(omega0: f64, width: f64, delta: f64) -> f64 {
    let a = omega0 * width;
    let d = delta * width;
    sech_ae2_dimensionless(a, d)
}

/// Shared with [`crate::exact::rz_asymptotic_phase`] so the AE2 sech fast
/// path and the Stirling expansion are literally the same arithmetic.
pub(crate) fn sech_ae2_dimensionless(alpha: f64, delta: f64) -> f64 {
    alpha * alpha / (2.0 * delta) - alpha * alpha * (alpha * alpha - 2.0) / (12.0 * delta.powi(3))
}

/// Adiabatic phase, ½ ∫ [√(Ω² + Δ²) - |Δ|] dt, signed like Δ.
///
/// Valid at Δ = 0 as well, where it is half the pulse area: the eigenvalue
/// branch connected to state 1 is followed, which flips with the sign of the
/// detuning.
pub fn phase_adiabatic(pulse: &PulseShape, delta: f64) -> PhaseEstimate {
    let (lo, hi) = window(pulse);
    let abs_d = delta.abs();
    let magnitude = quad::integrate(
        |t| 0.5 * ((pulse.value(t).powi(2) + abs_d * abs_d).sqrt() - abs_d),
        lo,
        hi,
        QUAD_TOL,
    );
    PhaseEstimate::new(Method::Adiabatic, flip_sign(magnitude, delta))
}

/// Superadiabatic phase: the adiabatic integrand with the Ω̇ correction
/// under the root, ½ ∫ [√(Ω² + Δ² + Ω̇²Δ²/(Ω² + Δ²)²) - |Δ|] dt.
pub fn phase_superadiabatic(pulse: &PulseShape, delta: f64) -> PhaseEstimate {
    let (lo, hi) = window(pulse);
    let abs_d = delta.abs();
    let d2 = abs_d * abs_d;
    let magnitude = quad::integrate(
        |t| {
            let w2 = pulse.value(t).powi(2);
            let wd = pulse.deriv(t);
            let lam2 = w2 + d2;
            0.5 * ((lam2 + wd * wd * d2 / (lam2 * lam2)).sqrt() - abs_d)
        },
        lo,
        hi,
        QUAD_TOL,
    );
    PhaseEstimate::new(Method::Superadiabatic, flip_sign(magnitude, delta))
}

fn flip_sign(magnitude: f64, delta: f64) -> f64 {
    if delta < 0.0 {
        -magnitude
    } else {
        magnitude
    }
}

/// Loss-corrected adiabatic phase and surviving population of state 1:
///
/// φ = -∫ [λ₋ + Γ² sin²2θ / (16λ)] dt,  P₁ = exp(-∫ Γ sin²θ dt),
///
/// with λ = √(Ω² + Δ²), λ₋ = ½(Δ - λ) the branch connected to state 1, and
/// θ the mixing angle. The Γ → 0 limit reproduces [`phase_adiabatic`]; the
/// phase correction is quadratic in Γ while the population is exponentially
/// sensitive.
pub fn phase_and_population_lossy(
    pulse: &PulseShape,
    delta: f64,
    gamma: f64,
) -> PhaseEstimate {
    if gamma == 0.0 {
        let mut est = phase_adiabatic(pulse, delta);
        est.method = Method::Lossy;
        return est;
    }
    let (lo, hi) = window(pulse);
    let abs_d = delta.abs();
    let phase_magnitude = quad::integrate(
        |t| {
            let w = pulse.value(t);
            let lam = (w * w + abs_d * abs_d).sqrt();
            let lam_minus = 0.5 * (abs_d - lam);
            let sin_2theta = if lam > 0.0 { w / lam } else { 1.0 };
            -(lam_minus + gamma * gamma * sin_2theta * sin_2theta / (16.0 * lam))
        },
        lo,
        hi,
        QUAD_TOL,
    );
    let decay = quad::integrate(
        |t| {
            let w = pulse.value(t);
            let lam = (w * w + abs_d * abs_d).sqrt();
            let sin2_theta = if lam > 0.0 { 0.5 * (1.0 - abs_d / lam) } else { 0.5 };
            gamma * sin2_theta
        },
        lo,
        hi,
        QUAD_TOL,
    );
    PhaseEstimate {
        method: Method::Lossy,
        phase: flip_sign(phase_magnitude, delta),
        population1: (-decay).exp(),
    }
}

/// Peak mixing angle, peak nonadiabatic ratio |θ̇|/λ, and the shape-specific
/// adiabaticity threshold Δ₀.
pub fn adiabatic_diagnostics(
    pulse: &PulseShape,
    delta: f64,
) -> Result<AdiabaticDiagnostics, ApproxError> {
    let threshold_detuning = match pulse {
        PulseShape::Gaussian { omega0, width } => {
            let a = omega0 * width;
            if a <= 1.0 {
                return Err(ApproxError::ThresholdUndefined);
            }
            Some(2.0 / (3.0 * 3.0f64.sqrt() * width) * a.ln().sqrt())
        }
        PulseShape::Sech { width, .. } => Some(1.0 / (3.0 * 6.0f64.sqrt() * width)),
        PulseShape::Tabulated(_) => None,
    };

    let mixing_angle_peak = if pulse.omega0() == 0.0 {
        0.0
    } else {
        0.5 * (pulse.omega0() / delta.abs()).atan()
    };

    let ratio = |t: f64| {
        let w = pulse.value(t);
        let lam2 = w * w + delta * delta;
        (pulse.deriv(t) * delta).abs() / (2.0 * lam2.powf(1.5))
    };
    let (lo, hi) = window(pulse);
    // Coarse scan, then golden-section refinement around the best sample.
    let n = 1024;
    let mut best_t = lo;
    let mut best = 0.0;
    for k in 0..=n {
        let t = lo + (hi - lo) * k as f64 / n as f64;
        let r = ratio(t);
        if r > best {
            best = r;
            best_t = t;
        }
    }
    let dt = (hi - lo) / n as f64;
    let nonadiabatic_ratio_peak = golden_max(&ratio, best_t - dt, best_t + dt).max(best);

    Ok(AdiabaticDiagnostics {
        mixing_angle_peak,
        nonadiabatic_ratio_peak,
        threshold_detuning,
    })
}

fn golden_max<F: Fn(f64) -> f64>(f: &F, mut a: f64, mut b: f64) -> f64 {
    let inv_phi = 0.5 * (5.0f64.sqrt() - 1.0);
    let mut c = b - inv_phi * (b - a);
    let mut d = a + inv_phi * (b - a);
    let (mut fc, mut fd) = (f(c), f(d));
    for _ in 0..60 {
        if fc > fd {
            b = d;
            d = c;
            fd = fc;
            c = b - inv_phi * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + inv_phi * (b - a);
            fd = f(d);
        }
    }
    fc.max(fd)
}

/// First-order phase of state 1 in a ladder, ∫ Δ₃ Ω₁₂² / (4Δ₂Δ₃ - Ω₂₃²) dt.
///
/// The denominator is scanned for a sign change before integrating; crossing
/// the two-photon resonance is reported instead of silently integrating
/// through the pole.
pub fn phase_ae3_ladder(
    pulse12: &PulseShape,
    pulse23: &PulseShape,
    delta2: f64,
    delta3: f64,
) -> Result<PhaseEstimate, ApproxError> {
    if delta2 == 0.0 {
        return Err(ApproxError::ZeroDetuning);
    }
    let (lo, hi) = union_window(pulse12, pulse23);
    let denom = |t: f64| 4.0 * delta2 * delta3 - pulse23.value(t).powi(2);
    let edge_sign = denom(lo).signum();
    for k in 0..=512 {
        let t = lo + (hi - lo) * k as f64 / 512.0;
        if denom(t).signum() != edge_sign {
            return Err(ApproxError::TwoPhotonPole);
        }
    }
    let phase = quad::integrate(
        |t| delta3 * pulse12.value(t).powi(2) / denom(t),
        lo,
        hi,
        QUAD_TOL,
    );
    Ok(PhaseEstimate::new(Method::Ae3Ladder, phase))
}

/// The two leading terms of the ladder phase expanded in 1/(Δ₂Δ₃):
/// ∫ Ω₁₂²/(4Δ₂) dt and ∫ Ω₁₂²Ω₂₃²/(16Δ₂²Δ₃) dt.
pub fn phase_ae3_ladder_expansion(
    pulse12: &PulseShape,
    pulse23: &PulseShape,
    delta2: f64,
    delta3: f64,
) -> Result<(f64, f64), ApproxError> {
    if delta2 == 0.0 || delta3 == 0.0 {
        return Err(ApproxError::ZeroDetuning);
    }
    let (lo, hi) = union_window(pulse12, pulse23);
    let term1 = quad::integrate(
        |t| pulse12.value(t).powi(2) / (4.0 * delta2),
        lo,
        hi,
        QUAD_TOL,
    );
    let term2 = quad::integrate(
        |t| pulse12.value(t).powi(2) * pulse23.value(t).powi(2) / (16.0 * delta2 * delta2 * delta3),
        lo,
        hi,
        QUAD_TOL,
    );
    Ok((term1, term2))
}

/// First-order phase of state 1 in a V system: the two arms contribute
/// independently, ∫ Ω₁₂²/(4Δ₂) dt + ∫ Ω₁₃²/(4Δ₃) dt.
pub fn phase_ae3_v(
    pulse12: &PulseShape,
    pulse13: &PulseShape,
    delta2: f64,
    delta3: f64,
) -> Result<PhaseEstimate, ApproxError> {
    if delta2 == 0.0 || delta3 == 0.0 {
        return Err(ApproxError::ZeroDetuning);
    }
    let arm_a = phase_ae(pulse12, delta2)?.phase;
    let arm_b = phase_ae(pulse13, delta3)?.phase;
    Ok(PhaseEstimate::new(Method::Ae3V, arm_a + arm_b))
}

/// Instantaneous quasienergies of the ladder Hamiltonian: the real roots of
/// ε³ + aε² + bε + c with a = -Δ₂-Δ₃, b = Δ₂Δ₃ - (Ω₁₂²+Ω₂₃²)/4,
/// c = Δ₃Ω₁₂²/4, solved by the trigonometric (cosine) parameterization and
/// returned sorted ascending.
pub fn quasienergies_ladder(
    omega12: f64,
    omega23: f64,
    delta2: f64,
    delta3: f64,
) -> Result<[f64; 3], ApproxError> {
    let a = -delta2 - delta3;
    let b = delta2 * delta3 - (omega12 * omega12 + omega23 * omega23) / 4.0;
    let c = delta3 * omega12 * omega12 / 4.0;
    cubic_roots_sorted(a, b, c)
}

fn cubic_roots_sorted(a: f64, b: f64, c: f64) -> Result<[f64; 3], ApproxError> {
    let p = (a * a - 3.0 * b).max(0.0).sqrt();
    let scale = a.abs().max(b.abs().sqrt());
    let threshold = 1e-12 * scale;
    if p <= threshold.max(f64::MIN_POSITIVE) {
        return Err(ApproxError::Degenerate { p, threshold });
    }
    let cos_beta = ((9.0 * a * b - 2.0 * a.powi(3) - 27.0 * c) / (2.0 * p.powi(3)))
        .clamp(-1.0, 1.0);
    let beta = cos_beta.acos();
    let mut roots = [
        -a / 3.0 - 2.0 * p / 3.0 * ((beta - std::f64::consts::PI) / 3.0).cos(),
        -a / 3.0 - 2.0 * p / 3.0 * ((beta + std::f64::consts::PI) / 3.0).cos(),
        -a / 3.0 + 2.0 * p / 3.0 * (beta / 3.0).cos(),
    ];
    // The trigonometric form cancels badly when the roots are orders of
    // magnitude apart (a small root assembled from ~|a|-sized terms); two
    // Newton steps restore near-machine relative accuracy, which the
    // adaptive quadrature over these roots relies on.
    for r in roots.iter_mut() {
        for _ in 0..2 {
            let f = ((*r + a) * *r + b) * *r + c;
            let df = (3.0 * *r + 2.0 * a) * *r + b;
            if df != 0.0 {
                *r -= f / df;
            }
        }
    }
    roots.sort_by(|x, y| x.partial_cmp(y).unwrap());
    Ok(roots)
}

/// Cubic coefficients (a, b, c) of the instantaneous characteristic
/// polynomial for either three-state variant.
fn three_state_cubic(spec: &SystemSpec, t: f64) -> Result<(f64, f64, f64), ApproxError> {
    match spec {
        SystemSpec::Ladder { detuning2, detuning3, pulse12, pulse23 } => {
            let w12 = pulse12.value(t);
            let w23 = pulse23.value(t);
            Ok((
                -detuning2 - detuning3,
                detuning2 * detuning3 - (w12 * w12 + w23 * w23) / 4.0,
                detuning3 * w12 * w12 / 4.0,
            ))
        }
        SystemSpec::V { detuning2, detuning3, pulse12, pulse13 } => {
            let w12 = pulse12.value(t);
            let w13 = pulse13.value(t);
            Ok((
                -detuning2 - detuning3,
                detuning2 * detuning3 - (w12 * w12 + w13 * w13) / 4.0,
                (detuning3 * w12 * w12 + detuning2 * w13 * w13) / 4.0,
            ))
        }
        SystemSpec::TwoState { .. } => Err(ApproxError::NotThreeState(
            "two-state system".to_string(),
        )),
    }
}

/// Three-state adiabatic phase, -∫ ε(t) dt over the quasienergy branch that
/// connects continuously to 0 where the pulses vanish.
///
/// The branch is tracked by continuity along a fine scan; if it ever comes
/// within 1e-10 of another root (relative to the detuning scale) the
/// adiabatic phase is ill-defined and a branch-cross error is returned.
pub fn phase_adiabatic3(spec: &SystemSpec) -> Result<PhaseEstimate, ApproxError> {
    let pulse_b = match spec.pulse_b() {
        Some(p) => p,
        None => {
            return Err(ApproxError::NotThreeState(
                "two-state system".to_string(),
            ))
        }
    };
    let (lo, hi) = union_window(spec.pulse_a(), pulse_b);

    // All-zero couplings integrate to zero phase regardless of branch.
    if spec.pulse_a().omega0() == 0.0 && pulse_b.omega0() == 0.0 {
        return Ok(PhaseEstimate::new(Method::Adiabatic3, 0.0));
    }

    let roots_at = |t: f64| -> Result<[f64; 3], ApproxError> {
        let (a, b, c) = three_state_cubic(spec, t)?;
        cubic_roots_sorted(a, b, c)
    };

    // Track the branch nearest 0 at the window edge through the whole scan.
    let n = 2000;
    let first = roots_at(lo)?;
    let mut idx = (0..3)
        .min_by(|&i, &j| first[i].abs().partial_cmp(&first[j].abs()).unwrap())
        .unwrap();
    let mut prev = first[idx];
    let scale = {
        let (a, b, _) = three_state_cubic(spec, lo)?;
        a.abs().max(b.abs().sqrt()).max(spec.pulse_a().omega0())
    };
    for k in 1..=n {
        let t = lo + (hi - lo) * k as f64 / n as f64;
        let roots = roots_at(t)?;
        let near = (0..3)
            .min_by(|&i, &j| {
                (roots[i] - prev)
                    .abs()
                    .partial_cmp(&(roots[j] - prev).abs())
                    .unwrap()
            })
            .unwrap();
        // Gap to the closest other root.
        let gap = (0..3)
            .filter(|&i| i != near)
            .map(|i| (roots[i] - roots[near]).abs())
            .fold(f64::INFINITY, f64::min);
        if gap < 1e-10 * scale {
            return Err(ApproxError::BranchCross { t, gap });
        }
        if near != idx {
            // The tracked branch swapped sorted position: a crossing slipped
            // between scan points.
            return Err(ApproxError::BranchCross { t, gap });
        }
        idx = near;
        prev = roots[near];
    }

    let branch = idx;
    let phase = quad::integrate(
        |t| match roots_at(t) {
            Ok(roots) => -roots[branch],
            Err(_) => f64::NAN,
        },
        lo,
        hi,
        QUAD_TOL,
    );
    if !phase.is_finite() {
        return Err(ApproxError::Degenerate {
            p: 0.0,
            threshold: 0.0,
        });
    }
    Ok(PhaseEstimate::new(Method::Adiabatic3, phase))
}

/// Large-Δ₃ asymptotics of the ladder adiabatic phase:
/// -∫ ε₋ dt - ∫ ε₋ Ω₂₃² / (4Δ₃ √(Δ₂² + Ω₁₂²)) dt with
/// ε₋ = ½(Δ₂ - √(Δ₂² + Ω₁₂²)).
pub fn phase_adiabatic3_asymptotic(
    pulse12: &PulseShape,
    pulse23: &PulseShape,
    delta2: f64,
    delta3: f64,
) -> Result<f64, ApproxError> {
    if delta3 == 0.0 {
        return Err(ApproxError::ZeroDetuning);
    }
    let (lo, hi) = union_window(pulse12, pulse23);
    Ok(quad::integrate(
        |t| {
            let w12 = pulse12.value(t);
            let root = (delta2 * delta2 + w12 * w12).sqrt();
            let eps_minus = 0.5 * (delta2 - root);
            let correction = eps_minus * pulse23.value(t).powi(2) / (4.0 * delta3 * root);
            -eps_minus - correction
        },
        lo,
        hi,
        QUAD_TOL,
    ))
}
