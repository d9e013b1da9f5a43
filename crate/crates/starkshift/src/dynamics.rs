//! Time-dependent Hamiltonians and exact numerical propagation.
//!
//! Propagation happens in the energy picture, where the static detuning
//! phases sit on the diagonal and the off-diagonal couplings are the bare
//! pulse envelopes. The amplitude of state 1 is picture-independent there,
//! so the accumulated phase read off `c₁(t)` is the gate phase directly.
//! This module is the accuracy oracle for everything in [`crate::approx`]
//! and [`crate::exact`].

use crate::ode::{self, OdeError, OdeOptions};
use crate::pulse::{PulseError, PulseShape, DEFAULT_SUPPORT_TOL};
use ndarray::Array2;
use num_complex::Complex64;
use std::io::Write;
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum DynamicsError {
    #[error("invalid system: {0}")]
    InvalidSpec(String),
    #[error(transparent)]
    Pulse(#[from] PulseError),
    #[error("integrator step collapsed below {min_step:e} at t = {t}")]
    Stiffness { t: f64, step: f64, min_step: f64 },
    #[error("norm defect {defect:e} exceeds 100 x rel_tol = {bound:e} with no loss")]
    Tolerance { defect: f64, bound: f64 },
    #[error("tolerances must lie in (0, 1e-3], got rel_tol={rel_tol:e}, abs_tol={abs_tol:e}")]
    InvalidTolerance { rel_tol: f64, abs_tol: f64 },
}

impl From<OdeError> for DynamicsError {
    fn from(e: OdeError) -> Self {
        match e {
            OdeError::Stiffness { t, step, min_step } => {
                DynamicsError::Stiffness { t, step, min_step }
            }
            OdeError::InvalidTolerance { rel_tol, abs_tol } => {
                DynamicsError::InvalidTolerance { rel_tol, abs_tol }
            }
        }
    }
}

/// The driven system: a lossy two-state qubit, or one of the two three-state
/// linkages. Angular frequencies are in units of 1/T, time in units of T.
#[derive(Debug, Clone, PartialEq)]
pub enum SystemSpec {
    /// States (1, 2) with detuning Δ and irreversible loss Γ from state 2.
    TwoState {
        detuning: f64,
        loss_rate: f64,
        pulse: PulseShape,
    },
    /// Chain 1-2-3 with one-photon detuning Δ₂ and two-photon detuning Δ₃.
    Ladder {
        detuning2: f64,
        detuning3: f64,
        pulse12: PulseShape,
        pulse23: PulseShape,
    },
    /// State 1 coupled upward to both 2 and 3.
    V {
        detuning2: f64,
        detuning3: f64,
        pulse12: PulseShape,
        pulse13: PulseShape,
    },
}

impl SystemSpec {
    pub fn two_state(detuning: f64, loss_rate: f64, pulse: PulseShape) -> Result<Self, DynamicsError> {
        let spec = Self::TwoState { detuning, loss_rate, pulse };
        spec.validate()?;
        Ok(spec)
    }

    pub fn ladder(
        detuning2: f64,
        detuning3: f64,
        pulse12: PulseShape,
        pulse23: PulseShape,
    ) -> Result<Self, DynamicsError> {
        let spec = Self::Ladder { detuning2, detuning3, pulse12, pulse23 };
        spec.validate()?;
        Ok(spec)
    }

    pub fn v(
        detuning2: f64,
        detuning3: f64,
        pulse12: PulseShape,
        pulse13: PulseShape,
    ) -> Result<Self, DynamicsError> {
        let spec = Self::V { detuning2, detuning3, pulse12, pulse13 };
        spec.validate()?;
        Ok(spec)
    }

    pub fn validate(&self) -> Result<(), DynamicsError> {
        match self {
            Self::TwoState { loss_rate, .. } => {
                if !(*loss_rate >= 0.0 && loss_rate.is_finite()) {
                    return Err(DynamicsError::InvalidSpec(format!(
                        "loss rate must be finite and >= 0, got {loss_rate}"
                    )));
                }
            }
            Self::Ladder { pulse12: a, pulse23: b, .. } | Self::V { pulse12: a, pulse13: b, .. } => {
                if (a.width() - b.width()).abs() > 1e-12 * a.width() {
                    return Err(DynamicsError::InvalidSpec(format!(
                        "both pulses must share one width, got {} and {}",
                        a.width(),
                        b.width()
                    )));
                }
            }
        }
        Ok(())
    }

    pub fn dimension(&self) -> usize {
        match self {
            Self::TwoState { .. } => 2,
            _ => 3,
        }
    }

    /// First pulse of the system (Ω for two states, Ω₁₂ otherwise).
    pub fn pulse_a(&self) -> &PulseShape {
        match self {
            Self::TwoState { pulse, .. } => pulse,
            Self::Ladder { pulse12, .. } | Self::V { pulse12, .. } => pulse12,
        }
    }

    /// Second pulse (Ω₂₃ for the ladder, Ω₁₃ for the V), if present.
    pub fn pulse_b(&self) -> Option<&PulseShape> {
        match self {
            Self::TwoState { .. } => None,
            Self::Ladder { pulse23, .. } => Some(pulse23),
            Self::V { pulse13, .. } => Some(pulse13),
        }
    }

    /// Shared time scale of the system's pulses.
    pub fn width(&self) -> f64 {
        self.pulse_a().width()
    }

    /// Union of the pulses' support windows at truncation level `tol`.
    pub fn support_window(&self, tol: f64) -> Result<(f64, f64), DynamicsError> {
        let (mut lo, mut hi) = self.pulse_a().support_window(tol)?;
        if let Some(b) = self.pulse_b() {
            let (blo, bhi) = b.support_window(tol)?;
            lo = lo.min(blo);
            hi = hi.max(bhi);
        }
        Ok((lo, hi))
    }
}

/// Instantaneous Hamiltonian matrix (ħ = 1).
pub fn hamiltonian(spec: &SystemSpec, t: f64) -> Array2<Complex64> {
    let c = |re: f64, im: f64| Complex64::new(re, im);
    match spec {
        SystemSpec::TwoState { detuning, loss_rate, pulse } => {
            let half_omega = 0.5 * pulse.value(t);
            let mut h = Array2::zeros((2, 2));
            h[(0, 1)] = c(half_omega, 0.0);
            h[(1, 0)] = c(half_omega, 0.0);
            h[(1, 1)] = c(*detuning, -0.5 * loss_rate);
            h
        }
        SystemSpec::Ladder { detuning2, detuning3, pulse12, pulse23 } => {
            let h12 = 0.5 * pulse12.value(t);
            let h23 = 0.5 * pulse23.value(t);
            let mut h = Array2::zeros((3, 3));
            h[(0, 1)] = c(h12, 0.0);
            h[(1, 0)] = c(h12, 0.0);
            h[(1, 1)] = c(*detuning2, 0.0);
            h[(1, 2)] = c(h23, 0.0);
            h[(2, 1)] = c(h23, 0.0);
            h[(2, 2)] = c(*detuning3, 0.0);
            h
        }
        SystemSpec::V { detuning2, detuning3, pulse12, pulse13 } => {
            let h12 = 0.5 * pulse12.value(t);
            let h13 = 0.5 * pulse13.value(t);
            let mut h = Array2::zeros((3, 3));
            h[(0, 1)] = c(h12, 0.0);
            h[(1, 0)] = c(h12, 0.0);
            h[(0, 2)] = c(h13, 0.0);
            h[(2, 0)] = c(h13, 0.0);
            h[(1, 1)] = c(*detuning2, 0.0);
            h[(2, 2)] = c(*detuning3, 0.0);
            h
        }
    }
}

/// One dense-output sample of the propagated state.
#[derive(Debug, Clone)]
pub struct TimeSample {
    pub t: f64,
    pub amplitudes: Vec<Complex64>,
    /// Running time-unwrapped phase of state 1 up to this sample.
    pub phase1: f64,
}

/// Result of a propagation over the full pulse window.
#[derive(Debug, Clone)]
pub struct PropagationResult {
    pub final_amplitudes: Vec<Complex64>,
    pub populations: Vec<f64>,
    /// Accumulated phase of state 1, unwrapped in time so multi-radian
    /// phases come out without the mod-2π ambiguity: c₁(t_f) = |c₁| e^{iφ}.
    pub phase1: f64,
    pub time_series: Vec<TimeSample>,
    /// |1 - Σ populations| at the final time.
    pub norm_defect: f64,
}

impl PropagationResult {
    /// Writes the time series as CSV: time, re/im of each amplitude, the
    /// populations, and the running unwrapped phase of state 1.
    pub fn write_csv<W: Write>(&self, mut w: W) -> std::io::Result<()> {
        let n = self.final_amplitudes.len();
        write!(w, "t")?;
        for i in 1..=n {
            write!(w, ",re_c{i},im_c{i}")?;
        }
        for i in 1..=n {
            write!(w, ",p{i}")?;
        }
        writeln!(w, ",phase1")?;
        for s in &self.time_series {
            write!(w, "{:.16e}", s.t)?;
            for a in &s.amplitudes {
                write!(w, ",{:.16e},{:.16e}", a.re, a.im)?;
            }
            for a in &s.amplitudes {
                write!(w, ",{:.16e}", a.norm_sqr())?;
            }
            writeln!(w, ",{:.16e}", s.phase1)?;
        }
        Ok(())
    }
}

/// Knobs for [`propagate_with`]; [`propagate`] uses the defaults.
#[derive(Debug, Clone, Copy)]
pub struct PropagationOptions {
    pub rel_tol: f64,
    pub abs_tol: f64,
    /// Truncation level for the pulse support window.
    pub support_tol: f64,
    /// Dense-output sampling step as a fraction of the pulse width: T/divisor.
    pub sample_divisor: u32,
}

impl Default for PropagationOptions {
    fn default() -> Self {
        Self {
            rel_tol: 1e-10,
            abs_tol: 1e-12,
            support_tol: DEFAULT_SUPPORT_TOL,
            sample_divisor: 200,
        }
    }
}

/// Propagates the Schrödinger equation i ∂ₜc = H(t) c over the pulse window
/// with an adaptive embedded Runge-Kutta 5(4) pair and dense output.
///
/// `initial` must be a unit vector of the system dimension. The phase of
/// state 1 is extracted by sampling arg c₁ on a grid no coarser than T/200
/// and unwrapping jumps larger than π.
pub fn propagate(
    spec: &SystemSpec,
    initial: &[Complex64],
    rel_tol: f64,
    abs_tol: f64,
) -> Result<PropagationResult, DynamicsError> {
    propagate_with(
        spec,
        initial,
        &PropagationOptions {
            rel_tol,
            abs_tol,
            ..PropagationOptions::default()
        },
    )
}

pub fn propagate_with(
    spec: &SystemSpec,
    initial: &[Complex64],
    opts: &PropagationOptions,
) -> Result<PropagationResult, DynamicsError> {
    spec.validate()?;
    let dim = spec.dimension();
    if initial.len() != dim {
        return Err(DynamicsError::InvalidSpec(format!(
            "initial state has {} amplitudes, system needs {dim}",
            initial.len()
        )));
    }
    let norm: f64 = initial.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
    if (norm - 1.0).abs() > 1e-9 {
        return Err(DynamicsError::InvalidSpec(format!(
            "initial state must be normalized, |c| = {norm}"
        )));
    }

    let (t_i, t_f) = spec.support_window(opts.support_tol)?;
    let ode_opts = OdeOptions {
        rel_tol: opts.rel_tol,
        abs_tol: opts.abs_tol,
        min_step: 1e-12 * spec.width(),
        max_step: None,
    };

    match spec {
        SystemSpec::TwoState { detuning, loss_rate, pulse } => {
            let delta = Complex64::new(*detuning, -0.5 * loss_rate);
            let p = pulse.clone();
            let rhs = move |t: f64, y: &[Complex64; 2]| {
                let half_omega = 0.5 * p.value(t);
                [
                    Complex64::new(0.0, -1.0) * (half_omega * y[1]),
                    Complex64::new(0.0, -1.0) * (half_omega * y[0] + delta * y[1]),
                ]
            };
            let y0 = [initial[0], initial[1]];
            let sol = ode::integrate_dense(rhs, t_i, t_f, y0, &ode_opts)?;
            finish(&sol_samples_2(&sol, spec, opts), *loss_rate == 0.0, opts.rel_tol)
        }
        SystemSpec::Ladder { detuning2, detuning3, pulse12, pulse23 } => {
            let (d2, d3) = (*detuning2, *detuning3);
            let (pa, pb) = (pulse12.clone(), pulse23.clone());
            let rhs = move |t: f64, y: &[Complex64; 3]| {
                let h12 = 0.5 * pa.value(t);
                let h23 = 0.5 * pb.value(t);
                let mi = Complex64::new(0.0, -1.0);
                [
                    mi * (h12 * y[1]),
                    mi * (h12 * y[0] + d2 * y[1] + h23 * y[2]),
                    mi * (h23 * y[1] + d3 * y[2]),
                ]
            };
            let y0 = [initial[0], initial[1], initial[2]];
            let sol = ode::integrate_dense(rhs, t_i, t_f, y0, &ode_opts)?;
            finish(&sol_samples_3(&sol, spec, opts), true, opts.rel_tol)
        }
        SystemSpec::V { detuning2, detuning3, pulse12, pulse13 } => {
            let (d2, d3) = (*detuning2, *detuning3);
            let (pa, pb) = (pulse12.clone(), pulse13.clone());
            let rhs = move |t: f64, y: &[Complex64; 3]| {
                let h12 = 0.5 * pa.value(t);
                let h13 = 0.5 * pb.value(t);
                let mi = Complex64::new(0.0, -1.0);
                [
                    mi * (h12 * y[1] + h13 * y[2]),
                    mi * (h12 * y[0] + d2 * y[1]),
                    mi * (h13 * y[0] + d3 * y[2]),
                ]
            };
            let y0 = [initial[0], initial[1], initial[2]];
            let sol = ode::integrate_dense(rhs, t_i, t_f, y0, &ode_opts)?;
            finish(&sol_samples_3(&sol, spec, opts), true, opts.rel_tol)
        }
    }
}

fn sample_times(spec: &SystemSpec, opts: &PropagationOptions, t_i: f64, t_f: f64) -> Vec<f64> {
    let max_step = spec.width() / opts.sample_divisor as f64;
    let n = ((t_f - t_i) / max_step).ceil().max(1.0) as usize;
    (0..=n)
        .map(|k| t_i + (t_f - t_i) * k as f64 / n as f64)
        .collect()
}

fn sol_samples_2(
    sol: &ode::DenseSolution<2>,
    spec: &SystemSpec,
    opts: &PropagationOptions,
) -> Vec<(f64, Vec<Complex64>)> {
    sample_times(spec, opts, sol.start_time(), sol.end_time())
        .into_iter()
        .map(|t| (t, sol.sample(t).to_vec()))
        .collect()
}

fn sol_samples_3(
    sol: &ode::DenseSolution<3>,
    spec: &SystemSpec,
    opts: &PropagationOptions,
) -> Vec<(f64, Vec<Complex64>)> {
    sample_times(spec, opts, sol.start_time(), sol.end_time())
        .into_iter()
        .map(|t| (t, sol.sample(t).to_vec()))
        .collect()
}

/// Amplitudes below this are treated as phase-less when unwrapping: the arg
/// of a numerically vanishing amplitude carries no information.
const PHASE_AMPLITUDE_FLOOR: f64 = 1e-9;

fn finish(
    samples: &[(f64, Vec<Complex64>)],
    lossless: bool,
    rel_tol: f64,
) -> Result<PropagationResult, DynamicsError> {
    let mut time_series = Vec::with_capacity(samples.len());
    let mut phase = 0.0;
    let mut last_arg: Option<f64> = None;
    for (t, amps) in samples {
        let c1 = amps[0];
        if c1.norm() >= PHASE_AMPLITUDE_FLOOR {
            let arg = c1.arg();
            match last_arg {
                None => phase = arg,
                Some(prev) => {
                    let mut d = arg - prev;
                    while d > std::f64::consts::PI {
                        d -= 2.0 * std::f64::consts::PI;
                    }
                    while d <= -std::f64::consts::PI {
                        d += 2.0 * std::f64::consts::PI;
                    }
                    phase += d;
                }
            }
            last_arg = Some(arg);
        }
        time_series.push(TimeSample {
            t: *t,
            amplitudes: amps.clone(),
            phase1: phase,
        });
    }

    let final_amplitudes = samples.last().map(|(_, a)| a.clone()).unwrap_or_default();
    let populations: Vec<f64> = final_amplitudes.iter().map(|a| a.norm_sqr()).collect();
    let norm_defect = (1.0 - populations.iter().sum::<f64>()).abs();
    if lossless && norm_defect > 100.0 * rel_tol {
        return Err(DynamicsError::Tolerance {
            defect: norm_defect,
            bound: 100.0 * rel_tol,
        });
    }
    Ok(PropagationResult {
        final_amplitudes,
        populations,
        phase1: phase,
        time_series,
        norm_defect,
    })
}

/// Peak transient departure from state 1: max over time of 1 - |c₁(t)|².
/// Meaningful as an excitation measure for lossless propagation.
pub fn transient_peak_excitation(result: &PropagationResult) -> f64 {
    result
        .time_series
        .iter()
        .map(|s| 1.0 - s.amplitudes[0].norm_sqr())
        .fold(0.0, f64::max)
}

/// Convenience: phase of state 1 starting from state 1.
pub fn numeric_phase(spec: &SystemSpec, rel_tol: f64, abs_tol: f64) -> Result<f64, DynamicsError> {
    let mut initial = vec![Complex64::new(0.0, 0.0); spec.dimension()];
    initial[0] = Complex64::new(1.0, 0.0);
    Ok(propagate(spec, &initial, rel_tol, abs_tol)?.phase1)
}
