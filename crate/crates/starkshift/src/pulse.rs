//! Pulse envelopes Ω(t) = Ω₀ f(t/T) with exact analytic derivatives and
//! truncation windows.
//!
//! Every downstream formula consumes this abstraction: the quadrature-based
//! phases need Ω, Ω̇ and Ω̈, the propagator needs a finite integration window,
//! and the exact solutions assume the sech shape. Tabulated envelopes loaded
//! from CSV are interpolated with a natural cubic spline.

use std::io::BufRead;
use std::path::Path;
use thiserror::Error;

/// Default relative cutoff for [`PulseShape::support_window`]: the neglected
/// tail area is far below every phase tolerance used in this crate.
pub const DEFAULT_SUPPORT_TOL: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum PulseError {
    #[error("peak Rabi frequency must be finite and >= 0, got {0}")]
    InvalidOmega0(f64),
    #[error("pulse width must be finite and > 0, got {0}")]
    InvalidWidth(f64),
    #[error("tabulated pulse needs at least 3 samples, got {0}")]
    TooFewSamples(usize),
    #[error("tabulated sample times must be strictly increasing (index {0})")]
    NonMonotonicSamples(usize),
    #[error("negative Rabi frequency {value} at sample index {index}")]
    NegativeOmega { index: usize, value: f64 },
    #[error("support tolerance must lie in (0, 1), got {0}")]
    InvalidTolerance(f64),
    #[error("failed to read pulse file: {0}")]
    Io(String),
    #[error("unparsable pulse file line {line}: {text:?}")]
    Parse { line: usize, text: String },
}

/// A pulse envelope. Immutable after construction; all evaluations are pure.
#[derive(Debug, Clone, PartialEq)]
pub enum PulseShape {
    /// Ω(t) = Ω₀ exp(-t²/T²).
    Gaussian { omega0: f64, width: f64 },
    /// Ω(t) = Ω₀ sech(t/T).
    Sech { omega0: f64, width: f64 },
    /// Spline interpolation of sampled (t, Ω) pairs; zero outside the range.
    Tabulated(TabulatedPulse),
}

impl PulseShape {
    pub fn gaussian(omega0: f64, width: f64) -> Result<Self, PulseError> {
        check_params(omega0, width)?;
        Ok(Self::Gaussian { omega0, width })
    }

    pub fn sech(omega0: f64, width: f64) -> Result<Self, PulseError> {
        check_params(omega0, width)?;
        Ok(Self::Sech { omega0, width })
    }

    /// Builds a tabulated pulse from (t, Ω) samples. Negative Ω values are
    /// rejected: every formula downstream assumes Ω ≥ 0.
    pub fn tabulated(samples: Vec<(f64, f64)>) -> Result<Self, PulseError> {
        Ok(Self::Tabulated(TabulatedPulse::new(samples)?))
    }

    /// Loads a tabulated pulse from two-column CSV `t, omega`. A header row
    /// is optional; `#` comment lines are skipped. Units are (units of T,
    /// units of 1/T).
    pub fn from_csv_path<P: AsRef<Path>>(path: P) -> Result<Self, PulseError> {
        let file = std::fs::File::open(path).map_err(|e| PulseError::Io(e.to_string()))?;
        Self::from_csv_reader(std::io::BufReader::new(file))
    }

    /// See [`PulseShape::from_csv_path`].
    pub fn from_csv_reader<R: BufRead>(reader: R) -> Result<Self, PulseError> {
        let mut samples = Vec::new();
        for (idx, line) in reader.lines().enumerate() {
            let line = line.map_err(|e| PulseError::Io(e.to_string()))?;
            let text = line.trim();
            if text.is_empty() || text.starts_with('#') {
                continue;
            }
            let mut fields = text.split(',').map(str::trim);
            let parsed = match (fields.next(), fields.next()) {
                (Some(a), Some(b)) => a.parse::<f64>().ok().zip(b.parse::<f64>().ok()),
                _ => None,
            };
            match parsed {
                Some((t, omega)) => samples.push((t, omega)),
                // Allow a single non-numeric header row at the top.
                None if samples.is_empty() && idx == 0 => continue,
                None => {
                    return Err(PulseError::Parse {
                        line: idx + 1,
                        text: text.to_string(),
                    })
                }
            }
        }
        Self::tabulated(samples)
    }

    /// Peak Rabi frequency Ω₀. For tabulated pulses, the largest sample.
    pub fn omega0(&self) -> f64 {
        match self {
            Self::Gaussian { omega0, .. } | Self::Sech { omega0, .. } => *omega0,
            Self::Tabulated(tab) => tab.omega0,
        }
    }

    /// Characteristic width T. For tabulated pulses, half the sample range.
    pub fn width(&self) -> f64 {
        match self {
            Self::Gaussian { width, .. } | Self::Sech { width, .. } => *width,
            Self::Tabulated(tab) => 0.5 * (tab.ts[tab.ts.len() - 1] - tab.ts[0]),
        }
    }

    /// Returns a copy with the peak scaled to `omega0` (tabulated samples are
    /// rescaled proportionally). Used by Rabi-frequency sweeps.
    pub fn with_omega0(&self, omega0: f64) -> Result<Self, PulseError> {
        if !(omega0.is_finite() && omega0 >= 0.0) {
            return Err(PulseError::InvalidOmega0(omega0));
        }
        match self {
            Self::Gaussian { width, .. } => Self::gaussian(omega0, *width),
            Self::Sech { width, .. } => Self::sech(omega0, *width),
            Self::Tabulated(tab) => {
                let scale = if tab.omega0 > 0.0 { omega0 / tab.omega0 } else { 0.0 };
                Self::tabulated(
                    tab.ts
                        .iter()
                        .zip(&tab.values)
                        .map(|(&t, &v)| (t, v * scale))
                        .collect(),
                )
            }
        }
    }

    /// Ω(t). Total over all finite t; zero outside a tabulated sample range.
    pub fn value(&self, t: f64) -> f64 {
        match self {
            Self::Gaussian { omega0, width } => omega0 * (-(t / width).powi(2)).exp(),
            Self::Sech { omega0, width } => omega0 / (t / width).cosh(),
            Self::Tabulated(tab) => tab.eval(t).0,
        }
    }

    /// dΩ/dt, analytic for the closed-form shapes.
    pub fn deriv(&self, t: f64) -> f64 {
        match self {
            Self::Gaussian { omega0, width } => {
                -2.0 * t / (width * width) * omega0 * (-(t / width).powi(2)).exp()
            }
            Self::Sech { omega0, width } => {
                let x = t / width;
                -omega0 / width * x.tanh() / x.cosh()
            }
            Self::Tabulated(tab) => tab.eval(t).1,
        }
    }

    /// d²Ω/dt², analytic for the closed-form shapes.
    pub fn second_deriv(&self, t: f64) -> f64 {
        match self {
            Self::Gaussian { omega0, width } => {
                let w2 = width * width;
                let x2 = t * t / w2;
                omega0 * (4.0 * x2 - 2.0) / w2 * (-x2).exp()
            }
            Self::Sech { omega0, width } => {
                let x = t / width;
                let sech = 1.0 / x.cosh();
                omega0 / (width * width) * (sech - 2.0 * sech.powi(3))
            }
            Self::Tabulated(tab) => tab.eval(t).2,
        }
    }

    /// Symmetric window (t_i, t_f) outside which Ω(t)/Ω₀ ≤ `tol`; used to
    /// truncate every integral and propagation in the crate. Tabulated
    /// pulses return their sample range.
    pub fn support_window(&self, tol: f64) -> Result<(f64, f64), PulseError> {
        if !(tol > 0.0 && tol < 1.0) {
            return Err(PulseError::InvalidTolerance(tol));
        }
        Ok(match self {
            Self::Gaussian { width, .. } => {
                let half = width * (1.0 / tol).ln().sqrt();
                (-half, half)
            }
            Self::Sech { width, .. } => {
                // arcsech(x) = ln((1 + sqrt(1 - x²)) / x)
                let half = width * ((1.0 + (1.0 - tol * tol).sqrt()) / tol).ln();
                (-half, half)
            }
            Self::Tabulated(tab) => (tab.ts[0], tab.ts[tab.ts.len() - 1]),
        })
    }
}

fn check_params(omega0: f64, width: f64) -> Result<(), PulseError> {
    if !(omega0.is_finite() && omega0 >= 0.0) {
        return Err(PulseError::InvalidOmega0(omega0));
    }
    if !(width.is_finite() && width > 0.0) {
        return Err(PulseError::InvalidWidth(width));
    }
    Ok(())
}

/// Natural cubic spline through strictly increasing samples.
///
/// Derivatives are the spline's own; they are discontinuous at the sample
/// endpoints where the pulse is clamped to zero, which is accepted for this
/// convenience input path (the analytic shapes are the primary ones).
#[derive(Debug, Clone, PartialEq)]
pub struct TabulatedPulse {
    ts: Vec<f64>,
    values: Vec<f64>,
    /// Second derivatives at the knots (natural boundary: zero at the ends).
    second: Vec<f64>,
    omega0: f64,
}

impl TabulatedPulse {
    fn new(samples: Vec<(f64, f64)>) -> Result<Self, PulseError> {
        if samples.len() < 3 {
            return Err(PulseError::TooFewSamples(samples.len()));
        }
        for (i, &(_, v)) in samples.iter().enumerate() {
            if v < 0.0 {
                return Err(PulseError::NegativeOmega { index: i, value: v });
            }
        }
        for i in 1..samples.len() {
            if samples[i].0 <= samples[i - 1].0 {
                return Err(PulseError::NonMonotonicSamples(i));
            }
        }
        let ts: Vec<f64> = samples.iter().map(|s| s.0).collect();
        let values: Vec<f64> = samples.iter().map(|s| s.1).collect();
        let second = natural_spline_second_derivs(&ts, &values);
        let omega0 = values.iter().cloned().fold(0.0, f64::max);
        Ok(Self { ts, values, second, omega0 })
    }

    /// (Ω, Ω̇, Ω̈) at `t`; all zero outside the sample range. Interpolation
    /// undershoot below zero is clamped away so Ω(t) ≥ 0 holds everywhere.
    fn eval(&self, t: f64) -> (f64, f64, f64) {
        let n = self.ts.len();
        if t < self.ts[0] || t > self.ts[n - 1] {
            return (0.0, 0.0, 0.0);
        }
        let i = match self.ts.binary_search_by(|x| x.partial_cmp(&t).unwrap()) {
            Ok(k) => k.min(n - 2),
            Err(k) => k.saturating_sub(1).min(n - 2),
        };
        let h = self.ts[i + 1] - self.ts[i];
        let a = (self.ts[i + 1] - t) / h;
        let b = (t - self.ts[i]) / h;
        let (ya, yb) = (self.values[i], self.values[i + 1]);
        let (ma, mb) = (self.second[i], self.second[i + 1]);
        let value = a * ya + b * yb
            + ((a * a * a - a) * ma + (b * b * b - b) * mb) * h * h / 6.0;
        if value <= 0.0 {
            return (0.0, 0.0, 0.0);
        }
        let deriv = (yb - ya) / h
            + ((1.0 - 3.0 * a * a) * ma + (3.0 * b * b - 1.0) * mb) * h / 6.0;
        let second = a * ma + b * mb;
        (value, deriv, second)
    }
}

/// Tridiagonal solve for natural-spline second derivatives.
fn natural_spline_second_derivs(ts: &[f64], ys: &[f64]) -> Vec<f64> {
    let n = ts.len();
    let mut m = vec![0.0; n];
    let mut u = vec![0.0; n];
    for i in 1..n - 1 {
        let sig = (ts[i] - ts[i - 1]) / (ts[i + 1] - ts[i - 1]);
        let p = sig * m[i - 1] + 2.0;
        m[i] = (sig - 1.0) / p;
        let d = (ys[i + 1] - ys[i]) / (ts[i + 1] - ts[i])
            - (ys[i] - ys[i - 1]) / (ts[i] - ts[i - 1]);
        u[i] = (6.0 * d / (ts[i + 1] - ts[i - 1]) - sig * u[i - 1]) / p;
    }
    m[n - 1] = 0.0;
    for i in (1..n - 1).rev() {
        m[i] = m[i] * m[i + 1] + u[i];
    }
    m[0] = 0.0;
    m
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quad;
    use std::f64::consts::PI;

    #[test]
    fn peak_values() {
        let g = PulseShape::gaussian(8.0, 1.0).unwrap();
        assert_eq!(g.value(0.0), 8.0);
        let s = PulseShape::sech(1.0, 1.0).unwrap();
        assert_eq!(s.value(0.0), 1.0);
        // sech(1) ≈ 0.648054
        assert!((s.value(1.0) - 0.6480542736638855).abs() < 1e-12);
    }

    #[test]
    fn zero_field_is_zero_everywhere() {
        for p in [
            PulseShape::gaussian(0.0, 1.0).unwrap(),
            PulseShape::sech(0.0, 2.0).unwrap(),
        ] {
            for t in [-5.0, -0.3, 0.0, 1.7, 9.0] {
                assert_eq!(p.value(t), 0.0);
                assert_eq!(p.deriv(t), 0.0);
                assert_eq!(p.second_deriv(t), 0.0);
            }
        }
    }

    #[test]
    fn derivative_anchor_points() {
        let g = PulseShape::gaussian(1.0, 1.0).unwrap();
        assert_eq!(g.deriv(0.0), 0.0);
        assert!((g.deriv(1.0) + 2.0 * (-1.0f64).exp()).abs() < 1e-15);
        assert!((g.second_deriv(0.0) + 2.0).abs() < 1e-15);

        let s = PulseShape::sech(1.0, 1.0).unwrap();
        assert_eq!(s.deriv(0.0), 0.0);
        assert!((s.second_deriv(0.0) + 1.0).abs() < 1e-15);
    }

    #[test]
    fn derivatives_match_finite_differences() {
        // First differences at h = 1e-5 T; second differences at h = 1e-4 T,
        // where f64 cancellation noise (~eps/h² relative) stays below the
        // bound. Errors are relative to the natural derivative scales
        // Ω₀/T and Ω₀/T².
        let shapes = [
            PulseShape::gaussian(3.0, 0.7).unwrap(),
            PulseShape::sech(5.0, 1.3).unwrap(),
        ];
        for p in &shapes {
            let width = p.width();
            let (ti, tf) = p.support_window(DEFAULT_SUPPORT_TOL).unwrap();
            let h1 = 1e-5 * width;
            let h2 = 1e-4 * width;
            let scale1 = p.omega0() / width;
            let scale2 = p.omega0() / (width * width);
            for k in 0..=60 {
                let t = ti + (tf - ti) * k as f64 / 60.0;
                let fd1 = (p.value(t + h1) - p.value(t - h1)) / (2.0 * h1);
                let fd2 = (p.value(t + h2) - 2.0 * p.value(t) + p.value(t - h2)) / (h2 * h2);
                assert!(
                    (p.deriv(t) - fd1).abs() / p.deriv(t).abs().max(scale1 * 1e-3) < 1e-6,
                    "deriv at t={t}"
                );
                assert!(
                    (p.second_deriv(t) - fd2).abs() / p.second_deriv(t).abs().max(scale2 * 1e-3)
                        < 1e-6,
                    "second at t={t}"
                );
            }
        }
    }

    #[test]
    fn pulse_areas() {
        // Gaussian area Ω₀T√π, sech area πΩ₀T.
        let g = PulseShape::gaussian(2.0, 1.5).unwrap();
        let (ti, tf) = g.support_window(1e-12).unwrap();
        let area = quad::integrate(|t| g.value(t), ti, tf, 1e-13);
        let want = 2.0 * 1.5 * PI.sqrt();
        assert!((area - want).abs() / want < 1e-9);

        let s = PulseShape::sech(3.0, 0.8).unwrap();
        let (ti, tf) = s.support_window(1e-12).unwrap();
        let area = quad::integrate(|t| s.value(t), ti, tf, 1e-13);
        let want = PI * 3.0 * 0.8;
        assert!((area - want).abs() / want < 1e-9);
    }

    #[test]
    fn even_symmetry() {
        let shapes = [
            PulseShape::gaussian(4.0, 1.0).unwrap(),
            PulseShape::sech(4.0, 1.0).unwrap(),
        ];
        for p in &shapes {
            for t in [0.1, 0.9, 2.3, 4.4] {
                assert_eq!(p.value(t), p.value(-t));
            }
        }
    }

    #[test]
    fn support_windows() {
        let g = PulseShape::gaussian(1.0, 1.0).unwrap();
        let (ti, tf) = g.support_window((-16.0f64).exp()).unwrap();
        assert!((tf - 4.0).abs() < 1e-12 && (ti + 4.0).abs() < 1e-12);

        let s = PulseShape::sech(1.0, 1.0).unwrap();
        let (_, tf) = s.support_window(1e-10).unwrap();
        assert!((tf - (2e10f64).ln()).abs() < 1e-6);
        // The envelope really is at the cutoff level there.
        assert!(s.value(tf) / s.omega0() <= 1e-10 * (1.0 + 1e-12));

        assert!(g.support_window(0.0).is_err());
        assert!(g.support_window(1.0).is_err());
    }

    #[test]
    fn tabulated_spline_tracks_sech() {
        let width = 1.0;
        let samples: Vec<(f64, f64)> = (0..=800)
            .map(|k| {
                let t = -10.0 + 20.0 * k as f64 / 800.0;
                (t, 2.0 / (t / width).cosh())
            })
            .collect();
        let p = PulseShape::tabulated(samples).unwrap();
        assert!((p.omega0() - 2.0).abs() < 1e-12);
        let exact = PulseShape::sech(2.0, width).unwrap();
        for t in [-3.0, -1.1, 0.0, 0.4, 2.6] {
            assert!((p.value(t) - exact.value(t)).abs() < 1e-6);
            assert!((p.deriv(t) - exact.deriv(t)).abs() < 1e-4);
        }
        // Zero outside the sample range, and the window is the sample range.
        assert_eq!(p.value(11.0), 0.0);
        assert_eq!(p.support_window(1e-12).unwrap(), (-10.0, 10.0));
    }

    #[test]
    fn tabulated_never_goes_negative() {
        // A narrow spike makes the natural spline undershoot next to it;
        // the envelope must clamp that to zero.
        let samples = vec![
            (0.0, 0.0),
            (1.0, 0.0),
            (2.0, 0.0),
            (3.0, 5.0),
            (4.0, 0.0),
            (5.0, 0.0),
            (6.0, 0.0),
        ];
        let p = PulseShape::tabulated(samples).unwrap();
        for k in 0..=6000 {
            let t = 6.0 * k as f64 / 6000.0;
            assert!(p.value(t) >= 0.0, "negative envelope at t = {t}");
        }
        assert_eq!(p.value(3.0), 5.0);
    }

    #[test]
    fn tabulated_rejects_bad_input() {
        assert!(matches!(
            PulseShape::tabulated(vec![(0.0, 1.0), (1.0, 2.0)]),
            Err(PulseError::TooFewSamples(2))
        ));
        assert!(matches!(
            PulseShape::tabulated(vec![(0.0, 1.0), (0.0, 2.0), (1.0, 0.5)]),
            Err(PulseError::NonMonotonicSamples(1))
        ));
        assert!(matches!(
            PulseShape::tabulated(vec![(0.0, 1.0), (1.0, -0.1), (2.0, 0.5)]),
            Err(PulseError::NegativeOmega { index: 1, .. })
        ));
    }

    #[test]
    fn csv_round_trip() {
        let csv = "t,omega\n# comment\n-1.0, 0.5\n0.0,2.0\n1.0, 0.5\n";
        let p = PulseShape::from_csv_reader(csv.as_bytes()).unwrap();
        assert_eq!(p.value(0.0), 2.0);
        assert_eq!(p.omega0(), 2.0);
        assert_eq!(p.width(), 1.0);

        let headerless = "-1.0,0.5\n0.0,2.0\n1.0,0.5\n";
        let q = PulseShape::from_csv_reader(headerless.as_bytes()).unwrap();
        assert_eq!(p, q);

        let bad = "-1.0,0.5\nnot,numbers\n1.0,0.5\n";
        assert!(matches!(
            PulseShape::from_csv_reader(bad.as_bytes()),
            Err(PulseError::Parse { line: 2, .. })
        ));
    }

    #[test]
    fn rescaled_peak() {
        let p = PulseShape::sech(2.0, 1.0).unwrap().with_omega0(5.0).unwrap();
        assert_eq!(p.value(0.0), 5.0);
    }
}
