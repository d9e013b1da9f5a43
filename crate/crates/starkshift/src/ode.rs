//! Adaptive Dormand-Prince 5(4) integration of complex-valued systems with
//! continuous (dense) output.
//!
//! The propagator in [`crate::dynamics`] drives this on 2- and 3-component
//! state vectors. The dense interpolant is the standard 4th-order continuous
//! extension built from an extra quadrature stage, so the solution can be
//! sampled on an arbitrary grid without constraining the step sequence.

use num_complex::Complex64;
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum OdeError {
    #[error("step size collapsed to {step:e} at t = {t} (stiffness limit {min_step:e})")]
    Stiffness { t: f64, step: f64, min_step: f64 },
    #[error("tolerances must lie in (0, 1e-3], got rel_tol={rel_tol:e}, abs_tol={abs_tol:e}")]
    InvalidTolerance { rel_tol: f64, abs_tol: f64 },
}

// Butcher tableau of the Dormand-Prince 5(4) pair (FSAL).
const C: [f64; 7] = [0.0, 0.2, 0.3, 0.8, 8.0 / 9.0, 1.0, 1.0];
const A: [[f64; 6]; 7] = [
    [0.0, 0.0, 0.0, 0.0, 0.0, 0.0],
    [0.2, 0.0, 0.0, 0.0, 0.0, 0.0],
    [3.0 / 40.0, 9.0 / 40.0, 0.0, 0.0, 0.0, 0.0],
    [44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0, 0.0, 0.0, 0.0],
    [
        19372.0 / 6561.0,
        -25360.0 / 2187.0,
        64448.0 / 6561.0,
        -212.0 / 729.0,
        0.0,
        0.0,
    ],
    [
        9017.0 / 3168.0,
        -355.0 / 33.0,
        46732.0 / 5247.0,
        49.0 / 176.0,
        -5103.0 / 18656.0,
        0.0,
    ],
    [
        35.0 / 384.0,
        0.0,
        500.0 / 1113.0,
        125.0 / 192.0,
        -2187.0 / 6784.0,
        11.0 / 84.0,
    ],
];
/// Difference between the 5th- and embedded 4th-order weights.
const E: [f64; 7] = [
    71.0 / 57600.0,
    0.0,
    -71.0 / 16695.0,
    71.0 / 1920.0,
    -17253.0 / 339200.0,
    22.0 / 525.0,
    -1.0 / 40.0,
];
/// Dense-output weights for the interpolation polynomial.
const D: [f64; 7] = [
    -12715105075.0 / 11282082432.0,
    0.0,
    87487479700.0 / 32700410799.0,
    -10690763975.0 / 1880347072.0,
    701980252875.0 / 199316789632.0,
    -1453857185.0 / 822651844.0,
    69997945.0 / 29380423.0,
];

const SAFETY: f64 = 0.9;
const MIN_FACTOR: f64 = 0.2;
const MAX_FACTOR: f64 = 5.0;

#[derive(Debug, Clone, Copy)]
pub struct OdeOptions {
    pub rel_tol: f64,
    pub abs_tol: f64,
    /// Steps smaller than this raise [`OdeError::Stiffness`].
    pub min_step: f64,
    /// Optional cap on the step size.
    pub max_step: Option<f64>,
}

impl Default for OdeOptions {
    fn default() -> Self {
        Self {
            rel_tol: 1e-10,
            abs_tol: 1e-12,
            min_step: 1e-300,
            max_step: None,
        }
    }
}

/// One accepted step with its dense-output coefficients.
#[derive(Debug, Clone)]
struct Step<const N: usize> {
    t: f64,
    h: f64,
    cont: [[Complex64; N]; 5],
}

/// The continuous solution over `[t0, t1]`.
#[derive(Debug, Clone)]
pub struct DenseSolution<const N: usize> {
    t0: f64,
    t1: f64,
    y1: [Complex64; N],
    steps: Vec<Step<N>>,
}

impl<const N: usize> DenseSolution<N> {
    pub fn start_time(&self) -> f64 {
        self.t0
    }

    pub fn end_time(&self) -> f64 {
        self.t1
    }

    pub fn final_state(&self) -> [Complex64; N] {
        self.y1
    }

    pub fn accepted_steps(&self) -> usize {
        self.steps.len()
    }

    /// Evaluates the interpolant at `t`, clamped to the integration interval.
    pub fn sample(&self, t: f64) -> [Complex64; N] {
        let t = t.clamp(self.t0.min(self.t1), self.t0.max(self.t1));
        // Steps are ordered in t; binary-search for the covering step.
        let idx = self
            .steps
            .partition_point(|s| s.t + s.h < t)
            .min(self.steps.len() - 1);
        let step = &self.steps[idx];
        let theta = if step.h != 0.0 { (t - step.t) / step.h } else { 0.0 };
        let th1 = 1.0 - theta;
        let mut out = [Complex64::default(); N];
        for i in 0..N {
            let c = &step.cont;
            out[i] = c[0][i]
                + (c[1][i] + (c[2][i] + (c[3][i] + c[4][i] * th1) * theta) * th1) * theta;
        }
        out
    }
}

/// Integrates `dy/dt = rhs(t, y)` from `t0` to `t1 > t0`.
pub fn integrate_dense<const N: usize, F>(
    rhs: F,
    t0: f64,
    t1: f64,
    y0: [Complex64; N],
    opts: &OdeOptions,
) -> Result<DenseSolution<N>, OdeError>
where
    F: Fn(f64, &[Complex64; N]) -> [Complex64; N],
{
    if !(opts.rel_tol > 0.0 && opts.rel_tol <= 1e-3 && opts.abs_tol > 0.0 && opts.abs_tol <= 1e-3)
    {
        return Err(OdeError::InvalidTolerance {
            rel_tol: opts.rel_tol,
            abs_tol: opts.abs_tol,
        });
    }
    let span = t1 - t0;
    debug_assert!(span > 0.0);

    let mut t = t0;
    let mut y = y0;
    let mut k0 = rhs(t, &y);
    let mut h = initial_step(span, opts);
    let mut steps = Vec::new();

    while t < t1 {
        if let Some(max_h) = opts.max_step {
            h = h.min(max_h);
        }
        h = h.min(t1 - t);
        if h < opts.min_step {
            return Err(OdeError::Stiffness {
                t,
                step: h,
                min_step: opts.min_step,
            });
        }

        let mut k = [[Complex64::default(); N]; 7];
        k[0] = k0;
        for stage in 1..6 {
            let mut yi = y;
            for (j, kj) in k.iter().enumerate().take(stage) {
                let a = A[stage][j];
                if a != 0.0 {
                    for i in 0..N {
                        yi[i] += kj[i] * (a * h);
                    }
                }
            }
            k[stage] = rhs(t + C[stage] * h, &yi);
        }
        // Row 6 of A holds the 5th-order weights; the last stage sits at the
        // new solution (FSAL) and doubles as the next step's first stage.
        let mut y_new = y;
        for (j, kj) in k.iter().enumerate().take(6) {
            let b = A[6][j];
            if b != 0.0 {
                for i in 0..N {
                    y_new[i] += kj[i] * (b * h);
                }
            }
        }
        k[6] = rhs(t + h, &y_new);

        // RMS of the embedded error scaled by abs_tol + rel_tol * |y|.
        let mut err_sq = 0.0;
        for i in 0..N {
            let mut e = Complex64::default();
            for (j, kj) in k.iter().enumerate() {
                e += kj[i] * E[j];
            }
            let scale = opts.abs_tol + opts.rel_tol * y[i].norm().max(y_new[i].norm());
            let r = e.norm() * h / scale;
            err_sq += r * r;
        }
        let err = (err_sq / N as f64).sqrt();

        if err <= 1.0 {
            steps.push(make_step(t, h, &y, &y_new, &k));
            t += h;
            y = y_new;
            k0 = k[6];
        }
        let factor = if err == 0.0 {
            MAX_FACTOR
        } else {
            (SAFETY * err.powf(-0.2)).clamp(MIN_FACTOR, MAX_FACTOR)
        };
        h *= factor;
    }

    Ok(DenseSolution {
        t0,
        t1,
        y1: y,
        steps,
    })
}

fn make_step<const N: usize>(
    t: f64,
    h: f64,
    y0: &[Complex64; N],
    y1: &[Complex64; N],
    k: &[[Complex64; N]; 7],
) -> Step<N> {
    let mut cont = [[Complex64::default(); N]; 5];
    for i in 0..N {
        let ydiff = y1[i] - y0[i];
        let bspl = k[0][i] * h - ydiff;
        cont[0][i] = y0[i];
        cont[1][i] = ydiff;
        cont[2][i] = bspl;
        cont[3][i] = ydiff - k[6][i] * h - bspl;
        let mut dsum = Complex64::default();
        for j in 0..7 {
            if D[j] != 0.0 {
                dsum += k[j][i] * D[j];
            }
        }
        cont[4][i] = dsum * h;
    }
    Step { t, h, cont }
}

/// First-step guess; deliberately small, the controller grows it within a
/// few steps and rejected trial steps are cheap here.
fn initial_step(span: f64, opts: &OdeOptions) -> f64 {
    let h = span * 1e-4;
    match opts.max_step {
        Some(max_h) => h.min(max_h),
        None => h,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn exponential_decay() {
        let sol = integrate_dense(
            |_, y: &[Complex64; 1]| [-y[0]],
            0.0,
            5.0,
            [c(1.0, 0.0)],
            &OdeOptions::default(),
        )
        .unwrap();
        let got = sol.final_state()[0];
        assert!((got.re - (-5.0f64).exp()).abs() < 1e-11);
        assert!(got.im.abs() < 1e-13);
        // Dense output matches the exact solution in the interior.
        for t in [0.3, 1.7, 2.9, 4.999] {
            let v = sol.sample(t)[0];
            assert!((v.re - (-t).exp()).abs() < 1e-10, "at t={t}");
        }
    }

    #[test]
    fn complex_rotation_phase() {
        // dy/dt = -i ω y -> y(t) = e^{-iωt}; amplitude exactly preserved.
        let omega = 3.0;
        let sol = integrate_dense(
            move |_, y: &[Complex64; 1]| [-Complex64::i() * omega * y[0]],
            0.0,
            10.0,
            [c(1.0, 0.0)],
            &OdeOptions::default(),
        )
        .unwrap();
        let got = sol.final_state()[0];
        let want = (-Complex64::i() * omega * 10.0).exp();
        assert!((got - want).norm() < 1e-9);
        assert!((got.norm() - 1.0).abs() < 1e-9);
    }

    #[test]
    fn two_level_rabi_oscillation() {
        // Constant resonant coupling: P2(t) = sin²(Ωt/2).
        let omega = 2.0;
        let rhs = move |_: f64, y: &[Complex64; 2]| {
            [
                -Complex64::i() * (0.5 * omega) * y[1],
                -Complex64::i() * (0.5 * omega) * y[0],
            ]
        };
        let sol = integrate_dense(
            rhs,
            0.0,
            4.0,
            [c(1.0, 0.0), c(0.0, 0.0)],
            &OdeOptions::default(),
        )
        .unwrap();
        for t in [0.5, 1.0, 2.3, 4.0] {
            let y = sol.sample(t);
            let p2 = y[1].norm_sqr();
            let want = (0.5 * omega * t).sin().powi(2);
            assert!((p2 - want).abs() < 1e-9, "t={t}: {p2} vs {want}");
        }
    }

    #[test]
    fn rejects_bad_tolerances() {
        let r = integrate_dense(
            |_, y: &[Complex64; 1]| [y[0]],
            0.0,
            1.0,
            [c(1.0, 0.0)],
            &OdeOptions {
                rel_tol: 0.1,
                ..OdeOptions::default()
            },
        );
        assert!(matches!(r, Err(OdeError::InvalidTolerance { .. })));
    }

    #[test]
    fn stiffness_guard_fires() {
        // min_step larger than the span forces an immediate stiffness error.
        let r = integrate_dense(
            |_, y: &[Complex64; 1]| [y[0]],
            0.0,
            1.0,
            [c(1.0, 0.0)],
            &OdeOptions {
                min_step: 10.0,
                ..OdeOptions::default()
            },
        );
        assert!(matches!(r, Err(OdeError::Stiffness { .. })));
    }
}
