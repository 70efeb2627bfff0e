//! Embedded Dormand-Prince 5(4) integrator with step-size control.
//!
//! The right-hand side can declare a proposed stage invalid (division by a
//! vanishing denominator, excursion outside the admissible box); the step is
//! then rejected and retried shorter. Integration stops either at the end
//! point or when the step size underflows against a singular endpoint, which
//! callers handle with an endpoint closure of their own.

/// Outcome of a marching run.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Outcome {
    /// Reached `t_end` (last recorded point is exactly `t_end`).
    ReachedEnd,
    /// Step size underflowed at the reported abscissa.
    StepUnderflow { at: f64 },
    /// Step budget exhausted.
    MaxStepsExceeded { at: f64 },
}

#[derive(Debug, Clone, Copy)]
pub struct Options {
    pub abs_tol: f64,
    pub rel_tol: f64,
    /// Largest step (also the initial step bound).
    pub h_max: f64,
    /// Steps below this abort the march as an underflow.
    pub h_min: f64,
    pub max_steps: usize,
}

impl Default for Options {
    fn default() -> Self {
        Self {
            abs_tol: 1e-10,
            rel_tol: 1e-10,
            h_max: f64::INFINITY,
            h_min: 1e-15,
            max_steps: 2_000_000,
        }
    }
}

// Dormand-Prince coefficients.
const C: [f64; 7] = [0.0, 1.0 / 5.0, 3.0 / 10.0, 4.0 / 5.0, 8.0 / 9.0, 1.0, 1.0];
const A: [[f64; 6]; 7] = [
    [0.0, 0.0, 0.0, 0.0, 0.0, 0.0],
    [1.0 / 5.0, 0.0, 0.0, 0.0, 0.0, 0.0],
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
const B5: [f64; 7] = [
    35.0 / 384.0,
    0.0,
    500.0 / 1113.0,
    125.0 / 192.0,
    -2187.0 / 6784.0,
    11.0 / 84.0,
    0.0,
];
const B4: [f64; 7] = [
    5179.0 / 57600.0,
    0.0,
    7571.0 / 16695.0,
    393.0 / 640.0,
    -92097.0 / 339200.0,
    187.0 / 2100.0,
    1.0 / 40.0,
];

/// Marches `y' = f(t, y)` from `t0` to `t_end` (assumed `t_end > t0`).
///
/// `f(t, y, dy) -> bool` fills the derivative and returns whether the stage
/// is admissible. `record(t, y)` is called for every accepted step, including
/// the initial point.
pub fn integrate<F, R>(
    mut f: F,
    t0: f64,
    t_end: f64,
    y0: &[f64],
    opts: &Options,
    mut record: R,
) -> Outcome
where
    F: FnMut(f64, &[f64], &mut [f64]) -> bool,
    R: FnMut(f64, &[f64]),
{
    let dim = y0.len();
    let mut t = t0;
    let mut y = y0.to_vec();
    record(t, &y);

    let span = t_end - t0;
    let mut h = (opts.h_max.min(span / 100.0)).min(span);
    let mut k: Vec<Vec<f64>> = vec![vec![0.0; dim]; 7];
    let mut stage = vec![0.0; dim];
    let mut y5 = vec![0.0; dim];

    // First derivative (FSAL seed).
    if !f(t, &y, &mut k[0]) {
        return Outcome::StepUnderflow { at: t };
    }

    let mut have_k0 = true;
    for _ in 0..opts.max_steps {
        if t >= t_end {
            return Outcome::ReachedEnd;
        }
        h = h.min(t_end - t);
        if h < opts.h_min {
            return Outcome::StepUnderflow { at: t };
        }
        if !have_k0 && !f(t, &y, &mut k[0]) {
            return Outcome::StepUnderflow { at: t };
        }
        have_k0 = true;

        let mut valid = true;
        for s in 1..7 {
            for i in 0..dim {
                let mut acc = 0.0;
                for (j, kj) in k.iter().enumerate().take(s) {
                    let a = A[s][j];
                    if a != 0.0 {
                        acc += a * kj[i];
                    }
                }
                stage[i] = y[i] + h * acc;
            }
            let (head, tail) = k.split_at_mut(s);
            let _ = head;
            if !f(t + C[s] * h, &stage, &mut tail[0]) {
                valid = false;
                break;
            }
        }

        if valid {
            let mut err: f64 = 0.0;
            for i in 0..dim {
                let mut acc5 = 0.0;
                let mut acc4 = 0.0;
                for (j, kj) in k.iter().enumerate() {
                    acc5 += B5[j] * kj[i];
                    acc4 += B4[j] * kj[i];
                }
                y5[i] = y[i] + h * acc5;
                let sc = opts.abs_tol + opts.rel_tol * y[i].abs().max(y5[i].abs());
                err = err.max((h * (acc5 - acc4)).abs() / sc);
            }
            if err.is_finite() && err <= 1.0 {
                t += h;
                std::mem::swap(&mut y, &mut y5);
                // FSAL: the 7th stage is f at the accepted point.
                k.swap(0, 6);
                record(t, &y);
                let grow = if err == 0.0 {
                    5.0
                } else {
                    (0.9 * err.powf(-0.2)).clamp(0.2, 5.0)
                };
                h = (h * grow).min(opts.h_max);
                continue;
            }
            let shrink = if err.is_finite() {
                (0.9 * err.powf(-0.2)).clamp(0.1, 0.9)
            } else {
                0.25
            };
            h *= shrink;
        } else {
            h *= 0.25;
        }
    }
    Outcome::MaxStepsExceeded { at: t }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exponential_decay() {
        // y' = -y, y(0) = 1: y(2) = e^{-2}.
        let mut last = (0.0, vec![0.0]);
        let out = integrate(
            |_t, y, dy| {
                dy[0] = -y[0];
                true
            },
            0.0,
            2.0,
            &[1.0],
            &Options::default(),
            |t, y| last = (t, y.to_vec()),
        );
        assert_eq!(out, Outcome::ReachedEnd);
        assert!((last.1[0] - (-2.0f64).exp()).abs() < 1e-10);
    }

    #[test]
    fn quadrature_state() {
        // y' = cos(t): y(pi/2) = 1.
        let mut last = vec![0.0];
        integrate(
            |t, _y, dy| {
                dy[0] = t.cos();
                true
            },
            0.0,
            std::f64::consts::FRAC_PI_2,
            &[0.0],
            &Options::default(),
            |_t, y| last = y.to_vec(),
        );
        assert!((last[0] - 1.0).abs() < 1e-10);
    }

    #[test]
    fn singular_endpoint_underflows_gracefully() {
        // y' = 1/(1-t) blows up at t = 1; expect a step underflow close to it.
        let out = integrate(
            |t, _y, dy| {
                if t >= 1.0 {
                    return false;
                }
                dy[0] = 1.0 / (1.0 - t);
                true
            },
            0.0,
            1.0,
            &[0.0],
            &Options {
                h_min: 1e-13,
                ..Options::default()
            },
            |_t, _y| {},
        );
        match out {
            Outcome::StepUnderflow { at } => assert!(at > 1.0 - 1e-6, "stalled too early: {at}"),
            other => panic!("expected underflow, got {other:?}"),
        }
    }
}
