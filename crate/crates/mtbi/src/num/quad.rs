//! Adaptive Gauss-Kronrod quadrature and endpoint divergence analysis.
//!
//! The improper integrals that decide extinction, recurrence, and
//! quasi-stationarity all share one shape: an integrand on [a, U) whose only
//! trouble spot is the right endpoint, where it behaves like a power
//! C * (U - y)^theta times a slowly varying factor. Classification fits the
//! tail exponent over the last resolvable decades and, when that lands in
//! the logarithmic gray zone around -1, falls back on the behaviour of the
//! dyadic partial integrals: non-shrinking increments mean divergence.

use crate::error::{Error, Result};

// 15-point Kronrod abscissae (positive half) and weights, with the embedded
// 7-point Gauss weights.
#[allow(clippy::excessive_precision)]
const XGK: [f64; 8] = [
    0.991_455_371_120_812_639_206_854_697_526_329,
    0.949_107_912_342_758_524_526_189_684_047_851,
    0.864_864_423_359_769_072_789_712_788_640_926,
    0.741_531_185_599_394_439_863_864_773_280_788,
    0.586_087_235_467_691_130_294_144_838_258_730,
    0.405_845_151_377_397_166_906_606_412_076_961,
    0.207_784_955_007_898_467_600_689_403_773_245,
    0.000_000_000_000_000_000_000_000_000_000_000,
];
#[allow(clippy::excessive_precision)]
const WG: [f64; 4] = [
    0.129_484_966_168_869_693_270_611_432_679_082,
    0.279_705_391_489_276_667_901_467_771_423_780,
    0.381_830_050_505_118_944_950_369_775_488_975,
    0.417_959_183_673_469_387_755_102_040_816_327,
];
#[allow(clippy::excessive_precision)]
const WGK: [f64; 8] = [
    0.022_935_322_010_529_224_963_732_008_058_970,
    0.063_092_092_629_978_553_290_700_663_189_204,
    0.104_790_010_322_250_183_839_876_322_541_518,
    0.140_653_259_715_525_918_745_189_590_510_238,
    0.169_004_726_639_267_902_826_583_426_598_550,
    0.190_350_578_064_785_409_913_256_402_421_014,
    0.204_432_940_075_298_892_414_161_999_234_649,
    0.209_482_141_084_727_828_012_999_174_891_714,
];

/// One G7-K15 panel: returns (kronrod value, error estimate).
pub fn gk15<F: FnMut(f64) -> f64>(f: &mut F, a: f64, b: f64) -> (f64, f64) {
    let half = 0.5 * (b - a);
    let center = 0.5 * (a + b);

    let fc = f(center);
    let mut kronrod = fc * WGK[7];
    let mut gauss = fc * WG[3];
    let mut resabs = fc.abs() * WGK[7];

    let mut fv = [0.0f64; 15];
    fv[7] = fc;
    for j in 0..7 {
        let dx = half * XGK[j];
        let f1 = f(center - dx);
        let f2 = f(center + dx);
        fv[j] = f1;
        fv[14 - j] = f2;
        kronrod += WGK[j] * (f1 + f2);
        resabs += WGK[j] * (f1.abs() + f2.abs());
        if j % 2 == 1 {
            gauss += WG[j / 2] * (f1 + f2);
        }
    }

    let mean = kronrod * 0.5;
    let mut resasc = WGK[7] * (fc - mean).abs();
    for j in 0..7 {
        resasc += WGK[j] * ((fv[j] - mean).abs() + (fv[14 - j] - mean).abs());
    }

    let value = kronrod * half;
    let resabs = resabs * half.abs();
    let resasc = resasc * half.abs();
    let mut err = ((kronrod - gauss) * half).abs();
    if resasc != 0.0 && err != 0.0 {
        err = resasc * 1.0f64.min((200.0 * err / resasc).powf(1.5));
    }
    let floor = 50.0 * f64::EPSILON * resabs;
    if floor > 0.0 {
        err = err.max(floor);
    }
    (value, err)
}

#[derive(Debug, Clone, Copy)]
pub struct QuadOpts {
    pub abs_tol: f64,
    pub rel_tol: f64,
    pub max_depth: u32,
}

impl Default for QuadOpts {
    fn default() -> Self {
        Self {
            abs_tol: 1e-14,
            rel_tol: 1e-10,
            max_depth: 55,
        }
    }
}

/// Adaptive bisection on [a, b] for integrands that are finite there.
/// Non-finite panel results trigger subdivision; if they persist to the
/// depth limit the integral is reported as a failure.
pub fn adaptive<F: FnMut(f64) -> f64>(f: &mut F, a: f64, b: f64, opts: &QuadOpts) -> Result<f64> {
    if a == b {
        return Ok(0.0);
    }
    let (value, err) = adaptive_rec(f, a, b, opts.abs_tol, opts.rel_tol, opts.max_depth)?;
    let _ = err;
    Ok(value)
}

fn adaptive_rec<F: FnMut(f64) -> f64>(
    f: &mut F,
    a: f64,
    b: f64,
    abs_tol: f64,
    rel_tol: f64,
    depth: u32,
) -> Result<(f64, f64)> {
    let (v, e) = gk15(f, a, b);
    let bad = !v.is_finite() || !e.is_finite();
    if !bad && (e <= abs_tol + rel_tol * v.abs()) {
        return Ok((v, e));
    }
    if depth == 0 {
        if bad {
            return Err(Error::QuadratureFailure(format!(
                "non-finite panel [{a}, {b}] at depth limit"
            )));
        }
        return Ok((v, e));
    }
    let mid = 0.5 * (a + b);
    if mid <= a || mid >= b {
        // Interval at floating-point resolution.
        if bad {
            return Err(Error::QuadratureFailure(format!(
                "non-finite panel [{a}, {b}] at fp resolution"
            )));
        }
        return Ok((v, e));
    }
    let (v1, e1) = adaptive_rec(f, a, mid, abs_tol * 0.5, rel_tol, depth - 1)?;
    let (v2, e2) = adaptive_rec(f, mid, b, abs_tol * 0.5, rel_tol, depth - 1)?;
    Ok((v1 + v2, e1 + e2))
}

/// Convergence status of an improper integral toward its right endpoint.
#[derive(Debug, Clone, PartialEq)]
pub enum TailStatus {
    Finite(f64),
    Infinite,
    Indeterminate,
}

impl TailStatus {
    pub fn is_finite(&self) -> bool {
        matches!(self, TailStatus::Finite(_))
    }
}

/// Full report from the endpoint analysis.
#[derive(Debug, Clone)]
pub struct EndpointReport {
    pub status: TailStatus,
    /// Fitted tail exponent of the integrand in (U - y).
    pub exponent: f64,
    /// Integral up to the resolution cut.
    pub partial: f64,
    /// Power-law completion beyond the cut (finite case).
    pub completion: f64,
    /// Sign of the integrand near the endpoint (-1, 0, +1).
    pub tail_sign: f64,
    pub diagnostics: String,
}

#[derive(Debug, Clone, Copy)]
pub struct EndpointOpts {
    /// Dyadic refinement levels toward the endpoint (cut at span * 2^-levels).
    pub levels: u32,
    /// Exact tail exponent when the caller knows it analytically.
    pub known_exponent: Option<f64>,
    /// Relative agreement required between successive cut depths for the
    /// finite verdict.
    pub rel_tol: f64,
}

impl Default for EndpointOpts {
    fn default() -> Self {
        Self {
            levels: 40,
            known_exponent: None,
            rel_tol: 1e-8,
        }
    }
}

/// Width of the exponent band around -1 treated as the logarithmic gray
/// zone rather than a clear power verdict.
pub const EXPONENT_BAND: f64 = 1e-3;

/// Analyses the improper integral of `f` over [a, end). `f` must be
/// evaluable on [a, end - span*2^-levels].
pub fn endpoint_integral<F: FnMut(f64) -> f64>(
    f: &mut F,
    a: f64,
    end: f64,
    opts: &EndpointOpts,
) -> Result<EndpointReport> {
    let span = end - a;
    assert!(span > 0.0, "empty integration range");
    let quad = QuadOpts {
        abs_tol: 0.0,
        rel_tol: 1e-11,
        max_depth: 48,
    };

    // Base piece and dyadic increments toward the endpoint.
    let base = adaptive(f, a, end - span * 0.5, &quad)?;
    let mut increments: Vec<f64> = Vec::new();
    let mut accum = base;
    let mut levels_run = 1u32;
    for m in 1..opts.levels {
        let lo = end - span * 0.5f64.powi(m as i32);
        let hi = end - span * 0.5f64.powi(m as i32 + 1);
        let quad_panel = QuadOpts {
            abs_tol: 1e-13 * (1.0 + accum.abs()),
            rel_tol: 1e-11,
            max_depth: 40,
        };
        let d = match adaptive(f, lo, hi, &quad_panel) {
            Ok(v) if v.is_finite() => v,
            _ => break,
        };
        increments.push(d);
        accum += d;
        levels_run = m + 1;
        // Tail already at numerical zero: no point refining further.
        if increments.len() >= 3
            && increments[increments.len() - 3..]
                .iter()
                .all(|x| x.abs() <= 1e-16 * (1.0 + accum.abs()))
        {
            break;
        }
    }

    // Fit the tail exponent over the last two decades of the resolvable
    // range: ln|f| against ln(end - y).
    let cut_dist = span * 0.5f64.powi(levels_run as i32);
    let fit_lo = cut_dist;
    let fit_hi = (cut_dist * 100.0).min(span * 0.25);
    let mut xs = Vec::new();
    let mut ys = Vec::new();
    let mut sign_sum = 0.0;
    let n_samples = 16;
    for i in 0..n_samples {
        let t = i as f64 / (n_samples - 1) as f64;
        let dist = fit_lo * (fit_hi / fit_lo).powf(t);
        let y = end - dist;
        let v = f(y);
        if v.is_finite() && v != 0.0 {
            sign_sum += v.signum();
            xs.push(dist.ln());
            ys.push(v.abs().ln());
        }
    }
    let tail_sign = if sign_sum as i32 == n_samples {
        1.0
    } else if sign_sum as i32 == -n_samples {
        -1.0
    } else {
        0.0
    };
    let fitted = least_squares_slope(&xs, &ys);

    let exponent = fitted.unwrap_or(f64::NAN);
    let theta = opts.known_exponent.or(fitted);

    let mut diagnostics = format!(
        "levels={levels_run} cut={cut_dist:.3e} fitted_exponent={exponent:.6} tail_sign={tail_sign}"
    );

    // Mixed signs arbitrarily close to the endpoint: no power model applies.
    if tail_sign == 0.0 && xs.len() >= 4 {
        diagnostics.push_str(" mixed-sign-tail");
    }

    let make_finite = |theta_used: f64, diag: &mut String| -> TailStatus {
        // Completion assumes f ~ C (end-y)^theta past the cut; estimate C at
        // several depths and require stability between cuts.
        let c_at = |dist: f64, fv: f64| fv * dist.powf(-theta_used);
        let sample = |d: f64| {
            let v = f(end - d);
            if v.is_finite() {
                Some(c_at(d, v))
            } else {
                None
            }
        };
        let c_near = sample(cut_dist * 1.5)
            .or_else(|| sample(cut_dist * 2.0))
            .unwrap_or(0.0);
        let completion = if theta_used > -1.0 {
            c_near * cut_dist.powf(theta_used + 1.0) / (theta_used + 1.0)
        } else {
            0.0
        };
        // Compare against the value at a cut two levels shallower.
        let shallower: f64 = base + increments[..increments.len().saturating_sub(2)]
            .iter()
            .sum::<f64>();
        let cut_sh = span * 0.5f64.powi(levels_run as i32 - 2);
        let c_sh = sample(cut_sh * 1.5).unwrap_or(c_near);
        let completion_sh = if theta_used > -1.0 {
            c_sh * cut_sh.powf(theta_used + 1.0) / (theta_used + 1.0)
        } else {
            0.0
        };
        let v_deep = accum + completion;
        let v_shallow = shallower + completion_sh;
        let agree = (v_deep - v_shallow).abs() <= opts.rel_tol * v_deep.abs().max(1e-300) + 1e-14;
        diag.push_str(&format!(
            " completion={completion:.3e} depth_agreement={:.3e}",
            (v_deep - v_shallow).abs()
        ));
        if agree {
            TailStatus::Finite(v_deep)
        } else {
            TailStatus::Indeterminate
        }
    };

    let status = match theta {
        Some(th) if th <= -1.0 - EXPONENT_BAND => TailStatus::Infinite,
        Some(th) if th >= -1.0 + EXPONENT_BAND => make_finite(th, &mut diagnostics),
        _ => {
            // Gray zone around the logarithmic boundary (or no usable fit):
            // decide from the dyadic increments. A (U-y)^-1 tail keeps each
            // dyadic shell contributing the same mass.
            let k = increments.len();
            if k >= 5 {
                let recent = &increments[k - 4..];
                let one_signed = recent.iter().all(|d| *d > 0.0) || recent.iter().all(|d| *d < 0.0);
                let mut ratios_ok = one_signed;
                for w in recent.windows(2) {
                    let r = (w[1] / w[0]).abs();
                    if !(r >= 0.985) {
                        ratios_ok = false;
                    }
                }
                if ratios_ok {
                    diagnostics.push_str(" non-shrinking-increments");
                    TailStatus::Infinite
                } else {
                    TailStatus::Indeterminate
                }
            } else {
                TailStatus::Indeterminate
            }
        }
    };

    let completion = match &status {
        TailStatus::Finite(v) => v - accum,
        _ => 0.0,
    };
    Ok(EndpointReport {
        status,
        exponent,
        partial: accum,
        completion,
        tail_sign,
        diagnostics,
    })
}

fn least_squares_slope(xs: &[f64], ys: &[f64]) -> Option<f64> {
    if xs.len() < 6 {
        return None;
    }
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let mut sxx = 0.0;
    let mut sxy = 0.0;
    for (x, y) in xs.iter().zip(ys) {
        sxx += (x - mx) * (x - mx);
        sxy += (x - mx) * (y - my);
    }
    if sxx == 0.0 {
        return None;
    }
    Some(sxy / sxx)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gk15_polynomial_exact() {
        // Degree-7 polynomial is integrated exactly by the embedded Gauss rule.
        let mut f = |x: f64| 3.0 * x.powi(7) - x.powi(3) + 2.0;
        let (v, e) = gk15(&mut f, -1.0, 2.0);
        // antiderivative: 3x^8/8 - x^4/4 + 2x
        let exact = |x: f64| 3.0 * x.powi(8) / 8.0 - x.powi(4) / 4.0 + 2.0 * x;
        assert!((v - (exact(2.0) - exact(-1.0))).abs() < 1e-11);
        assert!(e < 1e-9);
    }

    #[test]
    fn adaptive_handles_peaked_integrand() {
        // Integral of 1/(1e-4 + x^2) on [-1, 1] = 2 atan(1e2) / 1e-2.
        let mut f = |x: f64| 1.0 / (1e-4 + x * x);
        let v = adaptive(&mut f, -1.0, 1.0, &QuadOpts::default()).unwrap();
        let exact = 2.0 * (1.0f64 / 1e-2).atan() / 1e-2;
        assert!((v - exact).abs() < 1e-7 * exact);
    }

    #[test]
    fn classifies_logarithmic_divergence() {
        // 1/(2(1-y)): exponent -1 exactly, diverges logarithmically.
        let mut f = |y: f64| 0.5 / (1.0 - y);
        let rep = endpoint_integral(&mut f, 0.0, 1.0, &EndpointOpts::default()).unwrap();
        assert_eq!(rep.status, TailStatus::Infinite, "{}", rep.diagnostics);
        assert!((rep.exponent + 1.0).abs() < 1e-4);
    }

    #[test]
    fn classifies_power_divergence() {
        // (1-y)^{-1.5}
        let mut f = |y: f64| (1.0 - y).powf(-1.5);
        let rep = endpoint_integral(&mut f, 0.0, 1.0, &EndpointOpts::default()).unwrap();
        assert_eq!(rep.status, TailStatus::Infinite);
        assert!((rep.exponent + 1.5).abs() < 1e-3);
    }

    #[test]
    fn integrates_vanishing_tail() {
        // (1-y): integral 1/2, exponent +1.
        let mut f = |y: f64| 1.0 - y;
        let rep = endpoint_integral(&mut f, 0.0, 1.0, &EndpointOpts::default()).unwrap();
        match rep.status {
            TailStatus::Finite(v) => assert!((v - 0.5).abs() < 1e-10, "v = {v}"),
            other => panic!("expected finite, got {other:?} ({})", rep.diagnostics),
        }
        assert!((rep.exponent - 1.0).abs() < 1e-3);
    }

    #[test]
    fn integrates_integrable_singularity() {
        // (1-y)^{-1/2}: integral 2, removable by completion.
        let mut f = |y: f64| (1.0 - y).powf(-0.5);
        let rep = endpoint_integral(
            &mut f,
            0.0,
            1.0,
            &EndpointOpts {
                known_exponent: Some(-0.5),
                ..EndpointOpts::default()
            },
        )
        .unwrap();
        match rep.status {
            TailStatus::Finite(v) => assert!((v - 2.0).abs() < 1e-8, "v = {v}"),
            other => panic!("expected finite, got {other:?} ({})", rep.diagnostics),
        }
    }

    #[test]
    fn near_boundary_exponent_without_fit_is_honest() {
        // (1-y)^{-0.9995} lies inside the gray band; increments grow slowly
        // (ratio ~ 2^0.0005), so divergence is still detected.
        let mut f = |y: f64| (1.0 - y).powf(-0.9995);
        let rep = endpoint_integral(&mut f, 0.0, 1.0, &EndpointOpts::default()).unwrap();
        assert!(
            matches!(rep.status, TailStatus::Infinite | TailStatus::Indeterminate),
            "boundary case must not claim finiteness: {:?}",
            rep.status
        );
    }
}
