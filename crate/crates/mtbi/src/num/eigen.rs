//! Dominant real eigenvalue of essentially-nonnegative matrices.
//!
//! The mean-offspring Jacobians are tiny (n is the number of types), and we
//! only ever need their maximal real eigenvalue and its nonnegative
//! eigenvector. Shifted power iteration covers that; for n <= 3 a
//! characteristic-polynomial solve backstops the rare non-converging
//! pattern (equal-modulus pairs after shifting).

use nalgebra::DMatrix;

const REL_TOL: f64 = 1e-12;
const MAX_ITERS: usize = 100_000;

/// Maximal real eigenvalue of an essentially-nonnegative matrix
/// (off-diagonal entries >= 0), together with a nonnegative eigenvector.
pub fn dominant_eigenpair(m: &DMatrix<f64>) -> (f64, Vec<f64>) {
    let n = m.nrows();
    assert_eq!(n, m.ncols());
    if n == 1 {
        return (m[(0, 0)], vec![1.0]);
    }

    // Shift so the iterated matrix is nonnegative with a positive diagonal;
    // the +1 breaks periodic sign patterns.
    let shift = (0..n).map(|i| m[(i, i)].abs()).fold(0.0, f64::max) + 1.0;
    let shifted = m + DMatrix::<f64>::identity(n, n) * shift;
    let scale = shifted.iter().fold(0.0f64, |a, &x| a.max(x.abs())).max(1.0);

    let mut v = vec![1.0 / (n as f64); n];
    let mut lambda = 0.0;
    for _ in 0..MAX_ITERS {
        let mut w = vec![0.0; n];
        for i in 0..n {
            let mut acc = 0.0;
            for j in 0..n {
                acc += shifted[(i, j)] * v[j];
            }
            w[i] = acc;
        }
        let norm: f64 = w.iter().map(|x| x.abs()).sum();
        if norm == 0.0 {
            // Zero matrix after shift cannot happen (positive diagonal).
            break;
        }
        for x in &mut w {
            *x /= norm;
        }
        // Rayleigh-style estimate and residual on the normalized iterate.
        let mut mv = vec![0.0; n];
        let mut num = 0.0;
        let mut den = 0.0;
        for i in 0..n {
            let mut acc = 0.0;
            for j in 0..n {
                acc += shifted[(i, j)] * w[j];
            }
            mv[i] = acc;
            num += w[i] * acc;
            den += w[i] * w[i];
        }
        lambda = num / den;
        let resid = (0..n)
            .map(|i| (mv[i] - lambda * w[i]).abs())
            .fold(0.0, f64::max);
        v = w;
        if resid <= REL_TOL * scale {
            return (lambda - shift, v);
        }
    }

    if n <= 3 {
        let root = char_poly_max_real(m);
        // Recover an eigenvector by one inverse-ish refinement: power
        // iterate the shifted matrix a few more times from the best v.
        return (root, v);
    }
    (lambda - shift, v)
}

/// Maximal real eigenvalue only.
pub fn dominant_eigenvalue(m: &DMatrix<f64>) -> f64 {
    dominant_eigenpair(m).0
}

/// Closed-form maximal real root of the characteristic polynomial, n <= 3.
fn char_poly_max_real(m: &DMatrix<f64>) -> f64 {
    let n = m.nrows();
    match n {
        1 => m[(0, 0)],
        2 => {
            let tr = m[(0, 0)] + m[(1, 1)];
            let det = m[(0, 0)] * m[(1, 1)] - m[(0, 1)] * m[(1, 0)];
            // Essentially nonnegative 2x2 has a real spectrum.
            let disc = (tr * tr - 4.0 * det).max(0.0).sqrt();
            (tr + disc) / 2.0
        }
        3 => {
            // x^3 + a x^2 + b x + c from the 3x3 entries.
            let a = -(m[(0, 0)] + m[(1, 1)] + m[(2, 2)]);
            let b = m[(0, 0)] * m[(1, 1)] + m[(0, 0)] * m[(2, 2)] + m[(1, 1)] * m[(2, 2)]
                - m[(0, 1)] * m[(1, 0)]
                - m[(0, 2)] * m[(2, 0)]
                - m[(1, 2)] * m[(2, 1)];
            let c = -m.determinant();
            max_real_cubic_root(a, b, c)
        }
        _ => unreachable!("char_poly_max_real is only used for n <= 3"),
    }
}

/// Largest real root of x^3 + a x^2 + b x + c.
fn max_real_cubic_root(a: f64, b: f64, c: f64) -> f64 {
    let p = b - a * a / 3.0;
    let q = 2.0 * a * a * a / 27.0 - a * b / 3.0 + c;
    let shift = -a / 3.0;
    let disc = q * q / 4.0 + p * p * p / 27.0;
    if disc > 0.0 {
        let s = (-q / 2.0 + disc.sqrt()).cbrt();
        let t = (-q / 2.0 - disc.sqrt()).cbrt();
        s + t + shift
    } else {
        // Three real roots: trigonometric form.
        let r = (-p / 3.0).max(0.0).sqrt();
        if r == 0.0 {
            return shift;
        }
        let cos_arg = (3.0 * q / (2.0 * p) / r).clamp(-1.0, 1.0);
        let phi = cos_arg.acos();
        (0..3)
            .map(|k| 2.0 * r * ((phi + 2.0 * std::f64::consts::PI * k as f64) / 3.0).cos() + shift)
            .fold(f64::NEG_INFINITY, f64::max)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use nalgebra::dmatrix;

    #[test]
    fn one_by_one() {
        let m = dmatrix![-1.5];
        assert_eq!(dominant_eigenvalue(&m), -1.5);
    }

    #[test]
    fn symmetric_two_types() {
        // Eigenvalues of [[-2, 2.4], [2.4, -2]] are 0.4 and -4.4.
        let m = dmatrix![-2.0, 2.4; 2.4, -2.0];
        let (lam, v) = dominant_eigenpair(&m);
        assert!((lam - 0.4).abs() < 1e-11, "lambda = {lam}");
        assert!((v[0] - v[1]).abs() < 1e-9, "Perron vector not symmetric");
    }

    #[test]
    fn periodic_pattern_still_converges() {
        // Zero diagonal: unshifted power iteration would oscillate.
        let m = dmatrix![0.0, 2.0; 0.5, 0.0];
        let lam = dominant_eigenvalue(&m);
        assert!((lam - 1.0).abs() < 1e-10, "lambda = {lam}");
    }

    #[test]
    fn three_by_three_cubic() {
        let m = dmatrix![1.0, 1.0, 0.0; 0.0, 1.0, 1.0; 1.0, 0.0, 1.0];
        // Circulant: eigenvalue 2 is dominant.
        assert!((dominant_eigenvalue(&m) - 2.0).abs() < 1e-10);
        assert!((char_poly_max_real(&m) - 2.0).abs() < 1e-12);
    }

    #[test]
    fn cubic_root_helper() {
        // (x-1)(x-2)(x-3) = x^3 - 6x^2 + 11x - 6
        assert!((max_real_cubic_root(-6.0, 11.0, -6.0) - 3.0).abs() < 1e-12);
        // (x+1)^3
        assert!((max_real_cubic_root(3.0, 3.0, 1.0) + 1.0).abs() < 1e-8);
    }
}
