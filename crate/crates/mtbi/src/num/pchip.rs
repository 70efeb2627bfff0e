//! Fritsch-Carlson monotone cubic interpolation.
//!
//! Used to evaluate curve samples between accepted ODE steps without
//! re-solving the ODE inside quadrature. Monotone data yields a monotone
//! interpolant, which the increasing-curve invariants rely on.

/// Piecewise cubic Hermite interpolant with shape-preserving slopes.
#[derive(Debug, Clone)]
pub struct Pchip {
    x: Vec<f64>,
    y: Vec<f64>,
    d: Vec<f64>,
}

impl Pchip {
    /// Builds the interpolant. `x` must be strictly increasing with at
    /// least two points.
    pub fn new(x: Vec<f64>, y: Vec<f64>) -> Self {
        assert_eq!(x.len(), y.len());
        assert!(x.len() >= 2, "need at least two samples");
        debug_assert!(x.windows(2).all(|w| w[0] < w[1]));

        let n = x.len();
        let h: Vec<f64> = x.windows(2).map(|w| w[1] - w[0]).collect();
        let delta: Vec<f64> = (0..n - 1).map(|i| (y[i + 1] - y[i]) / h[i]).collect();

        let mut d = vec![0.0; n];
        for i in 1..n - 1 {
            if delta[i - 1] * delta[i] <= 0.0 {
                d[i] = 0.0;
            } else {
                let w1 = 2.0 * h[i] + h[i - 1];
                let w2 = h[i] + 2.0 * h[i - 1];
                d[i] = (w1 + w2) / (w1 / delta[i - 1] + w2 / delta[i]);
            }
        }
        d[0] = edge_slope(h[0], h.get(1).copied(), delta[0], delta.get(1).copied());
        let (h_prev, delta_prev) = if n >= 3 {
            (Some(h[n - 3]), Some(delta[n - 3]))
        } else {
            (None, None)
        };
        d[n - 1] = edge_slope(h[n - 2], h_prev, delta[n - 2], delta_prev);

        Self { x, y, d }
    }

    /// Evaluates the interpolant; clamps outside the sample range.
    pub fn eval(&self, xq: f64) -> f64 {
        let n = self.x.len();
        if xq <= self.x[0] {
            return self.y[0];
        }
        if xq >= self.x[n - 1] {
            return self.y[n - 1];
        }
        let i = match self.x.partition_point(|&v| v <= xq) {
            0 => 0,
            p => p - 1,
        };
        let h = self.x[i + 1] - self.x[i];
        let t = (xq - self.x[i]) / h;
        let (t2, t3) = (t * t, t * t * t);
        let h00 = 2.0 * t3 - 3.0 * t2 + 1.0;
        let h10 = t3 - 2.0 * t2 + t;
        let h01 = -2.0 * t3 + 3.0 * t2;
        let h11 = t3 - t2;
        h00 * self.y[i] + h10 * h * self.d[i] + h01 * self.y[i + 1] + h11 * h * self.d[i + 1]
    }

    pub fn x_last(&self) -> f64 {
        *self.x.last().unwrap()
    }

    pub fn y_last(&self) -> f64 {
        *self.y.last().unwrap()
    }
}

// Three-point one-sided slope, clamped per Fritsch-Carlson so the edge
// segment stays monotone.
fn edge_slope(h0: f64, h1: Option<f64>, d0: f64, d1: Option<f64>) -> f64 {
    let (h1, d1) = match (h1, d1) {
        (Some(h), Some(d)) => (h, d),
        _ => return d0,
    };
    let s = ((2.0 * h0 + h1) * d0 - h0 * d1) / (h0 + h1);
    if s * d0 <= 0.0 {
        0.0
    } else if d0 * d1 <= 0.0 && s.abs() > 3.0 * d0.abs() {
        3.0 * d0
    } else {
        s
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn reproduces_linear_data_exactly() {
        let x: Vec<f64> = (0..20).map(|i| i as f64 / 19.0).collect();
        let y: Vec<f64> = x.iter().map(|v| 3.0 * v - 1.0).collect();
        let p = Pchip::new(x, y);
        for q in [0.013, 0.5, 0.777, 0.999] {
            assert!((p.eval(q) - (3.0 * q - 1.0)).abs() < 1e-14);
        }
    }

    #[test]
    fn monotone_data_stays_monotone() {
        let x = vec![0.0, 0.1, 0.3, 0.35, 0.8, 1.0];
        let y = vec![0.0, 0.5, 0.51, 0.52, 0.9, 1.0];
        let p = Pchip::new(x, y);
        let mut prev = f64::NEG_INFINITY;
        for i in 0..=1000 {
            let v = p.eval(i as f64 / 1000.0);
            assert!(v >= prev - 1e-12, "not monotone at {i}");
            prev = v;
        }
    }

    #[test]
    fn smooth_accuracy() {
        // Fine samples of exp on [0,1]: interpolation error is O(h^3)-ish
        // for PCHIP; with h = 1/400 that is well under 1e-7.
        let n = 401;
        let x: Vec<f64> = (0..n).map(|i| i as f64 / (n - 1) as f64).collect();
        let y: Vec<f64> = x.iter().map(|v| v.exp()).collect();
        let p = Pchip::new(x, y);
        for q in [0.0123, 0.34567, 0.87654] {
            assert!((p.eval(q) - q.exp()).abs() < 1e-7);
        }
    }
}
