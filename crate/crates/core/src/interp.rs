//! Shape-preserving cubic interpolation (Fritsch-Carlson slopes).
//!
//! On intervals where the data is monotone the interpolant is monotone and
//! stays inside the data range, which is exactly what shifted profile
//! evaluation needs.

/// Monotone piecewise-cubic Hermite interpolant on a strictly increasing
/// abscissa. Queries outside the abscissa clamp to the end values.
#[derive(Debug, Clone)]
pub struct Pchip {
    x: Vec<f64>,
    y: Vec<f64>,
    d: Vec<f64>,
}

impl Pchip {
    pub fn new(x: Vec<f64>, y: Vec<f64>) -> Self {
        assert_eq!(x.len(), y.len());
        assert!(x.len() >= 2, "interpolation needs at least 2 nodes");
        debug_assert!(x.windows(2).all(|w| w[0] < w[1]), "abscissa must increase");
        let n = x.len();
        let h: Vec<f64> = (0..n - 1).map(|k| x[k + 1] - x[k]).collect();
        let sec: Vec<f64> = (0..n - 1).map(|k| (y[k + 1] - y[k]) / h[k]).collect();

        let mut d = vec![0.0; n];
        if n == 2 {
            d[0] = sec[0];
            d[1] = sec[0];
        } else {
            for k in 1..n - 1 {
                if sec[k - 1] * sec[k] <= 0.0 {
                    d[k] = 0.0;
                } else {
                    let w1 = 2.0 * h[k] + h[k - 1];
                    let w2 = h[k] + 2.0 * h[k - 1];
                    d[k] = (w1 + w2) / (w1 / sec[k - 1] + w2 / sec[k]);
                }
            }
            d[0] = end_slope(h[0], h[1], sec[0], sec[1]);
            d[n - 1] = end_slope(h[n - 2], h[n - 3], sec[n - 2], sec[n - 3]);
        }
        Self { x, y, d }
    }

    /// Evaluate at `xq`, clamping to the end values outside the abscissa.
    pub fn eval(&self, xq: f64) -> f64 {
        let n = self.x.len();
        if xq <= self.x[0] {
            return self.y[0];
        }
        if xq >= self.x[n - 1] {
            return self.y[n - 1];
        }
        let k = match self.x.partition_point(|&xi| xi <= xq) {
            0 => 0,
            idx => idx - 1,
        };
        let h = self.x[k + 1] - self.x[k];
        let t = (xq - self.x[k]) / h;
        let t2 = t * t;
        let t3 = t2 * t;
        let h00 = 2.0 * t3 - 3.0 * t2 + 1.0;
        let h10 = t3 - 2.0 * t2 + t;
        let h01 = -2.0 * t3 + 3.0 * t2;
        let h11 = t3 - t2;
        h00 * self.y[k] + h10 * h * self.d[k] + h01 * self.y[k + 1] + h11 * h * self.d[k + 1]
    }
}

// Three-point end slope with the usual shape-preserving clamps.
fn end_slope(h0: f64, h1: f64, s0: f64, s1: f64) -> f64 {
    let mut d = ((2.0 * h0 + h1) * s0 - h0 * s1) / (h0 + h1);
    if d * s0 <= 0.0 {
        d = 0.0;
    } else if s0 * s1 < 0.0 && d.abs() > 3.0 * s0.abs() {
        d = 3.0 * s0;
    }
    d
}
