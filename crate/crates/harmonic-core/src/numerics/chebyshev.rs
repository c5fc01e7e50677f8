//! Chebyshev–Lobatto interpolation with barycentric evaluation; the
//! representation grid behind the constant-field recurrence.

/// Interpolant on `[lo, hi]` through Chebyshev–Lobatto points.
#[derive(Debug, Clone)]
pub struct ChebyshevInterpolant {
    lo: f64,
    hi: f64,
    nodes: Vec<f64>,
    values: Vec<f64>,
}

/// Chebyshev–Lobatto nodes of degree `deg` (deg+1 points) on `[lo, hi]`,
/// ordered from `hi` down to `lo`.
pub fn lobatto_nodes(deg: usize, lo: f64, hi: f64) -> Vec<f64> {
    (0..=deg)
        .map(|k| {
            let x = (std::f64::consts::PI * k as f64 / deg as f64).cos();
            lo + (hi - lo) * (x + 1.0) / 2.0
        })
        .collect()
}

impl ChebyshevInterpolant {
    /// Build from values sampled at [`lobatto_nodes`] of the same degree.
    pub fn new(lo: f64, hi: f64, values: Vec<f64>) -> Self {
        assert!(values.len() >= 2, "need at least two interpolation nodes");
        let deg = values.len() - 1;
        ChebyshevInterpolant {
            lo,
            hi,
            nodes: lobatto_nodes(deg, lo, hi),
            values,
        }
    }

    pub fn eval(&self, x: f64) -> f64 {
        // barycentric weights for Lobatto points: (-1)^k, halved at the ends
        let n = self.nodes.len();
        let mut num = 0.0;
        let mut den = 0.0;
        for k in 0..n {
            let d = x - self.nodes[k];
            if d == 0.0 {
                return self.values[k];
            }
            let mut w = if k % 2 == 0 { 1.0 } else { -1.0 };
            if k == 0 || k == n - 1 {
                w *= 0.5;
            }
            let t = w / d;
            num += t * self.values[k];
            den += t;
        }
        num / den
    }

    pub fn domain(&self) -> (f64, f64) {
        (self.lo, self.hi)
    }
}
