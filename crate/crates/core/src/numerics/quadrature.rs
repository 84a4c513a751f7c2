//! Gauss–Legendre rules on the unit interval.

use super::NumericsError;

/// Largest supported number of Gauss points per direction.
pub const MAX_GAUSS_POINTS: usize = 16;

/// A quadrature rule on `[0, 1]`. Weights sum to one.
#[derive(Debug, Clone, PartialEq)]
pub struct QuadratureRule {
    pub points: Vec<f64>,
    pub weights: Vec<f64>,
}

impl QuadratureRule {
    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    /// Iterate over `(point, weight)` pairs.
    pub fn iter(&self) -> impl Iterator<Item = (f64, f64)> + '_ {
        self.points.iter().copied().zip(self.weights.iter().copied())
    }

    /// Integrate `f` over `[0, 1]`.
    pub fn integrate(&self, f: impl Fn(f64) -> f64) -> f64 {
        self.iter().map(|(x, w)| w * f(x)).sum()
    }

    /// Tensor-product points and weights on `[0, 1]²`, η varying fastest.
    pub fn tensor(&self, other: &QuadratureRule) -> Vec<([f64; 2], f64)> {
        let mut out = Vec::with_capacity(self.len() * other.len());
        for (x, wx) in self.iter() {
            for (y, wy) in other.iter() {
                out.push(([x, y], wx * wy));
            }
        }
        out
    }
}

/// Gauss–Legendre rule with `n` points mapped to `[0, 1]`.
///
/// Nodes are found by Newton iteration on the Legendre polynomial `P_n`
/// starting from the Chebyshev-like guess `cos(π(i + 3/4)/(n + 1/2))`.
pub fn gauss_rule(n: usize) -> Result<QuadratureRule, NumericsError> {
    if n == 0 || n > MAX_GAUSS_POINTS {
        return Err(NumericsError::QuadratureOrder {
            requested: n,
            max: MAX_GAUSS_POINTS,
        });
    }
    let mut points = vec![0.0; n];
    let mut weights = vec![0.0; n];
    let m = n.div_ceil(2);
    for i in 0..m {
        let mut z = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (p, d) = legendre(n, z);
            dp = d;
            let dz = p / d;
            z -= dz;
            if dz.abs() < 1e-16 {
                break;
            }
        }
        let (_, d) = legendre(n, z);
        if d != 0.0 {
            dp = d;
        }
        let w = 2.0 / ((1.0 - z * z) * dp * dp);
        // map [-1,1] -> [0,1]
        points[i] = 0.5 * (1.0 - z);
        points[n - 1 - i] = 0.5 * (1.0 + z);
        weights[i] = 0.5 * w;
        weights[n - 1 - i] = 0.5 * w;
    }
    Ok(QuadratureRule { points, weights })
}

/// Value and derivative of the Legendre polynomial `P_n` at `x`.
fn legendre(n: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    if n == 0 {
        return (1.0, 0.0);
    }
    for k in 2..=n {
        let kf = k as f64;
        let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
        p0 = p1;
        p1 = p2;
    }
    let d = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, d)
}
