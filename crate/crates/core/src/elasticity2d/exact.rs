//! Infinite plate with a circular hole under remote uniaxial tension `T`
//! along x (Kirsch solution), plane strain.

use super::Material;
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PlateWithHole {
    pub tension: f64,
    pub radius: f64,
}

/// Polar stress components.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PolarStress {
    pub rr: f64,
    pub tt: f64,
    pub rt: f64,
}

/// In-plane Cartesian stresses `(σ_xx, σ_yy, σ_xy)`.
pub type CartesianStress = [f64; 3];

impl PlateWithHole {
    pub fn polar_stress(&self, r: f64, theta: f64) -> Result<PolarStress> {
        if r < self.radius * (1.0 - 1e-12) {
            return Err(Error::InvalidInput(format!("r = {r} lies inside the hole")));
        }
        let t = self.tension;
        let a2 = (self.radius / r).powi(2);
        let a4 = a2 * a2;
        let (s2, c2) = (2.0 * theta).sin_cos();
        Ok(PolarStress {
            rr: 0.5 * t * (1.0 - a2) + 0.5 * t * (1.0 - 4.0 * a2 + 3.0 * a4) * c2,
            tt: 0.5 * t * (1.0 + a2) - 0.5 * t * (1.0 + 3.0 * a4) * c2,
            rt: -0.5 * t * (1.0 + 2.0 * a2 - 3.0 * a4) * s2,
        })
    }

    pub fn stress(&self, x: [f64; 2]) -> Result<CartesianStress> {
        let r = x[0].hypot(x[1]);
        let theta = x[1].atan2(x[0]);
        let p = self.polar_stress(r, theta)?;
        let (s, c) = theta.sin_cos();
        Ok([
            p.rr * c * c + p.tt * s * s - 2.0 * p.rt * s * c,
            p.rr * s * s + p.tt * c * c + 2.0 * p.rt * s * c,
            (p.rr - p.tt) * s * c + p.rt * (c * c - s * s),
        ])
    }

    /// Traction `σ·n` at a boundary point with outward normal `n`.
    pub fn traction(&self, x: [f64; 2], n: [f64; 2]) -> Result<[f64; 2]> {
        let s = self.stress(x)?;
        Ok([s[0] * n[0] + s[2] * n[1], s[2] * n[0] + s[1] * n[1]])
    }

    /// Plane-strain displacement with `κ = 3 − 4ν`, fixed so that the
    /// symmetry lines carry no normal displacement.
    pub fn displacement(&self, material: &Material, x: [f64; 2]) -> Result<[f64; 2]> {
        let r = x[0].hypot(x[1]);
        if r < self.radius * (1.0 - 1e-12) {
            return Err(Error::InvalidInput(format!("r = {r} lies inside the hole")));
        }
        let theta = x[1].atan2(x[0]);
        let mu = material.mu();
        let kappa = 3.0 - 4.0 * material.poisson;
        let a = self.radius;
        let f = self.tension * a / (8.0 * mu);
        let (ra, ar, ar3) = (r / a, a / r, (a / r).powi(3));
        let (c1, c3) = (theta.cos(), (3.0 * theta).cos());
        let (s1, s3) = (theta.sin(), (3.0 * theta).sin());
        Ok([
            f * (ra * (kappa + 1.0) * c1 + 2.0 * ar * ((1.0 + kappa) * c1 + c3) - 2.0 * ar3 * c3),
            f * (ra * (kappa - 3.0) * s1 + 2.0 * ar * ((1.0 - kappa) * s1 + s3) - 2.0 * ar3 * s3),
        ])
    }
}
