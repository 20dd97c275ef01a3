//! Annuli, sphere measures, stereographic projection and the one-parameter
//! conformal dilation family of the unit sphere.
//!
//! A point of S^{n-1} is written in zonal form ξ = (cos θ, s sin θ) with
//! meridian θ ∈ [0, π] and longitude s ∈ S^{n-2}. θ = 0 is the north pole,
//! θ = π the south pole. Stereographic projection goes through the south
//! pole, so the north pole lands on the origin and the south pole at ∞.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::special::gamma;

/// Largest supported dimension. Energy constants grow like (n-1)^{(n-1)/2}.
pub const MAX_DIMENSION: usize = 30;

/// Width of the band around θ ∈ {0, π} inside which pole limits are used.
pub const POLE_GUARD: f64 = 1e-8;

/// The spherical shell {x ∈ R^n : inner < |x| < outer}.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Annulus {
    n: usize,
    inner: f64,
    outer: f64,
}

impl Annulus {
    pub fn new(n: usize, inner: f64, outer: f64) -> Result<Self> {
        if n < 3 {
            return Err(Error::invalid("n", format!("dimension must be >= 3, got {n}")));
        }
        if n > MAX_DIMENSION {
            return Err(Error::invalid(
                "n",
                format!("dimension must be <= {MAX_DIMENSION}, got {n}"),
            ));
        }
        if !(inner.is_finite() && inner > 0.0) {
            return Err(Error::invalid(
                "inner",
                format!("radius must be positive and finite, got {inner}"),
            ));
        }
        if !(outer.is_finite() && inner < outer) {
            return Err(Error::invalid(
                "outer",
                format!("need inner < outer, got inner = {inner}, outer = {outer}"),
            ));
        }
        Ok(Self { n, inner, outer })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn inner(&self) -> f64 {
        self.inner
    }

    pub fn outer(&self) -> f64 {
        self.outer
    }

    pub fn width(&self) -> f64 {
        self.outer - self.inner
    }

    /// log(outer / inner).
    pub fn log_ratio(&self) -> f64 {
        (self.outer / self.inner).ln()
    }

    pub fn contains_radius(&self, t: f64) -> bool {
        (self.inner..=self.outer).contains(&t)
    }
}

/// ω_{n-1}: the (n-1)-dimensional measure of the unit sphere in R^n.
pub fn unit_sphere_measure(n: usize) -> Result<f64> {
    if n < 2 {
        return Err(Error::invalid("n", format!("sphere measure needs n >= 2, got {n}")));
    }
    let half = n as f64 / 2.0;
    Ok(2.0 * PI.powf(half) / gamma(half))
}

/// ω_{n-2} / ω_{n-1} = Γ(n/2) / (√π Γ((n-1)/2)).
pub fn zonal_measure_ratio(n: usize) -> Result<f64> {
    if n < 3 {
        return Err(Error::invalid("n", format!("zonal ratio needs n >= 3, got {n}")));
    }
    let n = n as f64;
    Ok(gamma(n / 2.0) / (PI.sqrt() * gamma((n - 1.0) / 2.0)))
}

fn check_lambda(lambda: f64) {
    debug_assert!(lambda.is_finite() && lambda > 0.0, "lambda must be positive");
}

/// φ(θ) = 2 arctan(λ tan(θ/2)), the meridian angle of Φ^λ(ξ).
pub fn meridian_dilation(theta: f64, lambda: f64) -> f64 {
    check_lambda(lambda);
    debug_assert!((0.0..=PI).contains(&theta), "theta out of [0, π]");
    if theta >= PI {
        return PI;
    }
    if theta <= PI / 2.0 {
        2.0 * (lambda * (theta / 2.0).tan()).atan()
    } else {
        // Measured from the south pole so that tan does not blow up.
        PI - 2.0 * (((PI - theta) / 2.0).tan() / lambda).atan()
    }
}

/// ‖DΦ^λ(ξ)‖² = (n-1) sin²φ(θ) / sin²θ, with the pole limits
/// (n-1)λ² at θ = 0 and (n-1)/λ² at θ = π.
pub fn conformal_gradient_norm_sq(theta: f64, lambda: f64, n: usize) -> f64 {
    check_lambda(lambda);
    let m = (n - 1) as f64;
    if theta < POLE_GUARD {
        return m * lambda * lambda;
    }
    if PI - theta < POLE_GUARD {
        return m / (lambda * lambda);
    }
    // sin φ / sin θ = λ(1 + y²)/(1 + λ²y²) with y = tan(θ/2).
    let ratio = if theta <= PI / 2.0 {
        let y = (theta / 2.0).tan();
        let y2 = y * y;
        lambda * (1.0 + y2) / (1.0 + lambda * lambda * y2)
    } else {
        let z = ((PI - theta) / 2.0).tan();
        let z2 = z * z;
        lambda * (z2 + 1.0) / (z2 + lambda * lambda)
    };
    m * ratio * ratio
}

/// A point (cos θ, s sin θ) of S^{n-1}.
#[derive(Debug, Clone, PartialEq)]
pub struct ZonalPoint {
    theta: f64,
    longitude: Vec<f64>,
}

impl ZonalPoint {
    pub fn new(theta: f64, longitude: Vec<f64>) -> Result<Self> {
        if !(0.0..=PI).contains(&theta) {
            return Err(Error::invalid("theta", format!("{theta} is outside [0, π]")));
        }
        if longitude.is_empty() {
            return Err(Error::invalid("longitude", "must have at least one component"));
        }
        let norm = norm(&longitude);
        if (norm - 1.0).abs() > 1e-12 {
            return Err(Error::invalid(
                "longitude",
                format!("must be a unit vector, has norm {norm}"),
            ));
        }
        Ok(Self { theta, longitude })
    }

    pub fn theta(&self) -> f64 {
        self.theta
    }

    pub fn longitude(&self) -> &[f64] {
        &self.longitude
    }

    /// Dimension n of the ambient space.
    pub fn dimension(&self) -> usize {
        self.longitude.len() + 1
    }

    pub fn to_cartesian(&self) -> Vec<f64> {
        let (s, c) = self.theta.sin_cos();
        let mut x = Vec::with_capacity(self.dimension());
        x.push(c);
        x.extend(self.longitude.iter().map(|v| v * s));
        x
    }

    /// Inverse of [`to_cartesian`](Self::to_cartesian). At the poles the
    /// longitude is undetermined and e₁ is chosen.
    pub fn from_cartesian(x: &[f64]) -> Result<Self> {
        if x.len() < 2 {
            return Err(Error::invalid("x", "need at least two coordinates"));
        }
        let tail = &x[1..];
        let rho = norm(tail);
        let theta = rho.atan2(x[0]);
        let longitude = if rho > 0.0 {
            tail.iter().map(|v| v / rho).collect()
        } else {
            let mut e1 = vec![0.0; tail.len()];
            e1[0] = 1.0;
            e1
        };
        Ok(Self { theta, longitude })
    }
}

/// A point of R^{n-1} ∪ {∞}.
#[derive(Debug, Clone, PartialEq)]
pub enum ExtendedPoint {
    Finite(Vec<f64>),
    Infinity,
}

impl ExtendedPoint {
    pub fn scale(&self, lambda: f64) -> ExtendedPoint {
        match self {
            ExtendedPoint::Finite(p) => ExtendedPoint::Finite(p.iter().map(|v| v * lambda).collect()),
            ExtendedPoint::Infinity => ExtendedPoint::Infinity,
        }
    }
}

fn norm(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}

/// Stereographic projection of a unit vector x ∈ S^{n-1} through the south
/// pole (-1, 0, …, 0): Π(x) = x' / (1 + x₁).
pub fn stereographic_project(x: &[f64]) -> ExtendedPoint {
    let tail = &x[1..];
    let tail_sq: f64 = tail.iter().map(|v| v * v).sum();
    // 1 + x₁ = |x'|² / (1 - x₁) avoids cancellation near the south pole.
    let denom = if x[0] >= 0.0 {
        1.0 + x[0]
    } else {
        tail_sq / (1.0 - x[0])
    };
    if denom == 0.0 {
        return ExtendedPoint::Infinity;
    }
    ExtendedPoint::Finite(tail.iter().map(|v| v / denom).collect())
}

/// Π^{-1}: maps p ∈ R^{n-1} to ((1 - |p|²), 2p) / (1 + |p|²) and ∞ to the
/// south pole. `n` is the dimension of the sphere's ambient space.
pub fn stereographic_inverse(p: &ExtendedPoint, n: usize) -> Vec<f64> {
    match p {
        ExtendedPoint::Infinity => {
            let mut x = vec![0.0; n];
            x[0] = -1.0;
            x
        }
        ExtendedPoint::Finite(p) => {
            debug_assert_eq!(p.len() + 1, n);
            let rho = norm(p);
            let mut x = Vec::with_capacity(p.len() + 1);
            if rho <= 1.0 {
                let rho2 = rho * rho;
                x.push((1.0 - rho2) / (1.0 + rho2));
                x.extend(p.iter().map(|v| 2.0 * v / (1.0 + rho2)));
            } else {
                let inv2 = 1.0 / (rho * rho);
                x.push((inv2 - 1.0) / (inv2 + 1.0));
                x.extend(p.iter().map(|v| 2.0 * (v / rho) / (rho + 1.0 / rho)));
            }
            x
        }
    }
}

/// Stereographic projection of a zonal point: s tan(θ/2).
pub fn project_zonal(xi: &ZonalPoint) -> ExtendedPoint {
    if xi.theta >= PI {
        return ExtendedPoint::Infinity;
    }
    let y = (xi.theta / 2.0).tan();
    ExtendedPoint::Finite(xi.longitude.iter().map(|v| v * y).collect())
}

/// Φ^λ(ξ) = (cos φ(θ), s sin φ(θ)).
pub fn conformal_map_point(xi: &ZonalPoint, lambda: f64) -> ZonalPoint {
    ZonalPoint {
        theta: meridian_dilation(xi.theta, lambda),
        longitude: xi.longitude.clone(),
    }
}

/// Φ^λ(ξ) computed as Π^{-1}(λ Π(ξ)) in Cartesian coordinates.
pub fn conformal_map_cartesian(x: &[f64], lambda: f64) -> Vec<f64> {
    check_lambda(lambda);
    stereographic_inverse(&stereographic_project(x).scale(lambda), x.len())
}
