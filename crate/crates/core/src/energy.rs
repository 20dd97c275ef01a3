//! Energy functionals of radial and separable maps h(x) = H(|x|) Φ^λ(x/|x|)
//! and their closed-form lower bounds.
//!
//! The Dirichlet-type energy of a separable map reduces to
//!
//! ```text
//! E[h^λ] = 2^{n-1} ω_{n-2} ∫_r^R ∫_0^∞ (w² + (n-1) q_λ(y)²)^{(n-1)/2} y^{n-2} / (1+y²)^{n-1} dy dt
//! ```
//!
//! with w = tḢ/H and q_λ(y) = λ(1+y²)/(1+λ²y²), which is the primary
//! evaluation path here. The (t, θ) form over the sphere is kept as an
//! independent cross-check.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{conformal_gradient_norm_sq, unit_sphere_measure, Annulus};
use crate::profiles::RadialProfile;
use crate::quadrature::{
    integrate_zonal, try_integrate_breakpoints, try_integrate_semi_axis, IntegralResult, QuadratureConfig,
};

/// Below this (after folding λ ↦ 1/λ) separable energies are refused.
pub const LAMBDA_REFUSE: f64 = 1e-6;
/// Below this the relative tolerance is tightened by [`SMALL_LAMBDA_TIGHTENING`].
pub const LAMBDA_TIGHTEN: f64 = 1e-3;
pub const SMALL_LAMBDA_TIGHTENING: f64 = 1e-2;

/// x^{k/2} for integer k ≥ 0, avoiding `powf` where possible.
fn pow_half(x: f64, k: usize) -> f64 {
    if k.is_multiple_of(2) {
        x.powi((k / 2) as i32)
    } else {
        x.powi((k / 2) as i32) * x.sqrt()
    }
}

/// h^λ(x) = H(|x|) Φ^λ(x/|x|).
#[derive(Debug, Clone, PartialEq)]
pub struct SeparableMap {
    profile: RadialProfile,
    lambda: f64,
}

impl SeparableMap {
    pub fn new(profile: RadialProfile, lambda: f64) -> Result<Self> {
        if !(lambda.is_finite() && lambda > 0.0) {
            return Err(Error::invalid(
                "lambda",
                format!("must be positive and finite, got {lambda}"),
            ));
        }
        Ok(Self { profile, lambda })
    }

    /// The radial map (λ = 1).
    pub fn radial(profile: RadialProfile) -> Self {
        Self { profile, lambda: 1.0 }
    }

    pub fn profile(&self) -> &RadialProfile {
        &self.profile
    }

    pub fn lambda(&self) -> f64 {
        self.lambda
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReportMeta {
    pub n: usize,
    pub r: f64,
    #[serde(rename = "R")]
    pub big_r: f64,
    pub r_star: f64,
    #[serde(rename = "R_star")]
    pub big_r_star: f64,
    pub lambda: f64,
    pub profile: String,
    pub a: f64,
    pub b: f64,
}

impl ReportMeta {
    fn new(profile: &RadialProfile, lambda: f64, a: f64, b: f64) -> Self {
        let (d, t) = (profile.domain(), profile.target());
        Self {
            n: d.n(),
            r: d.inner(),
            big_r: d.outer(),
            r_star: t.inner(),
            big_r_star: t.outer(),
            lambda,
            profile: profile.tag(),
            a,
            b,
        }
    }
}

/// An energy value with its applicable lower bound and error budget.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EnergyReport {
    pub energy: f64,
    pub bound: f64,
    pub relative_gap: f64,
    pub quadrature_error: f64,
    pub meta: ReportMeta,
}

/// Column order of [`EnergyReport::csv_fields`].
pub const ENERGY_CSV_HEADER: &str = "n,r,R,r_star,R_star,lambda,profile,a,b,energy,bound,relative_gap,quad_error";

/// Fixed 17-significant-digit rendering used in every emitted table.
pub fn fmt_num(x: f64) -> String {
    format!("{x:.16e}")
}

impl EnergyReport {
    fn new(energy: f64, bound: f64, quadrature_error: f64, meta: ReportMeta) -> Self {
        Self {
            energy,
            bound,
            relative_gap: (energy - bound) / bound,
            quadrature_error,
            meta,
        }
    }

    pub fn csv_fields(&self) -> Vec<String> {
        let m = &self.meta;
        vec![
            m.n.to_string(),
            fmt_num(m.r),
            fmt_num(m.big_r),
            fmt_num(m.r_star),
            fmt_num(m.big_r_star),
            fmt_num(m.lambda),
            m.profile.clone(),
            fmt_num(m.a),
            fmt_num(m.b),
            fmt_num(self.energy),
            fmt_num(self.bound),
            fmt_num(self.relative_gap),
            fmt_num(self.quadrature_error),
        ]
    }

    pub fn csv_row(&self) -> String {
        self.csv_fields().join(",")
    }
}

/// Quadrature and closed form of ∫_{S^{n-1}} ‖DΦ^λ‖^{n-1} dσ.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SphereEnergy {
    pub quadrature: IntegralResult,
    pub closed_form: f64,
}

pub fn sphere_conformal_energy(lambda: f64, n: usize, cfg: &QuadratureConfig) -> Result<SphereEnergy> {
    if !(lambda.is_finite() && lambda > 0.0) {
        return Err(Error::invalid(
            "lambda",
            format!("must be positive and finite, got {lambda}"),
        ));
    }
    if n < 3 {
        return Err(Error::invalid("n", format!("must be >= 3, got {n}")));
    }
    let quadrature = integrate_zonal(
        |theta| pow_half(conformal_gradient_norm_sq(theta, lambda, n), n - 1),
        n,
        cfg,
    )?;
    let closed_form = pow_half((n - 1) as f64, n - 1) * unit_sphere_measure(n)?;
    Ok(SphereEnergy {
        quadrature,
        closed_form,
    })
}

/// y^{n-2} / (1+y²)^{n-1}, written to stay finite for huge y.
fn beta_weight(y: f64, n: usize) -> f64 {
    let one_plus = 1.0 + y * y;
    let s = y / one_plus;
    s.powi(n as i32 - 2) / one_plus
}

/// q_λ(y) = λ(1+y²)/(1+λ²y²) = sin φ / sin θ at y = tan(θ/2).
fn dilation_ratio(y: f64, lambda: f64) -> f64 {
    if y <= 1.0 {
        lambda * (1.0 + y * y) / (1.0 + lambda * lambda * y * y)
    } else {
        let inv2 = 1.0 / (y * y);
        lambda * (inv2 + 1.0) / (inv2 + lambda * lambda)
    }
}

fn separable_config(lambda: f64, cfg: &QuadratureConfig) -> Result<QuadratureConfig> {
    let folded = lambda.min(1.0 / lambda);
    if folded < LAMBDA_REFUSE {
        return Err(Error::LambdaOutOfRange { lambda });
    }
    Ok(if folded < LAMBDA_TIGHTEN {
        cfg.with_rel_tol(cfg.rel_tol * SMALL_LAMBDA_TIGHTENING)
    } else {
        *cfg
    })
}

/// Dirichlet-type energy ∫ ‖Dh‖^{n-1}/|h|^{n-1} of a separable map, by the
/// (t, y) double integral. The bound is the Dirichlet infimum.
pub fn quasiradial_energy(map: &SeparableMap, cfg: &QuadratureConfig) -> Result<EnergyReport> {
    let profile = map.profile();
    let lambda = map.lambda();
    let n = profile.n();
    let cfg = separable_config(lambda, cfg)?;
    let m = (n - 1) as f64;
    let mut worst_inner = 0.0f64;
    let outer = try_integrate_breakpoints(
        |t| {
            let w = profile.log_derivative(t);
            let w2 = w * w;
            let inner = try_integrate_semi_axis(
                |y| {
                    let q = dilation_ratio(y, lambda);
                    Ok(pow_half(w2 + m * q * q, n - 1) * beta_weight(y, n))
                },
                &cfg,
            )?;
            worst_inner = worst_inner.max(inner.error_estimate);
            Ok(inner.value)
        },
        &profile.breakpoints(),
        &cfg,
    )?;
    let prefactor = 2f64.powi(n as i32 - 1) * unit_sphere_measure(n - 1)?;
    let error = prefactor * (outer.error_estimate + profile.domain().width() * worst_inner);
    Ok(EnergyReport::new(
        prefactor * outer.value,
        dirichlet_infimum(profile.domain(), profile.target())?,
        error,
        ReportMeta::new(profile, lambda, 1.0, 1.0),
    ))
}

/// Same energy as [`quasiradial_energy`] but integrating over the sphere in
/// the meridian angle θ. Used as a cross-check.
pub fn quasiradial_energy_zonal(map: &SeparableMap, cfg: &QuadratureConfig) -> Result<EnergyReport> {
    let profile = map.profile();
    let lambda = map.lambda();
    let n = profile.n();
    let cfg = separable_config(lambda, cfg)?;
    let mut worst_inner = 0.0f64;
    let outer = try_integrate_breakpoints(
        |t| {
            let w = profile.log_derivative(t);
            let inner = integrate_zonal(
                |theta| pow_half(w * w + conformal_gradient_norm_sq(theta, lambda, n), n - 1),
                n,
                &cfg,
            )?;
            worst_inner = worst_inner.max(inner.error_estimate);
            Ok(inner.value)
        },
        &profile.breakpoints(),
        &cfg,
    )?;
    Ok(EnergyReport::new(
        outer.value,
        dirichlet_infimum(profile.domain(), profile.target())?,
        outer.error_estimate + profile.domain().width() * worst_inner,
        ReportMeta::new(profile, lambda, 1.0, 1.0),
    ))
}

/// H[H] = ω_{n-1} ∫_r^R (n - 1 + w²)^{(n-1)/2} dt, the energy of the radial map.
pub fn radial_energy(profile: &RadialProfile, cfg: &QuadratureConfig) -> Result<EnergyReport> {
    let n = profile.n();
    let m = (n - 1) as f64;
    let omega = unit_sphere_measure(n)?;
    let r = try_integrate_breakpoints(
        |t| {
            let w = profile.log_derivative(t);
            Ok(pow_half(m + w * w, n - 1))
        },
        &profile.breakpoints(),
        cfg,
    )?
    .scaled(omega);
    Ok(EnergyReport::new(
        r.value,
        dirichlet_infimum(profile.domain(), profile.target())?,
        r.error_estimate,
        ReportMeta::new(profile, 1.0, 1.0, 1.0),
    ))
}

/// ω_{n-1} ∫ |w|^{n-1} dt, the radial part of the combined energy.
fn log_gradient_energy(profile: &RadialProfile, cfg: &QuadratureConfig) -> Result<IntegralResult> {
    let n = profile.n();
    let omega = unit_sphere_measure(n)?;
    Ok(try_integrate_breakpoints(
        |t| Ok(profile.log_derivative(t).abs().powi(n as i32 - 1)),
        &profile.breakpoints(),
        cfg,
    )?
    .scaled(omega))
}

/// lim_{λ→0⁺} E[h^λ] = ω_{n-1} ∫ ((n-1)^{(n-1)/2} + |w|^{n-1}) dt.
///
/// The limit is established for n ≥ 4; at n = 3 the same integral is
/// returned, and it coincides with the λ-independent value there.
pub fn limit_energy(profile: &RadialProfile, cfg: &QuadratureConfig) -> Result<IntegralResult> {
    let n = profile.n();
    let constant = pow_half((n - 1) as f64, n - 1) * unit_sphere_measure(n)? * profile.domain().width();
    let mut r = log_gradient_energy(profile, cfg)?;
    r.value += constant;
    Ok(r)
}

/// E[a,b][h^λ] = a² (R - r) ∫‖DΦ^λ‖^{n-1}dσ + b² ω_{n-1} ∫ |w|^{n-1} dt.
pub fn combined_energy_separable(a: f64, b: f64, map: &SeparableMap, cfg: &QuadratureConfig) -> Result<EnergyReport> {
    check_weights(a, b)?;
    let profile = map.profile();
    let n = profile.n();
    let width = profile.domain().width();
    let sphere = sphere_conformal_energy(map.lambda(), n, cfg)?;
    let radial = log_gradient_energy(profile, cfg)?;
    let energy = a * a * width * sphere.quadrature.value + b * b * radial.value;
    let error = a * a * width * sphere.quadrature.error_estimate + b * b * radial.error_estimate;
    Ok(EnergyReport::new(
        energy,
        combined_lower_bound(a, b, profile.domain(), profile.target())?,
        error,
        ReportMeta::new(profile, map.lambda(), a, b),
    ))
}

fn check_weights(a: f64, b: f64) -> Result<()> {
    if !(a.is_finite() && a > 0.0) {
        return Err(Error::invalid("a", format!("must be positive, got {a}")));
    }
    if !(b.is_finite() && b > 0.0) {
        return Err(Error::invalid("b", format!("must be positive, got {b}")));
    }
    Ok(())
}

/// log^{n-1}(R_*/r_*) / (n-2)^{n-2} · Rr / (R^{1/(n-2)} - r^{1/(n-2)})^{n-2}:
/// the sharp lower bound of ∫_r^R t^{n-1} |Ḣ/H|^{n-1} dt.
pub fn holder_lower_bound(domain: &Annulus, log_ratio: f64) -> f64 {
    let n = domain.n();
    let k = (n - 2) as i32;
    let p = 1.0 / (n - 2) as f64;
    let (r, big_r) = (domain.inner(), domain.outer());
    log_ratio.powi(n as i32 - 1) / ((n - 2) as f64).powi(k) * (r * big_r) / (big_r.powf(p) - r.powf(p)).powi(k)
}

/// The combined-energy bound for a given log(R_*/r_*) ≥ 0 (zero allowed).
pub fn lower_bound_from_log_ratio(a: f64, b: f64, domain: &Annulus, log_ratio: f64) -> Result<f64> {
    check_weights(a, b)?;
    if !(log_ratio.is_finite() && log_ratio >= 0.0) {
        return Err(Error::invalid("log_ratio", format!("must be >= 0, got {log_ratio}")));
    }
    let n = domain.n();
    let omega = unit_sphere_measure(n)?;
    let sphere_part = pow_half((n - 1) as f64, n - 1) * domain.width();
    Ok(omega * (a * a * sphere_part + b * b * holder_lower_bound(domain, log_ratio)))
}

/// Sharp lower bound of E[a,b] over homeomorphisms between the annuli.
pub fn combined_lower_bound(a: f64, b: f64, domain: &Annulus, target: &Annulus) -> Result<f64> {
    if domain.n() != target.n() {
        return Err(Error::invalid("target", "dimension differs from domain"));
    }
    lower_bound_from_log_ratio(a, b, domain, target.log_ratio())
}

/// Infimum of the Dirichlet-type energy: the combined bound with a = b = 1.
/// Attained at n = 3, approached but not attained for n ≥ 4.
pub fn dirichlet_infimum(domain: &Annulus, target: &Annulus) -> Result<f64> {
    combined_lower_bound(1.0, 1.0, domain, target)
}
