//! Deterministic globally adaptive Gauss–Kronrod (G7/K15) quadrature.
//!
//! Panels are bisected largest-error-first until the summed error estimate
//! drops below `max(rel_tol * |value|, abs_tol)`. Integrands are only
//! sampled at interior nodes, never at panel endpoints.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::unit_sphere_measure;

// Kronrod abscissae on [-1, 1]; odd indices are the 7-point Gauss nodes.
#[allow(clippy::excessive_precision)]
const XGK: [f64; 8] = [
    0.991_455_371_120_812_639_206_854_697_526_329,
    0.949_107_912_342_758_524_526_189_684_047_851,
    0.864_864_423_359_769_072_789_712_788_640_926,
    0.741_531_185_599_394_439_863_864_773_280_788,
    0.586_087_235_467_691_130_294_144_845_693_013,
    0.405_845_151_377_397_166_906_606_412_076_961,
    0.207_784_955_007_898_467_600_689_403_773_245,
    0.0,
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

#[allow(clippy::excessive_precision)]
const WG: [f64; 4] = [
    0.129_484_966_168_869_693_270_611_432_679_082,
    0.279_705_391_489_276_667_901_467_771_423_780,
    0.381_830_050_505_118_944_950_369_775_488_975,
    0.417_959_183_673_469_387_755_102_040_816_327,
];

/// Change of variables used to map (0, ∞) onto a finite interval.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SemiInfiniteTransform {
    /// y = u / (1 - u), u ∈ (0, 1).
    #[default]
    Rational,
    /// y = tan u, u ∈ (0, π/2).
    #[serde(alias = "exponential")]
    Tangent,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QuadratureConfig {
    pub rel_tol: f64,
    pub abs_tol: f64,
    pub max_subdivisions: usize,
    pub semi_infinite_transform: SemiInfiniteTransform,
}

impl Default for QuadratureConfig {
    fn default() -> Self {
        Self {
            rel_tol: 1e-10,
            abs_tol: 1e-14,
            max_subdivisions: 2000,
            semi_infinite_transform: SemiInfiniteTransform::Rational,
        }
    }
}

impl QuadratureConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.rel_tol.is_finite() && self.rel_tol > 0.0) {
            return Err(Error::invalid(
                "rel_tol",
                format!("must be positive, got {}", self.rel_tol),
            ));
        }
        if !(self.abs_tol.is_finite() && self.abs_tol > 0.0) {
            return Err(Error::invalid(
                "abs_tol",
                format!("must be positive, got {}", self.abs_tol),
            ));
        }
        if self.max_subdivisions == 0 {
            return Err(Error::invalid("max_subdivisions", "must be at least 1"));
        }
        Ok(())
    }

    pub fn with_rel_tol(mut self, rel_tol: f64) -> Self {
        self.rel_tol = rel_tol;
        self
    }

    pub fn with_transform(mut self, transform: SemiInfiniteTransform) -> Self {
        self.semi_infinite_transform = transform;
        self
    }

    /// Acceptance threshold for a result of magnitude `value`.
    pub fn tolerance_for(&self, value: f64) -> f64 {
        (self.rel_tol * value.abs()).max(self.abs_tol)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct IntegralResult {
    pub value: f64,
    pub error_estimate: f64,
    pub subdivisions_used: usize,
}

impl IntegralResult {
    /// Multiplies value and error by a constant factor.
    pub fn scaled(self, factor: f64) -> Self {
        Self {
            value: self.value * factor,
            error_estimate: self.error_estimate * factor.abs(),
            subdivisions_used: self.subdivisions_used,
        }
    }
}

/// Neumaier-compensated running sum.
#[derive(Debug, Default, Clone, Copy)]
pub(crate) struct CompensatedSum {
    sum: f64,
    compensation: f64,
}

impl CompensatedSum {
    pub(crate) fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.compensation += (self.sum - t) + x;
        } else {
            self.compensation += (x - t) + self.sum;
        }
        self.sum = t;
    }

    pub(crate) fn value(&self) -> f64 {
        self.sum + self.compensation
    }
}

#[derive(Debug, Clone, Copy)]
struct Panel {
    a: f64,
    b: f64,
    value: f64,
    error: f64,
    truncation: f64,
    refinable: bool,
}

fn sample<F>(f: &mut F, x: f64) -> Result<f64>
where
    F: FnMut(f64) -> Result<f64>,
{
    let v = f(x)?;
    if v.is_finite() {
        Ok(v)
    } else {
        Err(Error::Domain { abscissa: x, value: v })
    }
}

fn kronrod15<F>(f: &mut F, a: f64, b: f64) -> Result<Panel>
where
    F: FnMut(f64) -> Result<f64>,
{
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let fc = sample(f, center)?;
    let mut kronrod = WGK[7] * fc;
    let mut gauss = WG[3] * fc;
    let mut abs_sum = kronrod.abs();
    for j in 0..7 {
        let dx = half * XGK[j];
        let f1 = sample(f, center - dx)?;
        let f2 = sample(f, center + dx)?;
        kronrod += WGK[j] * (f1 + f2);
        abs_sum += WGK[j] * (f1.abs() + f2.abs());
        if j % 2 == 1 {
            gauss += WG[j / 2] * (f1 + f2);
        }
    }
    let value = kronrod * half;
    // Never claim more accuracy than roundoff allows.
    let roundoff = 50.0 * f64::EPSILON * abs_sum * half.abs();
    let truncation = ((kronrod - gauss) * half).abs();
    let error = truncation.max(roundoff);
    let refinable = half.abs() > 100.0 * f64::EPSILON * center.abs().max(f64::MIN_POSITIVE);
    Ok(Panel {
        a,
        b,
        value,
        error,
        truncation,
        refinable,
    })
}

fn totals(panels: &[Panel]) -> (f64, f64, f64) {
    let mut value = CompensatedSum::default();
    let mut error = CompensatedSum::default();
    let mut truncation = CompensatedSum::default();
    for p in panels {
        value.add(p.value);
        error.add(p.error);
        truncation.add(p.truncation);
    }
    (value.value(), error.value(), truncation.value())
}

/// Adaptive integration over the panels delimited by `breakpoints`, which
/// must be strictly increasing. The integrand may fail.
pub fn try_integrate_breakpoints<F>(mut f: F, breakpoints: &[f64], cfg: &QuadratureConfig) -> Result<IntegralResult>
where
    F: FnMut(f64) -> Result<f64>,
{
    cfg.validate()?;
    if breakpoints.len() < 2 {
        return Err(Error::invalid("breakpoints", "need at least two points"));
    }
    if breakpoints.iter().any(|x| !x.is_finite()) {
        return Err(Error::invalid("breakpoints", "limits must be finite"));
    }
    if breakpoints.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::invalid("breakpoints", "must be strictly increasing (a < b)"));
    }
    let mut panels = Vec::with_capacity(breakpoints.len() + 16);
    for w in breakpoints.windows(2) {
        panels.push(kronrod15(&mut f, w[0], w[1])?);
    }
    let mut subdivisions = 0;
    loop {
        let (value, error, truncation) = totals(&panels);
        // Once only the roundoff floor is above tolerance, subdividing cannot
        // help; the reported estimate still carries that floor.
        let tolerance = cfg.tolerance_for(value);
        if error <= tolerance || truncation <= tolerance {
            return Ok(IntegralResult {
                value,
                error_estimate: error,
                subdivisions_used: subdivisions,
            });
        }
        // Largest refinable error; ties go to the leftmost panel.
        let worst = panels.iter().enumerate().filter(|(_, p)| p.refinable).fold(
            None::<(usize, f64)>,
            |best, (i, p)| match best {
                Some((_, e)) if e >= p.error => best,
                _ => Some((i, p.error)),
            },
        );
        let Some((idx, _)) = worst else {
            return Err(Error::NonConvergence {
                value,
                error_estimate: error,
                subdivisions,
            });
        };
        if subdivisions >= cfg.max_subdivisions {
            return Err(Error::NonConvergence {
                value,
                error_estimate: error,
                subdivisions,
            });
        }
        let p = panels[idx];
        let mid = 0.5 * (p.a + p.b);
        let left = kronrod15(&mut f, p.a, mid)?;
        let right = kronrod15(&mut f, mid, p.b)?;
        panels[idx] = left;
        panels.insert(idx + 1, right);
        subdivisions += 1;
    }
}

/// Fallible-integrand form of [`integrate_interval`].
pub fn try_integrate_interval<F>(f: F, a: f64, b: f64, cfg: &QuadratureConfig) -> Result<IntegralResult>
where
    F: FnMut(f64) -> Result<f64>,
{
    try_integrate_breakpoints(f, &[a, b], cfg)
}

/// ∫_a^b f(x) dx.
pub fn integrate_interval<F>(mut f: F, a: f64, b: f64, cfg: &QuadratureConfig) -> Result<IntegralResult>
where
    F: FnMut(f64) -> f64,
{
    try_integrate_interval(|x| Ok(f(x)), a, b, cfg)
}

/// ∫ over `[breakpoints[0], breakpoints[last]]`, starting from one panel per gap.
pub fn integrate_breakpoints<F>(mut f: F, breakpoints: &[f64], cfg: &QuadratureConfig) -> Result<IntegralResult>
where
    F: FnMut(f64) -> f64,
{
    try_integrate_breakpoints(|x| Ok(f(x)), breakpoints, cfg)
}

/// Fallible-integrand form of [`integrate_semi_axis`].
pub fn try_integrate_semi_axis<F>(mut f: F, cfg: &QuadratureConfig) -> Result<IntegralResult>
where
    F: FnMut(f64) -> Result<f64>,
{
    match cfg.semi_infinite_transform {
        SemiInfiniteTransform::Rational => try_integrate_interval(
            |u| {
                let v = 1.0 - u;
                let fy = f(u / v)?;
                Ok(if fy == 0.0 { 0.0 } else { fy / (v * v) })
            },
            0.0,
            1.0,
            cfg,
        ),
        SemiInfiniteTransform::Tangent => try_integrate_interval(
            |u| {
                let y = u.tan();
                let fy = f(y)?;
                Ok(if fy == 0.0 { 0.0 } else { fy * (1.0 + y * y) })
            },
            0.0,
            PI / 2.0,
            cfg,
        ),
    }
}

/// ∫_0^∞ f(y) dy via the configured change of variables.
pub fn integrate_semi_axis<F>(mut f: F, cfg: &QuadratureConfig) -> Result<IntegralResult>
where
    F: FnMut(f64) -> f64,
{
    try_integrate_semi_axis(|y| Ok(f(y)), cfg)
}

/// ∫_{S^{n-1}} G dσ for a zonal G(ξ) = g(θ): ω_{n-2} ∫_0^π g(θ) sin^{n-2}θ dθ.
pub fn integrate_zonal<F>(mut g: F, n: usize, cfg: &QuadratureConfig) -> Result<IntegralResult>
where
    F: FnMut(f64) -> f64,
{
    if n < 3 {
        return Err(Error::invalid("n", format!("zonal integration needs n >= 3, got {n}")));
    }
    let omega = unit_sphere_measure(n - 1)?;
    let power = (n - 2) as i32;
    integrate_interval(|theta| g(theta) * theta.sin().powi(power), 0.0, PI, cfg).map(|r| r.scaled(omega))
}
