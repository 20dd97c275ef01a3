//! Radial profiles H: [r, R] → [r_*, R_*] with closed-form or interpolant
//! derivatives.

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::euler_lagrange::{el_log_profile, solve_w_unchecked};
use crate::geometry::Annulus;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Orientation {
    Increasing,
    Decreasing,
}

impl Orientation {
    pub fn sign(self) -> f64 {
        match self {
            Orientation::Increasing => 1.0,
            Orientation::Decreasing => -1.0,
        }
    }

    pub fn flipped(self) -> Self {
        match self {
            Orientation::Increasing => Orientation::Decreasing,
            Orientation::Decreasing => Orientation::Increasing,
        }
    }
}

/// α(t) = R^p (t^p - r^p) / (t^p (R^p - r^p)) with p = 1/(n-2).
pub fn alpha(t: f64, domain: &Annulus) -> Result<f64> {
    if !domain.contains_radius(t) {
        return Err(Error::invalid(
            "t",
            format!("{t} is outside [{}, {}]", domain.inner(), domain.outer()),
        ));
    }
    Ok(alpha_unchecked(t, domain))
}

fn alpha_unchecked(t: f64, domain: &Annulus) -> f64 {
    let p = 1.0 / (domain.n() - 2) as f64;
    let (r, big_r) = (domain.inner(), domain.outer());
    let rp = big_r.powf(p);
    rp * (1.0 - (r / t).powf(p)) / (rp - r.powf(p))
}

/// Piecewise-cubic Hermite interpolant of strictly monotone data.
///
/// Node slopes come from five-point Lagrange differentiation and are then
/// clipped into the Fritsch–Carlson box, so the interpolant is monotone.
#[derive(Debug, Clone, PartialEq)]
pub struct MonotoneCubic {
    xs: Vec<f64>,
    ys: Vec<f64>,
    slopes: Vec<f64>,
}

impl MonotoneCubic {
    pub fn new(xs: Vec<f64>, ys: Vec<f64>) -> Result<Self> {
        if xs.len() != ys.len() {
            return Err(Error::invalid("knots", "abscissa and ordinate counts differ"));
        }
        if xs.len() < 2 {
            return Err(Error::invalid("knots", "need at least two knots"));
        }
        if xs.iter().chain(&ys).any(|v| !v.is_finite()) {
            return Err(Error::invalid("knots", "values must be finite"));
        }
        if xs.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::invalid("knots", "abscissae must be strictly increasing"));
        }
        let secants: Vec<f64> = xs
            .windows(2)
            .zip(ys.windows(2))
            .map(|(x, y)| (y[1] - y[0]) / (x[1] - x[0]))
            .collect();
        let sign = secants[0].signum();
        if secants.iter().any(|s| s.signum() != sign || *s == 0.0) {
            return Err(Error::invalid(
                "knots",
                "ordinates must be strictly monotone (profile must stay a homeomorphism)",
            ));
        }
        let n = xs.len();
        let slopes = (0..n)
            .map(|i| {
                let raw = lagrange_slope(&xs, &ys, i);
                let bound = match i {
                    0 => 3.0 * secants[0].abs(),
                    i if i == n - 1 => 3.0 * secants[n - 2].abs(),
                    i => 3.0 * secants[i - 1].abs().min(secants[i].abs()),
                };
                sign * (sign * raw).clamp(0.0, bound)
            })
            .collect();
        Ok(Self { xs, ys, slopes })
    }

    pub fn knots(&self) -> &[f64] {
        &self.xs
    }

    fn segment(&self, x: f64) -> usize {
        let idx = self.xs.partition_point(|&k| k <= x);
        idx.clamp(1, self.xs.len() - 1) - 1
    }

    pub fn value(&self, x: f64) -> f64 {
        let i = self.segment(x);
        let h = self.xs[i + 1] - self.xs[i];
        let s = (x - self.xs[i]) / h;
        let (h00, h10, h01, h11) = (
            (1.0 + 2.0 * s) * (1.0 - s) * (1.0 - s),
            s * (1.0 - s) * (1.0 - s),
            s * s * (3.0 - 2.0 * s),
            s * s * (s - 1.0),
        );
        h00 * self.ys[i] + h10 * h * self.slopes[i] + h01 * self.ys[i + 1] + h11 * h * self.slopes[i + 1]
    }

    pub fn derivative(&self, x: f64) -> f64 {
        let i = self.segment(x);
        let h = self.xs[i + 1] - self.xs[i];
        let s = (x - self.xs[i]) / h;
        let (d00, d10, d01, d11) = (
            6.0 * s * (s - 1.0),
            (1.0 - s) * (1.0 - 3.0 * s),
            6.0 * s * (1.0 - s),
            s * (3.0 * s - 2.0),
        );
        (d00 * self.ys[i] + d01 * self.ys[i + 1]) / h + d10 * self.slopes[i] + d11 * self.slopes[i + 1]
    }
}

/// Derivative at `xs[i]` of the Lagrange polynomial through up to five
/// neighbouring knots.
fn lagrange_slope(xs: &[f64], ys: &[f64], i: usize) -> f64 {
    let n = xs.len();
    let width = n.min(5);
    let start = i.saturating_sub(width / 2).min(n - width);
    let idx = start..start + width;
    let xi = xs[i];
    let mut slope = 0.0;
    for j in idx.clone() {
        let coeff = if j == i {
            idx.clone().filter(|&k| k != i).map(|k| 1.0 / (xi - xs[k])).sum::<f64>()
        } else {
            let num: f64 = idx.clone().filter(|&k| k != i && k != j).map(|k| xi - xs[k]).product();
            let den: f64 = idx.clone().filter(|&k| k != j).map(|k| xs[j] - xs[k]).product();
            num / den
        };
        slope += coeff * ys[j];
    }
    slope
}

#[derive(Debug, Clone, PartialEq)]
enum Shape {
    /// H = r_*(R_*/r_*)^α or R_*(r_*/R_*)^α; w(t) = ±c t^{-1/(n-2)}.
    Boundary {
        orientation: Orientation,
        w_coeff: f64,
    },
    Tabulated(MonotoneCubic),
    /// H = κ exp(G(w(t, τ))) with w solving the Euler–Lagrange relation.
    ElMinimizer {
        tau: f64,
        kappa: f64,
    },
    /// c / H_base(t).
    Inverted {
        base: Box<RadialProfile>,
        c: f64,
    },
}

/// A monotone radial profile H between two annuli.
#[derive(Debug, Clone, PartialEq)]
pub struct RadialProfile {
    domain: Annulus,
    target: Annulus,
    shape: Shape,
}

fn check_same_dimension(domain: &Annulus, target: &Annulus) -> Result<()> {
    if domain.n() != target.n() {
        return Err(Error::invalid(
            "target",
            format!("dimension {} differs from domain dimension {}", target.n(), domain.n()),
        ));
    }
    Ok(())
}

/// H_1 (increasing) or H_2 (decreasing): the extremal profiles of the
/// Hölder bound on ∫ t^{n-1}|Ḣ/H|^{n-1} dt.
pub fn make_boundary_profile(domain: &Annulus, target: &Annulus, orientation: Orientation) -> Result<RadialProfile> {
    check_same_dimension(domain, target)?;
    let p = 1.0 / (domain.n() - 2) as f64;
    let (r, big_r) = (domain.inner(), domain.outer());
    // t α'(t) = p (Rr)^p / (R^p - r^p) · t^{-p}
    let w_coeff = target.log_ratio() * p * (r * big_r).powf(p) / (big_r.powf(p) - r.powf(p));
    Ok(RadialProfile {
        domain: *domain,
        target: *target,
        shape: Shape::Boundary { orientation, w_coeff },
    })
}

/// Monotone cubic interpolant through `(t, H)` knots spanning the domain
/// and target radii.
pub fn make_tabulated_profile(knots: &[(f64, f64)], domain: &Annulus, target: &Annulus) -> Result<RadialProfile> {
    check_same_dimension(domain, target)?;
    if knots.len() < 2 {
        return Err(Error::invalid("knots", "need at least two knots"));
    }
    let close = |a: f64, b: f64| (a - b).abs() <= 1e-9 * b.abs();
    let mut xs: Vec<f64> = knots.iter().map(|k| k.0).collect();
    let mut ys: Vec<f64> = knots.iter().map(|k| k.1).collect();
    let last = xs.len() - 1;
    if !close(xs[0], domain.inner()) || !close(xs[last], domain.outer()) {
        return Err(Error::invalid(
            "knots",
            format!(
                "abscissae must span [{}, {}], got [{}, {}]",
                domain.inner(),
                domain.outer(),
                xs[0],
                xs[last]
            ),
        ));
    }
    let (lo, hi) = (target.inner(), target.outer());
    let (first, end) = if close(ys[0], lo) && close(ys[last], hi) {
        (lo, hi)
    } else if close(ys[0], hi) && close(ys[last], lo) {
        (hi, lo)
    } else {
        return Err(Error::invalid(
            "knots",
            format!(
                "ordinates must run between {lo} and {hi}, got {} .. {}",
                ys[0], ys[last]
            ),
        ));
    };
    xs[0] = domain.inner();
    xs[last] = domain.outer();
    ys[0] = first;
    ys[last] = end;
    Ok(RadialProfile {
        domain: *domain,
        target: *target,
        shape: Shape::Tabulated(MonotoneCubic::new(xs, ys)?),
    })
}

#[derive(Debug, Deserialize)]
struct KnotRow {
    t: f64,
    #[serde(rename = "H")]
    h: f64,
}

/// Reads knots from a two-column CSV with header `t,H`.
pub fn read_knots_csv<R: std::io::Read>(reader: R) -> Result<Vec<(f64, f64)>> {
    let mut rdr = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(reader);
    let headers = rdr.headers()?.clone();
    if headers.len() != 2 || &headers[0] != "t" || &headers[1] != "H" {
        return Err(Error::invalid(
            "knots",
            format!(
                "expected CSV header `t,H`, got `{}`",
                headers.iter().collect::<Vec<_>>().join(",")
            ),
        ));
    }
    rdr.deserialize::<KnotRow>()
        .map(|row| row.map(|k| (k.t, k.h)).map_err(Error::from))
        .collect()
}

pub fn load_tabulated_profile(path: &Path, domain: &Annulus, target: &Annulus) -> Result<RadialProfile> {
    let knots = read_knots_csv(std::fs::File::open(path)?)?;
    make_tabulated_profile(&knots, domain, target)
}

/// The profile c / H(t), which maps onto [c/R_*, c/r_*] with the opposite
/// orientation.
pub fn invert_profile(profile: &RadialProfile, c: f64) -> Result<RadialProfile> {
    if !(c.is_finite() && c > 0.0) {
        return Err(Error::invalid("c", format!("must be positive, got {c}")));
    }
    let t = profile.target;
    let target = Annulus::new(t.n(), c / t.outer(), c / t.inner())?;
    Ok(RadialProfile {
        domain: profile.domain,
        target,
        shape: Shape::Inverted {
            base: Box::new(profile.clone()),
            c,
        },
    })
}

impl RadialProfile {
    pub(crate) fn el_minimizer(domain: Annulus, target: Annulus, tau: f64, kappa: f64) -> Self {
        Self {
            domain,
            target,
            shape: Shape::ElMinimizer { tau, kappa },
        }
    }

    pub fn domain(&self) -> &Annulus {
        &self.domain
    }

    pub fn target(&self) -> &Annulus {
        &self.target
    }

    pub fn n(&self) -> usize {
        self.domain.n()
    }

    pub fn orientation(&self) -> Orientation {
        match &self.shape {
            Shape::Boundary { orientation, .. } => *orientation,
            Shape::Tabulated(c) => {
                if c.ys[1] > c.ys[0] {
                    Orientation::Increasing
                } else {
                    Orientation::Decreasing
                }
            }
            Shape::ElMinimizer { .. } => Orientation::Increasing,
            Shape::Inverted { base, .. } => base.orientation().flipped(),
        }
    }

    /// Short label used in reports.
    pub fn tag(&self) -> String {
        match &self.shape {
            Shape::Boundary {
                orientation: Orientation::Increasing,
                ..
            } => "boundary-increasing".into(),
            Shape::Boundary {
                orientation: Orientation::Decreasing,
                ..
            } => "boundary-decreasing".into(),
            Shape::Tabulated(_) => "tabulated".into(),
            Shape::ElMinimizer { .. } => "el-minimizer".into(),
            Shape::Inverted { base, .. } => format!("inverted-{}", base.tag()),
        }
    }

    /// (τ, κ) when this is the Euler–Lagrange minimizer.
    pub fn el_parameters(&self) -> Option<(f64, f64)> {
        match self.shape {
            Shape::ElMinimizer { tau, kappa } => Some((tau, kappa)),
            _ => None,
        }
    }

    /// Points where the profile may lose smoothness; quadrature starts with
    /// one panel per gap.
    pub fn breakpoints(&self) -> Vec<f64> {
        match &self.shape {
            Shape::Tabulated(c) => c.knots().to_vec(),
            Shape::Inverted { base, .. } => base.breakpoints(),
            _ => vec![self.domain.inner(), self.domain.outer()],
        }
    }

    /// H(t).
    pub fn value(&self, t: f64) -> f64 {
        match &self.shape {
            Shape::Boundary { orientation, .. } => {
                let a = alpha_unchecked(t, &self.domain);
                let l = self.target.log_ratio();
                match orientation {
                    Orientation::Increasing => self.target.inner() * (a * l).exp(),
                    Orientation::Decreasing => self.target.outer() * (-a * l).exp(),
                }
            }
            Shape::Tabulated(c) => c.value(t),
            Shape::ElMinimizer { tau, kappa } => {
                let n = self.n();
                kappa * el_log_profile(solve_w_unchecked(t, *tau, n), n).exp()
            }
            Shape::Inverted { base, c } => c / base.value(t),
        }
    }

    /// Ḣ(t).
    pub fn derivative(&self, t: f64) -> f64 {
        match &self.shape {
            Shape::Tabulated(c) => c.derivative(t),
            Shape::Inverted { base, c } => {
                let h = base.value(t);
                -c * base.derivative(t) / (h * h)
            }
            _ => self.value(t) * self.log_derivative(t) / t,
        }
    }

    /// w(t) = t Ḣ(t) / H(t).
    pub fn log_derivative(&self, t: f64) -> f64 {
        match &self.shape {
            Shape::Boundary { orientation, w_coeff } => {
                let p = 1.0 / (self.n() - 2) as f64;
                orientation.sign() * w_coeff * t.powf(-p)
            }
            Shape::Tabulated(c) => t * c.derivative(t) / c.value(t),
            Shape::ElMinimizer { tau, .. } => solve_w_unchecked(t, *tau, self.n()),
            Shape::Inverted { base, .. } => -base.log_derivative(t),
        }
    }

    /// Samples `count` points evenly spaced on [r, R], endpoints included.
    pub fn grid(&self, count: usize) -> Vec<f64> {
        let (r, big_r) = (self.domain.inner(), self.domain.outer());
        let last = count.max(2) - 1;
        (0..=last)
            .map(|k| {
                if k == last {
                    big_r
                } else {
                    r + (big_r - r) * k as f64 / last as f64
                }
            })
            .collect()
    }
}

/// w(t) = t Ḣ(t) / H(t) for `t` in the domain.
pub fn log_derivative(profile: &RadialProfile, t: f64) -> Result<f64> {
    if !profile.domain.contains_radius(t) {
        return Err(Error::invalid("t", format!("{t} is outside the domain radii")));
    }
    Ok(profile.log_derivative(t))
}
