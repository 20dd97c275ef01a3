//! Radial minimization: the implicit first integral w(n-1+w²)^{(n-3)/2} = τ/t
//! of the Euler–Lagrange equation, the boundary-matching multiplier τ_*,
//! and the resulting minimizer H_*.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{unit_sphere_measure, Annulus};
use crate::profiles::RadialProfile;

const MAX_NEWTON_ITERATIONS: usize = 200;
const MAX_BISECTIONS: usize = 400;
/// Acceptance for |φ(w) - τ/t| relative to τ/t.
pub const SOLVE_W_TOL: f64 = 1e-13;
/// Acceptance for |ψ(τ) - log(R_*/r_*)| relative to log(R_*/r_*).
pub const TAU_STAR_TOL: f64 = 1e-12;

/// φ(w) = w (n - 1 + w²)^{(n-3)/2}.
pub fn phi_of_w(w: f64, n: usize) -> f64 {
    let m = (n - 1) as f64;
    if n == 3 {
        return w;
    }
    w * (m + w * w).powf((n as f64 - 3.0) / 2.0)
}

/// φ'(w) = (n - 1 + w²)^{(n-5)/2} (n - 1 + (n - 2) w²).
pub fn phi_prime(w: f64, n: usize) -> f64 {
    let m = (n - 1) as f64;
    let w2 = w * w;
    (m + w2).powf((n as f64 - 5.0) / 2.0) * (m + (n as f64 - 2.0) * w2)
}

/// G(w) = -(n-2) w + (n-3)√(n-1) arctan(w/√(n-1)); H = κ exp(G(w(t))).
pub(crate) fn el_log_profile(w: f64, n: usize) -> f64 {
    let s = ((n - 1) as f64).sqrt();
    -(n as f64 - 2.0) * w + (n as f64 - 3.0) * s * (w / s).atan()
}

struct RootOfPhi {
    w: f64,
    residual: f64,
    iterations: usize,
}

/// Bracketed Newton iteration for φ(w) = v on [0, w_hi]; Newton steps that
/// leave the bracket are replaced by bisection.
fn root_of_phi(v: f64, n: usize) -> RootOfPhi {
    if n == 3 || v == 0.0 {
        return RootOfPhi {
            w: v,
            residual: 0.0,
            iterations: 0,
        };
    }
    let m = (n - 1) as f64;
    let linear = v / m.powf((n as f64 - 3.0) / 2.0);
    let power = v.powf(1.0 / (n as f64 - 2.0));
    // φ(w) ≥ w (n-1)^{(n-3)/2} and φ(w) ≥ w^{n-2}, so the root is below both.
    let (mut lo, mut hi) = (0.0f64, linear.max(power) + 1.0);
    let mut w = linear.min(power);
    let mut best = RootOfPhi {
        w,
        residual: f64::INFINITY,
        iterations: 0,
    };
    for it in 1..=MAX_NEWTON_ITERATIONS {
        let f = phi_of_w(w, n) - v;
        if f.abs() < best.residual {
            best = RootOfPhi {
                w,
                residual: f.abs(),
                iterations: it,
            };
        }
        if f == 0.0 {
            break;
        }
        if f > 0.0 {
            hi = hi.min(w);
        } else {
            lo = lo.max(w);
        }
        let newton = w - f / phi_prime(w, n);
        let next = if newton > lo && newton < hi {
            newton
        } else {
            0.5 * (lo + hi)
        };
        if (next - w).abs() <= 2.0 * f64::EPSILON * w.abs() || hi - lo <= 2.0 * f64::EPSILON * hi {
            let f_next = phi_of_w(next, n) - v;
            if f_next.abs() < best.residual {
                best = RootOfPhi {
                    w: next,
                    residual: f_next.abs(),
                    iterations: it,
                };
            }
            break;
        }
        w = next;
    }
    best
}

/// The unique w > 0 with φ(w) = τ/t.
pub fn solve_w(t: f64, tau: f64, n: usize) -> Result<f64> {
    if !(t.is_finite() && t > 0.0) {
        return Err(Error::invalid("t", format!("must be positive, got {t}")));
    }
    if !(tau.is_finite() && tau > 0.0) {
        return Err(Error::invalid("tau", format!("must be positive, got {tau}")));
    }
    if n < 3 {
        return Err(Error::invalid("n", format!("must be >= 3, got {n}")));
    }
    let v = tau / t;
    let root = root_of_phi(v, n);
    if root.residual > SOLVE_W_TOL * v {
        return Err(Error::SolverNonConvergence {
            solver: "solve_w",
            iterations: root.iterations,
            residual: root.residual / v,
        });
    }
    Ok(root.w)
}

/// Best root of φ(w) = τ/t without the convergence check, for inputs that
/// are already known to be valid.
pub(crate) fn solve_w_unchecked(t: f64, tau: f64, n: usize) -> f64 {
    root_of_phi(tau / t, n).w
}

/// ψ(r, R, τ) = log(H(R)/H(r)) for the solution family with multiplier τ.
pub fn psi(r: f64, big_r: f64, tau: f64, n: usize) -> Result<f64> {
    if !(r > 0.0 && r < big_r && big_r.is_finite()) {
        return Err(Error::invalid("r", format!("need 0 < r < R, got r = {r}, R = {big_r}")));
    }
    let w_r = solve_w(r, tau, n)?;
    let w_big = solve_w(big_r, tau, n)?;
    let s = ((n - 1) as f64).sqrt();
    Ok((n as f64 - 2.0) * (w_r - w_big) + (n as f64 - 3.0) * s * ((w_big / s).atan() - (w_r / s).atan()))
}

fn check_pair(domain: &Annulus, target: &Annulus) -> Result<()> {
    if domain.n() != target.n() {
        return Err(Error::invalid(
            "target",
            format!("dimension {} differs from domain dimension {}", target.n(), domain.n()),
        ));
    }
    Ok(())
}

/// The unique τ_* > 0 with ψ(r, R, τ_*) = log(R_*/r_*), by bisection.
pub fn solve_tau_star(domain: &Annulus, target: &Annulus) -> Result<f64> {
    check_pair(domain, target)?;
    let n = domain.n();
    let (r, big_r) = (domain.inner(), domain.outer());
    let goal = target.log_ratio();
    let nf = n as f64;
    let p = 1.0 / (nf - 2.0);
    // Seeds from the small-τ linearization and the large-τ power law.
    let small = goal * ((nf - 1.0).powf((nf - 3.0) / 2.0)) / (1.0 / r - 1.0 / big_r);
    let large = (goal / ((nf - 2.0) * (r.powf(-p) - big_r.powf(-p)))).powf(nf - 2.0);
    let g = |tau: f64| psi(r, big_r, tau, n).map(|v| v - goal);
    let mut lo = small.min(large);
    let mut hi = small.max(large);
    let mut g_lo = g(lo)?;
    if g_lo == 0.0 {
        return Ok(lo);
    }
    while g_lo > 0.0 {
        hi = lo;
        lo *= 0.5;
        g_lo = g(lo)?;
    }
    let mut g_hi = g(hi)?;
    while g_hi < 0.0 {
        lo = hi;
        hi *= 2.0;
        g_hi = g(hi)?;
    }
    if g_hi == 0.0 {
        return Ok(hi);
    }
    let tol = TAU_STAR_TOL * goal;
    let mut best = if g_lo.abs() < g_hi.abs() {
        (lo, g_lo)
    } else {
        (hi, g_hi)
    };
    for _ in 0..MAX_BISECTIONS {
        if best.1.abs() <= tol {
            return Ok(best.0);
        }
        let mid = if hi > 2.0 * lo {
            (lo * hi).sqrt()
        } else {
            0.5 * (lo + hi)
        };
        if mid <= lo || mid >= hi {
            break;
        }
        let g_mid = g(mid)?;
        if g_mid.abs() < best.1.abs() {
            best = (mid, g_mid);
        }
        if g_mid < 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    if best.1.abs() <= tol {
        Ok(best.0)
    } else {
        Err(Error::SolverNonConvergence {
            solver: "solve_tau_star",
            iterations: MAX_BISECTIONS,
            residual: best.1.abs() / goal,
        })
    }
}

/// The Euler–Lagrange minimizer H_* among increasing radial profiles.
#[derive(Debug, Clone, PartialEq)]
pub struct ElSolution {
    pub domain: Annulus,
    pub target: Annulus,
    pub tau_star: f64,
    pub kappa_star: f64,
    pub profile: RadialProfile,
    pub energy_closed_form: f64,
}

impl ElSolution {
    /// w_*(t) = t Ḣ_*(t) / H_*(t).
    pub fn w_at(&self, t: f64) -> f64 {
        solve_w_unchecked(t, self.tau_star, self.domain.n())
    }

    /// Largest scaled residual over `points` evenly spaced radii.
    pub fn residual_max(&self, points: usize) -> f64 {
        self.profile
            .grid(points)
            .into_iter()
            .map(|t| el_residual(&self.profile, t).scaled().abs())
            .fold(0.0, f64::max)
    }

    pub fn summary(&self) -> ElSummary {
        ElSummary {
            n: self.domain.n(),
            r: self.domain.inner(),
            big_r: self.domain.outer(),
            r_star: self.target.inner(),
            big_r_star: self.target.outer(),
            tau_star: self.tau_star,
            kappa_star: self.kappa_star,
            energy_closed_form: self.energy_closed_form,
            residual_max: self.residual_max(100),
        }
    }
}

/// Serializable digest of an [`ElSolution`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ElSummary {
    pub n: usize,
    pub r: f64,
    #[serde(rename = "R")]
    pub big_r: f64,
    pub r_star: f64,
    #[serde(rename = "R_star")]
    pub big_r_star: f64,
    pub tau_star: f64,
    pub kappa_star: f64,
    pub energy_closed_form: f64,
    pub residual_max: f64,
}

fn closed_form_energy(domain: &Annulus, tau: f64, w_r: f64, w_big: f64) -> Result<f64> {
    let n = domain.n();
    let m = (n - 1) as f64;
    let e = m / 2.0;
    let omega = unit_sphere_measure(n)?;
    let (r, big_r) = (domain.inner(), domain.outer());
    Ok(omega * (big_r * (w_big * w_big + m).powf(e) - r * (w_r * w_r + m).powf(e) - tau * m * (w_big - w_r)))
}

pub fn build_radial_minimizer(domain: &Annulus, target: &Annulus) -> Result<ElSolution> {
    let tau_star = solve_tau_star(domain, target)?;
    let n = domain.n();
    let w_r = solve_w(domain.inner(), tau_star, n)?;
    let w_big = solve_w(domain.outer(), tau_star, n)?;
    let kappa_star = target.inner() * (-el_log_profile(w_r, n)).exp();
    Ok(ElSolution {
        domain: *domain,
        target: *target,
        tau_star,
        kappa_star,
        profile: RadialProfile::el_minimizer(*domain, *target, tau_star, kappa_star),
        energy_closed_form: closed_form_energy(domain, tau_star, w_r, w_big)?,
    })
}

/// Minimal radial energy H[H_*], in closed form.
pub fn minimal_radial_energy(domain: &Annulus, target: &Annulus) -> Result<f64> {
    let tau = solve_tau_star(domain, target)?;
    let n = domain.n();
    closed_form_energy(
        domain,
        tau,
        solve_w(domain.inner(), tau, n)?,
        solve_w(domain.outer(), tau, n)?,
    )
}

/// Left-hand side of w³ + (n-1)w + t ẇ((n-1) + (n-2)w²) = 0 and its natural scale.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ElResidual {
    pub raw: f64,
    pub scale: f64,
}

impl ElResidual {
    pub fn scaled(&self) -> f64 {
        if self.scale == 0.0 {
            self.raw
        } else {
            self.raw / self.scale
        }
    }
}

/// Euler–Lagrange residual of `profile` at radius `t`. For the minimizer ẇ
/// comes from implicit differentiation; otherwise from finite differences
/// of w with step 1e-5·t (one-sided at the domain ends).
pub fn el_residual(profile: &RadialProfile, t: f64) -> ElResidual {
    let n = profile.n();
    let nf = n as f64;
    let w = profile.log_derivative(t);
    let w_dot = match profile.el_parameters() {
        Some((tau, _)) => -(tau / (t * t)) / phi_prime(w, n),
        None => {
            let h = 1e-5 * t;
            let (r, big_r) = (profile.domain().inner(), profile.domain().outer());
            let w_at = |s: f64| profile.log_derivative(s);
            if t - h < r {
                (-3.0 * w + 4.0 * w_at(t + h) - w_at(t + 2.0 * h)) / (2.0 * h)
            } else if t + h > big_r {
                (3.0 * w - 4.0 * w_at(t - h) + w_at(t - 2.0 * h)) / (2.0 * h)
            } else {
                (w_at(t + h) - w_at(t - h)) / (2.0 * h)
            }
        }
    };
    ElResidual {
        raw: w * w * w + (nf - 1.0) * w + t * w_dot * ((nf - 1.0) + (nf - 2.0) * w * w),
        scale: (nf - 1.0) * w.abs() + w.abs().powi(3),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::profiles::{make_boundary_profile, Orientation};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;
    use std::f64::consts::{E, PI};

    fn annuli(n: usize) -> (Annulus, Annulus) {
        (Annulus::new(n, 1.0, 2.0).unwrap(), Annulus::new(n, 1.0, E).unwrap())
    }

    #[test]
    fn phi_examples() {
        for w in [0.0, 0.3, 5.0] {
            assert_eq!(phi_of_w(w, 3), w);
        }
        assert!((phi_of_w(1.0, 4) - 2.0).abs() < 1e-15);
        assert!((phi_of_w(1.0, 5) - 5.0).abs() < 1e-14);
        assert_eq!(phi_of_w(0.0, 7), 0.0);
    }

    #[test]
    fn phi_prime_matches_finite_difference() {
        for n in 3..10 {
            for &w in &[0.01, 0.5, 1.0, 3.0, 20.0] {
                let h = 1e-6 * w;
                let fd = (phi_of_w(w + h, n) - phi_of_w(w - h, n)) / (2.0 * h);
                assert!((fd - phi_prime(w, n)).abs() < 1e-7 * fd, "n={n} w={w}");
            }
        }
    }

    #[test]
    fn solve_w_examples() {
        assert_eq!(solve_w(2.0, 3.0, 3).unwrap(), 1.5);
        assert!((solve_w(1.0, 2.0, 4).unwrap() - 1.0).abs() < 1e-15);
        assert!((solve_w(3.0, 6.0, 4).unwrap() - 1.0).abs() < 1e-15);
        assert!(solve_w(0.0, 1.0, 4).is_err());
        assert!(solve_w(1.0, -1.0, 4).is_err());
    }

    #[test]
    fn solve_w_round_trip_and_scale_covariance() {
        let mut rng = ChaCha8Rng::seed_from_u64(17);
        for _ in 0..1000 {
            let n = rng.gen_range(3..=30);
            let t = 10f64.powf(rng.gen_range(-2.0..2.0));
            let tau = 10f64.powf(rng.gen_range(-4.0..4.0));
            let w = solve_w(t, tau, n).unwrap();
            assert!((t * phi_of_w(w, n) / tau - 1.0).abs() < 1e-12, "n={n} t={t} tau={tau}");
            let c = 10f64.powf(rng.gen_range(-1.0..1.0));
            let wc = solve_w(c * t, c * tau, n).unwrap();
            assert!((wc - w).abs() <= 1e-12 * w);
        }
    }

    #[test]
    fn w_decreasing_in_t() {
        let mut rng = ChaCha8Rng::seed_from_u64(19);
        for _ in 0..1000 {
            let n = rng.gen_range(3..=12);
            let tau = 10f64.powf(rng.gen_range(-3.0..3.0));
            let t1 = rng.gen_range(0.1..5.0);
            let t2 = t1 * rng.gen_range(1.001..3.0);
            assert!(solve_w(t2, tau, n).unwrap() < solve_w(t1, tau, n).unwrap());
        }
    }

    #[test]
    fn psi_examples_and_asymptotics() {
        for tau in [0.1, 1.0, 7.0] {
            assert!((psi(1.0, 2.0, tau, 3).unwrap() - tau / 2.0).abs() < 1e-15);
        }
        for n in 4..8 {
            let nf = n as f64;
            let tau = 1e-6;
            let lin = tau * 0.5 / (nf - 1.0).powf((nf - 3.0) / 2.0);
            assert!((psi(1.0, 2.0, tau, n).unwrap() / lin - 1.0).abs() < 1e-5);
            let tau = 1e12f64;
            let p = 1.0 / (nf - 2.0);
            let pow = (nf - 2.0) * (tau.powf(p) - (tau / 2.0).powf(p));
            let rel = (psi(1.0, 2.0, tau, n).unwrap() - pow).abs() / pow;
            assert!(rel < 0.05, "n={n} rel={rel}");
        }
        assert!(psi(2.0, 1.0, 1.0, 4).is_err());
    }

    #[test]
    fn psi_strictly_increasing_in_tau() {
        let mut rng = ChaCha8Rng::seed_from_u64(23);
        for _ in 0..1000 {
            let n = rng.gen_range(3..=12);
            let r = rng.gen_range(0.1..3.0);
            let big_r = r * rng.gen_range(1.01..5.0);
            let t1 = 10f64.powf(rng.gen_range(-3.0..3.0));
            let t2 = t1 * rng.gen_range(1.001..10.0);
            assert!(psi(r, big_r, t2, n).unwrap() > psi(r, big_r, t1, n).unwrap());
        }
    }

    #[test]
    fn tau_star_n3_closed_form() {
        let (d, t) = annuli(3);
        let tau = solve_tau_star(&d, &t).unwrap();
        assert!((tau - 2.0).abs() < 1e-12);
    }

    #[test]
    fn tau_star_n4_matches_tabulation() {
        let (d, t) = annuli(4);
        let tau = solve_tau_star(&d, &t).unwrap();
        // Brute-force tabulation: bracket the crossing of ψ = 1 on a grid.
        let step = 1e-4;
        let mut k = 1;
        while psi(1.0, 2.0, k as f64 * step, 4).unwrap() < 1.0 {
            k += 1;
        }
        assert!(tau > (k - 1) as f64 * step && tau <= k as f64 * step);
        assert!((psi(1.0, 2.0, tau, 4).unwrap() - 1.0).abs() <= 1e-12);
    }

    #[test]
    fn tau_star_shrinks_with_target() {
        let d = Annulus::new(5, 1.0, 2.0).unwrap();
        let mut prev = f64::INFINITY;
        for eps in [1.0, 1e-2, 1e-4, 1e-6] {
            let t = Annulus::new(5, 1.0, 1.0 + eps).unwrap();
            let tau = solve_tau_star(&d, &t).unwrap();
            assert!(tau > 0.0 && tau < prev);
            prev = tau;
        }
        assert!(prev < 1e-4);
    }

    #[test]
    fn n3_minimizer_is_boundary_profile() {
        let (d, t) = annuli(3);
        let sol = build_radial_minimizer(&d, &t).unwrap();
        assert!((sol.kappa_star - E * E).abs() < 1e-11);
        let h1 = make_boundary_profile(&d, &t, Orientation::Increasing).unwrap();
        for s in sol.profile.grid(200) {
            assert!((sol.profile.value(s) - h1.value(s)).abs() < 1e-9);
            assert!((sol.profile.value(s) - (2.0 - 2.0 / s).exp()).abs() < 1e-9);
        }
        assert!((sol.energy_closed_form - 16.0 * PI).abs() < 1e-9 * 16.0 * PI);
        assert!((minimal_radial_energy(&d, &t).unwrap() - 16.0 * PI).abs() < 1e-9 * 16.0 * PI);
    }

    #[test]
    fn minimizer_boundary_values_and_monotonicity() {
        for n in 3..=8 {
            for (r, big_r, rs, big_rs) in [(1.0, 2.0, 1.0, E), (1.0, 3.0, 2.0, 5.0), (0.5, 0.7, 3.0, 30.0)] {
                let d = Annulus::new(n, r, big_r).unwrap();
                let t = Annulus::new(n, rs, big_rs).unwrap();
                let sol = build_radial_minimizer(&d, &t).unwrap();
                let h = &sol.profile;
                assert!((h.value(r) - rs).abs() <= 1e-10 * rs);
                assert!((h.value(big_r) - big_rs).abs() <= 1e-10 * big_rs);
                let grid = h.grid(200);
                for pair in grid.windows(2) {
                    assert!(h.value(pair[1]) > h.value(pair[0]));
                    assert!(sol.w_at(pair[1]) < sol.w_at(pair[0]));
                }
                for &s in &grid {
                    let rel = (s * phi_of_w(sol.w_at(s), n) / sol.tau_star - 1.0).abs();
                    assert!(rel < 1e-10);
                }
            }
        }
    }

    #[test]
    fn residuals() {
        for n in 3..=6 {
            let (d, t) = annuli(n);
            let sol = build_radial_minimizer(&d, &t).unwrap();
            assert!(sol.residual_max(100) <= 1e-8, "n={n}");
        }
        let (d, t) = annuli(3);
        let h1 = make_boundary_profile(&d, &t, Orientation::Increasing).unwrap();
        for s in h1.grid(100) {
            assert!(el_residual(&h1, s).scaled().abs() <= 1e-8);
        }
        let (d, t) = annuli(4);
        let h1 = make_boundary_profile(&d, &t, Orientation::Increasing).unwrap();
        for s in h1.grid(12).into_iter().skip(1).take(10) {
            assert!(el_residual(&h1, s).scaled().abs() > 1e-3, "t={s}");
        }
    }

    #[test]
    fn summary_serializes_with_expected_keys() {
        let (d, t) = annuli(4);
        let json = serde_json::to_value(build_radial_minimizer(&d, &t).unwrap().summary()).unwrap();
        for key in [
            "n",
            "r",
            "R",
            "r_star",
            "R_star",
            "tau_star",
            "kappa_star",
            "energy_closed_form",
            "residual_max",
        ] {
            assert!(json.get(key).is_some(), "missing {key}");
        }
    }
}
