//! Acceptance criteria, each evaluated at its stated tolerance. Every
//! criterion prints one PASS/FAIL line; the process exits nonzero if any
//! criterion fails.

use std::f64::consts::{E, PI};
use std::process::ExitCode;
use std::time::Instant;

use annulus_energy::energy::{
    combined_energy_separable, combined_lower_bound, dirichlet_infimum, quasiradial_energy, radial_energy,
    sphere_conformal_energy, SeparableMap,
};
use annulus_energy::euler_lagrange::{build_radial_minimizer, minimal_radial_energy, psi, solve_w};
use annulus_energy::geometry::Annulus;
use annulus_energy::profiles::{invert_profile, make_boundary_profile, Orientation};
use annulus_energy::quadrature::{integrate_semi_axis, QuadratureConfig};
use annulus_energy::special::gamma;
use annulus_energy::verification::{
    check_power_mean_inequality, perturbed_minimizers, DEFAULT_SEED, SWEEP_EXCESS_THRESHOLD,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type Outcome = (bool, String);
type Criterion = (&'static str, fn() -> Outcome);

fn cfg() -> QuadratureConfig {
    QuadratureConfig::default()
}

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs()
}

fn reference(n: usize) -> (Annulus, Annulus) {
    (Annulus::new(n, 1.0, 2.0).unwrap(), Annulus::new(n, 1.0, E).unwrap())
}

fn sphere_energy_invariance() -> Outcome {
    let start = Instant::now();
    let mut worst = 0.0f64;
    for n in 3..=6 {
        for lambda in [0.1, 0.5, 1.0, 2.0, 10.0] {
            let s = sphere_conformal_energy(lambda, n, &cfg()).unwrap();
            worst = worst.max(rel(s.quadrature.value, s.closed_form));
        }
    }
    let elapsed = start.elapsed().as_secs_f64();
    (
        worst <= 1e-8 && elapsed < 1.0,
        format!("max rel err {worst:.3e} (<= 1e-8), {elapsed:.3} s (< 1 s)"),
    )
}

fn beta_integral_identity() -> Outcome {
    let mut worst = 0.0f64;
    for n in 4..=8i32 {
        let nf = n as f64;
        let closed = PI.sqrt() * gamma((nf - 1.0) / 2.0) / (2f64.powf(nf - 1.0) * gamma(nf / 2.0));
        let q = integrate_semi_axis(|y| y.powi(n - 2) / (1.0 + y * y).powi(n - 1), &cfg()).unwrap();
        worst = worst.max((q.value - closed).abs());
        if n == 4 {
            worst = worst.max((closed - PI / 16.0).abs());
        }
    }
    (worst <= 1e-10, format!("max abs err {worst:.3e} (<= 1e-10)"))
}

fn n3_coincidence() -> Outcome {
    let (d, t) = reference(3);
    let sol = build_radial_minimizer(&d, &t).unwrap();
    let h1 = make_boundary_profile(&d, &t, Orientation::Increasing).unwrap();
    let tau_err = (sol.tau_star - 2.0).abs();
    let e_pi = rel(minimal_radial_energy(&d, &t).unwrap(), 16.0 * PI);
    let e_inf = rel(sol.energy_closed_form, dirichlet_infimum(&d, &t).unwrap());
    let sup = sol
        .profile
        .grid(200)
        .into_iter()
        .map(|s| (sol.profile.value(s) - h1.value(s)).abs())
        .fold(0.0, f64::max);
    let ok = tau_err <= 1e-9 && e_pi <= 1e-9 && e_inf <= 1e-9 && sup <= 1e-9;
    (ok, format!("|tau*-2| {tau_err:.2e}, energy vs 16π {e_pi:.2e}, vs infimum {e_inf:.2e}, sup-norm {sup:.2e} (all <= 1e-9)"))
}

fn combined_equality() -> Outcome {
    let mut worst = 0.0f64;
    for n in 3..=5 {
        let (d, t) = reference(n);
        let h1 = make_boundary_profile(&d, &t, Orientation::Increasing).unwrap();
        for (a, b) in [(1.0, 1.0), (2.0, 3.0)] {
            let bound = combined_lower_bound(a, b, &d, &t).unwrap();
            for lambda in [0.5, 1.0, 4.0] {
                let map = SeparableMap::new(h1.clone(), lambda).unwrap();
                worst = worst.max(rel(
                    combined_energy_separable(a, b, &map, &cfg()).unwrap().energy,
                    bound,
                ));
            }
        }
    }
    (worst <= 1e-8, format!("max rel deviation {worst:.3e} (<= 1e-8)"))
}

fn minimizing_sequence_convergence() -> Outcome {
    let (d, t) = reference(4);
    let h1 = make_boundary_profile(&d, &t, Orientation::Increasing).unwrap();
    let inf = dirichlet_infimum(&d, &t).unwrap();
    let reports: Vec<_> = (0..=10)
        .map(|k| quasiradial_energy(&SeparableMap::new(h1.clone(), 0.5f64.powi(k)).unwrap(), &cfg()).unwrap())
        .collect();
    let nonincreasing = reports
        .windows(2)
        .all(|w| w[1].energy <= w[0].energy + w[0].quadrature_error + w[1].quadrature_error);
    let above = reports.iter().all(|r| r.energy >= inf);
    let excess = (reports[10].energy - inf) / inf;
    let ok = nonincreasing
        && above
        && excess < SWEEP_EXCESS_THRESHOLD
        && SWEEP_EXCESS_THRESHOLD < 0.05
        && (inf - 160.10).abs() < 0.01;
    (
        ok,
        format!(
            "infimum {inf:.6}, nonincreasing {nonincreasing}, above infimum {above}, excess at 2^-10 {excess:.4e} (< {SWEEP_EXCESS_THRESHOLD:e})"
        ),
    )
}

fn quasiradial_strictness() -> Outcome {
    let mut worst = f64::INFINITY;
    for n in [4, 5] {
        let (d, t) = reference(n);
        let h = build_radial_minimizer(&d, &t).unwrap().profile;
        let radial = quasiradial_energy(&SeparableMap::radial(h.clone()), &cfg()).unwrap();
        for lambda in [0.25, 0.5, 2.0, 4.0] {
            let e = quasiradial_energy(&SeparableMap::new(h.clone(), lambda).unwrap(), &cfg()).unwrap();
            let errors = radial.quadrature_error + e.quadrature_error;
            worst = worst.min((radial.energy - e.energy) / errors);
        }
    }
    (worst > 10.0, format!("min margin / summed error {worst:.3e} (> 10)"))
}

fn radial_gap() -> Outcome {
    let mut worst = f64::INFINITY;
    for n in [4, 5, 6] {
        let configs = [
            reference(n),
            (Annulus::new(n, 1.0, 3.0).unwrap(), Annulus::new(n, 2.0, 5.0).unwrap()),
        ];
        for (d, t) in configs {
            let inf = dirichlet_infimum(&d, &t).unwrap();
            let sol = build_radial_minimizer(&d, &t).unwrap();
            let radial = radial_energy(&sol.profile, &cfg()).unwrap();
            let eighth = quasiradial_energy(&SeparableMap::new(sol.profile.clone(), 0.125).unwrap(), &cfg()).unwrap();
            let budget = radial.quadrature_error + eighth.quadrature_error;
            worst = worst
                .min((sol.energy_closed_form - inf) / budget)
                .min((eighth.energy - inf) / budget)
                .min((sol.energy_closed_form - eighth.energy) / budget);
        }
    }
    (worst > 1.0, format!("min margin / tolerance budget {worst:.3e} (> 1)"))
}

fn euler_lagrange_residual() -> Outcome {
    let mut residual = 0.0f64;
    let mut agreement = 0.0f64;
    for n in 3..=6 {
        let (d, t) = reference(n);
        let sol = build_radial_minimizer(&d, &t).unwrap();
        residual = residual.max(sol.residual_max(100));
        agreement = agreement.max(rel(
            radial_energy(&sol.profile, &cfg()).unwrap().energy,
            sol.energy_closed_form,
        ));
    }
    (
        residual <= 1e-8 && agreement <= 1e-8,
        format!("max scaled residual {residual:.3e}, closed form vs quadrature {agreement:.3e} (both <= 1e-8)"),
    )
}

fn symmetry_and_structure() -> Outcome {
    let mut sym = 0.0f64;
    let mut inv = 0.0f64;
    for n in [4, 5] {
        let (d, t) = reference(n);
        let h1 = make_boundary_profile(&d, &t, Orientation::Increasing).unwrap();
        let inverted = invert_profile(&h1, t.inner() * t.outer()).unwrap();
        for lambda in [2.0, 8.0] {
            let a = quasiradial_energy(&SeparableMap::new(h1.clone(), lambda).unwrap(), &cfg()).unwrap();
            let b = quasiradial_energy(&SeparableMap::new(h1.clone(), 1.0 / lambda).unwrap(), &cfg()).unwrap();
            let c = quasiradial_energy(&SeparableMap::new(inverted.clone(), lambda).unwrap(), &cfg()).unwrap();
            sym = sym.max(rel(a.energy, b.energy));
            inv = inv.max(rel(c.energy, a.energy));
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(DEFAULT_SEED);
    let mut psi_bad = 0;
    let mut w_bad = 0;
    for _ in 0..1000 {
        let n = rng.gen_range(3..=10);
        let r: f64 = rng.gen_range(0.2..5.0);
        let big_r = r * (1.0 + rng.gen_range(0.05..4.0));
        let tau1 = 10f64.powf(rng.gen_range(-3.0..3.0));
        let tau2 = tau1 * (1.0 + rng.gen_range(1e-3..1.0));
        if psi(r, big_r, tau2, n).unwrap() <= psi(r, big_r, tau1, n).unwrap() {
            psi_bad += 1;
        }
        let t1: f64 = rng.gen_range(0.1..10.0);
        let t2 = t1 * (1.0 + rng.gen_range(1e-3..1.0));
        if solve_w(t2, tau1, n).unwrap() >= solve_w(t1, tau1, n).unwrap() {
            w_bad += 1;
        }
    }
    let power = check_power_mean_inequality(10_000, DEFAULT_SEED);
    let ok = sym <= 1e-8 && inv <= 1e-8 && psi_bad == 0 && w_bad == 0 && power.passed;
    (
        ok,
        format!(
            "λ-symmetry {sym:.2e}, inversion {inv:.2e} (<= 1e-8); ψ violations {psi_bad}, w violations {w_bad} of 1000; power-mean worst {:.2e} (<= 1e-15)",
            power.measured
        ),
    )
}

fn radial_local_optimality() -> Outcome {
    let mut worst = f64::INFINITY;
    for n in [4, 5] {
        let (d, t) = reference(n);
        let min = minimal_radial_energy(&d, &t).unwrap();
        let perturbed = perturbed_minimizers(&d, &t, 20, DEFAULT_SEED + n as u64).unwrap();
        assert_eq!(perturbed.len(), 20);
        for p in perturbed {
            let e = radial_energy(&p, &cfg()).unwrap();
            let budget = e.quadrature_error + cfg().tolerance_for(min);
            worst = worst.min((e.energy - min) / budget);
        }
    }
    (
        worst > 1.0,
        format!("min (E - E_min) / budget {worst:.3e} over 20 perturbations per n (> 1)"),
    )
}

fn main() -> ExitCode {
    let criteria: [Criterion; 10] = [
        ("1 sphere-energy invariance", sphere_energy_invariance),
        ("2 beta-integral identity", beta_integral_identity),
        ("3 n=3 closed-form coincidence", n3_coincidence),
        ("4 combined-energy equality case", combined_equality),
        ("5 minimizing-sequence convergence", minimizing_sequence_convergence),
        ("6 quasiradial strictness", quasiradial_strictness),
        ("7 radial/quasiradial gap", radial_gap),
        ("8 Euler-Lagrange residual", euler_lagrange_residual),
        ("9 symmetry and structure", symmetry_and_structure),
        ("10 radial local optimality", radial_local_optimality),
    ];
    let mut failed = Vec::new();
    for (name, run) in criteria {
        let (ok, detail) = run();
        println!("{} {name}: {detail}", if ok { "PASS" } else { "FAIL" });
        if !ok {
            failed.push(name);
        }
    }
    if failed.is_empty() {
        println!("acceptance: 10 of 10 criteria passed");
        ExitCode::SUCCESS
    } else {
        println!("acceptance: failed criteria {failed:?}");
        ExitCode::FAILURE
    }
}
