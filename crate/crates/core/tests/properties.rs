use std::f64::consts::PI;

use annulus_energy::energy::{dirichlet_infimum, quasiradial_energy, radial_energy, SeparableMap};
use annulus_energy::euler_lagrange::{phi_of_w, psi, solve_w};
use annulus_energy::geometry::{
    conformal_map_cartesian, conformal_map_point, meridian_dilation, stereographic_inverse, stereographic_project,
    Annulus, ZonalPoint,
};
use annulus_energy::profiles::{make_boundary_profile, make_tabulated_profile, MonotoneCubic, Orientation};
use annulus_energy::quadrature::QuadratureConfig;
use proptest::prelude::*;

fn unit_vector(raw: &[f64]) -> Option<Vec<f64>> {
    let norm = raw.iter().map(|x| x * x).sum::<f64>().sqrt();
    (norm > 1e-3).then(|| raw.iter().map(|x| x / norm).collect())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn dilation_composition_law(theta in 0.0..PI, l in 0.05f64..20.0, m in 0.05f64..20.0) {
        let lhs = meridian_dilation(theta, l * m);
        let rhs = meridian_dilation(meridian_dilation(theta, m), l);
        prop_assert!((lhs - rhs).abs() < 1e-12);
        let back = meridian_dilation(meridian_dilation(theta, l), 1.0 / l);
        prop_assert!((back - theta).abs() < 1e-12);
    }

    #[test]
    fn conformal_map_paths_agree(theta in 0.01..(PI - 0.01), raw in prop::collection::vec(-1.0f64..1.0, 3), l in 0.1f64..10.0) {
        let Some(s) = unit_vector(&raw) else { return Ok(()); };
        let xi = ZonalPoint::new(theta, s).unwrap();
        let a = conformal_map_point(&xi, l).to_cartesian();
        let b = conformal_map_cartesian(&xi.to_cartesian(), l);
        for (x, y) in a.iter().zip(&b) {
            prop_assert!((x - y).abs() < 1e-12);
        }
    }

    #[test]
    fn stereographic_round_trip(raw in prop::collection::vec(-1.0f64..1.0, 4)) {
        let Some(x) = unit_vector(&raw) else { return Ok(()); };
        let back = stereographic_inverse(&stereographic_project(&x), 4);
        for (a, b) in x.iter().zip(&back) {
            prop_assert!((a - b).abs() < 1e-12);
        }
    }

    #[test]
    fn solve_w_round_trip_and_scale(t in 0.05f64..20.0, log_tau in -4.0f64..4.0, n in 3usize..=12, c in 0.1f64..10.0) {
        let tau = 10f64.powf(log_tau);
        let w = solve_w(t, tau, n).unwrap();
        prop_assert!(((t * phi_of_w(w, n) - tau) / tau).abs() < 1e-12);
        let scaled = solve_w(c * t, c * tau, n).unwrap();
        prop_assert!((scaled - w).abs() <= 1e-12 * w.max(1.0));
    }

    #[test]
    fn psi_strictly_increasing(r in 0.1f64..5.0, grow in 0.05f64..5.0, log_tau in -3.0f64..3.0, step in 1e-3f64..2.0, n in 3usize..=10) {
        let big_r = r * (1.0 + grow);
        let tau = 10f64.powf(log_tau);
        prop_assert!(psi(r, big_r, tau * (1.0 + step), n).unwrap() > psi(r, big_r, tau, n).unwrap());
    }

    #[test]
    fn monotone_cubic_stays_monotone(mut steps in prop::collection::vec(0.01f64..1.0, 3..20), mut rises in prop::collection::vec(1e-4f64..5.0, 3..20)) {
        let k = steps.len().min(rises.len());
        steps.truncate(k);
        rises.truncate(k);
        let mut xs = vec![0.0];
        let mut ys = vec![0.0];
        for i in 0..k {
            xs.push(xs[i] + steps[i]);
            ys.push(ys[i] + rises[i]);
        }
        let last = *xs.last().unwrap();
        let spline = MonotoneCubic::new(xs.clone(), ys.clone()).unwrap();
        let mut prev = spline.value(0.0);
        for j in 1..=400 {
            let x = last * j as f64 / 400.0;
            let v = spline.value(x);
            prop_assert!(v >= prev - 1e-12);
            prop_assert!(spline.derivative(x) >= -1e-12);
            prev = v;
        }
        for (x, y) in xs.iter().zip(&ys) {
            prop_assert!((spline.value(*x) - y).abs() < 1e-12);
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn quasiradial_energy_dominates_infimum(n in 3usize..=6, log_l in -3.0f64..3.0, big_r in 1.2f64..4.0, big_r_star in 1.2f64..6.0) {
        let d = Annulus::new(n, 1.0, big_r).unwrap();
        let t = Annulus::new(n, 1.0, big_r_star).unwrap();
        let cfg = QuadratureConfig::default();
        let h = make_boundary_profile(&d, &t, Orientation::Increasing).unwrap();
        let lambda = 2f64.powf(log_l);
        let e = quasiradial_energy(&SeparableMap::new(h.clone(), lambda).unwrap(), &cfg).unwrap();
        let inf = dirichlet_infimum(&d, &t).unwrap();
        prop_assert!(e.energy >= inf - e.quadrature_error - cfg.tolerance_for(inf));
        prop_assert!(e.relative_gap >= -1e-9);
        let mirror = quasiradial_energy(&SeparableMap::new(h.clone(), 1.0 / lambda).unwrap(), &cfg).unwrap();
        prop_assert!((e.energy - mirror.energy).abs() <= 1e-8 * e.energy);
        if n >= 4 && (lambda - 1.0).abs() > 0.05 {
            prop_assert!(e.energy < radial_energy(&h, &cfg).unwrap().energy);
        }
    }

    #[test]
    fn tabulated_profiles_obey_bounds(n in 3usize..=6, bend in -0.3f64..0.3, big_r_star in 1.5f64..4.0) {
        let d = Annulus::new(n, 1.0, 2.0).unwrap();
        let t = Annulus::new(n, 1.0, big_r_star).unwrap();
        let log_ratio = t.log_ratio();
        // log H(s) = L·g(s) with g increasing from 0 to 1.
        let knots: Vec<(f64, f64)> = (0..=30)
            .map(|k| {
                let u = k as f64 / 30.0;
                let g = u + bend * u * (1.0 - u);
                (1.0 + u, (log_ratio * g).exp())
            })
            .collect();
        let h = make_tabulated_profile(&knots, &d, &t).unwrap();
        let cfg = QuadratureConfig::default();
        let e = radial_energy(&h, &cfg).unwrap();
        prop_assert!(e.energy >= dirichlet_infimum(&d, &t).unwrap() - e.quadrature_error);
    }
}
