use std::f64::consts::PI;

use proptest::prelude::*;
use vssc::analysis::{key_lemma_table, sample_points};
use vssc::checkpoint::{read_checkpoint, write_checkpoint};
use vssc::dynamics::{extremal_u1_with, interp_strip, Side, VelocityGrid};
use vssc::elliptic::{
    biot_savart, solve_poisson_torus, GreensOptions, GreensOracle, HarmonicExtension, SpectralWorkspace,
};
use vssc::initdata::{epsilon_gate, initial_vorticity, kinetic_energy, make_velocity, ProfileSpec, build_profile};
use vssc::{Parity, ParityClass, ScalarField, SimParams, TorusGrid};

fn odd_x1() -> ParityClass {
    ParityClass::new(Parity::Odd, Parity::None)
}

/// `sum a sin(pi k x1) sin(pi l x2)`, odd in `x1`, zero on both walls.
fn modal(grid: TorusGrid, modes: &[(usize, usize, f64)], parity: ParityClass) -> ScalarField {
    ScalarField::from_fn(grid, parity, |x, y| {
        modes.iter().map(|&(k, l, a)| a * (PI * k as f64 * x).sin() * (PI * l as f64 * y).sin()).sum()
    })
    .unwrap()
}

fn modes() -> impl Strategy<Value = Vec<(usize, usize, f64)>> {
    proptest::collection::vec((1usize..=4, 1usize..=4, -1.0f64..1.0), 1..4)
        .prop_filter("nonzero", |m| m.iter().any(|t| t.2.abs() > 0.05))
}

fn sine_modes() -> impl Strategy<Value = Vec<(usize, f64)>> {
    proptest::collection::vec((1usize..=3, -1.0f64..1.0), 1..3)
        .prop_filter("nonzero", |m| m.iter().any(|t| t.1.abs() > 0.05))
}

/// `int_strip grad Phi . grad F` with `Phi` the Dirichlet stream function of
/// `omega` and `F` the harmonic extension, plus both squared norms (trapezoid in `x2`).
fn inner_products(n: usize, omega: &[(usize, usize, f64)], f: &HarmonicExtension) -> (f64, f64, f64, f64) {
    let g = TorusGrid::strip(n, n).unwrap();
    let w = modal(g, omega, odd_x1());
    let mut ws = SpectralWorkspace::new(&g);
    let u = biot_savart(&mut ws, &w).unwrap();
    let rows = g.rows();
    let (mut ip, mut pp, mut ff, mut total) = (0.0, 0.0, 0.0, 0.0);
    for j in 0..rows {
        let wj = if j == 0 || j == rows - 1 { 0.5 } else { 1.0 };
        for i in 0..n {
            let d = f.derivatives(g.x1(i), g.x2(j));
            // grad Phi = (-u2, u1), e = (d2 F, -d1 F)
            let (p1, p2) = (-u.c2.get(i, j), u.c1.get(i, j));
            let (s1, s2) = (u.c1.get(i, j) + d[2], u.c2.get(i, j) - d[1]);
            ip += wj * (p1 * d[1] + p2 * d[2]);
            pp += wj * (p1 * p1 + p2 * p2);
            ff += wj * (d[1] * d[1] + d[2] * d[2]);
            total += wj * (s1 * s1 + s2 * s2);
        }
    }
    let c = g.h1() * g.h2();
    (ip * c, pp * c, ff * c, total * c)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn grad_sup_scales_with_the_field(values in proptest::collection::vec(-3.0f64..3.0, 16 * 9), e in -6i32..6, c in -10.0f64..10.0) {
        let f = ScalarField::new(TorusGrid::strip(16, 16).unwrap(), values, ParityClass::NONE).unwrap();
        let g0 = f.grad_sup().value;
        let p = 2f64.powi(e);
        for s in [p, -p] {
            prop_assert_eq!(f.scaled(s).grad_sup().value, p * g0);
        }
        let gc = f.scaled(c).grad_sup().value;
        prop_assert!((gc - c.abs() * g0).abs() <= 4.0 * f64::EPSILON * c.abs() * g0, "{} vs {}", gc, c.abs() * g0);
    }

    #[test]
    fn poisson_then_laplacian_round_trips(values in proptest::collection::vec(-1.0f64..1.0, 32 * 32)) {
        let g = TorusGrid::doubled(32, 32).unwrap();
        let mean = values.iter().sum::<f64>() / values.len() as f64;
        let w = ScalarField::new(g, values.iter().map(|v| v - mean).collect(), ParityClass::NONE).unwrap();
        let mut ws = SpectralWorkspace::new(&g);
        let psi = solve_poisson_torus(&mut ws, &w).unwrap();
        let mut lap = vec![0.0; g.len()];
        ws.laplacian(psi.values(), &mut lap);
        let err = lap.iter().zip(w.values()).fold(0.0f64, |m, (a, b)| m.max((a - b).abs()));
        prop_assert!(err <= 1e-12 * w.linf(), "{err:e}");
    }

    #[test]
    fn velocity_parity_is_exact(values in proptest::collection::vec(-1.0f64..1.0, 32 * 17)) {
        let g = TorusGrid::strip(32, 32).unwrap();
        let w = ScalarField::new(g, values, odd_x1()).unwrap().symmetrized();
        prop_assert_eq!(w.parity_violation(), 0.0);
        let mut ws = SpectralWorkspace::new(&g);
        let u = biot_savart(&mut ws, &w).unwrap();
        prop_assert_eq!(u.parity_violation(), 0.0);
        prop_assert_eq!(u.c1.parity().x1, Parity::Odd);
        prop_assert_eq!(u.c2.parity().x1, Parity::Even);
        let (top, n1) = (g.rows() - 1, g.n1());
        prop_assert!(u.c2.values()[..n1].iter().chain(&u.c2.values()[top * n1..]).all(|v| *v == 0.0));
    }

    #[test]
    fn checkpoints_round_trip_bitwise(values in proptest::collection::vec(-1e3f64..1e3, 16 * 9), t in 0.0f64..100.0, eps in 1e-3f64..2.0) {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("c.vssc");
        let f = ScalarField::new(TorusGrid::strip(16, 16).unwrap(), values, odd_x1()).unwrap();
        write_checkpoint(&p, &f, t, eps).unwrap();
        let c = read_checkpoint(&p).unwrap();
        prop_assert_eq!(c.t.to_bits(), t.to_bits());
        prop_assert_eq!(c.epsilon.to_bits(), eps.to_bits());
        prop_assert_eq!(c.field.grid(), f.grid());
        prop_assert!(c.field.values().iter().zip(f.values()).all(|(a, b)| a.to_bits() == b.to_bits()));
    }

    #[test]
    fn clipped_interpolation_never_overshoots(values in proptest::collection::vec(-1.0f64..1.0, 16 * 9), pts in proptest::collection::vec((-1.0f64..1.0, 0.0f64..=1.0), 32)) {
        let g = TorusGrid::strip(16, 16).unwrap();
        let (lo, hi) = values.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), v| (a.min(*v), b.max(*v)));
        for (x1, x2) in pts {
            let v = interp_strip(&values, &g, x1, x2, true);
            prop_assert!(v >= lo && v <= hi, "{v} outside [{lo}, {hi}] at ({x1}, {x2})");
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn reflected_extension_is_discretely_harmonic(m in sine_modes()) {
        let n = 64;
        let g = TorusGrid::strip(n, n).unwrap();
        let f = HarmonicExtension::from_sine_modes(&m).unwrap();
        let ext = f.field(&g).unwrap().extend_odd_x2().unwrap();
        let d = *ext.grid();
        let h = d.h1();
        let bound = 1.1 * h * h / 6.0 * m.iter().map(|(k, a)| a.abs() * (PI * *k as f64).powi(4)).sum::<f64>();
        let rows = d.rows();
        for j in 0..rows {
            if d.x2(j).abs() > 2.0 * h + 1e-12 {
                continue;
            }
            for i in 0..n {
                let v = |a: usize, b: usize| ext.get(a, b);
                let lap = (v((i + 1) % n, j) + v((i + n - 1) % n, j) + v(i, (j + 1) % rows) + v(i, (j + rows - 1) % rows)
                    - 4.0 * v(i, j)) / (h * h);
                prop_assert!(lap.abs() <= bound + 1e-9, "residual {lap:e} > {bound:e} at row {j}");
            }
        }
    }

    #[test]
    fn harmonic_part_is_orthogonal_and_energies_split(w in modes(), m in sine_modes()) {
        let f = HarmonicExtension::from_sine_modes(&m).unwrap();
        let top = w.iter().map(|t| t.0.max(t.1)).chain(m.iter().map(|t| t.0)).max().unwrap() as f64;
        let mut rel = Vec::new();
        for n in [64usize, 128] {
            let h = 2.0 / n as f64;
            let (ip, pp, ff, total) = inner_products(n, &w, &f);
            let r = ip.abs() / (pp * ff).sqrt();
            prop_assert!(r <= (1.0 + top * top) * h * h, "n = {n}: {r:e}");
            let split = (total - (pp + f.gradient_energy())).abs() / (pp + f.gradient_energy());
            // trapezoid error of the non-periodic x2 integral of |grad F|^2 is about (pi k h)^2 / 3
            prop_assert!(split <= (PI * top * h).powi(2), "n = {n}: split {split:e}");
            rel.push(r);
        }
        prop_assert!(rel[1] <= 0.3 * rel[0] || rel[1] < 1e-12, "{rel:?}");
    }

    #[test]
    fn energy_gate_holds_below_threshold(frac in 0.0f64..0.999, kappa in 0.01f64..0.04) {
        let p = SimParams { kappa, ..SimParams::default().at_resolution(64) };
        let g = p.strip_grid().unwrap();
        let f = build_profile(&ProfileSpec::from_params(&p), &g).unwrap();
        let mut ws = SpectralWorkspace::new(&g);
        let c1 = kinetic_energy(&make_velocity(&mut ws, &f, 1.0).unwrap());
        let budget = epsilon_gate(c1, p.sigma).unwrap();
        let eps = frac * budget.epsilon0;
        let k = kinetic_energy(&make_velocity(&mut ws, &f, eps).unwrap());
        prop_assert!(k <= p.sigma / 20.0 * (1.0 + 1e-12), "{k} at epsilon {eps}");
        prop_assert!(budget.passes(eps));
    }

    #[test]
    fn key_lemma_reassembles_velocity(w in modes(), seed in any::<u64>()) {
        let g = TorusGrid::strip(64, 64).unwrap();
        let omega = modal(g, &w, odd_x1());
        let mut ws = SpectralWorkspace::new(&g);
        let u = biot_savart(&mut ws, &omega).unwrap();
        let scale = u.sup_norm();
        for s in key_lemma_table(&omega, &u, &sample_points(&g, 24, seed)).unwrap() {
            prop_assert!((s.reassembled() - s.u_j).abs() <= 1e-12 * scale, "{s:?}");
        }
    }

    #[test]
    fn extremal_velocity_is_refinement_stable(x1 in 0.01f64..0.95, n in prop_oneof![Just(64usize), Just(128)]) {
        let p = SimParams::default().at_resolution(n);
        let w = initial_vorticity(&p).unwrap();
        let mut ws = SpectralWorkspace::new(&p.torus_grid().unwrap());
        let u = biot_savart(&mut ws, &w).unwrap();
        let vg = VelocityGrid::from_strip(&u).unwrap();
        for side in [Side::Min, Side::Max] {
            let a = extremal_u1_with(&vg, x1, side, 2).unwrap();
            let b = extremal_u1_with(&vg, x1, side, 3).unwrap();
            prop_assert!((a - b).abs() <= 1e-4 * u.sup_norm(), "{side:?} at {x1}: {a} vs {b}");
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(3))]

    #[test]
    fn lattice_sum_matches_spectral_solve(w in modes(), seed in any::<u64>()) {
        use rand::{Rng, SeedableRng};
        let n = 256;
        let g = TorusGrid::doubled(n, n).unwrap();
        let omega = modal(g, &w, ParityClass::ODD_ODD);
        let mut ws = SpectralWorkspace::new(&g);
        let psi = solve_poisson_torus(&mut ws, &omega).unwrap();
        let oracle = GreensOracle::new(&omega, GreensOptions::default()).unwrap();
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
        for _ in 0..20 {
            let (i, j) = (rng.gen_range(0..n), rng.gen_range(0..n));
            let err = (oracle.eval((g.x1(i), g.x2(j)), 64).unwrap() - psi.get(i, j)).abs();
            prop_assert!(err <= 1e-6 * omega.linf(), "{err:e} at node ({i}, {j})");
        }
    }
}
