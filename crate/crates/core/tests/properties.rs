use std::sync::Arc;

use proptest::prelude::*;

use viscontact::analysis::{discrete_gronwall_check, RateTable};
use viscontact::fem::{Lame, MaterialParams, NoLoad, ViscousOperator};
use viscontact::friction::{wear_field, ContactPoint, DiscreteContact, FrictionData};
use viscontact::linalg::{csr_from_triplets, matvec, max_asymmetry, quad_form, Vector};
use viscontact::mesh::{build_rect_mesh, validate_mesh, BoundaryTag, SideTags};
use viscontact::problem::{ContactProblem, TimeLoad};
use viscontact::scenario::ScenarioConfig;
use viscontact::timestepper::{run_semi_discrete, RunOptions, TimeGrid};
use viscontact::vi_step::{DiscreteDynamics, StepProblem, StepSolver, Tolerances};

fn small_problem(nx: usize, ny: usize, beta: f64, mu: f64, v_star: [f64; 2]) -> ContactProblem {
    let mesh = build_rect_mesh(nx, ny, 1.0, 0.8, SideTags::clamped_left_contact_bottom()).unwrap();
    let material = MaterialParams::uniform(Lame::new(1.0, 0.8), Lame::new(0.7, 0.3), 1.1);
    ContactProblem::new(mesh, material, FrictionData::uniform(beta, mu, v_star), Arc::new(NoLoad)).unwrap()
}

fn vec_strategy(n: usize) -> impl Strategy<Value = Vector> {
    prop::collection::vec(-2.0f64..2.0, n).prop_map(Vector::from_vec)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn meshes_are_valid(nx in 1usize..7, ny in 1usize..7, lx in 0.2f64..3.0, ly in 0.2f64..3.0) {
        let m = build_rect_mesh(nx, ny, lx, ly, SideTags::clamped_left_contact_bottom()).unwrap();
        prop_assert!(validate_mesh(&m).is_empty());
        let area: f64 = (0..m.n_triangles()).map(|t| m.signed_area(t)).sum();
        prop_assert!((area - lx * ly).abs() < 1e-12 * lx * ly);
        let perimeter: f64 = [BoundaryTag::Dirichlet, BoundaryTag::Neumann, BoundaryTag::Contact].iter().map(|&t| m.tag_length(t)).sum();
        prop_assert!((perimeter - 2.0 * (lx + ly)).abs() < 1e-12 * (lx + ly));
        prop_assert!((m.tag_length(BoundaryTag::Contact) - lx).abs() < 1e-12 * lx);
    }

    #[test]
    fn assembled_matrices_are_symmetric_with_rigid_kernel(nx in 1usize..5, ny in 1usize..5, mu in 0.1f64..3.0, lambda in 0.0f64..3.0) {
        let mesh = build_rect_mesh(nx, ny, 1.0, 1.0, SideTags::clamped_left_contact_bottom()).unwrap();
        let material = MaterialParams::uniform(Lame::new(mu, lambda), Lame::new(1.0, 0.0), 2.0);
        let p = ContactProblem::new(mesh, material, FrictionData::frictionless(), Arc::new(NoLoad)).unwrap();
        let s = &p.system;
        for m in [&s.mass, &s.elastic, &s.viscous, &s.gram] {
            prop_assert!(max_asymmetry(m) <= 1e-13);
        }
        let n = p.mesh.n_vertices();
        let rot = Vector::from_fn(2 * n, |i, _| { let x = p.mesh.vertices[i / 2]; if i % 2 == 0 { -x[1] } else { x[0] } });
        prop_assert!(matvec(&s.elastic, &rot).amax() <= 1e-12 * (1.0 + mu + lambda));
        let ex = Vector::from_fn(2 * n, |i, _| if i % 2 == 0 { 1.0 } else { 0.0 });
        prop_assert!((quad_form(&s.mass, &ex) - 2.0).abs() < 1e-12);
    }

    #[test]
    fn contact_functional_is_convex_and_homogeneous(
        g in vec_strategy(24), v1 in vec_strategy(24), v2 in vec_strategy(24), lam in 0.0f64..1.0, s in 0.0f64..5.0,
    ) {
        let p = small_problem(3, 2, 0.4, 0.6, [0.0, 0.0]);
        let n = p.n_free();
        let (g, v1, v2) = (g.rows(0, n).into_owned(), v1.rows(0, n).into_owned(), v2.rows(0, n).into_owned());
        let j = |g: &Vector, v: &Vector| p.dynamics.contact.value(g, v);
        let mix = lam * &v1 + (1.0 - lam) * &v2;
        let rhs = lam * j(&g, &v1) + (1.0 - lam) * j(&g, &v2);
        prop_assert!(j(&g, &mix) <= rhs + 1e-12 * (1.0 + rhs.abs()));
        let scaled = s * &v1;
        prop_assert!((j(&g, &scaled) - s * j(&g, &v1)).abs() <= 1e-12 * (1.0 + s * j(&g, &v1).abs()));
        prop_assert_eq!(j(&g, &Vector::zeros(n)), 0.0);
    }

    #[test]
    fn smoothing_error_is_bounded(g in vec_strategy(24), v in vec_strategy(24), vx in -1.0f64..1.0, eps in 1e-6f64..1e-1) {
        let p = small_problem(3, 2, 0.4, 0.6, [vx, 0.0]);
        let n = p.n_free();
        let (g, v) = (g.rows(0, n).into_owned(), v.rows(0, n).into_owned());
        let c = &p.dynamics.contact;
        let w = c.frozen_weights(&g);
        let (exact, smooth) = (c.value_frozen(&w, &v), c.reg_value_frozen(&w, &v, eps));
        let bound: f64 = c.points.iter().zip(&w).map(|(q, &wq)| wq * q.mu * eps).sum();
        // sqrt(w^2 + eps^2) - eps lies in [|w| - eps, |w|].
        let tiny = 1e-13 * (1.0 + exact.abs());
        prop_assert!(smooth <= exact + tiny);
        prop_assert!(exact - smooth <= bound + tiny);
    }

    #[test]
    fn wear_is_minus_normal_displacement(u in vec_strategy(40), a in -3.0f64..3.0) {
        let p = small_problem(3, 2, 0.4, 0.6, [0.0, 0.0]);
        let full = p.expand(&u.rows(0, p.n_free()).into_owned());
        let w = wear_field(&full, &p.system.contact_edges);
        let ws = wear_field(&(a * &full), &p.system.contact_edges);
        for (i, &v) in w.vertices.iter().enumerate() {
            // Bottom edges have outward normal (0, -1).
            prop_assert!((w.values[i] - full[2 * v + 1]).abs() < 1e-14);
            prop_assert!((ws.values[i] - a * w.values[i]).abs() < 1e-12);
        }
    }

    #[test]
    fn soft_threshold_step(q in 0.2f64..10.0, c in 0.0f64..3.0, f in -5.0f64..5.0) {
        let one = |x: f64| csr_from_triplets(1, &[(0, 0, x)]);
        let contact = DiscreteContact {
            dim: 1,
            points: vec![ContactPoint { weight: c, mu: 1.0, normal: vec![], bias: 1.0, tangent: vec![(0, 1.0)], slip: 0.0, offset: 0.0 }],
        };
        let d = DiscreteDynamics::new(one(q), one(0.0), ViscousOperator::Linear(one(0.0)), one(1.0), contact, 1e-10).unwrap();
        let solver = StepSolver::new(&d, 1.0, Tolerances::default()).unwrap();
        let sp = StepProblem { tau: 1.0, rhs: Vector::from_element(1, f), prev_velocity: Vector::zeros(1) };
        let (u, _) = solver.fixed_point_h(&sp).unwrap();
        let exact = f.signum() * (f.abs() - c).max(0.0) / q;
        prop_assert!((u[0] - exact).abs() <= 1e-8);
    }

    #[test]
    fn displacement_is_integrated_velocity(u0 in vec_strategy(8), v0 in vec_strategy(8), steps in 1usize..12) {
        let p = small_problem(2, 1, 0.3, 0.4, [0.2, 0.0]);
        let n = p.n_free();
        let load = TimeLoad(|t: f64| Vector::from_fn(n, |i, _| (i as f64 + t).sin()));
        let grid = TimeGrid::new(0.3, steps).unwrap();
        let tr = run_semi_discrete(&p.dynamics, &load, grid, &u0.rows(0, n).into_owned(), &v0.rows(0, n).into_owned(), &RunOptions::default()).unwrap();
        let tau = grid.tau();
        for k in 1..=steps {
            let d = &tr.displacement[k] - &tr.displacement[k - 1] - tau * &tr.velocity[k];
            prop_assert!(d.amax() <= 1e-13 * (1.0 + tr.displacement[k].amax()));
            let z = (&tr.velocity[k] - &tr.velocity[k - 1]) / tau - &tr.acceleration[k];
            prop_assert!(z.amax() <= 1e-12 * (1.0 + tr.acceleration[k].amax()));
        }
    }

    #[test]
    fn gronwall_conclusion_follows_from_hypothesis(g in prop::collection::vec(0.0f64..2.0, 1..40), slack in prop::collection::vec(0.0f64..1.0, 40), tau in 0.001f64..0.5, c in 0.1f64..3.0) {
        let mut e = Vec::with_capacity(g.len());
        let mut partial = 0.0;
        for (i, gi) in g.iter().enumerate() {
            let ei = slack[i] * (c * gi + tau * partial);
            partial += ei;
            e.push(ei);
        }
        let v = discrete_gronwall_check(&e, &g, tau, c);
        prop_assert!(v.hypothesis_violated_at.is_none());
        prop_assert!(v.holds);
    }

    #[test]
    fn power_laws_give_their_order(p in 0.3f64..3.0, c in 0.01f64..10.0) {
        let pts: Vec<(f64, f64)> = (0..4).map(|i| { let h = 0.5f64.powi(i); (h, c * h.powf(p)) }).collect();
        for o in RateTable::new("h", &pts).orders() {
            prop_assert!((o - p).abs() < 1e-10);
        }
    }

    #[test]
    fn scenario_round_trip(nx in 1usize..20, beta in 0.0f64..2.0, mu in 0.0f64..1.0, vx in -1.0f64..1.0, steps in 1usize..200, t in 0.01f64..10.0) {
        let text = format!(r#"{{
            "mesh": {{"nx": {nx}, "ny": 2, "lx": 1.5, "ly": 1.0}},
            "material": {{"elastic": {{"mu": 1.0, "lambda": 0.3}}, "viscous": {{"mu": 0.5, "lambda": 0.1}}, "rho": 2.0, "rho_star": 1.0}},
            "friction": {{"beta": {beta}, "mu": {mu}, "v_star": [{vx}, 0.0]}},
            "loads": {{"body": {{"kind": "sinusoidal", "amplitude": [0.1, -1.0], "omega": 2.5}}}},
            "time": {{"t_final": {t}, "steps": {steps}}},
            "initial": {{"velocity": {{"kind": "bump", "amplitude": [0.0, -0.1], "center": [0.5, 0.5], "radius": 0.3}}}}
        }}"#);
        let cfg = ScenarioConfig::from_json(&text).unwrap();
        prop_assert_eq!(ScenarioConfig::from_json(&cfg.to_json()).unwrap(), cfg);
    }
}
