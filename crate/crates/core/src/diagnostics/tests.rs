use super::*;
use crate::density::{make_named_density, default_hamiltonian, NamedDensity};
use crate::field::Grid;
use crate::solver::{solve_causal_with, source_from_ic, SolveOptions};

fn op(s: &str) -> DiffOp {
    DiffOp::parse(s, 1).unwrap()
}

fn series(values: &[f64]) -> TraceSeries {
    let times = (1..=values.len()).map(|i| i as f64 * 0.1).collect();
    TraceSeries::new(times, values.to_vec(), "s").unwrap()
}

fn solve(a: &DiffOp, order: usize, times: &[f64]) -> Trajectory {
    let g = Grid::periodic_1d(64).unwrap();
    let ics: Vec<Field> = (0..a.time_order()).map(|i| Field::gaussian(&g, None, 0.5, 1.0 - 0.6 * i as f64)).collect();
    let src = source_from_ic(a, &ics).unwrap();
    solve_causal_with(a, &src, &g, times, &SolveOptions { order: Some(order), quad_nodes: 64 }).unwrap()
}

fn uniform(t0: f64, dt: f64, n: usize) -> Vec<f64> {
    (0..n).map(|i| t0 + i as f64 * dt).collect()
}

#[test]
fn conservation_metric_properties() {
    let c = conservation_check(&series(&[2.0, 2.0, 2.0]), 1e-8).unwrap();
    assert_eq!(c.metric, 0.0);
    assert!(c.pass);
    let a = conservation_check(&series(&[1.0, 1.1, 0.95]), 1e-8).unwrap();
    let b = conservation_check(&series(&[3.0, 3.3, 2.85]), 1e-8).unwrap();
    assert!((a.metric - b.metric).abs() < 1e-12);
    assert!(!a.pass);
    assert!(conservation_check(&series(&[1.0, 1.0]), 1e-8).is_err());
}

#[test]
fn monotonicity_detects_rise() {
    assert!(monotonicity_check(&series(&[1.0, 1.0, 1.0]), 1e-10).unwrap().pass);
    assert!(monotonicity_check(&series(&[3.0, 2.0, 1.0]), 1e-10).unwrap().pass);
    assert!(!monotonicity_check(&series(&[-3.0, -2.0, -1.0]), 1e-10).unwrap().pass);
}

#[test]
fn telegraph_energy_and_rate() {
    let a = op("dt^2 + 1/2 dt - lap");
    let traj = solve(&a, 1, &uniform(0.1, 1e-3, 201));
    let h = hamiltonian_trace(&energy_density(1), &traj).unwrap();
    assert!(monotonicity_check(&h, TOL_MONOTONE).unwrap().pass);
    let r1 = rate_identity_check(&traj, 0.5, TOL_RATE).unwrap();
    assert!(r1.pass, "{r1}");
    let coarse = solve(&a, 1, &uniform(0.1, 2e-3, 101));
    let r2 = rate_identity_check(&coarse, 0.5, TOL_RATE).unwrap();
    let ratio = r2.metric / r1.metric;
    assert!((3.5..4.5).contains(&ratio), "{ratio}");
    assert!(rate_identity_check(&solve(&a, 1, &[0.1, 0.2, 0.4]), 0.5, 1e-4).is_err());
}

#[test]
fn residuals_and_equivalence() {
    let a = op("dt^2 + 1/2 dt - lap");
    let traj = solve(&a, 2, &[0.3, 0.6, 0.9]);
    assert!(residual_check(&a, &traj, 1e-10).unwrap().pass);
    let same = equivalence_check(&traj, &traj, 1e-12).unwrap();
    assert_eq!(same.metric, 0.0);
    let mut bent = traj.clone();
    for (i, v) in bent.states[1][0].iter_mut().enumerate() {
        *v *= 1.0 + 0.05 * ((i % 7) as f64 - 3.0);
    }
    let r = residual_check(&a, &bent, 1e-10).unwrap();
    assert!(r.metric > 1e-2, "{r}");
}

#[test]
fn airy_invariants() {
    let a = op("dt + dx^3");
    let traj = solve(&a, 0, &[0.1, 0.5, 1.0]);
    let reps = airy_higher_invariants(&traj, 1).unwrap();
    assert_eq!(reps.len(), 2);
    assert!(reps.iter().all(|r| r.pass), "{reps:?}");
    let mass = airy_higher_invariants(&traj, 0).unwrap();
    assert_eq!(mass.len(), 1);
    assert!(mass[0].pass);
    assert!(matches!(airy_higher_invariants(&traj, 40), Err(Error::Unresolved { .. })));
}

#[test]
fn stationarity_of_trivial_density() {
    let a = op("dt + dx");
    let g = Grid::periodic_1d(64).unwrap();
    let traj = solve(&a, 1, &uniform(0.2, 1e-3, 601));
    let l = make_named_density(NamedDensity::Trivial, &a, None).unwrap();
    let h = TestFunction::new(Field::gaussian(&g, None, 0.35, 1.0), 0.3, 0.7).unwrap();
    let at = action_stationarity(&l, &traj, &traj, &h, 1e-4).unwrap();
    assert!(at.pass, "{at}");
    let off = h.perturb(&traj, 1e-2).unwrap();
    let away = action_stationarity(&l, &off, &traj, &h, 1e-4).unwrap();
    assert!(away.metric > 1e-4, "{away}");
    let wide = TestFunction::new(Field::gaussian(&g, None, 0.35, 1.0), 0.2, 0.7).unwrap();
    assert_eq!(action_stationarity(&l, &traj, &traj, &wide, 1e-4), Err(Error::TestFieldOnBoundary));
}

#[test]
fn stationarity_of_dt_density() {
    let a = op("dt + dx");
    let g = Grid::periodic_1d(64).unwrap();
    let traj = solve(&a, 2, &uniform(0.2, 1e-3, 601));
    let l = make_named_density(NamedDensity::PDensity, &a, Some(&op("dt"))).unwrap();
    let h = TestFunction::new(Field::gaussian(&g, None, 0.35, 1.0), 0.3, 0.7).unwrap();
    let r = action_stationarity(&l, &traj, &traj, &h, 1e-4).unwrap();
    assert!(r.pass, "{r}");
}

#[test]
fn test_function_derivatives() {
    let g = Grid::periodic_1d(16).unwrap();
    let h = TestFunction::new(Field::gaussian(&g, None, 0.35, 1.0), 0.0, 2.0).unwrap();
    let t = 0.7;
    let want = (std::f64::consts::PI * t / 2.0).sin().powi(8);
    assert!((h.time_derivative(0, t) - want).abs() < 1e-15);
    let e = 1e-6;
    let fd = (h.time_derivative(1, t + e) - h.time_derivative(1, t - e)) / (2.0 * e);
    assert!((fd - h.time_derivative(2, t)).abs() < 1e-6);
}

#[test]
fn zero_trajectory_trace() {
    let a = op("dt + dx");
    let g = Grid::periodic_1d(16).unwrap();
    let src = source_from_ic(&a, &[Field::zeros(&g)]).unwrap();
    let traj = solve_causal_with(&a, &src, &g, &[0.1, 0.2], &SolveOptions::default()).unwrap();
    let h = default_hamiltonian(&make_named_density(NamedDensity::Trivial, &a, None).unwrap()).unwrap();
    assert!(hamiltonian_trace(&h, &traj).unwrap().values.iter().all(|v| *v == 0.0));
}
