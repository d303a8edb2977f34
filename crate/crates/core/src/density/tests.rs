use super::*;
use crate::field::{integrate, Grid};
use crate::solver::{solve_causal_with, SolveOptions};
use crate::symbol::Params;

fn op(s: &str) -> DiffOp {
    DiffOp::parse(s, 1).unwrap()
}

fn q(s: &str) -> BigRational {
    s.parse().unwrap()
}

fn solve(a: &DiffOp, order: usize, times: &[f64]) -> Trajectory {
    let g = Grid::periodic_1d(64).unwrap();
    let ics: Vec<Field> = (0..a.time_order())
        .map(|i| Field::gaussian(&g, None, 0.5, if i == 0 { 1.0 } else { 0.3 }))
        .collect();
    let src = crate::solver::source_from_ic(a, &ics).unwrap();
    solve_causal_with(a, &src, &g, times, &SolveOptions { order: Some(order), quad_nodes: 64 }).unwrap()
}

#[test]
fn trivial_and_identity_p_density_agree() {
    let a = op("dt + dx");
    let t = make_named_density(NamedDensity::Trivial, &a, None).unwrap();
    let p = make_named_density(NamedDensity::PDensity, &a, Some(&DiffOp::identity(1))).unwrap();
    assert_eq!(t.quads, p.quads);
    assert_eq!(t.couplings, p.couplings);
    assert_eq!(t.couplings[0].op_chain, vec![ChainOp::Op(DiffOp::identity(1)), ChainOp::InverseOf(a)]);
    assert_eq!(t.to_string(), "1/2 |(1)u|^2 - ((1)(dt + dx)^-1 f)·(1)u");
}

#[test]
fn dt_density_and_hamiltonian() {
    let a = op("dt + dx");
    let l = make_named_density(NamedDensity::PDensity, &a, Some(&op("dt"))).unwrap();
    assert_eq!(l.quads, vec![QuadTerm::half(op("dt"), 1)]);
    // − (−dt² A⁻¹ f) u = + (dt² A⁻¹ f) u
    assert_eq!(l.couplings[0].op_chain[0], ChainOp::Op(op("-dt^2")));
    let h = legendre_hamiltonian(&l, &[op("dt")]).unwrap();
    assert_eq!(h.kind, DensityKind::Hamiltonian);
    assert_eq!(h.quads, l.quads);
    assert_eq!(h.couplings[0].sign, 1);
    assert_eq!(legendre_hamiltonian(&h, &[op("dt")]).unwrap().quads, l.quads);
    assert_eq!(legendre_hamiltonian(&h, &[op("dt")]).unwrap().couplings, l.couplings);
    assert!(legendre_hamiltonian(&l, &[]).is_err());
    assert!(legendre_hamiltonian(&l, &[op("dx")]).is_err());
}

#[test]
fn trivial_hamiltonian_is_half_square() {
    let a = op("dt + dx");
    let l = make_named_density(NamedDensity::Trivial, &a, None).unwrap();
    let h = default_hamiltonian(&l).unwrap();
    assert_eq!(h.quads, l.quads);
    assert!(h.couplings.is_empty());
}

#[test]
fn normal_divides_exactly() {
    let a = op("dt - lap");
    let l = make_named_density(NamedDensity::Normal, &a, None).unwrap();
    assert_eq!(l.couplings[0].op_chain, vec![ChainOp::Op(a.adjoint())]);
}

#[test]
fn time_reversal_signs() {
    let adv = make_named_density(NamedDensity::TimeReversal, &op("dt + 2 dx"), None).unwrap();
    assert_eq!(adv.quads[1], QuadTerm::half(op("2 dx"), -1));
    assert_eq!(adv.couplings[0].op_chain, vec![ChainOp::Op(op("-dt + 2 dx"))]);
    let diff = make_named_density(NamedDensity::TimeReversal, &op("dt - lap"), None).unwrap();
    assert_eq!(diff.quads[1].sign, 1);
    assert!(make_named_density(NamedDensity::TimeReversal, &op("dt^2 - lap"), None).is_err());
    assert!(make_named_density(NamedDensity::TimeReversal, &op("dt + dx + dx^2"), None).is_err());
}

#[test]
fn dalembert_split_sum_is_twice_the_coupling() {
    let a = op("dt^2 + 1/2 dt - lap");
    let l = make_named_density(NamedDensity::Dalembert, &a, None).unwrap();
    let (hp, hm) = split_hamiltonian(&l).unwrap();
    assert_eq!(hp.quads.iter().map(|q| q.sign).collect::<Vec<_>>(), vec![1, 1]);
    assert_eq!(hm.quads.iter().map(|q| q.sign).collect::<Vec<_>>(), vec![-1, -1]);
    let traj = solve(&a, 2, &[0.4, 0.9]);
    let coupling_only = Density { quads: Vec::new(), ..l.clone() };
    for ti in 0..2 {
        let p = evaluate_density(&hp, &traj, ti).unwrap();
        let m = evaluate_density(&hm, &traj, ti).unwrap();
        let c = evaluate_density(&coupling_only, &traj, ti).unwrap();
        for ((x, y), z) in p.values.iter().zip(&m.values).zip(&c.values) {
            assert!((x.re + y.re + 2.0 * z.re).abs() < 1e-12);
        }
    }
}

#[test]
fn split_of_wave_has_signed_parts() {
    let a = op("dt^2 - lap");
    let l = make_named_density(NamedDensity::Dalembert, &a, None).unwrap();
    let (hp, hm) = split_hamiltonian(&l).unwrap();
    let traj = solve(&a, 2, &[0.3, 1.1]);
    for ti in 0..2 {
        assert!(evaluate_density(&hp, &traj, ti).unwrap().values.iter().all(|v| v.re >= -1e-12));
        assert!(evaluate_density(&hm, &traj, ti).unwrap().values.iter().all(|v| v.re <= 1e-12));
    }
}

#[test]
fn higher_order_shapes() {
    let a = op("dt + dx");
    let h = default_hamiltonian(&make_named_density(NamedDensity::PDensity, &a, Some(&op("dt"))).unwrap()).unwrap();
    assert_eq!(higher_order_density(&h, 1).unwrap(), h);
    let h3 = higher_order_density(&h, 3).unwrap();
    assert_eq!(h3.quads[0].op, op("dt^3"));
    assert_eq!(h3.couplings[0].field_op, op("dt^2"));
    assert_eq!(h3.couplings[0].op_chain[0], ChainOp::Op(op("dt^2")));
    assert_eq!(h3.required_order(), 4);
    assert!(higher_order_density(&h, 0).is_err());
}

#[test]
fn mass_higher_order_on_advection() {
    let a = op("dt + dx");
    let m = make_named_density(NamedDensity::Mass, &a, None).unwrap();
    let traj = solve(&a, 3, &[0.5]);
    for n in 1..=3 {
        let hn = higher_order_density(&m, n).unwrap();
        let on_shell = integrate(&evaluate_density(&hn, &traj, 0).unwrap()).unwrap();
        assert!(on_shell.abs() < 1e-12 || n == 1, "{n}: {on_shell}");
    }
}

#[test]
fn combine_scales_terms() {
    let a = op("dt + dx");
    let l1 = make_named_density(NamedDensity::Trivial, &a, None).unwrap();
    let l2 = make_named_density(NamedDensity::PDensity, &a, Some(&op("dt"))).unwrap();
    let c = combine(&l1, &q("1"), &l2, &q("0")).unwrap();
    assert_eq!((c.quads, c.couplings), (l1.quads.clone(), l1.couplings.clone()));
    let c = combine(&l1, &q("-2"), &l2, &q("3")).unwrap();
    assert_eq!(c.quads[0].sign, -1);
    assert_eq!(c.quads[0].weight, q("1"));
    assert_eq!(c.quads[1].weight, q("3/2"));
    let m = make_named_density(NamedDensity::Mass, &a, None).unwrap();
    assert!(combine(&l1, &q("1"), &m, &q("1")).is_err());
}

#[test]
fn trivial_hamiltonian_conserved_on_advection() {
    let a = op("dt + dx");
    let h = default_hamiltonian(&make_named_density(NamedDensity::Trivial, &a, None).unwrap()).unwrap();
    let traj = solve(&a, 0, &[0.2, 0.7, 1.5]);
    let vals: Vec<f64> = (0..3).map(|i| integrate(&evaluate_density(&h, &traj, i).unwrap()).unwrap()).collect();
    assert!(vals.iter().all(|v| (v - vals[0]).abs() < 1e-13 * vals[0]));
}

#[test]
fn normal_hamiltonian_vanishes_on_diffusion() {
    let a = op("dt - 1/10 lap");
    let h = default_hamiltonian(&make_named_density(NamedDensity::Normal, &a, None).unwrap()).unwrap();
    let traj = solve(&a, 1, &[0.3, 1.0]);
    for i in 0..2 {
        assert!(evaluate_density(&h, &traj, i).unwrap().max_abs() < 1e-12);
    }
}

#[test]
fn order_deficit_is_reported() {
    let a = op("dt + dx");
    let h = higher_order_density(&make_named_density(NamedDensity::Mass, &a, None).unwrap(), 3).unwrap();
    let traj = solve(&a, 0, &[0.5]);
    assert!(matches!(evaluate_density(&h, &traj, 0), Err(Error::InsufficientOrder { required: 2, .. })));
}

#[test]
fn spec_strings() {
    for s in ["trivial", "P:dt", "normal", "time_reversal", "dalembert", "mass", "probability", "energy", "higher:2:P:dt", "split-:dalembert", "quad:dt"] {
        assert_eq!(parse_density(s).unwrap().to_string(), s);
    }
    assert!(parse_density("higher:0:mass").is_err());
    assert!(parse_density("lagrange").is_err());
    let a = op("dt + dx");
    let h = parse_density("higher:2:P:dt").unwrap().hamiltonian(&a, &Params::new()).unwrap();
    assert_eq!(h.quads[0].op, op("dt^2"));
}
