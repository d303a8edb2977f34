//! Conservation and dissipation of Hamiltonians along exact trajectories.

use actionforge::density::{energy_density, parse_density};
use actionforge::diagnostics::{conservation_check, hamiltonian_trace, monotonicity_check, rate_identity_check};
use actionforge::field::{Field, Grid};
use actionforge::solver::{solve_causal_with, source_from_ic, SolveOptions};
use actionforge::symbol::{DiffOp, Params};

fn main() -> actionforge::Result<()> {
    let grid = Grid::periodic_1d(256)?;
    let airy = DiffOp::parse("dt + dx^3", 1)?;
    let src = source_from_ic(&airy, &[Field::gaussian(&grid, None, 0.3, 1.0)])?;
    let times: Vec<f64> = (1..=20).map(|i| 0.05 * i as f64).collect();
    let traj = solve_causal_with(&airy, &src, &grid, &times, &SolveOptions { order: Some(1), quad_nodes: 64 })?;
    let h = parse_density("time_reversal")?.hamiltonian(&airy, &Params::new())?;
    println!("{}", conservation_check(&hamiltonian_trace(&h, &traj)?, 1e-8)?);

    let tel = DiffOp::parse("dt^2 + 1/2 dt - lap", 1)?;
    let ics = [Field::gaussian(&grid, None, 0.3, 1.0), Field::zeros(&grid)];
    let src = source_from_ic(&tel, &ics)?;
    let times: Vec<f64> = (0..1000).map(|i| 0.5 + 1e-3 * i as f64).collect();
    let traj = solve_causal_with(&tel, &src, &grid, &times, &SolveOptions { order: Some(1), quad_nodes: 64 })?;
    println!("{}", monotonicity_check(&hamiltonian_trace(&energy_density(1), &traj)?, 1e-10)?);
    println!("{}", rate_identity_check(&traj, 0.5, 1e-4)?);
    Ok(())
}
