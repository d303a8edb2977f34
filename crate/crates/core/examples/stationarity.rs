//! Discrete action stationarity at the exact solution, and away from it.

use actionforge::density::{make_named_density, NamedDensity};
use actionforge::diagnostics::{action_stationarity, TestFunction};
use actionforge::field::{Field, Grid};
use actionforge::solver::{solve_causal_with, source_from_ic, SolveOptions};
use actionforge::symbol::DiffOp;

fn main() -> actionforge::Result<()> {
    let grid = Grid::periodic_1d(128)?;
    let a = DiffOp::parse("dt + dx", 1)?;
    let src = source_from_ic(&a, &[Field::gaussian(&grid, None, 0.3, 1.0)])?;
    let times: Vec<f64> = (0..=600).map(|i| 0.2 + 1e-3 * i as f64).collect();
    let traj = solve_causal_with(&a, &src, &grid, &times, &SolveOptions { order: Some(1), quad_nodes: 64 })?;
    let h = TestFunction::new(Field::gaussian(&grid, None, 0.3, 1.0), 0.3, 0.7)?;

    for kind in [NamedDensity::Trivial, NamedDensity::Normal, NamedDensity::TimeReversal] {
        let l = make_named_density(kind, &a, None)?;
        let at = action_stationarity(&l, &traj, &traj, &h, 1e-4)?;
        let off = action_stationarity(&l, &h.perturb(&traj, 1e-2)?, &traj, &h, 1e-4)?;
        println!("{:<14} at solution {:.2e}   displaced {:.2e}", l.label, at.metric, off.metric);
    }
    Ok(())
}
