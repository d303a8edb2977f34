//! Initial data as impulsive sources, solved exactly mode by mode.

use actionforge::field::{integrate, Field, Grid};
use actionforge::solver::{ic_from_source, solve_causal, source_from_ic};
use actionforge::symbol::DiffOp;

fn main() -> actionforge::Result<()> {
    let grid = Grid::periodic_1d(128)?;
    let a = DiffOp::parse("dt^2 + 1/2 dt - lap", 1)?;
    let u0 = Field::gaussian(&grid, None, 0.3, 1.0);
    let u1 = Field::gaussian(&grid, None, 0.3, 0.5);

    let src = source_from_ic(&a, &[u0.clone(), u1])?;
    for imp in &src.impulses {
        println!("impulse δ^({}) with max |profile| = {:.4}", imp.order, imp.profile.max_abs());
    }
    let back = ic_from_source(&a, &src)?;
    println!("recovered u(0+) error: {:.2e}", actionforge::field::l2_distance(&back[0], &u0)?);

    let times: Vec<f64> = (1..=8).map(|i| 0.5 * i as f64).collect();
    let traj = solve_causal(&a, &src, &grid, &times)?;
    for (i, t) in traj.times.iter().enumerate() {
        println!("t = {t:.1}  ∫u dx = {:+.6}", integrate(&traj.field(i, 0)?)?);
    }
    Ok(())
}
