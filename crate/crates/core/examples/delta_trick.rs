//! `φ δ''` for the wave equation acts like `φ_xx δ`.

use actionforge::diagnostics::equivalence_check;
use actionforge::field::{Field, Grid};
use actionforge::solver::{ic_from_source, reduce_impulses, solve_causal, SourceSpec};
use actionforge::symbol::DiffOp;

fn main() -> actionforge::Result<()> {
    let grid = Grid::periodic_1d(256)?;
    let wave = DiffOp::parse("dt^2 - lap", 1)?;
    let phi = Field::gaussian(&grid, None, 0.3, 1.0);
    let src = SourceSpec::impulse(phi, 2);
    let reduced = reduce_impulses(&wave, &src)?;
    for imp in &reduced.impulses {
        println!("reduced impulse of order {}", imp.order);
    }
    let ics = ic_from_source(&wave, &reduced)?;
    println!("u(0+) max {:.4}, u_t(0+) max {:.4}", ics[0].max_abs(), ics[1].max_abs());

    let times: Vec<f64> = (1..=10).map(|i| 0.2 * i as f64).collect();
    let a = solve_causal(&wave, &src, &grid, &times)?;
    let b = solve_causal(&wave, &reduced, &grid, &times)?;
    println!("{}", equivalence_check(&a, &b, 1e-12)?);
    Ok(())
}
