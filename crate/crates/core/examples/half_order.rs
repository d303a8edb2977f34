//! A half-order equation, solved through its integer-order equivalent and
//! compared with Grünwald–Letnikov stepping.

use actionforge::diagnostics::equivalence_check;
use actionforge::field::{Field, Grid};
use actionforge::solver::{eliminate_half_derivative, gl_fractional_oracle, solve_causal};
use actionforge::symbol::DiffOp;

fn main() -> actionforge::Result<()> {
    let grid = Grid::periodic_1d(64)?;
    let b = DiffOp::parse("1/2 dx", 1)?;
    let phi = Field::gaussian(&grid, None, 0.3, 1.0);
    let (op, src) = eliminate_half_derivative(&b, &phi)?;
    println!("equivalent operator: {op}, {} memory term(s)", src.memories.len());

    let times: Vec<f64> = (1..=5).map(|i| 0.2 * i as f64).collect();
    let exact = solve_causal(&op, &src, &grid, &times)?;
    let half = "1/2".parse().unwrap();
    for dt in [4e-4, 2e-4, 1e-4] {
        let gl = gl_fractional_oracle(&half, &b, &phi, dt, 1.0)?.subsample(&times)?;
        println!("dt = {dt:.0e}: {}", equivalence_check(&gl, &exact, 1e-4)?);
    }
    Ok(())
}
