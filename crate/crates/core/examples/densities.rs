//! Named Lagrange densities, their Hamiltonians and higher-order forms.

use actionforge::density::{default_hamiltonian, higher_order_density, parse_density, split_hamiltonian};
use actionforge::symbol::{DiffOp, Params};

fn main() -> actionforge::Result<()> {
    let params = Params::new();
    let adv = DiffOp::parse("dt + dx", 1)?;
    for spec in ["trivial", "P:dt", "normal", "time_reversal", "mass"] {
        let d = parse_density(spec)?.build(&adv, &params)?;
        println!("{spec:<14} {:?}: {d}", d.kind);
        if let Ok(h) = default_hamiltonian(&d) {
            println!("{:<14} H: {h}", "");
        }
    }

    let tr = default_hamiltonian(&parse_density("time_reversal")?.build(&adv, &params)?)?;
    println!("H^3 = {}", higher_order_density(&tr, 3)?);

    let wave = DiffOp::parse("dt^2 - lap", 1)?;
    let (plus, minus) = split_hamiltonian(&parse_density("dalembert")?.build(&wave, &params)?)?;
    println!("H+ = {plus}\nH- = {minus}");
    Ok(())
}
