//! Exact operator algebra: parsing, adjoints, symbols and exact division.

use actionforge::symbol::{DiffOp, Division, Params};
use num_complex::Complex64;

fn main() -> actionforge::Result<()> {
    let airy = DiffOp::parse("dt + dx^3", 1)?;
    println!("A        = {airy}");
    println!("A*       = {}", airy.adjoint());
    println!("A#       = {}", airy.time_reverse());
    println!("A*A      = {}", airy.normal_op());

    match airy.normal_op().exact_divide(&airy)? {
        Division::Exact(q) => println!("A*A / A  = {q}"),
        Division::NotDivisible => println!("A*A / A  not exact"),
    }

    let mut params = Params::new();
    params.insert("d0".into(), "1/2".parse().unwrap());
    let telegraph = DiffOp::parse_with("dt^2 + d0 dt - lap", 1, &params)?;
    let box_op = DiffOp::dalembertian(1);
    let verdict = match box_op.exact_divide(&telegraph)? {
        Division::Exact(_) => "divisible",
        Division::NotDivisible => "not divisible",
    };
    println!("□ by telegraph: {verdict}");

    let s = Complex64::new(0.3, 1.0);
    println!("symbol of telegraph at s={s}, k=2: {}", telegraph.symbol_eval(s, &[2.0]));
    Ok(())
}
