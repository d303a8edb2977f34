//! A third-order equation and its sixth-order normal equation agree when the
//! extra initial data come from the equation itself.

use actionforge::registry::{builtin_cases, evaluate_case};

fn main() -> actionforge::Result<()> {
    let case = builtin_cases().into_iter().find(|c| c.name() == "nsw").expect("nsw case");
    println!("{}", case.config.description);
    let outcome = evaluate_case(&case)?;
    for r in outcome.report.checks.iter().filter(|r| r.name.starts_with("normal")) {
        println!("{r}");
    }
    Ok(())
}
