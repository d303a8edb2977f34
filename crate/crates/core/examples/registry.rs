//! Running a builtin case with a config override and writing its artifacts.

use actionforge::registry::{find_config, run_case};

fn main() -> actionforge::Result<()> {
    let out = std::env::temp_dir().join("actionforge-example");
    let patch = serde_json::json!({ "time": { "samples": 8 }, "grid": { "n": 128 } });
    let config = find_config("advection")?.patched(&patch)?;
    let report = run_case(config, &out)?;
    for c in &report.checks {
        println!("{c}");
    }
    println!("artifacts in {}", out.join(&report.case).display());
    Ok(())
}
