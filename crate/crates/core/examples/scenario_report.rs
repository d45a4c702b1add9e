//! Runs a scenario given as JSON and writes report.json plus CSV tables.

use valdist::cli::{run_scenario, scenario_with_defaults, summary_lines, write_report, ScenarioKind};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let text = r#"{
      "kind": "characteristic",
      "function": "(exp(z) - 2) / (z + 3.5)",
      "grid": { "rmin": 2, "rmax": 20, "steps": 10, "spacing": "log" },
      "k": [1, 2]
    }"#;
    let scenario = scenario_with_defaults(ScenarioKind::Characteristic, Some(text))?;
    let report = run_scenario(&scenario)?;
    let dir = std::env::temp_dir().join("valdist-scenario-report");
    write_report(&report, &dir)?;
    for line in summary_lines(&report) {
        println!("{line}");
    }
    println!("settings hash {}", report.settings_hash);
    println!("wrote {}", dir.display());
    Ok(())
}
