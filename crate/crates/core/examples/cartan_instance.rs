//! The exponential-sum curve seen through four lines in the plane: slopes and
//! the second-main-theorem residual against C log r.

use valdist::cli::{default_scenario, run_scenario, summary_lines, ScenarioKind};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let report = run_scenario(&default_scenario(ScenarioKind::Cartan))?;
    for line in summary_lines(&report) {
        println!("{line}");
    }
    if let Some(t) = report.tables.get("characteristic") {
        println!("{}", t.columns.join(","));
        for row in t.rows.iter().step_by(6) {
            println!("{}", row.iter().map(|x| format!("{x:.5}")).collect::<Vec<_>>().join(","));
        }
    }
    Ok(())
}
