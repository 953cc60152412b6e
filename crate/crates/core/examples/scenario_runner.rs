//! Running a bundled scenario through the library and writing its CSV
//! tables. Pass a scenario path to run another one.

use std::path::PathBuf;

use sheaf_eu::scenario::{export_plot_data, run_source};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let path = std::env::args()
        .nth(1)
        .map(PathBuf::from)
        .unwrap_or_else(|| PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("scenarios/example3.scn"));
    let report = run_source(&std::fs::read_to_string(&path)?, None)?;
    print!("{}", report.render());
    let out = std::env::temp_dir().join("sheaf-eu-tables");
    for f in export_plot_data(&report, &out)? {
        println!("wrote {}", f.display());
    }
    Ok(())
}
