//! Declarative scenarios: parse a file, build its objects, run its tasks,
//! and render a deterministic report with optional CSV tables.

pub mod export;
pub mod parse;
pub mod run;
pub mod world;

use std::fs;
use std::io;
use std::path::{Path, PathBuf};

use crate::rational::Rat;
use crate::Error;

pub use export::CsvFile;
pub use parse::{parse_scenario, Scenario};
pub use run::{run_world, Report, Status, TaskReport};
pub use world::{build, World};

/// Parses, builds and runs scenario text. `epsilon` overrides the file's
/// resolution.
pub fn run_source(src: &str, epsilon: Option<Rat>) -> Result<Report, Error> {
    let scenario = parse_scenario(src)?;
    let mut world = build(&scenario)?;
    if let Some(e) = epsilon {
        world.epsilon = e;
    }
    run_world(&world)
}

/// Writes every CSV table of a report under `dir`.
pub fn export_plot_data(report: &Report, dir: &Path) -> io::Result<Vec<PathBuf>> {
    let mut written = Vec::new();
    for f in report.files() {
        let path = dir.join(&f.name);
        if let Some(parent) = path.parent() {
            fs::create_dir_all(parent)?;
        }
        fs::write(&path, &f.body)?;
        written.push(path);
    }
    Ok(written)
}

/// The golden report stored next to a scenario file.
pub fn golden_path(scenario: &Path) -> PathBuf {
    scenario.with_extension("golden")
}

#[cfg(test)]
mod tests {
    use super::*;

    const FIGURE1: &str = "\
scenario figure 1
space interval -1 1
section f on X = knots (-1,0) (0,0) (1,1)
section g on X = const 1/2
task compare f g on X as cmp expect [-1,1/2)
";

    #[test]
    fn compare_report_and_tables() {
        let report = run_source(FIGURE1, None).unwrap();
        assert_eq!(report.failures(), 0);
        let text = report.render();
        assert!(text.contains("f < g on [-1,1/2)"), "{text}");
        let files = report.files();
        let lt = files.iter().find(|f| f.name == "cmp/lt.csv").unwrap();
        assert_eq!(lt.body, "interval_start,interval_end\n-1,0.5\n");
        assert!(files.iter().any(|f| f.name == "f.csv"));
        assert_eq!(run_source(FIGURE1, None).unwrap().render(), text);
    }

    #[test]
    fn empty_scenario_has_no_files() {
        let report = run_source("space interval 0 1\n", None).unwrap();
        assert!(report.files().is_empty());
        assert_eq!(report.failures(), 0);
    }

    #[test]
    fn wrong_expectation_fails_the_task() {
        let src = FIGURE1.replace("[-1,1/2)", "[-1,0)");
        let report = run_source(&src, None).unwrap();
        assert_eq!(report.failures(), 1);
        assert!(report.render().contains("FAILED: expected [-1,0), got [-1,1/2)"));
    }

    #[test]
    fn unknown_names_abort() {
        let e = run_source("space interval 0 1\ntask compare f g on X\n", None).unwrap_err();
        assert_eq!(e.to_string(), "unresolved name: line 2: section `f`");
    }

    #[test]
    fn formula_errors_point_into_the_line() {
        let src = "space poset a b\nprizes z\ntask eval on X : (and top\n";
        let e = run_source(src, None).unwrap_err();
        assert!(e.to_string().starts_with("parse error: line 3, column"), "{e}");
    }
}
