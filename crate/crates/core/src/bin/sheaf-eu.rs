use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use sheaf_eu::rational::{int, parse_rat};
use sheaf_eu::scenario::{export_plot_data, golden_path, run_source};
use sheaf_eu::Error;

#[derive(Parser)]
#[command(name = "sheaf-eu", about = "Run expected-utility scenarios over sheaves of lotteries")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a scenario file and print its report.
    Run {
        file: PathBuf,
        /// Write CSV tables into this directory.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Bisection resolution, overriding the file, e.g. 1/1048576.
        #[arg(long)]
        epsilon: Option<String>,
        /// Compare the report with the `.golden` file next to the scenario.
        #[arg(long)]
        golden_check: bool,
    },
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(2) } else { ExitCode::SUCCESS };
        }
    };
    let Command::Run { file, out, epsilon, golden_check } = cli.command;
    let usage = |msg: String| {
        eprintln!("{msg}");
        ExitCode::from(2)
    };
    let epsilon = match epsilon.as_deref().map(parse_rat).transpose() {
        Ok(Some(e)) if e <= int(0) => return usage("--epsilon must be positive".into()),
        Ok(e) => e,
        Err(e) => return usage(format!("--epsilon: {e}")),
    };
    let src = match std::fs::read_to_string(&file) {
        Ok(s) => s,
        Err(e) => return usage(format!("{}: {e}", file.display())),
    };
    let report = match run_source(&src, epsilon) {
        Ok(r) => r,
        Err(e @ (Error::Parse(_) | Error::Unresolved(_))) => return usage(format!("{}: {e}", file.display())),
        Err(e) => {
            eprintln!("{}: {e}", file.display());
            return ExitCode::from(1);
        }
    };
    let text = report.render();
    print!("{text}");
    for (k, t) in report.timings() {
        eprintln!("task {k}: {:.3} ms", t.as_secs_f64() * 1e3);
    }
    let mut code = if report.failures() == 0 { 0 } else { 1 };
    if let Some(dir) = out {
        if let Err(e) = export_plot_data(&report, &dir) {
            eprintln!("{}: {e}", dir.display());
            code = 1;
        }
    }
    if golden_check {
        let golden = golden_path(&file);
        match std::fs::read_to_string(&golden) {
            Ok(g) if g == text => eprintln!("golden: match"),
            Ok(_) => {
                eprintln!("golden: report differs from {}", golden.display());
                code = 1;
            }
            Err(e) => {
                eprintln!("golden: {}: {e}", golden.display());
                code = 1;
            }
        }
    }
    ExitCode::from(code)
}
