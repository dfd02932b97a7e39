use std::io::Write;
use std::path::PathBuf;

use clap::error::ErrorKind;
use clap::Parser;

use super::{render_console, render_junit_xml, run_with, select, FilterSpec, RunConfig};
use crate::deathtest;
use crate::xunit::{TestRegistry, TestStatus};

pub const EXIT_OK: i32 = 0;
pub const EXIT_FAILED: i32 = 1;
pub const EXIT_BAD_FLAGS: i32 = 2;

#[derive(Debug, Parser)]
#[command(about = "Run the registered tests")]
struct Args {
    /// Test selection: POSITIVE[-NEGATIVE], each a ':'-separated list of
    /// globs over Suite.Test names ('*' and '?').
    #[arg(long, value_name = "SPEC")]
    filter: Option<String>,
    /// Print the selected test names and run nothing.
    #[arg(long)]
    list: bool,
    /// Write a JUnit XML report to PATH.
    #[arg(long, value_name = "PATH")]
    xml: Option<PathBuf>,
    #[arg(long = "internal-death-statement", hide = true)]
    internal_death_statement: Option<String>,
}

/// Entry point for a test executable: `std::process::exit(cli_main(&registry, args))`.
pub fn cli_main(registry: &TestRegistry, argv: impl IntoIterator<Item = String>) -> i32 {
    let argv: Vec<String> = argv.into_iter().collect();
    cli_run(
        registry,
        &argv,
        &mut std::io::stdout(),
        &mut std::io::stderr(),
    )
}

/// [`cli_main`] with explicit output streams.
pub fn cli_run(
    registry: &TestRegistry,
    argv: &[String],
    out: &mut dyn Write,
    err: &mut dyn Write,
) -> i32 {
    if let Some(code) = deathtest::run_requested_statement(registry, argv) {
        return code;
    }
    let args = match Args::try_parse_from(argv) {
        Ok(args) => args,
        Err(e) => {
            let code = match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => {
                    let _ = write!(out, "{e}");
                    return EXIT_OK;
                }
                _ => EXIT_BAD_FLAGS,
            };
            let _ = write!(err, "{}", e.render());
            return code;
        }
    };
    let config = RunConfig {
        filter: args
            .filter
            .as_deref()
            .map(FilterSpec::parse)
            .unwrap_or_default(),
        xml_output_path: args.xml,
        list_only: args.list,
    };

    for warning in registry.warnings() {
        let _ = writeln!(err, "warning: {warning}");
    }

    if config.list_only {
        for def in select(registry, &config.filter) {
            let _ = writeln!(out, "{}", def.id());
        }
        return EXIT_OK;
    }

    let report = run_with(registry, &config, |record| {
        if record.status == TestStatus::Failed {
            for f in &record.failures {
                let _ = writeln!(
                    err,
                    "{}: {} failure at {}: {}",
                    record.id, f.severity, f.location, f.message
                );
            }
        }
    });
    let _ = write!(out, "{}", render_console(&report));

    if let Some(path) = &config.xml_output_path {
        if let Err(e) = std::fs::write(path, render_junit_xml(&report)) {
            let _ = writeln!(
                err,
                "error: cannot write XML report to {}: {e}",
                path.display()
            );
            return EXIT_FAILED;
        }
    }
    if report.all_passed() {
        EXIT_OK
    } else {
        EXIT_FAILED
    }
}
