use std::io::Write;
use std::process::ExitCode;

use clap::error::ErrorKind;
use clap::Parser;

mod args;
mod commands;
mod output;

use args::Cli;

/// Exit status for bad input data or usage; 1 is reserved for internal
/// failures such as an unwritable output directory.
const EXIT_DATA: u8 = 2;
const EXIT_INTERNAL: u8 = 1;

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) => {
            let _ = e.print();
            return ExitCode::SUCCESS;
        }
        Err(e) => {
            let detail = e.kind().as_str().unwrap_or("invalid arguments");
            let msg = e.to_string();
            let first = msg.lines().next().unwrap_or(detail).trim_start_matches("error: ");
            eprintln!("ERROR Usage: {first}");
            return ExitCode::from(EXIT_DATA);
        }
    };

    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or(if cli.verbose {
        "info"
    } else {
        "warn"
    }))
    .format_timestamp(None)
    .init();

    match commands::run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            let (code, status) = classify(&err);
            let mut stderr = std::io::stderr().lock();
            let _ = writeln!(stderr, "ERROR {code}: {}", single_line(&err));
            ExitCode::from(status)
        }
    }
}

fn classify(err: &anyhow::Error) -> (&'static str, u8) {
    if let Some(e) = err.downcast_ref::<langequity::Error>() {
        return (e.code(), EXIT_DATA);
    }
    if err.is::<args::UsageError>() {
        return ("Usage", EXIT_DATA);
    }
    ("Internal", EXIT_INTERNAL)
}

/// The error chain on one line, outermost context first.
fn single_line(err: &anyhow::Error) -> String {
    let mut parts: Vec<String> = Vec::new();
    for cause in err.chain() {
        let text = cause.to_string();
        // library messages already embed their source
        if !parts.last().is_some_and(|p| p.contains(&text)) {
            parts.push(text);
        }
    }
    parts.join(": ").replace('\n', " ")
}
