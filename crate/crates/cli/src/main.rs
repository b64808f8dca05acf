mod args;
mod commands;

use std::fs;
use std::process::ExitCode;

use clap::Parser;
use serde::Serialize;
use serde_json::Value;

use args::{Cli, Command};

const EXIT_PASS: u8 = 0;
const EXIT_FAIL: u8 = 1;
const EXIT_USAGE: u8 = 2;

fn render(v: &Value, indent: usize) -> String {
    if indent == 0 {
        return v.to_string();
    }
    let pad = vec![b' '; indent];
    let mut buf = Vec::new();
    let mut ser = serde_json::Serializer::with_formatter(&mut buf, serde_json::ser::PrettyFormatter::with_indent(&pad));
    v.serialize(&mut ser).expect("serializing a JSON value cannot fail");
    String::from_utf8(buf).expect("serde_json emits UTF-8")
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = match &cli.command {
        Command::JetCoeffs(a) => commands::jet_coeffs(a),
        Command::Irreducibility(a) => commands::irreducibility(a),
        Command::Curvature(a) => commands::curvature(a),
        Command::CocycleCheck(a) => commands::cocycle_check(a),
        Command::IdentityCheck(a) => commands::identity_check(a),
        Command::Wilkins(a) => commands::wilkins(a),
        Command::Tridisc(a) => commands::tridisc(a),
        Command::VerifyAll(a) => commands::verify_all(a),
    };
    let report = match outcome {
        Ok(r) => r,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(EXIT_USAGE);
        }
    };
    let text = render(&report.document, cli.json_indent);
    if let Some(path) = &cli.output {
        if let Err(e) = fs::write(path, format!("{text}\n")) {
            eprintln!("error: cannot write {}: {e}", path.display());
            return ExitCode::from(EXIT_USAGE);
        }
    }
    if !cli.quiet {
        for line in &report.lines {
            eprintln!("{line}");
        }
        println!("{text}");
    }
    ExitCode::from(if report.passed { EXIT_PASS } else { EXIT_FAIL })
}
