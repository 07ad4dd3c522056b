//! Command-line driver for the quotient catalog.

use std::process::ExitCode;

use clap::{Parser, Subcommand};

use cyquot::catalog::{probe_case, run_case, scenarios, subgroup_sweep, CaseReport};
use cyquot::error::Error;
use cyquot::product::{m_table, m_table_labels};

#[derive(Parser)]
#[command(
    name = "cyquot",
    about = "Free quotients of anticanonical Calabi-Yau threefolds in products of del Pezzo surfaces"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Print the table of anticanonical divisibility bounds for all
    /// products of del Pezzo surfaces.
    MTable,
    /// List the catalog cases.
    Cases,
    /// Run one case and print its checks.
    Run {
        /// Case name, as shown by `cases`.
        name: String,
        /// Emit the report as JSON.
        #[arg(long)]
        json: bool,
    },
    /// Print the quotient Hodge diamond of a free case.
    Diamond {
        /// Case name, as shown by `cases`.
        name: String,
    },
    /// Hodge numbers of the intermediate quotients for every subgroup.
    Sweep {
        /// Case name of a free family.
        name: String,
    },
    /// Scan an explicit member over a finite field for singular points.
    Probe {
        /// Case name with a pinned explicit section.
        name: String,
        /// The prime to reduce modulo.
        #[arg(long)]
        prime: u64,
    },
}

fn json_escape(s: &str) -> String {
    s.replace('\\', "\\\\").replace('"', "\\\"")
}

fn print_report_json(report: &CaseReport) {
    println!("{{");
    println!("  \"name\": \"{}\",", json_escape(&report.name));
    println!("  \"verdict\": \"{}\",", report.verdict);
    println!("  \"pass\": {},", report.pass());
    match report.fixed_points {
        Some(n) => println!("  \"fixed_points\": {n},"),
        None => println!("  \"fixed_points\": null,"),
    }
    match report.invariant_dimension {
        Some(n) => println!("  \"invariant_dimension\": {n},"),
        None => println!("  \"invariant_dimension\": null,"),
    }
    match &report.diamond {
        Some(d) => println!(
            "  \"diamond\": {{\"h11\": {}, \"h12\": {}, \"chi\": {}, \"height\": {}}},",
            d.h11, d.h12, d.chi, d.height
        ),
        None => println!("  \"diamond\": null,"),
    }
    println!("  \"checks\": [");
    for (i, c) in report.checks.iter().enumerate() {
        let comma = if i + 1 < report.checks.len() { "," } else { "" };
        println!(
            "    {{\"label\": \"{}\", \"pass\": {}, \"detail\": \"{}\"}}{comma}",
            json_escape(&c.label),
            c.pass,
            json_escape(&c.detail)
        );
    }
    println!("  ]");
    println!("}}");
}

fn print_report(report: &CaseReport) {
    println!("case    : {}", report.name);
    println!("verdict : {}", report.verdict);
    if let Some(n) = report.fixed_points {
        println!("fixed   : {n} points");
    }
    if let Some(n) = report.invariant_dimension {
        println!("sections: {n} invariant");
    }
    if let Some(d) = &report.diamond {
        println!(
            "diamond : h11={} h12={} chi={} height={}",
            d.h11, d.h12, d.chi, d.height
        );
        for row in d.rows() {
            println!("          {row}");
        }
    }
    for c in &report.checks {
        let mark = if c.pass { "ok " } else { "FAIL" };
        println!("[{mark}] {} -- {}", c.label, c.detail);
    }
}

fn exit_for(err: &Error) -> ExitCode {
    match err {
        Error::NeedsExtension(_) | Error::BadPrime { .. } => ExitCode::from(3),
        Error::UnknownCase(_) | Error::InvalidAction(_) => ExitCode::from(64),
        _ => ExitCode::from(2),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match cli.command {
        Command::MTable => {
            let labels = m_table_labels();
            let table = m_table();
            print!("m");
            for (name, _) in &labels {
                print!("\t{name}");
            }
            println!();
            for (i, (name, _)) in labels.iter().enumerate() {
                print!("{name}");
                for j in 0..labels.len() {
                    print!("\t{}", table[i][j]);
                }
                println!();
            }
            ExitCode::SUCCESS
        }
        Command::Cases => {
            for s in scenarios() {
                let diamond = match s.diamond {
                    Some((h11, h12)) => format!("h11={h11} h12={h12}"),
                    None => "-".to_string(),
                };
                println!("{:16} {:12} {:16} {}", s.name, s.verdict, diamond, s.summary);
            }
            ExitCode::SUCCESS
        }
        Command::Run { name, json } => match run_case(&name) {
            Ok(report) => {
                if json {
                    print_report_json(&report);
                } else {
                    print_report(&report);
                }
                if report.pass() {
                    ExitCode::SUCCESS
                } else {
                    ExitCode::from(1)
                }
            }
            Err(err) => {
                eprintln!("error: {err}");
                exit_for(&err)
            }
        },
        Command::Diamond { name } => match run_case(&name) {
            Ok(report) => match &report.diamond {
                Some(d) => {
                    for row in d.rows() {
                        println!("{row}");
                    }
                    ExitCode::SUCCESS
                }
                None => {
                    eprintln!("error: case {name} has no quotient diamond ({})", report.verdict);
                    ExitCode::from(2)
                }
            },
            Err(err) => {
                eprintln!("error: {err}");
                exit_for(&err)
            }
        },
        Command::Sweep { name } => match subgroup_sweep(&name) {
            Ok(rows) => {
                println!("order\tpi1\th11\th12\tcount");
                for r in rows {
                    println!(
                        "{}\t{}\t{}\t{}\t{}",
                        r.order, r.fundamental_group, r.h11, r.h12, r.multiplicity
                    );
                }
                ExitCode::SUCCESS
            }
            Err(err) => {
                eprintln!("error: {err}");
                exit_for(&err)
            }
        },
        Command::Probe { name, prime } => match probe_case(&name, prime) {
            Ok(report) => {
                println!(
                    "prime {}: scanned {} point pairs, {} singular",
                    report.prime,
                    report.scanned,
                    report.singular.len()
                );
                for s in &report.singular {
                    println!("singular: {s}");
                }
                println!("note: {}", report.evidence);
                if report.singular.is_empty() {
                    ExitCode::SUCCESS
                } else {
                    ExitCode::from(1)
                }
            }
            Err(err) => {
                eprintln!("error: {err}");
                exit_for(&err)
            }
        },
    }
}
