//! The `waterbed` command-line tool.

pub mod paper;
pub mod sweep;
pub mod sysfile;

use std::ffi::OsString;
use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use crate::error::{Result, WaterbedError};
use crate::integrals::{
    identity_integral, identity_quadrature, waterbed_verify_with, QuadratureConfig, VerifyOptions, WaterbedReport,
};
use paper::PaperRow;

pub const EXIT_OK: i32 = 0;
pub const EXIT_ERROR: i32 = 1;
pub const EXIT_CHECK_FAILED: i32 = 2;

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Text,
    Json,
    Csv,
}

#[derive(Debug, Parser)]
#[command(
    name = "waterbed",
    version,
    about = "Log-sensitivity integral checks for discrete-time feedback loops"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,

    #[command(flatten)]
    pub common: Common,
}

#[derive(Debug, Args)]
pub struct Common {
    /// Largest accepted |numeric - analytic| discrepancy.
    #[arg(long, global = true, default_value_t = 1e-3)]
    pub tol: f64,

    /// Absolute error target for each quadrature.
    #[arg(long = "quad-tol", global = true, default_value_t = 1e-8)]
    pub quad_tol: f64,

    /// Number of sweep samples.
    #[arg(long, global = true, default_value_t = 512)]
    pub points: usize,

    /// Write output here instead of standard output.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,

    #[arg(long, global = true, value_enum, default_value_t = Format::Text)]
    pub format: Format,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Verify the integral constraints for a system file.
    Analyze { file: PathBuf },
    /// Reproduce the bundled example values and crossover frequencies.
    VerifyPaper,
    /// Sample ln|S| and ln|T| (det forms for MIMO) on a uniform grid.
    Sweep { file: PathBuf },
    /// Compare the quadrature of ln(1 - 2a cos x + a^2) with its closed form.
    Identity {
        #[arg(allow_negative_numbers = true)]
        a: f64,
    },
}

fn read(path: &Path) -> Result<String> {
    fs::read_to_string(path).map_err(|source| WaterbedError::Io {
        path: path.to_path_buf(),
        source,
    })
}

fn emit(out: &Option<PathBuf>, body: &[u8]) -> Result<()> {
    match out {
        Some(path) => fs::write(path, body).map_err(|source| WaterbedError::Io {
            path: path.clone(),
            source,
        }),
        None => io::stdout().write_all(body).map_err(|source| WaterbedError::Io {
            path: PathBuf::from("<stdout>"),
            source,
        }),
    }
}

fn json<T: Serialize>(v: &T) -> Vec<u8> {
    let mut s = serde_json::to_string_pretty(v).expect("reports always serialize");
    s.push('\n');
    s.into_bytes()
}

fn csv_num(v: Option<f64>) -> String {
    v.map_or_else(String::new, |x| format!("{x:.16e}"))
}

fn report_csv(r: &WaterbedReport, tol: f64) -> String {
    let (s, t) = if r.is_mimo() {
        ("ln|det S|", "ln|det T|")
    } else {
        ("ln|S|", "ln|T|")
    };
    let mut out = String::from("quantity,numeric,analytic,discrepancy,passed\n");
    for (name, numeric, analytic, d) in [
        (s, r.numeric_s_integral.value(), r.analytic_s, r.discrepancies.s),
        (t, r.numeric_t_integral.value(), r.analytic_t, r.discrepancies.t),
    ] {
        let passed = matches!(d, Some(v) if v <= tol);
        out.push_str(&format!(
            "int {name},{},{},{},{passed}\n",
            csv_num(numeric),
            csv_num(analytic),
            csv_num(d)
        ));
    }
    out
}

fn table_text(rows: &[PaperRow]) -> String {
    let cell = |v: Option<f64>| v.map_or_else(|| "n/a".to_string(), |x| format!("{x:.4}"));
    let mut out = format!(
        "{:<8} {:<24} {:>10} {:>10} {:>10} {:>8}  {}\n",
        "example", "quantity", "numeric", "reference", "analytic", "tol", "result"
    );
    for r in rows {
        out.push_str(&format!(
            "{:<8} {:<24} {:>10} {:>10.4} {:>10} {:>8.0e}  {}\n",
            r.example,
            r.quantity,
            cell(r.numeric),
            r.reference,
            cell(r.analytic),
            r.tolerance,
            if r.passed { "PASS" } else { "FAIL" }
        ));
    }
    out
}

fn table_csv(rows: &[PaperRow]) -> String {
    let mut out = String::from("example,quantity,numeric,reference,analytic,tolerance,passed\n");
    for r in rows {
        out.push_str(&format!(
            "{},{},{},{:.16e},{},{:.16e},{}\n",
            r.example,
            r.quantity,
            csv_num(r.numeric),
            r.reference,
            csv_num(r.analytic),
            r.tolerance,
            r.passed
        ));
    }
    out
}

#[derive(Serialize)]
struct IdentityOutput {
    a: f64,
    quadrature: f64,
    closed_form: f64,
    difference: f64,
}

/// Runs one command and returns its exit code. Errors are returned, not
/// printed.
pub fn run(cli: &Cli) -> Result<i32> {
    let c = &cli.common;
    if c.tol.is_nan() || c.tol <= 0.0 {
        return Err(WaterbedError::InvalidConfig(format!(
            "--tol must be positive, got {}",
            c.tol
        )));
    }
    let cfg = QuadratureConfig::with_tol(c.quad_tol);
    cfg.validate()?;

    match &cli.command {
        Command::Analyze { file } => {
            let sys = sysfile::parse_system_file(&read(file)?)?;
            let loaded = sys.load()?;
            let opts = VerifyOptions {
                realization: loaded.realization.clone(),
                label: (!sys.label.is_empty()).then(|| sys.label.clone()),
                ..VerifyOptions::default()
            };
            let report = waterbed_verify_with(&loaded.system, &cfg, &opts)?;
            let body = match c.format {
                Format::Text => report.to_string().into_bytes(),
                Format::Json => json(&report),
                Format::Csv => report_csv(&report, c.tol).into_bytes(),
            };
            emit(&c.out, &body)?;
            Ok(if report.passes(c.tol) {
                EXIT_OK
            } else {
                EXIT_CHECK_FAILED
            })
        }
        Command::VerifyPaper => {
            let rows = paper::paper_table(&cfg, c.tol)?;
            let body = match c.format {
                Format::Text => table_text(&rows).into_bytes(),
                Format::Json => json(&rows),
                Format::Csv => table_csv(&rows).into_bytes(),
            };
            emit(&c.out, &body)?;
            Ok(if rows.iter().all(|r| r.passed) {
                EXIT_OK
            } else {
                EXIT_CHECK_FAILED
            })
        }
        Command::Sweep { file } => {
            let loaded = sysfile::parse_system_file(&read(file)?)?.load()?;
            let mimo = matches!(loaded.system, crate::integrals::LoopSystem::Mimo(_));
            let records = sweep::sweep(&loaded.system, c.points)?;
            let mut body = Vec::new();
            let written = match c.format {
                Format::Csv | Format::Text => sweep::write_csv(&records, mimo, &mut body),
                Format::Json => sweep::write_json(&records, mimo, &mut body),
            };
            written.expect("writing to memory cannot fail");
            emit(&c.out, &body)?;
            Ok(EXIT_OK)
        }
        Command::Identity { a } => {
            if !a.is_finite() {
                return Err(WaterbedError::InvalidConfig(format!("a must be finite, got {a}")));
            }
            let quadrature = identity_quadrature(*a, &cfg)?.value;
            let closed_form = identity_integral(*a);
            let out = IdentityOutput {
                a: *a,
                quadrature,
                closed_form,
                difference: (quadrature - closed_form).abs(),
            };
            let body = match c.format {
                Format::Text => format!(
                    "a: {}\nquadrature: {:.10}\nclosed form: {:.10}\ndifference: {:.3e}\n",
                    out.a, out.quadrature, out.closed_form, out.difference
                )
                .into_bytes(),
                Format::Json => json(&out),
                Format::Csv => format!(
                    "a,quadrature,closed_form,difference\n{:.16e},{:.16e},{:.16e},{:.16e}\n",
                    out.a, out.quadrature, out.closed_form, out.difference
                )
                .into_bytes(),
            };
            emit(&c.out, &body)?;
            Ok(if out.difference <= c.tol {
                EXIT_OK
            } else {
                EXIT_CHECK_FAILED
            })
        }
    }
}

/// Parses `args`, runs the command and maps errors to exit code 1.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_ERROR } else { EXIT_OK };
            let _ = e.print();
            return code;
        }
    };
    match run(&cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            EXIT_ERROR
        }
    }
}
