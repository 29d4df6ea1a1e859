//! The `nspec` command line.
//!
//! Exit codes: 0 when every assertion holds (or every expected failure
//! occurs), 1 when an assertion fails, 2 for usage, configuration or input
//! errors.

pub mod config;
pub mod reproduce;

use std::ffi::OsString;
use std::fmt::Write as _;
use std::io::Write;
use std::path::PathBuf;

use clap::{Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::Value;

use crate::error::{Error, Result};
use crate::shell::{neumann_spectrum, ShellSpec};
use crate::trial::{verify_inequalities, InequalityReport};
use config::RunConfig;

/// Formats a value with 10 significant digits.
pub fn fmt_sig(x: f64) -> String {
    if x == 0.0 || !x.is_finite() {
        return format!("{x}");
    }
    let digits = 10i32;
    let mag = x.abs().log10().floor() as i32;
    if (-5..15).contains(&mag) {
        let decimals = (digits - 1 - mag).max(0) as usize;
        format!("{x:.decimals$}")
    } else {
        format!("{x:.9e}")
    }
}

fn round_sig(x: f64) -> f64 {
    if x == 0.0 || !x.is_finite() {
        return x;
    }
    format!("{x:.9e}").parse().unwrap_or(x)
}

fn round_value(v: &mut Value) {
    match v {
        Value::Number(n) if n.is_f64() => {
            if let Some(r) = n.as_f64().map(round_sig).and_then(serde_json::Number::from_f64) {
                *n = r;
            }
        }
        Value::Array(a) => a.iter_mut().for_each(round_value),
        Value::Object(o) => o.values_mut().for_each(round_value),
        _ => {}
    }
}

/// Pretty JSON with every float rounded to 10 significant digits.
pub fn to_json<T: Serialize>(x: &T) -> String {
    let mut v = serde_json::to_value(x).expect("reports serialize");
    round_value(&mut v);
    serde_json::to_string_pretty(&v).expect("values serialize") + "\n"
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Parser)]
#[command(name = "nspec", version, about = "Neumann spectra of shells and planar domains")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Shell spectrum counted with multiplicity.
    Shell {
        #[arg(long, default_value_t = 0.0)]
        alpha: f64,
        #[arg(long, default_value_t = 1.0)]
        beta: f64,
        #[arg(long, default_value_t = 2)]
        dim: usize,
        #[arg(long, default_value_t = 6)]
        count: usize,
        #[arg(long, value_enum, default_value_t = Format::Csv)]
        format: Format,
        #[arg(long)]
        output: Option<PathBuf>,
    },
    /// Inequality report for a domain described by a TOML file.
    Verify {
        config: PathBuf,
        /// Inequality expected to fail: mu2, mu3, mu4 or mu5.
        #[arg(long = "expect-fail")]
        expect_fail: Vec<String>,
        #[arg(long, value_enum, default_value_t = Format::Json)]
        format: Format,
        #[arg(long)]
        output: Option<PathBuf>,
    },
    /// A named experiment.
    Reproduce {
        #[arg(value_parser = clap::builder::PossibleValuesParser::new(reproduce::EXPERIMENTS))]
        name: String,
        #[arg(long, value_enum, default_value_t = Format::Csv)]
        format: Format,
        #[arg(long)]
        output: Option<PathBuf>,
    },
}

fn emit(text: &str, output: &Option<PathBuf>, out: &mut dyn Write) -> Result<()> {
    match output {
        Some(p) => std::fs::write(p, text)?,
        None => out.write_all(text.as_bytes())?,
    }
    Ok(())
}

/// `name,lhs,rhs,margin,error_estimate,applicable,equality,pass`.
pub fn report_csv(r: &InequalityReport) -> String {
    let mut s = String::from("name,lhs,rhs,margin,error_estimate,applicable,equality,pass\n");
    for i in &r.inequalities {
        let _ = writeln!(
            s,
            "{},{},{},{},{},{},{},{}",
            i.name,
            fmt_sig(i.lhs),
            fmt_sig(i.rhs),
            fmt_sig(i.margin),
            fmt_sig(i.error_estimate),
            i.applicable,
            i.equality,
            i.pass
        );
    }
    s
}

fn inequality_name(short: &str) -> Result<&'static str> {
    use crate::trial::{MU2, MU3, MU4, MU5};
    Ok(match short {
        "mu2" => MU2,
        "mu3" => MU3,
        "mu4" => MU4,
        "mu5" => MU5,
        _ => return Err(Error::Parse(format!("unknown inequality {short:?}; expected mu2, mu3, mu4 or mu5"))),
    })
}

/// Whether the report meets the expectation: applicable inequalities hold
/// except the expected failures, which must fail.
pub fn verdict(r: &InequalityReport, expect_fail: &[&str]) -> bool {
    r.inequalities.iter().all(|i| {
        if expect_fail.contains(&i.name.as_str()) {
            !i.pass
        } else {
            !i.applicable || i.pass
        }
    })
}

fn execute(cli: Cli, out: &mut dyn Write) -> Result<bool> {
    match cli.command {
        Command::Shell { alpha, beta, dim, count, format, output } => {
            let t = neumann_spectrum(&ShellSpec::new(alpha, beta, dim)?, count)?;
            let text = match format {
                Format::Csv => t.to_csv(),
                Format::Json => to_json(&t),
            };
            emit(&text, &output, out)?;
            Ok(true)
        }
        Command::Verify { config, expect_fail, format, output } => {
            let expect = expect_fail.iter().map(|s| inequality_name(s)).collect::<Result<Vec<_>>>()?;
            let cfg = RunConfig::load(&config)?;
            let domain = cfg.domain()?;
            let rep = verify_inequalities(&cfg.label(), &domain, &cfg.options(&domain))?;
            let text = match format {
                Format::Csv => report_csv(&rep),
                Format::Json => to_json(&rep),
            };
            emit(&text, &output, out)?;
            Ok(verdict(&rep, &expect))
        }
        Command::Reproduce { name, format, output } => {
            let e = reproduce::run(&name)?;
            let text = match format {
                Format::Csv => e.to_csv(),
                Format::Json => to_json(&e),
            };
            emit(&text, &output, out)?;
            Ok(e.pass)
        }
    }
}

/// Runs the command line and returns the exit code.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = write!(err, "{e}");
            return if e.use_stderr() { 2 } else { 0 };
        }
    };
    match execute(cli, out) {
        Ok(true) => 0,
        Ok(false) => 1,
        Err(e @ (Error::NonConvergence { .. } | Error::SearchFailure { .. })) => {
            let _ = writeln!(err, "error: {e}");
            1
        }
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            2
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn significant_digits() {
        assert_eq!(fmt_sig(3.389957716671889), "3.389957717");
        assert_eq!(fmt_sig(0.0), "0");
        assert_eq!(fmt_sig(1.5e-9), "1.500000000e-9");
        assert_eq!(round_sig(29.305909123456), 29.30590912);
    }
}
