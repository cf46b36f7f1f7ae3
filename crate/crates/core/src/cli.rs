//! Command-line front end.
//!
//! Exit codes: 0 on success, 1 on a failed check or numerical failure, 2 on
//! invalid arguments.

use std::fmt::Write as _;
use std::fs::File;
use std::io::{self, Write};

use clap::{Args, Parser, Subcommand, ValueEnum};
use num_rational::BigRational;
use num_traits::ToPrimitive;
use serde::Serialize;

use crate::atoms::{simulate_time_series, AtomsSimConfig, FidelityCurve, MAX_ATOMS};
use crate::error::Error;
use crate::pdc::{
    anticlone_fidelity_pdc, clone_fidelity_pdc, m_weights, pdc_final_state_analytic, PdcParameters,
};
use crate::symmetry::DEFAULT_SEED;
use crate::verify::{self, VerifyOptions};

pub const EXIT_OK: i32 = 0;
pub const EXIT_FAILURE: i32 = 1;
pub const EXIT_USAGE: i32 = 2;

/// Column order of the time-series table.
pub const CSV_HEADER: &str = "gamma_t,f_clones,f_opt,f_rand,n_all,n_right";

/// Significant digits written for every decimal in CSV output.
pub const SIGNIFICANT_DIGITS: usize = 12;

#[derive(Debug, Parser)]
#[command(
    name = "stimclone",
    version,
    about = "Quantum cloning by stimulated emission"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Time series of clone fidelities for N three-level atoms.
    Atoms(AtomsArgs),
    /// Parametric down-conversion fidelities or photon-number weights.
    Pdc(PdcArgs),
    /// Run the invariant suite.
    Verify(VerifyArgs),
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Args)]
pub struct AtomsArgs {
    #[arg(long)]
    pub n_atoms: usize,
    #[arg(long)]
    pub gamma_t_max: f64,
    #[arg(long)]
    pub steps: usize,
    #[arg(long, value_enum, default_value = "csv")]
    pub format: Format,
    /// Output file, `-` for standard output.
    #[arg(long, default_value = "-")]
    pub out: String,
}

#[derive(Debug, Args)]
pub struct PdcArgs {
    /// Number of input photons N.
    #[arg(long)]
    pub n_in: Option<usize>,
    /// Photons in mode 1 to post-select on (fidelity mode).
    #[arg(long)]
    pub m_out: Option<usize>,
    /// Interaction time γt (state mode).
    #[arg(long)]
    pub gamma_t: Option<f64>,
    /// Print per-M probability weights of the evolved state.
    #[arg(long)]
    pub weights: bool,
    /// Largest M listed with --weights.
    #[arg(long)]
    pub m_max: Option<usize>,
    /// Table format; plain `name value` lines when omitted.
    #[arg(long, value_enum)]
    pub format: Option<Format>,
    #[arg(long, default_value = "-")]
    pub out: String,
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    /// Run a single named check.
    #[arg(long)]
    pub only: Option<String>,
    #[arg(long, default_value_t = 6)]
    pub max_atoms: usize,
    #[arg(long, default_value_t = DEFAULT_SEED)]
    pub seed: u64,
}

/// Failure carrying the exit code it maps to.
#[derive(Debug)]
pub struct CliError {
    pub code: i32,
    pub message: String,
}

impl CliError {
    fn usage(message: impl Into<String>) -> Self {
        Self {
            code: EXIT_USAGE,
            message: message.into(),
        }
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        let code = match e {
            Error::Domain(_) | Error::EmptyComponent { .. } | Error::NoAntiClones { .. } => {
                EXIT_USAGE
            }
            _ => EXIT_FAILURE,
        };
        Self {
            code,
            message: e.to_string(),
        }
    }
}

impl From<io::Error> for CliError {
    fn from(e: io::Error) -> Self {
        Self {
            code: EXIT_FAILURE,
            message: format!("i/o error: {e}"),
        }
    }
}

type CliResult<T> = Result<T, CliError>;

/// Decimal with `digits` significant digits.
pub fn format_significant(x: f64, digits: usize) -> String {
    if x == 0.0 || !x.is_finite() {
        return if x == 0.0 { "0".into() } else { x.to_string() };
    }
    // exponent after rounding to `digits` places
    let sci = format!("{:.*e}", digits.saturating_sub(1), x);
    let exponent: i64 = sci[sci.find('e').expect("scientific notation") + 1..]
        .parse()
        .expect("integer exponent");
    let decimals = (digits as i64 - 1 - exponent).max(0) as usize;
    format!("{x:.decimals$}")
}

fn csv_field(x: Option<f64>) -> String {
    x.map(|v| format_significant(v, SIGNIFICANT_DIGITS))
        .unwrap_or_default()
}

/// Time series as CSV with a header row and LF line endings.
pub fn curve_to_csv(curve: &FidelityCurve) -> String {
    let mut out = String::new();
    out.push_str(CSV_HEADER);
    out.push('\n');
    for r in &curve.rows {
        let fields = [
            csv_field(Some(r.gamma_t)),
            csv_field(r.f_clones),
            csv_field(r.f_opt),
            csv_field(r.f_rand),
            csv_field(Some(r.n_all)),
            csv_field(Some(r.n_right)),
        ];
        out.push_str(&fields.join(","));
        out.push('\n');
    }
    out
}

fn to_json<T: Serialize + ?Sized>(value: &T) -> CliResult<String> {
    let mut s = serde_json::to_string_pretty(value).map_err(|e| CliError {
        code: EXIT_FAILURE,
        message: format!("serialization failed: {e}"),
    })?;
    s.push('\n');
    Ok(s)
}

fn emit(out: &str, text: &str, stdout: &mut dyn Write) -> CliResult<()> {
    if out == "-" {
        stdout.write_all(text.as_bytes())?;
    } else {
        File::create(out)?.write_all(text.as_bytes())?;
    }
    Ok(())
}

pub fn run_atoms(args: &AtomsArgs, stdout: &mut dyn Write) -> CliResult<()> {
    if !(1..=MAX_ATOMS).contains(&args.n_atoms) {
        return Err(CliError::usage(format!(
            "--n-atoms must be between 1 and {MAX_ATOMS}, got {}",
            args.n_atoms
        )));
    }
    let config = AtomsSimConfig::new(args.n_atoms, args.gamma_t_max, args.steps)?;
    let curve = simulate_time_series(&config)?;
    let text = match args.format {
        Format::Csv => curve_to_csv(&curve),
        Format::Json => to_json(&curve)?,
    };
    emit(&args.out, &text, stdout)
}

#[derive(Serialize)]
struct FidelityLine {
    quantity: &'static str,
    exact: String,
    decimal: f64,
}

#[derive(Serialize)]
struct WeightLine {
    m: usize,
    weight: f64,
}

fn rational_line(quantity: &'static str, r: &BigRational) -> FidelityLine {
    FidelityLine {
        quantity,
        exact: r.to_string(),
        decimal: r.to_f64().unwrap_or(f64::NAN),
    }
}

pub fn run_pdc(args: &PdcArgs, stdout: &mut dyn Write, stderr: &mut dyn Write) -> CliResult<()> {
    let state_mode = args.weights || args.gamma_t.is_some() || args.m_max.is_some();
    let fidelity_mode = args.m_out.is_some();
    match (fidelity_mode, state_mode) {
        (true, false) => run_pdc_fidelity(args, stdout, stderr),
        (false, true) => run_pdc_weights(args, stdout, stderr),
        (true, true) => Err(CliError::usage(
            "--m-out cannot be combined with --gamma-t/--weights/--m-max",
        )),
        (false, false) => Err(CliError::usage(
            "pdc needs either --n-in and --m-out, or --n-in, --gamma-t, --weights and --m-max",
        )),
    }
}

fn run_pdc_fidelity(
    args: &PdcArgs,
    stdout: &mut dyn Write,
    stderr: &mut dyn Write,
) -> CliResult<()> {
    let n = args
        .n_in
        .ok_or_else(|| CliError::usage("--n-in is required"))? as u64;
    let m = args.m_out.expect("fidelity mode has --m-out") as u64;
    if n < 1 || m < n {
        return Err(CliError::usage(format!(
            "need M >= N >= 1, got N={n}, M={m}"
        )));
    }
    let mut lines = vec![rational_line("clone_fidelity", &clone_fidelity_pdc(n, m)?)];
    if m > n {
        lines.push(rational_line(
            "anticlone_fidelity",
            &anticlone_fidelity_pdc(n, m)?,
        ));
    } else {
        writeln!(stderr, "no anti-clones: mode 2 is empty when M = N")?;
    }
    let text = match args.format {
        None => lines.iter().fold(String::new(), |mut s, l| {
            let _ = writeln!(s, "{} {} {:.6}", l.quantity, l.exact, l.decimal);
            s
        }),
        Some(Format::Csv) => {
            lines
                .iter()
                .fold("quantity,exact,decimal\n".to_string(), |mut s, l| {
                    let _ = writeln!(
                        s,
                        "{},{},{}",
                        l.quantity,
                        l.exact,
                        format_significant(l.decimal, SIGNIFICANT_DIGITS)
                    );
                    s
                })
        }
        Some(Format::Json) => to_json(&lines)?,
    };
    emit(&args.out, &text, stdout)
}

fn run_pdc_weights(
    args: &PdcArgs,
    stdout: &mut dyn Write,
    stderr: &mut dyn Write,
) -> CliResult<()> {
    let n = args
        .n_in
        .ok_or_else(|| CliError::usage("--n-in is required"))?;
    let gamma_t = args
        .gamma_t
        .ok_or_else(|| CliError::usage("--gamma-t is required in state mode"))?;
    if !args.weights {
        return Err(CliError::usage("state mode needs --weights"));
    }
    let m_max = args
        .m_max
        .ok_or_else(|| CliError::usage("--m-max is required in state mode"))?;
    if m_max < n {
        return Err(CliError::usage(format!(
            "--m-max must be at least --n-in, got {m_max} < {n}"
        )));
    }
    let auto = PdcParameters::from_gamma_t(n, gamma_t)?;
    let params = PdcParameters::new(n, auto.gamma, auto.cutoff.max(m_max - n))?;
    let state = pdc_final_state_analytic(&params)?;
    let weights = m_weights(&state, m_max)?;
    let sum: f64 = weights.iter().map(|(_, w)| w).sum();
    let deficit = state.norm_deficit();
    let summary = format!(
        "weight_sum {}\nnorm_deficit {:e}\ncutoff {}\n",
        format_significant(sum, SIGNIFICANT_DIGITS),
        deficit,
        params.cutoff
    );
    let rows: Vec<WeightLine> = weights
        .into_iter()
        .map(|(m, weight)| WeightLine { m, weight })
        .collect();
    let text = match args.format {
        None => {
            let mut s = String::new();
            for r in &rows {
                let _ = writeln!(
                    s,
                    "weight {} {}",
                    r.m,
                    format_significant(r.weight, SIGNIFICANT_DIGITS)
                );
            }
            s + &summary
        }
        Some(Format::Csv) => {
            stderr.write_all(summary.as_bytes())?;
            rows.iter().fold("m,weight\n".to_string(), |mut s, r| {
                let _ = writeln!(
                    s,
                    "{},{}",
                    r.m,
                    format_significant(r.weight, SIGNIFICANT_DIGITS)
                );
                s
            })
        }
        Some(Format::Json) => {
            stderr.write_all(summary.as_bytes())?;
            to_json(&rows)?
        }
    };
    emit(&args.out, &text, stdout)
}

/// Prints one line per check; fails if any check fails.
pub fn run_verify(args: &VerifyArgs, stdout: &mut dyn Write) -> CliResult<()> {
    let opts = VerifyOptions {
        only: args.only.clone(),
        max_atoms: args.max_atoms,
        seed: args.seed,
    };
    let outcomes = verify::run(&opts)?;
    let mut failed = Vec::new();
    for o in &outcomes {
        writeln!(
            stdout,
            "{} {:<20} deviation={:.3e} tolerance={:.1e}  {}",
            if o.passed { "PASS" } else { "FAIL" },
            o.name,
            o.deviation,
            o.tolerance,
            o.detail
        )?;
        if !o.passed {
            failed.push(o.name);
        }
    }
    writeln!(
        stdout,
        "{} of {} checks passed",
        outcomes.len() - failed.len(),
        outcomes.len()
    )?;
    if failed.is_empty() {
        Ok(())
    } else {
        Err(CliError {
            code: EXIT_FAILURE,
            message: format!("failed checks: {}", failed.join(", ")),
        })
    }
}

pub fn execute(cli: &Cli, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32 {
    let result = match &cli.command {
        Command::Atoms(a) => run_atoms(a, stdout),
        Command::Pdc(a) => run_pdc(a, stdout, stderr),
        Command::Verify(a) => run_verify(a, stdout),
    };
    match result {
        Ok(()) => EXIT_OK,
        Err(e) => {
            let _ = writeln!(stderr, "error: {}", e.message);
            if e.code == EXIT_USAGE {
                let _ = writeln!(stderr, "run `stimclone help` for usage");
            }
            e.code
        }
    }
}

/// Parses `args` (including the program name) and runs the command.
pub fn main_with_args<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    match Cli::try_parse_from(args) {
        Ok(cli) => execute(&cli, stdout, stderr),
        Err(e) => {
            let code = e.exit_code();
            let rendered = e.render().to_string();
            let _ = if e.use_stderr() {
                stderr.write_all(rendered.as_bytes())
            } else {
                stdout.write_all(rendered.as_bytes())
            };
            code
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn run(args: &[&str]) -> (i32, String, String) {
        let mut out = Vec::new();
        let mut err = Vec::new();
        let code = main_with_args(
            std::iter::once("stimclone").chain(args.iter().copied()),
            &mut out,
            &mut err,
        );
        (
            code,
            String::from_utf8(out).unwrap(),
            String::from_utf8(err).unwrap(),
        )
    }

    #[test]
    fn significant_digits() {
        assert_eq!(format_significant(5.0 / 6.0, 12), "0.833333333333");
        assert_eq!(format_significant(0.02, 12), "0.0200000000000");
        assert_eq!(format_significant(2.0, 12), "2.00000000000");
        assert_eq!(format_significant(0.0, 12), "0");
        assert_eq!(format_significant(9.9999999999999, 12), "10.0000000000");
        assert_eq!(format_significant(123.456, 4), "123.5");
    }

    #[test]
    fn atoms_rejects_zero_atoms() {
        let (code, out, err) = run(&[
            "atoms",
            "--n-atoms",
            "0",
            "--gamma-t-max",
            "1",
            "--steps",
            "3",
        ]);
        assert_eq!(code, EXIT_USAGE);
        assert!(out.is_empty());
        assert!(err.contains("--n-atoms"));
    }

    #[test]
    fn atoms_rejects_missing_flags() {
        assert_eq!(run(&["atoms", "--n-atoms", "2"]).0, EXIT_USAGE);
        assert_eq!(
            run(&[
                "atoms",
                "--n-atoms",
                "-1",
                "--gamma-t-max",
                "1",
                "--steps",
                "3"
            ])
            .0,
            EXIT_USAGE
        );
        assert_eq!(
            run(&[
                "atoms",
                "--n-atoms",
                "2",
                "--gamma-t-max",
                "0",
                "--steps",
                "3"
            ])
            .0,
            EXIT_USAGE
        );
        assert_eq!(
            run(&[
                "atoms",
                "--n-atoms",
                "9",
                "--gamma-t-max",
                "1",
                "--steps",
                "3"
            ])
            .0,
            EXIT_USAGE
        );
    }

    #[test]
    fn atoms_csv_layout() {
        let (code, out, _) = run(&[
            "atoms",
            "--n-atoms",
            "1",
            "--gamma-t-max",
            "1",
            "--steps",
            "2",
        ]);
        assert_eq!(code, EXIT_OK);
        let lines: Vec<&str> = out.lines().collect();
        assert_eq!(lines[0], CSV_HEADER);
        assert_eq!(lines.len(), 4);
        assert_eq!(lines[1], "0,,,,1.00000000000,1.00000000000");
        assert!(!out.contains('\r'));
    }

    #[test]
    fn pdc_fidelity_lines() {
        let (code, out, _) = run(&["pdc", "--n-in", "1", "--m-out", "2"]);
        assert_eq!(code, EXIT_OK);
        assert_eq!(
            out,
            "clone_fidelity 5/6 0.833333\nanticlone_fidelity 2/3 0.666667\n"
        );
        let (code, out, _) = run(&["pdc", "--n-in", "3", "--m-out", "3"]);
        assert_eq!(code, EXIT_OK);
        assert_eq!(out, "clone_fidelity 1 1.000000\n");
    }

    #[test]
    fn pdc_usage_errors() {
        assert_eq!(run(&["pdc", "--n-in", "2", "--m-out", "1"]).0, EXIT_USAGE);
        assert_eq!(run(&["pdc", "--n-in", "0", "--m-out", "1"]).0, EXIT_USAGE);
        assert_eq!(run(&["pdc", "--n-in", "1"]).0, EXIT_USAGE);
        assert_eq!(
            run(&["pdc", "--n-in", "1", "--gamma-t", "0.3", "--m-max", "4"]).0,
            EXIT_USAGE
        );
        assert_eq!(
            run(&["pdc", "--n-in", "1", "--m-out", "2", "--weights"]).0,
            EXIT_USAGE
        );
        assert_eq!(
            run(&[
                "pdc",
                "--n-in",
                "1",
                "--gamma-t",
                "-0.3",
                "--weights",
                "--m-max",
                "4"
            ])
            .0,
            EXIT_USAGE
        );
    }

    #[test]
    fn pdc_weights_text() {
        let (code, out, _) = run(&[
            "pdc",
            "--n-in",
            "1",
            "--gamma-t",
            "0.3",
            "--weights",
            "--m-max",
            "5",
        ]);
        assert_eq!(code, EXIT_OK);
        let weights: Vec<f64> = out
            .lines()
            .filter(|l| l.starts_with("weight "))
            .map(|l| l.split(' ').nth(2).unwrap().parse().unwrap())
            .collect();
        assert_eq!(weights.len(), 5);
        assert!(weights.iter().sum::<f64>() <= 1.0);
        let deficit: f64 = out
            .lines()
            .find_map(|l| l.strip_prefix("norm_deficit "))
            .unwrap()
            .parse()
            .unwrap();
        assert!(deficit.abs() < 1e-12);
    }

    #[test]
    fn verify_unknown_check() {
        assert_eq!(run(&["verify", "--only", "bogus"]).0, EXIT_USAGE);
    }

    #[test]
    fn verify_single_check() {
        let (code, out, _) = run(&["verify", "--only", "pdc-identity"]);
        assert_eq!(code, EXIT_OK);
        assert!(out.starts_with("PASS pdc-identity"));
        assert!(out.contains("1 of 1 checks passed"));
    }
}
