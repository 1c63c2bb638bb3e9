//! Command-line front end.

use std::ffi::OsString;
use std::path::PathBuf;

use clap::error::ErrorKind;
use clap::{CommandFactory, Parser, ValueEnum};

use crate::locator::SearchConfig;
use crate::poly::parse_complex;
use crate::report::{emit_csv, emit_json, emit_plot_data, emit_text};
use crate::run::{execute, OutputFormat, RunConfig, SeedSource, Target, DEFAULT_Y_MAX};
use crate::special::ComplexPoint;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum FormatArg {
    Text,
    Json,
    Csv,
}

impl From<FormatArg> for OutputFormat {
    fn from(f: FormatArg) -> Self {
        match f {
            FormatArg::Text => OutputFormat::Text,
            FormatArg::Json => OutputFormat::Json,
            FormatArg::Csv => OutputFormat::Csv,
        }
    }
}

fn parse_target(s: &str) -> Result<Target, String> {
    if s == "sharp" {
        return Ok(Target::Sharp);
    }
    match s.strip_prefix("poly:") {
        Some(coeffs) => coeffs
            .parse()
            .map(Target::Polynomial)
            .map_err(|e| e.to_string()),
        None => Err(format!(
            "expected 'sharp' or 'poly:<coefficients>', got '{s}'"
        )),
    }
}

fn parse_point(s: &str) -> Result<ComplexPoint, String> {
    parse_complex(s).map_err(|e| e.to_string())
}

/// Zeros of the plus-sharp q-zeta function, or of a polynomial, by
/// argument-principle contour search.
#[derive(Debug, Parser)]
#[command(name = "qzeros", version)]
struct Cli {
    /// Deformation parameter, q = exp(-1/a).
    #[arg(long, default_value_t = 750.0)]
    a: f64,
    /// Gaussian parameter.
    #[arg(long, default_value_t = 2.0)]
    d: f64,
    /// Seed from every classical zero ordinate up to this height.
    #[arg(long, conflicts_with_all = ["y", "za"])]
    y_max: Option<f64>,
    /// Seed from this ordinate (repeatable).
    #[arg(long, allow_negative_numbers = true, conflicts_with = "za")]
    y: Vec<f64>,
    /// Seed point for a polynomial target, e.g. 1+2i (repeatable).
    #[arg(long, value_parser = parse_point, allow_hyphen_values = true)]
    za: Vec<ComplexPoint>,
    /// Points per side in the first variant.
    #[arg(long)]
    c: Option<usize>,
    /// Fixed truncation multiplier instead of the automatic choice.
    #[arg(long)]
    b: Option<u32>,
    #[arg(long, value_enum, default_value_t = FormatArg::Text)]
    format: FormatArg,
    /// Emit the y / za / z drift table as CSV instead of the report.
    #[arg(long)]
    plot_data: bool,
    /// `sharp` or `poly:<comma-separated complex coefficients, highest degree first>`.
    #[arg(long, value_parser = parse_target, default_value = "sharp")]
    target: Target,
    /// Write to this file instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,

    /// Points per side available to later levels and variants.
    #[arg(long, value_delimiter = ',')]
    c_schedule: Option<Vec<usize>>,
    #[arg(long)]
    kappa: Option<f64>,
    #[arg(long)]
    rd_cap: Option<f64>,
    #[arg(long)]
    rd_floor: Option<f64>,
    #[arg(long)]
    vv_max: Option<f64>,
    #[arg(long)]
    fo_good_max: Option<u32>,
    #[arg(long)]
    fo_verygood_max: Option<u32>,
    #[arg(long)]
    char_tol: Option<f64>,
    #[arg(long)]
    de_admissible: Option<f64>,
    #[arg(long)]
    seed_residual_max: Option<f64>,
    #[arg(long)]
    de_factor: Option<f64>,
    #[arg(long)]
    de_floor: Option<f64>,
    #[arg(long)]
    max_integrations_per_zero: Option<usize>,
    #[arg(long)]
    level_attempts: Option<usize>,
    #[arg(long)]
    newton_max_iters: Option<usize>,
    #[arg(long)]
    newton_min_gain: Option<f64>,
    #[arg(long)]
    floor_margin: Option<f64>,
}

fn usage_error(kind: ErrorKind, message: impl std::fmt::Display) -> clap::Error {
    Cli::command().error(kind, message)
}

impl Cli {
    fn search_config(&self) -> SearchConfig {
        let mut s = SearchConfig::default();
        macro_rules! apply {
            ($($field:ident),*) => { $( if let Some(v) = self.$field.clone() { s.$field = v; } )* };
        }
        apply!(
            c_schedule,
            kappa,
            rd_cap,
            rd_floor,
            vv_max,
            fo_good_max,
            fo_verygood_max,
            char_tol,
            de_admissible,
            seed_residual_max,
            de_factor,
            de_floor,
            max_integrations_per_zero,
            level_attempts,
            newton_max_iters,
            newton_min_gain,
            floor_margin
        );
        if let Some(c) = self.c {
            s.c_initial = c;
        }
        s
    }

    fn into_config(self) -> Result<RunConfig, clap::Error> {
        if !(self.a > 0.0 && self.a.is_finite() && self.d > 0.0 && self.d.is_finite()) {
            return Err(usage_error(
                ErrorKind::ValueValidation,
                "--a and --d must be positive",
            ));
        }
        let seeds = if let Some(y_max) = self.y_max {
            SeedSource::YMax(y_max)
        } else if !self.y.is_empty() {
            SeedSource::Ordinates(self.y.clone())
        } else if !self.za.is_empty() {
            SeedSource::Points(self.za.clone())
        } else {
            SeedSource::YMax(DEFAULT_Y_MAX)
        };
        match (&self.target, &seeds) {
            (Target::Polynomial(_), SeedSource::YMax(_)) => {
                return Err(usage_error(
                    ErrorKind::MissingRequiredArgument,
                    "a polynomial target needs --y or --za seeds",
                ))
            }
            (Target::Sharp, SeedSource::Points(_)) => {
                return Err(usage_error(
                    ErrorKind::ArgumentConflict,
                    "--za needs a polynomial --target",
                ))
            }
            _ => {}
        }
        let search = self.search_config();
        search
            .validate()
            .map_err(|e| usage_error(ErrorKind::ValueValidation, e))?;
        Ok(RunConfig {
            a: self.a,
            d: self.d,
            seeds,
            b_override: self.b,
            target: self.target,
            search,
            format: self.format.into(),
            plot_data: self.plot_data,
            out: self.out,
            ..RunConfig::default()
        })
    }
}

/// Parse command-line arguments (program name first) into a run
/// configuration.
pub fn parse_cli<I, T>(args: I) -> Result<RunConfig, clap::Error>
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    Cli::try_parse_from(args)?.into_config()
}

/// Run and render; the flag is set when any zero ended failed.
pub fn render(cfg: &RunConfig) -> crate::Result<(String, bool)> {
    let output = execute(cfg)?;
    let text = if cfg.plot_data {
        emit_plot_data(&output)
    } else {
        match cfg.format {
            OutputFormat::Text => emit_text(&output),
            OutputFormat::Json => emit_json(&output),
            OutputFormat::Csv => emit_csv(&output),
        }
    };
    Ok((text, output.any_failed()))
}

/// Full program: returns the process exit status (0 ok, 1 failure, 2 usage).
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cfg = match parse_cli(args) {
        Ok(cfg) => cfg,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 2 } else { 0 };
        }
    };
    let (text, failed) = match render(&cfg) {
        Ok(r) => r,
        Err(e) => {
            eprintln!("error: {e}");
            return 1;
        }
    };
    let written = match &cfg.out {
        Some(path) => std::fs::write(path, &text),
        None => {
            use std::io::Write;
            std::io::stdout().write_all(text.as_bytes())
        }
    };
    if let Err(e) = written {
        eprintln!("error: cannot write output: {e}");
        return 1;
    }
    i32::from(failed)
}
