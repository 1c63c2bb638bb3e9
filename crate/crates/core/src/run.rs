//! One complete search: build the seeds for the chosen target, run the
//! variants, and hand the records to the emitters.

use std::path::PathBuf;

use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::locator::{run_variants, SearchConfig, Seed, ZeroRecord};
use crate::poly::Polynomial;
use crate::sharp::{linear_approximation, select_truncation, SharpParams, SharpZeta};
use crate::special::{classical_zeros, ComplexPoint, EtaConfig};
use crate::winding::AnalyticFunction;

/// Largest classical ordinate the default run seeds from.
pub const DEFAULT_Y_MAX: f64 = 48.5406;

#[derive(Debug, Clone, PartialEq)]
pub enum Target {
    Sharp,
    Polynomial(Polynomial),
}

/// Where the seeds come from.
#[derive(Debug, Clone, PartialEq)]
pub enum SeedSource {
    /// Every classical zero ordinate up to this height.
    YMax(f64),
    /// Explicit ordinates; the seed is `z_a` for q-zeta, `iy` for a polynomial.
    Ordinates(Vec<f64>),
    /// Explicit seed points (polynomial target only).
    Points(Vec<ComplexPoint>),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum OutputFormat {
    Text,
    Json,
    Csv,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub a: f64,
    pub d: f64,
    pub seeds: SeedSource,
    pub b_override: Option<u32>,
    pub target: Target,
    pub search: SearchConfig,
    pub eta: EtaConfig,
    pub format: OutputFormat,
    pub plot_data: bool,
    pub out: Option<PathBuf>,
}

impl Default for RunConfig {
    /// `a = 750`, `d = 2`, every zero up to [`DEFAULT_Y_MAX`], four points per side.
    fn default() -> Self {
        Self {
            a: 750.0,
            d: 2.0,
            seeds: SeedSource::YMax(DEFAULT_Y_MAX),
            b_override: None,
            target: Target::Sharp,
            search: SearchConfig::default(),
            eta: EtaConfig::default(),
            format: OutputFormat::Text,
            plot_data: false,
            out: None,
        }
    }
}

/// The function searched for one seed.
#[derive(Debug, Clone)]
pub enum TargetFunction {
    Sharp(SharpZeta),
    Polynomial(Polynomial),
}

impl AnalyticFunction for TargetFunction {
    fn eval(&self, k: ComplexPoint) -> Result<ComplexPoint> {
        match self {
            TargetFunction::Sharp(f) => f.eval(k),
            TargetFunction::Polynomial(p) => p.eval(k),
        }
    }

    fn rounding_floor(&self, k: ComplexPoint) -> Result<f64> {
        match self {
            TargetFunction::Sharp(f) => f.rounding_floor(k),
            TargetFunction::Polynomial(p) => p.rounding_floor(k),
        }
    }
}

/// A seed as listed in the opening table of the report.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SeedRow {
    pub index: usize,
    pub y: f64,
    pub za: ComplexPoint,
    /// Truncation multiplier, q-zeta only.
    pub b: Option<u32>,
}

#[derive(Debug, Clone)]
pub struct RunOutput {
    pub config: RunConfig,
    pub seeds: Vec<SeedRow>,
    pub records: Vec<ZeroRecord>,
}

impl RunOutput {
    pub fn any_failed(&self) -> bool {
        self.records
            .iter()
            .any(|r| r.verdict == crate::locator::ZeroVerdict::Failed)
    }
}

/// Seeds for the configured target, without searching.
pub fn build_seeds(cfg: &RunConfig) -> Result<Vec<Seed<TargetFunction>>> {
    match &cfg.target {
        Target::Sharp => sharp_seeds(cfg),
        Target::Polynomial(p) => polynomial_seeds(p, &cfg.seeds),
    }
}

fn sharp_seeds(cfg: &RunConfig) -> Result<Vec<Seed<TargetFunction>>> {
    if !(cfg.a > 0.0 && cfg.a.is_finite() && cfg.d > 0.0 && cfg.d.is_finite()) {
        return Err(Error::InvalidParameter(format!(
            "a and d must be positive, got a = {}, d = {}",
            cfg.a, cfg.d
        )));
    }
    let ordinates = match &cfg.seeds {
        SeedSource::YMax(y_max) => classical_zeros(*y_max, &cfg.eta)?,
        SeedSource::Ordinates(ys) => ys.clone(),
        SeedSource::Points(_) => {
            return Err(Error::InvalidParameter(
                "explicit seed points are only supported for polynomial targets".into(),
            ))
        }
    };
    ordinates
        .iter()
        .enumerate()
        .map(|(i, &y)| {
            let za = linear_approximation(y, cfg.a, cfg.d, &cfg.eta)?;
            let b = cfg
                .b_override
                .unwrap_or_else(|| select_truncation(cfg.a, cfg.d, za.norm() + 0.5));
            let params = SharpParams::new(cfg.a, cfg.d, b)?;
            Ok(Seed {
                index: i + 1,
                y,
                za,
                function: TargetFunction::Sharp(SharpZeta::new(params)),
            })
        })
        .collect()
}

fn polynomial_seeds(p: &Polynomial, source: &SeedSource) -> Result<Vec<Seed<TargetFunction>>> {
    let points: Vec<(f64, ComplexPoint)> = match source {
        SeedSource::YMax(_) => {
            return Err(Error::InvalidParameter(
                "polynomial targets need explicit seeds (ordinates or points)".into(),
            ))
        }
        SeedSource::Ordinates(ys) => ys.iter().map(|&y| (y, Complex64::new(0.0, y))).collect(),
        SeedSource::Points(zs) => zs.iter().map(|&z| (z.im, z)).collect(),
    };
    Ok(points
        .into_iter()
        .enumerate()
        .map(|(i, (y, za))| Seed {
            index: i + 1,
            y,
            za,
            function: TargetFunction::Polynomial(p.clone()),
        })
        .collect())
}

/// Build the seeds and run every variant.
pub fn execute(cfg: &RunConfig) -> Result<RunOutput> {
    cfg.search.validate()?;
    let seeds = build_seeds(cfg)?;
    let rows = seeds
        .iter()
        .map(|s| SeedRow {
            index: s.index,
            y: s.y,
            za: s.za,
            b: match &s.function {
                TargetFunction::Sharp(f) => Some(f.params.b()),
                TargetFunction::Polynomial(_) => None,
            },
        })
        .collect();
    let records = if seeds.is_empty() {
        Vec::new()
    } else {
        run_variants(&seeds, &cfg.search)?
    };
    Ok(RunOutput {
        config: cfg.clone(),
        seeds: rows,
        records,
    })
}
