//! Text, JSON and CSV renderings of a finished run.

use std::fmt::Write as _;

use serde::Serialize;

use crate::locator::{SearchConfig, SearchStep, Verdict, ZeroRecord, ZeroVerdict};
use crate::run::{RunOutput, SeedSource, Target};
use crate::special::ComplexPoint;

/// `x` with six significant digits, trailing zeros dropped, like C's `%g`.
pub fn sig6(x: f64) -> String {
    if !x.is_finite() {
        return x.to_string();
    }
    if x == 0.0 {
        return "0".into();
    }
    let exponent = x.abs().log10().floor() as i32;
    if (-4..6).contains(&exponent) {
        let decimals = (5 - exponent).max(0) as usize;
        trim_fraction(&format!("{x:.decimals$}")).to_string()
    } else {
        let s = format!("{x:.5e}");
        let (mantissa, exp) = s.split_once('e').unwrap_or((&s, "0"));
        format!("{}e{}", trim_fraction(mantissa), exp)
    }
}

fn trim_fraction(s: &str) -> &str {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.')
    } else {
        s
    }
}

/// `re + im I` with six significant digits per part.
pub fn complex6(z: ComplexPoint) -> String {
    join_complex(sig6(z.re), sig6(z.im.abs()), z.im)
}

/// `re + im I` with four decimals per part.
pub fn complex4(z: ComplexPoint) -> String {
    join_complex(format!("{:.4}", z.re), format!("{:.4}", z.im.abs()), z.im)
}

fn join_complex(re: String, im_abs: String, im: f64) -> String {
    let rounds_to_zero = im_abs.parse::<f64>().is_ok_and(|v| v == 0.0);
    let sign = if im < 0.0 && !rounds_to_zero {
        '-'
    } else {
        '+'
    };
    format!("{re} {sign} {im_abs} I")
}

fn verdict_line(v: Verdict) -> Option<&'static str> {
    match v {
        Verdict::Good => Some("good"),
        Verdict::VeryGood => Some("good\nvery good"),
        Verdict::NotGood => None,
    }
}

fn final_label(v: ZeroVerdict) -> &'static str {
    match v {
        ZeroVerdict::VeryGood => "very good",
        ZeroVerdict::GoodOnly => "good only",
        ZeroVerdict::Failed => "failed",
    }
}

fn write_step(
    out: &mut String,
    record: &ZeroRecord,
    b: Option<u32>,
    step: &SearchStep,
    zna_before: ComplexPoint,
) {
    let r = &step.result;
    out.push('\n');
    if step.second_try {
        out.push_str("second try:\n");
    }
    let b_text = b.map(|b| format!("  b= {b}")).unwrap_or_default();
    let _ = writeln!(
        out,
        "no= {}  y= {}{}  c= {}",
        record.index,
        sig6(record.y),
        b_text,
        r.c
    );
    let _ = writeln!(out, "zna= {}", complex6(zna_before));
    let _ = writeln!(out, "zn= {}", complex6(r.rect.center));
    let _ = writeln!(out, "rd= {} rad= {}", sig6(r.rect.rd), sig6(r.rect.rad));
    out.push_str("angles over the rd*rad rectangle:\n");
    for row in r.trace.side_sum_view() {
        let label = if row.inserted == 0 {
            format!("{:<6}", row.point)
        } else {
            format!("{:<3}{:<3}", row.point, row.inserted)
        };
        let _ = writeln!(out, "{label}{}", sig6(row.angle));
    }
    let _ = writeln!(out, "char= {} fo= {}", sig6(clean_zero(r.char)), r.fo);
    let _ = writeln!(out, "z= {}", complex6(r.z_estimate));
    let _ = writeln!(out, "vv= {}", sig6(r.vv));
    if let Some(line) = verdict_line(step.verdict) {
        let _ = writeln!(out, "{line}");
    }
    if step.verdict == Verdict::VeryGood {
        if record.newton_applied {
            let _ = writeln!(out, "iterations:\nz= {}", complex6(record.z));
        } else {
            out.push_str("iterations do not work\n");
        }
    }
}

/// Rounding noise below the printed precision shows as `0`, not `-1.2e-15`.
fn clean_zero(x: f64) -> f64 {
    if x.abs() < 5e-10 {
        0.0
    } else {
        x
    }
}

/// Human-readable report: seeds, per-variant traces, final list.
pub fn emit_text(output: &RunOutput) -> String {
    let cfg = &output.config;
    let mut out = String::new();
    match (&cfg.target, &cfg.seeds) {
        (Target::Sharp, SeedSource::YMax(y_max)) => {
            let _ = writeln!(
                out,
                "d= {} a= {} ALL ZEROS TILL {}",
                sig6(cfg.d),
                sig6(cfg.a),
                sig6(*y_max)
            );
        }
        (Target::Sharp, _) => {
            let _ = writeln!(out, "d= {} a= {}", sig6(cfg.d), sig6(cfg.a));
        }
        (Target::Polynomial(p), _) => {
            let _ = writeln!(out, "poly: {p}");
        }
    }
    if output.records.is_empty() {
        out.push_str("no zeros requested\n");
        return out;
    }

    out.push('\n');
    out.push_str(match cfg.target {
        Target::Sharp => "CLASSICAL ZEROS AND APPROXIMATIONS\n",
        Target::Polynomial(_) => "SEEDS\n",
    });
    for row in &output.seeds {
        let b = row.b.map(|b| format!("  b= {b}")).unwrap_or_default();
        let _ = writeln!(
            out,
            "{}  y= {}  za= {}{b}",
            row.index,
            sig6(row.y),
            complex6(row.za)
        );
    }

    let points = cfg.search.variant_points();
    let variants = output
        .records
        .iter()
        .flat_map(|r| r.trace_log.iter().map(|s| s.variant))
        .max()
        .unwrap_or(0);
    for variant in 1..=variants {
        let _ = writeln!(out, "\nVARIANT= {variant}  c= {}", points[variant - 1]);
        for (record, seed) in output.records.iter().zip(&output.seeds) {
            let mut zna = record.za;
            for step in &record.trace_log {
                if step.variant == variant {
                    write_step(&mut out, record, seed.b, step, zna);
                }
                zna = step.zna;
            }
        }
    }

    out.push_str("\nFINAL LIST OF Q-ZEROS:\n");
    for r in &output.records {
        let _ = writeln!(
            out,
            "\n{} {}  {}  z: {}\n  za= {}  de= {}  vv= {}",
            final_label(r.verdict),
            r.index,
            sig6(r.y),
            complex4(r.z),
            complex4(r.za),
            sig6(r.de),
            sig6(r.vv_final)
        );
    }
    out
}

#[derive(Debug, Serialize)]
struct JsonComplex {
    re: f64,
    im: f64,
}

impl From<ComplexPoint> for JsonComplex {
    fn from(z: ComplexPoint) -> Self {
        Self { re: z.re, im: z.im }
    }
}

#[derive(Debug, Serialize)]
struct JsonConfig<'a> {
    a: f64,
    d: f64,
    target: String,
    y_max: Option<f64>,
    ordinates: Option<&'a [f64]>,
    points: Option<Vec<JsonComplex>>,
    b_override: Option<u32>,
    search: &'a SearchConfig,
}

#[derive(Debug, Serialize)]
struct JsonIntegration {
    variant: usize,
    second_try: bool,
    zn: JsonComplex,
    rd: f64,
    rad: f64,
    c: usize,
    char: f64,
    fo: u32,
    vv: f64,
    z_estimate: JsonComplex,
    inside: bool,
    verdict: Verdict,
    angles: Vec<f64>,
}

#[derive(Debug, Serialize)]
struct JsonZero {
    index: usize,
    y: f64,
    b: Option<u32>,
    za: JsonComplex,
    z: JsonComplex,
    de: f64,
    vv: f64,
    verdict: ZeroVerdict,
    newton_applied: bool,
    completed_in_variant: Option<usize>,
    integrations: Vec<JsonIntegration>,
}

#[derive(Debug, Serialize)]
struct JsonReport<'a> {
    config: JsonConfig<'a>,
    zeros: Vec<JsonZero>,
}

/// Machine-readable report with every integration.
pub fn emit_json(output: &RunOutput) -> String {
    let cfg = &output.config;
    let (y_max, ordinates, points) = match &cfg.seeds {
        SeedSource::YMax(y) => (Some(*y), None, None),
        SeedSource::Ordinates(ys) => (None, Some(ys.as_slice()), None),
        SeedSource::Points(zs) => (None, None, Some(zs.iter().map(|&z| z.into()).collect())),
    };
    let target = match &cfg.target {
        Target::Sharp => "sharp".to_string(),
        Target::Polynomial(p) => format!("poly:{p}"),
    };
    let zeros = output
        .records
        .iter()
        .zip(&output.seeds)
        .map(|(r, seed)| JsonZero {
            index: r.index,
            y: r.y,
            b: seed.b,
            za: r.za.into(),
            z: r.z.into(),
            de: r.de,
            vv: r.vv_final,
            verdict: r.verdict,
            newton_applied: r.newton_applied,
            completed_in_variant: r.completed_in_variant,
            integrations: r
                .trace_log
                .iter()
                .map(|s| JsonIntegration {
                    variant: s.variant,
                    second_try: s.second_try,
                    zn: s.result.rect.center.into(),
                    rd: s.result.rect.rd,
                    rad: s.result.rect.rad,
                    c: s.result.c,
                    char: s.result.char,
                    fo: s.result.fo,
                    vv: s.result.vv,
                    z_estimate: s.result.z_estimate.into(),
                    inside: s.result.inside,
                    verdict: s.verdict,
                    angles: s
                        .result
                        .trace
                        .side_sum_view()
                        .iter()
                        .map(|row| row.angle)
                        .collect(),
                })
                .collect(),
        })
        .collect();
    let report = JsonReport {
        config: JsonConfig {
            a: cfg.a,
            d: cfg.d,
            target,
            y_max,
            ordinates,
            points,
            b_override: cfg.b_override,
            search: &cfg.search,
        },
        zeros,
    };
    let mut text = serde_json::to_string_pretty(&report).expect("report serializes");
    text.push('\n');
    text
}

fn csv_text(header: &[&str], rows: impl Iterator<Item = Vec<String>>) -> String {
    let mut writer = csv::Writer::from_writer(Vec::new());
    writer.write_record(header).expect("in-memory csv write");
    for row in rows {
        writer.write_record(&row).expect("in-memory csv write");
    }
    String::from_utf8(writer.into_inner().expect("in-memory csv flush")).expect("csv is utf-8")
}

/// One row per zero: seed, result, error bound and verdict.
pub fn emit_csv(output: &RunOutput) -> String {
    csv_text(
        &[
            "index",
            "y",
            "re_za",
            "im_za",
            "re_z",
            "im_z",
            "de",
            "vv",
            "verdict",
            "newton_applied",
        ],
        output.records.iter().map(|r| {
            vec![
                r.index.to_string(),
                r.y.to_string(),
                r.za.re.to_string(),
                r.za.im.to_string(),
                r.z.re.to_string(),
                r.z.im.to_string(),
                r.de.to_string(),
                r.vv_final.to_string(),
                final_label(r.verdict).replace(' ', "_"),
                r.newton_applied.to_string(),
            ]
        }),
    )
}

/// Drift of each zero from its seed, for plotting against `y`.
pub fn emit_plot_data(output: &RunOutput) -> String {
    csv_text(
        &["y", "re_za", "im_za", "re_z", "im_z", "de", "vv"],
        output.records.iter().map(|r| {
            vec![
                r.y.to_string(),
                r.za.re.to_string(),
                r.za.im.to_string(),
                r.z.re.to_string(),
                r.z.im.to_string(),
                r.de.to_string(),
                r.vv_final.to_string(),
            ]
        }),
    )
}
