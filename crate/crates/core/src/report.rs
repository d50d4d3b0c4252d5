//! Deterministic text and JSON rendering of analysis results.

use std::fmt::Write as _;

use serde::Serialize;

use crate::fuzzy::MajOpBreakdown;
use crate::graph::{BandAssignment, PrestigeEntry};
use crate::model::ValidationReport;
use crate::scenario::ComparisonReport;
use crate::variability::{DeviationProfile, PairVariability};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Format {
    #[default]
    Text,
    Json,
}

impl std::str::FromStr for Format {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "text" | "tsv" => Ok(Format::Text),
            "json" => Ok(Format::Json),
            other => Err(format!("unknown format `{other}` (expected text|tsv|json)")),
        }
    }
}

fn clean_zero(v: f64) -> f64 {
    // turns -0.0 into 0.0
    v + 0.0
}

/// Fixed-precision number with trailing zeros trimmed: `22`, `-76`, `4.333`.
pub fn fmt_num(v: f64, precision: usize) -> String {
    let s = format!("{:.*}", precision, clean_zero(v));
    let s = if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.').to_string()
    } else {
        s
    };
    if s == "-0" {
        "0".to_string()
    } else {
        s
    }
}

/// Percentage with `precision` decimals followed by its integer part, e.g.
/// `-345.5% (-345%)`.
pub fn fmt_percent(v: f64, precision: usize) -> String {
    let truncated = clean_zero(v.trunc());
    format!(
        "{:.*}% ({}%)",
        precision,
        clean_zero(v),
        fmt_num(truncated, 0)
    )
}

pub fn to_json<T: Serialize + ?Sized>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("report serializes");
    s.push('\n');
    s
}

pub fn validation_text(report: &ValidationReport) -> String {
    let mut out = String::new();
    let status = if report.is_consistent() {
        "consistent"
    } else {
        "inconsistent"
    };
    writeln!(out, "status\t{status}").unwrap();
    for d in &report.dangling {
        writeln!(
            out,
            "dangling\t{}\t{}\t{}",
            d.relationship,
            match d.end {
                crate::model::End::Origin => "origin",
                crate::model::End::Destination => "destination",
            },
            d.function
        )
        .unwrap();
    }
    for (kind, list) in [
        ("background", &report.background),
        ("isolated", &report.isolated),
        ("no-output", &report.no_output),
    ] {
        for id in list {
            writeln!(out, "{kind}\t{id}").unwrap();
        }
    }
    out
}

pub fn centrality_tsv(entries: &[PrestigeEntry]) -> String {
    let mut out = String::from("id\tclass\traw_dp\tnormalized_dp\trank\n");
    for e in entries {
        writeln!(
            out,
            "{}\t{}\t{}\t{:.6}\t{}",
            e.id,
            e.class.as_str(),
            fmt_num(e.raw, 6),
            clean_zero(e.normalized),
            e.rank
        )
        .unwrap();
    }
    out
}

#[derive(Serialize)]
struct BandsDocument<'a> {
    bands: usize,
    nodes: &'a [BandAssignment],
}

pub fn bands_json(bands: usize, nodes: &[BandAssignment]) -> String {
    to_json(&BandsDocument { bands, nodes })
}

pub fn variability_text(
    pairs: &[PairVariability],
    profiles: Option<&[DeviationProfile]>,
    precision: usize,
) -> String {
    let mut out = String::new();
    if let Some(profiles) = profiles {
        writeln!(out, "function\testimator\texpected\tmargin\tdevs").unwrap();
        for p in profiles {
            let devs: Vec<String> = p.devs.iter().map(|d| fmt_num(*d, 6)).collect();
            writeln!(
                out,
                "{}\t{}\t{}\t{}\t{}",
                p.function,
                p.estimator,
                fmt_num(p.expected, 6),
                fmt_num(p.margin, 6),
                devs.join(",")
            )
            .unwrap();
        }
        out.push('\n');
    }
    writeln!(out, "origin\tdestination\tFPV\tFDC\tVR").unwrap();
    for p in pairs {
        writeln!(
            out,
            "{}\t{}\t{}\t{}\t{}",
            p.origin,
            p.destination,
            fmt_num(p.fpv, 6),
            fmt_num(p.fdc, 6),
            fmt_percent(p.vr_percent, precision)
        )
        .unwrap();
    }
    out
}

fn bag_text(values: &[f64]) -> String {
    let parts: Vec<String> = values.iter().map(|v| fmt_num(*v, 6)).collect();
    format!("{{{}}}", parts.join(", "))
}

pub fn majop_text(b: &MajOpBreakdown) -> String {
    let mut out = String::new();
    writeln!(out, "E = {}", bag_text(&b.bag)).unwrap();
    writeln!(out, "subset\tvalues\tS\tM\tMaj\tOp\tW").unwrap();
    for (i, s) in b.subsets.iter().enumerate() {
        writeln!(
            out,
            "X{}\t{}\t{:.3}\t{:.3}\t{:.3}\t{:.3}\t{:.3}",
            i + 1,
            bag_text(&s.values),
            s.similarity,
            s.majority,
            s.maj,
            s.op,
            s.weight
        )
        .unwrap();
    }
    writeln!(out, "MajOp(E) = {:.2} ({:.6})", b.majop, b.majop).unwrap();
    out
}

pub fn comparison_text(report: &ComparisonReport, precision: usize) -> String {
    let mut out = String::from(
        "relationship\tMajOp_standard\tVR_standard\tMajOp_cc\tVR_cc\tratio\tlabel\n",
    );
    for r in &report.rows {
        let ratio = r
            .improvement_ratio
            .map(|x| format!("{x:.2}"))
            .unwrap_or_else(|| "undefined".to_string());
        writeln!(
            out,
            "{}\t{:.2}\t{:.*}%\t{:.2}\t{:.*}%\t{}\t{}",
            r.relationship,
            clean_zero(r.majop_standard),
            precision,
            clean_zero(r.vr_standard),
            clean_zero(r.majop_cc),
            precision,
            clean_zero(r.vr_cc),
            ratio,
            r.label.as_deref().unwrap_or("")
        )
        .unwrap();
    }
    match &report.ratios {
        Some(s) => writeln!(
            out,
            "ratio\tmin {:.2}\tmedian {:.2}\tmax {:.2}\t(n={})",
            s.min, s.median, s.max, s.count
        )
        .unwrap(),
        None => writeln!(out, "ratio\tundefined").unwrap(),
    }
    if !report.undefined_ratio.is_empty() {
        writeln!(out, "undefined-ratio\t{}", report.undefined_ratio.join(",")).unwrap();
    }
    if !report.not_improved.is_empty() {
        writeln!(out, "not-improved\t{}", report.not_improved.join(",")).unwrap();
    }
    out
}
