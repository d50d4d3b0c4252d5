//! Command-line front end. [`run`] takes the argument vector and output
//! streams so the binary and the tests share one entry point.
//!
//! Exit codes: 0 on success, 1 on a domain or input error, 2 on a usage error.

use std::collections::BTreeMap;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};

use crate::chord::emit_chord;
use crate::fuzzy::{majop, NoMajorityFallback, Scale, ValuationBag};
use crate::graph::{concentric_bands, degree_prestige, rank_nodes, Scope};
use crate::io::{
    check_valuations_against, parse_model, parse_model_unchecked, parse_observations,
    parse_valuations, ValuationSet,
};
use crate::report::{self, Format};
use crate::scenario::{assess_relationship, compare_scenarios, Aggregation, Scenario};
use crate::variability::{CenterMarginEstimator, Threshold, VariabilityConfig};

#[derive(Debug, Parser)]
#[command(
    name = "fram",
    version,
    about = "Degree prestige, variability rate and fuzzy-majority analysis of FRAM models",
    arg_required_else_help = true
)]
pub struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Check a model file and list dangling references, background functions and sinks
    Validate {
        model: PathBuf,
        #[arg(long, default_value = "text")]
        format: Format,
    },
    /// Rank functions and relationships by degree prestige
    Centrality(CentralityArgs),
    /// FPV, FDC and VR for pairs of observed functions
    Variability(VariabilityArgs),
    /// Fuzzy-majority aggregate of one valuation bag, with its breakdown
    Majop(MajopArgs),
    /// Compare standard and CC scenarios for every bag of a valuation file
    Compare {
        valuations: PathBuf,
        /// Optional model used to check that every bag names a known relationship
        #[arg(long)]
        model: Option<PathBuf>,
        #[arg(long, default_value = "error")]
        fallback: NoMajorityFallback,
        #[arg(long, default_value_t = 1)]
        precision: usize,
        #[arg(long, default_value = "text")]
        format: Format,
    },
    /// Export a chord diagram (SVG and matrix JSON) of relationship VR values
    Chord(ChordArgs),
}

#[derive(Debug, Args)]
struct CentralityArgs {
    model: PathBuf,
    #[arg(long, default_value = "all")]
    scope: Scope,
    #[arg(long, default_value = "tsv")]
    format: Format,
    /// Emit concentric band assignments (JSON) with this many rings instead of the ranking
    #[arg(long)]
    bands: Option<usize>,
}

#[derive(Debug, Args)]
struct VariabilityArgs {
    observations: PathBuf,
    /// median-mad | fixed:E,M | mean-std
    #[arg(long, default_value = "median-mad")]
    estimator: CenterMarginEstimator,
    /// Per-function estimator, e.g. `F15=fixed:0,24` (repeatable)
    #[arg(long = "estimator-for", value_name = "FUNCTION=ESTIMATOR")]
    estimator_for: Vec<String>,
    /// Upstream:downstream pair, e.g. `F15:F2` (repeatable)
    #[arg(long = "pair", value_name = "ORIGIN:DESTINATION")]
    pairs: Vec<String>,
    /// Take the pairs from the relationships of this model instead
    #[arg(long)]
    model: Option<PathBuf>,
    #[arg(long, default_value = "inclusive")]
    fpv_threshold: ThresholdKind,
    #[arg(long, default_value = "strict")]
    fdc_threshold: ThresholdKind,
    /// Margin used when the estimated spread is zero; 0 disables the fallback
    #[arg(long, default_value_t = 1.0)]
    zero_margin: f64,
    /// Also print every deviation profile
    #[arg(long)]
    profiles: bool,
    #[arg(long, default_value_t = 1)]
    precision: usize,
    #[arg(long, default_value = "text")]
    format: Format,
}

#[derive(Debug, Clone, Copy, clap::ValueEnum)]
enum ThresholdKind {
    Inclusive,
    Strict,
}

impl ThresholdKind {
    fn at_one(self) -> Threshold {
        match self {
            ThresholdKind::Inclusive => Threshold::Inclusive(1.0),
            ThresholdKind::Strict => Threshold::Strict(1.0),
        }
    }
}

#[derive(Debug, Args)]
struct MajopArgs {
    /// Comma-separated valuations, e.g. "1,4,4,5,6"
    #[arg(long, conflicts_with = "valuations")]
    bag: Option<String>,
    /// Scale for --bag as LO,HI
    #[arg(long, default_value = "0,10")]
    scale: String,
    /// Valuation file; use with --relationship and --scenario
    #[arg(long, requires = "relationship")]
    valuations: Option<PathBuf>,
    #[arg(long)]
    relationship: Option<String>,
    #[arg(long, default_value = "standard")]
    scenario: Scenario,
    #[arg(long, default_value = "error")]
    fallback: NoMajorityFallback,
    #[arg(long, default_value = "text")]
    format: Format,
}

#[derive(Debug, Args)]
struct ChordArgs {
    #[arg(long)]
    model: PathBuf,
    /// Valuation file whose scenario VR values label the arcs
    #[arg(long, conflicts_with = "vr", required_unless_present = "vr")]
    valuations: Option<PathBuf>,
    /// JSON object mapping relationship ids to VR percentages
    #[arg(long)]
    vr: Option<PathBuf>,
    #[arg(long, default_value = "cc")]
    scenario: Scenario,
    #[arg(long, default_value = "error")]
    fallback: NoMajorityFallback,
    /// Write the SVG here instead of standard output
    #[arg(long)]
    svg: Option<PathBuf>,
    /// Write the matrix JSON here
    #[arg(long)]
    matrix: Option<PathBuf>,
}

type Failure = Box<dyn std::error::Error>;

/// Parses `args` (including the program name) and runs the command.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = e.exit_code();
            let rendered = e.render().to_string();
            if e.use_stderr() {
                let _ = err.write_all(rendered.as_bytes());
            } else {
                let _ = out.write_all(rendered.as_bytes());
            }
            return code;
        }
    };
    match execute(cli.command, out) {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            1
        }
    }
}

fn execute(command: Command, out: &mut dyn Write) -> Result<i32, Failure> {
    match command {
        Command::Validate { model, format } => {
            let model = parse_model_unchecked(&model)?;
            let report = model.validate();
            let text = match format {
                Format::Text => report::validation_text(&report),
                Format::Json => report::to_json(&report),
            };
            out.write_all(text.as_bytes())?;
            Ok(if report.is_consistent() { 0 } else { 1 })
        }
        Command::Centrality(args) => centrality(args, out),
        Command::Variability(args) => variability(args, out),
        Command::Majop(args) => majop_cmd(args, out),
        Command::Compare {
            valuations,
            model,
            fallback,
            precision,
            format,
        } => {
            let set = load_valuations(&valuations, model.as_deref())?;
            let report = compare_set(&set, fallback)?;
            let text = match format {
                Format::Text => report::comparison_text(&report, precision),
                Format::Json => report::to_json(&report),
            };
            out.write_all(text.as_bytes())?;
            Ok(0)
        }
        Command::Chord(args) => chord(args, out),
    }
}

fn load_valuations(path: &Path, model: Option<&Path>) -> Result<ValuationSet, Failure> {
    let set = parse_valuations(path)?;
    if let Some(model_path) = model {
        let model = parse_model(model_path)?;
        check_valuations_against(&set, &model, &path.display().to_string())?;
    }
    Ok(set)
}

fn compare_set(
    set: &ValuationSet,
    fallback: NoMajorityFallback,
) -> Result<crate::scenario::ComparisonReport, Failure> {
    let config = Aggregation {
        fallback,
        ..set.aggregation()
    };
    let mut rows = Vec::with_capacity(set.entries.len());
    for e in &set.entries {
        let mut a = assess_relationship(&e.relationship, &e.standard, &e.cc, &config)?;
        a.label = e.label.clone();
        a.gaps = e.gaps.clone();
        rows.push(a);
    }
    Ok(compare_scenarios(rows))
}

fn centrality(args: CentralityArgs, out: &mut dyn Write) -> Result<i32, Failure> {
    let model = parse_model(&args.model)?;
    let table = degree_prestige(&model)?;
    let ranked = rank_nodes(&table, args.scope);
    let text = match (args.bands, args.format) {
        (Some(bands), _) => report::bands_json(bands.max(1), &concentric_bands(&ranked, bands)),
        (None, Format::Text) => report::centrality_tsv(&ranked),
        (None, Format::Json) => report::to_json(&ranked),
    };
    out.write_all(text.as_bytes())?;
    Ok(0)
}

fn parse_pair(s: &str) -> Result<(String, String), Failure> {
    match s.split_once(':') {
        Some((o, d)) if !o.is_empty() && !d.is_empty() => Ok((o.to_string(), d.to_string())),
        _ => Err(format!("invalid pair `{s}` (expected ORIGIN:DESTINATION)").into()),
    }
}

fn variability(args: VariabilityArgs, out: &mut dyn Write) -> Result<i32, Failure> {
    let series = parse_observations(&args.observations)?;
    let mut overrides = BTreeMap::new();
    for spec in &args.estimator_for {
        let (f, e) = spec
            .split_once('=')
            .ok_or_else(|| format!("invalid --estimator-for `{spec}` (expected FUNCTION=ESTIMATOR)"))?;
        overrides.insert(f.to_string(), e.parse::<CenterMarginEstimator>()?);
    }

    let mut pairs = args
        .pairs
        .iter()
        .map(|p| parse_pair(p))
        .collect::<Result<Vec<_>, _>>()?;
    if let Some(model_path) = &args.model {
        let model = parse_model(model_path)?;
        let observed = |f: &str| series.iter().any(|s| s.function == f);
        for r in model.relationships() {
            let pair = (r.origin.clone(), r.destination.clone());
            if observed(&r.origin) && observed(&r.destination) && !pairs.contains(&pair) {
                pairs.push(pair);
            }
        }
    }
    if pairs.is_empty() {
        return Err("no pairs to analyse: pass --pair ORIGIN:DESTINATION or --model".into());
    }

    let config = VariabilityConfig {
        fpv_threshold: args.fpv_threshold.at_one(),
        fdc_threshold: args.fdc_threshold.at_one(),
        zero_margin_fallback: (args.zero_margin > 0.0).then_some(args.zero_margin),
    };
    let series_for = |f: &str| -> Result<&crate::variability::ObservationSeries, Failure> {
        let mut found = series.iter().filter(|s| s.function == f);
        let first = found
            .next()
            .ok_or_else(|| format!("no observations for function `{f}`"))?;
        if found.next().is_some() {
            return Err(format!("function `{f}` has several series; keep one dimension per file").into());
        }
        Ok(first)
    };
    let mut profiles: Vec<crate::variability::DeviationProfile> = Vec::new();
    let mut profile_for = |f: &str| -> Result<crate::variability::DeviationProfile, Failure> {
        if let Some(p) = profiles.iter().find(|p| p.function == f) {
            return Ok(p.clone());
        }
        let estimator = overrides.get(f).copied().unwrap_or(args.estimator);
        let p = config.profile(series_for(f)?, estimator)?;
        profiles.push(p.clone());
        Ok(p)
    };
    let mut results = Vec::with_capacity(pairs.len());
    for (o, d) in &pairs {
        let origin = profile_for(o)?;
        let destination = profile_for(d)?;
        results.push(config.assess(&origin, &destination)?);
    }

    let text = match args.format {
        Format::Text => report::variability_text(
            &results,
            args.profiles.then_some(profiles.as_slice()),
            args.precision,
        ),
        Format::Json => {
            #[derive(serde::Serialize)]
            struct Doc<'a> {
                config: &'a VariabilityConfig,
                profiles: &'a [crate::variability::DeviationProfile],
                pairs: &'a [crate::variability::PairVariability],
            }
            report::to_json(&Doc {
                config: &config,
                profiles: &profiles,
                pairs: &results,
            })
        }
    };
    out.write_all(text.as_bytes())?;
    Ok(0)
}

fn majop_cmd(args: MajopArgs, out: &mut dyn Write) -> Result<i32, Failure> {
    let (bag, aggregation) = match (&args.bag, &args.valuations) {
        (Some(text), None) => {
            let (lo, hi) = args
                .scale
                .split_once(',')
                .ok_or_else(|| format!("invalid --scale `{}` (expected LO,HI)", args.scale))?;
            let scale = Scale::new(lo.trim().parse()?, hi.trim().parse()?)?;
            let values = text
                .split(',')
                .map(|v| v.trim().parse::<f64>())
                .collect::<Result<Vec<_>, _>>()
                .map_err(|e| format!("invalid --bag `{text}`: {e}"))?;
            (ValuationBag::new(values, scale)?, Aggregation::default())
        }
        (None, Some(path)) => {
            let set = parse_valuations(path)?;
            let rid = args.relationship.as_deref().unwrap_or_default();
            let entry = set
                .entry(rid)
                .ok_or_else(|| format!("no bags for relationship `{rid}`"))?;
            let bag = match args.scenario {
                Scenario::Standard => entry.standard.clone(),
                Scenario::Cc => entry.cc.clone(),
            };
            (bag, set.aggregation())
        }
        _ => return Err("pass either --bag or --valuations with --relationship".into()),
    };

    match majop(&bag, &aggregation.similarity, &aggregation.majority) {
        Ok(b) => {
            let text = match args.format {
                Format::Text => report::majop_text(&b),
                Format::Json => report::to_json(&b),
            };
            out.write_all(text.as_bytes())?;
            Ok(0)
        }
        Err(crate::fuzzy::FuzzyError::NoMajority) if args.fallback == NoMajorityFallback::Mean => {
            let text = match args.format {
                Format::Text => format!("no majority; mean fallback = {:.6}\n", bag.mean()),
                Format::Json => report::to_json(&serde_json::json!({
                    "bag": bag.values(),
                    "fallback": "mean",
                    "majop": bag.mean(),
                })),
            };
            out.write_all(text.as_bytes())?;
            Ok(0)
        }
        Err(e) => Err(e.into()),
    }
}

fn chord(args: ChordArgs, out: &mut dyn Write) -> Result<i32, Failure> {
    let model = parse_model(&args.model)?;
    let vr_map: BTreeMap<String, f64> = match (&args.valuations, &args.vr) {
        (Some(path), None) => {
            let set = parse_valuations(path)?;
            check_valuations_against(&set, &model, &path.display().to_string())?;
            compare_set(&set, args.fallback)?
                .rows
                .into_iter()
                .map(|r| {
                    let vr = match args.scenario {
                        Scenario::Standard => r.vr_standard,
                        Scenario::Cc => r.vr_cc,
                    };
                    (r.relationship, vr)
                })
                .collect()
        }
        (None, Some(path)) => {
            let text = std::fs::read_to_string(path)
                .map_err(|e| format!("{}: {e}", path.display()))?;
            serde_json::from_str(&text).map_err(|e| format!("{}: {e}", path.display()))?
        }
        _ => return Err("pass either --valuations or --vr".into()),
    };
    let (matrix, svg) = emit_chord(&model, &vr_map)?;
    if let Some(path) = &args.matrix {
        std::fs::write(path, matrix.to_json()).map_err(|e| format!("{}: {e}", path.display()))?;
    }
    match &args.svg {
        Some(path) => {
            std::fs::write(path, &svg).map_err(|e| format!("{}: {e}", path.display()))?;
        }
        None => out.write_all(svg.as_bytes())?,
    }
    Ok(0)
}
