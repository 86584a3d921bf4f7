//! Command-line front end. `run` is pure: it maps a parsed command line and
//! the input bytes to an exit code and the report text.

use std::path::PathBuf;

use clap::{Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use crate::classifier::{enumerate_types, screen};
use crate::delzant::{self, DelzantError, LatticePolytope, BUILTIN_NAMES};
use crate::fpdata::{validate, FixedPointData, FpDataError};
use crate::localization::{
    chern_integrals, chern_relations_hold, dh_feasible, dh_path, solve_restriction_table, LocalizationError,
};
use crate::rational::{format_q, parse_q, Q};

pub const REPORT_SCHEMA: &str = "report.v1";

pub const EXIT_OK: i32 = 0;
pub const EXIT_INVALID: i32 = 1;
pub const EXIT_MALFORMED: i32 = 2;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Text,
    Structured,
}

#[derive(Debug, Parser)]
#[command(name = "semifree", version, about = "Fixed-point data of semi-free circle actions on 6-manifolds")]
pub struct RunConfig {
    #[command(subcommand)]
    pub command: Command,
    #[arg(long, value_enum, default_value = "text", global = true)]
    pub format: Format,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Structural checks on fixed-point data.
    Validate { input: Option<PathBuf> },
    /// Chern integrals by localization.
    Localize { input: Option<PathBuf> },
    /// Solve the restriction table of the Kirwan basis.
    RestrictTable { input: Option<PathBuf> },
    /// Run every consistency check and name the family.
    Classify { input: Option<PathBuf> },
    /// Enumerate admissible data with second Betti number below 3.
    Enumerate {
        #[arg(long, default_value_t = 3)]
        max_genus: u32,
        /// Inclusive range `lo..hi` for the normal Chern numbers.
        #[arg(long, default_value = "-6..6", allow_hyphen_values = true, value_parser = parse_range)]
        b_range: (i64, i64),
    },
    /// Smoothness and semi-freeness of a polytope.
    PolytopeCheck { input: Option<PathBuf> },
    /// Fixed-point data of a polytope.
    PolytopeExtract { input: Option<PathBuf> },
    /// Emit a built-in polytope, or list them.
    PolytopeBuiltin { name: Option<String> },
    /// Duistermaat-Heckman positivity for all-surface data.
    DhCheck {
        input: Option<PathBuf>,
        /// Evaluate one path at this initial fiber area.
        #[arg(long, requires = "gaps", value_parser = parse_q_arg)]
        alpha0: Option<Q>,
        /// Comma-separated level gaps.
        #[arg(long, requires = "alpha0", value_delimiter = ',', value_parser = parse_q_arg)]
        gaps: Option<Vec<Q>>,
    },
}

impl Command {
    pub fn input_path(&self) -> Option<&PathBuf> {
        match self {
            Command::Validate { input }
            | Command::Localize { input }
            | Command::RestrictTable { input }
            | Command::Classify { input }
            | Command::PolytopeCheck { input }
            | Command::PolytopeExtract { input }
            | Command::DhCheck { input, .. } => input.as_ref(),
            Command::Enumerate { .. } | Command::PolytopeBuiltin { .. } => None,
        }
    }

    pub fn reads_input(&self) -> bool {
        !matches!(self, Command::Enumerate { .. } | Command::PolytopeBuiltin { .. })
    }
}

fn parse_range(s: &str) -> Result<(i64, i64), String> {
    let (lo, hi) = s.split_once("..").ok_or_else(|| format!("expected lo..hi, got `{s}`"))?;
    let lo: i64 = lo.trim().parse().map_err(|e| format!("{lo}: {e}"))?;
    let hi: i64 = hi.trim().parse().map_err(|e| format!("{hi}: {e}"))?;
    if lo > hi {
        return Err(format!("empty range {lo}..{hi}"));
    }
    Ok((lo, hi))
}

fn parse_q_arg(s: &str) -> Result<Q, String> {
    parse_q(s).map_err(|e| e.to_string())
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Outcome {
    pub code: i32,
    pub report: String,
}

impl Outcome {
    fn new(code: i32, report: String) -> Self {
        Outcome { code, report }
    }
}

fn malformed(format: Format, command: &str, msg: String) -> Outcome {
    let report = match format {
        Format::Text => format!("error: {msg}\n"),
        Format::Structured => structured(command, json!({ "error": msg, "malformed": true })),
    };
    Outcome::new(EXIT_MALFORMED, report)
}

fn invalid(format: Format, command: &str, msg: String) -> Outcome {
    let report = match format {
        Format::Text => format!("{msg}\n"),
        Format::Structured => structured(command, json!({ "error": msg, "malformed": false })),
    };
    Outcome::new(EXIT_INVALID, report)
}

fn structured(command: &str, body: Value) -> String {
    let mut v = json!({ "schema": REPORT_SCHEMA, "command": command });
    if let (Value::Object(m), Value::Object(b)) = (&mut v, body) {
        m.extend(b);
    }
    let mut s = serde_json::to_string_pretty(&v).expect("serializable");
    s.push('\n');
    s
}

fn with_newline(mut s: String) -> String {
    if !s.ends_with('\n') {
        s.push('\n');
    }
    s
}

fn parse_fpdata(input: &[u8]) -> Result<FixedPointData, String> {
    let text = std::str::from_utf8(input).map_err(|e| format!("input is not UTF-8: {e}"))?;
    FixedPointData::from_json(text).map_err(|e: FpDataError| e.to_string())
}

fn parse_polytope(input: &[u8]) -> Result<LatticePolytope, DelzantError> {
    let text = std::str::from_utf8(input).map_err(|e| DelzantError::Field(0, format!("input is not UTF-8: {e}")))?;
    delzant::build(delzant::facets_from_json(text)?)
}

fn polytope_error(format: Format, command: &str, e: DelzantError) -> Outcome {
    match e {
        DelzantError::Json(_) | DelzantError::Schema(_) | DelzantError::Field(..) => {
            malformed(format, command, e.to_string())
        }
        other => invalid(format, command, other.to_string()),
    }
}

fn localization_error(format: Format, command: &str, e: LocalizationError) -> Outcome {
    invalid(format, command, e.to_string())
}

/// Executes one command on the given input bytes.
pub fn run(config: &RunConfig, input: &[u8]) -> Outcome {
    let f = config.format;
    match &config.command {
        Command::Validate { .. } => {
            let data = match parse_fpdata(input) {
                Ok(d) => d,
                Err(e) => return malformed(f, "validate", e),
            };
            let report = validate(&data);
            let code = if report.is_valid() { EXIT_OK } else { EXIT_INVALID };
            let text = match f {
                Format::Text => report.to_string(),
                Format::Structured => structured(
                    "validate",
                    json!({
                        "valid": report.is_valid(),
                        "violations": report.violations.iter()
                            .map(|v| json!({ "rule": format!("{:?}", v.rule), "detail": v.detail }))
                            .collect::<Vec<_>>(),
                    }),
                ),
            };
            Outcome::new(code, text)
        }
        Command::Localize { .. } => {
            let data = match parse_fpdata(input) {
                Ok(d) => d,
                Err(e) => return malformed(f, "localize", e),
            };
            let (values, holds) = match chern_integrals(&data).and_then(|v| Ok((v, chern_relations_hold(&data)?))) {
                Ok(x) => x,
                Err(e) => return localization_error(f, "localize", e),
            };
            let names = ["1", "c1", "c1^2", "c1^3"];
            let code = if holds { EXIT_OK } else { EXIT_INVALID };
            let text = match f {
                Format::Text => {
                    let mut s = String::new();
                    for (n, v) in names.iter().zip(&values) {
                        s.push_str(&format!("∫{n} = {v}\n"));
                    }
                    s.push_str(&format!("relations hold: {holds}\n"));
                    s
                }
                Format::Structured => structured(
                    "localize",
                    json!({
                        "integrals": names.iter().zip(&values).map(|(n, v)| json!({
                            "class": n,
                            "terms": v.iter().map(|(k, c)| json!({ "lambda": k, "coeff": format_q(c) })).collect::<Vec<_>>(),
                        })).collect::<Vec<_>>(),
                        "relations_hold": holds,
                    }),
                ),
            };
            Outcome::new(code, text)
        }
        Command::RestrictTable { .. } => {
            let data = match parse_fpdata(input) {
                Ok(d) => d,
                Err(e) => return malformed(f, "restrict-table", e),
            };
            match solve_restriction_table(&data) {
                Ok(t) => Outcome::new(
                    EXIT_OK,
                    match f {
                        Format::Text => with_newline(t.render()),
                        Format::Structured => with_newline(t.to_json()),
                    },
                ),
                Err(e) => localization_error(f, "restrict-table", e),
            }
        }
        Command::Classify { .. } => {
            let data = match parse_fpdata(input) {
                Ok(d) => d,
                Err(e) => return malformed(f, "classify", e),
            };
            match screen(&data) {
                Ok((tag, full)) => Outcome::new(
                    EXIT_OK,
                    match f {
                        Format::Text => format!("type {tag}\n{full}\n"),
                        Format::Structured => structured(
                            "classify",
                            json!({ "type": tag.as_str(), "data": serde_json::to_value(full.to_raw()).expect("serializable") }),
                        ),
                    },
                ),
                Err(ex) => match f {
                    Format::Text => Outcome::new(EXIT_INVALID, format!("excluded: {}\n", ex.key())),
                    Format::Structured => {
                        Outcome::new(EXIT_INVALID, structured("classify", json!({ "excluded": ex.key() })))
                    }
                },
            }
        }
        Command::Enumerate { max_genus, b_range } => {
            let report = enumerate_types(*max_genus, b_range.0, b_range.1);
            Outcome::new(
                EXIT_OK,
                match f {
                    Format::Text => with_newline(report.render()),
                    Format::Structured => with_newline(report.to_json()),
                },
            )
        }
        Command::PolytopeCheck { .. } => {
            let p = match parse_polytope(input) {
                Ok(p) => p,
                Err(e) => return polytope_error(f, "polytope-check", e),
            };
            let r = delzant::check(&p);
            let ok = r.delzant.is_delzant() && r.semifree.is_semifree();
            let text = match f {
                Format::Text => format!("{p}{r}"),
                Format::Structured => structured(
                    "polytope-check",
                    json!({
                        "delzant": r.delzant.is_delzant(),
                        "determinants": r.delzant.determinants,
                        "semifree": r.semifree.is_semifree(),
                        "failures": r.semifree.failures,
                        "horizontal_edges": r.horizontal.iter()
                            .map(|(e, (a, b))| json!({ "edge": e, "degrees": [a, b] }))
                            .collect::<Vec<_>>(),
                        "twist": r.twist,
                    }),
                ),
            };
            Outcome::new(if ok { EXIT_OK } else { EXIT_INVALID }, text)
        }
        Command::PolytopeExtract { .. } => {
            let p = match parse_polytope(input) {
                Ok(p) => p,
                Err(e) => return polytope_error(f, "polytope-extract", e),
            };
            if !delzant::delzant_check(&p).is_delzant() {
                return invalid(f, "polytope-extract", "not a Delzant polytope".to_string());
            }
            match delzant::extract_fixed_data(&p) {
                Ok(data) => Outcome::new(
                    EXIT_OK,
                    match f {
                        Format::Text => format!(
                            "{}\ntype: {}\n",
                            data,
                            data.label.map_or("unclassified".to_string(), |t| t.to_string())
                        ),
                        Format::Structured => with_newline(data.to_json()),
                    },
                ),
                Err(e) => polytope_error(f, "polytope-extract", e),
            }
        }
        Command::PolytopeBuiltin { name } => match name {
            None => Outcome::new(EXIT_OK, BUILTIN_NAMES.iter().map(|n| format!("{n}\n")).collect()),
            Some(n) => match delzant::builtin_facets(n) {
                Ok(facets) => Outcome::new(EXIT_OK, with_newline(delzant::facets_to_json(Some(n), &facets))),
                Err(e) => malformed(f, "polytope-builtin", e.to_string()),
            },
        },
        Command::DhCheck { alpha0, gaps, .. } => {
            let data = match parse_fpdata(input) {
                Ok(d) => d,
                Err(e) => return malformed(f, "dh-check", e),
            };
            let data = match crate::localization::complete_normal_data(&data) {
                Ok(d) => d,
                Err(e) => return localization_error(f, "dh-check", e),
            };
            if let (Some(a), Some(g)) = (alpha0, gaps) {
                let path = match dh_path(&data, a, g) {
                    Ok(p) => p,
                    Err(e) => return localization_error(f, "dh-check", e),
                };
                let code = if path.consistent() { EXIT_OK } else { EXIT_INVALID };
                let text = match f {
                    Format::Text => {
                        let mut s = format!("reduced space: {}\n", path.space);
                        for seg in &path.segments {
                            s.push_str(&format!(
                                "  [{}, {}]: ω = {:?} − (t − {})·{:?}\n",
                                format_q(&seg.start),
                                format_q(&seg.end),
                                seg.omega_start.iter().map(format_q).collect::<Vec<_>>(),
                                format_q(&seg.start),
                                seg.euler.iter().map(format_q).collect::<Vec<_>>(),
                            ));
                        }
                        for fail in &path.failures {
                            s.push_str(&format!("  not positive: {fail}\n"));
                        }
                        s.push_str(&format!("collapses at maximum: {}\n", path.collapses));
                        s
                    }
                    Format::Structured => structured(
                        "dh-check",
                        json!({
                            "positive": path.positive(),
                            "collapses": path.collapses,
                            "failures": path.failures,
                        }),
                    ),
                };
                return Outcome::new(code, text);
            }
            match dh_feasible(&data) {
                Ok(ok) => Outcome::new(
                    if ok { EXIT_OK } else { EXIT_INVALID },
                    match f {
                        Format::Text => format!("feasible: {ok}\n"),
                        Format::Structured => structured("dh-check", json!({ "feasible": ok })),
                    },
                ),
                Err(e) => localization_error(f, "dh-check", e),
            }
        }
    }
}
