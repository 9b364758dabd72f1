//! Command dispatch for the `parahecke` binary.

pub mod cache;
pub mod expr;
pub mod suites;

use std::path::PathBuf;
use std::sync::Arc;

use clap::{Parser, Subcommand, ValueEnum};
use parahecke::bundled::{bundled, BUNDLED};
use parahecke::ringcore::is_prime_power;
use parahecke::{Datum, DatumConfig, FacetType, HeckeAlgebra, HeckeElt};
use rayon::prelude::*;
use serde_json::{json, Value};

use crate::suites::{report_json, Check, Suite};

#[derive(Parser, Debug)]
#[command(name = "parahecke", version, about = "Iwahori-Hecke algebras, Bernstein elements and Satake tables")]
pub struct Cli {
    /// Root datum: a JSON file, or the name of a bundled datum (a1, a1_unequal, a1_torsion2, gl2, a2, c2).
    #[arg(long, global = true)]
    pub datum: Option<String>,
    /// Write output here instead of stdout.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    pub format: Format,
    /// Prime power at which to evaluate coefficients in CSV output.
    #[arg(long, global = true)]
    pub q: Option<u64>,
    /// Worker threads.
    #[arg(long, global = true)]
    pub jobs: Option<usize>,
    /// Height bound for antidominant enumeration.
    #[arg(long, global = true)]
    pub height: Option<i64>,
    /// Facet type as generator indices, e.g. "1" or "0,2"; empty for the Iwahori facet.
    #[arg(long, global = true, allow_hyphen_values = true)]
    pub facet: Option<String>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
    Pretty,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Product of two element expressions in the Iwahori-Matsumoto basis.
    Multiply { a: String, b: String },
    /// Inverse of a basis element i_w.
    Invert { w: String },
    /// Bernstein element of a lattice element, e.g. "t[1]" or "1".
    Theta { m: String },
    /// Rewrite an element expression in the Bernstein basis.
    ToBernstein { expr: String },
    /// Center elements z_m of a facet algebra for antidominant m up to --height.
    CenterBasis {
        #[arg(id = "facet_arg", value_name = "FACET")]
        facet: Option<String>,
    },
    /// Satake table of the special facet for antidominant x up to --height.
    Satake,
    /// Run a property suite: presentation, bern, center, satake, compat or all.
    Verify { suite: String },
}

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("usage: {0}")]
    Usage(String),
    #[error("{0}")]
    Compute(String),
}

impl From<parahecke::Error> for CliError {
    fn from(e: parahecke::Error) -> Self {
        CliError::Compute(e.to_string())
    }
}

pub struct Outcome {
    pub text: String,
    /// A property check failed.
    pub failed: bool,
}

impl Outcome {
    fn ok(text: String) -> Self {
        Outcome { text, failed: false }
    }
}

/// Reads a datum from a path, falling back to the bundled data by name.
pub fn load_datum(arg: &str) -> Result<HeckeAlgebra, CliError> {
    let text = match std::fs::read_to_string(arg) {
        Ok(t) => t,
        Err(e) => match bundled(arg) {
            Some(t) => t.to_string(),
            None => return Err(CliError::Usage(format!("cannot read datum {arg:?}: {e}"))),
        },
    };
    algebra_from_text(&text).map_err(|e| CliError::Usage(format!("invalid datum {arg:?}: {e}")))
}

fn algebra_from_text(text: &str) -> parahecke::Result<HeckeAlgebra> {
    let cfg = DatumConfig::from_json_str(text)?;
    Ok(HeckeAlgebra::new(Arc::new(Datum::new(cfg)?)))
}

fn parse_facet(h: &HeckeAlgebra, text: &str) -> Result<FacetType, CliError> {
    let inner = text.trim().trim_start_matches('{').trim_end_matches('}');
    let mut j = Vec::new();
    for tok in inner.split(',').map(str::trim).filter(|t| !t.is_empty()) {
        let s = tok.trim_start_matches('s');
        j.push(s.parse::<usize>().map_err(|_| CliError::Usage(format!("bad facet index {tok:?}")))?);
    }
    h.facet(&j).map_err(|e| CliError::Usage(e.to_string()))
}

fn render(v: &Value) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("serializable");
    s.push('\n');
    s
}

fn hecke_csv(h: &HeckeAlgebra, x: &HeckeElt, q: Option<u64>) -> Result<String, CliError> {
    let mut out = String::from(if q.is_some() { "element,coeff,value\n" } else { "element,coeff\n" });
    for (w, c) in h.sorted_terms(x) {
        out.push_str(&format!("\"{}\",\"{}\"", h.datum.format_elt(w), c));
        if let Some(q) = q {
            out.push_str(&format!(",{}", c.eval_q(q).map_err(parahecke::Error::from)?));
        }
        out.push('\n');
    }
    Ok(out)
}

fn emit_hecke(cli: &Cli, h: &HeckeAlgebra, key: &str, x: &HeckeElt, extra: Value) -> Result<String, CliError> {
    Ok(match cli.format {
        Format::Json => {
            let mut v = json!({"datum": h.datum.name()});
            if let (Value::Object(a), Value::Object(b)) = (&mut v, extra) {
                a.extend(b);
            }
            v[key] = h.to_json(x);
            render(&v)
        }
        Format::Csv => hecke_csv(h, x, cli.q)?,
        Format::Pretty => format!("{}\n", h.pretty(x)),
    })
}

fn require_height(cli: &Cli) -> Result<i64, CliError> {
    match cli.height {
        Some(h) if h >= 0 => Ok(h),
        Some(h) => Err(CliError::Usage(format!("--height must be nonnegative, got {h}"))),
        None => Err(CliError::Usage("this command needs --height".into())),
    }
}

fn with_cache<T>(h: &HeckeAlgebra, f: impl FnOnce(&HeckeAlgebra) -> T) -> T {
    let dir = cache::cache_dir();
    if let Some(d) = &dir {
        cache::load(d, h);
    }
    let out = f(h);
    if let Some(d) = &dir {
        if let Err(e) = cache::save(d, h) {
            eprintln!("warning: could not write cache in {}: {e}", d.display());
        }
    }
    out
}

pub fn run(cli: &Cli) -> Result<Outcome, CliError> {
    if let Some(q) = cli.q {
        if !is_prime_power(q) {
            return Err(CliError::Usage(format!("--q must be a prime power, got {q}")));
        }
    }
    if let Command::Verify { suite } = &cli.command {
        return verify(cli, suite);
    }
    let name = cli.datum.as_deref().ok_or_else(|| CliError::Usage("this command needs --datum".into()))?;
    let h = load_datum(name)?;
    with_cache(&h, |h| dispatch(cli, h))
}

fn dispatch(cli: &Cli, h: &HeckeAlgebra) -> Result<Outcome, CliError> {
    let d = &h.datum;
    let usage = |e: parahecke::Error| CliError::Usage(e.to_string());
    let text = match &cli.command {
        Command::Multiply { a, b } => {
            let x = expr::parse_hecke(h, a).map_err(usage)?;
            let y = expr::parse_hecke(h, b).map_err(usage)?;
            emit_hecke(cli, h, "product", &h.im_mul(&x, &y), json!({"a": a, "b": b}))?
        }
        Command::Invert { w } => {
            let x = expr::parse_group_elt(d, w).map_err(usage)?;
            let extra = json!({"w": d.format_elt(&x)});
            emit_hecke(cli, h, "inverse", &h.inverse_basis(&x), extra)?
        }
        Command::Theta { m } => {
            let lam = expr::parse_lattice_arg(d, m).map_err(usage)?;
            emit_hecke(cli, h, "theta", &h.theta(&lam), json!({"m": lam.to_string()}))?
        }
        Command::ToBernstein { expr: e } => {
            let x = expr::parse_hecke(h, e).map_err(usage)?;
            let b = h.im_to_bern(&x)?;
            match cli.format {
                Format::Json => render(&json!({"datum": d.name(), "expr": e, "bernstein": b.to_json(d)})),
                Format::Csv | Format::Pretty => {
                    let mut out = String::from("lattice,finite_weyl,coeff\n");
                    for t in b.to_json(d).as_array().unwrap() {
                        out.push_str(&format!(
                            "\"{}\",\"{}\",\"{}\"\n",
                            t["lattice"].as_str().unwrap(),
                            t["finite_weyl"],
                            parahecke::LaurentPoly::from_json(&t["coeff"]).ok_or_else(|| CliError::Compute("bad coefficient".into()))?
                        ));
                    }
                    out
                }
            }
        }
        Command::CenterBasis { facet } => {
            let text = facet.as_deref().or(cli.facet.as_deref()).unwrap_or("");
            let f = parse_facet(h, text)?;
            let height = require_height(cli)?;
            let ms = d.antidominant_up_to_height(height);
            let zs: Vec<Arc<HeckeElt>> =
                ms.par_iter().map(|m| h.center_elt(&f, m)).collect::<parahecke::Result<_>>()?;
            match cli.format {
                Format::Json => render(&json!({
                    "datum": d.name(),
                    "facet": f.j,
                    "poincare": f.poincare.to_json(),
                    "elements": ms.iter().zip(&zs).map(|(m, z)| json!({"m": m.to_string(), "z": h.to_json(z)})).collect::<Vec<_>>(),
                })),
                Format::Csv => {
                    let mut out = String::from(if cli.q.is_some() { "m,element,coeff,value\n" } else { "m,element,coeff\n" });
                    for (m, z) in ms.iter().zip(&zs) {
                        for line in hecke_csv(h, z, cli.q)?.lines().skip(1) {
                            out.push_str(&format!("\"{m}\",{line}\n"));
                        }
                    }
                    out
                }
                Format::Pretty => {
                    let mut out = format!("Center of H_{} for {} (P = {})\n", f.label(), d.name(), f.poincare);
                    for (m, z) in ms.iter().zip(&zs) {
                        out.push_str(&format!("z[{m}] = {}\n", h.pretty(z)));
                    }
                    out
                }
            }
        }
        Command::Satake => {
            let height = require_height(cli)?;
            if let Some(text) = &cli.facet {
                let f = parse_facet(h, text)?;
                if f.j != h.special_facet().j {
                    return Err(CliError::Usage(format!(
                        "Satake tables are computed for the special facet {:?}",
                        h.special_facet().j
                    )));
                }
            }
            let xs = d.antidominant_up_to_height(height);
            let t = h.satake_table_strict(&xs)?;
            match cli.format {
                Format::Json => render(&t.to_json()),
                Format::Csv => t.to_csv(cli.q)?,
                Format::Pretty => t.pretty(),
            }
        }
        Command::Verify { .. } => unreachable!("handled in run"),
    };
    Ok(Outcome::ok(text))
}

fn verify(cli: &Cli, suite_name: &str) -> Result<Outcome, CliError> {
    let suite = Suite::parse(suite_name).ok_or_else(|| {
        CliError::Usage(format!("unknown suite {suite_name:?}; expected one of {}", Suite::NAMES.join(", ")))
    })?;
    let algebras: Vec<HeckeAlgebra> = match &cli.datum {
        Some(name) => vec![load_datum(name)?],
        None => BUNDLED
            .iter()
            .map(|(n, t)| algebra_from_text(t).map_err(|e| CliError::Compute(format!("bundled datum {n}: {e}"))))
            .collect::<Result<_, _>>()?,
    };
    let results: Vec<Vec<Check>> = algebras.par_iter().map(|h| with_cache(h, |h| suite.run(h))).collect();
    let failed = results.iter().flatten().any(|c| !c.passed());
    let text = match cli.format {
        Format::Json => render(&json!({
            "suite": suite.name(),
            "passed": !failed,
            "reports": algebras.iter().zip(&results).map(|(h, c)| report_json(suite, h, c)).collect::<Vec<_>>(),
        })),
        Format::Csv => {
            let mut out = String::from("suite,datum,check,passed,cases,skipped\n");
            for (h, checks) in algebras.iter().zip(&results) {
                for c in checks {
                    out.push_str(&format!(
                        "{},\"{}\",{},{},{},\"{}\"\n",
                        suite.name(),
                        h.datum.name(),
                        c.name,
                        c.passed(),
                        c.cases,
                        c.skipped.as_deref().unwrap_or("")
                    ));
                }
            }
            out
        }
        Format::Pretty => {
            let mut out = String::new();
            for (h, checks) in algebras.iter().zip(&results) {
                for c in checks {
                    let status = match (c.passed(), &c.skipped) {
                        (true, Some(_)) => "SKIP",
                        (true, None) => "PASS",
                        (false, _) => "FAIL",
                    };
                    out.push_str(&format!("{status} {}/{} ({} cases)", h.datum.name(), c.name, c.cases));
                    if let Some(s) = &c.skipped {
                        out.push_str(&format!(" [{s}]"));
                    }
                    if let Some(ce) = &c.counterexample {
                        out.push_str(&format!(" counterexample: {ce}"));
                    }
                    out.push('\n');
                }
            }
            out.push_str(if failed { "verify: FAILED\n" } else { "verify: ok\n" });
            out
        }
    };
    Ok(Outcome { text, failed })
}
