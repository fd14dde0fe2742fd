//! Command-line front end. Every command produces a JSON report with
//! sorted keys; exact values are paired with 20-digit decimals.

pub mod files;

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use serde_json::{json, Value};
use sha2::{Digest, Sha256};

use crate::aprank::{
    aprank_bounds, euclideanize, li_ap_in_meyer, rank_gap_example, ApRankBracket, MeyerExpr, Settings, Translate,
};
use crate::cps::io::{
    cps_to_json, format_points, load_cps, parse_json, parse_points, parse_region, quad_vec_to_json,
    read_text, window_from_json, window_to_json, DECIMAL_DIGITS,
};
use crate::cps::{
    builtin, delone_certificate, enumerate_model_set_with_budget, meyer_certificate, CutProjectScheme, LatticePoint, Region,
    Window, DEFAULT_ENUMERATION_BUDGET,
};
use crate::error::{Error, Result};
use crate::exact::{max_li_subset, parse_quad, rank_over_q, QuadScalar, Rational};
use crate::progression::{
    ap_rank, brute_force_li_ap, crt_coefficients, is_proper, ArithmeticProgression, CoordinateKind,
    DEFAULT_POINT_BUDGET,
};
use crate::vdw::{find_mono_grid, grid_points, CubeColoring};
use files::{ap_to_json, expr_from_json, expr_to_json};

#[derive(Debug, Parser)]
#[command(name = "meyer-ap", version, about = "Exact higher-dimensional arithmetic progressions in model sets")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    /// Write the report here instead of standard output.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// Candidate budget for enumerations and searches.
    #[arg(long, global = true, default_value_t = DEFAULT_ENUMERATION_BUDGET)]
    pub budget: u64,
}

#[derive(Debug, Args)]
pub struct SchemeArgs {
    /// Built-in name (fibonacci, silver_mean, ammann_beenker, integer_lattice(d)) or scheme file.
    #[arg(long)]
    pub cps: Option<String>,
    /// Inline window such as "[0,1]" or a window file.
    #[arg(long)]
    pub window: Option<String>,
    /// Meyer expression file; replaces --cps/--window.
    #[arg(long, conflicts_with_all = ["cps", "window"])]
    pub expr: Option<PathBuf>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Enumerate a model set inside a region.
    Gen {
        #[arg(long)]
        cps: String,
        #[arg(long)]
        window: String,
        /// "|x|<=r", "|x-c|<=r" or "[lo,hi]x…".
        #[arg(long)]
        region: String,
        /// Grid spacing of the covering-radius estimate.
        #[arg(long, default_value = "1/10")]
        resolution: String,
        /// Also write the points as a tab-separated list.
        #[arg(long)]
        points_out: Option<PathBuf>,
    },
    /// Check the lattice, injectivity and density conditions of a scheme.
    Validate {
        #[arg(long)]
        cps: String,
    },
    /// Rank over Q of the points in a point-list file.
    Rank { points: PathBuf },
    /// CRT multipliers for an n-dimensional progression of length N.
    Crt { n: usize, length: u64 },
    /// Construct a certified linearly independent progression.
    FindAp {
        #[command(flatten)]
        scheme: SchemeArgs,
        #[arg(long)]
        length: u64,
        /// Physical centre, e.g. "100" or "(1,0)"; defaults to the origin.
        #[arg(long)]
        center: Option<String>,
        /// Keep only the first k ratios.
        #[arg(long)]
        rank_target: Option<usize>,
        /// Cross-check with exhaustive search over the enumerated neighbourhood.
        #[arg(long)]
        oracle: bool,
    },
    /// Search a coloured cube for a monochromatic grid.
    Vdw {
        #[arg(long)]
        colors: PathBuf,
        /// Grid depth.
        #[arg(long)]
        length: u64,
    },
    /// Bracket the ap-rank with certificates for lengths 1..=N.
    Aprank {
        #[command(flatten)]
        scheme: SchemeArgs,
        #[arg(long, default_value_t = 3)]
        length: u64,
    },
    /// Rewrite a rationally translated union as one model set.
    Euclideanize {
        #[arg(long)]
        expr: PathBuf,
        #[arg(long)]
        cps_out: Option<PathBuf>,
        #[arg(long)]
        window_out: Option<PathBuf>,
    },
    /// Print a built-in scheme, or the rank-gap expression with --tags.
    Example {
        /// A built-in scheme name, or "rank-gap".
        name: String,
        /// Number of symbolic translates for "rank-gap".
        #[arg(long, default_value_t = 1)]
        tags: usize,
        /// Scheme for "rank-gap".
        #[arg(long, default_value = "fibonacci")]
        cps: String,
    },
}

/// Exit status of a run.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Status {
    Ok = 0,
    Failure = 1,
    InputError = 2,
}

pub struct RunReport {
    pub status: Status,
    pub json: Value,
}

impl RunReport {
    pub fn render(&self) -> String {
        let mut s = serde_json::to_string_pretty(&self.json).expect("values serialize");
        s.push('\n');
        s
    }
}

/// Input-error classes exit with 2; everything else that fails is a
/// verification or search failure.
pub fn status_of(e: &Error) -> Status {
    match e {
        Error::RankGap { .. } | Error::NoMonoGrid { .. } | Error::BudgetExceeded { .. } | Error::TooFewPoints { .. } => {
            Status::Failure
        }
        _ => Status::InputError,
    }
}

pub fn dual(x: &QuadScalar) -> Value {
    json!({"exact": x.to_string(), "approx": x.to_decimal(DECIMAL_DIGITS)})
}

pub fn dual_rat(x: &Rational) -> Value {
    dual(&QuadScalar::from_rational(x.clone()))
}

fn dual_vec(v: &[QuadScalar]) -> Value {
    Value::Array(v.iter().map(dual).collect())
}

fn digest(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

#[derive(Default)]
struct Inputs(BTreeMap<String, String>);

impl Inputs {
    fn note(&mut self, key: &str, bytes: &[u8]) {
        self.0.insert(key.to_string(), digest(bytes));
    }

    fn file(&mut self, key: &str, path: &Path) -> Result<String> {
        let text = read_text(path)?;
        self.note(key, text.as_bytes());
        Ok(text)
    }

    fn cps(&mut self, spec: &str) -> Result<CutProjectScheme> {
        let path = Path::new(spec);
        match builtin(spec) {
            Err(Error::UnknownBuiltin(_)) if path.exists() => {
                self.file("cps", path)?;
            }
            _ => self.note("cps", spec.as_bytes()),
        }
        load_cps(spec)
    }

    fn window(&mut self, spec: &str) -> Result<Window> {
        let path = Path::new(spec.trim());
        if !spec.trim().starts_with(['[', '(', '{']) && path.exists() {
            let text = self.file("window", path)?;
            return window_from_json(&parse_json(&text, spec)?);
        }
        self.note("window", spec.as_bytes());
        crate::cps::io::load_window(spec)
    }

    fn expr(&mut self, path: &Path) -> Result<MeyerExpr> {
        let text = self.file("expr", path)?;
        expr_from_json(&parse_json(&text, &path.display().to_string())?, path.parent())
    }

    fn scheme(&mut self, args: &SchemeArgs) -> Result<MeyerExpr> {
        if let Some(p) = &args.expr {
            return self.expr(p);
        }
        let cps = self.cps(args.cps.as_deref().ok_or_else(|| Error::Input("--cps or --expr is required".into()))?)?;
        let window = match &args.window {
            Some(w) => self.window(w)?,
            None if cps.int_dim() == 0 => Window::trivial(),
            None => return Err(Error::Input("--window is required".into())),
        };
        MeyerExpr::plain(cps, window)
    }

    fn to_json(&self) -> Value {
        json!(self.0)
    }
}

fn point_json(p: &LatticePoint) -> Value {
    json!({"coords": p.coords, "physical": dual_vec(&p.physical), "internal": dual_vec(&p.internal)})
}

fn write_file(path: &Path, text: &str) -> Result<()> {
    std::fs::write(path, text).map_err(|e| Error::Input(format!("cannot write {}: {e}", path.display())))
}

struct Outcome {
    status: Status,
    result: Value,
    certificates: Value,
}

impl Outcome {
    fn ok(result: Value) -> Self {
        Self { status: Status::Ok, result, certificates: Value::Null }
    }
}

fn parse_center(text: Option<&str>, dim: usize) -> Result<Vec<QuadScalar>> {
    let Some(t) = text else {
        return Ok(vec![QuadScalar::zero(); dim]);
    };
    let t = t.trim();
    let t = t.strip_prefix('(').and_then(|s| s.strip_suffix(')')).unwrap_or(t);
    let c = t.split(',').map(parse_quad).collect::<Result<Vec<_>>>()?;
    if c.len() != dim {
        return Err(Error::DimensionMismatch { expected: dim, found: c.len() });
    }
    Ok(c)
}

fn bracket_json(b: &ApRankBracket) -> Value {
    json!({
        "lower": b.lower,
        "upper": b.upper,
        "upper_justification": b.upper_tag.as_str(),
        "tested_lengths": b.tested_lengths,
        "sampled_module_rank": b.sampled_rank,
    })
}

fn execute(cli: &Cli, inputs: &mut Inputs) -> Result<Outcome> {
    let settings = Settings { budget: cli.budget, ..Settings::default() };
    match &cli.command {
        Command::Gen { cps, window, region, resolution, points_out } => {
            let cps = inputs.cps(cps)?;
            let window = inputs.window(window)?;
            inputs.note("region", region.as_bytes());
            let region = parse_region(region, cps.phys_dim())?;
            let resolution = crate::exact::parse_rational(resolution)?;
            let points = enumerate_model_set_with_budget(&cps, &window, &region, cli.budget)?;
            if let Some(path) = points_out {
                write_file(path, &format_points(&points))?;
            }
            let mut certificates = json!({});
            if points.len() >= 2 {
                let meyer = meyer_certificate(&points)?;
                certificates["meyer_min_difference_sq"] = dual(&meyer);
                match delone_certificate(&points, &region, &resolution) {
                    Ok(c) => {
                        certificates["delone"] = json!({
                            "min_gap_sq": dual(&c.min_gap_sq),
                            "max_consecutive_gap": c.max_gap.as_ref().map(dual),
                            "covering_radius_bound": dual_rat(&c.covering_radius_bound),
                            "resolution": resolution.to_string(),
                            "grid_samples": c.grid_samples,
                        });
                    }
                    Err(Error::BudgetExceeded { .. }) => certificates["delone"] = Value::Null,
                    Err(e) => return Err(e),
                }
            }
            Ok(Outcome {
                status: Status::Ok,
                result: json!({
                    "scheme": cps_to_json(&cps),
                    "window": window_to_json(&window),
                    "region": region.to_string(),
                    "count": points.len(),
                    "points": points.iter().map(point_json).collect::<Vec<_>>(),
                }),
                certificates,
            })
        }
        Command::Validate { cps } => {
            let cps = inputs.cps(cps)?;
            let report = cps.validate();
            let status = if report.passes() { Status::Ok } else { Status::Failure };
            Ok(Outcome {
                status,
                result: json!({
                    "scheme": cps_to_json(&cps),
                    "lattice_invertible": report.lattice_invertible,
                    "projection_injective": report.projection_injective,
                    "density": report.density,
                    "determinant": report.determinant,
                    "passes": report.passes(),
                }),
                certificates: Value::Null,
            })
        }
        Command::Rank { points } => {
            let text = inputs.file("points", points)?;
            let pts = parse_points(&text)?;
            let rank = rank_over_q(&pts)?;
            let basis = max_li_subset(&pts)?;
            Ok(Outcome::ok(json!({"count": pts.len(), "rank": rank, "independent_rows": basis})))
        }
        Command::Crt { n, length } => {
            let c = crt_coefficients(*n, *length)?;
            let ratios: Vec<Vec<Rational>> = c.values.iter().map(|m| vec![Rational::from_integer(m.clone())]).collect();
            let ap = ArithmeticProgression::new(vec![Rational::from_integer(0.into())], ratios, *length, CoordinateKind::Lattice)?;
            let proper = is_proper(&ap, DEFAULT_POINT_BUDGET).ok();
            Ok(Outcome {
                status: Status::Ok,
                result: json!({
                    "n": n,
                    "length": length,
                    "primes": c.primes,
                    "m": c.values.iter().map(ToString::to_string).collect::<Vec<_>>(),
                }),
                certificates: json!({"sums_pairwise_distinct": proper}),
            })
        }
        Command::FindAp { scheme, length, center, rank_target, oracle } => {
            let expr = inputs.scheme(scheme)?;
            let cps = expr.cps().clone();
            let y = parse_center(center.as_deref(), cps.phys_dim())?;
            if let Some(k) = rank_target {
                if *k == 0 {
                    return Err(Error::Input("--rank-target must be positive".into()));
                }
                if *k > cps.rank() {
                    return Ok(Outcome {
                        status: Status::Failure,
                        result: json!({"found": false, "reason": format!("rank {k} exceeds d+m = {}", cps.rank())}),
                        certificates: Value::Null,
                    });
                }
            }
            let built = li_ap_in_meyer(&expr, *length, &y, &settings)?;
            let ap = match rank_target {
                Some(k) => built.ap.truncated(*k),
                None => built.ap.clone(),
            };
            let verified = ap.coefficients().all(|c| expr.contains(&ap.point(&c)));
            let points: Vec<Value> = ap
                .coefficients()
                .map(|c| {
                    let p = ap.point(&c);
                    json!({"coefficients": c, "coords": crate::cps::io::rat_vec_to_json(&p), "physical": expr.physical(&p).map(|x| dual_vec(&x))})
                })
                .collect();
            let mut certificates = json!({
                "verified_in_set": verified,
                "rank": ap_rank(&ap),
                "radius": built.radius.as_ref().map(dual_rat),
                "covering_radius": dual_rat(&built.construction.covering_radius),
            });
            if *oracle {
                certificates["oracle"] = run_oracle(&expr, &built, &y, ap.dimension(), *length, cli.budget)?;
            }
            let status = if verified { Status::Ok } else { Status::Failure };
            Ok(Outcome {
                status,
                result: json!({
                    "found": true,
                    "center": quad_vec_to_json(&y),
                    "progression": ap_to_json(&ap),
                    "branch": built.branch,
                    "points": points,
                }),
                certificates,
            })
        }
        Command::Vdw { colors, length } => {
            let text = inputs.file("colors", colors)?;
            let coloring: CubeColoring = text.parse()?;
            match find_mono_grid(&coloring, *length) {
                Some(g) => {
                    let color = coloring.color(&g.offsets);
                    Ok(Outcome::ok(json!({
                        "found": true,
                        "offsets": g.offsets,
                        "steps": g.steps,
                        "depth": g.depth,
                        "color": color,
                        "points": grid_points(&g),
                    })))
                }
                None => Ok(Outcome {
                    status: Status::Failure,
                    result: json!({"found": false, "depth": length, "size": coloring.size(), "dim": coloring.dim()}),
                    certificates: Value::Null,
                }),
            }
        }
        Command::Aprank { scheme, length } => {
            let expr = inputs.scheme(scheme)?;
            let b = aprank_bounds(&expr, *length, &settings)?;
            Ok(Outcome {
                status: Status::Ok,
                result: bracket_json(&b),
                certificates: Value::Array(b.certificates.iter().map(ap_to_json).collect()),
            })
        }
        Command::Euclideanize { expr, cps_out, window_out } => {
            let e = inputs.expr(expr)?;
            let out = match euclideanize(&e, &settings) {
                Ok(out) => out,
                Err(Error::RankGap { tag }) => {
                    return Ok(Outcome {
                        status: Status::Failure,
                        result: json!({"rank_gap": true, "translate": tag, "expression": expr_to_json(&e)}),
                        certificates: Value::Null,
                    })
                }
                Err(err) => return Err(err),
            };
            let cps_json = cps_to_json(&out.cps);
            let window_json = window_to_json(&out.window);
            if let Some(p) = cps_out {
                write_file(p, &(serde_json::to_string_pretty(&cps_json).expect("json") + "\n"))?;
            }
            if let Some(p) = window_out {
                write_file(p, &(serde_json::to_string_pretty(&window_json).expect("json") + "\n"))?;
            }
            Ok(Outcome {
                status: Status::Ok,
                result: json!({
                    "rank_gap": false,
                    "multiplier": out.multiplier,
                    "scheme": cps_json,
                    "window": window_json,
                    "lifts": out.lifts.iter().map(|g| dual_vec(g)).collect::<Vec<_>>(),
                }),
                certificates: json!({
                    "sample_region": out.sample_region.to_string(),
                    "sample_points": out.sample_points,
                    "result": "every sampled point lies in the new model set",
                }),
            })
        }
        Command::Example { name, tags, cps } => {
            if name == "rank-gap" {
                let cps = inputs.cps(cps)?;
                let expr = rank_gap_example(&cps, *tags)?;
                let symbolic: Vec<Value> = expr
                    .branches()
                    .iter()
                    .filter_map(|b| match &b.translate {
                        Translate::Symbolic { tag, approx } => Some(json!({"tag": tag, "approx": approx})),
                        Translate::Rational(_) => None,
                    })
                    .collect();
                return Ok(Outcome::ok(json!({"expression": expr_to_json(&expr), "symbolic": symbolic, "module_rank": expr.module_dim()})));
            }
            inputs.note("name", name.as_bytes());
            let cps = builtin(name)?;
            let report = cps.validate();
            Ok(Outcome::ok(json!({"scheme": cps_to_json(&cps), "passes": report.passes(), "density": report.density})))
        }
    }
}

// Exhaustive search over the enumerated neighbourhood of the constructed
// progression, in lattice coordinates of the first branch.
fn run_oracle(
    expr: &MeyerExpr,
    built: &crate::aprank::MeyerAp,
    y: &[QuadScalar],
    n: usize,
    length: u64,
    budget: u64,
) -> Result<Value> {
    let branch = &expr.branches()[0];
    let cps = expr.cps();
    let Translate::Rational(t) = &branch.translate else {
        return Ok(json!({"skipped": "symbolic branch"}));
    };
    let centre: Vec<QuadScalar> = y.iter().zip(t).map(|(a, b)| a - b).collect();
    let radius = built.construction.radius.clone();
    let region = Region::ball(centre, radius)?;
    let sample: Vec<Vec<Rational>> = enumerate_model_set_with_budget(cps, &branch.window, &region, budget)?
        .iter()
        .map(LatticePoint::coords_rational)
        .collect();
    let found = brute_force_li_ap(&sample, n, length, CoordinateKind::Lattice, budget)?;
    Ok(json!({
        "sample_points": sample.len(),
        "found": found.is_some(),
        "first": found.as_ref().map(ap_to_json),
    }))
}

/// Runs a parsed command. `echo` is recorded verbatim in the report.
pub fn run(cli: &Cli, echo: &[String]) -> RunReport {
    let mut inputs = Inputs::default();
    let outcome = execute(cli, &mut inputs);
    let (status, body) = match outcome {
        Ok(o) => (o.status, json!({"result": o.result, "certificates": o.certificates})),
        Err(e) => (status_of(&e), json!({"error": e.to_string()})),
    };
    let mut json = json!({
        "command": echo,
        "inputs": inputs.to_json(),
        "status": match status { Status::Ok => "ok", Status::Failure => "failure", Status::InputError => "input-error" },
        "exit_code": status as i32,
    });
    for (k, v) in body.as_object().expect("object") {
        json[k] = v.clone();
    }
    RunReport { status, json }
}

/// Parses `args` (program name first), runs, writes the report and returns
/// the exit code.
pub fn main_with_args(args: Vec<String>) -> i32 {
    let cli = match Cli::try_parse_from(&args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { Status::InputError as i32 } else { 0 };
        }
    };
    let report = run(&cli, &args[1..]);
    let text = report.render();
    match &cli.out {
        Some(path) => {
            if let Err(e) = std::fs::write(path, &text) {
                eprintln!("cannot write {}: {e}", path.display());
                return Status::InputError as i32;
            }
        }
        None => print!("{text}"),
    }
    if let Some(err) = report.json.get("error").and_then(Value::as_str) {
        eprintln!("error: {err}");
    }
    report.status as i32
}
