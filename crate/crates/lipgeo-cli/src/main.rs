//! Command-line front end for the surface-germ toolkit.
//!
//! One binary, subcommand style. Every run echoes its full effective
//! configuration into the report; identical configuration yields
//! byte-identical reports. Exit codes: 0 = yes/valid, 1 = no/invalid,
//! 2 = input error, 3 = inconclusive at the symbolic resolution bound.

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use num_rational::BigRational;
use serde_json::{json, Value};

use lipgeo::exponents::exponent::parse_rational;
use lipgeo::metriclab::{self, LneMode, ScaleSamplePlan};
use lipgeo::pizza::{extract_pizza, ExtractOptions};
use lipgeo::{json as wire, Error};

#[derive(Parser)]
#[command(name = "lipgeo", version, about = "bi-Lipschitz invariants of semialgebraic surface germs")]
struct Cli {
    /// Tolerance on numeric exponent estimates.
    #[arg(long, global = true, default_value_t = 0.05)]
    tol: f64,
    /// Largest sampled scale (power of two like 2^-6, or a float).
    #[arg(long, global = true, default_value = "2^-6")]
    tmax: String,
    /// Smallest sampled scale.
    #[arg(long, global = true, default_value = "2^-18")]
    tmin: String,
    /// Number of scale levels (geometric ladder).
    #[arg(long, global = true, default_value_t = 13)]
    levels: usize,
    /// Link samples per patch per level.
    #[arg(long, global = true, default_value_t = 17)]
    resolution: usize,
    /// Seed for all randomized sampling.
    #[arg(long, global = true, default_value_t = 42)]
    seed: u64,
    /// Center-arc recursion depth for pizza extraction.
    #[arg(long, global = true, default_value_t = 3)]
    depth: usize,
    /// Output format: json, dot, svg or text.
    #[arg(long, global = true, default_value = "json")]
    format: String,
    /// Write the report here instead of stdout.
    #[arg(long, global = true)]
    output: Option<PathBuf>,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Reduce a Hölder complex to its canonical form.
    Canonicalize { complex: PathBuf },
    /// Decide inner Lipschitz equivalence of two complexes (exit 0 = yes).
    CompareInner { a: PathBuf, b: PathBuf },
    /// Horn exponent of a single-cycle complex.
    Horn { complex: PathBuf },
    /// Realize a complex as a germ model.
    Realize { complex: PathBuf },
    /// Extract the minimal pizza of an admissible function on a triangle.
    PizzaExtract {
        function: PathBuf,
        /// Triangle exponent (rational >= 1).
        #[arg(long)]
        beta: String,
    },
    /// Decide combinatorial equivalence of two pizzas (exit 0 = yes).
    PizzaCompare {
        a: PathBuf,
        b: PathBuf,
        /// Also accept the orientation-reversed pizza.
        #[arg(long)]
        unoriented: bool,
    },
    /// LNE / weak-LNE / pancake verification on a germ model.
    Verify {
        model: PathBuf,
        /// Arc family to test (required for LNE modes).
        #[arg(long)]
        arcs: Option<PathBuf>,
        /// Weak mode (requires --beta).
        #[arg(long)]
        weak: bool,
        /// Triangle exponent claimed in weak mode.
        #[arg(long)]
        beta: Option<String>,
        /// Pancake decomposition to check instead of plain LNE.
        #[arg(long)]
        decomposition: Option<PathBuf>,
    },
    /// Generic-projection experiment on a horn model.
    Project {
        model: PathBuf,
        #[arg(long, default_value_t = 100)]
        planes: usize,
        /// Expected horn exponent.
        #[arg(long)]
        beta: String,
    },
    /// Tangent-cone experiment: rescaled links against exact tangent rays.
    Tangent { model: PathBuf },
    /// Pairwise symbolic tangency orders of an arc family.
    Tord { arcs: PathBuf },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok((code, out)) => {
            let rendered = match out {
                Output::Json(v) => serde_json::to_string_pretty(&v).expect("serializable") + "\n",
                Output::Text(s) => s,
            };
            match &cli.output {
                Some(path) => {
                    if let Err(e) = std::fs::write(path, rendered) {
                        eprintln!("error: cannot write {}: {e}", path.display());
                        return ExitCode::from(2);
                    }
                }
                None => print!("{rendered}"),
            }
            ExitCode::from(code)
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code_for(&e))
        }
    }
}

enum Output {
    Json(Value),
    Text(String),
}

fn exit_code_for(e: &Error) -> u8 {
    match e {
        Error::ResolutionExceeded(_) | Error::SymbolicSampleCollision => 3,
        _ => 2,
    }
}

fn parse_scale(s: &str) -> Result<f64, Error> {
    if let Some(rest) = s.strip_prefix("2^") {
        let k: i32 = rest
            .parse()
            .map_err(|_| Error::Json(format!("bad scale {s:?}")))?;
        return Ok(2f64.powi(k));
    }
    s.parse::<f64>().map_err(|_| Error::Json(format!("bad scale {s:?}")))
}

fn load(path: &Path) -> Result<Value, Error> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Error::Json(format!("cannot read {}: {e}", path.display())))?;
    serde_json::from_str(&text).map_err(|e| Error::Json(format!("{}: {e}", path.display())))
}

fn max_exp_bound() -> BigRational {
    match std::env::var("LIPGEO_MAX_EXP") {
        Ok(v) => parse_rational(&v).unwrap_or_else(|_| lipgeo::exponents::default_bound()),
        Err(_) => lipgeo::exponents::default_bound(),
    }
}

fn run(cli: &Cli) -> Result<(u8, Output), Error> {
    let plan = ScaleSamplePlan {
        t_max: parse_scale(&cli.tmax)?,
        t_min: parse_scale(&cli.tmin)?,
        levels: cli.levels,
        resolution: cli.resolution,
        seed: cli.seed,
    };
    let config = json!({
        "tol": cli.tol,
        "tmax": cli.tmax,
        "tmin": cli.tmin,
        "levels": cli.levels,
        "resolution": cli.resolution,
        "seed": cli.seed,
        "depth": cli.depth,
        "format": cli.format,
        "max_exp": wire::rational_to_json(&max_exp_bound()),
    });
    let envelope = |command: &str, result: Value| -> Value {
        json!({"command": command, "config": config, "result": result})
    };
    match &cli.cmd {
        Cmd::Canonicalize { complex } => {
            let c = wire::complex_from_json(&load(complex)?)?;
            let canon = c.canonicalize();
            match cli.format.as_str() {
                "dot" => Ok((0, Output::Text(canon.to_dot()))),
                _ => Ok((
                    0,
                    Output::Json(envelope(
                        "canonicalize",
                        json!({
                            "canonical": wire::complex_to_json(&canon),
                            "is_canonical": canon.is_canonical().0,
                        }),
                    )),
                )),
            }
        }
        Cmd::CompareInner { a, b } => {
            let ca = wire::complex_from_json(&load(a)?)?;
            let cb = wire::complex_from_json(&load(b)?)?;
            let witness = ca.equivalent(&cb);
            let equivalent = witness.is_some();
            let result = json!({
                "equivalent": equivalent,
                "witness": witness.map(|w| json!(w)).unwrap_or(Value::Null),
            });
            Ok((
                if equivalent { 0 } else { 1 },
                Output::Json(envelope("compare-inner", result)),
            ))
        }
        Cmd::Horn { complex } => {
            let c = wire::complex_from_json(&load(complex)?)?;
            let e = c.horn_exponent()?;
            Ok((
                0,
                Output::Json(envelope("horn", json!({"exponent": e.to_string()}))),
            ))
        }
        Cmd::Realize { complex } => {
            let c = wire::complex_from_json(&load(complex)?)?;
            let r = lipgeo::complexes::realize::realize_model(&c);
            if cli.format == "svg" {
                return Ok((0, Output::Text(render_link_svg(&r.model, &plan)?)));
            }
            Ok((
                0,
                Output::Json(envelope(
                    "realize",
                    json!({
                        "model": wire::model_to_json(&r.model),
                        "patch_edges": r.patch_edges,
                        "contact_exp": wire::rational_to_json(&r.contact_exp),
                        "vertex_coord": r.vertex_coord,
                    }),
                )),
            ))
        }
        Cmd::PizzaExtract { function, beta } => {
            let f = wire::expr_from_json(&load(function)?)?;
            let beta = parse_rational(beta)?;
            let opts = ExtractOptions { bound: max_exp_bound(), depth: cli.depth };
            let ex = extract_pizza(&f, &beta, &opts)?;
            Ok((
                0,
                Output::Json(envelope(
                    "pizza-extract",
                    json!({
                        "pizza": wire::pizza_to_json(&ex.pizza),
                        "scanned_arcs": ex.probes.len(),
                    }),
                )),
            ))
        }
        Cmd::PizzaCompare { a, b, unoriented } => {
            let pa = wire::pizza_from_json(&load(a)?)?;
            let pb = wire::pizza_from_json(&load(b)?)?;
            let eq = pa.equivalent(&pb, !unoriented)?;
            Ok((
                if eq { 0 } else { 1 },
                Output::Json(envelope(
                    "pizza-compare",
                    json!({"equivalent": eq, "oriented": !unoriented}),
                )),
            ))
        }
        Cmd::Verify { model, arcs, weak, beta, decomposition } => {
            let m = wire::model_from_json(&load(model)?)?;
            if let Some(dpath) = decomposition {
                let d = wire::decomposition_from_json(&load(dpath)?)?;
                let rep = metriclab::pancake_check(&m, &d, &plan, cli.tol)?;
                let ok = rep.valid && rep.minimal;
                return Ok((
                    if ok { 0 } else { 1 },
                    Output::Json(envelope("verify", serde_json::to_value(&rep).unwrap())),
                ));
            }
            let arcs_path = arcs
                .as_ref()
                .ok_or_else(|| Error::Json("verify needs --arcs or --decomposition".into()))?;
            let fam = wire::arc_family_from_json(&load(arcs_path)?)?;
            let mode = if *weak { LneMode::Weak } else { LneMode::Full };
            let beta = match beta {
                Some(b) => Some(
                    num_traits::ToPrimitive::to_f64(&parse_rational(b)?)
                        .ok_or_else(|| Error::Json("bad beta".into()))?,
                ),
                None => None,
            };
            let rep = metriclab::lne_report(&m, fam.arcs(), mode, beta, &plan, cli.tol)?;
            Ok((
                if rep.passed() { 0 } else { 1 },
                Output::Json(envelope("verify", serde_json::to_value(&rep).unwrap())),
            ))
        }
        Cmd::Project { model, planes, beta } => {
            let m = wire::model_from_json(&load(model)?)?;
            let expected = num_traits::ToPrimitive::to_f64(&parse_rational(beta)?)
                .ok_or_else(|| Error::Json("bad beta".into()))?;
            let rep = metriclab::projection_experiment(&m, *planes, cli.seed, &plan, expected, cli.tol)?;
            Ok((
                0,
                Output::Json(envelope("project", serde_json::to_value(&rep).unwrap())),
            ))
        }
        Cmd::Tangent { model } => {
            let m = wire::model_from_json(&load(model)?)?;
            let rep = metriclab::tangent_cone_sample(&m, &plan)?;
            Ok((
                0,
                Output::Json(envelope("tangent", serde_json::to_value(&rep).unwrap())),
            ))
        }
        Cmd::Tord { arcs } => {
            let fam = wire::arc_family_from_json(&load(arcs)?)?;
            let n = fam.arcs().len();
            let mut table = Vec::new();
            for i in 0..n {
                for j in i + 1..n {
                    let t = fam.arcs()[i].tord(&fam.arcs()[j])?;
                    table.push(json!({
                        "i": i,
                        "j": j,
                        "tord": t.to_string(),
                    }));
                }
            }
            Ok((0, Output::Json(envelope("tord", json!({"pairs": table})))))
        }
    }
}

/// Static SVG plot of the sampled link at the largest scale: orthogonal
/// projection to the first two coordinates, one polyline per patch.
fn render_link_svg(model: &metriclab::GermModel, plan: &ScaleSamplePlan) -> Result<String, Error> {
    let chains = metriclab::sample_link(model, plan.t_max, plan)?;
    let (mut lo_x, mut hi_x, mut lo_y, mut hi_y) = (f64::MAX, f64::MIN, f64::MAX, f64::MIN);
    for chain in &chains {
        for p in chain {
            lo_x = lo_x.min(p[0]);
            hi_x = hi_x.max(p[0]);
            lo_y = lo_y.min(p[1]);
            hi_y = hi_y.max(p[1]);
        }
    }
    let span = (hi_x - lo_x).max(hi_y - lo_y).max(1e-12);
    let scale = 400.0 / span;
    let map = |p: &[f64]| {
        (
            40.0 + (p[0] - lo_x) * scale,
            440.0 - (p[1] - lo_y) * scale,
        )
    };
    let mut svg = String::from(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" viewBox=\"0 0 480 480\">\n",
    );
    svg.push_str("<text x=\"240\" y=\"470\" text-anchor=\"middle\" font-size=\"12\">x0</text>\n");
    svg.push_str("<text x=\"12\" y=\"240\" text-anchor=\"middle\" font-size=\"12\" transform=\"rotate(-90 12 240)\">x1</text>\n");
    for chain in &chains {
        let pts: Vec<String> = chain
            .iter()
            .map(|p| {
                let (x, y) = map(p);
                format!("{x:.3},{y:.3}")
            })
            .collect();
        svg.push_str(&format!(
            "<polyline fill=\"none\" stroke=\"black\" stroke-width=\"1\" points=\"{}\"/>\n",
            pts.join(" ")
        ));
    }
    svg.push_str("</svg>\n");
    Ok(svg)
}
