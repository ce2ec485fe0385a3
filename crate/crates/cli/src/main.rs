//! `santalo` — command-line front end for the volume-product laboratory.
//!
//! Every command reads JSON inputs, echoes input digests, seeds, and
//! tolerances in its report, and writes JSON (default) or CSV. Exit codes:
//! 0 success, 1 domain error (the message names the violated
//! precondition), 2 parse error. `SANTALO_THREADS` caps the worker count.

use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::sync::Arc;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::{json, Value};
use sha2::{Digest, Sha256};

use santalo::functional::{
    ball_body, borell_check, borell_fit, fm_center, functional_product, Convention,
};
use santalo::geometry::{
    bm_ball_upper, body_measures, polar_body, santalo_point, sandwich_check, volume_product,
    SandwichInput,
};
use santalo::io::{BodySpec, FieldSpec, RayFnSpec, SandwichSpec};
use santalo::quad::{QuadratureSpec, SphereGrid};
use santalo::stability::{
    logconcave_center_check, psi_measure, stability_fit_functional, stability_fit_legendre,
    stability_scan, FitOptions, ScanCurve, ScanFamily,
};
use santalo::transform::{biconjugate, boundary_effect_radius, fenchel_young_gap, legendre};
use santalo::weights::{even_profile, validate_weight, ProfileSpec, WeightSpec};

#[derive(Parser)]
#[command(
    name = "santalo",
    about = "Polar duality, functional volume products, and their stability fits",
    long_about = None,
    after_help = "Formats: --format json (default) emits a report object; --format csv emits\n\
                  a flat table (scan: delta,eps,R,l1_primal,l1_dual,exponent_running;\n\
                  psi-measure: r,volume,bound,within_bound; otherwise key,value rows).\n\
                  SANTALO_THREADS caps the worker count. Exit codes: 0 ok, 1 domain\n\
                  error, 2 parse error."
)]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Fmt {
    Json,
    Csv,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum ConventionArg {
    HalfSquare,
    Square,
}

impl From<ConventionArg> for Convention {
    fn from(c: ConventionArg) -> Convention {
        match c {
            ConventionArg::HalfSquare => Convention::HalfSquare,
            ConventionArg::Square => Convention::Square,
        }
    }
}

#[derive(Args)]
struct Common {
    /// Write the report here as well as to stdout.
    #[arg(long)]
    output: Option<PathBuf>,
    /// Grid nodes per axis for sampled fields (defaults: 129 for n=2, 49
    /// for n=3, 17 for n=4).
    #[arg(long)]
    grid: Option<usize>,
    /// Numeric tolerance for solvers and checks.
    #[arg(long, default_value_t = 1e-6)]
    tol: f64,
    /// Seed for randomized cross-checks.
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, value_enum, default_value_t = Fmt::Json)]
    format: Fmt,
}

#[derive(Subcommand)]
enum Cmd {
    /// Polar body K^z of a body with respect to a center.
    Polar {
        #[arg(long)]
        input: PathBuf,
        /// Center z as comma-separated coordinates, e.g. "0,0".
        #[arg(long)]
        center: String,
        #[command(flatten)]
        common: Common,
    },
    /// Volume product V(K)·V(K^z).
    VolumeProduct {
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        center: String,
        #[command(flatten)]
        common: Common,
    },
    /// Santaló point: the interior z minimizing V(K)·V(K^z).
    SantaloPoint {
        #[arg(long)]
        input: PathBuf,
        #[command(flatten)]
        common: Common,
    },
    /// Upper bound on the Banach–Mazur distance to the ball.
    BmBall {
        #[arg(long)]
        input: PathBuf,
        #[command(flatten)]
        common: Common,
    },
    /// Centered-sandwich implication check (hypothesis vs conclusion).
    SandwichCheck {
        #[arg(long)]
        input: PathBuf,
        #[command(flatten)]
        common: Common,
    },
    /// Legendre transform of a field about a center.
    Legendre {
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        center: String,
        #[command(flatten)]
        common: Common,
    },
    /// Lower convex hull (biconjugate) of a field.
    Biconjugate {
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        center: String,
        #[command(flatten)]
        common: Common,
    },
    /// Minimum Fenchel–Young gap over grid pairs.
    FyGap {
        #[arg(long)]
        phi: PathBuf,
        #[arg(long)]
        psi: PathBuf,
        #[arg(long)]
        center: String,
        #[command(flatten)]
        common: Common,
    },
    /// Validate and normalize a weight.
    WeightValidate {
        #[arg(long)]
        input: PathBuf,
        #[command(flatten)]
        common: Common,
    },
    /// Functional Santaló product for f = ϱ∘φ, g = ϱ∘ℒ_zφ.
    FunctionalProduct {
        #[arg(long)]
        weight: PathBuf,
        #[arg(long)]
        phi: PathBuf,
        #[arg(long)]
        center: String,
        #[arg(long, value_enum, default_value_t = ConventionArg::HalfSquare)]
        convention: ConventionArg,
        #[command(flatten)]
        common: Common,
    },
    /// Ball's body K_{f,z} of a nonnegative field.
    BallBody {
        #[arg(long)]
        field: PathBuf,
        #[arg(long)]
        center: String,
        #[command(flatten)]
        common: Common,
    },
    /// Fradelizi–Meyer center of a nonnegative field.
    FmCenter {
        #[arg(long)]
        field: PathBuf,
        #[command(flatten)]
        common: Common,
    },
    /// Borell hypothesis margin and integral ratio for (M, F, G).
    BorellCheck {
        #[arg(long)]
        m: PathBuf,
        #[arg(long)]
        f: PathBuf,
        #[arg(long)]
        g: PathBuf,
        #[command(flatten)]
        common: Common,
    },
    /// Borell stability fit: (a, b) minimizing ∫|aF(bt) - M(t)|dt.
    BorellFit {
        #[arg(long)]
        m: PathBuf,
        #[arg(long)]
        f: PathBuf,
        #[arg(long)]
        g: PathBuf,
        #[command(flatten)]
        common: Common,
    },
    /// Stability fit over (z, c, ξ, T); legendre mode takes --phi,
    /// functional mode takes --f/--g/--center.
    StabilityFit {
        #[arg(long)]
        weight: PathBuf,
        #[arg(long)]
        phi: Option<PathBuf>,
        #[arg(long)]
        f: Option<PathBuf>,
        #[arg(long)]
        g: Option<PathBuf>,
        #[arg(long)]
        center: Option<String>,
        #[command(flatten)]
        common: Common,
    },
    /// Measure of the exceptional set Ψ inside R-balls.
    PsiMeasure {
        #[arg(long)]
        phi: PathBuf,
        #[arg(long)]
        eps: f64,
        /// Radii as comma-separated values, e.g. "1,2,4".
        #[arg(long)]
        radii: String,
        #[arg(long, default_value_t = 1.0)]
        eta: f64,
        #[command(flatten)]
        common: Common,
    },
    /// Center-value closeness check for log-concave h against an even
    /// profile ω.
    Prop31Check {
        #[arg(long)]
        h: PathBuf,
        #[arg(long)]
        omega: PathBuf,
        #[arg(long)]
        n: usize,
        #[arg(long)]
        eps: f64,
        #[command(flatten)]
        common: Common,
    },
    /// Deficit-vs-distance scan over a built-in perturbation family.
    Scan {
        #[arg(long)]
        family: String,
        #[arg(long, default_value_t = 2)]
        n: usize,
        #[arg(long, default_value_t = 6)]
        steps: usize,
        #[command(flatten)]
        common: Common,
    },
    /// Run the embedded acceptance suite.
    Selftest {
        /// Run the reduced subset (< 15 s).
        #[arg(long)]
        quick: bool,
    },
}

// ---------------------------------------------------------------------------
// plumbing
// ---------------------------------------------------------------------------

enum Failure {
    Parse(String),
    Domain(String),
}

impl From<santalo::Error> for Failure {
    fn from(e: santalo::Error) -> Failure {
        Failure::Domain(e.to_string())
    }
}

type CliResult<T> = Result<T, Failure>;

#[derive(Serialize)]
struct InputDigest {
    path: String,
    sha256: String,
}

#[derive(Serialize)]
struct Defaults {
    grid_nodes: usize,
    tol: f64,
    seed: u64,
}

#[derive(Serialize)]
struct Envelope {
    command: String,
    inputs: Vec<InputDigest>,
    params: Value,
    defaults: Defaults,
    result: Value,
}

fn digest(path: &Path) -> CliResult<InputDigest> {
    let bytes = std::fs::read(path)
        .map_err(|e| Failure::Parse(format!("cannot read {}: {e}", path.display())))?;
    let mut hasher = Sha256::new();
    hasher.update(&bytes);
    let hex: String = hasher.finalize().iter().map(|b| format!("{b:02x}")).collect();
    Ok(InputDigest { path: path.display().to_string(), sha256: hex })
}

fn load_json<T: serde::de::DeserializeOwned>(path: &Path) -> CliResult<T> {
    let bytes = std::fs::read(path)
        .map_err(|e| Failure::Parse(format!("cannot read {}: {e}", path.display())))?;
    serde_json::from_slice(&bytes)
        .map_err(|e| Failure::Parse(format!("cannot parse {}: {e}", path.display())))
}

fn parse_vec(s: &str) -> CliResult<Vec<f64>> {
    s.split(',')
        .map(|p| p.trim().parse::<f64>())
        .collect::<Result<Vec<f64>, _>>()
        .map_err(|e| Failure::Parse(format!("bad coordinate list '{s}': {e}")))
}

fn default_nodes(dim: usize) -> usize {
    match dim {
        1 => 513,
        2 => 129,
        3 => 49,
        _ => 17,
    }
}

fn build_field(path: &Path, grid: Option<usize>) -> CliResult<santalo::transform::GridField> {
    let spec: FieldSpec = load_json(path)?;
    let dim = spec.dim().map_err(|e| Failure::Parse(e.to_string()))?;
    let nodes = grid.unwrap_or_else(|| default_nodes(dim));
    let base = path.parent().unwrap_or(Path::new("."));
    spec.build(nodes, base).map_err(|e| Failure::Parse(e.to_string()))
}

fn build_weight(path: &Path) -> CliResult<santalo::weights::NormalizedWeight> {
    let spec: WeightSpec = load_json(path)?;
    validate_weight(&spec).map_err(Failure::from)
}

/// Serialize one value as a CSV key/value table or structured rows.
fn to_csv(result: &Value) -> String {
    fn flatten(prefix: &str, v: &Value, rows: &mut Vec<(String, String)>) {
        match v {
            Value::Object(map) => {
                for (k, vv) in map {
                    let key = if prefix.is_empty() { k.clone() } else { format!("{prefix}.{k}") };
                    flatten(&key, vv, rows);
                }
            }
            Value::Array(items) if items.iter().all(|i| !i.is_object() && !i.is_array()) => {
                let joined: Vec<String> = items.iter().map(render_scalar).collect();
                rows.push((prefix.to_string(), joined.join(";")));
            }
            Value::Array(items) => {
                for (i, item) in items.iter().enumerate() {
                    flatten(&format!("{prefix}[{i}]"), item, rows);
                }
            }
            other => rows.push((prefix.to_string(), render_scalar(other))),
        }
    }
    fn render_scalar(v: &Value) -> String {
        match v {
            Value::Null => String::new(),
            Value::String(s) => s.clone(),
            other => other.to_string(),
        }
    }
    // scan curves and psi tables render as real tables
    if let Some(points) = result.get("points").and_then(|p| p.as_array()) {
        let mut out = String::from("delta,eps,R,l1_primal,l1_dual,exponent_running\n");
        for p in points {
            out.push_str(&format!(
                "{},{},{},{},{},{}\n",
                p["delta"], p["eps"], p["r_eps"], p["l1_primal"], p["l1_dual"],
                p.get("exponent_running").map(render_scalar).unwrap_or_default()
            ));
        }
        return out;
    }
    if let Some(rows) = result.get("rows").and_then(|p| p.as_array()) {
        let mut out = String::from("r,volume,bound,within_bound\n");
        for p in rows {
            out.push_str(&format!(
                "{},{},{},{}\n",
                p["r"], p["volume"], p["bound"], p["within_bound"]
            ));
        }
        return out;
    }
    let mut rows = Vec::new();
    flatten("", result, &mut rows);
    let mut out = String::from("key,value\n");
    for (k, v) in rows {
        out.push_str(&format!("{k},{v}\n"));
    }
    out
}

fn emit(env: &Envelope, fmt: Fmt, output: Option<&Path>) -> CliResult<()> {
    let text = match fmt {
        Fmt::Json => {
            let mut s = serde_json::to_string_pretty(env)
                .map_err(|e| Failure::Parse(format!("serialization failed: {e}")))?;
            s.push('\n');
            s
        }
        Fmt::Csv => to_csv(&env.result),
    };
    print!("{text}");
    if let Some(path) = output {
        std::fs::write(path, &text)
            .map_err(|e| Failure::Parse(format!("cannot write {}: {e}", path.display())))?;
    }
    Ok(())
}

fn to_value<T: Serialize>(v: &T) -> Value {
    serde_json::to_value(v).expect("serializable report")
}

// ---------------------------------------------------------------------------
// command bodies
// ---------------------------------------------------------------------------

fn run(cmd: Cmd) -> CliResult<()> {
    match cmd {
        Cmd::Polar { input, center, common } => {
            let body = load_json::<BodySpec>(&input)?.build().map_err(Failure::from)?;
            let z = parse_vec(&center)?;
            let polar = polar_body(&body, &z)?;
            let result = json!({
                "polar": to_value(&BodySpec::from_body(&polar)),
                "measures": to_value(&body_measures(&polar)?),
            });
            finish("polar", &[&input], json!({"center": z}), &common, result)
        }
        Cmd::VolumeProduct { input, center, common } => {
            let body = load_json::<BodySpec>(&input)?.build().map_err(Failure::from)?;
            let z = parse_vec(&center)?;
            let product = volume_product(&body, &z)?;
            let m = body_measures(&body)?;
            let result = json!({
                "product": product,
                "volume": m.volume,
                "centroid": m.centroid,
            });
            finish("volume-product", &[&input], json!({"center": z}), &common, result)
        }
        Cmd::SantaloPoint { input, common } => {
            let body = load_json::<BodySpec>(&input)?.build().map_err(Failure::from)?;
            let (z, product) = santalo_point(&body, common.tol.min(1e-7))?;
            let result = json!({"z": z, "product": product});
            finish("santalo-point", &[&input], json!({}), &common, result)
        }
        Cmd::BmBall { input, common } => {
            let body = load_json::<BodySpec>(&input)?.build().map_err(Failure::from)?;
            let delta = bm_ball_upper(&body)?;
            let result = json!({"bm_upper": delta, "note": "upper bound via Löwner/inscribed-ball sandwich"});
            finish("bm-ball", &[&input], json!({}), &common, result)
        }
        Cmd::SandwichCheck { input, common } => {
            let spec: SandwichSpec = load_json(&input)?;
            let body = spec.body.build().map_err(Failure::from)?;
            let ellipsoid = spec.ellipsoid.build().map_err(Failure::from)?;
            let grid = SphereGrid::standard(body.dim(), 256).map_err(Failure::from)?;
            let inp = SandwichInput { body, ellipsoid, w: spec.w.clone(), mu: spec.mu };
            let report = sandwich_check(&inp, &grid, 1e-9)?;
            finish(
                "sandwich-check",
                &[&input],
                json!({"w": spec.w, "mu": spec.mu}),
                &common,
                to_value(&report),
            )
        }
        Cmd::Legendre { input, center, common } => {
            let field = build_field(&input, common.grid)?;
            let z = parse_vec(&center)?;
            let out = legendre(&field, &z)?;
            let result = json!({
                "field": to_value(&FieldSpec::from_field(&out)),
                "boundary_effect_radius": boundary_effect_radius(&field),
            });
            finish("legendre", &[&input], json!({"center": z}), &common, result)
        }
        Cmd::Biconjugate { input, center, common } => {
            let field = build_field(&input, common.grid)?;
            let z = parse_vec(&center)?;
            let out = biconjugate(&field, &z)?;
            let result = json!({"field": to_value(&FieldSpec::from_field(&out))});
            finish("biconjugate", &[&input], json!({"center": z}), &common, result)
        }
        Cmd::FyGap { phi, psi, center, common } => {
            let f = build_field(&phi, common.grid)?;
            let p = build_field(&psi, common.grid)?;
            let z = parse_vec(&center)?;
            let gap = fenchel_young_gap(&f, &p, &z)?;
            finish("fy-gap", &[&phi, &psi], json!({"center": z}), &common, json!({"gap": gap}))
        }
        Cmd::WeightValidate { input, common } => {
            let w = build_weight(&input)?;
            finish("weight-validate", &[&input], json!({}), &common, to_value(&w))
        }
        Cmd::FunctionalProduct { weight, phi, center, convention, common } => {
            let w = build_weight(&weight)?;
            let field = build_field(&phi, common.grid)?;
            let z = parse_vec(&center)?;
            let report = functional_product(&w, &field, &z, convention.into())?;
            finish(
                "functional-product",
                &[&weight, &phi],
                json!({"center": z}),
                &common,
                to_value(&report),
            )
        }
        Cmd::BallBody { field, center, common } => {
            let f = build_field(&field, common.grid)?;
            let z = parse_vec(&center)?;
            let grid = Arc::new(
                SphereGrid::standard(f.dim(), SphereGrid::default_size(f.dim()).min(2048))
                    .map_err(Failure::from)?,
            );
            let spec = QuadratureSpec::adaptive(common.tol.min(1e-8));
            let body = ball_body(&f, &z, grid, &spec)?;
            let result = json!({
                "body": to_value(&BodySpec::from_body(&body)),
                "measures": to_value(&body_measures(&body)?),
            });
            finish("ball-body", &[&field], json!({"center": z}), &common, result)
        }
        Cmd::FmCenter { field, common } => {
            let f = build_field(&field, common.grid)?;
            let grid = Arc::new(
                SphereGrid::standard(f.dim(), 256).map_err(Failure::from)?,
            );
            let spec = QuadratureSpec::adaptive(1e-8);
            let z = fm_center(&f, common.tol, grid, &spec)?;
            finish("fm-center", &[&field], json!({}), &common, json!({"z": z}))
        }
        Cmd::BorellCheck { m, f, g, common } => {
            let mf = load_json::<RayFnSpec>(&m)?.build().map_err(Failure::from)?;
            let ff = load_json::<RayFnSpec>(&f)?.build().map_err(Failure::from)?;
            let gf = load_json::<RayFnSpec>(&g)?.build().map_err(Failure::from)?;
            let spec = QuadratureSpec::adaptive(common.tol.min(1e-9));
            let report = borell_check(&*mf, &*ff, &*gf, &spec)?;
            finish("borell-check", &[&m, &f, &g], json!({}), &common, to_value(&report))
        }
        Cmd::BorellFit { m, f, g, common } => {
            let mf = load_json::<RayFnSpec>(&m)?.build().map_err(Failure::from)?;
            let ff = load_json::<RayFnSpec>(&f)?.build().map_err(Failure::from)?;
            let gf = load_json::<RayFnSpec>(&g)?.build().map_err(Failure::from)?;
            let spec = QuadratureSpec::adaptive(common.tol.min(1e-9));
            let report = borell_fit(&*mf, &*ff, &*gf, &spec)?;
            finish("borell-fit", &[&m, &f, &g], json!({}), &common, to_value(&report))
        }
        Cmd::StabilityFit { weight, phi, f, g, center, common } => {
            let w = build_weight(&weight)?;
            let opts = FitOptions { tol: common.tol, ..Default::default() };
            match (phi, f, g) {
                (Some(phi), None, None) => {
                    let field = build_field(&phi, common.grid)?;
                    let fit = stability_fit_legendre(&w, &field, &opts)?;
                    finish(
                        "stability-fit",
                        &[&weight, &phi],
                        json!({"mode": "legendre"}),
                        &common,
                        to_value(&fit),
                    )
                }
                (None, Some(f), Some(g)) => {
                    let ff = build_field(&f, common.grid)?;
                    let gf = build_field(&g, common.grid)?;
                    let z = match center {
                        Some(c) => parse_vec(&c)?,
                        None => vec![0.0; ff.dim()],
                    };
                    let grid = Arc::new(
                        SphereGrid::standard(ff.dim(), 256).map_err(Failure::from)?,
                    );
                    let fit = stability_fit_functional(&w, &ff, &gf, &z, grid, &opts)?;
                    finish(
                        "stability-fit",
                        &[&weight, &f, &g],
                        json!({"mode": "functional", "center": z}),
                        &common,
                        to_value(&fit),
                    )
                }
                _ => Err(Failure::Parse(
                    "stability-fit needs either --phi (legendre mode) or --f and --g (functional mode)".into(),
                )),
            }
        }
        Cmd::PsiMeasure { phi, eps, radii, eta, common } => {
            let field = build_field(&phi, common.grid)?;
            let rs = parse_vec(&radii)?;
            let rows = psi_measure(&field, eps, field.dim(), &rs, eta)?;
            finish(
                "psi-measure",
                &[&phi],
                json!({"eps": eps, "eta": eta}),
                &common,
                json!({"threshold": eps.powf(1.0/(128.0*(field.dim()*field.dim()) as f64)), "rows": to_value(&rows)}),
            )
        }
        Cmd::Prop31Check { h, omega, n, eps, common } => {
            let hf = load_json::<RayFnSpec>(&h)?.build().map_err(Failure::from)?;
            let om_spec: ProfileSpec = load_json(&omega)?;
            let om = even_profile(&om_spec).map_err(Failure::from)?;
            let qspec = QuadratureSpec::adaptive(common.tol.min(1e-9));
            let report = logconcave_center_check(&*hf, &om, n, eps, &qspec)?;
            finish(
                "prop31-check",
                &[&h, &omega],
                json!({"n": n, "eps": eps}),
                &common,
                to_value(&report),
            )
        }
        Cmd::Scan { family, n, steps, common } => {
            let fam = ScanFamily::parse(&family)?;
            let w = validate_weight(&WeightSpec::Exp { rate: 1.0 }).map_err(Failure::from)?;
            let deltas = fam.default_deltas(steps);
            let nodes = common.grid.unwrap_or(if n == 2 { 1153 } else { 97 });
            let curve: ScanCurve = stability_scan(&w, fam, n, &deltas, 8.0, nodes)?;
            finish(
                "scan",
                &[],
                json!({"family": family, "n": n, "steps": steps, "nodes": nodes}),
                &common,
                to_value(&curve),
            )
        }
        Cmd::Selftest { quick } => {
            let outcomes = santalo::selftest::run_all(quick);
            let mut all_pass = true;
            for o in &outcomes {
                println!(
                    "criterion {:2} [{}]: {} — {} ({:.2}s)",
                    o.id,
                    o.name,
                    if o.pass { "PASS" } else { "FAIL" },
                    o.detail,
                    o.seconds
                );
                all_pass &= o.pass;
            }
            if all_pass {
                println!("selftest: all {} criteria passed", outcomes.len());
                Ok(())
            } else {
                let failed: Vec<String> = outcomes
                    .iter()
                    .filter(|o| !o.pass)
                    .map(|o| format!("{} ({})", o.id, o.name))
                    .collect();
                Err(Failure::Domain(format!("selftest failed: {}", failed.join(", "))))
            }
        }
    }
}

fn finish(
    command: &str,
    inputs: &[&PathBuf],
    params: Value,
    common: &Common,
    result: Value,
) -> CliResult<()> {
    let digests: CliResult<Vec<InputDigest>> = inputs.iter().map(|p| digest(p)).collect();
    let env = Envelope {
        command: command.to_string(),
        inputs: digests?,
        params,
        defaults: Defaults {
            grid_nodes: common.grid.unwrap_or(0),
            tol: common.tol,
            seed: common.seed,
        },
        result,
    };
    emit(&env, common.format, common.output.as_deref())
}

fn main() -> ExitCode {
    if let Ok(threads) = std::env::var("SANTALO_THREADS") {
        if let Ok(n) = threads.parse::<usize>() {
            let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
        }
    }
    let cli = Cli::parse();
    match run(cli.cmd) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Domain(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
        Err(Failure::Parse(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
    }
}
