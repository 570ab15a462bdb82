//! Command-line front end.
//!
//! Exit codes: 0 success, 1 usage, 2 mismatch against `--expect`, 3 internal error.

use std::fs;
use std::io::Write as _;
use std::path::{Path, PathBuf};
use std::sync::Mutex;
use std::time::Instant;

use clap::{Parser, Subcommand, ValueEnum};
use serde::{de::DeserializeOwned, Deserialize, Serialize};
use serde_json::Value;

use crate::classify::{classify_lattice, compare_reports, lattice_for, ClassificationReport, REPORT_VERSION};
use crate::error::{Error, Result};
use crate::ideals::{class_group, steinitz_representatives};
use crate::lattice::WeightMode;
use crate::qfield::QuadField;
use crate::voronoi::{enumerate_perfect_forms, well_rounded_classes, WalkOptions};

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 1;
pub const EXIT_MISMATCH: i32 = 2;
pub const EXIT_INTERNAL: i32 = 3;

/// Cache files carry this version; anything else is recomputed.
pub const CACHE_VERSION: u32 = REPORT_VERSION;

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum OutFormat {
    Text,
    Json,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Weight {
    Phi0,
    Phi1,
}

impl From<Weight> for WeightMode {
    fn from(w: Weight) -> Self {
        match w {
            Weight::Phi0 => WeightMode::Phi0,
            Weight::Phi1 => WeightMode::Phi1,
        }
    }
}

#[derive(Debug, Parser)]
#[command(name = "ugv", version, about = "Maximal finite subgroups of GL(L) over imaginary quadratic fields")]
pub struct Cli {
    /// Field discriminant D, or the squarefree d < 0
    #[arg(long, global = true, allow_negative_numbers = true)]
    pub disc: Option<i64>,
    /// Steinitz class: `principal` or `p,k` (k-th prime ideal above p)
    #[arg(long, global = true, default_value = "principal")]
    pub steinitz: String,
    #[arg(long, global = true, value_enum, default_value = "phi1")]
    pub weight: Weight,
    /// Rank of the lattice
    #[arg(long, global = true, default_value_t = 2)]
    pub n: usize,
    #[arg(long, global = true, value_enum, default_value = "text")]
    pub out: OutFormat,
    /// Cache directory (default: `UGV_CACHE`, else no cache)
    #[arg(long, global = true)]
    pub cache: Option<PathBuf>,
    /// Worker threads
    #[arg(long, global = true)]
    pub jobs: Option<usize>,
    /// Golden JSON file to compare the result against
    #[arg(long, global = true)]
    pub expect: Option<PathBuf>,
    /// Shuffle the facet order of all walks
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    #[arg(short, long, global = true, action = clap::ArgAction::Count)]
    pub verbose: u8,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Class group, its quotient by squares and Steinitz representatives
    ClassGroup,
    /// Perfect forms and their neighbour graph
    Perfect {
        /// Also write the graph in DOT format
        #[arg(long)]
        dot: Option<PathBuf>,
    },
    /// Well-rounded minimal classes with stabilizers
    Classes,
    /// Maximal finite subgroups up to conjugacy
    MaxFinite,
    /// Compare unit groups across Steinitz classes
    Compare,
}

/// Resolved configuration of one run.
#[derive(Debug)]
pub struct RunConfig {
    pub disc: i64,
    pub steinitz: String,
    pub weight: WeightMode,
    pub n: usize,
    pub out: OutFormat,
    pub cache: Option<PathBuf>,
    pub jobs: Option<usize>,
    pub expect: Option<PathBuf>,
    pub seed: Option<u64>,
    pub verbose: u8,
    /// Diagnostics for stderr, flushed by `run`.
    pub notes: Mutex<Vec<String>>,
}

impl RunConfig {
    pub fn from_cli(cli: &Cli) -> Result<RunConfig> {
        let disc = cli.disc.ok_or_else(|| Error::Parse("--disc is required".into()))?;
        let k = QuadField::from_disc_or_d(disc)?;
        if cli.n < 1 {
            return Err(Error::Parse("--n must be positive".into()));
        }
        let cache = cli.cache.clone().or_else(|| std::env::var_os("UGV_CACHE").map(PathBuf::from));
        Ok(RunConfig {
            disc: k.disc(),
            steinitz: cli.steinitz.clone(),
            weight: cli.weight.into(),
            n: cli.n,
            out: cli.out,
            cache,
            jobs: cli.jobs,
            expect: cli.expect.clone(),
            seed: cli.seed,
            verbose: cli.verbose,
            notes: Mutex::default(),
        })
    }

    fn note(&self, msg: String) {
        self.notes.lock().unwrap_or_else(|e| e.into_inner()).push(msg);
    }

    fn opts(&self) -> WalkOptions {
        WalkOptions { seed: self.seed, max_nodes: None }
    }
}

/// Output of one command: canonical JSON and a text rendering.
pub struct Output {
    pub json: Value,
    pub text: String,
}

/// Canonical JSON text: sorted keys, two-space indent, trailing newline.
pub fn to_canonical_json<T: Serialize>(v: &T) -> Result<String> {
    let v = serde_json::to_value(v)?;
    Ok(serde_json::to_string_pretty(&v)? + "\n")
}

#[derive(Serialize, Deserialize)]
struct CacheEntry<T> {
    cache_version: u32,
    crate_version: String,
    payload: T,
}

fn cache_path(dir: &Path, key: &str) -> PathBuf {
    dir.join(format!("{key}.json"))
}

fn cache_load<T: DeserializeOwned>(cfg: &RunConfig, dir: &Path, key: &str) -> Option<T> {
    let text = fs::read_to_string(cache_path(dir, key)).ok()?;
    match serde_json::from_str::<CacheEntry<T>>(&text) {
        Ok(e) if e.cache_version == CACHE_VERSION && e.crate_version == env!("CARGO_PKG_VERSION") => Some(e.payload),
        _ => {
            cfg.note(format!("warning: stale or unreadable cache entry {key}, recomputing"));
            None
        }
    }
}

/// Write-then-rename so an interrupted run leaves no partial file.
fn cache_store<T: Serialize>(dir: &Path, key: &str, payload: &T) -> Result<()> {
    fs::create_dir_all(dir)?;
    let entry = CacheEntry { cache_version: CACHE_VERSION, crate_version: env!("CARGO_PKG_VERSION").into(), payload };
    let final_path = cache_path(dir, key);
    let tmp = dir.join(format!(".{key}.{}.tmp", std::process::id()));
    {
        let mut f = fs::File::create(&tmp)?;
        f.write_all(to_canonical_json(&entry)?.as_bytes())?;
        f.sync_all()?;
    }
    fs::rename(&tmp, &final_path)?;
    Ok(())
}

fn report_key(disc: i64, n: usize, steinitz: &str, mode: WeightMode) -> String {
    format!("max-finite_v{CACHE_VERSION}_D{disc}_n{n}_{}_{}", steinitz.replace(',', "-"), mode.name())
}

fn lattice_report(cfg: &RunConfig, steinitz: &str) -> Result<ClassificationReport> {
    let (l, rep) = lattice_for(cfg.disc, cfg.n, steinitz)?;
    let key = report_key(cfg.disc, cfg.n, &rep.label, cfg.weight);
    // seeded runs exercise the walk and bypass the cache
    let use_cache = cfg.seed.is_none();
    if let (Some(dir), true) = (&cfg.cache, use_cache) {
        if let Some(r) = cache_load::<ClassificationReport>(cfg, dir, &key) {
            if cfg.verbose > 0 {
                cfg.note(format!("cache hit {key}"));
            }
            return Ok(r);
        }
    }
    let t = Instant::now();
    let r = classify_lattice(&l, &rep.label, cfg.weight, &cfg.opts())?;
    if cfg.verbose > 0 {
        cfg.note(format!("classified D={} {} in {:.1}s", cfg.disc, rep.label, t.elapsed().as_secs_f64()));
    }
    if let (Some(dir), true) = (&cfg.cache, use_cache) {
        cache_store(dir, &key, &r)?;
    }
    Ok(r)
}

#[derive(Serialize)]
struct ClassJson {
    form: [i64; 3],
    min_norm: i64,
    order: u64,
}

#[derive(Serialize)]
struct SteinitzJson {
    label: String,
    class: [i64; 3],
    ideal: crate::ideals::IdealRepr,
}

#[derive(Serialize)]
struct ClassGroupJson {
    disc: i64,
    class_number: usize,
    exponent: u64,
    classes: Vec<ClassJson>,
    quotient_n: usize,
    steinitz: Vec<SteinitzJson>,
}

pub fn cmd_class_group(cfg: &RunConfig) -> Result<Output> {
    let k = QuadField::from_disc_or_d(cfg.disc)?;
    let cl = class_group(&k);
    let classes: Vec<ClassJson> = cl
        .classes()
        .iter()
        .enumerate()
        .map(|(i, c)| ClassJson { form: c.triple(), min_norm: c.min_norm(), order: cl.element_order(i) })
        .collect();
    let steinitz: Vec<SteinitzJson> = steinitz_representatives(&k, cfg.n as u64)
        .into_iter()
        .map(|r| SteinitzJson { label: r.label, class: r.class.triple(), ideal: r.ideal.to_repr() })
        .collect();
    let mut text = format!("D = {}\nh = {}\nexponent = {}\n", k.disc(), cl.order(), cl.exponent());
    for c in &classes {
        text += &format!("  ({}, {}, {})  min norm {}  order {}\n", c.form[0], c.form[1], c.form[2], c.min_norm, c.order);
    }
    text += &format!("Cl/Cl^{}: {} classes\n", cfg.n, steinitz.len());
    for s in &steinitz {
        text += &format!("  {}  ({}, {}, {})\n", s.label, s.class[0], s.class[1], s.class[2]);
    }
    let json = serde_json::to_value(ClassGroupJson {
        disc: k.disc(),
        class_number: cl.order(),
        exponent: cl.exponent(),
        classes,
        quotient_n: cfg.n,
        steinitz,
    })?;
    Ok(Output { json, text })
}

pub fn cmd_perfect(cfg: &RunConfig, dot: Option<&Path>) -> Result<Output> {
    let (l, rep) = lattice_for(cfg.disc, cfg.n, &cfg.steinitz)?;
    let w = enumerate_perfect_forms(&l, cfg.weight, &cfg.opts())?;
    if let Some(p) = dot {
        fs::write(p, w.to_dot())?;
    }
    let mut text = format!("D = {} steinitz {} weight {}\nperfect forms: {}\n", cfg.disc, rep.label, cfg.weight.name(), w.nodes.len());
    for (i, p) in w.nodes.iter().enumerate() {
        let forms: Vec<String> = crate::voronoi::form_summary(&p.form);
        text += &format!(
            "  P{}  |S| = {:>3}  Aut = {:<6}  facets = {}  form [{}]\n",
            i + 1,
            p.min.size(),
            p.aut.label(),
            p.facets.len(),
            forms.join(", ")
        );
    }
    text += &format!("dead ends: {}\n", w.dead_ends());
    let mut json = w.to_json();
    json["steinitz"] = Value::String(rep.label);
    json["disc"] = Value::from(cfg.disc);
    Ok(Output { json, text })
}

#[derive(Serialize)]
struct MinimalClassJson {
    corank: usize,
    size: usize,
    stabilizer: String,
    stabilizer_order: usize,
    coefficient_classes: Vec<[i64; 3]>,
}

pub fn cmd_classes(cfg: &RunConfig) -> Result<Output> {
    let (l, rep) = lattice_for(cfg.disc, cfg.n, &cfg.steinitz)?;
    let w = enumerate_perfect_forms(&l, cfg.weight, &cfg.opts())?;
    let mut rows: Vec<MinimalClassJson> = well_rounded_classes(&w, &l)?
        .iter()
        .map(|c| {
            let mut cc: Vec<[i64; 3]> = c.vectors.iter().map(|v| v.class.triple()).collect();
            cc.sort();
            MinimalClassJson {
                corank: c.corank,
                size: c.size(),
                stabilizer: c.stabilizer.label(),
                stabilizer_order: c.stabilizer.order(),
                coefficient_classes: cc,
            }
        })
        .collect();
    rows.sort_by(|a, b| {
        (a.corank, std::cmp::Reverse(a.stabilizer_order), &a.stabilizer, a.size, &a.coefficient_classes).cmp(&(
            b.corank,
            std::cmp::Reverse(b.stabilizer_order),
            &b.stabilizer,
            b.size,
            &b.coefficient_classes,
        ))
    });
    let mut text = format!("D = {} steinitz {}\nwell-rounded minimal classes: {}\n", cfg.disc, rep.label, rows.len());
    for r in &rows {
        text += &format!("  corank {}  |S| = {:>3}  Aut = {}\n", r.corank, r.size, r.stabilizer);
    }
    let json = serde_json::json!({ "disc": cfg.disc, "steinitz": rep.label, "weight": cfg.weight.name(), "classes": rows });
    Ok(Output { json, text })
}

pub fn cmd_maxfinite(cfg: &RunConfig) -> Result<Output> {
    let r = lattice_report(cfg, &cfg.steinitz)?;
    Ok(Output { json: serde_json::to_value(&r)?, text: r.to_text() })
}

pub fn cmd_compare(cfg: &RunConfig) -> Result<Output> {
    let k = QuadField::from_disc_or_d(cfg.disc)?;
    let reps = steinitz_representatives(&k, cfg.n as u64);
    let reports = reps.iter().map(|r| lattice_report(cfg, &r.label)).collect::<Result<Vec<_>>>()?;
    let c = compare_reports(cfg.disc, cfg.weight, &reports);
    Ok(Output { json: serde_json::to_value(&c)?, text: c.to_text() })
}

fn dispatch(cfg: &RunConfig, cmd: &Command) -> Result<Output> {
    match cmd {
        Command::ClassGroup => cmd_class_group(cfg),
        Command::Perfect { dot } => cmd_perfect(cfg, dot.as_deref()),
        Command::Classes => cmd_classes(cfg),
        Command::MaxFinite => cmd_maxfinite(cfg),
        Command::Compare => cmd_compare(cfg),
    }
}

fn exit_code_for(e: &Error) -> i32 {
    match e {
        Error::InvalidField(_) | Error::Parse(_) => EXIT_USAGE,
        _ => EXIT_INTERNAL,
    }
}

/// Runs the CLI writing to the given streams; returns the exit code.
pub fn run<W: std::io::Write, E: std::io::Write>(args: &[String], out: &mut W, err: &mut E) -> i32 {
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let _ = if e.use_stderr() { write!(err, "{e}") } else { write!(out, "{e}") };
            return code;
        }
    };
    let cfg = match RunConfig::from_cli(&cli) {
        Ok(c) => c,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            return EXIT_USAGE;
        }
    };
    let result = match cfg.jobs {
        Some(j) => match rayon::ThreadPoolBuilder::new().num_threads(j.max(1)).build() {
            Ok(pool) => pool.install(|| dispatch(&cfg, &cli.command)),
            Err(e) => Err(Error::Internal(format!("thread pool: {e}"))),
        },
        None => dispatch(&cfg, &cli.command),
    };
    for n in cfg.notes.lock().unwrap_or_else(|e| e.into_inner()).drain(..) {
        let _ = writeln!(err, "{n}");
    }
    let output = match result {
        Ok(o) => o,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            return exit_code_for(&e);
        }
    };
    let rendered = match cfg.out {
        OutFormat::Json => match to_canonical_json(&output.json) {
            Ok(s) => s,
            Err(e) => {
                let _ = writeln!(err, "error: {e}");
                return EXIT_INTERNAL;
            }
        },
        OutFormat::Text => output.text.clone(),
    };
    let _ = out.write_all(rendered.as_bytes());
    if let Some(path) = &cfg.expect {
        let expected: Value = match fs::read_to_string(path).map_err(Error::from).and_then(|s| Ok(serde_json::from_str(&s)?)) {
            Ok(v) => v,
            Err(e) => {
                let _ = writeln!(err, "error: cannot read {}: {e}", path.display());
                return EXIT_USAGE;
            }
        };
        if expected != output.json {
            let _ = writeln!(err, "mismatch against {}", path.display());
            for line in diff_paths(&expected, &output.json, "$").into_iter().take(20) {
                let _ = writeln!(err, "  {line}");
            }
            return EXIT_MISMATCH;
        }
        if cfg.verbose > 0 {
            let _ = writeln!(err, "matches {}", path.display());
        }
    }
    EXIT_OK
}

/// Paths at which two JSON values differ.
fn diff_paths(a: &Value, b: &Value, path: &str) -> Vec<String> {
    match (a, b) {
        (Value::Object(x), Value::Object(y)) => {
            let mut keys: Vec<&String> = x.keys().chain(y.keys()).collect();
            keys.sort();
            keys.dedup();
            keys.into_iter()
                .flat_map(|k| match (x.get(k), y.get(k)) {
                    (Some(u), Some(v)) => diff_paths(u, v, &format!("{path}.{k}")),
                    _ => vec![format!("{path}.{k}: present on one side only")],
                })
                .collect()
        }
        (Value::Array(x), Value::Array(y)) if x.len() == y.len() => {
            x.iter().zip(y).enumerate().flat_map(|(i, (u, v))| diff_paths(u, v, &format!("{path}[{i}]"))).collect()
        }
        _ if a == b => vec![],
        _ => vec![format!("{path}: expected {a}, got {b}")],
    }
}

pub fn main_from_env() -> i32 {
    let args: Vec<String> = std::env::args().collect();
    run(&args, &mut std::io::stdout().lock(), &mut std::io::stderr().lock())
}
