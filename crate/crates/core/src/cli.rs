//! Command-line front end.
//!
//! Exit codes: 0 ok, 1 verification failure (or convergence order outside the
//! bracket), 2 parameter or usage error, 3 blow-up detected, 4 step underflow.

use std::collections::BTreeMap;
use std::ffi::OsString;
use std::io::Write as _;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use serde_json::Value;
use sha2::{Digest, Sha256};

use crate::diagnostics::{fit_blowup_time, gronwall_monitor, BlowUpFit, Channel, NormSeries};
use crate::families::{
    boundary_checks, classify, pde_checks, BlowUpClass, FamilyDocument, FamilyError, FamilyKind, SolutionFamily,
};
use crate::polyalg::format_rational;
use crate::regions::{fate_csv, fate_map, region_map, RegionsError};
use crate::solver::{run, Grid, RunStatus, Scheme, SolverConfig, SolverError};

pub const EXIT_OK: i32 = 0;
pub const EXIT_VERIFICATION: i32 = 1;
pub const EXIT_PARAMETER: i32 = 2;
pub const EXIT_BLOWUP: i32 = 3;
pub const EXIT_UNDERFLOW: i32 = 4;

pub const VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Debug, Parser)]
#[command(
    name = "hessflow",
    version,
    about = "Exact verification, simulation and blow-up diagnostics for u_t = det(D^2 u) - bilaplacian(u)"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Check the PDE and boundary identities exactly
    Verify(Opts),
    /// Evaluate a family at one point
    Evaluate(Opts),
    /// Run the finite-difference solver
    Simulate(Opts),
    /// Grid refinement study against the exact solution
    Converge(Opts),
    /// Blow-up class, region map and fate map
    Classify(Opts),
    /// Fit a blow-up time to a norm series
    FitBlowup(Opts),
    /// Energy-estimate monitors and fits for a norm series
    Report(Opts),
}

impl Command {
    fn name(&self) -> &'static str {
        match self {
            Self::Verify(_) => "verify",
            Self::Evaluate(_) => "evaluate",
            Self::Simulate(_) => "simulate",
            Self::Converge(_) => "converge",
            Self::Classify(_) => "classify",
            Self::FitBlowup(_) => "fit-blowup",
            Self::Report(_) => "report",
        }
    }

    fn opts(&self) -> &Opts {
        match self {
            Self::Verify(o)
            | Self::Evaluate(o)
            | Self::Simulate(o)
            | Self::Converge(o)
            | Self::Classify(o)
            | Self::FitBlowup(o)
            | Self::Report(o) => o,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum SchemeArg {
    Imex,
    Rk4,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ChannelArg {
    H2semi,
    MaxAbsU,
}

/// Options shared by all commands; each command reads the ones it needs.
#[derive(Debug, Clone, Args, Serialize)]
pub struct Opts {
    /// Family document (JSON)
    #[arg(long)]
    pub family: Option<PathBuf>,
    /// Family by name with default parameters, used when no document is given
    #[arg(long)]
    pub kind: Option<String>,
    /// Number of random admissible parameter sets to verify
    #[arg(long)]
    pub sweep: Option<usize>,
    /// Interior node counts per side for a refinement study
    #[arg(long, value_delimiter = ',')]
    pub grids: Vec<usize>,
    /// Interior node count per side
    #[arg(long, default_value_t = 33)]
    pub grid: usize,
    /// Box as x0,y0,lx,ly
    #[arg(long, value_delimiter = ',', num_args = 4)]
    pub domain: Option<Vec<f64>>,
    #[arg(long)]
    pub t_end: Option<f64>,
    /// Output directory
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Step-doubling tolerance
    #[arg(long)]
    pub tol: Option<f64>,
    #[arg(long)]
    pub dt_init: Option<f64>,
    #[arg(long)]
    pub dt_min: Option<f64>,
    /// Take equal steps of size dt_init
    #[arg(long)]
    pub fixed_steps: bool,
    #[arg(long, value_enum, default_value_t = SchemeArg::Imex)]
    pub scheme: SchemeArg,
    #[arg(long, default_value_t = 1)]
    pub output_every: usize,
    #[arg(long)]
    pub snapshot_every: Option<usize>,
    #[arg(long)]
    pub blowup_threshold: Option<f64>,
    #[arg(long)]
    pub x: Option<f64>,
    #[arg(long)]
    pub y: Option<f64>,
    #[arg(long)]
    pub t: Option<f64>,
    /// Norm series CSV written by `simulate`
    #[arg(long)]
    pub series: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = ChannelArg::H2semi)]
    pub channel: ChannelArg,
    #[arg(long, default_value_t = 1.5)]
    pub order_min: f64,
    #[arg(long, default_value_t = 2.5)]
    pub order_max: f64,
    /// Negative control for `converge`: perturbs the biharmonic stencil
    #[arg(long, hide = true)]
    pub broken_stencil: bool,
}

#[derive(Debug)]
struct Failure {
    code: i32,
    message: String,
}

impl Failure {
    fn parameter(message: impl Into<String>) -> Self {
        Self {
            code: EXIT_PARAMETER,
            message: message.into(),
        }
    }
}

impl From<FamilyError> for Failure {
    fn from(e: FamilyError) -> Self {
        let code = match e {
            FamilyError::Verification(_) => EXIT_VERIFICATION,
            _ => EXIT_PARAMETER,
        };
        Self {
            code,
            message: e.to_string(),
        }
    }
}

impl From<SolverError> for Failure {
    fn from(e: SolverError) -> Self {
        Self::parameter(e.to_string())
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        Self::parameter(format!("i/o: {e}"))
    }
}

/// Everything that determines a run's outputs.
#[derive(Debug, Serialize)]
pub struct RunSpec<'a> {
    pub version: &'static str,
    pub command: &'static str,
    pub family_document: Option<FamilyDocument>,
    pub options: &'a Opts,
}

#[derive(Debug, Clone, Serialize)]
pub struct Generator {
    pub name: &'static str,
    pub version: &'static str,
    pub runspec_sha256: String,
}

#[derive(Serialize)]
struct Report<'a, T: Serialize> {
    generator: &'a Generator,
    command: &'static str,
    #[serde(flatten)]
    body: T,
}

struct Context<'a> {
    opts: &'a Opts,
    command: &'static str,
    generator: Generator,
    family_document: Option<FamilyDocument>,
}

impl Context<'_> {
    fn comment(&self) -> String {
        format!(
            "hessflow {} runspec-sha256={}",
            self.generator.version, self.generator.runspec_sha256
        )
    }

    fn report<T: Serialize>(&self, body: T) -> String {
        let r = Report {
            generator: &self.generator,
            command: self.command,
            body,
        };
        let mut s = serde_json::to_string_pretty(&r).expect("report serializes");
        s.push('\n');
        s
    }

    fn write(&self, name: &str, content: &str) -> Result<(), Failure> {
        if let Some(dir) = &self.opts.out {
            write_atomic(dir, name, content)?;
        }
        Ok(())
    }

    fn family(&self) -> Result<SolutionFamily, Failure> {
        let family = match (&self.family_document, &self.opts.kind) {
            (Some(doc), _) => doc.to_family()?,
            (None, Some(kind)) => kind.parse::<FamilyKind>()?.default_family(),
            (None, None) => {
                return Err(Failure::parameter(
                    "a family is required: pass --family <doc.json> or --kind <name>",
                ))
            }
        };
        family.validate()?;
        Ok(family)
    }

    fn domain(&self, default: (f64, f64, f64, f64)) -> (f64, f64, f64, f64) {
        match self.opts.domain.as_deref() {
            Some([a, b, c, d]) => (*a, *b, *c, *d),
            _ => default,
        }
    }

    fn grid(&self, n: usize, default: (f64, f64, f64, f64)) -> Result<Grid, Failure> {
        let (x0, y0, lx, ly) = self.domain(default);
        Ok(Grid::new(n, n, (x0, y0), (lx, ly))?)
    }
}

/// Writes `content` to `dir/name` through a temporary file and a rename.
pub fn write_atomic(dir: &Path, name: &str, content: &str) -> std::io::Result<()> {
    std::fs::create_dir_all(dir)?;
    let mut tmp = tempfile::NamedTempFile::new_in(dir)?;
    tmp.write_all(content.as_bytes())?;
    tmp.as_file().sync_all()?;
    tmp.persist(dir.join(name)).map_err(|e| e.error)?;
    Ok(())
}

/// Parses `args` (including the program name), runs the command and returns
/// the exit code. Reports go to stdout, errors to stderr.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_PARAMETER } else { EXIT_OK };
        }
    };
    match execute(&cli.command) {
        Ok((code, stdout)) => {
            print!("{stdout}");
            code
        }
        Err(f) => {
            eprintln!("error: {}", f.message);
            f.code
        }
    }
}

fn execute(command: &Command) -> Result<(i32, String), Failure> {
    let opts = command.opts();
    let family_document = match &opts.family {
        Some(path) => {
            let text = std::fs::read_to_string(path)
                .map_err(|e| Failure::parameter(format!("cannot read {}: {e}", path.display())))?;
            Some(FamilyDocument::from_json(&text)?)
        }
        None => None,
    };
    let spec = RunSpec {
        version: VERSION,
        command: command.name(),
        family_document: family_document.clone(),
        options: opts,
    };
    let digest = Sha256::digest(serde_json::to_vec(&spec).expect("run spec serializes"));
    let ctx = Context {
        opts,
        command: command.name(),
        generator: Generator {
            name: "hessflow",
            version: VERSION,
            runspec_sha256: hex::encode(digest),
        },
        family_document,
    };
    match command {
        Command::Verify(_) => cmd_verify(&ctx),
        Command::Evaluate(_) => cmd_evaluate(&ctx),
        Command::Simulate(_) => cmd_simulate(&ctx),
        Command::Converge(_) => cmd_converge(&ctx),
        Command::Classify(_) => cmd_classify(&ctx),
        Command::FitBlowup(_) => cmd_fit_blowup(&ctx),
        Command::Report(_) => cmd_report(&ctx),
    }
}

#[derive(Serialize)]
struct ClassJson {
    kind: Option<crate::families::BlowUpKind>,
    t_star: Option<String>,
    notes: String,
}

fn class_json(c: Result<BlowUpClass, FamilyError>) -> ClassJson {
    match c {
        Ok(c) => ClassJson {
            kind: Some(c.kind),
            t_star: c.t_star_text(),
            notes: c.notes,
        },
        Err(e) => ClassJson {
            kind: None,
            t_star: None,
            notes: e.to_string(),
        },
    }
}

#[derive(Serialize)]
struct VerifyEntry {
    family: &'static str,
    params: BTreeMap<String, String>,
    holds: bool,
    failed: Vec<String>,
    #[serde(skip_serializing_if = "BTreeMap::is_empty")]
    residuals: BTreeMap<String, String>,
    boundary_conditions: Option<usize>,
    alpha: Option<String>,
    beta: Option<String>,
    gamma: Option<String>,
    classification: ClassJson,
}

fn verify_one(family: &SolutionFamily, with_residuals: bool) -> Result<VerifyEntry, Failure> {
    family.validate()?;
    let cert = pde_checks(family)?;
    let boundary = match family {
        SolutionFamily::Square { .. } | SolutionFamily::Disc { .. } => Some(boundary_checks(family)?),
        _ => None,
    };
    let mut failed: Vec<_> = cert.failures();
    if let Some(b) = &boundary {
        failed.extend(b.iter().filter(|c| !c.holds()).cloned());
    }
    let s = cert.structure.as_ref();
    Ok(VerifyEntry {
        family: family.name(),
        params: FamilyDocument::from_family(family).params,
        holds: failed.is_empty(),
        residuals: if with_residuals {
            failed.iter().map(|c| (c.name.clone(), c.residual.to_text())).collect()
        } else {
            BTreeMap::new()
        },
        failed: failed.into_iter().map(|c| c.name).collect(),
        boundary_conditions: boundary.map(|b| b.len()),
        alpha: s.map(|s| format_rational(&s.alpha)),
        beta: s.map(|s| format_rational(&s.beta)),
        gamma: s.map(|s| format_rational(&s.gamma)),
        classification: class_json(classify(family)),
    })
}

#[derive(Serialize)]
struct SweepSummary {
    family: &'static str,
    runs: usize,
    failures: usize,
}

fn cmd_verify(ctx: &Context) -> Result<(i32, String), Failure> {
    let mut entries = Vec::new();
    let mut summary = Vec::new();
    match ctx.opts.sweep {
        None => entries.push(verify_one(&ctx.family()?, true)?),
        Some(n) => {
            let kinds = if ctx.family_document.is_some() || ctx.opts.kind.is_some() {
                vec![ctx.family()?.kind()]
            } else {
                FamilyKind::ALL.to_vec()
            };
            for kind in kinds {
                let mut rng = ChaCha8Rng::seed_from_u64(ctx.opts.seed);
                let mut failures = 0;
                for _ in 0..n {
                    let e = verify_one(&kind.random(&mut rng), failures == 0)?;
                    if !e.holds {
                        failures += 1;
                    }
                    entries.push(e);
                }
                summary.push(SweepSummary {
                    family: kind.name(),
                    runs: n,
                    failures,
                });
            }
        }
    }
    let all_hold = entries.iter().all(|e| e.holds);
    #[derive(Serialize)]
    struct Body {
        all_hold: bool,
        summary: Vec<SweepSummary>,
        results: Vec<VerifyEntry>,
    }
    let report = ctx.report(Body {
        all_hold,
        summary,
        results: entries,
    });
    ctx.write("verify.json", &report)?;
    Ok((if all_hold { EXIT_OK } else { EXIT_VERIFICATION }, report))
}

fn cmd_evaluate(ctx: &Context) -> Result<(i32, String), Failure> {
    let family = ctx.family()?;
    let (Some(x), Some(y), Some(t)) = (ctx.opts.x, ctx.opts.y, ctx.opts.t) else {
        return Err(Failure::parameter("evaluate needs --x, --y and --t"));
    };
    let u = family.evaluate(x, y, t)?;
    #[derive(Serialize)]
    struct Body {
        family: FamilyDocument,
        x: f64,
        y: f64,
        t: f64,
        u: f64,
    }
    let report = ctx.report(Body {
        family: FamilyDocument::from_family(&family),
        x,
        y,
        t,
        u,
    });
    ctx.write("evaluate.json", &report)?;
    Ok((EXIT_OK, report))
}

const UNIT_SQUARE: (f64, f64, f64, f64) = (0.0, 0.0, 1.0, 1.0);

fn solver_config(ctx: &Context, family: SolutionFamily, n: usize, t_end: f64) -> Result<SolverConfig, Failure> {
    let o = ctx.opts;
    let mut cfg = SolverConfig::new(family, ctx.grid(n, UNIT_SQUARE)?, t_end);
    if let Some(v) = o.dt_init {
        cfg.dt_init = v;
    }
    if let Some(v) = o.dt_min {
        cfg.dt_min = v;
        // a large dt_min must not fail validation: the run then underflows
        cfg.dt_init = cfg.dt_init.max(v);
    }
    if let Some(v) = o.tol {
        cfg.tol = v;
    }
    if let Some(v) = o.blowup_threshold {
        cfg.blowup_threshold = v;
    }
    cfg.adaptive = !o.fixed_steps;
    cfg.scheme = match o.scheme {
        SchemeArg::Imex => Scheme::Imex,
        SchemeArg::Rk4 => Scheme::Rk4,
    };
    cfg.output_every = o.output_every;
    cfg.snapshot_every = o.snapshot_every;
    cfg.broken_stencil = o.broken_stencil;
    cfg.validate()?;
    Ok(cfg)
}

fn status_code(s: RunStatus) -> i32 {
    match s {
        RunStatus::ReachedTEnd => EXIT_OK,
        RunStatus::BlowUpDetected => EXIT_BLOWUP,
        RunStatus::StepUnderflow => EXIT_UNDERFLOW,
    }
}

fn cmd_simulate(ctx: &Context) -> Result<(i32, String), Failure> {
    let family = ctx.family()?;
    let cfg = solver_config(ctx, family.clone(), ctx.opts.grid, ctx.opts.t_end.unwrap_or(1.0))?;
    let result = run(&cfg)?;
    let comment = ctx.comment();
    ctx.write("series.csv", &result.series.to_csv(Some(&comment)))?;
    let mut snapshot_files = Vec::new();
    for (k, snap) in result.snapshots.iter().enumerate() {
        let name = format!("snapshot_{k:04}.csv");
        ctx.write(&name, &snap.to_csv(Some(&format!("{comment} t={:.17e}", snap.time))))?;
        snapshot_files.push(name);
    }
    #[derive(Serialize)]
    struct Body {
        family: FamilyDocument,
        status: RunStatus,
        t_final: f64,
        t_star: Option<String>,
        accepted_steps: usize,
        rejected_steps: usize,
        samples: usize,
        final_max_abs_u: f64,
        snapshots: Vec<String>,
    }
    let report = ctx.report(Body {
        family: FamilyDocument::from_family(&family),
        status: result.status,
        t_final: result.t_final,
        t_star: classify(&family).ok().and_then(|c| c.t_star_text()),
        accepted_steps: result.accepted_steps,
        rejected_steps: result.rejected_steps,
        samples: result.series.len(),
        final_max_abs_u: result.series.samples.last().map_or(0.0, |s| s.max_abs_u()),
        snapshots: snapshot_files,
    });
    ctx.write("simulate.json", &report)?;
    Ok((status_code(result.status), report))
}

#[derive(Serialize)]
struct ConvergeRow {
    n: usize,
    h: f64,
    max_error: f64,
    order: Option<f64>,
}

fn cmd_converge(ctx: &Context) -> Result<(i32, String), Failure> {
    let grids = &ctx.opts.grids;
    if grids.len() < 3 {
        return Err(Failure::parameter(format!(
            "converge needs at least 3 grid sizes via --grids a,b,c (got {})",
            grids.len()
        )));
    }
    let family = ctx.family()?;
    let t_end = ctx.opts.t_end.unwrap_or(0.04);
    let numeric = family.numeric();
    let mut rows: Vec<ConvergeRow> = Vec::new();
    for &n in grids {
        let cfg = solver_config(ctx, family.clone(), n, t_end)?;
        let result = run(&cfg)?;
        if result.status != RunStatus::ReachedTEnd {
            return Err(Failure {
                code: status_code(result.status),
                message: format!(
                    "grid {n}: run stopped with {:?} at t = {}",
                    result.status, result.t_final
                ),
            });
        }
        let f = result.final_field();
        let g = f.grid;
        let mut err = 0.0f64;
        for ((i, j), v) in f.interior().indexed_iter() {
            err = err.max((v - numeric.evaluate(g.x(i + 2), g.y(j + 2), result.t_final)?).abs());
        }
        let order = rows.last().map(|p| (p.max_error / err).ln() / (p.h / g.hx).ln());
        rows.push(ConvergeRow {
            n,
            h: g.hx,
            max_error: err,
            order,
        });
    }
    let in_bracket = rows
        .iter()
        .filter_map(|r| r.order)
        .all(|p| p >= ctx.opts.order_min && p <= ctx.opts.order_max);
    let mut table = format!("# {}\nn,h,max_error,order\n", ctx.comment());
    for r in &rows {
        let order = r.order.map_or(String::new(), |p| format!("{p:.17e}"));
        table.push_str(&format!("{},{:.17e},{:.17e},{}\n", r.n, r.h, r.max_error, order));
    }
    ctx.write("converge.csv", &table)?;
    #[derive(Serialize)]
    struct Body {
        family: FamilyDocument,
        t_end: f64,
        order_bracket: [f64; 2],
        in_bracket: bool,
        rows: Vec<ConvergeRow>,
    }
    let report = ctx.report(Body {
        family: FamilyDocument::from_family(&family),
        t_end,
        order_bracket: [ctx.opts.order_min, ctx.opts.order_max],
        in_bracket,
        rows,
    });
    ctx.write("converge.json", &report)?;
    Ok((if in_bracket { EXIT_OK } else { EXIT_VERIFICATION }, report))
}

fn cmd_classify(ctx: &Context) -> Result<(i32, String), Failure> {
    let family = ctx.family()?;
    let class = class_json(classify(&family));
    let mut regions = Value::Null;
    let mut fates = Value::Null;
    if let SolutionFamily::QuarticPlane(q) = &family {
        let grid = ctx.grid(ctx.opts.grid, (-1.0, -1.0, 2.0, 2.0))?;
        let comment = ctx.comment();
        let map = region_map(q, &grid);
        ctx.write("regions.csv", &map.to_csv(Some(&comment)))?;
        regions = serde_json::json!({
            "negative": map.counts.0,
            "zero": map.counts.1,
            "positive": map.counts.2,
        });
        fates = match fate_map(q, &grid) {
            Ok(f) => {
                ctx.write("fates.csv", &fate_csv(&f, &grid, Some(&comment)))?;
                let mut counts = BTreeMap::new();
                for v in &f {
                    *counts.entry(v.as_str()).or_insert(0usize) += 1;
                }
                serde_json::to_value(counts).expect("counts serialize")
            }
            Err(e @ (RegionsError::UnsupportedCase(_) | RegionsError::Family(FamilyError::NoBlowUp(_)))) => {
                Value::String(e.to_string())
            }
            Err(RegionsError::Family(e)) => return Err(e.into()),
        };
    }
    #[derive(Serialize)]
    struct Body {
        family: FamilyDocument,
        classification: ClassJson,
        region_counts: Value,
        fates: Value,
    }
    let report = ctx.report(Body {
        family: FamilyDocument::from_family(&family),
        classification: class,
        region_counts: regions,
        fates,
    });
    ctx.write("classification.json", &report)?;
    Ok((EXIT_OK, report))
}

fn load_series(ctx: &Context) -> Result<NormSeries, Failure> {
    let Some(path) = &ctx.opts.series else {
        return Err(Failure::parameter("--series <norms.csv> is required"));
    };
    let text = std::fs::read_to_string(path)
        .map_err(|e| Failure::parameter(format!("cannot read {}: {e}", path.display())))?;
    NormSeries::from_csv(&text).map_err(|e| Failure::parameter(e.to_string()))
}

fn channel(c: ChannelArg) -> Channel {
    match c {
        ChannelArg::H2semi => Channel::H2Semi,
        ChannelArg::MaxAbsU => Channel::MaxAbsU,
    }
}

fn cmd_fit_blowup(ctx: &Context) -> Result<(i32, String), Failure> {
    let series = load_series(ctx)?;
    let ch = channel(ctx.opts.channel);
    let fit = fit_blowup_time(&series, ch).map_err(|e| Failure::parameter(e.to_string()))?;
    #[derive(Serialize)]
    struct Body {
        channel: Channel,
        samples: usize,
        fit: BlowUpFit,
    }
    let report = ctx.report(Body {
        channel: ch,
        samples: series.len(),
        fit,
    });
    ctx.write("fit.json", &report)?;
    Ok((EXIT_OK, report))
}

fn cmd_report(ctx: &Context) -> Result<(i32, String), Failure> {
    let series = load_series(ctx)?;
    let result_value = |r: Result<Value, crate::diagnostics::DiagnosticsError>| {
        r.unwrap_or_else(|e| serde_json::json!({ "error": e.to_string() }))
    };
    let gronwall = result_value(gronwall_monitor(&series).map(|g| serde_json::to_value(g).expect("serializes")));
    let mut fits = BTreeMap::new();
    for ch in [Channel::H2Semi, Channel::MaxAbsU] {
        fits.insert(
            ch.name(),
            result_value(fit_blowup_time(&series, ch).map(|f| serde_json::to_value(f).expect("serializes"))),
        );
    }
    #[derive(Serialize)]
    struct Body {
        samples: usize,
        last: Option<crate::diagnostics::NormSample>,
        gronwall: Value,
        blowup_fits: BTreeMap<&'static str, Value>,
    }
    let report = ctx.report(Body {
        samples: series.len(),
        last: series.samples.last().copied(),
        gronwall,
        blowup_fits: fits,
    });
    ctx.write("report.json", &report)?;
    Ok((EXIT_OK, report))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_shared_flags() {
        let cli = Cli::try_parse_from([
            "hessflow", "converge", "--kind", "square", "--grids", "17,33,65", "--t-end", "0.04", "--tol", "1e-8",
        ])
        .unwrap();
        let o = cli.command.opts();
        assert_eq!(o.grids, vec![17, 33, 65]);
        assert_eq!(o.t_end, Some(0.04));
        assert_eq!(cli.command.name(), "converge");
    }

    #[test]
    fn unknown_flags_are_usage_errors() {
        assert_eq!(main_with_args(["hessflow", "verify", "--bogus"]), EXIT_PARAMETER);
    }

    #[test]
    fn atomic_write_replaces_content() {
        let dir = tempfile::tempdir().unwrap();
        write_atomic(dir.path(), "a.txt", "one").unwrap();
        write_atomic(dir.path(), "a.txt", "two").unwrap();
        assert_eq!(std::fs::read_to_string(dir.path().join("a.txt")).unwrap(), "two");
        assert_eq!(std::fs::read_dir(dir.path()).unwrap().count(), 1);
    }
}
