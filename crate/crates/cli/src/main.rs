use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{anyhow, bail, Context};
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::Value;

use wachred::cache::{seed_module, SeedCache, SeedDoc};
use wachred::literal::{format_padic, parse_padic};
use wachred::modp::{build_catalog, dual_note, AnnotatedLabel, Identification};
use wachred::phigamma::{check_membership, reduce_pair, MembershipReport, PairDoc};
use wachred::reduce::{
    default_x_precision, identify_seed, reduce, verify_result, ReduceOptions, ReductionResult,
};
use wachred::wach::{deform_ap, radius_a, thm_b_applicable, PrecisionPlan};
use wachred::{Error, Exec, Field, FieldParams, PadicElem};

const CONVENTION: &str = "\
Labels describe the semisimplified mod-p reduction of the DUAL representation
V*_{k,a_p}, not of V_{k,a_p}. JSON output marks this with \"object\": \"Vbar_star\"
and \"dual\": true; the label of V itself is not computed.

Exit codes: 0 success, 1 usage or other error, 2 precision exhausted (no stable
label for n <= n-max), 3 no seed found, 4 verification failure.";

#[derive(Parser)]
#[command(name = "wachred", version, about = "Mod-p reductions of 2-dimensional crystalline representations via Wach modules", after_help = CONVENTION)]
struct Cli {
    /// Output format.
    #[arg(long, value_enum, default_value_t = Format::Json, global = true)]
    format: Format,
    /// Seed cache directory.
    #[arg(long, global = true, default_value = "cache")]
    cache_dir: PathBuf,
    /// Do not read or write the seed cache.
    #[arg(long, global = true)]
    no_cache: bool,
    /// Run all loops on the calling thread.
    #[arg(long, global = true)]
    sequential: bool,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Json,
    Table,
}

#[derive(Args, Clone)]
struct FieldArgs {
    #[arg(long)]
    p: u64,
    /// Ramification index of E (1 or 2).
    #[arg(long, default_value_t = 1)]
    e: usize,
    /// Residue degree of E (1 or 2).
    #[arg(long, default_value_t = 1)]
    f: usize,
    /// u in pi^2 = p u when e = 2.
    #[arg(long, default_value_t = 1)]
    eisenstein_unit: i64,
    /// Precision given to literals without an O(...) term.
    #[arg(long, default_value_t = 20)]
    pi_prec: u32,
}

impl FieldArgs {
    fn field(&self) -> anyhow::Result<Field> {
        let params = match (self.e, self.f) {
            (1, 1) => FieldParams::qp(self.p, self.pi_prec)?,
            (2, 1) => FieldParams::ramified_quadratic(self.p, self.eisenstein_unit, self.pi_prec)?,
            (1, 2) => FieldParams::unramified_quadratic(self.p, self.pi_prec)?,
            (e, f) => bail!("unsupported field: e = {e}, f = {f} (quadratic extensions only)"),
        };
        Ok(Field::new(params)?)
    }
}

#[derive(Args, Clone)]
struct JobArgs {
    #[command(flatten)]
    field: FieldArgs,
    #[arg(long)]
    k: u32,
    /// a_p as an exact literal, e.g. "5 + O(5^6)".
    #[arg(long)]
    ap: String,
}

impl JobArgs {
    fn parse(&self) -> anyhow::Result<(Field, PadicElem)> {
        let f = self.field.field()?;
        let a = parse_padic(&f, &self.ap).with_context(|| format!("a_p literal '{}'", self.ap))?;
        if self.k < 2 {
            bail!("k must be at least 2");
        }
        if a.is_zero() || a.is_unit() {
            bail!("a_p must be a nonzero element of the maximal ideal");
        }
        Ok((f, a))
    }
}

#[derive(Args, Clone)]
struct LoopArgs {
    #[arg(long, default_value_t = 3)]
    n_start: u32,
    #[arg(long, default_value_t = 8)]
    n_max: u32,
    /// X-precision for identification (derived from p and k by default).
    #[arg(long)]
    x_prec: Option<usize>,
    /// Consecutive n that must give the same label.
    #[arg(long, default_value_t = 2)]
    window: usize,
}

#[derive(Subcommand)]
enum Cmd {
    /// Compute the semisimplified reduction, raising n until the label is stable.
    Reduce {
        #[command(flatten)]
        job: JobArgs,
        #[command(flatten)]
        lp: LoopArgs,
    },
    /// Local constancy radius around a_p and the applicability of the large-weight bound.
    Radius {
        #[command(flatten)]
        job: JobArgs,
    },
    /// Deform a seed for a_p to a'_p and identify both.
    Deform {
        #[command(flatten)]
        job: JobArgs,
        /// The target a'_p.
        #[arg(long)]
        ap2: String,
        /// Precision target for the deformed seed.
        #[arg(long, default_value_t = 4)]
        n: u32,
    },
    /// Re-check a pair file, a cache document or a reduce result.
    Verify {
        file: PathBuf,
        /// Weight (pair files only; read from the document otherwise).
        #[arg(long)]
        k: Option<u32>,
        /// a_p literal (pair files only).
        #[arg(long)]
        ap: Option<String>,
        /// Membership level n (pair files only; defaults to the pair precision).
        #[arg(long)]
        n: Option<u32>,
    },
    /// Dump the catalog of semisimple residual representations.
    Catalog {
        #[command(flatten)]
        field: FieldArgs,
        #[arg(long)]
        k: u32,
        #[arg(long)]
        x_prec: Option<usize>,
        /// Include the residue pairs of every entry.
        #[arg(long)]
        pairs: bool,
    },
    /// Inspect or clean the seed cache.
    Cache {
        #[command(subcommand)]
        action: CacheCmd,
    },
}

#[derive(Subcommand)]
enum CacheCmd {
    /// List cached seeds and whether they still verify.
    List,
    /// Remove temporary files and documents that fail verification.
    Gc,
}

/// Error carrying a process exit code.
struct Failure {
    code: u8,
    err: anyhow::Error,
}

impl<E: Into<anyhow::Error>> From<E> for Failure {
    fn from(e: E) -> Self {
        let err: anyhow::Error = e.into();
        let code = match err.downcast_ref::<Error>() {
            Some(Error::PrecisionExhausted(_)) => 2,
            Some(Error::SeedNotFound(_)) => 3,
            _ => 1,
        };
        Failure { code, err }
    }
}

fn verification_failed(msg: String) -> Failure {
    Failure {
        code: 4,
        err: anyhow!(msg),
    }
}

struct Ctx {
    format: Format,
    cache: Option<SeedCache>,
    exec: Exec,
}

impl Ctx {
    fn emit<T: Serialize>(&self, value: &T, table: impl FnOnce() -> String) -> anyhow::Result<()> {
        let text = match self.format {
            Format::Json => serde_json::to_string_pretty(value)? + "\n",
            Format::Table => table(),
        };
        let mut out = std::io::stdout().lock();
        match out.write_all(text.as_bytes()).and_then(|_| out.flush()) {
            Err(e) if e.kind() != std::io::ErrorKind::BrokenPipe => Err(e.into()),
            _ => Ok(()),
        }
    }
}

fn result_table(r: &ReductionResult) -> String {
    let mut s = String::new();
    s += &format!("label        {}\n", r.result.text);
    s += "object       Vbar_star (reduction of the dual)\n";
    s += &format!("k, a_p       {}, {}\n", r.k, r.a_p);
    s += &format!("n used       {}\n", r.n_used);
    s += &format!(
        "method       {} (shift {}, X-precision {})\n",
        r.identification.method, r.identification.shift, r.identification.x_precision
    );
    s += &format!(
        "seed         {} ({})\n",
        r.seed.log.strategy,
        if r.seed.report.verdict {
            "certified"
        } else {
            "NOT certified"
        }
    );
    for a in &r.attempts {
        match (&a.label, &a.error) {
            (Some(l), _) => s += &format!("  n={:<3} {l}\n", a.n),
            (_, Some(e)) => s += &format!("  n={:<3} {e}\n", a.n),
            _ => {}
        }
    }
    if let Some(t) = r.timing_ms {
        s += &format!("time         {t} ms\n");
    }
    s
}

fn report_table(r: &MembershipReport) -> String {
    let line = |name: &str, c: &wachred::phigamma::Condition| {
        format!("{name:<24} {:<5} {}\n", c.holds, c.defect)
    };
    let mut s = format!("membership in W(k={}, n={}): {}\n", r.k, r.n, r.verdict);
    s += &line("(1) commutation", &r.commutation);
    s += &line("(2) G = Id mod X", &r.gamma_trivial_mod_x);
    s += &line("(3) det and trace", &r.det_trace);
    s += &line("(4) weight relation", &r.weight_relation);
    s
}

fn cmd_reduce(ctx: &Ctx, job: &JobArgs, lp: &LoopArgs) -> Result<(), Failure> {
    let (f, a) = job.parse()?;
    let opts = ReduceOptions {
        n_start: lp.n_start,
        n_max: lp.n_max,
        x_precision: lp.x_prec,
        window: lp.window,
        exec: ctx.exec,
    };
    let r = reduce(&f, job.k, &a, &opts, ctx.cache.as_ref())?;
    ctx.emit(&r, || result_table(&r))?;
    Ok(())
}

#[derive(Serialize)]
struct RadiusReport {
    schema: u32,
    field: FieldParams,
    k: u32,
    a_p: String,
    /// Strict radius exponent: a'_p with v(a'_p - a_p) above it give the same reduction.
    radius: String,
    radius_pi_units: u32,
    equality_branch: bool,
    text: String,
    large_weight_bound_applies: bool,
}

fn cmd_radius(ctx: &Ctx, job: &JobArgs) -> Result<(), Failure> {
    let (f, a) = job.parse()?;
    let r = radius_a(&f, job.k, &a)?;
    let branch = if r.equality_branch {
        "equality branch v(a_p)<(k-1)/2 taken"
    } else {
        "v(a_p^2 - 4p^(k-1)) computed directly"
    };
    let rep = RadiusReport {
        schema: 1,
        field: f.params().clone(),
        k: job.k,
        a_p: format_padic(&a),
        radius: r.text(),
        radius_pi_units: r.pi_units,
        equality_branch: r.equality_branch,
        text: format!("strict radius exponent {}; {branch}", r.text()),
        large_weight_bound_applies: thm_b_applicable(&f, job.k, &a)?,
    };
    ctx.emit(&rep, || {
        format!(
            "{}\nlarge-weight bound applies: {}\n",
            rep.text, rep.large_weight_bound_applies
        )
    })?;
    Ok(())
}

#[derive(Serialize)]
struct DeformSide {
    a_p: String,
    n: u32,
    result: AnnotatedLabel,
    identification: Identification,
    pair: PairDoc,
    report: MembershipReport,
}

#[derive(Serialize)]
struct DeformReport {
    schema: u32,
    object: String,
    k: u32,
    radius: String,
    residues_equal: bool,
    labels_equal: bool,
    source: DeformSide,
    target: DeformSide,
}

fn cmd_deform(ctx: &Ctx, job: &JobArgs, ap2: &str, n: u32) -> Result<(), Failure> {
    let (f, a) = job.parse()?;
    let a2 = parse_padic(&f, ap2).with_context(|| format!("a'_p literal '{ap2}'"))?;
    let k = job.k;
    let r = radius_a(&f, k, &a)?;
    if !r.strictly_inside(&a, &a2) {
        return Err(
            Error::RadiusViolation(format!("v(a'_p - a_p) must exceed {}", r.text())).into(),
        );
    }
    let plan = PrecisionPlan::for_deformation(&f, k, &a, n)?;
    let seed = seed_module(
        &f,
        k,
        &a,
        plan.seed_precision.max(n),
        ctx.cache.as_ref(),
        ctx.exec,
    )?;
    let moved = deform_ap(&seed, &a2)?;
    if let Some(c) = &ctx.cache {
        c.store(&moved)?;
    }
    let catalog = build_catalog(&f, k, default_x_precision(&f, k), ctx.exec)?;
    let side = |s: &wachred::wach::WachSeed| -> Result<DeformSide, Failure> {
        let id = identify_seed(s, &catalog, ctx.exec)?;
        Ok(DeformSide {
            a_p: format_padic(&s.a_p),
            n: s.n,
            result: dual_note(&f, &id.label),
            identification: id,
            pair: PairDoc::from_pair(&s.pair),
            report: s.report.clone(),
        })
    };
    let (r1, r2) = (reduce_pair(&seed.pair), reduce_pair(&moved.pair));
    let source = side(&seed)?;
    let target = side(&moved)?;
    let rep = DeformReport {
        schema: 1,
        object: "Vbar_star".into(),
        k,
        radius: r.text(),
        residues_equal: r1.p == r2.p && r1.g == r2.g,
        labels_equal: source.result.label == target.result.label,
        source,
        target,
    };
    ctx.emit(&rep, || {
        format!(
            "radius       {}\nsource       a_p = {}: {} (n = {})\ntarget       a_p = {}: {} (n = {})\nresidues equal: {}, labels equal: {}\n",
            rep.radius,
            rep.source.a_p,
            rep.source.result.text,
            rep.source.n,
            rep.target.a_p,
            rep.target.result.text,
            rep.target.n,
            rep.residues_equal,
            rep.labels_equal
        )
    })?;
    if !(rep.residues_equal && rep.labels_equal) {
        return Err(verification_failed(
            "deformation changed the residue".into(),
        ));
    }
    Ok(())
}

fn cmd_verify(
    ctx: &Ctx,
    file: &PathBuf,
    k: Option<u32>,
    ap: Option<&str>,
    n: Option<u32>,
) -> Result<(), Failure> {
    let text =
        std::fs::read_to_string(file).with_context(|| format!("reading {}", file.display()))?;
    let v: Value = serde_json::from_str(&text).context("parsing JSON")?;
    if v.get("seed").is_some() && v.get("identification").is_some() {
        let r: ReductionResult = serde_json::from_value(v).context("reduce result")?;
        let rep = verify_result(&r, ctx.exec)?;
        ctx.emit(&rep, || {
            format!(
                "{}label recomputed: {} (matches: {})\n",
                report_table(&rep.membership),
                rep.recomputed
                    .as_ref()
                    .map(|l| l.to_string())
                    .unwrap_or_default(),
                rep.label_matches.unwrap_or(false)
            )
        })?;
        if !rep.verdict {
            return Err(verification_failed("result does not re-verify".into()));
        }
        return Ok(());
    }
    let report = if v.get("key").is_some() {
        let doc: SeedDoc = serde_json::from_value(v).context("cache document")?;
        let pair = doc.pair.to_pair()?;
        let a = parse_padic(pair.field(), &doc.key.a_p)?;
        check_membership(&pair, doc.key.k, &a, doc.key.n)
    } else {
        let doc: PairDoc = serde_json::from_value(v).context("pair document")?;
        let pair = doc.to_pair()?;
        let ap = ap.ok_or_else(|| anyhow!("--ap is required for a bare pair file"))?;
        let a = parse_padic(pair.field(), ap)?;
        check_membership(&pair, k.unwrap_or(doc.k), &a, n.unwrap_or(doc.precision))
    };
    ctx.emit(&report, || report_table(&report))?;
    if !report.verdict {
        return Err(verification_failed(
            "pair fails the membership check".into(),
        ));
    }
    Ok(())
}

#[derive(Serialize)]
struct CatalogDump {
    schema: u32,
    field: FieldParams,
    k: u32,
    x_precision: usize,
    entries: Vec<CatalogRow>,
}

#[derive(Serialize)]
struct CatalogRow {
    label: wachred::modp::SemisimpleLabel,
    text: String,
    det: (u32, u32),
    #[serde(skip_serializing_if = "Option::is_none")]
    p: Option<Vec<Vec<String>>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    g: Option<Vec<Vec<String>>>,
}

fn cmd_catalog(
    ctx: &Ctx,
    fa: &FieldArgs,
    k: u32,
    x_prec: Option<usize>,
    pairs: bool,
) -> Result<(), Failure> {
    let f = fa.field()?;
    if k < 2 {
        return Err(anyhow!("k must be at least 2").into());
    }
    let n = x_prec.unwrap_or_else(|| default_x_precision(&f, k));
    let cat = build_catalog(&f, k, n, ctx.exec)?;
    let coeffs = |m: &wachred::Mat<wachred::ResidueSeries>| {
        m.entries()
            .iter()
            .map(|x| x.coeffs().iter().map(|c| c.to_string()).collect())
            .collect()
    };
    let dump = CatalogDump {
        schema: 1,
        field: f.params().clone(),
        k,
        x_precision: n,
        entries: cat
            .entries
            .iter()
            .map(|e| CatalogRow {
                label: e.label.clone(),
                text: e.label.describe(&f),
                det: e.det,
                p: pairs.then(|| coeffs(&e.pair.p)),
                g: pairs.then(|| coeffs(&e.pair.g)),
            })
            .collect(),
    };
    ctx.emit(&dump, || {
        let mut s = format!("{} entries (X-precision {n})\n", dump.entries.len());
        for e in &dump.entries {
            s += &format!("  {:<28} det ({}, {})\n", e.text, e.det.0, e.det.1);
        }
        s
    })?;
    Ok(())
}

fn cmd_cache(ctx: &Ctx, dir: &PathBuf, action: &CacheCmd) -> Result<(), Failure> {
    let cache = SeedCache::new(dir);
    match action {
        CacheCmd::List => {
            let entries = cache.list()?;
            ctx.emit(&entries, || {
                let mut s = format!("{} documents in {}\n", entries.len(), dir.display());
                for e in &entries {
                    let what = e
                        .key
                        .as_ref()
                        .map(|k| format!("p={} k={} a_p={} n={}", k.field.p, k.k, k.a_p, k.n))
                        .unwrap_or_else(|| "unreadable".into());
                    s += &format!("  {} {what}\n", if e.valid { "ok " } else { "BAD" });
                }
                s
            })?;
        }
        CacheCmd::Gc => {
            let rep = cache.gc()?;
            ctx.emit(&rep, || {
                format!("kept {}, removed {}\n", rep.kept, rep.removed.len())
            })?;
        }
    }
    Ok(())
}

fn run(cli: &Cli) -> Result<(), Failure> {
    let ctx = Ctx {
        format: cli.format,
        cache: (!cli.no_cache).then(|| SeedCache::new(&cli.cache_dir)),
        exec: if cli.sequential {
            Exec::Sequential
        } else {
            Exec::default()
        },
    };
    match &cli.cmd {
        Cmd::Reduce { job, lp } => cmd_reduce(&ctx, job, lp),
        Cmd::Radius { job } => cmd_radius(&ctx, job),
        Cmd::Deform { job, ap2, n } => cmd_deform(&ctx, job, ap2, *n),
        Cmd::Verify { file, k, ap, n } => cmd_verify(&ctx, file, *k, ap.as_deref(), *n),
        Cmd::Catalog {
            field,
            k,
            x_prec,
            pairs,
        } => cmd_catalog(&ctx, field, *k, *x_prec, *pairs),
        Cmd::Cache { action } => cmd_cache(&ctx, &cli.cache_dir, action),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("error: {:#}", f.err);
            ExitCode::from(f.code)
        }
    }
}
