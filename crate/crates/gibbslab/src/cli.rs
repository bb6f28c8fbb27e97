//! The `gibbslab` command line: model loading, command dispatch and report
//! emission. Exit codes: 0 ok, 1 usage, 2 parse, 3 condition, 4 numeric.

use std::fmt::Write as _;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};

use crate::asymptotics::{c2_limit_classify, expansion_orders, fmt_order, C2Limit, ExpansionInput, MAX_ORDER};
use crate::error::Error;
use crate::golden::{reproduce_5_2, reproduce_5_3_checks, Check};
use crate::matrep::{
    c1_c2_at, classify_components, delta2_at, delta3_at, delta4_at, geometric_grid, gibbs_limit_analysis,
    limit_from_c2, sin_sequence, ComponentClassification, Snapshot,
};
use crate::model::{bundled, parse_model_with, ModelFile, SeqKind};
use crate::perron::check_perturbed_matrix_family;
use crate::real::{sci, set_precision, Mp, Real};
use crate::sft::check_conditions;
use crate::thermo::{entropy, gibbs_constant_check, gibbs_measure};
use crate::weights::verify_potential_conditions;

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 1;
pub const EXIT_PARSE: i32 = 2;
pub const EXIT_CONDITION: i32 = 3;
pub const EXIT_NUMERIC: i32 = 4;

#[derive(Parser, Debug)]
#[command(name = "gibbslab", version, about = "Limits of Gibbs measures under ε-perturbed potentials")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand, Debug)]
enum Cmd {
    /// Check the transition-matrix and potential conditions.
    Validate(ModelArgs),
    /// List the transitive components of B and the T₀/T₁ split.
    Components(ModelArgs),
    /// Pressure P(σ_A, Φ(ε)) along ε and its limit.
    Pressure(ModelArgs),
    /// Stationary Gibbs measure, component marginals and entropy along ε.
    Gibbs(ModelArgs),
    /// Eigenvalues of sub-collections, δ weights, marginals and entropy along
    /// the grid and the special sequences.
    Sweep(ModelArgs),
    /// δ classifier values along ε.
    Delta(DeltaArgs),
    /// Limit of the Gibbs measures: weights, accumulation ranges, entropy.
    Limit(ModelArgs),
    /// Expansion orders and the predicted limit of c₂ for two components.
    Asymptotics(AsymArgs),
    /// Run the pinned scenarios for a bundled example (`5.2` or `5.3`).
    Reproduce(ReproduceArgs),
}

#[derive(Args, Debug)]
struct Opts {
    /// Override a model parameter, `name=value`.
    #[arg(long = "param", value_name = "NAME=VALUE")]
    params: Vec<String>,
    /// ε grid `lo,hi,per_decade`.
    #[arg(long)]
    grid: Option<String>,
    /// Special sequence (`sin+1` or `sin-1`); replaces the model's list.
    #[arg(long = "seq")]
    seqs: Vec<String>,
    /// Write reports and CSV files into this directory.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Evaluate at these ε values instead of the grid.
    #[arg(long = "eps")]
    eps: Vec<String>,
    /// Working precision in bits.
    #[arg(long, default_value_t = crate::real::DEFAULT_PRECISION)]
    prec: u32,
}

#[derive(Args, Debug)]
struct ModelArgs {
    /// Model file path or bundled name (`example_5_1`, `example_5_2`, `example_5_3`).
    model: String,
    #[command(flatten)]
    opts: Opts,
}

#[derive(Args, Debug)]
struct DeltaArgs {
    #[command(flatten)]
    inner: ModelArgs,
    /// Classifier size (2, 3 or 4); defaults to #T₀.
    #[arg(long)]
    order: Option<usize>,
}

#[derive(Args, Debug)]
struct AsymArgs {
    #[command(flatten)]
    inner: ModelArgs,
    /// Order of the φ expansion.
    #[arg(long, default_value_t = MAX_ORDER)]
    n1: usize,
    /// Order of the e^ψ expansion.
    #[arg(long, default_value_t = MAX_ORDER)]
    n2: usize,
}

#[derive(Args, Debug)]
struct ReproduceArgs {
    /// `5.2` or `5.3`.
    which: String,
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, default_value_t = crate::real::DEFAULT_PRECISION)]
    prec: u32,
}

/// A failure with its exit code.
#[derive(Debug)]
struct Fail {
    code: i32,
    msg: String,
}

impl From<Error> for Fail {
    fn from(e: Error) -> Self {
        Fail { code: exit_code(&e), msg: e.to_string() }
    }
}

fn usage(msg: impl Into<String>) -> Fail {
    Fail { code: EXIT_USAGE, msg: msg.into() }
}

/// Exit code for a library error.
pub fn exit_code(e: &Error) -> i32 {
    match e {
        Error::Dimension(_)
        | Error::Syntax { .. }
        | Error::UnknownIdentifier(_)
        | Error::Coverage(_)
        | Error::Domain(_) => EXIT_PARSE,
        Error::Condition(_) | Error::Reducible(_) => EXIT_CONDITION,
        Error::Numeric(_) | Error::NonFinite { .. } => EXIT_NUMERIC,
        Error::Unsupported(_) => EXIT_USAGE,
    }
}

/// What a command produced.
#[derive(Default)]
struct Output {
    text: String,
    csv: Option<String>,
    /// Without `--out`, the CSV goes to stdout and the text to stderr.
    csv_primary: bool,
    code: i32,
}

/// Run with `args` (including the program name); returns the exit code.
pub fn run(args: &[String], out: &mut dyn Write, err: &mut dyn Write) -> i32 {
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let text = e.render().to_string();
            let _ = if code == EXIT_OK { write!(out, "{text}") } else { write!(err, "{text}") };
            return code;
        }
    };
    match dispatch(&cli) {
        Ok((name, dir, o)) => match emit(&name, dir.as_deref(), &o, out, err) {
            Ok(()) => o.code,
            Err(f) => {
                let _ = writeln!(err, "error: {}", f.msg);
                f.code
            }
        },
        Err(f) => {
            let _ = writeln!(err, "error: {}", f.msg);
            f.code
        }
    }
}

fn emit(name: &str, dir: Option<&Path>, o: &Output, out: &mut dyn Write, err: &mut dyn Write) -> Result<(), Fail> {
    let io = |e: std::io::Error| usage(format!("cannot write output: {e}"));
    match dir {
        Some(d) => {
            std::fs::create_dir_all(d).map_err(io)?;
            std::fs::write(d.join(format!("{name}.txt")), &o.text).map_err(io)?;
            if let Some(csv) = &o.csv {
                std::fs::write(d.join(format!("{name}.csv")), csv).map_err(io)?;
            }
            write!(out, "{}", o.text).map_err(io)?;
        }
        None => match o.csv.as_ref().filter(|_| o.csv_primary) {
            Some(csv) => {
                write!(err, "{}", o.text).map_err(io)?;
                write!(out, "{csv}").map_err(io)?;
            }
            None => write!(out, "{}", o.text).map_err(io)?,
        },
    }
    Ok(())
}

type Dispatched = (String, Option<PathBuf>, Output);

fn dispatch(cli: &Cli) -> Result<Dispatched, Fail> {
    let (name, m) = match &cli.cmd {
        Cmd::Reproduce(r) => {
            set_precision(r.prec);
            let o = reproduce(&r.which)?;
            return Ok((format!("reproduce_{}", r.which.replace('.', "_")), r.out.clone(), o));
        }
        Cmd::Validate(m) => ("validate", m),
        Cmd::Components(m) => ("components", m),
        Cmd::Pressure(m) => ("pressure", m),
        Cmd::Gibbs(m) => ("gibbs", m),
        Cmd::Sweep(m) => ("sweep", m),
        Cmd::Delta(d) => ("delta", &d.inner),
        Cmd::Limit(m) => ("limit", m),
        Cmd::Asymptotics(a) => ("asymptotics", &a.inner),
    };
    set_precision(m.opts.prec);
    let ctx = Ctx::load(m)?;
    let o = match &cli.cmd {
        Cmd::Validate(_) => validate(&ctx)?,
        Cmd::Components(_) => components(&ctx)?,
        Cmd::Pressure(_) => pressure(&ctx)?,
        Cmd::Gibbs(_) => gibbs(&ctx)?,
        Cmd::Sweep(_) => sweep(&ctx)?,
        Cmd::Delta(d) => delta(&ctx, d.order)?,
        Cmd::Limit(_) => limit(&ctx)?,
        Cmd::Asymptotics(a) => asymptotics(&ctx, a.n1, a.n2)?,
        Cmd::Reproduce(_) => unreachable!(),
    };
    Ok((name.to_string(), m.opts.out.clone(), o))
}

/// A loaded model with the resolved ε points.
struct Ctx {
    model: ModelFile,
    grid: Vec<f64>,
    /// Explicit `--eps` values, or the grid.
    points: Vec<Mp>,
    seqs: Vec<SeqKind>,
}

impl Ctx {
    fn load(m: &ModelArgs) -> Result<Self, Fail> {
        let text = match std::fs::read_to_string(&m.model) {
            Ok(t) => t,
            Err(e) => match bundled(&m.model) {
                Some(t) => t.to_string(),
                None => return Err(usage(format!("cannot read model `{}`: {e}", m.model))),
            },
        };
        let mut overrides = Vec::new();
        for p in &m.opts.params {
            let (k, v) = p.split_once('=').ok_or_else(|| usage(format!("--param expects name=value, got `{p}`")))?;
            overrides.push((k.trim().to_string(), v.trim().to_string()));
        }
        let model = parse_model_with(&text, &overrides)
            .map_err(|e| Fail { code: EXIT_PARSE, msg: format!("{}: {e}", m.model) })?;
        let mut spec = model.grid.clone();
        if let Some(g) = &m.opts.grid {
            let parts: Vec<&str> = g.split(',').map(str::trim).collect();
            let bad = || usage(format!("--grid expects lo,hi,per_decade, got `{g}`"));
            if parts.len() != 3 {
                return Err(bad());
            }
            spec.lo = parts[0].parse().map_err(|_| bad())?;
            spec.hi = parts[1].parse().map_err(|_| bad())?;
            spec.per_decade = parts[2].parse().map_err(|_| bad())?;
        }
        let grid = geometric_grid(spec.lo, spec.hi, spec.per_decade).map_err(|e| usage(e.to_string()))?;
        let seqs = if m.opts.seqs.is_empty() {
            spec.seqs
        } else {
            m.opts
                .seqs
                .iter()
                .map(|s| SeqKind::parse(s).ok_or_else(|| usage(format!("unknown sequence `{s}`; use sin+1 or sin-1"))))
                .collect::<Result<_, _>>()?
        };
        let points = if m.opts.eps.is_empty() {
            grid.iter().map(|&g| Mp::from_f64(g)).collect()
        } else {
            m.opts
                .eps
                .iter()
                .map(|s| match Mp::parse_decimal(s) {
                    Some(v) if v > 0 => Ok(v),
                    _ => Err(usage(format!("--eps expects a positive number, got `{s}`"))),
                })
                .collect::<Result<_, _>>()?
        };
        Ok(Ctx { model, grid, points, seqs })
    }

    fn f(&self) -> &crate::weights::PerturbationFamily {
        &self.model.family
    }

    fn sequences(&self) -> Vec<(String, Vec<Mp>)> {
        self.seqs.iter().map(|s| (s.name().to_string(), sin_sequence::<Mp>(&self.grid, s.sign()))).collect()
    }
}

fn yn(b: bool) -> &'static str {
    if b {
        "yes"
    } else {
        "no"
    }
}

fn comp_list(cls: &ComponentClassification<Mp>, ids: &[usize]) -> String {
    if ids.is_empty() {
        return "(none)".into();
    }
    ids.iter()
        .map(|&c| format!("{}={}", cls.label(c), cls.decomposition.blocks[c].label()))
        .collect::<Vec<_>>()
        .join(" ")
}

fn join_label(ids: &[usize]) -> String {
    ids.iter().map(|c| (c + 1).to_string()).collect::<Vec<_>>().join("+")
}

fn validate(ctx: &Ctx) -> Result<Output, Fail> {
    let f = ctx.f();
    let mut t = String::new();
    let c = check_conditions(f.a(), f.b())?;
    let p = verify_potential_conditions(f, &ctx.grid);
    let _ = writeln!(
        t,
        "model: {} ({} states, {} allowed transitions, {} in N)",
        ctx.model.name,
        f.dim(),
        f.a().ones(),
        f.n_set().ones()
    );
    let _ = writeln!(t, "Sigma.1 A irreducible: {}", yn(c.sigma1));
    let _ = writeln!(t, "Sigma.2 B contained in A: {}", yn(c.sigma2));
    let _ = writeln!(t, "Sigma.3 B has a transitive component: {}", yn(c.sigma3));
    let last = ctx.grid.len() - 1;
    let _ = writeln!(
        t,
        "Phi.1 phi(eps) -> phi uniformly: {} (sup diff {} at eps={})",
        yn(p.phi1),
        sci(p.phi_sup_diff[last]),
        sci(ctx.grid[last])
    );
    match p.psi_max.last() {
        Some(v) => {
            let _ = writeln!(
                t,
                "Phi.2 psi -> -inf on N: {} (max psi {} at eps={})",
                yn(p.phi2),
                sci(*v),
                sci(ctx.grid[last])
            );
        }
        None => {
            let _ = writeln!(t, "Phi.2 psi -> -inf on N: {} (N is empty)", yn(p.phi2));
        }
    }
    let _ = writeln!(t, "Phi.3 bounded variation: {}", yn(p.phi3));
    let ok = c.all() && p.all();
    if ok {
        let fam = |e: &f64| f.weighted_matrix(e, None);
        match check_perturbed_matrix_family::<f64>(&fam, &ctx.grid) {
            Ok(r) => {
                let _ = writeln!(
                    t,
                    "matrix conditions (informational): M.1 {} M.2 {} M.3 {} M.4 {} ratios bounded {}",
                    yn(r.m1_support_constant),
                    yn(r.m2_upper_bounded),
                    yn(r.m3_lower_vanishing),
                    yn(r.m4_diagonal_converges),
                    yn(r.ratios_bounded)
                );
            }
            Err(e) => {
                let _ = writeln!(t, "matrix conditions (informational): not evaluated ({e})");
            }
        }
    }
    let _ = writeln!(t, "valid: {}", yn(ok));
    Ok(Output { text: t, csv: None, csv_primary: false, code: if ok { EXIT_OK } else { EXIT_CONDITION } })
}

fn components(ctx: &Ctx) -> Result<Output, Fail> {
    let cls = classify_components::<Mp>(ctx.f())?;
    let mut t = String::new();
    let _ = writeln!(t, "component,states,nonempty,lambda,log_lambda,class");
    for (k, b) in cls.decomposition.blocks.iter().enumerate() {
        let class = if cls.t0.contains(&k) {
            "T0"
        } else if cls.t1.contains(&k) {
            "T1"
        } else {
            "-"
        };
        let l = cls.lambda[k].to_f64();
        let ll = if b.nonempty_subshift { sci(l.ln()) } else { "-inf".into() };
        let states = b.states.iter().map(|s| (s + 1).to_string()).collect::<Vec<_>>().join(" ");
        let _ = writeln!(t, "{},{},{},{},{},{}", k + 1, states, u8::from(b.nonempty_subshift), sci(l), ll, class);
    }
    let _ = writeln!(t, "# T0: {}", comp_list(&cls, &cls.t0));
    let _ = writeln!(t, "# T1: {}", comp_list(&cls, &cls.t1));
    Ok(Output { text: t, ..Default::default() })
}

fn pressure(ctx: &Ctx) -> Result<Output, Fail> {
    let f = ctx.f();
    let cls = classify_components::<Mp>(f)?;
    let limit = if cls.sigma3() { cls.lambda_max.clone().ln().to_f64() } else { f64::NEG_INFINITY };
    let mut csv = String::from("eps,pressure,limit_gap\n");
    for e in &ctx.points {
        let w = f.weighted_matrix(e, None)?;
        let p = crate::thermo::pressure(&w)?.to_f64();
        let _ = writeln!(csv, "{},{},{}", sci(e.to_f64()), sci(p), sci((p - limit).abs()));
    }
    let text = if cls.sigma3() {
        format!("limit pressure P(sigma_B, phi_B) = {}\n", sci(limit))
    } else {
        "limit pressure P(sigma_B, phi_B) = -inf (B has no cycle)\n".to_string()
    };
    Ok(Output { text, csv: Some(csv), csv_primary: true, code: EXIT_OK })
}

fn gibbs(ctx: &Ctx) -> Result<Output, Fail> {
    let f = ctx.f();
    let cls = classify_components::<Mp>(f)?;
    let d = f.dim();
    let mut csv = String::from("eps,lambda_full,pressure");
    for i in 0..d {
        let _ = write!(csv, ",pi_{}", i + 1);
    }
    for &m in &cls.t {
        let _ = write!(csv, ",mu_{}", m + 1);
    }
    csv.push_str(",entropy\n");
    let mut text = String::new();
    for (k, e) in ctx.points.iter().enumerate() {
        let w = f.weighted_matrix(e, None)?;
        let mu = gibbs_measure(&w)?;
        let _ = write!(csv, "{},{},{}", sci(e.to_f64()), sci(mu.lambda.to_f64()), sci(mu.lambda.clone().ln().to_f64()));
        for p in &mu.pi {
            let _ = write!(csv, ",{}", sci(p.to_f64()));
        }
        for &m in &cls.t {
            let s: f64 = cls.decomposition.blocks[m].states.iter().map(|&i| mu.pi[i].to_f64()).sum();
            let _ = write!(csv, ",{}", sci(s));
        }
        let _ = writeln!(csv, ",{}", sci(entropy(&mu).to_f64()));
        if k + 1 == ctx.points.len() {
            let g = gibbs_constant_check(&mu, &w, 8)?;
            let per: Vec<String> = g.per_length.iter().map(|c| format!("{c:.4}")).collect();
            let _ = writeln!(text, "Gibbs constant at eps={} by length 1..8: {}", sci(e.to_f64()), per.join(" "));
        }
    }
    Ok(Output { text, csv: Some(csv), csv_primary: true, code: EXIT_OK })
}

/// Nonempty subsets of T₀ in mask order, or only singletons when T₀ is large.
fn t0_subsets(t0: &[usize]) -> Vec<Vec<usize>> {
    if t0.len() > 4 {
        return t0.iter().map(|&m| vec![m]).collect();
    }
    (1u32..1 << t0.len()).map(|mask| (0..t0.len()).filter(|b| mask >> b & 1 == 1).map(|b| t0[b]).collect()).collect()
}

fn deltas_at(snap: &Snapshot<'_, Mp>) -> Result<Option<Vec<f64>>, Fail> {
    let p = match snap.cls.t0.len() {
        2 => delta2_at(snap)?,
        3 => delta3_at(snap)?,
        4 => delta4_at(snap)?.point,
        _ => return Ok(None),
    };
    Ok(Some(if p.degenerate { vec![f64::NAN; p.delta.len()] } else { p.delta.iter().map(|v| v.to_f64()).collect() }))
}

fn sweep(ctx: &Ctx) -> Result<Output, Fail> {
    let f = ctx.f();
    let cls = classify_components::<Mp>(f)?;
    let subsets = t0_subsets(&cls.t0);
    let with_delta = (2..=4).contains(&cls.t0.len());
    let mut csv = String::from("series,eps,lambda_full,pressure");
    for j in &subsets {
        let _ = write!(csv, ",lambda_{}", join_label(j));
    }
    if with_delta {
        for &m in &cls.t0 {
            let _ = write!(csv, ",delta_{}", m + 1);
        }
    }
    for &m in &cls.t {
        let _ = write!(csv, ",mu_{}", m + 1);
    }
    csv.push_str(",entropy\n");
    let mut series: Vec<(String, Vec<Mp>)> = vec![("grid".into(), ctx.points.clone())];
    if ctx.model.family.mentions_sin() || !ctx.seqs.is_empty() {
        series.extend(ctx.sequences());
    }
    for (name, pts) in &series {
        for e in pts {
            let snap = Snapshot::new(f, &cls, e.clone())?;
            let lam = snap.lambda_full()?;
            let _ = write!(csv, "{name},{},{},{}", sci(e.to_f64()), sci(lam.to_f64()), sci(lam.clone().ln().to_f64()));
            for j in &subsets {
                let _ = write!(csv, ",{}", sci(snap.lambda_t1(j)?.to_f64()));
            }
            if let Some(d) = deltas_at(&snap)? {
                for v in d {
                    let _ = write!(csv, ",{}", sci(v));
                }
            }
            let mu = gibbs_measure(&snap.w)?;
            for &m in &cls.t {
                let s: f64 = cls.decomposition.blocks[m].states.iter().map(|&i| mu.pi[i].to_f64()).sum();
                let _ = write!(csv, ",{}", sci(s));
            }
            let _ = writeln!(csv, ",{}", sci(entropy(&mu).to_f64()));
        }
    }
    let mut text = String::new();
    let _ =
        writeln!(text, "model: {}; T0: {}; T1: {}", ctx.model.name, comp_list(&cls, &cls.t0), comp_list(&cls, &cls.t1));
    let _ = writeln!(text, "series: {}", series.iter().map(|s| s.0.as_str()).collect::<Vec<_>>().join(", "));
    Ok(Output { text, csv: Some(csv), csv_primary: true, code: EXIT_OK })
}

fn delta(ctx: &Ctx, order: Option<usize>) -> Result<Output, Fail> {
    let f = ctx.f();
    let cls = classify_components::<Mp>(f)?;
    let n = cls.t0.len();
    let k = order.unwrap_or(n);
    if !(2..=4).contains(&k) {
        return Err(usage(format!("delta supports 2, 3 or 4 maximal components; requested {k}")));
    }
    if k != n {
        return Err(usage(format!("delta{k} needs {k} maximal components, the model has {n}")));
    }
    let mut csv = String::from("eps,lambda_full");
    let subs = t0_subsets(&cls.t0);
    for j in &subs {
        let _ = write!(csv, ",lambda_{}", join_label(j));
    }
    for &m in &cls.t0 {
        let _ = write!(csv, ",delta0_{}", m + 1);
    }
    for &m in &cls.t0 {
        let _ = write!(csv, ",delta_{}", m + 1);
    }
    csv.push_str(",degenerate");
    let mut header_done = false;
    let mut text = String::new();
    let mut body = String::new();
    for e in &ctx.points {
        let snap = Snapshot::new(f, &cls, e.clone())?;
        let (p, extra, extra_names) = match k {
            2 => {
                let p = delta2_at(&snap)?;
                let c = c1_c2_at(&snap)?;
                (p, vec![c.c1.to_f64(), c.c2.to_f64()], vec!["c1".to_string(), "c2".to_string()])
            }
            3 => (delta3_at(&snap)?, vec![], vec![]),
            _ => {
                let d = delta4_at(&snap)?;
                if !header_done {
                    let _ = writeln!(text, "warning: {}", d.warning);
                }
                let names =
                    d.ratios.iter().map(|(j, jp, _)| format!("R_{}|{}", join_label(j), join_label(jp))).collect();
                let vals = d.ratios.iter().map(|r| r.2.to_f64()).collect();
                (d.point, vals, names)
            }
        };
        if !header_done {
            for nme in &extra_names {
                let _ = write!(csv, ",{nme}");
            }
            csv.push('\n');
            header_done = true;
        }
        let _ = write!(body, "{},{}", sci(e.to_f64()), sci(p.lambda.to_f64()));
        for j in &subs {
            let _ = write!(body, ",{}", sci(snap.lambda_t1(j)?.to_f64()));
        }
        for v in &p.delta0 {
            let _ = write!(body, ",{}", sci(v.to_f64()));
        }
        for v in &p.delta {
            let _ = write!(body, ",{}", sci(if p.degenerate { f64::NAN } else { v.to_f64() }));
        }
        let _ = write!(body, ",{}", u8::from(p.degenerate));
        for v in extra {
            let _ = write!(body, ",{}", sci(v));
        }
        body.push('\n');
    }
    csv.push_str(&body);
    let _ = writeln!(text, "delta{k} on T0: {}", comp_list(&cls, &cls.t0));
    Ok(Output { text, csv: Some(csv), csv_primary: true, code: EXIT_OK })
}

fn limit(ctx: &Ctx) -> Result<Output, Fail> {
    let f = ctx.f();
    let cls = classify_components::<Mp>(f)?;
    let seqs = if f.mentions_sin() || !ctx.seqs.is_empty() { ctx.sequences() } else { vec![] };
    let r = gibbs_limit_analysis::<Mp>(f, &ctx.grid, &seqs)?;
    let mut t = String::new();
    let _ = writeln!(t, "model: {}", ctx.model.name);
    let _ = writeln!(t, "T0: {}", comp_list(&cls, &cls.t0));
    let _ = writeln!(t, "T1: {}", comp_list(&cls, &cls.t1));
    let last = ctx.grid.len() - 1;
    if r.pressure_to_minus_infinity {
        let _ = writeln!(
            t,
            "pressure: tends to -inf (value {} at eps={})",
            sci(r.grid.log_lambda[last]),
            sci(ctx.grid[last])
        );
        return Ok(Output { text: t, ..Default::default() });
    }
    let _ = writeln!(t, "limit pressure: {}", sci(r.limit_pressure));
    let _ = writeln!(
        t,
        "pressure gap at eps={}: {} (monotone and below 1e-3: {})",
        sci(ctx.grid[last]),
        sci(r.pressure_gap[last]),
        yn(r.pressure_converges)
    );
    let _ = writeln!(t, "component,weight,accumulation_lo,accumulation_hi,entropy");
    for (k, &m) in r.t0.iter().enumerate() {
        let (lo, hi) = r.accumulation[k];
        let _ = writeln!(t, "{},{},{},{},{}", m + 1, sci(r.weights[k]), sci(lo), sci(hi), sci(r.component_entropy[k]));
    }
    for s in std::iter::once(&r.grid).chain(r.sequences.iter()) {
        if let (Some(e), Some(m)) = (s.eps.last(), s.marginals.last()) {
            let vals: Vec<String> = m.iter().map(|v| format!("{v:.6}")).collect();
            let _ = writeln!(t, "# {} at eps={}: marginals {}", s.name, sci(*e), vals.join(" "));
        }
    }
    let _ = writeln!(t, "converged: {}", yn(r.converged));
    if r.converged {
        let _ = writeln!(
            t,
            "entropy: limit sum_M delta(M) h(M) = {}, h at eps={} = {}",
            sci(r.entropy_limit),
            sci(ctx.grid[last]),
            sci(r.grid.entropy[last])
        );
    }
    Ok(Output { text: t, ..Default::default() })
}

fn asymptotics(ctx: &Ctx, n1: usize, n2: usize) -> Result<Output, Fail> {
    let f = ctx.f();
    let x = ExpansionInput::<Mp>::from_family(f, n1, n2)?;
    let o = expansion_orders(&x, 0, 1)?;
    let mut t = String::new();
    let _ = writeln!(
        t,
        "orders: s={} s12={} s21={} (n1={n1}, n2={n2})",
        fmt_order(o.s),
        fmt_order(o.s12),
        fmt_order(o.s21)
    );
    let _ = writeln!(t, "d12={} d21={}", sci(o.d12.to_f64()), sci(o.d21.to_f64()));
    for (k, s) in o.series.iter().enumerate() {
        let c: Vec<String> = s.lambda.iter().map(|v| sci(v.to_f64())).collect();
        let _ = writeln!(t, "lambda coefficients component {}: {}", k + 1, c.join(" "));
    }
    let cl = c2_limit_classify(&o);
    let verdict = match &cl {
        C2Limit::Finite(v) => format!("c2 -> {}", sci(*v)),
        C2Limit::PlusInfinity => "c2 -> +inf".into(),
        C2Limit::MinusInfinity => "c2 -> -inf".into(),
        C2Limit::Inconclusive(m) => format!("inconclusive: {m}"),
    };
    let _ = writeln!(t, "{verdict}");
    if let Some(c) = cl.as_f64() {
        let (a, b) = limit_from_c2(c);
        let _ = writeln!(t, "predicted limit weights: {} {}", sci(a), sci(b));
    }
    let cls = classify_components::<Mp>(f)?;
    let e = ctx.points.last().expect("points").clone();
    let snap = Snapshot::new(f, &cls, e.clone())?;
    if let Ok(c) = c1_c2_at(&snap) {
        let _ = writeln!(t, "empirical c2 at eps={}: {}", sci(e.to_f64()), sci(c.c2.to_f64()));
    }
    Ok(Output { text: t, ..Default::default() })
}

fn checks_text(checks: &[Check]) -> (String, bool) {
    let mut t = String::new();
    let mut ok = true;
    for c in checks {
        let _ = writeln!(t, "{}", c.line());
        ok &= c.pass || c.known_discrepancy;
    }
    (t, ok)
}

fn reproduce(which: &str) -> Result<Output, Fail> {
    let (text, csv, ok) = match which {
        "5.2" => {
            let checks = reproduce_5_2()?;
            let (mut t, ok) = checks_text(&checks);
            let _ = writeln!(
                t,
                "note: for s=7/9 the marginal of component 1 tends to 0 along sin=+1 and stays near 0.177 along sin=-1; the claimed accumulation set [1/9,1/3] is not reproduced"
            );
            (t, None, ok)
        }
        "5.3" => {
            let (checks, rows) = reproduce_5_3_checks()?;
            let (mut t, ok) = checks_text(&checks);
            let _ = writeln!(
                t,
                "note: lambda({{3,4}},eps) equals lambda(2,eps) = 3 + 1.1 eps, so the ratio against lambda({{3,4}}) coincides with R and diverges; the claimed limit 0 is not reproduced"
            );
            let mut csv = String::from("eps,gap,gap_v,R,R_23,R_24,R_34\n");
            for r in &rows {
                let _ = writeln!(
                    csv,
                    "{},{},{},{},{},{},{}",
                    sci(r.eps),
                    sci(r.gap),
                    sci(r.gap_v),
                    sci(r.ratio),
                    sci(r.side[0]),
                    sci(r.side[1]),
                    sci(r.side[2])
                );
            }
            let mut t2 = t;
            t2.push_str("diagnostic ratio table (R = gap / gap_v):\n");
            t2.push_str(&csv);
            (t2, Some(csv), ok)
        }
        _ => return Err(usage(format!("reproduce expects 5.2 or 5.3, got `{which}`"))),
    };
    Ok(Output { text, csv, csv_primary: false, code: if ok { EXIT_OK } else { EXIT_CONDITION } })
}
