//! Command-line surface. Every command builds a [`Report`]; its checks
//! decide the exit status (0 pass, 1 check failure, 2 usage or
//! configuration error, 3 budget exceeded).

use std::io::Write;
use std::path::PathBuf;
use std::sync::Arc;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::json;

use crate::code::{pless_check, Code, CodeError, Method};
use crate::config::{parse_modulus, ConfigError, RunConfig};
use crate::cyclotomic::{self, SqrtConvention};
use crate::field::{is_irreducible, Field};
use crate::ghw::{self, GhwError, GhwMethod};
use crate::report::{Check, Report};
use crate::subspaces::{Budget, BudgetExceeded, DEFAULT_BUDGET};
use crate::suite::{self, Faults, Golden, Level};

#[derive(Parser, Debug)]
#[command(name = "qform-codes", version, about = "Weight distributions and hierarchies of three-weight codes from quadratic forms")]
pub struct Cli {
    /// Worker threads for enumeration sweeps (default: all cores).
    #[arg(long, global = true)]
    pub threads: Option<usize>,
    /// Cap on enumeration work units.
    #[arg(long, global = true, default_value_t = DEFAULT_BUDGET)]
    pub budget: u128,
    #[arg(long, global = true, value_enum, default_value_t = Output::Csv)]
    pub output: Output,
    /// Field modulus as coefficients c0,c1,...,c_e of c0 + c1 t + ... + c_e t^e.
    #[arg(long, global = true)]
    pub modulus: Option<String>,
    /// Deliberate defect for negative controls (repeatable).
    #[arg(long = "inject-fault", global = true, value_enum)]
    pub faults: Vec<Fault>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Output {
    Csv,
    Json,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Fault {
    /// Report the opposite sign of the form.
    SignFlip,
    /// Add (0,0) to the defining set.
    OriginInD,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Finite field construction.
    #[command(subcommand)]
    Field(FieldCmd),
    /// Quadratic form analysis.
    #[command(subcommand)]
    Form(FormCmd),
    /// Exact character-sum identities.
    #[command(subcommand)]
    Sums(SumsCmd),
    /// Weight distribution and hierarchy of a code.
    #[command(subcommand)]
    Code(CodeCmd),
    /// Aggregated cross-checks.
    Verify {
        #[arg(value_enum)]
        level: VerifyLevel,
    },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum VerifyLevel {
    Quick,
    Full,
}

#[derive(Args, Debug, Clone)]
pub struct FieldArgs {
    #[arg(long)]
    pub p: u32,
    #[arg(long)]
    pub e: usize,
}

#[derive(Args, Debug, Clone)]
pub struct FormArgs {
    #[command(flatten)]
    pub field: FieldArgs,
    /// `tr_x2`, `tr_theta_x2`, or `a_0;...;a_(e-1)` with each a_i as `theta^k`, an integer, or `c0,...,c_(e-1)`.
    #[arg(long, default_value = "tr_x2")]
    pub form: String,
}

#[derive(Args, Debug, Clone)]
pub struct CodeArgs {
    #[command(flatten)]
    pub form: FormArgs,
    /// `theta^k`, an integer, or `c0,...,c_(e-1)`.
    #[arg(long, default_value = "1")]
    pub alpha: String,
}

#[derive(Subcommand, Debug)]
pub enum FieldCmd {
    /// Modulus and primitive element.
    Build(FieldArgs),
    /// Every element with its coordinates, discrete log and trace.
    Show(FieldArgs),
}

#[derive(Subcommand, Debug)]
pub enum FormCmd {
    /// Gram matrix, rank, sign and the linearized map.
    Analyze(FormArgs),
}

#[derive(Subcommand, Debug)]
pub enum SumsCmd {
    /// Gauss-sum laws, Galois-orbit sums and the closed form of the Weil sums.
    Verify {
        #[command(flatten)]
        form: FormArgs,
        #[arg(long, default_value_t = 6)]
        r_max: u32,
    },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum WdistMethod {
    Formula,
    Enumerate,
    Both,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum GhwMethodArg {
    Formula,
    Brute,
    Both,
}

#[derive(Subcommand, Debug)]
pub enum CodeCmd {
    /// Weight distribution: columns weight,multiplicity.
    Wdist {
        #[command(flatten)]
        code: CodeArgs,
        #[arg(long, value_enum, default_value_t = WdistMethod::Formula)]
        method: WdistMethod,
    },
    /// Generalized Hamming weights: columns r,d_r,method.
    Ghw {
        #[command(flatten)]
        code: CodeArgs,
        /// `all` or a comma-separated list of ranks.
        #[arg(long, default_value = "all")]
        r: String,
        #[arg(long, value_enum, default_value_t = GhwMethodArg::Formula)]
        method: GhwMethodArg,
    },
    /// Reproduce the golden examples by formula and enumeration.
    CheckExamples {
        /// Golden TOML file (default: the bundled one).
        #[arg(long)]
        golden: Option<PathBuf>,
    },
}

/// Rows printed in CSV mode.
#[derive(Clone, Debug, Default)]
pub struct Table {
    pub header: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

impl Table {
    fn new(header: &[&str]) -> Self {
        Table { header: header.iter().map(|s| s.to_string()).collect(), rows: Vec::new() }
    }

    fn push(&mut self, row: Vec<String>) {
        self.rows.push(row);
    }

    fn of_checks(report: &Report) -> Self {
        let mut t = Table::new(&["check", "expected", "actual", "pass"]);
        for c in &report.checks {
            t.push(vec![c.name.clone(), c.expected.clone(), c.actual.clone(), c.pass.to_string()]);
        }
        t
    }
}

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Config(#[from] ConfigError),
    #[error("{0}")]
    Usage(String),
    #[error("budget exceeded: {0}")]
    Budget(#[from] BudgetExceeded),
    #[error("{0}")]
    Io(#[from] std::io::Error),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) | CliError::Usage(_) | CliError::Io(_) => 2,
            CliError::Budget(_) => 3,
        }
    }
}

impl From<CodeError> for CliError {
    fn from(e: CodeError) -> Self {
        match e {
            CodeError::Budget(b) => CliError::Budget(b),
            other => CliError::Usage(other.to_string()),
        }
    }
}

impl From<GhwError> for CliError {
    fn from(e: GhwError) -> Self {
        match e {
            GhwError::Budget(b) => CliError::Budget(b),
            other => CliError::Usage(other.to_string()),
        }
    }
}

struct Ctx {
    budget: Budget,
    modulus: Option<Vec<u32>>,
    faults: Faults,
}

impl Ctx {
    fn field(&self, a: &FieldArgs) -> Result<Arc<Field>, CliError> {
        Ok(self.config(a, "tr_x2", "1").field()?)
    }

    fn config(&self, a: &FieldArgs, form: &str, alpha: &str) -> RunConfig {
        RunConfig { p: a.p, e: a.e, modulus: self.modulus.clone(), form: form.into(), alpha: alpha.into() }
    }

    fn code(&self, a: &CodeArgs) -> Result<Code, CliError> {
        let code = self.config(&a.form.field, &a.form.form, &a.alpha).build()?;
        Ok(self.faults.apply(&code))
    }
}

fn to_value<T: serde::Serialize>(t: &T) -> serde_json::Value {
    serde_json::to_value(t).expect("plain data serializes")
}

/// Parses arguments, runs, prints, and returns the process exit code.
pub fn main() -> i32 {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 2 } else { 0 };
        }
    };
    match run_cli(&cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}

pub fn run_cli(cli: &Cli) -> Result<i32, CliError> {
    if let Some(n) = cli.threads {
        rayon::ThreadPoolBuilder::new().num_threads(n).build_global().map_err(|e| CliError::Usage(e.to_string()))?;
    }
    let ctx = Ctx {
        budget: Budget::new(cli.budget),
        modulus: cli.modulus.as_deref().map(parse_modulus).transpose()?,
        faults: Faults { flip_sign: cli.faults.contains(&Fault::SignFlip), origin_in_d: cli.faults.contains(&Fault::OriginInD) },
    };
    let (report, table) = run(&cli.command, &ctx)?;
    emit(&report, table, cli.output)?;
    Ok(report.status().exit_code())
}

fn emit(report: &Report, table: Option<Table>, output: Output) -> Result<(), CliError> {
    let stdout = std::io::stdout();
    let mut out = stdout.lock();
    match output {
        Output::Json => {
            serde_json::to_writer_pretty(&mut out, report).map_err(|e| CliError::Usage(e.to_string()))?;
            writeln!(out)?;
        }
        Output::Csv => {
            let table = table.unwrap_or_else(|| Table::of_checks(report));
            let mut w = csv::Writer::from_writer(&mut out);
            w.write_record(&table.header).map_err(|e| CliError::Usage(e.to_string()))?;
            for row in &table.rows {
                w.write_record(row).map_err(|e| CliError::Usage(e.to_string()))?;
            }
            w.flush()?;
            drop(w);
            let stderr = std::io::stderr();
            let mut err = stderr.lock();
            for line in report.check_lines() {
                writeln!(err, "{line}")?;
            }
        }
    }
    Ok(())
}

fn run(cmd: &Command, ctx: &Ctx) -> Result<(Report, Option<Table>), CliError> {
    match cmd {
        Command::Field(FieldCmd::Build(a)) => field_build(a, ctx),
        Command::Field(FieldCmd::Show(a)) => field_show(a, ctx),
        Command::Form(FormCmd::Analyze(a)) => form_analyze(a, ctx),
        Command::Sums(SumsCmd::Verify { form, r_max }) => sums_verify(form, *r_max, ctx),
        Command::Code(CodeCmd::Wdist { code, method }) => wdist(code, *method, ctx),
        Command::Code(CodeCmd::Ghw { code, r, method }) => ghw_cmd(code, r, *method, ctx),
        Command::Code(CodeCmd::CheckExamples { golden }) => check_examples(golden.as_ref(), ctx),
        Command::Verify { level } => {
            let level = if *level == VerifyLevel::Quick { Level::Quick } else { Level::Full };
            Ok((suite::verify(level, ctx.faults, &ctx.budget), None))
        }
    }
}

fn field_build(a: &FieldArgs, ctx: &Ctx) -> Result<(Report, Option<Table>), CliError> {
    let f = ctx.field(a)?;
    let mut report = Report::new(format!("field build --p {} --e {}", a.p, a.e));
    report.field = Some(to_value(&f.spec()));
    report.push(Check::holds("modulus is irreducible", is_irreducible(f.modulus(), f.p()), format!("{:?}", f.modulus())));
    let theta = f.primitive();
    let mut x = theta;
    let mut order = 1usize;
    while x != f.one() {
        x = f.mul(x, theta);
        order += 1;
    }
    report.push(Check::equal("order of the primitive element", f.q() - 1, order));
    let mut t = Table::new(&["key", "value"]);
    t.push(vec!["p".into(), f.p().to_string()]);
    t.push(vec!["e".into(), f.e().to_string()]);
    t.push(vec!["q".into(), f.q().to_string()]);
    t.push(vec!["modulus".into(), format!("{:?}", f.modulus())]);
    t.push(vec!["primitive".into(), format!("{:?}", f.coords(theta))]);
    Ok((report, Some(t)))
}

fn field_show(a: &FieldArgs, ctx: &Ctx) -> Result<(Report, Option<Table>), CliError> {
    let f = ctx.field(a)?;
    let mut report = Report::new(format!("field show --p {} --e {}", a.p, a.e));
    report.field = Some(to_value(&f.spec()));
    let mut log = vec![None; f.q()];
    let mut x = f.one();
    for k in 0..f.q() - 1 {
        log[x.index()] = Some(k);
        x = f.mul(x, f.primitive());
    }
    report.push(Check::equal("discrete logs cover the nonzero elements", f.q() - 1, log.iter().flatten().count()));
    let mut t = Table::new(&["index", "coords", "log_theta", "trace"]);
    let mut rows = Vec::new();
    for x in f.elements() {
        let coords = f.coords(x);
        let l = log[x.index()].map_or(String::new(), |k| k.to_string());
        rows.push(json!({"index": x.index(), "coords": coords, "log_theta": log[x.index()], "trace": f.trace(x)}));
        t.push(vec![x.index().to_string(), format!("{coords:?}"), l, f.trace(x).to_string()]);
    }
    report.result = Some(serde_json::Value::Array(rows));
    Ok((report, Some(t)))
}

fn form_analyze(a: &FormArgs, ctx: &Ctx) -> Result<(Report, Option<Table>), CliError> {
    let form = ctx.faults.apply_form(&ctx.config(&a.field, &a.form, "1").form()?);
    let f = form.field().clone();
    let prof = form.profile();
    let mut report = Report::new(format!("form analyze --p {} --e {} --form {}", a.field.p, a.field.e, a.form));
    report.field = Some(to_value(&f.spec()));
    report.form = Some(to_value(&form));
    let max_iso = prof.is_nondegenerate().then(|| prof.max_isotropic_dim());
    report.result = Some(json!({"profile": to_value(prof), "max_isotropic_dim": max_iso}));
    let p = f.p();
    let gram_ok = f.elements().all(|x| {
        let c = f.coords(x);
        crate::linalg::bilinear(p, &prof.gram, &c, &c) == form.eval(x)
    });
    report.push(Check::holds("Gram matrix reproduces f", gram_ok, "all x"));
    let basis: Vec<_> = (0..f.e()).map(|j| f.basis_element(j)).collect();
    let lf_ok = f.elements().all(|x| {
        let lx = prof.eval_lf(x);
        lx == form.eval_lf_poly(x) && basis.iter().all(|&y| form.bilinear(x, y) == f.trace(f.mul(y, lx)))
    });
    report.push(Check::holds("F(x,y) = Tr(y L_f(x))", lf_ok, "all x, basis y"));
    let recomputed = crate::qform::rank_and_sign(p, &form.gram());
    report.push(Check::equal("sign matches diagonalization", recomputed.1, prof.sign));
    let mut t = Table::new(&["key", "value"]);
    t.push(vec!["rank".into(), prof.rank.to_string()]);
    t.push(vec!["sign".into(), prof.sign.to_string()]);
    t.push(vec!["diag".into(), format!("{:?}", prof.diag)]);
    t.push(vec!["gram".into(), format!("{:?}", prof.gram)]);
    t.push(vec!["lf_matrix".into(), format!("{:?}", prof.lf_matrix)]);
    t.push(vec!["max_isotropic_dim".into(), max_iso.map_or("-".into(), |m| m.to_string())]);
    Ok((report, Some(t)))
}

fn sums_verify(a: &FormArgs, r_max: u32, ctx: &Ctx) -> Result<(Report, Option<Table>), CliError> {
    let form = ctx.faults.apply_form(&ctx.config(&a.field, &a.form, "1").form()?);
    let p = a.field.p;
    let mut report = Report::new(format!("sums verify --p {p} --e {} --form {}", a.field.e, a.form));
    report.field = Some(to_value(&form.field().spec()));
    report.form = Some(to_value(&form));
    suite::record(&mut report, "gauss sums", suite::gauss_checks(&[p]));
    suite::record(&mut report, "orbit sums", suite::orbit_checks(&[p], r_max));
    suite::record(&mut report, "weil sums", suite::weil_checks(&form));
    let other = cyclotomic::galois_orbit_sweep(p, r_max, SqrtConvention::Conjugate).map_err(|e| CliError::Usage(e.to_string()))?;
    report.result = Some(json!({
        "note": "orbit sums under sqrt(p*)=eta(-1)g, for comparison with the Weil-sum conventions",
        "orbit_sums_conjugate_root": other.summary(),
    }));
    Ok((report, None))
}

fn wdist(a: &CodeArgs, method: WdistMethod, ctx: &Ctx) -> Result<(Report, Option<Table>), CliError> {
    let code = ctx.code(a)?;
    let mut report = Report::new(format!("code wdist --p {} --e {} --form {} --alpha {}", a.form.field.p, a.form.field.e, a.form.form, a.alpha));
    report.field = Some(to_value(&code.field().spec()));
    report.form = Some(to_value(code.form().profile()));
    let methods: &[Method] = match method {
        WdistMethod::Formula => &[Method::Formula],
        WdistMethod::Enumerate => &[Method::Enumerate],
        WdistMethod::Both => &[Method::Formula, Method::Enumerate],
    };
    let dists = methods.iter().map(|&m| code.weight_distribution(m, &ctx.budget)).collect::<Result<Vec<_>, _>>()?;
    for (m, wd) in methods.iter().zip(&dists) {
        let pl = pless_check(wd);
        report.push(Check::new(format!("power moments ({m:?})"), format!("{:?}", (pl.count.1, pl.moment.1)), format!("{:?}", (pl.count.0, pl.moment.0)), pl.passed()));
        report.push(Check::equal(format!("length ({m:?})"), code.length_formula(), wd.n));
    }
    if dists.len() == 2 {
        report.push(Check::equal("formula = enumeration", dists[0].enumerator(), dists[1].enumerator()));
    }
    let wd = &dists[0];
    report.result = Some(json!({"code": to_value(&code.summary()), "distribution": to_value(wd)}));
    let mut t = Table::new(&["weight", "multiplicity"]);
    for e in &wd.entries {
        t.push(vec![e.weight.to_string(), e.multiplicity.to_string()]);
    }
    Ok((report, Some(t)))
}

fn parse_ranks(s: &str, k: usize) -> Result<Vec<usize>, CliError> {
    if s.trim() == "all" {
        return Ok((1..=k).collect());
    }
    s.split(',')
        .map(|t| match t.trim().parse::<usize>() {
            Ok(r) if (1..=k).contains(&r) => Ok(r),
            _ => Err(CliError::Config(ConfigError::new("r", format!("`{t}` is not a rank in 1..={k}")))),
        })
        .collect()
}

fn ghw_cmd(a: &CodeArgs, r: &str, method: GhwMethodArg, ctx: &Ctx) -> Result<(Report, Option<Table>), CliError> {
    let code = ctx.code(a)?;
    let k = 2 * code.e();
    let ranks = parse_ranks(r, k)?;
    let mut report = Report::new(format!("code ghw --p {} --e {} --form {} --alpha {} --r {r}", a.form.field.p, a.form.field.e, a.form.form, a.alpha));
    report.field = Some(to_value(&code.field().spec()));
    report.form = Some(to_value(code.form().profile()));
    let methods: &[GhwMethod] = match method {
        GhwMethodArg::Formula => &[GhwMethod::Formula],
        GhwMethodArg::Brute => &[GhwMethod::Brute],
        GhwMethodArg::Both => &[GhwMethod::Formula, GhwMethod::Brute],
    };
    let min_weight = if code.e() >= 2 { code.weight_distribution(Method::Formula, &ctx.budget)?.min_weight() } else { None };
    let mut tables = Vec::new();
    for &m in methods {
        let table = ghw::ghw_table(&code, &ranks, m, &ctx.budget)?;
        let v = table.invariant_violations(min_weight);
        report.push(Check::new(
            format!("hierarchy invariants ({m:?})"),
            "none violated",
            if v.is_empty() { "none violated".to_string() } else { v.join("; ") },
            v.is_empty(),
        ));
        if m == GhwMethod::Brute {
            for e in &table.entries {
                let w = e.witness.as_ref().expect("brute force reports a witness");
                let n = ghw::n_of_subspace(&code, w, ghw::CountMethod::Count)?;
                report.push(Check::equal(format!("d_{} witness recount", e.r), e.max_n.unwrap_or(0), n));
            }
        }
        tables.push(table);
    }
    if tables.len() == 2 {
        for r in &ranks {
            report.push(Check::equal(format!("d_{r} formula = brute force"), tables[0].get(*r).unwrap_or(0), tables[1].get(*r).unwrap_or(0)));
        }
    }
    let mut t = Table::new(&["r", "d_r", "method"]);
    let mut rows = Vec::new();
    for table in &tables {
        for e in &table.entries {
            t.push(vec![e.r.to_string(), e.d_r.to_string(), to_value(&e.method).as_str().unwrap_or_default().to_string()]);
            rows.push(to_value(e));
        }
    }
    report.result = Some(json!({"code": to_value(&code.summary()), "e0": ghw::e0(&code), "rows": rows}));
    Ok((report, Some(t)))
}

fn check_examples(golden: Option<&PathBuf>, ctx: &Ctx) -> Result<(Report, Option<Table>), CliError> {
    let g = match golden {
        Some(path) => Golden::parse(&std::fs::read_to_string(path).map_err(|e| ConfigError::new("golden", format!("{}: {e}", path.display())))?)?,
        None => Golden::builtin(),
    };
    let mut report = Report::new("code check-examples");
    report.result = Some(json!({"examples": g.example.iter().map(|e| e.name.clone()).collect::<Vec<_>>(), "modulus": ctx.modulus}));
    suite::record(&mut report, "examples", suite::example_checks(&g, ctx.modulus.as_deref(), ctx.faults, &ctx.budget));
    Ok((report, None))
}
