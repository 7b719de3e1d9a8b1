//! Command-line front end.

use std::fs;
use std::io::{self, Write};
use std::path::PathBuf;
use std::sync::Arc;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::{json, Value};

use crate::conjectures::{sweep_exhaustive, sweep_random, sweep_size, CorId};
use crate::criteria::{canonical_r, check_main_theorem, QuadInput};
use crate::families::enumerate_families;
use crate::field::{prime_power, table_ctx, FieldCtx, FieldElem, FieldTable};
use crate::identities::{run_identities, IdentityInstance, Which};
use crate::oracle::{is_perm_fq2, table3_entries, SparsePoly};
use crate::sweep::{check_budget, family_cross_check, run_sweep, work_estimate, SweepConfig, SweepMode};

pub const EXIT_PASS: i32 = 0;
pub const EXIT_USAGE: i32 = 1;
pub const EXIT_FAIL: i32 = 2;

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum WhichArg {
    Thm81,
    Lem82,
    Cor83,
    Lem84,
    All,
}

impl From<WhichArg> for Which {
    fn from(w: WhichArg) -> Which {
        match w {
            WhichArg::Thm81 => Which::Thm81,
            WhichArg::Lem82 => Which::Lem82,
            WhichArg::Cor83 => Which::Cor83,
            WhichArg::Lem84 => Which::Lem84,
            WhichArg::All => Which::All,
        }
    }
}

#[derive(Debug, Parser)]
#[command(name = "quadperm", version, about = "Permutation quadrinomials over finite fields")]
pub struct Cli {
    /// Seed for randomized sweeps.
    #[arg(long, global = true, default_value_t = 42)]
    pub seed: u64,
    /// Worker threads; 0 lets the pool decide.
    #[arg(long, global = true, default_value_t = 0)]
    pub jobs: usize,
    /// Write the report here instead of stdout.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    pub format: Format,
    /// Extra defining polynomials, one `p N c0,c1,...,cN` record per line.
    #[arg(long = "field-poly", global = true)]
    pub field_poly: Option<PathBuf>,
    /// Render field elements as generator powers.
    #[arg(long, global = true)]
    pub pretty: bool,
    /// Largest exhaustive work estimate accepted.
    #[arg(long, global = true, default_value_t = 1u64 << 31)]
    pub budget: u64,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Args)]
pub struct Degrees {
    #[arg(long)]
    pub q: u64,
    #[arg(long = "Q")]
    pub big_q: u64,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Evaluate the criterion and the brute-force oracle on one tuple.
    Check {
        #[command(flatten)]
        deg: Degrees,
        #[arg(long)]
        r: Option<u64>,
        #[arg(long)]
        a: String,
        #[arg(long)]
        b: String,
        #[arg(long)]
        c: String,
        #[arg(long)]
        d: String,
    },
    /// Compare criterion and oracle over many tuples.
    Sweep {
        #[command(flatten)]
        deg: Degrees,
        #[arg(long)]
        r: Option<u64>,
        #[arg(long, conflicts_with = "samples")]
        exhaustive: bool,
        #[arg(long)]
        samples: Option<u64>,
    },
    /// Enumerate the explicit families.
    Families {
        #[command(flatten)]
        deg: Degrees,
        #[arg(long = "cross-check")]
        cross_check: bool,
    },
    /// Verify the dense bivariate identities.
    Identity {
        #[arg(long)]
        q: u64,
        #[arg(long)]
        n: u32,
        #[arg(long, value_enum, default_value_t = WhichArg::All)]
        which: WhichArg,
    },
    /// Sweep one corollary checker.
    Corollary {
        #[arg(long)]
        id: String,
        #[command(flatten)]
        deg: Degrees,
        #[arg(long, conflicts_with = "samples")]
        exhaustive: bool,
        #[arg(long)]
        samples: Option<u64>,
    },
    /// Test the sporadic degree-4 maps.
    Table3,
    /// Describe a field context.
    FieldInfo {
        #[arg(long)]
        q: u64,
    },
}

/// A failure with its exit code.
#[derive(Debug)]
pub struct Failure {
    pub code: i32,
    pub message: String,
}

fn usage(message: impl Into<String>) -> Failure {
    Failure { code: EXIT_USAGE, message: message.into() }
}

fn usage_err<E: std::fmt::Display>(e: E) -> Failure {
    usage(e.to_string())
}

/// A rendered report: JSON value, CSV rows and whether verification passed.
pub struct Output {
    pub json: Value,
    pub csv: String,
    pub passed: bool,
}

fn csv_of<T: Serialize>(rows: &[T]) -> Result<String, Failure> {
    let mut w = csv::Writer::from_writer(Vec::new());
    for row in rows {
        w.serialize(row).map_err(usage_err)?;
    }
    let bytes = w.into_inner().map_err(usage_err)?;
    String::from_utf8(bytes).map_err(usage_err)
}

struct Env {
    table: FieldTable,
    csv: bool,
    pretty: bool,
    seed: u64,
    budget: u64,
}

impl Env {
    fn ctx(&self, p: u32, n: u32) -> Result<Arc<FieldCtx>, Failure> {
        table_ctx(p, n, &self.table).map_err(usage_err)
    }

    fn el(&self, ctx: &FieldCtx, z: FieldElem) -> Value {
        if self.pretty {
            Value::String(ctx.pretty(z))
        } else {
            json!(z.0)
        }
    }
}

fn degrees(deg: &Degrees) -> Result<(u32, u32, u32), Failure> {
    let (p, k) = prime_power(deg.q).map_err(usage_err)?;
    let (p2, l) = prime_power(deg.big_q).map_err(usage_err)?;
    if p != p2 {
        return Err(usage("q and Q must be powers of the same prime"));
    }
    Ok((p, k, l))
}

fn parse_elem(ctx: &FieldCtx, name: &str, text: &str) -> Result<FieldElem, Failure> {
    let enc: u64 = text.trim().parse().map_err(|_| usage(format!("--{name}: malformed element {text:?}")))?;
    ctx.elem(enc).map_err(|e| usage(format!("--{name}: {e}")))
}

fn residue(q: u64, big_q: u64, r: Option<u64>) -> Result<u64, Failure> {
    match r {
        Some(r) => Ok(r),
        None => Ok(canonical_r(q, big_q).unwrap_or(match (big_q + 1) % (q + 1) {
            0 => q + 1,
            x => x,
        })),
    }
}

fn cmd_check(env: &Env, deg: &Degrees, r: Option<u64>, coeffs: [&str; 4]) -> Result<Output, Failure> {
    let (p, k, l) = degrees(deg)?;
    let ctx = env.ctx(p, 2 * k)?;
    let names = ["a", "b", "c", "d"];
    let mut t = [FieldElem::ZERO; 4];
    for i in 0..4 {
        t[i] = parse_elem(&ctx, names[i], coeffs[i])?;
    }
    let r = residue(deg.q, deg.big_q, r)?;
    let input = QuadInput::new(p, k, l, r, t);
    let report = check_main_theorem(&ctx, &input).map_err(usage_err)?;
    let oracle = is_perm_fq2(&ctx, &SparsePoly::quad(&ctx, &input), deg.q).map_err(usage_err)?;
    let agree = report.verdict == oracle.is_permutation;
    let opt = |z: Option<FieldElem>| z.map(|z| env.el(&ctx, z)).unwrap_or(Value::Null);
    let json = json!({
        "schema": 1,
        "command": "check",
        "q": deg.q,
        "Q": deg.big_q,
        "r": r,
        "coefficients": t.iter().map(|&z| env.el(&ctx, z)).collect::<Vec<_>>(),
        "criterion": {
            "verdict": report.verdict,
            "cond": report.cond,
            "e": env.el(&ctx, report.e),
            "zeta": opt(report.zeta),
            "eta": opt(report.eta),
            "theta": opt(report.theta),
        },
        "oracle": oracle.is_permutation,
        "match": agree,
    });
    let row = crate::sweep::SweepRow {
        q: deg.q,
        big_q: deg.big_q,
        r,
        a: t[0].0,
        b: t[1].0,
        c: t[2].0,
        d: t[3].0,
        criterion: report.verdict,
        oracle: oracle.is_permutation,
        agree,
    };
    Ok(Output { json, csv: csv_of(&[row])?, passed: agree })
}

fn cmd_sweep(env: &Env, deg: &Degrees, r: Option<u64>, exhaustive: bool, samples: Option<u64>) -> Result<Output, Failure> {
    let (p, k, l) = degrees(deg)?;
    let mode = match (exhaustive, samples) {
        (_, Some(n)) => SweepMode::Random { samples: n, seed: env.seed },
        (true, None) => SweepMode::Exhaustive,
        (false, None) => return Err(usage("sweep needs --exhaustive or --samples N")),
    };
    if mode == SweepMode::Exhaustive {
        check_budget(deg.q, env.budget as u128).map_err(usage_err)?;
    }
    let ctx = env.ctx(p, 2 * k)?;
    let r = residue(deg.q, deg.big_q, r)?;
    let cfg = SweepConfig { k, l, r: Some(r), mode, keep_rows: env.csv };
    let rep = run_sweep(&ctx, &cfg).map_err(usage_err)?;
    let mut json = serde_json::to_value(&rep).map_err(usage_err)?;
    json["schema"] = json!(1);
    json["command"] = json!("sweep");
    json["work_estimate"] = json!(work_estimate(deg.q).to_string());
    let csv = if env.csv { csv_of(&rep.rows)? } else { String::new() };
    Ok(Output { json, csv, passed: rep.passed() })
}

fn cmd_families(env: &Env, deg: &Degrees, cross: bool) -> Result<Output, Failure> {
    let (p, k, l) = degrees(deg)?;
    let ctx = env.ctx(p, 2 * k)?;
    let r = residue(deg.q, deg.big_q, None)?;
    let fam = enumerate_families(&ctx, k, l, r).map_err(usage_err)?;
    let cc = if cross {
        check_budget(deg.q, env.budget as u128).map_err(usage_err)?;
        Some(family_cross_check(&ctx, k, l).map_err(usage_err)?)
    } else {
        None
    };
    let passed = cc.as_ref().map(|c| c.equal).unwrap_or(true);
    let json = json!({
        "schema": 1,
        "command": "families",
        "q": deg.q,
        "Q": deg.big_q,
        "r": r,
        "case_counts": fam.case_counts,
        "total_distinct": fam.total_distinct,
        "cross_check": cc,
    });
    #[derive(Serialize)]
    struct Row<'a> {
        case: &'a str,
        count: usize,
    }
    let rows: Vec<Row> = fam.case_counts.iter().map(|(c, &n)| Row { case: c, count: n }).collect();
    Ok(Output { json, csv: csv_of(&rows)?, passed })
}

fn cmd_identity(q: u64, n: u32, which: WhichArg) -> Result<Output, Failure> {
    let rep = run_identities(q, n, which.into()).map_err(usage_err)?;
    let expected = IdentityInstance::new(q, n).map_err(usage_err)?.expected_delta_len();
    let passed = rep.all_pass() && rep.delta_len == expected;
    let mut json = serde_json::to_value(&rep).map_err(usage_err)?;
    json["schema"] = json!(1);
    json["command"] = json!("identity");
    json["expected_delta_len"] = json!(expected);
    json["pass"] = json!(passed);
    #[derive(Serialize)]
    struct Row {
        q: u64,
        n: u32,
        identity: &'static str,
        pass: bool,
    }
    let named = [
        ("thm81", rep.thm81),
        ("lem82", rep.lemma82),
        ("cor83", rep.cor83),
        ("lem84", rep.lemma84),
        ("x1_consistency", rep.x1_consistency),
        ("image_size", rep.image_size),
    ];
    let rows: Vec<Row> = named.iter().filter_map(|&(id, v)| v.map(|pass| Row { q, n, identity: id, pass })).collect();
    Ok(Output { json, csv: csv_of(&rows)?, passed })
}

fn cmd_corollary(env: &Env, id: &str, deg: &Degrees, samples: Option<u64>) -> Result<Output, Failure> {
    let id: CorId = id.parse().map_err(usage_err)?;
    let (p, k, l) = degrees(deg)?;
    if p != 2 {
        return Err(usage("corollary checkers need q and Q to be powers of 2"));
    }
    let rep = match samples {
        Some(n) => sweep_random(id, k, l, n, env.seed),
        None => {
            let size = sweep_size(id, k, l).map_err(usage_err)?;
            let work = size as u128 * (deg.q * deg.q) as u128;
            if work > env.budget as u128 {
                return Err(usage(format!("work estimate {work} exceeds the budget {}", env.budget)));
            }
            sweep_exhaustive(id, k, l)
        }
    }
    .map_err(usage_err)?;
    let passed = rep.passed();
    let mut json = serde_json::to_value(&rep).map_err(usage_err)?;
    json["schema"] = json!(1);
    json["command"] = json!("corollary");
    json["q"] = json!(deg.q);
    json["Q"] = json!(deg.big_q);
    #[derive(Serialize)]
    struct Row<'a> {
        id: &'a str,
        q: u64,
        #[serde(rename = "Q")]
        big_q: u64,
        checked: u64,
        agreements: u64,
        mismatches: usize,
    }
    let row = Row { id: id.label(), q: deg.q, big_q: deg.big_q, checked: rep.checked, agreements: rep.agreements, mismatches: rep.mismatches.len() };
    Ok(Output { json, csv: csv_of(&[row])?, passed })
}

fn cmd_table3() -> Result<Output, Failure> {
    let entries = table3_entries().map_err(usage_err)?;
    let passed = entries.iter().all(|e| e.permutes);
    #[derive(Serialize)]
    struct Row<'a> {
        q: u64,
        label: &'a str,
        parameter: Option<u32>,
        permutes: bool,
    }
    let rows: Vec<Row> = entries.iter().map(|e| Row { q: e.q, label: &e.label, parameter: e.parameter.map(|z| z.0), permutes: e.permutes }).collect();
    let json = json!({
        "schema": 1,
        "command": "table3",
        "entries": serde_json::to_value(&rows).map_err(usage_err)?,
        "passed": entries.iter().filter(|e| e.permutes).count(),
        "total": entries.len(),
    });
    Ok(Output { json, csv: csv_of(&rows)?, passed })
}

fn cmd_field_info(env: &Env, q: u64) -> Result<Output, Failure> {
    let (p, n) = prime_power(q).map_err(usage_err)?;
    let ctx = env.ctx(p, n)?;
    let subfields: Vec<u32> = (1..=n).filter(|d| n % d == 0).collect();
    let json = json!({
        "schema": 1,
        "command": "field-info",
        "p": p,
        "n": n,
        "size": ctx.size(),
        "modulus": ctx.spec().irred,
        "primitive": env.el(&ctx, ctx.primitive()),
        "log_tables": ctx.has_log_tables(),
        "subfield_degrees": subfields,
    });
    #[derive(Serialize)]
    struct Row {
        p: u32,
        n: u32,
        size: u32,
        primitive: u32,
    }
    let csv = csv_of(&[Row { p, n, size: ctx.size(), primitive: ctx.primitive().0 }])?;
    Ok(Output { json, csv, passed: true })
}

/// Runs a parsed command line and returns its report.
pub fn execute(cli: &Cli) -> Result<Output, Failure> {
    let mut table = FieldTable::defaults().clone();
    if let Some(path) = &cli.field_poly {
        let text = fs::read_to_string(path).map_err(|e| usage(format!("{}: {e}", path.display())))?;
        table = table.merged_with(&FieldTable::parse(&text).map_err(usage_err)?);
    }
    let env = Env { table, csv: cli.format == Format::Csv, pretty: cli.pretty, seed: cli.seed, budget: cli.budget };
    match &cli.command {
        Command::Check { deg, r, a, b, c, d } => cmd_check(&env, deg, *r, [a, b, c, d]),
        Command::Sweep { deg, r, exhaustive, samples } => cmd_sweep(&env, deg, *r, *exhaustive, *samples),
        Command::Families { deg, cross_check } => cmd_families(&env, deg, *cross_check),
        Command::Identity { q, n, which } => cmd_identity(*q, *n, *which),
        Command::Corollary { id, deg, samples, .. } => cmd_corollary(&env, id, deg, *samples),
        Command::Table3 => cmd_table3(),
        Command::FieldInfo { q } => cmd_field_info(&env, *q),
    }
}

fn emit(cli: &Cli, out: &Output) -> io::Result<()> {
    let text = match cli.format {
        Format::Json => serde_json::to_string_pretty(&out.json).expect("json") + "\n",
        Format::Csv => out.csv.clone(),
    };
    match &cli.out {
        Some(path) => fs::write(path, text),
        None => io::stdout().lock().write_all(text.as_bytes()),
    }
}

/// Parses `args`, runs the command and returns the process exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_PASS };
            let _ = e.print();
            return code;
        }
    };
    if cli.jobs > 0 {
        let _ = rayon::ThreadPoolBuilder::new().num_threads(cli.jobs).build_global();
    }
    match execute(&cli) {
        Ok(out) => {
            if let Err(e) = emit(&cli, &out) {
                eprintln!("error: {e}");
                return EXIT_USAGE;
            }
            if out.passed {
                EXIT_PASS
            } else {
                EXIT_FAIL
            }
        }
        Err(f) => {
            eprintln!("error: {}", f.message);
            f.code
        }
    }
}
