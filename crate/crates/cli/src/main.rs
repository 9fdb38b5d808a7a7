mod fmt;
mod repro;

use std::fs;
use std::io::{self, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{ArgMatches, Args, CommandFactory, FromArgMatches, Parser, Subcommand, ValueEnum};
use nsdistill::distill::sweep::{argmax, argmax_gap, chsh_curve, write_csv};
use nsdistill::distill::{peak_chsh_lambda, sweep, Axis, DistillError, Grid, Quantity, SweepRecord};
use nsdistill::nsbox::catalog::{catalog_names, named_box};
use nsdistill::nsbox::json::{parse_table, to_json, BehaviorFile};
use nsdistill::nsbox::{
    canonicalize, decompose_simplex, hardy_test, validate, Behavior, NsError, Table,
    DEFAULT_HARDY_TOL, SIMPLEX_BASIS,
};
use nsdistill::pqdetect::detect_all;
use nsdistill::wiring::{monte_carlo_wire, wire, wire_chain, WiringError, WiringMethod};

#[derive(Parser)]
#[command(name = "nsdistill", version, about = "No-signaling boxes and OR-AND nonlocality distillation")]
struct Cli {
    /// Worker threads for sweeps and sampling (default: all cores).
    #[arg(long, global = true, env = "NSDISTILL_THREADS")]
    threads: Option<usize>,
    /// Print numbers with 17 significant digits instead of 6.
    #[arg(long, global = true)]
    full_precision: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Inspect a single box.
    Box {
        #[arg(value_enum)]
        action: BoxAction,
        #[command(flatten)]
        source: Source,
        /// Emit JSON instead of text.
        #[arg(long)]
        json: bool,
    },
    /// Wire boxes with the OR-AND protocol.
    Wire(WireArgs),
    /// Evaluate a quantity over a parameter grid and write CSV.
    Sweep(SweepArgs),
    /// Run the post-quantum detector battery.
    Detect {
        #[command(flatten)]
        source: Source,
        #[arg(long, default_value_t = 20)]
        max_copies: u64,
        /// Exit with status 3 when no detector is positive.
        #[arg(long)]
        assert_postquantum: bool,
    },
    /// Re-run a published result and compare against its expected values.
    Reproduce {
        /// One of the reproduction keys, or `all`.
        key: String,
    },
    /// List catalog box names.
    List,
}

#[derive(Clone, Copy, ValueEnum)]
enum BoxAction {
    Show,
    Validate,
    Decompose,
    Canonicalize,
}

#[derive(Args)]
#[group(required = true, multiple = false)]
struct Source {
    /// Catalog box name (see `list`).
    #[arg(long)]
    name: Option<String>,
    /// Behavior JSON file.
    #[arg(long)]
    input: Option<PathBuf>,
}

#[derive(Clone, Copy, PartialEq, ValueEnum)]
enum Method {
    Closed,
    Chain,
    Mc,
}

#[derive(Args)]
struct WireArgs {
    /// Catalog box; repeatable, combined with --input in command-line order.
    #[arg(long)]
    name: Vec<String>,
    /// Behavior JSON file; repeatable.
    #[arg(long)]
    input: Vec<PathBuf>,
    /// Number of copies of a single parent.
    #[arg(long)]
    copies: Option<u64>,
    #[arg(long, value_enum, default_value_t = Method::Closed)]
    method: Method,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = 1_000_000)]
    rounds: u64,
    /// Write the child behavior JSON here.
    #[arg(long)]
    output: Option<PathBuf>,
    #[arg(long)]
    json: bool,
}

#[derive(Args)]
struct SweepArgs {
    /// gap | limit | mixture | chsh-n
    #[arg(long)]
    quantity: String,
    /// Axis as `min:max:count` or a single value.
    #[arg(long)]
    r: Option<String>,
    #[arg(long)]
    s: Option<String>,
    #[arg(long)]
    lambda: Option<String>,
    /// With chsh-n at a single λ: emit the CHSH curve for copy counts around the peak.
    #[arg(long)]
    n_around_peak: bool,
    /// CSV destination (default: stdout).
    #[arg(long)]
    output: Option<PathBuf>,
}

enum Failure {
    Invalid(String),
    Usage(String),
    Assertion(String),
    Reproduction,
}

impl Failure {
    fn code(&self) -> u8 {
        match self {
            Failure::Invalid(_) => 1,
            Failure::Usage(_) => 2,
            Failure::Assertion(_) => 3,
            Failure::Reproduction => 4,
        }
    }
}

impl From<NsError> for Failure {
    fn from(e: NsError) -> Self {
        match e {
            NsError::Invalid(_) | NsError::NotInSimplex { .. } | NsError::Weight(_) => Failure::Invalid(e.to_string()),
            NsError::UnknownName(_) | NsError::Schema(_) => Failure::Usage(e.to_string()),
        }
    }
}

impl From<WiringError> for Failure {
    fn from(e: WiringError) -> Self {
        match e {
            WiringError::Ns(inner) => inner.into(),
            other => Failure::Usage(other.to_string()),
        }
    }
}

impl From<DistillError> for Failure {
    fn from(e: DistillError) -> Self {
        match e {
            DistillError::Ns(inner) => inner.into(),
            other => Failure::Usage(other.to_string()),
        }
    }
}

impl From<io::Error> for Failure {
    fn from(e: io::Error) -> Self {
        Failure::Usage(format!("io: {e}"))
    }
}

struct Ctx {
    digits: usize,
}

impl Ctx {
    fn num(&self, v: f64) -> String {
        fmt::num(v, self.digits)
    }

    fn print_table(&self, p: &Table) {
        println!("xy\\ab        00          01          10          11");
        for (i, row) in p.iter().enumerate() {
            let cells: Vec<String> = row.iter().map(|v| format!("{:>11}", self.num(*v))).collect();
            println!("{}{}  {}", i >> 1, i & 1, cells.join(" "));
        }
    }
}

fn read_text(path: &PathBuf) -> Result<String, Failure> {
    fs::read_to_string(path).map_err(|e| Failure::Usage(format!("{}: {e}", path.display())))
}

fn load(name: Option<&str>, input: Option<&PathBuf>) -> Result<Behavior, Failure> {
    match (name, input) {
        (Some(n), _) => Ok(named_box(n)?),
        (None, Some(p)) => Ok(Behavior::new(parse_table(&read_text(p)?)?)?),
        (None, None) => Err(Failure::Usage("no input box given".into())),
    }
}

fn cmd_box(ctx: &Ctx, action: BoxAction, source: &Source, json: bool) -> Result<(), Failure> {
    if let BoxAction::Validate = action {
        let table = match (&source.name, &source.input) {
            (Some(n), _) => *named_box(n)?.table(),
            (None, Some(p)) => parse_table(&read_text(p)?)?,
            _ => unreachable!("clap enforces exactly one source"),
        };
        let report = validate(&table);
        if json {
            let list: Vec<String> = report.violations.iter().map(|v| v.to_string()).collect();
            println!("{}", serde_json::json!({ "valid": report.is_empty(), "violations": list }));
        } else {
            println!("{report}");
        }
        return if report.is_empty() {
            Ok(())
        } else {
            Err(Failure::Invalid(report.to_string()))
        };
    }
    let b = load(source.name.as_deref(), source.input.as_ref())?;
    match action {
        BoxAction::Show => {
            if json {
                println!("{}", to_json(&b));
            } else {
                ctx.print_table(b.table());
                let h = hardy_test(&b, DEFAULT_HARDY_TOL);
                println!("chsh {}", ctx.num(b.chsh()));
                println!("hardy success {} ({})", ctx.num(h.success), if h.is_hardy { "hardy" } else { "not hardy" });
            }
        }
        BoxAction::Decompose => {
            let c = decompose_simplex(&b)?;
            if json {
                println!("{}", serde_json::json!({ "weights": c.weights, "residual": c.residual }));
            } else {
                for (i, (w, id)) in c.weights.iter().zip(SIMPLEX_BASIS).enumerate() {
                    let label = if i == 0 { "P_NL".to_string() } else { format!("P_L{i}") };
                    println!("c{i} {label:<5} {:<8} {}", id.name(), ctx.num(*w));
                }
                println!("residual {}", ctx.num(c.residual));
            }
        }
        BoxAction::Canonicalize => {
            let canon = canonicalize(&b);
            let r = canon.relabeling;
            if json {
                println!(
                    "{}",
                    serde_json::json!({
                        "relabeling": r.code(),
                        "chsh_max": canon.chsh_max,
                        "behavior": serde_json::from_str::<serde_json::Value>(&to_json(&canon.behavior)).expect("valid json"),
                    })
                );
            } else {
                println!(
                    "relabeling {} (swap={} input_a={} input_b={} output_a={:?} output_b={:?})",
                    r.code(),
                    r.swap_parties,
                    r.flip_input_a,
                    r.flip_input_b,
                    r.flip_output_a,
                    r.flip_output_b
                );
                println!("chsh_max {}", ctx.num(canon.chsh_max));
                ctx.print_table(canon.behavior.table());
            }
        }
        BoxAction::Validate => unreachable!(),
    }
    Ok(())
}

/// Parents of `wire` in command-line order, interleaving `--name` and `--input`.
fn wire_parents(matches: &ArgMatches, args: &WireArgs) -> Result<Vec<Behavior>, Failure> {
    let mut tagged: Vec<(usize, Behavior)> = Vec::new();
    if let Some(idx) = matches.indices_of("name") {
        for (i, name) in idx.zip(&args.name) {
            tagged.push((i, load(Some(name), None)?));
        }
    }
    if let Some(idx) = matches.indices_of("input") {
        for (i, path) in idx.zip(&args.input) {
            tagged.push((i, load(None, Some(path))?));
        }
    }
    tagged.sort_by_key(|(i, _)| *i);
    let parents: Vec<Behavior> = tagged.into_iter().map(|(_, b)| b).collect();
    if parents.is_empty() {
        return Err(Failure::Usage("wire needs at least one --name or --input".into()));
    }
    match args.copies {
        Some(0) => Err(Failure::Usage("--copies must be at least 1".into())),
        Some(n) if parents.len() == 1 => Ok(vec![parents[0]; n as usize]),
        Some(_) => Err(Failure::Usage("--copies takes a single parent".into())),
        None => Ok(parents),
    }
}

/// CHSH `⟨00⟩ − ⟨01⟩ − ⟨10⟩ − ⟨11⟩` of a raw table (sampled tables need not be
/// exactly no-signaling).
fn table_chsh(p: &Table) -> f64 {
    let e: Vec<f64> = p.iter().map(|r| r[0] - r[1] - r[2] + r[3]).collect();
    e[0] - e[1] - e[2] - e[3]
}

fn cmd_wire(ctx: &Ctx, matches: &ArgMatches, args: &WireArgs) -> Result<(), Failure> {
    let parents = wire_parents(matches, args)?;
    let n = parents.len();
    let (table, method, sampled) = match args.method {
        Method::Closed => {
            let res = wire(&parents)?;
            let method = match res.method {
                WiringMethod::ClosedForm => "closed",
                _ => "chain",
            };
            (*res.child.table(), method, None)
        }
        Method::Chain => (*wire_chain(&parents)?.table(), "chain", None),
        Method::Mc => {
            let emp = monte_carlo_wire(&parents, args.rounds, args.seed)?;
            let z = emp.max_z_score(&wire(&parents)?.child);
            (emp.freq, "mc", Some((emp.rounds, z)))
        }
    };
    if let Some(path) = &args.output {
        let text = serde_json::to_string(&BehaviorFile::new(table)).expect("plain data");
        fs::write(path, text + "\n")?;
    }
    let chsh = table_chsh(&table);
    let hardy = table[0][0];
    if args.json {
        let mut v = serde_json::json!({
            "parents": n,
            "method": method,
            "chsh": chsh,
            "hardy_success": hardy,
            "child": BehaviorFile::new(table),
        });
        if let Some((rounds, z)) = sampled {
            v["rounds"] = serde_json::json!(rounds);
            v["seed"] = serde_json::json!(args.seed);
            v["max_z_score"] = serde_json::json!(z);
        }
        println!("{v}");
    } else {
        println!("parents {n} method {method}");
        if let Some((rounds, _)) = sampled {
            println!("rounds {rounds} seed {}", args.seed);
        }
        ctx.print_table(&table);
        if let Some((_, z)) = sampled {
            println!("max z-score vs exact {}", ctx.num(z));
        }
        println!("chsh {}", ctx.num(chsh));
        println!("hardy {}", ctx.num(hardy));
    }
    Ok(())
}

fn parse_axis(v: &Option<String>) -> Result<Option<Axis>, Failure> {
    v.as_deref().map(|s| s.parse::<Axis>()).transpose().map_err(Failure::from)
}

/// Copy counts from 1 to three times the peak, 60 evenly spaced points plus the peak.
fn around_peak(n_opt: u64) -> Vec<u64> {
    let mut ns: Vec<u64> = (1..=60u64).map(|k| (n_opt * k / 20).max(1)).collect();
    ns.push(n_opt);
    ns.sort_unstable();
    ns.dedup();
    ns
}

fn cmd_sweep(ctx: &Ctx, args: &SweepArgs) -> Result<(), Failure> {
    let quantity: Quantity = args.quantity.parse()?;
    let grid = Grid {
        r: parse_axis(&args.r)?,
        s: parse_axis(&args.s)?,
        lambda: parse_axis(&args.lambda)?,
    };
    let records: Vec<SweepRecord> = if args.n_around_peak {
        let Some(Axis::Point(lambda)) = grid.lambda.filter(|_| quantity == Quantity::ChshPeak) else {
            return Err(Failure::Usage("--n-around-peak needs --quantity chsh-n and a single --lambda".into()));
        };
        if grid.r.is_some() || grid.s.is_some() {
            return Err(Failure::Usage("--n-around-peak takes no r or s axis".into()));
        }
        let peak = peak_chsh_lambda(lambda)?;
        chsh_curve(lambda, &around_peak(peak.n_opt))?
    } else {
        sweep(&grid, quantity)?
    };
    match &args.output {
        Some(path) => write_csv(&records, fs::File::create(path)?)?,
        None => write_csv(&records, io::stdout().lock())?,
    }
    let best = if quantity == Quantity::Gap { argmax_gap(&records) } else { argmax(&records) };
    if let Some(best) = best {
        let opt = |v: Option<f64>| v.map(|x| ctx.num(x)).unwrap_or_else(|| "-".into());
        let line = format!(
            "max {} {} at r={} s={} lambda={} n_opt={}",
            if quantity == Quantity::Gap { "gap" } else { "value" },
            ctx.num(if quantity == Quantity::Gap { best.gap } else { best.distilled_value }),
            opt(best.r),
            opt(best.s),
            opt(best.lambda),
            best.n_opt.map(|n| n.to_string()).unwrap_or_else(|| "-".into()),
        );
        // keep stdout pure CSV when it carries the data
        if args.output.is_some() {
            println!("{} records; {line}", records.len());
        } else {
            eprintln!("{} records; {line}", records.len());
        }
    }
    Ok(())
}

fn cmd_detect(source: &Source, max_copies: u64, assert_pq: bool) -> Result<(), Failure> {
    let b = load(source.name.as_deref(), source.input.as_ref())?;
    let verdicts = detect_all(&b, max_copies).map_err(|e| Failure::Usage(e.to_string()))?;
    println!("{}", serde_json::to_string_pretty(&verdicts).expect("plain data"));
    if assert_pq && !verdicts.iter().any(|v| v.positive) {
        return Err(Failure::Assertion("no detector certified the box as post-quantum".into()));
    }
    Ok(())
}

fn cmd_reproduce(ctx: &Ctx, key: &str) -> Result<(), Failure> {
    let keys: Vec<&str> = if key == "all" {
        repro::KEYS.to_vec()
    } else if repro::KEYS.contains(&key) {
        vec![key]
    } else {
        return Err(Failure::Usage(format!(
            "unknown key {key:?}; expected one of {} or all",
            repro::KEYS.join(", ")
        )));
    };
    let fmt_num = |v: f64| ctx.num(v);
    let mut failed = 0;
    let mut total = 0;
    let mut out = io::stdout().lock();
    writeln!(out, "{:<18} {:<40} {:>14}  {:<24} status", "key", "check", "observed", "expected")?;
    for k in keys {
        for row in repro::run(k).expect("key checked above") {
            total += 1;
            let pass = row.pass();
            if !pass {
                failed += 1;
            }
            let observed = if row.is_flag { (row.observed != 0.0).to_string() } else { ctx.num(row.observed) };
            writeln!(
                out,
                "{:<18} {:<40} {:>14}  {:<24} {}",
                row.key,
                row.label,
                observed,
                row.expected.describe(&fmt_num),
                if pass { "pass" } else { "FAIL" }
            )?;
        }
        out.flush()?;
    }
    writeln!(out, "{}/{} checks pass", total - failed, total)?;
    if failed > 0 {
        Err(Failure::Reproduction)
    } else {
        Ok(())
    }
}

fn run(cli: &Cli, matches: &ArgMatches) -> Result<(), Failure> {
    if let Some(n) = cli.threads {
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| Failure::Usage(format!("thread pool: {e}")))?;
    }
    let ctx = Ctx { digits: if cli.full_precision { 17 } else { 6 } };
    match &cli.command {
        Command::Box { action, source, json } => cmd_box(&ctx, *action, source, *json),
        Command::Wire(args) => {
            let sub = matches.subcommand_matches("wire").expect("wire subcommand");
            cmd_wire(&ctx, sub, args)
        }
        Command::Sweep(args) => cmd_sweep(&ctx, args),
        Command::Detect { source, max_copies, assert_postquantum } => {
            cmd_detect(source, *max_copies, *assert_postquantum)
        }
        Command::Reproduce { key } => cmd_reproduce(&ctx, key),
        Command::List => {
            for name in catalog_names() {
                println!("{name}");
            }
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    let matches = Cli::command().get_matches();
    let cli = match Cli::from_arg_matches(&matches) {
        Ok(cli) => cli,
        Err(e) => e.exit(),
    };
    match run(&cli, &matches) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            match &f {
                Failure::Invalid(m) | Failure::Usage(m) | Failure::Assertion(m) => eprintln!("error: {m}"),
                Failure::Reproduction => eprintln!("error: reproduction mismatch"),
            }
            ExitCode::from(f.code())
        }
    }
}
