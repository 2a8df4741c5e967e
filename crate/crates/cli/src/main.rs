//! `hampack` command-line front end.
//!
//! Exit codes: 0 success (solve finished), 1 usage or input error,
//! 2 solve stopped by its budget, 3 a check failed (verification or table
//! mismatch).

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Duration;

use clap::{Parser, Subcommand, ValueEnum};

use hampack::bounds::{default_anchors, propagate_bounds, BoundLedger, Grid, LedgerKey, RuleTable};
use hampack::branch::{audit_branch, enumerate_branches, packing_number_traced};
use hampack::code::SeedChoice;
use hampack::emit::{emit, EmitOptions, Format};
use hampack::model::read_solution;
use hampack::solver::solve_forced_with;
use hampack::tables::reproduce_tables;
use hampack::{
    build_full, build_pair, build_profile_forbidding, build_reduced, build_zero_fixed,
    connectify_traced, contact_graph, is_connected, model_stats, verify, Code, Error,
    MarginalProfile, MixedSpace, PackingModel, SolveBudget, SolveOptions, SolveResult,
    SolveStatus,
};

#[derive(Parser, Debug)]
#[command(name = "hampack", version, about = "Maximal mixed Hamming packings")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum ModelArg {
    Full,
    Zero,
    Reduced,
    Pair,
    Forbid,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum FormatArg {
    Lp,
    Mps,
}

#[derive(clap::Args, Debug)]
struct SpaceArgs {
    /// Space as comma-separated k^alpha terms with increasing k, e.g. 2^7,3^1
    #[arg(long)]
    space: String,
    /// Minimum distance
    #[arg(short = 'd', long = "distance")]
    d: usize,
}

#[derive(clap::Args, Debug)]
struct RunArgs {
    /// Wall-clock budget in seconds
    #[arg(long, default_value_t = 600.0)]
    budget: f64,
    /// Ignore the time budget entirely
    #[arg(long)]
    unbounded: bool,
    /// Stop after this many search nodes
    #[arg(long)]
    nodes: Option<u64>,
    /// Worker threads (0 = all cores)
    #[arg(long, default_value_t = 0)]
    threads: usize,
    /// Print progress lines to standard error
    #[arg(long)]
    progress: bool,
}

impl RunArgs {
    fn budget(&self) -> SolveBudget {
        SolveBudget {
            time_limit: (!self.unbounded).then(|| Duration::from_secs_f64(self.budget.max(0.0))),
            node_limit: self.nodes,
            lower_bound: None,
        }
    }

    fn options(&self) -> SolveOptions {
        SolveOptions {
            threads: self.threads,
            progress: self.progress,
            ..SolveOptions::default()
        }
    }
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Compute the packing number, optionally with pinned words
    Solve {
        #[command(flatten)]
        space: SpaceArgs,
        #[command(flatten)]
        run: RunArgs,
        /// Comma-separated words that must be in the packing
        #[arg(long, value_delimiter = ',')]
        force: Vec<String>,
        /// Known achievable size; only larger packings are searched for
        #[arg(long)]
        lower_bound: Option<usize>,
        /// Print only the JSON report
        #[arg(long)]
        json: bool,
    },
    /// Write a packing model as an LP or MPS file
    Emit {
        #[command(flatten)]
        space: SpaceArgs,
        #[arg(long, value_enum)]
        model: ModelArg,
        /// Second pinned word for the pair model
        #[arg(long)]
        second: Option<String>,
        /// Forbidden contact profile, largest alphabet first (e.g. 0,3)
        #[arg(long, value_delimiter = ',')]
        profile: Vec<usize>,
        #[arg(long, value_enum, default_value = "lp")]
        format: FormatArg,
        /// Emit pinned words as equality rows
        #[arg(long)]
        include_fixed: bool,
        /// Output path (standard output when omitted)
        #[arg(short = 'o', long)]
        output: Option<PathBuf>,
    },
    /// Check the minimum distance of a code file or an external solution
    Verify {
        #[command(flatten)]
        space: SpaceArgs,
        /// Code file: one word per line, `#` comments
        #[arg(long, required_unless_present = "solution")]
        code: Option<PathBuf>,
        /// Solver output with `x_<word> value` lines for an emitted pair model
        #[arg(long, requires = "second")]
        solution: Option<PathBuf>,
        /// Second pinned word of the pair model the solution belongs to
        #[arg(long)]
        second: Option<String>,
        #[arg(long)]
        json: bool,
    },
    /// Rewrite a code so its contact graph is connected
    Connectify {
        #[command(flatten)]
        space: SpaceArgs,
        #[arg(long)]
        code: PathBuf,
        #[arg(short = 'o', long)]
        output: Option<PathBuf>,
        /// Pick the starting word at random from this seed
        #[arg(long)]
        seed: Option<u64>,
    },
    /// List the canonical second words for pair branching
    Branches {
        #[command(flatten)]
        space: SpaceArgs,
    },
    /// Decide whether a contact profile is unavoidable above a known size
    Audit {
        #[command(flatten)]
        space: SpaceArgs,
        #[command(flatten)]
        run: RunArgs,
        /// Contact profile, largest alphabet first (e.g. 0,3)
        #[arg(long, value_delimiter = ',', required = true)]
        profile: Vec<usize>,
        /// Size of a known packing
        #[arg(long)]
        known_lower: usize,
    },
    /// Propagate upper bounds from anchors over a binary-ternary grid
    Bounds {
        /// Ledger file with anchor lines (built-in anchors when omitted)
        #[arg(long)]
        anchors: Option<PathBuf>,
        /// Rule names to apply
        #[arg(long, value_delimiter = ',', default_value = "ii,iv,vi")]
        rules: Vec<String>,
        /// Rule table file replacing the built-in one
        #[arg(long)]
        rule_table: Option<PathBuf>,
        /// Grid as b-range x t-range, e.g. 1-10x1-5
        #[arg(long, default_value = "1-10x1-5")]
        grid: String,
        /// Distance range, e.g. 3-4
        #[arg(short = 'd', long = "distance", default_value = "3-4")]
        d: String,
        /// Write the resulting ledger here
        #[arg(short = 'o', long)]
        output: Option<PathBuf>,
        #[arg(long)]
        json: bool,
    },
    /// Recompute every cell of the reference tables
    Tables {
        #[arg(long, default_value_t = 0)]
        threads: usize,
        #[arg(long)]
        json: bool,
    },
}

#[derive(Debug)]
enum Failure {
    Usage(String),
    Check(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Usage(e.to_string())
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        Failure::Usage(e.to_string())
    }
}

type CmdResult = Result<ExitCode, Failure>;

fn read(path: &Path) -> Result<String, Failure> {
    fs::read_to_string(path).map_err(|e| Failure::Usage(format!("{}: {e}", path.display())))
}

fn write_output(output: Option<&Path>, text: &str) -> Result<(), Failure> {
    match output {
        Some(p) => fs::write(p, text).map_err(|e| Failure::Usage(format!("{}: {e}", p.display()))),
        None => {
            std::io::stdout().write_all(text.as_bytes())?;
            Ok(())
        }
    }
}

fn parse_range(text: &str) -> Result<std::ops::RangeInclusive<usize>, Failure> {
    let bad = || Failure::Usage(format!("`{text}` is not a range like 3-4 or 3"));
    let (lo, hi) = text.split_once('-').unwrap_or((text, text));
    let lo: usize = lo.trim().parse().map_err(|_| bad())?;
    let hi: usize = hi.trim().parse().map_err(|_| bad())?;
    if lo > hi {
        return Err(bad());
    }
    Ok(lo..=hi)
}

fn exit_for(status: SolveStatus) -> ExitCode {
    match status {
        SolveStatus::BudgetExhausted => ExitCode::from(2),
        _ => ExitCode::SUCCESS,
    }
}

fn print_result(result: &SolveResult, json: bool) {
    if !json {
        println!("status    {}", result.status);
        println!("value     {}", result.best_value);
        println!("bound     {}", result.upper_bound);
        println!("nodes     {}", result.node_count);
        println!("elapsed   {:.3}s", result.elapsed.as_secs_f64());
        let words: Vec<String> = result.witness.words().iter().map(|w| w.to_string()).collect();
        println!("witness   {}", words.join(" "));
    }
    println!("{}", result.to_json());
}

fn cmd_solve(
    space: &SpaceArgs,
    run: &RunArgs,
    force: &[String],
    lower_bound: Option<usize>,
    json: bool,
) -> CmdResult {
    let s = MixedSpace::parse(&space.space)?;
    if space.d == 0 {
        return Err(Failure::Usage("distance must be at least 1".into()));
    }
    let mut budget = run.budget();
    budget.lower_bound = lower_bound;
    let result = if force.is_empty() {
        let trace = packing_number_traced(&s, space.d, budget, run.options())?;
        if !json {
            for b in &trace.branches {
                println!(
                    "branch    {} profile {:?}  {} value {} bound {}",
                    b.second, b.profile, b.status, b.value, b.bound
                );
            }
        }
        trace.result
    } else {
        let words = force
            .iter()
            .map(|w| s.parse_word(w))
            .collect::<Result<Vec<_>, _>>()?;
        let model = build_full(&s, space.d)?;
        solve_forced_with(&model, &words, budget, run.options())?
    };
    print_result(&result, json);
    Ok(exit_for(result.status))
}

fn build_model(
    s: &MixedSpace,
    d: usize,
    kind: ModelArg,
    second: Option<&str>,
    profile: &[usize],
) -> Result<PackingModel, Failure> {
    Ok(match kind {
        ModelArg::Full => build_full(s, d)?,
        ModelArg::Zero => build_zero_fixed(s, d)?,
        ModelArg::Reduced => build_reduced(s, d)?,
        ModelArg::Pair => {
            let second = second.ok_or_else(|| Failure::Usage("--model pair needs --second".into()))?;
            build_pair(s, d, &s.parse_word(second)?)?
        }
        ModelArg::Forbid => {
            if profile.is_empty() {
                return Err(Failure::Usage("--model forbid needs --profile".into()));
            }
            build_profile_forbidding(s, d, &MarginalProfile::from_printed(s, profile)?)?
        }
    })
}

fn cmd_emit(
    space: &SpaceArgs,
    model: ModelArg,
    second: Option<&str>,
    profile: &[usize],
    format: FormatArg,
    include_fixed: bool,
    output: Option<&Path>,
) -> CmdResult {
    let s = MixedSpace::parse(&space.space)?;
    let m = build_model(&s, space.d, model, second, profile)?;
    let format = match format {
        FormatArg::Lp => Format::Lp,
        FormatArg::Mps => Format::Mps,
    };
    let opts = EmitOptions { include_fixed };
    let bytes = match output {
        Some(p) => {
            let mut f = fs::File::create(p).map_err(|e| Failure::Usage(format!("{}: {e}", p.display())))?;
            emit(&m, format, &mut f, opts)?
        }
        None => emit(&m, format, &mut std::io::stdout().lock(), opts)?,
    };
    let st = model_stats(&m);
    eprintln!(
        "{} model: {} binary variables, {} conflict rows, {} pinned to one, {} pinned to zero, {bytes} bytes",
        m.kind(),
        st.free,
        st.conflicts,
        st.fixed_one,
        st.fixed_zero
    );
    Ok(ExitCode::SUCCESS)
}

fn cmd_verify(
    space: &SpaceArgs,
    code: Option<&Path>,
    solution: Option<&Path>,
    second: Option<&str>,
    json: bool,
) -> CmdResult {
    let s = MixedSpace::parse(&space.space)?;
    let code = match (code, solution) {
        (Some(path), _) => Code::parse(&s, &read(path)?)?,
        (None, Some(path)) => {
            let second = second.ok_or_else(|| Failure::Usage("--solution needs --second".into()))?;
            let model = build_pair(&s, space.d, &s.parse_word(second)?)?;
            read_solution(&model, &read(path)?)?
        }
        (None, None) => return Err(Failure::Usage("give --code or --solution".into())),
    };
    let report = verify(&code, space.d);
    if json {
        println!("{}", serde_json::to_string_pretty(&report).expect("serialisable"));
    } else {
        println!("{report}");
        if report.passed && !code.is_empty() {
            let g = contact_graph(&code, space.d)?;
            println!(
                "contacts     {} edges, {}",
                g.edge_count(),
                if is_connected(&g)? { "connected" } else { "disconnected" }
            );
        }
    }
    if report.passed {
        Ok(ExitCode::SUCCESS)
    } else {
        Err(Failure::Check(format!("{} violating pairs", report.violations.len())))
    }
}

fn cmd_connectify(space: &SpaceArgs, code: &Path, output: Option<&Path>, seed: Option<u64>) -> CmdResult {
    let s = MixedSpace::parse(&space.space)?;
    let code = Code::parse(&s, &read(code)?)?;
    let seed = seed.map_or(SeedChoice::Smallest, SeedChoice::Random);
    let trace = connectify_traced(&code, space.d, seed)?;
    let swaps = trace.steps.iter().filter(|s| s.swap.is_some()).count();
    eprintln!(
        "{} words, {} iterations, {swaps} symbol swaps",
        trace.code.len(),
        trace.steps.len()
    );
    write_output(output, &trace.code.to_text())?;
    Ok(ExitCode::SUCCESS)
}

fn cmd_branches(space: &SpaceArgs) -> CmdResult {
    let s = MixedSpace::parse(&space.space)?;
    let branches = enumerate_branches(&s, space.d);
    let header: Vec<String> = s.blocks().iter().rev().map(|b| format!("m[{}]", b.alphabet)).collect();
    println!("{:<4} {:<16} {}", "#", "second word", header.join(" "));
    for (i, b) in branches.iter().enumerate() {
        let parts: Vec<String> = b
            .profile
            .printed()
            .iter()
            .zip(&header)
            .map(|(m, h)| format!("{m:>w$}", w = h.len()))
            .collect();
        println!("{:<4} {:<16} {}", i + 1, b.second.to_string(), parts.join(" "));
    }
    println!("{} branches", branches.len());
    Ok(ExitCode::SUCCESS)
}

fn cmd_audit(space: &SpaceArgs, run: &RunArgs, profile: &[usize], known_lower: usize) -> CmdResult {
    let s = MixedSpace::parse(&space.space)?;
    let p = MarginalProfile::from_printed(&s, profile)?;
    let report = audit_branch(&s, space.d, &p, known_lower, run.budget(), run.options())?;
    println!("{}", serde_json::to_string_pretty(&report).expect("serialisable"));
    Ok(ExitCode::SUCCESS)
}

#[allow(clippy::too_many_arguments)]
fn cmd_bounds(
    anchors: Option<&Path>,
    rules: &[String],
    rule_table: Option<&Path>,
    grid: &str,
    d: &str,
    output: Option<&Path>,
    json: bool,
) -> CmdResult {
    let ledger = match anchors {
        Some(p) => BoundLedger::parse(&read(p)?)?,
        None => default_anchors(),
    };
    let table = match rule_table {
        Some(p) => RuleTable::parse(&read(p)?)?,
        None => RuleTable::default(),
    };
    let names: Vec<&str> = rules.iter().map(String::as_str).collect();
    let table = table.select(&names)?;
    let (b, t) = grid
        .split_once('x')
        .ok_or_else(|| Failure::Usage(format!("grid `{grid}` should look like 1-10x1-5")))?;
    let (b, t, d) = (parse_range(b)?, parse_range(t)?, parse_range(d)?);
    let result = propagate_bounds(&ledger, &table, &Grid::binary_ternary(b.clone(), t.clone(), d.clone()))?;

    if let Some(p) = output {
        fs::write(p, result.to_text()).map_err(|e| Failure::Usage(format!("{}: {e}", p.display())))?;
    }
    if json {
        let entries: Vec<serde_json::Value> = result
            .iter()
            .map(|(k, e)| {
                serde_json::json!({
                    "space": k.signature.to_string(),
                    "d": k.d,
                    "lower": e.lower,
                    "upper": e.upper,
                    "provenance": e.provenance.to_string(),
                })
            })
            .collect();
        println!("{}", serde_json::to_string_pretty(&entries).expect("serialisable"));
        return Ok(ExitCode::SUCCESS);
    }
    for di in d {
        println!("upper bounds, d = {di} (rows b, columns t)");
        let mut line = format!("{:>4} |", "b\\t");
        for ti in t.clone() {
            line.push_str(&format!("{ti:>8}"));
        }
        println!("{line}");
        for bi in b.clone() {
            let mut line = format!("{bi:>4} |");
            for ti in t.clone() {
                let cell = match result.get(&LedgerKey::bt(bi, ti, di)) {
                    Some(e) if e.lower == e.upper => format!("={}", e.upper),
                    Some(e) => format!("<={}", e.upper),
                    None => String::new(),
                };
                line.push_str(&format!("{cell:>8}"));
            }
            println!("{line}");
        }
        println!();
    }
    Ok(ExitCode::SUCCESS)
}

fn cmd_tables(threads: usize, json: bool) -> CmdResult {
    let report = reproduce_tables(SolveOptions::with_threads(threads))?;
    if json {
        println!("{}", serde_json::to_string_pretty(&report).expect("serialisable"));
    } else {
        println!("{report}");
    }
    if report.all_passed() {
        Ok(ExitCode::SUCCESS)
    } else {
        Err(Failure::Check(format!("{} cells differ", report.failures().count())))
    }
}

fn run(cli: Cli) -> CmdResult {
    match &cli.command {
        Command::Solve {
            space,
            run,
            force,
            lower_bound,
            json,
        } => cmd_solve(space, run, force, *lower_bound, *json),
        Command::Emit {
            space,
            model,
            second,
            profile,
            format,
            include_fixed,
            output,
        } => cmd_emit(
            space,
            *model,
            second.as_deref(),
            profile,
            *format,
            *include_fixed,
            output.as_deref(),
        ),
        Command::Verify {
            space,
            code,
            solution,
            second,
            json,
        } => cmd_verify(space, code.as_deref(), solution.as_deref(), second.as_deref(), *json),
        Command::Connectify {
            space,
            code,
            output,
            seed,
        } => cmd_connectify(space, code, output.as_deref(), *seed),
        Command::Branches { space } => cmd_branches(space),
        Command::Audit {
            space,
            run,
            profile,
            known_lower,
        } => cmd_audit(space, run, profile, *known_lower),
        Command::Bounds {
            anchors,
            rules,
            rule_table,
            grid,
            d,
            output,
            json,
        } => cmd_bounds(
            anchors.as_deref(),
            rules,
            rule_table.as_deref(),
            grid,
            d,
            output.as_deref(),
            *json,
        ),
        Command::Tables { threads, json } => cmd_tables(*threads, *json),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() {
                ExitCode::from(1)
            } else {
                ExitCode::SUCCESS
            };
        }
    };
    match run(cli) {
        Ok(code) => code,
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
        Err(Failure::Check(msg)) => {
            eprintln!("check failed: {msg}");
            ExitCode::from(3)
        }
    }
}
