//! Command-line surface tying the pipeline together.
//!
//! Exit codes are part of the interface: 0 success/feasible, 1
//! infeasible or semantically invalid input, 2 malformed input, 3
//! resource budget exhausted. Human diagnostics go to stderr; machine
//! output (plans, instances, solutions, page renderings) goes to stdout
//! unless an output path is given.

use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::files::{self, FileError};
use crate::gen::{self, GenError, ProfileConfig};
use crate::profile::{GroupTable, ProfileState, TieOrder};
use crate::reduction::{self, ReducedInstance, ReductionError};
use crate::solver::{self, SolverConfig, SolverError};
use crate::tpart::{self, TpError};

pub const EXIT_OK: i32 = 0;
pub const EXIT_INFEASIBLE: i32 = 1;
pub const EXIT_MALFORMED: i32 = 2;
pub const EXIT_RESOURCE: i32 = 3;

#[derive(Parser)]
#[command(
    name = "scholar-merge",
    version,
    about = "Paginated merge-interface model, exact merge-order solver, and 3-partition tooling"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Decide whether an instance can be fully merged; emit a witness plan.
    #[command(name = "solve")]
    Solve {
        /// Instance file (JSON).
        instance: PathBuf,
        /// Write the witness plan here instead of stdout.
        #[arg(long)]
        plan_out: Option<PathBuf>,
        /// Abort with exit code 3 after this many expanded search nodes.
        #[arg(long, default_value_t = 10_000_000)]
        budget_nodes: u64,
        #[command(flatten)]
        view: ViewArgs,
    },
    /// Replay a plan and check that it fully merges the instance.
    #[command(name = "verify")]
    Verify {
        instance: PathBuf,
        plan: PathBuf,
        #[command(flatten)]
        view: ViewArgs,
    },
    /// Print the ranked, paginated view of an instance.
    #[command(name = "pages")]
    Pages {
        instance: PathBuf,
        #[command(flatten)]
        view: ViewArgs,
    },
    /// Compile a 3-partition instance into a merge instance (+ metadata sidecar).
    #[command(name = "reduce3p")]
    Reduce3p {
        /// 3-partition instance file (JSON: {"b": …, "values": […]}).
        input: PathBuf,
        /// Merge instance output path; stdout if omitted.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Metadata sidecar path; defaults to <out> with a .meta.json suffix.
        #[arg(long)]
        meta: Option<PathBuf>,
    },
    /// Translate a 3-partition solution into a witness merge plan.
    #[command(name = "lift3p")]
    Lift3p {
        /// Compiled merge instance file.
        instance: PathBuf,
        /// 3-partition solution file (JSON: {"triples": [[…]]}).
        solution: PathBuf,
        /// Metadata sidecar; defaults to <instance> with a .meta.json suffix.
        #[arg(long)]
        meta: Option<PathBuf>,
        /// Write the plan here instead of stdout.
        #[arg(long)]
        plan_out: Option<PathBuf>,
    },
    /// Recover a 3-partition solution from a witness merge plan.
    #[command(name = "extract3p")]
    Extract3p {
        /// Compiled merge instance file.
        instance: PathBuf,
        /// Witness plan file.
        plan: PathBuf,
        /// Metadata sidecar; defaults to <instance> with a .meta.json suffix.
        #[arg(long)]
        meta: Option<PathBuf>,
        /// Write the solution here instead of stdout.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Solve a 3-partition instance exactly by backtracking.
    #[command(name = "3psolve")]
    TpSolve {
        input: PathBuf,
        /// Write the solution here instead of stdout.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Generate instances deterministically from a seed.
    #[command(name = "gen")]
    Gen {
        #[command(subcommand)]
        what: GenCommand,
    },
}

#[derive(Subcommand)]
enum GenCommand {
    /// A 3-partition instance that is solvable by construction.
    #[command(name = "tp-solvable")]
    TpSolvable {
        #[arg(long)]
        m: usize,
        #[arg(long)]
        b: u64,
        #[arg(long)]
        seed: u64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// A valid 3-partition instance that may or may not be solvable.
    #[command(name = "tp-random")]
    TpRandom {
        #[arg(long)]
        m: usize,
        #[arg(long)]
        b: u64,
        #[arg(long)]
        seed: u64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// A random merge instance.
    #[command(name = "profile")]
    Profile {
        #[arg(long)]
        versions: usize,
        #[arg(long)]
        groups: usize,
        #[arg(long)]
        max_citations: u64,
        #[arg(long)]
        page_size: usize,
        #[arg(long)]
        seed: u64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

/// Flags shared by every command that loads a merge instance.
#[derive(Args)]
struct ViewArgs {
    /// Override the instance file's page size.
    #[arg(long)]
    page_size: Option<usize>,
    /// Order among equal citation counts.
    #[arg(long, value_enum, default_value_t = TieArg::Asc)]
    tie_order: TieArg,
}

#[derive(Clone, Copy, ValueEnum)]
enum TieArg {
    /// Smaller id first (fresh merge results sort after incumbents).
    Asc,
    /// Larger id first.
    Desc,
}

impl From<TieArg> for TieOrder {
    fn from(arg: TieArg) -> Self {
        match arg {
            TieArg::Asc => TieOrder::IdAscending,
            TieArg::Desc => TieOrder::IdDescending,
        }
    }
}

struct Failure {
    code: i32,
    message: String,
}

impl Failure {
    fn semantic(message: impl Into<String>) -> Self {
        Self {
            code: EXIT_INFEASIBLE,
            message: message.into(),
        }
    }
}

impl From<FileError> for Failure {
    fn from(e: FileError) -> Self {
        Self {
            code: EXIT_MALFORMED,
            message: e.to_string(),
        }
    }
}

impl From<SolverError> for Failure {
    fn from(e: SolverError) -> Self {
        Self {
            code: EXIT_RESOURCE,
            message: e.to_string(),
        }
    }
}

impl From<TpError> for Failure {
    fn from(e: TpError) -> Self {
        Failure::semantic(e.to_string())
    }
}

impl From<ReductionError> for Failure {
    fn from(e: ReductionError) -> Self {
        Failure::semantic(e.to_string())
    }
}

impl From<GenError> for Failure {
    fn from(e: GenError) -> Self {
        // Bad generator arguments are caller mistakes, like unparsable files.
        Self {
            code: EXIT_MALFORMED,
            message: e.to_string(),
        }
    }
}

/// Parses arguments from the environment and runs one command,
/// returning the process exit code.
pub fn run() -> i32 {
    let cli = Cli::parse();
    match execute(cli.command) {
        Ok(code) => code,
        Err(failure) => {
            eprintln!("error: {}", failure.message);
            failure.code
        }
    }
}

fn execute(command: Command) -> Result<i32, Failure> {
    match command {
        Command::Solve {
            instance,
            plan_out,
            budget_nodes,
            view,
        } => cmd_solve(&instance, plan_out.as_deref(), budget_nodes, &view),
        Command::Verify {
            instance,
            plan,
            view,
        } => cmd_verify(&instance, &plan, &view),
        Command::Pages { instance, view } => cmd_pages(&instance, &view),
        Command::Reduce3p { input, out, meta } => {
            cmd_reduce3p(&input, out.as_deref(), meta.as_deref())
        }
        Command::Lift3p {
            instance,
            solution,
            meta,
            plan_out,
        } => cmd_lift3p(&instance, &solution, meta.as_deref(), plan_out.as_deref()),
        Command::Extract3p {
            instance,
            plan,
            meta,
            out,
        } => cmd_extract3p(&instance, &plan, meta.as_deref(), out.as_deref()),
        Command::TpSolve { input, out } => cmd_3psolve(&input, out.as_deref()),
        Command::Gen { what } => cmd_gen(what),
    }
}

fn load_state(path: &Path, view: &ViewArgs) -> Result<(ProfileState, GroupTable), Failure> {
    let mut file = files::load_instance(path)?;
    if let Some(p) = view.page_size {
        file.page_size = p;
    }
    Ok(files::instance_to_state(&file, view.tie_order.into())?)
}

/// Loads a compiled instance together with its metadata sidecar.
fn load_reduced(path: &Path, meta: Option<&Path>) -> Result<ReducedInstance, Failure> {
    let file = files::load_instance(path)?;
    let (state, groups) = files::instance_to_state(&file, TieOrder::IdAscending)?;
    let meta_path = meta
        .map(Path::to_path_buf)
        .unwrap_or_else(|| sidecar_path(path));
    let meta = files::load_meta(&meta_path)?;
    Ok(files::reduced_from_parts(state, groups, &meta)?)
}

/// `foo.json` → `foo.meta.json`; extensionless paths gain `.meta.json`.
fn sidecar_path(path: &Path) -> PathBuf {
    path.with_extension("meta.json")
}

fn write_or_print(path: Option<&Path>, text: &str) -> Result<(), Failure> {
    match path {
        Some(path) => Ok(files::write_text(path, text)?),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn plural(n: usize) -> &'static str {
    if n == 1 {
        ""
    } else {
        "s"
    }
}

fn cmd_solve(
    instance: &Path,
    plan_out: Option<&Path>,
    budget_nodes: u64,
    view: &ViewArgs,
) -> Result<i32, Failure> {
    let (state, _) = load_state(instance, view)?;
    let config = SolverConfig {
        max_nodes: budget_nodes,
        max_memo_entries: None,
    };
    let result = solver::solve_with(&state, &config)?;
    let stats = result.stats;
    if result.feasible {
        let plan = result.plan.expect("feasible results carry a plan");
        eprintln!(
            "feasible: {} step{} (nodes expanded {}, memo hits {}, peak memo {})",
            plan.len(),
            plural(plan.len()),
            stats.nodes_expanded,
            stats.memo_hits,
            stats.peak_memo_size
        );
        write_or_print(plan_out, &files::emit_plan(&files::merge_plan_to_file(&plan)))?;
        Ok(EXIT_OK)
    } else {
        eprintln!(
            "infeasible: no legal merge order fully merges this profile \
             (nodes expanded {}, memo hits {}, peak memo {})",
            stats.nodes_expanded, stats.memo_hits, stats.peak_memo_size
        );
        Ok(EXIT_INFEASIBLE)
    }
}

fn cmd_verify(instance: &Path, plan: &Path, view: &ViewArgs) -> Result<i32, Failure> {
    let (state, _) = load_state(instance, view)?;
    let plan = files::plan_to_merge_plan(&files::load_plan(plan)?);
    match state.apply_plan(&plan) {
        Ok(trace) if trace.final_state().is_fully_merged() => {
            println!(
                "ok: plan fully merges the profile in {} step{}",
                plan.len(),
                plural(plan.len())
            );
            Ok(EXIT_OK)
        }
        Ok(trace) => {
            println!(
                "rejected: plan replays but {} versions remain unmerged",
                trace.final_state().len()
            );
            Ok(EXIT_INFEASIBLE)
        }
        Err(step) => {
            println!("rejected at step {}: {}", step.index, step.cause);
            Ok(EXIT_INFEASIBLE)
        }
    }
}

fn cmd_pages(instance: &Path, view: &ViewArgs) -> Result<i32, Failure> {
    let (state, groups) = load_state(instance, view)?;
    print!("{}", render_pages(&state, &groups));
    Ok(EXIT_OK)
}

fn cmd_reduce3p(input: &Path, out: Option<&Path>, meta: Option<&Path>) -> Result<i32, Failure> {
    let tp = files::tp_instance_from_file(&files::load_tp_instance(input)?);
    let red = reduction::reduce_3p(&tp)?;
    let instance_text = files::emit_instance(&files::state_to_instance(&red.state, &red.groups));
    let meta_text = files::emit_meta(&files::meta_from_reduced(&red));
    write_or_print(out, &instance_text)?;
    let meta_path = meta
        .map(Path::to_path_buf)
        .or_else(|| out.map(sidecar_path));
    match meta_path {
        Some(path) => {
            files::write_text(&path, &meta_text)?;
            eprintln!(
                "compiled {} versions, page size {}; metadata in {}",
                red.state.len(),
                red.state.page_size(),
                path.display()
            );
        }
        // Instance went to stdout and no sidecar was requested; the
        // metadata would be needed for lift3p/extract3p later.
        None => eprintln!(
            "compiled {} versions, page size {}; no metadata written (pass --out or --meta)",
            red.state.len(),
            red.state.page_size()
        ),
    }
    Ok(EXIT_OK)
}

fn cmd_lift3p(
    instance: &Path,
    solution: &Path,
    meta: Option<&Path>,
    plan_out: Option<&Path>,
) -> Result<i32, Failure> {
    let red = load_reduced(instance, meta)?;
    let sol = files::tp_solution_from_file(&files::load_tp_solution(solution)?);
    let plan = reduction::lift_3p(&red, &sol)?;
    eprintln!(
        "lifted {} triple{} into a {}-step plan",
        sol.triples.len(),
        plural(sol.triples.len()),
        plan.len()
    );
    write_or_print(plan_out, &files::emit_plan(&files::merge_plan_to_file(&plan)))?;
    Ok(EXIT_OK)
}

fn cmd_extract3p(
    instance: &Path,
    plan: &Path,
    meta: Option<&Path>,
    out: Option<&Path>,
) -> Result<i32, Failure> {
    let red = load_reduced(instance, meta)?;
    let plan = files::plan_to_merge_plan(&files::load_plan(plan)?);
    let sol = reduction::extract_3p(&red, &plan)?;
    eprintln!("extracted {} triple{}", sol.triples.len(), plural(sol.triples.len()));
    write_or_print(out, &files::emit_tp_solution(&files::tp_solution_to_file(&sol)))?;
    Ok(EXIT_OK)
}

fn cmd_3psolve(input: &Path, out: Option<&Path>) -> Result<i32, Failure> {
    let tp = files::tp_instance_from_file(&files::load_tp_instance(input)?);
    match tpart::brute_force(&tp)? {
        Some(sol) => {
            eprintln!("solvable: {} triple{}", sol.triples.len(), plural(sol.triples.len()));
            write_or_print(out, &files::emit_tp_solution(&files::tp_solution_to_file(&sol)))?;
            Ok(EXIT_OK)
        }
        None => {
            eprintln!("unsolvable: no partition into target-summing triples exists");
            Ok(EXIT_INFEASIBLE)
        }
    }
}

fn cmd_gen(what: GenCommand) -> Result<i32, Failure> {
    match what {
        GenCommand::TpSolvable { m, b, seed, out } => {
            let tp = tpart::gen_solvable(m, b, seed)?;
            write_or_print(
                out.as_deref(),
                &files::emit_tp_instance(&files::tp_instance_to_file(&tp)),
            )?;
        }
        GenCommand::TpRandom { m, b, seed, out } => {
            let tp = tpart::gen_random(m, b, seed)?;
            write_or_print(
                out.as_deref(),
                &files::emit_tp_instance(&files::tp_instance_to_file(&tp)),
            )?;
        }
        GenCommand::Profile {
            versions,
            groups,
            max_citations,
            page_size,
            seed,
            out,
        } => {
            let config = ProfileConfig {
                versions,
                groups,
                max_citations,
                page_size,
            };
            let (state, table) = gen::random_profile(&config, seed)?;
            write_or_print(
                out.as_deref(),
                &files::emit_instance(&files::state_to_instance(&state, &table)),
            )?;
        }
    }
    Ok(EXIT_OK)
}

/// Ranked view grouped by page, one version per row.
fn render_pages(state: &ProfileState, groups: &GroupTable) -> String {
    let n = state.len();
    let p = state.page_size();
    let pages = n.div_ceil(p);
    let mut out = format!(
        "{n} version{}, page size {p}, {pages} page{}\n",
        plural(n),
        plural(pages)
    );
    let width = |x: u64| x.to_string().len();
    let rank_w = width(n as u64);
    let id_w = state
        .versions()
        .iter()
        .map(|v| width(v.id.0))
        .max()
        .unwrap_or(1);
    let cit_w = state
        .versions()
        .iter()
        .map(|v| width(v.citations))
        .max()
        .unwrap_or(1);
    for (page_no, page) in state.versions().chunks(p).enumerate() {
        out.push_str(&format!("page {}\n", page_no + 1));
        for (offset, v) in page.iter().enumerate() {
            let rank = page_no * p + offset + 1;
            out.push_str(&format!(
                "  rank {rank:>rank_w$}  id {:>id_w$}  citations {:>cit_w$}  group {}\n",
                v.id.0,
                v.citations,
                groups.name(v.group)
            ));
        }
    }
    out
}
