//! Command-line front end.
//!
//! Exit codes: 0 success or positive verdict, 1 negative verdict, 2 usage,
//! parse or input error, 3 budget exceeded (inconclusive).

use std::fs;
use std::io::{BufReader, Write};
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::causal::{causal_paths, reaction_graph, PathQuery, DEFAULT_PATH_BUDGET};
use crate::dsl::parse_chemistry;
use crate::engine::{detect_cycle, simulate, FeasibilityMode, SchedulerPolicy, Trace};
use crate::error::{Error, Result};
use crate::hierarchy::{detect_selfrep1, HierEntity, Level1Caps};
use crate::io::{export_dot, read_trace, write_trace, ReportDocument, ReportEntry};
use crate::reaction::ChemistrySpec;
use crate::selfrep::{detect_selfrep, sweep_molecules, verify_theorem1, EquivalenceSpec, SelfRepQuery, Status};

pub const EXIT_OK: i32 = 0;
pub const EXIT_NEGATIVE: i32 = 1;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_INCONCLUSIVE: i32 = 3;

#[derive(Debug, Parser)]
#[command(name = "achem", version, about = "Artificial-chemistry simulation and self-reproduction analysis")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum PolicyArg {
    FirstDeclared,
    RoundRobin,
}

impl From<PolicyArg> for SchedulerPolicy {
    fn from(p: PolicyArg) -> Self {
        match p {
            PolicyArg::FirstDeclared => SchedulerPolicy::FirstDeclared,
            PolicyArg::RoundRobin => SchedulerPolicy::RoundRobin,
        }
    }
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum ModeArg {
    Standard,
    Strict,
}

impl From<ModeArg> for FeasibilityMode {
    fn from(m: ModeArg) -> Self {
        match m {
            ModeArg::Standard => FeasibilityMode::Standard,
            ModeArg::Strict => FeasibilityMode::Strict,
        }
    }
}

#[derive(Debug, Args)]
struct Analysis {
    /// Trace file written by `simulate`.
    trace: PathBuf,
    /// Chemistry the trace was produced from.
    #[arg(long)]
    spec: PathBuf,
    #[arg(long, value_enum, default_value = "standard")]
    feasibility: ModeArg,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Run a chemistry and write its trace.
    Simulate {
        spec: PathBuf,
        #[arg(long)]
        steps: usize,
        #[arg(long, value_enum, default_value = "first-declared")]
        policy: PolicyArg,
        #[arg(long, value_enum, default_value = "standard")]
        feasibility: ModeArg,
        /// Trace output file; stdout when omitted.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Look for a cyclic tail in a trace.
    Cycle { trace: PathBuf },
    /// Potential reaction graph of one trace state, as DOT.
    Graph {
        spec: PathBuf,
        /// `TRACE:INDEX`
        #[arg(long)]
        state: String,
        /// DOT output file; stdout when omitted.
        #[arg(long)]
        dot: Option<PathBuf>,
        #[arg(long, value_enum, default_value = "standard")]
        feasibility: ModeArg,
    },
    /// Enumerate potential causal paths between two molecules.
    Paths {
        #[command(flatten)]
        analysis: Analysis,
        #[arg(long)]
        from: String,
        #[arg(long)]
        to: String,
        #[arg(long, default_value_t = 4)]
        max_len: usize,
        #[arg(long, default_value_t = DEFAULT_PATH_BUDGET)]
        budget: usize,
    },
    /// Molecule-level self-reproduction verdict.
    Selfrep {
        #[command(flatten)]
        analysis: Analysis,
        #[arg(long, required_unless_present = "all", conflicts_with = "all")]
        entity: Option<String>,
        /// Every declared molecule, in declaration order.
        #[arg(long)]
        all: bool,
        #[arg(long, default_value_t = 4)]
        max_len: usize,
        #[arg(long, default_value_t = DEFAULT_PATH_BUDGET)]
        budget: usize,
        /// Inclusive state window `START:END`.
        #[arg(long)]
        window: Option<String>,
        /// Restrict to the detected cycle and check execution within it.
        #[arg(long)]
        cyclic: bool,
        /// Report file; stdout when omitted.
        #[arg(long)]
        report: Option<PathBuf>,
    },
    /// Self-reproduction verdict for a set of molecules, e.g. "{x, y}".
    Selfrep1 {
        #[command(flatten)]
        analysis: Analysis,
        #[arg(long)]
        entity: String,
        #[arg(long, default_value_t = 4)]
        max_meta_len: usize,
        #[arg(long, default_value_t = 2)]
        max_chain: usize,
        #[arg(long, default_value_t = 8)]
        max_span: usize,
        #[arg(long, default_value_t = 4)]
        max_path_len: usize,
        #[arg(long, default_value_t = 10_000)]
        max_candidates: usize,
        #[arg(long, default_value_t = DEFAULT_PATH_BUDGET)]
        budget: usize,
        #[arg(long)]
        window: Option<String>,
        #[arg(long)]
        report: Option<PathBuf>,
    },
}

/// Parses `argv` (including the program name) and runs the command.
pub fn run_command<I, S>(argv: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = S>,
    S: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            let rendered = e.render().to_string();
            return if e.use_stderr() {
                let _ = write!(stderr, "{rendered}");
                EXIT_USAGE
            } else {
                let _ = write!(stdout, "{rendered}");
                EXIT_OK
            };
        }
    };
    match run(cli.command, stdout) {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(stderr, "error: {e}");
            if e.is_budget_exceeded() {
                EXIT_INCONCLUSIVE
            } else {
                EXIT_USAGE
            }
        }
    }
}

fn read_spec(path: &Path) -> Result<(String, ChemistrySpec)> {
    let text = fs::read_to_string(path)?;
    let spec = parse_chemistry(&text)?;
    Ok((text, spec))
}

fn load_trace(path: &Path) -> Result<Trace> {
    read_trace(BufReader::new(fs::File::open(path)?))
}

fn load_analysis(a: &Analysis) -> Result<(String, ChemistrySpec, Trace, FeasibilityMode)> {
    let (text, spec) = read_spec(&a.spec)?;
    let trace = load_trace(&a.trace)?;
    let mode = a.feasibility.into();
    trace.validate(&spec, mode)?;
    Ok((text, spec, trace, mode))
}

fn parse_window(w: &Option<String>) -> Result<Option<(usize, usize)>> {
    let Some(w) = w else { return Ok(None) };
    let bad = || Error::MalformedEntity(format!("window `{w}` is not START:END"));
    let (a, b) = w.split_once(':').ok_or_else(bad)?;
    let start = a.trim().parse().map_err(|_| bad())?;
    let end = b.trim().parse().map_err(|_| bad())?;
    if start > end {
        return Err(bad());
    }
    Ok(Some((start, end)))
}

fn emit(out: &mut dyn Write, target: &Option<PathBuf>, text: &str) -> Result<()> {
    match target {
        Some(path) => fs::write(path, text)?,
        None => out.write_all(text.as_bytes())?,
    }
    Ok(())
}

fn verdict_code(status: Status) -> i32 {
    if status.is_positive() {
        EXIT_OK
    } else {
        EXIT_NEGATIVE
    }
}

fn run(command: Command, stdout: &mut dyn Write) -> Result<i32> {
    match command {
        Command::Simulate { spec, steps, policy, feasibility, out } => {
            let (_, spec) = read_spec(&spec)?;
            let trace = simulate(&spec, steps, policy.into(), feasibility.into());
            let mut buf = Vec::new();
            write_trace(&trace, &mut buf)?;
            emit(stdout, &out, &String::from_utf8(buf).expect("JSON is UTF-8"))?;
            Ok(EXIT_OK)
        }
        Command::Cycle { trace } => {
            let trace = load_trace(&trace)?;
            match detect_cycle(&trace) {
                Some(w) => {
                    writeln!(stdout, "cycle: prefix {} period {}", w.prefix_len, w.cycle_len)?;
                    Ok(EXIT_OK)
                }
                None => {
                    writeln!(stdout, "no cycle within recorded horizon ({} states)", trace.len())?;
                    Ok(EXIT_NEGATIVE)
                }
            }
        }
        Command::Graph { spec, state, dot, feasibility } => {
            let (_, spec) = read_spec(&spec)?;
            let (path, index) = state
                .rsplit_once(':')
                .and_then(|(p, i)| Some((p, i.parse::<usize>().ok()?)))
                .ok_or_else(|| Error::MalformedEntity(format!("`{state}` is not TRACE:INDEX")))?;
            let trace = load_trace(Path::new(path))?;
            let g = reaction_graph(trace.state(index)?, &spec, index, feasibility.into());
            emit(stdout, &dot, &export_dot(&g))?;
            Ok(EXIT_OK)
        }
        Command::Paths { analysis, from, to, max_len, budget } => {
            let (_, spec, trace, mode) = load_analysis(&analysis)?;
            let query = PathQuery::new(max_len).mode(mode).budget(budget);
            let paths = causal_paths(&spec, &trace, &from, &to, &query)?;
            for p in &paths {
                writeln!(stdout, "{p}")?;
            }
            writeln!(stdout, "{} path(s) of at most {max_len} links", paths.len())?;
            Ok(if paths.is_empty() { EXIT_NEGATIVE } else { EXIT_OK })
        }
        Command::Selfrep { analysis, entity, all, max_len, budget, window, cyclic, report } => {
            let (text, spec, trace, mode) = load_analysis(&analysis)?;
            let eq = EquivalenceSpec::from_spec(&spec);
            let mut query = SelfRepQuery::new(max_len).mode(mode).budget(budget);
            query.window = parse_window(&window)?;
            let mut doc = ReportDocument::new(&text)
                .param("command", "selfrep")
                .param("feasibility", mode)
                .param("max_len", max_len)
                .param("budget", budget)
                .param("window", query.window)
                .param("trace_states", trace.len());
            let subjects: Vec<String> = match entity {
                Some(g) => vec![g],
                None => spec.molecules().iter().map(ToString::to_string).collect(),
            };
            let results: Vec<(String, Result<_>)> = if cyclic {
                let Some(cycle) = detect_cycle(&trace) else {
                    writeln!(stdout, "no cycle within recorded horizon ({} states)", trace.len())?;
                    return Ok(EXIT_NEGATIVE);
                };
                doc = doc.param("cycle", cycle);
                subjects
                    .into_iter()
                    .map(|g| {
                        let v = verify_theorem1(&spec, &trace, &cycle, &g, &eq, &query);
                        (g, v)
                    })
                    .collect()
            } else if all {
                sweep_molecules(&spec, &trace, &eq, &query)
                    .into_iter()
                    .map(|(g, v)| (g.to_string(), v))
                    .collect()
            } else {
                subjects
                    .into_iter()
                    .map(|g| {
                        let v = detect_selfrep(&spec, &trace, &g, &eq, &query);
                        (g, v)
                    })
                    .collect()
            };
            let (mut positive, mut inconclusive) = (false, false);
            for (g, result) in results {
                match result {
                    Ok(v) => {
                        positive |= v.status.is_positive();
                        doc.push(ReportEntry::Level0(v));
                    }
                    Err(e) if e.is_budget_exceeded() => {
                        inconclusive = true;
                        doc.push(ReportEntry::Inconclusive { subject: g, reason: e.to_string() });
                    }
                    Err(e) => return Err(e),
                }
            }
            emit(stdout, &report, &doc.to_json())?;
            Ok(if positive {
                EXIT_OK
            } else if inconclusive {
                EXIT_INCONCLUSIVE
            } else {
                EXIT_NEGATIVE
            })
        }
        Command::Selfrep1 {
            analysis,
            entity,
            max_meta_len,
            max_chain,
            max_span,
            max_path_len,
            max_candidates,
            budget,
            window,
            report,
        } => {
            let (text, spec, trace, mode) = load_analysis(&analysis)?;
            let eq = EquivalenceSpec::from_spec(&spec);
            let z: HierEntity = entity.parse()?;
            let caps = Level1Caps {
                max_meta_len,
                max_chain,
                max_span,
                max_path_len,
                max_candidates,
                path_budget: budget,
                window: parse_window(&window)?,
            };
            let mut doc = ReportDocument::new(&text)
                .param("command", "selfrep1")
                .param("feasibility", mode)
                .param("caps", &caps)
                .param("trace_states", trace.len());
            let code = match detect_selfrep1(&spec, &trace, &z, &eq, &caps, mode) {
                Ok(v) => {
                    let code = verdict_code(v.status);
                    doc.push(ReportEntry::Level1(v));
                    code
                }
                Err(e) if e.is_budget_exceeded() => {
                    doc.push(ReportEntry::Inconclusive { subject: z.to_string(), reason: e.to_string() });
                    EXIT_INCONCLUSIVE
                }
                Err(e) => return Err(e),
            };
            emit(stdout, &report, &doc.to_json())?;
            Ok(code)
        }
    }
}
