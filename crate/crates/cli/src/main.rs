use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use tropfeas::convert::{andor_to_signed, mpg_to_signed, parity_to_mpg, signed_to_mpg_named};
use tropfeas::crosscheck::{abstract_agreement, monotonicity_batch, run_batch, BatchConfig};
use tropfeas::io::{self, SystemFile};
use tropfeas::solver::{EnteringRule, SolveOptions};
use tropfeas::stm::{solve_abstract, validate_stm};
use tropfeas::tropical::parse_rational;
use tropfeas::{feasible_support, find_witness, verify_certificate, SignedSystem, Verdict};

#[derive(Parser)]
#[command(name = "tropfeas", version, about = "Feasibility of tropical linear inequality systems")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum, PartialEq, Eq)]
enum Format {
    Human,
    Json,
}

#[derive(Clone, Copy, ValueEnum)]
enum Entering {
    Smallest,
    Largest,
}

#[derive(Clone, Copy, ValueEnum)]
enum Source {
    Mpg,
    Andor,
    Parity,
    System,
}

#[derive(Clone, Copy, ValueEnum)]
enum Target {
    System,
    Mpg,
}

#[derive(clap::Args)]
struct PivotArgs {
    /// Distinguished coordinates in order, 1-based, comma separated.
    #[arg(long, value_delimiter = ',')]
    delta_order: Vec<usize>,
    /// Scripted entering apexes: a comma separated list or a file of 1-based indices.
    #[arg(long)]
    script: Option<String>,
    #[arg(long, value_enum, default_value = "smallest")]
    entering: Entering,
}

#[derive(Subcommand)]
enum Command {
    /// Decide feasibility of a signed system and print a certificate.
    Solve {
        input: PathBuf,
        #[command(flatten)]
        pivot: PivotArgs,
        /// Print every Cramer solution visited.
        #[arg(long)]
        trace: bool,
        #[arg(long, value_enum, default_value = "human")]
        format: Format,
        /// Split rows with several negative entries using this shift instead of exact trimming.
        #[arg(long)]
        epsilon: Option<String>,
    },
    /// Compute the union of the supports of all feasible points.
    Support {
        input: PathBuf,
        #[arg(long, value_enum, default_value = "human")]
        format: Format,
    },
    /// Translate between games, scheduling networks and signed systems.
    Convert {
        #[arg(long, value_enum)]
        from: Source,
        #[arg(long, value_enum)]
        to: Target,
        input: PathBuf,
        /// Output file; stdout if absent.
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Run the triangulation-based solver on a triangulation file.
    Abstract {
        input: PathBuf,
        #[command(flatten)]
        pivot: PivotArgs,
        #[arg(long, value_enum, default_value = "human")]
        format: Format,
    },
    /// Cross-check the solver against the game oracle and brute force on random instances.
    Verify {
        #[arg(long, default_value_t = 500)]
        count: usize,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        #[arg(long, default_value_t = 4)]
        max_d: usize,
        #[arg(long, default_value_t = 8)]
        max_n: usize,
        #[arg(long, default_value_t = 5)]
        max_abs: i64,
        /// Probability of an infinite entry.
        #[arg(long, default_value_t = 0.4)]
        infinity: f64,
        #[arg(long, value_enum, default_value = "human")]
        format: Format,
    },
}

fn read(path: &Path) -> Result<String> {
    fs::read_to_string(path).with_context(|| format!("cannot read {}", path.display()))
}

fn zero_based(list: &[usize], what: &str) -> Result<Vec<usize>> {
    list.iter().map(|&k| if k == 0 { bail!("{what} indices are 1-based") } else { Ok(k - 1) }).collect()
}

fn parse_script(arg: &str) -> Result<Vec<usize>> {
    let text = if Path::new(arg).is_file() { read(Path::new(arg))? } else { arg.to_string() };
    let items: Vec<usize> = text
        .split(|c: char| c == ',' || c.is_whitespace())
        .filter(|s| !s.is_empty())
        .map(|s| s.parse::<usize>().with_context(|| format!("bad script entry {s:?}")))
        .collect::<Result<_>>()?;
    zero_based(&items, "script")
}

fn options(p: &PivotArgs) -> Result<SolveOptions> {
    Ok(SolveOptions {
        delta_order: (!p.delta_order.is_empty()).then(|| zero_based(&p.delta_order, "coordinate")).transpose()?,
        entering: match p.entering {
            Entering::Smallest => EnteringRule::Smallest,
            Entering::Largest => EnteringRule::Largest,
        },
        script: p.script.as_deref().map(parse_script).transpose()?,
    })
}

fn emit(format: Format, value: &Value, human: impl FnOnce() -> String) {
    match format {
        Format::Json => println!("{}", serde_json::to_string_pretty(value).expect("serializable")),
        Format::Human => print!("{}", human()),
    }
}

fn verdict_code(v: Verdict) -> ExitCode {
    match v {
        Verdict::Feasible => ExitCode::SUCCESS,
        Verdict::Infeasible => ExitCode::from(1),
    }
}

fn one_based(set: impl IntoIterator<Item = usize>) -> String {
    let items: Vec<String> = set.into_iter().map(|k| (k + 1).to_string()).collect();
    format!("{{{}}}", items.join(","))
}

fn edge_lines(g: &tropfeas::CovectorGraph) -> String {
    g.edge_list().iter().map(|(i, j, s)| format!("({i},{j}){}", s.as_char())).collect::<Vec<_>>().join(" ")
}

fn load_system(path: &Path) -> Result<SystemFile> {
    io::parse_system(&read(path)?).with_context(|| format!("invalid system file {}", path.display()))
}

fn solve(input: &Path, pivot: &PivotArgs, trace: bool, format: Format, epsilon: Option<&str>) -> Result<ExitCode> {
    let file = load_system(input)?;
    let opts = options(pivot)?;
    let sys: SignedSystem = if file.system.is_trimmed() {
        file.system.clone()
    } else if let Some(eps) = epsilon {
        let eps = parse_rational(eps)?;
        file.system.split_epsilon(&eps)?
    } else {
        file.system.trim().0
    };
    let cert = find_witness(&sys, &opts)?;
    if !verify_certificate(&sys, &cert) {
        bail!("certificate failed verification");
    }
    emit(format, &io::certificate_to_json(&cert, trace), || {
        let mut out = format!("{} {}\n", cert.verdict, cert.point.normalized());
        out += &format!("covector {}\n", edge_lines(&cert.covector));
        out += &format!(
            "basis {} coordinates {}\n",
            one_based(cert.basis.iter().copied()),
            one_based(cert.coords.iter().copied())
        );
        if let Some(j) = cert.blocking_apex {
            out += &format!("blocking apex {}\n", j + 1);
        }
        let pivots: Vec<String> = cert.phases.iter().map(|p| format!("{}:{}", p.delta + 1, p.pivots)).collect();
        out += &format!("pivots per phase {}\n", pivots.join(" "));
        if trace {
            for e in &cert.trace {
                let step = match (e.entering, e.leaving) {
                    (Some(r), Some(p)) => format!("pivot +{} -{}", r + 1, p + 1),
                    (Some(j), None) => format!("grow +{}", j + 1),
                    _ => "start".to_string(),
                };
                out += &format!(
                    "  delta {} basis {} {} {}\n",
                    e.phase_delta + 1,
                    one_based(e.basis.iter().copied()),
                    step,
                    e.cramer_point.normalized()
                );
            }
        }
        out
    });
    Ok(verdict_code(cert.verdict))
}

fn support(input: &Path, format: Format) -> Result<ExitCode> {
    let file = load_system(input)?;
    let res = feasible_support(&file.system)?;
    emit(format, &io::support_to_json(&res), || {
        let mut out = format!("support {}\n", one_based(res.support.iter().copied()));
        if let Some(w) = &res.witness {
            out += &format!("witness {}\n", w.normalized());
        }
        if let Some(b) = &res.blocker {
            out += &format!("blocker covers {}\n", one_based(b.covered.iter().copied()));
            out += &format!("blocker covector {}\n", edge_lines(&b.covector));
            let matching: Vec<String> = b.matching.iter().map(|(i, j)| format!("{}-{}", i + 1, j + 1)).collect();
            out += &format!("matching {}\n", matching.join(" "));
        }
        out
    });
    Ok(if res.support.is_empty() { ExitCode::from(1) } else { ExitCode::SUCCESS })
}

fn convert(from: Source, to: Target, input: &Path, output: Option<&Path>) -> Result<ExitCode> {
    let text = read(input)?;
    let names = |v0: &[String], v1: &[String]| (Some(v0.to_vec()), Some(v1.to_vec()));
    let file = match from {
        Source::System => io::parse_system(&text)?,
        Source::Mpg => {
            let game = io::parse_game(&text)?;
            let (coords, rows) = names(&game.v0, &game.v1);
            SystemFile { system: mpg_to_signed(&game)?, coords, rows }
        }
        Source::Parity => {
            let game = parity_to_mpg(&io::parse_parity(&text)?)?;
            let (coords, rows) = names(&game.v0, &game.v1);
            SystemFile { system: mpg_to_signed(&game)?, coords, rows }
        }
        Source::Andor => {
            let net = io::parse_andor(&text)?;
            let rows = net.waits.iter().map(|w| w.name.clone()).collect();
            SystemFile { system: andor_to_signed(&net)?, coords: Some(net.states.clone()), rows: Some(rows) }
        }
    };
    let value = match to {
        Target::System => io::system_to_json(&file),
        Target::Mpg => {
            let sys = &file.system;
            let v0 = file.coords.clone().unwrap_or_else(|| (1..=sys.d()).map(|k| format!("x{k}")).collect());
            let v1 = file.rows.clone().unwrap_or_else(|| (1..=sys.n()).map(|k| format!("a{k}")).collect());
            io::game_to_json(&signed_to_mpg_named(sys, v0, v1))
        }
    };
    let text = serde_json::to_string_pretty(&value)? + "\n";
    match output {
        Some(path) => fs::write(path, text).with_context(|| format!("cannot write {}", path.display()))?,
        None => print!("{text}"),
    }
    Ok(ExitCode::SUCCESS)
}

fn run_abstract(input: &Path, pivot: &PivotArgs, format: Format) -> Result<ExitCode> {
    let stm = io::parse_triangulation(&read(input)?)?;
    validate_stm(&stm)?;
    let out = solve_abstract(&stm, &options(pivot)?)?;
    emit(format, &io::abstract_to_json(&out), || {
        let status = match out.verdict {
            Verdict::Feasible => "feasible",
            Verdict::Infeasible => "totally infeasible",
        };
        let mut text = format!("{status} {}\n", out.state.covector.tuple_notation());
        text += &format!(
            "basis {} coordinates {}\n",
            one_based(out.state.basis.iter().copied()),
            one_based(out.state.all_coords())
        );
        for e in &out.trace {
            text += &format!(
                "  delta {} basis {} {}\n",
                e.delta + 1,
                one_based(e.basis.iter().copied()),
                e.covector.tuple_notation()
            );
        }
        text
    });
    Ok(verdict_code(out.verdict))
}

fn verify(cfg: BatchConfig, format: Format) -> Result<ExitCode> {
    if cfg.max_d == 0 || cfg.max_n == 0 || cfg.max_d > 4 {
        bail!("need 1 <= max-d <= 4 and max-n >= 1");
    }
    if !(0.0..1.0).contains(&cfg.infinity) {
        bail!("infinity must lie in [0, 1)");
    }
    let batch = run_batch(&cfg);
    let mono = monotonicity_batch(cfg.count.min(200), cfg.seed);
    let abs = abstract_agreement(cfg.count.min(50), cfg.seed);
    let failures =
        batch.disagreements().len() + batch.bound_violations().len() + mono.violations.len() + abs.mismatches.len();
    let value = json!({
        "instances": batch.instances.len(),
        "feasible": batch.feasible(),
        "disagreements": batch.disagreements().iter().map(|r| r.index).collect::<Vec<_>>(),
        "bound_violations": batch.bound_violations().iter().map(|r| r.index).collect::<Vec<_>>(),
        "max_pivots_per_phase": batch.max_pivots(),
        "monotonicity": { "systems": mono.systems, "pivots": mono.pivots, "violations": mono.violations },
        "abstract": { "systems": abs.systems, "mismatches": abs.mismatches },
    });
    emit(format, &value, || {
        let mut out = format!("{}\n", batch.summary());
        out += &format!(
            "monotonicity: {} systems, {} pivots, {} violations\n",
            mono.systems,
            mono.pivots,
            mono.violations.len()
        );
        out += &format!("triangulation engine: {} systems, {} mismatches\n", abs.systems, abs.mismatches.len());
        for r in batch.disagreements() {
            out += &format!("disagreement on instance {}: {:?}\n", r.index, r.problems);
        }
        out += if failures == 0 { "ok\n" } else { "FAILED\n" };
        out
    });
    Ok(if failures == 0 { ExitCode::SUCCESS } else { ExitCode::from(1) })
}

fn run(cli: Cli) -> Result<ExitCode> {
    match cli.command {
        Command::Solve { input, pivot, trace, format, epsilon } => {
            solve(&input, &pivot, trace, format, epsilon.as_deref())
        }
        Command::Support { input, format } => support(&input, format),
        Command::Convert { from, to, input, output } => convert(from, to, &input, output.as_deref()),
        Command::Abstract { input, pivot, format } => run_abstract(&input, &pivot, format),
        Command::Verify { count, seed, max_d, max_n, max_abs, infinity, format } => {
            let cfg = BatchConfig { count, seed, max_d, max_n, max_abs, infinity, ..BatchConfig::default() };
            verify(cfg, format)
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(2) } else { ExitCode::SUCCESS };
        }
    };
    match run(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
