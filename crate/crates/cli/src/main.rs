//! `fpmember`: subgroup membership certificates from the command line.
//!
//! Exit codes: 0 decided (or check passed), 10 undecided, 1 input error,
//! 2 certificate check failed or oracle disagreement.

use std::fmt;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand};

use fpmember_core::bs_oracle::{fiber_word_member, BsGroup};
use fpmember_core::certificate::{Certificate, RepData, Verdict};
use fpmember_core::engine::{check_certificate, separate_from_product_diagonal, solve_concurrent, solve_with_stats, Budget};
use fpmember_core::stallings::{build_graph, graph_index, hall_completion};
use fpmember_core::{GeneratingSet, Presentation, Word};

#[derive(Parser)]
#[command(name = "fpmember", version, about = "Subgroup membership in finitely presented groups")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Search for a membership or non-membership certificate.
    Solve(SolveArgs),
    /// Re-verify a certificate.
    Check(CheckArgs),
    /// Stallings graph, index, Hall completion and retraction images.
    Stallings(StallingsArgs),
    /// A finite representation of A × A separating (g1, g2) from the diagonal.
    Separate(SeparateArgs),
}

#[derive(Args)]
struct Inputs {
    /// Presentation file ("gens ..." then "rel WORD" lines).
    #[arg(long)]
    presentation: PathBuf,
    /// Subgroup file ("gen WORD" lines).
    #[arg(long)]
    subgroup: PathBuf,
    /// The element to test.
    #[arg(long, allow_hyphen_values = true)]
    word: String,
}

#[derive(Args)]
struct SolveArgs {
    #[command(flatten)]
    inputs: Inputs,
    #[arg(long, default_value_t = 4)]
    max_degree: usize,
    #[arg(long, default_value_t = 1_000_000)]
    max_steps: u64,
    #[arg(long, default_value_t = 12)]
    max_product_size: usize,
    /// Cross-check a decided verdict against the Baumslag-Solitar oracle
    /// declared in the presentation file by a "# oracle: bs M N" comment.
    #[arg(long)]
    oracle: bool,
    /// Run both searches on separate threads (verdicts stay sound, the
    /// certificate found may vary between runs).
    #[arg(long)]
    concurrent: bool,
    /// Write the certificate here instead of stdout.
    #[arg(long)]
    output: Option<PathBuf>,
}

#[derive(Args)]
struct CheckArgs {
    #[command(flatten)]
    inputs: Inputs,
    #[arg(long)]
    certificate: PathBuf,
}

#[derive(Args)]
struct StallingsArgs {
    #[arg(long)]
    presentation: PathBuf,
    #[arg(long)]
    subgroup: PathBuf,
    /// Words whose retraction images to print; repeatable.
    #[arg(long, allow_hyphen_values = true)]
    query: Vec<String>,
}

#[derive(Args)]
struct SeparateArgs {
    /// A relator-free presentation of the factor A.
    #[arg(long)]
    presentation: PathBuf,
    #[arg(long, allow_hyphen_values = true)]
    word: String,
    #[arg(long, allow_hyphen_values = true)]
    word2: String,
}

/// Failure with its exit code; the message goes to stderr.
struct Failure {
    code: u8,
    message: String,
}

impl Failure {
    fn input(message: impl fmt::Display) -> Self {
        Failure {
            code: 1,
            message: message.to_string(),
        }
    }
}

type Outcome = Result<u8, Failure>;

fn read(path: &Path) -> Result<String, Failure> {
    std::fs::read_to_string(path).map_err(|e| Failure::input(format!("{}: {e}", path.display())))
}

fn load_presentation(path: &Path) -> Result<(Presentation, String), Failure> {
    let text = read(path)?;
    let p = Presentation::parse(&text)
        .map_err(|e| Failure::input(format!("{}:{}:{}: {}", path.display(), e.line, e.column, e.message)))?;
    Ok((p, text))
}

fn load_subgroup(path: &Path, p: &Presentation) -> Result<GeneratingSet, Failure> {
    let text = read(path)?;
    GeneratingSet::parse(p, &text)
        .map_err(|e| Failure::input(format!("{}:{}:{}: {}", path.display(), e.line, e.column, e.message)))
}

fn parse_word(p: &Presentation, flag: &str, text: &str) -> Result<Word, Failure> {
    p.parse_word(text)
        .map_err(|e| Failure::input(format!("{flag}:1:{}: {}", e.column, e.message)))
}

fn load_inputs(inputs: &Inputs) -> Result<(Presentation, String, GeneratingSet, Word), Failure> {
    let (p, text) = load_presentation(&inputs.presentation)?;
    let s = load_subgroup(&inputs.subgroup, &p)?;
    let g = parse_word(&p, "--word", &inputs.word)?;
    Ok((p, text, s, g))
}

/// `# oracle: bs M N` anywhere in the presentation file.
fn declared_oracle(text: &str) -> Result<Option<BsGroup>, Failure> {
    for line in text.lines() {
        let Some(rest) = line.trim().strip_prefix('#') else {
            continue;
        };
        let Some(decl) = rest.trim().strip_prefix("oracle:") else {
            continue;
        };
        let fields: Vec<&str> = decl.split_whitespace().collect();
        let parsed = match fields.as_slice() {
            ["bs", m, n] => m.parse().ok().zip(n.parse().ok()),
            _ => None,
        };
        let (m, n) = parsed.ok_or_else(|| Failure::input(format!("unrecognised oracle declaration {:?}", decl.trim())))?;
        return BsGroup::new(m, n).map(Some).map_err(Failure::input);
    }
    Ok(None)
}

fn cmd_solve(args: &SolveArgs) -> Outcome {
    let (p, text, s, g) = load_inputs(&args.inputs)?;
    let budget = Budget::new(args.max_degree, args.max_steps, args.max_product_size).map_err(Failure::input)?;
    let oracle = if args.oracle {
        Some(declared_oracle(&text)?.ok_or_else(|| Failure::input("--oracle given but the presentation declares none"))?)
    } else {
        None
    };
    let started = Instant::now();
    let cert = if args.concurrent {
        let cert = solve_concurrent(&p, &s, &g, &budget).map_err(Failure::input)?;
        eprintln!("{} (concurrent) in {:.3?}", cert.verdict().as_str(), started.elapsed());
        cert
    } else {
        let (cert, stats) = solve_with_stats(&p, &s, &g, &budget).map_err(Failure::input)?;
        eprintln!(
            "{} after {} steps ({} quotient, {} relator), {} representations, {} pairs, degree {}, in {:.3?}",
            cert.verdict().as_str(),
            stats.steps,
            stats.quotient_steps,
            stats.relator_steps,
            stats.representations_checked,
            stats.pairs_tested,
            stats.last_degree,
            started.elapsed()
        );
        cert
    };
    let json = cert.to_json(&p);
    match &args.output {
        Some(path) => std::fs::write(path, &json).map_err(|e| Failure::input(format!("{}: {e}", path.display())))?,
        None => print!("{json}"),
    }
    if let Some(group) = oracle {
        let truth = fiber_word_member(&group, &g)
            .ok_or_else(|| Failure::input("the oracle needs a word over four generators"))?;
        eprintln!("oracle BS({},{}): {}", group.m(), group.n(), if truth { "member" } else { "nonmember" });
        let disagrees = match cert.verdict() {
            Verdict::Member => !truth,
            Verdict::NonMember => truth,
            Verdict::Undecided => false,
        };
        if disagrees {
            return Err(Failure {
                code: 2,
                message: "verdict disagrees with the oracle".into(),
            });
        }
    }
    Ok(if cert.verdict() == Verdict::Undecided { 10 } else { 0 })
}

fn cmd_check(args: &CheckArgs) -> Outcome {
    let (p, _, s, g) = load_inputs(&args.inputs)?;
    let text = read(&args.certificate)?;
    let cert = Certificate::from_json(&text, &p)
        .map_err(|e| Failure::input(format!("{}: {e}", args.certificate.display())))?;
    if check_certificate(&p, &s, &g, &cert) {
        eprintln!("valid {} certificate", cert.verdict().as_str());
        Ok(0)
    } else {
        Err(Failure {
            code: 2,
            message: format!("{} certificate does not verify", cert.verdict().as_str()),
        })
    }
}

fn require_free(p: &Presentation, path: &Path) -> Result<(), Failure> {
    if p.is_free() {
        Ok(())
    } else {
        Err(Failure::input(format!("{}: free groups only (relators present)", path.display())))
    }
}

fn cmd_stallings(args: &StallingsArgs) -> Outcome {
    let (p, _) = load_presentation(&args.presentation)?;
    require_free(&p, &args.presentation)?;
    let s = load_subgroup(&args.subgroup, &p)?;
    let queries = args
        .query
        .iter()
        .map(|q| parse_word(&p, "--query", q))
        .collect::<Result<Vec<_>, _>>()?;
    let graph = build_graph(s.generators(), p.alphabet()).map_err(Failure::input)?;
    let hall = hall_completion(&graph);
    print!("{}", graph.dump(p.alphabet()));
    println!("index: {}", graph_index(&graph));
    println!("completion index: {}", hall.index());
    for (text, q) in args.query.iter().zip(&queries) {
        match hall.retract(q) {
            Ok(image) => println!("retract {text}: {}", p.print_word(&image)),
            Err(_) => println!("retract {text}: not in the completion"),
        }
    }
    eprintln!(
        "{} vertices, {} edges, subgroup rank {}",
        graph.vertex_count(),
        graph.edge_count(),
        graph.subgroup_rank()
    );
    Ok(0)
}

fn cmd_separate(args: &SeparateArgs) -> Outcome {
    let (a, _) = load_presentation(&args.presentation)?;
    require_free(&a, &args.presentation)?;
    let g1 = parse_word(&a, "--word", &args.word)?;
    let g2 = parse_word(&a, "--word2", &args.word2)?;
    let (combined, rep) = separate_from_product_diagonal(&a, &g1, &g2).map_err(Failure::input)?;
    print!("{}", RepData::from_rep(&rep).to_json());
    eprintln!(
        "degree {} over generators {}",
        rep.degree(),
        combined.alphabet().names().join(" ")
    );
    Ok(0)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = match &cli.command {
        Command::Solve(args) => cmd_solve(args),
        Command::Check(args) => cmd_check(args),
        Command::Stallings(args) => cmd_stallings(args),
        Command::Separate(args) => cmd_separate(args),
    };
    match outcome {
        Ok(code) => ExitCode::from(code),
        Err(f) => {
            eprintln!("error: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}
