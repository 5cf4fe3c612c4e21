//! Command-line front end. Every library operation is reachable from here
//! with the same defaults the test suites use, so any failure a suite
//! reports can be replayed by hand from a shell.
//!
//! Exit codes double as verdicts: commands that answer a yes/no/unknown
//! question (`sn`, `isn`, `subtype`, `zcheck`, `confluence`,
//! `check-derivation`, `suite`) exit 0 for the positive answer, 1 for the
//! negative one and 2 for "ran out of fuel before deciding". Input
//! problems exit 65, flag misuse 64, and resource exhaustion inside an
//! otherwise well-posed run 70.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::json;

use lexkit::labelled::{measures, unlabel, xc};
use lexkit::strategy::{isn_check, perpetual_trace, TraceStatus};
use lexkit::types::{check_derivation, infer_simple, subtype};
use lexkit::{
    confluence_check, normalize_leftmost, parse_term, parse_type, print_term, print_type, reducts,
    run_suite, superdev, z_check, ConfluenceResult, EngineError, Environment, Fuels, GenTerm,
    Oracle, RuleSet, RuleSetName, SnVerdict, Step, TermError, TypeDerivation, TypeError, ZStatus,
    SUITE_NAMES,
};

#[derive(Parser)]
#[command(name = "lexkit", version, about = "Explicit-substitution calculus toolkit")]
struct Cli {
    #[command(subcommand)]
    command: Cmd,
    #[command(flatten)]
    common: Common,
}

#[derive(Args)]
struct Common {
    /// Shorthand: set both --node-fuel and --step-fuel
    #[arg(long, global = true)]
    fuel: Option<usize>,
    /// Node budget for graph exploration
    #[arg(long, global = true)]
    node_fuel: Option<usize>,
    /// Step budget for normalization and traces
    #[arg(long, global = true)]
    step_fuel: Option<usize>,
    /// Cap on the size of an equivalence class
    #[arg(long, global = true)]
    class_bound: Option<usize>,
    /// Node budget per joinability search
    #[arg(long, global = true)]
    join_budget: Option<usize>,
    /// Emit JSON instead of text
    #[arg(long, global = true)]
    json: bool,
    /// Seed for the randomized suites
    #[arg(long, global = true, default_value_t = 20260815)]
    seed: u64,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum RulesetArg {
    /// plain beta on pure terms
    Beta,
    /// substitution rules without composition
    X,
    /// substitution rules with composition
    Lex,
    /// substitution rules with the fused composition shortcut
    Xdir,
    /// labelled rules only
    Uex,
    /// plain and labelled rules together
    Luex,
}

impl RulesetArg {
    fn get(self) -> RuleSet {
        RuleSet::get(match self {
            RulesetArg::Beta => RuleSetName::Beta,
            RulesetArg::X => RuleSetName::LambdaX,
            RulesetArg::Lex => RuleSetName::LambdaEx,
            RulesetArg::Xdir => RuleSetName::LambdaXDirector,
            RulesetArg::Uex => RuleSetName::Uex,
            RulesetArg::Luex => RuleSetName::LambdaUex,
        })
    }

    fn name(self) -> &'static str {
        match self {
            RulesetArg::Beta => "beta",
            RulesetArg::X => "x",
            RulesetArg::Lex => "lex",
            RulesetArg::Xdir => "xdir",
            RulesetArg::Uex => "uex",
            RulesetArg::Luex => "luex",
        }
    }
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum PolicyArg {
    /// always contract the first reduct in canonical order
    Leftmost,
    /// the termination-preserving strategy
    Perpetual,
}

#[derive(Subcommand)]
enum Cmd {
    /// Reduce a term to normal form and print the trace
    Reduce {
        term: String,
        #[arg(long, value_enum, default_value_t = RulesetArg::Lex)]
        ruleset: RulesetArg,
        #[arg(long, value_enum, default_value_t = PolicyArg::Perpetual)]
        policy: PolicyArg,
    },
    /// List the one-step reducts of a term
    Reducts {
        term: String,
        #[arg(long, value_enum, default_value_t = RulesetArg::Lex)]
        ruleset: RulesetArg,
    },
    /// Decide strong normalization (exit 0 yes, 1 no, 2 unknown)
    Sn {
        term: String,
        #[arg(long, value_enum, default_value_t = RulesetArg::Lex)]
        ruleset: RulesetArg,
    },
    /// Search for an inductive termination derivation
    Isn { term: String },
    /// Trace the perpetual strategy clause by clause
    Strategy { term: String },
    /// Print the decreasing measures of a labelled term
    Measure {
        term: String,
        /// Variable to report `ar` for; repeatable, defaults to all free
        /// variables
        #[arg(long = "var")]
        vars: Vec<String>,
    },
    /// Execute every labelled substitution at once
    Xc { term: String },
    /// Demote labelled substitutions to ordinary ones
    Unlabel { term: String },
    /// Infer a type for a closed term
    Typecheck {
        /// use the simple (arrow-only) system
        #[arg(long, required = true)]
        simple: bool,
        term: String,
    },
    /// Validate a typing derivation stored as JSON
    CheckDerivation { file: PathBuf },
    /// Test the subtype relation (exit 0 yes, 1 no)
    Subtype { left: String, right: String },
    /// Contract every present redex simultaneously
    Superdev { term: String },
    /// Check the angle property for each step out of a term
    Zcheck { term: String },
    /// Search for non-joinable peaks below a term
    Confluence {
        term: String,
        /// how many steps out to collect peaks
        #[arg(long, default_value_t = 3)]
        depth: usize,
        /// how many steps each side of a join may take
        #[arg(long, default_value_t = 6)]
        join_depth: usize,
    },
    /// Run one named check suite and print its pass/fail table
    Suite { name: String },
}

enum Failure {
    Usage(String),
    Parse(String),
    Internal(String),
}

impl Failure {
    fn exit(&self) -> u8 {
        match self {
            Failure::Usage(_) => 64,
            Failure::Parse(_) => 65,
            Failure::Internal(_) => 70,
        }
    }

    fn message(&self) -> &str {
        match self {
            Failure::Usage(m) | Failure::Parse(m) | Failure::Internal(m) => m,
        }
    }
}

impl From<lexkit::ParseError> for Failure {
    fn from(e: lexkit::ParseError) -> Failure {
        Failure::Parse(e.to_string())
    }
}

impl From<TermError> for Failure {
    fn from(e: TermError) -> Failure {
        match e {
            TermError::IllFormedInput(_) => Failure::Parse(e.to_string()),
            TermError::FuelExhausted(_) => Failure::Internal(e.to_string()),
        }
    }
}

impl From<EngineError> for Failure {
    fn from(e: EngineError) -> Failure {
        match e {
            EngineError::Term(t) => t.into(),
            EngineError::IllFormedInput(_) => Failure::Parse(e.to_string()),
            _ => Failure::Internal(e.to_string()),
        }
    }
}

impl From<TypeError> for Failure {
    fn from(e: TypeError) -> Failure {
        Failure::Parse(e.to_string())
    }
}

fn fuels(common: &Common) -> Result<Fuels, Failure> {
    let mut f = Fuels::default();
    if let Ok(raw) = std::env::var("LEXKIT_FUEL_SCALE") {
        let scale: f64 = raw
            .parse()
            .map_err(|_| Failure::Usage(format!("LEXKIT_FUEL_SCALE is not a number: {raw:?}")))?;
        if !(scale > 0.0 && scale.is_finite()) {
            return Err(Failure::Usage(format!(
                "LEXKIT_FUEL_SCALE must be a positive number, got {raw:?}"
            )));
        }
        f = f.scaled(scale);
    }
    if let Some(n) = common.fuel {
        f.node_fuel = n;
        f.step_fuel = n;
    }
    if let Some(n) = common.node_fuel {
        f.node_fuel = n;
    }
    if let Some(n) = common.step_fuel {
        f.step_fuel = n;
    }
    if let Some(n) = common.class_bound {
        f.class_bound = n;
    }
    if let Some(n) = common.join_budget {
        f.join_budget = n;
    }
    for (name, v) in [
        ("--node-fuel", f.node_fuel),
        ("--step-fuel", f.step_fuel),
        ("--class-bound", f.class_bound),
        ("--join-budget", f.join_budget),
    ] {
        if v == 0 {
            return Err(Failure::Usage(format!("{name} must be positive")));
        }
    }
    Ok(f)
}

fn trace_json(steps: &[Step]) -> serde_json::Value {
    json!(steps
        .iter()
        .map(|s| json!({
            "rule": s.rule.name(),
            "position": s.position,
            "to": print_term(&s.after),
        }))
        .collect::<Vec<_>>())
}

fn print_trace(start: &GenTerm, steps: &[Step]) {
    println!("{}", print_term(start));
    for s in steps {
        println!("  --{}--> {}", s.rule.name(), print_term(&s.after));
    }
}

fn sn_json(v: &SnVerdict) -> serde_json::Value {
    match v {
        SnVerdict::ProvedSN { eta, max_size } => {
            json!({ "verdict": "sn", "eta": eta, "max_size": max_size })
        }
        SnVerdict::ProvedNotSN { witness } => json!({
            "verdict": "not-sn",
            "witness": witness.iter().map(print_term).collect::<Vec<_>>(),
        }),
        SnVerdict::Unknown => json!({ "verdict": "unknown" }),
    }
}

fn run(cli: &Cli) -> Result<u8, Failure> {
    let fuels = fuels(&cli.common)?;
    let js = cli.common.json;
    match &cli.command {
        Cmd::Reduce {
            term,
            ruleset,
            policy,
        } => {
            let t = parse_term(term)?;
            let (nf, steps, status) = match policy {
                PolicyArg::Leftmost => {
                    let (nf, steps) = normalize_leftmost(&t, &ruleset.get(), &fuels)?;
                    (nf, steps, "normal-form")
                }
                PolicyArg::Perpetual => {
                    if *ruleset != RulesetArg::Lex {
                        return Err(Failure::Usage(
                            "--policy perpetual only reduces under --ruleset lex".to_string(),
                        ));
                    }
                    let mut oracle = Oracle::new();
                    let tr = perpetual_trace(&t, &mut oracle, &fuels)?;
                    let steps = tr
                        .moves
                        .iter()
                        .flat_map(|m| m.expansion.iter().cloned())
                        .collect();
                    let status = match tr.status {
                        TraceStatus::NormalForm => "normal-form",
                        TraceStatus::Undecided => "undecided",
                        TraceStatus::FuelExhausted => {
                            return Err(Failure::Internal(
                                "step fuel exhausted before a normal form".to_string(),
                            ))
                        }
                    };
                    (tr.final_term, steps, status)
                }
            };
            if js {
                println!(
                    "{}",
                    serde_json::to_string_pretty(&json!({
                        "input": print_term(&t),
                        "ruleset": ruleset.name(),
                        "status": status,
                        "result": print_term(&nf),
                        "trace": trace_json(&steps),
                    }))
                    .unwrap()
                );
            } else {
                print_trace(&t, &steps);
                println!(
                    "{}: {}",
                    if status == "normal-form" {
                        "normal form"
                    } else {
                        status
                    },
                    print_term(&nf)
                );
            }
            Ok(if status == "undecided" { 2 } else { 0 })
        }
        Cmd::Reducts { term, ruleset } => {
            let t = parse_term(term)?;
            let steps = reducts(&t, &ruleset.get(), &fuels)?;
            if js {
                println!(
                    "{}",
                    serde_json::to_string_pretty(&json!({
                        "input": print_term(&t),
                        "ruleset": ruleset.name(),
                        "reducts": trace_json(&steps),
                    }))
                    .unwrap()
                );
            } else if steps.is_empty() {
                println!("normal form");
            } else {
                for s in &steps {
                    println!("{:<6} {}", s.rule.name(), print_term(&s.after));
                }
            }
            Ok(0)
        }
        Cmd::Sn { term, ruleset } => {
            let t = parse_term(term)?;
            let verdict = Oracle::new().sn_verdict(&t, &ruleset.get(), &fuels)?;
            if js {
                println!("{}", serde_json::to_string_pretty(&sn_json(&verdict)).unwrap());
            } else {
                match &verdict {
                    SnVerdict::ProvedSN { eta, max_size } => {
                        println!("strongly normalizing: longest path {eta}, largest term {max_size}")
                    }
                    SnVerdict::ProvedNotSN { witness } => {
                        println!("not strongly normalizing; cycle:");
                        for w in witness {
                            println!("  {}", print_term(w));
                        }
                    }
                    SnVerdict::Unknown => println!("unknown (fuel exhausted)"),
                }
            }
            Ok(match verdict {
                SnVerdict::ProvedSN { .. } => 0,
                SnVerdict::ProvedNotSN { .. } => 1,
                SnVerdict::Unknown => 2,
            })
        }
        Cmd::Isn { term } => {
            let t = parse_term(term)?;
            match isn_check(&t, fuels.node_fuel)? {
                Some(d) => {
                    if js {
                        println!("{}", serde_json::to_string_pretty(&d.to_json()).unwrap());
                    } else {
                        println!("derivable, {} rule applications", d.size());
                    }
                    Ok(0)
                }
                None => {
                    if js {
                        println!("{}", serde_json::to_string_pretty(&json!(null)).unwrap());
                    } else {
                        println!("unknown (no derivation within the depth budget)");
                    }
                    Ok(2)
                }
            }
        }
        Cmd::Strategy { term } => {
            let t = parse_term(term)?;
            let mut oracle = Oracle::new();
            let tr = perpetual_trace(&t, &mut oracle, &fuels)?;
            let status = match tr.status {
                TraceStatus::NormalForm => "normal-form",
                TraceStatus::Undecided => "undecided",
                TraceStatus::FuelExhausted => "fuel-exhausted",
            };
            if js {
                let moves = tr
                    .moves
                    .iter()
                    .map(|m| {
                        json!({
                            "clause": m.rule.name(),
                            "result": print_term(&m.result),
                            "steps": trace_json(&m.expansion),
                        })
                    })
                    .collect::<Vec<_>>();
                println!(
                    "{}",
                    serde_json::to_string_pretty(&json!({
                        "input": print_term(&t),
                        "status": status,
                        "moves": moves,
                        "result": print_term(&tr.final_term),
                    }))
                    .unwrap()
                );
            } else {
                println!("{}", print_term(&t));
                for m in &tr.moves {
                    println!("  ={:>6}=> {}", m.rule.name(), print_term(&m.result));
                }
                println!("{status}: {}", print_term(&tr.final_term));
            }
            Ok(match tr.status {
                TraceStatus::NormalForm => 0,
                TraceStatus::Undecided => 2,
                TraceStatus::FuelExhausted => 2,
            })
        }
        Cmd::Measure { term, vars } => {
            let t = parse_term(term)?;
            let vars: Vec<String> = if vars.is_empty() {
                t.free_vars().into_iter().collect()
            } else {
                vars.clone()
            };
            let mut oracle = Oracle::new();
            let m = measures(&t, &vars, &mut oracle, &fuels)?;
            if js {
                println!("{}", serde_json::to_string_pretty(&m.to_json()).unwrap());
            } else {
                for (x, a) in &m.ar {
                    println!("ar({x}) = {a}");
                }
                println!("dep = {}", m.dep);
                println!("k = {}", m.k);
                for (body, p) in &m.phi {
                    println!("phi({body}) = {p}");
                }
            }
            Ok(0)
        }
        Cmd::Xc { term } => {
            let t = parse_term(term)?;
            let r = xc(&t)?;
            if js {
                println!(
                    "{}",
                    serde_json::to_string_pretty(&json!({ "result": print_term(&r) })).unwrap()
                );
            } else {
                println!("{}", print_term(&r));
            }
            Ok(0)
        }
        Cmd::Unlabel { term } => {
            let t = parse_term(term)?;
            let r = unlabel(&t);
            if js {
                println!(
                    "{}",
                    serde_json::to_string_pretty(&json!({ "result": print_term(&r) })).unwrap()
                );
            } else {
                println!("{}", print_term(&r));
            }
            Ok(0)
        }
        Cmd::Typecheck { simple: _, term } => {
            let t = parse_term(term)?;
            match infer_simple(&Environment::new(), &t)? {
                Some(ty) => {
                    if js {
                        println!(
                            "{}",
                            serde_json::to_string_pretty(&json!({ "type": print_type(&ty) }))
                                .unwrap()
                        );
                    } else {
                        println!("{}", print_type(&ty));
                    }
                    Ok(0)
                }
                None => {
                    if js {
                        println!(
                            "{}",
                            serde_json::to_string_pretty(&json!({ "type": null })).unwrap()
                        );
                    } else {
                        println!("untypable");
                    }
                    Ok(1)
                }
            }
        }
        Cmd::CheckDerivation { file } => {
            let raw = std::fs::read_to_string(file)
                .map_err(|e| Failure::Parse(format!("{}: {e}", file.display())))?;
            let v: serde_json::Value = serde_json::from_str(&raw)
                .map_err(|e| Failure::Parse(format!("{}: {e}", file.display())))?;
            let d = TypeDerivation::from_json(&v)?;
            match check_derivation(&d) {
                Ok(()) => {
                    let line = format!(
                        "ok: {}|- {} : {}",
                        d.env
                            .iter()
                            .map(|(x, ty)| format!("{x}:{} ", print_type(ty)))
                            .collect::<String>(),
                        print_term(&d.term),
                        print_type(&d.ty)
                    );
                    if js {
                        println!(
                            "{}",
                            serde_json::to_string_pretty(&json!({ "ok": true })).unwrap()
                        );
                    } else {
                        println!("{line}");
                    }
                    Ok(0)
                }
                Err(TypeError::InvalidDerivation { path, message }) => {
                    if js {
                        println!(
                            "{}",
                            serde_json::to_string_pretty(&json!({
                                "ok": false,
                                "path": path,
                                "message": message,
                            }))
                            .unwrap()
                        );
                    } else {
                        println!("invalid at {path}: {message}");
                    }
                    Ok(1)
                }
                Err(e) => Err(e.into()),
            }
        }
        Cmd::Subtype { left, right } => {
            let a = parse_type(left)?;
            let b = parse_type(right)?;
            let yes = subtype(&a, &b);
            if js {
                println!(
                    "{}",
                    serde_json::to_string_pretty(&json!({ "subtype": yes })).unwrap()
                );
            } else {
                println!("{yes}");
            }
            Ok(if yes { 0 } else { 1 })
        }
        Cmd::Superdev { term } => {
            let t = parse_term(term)?;
            let r = superdev(&t)?;
            if js {
                println!(
                    "{}",
                    serde_json::to_string_pretty(&json!({ "result": print_term(&r) })).unwrap()
                );
            } else {
                println!("{}", print_term(&r));
            }
            Ok(0)
        }
        Cmd::Zcheck { term } => {
            let t = parse_term(term)?;
            let reports = z_check(&t, &fuels)?;
            let mut undecided = 0usize;
            let mut failed = 0usize;
            for r in &reports {
                match r.status {
                    ZStatus::Verified => {}
                    ZStatus::FuelExhausted => undecided += 1,
                    _ => failed += 1,
                }
            }
            if js {
                println!(
                    "{}",
                    serde_json::to_string_pretty(&json!(reports
                        .iter()
                        .map(|r| r.to_json())
                        .collect::<Vec<_>>()))
                    .unwrap()
                );
            } else if reports.is_empty() {
                println!("no steps to check");
            } else {
                for r in &reports {
                    println!(
                        "{:<14} --{}--> {}",
                        r.status.name(),
                        r.step.rule.name(),
                        print_term(&r.step.after)
                    );
                }
            }
            Ok(if failed > 0 {
                1
            } else if undecided > 0 {
                2
            } else {
                0
            })
        }
        Cmd::Confluence {
            term,
            depth,
            join_depth,
        } => {
            let t = parse_term(term)?;
            let rs = RuleSet::get(RuleSetName::LambdaEx);
            let report = confluence_check(&t, &rs, *depth, *join_depth, &fuels)?;
            if js {
                println!(
                    "{}",
                    serde_json::to_string_pretty(&report.to_json()).unwrap()
                );
            } else {
                match &report.result {
                    ConfluenceResult::Confluent => println!(
                        "confluent: {} reachable terms, {} peak pairs joined",
                        report.reachable, report.pairs
                    ),
                    ConfluenceResult::Counterexample { left, right } => println!(
                        "counterexample: {} and {} do not join",
                        print_term(left),
                        print_term(right)
                    ),
                    ConfluenceResult::FuelExhausted => println!("unknown (fuel exhausted)"),
                }
            }
            Ok(match report.result {
                ConfluenceResult::Confluent => 0,
                ConfluenceResult::Counterexample { .. } => 1,
                ConfluenceResult::FuelExhausted => 2,
            })
        }
        Cmd::Suite { name } => {
            if !SUITE_NAMES.contains(&name.as_str()) {
                return Err(Failure::Usage(format!(
                    "unknown suite {name:?}; valid names: {}",
                    SUITE_NAMES.join(", ")
                )));
            }
            let rows = run_suite(name, &fuels, cli.common.seed)?;
            let failed = rows.iter().filter(|r| !r.pass).count();
            if js {
                println!(
                    "{}",
                    serde_json::to_string_pretty(&json!(rows
                        .iter()
                        .map(|r| json!({
                            "name": r.name,
                            "pass": r.pass,
                            "detail": r.detail,
                        }))
                        .collect::<Vec<_>>()))
                    .unwrap()
                );
            } else {
                for r in &rows {
                    println!(
                        "[{}] {}: {}",
                        if r.pass { "pass" } else { "FAIL" },
                        r.name,
                        r.detail
                    );
                }
                println!(
                    "{}: {} checks, {} failed",
                    name,
                    rows.len(),
                    failed
                );
            }
            Ok(if failed == 0 { 0 } else { 1 })
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            use clap::error::ErrorKind;
            if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) {
                print!("{e}");
                return ExitCode::SUCCESS;
            }
            eprint!("{e}");
            return ExitCode::from(64);
        }
    };
    match run(&cli) {
        Ok(code) => ExitCode::from(code),
        Err(f) => {
            eprintln!("error: {}", f.message());
            ExitCode::from(f.exit())
        }
    }
}
