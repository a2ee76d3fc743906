//! `noderep`: reduce, measure, split and type terms of the node-replication
//! calculus from the command line.

use std::collections::{BTreeMap, BTreeSet};
use std::io::Read;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Value};

use noderep::measures::{cl_measure, level};
use noderep::rewrite::{fire, pi_redexes, r_redexes, sub_normalize_trace, unfold};
use noderep::strategies::{
    flneed_normalize, mfe_list, name_normalize, skeleton, split_bigstep, st_step, whr_step, NamePolicy,
};
use noderep::term::{check_grammar, Grammar, Printer, Sel};
use noderep::trace::{Label, Status, Step, Trace};
use noderep::types::{check_derivation, infer, measure_d, Derivation};
use noderep::{Error, FreshSupply, Term};

#[derive(Parser)]
#[command(name = "noderep", version, about = "Node-replication calculus workbench")]
struct Cli {
    /// Step budget for strategies and inference.
    #[arg(long, global = true, default_value_t = 10_000)]
    fuel: usize,
    #[arg(long, global = true, value_enum, default_value_t = Format::Text)]
    format: Format,
    /// Seed for randomized exploration.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Redex choice for the name strategy.
    #[arg(long, global = true, value_enum, default_value_t = Policy::PreferDb)]
    policy: Policy,
    /// Comma-separated variables treated as bound by the skeleton commands.
    #[arg(long, global = true, value_delimiter = ',')]
    theta: Vec<String>,
    /// Print `λ` instead of `\`.
    #[arg(long, global = true)]
    unicode: bool,
    /// Read the term from a file instead of the command line.
    #[arg(long, short = 'f', global = true)]
    file: Option<String>,
    #[command(subcommand)]
    cmd: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Text,
    Json,
}

#[derive(Clone, Copy, ValueEnum)]
enum Policy {
    PreferDb,
    PreferSub,
    Leftmost,
}

#[derive(Clone, Copy, ValueEnum)]
enum Strategy {
    Name,
    Flneed,
    Sub,
    St,
    #[value(name = "r-explore")]
    RExplore,
}

#[derive(Clone, Copy, ValueEnum)]
enum MeasureKind {
    Level,
    Cl,
    D,
}

#[derive(Clone, Copy, ValueEnum)]
enum SkeletonMode {
    Bigstep,
    Smallstep,
    Mfe,
}

#[derive(Subcommand)]
enum Command {
    /// Reduce a term and print the trace.
    Reduce {
        #[arg(value_enum)]
        strategy: Strategy,
        term: Option<String>,
    },
    /// Print a measure of a term.
    Measure {
        #[arg(value_enum)]
        kind: MeasureKind,
        term: Option<String>,
        /// Variable whose level is wanted (every cut variable when absent).
        #[arg(long)]
        var: Option<String>,
    },
    /// Skeleton, maximal free expressions and splittings of a pure term.
    Skeleton {
        #[arg(value_enum)]
        mode: SkeletonMode,
        term: Option<String>,
    },
    /// Check grammar membership, or validate a derivation file with `derivation`.
    Check { target: String, input: Option<String> },
    /// Infer a typing derivation by normalizing and expanding back.
    Infer { term: Option<String> },
    /// Run both strategies and weak head reduction side by side.
    Diff { term: Option<String> },
}

/// `println!` that ignores a closed stdout.
macro_rules! outln {
    ($($arg:tt)*) => {{
        use std::io::Write;
        let _ = writeln!(std::io::stdout().lock(), $($arg)*);
    }};
}

const OK: u8 = 0;
const USER_ERROR: u8 = 1;
const FUEL: u8 = 2;

struct Out {
    format: Format,
    printer: Printer,
}

impl Out {
    fn term(&self, t: &Term) -> String {
        self.printer.print(t)
    }

    fn emit(&self, text: impl AsRef<str>, value: Value) {
        match self.format {
            Format::Text => outln!("{}", text.as_ref()),
            Format::Json => outln!("{value}"),
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(code) => ExitCode::from(code),
        Err(msg) => {
            eprintln!("error: {msg}");
            ExitCode::from(USER_ERROR)
        }
    }
}

fn read_input(arg: Option<&str>, file: Option<&str>) -> Result<String, String> {
    match (arg, file) {
        (Some(_), Some(_)) => Err("give the term either inline or with --file, not both".into()),
        (None, Some(path)) => read_path(path),
        (Some("-"), None) => read_path("-"),
        (Some(s), None) => Ok(s.to_string()),
        (None, None) => Err("missing input term".into()),
    }
}

fn read_path(path: &str) -> Result<String, String> {
    if path == "-" {
        let mut s = String::new();
        std::io::stdin().read_to_string(&mut s).map_err(|e| e.to_string())?;
        Ok(s)
    } else {
        std::fs::read_to_string(path).map_err(|e| format!("{path}: {e}"))
    }
}

fn parse_term(src: &str) -> Result<Term, String> {
    noderep::parse(src.trim()).map_err(|e| e.to_string())
}

fn supply_for(t: &Term) -> FreshSupply {
    FreshSupply::with_avoid(t.names())
}

fn run(cli: &Cli) -> Result<u8, String> {
    let out = Out {
        format: cli.format,
        printer: Printer { unicode: cli.unicode },
    };
    let file = cli.file.as_deref();
    match &cli.cmd {
        Command::Reduce { strategy, term } => {
            let t = parse_term(&read_input(term.as_deref(), file)?)?;
            reduce(cli, &out, *strategy, &t)
        }
        Command::Measure { kind, term, var } => {
            let t = parse_term(&read_input(term.as_deref(), file)?)?;
            measure(cli, &out, *kind, &t, var.as_deref())
        }
        Command::Skeleton { mode, term } => {
            let t = parse_term(&read_input(term.as_deref(), file)?)?;
            split(cli, &out, *mode, &t)
        }
        Command::Check { target, input } => check(&out, target, input.as_deref(), file),
        Command::Infer { term } => {
            let t = parse_term(&read_input(term.as_deref(), file)?)?;
            infer_cmd(cli, &out, &t)
        }
        Command::Diff { term } => {
            let t = parse_term(&read_input(term.as_deref(), file)?)?;
            diff(cli, &out, &t)
        }
    }
}

// ---------------------------------------------------------------------------
// Traces

fn path_text(p: &[Sel]) -> String {
    if p.is_empty() {
        return "root".into();
    }
    p.iter().map(|s| format!("{s:?}")).collect::<Vec<_>>().join(".")
}

/// Level of every cut variable in its own body.
fn cut_levels(t: &Term) -> BTreeMap<String, usize> {
    let mut m = BTreeMap::new();
    for p in t.paths() {
        if let Some((_, b, x, _)) = t.at(&p).and_then(|n| n.as_cut()) {
            m.insert(x.clone(), level(b, x));
        }
    }
    m
}

fn step_line(out: &Out, n: usize, label: Label, path: &[Sel], term: &Term) {
    let key = match label {
        Label::Rule(_) => "rule",
        Label::Kind(_) => "kind",
    };
    let mut v = json!({
        "step": n,
        key: label.to_string(),
        "path": path,
        "term": out.term(term),
        "cl": cl_measure(term).to_string(),
    });
    let lv = cut_levels(term);
    if !lv.is_empty() {
        v["lv"] = json!(lv);
    }
    let label = label.to_string();
    out.emit(format!("{n:>4}  {label:<7} {}  @ {}", out.term(term), path_text(path)), v);
}

fn print_trace(out: &Out, trace: &Trace) -> u8 {
    if out.format == Format::Text {
        outln!("{:>4}  {:<7} {}", 0, "", out.term(&trace.initial));
    }
    for (i, s) in trace.steps.iter().enumerate() {
        step_line(out, i + 1, s.label, &s.path, &s.term);
    }
    finish(out, trace.status, trace.len())
}

fn finish(out: &Out, status: Status, steps: usize) -> u8 {
    match status {
        Status::NormalForm => {
            if out.format == Format::Text {
                outln!("normal form after {steps} steps");
            }
            OK
        }
        Status::FuelExhausted => {
            eprintln!("fuel exhausted after {steps} steps");
            FUEL
        }
    }
}

fn reduce(cli: &Cli, out: &Out, strategy: Strategy, t: &Term) -> Result<u8, String> {
    let mut supply = supply_for(t);
    let err = |e: Error| e.to_string();
    let trace = match strategy {
        Strategy::Name => {
            let policy = match cli.policy {
                Policy::PreferDb => NamePolicy::PreferDB,
                Policy::PreferSub => NamePolicy::PreferSub,
                Policy::Leftmost => NamePolicy::Leftmost,
            };
            name_normalize(t, cli.fuel, policy, &mut supply).map_err(err)?
        }
        Strategy::Flneed => flneed_normalize(t, cli.fuel, &mut supply).map_err(err)?,
        Strategy::Sub => {
            let mut tr = sub_normalize_trace(t, &mut supply).map_err(err)?;
            if tr.len() > cli.fuel {
                tr.steps.truncate(cli.fuel);
                tr.status = Status::FuelExhausted;
            }
            tr
        }
        Strategy::St => {
            let mut tr = Trace::new(t.clone());
            tr.status = Status::FuelExhausted;
            let mut cur = t.clone();
            for _ in 0..cli.fuel {
                match st_step(&cur, &mut supply).map_err(err)? {
                    Some((kind, next)) => {
                        tr.steps.push(Step {
                            label: Label::Kind(kind),
                            path: Vec::new(),
                            term: next.clone(),
                            micros: Vec::new(),
                        });
                        cur = next;
                    }
                    None => {
                        tr.status = Status::NormalForm;
                        break;
                    }
                }
            }
            if tr.status == Status::FuelExhausted && st_step(&cur, &mut supply).map_err(err)?.is_none() {
                tr.status = Status::NormalForm;
            }
            tr
        }
        Strategy::RExplore => explore(cli, t, &mut supply).map_err(err)?,
    };
    Ok(print_trace(out, &trace))
}

/// A seeded random walk over π and R redexes.
fn explore(cli: &Cli, t: &Term, supply: &mut FreshSupply) -> noderep::Result<Trace> {
    let mut rng = ChaCha8Rng::seed_from_u64(cli.seed);
    let mut tr = Trace::new(t.clone());
    let mut cur = t.clone();
    for _ in 0..=cli.fuel {
        let mut redexes = pi_redexes(&cur);
        redexes.extend(r_redexes(&cur, false));
        let Some(r) = redexes.choose(&mut rng) else {
            tr.status = Status::NormalForm;
            return Ok(tr);
        };
        if tr.len() == cli.fuel {
            break;
        }
        let fired = fire(&cur, r, supply)?;
        cur = fired.term.clone();
        tr.steps.push(Step {
            label: Label::Rule(r.rule),
            path: r.path.clone(),
            term: fired.term,
            micros: fired.micros,
        });
    }
    tr.status = Status::FuelExhausted;
    Ok(tr)
}

// ---------------------------------------------------------------------------
// Measures, splitting, checking

fn measure(cli: &Cli, out: &Out, kind: MeasureKind, t: &Term, var: Option<&str>) -> Result<u8, String> {
    match kind {
        MeasureKind::Cl => {
            let cl = cl_measure(t).to_string();
            out.emit(&cl, json!({ "cl": cl }));
        }
        MeasureKind::Level => match var {
            Some(x) => {
                let lv = level(t, x);
                out.emit(lv.to_string(), json!({ "var": x, "lv": lv }));
            }
            None => {
                let lv = cut_levels(t);
                let text: Vec<String> = lv.iter().map(|(x, n)| format!("{x}: {n}")).collect();
                out.emit(text.join("\n"), json!({ "lv": lv }));
            }
        },
        MeasureKind::D => {
            let mut supply = supply_for(t);
            match infer(t, cli.fuel, &mut supply).map_err(|e| e.to_string())? {
                Some(d) => {
                    let m = measure_d(&d);
                    out.emit(m.to_string(), json!({ "d": [m.0, m.1, m.2] }));
                }
                None => {
                    eprintln!("no derivation found within fuel {}", cli.fuel);
                    return Ok(FUEL);
                }
            }
        }
    }
    Ok(OK)
}

fn split(cli: &Cli, out: &Out, mode: SkeletonMode, t: &Term) -> Result<u8, String> {
    let theta: BTreeSet<String> = cli.theta.iter().map(|s| s.trim().to_string()).filter(|s| !s.is_empty()).collect();
    let err = |e: Error| e.to_string();
    let mut supply = supply_for(t);
    match mode {
        SkeletonMode::Mfe => {
            let sk = skeleton(t, &theta).map_err(err)?;
            let mfes: Vec<String> = mfe_list(t, &theta).map_err(err)?.iter().map(|m| out.term(m)).collect();
            out.emit(
                format!("skeleton: {sk}\nmfes: [{}]", mfes.join("; ")),
                json!({ "skeleton": sk.to_string(), "mfes": mfes }),
            );
        }
        SkeletonMode::Bigstep => {
            let r = split_bigstep(t, &theta, &mut supply).map_err(err)?;
            out.emit(out.term(&r), json!({ "term": out.term(&r) }));
        }
        SkeletonMode::Smallstep => {
            let mut cur = t.clone();
            let mut n = 0;
            if out.format == Format::Text {
                outln!("{:>4}  {:<7} {}", 0, "", out.term(&cur));
            }
            while let Some((kind, next)) = st_step(&cur, &mut supply).map_err(err)? {
                n += 1;
                step_line(out, n, Label::Kind(kind), &[], &next);
                cur = next;
            }
        }
    }
    Ok(OK)
}

fn grammar(tag: &str) -> Option<Grammar> {
    Some(match tag.to_ascii_lowercase().as_str() {
        "pure" => Grammar::Pure,
        "u" => Grammar::U,
        "t" => Grammar::T,
        "ll" => Grammar::LL,
        "value" => Grammar::Value,
        "answer" => Grammar::Answer,
        "na" => Grammar::Na,
        "ne" => Grammar::Ne,
        _ => return None,
    })
}

fn check(out: &Out, target: &str, input: Option<&str>, file: Option<&str>) -> Result<u8, String> {
    if target == "derivation" {
        let src = match (input, file) {
            (Some(p), None) | (None, Some(p)) => read_path(p)?,
            _ => return Err("check derivation takes exactly one file (or - for stdin)".into()),
        };
        let d = if src.trim_start().starts_with('{') {
            serde_json::from_str::<Derivation>(&src).map_err(|e| e.to_string())?
        } else {
            Derivation::from_text(&src).map_err(|e| e.to_string())?
        };
        return match check_derivation(&d) {
            Ok(()) => {
                out.emit("valid", json!({ "valid": true }));
                Ok(OK)
            }
            Err(e) => {
                out.emit(format!("invalid: {e}"), json!({ "valid": false, "error": e.to_string() }));
                Ok(USER_ERROR)
            }
        };
    }
    let g = grammar(target).ok_or_else(|| {
        format!("unknown grammar `{target}` (expected pure, u, t, ll, value, answer, na, ne or derivation)")
    })?;
    let t = parse_term(&read_input(input, file)?)?;
    let member = check_grammar(&t, g);
    out.emit(if member { "yes" } else { "no" }, json!({ "grammar": target, "member": member }));
    Ok(OK)
}

fn infer_cmd(cli: &Cli, out: &Out, t: &Term) -> Result<u8, String> {
    let mut supply = supply_for(t);
    match infer(t, cli.fuel, &mut supply).map_err(|e| e.to_string())? {
        Some(d) => {
            let m = measure_d(&d);
            out.emit(
                format!("{}D = {m}", d.to_text()),
                json!({ "derivation": d, "d": [m.0, m.1, m.2] }),
            );
            Ok(OK)
        }
        None => {
            eprintln!("no derivation found within fuel {}", cli.fuel);
            Ok(FUEL)
        }
    }
}

fn diff(cli: &Cli, out: &Out, t: &Term) -> Result<u8, String> {
    let err = |e: Error| e.to_string();
    let mut supply = supply_for(t);
    let name = name_normalize(t, cli.fuel, NamePolicy::PreferDB, &mut supply).map_err(err)?;
    let flneed = flneed_normalize(t, cli.fuel, &mut supply).map_err(err)?;
    let mut pure = unfold(t);
    let mut whr = 0;
    let mut whr_done = false;
    while whr < cli.fuel {
        match whr_step(&pure).map_err(err)? {
            Some(next) => {
                pure = next;
                whr += 1;
            }
            None => {
                whr_done = true;
                break;
            }
        }
    }
    let name_nf = name.status == Status::NormalForm;
    let fl_nf = flneed.status == Status::NormalForm;
    let agree = name_nf == fl_nf && fl_nf == whr_done;
    let row = |label: &str, tr: &Trace| {
        format!(
            "{label:<7} {:<13} steps={:<6} dB={:<6} {}",
            format!("{:?}", tr.status),
            tr.len(),
            tr.db_steps(),
            out.term(tr.final_term())
        )
    };
    let whr_status = if whr_done { "NormalForm" } else { "FuelExhausted" };
    let text = format!(
        "{}\n{}\n{:<7} {:<13} steps={:<6} {}\nagree: {agree}",
        row("name", &name),
        row("flneed", &flneed),
        "whr",
        whr_status,
        whr,
        out.term(&pure)
    );
    let summary = |tr: &Trace| {
        json!({
            "status": tr.status,
            "steps": tr.len(),
            "db": tr.db_steps(),
            "term": out.term(tr.final_term()),
        })
    };
    out.emit(
        text,
        json!({
            "name": summary(&name),
            "flneed": summary(&flneed),
            "whr": { "status": whr_status, "steps": whr, "term": out.term(&pure) },
            "agree": agree,
        }),
    );
    Ok(if !name_nf && !fl_nf && !whr_done { FUEL } else if agree { OK } else { USER_ERROR })
}
