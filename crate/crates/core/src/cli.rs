//! The `dehn` command line. `run` does all the work against explicit streams
//! so tests can drive it in-process.

use std::ffi::OsString;
use std::fmt::Display;
use std::io::{Read, Write};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::json;

use crate::abelian::{abelian_invariants, family_infinite};
use crate::area::{dehn_function_estimate, AreaOptions, DEFAULT_NODE_CAP};
use crate::cayley::{
    build_ball, check_homogeneous, check_regular, CayleyDiagram, CayleyJson, LabelSpec, LabeledDigraph,
};
use crate::coset::{enumerate_cosets, CosetStatus, DEFAULT_MAX_COSETS};
use crate::dehn::{DehnSolver, DehnStep};
use crate::knot::{
    dehn_presentation, parse_pd, peripheral, surgery_presentation, wirtinger, KnotDiagram, SignConvention,
};
use crate::oracle::{CosetOracle, DehnOracle, FreeOracle, TorusOracle, WordOracle};
use crate::presentation::Presentation;
use crate::torus::TorusGroup;
use crate::words::{free_reduce, Word};

/// Coset budget tried by `--oracle auto` before falling back to Dehn rules.
pub const AUTO_COSET_BUDGET: usize = 20_000;

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Dot,
    Tsv,
    Text,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum OracleChoice {
    Auto,
    Coset,
    Dehn,
    TorusNf,
    Free,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Convention {
    LeftRight,
    RightLeft,
}

impl From<Convention> for SignConvention {
    fn from(c: Convention) -> Self {
        match c {
            Convention::LeftRight => SignConvention::LeftRight,
            Convention::RightLeft => SignConvention::RightLeft,
        }
    }
}

#[derive(Args, Debug)]
struct Common {
    /// Output format (each command supports a subset).
    #[arg(long, value_enum, global = true)]
    format: Option<Format>,
    #[arg(long, value_enum, default_value = "auto", global = true)]
    oracle: OracleChoice,
    #[arg(long, default_value_t = DEFAULT_MAX_COSETS, global = true)]
    max_cosets: usize,
    /// Torus-knot parameters for `--oracle torus-nf`, as `K,L`.
    #[arg(long, value_parser = parse_pair, global = true)]
    torus: Option<(u32, u32)>,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Decide whether a word is trivial.
    Wp { input: String, word: String },
    /// Free reduction (`--oracle free`) or Dehn's algorithm with its trace.
    Reduce { input: String, word: String },
    /// Abelian invariants of the presented group.
    Abelianize { input: String },
    /// Todd-Coxeter enumeration of the cosets of a subgroup.
    CosetEnum {
        input: String,
        /// Subgroup generator (repeatable); none means the trivial subgroup.
        #[arg(long)]
        subgroup: Vec<String>,
        /// Include the full table in JSON output.
        #[arg(long)]
        table: bool,
    },
    /// Order of a finite group.
    Order { input: String },
    /// Ball of the Cayley diagram around the identity.
    CayleyBall {
        input: String,
        #[arg(long)]
        radius: usize,
        /// Generator to draw as an undirected edge (repeatable).
        #[arg(long)]
        involution: Vec<String>,
    },
    /// Regularity and homogeneity of a labeled diagram given as JSON.
    CheckDiagram {
        input: String,
        #[arg(long)]
        involution: Vec<String>,
    },
    /// Knot-group presentations from a PD code.
    Knot {
        #[command(subcommand)]
        command: KnotCommand,
    },
    /// Table of the Dehn function δ(n) for n up to a bound.
    DehnFn {
        input: String,
        #[arg(long)]
        n_max: usize,
        /// Longest intermediate word; default |w| + 2·(longest relator).
        #[arg(long)]
        length_cap: Option<usize>,
        #[arg(long, default_value_t = DEFAULT_NODE_CAP)]
        node_cap: usize,
    },
    /// Exact test of the infiniteness inequality for the triangle family.
    FamilyInfinite { alpha: i64, beta: i64 },
    /// Normal form of a word in the torus-knot group (needs `--torus K,L`).
    NormalForm { word: String },
}

#[derive(Args, Debug)]
struct KnotArgs {
    /// PD code, inline (`PD[...]`), a file, or `-` for standard input.
    pd: String,
    #[arg(long, value_enum, default_value = "left-right")]
    convention: Convention,
}

#[derive(Subcommand, Debug)]
enum KnotCommand {
    Wirtinger {
        #[command(flatten)]
        knot: KnotArgs,
        /// Drop the last crossing relator, which follows from the others.
        #[arg(long)]
        drop_redundant: bool,
    },
    Dehn {
        #[command(flatten)]
        knot: KnotArgs,
    },
    Peripheral {
        #[command(flatten)]
        knot: KnotArgs,
    },
    Surgery {
        #[command(flatten)]
        knot: KnotArgs,
        #[arg(long, allow_hyphen_values = true)]
        k: i64,
    },
}

fn parse_pair(s: &str) -> Result<(u32, u32), String> {
    let (a, b) = s.split_once(',').ok_or("expected K,L")?;
    let parse = |x: &str| x.trim().parse::<u32>().map_err(|e| format!("'{x}': {e}"));
    Ok((parse(a)?, parse(b)?))
}

enum Failure {
    Usage(String),
    Domain(String),
}

fn domain(e: impl Display) -> Failure {
    Failure::Domain(e.to_string())
}

fn usage(e: impl Display) -> Failure {
    Failure::Usage(e.to_string())
}

type Outcome = Result<String, Failure>;

struct Io<'a> {
    stdin: &'a mut dyn Read,
}

impl Io<'_> {
    /// Inline text, `-` for standard input, or a file path.
    fn load(&mut self, arg: &str, inline: impl Fn(&str) -> bool) -> Result<String, Failure> {
        if inline(arg) {
            return Ok(arg.to_string());
        }
        if arg == "-" {
            let mut s = String::new();
            self.stdin.read_to_string(&mut s).map_err(|e| domain(format!("reading standard input: {e}")))?;
            return Ok(s);
        }
        std::fs::read_to_string(arg).map_err(|e| domain(format!("{arg}: {e}")))
    }

    /// A presentation from text, or from JSON carrying a `presentation`
    /// field (the output of the knot commands).
    fn presentation(&mut self, arg: &str) -> Result<Presentation, Failure> {
        let text = self.load(arg, |a| a.trim_start().starts_with('<'))?;
        let trimmed = text.trim_start();
        let text = if trimmed.starts_with('{') {
            let v: serde_json::Value = serde_json::from_str(trimmed).map_err(domain)?;
            v.get("presentation")
                .and_then(|p| p.as_str())
                .ok_or_else(|| domain("JSON input has no \"presentation\" string"))?
                .to_string()
        } else {
            text
        };
        Presentation::parse(&text).map_err(domain)
    }

    fn knot(&mut self, arg: &str) -> Result<KnotDiagram, Failure> {
        let text = self.load(arg, |a| a.trim_start().starts_with("PD"))?;
        parse_pd(&text).map_err(domain)
    }
}

fn pick(format: Option<Format>, default: Format, allowed: &[Format]) -> Result<Format, Failure> {
    let f = format.unwrap_or(default);
    if allowed.contains(&f) {
        Ok(f)
    } else {
        Err(usage(format!("this command does not support --format {:?}", f).to_lowercase()))
    }
}

fn to_json(v: &impl Serialize) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("output serializes");
    s.push('\n');
    s
}

fn has_relators(p: &Presentation) -> bool {
    p.relators().iter().any(|r| !free_reduce(r).is_empty())
}

fn oracle_for(p: &Presentation, c: &Common) -> Result<Box<dyn WordOracle>, Failure> {
    match c.oracle {
        OracleChoice::Free => {
            if has_relators(p) {
                return Err(usage("--oracle free needs a presentation without relators"));
            }
            Ok(Box::new(FreeOracle))
        }
        OracleChoice::Coset => Ok(Box::new(CosetOracle::enumerate(p, c.max_cosets).map_err(domain)?)),
        OracleChoice::Dehn => Ok(Box::new(DehnOracle::new(p))),
        OracleChoice::TorusNf => {
            let (k, l) = c.torus.or_else(|| TorusOracle::detect(p)).ok_or_else(|| {
                usage("--oracle torus-nf needs --torus K,L or a recognizable torus-knot presentation")
            })?;
            Ok(Box::new(TorusOracle::new(p, k, l).map_err(usage)?))
        }
        OracleChoice::Auto => {
            if !has_relators(p) {
                return Ok(Box::new(FreeOracle));
            }
            if let Some((k, l)) = c.torus.or_else(|| TorusOracle::detect(p)) {
                return Ok(Box::new(TorusOracle::new(p, k, l).map_err(usage)?));
            }
            match CosetOracle::enumerate(p, c.max_cosets.min(AUTO_COSET_BUDGET)) {
                Ok(o) => Ok(Box::new(o)),
                Err(_) => Ok(Box::new(DehnOracle::new(p))),
            }
        }
    }
}

fn parse_word(p: &Presentation, text: &str) -> Result<Word, Failure> {
    p.parse_word(text).map_err(domain)
}

fn wp(io: &mut Io, c: &Common, input: &str, word: &str) -> Outcome {
    let format = pick(c.format, Format::Text, &[Format::Text, Format::Json])?;
    let p = io.presentation(input)?;
    let w = parse_word(&p, word)?;
    let oracle = oracle_for(&p, c)?;
    let trivial = oracle.is_trivial(&w).map_err(domain)?;
    let assumption = (!trivial).then(|| oracle.assumption()).flatten();
    Ok(match format {
        Format::Json => to_json(&json!({
            "trivial": trivial,
            "oracle": oracle.name(),
            "exact": trivial || oracle.is_exact(),
            "assumption": assumption,
        })),
        _ => match assumption {
            Some(a) => format!("nontrivial\nassumption: {a}\n"),
            None => format!("{}\n", if trivial { "trivial" } else { "nontrivial" }),
        },
    })
}

fn reduce(io: &mut Io, c: &Common, input: &str, word: &str) -> Outcome {
    let format = pick(c.format, Format::Text, &[Format::Text, Format::Json])?;
    let p = io.presentation(input)?;
    let w = parse_word(&p, word)?;
    if c.oracle == OracleChoice::Free {
        let r = p.render(&free_reduce(&w));
        return Ok(match format {
            Format::Json => to_json(&json!({ "result": r })),
            _ => format!("{r}\n"),
        });
    }
    if !matches!(c.oracle, OracleChoice::Auto | OracleChoice::Dehn) {
        return Err(usage("reduce supports --oracle dehn or free"));
    }
    let solver = DehnSolver::new(&p);
    let trace = solver.reduce(&w);
    let steps: Vec<serde_json::Value> = trace
        .steps
        .iter()
        .map(|s| match *s {
            DehnStep::FreeCancellation { position } => json!({ "free": position }),
            DehnStep::Rule { position, rule } => {
                let r = &solver.rules()[rule];
                json!({ "rule": position, "lhs": p.render(&r.lhs), "rhs": p.render(&r.rhs) })
            }
        })
        .collect();
    let result = p.render(&trace.final_word);
    Ok(match format {
        Format::Json => to_json(&json!({ "steps": steps, "result": result, "rule_steps": trace.rule_steps() })),
        _ => {
            let mut out = String::new();
            for s in &trace.steps {
                match *s {
                    DehnStep::FreeCancellation { position } => out.push_str(&format!("free {position}\n")),
                    DehnStep::Rule { position, rule } => {
                        let r = &solver.rules()[rule];
                        let rhs = if r.rhs.is_empty() { "1".to_string() } else { p.render(&r.rhs) };
                        out.push_str(&format!("rule {position}: {} -> {rhs}\n", p.render(&r.lhs)));
                    }
                }
            }
            out.push_str(&format!("result: {}\n", if result.is_empty() { "1" } else { &result }));
            out
        }
    })
}

fn abelianize(io: &mut Io, c: &Common, input: &str) -> Outcome {
    let format = pick(c.format, Format::Json, &[Format::Text, Format::Json])?;
    let p = io.presentation(input)?;
    let inv = abelian_invariants(&p).map_err(domain)?;
    Ok(match format {
        Format::Json => format!("{}\n", serde_json::to_string(&inv).expect("invariants serialize")),
        _ => format!("{inv}\n"),
    })
}

fn coset_enum(io: &mut Io, c: &Common, input: &str, subgroup: &[String], table: bool) -> Outcome {
    let format = pick(c.format, Format::Json, &[Format::Text, Format::Json])?;
    let p = io.presentation(input)?;
    let h = subgroup.iter().map(|s| parse_word(&p, s)).collect::<Result<Vec<_>, _>>()?;
    let t = enumerate_cosets(&p, &h, c.max_cosets).map_err(domain)?;
    Ok(match format {
        Format::Json => {
            let mut v = t.to_json();
            if !table {
                v.as_object_mut().expect("table is an object").remove("table");
            }
            to_json(&v)
        }
        _ => match t.status() {
            CosetStatus::Complete => format!("{}\n", t.len()),
            CosetStatus::Overflowed { limit } => format!("overflowed at {limit} cosets\n"),
        },
    })
}

fn order(io: &mut Io, c: &Common, input: &str) -> Outcome {
    let format = pick(c.format, Format::Text, &[Format::Text, Format::Json])?;
    let p = io.presentation(input)?;
    let t = enumerate_cosets(&p, &[], c.max_cosets).map_err(domain)?;
    let n = t
        .group_order()
        .ok_or_else(|| domain(format!("coset enumeration exceeded {} cosets; order unknown", c.max_cosets)))?;
    Ok(match format {
        Format::Json => to_json(&json!({ "order": n })),
        _ => format!("{n}\n"),
    })
}

fn cayley_ball(io: &mut Io, c: &Common, input: &str, radius: usize, involution: &[String]) -> Outcome {
    let format = pick(c.format, Format::Json, &[Format::Json, Format::Dot])?;
    let p = io.presentation(input)?;
    for name in involution {
        if p.generators().index(name).is_none() {
            return Err(usage(format!("--involution {name}: not a generator")));
        }
    }
    let oracle = oracle_for(&p, c)?;
    let d = build_ball(&p, oracle.as_ref(), radius).map_err(domain)?;
    Ok(match format {
        Format::Dot => d.to_dot(involution),
        _ => to_json(&d.to_json()),
    })
}

/// Accepts the JSON written by `cayley-ball`, or a bare labeled digraph
/// `{"vertices": n, "edges": [{"from", "to", "label"}]}`.
fn check_diagram(io: &mut Io, c: &Common, input: &str, involution: &[String]) -> Outcome {
    let format = pick(c.format, Format::Json, &[Format::Text, Format::Json])?;
    let text = io.load(input, |a| a.trim_start().starts_with('{'))?;
    let v: serde_json::Value = serde_json::from_str(&text).map_err(domain)?;
    let (graph, labels, complete) = if v.get("vertices").is_some_and(|x| x.is_array()) {
        let j: CayleyJson = serde_json::from_value(v).map_err(domain)?;
        let d = CayleyDiagram::from_json(&j).map_err(domain)?;
        (d.to_digraph(involution), d.labels(involution), d.complete)
    } else {
        let g: LabeledDigraph = serde_json::from_value(v).map_err(domain)?;
        let mut names: Vec<String> = g.edges.iter().map(|e| e.label.clone()).collect();
        names.sort();
        names.dedup();
        let labels = names.into_iter().map(|name| LabelSpec { involutive: involution.contains(&name), name }).collect();
        (g, labels, true)
    };
    let regular = check_regular(&graph, &labels);
    // Homogeneity is only meaningful on a finite, complete diagram.
    let homogeneous = if complete { Some(check_homogeneous(&graph, &labels).map_err(domain)?) } else { None };
    Ok(match format {
        Format::Json => to_json(&json!({
            "vertices": graph.vertices,
            "regular": regular,
            "homogeneous": homogeneous,
        })),
        _ => {
            let h = homogeneous.map_or("not checked (incomplete diagram)".to_string(), |h| h.to_string());
            format!("regular: {regular}\nhomogeneous: {h}\n")
        }
    })
}

fn presentation_output(p: &Presentation, format: Format, extra: serde_json::Value) -> String {
    match format {
        Format::Json => {
            let mut v = json!({
                "generators": p.generators().names(),
                "relators": p.relator_strings(),
                "presentation": p.to_string(),
            });
            if let serde_json::Value::Object(m) = extra {
                v.as_object_mut().expect("object").extend(m);
            }
            to_json(&v)
        }
        _ => format!("{p}\n"),
    }
}

fn knot(io: &mut Io, c: &Common, command: &KnotCommand) -> Outcome {
    let format = pick(c.format, Format::Text, &[Format::Text, Format::Json])?;
    Ok(match command {
        KnotCommand::Wirtinger { knot, drop_redundant } => {
            let d = io.knot(&knot.pd)?;
            let w = wirtinger(&d, *drop_redundant).map_err(domain)?;
            let m = w.presentation.render(&w.meridian);
            presentation_output(&w.presentation, format, json!({ "meridian": m }))
        }
        KnotCommand::Dehn { knot } => {
            let d = io.knot(&knot.pd)?;
            let p = dehn_presentation(&d).map_err(domain)?;
            presentation_output(&p, format, json!({}))
        }
        KnotCommand::Peripheral { knot } => {
            let d = io.knot(&knot.pd)?;
            let w = wirtinger(&d, false).map_err(domain)?;
            let ps = peripheral(&d, knot.convention.into());
            let (m, l) = (w.presentation.render(&ps.meridian), w.presentation.render(&ps.parallel));
            match format {
                Format::Json => presentation_output(&w.presentation, format, json!({ "meridian": m, "parallel": l })),
                _ => format!("meridian: {m}\nparallel: {}\n", if l.is_empty() { "1" } else { &l }),
            }
        }
        KnotCommand::Surgery { knot, k } => {
            let d = io.knot(&knot.pd)?;
            let p = surgery_presentation(&d, *k, knot.convention.into()).map_err(domain)?;
            presentation_output(&p, format, json!({ "k": k }))
        }
    })
}

fn dehn_fn(io: &mut Io, c: &Common, input: &str, n_max: usize, length_cap: Option<usize>, node_cap: usize) -> Outcome {
    let format = pick(c.format, Format::Tsv, &[Format::Tsv, Format::Json])?;
    if node_cap == 0 || length_cap == Some(0) {
        return Err(usage("caps must be positive"));
    }
    let p = io.presentation(input)?;
    let oracle = oracle_for(&p, c)?;
    let opts = AreaOptions { length_cap, node_cap, stability_check: true };
    let table = dehn_function_estimate(&p, oracle.as_ref(), n_max, &opts).map_err(domain)?;
    Ok(match format {
        Format::Json => to_json(&table),
        _ => table.to_tsv(),
    })
}

fn normal_form(c: &Common, word: &str) -> Outcome {
    let format = pick(c.format, Format::Text, &[Format::Text, Format::Json])?;
    let (k, l) = c.torus.ok_or_else(|| usage("normal-form needs --torus K,L"))?;
    let g = TorusGroup::new(k, l).map_err(usage)?;
    let nf = g.parse(word).map_err(domain)?;
    Ok(match format {
        Format::Json => {
            to_json(&json!({ "k": k, "l": l, "normal_form": nf.to_string(), "central": nf.central_power() }))
        }
        _ => format!("{nf}\n"),
    })
}

fn dispatch(io: &mut Io, c: &Common, command: &Command) -> Outcome {
    if c.max_cosets == 0 {
        return Err(usage("--max-cosets must be positive"));
    }
    match command {
        Command::Wp { input, word } => wp(io, c, input, word),
        Command::Reduce { input, word } => reduce(io, c, input, word),
        Command::Abelianize { input } => abelianize(io, c, input),
        Command::CosetEnum { input, subgroup, table } => coset_enum(io, c, input, subgroup, *table),
        Command::Order { input } => order(io, c, input),
        Command::CayleyBall { input, radius, involution } => cayley_ball(io, c, input, *radius, involution),
        Command::CheckDiagram { input, involution } => check_diagram(io, c, input, involution),
        Command::Knot { command } => knot(io, c, command),
        Command::DehnFn { input, n_max, length_cap, node_cap } => dehn_fn(io, c, input, *n_max, *length_cap, *node_cap),
        Command::FamilyInfinite { alpha, beta } => {
            let format = pick(c.format, Format::Text, &[Format::Text, Format::Json])?;
            let inf = family_infinite(*alpha, *beta).ok_or_else(|| domain("alpha and beta must be at least 2"))?;
            Ok(match format {
                Format::Json => to_json(&json!({ "alpha": alpha, "beta": beta, "infinite": inf })),
                _ => format!("{inf}\n"),
            })
        }
        Command::NormalForm { word } => normal_form(c, word),
    }
}

#[derive(Parser, Debug)]
#[command(
    name = "dehn",
    version,
    about = "Word problems, coset enumeration, Cayley diagrams, knot groups and Dehn functions"
)]
struct Root {
    #[command(flatten)]
    common: Common,
    #[command(subcommand)]
    command: Command,
}

/// Runs one command; returns the exit code (0 ok, 1 domain error, 2 usage).
pub fn run<I, T>(args: I, stdin: &mut dyn Read, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let root = match Root::try_parse_from(args) {
        Ok(r) => r,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let text = e.render().to_string();
            let _ = if code == 0 { stdout.write_all(text.as_bytes()) } else { stderr.write_all(text.as_bytes()) };
            return code;
        }
    };
    let mut io = Io { stdin };
    match dispatch(&mut io, &root.common, &root.command) {
        Ok(out) => match stdout.write_all(out.as_bytes()) {
            Ok(()) => 0,
            Err(e) => {
                let _ = writeln!(stderr, "dehn: {e}");
                1
            }
        },
        Err(Failure::Usage(m)) => {
            let _ = writeln!(stderr, "dehn: {m}");
            2
        }
        Err(Failure::Domain(m)) => {
            let _ = writeln!(stderr, "dehn: {m}");
            1
        }
    }
}
