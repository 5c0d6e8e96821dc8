//! Command dispatcher for the `permvc` binary.
//!
//! [`run`] parses an argument vector, executes one subcommand and returns the
//! exit code together with the text written to stdout and stderr. Exit codes:
//! 0 answer, 1 property violation or nothing found, 2 usage or input error.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use num_bigint::BigInt;
use num_rational::BigRational;
use permvc::ackfun::{self, HierarchyParams};
use permvc::constructions::{self, Sampler};
use permvc::format::{parse_family, parse_matrix, parse_sequence, serialize_family, serialize_matrix, serialize_sequence};
use permvc::oracle::{self, DeltaValue, HuntConfig, Lemma, SearchBudget, SeqExtremal};
use permvc::patterns;
use permvc::vcdim;
use permvc::{Error, FormationMode, FormationWitness, FunctionMatrix, Matrix01, PermFamily, Permutation};
use serde_json::{json, Value};

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Outcome {
    pub code: i32,
    pub stdout: String,
    pub stderr: String,
}

impl Outcome {
    /// Parsed JSON payload of stdout.
    pub fn json(&self) -> Value {
        serde_json::from_str(&self.stdout).unwrap_or(Value::Null)
    }
}

#[derive(Parser, Debug)]
#[command(name = "permvc", version, about = "Forbidden patterns, formations and VC-dimension of permutation families")]
struct Cli {
    /// Machine-readable JSON output.
    #[arg(long, global = true)]
    json: bool,
    /// Seed for randomized commands.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Worker threads for searches.
    #[arg(long, global = true, env = "PERMVC_DEFAULT_WORKERS", default_value_t = 1)]
    workers: usize,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Inverse Ackermann hierarchy and recurrences.
    #[command(subcommand)]
    Ack(AckCmd),
    /// Pattern containment, formations and transforms.
    #[command(subcommand)]
    Patterns(PatternsCmd),
    /// VC-dimension, fullness and compression.
    #[command(subcommand)]
    Vcdim(VcdimCmd),
    /// Lower-bound construction pipeline.
    #[command(subcommand)]
    Construct(ConstructCmd),
    /// Exact extremal values and lemma hunts.
    #[command(subcommand)]
    Oracle(OracleCmd),
}

#[derive(Subcommand, Debug)]
enum AckCmd {
    /// α(m).
    Alpha {
        #[arg(long)]
        m: u64,
    },
    /// α_d(m).
    Alphad {
        #[arg(long)]
        d: u32,
        #[arg(long)]
        m: u64,
        /// Unmemoized evaluation.
        #[arg(long)]
        direct: bool,
    },
    #[command(name = "R")]
    R {
        #[arg(long)]
        s: u32,
        #[arg(long)]
        d: u32,
    },
    #[command(name = "D")]
    D {
        #[arg(long)]
        s: u32,
        #[arg(long)]
        d: u32,
    },
    /// β_s(m), γ_k(n) or μ_s(k).
    Derived {
        #[arg(long, value_enum)]
        kind: DerivedKind,
        /// Comma-separated arguments: s,m for beta; k,n for gamma; s,k for mu.
        #[arg(long, value_delimiter = ',')]
        args: Vec<u64>,
        /// Rational c' used by gamma, e.g. `1` or `3/7`.
        #[arg(long, default_value = "1")]
        cprime: String,
    },
}

#[derive(ValueEnum, Clone, Copy, Debug)]
enum DerivedKind {
    Beta,
    Gamma,
    Mu,
}

#[derive(Subcommand, Debug)]
enum PatternsCmd {
    /// Finds an occurrence of a pattern in a host matrix.
    Contains {
        #[arg(long)]
        host: PathBuf,
        /// Matrix file or `DS<s>`.
        #[arg(long)]
        pattern: String,
    },
    /// Finds an (r,s)-formation.
    Formation {
        #[arg(long)]
        matrix: PathBuf,
        #[arg(long)]
        r: usize,
        #[arg(long)]
        s: usize,
        #[arg(long, value_enum, default_value = "plain")]
        mode: ModeArg,
        #[arg(long = "B")]
        b: Option<usize>,
    },
    /// Splits an (sr,s)-formation of the MST into an (r,s)-formation of the matrix.
    Split {
        #[arg(long)]
        matrix: PathBuf,
        #[arg(long)]
        r: usize,
        #[arg(long)]
        s: usize,
    },
    /// Matrix to blocked sequence.
    Mst {
        #[arg(long)]
        matrix: PathBuf,
    },
    /// The DS_s matrix.
    DsMatrix {
        #[arg(long)]
        s: usize,
    },
}

#[derive(ValueEnum, Clone, Copy, Debug)]
enum ModeArg {
    Plain,
    Doubled,
    Fat,
}

#[derive(Subcommand, Debug)]
enum VcdimCmd {
    Compute {
        #[arg(long)]
        family: PathBuf,
    },
    Shattered {
        #[arg(long)]
        family: PathBuf,
        #[arg(long, value_delimiter = ',')]
        positions: Vec<usize>,
    },
    Fullness {
        #[arg(long)]
        matrix: PathBuf,
    },
    /// Iterated compression of a family of VC-dimension at most k.
    Compress {
        #[arg(long)]
        family: PathBuf,
        #[arg(long)]
        k: usize,
        #[arg(long, default_value = "1")]
        cprime: String,
        /// Writes the full trace as JSON.
        #[arg(long)]
        trace: Option<PathBuf>,
        /// Runs a single reduction step instead of the whole procedure.
        #[arg(long)]
        single: bool,
    },
}

#[derive(Subcommand, Debug)]
enum ConstructCmd {
    /// Sequence to matrix.
    Smt {
        #[arg(long)]
        sequence: PathBuf,
    },
    J2 {
        #[arg(long, value_delimiter = ',')]
        perm: Vec<usize>,
        #[arg(long)]
        drop: Option<usize>,
    },
    Flatten {
        #[arg(long, value_delimiter = ',')]
        perm: Vec<usize>,
        #[arg(long)]
        drop: Option<usize>,
    },
    Phi {
        #[arg(long)]
        l: usize,
        #[arg(long)]
        drop: Option<usize>,
    },
    /// Block-diagonal tiling of a matrix cropped to n x n.
    Tile {
        #[arg(long)]
        matrix: PathBuf,
        #[arg(long)]
        n: usize,
    },
    /// Permutation family from a source matrix.
    Family {
        #[arg(long)]
        matrix: PathBuf,
        #[arg(long, value_enum, default_value = "exhaustive")]
        sampler: SamplerArg,
        /// Choices examined at most.
        #[arg(long, default_value_t = 1_000_000)]
        budget: u64,
        /// Samples drawn by the random sampler.
        #[arg(long, default_value_t = 1000)]
        samples: usize,
    },
    /// A DS(3)-sequence with every symbol at least `mult` times.
    Gends3 {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        mult: usize,
    },
}

#[derive(ValueEnum, Clone, Copy, Debug)]
enum SamplerArg {
    Exhaustive,
    Random,
}

#[derive(Args, Debug, Clone, Copy)]
struct BudgetArgs {
    /// Search node limit.
    #[arg(long, default_value_t = 4_000_000_000)]
    nodes: u64,
    /// Wall-clock limit in seconds.
    #[arg(long, default_value_t = 600)]
    time_limit: u64,
}

#[derive(Subcommand, Debug)]
enum OracleCmd {
    P {
        #[arg(long)]
        k: usize,
        #[arg(long)]
        n: usize,
        #[command(flatten)]
        budget: BudgetArgs,
    },
    R {
        #[arg(long)]
        k: usize,
        #[arg(long)]
        n: usize,
    },
    Mex {
        /// Matrix file or `DS<s>`.
        #[arg(long)]
        pattern: String,
        #[arg(long)]
        n: usize,
        #[command(flatten)]
        budget: BudgetArgs,
    },
    Lambda {
        #[arg(long)]
        s: usize,
        #[arg(long)]
        n: usize,
        #[command(flatten)]
        budget: BudgetArgs,
    },
    F {
        #[arg(long)]
        r: usize,
        #[arg(long)]
        s: usize,
        #[arg(long)]
        n: usize,
        #[command(flatten)]
        budget: BudgetArgs,
    },
    Piprime {
        #[arg(long)]
        r: usize,
        #[arg(long)]
        s: usize,
        #[arg(long)]
        k: usize,
        #[arg(long)]
        m: usize,
        #[command(flatten)]
        budget: BudgetArgs,
    },
    Delta {
        #[arg(long)]
        r: usize,
        #[arg(long)]
        s: usize,
        #[arg(long)]
        k: usize,
        #[arg(long)]
        m: usize,
    },
    /// Searches for counterexamples to a structural lemma.
    Hunt {
        #[arg(long, value_enum)]
        lemma: LemmaArg,
        #[arg(long)]
        l: Option<usize>,
        #[arg(long)]
        r: Option<usize>,
        #[arg(long)]
        s: Option<usize>,
        /// Random candidates.
        #[arg(long)]
        budget: usize,
        /// Additional adversarial candidates.
        #[arg(long, default_value_t = 0)]
        adversarial: usize,
        /// Largest host dimension.
        #[arg(long, default_value_t = 10)]
        max_size: usize,
        /// Wall-clock limit in seconds.
        #[arg(long, default_value_t = 600)]
        time_limit: u64,
    },
}

#[derive(ValueEnum, Clone, Copy, Debug)]
enum LemmaArg {
    Todslargeeven,
    Todslargeodd,
    Form2spl,
    Onelongerseq,
}

/// Failure of a command: exit code and one-line diagnostic.
struct Fail(i32, String);

impl From<Error> for Fail {
    fn from(e: Error) -> Self {
        let code = match e {
            Error::PostconditionViolated(_) | Error::VcExceedsK { .. } | Error::HypothesisUnmet(_) => 1,
            _ => 2,
        };
        Fail(code, e.to_string())
    }
}

fn usage(msg: impl Into<String>) -> Fail {
    Fail(2, msg.into())
}

/// A command result: JSON payload, text rendering and exit code.
struct Reply {
    json: Value,
    text: String,
    code: i32,
}

impl Reply {
    fn ok(json: Value, text: impl Into<String>) -> Self {
        Reply { json, text: text.into(), code: 0 }
    }

    fn with_code(mut self, code: i32) -> Self {
        self.code = code;
        self
    }
}

type Res = std::result::Result<Reply, Fail>;

pub fn run<I, T>(args: I) -> Outcome
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            let rendered = e.render().to_string();
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion | ErrorKind::DisplayHelpOnMissingArgumentOrSubcommand => {
                    Outcome { code: 0, stdout: rendered, stderr: String::new() }
                }
                _ => Outcome {
                    code: 2,
                    stdout: String::new(),
                    stderr: format!("{}\n", first_line(&rendered)),
                },
            };
        }
    };
    let name = command_name(&cli.command);
    let ctx = Ctx { seed: cli.seed, workers: cli.workers.max(1) };
    match dispatch(&cli.command, &ctx) {
        Ok(reply) => {
            let stdout = if cli.json {
                let mut payload = json!({ "schemaVersion": SCHEMA_VERSION, "command": name });
                if let (Value::Object(dst), Value::Object(src)) = (&mut payload, reply.json) {
                    dst.extend(src);
                }
                format!("{payload}\n")
            } else {
                reply.text
            };
            Outcome { code: reply.code, stdout, stderr: String::new() }
        }
        Err(Fail(code, msg)) => {
            let stdout = if cli.json {
                format!("{}\n", json!({ "schemaVersion": SCHEMA_VERSION, "command": name, "error": msg }))
            } else {
                String::new()
            };
            Outcome { code, stdout, stderr: format!("error: {}\n", first_line(&msg)) }
        }
    }
}

fn first_line(s: &str) -> &str {
    s.lines().find(|l| !l.trim().is_empty()).unwrap_or("").trim_end()
}

fn command_name(c: &Command) -> String {
    let (group, verb) = match c {
        Command::Ack(a) => ("ack", format!("{a:?}")),
        Command::Patterns(p) => ("patterns", format!("{p:?}")),
        Command::Vcdim(v) => ("vcdim", format!("{v:?}")),
        Command::Construct(x) => ("construct", format!("{x:?}")),
        Command::Oracle(o) => ("oracle", format!("{o:?}")),
    };
    let verb: String = verb.chars().take_while(|c| c.is_alphanumeric()).collect();
    format!("{group} {}", verb.to_lowercase())
}

struct Ctx {
    seed: u64,
    workers: usize,
}

fn dispatch(cmd: &Command, ctx: &Ctx) -> Res {
    match cmd {
        Command::Ack(c) => ack(c),
        Command::Patterns(c) => patterns_cmd(c),
        Command::Vcdim(c) => vcdim_cmd(c),
        Command::Construct(c) => construct(c, ctx),
        Command::Oracle(c) => oracle_cmd(c, ctx),
    }
}

// ---------- input helpers ----------

fn read_file(path: &Path) -> std::result::Result<String, Fail> {
    std::fs::read_to_string(path).map_err(|e| usage(format!("cannot read {}: {e}", path.display())))
}

fn load_matrix(path: &Path) -> std::result::Result<Matrix01, Fail> {
    parse_matrix(&read_file(path)?).map_err(|e| usage(format!("{}: {e}", path.display())))
}

fn load_family(path: &Path) -> std::result::Result<PermFamily, Fail> {
    parse_family(&read_file(path)?).map_err(|e| usage(format!("{}: {e}", path.display())))
}

/// `DS<s>` or a matrix file.
fn load_pattern(spec: &str) -> std::result::Result<Matrix01, Fail> {
    if let Some(s) = spec.strip_prefix("DS").and_then(|s| s.parse::<usize>().ok()) {
        return Ok(patterns::ds_matrix(s)?);
    }
    load_matrix(Path::new(spec))
}

fn parse_ratio(text: &str) -> std::result::Result<BigRational, Fail> {
    let bad = || usage(format!("malformed rational {text:?}"));
    let (num, den) = match text.split_once('/') {
        Some((a, b)) => (a.trim(), b.trim()),
        None => (text.trim(), "1"),
    };
    let num: BigInt = num.parse().map_err(|_| bad())?;
    let den: BigInt = den.parse().map_err(|_| bad())?;
    if den == BigInt::from(0) {
        return Err(bad());
    }
    Ok(BigRational::new(num, den))
}

fn params(cprime: &str) -> std::result::Result<HierarchyParams, Fail> {
    let c = parse_ratio(cprime)?;
    if c == BigRational::from_integer(1.into()) {
        return Ok(HierarchyParams::default());
    }
    Ok(HierarchyParams::new(c, format!("cPrime = {cprime} set on the command line"))?)
}

fn budget(b: &BudgetArgs, ctx: &Ctx) -> std::result::Result<SearchBudget, Fail> {
    Ok(SearchBudget::new(b.nodes, b.time_limit, ctx.workers)?)
}

// ---------- output helpers ----------

fn matrix_json(m: &Matrix01) -> Value {
    let grid: Vec<String> = serialize_matrix(m).lines().skip(1).map(str::to_string).collect();
    json!({ "rows": m.rows(), "cols": m.cols(), "grid": grid, "cells": m.cells() })
}

fn function_json(f: &FunctionMatrix) -> Value {
    matrix_json(f.as_matrix())
}

fn witness_json(w: &FormationWitness) -> Value {
    json!({ "columns": w.columns, "partition": w.partition.intervals(), "cells": w.cells })
}

fn witness_text(w: &FormationWitness) -> String {
    let parts: Vec<String> = w.partition.intervals().iter().map(|(a, b)| format!("{a}-{b}")).collect();
    format!("columns {:?}\npartition {}\ncells {:?}\n", w.columns, parts.join(" "), w.cells)
}

fn perm_arg(v: &[usize]) -> std::result::Result<Permutation, Fail> {
    Permutation::new(v.to_vec()).map_err(|e| usage(e.to_string()))
}

// ---------- ack ----------

fn ack(c: &AckCmd) -> Res {
    Ok(match c {
        AckCmd::Alpha { m } => {
            let v = ackfun::inv_ackermann(*m)?;
            Reply::ok(json!({ "m": m, "value": v }), format!("{v}\n"))
        }
        AckCmd::Alphad { d, m, direct } => {
            let v = if *direct { ackfun::alpha_d_direct(*d, *m)? } else { ackfun::alpha_d(*d, *m)? };
            Reply::ok(json!({ "d": d, "m": m, "value": v }), format!("{v}\n"))
        }
        AckCmd::R { s, d } => {
            let v = ackfun::recurrence_r(*s, *d)?;
            Reply::ok(json!({ "s": s, "d": d, "value": v.to_string() }), format!("{v}\n"))
        }
        AckCmd::D { s, d } => {
            let v = ackfun::recurrence_d(*s, *d)?;
            Reply::ok(json!({ "s": s, "d": d, "value": v.to_string() }), format!("{v}\n"))
        }
        AckCmd::Derived { kind, args, cprime } => {
            let [a, b] = args[..] else {
                return Err(usage(format!("--args takes two comma-separated integers (got {})", args.len())));
            };
            let small = |x: u64| u32::try_from(x).map_err(|_| usage(format!("argument {x} too large")));
            match kind {
                DerivedKind::Beta => {
                    let v = ackfun::beta(small(a)?, b)?;
                    Reply::ok(json!({ "kind": "beta", "s": a, "m": b, "value": v.to_string() }), format!("{v}\n"))
                }
                DerivedKind::Mu => {
                    let v = ackfun::mu(small(a)?, small(b)?)?;
                    Reply::ok(json!({ "kind": "mu", "s": a, "k": b, "value": v.to_string() }), format!("{v}\n"))
                }
                DerivedKind::Gamma => {
                    let p = params(cprime)?;
                    let v = ackfun::gamma(small(a)?, b, &p)?;
                    Reply::ok(
                        json!({ "kind": "gamma", "k": a, "n": b, "value": v.to_string(), "params": p }),
                        format!("{v}\n# {}\n", p.notes),
                    )
                }
            }
        }
    })
}

// ---------- patterns ----------

fn patterns_cmd(c: &PatternsCmd) -> Res {
    Ok(match c {
        PatternsCmd::Contains { host, pattern } => {
            let h = load_matrix(host)?;
            let p = load_pattern(pattern)?;
            match patterns::contains_pattern(&h, &p) {
                Some(e) => Reply::ok(
                    json!({ "found": true, "rows": e.rows, "cols": e.cols }),
                    format!("contained\nrows {:?}\ncols {:?}\n", e.rows, e.cols),
                ),
                None => Reply::ok(json!({ "found": false }), "avoided\n").with_code(1),
            }
        }
        PatternsCmd::Formation { matrix, r, s, mode, b } => {
            let m = load_matrix(matrix)?;
            let mode = match (mode, b) {
                (ModeArg::Plain, None) => FormationMode::Plain,
                (ModeArg::Doubled, None) => FormationMode::Doubled,
                (ModeArg::Fat, Some(b)) => FormationMode::Fat(*b),
                (ModeArg::Fat, None) => return Err(usage("--mode fat needs --B")),
                (_, Some(_)) => return Err(usage("--B only applies to --mode fat")),
            };
            found_witness(patterns::find_formation(&m, *r, *s, mode)?)
        }
        PatternsCmd::Split { matrix, r, s } => {
            let m = load_matrix(matrix)?;
            found_witness(patterns::split_formation(&m, *r, *s)?)
        }
        PatternsCmd::Mst { matrix } => {
            let seq = patterns::mst(&load_matrix(matrix)?);
            let blocks: Vec<Vec<usize>> = seq.blocks().map(<[usize]>::to_vec).collect();
            Reply::ok(json!({ "blocks": blocks }), serialize_sequence(&seq))
        }
        PatternsCmd::DsMatrix { s } => {
            let m = patterns::ds_matrix(*s)?;
            Reply::ok(json!({ "matrix": matrix_json(&m) }), serialize_matrix(&m))
        }
    })
}

fn found_witness(w: Option<FormationWitness>) -> Reply {
    match w {
        Some(w) => Reply::ok(json!({ "found": true, "witness": witness_json(&w) }), witness_text(&w)),
        None => Reply::ok(json!({ "found": false }), "no formation\n").with_code(1),
    }
}

// ---------- vcdim ----------

fn vcdim_cmd(c: &VcdimCmd) -> Res {
    Ok(match c {
        VcdimCmd::Compute { family } => {
            let f = load_family(family)?;
            let v = vcdim::vc_dimension(&f)?;
            Reply::ok(json!({ "n": f.n(), "size": f.len(), "value": v }), format!("{v}\n"))
        }
        VcdimCmd::Shattered { family, positions } => {
            let f = load_family(family)?;
            let yes = vcdim::is_shattered(&f, positions)?;
            Reply::ok(
                json!({ "positions": positions, "shattered": yes }),
                if yes { "shattered\n" } else { "not shattered\n" },
            )
        }
        VcdimCmd::Fullness { matrix } => {
            let m = load_matrix(matrix)?;
            let k = vcdim::fullness(&m);
            let cols = vcdim::is_k_full(&m, k).unwrap_or_default();
            Reply::ok(json!({ "value": k, "columns": cols }), format!("{k}\ncolumns {cols:?}\n"))
        }
        VcdimCmd::Compress { family, k, cprime, trace, single } => {
            let f = load_family(family)?;
            let p = params(cprime)?;
            if *single {
                let (next, record) = vcdim::reduction_step(&f, *k, &p)?;
                let json = json!({ "record": record, "params": p, "family": serialize_family(&next) });
                let text = format!(
                    "density {} -> {}\nsize {} -> {}\nones {} -> {}\n",
                    record.density_before, record.density_after, record.size_before, record.size_after,
                    record.ones_before, record.ones_after
                );
                return Ok(Reply::ok(json, text));
            }
            let t = vcdim::compress_family(&f, *k, &p)?;
            if let Some(path) = trace {
                let body = serde_json::to_string_pretty(&t).map_err(|e| usage(e.to_string()))?;
                std::fs::write(path, body).map_err(|e| usage(format!("cannot write {}: {e}", path.display())))?;
            }
            let within = t.phases.iter().all(|ph| ph.within_bound);
            let mut text = format!("gamma {}\nthreshold 2T {:.3}\n", t.gamma, 2.0 * t.threshold);
            for (i, ph) in t.phases.iter().enumerate() {
                let _ = writeln!(
                    text,
                    "phase {}: density {} -> {}, {} iterations (bound {})",
                    i + 1, ph.start_density, ph.end_density, ph.iterations, ph.iteration_bound
                );
            }
            let _ = writeln!(text, "stop {:?}\nfinal density {} size {}\n# {}", t.stop, t.final_density, t.final_size, p.notes);
            let json = json!({
                "iterations": t.records.len(),
                "withinBound": within,
                "trace": t,
            });
            Reply::ok(json, text).with_code(if within { 0 } else { 1 })
        }
    })
}

// ---------- construct ----------

fn construct(c: &ConstructCmd, ctx: &Ctx) -> Res {
    Ok(match c {
        ConstructCmd::Smt { sequence } => {
            let seq = parse_sequence(&read_file(sequence)?).map_err(|e| usage(format!("{}: {e}", sequence.display())))?;
            let m = constructions::smt(&seq);
            Reply::ok(json!({ "matrix": matrix_json(&m) }), serialize_matrix(&m))
        }
        ConstructCmd::J2 { perm, drop } => {
            let m = constructions::j2_expand(&perm_arg(perm)?, *drop)?.into_matrix();
            Reply::ok(json!({ "matrix": matrix_json(&m) }), serialize_matrix(&m))
        }
        ConstructCmd::Flatten { perm, drop } => {
            let set = constructions::flattenings(&perm_arg(perm)?, *drop)?;
            let text: String = set.iter().map(|f| serialize_matrix(f.as_matrix())).collect::<Vec<_>>().join("\n");
            Reply::ok(json!({ "matrices": set.iter().map(function_json).collect::<Vec<_>>() }), text)
        }
        ConstructCmd::Phi { l, drop } => {
            let phi = constructions::phi(*l, *drop)?;
            let sets: Vec<Vec<Value>> = phi.iter().map(|s| s.iter().map(function_json).collect()).collect();
            let mut text = String::new();
            for (i, set) in phi.iter().enumerate() {
                let _ = writeln!(text, "set {}", i + 1);
                for f in set {
                    text.push_str(&serialize_matrix(f.as_matrix()));
                }
            }
            Reply::ok(json!({ "sets": sets }), text)
        }
        ConstructCmd::Tile { matrix, n } => {
            let m = constructions::tile_and_pad(&load_matrix(matrix)?, *n)?;
            Reply::ok(json!({ "matrix": matrix_json(&m) }), serialize_matrix(&m))
        }
        ConstructCmd::Family { matrix, sampler, budget, samples } => {
            let m = load_matrix(matrix)?;
            let sampler = match sampler {
                SamplerArg::Exhaustive => Sampler::Exhaustive,
                SamplerArg::Random => Sampler::Random { seed: ctx.seed, samples: *samples },
            };
            let b = constructions::build_family(&m, sampler, *budget)?;
            let max_pre = b.preimages.values().map(|s| s.len()).max().unwrap_or(0);
            let json = json!({
                "size": b.family.len(),
                "n": b.family.n(),
                "choicesExamined": b.choices_examined,
                "truncated": b.truncated,
                "maxPreimages": max_pre,
                "family": serialize_family(&b.family),
            });
            Reply::ok(json, serialize_family(&b.family))
        }
        ConstructCmd::Gends3 { n, mult } => {
            let seq = constructions::gen_ds3(*n, *mult)?;
            let blocks: Vec<Vec<usize>> = seq.blocks().map(<[usize]>::to_vec).collect();
            Reply::ok(json!({ "blocks": blocks, "length": seq.len() }), serialize_sequence(&seq))
        }
    })
}

// ---------- oracle ----------

fn extremal_reply<W>(e: oracle::Extremal<W>, witness: Value, text_witness: String) -> Reply {
    let label = if e.exact { "exact" } else { "lower bound, budget exhausted" };
    Reply::ok(
        json!({ "value": e.value, "exact": e.exact, "nodes": e.nodes, "witness": witness }),
        format!("{} ({label}, {} nodes)\n{text_witness}", e.value, e.nodes),
    )
}

fn seq_text(s: &[usize]) -> String {
    let parts: Vec<String> = s.iter().map(|x| x.to_string()).collect();
    format!("{}\n", parts.join(" "))
}

fn oracle_cmd(c: &OracleCmd, ctx: &Ctx) -> Res {
    Ok(match c {
        OracleCmd::P { k, n, budget: b } => {
            let e = oracle::brute_p(*k, *n, &budget(b, ctx)?)?;
            let (wj, wt) = (matrix_json(&e.witness), serialize_matrix(&e.witness));
            extremal_reply(e, wj, wt)
        }
        OracleCmd::Mex { pattern, n, budget: b } => {
            let p = load_pattern(pattern)?;
            let e = oracle::brute_mex(&p, *n, &budget(b, ctx)?)?;
            let (wj, wt) = (matrix_json(&e.witness), serialize_matrix(&e.witness));
            extremal_reply(e, wj, wt)
        }
        OracleCmd::R { k, n } => {
            let r = oracle::brute_r(*k, *n)?;
            let json = json!({
                "value": r.value,
                "witness": serialize_family(&r.witness),
                "exactlyK": r.exactly_k,
                "exactlyKWitness": r.exactly_k_witness.as_ref().map(serialize_family),
            });
            let text = format!(
                "{} (vc <= {k})\n{}{} (vc = {k})\n",
                r.value,
                serialize_family(&r.witness),
                r.exactly_k
            );
            Reply::ok(json, text)
        }
        OracleCmd::Lambda { s, n, budget: b } => {
            let e = oracle::brute_lambda(*s, *n, &budget(b, ctx)?)?;
            let (wj, wt) = (json!(e.witness), seq_text(&e.witness));
            extremal_reply(e, wj, wt)
        }
        OracleCmd::F { r, s, n, budget: b } => {
            let e = oracle::brute_f(*r, *s, *n, &budget(b, ctx)?)?;
            let (wj, wt) = (json!(e.witness), seq_text(&e.witness));
            extremal_reply(e, wj, wt)
        }
        OracleCmd::Piprime { r, s, k, m, budget: b } => {
            let e = oracle::brute_seq_extremal(SeqExtremal::PiPrime { r: *r, s: *s, k: *k }, *m, &budget(b, ctx)?)?;
            let blocks: Vec<Vec<usize>> = e.witness.blocks().map(<[usize]>::to_vec).collect();
            let wt = serialize_sequence(&e.witness);
            extremal_reply(e, json!(blocks), wt)
        }
        OracleCmd::Delta { r, s, k, m } => match oracle::brute_delta(*r, *s, *k, *m)? {
            DeltaValue::Finite { value, witness } => Reply::ok(
                json!({ "value": value, "infinite": false, "witness": matrix_json(&witness) }),
                format!("{value}\n{}", serialize_matrix(&witness)),
            ),
            DeltaValue::Infinite => Reply::ok(json!({ "value": null, "infinite": true }), "infinite\n"),
        },
        OracleCmd::Hunt { lemma, l, r, s, budget: random, adversarial, max_size, time_limit } => {
            let need = |v: &Option<usize>, flag: &str| v.ok_or_else(|| usage(format!("this lemma needs --{flag}")));
            let lemma = match lemma {
                LemmaArg::Todslargeeven => Lemma::TodsLargeEven { l: need(l, "l")? },
                LemmaArg::Todslargeodd => Lemma::TodsLargeOdd { l: need(l, "l")? },
                LemmaArg::Form2spl => Lemma::Form2Spl { r: need(r, "r")?, s: need(s, "s")? },
                LemmaArg::Onelongerseq => Lemma::OneLongerSeq { s: need(s, "s")? },
            };
            let mut cfg = HuntConfig::new(*random, *adversarial, ctx.seed);
            cfg.max_size = *max_size;
            cfg.budget = SearchBudget::new(u64::MAX, *time_limit, ctx.workers)?;
            let report = oracle::counterexample_search(lemma, &cfg)?;
            let mut text = format!(
                "{} candidates ({} random, {} adversarial), hypothesis held on {}, {} violations{}\n",
                report.candidates,
                report.random_candidates,
                report.adversarial_candidates,
                report.hypothesis_held,
                report.violations.len(),
                if report.budget_exhausted { ", budget exhausted" } else { "" }
            );
            for v in report.violations.iter().take(5) {
                let _ = write!(text, "candidate {}: {}\n{}", v.candidate, v.detail, v.host);
            }
            let code = if report.violations.is_empty() { 0 } else { 1 };
            Reply::ok(json!({ "report": report }), text).with_code(code)
        }
    })
}
