//! Command-line driver for the sumset laboratory.
//!
//! Exit codes: 0 when everything checked holds, 1 when a verification found
//! at least one bound violation, 2 for usage or input errors.

use std::fmt::Write as _;
use std::fs;
use std::io::Write;
use std::path::PathBuf;

use clap::{Parser, Subcommand, ValueEnum};
use serde::Serialize;
use sumsetlab_core::factor::FactorSystemDocument;
use sumsetlab_core::group::read_raw_table;
use sumsetlab_core::replay::{ProofTrace, Step};
use sumsetlab_core::{
    build_factor_system, build_group, choose_decomposition_subgroup, generated_subgroup, minimal_torsion,
    replay_solvable_proof, validate_table, Caps, FiniteGroup, GroupSpec, RepPolicy, SamplingPlan, SizeDistribution,
    SubsetMask, Theorem, ValidationReport, VerificationReport, Verifier, VerifyError,
};

pub const EXIT_OK: i32 = 0;
pub const EXIT_VIOLATION: i32 = 1;
pub const EXIT_USAGE: i32 = 2;

#[derive(Parser, Debug)]
#[command(name = "sumsetlab", version, about = "Finite-group sumset laboratory")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,

    /// Emit the full JSON report instead of a text summary
    #[arg(long, global = true)]
    pub json: bool,

    /// Write the report to a file instead of standard output
    #[arg(long, global = true, value_name = "PATH")]
    pub out: Option<PathBuf>,

    /// Worker threads for verification (default: machine parallelism)
    #[arg(long, global = true, env = "SUMSETLAB_WORKERS")]
    pub workers: Option<usize>,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
pub enum TheoremArg {
    Cd,
    Eh,
}

impl From<TheoremArg> for Theorem {
    fn from(t: TheoremArg) -> Theorem {
        match t {
            TheoremArg::Cd => Theorem::CauchyDavenport,
            TheoremArg::Eh => Theorem::ErdosHeilbronn,
        }
    }
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
pub enum ModeArg {
    Exhaustive,
    Capped,
    Sampled,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Check a bound over all, size-capped, or sampled pairs of subsets
    Verify {
        /// Group spec, e.g. cyclic:7, quaternion, frobenius:7:3:2, table:PATH
        #[arg(long)]
        group: String,
        #[arg(long, value_enum, default_value = "cd")]
        theorem: TheoremArg,
        #[arg(long, value_enum, default_value = "exhaustive")]
        mode: ModeArg,
        /// Seed for sampled mode
        #[arg(long)]
        seed: Option<u64>,
        /// Number of sampled pairs
        #[arg(long)]
        count: Option<u64>,
        #[arg(long)]
        max_a: Option<usize>,
        #[arg(long)]
        max_b: Option<usize>,
        /// Upper limit on |A| + |B| in capped mode
        #[arg(long)]
        sum_cap: Option<usize>,
        /// Fixed set sizes `a,b` for sampled mode
        #[arg(long)]
        sizes: Option<String>,
        /// Largest order allowed for full enumeration
        #[arg(long)]
        exhaustive_limit: Option<usize>,
    },
    /// Split a group along a normal subgroup and print the factor system
    Decompose {
        #[arg(long)]
        group: String,
        /// Generators of the kernel (default: the decomposition policy's choice)
        #[arg(long)]
        kernel: Option<String>,
        /// One representative per coset, in coset order
        #[arg(long, conflicts_with = "rep_seed")]
        reps: Option<String>,
        /// Pick representatives at random with this seed
        #[arg(long)]
        rep_seed: Option<u64>,
    },
    /// List pairs of the given sizes that attain the bound with equality
    Extremal {
        #[arg(long)]
        group: String,
        /// Set sizes `a,b`
        #[arg(long)]
        sizes: String,
        /// Stop after this many pairs
        #[arg(long)]
        limit: Option<usize>,
    },
    /// Replay the solvable-group induction on a concrete pair
    Trace {
        #[arg(long)]
        group: String,
        #[arg(long)]
        set_a: String,
        #[arg(long)]
        set_b: String,
    },
    /// Check a group table against the group axioms
    Validate {
        #[arg(long)]
        group: String,
    },
}

/// Runs the bound verification. Swappable so tests can drive exit code 1.
pub trait Backend {
    fn verify(
        &self,
        verifier: &Verifier,
        group: &FiniteGroup,
        theorem: Theorem,
        request: &VerifyRequest,
    ) -> Result<VerificationReport, VerifyError>;
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum VerifyRequest {
    Exhaustive,
    Capped(Caps),
    Sampled(SamplingPlan),
}

/// The real engine.
pub struct Engine;

impl Backend for Engine {
    fn verify(
        &self,
        verifier: &Verifier,
        group: &FiniteGroup,
        theorem: Theorem,
        request: &VerifyRequest,
    ) -> Result<VerificationReport, VerifyError> {
        match request {
            VerifyRequest::Exhaustive => verifier.exhaustive(group, theorem, None),
            VerifyRequest::Capped(caps) => verifier.exhaustive(group, theorem, Some(*caps)),
            VerifyRequest::Sampled(plan) => verifier.sampled(group, theorem, plan),
        }
    }
}

struct Failure(String);

impl<E: std::fmt::Display> From<E> for Failure {
    fn from(e: E) -> Self {
        Failure(e.to_string())
    }
}

struct Output {
    body: String,
    code: i32,
}

fn parse_list(s: &str) -> Result<Vec<u32>, Failure> {
    if s.trim().is_empty() {
        return Ok(Vec::new());
    }
    s.split(',')
        .map(|t| {
            t.trim()
                .parse::<u32>()
                .map_err(|_| Failure(format!("`{t}` is not an element index")))
        })
        .collect()
}

fn parse_mask(g: &FiniteGroup, s: &str) -> Result<SubsetMask, Failure> {
    SubsetMask::try_from_elements(g.order(), parse_list(s)?)
        .map_err(|e| Failure(format!("element {e} is outside {} (order {})", g.label(), g.order())))
}

fn parse_sizes(s: &str) -> Result<(usize, usize), Failure> {
    match parse_list(s)?.as_slice() {
        [a, b] => Ok((*a as usize, *b as usize)),
        _ => Err(Failure(format!("--sizes expects `a,b`, got `{s}`"))),
    }
}

fn load_group(spec: &str) -> Result<FiniteGroup, Failure> {
    let spec: GroupSpec = spec.parse()?;
    Ok(build_group(&spec)?)
}

fn render<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("reports serialize");
    s.push('\n');
    s
}

fn fmt_set(m: &SubsetMask) -> String {
    let items: Vec<String> = m.iter().map(|e| e.to_string()).collect();
    format!("{{{}}}", items.join(","))
}

/// Parses `args` and runs the command, writing the report to `out` (or the
/// `--out` file) and diagnostics to `err`. Returns the exit code.
pub fn run<I, T>(args: I, backend: &dyn Backend, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            if !e.use_stderr() {
                let _ = write!(out, "{e}");
                return EXIT_OK;
            }
            let text = e.to_string();
            let first = text.lines().next().unwrap_or("invalid arguments");
            let _ = writeln!(err, "sumsetlab: {}", first.trim_start_matches("error: ").trim());
            return EXIT_USAGE;
        }
    };
    run_cli(&cli, backend, out, err)
}

pub fn run_cli(cli: &Cli, backend: &dyn Backend, out: &mut dyn Write, err: &mut dyn Write) -> i32 {
    let result = execute(cli, backend);
    match result {
        Ok(output) => {
            let written = match &cli.out {
                Some(path) => fs::write(path, &output.body).map_err(|e| format!("cannot write {}: {e}", path.display())),
                None => out.write_all(output.body.as_bytes()).map_err(|e| e.to_string()),
            };
            match written {
                Ok(()) => output.code,
                Err(msg) => {
                    let _ = writeln!(err, "sumsetlab: error: {msg}");
                    EXIT_USAGE
                }
            }
        }
        Err(Failure(msg)) => {
            let _ = writeln!(err, "sumsetlab: error: {msg}");
            EXIT_USAGE
        }
    }
}

fn execute(cli: &Cli, backend: &dyn Backend) -> Result<Output, Failure> {
    match &cli.command {
        Command::Verify {
            group,
            theorem,
            mode,
            seed,
            count,
            max_a,
            max_b,
            sum_cap,
            sizes,
            exhaustive_limit,
        } => {
            let g = load_group(group)?;
            let request = match mode {
                ModeArg::Exhaustive => VerifyRequest::Exhaustive,
                ModeArg::Capped => VerifyRequest::Capped(Caps {
                    max_a_size: *max_a,
                    max_b_size: *max_b,
                    sum_cap: *sum_cap,
                }),
                ModeArg::Sampled => {
                    let (Some(seed), Some(count)) = (seed, count) else {
                        return Err(Failure("sampled mode needs --seed and --count".into()));
                    };
                    let distribution = match sizes {
                        Some(s) => {
                            let (size_a, size_b) = parse_sizes(s)?;
                            SizeDistribution::Fixed { size_a, size_b }
                        }
                        None => SizeDistribution::UniformNonempty,
                    };
                    VerifyRequest::Sampled(SamplingPlan {
                        seed: *seed,
                        count: *count,
                        distribution,
                    })
                }
            };
            let mut verifier = Verifier::with_workers(cli.workers);
            if let Some(limit) = exhaustive_limit {
                verifier.exhaustive_limit = *limit;
            }
            let report = backend.verify(&verifier, &g, (*theorem).into(), &request)?;
            let code = if report.holds() { EXIT_OK } else { EXIT_VIOLATION };
            let body = if cli.json {
                render(&report)
            } else {
                verify_text(&report)
            };
            Ok(Output { body, code })
        }
        Command::Decompose {
            group,
            kernel,
            reps,
            rep_seed,
        } => {
            let g = load_group(group)?;
            let k = match kernel {
                Some(gens) => generated_subgroup(&g, &parse_mask(&g, gens)?),
                None => choose_decomposition_subgroup(&g)?,
            };
            let policy = match (reps, rep_seed) {
                (Some(r), _) => RepPolicy::Explicit(parse_list(r)?),
                (None, Some(seed)) => RepPolicy::SeededRandom(*seed),
                (None, None) => RepPolicy::LowestIndex,
            };
            let fs = build_factor_system(&g, &k, &policy)?;
            let doc = fs.to_document(&g);
            let body = if cli.json { render(&doc) } else { decompose_text(&doc) };
            Ok(Output { body, code: EXIT_OK })
        }
        Command::Extremal { group, sizes, limit } => {
            let g = load_group(group)?;
            let (size_a, size_b) = parse_sizes(sizes)?;
            let verifier = Verifier::with_workers(cli.workers);
            let pairs = verifier.extremal(&g, size_a, size_b, *limit)?;
            let report = ExtremalReport {
                group: g.label().to_string(),
                size_a,
                size_b,
                bound: Theorem::CauchyDavenport.bound(minimal_torsion(&g), size_a, size_b),
                count: pairs.len(),
                pairs: pairs.into_iter().map(|(a, b)| ExtremalPair { a, b }).collect(),
            };
            let body = if cli.json { render(&report) } else { extremal_text(&report) };
            Ok(Output { body, code: EXIT_OK })
        }
        Command::Trace { group, set_a, set_b } => {
            let g = load_group(group)?;
            let a = parse_mask(&g, set_a)?;
            let b = parse_mask(&g, set_b)?;
            let trace = replay_solvable_proof(&g, &a, &b)?;
            let body = if cli.json {
                render(&trace)
            } else {
                let mut s = String::new();
                trace_text(&trace, 0, &mut s);
                s
            };
            Ok(Output { body, code: EXIT_OK })
        }
        Command::Validate { group } => {
            let spec: GroupSpec = group.parse()?;
            let report = match &spec {
                GroupSpec::Table(path) => {
                    let (n, op) = read_raw_table(path)?;
                    validate_table(n, &op, sumsetlab_core::group::DEFAULT_ASSOCIATIVITY_CAP)
                }
                other => build_group(other)?.validate(),
            };
            let code = if report.is_valid() { EXIT_OK } else { EXIT_USAGE };
            let body = if cli.json {
                render(&report)
            } else {
                validate_text(group, &report)
            };
            Ok(Output { body, code })
        }
    }
}

#[derive(Serialize)]
struct ExtremalPair {
    a: SubsetMask,
    b: SubsetMask,
}

#[derive(Serialize)]
struct ExtremalReport {
    group: String,
    size_a: usize,
    size_b: usize,
    bound: i64,
    count: usize,
    pairs: Vec<ExtremalPair>,
}

fn verify_text(r: &VerificationReport) -> String {
    let mut s = String::new();
    let _ = writeln!(s, "group:          {} (order {}, p(G) = {})", r.group, r.order, r.p_g);
    let _ = writeln!(s, "theorem:        {}", r.theorem.name());
    let _ = writeln!(s, "mode:           {:?}", r.mode);
    let _ = writeln!(s, "pairs checked:  {}", r.pairs_checked);
    let _ = writeln!(s, "violations:     {}", r.violations.len());
    let _ = writeln!(s, "extremal pairs: {}", r.extremal_count);
    for w in r.extremal_witnesses.iter().take(10) {
        let _ = writeln!(s, "  A={} B={} size={}", fmt_set(&w.a), fmt_set(&w.b), w.product_size);
    }
    for v in r.violations.iter().take(10) {
        let _ = writeln!(
            s,
            "  VIOLATION A={} B={} size={} bound={}",
            fmt_set(&v.a),
            fmt_set(&v.b),
            v.product_size,
            v.bound
        );
    }
    let _ = writeln!(s, "time:           {:.3}s", r.wall_time.as_secs_f64());
    s
}

fn decompose_text(d: &FactorSystemDocument) -> String {
    let mut s = String::new();
    let _ = writeln!(s, "group {} (order {})", d.group, d.order);
    let _ = writeln!(s, "kernel K = {:?}", d.kernel);
    let _ = writeln!(s, "quotient order {}, representatives {:?}", d.quotient_order, d.reps);
    for (g, p) in d.psi.iter().enumerate() {
        let _ = writeln!(s, "  psi({g}) = ({}, K{})", p.kernel, p.coset);
    }
    for (h1, row) in d.eta.iter().enumerate() {
        let _ = writeln!(s, "  eta[{h1}] = {row:?}");
    }
    s
}

fn extremal_text(r: &ExtremalReport) -> String {
    let mut s = String::new();
    let _ = writeln!(
        s,
        "{}: {} pairs with |A|={}, |B|={} and |A·B| = {}",
        r.group, r.count, r.size_a, r.size_b, r.bound
    );
    for p in r.pairs.iter().take(10) {
        let _ = writeln!(s, "  A={} B={}", fmt_set(&p.a), fmt_set(&p.b));
    }
    s
}

fn trace_text(t: &ProofTrace, depth: usize, s: &mut String) {
    let pad = "  ".repeat(depth);
    let _ = writeln!(
        s,
        "{pad}{} (order {}, p = {}): |A|={} |B|={} |A·B|={} >= {}",
        t.group,
        t.order,
        t.p_g,
        t.size_a,
        t.size_b,
        t.product_size,
        t.traced_bound()
    );
    match &t.step {
        Step::Base(b) => {
            let _ = writeln!(s, "{pad}  base case ({:?}): bound {} holds={}", b.reason, b.bound, b.holds);
        }
        Step::Inductive(ind) => {
            let _ = writeln!(
                s,
                "{pad}  K={:?} |G/K|={} alpha={} beta={} swapped={}",
                ind.kernel, ind.quotient_order, ind.alpha, ind.beta, ind.swapped
            );
            for bc in &ind.block_checks {
                let _ = writeln!(
                    s,
                    "{pad}  block {}: |A1·B{}| = {} >= {}",
                    bc.j, bc.j, bc.product_size, bc.bound
                );
                trace_text(&bc.sub_trace, depth + 2, s);
            }
            let q = &ind.quotient_check;
            let _ = writeln!(s, "{pad}  quotient: |A2·B2| = {} >= {}", q.product_size, q.bound);
            for step in &ind.final_chain.steps {
                let _ = writeln!(s, "{pad}  {}: {} {} {}", step.claim, step.lhs, step.relation, step.rhs);
            }
        }
    }
}

fn validate_text(spec: &str, r: &ValidationReport) -> String {
    let mut s = String::new();
    if r.is_valid() {
        let _ = writeln!(s, "{spec}: valid group of order {}", r.order);
    } else {
        let _ = writeln!(s, "{spec}: {} violation(s)", r.violations.len());
        for v in &r.violations {
            let _ = writeln!(s, "  {v}");
        }
    }
    if !r.associativity_checked {
        let _ = writeln!(s, "  (associativity not checked above the order cap)");
    }
    s
}

#[cfg(test)]
mod tests {
    use super::*;

    fn run_args(args: &[&str]) -> (i32, String, String) {
        let mut out = Vec::new();
        let mut err = Vec::new();
        let mut full = vec!["sumsetlab"];
        full.extend_from_slice(args);
        let code = run(full, &Engine, &mut out, &mut err);
        (code, String::from_utf8(out).unwrap(), String::from_utf8(err).unwrap())
    }

    #[test]
    fn sampled_needs_seed_and_count() {
        let (code, _, err) = run_args(&["verify", "--group", "cyclic:5", "--mode", "sampled"]);
        assert_eq!(code, EXIT_USAGE);
        assert!(err.contains("--seed"));
    }

    #[test]
    fn bad_spec_is_usage_error() {
        let (code, _, err) = run_args(&["verify", "--group", "heisenberg:4"]);
        assert_eq!(code, EXIT_USAGE);
        assert_eq!(err.lines().count(), 1);
    }

    #[test]
    fn unknown_flag_is_usage_error() {
        let (code, _, err) = run_args(&["verify", "--bogus"]);
        assert_eq!(code, EXIT_USAGE);
        assert_eq!(err.lines().count(), 1);
    }

    #[test]
    fn out_of_range_set() {
        let (code, _, err) = run_args(&["trace", "--group", "cyclic:5", "--set-a", "0,9", "--set-b", "1"]);
        assert_eq!(code, EXIT_USAGE);
        assert!(err.contains("element 9"));
    }

    #[test]
    fn oversized_exhaustive_request() {
        let (code, _, err) = run_args(&["verify", "--group", "cyclic:25"]);
        assert_eq!(code, EXIT_USAGE);
        assert!(err.contains("exhaustive limit"));
    }
}
