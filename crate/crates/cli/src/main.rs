//! `chorefit` command-line tool. Reports are JSON on stdout; diagnostics
//! are single lines on stderr. Exit status: 0 success, 1 domain failure,
//! 2 usage or input error.

use std::fs;
use std::io::Read;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use chorefit::io::{bundle_labels, chore_label, parse_chore_label, parse_instance, parse_tuple, AllocationJson, TupleJson};
use chorefit::mms::{EXACT_MAX_BINS, EXACT_MAX_CHORES};
use chorefit::threshold::parse_rational;
use chorefit::{
    allocate, alpha_ratio, exact_small_n_epsilon, ffd, fuzz_monotonicity, hffd, mms, multifit, reduce_excessive, reduction_check,
    tidy_lemma_check, tidy_up, Allocation, AssignmentRule, Bundle, Error, FfvTuple, FuzzConfig, IdoInstance,
    MmsPrecondition, Threshold,
};
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

#[derive(Parser)]
#[command(name = "chorefit", version, about = "Approximate maximin-share allocation of indivisible chores")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Exact maximin share of one cost vector.
    Mms {
        #[command(flatten)]
        src: CostSource,
        /// Include a partition attaining the value.
        #[arg(long)]
        certificate: bool,
    },
    /// First Fit Decreasing with a fixed number of bins.
    Ffd {
        #[command(flatten)]
        src: CostSource,
        /// Bin capacity, `p/q` or an integer.
        #[arg(long)]
        tau: String,
    },
    /// MultiFit binary search over the FFD capacity.
    Multifit {
        #[command(flatten)]
        src: CostSource,
        #[arg(long)]
        lo: Option<u64>,
        #[arg(long)]
        hi: Option<u64>,
    },
    /// Heterogeneous FFD on an identical-order instance.
    Hffd {
        #[arg(long)]
        input: PathBuf,
        /// Comma-separated per-agent thresholds (`p/q` or integers).
        #[arg(long, value_delimiter = ',', required = true)]
        thresholds: Vec<String>,
        #[arg(long, value_enum, default_value_t = Rule::MaxRatio)]
        rule: Rule,
    },
    /// Threshold-raising HFFD on an arbitrary instance.
    Allocate {
        #[arg(long)]
        input: PathBuf,
        /// Multiplicative threshold step, `p/q`.
        #[arg(long, default_value = "1/10", conflicts_with = "exact")]
        epsilon: String,
        /// Use the step that gives the exact ratio for two or three agents.
        #[arg(long)]
        exact: bool,
        /// Also compute each agent's exact maximin share.
        #[arg(long)]
        with_mms: bool,
        /// Write the report here instead of stdout.
        #[arg(long)]
        output: Option<PathBuf>,
    },
    /// Check an FFV tuple.
    Verify {
        #[command(subcommand)]
        what: VerifyCommand,
    },
    /// Replace excessive chores of a tidied FFV tuple.
    Reduce {
        #[command(flatten)]
        tuple: TupleSource,
        /// Unallocated chore to keep out, e.g. `c15`.
        #[arg(long)]
        cstar: String,
    },
    /// Randomized searches.
    Fuzz {
        #[command(subcommand)]
        what: FuzzCommand,
    },
    /// Approximation ratio for `n` agents.
    Ratios {
        #[arg(long)]
        n: usize,
    },
}

#[derive(Subcommand)]
enum VerifyCommand {
    /// First-Fit-Validity of a tuple.
    Ffv {
        #[command(flatten)]
        tuple: TupleSource,
    },
    /// Tidy up a tuple and check the resulting conditions.
    Tidy {
        #[command(flatten)]
        tuple: TupleSource,
        #[arg(long)]
        cstar: String,
    },
}

#[derive(Subcommand)]
enum FuzzCommand {
    /// Search for FFV tuples that leave chores out where FFD does not.
    Monotonicity {
        #[arg(long, default_value_t = 2)]
        n: usize,
        /// Comma-separated ratios `alpha`, the threshold being `alpha * mu`.
        #[arg(long, value_delimiter = ',', default_value = "1")]
        alpha: Vec<String>,
        #[arg(long, default_value_t = 1000)]
        seeds: u64,
        #[arg(long, default_value_t = 0)]
        first_seed: u64,
        #[arg(long, default_value_t = 12)]
        max_m: usize,
        #[arg(long, default_value_t = 50)]
        max_cost: u64,
    },
}

#[derive(Args)]
struct CostSource {
    /// Instance JSON file (`-` for stdin).
    #[arg(long, conflicts_with = "costs")]
    input: Option<PathBuf>,
    /// Agent whose row of the instance is used.
    #[arg(long, default_value_t = 0, requires = "input")]
    agent: usize,
    /// Comma-separated chore costs, used instead of an instance.
    #[arg(long)]
    costs: Option<String>,
    /// Number of bundles; defaults to the instance's agent count.
    #[arg(long)]
    n: Option<usize>,
}

#[derive(Args)]
struct TupleSource {
    /// Tuple JSON file (`-` for stdin).
    #[arg(long)]
    tuple: PathBuf,
    /// Identical-order instance supplying the tuple's costs.
    #[arg(long)]
    instance: Option<PathBuf>,
}

#[derive(Clone, Copy, ValueEnum)]
enum Rule {
    MaxRatio,
    LowestIndex,
}

enum Failure {
    Domain(String),
    Usage(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::InvalidInstance(_)
            | Error::NotIdo(_)
            | Error::OutOfRange { .. }
            | Error::InvalidRational(_)
            | Error::SizeLimit(_) => Failure::Usage(e.to_string()),
            _ => Failure::Domain(e.to_string()),
        }
    }
}

type Outcome = Result<Report, Failure>;

/// A JSON report and whether it records a domain failure.
struct Report {
    value: Value,
    ok: bool,
    output: Option<PathBuf>,
}

fn ok(value: Value) -> Outcome {
    Ok(Report {
        value,
        ok: true,
        output: None,
    })
}

fn usage(msg: impl Into<String>) -> Failure {
    Failure::Usage(msg.into())
}

fn read(path: &Path) -> Result<String, Failure> {
    if path == Path::new("-") {
        let mut s = String::new();
        std::io::stdin()
            .read_to_string(&mut s)
            .map_err(|e| usage(format!("cannot read stdin: {e}")))?;
        return Ok(s);
    }
    fs::read_to_string(path).map_err(|e| usage(format!("cannot read {}: {e}", path.display())))
}

fn exact_limits(n: usize, m: usize) -> Result<(), Failure> {
    if m > EXACT_MAX_CHORES || n > EXACT_MAX_BINS {
        return Err(usage(format!(
            "exact MMS is limited to m <= {EXACT_MAX_CHORES} and n <= {EXACT_MAX_BINS}, got m = {m}, n = {n}"
        )));
    }
    Ok(())
}

fn threshold(s: &str) -> Result<Threshold, Failure> {
    s.parse::<Threshold>().map_err(Failure::from)
}

fn parse_costs(s: &str) -> Result<Vec<u64>, Failure> {
    s.split(',')
        .map(str::trim)
        .filter(|t| !t.is_empty())
        .map(|t| t.parse::<u64>().map_err(|_| usage(format!("cost {t:?} is not a non-negative integer"))))
        .collect()
}

/// Costs sorted non-increasing with the original label of each position.
struct Sorted {
    costs: Vec<u64>,
    labels: Vec<usize>,
    n: usize,
}

impl Sorted {
    fn load(src: &CostSource) -> Result<Self, Failure> {
        let (row, default_n) = match (&src.input, &src.costs) {
            (Some(p), None) => {
                let inst = parse_instance(&read(p)?)?;
                (inst.row(src.agent)?.to_vec(), Some(inst.n()))
            }
            (None, Some(c)) => (parse_costs(c)?, None),
            (None, None) => (Vec::new(), None),
            (Some(_), Some(_)) => unreachable!("clap rejects both"),
        };
        let n = src
            .n
            .or(default_n)
            .ok_or_else(|| usage("--n is required with --costs"))?;
        if n == 0 {
            return Err(usage("--n must be at least 1"));
        }
        let mut labels: Vec<usize> = (0..row.len()).collect();
        labels.sort_by(|&a, &b| row[b].cmp(&row[a]).then(a.cmp(&b)));
        Ok(Sorted {
            costs: labels.iter().map(|&c| row[c]).collect(),
            labels,
            n,
        })
    }

    fn labels(&self, b: &Bundle) -> Vec<String> {
        let mut out: Vec<usize> = b.iter().map(|p| self.labels[p]).collect();
        out.sort_unstable();
        out.into_iter().map(chore_label).collect()
    }

    fn items(&self) -> Bundle {
        Bundle::full(self.costs.len())
    }
}

fn run_mms(src: &CostSource, certificate: bool) -> Outcome {
    let s = Sorted::load(src)?;
    exact_limits(s.n, s.costs.len())?;
    let cert = mms(&s.costs, &s.items(), s.n)?;
    if !certificate {
        return ok(json!({ "mu": cert.mu }));
    }
    let parts: Vec<Vec<String>> = cert.partition.iter().map(|b| s.labels(b)).collect();
    ok(json!({ "mu": cert.mu, "partition": parts, "costs": cert.bundle_costs(&s.costs) }))
}

fn run_ffd(src: &CostSource, tau: &str) -> Outcome {
    let s = Sorted::load(src)?;
    let tau = threshold(tau)?;
    let a = ffd(&s.costs, &s.items(), &tau, s.n);
    let bundles: Vec<Vec<String>> = a.bundles.iter().map(|b| s.labels(b)).collect();
    let costs: Vec<u64> = a.bundles.iter().map(|b| b.cost(&s.costs)).collect();
    ok(json!({
        "tau": tau.to_string(),
        "complete": a.is_complete(),
        "bundles": bundles,
        "costs": costs,
        "unallocated": s.labels(&a.unallocated),
    }))
}

fn run_multifit(src: &CostSource, lo: Option<u64>, hi: Option<u64>) -> Outcome {
    let s = Sorted::load(src)?;
    let total: u64 = s.costs.iter().sum();
    let lo = lo.unwrap_or_else(|| s.costs.first().copied().unwrap_or(0).max(total.div_ceil(s.n as u64)));
    let hi = hi.unwrap_or(total.max(lo));
    let r = multifit(&s.costs, &s.items(), s.n, lo, hi)?;
    let probes: Vec<Value> = r.probes.iter().map(|&(t, ok)| json!({ "tau": t, "ffd_complete": ok })).collect();
    ok(json!({ "threshold": r.threshold, "lo": lo, "hi": hi, "probes": probes }))
}

fn relabel(inst: &IdoInstance, a: &Allocation) -> Allocation {
    let map = |b: &Bundle| -> Bundle { b.iter().map(|p| inst.label(p)).collect() };
    Allocation {
        bundles: a.bundles.iter().map(map).collect(),
        assignment: a.assignment.clone(),
        unallocated: map(&a.unallocated),
    }
}

fn run_hffd(input: &Path, thresholds: &[String], rule: Rule) -> Outcome {
    let inst = IdoInstance::detect(&parse_instance(&read(input)?)?)?;
    if thresholds.len() != inst.n() {
        return Err(usage(format!("expected {} thresholds, got {}", inst.n(), thresholds.len())));
    }
    let th = thresholds.iter().map(|t| threshold(t)).collect::<Result<Vec<_>, _>>()?;
    let rule = match rule {
        Rule::MaxRatio => AssignmentRule::MaxRatio,
        Rule::LowestIndex => AssignmentRule::LowestIndex,
    };
    let a = hffd(&inst, &th, rule)?;
    let costs = (0..inst.n())
        .map(|i| inst.bundle_cost(i, a.bundle_of(i)))
        .collect::<Result<Vec<_>, _>>()?;
    let out = AllocationJson::from_allocation(&relabel(&inst, &a));
    ok(json!({
        "thresholds": th.iter().map(|t| t.to_string()).collect::<Vec<_>>(),
        "bundles": out.bundles,
        "assignment": out.assignment,
        "unallocated": out.unallocated,
        "agent_costs": costs,
    }))
}

fn run_allocate(input: &Path, epsilon: &str, exact: bool, with_mms: bool, output: Option<PathBuf>) -> Outcome {
    let inst = parse_instance(&read(input)?)?;
    let eps = if exact {
        if !(2..=3).contains(&inst.n()) {
            return Err(usage(format!("--exact needs 2 or 3 agents, got {}", inst.n())));
        }
        exact_small_n_epsilon(inst.n())?
    } else {
        parse_rational(epsilon)?
    };
    if with_mms {
        exact_limits(inst.n(), inst.m())?;
    }
    let out = allocate(&inst, &eps)?;
    let a = AllocationJson::from_allocation(&out.allocation);
    let costs = (0..inst.n())
        .map(|i| Ok(out.allocation.bundle_of(i).cost(inst.row(i)?)))
        .collect::<Result<Vec<u64>, Error>>()?;
    let mut value = json!({
        "epsilon": eps.to_string(),
        "alpha": if inst.n() >= 2 { Value::String(alpha_ratio(inst.n())?.to_string()) } else { Value::Null },
        "bundles": a.bundles,
        "assignment": a.assignment,
        "unallocated": a.unallocated,
        "agent_costs": costs,
        "thresholds": out.trace.thresholds,
        "updates": out.trace.updates,
        "rounds": out.trace.rounds,
    });
    if with_mms {
        let mus = (0..inst.n())
            .map(|i| Ok(mms(inst.row(i)?, &Bundle::full(inst.m()), inst.n())?.mu))
            .collect::<Result<Vec<u64>, Error>>()?;
        value["mms"] = json!(mus);
    }
    Ok(Report {
        value,
        ok: true,
        output,
    })
}

fn load_tuple(src: &TupleSource) -> Result<FfvTuple, Failure> {
    let inst = match &src.instance {
        Some(p) => Some(IdoInstance::new(parse_instance(&read(p)?)?)?),
        None => None,
    };
    let t = parse_tuple(&read(&src.tuple)?, inst.as_ref())?;
    exact_limits(t.n(), t.items.len())?;
    Ok(t)
}

fn cstar_of(t: &FfvTuple, label: &str) -> Result<usize, Failure> {
    let c = parse_chore_label(label)?;
    if !t.unallocated().contains(c) {
        return Err(usage(format!("{label} is not an unallocated chore of the tuple")));
    }
    Ok(c)
}

fn tuple_json(t: &FfvTuple) -> Result<Value, Failure> {
    let j = TupleJson::from_tuple(t, None, true)?;
    serde_json::to_value(j).map_err(|e| Failure::Domain(e.to_string()))
}

fn run_verify_ffv(src: &TupleSource) -> Outcome {
    let t = load_tuple(src)?;
    let mu = t.mms()?;
    let ffv = t.is_ffv(MmsPrecondition::Verify)?;
    let violations: Vec<usize> = t.ffv_violations().into_iter().map(|k| k + 1).collect();
    let benchmarks: Vec<Vec<String>> = (0..t.n()).map(|k| bundle_labels(&t.benchmark(k))).collect();
    Ok(Report {
        value: json!({
            "ffv": ffv,
            "mu": mu,
            "tau": t.tau.to_string(),
            "violations": violations,
            "benchmarks": benchmarks,
            "unallocated": bundle_labels(&t.unallocated()),
        }),
        ok: ffv,
        output: None,
    })
}

fn run_verify_tidy(src: &TupleSource, cstar: &str) -> Outcome {
    let t = load_tuple(src)?;
    let c = cstar_of(&t, cstar)?;
    let ctx = tidy_up(&t, c)?;
    let report = tidy_lemma_check(&ctx);
    Ok(Report {
        value: json!({
            "tuple": tuple_json(&ctx.tuple)?,
            "cstar": chore_label(ctx.cstar),
            "mu": ctx.mu,
            "gamma": ctx.gamma.to_string(),
            "partition": ctx.partition.iter().map(bundle_labels).collect::<Vec<_>>(),
            "failures": report,
        }),
        ok: report.is_empty(),
        output: None,
    })
}

fn run_reduce(src: &TupleSource, cstar: &str) -> Outcome {
    let t = load_tuple(src)?;
    let c = cstar_of(&t, cstar)?;
    let r = reduce_excessive(&t, c)?;
    let report = reduction_check(&r)?;
    Ok(Report {
        value: json!({
            "tuple": tuple_json(&r.tuple)?,
            "cstar": chore_label(r.cstar),
            "scale": r.scale,
            "mu": r.mu,
            "steps": r.steps,
            "failures": report,
        }),
        ok: report.is_empty(),
        output: None,
    })
}

fn run_fuzz(n: usize, alpha: &[String], seeds: u64, first_seed: u64, max_m: usize, max_cost: u64) -> Outcome {
    exact_limits(n, max_m)?;
    if max_cost == 0 {
        return Err(usage("--max-cost must be positive"));
    }
    let alphas = alpha.iter().map(|a| parse_rational(a)).collect::<Result<Vec<_>, _>>()?;
    let cfg = FuzzConfig {
        n,
        alphas,
        seeds,
        first_seed,
        max_m,
        max_cost,
    };
    let out = fuzz_monotonicity(&cfg)?;
    let counterexamples = out
        .counterexamples
        .iter()
        .map(|c| Ok(json!({ "mu": c.mu, "alpha": c.alpha.to_string(), "tuple": tuple_json(&c.tuple)? })))
        .collect::<Result<Vec<_>, Failure>>()?;
    let weak: Vec<Value> = out
        .weak_violations
        .iter()
        .map(|(seed, a, b)| json!({ "seed": seed, "succeeds_at": a.to_string(), "fails_at": b.to_string() }))
        .collect();
    let clean = out.counterexamples.is_empty() && out.inconsistencies.is_empty();
    Ok(Report {
        value: json!({
            "scope": format!("verified up to (n={n}, m={max_m}, cost={max_cost})"),
            "n": n,
            "max_m": max_m,
            "max_cost": max_cost,
            "alphas": cfg.alphas.iter().map(|a| a.to_string()).collect::<Vec<_>>(),
            "seeds": format!("{first_seed}..{}", first_seed + seeds),
            "instances": out.instances,
            "exercised": out.exercised,
            "counterexamples": counterexamples,
            "weak_violations": weak,
            "inconsistencies": out.inconsistencies,
        }),
        ok: clean,
        output: None,
    })
}

fn dispatch(cmd: Command) -> Outcome {
    match cmd {
        Command::Mms { src, certificate } => run_mms(&src, certificate),
        Command::Ffd { src, tau } => run_ffd(&src, &tau),
        Command::Multifit { src, lo, hi } => run_multifit(&src, lo, hi),
        Command::Hffd { input, thresholds, rule } => run_hffd(&input, &thresholds, rule),
        Command::Allocate {
            input,
            epsilon,
            exact,
            with_mms,
            output,
        } => run_allocate(&input, &epsilon, exact, with_mms, output),
        Command::Verify { what } => match what {
            VerifyCommand::Ffv { tuple } => run_verify_ffv(&tuple),
            VerifyCommand::Tidy { tuple, cstar } => run_verify_tidy(&tuple, &cstar),
        },
        Command::Reduce { tuple, cstar } => run_reduce(&tuple, &cstar),
        Command::Fuzz { what } => match what {
            FuzzCommand::Monotonicity {
                n,
                alpha,
                seeds,
                first_seed,
                max_m,
                max_cost,
            } => run_fuzz(n, &alpha, seeds, first_seed, max_m, max_cost),
        },
        Command::Ratios { n } if n < 2 => Err(usage("--n must be at least 2")),
        Command::Ratios { n } => ok(json!({ "n": n, "alpha": alpha_ratio(n)?.to_string() })),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) if !e.use_stderr() => {
            let _ = e.print();
            return ExitCode::SUCCESS;
        }
        Err(e) => {
            let text = e.to_string();
            eprintln!("{}", text.lines().next().unwrap_or("usage error"));
            return ExitCode::from(2);
        }
    };
    match dispatch(cli.command) {
        Ok(report) => {
            let text = report.value.to_string();
            match &report.output {
                Some(path) => {
                    if let Err(e) = fs::write(path, format!("{text}\n")) {
                        eprintln!("cannot write {}: {e}", path.display());
                        return ExitCode::from(2);
                    }
                }
                None => println!("{text}"),
            }
            if report.ok {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            }
        }
        Err(Failure::Domain(msg)) => {
            eprintln!("{msg}");
            ExitCode::from(1)
        }
        Err(Failure::Usage(msg)) => {
            eprintln!("{msg}");
            ExitCode::from(2)
        }
    }
}
