use std::path::PathBuf;
use std::time::Instant;

use bitprobe::acceptance::{run_acceptance, summary_line};
use bitprobe::classical::{bitvector_build, BitTable, BitVectorScheme};
use bitprobe::model::{
    greedy_family_bound, greedy_family_with_limit, subsets_up_to, MembershipInstance,
};
use bitprobe::quantum::{
    encode_classical_as_quantum, gram_from_states, parity_decompose, random_scheme,
    scheme_from_json, scheme_to_json, synthetic_overlap_state, tensor_exponent, tensor_power_rank,
    EncodeOptions, QuantumScheme, RegisterLayout, DEFAULT_RANK_TOLERANCE, MAX_PARITY_SPACE,
};
use bitprobe::report::{ExperimentReport, Outcome};
use bitprobe::seed::Seed;
use bitprobe::verifier::{
    degree_bound_check, exhaustive_search, independence_check, SearchCertificate, SearchConfig,
    SearchOutcome,
};
use clap::{Args, Subcommand, ValueEnum};

use crate::{command_echo, emit, read_text, write_text, CliError, OutputArgs};

const PARITY_TOLERANCE: f64 = 1e-9;

#[derive(Args, Debug)]
pub struct SearchCaps {
    /// Largest universe the search accepts.
    #[arg(long)]
    max_universe: Option<usize>,
    #[arg(long)]
    max_capacity: Option<usize>,
    #[arg(long)]
    max_space: Option<usize>,
    #[arg(long)]
    max_probes: Option<usize>,
    /// Abort the search after visiting this many nodes.
    #[arg(long)]
    node_budget: Option<u64>,
}

impl SearchCaps {
    fn config(&self) -> SearchConfig {
        let d = SearchConfig::default();
        SearchConfig {
            max_universe: self.max_universe.unwrap_or(d.max_universe),
            max_capacity: self.max_capacity.unwrap_or(d.max_capacity),
            max_space: self.max_space.unwrap_or(d.max_space),
            max_probes: self.max_probes.unwrap_or(d.max_probes),
            node_budget: self.node_budget.unwrap_or(d.node_budget),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Preset {
    /// Quantum encoding of the bit-vector scheme, over all sets of size at most n.
    Bitvector,
    /// Haar-random layers, over all 2^s tables.
    Random,
    /// A scheme file given with `--scheme`, over all 2^s tables.
    File,
}

#[derive(Subcommand)]
pub enum VerifyCommand {
    /// Exhaustive search for one (m, n, s, t) tuple, checked against the space inequality.
    Tradeoff {
        #[arg(long)]
        m: usize,
        #[arg(long)]
        n: usize,
        #[arg(long)]
        s: usize,
        #[arg(long)]
        t: usize,
        #[command(flatten)]
        caps: SearchCaps,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Every tuple up to the given caps, plus independence and degree checks on found schemes.
    Classical {
        #[arg(long)]
        m: usize,
        #[arg(long)]
        n: usize,
        #[arg(long)]
        s: usize,
        #[arg(long)]
        t: usize,
        #[command(flatten)]
        caps: SearchCaps,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Tensor-power rank of a quantum scheme's operators.
    Quantum {
        #[arg(long, value_enum)]
        preset: Preset,
        #[arg(long)]
        m: Option<usize>,
        #[arg(long)]
        n: Option<usize>,
        /// Table length for `random`.
        #[arg(long)]
        s: Option<usize>,
        /// Probes for `random`.
        #[arg(long)]
        t: Option<usize>,
        /// Work register size for `random`.
        #[arg(long, default_value_t = 2)]
        work: usize,
        /// Tensor exponent; defaults to n for `bitvector` and 1 otherwise.
        #[arg(long)]
        exponent: Option<usize>,
        #[arg(long, default_value_t = DEFAULT_RANK_TOLERANCE)]
        tolerance: f64,
        /// Probability of flipping a "present" answer (`bitvector` only).
        #[arg(long, default_value_t = 0.0)]
        positive_error: f64,
        #[arg(long)]
        scheme: Option<PathBuf>,
        /// Save the scheme that was checked as JSON.
        #[arg(long)]
        save: Option<PathBuf>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Gram matrix of synthetic states with overlap 2 sqrt(eps) over a greedy family.
    Gram {
        #[arg(long, default_value_t = 64)]
        m: usize,
        #[arg(long, default_value_t = 2)]
        n: usize,
        #[arg(long, default_value_t = 16)]
        family_size: usize,
        #[arg(long, default_value_t = 0.01)]
        epsilon: f64,
        /// Defaults to the smallest exponent that makes the matrix dominant.
        #[arg(long)]
        exponent: Option<usize>,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Greedy family of n-sets with small pairwise intersections.
    Family {
        #[arg(long)]
        m: usize,
        #[arg(long)]
        n: usize,
        /// Stop at this many sets instead of the size bound.
        #[arg(long)]
        limit: Option<usize>,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// The full acceptance suite, or the criteria listed.
    Acceptance {
        #[arg(long, default_value_t = 20_240_601)]
        seed: u64,
        #[arg(long, value_delimiter = ',')]
        criteria: Vec<u32>,
        #[command(flatten)]
        output: OutputArgs,
    },
}

fn certificate_outcome(suite: &str, cert: &SearchCertificate) -> Outcome {
    let key = format!("m={},n={},s={},t={}", cert.universe_size, cert.capacity, cert.space, cert.probes);
    let verdict = match cert.outcome {
        SearchOutcome::Found => "found",
        SearchOutcome::None => "none exists",
    };
    let mut o = Outcome::new(suite, key, cert.consistent_with_inequality())
        .measure("outcome", &cert.outcome)
        .measure("inequality_holds", cert.inequality_holds)
        .measure("function_count", cert.function_count)
        .measure("nodes_visited", cert.nodes_visited)
        .detail(verdict);
    if let Some(scheme) = &cert.scheme {
        o = o.measure("scheme", scheme);
    }
    o
}

fn tradeoff(m: usize, n: usize, s: usize, t: usize, caps: &SearchCaps) -> Result<ExperimentReport, CliError> {
    let started = Instant::now();
    let cert = exhaustive_search(m, n, s, t, &caps.config())?;
    let mut report = ExperimentReport::new(command_echo(), None);
    report.parameter("search", serde_json::json!({"m": m, "n": n, "s": s, "t": t}));
    let outcome = certificate_outcome("tradeoff", &cert);
    eprintln!(
        "{}; inequality {}",
        outcome.detail,
        if cert.inequality_holds { "holds" } else { "fails" }
    );
    report.push(outcome, started.elapsed().as_secs_f64());
    Ok(report)
}

fn classical(m: usize, n: usize, s: usize, t: usize, caps: &SearchCaps) -> Result<ExperimentReport, CliError> {
    let mut report = ExperimentReport::new(command_echo(), None);
    report.parameter("caps", serde_json::json!({"m": m, "n": n, "s": s, "t": t}));
    let config = caps.config();
    let total = Instant::now();
    for mm in 1..=m {
        for nn in 1..=n.min(mm) {
            for ss in 1..=s {
                for tt in 1..=t {
                    let started = Instant::now();
                    let cert = exhaustive_search(mm, nn, ss, tt, &config)?;
                    let mut outcome = certificate_outcome("classical", &cert);
                    if let Some(scheme) = &cert.scheme {
                        let ind = independence_check(scheme)?;
                        let deg = degree_bound_check(scheme)?;
                        outcome.passed &= ind.pass && deg.pass;
                        outcome = outcome.measure("independence", &ind).measure("degree", &deg);
                    }
                    report.push(outcome, started.elapsed().as_secs_f64());
                }
            }
        }
    }
    report.timing.wall_clock_seconds = total.elapsed().as_secs_f64();
    let found = report.outcomes.iter().filter(|o| o.detail == "found").count();
    eprintln!("{} tuples, {found} schemes found", report.outcomes.len());
    Ok(report)
}

fn all_tables(s: usize) -> Vec<BitTable> {
    (0..1u64 << s).map(|mask| BitTable::from_mask(mask, s)).collect()
}

#[allow(clippy::too_many_arguments)]
fn quantum(
    preset: Preset,
    m: Option<usize>,
    n: Option<usize>,
    s: Option<usize>,
    t: Option<usize>,
    work: usize,
    exponent: Option<usize>,
    tolerance: f64,
    positive_error: f64,
    scheme_path: Option<PathBuf>,
    save: Option<PathBuf>,
    seed: u64,
) -> Result<ExperimentReport, CliError> {
    let started = Instant::now();
    let need = |v: Option<usize>, flag: &str| {
        v.ok_or_else(|| CliError::usage(format!("--{flag} is required for this preset")))
    };
    let (scheme, tables, exponent, key): (QuantumScheme, Vec<BitTable>, usize, String) = match preset {
        Preset::Bitvector => {
            let (m, n) = (need(m, "m")?, need(n, "n")?);
            let bv = BitVectorScheme::new(m, n)?;
            let scheme = encode_classical_as_quantum(&bv, EncodeOptions { positive_error })?;
            let tables = subsets_up_to(m, n)
                .into_iter()
                .map(|set| {
                    let inst = MembershipInstance::new(m, n, set)?;
                    Ok(bitvector_build(&inst)?.1)
                })
                .collect::<Result<Vec<_>, CliError>>()?;
            let e = exponent.unwrap_or(n);
            (scheme, tables, e, format!("bitvector,m={m},n={n},positive_error={positive_error}"))
        }
        Preset::Random => {
            let (s, t) = (need(s, "s")?, need(t, "t")?);
            let layout = RegisterLayout::new(s, work)?;
            let scheme = random_scheme(layout, t, m.unwrap_or(1), &mut Seed(seed).split("random-scheme").rng())?;
            (scheme, all_tables(s), exponent.unwrap_or(1), format!("random,s={s},t={t},work={work},seed={seed}"))
        }
        Preset::File => {
            let path = scheme_path.ok_or_else(|| CliError::usage("--scheme is required for the file preset"))?;
            let scheme = scheme_from_json(&read_text(&path)?)?;
            let s = scheme.layout().address_count;
            (scheme, all_tables(s), exponent.unwrap_or(1), format!("file,{}", path.display()))
        }
    };
    if let Some(path) = save {
        write_text(&scheme_to_json(&scheme), Some(&path))?;
    }
    let rank = tensor_power_rank(&scheme, &tables, exponent, tolerance)?;
    // Encoded schemes are checked for independence; arbitrary ones only for the bound.
    let mut passed = rank.dimension_bound_holds;
    if preset == Preset::Bitvector {
        passed &= rank.independent;
    }
    let mut outcome = Outcome::new("quantum", key, passed)
        .tolerance(tolerance)
        .measure("rank", rank.rank)
        .measure("dimension_bound", &rank.dimension_bound)
        .measure("set_count", rank.set_count)
        .measure("exponent", exponent)
        .measure("singular_values", &rank.singular_values);
    if scheme.layout().address_count <= MAX_PARITY_SPACE && preset != Preset::Bitvector {
        let summary = parity_decompose(&scheme)?.summary(PARITY_TOLERANCE);
        outcome.passed &= summary.reconstruction_error <= PARITY_TOLERANCE
            && summary.high_degree_max <= PARITY_TOLERANCE;
        outcome = outcome.measure("parity", &summary);
    }
    eprintln!(
        "rank {} of {} sets, bound {}, {}",
        rank.rank,
        rank.set_count,
        rank.dimension_bound,
        if outcome.passed { "pass" } else { "fail" }
    );
    let mut report = ExperimentReport::new(command_echo(), Some(seed));
    report.parameter("preset", format!("{preset:?}").to_lowercase());
    report.push(outcome, started.elapsed().as_secs_f64());
    report.timing.wall_clock_seconds = started.elapsed().as_secs_f64();
    Ok(report)
}

fn gram(
    m: usize,
    n: usize,
    family_size: usize,
    epsilon: f64,
    exponent: Option<usize>,
) -> Result<ExperimentReport, CliError> {
    let started = Instant::now();
    let family = greedy_family_with_limit(m, n, Some(family_size))?;
    if family.len() < family_size {
        return Err(CliError::usage(format!(
            "the greedy family over m={m} has only {} sets",
            family.len()
        )));
    }
    let texp = match exponent {
        Some(e) => e,
        None => tensor_exponent(family_size, n, epsilon)?,
    };
    let delta = 2.0 * epsilon.sqrt();
    let g = gram_from_states(&family, epsilon, texp, |a, i| {
        Ok(synthetic_overlap_state(&family, delta, a, i))
    })?;
    let passed = g.nonsingular && g.singular_value_check;
    eprintln!(
        "margin {:.6}, min singular value {:.6}, {}",
        g.dominance_margin,
        g.min_singular_value,
        if passed { "pass" } else { "fail" }
    );
    let outcome = Outcome::new(
        "gram",
        format!("m={m},n={n},family={family_size},epsilon={epsilon},exponent={texp}"),
        passed,
    )
    .measure("report", &g);
    let mut report = ExperimentReport::new(command_echo(), None);
    report.push(outcome, started.elapsed().as_secs_f64());
    report.timing.wall_clock_seconds = started.elapsed().as_secs_f64();
    Ok(report)
}

fn family(m: usize, n: usize, limit: Option<usize>) -> Result<ExperimentReport, CliError> {
    let started = Instant::now();
    let bound = greedy_family_bound(m, n);
    let limit = match limit {
        Some(l) => l,
        None => usize::try_from(&bound)
            .map_err(|_| CliError::cap(format!("family bound {bound} does not fit in memory")))?,
    };
    let f = greedy_family_with_limit(m, n, Some(limit))?;
    let worst = f.max_pairwise_intersection();
    let passed = f.len() >= limit && worst <= f.intersection_threshold();
    eprintln!(
        "size {} (bound {bound}), max intersection {worst}, {}",
        f.len(),
        if passed { "pass" } else { "fail" }
    );
    let outcome = Outcome::new("family", format!("m={m},n={n},limit={limit}"), passed)
        .measure("size", f.len())
        .measure("bound", bound.to_string())
        .measure("max_intersection", worst)
        .measure("intersection_threshold", f.intersection_threshold());
    let mut report = ExperimentReport::new(command_echo(), None);
    report.push(outcome, started.elapsed().as_secs_f64());
    report.timing.wall_clock_seconds = started.elapsed().as_secs_f64();
    Ok(report)
}

pub fn run(command: VerifyCommand) -> Result<(), CliError> {
    match command {
        VerifyCommand::Tradeoff { m, n, s, t, caps, output } => {
            emit(&tradeoff(m, n, s, t, &caps)?, &output)
        }
        VerifyCommand::Classical { m, n, s, t, caps, output } => {
            emit(&classical(m, n, s, t, &caps)?, &output)
        }
        VerifyCommand::Quantum {
            preset,
            m,
            n,
            s,
            t,
            work,
            exponent,
            tolerance,
            positive_error,
            scheme,
            save,
            seed,
            output,
        } => emit(
            &quantum(preset, m, n, s, t, work, exponent, tolerance, positive_error, scheme, save, seed)?,
            &output,
        ),
        VerifyCommand::Gram { m, n, family_size, epsilon, exponent, output } => {
            emit(&gram(m, n, family_size, epsilon, exponent)?, &output)
        }
        VerifyCommand::Family { m, n, limit, output } => emit(&family(m, n, limit)?, &output),
        VerifyCommand::Acceptance { seed, criteria, output } => {
            if let Some(bad) = criteria.iter().find(|c| !(1..=10).contains(*c)) {
                return Err(CliError::usage(format!("no criterion {bad}")));
            }
            let mut report = run_acceptance(Seed(seed), &criteria);
            report.command = command_echo();
            for o in &report.outcomes {
                eprintln!("{}", summary_line(o));
            }
            emit(&report, &output)
        }
    }
}
