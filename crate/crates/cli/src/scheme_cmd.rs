use std::path::PathBuf;

use bitprobe::classical::{
    amplify, bitvector_build, empirical_error, oneprobe_random_build, perfect_hash_build,
    BitTable, MembershipScheme, OneProbeConfig, SchemeDescriptor,
};
use bitprobe::model::{amplification_bounds, amplification_params, MembershipInstance};
use bitprobe::report::{ExperimentReport, Outcome};
use bitprobe::seed::Seed;
use clap::{Args, Subcommand, ValueEnum};

use crate::{command_echo, emit, read_text, write_text, CliError, OutputArgs};

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Kind {
    Bitvector,
    Oneprobe,
    PerfectHash,
    Amplified,
}

#[derive(Args, Debug)]
pub struct SchemeArgs {
    #[arg(long, value_enum)]
    kind: Kind,
    /// Universe size.
    #[arg(long)]
    m: usize,
    /// Capacity; defaults to the size of `--set`.
    #[arg(long)]
    n: Option<usize>,
    #[arg(long, default_value_t = 0.1)]
    epsilon: f64,
    /// Repetitions for `amplified`; defaults to the count that makes the scheme exact whp.
    #[arg(long)]
    k: Option<usize>,
    /// Fraction of each member's locations left unset (`oneprobe`, `amplified`).
    #[arg(long)]
    planted_error: Option<f64>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Stored set as a comma-separated list.
    #[arg(long, value_delimiter = ',', conflicts_with = "random")]
    set: Option<Vec<usize>>,
    /// Store a random set of size `n` (the default when `--set` is absent).
    #[arg(long)]
    random: bool,
}

#[derive(Subcommand)]
pub enum SchemeCommand {
    /// Store a set and print its table as a bit string.
    Build {
        #[command(flatten)]
        scheme: SchemeArgs,
        /// Also write the table file here.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Write the scheme descriptor (JSON) here.
        #[arg(long)]
        descriptor: Option<PathBuf>,
    },
    /// Answer one membership query.
    Query {
        #[command(flatten)]
        scheme: SchemeArgs,
        #[arg(long)]
        q: usize,
        /// Query this table file instead of storing the set afresh.
        #[arg(long)]
        table: Option<PathBuf>,
    },
    /// Monte-Carlo false-positive and false-negative rates.
    Bench {
        #[command(flatten)]
        scheme: SchemeArgs,
        #[arg(long, default_value_t = 10_000)]
        trials: usize,
        #[command(flatten)]
        output: OutputArgs,
    },
}

struct Built {
    scheme: Box<dyn MembershipScheme>,
    descriptor: SchemeDescriptor,
    instance: MembershipInstance,
    table: BitTable,
    /// Error the measured rates are held to.
    nominal_error: f64,
}

fn instance(args: &SchemeArgs, seed: Seed) -> Result<MembershipInstance, CliError> {
    match &args.set {
        Some(set) => {
            let n = args.n.unwrap_or(set.len().max(1));
            Ok(MembershipInstance::new(args.m, n, set.clone())?)
        }
        None => {
            let n = args.n.ok_or_else(|| CliError::usage("--n is required without --set"))?;
            Ok(MembershipInstance::random(args.m, n, &mut seed.split("set").rng())?)
        }
    }
}

fn build(args: &SchemeArgs) -> Result<Built, CliError> {
    let seed = Seed(args.seed);
    let instance = instance(args, seed)?;
    let n = instance.capacity();
    let planted = |s: bitprobe::classical::RandomizedOneProbeScheme| match args.planted_error {
        Some(rate) => s.with_planted_member_error(rate),
        None => Ok(s),
    };
    let (scheme, descriptor, nominal_error): (Box<dyn MembershipScheme>, SchemeDescriptor, f64) =
        match args.kind {
            Kind::Bitvector => {
                let (s, _) = bitvector_build(&instance)?;
                let d = SchemeDescriptor::from(&s);
                (Box::new(s), d, 0.0)
            }
            Kind::PerfectHash => {
                let (s, _) = perfect_hash_build(&instance, seed.split("scheme"))?;
                let d = SchemeDescriptor::from(&s);
                (Box::new(s), d, 0.0)
            }
            Kind::Oneprobe => {
                let s = oneprobe_random_build(
                    args.m,
                    n,
                    args.epsilon,
                    OneProbeConfig::default(),
                    seed.split("scheme"),
                )?;
                let s = planted(s)?;
                let d = SchemeDescriptor::from(&s);
                (Box::new(s), d, args.epsilon)
            }
            Kind::Amplified => {
                let k = match args.k {
                    Some(k) => k,
                    None => amplification_params(args.m as u64, args.epsilon)?.k,
                };
                let base = oneprobe_random_build(
                    args.m,
                    n,
                    args.epsilon,
                    OneProbeConfig::default(),
                    seed.split("scheme"),
                )?;
                let s = amplify(planted(base)?, k)?;
                let d = SchemeDescriptor::from(&s);
                (Box::new(s), d, amplification_bounds(args.epsilon, k).0)
            }
        };
    let table = scheme.store(&instance)?;
    Ok(Built { scheme, descriptor, instance, table, nominal_error })
}

fn key(args: &SchemeArgs, n: usize) -> String {
    let kind = args.kind.to_possible_value().expect("named variant").get_name().to_string();
    format!("kind={kind},m={},n={n},epsilon={},seed={}", args.m, args.epsilon, args.seed)
}

pub fn run(command: SchemeCommand) -> Result<(), CliError> {
    match command {
        SchemeCommand::Build { scheme, out, descriptor } => {
            let built = build(&scheme)?;
            if let Some(path) = out {
                write_text(&built.table.to_file_string(), Some(&path))?;
            }
            if let Some(path) = descriptor {
                write_text(&built.descriptor.to_json(), Some(&path))?;
            }
            write_text(&built.table.to_bit_string(), None)
        }
        SchemeCommand::Query { scheme, q, table } => {
            let built = build(&scheme)?;
            let table = match table {
                Some(path) => BitTable::from_file_str(&read_text(&path)?)?,
                None => built.table,
            };
            let mut rng = Seed(scheme.seed).split("query").rng();
            let answer = built.scheme.query(&table, q, &mut rng)?;
            let word = if answer.present { "present" } else { "absent" };
            write_text(&format!("{word} probes={}", answer.probes), None)
        }
        SchemeCommand::Bench { scheme, trials, output } => {
            let started = std::time::Instant::now();
            let built = build(&scheme)?;
            let estimate = empirical_error(
                built.scheme.as_ref(),
                &built.instance,
                trials,
                Seed(scheme.seed).split("bench"),
            )?;
            // Three standard deviations of slack at the nominal rate.
            let nominal = built.nominal_error;
            let slack = 3.0 * (nominal * (1.0 - nominal) / trials as f64).sqrt();
            let passed = estimate.false_positive_rate <= nominal + slack
                && estimate.false_negative_rate <= nominal + slack;
            let mut report = ExperimentReport::new(command_echo(), Some(scheme.seed));
            report.parameter("descriptor", &built.descriptor);
            report.parameter("trials", trials);
            let outcome = Outcome::new("scheme-bench", key(&scheme, built.instance.capacity()), passed)
                .tolerance(nominal + slack)
                .measure("false_positive_rate", estimate.false_positive_rate)
                .measure("false_negative_rate", estimate.false_negative_rate)
                .measure("probes_used", estimate.probes_used)
                .measure("total_probes", estimate.total_probes)
                .measure("space", built.scheme.params().space)
                .measure("nominal_error", nominal);
            report.push(outcome, started.elapsed().as_secs_f64());
            report.timing.wall_clock_seconds = started.elapsed().as_secs_f64();
            eprintln!(
                "fp={} fn={} probes={}",
                estimate.false_positive_rate, estimate.false_negative_rate, estimate.probes_used
            );
            emit(&report, &output)
        }
    }
}
