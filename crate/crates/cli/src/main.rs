//! `lucasv`: command-line front end for the lucasv library.
//!
//! Exit codes: 0 success, 1 verification failure, 2 usage error,
//! 3 I/O or corrupted-state error.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use lucasv::report;
use lucasv::search::SearchOptions;
use lucasv::theorem::{format_theorems, parse_theorems};
use lucasv::{
    builtin_theorems, classify, coverage, discover, find_period, gcd_witness, search, v_exact,
    v_mod, DiscoverOptions, DivisibilityTheorem, Error, FamilySpec, SeqParams,
};
use num_bigint::BigUint;

/// Directory for search checkpoints when `--checkpoint` is not given.
const CHECKPOINT_DIR_ENV: &str = "LUCASV_CHECKPOINT_DIR";

#[derive(Parser)]
#[command(name = "lucasv", version, about = "Lucas V-sequence special integers")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Print V_n(P, Q), or V_n mod m.
    V {
        #[arg(short = 'P', allow_negative_numbers = true)]
        p: i64,
        #[arg(short = 'Q', allow_negative_numbers = true)]
        q: i64,
        #[arg(short = 'n')]
        n: u64,
        #[arg(short = 'm')]
        m: Option<u64>,
    },
    /// Print F(p) and its digit count.
    Value {
        #[command(flatten)]
        family: FamilyArg,
        #[arg(short = 'p')]
        p: u64,
        #[arg(long)]
        human: bool,
    },
    /// Print the period and residue cycle of V_n mod m.
    Period {
        #[arg(short = 'P', allow_negative_numbers = true)]
        p: i64,
        #[arg(short = 'Q', allow_negative_numbers = true)]
        q: i64,
        #[arg(short = 'm')]
        m: u64,
        /// Also print rows 0..=N of the residue table.
        #[arg(long, value_name = "N")]
        table: Option<u64>,
        #[arg(long)]
        human: bool,
    },
    /// Check divisibility theorems; exits 1 if any fails.
    Verify {
        #[command(flatten)]
        theorems: TheoremSource,
        /// Also audit every class member p <= N.
        #[arg(long, value_name = "N")]
        deep: Option<u64>,
        /// Custom family referenced by theorems (NAME:P:Q:t0:t1:c:d:k).
        #[arg(short = 'f', long)]
        family: Option<FamilySpec>,
    },
    /// Discover divisibility theorems for primes q <= q_max.
    Discover {
        #[command(flatten)]
        family: FamilyArg,
        #[arg(long)]
        q_max: u64,
        #[arg(long)]
        sequential: bool,
    },
    /// Search a range of p for prime values of F(p).
    Search {
        #[command(flatten)]
        family: FamilyArg,
        #[arg(long)]
        from: u64,
        #[arg(long)]
        to: u64,
        /// Visit every integer p, not only primes.
        #[arg(long)]
        all_integers: bool,
        /// Use the built-in theorems as filters.
        #[arg(long)]
        builtin_filters: bool,
        /// Theorem file to use as filters.
        #[arg(long, value_name = "FILE")]
        filters: Option<PathBuf>,
        /// Discover filters with q <= Q before searching.
        #[arg(long, value_name = "Q")]
        discover_filters: Option<u64>,
        #[arg(long, value_name = "FILE")]
        checkpoint: Option<PathBuf>,
        #[arg(long, default_value_t = 0)]
        workers: usize,
        /// Stop after recording this many candidates.
        #[arg(long)]
        stop_after: Option<usize>,
    },
    /// Report which residues mod M are covered by theorems.
    Coverage {
        #[command(flatten)]
        family: FamilyArg,
        #[command(flatten)]
        theorems: TheoremSource,
        #[arg(long)]
        modulus: u64,
    },
    /// gcd of F(p1) and F(p2) for two members of a class r mod m.
    Gcd {
        #[command(flatten)]
        family: FamilyArg,
        #[arg(short = 'r')]
        r: u64,
        #[arg(short = 'm')]
        m: u64,
        #[arg(long)]
        p1: u64,
        #[arg(long)]
        p2: u64,
    },
    /// Classify a positive integer as prime, probable prime or composite.
    Classify { n: BigUint },
}

#[derive(Args)]
struct FamilyArg {
    /// T, Y, or NAME:P:Q:t0:t1:c:d:k.
    #[arg(short = 'f', long = "family")]
    family: FamilySpec,
}

#[derive(Args)]
#[group(required = true, multiple = false)]
struct TheoremSource {
    /// The built-in theorem set.
    #[arg(long)]
    builtin: bool,
    /// A theorem file in the line format written by `discover`.
    #[arg(long, value_name = "FILE")]
    file: Option<PathBuf>,
    /// Theorems discovered on the fly for q <= Q.
    #[arg(long, value_name = "Q")]
    discover: Option<u64>,
}

enum Failure {
    Verification(String),
    Lib(Error),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Lib(e)
    }
}

fn read_theorems(path: &PathBuf) -> Result<Vec<DivisibilityTheorem>, Error> {
    parse_theorems(&std::fs::read_to_string(path)?)
}

fn load_theorems(
    src: &TheoremSource,
    family: Option<&FamilySpec>,
) -> Result<Vec<DivisibilityTheorem>, Error> {
    if src.builtin {
        Ok(builtin_theorems())
    } else if let Some(path) = &src.file {
        read_theorems(path)
    } else if let Some(q_max) = src.discover {
        let fam = family.ok_or_else(|| Error::Precondition("--discover needs a family".into()))?;
        Ok(discover(fam, q_max, DiscoverOptions::default())?.theorems)
    } else {
        unreachable!("clap enforces one theorem source")
    }
}

fn run(cmd: Command) -> Result<String, Failure> {
    Ok(match cmd {
        Command::V { p, q, n, m } => {
            let params = SeqParams::new(p, q)?;
            match m {
                Some(m) => format!("{}\n", v_mod(params, n, m)?),
                None => format!("{}\n", v_exact(params, n)),
            }
        }
        Command::Value { family, p, human } => {
            let fam = family.family;
            if human {
                let value = fam.value(p)?;
                let digits = value.magnitude().to_str_radix(10).len();
                let unit = if digits == 1 { "digit" } else { "digits" };
                format!("{}({p}) = {value} ({digits} {unit})\n", fam.name())
            } else {
                format!("{}\n", report::value_line(&fam, p)?)
            }
        }
        Command::Period {
            p,
            q,
            m,
            table,
            human,
        } => {
            let record = find_period(SeqParams::new(p, q)?, m)?;
            let mut out = format!("{record}\n");
            if let Some(upto) = table {
                if human {
                    out.push_str(&report::period_table(&record, upto));
                } else {
                    out.push_str(&report::period_rows(&record, upto));
                }
            }
            out
        }
        Command::Verify {
            theorems,
            deep,
            family,
        } => {
            let list = load_theorems(&theorems, family.as_ref())?;
            let resolve = |name: &str| match &family {
                Some(f) if f.name() == name => Ok(f.clone()),
                _ => FamilySpec::builtin(name),
            };
            let rep = report::verify(&list, resolve, deep)?;
            if rep.failures > 0 {
                return Err(Failure::Verification(rep.render()));
            }
            rep.render()
        }
        Command::Discover {
            family,
            q_max,
            sequential,
        } => {
            let found = discover(
                &family.family,
                q_max,
                DiscoverOptions {
                    parallel: !sequential,
                },
            )?;
            let mut out = format_theorems(&found.theorems);
            for skip in &found.skipped {
                out.push_str(&format!("{skip}\n"));
            }
            out
        }
        Command::Search {
            family,
            from,
            to,
            all_integers,
            builtin_filters,
            filters,
            discover_filters,
            checkpoint,
            workers,
            stop_after,
        } => {
            let fam = family.family;
            let mut list = Vec::new();
            if builtin_filters {
                list.extend(builtin_theorems());
            }
            if let Some(path) = &filters {
                list.extend(read_theorems(path)?);
            }
            if let Some(q_max) = discover_filters {
                list.extend(discover(&fam, q_max, DiscoverOptions::default())?.theorems);
            }
            list.sort_by_key(|t| (t.q, t.class_modulus, t.class_residue));
            list.dedup();
            let checkpoint = checkpoint.or_else(|| {
                std::env::var_os(CHECKPOINT_DIR_ENV).map(|dir| {
                    let mode = if all_integers { "all" } else { "primes" };
                    PathBuf::from(dir)
                        .join(format!("search-{}-{from}-{to}-{mode}.jsonl", fam.name()))
                })
            });
            let state = search(
                &fam,
                from,
                to,
                &list,
                checkpoint.as_deref(),
                SearchOptions {
                    primes_only: !all_integers,
                    workers,
                    stop_after,
                },
            )?;
            report::search_summary(&state)
        }
        Command::Coverage {
            family,
            theorems,
            modulus,
        } => {
            let fam = family.family;
            let list = load_theorems(&theorems, Some(&fam))?;
            coverage(&fam, &list, modulus)?.to_string()
        }
        Command::Gcd {
            family,
            r,
            m,
            p1,
            p2,
        } => {
            format!("{}\n", gcd_witness(&family.family, r, m, p1, p2)?)
        }
        Command::Classify { n } => {
            let v = classify(&n)?;
            format!("n={} verdict={}\n", v.n, v.verdict)
        }
    })
}

fn exit_code(e: &Error) -> u8 {
    match e {
        Error::Io(_)
        | Error::CorruptCheckpoint { .. }
        | Error::CheckpointMismatch { .. }
        | Error::TheoremParse { .. } => 3,
        Error::FilterUnsound { .. } => 1,
        _ => 2,
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli.command) {
        Ok(out) => {
            print!("{out}");
            ExitCode::SUCCESS
        }
        Err(Failure::Verification(out)) => {
            print!("{out}");
            ExitCode::from(1)
        }
        Err(Failure::Lib(e)) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code(&e))
        }
    }
}
