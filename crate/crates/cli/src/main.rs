//! Command-line front end.
//!
//! Exit codes: 0 success, 1 negative answer (nontrivial word, distinct
//! elements, no lifting witness, failed selftest), 2 usage or parse errors,
//! 3 exceeded internal bounds. The environment variable `SPINAL_MAX_MEMO`
//! overrides the word-problem memo bound.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use serde_json::json;

use spinal_core::families::{build_sigma, find_lifting_witness, verify_lifting, Datum};
use spinal_core::hnn::{orbit_ball, HnnError, SigmaTower, DEFAULT_SIGMA_ITERATION_BOUND};
use spinal_core::io;
use spinal_core::nucleus::{
    compute_nucleus, default_closure_bound, verify_quasinucleus, NucleusError,
};
use spinal_core::selftest::{run_selftest, DEFAULT_SAMPLES, DEFAULT_SEED};
use spinal_core::wreath::{WreathError, DEFAULT_MEMO_BOUND};

#[derive(Parser)]
#[command(
    name = "spinal",
    version,
    about = "Exact computation for spinal self-similar groups on p-ary rooted trees"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, Debug, Default, ValueEnum)]
enum PortraitFormat {
    #[default]
    Text,
    Dot,
}

#[derive(Subcommand)]
enum Command {
    /// Validate a datum file and print its shape
    Validate { datum: PathBuf },
    /// Search for a lifting witness and certify the endomorphism
    LiftCheck {
        datum: PathBuf,
        /// Emit the witness report as JSON
        #[arg(long)]
        json: bool,
    },
    /// Apply the lifting endomorphism to a word
    Sigma {
        datum: PathBuf,
        #[arg(long)]
        word: String,
        /// Number of applications (capped by the iteration bound)
        #[arg(long, default_value_t = 1)]
        iterate: u32,
    },
    /// Compute the nucleus and print its canonical words
    Nucleus {
        datum: PathBuf,
        /// Also check the depth-K closure property of the computed set
        #[arg(long, value_name = "K")]
        verify_quasinucleus: Option<u32>,
        /// Closure bound (default: 4x the closed-form nucleus size)
        #[arg(long, value_name = "N")]
        max_size: Option<usize>,
        /// Write the section graph in DOT format to this file
        #[arg(long, value_name = "FILE")]
        dot: Option<PathBuf>,
    },
    /// Word problem: exit 0 if the word is trivial, 1 otherwise
    Wp {
        datum: PathBuf,
        #[arg(long)]
        word: String,
    },
    /// Element equality: exit 0 if equal, 1 if distinct
    Eq {
        datum: PathBuf,
        #[arg(long)]
        left: String,
        #[arg(long)]
        right: String,
    },
    /// Section of a word at a vertex
    Section {
        datum: PathBuf,
        #[arg(long)]
        word: String,
        /// Digit string over 0..p ("-" for the root)
        #[arg(long)]
        vertex: String,
    },
    /// Act on a vertex: a digit string, or `k:w` for the unrooted tree
    Act {
        datum: PathBuf,
        #[arg(long)]
        word: String,
        #[arg(long)]
        on: String,
    },
    /// Nucleus portrait of a word
    Portrait {
        datum: PathBuf,
        #[arg(long)]
        word: String,
        #[arg(long, value_enum, default_value_t)]
        format: PortraitFormat,
    },
    /// Orbit of the base vertex in a ball of the unrooted tree
    Orbit {
        datum: PathBuf,
        #[arg(long, default_value_t = 2)]
        kmax: u32,
        #[arg(long, default_value_t = 3)]
        lmax: usize,
        #[arg(long)]
        json: bool,
    },
    /// Print the wreath recursion in exportable declaration form
    ExportGap { datum: PathBuf },
    /// Run the seeded property suites against the datum
    Selftest {
        datum: PathBuf,
        #[arg(long, default_value_t = DEFAULT_SEED)]
        seed: u64,
        #[arg(long, default_value_t = DEFAULT_SAMPLES)]
        samples: usize,
    },
}

/// Classified failure: usage/parse problems exit 2, exceeded bounds exit 3.
enum Failure {
    Usage(String),
    Bound(String),
}

impl Failure {
    fn code(&self) -> ExitCode {
        match self {
            Failure::Usage(_) => ExitCode::from(2),
            Failure::Bound(_) => ExitCode::from(3),
        }
    }

    fn message(&self) -> &str {
        match self {
            Failure::Usage(m) | Failure::Bound(m) => m,
        }
    }
}

impl From<WreathError> for Failure {
    fn from(err: WreathError) -> Self {
        match err {
            WreathError::DepthBoundExceeded { .. } => Failure::Bound(err.to_string()),
            WreathError::UnknownGenerator(_) => Failure::Usage(err.to_string()),
        }
    }
}

impl From<NucleusError> for Failure {
    fn from(err: NucleusError) -> Self {
        match err {
            NucleusError::ClosureBoundExceeded { .. } => Failure::Bound(err.to_string()),
            NucleusError::Wreath(inner) => inner.into(),
        }
    }
}

impl From<HnnError> for Failure {
    fn from(err: HnnError) -> Self {
        match err {
            HnnError::IterationBoundExceeded { .. } => Failure::Bound(err.to_string()),
            HnnError::Wreath(inner) => inner.into(),
        }
    }
}

impl From<io::ParseError> for Failure {
    fn from(err: io::ParseError) -> Self {
        Failure::Usage(err.to_string())
    }
}

fn memo_bound() -> usize {
    std::env::var("SPINAL_MAX_MEMO")
        .ok()
        .and_then(|value| value.parse().ok())
        .unwrap_or(DEFAULT_MEMO_BOUND)
}

fn load_datum(path: &Path) -> Result<Datum, Failure> {
    let text = fs::read_to_string(path)
        .map_err(|err| Failure::Usage(format!("cannot read {}: {err}", path.display())))?;
    io::parse_datum(&text).map_err(|err| Failure::Usage(err.to_string()))
}

fn parse_word_reporting(input: &str, datum: &Datum) -> Result<spinal_core::GroupWord, Failure> {
    let (word, warnings) = io::parse_word(input, datum)?;
    for warning in warnings {
        eprintln!("warning: {warning}");
    }
    Ok(word)
}

fn witness_and_sigma(
    datum: &Datum,
) -> Result<Option<(spinal_core::LiftWitness, spinal_core::Endomorphism)>, Failure> {
    let Some(witness) = find_lifting_witness(datum) else {
        return Ok(None);
    };
    let sigma = build_sigma(datum, &witness)
        .map_err(|err| Failure::Usage(format!("internal witness inconsistency: {err}")))?;
    Ok(Some((witness, sigma)))
}

fn run(cli: Cli) -> Result<ExitCode, Failure> {
    match cli.command {
        Command::Validate { datum } => {
            let datum = load_datum(&datum)?;
            println!(
                "valid datum: {}, nucleus size {}",
                datum.summary(),
                spinal_core::nucleus_size(&datum)
            );
            Ok(ExitCode::SUCCESS)
        }

        Command::LiftCheck { datum, json } => {
            let datum = load_datum(&datum)?;
            match witness_and_sigma(&datum)? {
                Some((witness, sigma)) => {
                    let verification =
                        verify_lifting(&datum, &sigma, 30, 12, DEFAULT_SEED)?;
                    if json {
                        let sigma_map: serde_json::Map<String, serde_json::Value> = sigma
                            .images()
                            .map(|(base, image)| {
                                (base.to_string(), json!(image.to_string()))
                            })
                            .collect();
                        let report = json!({
                            "liftable_certified": verification.passed,
                            "witness": witness,
                            "sigma": sigma_map,
                        });
                        println!("{report}");
                    } else {
                        println!(
                            "liftable: witness m={} k={} j={} f={} s={}",
                            witness.m, witness.k, witness.j, witness.f, witness.s
                        );
                        for (base, image) in sigma.images() {
                            println!("sigma({base}) = {image}");
                        }
                        println!(
                            "verification ({} sampled words): {}",
                            verification.sampled_words,
                            if verification.passed { "passed" } else { "FAILED" }
                        );
                    }
                    Ok(if verification.passed {
                        ExitCode::SUCCESS
                    } else {
                        ExitCode::from(1)
                    })
                }
                None => {
                    if json {
                        println!(
                            "{}",
                            json!({
                                "liftable_certified": false,
                                "witness": serde_json::Value::Null,
                                "sigma": serde_json::Value::Null,
                            })
                        );
                    } else {
                        println!("witness condition not satisfied");
                    }
                    Ok(ExitCode::from(1))
                }
            }
        }

        Command::Sigma {
            datum,
            word,
            iterate,
        } => {
            let datum = load_datum(&datum)?;
            if iterate > DEFAULT_SIGMA_ITERATION_BOUND {
                return Err(Failure::Bound(format!(
                    "--iterate {iterate} exceeds the iteration bound {DEFAULT_SIGMA_ITERATION_BOUND}"
                )));
            }
            let Some((_, sigma)) = witness_and_sigma(&datum)? else {
                println!("witness condition not satisfied");
                return Ok(ExitCode::from(1));
            };
            let mut image = parse_word_reporting(&word, &datum)?;
            for _ in 0..iterate {
                image = sigma.apply(&image);
            }
            println!("{image}");
            Ok(ExitCode::SUCCESS)
        }

        Command::Nucleus {
            datum,
            verify_quasinucleus: quasi_depth,
            max_size,
            dot,
        } => {
            let datum = load_datum(&datum)?;
            let table = datum.build_recursion();
            let bound = max_size.unwrap_or_else(|| default_closure_bound(&datum));
            let nucleus = compute_nucleus(&table, bound)?;
            for element in nucleus.elements() {
                println!("{element}");
            }
            eprintln!(
                "nucleus size {} (closed form {})",
                nucleus.len(),
                spinal_core::nucleus_size(&datum)
            );
            if let Some(path) = dot {
                fs::write(&path, nucleus.to_dot()).map_err(|err| {
                    Failure::Usage(format!("cannot write {}: {err}", path.display()))
                })?;
            }
            if let Some(depth) = quasi_depth {
                let holds = verify_quasinucleus(&table, nucleus.elements(), depth)?;
                println!("quasinucleus(depth={depth}): {holds}");
            }
            Ok(ExitCode::SUCCESS)
        }

        Command::Wp { datum, word } => {
            let datum = load_datum(&datum)?;
            let table = datum.build_recursion();
            let word = parse_word_reporting(&word, &datum)?;
            if table.is_trivial_bounded(&word, memo_bound())? {
                println!("trivial");
                Ok(ExitCode::SUCCESS)
            } else {
                println!("nontrivial");
                Ok(ExitCode::from(1))
            }
        }

        Command::Eq { datum, left, right } => {
            let datum = load_datum(&datum)?;
            let table = datum.build_recursion();
            let left = parse_word_reporting(&left, &datum)?;
            let right = parse_word_reporting(&right, &datum)?;
            if table.are_equal_bounded(&left, &right, memo_bound())? {
                println!("equal");
                Ok(ExitCode::SUCCESS)
            } else {
                println!("distinct");
                Ok(ExitCode::from(1))
            }
        }

        Command::Section {
            datum,
            word,
            vertex,
        } => {
            let datum = load_datum(&datum)?;
            let table = datum.build_recursion();
            let word = parse_word_reporting(&word, &datum)?;
            let path = io::parse_vertex(&vertex, datum.p())?;
            println!("{}", table.section_at(&word, &path)?);
            Ok(ExitCode::SUCCESS)
        }

        Command::Act { datum, word, on } => {
            let datum = load_datum(&datum)?;
            let table = datum.build_recursion();
            if on.contains(':') {
                let vertex = io::parse_hnn_vertex(&on, datum.p())?;
                let (letters, warnings) = io::parse_hnn_word(&word, &datum)?;
                for warning in warnings {
                    eprintln!("warning: {warning}");
                }
                let Some((_, sigma)) = witness_and_sigma(&datum)? else {
                    println!("witness condition not satisfied; the unrooted action needs a lifting");
                    return Ok(ExitCode::from(1));
                };
                let mut tower =
                    SigmaTower::new(&table, &sigma, DEFAULT_SIGMA_ITERATION_BOUND);
                let image = spinal_core::hnn::act_word(&table, &mut tower, &letters, &vertex)?;
                println!("{image}");
            } else {
                let word = parse_word_reporting(&word, &datum)?;
                let path = io::parse_vertex(&on, datum.p())?;
                println!("{}", io::format_vertex(&table.apply(&word, &path)?));
            }
            Ok(ExitCode::SUCCESS)
        }

        Command::Portrait {
            datum,
            word,
            format,
        } => {
            let datum = load_datum(&datum)?;
            let table = datum.build_recursion();
            let word = parse_word_reporting(&word, &datum)?;
            let nucleus = compute_nucleus(&table, default_closure_bound(&datum))?;
            let portrait = table.portrait(&word, nucleus.elements())?;
            match format {
                PortraitFormat::Text => print!("{}", io::portrait_text(&portrait)),
                PortraitFormat::Dot => print!("{}", io::portrait_dot(&portrait)),
            }
            Ok(ExitCode::SUCCESS)
        }

        Command::Orbit {
            datum,
            kmax,
            lmax,
            json,
        } => {
            let datum = load_datum(&datum)?;
            let table = datum.build_recursion();
            let Some((_, sigma)) = witness_and_sigma(&datum)? else {
                println!("witness condition not satisfied; the unrooted action needs a lifting");
                return Ok(ExitCode::from(1));
            };
            let bound = DEFAULT_SIGMA_ITERATION_BOUND.max(kmax);
            let mut tower = SigmaTower::new(&table, &sigma, bound);
            let report = orbit_ball(&table, &mut tower, kmax, lmax)?;
            if json {
                println!("{}", serde_json::to_string(&report).expect("report serializes"));
            } else {
                println!(
                    "reached {}/{} canonical vertices (K={}, L={}); transitive on ball: {}",
                    report.reached, report.total, kmax, lmax, report.transitive_on_ball
                );
                for missed in &report.missed {
                    println!("missed {missed}");
                }
            }
            Ok(ExitCode::SUCCESS)
        }

        Command::ExportGap { datum } => {
            let datum = load_datum(&datum)?;
            print!("{}", io::export_gap(&datum));
            Ok(ExitCode::SUCCESS)
        }

        Command::Selftest {
            datum,
            seed,
            samples,
        } => {
            let datum = load_datum(&datum)?;
            let results = run_selftest(&datum, seed, samples)?;
            let mut all_passed = true;
            for result in &results {
                let status = if result.passed { "PASS" } else { "FAIL" };
                println!("{status} {}: {}", result.name, result.detail);
                all_passed &= result.passed;
            }
            println!("seed {seed}, {samples} samples per suite");
            Ok(if all_passed {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            })
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => code,
        Err(failure) => {
            eprintln!("error: {}", failure.message());
            failure.code()
        }
    }
}
