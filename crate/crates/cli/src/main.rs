use std::path::PathBuf;
use std::process::ExitCode;

use bosonic::algebra::DEFAULT_MAX_HEIGHT;
use bosonic::cache;
use bosonic::expr::parse_element;
use bosonic::pbw::CuspidalSet;
use bosonic::verify::{self, default_sequence, multidegrees, Suite, VerifyOptions};
use bosonic::{Algebra, BraidWord, CartanDatum, Error};
use clap::{Args, Parser, Subcommand};

/// Exact computations in the bosonic extension of a quantum unipotent
/// coordinate ring.
#[derive(Parser)]
#[command(name = "bosonic", version)]
struct Cli {
    #[command(flatten)]
    datum: DatumArgs,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct DatumArgs {
    /// Preset Cartan datum: A1, A2, B2, G2 or A3.
    #[arg(long, global = true, conflicts_with = "config")]
    preset: Option<String>,
    /// JSON file with `cartan` and `symmetrizers`.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Largest Serre block height computed on demand.
    #[arg(long, global = true, default_value_t = DEFAULT_MAX_HEIGHT)]
    max_height: usize,
}

#[derive(Subcommand)]
enum Command {
    /// Print the normal form of an expression.
    Reduce { expr: String },
    /// Apply a braid word, e.g. `1,2,-1` (negative letters act by T*).
    Act {
        #[arg(long, allow_hyphen_values = true)]
        word: String,
        expr: String,
    },
    /// Print both bilinear forms of two expressions.
    Pairing { x: String, y: String },
    /// Print a PBW element, or expand an expression in the PBW basis.
    Pbw {
        #[command(flatten)]
        seq: SeqArgs,
        #[arg(long, value_delimiter = ',', required_unless_present = "expand")]
        u: Option<Vec<u32>>,
        #[arg(long, conflicts_with = "u")]
        expand: Option<String>,
    },
    /// Compute the c-invariant element G(u) and its PBW coordinates.
    Global {
        #[command(flatten)]
        seq: SeqArgs,
        #[arg(long, value_delimiter = ',')]
        u: Vec<u32>,
    },
    /// Run a verification suite and print its JSON report.
    Verify {
        suite: String,
        #[arg(long)]
        budget: Option<u32>,
        #[arg(long)]
        threads: Option<usize>,
        #[arg(long, value_delimiter = ',')]
        seq: Option<Vec<usize>>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Save or load the Serre echelon cache.
    Cache {
        #[command(subcommand)]
        action: CacheAction,
    },
}

#[derive(Args)]
struct SeqArgs {
    /// Sequence of a positive braid word, e.g. `1,2,1`.
    #[arg(long, conflicts_with = "word")]
    seq: Option<String>,
    /// Positive braid word; same as `--seq`.
    #[arg(long)]
    word: Option<String>,
}

#[derive(Subcommand)]
enum CacheAction {
    /// Compute every block up to `--height` and write them to a file.
    Export {
        path: PathBuf,
        #[arg(long, default_value_t = 4)]
        height: u32,
    },
    /// Load a cache file, optionally comparing it with a recomputation.
    Import {
        path: PathBuf,
        #[arg(long)]
        check: bool,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {}", e);
            ExitCode::from(match e {
                Error::ResourceExceeded(_) => 3,
                _ => 2,
            })
        }
    }
}

fn load_datum(args: &DatumArgs) -> Result<CartanDatum, Error> {
    match (&args.preset, &args.config) {
        (_, Some(path)) => CartanDatum::from_json(&std::fs::read_to_string(path)?),
        (Some(name), None) => CartanDatum::preset(name),
        (None, None) => CartanDatum::preset("A2"),
    }
}

fn sequence(args: &SeqArgs, datum: &CartanDatum) -> Result<Vec<usize>, Error> {
    match args.seq.as_ref().or(args.word.as_ref()) {
        None => Ok(default_sequence(datum)),
        Some(text) => {
            let word = BraidWord::parse(text, datum)?;
            word.sequence()
        }
    }
}

fn fmt_u(u: &[u32]) -> String {
    format!("({})", u.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(","))
}

fn check_len(u: &[u32], set: &CuspidalSet) -> Result<(), Error> {
    if u.len() != set.len() {
        return Err(Error::InvalidArgument(format!("--u has {} entries, the sequence has {}", u.len(), set.len())));
    }
    Ok(())
}

fn run(cli: Cli) -> Result<u8, Error> {
    let datum = load_datum(&cli.datum)?;
    let alg = Algebra::with_max_height(datum, cli.datum.max_height);
    match cli.command {
        Command::Reduce { expr } => {
            println!("{}", parse_element(&alg, &expr)?);
        }
        Command::Act { word, expr } => {
            let w = BraidWord::parse(&word, alg.datum())?;
            println!("{}", alg.apply_braid(&w, &parse_element(&alg, &expr)?)?);
        }
        Command::Pairing { x, y } => {
            let x = parse_element(&alg, &x)?;
            let y = parse_element(&alg, &y)?;
            println!("hform: {}", alg.hform(&x, &y)?);
            println!("pair: {}", alg.pair(&x, &y)?);
        }
        Command::Pbw { seq, u, expand } => {
            let s = sequence(&seq, alg.datum())?;
            let set = CuspidalSet::new(&alg, &s)?;
            if let Some(text) = expand {
                let e = set.pbw_expand(&parse_element(&alg, &text)?)?;
                for (u, c) in &e.coords {
                    println!("{}: {}", fmt_u(u), c);
                }
                println!("residual: {}", e.residual);
            } else if let Some(u) = u {
                check_len(&u, &set)?;
                println!("{}", set.pbw_element(&u)?);
            }
        }
        Command::Global { seq, u } => {
            let s = sequence(&seq, alg.datum())?;
            let set = CuspidalSet::new(&alg, &s)?;
            check_len(&u, &set)?;
            let g = set.kl_basis(&u)?;
            println!("G{} = {}", fmt_u(&u), g.element);
            for (v, t) in g.t.iter().rev() {
                println!("{}: {}", fmt_u(v), t);
            }
        }
        Command::Verify { suite, budget, threads, seq, seed } => {
            let suite: Suite = suite.parse()?;
            let seq = match seq {
                Some(s) if s.contains(&0) => return Err(Error::InvalidArgument("sequence nodes are 1-based".into())),
                Some(s) => Some(s.into_iter().map(|i| i - 1).collect()),
                None => None,
            };
            let report = verify::run(&alg, suite, &VerifyOptions { budget, threads, seq, seed })?;
            println!("{}", report.to_json());
            return Ok(if report.pass { 0 } else { 1 });
        }
        Command::Cache { action } => match action {
            CacheAction::Export { path, height } => {
                for mu in multidegrees(alg.rank(), height) {
                    alg.serre_block(&mu)?;
                }
                let n = cache::write_file(&alg, &path)?;
                println!("wrote {} blocks to {}", n, path.display());
            }
            CacheAction::Import { path, check } => {
                let n = cache::read_file(&alg, &path)?;
                println!("loaded {} blocks from {}", n, path.display());
                if check {
                    let fresh = Algebra::with_max_height(alg.datum().clone(), cli.datum.max_height);
                    for b in alg.cached_blocks() {
                        fresh.serre_block(&b.degree)?;
                    }
                    if cache::export(&fresh) != cache::export(&alg) {
                        eprintln!("cache differs from recomputation");
                        return Ok(1);
                    }
                    println!("identical to recomputation");
                }
            }
        },
    }
    Ok(0)
}
