use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::Context;
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use ppm_core::analyzer::{self, AnalyzeOptions, Conclusion, GroupKind, GroupSpec};
use ppm_core::dynamics::{self, BoundednessResult, Caps, GeneratorSet, TypeRSample};
use ppm_core::io::{parse_input, InputFile, MatrixFile};
use ppm_core::modular::PadicApproxMatrix;
use ppm_core::oracle;
use ppm_core::roots::{self, AffineElement, RootResult};
use ppm_core::scale;
use ppm_core::steinitz::{ord_catalog, CatalogGroup};
use ppm_core::{Error, PContext};

const EXIT_INCONCLUSIVE: u8 = 2;
const EXIT_INPUT: u8 = 3;
const EXIT_INTERNAL: u8 = 4;

#[derive(Parser)]
#[command(name = "ppm", version, about = "Power maps, scale functions and roots in p-adic matrix groups")]
struct Cli {
    /// The prime p (defaults to the "p" field of the input file).
    #[arg(short = 'p', long = "prime", global = true)]
    prime: Option<u64>,
    /// Working residue precision N (computations mod p^N).
    #[arg(long, global = true, default_value_t = 20)]
    precision: u32,
    /// Machine-readable JSON output.
    #[arg(long, global = true)]
    json: bool,
    /// Seed for randomized spot checks.
    #[arg(long, global = true, default_value_t = 0x5eed)]
    seed: u64,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone, Copy)]
struct CapArgs {
    /// Saturation rounds.
    #[arg(long, default_value_t = 64)]
    rounds: usize,
    /// Elementary-divisor threshold for declaring divergence.
    #[arg(long, default_value_t = 32)]
    threshold: i64,
    /// Longest word checked by the type-R sampler.
    #[arg(long, default_value_t = 4)]
    word_len: usize,
}

impl From<CapArgs> for Caps {
    fn from(c: CapArgs) -> Self {
        Caps { rounds: c.rounds, divisor_threshold: c.threshold, word_len: c.word_len }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum RootKind {
    Unipotent,
    Congruence,
    Finite,
    Axb,
}

#[derive(Subcommand)]
enum Command {
    /// Scale of a matrix from its Newton polygon.
    Scale { input: PathBuf },
    /// Scale by tidying a lattice, with the minimizing lattice.
    Tidy {
        input: PathBuf,
        /// Iteration cap (default depends on the matrix).
        #[arg(long)]
        cap: Option<usize>,
    },
    /// Type-R test of a matrix or of short words in a generator set.
    Typer {
        input: PathBuf,
        #[arg(long, default_value_t = 4)]
        word_len: usize,
    },
    /// Bounded-orbit test and certified flag for a generator set.
    Flag {
        input: PathBuf,
        #[command(flatten)]
        caps: CapArgs,
        /// Split quotients further along fixed vectors.
        #[arg(long)]
        refine: bool,
    },
    /// Pro-order of a catalog group (GLn_Zp, UnitsZp, AdditiveZp, PrincipalCongruence(m)).
    Order {
        group: String,
        #[arg(short = 'n', long, default_value_t = 1)]
        n: u32,
    },
    /// k-th root of a matrix or affine element.
    Root {
        input: PathBuf,
        #[arg(long, value_enum)]
        kind: RootKind,
        #[arg(short = 'k')]
        k: u64,
        /// Residue level (defaults to the working precision).
        #[arg(long)]
        level: Option<u32>,
    },
    /// Exhaustive power map on the group generated mod p^m.
    Oracle {
        input: PathBuf,
        #[arg(long)]
        level: u32,
        #[arg(short = 'k')]
        k: u64,
        #[arg(long, default_value_t = oracle::DEFAULT_CAP)]
        cap: usize,
    },
    /// Density/surjectivity verdict for P_k on a catalog or generated group.
    Analyze {
        /// Catalog name such as GL_Zp(2), or a generator file.
        group: String,
        #[arg(short = 'k')]
        k: u64,
        /// Also analyze this catalog subgroup.
        #[arg(long)]
        sub: Option<String>,
        /// Characteristic of the field (only 0 is supported).
        #[arg(long, default_value_t = 0)]
        characteristic: u64,
        #[command(flatten)]
        caps: CapArgs,
    },
}

struct Output {
    json: Value,
    text: String,
    inconclusive: bool,
}

impl Output {
    fn new(json: Value, text: impl Into<String>) -> Self {
        Output { json, text: text.into(), inconclusive: false }
    }

    fn inconclusive(mut self, flag: bool) -> Self {
        self.inconclusive = flag;
        self
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(out) => {
            let body = if cli.json {
                serde_json::to_string_pretty(&out.json).expect("serializable")
            } else {
                out.text
            };
            // a closed pipe (e.g. `| head`) is not an error
            let _ = writeln!(std::io::stdout().lock(), "{body}");
            if out.inconclusive {
                ExitCode::from(EXIT_INCONCLUSIVE)
            } else {
                ExitCode::SUCCESS
            }
        }
        Err(err) => {
            let code = exit_code(&err);
            if cli.json {
                println!("{}", json!({"error": format!("{err:#}"), "exit_code": code}));
            }
            eprintln!("error: {err:#}");
            ExitCode::from(code)
        }
    }
}

fn exit_code(err: &anyhow::Error) -> u8 {
    match err.downcast_ref::<Error>() {
        Some(Error::Inconclusive(_) | Error::CapExceeded { .. } | Error::PrecisionExhausted(_)) => EXIT_INCONCLUSIVE,
        Some(Error::InvariantViolation(_)) => EXIT_INTERNAL,
        _ => EXIT_INPUT,
    }
}

fn read(path: &PathBuf) -> anyhow::Result<InputFile> {
    let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    Ok(parse_input(&text)?)
}

fn context(cli: &Cli, file: Option<&InputFile>) -> anyhow::Result<PContext> {
    let p = match file {
        Some(f) => f.prime(cli.prime)?,
        None => cli.prime.ok_or_else(|| Error::Input("no prime given (use -p)".into()))?,
    };
    Ok(PContext::new(p, cli.precision)?)
}

fn run(cli: &Cli) -> anyhow::Result<Output> {
    match &cli.command {
        Command::Scale { input } => {
            let f = read(input)?;
            let ctx = context(cli, Some(&f))?;
            let a = f.matrix()?;
            let m = scale::scale_newton(&a, &ctx)?;
            let polygon = scale::polygon_of(&a, &ctx);
            Ok(Output::new(
                json!({"p": ctx.p(), "scale_exponent": m, "newton_polygon": polygon}),
                format!("s = {}^{m}", ctx.p()),
            ))
        }
        Command::Tidy { input, cap } => {
            let f = read(input)?;
            let ctx = context(cli, Some(&f))?;
            let a = f.matrix()?;
            let cap = match cap {
                Some(c) => *c,
                None => scale::default_cap(&a, &ctx)?,
            };
            let l0 = ppm_core::Lattice::standard(&ctx, a.n());
            let r = scale::scale_tidy(&a, &ctx, &l0, cap)?;
            let text = format!(
                "s = {}^{} after {} iterations\nminimizing lattice basis {}",
                ctx.p(),
                r.scale_exponent,
                r.iterations(),
                r.minimizing_lattice.basis()
            );
            Ok(Output::new(serde_json::to_value(&r)?, text))
        }
        Command::Typer { input, word_len } => {
            let f = read(input)?;
            let ctx = context(cli, Some(&f))?;
            let g = GeneratorSet::new(&ctx, f.generators()?)?;
            let sample = dynamics::type_r_witness_search(&g, *word_len)?;
            let text = match &sample {
                TypeRSample::Ok { words_checked } => {
                    format!("type R on all {words_checked} words up to length {word_len} (necessary condition only)")
                }
                TypeRSample::Witness(w) => format!("not type R: word {w:?}"),
            };
            Ok(Output::new(json!({"result": sample, "word_len": word_len, "necessary_only": true}), text))
        }
        Command::Flag { input, caps, refine } => {
            let f = read(input)?;
            let ctx = context(cli, Some(&f))?;
            let g = GeneratorSet::new(&ctx, f.generators()?)?;
            let caps = Caps::from(*caps);
            let bounded = dynamics::bounded_group(&g, &caps)?;
            let mut flag = dynamics::ku_flag(&g, &caps)?;
            if *refine {
                flag = dynamics::refine_flag(&g, &flag, &caps)?;
            }
            let verdict = match &bounded {
                BoundednessResult::Bounded { .. } => "bounded",
                BoundednessResult::Unbounded { .. } => "unbounded (evidence)",
                BoundednessResult::Inconclusive { .. } => "boundedness inconclusive",
            };
            let mut text = format!("{verdict}; flag dimensions {:?}\nflag basis {}", flag.dims, flag.flag_basis);
            for (i, l) in flag.quotient_lattices.iter().enumerate() {
                text.push_str(&format!("\nquotient {} lattice {}", i + 1, l.basis()));
            }
            Ok(Output::new(json!({"boundedness": bounded, "flag": flag, "caps": caps}), text))
        }
        Command::Order { group, n } => {
            let ctx = context(cli, None)?;
            let id: CatalogGroup = group.parse()?;
            let order = ord_catalog(id, *n, ctx.p())?;
            Ok(Output::new(json!({"group": group, "n": n, "p": ctx.p(), "order": order}), order.to_string()))
        }
        Command::Root { input, kind, k, level } => {
            let f = read(input)?;
            let ctx = context(cli, Some(&f))?;
            let level = level.unwrap_or(ctx.precision());
            root(&f, &ctx, *kind, *k, level)
        }
        Command::Oracle { input, level, k, cap } => {
            let f = read(input)?;
            let ctx = context(cli, Some(&f))?;
            let gens = f
                .generators()?
                .iter()
                .map(|g| PadicApproxMatrix::from_qmatrix(g, &ctx, *level))
                .collect::<ppm_core::Result<Vec<_>>>()?;
            let table = oracle::enumerate(&gens, *cap)?;
            let img = oracle::power_surjective(&table, *k);
            let agree = oracle::validate_f1(&table, *k);
            if !agree.agrees() {
                return Err(Error::InvariantViolation(format!("coprimality test disagrees with brute force: {agree:?}")).into());
            }
            let text = format!(
                "|G| = {}, |G^{k}| = {}, surjective: {}",
                table.order(),
                img.image_size,
                img.surjective
            );
            Ok(Output::new(
                json!({"order": table.order(), "image_size": img.image_size, "surjective": img.surjective, "f1_agree": true}),
                text,
            ))
        }
        Command::Analyze { group, k, sub, characteristic, caps } => {
            let opts = AnalyzeOptions {
                seed: cli.seed,
                characteristic: *characteristic,
                caps: Caps::from(*caps),
                ..AnalyzeOptions::default()
            };
            let spec = group_spec(cli, group)?;
            let verdicts = match sub {
                Some(s) => {
                    let sub = GroupSpec::parse(&spec.ctx, s)?;
                    let (a, b) = analyzer::analyze_subgroup(&spec, &sub, *k, &opts)?;
                    vec![a, b]
                }
                None => vec![analyzer::analyze(&spec, *k, &opts)?],
            };
            let inconclusive = verdicts.iter().any(|v| v.conclusion == Conclusion::Inconclusive);
            let text = verdicts
                .iter()
                .map(|v| {
                    let mut s = format!("{} with k = {}: {:?}", v.group, v.k, v.conclusion);
                    for step in &v.justification {
                        s.push_str(&format!("\n  [{}] {}", step.criterion, step.detail));
                    }
                    s
                })
                .collect::<Vec<_>>()
                .join("\n");
            let json = if verdicts.len() == 1 {
                serde_json::to_value(&verdicts[0])?
            } else {
                json!({"group": verdicts[0], "subgroup": verdicts[1]})
            };
            Ok(Output::new(json, text).inconclusive(inconclusive))
        }
    }
}

/// A catalog name, or a path to a generator file.
fn group_spec(cli: &Cli, group: &str) -> anyhow::Result<GroupSpec> {
    match group.parse::<GroupKind>() {
        Ok(kind) => Ok(GroupSpec::new(&context(cli, None)?, kind)),
        Err(e) => {
            let path = PathBuf::from(group);
            if !path.exists() {
                return Err(e.into());
            }
            let f = read(&path)?;
            let ctx = context(cli, Some(&f))?;
            let g = GeneratorSet::new(&ctx, f.generators()?)?;
            Ok(GroupSpec::new(&ctx, GroupKind::FinitelyGenerated(g)))
        }
    }
}

fn root(f: &InputFile, ctx: &PContext, kind: RootKind, k: u64, level: u32) -> anyhow::Result<Output> {
    fn report<T: serde::Serialize + std::fmt::Display>(r: &RootResult<T>) -> (Value, String) {
        let text = match r {
            RootResult::Found(x) => format!("root {x}"),
            RootResult::Obstructed(why) => format!("obstructed: {why}"),
            RootResult::NoRoot { level } => format!("no root: lifting fails at level {level}"),
        };
        (json!({ "result": r }), text)
    }
    match kind {
        RootKind::Unipotent => {
            let u = f.matrix()?;
            let r = roots::unipotent_root(&u, k)?;
            let (mut json, text) = report(&r);
            if let RootResult::Found(x) = &r {
                json["root"] = serde_json::to_value(MatrixFile::new(ctx.p(), x))?;
            }
            Ok(Output::new(json, text))
        }
        RootKind::Congruence | RootKind::Finite => {
            let a = PadicApproxMatrix::from_qmatrix(&f.matrix()?, ctx, level)?;
            let r = match kind {
                RootKind::Congruence => roots::congruence_root(&a, k)?,
                _ => roots::finite_root(&a, k)?,
            };
            let budget = matches!(kind, RootKind::Finite) && matches!(r, RootResult::Obstructed(_));
            let (json, text) = report(&r);
            Ok(Output::new(json, text).inconclusive(budget))
        }
        RootKind::Axb => {
            let missing = || Error::Input("affine element needs \"a\" and \"b\"".into());
            let a = ppm_core::qp::reduce_mod(f.a.as_ref().ok_or_else(missing)?, level, ctx)?;
            let b = ppm_core::qp::reduce_mod(f.b.as_ref().ok_or_else(missing)?, level, ctx)?;
            let elem = AffineElement::new(a.value, b.value, ctx.p(), level)?;
            let r = roots::axb_root(&elem, k, ctx)?;
            let (json, text) = report(&r);
            Ok(Output::new(json, text))
        }
    }
}
