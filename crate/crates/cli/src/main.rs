//! Command-line front end: dump the algebras, sample kinematics, enumerate
//! trees, evaluate amplitudes, check residue factorization, and run the
//! acceptance suite. All output on stdout is deterministic for a fixed
//! configuration and seed; timings go to stderr.

use anyhow::{anyhow, bail, Context, Result};
use clap::{Args, Parser, Subcommand};
use mmb_core::amplitudes::{amplitude, gauge_independence_suite, three_point_closed_form};
use mmb_core::dgla::Theory;
use mmb_core::gamma::{build_gamma, Sign};
use mmb_core::kinematics::{
    divisors, pencil_through_divisor, sample_onshell_tuple, DivisorId, KinematicTuple,
    TupleJson,
};
use mmb_core::polymat::PolyComplex;
use mmb_core::residues::{calibrate_constant, check_factorization};
use mmb_core::scalar::Gq;
use mmb_core::suite::{run_all, run_selected, spec_for};
use mmb_core::trees::{double_factorial_count, enumerate_trees};
use serde_json::json;
use std::str::FromStr;
use std::time::Instant;

#[derive(Parser)]
#[command(
    name = "mmb",
    about = "Exact tree amplitudes from minimal model brackets",
    version
)]
struct Cli {
    /// Worker threads for parallel sections (0 = library default).
    #[arg(long, global = true, default_value_t = 0)]
    jobs: usize,
    /// Seed for all randomized constructions; MMB_SEED is the fallback.
    #[arg(long, global = true)]
    seed: Option<u64>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Dump a theory's grading, differential, and bracket constants.
    Dgla(DglaArgs),
    /// Dump a helicity complex's blocks.
    Gamma(GammaArgs),
    /// Kinematics: sample tuples or build pencils.
    Kin(KinArgs),
    /// Enumerate trivalent trees.
    Trees(TreesArgs),
    /// Amplitude evaluation and related checks.
    Amp(AmpArgs),
    /// Residue factorization checks.
    Res(ResArgs),
    /// Run the acceptance battery.
    Suite(SuiteArgs),
}

#[derive(Args)]
struct DglaArgs {
    #[command(subcommand)]
    sub: DglaSub,
}

#[derive(Subcommand)]
enum DglaSub {
    /// Emit grading, differential and bracket constants as JSON.
    Dump {
        #[arg(long)]
        theory: String,
    },
}

#[derive(Args)]
struct GammaArgs {
    #[command(subcommand)]
    sub: GammaSub,
}

#[derive(Subcommand)]
enum GammaSub {
    /// Emit the blocks of a helicity complex as JSON.
    Dump {
        /// Twice the helicity (1, 2, 3, 4, ...).
        #[arg(long)]
        two_h: u32,
        /// Helicity sign: + or -.
        #[arg(long, default_value = "+", allow_hyphen_values = true)]
        sign: String,
    },
}

#[derive(Args)]
struct KinArgs {
    #[command(subcommand)]
    sub: KinSub,
}

#[derive(Subcommand)]
enum KinSub {
    /// Sample an exact conserving on-shell tuple.
    Sample {
        #[arg(long)]
        n: usize,
        #[arg(long, allow_hyphen_values = true)]
        helicities: String,
        /// Branch for three-point tuples: + or -.
        #[arg(long, allow_hyphen_values = true)]
        branch: Option<String>,
    },
    /// Build a pencil through a divisor and print base and samples.
    Pencil {
        #[arg(long)]
        n: usize,
        #[arg(long, allow_hyphen_values = true)]
        helicities: String,
        /// Divisor: pppp, mmmm, ppmm:12|34, p+:12, p-:13, qj:123.
        #[arg(long)]
        divisor: String,
        /// How many sample parameters to list.
        #[arg(long, default_value_t = 3)]
        samples: usize,
    },
}

#[derive(Args)]
struct TreesArgs {
    #[command(subcommand)]
    sub: TreesSub,
}

#[derive(Subcommand)]
enum TreesSub {
    /// Print all trivalent trees on n inputs, one parenthesization per line.
    Enumerate {
        #[arg(long)]
        n: usize,
    },
}

#[derive(Args)]
struct AmpArgs {
    #[command(subcommand)]
    sub: AmpSub,
}

#[derive(Subcommand)]
enum AmpSub {
    /// Evaluate one amplitude. The tuple comes from --kin (JSON file) or is
    /// sampled fresh from --helicities.
    Eval {
        #[arg(long)]
        theory: String,
        #[arg(long, allow_hyphen_values = true)]
        helicities: Option<String>,
        #[arg(long)]
        kin: Option<String>,
    },
    /// Gauge independence: several homotopy draws on several tuples.
    GaugeTest {
        #[arg(long)]
        theory: String,
        #[arg(long)]
        n: usize,
        #[arg(long, allow_hyphen_values = true)]
        helicities: String,
        #[arg(long, default_value_t = 3)]
        trials: usize,
        #[arg(long, default_value_t = 3)]
        draws: usize,
    },
    /// Three-point amplitude against the closed form.
    ThreePoint {
        #[arg(long)]
        theory: String,
        #[arg(long, allow_hyphen_values = true)]
        helicities: String,
        /// Branch: + or -.
        #[arg(long, default_value = "+", allow_hyphen_values = true)]
        branch: String,
        #[arg(long, default_value_t = 5)]
        trials: usize,
    },
}

#[derive(Args)]
struct ResArgs {
    #[command(subcommand)]
    sub: ResSub,
}

#[derive(Subcommand)]
enum ResSub {
    /// Residue factorization along pencils through one divisor.
    Check {
        #[arg(long)]
        theory: String,
        #[arg(long)]
        n: usize,
        /// Divisor: pppp, mmmm, ppmm:12|34, p+:12, p-:13, qj:123.
        #[arg(long)]
        divisor: String,
        #[arg(long, allow_hyphen_values = true)]
        helicities: Option<String>,
        #[arg(long, default_value_t = 3)]
        trials: usize,
    },
    /// List the divisor catalog for n legs.
    Divisors {
        #[arg(long)]
        n: usize,
    },
}

#[derive(Args)]
struct SuiteArgs {
    /// Trimmed trial counts for a fast smoke run.
    #[arg(long)]
    quick: bool,
    /// Comma-separated criterion ids (default: all).
    #[arg(long)]
    criteria: Option<String>,
}

fn parse_theory(s: &str) -> Result<Theory> {
    match s.to_ascii_lowercase().as_str() {
        "ym" => Ok(Theory::Ym),
        "gr" => Ok(Theory::Gr),
        _ => bail!("unknown theory {s:?}; expected ym or gr"),
    }
}

fn parse_sign(s: &str) -> Result<Sign> {
    match s {
        "+" => Ok(Sign::Plus),
        "-" => Ok(Sign::Minus),
        _ => bail!("expected + or -"),
    }
}

fn seed_of(cli: &Cli) -> u64 {
    cli.seed
        .or_else(|| {
            std::env::var("MMB_SEED")
                .ok()
                .and_then(|s| u64::from_str(&s).ok())
        })
        .unwrap_or(0)
}

fn complex_json(c: &PolyComplex) -> serde_json::Value {
    json!({
        "min_degree": c.grading.min_degree,
        "dims": c.grading.dims,
        "differential": c.d,
    })
}

fn main() -> Result<()> {
    let cli = Cli::parse();
    if cli.jobs > 0 {
        rayon::ThreadPoolBuilder::new()
            .num_threads(cli.jobs)
            .build_global()
            .ok();
    }
    let seed = seed_of(&cli);
    let t0 = Instant::now();
    match &cli.command {
        Command::Dgla(args) => match &args.sub {
            DglaSub::Dump { theory } => {
                let spec = spec_for(parse_theory(theory)?);
                let bracket: Vec<serde_json::Value> = spec
                    .bracket
                    .iter()
                    .map(|((i, j), outs)| {
                        json!({
                            "i": i,
                            "j": j,
                            "out": outs,
                        })
                    })
                    .collect();
                let out = json!({
                    "theory": spec.label.as_str(),
                    "two_h": spec.two_h,
                    "grading": { "min_degree": spec.grading().min_degree, "dims": spec.grading().dims },
                    "internal_dim": spec.u.dim,
                    "differential": spec.complex.d,
                    "bracket_entries": spec.bracket.entry_count(),
                    "bracket": bracket,
                });
                println!("{}", serde_json::to_string_pretty(&out)?);
            }
        },
        Command::Gamma(args) => match &args.sub {
            GammaSub::Dump { two_h, sign } => {
                let c = build_gamma(*two_h, parse_sign(sign)?)?;
                println!("{}", serde_json::to_string_pretty(&complex_json(&c))?);
            }
        },
        Command::Kin(args) => match &args.sub {
            KinSub::Sample {
                n,
                helicities,
                branch,
            } => {
                let b = branch.as_deref().map(parse_sign).transpose()?;
                let t = sample_onshell_tuple(*n, helicities, seed, b)?;
                println!(
                    "{}",
                    serde_json::to_string_pretty(&TupleJson::from(&t))?
                );
            }
            KinSub::Pencil {
                n,
                helicities,
                divisor,
                samples,
            } => {
                let div = DivisorId::parse(divisor, *n)?;
                let p = pencil_through_divisor(*n, &div, helicities, seed)?;
                let pts = p.sample_points(*samples);
                let tuples: Vec<TupleJson> =
                    pts.iter().map(|t| TupleJson::from(&p.tuple_at(t))).collect();
                let masks: Vec<serde_json::Value> = p
                    .divisor
                    .fusion_subsets(*n)
                    .iter()
                    .map(|m| {
                        json!({
                            "mask": m,
                            "q_dot_at_zero": p.q_dot_at_zero(*m).map(|q| q.to_string()).ok(),
                        })
                    })
                    .collect();
                let out = json!({
                    "divisor": p.divisor.format(),
                    "base": TupleJson::from(&p.base),
                    "fusion_subsets": masks,
                    "sample_parameters": pts.iter().map(|t| t.to_string()).collect::<Vec<_>>(),
                    "samples": tuples,
                });
                println!("{}", serde_json::to_string_pretty(&out)?);
            }
        },
        Command::Trees(args) => match &args.sub {
            TreesSub::Enumerate { n } => {
                let trees = enumerate_trees(*n);
                for t in &trees {
                    println!("{}", t.format());
                }
                eprintln!(
                    "{} trees ((2n-3)!! = {})",
                    trees.len(),
                    double_factorial_count(*n)
                );
            }
        },
        Command::Amp(args) => match &args.sub {
            AmpSub::Eval {
                theory,
                helicities,
                kin,
            } => {
                let spec = spec_for(parse_theory(theory)?);
                let tuple: KinematicTuple = if let Some(path) = kin {
                    let raw = std::fs::read_to_string(path)
                        .with_context(|| format!("reading {path}"))?;
                    let j: TupleJson = serde_json::from_str(&raw)?;
                    j.try_into().map_err(|e| anyhow!("{e}"))?
                } else {
                    let hel = helicities
                        .as_deref()
                        .ok_or_else(|| anyhow!("need --kin or --helicities"))?;
                    sample_onshell_tuple(hel.len(), hel, seed, None)?
                };
                let a = amplitude(spec, &tuple, seed)?;
                let out = json!({
                    "theory": spec.label.as_str(),
                    "helicities": tuple.helicity_string(),
                    "seed": seed,
                    "value": a.value.to_string(),
                    "trees_evaluated": a.trees_evaluated,
                });
                println!("{}", serde_json::to_string(&out)?);
                eprintln!("timing: {:?}", t0.elapsed());
            }
            AmpSub::GaugeTest {
                theory,
                n,
                helicities,
                trials,
                draws,
            } => {
                let spec = spec_for(parse_theory(theory)?);
                let rep = gauge_independence_suite(spec, *n, helicities, *trials, *draws, seed)?;
                println!("{}", serde_json::to_string_pretty(&rep)?);
                eprintln!("timing: {:?}", t0.elapsed());
                if !rep.all_equal {
                    std::process::exit(1);
                }
            }
            AmpSub::ThreePoint {
                theory,
                helicities,
                branch,
                trials,
            } => {
                let spec = spec_for(parse_theory(theory)?);
                let b = parse_sign(branch)?;
                let mut rows = Vec::new();
                let mut ratios: Vec<Gq> = Vec::new();
                for trial in 0..*trials {
                    let mut t = sample_onshell_tuple(
                        3,
                        helicities,
                        seed ^ (trial as u64 + 1),
                        Some(b),
                    )?;
                    t.u_labels = vec![0, 1, 2 % spec.u.dim];
                    let a = amplitude(spec, &t, seed)?;
                    let c = three_point_closed_form(spec, &t)?;
                    let ratio = if c.is_zero() {
                        None
                    } else {
                        Some(a.value.div(&c)?)
                    };
                    if let Some(r) = &ratio {
                        ratios.push(r.clone());
                    }
                    rows.push(json!({
                        "value": a.value.to_string(),
                        "closed_form": c.to_string(),
                        "ratio": ratio.map(|r| r.to_string()),
                    }));
                }
                let constant = !ratios.is_empty() && ratios.iter().all(|r| *r == ratios[0]);
                println!(
                    "{}",
                    serde_json::to_string_pretty(&json!({
                        "trials": rows,
                        "ratio_constant": constant,
                    }))?
                );
                eprintln!("timing: {:?}", t0.elapsed());
                if !constant {
                    std::process::exit(1);
                }
            }
        },
        Command::Res(args) => match &args.sub {
            ResSub::Check {
                theory,
                n,
                divisor,
                helicities,
                trials,
            } => {
                let spec = spec_for(parse_theory(theory)?);
                let div = DivisorId::parse(divisor, *n)?;
                let hel = helicities.clone().unwrap_or_else(|| {
                    // a two-two-ish default pattern
                    let mut s: String = String::new();
                    for i in 0..*n {
                        s.push(if i % 2 == 0 { '+' } else { '-' });
                    }
                    s
                });
                let kappa = calibrate_constant(spec)?;
                let rep = check_factorization(spec, *n, &div, &hel, *trials, seed)?;
                let all_match = rep
                    .trials
                    .iter()
                    .all(|t| t.indeterminate || t.ratio.as_ref() == Some(&kappa));
                let out = json!({
                    "theory": spec.label.as_str(),
                    "divisor": rep.divisor,
                    "helicities": rep.helicities,
                    "calibration": kappa.to_string(),
                    "trials": rep.trials.iter().map(|t| json!({
                        "lhs": t.lhs.to_string(),
                        "rhs": t.rhs.to_string(),
                        "ratio": t.ratio.as_ref().map(|r| r.to_string()),
                        "indeterminate": t.indeterminate,
                    })).collect::<Vec<_>>(),
                    "all_match_calibration": all_match,
                });
                println!("{}", serde_json::to_string_pretty(&out)?);
                eprintln!("timing: {:?}", t0.elapsed());
                if !all_match {
                    std::process::exit(1);
                }
            }
            ResSub::Divisors { n } => {
                for d in divisors(*n) {
                    println!("{}", d.format());
                }
            }
        },
        Command::Suite(args) => {
            let results = match &args.criteria {
                Some(list) => {
                    let ids: Vec<usize> = list
                        .split(',')
                        .map(|s| s.trim().parse::<usize>())
                        .collect::<std::result::Result<_, _>>()
                        .context("parsing --criteria")?;
                    run_selected(&ids, args.quick)
                }
                None => run_all(args.quick),
            };
            let mut all_pass = true;
            for r in &results {
                all_pass &= r.pass;
                println!(
                    "criterion {:2}: {} — {} ({} ms)",
                    r.id,
                    if r.pass { "PASS" } else { "FAIL" },
                    r.name,
                    r.millis
                );
            }
            println!(
                "{}",
                serde_json::to_string(&json!({
                    "quick": args.quick,
                    "all_pass": all_pass,
                    "results": results,
                }))?
            );
            if !all_pass {
                std::process::exit(1);
            }
        }
    }
    Ok(())
}
