mod cache;

use std::fs;
use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::{Args, Parser, Subcommand};
use serde::Serialize;
use serde_json::{json, Value};

use subfactor_core::complex::{cn_distance_bounds, CVertex};
use subfactor_core::factor::FactorRecord;
use subfactor_core::irreducible::{choose_power, pingpong_word, shipped_pair, EvidenceConfig, PingPongSpec};
use subfactor_core::projection::{
    classify_pair, farey_distance, farey_vertex, project_factor, Classification, ClassifyBudget, SamplingConfig,
};
use subfactor_core::suites::{run_suite, SuiteOptions, SUITES};
use subfactor_core::{Automorphism, Error as CoreError, FactorClass, FreeFactorVerdict, ReductionBudget, Word};

use cache::Cache;

#[derive(Parser)]
#[command(name = "subfactor", version, about = "Free factors, subfactor projections and ping-pong evidence in F_n")]
struct Cli {
    #[command(flatten)]
    config: Config,
    #[command(subcommand)]
    command: Command,
}

/// Seed, budgets and cache location; echoed in every report.
#[derive(Args, Clone, Debug, Serialize)]
struct Config {
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Sideways search depth of Whitehead reduction.
    #[arg(long, global = true, default_value_t = 2, value_parser = clap::value_parser!(u64).range(1..))]
    plateau_depth: u64,
    /// Number of sampled splittings `k`.
    #[arg(long, global = true, default_value_t = 8, value_parser = clap::value_parser!(u64).range(1..))]
    splittings: u64,
    /// Complexity bound `s` for C_n searches.
    #[arg(long, global = true, default_value_t = 8, value_parser = clap::value_parser!(u64).range(1..))]
    bound: u64,
    /// Powers `P` searched for invariant factors.
    #[arg(long, global = true, default_value_t = 6, value_parser = clap::value_parser!(u64).range(1..))]
    powers: u64,
    /// Core size `S` of candidate invariant factors.
    #[arg(long, global = true, default_value_t = 8, value_parser = clap::value_parser!(u64).range(1..))]
    factor_size: u64,
    #[arg(long, global = true, env = "SUBFACTOR_CACHE")]
    cache: Option<PathBuf>,
    #[arg(long, global = true)]
    no_cache: bool,
}

impl Config {
    fn reduction(&self) -> ReductionBudget {
        ReductionBudget {
            plateau_depth: self.plateau_depth as usize,
            ..Default::default()
        }
    }
    fn sampling(&self) -> SamplingConfig {
        SamplingConfig {
            samples: self.splittings as usize,
            seed: self.seed,
            ..Default::default()
        }
    }
    fn classify(&self) -> ClassifyBudget {
        ClassifyBudget {
            sampling: self.sampling(),
            reduction: self.reduction(),
        }
    }
    fn cache_path(&self) -> Option<PathBuf> {
        if self.no_cache {
            return None;
        }
        self.cache.clone().or_else(|| {
            std::env::var_os("HOME").map(|h| PathBuf::from(h).join(".cache/subfactor/reductions.ndjson"))
        })
    }
}

#[derive(Subcommand)]
enum Command {
    /// Classify two free factors as nested, disjoint or overlapping.
    Classify {
        #[arg(long)]
        rank: usize,
        #[arg(long)]
        a: String,
        #[arg(long)]
        b: String,
        /// Write the disjointness certificate (a marked graph) here.
        #[arg(long)]
        certificate: Option<PathBuf>,
    },
    /// Sampled projection π_A(B).
    Project {
        #[arg(long)]
        rank: usize,
        #[arg(long)]
        a: String,
        #[arg(long)]
        b: String,
    },
    /// Bounds on the C_n distance between two primitive classes.
    Distance {
        #[arg(long)]
        rank: usize,
        #[arg(long)]
        u: String,
        #[arg(long)]
        v: String,
    },
    /// Farey distance between two primitive classes of F_2.
    Farey {
        #[arg(long)]
        u: String,
        #[arg(long)]
        v: String,
    },
    /// Ping-pong evidence for w = f^{N e_1} g^{N e_2} ⋯.
    Pingpong {
        #[arg(long, default_value_t = 3)]
        rank: usize,
        #[arg(long, required_unless_present = "shipped")]
        f: Option<String>,
        #[arg(long, required_unless_present = "shipped")]
        g: Option<String>,
        /// Factor fixed by f.
        #[arg(long, default_value = "a,b")]
        a: String,
        /// Factor fixed by g.
        #[arg(long, default_value = "b,c")]
        b: String,
        /// Use the shipped filling pair instead of --f/--g/--a/--b.
        #[arg(long)]
        shipped: bool,
        #[arg(long, default_value = "1,1", value_delimiter = ',', allow_hyphen_values = true)]
        syllables: Vec<i64>,
        /// Power N; chosen from --m-emp and --d-emp when absent.
        #[arg(long)]
        n: Option<u32>,
        #[arg(long, default_value_t = 2)]
        m_emp: u64,
        #[arg(long, default_value_t = 2)]
        d_emp: u64,
    },
    /// Run a verification suite.
    Verify {
        #[arg(long)]
        suite: String,
        #[arg(long)]
        samples: Option<usize>,
    },
}

/// Bad input, reported with exit code 2.
#[derive(Debug, thiserror::Error)]
#[error("{0}")]
struct Usage(String);

enum Outcome {
    Decided,
    Inconclusive,
    Failed,
}

fn factor(rank: usize, text: &str) -> Result<FactorClass> {
    FactorClass::parse(rank, text).map_err(|e| Usage(format!("factor {text:?}: {e}")).into())
}

fn word(rank: usize, text: &str) -> Result<Word> {
    Word::parse(rank, text).map_err(|e| Usage(format!("word {text:?}: {e}")).into())
}

/// Checks that `a` is a free factor; `Ok(false)` when undecided at budget.
fn require_free_factor(cache: &mut Cache, a: &FactorClass, budget: ReductionBudget) -> Result<bool> {
    match cache.free_factor(a, budget)? {
        FreeFactorVerdict::FreeFactor { .. } => Ok(true),
        FreeFactorVerdict::NotFreeFactor { obstruction } => {
            Err(Usage(format!("{a} is not a free factor ({obstruction:?})")).into())
        }
        FreeFactorVerdict::NotReduced { .. } => Ok(false),
    }
}

fn run(cli: Cli) -> Result<(Value, Outcome)> {
    let cfg = &cli.config;
    let mut cache = match cfg.cache_path() {
        Some(p) => Cache::open(&p)?,
        None => Cache::disabled(),
    };
    let (body, outcome) = match &cli.command {
        Command::Classify { rank, a, b, certificate } => {
            let (a, b) = (factor(*rank, a)?, factor(*rank, b)?);
            let checked = require_free_factor(&mut cache, &a, cfg.reduction())?
                & require_free_factor(&mut cache, &b, cfg.reduction())?;
            let c = classify_pair(&a, &b, &cfg.classify())?;
            if let (Some(path), Classification::Disjoint { certificate: g, .. }) = (certificate, &c) {
                fs::write(path, serde_json::to_string_pretty(&g.to_record())?)
                    .with_context(|| format!("writing {}", path.display()))?;
            }
            let outcome = if c.is_decided() && checked {
                Outcome::Decided
            } else {
                Outcome::Inconclusive
            };
            let v = json!({
                "a": FactorRecord::from(&a),
                "b": FactorRecord::from(&b),
                "inputs_verified": checked,
                "classification": c,
            });
            (v, outcome)
        }
        Command::Project { rank, a, b } => {
            let (a, b) = (factor(*rank, a)?, factor(*rank, b)?);
            require_free_factor(&mut cache, &a, cfg.reduction())?;
            require_free_factor(&mut cache, &b, cfg.reduction())?;
            if a.rank() < 2 {
                return Err(Usage("the target factor must have rank ≥ 2".into()).into());
            }
            let p = project_factor(&a, &b, &cfg.sampling())?;
            (json!({ "projection": p.record(), "empty": p.is_empty() }), Outcome::Decided)
        }
        Command::Distance { rank, u, v } => {
            let cu = CVertex::new(word(*rank, u)?).map_err(|e| Usage(format!("{u}: {e}")))?;
            let cv = CVertex::new(word(*rank, v)?).map_err(|e| Usage(format!("{v}: {e}")))?;
            let d = cn_distance_bounds(&cu, &cv, cfg.bound as usize)?;
            let outcome = if d.upper == Some(d.lower) {
                Outcome::Decided
            } else {
                Outcome::Inconclusive
            };
            (json!({ "u": cu.record(), "v": cv.record(), "distance": d }), outcome)
        }
        Command::Farey { u, v } => {
            let (fu, fv) = (factor(2, u)?, factor(2, v)?);
            let d = farey_distance(&fu, &fv).map_err(|e| Usage(e.to_string()))?;
            let v = json!({
                "u": farey_vertex(&fu)?,
                "v": farey_vertex(&fv)?,
                "distance": d,
            });
            (v, Outcome::Decided)
        }
        Command::Pingpong {
            rank,
            f,
            g,
            a,
            b,
            shipped,
            syllables,
            n,
            m_emp,
            d_emp,
        } => {
            let (f, g, a, b) = if *shipped {
                shipped_pair()?
            } else {
                let parse = |s: &Option<String>| -> Result<Automorphism> {
                    let s = s.as_deref().unwrap_or_default();
                    Automorphism::parse(s).map_err(|e| Usage(format!("automorphism {s:?}: {e}")).into())
                };
                (parse(f)?, parse(g)?, factor(*rank, a)?, factor(*rank, b)?)
            };
            let spec = PingPongSpec::new(f, g, a, b, 1).map_err(|e| Usage(e.to_string()))?;
            let n = match n {
                Some(n) => *n,
                None => {
                    let (fa, gb) = spec.restrictions()?;
                    choose_power(&fa, &gb, *m_emp, *d_emp, 8)?.0
                }
            };
            let spec = PingPongSpec { n, ..spec };
            let ecfg = EvidenceConfig {
                powers: cfg.powers as usize,
                factor_size: cfg.factor_size as usize,
                bound: cfg.bound as usize,
                m_emp: *m_emp,
                sampling: cfg.sampling(),
                ..Default::default()
            };
            let r = pingpong_word(&spec, syllables, &ecfg).map_err(|e| match e {
                CoreError::BadSyllables(_) => anyhow::Error::new(Usage(e.to_string())),
                e => e.into(),
            })?;
            let s = &r.evidence.invariant_search;
            let outcome = if s.found.is_some() || (r.evidence.chain.passed && s.undecided == 0) {
                Outcome::Decided
            } else {
                Outcome::Inconclusive
            };
            (json!({ "report": r, "d_emp": d_emp }), outcome)
        }
        Command::Verify { suite, samples } => {
            if !SUITES.contains(&suite.as_str()) && suite != "whitehead" {
                return Err(Usage(format!("unknown suite {suite}; expected one of {}", SUITES.join(", "))).into());
            }
            let r = run_suite(
                suite,
                SuiteOptions {
                    samples: *samples,
                    seed: cfg.seed,
                },
            )?;
            let outcome = if r.passed { Outcome::Decided } else { Outcome::Failed };
            (serde_json::to_value(&r)?, outcome)
        }
    };
    let report = json!({
        "config": cfg,
        "result": body,
    });
    Ok((report, outcome))
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok((report, outcome)) => {
            let text = serde_json::to_string_pretty(&report).expect("serializable");
            // a closed pipe downstream is not an error of ours
            let _ = writeln!(std::io::stdout().lock(), "{text}");
            ExitCode::from(match outcome {
                Outcome::Decided => 0,
                Outcome::Failed => 1,
                Outcome::Inconclusive => 3,
            })
        }
        Err(e) => {
            eprintln!("error: {e:#}");
            let usage = e.downcast_ref::<Usage>().is_some()
                || matches!(
                    e.downcast_ref::<CoreError>(),
                    Some(CoreError::Parse(_) | CoreError::IndexOutOfRange { .. } | CoreError::RankMismatch { .. })
                );
            ExitCode::from(if usage { 2 } else { 1 })
        }
    }
}

