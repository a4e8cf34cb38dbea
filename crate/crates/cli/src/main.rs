//! `walkforge`: walks, trace colourings and partition checks over JSON files.
//!
//! Exit status: 0 when the property held, 1 on a violation or counterexample,
//! 2 on usage or input errors.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::str::FromStr;

use anyhow::{anyhow, bail, ensure, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use walkforge_core::colouring::colour_table;
use walkforge_core::dfunction::{d_direct, d_index, enumerate_decompositions, DIndex, DStatus};
use walkforge_core::suites::{coherence, walk_lemmas, CoherenceConfig, WalkLemmaConfig};
use walkforge_core::{
    check_instance, claim_e4_sweep, derive_colouring, evaluate, promote_colouring, search_counterexample, walk,
    CSequence, CanonicalLadder, ColourTable, ColouringSystem, Decomposition, DerivationTable, FiniteSuccessor,
    InstanceFile, LabelledSeq, Ordinal, PartitionParams, Promotion, SearchBounds, Strategy, SweepConfig, SweepMode,
    TableCSequence, Which,
};

#[derive(Parser)]
#[command(
    name = "walkforge",
    version,
    about = "Minimal walks on ordinals, trace colourings and partition checkers"
)]
struct Cli {
    #[command(flatten)]
    global: Global,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Global {
    /// Model of the ordinals: `finite:N` or `cnf:BOUND` (e.g. `cnf:w^3`).
    #[arg(long, global = true)]
    model: Option<Model>,
    /// C-sequence source: `canonical` or a table file (finite models only).
    #[arg(long, global = true)]
    csequence: Option<String>,
    /// Colouring-system file.
    #[arg(long, global = true)]
    system: Option<PathBuf>,
    /// Seed for every randomized routine.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Output file; reports default to `walkforge-<suite>.json`.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Print JSON instead of text.
    #[arg(long, global = true)]
    json: bool,
}

#[derive(Clone, Debug)]
enum Model {
    Finite(usize),
    Cnf(Ordinal),
}

impl FromStr for Model {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s.split_once(':') {
            Some(("finite", n)) => {
                let n: usize = n.parse().map_err(|e| format!("bad size {n:?}: {e}"))?;
                if n < 2 {
                    return Err("finite model needs at least 2 points".into());
                }
                Ok(Model::Finite(n))
            }
            Some(("cnf", bound)) => bound.parse().map(Model::Cnf).map_err(|e| format!("{e}")),
            _ => Err(format!("expected finite:N or cnf:BOUND, got {s:?}")),
        }
    }
}

#[derive(Subcommand)]
enum Command {
    /// Ordinal arithmetic in Cantor normal form.
    Ord {
        #[command(subcommand)]
        op: OrdOp,
    },
    /// The minimal walk from β down to α.
    Walk { beta: String, alpha: String },
    /// The labels along the walk from β down to α.
    Labels { beta: String, alpha: String },
    /// The d index of a labelled sequence.
    Dfun {
        #[arg(long, value_delimiter = ',', num_args = 0..)]
        f0: Vec<u64>,
        #[arg(long, value_delimiter = ',', num_args = 0..)]
        f1: Vec<u64>,
    },
    /// Run a verification suite and write its report.
    Verify {
        #[command(subcommand)]
        suite: Suite,
    },
    /// Trace colourings of a finite model.
    Colour {
        #[command(subcommand)]
        op: ColourOp,
    },
    /// Derive a colouring through a derivation table.
    Derive {
        #[arg(long)]
        colouring: PathBuf,
        #[arg(long)]
        table: PathBuf,
        #[arg(long, value_parser = clap::value_parser!(u8).range(0..=1))]
        iota: u8,
    },
    /// Promote a colouring through per-point injections.
    Promote {
        #[arg(long)]
        colouring: PathBuf,
        #[arg(long)]
        promotion: PathBuf,
    },
    /// Check one partition instance against a colouring.
    Check {
        #[arg(long)]
        colouring: PathBuf,
        #[arg(long)]
        instance: PathBuf,
    },
    /// Search for an instance without witness.
    Search {
        #[arg(long)]
        colouring: PathBuf,
        #[arg(long)]
        params: PathBuf,
        #[arg(long)]
        bounds: PathBuf,
        /// Sample instances instead of scanning them all (needs --seed).
        #[arg(long)]
        random: bool,
        #[arg(long, default_value_t = 10_000)]
        trials: u64,
    },
}

#[derive(Subcommand)]
enum OrdOp {
    /// Normal form of an expression.
    Parse {
        expr: String,
    },
    /// `less`, `equal` or `greater`.
    Compare {
        a: String,
        b: String,
    },
    Add {
        a: String,
        b: String,
    },
    /// The n-th element of the fundamental sequence of a limit.
    Fund {
        limit: String,
        n: u64,
    },
}

#[derive(Subcommand)]
enum Suite {
    /// Walk lemmas on every pair of the model and of random tables.
    WalkLemmas {
        /// Number of random C-sequence tables (needs --seed when nonzero).
        #[arg(long, default_value_t = 200)]
        csequences: u64,
        #[arg(long, default_value_t = 32)]
        table_n: usize,
        #[arg(long, default_value_t = 0.3)]
        density: f64,
    },
    /// Coherence of walks through a limit on random ordinals.
    Coherence {
        #[arg(long, default_value_t = 1000)]
        pairs: u64,
        #[arg(long, default_value_t = 50)]
        alphas: usize,
        #[arg(long, default_value_t = 4)]
        degree: u64,
        #[arg(long, default_value_t = 3)]
        max_coefficient: u64,
    },
    /// Consistency of the d index over all short labelled sequences.
    ClaimE4 {
        #[arg(long, default_value_t = 3)]
        k0: u64,
        #[arg(long, default_value_t = 3)]
        k1: u64,
        #[arg(long, default_value_t = 6)]
        max_len: usize,
        /// Sample sequences instead of enumerating them (needs --seed).
        #[arg(long)]
        random: bool,
        #[arg(long, default_value_t = 100_000)]
        trials: u64,
        #[arg(long, default_value_t = 1000)]
        max_records: usize,
    },
}

#[derive(Subcommand)]
enum ColourOp {
    /// The full colour table.
    Table {
        #[arg(long, value_enum, default_value_t = WhichArg::C1)]
        which: WhichArg,
    },
    /// Every intermediate value on one pair.
    Pair { alpha: usize, beta: usize },
}

#[derive(Clone, Copy, ValueEnum)]
enum WhichArg {
    C1,
    C2,
}

enum Status {
    Held,
    Violated,
}

/// A finite model with its C-sequence.
enum Finite {
    Successor(FiniteSuccessor),
    Table(TableCSequence),
}

fn read(path: &Path) -> Result<String> {
    fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))
}

fn pretty<T: Serialize>(value: &T) -> Result<String> {
    Ok(serde_json::to_string_pretty(value)? + "\n")
}

impl Global {
    fn model(&self) -> Result<&Model> {
        self.model.as_ref().ok_or_else(|| anyhow!("--model is required"))
    }

    fn finite(&self) -> Result<(usize, Finite)> {
        let Model::Finite(n) = *self.model()? else {
            bail!("this command needs a finite model");
        };
        match self.csequence.as_deref() {
            None | Some("canonical") => Ok((n, Finite::Successor(FiniteSuccessor::new(n)))),
            Some(path) => {
                let table = TableCSequence::from_json(&read(Path::new(path))?)?;
                ensure!(table.size() == n, "table covers {} points, model has {n}", table.size());
                Ok((n, Finite::Table(table)))
            }
        }
    }

    fn ladder(&self, bound: &Ordinal) -> Result<CanonicalLadder> {
        match self.csequence.as_deref() {
            None | Some("canonical") => Ok(CanonicalLadder::new(Some(bound.clone()))),
            Some(_) => bail!("CNF models use the canonical C-sequence only"),
        }
    }

    fn system(&self) -> Result<ColouringSystem> {
        let path = self.system.as_ref().ok_or_else(|| anyhow!("--system is required"))?;
        Ok(ColouringSystem::from_json(&read(path)?)?)
    }

    fn seed(&self, what: &str) -> Result<u64> {
        self.seed
            .ok_or_else(|| anyhow!("{what} is randomized and needs --seed"))
    }

    /// Writes to `--out` when given, else to stdout.
    fn emit(&self, text: &str) -> Result<()> {
        match &self.out {
            Some(path) => fs::write(path, text).with_context(|| format!("writing {}", path.display())),
            None => {
                print!("{text}");
                Ok(())
            }
        }
    }

    /// Reports always reach a file; stdout gets the summary, or the report
    /// itself under `--json`.
    fn report(&self, default: &str, json: &str, summary: &str) -> Result<()> {
        let path = self.out.clone().unwrap_or_else(|| PathBuf::from(default));
        fs::write(&path, json).with_context(|| format!("writing {}", path.display()))?;
        if self.json {
            print!("{json}");
        } else {
            println!("{summary}");
        }
        Ok(())
    }
}

fn parse_ordinal(s: &str) -> Result<Ordinal> {
    s.parse().with_context(|| format!("parsing ordinal {s:?}"))
}

fn parse_point(s: &str) -> Result<usize> {
    s.parse().with_context(|| format!("parsing point {s:?}"))
}

fn cmd_ord(g: &Global, op: &OrdOp) -> Result<Status> {
    let (key, value) = match op {
        OrdOp::Parse { expr } => ("normal_form", parse_ordinal(expr)?.to_string()),
        OrdOp::Compare { a, b } => {
            let order = match parse_ordinal(a)?.cmp(&parse_ordinal(b)?) {
                std::cmp::Ordering::Less => "less",
                std::cmp::Ordering::Equal => "equal",
                std::cmp::Ordering::Greater => "greater",
            };
            ("order", order.to_string())
        }
        OrdOp::Add { a, b } => ("sum", parse_ordinal(a)?.add(&parse_ordinal(b)?).to_string()),
        OrdOp::Fund { limit, n } => ("element", parse_ordinal(limit)?.fundamental(*n)?.to_string()),
    };
    if g.json {
        g.emit(&pretty(&serde_json::json!({ key: value }))?)?;
    } else {
        g.emit(&format!("{value}\n"))?;
    }
    Ok(Status::Held)
}

#[derive(Serialize)]
struct WalkOut {
    beta: String,
    alpha: String,
    steps: Vec<String>,
    rho: Vec<String>,
    k: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    labels: Option<LabelsOut>,
}

#[derive(Serialize)]
struct LabelsOut {
    labels: Vec<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    f0: Option<Vec<u64>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    f1: Option<Vec<u64>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    f2: Option<Vec<u64>>,
}

fn trace_out<C: CSequence>(cs: &C, beta: &C::Point, alpha: &C::Point) -> Result<WalkOut> {
    let t = walk(cs, beta, alpha)?;
    let strings = |v: &[C::Point]| v.iter().map(ToString::to_string).collect::<Vec<_>>();
    Ok(WalkOut {
        beta: beta.to_string(),
        alpha: alpha.to_string(),
        steps: strings(t.steps()),
        rho: strings(t.rho()),
        k: t.k(),
        labels: None,
    })
}

/// Labels of `γ₁, …, γ_k`.
fn finite_labels(sys: Option<&ColouringSystem>, labelled: &[String]) -> Result<LabelsOut> {
    let Some(sys) = sys else {
        return Ok(LabelsOut {
            labels: labelled.to_vec(),
            f0: None,
            f1: None,
            f2: None,
        });
    };
    let labels = labelled
        .iter()
        .map(|p| sys.label(p.parse().expect("finite point")))
        .collect::<Result<Vec<_>, _>>()?;
    let map = |f: fn(&ColouringSystem, u64) -> Result<u64, walkforge_core::ColouringError>| {
        labels.iter().map(|&l| f(sys, l)).collect::<Result<Vec<_>, _>>()
    };
    Ok(LabelsOut {
        labels: labels.iter().map(u64::to_string).collect(),
        f0: Some(map(ColouringSystem::f0_of)?),
        f1: Some(map(ColouringSystem::f1_of)?),
        f2: Some(map(ColouringSystem::f2_of)?),
    })
}

fn cmd_walk(g: &Global, beta: &str, alpha: &str, with_labels: bool) -> Result<Status> {
    let mut out = match g.model()? {
        Model::Finite(_) => {
            let (_, model) = g.finite()?;
            let (b, a) = (parse_point(beta)?, parse_point(alpha)?);
            match &model {
                Finite::Successor(cs) => trace_out(cs, &b, &a)?,
                Finite::Table(cs) => trace_out(cs, &b, &a)?,
            }
        }
        Model::Cnf(bound) => trace_out(&g.ladder(bound)?, &parse_ordinal(beta)?, &parse_ordinal(alpha)?)?,
    };
    if with_labels {
        let sys = match (g.model()?, &g.system) {
            (Model::Finite(_), Some(_)) => Some(g.system()?),
            (Model::Cnf(_), Some(_)) => bail!("colouring systems apply to finite models only"),
            _ => None,
        };
        out.labels = Some(finite_labels(sys.as_ref(), &out.steps[1..])?);
    }
    if g.json {
        g.emit(&pretty(&out)?)?;
        return Ok(Status::Held);
    }
    let mut text = match &out.labels {
        None => format!(
            "steps: {}\nrho: {}\nk: {}\n",
            out.steps.join(","),
            out.rho.join(","),
            out.k
        ),
        Some(l) => format!("labels: {}\n", l.labels.join(",")),
    };
    if let Some(l) = &out.labels {
        for (name, v) in [("f0", &l.f0), ("f1", &l.f1), ("f2", &l.f2)] {
            if let Some(v) = v {
                let v: Vec<String> = v.iter().map(u64::to_string).collect();
                text.push_str(&format!("{name}: {}\n", v.join(",")));
            }
        }
    }
    g.emit(&text)?;
    Ok(Status::Held)
}

#[derive(Serialize)]
struct DfunOut {
    f0: Vec<u64>,
    f1: Vec<u64>,
    d: DIndex,
    direct: usize,
    decompositions: Vec<Decomposition>,
}

fn cmd_dfun(g: &Global, f0: &[u64], f1: &[u64]) -> Result<Status> {
    let seq = LabelledSeq::new(f0.to_vec(), f1.to_vec())?;
    let out = DfunOut {
        f0: f0.to_vec(),
        f1: f1.to_vec(),
        d: d_index(&seq),
        direct: d_direct(&seq),
        decompositions: enumerate_decompositions(&seq).into_values().collect(),
    };
    let status = match out.d.status {
        DStatus::Conflict(_) => Status::Violated,
        _ => Status::Held,
    };
    if g.json {
        g.emit(&pretty(&out)?)?;
    } else {
        let how = match &out.d.status {
            DStatus::Unique => "unique".to_string(),
            DStatus::Default => "no decomposition".to_string(),
            DStatus::Conflict(v) => format!("conflict between {v:?}"),
        };
        g.emit(&format!("d: {} ({how})\ndirect: {}\n", out.d.value, out.direct))?;
    }
    Ok(status)
}

fn cmd_verify(g: &Global, suite: &Suite) -> Result<Status> {
    match suite {
        Suite::WalkLemmas {
            csequences,
            table_n,
            density,
        } => {
            let Model::Finite(n) = *g.model()? else {
                bail!("walk-lemmas runs on a finite model");
            };
            ensure!((0.0..=1.0).contains(density), "--density must lie in [0, 1]");
            let seed = if *csequences > 0 {
                g.seed("walk-lemmas")?
            } else {
                g.seed.unwrap_or(0)
            };
            let extra = match g.finite()?.1 {
                Finite::Table(t) => vec![t],
                Finite::Successor(_) => vec![],
            };
            let config = WalkLemmaConfig {
                n,
                tables: *csequences,
                table_n: *table_n,
                density: *density,
                seed,
            };
            let r = walk_lemmas(&config, &extra);
            let summary = format!("walk-lemmas: {} walks, {} violations", r.checked, r.violation_count);
            g.report("walkforge-walk-lemmas.json", &pretty(&r)?, &summary)?;
            Ok(if r.is_clean() { Status::Held } else { Status::Violated })
        }
        Suite::Coherence {
            pairs,
            alphas,
            degree,
            max_coefficient,
        } => {
            ensure!(*degree >= 2, "--degree must be at least 2 for limits below the bound");
            let config = CoherenceConfig {
                pairs: *pairs,
                alphas: *alphas,
                degree: *degree,
                max_coefficient: (*max_coefficient).max(1),
                seed: g.seed("coherence")?,
            };
            let r = coherence(&config);
            let summary = format!("coherence: {} checks, {} violations", r.checked, r.violation_count);
            g.report("walkforge-coherence.json", &pretty(&r)?, &summary)?;
            Ok(if r.is_clean() { Status::Held } else { Status::Violated })
        }
        Suite::ClaimE4 {
            k0,
            k1,
            max_len,
            random,
            trials,
            max_records,
        } => {
            ensure!(*k0 > 0 && *k1 > 0, "--k0 and --k1 must be positive");
            let mode = if *random {
                SweepMode::Random {
                    seed: g.seed("a random sweep")?,
                    trials: *trials,
                }
            } else {
                SweepMode::Exhaustive
            };
            let config = SweepConfig {
                kappa0: *k0,
                kappa1: *k1,
                max_len: *max_len,
                mode,
                max_records: *max_records,
            };
            ensure!(config.sequence_count().is_some(), "sweep size overflows");
            let r = claim_e4_sweep(&config);
            let summary = format!(
                "claim-e4: {} sequences, {} decomposable, inconsistencies={}, structural_mismatches={}, \
                 direct agreement {:.4}",
                r.sequences, r.decomposable, r.inconsistencies, r.structural_mismatches, r.direct_agreement_rate
            );
            g.report("walkforge-claim-e4.json", &pretty(&r)?, &summary)?;
            Ok(if r.is_consistent() {
                Status::Held
            } else {
                Status::Violated
            })
        }
    }
}

fn cmd_colour(g: &Global, op: &ColourOp) -> Result<Status> {
    let sys = g.system()?;
    let (n, model) = g.finite()?;
    sys.validate(n)?;
    let text = match op {
        ColourOp::Table { which } => {
            let which = match which {
                WhichArg::C1 => Which::C1,
                WhichArg::C2 => Which::C2,
            };
            match &model {
                Finite::Successor(cs) => colour_table(&sys, cs, n, which)?,
                Finite::Table(cs) => colour_table(&sys, cs, n, which)?,
            }
            .to_json()
        }
        ColourOp::Pair { alpha, beta } => {
            let e = match &model {
                Finite::Successor(cs) => evaluate(&sys, cs, n, *alpha, *beta)?,
                Finite::Table(cs) => evaluate(&sys, cs, n, *alpha, *beta)?,
            };
            if g.json {
                pretty(&e)?
            } else {
                format!("c1: {}\nc2: {}\n", e.c1, e.c2)
            }
        }
    };
    g.emit(&text)?;
    Ok(Status::Held)
}

fn read_colouring(path: &Path) -> Result<ColourTable> {
    Ok(ColourTable::from_json(&read(path)?)?)
}

fn cmd_check(g: &Global, colouring: &Path, instance: &Path) -> Result<Status> {
    let c = read_colouring(colouring)?;
    let file: InstanceFile = serde_json::from_str(&read(instance)?).context("parsing instance file")?;
    let verdict = check_instance(&c, &file)?;
    if g.json {
        g.emit(&pretty(&verdict)?)?;
    } else {
        match verdict.witness {
            Some([a0, a1]) => g.emit(&format!("witness: {a0},{a1}\n"))?,
            None => g.emit("no witness\n")?,
        }
    }
    Ok(if verdict.witness.is_some() {
        Status::Held
    } else {
        Status::Violated
    })
}

fn cmd_search(g: &Global, colouring: &Path, params: &Path, bounds: &Path, random: bool, trials: u64) -> Result<Status> {
    let c = read_colouring(colouring)?;
    let params: PartitionParams = serde_json::from_str(&read(params)?).context("parsing params file")?;
    let bounds: SearchBounds = serde_json::from_str(&read(bounds)?).context("parsing bounds file")?;
    let strategy = if random {
        Strategy::Random {
            seed: g.seed("a random search")?,
            trials,
        }
    } else {
        Strategy::Exhaustive
    };
    let r = search_counterexample(&c, &params, &bounds, strategy)?;
    let summary = match &r.counterexample {
        Some(ce) => format!("counterexample at instance {} of {}", ce.index, r.space),
        None => format!("no counterexample among {} instances", r.instances_tried),
    };
    g.report("walkforge-search.json", &pretty(&r)?, &summary)?;
    Ok(if r.counterexample.is_some() {
        Status::Violated
    } else {
        Status::Held
    })
}

fn run(cli: &Cli) -> Result<Status> {
    let g = &cli.global;
    match &cli.command {
        Command::Ord { op } => cmd_ord(g, op),
        Command::Walk { beta, alpha } => cmd_walk(g, beta, alpha, false),
        Command::Labels { beta, alpha } => cmd_walk(g, beta, alpha, true),
        Command::Dfun { f0, f1 } => cmd_dfun(g, f0, f1),
        Command::Verify { suite } => cmd_verify(g, suite),
        Command::Colour { op } => cmd_colour(g, op),
        Command::Derive { colouring, table, iota } => {
            let c = read_colouring(colouring)?;
            let t = DerivationTable::from_json(&read(table)?)?;
            g.emit(&derive_colouring(&c, &t, usize::from(*iota))?.to_json())?;
            Ok(Status::Held)
        }
        Command::Promote { colouring, promotion } => {
            let c = read_colouring(colouring)?;
            let f: Promotion = serde_json::from_str(&read(promotion)?).context("parsing promotion file")?;
            g.emit(&promote_colouring(&c, &f)?.to_json())?;
            Ok(Status::Held)
        }
        Command::Check { colouring, instance } => cmd_check(g, colouring, instance),
        Command::Search {
            colouring,
            params,
            bounds,
            random,
            trials,
        } => cmd_search(g, colouring, params, bounds, *random, *trials),
    }
}

fn init_threads() -> Result<()> {
    let Ok(value) = std::env::var("WALKFORGE_THREADS") else {
        return Ok(());
    };
    let threads: usize = value.parse().with_context(|| format!("WALKFORGE_THREADS={value:?}"))?;
    ensure!(threads > 0, "WALKFORGE_THREADS must be positive");
    rayon::ThreadPoolBuilder::new().num_threads(threads).build_global()?;
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = init_threads().and_then(|()| run(&cli));
    match result {
        Ok(Status::Held) => ExitCode::SUCCESS,
        Ok(Status::Violated) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
