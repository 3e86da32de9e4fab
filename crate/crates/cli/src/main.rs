//! `qred`: bisimulation, minimization and reduction witnesses on the
//! command line.
//!
//! Output is canonical JSON unless `--pretty` is given. Exit codes: 0 on
//! success or a true answer, 1 on a false answer or a violation, 2 on usage
//! or input errors.

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Parser, Subcommand, ValueEnum};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Value as Json};

use qred_core::bisim::{bisimilar, count_approximants, largest_bisimulation, minimize, FingerprintTable};
use qred_core::format::{decode_system, descriptor_from_json, partition_to_json, system_to_json};
use qred_core::gen::{random_system, Family};
use qred_core::monoid::Monoid;
use qred_core::reduct::{
    compose_reductions, curry_reduction, lts_to_wlts, synthesize_reduction, verify_system_reduction, witness_from_json, witness_to_json,
    wlts_to_ultras, CurryDirection, ReductionWitness, ZeroEntries,
};
use qred_core::systems::disjoint_union;
use qred_core::{Partition, System, TypeDescriptor};

#[derive(Parser)]
#[command(name = "qred", version, about = "Bisimulation and reductions for quantitative transition systems")]
struct Cli {
    /// Human-readable output instead of canonical JSON.
    #[arg(long, global = true)]
    pretty: bool,
    /// Write output to a file instead of stdout.
    #[arg(short = 'o', long = "output", global = true)]
    output: Option<PathBuf>,
    /// Largest carrier accepted on input.
    #[arg(long, env = "QRED_MAX_STATES", default_value_t = 10_000, global = true)]
    max_states: usize,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Check a system file against its declared type.
    Validate { file: PathBuf },
    /// Decide bisimilarity of two states, or print the largest bisimulation.
    Bisim {
        file: PathBuf,
        /// Second system; states of `--right` are looked up here.
        other: Option<PathBuf>,
        #[arg(long, requires = "right")]
        left: Option<String>,
        #[arg(long, requires = "left")]
        right: Option<String>,
    },
    /// Quotient by the largest bisimulation.
    Minimize { file: PathBuf },
    /// Depth-n fingerprint of a state in the final sequence.
    Fingerprint {
        file: PathBuf,
        #[arg(long)]
        state: String,
        /// Defaults to the number of states.
        #[arg(long)]
        depth: Option<usize>,
    },
    /// Sizes of the final-sequence approximants of a finite type.
    CountApproximants {
        #[arg(long, conflicts_with = "descriptor")]
        labels: Option<usize>,
        #[arg(long, default_value = "bool")]
        monoid: String,
        #[arg(long)]
        depth: usize,
        /// Type descriptor file, instead of `--labels`/`--monoid`.
        #[arg(long)]
        descriptor: Option<PathBuf>,
    },
    /// Build a reduction witness: `wlts`, `ultras`, `wts` or `synth:<descriptor-file>`.
    Reduce {
        file: PathBuf,
        #[arg(long)]
        to: String,
        /// Cast empty weight functions to empty sets instead of `{{} ↦ tt}`.
        #[arg(long)]
        drop_zero: bool,
    },
    /// Machine-check a reduction witness.
    VerifyReduction {
        witness: PathBuf,
        /// Enumerate every source bisimulation up to this many states.
        #[arg(long, default_value_t = 6)]
        exhaustive_limit: usize,
    },
    /// Compose two witnesses, the first applied first.
    Compose { first: PathBuf, second: PathBuf },
    /// Seeded random system.
    Generate {
        #[arg(long, value_enum)]
        family: FamilyArg,
        /// Upper bound on the number of states.
        #[arg(long, default_value_t = 5)]
        states: usize,
        /// Upper bound on the labels per component.
        #[arg(long, default_value_t = 2)]
        labels: usize,
        #[arg(long)]
        seed: u64,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum FamilyArg {
    Lts,
    WltsNat,
    WltsRational,
    Ultras,
    Futs,
}

impl From<FamilyArg> for Family {
    fn from(f: FamilyArg) -> Family {
        match f {
            FamilyArg::Lts => Family::Lts,
            FamilyArg::WltsNat => Family::WltsNat,
            FamilyArg::WltsRational => Family::WltsRational,
            FamilyArg::Ultras => Family::Ultras,
            FamilyArg::Futs => Family::Futs,
        }
    }
}

/// A command's result: JSON, an optional text rendering, and whether the
/// answer was positive.
struct Output {
    json: Json,
    text: Option<String>,
    ok: bool,
}

impl Output {
    fn json(json: Json) -> Output {
        Output { json, text: None, ok: true }
    }
}

fn read_json(path: &Path) -> Result<Json> {
    let text = std::fs::read_to_string(path).with_context(|| format!("cannot read {}", path.display()))?;
    serde_json::from_str(&text).with_context(|| format!("{} is not JSON", path.display()))
}

struct Loader {
    max_states: usize,
}

impl Loader {
    fn check_size(&self, s: &System, path: &Path) -> Result<()> {
        if s.len() > self.max_states {
            bail!("{} has {} states, above the limit of {} (QRED_MAX_STATES)", path.display(), s.len(), self.max_states);
        }
        Ok(())
    }

    fn system(&self, path: &Path) -> Result<System> {
        let text = std::fs::read_to_string(path).with_context(|| format!("cannot read {}", path.display()))?;
        let s = qred_core::format::parse_system(&text).with_context(|| format!("in {}", path.display()))?;
        self.check_size(&s, path)?;
        Ok(s)
    }

    fn witness(&self, path: &Path) -> Result<ReductionWitness> {
        let raw = read_json(path)?;
        let w = witness_from_json(&raw, path.parent()).with_context(|| format!("in {}", path.display()))?;
        self.check_size(&w.source, path)?;
        self.check_size(&w.target, path)?;
        Ok(w)
    }
}

fn state(s: &System, name: &str) -> Result<usize> {
    s.state_index(name).with_context(|| format!("unknown state `{name}`"))
}

fn blocks_text(p: &Partition, s: &System) -> String {
    p.blocks()
        .iter()
        .map(|b| format!("{{{}}}", b.iter().map(|&x| s.state_name(x)).collect::<Vec<_>>().join(", ")))
        .collect::<Vec<_>>()
        .join("\n")
}

fn partition_output(p: &Partition, s: &System) -> Output {
    Output { json: json!({"partition": partition_to_json(p, s)}), text: Some(blocks_text(p, s)), ok: true }
}

fn validate(path: &Path, loader: &Loader) -> Result<Output> {
    let text = std::fs::read_to_string(path).with_context(|| format!("cannot read {}", path.display()))?;
    let s = decode_system(&text).with_context(|| format!("in {}", path.display()))?;
    loader.check_size(&s, path)?;
    let violations = s.violations();
    let text = if violations.is_empty() {
        format!("valid: {} states, {} slots", s.len(), s.ty().slot_count())
    } else {
        violations.iter().map(|v| v.to_string()).collect::<Vec<_>>().join("\n")
    };
    Ok(Output { json: json!({"valid": violations.is_empty(), "violations": violations}), text: Some(text), ok: violations.is_empty() })
}

fn bisim(file: &Path, other: Option<&Path>, left: Option<&str>, right: Option<&str>, loader: &Loader) -> Result<Output> {
    let s1 = loader.system(file)?;
    let s2 = other.map(|p| loader.system(p)).transpose()?;
    match (left, right) {
        (Some(l), Some(r)) => {
            let rhs = s2.as_ref().unwrap_or(&s1);
            let answer = bisimilar(&s1, state(&s1, l)?, rhs, state(rhs, r)?)?;
            Ok(Output { json: json!({"bisimilar": answer}), text: Some(answer.to_string()), ok: answer })
        }
        _ => match s2 {
            Some(s2) => {
                let (u, _, _) = disjoint_union(&s1, &s2)?;
                Ok(partition_output(&largest_bisimulation(&u), &u))
            }
            None => Ok(partition_output(&largest_bisimulation(&s1), &s1)),
        },
    }
}

fn minimize_cmd(file: &Path, loader: &Loader) -> Result<Output> {
    let s = loader.system(file)?;
    let (q, _) = minimize(&s);
    let classes = largest_bisimulation(&s);
    Ok(Output::json(json!({"quotient": system_to_json(&q), "classes": partition_to_json(&classes, &s)})))
}

fn fingerprint(file: &Path, name: &str, depth: Option<usize>, loader: &Loader) -> Result<Output> {
    let s = loader.system(file)?;
    let x = state(&s, name)?;
    let depth = depth.unwrap_or(s.len());
    let mut table = FingerprintTable::new();
    let fps = table.fingerprints(&s, depth);
    let same: Vec<&str> = (0..s.len()).filter(|&y| fps[y] == fps[x]).map(|y| s.state_name(y)).collect();
    Ok(Output::json(json!({
        "state": name,
        "depth": depth,
        "fingerprint": table.to_json(fps[x], s.ty()),
        "shared_with": same,
    })))
}

fn count(labels: Option<usize>, monoid: &str, depth: usize, descriptor: Option<&Path>) -> Result<Output> {
    let ty = match (descriptor, labels) {
        (Some(path), _) => descriptor_from_json(&read_json(path)?).with_context(|| format!("in {}", path.display()))?,
        (None, Some(n)) => {
            let m = Monoid::from_json(&json!({"kind": monoid}))?;
            TypeDescriptor::wlts((0..n).map(|i| format!("a{i}")).collect(), m)?
        }
        (None, None) => bail!("give --labels or --descriptor"),
    };
    let counts = count_approximants(&ty, depth)?;
    let text = counts.iter().map(u64::to_string).collect::<Vec<_>>().join(" ");
    Ok(Output { json: json!(counts), text: Some(text), ok: true })
}

fn reduce(file: &Path, to: &str, drop_zero: bool, loader: &Loader) -> Result<Output> {
    let s = loader.system(file)?;
    let w = match to {
        "wlts" if s.ty().is_lts() => lts_to_wlts(&s)?,
        "wlts" => curry_reduction(&s, CurryDirection::FromWts)?,
        "ultras" => wlts_to_ultras(&s, if drop_zero { ZeroEntries::Drop } else { ZeroEntries::Wrap })?,
        "wts" => curry_reduction(&s, CurryDirection::ToWts)?,
        other => match other.strip_prefix("synth:") {
            Some(path) => {
                let path = Path::new(path);
                let ty = descriptor_from_json(&read_json(path)?).with_context(|| format!("in {}", path.display()))?;
                synthesize_reduction(&s, &ty)?
            }
            None => bail!("unknown reduction target `{other}`; use wlts, ultras, wts or synth:<descriptor-file>"),
        },
    };
    Ok(Output::json(witness_to_json(&w)))
}

fn verify(path: &Path, limit: usize, loader: &Loader) -> Result<Output> {
    let w = loader.witness(path)?;
    let report = verify_system_reduction(&w, limit)?;
    let mut lines = vec![format!(
        "{} ({} source bisimulations{}, {} pairs)",
        if report.passed { "passed" } else { "failed" },
        report.source_bisimulations,
        if report.exhaustive { "" } else { " sampled" },
        report.checked_pairs
    )];
    for c in &report.checks {
        let mark = if c.passed { "ok  " } else { "FAIL" };
        lines.push(format!("{mark} {}{}", c.name, c.detail.as_ref().map(|d| format!(": {d}")).unwrap_or_default()));
    }
    Ok(Output { json: serde_json::to_value(&report)?, text: Some(lines.join("\n")), ok: report.passed })
}

fn run(cli: &Cli) -> Result<Output> {
    let loader = Loader { max_states: cli.max_states };
    match &cli.command {
        Command::Validate { file } => validate(file, &loader),
        Command::Bisim { file, other, left, right } => bisim(file, other.as_deref(), left.as_deref(), right.as_deref(), &loader),
        Command::Minimize { file } => minimize_cmd(file, &loader),
        Command::Fingerprint { file, state, depth } => fingerprint(file, state, *depth, &loader),
        Command::CountApproximants { labels, monoid, depth, descriptor } => count(*labels, monoid, *depth, descriptor.as_deref()),
        Command::Reduce { file, to, drop_zero } => reduce(file, to, *drop_zero, &loader),
        Command::VerifyReduction { witness, exhaustive_limit } => verify(witness, *exhaustive_limit, &loader),
        Command::Compose { first, second } => {
            let w = compose_reductions(&loader.witness(first)?, &loader.witness(second)?)?;
            Ok(Output::json(witness_to_json(&w)))
        }
        Command::Generate { family, states, labels, seed } => {
            let s = random_system((*family).into(), &mut ChaCha8Rng::seed_from_u64(*seed), *states, *labels);
            Ok(Output::json(system_to_json(&s)))
        }
    }
}

fn emit(cli: &Cli, out: &Output) -> Result<()> {
    let mut text = match (&out.text, cli.pretty) {
        (Some(t), true) => t.clone(),
        (None, true) => serde_json::to_string_pretty(&out.json)?,
        (_, false) => serde_json::to_string(&out.json)?,
    };
    text.push('\n');
    match &cli.output {
        Some(path) => std::fs::write(path, text).with_context(|| format!("cannot write {}", path.display())),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    match run(&cli).and_then(|out| emit(&cli, &out).map(|()| out.ok)) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("qred: {e:#}");
            ExitCode::from(2)
        }
    }
}
