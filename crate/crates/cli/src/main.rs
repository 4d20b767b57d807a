use std::fs;
use std::io::Write as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::{Parser, Subcommand};

use pgroup_core::audit::tower_audit;
use pgroup_core::format::{parse_presentation, render_presentation, render_relations};
use pgroup_core::pga::{immediate_descendants, p_cover};
use pgroup_core::search::{run_search, run_search_with, SearchOptions, SearchReport, Status, TargetSpec, Verdict};
use pgroup_core::sigma::find_sigma;
use pgroup_core::structure::derived_length;
use pgroup_core::transfer::transfer_summary;
use pgroup_core::{abelianization, fixtures, Group, PcPresentation};

#[derive(Parser)]
#[command(name = "pgroup", about = "Finite p-groups from power-commutator presentations")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Order, class, abelianization, transfer types and σ-automorphism.
    Invariants { file: PathBuf },
    /// Immediate descendants, or descendants `level` steps down.
    Descendants {
        file: PathBuf,
        #[arg(long, default_value_t = 1)]
        level: u32,
    },
    /// p-covering group with multiplicator and nucleus ranks.
    Cover { file: PathBuf },
    /// Run the descendant tree search for a TOML target and print the report as JSON.
    Search {
        target_file: PathBuf,
        #[arg(long)]
        max_class: Option<u32>,
        /// Also write one line per node to this file.
        #[arg(long)]
        trace: Option<PathBuf>,
    },
    /// Search with the bundled Q(sqrt(-9748)) target and compare every count.
    VerifyTower,
}

fn read_presentation(path: &Path) -> Result<PcPresentation> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    parse_presentation(&text).with_context(|| format!("parsing {}", path.display()))
}

fn invariants(pres: &PcPresentation) -> Result<String> {
    let g = Group::new(pres)?;
    let summary = transfer_summary(&g);
    let tkt = summary.tkt.map_or_else(|| "undefined".to_string(), |t| t.to_string());
    let sigma = if find_sigma(&g)?.is_some() { "yes" } else { "no" };
    Ok(format!(
        "order: {}\np-class: {}\nabelianization: {}\nderived length: {}\nttt: {}\ntkt: {}\nsigma: {}\n",
        g.order(),
        pres.p_class(),
        abelianization(pres),
        derived_length(&g),
        summary.ttt,
        tkt,
        sigma
    ))
}

fn descendants(pres: PcPresentation, level: u32) -> Result<String> {
    let mut out = String::new();
    let mut current = vec![(String::new(), pres)];
    for _ in 0..level {
        let mut next = Vec::new();
        for (name, p) in &current {
            let set = immediate_descendants(p)?;
            for (k, d) in set.descendants.into_iter().enumerate() {
                let child = if name.is_empty() { format!("{}", k + 1) } else { format!("{name}.{}", k + 1) };
                next.push((child, d.presentation));
            }
        }
        current = next;
    }
    for (name, p) in &current {
        let g = Group::new(p)?;
        out += &format!(
            "# descendant {name}: order {}^{}, class {}, abelianization {}, ttt {}\n",
            p.p(),
            p.ngens(),
            p.p_class(),
            abelianization(p),
            transfer_summary(&g).ttt
        );
        out += &render_presentation(p);
    }
    out += &format!("# {} descendants\n", current.len());
    Ok(out)
}

fn cover(pres: &PcPresentation) -> Result<String> {
    let c = p_cover(pres)?;
    Ok(format!(
        "multiplicator rank: {}\nnucleus rank: {}\n{}",
        c.multiplicator_rank(),
        c.nucleus_rank(),
        render_relations(c.cover())
    ))
}

fn trace(report: &SearchReport) -> String {
    let mut out = String::new();
    for n in report.nodes() {
        let verdict = match &n.verdict {
            Verdict::Pruned(p) => format!("pruned {}", p.rule()),
            Verdict::Expanded { children } => format!("expanded into {}", children.len()),
            Verdict::Terminal => "terminal".into(),
            Verdict::Unexplored => "unexplored".into(),
        };
        let parent = n.parent.map_or("-".to_string(), |p| p.to_string());
        let tkt = n.tkt.as_ref().map_or("-".to_string(), ToString::to_string);
        out += &format!(
            "class {} node {} parent {} order {} ab {} ttt {} tkt {}: {}\n",
            n.class, n.id, parent, n.order, n.abelianization, n.ttt, tkt, verdict
        );
    }
    out
}

fn run(cli: Cli) -> Result<ExitCode> {
    let mut stdout = std::io::stdout().lock();
    match cli.command {
        Command::Invariants { file } => write!(stdout, "{}", invariants(&read_presentation(&file)?)?)?,
        Command::Descendants { file, level } => write!(stdout, "{}", descendants(read_presentation(&file)?, level)?)?,
        Command::Cover { file } => write!(stdout, "{}", cover(&read_presentation(&file)?)?)?,
        Command::Search { target_file, max_class, trace: trace_path } => {
            let text = fs::read_to_string(&target_file).with_context(|| format!("reading {}", target_file.display()))?;
            let target = TargetSpec::from_toml(&text)?;
            let report = run_search_with(&target, SearchOptions { pruning: true, max_class })?;
            if let Some(path) = trace_path {
                fs::write(&path, trace(&report)).with_context(|| format!("writing {}", path.display()))?;
            }
            serde_json::to_writer_pretty(&mut stdout, &report)?;
            writeln!(stdout)?;
            if report.status == Status::Inconclusive {
                eprintln!("search stopped at the class bound with live nodes: INCONCLUSIVE");
                return Ok(ExitCode::from(2));
            }
        }
        Command::VerifyTower => {
            let target = TargetSpec::from_toml(fixtures::TARGET_9748)?;
            let report = run_search(&target)?;
            let lines = tower_audit(&report)?;
            for l in &lines {
                writeln!(stdout, "{l}")?;
            }
            if lines.iter().any(|l| !l.ok()) {
                return Ok(ExitCode::FAILURE);
            }
        }
    }
    Ok(ExitCode::SUCCESS)
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}
