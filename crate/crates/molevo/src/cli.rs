//! Command-line interface: `run`, `score`, `translate`, `pareto`.
//!
//! Exit codes: 0 success, 1 domain error (bad config or input),
//! 2 usage error (handled by the argument parser).

use crate::engine::{Engine, RunConfig};
use crate::error::Result;
use crate::filter::{check, FilterConfig};
use crate::genome::{
    parse_fasta_checked, translate, write_fasta, Protein, DNA_ALPHABET, PROTEIN_ALPHABET,
};
use crate::objectives::{compile_objectives, evaluate, ObjectiveSpec, PkaSet};
use clap::{Args, Parser, Subcommand};
use std::path::PathBuf;

#[derive(Parser)]
#[command(
    name = "molevo",
    version,
    about = "In-silico molecular evolution: evolve DNA populations under multi-objective protein fitness"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand)]
pub enum Command {
    /// Execute a full evolutionary run from a JSON config
    Run(RunArgs),
    /// Score protein sequences against an objective list
    Score(ScoreArgs),
    /// Translate a DNA FASTA file to protein FASTA
    Translate(TranslateArgs),
    /// Report the Pareto front of a completed run, optionally as SVG
    Pareto(ParetoArgs),
}

#[derive(Args)]
pub struct RunArgs {
    /// Path to the RunConfig JSON file
    #[arg(long)]
    pub config: PathBuf,
    /// Override the config's seed
    #[arg(long)]
    pub seed: Option<u64>,
    /// Override the config's output directory
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Args)]
pub struct ScoreArgs {
    /// A single protein sequence
    #[arg(long, conflicts_with = "fasta")]
    pub protein: Option<String>,
    /// A protein FASTA file
    #[arg(long)]
    pub fasta: Option<PathBuf>,
    /// JSON file holding a list of objective specs
    #[arg(long)]
    pub objectives: PathBuf,
}

#[derive(Args)]
pub struct TranslateArgs {
    /// A DNA FASTA file
    #[arg(long)]
    pub fasta: PathBuf,
    /// Reading frame offset
    #[arg(long, default_value_t = 0, value_parser = clap::value_parser!(u8).range(0..=2))]
    pub frame: u8,
}

#[derive(Args)]
pub struct ParetoArgs {
    /// Directory written by `molevo run`
    #[arg(long)]
    pub run: PathBuf,
    /// Write a self-contained SVG report here
    #[arg(long)]
    pub svg: Option<PathBuf>,
    /// Objective pair for the 2-D scatter, as `i,j`
    #[arg(long)]
    pub objectives: Option<String>,
}

/// Dispatch a parsed invocation. Returns the process exit code.
pub fn execute(cli: Cli) -> i32 {
    let result = match cli.command {
        Command::Run(args) => cmd_run(&args),
        Command::Score(args) => cmd_score(&args),
        Command::Translate(args) => cmd_translate(&args),
        Command::Pareto(args) => cmd_pareto(&args),
    };
    match result {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            1
        }
    }
}

fn cmd_run(args: &RunArgs) -> Result<()> {
    let text = std::fs::read_to_string(&args.config)?;
    let mut config: RunConfig = serde_json::from_str(&text)?;
    if let Some(seed) = args.seed {
        config.seed = seed;
    }
    if let Some(out) = &args.out {
        config.output_dir = Some(out.clone());
    }
    let created_dir = config
        .output_dir
        .as_ref()
        .filter(|d| !d.exists())
        .cloned();
    let engine = Engine::new(config)?;
    let run_result = engine.run_with_progress(|rec| {
        let best: Vec<String> = rec.best.iter().map(|v| format!("{v:.4}")).collect();
        println!(
            "gen {:>5}  best [{}]  front0 {:>4}  rejected {:.1}%",
            rec.generation,
            best.join(", "),
            rec.front0_size,
            100.0 * rec.reject_frac
        );
    });
    if let Err(e) = run_result {
        // do not leave a partially written output directory behind
        if let Some(dir) = created_dir {
            let _ = std::fs::remove_dir_all(dir);
        }
        return Err(e);
    }
    Ok(())
}

fn cmd_score(args: &ScoreArgs) -> Result<()> {
    let spec_text = std::fs::read_to_string(&args.objectives)?;
    let specs: Vec<ObjectiveSpec> = serde_json::from_str(&spec_text)?;
    let pka = PkaSet::default();
    let objectives = compile_objectives(&specs, &pka)?;
    let filter = FilterConfig::default();

    let records: Vec<(String, String)> = match (&args.protein, &args.fasta) {
        (Some(seq), None) => vec![("protein".to_string(), seq.clone())],
        (None, Some(path)) => {
            let text = std::fs::read_to_string(path)?;
            parse_fasta_checked(&text, PROTEIN_ALPHABET)?
        }
        _ => {
            return Err(crate::error::MolevoError::Config {
                field: "input".into(),
                message: "exactly one of --protein or --fasta is required".into(),
            })
        }
    };

    let mut out = String::from("id");
    for (i, spec) in specs.iter().enumerate() {
        let kind = serde_json::to_value(spec)?;
        let kind = kind.get("kind").and_then(|k| k.as_str()).unwrap().to_string();
        out.push_str(&format!(",obj{i}_{kind}"));
    }
    out.push_str(",accepted,reasons\n");
    for (id, seq) in &records {
        let protein = Protein::new(seq).map_err(|e| match e {
            crate::error::MolevoError::InvalidResidue {
                residue, position, ..
            } => crate::error::MolevoError::InvalidResidue {
                id: id.clone(),
                residue,
                position,
            },
            other => other,
        })?;
        let vector = evaluate(&protein, &objectives, &pka)?;
        let verdict = check(&protein, &filter);
        out.push_str(id);
        for v in vector.values() {
            out.push_str(&format!(",{v:.4}"));
        }
        out.push_str(&format!(
            ",{},{}\n",
            verdict.accepted,
            verdict.reasons.join(";")
        ));
    }
    print!("{out}");
    Ok(())
}

fn cmd_translate(args: &TranslateArgs) -> Result<()> {
    let text = std::fs::read_to_string(&args.fasta)?;
    let records = parse_fasta_checked(&text, &DNA_ALPHABET)?;
    let mut out_records = Vec::with_capacity(records.len());
    for (id, seq) in records {
        let dna = crate::genome::Dna::new(&seq)?;
        let protein = translate(&dna, args.frame as usize);
        let header = if protein.truncated {
            format!("{id} truncated=true")
        } else {
            id
        };
        out_records.push((header, protein.residues().to_string()));
    }
    print!("{}", write_fasta(&out_records, 60)?);
    Ok(())
}

#[derive(serde::Deserialize)]
struct ParetoEntry {
    dna: String,
    protein: String,
    objectives: Vec<f64>,
}

fn cmd_pareto(args: &ParetoArgs) -> Result<()> {
    let pareto_text = std::fs::read_to_string(args.run.join("pareto.json"))?;
    let entries: Vec<ParetoEntry> = serde_json::from_str(&pareto_text)?;
    let history_text = std::fs::read_to_string(args.run.join("history.csv"))?;

    let n_obj = entries.first().map(|e| e.objectives.len()).unwrap_or(0);
    let (i, j) = parse_objective_pair(args.objectives.as_deref(), n_obj)?;

    let mut out = String::from("index");
    for k in 0..n_obj {
        out.push_str(&format!(",objective_{k}"));
    }
    out.push_str(",dna,protein\n");
    for (idx, e) in entries.iter().enumerate() {
        out.push_str(&idx.to_string());
        for v in &e.objectives {
            out.push_str(&format!(",{v}"));
        }
        out.push_str(&format!(",{},{}\n", e.dna, e.protein));
    }
    print!("{out}");

    if let Some(svg_path) = &args.svg {
        let svg = render_svg(&entries, &history_text, i, j)?;
        std::fs::write(svg_path, svg)?;
    }
    Ok(())
}

fn parse_objective_pair(spec: Option<&str>, n_obj: usize) -> Result<(usize, usize)> {
    let bad = |message: String| crate::error::MolevoError::Config {
        field: "objectives".into(),
        message,
    };
    let (i, j) = match spec {
        None => {
            if n_obj >= 2 {
                (0, 1)
            } else {
                (0, 0)
            }
        }
        Some(s) => {
            let parts: Vec<&str> = s.split(',').collect();
            if parts.len() != 2 {
                return Err(bad(format!("expected 'i,j', got '{s}'")));
            }
            let parse = |p: &str| {
                p.trim()
                    .parse::<usize>()
                    .map_err(|_| bad(format!("invalid objective index '{p}'")))
            };
            (parse(parts[0])?, parse(parts[1])?)
        }
    };
    if n_obj > 0 && (i >= n_obj || j >= n_obj) {
        return Err(bad(format!(
            "objective index out of range: run has {n_obj} objectives"
        )));
    }
    Ok((i, j))
}

/// Emit a self-contained SVG: a scatter of the chosen objective pair on
/// the left, best-objective-vs-generation on the right. No external
/// assets.
fn render_svg(
    entries: &[ParetoEntry],
    history_csv: &str,
    obj_i: usize,
    obj_j: usize,
) -> Result<String> {
    const W: f64 = 960.0;
    const H: f64 = 480.0;
    const PANEL: f64 = 400.0;
    const MARGIN: f64 = 55.0;

    let mut svg = String::new();
    svg.push_str(&format!(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{W}\" height=\"{H}\" viewBox=\"0 0 {W} {H}\">\n"
    ));
    svg.push_str("<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n");

    // left panel: pareto scatter
    let xs: Vec<f64> = entries.iter().map(|e| e.objectives[obj_i]).collect();
    let ys: Vec<f64> = entries.iter().map(|e| e.objectives[obj_j]).collect();
    let (x0, x1) = padded_range(&xs);
    let (y0, y1) = padded_range(&ys);
    svg.push_str(&panel_frame(
        MARGIN,
        MARGIN,
        PANEL,
        PANEL - 100.0,
        &format!("Pareto front: objective {obj_i} vs {obj_j}"),
    ));
    for (x, y) in xs.iter().zip(&ys) {
        let px = MARGIN + (x - x0) / (x1 - x0) * PANEL;
        let py = MARGIN + (PANEL - 100.0) * (1.0 - (y - y0) / (y1 - y0));
        svg.push_str(&format!(
            "<circle cx=\"{px:.2}\" cy=\"{py:.2}\" r=\"4\" fill=\"#2166ac\" fill-opacity=\"0.7\"/>\n"
        ));
    }

    // right panel: best objective obj_i per generation
    let mut gens: Vec<f64> = Vec::new();
    let mut bests: Vec<f64> = Vec::new();
    let mut lines = history_csv.lines();
    let header: Vec<&str> = lines.next().unwrap_or("").split(',').collect();
    let best_col = header
        .iter()
        .position(|h| *h == format!("best_{obj_i}"))
        .unwrap_or(1);
    for line in lines {
        let fields: Vec<&str> = line.split(',').collect();
        if fields.len() > best_col {
            if let (Ok(g), Ok(b)) = (fields[0].parse::<f64>(), fields[best_col].parse::<f64>()) {
                if b.is_finite() {
                    gens.push(g);
                    bests.push(b);
                }
            }
        }
    }
    let panel2_x = MARGIN + PANEL + 60.0;
    svg.push_str(&panel_frame(
        panel2_x,
        MARGIN,
        PANEL,
        PANEL - 100.0,
        &format!("Best objective {obj_i} by generation"),
    ));
    if !gens.is_empty() {
        let (gx0, gx1) = padded_range(&gens);
        let (gy0, gy1) = padded_range(&bests);
        let points: Vec<String> = gens
            .iter()
            .zip(&bests)
            .map(|(g, b)| {
                let px = panel2_x + (g - gx0) / (gx1 - gx0) * PANEL;
                let py = MARGIN + (PANEL - 100.0) * (1.0 - (b - gy0) / (gy1 - gy0));
                format!("{px:.2},{py:.2}")
            })
            .collect();
        svg.push_str(&format!(
            "<polyline points=\"{}\" fill=\"none\" stroke=\"#b2182b\" stroke-width=\"2\"/>\n",
            points.join(" ")
        ));
    }
    svg.push_str("</svg>\n");
    Ok(svg)
}

fn padded_range(values: &[f64]) -> (f64, f64) {
    let lo = values.iter().cloned().fold(f64::INFINITY, f64::min);
    let hi = values.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    if !lo.is_finite() || !hi.is_finite() {
        return (0.0, 1.0);
    }
    if lo == hi {
        (lo - 0.5, hi + 0.5)
    } else {
        let pad = (hi - lo) * 0.05;
        (lo - pad, hi + pad)
    }
}

fn panel_frame(x: f64, y: f64, w: f64, h: f64, title: &str) -> String {
    format!(
        "<rect x=\"{x}\" y=\"{y}\" width=\"{w}\" height=\"{h}\" fill=\"none\" stroke=\"#333\"/>\n\
         <text x=\"{tx}\" y=\"{ty}\" font-family=\"sans-serif\" font-size=\"14\" text-anchor=\"middle\">{title}</text>\n",
        tx = x + w / 2.0,
        ty = y - 10.0,
    )
}
