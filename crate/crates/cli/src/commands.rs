use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use anyhow::Context;
use hopforge_core::ingest::{
    generate_random_script, generate_scene, parse_tubelets_str, write_tubelets, Tubelet,
};
use hopforge_core::kg::{build_graph, deserialize_graph, serialize_graph, KnowledgeGraph};
use hopforge_core::profile::{evaluate_predictions, parse_predictions, profile_dataset};
use hopforge_core::synth::{
    builtin_templates, parse_dataset, synthesize_dataset, write_dataset, QaSample, Rejection,
    SynthError, SynthesisOutput,
};
use hopforge_core::validate::{validate_dataset, ValidationReport};
use serde::Serialize;
use sha2::{Digest, Sha256};

use crate::config::Config;
use crate::exit::{Failure, OrExit, INFEASIBLE, INPUT, VIOLATIONS};

fn read(path: &Path) -> Result<String, Failure> {
    fs::read_to_string(path)
        .with_context(|| format!("reading {}", path.display()))
        .or_exit(INPUT)
}

fn write(path: &Path, contents: &str) -> Result<(), Failure> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        fs::create_dir_all(dir)
            .with_context(|| format!("creating {}", dir.display()))
            .or_exit(INPUT)?;
    }
    fs::write(path, contents)
        .with_context(|| format!("writing {}", path.display()))
        .or_exit(INPUT)
}

fn to_json<T: Serialize>(value: &T) -> String {
    let mut text = serde_json::to_string_pretty(value).expect("report types serialize");
    text.push('\n');
    text
}

fn sha256_hex(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

fn load_tubelets(path: &Path) -> Result<Vec<Tubelet>, Failure> {
    parse_tubelets_str(&read(path)?)
        .with_context(|| format!("parsing tubelets {}", path.display()))
        .or_exit(INPUT)
}

fn load_graph(path: &Path) -> Result<KnowledgeGraph, Failure> {
    deserialize_graph(&read(path)?)
        .with_context(|| format!("loading graph {}", path.display()))
        .or_exit(INPUT)
}

fn load_dataset(path: &Path) -> Result<Vec<QaSample>, Failure> {
    parse_dataset(&read(path)?)
        .with_context(|| format!("parsing dataset {}", path.display()))
        .or_exit(INPUT)
}

pub struct Scene {
    pub script_json: String,
    pub tubelets: Vec<Tubelet>,
}

pub fn make_scene(config: &Config, seed: u64) -> Result<Scene, Failure> {
    let script = generate_random_script(&config.scene(), seed).or_exit(INPUT)?;
    let tubelets = generate_scene(&script, &config.geometry(), seed).or_exit(INPUT)?;
    Ok(Scene {
        script_json: script.to_json(),
        tubelets,
    })
}

pub fn gen_scene(config: &Config, seed: Option<u64>, out: &Path) -> Result<(), Failure> {
    let seed = config.master_seed(seed)?;
    let scene = make_scene(config, seed)?;
    let script_path = out.join("script.json");
    write(&script_path, &scene.script_json)?;
    write(
        &out.join("tubelets.jsonl"),
        &write_tubelets(&scene.tubelets),
    )?;
    println!("{}", script_path.display());
    Ok(())
}

pub fn graph_from(config: &Config, tubelets: &[Tubelet]) -> Result<KnowledgeGraph, Failure> {
    let graph = build_graph(tubelets, &config.detection()).or_exit(INPUT)?;
    println!(
        "{} nodes, {} edges",
        graph.nodes().len(),
        graph.edges().len()
    );
    Ok(graph)
}

pub fn build_graph_cmd(config: &Config, tubelets: &Path, out: &Path) -> Result<(), Failure> {
    let graph = graph_from(config, &load_tubelets(tubelets)?)?;
    write(out, &serialize_graph(&graph))
}

fn synth_summary(output: &SynthesisOutput) -> String {
    let mut text = String::new();
    for (depth, tally) in &output.tallies {
        let rejected = |why| tally.rejected.get(&why).copied().unwrap_or(0);
        let _ = writeln!(
            text,
            "depth {depth}: accepted {} after {} attempts; rejected empty={} degenerate={} not_minimal={}",
            tally.accepted,
            tally.attempts,
            rejected(Rejection::Empty),
            rejected(Rejection::Degenerate),
            rejected(Rejection::NotMinimal),
        );
    }
    text
}

pub fn synthesize(
    config: &Config,
    graph: &KnowledgeGraph,
    seed: u64,
) -> Result<Vec<QaSample>, Failure> {
    let output = synthesize_dataset(
        graph,
        &config.plan(),
        &builtin_templates(),
        &config.synthesis(seed),
    )
    .map_err(|e| {
        let code = match e {
            SynthError::InsufficientGraph { .. } => INFEASIBLE,
            _ => INPUT,
        };
        Failure::new(code, e)
    })?;
    print!("{}", synth_summary(&output));
    Ok(output.samples)
}

pub fn synth_cmd(
    config: &Config,
    seed: Option<u64>,
    graph: &Path,
    out: &Path,
) -> Result<(), Failure> {
    let seed = config.master_seed(seed)?;
    let samples = synthesize(config, &load_graph(graph)?, seed)?;
    write(out, &write_dataset(&samples))
}

fn report_summary(report: &ValidationReport) -> String {
    let dominance = report
        .diagonal_dominance
        .map_or_else(|| "n/a".to_string(), |d| format!("{d}"));
    format!(
        "{} samples tabulated, diagonal dominance {dominance}, {} violations",
        report.total,
        report.violations.len()
    )
}

pub fn validate(
    config: &Config,
    graph: &KnowledgeGraph,
    samples: &mut [QaSample],
) -> ValidationReport {
    let report = validate_dataset(graph, samples, config.max_depth);
    println!("{}", report_summary(&report));
    report
}

fn violations_failure(report: &ValidationReport) -> Result<(), Failure> {
    if report.violations.is_empty() {
        Ok(())
    } else {
        Err(Failure::new(
            VIOLATIONS,
            anyhow::anyhow!("{} violations found", report.violations.len()),
        ))
    }
}

pub fn validate_cmd(
    config: &Config,
    graph: &Path,
    dataset: &Path,
    out: &Path,
    dataset_out: Option<&Path>,
) -> Result<(), Failure> {
    let graph = load_graph(graph)?;
    let mut samples = load_dataset(dataset)?;
    let report = validate(config, &graph, &mut samples);
    write(out, &to_json(&report))?;
    if let Some(path) = dataset_out {
        write(path, &write_dataset(&samples))?;
    }
    violations_failure(&report)
}

pub fn profile(samples: &[QaSample]) -> Result<String, Failure> {
    Ok(to_json(&profile_dataset(samples).or_exit(INPUT)?))
}

pub fn profile_cmd(dataset: &Path, out: &Path) -> Result<(), Failure> {
    write(out, &profile(&load_dataset(dataset)?)?)
}

pub fn eval_cmd(
    config: &Config,
    dataset: &Path,
    predictions: &Path,
    out: &Path,
) -> Result<(), Failure> {
    let samples = load_dataset(dataset)?;
    let predictions = parse_predictions(&read(predictions)?)
        .with_context(|| format!("parsing predictions {}", predictions.display()))
        .or_exit(INPUT)?;
    let metrics =
        evaluate_predictions(&samples, &predictions, &config.tiou_thresholds).or_exit(INPUT)?;
    println!(
        "mean tIoU {} over {} samples",
        metrics.mean_tiou, metrics.n_scored
    );
    write(out, &to_json(&metrics))
}

#[derive(Serialize)]
struct Artifact {
    name: &'static str,
    path: String,
    sha256: String,
}

#[derive(Serialize)]
struct Manifest {
    master_seed: u64,
    inputs: BTreeMap<&'static str, String>,
    artifacts: Vec<Artifact>,
}

struct RunDir<'a> {
    dir: &'a Path,
    artifacts: Vec<Artifact>,
}

impl RunDir<'_> {
    fn put(&mut self, name: &'static str, file: &str, contents: &str) -> Result<(), Failure> {
        write(&self.dir.join(file), contents)?;
        self.artifacts.push(Artifact {
            name,
            path: file.to_string(),
            sha256: sha256_hex(contents.as_bytes()),
        });
        Ok(())
    }
}

/// The whole pipeline into one directory. The manifest is written even when
/// a stage fails, listing what was produced up to that point.
pub fn run_cmd(
    config: &Config,
    config_path: Option<&Path>,
    seed: Option<u64>,
    tubelets_override: Option<PathBuf>,
    out: &Path,
) -> Result<(), Failure> {
    let seed = config.master_seed(seed)?;
    let mut inputs = BTreeMap::new();
    if let Some(p) = config_path {
        inputs.insert("config", sha256_hex(read(p)?.as_bytes()));
    }
    let mut run = RunDir {
        dir: out,
        artifacts: Vec::new(),
    };
    let outcome = run_stages(
        config,
        seed,
        tubelets_override.or(config.tubelets.clone()),
        &mut inputs,
        &mut run,
    );
    let manifest = Manifest {
        master_seed: seed,
        inputs,
        artifacts: run.artifacts,
    };
    write(&out.join("manifest.json"), &to_json(&manifest))?;
    outcome
}

fn run_stages(
    config: &Config,
    seed: u64,
    tubelets_path: Option<PathBuf>,
    inputs: &mut BTreeMap<&'static str, String>,
    run: &mut RunDir<'_>,
) -> Result<(), Failure> {
    let tubelets = match tubelets_path {
        Some(path) => {
            let text = read(&path)?;
            inputs.insert("tubelets", sha256_hex(text.as_bytes()));
            parse_tubelets_str(&text)
                .with_context(|| format!("parsing tubelets {}", path.display()))
                .or_exit(INPUT)?
        }
        None => {
            let scene = make_scene(config, seed)?;
            write(&run.dir.join("script.json"), &scene.script_json)?;
            inputs.insert("scene_script", sha256_hex(scene.script_json.as_bytes()));
            scene.tubelets
        }
    };
    run.put("tubelets", "tubelets.jsonl", &write_tubelets(&tubelets))?;

    let graph = graph_from(config, &tubelets)?;
    run.put("graph", "graph.json", &serialize_graph(&graph))?;

    let mut samples = synthesize(config, &graph, seed)?;
    let report = validate(config, &graph, &mut samples);
    run.put("dataset", "dataset.jsonl", &write_dataset(&samples))?;
    run.put("report", "report.json", &to_json(&report))?;
    violations_failure(&report)?;

    run.put("stats", "stats.json", &profile(&samples)?)
}
