//! Subcommand implementations.

use std::io::Write;
use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use rayon::prelude::*;
use serde::Serialize;

use nbhd_core::classify::{
    cross_validate, evaluate, nearest_centroid, split, train_svm, Dataset, Gamma,
};
use nbhd_core::digraph::Digraph;
use nbhd_core::params::{evaluate as eval_param, registry, EvalTarget, ParameterCode};
use nbhd_core::pipeline::{
    centres_only_features, degree_matched_subgraphs, fake_neighbourhoods, featurise_set,
    random_centres, rank_vertices, read_features_csv, read_spikes_csv, select_neighbourhoods,
    write_features_csv, write_spikes_csv, BinSpec, BinaryDynamicsSet, FeatureMatrix, SelectionEnd,
    SpikePermutation,
};
use nbhd_core::simdyn::{erdos_renyi, simulate, LifConfig, StimulusProtocol};
use nbhd_core::Neighbourhood;

use crate::{
    ClassifyArgs, CoverArgs, ExperimentArgs, FeaturizeArgs, ParamsArgs, SelectArgs, SimulateArgs,
    ValidateArgs,
};

/// Parameter registry rendered for `--help`.
pub fn registry_help() -> String {
    let mut out = String::from("Parameter codes (selection and feature):\n");
    for entry in registry() {
        out.push_str(&format!("  {:<10} {}\n", entry.code, entry.description));
    }
    out
}

/// Writes `<path>.meta.json` echoing the command, config and seed.
fn write_sidecar<C: Serialize>(path: &Path, command: &str, config: &C, seed: Option<u64>) -> Result<()> {
    let meta = serde_json::json!({
        "tool": "nbhd",
        "version": env!("CARGO_PKG_VERSION"),
        "command": command,
        "seed": seed,
        "config": config,
    });
    let sidecar = PathBuf::from(format!("{}.meta.json", path.display()));
    std::fs::write(&sidecar, serde_json::to_string_pretty(&meta)?)?;
    Ok(())
}

fn load_graph(path: &str, n_vertices: Option<usize>) -> Result<Digraph> {
    Digraph::load_edge_list(path, n_vertices).with_context(|| format!("loading graph '{path}'"))
}

fn parse_code(s: &str) -> Result<ParameterCode> {
    Ok(s.trim().parse::<ParameterCode>()?)
}

fn parse_codes(s: &str) -> Result<Vec<ParameterCode>> {
    s.split(',')
        .filter(|t| !t.trim().is_empty())
        .map(parse_code)
        .collect()
}

fn parse_end(s: &str) -> Result<SelectionEnd> {
    Ok(s.parse::<SelectionEnd>()?)
}

fn end_name(end: SelectionEnd) -> &'static str {
    match end {
        SelectionEnd::Top => "top",
        SelectionEnd::Bottom => "bottom",
    }
}

pub fn cmd_params(args: ParamsArgs) -> Result<()> {
    if args.list {
        println!("{:<12} description", "code");
        for entry in registry() {
            println!("{:<12} {}", entry.code, entry.description);
        }
        return Ok(());
    }
    let graph_path = args.graph.as_deref().expect("required unless --list");
    let out = PathBuf::from(args.out.as_deref().expect("required unless --list"));
    let codes = parse_codes(args.codes.as_deref().expect("required unless --list"))?;
    if codes.is_empty() {
        bail!("no parameter codes given");
    }
    let g = load_graph(graph_path, args.n_vertices)?;
    let (lo, hi) = match &args.vertex_range {
        None => (0usize, g.n_vertices()),
        Some(r) => {
            let (a, b) = r
                .split_once(':')
                .context("--vertex-range wants start:end")?;
            let lo: usize = a.parse().context("range start")?;
            let hi: usize = b.parse().context("range end")?;
            if lo > hi || hi > g.n_vertices() {
                bail!("vertex range {lo}:{hi} out of bounds for {} vertices", g.n_vertices());
            }
            (lo, hi)
        }
    };

    let rows: Vec<String> = (lo..hi)
        .into_par_iter()
        .map(|v| {
            let nb = g.closed_neighbourhood(v as u32)?;
            let mut cells = vec![v.to_string()];
            for &code in &codes {
                let value: f64 = eval_param(code, EvalTarget::selection(&nb))?;
                cells.push(format!("{value}"));
            }
            Ok(cells.join(","))
        })
        .collect::<nbhd_core::Result<_>>()?;

    let mut w = std::io::BufWriter::new(std::fs::File::create(&out)?);
    let header: Vec<String> = std::iter::once("vertex".to_string())
        .chain(codes.iter().map(|c| c.to_string()))
        .collect();
    writeln!(w, "{}", header.join(","))?;
    for row in rows {
        writeln!(w, "{row}")?;
    }
    w.flush()?;
    write_sidecar(&out, "params", &args, None)?;
    println!(
        "wrote {} rows ({} codes) for vertices {lo}..{hi} of {} to {}",
        hi - lo,
        codes.len(),
        g.n_vertices(),
        out.display()
    );
    Ok(())
}

pub fn cmd_select(args: SelectArgs) -> Result<()> {
    let g = load_graph(&args.graph, args.n_vertices)?;
    let code = parse_code(&args.code)?;
    let end = parse_end(&args.end)?;
    if args.m > g.n_vertices() {
        bail!("cannot select {} of {} vertices", args.m, g.n_vertices());
    }
    let ranked = rank_vertices::<f64>(&g, code, end)?;
    let out = PathBuf::from(&args.out);
    let mut w = std::io::BufWriter::new(std::fs::File::create(&out)?);
    writeln!(w, "rank,vertex,value")?;
    for (rank, (v, value)) in ranked.iter().take(args.m).enumerate() {
        writeln!(w, "{},{},{}", rank + 1, v, value)?;
    }
    w.flush()?;
    write_sidecar(&out, "select", &args, None)?;
    println!(
        "selected {} {} centres by {code} into {}",
        args.m,
        end_name(end),
        out.display()
    );
    Ok(())
}

pub fn cmd_featurize(args: FeaturizeArgs) -> Result<()> {
    let g = load_graph(&args.graph, args.n_vertices)?;
    let set: BinaryDynamicsSet<f64> = read_spikes_csv(&args.spikes, Some(g.n_vertices()))?;
    let selection = parse_code(&args.selection_code)?;
    let feature = parse_code(&args.feature_code)?;
    let end = parse_end(&args.end)?;
    let bins = BinSpec::new(args.bin_start, args.bin_end, args.bins)?;
    let nbs = select_neighbourhoods::<f64>(&g, selection, args.m, end)?;
    let mats = featurise_set(&set, &nbs, &bins, feature, Some(selection))?;
    let out = PathBuf::from(&args.out);
    write_features_csv(&mats, &out)?;
    write_sidecar(&out, "featurize", &args, None)?;
    println!(
        "featurized {} trials x {} neighbourhoods x {} bins into {}",
        mats.len(),
        args.m,
        args.bins,
        out.display()
    );
    Ok(())
}

pub fn cmd_simulate(args: SimulateArgs) -> Result<()> {
    let dir = PathBuf::from(&args.out_dir);
    std::fs::create_dir_all(&dir)?;
    let g = erdos_renyi(args.n, args.p, args.seed);
    let mut proto = StimulusProtocol::<f64>::new(args.classes, args.repeats)
        .with_random_receptors(args.n, args.receptors_per_class, args.seed.wrapping_add(1))?;
    proto.window_ms = args.window_ms;
    proto.stim_duration_ms = args.stim_duration_ms;
    proto.onset_jitter_ms = args.onset_jitter_ms;
    proto.noise_strength = args.noise_strength;
    proto.exclusion_ms = args.exclusion_ms;
    proto.strength_range = (args.strength_min, args.strength_max);
    let lif = LifConfig::<f64>::for_density(args.n, args.p);
    let set = simulate(&g, &proto, &lif, args.seed.wrapping_add(2))?;

    let graph_path = dir.join("graph.edges");
    g.write_edge_list(&graph_path)?;
    write_sidecar(&graph_path, "simulate", &args, Some(args.seed))?;
    let spikes_path = dir.join("spikes.csv");
    write_spikes_csv(&set, &spikes_path)?;
    write_sidecar(&spikes_path, "simulate", &args, Some(args.seed))?;
    let proto_path = dir.join("protocol.json");
    let provenance = serde_json::json!({
        "protocol": proto,
        "lif": lif,
        "graph_seed": args.seed,
        "receptor_seed": args.seed.wrapping_add(1),
        "dynamics_seed": args.seed.wrapping_add(2),
        "n_vertices": args.n,
        "edge_probability": args.p,
    });
    std::fs::write(&proto_path, serde_json::to_string_pretty(&provenance)?)?;
    let spikes: usize = set.trials.iter().map(|t| t.spikes.len()).sum();
    println!(
        "simulated {} trials ({} spikes) on {} vertices / {} edges into {}",
        set.trials.len(),
        spikes,
        g.n_vertices(),
        g.n_edges(),
        dir.display()
    );
    Ok(())
}

/// Classification summary for one dataset.
#[derive(Serialize)]
struct ClassificationOutcome {
    accuracy: f64,
    classes: Vec<u32>,
    per_class: Vec<f64>,
    confusion: Vec<Vec<usize>>,
    cv_folds: Vec<f64>,
    cv_mean: f64,
    cv_min: f64,
    cv_max: f64,
    baseline_accuracy: f64,
}

fn classify_dataset(
    ds: &Dataset<f64>,
    train_fraction: f64,
    folds: usize,
    seed: u64,
) -> Result<ClassificationOutcome> {
    let (train, test) = split(ds, train_fraction, seed)?;
    let model = train_svm(&train, 1.0, Gamma::Scale)?;
    let report = evaluate(&model, &test)?;
    let cv = cross_validate(ds, folds, seed.wrapping_add(1))?;
    let baseline = nearest_centroid(&train, &test)?;
    Ok(ClassificationOutcome {
        accuracy: report.accuracy,
        classes: report.classes,
        per_class: report.per_class,
        confusion: report.confusion,
        cv_folds: cv.fold_accuracies,
        cv_mean: cv.mean,
        cv_min: cv.min,
        cv_max: cv.max,
        baseline_accuracy: baseline.accuracy,
    })
}

fn features_to_dataset(mats: &[FeatureMatrix<f64>]) -> Result<Dataset<f64>> {
    let rows: Vec<Vec<f64>> = mats.iter().map(|m| m.flatten()).collect();
    let labels: Vec<u32> = mats.iter().map(|m| m.label).collect();
    Ok(Dataset::new(rows, labels)?)
}

pub fn cmd_classify(args: ClassifyArgs) -> Result<()> {
    let (rows, labels) = read_features_csv::<f64, _>(&args.features)?;
    let ds = Dataset::new(rows, labels)?;
    let outcome = classify_dataset(&ds, args.train_fraction, args.folds, args.seed)?;
    let out = PathBuf::from(&args.out);
    std::fs::write(&out, serde_json::to_string_pretty(&outcome)?)?;
    write_sidecar(&out, "classify", &args, Some(args.seed))?;
    println!(
        "accuracy {:.4} (cv mean {:.4}, range {:.4}..{:.4}, centroid baseline {:.4}) -> {}",
        outcome.accuracy,
        outcome.cv_mean,
        outcome.cv_min,
        outcome.cv_max,
        outcome.baseline_accuracy,
        out.display()
    );
    Ok(())
}

pub fn cmd_cover(args: CoverArgs) -> Result<()> {
    let g = load_graph(&args.graph, args.n_vertices)?;
    let code = parse_code(&args.code)?;
    let end = parse_end(&args.end)?;
    let ranked = rank_vertices::<f64>(&g, code, end)?;
    let order: Vec<u32> = ranked.iter().map(|&(v, _)| v).collect();
    let count = g.greedy_cover_count(&order, args.fraction)?;
    let result = serde_json::json!({
        "code": code.to_string(),
        "end": end_name(end),
        "fraction": args.fraction,
        "n_vertices": g.n_vertices(),
        "centres_required": count,
    });
    println!("{}", serde_json::to_string_pretty(&result)?);
    if let Some(out) = &args.out {
        let out = PathBuf::from(out);
        std::fs::write(&out, serde_json::to_string_pretty(&result)?)?;
        write_sidecar(&out, "cover", &args, None)?;
    }
    Ok(())
}

/// One (selection, end, feature) cell of an experiment grid.
#[derive(Serialize)]
struct GridCell {
    selection: String,
    end: String,
    feature: String,
    features_csv: String,
    #[serde(flatten)]
    outcome: ClassificationOutcome,
}

#[derive(Serialize)]
struct RandomSelectionCell {
    feature: String,
    accuracies: Vec<f64>,
    mean: f64,
    min: f64,
    max: f64,
}

struct ExperimentInput {
    graph: Digraph,
    set: BinaryDynamicsSet<f64>,
}

fn experiment_input(args: &ExperimentArgs, dir: &Path) -> Result<ExperimentInput> {
    if args.simulate {
        let sim_args = SimulateArgs {
            n: args.sim.sim_n,
            p: args.sim.sim_p,
            classes: args.sim.sim_classes,
            repeats: args.sim.sim_repeats,
            receptors_per_class: args.sim.sim_receptors,
            window_ms: 200.0,
            stim_duration_ms: 5.0,
            onset_jitter_ms: 10.0,
            noise_strength: 3.0,
            exclusion_ms: 10.0,
            strength_min: 1.0,
            strength_max: 2.0,
            seed: args.seed,
            out_dir: dir.display().to_string(),
        };
        cmd_simulate(sim_args)?;
        let graph = Digraph::load_edge_list(dir.join("graph.edges"), None)?;
        let set = read_spikes_csv(dir.join("spikes.csv"), Some(graph.n_vertices()))?;
        Ok(ExperimentInput { graph, set })
    } else {
        let graph = load_graph(args.graph.as_deref().expect("required"), args.n_vertices)?;
        let set = read_spikes_csv(
            args.spikes.as_deref().expect("required"),
            Some(graph.n_vertices()),
        )?;
        Ok(ExperimentInput { graph, set })
    }
}

fn parse_ends(s: &str) -> Result<Vec<SelectionEnd>> {
    match s {
        "both" => Ok(vec![SelectionEnd::Top, SelectionEnd::Bottom]),
        other => Ok(vec![parse_end(other)?]),
    }
}

#[allow(clippy::too_many_arguments)]
fn run_grid_cell(
    dir: &Path,
    set: &BinaryDynamicsSet<f64>,
    nbs: &[Neighbourhood],
    bins: &BinSpec<f64>,
    selection: ParameterCode,
    end: SelectionEnd,
    feature: ParameterCode,
    mode_tag: &str,
    train_fraction: f64,
    folds: usize,
    seed: u64,
) -> Result<GridCell> {
    let mats = featurise_set(set, nbs, bins, feature, Some(selection))?;
    let name = format!("features_{mode_tag}{selection}_{}_{feature}.csv", end_name(end));
    let csv_path = dir.join(&name);
    write_features_csv(&mats, &csv_path)?;
    let ds = features_to_dataset(&mats)?;
    let outcome = classify_dataset(&ds, train_fraction, folds, seed)?;
    Ok(GridCell {
        selection: selection.to_string(),
        end: end_name(end).to_string(),
        feature: feature.to_string(),
        features_csv: name,
        outcome,
    })
}

pub fn cmd_experiment(args: ExperimentArgs) -> Result<()> {
    let dir = PathBuf::from(&args.out_dir);
    std::fs::create_dir_all(&dir)?;
    let input = experiment_input(&args, &dir)?;
    let g = &input.graph;
    let set = &input.set;
    let selection_codes = parse_codes(&args.selection_codes)?;
    let feature_codes = parse_codes(&args.feature_codes)?;
    if selection_codes.is_empty() || feature_codes.is_empty() {
        bail!("need at least one selection and one feature code");
    }
    let ends = parse_ends(&args.end)?;
    let bins = BinSpec::new(args.bin_start, args.bin_end, args.bins)?;

    let mut results: Vec<serde_json::Value> = Vec::new();
    match args.validation.as_deref() {
        None => {
            for &end in &ends {
                for &selection in &selection_codes {
                    let nbs = select_neighbourhoods::<f64>(g, selection, args.m, end)?;
                    for &feature in &feature_codes {
                        let cell = run_grid_cell(
                            &dir, set, &nbs, &bins, selection, end, feature, "",
                            args.train_fraction, args.folds, args.seed,
                        )?;
                        println!(
                            "{} {} / {}: accuracy {:.4} (cv {:.4}..{:.4})",
                            cell.end, cell.selection, cell.feature,
                            cell.outcome.accuracy, cell.outcome.cv_min, cell.outcome.cv_max
                        );
                        results.push(serde_json::to_value(&cell)?);
                    }
                }
            }
        }
        Some(mode) => {
            let cells = run_validation_mode(
                &dir, g, set, mode, &selection_codes, &feature_codes, &ends, &bins, &args,
            )?;
            results.extend(cells);
        }
    }

    let report = serde_json::json!({
        "command": "experiment",
        "validation": args.validation,
        "config": &args,
        "results": results,
    });
    let report_path = dir.join("report.json");
    std::fs::write(&report_path, serde_json::to_string_pretty(&report)?)?;
    write_sidecar(&report_path, "experiment", &args, Some(args.seed))?;
    println!("report -> {}", report_path.display());
    Ok(())
}

#[allow(clippy::too_many_arguments)]
fn run_validation_mode(
    dir: &Path,
    g: &Digraph,
    set: &BinaryDynamicsSet<f64>,
    mode: &str,
    selection_codes: &[ParameterCode],
    feature_codes: &[ParameterCode],
    ends: &[SelectionEnd],
    bins: &BinSpec<f64>,
    args: &ExperimentArgs,
) -> Result<Vec<serde_json::Value>> {
    let mut results = Vec::new();
    match mode {
        "random-selection" => {
            // Selection parameters do not apply; centres are uniform draws.
            for &feature in feature_codes {
                let mut accuracies = Vec::with_capacity(args.iterations);
                for iter in 0..args.iterations {
                    let centres = random_centres(g, args.m, args.seed.wrapping_add(iter as u64))?;
                    let nbs: Vec<Neighbourhood> = centres
                        .iter()
                        .map(|&c| g.closed_neighbourhood(c))
                        .collect::<nbhd_core::Result<_>>()?;
                    let mats = featurise_set(set, &nbs, bins, feature, None)?;
                    if iter == 0 {
                        let csv = dir.join(format!("features_random_{feature}_iter0.csv"));
                        write_features_csv(&mats, &csv)?;
                    }
                    let ds = features_to_dataset(&mats)?;
                    let outcome =
                        classify_dataset(&ds, args.train_fraction, args.folds, args.seed)?;
                    accuracies.push(outcome.accuracy);
                }
                let mean = accuracies.iter().sum::<f64>() / accuracies.len() as f64;
                let min = accuracies.iter().copied().fold(f64::INFINITY, f64::min);
                let max = accuracies.iter().copied().fold(f64::NEG_INFINITY, f64::max);
                let cell = RandomSelectionCell {
                    feature: feature.to_string(),
                    accuracies,
                    mean,
                    min,
                    max,
                };
                println!(
                    "random selection / {}: mean {:.4} over {} iterations ({:.4}..{:.4})",
                    cell.feature, cell.mean, args.iterations, cell.min, cell.max
                );
                results.push(serde_json::to_value(&cell)?);
            }
        }
        "centres-only" => {
            for &end in ends {
                for &selection in selection_codes {
                    let ranked = rank_vertices::<f64>(g, selection, end)?;
                    let centres: Vec<u32> = ranked[..args.m].iter().map(|&(v, _)| v).collect();
                    let mats = centres_only_features(set, &centres, bins);
                    let name = format!("features_centres_{selection}_{}.csv", end_name(end));
                    write_features_csv(&mats, &dir.join(&name))?;
                    let ds = features_to_dataset(&mats)?;
                    let outcome =
                        classify_dataset(&ds, args.train_fraction, args.folds, args.seed)?;
                    println!(
                        "centres-only {} {}: accuracy {:.4}",
                        end_name(end), selection, outcome.accuracy
                    );
                    results.push(serde_json::json!({
                        "selection": selection.to_string(),
                        "end": end_name(end),
                        "feature": "centre-firing",
                        "features_csv": name,
                        "outcome": outcome,
                    }));
                }
            }
        }
        "degree-matched" => {
            for &end in ends {
                for &selection in selection_codes {
                    let ranked = rank_vertices::<f64>(g, selection, end)?;
                    let centres: Vec<u32> = ranked[..args.m].iter().map(|&(v, _)| v).collect();
                    let nbs = degree_matched_subgraphs(g, &centres, args.seed)?;
                    for &feature in feature_codes {
                        let cell = run_grid_cell(
                            dir, set, &nbs, bins, selection, end, feature, "degmatched_",
                            args.train_fraction, args.folds, args.seed,
                        )?;
                        println!(
                            "degree-matched {} {} / {}: accuracy {:.4}",
                            cell.end, cell.selection, cell.feature, cell.outcome.accuracy
                        );
                        results.push(serde_json::to_value(&cell)?);
                    }
                }
            }
        }
        "fake-neighbourhoods" => {
            for &end in ends {
                for &selection in selection_codes {
                    let ranked = rank_vertices::<f64>(g, selection, end)?;
                    let centres: Vec<u32> = ranked[..args.m].iter().map(|&(v, _)| v).collect();
                    let (rewired, nbs) = fake_neighbourhoods(g, &centres, args.seed)?;
                    rewired.write_edge_list(dir.join(format!(
                        "rewired_{selection}_{}.edges",
                        end_name(end)
                    )))?;
                    for &feature in feature_codes {
                        let cell = run_grid_cell(
                            dir, set, &nbs, bins, selection, end, feature, "fake_",
                            args.train_fraction, args.folds, args.seed,
                        )?;
                        println!(
                            "fake-neighbourhoods {} {} / {}: accuracy {:.4}",
                            cell.end, cell.selection, cell.feature, cell.outcome.accuracy
                        );
                        results.push(serde_json::to_value(&cell)?);
                    }
                }
            }
        }
        "shuffled-activity" => {
            let sigma = SpikePermutation::random(g.n_vertices(), args.seed);
            sigma.write_csv(dir.join("sigma.csv"))?;
            let shuffled = sigma.apply(set)?;
            for &end in ends {
                for &selection in selection_codes {
                    let nbs = select_neighbourhoods::<f64>(g, selection, args.m, end)?;
                    for &feature in feature_codes {
                        let cell = run_grid_cell(
                            dir, &shuffled, &nbs, bins, selection, end, feature, "shuffled_",
                            args.train_fraction, args.folds, args.seed,
                        )?;
                        println!(
                            "shuffled-activity {} {} / {}: accuracy {:.4}",
                            cell.end, cell.selection, cell.feature, cell.outcome.accuracy
                        );
                        results.push(serde_json::to_value(&cell)?);
                    }
                }
            }
        }
        other => bail!(
            "unknown validation mode '{other}' (expected random-selection, centres-only, \
             degree-matched, fake-neighbourhoods or shuffled-activity)"
        ),
    }
    Ok(results)
}

pub fn cmd_validate(args: ValidateArgs) -> Result<()> {
    let dir = PathBuf::from(&args.out_dir);
    std::fs::create_dir_all(&dir)?;
    let baseline_dir = dir.join("baseline");
    let control_dir = dir.join("control");

    let base = ExperimentArgs {
        graph: Some(args.graph.clone()),
        n_vertices: args.n_vertices,
        spikes: Some(args.spikes.clone()),
        simulate: false,
        sim: crate::SimDefaults {
            sim_n: 0,
            sim_p: 0.0,
            sim_classes: 0,
            sim_repeats: 0,
            sim_receptors: 0,
        },
        selection_codes: args.selection_code.clone(),
        feature_codes: args.feature_code.clone(),
        m: args.m,
        end: args.end.clone(),
        bin_start: args.bin_start,
        bin_end: args.bin_end,
        bins: args.bins,
        train_fraction: args.train_fraction,
        folds: args.folds,
        validation: None,
        iterations: args.iterations,
        seed: args.seed,
        out_dir: baseline_dir.display().to_string(),
    };
    cmd_experiment(base)?;

    let control = ExperimentArgs {
        validation: Some(args.mode.clone()),
        out_dir: control_dir.display().to_string(),
        graph: Some(args.graph.clone()),
        n_vertices: args.n_vertices,
        spikes: Some(args.spikes.clone()),
        simulate: false,
        sim: crate::SimDefaults {
            sim_n: 0,
            sim_p: 0.0,
            sim_classes: 0,
            sim_repeats: 0,
            sim_receptors: 0,
        },
        selection_codes: args.selection_code.clone(),
        feature_codes: args.feature_code.clone(),
        m: args.m,
        end: args.end.clone(),
        bin_start: args.bin_start,
        bin_end: args.bin_end,
        bins: args.bins,
        train_fraction: args.train_fraction,
        folds: args.folds,
        iterations: args.iterations,
        seed: args.seed,
    };
    cmd_experiment(control)?;

    let baseline: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(baseline_dir.join("report.json"))?)?;
    let control: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(control_dir.join("report.json"))?)?;
    let comparison = serde_json::json!({
        "command": "validate",
        "mode": args.mode,
        "config": &args,
        "baseline": baseline["results"],
        "control": control["results"],
    });
    let out = dir.join("comparison.json");
    std::fs::write(&out, serde_json::to_string_pretty(&comparison)?)?;
    write_sidecar(&out, "validate", &args, Some(args.seed))?;
    println!("comparison -> {}", out.display());
    Ok(())
}
