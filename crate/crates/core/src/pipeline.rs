//! Turning labelled binary dynamics into feature vectors: time binning,
//! active-subgraph extraction, numerical featurisation, neighbourhood
//! selection, filtration layers and the validation-experiment variants.

use std::collections::BTreeMap;
use std::io::{BufRead, BufWriter, Write};
use std::path::Path;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::digraph::{Digraph, Neighbourhood, VertexSet};
use crate::error::{Error, Result};
use crate::params::{evaluate, EvalTarget, ParameterCode};
use crate::real::Real;

/// One labelled trial: spike events `(vertex, time in ms)` on a shared graph.
#[derive(Clone, Debug, PartialEq)]
pub struct Trial<T: Real> {
    pub id: u64,
    pub label: u32,
    pub spikes: Vec<(u32, T)>,
}

/// A set of labelled trials over one ambient digraph.
#[derive(Clone, Debug, PartialEq)]
pub struct BinaryDynamicsSet<T: Real> {
    pub n_vertices: usize,
    pub trials: Vec<Trial<T>>,
}

impl<T: Real> BinaryDynamicsSet<T> {
    /// Distinct labels, ascending.
    pub fn labels(&self) -> Vec<u32> {
        let mut out: Vec<u32> = self.trials.iter().map(|t| t.label).collect();
        out.sort_unstable();
        out.dedup();
        out
    }
}

/// A uniform partition of `[start, end]` into `bins` sub-intervals.
///
/// Bins are half-open `[a + (k-1)d, a + kd)` with the final bin closed on the
/// right, so every spike lands in at most one bin.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BinSpec<T: Real> {
    start: T,
    end: T,
    bins: usize,
}

impl<T: Real> BinSpec<T> {
    pub fn new(start: T, end: T, bins: usize) -> Result<BinSpec<T>> {
        if !(start < end) {
            return Err(Error::Validation(format!(
                "bin interval start {:?} must precede end {:?}",
                start.to_f64(),
                end.to_f64()
            )));
        }
        if bins == 0 {
            return Err(Error::Validation("at least one bin is required".into()));
        }
        Ok(BinSpec { start, end, bins })
    }

    pub fn start(&self) -> T {
        self.start
    }

    pub fn end(&self) -> T {
        self.end
    }

    pub fn bins(&self) -> usize {
        self.bins
    }

    pub fn delta(&self) -> T {
        (self.end - self.start) / T::from_usize(self.bins).expect("bin count fits scalar")
    }

    /// Which bin a spike time falls in, if any.
    pub fn bin_of(&self, t: T) -> Option<usize> {
        if t < self.start || t > self.end {
            return None;
        }
        if t == self.end {
            return Some(self.bins - 1);
        }
        let idx = ((t - self.start) / self.delta()).floor();
        let idx = idx.to_usize().unwrap_or(0);
        Some(idx.min(self.bins - 1))
    }
}

/// Per-trial feature matrix: one row per selected subgraph, one column per
/// time bin.
#[derive(Clone, Debug, PartialEq)]
pub struct FeatureMatrix<T: Real> {
    pub label: u32,
    pub trial_id: u64,
    pub selection_code: Option<ParameterCode>,
    pub feature_code: Option<ParameterCode>,
    n_rows: usize,
    n_bins: usize,
    values: Vec<T>,
}

impl<T: Real> FeatureMatrix<T> {
    pub fn n_rows(&self) -> usize {
        self.n_rows
    }

    pub fn n_bins(&self) -> usize {
        self.n_bins
    }

    pub fn get(&self, row: usize, bin: usize) -> T {
        self.values[row * self.n_bins + bin]
    }

    /// Vector summary: the matrix columns concatenated bin by bin, giving a
    /// vector of length `rows * bins`.
    pub fn flatten(&self) -> Vec<T> {
        let mut out = Vec::with_capacity(self.values.len());
        for bin in 0..self.n_bins {
            for row in 0..self.n_rows {
                out.push(self.get(row, bin));
            }
        }
        out
    }
}

/// Which end of the ranked vertex list selection takes.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SelectionEnd {
    Top,
    Bottom,
}

impl std::str::FromStr for SelectionEnd {
    type Err = Error;

    fn from_str(s: &str) -> Result<SelectionEnd> {
        match s {
            "top" => Ok(SelectionEnd::Top),
            "bottom" => Ok(SelectionEnd::Bottom),
            other => Err(Error::Validation(format!(
                "selection end must be 'top' or 'bottom', got '{other}'"
            ))),
        }
    }
}

/// Scores every vertex's closed neighbourhood by `code` and returns
/// `(vertex, value)` sorted for the requested end, ties broken by ascending
/// vertex id.
pub fn rank_vertices<T: Real>(
    g: &Digraph,
    code: ParameterCode,
    end: SelectionEnd,
) -> Result<Vec<(u32, T)>> {
    let mut scored: Vec<(u32, T)> = (0..g.n_vertices() as u32)
        .into_par_iter()
        .map(|v| {
            let nb = g.closed_neighbourhood(v)?;
            let value = evaluate(code, EvalTarget::selection(&nb))?;
            Ok((v, value))
        })
        .collect::<Result<_>>()?;
    match end {
        SelectionEnd::Top => scored.sort_by(|a, b| {
            b.1.partial_cmp(&a.1)
                .expect("parameter values are finite")
                .then(a.0.cmp(&b.0))
        }),
        SelectionEnd::Bottom => scored.sort_by(|a, b| {
            a.1.partial_cmp(&b.1)
                .expect("parameter values are finite")
                .then(a.0.cmp(&b.0))
        }),
    }
    Ok(scored)
}

/// The `m` neighbourhoods whose centres score highest (or lowest) under the
/// selection code.
pub fn select_neighbourhoods<T: Real>(
    g: &Digraph,
    code: ParameterCode,
    m: usize,
    end: SelectionEnd,
) -> Result<Vec<Neighbourhood>> {
    if m > g.n_vertices() {
        return Err(Error::Validation(format!(
            "cannot select {m} neighbourhoods from {} vertices",
            g.n_vertices()
        )));
    }
    let ranked = rank_vertices::<T>(g, code, end)?;
    ranked[..m]
        .iter()
        .map(|&(v, _)| g.closed_neighbourhood(v))
        .collect()
}

/// Vertices active in each bin: those with at least one spike inside it.
pub fn active_states<T: Real>(trial: &Trial<T>, bins: &BinSpec<T>) -> Vec<VertexSet> {
    let mut per_bin: Vec<Vec<u32>> = vec![Vec::new(); bins.bins()];
    for &(v, t) in &trial.spikes {
        if let Some(k) = bins.bin_of(t) {
            per_bin[k].push(v);
        }
    }
    per_bin.into_iter().map(VertexSet::from_unsorted).collect()
}

/// Featurises one trial over the selected subgraphs: entry `(m, k)` is the
/// feature parameter applied to the subgraph of neighbourhood `m` induced by
/// the vertices active in bin `k`.
pub fn featurise<T: Real>(
    trial: &Trial<T>,
    neighbourhoods: &[Neighbourhood],
    bins: &BinSpec<T>,
    feature_code: ParameterCode,
) -> Result<FeatureMatrix<T>> {
    if neighbourhoods.is_empty() {
        return Err(Error::Validation("no neighbourhoods selected".into()));
    }
    let active = active_states(trial, bins);
    let mut values = Vec::with_capacity(neighbourhoods.len() * bins.bins());
    for nb in neighbourhoods {
        for act in &active {
            values.push(feature_entry(nb, act, feature_code)?);
        }
    }
    Ok(FeatureMatrix {
        label: trial.label,
        trial_id: trial.id,
        selection_code: None,
        feature_code: Some(feature_code),
        n_rows: neighbourhoods.len(),
        n_bins: bins.bins(),
        values,
    })
}

fn feature_entry<T: Real>(
    nb: &Neighbourhood,
    active: &VertexSet,
    feature_code: ParameterCode,
) -> Result<T> {
    let local_active: Vec<u32> = nb
        .members()
        .iter()
        .filter(|&v| active.contains(v))
        .map(|v| nb.local_index(v).expect("member has a local index") as u32)
        .collect();
    let centre_local = nb.centre_local() as u32;
    let centre_pos = local_active.binary_search(&centre_local).ok();
    let local_set = VertexSet::from_sorted(local_active);
    let sub = nb.graph().induced_subgraph(&local_set)?;
    evaluate(
        feature_code,
        EvalTarget {
            graph: &sub,
            centre: centre_pos,
        },
    )
}

/// Featurises every trial; deterministic and parallel over trials.
pub fn featurise_set<T: Real>(
    set: &BinaryDynamicsSet<T>,
    neighbourhoods: &[Neighbourhood],
    bins: &BinSpec<T>,
    feature_code: ParameterCode,
    selection_code: Option<ParameterCode>,
) -> Result<Vec<FeatureMatrix<T>>> {
    let mut out: Vec<FeatureMatrix<T>> = set
        .trials
        .par_iter()
        .map(|t| featurise(t, neighbourhoods, bins, feature_code))
        .collect::<Result<_>>()?;
    for m in &mut out {
        m.selection_code = selection_code;
    }
    Ok(out)
}

/// A filtration layer: the subgraph spanned by the union of closed
/// neighbourhoods of the highest-ranked vertices, with its ambient vertex
/// set retained.
#[derive(Clone, Debug)]
pub struct FiltrationLayer {
    pub vertices: VertexSet,
    pub graph: Digraph,
}

/// The `n`-th filtration layer for a vertex ordering.
///
/// `order` lists all vertices from lowest to highest rank; layer `n` is
/// induced on the union of closed neighbourhoods of the top `n + 1` vertices.
pub fn build_filtration_layer(g: &Digraph, order: &[u32], n: usize) -> Result<FiltrationLayer> {
    g.check_permutation(order)?;
    if n >= order.len() {
        return Err(Error::Validation(format!(
            "layer index {n} out of range for {} vertices",
            order.len()
        )));
    }
    let top = &order[order.len() - 1 - n..];
    let mut members: Vec<u32> = Vec::new();
    for &v in top {
        members.push(v);
        members.extend(g.in_neighbours(v).iter().chain(g.out_neighbours(v)));
    }
    let vertices = VertexSet::from_unsorted(members);
    let graph = g.induced_subgraph(&vertices)?;
    Ok(FiltrationLayer { vertices, graph })
}

/// `m` uniformly random distinct centres.
pub fn random_centres(g: &Digraph, m: usize, seed: u64) -> Result<Vec<u32>> {
    if m > g.n_vertices() {
        return Err(Error::Validation(format!(
            "cannot pick {m} centres from {} vertices",
            g.n_vertices()
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut ids: Vec<u32> = (0..g.n_vertices() as u32).collect();
    ids.shuffle(&mut rng);
    let mut chosen = ids[..m].to_vec();
    chosen.sort_unstable();
    Ok(chosen)
}

/// Control subgraphs with the same vertex count as the real neighbourhoods:
/// for a centre with `d` distinct neighbours, `d` random other vertices plus
/// the centre, induced.
pub fn degree_matched_subgraphs(
    g: &Digraph,
    centres: &[u32],
    seed: u64,
) -> Result<Vec<Neighbourhood>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    centres
        .iter()
        .map(|&c| {
            g.check_vertex(c)?;
            let d = g.open_neighbours(c).len();
            let mut others: Vec<u32> = (0..g.n_vertices() as u32).filter(|&v| v != c).collect();
            others.shuffle(&mut rng);
            let mut members: Vec<u32> = others[..d].to_vec();
            members.push(c);
            Neighbourhood::induced(g, c, VertexSet::from_unsorted(members))
        })
        .collect()
}

/// Rewires each centre's connections and re-extracts its neighbourhood in
/// the modified graph. Returns the new ambient graph with the neighbourhoods.
pub fn fake_neighbourhoods(
    g: &Digraph,
    centres: &[u32],
    seed: u64,
) -> Result<(Digraph, Vec<Neighbourhood>)> {
    let centre_set: VertexSet = centres.iter().copied().collect();
    let rewired = g.fake_neighbourhood_rewire(&centre_set, seed)?;
    let nbs = centres
        .iter()
        .map(|&c| rewired.closed_neighbourhood(c))
        .collect::<Result<Vec<_>>>()?;
    Ok((rewired, nbs))
}

/// Binary centre-firing features: entry `(j, k)` is one exactly when centre
/// `j` fired during bin `k`. Same vector layout as the full featurisation.
pub fn centres_only_features<T: Real>(
    set: &BinaryDynamicsSet<T>,
    centres: &[u32],
    bins: &BinSpec<T>,
) -> Vec<FeatureMatrix<T>> {
    set.trials
        .iter()
        .map(|trial| {
            let active = active_states(trial, bins);
            let mut values = Vec::with_capacity(centres.len() * bins.bins());
            for &c in centres {
                for act in &active {
                    values.push(if act.contains(c) { T::one() } else { T::zero() });
                }
            }
            FeatureMatrix {
                label: trial.label,
                trial_id: trial.id,
                selection_code: None,
                feature_code: None,
                n_rows: centres.len(),
                n_bins: bins.bins(),
                values,
            }
        })
        .collect()
}

/// A relabelling of vertex ids applied to spike trains.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SpikePermutation {
    map: Vec<u32>,
}

impl SpikePermutation {
    pub fn identity(n: usize) -> SpikePermutation {
        SpikePermutation {
            map: (0..n as u32).collect(),
        }
    }

    pub fn random(n: usize, seed: u64) -> SpikePermutation {
        let mut map: Vec<u32> = (0..n as u32).collect();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        map.shuffle(&mut rng);
        SpikePermutation { map }
    }

    pub fn from_map(map: Vec<u32>) -> Result<SpikePermutation> {
        let mut seen = vec![false; map.len()];
        for &v in &map {
            if v as usize >= map.len() || seen[v as usize] {
                return Err(Error::Validation("not a permutation".into()));
            }
            seen[v as usize] = true;
        }
        Ok(SpikePermutation { map })
    }

    pub fn image(&self, v: u32) -> u32 {
        self.map[v as usize]
    }

    pub fn as_slice(&self) -> &[u32] {
        &self.map
    }

    pub fn inverse(&self) -> SpikePermutation {
        let mut inv = vec![0u32; self.map.len()];
        for (v, &w) in self.map.iter().enumerate() {
            inv[w as usize] = v as u32;
        }
        SpikePermutation { map: inv }
    }

    /// Relabels every spike's vertex id; times and labels are untouched.
    pub fn apply<T: Real>(&self, set: &BinaryDynamicsSet<T>) -> Result<BinaryDynamicsSet<T>> {
        if self.map.len() != set.n_vertices {
            return Err(Error::Validation(format!(
                "permutation on {} ids applied to {} vertices",
                self.map.len(),
                set.n_vertices
            )));
        }
        Ok(BinaryDynamicsSet {
            n_vertices: set.n_vertices,
            trials: set
                .trials
                .iter()
                .map(|t| Trial {
                    id: t.id,
                    label: t.label,
                    spikes: t.spikes.iter().map(|&(v, tm)| (self.image(v), tm)).collect(),
                })
                .collect(),
        })
    }

    /// Writes `vertex,image` rows for the permutation and its inverse.
    pub fn write_csv<P: AsRef<Path>>(&self, path: P) -> Result<()> {
        let mut w = BufWriter::new(std::fs::File::create(path)?);
        writeln!(w, "vertex,sigma,sigma_inv")?;
        let inv = self.inverse();
        for v in 0..self.map.len() {
            writeln!(w, "{},{},{}", v, self.map[v], inv.map[v])?;
        }
        w.flush()?;
        Ok(())
    }
}

/// Writes the spike CSV format: header `trial,label,vertex,time_ms`.
pub fn write_spikes_csv<T: Real, P: AsRef<Path>>(set: &BinaryDynamicsSet<T>, path: P) -> Result<()> {
    let mut w = BufWriter::new(std::fs::File::create(path)?);
    writeln!(w, "trial,label,vertex,time_ms")?;
    for trial in &set.trials {
        for &(v, t) in &trial.spikes {
            writeln!(w, "{},{},{},{}", trial.id, trial.label, v, t.as_f64())?;
        }
    }
    w.flush()?;
    Ok(())
}

/// Reads the spike CSV format. Trials need not be contiguous; they come back
/// sorted by trial id with spike order preserved. Vertex ids are checked
/// against `n_vertices` when given, otherwise inferred as max id plus one.
///
/// The format carries one row per spike, so a trial with no spikes at all
/// has no representation and will be absent after a write/read round trip.
pub fn read_spikes_csv<T: Real, P: AsRef<Path>>(
    path: P,
    n_vertices: Option<usize>,
) -> Result<BinaryDynamicsSet<T>> {
    let reader = std::io::BufReader::new(std::fs::File::open(path)?);
    let mut trials: BTreeMap<u64, Trial<T>> = BTreeMap::new();
    let mut max_vertex = 0u32;
    for (idx, line) in reader.lines().enumerate() {
        let line_no = idx + 1;
        let raw = line?;
        let line = raw.trim();
        if line.is_empty() {
            continue;
        }
        if line_no == 1 && line.starts_with("trial") {
            continue;
        }
        let fields: Vec<&str> = line.split(',').map(str::trim).collect();
        if fields.len() != 4 {
            return Err(Error::Parse {
                line: line_no,
                msg: format!("expected 4 fields, got {}", fields.len()),
            });
        }
        let id: u64 = parse_field(fields[0], line_no, "trial")?;
        let label: u32 = parse_field(fields[1], line_no, "label")?;
        let vertex: u32 = parse_field(fields[2], line_no, "vertex")?;
        let time: f64 = parse_field(fields[3], line_no, "time_ms")?;
        if time < 0.0 || !time.is_finite() {
            return Err(Error::Parse {
                line: line_no,
                msg: format!("spike time {time} must be finite and non-negative"),
            });
        }
        if let Some(n) = n_vertices {
            if vertex as usize >= n {
                return Err(Error::VertexRange {
                    vertex: vertex as u64,
                    n_vertices: n,
                });
            }
        }
        max_vertex = max_vertex.max(vertex);
        let trial = trials.entry(id).or_insert_with(|| Trial {
            id,
            label,
            spikes: Vec::new(),
        });
        if trial.label != label {
            return Err(Error::Parse {
                line: line_no,
                msg: format!("trial {id} has conflicting labels {} and {label}", trial.label),
            });
        }
        trial.spikes.push((vertex, T::of(time)));
    }
    let n = n_vertices.unwrap_or(if trials.is_empty() { 0 } else { max_vertex as usize + 1 });
    Ok(BinaryDynamicsSet {
        n_vertices: n,
        trials: trials.into_values().collect(),
    })
}

fn parse_field<V: std::str::FromStr>(s: &str, line: usize, what: &str) -> Result<V>
where
    V::Err: std::fmt::Display,
{
    s.parse().map_err(|e| Error::Parse {
        line,
        msg: format!("invalid {what} '{s}': {e}"),
    })
}

/// Writes the feature CSV: one row per trial, `label,v_1,...,v_F`.
pub fn write_features_csv<T: Real, P: AsRef<Path>>(
    matrices: &[FeatureMatrix<T>],
    path: P,
) -> Result<()> {
    let mut w = BufWriter::new(std::fs::File::create(path)?);
    let width = matrices.first().map_or(0, |m| m.n_rows() * m.n_bins());
    let header: Vec<String> = std::iter::once("label".to_string())
        .chain((1..=width).map(|i| format!("v_{i}")))
        .collect();
    writeln!(w, "{}", header.join(","))?;
    for m in matrices {
        let mut row = vec![m.label.to_string()];
        row.extend(m.flatten().iter().map(|v| format!("{}", v.as_f64())));
        writeln!(w, "{}", row.join(","))?;
    }
    w.flush()?;
    Ok(())
}

/// Reads the feature CSV back as `(rows, labels)`.
pub fn read_features_csv<T: Real, P: AsRef<Path>>(path: P) -> Result<(Vec<Vec<T>>, Vec<u32>)> {
    let reader = std::io::BufReader::new(std::fs::File::open(path)?);
    let mut rows = Vec::new();
    let mut labels = Vec::new();
    for (idx, line) in reader.lines().enumerate() {
        let line_no = idx + 1;
        let raw = line?;
        let line = raw.trim();
        if line.is_empty() || (line_no == 1 && line.starts_with("label")) {
            continue;
        }
        let mut fields = line.split(',');
        let label: u32 = parse_field(fields.next().unwrap_or(""), line_no, "label")?;
        let row: Vec<T> = fields
            .map(|f| parse_field::<f64>(f.trim(), line_no, "feature").map(T::of))
            .collect::<Result<_>>()?;
        labels.push(label);
        rows.push(row);
    }
    Ok((rows, labels))
}
