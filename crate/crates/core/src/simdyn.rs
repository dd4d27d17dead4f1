//! Desk-scale generator of labelled binary dynamics: seeded Erdős–Rényi
//! digraphs driven by a discretized leaky integrate-and-fire network under a
//! repeated-stimulus protocol.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::digraph::{Digraph, VertexSet};
use crate::error::{Error, Result};
use crate::pipeline::{BinaryDynamicsSet, Trial};
use crate::real::Real;

/// Seeded Erdős–Rényi digraph: each ordered pair `(u, v)`, `u != v`, is an
/// edge independently with probability `p`.
pub fn erdos_renyi(n: usize, p: f64, seed: u64) -> Digraph {
    assert!((0.0..=1.0).contains(&p), "probability out of range");
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut edges = Vec::new();
    for u in 0..n as u32 {
        for v in 0..n as u32 {
            if u != v && rng.gen::<f64>() < p {
                edges.push((u, v));
            }
        }
    }
    Digraph::from_edges(n, edges).expect("generator avoids self-loops")
}

/// Erdős–Rényi digraph with a random Hamiltonian cycle added, guaranteeing
/// strong connectivity. Used by tests that need strongly connected samples.
pub fn strongly_connected_erdos_renyi(n: usize, p: f64, seed: u64) -> Digraph {
    assert!(n >= 2, "strong connectivity needs at least two vertices");
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut cycle: Vec<u32> = (0..n as u32).collect();
    cycle.shuffle(&mut rng);
    let mut edges: Vec<(u32, u32)> = (0..n)
        .map(|i| (cycle[i], cycle[(i + 1) % n]))
        .collect();
    for u in 0..n as u32 {
        for v in 0..n as u32 {
            if u != v && rng.gen::<f64>() < p {
                edges.push((u, v));
            }
        }
    }
    Digraph::from_edges(n, edges).expect("generator avoids self-loops")
}

/// The repeated-stimulus protocol: labelled stimulus classes, their receptor
/// sets and the timing envelope of one experiment.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct StimulusProtocol<T: Real> {
    /// Number of stimulus classes.
    pub n_classes: usize,
    /// Receptor vertices per class; each class drives its own set.
    pub receptors: Vec<Vec<u32>>,
    /// Windows per class; the experiment runs `n_classes * repeats` windows.
    pub repeats: usize,
    /// Window length in ms.
    pub window_ms: T,
    /// Stimulus duration in ms.
    pub stim_duration_ms: T,
    /// Stimulus onset is drawn uniformly from `[0, onset_jitter_ms)`.
    pub onset_jitter_ms: T,
    /// Per-window stimulus strength multiplier range.
    pub strength_range: (T, T),
    /// Noise current standard deviation knob; see [`LifConfig`].
    pub noise_strength: T,
    /// Spikes earlier than this many ms into a window are dropped from the
    /// trial data.
    pub exclusion_ms: T,
}

impl<T: Real> StimulusProtocol<T> {
    /// Protocol defaults: 200 ms windows, 5 ms stimuli jittered over the
    /// first 10 ms, strength in `[1, 2]`, noise 3, first 10 ms excluded.
    pub fn new(n_classes: usize, repeats: usize) -> StimulusProtocol<T> {
        StimulusProtocol {
            n_classes,
            receptors: vec![Vec::new(); n_classes],
            repeats,
            window_ms: T::of(200.0),
            stim_duration_ms: T::of(5.0),
            onset_jitter_ms: T::of(10.0),
            strength_range: (T::one(), T::of(2.0)),
            noise_strength: T::of(3.0),
            exclusion_ms: T::of(10.0),
        }
    }

    /// Samples `per_class` distinct receptor vertices for every class.
    pub fn with_random_receptors(
        mut self,
        n_vertices: usize,
        per_class: usize,
        seed: u64,
    ) -> Result<StimulusProtocol<T>> {
        if per_class > n_vertices {
            return Err(Error::Validation(format!(
                "cannot pick {per_class} receptors from {n_vertices} vertices"
            )));
        }
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        self.receptors = (0..self.n_classes)
            .map(|_| {
                let mut ids: Vec<u32> = (0..n_vertices as u32).collect();
                ids.shuffle(&mut rng);
                let mut chosen = ids[..per_class].to_vec();
                chosen.sort_unstable();
                chosen
            })
            .collect();
        Ok(self)
    }

    fn validate(&self, g: &Digraph) -> Result<()> {
        if self.receptors.len() != self.n_classes {
            return Err(Error::Validation(format!(
                "{} receptor sets for {} classes",
                self.receptors.len(),
                self.n_classes
            )));
        }
        for set in &self.receptors {
            for &v in set {
                g.check_vertex(v)?;
            }
        }
        if !(self.onset_jitter_ms < self.window_ms) {
            return Err(Error::Validation("onset jitter must stay inside the window".into()));
        }
        if self.stim_duration_ms + self.onset_jitter_ms > self.window_ms {
            return Err(Error::Validation(
                "stimulus duration plus jitter must fit in the window".into(),
            ));
        }
        Ok(())
    }
}

/// Discretized leaky integrate-and-fire configuration.
///
/// Per step the membrane decays by `exp(-step/tau)` and integrates the
/// inputs: each presynaptic spike from the previous step adds
/// `synaptic_weight`, an active stimulus adds `strength * synaptic_weight`,
/// and every vertex receives Gaussian noise with standard deviation
/// `noise_strength * step / tau`. A vertex spikes when its potential reaches
/// `threshold` and is then reset.
#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
pub struct LifConfig<T: Real> {
    pub tau_ms: T,
    pub threshold: T,
    pub reset: T,
    pub synaptic_weight: T,
    pub step_ms: T,
}

impl<T: Real> LifConfig<T> {
    /// Defaults scaled to the graph density: `tau` 10 ms, threshold 1, reset
    /// 0, step 0.1 ms, synaptic weight `0.5 / (n * p)` so that the mean total
    /// input per neuron is density-independent.
    pub fn for_density(n_vertices: usize, p: f64) -> LifConfig<T> {
        let expected_in = (n_vertices as f64 * p).max(1.0);
        LifConfig {
            tau_ms: T::of(10.0),
            threshold: T::one(),
            reset: T::zero(),
            synaptic_weight: T::of(0.5 / expected_in),
            step_ms: T::of(0.1),
        }
    }

    fn validate(&self) -> Result<()> {
        let pos = [self.tau_ms, self.threshold, self.synaptic_weight, self.step_ms];
        if pos.iter().any(|&v| !(v > T::zero())) {
            return Err(Error::Validation(
                "tau, threshold, synaptic weight and step must be positive".into(),
            ));
        }
        if self.reset < T::zero() || self.reset >= self.threshold {
            return Err(Error::Validation("reset must lie in [0, threshold)".into()));
        }
        if self.step_ms > T::one() {
            return Err(Error::Validation("step must be at most 1 ms".into()));
        }
        Ok(())
    }
}

/// Box–Muller standard normal source; draws happen in `f64` so that the RNG
/// stream does not depend on the scalar type.
struct Gaussian {
    spare: Option<f64>,
}

impl Gaussian {
    fn new() -> Gaussian {
        Gaussian { spare: None }
    }

    fn next(&mut self, rng: &mut ChaCha8Rng) -> f64 {
        if let Some(z) = self.spare.take() {
            return z;
        }
        let u1: f64 = 1.0 - rng.gen::<f64>();
        let u2: f64 = rng.gen();
        let r = (-2.0 * u1.ln()).sqrt();
        let (s, c) = (std::f64::consts::TAU * u2).sin_cos();
        self.spare = Some(r * s);
        r * c
    }
}

/// Runs the protocol on a graph and returns one labelled trial per stimulus
/// window, with spike times local to the window and the exclusion interval
/// removed. The class sequence is a seeded shuffle with exact per-class
/// counts; the whole simulation is a deterministic function of the seed.
pub fn simulate<T: Real>(
    g: &Digraph,
    proto: &StimulusProtocol<T>,
    lif: &LifConfig<T>,
    seed: u64,
) -> Result<BinaryDynamicsSet<T>> {
    proto.validate(g)?;
    lif.validate()?;
    let n = g.n_vertices();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut gauss = Gaussian::new();

    let mut labels: Vec<u32> = (0..proto.n_classes as u32)
        .flat_map(|c| std::iter::repeat(c).take(proto.repeats))
        .collect();
    labels.shuffle(&mut rng);

    let step = lif.step_ms.as_f64();
    let steps_per_window = (proto.window_ms.as_f64() / step).round() as usize;
    let decay = (-lif.step_ms / lif.tau_ms).exp();
    let noise_step = proto.noise_strength * lif.step_ms / lif.tau_ms;
    let use_noise = proto.noise_strength > T::zero();
    let (lo, hi) = proto.strength_range;

    let mut potential = vec![T::zero(); n];
    let mut input = vec![T::zero(); n];
    let mut fired_prev: Vec<u32> = Vec::new();
    let mut fired_now: Vec<u32> = Vec::new();
    let mut trials = Vec::with_capacity(labels.len());

    for (window_idx, &class) in labels.iter().enumerate() {
        let onset = rng.gen::<f64>() * proto.onset_jitter_ms.as_f64();
        let strength = lo + (hi - lo) * T::of(rng.gen::<f64>());
        let stim_input = strength * lif.synaptic_weight;
        let stim_end = onset + proto.stim_duration_ms.as_f64();
        let receptors = &proto.receptors[class as usize];
        let mut spikes: Vec<(u32, T)> = Vec::new();

        for s in 0..steps_per_window {
            let t0 = s as f64 * step;
            for v in input.iter_mut() {
                *v = T::zero();
            }
            for &u in &fired_prev {
                for &v in g.out_neighbours(u) {
                    input[v as usize] += lif.synaptic_weight;
                }
            }
            if t0 >= onset && t0 < stim_end {
                for &v in receptors {
                    input[v as usize] += stim_input;
                }
            }
            fired_now.clear();
            let local_time = T::of((s + 1) as f64 * step);
            for v in 0..n {
                let mut p = potential[v] * decay + input[v];
                if use_noise {
                    p += noise_step * T::of(gauss.next(&mut rng));
                }
                if p >= lif.threshold {
                    fired_now.push(v as u32);
                    potential[v] = lif.reset;
                    spikes.push((v as u32, local_time));
                } else {
                    potential[v] = p;
                }
            }
            std::mem::swap(&mut fired_prev, &mut fired_now);
        }

        spikes.retain(|&(_, t)| t >= proto.exclusion_ms);
        trials.push(Trial {
            id: window_idx as u64,
            label: class,
            spikes,
        });
    }

    Ok(BinaryDynamicsSet {
        n_vertices: n,
        trials,
    })
}

/// Receptor sets as [`VertexSet`]s, for callers that need membership tests.
pub fn receptor_sets<T: Real>(proto: &StimulusProtocol<T>) -> Vec<VertexSet> {
    proto
        .receptors
        .iter()
        .map(|r| VertexSet::from_unsorted(r.clone()))
        .collect()
}
