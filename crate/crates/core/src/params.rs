//! The parameter registry: a closed catalogue mapping short codes to
//! real-valued functions on digraphs and centred subgraphs, used both to
//! select neighbourhoods and to featurise active subgraphs.

use std::fmt;
use std::str::FromStr;

use crate::digraph::{Digraph, Neighbourhood};
use crate::error::{Error, Result};
use crate::flag::{build_flag_complex, euler_characteristic_of, simplex_count_containing};
use crate::homology::{betti_numbers, normalised_betti_coefficient};
use crate::real::Real;
use crate::spectral;

/// Default dimension cap for flag complexes behind `nbc`.
pub const DEFAULT_FLAG_DIM: usize = 6;

/// Which spectral-gap convention a gap code uses.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum GapKind {
    /// Difference between the two largest eigenvalue moduli.
    High,
    /// Smallest nonzero eigenvalue modulus.
    Low,
}

/// A code from the parameter registry.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum ParameterCode {
    ClusteringFagiolo,
    ClusteringTransitive,
    EulerCharacteristic,
    NormalisedBetti,
    Size,
    AdjacencyGap(GapKind),
    AdjacencyRadius,
    BauerGap { reversed: bool, kind: GapKind },
    BauerRadius,
    ChungGap(GapKind),
    ChungRadius,
    TransitionGap { reversed: bool, kind: GapKind },
    TransitionRadius,
    TotalDegree,
    InDegree,
    OutDegree,
    ReciprocalSum,
    ReciprocalCentre,
    DensityCoefficient(usize),
}

impl ParameterCode {
    /// True for parameters that are functions of the centre vertex rather
    /// than of the graph alone.
    pub fn is_centre_dependent(self) -> bool {
        matches!(
            self,
            ParameterCode::ClusteringFagiolo
                | ParameterCode::ClusteringTransitive
                | ParameterCode::TotalDegree
                | ParameterCode::InDegree
                | ParameterCode::OutDegree
                | ParameterCode::ReciprocalCentre
                | ParameterCode::DensityCoefficient(_)
        )
    }
}

impl fmt::Display for ParameterCode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        use GapKind::*;
        use ParameterCode::*;
        let s = match self {
            ClusteringFagiolo => "fcc".into(),
            ClusteringTransitive => "tcc".into(),
            EulerCharacteristic => "ec".into(),
            NormalisedBetti => "nbc".into(),
            Size => "size".into(),
            AdjacencyGap(High) => "asg".into(),
            AdjacencyGap(Low) => "asg_low".into(),
            AdjacencyRadius => "asr".into(),
            BauerGap { reversed: false, kind: High } => "blsg".into(),
            BauerGap { reversed: false, kind: Low } => "blsg_low".into(),
            BauerGap { reversed: true, kind: High } => "rblsg".into(),
            BauerGap { reversed: true, kind: Low } => "rblsg_low".into(),
            BauerRadius => "blsr".into(),
            ChungGap(Low) => "clsg".into(),
            ChungGap(High) => "clsg_high".into(),
            ChungRadius => "clsr".into(),
            TransitionGap { reversed: false, kind: High } => "tpsg".into(),
            TransitionGap { reversed: false, kind: Low } => "tpsg_low".into(),
            TransitionGap { reversed: true, kind: High } => "rtpsg".into(),
            TransitionGap { reversed: true, kind: Low } => "rtpsg_low".into(),
            TransitionRadius => "tpsr".into(),
            TotalDegree => "deg".into(),
            InDegree => "ind".into(),
            OutDegree => "oud".into(),
            ReciprocalSum => "rc".into(),
            ReciprocalCentre => "rc_centre".into(),
            DensityCoefficient(k) => format!("dc{k}"),
        };
        f.write_str(&s)
    }
}

impl FromStr for ParameterCode {
    type Err = Error;

    fn from_str(s: &str) -> Result<ParameterCode> {
        use GapKind::*;
        use ParameterCode::*;
        let code = match s {
            "fcc" => ClusteringFagiolo,
            "tcc" => ClusteringTransitive,
            "ec" => EulerCharacteristic,
            "nbc" => NormalisedBetti,
            "size" => Size,
            // Spectral gaps default to the high convention, except the Chung
            // Laplacian whose headline gap is the smallest nonzero eigenvalue.
            "asg" | "asg_high" => AdjacencyGap(High),
            "asg_low" => AdjacencyGap(Low),
            "asr" => AdjacencyRadius,
            "blsg" | "blsg_high" => BauerGap { reversed: false, kind: High },
            "blsg_low" => BauerGap { reversed: false, kind: Low },
            "rblsg" | "rblsg_high" => BauerGap { reversed: true, kind: High },
            "rblsg_low" => BauerGap { reversed: true, kind: Low },
            "blsr" => BauerRadius,
            "clsg" | "clsg_low" => ChungGap(Low),
            "clsg_high" => ChungGap(High),
            "clsr" => ChungRadius,
            "tpsg" | "tpsg_high" => TransitionGap { reversed: false, kind: High },
            "tpsg_low" => TransitionGap { reversed: false, kind: Low },
            "rtpsg" | "rtpsg_high" => TransitionGap { reversed: true, kind: High },
            "rtpsg_low" => TransitionGap { reversed: true, kind: Low },
            "tpsr" => TransitionRadius,
            "deg" => TotalDegree,
            "ind" => InDegree,
            "oud" => OutDegree,
            "rc" => ReciprocalSum,
            "rc_centre" => ReciprocalCentre,
            _ => {
                if let Some(k) = s.strip_prefix("dc").and_then(|k| k.parse::<usize>().ok()) {
                    if k >= 2 {
                        return Ok(DensityCoefficient(k));
                    }
                }
                return Err(Error::UnknownCode(s.to_string()));
            }
        };
        Ok(code)
    }
}

/// One registry row: canonical code plus a one-line description.
pub struct RegistryEntry {
    pub code: &'static str,
    pub description: &'static str,
}

/// The closed registry, in presentation order.
pub fn registry() -> Vec<RegistryEntry> {
    macro_rules! entry {
        ($c:expr, $d:expr) => {
            RegistryEntry { code: $c, description: $d }
        };
    }
    vec![
        entry!("fcc", "Clustering coefficient (Fagiolo)"),
        entry!("tcc", "Transitive clustering coefficient"),
        entry!("ec", "Euler characteristic"),
        entry!("nbc", "Normalised Betti coefficient"),
        entry!("size", "Number of vertices in the graph"),
        entry!("asg", "Adjacency spectral gap (high)"),
        entry!("asg_low", "Adjacency spectral gap (low)"),
        entry!("asr", "Adjacency spectral radius"),
        entry!("blsg", "Bauer Laplacian spectral gap (high)"),
        entry!("blsg_low", "Bauer Laplacian spectral gap (low)"),
        entry!("blsr", "Bauer Laplacian spectral radius"),
        entry!("clsg", "Chung Laplacian spectral gap (low)"),
        entry!("clsg_high", "Chung Laplacian spectral gap (high)"),
        entry!("clsr", "Chung Laplacian spectral radius"),
        entry!("tpsg", "Transition probability spectral gap (high)"),
        entry!("tpsg_low", "Transition probability spectral gap (low)"),
        entry!("tpsr", "Transition probability spectral radius"),
        entry!("rtpsg", "Reversed transition probability spectral gap (high)"),
        entry!("rtpsg_low", "Reversed transition probability spectral gap (low)"),
        entry!("rblsg", "Reversed Bauer Laplacian spectral gap (high)"),
        entry!("rblsg_low", "Reversed Bauer Laplacian spectral gap (low)"),
        entry!("deg", "Total degree of the centre"),
        entry!("ind", "In-degree of the centre"),
        entry!("oud", "Out-degree of the centre"),
        entry!("rc", "Sum of reciprocal degrees over the graph"),
        entry!("rc_centre", "Reciprocal degree of the centre"),
        entry!("dc2", "Second density coefficient at the centre"),
        entry!("dc3", "Third density coefficient at the centre"),
    ]
}

/// What a parameter is evaluated on: a graph, with the centre's local index
/// when the context provides one.
///
/// Selection always carries the centre. Feature evaluation on an active
/// subgraph carries it only when the centre itself is active; with no centre,
/// centre-dependent codes evaluate to zero.
#[derive(Clone, Copy)]
pub struct EvalTarget<'a> {
    pub graph: &'a Digraph,
    pub centre: Option<usize>,
}

impl<'a> EvalTarget<'a> {
    pub fn selection(nb: &'a Neighbourhood) -> EvalTarget<'a> {
        EvalTarget {
            graph: nb.graph(),
            centre: Some(nb.centre_local()),
        }
    }

    pub fn graph_only(graph: &'a Digraph) -> EvalTarget<'a> {
        EvalTarget { graph, centre: None }
    }
}

/// Evaluates a registry code on a target. Total: every defined code yields a
/// finite value on every digraph, degenerate cases included.
pub fn evaluate<T: Real>(code: ParameterCode, target: EvalTarget<'_>) -> Result<T> {
    use ParameterCode::*;
    let g = target.graph;
    let value = match code {
        Size => T::from_usize(g.n_vertices()).expect("size fits scalar"),
        EulerCharacteristic => T::from_i64(euler_characteristic_of(g)).expect("ec fits scalar"),
        NormalisedBetti => nbc_value(g)?,
        ReciprocalSum => {
            let mut total = 0usize;
            for v in g.vertices() {
                total += g.degrees(v)?.reciprocal;
            }
            T::from_usize(total).expect("rc fits scalar")
        }
        AdjacencyGap(kind) => pick(spectral::adjacency_spectrum(g)?, kind),
        AdjacencyRadius => spectral::adjacency_spectrum(g)?.radius,
        TransitionGap { reversed, kind } => pick(spectral::transition_spectrum(g, reversed)?, kind),
        TransitionRadius => spectral::transition_spectrum(g, false)?.radius,
        BauerGap { reversed, kind } => pick(spectral::bauer_spectrum(g, reversed)?, kind),
        BauerRadius => spectral::bauer_spectrum(g, false)?.radius,
        ChungGap(kind) => pick(spectral::chung_laplacian_summary(g)?, kind),
        ChungRadius => spectral::chung_laplacian_summary(g)?.radius,
        ClusteringFagiolo | ClusteringTransitive | TotalDegree | InDegree | OutDegree
        | ReciprocalCentre | DensityCoefficient(_) => match target.centre {
            None => T::zero(),
            Some(centre) => centre_value(code, g, centre)?,
        },
    };
    debug_assert!(value.to_f64().map(f64::is_finite).unwrap_or(false));
    Ok(value)
}

fn pick<T: Real>(s: spectral::SpectralSummary<T>, kind: GapKind) -> T {
    match kind {
        GapKind::High => s.gap_high,
        GapKind::Low => s.gap_low,
    }
}

fn centre_value<T: Real>(code: ParameterCode, g: &Digraph, centre: usize) -> Result<T> {
    use ParameterCode::*;
    let centre = centre as u32;
    g.check_vertex(centre)?;
    Ok(match code {
        ClusteringFagiolo => fagiolo_cc(g, centre)?,
        ClusteringTransitive => transitive_cc(g, centre)?,
        TotalDegree => T::from_usize(g.degrees(centre)?.total).expect("degree fits"),
        InDegree => T::from_usize(g.degrees(centre)?.in_degree).expect("degree fits"),
        OutDegree => T::from_usize(g.degrees(centre)?.out_degree).expect("degree fits"),
        ReciprocalCentre => T::from_usize(g.degrees(centre)?.reciprocal).expect("degree fits"),
        DensityCoefficient(k) => {
            if k >= g.n_vertices() {
                // Out of domain for this graph; features must stay total.
                T::zero()
            } else {
                density_coefficient(g, centre, k)?
            }
        }
        _ => unreachable!("not a centre-dependent code"),
    })
}

/// Normalised Betti coefficient of a digraph, over the two-element field.
///
/// The flag complex is capped at dimension [`DEFAULT_FLAG_DIM`]; when the cap
/// bites, the sum is truncated one dimension below it.
fn nbc_value<T: Real>(g: &Digraph) -> Result<T> {
    let n = g.n_vertices();
    if n == 0 {
        return Ok(T::zero());
    }
    let cap = DEFAULT_FLAG_DIM.min(n - 1).max(1);
    let x = build_flag_complex(g, cap);
    let betti_depth = if x.is_fully_built() {
        x.top_dim().unwrap_or(0)
    } else {
        cap - 1
    };
    let b = betti_numbers(&x, betti_depth)?;
    Ok(normalised_betti_coefficient(&x, &b))
}

/// Count of directed triangles at the centre, in all orientations: half the
/// symmetrised adjacency triple product.
fn directed_triangle_count(g: &Digraph, centre: u32) -> Result<u64> {
    g.check_vertex(centre)?;
    let nbrs = g.open_neighbours(centre);
    let nbrs = nbrs.as_slice();
    let both = |a: u32, b: u32| -> u64 { g.has_edge(a, b) as u64 + g.has_edge(b, a) as u64 };
    let mut twice = 0u64;
    for (i, &u) in nbrs.iter().enumerate() {
        for (j, &w) in nbrs.iter().enumerate() {
            if i != j {
                twice += both(centre, u) * both(centre, w) * both(u, w);
            }
        }
    }
    debug_assert!(twice % 2 == 0);
    Ok(twice / 2)
}

/// Fagiolo's directed clustering coefficient at the centre. Zero when the
/// denominator vanishes.
pub fn fagiolo_cc<T: Real>(g: &Digraph, centre: u32) -> Result<T> {
    let t = directed_triangle_count(g, centre)?;
    let d = g.degrees(centre)?;
    let denom = (d.total as u64) * (d.total as u64).saturating_sub(1) - 2 * d.reciprocal as u64;
    if denom == 0 {
        return Ok(T::zero());
    }
    Ok(T::from_u64(t).expect("count fits") / T::from_u64(denom).expect("count fits"))
}

/// Transitive clustering coefficient at the centre: directed 3-cliques
/// through the centre over the count that could possibly exist. Zero when
/// the denominator vanishes.
pub fn transitive_cc<T: Real>(g: &Digraph, centre: u32) -> Result<T> {
    let s2 = simplex_count_containing(g, centre, 2)? as u64;
    let d = g.degrees(centre)?;
    let deg = d.total as u64;
    let mixed = d.in_degree as u64 * d.out_degree as u64 + d.reciprocal as u64;
    let denom = deg * deg.saturating_sub(1) - mixed;
    if denom == 0 {
        return Ok(T::zero());
    }
    debug_assert!(s2 <= denom);
    Ok(T::from_u64(s2).expect("count fits") / T::from_u64(denom).expect("count fits"))
}

/// The `k`-th density coefficient at the centre:
/// `k / ((k+1)(n-k)) * S_k / S_{k-1}`, zero when `S_{k-1}` vanishes.
pub fn density_coefficient<T: Real>(g: &Digraph, centre: u32, k: usize) -> Result<T> {
    if k < 2 {
        return Err(Error::Domain(format!("density coefficient needs k >= 2, got {k}")));
    }
    let n = g.n_vertices();
    if k >= n {
        return Err(Error::Domain(format!(
            "density coefficient needs k < n, got k={k} on {n} vertices"
        )));
    }
    let s_k = simplex_count_containing(g, centre, k)? as u64;
    let s_km1 = simplex_count_containing(g, centre, k - 1)? as u64;
    if s_km1 == 0 {
        return Ok(T::zero());
    }
    let numer = (k as u64) * s_k;
    let denom = ((k + 1) as u64) * ((n - k) as u64) * s_km1;
    Ok(T::from_u64(numer).expect("count fits") / T::from_u64(denom).expect("count fits"))
}
