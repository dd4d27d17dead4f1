//! Directed simple graphs: storage, edge-list I/O, closed neighbourhoods,
//! induced subgraphs, strongly connected components and the graph surgery
//! used by the validation experiments.

use std::collections::BTreeSet;
use std::io::{BufRead, BufWriter, Write};
use std::path::Path;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};

/// A sorted set of distinct vertex ids.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct VertexSet(Vec<u32>);

impl VertexSet {
    pub fn new() -> Self {
        VertexSet(Vec::new())
    }

    /// Builds a set from arbitrary ids, sorting and deduplicating.
    pub fn from_unsorted(mut ids: Vec<u32>) -> Self {
        ids.sort_unstable();
        ids.dedup();
        VertexSet(ids)
    }

    /// Wraps a vector that is already strictly increasing.
    pub fn from_sorted(ids: Vec<u32>) -> Self {
        debug_assert!(ids.windows(2).all(|w| w[0] < w[1]));
        VertexSet(ids)
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn contains(&self, v: u32) -> bool {
        self.0.binary_search(&v).is_ok()
    }

    /// Position of `v` within the set, if present.
    pub fn rank(&self, v: u32) -> Option<usize> {
        self.0.binary_search(&v).ok()
    }

    pub fn iter(&self) -> impl Iterator<Item = u32> + '_ {
        self.0.iter().copied()
    }

    pub fn as_slice(&self) -> &[u32] {
        &self.0
    }

    pub fn intersection(&self, other: &VertexSet) -> VertexSet {
        let mut out = Vec::new();
        let (mut i, mut j) = (0, 0);
        while i < self.0.len() && j < other.0.len() {
            match self.0[i].cmp(&other.0[j]) {
                std::cmp::Ordering::Less => i += 1,
                std::cmp::Ordering::Greater => j += 1,
                std::cmp::Ordering::Equal => {
                    out.push(self.0[i]);
                    i += 1;
                    j += 1;
                }
            }
        }
        VertexSet(out)
    }
}

impl FromIterator<u32> for VertexSet {
    fn from_iter<I: IntoIterator<Item = u32>>(iter: I) -> Self {
        VertexSet::from_unsorted(iter.into_iter().collect())
    }
}

/// Degree information for one vertex.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Degrees {
    pub in_degree: usize,
    pub out_degree: usize,
    /// `in_degree + out_degree`; reciprocal neighbours count twice.
    pub total: usize,
    /// Number of neighbours connected in both directions.
    pub reciprocal: usize,
}

/// An immutable finite directed simple graph.
///
/// Reciprocal edges are allowed; self-loops and parallel edges are not.
/// Adjacency is stored in compressed sparse form, sorted per vertex, in both
/// orientations.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Digraph {
    n: usize,
    out_offsets: Vec<usize>,
    out_targets: Vec<u32>,
    in_offsets: Vec<usize>,
    in_targets: Vec<u32>,
}

impl Digraph {
    /// Builds a graph from an edge iterator, deduplicating repeated edges.
    pub fn from_edges<I>(n_vertices: usize, edges: I) -> Result<Digraph>
    where
        I: IntoIterator<Item = (u32, u32)>,
    {
        let mut set = BTreeSet::new();
        for (src, dst) in edges {
            if src == dst {
                return Err(Error::Validation(format!("self-loop at vertex {src}")));
            }
            for v in [src, dst] {
                if v as usize >= n_vertices {
                    return Err(Error::VertexRange {
                        vertex: v as u64,
                        n_vertices,
                    });
                }
            }
            set.insert((src, dst));
        }
        Ok(Self::from_sorted_dedup_edges(n_vertices, &set))
    }

    fn from_sorted_dedup_edges(n: usize, edges: &BTreeSet<(u32, u32)>) -> Digraph {
        let mut out_deg = vec![0usize; n];
        let mut in_deg = vec![0usize; n];
        for &(s, d) in edges {
            out_deg[s as usize] += 1;
            in_deg[d as usize] += 1;
        }
        let mut out_offsets = Vec::with_capacity(n + 1);
        let mut in_offsets = Vec::with_capacity(n + 1);
        out_offsets.push(0);
        in_offsets.push(0);
        for v in 0..n {
            out_offsets.push(out_offsets[v] + out_deg[v]);
            in_offsets.push(in_offsets[v] + in_deg[v]);
        }
        let mut out_targets = vec![0u32; edges.len()];
        let mut in_targets = vec![0u32; edges.len()];
        let mut out_fill = out_offsets.clone();
        let mut in_fill = in_offsets.clone();
        for &(s, d) in edges {
            out_targets[out_fill[s as usize]] = d;
            out_fill[s as usize] += 1;
            in_targets[in_fill[d as usize]] = s;
            in_fill[d as usize] += 1;
        }
        // BTreeSet iteration is (src, dst)-sorted, so out rows come out sorted;
        // in rows need a per-row sort.
        for v in 0..n {
            in_targets[in_offsets[v]..in_offsets[v + 1]].sort_unstable();
        }
        Digraph {
            n,
            out_offsets,
            out_targets,
            in_offsets,
            in_targets,
        }
    }

    /// The complete digraph on `n` vertices (every ordered pair an edge).
    pub fn complete(n: usize) -> Digraph {
        let edges = (0..n as u32)
            .flat_map(|u| (0..n as u32).filter(move |&v| v != u).map(move |v| (u, v)));
        Digraph::from_edges(n, edges).expect("complete digraph is valid")
    }

    /// Parses a whitespace- or comma-separated "src dst" edge list.
    ///
    /// Blank lines and `#` comments are ignored; repeated edges are
    /// deduplicated. With `n_vertices` unset the vertex count is inferred as
    /// the maximum id plus one.
    pub fn from_edge_list_text(text: &str, n_vertices: Option<usize>) -> Result<Digraph> {
        Self::parse_edge_lines(text.lines().map(|l| Ok(l.to_string())), n_vertices)
    }

    /// Loads an edge list file; see [`Digraph::from_edge_list_text`].
    pub fn load_edge_list<P: AsRef<Path>>(path: P, n_vertices: Option<usize>) -> Result<Digraph> {
        // Streamed: the target graphs can hold millions of edges.
        let file = std::fs::File::open(path)?;
        Self::parse_edge_lines(std::io::BufReader::new(file).lines(), n_vertices)
    }

    fn parse_edge_lines(
        lines: impl Iterator<Item = std::io::Result<String>>,
        n_vertices: Option<usize>,
    ) -> Result<Digraph> {
        let mut edges = Vec::new();
        let mut max_id = 0u32;
        for (idx, line) in lines.enumerate() {
            let line_no = idx + 1;
            let raw = line?;
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let mut fields = line
                .split(|c: char| c == ',' || c.is_whitespace())
                .filter(|f| !f.is_empty());
            let src = parse_vertex(fields.next(), line_no)?;
            let dst = parse_vertex(fields.next(), line_no)?;
            if fields.next().is_some() {
                return Err(Error::Parse {
                    line: line_no,
                    msg: format!("expected two fields, got more in '{line}'"),
                });
            }
            if src == dst {
                return Err(Error::Validation(format!(
                    "self-loop '{src} {dst}' at line {line_no}"
                )));
            }
            max_id = max_id.max(src).max(dst);
            edges.push((src, dst));
        }
        let n = match n_vertices {
            Some(n) => n,
            None if edges.is_empty() => 0,
            None => max_id as usize + 1,
        };
        Digraph::from_edges(n, edges)
    }

    /// Writes the edge list sorted by `(src, dst)`, one edge per line.
    pub fn write_edge_list<P: AsRef<Path>>(&self, path: P) -> Result<()> {
        let file = std::fs::File::create(path)?;
        let mut w = BufWriter::new(file);
        for (src, dst) in self.edges() {
            writeln!(w, "{src} {dst}")?;
        }
        w.flush()?;
        Ok(())
    }

    pub fn n_vertices(&self) -> usize {
        self.n
    }

    pub fn n_edges(&self) -> usize {
        self.out_targets.len()
    }

    pub fn vertices(&self) -> impl Iterator<Item = u32> {
        0..self.n as u32
    }

    /// Edges in `(src, dst)`-sorted order.
    pub fn edges(&self) -> impl Iterator<Item = (u32, u32)> + '_ {
        (0..self.n).flat_map(move |v| {
            self.out_neighbours(v as u32)
                .iter()
                .map(move |&d| (v as u32, d))
        })
    }

    pub fn check_vertex(&self, v: u32) -> Result<()> {
        if (v as usize) < self.n {
            Ok(())
        } else {
            Err(Error::VertexRange {
                vertex: v as u64,
                n_vertices: self.n,
            })
        }
    }

    pub fn out_neighbours(&self, v: u32) -> &[u32] {
        let v = v as usize;
        &self.out_targets[self.out_offsets[v]..self.out_offsets[v + 1]]
    }

    pub fn in_neighbours(&self, v: u32) -> &[u32] {
        let v = v as usize;
        &self.in_targets[self.in_offsets[v]..self.in_offsets[v + 1]]
    }

    pub fn has_edge(&self, src: u32, dst: u32) -> bool {
        self.out_neighbours(src).binary_search(&dst).is_ok()
    }

    /// In-, out-, total and reciprocal degree of `v`.
    ///
    /// Total degree is `in + out`, so a reciprocal neighbour contributes two.
    pub fn degrees(&self, v: u32) -> Result<Degrees> {
        self.check_vertex(v)?;
        let ins = self.in_neighbours(v);
        let outs = self.out_neighbours(v);
        let mut reciprocal = 0;
        let (mut i, mut j) = (0, 0);
        while i < ins.len() && j < outs.len() {
            match ins[i].cmp(&outs[j]) {
                std::cmp::Ordering::Less => i += 1,
                std::cmp::Ordering::Greater => j += 1,
                std::cmp::Ordering::Equal => {
                    reciprocal += 1;
                    i += 1;
                    j += 1;
                }
            }
        }
        Ok(Degrees {
            in_degree: ins.len(),
            out_degree: outs.len(),
            total: ins.len() + outs.len(),
            reciprocal,
        })
    }

    /// Distinct neighbours of `v` in either direction, excluding `v`.
    pub fn open_neighbours(&self, v: u32) -> VertexSet {
        let mut ids: Vec<u32> = self
            .in_neighbours(v)
            .iter()
            .chain(self.out_neighbours(v))
            .copied()
            .collect();
        ids.sort_unstable();
        ids.dedup();
        VertexSet(ids)
    }

    /// The closed neighbourhood of `v`: the subgraph induced by `v` and all
    /// vertices adjacent to it in either direction.
    pub fn closed_neighbourhood(&self, v: u32) -> Result<Neighbourhood> {
        self.check_vertex(v)?;
        let mut ids = self.open_neighbours(v).0;
        let pos = ids.binary_search(&v).unwrap_err();
        ids.insert(pos, v);
        let members = VertexSet(ids);
        Neighbourhood::induced(self, v, members)
    }

    /// The subgraph induced by `s`, with vertices relabelled `0..s.len()` in
    /// `s`-order.
    pub fn induced_subgraph(&self, s: &VertexSet) -> Result<Digraph> {
        if let Some(&max) = s.0.last() {
            self.check_vertex(max)?;
        }
        let mut edges = BTreeSet::new();
        for (local, &v) in s.0.iter().enumerate() {
            for &w in self.out_neighbours(v) {
                if let Some(local_w) = s.rank(w) {
                    edges.insert((local as u32, local_w as u32));
                }
            }
        }
        Ok(Digraph::from_sorted_dedup_edges(s.len(), &edges))
    }

    /// All strongly connected components, each sorted, in discovery order.
    pub fn strongly_connected_components(&self) -> Vec<Vec<u32>> {
        // Iterative Tarjan; recursion would overflow on long paths.
        const UNVISITED: u32 = u32::MAX;
        let n = self.n;
        let mut index = vec![UNVISITED; n];
        let mut lowlink = vec![0u32; n];
        let mut on_stack = vec![false; n];
        let mut stack: Vec<u32> = Vec::new();
        let mut call: Vec<(u32, usize)> = Vec::new();
        let mut next = 0u32;
        let mut components = Vec::new();

        for root in 0..n as u32 {
            if index[root as usize] != UNVISITED {
                continue;
            }
            index[root as usize] = next;
            lowlink[root as usize] = next;
            next += 1;
            stack.push(root);
            on_stack[root as usize] = true;
            call.push((root, 0));

            while let Some(frame) = call.last_mut() {
                let v = frame.0;
                let outs = self.out_neighbours(v);
                if frame.1 < outs.len() {
                    let w = outs[frame.1];
                    frame.1 += 1;
                    if index[w as usize] == UNVISITED {
                        index[w as usize] = next;
                        lowlink[w as usize] = next;
                        next += 1;
                        stack.push(w);
                        on_stack[w as usize] = true;
                        call.push((w, 0));
                    } else if on_stack[w as usize] {
                        lowlink[v as usize] = lowlink[v as usize].min(index[w as usize]);
                    }
                } else {
                    call.pop();
                    if let Some(parent) = call.last() {
                        lowlink[parent.0 as usize] =
                            lowlink[parent.0 as usize].min(lowlink[v as usize]);
                    }
                    if lowlink[v as usize] == index[v as usize] {
                        let mut comp = Vec::new();
                        loop {
                            let w = stack.pop().expect("tarjan stack underflow");
                            on_stack[w as usize] = false;
                            comp.push(w);
                            if w == v {
                                break;
                            }
                        }
                        comp.sort_unstable();
                        components.push(comp);
                    }
                }
            }
        }
        components
    }

    /// Vertex set of a maximum-cardinality strongly connected component.
    ///
    /// Ties are broken towards the component containing the smallest vertex
    /// id. The empty graph yields the empty set.
    pub fn largest_scc(&self) -> VertexSet {
        let comps = self.strongly_connected_components();
        let best = comps
            .into_iter()
            .max_by(|a, b| a.len().cmp(&b.len()).then(b[0].cmp(&a[0])));
        VertexSet(best.unwrap_or_default())
    }

    /// Redirects the connections of each centre by applying one random
    /// permutation of the non-centre vertex ids simultaneously to the
    /// centre's row and column of the adjacency matrix.
    ///
    /// "Non-centre" means not in `centres`: each permutation moves only
    /// vertices outside the centre set, so edges among centres stay put and
    /// every centre's in- and out-degree is preserved exactly. Centres are
    /// processed in ascending id order from a single RNG stream, making the
    /// result a deterministic function of `seed`.
    pub fn fake_neighbourhood_rewire(&self, centres: &VertexSet, seed: u64) -> Result<Digraph> {
        if let Some(&max) = centres.0.last() {
            self.check_vertex(max)?;
        }
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut out_adj: Vec<BTreeSet<u32>> = (0..self.n as u32)
            .map(|v| self.out_neighbours(v).iter().copied().collect())
            .collect();
        let mut in_adj: Vec<BTreeSet<u32>> = (0..self.n as u32)
            .map(|v| self.in_neighbours(v).iter().copied().collect())
            .collect();

        for &c in &centres.0 {
            let mut others: Vec<u32> = (0..self.n as u32).filter(|&v| !centres.contains(v)).collect();
            let mut image = others.clone();
            image.shuffle(&mut rng);
            let mut perm: Vec<u32> = (0..self.n as u32).collect();
            for (v, w) in others.drain(..).zip(image) {
                perm[v as usize] = w;
            }

            let old_out: Vec<u32> = out_adj[c as usize].iter().copied().collect();
            let old_in: Vec<u32> = in_adj[c as usize].iter().copied().collect();
            for &u in &old_out {
                in_adj[u as usize].remove(&c);
            }
            for &u in &old_in {
                out_adj[u as usize].remove(&c);
            }
            out_adj[c as usize].clear();
            in_adj[c as usize].clear();
            for &u in &old_out {
                let w = perm[u as usize];
                out_adj[c as usize].insert(w);
                in_adj[w as usize].insert(c);
            }
            for &u in &old_in {
                let w = perm[u as usize];
                in_adj[c as usize].insert(w);
                out_adj[w as usize].insert(c);
            }
        }

        let edges: BTreeSet<(u32, u32)> = out_adj
            .iter()
            .enumerate()
            .flat_map(|(v, outs)| outs.iter().map(move |&w| (v as u32, w)))
            .collect();
        Ok(Digraph::from_sorted_dedup_edges(self.n, &edges))
    }

    /// Smallest prefix of `order` whose closed neighbourhoods cover at least
    /// `fraction` of all vertices.
    ///
    /// `order` must be a permutation of the vertex set (conventionally sorted
    /// by descending parameter value). Returns `n_vertices + 1` if the target
    /// is unreachable, which cannot happen for `fraction <= 1`.
    pub fn greedy_cover_count(&self, order: &[u32], fraction: f64) -> Result<usize> {
        if !(fraction > 0.0 && fraction <= 1.0) {
            return Err(Error::Validation(format!(
                "fraction {fraction} outside (0, 1]"
            )));
        }
        self.check_permutation(order)?;
        let target = fraction * self.n as f64;
        let mut covered = vec![false; self.n];
        let mut count = 0usize;
        if count as f64 + 1e-9 >= target {
            return Ok(0);
        }
        for (prefix, &c) in order.iter().enumerate() {
            if !covered[c as usize] {
                covered[c as usize] = true;
                count += 1;
            }
            for &u in self.in_neighbours(c).iter().chain(self.out_neighbours(c)) {
                if !covered[u as usize] {
                    covered[u as usize] = true;
                    count += 1;
                }
            }
            if count as f64 + 1e-9 >= target {
                return Ok(prefix + 1);
            }
        }
        Ok(self.n + 1)
    }

    pub(crate) fn check_permutation(&self, order: &[u32]) -> Result<()> {
        if order.len() != self.n {
            return Err(Error::Validation(format!(
                "ranking has {} entries for a graph with {} vertices",
                order.len(),
                self.n
            )));
        }
        let mut seen = vec![false; self.n];
        for &v in order {
            self.check_vertex(v)?;
            if seen[v as usize] {
                return Err(Error::Validation(format!(
                    "vertex {v} appears twice in the ranking"
                )));
            }
            seen[v as usize] = true;
        }
        Ok(())
    }
}

fn parse_vertex(field: Option<&str>, line: usize) -> Result<u32> {
    let field = field.ok_or_else(|| Error::Parse {
        line,
        msg: "expected two fields".into(),
    })?;
    field.parse().map_err(|e| Error::Parse {
        line,
        msg: format!("invalid vertex id '{field}': {e}"),
    })
}

/// A centred subgraph: a centre vertex, the member set, and the induced
/// graph with its member-to-local-index map.
///
/// [`Digraph::closed_neighbourhood`] produces the closed neighbourhood of the
/// centre; the validation experiments also build centred subgraphs whose
/// members are not neighbours of the centre, via [`Neighbourhood::induced`].
#[derive(Clone, Debug)]
pub struct Neighbourhood {
    centre: u32,
    members: VertexSet,
    graph: Digraph,
    centre_local: usize,
}

impl Neighbourhood {
    /// Induces the subgraph on `members` (which must contain `centre`).
    pub fn induced(ambient: &Digraph, centre: u32, members: VertexSet) -> Result<Neighbourhood> {
        let centre_local = members.rank(centre).ok_or_else(|| {
            Error::Validation(format!("centre {centre} not among the members"))
        })?;
        let graph = ambient.induced_subgraph(&members)?;
        Ok(Neighbourhood {
            centre,
            members,
            graph,
            centre_local,
        })
    }

    /// Ambient id of the centre.
    pub fn centre(&self) -> u32 {
        self.centre
    }

    /// Ambient ids of all members, centre included, sorted.
    pub fn members(&self) -> &VertexSet {
        &self.members
    }

    /// The induced subgraph, vertices relabelled in member order.
    pub fn graph(&self) -> &Digraph {
        &self.graph
    }

    /// Local index of the centre inside [`Neighbourhood::graph`].
    pub fn centre_local(&self) -> usize {
        self.centre_local
    }

    /// Local index of an ambient vertex, if it is a member.
    pub fn local_index(&self, ambient: u32) -> Option<usize> {
        self.members.rank(ambient)
    }

    pub fn size(&self) -> usize {
        self.members.len()
    }
}
