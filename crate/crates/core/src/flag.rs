//! The directed flag complex of a digraph: enumeration of directed cliques,
//! simplex counts and the Euler characteristic.

use rayon::prelude::*;

use crate::digraph::Digraph;
use crate::error::{Error, Result};

/// Directed cliques of a digraph, grouped by dimension.
///
/// An `n`-simplex is an ordered tuple `(v_0, ..., v_n)` with an edge
/// `v_i -> v_j` for every `i < j`. Dimension `d` tuples are stored flat,
/// `d + 1` ids each, in lexicographic order.
#[derive(Clone, Debug)]
pub struct DirectedFlagComplex {
    max_dim: usize,
    simplices: Vec<Vec<u32>>,
    counts: Vec<usize>,
}

impl DirectedFlagComplex {
    /// Dimension cap the complex was built to.
    pub fn max_dim(&self) -> usize {
        self.max_dim
    }

    /// Simplex counts per dimension, `counts()[d] = s_d`.
    pub fn counts(&self) -> &[usize] {
        self.counts.as_slice()
    }

    /// Simplices of dimension `d` as `(d + 1)`-sized chunks.
    pub fn simplices(&self, d: usize) -> impl Iterator<Item = &[u32]> {
        self.simplices[d].chunks_exact(d + 1)
    }

    /// Largest dimension with at least one simplex, if any.
    pub fn top_dim(&self) -> Option<usize> {
        (0..=self.max_dim).rev().find(|&d| self.counts[d] > 0)
    }

    /// True when no simplices were cut off by the dimension cap.
    pub fn is_fully_built(&self) -> bool {
        // A (d+1)-dimensional simplex requires d-dimensional faces, so an
        // empty top layer proves nothing lies beyond the cap.
        self.counts[self.max_dim] == 0 || self.max_dim + 2 > self.n_vertices_hint()
    }

    fn n_vertices_hint(&self) -> usize {
        self.counts[0]
    }

    /// Writes each simplex as a line of vertex ids, dimension by dimension.
    pub fn dump_text(&self) -> String {
        let mut out = String::new();
        for d in 0..=self.max_dim {
            for simplex in self.simplices(d) {
                let words: Vec<String> = simplex.iter().map(|v| v.to_string()).collect();
                out.push_str(&words.join(" "));
                out.push('\n');
            }
        }
        out
    }
}

fn intersect_sorted(a: &[u32], b: &[u32]) -> Vec<u32> {
    let mut out = Vec::with_capacity(a.len().min(b.len()));
    let (mut i, mut j) = (0, 0);
    while i < a.len() && j < b.len() {
        match a[i].cmp(&b[j]) {
            std::cmp::Ordering::Less => i += 1,
            std::cmp::Ordering::Greater => j += 1,
            std::cmp::Ordering::Equal => {
                out.push(a[i]);
                i += 1;
                j += 1;
            }
        }
    }
    out
}

fn extend_cliques(
    g: &Digraph,
    prefix: &mut Vec<u32>,
    candidates: &[u32],
    max_dim: usize,
    sink: &mut [Vec<u32>],
) {
    for &u in candidates {
        prefix.push(u);
        let dim = prefix.len() - 1;
        sink[dim].extend_from_slice(prefix);
        if dim < max_dim {
            let next = intersect_sorted(candidates, g.out_neighbours(u));
            if !next.is_empty() {
                extend_cliques(g, prefix, &next, max_dim, sink);
            }
        }
        prefix.pop();
    }
}

/// Enumerates every directed clique on up to `max_dim + 1` vertices.
///
/// Cliques grow by appending common out-neighbours of the tuple so far, so
/// each clique is produced exactly once, in lexicographic order. The walk is
/// parallel over root vertices; the result is deterministic.
pub fn build_flag_complex(g: &Digraph, max_dim: usize) -> DirectedFlagComplex {
    let per_root: Vec<Vec<Vec<u32>>> = (0..g.n_vertices() as u32)
        .into_par_iter()
        .map(|root| {
            let mut sink: Vec<Vec<u32>> = vec![Vec::new(); max_dim + 1];
            sink[0].push(root);
            if max_dim > 0 {
                let mut prefix = vec![root];
                extend_cliques(g, &mut prefix, g.out_neighbours(root), max_dim, &mut sink);
            }
            sink
        })
        .collect();

    let mut simplices: Vec<Vec<u32>> = vec![Vec::new(); max_dim + 1];
    for sink in per_root {
        for (d, chunk) in sink.into_iter().enumerate() {
            simplices[d].extend_from_slice(&chunk);
        }
    }
    let counts = simplices
        .iter()
        .enumerate()
        .map(|(d, flat)| flat.len() / (d + 1))
        .collect();
    DirectedFlagComplex {
        max_dim,
        simplices,
        counts,
    }
}

/// Simplex counts only, without storing the cliques.
pub fn count_simplices(g: &Digraph, max_dim: usize) -> Vec<usize> {
    fn count_rec(g: &Digraph, depth: usize, candidates: &[u32], max_dim: usize, counts: &mut [usize]) {
        for &u in candidates {
            counts[depth] += 1;
            if depth < max_dim {
                let next = intersect_sorted(candidates, g.out_neighbours(u));
                if !next.is_empty() {
                    count_rec(g, depth + 1, &next, max_dim, counts);
                }
            }
        }
    }

    (0..g.n_vertices() as u32)
        .into_par_iter()
        .map(|root| {
            let mut counts = vec![0usize; max_dim + 1];
            counts[0] = 1;
            if max_dim > 0 {
                count_rec(g, 1, g.out_neighbours(root), max_dim, &mut counts);
            }
            counts
        })
        .reduce(
            || vec![0usize; max_dim + 1],
            |mut a, b| {
                for (x, y) in a.iter_mut().zip(b) {
                    *x += y;
                }
                a
            },
        )
}

/// Alternating sum of simplex counts.
pub fn euler_characteristic(x: &DirectedFlagComplex) -> i64 {
    alternating_sum(x.counts())
}

pub fn alternating_sum(counts: &[usize]) -> i64 {
    counts
        .iter()
        .enumerate()
        .map(|(d, &c)| if d % 2 == 0 { c as i64 } else { -(c as i64) })
        .sum()
}

/// Euler characteristic of the full directed flag complex of `g`.
pub fn euler_characteristic_of(g: &Digraph) -> i64 {
    if g.n_vertices() == 0 {
        return 0;
    }
    alternating_sum(&count_simplices(g, g.n_vertices() - 1))
}

/// Number of directed `(k + 1)`-cliques of `g` that contain `v`.
pub fn simplex_count_containing(g: &Digraph, v: u32, k: usize) -> Result<usize> {
    g.check_vertex(v)?;
    if k == 0 {
        return Err(Error::Domain("clique order k must be at least 1".into()));
    }

    fn count_rec(
        g: &Digraph,
        v: u32,
        has_v: bool,
        depth: usize,
        candidates: &[u32],
        k: usize,
        total: &mut usize,
    ) {
        for &u in candidates {
            let now_has = has_v || u == v;
            if depth == k {
                if now_has {
                    *total += 1;
                }
            } else {
                let next = intersect_sorted(candidates, g.out_neighbours(u));
                if !next.is_empty() {
                    count_rec(g, v, now_has, depth + 1, &next, k, total);
                }
            }
        }
    }

    let mut total = 0usize;
    for root in 0..g.n_vertices() as u32 {
        count_rec(g, v, root == v, 1, g.out_neighbours(root), k, &mut total);
    }
    Ok(total)
}

#[cfg(test)]
pub(crate) mod oracle {
    //! Exhaustive subset-and-ordering enumeration, independent of the
    //! extension walk above. Only usable for tiny graphs.

    use super::*;

    fn orderings(items: &[u32]) -> Vec<Vec<u32>> {
        if items.len() <= 1 {
            return vec![items.to_vec()];
        }
        let mut out = Vec::new();
        for (i, &head) in items.iter().enumerate() {
            let mut rest = items.to_vec();
            rest.remove(i);
            for mut tail in orderings(&rest) {
                let mut o = vec![head];
                o.append(&mut tail);
                out.push(o);
            }
        }
        out
    }

    fn is_directed_clique(g: &Digraph, tuple: &[u32]) -> bool {
        for i in 0..tuple.len() {
            for j in i + 1..tuple.len() {
                if !g.has_edge(tuple[i], tuple[j]) {
                    return false;
                }
            }
        }
        true
    }

    /// All directed cliques of each size, by brute force.
    pub fn brute_force_cliques(g: &Digraph, max_dim: usize) -> Vec<Vec<Vec<u32>>> {
        let n = g.n_vertices();
        let mut per_dim: Vec<Vec<Vec<u32>>> = vec![Vec::new(); max_dim + 1];
        let verts: Vec<u32> = (0..n as u32).collect();
        for mask in 0u32..(1 << n) {
            let subset: Vec<u32> = verts
                .iter()
                .copied()
                .filter(|&v| mask & (1 << v) != 0)
                .collect();
            if subset.is_empty() || subset.len() > max_dim + 1 {
                continue;
            }
            for ordering in orderings(&subset) {
                if is_directed_clique(g, &ordering) {
                    per_dim[subset.len() - 1].push(ordering);
                }
            }
        }
        for bucket in &mut per_dim {
            bucket.sort();
        }
        per_dim
    }

    pub fn brute_force_counts(g: &Digraph, max_dim: usize) -> Vec<usize> {
        brute_force_cliques(g, max_dim)
            .iter()
            .map(|b| b.len())
            .collect()
    }

    pub fn brute_force_containing(g: &Digraph, v: u32, k: usize) -> usize {
        brute_force_cliques(g, k)[k]
            .iter()
            .filter(|c| c.contains(&v))
            .count()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn graph(n: usize, edges: &[(u32, u32)]) -> Digraph {
        Digraph::from_edges(n, edges.iter().copied()).unwrap()
    }

    #[test]
    fn complete_digraph_counts() {
        let x = build_flag_complex(&Digraph::complete(3), 6);
        assert_eq!(&x.counts()[..3], &[3, 6, 6]);
        assert_eq!(x.counts()[3], 0);
        assert!(x.is_fully_built());
    }

    #[test]
    fn cyclic_triangle_has_no_two_simplex() {
        let x = build_flag_complex(&graph(3, &[(0, 1), (1, 2), (2, 0)]), 6);
        assert_eq!(&x.counts()[..3], &[3, 3, 0]);
    }

    #[test]
    fn single_edge_counts() {
        let x = build_flag_complex(&graph(2, &[(0, 1)]), 1);
        assert_eq!(x.counts(), &[2, 1]);
    }

    #[test]
    fn every_stored_face_is_present() {
        let g = crate::simdyn::erdos_renyi(12, 0.4, 31);
        let x = build_flag_complex(&g, 4);
        for d in 1..=4usize {
            let lower: Vec<Vec<u32>> = x.simplices(d - 1).map(|s| s.to_vec()).collect();
            for s in x.simplices(d) {
                for skip in 0..=d {
                    let face: Vec<u32> = s
                        .iter()
                        .enumerate()
                        .filter(|(i, _)| *i != skip)
                        .map(|(_, &v)| v)
                        .collect();
                    assert!(lower.binary_search(&face).is_ok() || lower.contains(&face));
                }
            }
        }
    }

    #[test]
    fn enumeration_matches_brute_force() {
        let mut rng = ChaCha8Rng::seed_from_u64(17);
        for _ in 0..60 {
            let n = 2 + rng.gen_range(0..7usize);
            let p = rng.gen_range(0.1..0.6f64);
            let g = crate::simdyn::erdos_renyi(n, p, rng.gen());
            let cap = n - 1;
            let x = build_flag_complex(&g, cap);
            let brute = oracle::brute_force_cliques(&g, cap);
            for d in 0..=cap {
                let ours: Vec<Vec<u32>> = x.simplices(d).map(|s| s.to_vec()).collect();
                assert_eq!(ours, brute[d], "dim {d} on {:?}", g.edges().collect::<Vec<_>>());
            }
            assert_eq!(count_simplices(&g, cap), oracle::brute_force_counts(&g, cap));
        }
    }

    #[test]
    fn closed_form_on_complete_digraphs() {
        fn falling(n: u64, k: u64) -> u64 {
            (0..k).map(|i| n - i).product()
        }
        for n in 2..=7usize {
            let x = build_flag_complex(&Digraph::complete(n), n - 1);
            for k in 0..n {
                // C(n, k+1) * (k+1)! = n! / (n-k-1)!
                let expect = falling(n as u64, k as u64 + 1);
                assert_eq!(x.counts()[k] as u64, expect, "n={n} k={k}");
            }
        }
    }

    #[test]
    fn euler_characteristic_examples() {
        assert_eq!(euler_characteristic(&build_flag_complex(&Digraph::complete(3), 2)), 3);
        assert_eq!(
            euler_characteristic(&build_flag_complex(&graph(3, &[(0, 1), (1, 2), (2, 0)]), 2)),
            0
        );
        assert_eq!(
            euler_characteristic(&build_flag_complex(&graph(3, &[(0, 1), (1, 2), (0, 2)]), 2)),
            1
        );
        let empty = Digraph::from_edges(0, std::iter::empty()).unwrap();
        assert_eq!(euler_characteristic_of(&empty), 0);
    }

    #[test]
    fn euler_characteristic_additive_over_disjoint_union() {
        let mut rng = ChaCha8Rng::seed_from_u64(23);
        for _ in 0..20 {
            let na = 1 + rng.gen_range(0..5usize);
            let nb = 1 + rng.gen_range(0..5usize);
            let ga = crate::simdyn::erdos_renyi(na, 0.5, rng.gen());
            let gb = crate::simdyn::erdos_renyi(nb, 0.5, rng.gen());
            let union = Digraph::from_edges(
                na + nb,
                ga.edges()
                    .chain(gb.edges().map(|(s, d)| (s + na as u32, d + na as u32))),
            )
            .unwrap();
            assert_eq!(
                euler_characteristic_of(&union),
                euler_characteristic_of(&ga) + euler_characteristic_of(&gb)
            );
        }
    }

    #[test]
    fn containing_counts_examples() {
        let k3 = Digraph::complete(3);
        assert_eq!(simplex_count_containing(&k3, 0, 2).unwrap(), 6);

        let path = graph(3, &[(0, 1), (1, 2)]);
        assert_eq!(simplex_count_containing(&path, 1, 2).unwrap(), 0);

        let transitive = graph(3, &[(0, 1), (1, 2), (0, 2)]);
        assert_eq!(simplex_count_containing(&transitive, 1, 2).unwrap(), 1);
    }

    #[test]
    fn containing_count_of_order_one_is_degree() {
        let g = crate::simdyn::erdos_renyi(10, 0.3, 5);
        for v in 0..10u32 {
            assert_eq!(
                simplex_count_containing(&g, v, 1).unwrap(),
                g.degrees(v).unwrap().total
            );
        }
    }

    #[test]
    fn containing_counts_match_brute_force() {
        let mut rng = ChaCha8Rng::seed_from_u64(41);
        for _ in 0..30 {
            let n = 2 + rng.gen_range(0..6usize);
            let g = crate::simdyn::erdos_renyi(n, 0.4, rng.gen());
            for v in 0..n as u32 {
                for k in 1..n.min(4) {
                    assert_eq!(
                        simplex_count_containing(&g, v, k).unwrap(),
                        oracle::brute_force_containing(&g, v, k)
                    );
                }
            }
        }
    }

    #[test]
    fn dump_lists_every_simplex() {
        let x = build_flag_complex(&graph(2, &[(0, 1)]), 1);
        assert_eq!(x.dump_text(), "0\n1\n0 1\n");
    }
}
