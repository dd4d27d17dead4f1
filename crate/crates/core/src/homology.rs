//! Betti numbers of a directed flag complex over the two-element field, and
//! the normalised Betti coefficient.

use std::collections::HashMap;

use crate::error::{Error, Result};
use crate::flag::DirectedFlagComplex;
use crate::real::Real;

/// Betti numbers by dimension.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BettiVector {
    betti: Vec<usize>,
}

impl BettiVector {
    pub fn as_slice(&self) -> &[usize] {
        &self.betti
    }

    pub fn get(&self, d: usize) -> usize {
        self.betti.get(d).copied().unwrap_or(0)
    }

    pub fn max_dim(&self) -> usize {
        self.betti.len().saturating_sub(1)
    }
}

/// Mod-2 Betti numbers in dimensions `0..=max_dim`.
///
/// The boundary of a `d`-simplex is the mod-2 sum of its `d + 1`
/// order-preserving facets; Betti numbers come from boundary ranks computed
/// by elimination. The complex must either be built to dimension
/// `max_dim + 1` or be fully built, so that no boundary is missing.
pub fn betti_numbers(x: &DirectedFlagComplex, max_dim: usize) -> Result<BettiVector> {
    if x.max_dim() < max_dim + 1 && !x.is_fully_built() {
        return Err(Error::Contract(format!(
            "complex built to dimension {} cannot give Betti numbers up to {}",
            x.max_dim(),
            max_dim
        )));
    }
    let top = x.top_dim();
    let mut ranks = vec![0usize; max_dim + 2];
    if let Some(top) = top {
        let deepest = (max_dim + 1).min(top);
        for d in 1..=deepest {
            ranks[d] = boundary_rank(x, d);
        }
    }
    let betti = (0..=max_dim)
        .map(|d| {
            let s_d = x.counts().get(d).copied().unwrap_or(0);
            let b = s_d as i64 - ranks[d] as i64 - ranks[d + 1] as i64;
            debug_assert!(b >= 0, "negative Betti number in dimension {d}");
            b.max(0) as usize
        })
        .collect();
    Ok(BettiVector { betti })
}

/// Rank of the boundary map from `d`-simplices to `(d - 1)`-simplices.
fn boundary_rank(x: &DirectedFlagComplex, d: usize) -> usize {
    let n_cols = x.counts()[d];
    let n_rows = x.counts()[d - 1];
    if n_cols == 0 || n_rows == 0 {
        return 0;
    }
    let row_index: HashMap<&[u32], u32> = x
        .simplices(d - 1)
        .enumerate()
        .map(|(i, s)| (s, i as u32))
        .collect();

    let mut face = Vec::with_capacity(d);
    let mut columns: Vec<Vec<u32>> = Vec::with_capacity(n_cols);
    for simplex in x.simplices(d) {
        let mut col: Vec<u32> = (0..=d)
            .map(|skip| {
                face.clear();
                face.extend(simplex.iter().enumerate().filter(|(i, _)| *i != skip).map(|(_, &v)| v));
                *row_index
                    .get(face.as_slice())
                    .expect("flag complex is closed under faces")
            })
            .collect();
        col.sort_unstable();
        columns.push(col);
    }

    // Columns arrive in simplex lexicographic order; eliminate left to right.
    if n_cols < 512 {
        dense_rank(columns, n_rows)
    } else {
        sparse_rank(columns, n_rows)
    }
}

/// Bitset elimination for small column counts.
fn dense_rank(columns: Vec<Vec<u32>>, n_rows: usize) -> usize {
    let words = n_rows.div_ceil(64);
    let mut pivot_owner: Vec<Option<usize>> = vec![None; n_rows];
    let mut reduced: Vec<Vec<u64>> = Vec::with_capacity(columns.len());
    let mut rank = 0;
    for col in columns {
        let mut bits = vec![0u64; words];
        for r in col {
            bits[r as usize / 64] ^= 1 << (r % 64);
        }
        loop {
            let Some(low) = highest_bit(&bits) else { break };
            match pivot_owner[low] {
                Some(owner) => {
                    let other = reduced[owner].clone();
                    for (w, o) in bits.iter_mut().zip(other) {
                        *w ^= o;
                    }
                }
                None => {
                    pivot_owner[low] = Some(reduced.len());
                    rank += 1;
                    break;
                }
            }
        }
        reduced.push(bits);
    }
    rank
}

fn highest_bit(words: &[u64]) -> Option<usize> {
    for (i, &w) in words.iter().enumerate().rev() {
        if w != 0 {
            return Some(i * 64 + 63 - w.leading_zeros() as usize);
        }
    }
    None
}

/// Sorted-index elimination for wide boundary matrices.
fn sparse_rank(columns: Vec<Vec<u32>>, n_rows: usize) -> usize {
    let mut pivot_owner: Vec<Option<usize>> = vec![None; n_rows];
    let mut reduced: Vec<Vec<u32>> = Vec::with_capacity(columns.len());
    let mut rank = 0;
    for mut col in columns {
        loop {
            let Some(&low) = col.last() else { break };
            match pivot_owner[low as usize] {
                Some(owner) => col = xor_sorted(&col, &reduced[owner]),
                None => {
                    pivot_owner[low as usize] = Some(reduced.len());
                    rank += 1;
                    break;
                }
            }
        }
        reduced.push(col);
    }
    rank
}

fn xor_sorted(a: &[u32], b: &[u32]) -> Vec<u32> {
    let mut out = Vec::with_capacity(a.len() + b.len());
    let (mut i, mut j) = (0, 0);
    while i < a.len() && j < b.len() {
        match a[i].cmp(&b[j]) {
            std::cmp::Ordering::Less => {
                out.push(a[i]);
                i += 1;
            }
            std::cmp::Ordering::Greater => {
                out.push(b[j]);
                j += 1;
            }
            std::cmp::Ordering::Equal => {
                i += 1;
                j += 1;
            }
        }
    }
    out.extend_from_slice(&a[i..]);
    out.extend_from_slice(&b[j..]);
    out
}

/// The normalised Betti coefficient: `sum_i (i + 1) * betti_i / s_i` over the
/// dimensions with `s_i > 0`, truncated at the Betti vector's depth.
pub fn normalised_betti_coefficient<T: Real>(x: &DirectedFlagComplex, b: &BettiVector) -> T {
    let mut acc = T::zero();
    for (i, &beta) in b.as_slice().iter().enumerate() {
        let s_i = x.counts().get(i).copied().unwrap_or(0);
        if s_i > 0 {
            let weight = T::from_usize(i + 1).expect("small dimension");
            acc += weight * T::from_usize(beta).expect("count fits scalar")
                / T::from_usize(s_i).expect("count fits scalar");
        }
    }
    acc
}
