//! Spectra of the four matrix families attached to a digraph: adjacency,
//! transition probability, Chung Laplacian and Bauer Laplacian, with their
//! reversed variants, plus the spectral radius and both spectral-gap
//! conventions.

use nalgebra::{Complex, DMatrix};

use crate::digraph::Digraph;
use crate::error::{Error, Result};
use crate::real::Real;

/// Eigenvalues of a real square matrix, with moduli sorted descending.
#[derive(Clone, Debug)]
pub struct Spectrum<T: Real> {
    eigenvalues: Vec<Complex<T>>,
    moduli: Vec<T>,
}

impl<T: Real> Spectrum<T> {
    fn from_eigenvalues(eigenvalues: Vec<Complex<T>>) -> Spectrum<T> {
        let mut moduli: Vec<T> = eigenvalues.iter().map(|z| z.re.hypot(z.im)).collect();
        moduli.sort_unstable_by(|a, b| b.partial_cmp(a).expect("moduli are finite"));
        Spectrum { eigenvalues, moduli }
    }

    /// Raw eigenvalues, in solver order.
    pub fn eigenvalues(&self) -> &[Complex<T>] {
        &self.eigenvalues
    }

    /// Eigenvalue moduli, sorted descending, with multiplicity.
    pub fn moduli(&self) -> &[T] {
        &self.moduli
    }

    /// Radius, high gap and low gap of this spectrum.
    pub fn summary(&self) -> SpectralSummary<T> {
        let radius = self.moduli.first().copied().unwrap_or_else(T::zero);
        let gap_high = if self.moduli.len() >= 2 {
            radius - self.moduli[1]
        } else {
            T::zero()
        };
        let tol = nonzero_tolerance(radius);
        let gap_low = self
            .moduli
            .iter()
            .rev()
            .find(|&&m| m > tol)
            .copied()
            .unwrap_or_else(T::zero);
        SpectralSummary {
            radius,
            gap_high,
            gap_low,
        }
    }
}

/// Numerical-zero threshold for "smallest nonzero" eigenvalue moduli.
fn nonzero_tolerance<T: Real>(radius: T) -> T {
    let base = T::of(1e-9).max(T::default_epsilon() * T::of(32.0));
    base * T::one().max(radius)
}

/// Spectral radius and the two spectral-gap conventions of one matrix.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SpectralSummary<T: Real> {
    /// Largest eigenvalue modulus.
    pub radius: T,
    /// Difference between the two largest moduli; zero below dimension two.
    pub gap_high: T,
    /// Smallest nonzero modulus; zero when every eigenvalue is zero.
    pub gap_low: T,
}

impl<T: Real> SpectralSummary<T> {
    pub fn zero() -> SpectralSummary<T> {
        SpectralSummary {
            radius: T::zero(),
            gap_high: T::zero(),
            gap_low: T::zero(),
        }
    }
}

/// The 0/1 adjacency matrix, row = source.
pub fn adjacency_matrix<T: Real>(g: &Digraph) -> DMatrix<T> {
    let n = g.n_vertices();
    let mut m = DMatrix::zeros(n, n);
    for (src, dst) in g.edges() {
        m[(src as usize, dst as usize)] = T::one();
    }
    m
}

/// The transition probability matrix: each row scaled by the reciprocal
/// out-degree, or an all-zero row where the out-degree vanishes. The
/// reversed variant scales by in-degrees instead.
pub fn transition_probability_matrix<T: Real>(g: &Digraph, reversed: bool) -> DMatrix<T> {
    let n = g.n_vertices();
    let mut m = DMatrix::zeros(n, n);
    for v in 0..n as u32 {
        let deg = if reversed {
            g.in_neighbours(v).len()
        } else {
            g.out_neighbours(v).len()
        };
        if deg == 0 {
            continue;
        }
        let w = T::one() / T::from_usize(deg).expect("degree fits scalar");
        for &u in g.out_neighbours(v) {
            m[(v as usize, u as usize)] = w;
        }
    }
    m
}

/// The Bauer Laplacian: row `v` is `e_v` minus the adjacency row scaled by
/// the reciprocal in-degree, or the zero row where the in-degree vanishes.
/// The reversed variant swaps in- for out-degrees.
pub fn bauer_laplacian<T: Real>(g: &Digraph, reversed: bool) -> DMatrix<T> {
    let n = g.n_vertices();
    let mut m = DMatrix::zeros(n, n);
    for v in 0..n as u32 {
        let deg = if reversed {
            g.out_neighbours(v).len()
        } else {
            g.in_neighbours(v).len()
        };
        if deg == 0 {
            continue;
        }
        let w = T::one() / T::from_usize(deg).expect("degree fits scalar");
        m[(v as usize, v as usize)] = T::one();
        for &u in g.out_neighbours(v) {
            m[(v as usize, u as usize)] -= w;
        }
    }
    m
}

/// Complex eigenvalues of a real square matrix via the Schur decomposition.
pub fn matrix_spectrum<T: Real>(m: &DMatrix<T>) -> Result<Spectrum<T>> {
    let n = m.nrows();
    if n == 0 {
        return Ok(Spectrum::from_eigenvalues(Vec::new()));
    }
    let schur = m
        .clone()
        .try_schur(T::default_epsilon(), 100_000)
        .ok_or_else(|| Error::Numeric(format!("eigensolver failed to converge on a {n}x{n} matrix")))?;
    let eig = schur.complex_eigenvalues();
    Ok(Spectrum::from_eigenvalues(eig.iter().copied().collect()))
}

fn summary_of_matrix<T: Real>(g: &Digraph, m: &DMatrix<T>) -> Result<SpectralSummary<T>> {
    if g.n_vertices() < 2 {
        return Ok(SpectralSummary::zero());
    }
    Ok(matrix_spectrum(m)?.summary())
}

/// Spectral summary of the adjacency matrix.
pub fn adjacency_spectrum<T: Real>(g: &Digraph) -> Result<SpectralSummary<T>> {
    summary_of_matrix(g, &adjacency_matrix(g))
}

/// Spectral summary of the (possibly reversed) transition probability matrix.
pub fn transition_spectrum<T: Real>(g: &Digraph, reversed: bool) -> Result<SpectralSummary<T>> {
    summary_of_matrix(g, &transition_probability_matrix(g, reversed))
}

/// Spectral summary of the (possibly reversed) Bauer Laplacian.
pub fn bauer_spectrum<T: Real>(g: &Digraph, reversed: bool) -> Result<SpectralSummary<T>> {
    summary_of_matrix(g, &bauer_laplacian(g, reversed))
}

/// Stationary distribution of the random walk on a strongly connected
/// digraph: the positive left eigenvector of `p`, normalised to sum one.
///
/// Computed by damped power iteration on the transpose, `x <- (x + P^T x)/2`,
/// which converges even on periodic walks. Uniform start, relative L1
/// tolerance `1e-12` (floored at machine precision), 10,000 iteration cap.
pub fn perron_vector<T: Real>(p: &DMatrix<T>) -> Result<Vec<T>> {
    let n = p.nrows();
    if n == 0 {
        return Ok(Vec::new());
    }
    let tol = T::of(1e-12).max(T::default_epsilon() * T::of(8.0));
    let half = T::of(0.5);
    let mut x = nalgebra::DVector::from_element(n, T::one() / T::from_usize(n).expect("n fits"));
    for _ in 0..10_000 {
        let mut next = (p.transpose() * &x + &x) * half;
        let norm: T = next.iter().fold(T::zero(), |acc, &v| acc + v.abs());
        if norm == T::zero() {
            return Err(Error::Numeric("walk iteration collapsed to zero".into()));
        }
        next /= norm;
        let delta: T = next
            .iter()
            .zip(x.iter())
            .fold(T::zero(), |acc, (&a, &b)| acc + (a - b).abs());
        x = next;
        if delta <= tol {
            return Ok(x.iter().copied().collect());
        }
    }
    Err(Error::Numeric(format!(
        "stationary distribution did not converge on a {n}x{n} matrix"
    )))
}

/// Spectral summary of the Chung Laplacian.
///
/// The operation restricts to the largest strongly connected component,
/// builds the transition matrix there, symmetrises it through the square
/// root of the stationary distribution, and reports the spectrum of
/// `I - (S + S^T)/2`. The low gap is the Chung spectral gap. Components of
/// size at most one yield the all-zero summary.
pub fn chung_laplacian_summary<T: Real>(g: &Digraph) -> Result<SpectralSummary<T>> {
    let scc = g.largest_scc();
    if scc.len() <= 1 {
        return Ok(SpectralSummary::zero());
    }
    let sub = g.induced_subgraph(&scc)?;
    let l = chung_laplacian_of_scc::<T>(&sub)?;
    let eigenvalues = l.symmetric_eigenvalues();
    let spectrum = Spectrum::from_eigenvalues(
        eigenvalues.iter().map(|&v| Complex::new(v, T::zero())).collect(),
    );
    let floor = -nonzero_tolerance(spectrum.summary().radius);
    if eigenvalues.iter().any(|&v| v < floor) {
        return Err(Error::Numeric(format!(
            "Chung Laplacian produced a negative eigenvalue {:?}",
            eigenvalues.iter().cloned().fold(T::zero(), T::min)
        )));
    }
    Ok(spectrum.summary())
}

/// The symmetrised Laplacian of a strongly connected digraph.
pub(crate) fn chung_laplacian_of_scc<T: Real>(sub: &Digraph) -> Result<DMatrix<T>> {
    let n = sub.n_vertices();
    let p = transition_probability_matrix::<T>(sub, false);
    let phi = perron_vector(&p)?;
    let sqrt_phi: Vec<T> = phi.iter().map(|&v| v.sqrt()).collect();
    let mut s = DMatrix::zeros(n, n);
    for i in 0..n {
        for j in 0..n {
            if p[(i, j)] != T::zero() {
                s[(i, j)] = sqrt_phi[i] / sqrt_phi[j] * p[(i, j)];
            }
        }
    }
    let half = T::of(0.5);
    let mut l = DMatrix::identity(n, n);
    for i in 0..n {
        for j in 0..n {
            l[(i, j)] -= (s[(i, j)] + s[(j, i)]) * half;
        }
    }
    let mut defect = T::zero();
    for i in 0..n {
        for j in 0..n {
            let a: T = l[(i, j)];
            let b: T = l[(j, i)];
            defect = defect.max((a - b).abs());
        }
    }
    if defect > T::of(1e-12).max(T::default_epsilon() * T::of(8.0)) {
        return Err(Error::Numeric("Chung Laplacian lost symmetry".into()));
    }
    Ok(l)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn graph(n: usize, edges: &[(u32, u32)]) -> Digraph {
        Digraph::from_edges(n, edges.iter().copied()).unwrap()
    }

    fn cycle3() -> Digraph {
        graph(3, &[(0, 1), (1, 2), (2, 0)])
    }

    #[test]
    fn adjacency_closed_forms() {
        let s = adjacency_spectrum::<f64>(&cycle3()).unwrap();
        assert_relative_eq!(s.radius, 1.0, max_relative = 1e-12);
        assert!(s.gap_high.abs() < 1e-12);

        let s = adjacency_spectrum::<f64>(&Digraph::complete(4)).unwrap();
        assert_relative_eq!(s.radius, 3.0, max_relative = 1e-12);
        assert_relative_eq!(s.gap_high, 2.0, max_relative = 1e-12);

        let s = adjacency_spectrum::<f64>(&graph(2, &[(0, 1)])).unwrap();
        assert!(s.radius.abs() < 1e-12);
    }

    #[test]
    fn tiny_graphs_give_zero_summaries() {
        let single = graph(1, &[]);
        assert_eq!(adjacency_spectrum::<f64>(&single).unwrap(), SpectralSummary::zero());
        assert_eq!(bauer_spectrum::<f64>(&single, false).unwrap(), SpectralSummary::zero());
        let empty = Digraph::from_edges(0, std::iter::empty()).unwrap();
        assert_eq!(transition_spectrum::<f64>(&empty, false).unwrap(), SpectralSummary::zero());
        assert_eq!(chung_laplacian_summary::<f64>(&empty).unwrap(), SpectralSummary::zero());
    }

    #[test]
    fn transition_matrix_rows() {
        let p = transition_probability_matrix::<f64>(&cycle3(), false);
        // Each out-degree is one, so the walk is a permutation matrix.
        for v in 0..3 {
            let row: Vec<f64> = (0..3).map(|u| p[(v, u)]).collect();
            assert_eq!(row.iter().filter(|&&x| x == 1.0).count(), 1);
            assert_eq!(row.iter().filter(|&&x| x == 0.0).count(), 2);
        }

        let p = transition_probability_matrix::<f64>(&graph(2, &[(0, 1)]), false);
        assert_eq!(p[(0, 1)], 1.0);
        assert_eq!(p.row(1).iter().copied().sum::<f64>(), 0.0);

        let p = transition_probability_matrix::<f64>(&Digraph::complete(3), false);
        for i in 0..3 {
            for j in 0..3 {
                assert_eq!(p[(i, j)], if i == j { 0.0 } else { 0.5 });
            }
        }
    }

    #[test]
    fn transition_rows_are_exactly_stochastic_or_zero() {
        // Every nonzero entry of a row equals 1/out-degree bit for bit, so
        // the row sums to one as a rational number.
        let g = crate::simdyn::erdos_renyi(12, 0.3, 77);
        let p = transition_probability_matrix::<f64>(&g, false);
        for v in 0..12u32 {
            let deg = g.out_neighbours(v).len();
            let nonzero: Vec<f64> = (0..12).map(|u| p[(v as usize, u)]).filter(|&x| x != 0.0).collect();
            assert_eq!(nonzero.len(), deg);
            for x in nonzero {
                assert_eq!(x, 1.0 / deg as f64);
            }
        }
    }

    #[test]
    fn bauer_closed_forms() {
        let s = bauer_spectrum::<f64>(&cycle3(), false).unwrap();
        assert_relative_eq!(s.radius, 3f64.sqrt(), max_relative = 1e-12);
        assert!(s.gap_high.abs() < 1e-9);
        assert_relative_eq!(s.gap_low, 3f64.sqrt(), max_relative = 1e-9);

        let s = bauer_spectrum::<f64>(&Digraph::complete(2), false).unwrap();
        assert_relative_eq!(s.radius, 2.0, max_relative = 1e-12);
        assert_relative_eq!(s.gap_low, 2.0, max_relative = 1e-12);
    }

    #[test]
    fn bauer_zero_degree_rows_are_zero() {
        let m = bauer_laplacian::<f64>(&graph(2, &[(0, 1)]), false);
        // Vertex 0 has no in-edges: its whole row vanishes, diagonal included.
        assert_eq!(m.row(0).iter().copied().sum::<f64>(), 0.0);
        assert_eq!(m[(1, 1)], 1.0);
    }

    #[test]
    fn chung_closed_forms() {
        let s = chung_laplacian_summary::<f64>(&cycle3()).unwrap();
        assert_relative_eq!(s.radius, 1.5, max_relative = 1e-9);
        assert_relative_eq!(s.gap_low, 1.5, max_relative = 1e-9);

        let s = chung_laplacian_summary::<f64>(&Digraph::complete(2)).unwrap();
        assert_relative_eq!(s.radius, 2.0, max_relative = 1e-9);
        assert_relative_eq!(s.gap_low, 2.0, max_relative = 1e-9);

        let path = graph(3, &[(0, 1), (1, 2)]);
        assert_eq!(chung_laplacian_summary::<f64>(&path).unwrap(), SpectralSummary::zero());
    }

    #[test]
    fn perron_vector_on_periodic_walk() {
        // 0 -> 2, 1 -> 2, 2 -> 0, 2 -> 1: stationary mass (1/4, 1/4, 1/2).
        let g = graph(3, &[(0, 2), (1, 2), (2, 0), (2, 1)]);
        let p = transition_probability_matrix::<f64>(&g, false);
        let phi = perron_vector(&p).unwrap();
        assert_relative_eq!(phi[0], 0.25, max_relative = 1e-9);
        assert_relative_eq!(phi[1], 0.25, max_relative = 1e-9);
        assert_relative_eq!(phi[2], 0.5, max_relative = 1e-9);
        // Left eigenvector check.
        let lhs = p.transpose() * nalgebra::DVector::from_vec(phi.clone());
        for (a, b) in lhs.iter().zip(&phi) {
            assert_relative_eq!(a, b, max_relative = 1e-9);
        }
    }

    #[test]
    fn gap_identity_across_families() {
        let g = crate::simdyn::erdos_renyi(12, 0.3, 3);
        for m in [
            adjacency_matrix::<f64>(&g),
            transition_probability_matrix(&g, false),
            transition_probability_matrix(&g, true),
            bauer_laplacian(&g, false),
            bauer_laplacian(&g, true),
        ] {
            let sp = matrix_spectrum(&m).unwrap();
            let s = sp.summary();
            assert_eq!(sp.moduli().len(), 12);
            assert_relative_eq!(s.gap_high + sp.moduli()[1], s.radius, max_relative = 1e-9);
        }
    }

    #[test]
    fn reversed_on_reversed_graph_matches_original() {
        // The exact spectra coincide; numerically, eigenvalues of defective
        // zero blocks carry O(eps^(1/k)) solver noise, so the comparison
        // stays away from the near-zero cluster.
        let clear = 1e-3;
        let mut rng = ChaCha8Rng::seed_from_u64(13);
        for _ in 0..15 {
            let n = 2 + rng.gen_range(0..10usize);
            let g = crate::simdyn::erdos_renyi(n, rng.gen_range(0.1..0.5), rng.gen());
            let reversed = Digraph::from_edges(n, g.edges().map(|(s, d)| (d, s))).unwrap();

            let pairs = [
                (adjacency_matrix::<f64>(&g), adjacency_matrix::<f64>(&reversed)),
                (
                    transition_probability_matrix::<f64>(&g, false),
                    transition_probability_matrix::<f64>(&reversed, true),
                ),
                (
                    bauer_laplacian::<f64>(&g, false),
                    bauer_laplacian::<f64>(&reversed, true),
                ),
            ];
            for (ma, mb) in pairs {
                let a = matrix_spectrum(&ma).unwrap();
                let b = matrix_spectrum(&mb).unwrap();
                let sa = a.summary();
                let sb = b.summary();
                assert_relative_eq!(sa.radius, sb.radius, max_relative = 1e-6, epsilon = 1e-4);
                assert_relative_eq!(sa.gap_high, sb.gap_high, max_relative = 1e-6, epsilon = 1e-4);
                let big_a: Vec<f64> = a.moduli().iter().copied().filter(|&m| m > clear).collect();
                let big_b: Vec<f64> = b.moduli().iter().copied().filter(|&m| m > clear).collect();
                assert_eq!(big_a.len(), big_b.len());
                for (x, y) in big_a.iter().zip(&big_b) {
                    assert_relative_eq!(x, y, max_relative = 1e-4, epsilon = 1e-6);
                }
            }
        }
    }

    /// Walk eigenvalues with the Perron root removed.
    fn nontrivial_walk_eigenvalues(g: &Digraph) -> Vec<Complex<f64>> {
        let p = transition_probability_matrix::<f64>(g, false);
        let eig = matrix_spectrum(&p).unwrap();
        let mut rhos: Vec<Complex<f64>> = eig.eigenvalues().to_vec();
        let perron = rhos
            .iter()
            .enumerate()
            .min_by(|(_, a), (_, b)| {
                let da = (**a - Complex::new(1.0, 0.0)).norm_sqr();
                let db = (**b - Complex::new(1.0, 0.0)).norm_sqr();
                da.partial_cmp(&db).unwrap()
            })
            .map(|(i, _)| i)
            .unwrap();
        rhos.remove(perron);
        rhos
    }

    #[test]
    fn chung_gap_bounded_by_walk_real_parts() {
        let mut rng = ChaCha8Rng::seed_from_u64(29);
        for _ in 0..30 {
            let n = 3 + rng.gen_range(0..15usize);
            let g = crate::simdyn::strongly_connected_erdos_renyi(n, rng.gen_range(0.1..0.5), rng.gen());
            let lambda = chung_laplacian_summary::<f64>(&g).unwrap().gap_low;
            let rhos = nontrivial_walk_eigenvalues(&g);
            let upper = rhos.iter().map(|z| 1.0 - z.re).fold(f64::INFINITY, f64::min);
            assert!(lambda <= upper + 1e-6, "lambda {lambda} upper {upper}");
        }
    }

    #[test]
    fn chung_gap_can_undershoot_walk_moduli() {
        // Exact counterexample to the converse bound min(1 - |rho_i|) <= lambda:
        // here the walk spectrum is {1, 1/2, -1/2, -1/2, -1/2}, so that bound
        // would be 1/2, while lambda = (9 - sqrt 33)/8 < 1/2. The Laplacian
        // symmetrisation of a non-normal walk can push its low gap below the
        // modulus gap of the walk itself.
        let g = graph(
            5,
            &[(0, 1), (0, 2), (1, 3), (1, 4), (2, 0), (3, 1), (3, 4), (4, 0), (4, 3)],
        );
        let lambda = chung_laplacian_summary::<f64>(&g).unwrap().gap_low;
        let expected = (9.0 - 33f64.sqrt()) / 8.0;
        assert_relative_eq!(lambda, expected, max_relative = 1e-10);
        let rhos = nontrivial_walk_eigenvalues(&g);
        let moduli_gap = rhos.iter().map(|z| 1.0 - z.norm()).fold(f64::INFINITY, f64::min);
        assert_relative_eq!(moduli_gap, 0.5, max_relative = 1e-10);
        assert!(lambda < moduli_gap - 0.09);
    }

    #[test]
    fn f32_instantiation_tracks_f64() {
        let g = crate::simdyn::erdos_renyi(8, 0.4, 19);
        let a64 = adjacency_spectrum::<f64>(&g).unwrap();
        let a32 = adjacency_spectrum::<f32>(&g).unwrap();
        assert!((a64.radius - a32.radius as f64).abs() < 1e-4);
        let c64 = chung_laplacian_summary::<f64>(&g).unwrap();
        let c32 = chung_laplacian_summary::<f32>(&g).unwrap();
        assert!((c64.gap_low - c32.gap_low as f64).abs() < 1e-3);
    }
}
