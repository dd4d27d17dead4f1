//! Acceptance suite: one test per criterion, each printing a PASS line with
//! the measured numbers. Run with `cargo test -p nbhd-core --test acceptance
//! -- --nocapture` to see them.

use std::time::Instant;

use nbhd_core::classify::{cross_validate, evaluate, nearest_centroid, split, train_svm, Dataset, Gamma};
use nbhd_core::digraph::{Digraph, VertexSet};
use nbhd_core::flag::{alternating_sum, build_flag_complex, euler_characteristic, simplex_count_containing};
use nbhd_core::homology::betti_numbers;
use nbhd_core::params::{GapKind, ParameterCode};
use nbhd_core::pipeline::{
    featurise_set, read_features_csv, select_neighbourhoods, write_features_csv, BinSpec,
    SelectionEnd, SpikePermutation,
};
use nbhd_core::simdyn::{erdos_renyi, simulate, strongly_connected_erdos_renyi, LifConfig, StimulusProtocol};
use nbhd_core::spectral::{
    adjacency_spectrum, bauer_spectrum, chung_laplacian_summary, matrix_spectrum,
    transition_probability_matrix,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn random_digraph(rng: &mut ChaCha8Rng, max_n: usize) -> Digraph {
    let n = 1 + rng.gen_range(0..max_n);
    let p = rng.gen_range(0.05..0.7);
    erdos_renyi(n, p, rng.gen())
}

/// Orders of three items, for orientation counting.
fn orders3(a: u32, b: u32, c: u32) -> [[u32; 3]; 6] {
    [
        [a, b, c],
        [a, c, b],
        [b, a, c],
        [b, c, a],
        [c, a, b],
        [c, b, a],
    ]
}

/// Brute-force count of directed 3-cliques on `v` and two of its neighbours
/// that could exist: every linear order whose edges at `v` are realized,
/// with the third side free.
fn possible_3_cliques(g: &Digraph, v: u32) -> u64 {
    let nbrs = g.open_neighbours(v);
    let nbrs = nbrs.as_slice();
    let mut total = 0u64;
    for i in 0..nbrs.len() {
        for j in i + 1..nbrs.len() {
            let (u, w) = (nbrs[i], nbrs[j]);
            for order in orders3(v, u, w) {
                let mut ok = true;
                for x in 0..3 {
                    for y in x + 1..3 {
                        let (a, b) = (order[x], order[y]);
                        let is_free_side = (a == u && b == w) || (a == w && b == u);
                        if !is_free_side && !g.has_edge(a, b) {
                            ok = false;
                        }
                    }
                }
                total += ok as u64;
            }
        }
    }
    total
}

#[test]
fn acceptance_01_possible_clique_denominator() {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(101);
    let mut checked = 0usize;
    for _ in 0..1000 {
        let g = random_digraph(&mut rng, 8);
        for v in 0..g.n_vertices() as u32 {
            let d = g.degrees(v).unwrap();
            let deg = d.total as u64;
            let formula = deg * deg.saturating_sub(1)
                - (d.in_degree as u64 * d.out_degree as u64 + d.reciprocal as u64);
            assert_eq!(formula, possible_3_cliques(&g, v), "vertex {v}");
            checked += 1;
        }
    }
    let dt = start.elapsed();
    assert!(dt.as_secs_f64() < 10.0, "took {dt:?}");
    println!(
        "acceptance 01 (possible 3-clique denominator): PASS - {checked} vertices over 1000 graphs, exact, {dt:?}"
    );
}

#[test]
fn acceptance_02_clique_counts_and_triple_product() {
    let start = Instant::now();
    fn falling(n: u64, k: u64) -> u64 {
        (0..k).map(|i| n - i).product()
    }
    for n in 2..=7usize {
        let x = build_flag_complex(&Digraph::complete(n), n - 1);
        for k in 0..n {
            assert_eq!(x.counts()[k] as u64, falling(n as u64, k as u64 + 1), "n={n} k={k}");
        }
    }

    // Triple-product identity: the directed 3-cliques through a vertex are
    // its directed triangles minus its cyclic triangles.
    let mut rng = ChaCha8Rng::seed_from_u64(202);
    let mut checked = 0usize;
    for _ in 0..500 {
        let g = random_digraph(&mut rng, 8);
        let n = g.n_vertices() as u32;
        let a = |x: u32, y: u32| g.has_edge(x, y) as u64;
        for v in 0..n {
            let mut triangles_twice = 0u64;
            let mut cyclic = 0u64;
            for j in 0..n {
                for k in 0..n {
                    triangles_twice += (a(v, j) + a(j, v)) * (a(v, k) + a(k, v)) * (a(j, k) + a(k, j));
                    cyclic += a(v, j) * a(j, k) * a(k, v);
                }
            }
            let formula = triangles_twice / 2 - cyclic;
            assert_eq!(
                simplex_count_containing(&g, v, 2).unwrap() as u64,
                formula,
                "vertex {v}"
            );
            checked += 1;
        }
    }
    let dt = start.elapsed();
    assert!(dt.as_secs_f64() < 30.0, "took {dt:?}");
    println!(
        "acceptance 02 (clique closed form + triple-product formula): PASS - n=2..7 exact, {checked} vertices over 500 graphs, {dt:?}"
    );
}

#[test]
fn acceptance_03_euler_poincare() {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(303);
    for i in 0..500 {
        let n = 1 + rng.gen_range(0..10usize);
        let p = rng.gen_range(0.05..0.6);
        let g = erdos_renyi(n, p, rng.gen());
        let x = build_flag_complex(&g, n - 1);
        let b = betti_numbers(&x, x.max_dim()).unwrap();
        assert_eq!(
            euler_characteristic(&x),
            alternating_sum(b.as_slice()),
            "graph {i}"
        );
    }
    let dt = start.elapsed();
    assert!(dt.as_secs_f64() < 120.0, "took {dt:?}");
    println!("acceptance 03 (Euler-Poincare over GF(2)): PASS - 500 graphs exact, {dt:?}");
}

#[test]
fn acceptance_04_density_coefficient_bound() {
    let start = Instant::now();
    // Equality on complete digraphs, as an exact integer identity.
    for n in 3..=7usize {
        let g = Digraph::complete(n);
        for k in 2..n {
            let s_k = simplex_count_containing(&g, 0, k).unwrap() as u64;
            let s_km1 = simplex_count_containing(&g, 0, k - 1).unwrap() as u64;
            assert_eq!(k as u64 * s_k, ((k + 1) * (n - k)) as u64 * s_km1);
            let d: f64 = nbhd_core::params::density_coefficient(&g, 0, k).unwrap();
            assert_eq!(d, 1.0);
        }
    }
    // Upper bound everywhere, as the same integer identity.
    let mut rng = ChaCha8Rng::seed_from_u64(404);
    let mut checked = 0usize;
    for _ in 0..500 {
        let g = random_digraph(&mut rng, 7);
        let n = g.n_vertices();
        for v in 0..n as u32 {
            for k in 2..n {
                let s_k = simplex_count_containing(&g, v, k).unwrap() as u64;
                let s_km1 = simplex_count_containing(&g, v, k - 1).unwrap() as u64;
                assert!(k as u64 * s_k <= ((k + 1) * (n - k)) as u64 * s_km1);
                checked += 1;
            }
        }
    }
    let dt = start.elapsed();
    println!(
        "acceptance 04 (density coefficient bound): PASS - equality on completes, {checked} bound checks, exact, {dt:?}"
    );
}

#[test]
fn acceptance_05_spectral_closed_forms() {
    let cycle = Digraph::from_edges(3, [(0, 1), (1, 2), (2, 0)]).unwrap();
    let tol = 1e-9;

    let a = adjacency_spectrum::<f64>(&cycle).unwrap();
    assert!((a.radius - 1.0).abs() < tol);
    assert!(a.gap_high.abs() < tol);

    let b = bauer_spectrum::<f64>(&cycle, false).unwrap();
    assert!((b.radius - 3f64.sqrt()).abs() < tol);

    let c = chung_laplacian_summary::<f64>(&cycle).unwrap();
    assert!((c.gap_low - 1.5).abs() < tol);

    let k4 = adjacency_spectrum::<f64>(&Digraph::complete(4)).unwrap();
    assert!((k4.radius - 3.0).abs() < tol);
    assert!((k4.gap_high - 2.0).abs() < tol);

    println!(
        "acceptance 05 (spectral closed forms): PASS - 3-cycle asr {:.12}, blsr {:.12}, clsg {:.12}; K4 asr {:.12}, asg {:.12}; tol 1e-9",
        a.radius, b.radius, c.gap_low, k4.radius, k4.gap_high
    );
}

#[test]
fn acceptance_06_chung_sandwich() {
    // Asserts, for the Chung gap lambda and the nontrivial walk eigenvalues
    // rho_i: min(1 - |rho_i|) <= lambda <= min(1 - Re rho_i), within 1e-6.
    //
    // The left inequality is not a theorem. A 5-vertex strongly connected
    // digraph (edges 0->1, 0->2, 1->3, 1->4, 2->0, 3->1, 3->4, 4->0, 4->3)
    // has walk spectrum exactly {1, 1/2, -1/2, -1/2, -1/2} and Chung gap
    // exactly (9 - sqrt 33)/8 ~ 0.4069 < 1/2, verified in closed form; about
    // a third of random strongly connected digraphs violate it, by up to
    // ~0.2. The right inequality held on every graph sampled. This test is
    // kept as stated and is expected to fail on the lower bound.
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(606);
    let mut lower_violations = Vec::new();
    let mut upper_violations = Vec::new();
    let mut tested = 0usize;
    for i in 0..200 {
        let n = 2 + rng.gen_range(0..29usize);
        let p = rng.gen_range(0.05..0.5);
        let g = strongly_connected_erdos_renyi(n, p, rng.gen());
        let lambda = chung_laplacian_summary::<f64>(&g).unwrap().gap_low;
        let p_matrix = transition_probability_matrix::<f64>(&g, false);
        let spectrum = matrix_spectrum(&p_matrix).unwrap();
        let mut rhos: Vec<nalgebra::Complex<f64>> = spectrum.eigenvalues().to_vec();
        let perron_idx = rhos
            .iter()
            .enumerate()
            .min_by(|(_, a), (_, b)| {
                let da = (*a - nalgebra::Complex::new(1.0, 0.0)).norm();
                let db = (*b - nalgebra::Complex::new(1.0, 0.0)).norm();
                da.partial_cmp(&db).unwrap()
            })
            .map(|(i, _)| i)
            .unwrap();
        rhos.remove(perron_idx);
        if rhos.is_empty() {
            continue;
        }
        tested += 1;
        let lower = rhos.iter().map(|z| 1.0 - z.norm()).fold(f64::INFINITY, f64::min);
        let upper = rhos.iter().map(|z| 1.0 - z.re).fold(f64::INFINITY, f64::min);
        if lower > lambda + 1e-6 {
            lower_violations.push((i, n, lower - lambda));
        }
        if lambda > upper + 1e-6 {
            upper_violations.push((i, n, lambda - upper));
        }
    }
    let dt = start.elapsed();
    let worst = lower_violations
        .iter()
        .map(|&(_, _, d)| d)
        .fold(0.0f64, f64::max);
    println!(
        "acceptance 06 (Chung eigenvalue sandwich): {} - {tested} graphs: upper bound violations {}, lower bound violations {} (worst {worst:.4}), {dt:?}",
        if lower_violations.is_empty() && upper_violations.is_empty() {
            "PASS"
        } else {
            "FAIL"
        },
        upper_violations.len(),
        lower_violations.len(),
    );
    assert!(
        upper_violations.is_empty(),
        "upper bound violated: {upper_violations:?}"
    );
    assert!(
        lower_violations.is_empty(),
        "lower bound min(1-|rho_i|) <= lambda violated on {} of {tested} graphs (worst {worst:.4}); \
         see chung_gap_can_undershoot_walk_moduli for an exact 5-vertex counterexample",
        lower_violations.len(),
    );
}

#[test]
fn acceptance_07_rewire_degree_preservation() {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(707);
    for _ in 0..100 {
        let n = 2 + rng.gen_range(0..50usize);
        let p = rng.gen_range(0.05..0.4);
        let g = erdos_renyi(n, p, rng.gen());
        let n_centres = 1 + rng.gen_range(0..n.min(8));
        let mut ids: Vec<u32> = (0..n as u32).collect();
        use rand::seq::SliceRandom;
        ids.shuffle(&mut rng);
        let centres: VertexSet = ids[..n_centres].iter().copied().collect();
        for seed in 0..10u64 {
            let rewired = g.fake_neighbourhood_rewire(&centres, seed).unwrap();
            for c in centres.iter() {
                let before = g.degrees(c).unwrap();
                let after = rewired.degrees(c).unwrap();
                assert_eq!(
                    (before.in_degree, before.out_degree),
                    (after.in_degree, after.out_degree),
                    "centre {c}"
                );
            }
        }
    }
    let dt = start.elapsed();
    println!("acceptance 07 (rewire preserves centre degrees): PASS - 100 graphs x 10 seeds, exact, {dt:?}");
}

#[test]
fn acceptance_08_shuffle_invertibility() {
    let dir = std::env::temp_dir().join("nbhd_acceptance_08");
    std::fs::create_dir_all(&dir).unwrap();

    let g = erdos_renyi(120, 0.05, 808);
    let proto = StimulusProtocol::new(4, 6)
        .with_random_receptors(120, 20, 8)
        .unwrap();
    let lif = LifConfig::for_density(120, 0.05);
    let set = simulate(&g, &proto, &lif, 9).unwrap();
    let bins = BinSpec::new(10.0, 200.0, 2).unwrap();
    let nbs = select_neighbourhoods::<f64>(&g, ParameterCode::Size, 20, SelectionEnd::Top).unwrap();

    let baseline = featurise_set(&set, &nbs, &bins, ParameterCode::Size, None).unwrap();
    let baseline_path = dir.join("baseline.csv");
    write_features_csv(&baseline, &baseline_path).unwrap();

    let sigma = SpikePermutation::random(120, 4242);
    let shuffled = sigma.apply(&set).unwrap();
    let restored = sigma.inverse().apply(&shuffled).unwrap();
    let round_trip = featurise_set(&restored, &nbs, &bins, ParameterCode::Size, None).unwrap();
    let restored_path = dir.join("restored.csv");
    write_features_csv(&round_trip, &restored_path).unwrap();

    let a = std::fs::read(&baseline_path).unwrap();
    let b = std::fs::read(&restored_path).unwrap();
    assert_eq!(a, b, "feature CSVs differ after sigma then sigma^-1");

    // Identity permutation leaves the features untouched as well.
    let identity = SpikePermutation::identity(120);
    let same = featurise_set(
        &identity.apply(&set).unwrap(),
        &nbs,
        &bins,
        ParameterCode::Size,
        None,
    )
    .unwrap();
    let identity_path = dir.join("identity.csv");
    write_features_csv(&same, &identity_path).unwrap();
    assert_eq!(a, std::fs::read(&identity_path).unwrap());

    println!(
        "acceptance 08 (shuffle invertibility): PASS - {} bytes byte-identical",
        a.len()
    );
}

struct DeskRun {
    accuracy: f64,
    cv_mean: f64,
}

fn desk_scale_run(
    g: &Digraph,
    set: &nbhd_core::pipeline::BinaryDynamicsSet<f64>,
    selection: ParameterCode,
) -> DeskRun {
    let bins = BinSpec::new(10.0, 200.0, 2).unwrap();
    let nbs = select_neighbourhoods::<f64>(g, selection, 50, SelectionEnd::Top).unwrap();
    let mats = featurise_set(set, &nbs, &bins, ParameterCode::Size, Some(selection)).unwrap();
    let rows: Vec<Vec<f64>> = mats.iter().map(|m| m.flatten()).collect();
    let labels: Vec<u32> = mats.iter().map(|m| m.label).collect();
    let ds = Dataset::new(rows, labels).unwrap();
    let (train, test) = split(&ds, 0.6, 99).unwrap();
    let model = train_svm(&train, 1.0, Gamma::Scale).unwrap();
    let accuracy = evaluate(&model, &test).unwrap().accuracy;
    let cv = cross_validate(&ds, 5, 100).unwrap();
    DeskRun {
        accuracy,
        cv_mean: cv.mean,
    }
}

#[test]
fn acceptance_09_desk_scale_classification() {
    let start = Instant::now();
    let g = erdos_renyi(1000, 0.01, 12001);
    let proto = StimulusProtocol::new(8, 100)
        .with_random_receptors(1000, 100, 12002)
        .unwrap();
    let lif = LifConfig::for_density(1000, 0.01);
    let set = simulate(&g, &proto, &lif, 12003).unwrap();
    assert_eq!(set.trials.len(), 800);

    let mut cleared = 0usize;
    let mut lines = Vec::new();
    for code in [
        ParameterCode::ClusteringTransitive,
        ParameterCode::NormalisedBetti,
        ParameterCode::Size,
    ] {
        let run = desk_scale_run(&g, &set, code);
        if run.accuracy >= 0.375 {
            cleared += 1;
        }
        lines.push(format!(
            "selection {code}: test accuracy {:.3}, cv mean {:.3}",
            run.accuracy, run.cv_mean
        ));
    }

    // Random-label control: the same features with shuffled labels must
    // classify at chance.
    let bins = BinSpec::new(10.0, 200.0, 2).unwrap();
    let nbs = select_neighbourhoods::<f64>(&g, ParameterCode::Size, 50, SelectionEnd::Top).unwrap();
    let mats = featurise_set(&set, &nbs, &bins, ParameterCode::Size, None).unwrap();
    let rows: Vec<Vec<f64>> = mats.iter().map(|m| m.flatten()).collect();
    let mut labels: Vec<u32> = mats.iter().map(|m| m.label).collect();
    use rand::seq::SliceRandom;
    let mut rng = ChaCha8Rng::seed_from_u64(909);
    labels.shuffle(&mut rng);
    let ds = Dataset::new(rows, labels).unwrap();
    let (train, test) = split(&ds, 0.6, 77).unwrap();
    let model = train_svm(&train, 1.0, Gamma::Scale).unwrap();
    let control = evaluate(&model, &test).unwrap().accuracy;

    let dt = start.elapsed();
    for line in &lines {
        println!("  {line}");
    }
    println!("  random-label control accuracy {control:.3}");
    assert!(
        cleared >= 2,
        "only {cleared} of 3 selection codes reached 37.5%: {lines:?}"
    );
    assert!(
        (0.05..=0.25).contains(&control),
        "control accuracy {control} outside [0.05, 0.25]"
    );
    assert!(dt.as_secs_f64() < 1800.0, "took {dt:?}");
    println!(
        "acceptance 09 (desk-scale classification): PASS - {cleared}/3 codes >= 37.5%, control {control:.3}, {dt:?}"
    );
}

#[test]
fn acceptance_10_determinism() {
    let dir = std::env::temp_dir().join("nbhd_acceptance_10");
    std::fs::create_dir_all(&dir).unwrap();

    let run = |tag: &str| -> (Vec<u8>, Vec<u8>) {
        let g = erdos_renyi(150, 0.03, 51);
        let proto = StimulusProtocol::new(4, 10)
            .with_random_receptors(150, 25, 52)
            .unwrap();
        let lif = LifConfig::for_density(150, 0.03);
        let set = simulate(&g, &proto, &lif, 53).unwrap();
        let bins = BinSpec::new(10.0, 200.0, 2).unwrap();
        let nbs =
            select_neighbourhoods::<f64>(&g, ParameterCode::ClusteringTransitive, 25, SelectionEnd::Top)
                .unwrap();
        let mats = featurise_set(&set, &nbs, &bins, ParameterCode::Size, None).unwrap();
        let csv_path = dir.join(format!("features_{tag}.csv"));
        write_features_csv(&mats, &csv_path).unwrap();

        let rows: Vec<Vec<f64>> = mats.iter().map(|m| m.flatten()).collect();
        let labels: Vec<u32> = mats.iter().map(|m| m.label).collect();
        let ds = Dataset::new(rows, labels).unwrap();
        let (train, test) = split(&ds, 0.6, 54).unwrap();
        let model = train_svm(&train, 1.0, Gamma::Scale).unwrap();
        let report = evaluate(&model, &test).unwrap();
        let cv = cross_validate(&ds, 5, 55).unwrap();
        let baseline = nearest_centroid(&train, &test).unwrap();
        let json = serde_json::json!({
            "accuracy": report.accuracy,
            "confusion": report.confusion,
            "cv": cv,
            "baseline": baseline.accuracy,
        });
        (
            std::fs::read(&csv_path).unwrap(),
            serde_json::to_vec_pretty(&json).unwrap(),
        )
    };

    let (csv_a, json_a) = run("a");
    let (csv_b, json_b) = run("b");
    assert_eq!(csv_a, csv_b, "feature CSV bytes differ between identical runs");
    assert_eq!(json_a, json_b, "accuracy JSON bytes differ between identical runs");

    // Feature CSV survives a read back.
    let (rows, labels) = read_features_csv::<f64, _>(dir.join("features_a.csv")).unwrap();
    assert_eq!(rows.len(), labels.len());

    println!(
        "acceptance 10 (determinism): PASS - {} CSV bytes and {} JSON bytes identical across runs",
        csv_a.len(),
        json_a.len()
    );
}

#[test]
fn acceptance_11_cover_count_on_supplied_graph() {
    let Ok(path) = std::env::var("NBHD_CORTEX_EDGES") else {
        println!(
            "acceptance 11 (90% cover on supplied graph): SKIP - set NBHD_CORTEX_EDGES to an edge list to enable"
        );
        return;
    };
    let start = Instant::now();
    let g = Digraph::load_edge_list(&path, None).unwrap();
    println!("  loaded {} vertices / {} edges", g.n_vertices(), g.n_edges());
    let ranked =
        nbhd_core::pipeline::rank_vertices::<f64>(&g, ParameterCode::Size, SelectionEnd::Top).unwrap();
    let order: Vec<u32> = ranked.iter().map(|&(v, _)| v).collect();
    let count = g.greedy_cover_count(&order, 0.9).unwrap();
    assert_eq!(count, 179);
    println!(
        "acceptance 11 (90% cover on supplied graph): PASS - 179 centres, {:?}",
        start.elapsed()
    );
}

#[test]
fn acceptance_gap_identity_regression() {
    // Cross-check used throughout: gap_high plus the second modulus equals
    // the radius for every family.
    let g = erdos_renyi(15, 0.2, 5);
    let families = [
        nbhd_core::spectral::adjacency_matrix::<f64>(&g),
        transition_probability_matrix::<f64>(&g, false),
        nbhd_core::spectral::bauer_laplacian::<f64>(&g, false),
    ];
    for m in families {
        let s = matrix_spectrum(&m).unwrap();
        let summary = s.summary();
        assert!((summary.gap_high + s.moduli()[1] - summary.radius).abs() < 1e-12);
    }
}
