//! Classification of flattened feature matrices: a one-versus-one RBF-kernel
//! support vector machine trained by sequential minimal optimization, a
//! nearest-centroid baseline, stratified splitting and cross-validation.

use std::collections::BTreeMap;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::real::Real;

/// Labelled feature rows of a fixed width.
#[derive(Clone, Debug)]
pub struct Dataset<T: Real> {
    width: usize,
    rows: Vec<Vec<T>>,
    labels: Vec<u32>,
}

impl<T: Real> Dataset<T> {
    pub fn new(rows: Vec<Vec<T>>, labels: Vec<u32>) -> Result<Dataset<T>> {
        if rows.len() != labels.len() {
            return Err(Error::Validation(format!(
                "{} rows with {} labels",
                rows.len(),
                labels.len()
            )));
        }
        let width = rows.first().map_or(0, Vec::len);
        for (i, row) in rows.iter().enumerate() {
            if row.len() != width {
                return Err(Error::Validation(format!(
                    "row {i} has width {}, expected {width}",
                    row.len()
                )));
            }
            if row.iter().any(|v| !v.as_f64().is_finite()) {
                return Err(Error::Validation(format!("row {i} contains a non-finite value")));
            }
        }
        Ok(Dataset { width, rows, labels })
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn rows(&self) -> &[Vec<T>] {
        &self.rows
    }

    pub fn labels(&self) -> &[u32] {
        &self.labels
    }

    /// Distinct labels, ascending.
    pub fn classes(&self) -> Vec<u32> {
        let mut out = self.labels.clone();
        out.sort_unstable();
        out.dedup();
        out
    }

    fn by_class(&self) -> BTreeMap<u32, Vec<usize>> {
        let mut map: BTreeMap<u32, Vec<usize>> = BTreeMap::new();
        for (i, &l) in self.labels.iter().enumerate() {
            map.entry(l).or_default().push(i);
        }
        map
    }

    fn subset(&self, idx: &[usize]) -> Dataset<T> {
        Dataset {
            width: self.width,
            rows: idx.iter().map(|&i| self.rows[i].clone()).collect(),
            labels: idx.iter().map(|&i| self.labels[i]).collect(),
        }
    }
}

/// Stratified train/test split: per-class proportions preserved to within
/// one row, shuffled by the seed.
pub fn split<T: Real>(
    ds: &Dataset<T>,
    train_fraction: f64,
    seed: u64,
) -> Result<(Dataset<T>, Dataset<T>)> {
    if !(train_fraction > 0.0 && train_fraction < 1.0) {
        return Err(Error::Validation(format!(
            "train fraction {train_fraction} must lie strictly between 0 and 1"
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut train_idx = Vec::new();
    let mut test_idx = Vec::new();
    for (label, mut idx) in ds.by_class() {
        if idx.len() < 2 {
            return Err(Error::Validation(format!(
                "class {label} has fewer than 2 rows"
            )));
        }
        idx.shuffle(&mut rng);
        let n_train = ((train_fraction * idx.len() as f64).round() as usize).clamp(1, idx.len() - 1);
        train_idx.extend_from_slice(&idx[..n_train]);
        test_idx.extend_from_slice(&idx[n_train..]);
    }
    Ok((ds.subset(&train_idx), ds.subset(&test_idx)))
}

/// Per-feature standardization statistics fitted on the training set.
#[derive(Clone, Debug)]
pub struct Scaler<T: Real> {
    mean: Vec<T>,
    std: Vec<T>,
}

impl<T: Real> Scaler<T> {
    fn fit(ds: &Dataset<T>) -> Scaler<T> {
        let n = T::from_usize(ds.len().max(1)).expect("row count fits scalar");
        let width = ds.width();
        let mut mean = vec![T::zero(); width];
        for row in ds.rows() {
            for (m, &v) in mean.iter_mut().zip(row) {
                *m += v;
            }
        }
        for m in &mut mean {
            *m /= n;
        }
        let mut var = vec![T::zero(); width];
        for row in ds.rows() {
            for ((s, &v), &m) in var.iter_mut().zip(row).zip(&mean) {
                let d = v - m;
                *s += d * d;
            }
        }
        let std = var
            .into_iter()
            .map(|s| {
                let v = (s / n).sqrt();
                if v > T::zero() {
                    v
                } else {
                    T::one()
                }
            })
            .collect();
        Scaler { mean, std }
    }

    fn transform(&self, row: &[T]) -> Vec<T> {
        row.iter()
            .zip(&self.mean)
            .zip(&self.std)
            .map(|((&v, &m), &s)| (v - m) / s)
            .collect()
    }
}

/// Kernel bandwidth choice.
#[derive(Clone, Copy, Debug)]
pub enum Gamma<T: Real> {
    /// `1 / (width * variance)` of the standardized training matrix.
    Scale,
    Fixed(T),
}

/// One pairwise soft-margin machine.
#[derive(Clone, Debug)]
struct PairMachine<T: Real> {
    pos: u32,
    neg: u32,
    vectors: Vec<Vec<T>>,
    /// `alpha_i * y_i` per support vector.
    coef: Vec<T>,
    bias: T,
}

impl<T: Real> PairMachine<T> {
    fn decision(&self, x: &[T], gamma: T) -> T {
        let mut f = self.bias;
        for (sv, &c) in self.vectors.iter().zip(&self.coef) {
            f += c * rbf(sv, x, gamma);
        }
        f
    }
}

fn rbf<T: Real>(a: &[T], b: &[T], gamma: T) -> T {
    let mut sq = T::zero();
    for (&x, &y) in a.iter().zip(b) {
        let d = x - y;
        sq += d * d;
    }
    (-gamma * sq).exp()
}

/// A trained one-versus-one RBF support vector machine.
#[derive(Clone, Debug)]
pub struct TrainedModel<T: Real> {
    classes: Vec<u32>,
    scaler: Scaler<T>,
    gamma: T,
    machines: Vec<PairMachine<T>>,
}

impl<T: Real> TrainedModel<T> {
    pub fn classes(&self) -> &[u32] {
        &self.classes
    }

    pub fn gamma(&self) -> T {
        self.gamma
    }

    /// Majority vote over the pairwise machines; ties go to the lowest
    /// class id.
    pub fn predict(&self, row: &[T]) -> u32 {
        let x = self.scaler.transform(row);
        let mut votes: BTreeMap<u32, usize> = BTreeMap::new();
        for m in &self.machines {
            let winner = if m.decision(&x, self.gamma) >= T::zero() {
                m.pos
            } else {
                m.neg
            };
            *votes.entry(winner).or_insert(0) += 1;
        }
        let mut best = self.classes[0];
        let mut best_votes = 0usize;
        for &class in &self.classes {
            let v = votes.get(&class).copied().unwrap_or(0);
            if v > best_votes {
                best = class;
                best_votes = v;
            }
        }
        best
    }
}

const SMO_TOLERANCE: f64 = 1e-3;
const SMO_MAX_ITER: usize = 1_000_000;

/// Trains the one-versus-one machine with feature standardization.
///
/// Defaults are pinned: `c = 1`, gamma scale, SMO tolerance `1e-3`, one
/// million iterations per class pair.
pub fn train_svm<T: Real>(train: &Dataset<T>, c: T, gamma: Gamma<T>) -> Result<TrainedModel<T>> {
    let classes = train.classes();
    if classes.len() < 2 {
        return Err(Error::Validation(
            "training needs at least two classes".into(),
        ));
    }
    let scaler = Scaler::fit(train);
    let scaled: Vec<Vec<T>> = train.rows().iter().map(|r| scaler.transform(r)).collect();
    let gamma = match gamma {
        Gamma::Fixed(v) => v,
        Gamma::Scale => {
            let total = scaled.len() * train.width();
            let tn = T::from_usize(total.max(1)).expect("count fits scalar");
            let mean = scaled
                .iter()
                .flat_map(|r| r.iter())
                .fold(T::zero(), |a, &v| a + v)
                / tn;
            let var = scaled
                .iter()
                .flat_map(|r| r.iter())
                .fold(T::zero(), |a, &v| a + (v - mean) * (v - mean))
                / tn;
            if var > T::default_epsilon() {
                T::one() / (T::from_usize(train.width().max(1)).expect("width fits") * var)
            } else {
                T::one()
            }
        }
    };

    let by_class = train.by_class();
    let mut machines = Vec::new();
    for (i, &pos) in classes.iter().enumerate() {
        for &neg in &classes[i + 1..] {
            let idx: Vec<usize> = by_class[&pos]
                .iter()
                .chain(by_class[&neg].iter())
                .copied()
                .collect();
            let xs: Vec<&[T]> = idx.iter().map(|&r| scaled[r].as_slice()).collect();
            let ys: Vec<bool> = idx.iter().map(|&r| train.labels()[r] == pos).collect();
            let (alpha, bias) = smo(&xs, &ys, c, gamma).map_err(|e| match e {
                Error::Numeric(msg) => Error::Numeric(format!("pair ({pos}, {neg}): {msg}")),
                other => other,
            })?;
            let mut vectors = Vec::new();
            let mut coef = Vec::new();
            for (t, &a) in alpha.iter().enumerate() {
                if a > T::zero() {
                    vectors.push(xs[t].to_vec());
                    coef.push(if ys[t] { a } else { -a });
                }
            }
            machines.push(PairMachine {
                pos,
                neg,
                vectors,
                coef,
                bias,
            });
        }
    }
    Ok(TrainedModel {
        classes,
        scaler,
        gamma,
        machines,
    })
}

/// Sequential minimal optimization on the soft-margin dual, maximal
/// violating pair selection. Returns the dual variables and the bias.
fn smo<T: Real>(xs: &[&[T]], ys: &[bool], c: T, gamma: T) -> Result<(Vec<T>, T)> {
    let n = xs.len();
    let tol = T::of(SMO_TOLERANCE);
    let tau = T::of(1e-12);
    // Full Gram matrix: pairwise problems at this scale fit in memory.
    let mut kernel = vec![T::zero(); n * n];
    for i in 0..n {
        for j in i..n {
            let k = rbf(xs[i], xs[j], gamma);
            kernel[i * n + j] = k;
            kernel[j * n + i] = k;
        }
    }
    let y = |t: usize| if ys[t] { T::one() } else { -T::one() };
    let q = |i: usize, j: usize| y(i) * y(j) * kernel[i * n + j];

    let mut alpha = vec![T::zero(); n];
    // Gradient of the dual objective 1/2 a^T Q a - e^T a.
    let mut grad = vec![-T::one(); n];

    let mut converged = false;
    for _ in 0..SMO_MAX_ITER {
        // i maximises -y grad over the upward-movable set, j minimises it
        // over the downward-movable set.
        let mut i_best: Option<(usize, T)> = None;
        let mut j_best: Option<(usize, T)> = None;
        for t in 0..n {
            let v = -y(t) * grad[t];
            let movable_up = (ys[t] && alpha[t] < c) || (!ys[t] && alpha[t] > T::zero());
            let movable_down = (ys[t] && alpha[t] > T::zero()) || (!ys[t] && alpha[t] < c);
            if movable_up && i_best.map_or(true, |(_, best)| v > best) {
                i_best = Some((t, v));
            }
            if movable_down && j_best.map_or(true, |(_, best)| v < best) {
                j_best = Some((t, v));
            }
        }
        let (Some((i, m_up)), Some((j, m_low))) = (i_best, j_best) else {
            converged = true;
            break;
        };
        if m_up - m_low <= tol {
            converged = true;
            break;
        }

        let old_i = alpha[i];
        let old_j = alpha[j];
        if ys[i] != ys[j] {
            let quad = (q(i, i) + q(j, j) + T::of(2.0) * q(i, j)).max(tau);
            let delta = (-grad[i] - grad[j]) / quad;
            let diff = alpha[i] - alpha[j];
            alpha[i] += delta;
            alpha[j] += delta;
            if diff > T::zero() {
                if alpha[j] < T::zero() {
                    alpha[j] = T::zero();
                    alpha[i] = diff;
                }
                if alpha[i] > c {
                    alpha[i] = c;
                    alpha[j] = c - diff;
                }
            } else {
                if alpha[i] < T::zero() {
                    alpha[i] = T::zero();
                    alpha[j] = -diff;
                }
                if alpha[j] > c {
                    alpha[j] = c;
                    alpha[i] = c + diff;
                }
            }
        } else {
            let quad = (q(i, i) + q(j, j) - T::of(2.0) * q(i, j)).max(tau);
            let delta = (grad[i] - grad[j]) / quad;
            let sum = alpha[i] + alpha[j];
            alpha[i] -= delta;
            alpha[j] += delta;
            if sum > c {
                if alpha[i] > c {
                    alpha[i] = c;
                    alpha[j] = sum - c;
                }
                if alpha[j] > c {
                    alpha[j] = c;
                    alpha[i] = sum - c;
                }
            } else {
                if alpha[j] < T::zero() {
                    alpha[j] = T::zero();
                    alpha[i] = sum;
                }
                if alpha[i] < T::zero() {
                    alpha[i] = T::zero();
                    alpha[j] = sum;
                }
            }
        }
        let di = alpha[i] - old_i;
        let dj = alpha[j] - old_j;
        for t in 0..n {
            grad[t] += q(t, i) * di + q(t, j) * dj;
        }
    }
    if !converged {
        return Err(Error::Numeric(format!(
            "SMO hit the iteration cap ({SMO_MAX_ITER}) on {n} rows"
        )));
    }

    // Bias from the KKT conditions: average over free vectors, else the
    // midpoint of the bound-derived bracket.
    let mut upper = T::of(f64::MAX);
    let mut lower = T::of(f64::MIN);
    let mut free_sum = T::zero();
    let mut free_count = 0usize;
    for t in 0..n {
        let yg = y(t) * grad[t];
        if alpha[t] >= c {
            if ys[t] {
                lower = lower.max(yg);
            } else {
                upper = upper.min(yg);
            }
        } else if alpha[t] <= T::zero() {
            if ys[t] {
                upper = upper.min(yg);
            } else {
                lower = lower.max(yg);
            }
        } else {
            free_sum += yg;
            free_count += 1;
        }
    }
    let rho = if free_count > 0 {
        free_sum / T::from_usize(free_count).expect("count fits scalar")
    } else {
        (upper + lower) * T::of(0.5)
    };
    Ok((alpha, -rho))
}

/// Accuracy with a per-class breakdown and confusion matrix.
#[derive(Clone, Debug, Serialize)]
pub struct AccuracyReport {
    pub accuracy: f64,
    /// Classes indexing the confusion matrix, ascending.
    pub classes: Vec<u32>,
    /// `confusion[actual][predicted]`.
    pub confusion: Vec<Vec<usize>>,
    pub per_class: Vec<f64>,
}

/// Evaluates a trained model on a test set.
pub fn evaluate<T: Real>(model: &TrainedModel<T>, test: &Dataset<T>) -> Result<AccuracyReport> {
    if test.is_empty() {
        return Err(Error::Validation("empty test set".into()));
    }
    if test.width() != model.scaler.mean.len() {
        return Err(Error::Validation(format!(
            "test width {} does not match model width {}",
            test.width(),
            model.scaler.mean.len()
        )));
    }
    let predictions: Vec<u32> = test.rows().iter().map(|r| model.predict(r)).collect();
    accuracy_report(test.labels(), &predictions, model.classes())
}

fn accuracy_report(actual: &[u32], predicted: &[u32], model_classes: &[u32]) -> Result<AccuracyReport> {
    let mut classes: Vec<u32> = actual
        .iter()
        .chain(predicted)
        .copied()
        .chain(model_classes.iter().copied())
        .collect();
    classes.sort_unstable();
    classes.dedup();
    let index: BTreeMap<u32, usize> = classes.iter().enumerate().map(|(i, &c)| (c, i)).collect();
    let mut confusion = vec![vec![0usize; classes.len()]; classes.len()];
    let mut correct = 0usize;
    for (&a, &p) in actual.iter().zip(predicted) {
        confusion[index[&a]][index[&p]] += 1;
        if a == p {
            correct += 1;
        }
    }
    let per_class = confusion
        .iter()
        .enumerate()
        .map(|(i, row)| {
            let total: usize = row.iter().sum();
            if total == 0 {
                0.0
            } else {
                confusion[i][i] as f64 / total as f64
            }
        })
        .collect();
    Ok(AccuracyReport {
        accuracy: correct as f64 / actual.len() as f64,
        classes,
        confusion,
        per_class,
    })
}

/// Cross-validation summary.
#[derive(Clone, Debug, Serialize)]
pub struct CvReport {
    pub fold_accuracies: Vec<f64>,
    pub mean: f64,
    pub min: f64,
    pub max: f64,
}

/// Stratified k-fold cross-validation with the pinned SVM defaults.
pub fn cross_validate<T: Real>(ds: &Dataset<T>, folds: usize, seed: u64) -> Result<CvReport> {
    if folds < 2 {
        return Err(Error::Validation("cross-validation needs at least 2 folds".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut fold_of = vec![0usize; ds.len()];
    for (label, mut idx) in ds.by_class() {
        if idx.len() < folds {
            return Err(Error::Validation(format!(
                "class {label} has {} rows, fewer than {folds} folds",
                idx.len()
            )));
        }
        idx.shuffle(&mut rng);
        for (pos, &row) in idx.iter().enumerate() {
            fold_of[row] = pos % folds;
        }
    }
    let mut fold_accuracies = Vec::with_capacity(folds);
    for f in 0..folds {
        let train_idx: Vec<usize> = (0..ds.len()).filter(|&i| fold_of[i] != f).collect();
        let test_idx: Vec<usize> = (0..ds.len()).filter(|&i| fold_of[i] == f).collect();
        let model = train_svm(&ds.subset(&train_idx), T::one(), Gamma::Scale)?;
        let report = evaluate(&model, &ds.subset(&test_idx))?;
        fold_accuracies.push(report.accuracy);
    }
    let mean = fold_accuracies.iter().sum::<f64>() / folds as f64;
    let min = fold_accuracies.iter().copied().fold(f64::INFINITY, f64::min);
    let max = fold_accuracies.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    Ok(CvReport {
        fold_accuracies,
        mean,
        min,
        max,
    })
}

/// Nearest-centroid baseline in standardized space; distance ties go to the
/// lowest class id.
pub fn nearest_centroid<T: Real>(train: &Dataset<T>, test: &Dataset<T>) -> Result<AccuracyReport> {
    if test.is_empty() {
        return Err(Error::Validation("empty test set".into()));
    }
    if test.width() != train.width() {
        return Err(Error::Validation(format!(
            "test width {} does not match train width {}",
            test.width(),
            train.width()
        )));
    }
    let scaler = Scaler::fit(train);
    let classes = train.classes();
    let mut centroids: Vec<Vec<T>> = vec![vec![T::zero(); train.width()]; classes.len()];
    let mut counts = vec![0usize; classes.len()];
    let index: BTreeMap<u32, usize> = classes.iter().enumerate().map(|(i, &c)| (c, i)).collect();
    for (row, &label) in train.rows().iter().zip(train.labels()) {
        let i = index[&label];
        for (acc, v) in centroids[i].iter_mut().zip(scaler.transform(row)) {
            *acc += v;
        }
        counts[i] += 1;
    }
    for (c, &n) in centroids.iter_mut().zip(&counts) {
        let n = T::from_usize(n.max(1)).expect("count fits scalar");
        for v in c.iter_mut() {
            *v /= n;
        }
    }
    let predictions: Vec<u32> = test
        .rows()
        .iter()
        .map(|row| {
            let x = scaler.transform(row);
            let mut best = classes[0];
            let mut best_d = T::of(f64::MAX);
            for (i, centroid) in centroids.iter().enumerate() {
                let mut d = T::zero();
                for (&a, &b) in x.iter().zip(centroid) {
                    let diff = a - b;
                    d += diff * diff;
                }
                if d < best_d {
                    best_d = d;
                    best = classes[i];
                }
            }
            best
        })
        .collect();
    accuracy_report(test.labels(), &predictions, &classes)
}
