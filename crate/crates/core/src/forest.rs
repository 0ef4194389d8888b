//! Random-forest regression: CART trees on bootstrap resamples, averaged.
//!
//! Features are `(d_rel, D_rel, nu)`; one forest is trained per shape and
//! target constant. Splits send `x[f] <= t` to the left child.

use std::fs::File;
use std::io::{BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::dataset::{Dataset, SampleRow};
use crate::error::{Error, Result};
use crate::geometry::VoidShape;
use crate::par;

pub const MODEL_VERSION: u32 = 1;
pub const N_FEATURES: usize = 3;
pub const FEATURE_NAMES: [&str; N_FEATURES] = ["d_rel", "D_rel", "nu"];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Target {
    C11,
    C12,
    C33,
}

impl Target {
    pub const ALL: [Target; 3] = [Target::C11, Target::C12, Target::C33];

    pub fn name(self) -> &'static str {
        match self {
            Target::C11 => "c11",
            Target::C12 => "c12",
            Target::C33 => "c33",
        }
    }

    pub fn index(self) -> usize {
        self as usize
    }

    pub fn of(self, row: &SampleRow) -> f64 {
        match self {
            Target::C11 => row.c11_over_e,
            Target::C12 => row.c12_over_e,
            Target::C33 => row.c33_over_e,
        }
    }
}

impl std::fmt::Display for Target {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

impl std::str::FromStr for Target {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "c11" => Ok(Target::C11),
            "c12" => Ok(Target::C12),
            "c33" => Ok(Target::C33),
            other => Err(Error::invalid(format!("unknown target {other:?} (expected c11, c12 or c33)"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Hyperparams {
    pub n_trees: usize,
    pub min_leaf: usize,
    /// `None` grows until the other stopping rules apply.
    pub max_depth: Option<usize>,
    pub features_per_split: usize,
    pub bootstrap: bool,
    pub seed: u64,
}

impl Default for Hyperparams {
    fn default() -> Self {
        Hyperparams {
            n_trees: 100,
            min_leaf: 2,
            max_depth: None,
            features_per_split: N_FEATURES,
            bootstrap: true,
            seed: 0,
        }
    }
}

impl Hyperparams {
    pub fn validate(&self) -> Result<()> {
        if self.n_trees == 0 {
            return Err(Error::invalid("n_trees must be at least 1"));
        }
        if self.min_leaf == 0 {
            return Err(Error::invalid("min_leaf must be at least 1"));
        }
        if self.features_per_split == 0 || self.features_per_split > N_FEATURES {
            return Err(Error::invalid(format!("features_per_split must be in 1..={N_FEATURES}")));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
enum Node {
    Split {
        feature: u8,
        threshold: f64,
        left: u32,
        right: u32,
    },
    Leaf(f64),
}

/// A regression tree stored as a flat node array, root first.
#[derive(Debug, Clone, PartialEq)]
pub struct Tree {
    nodes: Vec<Node>,
}

impl Tree {
    pub fn predict(&self, x: &[f64; N_FEATURES]) -> f64 {
        let mut k = 0;
        loop {
            match self.nodes[k] {
                Node::Leaf(v) => return v,
                Node::Split {
                    feature,
                    threshold,
                    left,
                    right,
                } => {
                    k = if x[feature as usize] <= threshold { left } else { right } as usize;
                }
            }
        }
    }

    pub fn node_count(&self) -> usize {
        self.nodes.len()
    }

    pub fn leaf_count(&self) -> usize {
        self.nodes.iter().filter(|n| matches!(n, Node::Leaf(_))).count()
    }

    pub fn depth(&self) -> usize {
        fn go(nodes: &[Node], k: usize) -> usize {
            match nodes[k] {
                Node::Leaf(_) => 0,
                Node::Split { left, right, .. } => 1 + go(nodes, left as usize).max(go(nodes, right as usize)),
            }
        }
        go(&self.nodes, 0)
    }

    /// Split thresholds along the path of every node, for inspection.
    pub fn splits(&self) -> Vec<(usize, f64)> {
        self.nodes
            .iter()
            .filter_map(|n| match *n {
                Node::Split { feature, threshold, .. } => Some((feature as usize, threshold)),
                Node::Leaf(_) => None,
            })
            .collect()
    }
}

/// Training data as a feature matrix and a target vector.
#[derive(Debug, Clone, PartialEq)]
pub struct TrainingSet {
    pub x: Vec<[f64; N_FEATURES]>,
    pub y: Vec<f64>,
}

impl TrainingSet {
    pub fn new(x: Vec<[f64; N_FEATURES]>, y: Vec<f64>) -> Result<Self> {
        if x.len() != y.len() {
            return Err(Error::invalid(format!("{} feature rows but {} targets", x.len(), y.len())));
        }
        if x.iter().flatten().chain(&y).any(|v| !v.is_finite()) {
            return Err(Error::invalid("training data must be finite"));
        }
        Ok(TrainingSet { x, y })
    }

    pub fn from_rows(rows: &[SampleRow], target: Target) -> Self {
        TrainingSet {
            x: rows.iter().map(SampleRow::features).collect(),
            y: rows.iter().map(|r| target.of(r)).collect(),
        }
    }

    pub fn len(&self) -> usize {
        self.y.len()
    }

    pub fn is_empty(&self) -> bool {
        self.y.is_empty()
    }
}

struct Builder<'a> {
    data: &'a TrainingSet,
    hp: &'a Hyperparams,
    rng: &'a mut ChaCha8Rng,
    nodes: Vec<Node>,
}

/// Mean of `values` summed in sorted order, so the result depends only on
/// the multiset. Exact for constant input.
fn canonical_mean(values: &mut [f64]) -> f64 {
    values.sort_by(f64::total_cmp);
    let base = values[0];
    base + values.iter().map(|v| v - base).sum::<f64>() / values.len() as f64
}

impl Builder<'_> {
    fn leaf(&mut self, idx: &[usize]) -> u32 {
        let mut ys: Vec<f64> = idx.iter().map(|&i| self.data.y[i]).collect();
        let v = canonical_mean(&mut ys);
        self.nodes.push(Node::Leaf(v));
        (self.nodes.len() - 1) as u32
    }

    fn candidate_features(&mut self) -> Vec<usize> {
        let mut f: Vec<usize> = (0..N_FEATURES).collect();
        if self.hp.features_per_split < N_FEATURES {
            f.shuffle(self.rng);
            f.truncate(self.hp.features_per_split);
            f.sort_unstable();
        }
        f
    }

    /// Best `(feature, threshold)` by variance reduction, ties to the lowest
    /// feature and then the smallest threshold.
    fn best_split(&mut self, idx: &mut [usize]) -> Option<(usize, f64)> {
        let min_leaf = self.hp.min_leaf;
        let n = idx.len();
        let data = self.data;
        // center targets for numerical stability
        let mut ys: Vec<f64> = idx.iter().map(|&i| data.y[i]).collect();
        let mean = canonical_mean(&mut ys);

        let mut best: Option<(f64, usize, f64)> = None;
        for f in self.candidate_features() {
            idx.sort_by(|&a, &b| {
                data.x[a][f]
                    .total_cmp(&data.x[b][f])
                    .then(data.y[a].total_cmp(&data.y[b]))
            });
            let total: f64 = idx.iter().map(|&i| data.y[i] - mean).sum();
            let mut left = 0.0;
            for k in 1..n {
                left += data.y[idx[k - 1]] - mean;
                let (xa, xb) = (data.x[idx[k - 1]][f], data.x[idx[k]][f]);
                if k < min_leaf || n - k < min_leaf || xa == xb {
                    continue;
                }
                let right = total - left;
                // maximizing this minimizes the children's summed squared error
                let score = left * left / k as f64 + right * right / (n - k) as f64;
                let threshold = 0.5 * (xa + xb);
                // the midpoint of two adjacent doubles can round onto the upper one
                let threshold = if threshold < xb { threshold } else { xa };
                if best.map_or(true, |(s, _, _)| score > s) {
                    best = Some((score, f, threshold));
                }
            }
        }
        best.map(|(_, f, t)| (f, t))
    }

    fn grow(&mut self, idx: &mut [usize], depth: usize) -> u32 {
        let n = idx.len();
        let at_depth = self.hp.max_depth.is_some_and(|d| depth >= d);
        let first = self.data.y[idx[0]];
        let constant = idx.iter().all(|&i| self.data.y[i] == first);
        if at_depth || n < 2 * self.hp.min_leaf || constant {
            return self.leaf(idx);
        }
        let Some((feature, threshold)) = self.best_split(idx) else {
            return self.leaf(idx);
        };
        // partition keeping the sorted order inside each side
        let data = self.data;
        idx.sort_by(|&a, &b| {
            data.x[a][feature]
                .total_cmp(&data.x[b][feature])
                .then(data.y[a].total_cmp(&data.y[b]))
        });
        let split = idx.partition_point(|&i| data.x[i][feature] <= threshold);

        let me = self.nodes.len();
        self.nodes.push(Node::Leaf(f64::NAN));
        let (l_idx, r_idx) = idx.split_at_mut(split);
        let left = self.grow(l_idx, depth + 1);
        let right = self.grow(r_idx, depth + 1);
        self.nodes[me] = Node::Split {
            feature: feature as u8,
            threshold,
            left,
            right,
        };
        me as u32
    }
}

/// Fit one CART tree on the rows listed in `sample` (duplicates allowed).
pub fn fit_tree_on(data: &TrainingSet, sample: &[usize], hp: &Hyperparams, rng: &mut ChaCha8Rng) -> Tree {
    assert!(!sample.is_empty(), "empty tree sample");
    let mut idx = sample.to_vec();
    let mut b = Builder {
        data,
        hp,
        rng,
        nodes: Vec::new(),
    };
    b.grow(&mut idx, 0);
    Tree { nodes: b.nodes }
}

/// Fit one tree on all rows.
pub fn fit_tree(data: &TrainingSet, hp: &Hyperparams, rng: &mut ChaCha8Rng) -> Tree {
    let all: Vec<usize> = (0..data.len()).collect();
    fit_tree_on(data, &all, hp, rng)
}

fn tree_rng(seed: u64, tree: usize) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(tree as u64);
    rng
}

/// Fit `hp.n_trees` trees, each on a bootstrap resample when enabled.
pub fn fit_trees(data: &TrainingSet, hp: &Hyperparams) -> Result<Vec<Tree>> {
    hp.validate()?;
    if data.is_empty() {
        return Err(Error::invalid("cannot fit a forest on no data"));
    }
    let n = data.len();
    Ok(par::map_indexed(hp.n_trees, |t| {
        let mut rng = tree_rng(hp.seed, t);
        let sample: Vec<usize> = if hp.bootstrap {
            (0..n).map(|_| rng.gen_range(0..n)).collect()
        } else {
            (0..n).collect()
        };
        fit_tree_on(data, &sample, hp, &mut rng)
    }))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrainingMeta {
    /// Digest of the training rows.
    pub fingerprint: String,
    pub n_rows: usize,
    pub grid_n: usize,
    pub tolerance: f64,
    pub dataset_seed: u64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Forest {
    pub shape: VoidShape,
    pub target: Target,
    pub hyperparams: Hyperparams,
    pub training_meta: TrainingMeta,
    pub trees: Vec<Tree>,
    /// Bounding box of the training features.
    pub feature_min: [f64; N_FEATURES],
    pub feature_max: [f64; N_FEATURES],
}

fn feature_box(x: &[[f64; N_FEATURES]]) -> ([f64; N_FEATURES], [f64; N_FEATURES]) {
    let mut lo = [f64::INFINITY; N_FEATURES];
    let mut hi = [f64::NEG_INFINITY; N_FEATURES];
    for r in x {
        for f in 0..N_FEATURES {
            lo[f] = lo[f].min(r[f]);
            hi[f] = hi[f].max(r[f]);
        }
    }
    (lo, hi)
}

/// Train a forest for one target on a single-shape dataset.
pub fn fit_forest(dataset: &Dataset, target: Target, hp: &Hyperparams) -> Result<Forest> {
    fit_forest_rows(dataset, &dataset.rows, target, hp)
}

/// Train on a subset of `dataset`'s rows; `dataset` supplies the metadata.
pub fn fit_forest_rows(dataset: &Dataset, rows: &[SampleRow], target: Target, hp: &Hyperparams) -> Result<Forest> {
    if rows.is_empty() {
        return Err(Error::invalid("dataset is empty"));
    }
    let shape = rows[0].shape;
    if let Some(r) = rows.iter().find(|r| r.shape != shape) {
        return Err(Error::invalid(format!("dataset mixes shapes ({shape} and {})", r.shape)));
    }
    let data = TrainingSet::from_rows(rows, target);
    let trees = fit_trees(&data, hp)?;
    let (feature_min, feature_max) = feature_box(&data.x);
    let sub = Dataset {
        meta: dataset.meta.clone(),
        rows: rows.to_vec(),
    };
    Ok(Forest {
        shape,
        target,
        hyperparams: *hp,
        training_meta: TrainingMeta {
            fingerprint: sub.fingerprint(),
            n_rows: rows.len(),
            grid_n: dataset.meta.grid_n,
            tolerance: dataset.meta.tolerance,
            dataset_seed: dataset.meta.rng_seed,
        },
        trees,
        feature_min,
        feature_max,
    })
}

impl Forest {
    /// Mean of the tree predictions at `(d_rel, D_rel, nu)`.
    pub fn predict(&self, d_rel: f64, big_d_rel: f64, nu: f64) -> f64 {
        self.predict_features(&[d_rel, big_d_rel, nu])
    }

    pub fn predict_features(&self, x: &[f64; N_FEATURES]) -> f64 {
        let sum: f64 = self.trees.iter().map(|t| t.predict(x)).sum();
        sum / self.trees.len() as f64
    }

    /// Whether `x` lies inside the box spanned by the training features.
    pub fn in_training_box(&self, x: &[f64; N_FEATURES]) -> bool {
        (0..N_FEATURES).all(|f| x[f] >= self.feature_min[f] && x[f] <= self.feature_max[f])
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string(&ForestFile::from(self))?)
    }

    pub fn from_json(text: &str) -> Result<Forest> {
        let mut de = serde_json::Deserializer::from_str(text);
        de.disable_recursion_limit();
        let file = ForestFile::deserialize(&mut de).map_err(|e| Error::Format(format!("malformed model: {e}")))?;
        de.end().map_err(|e| Error::Format(format!("malformed model: {e}")))?;
        file.try_into()
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        let path = path.as_ref();
        if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
            std::fs::create_dir_all(dir)?;
        }
        let mut out = BufWriter::new(File::create(path)?);
        out.write_all(self.to_json()?.as_bytes())?;
        out.flush()?;
        Ok(())
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Forest> {
        let path = path.as_ref();
        let mut text = String::new();
        let file = File::open(path).map_err(|e| Error::io_at(path, e))?;
        std::io::Read::read_to_string(&mut BufReader::new(file), &mut text).map_err(|e| Error::io_at(path, e))?;
        Self::from_json(&text).map_err(|e| Error::Format(format!("{}: {e}", path.display())))
    }
}

#[derive(Serialize, Deserialize)]
#[serde(untagged)]
enum NodeJson {
    Split {
        f: u8,
        t: f64,
        l: Box<NodeJson>,
        r: Box<NodeJson>,
    },
    Leaf {
        v: f64,
    },
}

#[derive(Serialize, Deserialize)]
struct ForestFile {
    version: u32,
    shape: VoidShape,
    target: Target,
    hyperparams: Hyperparams,
    training_meta: TrainingMeta,
    feature_min: [f64; N_FEATURES],
    feature_max: [f64; N_FEATURES],
    trees: Vec<NodeJson>,
}

fn to_nested(nodes: &[Node], k: usize) -> NodeJson {
    match nodes[k] {
        Node::Leaf(v) => NodeJson::Leaf { v },
        Node::Split {
            feature,
            threshold,
            left,
            right,
        } => NodeJson::Split {
            f: feature,
            t: threshold,
            l: Box::new(to_nested(nodes, left as usize)),
            r: Box::new(to_nested(nodes, right as usize)),
        },
    }
}

fn flatten(node: NodeJson, nodes: &mut Vec<Node>) -> Result<u32> {
    let me = nodes.len();
    match node {
        NodeJson::Leaf { v } => {
            if !v.is_finite() {
                return Err(Error::Format("leaf value is not finite".into()));
            }
            nodes.push(Node::Leaf(v));
        }
        NodeJson::Split { f, t, l, r } => {
            if f as usize >= N_FEATURES || !t.is_finite() {
                return Err(Error::Format(format!("bad split (feature {f}, threshold {t})")));
            }
            nodes.push(Node::Leaf(f64::NAN));
            let left = flatten(*l, nodes)?;
            let right = flatten(*r, nodes)?;
            nodes[me] = Node::Split {
                feature: f,
                threshold: t,
                left,
                right,
            };
        }
    }
    Ok(me as u32)
}

impl From<&Forest> for ForestFile {
    fn from(m: &Forest) -> Self {
        ForestFile {
            version: MODEL_VERSION,
            shape: m.shape,
            target: m.target,
            hyperparams: m.hyperparams,
            training_meta: m.training_meta.clone(),
            feature_min: m.feature_min,
            feature_max: m.feature_max,
            trees: m.trees.iter().map(|t| to_nested(&t.nodes, 0)).collect(),
        }
    }
}

impl TryFrom<ForestFile> for Forest {
    type Error = Error;

    fn try_from(f: ForestFile) -> Result<Forest> {
        if f.version != MODEL_VERSION {
            return Err(Error::Format(format!(
                "model version {} is not supported (expected {MODEL_VERSION})",
                f.version
            )));
        }
        if f.trees.is_empty() {
            return Err(Error::Format("model has no trees".into()));
        }
        let mut trees = Vec::with_capacity(f.trees.len());
        for t in f.trees {
            let mut nodes = Vec::new();
            flatten(t, &mut nodes)?;
            trees.push(Tree { nodes });
        }
        Ok(Forest {
            shape: f.shape,
            target: f.target,
            hyperparams: f.hyperparams,
            training_meta: f.training_meta,
            trees,
            feature_min: f.feature_min,
            feature_max: f.feature_max,
        })
    }
}

/// Mean squared error.
pub fn mse(z: &[f64], z_hat: &[f64]) -> Result<f64> {
    check_pair(z, z_hat)?;
    Ok(z.iter().zip(z_hat).map(|(a, b)| (a - b) * (a - b)).sum::<f64>() / z.len() as f64)
}

/// Coefficient of determination `1 - SS_res / SS_tot`.
pub fn r2(z: &[f64], z_hat: &[f64]) -> Result<f64> {
    check_pair(z, z_hat)?;
    let mean = z.iter().sum::<f64>() / z.len() as f64;
    let ss_tot: f64 = z.iter().map(|a| (a - mean) * (a - mean)).sum();
    if ss_tot == 0.0 {
        return Err(Error::Degenerate("R^2 undefined for a constant target".into()));
    }
    let ss_res: f64 = z.iter().zip(z_hat).map(|(a, b)| (a - b) * (a - b)).sum();
    Ok(1.0 - ss_res / ss_tot)
}

fn check_pair(z: &[f64], z_hat: &[f64]) -> Result<()> {
    if z.len() != z_hat.len() {
        return Err(Error::invalid(format!("length mismatch: {} vs {}", z.len(), z_hat.len())));
    }
    if z.len() < 2 {
        return Err(Error::invalid("metrics need at least two values"));
    }
    Ok(())
}

pub const TEST_FRACTION: f64 = 0.1;

/// Seeded partition of `0..n` into sorted `(train, test)` index lists with
/// `round(test_fraction * n)` test rows.
pub fn train_test_split(n: usize, test_fraction: f64, seed: u64) -> (Vec<usize>, Vec<usize>) {
    let mut idx: Vec<usize> = (0..n).collect();
    idx.shuffle(&mut ChaCha8Rng::seed_from_u64(seed));
    let n_test = ((test_fraction * n as f64).round() as usize).min(n);
    let mut test = idx[..n_test].to_vec();
    let mut train = idx[n_test..].to_vec();
    test.sort_unstable();
    train.sort_unstable();
    (train, test)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SplitReport {
    pub target: Target,
    pub train_indices: Vec<usize>,
    pub test_indices: Vec<usize>,
    pub r2_train: f64,
    pub r2_test: f64,
    pub mse_train: f64,
    pub mse_test: f64,
}

/// Train on a 90% split and score both parts. `split_seed` fixes the
/// partition independently of the forest seed.
pub fn train_with_split(dataset: &Dataset, target: Target, hp: &Hyperparams, split_seed: u64) -> Result<(Forest, SplitReport)> {
    let (train, test) = train_test_split(dataset.len(), TEST_FRACTION, split_seed);
    if train.is_empty() || test.len() < 2 {
        return Err(Error::invalid(format!(
            "dataset of {} rows is too small for a 90/10 split",
            dataset.len()
        )));
    }
    let pick = |ix: &[usize]| ix.iter().map(|&i| dataset.rows[i]).collect::<Vec<_>>();
    let (train_rows, test_rows) = (pick(&train), pick(&test));
    let model = fit_forest_rows(dataset, &train_rows, target, hp)?;
    let score = |rows: &[SampleRow]| -> Result<(f64, f64)> {
        let z: Vec<f64> = rows.iter().map(|r| target.of(r)).collect();
        let z_hat: Vec<f64> = par::map_slice(rows, |r| model.predict_features(&r.features()));
        Ok((r2(&z, &z_hat)?, mse(&z, &z_hat)?))
    };
    let (r2_train, mse_train) = score(&train_rows)?;
    let (r2_test, mse_test) = score(&test_rows)?;
    Ok((
        model,
        SplitReport {
            target,
            train_indices: train,
            test_indices: test,
            r2_train,
            r2_test,
            mse_train,
            mse_test,
        },
    ))
}

/// File name of a model inside a model directory.
pub fn model_path(dir: impl AsRef<Path>, shape: VoidShape, target: Target) -> PathBuf {
    dir.as_ref().join(format!("{}_{}.json", shape.name(), target.name()))
}

/// The three forests of one shape, predicting `(C11, C12, C33) / E`.
#[derive(Debug, Clone, PartialEq)]
pub struct Surrogate {
    pub shape: VoidShape,
    pub models: [Forest; 3],
}

impl Surrogate {
    pub fn new(models: [Forest; 3]) -> Result<Self> {
        let shape = models[0].shape;
        for (m, t) in models.iter().zip(Target::ALL) {
            if m.target != t || m.shape != shape {
                return Err(Error::invalid(format!(
                    "surrogate slot {t} holds a {} model for {}",
                    m.target, m.shape
                )));
            }
        }
        Ok(Surrogate { shape, models })
    }

    pub fn load(dir: impl AsRef<Path>, shape: VoidShape) -> Result<Self> {
        let dir = dir.as_ref();
        let load = |t: Target| -> Result<Forest> {
            let m = Forest::load(model_path(dir, shape, t))?;
            if m.shape != shape || m.target != t {
                return Err(Error::Format(format!(
                    "{}: holds a {} model for {}",
                    model_path(dir, shape, t).display(),
                    m.target,
                    m.shape
                )));
            }
            Ok(m)
        };
        Surrogate::new([load(Target::C11)?, load(Target::C12)?, load(Target::C33)?])
    }

    pub fn predict(&self, d_rel: f64, big_d_rel: f64, nu: f64) -> [f64; 3] {
        let x = [d_rel, big_d_rel, nu];
        [0, 1, 2].map(|k| self.models[k].predict_features(&x))
    }
}
