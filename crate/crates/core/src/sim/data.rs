//! Gaussian-blob classification data and its distribution across nodes.

use rand::seq::SliceRandom;
use rand::Rng;
use rand_distr::StandardNormal;

use super::SimError;
use crate::rng::seeded;

/// Row-major feature matrix with one label per row.
#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    pub dim: usize,
    pub classes: usize,
    pub features: Vec<f64>,
    pub labels: Vec<usize>,
}

impl Dataset {
    pub fn new(
        dim: usize,
        classes: usize,
        features: Vec<f64>,
        labels: Vec<usize>,
    ) -> Result<Self, SimError> {
        if labels.is_empty() || features.len() != labels.len() * dim {
            return Err(SimError::Data(format!(
                "{} feature values for {} samples of dimension {dim}",
                features.len(),
                labels.len()
            )));
        }
        if let Some(&bad) = labels.iter().find(|&&l| l >= classes) {
            return Err(SimError::Data(format!("label {bad} outside 0..{classes}")));
        }
        Ok(Self {
            dim,
            classes,
            features,
            labels,
        })
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.features[i * self.dim..(i + 1) * self.dim]
    }

    /// Copies the given rows into a new dataset.
    pub fn select(&self, rows: &[usize]) -> Dataset {
        let mut features = Vec::with_capacity(rows.len() * self.dim);
        for &r in rows {
            features.extend_from_slice(self.row(r));
        }
        Dataset {
            dim: self.dim,
            classes: self.classes,
            features,
            labels: rows.iter().map(|&r| self.labels[r]).collect(),
        }
    }

    /// Concatenation of several datasets with matching shape.
    pub fn concat(parts: &[Dataset]) -> Dataset {
        let first = &parts[0];
        Dataset {
            dim: first.dim,
            classes: first.classes,
            features: parts.iter().flat_map(|p| p.features.iter().copied()).collect(),
            labels: parts.iter().flat_map(|p| p.labels.iter().copied()).collect(),
        }
    }
}

/// Fixed unit-norm class centers for a `(classes, dim)` shape.
pub fn class_centers(classes: usize, dim: usize) -> Vec<Vec<f64>> {
    let mut rng = seeded(0xC1A55 ^ ((classes as u64) << 32) ^ dim as u64);
    (0..classes)
        .map(|_| {
            let v: Vec<f64> = (0..dim).map(|_| rng.sample(StandardNormal)).collect();
            let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
            v.into_iter().map(|x| x / norm).collect()
        })
        .collect()
}

/// `per_class` samples of each class, drawn as center plus isotropic
/// Gaussian noise of standard deviation `spread`. Rows are grouped by class.
pub fn synth_dataset<R: Rng + ?Sized>(
    classes: usize,
    dim: usize,
    per_class: usize,
    spread: f64,
    rng: &mut R,
) -> Result<Dataset, SimError> {
    if classes < 2 || dim == 0 || per_class == 0 || spread.is_nan() || spread < 0.0 {
        return Err(SimError::Data(format!(
            "need classes >= 2, dim >= 1, per_class >= 1, spread >= 0 \
             (got {classes}, {dim}, {per_class}, {spread})"
        )));
    }
    let centers = class_centers(classes, dim);
    let mut features = Vec::with_capacity(classes * per_class * dim);
    let mut labels = Vec::with_capacity(classes * per_class);
    for (c, mu) in centers.iter().enumerate() {
        for _ in 0..per_class {
            for &m in mu {
                let noise: f64 = rng.sample(StandardNormal);
                features.push(m + spread * noise);
            }
            labels.push(c);
        }
    }
    Dataset::new(dim, classes, features, labels)
}

/// Splits `rows` into `parts` contiguous chunks whose sizes differ by at most one.
fn split_even(rows: &[usize], parts: usize) -> Vec<&[usize]> {
    let base = rows.len() / parts;
    let extra = rows.len() % parts;
    let mut out = Vec::with_capacity(parts);
    let mut start = 0;
    for p in 0..parts {
        let len = base + usize::from(p < extra);
        out.push(&rows[start..start + len]);
        start += len;
    }
    out
}

/// Distributes `data` over `n_nodes`.
///
/// With `classes_per_node == classes` the rows are shuffled and dealt evenly
/// (IID). Otherwise node `i` owns the `k` consecutive entries starting at
/// `i * k` of a shuffled class list (wrapping), and each class is split evenly
/// among its owners.
pub fn partition<R: Rng + ?Sized>(
    data: &Dataset,
    n_nodes: usize,
    classes_per_node: usize,
    rng: &mut R,
) -> Result<Vec<Dataset>, SimError> {
    let c = data.classes;
    if n_nodes == 0 || classes_per_node == 0 || classes_per_node > c {
        return Err(SimError::Partition(format!(
            "classes_per_node = {classes_per_node} must lie in 1..={c} (n_nodes = {n_nodes})"
        )));
    }
    let mut assigned: Vec<Vec<usize>> = vec![Vec::new(); n_nodes];
    if classes_per_node == c {
        let mut rows: Vec<usize> = (0..data.len()).collect();
        rows.shuffle(rng);
        for (node, chunk) in split_even(&rows, n_nodes).into_iter().enumerate() {
            assigned[node].extend_from_slice(chunk);
        }
    } else {
        let mut order: Vec<usize> = (0..c).collect();
        order.shuffle(rng);
        let mut owners: Vec<Vec<usize>> = vec![Vec::new(); c];
        for node in 0..n_nodes {
            for j in 0..classes_per_node {
                owners[order[(node * classes_per_node + j) % c]].push(node);
            }
        }
        for (class, nodes) in owners.iter().enumerate() {
            if nodes.is_empty() {
                continue;
            }
            let mut rows: Vec<usize> = (0..data.len())
                .filter(|&r| data.labels[r] == class)
                .collect();
            rows.shuffle(rng);
            for (chunk, &node) in split_even(&rows, nodes.len()).into_iter().zip(nodes) {
                assigned[node].extend_from_slice(chunk);
            }
        }
    }
    assigned
        .into_iter()
        .enumerate()
        .map(|(node, mut rows)| {
            if rows.is_empty() {
                return Err(SimError::Partition(format!("node {node} received no samples")));
            }
            rows.sort_unstable();
            Ok(data.select(&rows))
        })
        .collect()
}
