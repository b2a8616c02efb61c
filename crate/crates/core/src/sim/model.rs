//! Linear softmax classifier, its cross-entropy gradient and FGSM poisoning.

use super::data::Dataset;

/// Weights (`classes x dim`, row-major) followed by the bias, as one flat vector.
#[derive(Debug, Clone, PartialEq)]
pub struct Model {
    pub classes: usize,
    pub dim: usize,
    pub params: Vec<f64>,
}

impl Model {
    pub fn zeros(classes: usize, dim: usize) -> Self {
        Self {
            classes,
            dim,
            params: vec![0.0; param_count(classes, dim)],
        }
    }

    pub fn from_params(classes: usize, dim: usize, params: Vec<f64>) -> Self {
        assert_eq!(params.len(), param_count(classes, dim));
        Self {
            classes,
            dim,
            params,
        }
    }

    pub fn weights(&self) -> &[f64] {
        &self.params[..self.classes * self.dim]
    }

    pub fn bias(&self) -> &[f64] {
        &self.params[self.classes * self.dim..]
    }

    pub fn is_finite(&self) -> bool {
        self.params.iter().all(|p| p.is_finite())
    }
}

pub fn param_count(classes: usize, dim: usize) -> usize {
    classes * dim + classes
}

/// Softmax probabilities of one sample under flat parameters `params`.
fn probabilities(params: &[f64], classes: usize, dim: usize, x: &[f64], out: &mut [f64]) {
    let (w, b) = params.split_at(classes * dim);
    for c in 0..classes {
        let row = &w[c * dim..(c + 1) * dim];
        out[c] = b[c] + row.iter().zip(x).map(|(a, v)| a * v).sum::<f64>();
    }
    let max = out.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let mut z = 0.0;
    for o in out.iter_mut() {
        *o = (*o - max).exp();
        z += *o;
    }
    for o in out.iter_mut() {
        *o /= z;
    }
}

/// Mean cross-entropy and its gradient with respect to the flat parameters.
pub fn loss_and_grad(params: &[f64], data: &Dataset) -> (f64, Vec<f64>) {
    let (c, d) = (data.classes, data.dim);
    debug_assert_eq!(params.len(), param_count(c, d));
    let mut grad = vec![0.0; params.len()];
    let mut p = vec![0.0; c];
    let mut loss = 0.0;
    for s in 0..data.len() {
        let x = data.row(s);
        let y = data.labels[s];
        probabilities(params, c, d, x, &mut p);
        loss -= p[y].max(f64::MIN_POSITIVE).ln();
        p[y] -= 1.0;
        let (gw, gb) = grad.split_at_mut(c * d);
        for k in 0..c {
            let r = p[k];
            for (g, v) in gw[k * d..(k + 1) * d].iter_mut().zip(x) {
                *g += r * v;
            }
            gb[k] += r;
        }
    }
    let m = data.len() as f64;
    grad.iter_mut().for_each(|g| *g /= m);
    (loss / m, grad)
}

/// Gradient of the mean loss with respect to every feature entry, row-major.
pub fn input_grad(params: &[f64], data: &Dataset) -> Vec<f64> {
    let (c, d) = (data.classes, data.dim);
    let w = &params[..c * d];
    let m = data.len() as f64;
    let mut out = vec![0.0; data.features.len()];
    let mut p = vec![0.0; c];
    for s in 0..data.len() {
        probabilities(params, c, d, data.row(s), &mut p);
        p[data.labels[s]] -= 1.0;
        let g = &mut out[s * d..(s + 1) * d];
        for k in 0..c {
            let r = p[k] / m;
            for (gj, wj) in g.iter_mut().zip(&w[k * d..(k + 1) * d]) {
                *gj += r * wj;
            }
        }
    }
    out
}

fn sign(x: f64) -> f64 {
    if x > 0.0 {
        1.0
    } else if x < 0.0 {
        -1.0
    } else {
        0.0
    }
}

/// Shifts every feature by `epsilon` in the direction that increases the loss.
pub fn fgsm_poison(data: &Dataset, params: &[f64], epsilon: f64) -> Dataset {
    let mut out = data.clone();
    if epsilon == 0.0 {
        return out;
    }
    let g = input_grad(params, data);
    for (f, gi) in out.features.iter_mut().zip(g) {
        *f += epsilon * sign(gi);
    }
    out
}

/// Fraction of rows whose highest logit is the true label (ties go to the lowest class).
pub fn accuracy(params: &[f64], data: &Dataset) -> f64 {
    let (c, d) = (data.classes, data.dim);
    let (w, b) = params.split_at(c * d);
    let mut correct = 0usize;
    for s in 0..data.len() {
        let x = data.row(s);
        let mut best = 0;
        let mut best_val = f64::NEG_INFINITY;
        for k in 0..c {
            let v = b[k] + w[k * d..(k + 1) * d].iter().zip(x).map(|(a, v)| a * v).sum::<f64>();
            if v > best_val {
                best_val = v;
                best = k;
            }
        }
        correct += usize::from(best == data.labels[s]);
    }
    correct as f64 / data.len() as f64
}

/// Plain full-batch gradient descent on the pooled data; used as the
/// centralized reference.
pub fn train_centralized(data: &Dataset, alpha: f64, steps: usize) -> Model {
    let mut params = vec![0.0; param_count(data.classes, data.dim)];
    for _ in 0..steps {
        let (_, g) = loss_and_grad(&params, data);
        for (p, gi) in params.iter_mut().zip(g) {
            *p -= alpha * gi;
        }
    }
    Model::from_params(data.classes, data.dim, params)
}
