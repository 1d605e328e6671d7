//! Linear-chain CRF scoring, forward–backward, and the penalized
//! log-likelihood with its gradient.

use serde::{Deserialize, Serialize};

use super::inference::Lattice;
use super::LabelerError;

/// A sequence whose tokens carry sparse binary feature indices.
#[derive(Debug, Clone, PartialEq)]
pub struct Instance {
    pub features: Vec<Vec<u32>>,
    pub labels: Vec<usize>,
    pub sentences: Vec<usize>,
}

/// Dense weights: emissions laid out feature-major (`f * L + y`), followed
/// by the `L × L` transition block.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CrfParams {
    pub num_features: usize,
    pub num_labels: usize,
    pub weights: Vec<f64>,
}

impl CrfParams {
    pub fn zeros(num_features: usize, num_labels: usize) -> Self {
        CrfParams {
            num_features,
            num_labels,
            weights: vec![0.0; num_features * num_labels + num_labels * num_labels],
        }
    }

    pub fn dim(&self) -> usize {
        self.weights.len()
    }

    pub fn emission_index(&self, feature: u32, label: usize) -> usize {
        feature as usize * self.num_labels + label
    }

    pub fn transition_index(&self, prev: usize, next: usize) -> usize {
        self.num_features * self.num_labels + prev * self.num_labels + next
    }

    pub fn transition(&self, prev: usize, next: usize) -> f64 {
        self.weights[self.transition_index(prev, next)]
    }

    pub fn lattice(&self, features: &[Vec<u32>], sentences: &[usize]) -> Lattice {
        let nl = self.num_labels;
        let emissions = features
            .iter()
            .map(|fs| {
                let mut row = vec![0.0; nl];
                for &f in fs {
                    let base = f as usize * nl;
                    for (y, r) in row.iter_mut().enumerate() {
                        *r += self.weights[base + y];
                    }
                }
                row
            })
            .collect();
        let transitions = (0..nl)
            .map(|a| (0..nl).map(|b| self.transition(a, b)).collect())
            .collect();
        Lattice {
            emissions,
            transitions,
            sentences: sentences.to_vec(),
        }
    }
}

pub(crate) fn log_sum_exp(xs: &[f64]) -> f64 {
    let m = xs.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if m == f64::NEG_INFINITY {
        return m;
    }
    m + xs.iter().map(|x| (x - m).exp()).sum::<f64>().ln()
}

/// Forward–backward tables in log space.
#[derive(Debug, Clone)]
pub struct ForwardBackward {
    pub alpha: Vec<Vec<f64>>,
    pub beta: Vec<Vec<f64>>,
    pub log_z: f64,
}

impl ForwardBackward {
    pub fn run(l: &Lattice) -> Self {
        let n = l.len();
        let nl = l.num_labels();
        let mut alpha = vec![vec![0.0; nl]; n];
        let mut beta = vec![vec![0.0; nl]; n];
        if n == 0 {
            return ForwardBackward {
                alpha,
                beta,
                log_z: 0.0,
            };
        }
        alpha[0].clone_from(&l.emissions[0]);
        let mut buf = vec![0.0; nl];
        for t in 1..n {
            for y in 0..nl {
                for (p, b) in buf.iter_mut().enumerate() {
                    *b = alpha[t - 1][p] + l.transitions[p][y];
                }
                alpha[t][y] = l.emissions[t][y] + log_sum_exp(&buf);
            }
        }
        for t in (0..n - 1).rev() {
            for y in 0..nl {
                for (q, b) in buf.iter_mut().enumerate() {
                    *b = l.transitions[y][q] + l.emissions[t + 1][q] + beta[t + 1][q];
                }
                beta[t][y] = log_sum_exp(&buf);
            }
        }
        let log_z = log_sum_exp(&alpha[n - 1]);
        ForwardBackward { alpha, beta, log_z }
    }

    /// Per-position label marginals.
    pub fn marginals(&self) -> Vec<Vec<f64>> {
        self.alpha
            .iter()
            .zip(&self.beta)
            .map(|(a, b)| a.iter().zip(b).map(|(x, y)| (x + y - self.log_z).exp()).collect())
            .collect()
    }
}

/// Penalized conditional log-likelihood Σ log p(y|x) − ‖w‖²/(2σ²) and its
/// gradient. `sigma2 = None` disables the prior.
pub fn log_likelihood_and_gradient(
    params: &CrfParams,
    instances: &[Instance],
    sigma2: Option<f64>,
) -> Result<(f64, Vec<f64>), LabelerError> {
    let nl = params.num_labels;
    let mut grad = vec![0.0; params.dim()];
    let mut ll = 0.0;
    for (i, inst) in instances.iter().enumerate() {
        let n = inst.features.len();
        if n == 0 {
            continue;
        }
        let lat = params.lattice(&inst.features, &inst.sentences);
        let fb = ForwardBackward::run(&lat);
        if !fb.log_z.is_finite() {
            return Err(LabelerError::Numerical(format!(
                "partition function of instance {i} is {}",
                fb.log_z
            )));
        }
        ll += lat.score(&inst.labels) - fb.log_z;
        // empirical counts
        for t in 0..n {
            let y = inst.labels[t];
            for &f in &inst.features[t] {
                grad[params.emission_index(f, y)] += 1.0;
            }
            if t > 0 {
                grad[params.transition_index(inst.labels[t - 1], y)] += 1.0;
            }
        }
        // expected counts
        for t in 0..n {
            for y in 0..nl {
                let p = (fb.alpha[t][y] + fb.beta[t][y] - fb.log_z).exp();
                for &f in &inst.features[t] {
                    grad[params.emission_index(f, y)] -= p;
                }
            }
            if t > 0 {
                for a in 0..nl {
                    for b in 0..nl {
                        let p = (fb.alpha[t - 1][a] + lat.transitions[a][b] + lat.emissions[t][b] + fb.beta[t][b]
                            - fb.log_z)
                            .exp();
                        grad[params.transition_index(a, b)] -= p;
                    }
                }
            }
        }
    }
    if let Some(s2) = sigma2 {
        for (g, w) in grad.iter_mut().zip(&params.weights) {
            ll -= w * w / (2.0 * s2);
            *g -= w / s2;
        }
    }
    if !ll.is_finite() {
        return Err(LabelerError::Numerical(format!("log-likelihood is {ll}")));
    }
    Ok((ll, grad))
}
