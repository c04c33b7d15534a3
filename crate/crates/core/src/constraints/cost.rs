//! Scalar costs `C(x)` with gradients.

use std::sync::Arc;

use serde::{Deserialize, Serialize};

/// Serializable cost descriptions.
#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum CostSpec {
    Zero,
    /// `scale * sum_{k in coords} (x_k - target_k)^2`; `coords` defaults to
    /// all coordinates.
    QuadraticToTarget {
        target: Vec<f64>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        coords: Option<Vec<usize>>,
        scale: f64,
    },
    /// Squared path length over the position coordinates of a flattened
    /// trajectory: `scale * sum_i ||p_{i+1} - p_i||^2`.
    PathLength {
        horizon: usize,
        state_dim: usize,
        action_dim: usize,
        pos_dims: Vec<usize>,
        scale: f64,
    },
    /// `scale * sum_{k in indices} x_k^2`
    ControlEnergy { indices: Vec<usize>, scale: f64 },
}

/// A user-defined differentiable cost.
pub trait CostClosure: Send + Sync {
    fn value(&self, x: &[f64]) -> f64;
    fn grad(&self, x: &[f64]) -> Vec<f64>;
}

#[derive(Clone)]
pub enum CostFn {
    Zero,
    QuadraticToTarget {
        target: Vec<f64>,
        coords: Option<Vec<usize>>,
        scale: f64,
    },
    PathLength {
        horizon: usize,
        state_dim: usize,
        action_dim: usize,
        pos_dims: Vec<usize>,
        scale: f64,
    },
    ControlEnergy {
        indices: Vec<usize>,
        scale: f64,
    },
    Custom(Arc<dyn CostClosure>),
}

impl std::fmt::Debug for CostFn {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CostFn::Zero => write!(f, "CostFn::Zero"),
            CostFn::QuadraticToTarget { .. } => write!(f, "CostFn::QuadraticToTarget"),
            CostFn::PathLength { .. } => write!(f, "CostFn::PathLength"),
            CostFn::ControlEnergy { .. } => write!(f, "CostFn::ControlEnergy"),
            CostFn::Custom(_) => write!(f, "CostFn::Custom"),
        }
    }
}

impl From<CostSpec> for CostFn {
    fn from(spec: CostSpec) -> Self {
        match spec {
            CostSpec::Zero => CostFn::Zero,
            CostSpec::QuadraticToTarget {
                target,
                coords,
                scale,
            } => CostFn::QuadraticToTarget {
                target,
                coords,
                scale,
            },
            CostSpec::PathLength {
                horizon,
                state_dim,
                action_dim,
                pos_dims,
                scale,
            } => CostFn::PathLength {
                horizon,
                state_dim,
                action_dim,
                pos_dims,
                scale,
            },
            CostSpec::ControlEnergy { indices, scale } => CostFn::ControlEnergy { indices, scale },
        }
    }
}

impl CostFn {
    pub fn to_spec(&self) -> Option<CostSpec> {
        match self {
            CostFn::Zero => Some(CostSpec::Zero),
            CostFn::QuadraticToTarget {
                target,
                coords,
                scale,
            } => Some(CostSpec::QuadraticToTarget {
                target: target.clone(),
                coords: coords.clone(),
                scale: *scale,
            }),
            CostFn::PathLength {
                horizon,
                state_dim,
                action_dim,
                pos_dims,
                scale,
            } => Some(CostSpec::PathLength {
                horizon: *horizon,
                state_dim: *state_dim,
                action_dim: *action_dim,
                pos_dims: pos_dims.clone(),
                scale: *scale,
            }),
            CostFn::ControlEnergy { indices, scale } => Some(CostSpec::ControlEnergy {
                indices: indices.clone(),
                scale: *scale,
            }),
            CostFn::Custom(_) => None,
        }
    }

    pub fn is_zero(&self) -> bool {
        matches!(self, CostFn::Zero)
    }

    pub fn value(&self, x: &[f64]) -> f64 {
        match self {
            CostFn::Zero => 0.0,
            CostFn::QuadraticToTarget {
                target,
                coords,
                scale,
            } => {
                let sum: f64 = match coords {
                    Some(idx) => idx
                        .iter()
                        .zip(target)
                        .map(|(&i, g)| (x[i] - g) * (x[i] - g))
                        .sum(),
                    None => x
                        .iter()
                        .zip(target)
                        .map(|(xi, g)| (xi - g) * (xi - g))
                        .sum(),
                };
                scale * sum
            }
            CostFn::PathLength {
                horizon,
                state_dim,
                action_dim,
                pos_dims,
                scale,
            } => {
                let stride = state_dim + action_dim;
                let mut sum = 0.0;
                for i in 0..horizon - 1 {
                    for &k in pos_dims {
                        let d = x[(i + 1) * stride + k] - x[i * stride + k];
                        sum += d * d;
                    }
                }
                scale * sum
            }
            CostFn::ControlEnergy { indices, scale } => {
                scale * indices.iter().map(|&i| x[i] * x[i]).sum::<f64>()
            }
            CostFn::Custom(f) => f.value(x),
        }
    }

    /// `out += s * grad C(x)`.
    pub fn add_scaled_grad(&self, x: &[f64], s: f64, out: &mut [f64]) {
        match self {
            CostFn::Zero => {}
            CostFn::QuadraticToTarget {
                target,
                coords,
                scale,
            } => match coords {
                Some(idx) => {
                    for (&i, g) in idx.iter().zip(target) {
                        out[i] += s * 2.0 * scale * (x[i] - g);
                    }
                }
                None => {
                    for (i, g) in target.iter().enumerate() {
                        out[i] += s * 2.0 * scale * (x[i] - g);
                    }
                }
            },
            CostFn::PathLength {
                horizon,
                state_dim,
                action_dim,
                pos_dims,
                scale,
            } => {
                let stride = state_dim + action_dim;
                for i in 0..horizon - 1 {
                    for &k in pos_dims {
                        let (lo, hi) = (i * stride + k, (i + 1) * stride + k);
                        let d = x[hi] - x[lo];
                        out[hi] += s * 2.0 * scale * d;
                        out[lo] -= s * 2.0 * scale * d;
                    }
                }
            }
            CostFn::ControlEnergy { indices, scale } => {
                for &i in indices {
                    out[i] += s * 2.0 * scale * x[i];
                }
            }
            CostFn::Custom(f) => {
                let g = f.grad(x);
                crate::linalg::axpy(s, &g, out);
            }
        }
    }

    pub fn grad(&self, x: &[f64]) -> Vec<f64> {
        let mut out = vec![0.0; x.len()];
        self.add_scaled_grad(x, 1.0, &mut out);
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn gradients_match_finite_differences() {
        let mut rng = ChaCha8Rng::seed_from_u64(31);
        let costs: Vec<(usize, CostFn)> = vec![
            (
                3,
                CostFn::QuadraticToTarget {
                    target: vec![0.5, -1.0, 2.0],
                    coords: None,
                    scale: 0.7,
                },
            ),
            (
                5,
                CostFn::QuadraticToTarget {
                    target: vec![1.0, -1.0],
                    coords: Some(vec![1, 3]),
                    scale: 2.0,
                },
            ),
            (
                12,
                CostFn::PathLength {
                    horizon: 4,
                    state_dim: 2,
                    action_dim: 1,
                    pos_dims: vec![0, 1],
                    scale: 1.3,
                },
            ),
            (
                6,
                CostFn::ControlEnergy {
                    indices: vec![1, 4, 5],
                    scale: 0.5,
                },
            ),
        ];
        for (dim, cost) in &costs {
            for _ in 0..20 {
                let x: Vec<f64> = (0..*dim).map(|_| rng.random_range(-2.0..2.0)).collect();
                let g = cost.grad(&x);
                let h = 1e-5;
                for i in 0..*dim {
                    let mut xp = x.clone();
                    let mut xm = x.clone();
                    xp[i] += h;
                    xm[i] -= h;
                    let fd = (cost.value(&xp) - cost.value(&xm)) / (2.0 * h);
                    let denom = fd.abs().max(1.0);
                    assert!(
                        ((g[i] - fd) / denom).abs() < 1e-5,
                        "{cost:?} index {i}: {} vs {}",
                        g[i],
                        fd
                    );
                }
            }
        }
    }

    #[test]
    fn path_length_counts_consecutive_position_gaps() {
        let cost = CostFn::PathLength {
            horizon: 3,
            state_dim: 2,
            action_dim: 0,
            pos_dims: vec![0, 1],
            scale: 1.0,
        };
        // positions (0,0) -> (1,0) -> (1,2)
        let x = vec![0.0, 0.0, 1.0, 0.0, 1.0, 2.0];
        assert!((cost.value(&x) - (1.0 + 4.0)).abs() < 1e-14);
    }

    #[test]
    fn spec_round_trip() {
        let spec = CostSpec::ControlEnergy {
            indices: vec![0, 2],
            scale: 1.5,
        };
        let cost: CostFn = spec.clone().into();
        assert_eq!(cost.to_spec().unwrap(), spec);
        let text = serde_json::to_string(&spec).unwrap();
        let back: CostSpec = serde_json::from_str(&text).unwrap();
        assert_eq!(back, spec);
    }
}
