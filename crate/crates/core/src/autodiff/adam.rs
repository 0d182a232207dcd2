use alloc::format;
use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::math;

use super::tensor::Tensor;

/// Adam hyperparameters. Defaults: `lr = 1e-3`, `beta1 = 0.9`,
/// `beta2 = 0.999`, `epsilon = 1e-8`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AdamConfig {
    pub learning_rate: f64,
    pub beta1: f64,
    pub beta2: f64,
    pub epsilon: f64,
}

impl Default for AdamConfig {
    fn default() -> Self {
        AdamConfig { learning_rate: 1e-3, beta1: 0.9, beta2: 0.999, epsilon: 1e-8 }
    }
}

impl AdamConfig {
    pub fn with_learning_rate(learning_rate: f64) -> Self {
        AdamConfig { learning_rate, ..AdamConfig::default() }
    }
}

/// Adam state: step counter plus first/second moment buffers shaped like
/// the parameters.
#[derive(Debug, Clone)]
pub struct Adam {
    config: AdamConfig,
    step: u64,
    first: Vec<Tensor>,
    second: Vec<Tensor>,
}

impl Adam {
    pub fn new(config: AdamConfig, shapes: &[(usize, usize)]) -> Result<Self> {
        if !(config.beta1 > 0.0 && config.beta1 < 1.0 && config.beta2 > 0.0 && config.beta2 < 1.0)
        {
            return Err(Error::ValueError("Adam betas must lie in (0, 1)".into()));
        }
        let first = shapes.iter().map(|&(r, c)| Tensor::zeros(r, c)).collect();
        let second = shapes.iter().map(|&(r, c)| Tensor::zeros(r, c)).collect();
        Ok(Adam { config, step: 0, first, second })
    }

    pub fn step_count(&self) -> u64 {
        self.step
    }

    /// One bias-corrected Adam update over every parameter tensor.
    pub fn step(&mut self, params: &mut [&mut Tensor], grads: &[&Tensor]) -> Result<()> {
        if params.len() != self.first.len() || grads.len() != self.first.len() {
            return Err(Error::DimensionError(format!(
                "Adam holds {} slots, got {} params and {} grads",
                self.first.len(),
                params.len(),
                grads.len()
            )));
        }
        for (slot, (param, grad)) in params.iter().zip(grads).enumerate() {
            if param.shape() != self.first[slot].shape() || grad.shape() != param.shape() {
                return Err(Error::DimensionError(format!("Adam slot {slot} shape mismatch")));
            }
        }
        self.step += 1;
        let t = self.step as i32;
        let AdamConfig { learning_rate, beta1, beta2, epsilon } = self.config;
        let bc1 = 1.0 - math::powf(beta1, t as f64);
        let bc2 = 1.0 - math::powf(beta2, t as f64);
        for (slot, (param, grad)) in params.iter_mut().zip(grads).enumerate() {
            let m = &mut self.first[slot];
            let v = &mut self.second[slot];
            for idx in 0..param.numel() {
                let g = grad.data()[idx];
                let mi = beta1 * m.data()[idx] + (1.0 - beta1) * g;
                let vi = beta2 * v.data()[idx] + (1.0 - beta2) * g * g;
                m.data_mut()[idx] = mi;
                v.data_mut()[idx] = vi;
                let m_hat = mi / bc1;
                let v_hat = vi / bc2;
                param.data_mut()[idx] -= learning_rate * m_hat / (math::sqrt(v_hat) + epsilon);
            }
        }
        Ok(())
    }
}
