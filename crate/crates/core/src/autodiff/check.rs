//! Central finite-difference gradient checking against the analytic
//! reverse-mode results.

use alloc::vec::Vec;

use crate::error::Result;

use super::tensor::Tensor;

/// Central-difference gradients of a scalar function with respect to every
/// entry of every parameter tensor: `(f(x+h) - f(x-h)) / 2h`.
pub fn finite_difference_gradients(
    f: &mut dyn FnMut(&[Tensor]) -> Result<f64>,
    params: &[Tensor],
    h: f64,
) -> Result<Vec<Tensor>> {
    let mut grads = Vec::with_capacity(params.len());
    let mut work: Vec<Tensor> = params.to_vec();
    for p in 0..params.len() {
        let mut grad = Tensor::zeros(params[p].rows(), params[p].cols());
        for idx in 0..params[p].numel() {
            let original = work[p].data()[idx];
            work[p].data_mut()[idx] = original + h;
            let plus = f(&work)?;
            work[p].data_mut()[idx] = original - h;
            let minus = f(&work)?;
            work[p].data_mut()[idx] = original;
            grad.data_mut()[idx] = (plus - minus) / (2.0 * h);
        }
        grads.push(grad);
    }
    Ok(grads)
}

/// Largest entry-wise relative error between two gradients, with the
/// denominator floored at 1 so near-zero entries compare absolutely.
pub fn max_relative_error(analytic: &Tensor, numeric: &Tensor) -> f64 {
    debug_assert_eq!(analytic.shape(), numeric.shape());
    analytic
        .data()
        .iter()
        .zip(numeric.data())
        .map(|(&a, &n)| {
            let denom = a.abs().max(n.abs()).max(1.0);
            (a - n).abs() / denom
        })
        .fold(0.0, f64::max)
}
