//! Shared pieces of the Frank-Wolfe iteration over the unit simplex.
//!
//! Both the dual direction solve and the min-norm-point computation walk the
//! simplex with the same vertex-selection and update rules; the loops
//! themselves differ in objective and termination and live with their callers.

/// Uniform weights, the standard starting point on the simplex.
pub(crate) fn uniform_weights(p: usize) -> Vec<f64> {
    vec![1.0 / p as f64; p]
}

/// Index of the largest entry of `scores`; ties resolve to the smallest index.
pub(crate) fn best_vertex(scores: &[f64]) -> usize {
    let mut best = 0;
    for (i, &s) in scores.iter().enumerate().skip(1) {
        if s > scores[best] {
            best = i;
        }
    }
    best
}

/// Moves `lambda` a fraction `gamma` of the way toward vertex `idx`:
/// `lambda <- (1 - gamma) * lambda + gamma * e_idx`.
pub(crate) fn step_toward_vertex(lambda: &mut [f64], idx: usize, gamma: f64) {
    for l in lambda.iter_mut() {
        *l *= 1.0 - gamma;
    }
    lambda[idx] += gamma;
}
