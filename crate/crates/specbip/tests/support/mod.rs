//! Shared oracles for the integration tests. Everything here is an
//! independent reference computation, kept separate from the library paths
//! it checks.

use nalgebra::DMatrix;
use rand::Rng;
use rand_chacha::ChaCha8Rng;

/// Brute-force minimizer of `Σ (α_j - β_j)²` over nonincreasing sequences
/// with at least `n1 - n2` zeros and the nonzero entries in ± pairs.
///
/// Such a sequence is determined by its nonnegative nonincreasing head
/// `b_1 >= ... >= b_{n2} >= 0` (entry `j` pairs with entry `n - j + 1`), so
/// the problem is a least-squares projection onto a polyhedral cone in the
/// head variables. The optimum lies on one of the cone's faces, and on each
/// face the constrained minimizer is the per-block average of the
/// unconstrained targets. Enumerating every face (each adjacent-tie
/// constraint and the trailing zero constraint active or not) and keeping
/// the feasible candidates is therefore an exact, exhaustive search.
pub fn brute_force_pairing(alpha: &[f64], n1: usize, n2: usize) -> f64 {
    let n = alpha.len();
    assert_eq!(n, n1 + n2);
    let middle_cost: f64 = (n2..n1).map(|j| alpha[j] * alpha[j]).sum();
    if n2 == 0 {
        return middle_cost;
    }
    // per-pair unconstrained targets
    let targets: Vec<f64> = (0..n2)
        .map(|j| 0.5 * (alpha[j] - alpha[n - 1 - j]))
        .collect();
    let cost_of = |head: &[f64]| -> f64 {
        let mut total = middle_cost;
        for j in 0..n2 {
            let b = head[j];
            total += (alpha[j] - b).powi(2) + (alpha[n - 1 - j] + b).powi(2);
        }
        total
    };

    let mut best = f64::INFINITY;
    // bit k < n2-1: tie b_k = b_{k+1}; bit n2-1: pin the last block to zero
    for mask in 0u32..(1u32 << n2) {
        let mut head = vec![0.0f64; n2];
        let mut start = 0usize;
        while start < n2 {
            let mut end = start;
            while end + 1 < n2 && mask & (1 << end) != 0 {
                end += 1;
            }
            let mean: f64 =
                targets[start..=end].iter().sum::<f64>() / (end - start + 1) as f64;
            for item in head.iter_mut().take(end + 1).skip(start) {
                *item = mean;
            }
            start = end + 1;
        }
        if mask & (1 << (n2 - 1)) != 0 {
            // zero out the trailing block
            let mut j = n2;
            while j > 0 && (j == n2 || mask & (1 << (j - 1)) != 0) {
                j -= 1;
                head[j] = 0.0;
            }
        }
        let feasible = head.windows(2).all(|w| w[0] >= w[1] - 1e-15)
            && head[n2 - 1] >= -1e-15;
        if feasible {
            best = best.min(cost_of(&head));
        }
    }
    best
}

/// Random orthogonal matrix (Gram-Schmidt on uniform entries).
pub fn random_orthogonal(n: usize, rng: &mut ChaCha8Rng) -> DMatrix<f64> {
    let mut m = DMatrix::from_fn(n, n, |_, _| rng.gen::<f64>() * 2.0 - 1.0);
    for c in 0..n {
        for prev in 0..c {
            let dot: f64 = (0..n).map(|r| m[(r, c)] * m[(r, prev)]).sum();
            for r in 0..n {
                m[(r, c)] -= dot * m[(r, prev)];
            }
        }
        let norm: f64 = (0..n).map(|r| m[(r, c)] * m[(r, c)]).sum::<f64>().sqrt();
        for r in 0..n {
            m[(r, c)] /= norm;
        }
    }
    m
}

/// `tr(exp(s A))` by the truncated power series with `terms` terms.
pub fn trace_exp_series(a: &DMatrix<f64>, sign: f64, terms: usize) -> f64 {
    let n = a.nrows();
    let mut power = DMatrix::<f64>::identity(n, n);
    let mut total = n as f64; // k = 0 term
    let mut factorial = 1.0f64;
    for k in 1..terms {
        power = &power * a;
        factorial *= k as f64;
        total += sign.powi(k as i32) * power.trace() / factorial;
    }
    total
}
