//! Special functions shared by the analytic and Fock-space code paths.

/// Generalized Laguerre polynomial `L_n^{(k)}(x)` by forward three-term recurrence.
pub fn laguerre(n: usize, k: usize, x: f64) -> f64 {
    let (value, log_scale) = laguerre_scaled(n, k, x);
    value * log_scale.exp()
}

/// Same recurrence, returned as `(mantissa, ln_scale)` so that
/// `L = mantissa * exp(ln_scale)`. Keeps large-order values finite.
pub(crate) fn laguerre_scaled(n: usize, k: usize, x: f64) -> (f64, f64) {
    let k = k as f64;
    let mut prev = 1.0;
    if n == 0 {
        return (prev, 0.0);
    }
    let mut cur = 1.0 + k - x;
    let mut log_scale = 0.0;
    for m in 1..n {
        let m = m as f64;
        let next = ((2.0 * m + 1.0 + k - x) * cur - (m + k) * prev) / (m + 1.0);
        prev = cur;
        cur = next;
        let mag = cur.abs().max(prev.abs());
        if mag > 1e150 {
            prev /= 1e150;
            cur /= 1e150;
            log_scale += 150.0 * std::f64::consts::LN_10;
        }
    }
    (cur, log_scale)
}

/// Table of `ln(n!)` for `n = 0..len`.
pub(crate) fn ln_factorials(len: usize) -> Vec<f64> {
    let mut out = Vec::with_capacity(len.max(1));
    out.push(0.0);
    for n in 1..len {
        out.push(out[n - 1] + (n as f64).ln());
    }
    out
}
