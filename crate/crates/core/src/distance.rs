//! Entropy and distribution distances. All logarithms are natural.

use crate::error::{Error, Result};
use crate::partition::Distribution;

/// Shannon entropy in nats.
pub fn shannon_entropy(d: &Distribution) -> f64 {
    entropy_of(d.probs())
}

/// Entropy of a probability vector; zero entries contribute nothing.
pub fn entropy_of(probs: &[f64]) -> f64 {
    -probs
        .iter()
        .filter(|&&p| p > 0.0)
        .map(|&p| p * p.ln())
        .sum::<f64>()
}

/// `(q - p) / p`, the growth of `q` relative to a positive reference `p`.
pub fn relative_distance(p: f64, q: f64) -> Result<f64> {
    if p == 0.0 {
        return Err(Error::DivisionByZeroDomain);
    }
    Ok((q - p) / p)
}

fn check_lengths(p: &[f64], q: &[f64]) -> Result<()> {
    if p.len() != q.len() {
        return Err(Error::LengthMismatch {
            left: p.len(),
            right: q.len(),
        });
    }
    Ok(())
}

/// Earth mover's distance when every pair of distinct values is one unit
/// apart: half the L1 distance.
pub fn emd_equal(p: &[f64], q: &[f64]) -> Result<f64> {
    check_lengths(p, q)?;
    Ok(0.5 * p.iter().zip(q).map(|(a, b)| (a - b).abs()).sum::<f64>())
}

/// Earth mover's distance over an ordered domain of `m` values where values
/// `i` and `j` are `|i - j| / (m - 1)` apart.
pub fn emd_ordered(p: &[f64], q: &[f64]) -> Result<f64> {
    check_lengths(p, q)?;
    let m = p.len();
    if m <= 1 {
        return Ok(0.0);
    }
    let mut carried = 0.0;
    let mut work = 0.0;
    for (a, b) in p.iter().zip(q) {
        carried += a - b;
        work += carried.abs();
    }
    Ok(work / (m - 1) as f64)
}
