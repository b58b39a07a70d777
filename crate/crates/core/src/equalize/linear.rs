//! Symbol-spaced linear equalizers.
//!
//! Both designs come from one SVD of the convolution matrix `H = U S V^T`:
//! `f = V diag(s / (s^2 + lambda)) U^T e_d`, with `lambda = 0` for ZF and
//! `lambda = noise_var / signal_var` for MMSE.

use nalgebra::{DMatrix, DVector};

use super::{convolution_matrix, convolve, threshold_detect, OOK_LEVELS};
use crate::error::{Error, Result};

/// Largest accepted singular-value ratio of the convolution matrix.
const MAX_CONDITION: f64 = 1e12;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LinearKind {
    Zf,
    Mmse,
}

#[derive(Debug, Clone, PartialEq)]
pub struct LinearEqualizer {
    pub coeffs: Vec<f64>,
    pub decision_delay: usize,
    pub kind: LinearKind,
    /// `coeffs * taps`.
    pub combined: Vec<f64>,
    /// Objective at the chosen delay: ZF residual energy or MMSE (W^2-free) MSE.
    pub objective: f64,
}

struct Svd {
    u: DMatrix<f64>,
    s: DVector<f64>,
    v_t: DMatrix<f64>,
}

fn svd_of(taps: &[f64], n_eq: usize) -> Result<Svd> {
    if n_eq == 0 {
        return Err(Error::invalid("n_eq", "must be >= 1"));
    }
    let h = convolution_matrix(taps, n_eq);
    let svd = h.svd(true, true);
    let s = svd.singular_values;
    let smax = s.max();
    let smin = s.min();
    let condition = if smin > 0.0 { smax / smin } else { f64::INFINITY };
    if !(condition <= MAX_CONDITION) {
        return Err(Error::IllConditioned { condition });
    }
    Ok(Svd {
        u: svd.u.expect("requested U"),
        s,
        v_t: svd.v_t.expect("requested V^T"),
    })
}

/// `(f, objective)` for delay `d`; the objective is `1 - sum c_i^2 s_i^2 / (s_i^2 + lambda)`.
fn solve(svd: &Svd, d: usize, lambda: f64) -> (DVector<f64>, f64) {
    let c = svd.u.row(d).transpose();
    let mut coef = DVector::zeros(svd.s.len());
    let mut captured = 0.0;
    for i in 0..svd.s.len() {
        let s = svd.s[i];
        coef[i] = s / (s * s + lambda) * c[i];
        captured += c[i] * c[i] * s * s / (s * s + lambda);
    }
    (svd.v_t.transpose() * coef, (1.0 - captured).max(0.0))
}

fn design(
    taps: &[f64],
    n_eq: usize,
    lambda: f64,
    delay: Option<usize>,
    kind: LinearKind,
    scale: f64,
) -> Result<LinearEqualizer> {
    if taps.iter().all(|&v| v == 0.0) {
        return Err(Error::invalid("taps", "channel has no nonzero tap"));
    }
    let svd = svd_of(taps, n_eq)?;
    let rows = n_eq + taps.len() - 1;
    let candidates: Vec<usize> = match delay {
        Some(d) if d < rows => vec![d],
        Some(d) => {
            return Err(Error::invalid(
                "decision_delay",
                format!("{d} outside [0, {}]", rows - 1),
            ))
        }
        None => (0..rows).collect(),
    };
    let mut best: Option<(usize, DVector<f64>, f64)> = None;
    for d in candidates {
        let (f, obj) = solve(&svd, d, lambda);
        if best.as_ref().is_none_or(|b| obj < b.2 - 1e-15) {
            best = Some((d, f, obj));
        }
    }
    let (d, f, obj) = best.expect("at least one delay");
    let coeffs: Vec<f64> = f.iter().copied().collect();
    Ok(LinearEqualizer {
        combined: convolve(&coeffs, taps),
        coeffs,
        decision_delay: d,
        kind,
        objective: obj * scale,
    })
}

/// Least-squares zero-forcing equalizer of length `n_eq`.
pub fn design_zf(taps: &[f64], n_eq: usize, decision_delay: Option<usize>) -> Result<LinearEqualizer> {
    design(taps, n_eq, 0.0, decision_delay, LinearKind::Zf, 1.0)
}

/// Wiener equalizer for symbols of variance `signal_var` in white noise.
pub fn design_mmse(taps: &[f64], n_eq: usize, noise_var: f64, signal_var: f64) -> Result<LinearEqualizer> {
    if !(noise_var >= 0.0) {
        return Err(Error::invalid("noise_var", "must be >= 0"));
    }
    if !(signal_var > 0.0) {
        return Err(Error::invalid("signal_var", "must be > 0"));
    }
    design(
        taps,
        n_eq,
        noise_var / signal_var,
        None,
        LinearKind::Mmse,
        signal_var,
    )
}

impl LinearEqualizer {
    /// Filter output `z[n] = sum_k f[k] u[n - k]` at `n = m + delay`.
    pub fn output(&self, received: &[f64], n_bits: usize) -> Vec<f64> {
        (0..n_bits)
            .map(|m| {
                let n = m + self.decision_delay;
                self.coeffs
                    .iter()
                    .enumerate()
                    .filter(|(k, _)| *k <= n)
                    .map(|(k, f)| f * received.get(n - k).copied().unwrap_or(0.0))
                    .sum()
            })
            .collect()
    }

    /// Removes the mean residual ISI, then thresholds at the cursor gain.
    pub fn detect(&self, received: &[f64], n_bits: usize) -> Vec<u8> {
        let cursor = self.combined[self.decision_delay];
        let total: f64 = self.combined.iter().sum();
        let mean = 0.5 * (OOK_LEVELS.0 + OOK_LEVELS.1);
        let offset = mean * (total - cursor);
        let z: Vec<f64> = self
            .output(received, n_bits)
            .into_iter()
            .map(|v| v - offset)
            .collect();
        threshold_detect(&z, cursor, OOK_LEVELS)
    }

    /// Output MSE for centered symbols: `sv |c - e_d|^2 + nv |f|^2`.
    pub fn mse(&self, noise_var: f64, signal_var: f64) -> f64 {
        let isi: f64 = self
            .combined
            .iter()
            .enumerate()
            .map(|(i, &c)| {
                let t = if i == self.decision_delay { 1.0 } else { 0.0 };
                (c - t).powi(2)
            })
            .sum();
        let f2: f64 = self.coeffs.iter().map(|v| v * v).sum();
        signal_var * isi + noise_var * f2
    }
}
