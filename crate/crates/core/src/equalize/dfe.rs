//! Zero-forcing decision-feedback equalizer.

use nalgebra::{DMatrix, DVector};

use super::{convolution_matrix, convolve, threshold_detect, OOK_LEVELS};
use crate::error::{Error, Result};

/// Residual below which a zero-forcing solution counts as exact.
const EXACT_RESIDUAL: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq)]
pub struct DfeEqualizer {
    pub feedforward: Vec<f64>,
    /// `feedback[i]` multiplies the decision made `i + 1` symbols earlier.
    pub feedback: Vec<f64>,
    pub decision_delay: usize,
    /// `feedforward * taps`.
    pub combined: Vec<f64>,
}

/// Feedforward forces every combined tap outside the postcursor window
/// `delay + 1 ..= delay + n_fb` to zero and the cursor to one; the feedback
/// taps then equal the remaining postcursors.
pub fn design_zf_dfe(taps: &[f64], n_ff: usize, n_fb: usize) -> Result<DfeEqualizer> {
    if taps.iter().all(|&v| v == 0.0) {
        return Err(Error::invalid("taps", "channel has no nonzero tap"));
    }
    if n_ff == 0 {
        return Err(Error::invalid("n_ff", "must be >= 1"));
    }
    let h = convolution_matrix(taps, n_ff);
    let rows = h.nrows();
    // (delay, f, residual, |f|^2)
    let mut best: Option<(usize, DVector<f64>, f64, f64)> = None;
    for d in 0..rows {
        let kept: Vec<usize> = (0..rows).filter(|&i| !(i > d && i <= d + n_fb)).collect();
        let sub = DMatrix::from_fn(kept.len(), n_ff, |r, c| h[(kept[r], c)]);
        let target = DVector::from_fn(kept.len(), |r, _| if kept[r] == d { 1.0 } else { 0.0 });
        let Ok(f) = sub.clone().svd(true, true).solve(&target, 1e-12) else {
            continue;
        };
        let residual = (&sub * &f - &target).norm_squared();
        let energy = f.norm_squared();
        let better = match &best {
            None => true,
            Some((_, _, r, e)) => {
                let exact_new = residual < EXACT_RESIDUAL;
                let exact_old = *r < EXACT_RESIDUAL;
                match (exact_new, exact_old) {
                    (true, true) => energy < *e * (1.0 - 1e-9),
                    (true, false) => true,
                    (false, true) => false,
                    (false, false) => residual < *r,
                }
            }
        };
        if better {
            best = Some((d, f, residual, energy));
        }
    }
    let (d, f, _, _) = best.ok_or(Error::IllConditioned {
        condition: f64::INFINITY,
    })?;
    let feedforward: Vec<f64> = f.iter().copied().collect();
    let combined = convolve(&feedforward, taps);
    let feedback = (1..=n_fb)
        .map(|i| combined.get(d + i).copied().unwrap_or(0.0))
        .collect();
    Ok(DfeEqualizer {
        feedforward,
        feedback,
        decision_delay: d,
        combined,
    })
}

impl DfeEqualizer {
    pub fn detect(&self, received: &[f64], n_bits: usize) -> Vec<u8> {
        let d = self.decision_delay;
        let cursor = self.combined[d];
        // mean of ISI that neither the cursor nor the feedback accounts for
        let covered: f64 = cursor + self.feedback.iter().sum::<f64>();
        let total: f64 = self.combined.iter().sum();
        let offset = 0.5 * (OOK_LEVELS.0 + OOK_LEVELS.1) * (total - covered);
        let mut out = Vec::with_capacity(n_bits);
        for m in 0..n_bits {
            let n = m + d;
            let mut z = 0.0;
            for (k, &f) in self.feedforward.iter().enumerate() {
                if k > n {
                    break;
                }
                if let Some(&u) = received.get(n - k) {
                    z += f * u;
                }
            }
            for (i, &b) in self.feedback.iter().enumerate() {
                if m > i {
                    let past = out[m - 1 - i] as f64;
                    z -= b * (OOK_LEVELS.0 + (OOK_LEVELS.1 - OOK_LEVELS.0) * past);
                }
            }
            out.push(threshold_detect(&[z - offset], cursor, OOK_LEVELS)[0]);
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::link::convolve_bits;

    #[test]
    fn identity_has_no_feedback() {
        let eq = design_zf_dfe(&[1.0], 20, 0).unwrap();
        assert!(eq.feedback.is_empty());
        assert!((eq.combined[eq.decision_delay] - 1.0).abs() < 1e-12);
    }

    #[test]
    fn two_tap_postcursor_cancelled() {
        let eq = design_zf_dfe(&[1.0, 0.5], 20, 1).unwrap();
        let c = &eq.combined;
        let d = eq.decision_delay;
        for (i, &v) in c.iter().enumerate() {
            if i == d {
                assert!((v - 1.0).abs() < 1e-12);
            } else if i == d + 1 {
                assert!((v - eq.feedback[0]).abs() < 1e-15);
            } else {
                assert!(v.abs() < 1e-12, "c[{i}] = {v}");
            }
        }
        // minimum-phase channel: the trivial feedforward is optimal
        assert_eq!(d, 0);
        assert!((eq.feedback[0] - 0.5).abs() < 1e-12);
    }

    #[test]
    fn noiseless_detection_with_strong_postcursors() {
        let taps = [0.4, 1.0, 0.8, 0.5, 0.3];
        let eq = design_zf_dfe(&taps, 20, taps.len() - 1).unwrap();
        let bits: Vec<u8> = (0..500).map(|i| ((i * 13 + 5) % 7 % 2) as u8).collect();
        let u = convolve_bits(&bits, &taps, 1.0);
        let got = eq.detect(&u, bits.len());
        let errors = got.iter().zip(&bits).filter(|(a, b)| a != b).count();
        assert_eq!(errors, 0);
    }

    #[test]
    fn feedback_is_causal() {
        let eq = design_zf_dfe(&[1.0, 0.6, 0.2], 20, 2).unwrap();
        assert_eq!(eq.feedback.len(), 2);
        let d = eq.decision_delay;
        assert!((eq.feedback[0] - eq.combined[d + 1]).abs() < 1e-15);
        assert!((eq.feedback[1] - eq.combined[d + 2]).abs() < 1e-15);
    }
}
