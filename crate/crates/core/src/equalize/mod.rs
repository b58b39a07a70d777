//! Receivers for the OOK tap model: threshold, linear ZF / MMSE, ZF-DFE and
//! Viterbi MLSE.
//!
//! All detectors work on received samples normalized by `P0`, so symbol
//! levels are `{0, 1}` and the channel taps carry the cursor gain.

mod dfe;
mod linear;
mod mlse;

pub use dfe::{design_zf_dfe, DfeEqualizer};
pub use linear::{design_mmse, design_zf, LinearEqualizer, LinearKind};
pub use mlse::{mlse_viterbi, MlseDetector, MAX_MLSE_TAPS};

use crate::error::{Error, Result};

/// OOK amplitudes in normalized units.
pub const OOK_LEVELS: (f64, f64) = (0.0, 1.0);

/// Variance of a centered OOK symbol `a - 1/2`.
pub const OOK_SIGNAL_VAR: f64 = 0.25;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum EqualizerKind {
    None,
    Zf,
    Mmse,
    ZfDfe,
    Mlse,
}

impl EqualizerKind {
    pub const ALL: [EqualizerKind; 5] = [
        EqualizerKind::None,
        EqualizerKind::Zf,
        EqualizerKind::Mmse,
        EqualizerKind::ZfDfe,
        EqualizerKind::Mlse,
    ];

    pub fn name(self) -> &'static str {
        match self {
            EqualizerKind::None => "none",
            EqualizerKind::Zf => "zf",
            EqualizerKind::Mmse => "mmse",
            EqualizerKind::ZfDfe => "zfdfe",
            EqualizerKind::Mlse => "mlse",
        }
    }

    /// Parses one name, or `all` into every receiver.
    pub fn parse_list(s: &str) -> Result<Vec<EqualizerKind>> {
        if s == "all" {
            return Ok(Self::ALL.to_vec());
        }
        s.split(',').map(|p| p.trim().parse()).collect()
    }
}

impl std::fmt::Display for EqualizerKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.pad(self.name())
    }
}

impl std::str::FromStr for EqualizerKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Self::ALL
            .iter()
            .copied()
            .find(|k| k.name() == s)
            .ok_or_else(|| {
                Error::invalid(
                    "equalizer",
                    format!("unknown equalizer `{s}` (none, zf, mmse, zfdfe, mlse, all)"),
                )
            })
    }
}

/// Bit is 1 iff the sample exceeds `cursor_gain (l0 + l1) / 2`; ties go to 0.
pub fn threshold_detect(received: &[f64], cursor_gain: f64, levels: (f64, f64)) -> Vec<u8> {
    let thr = cursor_gain * 0.5 * (levels.0 + levels.1);
    received.iter().map(|&v| u8::from(v > thr)).collect()
}

/// Design lengths shared by the equalizer bank.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct EqualizerLengths {
    pub n_eq: usize,
    pub n_ff: usize,
    /// `None` means `len(taps) - 1`.
    pub n_fb: Option<usize>,
}

impl Default for EqualizerLengths {
    fn default() -> Self {
        Self {
            n_eq: 20,
            n_ff: 20,
            n_fb: None,
        }
    }
}

/// A designed receiver, ready to detect blocks.
#[derive(Debug, Clone, PartialEq)]
pub enum Detector {
    /// Samples at the strongest tap; threshold at the mean level.
    Threshold { cursor: usize, gain: f64 },
    Linear(LinearEqualizer),
    Dfe(DfeEqualizer),
    Mlse(MlseDetector),
}

impl Detector {
    /// `noise_var` is in normalized units (divided by `P0^2`).
    pub fn design(
        kind: EqualizerKind,
        taps: &[f64],
        noise_var: f64,
        lengths: EqualizerLengths,
    ) -> Result<Self> {
        if taps.is_empty() || taps.iter().all(|&v| v == 0.0) {
            return Err(Error::invalid("taps", "channel has no nonzero tap"));
        }
        Ok(match kind {
            EqualizerKind::None => {
                let cursor = taps
                    .iter()
                    .enumerate()
                    .max_by(|a, b| a.1.total_cmp(b.1))
                    .map(|(i, _)| i)
                    .unwrap_or(0);
                Detector::Threshold {
                    cursor,
                    gain: taps.iter().sum(),
                }
            }
            EqualizerKind::Zf => Detector::Linear(design_zf(taps, lengths.n_eq, None)?),
            EqualizerKind::Mmse => {
                Detector::Linear(design_mmse(taps, lengths.n_eq, noise_var, OOK_SIGNAL_VAR)?)
            }
            EqualizerKind::ZfDfe => {
                let n_fb = lengths.n_fb.unwrap_or(taps.len() - 1);
                Detector::Dfe(design_zf_dfe(taps, lengths.n_ff, n_fb)?)
            }
            EqualizerKind::Mlse => Detector::Mlse(MlseDetector::new(taps, OOK_LEVELS)?),
        })
    }

    /// Detects `n_bits` symbols from `received` (length `n_bits + L - 1`).
    /// Symbols outside the block are treated as unknown by MLSE.
    pub fn detect(&self, received: &[f64], n_bits: usize) -> Vec<u8> {
        match self {
            Detector::Threshold { cursor, gain } => {
                let samples: Vec<f64> = (0..n_bits)
                    .map(|m| received.get(m + cursor).copied().unwrap_or(0.0))
                    .collect();
                threshold_detect(&samples, *gain, OOK_LEVELS)
            }
            Detector::Linear(eq) => eq.detect(received, n_bits),
            Detector::Dfe(eq) => eq.detect(received, n_bits),
            Detector::Mlse(det) => det.detect_unterminated(received, n_bits),
        }
    }
}

/// Full linear convolution.
pub fn convolve(a: &[f64], b: &[f64]) -> Vec<f64> {
    if a.is_empty() || b.is_empty() {
        return Vec::new();
    }
    let mut out = vec![0.0; a.len() + b.len() - 1];
    for (i, &x) in a.iter().enumerate() {
        for (j, &y) in b.iter().enumerate() {
            out[i + j] += x * y;
        }
    }
    out
}

/// `(n_eq + L - 1) x n_eq` Toeplitz convolution matrix of `taps`.
pub(crate) fn convolution_matrix(taps: &[f64], n_eq: usize) -> nalgebra::DMatrix<f64> {
    let rows = n_eq + taps.len() - 1;
    nalgebra::DMatrix::from_fn(rows, n_eq, |i, j| {
        if i >= j && i - j < taps.len() {
            taps[i - j]
        } else {
            0.0
        }
    })
}
