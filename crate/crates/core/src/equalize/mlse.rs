//! Maximum-likelihood sequence estimation with the Viterbi algorithm.

use crate::error::{Error, Result};

/// Longest channel accepted (`2^15` states).
pub const MAX_MLSE_TAPS: usize = 16;

#[derive(Debug, Clone, PartialEq)]
pub struct MlseDetector {
    pub channel_taps: Vec<f64>,
    pub n_states: usize,
    pub levels: (f64, f64),
    /// Noise-free output for `(state, input)`, indexed `2 * state + input`.
    outputs: Vec<f64>,
}

impl MlseDetector {
    pub fn new(taps: &[f64], levels: (f64, f64)) -> Result<Self> {
        if taps.is_empty() {
            return Err(Error::invalid("taps", "empty channel"));
        }
        if taps.len() > MAX_MLSE_TAPS {
            return Err(Error::StateSpaceTooLarge {
                taps: taps.len(),
                max: MAX_MLSE_TAPS,
            });
        }
        let memory = taps.len() - 1;
        let n_states = 1usize << memory;
        let level = |b: usize| if b == 0 { levels.0 } else { levels.1 };
        let mut outputs = vec![0.0; 2 * n_states];
        for s in 0..n_states {
            for a in 0..2 {
                // bit l-1 of the state holds the symbol sent l steps earlier
                let mut y = taps[0] * level(a);
                for (l, &h) in taps.iter().enumerate().skip(1) {
                    y += h * level((s >> (l - 1)) & 1);
                }
                outputs[2 * s + a] = y;
            }
        }
        Ok(Self {
            channel_taps: taps.to_vec(),
            n_states,
            levels,
            outputs,
        })
    }

    pub fn memory(&self) -> usize {
        self.channel_taps.len() - 1
    }

    /// Detects `n_bits` symbols. `received` holds `n_bits + memory` samples;
    /// the trellis starts and ends in the all-zero state.
    pub fn detect(&self, received: &[f64], n_bits: usize) -> Vec<u8> {
        self.run(received, n_bits, true)
    }

    /// Same search with unknown symbols before and after the block: every
    /// start state is allowed and the best final state wins. Samples past
    /// `n_bits` (up to `memory` of them) are used when present.
    pub fn detect_unterminated(&self, received: &[f64], n_bits: usize) -> Vec<u8> {
        self.run(received, n_bits, false)
    }

    fn run(&self, received: &[f64], n_bits: usize, terminated: bool) -> Vec<u8> {
        let nu = self.memory();
        if nu == 0 {
            // one state: every step is an isolated decision
            return (0..n_bits)
                .map(|m| {
                    let u = received.get(m).copied().unwrap_or(0.0);
                    let e0 = u - self.outputs[0];
                    let e1 = u - self.outputs[1];
                    u8::from(e1 * e1 < e0 * e0)
                })
                .collect();
        }
        let steps = if terminated {
            n_bits + nu
        } else {
            received.len().clamp(n_bits, n_bits + nu)
        };
        let ns = self.n_states;
        let words = ns.div_ceil(64);
        let top = 1usize << (nu - 1);

        let mut metric = vec![if terminated { f64::INFINITY } else { 0.0 }; ns];
        metric[0] = 0.0;
        let mut next = vec![f64::INFINITY; ns];
        // survivor bit per (step, state): set when the predecessor had its oldest bit set
        let mut surv = vec![0u64; steps * words];

        for m in 0..steps {
            let u = received.get(m).copied().unwrap_or(0.0);
            let forced_zero = terminated && m >= n_bits;
            let row = &mut surv[m * words..(m + 1) * words];
            for (s_new, slot) in next.iter_mut().enumerate() {
                let a = s_new & 1;
                if forced_zero && a == 1 {
                    *slot = f64::INFINITY;
                    continue;
                }
                let p0 = s_new >> 1;
                let p1 = p0 | top;
                let e0 = u - self.outputs[2 * p0 + a];
                let e1 = u - self.outputs[2 * p1 + a];
                let m0 = metric[p0] + e0 * e0;
                let m1 = metric[p1] + e1 * e1;
                if m1 < m0 {
                    *slot = m1;
                    row[s_new / 64] |= 1 << (s_new % 64);
                } else {
                    *slot = m0;
                }
            }
            std::mem::swap(&mut metric, &mut next);
        }

        let mut s = if terminated {
            0
        } else {
            (0..ns)
                .min_by(|&i, &j| metric[i].total_cmp(&metric[j]))
                .unwrap_or(0)
        };
        let mut bits = vec![0u8; steps];
        for m in (0..steps).rev() {
            bits[m] = (s & 1) as u8;
            let took_p1 = (surv[m * words + s / 64] >> (s % 64)) & 1 == 1;
            s = (s >> 1) | if took_p1 { top } else { 0 };
        }
        bits.truncate(n_bits);
        bits
    }
}

/// Sequence minimizing `sum_m (u[m] - sum_l h[l] a[m - l])^2` over
/// `a in {levels}`. `received` includes the `len(taps) - 1` tail samples.
pub fn mlse_viterbi(received: &[f64], taps: &[f64], levels: (f64, f64)) -> Result<Vec<u8>> {
    let det = MlseDetector::new(taps, levels)?;
    let n_bits = received.len().saturating_sub(det.memory());
    Ok(det.detect(received, n_bits))
}
