//! Pulse shaping, sampling and noise: from a continuous CIR to the
//! symbol-spaced model `u[m] = P0 sum_l h_e[l] a[m - l] + n[m]`.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};

use crate::cir::{Cir, Corollary1};
use crate::error::{Error, Result};

/// Minimum CIR samples per symbol period for the tap convolution.
pub const MIN_SAMPLES_PER_SYMBOL: usize = 32;

/// Offsets swept over one symbol when aligning the sampling phase.
pub const OFFSET_SWEEP: usize = 256;

/// Taps below this fraction of the peak are dropped from both ends.
pub const STORE_THRESHOLD: f64 = 1e-6;

/// Default relative threshold for counting a tap as significant (-20 dB of the peak).
pub const SIGNIFICANT_THRESHOLD: f64 = 1e-2;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum PulseFamily {
    #[default]
    Rect,
}

/// `g_tx(t) = (1/T) rect(t/T)`; the receive filter is its time reverse.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PulseShape {
    pub t: f64,
    pub family: PulseFamily,
}

impl PulseShape {
    pub fn rect(t: f64) -> Self {
        Self {
            t,
            family: PulseFamily::Rect,
        }
    }

    pub fn g_tx(&self, x: f64) -> f64 {
        if x.abs() < 0.5 * self.t {
            1.0 / self.t
        } else {
            0.0
        }
    }

    /// `int g_tx^2 dt = 1/T`.
    pub fn energy(&self) -> f64 {
        1.0 / self.t
    }

    /// `g_tx * g_rx`: unit-area triangle of base `2T`, height `1/T`.
    pub fn triangle(&self, x: f64) -> f64 {
        (1.0 - x.abs() / self.t).max(0.0) / self.t
    }

    /// `G_tx(f) = sinc(pi T f)`.
    pub fn spectrum(&self, f: f64) -> f64 {
        let a = std::f64::consts::PI * self.t * f;
        if a == 0.0 {
            1.0
        } else {
            a.sin() / a
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct DiscreteChannel {
    /// Dimensionless taps `T h_e(tau0 + t_off + m T)`, trimmed at [`STORE_THRESHOLD`].
    pub taps: Vec<f64>,
    /// Symbol period (s).
    pub t: f64,
    /// Sampling phase relative to `tau0` (s), in `[0, T)`.
    pub t_off: f64,
    /// Index `m` of `taps[0]`.
    pub first_index: i64,
    /// Variance of `n[m]`.
    pub noise_var: f64,
    /// Composite responsivity / pointing / fading gain folded into the taps.
    pub scale: f64,
}

impl DiscreteChannel {
    pub fn from_taps(taps: Vec<f64>, t: f64) -> Self {
        Self {
            taps,
            t,
            t_off: 0.0,
            first_index: 0,
            noise_var: 0.0,
            scale: 1.0,
        }
    }

    pub fn with_noise(mut self, noise_var: f64) -> Self {
        self.noise_var = noise_var;
        self
    }

    pub fn peak(&self) -> f64 {
        self.taps.iter().copied().fold(0.0, f64::max)
    }

    /// Taps with leading and trailing values below `rel * peak` removed.
    pub fn significant_taps(&self, rel: f64) -> Vec<f64> {
        let (lo, hi) = trim_range(&self.taps, rel);
        self.taps[lo..hi].to_vec()
    }

    pub fn significant_count(&self, rel: f64) -> usize {
        let (lo, hi) = trim_range(&self.taps, rel);
        hi - lo
    }

    /// Same channel restricted to its significant taps.
    pub fn truncated(&self, rel: f64) -> Self {
        let (lo, hi) = trim_range(&self.taps, rel);
        Self {
            taps: self.taps[lo..hi].to_vec(),
            first_index: self.first_index + lo as i64,
            ..self.clone()
        }
    }

    pub fn tap_sum(&self) -> f64 {
        self.taps.iter().sum()
    }
}

fn trim_range(taps: &[f64], rel: f64) -> (usize, usize) {
    let peak = taps.iter().copied().fold(0.0, f64::max);
    if peak <= 0.0 {
        return (0, taps.len().min(1));
    }
    let cut = rel * peak;
    let lo = taps.iter().position(|&v| v >= cut).unwrap_or(0);
    let hi = taps.iter().rposition(|&v| v >= cut).map_or(taps.len(), |i| i + 1);
    (lo, hi)
}

/// Samples `T (h * g_tx * g_rx)` at `t_off + m T`, choosing the offset of
/// maximum tap energy.
pub fn effective_taps(cir: &Cir, t: f64, scale: f64) -> Result<DiscreteChannel> {
    if !(t.is_finite() && t > 0.0) {
        return Err(Error::invalid("symbol_period", format!("must be > 0, got {t}")));
    }
    let dt = cir.dt();
    let per_symbol = if dt > 0.0 { t / dt } else { 0.0 };
    if per_symbol < MIN_SAMPLES_PER_SYMBOL as f64 {
        return Err(Error::InsufficientResolution {
            samples_per_symbol: per_symbol,
            required: MIN_SAMPLES_PER_SYMBOL,
        });
    }
    if cir.peak() <= 0.0 {
        return Err(Error::EmptyCir);
    }
    // trapezoid weights so that sum(taps) reproduces Cir::integral exactly
    let n = cir.len();
    let weights: Vec<f64> = (0..n)
        .map(|i| {
            let w = if i == 0 || i == n - 1 { 0.5 * dt } else { dt };
            w * cir.h[i] * scale
        })
        .collect();
    let t_min = cir.t_grid[0];
    let t_max = cir.t_grid[n - 1];
    let m_lo = ((t_min - t) / t).floor() as i64 - 1;
    let m_hi = ((t_max + t) / t).ceil() as i64 + 1;

    let taps_at = |off: f64| -> Vec<f64> {
        (m_lo..=m_hi)
            .map(|m| {
                let tm = off + m as f64 * t;
                // samples within one symbol of tm
                let i0 = (((tm - t - t_min) / dt).floor().max(0.0)) as usize;
                let i1 = ((((tm + t - t_min) / dt).ceil()) as isize).clamp(0, n as isize - 1) as usize;
                (i0..=i1.max(i0))
                    .filter(|&i| i < n)
                    .map(|i| weights[i] * (1.0 - (tm - cir.t_grid[i]).abs() / t).max(0.0))
                    .sum()
            })
            .collect()
    };

    let mut best = (f64::NEG_INFINITY, 0.0, Vec::new());
    for j in 0..OFFSET_SWEEP {
        let off = t * j as f64 / OFFSET_SWEEP as f64;
        let taps = taps_at(off);
        let energy: f64 = taps.iter().map(|v| v * v).sum();
        if energy > best.0 {
            best = (energy, off, taps);
        }
    }
    let (_, t_off, taps) = best;
    let (lo, hi) = trim_range(&taps, STORE_THRESHOLD);
    Ok(DiscreteChannel {
        taps: taps[lo..hi].to_vec(),
        t,
        t_off,
        first_index: m_lo + lo as i64,
        noise_var: 0.0,
        scale,
    })
}

/// Taps for the closed-form CIR, including the non-dispersive delta channel.
pub fn corollary_taps(c: &Corollary1, t: f64, scale: f64) -> Result<DiscreteChannel> {
    match c {
        Corollary1::Dispersive(p) => effective_taps(&p.sample(), t, scale),
        Corollary1::NonDispersive { h_los, .. } => {
            let mut ch = DiscreteChannel::from_taps(vec![h_los * scale], t);
            ch.scale = scale;
            Ok(ch)
        }
    }
}

/// `N0 / (2T)`: per-sample noise variance after the unit-energy matched filter.
pub fn noise_variance(n0: f64, t: f64) -> f64 {
    n0 / (2.0 * t)
}

/// Transmit SNR `gamma_t = P0^2 T / N0` (linear).
pub fn gamma_t(p0: f64, t: f64, n0: f64) -> f64 {
    p0 * p0 * t / n0
}

/// Power achieving a given linear `gamma_t`.
pub fn p0_for_gamma_t(gamma: f64, t: f64, n0: f64) -> f64 {
    (gamma * n0 / t).sqrt()
}

pub fn db_to_linear(db: f64) -> f64 {
    10f64.powf(db / 10.0)
}

pub fn linear_to_db(x: f64) -> f64 {
    10.0 * x.log10()
}

/// dBm/MHz to W/Hz.
pub fn dbm_per_mhz_to_w_per_hz(v: f64) -> f64 {
    10f64.powf((v - 30.0) / 10.0) / 1e6
}

/// Fills `out` with zero-mean Gaussian noise of variance `noise_var`.
pub fn fill_awgn<R: rand::Rng + ?Sized>(rng: &mut R, out: &mut [f64], noise_var: f64) {
    if noise_var <= 0.0 {
        out.iter_mut().for_each(|v| *v = 0.0);
        return;
    }
    let normal = Normal::new(0.0, noise_var.sqrt()).expect("finite variance");
    for v in out.iter_mut() {
        *v = normal.sample(rng);
    }
}

/// `len` i.i.d. Gaussian samples, deterministic in `seed`.
pub fn awgn_sequence(len: usize, noise_var: f64, seed: u64) -> Vec<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = vec![0.0; len];
    fill_awgn(&mut rng, &mut out, noise_var);
    out
}

/// Noise-free `P0 (h * a)[m]` over the full convolution length `n + L - 1`.
pub fn convolve_bits(bits: &[u8], taps: &[f64], p0: f64) -> Vec<f64> {
    if bits.is_empty() || taps.is_empty() {
        return Vec::new();
    }
    let mut out = vec![0.0; bits.len() + taps.len() - 1];
    for (m, &b) in bits.iter().enumerate() {
        if b != 0 {
            for (l, &h) in taps.iter().enumerate() {
                out[m + l] += p0 * h;
            }
        }
    }
    out
}

/// `u[m] = P0 sum_l h_e[l] a[m - l] + n[m]`, including the `L - 1` tail samples.
pub fn transmit_receive(bits: &[u8], ch: &DiscreteChannel, p0: f64, seed: u64) -> Vec<f64> {
    let mut u = convolve_bits(bits, &ch.taps, p0);
    let noise = awgn_sequence(u.len(), ch.noise_var, seed);
    u.iter_mut().zip(noise).for_each(|(a, n)| *a += n);
    u
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::beam::BeamParams;
    use crate::cir::{cir_corollary1, symmetric_grid, CirMethod};
    use crate::geometry::LinkGeometry;
    use crate::irs::IrsParams;
    use proptest::prelude::*;

    fn corollary(theta_p: f64) -> Corollary1 {
        let g = LinkGeometry::default().with_theta_p(theta_p);
        cir_corollary1(&g, &BeamParams::default(), &IrsParams::default()).unwrap()
    }

    #[test]
    fn rect_pulse_properties() {
        let p = PulseShape::rect(2.0);
        assert_eq!(p.g_tx(0.9), 0.5);
        assert_eq!(p.g_tx(1.1), 0.0);
        assert_eq!(p.energy(), 0.5);
        assert_eq!(p.triangle(0.0), 0.5);
        assert_eq!(p.triangle(2.0), 0.0);
        assert_eq!(p.spectrum(0.0), 1.0);
        assert!(p.spectrum(0.5).abs() < 1e-15);
    }

    #[test]
    fn delta_channel_is_one_tap() {
        let c = Corollary1::NonDispersive {
            tau0: 0.0,
            h_los: 0.6,
        };
        let ch = corollary_taps(&c, 1e-10, 2.0).unwrap();
        assert_eq!(ch.taps, vec![1.2]);
    }

    #[test]
    fn tap_sum_conserves_integral() {
        for tp in [0.1, 0.7, 1.05, 1.47] {
            let p = *corollary(tp).dispersive().unwrap();
            let cir = p.sample();
            let ch = effective_taps(&cir, 1e-10, 1.0).unwrap();
            let rel = (ch.tap_sum() / cir.integral() - 1.0).abs();
            assert!(rel < 1e-5, "theta_p={tp}: {rel}");
            assert!(ch.taps.iter().all(|&v| v >= 0.0));
            let bound = (2.0 * p.support_half / 1e-10).ceil() as usize + 2;
            assert!(ch.taps.len() <= bound);
        }
    }

    #[test]
    fn significant_taps_follow_dispersion() {
        let count = |tp: f64| {
            corollary_taps(&corollary(tp), 1e-10, 1.0)
                .unwrap()
                .significant_count(SIGNIFICANT_THRESHOLD)
        };
        assert_eq!(count(0.1), 11);
        // the neighbours of the main tap sit at 7.6% of the peak
        assert_eq!(count(1.47), 3);
        assert_eq!(count(std::f64::consts::FRAC_PI_2), 1);
        let grid: Vec<usize> = (1..=15).map(|i| count(0.1 * i as f64)).collect();
        assert!(grid.windows(2).all(|w| w[1] <= w[0]), "{grid:?}");
    }

    #[test]
    fn chosen_offset_beats_alternatives() {
        let cir = corollary(1.05).dispersive().unwrap().sample();
        let ch = effective_taps(&cir, 1e-10, 1.0).unwrap();
        let e_best: f64 = ch.taps.iter().map(|v| v * v).sum();
        // shifting the CIR grid by an offset is equivalent to resampling at that offset
        for j in 0..64 {
            let off = 1e-10 * j as f64 / 64.0;
            let shifted = Cir {
                t_grid: cir.t_grid.iter().map(|t| t - off).collect(),
                ..cir.clone()
            };
            let alt = effective_taps(&shifted, 1e-10, 1.0).unwrap();
            let e: f64 = alt.taps.iter().map(|v| v * v).sum();
            assert!(e_best >= e * (1.0 - 1e-3));
        }
    }

    #[test]
    fn coarse_cir_is_rejected() {
        let cir = Cir::from_fn(CirMethod::Corollary1, 0.0, symmetric_grid(1e-9, 21, 1.0), |_| 1.0);
        assert!(matches!(
            effective_taps(&cir, 1e-10, 1.0),
            Err(Error::InsufficientResolution { .. })
        ));
    }

    #[test]
    fn noise_properties() {
        assert!(awgn_sequence(100, 0.0, 3).iter().all(|&v| v == 0.0));
        let a = awgn_sequence(1_000_000, 1.0, 42);
        assert_eq!(a, awgn_sequence(1_000_000, 1.0, 42));
        let mean = a.iter().sum::<f64>() / a.len() as f64;
        let var = a.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / a.len() as f64;
        assert!((var - 1.0).abs() < 0.01, "{var}");
    }

    #[test]
    fn transmit_receive_readouts() {
        let ch = DiscreteChannel::from_taps(vec![0.5, 0.25], 1e-10);
        assert!(transmit_receive(&[0, 0, 0], &ch, 2.0, 1).iter().all(|&v| v == 0.0));
        assert_eq!(transmit_receive(&[1], &ch, 2.0, 1), vec![1.0, 0.5]);
        let u = transmit_receive(&[0, 1, 1, 0], &ch, 2.0, 1);
        assert_eq!(u[2], 2.0 * (0.5 + 0.25));
    }

    #[test]
    fn unit_conversions() {
        assert!((dbm_per_mhz_to_w_per_hz(-104.0) - 3.981e-20).abs() < 1e-23);
        let n0 = 3.981e-20;
        let p0 = p0_for_gamma_t(db_to_linear(16.0), 1e-10, n0);
        assert!((linear_to_db(gamma_t(p0, 1e-10, n0)) - 16.0).abs() < 1e-12);
        let s = noise_variance(n0, 1e-10);
        assert!((p0 * p0 / (2.0 * s) - db_to_linear(16.0)).abs() < 1e-9);
    }

    proptest! {
        #[test]
        fn transmit_is_linear(
            a in proptest::collection::vec(0u8..2, 12),
            b in proptest::collection::vec(0u8..2, 12),
            taps in proptest::collection::vec(0.0f64..1.0, 1..5),
        ) {
            let ab: Vec<u8> = a.iter().zip(&b).map(|(x, y)| x & (1 - y)).collect();
            let rest: Vec<u8> = a.iter().zip(&ab).map(|(x, y)| x - y).collect();
            let ua = convolve_bits(&a, &taps, 1.5);
            let u1 = convolve_bits(&ab, &taps, 1.5);
            let u2 = convolve_bits(&rest, &taps, 1.5);
            for i in 0..ua.len() {
                prop_assert!((ua[i] - u1[i] - u2[i]).abs() < 1e-12);
            }
        }
    }
}
