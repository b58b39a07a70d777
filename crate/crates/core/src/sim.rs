//! Monte Carlo BER engine over the closed-form channel.
//!
//! Bits run in blocks of [`BLOCK_BITS`]. Block `i` draws its bits and noise
//! from a ChaCha8 stream `i` under the root seed, so the result does not
//! depend on thread scheduling; all equalizers see the same bits and noise.
//! Each block carries random guard symbols on both sides so that every
//! counted bit sees full ISI.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use statrs::distribution::{ChiSquared, ContinuousCDF};

use crate::beam::BeamParams;
use crate::cir::cir_corollary1;
use crate::equalize::{Detector, EqualizerKind, EqualizerLengths};
use crate::error::{Error, Result};
use crate::geometry::LinkGeometry;
use crate::irs::IrsParams;
use crate::link::{
    convolve_bits, corollary_taps, db_to_linear, dbm_per_mhz_to_w_per_hz, fill_awgn,
    gamma_t, linear_to_db, noise_variance, p0_for_gamma_t, DiscreteChannel,
};
use crate::special::q_function;

/// Bits per Monte Carlo block.
pub const BLOCK_BITS: usize = 1 << 16;

/// Blocks evaluated per parallel batch before the stop rule is checked.
const BATCH_BLOCKS: usize = 16;

/// MLSE runs on the taps above this fraction of the peak.
pub const MLSE_TRUNCATION: f64 = 1e-2;

/// Points with fewer errors are flagged as low confidence.
pub const MIN_CONFIDENT_ERRORS: u64 = 100;

/// How the transmit power is given; the other of `(P0, gamma_t)` is derived.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum PowerSpec {
    /// Average optical power (W).
    P0(f64),
    /// Transmit SNR `P0^2 T / N0` in dB.
    GammaTDb(f64),
}

#[derive(Debug, Clone, PartialEq)]
pub struct SimConfig {
    pub geometry: LinkGeometry,
    pub beam: BeamParams,
    pub irs: IrsParams,
    /// Symbol period `T = 1 / W_fso` (s).
    pub symbol_period: f64,
    /// Noise spectral density (W/Hz).
    pub n0: f64,
    pub power: PowerSpec,
    /// Extra `gamma_t` values (dB) swept by [`sweep_theta_p`]; empty means `power` alone.
    pub gamma_t_db_sweep: Vec<f64>,
    pub equalizers: Vec<EqualizerKind>,
    pub lengths: EqualizerLengths,
    /// Composite responsivity / pointing gain applied to the taps.
    pub scale: f64,
    pub n_bits: u64,
    pub target_errors: u64,
    pub seed: u64,
    pub theta_grid: Vec<f64>,
}

impl Default for SimConfig {
    fn default() -> Self {
        Self {
            geometry: LinkGeometry::default(),
            beam: BeamParams::default(),
            irs: IrsParams::default(),
            symbol_period: 1e-10,
            n0: dbm_per_mhz_to_w_per_hz(-104.0),
            power: PowerSpec::P0(BeamParams::default().p0),
            gamma_t_db_sweep: Vec::new(),
            equalizers: EqualizerKind::ALL.to_vec(),
            lengths: EqualizerLengths::default(),
            scale: 1.0,
            n_bits: 1_000_000,
            target_errors: 1000,
            seed: 1,
            theta_grid: default_theta_grid(),
        }
    }
}

/// 15 points evenly spaced in `[0.1, 1.5]` rad.
pub fn default_theta_grid() -> Vec<f64> {
    (1..=15).map(|i| i as f64 / 10.0).collect()
}

impl SimConfig {
    pub fn validate(&self) -> Result<()> {
        self.geometry.validate()?;
        self.beam.validate()?;
        self.irs.validate(self.beam.wavelength)?;
        if !(self.symbol_period.is_finite() && self.symbol_period > 0.0) {
            return Err(Error::invalid("symbol_period", "must be > 0"));
        }
        if !(self.n0.is_finite() && self.n0 > 0.0) {
            return Err(Error::invalid("n0", "must be > 0"));
        }
        match self.power {
            PowerSpec::P0(p) if !(p.is_finite() && p > 0.0) => {
                return Err(Error::invalid("p0", "must be > 0"))
            }
            PowerSpec::GammaTDb(g) if !g.is_finite() => {
                return Err(Error::invalid("gamma_t_db", "must be finite"))
            }
            _ => {}
        }
        if self.gamma_t_db_sweep.iter().any(|g| !g.is_finite()) {
            return Err(Error::invalid("gamma_t_db_sweep", "must be finite"));
        }
        if self.equalizers.is_empty() {
            return Err(Error::invalid("equalizers", "at least one equalizer required"));
        }
        if self.n_bits == 0 {
            return Err(Error::invalid("n_bits", "must be >= 1"));
        }
        if self.target_errors == 0 {
            return Err(Error::invalid("target_errors", "must be >= 1"));
        }
        if !(self.scale.is_finite() && self.scale > 0.0) {
            return Err(Error::invalid("scale", "must be > 0"));
        }
        Ok(())
    }

    /// `(P0, gamma_t linear)`.
    pub fn resolved_power(&self) -> (f64, f64) {
        match self.power {
            PowerSpec::P0(p) => (p, gamma_t(p, self.symbol_period, self.n0)),
            PowerSpec::GammaTDb(db) => {
                let g = db_to_linear(db);
                (p0_for_gamma_t(g, self.symbol_period, self.n0), g)
            }
        }
    }

    pub fn gamma_t_db(&self) -> f64 {
        linear_to_db(self.resolved_power().1)
    }

    /// Noise variance of `n[m]` (W^2).
    pub fn noise_var(&self) -> f64 {
        noise_variance(self.n0, self.symbol_period)
    }

    /// Noise variance after dividing the received samples by `P0`: `1 / (2 gamma_t)`.
    pub fn normalized_noise_var(&self) -> f64 {
        let (p0, _) = self.resolved_power();
        self.noise_var() / (p0 * p0)
    }

    /// Discrete channel of the configured geometry, noise filled in.
    pub fn channel(&self) -> Result<DiscreteChannel> {
        let c = cir_corollary1(&self.geometry, &self.beam, &self.irs)?;
        Ok(corollary_taps(&c, self.symbol_period, self.scale)?.with_noise(self.noise_var()))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct BerPoint {
    pub theta_p: f64,
    pub delta_theta: f64,
    pub equalizer: EqualizerKind,
    pub gamma_t_db: f64,
    pub ber: f64,
    /// Half-width of the 95% confidence interval.
    pub ci95: f64,
    pub n_bits: u64,
    pub n_errors: u64,
    /// Fewer than [`MIN_CONFIDENT_ERRORS`] errors were seen.
    pub low_confidence: bool,
}

impl BerPoint {
    /// Standard error used for 3-sigma comparisons; floors the count at one error.
    pub fn sigma(&self) -> f64 {
        (self.n_errors.max(1) as f64).sqrt() / self.n_bits as f64
    }
}

/// 95% half-width: normal approximation from 10 errors up, exact Poisson below.
pub fn ci95(n_errors: u64, n_bits: u64) -> f64 {
    let n = n_bits as f64;
    if n_errors >= 10 {
        let p = n_errors as f64 / n;
        return 1.96 * (p * (1.0 - p) / n).sqrt();
    }
    let k = n_errors as f64;
    let lo = if n_errors == 0 {
        0.0
    } else {
        ChiSquared::new(2.0 * k).expect("dof > 0").inverse_cdf(0.025) / 2.0
    };
    let hi = ChiSquared::new(2.0 * k + 2.0).expect("dof > 0").inverse_cdf(0.975) / 2.0;
    0.5 * (hi - lo) / n
}

/// `Q(gain P0 / (2 sqrt(noise_var)))`: OOK over AWGN with a mid-level threshold.
pub fn analytic_ook_ber(gain: f64, p0: f64, noise_var: f64) -> Result<f64> {
    if !(noise_var > 0.0) {
        return Err(Error::invalid("noise_var", "must be > 0"));
    }
    Ok(q_function(gain * p0 / (2.0 * noise_var.sqrt())))
}

/// A detector plus the sample offset it starts reading from.
struct Receiver {
    detector: Detector,
    offset: usize,
}

fn build_receiver(
    kind: EqualizerKind,
    taps: &[f64],
    noise_var: f64,
    lengths: EqualizerLengths,
) -> Result<Receiver> {
    if kind == EqualizerKind::Mlse {
        let peak = taps.iter().copied().fold(0.0, f64::max);
        let cut = MLSE_TRUNCATION * peak;
        let lo = taps.iter().position(|&v| v >= cut).unwrap_or(0);
        let hi = taps.iter().rposition(|&v| v >= cut).map_or(taps.len(), |i| i + 1);
        return Ok(Receiver {
            detector: Detector::design(kind, &taps[lo..hi], noise_var, lengths)?,
            offset: lo,
        });
    }
    Ok(Receiver {
        detector: Detector::design(kind, taps, noise_var, lengths)?,
        offset: 0,
    })
}

/// Bit-error counts for blocks of a fixed channel, all equalizers at once.
///
/// `taps` and `noise_var` are normalized by `P0`.
pub struct BlockRunner {
    taps: Vec<f64>,
    noise_var: f64,
    receivers: Vec<Receiver>,
    guard: usize,
    seed: u64,
}

impl BlockRunner {
    pub fn new(
        taps: &[f64],
        noise_var: f64,
        kinds: &[EqualizerKind],
        lengths: EqualizerLengths,
        seed: u64,
    ) -> Result<Self> {
        let receivers = kinds
            .iter()
            .map(|&k| build_receiver(k, taps, noise_var, lengths))
            .collect::<Result<Vec<_>>>()?;
        let guard = 2 * (taps.len() + lengths.n_eq.max(lengths.n_ff)) + 8;
        Ok(Self {
            taps: taps.to_vec(),
            noise_var,
            receivers,
            guard,
            seed,
        })
    }

    /// Errors per equalizer over the counted `n` bits of block `index`.
    pub fn run_block(&self, index: u64, n: usize) -> Vec<u64> {
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        rng.set_stream(index);
        let total = n + 2 * self.guard;
        let bits: Vec<u8> = (0..total).map(|_| rng.random_range(0..2u8)).collect();
        let mut u = convolve_bits(&bits, &self.taps, 1.0);
        let mut noise = vec![0.0; u.len()];
        fill_awgn(&mut rng, &mut noise, self.noise_var);
        u.iter_mut().zip(&noise).for_each(|(a, b)| *a += b);

        let counted = self.guard..self.guard + n;
        self.receivers
            .iter()
            .map(|r| {
                let rx = &u[r.offset.min(u.len())..];
                let det = r.detector.detect(rx, total);
                det[counted.clone()]
                    .iter()
                    .zip(&bits[counted.clone()])
                    .filter(|(a, b)| a != b)
                    .count() as u64
            })
            .collect()
    }
}

/// Runs blocks until `n_bits` or, per equalizer, `target_errors` is reached.
/// Returns `(n_bits, n_errors)` per equalizer.
pub fn count_errors(runner: &BlockRunner, n_bits: u64, target_errors: u64) -> Vec<(u64, u64)> {
    let n_eq = runner.receivers.len();
    let n_blocks = n_bits.div_ceil(BLOCK_BITS as u64);
    let block_len = |i: u64| {
        let rest = n_bits - i * BLOCK_BITS as u64;
        rest.min(BLOCK_BITS as u64) as usize
    };
    let mut acc = vec![(0u64, 0u64); n_eq];
    let mut done = vec![false; n_eq];
    let mut next = 0u64;
    while next < n_blocks && done.iter().any(|d| !d) {
        let end = (next + BATCH_BLOCKS as u64).min(n_blocks);
        let counts: Vec<(u64, Vec<u64>)> = (next..end)
            .into_par_iter()
            .map(|i| (i, runner.run_block(i, block_len(i))))
            .collect();
        // in block order, so the stop point does not depend on scheduling
        for (i, errs) in counts {
            for e in 0..n_eq {
                if done[e] {
                    continue;
                }
                acc[e].0 += block_len(i) as u64;
                acc[e].1 += errs[e];
                if acc[e].1 >= target_errors {
                    done[e] = true;
                }
            }
        }
        next = end;
    }
    acc
}

fn point(cfg: &SimConfig, kind: EqualizerKind, n_bits: u64, n_errors: u64) -> BerPoint {
    BerPoint {
        theta_p: cfg.geometry.theta_p,
        delta_theta: cfg.geometry.delta_theta(),
        equalizer: kind,
        gamma_t_db: cfg.gamma_t_db(),
        ber: n_errors as f64 / n_bits as f64,
        ci95: ci95(n_errors, n_bits),
        n_bits,
        n_errors,
        low_confidence: n_errors < MIN_CONFIDENT_ERRORS,
    }
}

/// BER of every configured equalizer at the configured geometry.
pub fn ber_monte_carlo(cfg: &SimConfig) -> Result<Vec<BerPoint>> {
    cfg.validate()?;
    if !cfg.geometry.is_in_plane() {
        return Err(Error::NotInPlane);
    }
    let ch = cfg.channel()?;
    let (p0, _) = cfg.resolved_power();
    let runner = BlockRunner::new(
        &ch.taps,
        ch.noise_var / (p0 * p0),
        &cfg.equalizers,
        cfg.lengths,
        cfg.seed,
    )?;
    let counts = count_errors(&runner, cfg.n_bits, cfg.target_errors);
    Ok(cfg
        .equalizers
        .iter()
        .zip(counts)
        .map(|(&k, (n, e))| point(cfg, k, n, e))
        .collect())
}

/// Every `(gamma_t, theta_p, equalizer)` combination, in that nesting order.
pub fn sweep_theta_p(cfg: &SimConfig, theta_grid: &[f64]) -> Result<Vec<BerPoint>> {
    if let Some(&bad) = theta_grid
        .iter()
        .find(|&&t| !(t > 0.0 && t <= std::f64::consts::FRAC_PI_2))
    {
        return Err(Error::invalid("theta_grid", format!("{bad} outside (0, pi/2]")));
    }
    let powers: Vec<PowerSpec> = if cfg.gamma_t_db_sweep.is_empty() {
        vec![cfg.power]
    } else {
        cfg.gamma_t_db_sweep.iter().map(|&g| PowerSpec::GammaTDb(g)).collect()
    };
    let mut out = Vec::new();
    for power in powers {
        for &tp in theta_grid {
            let c = SimConfig {
                geometry: cfg.geometry.with_theta_p(tp),
                power,
                ..cfg.clone()
            };
            out.extend(ber_monte_carlo(&c)?);
        }
    }
    Ok(out)
}
