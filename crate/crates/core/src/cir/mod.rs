//! Channel impulse response of the IRS-assisted link.
//!
//! `h(t)` is the fraction of transmit power collected by the lens per unit
//! delay, normalized per unit lens width along `x_p` (the reflected strip is
//! uniform along that axis in the in-plane case). With the passivity factor
//! resolved by [`passivity_zeta`], `int h dt` equals the lens capture fraction.
//!
//! Three evaluators of decreasing cost and fidelity:
//! - [`oracle`]: line integral along the iso-delay line with the exact
//!   distance, integrated over a lens quadrature grid.
//! - [`theorem`]: second-order (Fresnel) phase, closed-form line integral,
//!   numeric lens integral. Requires `a2 != 0`.
//! - [`corollary`]: closed-form truncated Gaussian for in-plane reflection.

pub mod corollary;
pub mod metrics;
pub mod oracle;
pub mod theorem;

use rayon::prelude::*;

use crate::beam::{BeamParams, IncidentBeam};
use crate::delay::{delay_linear, DelayProfile};
use crate::error::{Error, Result};
use crate::geometry::{equivalent_square_half_side, LinkGeometry};
use crate::irs::{linear_phase_profile_with_offset, IrsParams, PhaseProfile};

pub use corollary::{cir_corollary1, freq_response_corollary1, Corollary1, Corollary1Params};
pub use metrics::{effective_delay_spread_3db, l2_relative_error};
pub use oracle::{cir_oracle_lemma1, OracleEvaluator, OracleOptions};
pub use theorem::{cir_theorem1, Theorem1Evaluator, Theorem1Options, Theorem1Params};

pub use crate::special::{complex_erf, faddeeva};

/// Samples per CIR grid; odd so that one sample sits exactly at `tau0`.
pub const CIR_SAMPLES: usize = 2049;

/// Grid half-width as a multiple of the support half-width.
pub const GRID_MARGIN: f64 = 1.05;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum CirMethod {
    OracleLemma1,
    Theorem1,
    Corollary1,
}

impl CirMethod {
    pub fn name(self) -> &'static str {
        match self {
            CirMethod::OracleLemma1 => "oracle",
            CirMethod::Theorem1 => "theorem1",
            CirMethod::Corollary1 => "corollary1",
        }
    }
}

impl std::fmt::Display for CirMethod {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.pad(self.name())
    }
}

impl std::str::FromStr for CirMethod {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "oracle" => Ok(CirMethod::OracleLemma1),
            "theorem1" => Ok(CirMethod::Theorem1),
            "corollary1" => Ok(CirMethod::Corollary1),
            _ => Err(Error::invalid(
                "method",
                format!("unknown method `{s}` (oracle, theorem1, corollary1)"),
            )),
        }
    }
}

/// A sampled impulse response.
#[derive(Debug, Clone, PartialEq)]
pub struct Cir {
    /// Sample times relative to `tau0` (s), uniformly spaced.
    pub t_grid: Vec<f64>,
    /// `h(t)` (1/s), nonnegative.
    pub h: Vec<f64>,
    pub method: CirMethod,
    pub tau0: f64,
}

impl Cir {
    /// Evaluates `f(t - tau0)` on `t_grid`, in parallel.
    pub fn from_fn<F>(method: CirMethod, tau0: f64, t_grid: Vec<f64>, f: F) -> Self
    where
        F: Fn(f64) -> f64 + Sync,
    {
        let h = t_grid.par_iter().map(|&t| f(t).max(0.0)).collect();
        Self {
            t_grid,
            h,
            method,
            tau0,
        }
    }

    pub fn len(&self) -> usize {
        self.h.len()
    }

    pub fn is_empty(&self) -> bool {
        self.h.is_empty()
    }

    /// Grid spacing (s).
    pub fn dt(&self) -> f64 {
        if self.t_grid.len() < 2 {
            0.0
        } else {
            (self.t_grid[self.t_grid.len() - 1] - self.t_grid[0]) / (self.t_grid.len() - 1) as f64
        }
    }

    pub fn peak(&self) -> f64 {
        self.h.iter().copied().fold(0.0, f64::max)
    }

    /// Trapezoidal `int h dt`.
    pub fn integral(&self) -> f64 {
        let dt = self.dt();
        let n = self.h.len();
        if n < 2 {
            return 0.0;
        }
        dt * (self.h.iter().sum::<f64>() - 0.5 * (self.h[0] + self.h[n - 1]))
    }

    /// Absolute arrival times (s).
    pub fn absolute_times(&self) -> impl Iterator<Item = f64> + '_ {
        self.t_grid.iter().map(move |t| t + self.tau0)
    }
}

/// `n` uniform samples over `[-margin * half, margin * half]`.
pub fn symmetric_grid(support_half: f64, n: usize, margin: f64) -> Vec<f64> {
    let s = margin * support_half;
    if n == 1 {
        return vec![0.0];
    }
    (0..n)
        .map(|i| -s + 2.0 * s * i as f64 / (n - 1) as f64)
        .collect()
}

/// The default CIR grid for a given support half-width.
pub fn default_grid(support_half: f64) -> Vec<f64> {
    symmetric_grid(support_half, CIR_SAMPLES, GRID_MARGIN)
}

/// `zeta = sqrt(lambda |a1| d_p sin theta_l)`, the in-plane passivity factor.
pub fn passivity_zeta(geom: &LinkGeometry, beam: &BeamParams) -> Result<f64> {
    if !geom.is_in_plane() {
        return Err(Error::NotInPlane);
    }
    let a1 = delay_linear(geom, beam).a1;
    if is_nondispersive(a1, geom.v_l) {
        return Err(Error::NondispersiveNormalization);
    }
    Ok((beam.wavelength * a1.abs() * geom.d_p * geom.theta_l.sin()).sqrt())
}

pub(crate) fn is_nondispersive(a1: f64, v_l: f64) -> bool {
    a1.abs() <= f64::EPSILON / v_l
}

/// Everything the evaluators need, resolved once.
#[derive(Debug, Clone, PartialEq)]
pub struct ChannelModel {
    pub geom: LinkGeometry,
    pub beam: BeamParams,
    pub irs: IrsParams,
    pub incident: IncidentBeam,
    pub phase: PhaseProfile,
    pub delay: DelayProfile,
    /// Resolved passivity factor.
    pub zeta: f64,
}

impl ChannelModel {
    pub fn new(geom: &LinkGeometry, beam: &BeamParams, irs: &IrsParams) -> Result<Self> {
        geom.validate()?;
        irs.validate(beam.wavelength)?;
        let incident = IncidentBeam::new(beam, geom)?;
        let zeta = match irs.zeta {
            Some(z) => z,
            None => passivity_zeta(geom, beam).unwrap_or(1.0),
        };
        Ok(Self {
            geom: *geom,
            beam: *beam,
            irs: *irs,
            incident,
            phase: linear_phase_profile_with_offset(geom, irs.phi0),
            delay: delay_linear(geom, beam),
            zeta,
        })
    }

    /// Half-width of the delay support `(|a1| L_x + |a2| L_y) / 2` (s).
    pub fn support_half(&self) -> f64 {
        0.5 * (self.delay.a1.abs() * self.irs.l_x + self.delay.a2.abs() * self.irs.l_y)
    }

    /// Half side of the equal-area square lens.
    pub fn lens_half_side(&self) -> f64 {
        equivalent_square_half_side(self.geom.lens_radius)
    }

    /// `zeta^2 / (lambda d_p)^2 * 2 / (pi w^2)`: the intensity prefactor
    /// before the iso-delay Jacobian.
    pub(crate) fn intensity_prefactor(&self) -> f64 {
        let ld = self.beam.wavelength * self.geom.d_p;
        self.zeta * self.zeta / (ld * ld) * self.incident.normalized_peak_intensity()
    }

    /// The iso-delay line `a1 x + a2 y = u` clipped to the IRS.
    pub(crate) fn iso_delay_line(&self, u: f64) -> Option<IsoDelayLine> {
        IsoDelayLine::new(self.delay.a1, self.delay.a2, u, self.irs.l_x, self.irs.l_y)
    }
}

/// `r(s) = p + q s`, `s` in `[s0, s1]`, with unit direction `q`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub(crate) struct IsoDelayLine {
    pub p: [f64; 2],
    pub q: [f64; 2],
    pub s0: f64,
    pub s1: f64,
    /// `1 / |grad tau|` (m/s).
    pub jacobian: f64,
}

impl IsoDelayLine {
    fn new(a1: f64, a2: f64, u: f64, l_x: f64, l_y: f64) -> Option<Self> {
        let norm = a1.hypot(a2);
        if norm == 0.0 {
            return None;
        }
        let n = [a1 / norm, a2 / norm];
        let p = [n[0] * u / norm, n[1] * u / norm];
        let q = [-n[1], n[0]];
        let (mut s0, mut s1) = (f64::NEG_INFINITY, f64::INFINITY);
        for (c, half) in [(0usize, 0.5 * l_x), (1, 0.5 * l_y)] {
            if q[c] == 0.0 {
                if p[c].abs() > half {
                    return None;
                }
            } else {
                let lo = (-half - p[c]) / q[c];
                let hi = (half - p[c]) / q[c];
                s0 = s0.max(lo.min(hi));
                s1 = s1.min(lo.max(hi));
            }
        }
        (s1 > s0).then_some(Self {
            p,
            q,
            s0,
            s1,
            jacobian: 1.0 / norm,
        })
    }

    pub fn point(&self, s: f64) -> [f64; 2] {
        [self.p[0] + self.q[0] * s, self.p[1] + self.q[1] * s]
    }
}
