//! Closed-form CIR for in-plane reflection: a truncated Gaussian in delay.

use std::f64::consts::{PI, SQRT_2};

use num_complex::Complex64;

use super::{default_grid, is_nondispersive, passivity_zeta, Cir, CirMethod, ChannelModel};
use crate::beam::BeamParams;
use crate::error::{Error, Result};
use crate::geometry::LinkGeometry;
use crate::irs::IrsParams;
use crate::special::{complex_erf, erf, faddeeva};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Corollary1Params {
    /// Gaussian coefficient `2 / (a1^2 w_x^2)` (1/s^2).
    pub c_tau: f64,
    /// Lens capture fraction of the reflected strip.
    pub h_los: f64,
    /// `L_x |a1| / 2` (s).
    pub support_half: f64,
    pub tau0: f64,
    pub zeta: f64,
    /// `zeta^2 / zeta_passive^2`; 1 unless the passivity factor is overridden.
    pub gain: f64,
    pub b_x: Complex64,
    pub b_y: Complex64,
}

/// Result of the in-plane closed form.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Corollary1 {
    Dispersive(Corollary1Params),
    /// `a1 = 0`: `h(t) = h_los delta(t - tau0)`.
    NonDispersive { tau0: f64, h_los: f64 },
}

impl Corollary1 {
    pub fn tau0(&self) -> f64 {
        match self {
            Corollary1::Dispersive(p) => p.tau0,
            Corollary1::NonDispersive { tau0, .. } => *tau0,
        }
    }

    /// Total collected fraction `int h dt`.
    pub fn total_gain(&self) -> f64 {
        match self {
            Corollary1::Dispersive(p) => p.integral(),
            Corollary1::NonDispersive { h_los, .. } => *h_los,
        }
    }

    pub fn dispersive(&self) -> Option<&Corollary1Params> {
        match self {
            Corollary1::Dispersive(p) => Some(p),
            Corollary1::NonDispersive { .. } => None,
        }
    }
}

pub fn cir_corollary1(geom: &LinkGeometry, beam: &BeamParams, irs: &IrsParams) -> Result<Corollary1> {
    if !geom.is_in_plane() {
        return Err(Error::NotInPlane);
    }
    let model = ChannelModel::new(geom, beam, irs)?;
    corollary1_from_model(&model)
}

pub(crate) fn corollary1_from_model(model: &ChannelModel) -> Result<Corollary1> {
    let geom = &model.geom;
    if !geom.is_in_plane() {
        return Err(Error::NotInPlane);
    }
    let at = &model.incident.at;
    let k = model.beam.wavenumber();
    let jk = Complex64::new(0.0, k);
    let b_x = 1.0 / (at.w_x * at.w_x) + jk / (2.0 * at.r_x) + jk / (2.0 * geom.d_p);
    let b_y = 1.0 / (at.w_y * at.w_y) + jk / (2.0 * at.r_y) + jk / (2.0 * geom.d_p);
    let a_tilde = model.lens_half_side();
    let h_los = erf(k * a_tilde / (SQRT_2 * at.w_dl * b_y.norm() * geom.d_p));
    let a1 = model.delay.a1;
    let tau0 = model.delay.tau0;

    if is_nondispersive(a1, geom.v_l) {
        return Ok(Corollary1::NonDispersive { tau0, h_los });
    }
    let zeta_passive = passivity_zeta(geom, &model.beam)?;
    Ok(Corollary1::Dispersive(Corollary1Params {
        c_tau: 2.0 / (a1 * a1 * at.w_x * at.w_x),
        h_los,
        support_half: 0.5 * model.irs.l_x * a1.abs(),
        tau0,
        zeta: model.zeta,
        gain: (model.zeta / zeta_passive).powi(2),
        b_x,
        b_y,
    }))
}

impl Corollary1Params {
    /// `h` at time `u = t - tau0`.
    pub fn h_rel(&self, u: f64) -> f64 {
        if u.abs() > self.support_half {
            0.0
        } else {
            self.peak() * (-self.c_tau * u * u).exp()
        }
    }

    /// `h` at absolute time `t`.
    pub fn h(&self, t: f64) -> f64 {
        self.h_rel(t - self.tau0)
    }

    pub fn peak(&self) -> f64 {
        self.gain * (self.c_tau / PI).sqrt() * self.h_los
    }

    /// `int h dt` over the truncated support.
    pub fn integral(&self) -> f64 {
        self.gain * self.h_los * erf(self.c_tau.sqrt() * self.support_half)
    }

    /// `2 sqrt(ln 2 / c_tau)`; the plotted half-maximum width.
    pub fn half_max_width(&self) -> f64 {
        2.0 * (std::f64::consts::LN_2 / self.c_tau).sqrt()
    }

    /// Samples on the default 2049-point grid.
    pub fn sample(&self) -> Cir {
        Cir::from_fn(
            CirMethod::Corollary1,
            self.tau0,
            default_grid(self.support_half),
            |u| self.h_rel(u),
        )
    }

    /// Frequency response with time measured from `tau0`.
    pub fn freq_response(&self, f: f64) -> Complex64 {
        freq_response_corollary1(self, f)
    }
}

/// `H(f) = int h(tau0 + u) exp(-j 2 pi f u) du` of the truncated Gaussian.
///
/// Evaluated as `h_los/2 exp(-q^2) [erf(p - jq) + erf(p + jq)]` with
/// `p = sqrt(c) L_x |a1| / 2`, `q = pi f / sqrt(c)`, rewritten with the
/// Faddeeva function so that large `q` neither overflows nor cancels.
pub fn freq_response_corollary1(params: &Corollary1Params, f: f64) -> Complex64 {
    let sc = params.c_tau.sqrt();
    let p = sc * params.support_half;
    let q = PI * f / sc;
    let rot = Complex64::from_polar(1.0, 2.0 * p * q);
    let bracket = 2.0 * (-q * q).exp()
        - (-p * p).exp()
            * (rot.conj() * faddeeva(Complex64::new(-q, p)) + rot * faddeeva(Complex64::new(q, p)));
    0.5 * params.gain * params.h_los * bracket
}

/// Same response straight from the erf bracket; only usable for moderate `f`.
pub fn freq_response_erf(params: &Corollary1Params, f: f64) -> Complex64 {
    let sc = params.c_tau.sqrt();
    let p = sc * params.support_half;
    let q = PI * f / sc;
    0.5 * params.gain
        * params.h_los
        * (-q * q).exp()
        * (complex_erf(Complex64::new(p, -q)) + complex_erf(Complex64::new(p, q)))
}
