//! Gaussian beam constants and the incident field on the IRS plane.

use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::geometry::LinkGeometry;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BeamParams {
    /// Beam waist `w0` (m).
    pub w0: f64,
    /// Wavelength (m).
    pub wavelength: f64,
    /// Average transmit power (W).
    pub p0: f64,
    /// Free-space impedance (ohm).
    pub eta: f64,
}

impl Default for BeamParams {
    fn default() -> Self {
        Self {
            w0: 1e-3,
            wavelength: 1550e-9,
            p0: 0.05e-3,
            eta: 377.0,
        }
    }
}

impl BeamParams {
    pub fn validate(&self) -> Result<()> {
        for (name, v) in [
            ("w0", self.w0),
            ("wavelength", self.wavelength),
            ("p0", self.p0),
            ("eta", self.eta),
        ] {
            if !(v.is_finite() && v > 0.0) {
                return Err(Error::invalid(name, format!("must be finite and > 0, got {v}")));
            }
        }
        Ok(())
    }

    /// Wave number `2 pi / lambda`.
    pub fn wavenumber(&self) -> f64 {
        2.0 * PI / self.wavelength
    }

    /// Rayleigh range `pi w0^2 / lambda`.
    pub fn rayleigh_range(&self) -> f64 {
        PI * self.w0 * self.w0 / self.wavelength
    }

    /// Peak field `E0 = sqrt(4 eta P0 / (pi w0^2))` (V/m).
    pub fn e0(&self) -> f64 {
        (4.0 * self.eta * self.p0 / (PI * self.w0 * self.w0)).sqrt()
    }

    /// Beam radius at distance `z` along the axis.
    pub fn width_at(&self, z: f64) -> f64 {
        let zr = self.rayleigh_range();
        self.w0 * (1.0 + (z / zr).powi(2)).sqrt()
    }

    /// Wavefront curvature radius at distance `z`.
    pub fn curvature_at(&self, z: f64) -> f64 {
        let zr = self.rayleigh_range();
        z * (1.0 + (zr / z).powi(2))
    }
}

/// Beam quantities evaluated where the axis meets the IRS.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BeamAtIrs {
    pub w_dl: f64,
    pub r_dl: f64,
    /// Gouy phase `atan(d_l / z_R)`.
    pub psi0: f64,
    /// Footprint semi-axes on the IRS.
    pub w_x: f64,
    pub w_y: f64,
    /// Curvature radii projected on the IRS.
    pub r_x: f64,
    pub r_y: f64,
}

pub fn beam_at_distance(beam: &BeamParams, d_l: f64, theta_l: f64) -> Result<BeamAtIrs> {
    if !(d_l.is_finite() && d_l > 0.0) {
        return Err(Error::invalid("d_l", format!("must be > 0, got {d_l}")));
    }
    if !(theta_l > 0.0 && theta_l <= std::f64::consts::FRAC_PI_2) {
        return Err(Error::GrazingIncidence(theta_l));
    }
    let w = beam.width_at(d_l);
    let r = beam.curvature_at(d_l);
    let s = theta_l.sin();
    Ok(BeamAtIrs {
        w_dl: w,
        r_dl: r,
        psi0: (d_l / beam.rayleigh_range()).atan(),
        w_x: w / s,
        w_y: w,
        r_x: r / (s * s),
        r_y: r,
    })
}

/// Incident field at one IRS point, kept in polar form.
///
/// The phase grows like `k d_l` (~1e9 rad), so it is only reduced modulo 2 pi
/// when a rectangular value is needed.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IncidentField {
    /// `|E_in|` (V/m).
    pub amplitude: f64,
    /// `psi_in` (rad).
    pub phase: f64,
}

/// `E_in(r, d_l)` for a beam whose axis lies in the `xz`-plane (`phi_l = 0`).
pub fn incident_field(
    r: [f64; 2],
    beam: &BeamParams,
    at: &BeamAtIrs,
    d_l: f64,
    theta_l: f64,
) -> IncidentField {
    let [x, y] = r;
    let k = beam.wavenumber();
    let amplitude = beam.e0() * beam.w0 / at.w_dl
        * (-(x * x) / (at.w_x * at.w_x) - (y * y) / (at.w_y * at.w_y)).exp();
    let phase = k * (d_l - x * theta_l.cos() + x * x / (2.0 * at.r_x) + y * y / (2.0 * at.r_y))
        - at.psi0;
    IncidentField { amplitude, phase }
}

/// The incident beam bound to a concrete geometry.
///
/// Carries the P0-normalized intensity `|E_in|^2 / (2 eta P0)` so integrators
/// never form products of `E0` and `eta`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IncidentBeam {
    pub beam: BeamParams,
    pub at: BeamAtIrs,
    pub d_l: f64,
    pub theta_l: f64,
    cos_theta_l: f64,
}

impl IncidentBeam {
    pub fn new(beam: &BeamParams, geom: &LinkGeometry) -> Result<Self> {
        beam.validate()?;
        if geom.phi_l.abs() > 1e-12 {
            return Err(Error::UnsupportedAzimuth(geom.phi_l));
        }
        let at = beam_at_distance(beam, geom.d_l, geom.theta_l)?;
        Ok(Self {
            beam: *beam,
            at,
            d_l: geom.d_l,
            theta_l: geom.theta_l,
            cos_theta_l: geom.theta_l.cos(),
        })
    }

    pub fn field(&self, r: [f64; 2]) -> IncidentField {
        incident_field(r, &self.beam, &self.at, self.d_l, self.theta_l)
    }

    /// `ln(|E_in| / (E0 w0 / w))`, the Gaussian footprint exponent.
    #[inline]
    pub fn log_envelope(&self, x: f64, y: f64) -> f64 {
        -(x * x) / (self.at.w_x * self.at.w_x) - (y * y) / (self.at.w_y * self.at.w_y)
    }

    /// Position-dependent part of `psi_in`, i.e. without `k d_l - psi0`.
    #[inline]
    pub fn phase_variation(&self, x: f64, y: f64) -> f64 {
        self.beam.wavenumber()
            * (-x * self.cos_theta_l + x * x / (2.0 * self.at.r_x) + y * y / (2.0 * self.at.r_y))
    }

    /// `(E0 w0 / w)^2 / (2 eta P0) = 2 / (pi w^2)`.
    pub fn normalized_peak_intensity(&self) -> f64 {
        2.0 / (PI * self.at.w_dl * self.at.w_dl)
    }

    /// `|E_in(r)|^2 / (2 eta P0)` (1/m^2).
    pub fn normalized_intensity(&self, r: [f64; 2]) -> f64 {
        self.normalized_peak_intensity() * (2.0 * self.log_envelope(r[0], r[1])).exp()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quadrature::gauss_legendre;
    use std::f64::consts::FRAC_PI_2;

    fn eval_beam() -> BeamParams {
        BeamParams::default()
    }

    #[test]
    fn rayleigh_range_and_width() {
        let b = eval_beam();
        assert!((b.rayleigh_range() - 2.026_833_970_057_931).abs() < 1e-12);
        let at = beam_at_distance(&b, 200.0, FRAC_PI_2).unwrap();
        assert!((at.w_dl - 0.098_681_131_7).abs() < 1e-9, "{}", at.w_dl);
        assert_eq!(at.w_x, at.w_y);
        assert_eq!(at.r_x, at.r_y);
        assert!(at.r_dl >= 2.0 * b.rayleigh_range());
        assert!(at.psi0 > 0.0 && at.psi0 < FRAC_PI_2);
    }

    #[test]
    fn grazing_incidence_is_rejected() {
        assert_eq!(
            beam_at_distance(&eval_beam(), 200.0, 0.0),
            Err(Error::GrazingIncidence(0.0))
        );
    }

    #[test]
    fn oblique_footprint_elongates_along_x() {
        let at = beam_at_distance(&eval_beam(), 200.0, 0.6).unwrap();
        assert!(at.w_x > at.w_y);
        assert!((at.r_x - at.r_dl / 0.6f64.sin().powi(2)).abs() < 1e-9);
    }

    #[test]
    fn field_at_origin_and_at_footprint_edge() {
        let b = eval_beam();
        let at = beam_at_distance(&b, 200.0, FRAC_PI_2).unwrap();
        let f0 = incident_field([0.0, 0.0], &b, &at, 200.0, FRAC_PI_2);
        assert!((f0.amplitude - b.e0() * b.w0 / at.w_dl).abs() < 1e-12);
        assert!((f0.phase - (b.wavenumber() * 200.0 - at.psi0)).abs() < 1e-6);
        let f1 = incident_field([at.w_x, 0.0], &b, &at, 200.0, FRAC_PI_2);
        assert!((f1.amplitude / f0.amplitude - (-1.0f64).exp()).abs() < 1e-14);
    }

    #[test]
    fn phase_parity() {
        let geom = LinkGeometry {
            theta_l: 1.1,
            ..LinkGeometry::default()
        };
        let inc = IncidentBeam::new(&eval_beam(), &geom).unwrap();
        let k = inc.beam.wavenumber();
        for &(x, y) in &[(0.1, 0.2), (-0.3, 0.05), (0.02, -0.4)] {
            assert_eq!(inc.phase_variation(x, y), inc.phase_variation(x, -y));
            let odd = inc.phase_variation(x, y) - inc.phase_variation(-x, y);
            assert!((odd + 2.0 * k * x * 1.1f64.cos()).abs() < 1e-6 * k.abs() * x.abs());
        }
    }

    #[test]
    fn nonzero_phi_l_is_rejected() {
        let geom = LinkGeometry {
            phi_l: 0.2,
            ..LinkGeometry::default()
        };
        assert_eq!(
            IncidentBeam::new(&eval_beam(), &geom),
            Err(Error::UnsupportedAzimuth(0.2))
        );
    }

    #[test]
    fn incident_power_over_disk_is_p0() {
        // |E|^2 / (2 eta) integrated over a disk of radius 5 w, in polar form.
        let b = eval_beam();
        let geom = LinkGeometry::default();
        let inc = IncidentBeam::new(&b, &geom).unwrap();
        let rmax = 5.0 * inc.at.w_dl;
        let rule = gauss_legendre(64);
        let mut power = 0.0;
        for (xr, wr) in rule.nodes_on(0.0, rmax) {
            for (xt, wt) in rule.nodes_on(0.0, 2.0 * PI) {
                let f = incident_field([xr * xt.cos(), xr * xt.sin()], &b, &inc.at, 200.0, FRAC_PI_2);
                power += wr * wt * xr * f.amplitude * f.amplitude / (2.0 * b.eta);
            }
        }
        assert!((power / b.p0 - 1.0).abs() < 1e-3, "{}", power / b.p0);
    }

    #[test]
    fn far_field_divergence_is_linear() {
        let b = eval_beam();
        let z = 100.0 * b.rayleigh_range();
        let lin = b.w0 * z / b.rayleigh_range();
        assert!((b.width_at(z) / lin - 1.0).abs() < 0.01);
    }
}
