//! IRS panel and its linear phase-shift profile.

use crate::error::{Error, Result};
use crate::geometry::LinkGeometry;

/// Below this `L / lambda` ratio the continuous-surface model is questionable.
const MIN_SIZE_TO_WAVELENGTH: f64 = 100.0;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IrsParams {
    /// Panel side along `x` (m).
    pub l_x: f64,
    /// Panel side along `y` (m).
    pub l_y: f64,
    /// Constant term of the phase profile (m); only shifts a global phase.
    pub phi0: f64,
    /// Passivity factor override. `None` resolves to the in-plane
    /// conservation value where it is defined and to 1 otherwise.
    pub zeta: Option<f64>,
    /// Element counts `(Q_x, Q_y)`. Metadata only; the model is continuous.
    pub elements: Option<(u32, u32)>,
}

impl Default for IrsParams {
    fn default() -> Self {
        Self {
            l_x: 1.0,
            l_y: 1.0,
            phi0: 0.0,
            zeta: None,
            elements: None,
        }
    }
}

impl IrsParams {
    pub fn square(side: f64) -> Self {
        Self {
            l_x: side,
            l_y: side,
            ..Self::default()
        }
    }

    /// Checks the hard invariants and returns soft warnings.
    pub fn validate(&self, wavelength: f64) -> Result<Vec<String>> {
        for (name, v) in [("l_x", self.l_x), ("l_y", self.l_y)] {
            if !(v.is_finite() && v > 0.0) {
                return Err(Error::invalid(name, format!("must be finite and > 0, got {v}")));
            }
        }
        if let Some(z) = self.zeta {
            if !(z.is_finite() && z > 0.0) {
                return Err(Error::invalid("zeta", format!("must be > 0, got {z}")));
            }
        }
        let mut warnings = Vec::new();
        for (name, v) in [("l_x", self.l_x), ("l_y", self.l_y)] {
            if v / wavelength < MIN_SIZE_TO_WAVELENGTH {
                warnings.push(format!(
                    "{name}/lambda = {:.1} < {MIN_SIZE_TO_WAVELENGTH}: continuous-surface model may not hold",
                    v / wavelength
                ));
            }
        }
        Ok(warnings)
    }

    pub fn element_count(&self) -> Option<u64> {
        self.elements.map(|(qx, qy)| qx as u64 * qy as u64)
    }
}

/// `phi_irs(r) = k (Phi0 + Phi_x x + Phi_y y)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhaseProfile {
    pub phi_x: f64,
    pub phi_y: f64,
    pub phi0: f64,
}

impl PhaseProfile {
    pub fn phase(&self, r: [f64; 2], k: f64) -> f64 {
        k * (self.phi0 + self.phi_x * r[0] + self.phi_y * r[1])
    }

    /// Phase without the constant term.
    #[inline]
    pub fn phase_variation(&self, x: f64, y: f64, k: f64) -> f64 {
        k * (self.phi_x * x + self.phi_y * y)
    }
}

pub fn linear_phase_profile(geom: &LinkGeometry) -> PhaseProfile {
    linear_phase_profile_with_offset(geom, 0.0)
}

pub fn linear_phase_profile_with_offset(geom: &LinkGeometry, phi0: f64) -> PhaseProfile {
    let (sl, cl) = geom.phi_l.sin_cos();
    let (sp, cp) = geom.phi_p.sin_cos();
    let ctl = geom.theta_l.cos();
    let ctp = geom.theta_p.cos();
    PhaseProfile {
        phi_x: ctl * cl + ctp * cp,
        phi_y: ctl * sl + ctp * sp,
        phi0,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::beam::{BeamParams, IncidentBeam};
    use std::f64::consts::{FRAC_PI_2, PI};

    #[test]
    fn mirror_case_has_zero_slopes() {
        let g = LinkGeometry {
            theta_p: FRAC_PI_2,
            ..LinkGeometry::default()
        };
        let p = linear_phase_profile(&g);
        assert!(p.phi_x.abs() < 1e-15 && p.phi_y.abs() < 1e-15);
    }

    #[test]
    fn anomalous_slope_for_low_receiver() {
        let p = linear_phase_profile(&LinkGeometry::default());
        assert!((p.phi_x + 0.1f64.cos()).abs() < 1e-15);
        assert!(p.phi_y.abs() < 1e-15);
        assert!((p.phi_x - -0.995_004_165_278_025_8).abs() < 1e-15);
    }

    #[test]
    fn phase_is_affine() {
        let p = PhaseProfile {
            phi_x: 0.3,
            phi_y: -0.2,
            phi0: 0.5,
        };
        assert!((p.phase([1.0, 2.0], 2.0) - 2.0 * (0.5 + 0.3 - 0.4)).abs() < 1e-15);
    }

    #[test]
    fn size_warning() {
        let w = IrsParams::square(1e-5).validate(1.55e-6).unwrap();
        assert_eq!(w.len(), 2);
        assert!(IrsParams::default().validate(1.55e-6).unwrap().is_empty());
        assert!(IrsParams::square(-1.0).validate(1.55e-6).is_err());
    }

    /// The summed phase psi_in + k|r_o - r| + phi_irs has vanishing linear
    /// terms at the IRS center for the on-axis lens point.
    #[test]
    fn total_phase_is_stationary_at_center() {
        let beam = BeamParams::default();
        for &(theta_l, theta_p, phi_p) in &[
            (FRAC_PI_2, 0.1, PI),
            (1.2, 0.7, PI),
            (1.0, 0.4, 2.5),
            (0.8, 1.3, -1.0),
        ] {
            let g = LinkGeometry {
                theta_l,
                theta_p,
                phi_p,
                ..LinkGeometry::default()
            };
            let inc = IncidentBeam::new(&beam, &g).unwrap();
            let prof = linear_phase_profile(&g);
            let k = beam.wavenumber();
            let ro = g.lens_center();
            let total = |x: f64, y: f64| {
                let d = ((ro.x - x).powi(2) + (ro.y - y).powi(2) + ro.z.powi(2)).sqrt() - ro.norm();
                k * d + prof.phase_variation(x, y, k) + inc.phase_variation(x, y)
            };
            let h = 1e-4;
            let gx = (total(h, 0.0) - total(-h, 0.0)) / (2.0 * h);
            let gy = (total(0.0, h) - total(0.0, -h)) / (2.0 * h);
            assert!(gx.abs() < 1e-6 * k, "gx = {gx}");
            assert!(gy.abs() < 1e-6 * k, "gy = {gy}");
        }
    }
}
