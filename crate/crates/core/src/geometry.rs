//! Link geometry in the IRS frame.
//!
//! The IRS lies in the global `xy`-plane with its center at the origin. The
//! transmitter beam axis hits the origin from distance `d_l` along direction
//! `(theta_l, phi_l)`; the receive lens sits at distance `d_p` along
//! `(theta_p, phi_p)`. Elevations are measured from the IRS plane, azimuths
//! from the `x`-axis, all in radians.

use std::f64::consts::{FRAC_PI_2, PI};

use nalgebra::{Matrix3, Vector3};

use crate::error::{Error, Result};

/// Speed of light in air used by default (m/s).
pub const SPEED_OF_LIGHT_AIR: f64 = 3.0e8;

/// Tolerance used to decide that an azimuth pair is the in-plane configuration.
const IN_PLANE_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LinkGeometry {
    /// Transmitter to IRS-origin distance (m).
    pub d_l: f64,
    pub theta_l: f64,
    pub phi_l: f64,
    /// IRS-origin to lens-center distance (m).
    pub d_p: f64,
    pub theta_p: f64,
    pub phi_p: f64,
    /// Lens radius `a` (m).
    pub lens_radius: f64,
    /// Propagation speed (m/s).
    pub v_l: f64,
}

impl Default for LinkGeometry {
    /// The evaluation geometry: Tx at (200 m, [pi/2, 0]), Rx at (220 m, [0.1, pi]),
    /// 10 cm lens radius.
    fn default() -> Self {
        Self {
            d_l: 200.0,
            theta_l: FRAC_PI_2,
            phi_l: 0.0,
            d_p: 220.0,
            theta_p: 0.1,
            phi_p: PI,
            lens_radius: 0.1,
            v_l: SPEED_OF_LIGHT_AIR,
        }
    }
}

impl LinkGeometry {
    /// Same geometry with a different receiver elevation.
    pub fn with_theta_p(mut self, theta_p: f64) -> Self {
        self.theta_p = theta_p;
        self
    }

    pub fn validate(&self) -> Result<()> {
        let positive = [
            ("d_l", self.d_l),
            ("d_p", self.d_p),
            ("lens_radius", self.lens_radius),
            ("v_l", self.v_l),
        ];
        for (name, v) in positive {
            if !(v.is_finite() && v > 0.0) {
                return Err(Error::invalid(name, format!("must be finite and > 0, got {v}")));
            }
        }
        if !(self.theta_l > 0.0 && self.theta_l <= FRAC_PI_2) {
            return Err(Error::GrazingIncidence(self.theta_l));
        }
        if !(self.theta_p >= 0.0 && self.theta_p <= FRAC_PI_2) {
            return Err(Error::invalid(
                "theta_p",
                format!("must be in [0, pi/2], got {}", self.theta_p),
            ));
        }
        if !(self.phi_l.is_finite() && self.phi_p.is_finite()) {
            return Err(Error::invalid("phi", "azimuths must be finite"));
        }
        Ok(())
    }

    /// `phi_l = 0` and `phi_p = pi`: Tx and Rx share a plane perpendicular to the IRS.
    pub fn is_in_plane(&self) -> bool {
        self.phi_l.abs() < IN_PLANE_TOL && (self.phi_p - PI).abs() < IN_PLANE_TOL
    }

    /// Angle difference `theta_l - theta_p`.
    pub fn delta_theta(&self) -> f64 {
        self.theta_l - self.theta_p
    }

    pub fn rotation(&self) -> RotationMatrix {
        rotation_matrix(self.theta_p, self.phi_p)
    }

    /// Lens center in global coordinates.
    pub fn lens_center(&self) -> Vector3<f64> {
        lens_to_global([0.0, 0.0], self)
    }

    /// End-to-end delay of the unreflected LOS path, `(d_l + d_p) / v_l`.
    pub fn tau_los(&self) -> f64 {
        (self.d_l + self.d_p) / self.v_l
    }
}

/// Maps lens-frame coordinates `[x_p, y_p, d_p]` to global `[x_o, y_o, z_o]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RotationMatrix(pub Matrix3<f64>);

impl RotationMatrix {
    pub fn apply(&self, v: Vector3<f64>) -> Vector3<f64> {
        self.0 * v
    }
}

pub fn rotation_matrix(theta_p: f64, phi_p: f64) -> RotationMatrix {
    let (st, ct) = theta_p.sin_cos();
    let (sp, cp) = phi_p.sin_cos();
    #[rustfmt::skip]
    let m = Matrix3::new(
        cp * st, -sp, cp * ct,
        sp * st,  cp, sp * ct,
        -ct,     0.0, st,
    );
    RotationMatrix(m)
}

/// `r_o = R_rot [x_p, y_p, d_p]^T`.
pub fn lens_to_global(r_p: [f64; 2], geom: &LinkGeometry) -> Vector3<f64> {
    geom.rotation()
        .apply(Vector3::new(r_p[0], r_p[1], geom.d_p))
}

/// Half side of the square with the same area as a circle of radius `a`.
pub fn equivalent_square_half_side(a: f64) -> f64 {
    PI.sqrt() * a / 2.0
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn rotation_entries_at_normal_incidence() {
        let r = rotation_matrix(FRAC_PI_2, 0.0).0;
        assert!((r[(0, 0)] - 1.0).abs() < 1e-15);
        assert!((r[(2, 2)] - 1.0).abs() < 1e-15);
        assert!((r[(1, 1)] - 1.0).abs() < 1e-15);
    }

    #[test]
    fn rotation_first_column_at_grazing() {
        let r = rotation_matrix(0.0, PI).0;
        assert!(r[(0, 0)].abs() < 1e-15);
        assert!(r[(1, 0)].abs() < 1e-15);
        assert!((r[(2, 0)] + 1.0).abs() < 1e-15);
    }

    #[test]
    fn lens_center_distance() {
        let g = LinkGeometry {
            theta_p: FRAC_PI_2,
            ..LinkGeometry::default()
        };
        let c = g.lens_center();
        assert!((c.norm() - 220.0).abs() < 1e-12);
        assert!((c.z - 220.0).abs() < 1e-12);

        let p = lens_to_global([0.05, 0.0], &g.with_theta_p(0.1));
        assert!((p.norm() - (0.05f64.powi(2) + 220.0f64.powi(2)).sqrt()).abs() < 1e-11);
    }

    #[test]
    fn in_plane_lens_center_matches_direction() {
        let g = LinkGeometry::default();
        let c = g.lens_center();
        // elevation theta_p, azimuth pi
        assert!((c.x + 220.0 * 0.1f64.cos()).abs() < 1e-11);
        assert!(c.y.abs() < 1e-11);
        assert!((c.z - 220.0 * 0.1f64.sin()).abs() < 1e-11);
    }

    #[test]
    fn square_half_side() {
        assert!((equivalent_square_half_side(0.1) - 0.088_622_692_545_275_8).abs() < 1e-15);
        assert_eq!(equivalent_square_half_side(0.0), 0.0);
        assert!((equivalent_square_half_side(2.0 / PI.sqrt()) - 1.0).abs() < 1e-15);
    }

    #[test]
    fn validation_rejects_bad_values() {
        let mut g = LinkGeometry::default();
        g.d_l = -1.0;
        assert!(matches!(
            g.validate(),
            Err(Error::InvalidParameter { name: "d_l", .. })
        ));
        let g = LinkGeometry {
            theta_l: 0.0,
            ..LinkGeometry::default()
        };
        assert_eq!(g.validate(), Err(Error::GrazingIncidence(0.0)));
        assert!(LinkGeometry::default().validate().is_ok());
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(10_000))]

        #[test]
        fn rotation_is_proper_orthonormal(theta in -10.0f64..10.0, phi in -10.0f64..10.0) {
            let r = rotation_matrix(theta, phi).0;
            let err = (r.transpose() * r - Matrix3::identity()).abs().max();
            prop_assert!(err < 1e-12);
            prop_assert!((r.determinant() - 1.0).abs() < 1e-12);
        }

        #[test]
        fn lens_mapping_preserves_norm(
            x in -1.0f64..1.0, y in -1.0f64..1.0, d in 1.0f64..1e3,
            theta in 0.0f64..FRAC_PI_2, phi in -PI..PI,
        ) {
            let g = LinkGeometry { d_p: d, theta_p: theta, phi_p: phi, ..LinkGeometry::default() };
            let n = lens_to_global([x, y], &g).norm();
            let expect = (x * x + y * y + d * d).sqrt();
            prop_assert!((n - expect).abs() <= 1e-12 * expect);
        }

        #[test]
        fn square_area_matches_circle(a in 1e-4f64..10.0) {
            let h = equivalent_square_half_side(a);
            prop_assert!(((2.0 * h).powi(2) - PI * a * a).abs() <= 1e-13 * PI * a * a);
        }
    }
}
