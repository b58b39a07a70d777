//! End-to-end delay across the IRS.
//!
//! The delay of the path Tx -> IRS point `r` -> lens point `r_o` is the total
//! accumulated phase divided by `k v_l`. Expanding the IRS-to-lens distance to
//! second order gives a quadratic profile `tau0 + c.r + r^T B r`; dropping the
//! curvature terms leaves the linear profile `tau0 + a1 x + a2 y`, which is what
//! the CIR evaluators use.

use nalgebra::Vector3;

use crate::beam::{beam_at_distance, BeamParams};
use crate::error::Result;
use crate::geometry::LinkGeometry;
use crate::irs::IrsParams;

/// Grid resolution for the quadratic-profile spread search.
const SPREAD_GRID: usize = 201;

/// Factor used for every "much greater than" regime condition.
pub const MUCH_GREATER: f64 = 10.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DelayKind {
    Linear,
    Quadratic,
}

/// How the Gouy phase enters the bulk delay.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Tau0Convention {
    /// `tau0 = tau_los - psi0 / (k v_l)`; every phase is divided by `k v_l`.
    #[default]
    Dimensional,
    /// `tau0 = tau_los - psi0 / v_l`, as printed next to the quadratic profile.
    Literal,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DelayProfile {
    /// Bulk delay (s).
    pub tau0: f64,
    /// Linear slopes (s/m).
    pub a1: f64,
    pub a2: f64,
    /// Quadratic form (s/m^2); zero for the linear profile.
    pub b: [[f64; 2]; 2],
    /// `(d_l + d_p) / v_l` (s).
    pub tau_los: f64,
    pub kind: DelayKind,
}

impl DelayProfile {
    pub fn c(&self) -> [f64; 2] {
        [self.a1, self.a2]
    }

    /// Delay at IRS point `r` (s).
    pub fn tau(&self, r: [f64; 2]) -> f64 {
        let [x, y] = r;
        let quad = self.b[0][0] * x * x + (self.b[0][1] + self.b[1][0]) * x * y + self.b[1][1] * y * y;
        self.tau0 + self.a1 * x + self.a2 * y + quad
    }

    /// Spectral norm of `B` (symmetric part).
    pub fn b_norm(&self) -> f64 {
        let p = self.b[0][0];
        let q = 0.5 * (self.b[0][1] + self.b[1][0]);
        let r = self.b[1][1];
        let mean = 0.5 * (p + r);
        let rad = (0.25 * (p - r).powi(2) + q * q).sqrt();
        (mean.abs() + rad).max((mean - rad).abs())
    }
}

pub fn tau0(geom: &LinkGeometry, beam: &BeamParams, convention: Tau0Convention) -> f64 {
    let psi0 = (geom.d_l / beam.rayleigh_range()).atan();
    match convention {
        Tau0Convention::Dimensional => geom.tau_los() - psi0 / (beam.wavenumber() * geom.v_l),
        Tau0Convention::Literal => geom.tau_los() - psi0 / geom.v_l,
    }
}

/// Linear slopes `(a1, a2)` in s/m.
pub fn linear_slopes(geom: &LinkGeometry) -> (f64, f64) {
    let (sl, cl) = geom.phi_l.sin_cos();
    let (sp, cp) = geom.phi_p.sin_cos();
    let ctl = geom.theta_l.cos();
    let ctp = geom.theta_p.cos();
    let a1 = -(cp * ctp + cl * ctl) / geom.v_l;
    // sin(pi) is not exactly zero in floating point
    let a2 = if geom.is_in_plane() {
        0.0
    } else {
        -(sl * ctl + sp * ctp) / geom.v_l
    };
    (a1, a2)
}

pub fn delay_linear(geom: &LinkGeometry, beam: &BeamParams) -> DelayProfile {
    delay_linear_with(geom, beam, Tau0Convention::default())
}

pub fn delay_linear_with(
    geom: &LinkGeometry,
    beam: &BeamParams,
    convention: Tau0Convention,
) -> DelayProfile {
    let (a1, a2) = linear_slopes(geom);
    DelayProfile {
        tau0: tau0(geom, beam, convention),
        a1,
        a2,
        b: [[0.0; 2]; 2],
        tau_los: geom.tau_los(),
        kind: DelayKind::Linear,
    }
}

/// Second-order (Fresnel) delay profile seen from global lens point `r_o`.
pub fn delay_quadratic(
    geom: &LinkGeometry,
    beam: &BeamParams,
    r_o: Vector3<f64>,
) -> Result<DelayProfile> {
    let at = beam_at_distance(beam, geom.d_l, geom.theta_l)?;
    let v = geom.v_l;
    let d = geom.d_p;
    let (ax, ay) = (r_o.x / d, r_o.y / d);
    let bx = geom.theta_l.cos() * geom.phi_l.cos();
    let r1 = [
        [(1.0 - ax * ax) / (2.0 * d), -ax * ay / (2.0 * d)],
        [-ax * ay / (2.0 * d), (1.0 - ay * ay) / (2.0 * d)],
    ];
    let r2 = [[1.0 / (2.0 * at.r_x), 0.0], [0.0, 1.0 / (2.0 * at.r_y)]];
    let mut b = [[0.0; 2]; 2];
    for i in 0..2 {
        for j in 0..2 {
            b[i][j] = (r1[i][j] + r2[i][j]) / v;
        }
    }
    Ok(DelayProfile {
        tau0: tau0(geom, beam, Tau0Convention::default()),
        a1: (-ax - bx) / v,
        a2: -ay / v,
        b,
        tau_los: geom.tau_los(),
        kind: DelayKind::Quadratic,
    })
}

/// `max tau - min tau` over the centered `L_x x L_y` panel.
///
/// Exact for the linear profile; the quadratic profile is searched on a grid.
pub fn delay_spread(profile: &DelayProfile, irs: &IrsParams) -> f64 {
    match profile.kind {
        DelayKind::Linear => profile.a1.abs() * irs.l_x + profile.a2.abs() * irs.l_y,
        DelayKind::Quadratic => {
            let (mut lo, mut hi) = (f64::INFINITY, f64::NEG_INFINITY);
            let n = SPREAD_GRID - 1;
            for i in 0..=n {
                let x = irs.l_x * (i as f64 / n as f64 - 0.5);
                for j in 0..=n {
                    let y = irs.l_y * (j as f64 / n as f64 - 0.5);
                    let t = profile.tau([x, y]) - profile.tau0;
                    lo = lo.min(t);
                    hi = hi.max(t);
                }
            }
            hi - lo
        }
    }
}

/// Regime diagnostics for the delay and field approximations.
#[derive(Debug, Clone, PartialEq)]
pub struct RegimeReport {
    pub x_e: f64,
    pub y_e: f64,
    /// Fresnel distance `(x_e^2 + y_e^2) / (2 lambda)` (m).
    pub d_f: f64,
    /// `d_p >= 10 d_f`.
    pub fresnel_valid: bool,
    /// `a <= d_p / 10` and `max(L) <= min(sqrt(2 d_l), sqrt(2 d_p)) / 10`.
    pub linear_valid: bool,
    pub warnings: Vec<String>,
}

pub fn fresnel_check(
    geom: &LinkGeometry,
    irs: &IrsParams,
    beam: &BeamParams,
) -> Result<RegimeReport> {
    let at = beam_at_distance(beam, geom.d_l, geom.theta_l)?;
    let x_e = (irs.l_x / 2.0).min(at.w_x);
    let y_e = (irs.l_y / 2.0).min(at.w_y);
    let d_f = (x_e * x_e + y_e * y_e) / (2.0 * beam.wavelength);
    let fresnel_valid = geom.d_p >= MUCH_GREATER * d_f;

    let size_limit = (2.0 * geom.d_l).sqrt().min((2.0 * geom.d_p).sqrt());
    let lens_ok = MUCH_GREATER * geom.lens_radius <= geom.d_p;
    let size_ok = MUCH_GREATER * irs.l_x.max(irs.l_y) <= size_limit;
    let linear_valid = lens_ok && size_ok;

    let mut warnings = Vec::new();
    if !fresnel_valid {
        warnings.push(format!(
            "d_p = {:.3} m is below {MUCH_GREATER} d_f = {:.3} m; outside the strict intermediate-regime criterion",
            geom.d_p,
            MUCH_GREATER * d_f
        ));
    }
    if !lens_ok {
        warnings.push(format!(
            "lens radius {:.3} m is not << d_p = {:.3} m",
            geom.lens_radius, geom.d_p
        ));
    }
    if !size_ok {
        warnings.push(format!(
            "IRS side {:.3} m is not << min(sqrt(2 d_l), sqrt(2 d_p)) = {:.3}",
            irs.l_x.max(irs.l_y),
            size_limit
        ));
    }
    Ok(RegimeReport {
        x_e,
        y_e,
        d_f,
        fresnel_valid,
        linear_valid,
        warnings,
    })
}

/// Receiver elevation above which the in-plane spread stays below one symbol:
/// `cos(theta_p) - cos(theta_l) = T v_l / L_x`. `None` if no such angle exists.
pub fn nondispersive_threshold(theta_l: f64, symbol_period: f64, l_x: f64, v_l: f64) -> Option<f64> {
    let c = theta_l.cos() + symbol_period * v_l / l_x;
    (c <= 1.0).then(|| c.acos())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::lens_to_global;
    use proptest::prelude::*;
    use std::f64::consts::{FRAC_PI_2, PI};

    fn beam() -> BeamParams {
        BeamParams::default()
    }

    #[test]
    fn los_delay() {
        let p = delay_linear(&LinkGeometry::default(), &beam());
        assert!((p.tau_los - 1.4e-6).abs() < 1e-18);
        assert!(p.tau0 < p.tau_los && p.tau_los - p.tau0 < 1e-14);
    }

    #[test]
    fn literal_tau0_differs_only_by_gouy_term() {
        let g = LinkGeometry::default();
        let lit = tau0(&g, &beam(), Tau0Convention::Literal);
        let psi0 = (200.0 / beam().rayleigh_range()).atan();
        assert!((g.tau_los() - lit - psi0 / 3e8).abs() < 1e-20);
    }

    #[test]
    fn worked_example_slopes() {
        let g = LinkGeometry {
            theta_p: 0.0,
            ..LinkGeometry::default()
        };
        let p = delay_linear(&g, &beam());
        assert!((p.a1 - 1.0 / 3e8).abs() < 1e-22);
        assert!(p.a2.abs() < 1e-22);
        let spread = delay_spread(&p, &IrsParams::default());
        assert!((spread - 3.333_333e-9).abs() < 1e-15);
    }

    #[test]
    fn equal_angles_are_nondispersive() {
        let g = LinkGeometry {
            theta_l: 0.9,
            theta_p: 0.9,
            ..LinkGeometry::default()
        };
        let p = delay_linear(&g, &beam());
        assert!(p.a1.abs() < 1e-24);
        assert_eq!(delay_spread(&p, &IrsParams::default()), p.a2.abs());
    }

    #[test]
    fn low_receiver_slope() {
        let p = delay_linear(&LinkGeometry::default(), &beam());
        assert!((p.a1 - 0.1f64.cos() / 3e8).abs() < 1e-22);
        assert!((p.a1 - 3.316_680_55e-9).abs() < 1e-17);
    }

    #[test]
    fn quadratic_on_axis_normal_incidence() {
        let g = LinkGeometry {
            theta_p: FRAC_PI_2,
            ..LinkGeometry::default()
        };
        let ro = Vector3::new(0.0, 0.0, g.d_p);
        let p = delay_quadratic(&g, &beam(), ro).unwrap();
        assert!(p.a1.abs() < 1e-24 && p.a2.abs() < 1e-24);
        let r = beam().curvature_at(200.0);
        let diag = (1.0 / (2.0 * 220.0) + 1.0 / (2.0 * r)) / 3e8;
        assert!((p.b[0][0] - diag).abs() < 1e-12 * diag);
        assert!((p.b[1][1] - diag).abs() < 1e-12 * diag);
        assert_eq!(p.b[0][1], 0.0);
        assert_eq!(p.tau([0.0, 0.0]), p.tau0);
    }

    #[test]
    fn quadratic_at_lens_center_matches_linear_slopes() {
        for &tp in &[0.1, 0.7, 1.3] {
            let g = LinkGeometry::default().with_theta_p(tp);
            let q = delay_quadratic(&g, &beam(), g.lens_center()).unwrap();
            let l = delay_linear(&g, &beam());
            assert!((q.a1 - l.a1).abs() < 1e-12 * l.a1.abs());
            assert!((q.a2 - l.a2).abs() < 1e-20);
            assert_eq!(q.b[0][1], q.b[1][0]);
        }
    }

    #[test]
    fn linear_and_quadratic_are_close_over_panel() {
        let irs = IrsParams::default();
        for &tp in &[0.1, 1.05, 1.47] {
            let g = LinkGeometry::default().with_theta_p(tp);
            let q = delay_quadratic(&g, &beam(), g.lens_center()).unwrap();
            let l = delay_linear(&g, &beam());
            let bound = q.b_norm() * irs.l_x.max(irs.l_y).powi(2) / 2.0;
            for i in 0..=20 {
                for j in 0..=20 {
                    let r = [i as f64 / 20.0 - 0.5, j as f64 / 20.0 - 0.5];
                    assert!((q.tau(r) - l.tau(r)).abs() <= bound * (1.0 + 1e-9) + 1e-21);
                }
            }
        }
    }

    #[test]
    fn quadratic_spread_uses_grid() {
        let g = LinkGeometry::default();
        let q = delay_quadratic(&g, &beam(), lens_to_global([0.0, 0.0], &g)).unwrap();
        let s = delay_spread(&q, &IrsParams::default());
        let lin = delay_spread(&delay_linear(&g, &beam()), &IrsParams::default());
        assert!((s - lin).abs() < 0.01 * lin);
    }

    #[test]
    fn fresnel_report_for_evaluation_geometry() {
        let r = fresnel_check(&LinkGeometry::default(), &IrsParams::default(), &beam()).unwrap();
        assert!((r.x_e - 0.098_68).abs() < 1e-4);
        assert!((r.d_f - 6.28e3).abs() < 20.0, "{}", r.d_f);
        assert!(!r.fresnel_valid);
        assert!(r.linear_valid);
        assert_eq!(r.warnings.len(), 1);
    }

    #[test]
    fn fresnel_trivial_limits() {
        let lam = 1.55e-6;
        let b = BeamParams {
            wavelength: lam,
            ..beam()
        };
        let tiny = IrsParams::square(2.0 * lam.sqrt());
        let r = fresnel_check(&LinkGeometry::default(), &tiny, &b).unwrap();
        assert!((r.d_f - 1.0).abs() < 1e-9);
        let r = fresnel_check(&LinkGeometry::default(), &IrsParams::square(1e-9), &b).unwrap();
        assert!(r.d_f < 1e-6 && r.fresnel_valid);
    }

    #[test]
    fn nondispersive_angle() {
        let t = nondispersive_threshold(FRAC_PI_2, 0.1e-9, 1.0, 3e8).unwrap();
        assert!((t - 1.54).abs() < 0.01, "{t}");
        assert!(nondispersive_threshold(0.1, 1e-9, 1.0, 3e8).is_none());
    }

    #[test]
    fn in_plane_slope_reduction() {
        for &(tl, tp) in &[(1.5, 0.2), (1.0, 1.2), (0.4, 0.3)] {
            let g = LinkGeometry {
                theta_l: tl,
                theta_p: tp,
                ..LinkGeometry::default()
            };
            let (a1, a2) = linear_slopes(&g);
            assert!((a1 - (tp.cos() - tl.cos()) / 3e8).abs() < 1e-15 * (1.0 / 3e8));
            assert!(a2.abs() < 1e-24);
        }
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(1000))]

        #[test]
        fn affine_spread_matches_grid(
            tl in 0.05f64..FRAC_PI_2, pl in -PI..PI,
            tp in 0.0f64..FRAC_PI_2, pp in -PI..PI,
            lx in 0.1f64..3.0, ly in 0.1f64..3.0,
        ) {
            let g = LinkGeometry { theta_l: tl, phi_l: pl, theta_p: tp, phi_p: pp, ..LinkGeometry::default() };
            let irs = IrsParams { l_x: lx, l_y: ly, ..IrsParams::default() };
            let p = delay_linear(&g, &beam());
            let exact = delay_spread(&p, &irs);
            let (mut lo, mut hi) = (f64::INFINITY, f64::NEG_INFINITY);
            for i in 0..=100 {
                for j in 0..=100 {
                    let t = p.a1 * lx * (i as f64 / 100.0 - 0.5) + p.a2 * ly * (j as f64 / 100.0 - 0.5);
                    lo = lo.min(t);
                    hi = hi.max(t);
                }
            }
            let scale = exact.max(1e-30);
            prop_assert!(((hi - lo) - exact).abs() <= 1e-15 * scale.max(1e-9));
        }
    }
}
