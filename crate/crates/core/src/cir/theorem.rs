//! General-geometry CIR with the second-order (Fresnel) phase.
//!
//! For each lens point the received field is a Gaussian chirp integrated along
//! the iso-delay line, which has a closed form in terms of the Faddeeva
//! function. Its squared modulus is then integrated over the equal-area square
//! lens with adaptive Gauss-Legendre.
//!
//! Experimental outside the in-plane case: the evaluation geometries are all
//! in-plane and this path is validated by approaching them with `phi_p -> pi`.

use std::f64::consts::PI;

use num_complex::Complex64;

use super::{default_grid, ChannelModel, Cir, CirMethod};
use crate::beam::BeamParams;
use crate::error::{Error, Result};
use crate::geometry::LinkGeometry;
use crate::irs::IrsParams;
use crate::quadrature::adaptive_gl_2d;
use crate::special::faddeeva;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Theorem1Options {
    /// Relative agreement between successive lens-quadrature orders.
    pub rel_tol: f64,
    pub start_order: usize,
    pub max_order: usize,
}

impl Default for Theorem1Options {
    fn default() -> Self {
        Self {
            rel_tol: 1e-6,
            start_order: 8,
            max_order: 256,
        }
    }
}

/// Closed-form constants of the general CIR, with the lens-center
/// approximations `x_o / d_p ~ cos(phi_p) cos(theta_p)` and
/// `y_o / d_p ~ sin(phi_p) cos(theta_p)`.
///
/// Informational: [`Theorem1Evaluator`] works from the exact lens mapping.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Theorem1Params {
    /// Gaussian delay coefficient (complex; its real part governs the decay).
    pub sigma_tau: Complex64,
    pub c_h: f64,
    pub a_tilde: f64,
    pub d: [[Complex64; 2]; 2],
    pub c: [[Complex64; 2]; 2],
    pub e: [Complex64; 2],
    pub c0: Complex64,
    pub c1: Complex64,
    pub c2: Complex64,
    pub c5: Complex64,
    pub a_s: Complex64,
    pub b_x: Complex64,
    pub b_y: Complex64,
}

impl Theorem1Params {
    pub fn new(model: &ChannelModel) -> Result<Self> {
        let (a1, a2) = (model.delay.a1, model.delay.a2);
        if a2 == 0.0 {
            return Err(Error::InPlaneUseCorollary);
        }
        let g = &model.geom;
        let at = &model.incident.at;
        let k = model.beam.wavenumber();
        let jk = Complex64::new(0.0, k);
        let (st, ct) = g.theta_p.sin_cos();
        let (sp, cp) = g.phi_p.sin_cos();
        let dp = g.d_p;
        let r = a1 / a2;

        let c1 = 1.0 / (at.w_x * at.w_x) + jk / (2.0 * dp) * (1.0 - cp * cp * ct * ct) + jk / (2.0 * at.r_x);
        let c2 = 1.0 / (at.w_y * at.w_y) + jk / (2.0 * dp) * (1.0 - sp * sp * ct * ct) + jk / (2.0 * at.r_y);
        let c5 = -jk / dp * sp * cp * ct * ct;
        let a_s = c1 + r * r * c2 - r * c5;
        let c0 = c2 * (c5 - 2.0 * r);
        let sigma_tau = (2.0 * c2 - c2 * c2 * (c5 - 2.0 * r).powi(2) / (2.0 * a_s)) / (a2 * a2);
        let lam = model.beam.wavelength;
        let c_h = 2.0 * model.zeta * model.zeta
            / (lam * lam * dp * dp * a2 * a2 * a_s.norm() * at.w_dl * at.w_dl);
        let dfac = -jk / (2.0 * dp);
        let d = [
            [dfac * cp * st, dfac * -sp],
            [dfac * sp * st, dfac * cp],
        ];
        let cfac = 1.0 / (2.0 * a_s);
        let c = [[cfac, cfac * -r], [cfac * r, cfac]];
        let e = [1.0 / a_s, -2.0 - c0 * r / a_s];
        let b_x = 1.0 / (at.w_x * at.w_x) + jk / (2.0 * at.r_x) + jk / (2.0 * dp);
        let b_y = 1.0 / (at.w_y * at.w_y) + jk / (2.0 * at.r_y) + jk / (2.0 * dp);
        Ok(Self {
            sigma_tau,
            c_h,
            a_tilde: model.lens_half_side(),
            d,
            c,
            e,
            c0,
            c1,
            c2,
            c5,
            a_s,
            b_x,
            b_y,
        })
    }

    /// `[c3, c4] = D r_p`.
    pub fn c3_c4(&self, r_p: [f64; 2]) -> [Complex64; 2] {
        [
            self.d[0][0] * r_p[0] + self.d[0][1] * r_p[1],
            self.d[1][0] * r_p[0] + self.d[1][1] * r_p[1],
        ]
    }
}

#[derive(Debug, Clone)]
pub struct Theorem1Evaluator {
    pub model: ChannelModel,
    pub opts: Theorem1Options,
}

impl Theorem1Evaluator {
    pub fn new(model: ChannelModel, opts: Theorem1Options) -> Result<Self> {
        if model.delay.a2 == 0.0 {
            return Err(Error::InPlaneUseCorollary);
        }
        Ok(Self { model, opts })
    }

    /// `|E_rx|^2 / (2 eta P0)` at lens point `r_p` and delay `u = t - tau0`.
    pub fn intensity(&self, r_p: [f64; 2], u: f64) -> f64 {
        let m = &self.model;
        let Some(line) = m.iso_delay_line(u) else {
            return 0.0;
        };
        let k = m.beam.wavenumber();
        let at = &m.incident.at;
        let ro = crate::geometry::lens_to_global(r_p, &m.geom);
        let rho = ro.norm();
        let (xo, yo) = (ro.x / rho, ro.y / rho);

        let jk = Complex64::new(0.0, k);
        let m11 = 1.0 / (at.w_x * at.w_x) + jk * ((1.0 - xo * xo) / (2.0 * rho) + 1.0 / (2.0 * at.r_x));
        let m22 = 1.0 / (at.w_y * at.w_y) + jk * ((1.0 - yo * yo) / (2.0 * rho) + 1.0 / (2.0 * at.r_y));
        let m12 = jk * (-xo * yo / (2.0 * rho));
        let gx = -xo + m.phase.phi_x - m.geom.theta_l.cos();
        let gy = -yo + m.phase.phi_y;

        let (p, q) = (line.p, line.q);
        let quad = |a: [f64; 2], b: [f64; 2]| {
            m11 * a[0] * b[0] + m12 * (a[0] * b[1] + a[1] * b[0]) + m22 * a[1] * b[1]
        };
        let a = quad(q, q);
        let b = 2.0 * quad(p, q) + jk * (gx * q[0] + gy * q[1]);
        let c0 = quad(p, p) + jk * (gx * p[0] + gy * p[1]);
        let field = gaussian_segment(a, b, c0, line.s0, line.s1);
        m.intensity_prefactor() * (line.jacobian * field.norm()).powi(2)
    }

    /// `h(tau0 + u)`.
    pub fn h_rel(&self, u: f64) -> f64 {
        if u.abs() > self.model.support_half() {
            return 0.0;
        }
        let at = self.model.lens_half_side();
        let est = adaptive_gl_2d(
            |x, y| self.intensity([x, y], u),
            (-at, at),
            (-at, at),
            self.opts.start_order,
            self.opts.max_order,
            self.opts.rel_tol,
        );
        est.value / (2.0 * at)
    }

    pub fn sample_on(&self, t_grid: Vec<f64>) -> Cir {
        Cir::from_fn(CirMethod::Theorem1, self.model.delay.tau0, t_grid, |u| self.h_rel(u))
    }

    pub fn sample(&self) -> Cir {
        self.sample_on(default_grid(self.model.support_half()))
    }
}

/// `h(t)` at absolute time `t`.
pub fn cir_theorem1(geom: &LinkGeometry, beam: &BeamParams, irs: &IrsParams, t: f64) -> Result<f64> {
    let model = ChannelModel::new(geom, beam, irs)?;
    let tau0 = model.delay.tau0;
    let ev = Theorem1Evaluator::new(model, Theorem1Options::default())?;
    Ok(ev.h_rel(t - tau0))
}

/// `int_{s0}^{s1} exp(-(A s^2 + B s + C0)) ds` for `Re A > 0`.
///
/// With `z = sqrt(A) s + B / (2 sqrt(A))` and `sigma = sign(Re z)`,
/// `erf(z) = sigma (1 - exp(-z^2) w(i sigma z))`, and `w` is only ever
/// evaluated in the upper half plane.
pub(crate) fn gaussian_segment(a: Complex64, b: Complex64, c0: Complex64, s0: f64, s1: f64) -> Complex64 {
    let sa = a.sqrt();
    let shift = b / (2.0 * sa);
    let end = |s: f64| {
        let z = sa * s + shift;
        let sigma = if z.re < 0.0 { -1.0 } else { 1.0 };
        let g = (-(a * s * s + b * s + c0)).exp();
        (sigma, sigma * g * faddeeva(Complex64::i() * sigma * z))
    };
    let (sg0, t0) = end(s0);
    let (sg1, t1) = end(s1);
    let mut acc = t0 - t1;
    if sg0 != sg1 {
        acc += (b * b / (4.0 * a) - c0).exp() * (sg1 - sg0);
    }
    acc * PI.sqrt() / (2.0 * sa)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cir::passivity_zeta;
    use crate::quadrature::adaptive_simpson;
    use std::f64::consts::PI;

    #[test]
    fn segment_matches_quadrature() {
        let cases = [
            (Complex64::new(2.0, 0.0), Complex64::new(0.5, 1.0), Complex64::new(0.1, -0.3), -1.0, 2.0),
            (Complex64::new(1.0, 80.0), Complex64::new(0.0, 40.0), Complex64::new(0.0, 3.0), -0.5, 0.7),
            (Complex64::new(5.0, -20.0), Complex64::new(-30.0, 5.0), Complex64::new(45.0, 0.0), 2.0, 4.0),
            (Complex64::new(0.3, 0.0), Complex64::new(0.0, 0.0), Complex64::new(0.0, 0.0), -20.0, 20.0),
        ];
        for (a, b, c, s0, s1) in cases {
            let num = adaptive_simpson(|s| (-(a * s * s + b * s + c)).exp(), s0, s1, 512, 1e-12);
            let cf = gaussian_segment(a, b, c, s0, s1);
            assert!((cf - num).norm() < 1e-9 * num.norm().max(1e-3), "{cf} vs {num}");
        }
    }

    fn near_plane(theta_p: f64) -> ChannelModel {
        let g = LinkGeometry::default().with_theta_p(theta_p);
        let zeta = passivity_zeta(&g, &BeamParams::default()).unwrap();
        let g = LinkGeometry {
            phi_p: PI - 1e-3,
            ..g
        };
        let irs = IrsParams {
            zeta: Some(zeta),
            ..IrsParams::default()
        };
        ChannelModel::new(&g, &BeamParams::default(), &irs).unwrap()
    }

    #[test]
    fn in_plane_is_rejected() {
        let m = ChannelModel::new(&LinkGeometry::default(), &BeamParams::default(), &IrsParams::default()).unwrap();
        assert!(matches!(
            Theorem1Evaluator::new(m.clone(), Theorem1Options::default()),
            Err(Error::InPlaneUseCorollary)
        ));
        assert!(matches!(Theorem1Params::new(&m), Err(Error::InPlaneUseCorollary)));
    }

    #[test]
    fn paper_constants_invariants() {
        let m = near_plane(0.1);
        let p = Theorem1Params::new(&m).unwrap();
        assert!(p.a_s.re > 0.0);
        let at = m.incident.at;
        assert!((p.c1.re - 1.0 / (at.w_x * at.w_x)).abs() < 1e-9);
        assert!((p.c2.re - 1.0 / (at.w_y * at.w_y)).abs() < 1e-9);
        assert!(p.c_h > 0.0);
        let [c3, c4] = p.c3_c4([0.0, 0.0]);
        assert_eq!((c3, c4), (Complex64::new(0.0, 0.0), Complex64::new(0.0, 0.0)));
    }

    #[test]
    fn support_and_positivity() {
        let ev = Theorem1Evaluator::new(near_plane(1.05), Theorem1Options::default()).unwrap();
        let s = ev.model.support_half();
        assert_eq!(ev.h_rel(1.01 * s), 0.0);
        assert!(ev.h_rel(0.0) > 0.0);
    }

    #[test]
    fn near_plane_peak_matches_closed_form() {
        let model = near_plane(1.05);
        let ev = Theorem1Evaluator::new(model, Theorem1Options::default()).unwrap();
        let g = LinkGeometry::default().with_theta_p(1.05);
        let c = crate::cir::cir_corollary1(&g, &BeamParams::default(), &IrsParams::default()).unwrap();
        let p = c.dispersive().unwrap();
        let rel = (ev.h_rel(0.0) / p.peak() - 1.0).abs();
        assert!(rel < 0.01, "relative peak difference {rel}");
    }

    #[test]
    fn doc_example_public_api() {
        let g = LinkGeometry {
            phi_p: PI - 1e-3,
            ..LinkGeometry::default().with_theta_p(1.47)
        };
        let m = ChannelModel::new(&g, &BeamParams::default(), &IrsParams::default()).unwrap();
        let h = cir_theorem1(&g, &BeamParams::default(), &IrsParams::default(), m.delay.tau0).unwrap();
        assert!(h > 0.0);
    }
}
