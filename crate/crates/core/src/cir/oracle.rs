//! Reference CIR: the iso-delay line integral with the exact distance term.
//!
//! No Fresnel expansion is applied to `|r_o - r|`; only the delay profile is
//! linear, so the iso-delay set is a straight segment across the panel.

use num_complex::Complex64;

use super::{default_grid, ChannelModel, Cir, CirMethod};
use crate::beam::BeamParams;
use crate::error::Result;
use crate::geometry::LinkGeometry;
use crate::irs::IrsParams;
use crate::quadrature::{adaptive_simpson, gauss_legendre, GaussLegendre};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OracleOptions {
    /// Gauss-Legendre order per lens axis.
    pub lens_order: usize,
    /// Initial Simpson panels along the iso-delay segment.
    pub panels: usize,
    pub rel_tol: f64,
    /// Integrate over the circular aperture instead of the equal-area square.
    pub circular_lens: bool,
}

impl Default for OracleOptions {
    fn default() -> Self {
        Self {
            lens_order: 12,
            panels: 256,
            rel_tol: 1e-6,
            circular_lens: false,
        }
    }
}

#[derive(Debug, Clone)]
pub struct OracleEvaluator {
    pub model: ChannelModel,
    pub opts: OracleOptions,
    rule: GaussLegendre,
}

impl OracleEvaluator {
    pub fn new(model: ChannelModel, opts: OracleOptions) -> Self {
        Self {
            rule: gauss_legendre(opts.lens_order.max(1)),
            model,
            opts,
        }
    }

    /// Received field at lens point `r_p`, delay `u`, without the prefactor.
    fn line_field(&self, r_p: [f64; 2], u: f64) -> f64 {
        let m = &self.model;
        let Some(line) = m.iso_delay_line(u) else {
            return 0.0;
        };
        let k = m.beam.wavenumber();
        let ro = crate::geometry::lens_to_global(r_p, &m.geom);
        let ro_norm = ro.norm();
        let inc = &m.incident;
        let phase = &m.phase;
        let integrand = |s: f64| {
            let [x, y] = line.point(s);
            let dx = ro.x - x;
            let dy = ro.y - y;
            let dist = (dx * dx + dy * dy + ro.z * ro.z).sqrt();
            // |r_o - r| - |r_o| without cancellation
            let ddist = (x * x + y * y - 2.0 * (ro.x * x + ro.y * y)) / (dist + ro_norm);
            let total = k * ddist + phase.phase_variation(x, y, k) + inc.phase_variation(x, y);
            Complex64::from_polar(inc.log_envelope(x, y).exp(), -total)
        };
        let e = adaptive_simpson(integrand, line.s0, line.s1, self.opts.panels, self.opts.rel_tol);
        (line.jacobian * e.norm()).powi(2)
    }

    /// `h(tau0 + u)`.
    pub fn h_rel(&self, u: f64) -> f64 {
        if u.abs() > self.model.support_half() {
            return 0.0;
        }
        let a_tilde = self.model.lens_half_side();
        let mut acc = 0.0;
        if self.opts.circular_lens {
            let a = self.model.geom.lens_radius;
            for (r, wr) in self.rule.nodes_on(0.0, a) {
                for (th, wt) in self.rule.nodes_on(0.0, 2.0 * std::f64::consts::PI) {
                    acc += wr * wt * r * self.line_field([r * th.cos(), r * th.sin()], u);
                }
            }
        } else {
            for (x, wx) in self.rule.nodes_on(-a_tilde, a_tilde) {
                for (y, wy) in self.rule.nodes_on(-a_tilde, a_tilde) {
                    acc += wx * wy * self.line_field([x, y], u);
                }
            }
        }
        self.model.intensity_prefactor() * acc / (2.0 * a_tilde)
    }

    pub fn sample_on(&self, t_grid: Vec<f64>) -> Cir {
        Cir::from_fn(CirMethod::OracleLemma1, self.model.delay.tau0, t_grid, |u| self.h_rel(u))
    }

    pub fn sample(&self) -> Cir {
        self.sample_on(default_grid(self.model.support_half()))
    }
}

/// Reference `h(t)` at absolute time `t`, `lens_order` Gauss-Legendre nodes per axis.
pub fn cir_oracle_lemma1(
    geom: &LinkGeometry,
    beam: &BeamParams,
    irs: &IrsParams,
    t: f64,
    lens_order: usize,
) -> Result<f64> {
    let model = ChannelModel::new(geom, beam, irs)?;
    let tau0 = model.delay.tau0;
    let ev = OracleEvaluator::new(
        model,
        OracleOptions {
            lens_order,
            ..OracleOptions::default()
        },
    );
    Ok(ev.h_rel(t - tau0))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cir::cir_corollary1;

    #[test]
    fn zero_outside_support() {
        let g = LinkGeometry::default().with_theta_p(1.47);
        let m = ChannelModel::new(&g, &BeamParams::default(), &IrsParams::default()).unwrap();
        let far = m.delay.tau0 + 3.0 * m.support_half();
        let h = cir_oracle_lemma1(&g, &BeamParams::default(), &IrsParams::default(), far, 4).unwrap();
        assert_eq!(h, 0.0);
    }

    #[test]
    fn steep_receiver_peak_matches_closed_form() {
        let g = LinkGeometry::default().with_theta_p(1.47);
        let b = BeamParams::default();
        let irs = IrsParams::default();
        let m = ChannelModel::new(&g, &b, &irs).unwrap();
        let ev = OracleEvaluator::new(m, OracleOptions { lens_order: 8, ..OracleOptions::default() });
        let h = ev.h_rel(0.0);
        let p = *cir_corollary1(&g, &b, &irs).unwrap().dispersive().unwrap();
        let rel = (h / p.peak() - 1.0).abs();
        assert!(rel < 0.05, "oracle {h} vs closed form {} ({rel})", p.peak());
    }

    #[test]
    fn lens_grid_convergence() {
        let g = LinkGeometry::default().with_theta_p(1.47);
        let m = ChannelModel::new(&g, &BeamParams::default(), &IrsParams::default()).unwrap();
        let u = 0.3 * m.support_half();
        let coarse = OracleEvaluator::new(m.clone(), OracleOptions { lens_order: 6, ..OracleOptions::default() });
        let fine = OracleEvaluator::new(m, OracleOptions { lens_order: 12, ..OracleOptions::default() });
        let (a, b) = (coarse.h_rel(u), fine.h_rel(u));
        assert!((a / b - 1.0).abs() < 0.005, "{a} vs {b}");
    }
}
