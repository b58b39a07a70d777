//! With the passivity factor, the collected energy equals the lens capture
//! fraction times the truncation loss of the panel.

use irs_fso::beam::BeamParams;
use irs_fso::cir::{cir_corollary1, passivity_zeta};
use irs_fso::geometry::LinkGeometry;
use irs_fso::irs::IrsParams;
use irs_fso::quadrature::gauss_legendre;
use irs_fso::special::erf;

fn main() -> irs_fso::Result<()> {
    let beam = BeamParams::default();
    let rule = gauss_legendre(256);
    for theta_p in [0.1, 1.05, 1.47] {
        let geom = LinkGeometry::default().with_theta_p(theta_p);
        for side in [0.05, 0.3, 1.0] {
            let irs = IrsParams::square(side);
            let c = cir_corollary1(&geom, &beam, &irs)?;
            let p = c.dispersive().expect("dispersive");
            let numeric = rule.integrate(-p.support_half, p.support_half, |u| p.h_rel(u));
            let expected = p.h_los * erf(p.c_tau.sqrt() * p.support_half);
            println!(
                "theta_p {theta_p:4.2}  L {side:4.2} m  zeta {:.4e}  int h = {numeric:.8}  expected {expected:.8}",
                passivity_zeta(&geom, &beam)?
            );
        }
    }
    Ok(())
}
