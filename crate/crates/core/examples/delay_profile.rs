//! End-to-end delay across the IRS and the regime checks behind it.

use irs_fso::beam::BeamParams;
use irs_fso::delay::{delay_linear, delay_spread, fresnel_check, nondispersive_threshold};
use irs_fso::geometry::LinkGeometry;
use irs_fso::irs::IrsParams;

fn main() -> irs_fso::Result<()> {
    let beam = BeamParams::default();
    let irs = IrsParams::default();

    println!("theta_p   a1 (ns/m)   spread (ns)");
    for theta_p in [0.0, 0.1, 0.5, 1.05, 1.47, 1.54] {
        let geom = LinkGeometry::default().with_theta_p(theta_p);
        let prof = delay_linear(&geom, &beam);
        println!(
            "{theta_p:7.2}   {:9.4}   {:10.4}",
            prof.a1 * 1e9,
            delay_spread(&prof, &irs) * 1e9
        );
    }

    let geom = LinkGeometry::default();
    println!("LOS delay {:.4} us", geom.tau_los() * 1e6);
    if let Some(th) = nondispersive_threshold(geom.theta_l, 1e-10, irs.l_x, geom.v_l) {
        println!("spread < T = 0.1 ns for theta_p > {th:.4} rad");
    }

    let report = fresnel_check(&geom, &irs, &beam)?;
    println!("Fresnel distance {:.1} m, Fresnel valid: {}", report.d_f, report.fresnel_valid);
    for w in &report.warnings {
        println!("  {w}");
    }
    Ok(())
}
