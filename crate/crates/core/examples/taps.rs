//! Symbol-spaced taps at 10 GHz for a few receiver elevations.

use irs_fso::beam::BeamParams;
use irs_fso::cir::cir_corollary1;
use irs_fso::geometry::LinkGeometry;
use irs_fso::irs::IrsParams;
use irs_fso::link::{corollary_taps, SIGNIFICANT_THRESHOLD};

fn main() -> irs_fso::Result<()> {
    let t = 1e-10;
    for theta_p in [0.1, 0.5, 1.05, 1.3, 1.47, std::f64::consts::FRAC_PI_2] {
        let geom = LinkGeometry::default().with_theta_p(theta_p);
        let c = cir_corollary1(&geom, &BeamParams::default(), &IrsParams::default())?;
        let ch = corollary_taps(&c, t, 1.0)?;
        let sig = ch.significant_taps(SIGNIFICANT_THRESHOLD);
        let shown: Vec<String> = sig.iter().map(|v| format!("{v:.4}")).collect();
        println!(
            "theta_p {theta_p:5.3}: {:2} significant of {:2}, sum {:.4}  [{}]",
            sig.len(),
            ch.taps.len(),
            ch.tap_sum(),
            shown.join(" ")
        );
    }
    Ok(())
}
