//! Closed-form frequency response of the in-plane CIR against a direct DFT.

use std::f64::consts::PI;

use irs_fso::beam::BeamParams;
use irs_fso::cir::cir_corollary1;
use irs_fso::geometry::LinkGeometry;
use irs_fso::irs::IrsParams;
use num_complex::Complex64;

fn main() -> irs_fso::Result<()> {
    let geom = LinkGeometry::default().with_theta_p(1.05);
    let c = cir_corollary1(&geom, &BeamParams::default(), &IrsParams::default())?;
    let p = *c.dispersive().expect("dispersive");
    let cir = p.sample();
    let dt = cir.dt();

    println!("f (GHz)   |H| closed   |H| DFT      phase closed");
    for f_ghz in [0.0, 1.0, 2.5, 5.0, 10.0, 20.0] {
        let f = f_ghz * 1e9;
        let h = p.freq_response(f);
        let dft: Complex64 = cir
            .t_grid
            .iter()
            .zip(&cir.h)
            .map(|(&u, &v)| v * dt * Complex64::from_polar(1.0, -2.0 * PI * f * u))
            .sum();
        println!("{f_ghz:7.1}   {:.6e}  {:.6e}  {:+.3e}", h.norm(), dft.norm(), h.arg());
    }
    Ok(())
}
