//! The same in-plane CIR three ways: numeric diffraction integral, the
//! general closed form (just off the plane) and the in-plane Gaussian.

use std::f64::consts::PI;

use irs_fso::beam::BeamParams;
use irs_fso::cir::{
    cir_corollary1, l2_relative_error, passivity_zeta, symmetric_grid, ChannelModel,
    OracleEvaluator, OracleOptions, Theorem1Evaluator, Theorem1Options,
};
use irs_fso::geometry::LinkGeometry;
use irs_fso::irs::IrsParams;

fn main() -> irs_fso::Result<()> {
    let beam = BeamParams::default();
    let theta_p = 1.05;
    let geom = LinkGeometry::default().with_theta_p(theta_p);
    let irs = IrsParams::default();

    let closed = *cir_corollary1(&geom, &beam, &irs)?.dispersive().expect("dispersive");
    let grid = symmetric_grid(closed.support_half, 65, 1.05);

    let model = ChannelModel::new(&geom, &beam, &irs)?;
    let oracle = OracleEvaluator::new(model, OracleOptions::default()).sample_on(grid.clone());

    // a2 must be nonzero for the general form; keep the in-plane scaling
    let tilted = LinkGeometry { phi_p: PI - 1e-3, ..geom };
    let irs_z = IrsParams { zeta: Some(passivity_zeta(&geom, &beam)?), ..irs };
    let general = Theorem1Evaluator::new(
        ChannelModel::new(&tilted, &beam, &irs_z)?,
        Theorem1Options::default(),
    )?
    .sample_on(grid.clone());

    let gauss = irs_fso::cir::Cir::from_fn(
        irs_fso::cir::CirMethod::Corollary1,
        closed.tau0,
        grid,
        |u| closed.h_rel(u),
    );

    println!("u (ns)    oracle       general      gaussian");
    for i in (0..gauss.len()).step_by(8) {
        println!(
            "{:7.3}  {:.5e}  {:.5e}  {:.5e}",
            gauss.t_grid[i] * 1e9,
            oracle.h[i],
            general.h[i],
            gauss.h[i]
        );
    }
    println!("L2 oracle/gaussian  {:.3e}", l2_relative_error(&oracle, &gauss));
    println!("L2 general/gaussian {:.3e}", l2_relative_error(&general, &gauss));
    Ok(())
}
