//! Designs every receiver for one channel and checks them on a noisy burst.

use irs_fso::beam::BeamParams;
use irs_fso::cir::cir_corollary1;
use irs_fso::equalize::{design_mmse, design_zf, design_zf_dfe, Detector, EqualizerKind, EqualizerLengths};
use irs_fso::geometry::LinkGeometry;
use irs_fso::irs::IrsParams;
use irs_fso::link::{awgn_sequence, convolve_bits, corollary_taps};
use rand::{Rng, SeedableRng};

fn main() -> irs_fso::Result<()> {
    let geom = LinkGeometry::default().with_theta_p(1.2);
    let c = cir_corollary1(&geom, &BeamParams::default(), &IrsParams::default())?;
    let taps = corollary_taps(&c, 1e-10, 1.0)?.significant_taps(1e-2);
    println!("taps {taps:.4?}");

    let noise_var = 1.0 / (2.0 * 10f64.powf(2.6)); // gamma_t = 26 dB
    let zf = design_zf(&taps, 20, None)?;
    let mmse = design_mmse(&taps, 20, noise_var, 0.25)?;
    let dfe = design_zf_dfe(&taps, 20, taps.len() - 1)?;
    println!("ZF   delay {:2}  residual {:.2e}", zf.decision_delay, zf.objective);
    println!("MMSE delay {:2}  mse {:.2e}", mmse.decision_delay, mmse.objective);
    println!("DFE  delay {:2}  feedback {:.4?}", dfe.decision_delay, dfe.feedback);

    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(5);
    let bits: Vec<u8> = (0..50_000).map(|_| rng.random_range(0..2)).collect();
    let mut u = convolve_bits(&bits, &taps, 1.0);
    let noise = awgn_sequence(u.len(), noise_var, 6);
    for (v, n) in u.iter_mut().zip(noise) {
        *v += n;
    }
    for kind in EqualizerKind::ALL {
        let det = Detector::design(kind, &taps, noise_var, EqualizerLengths::default())?;
        let out = det.detect(&u, bits.len());
        // skip the first and last symbols, where the burst edges help
        let errors = out[100..49_900]
            .iter()
            .zip(&bits[100..49_900])
            .filter(|(a, b)| a != b)
            .count();
        println!("{kind:>6}: {errors} errors in 49800 bits");
    }
    Ok(())
}
