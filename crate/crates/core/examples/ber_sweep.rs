//! A short BER sweep over the receiver elevation.
//!
//! `cargo run --release --example ber_sweep` takes a few seconds.

use irs_fso::equalize::EqualizerKind;
use irs_fso::sim::{sweep_theta_p, PowerSpec, SimConfig};

fn main() -> irs_fso::Result<()> {
    let cfg = SimConfig {
        power: PowerSpec::GammaTDb(24.0),
        n_bits: 200_000,
        target_errors: 500,
        equalizers: vec![EqualizerKind::None, EqualizerKind::Mmse, EqualizerKind::Mlse],
        ..SimConfig::default()
    };
    let points = sweep_theta_p(&cfg, &[0.3, 0.7, 1.1, 1.3, 1.5])?;
    println!("theta_p  equalizer  ber         +-ci95      bits");
    for p in points {
        println!(
            "{:7.2}  {:9}  {:.3e}  {:.2e}  {}",
            p.theta_p, p.equalizer, p.ber, p.ci95, p.n_bits
        );
    }
    Ok(())
}
