//! Drives the library's command layer from a TOML string, as the binary does.

use irs_fso::cli::{run_to, Subcommand};
use irs_fso::config::{echo_config, parse_config_str};

fn main() -> irs_fso::Result<()> {
    let cfg = parse_config_str(
        r#"
[geometry]
theta_p_deg = 75.0

[link]
w_fso_hz = 10e9
gamma_t_db = 16.0
"#,
    )?;
    println!("{}", echo_config(&cfg));
    let mut csv = Vec::new();
    let mut report = Vec::new();
    run_to(Subcommand::Taps, &cfg, &mut csv, &mut report)?;
    print!("{}", String::from_utf8_lossy(&csv));
    print!("{}", String::from_utf8_lossy(&report).lines().filter(|l| !l.starts_with('#')).collect::<Vec<_>>().join("\n"));
    println!();
    Ok(())
}
