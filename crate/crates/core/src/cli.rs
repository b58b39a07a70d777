//! Subcommand dispatch and CSV / report emission for the `irs-fso` binary.

use std::fmt::Write as _;
use std::io::Write;
use std::path::Path;

use crate::beam::beam_at_distance;
use crate::cir::{
    cir_corollary1, effective_delay_spread_3db, symmetric_grid, ChannelModel, Cir, CirMethod,
    Corollary1, OracleEvaluator, OracleOptions, Theorem1Evaluator, Theorem1Options, CIR_SAMPLES,
    GRID_MARGIN,
};
use crate::config::{echo_config, Config};
use crate::delay::{delay_linear, delay_spread, fresnel_check, nondispersive_threshold};
use crate::error::{Error, Result};
use crate::link::{corollary_taps, SIGNIFICANT_THRESHOLD};
use crate::sim::{ber_monte_carlo, sweep_theta_p, BerPoint};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Subcommand {
    Delay,
    Cir,
    Taps,
    Ber,
    Sweep,
}

impl Subcommand {
    pub fn name(self) -> &'static str {
        match self {
            Subcommand::Delay => "delay",
            Subcommand::Cir => "cir",
            Subcommand::Taps => "taps",
            Subcommand::Ber => "ber",
            Subcommand::Sweep => "sweep",
        }
    }
}

/// Samples the configured CIR with the chosen method (in-plane corollary,
/// general closed form, or the direct diffraction integral).
pub fn sample_cir(cfg: &Config) -> Result<Cir> {
    let s = &cfg.sim;
    match cfg.method {
        CirMethod::Corollary1 => match cir_corollary1(&s.geometry, &s.beam, &s.irs)? {
            Corollary1::Dispersive(p) => Ok(p.sample()),
            Corollary1::NonDispersive { tau0, h_los } => Ok(Cir {
                t_grid: vec![0.0],
                h: vec![h_los],
                method: CirMethod::Corollary1,
                tau0,
            }),
        },
        CirMethod::Theorem1 => {
            let model = ChannelModel::new(&s.geometry, &s.beam, &s.irs)?;
            let grid = symmetric_grid(model.support_half(), CIR_SAMPLES, GRID_MARGIN);
            Ok(Theorem1Evaluator::new(model, Theorem1Options::default())?.sample_on(grid))
        }
        CirMethod::OracleLemma1 => {
            let model = ChannelModel::new(&s.geometry, &s.beam, &s.irs)?;
            let grid = symmetric_grid(model.support_half(), CIR_SAMPLES, GRID_MARGIN);
            Ok(OracleEvaluator::new(model, OracleOptions::default()).sample_on(grid))
        }
    }
}

fn header(cfg: &Config) -> Result<String> {
    let s = &cfg.sim;
    let g = &s.geometry;
    let at = beam_at_distance(&s.beam, g.d_l, g.theta_l)?;
    let prof = delay_linear(g, &s.beam);
    let (p0, gamma) = s.resolved_power();
    let mut out = String::new();
    writeln!(out, "# resolved configuration").ok();
    for line in echo_config(cfg).lines() {
        writeln!(out, "#   {line}").ok();
    }
    writeln!(out, "# derived").ok();
    writeln!(out, "#   z_R = {:.9e} m", s.beam.rayleigh_range()).ok();
    writeln!(out, "#   w(d_l) = {:.9e} m", at.w_dl).ok();
    writeln!(out, "#   a1 = {:.9e} s/m", prof.a1).ok();
    writeln!(out, "#   a2 = {:.9e} s/m", prof.a2).ok();
    writeln!(out, "#   tau_los = {:.9e} s", g.tau_los()).ok();
    writeln!(out, "#   P0 = {:.6e} W, gamma_t = {:.4} dB", p0, 10.0 * gamma.log10()).ok();
    Ok(out)
}

fn csv_f(v: f64) -> String {
    format!("{v:e}")
}

fn write_delay(cfg: &Config, csv: &mut dyn Write, report: &mut String) -> Result<()> {
    let s = &cfg.sim;
    let g = &s.geometry;
    let prof = delay_linear(g, &s.beam);
    let spread = delay_spread(&prof, &s.irs);
    let regime = fresnel_check(g, &s.irs, &s.beam)?;
    let thr = nondispersive_threshold(g.theta_l, s.symbol_period, s.irs.l_x, g.v_l);
    writeln!(csv, "quantity,value,unit")?;
    let rows: Vec<(&str, String, &str)> = vec![
        ("tau0", csv_f(prof.tau0), "s"),
        ("tau_los", csv_f(g.tau_los()), "s"),
        ("a1", csv_f(prof.a1), "s/m"),
        ("a2", csv_f(prof.a2), "s/m"),
        ("delay_spread", csv_f(spread), "s"),
        (
            "nondispersive_theta_p",
            thr.map_or_else(|| "nan".into(), csv_f),
            "rad",
        ),
        ("fresnel_distance", csv_f(regime.d_f), "m"),
        ("fresnel_valid", regime.fresnel_valid.to_string(), ""),
        ("linear_delay_valid", regime.linear_valid.to_string(), ""),
    ];
    for (k, v, u) in rows {
        writeln!(csv, "{k},{v},{u}")?;
    }
    writeln!(report, "delay spread {:.4} ns over the panel", spread * 1e9).ok();
    for w in regime.warnings {
        writeln!(report, "warning: {w}").ok();
    }
    Ok(())
}

fn write_cir(cfg: &Config, csv: &mut dyn Write, report: &mut String) -> Result<()> {
    let cir = sample_cir(cfg)?;
    writeln!(csv, "t_seconds,h_gml,method")?;
    for (t, h) in cir.t_grid.iter().zip(&cir.h) {
        writeln!(csv, "{},{},{}", csv_f(*t), csv_f(*h), cir.method)?;
    }
    writeln!(report, "method = {}", cir.method).ok();
    writeln!(report, "t_seconds is measured from tau0 = {:.9e} s", cir.tau0).ok();
    if cir.len() == 1 {
        writeln!(report, "non-dispersive: delta channel with weight h_los = {:.6e}", cir.h[0]).ok();
        return Ok(());
    }
    let zeta = ChannelModel::new(&cfg.sim.geometry, &cfg.sim.beam, &cfg.sim.irs)?.zeta;
    writeln!(report, "peak = {:.6e} 1/s", cir.peak()).ok();
    writeln!(report, "integral = {:.6e}", cir.integral()).ok();
    match effective_delay_spread_3db(&cir) {
        Ok(w) => writeln!(report, "delta_tau_3db = {:.6e} s", w).ok(),
        Err(e) => writeln!(report, "delta_tau_3db unavailable: {e}").ok(),
    };
    writeln!(report, "zeta = {zeta:.6e}").ok();
    Ok(())
}

fn write_taps(cfg: &Config, csv: &mut dyn Write, report: &mut String) -> Result<()> {
    let s = &cfg.sim;
    let c = cir_corollary1(&s.geometry, &s.beam, &s.irs)?;
    let ch = corollary_taps(&c, s.symbol_period, s.scale)?;
    writeln!(csv, "m,h_e")?;
    for (i, h) in ch.taps.iter().enumerate() {
        writeln!(csv, "{},{}", ch.first_index + i as i64, csv_f(*h))?;
    }
    writeln!(report, "t_off = {:.6e} s", ch.t_off).ok();
    writeln!(report, "tap count = {}", ch.taps.len()).ok();
    writeln!(
        report,
        "significant taps (>= {SIGNIFICANT_THRESHOLD} of peak) = {}",
        ch.significant_count(SIGNIFICANT_THRESHOLD)
    )
    .ok();
    Ok(())
}

fn write_ber(points: &[BerPoint], csv: &mut dyn Write, report: &mut String) -> Result<()> {
    writeln!(csv, "theta_p,delta_theta,equalizer,gamma_t_db,ber,ci95,n_bits,n_errors")?;
    for p in points {
        writeln!(
            csv,
            "{},{},{},{},{},{},{},{}",
            p.theta_p,
            p.delta_theta,
            p.equalizer,
            p.gamma_t_db,
            csv_f(p.ber),
            csv_f(p.ci95),
            p.n_bits,
            p.n_errors
        )?;
        if p.low_confidence {
            writeln!(
                report,
                "low confidence: theta_p = {:.4}, {} at {:.2} dB has only {} errors",
                p.theta_p, p.equalizer, p.gamma_t_db, p.n_errors
            )
            .ok();
        }
    }
    writeln!(report, "{} points", points.len()).ok();
    Ok(())
}

/// Runs `sub`, writing CSV to `csv` and the human-readable report to `report`.
pub fn run_to(sub: Subcommand, cfg: &Config, csv: &mut dyn Write, report: &mut dyn Write) -> Result<()> {
    cfg.sim.validate()?;
    let mut text = header(cfg)?;
    writeln!(text, "# subcommand {}", sub.name()).ok();
    match sub {
        Subcommand::Delay => write_delay(cfg, csv, &mut text)?,
        Subcommand::Cir => write_cir(cfg, csv, &mut text)?,
        Subcommand::Taps => write_taps(cfg, csv, &mut text)?,
        Subcommand::Ber => write_ber(&ber_monte_carlo(&cfg.sim)?, csv, &mut text)?,
        Subcommand::Sweep => {
            write_ber(&sweep_theta_p(&cfg.sim, &cfg.sim.theta_grid)?, csv, &mut text)?
        }
    }
    csv.flush()?;
    report.write_all(text.as_bytes())?;
    Ok(())
}

/// CSV goes to `out` when given (report to stdout), otherwise CSV to stdout
/// and the report to stderr.
pub fn run(sub: Subcommand, cfg: &Config, out: Option<&Path>) -> Result<()> {
    match out {
        Some(path) => {
            let file = std::fs::File::create(path)
                .map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
            let mut w = std::io::BufWriter::new(file);
            run_to(sub, cfg, &mut w, &mut std::io::stdout().lock())
        }
        None => run_to(
            sub,
            cfg,
            &mut std::io::stdout().lock(),
            &mut std::io::stderr().lock(),
        ),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::config::parse_config_str;

    fn run_str(sub: Subcommand, doc: &str) -> (String, String) {
        let cfg = parse_config_str(doc).unwrap();
        let (mut csv, mut rep) = (Vec::new(), Vec::new());
        run_to(sub, &cfg, &mut csv, &mut rep).unwrap();
        (String::from_utf8(csv).unwrap(), String::from_utf8(rep).unwrap())
    }

    #[test]
    fn delay_csv() {
        let (csv, rep) = run_str(Subcommand::Delay, "");
        assert!(csv.starts_with("quantity,value,unit\n"));
        assert!(csv.contains("tau_los,1.4e-6,s"));
        assert!(!csv.contains('\r'));
        assert!(rep.contains("z_R = 2.026"));
        assert!(rep.contains("w(d_l) = 9.868"));
    }

    #[test]
    fn cir_csv_has_header_and_samples() {
        let (csv, rep) = run_str(Subcommand::Cir, "");
        let lines: Vec<&str> = csv.lines().collect();
        assert_eq!(lines[0], "t_seconds,h_gml,method");
        assert_eq!(lines.len(), 1 + CIR_SAMPLES);
        assert!(lines[1].ends_with(",corollary1"));
        assert!(rep.contains("delta_tau_3db"));
    }

    #[test]
    fn delta_channel_cir() {
        let (csv, rep) = run_str(Subcommand::Cir, "[geometry]\ntheta_p_rad = 1.5707963267948966\n");
        assert_eq!(csv.lines().count(), 2);
        assert!(rep.contains("non-dispersive"));
    }

    #[test]
    fn taps_csv() {
        let (csv, rep) = run_str(Subcommand::Taps, "[geometry]\ntheta_p_rad = 1.47\n");
        assert!(csv.starts_with("m,h_e\n"));
        assert!(rep.contains("significant taps (>= 0.01 of peak) = 3"));
    }

    #[test]
    fn ber_csv_columns() {
        let (csv, _) = run_str(
            Subcommand::Ber,
            "[geometry]\ntheta_p_rad = 1.4\n[sim]\nn_bits = 20000\nequalizers = \"mmse,mlse\"\n",
        );
        let lines: Vec<&str> = csv.lines().collect();
        assert_eq!(lines[0], "theta_p,delta_theta,equalizer,gamma_t_db,ber,ci95,n_bits,n_errors");
        assert_eq!(lines.len(), 3);
        assert!(lines[1].contains(",mmse,"));
    }

    #[test]
    fn theorem1_rejects_exact_in_plane() {
        let cfg = Config {
            method: CirMethod::Theorem1,
            ..Config::default()
        };
        let (mut a, mut b) = (Vec::new(), Vec::new());
        assert_eq!(
            run_to(Subcommand::Cir, &cfg, &mut a, &mut b),
            Err(Error::InPlaneUseCorollary)
        );
    }
}
