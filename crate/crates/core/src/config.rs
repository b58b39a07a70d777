//! TOML configuration: parsing with unit suffixes, validation with key paths,
//! and a resolved echo that parses back to the same values.
//!
//! ```toml
//! [geometry]
//! theta_p_deg = 60.0      # or theta_p_rad
//! [link]
//! gamma_t_db = 24.0       # or p0_w / p0_mw
//! n0_dbm_per_mhz = -104.0 # or n0_w_per_hz
//! [sim]
//! equalizers = "mmse,mlse"
//! ```
//!
//! Every omitted field takes the evaluation default.

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::cir::CirMethod;
use crate::equalize::{EqualizerKind, EqualizerLengths};
use crate::error::{Error, Result};
use crate::link::dbm_per_mhz_to_w_per_hz;
use crate::sim::{PowerSpec, SimConfig};

/// Resolved configuration for every subcommand.
#[derive(Debug, Clone, PartialEq)]
pub struct Config {
    pub sim: SimConfig,
    /// CIR evaluation used by the `cir` subcommand.
    pub method: CirMethod,
}

impl Default for Config {
    fn default() -> Self {
        Self {
            sim: SimConfig::default(),
            method: CirMethod::Corollary1,
        }
    }
}

#[derive(Debug, Default, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
struct RawConfig {
    #[serde(default)]
    geometry: RawGeometry,
    #[serde(default)]
    beam: RawBeam,
    #[serde(default)]
    irs: RawIrs,
    #[serde(default)]
    link: RawLink,
    #[serde(default)]
    sim: RawSim,
}

#[derive(Debug, Default, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
struct RawGeometry {
    #[serde(skip_serializing_if = "Option::is_none")]
    d_l: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    d_p: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    theta_l_rad: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    theta_l_deg: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    phi_l_rad: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    phi_l_deg: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    theta_p_rad: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    theta_p_deg: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    phi_p_rad: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    phi_p_deg: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    lens_radius: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    v_l: Option<f64>,
}

#[derive(Debug, Default, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
struct RawBeam {
    #[serde(skip_serializing_if = "Option::is_none")]
    w0: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    wavelength: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    eta: Option<f64>,
}

#[derive(Debug, Default, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
struct RawIrs {
    #[serde(skip_serializing_if = "Option::is_none")]
    l_x: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    l_y: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    phi0: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    zeta: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    q_x: Option<u32>,
    #[serde(skip_serializing_if = "Option::is_none")]
    q_y: Option<u32>,
}

#[derive(Debug, Default, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
struct RawLink {
    #[serde(skip_serializing_if = "Option::is_none")]
    w_fso_hz: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    symbol_period_s: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    n0_dbm_per_mhz: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    n0_w_per_hz: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    p0_w: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    p0_mw: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    gamma_t_db: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    scale: Option<f64>,
}

#[derive(Debug, Default, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
struct RawSim {
    #[serde(skip_serializing_if = "Option::is_none")]
    n_bits: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    target_errors: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    seed: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    equalizers: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    method: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    gamma_t_db_sweep: Option<Vec<f64>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    theta_grid_rad: Option<Vec<f64>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    theta_grid_deg: Option<Vec<f64>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    n_eq: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    n_ff: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    n_fb: Option<usize>,
}

/// Fewest bits accepted for a configured run.
pub const MIN_CONFIG_BITS: u64 = 10_000;

fn angle(section: &str, name: &str, rad: Option<f64>, deg: Option<f64>, default: f64) -> Result<f64> {
    let v = match (rad, deg) {
        (Some(_), Some(_)) => {
            return Err(Error::config(
                format!("{section}.{name}"),
                format!("give only one of {name}_rad and {name}_deg"),
            ))
        }
        (Some(r), None) => r,
        (None, Some(d)) => d.to_radians(),
        (None, None) => default,
    };
    if !v.is_finite() {
        return Err(Error::config(format!("{section}.{name}"), "must be finite"));
    }
    Ok(v)
}

fn positive(path: &str, v: Option<f64>, default: f64) -> Result<f64> {
    let v = v.unwrap_or(default);
    if !(v.is_finite() && v > 0.0) {
        return Err(Error::config(path, format!("must be finite and > 0, got {v}")));
    }
    Ok(v)
}

/// Maps a component error onto a key inside `section`.
fn in_section(section: &str, e: Error) -> Error {
    match e {
        Error::InvalidParameter { name, reason } => Error::config(format!("{section}.{name}"), reason),
        Error::GrazingIncidence(v) => Error::config(
            format!("{section}.theta_l"),
            format!("must be in (0, pi/2], got {v}"),
        ),
        other => Error::config(section, other.to_string()),
    }
}

impl RawConfig {
    fn resolve(self) -> Result<Config> {
        let mut cfg = Config::default();
        let s = &mut cfg.sim;

        let g = self.geometry;
        let dg = s.geometry;
        s.geometry.d_l = positive("geometry.d_l", g.d_l, dg.d_l)?;
        s.geometry.d_p = positive("geometry.d_p", g.d_p, dg.d_p)?;
        s.geometry.theta_l = angle("geometry", "theta_l", g.theta_l_rad, g.theta_l_deg, dg.theta_l)?;
        s.geometry.phi_l = angle("geometry", "phi_l", g.phi_l_rad, g.phi_l_deg, dg.phi_l)?;
        s.geometry.theta_p = angle("geometry", "theta_p", g.theta_p_rad, g.theta_p_deg, dg.theta_p)?;
        s.geometry.phi_p = angle("geometry", "phi_p", g.phi_p_rad, g.phi_p_deg, dg.phi_p)?;
        s.geometry.lens_radius = positive("geometry.lens_radius", g.lens_radius, dg.lens_radius)?;
        s.geometry.v_l = positive("geometry.v_l", g.v_l, dg.v_l)?;
        s.geometry.validate().map_err(|e| in_section("geometry", e))?;

        let b = self.beam;
        s.beam.w0 = positive("beam.w0", b.w0, s.beam.w0)?;
        s.beam.wavelength = positive("beam.wavelength", b.wavelength, s.beam.wavelength)?;
        s.beam.eta = positive("beam.eta", b.eta, s.beam.eta)?;

        let i = self.irs;
        s.irs.l_x = positive("irs.l_x", i.l_x, s.irs.l_x)?;
        s.irs.l_y = positive("irs.l_y", i.l_y, s.irs.l_y)?;
        s.irs.phi0 = i.phi0.unwrap_or(0.0);
        if !s.irs.phi0.is_finite() {
            return Err(Error::config("irs.phi0", "must be finite"));
        }
        s.irs.zeta = i.zeta.map(|z| positive("irs.zeta", Some(z), 1.0)).transpose()?;
        s.irs.elements = match (i.q_x, i.q_y) {
            (Some(x), Some(y)) => Some((x, y)),
            (None, None) => None,
            _ => return Err(Error::config("irs.q_x", "give both q_x and q_y")),
        };

        let l = self.link;
        s.symbol_period = match (l.w_fso_hz, l.symbol_period_s) {
            (Some(_), Some(_)) => {
                return Err(Error::config("link.w_fso_hz", "give only one of w_fso_hz and symbol_period_s"))
            }
            (Some(w), None) => 1.0 / positive("link.w_fso_hz", Some(w), 1.0)?,
            (None, Some(t)) => positive("link.symbol_period_s", Some(t), 1.0)?,
            (None, None) => s.symbol_period,
        };
        s.n0 = match (l.n0_dbm_per_mhz, l.n0_w_per_hz) {
            (Some(_), Some(_)) => {
                return Err(Error::config("link.n0_dbm_per_mhz", "give only one of n0_dbm_per_mhz and n0_w_per_hz"))
            }
            (Some(d), None) => {
                if !d.is_finite() {
                    return Err(Error::config("link.n0_dbm_per_mhz", "must be finite"));
                }
                dbm_per_mhz_to_w_per_hz(d)
            }
            (None, Some(w)) => positive("link.n0_w_per_hz", Some(w), 1.0)?,
            (None, None) => s.n0,
        };
        s.power = match (l.p0_w, l.p0_mw, l.gamma_t_db) {
            (None, None, None) => s.power,
            (Some(p), None, None) => PowerSpec::P0(positive("link.p0_w", Some(p), 1.0)?),
            (None, Some(p), None) => PowerSpec::P0(positive("link.p0_mw", Some(p), 1.0)? * 1e-3),
            (None, None, Some(g)) => {
                if !g.is_finite() {
                    return Err(Error::config("link.gamma_t_db", "must be finite"));
                }
                PowerSpec::GammaTDb(g)
            }
            _ => {
                return Err(Error::config(
                    "link.p0_w",
                    "give exactly one of p0_w, p0_mw and gamma_t_db",
                ))
            }
        };
        s.scale = positive("link.scale", l.scale, 1.0)?;
        s.beam.p0 = s.resolved_power().0;

        let m = self.sim;
        s.n_bits = m.n_bits.unwrap_or(s.n_bits);
        if s.n_bits < MIN_CONFIG_BITS {
            return Err(Error::config("sim.n_bits", format!("must be >= {MIN_CONFIG_BITS}")));
        }
        s.target_errors = m.target_errors.unwrap_or(s.target_errors);
        if s.target_errors == 0 {
            return Err(Error::config("sim.target_errors", "must be >= 1"));
        }
        s.seed = m.seed.unwrap_or(s.seed);
        if let Some(e) = m.equalizers {
            s.equalizers = EqualizerKind::parse_list(&e).map_err(|e| Error::config("sim.equalizers", e.to_string()))?;
        }
        if let Some(method) = m.method {
            cfg.method = method.parse().map_err(|e: Error| Error::config("sim.method", e.to_string()))?;
        }
        if let Some(sweep) = m.gamma_t_db_sweep {
            if sweep.iter().any(|g| !g.is_finite()) {
                return Err(Error::config("sim.gamma_t_db_sweep", "values must be finite"));
            }
            s.gamma_t_db_sweep = sweep;
        }
        let grid = match (m.theta_grid_rad, m.theta_grid_deg) {
            (Some(_), Some(_)) => {
                return Err(Error::config("sim.theta_grid", "give only one of theta_grid_rad and theta_grid_deg"))
            }
            (Some(r), None) => Some(r),
            (None, Some(d)) => Some(d.into_iter().map(f64::to_radians).collect()),
            (None, None) => None,
        };
        if let Some(grid) = grid {
            if grid.is_empty() {
                return Err(Error::config("sim.theta_grid", "must not be empty"));
            }
            if let Some(bad) = grid.iter().find(|&&t| !(t > 0.0 && t <= std::f64::consts::FRAC_PI_2)) {
                return Err(Error::config("sim.theta_grid", format!("{bad} rad outside (0, pi/2]")));
            }
            s.theta_grid = grid;
        }
        let d = EqualizerLengths::default();
        s.lengths = EqualizerLengths {
            n_eq: m.n_eq.unwrap_or(d.n_eq),
            n_ff: m.n_ff.unwrap_or(d.n_ff),
            n_fb: m.n_fb,
        };
        if s.lengths.n_eq == 0 {
            return Err(Error::config("sim.n_eq", "must be >= 1"));
        }
        if s.lengths.n_ff == 0 {
            return Err(Error::config("sim.n_ff", "must be >= 1"));
        }
        s.beam.validate().map_err(|e| in_section("beam", e))?;
        s.irs.validate(s.beam.wavelength).map_err(|e| in_section("irs", e))?;
        Ok(cfg)
    }
}

/// Parses a TOML document. The empty document gives the evaluation defaults.
pub fn parse_config_str(text: &str) -> Result<Config> {
    let raw: RawConfig = toml::from_str(text).map_err(|e| {
        let path = e
            .span()
            .map(|sp| format!("byte {}", sp.start))
            .unwrap_or_else(|| "document".into());
        Error::config(path, e.message().to_string())
    })?;
    raw.resolve()
}

pub fn parse_config(path: &Path) -> Result<Config> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
    parse_config_str(&text)
}

/// The resolved configuration as TOML with every field explicit (angles in rad).
pub fn echo_config(cfg: &Config) -> String {
    let s = &cfg.sim;
    let g = &s.geometry;
    let (p0_w, gamma_t_db) = match s.power {
        PowerSpec::P0(p) => (Some(p), None),
        PowerSpec::GammaTDb(db) => (None, Some(db)),
    };
    let raw = RawConfig {
        geometry: RawGeometry {
            d_l: Some(g.d_l),
            d_p: Some(g.d_p),
            theta_l_rad: Some(g.theta_l),
            phi_l_rad: Some(g.phi_l),
            theta_p_rad: Some(g.theta_p),
            phi_p_rad: Some(g.phi_p),
            lens_radius: Some(g.lens_radius),
            v_l: Some(g.v_l),
            ..RawGeometry::default()
        },
        beam: RawBeam {
            w0: Some(s.beam.w0),
            wavelength: Some(s.beam.wavelength),
            eta: Some(s.beam.eta),
        },
        irs: RawIrs {
            l_x: Some(s.irs.l_x),
            l_y: Some(s.irs.l_y),
            phi0: Some(s.irs.phi0),
            zeta: s.irs.zeta,
            q_x: s.irs.elements.map(|e| e.0),
            q_y: s.irs.elements.map(|e| e.1),
        },
        link: RawLink {
            symbol_period_s: Some(s.symbol_period),
            n0_w_per_hz: Some(s.n0),
            p0_w,
            gamma_t_db,
            scale: Some(s.scale),
            ..RawLink::default()
        },
        sim: RawSim {
            n_bits: Some(s.n_bits),
            target_errors: Some(s.target_errors),
            seed: Some(s.seed),
            equalizers: Some(
                s.equalizers
                    .iter()
                    .map(|k| k.name())
                    .collect::<Vec<_>>()
                    .join(","),
            ),
            method: Some(cfg.method.name().to_string()),
            gamma_t_db_sweep: Some(s.gamma_t_db_sweep.clone()),
            theta_grid_rad: Some(s.theta_grid.clone()),
            theta_grid_deg: None,
            n_eq: Some(s.lengths.n_eq),
            n_ff: Some(s.lengths.n_ff),
            n_fb: s.lengths.n_fb,
        },
    };
    toml::to_string(&raw).expect("config serializes")
}
