//! Delay-spread and comparison metrics on sampled CIRs.

use super::Cir;
use crate::error::{Error, Result};

/// Width between the first and last crossing of half the peak, linearly
/// interpolated between samples.
pub fn effective_delay_spread_3db(cir: &Cir) -> Result<f64> {
    if cir.len() < 3 {
        return Err(Error::invalid("cir", "need at least 3 samples"));
    }
    let peak = cir.peak();
    if peak <= 0.0 {
        return Err(Error::EmptyCir);
    }
    let half = 0.5 * peak;
    let (t, h) = (&cir.t_grid, &cir.h);
    let first = h.iter().position(|&v| v >= half).expect("peak exists");
    let last = h.iter().rposition(|&v| v >= half).expect("peak exists");
    let cross = |i: usize, j: usize| {
        // crossing between samples i (below) and j (at or above)
        let (hi, hj) = (h[i], h[j]);
        t[i] + (half - hi) / (hj - hi) * (t[j] - t[i])
    };
    let left = if first == 0 { t[0] } else { cross(first - 1, first) };
    let right = if last + 1 == h.len() { t[last] } else { cross(last + 1, last) };
    Ok(right - left)
}

/// `||a - b||_2 / ||b||_2` over samples on a shared grid.
pub fn l2_relative_error(a: &Cir, b: &Cir) -> f64 {
    assert_eq!(a.len(), b.len(), "CIRs must share a grid");
    let num: f64 = a.h.iter().zip(&b.h).map(|(x, y)| (x - y).powi(2)).sum();
    let den: f64 = b.h.iter().map(|y| y * y).sum();
    (num / den).sqrt()
}

/// RMS delay spread `sqrt(E[t^2] - E[t]^2)` with `h` as the weight.
pub fn rms_delay_spread(cir: &Cir) -> Result<f64> {
    let w: f64 = cir.h.iter().sum();
    if w <= 0.0 {
        return Err(Error::EmptyCir);
    }
    let m1: f64 = cir.t_grid.iter().zip(&cir.h).map(|(t, h)| t * h).sum::<f64>() / w;
    let m2: f64 = cir.t_grid.iter().zip(&cir.h).map(|(t, h)| t * t * h).sum::<f64>() / w;
    Ok((m2 - m1 * m1).max(0.0).sqrt())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cir::{symmetric_grid, CirMethod};

    fn gaussian(c: f64) -> Cir {
        let s = 6.0 / c.sqrt();
        Cir::from_fn(CirMethod::Corollary1, 0.0, symmetric_grid(s, 4001, 1.0), |t| (-c * t * t).exp())
    }

    #[test]
    fn gaussian_half_width() {
        let c = 3.7e18;
        let w = effective_delay_spread_3db(&gaussian(c)).unwrap();
        let exact = 2.0 * (std::f64::consts::LN_2 / c).sqrt();
        assert!((w / exact - 1.0).abs() < 1e-5, "{w} vs {exact}");
        let rms = rms_delay_spread(&gaussian(c)).unwrap();
        assert!((rms / (1.0 / (2.0 * c).sqrt()) - 1.0).abs() < 1e-6);
    }

    #[test]
    fn empty_cir_errors() {
        let c = Cir::from_fn(CirMethod::Corollary1, 0.0, symmetric_grid(1.0, 11, 1.0), |_| 0.0);
        assert_eq!(effective_delay_spread_3db(&c), Err(Error::EmptyCir));
    }

    #[test]
    fn l2_error_of_identical_is_zero() {
        let g = gaussian(1.0);
        assert_eq!(l2_relative_error(&g, &g), 0.0);
    }
}
