//! Faddeeva function and complex error function.
//!
//! `w(z) = exp(-z^2) erfc(-i z)` follows Algorithm 680 (Poppe and Wijers):
//! a Taylor series near the origin and a truncated Gautschi continued fraction
//! elsewhere, with reflection into the first quadrant.

use std::f64::consts::PI;

use num_complex::Complex64;

const TWO_OVER_SQRT_PI: f64 = 1.128_379_167_095_512_6;

/// Below this modulus `erf` is summed directly from its Maclaurin series.
const ERF_SERIES_RADIUS: f64 = 2.0;

/// Faddeeva function `w(z)`.
///
/// Accurate to about 1e-13 relative in the upper half plane. In the lower half
/// plane `w` grows like `exp(y^2 - x^2)` and overflows for large `|y|`.
pub fn faddeeva(z: Complex64) -> Complex64 {
    let (xi, yi) = (z.re, z.im);
    let xabs = xi.abs();
    let yabs = yi.abs();
    let x = xabs / 6.3;
    let y = yabs / 4.4;
    let mut qrho = x * x + y * y;
    let xquad0 = xabs * xabs - yabs * yabs;
    let yquad = 2.0 * xabs * yabs;

    let series = qrho < 0.085_264;
    let (mut u, mut v);
    let (mut u2, mut v2) = (0.0, 0.0);
    if series {
        qrho = (1.0 - 0.85 * y) * qrho.sqrt();
        let n = (6.0 + 72.0 * qrho).round() as i32;
        let mut j = 2 * n + 1;
        let mut xsum = 1.0 / j as f64;
        let mut ysum = 0.0;
        for i in (1..=n).rev() {
            j -= 2;
            let fi = i as f64;
            let xaux = (xsum * xquad0 - ysum * yquad) / fi;
            ysum = (xsum * yquad + ysum * xquad0) / fi;
            xsum = xaux + 1.0 / j as f64;
        }
        let u1 = -TWO_OVER_SQRT_PI * (xsum * yabs + ysum * xabs) + 1.0;
        let v1 = TWO_OVER_SQRT_PI * (xsum * xabs - ysum * yabs);
        let daux = (-xquad0).exp();
        u2 = daux * yquad.cos();
        v2 = -daux * yquad.sin();
        u = u1 * u2 - v1 * v2;
        v = u1 * v2 + v1 * u2;
    } else {
        let (h, kapn, nu);
        if qrho > 1.0 {
            h = 0.0;
            kapn = 0;
            qrho = qrho.sqrt();
            nu = (3.0 + 1442.0 / (26.0 * qrho + 77.0)) as i32;
        } else {
            qrho = (1.0 - y) * (1.0 - qrho).sqrt();
            h = 1.88 * qrho;
            kapn = (7.0 + 34.0 * qrho).round() as i32;
            nu = (16.0 + 26.0 * qrho).round() as i32;
        }
        let h2 = 2.0 * h;
        let mut qlambda = if h > 0.0 { h2.powi(kapn) } else { 0.0 };
        let (mut rx, mut ry, mut sx, mut sy) = (0.0, 0.0, 0.0, 0.0);
        for n in (0..=nu).rev() {
            let np1 = (n + 1) as f64;
            let tx = yabs + h + np1 * rx;
            let ty = xabs - np1 * ry;
            let c = 0.5 / (tx * tx + ty * ty);
            rx = c * tx;
            ry = c * ty;
            if h > 0.0 && n <= kapn {
                let tx = qlambda + sx;
                sx = rx * tx - ry * sy;
                sy = ry * tx + rx * sy;
                qlambda /= h2;
            }
        }
        if h == 0.0 {
            u = TWO_OVER_SQRT_PI * rx;
            v = TWO_OVER_SQRT_PI * ry;
        } else {
            u = TWO_OVER_SQRT_PI * sx;
            v = TWO_OVER_SQRT_PI * sy;
        }
        if yabs == 0.0 {
            u = (-xabs * xabs).exp();
        }
    }

    if yi < 0.0 {
        if series {
            u2 *= 2.0;
            v2 *= 2.0;
        } else {
            let w1 = 2.0 * (-xquad0).exp();
            u2 = w1 * yquad.cos();
            v2 = -w1 * yquad.sin();
        }
        u = u2 - u;
        v = v2 - v;
        if xi > 0.0 {
            v = -v;
        }
    } else if xi < 0.0 {
        v = -v;
    }
    Complex64::new(u, v)
}

/// Error function of a complex argument.
pub fn complex_erf(z: Complex64) -> Complex64 {
    if z.norm() < ERF_SERIES_RADIUS {
        return erf_series(z);
    }
    if z.re < 0.0 {
        return -complex_erf(-z);
    }
    Complex64::new(1.0, 0.0) - (-z * z).exp() * faddeeva(Complex64::i() * z)
}

/// `erfc(z) = 1 - erf(z)`.
pub fn complex_erfc(z: Complex64) -> Complex64 {
    if z.re >= 0.0 && z.norm() >= ERF_SERIES_RADIUS {
        (-z * z).exp() * faddeeva(Complex64::i() * z)
    } else {
        Complex64::new(1.0, 0.0) - complex_erf(z)
    }
}

fn erf_series(z: Complex64) -> Complex64 {
    // erf(z) = 2/sqrt(pi) sum_n (-1)^n z^(2n+1) / (n! (2n+1))
    let z2 = z * z;
    let mut term = z;
    let mut sum = z;
    for n in 1..200 {
        term *= -z2 / n as f64;
        let add = term / (2 * n + 1) as f64;
        sum += add;
        if add.norm() <= 1e-17 * sum.norm() {
            break;
        }
    }
    sum * TWO_OVER_SQRT_PI
}

/// Real error function, through the complex routine.
pub fn erf(x: f64) -> f64 {
    complex_erf(Complex64::new(x, 0.0)).re
}

/// Gaussian tail `Q(x) = erfc(x / sqrt 2) / 2`.
pub fn q_function(x: f64) -> f64 {
    0.5 * complex_erfc(Complex64::new(x / std::f64::consts::SQRT_2, 0.0)).re
}

/// `int_{-inf}^{inf} exp(-p^2 x^2 - q x) dx = sqrt(pi) / p * exp(q^2 / (4 p^2))`, `Re p^2 > 0`.
pub fn gaussian_integral(p: Complex64, q: Complex64) -> Complex64 {
    (q * q / (4.0 * p * p)).exp() * PI.sqrt() / p
}
