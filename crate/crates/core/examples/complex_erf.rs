use irs_fso::special::{complex_erf, faddeeva, gaussian_integral};
use num_complex::Complex64;

fn main() {
    for z in [
        Complex64::new(0.5, 0.0),
        Complex64::new(1.0, 1.0),
        Complex64::new(-2.0, 0.3),
        Complex64::new(3.0, -4.0),
        Complex64::new(0.0, 5.0),
    ] {
        println!("erf({z}) = {:.12}", complex_erf(z));
    }
    // w(z) stays finite where erf would overflow
    println!("w(30 + 30i) = {:.6e}", faddeeva(Complex64::new(30.0, 30.0)));
    let p = Complex64::new(2.0, 1.0);
    let q = Complex64::new(0.3, -0.2);
    println!("int exp(-p x^2 - q x) dx = {:.12}", gaussian_integral(p, q));
}
