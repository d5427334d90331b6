//! Scaled complementary error function and the `W(n, m)` kernel.
//!
//! `erfcx(z) = exp(z^2) erfc(z)` is evaluated through the Faddeeva function
//! `w(z) = exp(-z^2) erfc(-iz)` using `erfcx(z) = w(iz)`. The Faddeeva
//! evaluation follows Poppe and Wijers (ACM TOMS 680): a power series near
//! the origin, a Taylor-corrected Laplace continued fraction in the middle
//! region and a plain continued fraction far out.

use num_complex::Complex64;

const TWO_OVER_SQRT_PI: f64 = 1.128_379_167_095_512_6;
const FRAC_1_SQRT_PI: f64 = 0.564_189_583_547_756_3;

/// Largest argument for which `exp` stays finite.
const MAX_EXP_ARG: f64 = 709.782_712_893_384;
/// Beyond this the phase `cos/sin(2xy)` has lost all accuracy.
const MAX_PHASE_ARG: f64 = 5.3e7;

/// Result of [`erfcx_flagged`]. `saturated` is set when the true value
/// overflows `f64`; `value` is then infinite (with the correct quadrant).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Erfcx {
    pub value: Complex64,
    pub saturated: bool,
}

/// Faddeeva function `w(z)`, with an overflow flag.
pub fn faddeeva_flagged(z: Complex64) -> (Complex64, bool) {
    let (xi, yi) = (z.re, z.im);
    if !(xi.is_finite() && yi.is_finite()) {
        return (Complex64::new(f64::NAN, f64::NAN), false);
    }
    let xabs = xi.abs();
    let yabs = yi.abs();

    // Very far out the continued fraction collapses to its first term; this
    // also keeps `qrho` below from overflowing.
    if xabs > 1e7 || yabs > 1e7 {
        let zq = Complex64::new(xabs, yabs);
        let w = Complex64::i() * FRAC_1_SQRT_PI / zq;
        return finish_quadrant(w.re, w.im, xi, yi, xabs, yabs, None);
    }

    let x = xabs / 6.3;
    let y = yabs / 4.4;
    let mut qrho = x * x + y * y;
    let xquad = xabs * xabs - yabs * yabs;
    let yquad = 2.0 * xabs * yabs;

    let (mut u, v);
    let inner = qrho < 0.085_264;
    let mut reflect_base = None;

    if inner {
        // Power series for erf-like sum, then multiply by exp(-z^2).
        qrho = (1.0 - 0.85 * y) * qrho.sqrt();
        let n = (6.0 + 72.0 * qrho).round() as i32;
        let mut j = 2 * n + 1;
        let mut xsum = 1.0 / j as f64;
        let mut ysum = 0.0;
        for i in (1..=n).rev() {
            j -= 2;
            let fi = i as f64;
            let xaux = (xsum * xquad - ysum * yquad) / fi;
            ysum = (xsum * yquad + ysum * xquad) / fi;
            xsum = xaux + 1.0 / j as f64;
        }
        let u1 = -TWO_OVER_SQRT_PI * (xsum * yabs + ysum * xabs) + 1.0;
        let v1 = TWO_OVER_SQRT_PI * (xsum * xabs - ysum * yabs);
        let daux = (-xquad).exp();
        let u2 = daux * yquad.cos();
        let v2 = -daux * yquad.sin();
        u = u1 * u2 - v1 * v2;
        v = u1 * v2 + v1 * u2;
        reflect_base = Some((2.0 * u2, 2.0 * v2));
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
        let (mut rx, mut ry, mut sx, mut sy) = (0.0f64, 0.0f64, 0.0f64, 0.0f64);
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
    finish_quadrant(u, v, xi, yi, xabs, yabs, reflect_base)
}

/// Map the first-quadrant value back to the quadrant of `(xi, yi)`.
/// Lower half plane: `w(z) = 2 exp(-z^2) - w(-z)`.
fn finish_quadrant(
    mut u: f64,
    mut v: f64,
    xi: f64,
    yi: f64,
    xabs: f64,
    yabs: f64,
    reflect_base: Option<(f64, f64)>,
) -> (Complex64, bool) {
    if yi < 0.0 {
        let (u2, v2) = match reflect_base {
            Some(b) => b,
            None => {
                let xquad = yabs * yabs - xabs * xabs;
                let yquad = 2.0 * xabs * yabs;
                if xquad > MAX_EXP_ARG || (yquad > MAX_PHASE_ARG && xquad > -MAX_EXP_ARG) {
                    let re = if u.is_sign_negative() { -f64::INFINITY } else { f64::INFINITY };
                    let mut out = Complex64::new(re, f64::INFINITY);
                    if xi > 0.0 {
                        out.im = -out.im;
                    }
                    return (out, true);
                }
                let w1 = 2.0 * xquad.exp();
                (w1 * yquad.cos(), -w1 * yquad.sin())
            }
        };
        u = u2 - u;
        v = v2 - v;
        if xi > 0.0 {
            v = -v;
        }
    } else if xi < 0.0 {
        v = -v;
    }
    (Complex64::new(u, v), false)
}

/// Faddeeva function `w(z) = exp(-z^2) erfc(-iz)`.
pub fn faddeeva(z: Complex64) -> Complex64 {
    faddeeva_flagged(z).0
}

/// `erfcx(z) = exp(z^2) erfc(z)` with an overflow flag.
///
/// Overflow happens only for large negative real part, roughly
/// `Re(z)^2 - Im(z)^2 > 709.78`; there `value` is infinite and `saturated`
/// is set.
pub fn erfcx_flagged(z: Complex64) -> Erfcx {
    let (value, saturated) = faddeeva_flagged(Complex64::new(-z.im, z.re));
    let saturated = saturated || !(value.re.is_finite() && value.im.is_finite());
    Erfcx { value, saturated }
}

/// `erfcx(z) = exp(z^2) erfc(z)`.
pub fn erfcx(z: Complex64) -> Complex64 {
    erfcx_flagged(z).value
}

/// Real `erfcx(x)`; infinite below about `x = -26.64`.
pub fn erfcx_real(x: f64) -> f64 {
    erfcx(Complex64::new(x, 0.0)).re
}

/// Real complementary error function.
pub fn erfc(x: f64) -> f64 {
    if x.is_nan() {
        return f64::NAN;
    }
    if x >= 0.0 {
        if x > 27.3 {
            return 0.0;
        }
        (-x * x).exp() * erfcx_real(x)
    } else {
        2.0 - erfc(-x)
    }
}

/// Real error function; Maclaurin series near zero keeps relative accuracy.
pub fn erf(x: f64) -> f64 {
    if x.abs() < 0.5 {
        let x2 = x * x;
        let mut term = x;
        let mut sum = x;
        let mut k = 0.0f64;
        loop {
            k += 1.0;
            term *= -x2 / k;
            let add = term / (2.0 * k + 1.0);
            sum += add;
            if add.abs() < 1e-17 * sum.abs() {
                break;
            }
        }
        TWO_OVER_SQRT_PI * sum
    } else if x > 0.0 {
        1.0 - erfc(x)
    } else {
        erfc(-x) - 1.0
    }
}

/// `W(n, m) = exp(2nm + m^2) erfc(n + m)`.
pub fn wfun(n: Complex64, m: Complex64) -> Complex64 {
    wfun_damped(n, m, 0.0)
}

/// `exp(-decay) * W(n, m)`, folding the damping into the exponentials so the
/// product stays finite when `W` alone would overflow.
///
/// Uses `W = exp(-n^2) erfcx(n + m)` when `Re(n + m) >= 0` and the reflection
/// `erfc(z) = 2 - erfc(-z)` otherwise.
pub fn wfun_damped(n: Complex64, m: Complex64, decay: f64) -> Complex64 {
    let z = n + m;
    if z.re >= 0.0 {
        (-n * n - decay).exp() * erfcx(z)
    } else {
        2.0 * (2.0 * n * m + m * m - decay).exp() - (-n * n - decay).exp() * erfcx(-z)
    }
}

/// Real form of [`wfun_damped`].
pub fn wfun_damped_real(n: f64, m: f64, decay: f64) -> f64 {
    wfun_damped(Complex64::new(n, 0.0), Complex64::new(m, 0.0), decay).re
}

/// `dW/dm = 2(n + m) W(n, m) - (2/sqrt(pi)) exp(-n^2)`.
pub fn wfun_dm(n: Complex64, m: Complex64) -> Complex64 {
    2.0 * (n + m) * wfun(n, m) - TWO_OVER_SQRT_PI * (-n * n).exp()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn erfcx_at_zero_is_one() {
        assert_eq!(erfcx(Complex64::new(0.0, 0.0)), Complex64::new(1.0, 0.0));
    }

    #[test]
    fn erf_is_odd_and_small_argument_accurate() {
        assert_eq!(erf(-0.3), -erf(0.3));
        let x = 1e-10;
        assert!((erf(x) / (TWO_OVER_SQRT_PI * x) - 1.0).abs() < 1e-15);
    }

    #[test]
    fn erfc_large_argument_underflows_to_zero() {
        assert_eq!(erfc(40.0), 0.0);
        assert_eq!(erfc(-40.0), 2.0);
    }

    #[test]
    fn saturation_is_flagged() {
        let r = erfcx_flagged(Complex64::new(-30.0, 0.0));
        assert!(r.saturated);
        assert!(r.value.re.is_infinite());
        assert!(!erfcx_flagged(Complex64::new(-26.0, 0.0)).saturated);
    }
}
