//! Special functions used by the field kernels: Bessel J0/J1, the Dawson
//! integral, Hankel asymptotic coefficients and the generalized exponential
//! integral `E_p(z)` for complex argument.

use num_complex::Complex64;

use crate::error::{Error, Result};

const FRAC_2_PI: f64 = std::f64::consts::FRAC_2_PI;

/// Above this argument J0/J1 switch from Miller's recurrence to the Hankel
/// expansion. The smallest Hankel term there is about `exp(-2x)`.
const HANKEL_THRESHOLD: f64 = 25.0;

/// Bessel function of the first kind of order zero.
pub fn bessel_j0(x: f64) -> f64 {
    bessel_j01(x).0
}

/// Bessel function of the first kind of order one.
pub fn bessel_j1(x: f64) -> f64 {
    bessel_j01(x).1
}

/// `J1(x) / x`, finite at the origin where it tends to 1/2.
pub fn bessel_j1_over_x(x: f64) -> f64 {
    let ax = x.abs();
    if ax < 1.0 {
        // J1(x)/x = 1/2 sum (-1)^m (x/2)^{2m} / (m! (m+1)!)
        let y = 0.25 * x * x;
        let mut term = 0.5;
        let mut sum = term;
        for m in 1..30 {
            term *= -y / (m as f64 * (m + 1) as f64);
            sum += term;
            if term.abs() < 1e-18 * sum.abs() {
                break;
            }
        }
        sum
    } else {
        bessel_j1(ax) / ax
    }
}

/// Returns `(J0(x), J1(x))`.
///
/// Power series below 1, Miller's backward recurrence normalised by
/// `J0 + 2 sum J_2k = 1` up to [`HANKEL_THRESHOLD`], Hankel's asymptotic
/// expansion beyond. Absolute error is at the 1e-16 level everywhere.
pub fn bessel_j01(x: f64) -> (f64, f64) {
    let ax = x.abs();
    let sign1 = if x < 0.0 { -1.0 } else { 1.0 };
    let (j0, j1) = if ax < 1.0 {
        series_j01(ax)
    } else if ax <= HANKEL_THRESHOLD {
        miller_j01(ax)
    } else {
        hankel_j01(ax)
    };
    (j0, sign1 * j1)
}

fn series_j01(x: f64) -> (f64, f64) {
    let y = 0.25 * x * x;
    let mut t0 = 1.0;
    let mut s0 = 1.0;
    let mut t1 = 0.5 * x;
    let mut s1 = t1;
    for m in 1..30 {
        let mf = m as f64;
        t0 *= -y / (mf * mf);
        t1 *= -y / (mf * (mf + 1.0));
        s0 += t0;
        s1 += t1;
        if t0.abs() < 1e-18 && t1.abs() < 1e-18 {
            break;
        }
    }
    (s0, s1)
}

fn miller_j01(x: f64) -> (f64, f64) {
    // Start well above x; the start-value error is below J_m(x)^2.
    let start = 2 * (((1.5 * x) as usize + 30) / 2);
    let two_over_x = 2.0 / x;
    let mut j_next = 0.0; // J_{n+1}
    let mut j_curr = 1e-30; // J_n
    let mut norm = 0.0;
    let mut n = start;
    while n > 0 {
        let j_prev = n as f64 * two_over_x * j_curr - j_next;
        j_next = j_curr;
        j_curr = j_prev;
        n -= 1;
        if n % 2 == 0 && n > 0 {
            norm += 2.0 * j_curr;
        }
        if j_curr.abs() > 1e250 {
            j_curr *= 1e-250;
            j_next *= 1e-250;
            norm *= 1e-250;
        }
    }
    norm += j_curr;
    (j_curr / norm, j_next / norm)
}

/// Hankel coefficient `a_k(nu) = prod_{j=1..k} (4 nu^2 - (2j-1)^2) / (k! 8^k)`.
pub fn hankel_coefficient(nu: f64, k: usize) -> f64 {
    let mu = 4.0 * nu * nu;
    let mut a = 1.0;
    for j in 1..=k {
        let odd = (2 * j - 1) as f64;
        a *= (mu - odd * odd) / (j as f64 * 8.0);
    }
    a
}

/// Sums `P(nu, x)` and `Q(nu, x)` of the Hankel expansion.
fn hankel_pq(nu: f64, x: f64) -> (f64, f64) {
    let mu = 4.0 * nu * nu;
    let mut p = 1.0;
    let mut q = 0.0;
    let mut term = 1.0;
    let mut last = f64::INFINITY;
    for k in 1..200 {
        let odd = (2 * k - 1) as f64;
        term *= (mu - odd * odd) / (k as f64 * 8.0 * x);
        if term.abs() >= last || term == 0.0 {
            break;
        }
        last = term.abs();
        // terms alternate between Q (odd k) and P (even k) with signs
        // +, -, -, +, +, -, ... for P: (-1)^{k/2}; Q: (-1)^{(k-1)/2}
        match k % 4 {
            1 => q += term,
            2 => p -= term,
            3 => q -= term,
            _ => p += term,
        }
        if term.abs() < 1e-17 {
            break;
        }
    }
    (p, q)
}

fn hankel_j01(x: f64) -> (f64, f64) {
    let (s, c) = x.sin_cos();
    let amp = (FRAC_2_PI / x).sqrt();
    let r = std::f64::consts::FRAC_1_SQRT_2;
    // chi0 = x - pi/4, chi1 = x - 3pi/4, expanded to avoid reducing pi
    let (cos0, sin0) = (r * (c + s), r * (s - c));
    let (cos1, sin1) = (r * (s - c), -r * (s + c));
    let (p0, q0) = hankel_pq(0.0, x);
    let (p1, q1) = hankel_pq(1.0, x);
    (
        amp * (p0 * cos0 - q0 * sin0),
        amp * (p1 * cos1 - q1 * sin1),
    )
}

/// Dawson's integral `F(x) = exp(-x^2) int_0^x exp(t^2) dt`.
///
/// The positive-term series `F(x) = exp(-x^2) sum x^{2n+1} / (n! (2n+1))`
/// is used below 6.5 and the asymptotic series `1/(2x) sum (2n-1)!!/(2x^2)^n`
/// above, where its smallest term is below 1e-18.
pub fn dawson(x: f64) -> f64 {
    let ax = x.abs();
    let sign = if x < 0.0 { -1.0 } else { 1.0 };
    if ax == 0.0 {
        return 0.0;
    }
    if ax < 6.5 {
        let x2 = ax * ax;
        let mut power = ax; // x^{2n+1} / n!
        let mut sum = ax;
        let mut n = 0.0;
        loop {
            n += 1.0;
            power *= x2 / n;
            let term = power / (2.0 * n + 1.0);
            sum += term;
            if term < 1e-17 * sum {
                break;
            }
        }
        sign * (-x2).exp() * sum
    } else {
        let inv = 1.0 / (2.0 * ax * ax);
        let mut term = 1.0;
        let mut sum = 1.0;
        let mut n = 0.0;
        loop {
            n += 1.0;
            let next = term * (2.0 * n - 1.0) * inv;
            if next >= term || next < 1e-18 {
                if next < term {
                    sum += next;
                }
                break;
            }
            term = next;
            sum += term;
        }
        sign * sum / (2.0 * ax)
    }
}

/// Generalized exponential integral `E_p(z) = int_1^inf exp(-z t) t^{-p} dt`
/// by Lentz's evaluation of its continued fraction. Intended for
/// `Re z >= 0` and `|z|` of order one or larger; on the imaginary axis the
/// value is the conditionally convergent integral for `p > 0` and its
/// Abel limit for `p <= 0`.
pub fn expint(p: f64, z: Complex64) -> Result<Complex64> {
    const TINY: f64 = 1e-300;
    const EPS: f64 = 1e-16;
    let mut b = z + p;
    let mut c = Complex64::new(1.0 / TINY, 0.0);
    let mut d = b.inv();
    let mut h = d;
    for i in 1..20_000 {
        let fi = i as f64;
        let an = -fi * (p - 1.0 + fi);
        b += 2.0;
        d = an * d + b;
        if d.norm() < TINY {
            d = Complex64::new(TINY, 0.0);
        }
        c = b + an / c;
        if c.norm() < TINY {
            c = Complex64::new(TINY, 0.0);
        }
        d = d.inv();
        let del = c * d;
        h *= del;
        if (del - 1.0).norm() < EPS {
            return Ok(h * (-z).exp());
        }
    }
    Err(Error::Quadrature {
        what: format!("continued fraction for E_{p}({z})"),
        estimate: f64::NAN,
    })
}

/// `int_K^inf k^{-p} exp(i omega k) dk` for `K > 0`. Requires `p > 1` when
/// `omega == 0`. For oscillatory tails with `p <= 0` the integral is taken
/// in the Abel sense (limit of `exp(-eps k)` damping).
pub fn oscillatory_tail(p: f64, omega: f64, cutoff: f64) -> Result<Complex64> {
    if omega == 0.0 {
        if p <= 1.0 {
            return Err(Error::Quadrature {
                what: format!("non-oscillatory tail k^-{p} diverges"),
                estimate: f64::INFINITY,
            });
        }
        return Ok(Complex64::new(cutoff.powf(1.0 - p) / (p - 1.0), 0.0));
    }
    if p <= -8.0 {
        return Err(Error::Quadrature {
            what: format!("oscillatory tail k^{} grows too fast", -p),
            estimate: f64::INFINITY,
        });
    }
    let z = Complex64::new(0.0, -omega * cutoff);
    Ok(cutoff.powf(1.0 - p) * expint(p, z)?)
}

#[cfg(test)]
mod tests {
    use super::*;

    // Reference values from mpmath at 40 digits.
    const BESSEL: &[(f64, f64, f64)] = &[
        (0.0, 1.0, 0.0),
        (0.001, 0.999_999_750_000_015_6, 0.000_499_999_937_500_002_6),
        (0.5, 0.938_469_807_240_812_9, 0.242_268_457_674_873_9),
        (1.0, 0.765_197_686_557_966_6, 0.440_050_585_744_933_5),
        (2.404825557695773, -6.108_765_259_736_73e-17, 0.519_147_497_289_466_7),
        (3.0, -0.260_051_954_901_933_45, 0.339_058_958_525_936_5),
        (7.5, 0.266_339_657_880_378_4, 0.135_248_427_579_705_5),
        (10.0, -0.245_935_764_451_348_35, 0.043_472_746_168_861_44),
        (24.9, 0.083_245_968_353_015_5, -0.134_855_699_531_408_86),
        (25.1, 0.108_275_671_499_949_45, -0.114_634_784_134_422_57),
        (40.0, 0.007_366_890_584_237_29, 0.126_038_318_037_585),
        (123.456, -0.071_030_062_418_370_69, -0.010_839_584_856_520_649),
        (1000.0, 0.024_786_686_152_420_176, 0.004_728_311_907_089_524),
    ];

    const DAWSON: &[(f64, f64)] = &[
        (0.0, 0.0),
        (0.0001, 0.000_099_999_999_333_333_35),
        (0.3, 0.282_631_665_021_311_93),
        (1.0, 0.538_079_506_912_768_4),
        (2.0, 0.301_340_388_923_791_95),
        (3.5, 0.149_621_593_080_756_48),
        (5.0, 0.102_134_074_424_276_84),
        (6.4, 0.079_115_935_911_133_46),
        (6.6, 0.076_658_970_228_914_31),
        (10.0, 0.050_253_847_187_598_53),
        (50.0, 0.010_002_001_201_201_684),
        (10000.0, 0.000_050_000_000_25),
    ];

    #[test]
    fn bessel_matches_reference() {
        for &(x, j0, j1) in BESSEL {
            let (a, b) = bessel_j01(x);
            assert!((a - j0).abs() <= 2e-16 + 1e-14 * j0.abs(), "J0({x}) = {a}, want {j0}");
            assert!((b - j1).abs() <= 2e-16 + 1e-14 * j1.abs(), "J1({x}) = {b}, want {j1}");
        }
    }

    #[test]
    fn bessel_parity_and_ratio() {
        assert_eq!(bessel_j0(-3.0), bessel_j0(3.0));
        assert_eq!(bessel_j1(-3.0), -bessel_j1(3.0));
        assert!((bessel_j1_over_x(0.0) - 0.5).abs() < 1e-18);
        for x in [0.2, 0.99, 1.01, 5.0, 30.0] {
            let r = bessel_j1_over_x(x);
            assert!((r - bessel_j1(x) / x).abs() < 1e-15, "{x}");
        }
    }

    #[test]
    fn bessel_continuous_across_branches() {
        for x0 in [1.0, HANKEL_THRESHOLD] {
            let (a0, a1) = bessel_j01(x0 * (1.0 - 1e-12));
            let (b0, b1) = bessel_j01(x0 * (1.0 + 1e-12));
            // values are 2e-12 x apart, slopes are below one
            let tol = 2e-12 * x0 + 1e-14;
            assert!((a0 - b0).abs() < tol, "J0 jump at {x0}");
            assert!((a1 - b1).abs() < tol, "J1 jump at {x0}");
        }
    }

    #[test]
    fn dawson_matches_reference() {
        for &(x, f) in DAWSON {
            let v = dawson(x);
            assert!((v - f).abs() <= 1e-14 * f.abs().max(1e-300), "F({x}) = {v}, want {f}");
            assert_eq!(dawson(-x), -v);
        }
    }

    #[test]
    fn tail_integrals_match_reference() {
        let cases = [
            (3.0, 0.1, 400.0, -1.232_870_215_380_816e-7, -9.481_628_059_532_814e-8),
            (2.0, -0.7, 100.0, -0.000_107_842_300_960_360_87, -0.000_093_514_884_153_407_54),
            (4.5, 2.0, 50.0, 6.152_224_369_696_142e-9, 9.475_111_485_525_432e-9),
            (1.0, 3.0, 20.0, 0.004_813_243_377_443_216, -0.015_949_289_465_050_79),
            (3.5, -0.1, 600.0, 4.693_146_039_270_022e-10, 1.825_676_595_438_288_8e-9),
        ];
        for (p, w, k, re, im) in cases {
            let v = oscillatory_tail(p, w, k).unwrap();
            let want = Complex64::new(re, im);
            assert!((v - want).norm() <= 1e-13 * want.norm(), "p={p} w={w}: {v} vs {want}");
        }
        let v = oscillatory_tail(3.0, 0.0, 10.0).unwrap();
        assert!((v.re - 0.005).abs() < 1e-18);
        assert!(oscillatory_tail(1.0, 0.0, 10.0).is_err());
        // Abel limits for non-decaying amplitudes
        let (w, k) = (1.3, 10.0);
        let phase = Complex64::new(0.0, w * k).exp();
        let v = oscillatory_tail(0.0, w, k).unwrap();
        assert!((v - Complex64::new(0.0, 1.0 / w) * phase).norm() < 1e-14);
        let v = oscillatory_tail(-1.0, w, k).unwrap();
        assert!((v - Complex64::new(-1.0 / (w * w), k / w) * phase).norm() < 1e-13);
    }

    #[test]
    fn hankel_coefficients() {
        assert_eq!(hankel_coefficient(0.0, 0), 1.0);
        assert!((hankel_coefficient(0.0, 1) + 1.0 / 8.0).abs() < 1e-18);
        assert!((hankel_coefficient(1.0, 1) - 3.0 / 8.0).abs() < 1e-18);
        assert!((hankel_coefficient(1.0, 2) + 15.0 / 128.0).abs() < 1e-18);
    }
}
