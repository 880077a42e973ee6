//! Large-k expansions of radial integrands as finite sums of
//! `c k^{-p} exp(i omega k)` terms, with a power-law envelope bounding the
//! truncation remainder. Tails beyond a cutoff integrate term by term.

use num_complex::Complex64;

use crate::error::Result;
use crate::special::{hankel_coefficient, oscillatory_tail};

/// Frequencies closer than this to zero are treated as exactly zero.
pub const OMEGA_SNAP: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Wave {
    pub coef: Complex64,
    pub power: f64,
    pub omega: f64,
}

/// `sum_i coef_i k^{-power_i} exp(i omega_i k)` plus a remainder bounded by
/// `sum_j m_j k^{-q_j}` for k beyond the cutoff of interest.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct WaveSeries {
    pub waves: Vec<Wave>,
    pub envelope: Vec<(f64, f64)>,
}

impl WaveSeries {
    pub fn single(coef: Complex64, power: f64, omega: f64) -> Self {
        Self { waves: vec![Wave { coef, power, omega }], envelope: Vec::new() }
    }

    pub fn constant(c: f64) -> Self {
        Self::single(Complex64::new(c, 0.0), 0.0, 0.0)
    }

    /// `exp(i omega k)`.
    pub fn phase(omega: f64) -> Self {
        Self::single(Complex64::new(1.0, 0.0), 0.0, omega)
    }

    /// `sin(a k) / k^p`.
    pub fn sine(a: f64, p: f64) -> Self {
        let c = Complex64::new(0.0, -0.5);
        let mut s = Self::single(c, p, a);
        s.waves.push(Wave { coef: -c, power: p, omega: -a });
        s.merged()
    }

    /// `cos(a k) / k^p`.
    pub fn cosine(a: f64, p: f64) -> Self {
        let c = Complex64::new(0.5, 0.0);
        let mut s = Self::single(c, p, a);
        s.waves.push(Wave { coef: c, power: p, omega: -a });
        s.merged()
    }

    /// Hankel expansion of `J_nu(r k)` for `r > 0`, truncated after `terms`
    /// terms, with the first omitted term (doubled) as envelope.
    pub fn bessel_j(nu: f64, r: f64, terms: usize) -> Self {
        let amp = (2.0 / (std::f64::consts::PI * r)).sqrt();
        let phi = nu * std::f64::consts::FRAC_PI_2 + std::f64::consts::FRAC_PI_4;
        let up = Complex64::from_polar(0.5 * amp, -phi);
        let down = up.conj();
        let i = Complex64::new(0.0, 1.0);
        let mut waves = Vec::with_capacity(2 * terms);
        for m in 0..terms {
            let a = hankel_coefficient(nu, m) / r.powi(m as i32);
            if a == 0.0 {
                continue;
            }
            let im = i.powi(m as i32);
            let p = 0.5 + m as f64;
            waves.push(Wave { coef: up * im * a, power: p, omega: r });
            waves.push(Wave { coef: down * im.conj() * a, power: p, omega: -r });
        }
        let omitted = hankel_coefficient(nu, terms).abs() / r.powi(terms as i32);
        Self { waves, envelope: vec![(2.0 * amp * omitted, 0.5 + terms as f64)] }.merged()
    }

    pub fn is_zero(&self) -> bool {
        self.waves.is_empty() && self.envelope.is_empty()
    }

    pub fn scale(mut self, c: Complex64) -> Self {
        for w in &mut self.waves {
            w.coef *= c;
        }
        for e in &mut self.envelope {
            e.0 *= c.norm();
        }
        self
    }

    pub fn plus(mut self, other: &Self) -> Self {
        self.waves.extend_from_slice(&other.waves);
        self.envelope.extend_from_slice(&other.envelope);
        self.merged()
    }

    pub fn minus(self, other: &Self) -> Self {
        self.plus(&other.clone().scale(Complex64::new(-1.0, 0.0)))
    }

    /// Multiplies by `k^{-p}`.
    pub fn shift_power(mut self, p: f64) -> Self {
        for w in &mut self.waves {
            w.power += p;
        }
        for e in &mut self.envelope {
            e.1 += p;
        }
        self
    }

    fn modulus_envelope(&self) -> Vec<(f64, f64)> {
        self.waves.iter().map(|w| (w.coef.norm(), w.power)).collect()
    }

    pub fn mul(&self, other: &Self) -> Self {
        let mut waves = Vec::with_capacity(self.waves.len() * other.waves.len());
        for a in &self.waves {
            for b in &other.waves {
                waves.push(Wave {
                    coef: a.coef * b.coef,
                    power: a.power + b.power,
                    omega: a.omega + b.omega,
                });
            }
        }
        let mut envelope = Vec::new();
        let ma = self.modulus_envelope();
        let mb = other.modulus_envelope();
        for (x, y) in [(&ma, &other.envelope), (&self.envelope, &mb), (&self.envelope, &other.envelope)] {
            for a in x.iter() {
                for b in y.iter() {
                    envelope.push((a.0 * b.0, a.1 + b.1));
                }
            }
        }
        Self { waves, envelope }.merged()
    }

    /// Combines terms with equal power and (snapped) frequency, drops zero
    /// terms and sorts deterministically.
    pub fn merged(mut self) -> Self {
        for w in &mut self.waves {
            if w.omega.abs() < OMEGA_SNAP {
                w.omega = 0.0;
            }
        }
        self.waves.sort_by(|a, b| a.power.total_cmp(&b.power).then(a.omega.total_cmp(&b.omega)));
        let mut out: Vec<Wave> = Vec::with_capacity(self.waves.len());
        for w in self.waves {
            match out.last_mut() {
                Some(last) if last.power == w.power && (last.omega - w.omega).abs() < OMEGA_SNAP => {
                    last.coef += w.coef
                }
                _ => out.push(w),
            }
        }
        let scale = out.iter().map(|w| w.coef.norm()).fold(0.0, f64::max);
        out.retain(|w| w.coef.norm() > 1e-15 * scale);
        self.envelope.sort_by(|a, b| a.1.total_cmp(&b.1));
        let mut env: Vec<(f64, f64)> = Vec::with_capacity(self.envelope.len());
        for e in self.envelope {
            match env.last_mut() {
                Some(last) if last.1 == e.1 => last.0 += e.0,
                _ => env.push(e),
            }
        }
        Self { waves: out, envelope: env }
    }

    pub fn eval(&self, k: f64) -> Complex64 {
        self.waves
            .iter()
            .map(|w| w.coef * k.powf(-w.power) * Complex64::from_polar(1.0, w.omega * k))
            .sum()
    }

    pub fn envelope_at(&self, k: f64) -> f64 {
        self.envelope.iter().map(|&(m, q)| m * k.powf(-q)).sum()
    }

    /// Smallest nonzero |omega| among the waves.
    pub fn min_frequency(&self) -> Option<f64> {
        self.waves
            .iter()
            .map(|w| w.omega.abs())
            .filter(|&w| w > 0.0)
            .min_by(|a, b| a.total_cmp(b))
    }

    pub fn max_frequency(&self) -> f64 {
        self.waves.iter().map(|w| w.omega.abs()).fold(0.0, f64::max)
    }

    /// `int_K^inf` of the series and a bound on the neglected remainder.
    pub fn tail_integral(&self, cutoff: f64) -> Result<(Complex64, f64)> {
        let mut sum = crate::quadrature::CompensatedSum::default();
        for w in &self.waves {
            sum.add(w.coef * oscillatory_tail(w.power, w.omega, cutoff)?);
        }
        let mut bound = 0.0;
        for &(m, q) in &self.envelope {
            bound += if q > 1.0 { m * cutoff.powf(1.0 - q) / (q - 1.0) } else { f64::INFINITY };
        }
        Ok((sum.value(), bound))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::special::{bessel_j0, bessel_j1};

    #[test]
    fn trig_series_are_exact() {
        let s = WaveSeries::sine(1.3, 2.0);
        let c = WaveSeries::cosine(0.7, 0.0);
        for k in [0.5, 3.0, 17.0] {
            assert!((s.eval(k).re - (1.3 * k).sin() / (k * k)).abs() < 1e-15);
            assert!(s.eval(k).im.abs() < 1e-15);
            assert!((c.eval(k).re - (0.7 * k).cos()).abs() < 1e-15);
        }
    }

    #[test]
    fn hankel_series_tracks_bessel() {
        let j0 = WaveSeries::bessel_j(0.0, 1.5, 8);
        let j1 = WaveSeries::bessel_j(1.0, 0.9, 8);
        for k in [40.0, 100.0, 333.3] {
            let a = j0.eval(k);
            let b = j1.eval(k);
            assert!((a.re - bessel_j0(1.5 * k)).abs() <= j0.envelope_at(k) + 1e-16);
            assert!((b.re - bessel_j1(0.9 * k)).abs() <= j1.envelope_at(k) + 1e-16);
            assert!(a.im.abs() < 1e-16 && b.im.abs() < 1e-16);
        }
    }

    #[test]
    fn product_merges_cancelling_frequencies() {
        let p = WaveSeries::phase(2.0).mul(&WaveSeries::phase(-2.0));
        assert_eq!(p.waves.len(), 1);
        assert_eq!(p.waves[0].omega, 0.0);
        let s = WaveSeries::sine(1.0, 0.0).mul(&WaveSeries::sine(1.0, 0.0));
        // sin^2 = 1/2 - cos(2k)/2
        for k in [0.3, 2.0] {
            assert!((s.eval(k).re - (k.sin()).powi(2)).abs() < 1e-15);
        }
    }

    #[test]
    fn tail_of_exact_series() {
        // int_K^inf sin(k)/k^2 dk against direct tail formula
        let s = WaveSeries::sine(1.0, 2.0);
        let (t, bound) = s.tail_integral(50.0).unwrap();
        let want = (crate::special::oscillatory_tail(2.0, 1.0, 50.0).unwrap()).im;
        assert!((t.re - want).abs() < 1e-17);
        assert_eq!(bound, 0.0);
    }
}
