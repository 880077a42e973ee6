//! Second route to the radial integrals, used to cross-check the main
//! engine: a smooth polynomial window over `[K, 2K]` replaces the analytic
//! tail, uniform panel doubling replaces adaptive bisection, and Richardson
//! extrapolation over `K, 2K, 4K, ...` removes the algebraic window error.

use std::f64::consts::PI;

use num_complex::Complex64;

use super::radial::normalization;
use super::KernelValue;
use crate::error::{Error, Result};
use crate::generator::Generator;
use crate::quadrature::composite;
use crate::smearing::{distance, radial_ft, Dimension, RadialSmearing, SmearingKind};
use crate::special::bessel_j0;

const WINDOW_ORDER: usize = 8;
const EXPONENTS: [f64; 4] = [2.0, 3.0, 4.0, 5.0];

fn binomial(n: usize, k: usize) -> f64 {
    (0..k).fold(1.0, |acc, i| acc * (n - i) as f64 / (i + 1) as f64)
}

/// Smooth step from 1 (x <= 1) to 0 (x >= 2) with `WINDOW_ORDER` vanishing
/// derivatives at both ends.
fn window(x: f64) -> f64 {
    if x <= 1.0 {
        return 1.0;
    }
    if x >= 2.0 {
        return 0.0;
    }
    let t = x - 1.0;
    let n = WINDOW_ORDER;
    let mut s = 0.0;
    for j in 0..=n {
        s += binomial(n + j, j) * binomial(2 * n + 1, n - j) * (-t).powi(j as i32);
    }
    1.0 - t.powi(n as i32 + 1) * s
}

struct Setup<'a> {
    dim: Dimension,
    delta: f64,
    tau: f64,
    factors: Vec<&'a RadialSmearing>,
    derivative: bool,
}

impl Setup<'_> {
    fn integrand(&self, k: f64) -> Complex64 {
        let kernel = match self.dim {
            Dimension::Three if self.delta == 0.0 => k,
            Dimension::Three => (k * self.delta).sin() / self.delta,
            Dimension::Two if self.delta == 0.0 => 1.0,
            Dimension::Two => bessel_j0(k * self.delta),
        };
        let mut v = normalization(self.dim) * kernel;
        for s in &self.factors {
            v *= radial_ft(s, k).unwrap_or(f64::NAN);
        }
        let z = Complex64::new(0.0, -k * self.tau).exp() * v;
        if self.derivative {
            z * Complex64::new(0.0, k)
        } else {
            z
        }
    }

    /// Every `|tau| +- delta +- radii` combination; the smallest nonzero one
    /// sets how far the window must sit to kill oscillatory leakage.
    fn frequencies(&self) -> (f64, f64) {
        let mut freqs = vec![-self.tau];
        let mut lengths = vec![self.delta];
        for s in &self.factors {
            if let SmearingKind::HardShell { r_inner, r_outer } = s.kind() {
                lengths.push(if r_inner > 0.0 { r_inner.min(r_outer) } else { r_outer });
                lengths.push(r_outer);
            }
        }
        // each smearing contributes one of its radii with either sign
        let mut radii_sets: Vec<Vec<f64>> = vec![vec![self.delta]];
        for s in &self.factors {
            if let SmearingKind::HardShell { r_inner, r_outer } = s.kind() {
                let mut v = vec![r_outer];
                if r_inner > 0.0 {
                    v.push(r_inner);
                }
                radii_sets.push(v);
            }
        }
        for set in radii_sets {
            let mut next = Vec::new();
            for f in &freqs {
                for r in &set {
                    next.push(f + r);
                    next.push(f - r);
                }
            }
            freqs = next;
        }
        let min = freqs.iter().map(|f| f.abs()).filter(|&f| f > 1e-9).fold(f64::INFINITY, f64::min);
        let max = freqs.iter().map(|f| f.abs()).fold(0.0, f64::max) + lengths.iter().sum::<f64>();
        (min, max)
    }

    /// Uniform panel doubling until two successive results agree.
    fn windowed(&self, cutoff: f64, omega_max: f64, windowed: bool) -> Result<Complex64> {
        let upper = if windowed { 2.0 * cutoff } else { cutoff };
        let f = |k: f64| {
            let w = if windowed { window(k / cutoff) } else { 1.0 };
            [self.integrand(k) * w]
        };
        let mut panels = ((upper * omega_max.max(1.0) / PI).ceil() as usize).max(8);
        let mut prev = composite(f, 0.0, upper, panels);
        for _ in 0..6 {
            panels *= 2;
            let next = composite(f, 0.0, upper, panels);
            let diff = (next.value[0] - prev.value[0]).norm();
            if diff <= 1e-13 * next.l1[0].max(1e-300) {
                return Ok(next.value[0]);
            }
            prev = next;
        }
        Err(Error::Quadrature { what: "oracle panel doubling".into(), estimate: f64::NAN })
    }

    fn evaluate(&self) -> Result<KernelValue> {
        for s in &self.factors {
            s.require_field()?;
        }
        let var: f64 = self
            .factors
            .iter()
            .map(|s| match s.kind() {
                SmearingKind::Gaussian { sigma } => sigma * sigma,
                _ => 0.0,
            })
            .sum();
        let (omega_min, omega_max) = self.frequencies();
        if var > 0.0 {
            let cutoff = (2.0 * 50.0 / var).sqrt();
            let v = self.windowed(cutoff, omega_max, false)?;
            return Ok(KernelValue { value: v, error: 1e-13 * v.norm() });
        }
        let base = (100.0 / omega_min).clamp(20.0, 4000.0);
        let levels = EXPONENTS.len() + 1;
        let values: Vec<Complex64> = (0..levels)
            .map(|j| self.windowed(base * f64::powi(2.0, j as i32), omega_max, true))
            .collect::<Result<_>>()?;
        let extrapolated = richardson(&values, &EXPONENTS);
        let reduced = richardson(&values[..levels - 1], &EXPONENTS[..EXPONENTS.len() - 1]);
        Ok(KernelValue { value: extrapolated, error: (extrapolated - reduced).norm() })
    }
}

/// Solves `V_j = S + sum_e c_e 2^{-j e}` for `S`.
fn richardson(values: &[Complex64], exponents: &[f64]) -> Complex64 {
    let n = values.len();
    assert_eq!(n, exponents.len() + 1);
    let mut a = vec![vec![0.0; n]; n];
    let mut rhs: Vec<Complex64> = values.to_vec();
    for (j, row) in a.iter_mut().enumerate() {
        row[0] = 1.0;
        for (e, &p) in exponents.iter().enumerate() {
            row[e + 1] = f64::powf(2.0, -(j as f64) * p);
        }
    }
    for col in 0..n {
        let pivot = (col..n).max_by(|&x, &y| a[x][col].abs().total_cmp(&a[y][col].abs())).unwrap();
        a.swap(col, pivot);
        rhs.swap(col, pivot);
        for row in col + 1..n {
            let factor = a[row][col] / a[col][col];
            for c in col..n {
                a[row][c] -= factor * a[col][c];
            }
            let r = rhs[col] * factor;
            rhs[row] -= r;
        }
    }
    let mut x = vec![Complex64::new(0.0, 0.0); n];
    for row in (0..n).rev() {
        let mut s = rhs[row];
        for c in row + 1..n {
            s -= x[c] * a[row][c];
        }
        x[row] = s / a[row][row];
    }
    x[0]
}

/// Independent evaluation of `pairing(gi, gj)`.
pub fn pairing_oracle(gi: &Generator, gj: &Generator) -> Result<KernelValue> {
    if gi.dimension() != gj.dimension() {
        return Err(Error::Config("generators live in different dimensions".into()));
    }
    Setup {
        dim: gi.dimension(),
        delta: distance(gi.smearing.center(), gj.smearing.center()),
        tau: gi.time - gj.time,
        factors: vec![&gi.smearing, &gj.smearing],
        derivative: false,
    }
    .evaluate()
}

/// Independent evaluation of `mode_function` (or its time derivative).
pub fn mode_function_oracle(gen: &Generator, t: f64, x: &[f64], derivative: bool) -> Result<KernelValue> {
    Setup {
        dim: gen.dimension(),
        delta: distance(x, gen.smearing.center()),
        tau: gen.time - t,
        factors: vec![&gen.smearing],
        derivative,
    }
    .evaluate()
}
