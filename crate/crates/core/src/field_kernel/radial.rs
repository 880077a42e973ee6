//! One-dimensional radial integrals
//! `C_d int_0^inf k^{d-2} A_d(k delta) prod rho_i(k) exp(-i k tau) (ik)^n dk`
//! with `A_3 = sin(x)/x`, `A_2 = J0(x)`, `C_3 = 1/(4 pi^2)`, `C_2 = 1/(4 pi)`.
//!
//! The head `[0, K]` is integrated adaptively. Beyond `K` algebraically
//! decaying integrands are replaced by their wave expansion and integrated
//! exactly; Gaussian factors make the tail negligible instead.

use std::f64::consts::PI;

use num_complex::Complex64;

use super::KernelOptions;
use crate::asymptotic::WaveSeries;
use crate::error::{Error, Result};
use crate::quadrature::{integrate, QuadOptions};
use crate::smearing::{ft_asymptotics, radial_ft, Dimension, RadialSmearing, SmearingKind};
use crate::special::bessel_j0;

/// `-ln` of the relative size at which a Gaussian tail is dropped.
const GAUSSIAN_DECADES: f64 = 46.0;
/// Hankel expansions are used only for arguments at least this large.
const HANKEL_MIN_ARG: f64 = 40.0;
const MAX_PANELS: usize = 400_000;

pub(crate) struct RadialProblem<'a> {
    pub dim: Dimension,
    pub delta: f64,
    pub tau: f64,
    pub factors: Vec<&'a RadialSmearing>,
}

pub(crate) fn normalization(dim: Dimension) -> f64 {
    match dim {
        Dimension::Three => 1.0 / (4.0 * PI * PI),
        Dimension::Two => 1.0 / (4.0 * PI),
    }
}

impl RadialProblem<'_> {
    fn gaussian_variance(&self) -> f64 {
        self.factors
            .iter()
            .map(|s| match s.kind() {
                SmearingKind::Gaussian { sigma } => sigma * sigma,
                SmearingKind::HardShell { .. } => 0.0,
            })
            .sum()
    }

    fn max_frequency(&self) -> f64 {
        self.tau.abs()
            + self.delta
            + self.factors.iter().map(|s| s.support_radius().unwrap_or(0.0)).sum::<f64>()
    }

    /// Spatial separation below which the angular kernel takes its limit.
    fn delta_is_zero(&self, cutoff: f64) -> bool {
        self.delta * cutoff < 1e-8
    }

    fn kernel(&self, k: f64, zero_delta: bool) -> f64 {
        match self.dim {
            Dimension::Three => {
                if zero_delta {
                    k
                } else {
                    (k * self.delta).sin() / self.delta
                }
            }
            Dimension::Two => {
                if zero_delta {
                    1.0
                } else {
                    bessel_j0(k * self.delta)
                }
            }
        }
    }

    fn kernel_series(&self, zero_delta: bool, terms: usize) -> WaveSeries {
        match (self.dim, zero_delta) {
            (Dimension::Three, true) => WaveSeries::single(Complex64::new(1.0, 0.0), -1.0, 0.0),
            (Dimension::Three, false) => {
                WaveSeries::sine(self.delta, 0.0).scale(Complex64::new(1.0 / self.delta, 0.0))
            }
            (Dimension::Two, true) => WaveSeries::constant(1.0),
            (Dimension::Two, false) => WaveSeries::bessel_j(0.0, self.delta, terms),
        }
    }

    /// Shortest length entering a Hankel expansion (two dimensions only).
    fn min_hankel_length(&self, zero_delta: bool) -> Option<f64> {
        if self.dim != Dimension::Two {
            return None;
        }
        let mut lengths: Vec<f64> = Vec::new();
        if !zero_delta {
            lengths.push(self.delta);
        }
        for s in &self.factors {
            if let SmearingKind::HardShell { r_inner, r_outer } = s.kind() {
                lengths.push(r_outer);
                if r_inner > 0.0 {
                    lengths.push(r_inner);
                }
            }
        }
        lengths.into_iter().min_by(|a, b| a.total_cmp(b))
    }

    /// Integrates the value (`N = 1`) or the value and its `(ik)` weighted
    /// companion (`N = 2`). Returns the values and a total error bound.
    pub fn integrate<const N: usize>(&self, opts: &KernelOptions) -> Result<([Complex64; N], f64)> {
        for s in &self.factors {
            s.require_field()?;
        }
        let c = normalization(self.dim);
        let var = self.gaussian_variance();
        let omega_max = self.max_frequency();

        let (cutoff, tail, zero_delta) = if var > 0.0 {
            let cutoff = (2.0 * GAUSSIAN_DECADES / var).sqrt();
            (cutoff, None, self.delta_is_zero(cutoff))
        } else {
            // Provisional cutoff decides whether the kernel limit applies.
            let zero_delta = self.delta_is_zero(opts.max_cutoff) || self.delta == 0.0;
            let mut series = self.kernel_series(zero_delta, opts.hankel_terms);
            for s in &self.factors {
                let f = ft_asymptotics(s, opts.hankel_terms)?.expect("hard shell has an expansion");
                series = series.mul(&f);
            }
            series = series.mul(&WaveSeries::phase(-self.tau)).scale(Complex64::new(c, 0.0));
            let mut cutoff: f64 = 10.0;
            if let Some(w) = series.min_frequency() {
                cutoff = cutoff.max(8.0 / w);
            }
            if let Some(l) = self.min_hankel_length(zero_delta) {
                cutoff = cutoff.max(HANKEL_MIN_ARG / l);
            }
            (cutoff.min(opts.max_cutoff), Some(series), zero_delta)
        };

        let integrand = |k: f64| -> [Complex64; N] {
            let mut v = c * self.kernel(k, zero_delta);
            for s in &self.factors {
                v *= radial_ft(s, k).unwrap_or(f64::NAN);
            }
            let base = Complex64::from_polar(v, -k * self.tau);
            let mut out = [base; N];
            if N > 1 {
                out[1] = base * Complex64::new(0.0, k);
            }
            out
        };

        let panels = ((cutoff * omega_max.max(1.0) / PI).ceil() as usize + 2).min(MAX_PANELS);
        let quad = QuadOptions {
            rel_tol: opts.rel_tol,
            abs_tol: 1e-300,
            max_intervals: opts.max_intervals.max(2 * panels),
        };
        let head = integrate(integrand, 0.0, cutoff, panels, &quad)?;
        let mut values = head.value;
        let mut error = head.error;
        if values.iter().any(|v| !v.re.is_finite() || !v.im.is_finite()) {
            return Err(Error::Quadrature { what: "radial integrand is not finite".into(), estimate: f64::NAN });
        }

        match tail {
            Some(series) => {
                for (n, value) in values.iter_mut().enumerate() {
                    let s = if n == 0 {
                        series.clone()
                    } else {
                        series.clone().shift_power(-(n as f64)).scale(Complex64::new(0.0, 1.0).powi(n as i32))
                    };
                    let (t, bound) = s.tail_integral(cutoff).map_err(|e| match e {
                        Error::Quadrature { what, .. } => Error::Quadrature {
                            what: format!("{what} (tail beyond k = {cutoff})"),
                            estimate: f64::INFINITY,
                        },
                        other => other,
                    })?;
                    *value += t;
                    error += bound + 1e-15 * t.norm();
                }
            }
            None => {
                // Gaussian tail: int_K^inf exp(-a k^2) ~ exp(-a K^2) / (2 a K)
                let edge = integrand(cutoff);
                let width = 1.0 / (var * cutoff);
                for (n, e) in edge.iter().enumerate() {
                    error += e.norm() * width * (1.0 + n as f64);
                }
            }
        }
        if !error.is_finite() {
            return Err(Error::Quadrature { what: "tail bound diverges".into(), estimate: error });
        }
        Ok((values, error))
    }
}
