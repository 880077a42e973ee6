//! Vacuum pairings `S_ij = <0|O_i O_j|0>` and mode functions `I(t, x)` of a
//! massless scalar field, reduced to radial wavenumber integrals.

mod radial;
pub mod oracle;

use std::f64::consts::PI;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::generator::Generator;
use crate::smearing::{distance, Dimension, RadialSmearing, SmearingKind};
use crate::special::dawson;
use radial::RadialProblem;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct KernelOptions {
    /// Head quadrature tolerance relative to the integral of `|integrand|`.
    pub rel_tol: f64,
    /// Use the Dawson closed form for Gaussian smearings in three dimensions.
    pub gaussian_closed_form: bool,
    /// Terms kept in Hankel expansions of `J0`/`J1`.
    pub hankel_terms: usize,
    /// Largest allowed split point between quadrature and analytic tail.
    pub max_cutoff: f64,
    pub max_intervals: usize,
}

impl Default for KernelOptions {
    fn default() -> Self {
        Self {
            rel_tol: 1e-13,
            gaussian_closed_form: true,
            hankel_terms: 8,
            max_cutoff: 2e5,
            max_intervals: 2_000_000,
        }
    }
}

impl KernelOptions {
    /// Same options, quadrature only.
    pub fn quadrature_only(self) -> Self {
        Self { gaussian_closed_form: false, ..self }
    }
}

/// A complex kernel value with its achieved error bound.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct KernelValue {
    pub value: Complex64,
    pub error: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PairingMatrix {
    n: usize,
    dimension: Dimension,
    entries: Vec<Complex64>,
    errors: Vec<f64>,
}

impl PairingMatrix {
    pub fn size(&self) -> usize {
        self.n
    }

    pub fn dimension(&self) -> Dimension {
        self.dimension
    }

    pub fn get(&self, i: usize, j: usize) -> Complex64 {
        self.entries[i * self.n + j]
    }

    pub fn error(&self, i: usize, j: usize) -> f64 {
        self.errors[i * self.n + j]
    }

    pub fn max_error(&self) -> f64 {
        self.errors.iter().cloned().fold(0.0, f64::max)
    }

    /// Largest `|S_ij - conj(S_ji)|`.
    pub fn hermiticity_residual(&self) -> f64 {
        let mut worst: f64 = 0.0;
        for i in 0..self.n {
            for j in 0..self.n {
                worst = worst.max((self.get(i, j) - self.get(j, i).conj()).norm());
            }
        }
        worst
    }

    /// Builds a matrix from explicit entries, e.g. for algebraic tests.
    pub fn from_entries(dimension: Dimension, n: usize, entries: Vec<Complex64>) -> Result<Self> {
        if entries.len() != n * n {
            return Err(Error::Config(format!("expected {} entries, got {}", n * n, entries.len())));
        }
        Ok(Self { n, dimension, entries, errors: vec![0.0; n * n] })
    }

    /// Hermitian part `(S + S^dagger)/2`, used once the residual is checked.
    pub fn hermitized(&self) -> Self {
        let mut out = self.clone();
        for i in 0..self.n {
            for j in 0..self.n {
                out.entries[i * self.n + j] = 0.5 * (self.get(i, j) + self.get(j, i).conj());
            }
        }
        out
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ModeFunctionSample {
    pub value: Complex64,
    pub error: f64,
    pub t: f64,
    pub x: Vec<f64>,
    pub source: Option<usize>,
}

fn same_dimension(a: &Generator, b: &Generator) -> Result<Dimension> {
    if a.dimension() != b.dimension() {
        return Err(Error::Config("generators live in different dimensions".into()));
    }
    Ok(a.dimension())
}

fn gaussian_sigma(s: &RadialSmearing) -> Option<f64> {
    match s.kind() {
        SmearingKind::Gaussian { sigma } => Some(sigma),
        SmearingKind::HardShell { .. } => None,
    }
}

/// `S_ij = int d^dk / ((2 pi)^d 2|k|) exp(-i|k|(t_i - t_j)) v_i(k) conj(v_j(k))`.
pub fn pairing(gi: &Generator, gj: &Generator, opts: &KernelOptions) -> Result<KernelValue> {
    let dim = same_dimension(gi, gj)?;
    gi.smearing.require_field()?;
    gj.smearing.require_field()?;
    let delta = distance(gi.smearing.center(), gj.smearing.center());
    let tau = gi.time - gj.time;
    if dim == Dimension::Three && opts.gaussian_closed_form {
        if let (Some(si), Some(sj)) = (gaussian_sigma(&gi.smearing), gaussian_sigma(&gj.smearing)) {
            let var = si * si + sj * sj;
            let pref = ((2.0 * PI * si * si) * (2.0 * PI * sj * sj) / (2.0 * PI * var)).powf(1.5);
            let (v, _) = gaussian3_closed(var.sqrt(), tau, delta);
            return Ok(KernelValue { value: v * pref, error: 1e-14 * (v * pref).norm() });
        }
    }
    let problem = RadialProblem { dim, delta, tau, factors: vec![&gi.smearing, &gj.smearing] };
    let ([value], error) = problem.integrate::<1>(opts)?;
    Ok(KernelValue { value, error })
}

/// All pairings of a generator list. Every entry, including the lower
/// triangle, is computed independently so Hermiticity is a genuine check.
pub fn pairing_matrix(generators: &[Generator], opts: &KernelOptions) -> Result<PairingMatrix> {
    let n = generators.len();
    if n == 0 {
        return Err(Error::Config("at least one generator is required".into()));
    }
    let dimension = generators[0].dimension();
    for g in generators {
        if g.dimension() != dimension {
            return Err(Error::Config("generators live in different dimensions".into()));
        }
    }
    let values: Vec<KernelValue> = (0..n * n)
        .into_par_iter()
        .map(|idx| pairing(&generators[idx / n], &generators[idx % n], opts))
        .collect::<Result<_>>()?;
    Ok(PairingMatrix {
        n,
        dimension,
        entries: values.iter().map(|v| v.value).collect(),
        errors: values.iter().map(|v| v.error).collect(),
    })
}

/// `I(t, x) = int d^dk / ((2 pi)^d 2|k|) exp(-i|k|(t0 - t)) exp(-i k.x) v(k)`
/// together with its time derivative.
pub fn mode_function_pair(
    gen: &Generator,
    t: f64,
    x: &[f64],
    opts: &KernelOptions,
) -> Result<(ModeFunctionSample, ModeFunctionSample)> {
    gen.smearing.require_field()?;
    if x.len() != gen.smearing.center().len() {
        return Err(Error::Config("evaluation point has the wrong dimension".into()));
    }
    let delta = distance(x, gen.smearing.center());
    let tau = gen.time - t;
    let ((v, dv), (e, de)) = match (gen.dimension(), gaussian_sigma(&gen.smearing)) {
        (Dimension::Three, Some(sigma)) if opts.gaussian_closed_form => {
            let (v, dtau) = gaussian3_closed(sigma, tau, delta);
            // d/dt = -d/dtau
            ((v, -dtau), (1e-14 * v.norm(), 1e-14 * dtau.norm()))
        }
        (dim, _) => {
            let problem = RadialProblem { dim, delta, tau, factors: vec![&gen.smearing] };
            let ([v, dv], err) = problem.integrate::<2>(opts)?;
            ((v, dv), (err, err))
        }
    };
    let sample = |value, error| ModeFunctionSample { value, error, t, x: x.to_vec(), source: None };
    Ok((sample(v, e), sample(dv, de)))
}

pub fn mode_function(gen: &Generator, t: f64, x: &[f64], opts: &KernelOptions) -> Result<ModeFunctionSample> {
    Ok(mode_function_pair(gen, t, x, opts)?.0)
}

/// `d/dt I(t, x)`, by differentiating under the integral sign.
pub fn mode_function_dt(gen: &Generator, t: f64, x: &[f64], opts: &KernelOptions) -> Result<ModeFunctionSample> {
    Ok(mode_function_pair(gen, t, x, opts)?.1)
}

/// `I` and `dI/dtau` for the normalized Gaussian `(2 pi s^2)^{3/2} exp(-s^2 k^2/2)`
/// in three dimensions, `tau = t0 - t`, `r = |x - x0|`, via Dawson's `F`.
pub fn gaussian3_closed(sigma: f64, tau: f64, r: f64) -> (Complex64, Complex64) {
    let s = std::f64::consts::SQRT_2 * sigma;
    let sqrt_pi = PI.sqrt();
    let y = tau / s;
    let eps = r / s;
    let s2 = sigma * sigma;
    if eps > 1e-3 {
        let (u, w) = (y - eps, y + eps);
        let (fu, fw) = (dawson(u), dawson(w));
        let (gu, gw) = ((-u * u).exp(), (-w * w).exp());
        let d1 = |x: f64, f: f64| 1.0 - 2.0 * x * f;
        let value = Complex64::new(-s2 / (2.0 * sqrt_pi * r) * (fu - fw), -s2 / (4.0 * r) * (gu - gw));
        let deriv = Complex64::new(
            -s2 / (2.0 * sqrt_pi * r * s) * (d1(u, fu) - d1(w, fw)),
            -s2 / (4.0 * r * s) * (-2.0 * u * gu + 2.0 * w * gw),
        );
        (value, deriv)
    } else {
        // h(y - eps) - h(y + eps) = -2 eps h' - eps^3/3 h''' + O(eps^5)
        let f0 = dawson(y);
        let f1 = 1.0 - 2.0 * y * f0;
        let f2 = -2.0 * f0 - 2.0 * y * f1;
        let f3 = -4.0 * f1 - 2.0 * y * f2;
        let f4 = -6.0 * f2 - 2.0 * y * f3;
        let g = (-y * y).exp();
        let y2 = y * y;
        let g1 = -2.0 * y * g;
        let g2 = (4.0 * y2 - 2.0) * g;
        let g3 = (-8.0 * y2 * y + 12.0 * y) * g;
        let g4 = (16.0 * y2 * y2 - 48.0 * y2 + 12.0) * g;
        let e2 = eps * eps / 3.0;
        let value = Complex64::new(
            s2 / (2.0 * sqrt_pi * s) * (2.0 * f1 + e2 * f3),
            s2 / (4.0 * s) * (2.0 * g1 + e2 * g3),
        );
        let deriv = Complex64::new(
            s2 / (2.0 * sqrt_pi * s * s) * (2.0 * f2 + e2 * f4),
            s2 / (4.0 * s * s) * (2.0 * g2 + e2 * g4),
        );
        (value, deriv)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn gauss(sigma: f64, center: Vec<f64>, t: f64) -> Generator {
        Generator::new(RadialSmearing::gaussian(sigma, center).unwrap(), t, 1.0).unwrap()
    }

    #[test]
    fn gaussian_self_pairings() {
        let opts = KernelOptions::default();
        for sigma in [0.2, 1.0] {
            let g3 = gauss(sigma, vec![0.0; 3], 0.0);
            let s = pairing(&g3, &g3, &opts).unwrap().value;
            assert!((s.re - PI * sigma.powi(4)).abs() < 1e-13 * PI * sigma.powi(4));
            assert_eq!(s.im, 0.0);
            let q = pairing(&g3, &g3, &opts.quadrature_only()).unwrap().value;
            assert!((q.re - PI * sigma.powi(4)).abs() < 1e-12 * PI * sigma.powi(4));
            let g2 = gauss(sigma, vec![0.0; 2], 0.0);
            let s = pairing(&g2, &g2, &opts).unwrap().value;
            let want = PI.powf(1.5) * sigma.powi(3) / 2.0;
            assert!((s.re - want).abs() < 1e-12 * want, "{} vs {want}", s.re);
        }
    }

    #[test]
    fn closed_form_matches_quadrature() {
        let opts = KernelOptions::default();
        let g = gauss(0.2, vec![0.1, 0.0, -0.2], 0.5);
        for (t, x) in [(0.5, [0.1, 0.0, -0.2]), (4.5, [3.0, 2.0, 1.0]), (2.0, [0.1, 0.0, -0.2 + 1e-5]), (-1.0, [0.4, 0.0, 0.0])] {
            let (a, da) = mode_function_pair(&g, t, &x, &opts).unwrap();
            let (b, db) = mode_function_pair(&g, t, &x, &opts.quadrature_only()).unwrap();
            let scale = a.value.norm().max(1e-3);
            assert!((a.value - b.value).norm() < 1e-9 * scale, "t={t}: {} vs {}", a.value, b.value);
            let scale = da.value.norm().max(1e-2);
            assert!((da.value - db.value).norm() < 1e-9 * scale, "t={t}: {} vs {}", da.value, db.value);
        }
    }

    #[test]
    fn small_radius_branch_is_continuous() {
        for tau in [-0.3, 0.0, 0.17] {
            let (a, da) = gaussian3_closed(0.2, tau, 0.2 * std::f64::consts::SQRT_2 * (1e-3 - 1e-12));
            let (b, db) = gaussian3_closed(0.2, tau, 0.2 * std::f64::consts::SQRT_2 * (1e-3 + 1e-12));
            assert!((a - b).norm() < 1e-12 * (1.0 + a.norm()));
            assert!((da - db).norm() < 1e-11 * (1.0 + da.norm()));
        }
    }

    #[test]
    fn mode_function_is_real_at_coupling_time() {
        let opts = KernelOptions::default();
        for d in [2, 3] {
            let g = gauss(0.2, vec![0.0; d], 1.0);
            let mut x = vec![0.0; d];
            x[0] = 0.13;
            let v = mode_function(&g, 1.0, &x, &opts).unwrap();
            assert!(v.value.im.abs() < 1e-15, "d={d}: {}", v.value);
        }
    }

    #[test]
    fn dimension_mismatch_rejected() {
        let a = gauss(0.2, vec![0.0; 2], 0.0);
        let b = gauss(0.2, vec![0.0; 3], 0.0);
        assert!(pairing(&a, &b, &KernelOptions::default()).is_err());
    }
}
