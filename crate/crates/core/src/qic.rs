//! Quantum information capsules: symplectically orthonormal modes built
//! from detector generators, and their weighting functions on grids.
//!
//! Operators live as real coefficient vectors over the basis
//! `{O_1..O_n, f(O_1)..f(O_n)}`. In the vacuum `f` multiplies the positive
//! frequency part by `-i`, which closes the span and gives
//! `<O_i O_j> = <f(O_i) f(O_j)> = S_ij`, `<O_i f(O_j)> = i S_ij`.

use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::field_kernel::{mode_function_pair, pairing_matrix, KernelOptions, PairingMatrix};
use crate::generator::Generator;
use crate::smearing::Dimension;

/// Vacuum bilinear forms on the extended basis.
#[derive(Debug, Clone, PartialEq)]
pub struct ExtendedGram {
    n: usize,
    /// `M_ab = <e_a e_b>`, row-major, `2n x 2n`.
    m: Vec<Complex64>,
}

impl ExtendedGram {
    pub fn new(pairing: &PairingMatrix) -> Self {
        let n = pairing.size();
        let dim = 2 * n;
        let i = Complex64::new(0.0, 1.0);
        let mut m = vec![Complex64::new(0.0, 0.0); dim * dim];
        for a in 0..n {
            for b in 0..n {
                let s = pairing.get(a, b);
                m[a * dim + b] = s;
                m[a * dim + n + b] = i * s;
                m[(n + a) * dim + b] = -i * s;
                m[(n + a) * dim + n + b] = s;
            }
        }
        Self { n, m }
    }

    /// Number of generators (the basis has twice as many elements).
    pub fn generators(&self) -> usize {
        self.n
    }

    pub fn basis_len(&self) -> usize {
        2 * self.n
    }

    pub fn entry(&self, a: usize, b: usize) -> Complex64 {
        self.m[a * 2 * self.n + b]
    }

    /// `<A B>` for real coefficient vectors.
    pub fn expectation(&self, a: &[f64], b: &[f64]) -> Complex64 {
        let dim = self.basis_len();
        let mut acc = Complex64::new(0.0, 0.0);
        for (r, &x) in a.iter().enumerate() {
            if x == 0.0 {
                continue;
            }
            let row = &self.m[r * dim..(r + 1) * dim];
            let mut inner = Complex64::new(0.0, 0.0);
            for (c, &y) in b.iter().enumerate() {
                inner += row[c] * y;
            }
            acc += inner * x;
        }
        acc
    }

    /// `(1/i) <[A, B]> = 2 Im <A B>`.
    pub fn commutator(&self, a: &[f64], b: &[f64]) -> f64 {
        2.0 * self.expectation(a, b).im
    }

    /// `Re <A B>`, the symmetrized covariance.
    pub fn covariance(&self, a: &[f64], b: &[f64]) -> f64 {
        self.expectation(a, b).re
    }

    /// Coefficient vector of `O_j`.
    pub fn generator_vector(&self, j: usize) -> Vec<f64> {
        let mut v = vec![0.0; self.basis_len()];
        v[j] = 1.0;
        v
    }

    /// Coefficient vector of `f(O_j)`.
    pub fn conjugate_vector(&self, j: usize) -> Vec<f64> {
        let mut v = vec![0.0; self.basis_len()];
        v[self.n + j] = 1.0;
        v
    }
}

/// `f` acting on coefficient vectors: `(a, b) -> (-b, a)`.
pub fn apply_f(v: &[f64]) -> Vec<f64> {
    let n = v.len() / 2;
    let mut out = vec![0.0; v.len()];
    for j in 0..n {
        out[j] = -v[n + j];
        out[n + j] = v[j];
    }
    out
}

fn axpy(y: &mut [f64], a: f64, x: &[f64]) {
    for (yi, xi) in y.iter_mut().zip(x) {
        *yi += a * xi;
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct QicModeSet {
    pub generators: Vec<Generator>,
    pub pairing: PairingMatrix,
    /// Generator index that seeded each retained mode.
    pub sources: Vec<usize>,
    pub alphas: Vec<f64>,
    /// `betas[i][j]`, `j < i`, over retained modes.
    pub betas: Vec<Vec<f64>>,
    pub gammas: Vec<Vec<f64>>,
    pub q_coeffs: Vec<Vec<f64>>,
    pub p_coeffs: Vec<Vec<f64>>,
    pub skipped: Vec<usize>,
}

pub const DEFAULT_DEGENERACY_EPS: f64 = 1e-10;

/// Runs the mode recursion over an already computed pairing matrix.
pub fn build_qic_from_pairing(
    generators: Vec<Generator>,
    pairing: PairingMatrix,
    degeneracy_eps: f64,
) -> Result<QicModeSet> {
    let gram = ExtendedGram::new(&pairing);
    let n = pairing.size();
    let mut set = QicModeSet {
        generators,
        pairing,
        sources: Vec::new(),
        alphas: Vec::new(),
        betas: Vec::new(),
        gammas: Vec::new(),
        q_coeffs: Vec::new(),
        p_coeffs: Vec::new(),
        skipped: Vec::new(),
    };
    for i in 0..n {
        let o = gram.generator_vector(i);
        let fo = gram.conjugate_vector(i);
        let norm = 2.0 * set.pairing.get(i, i).re;
        if !(norm > 0.0) {
            return Err(Error::NumericConsistency(format!("<O_{i}^2> = {norm} is not positive")));
        }
        let mut betas = Vec::with_capacity(set.alphas.len());
        let mut gammas = Vec::with_capacity(set.alphas.len());
        let mut alpha2 = norm;
        for (q, p) in set.q_coeffs.iter().zip(&set.p_coeffs) {
            let beta = gram.commutator(&o, p);
            let gamma = -gram.commutator(&o, q);
            alpha2 -= beta * beta + gamma * gamma;
            betas.push(beta);
            gammas.push(gamma);
        }
        if alpha2 <= degeneracy_eps * norm {
            if alpha2 < -1e-6 * norm {
                return Err(Error::NumericConsistency(format!(
                    "alpha_{i}^2 = {alpha2:e} is negative beyond tolerance; pairings are inaccurate"
                )));
            }
            set.skipped.push(i);
            continue;
        }
        let alpha = alpha2.sqrt();
        let mut q = o;
        let mut p = fo;
        for (j, (qj, pj)) in set.q_coeffs.iter().zip(&set.p_coeffs).enumerate() {
            axpy(&mut q, -betas[j], qj);
            axpy(&mut q, -gammas[j], pj);
            axpy(&mut p, -betas[j], pj);
            axpy(&mut p, gammas[j], qj);
        }
        q.iter_mut().for_each(|x| *x /= alpha);
        p.iter_mut().for_each(|x| *x /= alpha);
        set.sources.push(i);
        set.alphas.push(alpha);
        set.betas.push(betas);
        set.gammas.push(gammas);
        set.q_coeffs.push(q);
        set.p_coeffs.push(p);
    }
    Ok(set)
}

/// Builds the k-mode capsule of an ordered generator list.
pub fn build_qic(generators: &[Generator], degeneracy_eps: f64, opts: &KernelOptions) -> Result<QicModeSet> {
    let pairing = pairing_matrix(generators, opts)?;
    let residual = pairing.hermiticity_residual();
    let scale = (0..pairing.size()).map(|i| pairing.get(i, i).re).fold(0.0, f64::max);
    if residual > 1e-8 * scale.max(1e-300) {
        return Err(Error::NumericConsistency(format!("pairing matrix is not Hermitian (residual {residual:e})")));
    }
    let pairing = pairing.hermitized();
    build_qic_from_pairing(generators.to_vec(), pairing, degeneracy_eps)
}

impl QicModeSet {
    pub fn len(&self) -> usize {
        self.alphas.len()
    }

    pub fn is_empty(&self) -> bool {
        self.alphas.is_empty()
    }

    pub fn dimension(&self) -> Dimension {
        self.pairing.dimension()
    }

    pub fn gram(&self) -> ExtendedGram {
        ExtendedGram::new(&self.pairing)
    }

    /// Ordered quadratures `[Q_1..Q_m, P_1..P_m]`.
    fn quadratures(&self) -> Vec<&Vec<f64>> {
        self.q_coeffs.iter().chain(self.p_coeffs.iter()).collect()
    }

    /// Matrix of `(1/i)<[X_a, X_b]>` over `[Q.., P..]`; the standard form
    /// is `[[0, I], [-I, 0]]`.
    pub fn symplectic_gram(&self) -> Vec<Vec<f64>> {
        let g = self.gram();
        let x = self.quadratures();
        x.iter().map(|a| x.iter().map(|b| g.commutator(a, b)).collect()).collect()
    }

    /// Matrix of `Re <X_a X_b>`; purity in standard form means `I/2`.
    pub fn covariance_matrix(&self) -> Vec<Vec<f64>> {
        let g = self.gram();
        let x = self.quadratures();
        x.iter().map(|a| x.iter().map(|b| g.covariance(a, b)).collect()).collect()
    }

    /// Largest deviation of the symplectic Gram matrix from standard form.
    pub fn ccr_residual(&self) -> f64 {
        let m = self.len();
        let omega = self.symplectic_gram();
        let mut worst: f64 = 0.0;
        for a in 0..2 * m {
            for b in 0..2 * m {
                let want = if a < m && b == a + m {
                    1.0
                } else if a >= m && a == b + m {
                    -1.0
                } else {
                    0.0
                };
                worst = worst.max((omega[a][b] - want).abs());
            }
        }
        worst
    }

    /// Largest deviation of the covariance matrix from `I/2`.
    pub fn purity_residual(&self) -> f64 {
        let cov = self.covariance_matrix();
        let mut worst: f64 = 0.0;
        for (a, row) in cov.iter().enumerate() {
            for (b, &v) in row.iter().enumerate() {
                let want = if a == b { 0.5 } else { 0.0 };
                worst = worst.max((v - want).abs());
            }
        }
        worst
    }
}

/// One grid axis: a closed range with a step, or a fixed coordinate.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub enum AxisSpec {
    Range { min: f64, max: f64, step: f64 },
    Fixed(f64),
}

impl AxisSpec {
    pub fn values(&self) -> Result<Vec<f64>> {
        match *self {
            AxisSpec::Fixed(v) if v.is_finite() => Ok(vec![v]),
            AxisSpec::Fixed(v) => Err(Error::Usage(format!("fixed coordinate {v} is not finite"))),
            AxisSpec::Range { min, max, step } => {
                if !(step > 0.0) || !(max >= min) || !min.is_finite() || !max.is_finite() {
                    return Err(Error::Usage(format!("empty grid axis {min}:{max}:{step}")));
                }
                let n = ((max - min) / step + 1e-9).floor() as usize + 1;
                Ok((0..n).map(|i| min + step * i as f64).collect())
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GridSpec {
    pub axes: Vec<AxisSpec>,
}

impl GridSpec {
    /// Cartesian product, last axis fastest.
    pub fn points(&self) -> Result<Vec<Vec<f64>>> {
        let values: Vec<Vec<f64>> = self.axes.iter().map(|a| a.values()).collect::<Result<_>>()?;
        let mut points = vec![Vec::with_capacity(values.len())];
        for axis in &values {
            let mut next = Vec::with_capacity(points.len() * axis.len());
            for p in &points {
                for &v in axis {
                    let mut q = p.clone();
                    q.push(v);
                    next.push(q);
                }
            }
            points = next;
        }
        if points.is_empty() || values.is_empty() {
            return Err(Error::Usage("grid has no points".into()));
        }
        Ok(points)
    }
}

/// Weighting functions of capsule modes on a grid at one time.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FieldGrid {
    pub dimension: Dimension,
    pub t: f64,
    pub axes: Vec<AxisSpec>,
    pub points: Vec<Vec<f64>>,
    /// Indices of the modes stored, in order.
    pub modes: Vec<usize>,
    /// `[mode][point]` arrays.
    pub f1: Vec<Vec<f64>>,
    pub f2: Vec<Vec<f64>>,
    pub g1: Vec<Vec<f64>>,
    pub g2: Vec<Vec<f64>>,
}

/// `(v1, v2, u1, u2)` of one generator at a point:
/// `v2 = -2 Im I`, `u2 = 2 Re I`, `v1 = 2 Im dI/dt`, `u1 = -2 Re dI/dt`.
pub fn generator_weights(gen: &Generator, t: f64, x: &[f64], opts: &KernelOptions) -> Result<[f64; 4]> {
    let (i, di) = mode_function_pair(gen, t, x, opts)?;
    Ok([2.0 * di.value.im, -2.0 * i.value.im, -2.0 * di.value.re, 2.0 * i.value.re])
}

/// Evaluates `F1, F2, G1, G2` of every mode at every grid point. Mode
/// functions are computed once per generator and point.
pub fn weighting_grid_all(modes: &QicModeSet, t: f64, grid: &GridSpec, opts: &KernelOptions) -> Result<FieldGrid> {
    let d = modes.dimension().get();
    if grid.axes.len() != d {
        return Err(Error::Usage(format!("grid has {} axes, field lives in {d} dimensions", grid.axes.len())));
    }
    let points = grid.points()?;
    let n = modes.generators.len();
    let m = modes.len();
    let per_point: Vec<Vec<[f64; 4]>> = points
        .par_iter()
        .map(|x| {
            let w: Vec<[f64; 4]> = modes
                .generators
                .iter()
                .map(|g| generator_weights(g, t, x, opts))
                .collect::<Result<_>>()?;
            Ok((0..m)
                .map(|k| {
                    let (q, p) = (&modes.q_coeffs[k], &modes.p_coeffs[k]);
                    // O_j carries (v1, v2); f(O_j) carries (u1, u2)
                    let mut out = [0.0; 4];
                    for j in 0..n {
                        out[0] += q[j] * w[j][0] + q[n + j] * w[j][2];
                        out[1] += q[j] * w[j][1] + q[n + j] * w[j][3];
                        out[2] += p[j] * w[j][0] + p[n + j] * w[j][2];
                        out[3] += p[j] * w[j][1] + p[n + j] * w[j][3];
                    }
                    out
                })
                .collect())
        })
        .collect::<Result<_>>()?;
    let column = |c: usize| -> Vec<Vec<f64>> { (0..m).map(|k| per_point.iter().map(|v| v[k][c]).collect()).collect() };
    Ok(FieldGrid {
        dimension: modes.dimension(),
        t,
        axes: grid.axes.clone(),
        points,
        modes: (0..m).collect(),
        f1: column(0),
        f2: column(1),
        g1: column(2),
        g2: column(3),
    })
}

/// Weighting functions of a single mode.
pub fn weighting_grid(
    modes: &QicModeSet,
    mode_index: usize,
    t: f64,
    grid: &GridSpec,
    opts: &KernelOptions,
) -> Result<FieldGrid> {
    if mode_index >= modes.len() {
        return Err(Error::Usage(format!("mode {mode_index} does not exist ({} modes)", modes.len())));
    }
    let mut all = weighting_grid_all(modes, t, grid, opts)?;
    for arr in [&mut all.f1, &mut all.f2, &mut all.g1, &mut all.g2] {
        let keep = arr.swap_remove(mode_index);
        *arr = vec![keep];
    }
    all.modes = vec![mode_index];
    Ok(all)
}
