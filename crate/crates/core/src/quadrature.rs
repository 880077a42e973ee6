//! Globally adaptive Gauss-Kronrod (10/21 point) quadrature for vectors of
//! complex integrands sharing the same abscissae.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use num_complex::Complex64;

use crate::error::{Error, Result};

const XGK: [f64; 11] = [
    0.995_657_163_025_808_1,
    0.973_906_528_517_171_7,
    0.930_157_491_355_708_2,
    0.865_063_366_688_984_5,
    0.780_817_726_586_416_9,
    0.679_409_568_299_024_4,
    0.562_757_134_668_604_7,
    0.433_395_394_129_247_2,
    0.294_392_862_701_460_2,
    0.148_874_338_981_631_22,
    0.0,
];

const WG: [f64; 5] = [
    0.066_671_344_308_688_14,
    0.149_451_349_150_580_6,
    0.219_086_362_515_982_04,
    0.269_266_719_309_996_35,
    0.295_524_224_714_752_87,
];

const WGK: [f64; 11] = [
    0.011_694_638_867_371_874,
    0.032_558_162_307_964_725,
    0.054_755_896_574_351_995,
    0.075_039_674_810_919_96,
    0.093_125_454_583_697_6,
    0.109_387_158_802_297_64,
    0.123_491_976_262_065_84,
    0.134_709_217_311_473_34,
    0.142_775_938_577_060_09,
    0.147_739_104_901_338_49,
    0.149_445_554_002_916_9,
];

#[derive(Debug, Clone, Copy)]
pub struct QuadOptions {
    /// Target error relative to the integral of `|f|`.
    pub rel_tol: f64,
    pub abs_tol: f64,
    pub max_intervals: usize,
}

impl Default for QuadOptions {
    fn default() -> Self {
        Self { rel_tol: 1e-13, abs_tol: 0.0, max_intervals: 200_000 }
    }
}

#[derive(Debug, Clone, Copy)]
pub struct Estimate<const N: usize> {
    pub value: [Complex64; N],
    /// Largest per-component error estimate.
    pub error: f64,
    /// Per-component integral of the modulus, used for relative tolerances.
    pub l1: [f64; N],
    pub evaluations: usize,
}

#[derive(Clone, Copy)]
struct Piece<const N: usize> {
    a: f64,
    b: f64,
    value: [Complex64; N],
    l1: [f64; N],
    error: f64,
}

impl<const N: usize> PartialEq for Piece<N> {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}
impl<const N: usize> Eq for Piece<N> {}
impl<const N: usize> PartialOrd for Piece<N> {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl<const N: usize> Ord for Piece<N> {
    fn cmp(&self, other: &Self) -> Ordering {
        self.error
            .total_cmp(&other.error)
            .then_with(|| other.a.total_cmp(&self.a))
    }
}

/// One 21-point Kronrod rule on `[a, b]`.
fn gk21<const N: usize, F>(f: &F, a: f64, b: f64) -> Piece<N>
where
    F: Fn(f64) -> [Complex64; N],
{
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let zero = [Complex64::new(0.0, 0.0); N];
    let mut fv = [zero; 21];
    fv[20] = f(center);
    for j in 0..10 {
        let dx = half * XGK[j];
        fv[2 * j] = f(center - dx);
        fv[2 * j + 1] = f(center + dx);
    }
    let mut kron = zero;
    let mut gauss = zero;
    let mut abs = [0.0; N];
    for c in 0..N {
        kron[c] = fv[20][c] * WGK[10];
        abs[c] = fv[20][c].norm() * WGK[10];
        for j in 0..10 {
            let s = fv[2 * j][c] + fv[2 * j + 1][c];
            kron[c] += s * WGK[j];
            abs[c] += (fv[2 * j][c].norm() + fv[2 * j + 1][c].norm()) * WGK[j];
            if j % 2 == 1 {
                gauss[c] += s * WG[j / 2];
            }
        }
    }
    let mut error: f64 = 0.0;
    let mut l1 = [0.0; N];
    for c in 0..N {
        let mean = kron[c] * 0.5;
        let mut asc = WGK[10] * (fv[20][c] - mean).norm();
        for j in 0..10 {
            asc += WGK[j] * ((fv[2 * j][c] - mean).norm() + (fv[2 * j + 1][c] - mean).norm());
        }
        let asc = asc * half.abs();
        l1[c] = abs[c] * half.abs();
        let mut err = ((kron[c] - gauss[c]) * half).norm();
        if asc != 0.0 && err != 0.0 {
            err = asc * (200.0 * err / asc).powf(1.5).min(1.0);
        }
        let floor = 50.0 * f64::EPSILON * l1[c];
        error = error.max(err.max(floor));
        kron[c] *= half;
    }
    Piece { a, b, value: kron, l1, error }
}

/// Neumaier-compensated sum of complex numbers in the given order.
#[derive(Debug, Clone, Copy, Default)]
pub struct CompensatedSum {
    sum: Complex64,
    comp: Complex64,
}

impl CompensatedSum {
    pub fn add(&mut self, x: Complex64) {
        self.sum.re = neumaier(self.sum.re, x.re, &mut self.comp.re);
        self.sum.im = neumaier(self.sum.im, x.im, &mut self.comp.im);
    }

    pub fn value(&self) -> Complex64 {
        self.sum + self.comp
    }
}

fn neumaier(sum: f64, x: f64, comp: &mut f64) -> f64 {
    let t = sum + x;
    if sum.abs() >= x.abs() {
        *comp += (sum - t) + x;
    } else {
        *comp += (x - t) + sum;
    }
    t
}

/// Integrates `f` over `[a, b]`, starting from `panels` equal subintervals
/// and bisecting the worst interval until the total error estimate drops
/// below `max(abs_tol, rel_tol * max_c int |f_c|)`.
pub fn integrate<const N: usize, F>(
    f: F,
    a: f64,
    b: f64,
    panels: usize,
    opts: &QuadOptions,
) -> Result<Estimate<N>>
where
    F: Fn(f64) -> [Complex64; N],
{
    let panels = panels.max(1);
    let mut heap = BinaryHeap::with_capacity(panels * 2);
    let width = (b - a) / panels as f64;
    let mut total_err = 0.0;
    let mut l1 = [0.0; N];
    for p in 0..panels {
        let lo = a + width * p as f64;
        let hi = if p + 1 == panels { b } else { a + width * (p + 1) as f64 };
        let piece = gk21(&f, lo, hi);
        total_err += piece.error;
        for c in 0..N {
            l1[c] += piece.l1[c];
        }
        heap.push(piece);
    }
    let mut evaluations = 21 * panels;
    let tolerance = |l1: &[f64; N]| {
        let scale = l1.iter().cloned().fold(0.0, f64::max);
        opts.abs_tol.max(opts.rel_tol * scale)
    };
    while total_err > tolerance(&l1) {
        if heap.len() >= opts.max_intervals {
            return Err(Error::Quadrature {
                what: format!("integral over [{a}, {b}]"),
                estimate: total_err,
            });
        }
        let worst = heap.pop().expect("heap is never empty");
        let mid = 0.5 * (worst.a + worst.b);
        if mid <= worst.a || mid >= worst.b {
            // interval exhausted at machine resolution; accept it
            heap.push(Piece { error: 0.0, ..worst });
            total_err -= worst.error;
            continue;
        }
        let left = gk21(&f, worst.a, mid);
        let right = gk21(&f, mid, worst.b);
        evaluations += 42;
        total_err += left.error + right.error - worst.error;
        for c in 0..N {
            l1[c] += left.l1[c] + right.l1[c] - worst.l1[c];
        }
        heap.push(left);
        heap.push(right);
    }
    let mut pieces = heap.into_vec();
    pieces.sort_by(|x, y| x.a.total_cmp(&y.a));
    let mut sums = [CompensatedSum::default(); N];
    let mut error = 0.0;
    for piece in &pieces {
        for c in 0..N {
            sums[c].add(piece.value[c]);
        }
        error += piece.error;
    }
    let mut l1 = [0.0; N];
    for piece in &pieces {
        for c in 0..N {
            l1[c] += piece.l1[c];
        }
    }
    Ok(Estimate { value: sums.map(|s| s.value()), error, l1, evaluations })
}

/// Non-adaptive composite Kronrod rule on `panels` equal subintervals.
pub fn composite<const N: usize, F>(f: F, a: f64, b: f64, panels: usize) -> Estimate<N>
where
    F: Fn(f64) -> [Complex64; N],
{
    let panels = panels.max(1);
    let width = (b - a) / panels as f64;
    let mut sums = [CompensatedSum::default(); N];
    let mut l1 = [0.0; N];
    let mut error = 0.0;
    for p in 0..panels {
        let lo = a + width * p as f64;
        let hi = if p + 1 == panels { b } else { a + width * (p + 1) as f64 };
        let piece = gk21(&f, lo, hi);
        for c in 0..N {
            sums[c].add(piece.value[c]);
            l1[c] += piece.l1[c];
        }
        error += piece.error;
    }
    Estimate { value: sums.map(|s| s.value()), error, l1, evaluations: 21 * panels }
}

/// Real scalar convenience wrapper.
pub fn integrate_real<F>(f: F, a: f64, b: f64, panels: usize, opts: &QuadOptions) -> Result<(f64, f64)>
where
    F: Fn(f64) -> f64,
{
    let est = integrate(|x| [Complex64::new(f(x), 0.0)], a, b, panels, opts)?;
    Ok((est.value[0].re, est.error))
}
