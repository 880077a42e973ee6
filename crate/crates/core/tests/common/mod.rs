//! Helpers shared by the brute-force test and the acceptance target.

#![allow(dead_code, clippy::needless_range_loop)]

use std::sync::OnceLock;

use qic_core::field_kernel::oracle::pairing_oracle;
use qic_core::*;
use rayon::prelude::*;

/// Nodes and weights for `int exp(-x^2) f(x) dx` (Newton on the
/// orthonormal Hermite recurrence).
pub fn gauss_hermite(m: usize) -> Vec<(f64, f64)> {
    let pim4 = std::f64::consts::PI.powf(-0.25);
    let mut out = vec![(0.0, 0.0); m];
    let mut z = 0.0;
    for i in 0..m.div_ceil(2) {
        z = match i {
            0 => (2.0 * m as f64 + 1.0).sqrt() - 1.85575 * (2.0 * m as f64 + 1.0).powf(-1.0 / 6.0),
            1 => z - 1.14 * (m as f64).powf(0.426) / z,
            2 => 1.86 * z - 0.86 * out[0].0,
            3 => 1.91 * z - 0.91 * out[1].0,
            _ => 2.0 * z - out[i - 2].0,
        };
        let mut pp = 0.0;
        for _ in 0..100 {
            let mut p1 = pim4;
            let mut p2 = 0.0;
            for j in 0..m {
                let p3 = p2;
                p2 = p1;
                p1 = z * (2.0 / (j + 1) as f64).sqrt() * p2 - (j as f64 / (j + 1) as f64).sqrt() * p3;
            }
            pp = (2.0 * m as f64).sqrt() * p2;
            let z1 = z;
            z = z1 - p1 / pp;
            if (z - z1).abs() <= 1e-15 * z.abs().max(1.0) {
                break;
            }
        }
        let w = 2.0 / (pp * pp);
        out[i] = (z, w);
        out[m - 1 - i] = (-z, w);
    }
    out
}

pub fn cholesky(a: &[Vec<f64>]) -> Vec<Vec<f64>> {
    let n = a.len();
    let mut l = vec![vec![0.0; n]; n];
    for i in 0..n {
        for j in 0..=i {
            let s: f64 = (0..j).map(|k| l[i][k] * l[j][k]).sum();
            if i == j {
                l[i][j] = (a[i][i] - s).sqrt();
            } else {
                l[i][j] = (a[i][j] - s) / l[j][j];
            }
        }
    }
    l
}

pub fn brute_force(p: &ChannelPairings, bit: u8, m: usize) -> Vec<f64> {
    let n = p.couplings.len();
    let nodes = gauss_hermite(m);
    let l = cholesky(&p.covariance);
    let lambda_a = bit as f64 * p.alice_coupling;
    let mut probs = vec![0.0; 1 << n];
    let mut idx = vec![0usize; n];
    loop {
        let mut weight = 1.0;
        let z: Vec<f64> = idx
            .iter()
            .map(|&k| {
                weight *= nodes[k].1 / std::f64::consts::PI.sqrt();
                std::f64::consts::SQRT_2 * nodes[k].0
            })
            .collect();
        let x: Vec<f64> = (0..n).map(|i| (0..=i).map(|k| l[i][k] * z[k]).sum()).collect();
        for s_a in [1.0, -1.0] {
            for (outcome, prob) in probs.iter_mut().enumerate() {
                let mut v = 0.5 * weight;
                for i in 0..n {
                    let angle = p.couplings[i] * (x[i] + 2.0 * s_a * lambda_a * p.signal[i]);
                    let excited = (outcome >> (n - 1 - i)) & 1 == 1;
                    v *= if excited { angle.sin().powi(2) } else { angle.cos().powi(2) };
                }
                *prob += v;
            }
        }
        let mut k = 0;
        loop {
            idx[k] += 1;
            if idx[k] < m {
                break;
            }
            idx[k] = 0;
            k += 1;
            if k == n {
                return probs;
            }
        }
    }
}

pub fn oracle_pairings(d: Dimension) -> ChannelPairings {
    static CACHE: [OnceLock<ChannelPairings>; 2] = [OnceLock::new(), OnceLock::new()];
    let slot = &CACHE[if d == Dimension::Two { 0 } else { 1 }];
    slot.get_or_init(|| {
        let sc = table1_scenario(d);
        let n = sc.bobs.len();
        let pairs: Vec<(usize, usize)> = (0..n).flat_map(|i| (i..=n).map(move |j| (i, j))).collect();
        // j == n stands for the sender
        let values: Vec<f64> = pairs
            .par_iter()
            .map(|&(i, j)| {
                if j == n {
                    pairing_oracle(&sc.bobs[i], &sc.alice).unwrap().value.im
                } else {
                    pairing_oracle(&sc.bobs[i], &sc.bobs[j]).unwrap().value.re
                }
            })
            .collect();
        let mut covariance = vec![vec![0.0; n]; n];
        let mut signal = vec![0.0; n];
        for (&(i, j), v) in pairs.iter().zip(values) {
            if j == n {
                signal[i] = v;
            } else {
                covariance[i][j] = v;
                covariance[j][i] = v;
            }
        }
        ChannelPairings {
            couplings: sc.bobs.iter().map(|b| b.coupling).collect(),
            covariance,
            signal,
            alice_coupling: sc.alice.coupling,
            error_bound: 0.0,
        }
    })
    .clone()
}
