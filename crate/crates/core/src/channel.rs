//! One-bit channel from a sender detector to an array of receiver
//! detectors: joint outcome distributions, marginals, mutual information
//! and capacities.

use std::fmt;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::field_kernel::{pairing_matrix, KernelOptions};
use crate::generator::Generator;
use crate::qic::ExtendedGram;
use crate::smearing::{distance, Dimension, SmearingKind};

/// Where a receiver sits relative to the sender's smeared light cone.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum GeometryClass {
    Inside,
    Straddling,
    Outside,
    /// Profiles without compact support cannot be classified.
    Unbounded,
}

#[derive(Debug, Clone, Serialize)]
pub struct ChannelScenario {
    pub alice: Generator,
    pub bobs: Vec<Generator>,
    pub geometry: Vec<GeometryClass>,
    pub warnings: Vec<String>,
}

fn radial_extent(g: &Generator) -> Option<(f64, f64)> {
    match g.smearing.kind() {
        SmearingKind::HardShell { r_inner, r_outer } => Some((r_inner, r_outer)),
        SmearingKind::Gaussian { .. } => None,
    }
}

impl ChannelScenario {
    /// Validates the layout and classifies each receiver against the region
    /// `[dt - R_A, dt + R_A]` swept by the sender's null shell.
    pub fn new(alice: Generator, bobs: Vec<Generator>) -> Result<Self> {
        if bobs.is_empty() || bobs.len() > 10 {
            return Err(Error::Config(format!("need between 1 and 10 receivers, got {}", bobs.len())));
        }
        let dim = alice.dimension();
        for b in &bobs {
            if b.dimension() != dim {
                return Err(Error::Config("sender and receivers live in different dimensions".into()));
            }
            if !(b.time > alice.time) {
                return Err(Error::Config(format!(
                    "receivers must couple after the sender (t_dec = {} <= t_enc = {})",
                    b.time, alice.time
                )));
            }
            b.smearing.require_field()?;
        }
        alice.smearing.require_field()?;
        let mut geometry = Vec::with_capacity(bobs.len());
        for b in &bobs {
            let class = match (radial_extent(&alice), radial_extent(b)) {
                (Some((_, ra)), Some((rin, rout))) => {
                    let dt = b.time - alice.time;
                    let offset = distance(alice.smearing.center(), b.smearing.center());
                    let nearest = (rin - offset).max(0.0);
                    let farthest = rout + offset;
                    if farthest < dt - ra {
                        GeometryClass::Inside
                    } else if nearest > dt + ra {
                        GeometryClass::Outside
                    } else {
                        GeometryClass::Straddling
                    }
                }
                _ => GeometryClass::Unbounded,
            };
            geometry.push(class);
        }
        let mut warnings = Vec::new();
        let expected = [GeometryClass::Inside, GeometryClass::Straddling, GeometryClass::Outside];
        if bobs.len() == 3 && geometry != expected {
            warnings.push(format!(
                "receivers are classified {geometry:?}, not inside/straddling/outside the light cone"
            ));
        }
        Ok(Self { alice, bobs, geometry, warnings })
    }

    pub fn dimension(&self) -> Dimension {
        self.alice.dimension()
    }

    pub fn receivers(&self) -> usize {
        self.bobs.len()
    }
}

/// The vacuum data the outcome distribution depends on: receiver
/// couplings, the equal-time covariance `G_ij = Re <B_i B_j>` and the
/// signal `c_i = Im <B_i O_A>`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ChannelPairings {
    pub couplings: Vec<f64>,
    pub covariance: Vec<Vec<f64>>,
    pub signal: Vec<f64>,
    /// Sender coupling for bit 1.
    pub alice_coupling: f64,
    pub error_bound: f64,
}

impl ChannelPairings {
    pub fn from_scenario(sc: &ChannelScenario, opts: &KernelOptions) -> Result<Self> {
        let mut gens = vec![sc.alice.clone()];
        gens.extend(sc.bobs.iter().cloned());
        let s = pairing_matrix(&gens, opts)?;
        let n = sc.bobs.len();
        let scale = (1..=n).map(|i| s.get(i, i).re).fold(0.0, f64::max);
        for i in 1..=n {
            for j in 1..=n {
                let comm = s.get(i, j).im;
                if comm.abs() > 1e-8 * scale {
                    return Err(Error::Config(format!(
                        "receivers {i} and {j} do not commute (Im S = {comm:e}); they must be spacelike"
                    )));
                }
            }
        }
        let covariance = (1..=n)
            .map(|i| (1..=n).map(|j| 0.5 * (s.get(i, j).re + s.get(j, i).re)).collect())
            .collect();
        let signal = (1..=n).map(|i| s.get(i, 0).im).collect();
        Ok(Self {
            couplings: sc.bobs.iter().map(|b| b.coupling).collect(),
            covariance,
            signal,
            alice_coupling: sc.alice.coupling,
            error_bound: s.max_error(),
        })
    }

    /// Receivers given as arbitrary operators (coefficient vectors over an
    /// extended basis), e.g. probes projected out of a capsule plane.
    pub fn from_operators(
        gram: &ExtendedGram,
        alice: &[f64],
        bobs: &[Vec<f64>],
        couplings: &[f64],
        alice_coupling: f64,
    ) -> Result<Self> {
        if bobs.len() != couplings.len() || bobs.is_empty() {
            return Err(Error::Config("one coupling per receiver operator is required".into()));
        }
        let n = bobs.len();
        let scale = bobs.iter().map(|b| gram.covariance(b, b)).fold(0.0, f64::max);
        for i in 0..n {
            for j in 0..i {
                let c = gram.commutator(&bobs[i], &bobs[j]);
                if c.abs() > 1e-8 * scale {
                    return Err(Error::Config(format!(
                        "receiver operators {i} and {j} do not commute ((1/i)<[B_i, B_j]> = {c:e})"
                    )));
                }
            }
        }
        Ok(Self {
            couplings: couplings.to_vec(),
            covariance: (0..n).map(|i| (0..n).map(|j| gram.covariance(&bobs[i], &bobs[j])).collect()).collect(),
            signal: bobs.iter().map(|b| gram.expectation(b, alice).im).collect(),
            alice_coupling,
            error_bound: 0.0,
        })
    }

    pub fn receivers(&self) -> usize {
        self.couplings.len()
    }
}

/// Distribution over receiver outcomes. Outcome index bits: receiver 0 is
/// the most significant bit, `g = 0`, `e = 1`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OutcomeDistribution {
    pub detectors: usize,
    pub probabilities: Vec<f64>,
}

impl OutcomeDistribution {
    pub fn new(detectors: usize, probabilities: Vec<f64>) -> Result<Self> {
        if probabilities.len() != 1 << detectors {
            return Err(Error::Config("probability table has the wrong size".into()));
        }
        Ok(Self { detectors, probabilities })
    }

    pub fn total(&self) -> f64 {
        self.probabilities.iter().sum()
    }

    /// Outcome of receiver `i` (0 = ground, 1 = excited) in outcome `index`.
    pub fn bit(&self, index: usize, i: usize) -> usize {
        (index >> (self.detectors - 1 - i)) & 1
    }
}

/// Clamps rounding-level negatives and normalizes.
fn finalize(detectors: usize, mut probs: Vec<f64>) -> Result<OutcomeDistribution> {
    for (idx, p) in probs.iter_mut().enumerate() {
        if *p < 0.0 {
            if *p < -1e-12 {
                return Err(Error::NumericConsistency(format!("outcome {idx} has probability {p:e}")));
            }
            *p = 0.0;
        }
    }
    let total: f64 = probs.iter().sum();
    if (total - 1.0).abs() > 1e-9 {
        return Err(Error::NumericConsistency(format!("outcome probabilities sum to {total}")));
    }
    probs.iter_mut().for_each(|p| *p /= total);
    OutcomeDistribution::new(detectors, probs)
}

/// Outcome distribution for one encoded bit (sender coupling `bit * lambda_A`).
///
/// Sums, for each sender branch `s_A` and each `(s, s')` in `{+1,-1}^{2n}`,
/// the qubit factor `prod_i (s_i s'_i / 4 if excited else 1/4)`, the
/// decoherence factor `exp(-d.G.d / 2)` with `d_i = lambda_i (s_i - s'_i)`
/// and the signal phase `exp(2 i lambda_A s_A d.c)`, weighted by 1/2.
pub fn joint_distribution_from(p: &ChannelPairings, bit: u8) -> Result<OutcomeDistribution> {
    finalize(p.receivers(), joint_probabilities_raw(p, bit)?)
}

/// The outcome sum before clamping and normalization.
pub fn joint_probabilities_raw(p: &ChannelPairings, bit: u8) -> Result<Vec<f64>> {
    if bit > 1 {
        return Err(Error::Usage(format!("bit must be 0 or 1, got {bit}")));
    }
    let n = p.receivers();
    let lambda_a = bit as f64 * p.alice_coupling;
    let configs = 1usize << n;
    let spin = |cfg: usize, i: usize| if (cfg >> (n - 1 - i)) & 1 == 0 { 1.0 } else { -1.0 };
    // per (s, s') pair: decoherence factor and signal phase argument
    let mut pair_terms = Vec::with_capacity(configs * configs);
    for s in 0..configs {
        for sp in 0..configs {
            let d: Vec<f64> = (0..n).map(|i| p.couplings[i] * (spin(s, i) - spin(sp, i))).collect();
            let mut quad = 0.0;
            for i in 0..n {
                for j in 0..n {
                    quad += d[i] * p.covariance[i][j] * d[j];
                }
            }
            let dc: f64 = (0..n).map(|i| d[i] * p.signal[i]).sum();
            pair_terms.push((s, sp, (-0.5 * quad).exp(), dc));
        }
    }
    let mut probs = vec![0.0; configs];
    for (outcome, prob) in probs.iter_mut().enumerate() {
        let mut acc = crate::quadrature::CompensatedSum::default();
        for s_a in [1.0, -1.0] {
            for &(s, sp, decoherence, dc) in &pair_terms {
                let mut qubit = 1.0;
                for i in 0..n {
                    let excited = (outcome >> (n - 1 - i)) & 1 == 1;
                    qubit *= if excited { 0.25 * spin(s, i) * spin(sp, i) } else { 0.25 };
                }
                let phase = Complex64::from_polar(1.0, 2.0 * lambda_a * s_a * dc);
                acc.add(0.5 * qubit * decoherence * phase);
            }
        }
        *prob = acc.value().re;
    }
    Ok(probs)
}

pub fn joint_distribution(sc: &ChannelScenario, bit: u8, opts: &KernelOptions) -> Result<OutcomeDistribution> {
    joint_distribution_from(&ChannelPairings::from_scenario(sc, opts)?, bit)
}

/// A nonempty set of receivers, bit `i` standing for receiver `i`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct DetectorSubset(pub u32);

impl DetectorSubset {
    pub fn from_indices(indices: &[usize]) -> Self {
        Self(indices.iter().fold(0, |m, &i| m | (1 << i)))
    }

    pub fn members(&self) -> Vec<usize> {
        (0..32).filter(|i| self.0 & (1 << i) != 0).collect()
    }

    pub fn contains(&self, i: usize) -> bool {
        self.0 & (1 << i) != 0
    }

    pub fn is_subset_of(&self, other: &Self) -> bool {
        self.0 & !other.0 == 0
    }

    /// Label such as `B1B3` (receivers numbered from 1).
    pub fn label(&self) -> String {
        self.members().iter().map(|i| format!("B{}", i + 1)).collect()
    }

    /// Parses labels such as `B2B3`.
    pub fn parse(label: &str) -> Result<Self> {
        let mut indices = Vec::new();
        for part in label.split('B').skip(1) {
            let i: usize = part.parse().map_err(|_| Error::Usage(format!("bad subset label {label}")))?;
            if i == 0 {
                return Err(Error::Usage(format!("bad subset label {label}")));
            }
            indices.push(i - 1);
        }
        if indices.is_empty() || !label.starts_with('B') {
            return Err(Error::Usage(format!("bad subset label {label}")));
        }
        Ok(Self::from_indices(&indices))
    }
}

impl fmt::Display for DetectorSubset {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.label())
    }
}

/// Sums out receivers outside `subset`. The result indexes the retained
/// receivers in increasing order, most significant first.
pub fn marginalize(p: &OutcomeDistribution, subset: DetectorSubset) -> Result<OutcomeDistribution> {
    let keep: Vec<usize> = subset.members();
    if keep.is_empty() {
        return Err(Error::Usage("cannot marginalize onto an empty set of receivers".into()));
    }
    if keep.iter().any(|&i| i >= p.detectors) {
        return Err(Error::Usage(format!("subset {subset} names a receiver that does not exist")));
    }
    let m = keep.len();
    let mut out = vec![0.0; 1 << m];
    for (idx, &prob) in p.probabilities.iter().enumerate() {
        let mut j = 0;
        for &i in &keep {
            j = (j << 1) | p.bit(idx, i);
        }
        out[j] += prob;
    }
    OutcomeDistribution::new(m, out)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub enum LogBase {
    /// Bits.
    #[default]
    Two,
    /// Nats.
    E,
}

impl LogBase {
    pub fn ln_scale(self) -> f64 {
        match self {
            LogBase::Two => std::f64::consts::LN_2,
            LogBase::E => 1.0,
        }
    }

    pub fn parse(s: &str) -> Result<Self> {
        match s {
            "2" => Ok(LogBase::Two),
            "e" => Ok(LogBase::E),
            other => Err(Error::Usage(format!("log base must be 2 or e, got {other}"))),
        }
    }
}

impl fmt::Display for LogBase {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            LogBase::Two => "2",
            LogBase::E => "e",
        })
    }
}

/// `I(A;B)` for prior `q` on bit 0 and conditionals `p0`, `p1`, with
/// `p_AB(0, b) = q p0(b)` and `p_AB(1, b) = (1 - q) p1(b)`.
pub fn mutual_information(q: f64, p0: &OutcomeDistribution, p1: &OutcomeDistribution, base: LogBase) -> Result<f64> {
    if !(0.0..=1.0).contains(&q) {
        return Err(Error::Usage(format!("prior must lie in [0, 1], got {q}")));
    }
    if p0.probabilities.len() != p1.probabilities.len() {
        return Err(Error::Usage("conditionals live on different outcome spaces".into()));
    }
    let mut total = 0.0;
    for (&a, &b) in p0.probabilities.iter().zip(&p1.probabilities) {
        let pb = q * a + (1.0 - q) * b;
        if pb <= 0.0 {
            continue;
        }
        // log(a / pb) = log1p((1 - q)(a - b) / pb), accurate when a ~ b
        if q > 0.0 && a > 0.0 {
            total += q * a * ((1.0 - q) * (a - b) / pb).ln_1p();
        }
        if q < 1.0 && b > 0.0 {
            total += (1.0 - q) * b * (q * (b - a) / pb).ln_1p();
        }
    }
    Ok(total.max(0.0) / base.ln_scale())
}

/// Maximizes the (concave) mutual information over the prior by
/// golden-section search. Returns `(C, q*)`.
pub fn capacity(p0: &OutcomeDistribution, p1: &OutcomeDistribution, base: LogBase, tol: f64) -> Result<(f64, f64)> {
    if p0.probabilities == p1.probabilities {
        return Ok((0.0, 0.5));
    }
    let inv_phi = (5f64.sqrt() - 1.0) / 2.0;
    let (mut a, mut b) = (0.0, 1.0);
    let mut c = b - inv_phi * (b - a);
    let mut d = a + inv_phi * (b - a);
    let mut fc = mutual_information(c, p0, p1, base)?;
    let mut fd = mutual_information(d, p0, p1, base)?;
    while b - a > tol {
        if fc >= fd {
            b = d;
            d = c;
            fd = fc;
            c = b - inv_phi * (b - a);
            fc = mutual_information(c, p0, p1, base)?;
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + inv_phi * (b - a);
            fd = mutual_information(d, p0, p1, base)?;
        }
    }
    let q = 0.5 * (a + b);
    let mut best = (mutual_information(q, p0, p1, base)?, q);
    for edge in [0.0, 1.0] {
        let v = mutual_information(edge, p0, p1, base)?;
        if v > best.0 {
            best = (v, edge);
        }
    }
    Ok(best)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SubsetCapacity {
    pub subset: DetectorSubset,
    pub capacity: f64,
    pub q_star: f64,
    pub tolerance: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CapacityResult {
    pub base: LogBase,
    pub entries: Vec<SubsetCapacity>,
    /// Largest quadrature error bound among the pairings used.
    pub error_bound: f64,
    pub p0: OutcomeDistribution,
    pub p1: OutcomeDistribution,
}

impl CapacityResult {
    pub fn get(&self, subset: DetectorSubset) -> Option<&SubsetCapacity> {
        self.entries.iter().find(|e| e.subset == subset)
    }

    pub fn value(&self, label: &str) -> Option<f64> {
        DetectorSubset::parse(label).ok().and_then(|s| self.get(s)).map(|e| e.capacity)
    }

    /// Largest violation of `C_S <= C_T` over included pairs, relative to
    /// the larger value plus an absolute floor.
    pub fn monotonicity_violation(&self) -> f64 {
        let mut worst: f64 = 0.0;
        for s in &self.entries {
            for t in &self.entries {
                if s.subset.is_subset_of(&t.subset) {
                    worst = worst.max(s.capacity - t.capacity);
                }
            }
        }
        worst
    }
}

/// Subsets in reporting order: for three receivers the order
/// `B1, B2, B3, B1B2, B2B3, B1B3, B1B2B3`, otherwise by size then bitmask.
pub fn subset_order(n: usize) -> Vec<DetectorSubset> {
    if n == 3 {
        return [&[0][..], &[1], &[2], &[0, 1], &[1, 2], &[0, 2], &[0, 1, 2]]
            .iter()
            .map(|ix| DetectorSubset::from_indices(ix))
            .collect();
    }
    let mut all: Vec<DetectorSubset> = (1..(1u32 << n)).map(DetectorSubset).collect();
    all.sort_by_key(|s| (s.0.count_ones(), s.0.reverse_bits()));
    all
}

pub const DEFAULT_CAPACITY_TOL: f64 = 1e-10;

/// Capacities of every nonempty receiver subset from precomputed pairings.
pub fn capacity_table_from(p: &ChannelPairings, base: LogBase, tol: f64) -> Result<CapacityResult> {
    let p0 = joint_distribution_from(p, 0)?;
    let p1 = joint_distribution_from(p, 1)?;
    let entries = subset_order(p.receivers())
        .into_par_iter()
        .map(|subset| {
            let m0 = marginalize(&p0, subset)?;
            let m1 = marginalize(&p1, subset)?;
            let (c, q) = capacity(&m0, &m1, base, tol)?;
            Ok(SubsetCapacity { subset, capacity: c, q_star: q, tolerance: tol })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(CapacityResult { base, entries, error_bound: p.error_bound, p0, p1 })
}

pub fn capacity_table(sc: &ChannelScenario, base: LogBase, opts: &KernelOptions) -> Result<CapacityResult> {
    capacity_table_from(&ChannelPairings::from_scenario(sc, opts)?, base, DEFAULT_CAPACITY_TOL)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn dist(p: &[f64]) -> OutcomeDistribution {
        let n = p.len().trailing_zeros() as usize;
        OutcomeDistribution::new(n, p.to_vec()).unwrap()
    }

    fn toy_pairings(signal: Vec<f64>) -> ChannelPairings {
        ChannelPairings {
            couplings: vec![0.2, 0.3, 0.1],
            covariance: vec![vec![1.0, 0.4, 0.1], vec![0.4, 2.0, 0.5], vec![0.1, 0.5, 1.5]],
            signal,
            alice_coupling: 1.0,
            error_bound: 0.0,
        }
    }

    #[test]
    fn mutual_information_examples() {
        let a = dist(&[1.0, 0.0]);
        let b = dist(&[0.0, 1.0]);
        assert_eq!(mutual_information(0.0, &a, &b, LogBase::Two).unwrap(), 0.0);
        assert!((mutual_information(0.5, &a, &b, LogBase::Two).unwrap() - 1.0).abs() < 1e-15);
        // p0 = (1, 0), p1 = (1/2, 1/2), q = 1/2: direct four-term sum
        let h = dist(&[0.5, 0.5]);
        let direct = 0.5 * (1.0f64 / 0.75).log2() + 0.25 * (0.5f64 / 0.75).log2() + 0.25 * (0.5f64 / 0.25).log2();
        let v = mutual_information(0.5, &a, &h, LogBase::Two).unwrap();
        assert!((v - direct).abs() < 1e-15);
        assert!((v - 0.311_278_124_459_132_8).abs() < 1e-15);
    }

    #[test]
    fn capacity_examples() {
        let a = dist(&[1.0, 0.0]);
        let b = dist(&[0.0, 1.0]);
        let (c, q) = capacity(&a, &b, LogBase::Two, 1e-10).unwrap();
        assert!((c - 1.0).abs() < 1e-15 && (q - 0.5).abs() < 1e-7, "{c} {q}");
        let (c, q) = capacity(&a, &b, LogBase::E, 1e-10).unwrap();
        assert!((c - std::f64::consts::LN_2).abs() < 1e-15 && (q - 0.5).abs() < 1e-7);
        assert_eq!(capacity(&a, &a, LogBase::Two, 1e-10).unwrap(), (0.0, 0.5));
        // Z-channel capacity log2(5/4)
        let h = dist(&[0.5, 0.5]);
        let (c, q) = capacity(&a, &h, LogBase::Two, 1e-12).unwrap();
        assert!((c - (1.25f64).log2()).abs() < 1e-14, "{c}");
        assert!((q - 0.6).abs() < 1e-6, "{q}");
    }

    #[test]
    fn marginal_examples() {
        let u = dist(&[0.125; 8]);
        let m = marginalize(&u, DetectorSubset::from_indices(&[1])).unwrap();
        assert_eq!(m.probabilities, vec![0.5, 0.5]);
        let p = dist(&[0.1, 0.2, 0.05, 0.15, 0.1, 0.1, 0.2, 0.1]);
        assert_eq!(marginalize(&p, DetectorSubset(0b111)).unwrap().probabilities, p.probabilities);
        let m = marginalize(&p, DetectorSubset::from_indices(&[0])).unwrap();
        assert!((m.probabilities[0] - 0.5).abs() < 1e-15);
        assert!(marginalize(&p, DetectorSubset(0)).is_err());
    }

    #[test]
    fn trivial_distributions() {
        let mut p = toy_pairings(vec![0.3, -0.2, 0.0]);
        let d0 = joint_distribution_from(&p, 0).unwrap();
        let q = toy_pairings(vec![9.0, 9.0, 9.0]);
        assert_eq!(d0, joint_distribution_from(&q, 0).unwrap());
        p.couplings = vec![0.0; 3];
        let d = joint_distribution_from(&p, 1).unwrap();
        assert!((d.probabilities[0] - 1.0).abs() < 1e-15);
    }

    #[test]
    fn silent_sender_gives_zero_capacity() {
        let mut p = toy_pairings(vec![0.3, -0.2, 0.1]);
        p.alice_coupling = 0.0;
        let table = capacity_table_from(&p, LogBase::Two, 1e-10).unwrap();
        assert!(table.entries.iter().all(|e| e.capacity == 0.0));
    }

    #[test]
    fn subset_labels() {
        let order: Vec<String> = subset_order(3).iter().map(|s| s.label()).collect();
        assert_eq!(order, ["B1", "B2", "B3", "B1B2", "B2B3", "B1B3", "B1B2B3"]);
        assert_eq!(DetectorSubset::parse("B2B3").unwrap(), DetectorSubset(0b110));
        assert!(DetectorSubset::parse("B0").is_err());
        assert!(DetectorSubset::parse("x").is_err());
        assert_eq!(subset_order(4).len(), 15);
    }
}
