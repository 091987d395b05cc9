//! Hierarchical coding for the block-fading binary symmetric channel.
//!
//! A fading BSC with `S` states polarizes differently per state. Ordering
//! states from worst (largest crossover) to best, the per-state information
//! sets nest, which splits the input indices into: a set `G` good under
//! every state, middle sets `M_1 .. M_{S-1}` good only for states above a
//! level, and a set `B` bad everywhere. Indices in `M_s` behave, across
//! fading blocks, like a binary erasure channel with erasure probability
//! `e_s = q_1 + … + q_s`: the receiver (which knows the realized states)
//! sees their values from good-state blocks and erasures elsewhere.
//!
//! The encoder therefore runs in two phases — erasure-channel polar codes
//! down the columns of `M`, then per-block polar codes across the rows —
//! and the decoder unwinds the construction in `2S − 1` phases without the
//! transmitter ever knowing the realized states.

mod hier;

pub use hier::{hier_decode, hier_encode, HierDecodeResult, PhaseFailure};

use crate::bits::BitVector;
use crate::error::{Error, Result};
use crate::math::binary_entropy;
use crate::polar::{
    construct_reliabilities, select_info_set, ConstructionChannel, PolarCodeSpec, SelectionRule,
};

const PROB_SUM_TOLERANCE: f64 = 1e-12;

/// One fading state: a crossover probability and its occurrence probability.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FadingState {
    pub crossover: f64,
    pub prob: f64,
}

/// Ordered fading states, worst first: `p_1 ≥ p_2 ≥ … ≥ p_S ≥ 0`, all at
/// most 0.5, with positive probabilities summing to one.
#[derive(Debug, Clone, PartialEq)]
pub struct FadingProfile {
    states: Vec<FadingState>,
}

impl FadingProfile {
    pub fn new(states: Vec<FadingState>) -> Result<Self> {
        if states.is_empty() {
            return Err(Error::InvalidArgument("profile has no states".into()));
        }
        for s in &states {
            if !(0.0..=0.5).contains(&s.crossover) {
                return Err(Error::Domain {
                    name: "crossover",
                    value: s.crossover,
                    range: "[0, 0.5]",
                });
            }
            if s.prob <= 0.0 {
                return Err(Error::Domain {
                    name: "state probability",
                    value: s.prob,
                    range: "(0, 1]",
                });
            }
        }
        if states.windows(2).any(|w| w[0].crossover < w[1].crossover) {
            return Err(Error::InvalidArgument(
                "crossover probabilities must be non-increasing".into(),
            ));
        }
        let total: f64 = states.iter().map(|s| s.prob).sum();
        if (total - 1.0).abs() > PROB_SUM_TOLERANCE {
            return Err(Error::Domain {
                name: "sum of state probabilities",
                value: total,
                range: "1 (within 1e-12)",
            });
        }
        Ok(Self { states })
    }

    /// Convenience constructor from parallel crossover / probability lists.
    pub fn from_parts(crossovers: &[f64], probs: &[f64]) -> Result<Self> {
        if crossovers.len() != probs.len() {
            return Err(Error::InvalidArgument(
                "crossover and probability lists differ in length".into(),
            ));
        }
        Self::new(
            crossovers
                .iter()
                .zip(probs)
                .map(|(&crossover, &prob)| FadingState { crossover, prob })
                .collect(),
        )
    }

    pub fn num_states(&self) -> usize {
        self.states.len()
    }

    pub fn states(&self) -> &[FadingState] {
        &self.states
    }

    pub fn crossover(&self, state: usize) -> f64 {
        self.states[state].crossover
    }

    pub fn prob(&self, state: usize) -> f64 {
        self.states[state].prob
    }
}

/// Cumulative erasure probabilities of the per-index overlay channels:
/// `e_s = q_1 + … + q_s` for `s = 1 .. S−1` (returned 0-indexed).
/// Empty when the profile has a single state.
pub fn erasure_probabilities(profile: &FadingProfile) -> Vec<f64> {
    let mut acc = 0.0;
    profile
        .states()
        .iter()
        .take(profile.num_states() - 1)
        .map(|s| {
            acc += s.prob;
            acc
        })
        .collect()
}

/// Ergodic capacity of the fading BSC in bits per channel use:
/// the state-probability-weighted average of `1 − H(p_s)`.
pub fn ergodic_capacity_bsc(profile: &FadingProfile) -> f64 {
    profile
        .states()
        .iter()
        .map(|s| s.prob * (1.0 - binary_entropy(s.crossover)))
        .sum()
}

/// The index classes of the hierarchical construction, together with the
/// per-state reliability vectors and the threshold that produced them.
#[derive(Debug, Clone)]
pub struct SetPartition {
    n: u32,
    delta: f64,
    good: Vec<usize>,
    middle: Vec<Vec<usize>>,
    bad: Vec<usize>,
    state_reliability: Vec<Vec<f64>>,
}

impl SetPartition {
    /// Block length `N = 2^n`.
    pub fn block_len(&self) -> usize {
        1usize << self.n
    }

    pub fn n(&self) -> u32 {
        self.n
    }

    /// The threshold used to build the per-state information sets.
    pub fn delta(&self) -> f64 {
        self.delta
    }

    /// Indices reliable under every state.
    pub fn good(&self) -> &[usize] {
        &self.good
    }

    /// `middle()[s]` is reliable exactly for states above level `s`
    /// (0-indexed; there are `S − 1` middle sets).
    pub fn middle(&self) -> &[Vec<usize>] {
        &self.middle
    }

    /// Indices unreliable under every state.
    pub fn bad(&self) -> &[usize] {
        &self.bad
    }

    /// Reliability vector of state `s` (0-indexed, worst state first).
    pub fn state_reliability(&self, state: usize) -> &[f64] {
        &self.state_reliability[state]
    }

    /// The information set of state `s`: `G ∪ M_1 ∪ … ∪ M_s` (0-indexed:
    /// `a_set(0) = G`). Returned sorted.
    pub fn a_set(&self, state: usize) -> Vec<usize> {
        let mut set = self.good.clone();
        for m in &self.middle[..state] {
            set.extend_from_slice(m);
        }
        set.sort_unstable();
        set
    }

    /// Membership mask of `a_set(state)`.
    pub(crate) fn a_mask(&self, state: usize) -> Vec<bool> {
        let mut mask = vec![false; self.block_len()];
        for &i in &self.good {
            mask[i] = true;
        }
        for m in &self.middle[..state] {
            for &i in m {
                mask[i] = true;
            }
        }
        mask
    }

    /// Total number of middle indices.
    pub fn num_columns(&self) -> usize {
        self.middle.iter().map(|m| m.len()).sum()
    }
}

/// Builds the set partition for a fading profile by thresholding each
/// state's reliability vector at `delta`.
///
/// Because the construction is pointwise monotone in the crossover, the
/// per-state sets nest (`A_s ⊆ A_{s+1}` going from worst to best state),
/// making `G = A_1`, `M_s = A_{s+1} \ A_s`, and `B` the complement of the
/// best state's set.
pub fn partition_indices(n: u32, profile: &FadingProfile, delta: f64) -> Result<SetPartition> {
    if !(delta > 0.0 && delta < 1.0) {
        return Err(Error::Domain {
            name: "delta",
            value: delta,
            range: "(0, 1)",
        });
    }
    let len = 1usize << n;
    let state_reliability: Vec<Vec<f64>> = profile
        .states()
        .iter()
        .map(|s| {
            construct_reliabilities(
                n,
                ConstructionChannel::Bsc {
                    crossover: s.crossover,
                },
            )
        })
        .collect::<Result<_>>()?;

    let rule = SelectionRule::Threshold { delta };
    let mut previous: Vec<bool> = vec![false; len];
    let mut good = Vec::new();
    let mut middle = Vec::new();
    for (s, rel) in state_reliability.iter().enumerate() {
        let set = select_info_set(rel, rule)?;
        let mut mask = vec![false; len];
        for &i in &set {
            mask[i] = true;
        }
        // nesting follows from pointwise dominance; assert it anyway
        debug_assert!(
            previous.iter().zip(&mask).all(|(&p, &c)| !p || c),
            "information sets failed to nest"
        );
        if s == 0 {
            good = set;
        } else {
            middle.push(
                (0..len)
                    .filter(|&i| mask[i] && !previous[i])
                    .collect::<Vec<_>>(),
            );
        }
        previous = mask;
    }
    let bad = (0..len).filter(|&i| !previous[i]).collect();
    Ok(SetPartition {
        n,
        delta,
        good,
        middle,
        bad,
        state_reliability,
    })
}

/// How the blockwise erasure-code rates are chosen.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum BecRateRule {
    /// `K_s = ⌊(1 − e_s − margin) B⌋`: rate pinned to the overlay channel
    /// capacity minus a fixed margin.
    CapacityMargin { margin: f64 },
    /// `K_s = ⌊(1 − backoff) · |{j : Z_j ≤ delta}|⌋`: threshold-selected
    /// set shrunk by a fractional back-off. Calibrated for finite-length
    /// decoding.
    ThresholdBackoff { delta: f64, backoff: f64 },
}

/// Builds the `S − 1` blockwise erasure-code specs (length `B = 2^b_exp`,
/// one per middle level). Information sets are the most reliable indices of
/// the exact erasure-channel construction. Empty for a single-state profile.
pub fn build_bec_specs(
    profile: &FadingProfile,
    b_exp: u32,
    rule: BecRateRule,
) -> Result<Vec<PolarCodeSpec>> {
    match rule {
        BecRateRule::CapacityMargin { margin } => {
            if !(0.0..1.0).contains(&margin) {
                return Err(Error::Domain {
                    name: "margin",
                    value: margin,
                    range: "[0, 1)",
                });
            }
        }
        BecRateRule::ThresholdBackoff { delta, backoff } => {
            if !(delta > 0.0 && delta < 1.0) {
                return Err(Error::Domain {
                    name: "delta",
                    value: delta,
                    range: "(0, 1)",
                });
            }
            if !(0.0..1.0).contains(&backoff) {
                return Err(Error::Domain {
                    name: "backoff",
                    value: backoff,
                    range: "[0, 1)",
                });
            }
        }
    }
    let b_len = 1usize << b_exp;
    erasure_probabilities(profile)
        .iter()
        .map(|&e| {
            let rel = construct_reliabilities(b_exp, ConstructionChannel::Bec { erasure: e })?;
            let k = match rule {
                BecRateRule::CapacityMargin { margin } => {
                    (((1.0 - e - margin) * b_len as f64).floor()).max(0.0) as usize
                }
                BecRateRule::ThresholdBackoff { delta, backoff } => {
                    let within = rel.iter().filter(|&&z| z <= delta).count();
                    ((1.0 - backoff) * within as f64).floor() as usize
                }
            };
            PolarCodeSpec::new(rel, SelectionRule::TopK { k })
        })
        .collect()
}

/// The scheme's information rate in bits per channel use:
/// `(B·|G| + Σ_s |M_s|·|Ã_s|) / (N·B)`.
pub fn theoretical_rate(partition: &SetPartition, bec_specs: &[PolarCodeSpec]) -> f64 {
    let n = partition.block_len() as f64;
    let g = partition.good().len() as f64;
    if bec_specs.is_empty() {
        return g / n;
    }
    let b = bec_specs[0].block_len() as f64;
    let column_bits: f64 = partition
        .middle()
        .iter()
        .zip(bec_specs)
        .map(|(m, spec)| (m.len() * spec.info_len()) as f64)
        .sum();
    (b * g + column_bits) / (n * b)
}

/// The two message layers: per-block information bits carried on `G`, and
/// blockwise (column) messages carried by the erasure codes, grouped by
/// middle level.
#[derive(Debug, Clone, PartialEq)]
pub struct HierMessage {
    pub row_messages: Vec<BitVector>,
    pub column_messages: Vec<Vec<BitVector>>,
}

impl HierMessage {
    /// Draws a uniformly random message of the right shape.
    pub fn random<R: rand::Rng + ?Sized>(
        rng: &mut R,
        partition: &SetPartition,
        bec_specs: &[PolarCodeSpec],
        b_len: usize,
    ) -> Self {
        let rows = (0..b_len)
            .map(|_| BitVector::random(rng, partition.good().len()))
            .collect();
        let cols = partition
            .middle()
            .iter()
            .zip(bec_specs)
            .map(|(m, spec)| {
                (0..m.len())
                    .map(|_| BitVector::random(rng, spec.info_len()))
                    .collect()
            })
            .collect();
        Self {
            row_messages: rows,
            column_messages: cols,
        }
    }

    /// Total number of information bits.
    pub fn bit_count(&self) -> usize {
        let rows: usize = self.row_messages.iter().map(BitVector::len).sum();
        let cols: usize = self
            .column_messages
            .iter()
            .flatten()
            .map(BitVector::len)
            .sum();
        rows + cols
    }
}

/// A `B × N` binary matrix as sent over (or received from) the channel.
/// State labels are attached only on the receive side, where the decoder
/// learns them (CSI at the decoder).
#[derive(Debug, Clone, PartialEq)]
pub struct CodewordMatrix {
    rows: Vec<BitVector>,
    block_states: Option<Vec<usize>>,
}

impl CodewordMatrix {
    pub fn new(rows: Vec<BitVector>) -> Result<Self> {
        if rows.is_empty() {
            return Err(Error::InvalidArgument("matrix has no rows".into()));
        }
        let n = rows[0].len();
        if rows.iter().any(|r| r.len() != n) {
            return Err(Error::InvalidArgument("ragged matrix rows".into()));
        }
        Ok(Self {
            rows,
            block_states: None,
        })
    }

    /// Attaches per-row state labels (0-indexed into the fading profile).
    pub fn with_block_states(mut self, states: Vec<usize>) -> Result<Self> {
        if states.len() != self.rows.len() {
            return Err(Error::InvalidArgument(format!(
                "{} state labels for {} rows",
                states.len(),
                self.rows.len()
            )));
        }
        self.block_states = Some(states);
        Ok(self)
    }

    pub fn num_blocks(&self) -> usize {
        self.rows.len()
    }

    pub fn block_len(&self) -> usize {
        self.rows[0].len()
    }

    pub fn row(&self, b: usize) -> &BitVector {
        &self.rows[b]
    }

    pub fn rows(&self) -> &[BitVector] {
        &self.rows
    }

    pub fn block_states(&self) -> Option<&[usize]> {
        self.block_states.as_deref()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn profile_validation() {
        assert!(FadingProfile::from_parts(&[0.1, 0.2], &[0.5, 0.5]).is_err()); // ascending
        assert!(FadingProfile::from_parts(&[0.2, 0.1], &[0.5, 0.4]).is_err()); // sum != 1
        assert!(FadingProfile::from_parts(&[0.6], &[1.0]).is_err()); // p > 0.5
        assert!(FadingProfile::from_parts(&[0.2, 0.1], &[0.5, 0.5]).is_ok());
        assert!(FadingProfile::from_parts(&[0.2, 0.2], &[0.5, 0.5]).is_ok()); // ties allowed
    }

    #[test]
    fn erasure_probability_examples() {
        let p = FadingProfile::from_parts(&[0.2, 0.1], &[0.3, 0.7]).unwrap();
        assert_eq!(erasure_probabilities(&p), vec![0.3]);
        let p = FadingProfile::from_parts(&[0.3, 0.2, 0.1], &[0.2, 0.3, 0.5]).unwrap();
        assert_eq!(erasure_probabilities(&p), vec![0.2, 0.5]);
        let p = FadingProfile::from_parts(&[0.1], &[1.0]).unwrap();
        assert!(erasure_probabilities(&p).is_empty());
    }

    #[test]
    fn erasure_probabilities_strictly_increase() {
        let p = FadingProfile::from_parts(&[0.3, 0.2, 0.1, 0.05], &[0.1, 0.2, 0.3, 0.4]).unwrap();
        let e = erasure_probabilities(&p);
        assert_eq!(e.len(), 3);
        assert!(e.windows(2).all(|w| w[1] > w[0]));
    }

    #[test]
    fn capacity_examples() {
        let p = FadingProfile::from_parts(&[0.5], &[1.0]).unwrap();
        assert!(ergodic_capacity_bsc(&p).abs() < 1e-15);
        let p = FadingProfile::from_parts(&[0.0, 0.0], &[0.25, 0.75]).unwrap();
        assert!((ergodic_capacity_bsc(&p) - 1.0).abs() < 1e-15);
        let p = FadingProfile::from_parts(&[0.11, 0.03], &[0.5, 0.5]).unwrap();
        assert!((ergodic_capacity_bsc(&p) - 0.6529).abs() < 5e-4);
    }

    #[test]
    fn single_state_partition_has_no_middle() {
        let p = FadingProfile::from_parts(&[0.1], &[1.0]).unwrap();
        let part = partition_indices(6, &p, 1e-3).unwrap();
        assert!(part.middle().is_empty());
        assert_eq!(part.good().len() + part.bad().len(), 64);
    }

    #[test]
    fn equal_states_give_empty_middle() {
        let p = FadingProfile::from_parts(&[0.08, 0.08], &[0.5, 0.5]).unwrap();
        let part = partition_indices(7, &p, 1e-3).unwrap();
        assert_eq!(part.middle().len(), 1);
        assert!(part.middle()[0].is_empty());
    }

    #[test]
    fn partition_is_disjoint_and_exhaustive() {
        let p = FadingProfile::from_parts(&[0.2, 0.11, 0.03], &[0.3, 0.3, 0.4]).unwrap();
        let part = partition_indices(8, &p, 1e-3).unwrap();
        let mut seen = vec![0u8; 256];
        for &i in part.good() {
            seen[i] += 1;
        }
        for m in part.middle() {
            for &i in m {
                seen[i] += 1;
            }
        }
        for &i in part.bad() {
            seen[i] += 1;
        }
        assert!(seen.iter().all(|&c| c == 1));
        // nesting of A-sets
        for s in 0..2 {
            let a = part.a_set(s);
            let b = part.a_set(s + 1);
            let bset: std::collections::HashSet<_> = b.into_iter().collect();
            assert!(a.iter().all(|i| bset.contains(i)));
        }
    }

    #[test]
    fn bec_specs_sizes() {
        let p = FadingProfile::from_parts(&[0.11, 0.03], &[0.5, 0.5]).unwrap();
        let specs = build_bec_specs(&p, 8, BecRateRule::CapacityMargin { margin: 0.05 }).unwrap();
        assert_eq!(specs.len(), 1);
        assert_eq!(specs[0].block_len(), 256);
        assert_eq!(specs[0].info_len(), 115); // floor((1-0.5-0.05)*256)
        let single = FadingProfile::from_parts(&[0.1], &[1.0]).unwrap();
        assert!(
            build_bec_specs(&single, 8, BecRateRule::CapacityMargin { margin: 0.05 })
                .unwrap()
                .is_empty()
        );
    }

    #[test]
    fn theoretical_rate_limits() {
        // |G| = N, no middle: rate 1
        let p = FadingProfile::from_parts(&[0.0], &[1.0]).unwrap();
        let part = partition_indices(4, &p, 1e-3).unwrap();
        assert_eq!(part.good().len(), 16);
        assert_eq!(theoretical_rate(&part, &[]), 1.0);
    }

    #[test]
    fn theoretical_rate_single_middle_arithmetic() {
        // extreme two-state profile: worst state is useless (p = 0.5), best
        // is perfect (p = 0), so G is empty and one middle set spans all N;
        // a rate-1/2 column code then gives overall rate 1/2
        let p = FadingProfile::from_parts(&[0.5, 0.0], &[0.5, 0.5]).unwrap();
        let part = partition_indices(4, &p, 1e-4).unwrap();
        assert!(part.good().is_empty());
        assert_eq!(part.middle()[0].len(), 16);
        let rel = construct_reliabilities(3, ConstructionChannel::Bec { erasure: 0.5 }).unwrap();
        let spec = PolarCodeSpec::new(rel, SelectionRule::TopK { k: 4 }).unwrap();
        assert_eq!(theoretical_rate(&part, &[spec]), 0.5);
    }
}
