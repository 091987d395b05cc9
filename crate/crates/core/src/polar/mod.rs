//! Binary polar code primitives.
//!
//! The encoding transform is `x = u · G_N` over GF(2) with
//! `G_N = B_N F^{⊗n}`, where `F = [[1,0],[1,1]]` and `B_N` is the
//! bit-reversal operator. `G_N` is an involution, so the same transform
//! inverts itself.
//!
//! One index convention is used throughout: reliabilities, information
//! sets, and the successive-cancellation decoder all refer to the natural
//! input index of `u`; bit reversal lives inside the transform and never
//! leaks into the API.

mod construct;
mod decode;

pub use construct::{construct_reliabilities, ConstructionChannel};
pub use decode::{sc_decode, ScDecodeResult, SATURATED_LLR};

use crate::bits::BitVector;
use crate::error::{Error, Result};

/// Permutation sending index `i` to the integer whose `n`-bit binary
/// representation is reversed.
pub fn bit_reversal_permutation(n: u32) -> Vec<usize> {
    let size = 1usize << n;
    (0..size)
        .map(|i| {
            let mut v = i;
            let mut r = 0usize;
            for _ in 0..n {
                r = (r << 1) | (v & 1);
                v >>= 1;
            }
            r
        })
        .collect()
}

/// In-place butterfly network computing `u ← u · F^{⊗n}`.
pub(crate) fn kronecker_transform_in_place(bits: &mut [u8]) {
    let n = bits.len();
    let mut step = 1;
    while step < n {
        let mut i = 0;
        while i < n {
            for j in i..i + step {
                bits[j] ^= bits[j + step];
            }
            i += 2 * step;
        }
        step *= 2;
    }
}

/// Applies `x = u · G_N` with `G_N = B_N F^{⊗n}`.
///
/// The transform is an involution: applying it to its own output recovers
/// the input. Runs in `O(N log N)` symbol operations. Fails if the length
/// is not a power of two.
pub fn polar_transform(u: &BitVector) -> Result<BitVector> {
    let len = u.len();
    if len == 0 || !len.is_power_of_two() {
        return Err(Error::InvalidLength(len));
    }
    let mut w = u.as_slice().to_vec();
    kronecker_transform_in_place(&mut w);
    // B_N F^{⊗n} = F^{⊗n} B_N, so the bit-reversal can be applied to the
    // butterfly output: x[rev(j)] = (u F^{⊗n})[j].
    let n = len.trailing_zeros();
    let rev = bit_reversal_permutation(n);
    let mut x = vec![0u8; len];
    for (j, &r) in rev.iter().enumerate() {
        x[r] = w[j];
    }
    Ok(BitVector::from_raw(x))
}

/// Rule used to pick the information set from a reliability vector.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum SelectionRule {
    /// All indices with reliability value at most `delta`.
    Threshold { delta: f64 },
    /// The `k` indices with smallest reliability; ties broken toward the
    /// lowest index.
    TopK { k: usize },
}

/// Selects information indices per `rule`. Returns a sorted index list.
pub fn select_info_set(reliability: &[f64], rule: SelectionRule) -> Result<Vec<usize>> {
    match rule {
        SelectionRule::Threshold { delta } => {
            if !(delta > 0.0 && delta < 1.0) {
                return Err(Error::Domain {
                    name: "delta",
                    value: delta,
                    range: "(0, 1)",
                });
            }
            Ok(reliability
                .iter()
                .enumerate()
                .filter(|&(_, &z)| z <= delta)
                .map(|(i, _)| i)
                .collect())
        }
        SelectionRule::TopK { k } => {
            if k > reliability.len() {
                return Err(Error::InvalidArgument(format!(
                    "k = {k} exceeds block length {}",
                    reliability.len()
                )));
            }
            let mut order: Vec<usize> = (0..reliability.len()).collect();
            order.sort_by(|&a, &b| {
                reliability[a]
                    .partial_cmp(&reliability[b])
                    .expect("reliability values are finite")
                    .then(a.cmp(&b))
            });
            let mut picked = order[..k].to_vec();
            picked.sort_unstable();
            Ok(picked)
        }
    }
}

/// One polar code: block length, information set, frozen-value assignment,
/// and the reliability vector plus the rule that produced the set.
#[derive(Debug, Clone)]
pub struct PolarCodeSpec {
    n: u32,
    info_mask: Vec<bool>,
    frozen_values: Vec<u8>,
    reliability: Vec<f64>,
    rule: SelectionRule,
}

impl PolarCodeSpec {
    /// Builds a spec from a reliability vector, selecting the information
    /// set with `rule` and freezing the complement to zero.
    pub fn new(reliability: Vec<f64>, rule: SelectionRule) -> Result<Self> {
        let len = reliability.len();
        if len == 0 || !len.is_power_of_two() {
            return Err(Error::InvalidLength(len));
        }
        if let Some(&z) = reliability.iter().find(|&&z| !(0.0..=1.0).contains(&z)) {
            return Err(Error::Domain {
                name: "reliability",
                value: z,
                range: "[0, 1]",
            });
        }
        let info = select_info_set(&reliability, rule)?;
        let mut info_mask = vec![false; len];
        for &i in &info {
            info_mask[i] = true;
        }
        Ok(Self {
            n: len.trailing_zeros(),
            info_mask,
            frozen_values: vec![0; len],
            reliability,
            rule,
        })
    }

    /// Builds a spec with an explicitly given information mask, recording
    /// the selection rule that produced the mask upstream.
    pub(crate) fn from_mask(
        reliability: Vec<f64>,
        info_mask: &[bool],
        rule: SelectionRule,
    ) -> Result<Self> {
        let len = reliability.len();
        if len == 0 || !len.is_power_of_two() {
            return Err(Error::InvalidLength(len));
        }
        if info_mask.len() != len {
            return Err(Error::InvalidArgument(format!(
                "mask length {} != reliability length {}",
                info_mask.len(),
                len
            )));
        }
        Ok(Self {
            n: len.trailing_zeros(),
            info_mask: info_mask.to_vec(),
            frozen_values: vec![0; len],
            reliability,
            rule,
        })
    }

    /// Replaces the frozen-value assignment. `values` must supply one
    /// symbol per index; entries at information positions are ignored.
    pub fn with_frozen_values(mut self, values: &[u8]) -> Result<Self> {
        if values.len() != self.block_len() {
            return Err(Error::InvalidArgument(format!(
                "frozen values length {} != block length {}",
                values.len(),
                self.block_len()
            )));
        }
        if values.iter().any(|&b| b > 1) {
            return Err(Error::InvalidArgument(
                "frozen values must be binary".into(),
            ));
        }
        for (i, &v) in values.iter().enumerate() {
            if !self.info_mask[i] {
                self.frozen_values[i] = v;
            }
        }
        Ok(self)
    }

    pub fn block_len(&self) -> usize {
        1usize << self.n
    }

    /// log2 of the block length.
    pub fn n(&self) -> u32 {
        self.n
    }

    pub fn info_len(&self) -> usize {
        self.info_mask.iter().filter(|&&m| m).count()
    }

    pub fn is_info(&self, idx: usize) -> bool {
        self.info_mask[idx]
    }

    /// Information indices in increasing order.
    pub fn info_indices(&self) -> impl Iterator<Item = usize> + '_ {
        self.info_mask
            .iter()
            .enumerate()
            .filter(|(_, &m)| m)
            .map(|(i, _)| i)
    }

    pub fn frozen_value(&self, idx: usize) -> u8 {
        self.frozen_values[idx]
    }

    pub fn reliability(&self) -> &[f64] {
        &self.reliability
    }

    pub fn rule(&self) -> SelectionRule {
        self.rule
    }

    /// Rate `K/N`.
    pub fn rate(&self) -> f64 {
        self.info_len() as f64 / self.block_len() as f64
    }

    /// Places `message` on the information set (in increasing index order),
    /// the frozen values elsewhere, and applies the polar transform.
    pub fn encode(&self, message: &BitVector) -> Result<BitVector> {
        if message.len() != self.info_len() {
            return Err(Error::InvalidArgument(format!(
                "message length {} != information set size {}",
                message.len(),
                self.info_len()
            )));
        }
        let mut u = self.frozen_values.clone();
        for (pos, &bit) in self.info_indices().zip(message.iter()) {
            u[pos] = bit;
        }
        polar_transform(&BitVector::from_raw(u))
    }

    /// Extracts the information symbols of a decoded `u` vector.
    pub fn extract_message(&self, u: &BitVector) -> BitVector {
        BitVector::from_raw(self.info_indices().map(|i| u[i]).collect())
    }
}

/// A binary symbol as seen at the channel output.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Symbol {
    Zero,
    One,
    Erased,
}

impl Symbol {
    pub fn from_bit(b: u8) -> Symbol {
        if b == 0 {
            Symbol::Zero
        } else {
            Symbol::One
        }
    }
}

/// What kind of channel produced an observation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ObservationKind {
    /// Hard symbols from a BSC with the given crossover probability.
    /// `crossover = 0` denotes a noiseless channel and decodes exactly.
    Bsc { crossover: f64 },
    /// Symbols of which some may be erased; known symbols are certain.
    BecSymbol,
}

/// A length-`N` channel observation fed to the SC decoder.
#[derive(Debug, Clone)]
pub struct ChannelObservation {
    kind: ObservationKind,
    symbols: Vec<Symbol>,
}

impl ChannelObservation {
    /// Observation of hard bits through a BSC(`crossover`).
    pub fn bsc(bits: &BitVector, crossover: f64) -> Result<Self> {
        if !(0.0..=0.5).contains(&crossover) {
            return Err(Error::Domain {
                name: "crossover",
                value: crossover,
                range: "[0, 0.5]",
            });
        }
        Ok(Self {
            kind: ObservationKind::Bsc { crossover },
            symbols: bits.iter().map(|&b| Symbol::from_bit(b)).collect(),
        })
    }

    /// Observation over an erasure channel.
    pub fn bec(symbols: Vec<Symbol>) -> Self {
        Self {
            kind: ObservationKind::BecSymbol,
            symbols,
        }
    }

    pub fn kind(&self) -> ObservationKind {
        self.kind
    }

    pub fn len(&self) -> usize {
        self.symbols.len()
    }

    pub fn is_empty(&self) -> bool {
        self.symbols.is_empty()
    }

    pub fn symbols(&self) -> &[Symbol] {
        &self.symbols
    }
}
