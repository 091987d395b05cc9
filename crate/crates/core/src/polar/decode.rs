//! Successive-cancellation decoding over log-likelihood ratios.
//!
//! Sign-positive LLR means symbol 0. Channel evidence for a BSC symbol has
//! magnitude `ln((1−p)/p)`; an erased symbol carries exactly 0; a known
//! symbol carries the saturating magnitude [`SATURATED_LLR`] so that all
//! arithmetic stays finite. Ties (LLR exactly 0 at an information index)
//! decode to 0 and, for erasure-channel observations, are reported as
//! undecodable positions.

use super::{bit_reversal_permutation, ChannelObservation, ObservationKind, PolarCodeSpec, Symbol};
use crate::bits::BitVector;
use crate::error::{Error, Result};

/// Evidence magnitude standing in for "known with certainty".
///
/// Large enough that it cannot be washed out by the check-side combines
/// (each costs at most `ln 2`), small enough that sums across a block stay
/// comfortably inside `f64` range.
pub const SATURATED_LLR: f64 = 1.0e3;

/// Decoded input vector plus flags for positions the observation left
/// undetermined (erasure channels only).
#[derive(Debug, Clone)]
pub struct ScDecodeResult {
    u: BitVector,
    undecodable: Vec<usize>,
}

impl ScDecodeResult {
    /// The decoded `u` vector (frozen positions hold their frozen values).
    pub fn u(&self) -> &BitVector {
        &self.u
    }

    /// Information positions whose decision had zero evidence; their
    /// decision value is 0. Empty for BSC observations.
    pub fn undecodable(&self) -> &[usize] {
        &self.undecodable
    }

    pub fn is_complete(&self) -> bool {
        self.undecodable.is_empty()
    }

    pub fn into_u(self) -> BitVector {
        self.u
    }
}

/// Exact check-side LLR combine, `L1 ⊞ L2`, in a form that is stable for
/// any finite inputs and maps an exact-zero input to an exact zero.
#[inline]
fn boxplus(a: f64, b: f64) -> f64 {
    let sign = if (a < 0.0) != (b < 0.0) { -1.0 } else { 1.0 };
    sign * a.abs().min(b.abs()) + ((-(a + b).abs()).exp().ln_1p() - (-(a - b).abs()).exp().ln_1p())
}

struct ScWorkspace {
    // one buffer per tree level, level d holding N >> d entries
    llr: Vec<Vec<f64>>,
    xbits: Vec<Vec<u8>>,
}

impl ScWorkspace {
    fn new(n: u32) -> Self {
        let llr = (0..=n).map(|d| vec![0.0; 1usize << (n - d)]).collect();
        let xbits = (0..=n).map(|d| vec![0u8; 1usize << (n - d)]).collect();
        Self { llr, xbits }
    }
}

/// Decodes `u_{1:N}` from a channel observation.
///
/// Frozen positions take their values from `spec`; information positions
/// follow the likelihood-ratio decision with ties resolved to 0. Runs in
/// `O(N log N)`.
pub fn sc_decode(obs: &ChannelObservation, spec: &PolarCodeSpec) -> Result<ScDecodeResult> {
    let len = spec.block_len();
    if obs.len() != len {
        return Err(Error::InvalidArgument(format!(
            "observation length {} != block length {}",
            obs.len(),
            len
        )));
    }
    let channel_llr = |s: Symbol| -> Result<f64> {
        match obs.kind() {
            ObservationKind::Bsc { crossover } => {
                let magnitude = if crossover <= 0.0 {
                    SATURATED_LLR
                } else {
                    (((1.0 - crossover) / crossover).ln()).min(SATURATED_LLR)
                };
                match s {
                    Symbol::Zero => Ok(magnitude),
                    Symbol::One => Ok(-magnitude),
                    Symbol::Erased => Err(Error::InvalidArgument(
                        "BSC observation contains an erased symbol".into(),
                    )),
                }
            }
            ObservationKind::BecSymbol => Ok(match s {
                Symbol::Zero => SATURATED_LLR,
                Symbol::One => -SATURATED_LLR,
                Symbol::Erased => 0.0,
            }),
        }
    };

    let n = spec.n();
    let mut ws = ScWorkspace::new(n);
    // The transform routes input j of the butterfly network to channel
    // symbol rev(j), so the decoder reads the observation bit-reversed.
    let rev = bit_reversal_permutation(n);
    for (j, &r) in rev.iter().enumerate() {
        ws.llr[0][j] = channel_llr(obs.symbols()[r])?;
    }

    let mut u = vec![0u8; len];
    let mut undecodable = Vec::new();
    decode_rec(&mut ws, 0, 0, spec, &mut u, &mut undecodable);
    undecodable.sort_unstable();
    Ok(ScDecodeResult {
        u: BitVector::from_raw(u),
        undecodable,
    })
}

/// Recursive SC over the workspace. `depth` selects the buffers, `offset`
/// is the subtree's first natural `u` index. On return, `ws.xbits[depth]`
/// holds the subtree's partial codeword (butterfly domain).
fn decode_rec(
    ws: &mut ScWorkspace,
    depth: usize,
    offset: usize,
    spec: &PolarCodeSpec,
    u: &mut [u8],
    undecodable: &mut Vec<usize>,
) {
    let m = ws.llr[depth].len();
    if m == 1 {
        let llr = ws.llr[depth][0];
        let bit = if !spec.is_info(offset) {
            spec.frozen_value(offset)
        } else {
            if llr == 0.0 {
                undecodable.push(offset);
            }
            u8::from(llr < 0.0)
        };
        u[offset] = bit;
        ws.xbits[depth][0] = bit;
        return;
    }
    let half = m / 2;
    for i in 0..half {
        ws.llr[depth + 1][i] = boxplus(ws.llr[depth][i], ws.llr[depth][i + half]);
    }
    decode_rec(ws, depth + 1, offset, spec, u, undecodable);
    // stash the left partial codeword before the right child reuses the buffer
    for i in 0..half {
        ws.xbits[depth][i] = ws.xbits[depth + 1][i];
    }
    for i in 0..half {
        let sign = if ws.xbits[depth][i] == 1 { -1.0 } else { 1.0 };
        ws.llr[depth + 1][i] = ws.llr[depth][i + half] + sign * ws.llr[depth][i];
    }
    decode_rec(ws, depth + 1, offset + half, spec, u, undecodable);
    for i in 0..half {
        ws.xbits[depth][i] ^= ws.xbits[depth + 1][i];
        ws.xbits[depth][i + half] = ws.xbits[depth + 1][i];
    }
}
