//! Two-phase hierarchical encoder and `2S − 1`-phase decoder.

use super::{CodewordMatrix, FadingProfile, HierMessage, SetPartition};
use crate::bits::BitVector;
use crate::error::{Error, Result};
use crate::polar::{polar_transform, sc_decode, ChannelObservation, PolarCodeSpec, Symbol};

/// Column-to-index assignment: middle levels are consumed in order and the
/// indices inside each level in increasing order. Returns, per level, the
/// list of `u`-indices its columns occupy.
fn column_layout(partition: &SetPartition) -> Vec<Vec<usize>> {
    partition.middle().to_vec()
}

fn check_dims(
    msg: &HierMessage,
    partition: &SetPartition,
    bec_specs: &[PolarCodeSpec],
) -> Result<usize> {
    let levels = partition.middle().len();
    if bec_specs.len() != levels {
        return Err(Error::InvalidArgument(format!(
            "{} erasure-code specs for {} middle levels",
            bec_specs.len(),
            levels
        )));
    }
    if msg.column_messages.len() != levels {
        return Err(Error::InvalidArgument(format!(
            "{} column-message groups for {} middle levels",
            msg.column_messages.len(),
            levels
        )));
    }
    let b_len = if let Some(spec) = bec_specs.first() {
        spec.block_len()
    } else {
        msg.row_messages.len()
    };
    if msg.row_messages.is_empty() || msg.row_messages.len() != b_len {
        return Err(Error::InvalidArgument(format!(
            "{} row messages for {} blocks",
            msg.row_messages.len(),
            b_len
        )));
    }
    let g_len = partition.good().len();
    if let Some(bad) = msg.row_messages.iter().find(|m| m.len() != g_len) {
        return Err(Error::InvalidArgument(format!(
            "row message length {} != |G| = {}",
            bad.len(),
            g_len
        )));
    }
    for (level, (group, spec)) in msg.column_messages.iter().zip(bec_specs).enumerate() {
        if spec.block_len() != b_len {
            return Err(Error::InvalidArgument(format!(
                "erasure-code length {} at level {} != {}",
                spec.block_len(),
                level,
                b_len
            )));
        }
        if group.len() != partition.middle()[level].len() {
            return Err(Error::InvalidArgument(format!(
                "{} column messages at level {} for {} columns",
                group.len(),
                level,
                partition.middle()[level].len()
            )));
        }
        if let Some(bad) = group.iter().find(|v| v.len() != spec.info_len()) {
            return Err(Error::InvalidArgument(format!(
                "column message length {} at level {} != information size {}",
                bad.len(),
                level,
                spec.info_len()
            )));
        }
    }
    Ok(b_len)
}

/// Phase 1 encodes every column message into a length-`B` erasure-code
/// codeword; phase 2 transposes those codewords into the per-block message
/// vectors (information bits on `G`, column symbols on the middle sets,
/// zeros on `B`set) and applies the length-`N` polar transform per block.
pub fn hier_encode(
    msg: &HierMessage,
    partition: &SetPartition,
    bec_specs: &[PolarCodeSpec],
) -> Result<CodewordMatrix> {
    let b_len = check_dims(msg, partition, bec_specs)?;
    let n_len = partition.block_len();
    let layout = column_layout(partition);

    // Phase 1: one erasure-code codeword per middle column.
    // column_bits[b][column] with columns in global (level-major) order.
    let mut column_codewords: Vec<BitVector> = Vec::with_capacity(partition.num_columns());
    for (group, spec) in msg.column_messages.iter().zip(bec_specs) {
        for v in group {
            column_codewords.push(spec.encode(v)?);
        }
    }

    // Phase 2: assemble u^{(b)} per block and transform.
    let mut rows = Vec::with_capacity(b_len);
    for b in 0..b_len {
        let mut u = vec![0u8; n_len];
        for (&idx, bit) in partition.good().iter().zip(msg.row_messages[b].iter()) {
            u[idx] = *bit;
        }
        let mut col = 0;
        for level_indices in &layout {
            for &idx in level_indices {
                u[idx] = column_codewords[col][b];
                col += 1;
            }
        }
        rows.push(polar_transform(&BitVector::from_raw(u))?);
    }
    CodewordMatrix::new(rows)
}

/// Where a decoding phase reported unrecoverable symbols.
#[derive(Debug, Clone, PartialEq)]
pub struct PhaseFailure {
    /// Middle level (0-indexed) whose erasure-decoding phase failed.
    pub level: usize,
    /// Column position within the level.
    pub column: usize,
    /// Blockwise message positions that were undecodable.
    pub undecodable: Vec<usize>,
}

/// Decoded message layers plus a map of erasure-phase failures. Downstream
/// phases always consume best-effort values, so the message is complete
/// even when failures are present.
#[derive(Debug, Clone)]
pub struct HierDecodeResult {
    pub message: HierMessage,
    pub failures: Vec<PhaseFailure>,
}

impl HierDecodeResult {
    pub fn is_clean(&self) -> bool {
        self.failures.is_empty()
    }
}

/// Runs the `2S − 1` decoding phases.
///
/// Blocks in the best state are decoded first (all middle indices treated
/// as information). Then, per level `s` from best to worst: the already
/// decoded blocks reveal each level-`s` column up to erasures at rows whose
/// state is `s` or worse; the erasure decoder fills those in and re-encoding
/// recovers every row's symbol; the recovered symbols then serve as frozen
/// values when the state-`s` blocks themselves are decoded.
pub fn hier_decode(
    received: &CodewordMatrix,
    partition: &SetPartition,
    profile: &FadingProfile,
    bec_specs: &[PolarCodeSpec],
) -> Result<HierDecodeResult> {
    let states = received.block_states().ok_or_else(|| {
        Error::Precondition("received matrix carries no block state labels".into())
    })?;
    let num_states = profile.num_states();
    if let Some(&bad) = states.iter().find(|&&s| s >= num_states) {
        return Err(Error::InvalidArgument(format!(
            "block state label {bad} out of range for {num_states} states"
        )));
    }
    if bec_specs.len() + 1 != num_states {
        return Err(Error::InvalidArgument(format!(
            "{} erasure-code specs for {} states",
            bec_specs.len(),
            num_states
        )));
    }
    let b_len = received.num_blocks();
    if bec_specs.iter().any(|s| s.block_len() != b_len) {
        return Err(Error::InvalidArgument(
            "erasure-code length differs from number of blocks".into(),
        ));
    }
    if received.block_len() != partition.block_len() {
        return Err(Error::InvalidArgument(format!(
            "received block length {} != partition block length {}",
            received.block_len(),
            partition.block_len()
        )));
    }

    let layout = column_layout(partition);
    let n_len = partition.block_len();

    let mut u_hat: Vec<Option<BitVector>> = vec![None; b_len];
    // recovered[idx][b] for middle indices; None until the level is done
    let mut recovered: Vec<Option<Vec<u8>>> = vec![None; n_len];
    let mut column_hat: Vec<Vec<BitVector>> = vec![Vec::new(); layout.len()];
    let mut failures = Vec::new();

    for s in (0..num_states).rev() {
        // Erasure phase for level s (runs for every state but the best):
        // blocks with state > s are decoded, the rest appear as erasures.
        if s < num_states - 1 {
            let spec = &bec_specs[s];
            let mut level_hat = Vec::with_capacity(layout[s].len());
            for (k, &idx) in layout[s].iter().enumerate() {
                let column: Vec<Symbol> = (0..b_len)
                    .map(|b| {
                        if states[b] > s {
                            Symbol::from_bit(
                                u_hat[b].as_ref().expect("states > s are decoded")[idx],
                            )
                        } else {
                            Symbol::Erased
                        }
                    })
                    .collect();
                let res = sc_decode(&ChannelObservation::bec(column), spec)?;
                if !res.is_complete() {
                    failures.push(PhaseFailure {
                        level: s,
                        column: k,
                        undecodable: res.undecodable().to_vec(),
                    });
                }
                // re-encode to recover the symbols of every block
                let full = spec.encode(&spec.extract_message(res.u()))?;
                recovered[idx] = Some(full.as_slice().to_vec());
                level_hat.push(spec.extract_message(res.u()));
            }
            column_hat[s] = level_hat;
        }

        // Block phase for state s: information set A_s, frozen values from
        // the recovered middle levels >= s and zeros on the bad set.
        let a_mask = partition.a_mask(s);
        let mut frozen = vec![0u8; n_len];
        let base_spec = decode_spec(partition, &a_mask)?;
        for b in 0..b_len {
            if states[b] != s {
                continue;
            }
            for level in s..layout.len() {
                for &idx in &layout[level] {
                    frozen[idx] = recovered[idx].as_ref().expect("level recovered")[b];
                }
            }
            let spec = base_spec.clone().with_frozen_values(&frozen)?;
            let obs = ChannelObservation::bsc(received.row(b), profile.crossover(s))?;
            let res = sc_decode(&obs, &spec)?;
            u_hat[b] = Some(res.into_u());
        }
    }

    let good = partition.good();
    let row_messages = u_hat
        .into_iter()
        .map(|u| {
            let u = u.expect("every block decoded");
            BitVector::from_raw(good.iter().map(|&i| u[i]).collect())
        })
        .collect();

    Ok(HierDecodeResult {
        message: HierMessage {
            row_messages,
            column_messages: column_hat,
        },
        failures,
    })
}

/// A code spec over the partition's block length whose information set is
/// given by `a_mask`. Reliabilities are not used for decoding decisions,
/// so the worst state's vector stands in.
fn decode_spec(partition: &SetPartition, a_mask: &[bool]) -> Result<PolarCodeSpec> {
    PolarCodeSpec::from_mask(
        partition.state_reliability(0).to_vec(),
        a_mask,
        crate::polar::SelectionRule::Threshold {
            delta: partition.delta(),
        },
    )
}
