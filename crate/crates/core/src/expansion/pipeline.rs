//! End-to-end transmission over the fading AEN channel.
//!
//! Active levels carry hierarchical fading-BSC codewords (uniform bits);
//! frozen levels transmit zero. The per-use analog input is the dyadic sum
//! of the level bits; the channel adds an exponential noise sample; the
//! receiver expands the output and walks the levels from the lowest up,
//! removing the known carry, decoding the level, re-deriving the noise
//! digit from the adder relation, and propagating the next carry.

use super::{
    build_expansion_spec, expand_bits, majority, ExpansionSpec, LevelMode, LevelPlan,
};
use crate::bits::BitVector;
use crate::error::Result;
use crate::fading::{
    build_bec_specs, hier_decode, hier_encode, partition_indices, theoretical_rate, BecRateRule,
    CodewordMatrix, FadingProfile, HierMessage, SetPartition,
};
use crate::polar::PolarCodeSpec;
use crate::sim::{sample_aen_noise, AenProfile, Seed};

/// Code parameters shared by every active level.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AenCodeParams {
    /// Per-level block length exponent (`N = 2^n`).
    pub n: u32,
    /// Fading-block count exponent (`B = 2^b`).
    pub b: u32,
    /// Construction threshold for the per-level set partitions.
    pub delta: f64,
    /// Rate rule for the blockwise erasure codes.
    pub bec_rule: BecRateRule,
}

/// Outcome of one level.
#[derive(Debug, Clone, PartialEq)]
pub struct LevelOutcome {
    pub level: i32,
    pub mode: LevelMode,
    /// Exact recovery of the level's message (frozen levels are trivially
    /// ok).
    pub ok: bool,
    /// Information rate the level carried, in bits per channel use.
    pub rate: f64,
}

/// Report of one end-to-end run.
#[derive(Debug, Clone)]
pub struct AenRunReport {
    pub levels: Vec<LevelOutcome>,
    /// Lowest level whose decode failed; carries above it are unreliable.
    pub first_failure: Option<i32>,
    /// Sum of the active levels' information rates.
    pub measured_rate: f64,
    /// Input mean implied by the plan (active levels at bias one half).
    pub planned_input_mean: f64,
    /// Realized mean of the transmitted analog values.
    pub empirical_input_mean: f64,
    /// Channel outputs clipped above the top of the level range.
    pub overflow_count: usize,
}

struct LevelCode {
    profile: FadingProfile,
    partition: SetPartition,
    bec_specs: Vec<PolarCodeSpec>,
    /// aen-profile state (sorted order) per fading-profile position
    rate: f64,
}

/// The fading-BSC profile a level sees: per-state noise biases ordered
/// worst first. Returns the permutation mapping AEN state index to
/// fading-profile position, shared by every level because the bias is
/// monotone in the noise mean.
fn sorted_state_order(profile: &AenProfile) -> Vec<usize> {
    let mut order: Vec<usize> = (0..profile.num_states()).collect();
    order.sort_by(|&a, &b| {
        profile.states()[b]
            .noise_mean
            .partial_cmp(&profile.states()[a].noise_mean)
            .expect("noise means are finite")
    });
    order
}

fn level_code(
    spec: &ExpansionSpec,
    profile: &AenProfile,
    order: &[usize],
    level: i32,
    params: &AenCodeParams,
) -> Result<LevelCode> {
    let crossovers: Vec<f64> = order.iter().map(|&s| spec.noise_bias(level, s)).collect();
    let probs: Vec<f64> = order.iter().map(|&s| profile.states()[s].prob).collect();
    let fading = FadingProfile::from_parts(&crossovers, &probs)?;
    let partition = partition_indices(params.n, &fading, params.delta)?;
    let bec_specs = build_bec_specs(&fading, params.b, params.bec_rule)?;
    let rate = theoretical_rate(&partition, &bec_specs);
    Ok(LevelCode {
        profile: fading,
        partition,
        bec_specs,
        rate,
    })
}

/// Runs one seeded end-to-end transmission. See the module docs for the
/// pipeline; the report carries per-level outcomes and the realized rate.
pub fn aen_end_to_end(
    profile: &AenProfile,
    plan: &LevelPlan,
    params: &AenCodeParams,
    seed: Seed,
) -> Result<AenRunReport> {
    let spec = build_expansion_spec(profile, plan.l1(), plan.l2())?;
    let order = sorted_state_order(profile);
    // position of each AEN state in the sorted fading profile
    let mut state_to_fading = vec![0usize; order.len()];
    for (pos, &s) in order.iter().enumerate() {
        state_to_fading[s] = pos;
    }

    let b_len = 1usize << params.b;
    let n_len = 1usize << params.n;
    let mut rng = crate::sim::substream(seed, u64::MAX);

    // Transmitter: encode every active level, superpose dyadically.
    let mut level_bits: Vec<Option<(LevelCode, HierMessage, CodewordMatrix)>> = Vec::new();
    let mut analog = vec![vec![0.0f64; n_len]; b_len];
    for level in spec.levels() {
        if plan.mode(level) == LevelMode::FrozenZero {
            level_bits.push(None);
            continue;
        }
        let code = level_code(&spec, profile, &order, level, params)?;
        let msg = HierMessage::random(&mut rng, &code.partition, &code.bec_specs, b_len);
        let x = hier_encode(&msg, &code.partition, &code.bec_specs)?;
        let w = (level as f64).exp2();
        for b in 0..b_len {
            for i in 0..n_len {
                analog[b][i] += w * x.row(b)[i] as f64;
            }
        }
        level_bits.push(Some((code, msg, x)));
    }

    // Channel: add block-fading exponential noise.
    let noise = sample_aen_noise(profile, b_len, n_len, seed);
    let mut empirical_mean = 0.0;
    for row in &analog {
        for &v in row {
            empirical_mean += v;
        }
    }
    empirical_mean /= (b_len * n_len) as f64;

    // Receiver: expand outputs, then walk levels from the bottom.
    let mut overflow_count = 0usize;
    let mut ybits: Vec<Vec<Vec<u8>>> =
        vec![vec![vec![0u8; spec.num_levels()]; n_len]; b_len];
    for b in 0..b_len {
        for i in 0..n_len {
            let y = analog[b][i] + noise.value(b, i);
            let e = expand_bits(y, plan.l1(), plan.l2())?;
            if e.overflow > 0.0 {
                overflow_count += 1;
            }
            ybits[b][i] = e.bits;
        }
    }
    let fading_states: Vec<usize> = noise
        .block_states()
        .iter()
        .map(|&s| state_to_fading[s])
        .collect();

    let mut carries = vec![vec![0u8; n_len]; b_len];
    let mut outcomes = Vec::with_capacity(spec.num_levels());
    let mut first_failure = None;
    let mut measured_rate = 0.0;
    for (li, level) in spec.levels().enumerate() {
        // remove the known carry from this level's received digits
        let mut observed = Vec::with_capacity(b_len);
        for b in 0..b_len {
            let row: Vec<u8> = (0..n_len)
                .map(|i| ybits[b][i][li] ^ carries[b][i])
                .collect();
            observed.push(BitVector::from_raw(row));
        }

        let (ok, xhat) = match (plan.mode(level), &level_bits[li]) {
            (LevelMode::FrozenZero, _) => (true, None),
            (LevelMode::ActiveUniform, Some((code, msg, _x))) => {
                let received = CodewordMatrix::new(observed.clone())?
                    .with_block_states(fading_states.clone())?;
                let decoded = hier_decode(&received, &code.partition, &code.profile, &code.bec_specs)?;
                let ok = decoded.is_clean() && decoded.message == *msg;
                // re-encode the decoded message to estimate this level's input
                let xhat = hier_encode(&decoded.message, &code.partition, &code.bec_specs)?;
                measured_rate += code.rate;
                (ok, Some(xhat))
            }
            (LevelMode::ActiveUniform, None) => unreachable!("active level was encoded"),
        };
        if !ok && first_failure.is_none() {
            first_failure = Some(level);
        }
        outcomes.push(LevelOutcome {
            level,
            mode: plan.mode(level),
            ok,
            rate: match &level_bits[li] {
                Some((code, _, _)) => code.rate,
                None => 0.0,
            },
        });

        // adder inversion: estimated noise digit, then the next carry
        for b in 0..b_len {
            for i in 0..n_len {
                let x = match &xhat {
                    Some(m) => m.row(b)[i],
                    None => 0,
                };
                let zhat = observed[b][i] ^ x;
                carries[b][i] = majority(x, zhat, carries[b][i]);
            }
        }
    }

    Ok(AenRunReport {
        levels: outcomes,
        first_failure,
        measured_rate,
        planned_input_mean: plan.planned_mean(),
        empirical_input_mean: empirical_mean,
        overflow_count,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expansion::LevelPlan;

    #[test]
    fn zero_noise_limit_recovers_all_levels() {
        // noise mean tiny: every noise digit in range is zero w.h.p. and
        // every active level decodes exactly
        let profile = AenProfile::from_parts(&[1e-9], &[1.0], 4.0).unwrap();
        let plan = LevelPlan::explicit(2, 2, &[-1, 0, 1]).unwrap();
        let params = AenCodeParams {
            n: 4,
            b: 3,
            delta: 1e-3,
            bec_rule: BecRateRule::CapacityMargin { margin: 0.05 },
        };
        let report = aen_end_to_end(&profile, &plan, &params, Seed(123)).unwrap();
        assert!(report.first_failure.is_none(), "{:?}", report.levels);
        assert!(report.levels.iter().all(|l| l.ok));
        assert_eq!(report.overflow_count, 0);
    }

    #[test]
    fn planned_mean_respects_constraint() {
        let profile = AenProfile::from_parts(&[0.25], &[1.0], 10.0).unwrap();
        let spec = build_expansion_spec(&profile, 6, 10).unwrap();
        let plan = LevelPlan::uniform_cut(&spec, 0.45);
        assert!(plan.planned_mean() <= 10.0);
    }

    #[test]
    fn report_counts_active_rates_only() {
        let profile = AenProfile::from_parts(&[1e-9], &[1.0], 4.0).unwrap();
        let plan = LevelPlan::explicit(1, 1, &[0]).unwrap();
        let params = AenCodeParams {
            n: 3,
            b: 3,
            delta: 1e-3,
            bec_rule: BecRateRule::CapacityMargin { margin: 0.05 },
        };
        let report = aen_end_to_end(&profile, &plan, &params, Seed(5)).unwrap();
        let active_rate: f64 = report
            .levels
            .iter()
            .filter(|l| l.mode == LevelMode::ActiveUniform)
            .map(|l| l.rate)
            .sum();
        assert_eq!(report.measured_rate, active_rate);
        assert!(report
            .levels
            .iter()
            .filter(|l| l.mode == LevelMode::FrozenZero)
            .all(|l| l.ok && l.rate == 0.0));
    }
}
