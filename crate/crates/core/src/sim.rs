//! Seeded stochastic channel models and closed-form capacity references.
//!
//! All sampling is driven by a counter-based generator (ChaCha8) with one
//! substream per row or block, so a realization depends only on the seed
//! and the coordinate — never on scheduling or thread count.

use crate::error::{Error, Result};
use crate::fading::{CodewordMatrix, FadingProfile, FadingState};
use crate::math::normal_cdf;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const PROB_SUM_TOLERANCE: f64 = 1e-12;

/// Master seed for a simulation. Identical seeds reproduce identical
/// channel realizations bit for bit.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Seed(pub u64);

/// An independent substream of the master seed. Substreams share the
/// ChaCha key derived from the seed and differ in the stream counter.
pub fn substream(seed: Seed, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed.0);
    rng.set_stream(stream);
    rng
}

/// Derives a per-trial seed from a master seed, splitmix64-style, so that
/// trials form independent seed families.
pub fn trial_seed(master: Seed, trial: u64) -> Seed {
    let mut z = master.0 ^ trial.wrapping_mul(0x9E3779B97F4A7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58476D1CE4E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D049BB133111EB);
    Seed(z ^ (z >> 31))
}

fn sample_state<R: Rng + ?Sized>(rng: &mut R, profile: &FadingProfile) -> usize {
    let u: f64 = rng.random();
    let mut acc = 0.0;
    for (s, st) in profile.states().iter().enumerate() {
        acc += st.prob;
        if u < acc {
            return s;
        }
    }
    profile.num_states() - 1
}

/// Passes a codeword matrix through the block-fading BSC: one state drawn
/// per row, every bit of the row flipped independently with the state's
/// crossover probability. The output carries the realized state labels.
pub fn transit_fading_bsc(
    x: &CodewordMatrix,
    profile: &FadingProfile,
    seed: Seed,
) -> CodewordMatrix {
    let mut rows = Vec::with_capacity(x.num_blocks());
    let mut states = Vec::with_capacity(x.num_blocks());
    for b in 0..x.num_blocks() {
        let mut rng = substream(seed, b as u64);
        let s = sample_state(&mut rng, profile);
        let p = profile.crossover(s);
        let mut row = x.row(b).clone();
        for i in 0..row.len() {
            if rng.random::<f64>() < p {
                row.set(i, row[i] ^ 1);
            }
        }
        rows.push(row);
        states.push(s);
    }
    CodewordMatrix::new(rows)
        .expect("input matrix is well-formed")
        .with_block_states(states)
        .expect("one state per row")
}

/// Fading AWGN channel description under BPSK signalling: positive block
/// gains with probabilities, and the linear signal-to-noise ratio.
#[derive(Debug, Clone, PartialEq)]
pub struct AwgnFadingProfile {
    gains: Vec<f64>,
    probs: Vec<f64>,
    snr: f64,
}

impl AwgnFadingProfile {
    pub fn new(gains: Vec<f64>, probs: Vec<f64>, snr: f64) -> Result<Self> {
        if gains.len() != probs.len() || gains.is_empty() {
            return Err(Error::InvalidArgument(
                "gain and probability lists must be non-empty and equal length".into(),
            ));
        }
        if let Some(&h) = gains.iter().find(|&&h| h <= 0.0) {
            return Err(Error::Domain {
                name: "gain",
                value: h,
                range: "(0, inf)",
            });
        }
        if let Some(&q) = probs.iter().find(|&&q| q <= 0.0) {
            return Err(Error::Domain {
                name: "state probability",
                value: q,
                range: "(0, 1]",
            });
        }
        let total: f64 = probs.iter().sum();
        if (total - 1.0).abs() > PROB_SUM_TOLERANCE {
            return Err(Error::Domain {
                name: "sum of state probabilities",
                value: total,
                range: "1 (within 1e-12)",
            });
        }
        if snr <= 0.0 {
            return Err(Error::Domain {
                name: "snr",
                value: snr,
                range: "(0, inf)",
            });
        }
        Ok(Self { gains, probs, snr })
    }

    pub fn gains(&self) -> &[f64] {
        &self.gains
    }

    pub fn probs(&self) -> &[f64] {
        &self.probs
    }

    pub fn snr(&self) -> f64 {
        self.snr
    }
}

/// Hard-decision reduction of BPSK over the fading AWGN channel: state `s`
/// becomes a BSC with crossover `p_s = 1 − Φ(h_s √SNR)`.
///
/// States are reordered into the descending-crossover convention and states
/// whose crossovers agree exactly are merged (probabilities summed).
pub fn bpsk_to_bsc(profile: &AwgnFadingProfile) -> Result<FadingProfile> {
    let mut states: Vec<FadingState> = profile
        .gains
        .iter()
        .zip(&profile.probs)
        .map(|(&h, &q)| FadingState {
            crossover: 1.0 - normal_cdf(h * profile.snr.sqrt()),
            prob: q,
        })
        .collect();
    states.sort_by(|a, b| {
        b.crossover
            .partial_cmp(&a.crossover)
            .expect("crossovers are finite")
    });
    let mut merged: Vec<FadingState> = Vec::with_capacity(states.len());
    for s in states {
        match merged.last_mut() {
            Some(last) if last.crossover == s.crossover => last.prob += s.prob,
            _ => merged.push(s),
        }
    }
    FadingProfile::new(merged)
}

/// One fading state of the additive exponential noise channel.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AenState {
    /// Mean of the exponential noise in this state.
    pub noise_mean: f64,
    pub prob: f64,
}

/// Fading additive exponential noise channel: noise is exponential with a
/// per-block mean drawn from the state distribution; the input is
/// non-negative with mean at most `input_mean`.
#[derive(Debug, Clone, PartialEq)]
pub struct AenProfile {
    states: Vec<AenState>,
    input_mean: f64,
}

impl AenProfile {
    pub fn new(states: Vec<AenState>, input_mean: f64) -> Result<Self> {
        if states.is_empty() {
            return Err(Error::InvalidArgument("profile has no states".into()));
        }
        for s in &states {
            if s.noise_mean <= 0.0 {
                return Err(Error::Domain {
                    name: "noise mean",
                    value: s.noise_mean,
                    range: "(0, inf)",
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
        let total: f64 = states.iter().map(|s| s.prob).sum();
        if (total - 1.0).abs() > PROB_SUM_TOLERANCE {
            return Err(Error::Domain {
                name: "sum of state probabilities",
                value: total,
                range: "1 (within 1e-12)",
            });
        }
        if input_mean <= 0.0 {
            return Err(Error::Domain {
                name: "input mean",
                value: input_mean,
                range: "(0, inf)",
            });
        }
        Ok(Self { states, input_mean })
    }

    pub fn from_parts(noise_means: &[f64], probs: &[f64], input_mean: f64) -> Result<Self> {
        if noise_means.len() != probs.len() {
            return Err(Error::InvalidArgument(
                "noise mean and probability lists differ in length".into(),
            ));
        }
        Self::new(
            noise_means
                .iter()
                .zip(probs)
                .map(|(&noise_mean, &prob)| AenState { noise_mean, prob })
                .collect(),
            input_mean,
        )
    }

    pub fn states(&self) -> &[AenState] {
        &self.states
    }

    pub fn num_states(&self) -> usize {
        self.states.len()
    }

    pub fn input_mean(&self) -> f64 {
        self.input_mean
    }

    /// Average SNR `E_X / Σ q_s E_{Z_s}`.
    pub fn average_snr(&self) -> f64 {
        let mean_noise: f64 = self.states.iter().map(|s| s.prob * s.noise_mean).sum();
        self.input_mean / mean_noise
    }

    /// Smallest per-state SNR `min_s E_X / E_{Z_s}`.
    pub fn min_snr(&self) -> f64 {
        self.states
            .iter()
            .map(|s| self.input_mean / s.noise_mean)
            .fold(f64::INFINITY, f64::min)
    }
}

/// A sampled noise realization: `blocks × block_len` non-negative values
/// plus the realized state per block.
#[derive(Debug, Clone)]
pub struct AenNoise {
    values: Vec<Vec<f64>>,
    block_states: Vec<usize>,
}

impl AenNoise {
    pub fn value(&self, block: usize, i: usize) -> f64 {
        self.values[block][i]
    }

    pub fn block_states(&self) -> &[usize] {
        &self.block_states
    }

    pub fn num_blocks(&self) -> usize {
        self.values.len()
    }

    pub fn block_len(&self) -> usize {
        self.values[0].len()
    }
}

/// Samples block-fading exponential noise: one state per block, then i.i.d.
/// exponentials with the state's mean via inverse-CDF transform of uniform
/// draws (`z = −mean · ln(1 − u)`).
pub fn sample_aen_noise(
    profile: &AenProfile,
    blocks: usize,
    block_len: usize,
    seed: Seed,
) -> AenNoise {
    let mut values = Vec::with_capacity(blocks);
    let mut states = Vec::with_capacity(blocks);
    for b in 0..blocks {
        let mut rng = substream(seed, b as u64);
        let u: f64 = rng.random();
        let mut acc = 0.0;
        let mut state = profile.num_states() - 1;
        for (s, st) in profile.states().iter().enumerate() {
            acc += st.prob;
            if u < acc {
                state = s;
                break;
            }
        }
        let mean = profile.states()[state].noise_mean;
        let row: Vec<f64> = (0..block_len)
            .map(|_| -mean * (1.0 - rng.random::<f64>()).ln())
            .collect();
        values.push(row);
        states.push(state);
    }
    AenNoise {
        values,
        block_states: states,
    }
}

/// High-SNR upper bound on the ergodic capacity of the fading AEN channel:
/// `Σ q_s log2(1 + E_X / E_{Z_s})` bits per channel use.
pub fn capacity_upper_bound_aen(profile: &AenProfile) -> f64 {
    profile
        .states()
        .iter()
        .map(|s| s.prob * (1.0 + profile.input_mean / s.noise_mean).log2())
        .sum()
}
