//! Expansion coding for the fading additive exponential noise channel.
//!
//! An exponential random variable is distributionally identical to
//! `Σ_l 2^l A_l` with independent Bernoulli digits `A_l` whose one-rates
//! follow a logistic law in the level index. Truncating to levels
//! `−L1 ..= L2` turns the analog channel into a stack of binary channels:
//! each level sees a fading BSC whose per-state crossover is the noise
//! digit bias, once carries between neighbouring levels are resolved from
//! the lowest level upward.

mod pipeline;

pub use pipeline::{aen_end_to_end, AenCodeParams, AenRunReport, LevelOutcome};

use crate::error::{Error, Result};
use crate::math::{binary_convolution, binary_entropy, LOG2_E};
use crate::sim::AenProfile;

/// Digit bias of the binary expansion of an exponential variable with rate
/// `lambda` at level `l`: `1 / (1 + e^{λ 2^l})`. Underflows saturate to 0;
/// the value approaches 0.5 from below as `l → −∞`.
pub fn expansion_bernoulli_param(lambda: f64, level: i32) -> f64 {
    let exponent = lambda * (level as f64).exp2();
    if exponent > 700.0 {
        // e^x overflows f64; the bias is denormal-zero territory
        return 0.0;
    }
    1.0 / (1.0 + exponent.exp())
}

/// Per-level input biases and per-level, per-state noise biases for an
/// expansion over levels `−l1 ..= l2`.
///
/// Input biases follow the high-SNR shaping choice (exponential with the
/// input mean); noise biases are the exact digit laws of the per-state
/// exponential noise. The truncated input mean `Σ 2^l p_l` never exceeds
/// the full mean, which equals the input mean exactly.
#[derive(Debug, Clone)]
pub struct ExpansionSpec {
    l1: u32,
    l2: u32,
    input_bias: Vec<f64>,
    noise_bias: Vec<Vec<f64>>,
    achieved_mean: f64,
}

impl ExpansionSpec {
    pub fn l1(&self) -> u32 {
        self.l1
    }

    pub fn l2(&self) -> u32 {
        self.l2
    }

    /// Number of levels, `l1 + l2 + 1`.
    pub fn num_levels(&self) -> usize {
        (self.l1 + self.l2 + 1) as usize
    }

    /// Levels in ascending order.
    pub fn levels(&self) -> impl Iterator<Item = i32> + '_ {
        -(self.l1 as i32)..=(self.l2 as i32)
    }

    pub(crate) fn level_index(&self, level: i32) -> usize {
        (level + self.l1 as i32) as usize
    }

    /// Input bias `p_l`.
    pub fn input_bias(&self, level: i32) -> f64 {
        self.input_bias[self.level_index(level)]
    }

    /// Noise bias `p̃_{l,s}` for the profile's state `s` (profile order).
    pub fn noise_bias(&self, level: i32, state: usize) -> f64 {
        self.noise_bias[state][self.level_index(level)]
    }

    /// The truncated input mean `Σ_l 2^l p_l`.
    pub fn achieved_mean(&self) -> f64 {
        self.achieved_mean
    }
}

/// Fills an [`ExpansionSpec`] for the profile: noise biases from each
/// state's exponential rate, input biases from the input-mean rate, and a
/// defensive check of the mean constraint.
pub fn build_expansion_spec(profile: &AenProfile, l1: u32, l2: u32) -> Result<ExpansionSpec> {
    let levels: Vec<i32> = (-(l1 as i32)..=(l2 as i32)).collect();
    let input_bias: Vec<f64> = levels
        .iter()
        .map(|&l| expansion_bernoulli_param(1.0 / profile.input_mean(), l))
        .collect();
    let noise_bias: Vec<Vec<f64>> = profile
        .states()
        .iter()
        .map(|s| {
            levels
                .iter()
                .map(|&l| expansion_bernoulli_param(1.0 / s.noise_mean, l))
                .collect()
        })
        .collect();
    let achieved_mean: f64 = levels
        .iter()
        .zip(&input_bias)
        .map(|(&l, &p)| (l as f64).exp2() * p)
        .sum();
    // cannot exceed the input mean for this bias choice; checked defensively
    if achieved_mean > profile.input_mean() * (1.0 + 1e-9) {
        return Err(Error::Constraint(format!(
            "truncated input mean {achieved_mean} exceeds {}",
            profile.input_mean()
        )));
    }
    Ok(ExpansionSpec {
        l1,
        l2,
        input_bias,
        noise_bias,
        achieved_mean,
    })
}

/// Fixed-point binary digits of a non-negative value over levels
/// `−l1 ..= l2` (ascending), with the sub-resolution residual and the part
/// clipped above `2^{l2+1}`.
#[derive(Debug, Clone, PartialEq)]
pub struct BitExpansion {
    /// Digit per level, lowest level first.
    pub bits: Vec<u8>,
    /// `value − overflow − Σ 2^l bit_l`, always in `[0, 2^{−l1})`.
    pub residual: f64,
    /// The multiple of `2^{l2+1}` that did not fit in the level range.
    pub overflow: f64,
}

/// Truncating binary expansion. Greedy from the highest level down; every
/// subtraction is exact in floating point because the remainder is always
/// within a factor two of the subtracted power.
pub fn expand_bits(value: f64, l1: u32, l2: u32) -> Result<BitExpansion> {
    if !(value >= 0.0) || !value.is_finite() {
        return Err(Error::Domain {
            name: "value",
            value,
            range: "[0, inf)",
        });
    }
    let cap = ((l2 as i32) + 1) as f64;
    let cap = cap.exp2();
    let overflow_units = (value / cap).floor();
    let overflow = overflow_units * cap;
    let mut rem = value - overflow;
    let num_levels = (l1 + l2 + 1) as usize;
    let mut bits = vec![0u8; num_levels];
    for i in (0..num_levels).rev() {
        let level = i as i32 - l1 as i32;
        let w = (level as f64).exp2();
        if rem >= w {
            bits[i] = 1;
            rem -= w;
        }
    }
    Ok(BitExpansion {
        bits,
        residual: rem,
        overflow,
    })
}

/// Output of the ripple adder: per-level sums, the carry out of each level,
/// and the final carry out of the range.
#[derive(Debug, Clone, PartialEq)]
pub struct CarrySum {
    /// `y_l = x_l ⊕ z_l ⊕ c_l`, lowest level first.
    pub sum: Vec<u8>,
    /// Carry out of each level: `carries[i]` leaves level `i` and enters
    /// level `i + 1`.
    pub carries: Vec<u8>,
    /// Carry out of the highest level.
    pub carry_out: u8,
}

/// Ripple addition of two aligned digit vectors from the lowest level up,
/// with majority carries. Equals integer addition of the expanded values
/// up to the declared carry out.
pub fn carry_add(x: &[u8], z: &[u8]) -> Result<CarrySum> {
    if x.len() != z.len() {
        return Err(Error::InvalidArgument(format!(
            "level ranges differ: {} vs {}",
            x.len(),
            z.len()
        )));
    }
    let mut sum = vec![0u8; x.len()];
    let mut carries = vec![0u8; x.len()];
    let mut c = 0u8;
    for i in 0..x.len() {
        sum[i] = x[i] ^ z[i] ^ c;
        c = majority(x[i], z[i], c);
        carries[i] = c;
    }
    Ok(CarrySum {
        sum,
        carries,
        carry_out: c,
    })
}

#[inline]
pub(crate) fn majority(a: u8, b: u8, c: u8) -> u8 {
    (a & b) | (a & c) | (b & c)
}

/// The shaped achievable rate of expansion coding in bits per channel use:
/// `Σ_l Σ_s q_s [H(p_l ⊛ p̃_{l,s}) − H(p̃_{l,s})]`.
pub fn shaped_rate(spec: &ExpansionSpec, profile: &AenProfile) -> f64 {
    spec.levels()
        .map(|l| {
            profile
                .states()
                .iter()
                .enumerate()
                .map(|(s, st)| {
                    let p = spec.input_bias(l);
                    let pt = spec.noise_bias(l, s);
                    st.prob * (binary_entropy(binary_convolution(p, pt)) - binary_entropy(pt))
                })
                .sum::<f64>()
        })
        .sum()
}

/// Closed-form bounds on the per-level noise entropy, used by the
/// verification suite.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EntropyTailBounds {
    /// `H(p̃_{l,s}) ≤ 3 log2(e) 2^{−l+η}`, applicable for `l > η` where
    /// `η = log2` of the noise mean.
    pub upper: Option<f64>,
    /// `H(p̃_{l,s}) ≥ 1 − log2(e) 2^{l−η}`, applicable for `l ≤ η`.
    pub lower: Option<f64>,
}

/// Evaluates the applicable entropy tail bound(s) at one level.
pub fn entropy_tail_bounds(noise_mean: f64, level: i32) -> Result<EntropyTailBounds> {
    if noise_mean <= 0.0 {
        return Err(Error::Domain {
            name: "noise mean",
            value: noise_mean,
            range: "(0, inf)",
        });
    }
    let eta = noise_mean.log2();
    let l = level as f64;
    Ok(EntropyTailBounds {
        upper: (l > eta).then(|| 3.0 * LOG2_E * (-l + eta).exp2()),
        lower: (l <= eta).then(|| 1.0 - LOG2_E * (l - eta).exp2()),
    })
}

/// Result of instantiating the high-SNR achievability guarantee.
#[derive(Debug, Clone, PartialEq)]
pub enum Theorem4Report {
    /// The SNR precondition held and the inequality was evaluated.
    Checked {
        holds: bool,
        achievable: f64,
        bound: f64,
        threshold: f64,
        l1: u32,
        l2: u32,
        epsilon: f64,
    },
    /// `min_s SNR_s < 1/ε`: the guarantee does not apply.
    PreconditionFailed { min_snr: f64, required: f64 },
}

/// Checks `R ≥ Σ q_s log2(1 + SNR_s) − 5 log2(e) ε` with the level range
/// the guarantee prescribes:
/// `L1 = ⌈−log2 ε − min_s log2 E_{Z_s}⌉`, `L2 = ⌈−log2 ε + log2 E_X⌉`
/// (clamped at zero).
pub fn theorem4_check(profile: &AenProfile, epsilon: f64) -> Result<Theorem4Report> {
    if !(epsilon > 0.0 && epsilon < 1.0) {
        return Err(Error::Domain {
            name: "epsilon",
            value: epsilon,
            range: "(0, 1)",
        });
    }
    let min_snr = profile.min_snr();
    // min_s SNR_s >= 1/eps, compared multiplicatively to avoid a division
    if min_snr * epsilon < 1.0 - 1e-12 {
        return Ok(Theorem4Report::PreconditionFailed {
            min_snr,
            required: 1.0 / epsilon,
        });
    }
    let min_eta = profile
        .states()
        .iter()
        .map(|s| s.noise_mean.log2())
        .fold(f64::INFINITY, f64::min);
    let l1 = (-epsilon.log2() - min_eta).ceil().max(0.0) as u32;
    let l2 = (-epsilon.log2() + profile.input_mean().log2()).ceil().max(0.0) as u32;
    let spec = build_expansion_spec(profile, l1, l2)?;
    let achievable = shaped_rate(&spec, profile);
    let bound = crate::sim::capacity_upper_bound_aen(profile);
    let threshold = bound - 5.0 * LOG2_E * epsilon;
    Ok(Theorem4Report::Checked {
        holds: achievable >= threshold,
        achievable,
        bound,
        threshold,
        l1,
        l2,
        epsilon,
    })
}

/// What a level does during end-to-end transmission.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LevelMode {
    /// Carries a hierarchical fading-BSC codeword with uniform input bits.
    ActiveUniform,
    /// Transmits constant zero.
    FrozenZero,
}

/// Per-level transmission plan. Uniform signalling only approximates the
/// shaped input, so active levels are restricted to where the shaped bias
/// is close to one half; everything else is frozen to zero, keeping the
/// realized input mean under the constraint.
#[derive(Debug, Clone)]
pub struct LevelPlan {
    l1: u32,
    l2: u32,
    modes: Vec<LevelMode>,
}

impl LevelPlan {
    /// Default plan: a level is active when its shaped input bias is at
    /// least `cut` (0.45 unless there is a reason to move it).
    pub fn uniform_cut(spec: &ExpansionSpec, cut: f64) -> Self {
        let modes = spec
            .levels()
            .map(|l| {
                if spec.input_bias(l) >= cut {
                    LevelMode::ActiveUniform
                } else {
                    LevelMode::FrozenZero
                }
            })
            .collect();
        Self {
            l1: spec.l1(),
            l2: spec.l2(),
            modes,
        }
    }

    /// Plan with explicitly chosen active levels.
    pub fn explicit(l1: u32, l2: u32, active: &[i32]) -> Result<Self> {
        let lo = -(l1 as i32);
        let hi = l2 as i32;
        let mut modes = vec![LevelMode::FrozenZero; (l1 + l2 + 1) as usize];
        for &l in active {
            if l < lo || l > hi {
                return Err(Error::InvalidArgument(format!(
                    "active level {l} outside [{lo}, {hi}]"
                )));
            }
            modes[(l - lo) as usize] = LevelMode::ActiveUniform;
        }
        Ok(Self { l1, l2, modes })
    }

    pub fn l1(&self) -> u32 {
        self.l1
    }

    pub fn l2(&self) -> u32 {
        self.l2
    }

    pub fn mode(&self, level: i32) -> LevelMode {
        self.modes[(level + self.l1 as i32) as usize]
    }

    pub fn active_levels(&self) -> Vec<i32> {
        (-(self.l1 as i32)..=(self.l2 as i32))
            .filter(|&l| self.mode(l) == LevelMode::ActiveUniform)
            .collect()
    }

    /// Input mean of the plan: active levels contribute `2^l / 2`.
    pub fn planned_mean(&self) -> f64 {
        self.active_levels()
            .iter()
            .map(|&l| (l as f64).exp2() * 0.5)
            .sum()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bernoulli_param_values() {
        // lambda = 1, level 0: 1/(1+e)
        let a = expansion_bernoulli_param(1.0, 0);
        assert!((a - 0.2689414213699951).abs() < 1e-15);
        // very low level: approaches 1/2 from below
        let low = expansion_bernoulli_param(1.0, -20);
        assert!(low > 0.4999 && low < 0.5);
        // very high level: saturates to zero
        assert_eq!(expansion_bernoulli_param(1.0, 40), 0.0);
    }

    #[test]
    fn bernoulli_param_shape() {
        // near 0.5 at low levels, vanishing at high levels, monotone down
        let vals: Vec<f64> = (-20..=20)
            .map(|l| expansion_bernoulli_param(1.0, l))
            .collect();
        assert!(vals.windows(2).all(|w| w[1] <= w[0]));
        assert!(vals[0] > 0.49);
        assert!(vals[40] < 1e-6);
    }

    #[test]
    fn shifting_property() {
        // rate 2^k shifts the level axis by k exactly
        for k in [-3i32, -1, 2, 5] {
            let lam = (k as f64).exp2();
            for l in -6..=6 {
                let a = expansion_bernoulli_param(lam, l);
                let b = expansion_bernoulli_param(1.0, l + k);
                assert_eq!(a, b, "k={k} l={l}");
            }
        }
    }

    #[test]
    fn expand_zero() {
        let e = expand_bits(0.0, 3, 3).unwrap();
        assert!(e.bits.iter().all(|&b| b == 0));
        assert_eq!(e.residual, 0.0);
        assert_eq!(e.overflow, 0.0);
    }

    #[test]
    fn expand_exact_dyadic() {
        // 2.75 = 2 + 0.5 + 0.25 over levels -2..=2
        let e = expand_bits(2.75, 2, 2).unwrap();
        // levels: -2, -1, 0, 1, 2
        assert_eq!(e.bits, vec![1, 1, 0, 1, 0]);
        assert_eq!(e.residual, 0.0);
        assert_eq!(e.overflow, 0.0);
    }

    #[test]
    fn expand_residual_and_overflow() {
        let e = expand_bits(16.3, 1, 2).unwrap();
        // cap = 2^3 = 8 -> overflow 16, remainder 0.3 = 0.25 + residual
        assert_eq!(e.overflow, 16.0);
        assert_eq!(e.bits[0], 0); // level -1 (0.5)
        let reconstructed: f64 = e
            .bits
            .iter()
            .enumerate()
            .map(|(i, &b)| b as f64 * ((i as i32 - 1) as f64).exp2())
            .sum();
        assert!((reconstructed + e.residual + e.overflow - 16.3).abs() < 1e-12);
        assert!(e.residual >= 0.0 && e.residual < 0.5);
    }

    #[test]
    fn expand_rejects_negative() {
        assert!(expand_bits(-1.0, 2, 2).is_err());
    }

    #[test]
    fn carry_add_example() {
        // x = 3 (11), z = 1 (01) over levels {0, 1}: y = 00 carry out 1,
        // carries out of level 0 and level 1 both set
        let r = carry_add(&[1, 1], &[1, 0]).unwrap();
        assert_eq!(r.sum, vec![0, 0]);
        assert_eq!(r.carries, vec![1, 1]);
        assert_eq!(r.carry_out, 1);
    }

    #[test]
    fn carry_add_zero_identity() {
        let r = carry_add(&[1, 0, 1], &[0, 0, 0]).unwrap();
        assert_eq!(r.sum, vec![1, 0, 1]);
        assert_eq!(r.carries, vec![0, 0, 0]);
    }

    #[test]
    fn carry_add_is_integer_addition() {
        // exhaustive over 6 levels
        for x in 0u32..64 {
            for z in 0u32..64 {
                let xb: Vec<u8> = (0..6).map(|i| ((x >> i) & 1) as u8).collect();
                let zb: Vec<u8> = (0..6).map(|i| ((z >> i) & 1) as u8).collect();
                let r = carry_add(&xb, &zb).unwrap();
                let y: u32 = r
                    .sum
                    .iter()
                    .enumerate()
                    .map(|(i, &b)| (b as u32) << i)
                    .sum::<u32>()
                    + ((r.carry_out as u32) << 6);
                assert_eq!(y, x + z, "x={x} z={z}");
            }
        }
    }

    #[test]
    fn spec_construction_and_mean_constraint() {
        for ex in [1.0, 10.0, 100.0] {
            let profile = AenProfile::from_parts(&[0.5, 3.0], &[0.8, 0.2], ex).unwrap();
            let spec = build_expansion_spec(&profile, 20, 20).unwrap();
            assert!(spec.achieved_mean() <= ex + 1e-9);
            // input bias at level 0 for E_X = 1: 1/(1+e)
            if ex == 1.0 {
                assert!((spec.input_bias(0) - 0.2689414213699951).abs() < 1e-15);
            }
        }
    }

    #[test]
    fn noise_bias_decreasing_in_level() {
        let profile = AenProfile::from_parts(&[0.5, 3.0], &[0.8, 0.2], 100.0).unwrap();
        let spec = build_expansion_spec(&profile, 10, 10).unwrap();
        for s in 0..2 {
            let vals: Vec<f64> = spec.levels().map(|l| spec.noise_bias(l, s)).collect();
            assert!(vals.windows(2).all(|w| w[1] <= w[0]));
            assert!(vals.iter().all(|&v| v < 0.5));
        }
    }

    #[test]
    fn shaped_rate_zero_bias_is_zero() {
        // a profile at absurdly low SNR where p_l underflows at every level
        // in range: every term is H(pt) - H(pt) = 0
        let profile = AenProfile::from_parts(&[1.0], &[1.0], 1e-300).unwrap();
        let spec = build_expansion_spec(&profile, 0, 4).unwrap();
        assert_eq!(shaped_rate(&spec, &profile), 0.0);
    }

    #[test]
    fn shaped_rate_single_clean_level_near_one() {
        // one level, bias 1/2 input, nearly noiseless: contribution -> 1
        let profile = AenProfile::from_parts(&[1e-6], &[1.0], 1e9).unwrap();
        let spec = build_expansion_spec(&profile, 0, 0).unwrap();
        let r = shaped_rate(&spec, &profile);
        assert!(r > 0.999 && r <= 1.0, "r = {r}");
    }

    #[test]
    fn shaped_rate_increases_with_input_mean() {
        let mut last = 0.0;
        for ex in [1.0, 3.0, 10.0, 30.0, 100.0] {
            let profile = AenProfile::from_parts(&[0.5, 3.0], &[0.8, 0.2], ex).unwrap();
            let spec = build_expansion_spec(&profile, 20, 20).unwrap();
            let r = shaped_rate(&spec, &profile);
            assert!(r > last, "rate not increasing at E_X = {ex}");
            last = r;
        }
    }

    #[test]
    fn entropy_bounds_examples() {
        // E_Z = 1, level 3: upper bound 3 log2(e) / 8 covers the tiny entropy
        let b = entropy_tail_bounds(1.0, 3).unwrap();
        let ub = b.upper.unwrap();
        assert!((ub - 0.5410106403333613).abs() < 1e-12);
        let actual = binary_entropy(expansion_bernoulli_param(1.0, 3));
        assert!(actual <= ub);
        assert!(b.lower.is_none());

        // E_Z = 1, level 0: lower bound 1 - log2(e) is vacuous but valid
        let b = entropy_tail_bounds(1.0, 0).unwrap();
        let lb = b.lower.unwrap();
        assert!((lb - (1.0 - LOG2_E)).abs() < 1e-12);
        assert!(binary_entropy(expansion_bernoulli_param(1.0, 0)) >= lb);
    }

    #[test]
    fn entropy_bounds_hold_on_grid() {
        for &ez in &[0.25, 1.0, 4.0] {
            for l in -20..=20 {
                let h = binary_entropy(expansion_bernoulli_param(1.0 / ez, l));
                let b = entropy_tail_bounds(ez, l).unwrap();
                if let Some(ub) = b.upper {
                    assert!(h <= ub + 1e-12, "upper failed at ez={ez} l={l}");
                }
                if let Some(lb) = b.lower {
                    assert!(h >= lb - 1e-12, "lower failed at ez={ez} l={l}");
                }
            }
        }
    }

    #[test]
    fn theorem4_grid_holds() {
        for ex in [100.0, 1000.0, 10000.0] {
            let profile = AenProfile::from_parts(&[0.5, 3.0], &[0.8, 0.2], ex).unwrap();
            let eps = 3.0 / ex;
            match theorem4_check(&profile, eps).unwrap() {
                Theorem4Report::Checked { holds, .. } => assert!(holds, "failed at E_X={ex}"),
                other => panic!("unexpected report {other:?}"),
            }
        }
    }

    #[test]
    fn theorem4_degenerate_epsilon() {
        // eps = 0.9 with min SNR exactly 1/0.9: precondition met, holds
        let profile = AenProfile::from_parts(&[0.9], &[1.0], 1.0).unwrap();
        match theorem4_check(&profile, 0.9).unwrap() {
            Theorem4Report::Checked { holds, .. } => assert!(holds),
            other => panic!("unexpected report {other:?}"),
        }
    }

    #[test]
    fn theorem4_precondition_gate() {
        let profile = AenProfile::from_parts(&[0.5, 3.0], &[0.8, 0.2], 10.0).unwrap();
        // min SNR = 10/3 < 1/0.01
        match theorem4_check(&profile, 0.01).unwrap() {
            Theorem4Report::PreconditionFailed { min_snr, required } => {
                assert!(min_snr < required);
            }
            other => panic!("unexpected report {other:?}"),
        }
    }

    #[test]
    fn level_plan_cut() {
        let profile = AenProfile::from_parts(&[0.5], &[1.0], 1000.0).unwrap();
        let spec = build_expansion_spec(&profile, 4, 12).unwrap();
        let plan = LevelPlan::uniform_cut(&spec, 0.45);
        let active = plan.active_levels();
        // active levels are exactly the low ones, contiguous from -l1
        assert_eq!(active[0], -4);
        assert!(active.windows(2).all(|w| w[1] == w[0] + 1));
        assert!(plan.planned_mean() <= 1000.0);
        // high levels frozen
        assert_eq!(plan.mode(12), LevelMode::FrozenZero);
    }
}
