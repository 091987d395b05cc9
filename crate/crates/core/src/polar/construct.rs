//! Reliability-based code construction.
//!
//! Each synthesized bit-channel gets a scalar reliability value in `[0, 1]`
//! (small means reliable), indexed by the natural input index of `u`. Both
//! recursions double the value vector once per polarization level, so
//! construction costs `O(N)`.

use crate::error::{Error, Result};

/// Crossovers closer to one half than this collapse onto it.
const SATURATION_SNAP: f64 = 9.313225746154785e-10; // 2^-30

/// Design channel for code construction.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ConstructionChannel {
    /// Binary erasure channel with erasure probability `erasure`.
    Bec { erasure: f64 },
    /// Binary symmetric channel with crossover probability `crossover`.
    Bsc { crossover: f64 },
}

/// Computes the per-index reliability vector for a code of length `2^n`.
///
/// For the BEC the recursion `Z⁻ = 2Z − Z²`, `Z⁺ = Z²` seeded with
/// `Z₀ = e` is exact: the value at index `i` equals the erasure probability
/// of the `i`-th synthesized channel.
///
/// For the BSC every synthesized channel is approximated by a BSC. The
/// check-side combination of two BSC(`e`)s is exactly BSC(`e ⊛ e`), and the
/// variable-side combination squares the Bhattacharyya parameter exactly;
/// the variable-side output is projected back onto the BSC with the same
/// Bhattacharyya parameter. The reported reliability is the Bhattacharyya
/// value `2√(e(1−e))` of the tracked crossover, seeded with `2√(p(1−p))`.
///
/// Both recursions are strictly monotone in the seed, so a degraded channel
/// (larger `e` or `p`) yields pointwise larger reliabilities at every index.
pub fn construct_reliabilities(n: u32, channel: ConstructionChannel) -> Result<Vec<f64>> {
    match channel {
        ConstructionChannel::Bec { erasure } => {
            if !(0.0..=1.0).contains(&erasure) {
                return Err(Error::Domain {
                    name: "erasure",
                    value: erasure,
                    range: "[0, 1]",
                });
            }
            Ok(evolve(n, erasure, |z| (2.0 * z - z * z, z * z)))
        }
        ConstructionChannel::Bsc { crossover } => {
            if !(0.0..=0.5).contains(&crossover) {
                return Err(Error::Domain {
                    name: "crossover",
                    value: crossover,
                    range: "[0, 0.5]",
                });
            }
            // 1/2 is an exact fixed point of both maps; crossovers within
            // 2^-30 of it are snapped onto it so that trajectories from
            // different seeds cannot end up straddling the plateau in
            // rounding-dependent order.
            let snap = |e: f64| if 0.5 - e <= SATURATION_SNAP { 0.5 } else { e };
            let e = evolve(n, snap(crossover), |e| {
                let t = e * (1.0 - e);
                // minus: crossover convolves with itself
                let minus = 2.0 * t;
                // plus: Z² with Z² = 4t, re-projected to a BSC crossover;
                // written to avoid cancellation for small t
                let z4 = 16.0 * t * t;
                let plus = 8.0 * t * t / (1.0 + (1.0 - z4).max(0.0).sqrt());
                (snap(minus), snap(plus))
            });
            Ok(e
                .into_iter()
                .map(|ei| (2.0 * (ei * (1.0 - ei)).sqrt()).min(1.0))
                .collect())
        }
    }
}

/// Runs `n` doubling steps of a one-step transform pair. The natural-index
/// convention: step `k` appends the new transform at the low bit, so index
/// `i` reads its transform sequence from the high bit (applied first) to
/// the low bit (applied last).
fn evolve(n: u32, seed: f64, step: impl Fn(f64) -> (f64, f64)) -> Vec<f64> {
    let mut values = vec![seed];
    for _ in 0..n {
        let mut next = Vec::with_capacity(values.len() * 2);
        for &v in &values {
            let (minus, plus) = step(v);
            next.push(minus);
            next.push(plus);
        }
        values = next;
    }
    values
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bec_one_step() {
        let z = construct_reliabilities(1, ConstructionChannel::Bec { erasure: 0.5 }).unwrap();
        assert_eq!(z, vec![0.75, 0.25]);
    }

    #[test]
    fn bec_two_steps() {
        let z = construct_reliabilities(2, ConstructionChannel::Bec { erasure: 0.5 }).unwrap();
        assert_eq!(z, vec![0.9375, 0.5625, 0.4375, 0.0625]);
    }

    #[test]
    fn bec_noiseless() {
        let z = construct_reliabilities(2, ConstructionChannel::Bec { erasure: 0.0 }).unwrap();
        assert!(z.iter().all(|&v| v == 0.0));
    }

    #[test]
    fn bec_erasure_conserved_each_depth() {
        // The recursion preserves the mean exactly: (Z⁻ + Z⁺)/2 = Z.
        for n in [1u32, 4, 8, 10] {
            let z = construct_reliabilities(n, ConstructionChannel::Bec { erasure: 0.3 }).unwrap();
            let mean = z.iter().sum::<f64>() / z.len() as f64;
            assert!((mean - 0.3).abs() < 1e-12, "n={n}: mean={mean}");
        }
    }

    #[test]
    fn bsc_degenerate_endpoints() {
        let z = construct_reliabilities(3, ConstructionChannel::Bsc { crossover: 0.0 }).unwrap();
        assert!(z.iter().all(|&v| v == 0.0));
        let z = construct_reliabilities(3, ConstructionChannel::Bsc { crossover: 0.5 }).unwrap();
        assert!(z.iter().all(|&v| v == 1.0));
    }

    #[test]
    fn bsc_seed_is_bhattacharyya() {
        let z = construct_reliabilities(0, ConstructionChannel::Bsc { crossover: 0.11 }).unwrap();
        let expect = 2.0 * (0.11f64 * 0.89).sqrt();
        assert!((z[0] - expect).abs() < 1e-15);
    }

    #[test]
    fn pointwise_dominance_in_channel_parameter() {
        for n in [4u32, 8] {
            let za = construct_reliabilities(n, ConstructionChannel::Bsc { crossover: 0.2 }).unwrap();
            let zb = construct_reliabilities(n, ConstructionChannel::Bsc { crossover: 0.12 }).unwrap();
            assert!(za.iter().zip(&zb).all(|(a, b)| a >= b));
            let za = construct_reliabilities(n, ConstructionChannel::Bec { erasure: 0.6 }).unwrap();
            let zb = construct_reliabilities(n, ConstructionChannel::Bec { erasure: 0.25 }).unwrap();
            assert!(za.iter().zip(&zb).all(|(a, b)| a >= b));
        }
    }

    #[test]
    fn rejects_out_of_range_parameters() {
        assert!(construct_reliabilities(2, ConstructionChannel::Bec { erasure: 1.2 }).is_err());
        assert!(construct_reliabilities(2, ConstructionChannel::Bsc { crossover: 0.7 }).is_err());
    }

    #[test]
    fn values_stay_in_unit_interval() {
        for p in [1e-6, 0.05, 0.25, 0.49, 0.5] {
            let z = construct_reliabilities(10, ConstructionChannel::Bsc { crossover: p }).unwrap();
            assert!(z.iter().all(|&v| (0.0..=1.0).contains(&v)));
        }
    }
}
