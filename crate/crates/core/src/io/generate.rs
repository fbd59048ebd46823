//! Seeded random instance generation.
//!
//! A [`GeneratorConfig`] fully determines the emitted instance: the same
//! seed always yields the same agents, preferences, and constraint sets.
//! Preference families cover the shapes the solvers dispatch on, so any
//! solver cell (family × constraint widths) is directly samplable.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::instance::GsipInstance;
use crate::prefs::PreferenceOrder;

/// Which shape every generated preference takes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PreferenceFamily {
    /// Every size `1..=n` strictly beats the outside option.
    Simple,
    /// A single-peaked interval of acceptable sizes, occasionally empty.
    IntervalSinglePeaked,
    /// Threshold preferences: every size from some point up, or nothing.
    Inc,
    /// Every size up to some point, or nothing.
    Dec,
    /// Unconstrained rank vectors (no ties with the outside option).
    ArbitraryPreorder,
}

/// A deterministic recipe for one random instance.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GeneratorConfig {
    pub n: usize,
    pub preference_family: PreferenceFamily,
    /// Exact size of agent 1's accept set; other agents draw `0..=alpha_max`.
    #[serde(default)]
    pub alpha_max: usize,
    /// Exact size of agent n's reject set; other agents draw `0..=beta_max`.
    #[serde(default)]
    pub beta_max: usize,
    pub seed: u64,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum GeneratorError {
    #[error("n must be at least 1")]
    NoAgents,
    #[error("{field} = {value} must not exceed n - 1 = {max}")]
    BoundTooLarge {
        field: &'static str,
        value: usize,
        max: usize,
    },
}

/// Generates the instance a config describes.
///
/// The constraint widths are attained, not just bounded: agent 0 receives
/// exactly `alpha_max` accept partners and agent `n-1` exactly `beta_max`
/// reject partners (trimmed only when the two sets would otherwise have to
/// overlap), so `inst.alpha() == alpha_max` and `inst.beta() == beta_max`.
pub fn generate_random_instance(config: &GeneratorConfig) -> Result<GsipInstance, GeneratorError> {
    if config.n == 0 {
        return Err(GeneratorError::NoAgents);
    }
    let n = config.n;
    for (field, value) in [("alpha_max", config.alpha_max), ("beta_max", config.beta_max)] {
        if value > n - 1 {
            return Err(GeneratorError::BoundTooLarge {
                field,
                value,
                max: n - 1,
            });
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let mut prefs = Vec::with_capacity(n);
    let mut accept = Vec::with_capacity(n);
    let mut reject = Vec::with_capacity(n);
    for agent in 0..n {
        prefs.push(random_preference(n, config.preference_family, &mut rng));
        let (f_size, r_size) = if agent == 0 {
            let f = config.alpha_max;
            (f, rng.gen_range(0..=config.beta_max.min(n - 1 - f)))
        } else if agent == n - 1 {
            let f = rng.gen_range(0..=config.alpha_max.min(n - 1 - config.beta_max));
            (f, config.beta_max)
        } else {
            let f = rng.gen_range(0..=config.alpha_max);
            (f, rng.gen_range(0..=config.beta_max.min(n - 1 - f)))
        };
        let mut others: Vec<usize> = (0..n).filter(|&j| j != agent).collect();
        others.shuffle(&mut rng);
        accept.push(others[..f_size].to_vec());
        reject.push(others[f_size..f_size + r_size].to_vec());
    }
    Ok(GsipInstance::new(prefs, accept, reject).expect("generated sets reference valid agents"))
}

fn random_preference(n: usize, family: PreferenceFamily, rng: &mut ChaCha8Rng) -> PreferenceOrder {
    match family {
        PreferenceFamily::Simple => {
            let ranks = std::iter::once(n as u32)
                .chain((0..n).map(|_| rng.gen_range(0..n as u32)))
                .collect();
            PreferenceOrder::from_ranks(ranks).expect("all sizes rank below the outside option")
        }
        PreferenceFamily::IntervalSinglePeaked => {
            if rng.gen_ratio(1, 8) {
                return PreferenceOrder::empty(n);
            }
            let low = rng.gen_range(1..=n);
            let high = rng.gen_range(low..=n);
            let ideal = rng.gen_range(low..=high);
            PreferenceOrder::single_peaked(n, low, high, ideal)
                .expect("low <= ideal <= high <= n by construction")
        }
        PreferenceFamily::Inc => {
            PreferenceOrder::increasing(n, rng.gen_range(1..=n + 1))
                .expect("thresholds stay in 1..=n+1")
        }
        PreferenceFamily::Dec => {
            PreferenceOrder::decreasing(n, rng.gen_range(0..=n)).expect("caps stay in 0..=n")
        }
        PreferenceFamily::ArbitraryPreorder => {
            let spread = (n as u32 + 2).min(4);
            let mut ranks: Vec<u32> = (0..=n).map(|_| rng.gen_range(0..spread)).collect();
            for x in 1..=n {
                // Preserve arbitrariness but honor the no-tie-with-0 rule.
                if ranks[x] == ranks[0] {
                    ranks[x] += 1;
                }
            }
            PreferenceOrder::from_ranks(ranks).expect("ties with the outside option were bumped")
        }
    }
}
