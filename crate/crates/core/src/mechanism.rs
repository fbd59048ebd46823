//! A strategy-proof mechanism for agents with increasing preferences.
//!
//! When every agent's acceptable sizes form a suffix `[l_i, n]` and bigger
//! events are (weakly) better, the whole preference collapses to the single
//! threshold `l_i`. [`run_inc_mechanism`] picks the largest `k` such that at
//! least `k` reported thresholds are `<= k` and invites the `k` agents with
//! the smallest thresholds (ties to the lower index). The result is always
//! stable — even the empty fallback — and no agent can gain by lying about
//! their threshold: raising it can only shrink the event or drop them from
//! it, lowering it can only add them to events they do not accept.

use thiserror::Error;

use crate::instance::{GsipInstance, Invitation};
use crate::prefs::{classify_preference, PreferenceOrder, ShapeKind};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum MechanismError {
    #[error("threshold {value} for agent {agent} is outside 1..={max} (use n + 1 to opt out)")]
    ThresholdRange {
        agent: usize,
        value: usize,
        max: usize,
    },
    #[error("agent {agent}'s preference is {found:?}, not increasing or empty")]
    NotIncreasing { agent: usize, found: ShapeKind },
    #[error("agent {agent} has accept/reject constraints; thresholds only describe anonymous preferences")]
    NotAnonymous { agent: usize },
}

/// Reported thresholds, one per agent: `l_i` is the smallest event the agent
/// attends, with `n + 1` meaning "never".
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ThresholdProfile {
    n: usize,
    thresholds: Vec<usize>,
}

impl ThresholdProfile {
    pub fn new(n: usize, thresholds: Vec<usize>) -> Result<Self, MechanismError> {
        assert_eq!(thresholds.len(), n, "one threshold per agent");
        for (agent, &value) in thresholds.iter().enumerate() {
            if value == 0 || value > n + 1 {
                return Err(MechanismError::ThresholdRange {
                    agent,
                    value,
                    max: n + 1,
                });
            }
        }
        Ok(ThresholdProfile { n, thresholds })
    }

    /// Reads thresholds off an anonymous instance whose preferences all
    /// classify as increasing (or empty, mapped to `n + 1`).
    pub fn from_instance(inst: &GsipInstance) -> Result<Self, MechanismError> {
        let n = inst.n();
        let mut thresholds = Vec::with_capacity(n);
        for agent in 0..n {
            if !inst.accept_set(agent).is_empty() || !inst.reject_set(agent).is_empty() {
                return Err(MechanismError::NotAnonymous { agent });
            }
            thresholds.push(derive_threshold(agent, inst.preference(agent))?);
        }
        Ok(ThresholdProfile { n, thresholds })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn thresholds(&self) -> &[usize] {
        &self.thresholds
    }
}

/// Collapses an increasing (or empty) preference to its threshold.
pub fn derive_threshold(agent: usize, pref: &PreferenceOrder) -> Result<usize, MechanismError> {
    let shape = classify_preference(pref);
    match shape.kind {
        ShapeKind::Increasing => Ok(shape.min_acceptable),
        ShapeKind::Empty => Ok(pref.n() + 1),
        found => Err(MechanismError::NotIncreasing { agent, found }),
    }
}

/// Runs the threshold mechanism and returns the invited set (possibly empty;
/// the output is always stable for the reported thresholds).
pub fn run_inc_mechanism(profile: &ThresholdProfile) -> Invitation {
    let n = profile.n;
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by_key(|&i| (profile.thresholds[i], i));

    for k in (1..=n).rev() {
        if profile.thresholds[order[k - 1]] <= k {
            return Invitation::from_members(order[..k].to_vec());
        }
    }
    Invitation::empty()
}

// ---------------------------------------------------------------------------
// tests
// ---------------------------------------------------------------------------

#[cfg(test)]
mod tests {
    use super::*;
    use crate::asip::solve_asip;
    use crate::stability::{compare_with_preference, is_stable, Comparison};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn profile(n: usize, thresholds: &[usize]) -> ThresholdProfile {
        ThresholdProfile::new(n, thresholds.to_vec()).unwrap()
    }

    /// The anonymous instance where each agent has the canonical increasing
    /// preference for their threshold.
    fn inc_instance(profile: &ThresholdProfile) -> GsipInstance {
        let prefs = profile
            .thresholds()
            .iter()
            .map(|&l| PreferenceOrder::increasing(profile.n(), l).unwrap())
            .collect();
        GsipInstance::anonymous(prefs).unwrap()
    }

    #[test]
    fn low_enough_thresholds_invite_everyone() {
        let got = run_inc_mechanism(&profile(3, &[2, 3, 3]));
        assert_eq!(got.members(), &[0, 1, 2]);
    }

    #[test]
    fn mutually_too_demanding_thresholds_invite_nobody() {
        assert!(run_inc_mechanism(&profile(2, &[2, 3])).is_empty());
    }

    #[test]
    fn the_smallest_thresholds_win_with_index_ties() {
        // Only three can come; agent 3's "never" keeps size 4 out of reach.
        let got = run_inc_mechanism(&profile(4, &[2, 2, 2, 5]));
        assert_eq!(got.members(), &[0, 1, 2]);

        let got = run_inc_mechanism(&profile(3, &[2, 2, 4]));
        assert_eq!(got.members(), &[0, 1]);
    }

    #[test]
    fn thresholds_must_be_in_range() {
        assert!(matches!(
            ThresholdProfile::new(3, vec![1, 0, 2]),
            Err(MechanismError::ThresholdRange { agent: 1, .. })
        ));
        assert!(matches!(
            ThresholdProfile::new(3, vec![1, 5, 2]),
            Err(MechanismError::ThresholdRange { agent: 1, .. })
        ));
        assert!(ThresholdProfile::new(0, vec![]).is_ok());
    }

    #[test]
    fn thresholds_derive_from_increasing_preferences() {
        let pref = PreferenceOrder::increasing(4, 2).unwrap();
        assert_eq!(derive_threshold(0, &pref), Ok(2));
        assert_eq!(derive_threshold(0, &PreferenceOrder::empty(4)), Ok(5));
        // A lone agent who accepts a solo event counts as increasing.
        let solo = PreferenceOrder::from_groups(&[&[1], &[0]]).unwrap();
        assert_eq!(derive_threshold(0, &solo), Ok(1));

        let peaked = PreferenceOrder::single_peaked(4, 1, 3, 2).unwrap();
        assert!(matches!(
            derive_threshold(3, &peaked),
            Err(MechanismError::NotIncreasing {
                agent: 3,
                found: ShapeKind::SinglePeaked
            })
        ));
    }

    #[test]
    fn profile_from_instance_round_trips() {
        let want = profile(3, &[2, 3, 3]);
        assert_eq!(ThresholdProfile::from_instance(&inc_instance(&want)), Ok(want));

        let constrained = GsipInstance::new(
            vec![PreferenceOrder::increasing(2, 1).unwrap(); 2],
            vec![vec![], vec![0]],
            vec![vec![]; 2],
        )
        .unwrap();
        assert_eq!(
            ThresholdProfile::from_instance(&constrained),
            Err(MechanismError::NotAnonymous { agent: 1 })
        );
    }

    #[test]
    fn output_is_always_a_maximum_stable_invitation() {
        let mut rng = ChaCha8Rng::seed_from_u64(0x11C);
        for _ in 0..500 {
            let n = rng.gen_range(0..=8);
            let thresholds: Vec<usize> = (0..n).map(|_| rng.gen_range(1..=n + 1)).collect();
            let prof = profile(n, &thresholds);
            let inst = inc_instance(&prof);
            let got = run_inc_mechanism(&prof);
            assert!(is_stable(&inst, &got), "unstable output for {thresholds:?}");
            let max = solve_asip(&inst).unwrap();
            assert_eq!(Some(got.size()), max.size(), "not maximum for {thresholds:?}");
        }
    }

    #[test]
    fn no_threshold_misreport_ever_helps() {
        let mut rng = ChaCha8Rng::seed_from_u64(0x5A11);
        for _ in 0..300 {
            let n = rng.gen_range(1..=5);
            let thresholds: Vec<usize> = (0..n).map(|_| rng.gen_range(1..=n + 1)).collect();
            let prof = profile(n, &thresholds);
            let truthful = run_inc_mechanism(&prof);
            for agent in 0..n {
                let truth = PreferenceOrder::increasing(n, thresholds[agent]).unwrap();
                for lie in 1..=n + 1 {
                    let mut reported = thresholds.clone();
                    reported[agent] = lie;
                    let outcome = run_inc_mechanism(&profile(n, &reported));
                    assert_ne!(
                        compare_with_preference(&truth, agent, &outcome, &truthful),
                        Comparison::PrefersFirst,
                        "agent {agent} gains by reporting {lie} in {thresholds:?}"
                    );
                }
            }
        }
    }
}
