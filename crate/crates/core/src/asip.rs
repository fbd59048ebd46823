//! Maximum stable invitations for anonymous instances.
//!
//! With no accept/reject constraints, stability only depends on how many
//! agents attend. [`solve_asip`] sweeps candidate sizes `k` from `n` down:
//!
//! 1. collect `Z`, the agents who accept size `k`; give up on `k` if there
//!    are fewer than `k` of them;
//! 2. while more than `k` remain, drop agents who would rather stay out of a
//!    `(k + 1)`-sized event, lowest index first — anyone left over would envy
//!    the invitation from outside, so dropping them can never help;
//! 3. accept the survivors if exactly `k` remain and no outsider accepts
//!    size `k + 1`.
//!
//! The first size that succeeds is the maximum; if none does and somebody
//! accepts a solo event, nothing is stable. The sweep performs `O(n^2)`
//! rank comparisons overall.

use thiserror::Error;

use crate::instance::{
    GsipInstance, Invitation, SearchStats, SolveResult, SolverPath, Verdict,
};
use crate::prefs::PreferenceOrder;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum AsipError {
    #[error("agent {agent} has accept/reject constraints; this solver handles anonymous instances")]
    NotAnonymous { agent: usize },
}

/// Finds a maximum stable invitation of an anonymous instance, or reports
/// that none exists. Ties among the agents willing to attend a size-`k`
/// event are broken by dropping the lowest-indexed droppable agents, which
/// keeps the result deterministic.
pub fn solve_asip(inst: &GsipInstance) -> Result<SolveResult, AsipError> {
    if let Some(agent) =
        (0..inst.n()).find(|&i| !inst.accept_set(i).is_empty() || !inst.reject_set(i).is_empty())
    {
        return Err(AsipError::NotAnonymous { agent });
    }
    Ok(sweep(inst))
}

fn sweep(inst: &GsipInstance) -> SolveResult {
    let n = inst.n();
    let mut stats = SearchStats::new(SolverPath::Asip);

    for k in (1..=n).rev() {
        stats.sizes_attempted.push(k);
        stats.nodes += 1;

        let mut invited: Vec<usize> = (0..n).filter(|&i| inst.preference(i).accepts(k)).collect();
        if invited.len() < k {
            continue;
        }
        if invited.len() > k {
            // Anyone here is willing at size k; drop those unwilling at
            // k + 1 (they would not envy from outside), lowest index first.
            let mut excess = invited.len() - k;
            let mut kept = Vec::with_capacity(k);
            for &i in &invited {
                if excess > 0 && !inst.preference(i).accepts(k + 1) {
                    excess -= 1;
                    stats.nodes += 1;
                } else {
                    kept.push(i);
                }
            }
            invited = kept;
        }
        if invited.len() != k {
            continue;
        }

        // Envy check: an outsider accepting size k + 1 could join.
        let mut inside = invited.iter().peekable();
        let envied = (0..n).any(|j| {
            if inside.peek() == Some(&&j) {
                inside.next();
                false
            } else {
                inst.preference(j).accepts(k + 1)
            }
        });
        if !envied {
            return SolveResult {
                verdict: Verdict::Stable(Invitation::from_sorted(invited)),
                stats,
            };
        }
    }

    // No positive size works. The empty invitation is stable exactly when
    // nobody accepts a solo event.
    let verdict = if (0..n).any(|i| inst.preference(i).accepts(1)) {
        Verdict::NoStable
    } else {
        Verdict::Stable(Invitation::empty())
    };
    SolveResult { verdict, stats }
}

/// Validation failures for multi-slot rank vectors.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum MultiSlotError {
    #[error("slot count must be at least 1")]
    NoSlots,
    #[error("expected {expected} rank vectors, got {got}")]
    AgentCount { expected: usize, got: usize },
    #[error("agent {agent}: rank vector has {got} entries, expected slots*n + 1 = {expected}")]
    RankLength {
        agent: usize,
        expected: usize,
        got: usize,
    },
    #[error("agent {agent}, slot {slot}: size {size} ties with the outside option")]
    TiesWithOutside {
        agent: usize,
        slot: usize,
        size: usize,
    },
}

/// An anonymous instance where the event may run in one of several time
/// slots. Each agent ranks all `slots * n` joint outcomes "slot t with x
/// attendees" together with the single shared outside option. Joint outcome
/// `(t, x)` lives at index `t * n + x` of the rank vector (slots are
/// 0-based internally) and index 0 is the outside option.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MultiSlotInstance {
    n: usize,
    slots: usize,
    ranks: Vec<Vec<u32>>,
}

impl MultiSlotInstance {
    pub fn new(n: usize, slots: usize, ranks: Vec<Vec<u32>>) -> Result<Self, MultiSlotError> {
        if slots == 0 {
            return Err(MultiSlotError::NoSlots);
        }
        if ranks.len() != n {
            return Err(MultiSlotError::AgentCount {
                expected: n,
                got: ranks.len(),
            });
        }
        let expected = slots * n + 1;
        for (agent, vec) in ranks.iter().enumerate() {
            if vec.len() != expected {
                return Err(MultiSlotError::RankLength {
                    agent,
                    expected,
                    got: vec.len(),
                });
            }
            for idx in 1..expected {
                if vec[idx] == vec[0] {
                    return Err(MultiSlotError::TiesWithOutside {
                        agent,
                        slot: (idx - 1) / n,
                        size: (idx - 1) % n + 1,
                    });
                }
            }
        }
        Ok(MultiSlotInstance { n, slots, ranks })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn slots(&self) -> usize {
        self.slots
    }

    pub fn ranks(&self) -> &[Vec<u32>] {
        &self.ranks
    }

    /// The anonymous single-slot instance induced by fixing slot `slot`.
    pub fn slot_instance(&self, slot: usize) -> GsipInstance {
        assert!(slot < self.slots);
        let prefs = self
            .ranks
            .iter()
            .map(|vec| {
                let mut ranks = Vec::with_capacity(self.n + 1);
                ranks.push(vec[0]);
                ranks.extend_from_slice(&vec[slot * self.n + 1..=slot * self.n + self.n]);
                PreferenceOrder::from_ranks(ranks)
                    .expect("slot restriction of a valid multi-slot preference")
            })
            .collect();
        GsipInstance::anonymous(prefs).expect("slot restriction is anonymous by construction")
    }
}

/// Solves each slot independently and returns `(slot, result)` for the slot
/// with the largest stable invitation; earlier slots win ties. When no slot
/// admits a stable invitation the first slot's no-solution result is
/// returned. Slots are 0-based here; presentation layers add 1.
pub fn solve_asip_multislot(inst: &MultiSlotInstance) -> (usize, SolveResult) {
    let mut best: Option<(usize, SolveResult)> = None;
    let mut first: Option<SolveResult> = None;
    for slot in 0..inst.slots() {
        let result = solve_asip(&inst.slot_instance(slot))
            .expect("slot restriction is anonymous by construction");
        if first.is_none() {
            first = Some(result.clone());
        }
        if let Some(size) = result.size() {
            let beats = match &best {
                None => true,
                Some((_, held)) => held.size().unwrap_or(0) < size,
            };
            if beats {
                best = Some((slot, result));
            }
        }
    }
    best.unwrap_or_else(|| (0, first.expect("at least one slot")))
}

// ---------------------------------------------------------------------------
// tests
// ---------------------------------------------------------------------------
