//! Problem instances and solver outputs.
//!
//! Agents are indexed `0..n` internally; the JSON document layer and the CLI
//! present 1-based ids. An instance couples one [`PreferenceOrder`] per agent
//! with two per-agent constraint sets: `accept[i]` (agents that must attend
//! for agent `i` to attend) and `reject[i]` (agents whose presence makes
//! attending unacceptable for agent `i`). An anonymous instance has all
//! constraint sets empty.

use thiserror::Error;

use crate::prefs::{PreferenceError, PreferenceOrder};

/// A set of invited agents, stored as sorted indices.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Invitation {
    members: Vec<usize>,
}

impl Invitation {
    pub fn empty() -> Self {
        Invitation { members: vec![] }
    }

    /// Everyone in `0..n`.
    pub fn full(n: usize) -> Self {
        Invitation {
            members: (0..n).collect(),
        }
    }

    /// Builds an invitation from arbitrary indices; duplicates collapse.
    pub fn from_members(members: impl IntoIterator<Item = usize>) -> Self {
        let mut members: Vec<usize> = members.into_iter().collect();
        members.sort_unstable();
        members.dedup();
        Invitation { members }
    }

    /// Wraps an already sorted, duplicate-free index list.
    pub(crate) fn from_sorted(members: Vec<usize>) -> Self {
        debug_assert!(members.windows(2).all(|w| w[0] < w[1]));
        Invitation { members }
    }

    pub(crate) fn from_mask(mut mask: u64) -> Self {
        let mut members = Vec::with_capacity(mask.count_ones() as usize);
        while mask != 0 {
            members.push(mask.trailing_zeros() as usize);
            mask &= mask - 1;
        }
        Invitation { members }
    }

    pub fn size(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn contains(&self, agent: usize) -> bool {
        self.members.binary_search(&agent).is_ok()
    }

    pub fn members(&self) -> &[usize] {
        &self.members
    }

    pub fn iter(&self) -> impl Iterator<Item = usize> + '_ {
        self.members.iter().copied()
    }

    /// This invitation with `agent` added.
    pub fn with(&self, agent: usize) -> Self {
        if self.contains(agent) {
            return self.clone();
        }
        let mut members = self.members.clone();
        let pos = members.partition_point(|&m| m < agent);
        members.insert(pos, agent);
        Invitation { members }
    }

    /// Orders invitations by their member bitset read as an integer with
    /// agent 0 in the least significant position. Used to break ties among
    /// equal-size solutions deterministically.
    pub fn bitset_cmp(&self, other: &Self) -> std::cmp::Ordering {
        let mut a = self.members.iter().rev();
        let mut b = other.members.iter().rev();
        loop {
            match (a.next(), b.next()) {
                (None, None) => return std::cmp::Ordering::Equal,
                (None, Some(_)) => return std::cmp::Ordering::Less,
                (Some(_), None) => return std::cmp::Ordering::Greater,
                (Some(x), Some(y)) if x != y => return x.cmp(y),
                _ => {}
            }
        }
    }
}

/// Validation failures when assembling an instance.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum InstanceError {
    #[error("agent {agent}: rank vector covers outcomes 0..={got}, expected 0..={expected}")]
    PreferenceLength {
        agent: usize,
        expected: usize,
        got: usize,
    },
    #[error("agent {agent}: {source}")]
    Preference {
        agent: usize,
        source: PreferenceError,
    },
    #[error("accept/reject lists must have one entry per agent: {got} lists for {agents} agents")]
    ConstraintListCount { agents: usize, got: usize },
    #[error("agent {agent} lists itself in its {list} set")]
    SelfReference { agent: usize, list: &'static str },
    #[error("agent {agent} references unknown agent {referenced} in its {list} set")]
    UnknownAgent {
        agent: usize,
        referenced: usize,
        list: &'static str,
    },
}

/// An instance of the (general) stable invitation problem.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GsipInstance {
    prefs: Vec<PreferenceOrder>,
    accept: Vec<Vec<usize>>,
    reject: Vec<Vec<usize>>,
}

impl GsipInstance {
    /// Assembles and validates an instance. Each rank vector must cover
    /// `0..=n` where `n = prefs.len()`; accept/reject entries must name other
    /// existing agents. The constraint lists are treated as sets.
    pub fn new(
        prefs: Vec<PreferenceOrder>,
        accept: Vec<Vec<usize>>,
        reject: Vec<Vec<usize>>,
    ) -> Result<Self, InstanceError> {
        let n = prefs.len();
        for (agent, pref) in prefs.iter().enumerate() {
            if pref.n() != n {
                return Err(InstanceError::PreferenceLength {
                    agent,
                    expected: n,
                    got: pref.n(),
                });
            }
        }
        for list in [&accept, &reject] {
            if list.len() != n {
                return Err(InstanceError::ConstraintListCount {
                    agents: n,
                    got: list.len(),
                });
            }
        }
        let normalize = |lists: Vec<Vec<usize>>, name: &'static str| {
            let mut out = Vec::with_capacity(n);
            for (agent, mut set) in lists.into_iter().enumerate() {
                set.sort_unstable();
                set.dedup();
                for &referenced in &set {
                    if referenced == agent {
                        return Err(InstanceError::SelfReference { agent, list: name });
                    }
                    if referenced >= n {
                        return Err(InstanceError::UnknownAgent {
                            agent,
                            referenced,
                            list: name,
                        });
                    }
                }
                out.push(set);
            }
            Ok(out)
        };
        Ok(GsipInstance {
            prefs,
            accept: normalize(accept, "accept")?,
            reject: normalize(reject, "reject")?,
        })
    }

    /// An instance with no acceptance or rejection constraints.
    pub fn anonymous(prefs: Vec<PreferenceOrder>) -> Result<Self, InstanceError> {
        let n = prefs.len();
        Self::new(prefs, vec![vec![]; n], vec![vec![]; n])
    }

    pub fn n(&self) -> usize {
        self.prefs.len()
    }

    pub fn preference(&self, agent: usize) -> &PreferenceOrder {
        &self.prefs[agent]
    }

    pub fn preferences(&self) -> &[PreferenceOrder] {
        &self.prefs
    }

    pub fn accept_set(&self, agent: usize) -> &[usize] {
        &self.accept[agent]
    }

    pub fn reject_set(&self, agent: usize) -> &[usize] {
        &self.reject[agent]
    }

    /// Largest acceptance set size.
    pub fn alpha(&self) -> usize {
        self.accept.iter().map(Vec::len).max().unwrap_or(0)
    }

    /// Largest rejection set size.
    pub fn beta(&self) -> usize {
        self.reject.iter().map(Vec::len).max().unwrap_or(0)
    }

    /// Whether the instance has no acceptance or rejection constraints.
    pub fn is_anonymous(&self) -> bool {
        self.alpha() == 0 && self.beta() == 0
    }

    /// Whether every agent finds every positive size acceptable.
    pub fn all_simple(&self) -> bool {
        self.prefs.iter().all(PreferenceOrder::is_simple)
    }

    /// Copy of this instance with one agent's preference replaced.
    pub fn with_preference(&self, agent: usize, pref: PreferenceOrder) -> Self {
        let mut copy = self.clone();
        assert_eq!(pref.n(), self.n(), "replacement preference has wrong n");
        copy.prefs[agent] = pref;
        copy
    }

    /// Copy of this instance with one agent's constraint sets replaced.
    pub fn with_declaration(
        &self,
        agent: usize,
        accept: Vec<usize>,
        reject: Vec<usize>,
    ) -> Result<Self, InstanceError> {
        let mut accepts = self.accept.clone();
        let mut rejects = self.reject.clone();
        accepts[agent] = accept;
        rejects[agent] = reject;
        Self::new(self.prefs.clone(), accepts, rejects)
    }
}

/// Which solver produced a result.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SolverPath {
    /// The anonymous-instance sweep over candidate sizes.
    Asip,
    /// Acceptance-only constraints with simple preferences: invite everyone.
    FullInvitation,
    /// Component dynamic program over the acceptance graph.
    AcceptanceGraph,
    /// Component dynamic program over the rejection graph.
    RejectionGraph,
    /// Backtracking search over memberships, exact but exponential.
    ExactSearch,
    /// Backtracking search relaxed to individual rationality only.
    IrSearch,
    /// Exhaustive enumeration of all subsets.
    Oracle,
}

impl SolverPath {
    pub fn as_str(self) -> &'static str {
        match self {
            SolverPath::Asip => "asip",
            SolverPath::FullInvitation => "full-invitation",
            SolverPath::AcceptanceGraph => "acceptance-graph",
            SolverPath::RejectionGraph => "rejection-graph",
            SolverPath::ExactSearch => "exact-search",
            SolverPath::IrSearch => "ir-search",
            SolverPath::Oracle => "oracle",
        }
    }
}

/// Bookkeeping emitted alongside a verdict.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SearchStats {
    pub path: SolverPath,
    /// Search nodes visited; the unit depends on the path (candidate sizes
    /// and removals for the size sweep, branch nodes for exact search,
    /// DP node evaluations for the graph solvers).
    pub nodes: u64,
    /// Invitation sizes attempted, in attempt order.
    pub sizes_attempted: Vec<usize>,
}

impl SearchStats {
    pub fn new(path: SolverPath) -> Self {
        SearchStats {
            path,
            nodes: 0,
            sizes_attempted: vec![],
        }
    }
}

/// Outcome of a solve: a concrete invitation or a proof that none is stable.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Verdict {
    Stable(Invitation),
    NoStable,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SolveResult {
    pub verdict: Verdict,
    pub stats: SearchStats,
}

impl SolveResult {
    pub fn stable(&self) -> Option<&Invitation> {
        match &self.verdict {
            Verdict::Stable(inv) => Some(inv),
            Verdict::NoStable => None,
        }
    }

    /// Size of the found invitation, if any.
    pub fn size(&self) -> Option<usize> {
        self.stable().map(Invitation::size)
    }
}

// ---------------------------------------------------------------------------
// tests
// ---------------------------------------------------------------------------

#[cfg(test)]
mod tests {
    use super::*;
    use std::cmp::Ordering;

    #[test]
    fn invitation_normalizes_members() {
        let inv = Invitation::from_members([3, 1, 3, 0]);
        assert_eq!(inv.members(), &[0, 1, 3]);
        assert_eq!(inv.size(), 3);
        assert!(inv.contains(1));
        assert!(!inv.contains(2));
        assert_eq!(inv.with(2).members(), &[0, 1, 2, 3]);
        assert_eq!(inv.with(1), inv);
        assert_eq!(Invitation::full(3).members(), &[0, 1, 2]);
        assert!(Invitation::empty().is_empty());
    }

    #[test]
    fn bitset_order_reads_low_agents_as_low_bits() {
        let a = Invitation::from_members([0, 1]); // 0b011
        let b = Invitation::from_members([2]); // 0b100
        let c = Invitation::from_members([0, 2]); // 0b101
        assert_eq!(a.bitset_cmp(&b), Ordering::Less);
        assert_eq!(b.bitset_cmp(&c), Ordering::Less);
        assert_eq!(c.bitset_cmp(&c), Ordering::Equal);
        assert_eq!(Invitation::empty().bitset_cmp(&a), Ordering::Less);
        assert_eq!(Invitation::from_mask(0b101).members(), &[0, 2]);
    }

    #[test]
    fn instance_validation_catches_bad_references() {
        let p = |ranks: Vec<u32>| PreferenceOrder::from_ranks(ranks).unwrap();
        let prefs = vec![p(vec![1, 0, 2]), p(vec![1, 2, 0])];

        let err = GsipInstance::new(prefs.clone(), vec![vec![0], vec![]], vec![vec![]; 2])
            .unwrap_err();
        assert_eq!(
            err,
            InstanceError::SelfReference {
                agent: 0,
                list: "accept"
            }
        );

        let err = GsipInstance::new(prefs.clone(), vec![vec![]; 2], vec![vec![], vec![7]])
            .unwrap_err();
        assert!(matches!(err, InstanceError::UnknownAgent { agent: 1, .. }));

        let err = GsipInstance::anonymous(vec![p(vec![1, 0, 2]), p(vec![1, 0])]).unwrap_err();
        assert!(matches!(err, InstanceError::PreferenceLength { agent: 1, .. }));

        let ok = GsipInstance::new(
            prefs,
            vec![vec![1, 1], vec![]],
            vec![vec![], vec![0]],
        )
        .unwrap();
        assert_eq!(ok.accept_set(0), &[1]); // deduplicated
        assert_eq!(ok.alpha(), 1);
        assert_eq!(ok.beta(), 1);
        assert!(!ok.is_anonymous());
    }

    #[test]
    fn empty_instance_is_valid() {
        let inst = GsipInstance::anonymous(vec![]).unwrap();
        assert_eq!(inst.n(), 0);
        assert!(inst.is_anonymous());
        assert!(inst.all_simple());
    }
}
