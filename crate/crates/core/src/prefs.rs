//! Preferences over outcome sizes.
//!
//! An agent invited to an event with `k` attendees in total experiences the
//! outcome `k`; an agent left out (or declining) experiences the outside
//! option, outcome `0`. A [`PreferenceOrder`] is a total preorder over the
//! outcomes `0..=n`, stored as a dense rank vector: `ranks[x]` is the rank of
//! outcome `x`, and lower rank means more preferred. Ties are allowed
//! anywhere except against the outside option: no positive size may share a
//! rank with outcome `0`.

use std::fmt;

use thiserror::Error;

/// Validation failures for rank vectors and shape parameters.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PreferenceError {
    /// A rank vector needs at least the entry for outcome `0`.
    #[error("rank vector is empty; it needs one entry per outcome 0..=n")]
    EmptyRanks,
    /// Outcome `outcome` was given the same rank as the outside option.
    #[error("outcome {outcome} ties with the outside option (both rank {rank})")]
    TiesWithOutside { outcome: usize, rank: u32 },
    /// Shape parameters must satisfy `1 <= low <= ideal <= high <= n`.
    #[error("invalid interval parameters low={low} ideal={ideal} high={high} for n={n}")]
    InvalidInterval {
        low: usize,
        ideal: usize,
        high: usize,
        n: usize,
    },
    /// The groups passed to [`PreferenceOrder::from_groups`] must partition
    /// the outcome set `0..=n` exactly.
    #[error("indifference groups do not partition the outcomes: {reason}")]
    InvalidGroups { reason: String },
}

/// A total preorder over the outcomes `0..=n`, where `n` is the number of
/// agents in the instance and outcome `0` is the outside option.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct PreferenceOrder {
    ranks: Vec<u32>,
}

impl PreferenceOrder {
    /// Builds a preference from a dense rank vector of length `n + 1`.
    /// `ranks[x]` is the rank of outcome `x`; lower is better. Rank values
    /// need not be contiguous. Fails if any positive outcome ties with
    /// outcome `0`.
    pub fn from_ranks(ranks: Vec<u32>) -> Result<Self, PreferenceError> {
        if ranks.is_empty() {
            return Err(PreferenceError::EmptyRanks);
        }
        let zero = ranks[0];
        for (outcome, &r) in ranks.iter().enumerate().skip(1) {
            if r == zero {
                return Err(PreferenceError::TiesWithOutside { outcome, rank: r });
            }
        }
        Ok(PreferenceOrder { ranks })
    }

    /// Builds a preference from indifference groups listed best-first.
    /// Every outcome in `0..=n` must appear in exactly one group, so `n` is
    /// implied by the total number of outcomes listed.
    ///
    /// `from_groups(&[&[1], &[0], &[2, 3]])` is the order `1 > 0 > 2 ~ 3`.
    pub fn from_groups(groups: &[&[usize]]) -> Result<Self, PreferenceError> {
        let total: usize = groups.iter().map(|g| g.len()).sum();
        if total == 0 {
            return Err(PreferenceError::EmptyRanks);
        }
        let mut ranks = vec![u32::MAX; total];
        for (rank, group) in groups.iter().enumerate() {
            for &outcome in *group {
                if outcome >= total {
                    return Err(PreferenceError::InvalidGroups {
                        reason: format!("outcome {outcome} out of range 0..={}", total - 1),
                    });
                }
                if ranks[outcome] != u32::MAX {
                    return Err(PreferenceError::InvalidGroups {
                        reason: format!("outcome {outcome} listed twice"),
                    });
                }
                ranks[outcome] = rank as u32;
            }
        }
        Self::from_ranks(ranks)
    }

    /// Number of agents: the largest positive outcome.
    pub fn n(&self) -> usize {
        self.ranks.len() - 1
    }

    /// Rank of `outcome`; panics if `outcome > n`.
    pub fn rank(&self, outcome: usize) -> u32 {
        self.ranks[outcome]
    }

    /// The raw rank vector.
    pub fn ranks(&self) -> &[u32] {
        &self.ranks
    }

    /// Whether the agent strictly prefers attending an event of `size`
    /// attendees to staying out. Sizes outside `1..=n` are never acceptable,
    /// so callers may probe `size + 1` without bounds checks.
    pub fn accepts(&self, size: usize) -> bool {
        size >= 1 && size <= self.n() && self.ranks[size] < self.ranks[0]
    }

    /// Acceptable sizes in increasing order.
    pub fn acceptable_sizes(&self) -> impl Iterator<Item = usize> + '_ {
        (1..=self.n()).filter(move |&x| self.accepts(x))
    }

    /// Whether every positive size is acceptable.
    pub fn is_simple(&self) -> bool {
        (1..=self.n()).all(|x| self.accepts(x))
    }

    /// Canonical single-peaked preference: acceptable sizes are exactly
    /// `low..=high`, ranked by distance from `ideal`.
    pub fn single_peaked(
        n: usize,
        low: usize,
        high: usize,
        ideal: usize,
    ) -> Result<Self, PreferenceError> {
        if !(1 <= low && low <= ideal && ideal <= high && high <= n) {
            return Err(PreferenceError::InvalidInterval {
                low,
                ideal,
                high,
                n,
            });
        }
        let worst = (ideal - low).max(high - ideal) as u32;
        let mut ranks = vec![worst + 2; n + 1];
        ranks[0] = worst + 1;
        for x in low..=high {
            ranks[x] = (x as i64 - ideal as i64).unsigned_abs() as u32;
        }
        Self::from_ranks(ranks)
    }

    /// Canonical increasing preference with willingness threshold `low`:
    /// sizes `low..=n` are acceptable and bigger is better. `low = n + 1`
    /// encodes an agent who never attends.
    pub fn increasing(n: usize, low: usize) -> Result<Self, PreferenceError> {
        if low == n + 1 {
            return Ok(Self::empty(n));
        }
        Self::single_peaked(n, low, n, n)
    }

    /// Canonical decreasing preference: sizes `1..=high` are acceptable and
    /// smaller is better. `high = 0` encodes an agent who never attends.
    pub fn decreasing(n: usize, high: usize) -> Result<Self, PreferenceError> {
        if high == 0 {
            return Ok(Self::empty(n));
        }
        Self::single_peaked(n, 1, high, 1)
    }

    /// Preference of an agent who never wants to attend.
    pub fn empty(n: usize) -> Self {
        let mut ranks = vec![1; n + 1];
        ranks[0] = 0;
        PreferenceOrder { ranks }
    }

    /// Simple preference indifferent among all positive sizes.
    pub fn simple_uniform(n: usize) -> Self {
        if n == 0 {
            return PreferenceOrder { ranks: vec![0] };
        }
        let mut ranks = vec![0; n + 1];
        ranks[0] = 1;
        PreferenceOrder { ranks }
    }
}

impl fmt::Debug for PreferenceOrder {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "PreferenceOrder({self})")
    }
}

impl fmt::Display for PreferenceOrder {
    /// Group notation, best group first: `1 > 0 > 2 ~ 3`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut outcomes: Vec<usize> = (0..self.ranks.len()).collect();
        outcomes.sort_by_key(|&x| (self.ranks[x], x));
        let mut first = true;
        let mut prev_rank = 0;
        for x in outcomes {
            if first {
                first = false;
            } else if self.ranks[x] == prev_rank {
                write!(f, " ~ ")?;
            } else {
                write!(f, " > ")?;
            }
            prev_rank = self.ranks[x];
            write!(f, "{x}")?;
        }
        Ok(())
    }
}

/// Coarse shape of the acceptable-size set and of the ranking around the
/// most preferred size.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ShapeKind {
    /// No size is acceptable.
    Empty,
    /// Acceptable sizes form `low..=n` and bigger is (weakly) better.
    Increasing,
    /// Acceptable sizes form `1..=high` and smaller is (weakly) better.
    Decreasing,
    /// Acceptable sizes form an interval, ranked unimodally around the ideal.
    SinglePeaked,
    /// Anything else: gaps in the acceptable set, or a non-unimodal ranking.
    General,
}

/// Classification of a preference. For [`ShapeKind::Empty`] the three size
/// fields are `0`; for [`ShapeKind::General`] they still describe the
/// acceptable set (its extremes and its best element) even though the
/// single-peaked structure is absent.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PreferenceShape {
    pub kind: ShapeKind,
    /// Smallest acceptable size.
    pub min_acceptable: usize,
    /// Largest acceptable size.
    pub max_acceptable: usize,
    /// Most preferred size. When several acceptable sizes share the best
    /// rank, the smallest of them is reported.
    pub ideal: usize,
}

/// Classifies a preference by the shape of its acceptable sizes.
///
/// Single-peakedness requires the acceptable sizes to be one contiguous
/// interval with ranks weakly improving toward the ideal from both sides.
/// Plateaus are allowed; the reported ideal is always the smallest size with
/// the best rank, so a full-interval plateau like `1 ~ 2 > 0` classifies as
/// [`ShapeKind::Decreasing`].
pub fn classify_preference(pref: &PreferenceOrder) -> PreferenceShape {
    let acceptable: Vec<usize> = pref.acceptable_sizes().collect();
    if acceptable.is_empty() {
        return PreferenceShape {
            kind: ShapeKind::Empty,
            min_acceptable: 0,
            max_acceptable: 0,
            ideal: 0,
        };
    }
    let low = acceptable[0];
    let high = *acceptable.last().unwrap();
    let ideal = acceptable
        .iter()
        .copied()
        .min_by_key(|&x| (pref.rank(x), x))
        .unwrap();
    let shape = |kind| PreferenceShape {
        kind,
        min_acceptable: low,
        max_acceptable: high,
        ideal,
    };

    let contiguous = acceptable.len() == high - low + 1;
    // If any peak position works, the leftmost best-ranked size does.
    let unimodal = (low..ideal).all(|x| pref.rank(x) >= pref.rank(x + 1))
        && (ideal..high).all(|x| pref.rank(x) <= pref.rank(x + 1));
    if !contiguous || !unimodal {
        return shape(ShapeKind::General);
    }
    if ideal == high && ideal == pref.n() {
        shape(ShapeKind::Increasing)
    } else if ideal == low && ideal == 1 {
        shape(ShapeKind::Decreasing)
    } else {
        shape(ShapeKind::SinglePeaked)
    }
}

// ---------------------------------------------------------------------------
// tests
// ---------------------------------------------------------------------------
