//! Stability predicates.
//!
//! An invitation `S` induces, for each agent, one of two experiences: members
//! get the outcome `|S|`, everyone else gets the outside option. Stability
//! combines two requirements:
//!
//! * individually rational: every member accepts the size `|S|`, has all of
//!   their accept set invited, and none of their reject set invited;
//! * envy free: no outsider could join and find the grown invitation
//!   individually rational for themselves.
//!
//! An agent's accept and reject sets constrain which invitations they can
//! attend, but never how they value an invitation: valuation depends only on
//! membership and size.

use crate::instance::{GsipInstance, Invitation};
use crate::prefs::PreferenceOrder;

/// Result of comparing two invitations from one agent's point of view.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Comparison {
    PrefersFirst,
    Indifferent,
    PrefersSecond,
}

/// The rank `agent` assigns to living through invitation `inv`:
/// the rank of `|inv|` for members, the rank of the outside option otherwise.
pub fn induced_rank(pref: &PreferenceOrder, agent: usize, inv: &Invitation) -> u32 {
    if inv.contains(agent) {
        pref.rank(inv.size())
    } else {
        pref.rank(0)
    }
}

/// Compares two invitations under an explicit preference.
pub fn compare_with_preference(
    pref: &PreferenceOrder,
    agent: usize,
    first: &Invitation,
    second: &Invitation,
) -> Comparison {
    let a = induced_rank(pref, agent, first);
    let b = induced_rank(pref, agent, second);
    match a.cmp(&b) {
        std::cmp::Ordering::Less => Comparison::PrefersFirst,
        std::cmp::Ordering::Equal => Comparison::Indifferent,
        std::cmp::Ordering::Greater => Comparison::PrefersSecond,
    }
}

/// Compares two invitations from `agent`'s point of view in `inst`.
pub fn compare_for_agent(
    inst: &GsipInstance,
    agent: usize,
    first: &Invitation,
    second: &Invitation,
) -> Comparison {
    compare_with_preference(inst.preference(agent), agent, first, second)
}

fn sorted_subset(sub: &[usize], sup: &Invitation) -> bool {
    sub.iter().all(|&x| sup.contains(x))
}

fn sorted_disjoint(a: &[usize], b: &Invitation) -> bool {
    a.iter().all(|&x| !b.contains(x))
}

/// Whether every member of `inv` is willing to attend it: accepts the size,
/// has their accept set fully invited, and their reject set fully excluded.
/// The empty invitation is vacuously individually rational.
pub fn is_individually_rational(inst: &GsipInstance, inv: &Invitation) -> bool {
    let size = inv.size();
    inv.iter().all(|i| {
        inst.preference(i).accepts(size)
            && sorted_subset(inst.accept_set(i), inv)
            && sorted_disjoint(inst.reject_set(i), inv)
    })
}

/// Whether an outsider could join `inv` and find the result individually
/// rational for themselves. Note an agent never lists itself in its accept
/// set, so only the already-invited members matter for the subset check.
pub fn blocks(inst: &GsipInstance, inv: &Invitation, outsider: usize) -> bool {
    inst.preference(outsider).accepts(inv.size() + 1)
        && sorted_subset(inst.accept_set(outsider), inv)
        && sorted_disjoint(inst.reject_set(outsider), inv)
}

/// Whether no outsider envies `inv`.
pub fn is_envy_free(inst: &GsipInstance, inv: &Invitation) -> bool {
    (0..inst.n()).all(|j| inv.contains(j) || !blocks(inst, inv, j))
}

/// Individually rational and envy free.
pub fn is_stable(inst: &GsipInstance, inv: &Invitation) -> bool {
    is_individually_rational(inst, inv) && is_envy_free(inst, inv)
}

/// Bitmask view of an instance for hot loops; agents fit in a `u64`.
pub(crate) struct MaskView {
    pub n: usize,
    pub all: u64,
    accept: Vec<u64>,
    reject: Vec<u64>,
    /// `willing[s] & (1 << i)` set iff agent `i` accepts size `s`.
    /// Indexed `0..=n+1` so size `n + 1` probes read as "nobody".
    willing: Vec<u64>,
}

impl MaskView {
    pub fn new(inst: &GsipInstance) -> Option<Self> {
        let n = inst.n();
        if n > 64 {
            return None;
        }
        let to_mask = |set: &[usize]| set.iter().fold(0u64, |acc, &x| acc | (1 << x));
        let accept = (0..n).map(|i| to_mask(inst.accept_set(i))).collect();
        let reject = (0..n).map(|i| to_mask(inst.reject_set(i))).collect();
        let willing = (0..=n + 1)
            .map(|s| {
                (0..n)
                    .filter(|&i| inst.preference(i).accepts(s))
                    .fold(0u64, |acc, i| acc | (1 << i))
            })
            .collect();
        let all = if n == 64 { u64::MAX } else { (1 << n) - 1 };
        Some(MaskView {
            n,
            all,
            accept,
            reject,
            willing,
        })
    }

    pub fn willing_mask(&self, size: usize) -> u64 {
        self.willing[size]
    }

    pub fn accept_mask(&self, agent: usize) -> u64 {
        self.accept[agent]
    }

    pub fn reject_mask(&self, agent: usize) -> u64 {
        self.reject[agent]
    }

    pub fn is_ir_mask(&self, mask: u64) -> bool {
        let size = mask.count_ones() as usize;
        if mask & !self.willing[size] != 0 {
            return false;
        }
        let mut m = mask;
        while m != 0 {
            let i = m.trailing_zeros() as usize;
            m &= m - 1;
            if self.accept[i] & !mask != 0 || self.reject[i] & mask != 0 {
                return false;
            }
        }
        true
    }

    pub fn is_ef_mask(&self, mask: u64) -> bool {
        let size = mask.count_ones() as usize;
        let mut candidates = !mask & self.all & self.willing[size + 1];
        while candidates != 0 {
            let j = candidates.trailing_zeros() as usize;
            candidates &= candidates - 1;
            if self.accept[j] & !mask == 0 && self.reject[j] & mask == 0 {
                return false;
            }
        }
        true
    }

    pub fn is_stable_mask(&self, mask: u64) -> bool {
        self.is_ir_mask(mask) && self.is_ef_mask(mask)
    }
}

// ---------------------------------------------------------------------------
// tests
// ---------------------------------------------------------------------------

#[cfg(test)]
mod tests {
    use super::*;
    use crate::prefs::PreferenceOrder;

    fn groups(gs: &[&[usize]]) -> PreferenceOrder {
        PreferenceOrder::from_groups(gs).unwrap()
    }

    fn inv(members: &[usize]) -> Invitation {
        Invitation::from_members(members.iter().copied())
    }

    /// Three agents; the first two only want a head-to-head meeting, the
    /// third never attends.
    fn solo_pair_instance() -> GsipInstance {
        GsipInstance::anonymous(vec![
            groups(&[&[1], &[0], &[2, 3]]),
            groups(&[&[1], &[0], &[2, 3]]),
            groups(&[&[0], &[1, 2, 3]]),
        ])
        .unwrap()
    }

    /// Four agents with simple preferences and one accept + one reject each:
    /// 0 needs 1 but bars 2; 1 needs 0 but bars 3; 2 needs 3 but bars 0;
    /// 3 needs 2 but bars 1.
    fn paired_rivals_instance() -> GsipInstance {
        GsipInstance::new(
            vec![PreferenceOrder::simple_uniform(4); 4],
            vec![vec![1], vec![0], vec![3], vec![2]],
            vec![vec![2], vec![3], vec![0], vec![1]],
        )
        .unwrap()
    }

    /// Three agents with simple preferences and a rejection cycle.
    fn rejection_cycle_instance() -> GsipInstance {
        GsipInstance::new(
            vec![PreferenceOrder::simple_uniform(3); 3],
            vec![vec![]; 3],
            vec![vec![1], vec![2], vec![0]],
        )
        .unwrap()
    }

    #[test]
    fn members_are_valued_by_size_and_outsiders_by_the_outside_option() {
        // 1 > 2 > 3 > 0 for agent 0.
        let inst = GsipInstance::anonymous(vec![
            groups(&[&[1], &[2], &[3], &[0]]),
            groups(&[&[3], &[0], &[1, 2]]),
            groups(&[&[3], &[0], &[1, 2]]),
        ])
        .unwrap();
        // Agent 0 prefers a solo event to the full event.
        assert_eq!(
            compare_for_agent(&inst, 0, &inv(&[0]), &inv(&[0, 1, 2])),
            Comparison::PrefersFirst
        );
        // Agent 1 stays out either way: indifferent between two sets it is
        // not part of.
        assert_eq!(
            compare_for_agent(&inst, 1, &inv(&[0]), &inv(&[0, 2])),
            Comparison::Indifferent
        );
        // Agent 1 prefers attending the full event to staying out.
        assert_eq!(
            compare_for_agent(&inst, 1, &inv(&[0, 1, 2]), &inv(&[0])),
            Comparison::PrefersFirst
        );
    }

    #[test]
    fn comparing_an_invitation_with_itself_is_indifferent() {
        let inst = solo_pair_instance();
        for members in [&[][..], &[0][..], &[0, 1][..], &[0, 1, 2][..]] {
            assert_eq!(
                compare_for_agent(&inst, 0, &inv(members), &inv(members)),
                Comparison::Indifferent
            );
        }
    }

    #[test]
    fn individual_rationality_checks_size_and_constraint_sets() {
        let inst = paired_rivals_instance();
        assert!(is_individually_rational(&inst, &inv(&[])));
        assert!(is_individually_rational(&inst, &inv(&[0, 1])));
        assert!(is_individually_rational(&inst, &inv(&[2, 3])));
        // 0 bars 2, and 1's required partner 0 refuses to sit with 2.
        assert!(!is_individually_rational(&inst, &inv(&[0, 2, 3])));
        assert!(!is_individually_rational(&inst, &inv(&[0, 1, 2, 3])));
        // Missing required partner.
        assert!(!is_individually_rational(&inst, &inv(&[0])));

        // Size acceptance: the solo-pair agents only accept size 1.
        let solo = solo_pair_instance();
        assert!(is_individually_rational(&solo, &inv(&[0])));
        assert!(!is_individually_rational(&solo, &inv(&[0, 1])));
    }

    #[test]
    fn envy_freeness_asks_whether_an_outsider_could_join() {
        let solo = solo_pair_instance();
        // Agent 1 would love to replace nothing: joining the empty invitation
        // gives a size-1 event it accepts.
        assert!(!is_envy_free(&solo, &inv(&[])));
        // With a size-1 event running, joining would make size 2: nobody
        // wants that, and agent 2 never attends.
        assert!(is_envy_free(&solo, &inv(&[0])));
        assert!(is_stable(&solo, &inv(&[0])));
        assert!(is_stable(&solo, &inv(&[1])));
        assert!(!is_stable(&solo, &inv(&[2])));

        let rivals = paired_rivals_instance();
        // Everyone's join attempt is barred by constraints.
        assert!(is_envy_free(&rivals, &inv(&[])));
        assert!(is_stable(&rivals, &inv(&[])));
        assert!(is_stable(&rivals, &inv(&[0, 1])));
        assert!(is_stable(&rivals, &inv(&[2, 3])));

        // A rejection cycle leaves every subset either blocked or irrational.
        let cycle = rejection_cycle_instance();
        for mask in 0u64..8 {
            let members: Vec<usize> = (0..3).filter(|&i| mask & (1 << i) != 0).collect();
            assert!(
                !is_stable(&cycle, &inv(&members)),
                "unexpected stable set {members:?}"
            );
        }
    }

    #[test]
    fn empty_instance_has_a_stable_empty_invitation() {
        let inst = GsipInstance::anonymous(vec![]).unwrap();
        assert!(is_stable(&inst, &Invitation::empty()));
    }

    #[test]
    fn mask_view_agrees_with_the_slice_predicates() {
        for inst in [
            solo_pair_instance(),
            paired_rivals_instance(),
            rejection_cycle_instance(),
        ] {
            let view = MaskView::new(&inst).unwrap();
            for mask in 0u64..(1 << inst.n()) {
                let members = Invitation::from_mask(mask);
                assert_eq!(view.is_ir_mask(mask), is_individually_rational(&inst, &members));
                assert_eq!(view.is_ef_mask(mask), is_envy_free(&inst, &members));
                assert_eq!(view.is_stable_mask(mask), is_stable(&inst, &members));
            }
        }
    }

    #[test]
    fn comparison_is_a_total_preorder_over_invitations() {
        // Exhaustive transitivity check over all pairs for a small instance
        // with mixed shapes.
        let inst = GsipInstance::anonymous(vec![
            groups(&[&[2], &[3], &[1], &[0], &[4]]),
            groups(&[&[1], &[3], &[0], &[2], &[4]]),
            groups(&[&[0], &[1, 2, 3, 4]]),
            groups(&[&[4], &[3], &[2], &[1], &[0]]),
        ])
        .unwrap();
        let invitations: Vec<Invitation> = (0u64..16).map(Invitation::from_mask).collect();
        for agent in 0..4 {
            let weakly_prefers = |a: &Invitation, b: &Invitation| {
                compare_for_agent(&inst, agent, a, b) != Comparison::PrefersSecond
            };
            for a in &invitations {
                for b in &invitations {
                    // Totality: at least one direction holds.
                    assert!(weakly_prefers(a, b) || weakly_prefers(b, a));
                    for c in &invitations {
                        if weakly_prefers(a, b) && weakly_prefers(b, c) {
                            assert!(weakly_prefers(a, c));
                        }
                    }
                }
            }
        }
    }
}
