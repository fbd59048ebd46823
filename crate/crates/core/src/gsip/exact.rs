//! Exhaustive search for a fixed invitation size with constraint
//! propagation.
//!
//! Agents are tri-state (in / out / undecided) bitmasks. Branching always
//! splits the highest undecided agent and tries "out" before "in", so
//! complete assignments are visited in increasing order of their bitmask
//! encoding — the first solution found is therefore the canonical minimum.
//! Propagation closes accept/reject sets of invited agents, applies size
//! bounds, and (when envy-freeness is required) eliminates assignments an
//! excluded agent could block.

use crate::stability::MaskView;

/// Finds the bitmask-minimal set of exactly `s` agents that is individually
/// rational — and envy-free when `require_ef` — at size `s`. `nodes` counts
/// search-tree nodes across calls.
pub(crate) fn find_at_size(
    view: &MaskView,
    s: usize,
    require_ef: bool,
    nodes: &mut u64,
) -> Option<u64> {
    if s > view.n {
        return None;
    }
    let searcher = Searcher {
        view,
        s,
        require_ef,
    };
    searcher.descend(0, view.all & !view.willing_mask(s), nodes)
}

struct Searcher<'a> {
    view: &'a MaskView,
    s: usize,
    require_ef: bool,
}

impl Searcher<'_> {
    fn descend(&self, in_mask: u64, out_mask: u64, nodes: &mut u64) -> Option<u64> {
        *nodes += 1;
        let (in_mask, out_mask) = self.propagate(in_mask, out_mask)?;
        let undecided = self.view.all & !in_mask & !out_mask;
        if undecided == 0 {
            debug_assert_eq!(in_mask.count_ones() as usize, self.s);
            let ok = if self.require_ef {
                self.view.is_stable_mask(in_mask)
            } else {
                self.view.is_ir_mask(in_mask)
            };
            return ok.then_some(in_mask);
        }
        let bit = 1u64 << (63 - undecided.leading_zeros());
        self.descend(in_mask, out_mask | bit, nodes)
            .or_else(|| self.descend(in_mask | bit, out_mask, nodes))
    }

    /// Grows both masks to a fixpoint; `None` means contradiction.
    fn propagate(&self, mut in_mask: u64, mut out_mask: u64) -> Option<(u64, u64)> {
        let willing = self.view.willing_mask(self.s);
        let willing_next = self.view.willing_mask(self.s + 1);
        loop {
            if in_mask & out_mask != 0 || in_mask & !willing != 0 {
                return None;
            }
            let undecided = self.view.all & !in_mask & !out_mask;
            let in_count = in_mask.count_ones() as usize;
            if in_count > self.s || in_count + (undecided.count_ones() as usize) < self.s {
                return None;
            }

            let mut grown_in = in_mask;
            let mut grown_out = out_mask;

            // Invited agents drag their accept set in and reject set out.
            let mut m = in_mask;
            while m != 0 {
                let i = m.trailing_zeros() as usize;
                m &= m - 1;
                grown_in |= self.view.accept_mask(i);
                grown_out |= self.view.reject_mask(i);
            }

            if in_count == self.s {
                grown_out |= undecided;
            } else if in_count + undecided.count_ones() as usize == self.s {
                grown_in |= undecided;
            }

            if self.require_ef {
                // An excluded agent blocks unless a friend stays out or a
                // foe gets in; force the last open slot when only one way
                // to spoil the block remains.
                let mut m = out_mask & willing_next;
                while m != 0 {
                    let j = m.trailing_zeros() as usize;
                    m &= m - 1;
                    let friends = self.view.accept_mask(j);
                    let foes = self.view.reject_mask(j);
                    if friends & out_mask != 0 || foes & in_mask != 0 {
                        continue;
                    }
                    let open = (friends | foes) & undecided;
                    if open == 0 {
                        return None;
                    }
                    if open.count_ones() == 1 {
                        if friends & open != 0 && foes & open != 0 {
                            continue;
                        }
                        if friends & open != 0 {
                            grown_out |= open;
                        } else {
                            grown_in |= open;
                        }
                    }
                }
            }

            if grown_in == in_mask && grown_out == out_mask {
                return Some((in_mask, out_mask));
            }
            in_mask = grown_in;
            out_mask = grown_out;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::instance::{GsipInstance, Invitation};
    use crate::oracle::enumerate_stable;
    use crate::prefs::PreferenceOrder;
    use crate::stability::{is_individually_rational, is_stable};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn view(inst: &GsipInstance) -> MaskView {
        MaskView::new(inst).unwrap()
    }

    /// Four agents who only care about constraints: partners insist on each
    /// other and veto the opposite pair.
    fn paired_rivals() -> GsipInstance {
        GsipInstance::new(
            vec![PreferenceOrder::simple_uniform(4); 4],
            vec![vec![1], vec![0], vec![3], vec![2]],
            vec![vec![2], vec![3], vec![0], vec![1]],
        )
        .unwrap()
    }

    #[test]
    fn finds_the_minimal_pair_of_paired_rivals() {
        let inst = paired_rivals();
        let mut nodes = 0;
        assert_eq!(find_at_size(&view(&inst), 2, true, &mut nodes), Some(0b0011));
        assert_eq!(find_at_size(&view(&inst), 4, true, &mut nodes), None);
        assert_eq!(find_at_size(&view(&inst), 3, true, &mut nodes), None);
        // Leaving everyone out is blocked: any agent would join alone...
        // except that their friend is missing, so size 0 stays stable.
        assert_eq!(find_at_size(&view(&inst), 0, true, &mut nodes), Some(0));
    }

    #[test]
    fn ir_search_ignores_envy() {
        // One agent wants company that does not want to come.
        let inst = GsipInstance::anonymous(vec![
            PreferenceOrder::from_groups(&[&[1], &[0], &[2]]).unwrap(),
            PreferenceOrder::from_groups(&[&[2], &[0], &[1]]).unwrap(),
        ])
        .unwrap();
        let mut nodes = 0;
        // {0} is IR but agent 1 would crash it, so it is not stable.
        assert_eq!(find_at_size(&view(&inst), 1, false, &mut nodes), Some(0b01));
        assert_eq!(find_at_size(&view(&inst), 1, true, &mut nodes), None);
    }

    #[test]
    fn agrees_with_the_oracle_on_random_constrained_instances() {
        let mut rng = ChaCha8Rng::seed_from_u64(0xE5A);
        for round in 0..300 {
            let n = rng.gen_range(1..=7);
            let inst = random_instance(&mut rng, n);
            let stable = enumerate_stable(&inst, 20).unwrap();
            let v = view(&inst);
            let mut nodes = 0;
            for s in 0..=n {
                let want = stable.iter().find(|inv| inv.size() == s);
                let got = find_at_size(&v, s, true, &mut nodes);
                match (want, got) {
                    (Some(inv), Some(mask)) => {
                        assert_eq!(
                            &Invitation::from_mask(mask),
                            inv,
                            "round {round}, size {s}: wrong witness on {inst:?}"
                        );
                        assert!(is_stable(&inst, &Invitation::from_mask(mask)));
                    }
                    (None, None) => {}
                    other => panic!("round {round}, size {s}: {other:?} on {inst:?}"),
                }
                if let Some(mask) = find_at_size(&v, s, false, &mut nodes) {
                    assert!(is_individually_rational(&inst, &Invitation::from_mask(mask)));
                }
            }
        }
    }

    fn random_instance(rng: &mut ChaCha8Rng, n: usize) -> GsipInstance {
        let prefs = (0..n)
            .map(|_| {
                let mut ranks: Vec<u32> = (0..=n).map(|_| rng.gen_range(0..=3)).collect();
                for x in 1..=n {
                    if ranks[x] == ranks[0] {
                        ranks[x] += 1;
                    }
                }
                PreferenceOrder::from_ranks(ranks).unwrap()
            })
            .collect();
        let mut accept = vec![vec![]; n];
        let mut reject = vec![vec![]; n];
        for i in 0..n {
            for j in 0..n {
                if j == i {
                    continue;
                }
                match rng.gen_range(0..10) {
                    0 => accept[i].push(j),
                    1 => reject[i].push(j),
                    _ => {}
                }
            }
        }
        GsipInstance::new(prefs, accept, reject).unwrap()
    }
}
