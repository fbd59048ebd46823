//! Polynomial solver for instances whose only constraints are single
//! friends (everyone's reject list empty) or single foes (accept lists
//! empty).
//!
//! Pointing each constrained agent at its friend or foe yields a functional
//! graph: every weak component is either a tree rooted at an unconstrained
//! agent or has exactly one cycle with trees hanging off it. For a target
//! size `s`, a two-state dynamic program over each component computes the
//! set of achievable member counts, where a node is `In` (attending, which
//! requires accepting `s`) or `Out` (subject to the no-blocking conditions
//! when envy-freeness is demanded). Component count-sets combine by sumset,
//! and the instance admits a stable invitation of size `s` exactly when `s`
//! lands in the combined set.
//!
//! The admissible (child, parent) state pairs across an edge:
//!
//! | child → parent  | friend edge              | foe edge                 |
//! |-----------------|--------------------------|--------------------------|
//! | In,  In         | yes                      | no                       |
//! | In,  Out        | no                       | yes                      |
//! | Out, In         | only if child unwilling  | yes                      |
//! | Out, Out        | yes                      | only if child unwilling  |
//!
//! "unwilling" means the child would not accept an event of size `s + 1`,
//! so leaving it out cannot create envy; those two conditional entries (and
//! the matching condition on tree roots) are dropped entirely when only
//! individual rationality is required.
//!
//! The invitation itself is recovered by re-running the feasibility check
//! `n` times, greedily forcing agents out from the highest index down,
//! which lands on the minimal invitation in bitmask encoding — the same
//! canonical answer the exhaustive solvers produce.

use crate::instance::{GsipInstance, Invitation, SearchStats};
use crate::stability::is_stable;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) enum ConstraintMode {
    /// Edges follow singleton accept sets; reject sets must be empty.
    Accept,
    /// Edges follow singleton reject sets; accept sets must be empty.
    Reject,
}

/// A set of achievable member counts in `0..=cap`, as a bitset.
#[derive(Clone, Debug, PartialEq, Eq)]
struct SizeSet {
    words: Vec<u64>,
    cap: usize,
}

impl SizeSet {
    fn empty(cap: usize) -> Self {
        SizeSet {
            words: vec![0; cap / 64 + 1],
            cap,
        }
    }

    fn singleton(cap: usize, k: usize) -> Self {
        let mut set = SizeSet::empty(cap);
        set.words[k / 64] |= 1 << (k % 64);
        set
    }

    fn is_empty(&self) -> bool {
        self.words.iter().all(|&w| w == 0)
    }

    fn contains(&self, k: usize) -> bool {
        k <= self.cap && self.words[k / 64] >> (k % 64) & 1 == 1
    }

    fn or_assign(&mut self, other: &SizeSet) {
        debug_assert_eq!(self.cap, other.cap);
        for (w, o) in self.words.iter_mut().zip(&other.words) {
            *w |= o;
        }
    }

    /// `{a + b | a in self, b in other, a + b <= cap}`.
    fn sumset(&self, other: &SizeSet) -> SizeSet {
        debug_assert_eq!(self.cap, other.cap);
        let mut out = SizeSet::empty(self.cap);
        for (i, &word) in other.words.iter().enumerate() {
            let mut w = word;
            while w != 0 {
                let k = i * 64 + w.trailing_zeros() as usize;
                w &= w - 1;
                out.shl_or(self, k);
            }
        }
        out.truncate();
        out
    }

    /// `self |= other << k`.
    fn shl_or(&mut self, other: &SizeSet, k: usize) {
        let words = k / 64;
        let bits = k % 64;
        for i in 0..other.words.len() {
            let v = other.words[i];
            if v == 0 {
                continue;
            }
            if i + words < self.words.len() {
                self.words[i + words] |= v << bits;
            }
            if bits > 0 && i + words + 1 < self.words.len() {
                self.words[i + words + 1] |= v >> (64 - bits);
            }
        }
    }

    /// Clears bits above `cap` so spilled sums never feed later shifts.
    fn truncate(&mut self) {
        let top = self.cap % 64;
        if top < 63 {
            *self.words.last_mut().unwrap() &= (1u64 << (top + 1)) - 1;
        }
    }
}

pub(crate) struct PseudoforestSolver<'a> {
    inst: &'a GsipInstance,
    mode: ConstraintMode,
    require_ef: bool,
    children: Vec<Vec<usize>>,
    /// Unconstrained agents; each roots one tree component.
    roots: Vec<usize>,
    /// One node list per cyclic component, in parent-pointer order:
    /// `cycle[j]`'s constraint points at `cycle[(j + 1) % len]`.
    cycles: Vec<Vec<usize>>,
}

impl<'a> PseudoforestSolver<'a> {
    /// Builds the graph decomposition. The instance must fit `mode`:
    /// at most one friend and no foes, or at most one foe and no friends.
    pub(crate) fn new(inst: &'a GsipInstance, mode: ConstraintMode, require_ef: bool) -> Self {
        let n = inst.n();
        let parent: Vec<Option<usize>> = (0..n)
            .map(|i| {
                let (own, other) = match mode {
                    ConstraintMode::Accept => (inst.accept_set(i), inst.reject_set(i)),
                    ConstraintMode::Reject => (inst.reject_set(i), inst.accept_set(i)),
                };
                assert!(own.len() <= 1 && other.is_empty(), "not a pseudoforest instance");
                own.first().copied()
            })
            .collect();

        let mut children = vec![Vec::new(); n];
        for (i, &p) in parent.iter().enumerate() {
            if let Some(p) = p {
                children[p].push(i);
            }
        }

        let mut roots = Vec::new();
        let mut cycles = Vec::new();
        // 0 unvisited, 1 on the current walk, 2 settled.
        let mut state = vec![0u8; n];
        for start in 0..n {
            if state[start] != 0 {
                continue;
            }
            let mut path = Vec::new();
            let mut v = start;
            loop {
                match state[v] {
                    1 => {
                        let at = path.iter().position(|&x| x == v).unwrap();
                        cycles.push(path[at..].to_vec());
                        break;
                    }
                    2 => break,
                    _ => {
                        state[v] = 1;
                        path.push(v);
                        match parent[v] {
                            Some(p) => v = p,
                            None => {
                                roots.push(v);
                                break;
                            }
                        }
                    }
                }
            }
            for &x in &path {
                state[x] = 2;
            }
        }

        PseudoforestSolver {
            inst,
            mode,
            require_ef,
            children,
            roots,
            cycles,
        }
    }

    fn willing(&self, v: usize, size: usize) -> bool {
        self.inst.preference(v).accepts(size)
    }

    /// May `child` take `child_in` while its constraint target takes
    /// `parent_in`, at target size `s`?
    fn edge_allows(&self, child: usize, child_in: bool, parent_in: bool, s: usize) -> bool {
        let spared = !self.require_ef || !self.willing(child, s + 1);
        match (self.mode, child_in, parent_in) {
            (ConstraintMode::Accept, true, in_) => in_,
            (ConstraintMode::Accept, false, true) => spared,
            (ConstraintMode::Accept, false, false) => true,
            (ConstraintMode::Reject, true, in_) => !in_,
            (ConstraintMode::Reject, false, true) => true,
            (ConstraintMode::Reject, false, false) => spared,
        }
    }

    /// Count-sets reachable in `child`'s subtree for each state of the
    /// constraint target.
    fn child_options(&self, child: usize, pair: &[SizeSet; 2], parent_in: bool, s: usize) -> SizeSet {
        let mut out = SizeSet::empty(self.inst.n());
        for child_in in [false, true] {
            if !pair[child_in as usize].is_empty() && self.edge_allows(child, child_in, parent_in, s)
            {
                out.or_assign(&pair[child_in as usize]);
            }
        }
        out
    }

    /// Post-order DP over the tree hanging at `top` (`skip` excludes the
    /// in-cycle child when `top` lies on a cycle). Returns the count-sets
    /// with `top` out (index 0) and in (index 1).
    fn subtree_pair(
        &self,
        top: usize,
        skip: Option<usize>,
        s: usize,
        forced_out: &[bool],
    ) -> [SizeSet; 2] {
        struct Frame {
            node: usize,
            next_child: usize,
            pair: [SizeSet; 2],
        }
        let n = self.inst.n();
        let new_frame = |node: usize| Frame {
            node,
            next_child: 0,
            pair: [
                SizeSet::singleton(n, 0),
                if self.willing(node, s) && !forced_out[node] {
                    SizeSet::singleton(n, 1)
                } else {
                    SizeSet::empty(n)
                },
            ],
        };

        let mut stack = vec![new_frame(top)];
        loop {
            let frame = stack.last_mut().expect("loop exits on empty stack");
            match self.children[frame.node].get(frame.next_child) {
                Some(&c) if frame.node == top && Some(c) == skip => {
                    frame.next_child += 1;
                }
                Some(&c) => {
                    frame.next_child += 1;
                    stack.push(new_frame(c));
                }
                None => {
                    let done = stack.pop().unwrap();
                    match stack.last_mut() {
                        None => return done.pair,
                        Some(up) => {
                            for parent_in in [false, true] {
                                let opts =
                                    self.child_options(done.node, &done.pair, parent_in, s);
                                up.pair[parent_in as usize] =
                                    up.pair[parent_in as usize].sumset(&opts);
                            }
                        }
                    }
                }
            }
        }
    }

    /// Count-set of a tree component: both root states, with the root's
    /// out-state admissible only if nobody-blocks holds for it.
    fn tree_set(&self, root: usize, s: usize, forced_out: &[bool]) -> SizeSet {
        let pair = self.subtree_pair(root, None, s, forced_out);
        let mut set = pair[1].clone();
        if !self.require_ef || !self.willing(root, s + 1) {
            set.or_assign(&pair[0]);
        }
        set
    }

    /// Count-set of a cyclic component: fix the first cycle node's state,
    /// run a path DP along the cycle, and close it with the wrap-around
    /// edge.
    fn cycle_set(&self, cycle: &[usize], s: usize, forced_out: &[bool]) -> SizeSet {
        let n = self.inst.n();
        let m = cycle.len();
        let locals: Vec<[SizeSet; 2]> = (0..m)
            .map(|j| self.subtree_pair(cycle[j], Some(cycle[(j + m - 1) % m]), s, forced_out))
            .collect();

        let mut result = SizeSet::empty(n);
        for first_in in [false, true] {
            if locals[0][first_in as usize].is_empty() {
                continue;
            }
            let mut cur = [SizeSet::empty(n), SizeSet::empty(n)];
            cur[first_in as usize] = locals[0][first_in as usize].clone();
            for j in 1..m {
                let mut next = [SizeSet::empty(n), SizeSet::empty(n)];
                for parent_in in [false, true] {
                    if locals[j][parent_in as usize].is_empty() {
                        continue;
                    }
                    let mut feed = SizeSet::empty(n);
                    for child_in in [false, true] {
                        if !cur[child_in as usize].is_empty()
                            && self.edge_allows(cycle[j - 1], child_in, parent_in, s)
                        {
                            feed.or_assign(&cur[child_in as usize]);
                        }
                    }
                    if !feed.is_empty() {
                        next[parent_in as usize] = feed.sumset(&locals[j][parent_in as usize]);
                    }
                }
                cur = next;
            }
            for last_in in [false, true] {
                if !cur[last_in as usize].is_empty()
                    && self.edge_allows(cycle[m - 1], last_in, first_in, s)
                {
                    result.or_assign(&cur[last_in as usize]);
                }
            }
        }
        result
    }

    /// All achievable member counts at target size `s` under the forcing.
    fn feasible_set(&self, s: usize, forced_out: &[bool]) -> SizeSet {
        let n = self.inst.n();
        let mut total = SizeSet::singleton(n, 0);
        for &root in &self.roots {
            let set = self.tree_set(root, s, forced_out);
            if set.is_empty() {
                return set;
            }
            total = total.sumset(&set);
        }
        for cycle in &self.cycles {
            let set = self.cycle_set(cycle, s, forced_out);
            if set.is_empty() {
                return set;
            }
            total = total.sumset(&set);
        }
        total
    }

    fn feasible(&self, s: usize, forced_out: &[bool]) -> bool {
        self.feasible_set(s, forced_out).contains(s)
    }

    /// Largest invitation with size in `lo..=n`, minimal in bitmask
    /// encoding, or `None` if the range holds nothing admissible.
    pub(crate) fn best_in_range(&self, lo: usize, stats: &mut SearchStats) -> Option<Invitation> {
        let n = self.inst.n();
        let relaxed = vec![false; n];
        for s in (lo.max(1)..=n).rev() {
            stats.sizes_attempted.push(s);
            stats.nodes += 1;
            if self.feasible(s, &relaxed) {
                return Some(self.extract(s, stats));
            }
        }
        if lo == 0 {
            stats.sizes_attempted.push(0);
            stats.nodes += 1;
            if !self.require_ef || is_stable(self.inst, &Invitation::empty()) {
                return Some(Invitation::empty());
            }
        }
        None
    }

    /// Pins down the minimal witness of size `s` by forcing agents out,
    /// highest index first, whenever feasibility survives.
    fn extract(&self, s: usize, stats: &mut SearchStats) -> Invitation {
        let n = self.inst.n();
        let mut forced = vec![false; n];
        for v in (0..n).rev() {
            forced[v] = true;
            stats.nodes += 1;
            if !self.feasible(s, &forced) {
                forced[v] = false;
            }
        }
        let members: Vec<usize> = (0..n).filter(|&v| !forced[v]).collect();
        debug_assert_eq!(members.len(), s);
        Invitation::from_sorted(members)
    }
}

// ---------------------------------------------------------------------------
// tests
// ---------------------------------------------------------------------------
