//! Solvers for instances with acceptance and rejection constraints.
//!
//! [`solve_gsip`] inspects the constraint structure and dispatches to the
//! cheapest applicable backend:
//!
//! 1. no constraints at all — the anonymous size sweep ([`crate::solve_asip`]);
//! 2. no rejections and every agent willing at every size — invite everyone;
//! 3. no rejections, at most one friend each — pseudoforest DP;
//! 4. no friends, at most one foe each — pseudoforest DP;
//! 5. anything else — exhaustive search with propagation, which is capped
//!    by [`Limits::exact_search_max_agents`] because the unrestricted
//!    problem blows up combinatorially.
//!
//! All backends agree on the canonical answer: among maximum stable
//! invitations, the one whose member bitmask encodes the smallest integer
//! (ties inside the anonymous sweep are documented at [`crate::solve_asip`]
//! and differ — that path drops low-index agents instead).

mod exact;
mod graph;

use thiserror::Error;

use crate::asip::solve_asip;
use crate::instance::{GsipInstance, Invitation, SearchStats, SolveResult, SolverPath, Verdict};
use crate::limits::Limits;
use crate::stability::MaskView;
use graph::{ConstraintMode, PseudoforestSolver};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GsipError {
    #[error(
        "{n} agents with this constraint structure exceeds the exhaustive-search \
         budget of {cap}; raise `Limits::exact_search_max_agents` (hard cap 64) \
         or simplify the accept/reject lists"
    )]
    TooManyAgents { n: usize, cap: usize },
}

/// Finds a maximum stable invitation, or reports that none exists (the
/// empty invitation included: when even it is blocked, the verdict is
/// [`Verdict::NoStable`]).
pub fn solve_gsip(inst: &GsipInstance, limits: &Limits) -> Result<SolveResult, GsipError> {
    let (found, stats) = best_in_range(inst, 0, true, limits)?;
    let verdict = match found {
        Some(inv) => Verdict::Stable(inv),
        None => Verdict::NoStable,
    };
    Ok(SolveResult { verdict, stats })
}

/// Decides whether some stable invitation has at least `k` members,
/// returning a witness. `k = 0` asks whether any stable invitation exists.
pub fn decide_stable_at_least_k(
    inst: &GsipInstance,
    k: usize,
    limits: &Limits,
) -> Result<Option<Invitation>, GsipError> {
    Ok(best_in_range(inst, k, true, limits)?.0)
}

/// Finds a maximum invitation that is individually rational, ignoring envy.
/// This never fails to find one — the empty invitation is always
/// individually rational — so the verdict is always `Stable`, carrying a
/// set that need not be envy-free.
pub fn solve_max_individually_rational(
    inst: &GsipInstance,
    limits: &Limits,
) -> Result<SolveResult, GsipError> {
    let (found, stats) = best_in_range(inst, 0, false, limits)?;
    Ok(SolveResult {
        verdict: Verdict::Stable(found.expect("the empty invitation is individually rational")),
        stats,
    })
}

/// Best admissible invitation with size in `lo..=n`, dispatched by
/// constraint structure.
fn best_in_range(
    inst: &GsipInstance,
    lo: usize,
    require_ef: bool,
    limits: &Limits,
) -> Result<(Option<Invitation>, SearchStats), GsipError> {
    let n = inst.n();
    let alpha = inst.alpha();
    let beta = inst.beta();

    if alpha == 0 && beta == 0 {
        if require_ef {
            let result = solve_asip(inst).expect("instance without constraints is anonymous");
            let found = match result.verdict {
                Verdict::Stable(inv) if inv.size() >= lo => Some(inv),
                _ => None,
            };
            return Ok((found, result.stats));
        }
        return Ok(anonymous_max_ir(inst, lo));
    }

    if beta == 0 && inst.all_simple() {
        let mut stats = SearchStats::new(SolverPath::FullInvitation);
        stats.nodes = 1;
        stats.sizes_attempted.push(n);
        return Ok(((n >= lo).then(|| Invitation::full(n)), stats));
    }

    if beta == 0 && alpha <= 1 {
        let mut stats = SearchStats::new(SolverPath::AcceptanceGraph);
        let solver = PseudoforestSolver::new(inst, ConstraintMode::Accept, require_ef);
        return Ok((solver.best_in_range(lo, &mut stats), stats));
    }

    if alpha == 0 && beta <= 1 {
        let mut stats = SearchStats::new(SolverPath::RejectionGraph);
        let solver = PseudoforestSolver::new(inst, ConstraintMode::Reject, require_ef);
        return Ok((solver.best_in_range(lo, &mut stats), stats));
    }

    let cap = limits.exact_search_max_agents.min(64);
    if n > cap {
        return Err(GsipError::TooManyAgents { n, cap });
    }
    let path = if require_ef {
        SolverPath::ExactSearch
    } else {
        SolverPath::IrSearch
    };
    let mut stats = SearchStats::new(path);
    let view = MaskView::new(inst).expect("agent count capped at 64");
    for s in (lo..=n).rev() {
        stats.sizes_attempted.push(s);
        if let Some(mask) = exact::find_at_size(&view, s, require_ef, &mut stats.nodes) {
            return Ok((Some(Invitation::from_mask(mask)), stats));
        }
    }
    Ok((None, stats))
}

/// Without constraints, a set is individually rational iff all members
/// accept its size, so the maximum is the largest `s` with `s` willing
/// agents; the lowest-indexed willing agents form the canonical witness.
fn anonymous_max_ir(inst: &GsipInstance, lo: usize) -> (Option<Invitation>, SearchStats) {
    let n = inst.n();
    let mut stats = SearchStats::new(SolverPath::IrSearch);
    for s in (lo.max(1)..=n).rev() {
        stats.sizes_attempted.push(s);
        stats.nodes += 1;
        let mut members = Vec::with_capacity(s);
        for i in 0..n {
            if inst.preference(i).accepts(s) {
                members.push(i);
                if members.len() == s {
                    break;
                }
            }
        }
        if members.len() == s {
            return (Some(Invitation::from_sorted(members)), stats);
        }
    }
    if lo == 0 {
        stats.sizes_attempted.push(0);
        (Some(Invitation::empty()), stats)
    } else {
        (None, stats)
    }
}

// ---------------------------------------------------------------------------
// tests
// ---------------------------------------------------------------------------
