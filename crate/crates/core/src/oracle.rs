//! Ground truth by exhaustive enumeration.
//!
//! Every solver in this crate is cross-checked against these routines in
//! tests, so they stay deliberately naive: enumerate all `2^n` subsets and
//! apply the definition of stability to each.

use thiserror::Error;

use crate::instance::{
    GsipInstance, Invitation, SearchStats, SolveResult, SolverPath, Verdict,
};
use crate::stability::MaskView;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum OracleError {
    #[error("instance has {n} agents, above the enumeration cap of {cap}")]
    TooManyAgents { n: usize, cap: usize },
}

fn view(inst: &GsipInstance, cap: usize) -> Result<MaskView, OracleError> {
    let n = inst.n();
    let cap = cap.min(64);
    if n > cap {
        return Err(OracleError::TooManyAgents { n, cap });
    }
    Ok(MaskView::new(inst).expect("instance within the enumeration cap"))
}

/// All stable invitations, in increasing member-bitset order (agent 0 is the
/// least significant bit).
pub fn enumerate_stable(inst: &GsipInstance, cap: usize) -> Result<Vec<Invitation>, OracleError> {
    let view = view(inst, cap)?;
    let mut out = vec![];
    for mask in 0..=view.all {
        if view.is_stable_mask(mask) {
            out.push(Invitation::from_mask(mask));
        }
    }
    Ok(out)
}

/// A maximum stable invitation, found exhaustively. Among equal-size stable
/// invitations the smallest member bitset wins.
pub fn oracle_max_stable(inst: &GsipInstance, cap: usize) -> Result<SolveResult, OracleError> {
    let view = view(inst, cap)?;
    let mut best: Option<u64> = None;
    let mut nodes = 0u64;
    for mask in 0..=view.all {
        nodes += 1;
        if view.is_stable_mask(mask)
            && best.is_none_or(|b| mask.count_ones() > b.count_ones())
        {
            best = Some(mask);
        }
    }
    let verdict = match best {
        Some(mask) => Verdict::Stable(Invitation::from_mask(mask)),
        None => Verdict::NoStable,
    };
    Ok(SolveResult {
        verdict,
        stats: SearchStats {
            path: SolverPath::Oracle,
            nodes,
            sizes_attempted: vec![],
        },
    })
}

// ---------------------------------------------------------------------------
// tests
// ---------------------------------------------------------------------------
