//! Incentive analysis: mechanism tables, strategy-proofness checks,
//! manipulation search against the bundled solvers, and machine-checked
//! verification that small mechanism spaces contain no strategy-proof
//! stable-finding rule.
//!
//! A *mechanism table* lists, for every combination of agent actions
//! (reported preferences and/or reported accept/reject declarations), the
//! invitation the mechanism would issue. Agents value an outcome purely by
//! their reported-type's preference over sizes — an invitation they are on
//! counts as its size, any other invitation counts as the outside option —
//! so declarations shape feasibility but never the valuation itself.

use thiserror::Error;

use crate::asip::{solve_asip, AsipError};
use crate::gsip::{solve_gsip, GsipError};
use crate::instance::{GsipInstance, Invitation, Verdict};
use crate::limits::Limits;
use crate::mechanism::{run_inc_mechanism, MechanismError, ThresholdProfile};
use crate::oracle::enumerate_stable;
use crate::prefs::PreferenceOrder;
use crate::stability::{compare_with_preference, is_stable, Comparison, MaskView};

/// One entry of an agent's action space: a preference to report, optionally
/// with accept/reject declarations.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AgentAction {
    pref: PreferenceOrder,
    accept: Vec<usize>,
    reject: Vec<usize>,
}

impl AgentAction {
    pub fn preference(pref: PreferenceOrder) -> Self {
        AgentAction {
            pref,
            accept: Vec::new(),
            reject: Vec::new(),
        }
    }

    pub fn declaration(
        pref: PreferenceOrder,
        mut accept: Vec<usize>,
        mut reject: Vec<usize>,
    ) -> Self {
        accept.sort_unstable();
        accept.dedup();
        reject.sort_unstable();
        reject.dedup();
        AgentAction {
            pref,
            accept,
            reject,
        }
    }

    pub fn pref(&self) -> &PreferenceOrder {
        &self.pref
    }

    pub fn accept(&self) -> &[usize] {
        &self.accept
    }

    pub fn reject(&self) -> &[usize] {
        &self.reject
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TableError {
    #[error("agent {agent} has an empty action space")]
    EmptyActionSpace { agent: usize },
    #[error("agent {agent}, action {action}: preference covers {got} agents, table has {expected}")]
    PreferenceSize {
        agent: usize,
        action: usize,
        expected: usize,
        got: usize,
    },
    #[error("agent {agent}, action {action}: declaration references {referenced}")]
    InvalidReference {
        agent: usize,
        action: usize,
        referenced: usize,
    },
    #[error("expected one outcome per action profile ({expected}), got {got}")]
    WrongOutcomeCount { expected: usize, got: usize },
    #[error("outcome {index} invites agent {member}, beyond the {n} agents")]
    OutcomeOutOfRange {
        index: usize,
        member: usize,
        n: usize,
    },
}

fn validate_action_spaces(n: usize, actions: &[Vec<AgentAction>]) -> Result<(), TableError> {
    for (agent, space) in actions.iter().enumerate() {
        if space.is_empty() {
            return Err(TableError::EmptyActionSpace { agent });
        }
        for (action, a) in space.iter().enumerate() {
            if a.pref.n() != n {
                return Err(TableError::PreferenceSize {
                    agent,
                    action,
                    expected: n,
                    got: a.pref.n(),
                });
            }
            for &r in a.accept.iter().chain(&a.reject) {
                if r >= n || r == agent {
                    return Err(TableError::InvalidReference {
                        agent,
                        action,
                        referenced: r,
                    });
                }
            }
        }
    }
    Ok(())
}

/// An explicit mechanism over finite action spaces: one outcome per action
/// profile, stored densely with agent 0 as the most significant digit.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MechanismTable {
    n: usize,
    actions: Vec<Vec<AgentAction>>,
    outcomes: Vec<Invitation>,
}

impl MechanismTable {
    pub fn new(
        n: usize,
        actions: Vec<Vec<AgentAction>>,
        outcomes: Vec<Invitation>,
    ) -> Result<Self, TableError> {
        assert_eq!(actions.len(), n, "one action space per agent");
        validate_action_spaces(n, &actions)?;
        let expected = actions.iter().map(Vec::len).product();
        if outcomes.len() != expected {
            return Err(TableError::WrongOutcomeCount {
                expected,
                got: outcomes.len(),
            });
        }
        for (index, inv) in outcomes.iter().enumerate() {
            if let Some(&member) = inv.members().last() {
                if member >= n {
                    return Err(TableError::OutcomeOutOfRange { index, member, n });
                }
            }
        }
        Ok(MechanismTable {
            n,
            actions,
            outcomes,
        })
    }

    /// Builds the table by asking `f` for the outcome of every profile, in
    /// dense profile order.
    pub fn tabulate(
        n: usize,
        actions: Vec<Vec<AgentAction>>,
        mut f: impl FnMut(&GsipInstance) -> Invitation,
    ) -> Result<Self, TableError> {
        validate_action_spaces(n, &actions)?;
        let total: usize = actions.iter().map(Vec::len).product();
        let mut outcomes = Vec::with_capacity(total);
        let probe = MechanismTable {
            n,
            actions,
            outcomes: Vec::new(),
        };
        for idx in 0..total {
            let profile = probe.decode(idx);
            outcomes.push(f(&probe.induced_instance(&profile)));
        }
        MechanismTable::new(n, probe.actions, outcomes)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn actions(&self) -> &[Vec<AgentAction>] {
        &self.actions
    }

    pub fn profile_count(&self) -> usize {
        self.actions.iter().map(Vec::len).product()
    }

    fn encode(&self, profile: &[usize]) -> usize {
        profile
            .iter()
            .zip(&self.actions)
            .fold(0, |idx, (&p, space)| idx * space.len() + p)
    }

    fn decode(&self, mut idx: usize) -> Vec<usize> {
        let mut profile = vec![0; self.n];
        for i in (0..self.n).rev() {
            let r = self.actions[i].len();
            profile[i] = idx % r;
            idx /= r;
        }
        profile
    }

    pub fn outcome(&self, profile: &[usize]) -> &Invitation {
        &self.outcomes[self.encode(profile)]
    }

    /// The instance agents describe when playing `profile`.
    pub fn induced_instance(&self, profile: &[usize]) -> GsipInstance {
        let chosen: Vec<&AgentAction> = profile
            .iter()
            .zip(&self.actions)
            .map(|(&p, space)| &space[p])
            .collect();
        GsipInstance::new(
            chosen.iter().map(|a| a.pref.clone()).collect(),
            chosen.iter().map(|a| a.accept.clone()).collect(),
            chosen.iter().map(|a| a.reject.clone()).collect(),
        )
        .expect("action spaces are validated at construction")
    }
}

/// A profitable deviation: with everyone else fixed, `agent` whose type is
/// action `truth` strictly gains by playing `misreport`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SpViolation {
    pub agent: usize,
    pub truth: usize,
    pub misreport: usize,
    /// The truthful profile exhibiting the gain (entry `agent` is `truth`).
    pub profile: Vec<usize>,
}

/// Searches for a profitable deviation, scanning agents, then the agent's
/// true action, then the other agents' profiles, then misreports — all in
/// ascending order — so the witness is deterministic. `None` means the
/// table is strategy-proof over its action space.
pub fn check_strategy_proof(table: &MechanismTable) -> Option<SpViolation> {
    let total = table.profile_count();
    for agent in 0..table.n {
        let space = table.actions[agent].len();
        for truth in 0..space {
            for idx in 0..total {
                let profile = table.decode(idx);
                if profile[agent] != truth {
                    continue;
                }
                let honest = &table.outcomes[idx];
                let pref = &table.actions[agent][truth].pref;
                for misreport in 0..space {
                    if misreport == truth {
                        continue;
                    }
                    let mut deviated = profile.clone();
                    deviated[agent] = misreport;
                    let shifted = &table.outcomes[table.encode(&deviated)];
                    if compare_with_preference(pref, agent, shifted, honest)
                        == Comparison::PrefersFirst
                    {
                        return Some(SpViolation {
                            agent,
                            truth,
                            misreport,
                            profile,
                        });
                    }
                }
            }
        }
    }
    None
}

/// A profile where the induced instance admits a stable invitation but the
/// table answers with something unstable.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StabilityFailure {
    pub profile: Vec<usize>,
    pub outcome: Invitation,
    pub witness: Invitation,
}

/// Checks that the table outputs a stable invitation whenever the profile's
/// induced instance has one. Profiles are scanned in dense order, so the
/// returned failure is deterministic.
pub fn check_finds_stable(table: &MechanismTable) -> Option<StabilityFailure> {
    for idx in 0..table.profile_count() {
        let profile = table.decode(idx);
        let inst = table.induced_instance(&profile);
        let outcome = &table.outcomes[idx];
        if is_stable(&inst, outcome) {
            continue;
        }
        let stable = enumerate_stable(&inst, 20).expect("tables keep agent counts tiny");
        if let Some(witness) = stable.into_iter().next() {
            return Some(StabilityFailure {
                profile,
                outcome: outcome.clone(),
                witness,
            });
        }
    }
    None
}

// ---------------------------------------------------------------------------
// exhaustive mechanism-space audits
// ---------------------------------------------------------------------------

/// Tally from enumerating every outcome table over an action space.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct VerificationReport {
    pub tables_enumerated: u64,
    pub strategy_proof_tables: u64,
    pub stable_finding_tables: u64,
    /// Tables that are both; zero machine-checks an impossibility claim.
    pub intersection: u64,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum AuditError {
    #[error(
        "enumerating {profiles} profiles x {n} agents needs {bits} table bits; \
         the audit packs tables into u64 and caps the space at {cap} bits"
    )]
    SpaceTooLarge {
        profiles: u64,
        n: usize,
        bits: u64,
        cap: u64,
    },
    #[error(transparent)]
    Table(#[from] TableError),
}

const AUDIT_BIT_CAP: u64 = 26;

/// Enumerates every possible outcome table over the given action spaces and
/// counts how many are strategy-proof, how many always output a stable
/// invitation when one exists, and how many do both.
///
/// Tables are packed into integers — `n` bits per profile outcome — so the
/// space must satisfy `profiles * n <= 26` (at most ~67M tables).
pub fn audit_mechanism_space(
    n: usize,
    actions: &[Vec<AgentAction>],
) -> Result<VerificationReport, AuditError> {
    assert_eq!(actions.len(), n, "one action space per agent");
    validate_action_spaces(n, actions)?;
    let profiles: u64 = actions.iter().map(|s| s.len() as u64).product();
    let bits = profiles * n as u64;
    if bits > AUDIT_BIT_CAP {
        return Err(AuditError::SpaceTooLarge {
            profiles,
            n,
            bits,
            cap: AUDIT_BIT_CAP,
        });
    }
    let p = profiles as usize;
    let outcome_count = 1usize << n;
    let outcome_bits = n as u32;
    let outcome_mod = (outcome_count - 1) as u64;

    // Reuse the table plumbing for profile decoding and induced instances.
    let skeleton = MechanismTable {
        n,
        actions: actions.to_vec(),
        outcomes: Vec::new(),
    };

    // Per profile: which outcome masks are stable, and whether any is.
    let mut stable_sets = vec![0u32; p];
    for (q, set) in stable_sets.iter_mut().enumerate() {
        let inst = skeleton.induced_instance(&skeleton.decode(q));
        let view = MaskView::new(&inst).expect("audit caps n at a handful");
        for m in 0..outcome_count as u64 {
            if view.is_stable_mask(m) {
                *set |= 1 << m;
            }
        }
    }

    // Valuation of each outcome mask under each action's preference.
    let ranks: Vec<Vec<Vec<u32>>> = (0..n)
        .map(|i| {
            actions[i]
                .iter()
                .map(|a| {
                    (0..outcome_count as u64)
                        .map(|m| {
                            let size = m.count_ones() as usize;
                            if m >> i & 1 == 1 {
                                a.pref().rank(size)
                            } else {
                                a.pref().rank(0)
                            }
                        })
                        .collect()
                })
                .collect()
        })
        .collect();

    // Unilateral deviations: (truthful profile, agent, truth, deviated profile).
    let mut deviations: Vec<(usize, usize, usize, usize)> = Vec::new();
    for q in 0..p {
        let profile = skeleton.decode(q);
        for agent in 0..n {
            let truth = profile[agent];
            for misreport in 0..actions[agent].len() {
                if misreport != truth {
                    let mut deviated = profile.clone();
                    deviated[agent] = misreport;
                    deviations.push((q, agent, truth, skeleton.encode(&deviated)));
                }
            }
        }
    }

    let mut report = VerificationReport {
        tables_enumerated: 1u64 << bits,
        strategy_proof_tables: 0,
        stable_finding_tables: 0,
        intersection: 0,
    };
    let mut outcome_of = vec![0u64; p];
    for table in 0..1u64 << bits {
        for (q, slot) in outcome_of.iter_mut().enumerate() {
            *slot = table >> (q as u32 * outcome_bits) & outcome_mod;
        }
        let stable_finding = (0..p).all(|q| {
            let set = stable_sets[q];
            set == 0 || set >> outcome_of[q] & 1 == 1
        });
        let strategy_proof = deviations.iter().all(|&(q, agent, truth, q_dev)| {
            let val = &ranks[agent][truth];
            val[outcome_of[q_dev] as usize] >= val[outcome_of[q] as usize]
        });
        report.strategy_proof_tables += strategy_proof as u64;
        report.stable_finding_tables += stable_finding as u64;
        report.intersection += (strategy_proof && stable_finding) as u64;
    }
    Ok(report)
}

/// Mechanism spaces whose audit establishes an impossibility: over the
/// case's action space, no outcome table is simultaneously strategy-proof
/// and stable-finding.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ImpossibilityCase {
    /// Two agents reporting one of three decreasing preferences over sizes:
    /// solo best and a pair unacceptable, solo then pair, or solo and pair
    /// tied. Covers mechanisms that elicit anonymous size preferences.
    AnonymousDecPair,
    /// Two agents with fixed "any size beats staying home" preferences,
    /// each choosing whether to declare the other unacceptable. Covers
    /// mechanisms that elicit rejection lists.
    SimpleRejectionPair,
}

impl ImpossibilityCase {
    pub fn agent_count(&self) -> usize {
        2
    }

    /// The action space the audit enumerates tables over.
    pub fn action_space(&self) -> Vec<Vec<AgentAction>> {
        match self {
            ImpossibilityCase::AnonymousDecPair => {
                let prefs = [
                    PreferenceOrder::from_groups(&[&[1], &[0], &[2]]).unwrap(),
                    PreferenceOrder::from_groups(&[&[1], &[2], &[0]]).unwrap(),
                    PreferenceOrder::from_groups(&[&[1, 2], &[0]]).unwrap(),
                ];
                let space: Vec<AgentAction> = prefs
                    .into_iter()
                    .map(AgentAction::preference)
                    .collect();
                vec![space.clone(), space]
            }
            ImpossibilityCase::SimpleRejectionPair => {
                let simple = PreferenceOrder::simple_uniform(2);
                (0..2)
                    .map(|agent| {
                        vec![
                            AgentAction::declaration(simple.clone(), vec![], vec![]),
                            AgentAction::declaration(simple.clone(), vec![], vec![1 - agent]),
                        ]
                    })
                    .collect()
            }
        }
    }
}

/// Runs the audit for a bundled impossibility case. The claim it verifies:
/// `intersection == 0`, i.e. no mechanism over the case's action space is
/// both strategy-proof and stable-finding.
pub fn verify_no_sp_stable_mechanism(case: ImpossibilityCase) -> VerificationReport {
    audit_mechanism_space(case.agent_count(), &case.action_space())
        .expect("bundled cases fit the audit budget")
}

// ---------------------------------------------------------------------------
// manipulation search against the bundled solvers
// ---------------------------------------------------------------------------

/// The solver-backed direct mechanisms a manipulation search can probe.
/// Whenever a solver reports that nothing is stable, the mechanism's
/// outcome is the empty invitation.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SolverMechanism {
    /// Maximum stable invitation of an anonymous instance.
    AsipSolver,
    /// The threshold mechanism; reports must classify as increasing.
    IncMechanism,
    /// Maximum stable invitation of a constrained instance.
    GsipSolver,
}

impl SolverMechanism {
    pub fn outcome(
        &self,
        inst: &GsipInstance,
        limits: &Limits,
    ) -> Result<Invitation, ManipulationError> {
        let verdict = match self {
            SolverMechanism::AsipSolver => solve_asip(inst)?.verdict,
            SolverMechanism::IncMechanism => {
                return Ok(run_inc_mechanism(&ThresholdProfile::from_instance(inst)?));
            }
            SolverMechanism::GsipSolver => solve_gsip(inst, limits)?.verdict,
        };
        Ok(match verdict {
            Verdict::Stable(inv) => inv,
            Verdict::NoStable => Invitation::empty(),
        })
    }
}

/// What part of an agent's report the search varies.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ManipulationMode {
    /// Every acceptability set over sizes (every threshold for the
    /// threshold mechanism). Complete for the bundled solvers, whose
    /// outcomes depend on preferences only through acceptability.
    BruteForce,
    /// Acceptability intervals `l..=h` plus the empty report.
    IntervalReports,
    /// Accept/reject declarations within the instance's current bounds,
    /// leaving the preference truthful.
    FrSets,
}

/// The reported lie, in the same shape the agent would submit it.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Misreport {
    Preference(PreferenceOrder),
    Declaration {
        accept: Vec<usize>,
        reject: Vec<usize>,
    },
}

/// A profitable lie: under `misreport` the mechanism picks `outcome`,
/// which the agent's true preference strictly prefers to
/// `truthful_outcome`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Manipulation {
    pub agent: usize,
    pub truthful_outcome: Invitation,
    pub misreport: Misreport,
    pub outcome: Invitation,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ManipulationError {
    #[error("brute-force report search over {n} agents exceeds the cap of {cap}")]
    TooManyAgents { n: usize, cap: usize },
    #[error("declaration search would enumerate {count} reports, over the cap of {cap}")]
    TooManyReports { count: u128, cap: u64 },
    #[error(transparent)]
    Asip(#[from] AsipError),
    #[error(transparent)]
    Mechanism(#[from] MechanismError),
    #[error(transparent)]
    Gsip(#[from] GsipError),
}

/// Searches for a single-agent misreport that strictly improves the
/// mechanism's outcome for that agent, judged by their true preference.
/// Scans agents in ascending index order (or just `agent`), and reports in
/// the mode's documented order; the first improvement wins. `Ok(None)`
/// means no tested report helps anyone.
pub fn find_manipulation(
    inst: &GsipInstance,
    mechanism: SolverMechanism,
    mode: ManipulationMode,
    agent: Option<usize>,
    limits: &Limits,
) -> Result<Option<Manipulation>, ManipulationError> {
    let truthful = mechanism.outcome(inst, limits)?;
    let agents: Vec<usize> = match agent {
        Some(a) => {
            assert!(a < inst.n(), "agent index out of range");
            vec![a]
        }
        None => (0..inst.n()).collect(),
    };

    for agent in agents {
        let improves = |outcome: &Invitation| {
            compare_with_preference(inst.preference(agent), agent, outcome, &truthful)
                == Comparison::PrefersFirst
        };
        match mode {
            ManipulationMode::BruteForce | ManipulationMode::IntervalReports => {
                for pref in preference_reports(inst.n(), mechanism, mode, limits)? {
                    let outcome =
                        mechanism.outcome(&inst.with_preference(agent, pref.clone()), limits)?;
                    if improves(&outcome) {
                        return Ok(Some(Manipulation {
                            agent,
                            truthful_outcome: truthful,
                            misreport: Misreport::Preference(pref),
                            outcome,
                        }));
                    }
                }
            }
            ManipulationMode::FrSets => {
                let others: Vec<usize> = (0..inst.n()).filter(|&j| j != agent).collect();
                let accepts = bounded_subsets(&others, inst.alpha(), limits)?;
                let rejects = bounded_subsets(&others, inst.beta(), limits)?;
                let count = accepts.len() as u128 * rejects.len() as u128;
                if count > limits.declaration_reports_max as u128 {
                    return Err(ManipulationError::TooManyReports {
                        count,
                        cap: limits.declaration_reports_max,
                    });
                }
                for accept in &accepts {
                    for reject in &rejects {
                        let alt = inst
                            .with_declaration(agent, accept.clone(), reject.clone())
                            .expect("reports reference valid agents");
                        let outcome = mechanism.outcome(&alt, limits)?;
                        if improves(&outcome) {
                            return Ok(Some(Manipulation {
                                agent,
                                truthful_outcome: truthful,
                                misreport: Misreport::Declaration {
                                    accept: accept.clone(),
                                    reject: reject.clone(),
                                },
                                outcome,
                            }));
                        }
                    }
                }
            }
        }
    }
    Ok(None)
}

/// A preference accepting exactly the sizes `accepts` allows, flat within
/// each class: acceptable sizes tie just above the outside option, the
/// rest just below.
fn flat_acceptance(n: usize, accepts: impl Fn(usize) -> bool) -> PreferenceOrder {
    let ranks = std::iter::once(1)
        .chain((1..=n).map(|x| if accepts(x) { 0 } else { 2 }))
        .collect();
    PreferenceOrder::from_ranks(ranks).expect("flat ranks never tie with the outside option")
}

/// The preference reports a mode explores, in the order they are tried.
fn preference_reports(
    n: usize,
    mechanism: SolverMechanism,
    mode: ManipulationMode,
    limits: &Limits,
) -> Result<Vec<PreferenceOrder>, ManipulationError> {
    if mechanism == SolverMechanism::IncMechanism {
        // Thresholds are the whole report space, `n + 1` meaning "never".
        return Ok((1..=n + 1)
            .map(|l| PreferenceOrder::increasing(n, l).expect("thresholds are in range"))
            .collect());
    }
    match mode {
        ManipulationMode::BruteForce => {
            if n > limits.brute_force_max_agents {
                return Err(ManipulationError::TooManyAgents {
                    n,
                    cap: limits.brute_force_max_agents,
                });
            }
            Ok((0..1u64 << n)
                .map(|mask| flat_acceptance(n, |x| mask >> (x - 1) & 1 == 1))
                .collect())
        }
        ManipulationMode::IntervalReports => {
            let mut reports: Vec<PreferenceOrder> = (1..=n)
                .flat_map(|l| (l..=n).map(move |h| (l, h)))
                .map(|(l, h)| flat_acceptance(n, |x| l <= x && x <= h))
                .collect();
            reports.push(flat_acceptance(n, |_| false));
            Ok(reports)
        }
        ManipulationMode::FrSets => unreachable!("declaration search does not vary preferences"),
    }
}

/// All subsets of `elems` with at most `bound` members, ascending in
/// bitmask encoding; errors out instead of materializing a huge family.
fn bounded_subsets(
    elems: &[usize],
    bound: usize,
    limits: &Limits,
) -> Result<Vec<Vec<usize>>, ManipulationError> {
    let bound = bound.min(elems.len());
    let mut count: u128 = 0;
    for size in 0..=bound {
        count = count.saturating_add(binomial(elems.len(), size));
        if count > limits.declaration_reports_max as u128 {
            return Err(ManipulationError::TooManyReports {
                count,
                cap: limits.declaration_reports_max,
            });
        }
    }
    let mut out = Vec::with_capacity(count as usize);
    let mut scratch = Vec::with_capacity(bound);
    for size in 0..=bound {
        push_combinations(elems, size, 0, &mut scratch, &mut out);
    }
    out.sort_by(|a, b| mask_order(a, b));
    Ok(out)
}

fn push_combinations(
    elems: &[usize],
    size: usize,
    start: usize,
    cur: &mut Vec<usize>,
    out: &mut Vec<Vec<usize>>,
) {
    if cur.len() == size {
        out.push(cur.clone());
        return;
    }
    for i in start..elems.len() {
        if elems.len() - i < size - cur.len() {
            break;
        }
        cur.push(elems[i]);
        push_combinations(elems, size, i + 1, cur, out);
        cur.pop();
    }
}

fn binomial(n: usize, k: usize) -> u128 {
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        acc = acc.saturating_mul((n - i) as u128) / (i + 1) as u128;
    }
    acc
}

/// Orders sorted index lists by their bitmask encoding: compare the largest
/// members first; a shared prefix from the top makes the longer list
/// larger.
fn mask_order(a: &[usize], b: &[usize]) -> std::cmp::Ordering {
    let mut x = a.iter().rev();
    let mut y = b.iter().rev();
    loop {
        match (x.next(), y.next()) {
            (None, None) => return std::cmp::Ordering::Equal,
            (None, Some(_)) => return std::cmp::Ordering::Less,
            (Some(_), None) => return std::cmp::Ordering::Greater,
            (Some(p), Some(q)) => match p.cmp(q) {
                std::cmp::Ordering::Equal => continue,
                other => return other,
            },
        }
    }
}

// ---------------------------------------------------------------------------
// tests
// ---------------------------------------------------------------------------

#[cfg(test)]
mod tests {
    use super::*;
    use crate::oracle::oracle_max_stable;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn groups(gs: &[&[usize]]) -> PreferenceOrder {
        PreferenceOrder::from_groups(gs).unwrap()
    }

    fn dec_pair_actions() -> Vec<Vec<AgentAction>> {
        ImpossibilityCase::AnonymousDecPair.action_space()
    }

    #[test]
    fn profiles_encode_with_agent_zero_most_significant() {
        let table = MechanismTable::tabulate(2, dec_pair_actions(), |_| Invitation::empty())
            .unwrap();
        assert_eq!(table.profile_count(), 9);
        assert_eq!(table.decode(0), vec![0, 0]);
        assert_eq!(table.decode(1), vec![0, 1]);
        assert_eq!(table.decode(3), vec![1, 0]);
        assert_eq!(table.encode(&[2, 1]), 7);
    }

    #[test]
    fn tables_validate_their_shape() {
        let actions = dec_pair_actions();
        assert!(matches!(
            MechanismTable::new(2, actions.clone(), vec![Invitation::empty(); 5]),
            Err(TableError::WrongOutcomeCount {
                expected: 9,
                got: 5
            })
        ));
        let mut bad = vec![Invitation::empty(); 9];
        bad[3] = Invitation::from_members(vec![2]);
        assert!(matches!(
            MechanismTable::new(2, actions.clone(), bad),
            Err(TableError::OutcomeOutOfRange {
                index: 3,
                member: 2,
                n: 2
            })
        ));
        assert!(matches!(
            MechanismTable::new(2, vec![actions[0].clone(), vec![]], vec![]),
            Err(TableError::EmptyActionSpace { agent: 1 })
        ));
        let self_ref = vec![
            vec![AgentAction::declaration(
                PreferenceOrder::simple_uniform(2),
                vec![0],
                vec![],
            )],
            actions[1].clone(),
        ];
        assert!(matches!(
            MechanismTable::new(2, self_ref, vec![Invitation::empty()]),
            Err(TableError::InvalidReference {
                agent: 0,
                action: 0,
                referenced: 0
            })
        ));
    }

    #[test]
    fn the_maximum_stable_rule_is_manipulable() {
        let table = MechanismTable::tabulate(2, dec_pair_actions(), |inst| {
            match oracle_max_stable(inst, 20).unwrap().verdict {
                Verdict::Stable(inv) => inv,
                Verdict::NoStable => Invitation::empty(),
            }
        })
        .unwrap();
        let v = check_strategy_proof(&table).expect("the rule is not strategy-proof");
        // Re-derive the gain the witness claims.
        let honest = table.outcome(&v.profile).clone();
        let mut deviated = v.profile.clone();
        deviated[v.agent] = v.misreport;
        let shifted = table.outcome(&deviated);
        assert_eq!(
            compare_with_preference(
                table.actions()[v.agent][v.truth].pref(),
                v.agent,
                shifted,
                &honest
            ),
            Comparison::PrefersFirst
        );
    }

    #[test]
    fn the_constant_empty_rule_is_not_stable_finding() {
        let table = MechanismTable::tabulate(2, dec_pair_actions(), |_| Invitation::empty())
            .unwrap();
        let failure = check_finds_stable(&table).unwrap();
        // The very first profile (both want to be alone) already has stable
        // outcomes, and {0} is the canonical witness.
        assert_eq!(failure.profile, vec![0, 0]);
        assert_eq!(failure.outcome, Invitation::empty());
        assert_eq!(failure.witness, Invitation::from_members(vec![0]));
    }

    #[test]
    fn the_threshold_mechanism_table_is_clean() {
        let actions: Vec<AgentAction> = (1..=3)
            .map(|l| AgentAction::preference(PreferenceOrder::increasing(2, l).unwrap()))
            .collect();
        let table = MechanismTable::tabulate(2, vec![actions.clone(), actions], |inst| {
            run_inc_mechanism(&ThresholdProfile::from_instance(inst).unwrap())
        })
        .unwrap();
        assert_eq!(check_strategy_proof(&table), None);
        assert_eq!(check_finds_stable(&table), None);
    }

    #[test]
    fn no_mechanism_over_decreasing_pairs_is_sp_and_stable_finding() {
        let report = verify_no_sp_stable_mechanism(ImpossibilityCase::AnonymousDecPair);
        assert_eq!(report.tables_enumerated, 262_144);
        assert_eq!(report.stable_finding_tables, 2);
        assert!(report.strategy_proof_tables > 0);
        assert_eq!(report.intersection, 0);
    }

    #[test]
    fn no_mechanism_over_rejection_declarations_is_sp_and_stable_finding() {
        let report = verify_no_sp_stable_mechanism(ImpossibilityCase::SimpleRejectionPair);
        assert_eq!(report.tables_enumerated, 256);
        assert_eq!(report.stable_finding_tables, 2);
        assert!(report.strategy_proof_tables > 0);
        assert_eq!(report.intersection, 0);
    }

    #[test]
    fn a_single_agent_space_does_admit_an_sp_stable_mechanism() {
        // Control for the audit itself: granting the agent exactly when
        // willing is strategy-proof and stable-finding, and it is the only
        // such table.
        let actions = vec![vec![
            AgentAction::preference(groups(&[&[1], &[0]])),
            AgentAction::preference(groups(&[&[0], &[1]])),
        ]];
        let report = audit_mechanism_space(1, &actions).unwrap();
        assert_eq!(report.tables_enumerated, 4);
        assert_eq!(report.intersection, 1);
    }

    #[test]
    fn packed_audit_matches_the_explicit_table_checks() {
        let actions = ImpossibilityCase::SimpleRejectionPair.action_space();
        let report = verify_no_sp_stable_mechanism(ImpossibilityCase::SimpleRejectionPair);
        let mut sp = 0;
        let mut sf = 0;
        let mut both = 0;
        for packed in 0u64..256 {
            let outcomes = (0..4)
                .map(|q| Invitation::from_mask(packed >> (2 * q) & 0b11))
                .collect();
            let table = MechanismTable::new(2, actions.clone(), outcomes).unwrap();
            let is_sp = check_strategy_proof(&table).is_none();
            let is_sf = check_finds_stable(&table).is_none();
            sp += is_sp as u64;
            sf += is_sf as u64;
            both += (is_sp && is_sf) as u64;
        }
        assert_eq!(sp, report.strategy_proof_tables);
        assert_eq!(sf, report.stable_finding_tables);
        assert_eq!(both, report.intersection);
    }

    #[test]
    fn audit_rejects_oversized_spaces() {
        let space: Vec<AgentAction> = (1..=4)
            .map(|l| AgentAction::preference(PreferenceOrder::increasing(3, l).unwrap()))
            .collect();
        let actions = vec![space.clone(), space.clone(), space];
        assert!(matches!(
            audit_mechanism_space(3, &actions),
            Err(AuditError::SpaceTooLarge { bits: 192, .. })
        ));
    }

    #[test]
    fn shrinking_the_report_paints_a_solo_party() {
        // One size-proud agent against two crowd lovers: truthfully the
        // full event runs, but claiming to accept only solo events leaves
        // the manipulator alone, which their true preference loves most.
        let inst = GsipInstance::anonymous(vec![
            groups(&[&[1], &[2], &[3], &[0]]),
            groups(&[&[3], &[0], &[1, 2]]),
            groups(&[&[3], &[0], &[1, 2]]),
        ])
        .unwrap();
        let limits = Limits::default();
        let found = find_manipulation(
            &inst,
            SolverMechanism::AsipSolver,
            ManipulationMode::IntervalReports,
            None,
            &limits,
        )
        .unwrap()
        .expect("the size sweep is manipulable here");
        assert_eq!(found.agent, 0);
        assert_eq!(found.truthful_outcome, Invitation::full(3));
        assert_eq!(found.outcome, Invitation::from_members(vec![0]));
        match &found.misreport {
            Misreport::Preference(p) => assert_eq!(p.acceptable_sizes().collect::<Vec<_>>(), vec![1]),
            other => panic!("expected a preference misreport, got {other:?}"),
        }

        // The brute-force space contains the interval space.
        let brute = find_manipulation(
            &inst,
            SolverMechanism::AsipSolver,
            ManipulationMode::BruteForce,
            Some(0),
            &limits,
        )
        .unwrap()
        .expect("superset of the interval search");
        assert_eq!(brute.outcome, Invitation::from_members(vec![0]));
    }

    #[test]
    fn hiding_a_veto_grows_the_party() {
        // Agent 0 truthfully vetoes agent 1, which leaves them home while
        // agent 1 parties; dropping the veto gets both invited, and the
        // size-only valuation scores that higher.
        let inst = GsipInstance::new(
            vec![PreferenceOrder::simple_uniform(2); 2],
            vec![vec![]; 2],
            vec![vec![1], vec![]],
        )
        .unwrap();
        let limits = Limits::default();
        let truthful = SolverMechanism::GsipSolver.outcome(&inst, &limits).unwrap();
        assert_eq!(truthful, Invitation::from_members(vec![1]));
        let found = find_manipulation(
            &inst,
            SolverMechanism::GsipSolver,
            ManipulationMode::FrSets,
            None,
            &limits,
        )
        .unwrap()
        .expect("dropping the veto helps");
        assert_eq!(found.agent, 0);
        assert_eq!(
            found.misreport,
            Misreport::Declaration {
                accept: vec![],
                reject: vec![]
            }
        );
        assert_eq!(found.outcome, Invitation::full(2));
    }

    #[test]
    fn the_threshold_mechanism_resists_manipulation() {
        let mut rng = ChaCha8Rng::seed_from_u64(0x7157);
        let limits = Limits::default();
        for _ in 0..60 {
            let n = rng.gen_range(1..=6);
            let prefs: Vec<PreferenceOrder> = (0..n)
                .map(|_| PreferenceOrder::increasing(n, rng.gen_range(1..=n + 1)).unwrap())
                .collect();
            let inst = GsipInstance::anonymous(prefs).unwrap();
            let found = find_manipulation(
                &inst,
                SolverMechanism::IncMechanism,
                ManipulationMode::BruteForce,
                None,
                &limits,
            )
            .unwrap();
            assert_eq!(found, None, "threshold mechanism manipulated on {inst:?}");
        }
    }

    #[test]
    fn reported_manipulations_always_verify() {
        let mut rng = ChaCha8Rng::seed_from_u64(0x5EEC);
        let limits = Limits::default();
        for _ in 0..120 {
            let n = rng.gen_range(2..=6);
            let prefs: Vec<PreferenceOrder> = (0..n)
                .map(|_| {
                    let mut ranks: Vec<u32> =
                        (0..=n).map(|_| rng.gen_range(0..=3)).collect();
                    for x in 1..=n {
                        if ranks[x] == ranks[0] {
                            ranks[x] += 1;
                        }
                    }
                    PreferenceOrder::from_ranks(ranks).unwrap()
                })
                .collect();
            let inst = GsipInstance::anonymous(prefs).unwrap();
            let found = find_manipulation(
                &inst,
                SolverMechanism::AsipSolver,
                ManipulationMode::BruteForce,
                None,
                &limits,
            )
            .unwrap();
            if let Some(m) = found {
                let alt = match &m.misreport {
                    Misreport::Preference(p) => inst.with_preference(m.agent, p.clone()),
                    Misreport::Declaration { accept, reject } => inst
                        .with_declaration(m.agent, accept.clone(), reject.clone())
                        .unwrap(),
                };
                let replay = SolverMechanism::AsipSolver.outcome(&alt, &limits).unwrap();
                assert_eq!(replay, m.outcome);
                assert_eq!(
                    compare_with_preference(
                        inst.preference(m.agent),
                        m.agent,
                        &m.outcome,
                        &m.truthful_outcome
                    ),
                    Comparison::PrefersFirst
                );
            }
        }
    }

    #[test]
    fn report_spaces_have_the_documented_shape_and_order() {
        let limits = Limits::default();
        let brute =
            preference_reports(2, SolverMechanism::AsipSolver, ManipulationMode::BruteForce, &limits)
                .unwrap();
        assert_eq!(brute.len(), 4);
        assert_eq!(brute[0].acceptable_sizes().collect::<Vec<_>>(), Vec::<usize>::new());
        assert_eq!(brute[3].acceptable_sizes().collect::<Vec<_>>(), vec![1, 2]);

        let intervals = preference_reports(
            3,
            SolverMechanism::GsipSolver,
            ManipulationMode::IntervalReports,
            &limits,
        )
        .unwrap();
        let spans: Vec<Vec<usize>> = intervals.iter().map(|p| p.acceptable_sizes().collect()).collect();
        assert_eq!(
            spans,
            vec![
                vec![1],
                vec![1, 2],
                vec![1, 2, 3],
                vec![2],
                vec![2, 3],
                vec![3],
                vec![]
            ]
        );

        let inc =
            preference_reports(2, SolverMechanism::IncMechanism, ManipulationMode::BruteForce, &limits)
                .unwrap();
        assert_eq!(inc.len(), 3);
        assert!(inc[2].acceptable_sizes().next().is_none());

        let mut tight = Limits::default();
        tight.brute_force_max_agents = 3;
        assert!(matches!(
            preference_reports(4, SolverMechanism::AsipSolver, ManipulationMode::BruteForce, &tight),
            Err(ManipulationError::TooManyAgents { n: 4, cap: 3 })
        ));
    }

    #[test]
    fn bounded_subsets_come_in_mask_order() {
        let limits = Limits::default();
        let subs = bounded_subsets(&[0, 2, 3], 2, &limits).unwrap();
        assert_eq!(
            subs,
            vec![
                vec![],
                vec![0],
                vec![2],
                vec![0, 2],
                vec![3],
                vec![0, 3],
                vec![2, 3]
            ]
        );
        let mut tight = Limits::default();
        tight.declaration_reports_max = 5;
        assert!(matches!(
            bounded_subsets(&[0, 1, 2, 3, 4], 5, &tight),
            Err(ManipulationError::TooManyReports { .. })
        ));
    }
}
