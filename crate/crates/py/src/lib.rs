//! Python bindings for the stable invitation solvers.
//!
//! Instances travel as JSON document strings (the same format the `sip`
//! command-line tool reads), results come back as plain Python values.

use pyo3::exceptions::{PyRuntimeError, PyValueError};
use pyo3::prelude::*;
use pyo3::types::PyDict;

use stable_invitations::{
    audit_mechanism_space, enumerate_stable as core_enumerate, find_manipulation,
    generate_random_instance, is_envy_free, is_individually_rational, parse_instance,
    run_inc_mechanism, serialize_instance, solve_asip_multislot, solve_gsip, GeneratorConfig,
    GsipError, GsipInstance, ImpossibilityCase, Invitation, Limits, ManipulationError,
    ManipulationMode, Misreport, ParsedDocument, SolveResult, SolverMechanism, ThresholdProfile,
    Verdict,
};

fn value_error<E: std::fmt::Display>(err: E) -> PyErr {
    PyValueError::new_err(err.to_string())
}

fn capacity_error<E: std::fmt::Display>(err: E) -> PyErr {
    PyRuntimeError::new_err(err.to_string())
}

fn gsip_error(err: GsipError) -> PyErr {
    match err {
        GsipError::TooManyAgents { .. } => capacity_error(err),
    }
}

fn parse_document(text: &str) -> PyResult<ParsedDocument> {
    parse_instance(text).map_err(value_error)
}

fn parse_single(text: &str) -> PyResult<GsipInstance> {
    match parse_document(text)? {
        ParsedDocument::Single(inst) => Ok(inst),
        ParsedDocument::MultiSlot(_) => Err(value_error(
            "this call needs a single-slot document; only solve() handles slots",
        )),
    }
}

fn ids(inv: &Invitation) -> Vec<usize> {
    inv.members().iter().map(|&i| i + 1).collect()
}

fn invitation_from_ids(members: Vec<usize>, n: usize) -> PyResult<Invitation> {
    let mut zero_based = Vec::with_capacity(members.len());
    for id in members {
        if id == 0 || id > n {
            return Err(value_error(format!("member id {id} is outside 1..={n}")));
        }
        zero_based.push(id - 1);
    }
    zero_based.sort_unstable();
    zero_based.dedup();
    Ok(Invitation::from_members(zero_based))
}

fn solve_dict<'py>(
    py: Python<'py>,
    result: &SolveResult,
    slot: Option<usize>,
) -> PyResult<Bound<'py, PyDict>> {
    let dict = PyDict::new_bound(py);
    match &result.verdict {
        Verdict::Stable(inv) => {
            dict.set_item("verdict", "stable")?;
            dict.set_item("size", inv.size())?;
            dict.set_item("members", ids(inv))?;
        }
        Verdict::NoStable => {
            dict.set_item("verdict", "no_stable")?;
        }
    }
    dict.set_item("path", result.stats.path.as_str())?;
    if let Some(slot) = slot {
        dict.set_item("slot", slot)?;
    }
    Ok(dict)
}

/// Solve a document for a maximum stable invitation. Multi-slot documents
/// additionally report the chosen slot (1-based).
#[pyfunction]
#[pyo3(signature = (text, exact_cap = None))]
fn solve<'py>(py: Python<'py>, text: &str, exact_cap: Option<usize>) -> PyResult<Bound<'py, PyDict>> {
    let mut limits = Limits::default();
    if let Some(cap) = exact_cap {
        limits.exact_search_max_agents = cap;
    }
    match parse_document(text)? {
        ParsedDocument::Single(inst) => {
            let result = solve_gsip(&inst, &limits).map_err(gsip_error)?;
            solve_dict(py, &result, None)
        }
        ParsedDocument::MultiSlot(ms) => {
            let (slot, result) = solve_asip_multislot(&ms);
            solve_dict(py, &result, Some(slot + 1))
        }
    }
}

/// Report the stability verdicts for one invitation (1-based member ids).
#[pyfunction]
fn check<'py>(py: Python<'py>, text: &str, members: Vec<usize>) -> PyResult<Bound<'py, PyDict>> {
    let inst = parse_single(text)?;
    let inv = invitation_from_ids(members, inst.n())?;
    let ir = is_individually_rational(&inst, &inv);
    let ef = is_envy_free(&inst, &inv);
    let dict = PyDict::new_bound(py);
    dict.set_item("individually_rational", ir)?;
    dict.set_item("envy_free", ef)?;
    dict.set_item("stable", ir && ef)?;
    Ok(dict)
}

/// Every stable invitation, as sorted 1-based member lists.
#[pyfunction]
fn enumerate_stable(text: &str) -> PyResult<Vec<Vec<usize>>> {
    let inst = parse_single(text)?;
    let all = core_enumerate(&inst, Limits::default().oracle_max_agents).map_err(capacity_error)?;
    Ok(all.iter().map(ids).collect())
}

/// Run the threshold mechanism on a document whose preferences are all
/// threshold-shaped; returns the invited 1-based ids.
#[pyfunction]
fn run_mechanism(text: &str) -> PyResult<Vec<usize>> {
    let inst = parse_single(text)?;
    let profile = ThresholdProfile::from_instance(&inst).map_err(value_error)?;
    Ok(ids(&run_inc_mechanism(&profile)))
}

/// Search for a profitable misreport; `mode` is "brute_force", "intervals",
/// or "declarations", `mechanism` is "solver" or "inc". Returns None when
/// honesty wins.
#[pyfunction]
#[pyo3(signature = (text, mode = "brute_force", mechanism = "solver", agent = None))]
fn manipulate<'py>(
    py: Python<'py>,
    text: &str,
    mode: &str,
    mechanism: &str,
    agent: Option<usize>,
) -> PyResult<Option<Bound<'py, PyDict>>> {
    let inst = parse_single(text)?;
    let mode = match mode {
        "brute_force" => ManipulationMode::BruteForce,
        "intervals" => ManipulationMode::IntervalReports,
        "declarations" => ManipulationMode::FrSets,
        other => return Err(value_error(format!("unknown mode {other:?}"))),
    };
    let mechanism = match mechanism {
        "inc" => SolverMechanism::IncMechanism,
        "solver" if inst.alpha() == 0 && inst.beta() == 0 => SolverMechanism::AsipSolver,
        "solver" => SolverMechanism::GsipSolver,
        other => return Err(value_error(format!("unknown mechanism {other:?}"))),
    };
    let agent = match agent {
        Some(id) => {
            if id == 0 || id > inst.n() {
                return Err(value_error(format!(
                    "agent id {id} is outside 1..={}",
                    inst.n()
                )));
            }
            Some(id - 1)
        }
        None => None,
    };
    let found = find_manipulation(&inst, mechanism, mode, agent, &Limits::default())
        .map_err(|e| match e {
            ManipulationError::TooManyAgents { .. } | ManipulationError::TooManyReports { .. } => {
                capacity_error(e)
            }
            other => value_error(other),
        })?;
    let Some(m) = found else { return Ok(None) };
    let dict = PyDict::new_bound(py);
    dict.set_item("agent", m.agent + 1)?;
    dict.set_item("truthful_outcome", ids(&m.truthful_outcome))?;
    dict.set_item("outcome", ids(&m.outcome))?;
    let misreport = PyDict::new_bound(py);
    match &m.misreport {
        Misreport::Preference(p) => {
            misreport.set_item("kind", "preference")?;
            misreport.set_item("acceptable_sizes", p.acceptable_sizes().collect::<Vec<_>>())?;
            misreport.set_item("ranks", p.ranks().to_vec())?;
        }
        Misreport::Declaration { accept, reject } => {
            misreport.set_item("kind", "declaration")?;
            misreport.set_item("accept", accept.iter().map(|&j| j + 1).collect::<Vec<_>>())?;
            misreport.set_item("reject", reject.iter().map(|&j| j + 1).collect::<Vec<_>>())?;
        }
    }
    dict.set_item("misreport", misreport)?;
    Ok(Some(dict))
}

/// Audit a bundled two-agent mechanism space; `case` is "theorem2_asip" or
/// "lemma_gsip". The space is verified when `intersection` is 0.
#[pyfunction]
fn verify_impossibility<'py>(py: Python<'py>, case: &str) -> PyResult<Bound<'py, PyDict>> {
    let picked = match case {
        "theorem2_asip" => ImpossibilityCase::AnonymousDecPair,
        "lemma_gsip" => ImpossibilityCase::SimpleRejectionPair,
        other => return Err(value_error(format!("unknown case {other:?}"))),
    };
    let report = audit_mechanism_space(picked.agent_count(), &picked.action_space())
        .map_err(capacity_error)?;
    let dict = PyDict::new_bound(py);
    dict.set_item("case", case)?;
    dict.set_item("tables", report.tables_enumerated)?;
    dict.set_item("strategy_proof", report.strategy_proof_tables)?;
    dict.set_item("stable_finding", report.stable_finding_tables)?;
    dict.set_item("intersection", report.intersection)?;
    dict.set_item("verified", report.intersection == 0)?;
    Ok(dict)
}

/// Generate a seeded random instance document from a generator config
/// document (both JSON strings).
#[pyfunction]
fn generate(config: &str) -> PyResult<String> {
    let config: GeneratorConfig = serde_json::from_str(config).map_err(value_error)?;
    let inst = generate_random_instance(&config).map_err(value_error)?;
    Ok(serialize_instance(&inst))
}

#[pymodule]
fn stable_invitations_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_function(wrap_pyfunction!(solve, m)?)?;
    m.add_function(wrap_pyfunction!(check, m)?)?;
    m.add_function(wrap_pyfunction!(enumerate_stable, m)?)?;
    m.add_function(wrap_pyfunction!(run_mechanism, m)?)?;
    m.add_function(wrap_pyfunction!(manipulate, m)?)?;
    m.add_function(wrap_pyfunction!(verify_impossibility, m)?)?;
    m.add_function(wrap_pyfunction!(generate, m)?)?;
    Ok(())
}
