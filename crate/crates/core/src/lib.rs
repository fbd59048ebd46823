//! Solvers, mechanisms, and incentive audits for the stable invitation
//! problem.
//!
//! An organizer wants to invite as many of `n` agents as possible to an
//! event. Agents only care about attendance size — each holds a total
//! preorder over "I attend with `x` people total" for `x` in `1..=n` plus
//! the outside option of not attending — and may additionally insist that
//! certain friends attend with them or that certain foes stay away. An
//! invitation is *stable* when nobody invited would rather stay home and
//! nobody left out could join without someone objecting.
//!
//! The crate provides:
//!
//! - exact solvers for the unconstrained ([`solve_asip`]) and constrained
//!   ([`solve_gsip`]) problems, including a multi-slot scheduling variant;
//! - the threshold mechanism for increasing preferences
//!   ([`run_inc_mechanism`]), which is strategy-proof;
//! - tools that audit arbitrary mechanisms for manipulability
//!   ([`find_manipulation`], [`check_strategy_proof`]) and machine-check
//!   that certain mechanism spaces contain no strategy-proof stable-finding
//!   rule ([`verify_no_sp_stable_mechanism`]);
//! - a brute-force oracle, random instance generation, and a JSON document
//!   format shared with the `sip` command-line tool.

pub mod asip;
pub mod gsip;
pub mod instance;
pub mod limits;
pub mod mechanism;
pub mod io;
pub mod oracle;
pub mod prefs;
pub mod stability;
pub mod strategic;

pub use asip::{solve_asip, solve_asip_multislot, AsipError, MultiSlotError, MultiSlotInstance};
pub use gsip::{
    decide_stable_at_least_k, solve_gsip, solve_max_individually_rational, GsipError,
};
pub use instance::{
    GsipInstance, InstanceError, Invitation, SearchStats, SolveResult, SolverPath, Verdict,
};
pub use io::{
    generate_random_instance, parse_instance, serialize_instance, serialize_multislot,
    GeneratorConfig, GeneratorError, ParseError, ParsedDocument, PreferenceFamily,
};
pub use limits::Limits;
pub use mechanism::{derive_threshold, run_inc_mechanism, MechanismError, ThresholdProfile};
pub use oracle::{enumerate_stable, oracle_max_stable, OracleError};
pub use prefs::{
    classify_preference, PreferenceError, PreferenceOrder, PreferenceShape, ShapeKind,
};
pub use stability::{
    blocks, compare_for_agent, compare_with_preference, induced_rank, is_envy_free,
    is_individually_rational, is_stable, Comparison,
};
pub use strategic::{
    audit_mechanism_space, check_finds_stable, check_strategy_proof, find_manipulation,
    verify_no_sp_stable_mechanism, AgentAction, AuditError, ImpossibilityCase, Manipulation,
    ManipulationError, ManipulationMode, MechanismTable, Misreport, SolverMechanism, SpViolation,
    StabilityFailure, TableError, VerificationReport,
};
