//! Linear-time behaviour of branching coalgebras.
//!
//! Systems are finite coalgebras for a stack of polynomial functors and
//! branching monads (powerset, sub-distributions, tropical weights). Their
//! linear-time behaviour against a finite specification, their common
//! traces and (for the powerset) bisimilarity are computed as greatest
//! fixpoints of operators built from relation liftings valued in a
//! semiring.
//!
//! ```
//! use ltbe_core::{behaviour, parse_spec, parse_system, FixpointOptions, SemiringValue};
//!
//! let sys = parse_system(r#"{"kind": "prob", "stack": ["T", "{*} + {a} * Id"], "states": ["c"],
//!     "transitions": {"c": [
//!         {"term": {"inj": 0, "of": {"atom": "*"}}, "weight": 0.5},
//!         {"term": {"inj": 1, "of": {"pair": [{"atom": "a"}, {"state": "c"}]}}, "weight": 0.5}]}}"#).unwrap();
//! let spec = parse_spec(r#"{"stack": ["{*} + {a} * Id"], "states": ["z1", "z0"],
//!     "transitions": {"z1": {"inj": 1, "of": {"pair": [{"atom": "a"}, {"state": "z0"}]}},
//!                     "z0": {"inj": 0, "of": {"atom": "*"}}}}"#).unwrap();
//! let report = behaviour(&sys, &spec, &FixpointOptions::default()).unwrap();
//! assert!(report.converged);
//! assert_eq!(report.result.lookup(&"c".into(), &"z1".into()).unwrap(), SemiringValue::Prob(0.25));
//! ```

pub mod branching;
pub mod engine;
pub mod error;
pub mod lifting;
pub mod oracle;
pub mod polyfunctor;
pub mod random;
pub mod relation;
pub mod semiring;
pub mod system;

pub use branching::{validate_branchval, BranchVal};
pub use engine::{
    behaviour, bisimilarity, bisimilarity_with, check_monad_consistency, common_trace, greatest_fixpoint,
    step_operator, FixpointOptions, FixpointReport, Operator, StateRel, StopReason,
};
pub use error::{Error, Result};
pub use oracle::{oracle_common, oracle_common_capped, oracle_matrix, oracle_matrix_capped};
pub use polyfunctor::{PolyExpr, PolyTerm, StateId, DEFAULT_ENUM_CAP};
pub use relation::{max_gap, pointwise_leq, ValRel};
pub use semiring::{check_semiring_laws, ExtNat, LawOutcome, LawReport, SemiringKind, SemiringValue};
pub use system::{linear_part, parse_spec, parse_system, serialize_system, Layer, SpecSystem, System, TypeStack};
