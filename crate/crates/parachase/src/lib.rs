//! Tables with nulls and functional dependencies, kept queryable even when
//! the dependencies are violated.
//!
//! The saturation engine ([`chase()`]) completes missing values and, instead
//! of aborting on a dependency conflict, records the conflicting left-hand
//! values in a ledger and keeps every competing completion. On top of the
//! chased table the crate classifies any tuple as `true`, `inc`
//! (inconsistent), `unkn` (unknown) or `false` ([`classify`]), relates the
//! classification to Belnap's four-valued logic when merging several sources
//! ([`fourlogic`]), and answers `SELECT`-style queries under three
//! inconsistency-aware semantics ([`query`]). Brute-force reference
//! implementations and a seeded property-check runner live in [`oracle`] and
//! [`suite`].
//!
//! ```
//! use std::sync::Arc;
//! use parachase::{chase, inc_set, truth_value, TruthValue};
//! use parachase::files::{parse_fds, parse_schema, parse_table, parse_tuple_literal};
//! use parachase::model::Delta;
//!
//! let u = Arc::new(parse_schema(
//!     "attribute A domain da\nattribute B domain db",
//! )?);
//! let table = parse_table(&u, "A,B\na,b\na,b'\n")?;
//! let fds = parse_fds(&u, "A -> B")?;
//! let delta = Delta::new(Arc::clone(&u), table, fds);
//!
//! let result = chase(&delta);
//! let incs = inc_set(&result);
//! // `a` maps to two B-values, so it is both supported and contradicted.
//! let probe = parse_tuple_literal(&u, "A=a")?;
//! assert_eq!(truth_value(&probe, &result, &incs), TruthValue::Inc);
//! # Ok::<(), parachase::files::FileError>(())
//! ```

pub mod chase;
pub mod classify;
pub mod files;
pub mod fourlogic;
pub mod model;
pub mod oracle;
pub mod query;
pub mod semantics;
pub mod suite;

pub use chase::{chase, ChaseResult};
pub use classify::{inc_set, is_consistent, truth_value, IncSet, TruthValue};
pub use model::{AttrId, AttrSet, Constant, Delta, DomainTag, Fd, Table, Tuple, Universe};
