//! Four-valued classification of tuples against a chased pair.
//!
//! A tuple in the lower closure of the saturated table is `true` unless it
//! belongs to the inconsistent set, in which case it is `inc`. A tuple
//! outside the lower closure is probed by re-chasing the saturated table
//! with the tuple added: if it comes out inconsistent there it is `false`,
//! otherwise `unkn`. The number of false tuples can be unbounded, so falsity
//! is only ever decided per tuple on demand.

use std::collections::{BTreeSet, HashMap};
use std::fmt;

use crate::chase::{chase, ChaseResult};
use crate::model::{Constant, Delta, Tuple};
use crate::semantics::{closure_against, scheme_closure};

/// The four truth values, ordered here only for display purposes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum TruthValue {
    True,
    Inc,
    Unkn,
    False,
}

impl TruthValue {
    pub fn as_str(self) -> &'static str {
        match self {
            TruthValue::True => "true",
            TruthValue::Inc => "inc",
            TruthValue::Unkn => "unkn",
            TruthValue::False => "false",
        }
    }
}

impl fmt::Display for TruthValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl std::str::FromStr for TruthValue {
    type Err = String;
    fn from_str(s: &str) -> Result<TruthValue, String> {
        match s {
            "true" => Ok(TruthValue::True),
            "inc" => Ok(TruthValue::Inc),
            "unkn" => Ok(TruthValue::Unkn),
            "false" => Ok(TruthValue::False),
            other => Err(format!("not a truth value: `{other}`")),
        }
    }
}

/// The set of inconsistent tuples of a pair. Every member is derivable and
/// has a conflicting closure; membership is a plain set lookup.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct IncSet {
    tuples: BTreeSet<Tuple>,
}

impl IncSet {
    pub fn contains(&self, t: &Tuple) -> bool {
        self.tuples.contains(t)
    }

    pub fn iter(&self) -> impl Iterator<Item = &Tuple> {
        self.tuples.iter()
    }

    pub fn len(&self) -> usize {
        self.tuples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tuples.is_empty()
    }
}

impl FromIterator<Tuple> for IncSet {
    fn from_iter<I: IntoIterator<Item = Tuple>>(iter: I) -> IncSet {
        IncSet {
            tuples: iter.into_iter().collect(),
        }
    }
}

/// Materializes the inconsistent set from a chase result.
///
/// For every saturated row `t` and dependency `X -> A` within its schema
/// whose ledger holds `t.X`, a restriction `t.Q` is inconsistent when the
/// conflicting left-hand values lie in the closure of `t.Q`. The
/// attribute-level closure of `Q` is a cheap necessary condition and prunes
/// most restrictions; it is not sufficient on its own, because a
/// dependency chain through an attribute that has no value anywhere leaves
/// the attribute closure larger than the value closure. Scheme closures and
/// tuple closures are memoized across the scan.
pub fn inc_set(result: &ChaseResult) -> IncSet {
    let mut out = BTreeSet::new();
    let mut schemes: HashMap<u32, u32> = HashMap::new();
    let mut closures: HashMap<Tuple, BTreeSet<Constant>> = HashMap::new();
    let fds = result.fds();
    let u = result.universe();
    for t in result.dstar().iter() {
        let schema = t.schema();
        for fd in fds {
            if !fd.attrs().is_subset(&schema) {
                continue;
            }
            let x = t.project_unchecked(fd.lhs());
            if !result.inc().contains(fd, &x) {
                continue;
            }
            for q_schema in schema.nonempty_subsets() {
                let qplus = *schemes
                    .entry(q_schema.0)
                    .or_insert_with(|| scheme_closure(fds, q_schema).attrs.0);
                if fd.lhs().0 & !qplus != 0 {
                    continue;
                }
                let q = t.project_unchecked(q_schema);
                if out.contains(&q) {
                    continue;
                }
                let closure = closures
                    .entry(q.clone())
                    .or_insert_with(|| closure_against(result.dstar(), u, fds, &q));
                if x.constants().all(|c| closure.contains(c)) {
                    out.insert(q);
                }
            }
        }
    }
    IncSet { tuples: out }
}

/// The truth value of `t` against a chased pair and its inconsistent set.
pub fn truth_value(t: &Tuple, result: &ChaseResult, incs: &IncSet) -> TruthValue {
    if result.derivable(t) {
        if incs.contains(t) {
            TruthValue::Inc
        } else {
            TruthValue::True
        }
    } else {
        let probed = chase(&result.as_delta().with_row(t.clone()));
        if inc_set(&probed).contains(t) {
            TruthValue::False
        } else {
            TruthValue::Unkn
        }
    }
}

/// A pair is consistent exactly when it has no inconsistent tuple.
pub fn is_consistent(delta: &Delta) -> bool {
    inc_set(&chase(delta)).is_empty()
}

/// The conflict degree: the largest number of competing right-hand values
/// recorded for any ledger entry; `1` for a conflict-free result.
pub fn conflict_degree(result: &ChaseResult) -> usize {
    let mut degree = 1usize;
    for (fd, xs) in result.inc().iter_nonempty() {
        for x in xs {
            let mut values = BTreeSet::new();
            for row in result.dstar().iter() {
                if fd.attrs().is_subset(&row.schema())
                    && row.project_unchecked(fd.lhs()) == *x
                {
                    values.insert(row.get(fd.rhs()).expect("rhs bound"));
                }
            }
            degree = degree.max(values.len());
        }
    }
    degree
}
