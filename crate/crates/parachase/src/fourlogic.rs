//! Belnap's four-valued logic and multi-source merging.
//!
//! The truth values of [`crate::classify`] correspond one-to-one to
//! Belnap's `t`, `b`, `n`, `f`: `true -> t`, `inc -> b`, `unkn -> n`,
//! `false -> f`. The five connectors are exact lookup tables. When several
//! sources over one universe are merged (union of tables, union of
//! dependency sets), the knowledge-join of the per-source truth values never
//! exceeds the merged value in the knowledge order.

use std::collections::BTreeSet;
use std::fmt;

use thiserror::Error;

use crate::chase::{chase, ChaseResult};
use crate::classify::{inc_set, truth_value, IncSet, TruthValue};
use crate::model::{Delta, Table, Tuple};

/// One of Belnap's four truth values: `t`, `b` (both), `n` (neither), `f`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum FourValue {
    True,
    Both,
    Neither,
    False,
}

pub const FOUR_VALUES: [FourValue; 4] = [
    FourValue::True,
    FourValue::Both,
    FourValue::Neither,
    FourValue::False,
];

use FourValue::{Both as B, False as F, Neither as N, True as T};

const fn idx(v: FourValue) -> usize {
    match v {
        T => 0,
        B => 1,
        N => 2,
        F => 3,
    }
}

// Row = left operand, column = right operand, both in order t, b, n, f.
const OR: [[FourValue; 4]; 4] = [
    [T, T, T, T],
    [T, B, T, B],
    [T, T, N, N],
    [T, B, N, F],
];

const AND: [[FourValue; 4]; 4] = [
    [T, B, N, F],
    [B, B, F, F],
    [N, F, N, F],
    [F, F, F, F],
];

const OPLUS: [[FourValue; 4]; 4] = [
    [T, B, T, B],
    [B, B, B, B],
    [T, B, N, F],
    [B, B, F, F],
];

const OTIMES: [[FourValue; 4]; 4] = [
    [T, T, N, N],
    [T, B, N, F],
    [N, N, N, N],
    [N, F, N, F],
];

const NEG: [FourValue; 4] = [F, B, N, T];

impl std::ops::Not for FourValue {
    type Output = FourValue;

    /// Negation: swaps `t` and `f`, fixes `b` and `n`.
    fn not(self) -> FourValue {
        NEG[idx(self)]
    }
}

impl FourValue {
    /// Disjunction: join in the truth order.
    pub fn or(self, other: FourValue) -> FourValue {
        OR[idx(self)][idx(other)]
    }

    /// Conjunction: meet in the truth order.
    pub fn and(self, other: FourValue) -> FourValue {
        AND[idx(self)][idx(other)]
    }

    /// Knowledge join; the connector that drives source merging.
    pub fn oplus(self, other: FourValue) -> FourValue {
        OPLUS[idx(self)][idx(other)]
    }

    /// Knowledge meet.
    pub fn otimes(self, other: FourValue) -> FourValue {
        OTIMES[idx(self)][idx(other)]
    }

    /// The truth order: `f` below `n` and `b`, both below `t`.
    pub fn truth_le(self, other: FourValue) -> bool {
        self == other
            || self == F
            || other == T
            || matches!((self, other), (N, T) | (B, T))
    }

    /// The knowledge order: `n` below `t` and `f`, both below `b`.
    pub fn knowledge_le(self, other: FourValue) -> bool {
        self == other
            || self == N
            || other == B
            || matches!((self, other), (T, B) | (F, B))
    }

    pub fn as_str(self) -> &'static str {
        match self {
            T => "t",
            B => "b",
            N => "n",
            F => "f",
        }
    }
}

impl fmt::Display for FourValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// The bijection between tuple truth values and Belnap values.
pub fn h(v: TruthValue) -> FourValue {
    match v {
        TruthValue::True => T,
        TruthValue::Inc => B,
        TruthValue::Unkn => N,
        TruthValue::False => F,
    }
}

/// Inverse of [`h`].
pub fn h_inv(v: FourValue) -> TruthValue {
    match v {
        T => TruthValue::True,
        B => TruthValue::Inc,
        N => TruthValue::Unkn,
        F => TruthValue::False,
    }
}

impl TruthValue {
    /// Knowledge join transported along the bijection.
    pub fn oplus(self, other: TruthValue) -> TruthValue {
        h_inv(h(self).oplus(h(other)))
    }
}

/// Knowledge order on tuple truth values: `unkn` below `true` and `false`,
/// both below `inc`; `true` and `false` incomparable.
pub fn knowledge_le(a: TruthValue, b: TruthValue) -> bool {
    h(a).knowledge_le(h(b))
}

#[derive(Debug, Error)]
pub enum MergeError {
    #[error("sources must share one universe")]
    UniverseMismatch,
    #[error("at least one source is required")]
    NoSources,
    #[error(
        "merged truth value of {probe} dropped below the per-source join ({fold} vs {merged})"
    )]
    KnowledgeDecreased {
        probe: String,
        fold: TruthValue,
        merged: TruthValue,
    },
}

/// A nonempty list of sources over one shared universe.
#[derive(Debug, Clone)]
pub struct SourceSet {
    deltas: Vec<Delta>,
}

impl SourceSet {
    pub fn new(deltas: Vec<Delta>) -> Result<SourceSet, MergeError> {
        let first = deltas.first().ok_or(MergeError::NoSources)?;
        if deltas[1..]
            .iter()
            .any(|d| d.universe().as_ref() != first.universe().as_ref())
        {
            return Err(MergeError::UniverseMismatch);
        }
        Ok(SourceSet { deltas })
    }

    pub fn deltas(&self) -> &[Delta] {
        &self.deltas
    }
}

/// Union of the source tables and of the source dependency sets.
pub fn merge_sources(sources: &SourceSet) -> Delta {
    let universe = sources.deltas[0].universe().clone();
    let mut table = Table::new();
    let mut fds = Vec::new();
    for d in &sources.deltas {
        for row in d.table().iter() {
            table.insert(row.clone());
        }
        for fd in d.fds() {
            if !fds.contains(fd) {
                fds.push(*fd);
            }
        }
    }
    fds.sort();
    Delta::new(universe, table, fds)
}

/// One probe of a merged-truth report.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ProbeReport {
    pub probe: Tuple,
    pub per_source: Vec<TruthValue>,
    /// Knowledge join of the per-source values.
    pub fold: TruthValue,
    /// Truth value in the merged pair.
    pub merged: TruthValue,
    /// Whether the join already equals the merged value.
    pub equal: bool,
}

/// Chased state of one source or of the merged pair.
struct Classified {
    result: ChaseResult,
    incs: IncSet,
}

impl Classified {
    fn of(delta: &Delta) -> Classified {
        let result = chase(delta);
        let incs = inc_set(&result);
        Classified { result, incs }
    }

    fn value(&self, t: &Tuple) -> TruthValue {
        truth_value(t, &self.result, &self.incs)
    }
}

/// Evaluates every probe against each source and against the merged pair.
///
/// Merging may only increase knowledge: a probe whose merged value falls
/// below the per-source join is reported as an error.
pub fn merged_truth_report(
    sources: &SourceSet,
    probes: &BTreeSet<Tuple>,
) -> Result<Vec<ProbeReport>, MergeError> {
    let merged_delta = merge_sources(sources);
    let merged = Classified::of(&merged_delta);
    let classified: Vec<Classified> = sources.deltas.iter().map(Classified::of).collect();
    let mut out = Vec::with_capacity(probes.len());
    for probe in probes {
        let per_source: Vec<TruthValue> = classified.iter().map(|c| c.value(probe)).collect();
        let fold = per_source
            .iter()
            .copied()
            .fold(TruthValue::Unkn, TruthValue::oplus);
        let merged_value = merged.value(probe);
        if !knowledge_le(fold, merged_value) {
            return Err(MergeError::KnowledgeDecreased {
                probe: probe.display(merged_delta.universe()).to_string(),
                fold,
                merged: merged_value,
            });
        }
        out.push(ProbeReport {
            probe: probe.clone(),
            per_source,
            fold,
            merged: merged_value,
            equal: fold == merged_value,
        });
    }
    Ok(out)
}

/// The default probe set: the whole lower closure of the merged saturated
/// table plus every single-constant tuple of any source row.
pub fn default_probes(sources: &SourceSet) -> BTreeSet<Tuple> {
    let merged = merge_sources(sources);
    let mut probes = chase(&merged).dstar().lower_closure();
    for d in sources.deltas() {
        for row in d.table().iter() {
            for (attr, c) in row.bindings() {
                probes.insert(
                    Tuple::new(d.universe(), [(attr, c.clone())]).expect("single binding"),
                );
            }
        }
    }
    probes
}
