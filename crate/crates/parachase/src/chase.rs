//! The extended chase: saturates a table under its functional dependencies
//! without ever aborting.
//!
//! Saturation runs at the level of constants. Each input row starts with the
//! set of constants it binds; whenever `X -> A` holds an `X`-assignment `x`
//! jointly with an `A`-value `a` on some row, every row carrying all of `x`
//! acquires `a` as well. Naive row pairing is not enough here: with several
//! interacting conflicts a row can be forced to carry a value that no single
//! pairing step ever writes into it, and the constant fixpoint is the only
//! way to keep the lower closure of the output equal to the set of tuples
//! with nonempty fixpoint image.
//!
//! The saturated table materializes one maximal tuple per row and per
//! combination of competing values (the conflict cross-product), then keeps
//! only maximal tuples. An `X`-value seen with two or more `A`-values goes
//! into the conflict ledger.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::sync::Arc;

use crate::model::{AttrId, Constant, Delta, Fd, Table, Tuple, Universe};

/// Conflict ledger: per dependency `X -> A`, the set of `X`-values that were
/// seen with at least two distinct `A`-values.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct IncMap {
    entries: BTreeMap<Fd, BTreeSet<Tuple>>,
}

impl IncMap {
    pub fn get(&self, fd: &Fd) -> &BTreeSet<Tuple> {
        static EMPTY: BTreeSet<Tuple> = BTreeSet::new();
        self.entries.get(fd).unwrap_or(&EMPTY)
    }

    pub fn contains(&self, fd: &Fd, x: &Tuple) -> bool {
        self.entries.get(fd).is_some_and(|s| s.contains(x))
    }

    /// Dependencies with a nonempty conflict set, in canonical order.
    pub fn iter_nonempty(&self) -> impl Iterator<Item = (&Fd, &BTreeSet<Tuple>)> {
        self.entries.iter().filter(|(_, s)| !s.is_empty())
    }

    pub fn is_empty(&self) -> bool {
        self.entries.values().all(BTreeSet::is_empty)
    }

    fn insert(&mut self, fd: Fd, x: Tuple) {
        self.entries.entry(fd).or_default().insert(x);
    }

    fn ensure(&mut self, fd: Fd) {
        self.entries.entry(fd).or_default();
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct ChaseStats {
    /// Saturation rounds until the fixpoint.
    pub passes: usize,
    /// Materialized rows right before reduction.
    pub peak_rows: usize,
}

/// Output of [`chase`]: the reduced saturated table, the conflict ledger and
/// a few counters.
#[derive(Debug, Clone)]
pub struct ChaseResult {
    universe: Arc<Universe>,
    fds: Vec<Fd>,
    dstar: Table,
    inc: IncMap,
    stats: ChaseStats,
}

impl ChaseResult {
    pub fn universe(&self) -> &Arc<Universe> {
        &self.universe
    }

    pub fn fds(&self) -> &[Fd] {
        &self.fds
    }

    /// The saturated table, reduced to maximal rows.
    pub fn dstar(&self) -> &Table {
        &self.dstar
    }

    pub fn inc(&self) -> &IncMap {
        &self.inc
    }

    pub fn stats(&self) -> ChaseStats {
        self.stats
    }

    /// Derivability of `t`: membership in the lower closure of the
    /// saturated table.
    pub fn derivable(&self, t: &Tuple) -> bool {
        self.dstar.in_lower_closure(t)
    }

    /// The pair `(dstar, fds)` as a [`Delta`], e.g. for re-chasing with an
    /// extra probe row.
    pub fn as_delta(&self) -> Delta {
        Delta::new(
            Arc::clone(&self.universe),
            self.dstar.clone(),
            self.fds.clone(),
        )
    }
}

// All assignments of `attrs` to constants drawn from `carried`, matching
// each attribute's domain. Empty when some attribute has no candidate.
fn assignments_from(
    u: &Universe,
    carried: &BTreeSet<Constant>,
    attrs: &[AttrId],
) -> Vec<Vec<Constant>> {
    let mut combos: Vec<Vec<Constant>> = vec![Vec::new()];
    for a in attrs {
        let tag = u.tag_of(*a);
        let pool: Vec<&Constant> = carried.iter().filter(|c| c.tag() == tag).collect();
        if pool.is_empty() {
            return Vec::new();
        }
        let mut next = Vec::with_capacity(combos.len() * pool.len());
        for combo in &combos {
            for c in &pool {
                let mut combo = combo.clone();
                combo.push((*c).clone());
                next.push(combo);
            }
        }
        combos = next;
    }
    combos
}

/// Saturates `delta` and reduces to maximal rows. Conflicts never abort the
/// computation; they are recorded in the ledger instead.
pub fn chase(delta: &Delta) -> ChaseResult {
    let u = Arc::clone(delta.universe());
    let fds: Vec<Fd> = delta.fds().to_vec();
    let rows: Vec<&Tuple> = delta.table().iter().collect();

    // carried[i]: constants forced onto row i, seeded with its own values
    let mut carried: Vec<BTreeSet<Constant>> = rows
        .iter()
        .map(|r| r.constants().cloned().collect())
        .collect();
    let fd_lhs: Vec<Vec<AttrId>> = fds.iter().map(|fd| fd.lhs().iter().collect()).collect();

    let mut passes = 0usize;
    loop {
        passes += 1;
        let mut changed = false;
        for (fi, fd) in fds.iter().enumerate() {
            let rhs_tag = u.tag_of(fd.rhs());
            // right-hand values seen jointly with each left-hand assignment
            let mut joint: HashMap<Vec<Constant>, BTreeSet<Constant>> = HashMap::new();
            for row_carried in &carried {
                let values: Vec<Constant> = row_carried
                    .iter()
                    .filter(|c| c.tag() == rhs_tag)
                    .cloned()
                    .collect();
                if values.is_empty() {
                    continue;
                }
                for combo in assignments_from(&u, row_carried, &fd_lhs[fi]) {
                    joint.entry(combo).or_default().extend(values.iter().cloned());
                }
            }
            if joint.is_empty() {
                continue;
            }
            for row_carried in carried.iter_mut() {
                let combos = assignments_from(&u, row_carried, &fd_lhs[fi]);
                for combo in combos {
                    if let Some(values) = joint.get(&combo) {
                        for v in values {
                            if row_carried.insert(v.clone()) {
                                changed = true;
                            }
                        }
                    }
                }
            }
        }
        if !changed {
            break;
        }
    }

    // one maximal tuple per row and per combination of competing values
    let mut materialized: Vec<Tuple> = Vec::new();
    for row_carried in &carried {
        let mut cells_acc: Vec<Vec<Option<Constant>>> = vec![Vec::new()];
        for a in u.attr_ids() {
            let tag = u.tag_of(a);
            let pool: Vec<&Constant> = row_carried.iter().filter(|c| c.tag() == tag).collect();
            let mut next = Vec::with_capacity(cells_acc.len() * pool.len().max(1));
            for cells in &cells_acc {
                if pool.is_empty() {
                    let mut cells = cells.clone();
                    cells.push(None);
                    next.push(cells);
                } else {
                    for c in &pool {
                        let mut cells = cells.clone();
                        cells.push(Some((*c).clone()));
                        next.push(cells);
                    }
                }
            }
            cells_acc = next;
        }
        for cells in cells_acc {
            if cells.iter().any(Option::is_some) {
                materialized.push(Tuple::from_cells(cells.into_boxed_slice()));
            }
        }
    }
    let peak_rows = materialized.len();
    let dstar = materialized.into_iter().collect::<Table>().reduce();

    // ledger: left-hand values carrying two or more right-hand values
    let mut inc = IncMap::default();
    for fd in &fds {
        inc.ensure(*fd);
    }
    for fd in &fds {
        let mut values_of: BTreeMap<Tuple, BTreeSet<&Constant>> = BTreeMap::new();
        for row in dstar.iter() {
            if fd.attrs().is_subset(&row.schema()) {
                values_of
                    .entry(row.project_unchecked(fd.lhs()))
                    .or_default()
                    .insert(row.get(fd.rhs()).expect("rhs bound"));
            }
        }
        for (x, values) in values_of {
            if values.len() >= 2 {
                inc.insert(*fd, x);
            }
        }
    }

    ChaseResult {
        universe: u,
        fds,
        dstar,
        inc,
        stats: ChaseStats { passes, peak_rows },
    }
}
