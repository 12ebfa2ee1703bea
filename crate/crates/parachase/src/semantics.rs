//! Set-theoretic semantics: mappings from constants to tuple-id sets, the
//! least satisfying mapping `mu_star`, derivability, tuple closures and
//! attribute-set closures.
//!
//! A `TMapping` assigns each constant a set of tuple identifiers and extends
//! to tuples by intersection. It satisfies a dependency `X -> A` when, for
//! every `x` over `X` and every `A`-value `a` with a nonempty joint image,
//! the image of `x` is contained in the image of `a`. `mu_star` starts from
//! the identifier sets of the rows and widens right-hand images until every
//! dependency holds; a tuple is derivable exactly when its `mu_star` image
//! is nonempty, which coincides with membership in the lower closure of the
//! chased table.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::sync::Arc;

use crate::chase::{chase, ChaseResult};
use crate::model::{AttrId, AttrSet, Constant, Delta, DomainTag, Fd, Table, Tuple, Universe};

pub type IdSet = BTreeSet<u32>;

static EMPTY_IDS: IdSet = IdSet::new();

/// A mapping from constants to sets of tuple identifiers; unmapped constants
/// have the empty image.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TMapping {
    universe: Arc<Universe>,
    images: HashMap<Constant, IdSet>,
    // occurring constants grouped by domain, in canonical order
    pools: BTreeMap<DomainTag, Vec<Constant>>,
}

impl TMapping {
    fn new(universe: Arc<Universe>) -> TMapping {
        TMapping {
            universe,
            images: HashMap::new(),
            pools: BTreeMap::new(),
        }
    }

    fn insert_id(&mut self, c: &Constant, id: u32) {
        if !self.images.contains_key(c) {
            self.pools.entry(c.tag()).or_default().push(c.clone());
        }
        self.images.entry(c.clone()).or_default().insert(id);
    }

    fn sort_pools(&mut self) {
        for pool in self.pools.values_mut() {
            pool.sort();
        }
    }

    pub fn universe(&self) -> &Arc<Universe> {
        &self.universe
    }

    /// Image of a single constant; empty if the constant never occurs.
    pub fn image(&self, c: &Constant) -> &IdSet {
        self.images.get(c).unwrap_or(&EMPTY_IDS)
    }

    /// Image of a tuple: the intersection of its constants' images.
    pub fn image_of_tuple(&self, t: &Tuple) -> IdSet {
        let mut acc: Option<IdSet> = None;
        for c in t.constants() {
            let img = self.image(c);
            acc = Some(match acc {
                None => img.clone(),
                Some(prev) => prev.intersection(img).cloned().collect(),
            });
            if acc.as_ref().is_some_and(IdSet::is_empty) {
                return IdSet::new();
            }
        }
        acc.unwrap_or_default()
    }

    /// Constants with nonempty image in the given domain, sorted.
    pub fn pool(&self, tag: DomainTag) -> &[Constant] {
        self.pools.get(&tag).map(Vec::as_slice).unwrap_or(&[])
    }

    /// All images of the joint assignments of `attrs`, quantified over the
    /// occurring constants. Yields `(constants in attr order, image)`.
    fn assignments_over(&self, attrs: AttrSet) -> Vec<(Vec<Constant>, IdSet)> {
        let mut acc: Vec<(Vec<Constant>, Option<IdSet>)> = vec![(Vec::new(), None)];
        for a in attrs.iter() {
            let pool = self.pool(self.universe.tag_of(a)).to_vec();
            let mut next = Vec::with_capacity(acc.len() * pool.len().max(1));
            for (combo, img) in &acc {
                for c in &pool {
                    let cimg = self.image(c);
                    let joined: IdSet = match img {
                        None => cimg.clone(),
                        Some(prev) => prev.intersection(cimg).cloned().collect(),
                    };
                    let mut combo = combo.clone();
                    combo.push(c.clone());
                    next.push((combo, Some(joined)));
                }
            }
            acc = next;
        }
        acc.into_iter()
            .map(|(combo, img)| (combo, img.unwrap_or_default()))
            .collect()
    }

    /// Dependency satisfaction: for every `x` over the left-hand side and
    /// every right-hand value `a`, a nonempty joint image forces
    /// `image(x) ⊆ image(a)`.
    pub fn satisfies_fd(&self, fd: &Fd) -> bool {
        let rhs_pool = self.pool(self.universe.tag_of(fd.rhs()));
        for (_, img_x) in self.assignments_over(fd.lhs()) {
            if img_x.is_empty() {
                continue;
            }
            for a in rhs_pool {
                let img_a = self.image(a);
                if img_x.intersection(img_a).next().is_some() && !img_x.is_subset(img_a) {
                    return false;
                }
            }
        }
        true
    }

    /// Satisfaction of a whole pair: every row has a nonempty image and
    /// every dependency holds.
    pub fn satisfies_delta(&self, delta: &Delta) -> bool {
        delta
            .table()
            .iter()
            .all(|t| !self.image_of_tuple(t).is_empty())
            && delta.fds().iter().all(|fd| self.satisfies_fd(fd))
    }

    /// The partition constraint: distinct constants of one domain have
    /// disjoint images.
    pub fn is_interpretation(&self) -> bool {
        for pool in self.pools.values() {
            for (i, a) in pool.iter().enumerate() {
                let img_a = self.image(a);
                for b in &pool[i + 1..] {
                    if img_a.intersection(self.image(b)).next().is_some() {
                        return false;
                    }
                }
            }
        }
        true
    }
}

/// The least satisfying mapping of a pair: identifier sets of the rows,
/// widened under the dependencies to a fixpoint.
///
/// Identifiers are the canonical row positions; they stay internal. The
/// fixpoint is unique, so the processing order does not matter.
pub fn mu_star(delta: &Delta) -> TMapping {
    let mut mu = TMapping::new(Arc::clone(delta.universe()));
    for (id, row) in delta.table().iter().enumerate() {
        for c in row.constants() {
            mu.insert_id(c, id as u32);
        }
    }
    mu.sort_pools();
    loop {
        let mut changed = false;
        for fd in delta.fds() {
            let rhs_tag = mu.universe.tag_of(fd.rhs());
            let assignments = mu.assignments_over(fd.lhs());
            let rhs_pool: Vec<Constant> = mu.pool(rhs_tag).to_vec();
            for (_, img_x) in &assignments {
                if img_x.is_empty() {
                    continue;
                }
                for a in &rhs_pool {
                    let widened: Option<IdSet> = {
                        let img_a = mu.image(a);
                        if img_x.intersection(img_a).next().is_some() && !img_x.is_subset(img_a) {
                            Some(img_a.union(img_x).cloned().collect())
                        } else {
                            None
                        }
                    };
                    if let Some(widened) = widened {
                        mu.images.insert(a.clone(), widened);
                        changed = true;
                    }
                }
            }
        }
        if !changed {
            return mu;
        }
    }
}

/// Derivability: `t` follows from the pair under every satisfying mapping.
/// Decided through the chased table's lower closure.
pub fn derives(delta: &Delta, t: &Tuple) -> bool {
    chase(delta).derivable(t)
}

/// Joint derivability of two tuples: their `mu_star` images intersect.
pub fn derives_meet(delta: &Delta, t1: &Tuple, t2: &Tuple) -> bool {
    let mu = mu_star(delta);
    mu.image_of_tuple(t1)
        .intersection(&mu.image_of_tuple(t2))
        .next()
        .is_some()
}

/// The closure of a tuple: every constant whose image must contain the
/// tuple's image under each satisfying mapping.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TupleClosure {
    pub base: Tuple,
    pub constants: BTreeSet<Constant>,
}

impl TupleClosure {
    /// Two distinct constants of one domain in the closure witness that the
    /// base tuple cannot hold in any interpretation.
    pub fn conflicting_pair(&self) -> Option<(&Constant, &Constant)> {
        let mut prev: Option<&Constant> = None;
        for c in &self.constants {
            if let Some(p) = prev {
                if p.tag() == c.tag() {
                    return Some((p, c));
                }
            }
            prev = Some(c);
        }
        None
    }
}

/// Computes the closure of `t`: the table is extended with `t`, chased once,
/// and the closure saturates from the constants of `t` by following the
/// dependencies through lower-closure membership tests.
pub fn tuple_closure(delta: &Delta, t: &Tuple) -> TupleClosure {
    let extended = delta.with_row(t.clone());
    let chased = chase(&extended);
    let constants = closure_against(chased.dstar(), delta.universe(), delta.fds(), t);
    TupleClosure {
        base: t.clone(),
        constants,
    }
}

/// Closure saturation against an already-saturated table. Sound whenever
/// `saturated` derives at least as much as the table extended with `t`;
/// in particular when `t` is already derivable.
pub(crate) fn closure_against(
    saturated: &Table,
    u: &Universe,
    fds: &[Fd],
    t: &Tuple,
) -> BTreeSet<Constant> {
    let mut closure: BTreeSet<Constant> = t.constants().cloned().collect();
    // candidate right-hand values, grouped by domain
    let mut by_tag: BTreeMap<DomainTag, BTreeSet<Constant>> = BTreeMap::new();
    for row in saturated.iter() {
        for c in row.constants() {
            by_tag.entry(c.tag()).or_default().insert(c.clone());
        }
    }
    loop {
        let mut changed = false;
        for fd in fds {
            let lhs_attrs: Vec<AttrId> = fd.lhs().iter().collect();
            let pools: Vec<Vec<Constant>> = lhs_attrs
                .iter()
                .map(|a| {
                    closure
                        .iter()
                        .filter(|c| c.tag() == u.tag_of(*a))
                        .cloned()
                        .collect()
                })
                .collect();
            if pools.iter().any(Vec::is_empty) {
                continue;
            }
            let rhs_candidates: Vec<Constant> = by_tag
                .get(&u.tag_of(fd.rhs()))
                .map(|s| s.iter().filter(|c| !closure.contains(*c)).cloned().collect())
                .unwrap_or_default();
            if rhs_candidates.is_empty() {
                continue;
            }
            // all assignments of closure constants to the left-hand side
            let mut combos: Vec<Vec<Constant>> = vec![Vec::new()];
            for pool in &pools {
                let mut next = Vec::with_capacity(combos.len() * pool.len());
                for combo in &combos {
                    for c in pool {
                        let mut combo = combo.clone();
                        combo.push(c.clone());
                        next.push(combo);
                    }
                }
                combos = next;
            }
            for combo in &combos {
                for a in &rhs_candidates {
                    if closure.contains(a) {
                        continue;
                    }
                    let mut cells: Vec<Option<Constant>> = vec![None; u.len()];
                    for (attr, c) in lhs_attrs.iter().zip(combo.iter()) {
                        cells[attr.0] = Some(c.clone());
                    }
                    cells[fd.rhs().0] = Some(a.clone());
                    let xa = Tuple::from_cells(cells.into_boxed_slice());
                    if saturated.in_lower_closure(&xa) {
                        closure.insert(a.clone());
                        changed = true;
                    }
                }
            }
        }
        if !changed {
            return closure;
        }
    }
}

/// Potential falsity: the closure of `t` holds two distinct constants of one
/// domain.
pub fn pot_false(delta: &Delta, t: &Tuple) -> bool {
    tuple_closure(delta, t).conflicting_pair().is_some()
}

/// The closure of an attribute set under a dependency set.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SchemeClosure {
    pub base: AttrSet,
    pub attrs: AttrSet,
}

/// Saturates `x` by adding each right-hand attribute whose left-hand side is
/// already covered.
pub fn scheme_closure(fds: &[Fd], x: AttrSet) -> SchemeClosure {
    debug_assert!(!x.is_empty());
    let mut acc = x;
    loop {
        let mut changed = false;
        for fd in fds {
            if fd.lhs().is_subset(&acc) && !acc.contains(fd.rhs()) {
                acc.insert(fd.rhs());
                changed = true;
            }
        }
        if !changed {
            return SchemeClosure { base: x, attrs: acc };
        }
    }
}

/// [`tuple_closure`] evaluated against an existing chase result. A tuple
/// already derivable reuses the saturation directly; anything else
/// re-chases with the tuple added, as the plain closure does.
pub fn tuple_closure_in(result: &ChaseResult, t: &Tuple) -> TupleClosure {
    if result.derivable(t) {
        TupleClosure {
            base: t.clone(),
            constants: closure_against(result.dstar(), result.universe(), result.fds(), t),
        }
    } else {
        tuple_closure(&result.as_delta(), t)
    }
}
