//! Brute-force reference implementations for property checks.
//!
//! Everything here deliberately avoids the saturation engine: derivability
//! and closures go through the `mu_star` fixpoint, and repairs come from
//! exhaustive subset search. The bounds of [`RandomInstanceSpec`] keep the
//! exponential paths feasible.

use std::collections::BTreeSet;
use std::sync::Arc;

use rand::prelude::*;
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::chase::ChaseResult;
use crate::classify::TruthValue;
use crate::model::{AttrId, AttrSet, Constant, Delta, Fd, Table, Tuple, Universe};
use crate::query::{eval_condition, Query, QueryError, Repair};
use crate::semantics::mu_star;

/// Subset search is quadratic in `2^rows`; refuse beyond this.
pub const BRUTE_MAX_ROWS: usize = 20;

#[derive(Debug, Error)]
pub enum OracleError {
    #[error("instance bounds out of range: {0}")]
    BadBounds(String),
    #[error("saturated table has {rows} rows; subset search is capped at {cap}")]
    BruteGuardExceeded { rows: usize, cap: usize },
    #[error(transparent)]
    Query(#[from] QueryError),
}

/// Bounds and seed for reproducible random instances. The caps keep every
/// brute-force path (tuple enumeration, subset search) small.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RandomInstanceSpec {
    pub max_attrs: usize,
    pub max_domain: usize,
    pub max_rows: usize,
    pub max_fds: usize,
    pub null_prob: f64,
    pub seed: u64,
}

impl RandomInstanceSpec {
    pub fn validate(&self) -> Result<(), OracleError> {
        let bad = |msg: String| Err(OracleError::BadBounds(msg));
        if !(1..=4).contains(&self.max_attrs) {
            return bad(format!("max_attrs {} not in 1..=4", self.max_attrs));
        }
        if !(1..=3).contains(&self.max_domain) {
            return bad(format!("max_domain {} not in 1..=3", self.max_domain));
        }
        if !(1..=6).contains(&self.max_rows) {
            return bad(format!("max_rows {} not in 1..=6", self.max_rows));
        }
        if self.max_fds > 3 {
            return bad(format!("max_fds {} not in 0..=3", self.max_fds));
        }
        if !(0.0..=1.0).contains(&self.null_prob) {
            return bad(format!("null_prob {} not in 0..=1", self.null_prob));
        }
        Ok(())
    }
}

impl Default for RandomInstanceSpec {
    fn default() -> Self {
        RandomInstanceSpec {
            max_attrs: 4,
            max_domain: 3,
            max_rows: 6,
            max_fds: 3,
            null_prob: 0.3,
            seed: 0,
        }
    }
}

/// The value pools a generated instance draws from: `max_domain` constants
/// per attribute, one domain per attribute.
pub fn value_pools(spec: &RandomInstanceSpec, u: &Universe) -> Vec<Vec<Constant>> {
    u.attr_ids()
        .map(|a| {
            (0..spec.max_domain)
                .map(|v| u.constant(a, format!("x{v}")))
                .collect()
        })
        .collect()
}

/// Generates a reproducible random pair: `max_attrs` attributes over
/// disjoint domains, up to `max_rows` rows with nulls at `null_prob`, and up
/// to `max_fds` distinct dependencies.
pub fn generate_instance(spec: &RandomInstanceSpec) -> Result<Delta, OracleError> {
    spec.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let decls: Vec<(String, String, bool)> = (0..spec.max_attrs)
        .map(|i| (format!("A{i}"), format!("d{i}"), false))
        .collect();
    let refs: Vec<(&str, &str, bool)> = decls
        .iter()
        .map(|(n, t, o)| (n.as_str(), t.as_str(), *o))
        .collect();
    let u = Arc::new(Universe::new(&refs).expect("bounded universe"));
    let pools = value_pools(spec, &u);

    let n_rows = rng.gen_range(1..=spec.max_rows);
    let mut table = Table::new();
    for _ in 0..n_rows {
        let mut bindings = Vec::new();
        for a in u.attr_ids() {
            if rng.gen_bool(1.0 - spec.null_prob) {
                bindings.push((a, pools[a.0][rng.gen_range(0..spec.max_domain)].clone()));
            }
        }
        if bindings.is_empty() {
            let a = AttrId(rng.gen_range(0..spec.max_attrs));
            bindings.push((a, pools[a.0][rng.gen_range(0..spec.max_domain)].clone()));
        }
        table.insert(Tuple::new(&u, bindings).expect("generated tuple"));
    }

    let mut fds: Vec<Fd> = Vec::new();
    if spec.max_attrs >= 2 {
        let n_fds = rng.gen_range(0..=spec.max_fds);
        for _ in 0..n_fds {
            for _attempt in 0..8 {
                let rhs = AttrId(rng.gen_range(0..spec.max_attrs));
                let lhs_size = rng.gen_range(1..=(spec.max_attrs - 1).min(2));
                let mut lhs = AttrSet::EMPTY;
                while lhs.len() < lhs_size {
                    let a = AttrId(rng.gen_range(0..spec.max_attrs));
                    if a != rhs {
                        lhs.insert(a);
                    }
                }
                let fd = Fd::new(&u, lhs, rhs).expect("generated dependency");
                if !fds.contains(&fd) {
                    fds.push(fd);
                    break;
                }
            }
        }
    }
    Ok(Delta::new(u, table, fds))
}

/// Every tuple (any nonempty partial assignment) over the given pools, in
/// canonical order.
pub fn all_tuples_over(u: &Universe, pools: &[Vec<Constant>]) -> Vec<Tuple> {
    let mut cells_acc: Vec<Vec<Option<Constant>>> = vec![Vec::new()];
    for a in u.attr_ids() {
        let mut next = Vec::with_capacity(cells_acc.len() * (pools[a.0].len() + 1));
        for cells in &cells_acc {
            let mut with_none = cells.clone();
            with_none.push(None);
            next.push(with_none);
            for v in &pools[a.0] {
                let mut with_v = cells.clone();
                with_v.push(Some(v.clone()));
                next.push(with_v);
            }
        }
        cells_acc = next;
    }
    let mut out: Vec<Tuple> = cells_acc
        .into_iter()
        .filter(|cells| cells.iter().any(Option::is_some))
        .map(|cells| Tuple::from_cells(cells.into_boxed_slice()))
        .collect();
    out.sort();
    out
}

/// Derivability through the fixpoint route only.
pub fn derives_mu(delta: &Delta, t: &Tuple) -> bool {
    !mu_star(delta).image_of_tuple(t).is_empty()
}

/// Closure of `t` computed with fixpoint derivability tests on the pair
/// extended with `t`; shares nothing with the saturation engine.
pub fn closure_by_mu(delta: &Delta, t: &Tuple) -> BTreeSet<Constant> {
    let u = delta.universe();
    let extended = delta.with_row(t.clone());
    let mu = mu_star(&extended);
    let mut closure: BTreeSet<Constant> = t.constants().cloned().collect();
    loop {
        let mut changed = false;
        for fd in delta.fds() {
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
            let rhs_pool: Vec<Constant> = mu.pool(u.tag_of(fd.rhs())).to_vec();
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
                let mut img: Option<BTreeSet<u32>> = None;
                for c in combo {
                    let ci = mu.image(c);
                    img = Some(match img {
                        None => ci.clone(),
                        Some(prev) => prev.intersection(ci).cloned().collect(),
                    });
                }
                let img_x = img.unwrap_or_default();
                for a in &rhs_pool {
                    if closure.contains(a) {
                        continue;
                    }
                    // derivable jointly with the left-hand assignment
                    if img_x.intersection(mu.image(a)).next().is_some() {
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

fn has_same_domain_pair(constants: &BTreeSet<Constant>) -> bool {
    let mut prev: Option<&Constant> = None;
    for c in constants {
        if let Some(p) = prev {
            if p.tag() == c.tag() {
                return true;
            }
        }
        prev = Some(c);
    }
    false
}

/// The truth value straight from the definition: derivable iff the fixpoint
/// image is nonempty, potentially false iff the closure holds two constants
/// of one domain.
pub fn truth_value_def(delta: &Delta, t: &Tuple) -> TruthValue {
    truth_value_def_with(&mu_star(delta), delta, t)
}

/// [`truth_value_def`] with the fixpoint of `delta` already at hand, for
/// callers probing many tuples against one pair.
pub fn truth_value_def_with(
    mu: &crate::semantics::TMapping,
    delta: &Delta,
    t: &Tuple,
) -> TruthValue {
    let derivable = !mu.image_of_tuple(t).is_empty();
    let potentially_false = has_same_domain_pair(&closure_by_mu(delta, t));
    match (derivable, potentially_false) {
        (true, false) => TruthValue::True,
        (true, true) => TruthValue::Inc,
        (false, true) => TruthValue::False,
        (false, false) => TruthValue::Unkn,
    }
}

fn relational_conflict(a: &Tuple, b: &Tuple, fds: &[Fd]) -> bool {
    fds.iter().any(|fd| {
        fd.attrs().is_subset(&a.schema())
            && fd.attrs().is_subset(&b.schema())
            && a.project_unchecked(fd.lhs()) == b.project_unchecked(fd.lhs())
            && a.get(fd.rhs()) != b.get(fd.rhs())
    })
}

/// All maximal subsets of the saturated table that satisfy every dependency
/// relationally (equal left-hand values on fully-defined rows force equal
/// right-hand values).
pub fn repairs_brute(result: &ChaseResult) -> Result<Vec<Repair>, OracleError> {
    repairs_brute_capped(result, BRUTE_MAX_ROWS)
}

pub fn repairs_brute_capped(result: &ChaseResult, cap: usize) -> Result<Vec<Repair>, OracleError> {
    let rows: Vec<&Tuple> = result.dstar().iter().collect();
    let n = rows.len();
    if n > cap.min(BRUTE_MAX_ROWS) {
        return Err(OracleError::BruteGuardExceeded {
            rows: n,
            cap: cap.min(BRUTE_MAX_ROWS),
        });
    }
    let fds = result.fds();
    let conflict: Vec<u32> = (0..n)
        .map(|i| {
            let mut mask = 0u32;
            for (j, other) in rows.iter().enumerate() {
                if i != j && relational_conflict(rows[i], other, fds) {
                    mask |= 1 << j;
                }
            }
            mask
        })
        .collect();
    let mut out = Vec::new();
    for mask in 0u32..(1u32 << n) {
        let consistent = (0..n).all(|i| mask & (1 << i) == 0 || conflict[i] & mask == 0);
        if !consistent {
            continue;
        }
        let maximal = (0..n).all(|j| mask & (1 << j) != 0 || conflict[j] & mask != 0);
        if !maximal {
            continue;
        }
        let table: Table = (0..n)
            .filter(|i| mask & (1 << i) != 0)
            .map(|i| rows[i].clone())
            .collect();
        out.push(Repair { rows: table });
    }
    Ok(out)
}

/// Definition-level repair answers: `lower` evaluates the query on the
/// intersection of all repairs, `upper` intersects the per-repair answers.
pub fn answers_from_repairs(
    u: &Universe,
    q: &Query,
    reps: &[Repair],
) -> Result<(BTreeSet<Tuple>, BTreeSet<Tuple>), OracleError> {
    if reps.is_empty() {
        return Err(OracleError::Query(QueryError::NoRepairs));
    }
    let answer_over = |table: &Table| -> Result<BTreeSet<Tuple>, OracleError> {
        let mut out = BTreeSet::new();
        for t in table.iter() {
            if !q.select.is_subset(&t.schema()) {
                continue;
            }
            if let Some(gamma) = &q.condition {
                if !eval_condition(u, t, gamma)? {
                    continue;
                }
            }
            out.insert(t.project_unchecked(q.select));
        }
        Ok(out)
    };

    let mut intersection: Table = reps[0].rows.clone();
    for rep in &reps[1..] {
        intersection = intersection
            .iter()
            .filter(|t| rep.rows.contains(t))
            .cloned()
            .collect();
    }
    let lower = answer_over(&intersection)?;

    let mut upper: Option<BTreeSet<Tuple>> = None;
    for rep in reps {
        let ans = answer_over(&rep.rows)?;
        upper = Some(match upper {
            None => ans,
            Some(prev) => prev.intersection(&ans).cloned().collect(),
        });
    }
    Ok((lower, upper.unwrap_or_default()))
}
