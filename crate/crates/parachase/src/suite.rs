//! Seeded property checks cross-validating the engine against the
//! brute-force oracle on random instances.
//!
//! Every check is deterministic in the base seed. Disagreements between the
//! choice-generated repairs and the exhaustive maximal-subset repairs are
//! collected as a discrepancy report instead of failing: the choice
//! procedure is not guaranteed to produce maximal sets when dependencies
//! interact, and the report is the evidence channel for that.

use std::collections::{BTreeMap, BTreeSet};
use std::time::{Duration, Instant};

use rand::prelude::*;
use rand_chacha::ChaCha8Rng;

use crate::chase::{chase, ChaseResult};
use crate::classify::{inc_set, truth_value, TruthValue};
use crate::fourlogic::{knowledge_le, merged_truth_report, SourceSet};
use crate::model::{AttrSet, Constant, Delta, Fd, Table, Tuple, Universe};
use crate::oracle::{
    all_tuples_over, answers_from_repairs, generate_instance, repairs_brute_capped,
    truth_value_def, truth_value_def_with, value_pools, RandomInstanceSpec,
};
use crate::query::{
    choice_product, consistent_answer, repair_answers, repairs_by_choice, Condition, Query,
};
use crate::semantics::{mu_star, scheme_closure, tuple_closure_in};

pub const CHECK_NAMES: [&str; 8] = [
    "derivability",   // lower closure of the saturated table == nonempty fixpoint image
    "consistency",    // empty inconsistent set <=> fixpoint is an interpretation
    "truth-values",   // per-tuple classification == definition-level oracle
    "falsity",        // false <=> not derivable and inconsistent once added
    "closures",       // constant closure <=> attribute-set closure, and monotone
    "answers",        // lower/upper/consistent chain and brute-repair agreement
    "merging",        // per-source knowledge join stays below the merged value
    "determinism",    // chase output invariant under input permutations
];

#[derive(Debug, Clone)]
pub struct SuiteConfig {
    pub instances: usize,
    pub base_seed: u64,
    /// Random queries evaluated per instance.
    pub queries_per_instance: usize,
    /// Skip the exhaustive repair comparison beyond this many saturated rows.
    pub brute_rows_max: usize,
    /// Probes sampled for the merge check.
    pub merge_probes: usize,
    /// Input permutations compared per instance.
    pub permutations: usize,
    /// Cap on stored failure/discrepancy lines (counters keep counting).
    pub max_reported: usize,
}

impl Default for SuiteConfig {
    fn default() -> SuiteConfig {
        SuiteConfig {
            instances: 1000,
            base_seed: 0xA11CE,
            queries_per_instance: 3,
            brute_rows_max: 15,
            merge_probes: 24,
            permutations: 5,
            max_reported: 25,
        }
    }
}

#[derive(Debug, Clone, Default)]
pub struct CheckStats {
    pub assertions: u64,
    pub failure_count: u64,
    pub failures: Vec<String>,
}

#[derive(Debug, Clone)]
pub struct SuiteReport {
    pub instances: usize,
    pub elapsed: Duration,
    pub checks: BTreeMap<&'static str, CheckStats>,
    pub discrepancy_count: u64,
    pub discrepancies: Vec<String>,
}

impl SuiteReport {
    pub fn total_failures(&self) -> u64 {
        self.checks.values().map(|c| c.failure_count).sum()
    }

    pub fn passed(&self) -> bool {
        self.total_failures() == 0
    }

    pub fn summary_lines(&self) -> Vec<String> {
        let mut lines = Vec::new();
        for name in CHECK_NAMES {
            let stats = &self.checks[name];
            lines.push(format!(
                "{name}: {} assertions, {} failures -> {}",
                stats.assertions,
                stats.failure_count,
                if stats.failure_count == 0 { "PASS" } else { "FAIL" }
            ));
        }
        lines.push(format!(
            "choice-vs-brute repair discrepancies (reported, not failing): {}",
            self.discrepancy_count
        ));
        lines.push(format!(
            "{} instances in {:.1}s -> {}",
            self.instances,
            self.elapsed.as_secs_f64(),
            if self.passed() { "PASS" } else { "FAIL" }
        ));
        lines
    }
}

struct Recorder {
    cfg_max: usize,
    checks: BTreeMap<&'static str, CheckStats>,
    discrepancy_count: u64,
    discrepancies: Vec<String>,
}

impl Recorder {
    fn new(max_reported: usize) -> Recorder {
        let mut checks = BTreeMap::new();
        for name in CHECK_NAMES {
            checks.insert(name, CheckStats::default());
        }
        Recorder {
            cfg_max: max_reported,
            checks,
            discrepancy_count: 0,
            discrepancies: Vec::new(),
        }
    }

    fn assert(&mut self, check: &'static str, seed: u64, ok: bool, detail: impl Fn() -> String) {
        let stats = self.checks.get_mut(check).expect("known check");
        stats.assertions += 1;
        if !ok {
            stats.failure_count += 1;
            if stats.failures.len() < self.cfg_max {
                stats.failures.push(format!("seed={seed}: {}", detail()));
            }
        }
    }

    fn discrepancy(&mut self, seed: u64, detail: String) {
        self.discrepancy_count += 1;
        if self.discrepancies.len() < self.cfg_max {
            self.discrepancies.push(format!("seed={seed}: {detail}"));
        }
    }
}

fn instance_spec(cfg: &SuiteConfig, i: usize) -> RandomInstanceSpec {
    RandomInstanceSpec {
        max_attrs: 2 + i % 3,
        max_domain: 2 + (i / 3) % 2,
        max_rows: 6,
        max_fds: 3,
        null_prob: [0.0, 0.15, 0.35, 0.6][i % 4],
        seed: cfg.base_seed.wrapping_add(i as u64),
    }
}

/// Runs every check over `cfg.instances` random instances.
pub fn run_property_suite(cfg: &SuiteConfig) -> SuiteReport {
    let start = Instant::now();
    let mut rec = Recorder::new(cfg.max_reported);
    for i in 0..cfg.instances {
        let spec = instance_spec(cfg, i);
        let seed = spec.seed;
        let delta = generate_instance(&spec).expect("bounded spec");
        let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x5EED_CAFE);
        run_instance(cfg, &mut rec, seed, &spec, &delta, &mut rng);
    }
    SuiteReport {
        instances: cfg.instances,
        elapsed: start.elapsed(),
        checks: rec.checks,
        discrepancy_count: rec.discrepancy_count,
        discrepancies: rec.discrepancies,
    }
}

fn run_instance(
    cfg: &SuiteConfig,
    rec: &mut Recorder,
    seed: u64,
    spec: &RandomInstanceSpec,
    delta: &Delta,
    rng: &mut ChaCha8Rng,
) {
    let u = delta.universe().clone();
    let result = chase(delta);
    let incs = inc_set(&result);
    let mu = mu_star(delta);
    let pools = value_pools(spec, &u);
    let candidates = all_tuples_over(&u, &pools);

    // Saturation must terminate within the constant-count bound.
    let constants: usize = pools.iter().map(Vec::len).sum();
    let bound = (constants as u64).saturating_pow(u.len() as u32).max(1);
    rec.assert(
        "determinism",
        seed,
        (result.stats().passes as u64) <= bound,
        || format!("passes {} above bound {bound}", result.stats().passes),
    );

    // derivability: lower closure == nonempty fixpoint image, on every candidate
    for t in &candidates {
        let via_chase = result.derivable(t);
        let via_mu = !mu.image_of_tuple(t).is_empty();
        rec.assert("derivability", seed, via_chase == via_mu, || {
            format!(
                "{}: chase {via_chase} vs fixpoint {via_mu}",
                t.display(&u)
            )
        });
    }
    // the fixpoint is insensitive to dependency order
    let mut rev = delta.fds().to_vec();
    rev.reverse();
    let mu_rev = mu_star(&Delta::new(u.clone(), delta.table().clone(), rev));
    for pool in pools.iter() {
        for c in pool {
            rec.assert("derivability", seed, mu.image(c) == mu_rev.image(c), || {
                format!("fixpoint image of {c} depends on dependency order")
            });
        }
    }

    // truth values: classification == definition oracle, every candidate
    let mut oracle_values: BTreeMap<&Tuple, TruthValue> = BTreeMap::new();
    for t in &candidates {
        let algo = truth_value(t, &result, &incs);
        let def = truth_value_def_with(&mu, delta, t);
        oracle_values.insert(t, def);
        rec.assert("truth-values", seed, algo == def, || {
            format!("{}: algorithm {algo} vs definition {def}", t.display(&u))
        });
    }
    // true tuples are exactly the derivable ones outside the inconsistent set
    for t in &candidates {
        let is_true = oracle_values[t] == TruthValue::True;
        let characterized = result.derivable(t) && !incs.contains(t);
        rec.assert("truth-values", seed, is_true == characterized, || {
            format!("{}: true-set characterization differs", t.display(&u))
        });
    }

    // consistency: empty inconsistent set <=> interpretation <=> no inc value
    let no_inc_value = oracle_values.values().all(|v| *v != TruthValue::Inc);
    let as_interp = mu.is_interpretation();
    rec.assert(
        "consistency",
        seed,
        (incs.is_empty() == as_interp) && (incs.is_empty() == no_inc_value),
        || {
            format!(
                "inc-set empty {} / interpretation {as_interp} / no inc value {no_inc_value}",
                incs.is_empty()
            )
        },
    );

    // falsity: false <=> not derivable and inconsistent once added (sampled)
    let mut nonderivable: Vec<&Tuple> = candidates
        .iter()
        .filter(|t| !result.derivable(t))
        .collect();
    nonderivable.shuffle(rng);
    for t in nonderivable.into_iter().take(40) {
        let is_false = oracle_values[t] == TruthValue::False;
        let extended = delta.with_row((*t).clone());
        let inc_when_added = truth_value_def(&extended, t) == TruthValue::Inc;
        rec.assert("falsity", seed, is_false == inc_when_added, || {
            format!(
                "{}: false {is_false} vs inc-when-added {inc_when_added}",
                t.display(&u)
            )
        });
    }

    check_closures(rec, seed, &u, &result);
    check_answers(cfg, rec, seed, &u, delta, &result, rng);
    check_merging(cfg, rec, seed, &u, delta, &candidates, rng);
    check_determinism(cfg, rec, seed, delta, &result, rng);
}

// constant-level closures against attribute-level closures.
//
// The forward direction always holds (over disjoint domains): a constant in
// the closure of `q` puts its attribute into the attribute closure of `Q`.
// The converse needs the carrier row to be defined on the whole attribute
// closure, otherwise the value chain can break on an attribute that has no
// value anywhere; so the equivalence is only asserted for such rows.
// Closures are also monotone along the sub-tuple order.
fn check_closures(rec: &mut Recorder, seed: u64, u: &Universe, result: &ChaseResult) {
    let fds = result.fds();
    let mut cache: BTreeMap<Tuple, BTreeSet<Constant>> = BTreeMap::new();
    let mut closure_of = |q: &Tuple| -> BTreeSet<Constant> {
        if let Some(hit) = cache.get(q) {
            return hit.clone();
        }
        let computed = tuple_closure_in(result, q).constants;
        cache.insert(q.clone(), computed.clone());
        computed
    };
    for t in result.dstar().iter() {
        let t_closure = closure_of(t);
        for q_schema in t.schema().nonempty_subsets() {
            let q = t.project_unchecked(q_schema);
            let q_closure = closure_of(&q);
            rec.assert(
                "closures",
                seed,
                q_closure.is_subset(&t_closure),
                || {
                    format!(
                        "closure of {} not within closure of {}",
                        q.display(u),
                        t.display(u)
                    )
                },
            );
            let qplus = scheme_closure(fds, q_schema).attrs;
            let chain_defined = qplus.is_subset(&t.schema());
            for (attr, c) in t.bindings() {
                let in_tuple_closure = q_closure.contains(c);
                let in_scheme_closure = qplus.contains(attr);
                let ok = if chain_defined {
                    in_tuple_closure == in_scheme_closure
                } else {
                    !in_tuple_closure || in_scheme_closure
                };
                rec.assert("closures", seed, ok, || {
                    format!(
                        "{}: constant {c} in closure of {}: {in_tuple_closure}, \
                         attribute in scheme closure: {in_scheme_closure} \
                         (chain defined: {chain_defined})",
                        t.display(u),
                        q.display(u)
                    )
                });
            }
        }
    }
}

fn random_query(u: &Universe, pools: &[Vec<Constant>], rng: &mut ChaCha8Rng) -> Query {
    let n = u.len();
    let mut select = AttrSet::EMPTY;
    for a in u.attr_ids() {
        if rng.gen_bool(0.5) {
            select.insert(a);
        }
    }
    if select.is_empty() {
        select.insert(crate::model::AttrId(rng.gen_range(0..n)));
    }
    let atom = |rng: &mut ChaCha8Rng| -> Condition {
        let a = crate::model::AttrId(rng.gen_range(0..n));
        let v = &pools[a.0][rng.gen_range(0..pools[a.0].len())];
        Condition::CmpConst(a, crate::query::CmpOp::Eq, v.clone())
    };
    let condition = match rng.gen_range(0..5) {
        0 | 1 => None,
        2 => Some(atom(rng)),
        3 => Some(Condition::Not(Box::new(atom(rng)))),
        _ => {
            let l = Box::new(atom(rng));
            let r = Box::new(atom(rng));
            if rng.gen_bool(0.5) {
                Some(Condition::And(l, r))
            } else {
                Some(Condition::Or(l, r))
            }
        }
    };
    Query { select, condition }
}

fn check_answers(
    cfg: &SuiteConfig,
    rec: &mut Recorder,
    seed: u64,
    u: &Universe,
    delta: &Delta,
    result: &ChaseResult,
    rng: &mut ChaCha8Rng,
) {
    let pools = value_pools(
        &RandomInstanceSpec {
            max_domain: 3,
            ..RandomInstanceSpec::default()
        },
        u,
    );
    let brute = if result.dstar().len() <= cfg.brute_rows_max {
        Some(repairs_brute_capped(result, cfg.brute_rows_max).expect("guarded"))
    } else {
        None
    };
    let choice = if choice_product(result) <= 64 {
        Some(repairs_by_choice(result))
    } else {
        None
    };
    if let (Some(brute), Some(choice)) = (&brute, &choice) {
        let choice_set: BTreeSet<Table> = choice.iter().map(|r| r.rows.clone()).collect();
        let brute_set: BTreeSet<Table> = brute.iter().map(|r| r.rows.clone()).collect();
        if choice_set != brute_set {
            rec.discrepancy(
                seed,
                format!(
                    "choice procedure yields {} repair(s), subset search {} \
                     (fds: {})",
                    choice_set.len(),
                    brute_set.len(),
                    delta
                        .fds()
                        .iter()
                        .map(|fd| fd.display(u).to_string())
                        .collect::<Vec<_>>()
                        .join("; ")
                ),
            );
        }
    }
    for _ in 0..cfg.queries_per_instance {
        let q = random_query(u, &pools, rng);
        let plus = consistent_answer(&q, result).expect("typed query");
        let (lower, upper) = repair_answers(&q, result).expect("typed query");
        rec.assert(
            "answers",
            seed,
            lower.rows.is_subset(&upper.rows) && upper.rows.is_subset(&plus.rows),
            || {
                format!(
                    "chain broken for SELECT {}: |lower|={} |upper|={} |consistent|={}",
                    q.select.display(u),
                    lower.len(),
                    upper.len(),
                    plus.len()
                )
            },
        );

        // the consistent answer equals the plain answer filtered by truth
        // in the pair projected onto the selected attributes
        let projected: Table = result
            .dstar()
            .iter()
            .filter(|t| q.select.is_subset(&t.schema()))
            .map(|t| t.project_unchecked(q.select))
            .collect();
        let projected_fds: Vec<Fd> = result
            .fds()
            .iter()
            .filter(|fd| fd.attrs().is_subset(&q.select))
            .copied()
            .collect();
        let chased_x = chase(&Delta::new(
            delta.universe().clone(),
            projected,
            projected_fds,
        ));
        let incs_x = inc_set(&chased_x);
        let via_projection: BTreeSet<Tuple> = crate::query::plain_answer(&q, result)
            .expect("typed query")
            .rows
            .into_iter()
            .filter(|x| truth_value(x, &chased_x, &incs_x) == TruthValue::True)
            .collect();
        rec.assert("answers", seed, plus.rows == via_projection, || {
            format!(
                "consistent answer differs from the projected-pair route \
                 for SELECT {}",
                q.select.display(u)
            )
        });

        // lower answers agree with both repair enumerations; upper answers
        // can diverge when conflicts interact, which goes to the report
        for (name, reps) in [("subset search", &brute), ("choice procedure", &choice)] {
            let Some(reps) = reps else { continue };
            let (def_lower, def_upper) = answers_from_repairs(u, &q, reps).expect("typed query");
            rec.assert("answers", seed, lower.rows == def_lower, || {
                format!(
                    "lower answer differs from the {name} intersection \
                     for SELECT {}",
                    q.select.display(u)
                )
            });
            if upper.rows != def_upper {
                rec.discrepancy(
                    seed,
                    format!(
                        "upper answer for SELECT {} has {} tuple(s), \
                         per-repair intersection ({name}) {}",
                        q.select.display(u),
                        upper.rows.len(),
                        def_upper.len()
                    ),
                );
            }
        }
    }
}

fn check_merging(
    cfg: &SuiteConfig,
    rec: &mut Recorder,
    seed: u64,
    u: &Universe,
    delta: &Delta,
    candidates: &[Tuple],
    rng: &mut ChaCha8Rng,
) {
    // random 2-way covering split of rows and dependencies
    let mut t1 = Table::new();
    let mut t2 = Table::new();
    for row in delta.table().iter() {
        match rng.gen_range(0..3) {
            0 => {
                t1.insert(row.clone());
            }
            1 => {
                t2.insert(row.clone());
            }
            _ => {
                t1.insert(row.clone());
                t2.insert(row.clone());
            }
        }
    }
    let mut f1: Vec<Fd> = Vec::new();
    let mut f2: Vec<Fd> = Vec::new();
    for fd in delta.fds() {
        match rng.gen_range(0..3) {
            0 => f1.push(*fd),
            1 => f2.push(*fd),
            _ => {
                f1.push(*fd);
                f2.push(*fd);
            }
        }
    }
    let d1 = Delta::new(delta.universe().clone(), t1, f1);
    let d2 = Delta::new(delta.universe().clone(), t2, f2);
    let sources = SourceSet::new(vec![d1, d2]).expect("same universe");
    let mut probe_pool: Vec<&Tuple> = candidates.iter().collect();
    probe_pool.shuffle(rng);
    let probes: BTreeSet<Tuple> = probe_pool
        .into_iter()
        .take(cfg.merge_probes)
        .cloned()
        .collect();
    match merged_truth_report(&sources, &probes) {
        Err(e) => rec.assert("merging", seed, false, || e.to_string()),
        Ok(reports) => {
            for r in reports {
                rec.assert(
                    "merging",
                    seed,
                    knowledge_le(r.fold, r.merged) && (r.equal == (r.fold == r.merged)),
                    || {
                        format!(
                            "{}: fold {} vs merged {}",
                            r.probe.display(u),
                            r.fold,
                            r.merged
                        )
                    },
                );
            }
        }
    }
}

fn check_determinism(
    cfg: &SuiteConfig,
    rec: &mut Recorder,
    seed: u64,
    delta: &Delta,
    result: &ChaseResult,
    rng: &mut ChaCha8Rng,
) {
    let base_inc: BTreeMap<Fd, BTreeSet<Tuple>> = delta
        .fds()
        .iter()
        .map(|fd| (*fd, result.inc().get(fd).clone()))
        .collect();
    for _ in 0..cfg.permutations {
        let mut rows: Vec<Tuple> = delta.table().iter().cloned().collect();
        rows.shuffle(rng);
        let mut fds = delta.fds().to_vec();
        fds.shuffle(rng);
        let permuted = Delta::new(
            delta.universe().clone(),
            rows.into_iter().collect(),
            fds,
        );
        let re = chase(&permuted);
        let re_inc: BTreeMap<Fd, BTreeSet<Tuple>> = delta
            .fds()
            .iter()
            .map(|fd| (*fd, re.inc().get(fd).clone()))
            .collect();
        rec.assert(
            "determinism",
            seed,
            re.dstar() == result.dstar() && re_inc == base_inc,
            || "saturation output changed under an input permutation".to_string(),
        );
    }
}
