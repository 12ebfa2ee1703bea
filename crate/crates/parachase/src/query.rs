//! `SELECT X [WHERE condition]` queries over a chased pair, with three
//! inconsistency-aware answer semantics, plus repair generation.
//!
//! The plain answer projects every saturated row that covers the selected
//! attributes and satisfies the condition. The consistent answer keeps only
//! rows clean with respect to the dependencies whose attributes all lie in
//! the selection. The repair-based lower/upper answers keep rows clean with
//! respect to every dependency inside the row schema (lower), or only those
//! whose right-hand attribute is selected (upper); they coincide with
//! evaluating the query against the intersection of all repairs,
//! respectively intersecting the per-repair answers.
//!
//! Conditions compare attributes with quoted constants or with attributes of
//! the same domain. Evaluation is three-valued: an atom over an attribute
//! the row is not defined on is undefined rather than false, and a row
//! satisfies the condition only if it evaluates to definitely-true. Rows
//! with every mentioned attribute bound get ordinary two-valued behaviour.

use std::collections::BTreeSet;
use std::fmt;

use thiserror::Error;

use crate::chase::ChaseResult;
use crate::classify::{truth_value, IncSet, TruthValue};
use crate::model::{AttrId, AttrSet, Constant, Fd, Table, Tuple, Universe};

#[derive(Debug, Error)]
pub enum QueryError {
    #[error("query syntax: {0}")]
    Syntax(String),
    #[error("unknown attribute `{0}`")]
    UnknownAttribute(String),
    #[error("attributes `{0}` and `{1}` are not comparable (different domains)")]
    IncomparableAttributes(String, String),
    #[error("domain `{0}` is not ordered; `<`-style comparisons are not defined on it")]
    UnorderedDomain(String),
    #[error("no repairs to intersect")]
    NoRepairs,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CmpOp {
    Eq,
    Ne,
    Lt,
    Le,
    Gt,
    Ge,
}

impl CmpOp {
    pub fn is_ordered(self) -> bool {
        !matches!(self, CmpOp::Eq | CmpOp::Ne)
    }

    fn apply(self, ord: std::cmp::Ordering) -> bool {
        use std::cmp::Ordering::*;
        match self {
            CmpOp::Eq => ord == Equal,
            CmpOp::Ne => ord != Equal,
            CmpOp::Lt => ord == Less,
            CmpOp::Le => ord != Greater,
            CmpOp::Gt => ord == Greater,
            CmpOp::Ge => ord != Less,
        }
    }
}

impl fmt::Display for CmpOp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            CmpOp::Eq => "=",
            CmpOp::Ne => "!=",
            CmpOp::Lt => "<",
            CmpOp::Le => "<=",
            CmpOp::Gt => ">",
            CmpOp::Ge => ">=",
        })
    }
}

/// A selection condition over atoms `A op 'value'` and `A op B`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Condition {
    CmpConst(AttrId, CmpOp, Constant),
    CmpAttr(AttrId, CmpOp, AttrId),
    Not(Box<Condition>),
    And(Box<Condition>, Box<Condition>),
    Or(Box<Condition>, Box<Condition>),
}

impl Condition {
    /// Typed atom constructor: checks the operator against the domain.
    pub fn cmp_const(
        u: &Universe,
        attr: AttrId,
        op: CmpOp,
        value: &str,
    ) -> Result<Condition, QueryError> {
        let tag = u.tag_of(attr);
        if op.is_ordered() && !u.tag_is_ordered(tag) {
            return Err(QueryError::UnorderedDomain(u.tag_name(tag).to_string()));
        }
        Ok(Condition::CmpConst(attr, op, Constant::new(tag, value)))
    }

    /// Typed attribute-to-attribute atom: both sides must share a domain.
    pub fn cmp_attr(
        u: &Universe,
        left: AttrId,
        op: CmpOp,
        right: AttrId,
    ) -> Result<Condition, QueryError> {
        let (lt, rt) = (u.tag_of(left), u.tag_of(right));
        if lt != rt {
            return Err(QueryError::IncomparableAttributes(
                u.attr_name(left).to_string(),
                u.attr_name(right).to_string(),
            ));
        }
        if op.is_ordered() && !u.tag_is_ordered(lt) {
            return Err(QueryError::UnorderedDomain(u.tag_name(lt).to_string()));
        }
        Ok(Condition::CmpAttr(left, op, right))
    }

    /// Every attribute mentioned anywhere in the condition.
    pub fn attrs(&self) -> AttrSet {
        match self {
            Condition::CmpConst(a, _, _) => AttrSet::single(*a),
            Condition::CmpAttr(a, _, b) => AttrSet::single(*a).with(*b),
            Condition::Not(c) => c.attrs(),
            Condition::And(l, r) | Condition::Or(l, r) => l.attrs().union(&r.attrs()),
        }
    }
}

/// Three-valued evaluation result; `Undef` marks a missing attribute.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Eval {
    True,
    False,
    Undef,
}

impl Eval {
    fn not(self) -> Eval {
        match self {
            Eval::True => Eval::False,
            Eval::False => Eval::True,
            Eval::Undef => Eval::Undef,
        }
    }

    fn and(self, other: Eval) -> Eval {
        match (self, other) {
            (Eval::False, _) | (_, Eval::False) => Eval::False,
            (Eval::True, Eval::True) => Eval::True,
            _ => Eval::Undef,
        }
    }

    fn or(self, other: Eval) -> Eval {
        match (self, other) {
            (Eval::True, _) | (_, Eval::True) => Eval::True,
            (Eval::False, Eval::False) => Eval::False,
            _ => Eval::Undef,
        }
    }
}

// Ordered domains compare by value text (lexicographic). Values are opaque
// atoms; any richer ordering belongs to the caller's encoding.
fn compare(a: &Constant, b: &Constant) -> std::cmp::Ordering {
    a.value().cmp(b.value())
}

fn eval(u: &Universe, t: &Tuple, gamma: &Condition) -> Result<Eval, QueryError> {
    match gamma {
        Condition::CmpConst(attr, op, value) => Ok(match t.get(*attr) {
            None => Eval::Undef,
            Some(c) => {
                let holds = if op.is_ordered() {
                    op.apply(compare(c, value))
                } else {
                    op.apply(if c == value {
                        std::cmp::Ordering::Equal
                    } else {
                        std::cmp::Ordering::Less
                    })
                };
                if holds {
                    Eval::True
                } else {
                    Eval::False
                }
            }
        }),
        Condition::CmpAttr(left, op, right) => {
            if u.tag_of(*left) != u.tag_of(*right) {
                return Err(QueryError::IncomparableAttributes(
                    u.attr_name(*left).to_string(),
                    u.attr_name(*right).to_string(),
                ));
            }
            Ok(match (t.get(*left), t.get(*right)) {
                (Some(a), Some(b)) => {
                    let holds = if op.is_ordered() {
                        op.apply(compare(a, b))
                    } else {
                        op.apply(if a == b {
                            std::cmp::Ordering::Equal
                        } else {
                            std::cmp::Ordering::Less
                        })
                    };
                    if holds {
                        Eval::True
                    } else {
                        Eval::False
                    }
                }
                _ => Eval::Undef,
            })
        }
        Condition::Not(c) => Ok(eval(u, t, c)?.not()),
        Condition::And(l, r) => Ok(eval(u, t, l)?.and(eval(u, t, r)?)),
        Condition::Or(l, r) => Ok(eval(u, t, l)?.or(eval(u, t, r)?)),
    }
}

/// Whether `t` satisfies the condition: the three-valued evaluation comes
/// out definitely true.
pub fn eval_condition(u: &Universe, t: &Tuple, gamma: &Condition) -> Result<bool, QueryError> {
    Ok(eval(u, t, gamma)? == Eval::True)
}

/// A `SELECT X [WHERE condition]` query.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Query {
    pub select: AttrSet,
    pub condition: Option<Condition>,
}

/// The flavour an answer set was computed under.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AnswerMode {
    Plain,
    Consistent,
    Lower,
    Upper,
}

impl AnswerMode {
    pub fn as_str(self) -> &'static str {
        match self {
            AnswerMode::Plain => "plain",
            AnswerMode::Consistent => "consistent",
            AnswerMode::Lower => "lower",
            AnswerMode::Upper => "upper",
        }
    }
}

/// A set of answer tuples, all total over the selected schema.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AnswerSet {
    pub schema: AttrSet,
    pub mode: AnswerMode,
    pub rows: BTreeSet<Tuple>,
}

impl AnswerSet {
    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    /// Labels every answer tuple with its truth value in the full pair the
    /// answer was computed from.
    pub fn annotate(
        &self,
        result: &ChaseResult,
        incs: &IncSet,
    ) -> Vec<(Tuple, TruthValue)> {
        self.rows
            .iter()
            .map(|t| (t.clone(), truth_value(t, result, incs)))
            .collect()
    }
}

fn candidate_rows<'a>(
    q: &'a Query,
    result: &'a ChaseResult,
) -> impl Iterator<Item = Result<&'a Tuple, QueryError>> + 'a {
    let u = result.universe().clone();
    result.dstar().iter().filter_map(move |t| {
        if !q.select.is_subset(&t.schema()) {
            return None;
        }
        match &q.condition {
            None => Some(Ok(t)),
            Some(gamma) => match eval_condition(&u, t, gamma) {
                Ok(true) => Some(Ok(t)),
                Ok(false) => None,
                Err(e) => Some(Err(e)),
            },
        }
    })
}

/// The plain answer: projections of all saturated rows that cover the
/// selection and satisfy the condition.
pub fn plain_answer(q: &Query, result: &ChaseResult) -> Result<AnswerSet, QueryError> {
    let mut rows = BTreeSet::new();
    for t in candidate_rows(q, result) {
        rows.insert(t?.project_unchecked(q.select));
    }
    Ok(AnswerSet {
        schema: q.select,
        mode: AnswerMode::Plain,
        rows,
    })
}

/// Dependencies whose attributes all lie within `x`.
fn fds_within(fds: &[Fd], x: AttrSet) -> Vec<Fd> {
    fds.iter().filter(|fd| fd.attrs().is_subset(&x)).copied().collect()
}

fn clean_of(t: &Tuple, fds: &[Fd], result: &ChaseResult) -> bool {
    fds.iter().all(|fd| {
        !fd.attrs().is_subset(&t.schema())
            || !result
                .inc()
                .contains(fd, &t.project_unchecked(fd.lhs()))
    })
}

/// The consistent answer: plain-answer rows whose source row is clean with
/// respect to every dependency contained in the selected schema.
pub fn consistent_answer(q: &Query, result: &ChaseResult) -> Result<AnswerSet, QueryError> {
    let projected = fds_within(result.fds(), q.select);
    let mut rows = BTreeSet::new();
    for t in candidate_rows(q, result) {
        let t = t?;
        if clean_of(t, &projected, result) {
            rows.insert(t.project_unchecked(q.select));
        }
    }
    Ok(AnswerSet {
        schema: q.select,
        mode: AnswerMode::Consistent,
        rows,
    })
}

/// The repair-based answers `(lower, upper)`.
///
/// Lower keeps rows clean for every dependency inside the row schema; upper
/// relaxes to dependencies whose right-hand attribute is selected. Both are
/// contained in the consistent answer.
pub fn repair_answers(
    q: &Query,
    result: &ChaseResult,
) -> Result<(AnswerSet, AnswerSet), QueryError> {
    let mut lower = BTreeSet::new();
    let mut upper = BTreeSet::new();
    let all = result.fds();
    let rhs_selected: Vec<Fd> = all
        .iter()
        .filter(|fd| q.select.contains(fd.rhs()))
        .copied()
        .collect();
    for t in candidate_rows(q, result) {
        let t = t?;
        let x = t.project_unchecked(q.select);
        if clean_of(t, all, result) {
            lower.insert(x.clone());
        }
        if clean_of(t, &rhs_selected, result) {
            upper.insert(x);
        }
    }
    Ok((
        AnswerSet {
            schema: q.select,
            mode: AnswerMode::Lower,
            rows: lower,
        },
        AnswerSet {
            schema: q.select,
            mode: AnswerMode::Upper,
            rows: upper,
        },
    ))
}

/// A maximal dependency-respecting subset of the saturated table.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub struct Repair {
    pub rows: Table,
}

/// The number of repair candidates the choice procedure would enumerate.
pub fn choice_product(result: &ChaseResult) -> u128 {
    let mut product: u128 = 1;
    for (fd, xs) in result.inc().iter_nonempty() {
        for x in xs {
            product = product.saturating_mul(competing_values(result, fd, x).len() as u128);
        }
    }
    product
}

fn competing_values(result: &ChaseResult, fd: &Fd, x: &Tuple) -> Vec<Constant> {
    let mut values = BTreeSet::new();
    for row in result.dstar().iter() {
        if fd.attrs().is_subset(&row.schema()) && row.project_unchecked(fd.lhs()) == *x {
            values.insert(row.get(fd.rhs()).expect("rhs bound").clone());
        }
    }
    values.into_iter().collect()
}

/// Generates repairs by choosing, per conflict-ledger entry, one surviving
/// right-hand value and dropping every row carrying a competing one.
/// Duplicate outcomes collapse; a conflict-free result repairs to itself.
pub fn repairs_by_choice(result: &ChaseResult) -> Vec<Repair> {
    let mut points: Vec<(Fd, Tuple, Vec<Constant>)> = Vec::new();
    for (fd, xs) in result.inc().iter_nonempty() {
        for x in xs {
            points.push((*fd, x.clone(), competing_values(result, fd, x)));
        }
    }
    let mut out: BTreeSet<Table> = BTreeSet::new();
    let mut choice = vec![0usize; points.len()];
    loop {
        let rows: Table = result
            .dstar()
            .iter()
            .filter(|row| {
                !points.iter().zip(&choice).any(|((fd, x, values), &pick)| {
                    fd.attrs().is_subset(&row.schema())
                        && row.project_unchecked(fd.lhs()) == *x
                        && *row.get(fd.rhs()).expect("rhs bound") != values[pick]
                })
            })
            .cloned()
            .collect();
        out.insert(rows);
        // odometer over the choice points
        let mut i = 0;
        loop {
            if i == points.len() {
                return out.into_iter().map(|rows| Repair { rows }).collect();
            }
            choice[i] += 1;
            if choice[i] < points[i].2.len() {
                break;
            }
            choice[i] = 0;
            i += 1;
        }
    }
}

// ---------------------------------------------------------------------
// Query text: SELECT A,B[,...] [WHERE condition], with NOT > AND > OR,
// parentheses, and single- or double-quoted constants (doubling escapes
// the delimiter).
// ---------------------------------------------------------------------

#[derive(Debug, Clone, PartialEq, Eq)]
enum Token {
    Ident(String),
    Str(String),
    Op(CmpOp),
    LParen,
    RParen,
    Comma,
}

fn tokenize(text: &str) -> Result<Vec<Token>, QueryError> {
    let mut toks = Vec::new();
    let chars: Vec<char> = text.chars().collect();
    let mut i = 0;
    while i < chars.len() {
        let c = chars[i];
        match c {
            c if c.is_whitespace() => i += 1,
            '(' => {
                toks.push(Token::LParen);
                i += 1;
            }
            ')' => {
                toks.push(Token::RParen);
                i += 1;
            }
            ',' => {
                toks.push(Token::Comma);
                i += 1;
            }
            '=' => {
                toks.push(Token::Op(CmpOp::Eq));
                i += 1;
            }
            '!' if chars.get(i + 1) == Some(&'=') => {
                toks.push(Token::Op(CmpOp::Ne));
                i += 2;
            }
            '<' => {
                match chars.get(i + 1) {
                    Some('=') => {
                        toks.push(Token::Op(CmpOp::Le));
                        i += 2;
                    }
                    Some('>') => {
                        toks.push(Token::Op(CmpOp::Ne));
                        i += 2;
                    }
                    _ => {
                        toks.push(Token::Op(CmpOp::Lt));
                        i += 1;
                    }
                }
            }
            '>' => {
                if chars.get(i + 1) == Some(&'=') {
                    toks.push(Token::Op(CmpOp::Ge));
                    i += 2;
                } else {
                    toks.push(Token::Op(CmpOp::Gt));
                    i += 1;
                }
            }
            q @ ('\'' | '"') => {
                let mut value = String::new();
                i += 1;
                loop {
                    match chars.get(i) {
                        None => {
                            return Err(QueryError::Syntax("unterminated string".to_string()))
                        }
                        Some(&c) if c == q => {
                            if chars.get(i + 1) == Some(&q) {
                                value.push(q);
                                i += 2;
                            } else {
                                i += 1;
                                break;
                            }
                        }
                        Some(&c) => {
                            value.push(c);
                            i += 1;
                        }
                    }
                }
                toks.push(Token::Str(value));
            }
            c if c.is_alphanumeric() || c == '_' => {
                let start = i;
                while i < chars.len() && (chars[i].is_alphanumeric() || chars[i] == '_') {
                    i += 1;
                }
                toks.push(Token::Ident(chars[start..i].iter().collect()));
            }
            other => {
                return Err(QueryError::Syntax(format!("unexpected character `{other}`")));
            }
        }
    }
    Ok(toks)
}

struct Parser<'a> {
    u: &'a Universe,
    toks: Vec<Token>,
    pos: usize,
}

impl<'a> Parser<'a> {
    fn peek(&self) -> Option<&Token> {
        self.toks.get(self.pos)
    }

    fn next(&mut self) -> Option<Token> {
        let t = self.toks.get(self.pos).cloned();
        if t.is_some() {
            self.pos += 1;
        }
        t
    }

    fn keyword(&self, t: &Token) -> Option<String> {
        match t {
            Token::Ident(s) => Some(s.to_ascii_uppercase()),
            _ => None,
        }
    }

    fn at_keyword(&self, kw: &str) -> bool {
        self.peek().and_then(|t| self.keyword(t)).as_deref() == Some(kw)
    }

    fn expect_attr(&mut self) -> Result<AttrId, QueryError> {
        match self.next() {
            Some(Token::Ident(name)) => self
                .u
                .attr_by_name(&name)
                .ok_or(QueryError::UnknownAttribute(name)),
            other => Err(QueryError::Syntax(format!(
                "expected an attribute name, got {other:?}"
            ))),
        }
    }

    fn parse_or(&mut self) -> Result<Condition, QueryError> {
        let mut left = self.parse_and()?;
        while self.at_keyword("OR") {
            self.next();
            let right = self.parse_and()?;
            left = Condition::Or(Box::new(left), Box::new(right));
        }
        Ok(left)
    }

    fn parse_and(&mut self) -> Result<Condition, QueryError> {
        let mut left = self.parse_not()?;
        while self.at_keyword("AND") {
            self.next();
            let right = self.parse_not()?;
            left = Condition::And(Box::new(left), Box::new(right));
        }
        Ok(left)
    }

    fn parse_not(&mut self) -> Result<Condition, QueryError> {
        if self.at_keyword("NOT") {
            self.next();
            Ok(Condition::Not(Box::new(self.parse_not()?)))
        } else {
            self.parse_atom()
        }
    }

    fn parse_atom(&mut self) -> Result<Condition, QueryError> {
        if matches!(self.peek(), Some(Token::LParen)) {
            self.next();
            let inner = self.parse_or()?;
            match self.next() {
                Some(Token::RParen) => Ok(inner),
                other => Err(QueryError::Syntax(format!(
                    "expected `)`, got {other:?}"
                ))),
            }
        } else {
            let left = self.expect_attr()?;
            let op = match self.next() {
                Some(Token::Op(op)) => op,
                other => {
                    return Err(QueryError::Syntax(format!(
                        "expected a comparison operator, got {other:?}"
                    )))
                }
            };
            match self.next() {
                Some(Token::Str(value)) => Condition::cmp_const(self.u, left, op, &value),
                Some(Token::Ident(name)) => {
                    let right = self
                        .u
                        .attr_by_name(&name)
                        .ok_or(QueryError::UnknownAttribute(name))?;
                    Condition::cmp_attr(self.u, left, op, right)
                }
                other => Err(QueryError::Syntax(format!(
                    "expected a quoted constant or attribute, got {other:?}"
                ))),
            }
        }
    }
}

/// Parses `SELECT A,B [WHERE condition]` against a universe.
pub fn parse_query(u: &Universe, text: &str) -> Result<Query, QueryError> {
    let toks = tokenize(text)?;
    let mut p = Parser { u, toks, pos: 0 };
    if !p.at_keyword("SELECT") {
        return Err(QueryError::Syntax("query must start with SELECT".to_string()));
    }
    p.next();
    let mut select = AttrSet::EMPTY;
    loop {
        let attr = p.expect_attr()?;
        select.insert(attr);
        if matches!(p.peek(), Some(Token::Comma)) {
            p.next();
        } else {
            break;
        }
    }
    let condition = if p.at_keyword("WHERE") {
        p.next();
        Some(p.parse_or()?)
    } else {
        None
    };
    if p.pos != p.toks.len() {
        return Err(QueryError::Syntax(format!(
            "trailing tokens after the query: {:?}",
            &p.toks[p.pos..]
        )));
    }
    Ok(Query { select, condition })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::chase::chase;
    use crate::files::{parse_fds, parse_schema, parse_table, parse_tuple_literal};
    use crate::model::Delta;
    use std::sync::Arc;

    // comparisons between K and M are well-typed here (shared domain)
    const COMPARABLE_SCHEMA: &str = "\
attribute Id domain id
attribute K domain name
attribute M domain name
attribute C domain century
";

    const SCHEMA: &str = "\
attribute Id domain id
attribute K domain kind
attribute M domain material
attribute C domain century
";

    fn catalogue() -> ChaseResult {
        let u = Arc::new(parse_schema(SCHEMA).unwrap());
        let table = parse_table(
            &u,
            "Id,K,M,C\ni1,k,m,c\ni1,,m',\ni1,k,,c\ni2,k',m',c\ni2,k',m'',\ni2,k',,c'\ni3,,m,\ni3,k',,\n",
        )
        .unwrap();
        let fds = parse_fds(&u, "Id -> K\nId -> C").unwrap();
        chase(&Delta::new(u, table, fds))
    }

    fn answers(rows: &AnswerSet, u: &Universe) -> BTreeSet<String> {
        rows.rows.iter().map(|t| t.display(u).to_string()).collect()
    }

    fn set(items: &[&str]) -> BTreeSet<String> {
        items.iter().map(|s| s.to_string()).collect()
    }

    #[test]
    fn condition_evaluation_over_partial_rows() {
        let u = parse_schema(COMPARABLE_SCHEMA).unwrap();
        let km = parse_tuple_literal(&u, "K=k,M=m").unwrap();
        let k_eq = parse_query(&u, "SELECT K WHERE K = 'k'").unwrap();
        assert!(eval_condition(&u, &km, k_eq.condition.as_ref().unwrap()).unwrap());
        // a disjunct over a missing attribute may still succeed
        let q = parse_query(&u, "SELECT K WHERE M = 'm' OR C = 'c'''").unwrap();
        assert!(eval_condition(&u, &km, q.condition.as_ref().unwrap()).unwrap());
        // comparable but distinct constants
        let mk = parse_query(&u, "SELECT K WHERE M = K").unwrap();
        assert!(!eval_condition(&u, &km, mk.condition.as_ref().unwrap()).unwrap());
        // negation over a missing attribute does not satisfy
        let not_c = parse_query(&u, "SELECT K WHERE NOT C = 'c'").unwrap();
        assert!(!eval_condition(&u, &km, not_c.condition.as_ref().unwrap()).unwrap());
    }

    #[test]
    fn condition_rejects_cross_domain_and_unordered_comparisons() {
        let u = parse_schema(COMPARABLE_SCHEMA).unwrap();
        assert!(matches!(
            parse_query(&u, "SELECT K WHERE Id = K"),
            Err(QueryError::IncomparableAttributes(_, _))
        ));
        assert!(matches!(
            parse_query(&u, "SELECT C WHERE C < 'c'"),
            Err(QueryError::UnorderedDomain(_))
        ));
        let ordered = parse_schema("attribute A domain d ordered\nattribute B domain d ordered").unwrap();
        let q = parse_query(&ordered, "SELECT A WHERE A <= 'm'").unwrap();
        let t = parse_tuple_literal(&ordered, "A=a").unwrap();
        assert!(eval_condition(&ordered, &t, q.condition.as_ref().unwrap()).unwrap());
    }

    #[test]
    fn parser_precedence_and_parentheses() {
        let u = parse_schema(SCHEMA).unwrap();
        let q = parse_query(&u, "SELECT K WHERE NOT K = 'k' AND M = 'm' OR C = 'c'").unwrap();
        // ((NOT K=k) AND M=m) OR C=c
        match q.condition.unwrap() {
            Condition::Or(l, _) => match *l {
                Condition::And(l2, _) => assert!(matches!(*l2, Condition::Not(_))),
                other => panic!("expected AND below OR, got {other:?}"),
            },
            other => panic!("expected OR at the top, got {other:?}"),
        }
        let q2 = parse_query(&u, "SELECT K WHERE NOT (K = 'k' OR K = 'k''')").unwrap();
        assert!(matches!(q2.condition.unwrap(), Condition::Not(_)));
        assert!(parse_query(&u, "SELECT").is_err());
        assert!(parse_query(&u, "SELECT K WHERE K = k").is_err()); // unquoted constant
        assert!(parse_query(&u, "SELECT K WHERE K = 'k' junk").is_err());
        assert!(parse_query(&u, "SELECT Zz").is_err());
    }

    #[test]
    fn plain_answers_project_covering_rows() {
        let result = catalogue();
        let u = result.universe().clone();
        let q1 = parse_query(&u, "SELECT Id,K,C").unwrap();
        let a = plain_answer(&q1, &result).unwrap();
        assert_eq!(
            answers(&a, &u),
            set(&["Id=i1,K=k,C=c", "Id=i2,K=k',C=c", "Id=i2,K=k',C=c'"])
        );
        let q2 = parse_query(&u, "SELECT Id,K,M").unwrap();
        assert_eq!(plain_answer(&q2, &result).unwrap().len(), 5);
        // selection not covered by any row schema
        let u_small = parse_schema("attribute A domain a\nattribute B domain b").unwrap();
        let d = Delta::new(
            Arc::new(u_small.clone()),
            parse_table(&u_small, "A\na\n").unwrap(),
            vec![],
        );
        let r = chase(&d);
        let q = parse_query(&u_small, "SELECT A,B").unwrap();
        assert!(plain_answer(&q, &r).unwrap().is_empty());
    }

    #[test]
    fn consistent_answers_respect_projected_dependencies() {
        let result = catalogue();
        let u = result.universe().clone();
        let q1 = parse_query(&u, "SELECT Id,K,C").unwrap();
        assert_eq!(
            answers(&consistent_answer(&q1, &result).unwrap(), &u),
            set(&["Id=i1,K=k,C=c"])
        );
        let q1p = parse_query(&u, "SELECT Id,K,C WHERE C = 'c'''").unwrap();
        assert!(consistent_answer(&q1p, &result).unwrap().is_empty());
        let q2 = parse_query(&u, "SELECT Id,K,M").unwrap();
        assert_eq!(
            answers(&consistent_answer(&q2, &result).unwrap(), &u),
            set(&[
                "Id=i1,K=k,M=m",
                "Id=i1,K=k,M=m'",
                "Id=i2,K=k',M=m'",
                "Id=i2,K=k',M=m''",
                "Id=i3,K=k',M=m",
            ])
        );
        let q3 = parse_query(&u, "SELECT M,C WHERE K = 'k'''").unwrap();
        assert_eq!(
            answers(&consistent_answer(&q3, &result).unwrap(), &u),
            set(&["M=m',C=c", "M=m',C=c'", "M=m'',C=c", "M=m'',C=c'"])
        );
    }

    #[test]
    fn repair_answers_bracket_the_consistent_answer() {
        let result = catalogue();
        let u = result.universe().clone();
        let q2 = parse_query(&u, "SELECT Id,K,M").unwrap();
        let (lower, upper) = repair_answers(&q2, &result).unwrap();
        assert_eq!(
            answers(&lower, &u),
            set(&["Id=i1,K=k,M=m", "Id=i1,K=k,M=m'", "Id=i3,K=k',M=m"])
        );
        assert_eq!(upper.len(), 5);
        let plus = consistent_answer(&q2, &result).unwrap();
        assert!(lower.rows.is_subset(&upper.rows));
        assert!(upper.rows.is_subset(&plus.rows));
        assert_eq!(upper.rows, plus.rows);

        let q3 = parse_query(&u, "SELECT M,C WHERE K = 'k'''").unwrap();
        let (lower3, upper3) = repair_answers(&q3, &result).unwrap();
        assert!(lower3.is_empty());
        assert!(upper3.is_empty());

        let q1 = parse_query(&u, "SELECT Id,K,C").unwrap();
        let (lower1, upper1) = repair_answers(&q1, &result).unwrap();
        assert_eq!(answers(&lower1, &u), set(&["Id=i1,K=k,C=c"]));
        assert_eq!(lower1.rows, upper1.rows);
    }

    #[test]
    fn choice_repairs_of_the_catalogue() {
        let result = catalogue();
        let u = result.universe().clone();
        assert_eq!(choice_product(&result), 2);
        let reps = repairs_by_choice(&result);
        assert_eq!(reps.len(), 2);
        let keep = |c: &str| -> Table {
            [
                "Id=i1,K=k,M=m,C=c",
                "Id=i1,K=k,M=m',C=c",
                &format!("Id=i2,K=k',M=m',C={c}"),
                &format!("Id=i2,K=k',M=m'',C={c}"),
                "Id=i3,K=k',M=m",
            ]
            .iter()
            .map(|l| parse_tuple_literal(&u, l).unwrap())
            .collect()
        };
        let tables: BTreeSet<Table> = reps.into_iter().map(|r| r.rows).collect();
        let expected: BTreeSet<Table> = [keep("c"), keep("c'")].into_iter().collect();
        assert_eq!(tables, expected);
    }

    #[test]
    fn tautology_condition_equals_no_condition() {
        // a tautology over a selected attribute filters nothing, because
        // every candidate row is defined on the whole selection
        let result = catalogue();
        let u = result.universe().clone();
        for (bare, tautological) in [
            ("SELECT Id,K,C", "SELECT Id,K,C WHERE K = K"),
            ("SELECT Id,K,M", "SELECT Id,K,M WHERE Id = 'i1' OR NOT Id = 'i1'"),
        ] {
            let bare_q = parse_query(&u, bare).unwrap();
            let taut_q = parse_query(&u, tautological).unwrap();
            for f in [plain_answer, consistent_answer] {
                assert_eq!(f(&bare_q, &result).unwrap().rows, f(&taut_q, &result).unwrap().rows);
            }
            let (l1, u1) = repair_answers(&bare_q, &result).unwrap();
            let (l2, u2) = repair_answers(&taut_q, &result).unwrap();
            assert_eq!(l1.rows, l2.rows);
            assert_eq!(u1.rows, u2.rows);
        }
    }

    #[test]
    fn consistent_pair_repairs_to_itself() {
        let u = Arc::new(parse_schema(SCHEMA).unwrap());
        let d = Delta::new(
            Arc::clone(&u),
            parse_table(&u, "Id,K\ni1,k\ni2,k'\n").unwrap(),
            parse_fds(&u, "Id -> K").unwrap(),
        );
        let result = chase(&d);
        let reps = repairs_by_choice(&result);
        assert_eq!(reps.len(), 1);
        assert_eq!(&reps[0].rows, result.dstar());
    }

    #[test]
    fn transitive_example_has_two_singleton_repairs() {
        let u = Arc::new(
            parse_schema("attribute A domain da\nattribute B domain db\nattribute C domain dc")
                .unwrap(),
        );
        let d = Delta::new(
            Arc::clone(&u),
            parse_table(&u, "A,B,C\na,b,c\na,,c'\n").unwrap(),
            parse_fds(&u, "A -> B\nB -> C").unwrap(),
        );
        let result = chase(&d);
        let reps = repairs_by_choice(&result);
        let tables: BTreeSet<Table> = reps.into_iter().map(|r| r.rows).collect();
        let single = |l: &str| -> Table {
            [parse_tuple_literal(&u, l).unwrap()].into_iter().collect()
        };
        let expected: BTreeSet<Table> =
            [single("A=a,B=b,C=c"), single("A=a,B=b,C=c'")].into_iter().collect();
        assert_eq!(tables, expected);
    }
}
