//! Shared fixtures for the integration tests: the archaeological catalogue
//! (two sources, their merged table, and the dependencies identifier ->
//! kind, identifier -> century) plus a small three-attribute example.
#![allow(dead_code)]

use std::collections::BTreeSet;
use std::sync::Arc;

use parachase::files::{parse_fds, parse_schema, parse_table, parse_tuple_literal};
use parachase::model::{Delta, Fd, Table, Tuple, Universe};

pub const CATALOGUE_SCHEMA: &str = "\
attribute Id domain id
attribute K domain kind
attribute M domain material
attribute C domain century
";

pub const CATALOGUE_FDS: &str = "Id -> K\nId -> C\n";

pub const SOURCE_ONE: &str = "\
Id,K,M,C
i1,k,m,c
i1,,m',
i2,k',m',c
i2,k',m'',
i3,,m,
";

pub const SOURCE_TWO: &str = "\
Id,K,M,C
i1,k,,c
i2,k',,c'
i2,k',m'',
i3,k',,
";

pub const MERGED: &str = "\
Id,K,M,C
i1,k,m,c
i1,,m',
i1,k,,c
i2,k',m',c
i2,k',m'',
i2,k',,c'
i3,,m,
i3,k',,
";

/// The seven rows the merged catalogue saturates to.
pub const MERGED_CHASED: &[&str] = &[
    "Id=i1,K=k,M=m,C=c",
    "Id=i1,K=k,M=m',C=c",
    "Id=i2,K=k',M=m',C=c",
    "Id=i2,K=k',M=m'',C=c",
    "Id=i2,K=k',M=m',C=c'",
    "Id=i2,K=k',M=m'',C=c'",
    "Id=i3,K=k',M=m",
];

pub const ABC_SCHEMA: &str = "\
attribute A domain da
attribute B domain db
attribute C domain dc
";

pub fn catalogue_universe() -> Arc<Universe> {
    Arc::new(parse_schema(CATALOGUE_SCHEMA).unwrap())
}

pub fn catalogue_delta(u: &Arc<Universe>, rows: &str) -> Delta {
    Delta::new(
        Arc::clone(u),
        parse_table(u, rows).unwrap(),
        parse_fds(u, CATALOGUE_FDS).unwrap(),
    )
}

pub fn abc_delta(rows: &str, fds: &str) -> Delta {
    let u = Arc::new(parse_schema(ABC_SCHEMA).unwrap());
    Delta::new(
        Arc::clone(&u),
        parse_table(&u, rows).unwrap(),
        parse_fds(&u, fds).unwrap(),
    )
}

pub fn lit(u: &Universe, s: &str) -> Tuple {
    parse_tuple_literal(u, s).unwrap()
}

pub fn table(u: &Universe, lits: &[&str]) -> Table {
    lits.iter().map(|l| lit(u, l)).collect()
}

pub fn tuple_set(u: &Universe, lits: &[&str]) -> BTreeSet<Tuple> {
    lits.iter().map(|l| lit(u, l)).collect()
}

pub fn fd_named(u: &Universe, fds: &[Fd], text: &str) -> Fd {
    *fds.iter()
        .find(|fd| fd.display(u).to_string() == text)
        .unwrap_or_else(|| panic!("no dependency `{text}`"))
}

/// Prints the per-criterion verdict line.
pub fn verdict(id: &str, label: &str, ok: bool) {
    println!(
        "[acceptance] {id} {label}: {}",
        if ok { "PASS" } else { "FAIL" }
    );
}
