//! Finite groups as Cayley tables, with the basis enumeration every other
//! module keys matrices against.
//!
//! Convention: the ℓ²(G) basis is `(δ_{g0}, …, δ_{g_{d−1}})` in label order
//! with `g0` the identity. Every matrix index in this crate refers to that
//! enumeration.

use serde::{Deserialize, Serialize};

/// Default cap on group order; override with the `QG_MAX_ORDER` environment
/// variable.
pub const DEFAULT_MAX_ORDER: usize = 64;

pub fn max_order() -> usize {
    std::env::var("QG_MAX_ORDER")
        .ok()
        .and_then(|v| v.parse().ok())
        .unwrap_or(DEFAULT_MAX_ORDER)
}

#[derive(Debug, thiserror::Error)]
pub enum GroupError {
    #[error("unsupported family parameters: {0}")]
    BadParams(String),
    #[error("group order {0} exceeds maximum {1} (set QG_MAX_ORDER to raise)")]
    OrderCap(usize, usize),
    #[error("malformed group document: {0}")]
    Malformed(String),
    #[error("group axiom violation: {0}")]
    AxiomViolation(String),
}

/// Serialized form: `{"name", "order", "labels", "table"}`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct GroupDocument {
    pub name: String,
    pub order: usize,
    pub labels: Vec<String>,
    pub table: Vec<Vec<usize>>,
}

/// A finite group of order `d` given by its Cayley table;
/// `table[i][j]` is the index of `g_i · g_j`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FiniteGroup {
    pub name: String,
    pub order: usize,
    pub labels: Vec<String>,
    pub table: Vec<Vec<usize>>,
    pub identity_index: usize,
    pub inverse: Vec<usize>,
}

/// One axiom check inside a validation report.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct AxiomCheck {
    pub name: String,
    pub pass: bool,
    pub detail: String,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Family {
    Cyclic,
    Dihedral,
    Symmetric,
    DirectProduct,
}

impl FiniteGroup {
    #[inline]
    pub fn mul(&self, i: usize, j: usize) -> usize {
        self.table[i][j]
    }

    #[inline]
    pub fn inv(&self, i: usize) -> usize {
        self.inverse[i]
    }

    pub fn is_abelian(&self) -> bool {
        let d = self.order;
        (0..d).all(|i| (0..d).all(|j| self.table[i][j] == self.table[j][i]))
    }

    /// Builds from raw parts, validating every group axiom. Rejects rather
    /// than repairs.
    pub fn from_parts(
        name: String,
        labels: Vec<String>,
        table: Vec<Vec<usize>>,
    ) -> Result<FiniteGroup, GroupError> {
        let d = labels.len();
        if d == 0 {
            return Err(GroupError::Malformed("empty label list".into()));
        }
        if d > max_order() {
            return Err(GroupError::OrderCap(d, max_order()));
        }
        {
            let mut seen = std::collections::HashSet::new();
            for l in &labels {
                if !seen.insert(l) {
                    return Err(GroupError::Malformed(format!("duplicate label {l:?}")));
                }
            }
        }
        if table.len() != d || table.iter().any(|r| r.len() != d) {
            return Err(GroupError::Malformed(format!("table is not {d}x{d}")));
        }
        for (i, row) in table.iter().enumerate() {
            for (j, &v) in row.iter().enumerate() {
                if v >= d {
                    return Err(GroupError::Malformed(format!(
                        "table[{i}][{j}] = {v} out of range 0..{d}"
                    )));
                }
            }
        }
        let checks = axiom_checks(&table, d);
        if let Some(fail) = checks.iter().find(|c| !c.pass) {
            return Err(GroupError::AxiomViolation(format!("{}: {}", fail.name, fail.detail)));
        }
        let identity_index = find_identity(&table, d).expect("axiom checks guarantee identity");
        let inverse = (0..d)
            .map(|i| (0..d).find(|&j| table[i][j] == identity_index).expect("axiom checks guarantee inverses"))
            .collect();
        Ok(FiniteGroup { name, order: d, labels, table, identity_index, inverse })
    }

    pub fn to_document(&self) -> GroupDocument {
        GroupDocument {
            name: self.name.clone(),
            order: self.order,
            labels: self.labels.clone(),
            table: self.table.clone(),
        }
    }
}

fn find_identity(table: &[Vec<usize>], d: usize) -> Option<usize> {
    (0..d).find(|&e| (0..d).all(|j| table[e][j] == j && table[j][e] == j))
}

/// Runs every group axiom against a candidate table, reporting each
/// separately; failures name the offending indices.
pub fn axiom_checks(table: &[Vec<usize>], d: usize) -> Vec<AxiomCheck> {
    let mut checks = Vec::new();

    // Latin square: rows and columns are permutations.
    let mut latin = AxiomCheck { name: "latin-square".into(), pass: true, detail: "all rows and columns are permutations".into() };
    'latin: for i in 0..d {
        let mut row = vec![false; d];
        let mut col = vec![false; d];
        for j in 0..d {
            if std::mem::replace(&mut row[table[i][j]], true) {
                latin.pass = false;
                latin.detail = format!("row {i} repeats entry {}", table[i][j]);
                break 'latin;
            }
            if std::mem::replace(&mut col[table[j][i]], true) {
                latin.pass = false;
                latin.detail = format!("column {i} repeats entry {}", table[j][i]);
                break 'latin;
            }
        }
    }
    checks.push(latin);

    let mut assoc = AxiomCheck { name: "associativity".into(), pass: true, detail: "(gi gj) gk == gi (gj gk) for all triples".into() };
    'assoc: for i in 0..d {
        for j in 0..d {
            for k in 0..d {
                if table[table[i][j]][k] != table[i][table[j][k]] {
                    assoc.pass = false;
                    assoc.detail = format!("failing triple (i,j,k) = ({i},{j},{k})");
                    break 'assoc;
                }
            }
        }
    }
    checks.push(assoc);

    let identity = find_identity(table, d);
    checks.push(AxiomCheck {
        name: "identity".into(),
        pass: identity.is_some(),
        detail: match identity {
            Some(e) => format!("identity at index {e}"),
            None => "no two-sided identity element".into(),
        },
    });

    let mut inverses = AxiomCheck { name: "inverses".into(), pass: true, detail: "every element has a two-sided inverse".into() };
    if let Some(e) = identity {
        for i in 0..d {
            match (0..d).find(|&j| table[i][j] == e && table[j][i] == e) {
                Some(_) => {}
                None => {
                    inverses.pass = false;
                    inverses.detail = format!("element {i} has no two-sided inverse");
                    break;
                }
            }
        }
    } else {
        inverses.pass = false;
        inverses.detail = "skipped: no identity".into();
    }
    checks.push(inverses);

    checks
}

/// Constructs a standard group. Deterministic: equal arguments give identical
/// tables and labels.
pub fn build_standard(family: Family, params: &[usize]) -> Result<FiniteGroup, GroupError> {
    match family {
        Family::Cyclic => {
            let &[n] = params else {
                return Err(GroupError::BadParams("cyclic needs one parameter n >= 1".into()));
            };
            if n < 1 {
                return Err(GroupError::BadParams("cyclic needs n >= 1".into()));
            }
            guard_order(n)?;
            let labels = (0..n)
                .map(|i| if i == 0 { "e".to_string() } else { format!("a{i}") })
                .collect();
            let table = (0..n).map(|i| (0..n).map(|j| (i + j) % n).collect()).collect();
            FiniteGroup::from_parts(format!("Z{n}"), labels, table)
        }
        Family::Dihedral => {
            let &[n] = params else {
                return Err(GroupError::BadParams("dihedral needs one parameter n >= 1".into()));
            };
            if n < 1 {
                return Err(GroupError::BadParams("dihedral needs n >= 1".into()));
            }
            guard_order(2 * n)?;
            // element i < n is r^i, element n + i is s r^i
            let d = 2 * n;
            let labels = (0..d)
                .map(|i| {
                    if i == 0 {
                        "e".to_string()
                    } else if i < n {
                        format!("r{i}")
                    } else if i == n {
                        "s".to_string()
                    } else {
                        format!("sr{}", i - n)
                    }
                })
                .collect();
            let idx = |flip: usize, rot: usize| flip * n + rot.rem_euclid(n);
            let mut table = vec![vec![0usize; d]; d];
            for i in 0..d {
                for j in 0..d {
                    let (fi, ri) = (i / n, i % n);
                    let (fj, rj) = (j / n, j % n);
                    // (s^fi r^ri)(s^fj r^rj) = s^(fi+fj) r^(±ri+rj)
                    let rot = if fj == 0 { ri + rj } else { n + rj - ri };
                    table[i][j] = idx((fi + fj) % 2, rot % n);
                }
            }
            FiniteGroup::from_parts(format!("D{n}"), labels, table)
        }
        Family::Symmetric => {
            let &[n] = params else {
                return Err(GroupError::BadParams("symmetric needs one parameter n >= 1".into()));
            };
            if n < 1 {
                return Err(GroupError::BadParams("symmetric needs n >= 1".into()));
            }
            let order: usize = (1..=n).product();
            guard_order(order)?;
            let perms = permutations(n);
            let index_of: std::collections::HashMap<Vec<usize>, usize> =
                perms.iter().cloned().enumerate().map(|(i, p)| (p, i)).collect();
            let labels = perms
                .iter()
                .map(|p| p.iter().map(|&x| (b'1' + x as u8) as char).collect::<String>())
                .collect();
            let table = perms
                .iter()
                .map(|p| {
                    perms
                        .iter()
                        .map(|q| {
                            // composition (p q)(x) = p(q(x))
                            let composed: Vec<usize> = (0..n).map(|x| p[q[x]]).collect();
                            index_of[&composed]
                        })
                        .collect()
                })
                .collect();
            FiniteGroup::from_parts(format!("S{n}"), labels, table)
        }
        Family::DirectProduct => {
            Err(GroupError::BadParams(
                "direct products are built with direct_product(g, h)".into(),
            ))
        }
    }
}

/// Direct product; order is the product of the factor orders and the table is
/// the componentwise product.
pub fn direct_product(g: &FiniteGroup, h: &FiniteGroup) -> Result<FiniteGroup, GroupError> {
    let d = g.order * h.order;
    guard_order(d)?;
    let idx = |a: usize, b: usize| a * h.order + b;
    let labels = (0..g.order)
        .flat_map(|a| (0..h.order).map(move |b| (a, b)))
        .map(|(a, b)| format!("({},{})", g.labels[a], h.labels[b]))
        .collect();
    let mut table = vec![vec![0usize; d]; d];
    for a1 in 0..g.order {
        for b1 in 0..h.order {
            for a2 in 0..g.order {
                for b2 in 0..h.order {
                    table[idx(a1, b1)][idx(a2, b2)] = idx(g.mul(a1, a2), h.mul(b1, b2));
                }
            }
        }
    }
    FiniteGroup::from_parts(format!("{}x{}", g.name, h.name), labels, table)
}

fn guard_order(d: usize) -> Result<(), GroupError> {
    if d > max_order() {
        Err(GroupError::OrderCap(d, max_order()))
    } else {
        Ok(())
    }
}

/// Permutations of `0..n` in lexicographic order, identity first.
fn permutations(n: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut current: Vec<usize> = (0..n).collect();
    loop {
        out.push(current.clone());
        // next_permutation
        let Some(i) = (0..n.saturating_sub(1)).rev().find(|&i| current[i] < current[i + 1]) else {
            break;
        };
        let j = (i + 1..n).rev().find(|&j| current[j] > current[i]).unwrap();
        current.swap(i, j);
        current[i + 1..].reverse();
    }
    out
}

/// Parses and validates a group document; rejects rather than repairs.
pub fn parse_group(json: &str) -> Result<FiniteGroup, GroupError> {
    let doc: GroupDocument =
        serde_json::from_str(json).map_err(|e| GroupError::Malformed(e.to_string()))?;
    if doc.order != doc.labels.len() {
        return Err(GroupError::Malformed(format!(
            "declared order {} does not match {} labels",
            doc.order,
            doc.labels.len()
        )));
    }
    FiniteGroup::from_parts(doc.name, doc.labels, doc.table)
}

/// Builds a group from a short name: `Zn`, `Dn`, `Sn`, `Q8`, or direct
/// products joined with `x` such as `Z2xZ2`. Case-sensitive.
pub fn named_group(spec: &str) -> Result<FiniteGroup, GroupError> {
    if let Some((left, right)) = spec.split_once('x') {
        return direct_product(&named_group(left)?, &named_group(right)?);
    }
    if spec == "Q8" {
        guard_order(8)?;
        return Ok(quaternion_group());
    }
    let (family, digits) = match spec.split_at(1) {
        ("Z", rest) => (Family::Cyclic, rest),
        ("D", rest) => (Family::Dihedral, rest),
        ("S", rest) => (Family::Symmetric, rest),
        _ => return Err(GroupError::BadParams(format!("unknown group name {spec:?}"))),
    };
    let n: usize = digits
        .parse()
        .map_err(|_| GroupError::BadParams(format!("unknown group name {spec:?}")))?;
    build_standard(family, &[n])
}

/// The quaternion group Q8, used in tests and reachable from group files;
/// it is not in any `build_standard` family.
pub fn quaternion_group() -> FiniteGroup {
    // elements: 1, -1, i, -i, j, -j, k, -k
    let labels: Vec<String> =
        ["1", "-1", "i", "-i", "j", "-j", "k", "-k"].iter().map(|s| s.to_string()).collect();
    // encode as (sign, axis) with axis in {1, i, j, k}
    let axis = |idx: usize| idx / 2; // 0:1, 1:i, 2:j, 3:k
    let sign = |idx: usize| if idx % 2 == 0 { 1i32 } else { -1i32 };
    let encode = |s: i32, a: usize| a * 2 + if s > 0 { 0 } else { 1 };
    // quaternion axis multiplication table: (axis, axis) -> (sign, axis)
    let mul_axis = |a: usize, b: usize| -> (i32, usize) {
        match (a, b) {
            (0, x) => (1, x),
            (x, 0) => (1, x),
            (1, 1) | (2, 2) | (3, 3) => (-1, 0),
            (1, 2) => (1, 3),
            (2, 1) => (-1, 3),
            (2, 3) => (1, 1),
            (3, 2) => (-1, 1),
            (3, 1) => (1, 2),
            (1, 3) => (-1, 2),
            _ => unreachable!(),
        }
    };
    let table = (0..8)
        .map(|i| {
            (0..8)
                .map(|j| {
                    let (s, a) = mul_axis(axis(i), axis(j));
                    encode(s * sign(i) * sign(j), a)
                })
                .collect()
        })
        .collect();
    FiniteGroup::from_parts("Q8".into(), labels, table).expect("Q8 table is a group")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn trivial_group() {
        let g = build_standard(Family::Cyclic, &[1]).unwrap();
        assert_eq!(g.order, 1);
        assert_eq!(g.identity_index, 0);
    }

    #[test]
    fn z2_table() {
        let g = build_standard(Family::Cyclic, &[2]).unwrap();
        assert_eq!(g.table, vec![vec![0, 1], vec![1, 0]]);
        assert_eq!(g.inverse, vec![0, 1]);
    }

    #[test]
    fn s3_is_nonabelian_of_order_six() {
        let g = build_standard(Family::Symmetric, &[3]).unwrap();
        assert_eq!(g.order, 6);
        assert!(!g.is_abelian());
        // oracle: compose permutations of 3 letters directly
        let perms = permutations(3);
        for (i, p) in perms.iter().enumerate() {
            for (j, q) in perms.iter().enumerate() {
                let composed: Vec<usize> = (0..3).map(|x| p[q[x]]).collect();
                let k = perms.iter().position(|r| *r == composed).unwrap();
                assert_eq!(g.table[i][j], k);
            }
        }
    }

    #[test]
    fn standard_groups_pass_all_axioms() {
        for g in [
            build_standard(Family::Cyclic, &[5]).unwrap(),
            build_standard(Family::Dihedral, &[4]).unwrap(),
            build_standard(Family::Symmetric, &[4]).unwrap(),
            quaternion_group(),
        ] {
            let checks = axiom_checks(&g.table, g.order);
            assert!(checks.iter().all(|c| c.pass), "{}: {:?}", g.name, checks);
        }
    }

    #[test]
    fn build_standard_is_deterministic() {
        let a = build_standard(Family::Dihedral, &[3]).unwrap();
        let b = build_standard(Family::Dihedral, &[3]).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn direct_product_componentwise() {
        let z2 = build_standard(Family::Cyclic, &[2]).unwrap();
        let z3 = build_standard(Family::Cyclic, &[3]).unwrap();
        let p = direct_product(&z2, &z3).unwrap();
        assert_eq!(p.order, 6);
        assert!(p.is_abelian());
        for a1 in 0..2 {
            for b1 in 0..3 {
                for a2 in 0..2 {
                    for b2 in 0..3 {
                        assert_eq!(
                            p.table[a1 * 3 + b1][a2 * 3 + b2],
                            z2.mul(a1, a2) * 3 + z3.mul(b1, b2)
                        );
                    }
                }
            }
        }
    }

    #[test]
    fn parse_round_trip() {
        let g = build_standard(Family::Symmetric, &[3]).unwrap();
        let json = serde_json::to_string(&g.to_document()).unwrap();
        let back = parse_group(&json).unwrap();
        assert_eq!(g, back);
    }

    #[test]
    fn parse_rejects_non_associative_table() {
        // 2-element magma with a non-associative (and non-latin-safe) table:
        // use a 3-element latin square that is not associative.
        let doc = r#"{"name":"bad","order":3,"labels":["e","a","b"],
            "table":[[0,1,2],[1,2,0],[2,1,0]]}"#;
        let err = parse_group(doc).unwrap_err();
        let msg = err.to_string();
        assert!(msg.contains("latin") || msg.contains("triple"), "{msg}");
    }

    #[test]
    fn parse_rejects_duplicated_row_entry() {
        let doc = r#"{"name":"bad","order":2,"labels":["e","a"],
            "table":[[0,0],[1,0]]}"#;
        let err = parse_group(doc).unwrap_err();
        assert!(err.to_string().contains("repeats"), "{err}");
    }

    #[test]
    fn dihedral_relations() {
        // r s = s r^{-1}
        let g = build_standard(Family::Dihedral, &[4]).unwrap();
        let r = 1;
        let s = 4;
        let rs = g.mul(r, s);
        let sr_inv = g.mul(s, g.inv(r));
        assert_eq!(rs, sr_inv);
        assert_eq!(g.mul(s, s), g.identity_index);
    }

    #[test]
    fn order_cap_enforced() {
        let err = build_standard(Family::Symmetric, &[6]).unwrap_err();
        assert!(matches!(err, GroupError::OrderCap(720, _)));
    }
}
