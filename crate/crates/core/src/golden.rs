//! Golden reference tables and their text grammar.

use std::collections::BTreeMap;

use num_bigint::BigInt;

use crate::exactla::AbelianGroup;

/// Parse a group in the table grammar: `0`, `Z`, `Z^2`, `Z/8`, `Z/2^2 + Z/3`,
/// `Z + Z/2`. `Z/q^m` means `m` summands `Z/q`.
pub fn parse_group(s: &str) -> Option<AbelianGroup> {
    let s = s.trim();
    if s == "0" {
        return Some(AbelianGroup::trivial());
    }
    let mut free = 0usize;
    let mut divisors: Vec<BigInt> = Vec::new();
    for term in s.split('+') {
        let term = term.trim();
        if term.is_empty() {
            return None;
        }
        if let Some(rest) = term.strip_prefix("Z/") {
            let (q, m) = match rest.split_once('^') {
                Some((q, m)) => (q.trim().parse::<u64>().ok()?, m.trim().parse::<usize>().ok()?),
                None => (rest.trim().parse::<u64>().ok()?, 1),
            };
            if q < 2 {
                return None;
            }
            for _ in 0..m {
                divisors.push(BigInt::from(q));
            }
        } else if let Some(rest) = term.strip_prefix('Z') {
            let rest = rest.trim();
            if rest.is_empty() {
                free += 1;
            } else if let Some(k) = rest.strip_prefix('^') {
                free += k.trim().parse::<usize>().ok()?;
            } else {
                return None;
            }
        } else {
            return None;
        }
    }
    Some(AbelianGroup::from_divisors(free, divisors))
}

/// A table of integral groups: `rows[n][i]` with absent entries trivial.
pub type GroupTable = BTreeMap<u64, BTreeMap<usize, AbelianGroup>>;

/// A table of per-degree dimensions.
pub type DimTable = BTreeMap<usize, usize>;

fn data_lines(text: &str) -> impl Iterator<Item = &str> {
    text.lines()
        .map(|l| l.trim())
        .filter(|l| !l.is_empty() && !l.starts_with('#'))
}

/// Parse a group table file: each data line `n | g_0 ; g_1 ; ...` lists the
/// groups in degrees `0, 1, ...` for one value of `n`.
pub fn parse_group_table(text: &str) -> GroupTable {
    let mut out = GroupTable::new();
    for line in data_lines(text) {
        let (n, rest) = line.split_once('|').expect("row format `n | groups`");
        let n: u64 = n.trim().parse().expect("row index");
        let mut row = BTreeMap::new();
        for (i, cell) in rest.split(';').enumerate() {
            let g = parse_group(cell)
                .unwrap_or_else(|| panic!("bad group `{}` in row {n}", cell.trim()));
            if !g.is_trivial() {
                row.insert(i, g);
            }
        }
        out.insert(n, row);
    }
    out
}

/// Parse a dimension table file: each data line `r | d`.
pub fn parse_dim_table(text: &str) -> DimTable {
    let mut out = DimTable::new();
    for line in data_lines(text) {
        let (r, d) = line.split_once('|').expect("row format `r | dim`");
        out.insert(
            r.trim().parse().expect("degree"),
            d.trim().parse().expect("dimension"),
        );
    }
    out
}

/// Integral cohomology of configuration spaces of the plane, `n <= 17`.
pub fn table3() -> GroupTable {
    parse_group_table(include_str!("../data/table3.txt"))
}

/// Integral cohomology of configuration spaces of the sphere, `n <= 16`.
pub fn table4() -> GroupTable {
    parse_group_table(include_str!("../data/table4.txt"))
}

/// Mod-3 dimensions of the cohomology of `C_24(C)` per degree.
pub fn table1() -> DimTable {
    parse_dim_table(include_str!("../data/table1.txt"))
}

/// Dimensions of the 3-torsion of the integral cohomology of `C_24(C)`.
pub fn table2() -> DimTable {
    parse_dim_table(include_str!("../data/table2.txt"))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn group_grammar_round_trips() {
        for s in ["0", "Z", "Z^2", "Z/8", "Z/2^2 + Z/3", "Z + Z/2", "Z/4 + Z/3"] {
            let g = parse_group(s).unwrap();
            assert_eq!(g.to_string(), s, "canonical rendering");
        }
        // non-canonical spellings parse to the same group
        assert_eq!(parse_group("Z/30"), parse_group("Z/2 + Z/3 + Z/5"));
        assert_eq!(parse_group("Z/6"), parse_group("Z/2 + Z/3"));
        assert!(parse_group("Q").is_none());
        assert!(parse_group("Z/1").is_none());
    }

    #[test]
    fn golden_tables_parse() {
        assert_eq!(table3().len(), 17);
        assert_eq!(table4().len(), 16);
        assert!(table1().values().sum::<usize>() > 0);
        assert_eq!(table2().values().sum::<usize>(), 11);
    }
}
