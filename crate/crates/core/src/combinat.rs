//! Compositions, monomial bookkeeping and the closed-form counting functions.
//!
//! A composition `[n_1, ..., n_s]` of size `n = n_1 + ... + n_s` labels a cell
//! of the cellular decomposition; its degree is `n - s`. Monomials in the
//! generators `x_i` (degree `2p^i - 2`, size `2p^i`) and `y_j` (degree
//! `2p^j - 1`, size `2p^j`) index a basis of the mod-p cohomology of
//! `C_n(C)`; the counting functions here enumerate them directly by bounded
//! depth-first search so that they can serve as an independent oracle for the
//! matrix and series routes.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use num_bigint::BigInt;

pub mod series;

/// An ordered tuple of positive integers; the label of a cell.
///
/// The empty composition is the unique element of `Comb(0,0)`.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Composition(Vec<u32>);

impl Composition {
    pub fn new(parts: Vec<u32>) -> Self {
        assert!(parts.iter().all(|&p| p >= 1), "composition parts must be positive");
        Composition(parts)
    }

    pub fn empty() -> Self {
        Composition(Vec::new())
    }

    pub fn parts(&self) -> &[u32] {
        &self.0
    }

    /// Total size `n`.
    pub fn size(&self) -> u64 {
        self.0.iter().map(|&p| p as u64).sum()
    }

    /// Number of parts `s`.
    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// Cell degree `n - s`.
    pub fn degree(&self) -> u64 {
        self.size() - self.len() as u64
    }

    /// Number of odd parts; the splitting of the plane complex is graded by it.
    pub fn odd_parts(&self) -> usize {
        self.0.iter().filter(|&&p| p % 2 == 1).count()
    }
}

impl fmt::Display for Composition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[")?;
        for (i, p) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{p}")?;
        }
        write!(f, "]")
    }
}

/// All compositions of `n` into `q` positive parts, in lexicographic order.
///
/// This order is the indexing contract for every boundary matrix downstream.
pub fn compositions(n: u64, q: usize) -> Vec<Composition> {
    let mut out = Vec::new();
    let mut prefix = Vec::with_capacity(q);
    fill_compositions(n, q, &mut prefix, &mut out);
    out
}

fn fill_compositions(n: u64, q: usize, prefix: &mut Vec<u32>, out: &mut Vec<Composition>) {
    if q == 0 {
        if n == 0 {
            out.push(Composition(prefix.clone()));
        }
        return;
    }
    if n < q as u64 {
        return;
    }
    // first part between 1 and n - (q-1)
    let hi = n - (q as u64 - 1);
    for first in 1..=hi {
        prefix.push(first as u32);
        fill_compositions(n - first, q - 1, prefix, out);
        prefix.pop();
    }
}

/// Exact binomial coefficient as an arbitrary-precision integer.
pub fn binomial(n: u64, k: u64) -> BigInt {
    if k > n {
        return BigInt::from(0);
    }
    let k = k.min(n - k);
    let mut acc = BigInt::from(1);
    for i in 0..k {
        acc = acc * BigInt::from(n - i) / BigInt::from(i + 1);
    }
    acc
}

/// Binomial coefficient in `u128`; panics on overflow (fine for the desk-scale
/// index ranges used here).
pub fn binomial_u128(n: u64, k: u64) -> u128 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        acc = acc.checked_mul((n - i) as u128).expect("binomial overflow") / (i + 1) as u128;
    }
    acc
}

/// A monomial `x_1^{a_1} ... x_k^{a_k} y_{j_1} ... y_{j_l}` over `Z_p`.
///
/// The `x` exponents are keyed by increasing index and the `y` indices form a
/// sorted set (`y_j^2 = 0`), so equality of values is equality of monomials.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Monomial {
    prime: u64,
    x_exps: BTreeMap<u32, u32>,
    y_idx: BTreeSet<u32>,
}

impl Monomial {
    pub fn new(prime: u64, x_exps: BTreeMap<u32, u32>, y_idx: BTreeSet<u32>) -> Self {
        assert!(x_exps.keys().all(|&i| i >= 1), "x indices start at 1");
        assert!(x_exps.values().all(|&a| a >= 1), "x exponents must be positive");
        Monomial { prime, x_exps, y_idx }
    }

    pub fn one(prime: u64) -> Self {
        Monomial { prime, x_exps: BTreeMap::new(), y_idx: BTreeSet::new() }
    }

    pub fn prime(&self) -> u64 {
        self.prime
    }

    pub fn x_exponents(&self) -> &BTreeMap<u32, u32> {
        &self.x_exps
    }

    pub fn y_indices(&self) -> &BTreeSet<u32> {
        &self.y_idx
    }

    pub fn is_one(&self) -> bool {
        self.x_exps.is_empty() && self.y_idx.is_empty()
    }

    pub fn contains_y(&self, j: u32) -> bool {
        self.y_idx.contains(&j)
    }

    /// `deg(x_i) = 2p^i - 2`, `deg(y_j) = 2p^j - 1`.
    pub fn degree(&self) -> u64 {
        let p = self.prime;
        let x: u64 = self.x_exps.iter().map(|(&i, &a)| a as u64 * (2 * p.pow(i) - 2)).sum();
        let y: u64 = self.y_idx.iter().map(|&j| 2 * p.pow(j) - 1).sum();
        x + y
    }

    /// `size(x_i) = size(y_i) = 2p^i`.
    pub fn size(&self) -> u64 {
        let p = self.prime;
        let x: u64 = self.x_exps.iter().map(|(&i, &a)| a as u64 * 2 * p.pow(i)).sum();
        let y: u64 = self.y_idx.iter().map(|&j| 2 * p.pow(j)).sum();
        x + y
    }

    /// Copy with the `x_i` exponent decreased by one and `y_i` inserted;
    /// `None` if `x_i` is absent or `y_i` already present.
    pub fn shift_x_to_y(&self, i: u32) -> Option<Monomial> {
        let &a = self.x_exps.get(&i)?;
        if self.y_idx.contains(&i) {
            return None;
        }
        let mut m = self.clone();
        if a == 1 {
            m.x_exps.remove(&i);
        } else {
            m.x_exps.insert(i, a - 1);
        }
        m.y_idx.insert(i);
        Some(m)
    }
}

impl fmt::Display for Monomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_one() {
            return write!(f, "1");
        }
        let mut first = true;
        for (&i, &a) in &self.x_exps {
            if !first {
                write!(f, " ")?;
            }
            first = false;
            if a == 1 {
                write!(f, "x_{i}")?;
            } else {
                write!(f, "x_{i}^{a}")?;
            }
        }
        for &j in &self.y_idx {
            if !first {
                write!(f, " ")?;
            }
            first = false;
            write!(f, "y_{j}")?;
        }
        Ok(())
    }
}

/// Constraint on the presence of `y_0` in [`monomials_of_degree`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Y0Filter {
    Require,
    Forbid,
    Any,
}

/// All monomials of exact degree `r` and size at most `max_size`.
pub fn monomials_of_degree(p: u64, r: u64, max_size: u64, filter: Y0Filter) -> Vec<Monomial> {
    let mut out = Vec::new();
    let mut x_exps = BTreeMap::new();
    collect_x(p, r, max_size, 1, &mut x_exps, &mut out, filter);
    out
}

fn collect_x(
    p: u64,
    deg_left: u64,
    size_left: u64,
    min_idx: u32,
    x_exps: &mut BTreeMap<u32, u32>,
    out: &mut Vec<Monomial>,
    filter: Y0Filter,
) {
    let y_min = match filter {
        Y0Filter::Forbid => 1,
        _ => 0,
    };
    let mut y_idx = BTreeSet::new();
    collect_y(p, deg_left, size_left, y_min, x_exps, &mut y_idx, out, filter);
    let mut i = min_idx;
    loop {
        let size = 2 * p.pow(i);
        let deg = size - 2;
        if size > size_left || deg > deg_left {
            return;
        }
        *x_exps.entry(i).or_insert(0) += 1;
        collect_x(p, deg_left - deg, size_left - size, i, x_exps, out, filter);
        let a = x_exps.remove(&i).unwrap();
        if a > 1 {
            x_exps.insert(i, a - 1);
        }
        i += 1;
    }
}

#[allow(clippy::too_many_arguments)]
fn collect_y(
    p: u64,
    deg_left: u64,
    size_left: u64,
    min_idx: u32,
    x_exps: &BTreeMap<u32, u32>,
    y_idx: &mut BTreeSet<u32>,
    out: &mut Vec<Monomial>,
    filter: Y0Filter,
) {
    if deg_left == 0 {
        let keep = match filter {
            Y0Filter::Require => y_idx.contains(&0),
            Y0Filter::Forbid => !y_idx.contains(&0),
            Y0Filter::Any => true,
        };
        if keep {
            out.push(Monomial {
                prime: p,
                x_exps: x_exps.clone(),
                y_idx: y_idx.clone(),
            });
        }
        return;
    }
    let mut j = min_idx;
    loop {
        let size = 2 * p.pow(j);
        let deg = size - 1;
        if size > size_left || deg > deg_left {
            return;
        }
        y_idx.insert(j);
        collect_y(p, deg_left - deg, size_left - size, j + 1, x_exps, y_idx, out, filter);
        y_idx.remove(&j);
        j += 1;
    }
}

/// `B_p(n, r)`: the number of monomials of degree `r` and size at most `n`,
/// counted as pairs of index tuples by depth-first search. Equals
/// `dim H^r(C_n(C), Z_p)`.
pub fn count_bp(p: u64, n: u64, r: u64) -> u64 {
    count_x_tuples(p, r, n, 1)
}

fn count_x_tuples(p: u64, deg_left: u64, size_left: u64, min_idx: u32) -> u64 {
    let mut total = count_y_tuples(p, deg_left, size_left, 0);
    let mut a = min_idx;
    loop {
        let size = 2 * p.pow(a);
        let deg = size - 2;
        if size > size_left || deg > deg_left {
            return total;
        }
        total += count_x_tuples(p, deg_left - deg, size_left - size, a);
        a += 1;
    }
}

fn count_y_tuples(p: u64, deg_left: u64, size_left: u64, min_idx: u32) -> u64 {
    if deg_left == 0 {
        return 1;
    }
    let mut total = 0;
    let mut b = min_idx;
    loop {
        let size = 2 * p.pow(b);
        let deg = size - 1;
        if size > size_left || deg > deg_left {
            return total;
        }
        total += count_y_tuples(p, deg_left - deg, size_left - size, b + 1);
        b += 1;
    }
}

/// `B'_p(n, r)`: monomials `x... y... y_0` of degree `r`, size `m <= n`, with
/// `y` indices at least 1 and `p` not dividing `2(n - m + 1)`. Equals the rank
/// of the connecting map out of `H^r(C_n(C), Z_p)` in the mapping-cone long
/// exact sequence.
pub fn count_bp_prime(p: u64, n: u64, r: u64) -> u64 {
    if r == 0 || n < 2 {
        return 0;
    }
    // Inner monomials: degree r - 1, y indices >= 1, size m0 <= n - 2; the
    // trailing y_0 contributes the remaining degree 1 and size 2.
    count_bp_prime_x(p, r - 1, n - 2, 1, n)
}

fn count_bp_prime_x(p: u64, deg_left: u64, size_left: u64, min_idx: u32, n: u64) -> u64 {
    let mut total = count_bp_prime_y(p, deg_left, size_left, 1, n);
    let mut a = min_idx;
    loop {
        let size = 2 * p.pow(a);
        let deg = size - 2;
        if size > size_left || deg > deg_left {
            return total;
        }
        total += count_bp_prime_x(p, deg_left - deg, size_left - size, a, n);
        a += 1;
    }
}

fn count_bp_prime_y(p: u64, deg_left: u64, size_left: u64, min_idx: u32, n: u64) -> u64 {
    if deg_left == 0 {
        // inner size m0 = (n - 2) - size_left; excluded when p | 2(n - m0 - 1)
        let m0 = n - 2 - size_left;
        return if (2 * (n - m0 - 1)) % p == 0 { 0 } else { 1 };
    }
    let mut total = 0;
    let mut b = min_idx;
    loop {
        let size = 2 * p.pow(b);
        let deg = size - 1;
        if size > size_left || deg > deg_left {
            return total;
        }
        total += count_bp_prime_y(p, deg_left - deg, size_left - size, b + 1, n);
        b += 1;
    }
}

/// `dim H^r(C_n(S^2), Z_p) = B_p(n,r) + B_p(n-1,r-2) - B'_p(n,r) - B'_p(n,r-1)`.
///
/// Signals an error if the formula evaluates negative, which would indicate an
/// internal inconsistency in the counting functions.
pub fn dim_sphere_mod_p(p: u64, n: u64, r: u64) -> crate::Result<u64> {
    let mut plus = count_bp(p, n, r);
    if n >= 1 && r >= 2 {
        plus += count_bp(p, n - 1, r - 2);
    }
    let mut minus = count_bp_prime(p, n, r);
    if r >= 1 {
        minus += count_bp_prime(p, n, r - 1);
    }
    if plus < minus {
        return Err(crate::Error::NegativeDimension { p, n, r });
    }
    Ok(plus - minus)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn comp(parts: &[u32]) -> Composition {
        Composition::new(parts.to_vec())
    }

    #[test]
    fn compositions_of_five_into_three() {
        let got = compositions(5, 3);
        let expected: Vec<Composition> = [
            [3, 1, 1],
            [1, 3, 1],
            [1, 1, 3],
            [2, 2, 1],
            [2, 1, 2],
            [1, 2, 2],
        ]
        .iter()
        .map(|p| comp(p))
        .collect();
        assert_eq!(got.len(), 6);
        for c in &expected {
            assert!(got.contains(c), "missing {c}");
        }
        // lexicographic order is the indexing contract
        let mut sorted = got.clone();
        sorted.sort();
        assert_eq!(got, sorted);
    }

    #[test]
    fn compositions_edge_cases() {
        assert_eq!(compositions(4, 4), vec![comp(&[1, 1, 1, 1])]);
        assert_eq!(compositions(0, 0), vec![Composition::empty()]);
        assert!(compositions(3, 5).is_empty());
        assert!(compositions(3, 0).is_empty());
        assert_eq!(compositions(10, 4).len(), 84);
    }

    #[test]
    fn composition_counts_match_binomials() {
        for n in 1..=20u64 {
            for q in 1..=n as usize {
                assert_eq!(
                    compositions(n, q).len() as u128,
                    binomial_u128(n - 1, q as u64 - 1),
                    "count mismatch at ({n},{q})"
                );
            }
        }
    }

    /// Naive oracle: enumerate the index tuples with explicit nested vectors,
    /// no shared code with the counting functions.
    fn oracle_bp(p: u64, n: u64, r: u64) -> u64 {
        let mut count = 0;
        // all weakly increasing a-tuples and strictly increasing b-tuples with
        // entry sizes bounded by n
        let max_idx = (0..).take_while(|&i| 2 * p.pow(i) <= n.max(2)).last().unwrap_or(0);
        let mut a_tuples: Vec<Vec<u32>> = vec![vec![]];
        let mut frontier = vec![vec![]];
        loop {
            let mut next = Vec::new();
            for t in &frontier {
                let lo = *t.last().unwrap_or(&1);
                for a in lo..=max_idx {
                    if a < 1 {
                        continue;
                    }
                    let mut t2 = t.clone();
                    t2.push(a);
                    let size: u64 = t2.iter().map(|&i| 2 * p.pow(i)).sum();
                    if size <= n {
                        next.push(t2);
                    }
                }
            }
            if next.is_empty() {
                break;
            }
            a_tuples.extend(next.iter().cloned());
            frontier = next;
        }
        let mut b_tuples: Vec<Vec<u32>> = vec![vec![]];
        let mut frontier = vec![vec![]];
        loop {
            let mut next = Vec::new();
            for t in &frontier {
                let lo = t.last().map(|&b| b + 1).unwrap_or(0);
                for b in lo..=max_idx {
                    let mut t2 = t.clone();
                    t2.push(b);
                    let size: u64 = t2.iter().map(|&i| 2 * p.pow(i)).sum();
                    if size <= n {
                        next.push(t2);
                    }
                }
            }
            if next.is_empty() {
                break;
            }
            b_tuples.extend(next.iter().cloned());
            frontier = next;
        }
        for a in &a_tuples {
            for b in &b_tuples {
                let sa: u64 = a.iter().map(|&i| 2 * p.pow(i)).sum();
                let sb: u64 = b.iter().map(|&i| 2 * p.pow(i)).sum();
                if sa + sb > n {
                    continue;
                }
                let deg = sa + sb - 2 * a.len() as u64 - b.len() as u64;
                if deg == r {
                    count += 1;
                }
            }
        }
        count
    }

    #[test]
    fn count_bp_examples() {
        // degree-17 row of the mod-3 table at n = 24: y_2, x_2 y_0, x_1^3 y_1
        assert_eq!(count_bp(3, 24, 17), 3);
        for p in [2, 3, 5, 7] {
            for n in 0..10 {
                assert_eq!(count_bp(p, n, 0), 1);
            }
        }
        assert_eq!(count_bp(2, 4, 3), 1);
        assert_eq!(oracle_bp(2, 4, 3), 1);
    }

    #[test]
    fn count_bp_matches_naive_oracle() {
        for p in [2u64, 3, 5] {
            for n in 0..=16 {
                for r in 0..=16 {
                    assert_eq!(
                        count_bp(p, n, r),
                        oracle_bp(p, n, r),
                        "oracle mismatch at p={p}, n={n}, r={r}"
                    );
                }
            }
        }
    }

    #[test]
    fn count_bp_matches_monomial_enumeration() {
        for p in [2u64, 3, 5, 7] {
            for n in 0..=30 {
                for r in 0..=30 {
                    assert_eq!(
                        count_bp(p, n, r),
                        monomials_of_degree(p, r, n, Y0Filter::Any).len() as u64,
                        "mismatch at p={p}, n={n}, r={r}"
                    );
                }
            }
        }
    }

    #[test]
    fn count_bp_prime_examples() {
        assert_eq!(count_bp_prime(3, 9, 5), 1);
        assert_eq!(count_bp_prime(3, 10, 5), 0);
        for p in [2, 3, 5] {
            for n in 0..12 {
                assert_eq!(count_bp_prime(p, n, 0), 0);
            }
        }
        // p = 2 never satisfies the divisibility exclusion
        for n in 0..=20 {
            for r in 0..=20 {
                assert_eq!(count_bp_prime(2, n, r), 0);
            }
        }
    }

    #[test]
    fn count_bp_recurrence_odd_sizes() {
        for p in [2u64, 3, 5] {
            for n in 0..=14 {
                for r in 0..=20 {
                    assert_eq!(count_bp(p, 2 * n + 1, r), count_bp(p, 2 * n, r));
                }
            }
        }
    }

    #[test]
    fn count_bp_stable_from_twice_degree() {
        // every monomial of degree r has size at most 2r
        for p in [2u64, 3, 5] {
            for r in 0..=10 {
                let stable = count_bp(p, 2 * r, r);
                for n in 2 * r..=30 {
                    assert_eq!(count_bp(p, n, r), stable);
                }
            }
        }
    }

    #[test]
    fn monomials_of_degree_examples() {
        let got = monomials_of_degree(3, 5, 24, Y0Filter::Any);
        let y1 = Monomial::new(3, BTreeMap::new(), [1].into_iter().collect());
        let x1y0 =
            Monomial::new(3, [(1, 1)].into_iter().collect(), [0].into_iter().collect());
        assert_eq!(got.len(), 2);
        assert!(got.contains(&y1));
        assert!(got.contains(&x1y0));

        assert!(monomials_of_degree(3, 2, 24, Y0Filter::Any).is_empty());
        assert_eq!(
            monomials_of_degree(2, 4, 8, Y0Filter::Any).len() as u64,
            count_bp(2, 8, 4)
        );
    }

    #[test]
    fn monomial_degree_size() {
        let m = Monomial::new(3, [(1, 3)].into_iter().collect(), [1].into_iter().collect());
        // x_1^3 y_1 at p = 3: degree 3*4 + 5 = 17, size 3*6 + 6 = 24
        assert_eq!(m.degree(), 17);
        assert_eq!(m.size(), 24);
        assert_eq!(m.to_string(), "x_1^3 y_1");
    }

    #[test]
    fn y0_filter_splits_enumeration() {
        for p in [2u64, 3] {
            for r in 0..=12 {
                for n in 0..=14 {
                    let all = monomials_of_degree(p, r, n, Y0Filter::Any).len();
                    let with = monomials_of_degree(p, r, n, Y0Filter::Require).len();
                    let without = monomials_of_degree(p, r, n, Y0Filter::Forbid).len();
                    assert_eq!(all, with + without);
                }
            }
        }
    }

    #[test]
    fn dim_sphere_examples() {
        assert_eq!(dim_sphere_mod_p(3, 10, 6).unwrap(), 2);
        assert_eq!(dim_sphere_mod_p(3, 9, 6).unwrap(), 0);
        assert_eq!(dim_sphere_mod_p(2, 5, 2).unwrap(), 2);
    }

    #[test]
    fn dim_sphere_periodicity() {
        for p in [2u64, 3, 5] {
            for r in 0..=8 {
                for n in (2 * r)..=(40 - p) {
                    assert_eq!(
                        dim_sphere_mod_p(p, n + p, r).unwrap(),
                        dim_sphere_mod_p(p, n, r).unwrap(),
                        "periodicity fails at p={p}, n={n}, r={r}"
                    );
                }
            }
        }
    }
}
