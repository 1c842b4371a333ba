//! Formal chain arithmetic on compositions.
//!
//! Chains are sparse integer combinations of compositions of one fixed size
//! and length. The operators here are the differential `delta`, the sphere
//! operator `op_d`, the near-null-homotopy `op_s`, the `1`-insertion operators
//! `ins_i` / `ins_t`, the permutation cocycle `perm_cycle`, the monomial
//! realization `monomial_chain`, the Bockstein action on monomials and the
//! homotopy defect `E = D - 2 delta S - 2 S delta`.
//!
//! Coefficients are arbitrary-precision integers throughout; reduction mod p
//! happens only on explicit request, so one code path serves integral, mod-p
//! and mod-p^2 needs.

use std::collections::BTreeMap;
use std::fmt;

use itertools::Itertools;
use num_bigint::BigInt;
use num_traits::{Signed, Zero};

use crate::combinat::{binomial, Composition, Monomial};
use crate::{Error, Result};

/// Coefficient `P(x, y)`: zero when both arguments are odd, otherwise the
/// binomial `C(floor(x/2) + floor(y/2), floor(x/2))`. Defined for `x, y >= 0`
/// with `P(x, 0) = 1`.
pub fn coeff_p(x: u64, y: u64) -> BigInt {
    if x % 2 == 1 && y % 2 == 1 {
        BigInt::zero()
    } else {
        binomial(x / 2 + y / 2, x / 2)
    }
}

/// `P(x, y)` reduced mod `p`.
pub fn coeff_p_mod(x: u64, y: u64, p: u64) -> u64 {
    let v = coeff_p(x, y) % BigInt::from(p);
    // nonnegative by construction
    let (_, digits) = v.to_u64_digits();
    digits.first().copied().unwrap_or(0)
}

/// Coefficient `Q(m)`: zero for odd `m`, two for even `m`.
pub fn coeff_q(m: u64) -> u64 {
    if m % 2 == 1 {
        0
    } else {
        2
    }
}

/// A sparse integer combination of compositions, all of one size and length.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Chain {
    terms: BTreeMap<Composition, BigInt>,
}

impl Chain {
    pub fn zero() -> Self {
        Chain::default()
    }

    pub fn from_composition(c: Composition) -> Self {
        Chain::from_term(c, BigInt::from(1))
    }

    pub fn from_term(c: Composition, coeff: BigInt) -> Self {
        let mut chain = Chain::zero();
        chain.add_term(c, coeff);
        chain
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Composition, &BigInt)> {
        self.terms.iter()
    }

    pub fn coefficient(&self, c: &Composition) -> BigInt {
        self.terms.get(c).cloned().unwrap_or_else(BigInt::zero)
    }

    pub fn support_len(&self) -> usize {
        self.terms.len()
    }

    /// Common size of the supporting compositions, if any.
    pub fn size(&self) -> Option<u64> {
        self.terms.keys().next().map(|c| c.size())
    }

    pub fn add_term(&mut self, c: Composition, coeff: BigInt) {
        if coeff.is_zero() {
            return;
        }
        debug_assert!(
            self.terms
                .keys()
                .next()
                .map(|k| k.size() == c.size() && k.len() == c.len())
                .unwrap_or(true),
            "chain terms must share size and length"
        );
        let entry = self.terms.entry(c);
        match entry {
            std::collections::btree_map::Entry::Vacant(v) => {
                v.insert(coeff);
            }
            std::collections::btree_map::Entry::Occupied(mut o) => {
                *o.get_mut() += coeff;
                if o.get().is_zero() {
                    o.remove();
                }
            }
        }
    }

    pub fn add(&self, other: &Chain) -> Chain {
        let mut out = self.clone();
        for (c, v) in &other.terms {
            out.add_term(c.clone(), v.clone());
        }
        out
    }

    pub fn sub(&self, other: &Chain) -> Chain {
        let mut out = self.clone();
        for (c, v) in &other.terms {
            out.add_term(c.clone(), -v.clone());
        }
        out
    }

    pub fn scale(&self, k: i64) -> Chain {
        if k == 0 {
            return Chain::zero();
        }
        let k = BigInt::from(k);
        Chain {
            terms: self.terms.iter().map(|(c, v)| (c.clone(), v * &k)).collect(),
        }
    }

    /// Representative with all coefficients in `0..p`.
    pub fn reduce_mod(&self, p: u64) -> Chain {
        let p = BigInt::from(p);
        let mut out = Chain::zero();
        for (c, v) in &self.terms {
            let mut r = v % &p;
            if r.is_negative() {
                r += &p;
            }
            out.add_term(c.clone(), r);
        }
        out
    }

    pub fn is_zero_mod(&self, p: u64) -> bool {
        self.reduce_mod(p).is_zero()
    }
}

impl fmt::Display for Chain {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        for (i, (c, v)) in self.terms.iter().enumerate() {
            if i == 0 {
                if v.is_negative() {
                    write!(f, "-")?;
                }
            } else if v.is_negative() {
                write!(f, " - ")?;
            } else {
                write!(f, " + ")?;
            }
            let a = v.abs();
            if a != BigInt::from(1) {
                write!(f, "{a}*")?;
            }
            write!(f, "{c}")?;
        }
        Ok(())
    }
}

/// The differential: merge adjacent parts with coefficient `P` and
/// alternating sign. Raises degree by one, preserves size.
pub fn delta(chain: &Chain) -> Chain {
    let mut out = Chain::zero();
    for (c, v) in chain.terms() {
        let parts = c.parts();
        for l in 0..parts.len().saturating_sub(1) {
            let p = coeff_p(parts[l] as u64, parts[l + 1] as u64);
            if p.is_zero() {
                continue;
            }
            let sign = if l % 2 == 0 { 1 } else { -1 };
            let mut merged = Vec::with_capacity(parts.len() - 1);
            merged.extend_from_slice(&parts[..l]);
            merged.push(parts[l] + parts[l + 1]);
            merged.extend_from_slice(&parts[l + 2..]);
            out.add_term(Composition::new(merged), v * p * BigInt::from(sign));
        }
    }
    out
}

/// The sphere operator `D`: decrement each even part with coefficient `Q` and
/// sign given by the parity of the preceding parts. Lowers size by one.
pub fn op_d(chain: &Chain) -> Chain {
    let mut out = Chain::zero();
    for (c, v) in chain.terms() {
        let parts = c.parts();
        let mut preceding = 0u64;
        for i in 0..parts.len() {
            let q = coeff_q(parts[i] as u64);
            if q != 0 {
                let sign = if preceding % 2 == 0 { 1 } else { -1 };
                let mut dec = parts.to_vec();
                dec[i] -= 1;
                out.add_term(
                    Composition::new(dec),
                    v * BigInt::from(q as i64 * sign),
                );
            }
            preceding += parts[i] as u64;
        }
    }
    out
}

/// The near-null-homotopy `S`: for `1 <= k <= i <= s` insert a `1` at
/// position `k` and decrease the `i`-th part by two, with sign
/// `(-1)^{k+1+n_1+...+n_{k-1}}`. Summands where the decreased part would be
/// nonpositive are omitted. Lowers size by one and degree by two.
pub fn op_s(chain: &Chain) -> Chain {
    let mut out = Chain::zero();
    for (c, v) in chain.terms() {
        let parts = c.parts();
        let s = parts.len();
        let mut preceding = 0u64;
        for k in 1..=s {
            let sign = if (k as u64 + 1 + preceding) % 2 == 0 { 1 } else { -1 };
            for i in k..=s {
                if parts[i - 1] <= 2 {
                    continue;
                }
                let mut dec = parts.to_vec();
                dec[i - 1] -= 2;
                dec.insert(k - 1, 1);
                out.add_term(Composition::new(dec), v * BigInt::from(sign));
            }
            preceding += parts[k - 1] as u64;
        }
    }
    out
}

/// Insert `1`s so they land at exactly the (1-based) positions of `positions`
/// in the result; the sign is `(-1)^{sum of positions}`.
pub fn ins_i(positions: &[usize], c: &Composition) -> Result<(i64, Composition)> {
    let t = positions.len();
    let target_len = c.len() + t;
    let mut occupied = vec![false; target_len + 1];
    for &pos in positions {
        if pos < 1 || pos > target_len || occupied[pos] {
            return Err(Error::InsertionOutOfRange { position: pos, len: target_len });
        }
        occupied[pos] = true;
    }
    let mut parts = Vec::with_capacity(target_len);
    let mut src = c.parts().iter();
    for taken in occupied.iter().skip(1) {
        if *taken {
            parts.push(1);
        } else {
            parts.push(*src.next().expect("length bookkeeping"));
        }
    }
    let sign = if positions.iter().sum::<usize>() % 2 == 0 { 1 } else { -1 };
    Ok((sign, Composition::new(parts)))
}

/// `Ins_t = (-1)^{st} sum over t-element position sets of Ins_I`; a chain map
/// from the even-part complex into the `t`-odd-entries subcomplex.
pub fn ins_t(t: usize, chain: &Chain) -> Chain {
    if t == 0 {
        return chain.clone();
    }
    let mut out = Chain::zero();
    for (c, v) in chain.terms() {
        let s = c.len();
        let global = if (s * t) % 2 == 0 { 1 } else { -1 };
        for positions in (1..=s + t).combinations(t) {
            let (sign, inserted) = ins_i(&positions, c).expect("positions in range");
            out.add_term(inserted, v * BigInt::from(sign * global));
        }
    }
    out
}

/// Signed sum over the permutations of the parts that preserve the relative
/// order of any pair of positions `i < j` with equal parts or with
/// `P(n_i, n_j) = 0 mod p`. For a block list of basis generators this is a
/// cocycle mod p (checked by the verification suites, not assumed here).
pub fn perm_cycle(c: &Composition, p: u64) -> Chain {
    let parts = c.parts();
    let s = parts.len();
    if s == 0 {
        return Chain::from_composition(Composition::empty());
    }
    // keep_before[i] lists j > i whose order relative to i is fixed
    let mut predecessors = vec![Vec::new(); s];
    for i in 0..s {
        for j in (i + 1)..s {
            let fixed = parts[i] == parts[j]
                || coeff_p_mod(parts[i] as u64, parts[j] as u64, p) == 0;
            if fixed {
                predecessors[j].push(i);
            }
        }
    }
    let mut out = Chain::zero();
    let mut placed = vec![false; s];
    let mut current = Vec::with_capacity(s);
    place_next(parts, &predecessors, &mut placed, &mut current, 0, &mut out);
    out
}

fn place_next(
    parts: &[u32],
    predecessors: &[Vec<usize>],
    placed: &mut Vec<bool>,
    current: &mut Vec<u32>,
    inversions: usize,
    out: &mut Chain,
) {
    let s = parts.len();
    if current.len() == s {
        let sign = if inversions % 2 == 0 { 1 } else { -1 };
        out.add_term(Composition::new(current.clone()), BigInt::from(sign));
        return;
    }
    for v in 0..s {
        if placed[v] {
            continue;
        }
        if predecessors[v].iter().any(|&i| !placed[i]) {
            continue;
        }
        // placing original index v next: inversions against smaller unplaced indices
        let added = (0..v).filter(|&i| !placed[i]).count();
        placed[v] = true;
        current.push(parts[v]);
        place_next(parts, predecessors, placed, current, inversions + added, out);
        current.pop();
        placed[v] = false;
    }
}

/// Block list of a monomial: each `x_i` factor contributes the adjacent pair
/// `2p^{i-1}, 2p^{i-1}(p-1)` and each `y_j` the single part `2p^j`, in
/// increasing index order.
pub fn monomial_blocks(m: &Monomial) -> Composition {
    let p = m.prime();
    let mut parts = Vec::new();
    for (&i, &a) in m.x_exponents() {
        for _ in 0..a {
            parts.push((2 * p.pow(i - 1)) as u32);
            parts.push((2 * p.pow(i - 1) * (p - 1)) as u32);
        }
    }
    for &j in m.y_indices() {
        parts.push((2 * p.pow(j)) as u32);
    }
    Composition::new(parts)
}

/// Realize a monomial as a chain of total size `n`: permutation cocycle of
/// the block list, padded with `n - size` ones.
pub fn monomial_chain(m: &Monomial, n: u64) -> Result<Chain> {
    let size = m.size();
    if size > n {
        return Err(Error::SizeExceedsTarget { size, n });
    }
    let blocks = monomial_blocks(m);
    Ok(ins_t((n - size) as usize, &perm_cycle(&blocks, m.prime())))
}

/// A sparse integer combination of monomials over one prime.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct MonomialSum {
    terms: BTreeMap<Monomial, i64>,
}

impl MonomialSum {
    pub fn zero() -> Self {
        MonomialSum::default()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, &i64)> {
        self.terms.iter()
    }

    pub fn add_term(&mut self, m: Monomial, coeff: i64) {
        if coeff == 0 {
            return;
        }
        let entry = self.terms.entry(m).or_insert(0);
        *entry += coeff;
        if *entry == 0 {
            self.terms.retain(|_, v| *v != 0);
        }
    }

    pub fn is_zero_mod(&self, p: u64) -> bool {
        self.terms.values().all(|&v| v.rem_euclid(p as i64) == 0)
    }
}

/// The Bockstein on a monomial: for each `x_i` factor, decrease its exponent
/// and adjoin `y_i`, with the Koszul sign of sorting `y_i` into the existing
/// odd generators. Terms where `y_i` is already present vanish (`y_i^2 = 0`).
pub fn bockstein_monomial(m: &Monomial) -> MonomialSum {
    let mut out = MonomialSum::zero();
    for (&i, _) in m.x_exponents() {
        if let Some(shifted) = m.shift_x_to_y(i) {
            let sign = if m.y_indices().iter().filter(|&&j| j < i).count() % 2 == 0 {
                1
            } else {
                -1
            };
            out.add_term(shifted, sign);
        }
    }
    out
}

/// Bockstein extended linearly to monomial sums.
pub fn bockstein_sum(s: &MonomialSum) -> MonomialSum {
    let mut out = MonomialSum::zero();
    for (m, &c) in s.terms() {
        for (m2, &c2) in bockstein_monomial(m).terms() {
            out.add_term(m2.clone(), c * c2);
        }
    }
    out
}

/// The homotopy defect `E(c) = (D - 2 delta S - 2 S delta)(c)`.
///
/// On a single composition it vanishes unless the last part is 2, in which
/// case it equals the insertion sum of [`defect_last_two_formula`].
pub fn homotopy_defect(chain: &Chain) -> Chain {
    let d = op_d(chain);
    let ds = delta(&op_s(chain)).scale(2);
    let sd = op_s(&delta(chain)).scale(2);
    d.sub(&ds).sub(&sd)
}

/// The explicit right-hand side of the defect identity for a composition
/// `[n_1, ..., n_{s-1}, 2]`:
/// `2 sum_k (-1)^{s + k + n_1 + ... + n_{k-1}} [n_1, ..., 1 at k, ..., n_{s-1}]`.
pub fn defect_last_two_formula(c: &Composition) -> Chain {
    let parts = c.parts();
    let s = parts.len();
    assert_eq!(parts[s - 1], 2, "formula applies to compositions ending in 2");
    let prefix = &parts[..s - 1];
    let mut out = Chain::zero();
    let mut preceding = 0u64;
    for k in 1..=s {
        let sign = if (s as u64 + k as u64 + preceding) % 2 == 0 { 2 } else { -2 };
        let mut v = Vec::with_capacity(s);
        v.extend_from_slice(&prefix[..k - 1]);
        v.push(1);
        v.extend_from_slice(&prefix[k - 1..]);
        out.add_term(Composition::new(v), BigInt::from(sign));
        if k <= prefix.len() {
            preceding += prefix[k - 1] as u64;
        }
    }
    out
}
