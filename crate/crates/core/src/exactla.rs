//! Exact sparse linear algebra over the integers and prime fields.
//!
//! Boundary operators arrive as very sparse integer matrices (at most one
//! nonzero per merged pair of parts), so Smith normal form is computed by
//! gcd-reducing elimination with a fill-minimizing pivot heuristic: choose the
//! pivot minimizing `(row nonzeros - 1) * (col nonzeros - 1)`, tie-break on
//! the smallest absolute value. Mod-p ranks are computed directly over the
//! prime field, never through the integral form.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use crate::{Error, Result};

/// Sparse matrix with arbitrary-precision integer entries, row-major.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SparseIntMatrix {
    nrows: usize,
    ncols: usize,
    rows: Vec<BTreeMap<usize, BigInt>>,
}

impl SparseIntMatrix {
    pub fn zero(nrows: usize, ncols: usize) -> Self {
        SparseIntMatrix {
            nrows,
            ncols,
            rows: vec![BTreeMap::new(); nrows],
        }
    }

    pub fn from_triplets<I>(nrows: usize, ncols: usize, triplets: I) -> Self
    where
        I: IntoIterator<Item = (usize, usize, BigInt)>,
    {
        let mut m = Self::zero(nrows, ncols);
        for (r, c, v) in triplets {
            m.add(r, c, v);
        }
        m
    }

    pub fn nrows(&self) -> usize {
        self.nrows
    }

    pub fn ncols(&self) -> usize {
        self.ncols
    }

    pub fn nnz(&self) -> usize {
        self.rows.iter().map(|r| r.len()).sum()
    }

    pub fn is_zero(&self) -> bool {
        self.rows.iter().all(|r| r.is_empty())
    }

    pub fn get(&self, r: usize, c: usize) -> BigInt {
        self.rows[r].get(&c).cloned().unwrap_or_else(BigInt::zero)
    }

    pub fn set(&mut self, r: usize, c: usize, v: BigInt) {
        assert!(r < self.nrows && c < self.ncols, "index out of bounds");
        if v.is_zero() {
            self.rows[r].remove(&c);
        } else {
            self.rows[r].insert(c, v);
        }
    }

    /// Add `v` to the entry at `(r, c)`.
    pub fn add(&mut self, r: usize, c: usize, v: BigInt) {
        assert!(r < self.nrows && c < self.ncols, "index out of bounds");
        if v.is_zero() {
            return;
        }
        match self.rows[r].entry(c) {
            std::collections::btree_map::Entry::Vacant(e) => {
                e.insert(v);
            }
            std::collections::btree_map::Entry::Occupied(mut e) => {
                *e.get_mut() += v;
                if e.get().is_zero() {
                    e.remove();
                }
            }
        }
    }

    pub fn triplets(&self) -> impl Iterator<Item = (usize, usize, &BigInt)> {
        self.rows
            .iter()
            .enumerate()
            .flat_map(|(r, row)| row.iter().map(move |(&c, v)| (r, c, v)))
    }

    pub fn row(&self, r: usize) -> impl Iterator<Item = (usize, &BigInt)> {
        self.rows[r].iter().map(|(&c, v)| (c, v))
    }

    pub fn multiply(&self, other: &SparseIntMatrix) -> SparseIntMatrix {
        assert_eq!(self.ncols, other.nrows, "dimension mismatch");
        let mut out = SparseIntMatrix::zero(self.nrows, other.ncols);
        for (i, row) in self.rows.iter().enumerate() {
            for (&k, v) in row {
                for (&j, w) in &other.rows[k] {
                    out.add(i, j, v * w);
                }
            }
        }
        out
    }

    pub fn transpose(&self) -> SparseIntMatrix {
        let mut out = SparseIntMatrix::zero(self.ncols, self.nrows);
        for (r, c, v) in self.triplets() {
            out.set(c, r, v.clone());
        }
        out
    }
}

impl fmt::Display for SparseIntMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "{} {} {}", self.nrows, self.ncols, self.nnz())?;
        for (r, c, v) in self.triplets() {
            writeln!(f, "{r} {c} {v}")?;
        }
        Ok(())
    }
}

/// Nonzero elementary divisors of an integer matrix, in divisibility order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SnfResult {
    pub divisors: Vec<BigInt>,
}

impl SnfResult {
    /// Rank over the rationals.
    pub fn rank(&self) -> usize {
        self.divisors.len()
    }

    /// Divisors greater than one, i.e. the torsion part of the cokernel.
    pub fn nontrivial_divisors(&self) -> Vec<BigInt> {
        self.divisors.iter().filter(|d| !d.is_one()).cloned().collect()
    }
}

/// Working storage for the integer elimination.
struct Elimination {
    rows: Vec<BTreeMap<usize, BigInt>>,
    // column -> rows holding a nonzero entry there
    cols: Vec<BTreeSet<usize>>,
}

impl Elimination {
    fn new(m: &SparseIntMatrix) -> Self {
        let mut cols = vec![BTreeSet::new(); m.ncols];
        for (r, c, _) in m.triplets() {
            cols[c].insert(r);
        }
        Elimination {
            rows: m.rows.clone(),
            cols,
        }
    }

    fn set(&mut self, r: usize, c: usize, v: BigInt) {
        if v.is_zero() {
            self.rows[r].remove(&c);
            self.cols[c].remove(&r);
        } else {
            self.rows[r].insert(c, v);
            self.cols[c].insert(r);
        }
    }

    /// row[dst] -= q * row[src]
    fn row_axpy(&mut self, dst: usize, src: usize, q: &BigInt) {
        if q.is_zero() {
            return;
        }
        let src_row: Vec<(usize, BigInt)> =
            self.rows[src].iter().map(|(&c, v)| (c, v.clone())).collect();
        for (c, v) in src_row {
            let new = self.rows[dst].get(&c).cloned().unwrap_or_else(BigInt::zero) - q * v;
            self.set(dst, c, new);
        }
    }

    /// col[dst] -= q * col[src]
    fn col_axpy(&mut self, dst: usize, src: usize, q: &BigInt) {
        if q.is_zero() {
            return;
        }
        let src_col: Vec<(usize, BigInt)> = self.cols[src]
            .iter()
            .map(|&r| (r, self.rows[r][&src].clone()))
            .collect();
        for (r, v) in src_col {
            let new = self.rows[r].get(&dst).cloned().unwrap_or_else(BigInt::zero) - q * v;
            self.set(r, dst, new);
        }
    }

    /// Markowitz pivot: minimize fill estimate, tie-break on |value|.
    fn find_pivot(&self) -> Option<(usize, usize)> {
        let mut best: Option<(usize, usize, usize, BigInt)> = None;
        for r in 0..self.rows.len() {
            if self.rows[r].is_empty() {
                continue;
            }
            let rn = self.rows[r].len();
            for (&c, v) in &self.rows[r] {
                let cost = (rn - 1) * (self.cols[c].len() - 1);
                let abs = v.abs();
                let better = match &best {
                    None => true,
                    Some((_, _, bcost, babs)) => {
                        cost < *bcost || (cost == *bcost && abs < *babs)
                    }
                };
                if better {
                    if cost == 0 && abs.is_one() {
                        return Some((r, c));
                    }
                    best = Some((r, c, cost, abs));
                }
            }
        }
        best.map(|(r, c, _, _)| (r, c))
    }

    /// Clear the pivot row and column by gcd-reducing operations. The pivot
    /// position may migrate during the Euclidean passes; the final position
    /// and value are returned once both its row and column are singletons.
    fn clear_pivot(&mut self, mut r: usize, mut c: usize) -> (usize, usize, BigInt) {
        loop {
            // column phase: Euclidean reduction of the other entries in col c
            loop {
                let other = self.cols[c].iter().copied().find(|&x| x != r);
                let Some(r2) = other else { break };
                let a = self.rows[r2][&c].clone();
                let b = self.rows[r][&c].clone();
                let (q, rem) = a.div_rem(&b);
                self.row_axpy(r2, r, &q);
                if !rem.is_zero() {
                    // strictly smaller pivot; continue the Euclid loop there
                    r = r2;
                }
            }
            // row phase: same game on the other entries in row r
            loop {
                let other = self.rows[r].keys().copied().find(|&x| x != c);
                let Some(c2) = other else { break };
                let a = self.rows[r][&c2].clone();
                let b = self.rows[r][&c].clone();
                let (q, rem) = a.div_rem(&b);
                self.col_axpy(c2, c, &q);
                if !rem.is_zero() {
                    c = c2;
                }
            }
            // moving the pivot column may have exposed new entries in it
            if self.cols[c].iter().all(|&x| x == r) {
                return (r, c, self.rows[r][&c].clone());
            }
        }
    }
}

/// Smith normal form: the elementary divisors of `m` in divisibility order.
pub fn smith_normal_form(m: &SparseIntMatrix) -> SnfResult {
    let mut e = Elimination::new(m);
    let mut diagonal = Vec::new();
    while let Some((r, c)) = e.find_pivot() {
        let (r, c, pivot) = e.clear_pivot(r, c);
        diagonal.push(pivot.abs());
        e.rows[r].clear();
        e.cols[c].clear();
    }
    SnfResult {
        divisors: normalize_divisor_chain(diagonal),
    }
}

/// Bring a list of diagonal entries into a divisibility chain by repeated
/// pairwise gcd/lcm replacement.
fn normalize_divisor_chain(mut d: Vec<BigInt>) -> Vec<BigInt> {
    loop {
        let mut changed = false;
        for i in 0..d.len() {
            for j in (i + 1)..d.len() {
                let (a, b) = (d[i].clone(), d[j].clone());
                if (&b % &a).is_zero() {
                    continue;
                }
                let g = a.gcd(&b);
                let l = &a / &g * &b;
                d[i] = g;
                d[j] = l;
                changed = true;
            }
        }
        if !changed {
            break;
        }
    }
    d.sort();
    d
}

fn mod_inverse(a: u64, p: u64) -> u64 {
    // p is prime; Fermat
    let mut base = a as u128 % p as u128;
    let mut exp = p - 2;
    let mut acc: u128 = 1;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = acc * base % p as u128;
        }
        base = base * base % p as u128;
        exp >>= 1;
    }
    acc as u64
}

/// Rank of `m` over the field with `p` elements, by sparse elimination with
/// the same fill-minimizing pivot rule.
pub fn rank_mod_p(m: &SparseIntMatrix, p: u64) -> usize {
    let pp = BigInt::from(p);
    let mut rows: Vec<BTreeMap<usize, u64>> = vec![BTreeMap::new(); m.nrows()];
    let mut cols: Vec<BTreeSet<usize>> = vec![BTreeSet::new(); m.ncols()];
    for (r, c, v) in m.triplets() {
        let mut rem = v % &pp;
        if rem.is_negative() {
            rem += &pp;
        }
        let (_, digits) = rem.to_u64_digits();
        let val = digits.first().copied().unwrap_or(0);
        if val != 0 {
            rows[r].insert(c, val);
            cols[c].insert(r);
        }
    }
    let mut rank = 0;
    loop {
        // pivot search
        let mut best: Option<(usize, usize, usize)> = None;
        for (r, row) in rows.iter().enumerate() {
            if row.is_empty() {
                continue;
            }
            let rn = row.len();
            for &c in row.keys() {
                let cost = (rn - 1) * (cols[c].len() - 1);
                if best.map(|(_, _, b)| cost < b).unwrap_or(true) {
                    best = Some((r, c, cost));
                    if cost == 0 {
                        break;
                    }
                }
            }
            if matches!(best, Some((_, _, 0))) {
                break;
            }
        }
        let Some((r, c, _)) = best else {
            return rank;
        };
        rank += 1;
        let pivot_inv = mod_inverse(rows[r][&c], p);
        let pivot_row: Vec<(usize, u64)> = rows[r].iter().map(|(&cc, &v)| (cc, v)).collect();
        // clear the column
        let holders: Vec<usize> = cols[c].iter().copied().filter(|&x| x != r).collect();
        for r2 in holders {
            let factor = rows[r2][&c] as u128 * pivot_inv as u128 % p as u128;
            for &(cc, v) in &pivot_row {
                let sub = factor * v as u128 % p as u128;
                let cur = rows[r2].get(&cc).copied().unwrap_or(0) as u128;
                let new = ((cur + p as u128 - sub) % p as u128) as u64;
                if new == 0 {
                    rows[r2].remove(&cc);
                    cols[cc].remove(&r2);
                } else {
                    rows[r2].insert(cc, new);
                    cols[cc].insert(r2);
                }
            }
        }
        // retire pivot row and column
        for &(cc, _) in &pivot_row {
            cols[cc].remove(&r);
        }
        rows[r].clear();
        cols[c].clear();
    }
}

/// Basis of the left kernel `{x : x M = 0}` over `F_p`, as dense coordinate
/// vectors of length `m.nrows()`.
pub fn left_kernel_basis_mod_p(m: &SparseIntMatrix, p: u64) -> Vec<Vec<u64>> {
    let nrows = m.nrows();
    let pp = BigInt::from(p);
    // (sparse row, dense tag over the original row space)
    let mut echelon: Vec<(BTreeMap<usize, u64>, Vec<u64>)> = Vec::new();
    let mut pivots: BTreeMap<usize, usize> = BTreeMap::new(); // col -> echelon index
    let mut kernel = Vec::new();
    for r in 0..nrows {
        let mut row: BTreeMap<usize, u64> = BTreeMap::new();
        for (c, v) in m.row(r) {
            let mut rem = v % &pp;
            if rem.is_negative() {
                rem += &pp;
            }
            let (_, digits) = rem.to_u64_digits();
            let val = digits.first().copied().unwrap_or(0);
            if val != 0 {
                row.insert(c, val);
            }
        }
        let mut tag = vec![0u64; nrows];
        tag[r] = 1;
        // reduce against the echelon rows
        while let Some((&c, _)) = row.iter().next() {
            let Some(&idx) = pivots.get(&c) else { break };
            let factor = row[&c]; // echelon pivots are normalized to 1
            let (erow, etag) = &echelon[idx];
            for (&cc, &v) in erow {
                let cur = row.get(&cc).copied().unwrap_or(0) as u128;
                let new = ((cur + (p as u128 - 1) * factor as u128 % p as u128 * v as u128)
                    % p as u128) as u64;
                if new == 0 {
                    row.remove(&cc);
                } else {
                    row.insert(cc, new);
                }
            }
            for (t, &ev) in tag.iter_mut().zip(etag.iter()) {
                *t = ((*t as u128 + (p as u128 - 1) * factor as u128 % p as u128 * ev as u128)
                    % p as u128) as u64;
            }
        }
        if row.is_empty() {
            kernel.push(tag);
        } else {
            let (&c, &v) = row.iter().next().unwrap();
            let inv = mod_inverse(v, p);
            for val in row.values_mut() {
                *val = (*val as u128 * inv as u128 % p as u128) as u64;
            }
            for t in tag.iter_mut() {
                *t = (*t as u128 * inv as u128 % p as u128) as u64;
            }
            pivots.insert(c, echelon.len());
            echelon.push((row, tag));
        }
    }
    kernel
}

/// Rank of a list of dense vectors over `F_p`.
pub fn rank_rows_mod_p(rows: &[Vec<u64>], p: u64) -> usize {
    let mut echelon: Vec<Vec<u64>> = Vec::new();
    let mut pivot_cols: Vec<usize> = Vec::new();
    for row in rows {
        let mut v: Vec<u64> = row.iter().map(|&x| x % p).collect();
        for (erow, &pc) in echelon.iter().zip(pivot_cols.iter()) {
            let factor = v[pc];
            if factor == 0 {
                continue;
            }
            for (x, &e) in v.iter_mut().zip(erow.iter()) {
                *x = ((*x as u128 + (p as u128 - 1) * factor as u128 % p as u128 * e as u128)
                    % p as u128) as u64;
            }
        }
        if let Some(pc) = v.iter().position(|&x| x != 0) {
            let inv = mod_inverse(v[pc], p);
            for x in v.iter_mut() {
                *x = (*x as u128 * inv as u128 % p as u128) as u64;
            }
            echelon.push(v);
            pivot_cols.push(pc);
        }
    }
    echelon.len()
}

/// A finitely generated abelian group in canonical form: free rank plus
/// invariant factors `d_1 | d_2 | ... | d_k`, each at least 2.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct AbelianGroup {
    free_rank: usize,
    invariant_factors: Vec<BigInt>,
}

impl AbelianGroup {
    pub fn trivial() -> Self {
        AbelianGroup { free_rank: 0, invariant_factors: Vec::new() }
    }

    pub fn free(rank: usize) -> Self {
        AbelianGroup { free_rank: rank, invariant_factors: Vec::new() }
    }

    pub fn cyclic(order: u64) -> Self {
        if order == 0 {
            return Self::free(1);
        }
        if order == 1 {
            return Self::trivial();
        }
        AbelianGroup { free_rank: 0, invariant_factors: vec![BigInt::from(order)] }
    }

    /// Build from a free rank and arbitrary elementary divisors; ones are
    /// dropped and the rest normalized into a divisibility chain.
    pub fn from_divisors(free_rank: usize, divisors: Vec<BigInt>) -> Self {
        let kept: Vec<BigInt> = normalize_divisor_chain(divisors)
            .into_iter()
            .filter(|d| !d.is_one())
            .collect();
        for w in kept.windows(2) {
            debug_assert!((&w[1] % &w[0]).is_zero(), "divisibility chain");
        }
        AbelianGroup { free_rank, invariant_factors: kept }
    }

    /// Build from prime-power multiplicities: `(p, e, m)` contributes `m`
    /// summands `Z/p^e`.
    pub fn from_primary(free_rank: usize, parts: &[(u64, u32, usize)]) -> Self {
        let mut divisors = Vec::new();
        for &(p, e, m) in parts {
            for _ in 0..m {
                divisors.push(BigInt::from(p).pow(e));
            }
        }
        Self::from_divisors(free_rank, divisors)
    }

    pub fn free_rank(&self) -> usize {
        self.free_rank
    }

    pub fn invariant_factors(&self) -> &[BigInt] {
        &self.invariant_factors
    }

    pub fn is_trivial(&self) -> bool {
        self.free_rank == 0 && self.invariant_factors.is_empty()
    }

    pub fn is_finite(&self) -> bool {
        self.free_rank == 0
    }

    pub fn direct_sum(&self, other: &AbelianGroup) -> AbelianGroup {
        let mut divisors = self.invariant_factors.clone();
        divisors.extend(other.invariant_factors.iter().cloned());
        Self::from_divisors(self.free_rank + other.free_rank, divisors)
    }

    /// `dim_{Z_p} (G tensor Z_p)` = free rank plus the number of invariant
    /// factors divisible by `p`.
    pub fn dim_mod_p(&self, p: u64) -> usize {
        let p = BigInt::from(p);
        self.free_rank
            + self
                .invariant_factors
                .iter()
                .filter(|d| (*d % &p).is_zero())
                .count()
    }

    /// Number of `Z/p^e` summands in the primary decomposition of the
    /// torsion part, for the given prime.
    pub fn torsion_dim_at(&self, p: u64) -> usize {
        let p = BigInt::from(p);
        self.invariant_factors
            .iter()
            .filter(|d| (*d % &p).is_zero())
            .count()
    }

    /// Primary decomposition of the torsion part: prime -> multiset of
    /// exponents, ascending.
    pub fn primary_decomposition(&self) -> BTreeMap<BigInt, Vec<u32>> {
        let mut out: BTreeMap<BigInt, Vec<u32>> = BTreeMap::new();
        for d in &self.invariant_factors {
            for (p, e) in factorize(d) {
                out.entry(p).or_default().push(e);
            }
        }
        for exps in out.values_mut() {
            exps.sort();
        }
        out
    }

    /// True when every invariant factor is squarefree (no `p^2` torsion).
    pub fn is_squarefree(&self) -> bool {
        self.primary_decomposition().values().flatten().all(|&e| e == 1)
    }
}

fn factorize(n: &BigInt) -> Vec<(BigInt, u32)> {
    let mut n = n.clone();
    let mut out = Vec::new();
    let mut p = BigInt::from(2);
    while &p * &p <= n {
        let mut e = 0;
        while (&n % &p).is_zero() {
            n /= &p;
            e += 1;
        }
        if e > 0 {
            out.push((p.clone(), e));
        }
        p += 1;
    }
    if n > BigInt::one() {
        out.push((n, 1));
    }
    out
}

impl fmt::Display for AbelianGroup {
    /// Primary-decomposition style: `Z^2 + Z/2^2 + Z/3`, `Z/8`, `0`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_trivial() {
            return write!(f, "0");
        }
        let mut parts = Vec::new();
        match self.free_rank {
            0 => {}
            1 => parts.push("Z".to_string()),
            k => parts.push(format!("Z^{k}")),
        }
        for (p, exps) in self.primary_decomposition() {
            // group equal prime powers: multiplicity per exponent
            let mut by_exp: BTreeMap<u32, usize> = BTreeMap::new();
            for e in exps {
                *by_exp.entry(e).or_insert(0) += 1;
            }
            for (e, m) in by_exp {
                let q = p.pow(e);
                if m == 1 {
                    parts.push(format!("Z/{q}"));
                } else {
                    parts.push(format!("Z/{q}^{m}"));
                }
            }
        }
        write!(f, "{}", parts.join(" + "))
    }
}

/// Coefficient ring for cohomology computations.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Coeff {
    Integers,
    ModP(u64),
}

impl fmt::Display for Coeff {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Coeff::Integers => write!(f, "Z"),
            Coeff::ModP(p) => write!(f, "Z/{p}"),
        }
    }
}

/// Cohomology at one degree from the incoming and outgoing differentials,
/// both in row-per-source convention (`d_in` maps into the degree, `d_out`
/// out of it, so `d_in.ncols() == d_out.nrows()` is the dimension there).
///
/// Signals an error when `d_in * d_out != 0`.
pub fn cohomology_at(
    d_in: &SparseIntMatrix,
    d_out: &SparseIntMatrix,
    coeff: Coeff,
) -> Result<AbelianGroup> {
    assert_eq!(d_in.ncols(), d_out.nrows(), "degree dimension mismatch");
    let dim = d_in.ncols();
    if !d_in.multiply(d_out).is_zero() {
        return Err(Error::CompositeNonzero { degree: 0 });
    }
    match coeff {
        Coeff::Integers => {
            let snf_in = smith_normal_form(d_in);
            let rank_out = smith_normal_form(d_out).rank();
            let free = dim - snf_in.rank() - rank_out;
            Ok(AbelianGroup::from_divisors(free, snf_in.nontrivial_divisors()))
        }
        Coeff::ModP(p) => {
            let dim_p = dim - rank_mod_p(d_in, p) - rank_mod_p(d_out, p);
            Ok(AbelianGroup::free(dim_p))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn mat(nrows: usize, ncols: usize, entries: &[(usize, usize, i64)]) -> SparseIntMatrix {
        SparseIntMatrix::from_triplets(
            nrows,
            ncols,
            entries.iter().map(|&(r, c, v)| (r, c, BigInt::from(v))),
        )
    }

    /// Dense textbook Smith normal form, used as an independent oracle.
    fn dense_snf(mut m: Vec<Vec<i128>>) -> Vec<i128> {
        let nrows = m.len();
        let ncols = if nrows == 0 { 0 } else { m[0].len() };
        let mut divisors = Vec::new();
        let mut top = 0;
        loop {
            // find smallest nonzero entry in the remaining block
            let mut pivot: Option<(usize, usize)> = None;
            for r in top..nrows {
                for c in top..ncols {
                    if m[r][c] != 0
                        && pivot
                            .map(|(pr, pc)| m[r][c].abs() < m[pr][pc].abs())
                            .unwrap_or(true)
                    {
                        pivot = Some((r, c));
                    }
                }
            }
            let Some((pr, pc)) = pivot else { break };
            m.swap(top, pr);
            for row in m.iter_mut() {
                row.swap(top, pc);
            }
            // reduce
            let mut done = false;
            while !done {
                done = true;
                for r in top + 1..nrows {
                    if m[r][top] != 0 {
                        let q = m[r][top] / m[top][top];
                        for c in top..ncols {
                            m[r][c] -= q * m[top][c];
                        }
                        if m[r][top] != 0 {
                            m.swap(top, r);
                            done = false;
                        }
                    }
                }
                for c in top + 1..ncols {
                    if m[top][c] != 0 {
                        let q = m[top][c] / m[top][top];
                        for r in top..nrows {
                            m[r][c] -= q * m[r][top];
                        }
                        if m[top][c] != 0 {
                            for r in top..nrows {
                                let t = m[r][top];
                                m[r][top] = m[r][c];
                                m[r][c] = t;
                            }
                            done = false;
                        }
                    }
                }
            }
            divisors.push(m[top][top].abs());
            top += 1;
            if top >= nrows || top >= ncols {
                for r in top..nrows {
                    for c in top..ncols {
                        assert_eq!(m[r][c], 0);
                    }
                }
                break;
            }
        }
        // enforce divisibility chain
        loop {
            let mut changed = false;
            for i in 0..divisors.len() {
                for j in i + 1..divisors.len() {
                    if divisors[j] % divisors[i] != 0 {
                        let g = gcd128(divisors[i], divisors[j]);
                        let l = divisors[i] / g * divisors[j];
                        divisors[i] = g;
                        divisors[j] = l;
                        changed = true;
                    }
                }
            }
            if !changed {
                break;
            }
        }
        divisors.sort();
        divisors
    }

    fn gcd128(a: i128, b: i128) -> i128 {
        if b == 0 { a.abs() } else { gcd128(b, a % b) }
    }

    #[test]
    fn snf_examples() {
        let id3 = mat(3, 3, &[(0, 0, 1), (1, 1, 1), (2, 2, 1)]);
        assert_eq!(
            smith_normal_form(&id3).divisors,
            vec![BigInt::from(1), BigInt::from(1), BigInt::from(1)]
        );

        let m = mat(2, 2, &[(0, 0, 2), (0, 1, 4), (1, 0, 6), (1, 1, 8)]);
        let snf = smith_normal_form(&m);
        assert_eq!(snf.divisors, vec![BigInt::from(2), BigInt::from(4)]);
        assert_eq!(snf.rank(), 2);

        let z = SparseIntMatrix::zero(3, 4);
        assert!(smith_normal_form(&z).divisors.is_empty());
    }

    #[test]
    fn rank_mod_p_examples() {
        let m = mat(2, 2, &[(0, 0, 2), (0, 1, 4), (1, 0, 6), (1, 1, 8)]);
        assert_eq!(rank_mod_p(&m, 2), 0);
        assert_eq!(rank_mod_p(&m, 3), 2);
        let id4 = mat(4, 4, &[(0, 0, 1), (1, 1, 1), (2, 2, 1), (3, 3, 1)]);
        for p in [2, 3, 5, 7] {
            assert_eq!(rank_mod_p(&id4, p), 4);
        }
    }

    // small deterministic generator, good enough for a test corpus
    struct Lcg(u64);
    impl Lcg {
        fn next(&mut self) -> u64 {
            self.0 = self.0.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            self.0 >> 33
        }
        fn range(&mut self, n: u64) -> u64 {
            self.next() % n
        }
    }

    #[test]
    fn snf_matches_dense_oracle_on_random_corpus() {
        let mut rng = Lcg(0x5eed);
        for case in 0..500 {
            let nrows = 1 + rng.range(30) as usize;
            let ncols = 1 + rng.range(30) as usize;
            let density = 1 + rng.range(4);
            let mut dense = vec![vec![0i128; ncols]; nrows];
            let mut sparse = SparseIntMatrix::zero(nrows, ncols);
            for r in 0..nrows {
                for c in 0..ncols {
                    if rng.range(10) < density {
                        let v = rng.range(41) as i64 - 20;
                        dense[r][c] = v as i128;
                        sparse.set(r, c, BigInt::from(v));
                    }
                }
            }
            let expected: Vec<BigInt> = dense_snf(dense)
                .into_iter()
                .map(BigInt::from)
                .collect();
            let got = smith_normal_form(&sparse);
            assert_eq!(got.divisors, expected, "case {case} ({nrows}x{ncols})");
            // mod-p rank agrees with the divisor count not killed by p
            for p in [2u64, 3, 5, 7] {
                let alive = got
                    .divisors
                    .iter()
                    .filter(|d| !(*d % BigInt::from(p)).is_zero())
                    .count();
                assert_eq!(rank_mod_p(&sparse, p), alive, "rank mod {p}, case {case}");
            }
        }
    }

    #[test]
    fn abelian_group_canonical_form() {
        let g = AbelianGroup::from_divisors(
            1,
            vec![BigInt::from(2), BigInt::from(3), BigInt::from(2)],
        );
        // invariant factors 2 | 6
        assert_eq!(g.invariant_factors(), &[BigInt::from(2), BigInt::from(6)]);
        assert_eq!(g.to_string(), "Z + Z/2^2 + Z/3");
        assert_eq!(g.dim_mod_p(2), 3);
        assert_eq!(g.dim_mod_p(3), 2);
        assert_eq!(g.dim_mod_p(5), 1);
        assert!(g.is_squarefree());

        assert_eq!(AbelianGroup::cyclic(8).to_string(), "Z/8");
        assert!(!AbelianGroup::cyclic(8).is_squarefree());
        assert_eq!(AbelianGroup::cyclic(12).to_string(), "Z/4 + Z/3");
        assert_eq!(AbelianGroup::trivial().to_string(), "0");
        assert_eq!(AbelianGroup::free(2).to_string(), "Z^2");

        // primary input matches divisor input
        assert_eq!(
            AbelianGroup::from_primary(0, &[(2, 1, 2), (3, 1, 1)]),
            AbelianGroup::from_divisors(
                0,
                vec![BigInt::from(2), BigInt::from(2), BigInt::from(3)]
            )
        );
    }

    #[test]
    fn cohomology_at_both_maps_zero() {
        let d_in = SparseIntMatrix::zero(2, 5);
        let d_out = SparseIntMatrix::zero(5, 3);
        let g = cohomology_at(&d_in, &d_out, Coeff::Integers).unwrap();
        assert_eq!(g, AbelianGroup::free(5));
    }

    #[test]
    fn cohomology_at_rejects_nonzero_composite() {
        let d_in = mat(1, 1, &[(0, 0, 1)]);
        let d_out = mat(1, 1, &[(0, 0, 1)]);
        assert!(cohomology_at(&d_in, &d_out, Coeff::Integers).is_err());
    }
}
