//! Assembly of the cochain complexes.
//!
//! `Plane(n)` is the full complex with basis `Comb(n, n-r)` in degree `r`;
//! `PlaneEven(m)` is its subcomplex of compositions with all parts even (the
//! differential preserves the number of odd parts, and the even subcomplex of
//! each even size determines the whole cohomology); `Sphere(n)` is the
//! mapping cone of the operator `D`, with the `A_n^r` block followed by the
//! `A_{n-1}^{r-2}` block in the basis order.
//!
//! Matrices are in row-per-source convention: `matrix_at(r)` has one row per
//! basis cell of degree `r` and one column per cell of degree `r + 1`. They
//! are built lazily per degree and cached on the complex.

use std::collections::BTreeMap;
use std::sync::{Arc, Mutex};

use num_bigint::BigInt;

use crate::chainalg::{delta, op_d, Chain};
use crate::combinat::{compositions, Composition};
use crate::exactla::{rank_mod_p, smith_normal_form, AbelianGroup, Coeff, SparseIntMatrix};
use crate::{Error, Result, Space};

/// Identifies a complex.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ComplexKind {
    /// Full plane complex of `C_n(C)`.
    Plane(u64),
    /// Even-parts subcomplex of size `m`, graded as a subcomplex of the full
    /// complex of size `m`.
    PlaneEven(u64),
    /// Mapping-cone complex of `C_n(S^2)`.
    Sphere(u64),
}

/// Basis label: a plain cell, or a cell of the shifted block of the cone.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub enum BasisLabel {
    Cell(Composition),
    ConeCell(Composition),
}

impl std::fmt::Display for BasisLabel {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            BasisLabel::Cell(c) => write!(f, "{c}"),
            BasisLabel::ConeCell(c) => write!(f, "{c}'"),
        }
    }
}

/// A graded cochain complex with lazily built boundary matrices.
#[derive(Debug)]
pub struct GradedComplex {
    kind: ComplexKind,
    max_degree: usize,
    mats: Mutex<BTreeMap<usize, Arc<SparseIntMatrix>>>,
}

/// Full plane complex `A_n`; degrees `0..=n-1` (plus the point case `n = 0`).
pub fn build_plane(n: u64) -> GradedComplex {
    GradedComplex {
        kind: ComplexKind::Plane(n),
        max_degree: n.saturating_sub(1) as usize,
        mats: Mutex::new(BTreeMap::new()),
    }
}

/// Even-parts subcomplex of even size `m`.
pub fn build_plane_even(m: u64) -> Result<GradedComplex> {
    if m % 2 != 0 {
        return Err(Error::OddSize(m));
    }
    Ok(GradedComplex {
        kind: ComplexKind::PlaneEven(m),
        max_degree: m.saturating_sub(1) as usize,
        mats: Mutex::new(BTreeMap::new()),
    })
}

/// Sphere complex `B_n = A_n^r + A_{n-1}^{r-2}`; degrees `0..=n`, except that
/// the one-point complex reaches degree 2 through its shifted block.
pub fn build_sphere(n: u64) -> GradedComplex {
    assert!(n >= 1, "sphere complex needs at least one point");
    GradedComplex {
        kind: ComplexKind::Sphere(n),
        max_degree: if n == 1 { 2 } else { n as usize },
        mats: Mutex::new(BTreeMap::new()),
    }
}

pub fn build(space: Space, n: u64) -> GradedComplex {
    match space {
        Space::Plane => build_plane(n),
        Space::Sphere => build_sphere(n),
    }
}

fn plane_basis(n: u64, r: usize) -> Vec<Composition> {
    if n == 0 {
        return if r == 0 { vec![Composition::empty()] } else { Vec::new() };
    }
    if r as u64 >= n {
        return Vec::new();
    }
    compositions(n, (n - r as u64) as usize)
}

fn plane_even_basis(m: u64, r: usize) -> Vec<Composition> {
    if m == 0 {
        return if r == 0 { vec![Composition::empty()] } else { Vec::new() };
    }
    if r as u64 >= m {
        return Vec::new();
    }
    let q = m - r as u64;
    if q > m / 2 {
        return Vec::new();
    }
    compositions(m / 2, q as usize)
        .into_iter()
        .map(|c| Composition::new(c.parts().iter().map(|&p| 2 * p).collect()))
        .collect()
}

impl GradedComplex {
    pub fn kind(&self) -> ComplexKind {
        self.kind
    }

    /// Inclusve upper end of the supported degree range (lower end is 0).
    pub fn max_degree(&self) -> usize {
        self.max_degree
    }

    pub fn basis_at(&self, r: usize) -> Vec<BasisLabel> {
        match self.kind {
            ComplexKind::Plane(n) => {
                plane_basis(n, r).into_iter().map(BasisLabel::Cell).collect()
            }
            ComplexKind::PlaneEven(m) => {
                plane_even_basis(m, r).into_iter().map(BasisLabel::Cell).collect()
            }
            ComplexKind::Sphere(n) => {
                if r > self.max_degree {
                    return Vec::new();
                }
                let mut basis: Vec<BasisLabel> =
                    plane_basis(n, r).into_iter().map(BasisLabel::Cell).collect();
                if r >= 2 {
                    basis.extend(
                        plane_basis(n - 1, r - 2).into_iter().map(BasisLabel::ConeCell),
                    );
                }
                basis
            }
        }
    }

    pub fn dim_at(&self, r: usize) -> usize {
        self.basis_at(r).len()
    }

    /// The differential out of degree `r`, row-per-source.
    pub fn matrix_at(&self, r: usize) -> Arc<SparseIntMatrix> {
        if let Some(m) = self.mats.lock().unwrap().get(&r) {
            return Arc::clone(m);
        }
        let built = Arc::new(self.build_matrix(r));
        self.mats
            .lock()
            .unwrap()
            .entry(r)
            .or_insert(built)
            .clone()
    }

    fn build_matrix(&self, r: usize) -> SparseIntMatrix {
        let sources = self.basis_at(r);
        let targets = self.basis_at(r + 1);
        let index: BTreeMap<&BasisLabel, usize> =
            targets.iter().enumerate().map(|(i, l)| (l, i)).collect();
        let mut m = SparseIntMatrix::zero(sources.len(), targets.len());
        let mut emit = |row: usize, chain: &Chain, cone: bool| {
            for (comp, coeff) in chain.terms() {
                let label = if cone {
                    BasisLabel::ConeCell(comp.clone())
                } else {
                    BasisLabel::Cell(comp.clone())
                };
                let col = *index
                    .get(&label)
                    .unwrap_or_else(|| panic!("missing target cell {label}"));
                m.add(row, col, coeff.clone());
            }
        };
        match self.kind {
            ComplexKind::Plane(_) | ComplexKind::PlaneEven(_) => {
                for (i, label) in sources.iter().enumerate() {
                    let BasisLabel::Cell(c) = label else { unreachable!() };
                    emit(i, &delta(&Chain::from_composition(c.clone())), false);
                }
            }
            ComplexKind::Sphere(n) => {
                // (a, b) -> (delta a, delta b + (-1)^{n-r} D a)
                let sign = if (n as i64 - r as i64).rem_euclid(2) == 0 { 1 } else { -1 };
                for (i, label) in sources.iter().enumerate() {
                    match label {
                        BasisLabel::Cell(c) => {
                            let chain = Chain::from_composition(c.clone());
                            emit(i, &delta(&chain), false);
                            emit(i, &op_d(&chain).scale(sign), true);
                        }
                        BasisLabel::ConeCell(c) => {
                            emit(i, &delta(&Chain::from_composition(c.clone())), true);
                        }
                    }
                }
            }
        }
        m
    }

    /// Check `matrix_at(r) * matrix_at(r+1) = 0` for each degree in the range.
    pub fn verify_composite_zero(&self, degrees: std::ops::RangeInclusive<usize>) -> Result<()> {
        for r in degrees {
            if r + 1 > self.max_degree {
                break;
            }
            let a = self.matrix_at(r);
            let b = self.matrix_at(r + 1);
            if !a.multiply(&b).is_zero() {
                return Err(Error::CompositeNonzero { degree: r });
            }
        }
        Ok(())
    }

    /// Cohomology groups for the given degrees, from Smith normal form
    /// (integral) or mod-p ranks. Verifies composite-zero on the way.
    pub fn cohomology(
        &self,
        coeff: Coeff,
        degrees: std::ops::RangeInclusive<usize>,
    ) -> Result<BTreeMap<usize, AbelianGroup>> {
        let (lo, hi) = (*degrees.start(), (*degrees.end()).min(self.max_degree));
        if lo > hi {
            return Ok(BTreeMap::new());
        }
        self.verify_composite_zero(lo.saturating_sub(1)..=hi)?;
        // one pass over the differentials, reused for both sides of each degree
        let mut rank: BTreeMap<i64, usize> = BTreeMap::new();
        let mut torsion: BTreeMap<i64, Vec<BigInt>> = BTreeMap::new();
        for r in (lo as i64 - 1)..=(hi as i64) {
            if r < 0 || r as usize > self.max_degree {
                rank.insert(r, 0);
                torsion.insert(r, Vec::new());
                continue;
            }
            let m = self.matrix_at(r as usize);
            let (rk, tors) = match coeff {
                Coeff::Integers => {
                    let snf = smith_normal_form(&m);
                    (snf.rank(), snf.nontrivial_divisors())
                }
                Coeff::ModP(p) => (rank_mod_p(&m, p), Vec::new()),
            };
            rank.insert(r, rk);
            torsion.insert(r, tors);
        }

        let mut out = BTreeMap::new();
        for r in lo..=hi {
            let dim = self.dim_at(r);
            let free = dim - rank[&(r as i64 - 1)] - rank[&(r as i64)];
            let group = match coeff {
                Coeff::Integers => {
                    AbelianGroup::from_divisors(free, torsion[&(r as i64 - 1)].clone())
                }
                Coeff::ModP(_) => AbelianGroup::free(free),
            };
            out.insert(r, group);
        }
        Ok(out)
    }
}

/// Cohomology of one even-size piece in the splitting of the plane complex.
#[derive(Debug, Clone)]
pub struct EvenPart {
    pub m: u64,
    pub rows: BTreeMap<usize, AbelianGroup>,
}

/// Cohomology of the plane complex as the direct sum of its even-part pieces
/// `H^r(A_n) = sum over even m <= n of H^r(A_{m,0})`.
///
/// Returns the per-piece tables and the combined table; the combined table
/// must agree with the direct computation on the full complex, which is the
/// content of the splitting and the insertion isomorphisms.
pub fn decompose_plane(n: u64, coeff: Coeff) -> Result<(Vec<EvenPart>, BTreeMap<usize, AbelianGroup>)> {
    let mut parts = Vec::new();
    let mut combined: BTreeMap<usize, AbelianGroup> = BTreeMap::new();
    let mut m = 0;
    while m <= n {
        let complex = build_plane_even(m)?;
        let rows = complex.cohomology(coeff, 0..=complex.max_degree())?;
        for (&r, g) in &rows {
            let entry = combined.entry(r).or_insert_with(AbelianGroup::trivial);
            *entry = entry.direct_sum(g);
        }
        parts.push(EvenPart { m, rows });
        m += 2;
    }
    combined.retain(|_, g| !g.is_trivial());
    Ok((parts, combined))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn plane_two_points() {
        let c = build_plane(2);
        assert_eq!(c.max_degree(), 1);
        assert_eq!(
            c.basis_at(0),
            vec![BasisLabel::Cell(Composition::new(vec![1, 1]))]
        );
        assert_eq!(c.basis_at(1), vec![BasisLabel::Cell(Composition::new(vec![2]))]);
        // P(1,1) = 0
        assert!(c.matrix_at(0).is_zero());
        let h = c.cohomology(Coeff::Integers, 0..=1).unwrap();
        assert_eq!(h[&0], AbelianGroup::free(1));
        assert_eq!(h[&1], AbelianGroup::free(1));
    }

    #[test]
    fn plane_point_and_empty() {
        let c = build_plane(0);
        let h = c.cohomology(Coeff::Integers, 0..=0).unwrap();
        assert_eq!(h[&0], AbelianGroup::free(1));

        let c = build_plane(1);
        let h = c.cohomology(Coeff::Integers, 0..=0).unwrap();
        assert_eq!(h[&0], AbelianGroup::free(1));
    }

    #[test]
    fn plane_four_points_torsion() {
        let c = build_plane(4);
        let h = c.cohomology(Coeff::Integers, 0..=3).unwrap();
        assert_eq!(h[&0], AbelianGroup::free(1));
        assert_eq!(h[&1], AbelianGroup::free(1));
        assert_eq!(h[&2], AbelianGroup::trivial());
        assert_eq!(h[&3], AbelianGroup::cyclic(2));
    }

    #[test]
    fn composite_zero_small_complexes() {
        for n in 0..=9 {
            let c = build_plane(n);
            c.verify_composite_zero(0..=c.max_degree()).unwrap();
        }
        for n in 1..=9 {
            let c = build_sphere(n);
            c.verify_composite_zero(0..=c.max_degree()).unwrap();
        }
        for m in [0u64, 2, 4, 6, 8, 10] {
            let c = build_plane_even(m).unwrap();
            c.verify_composite_zero(0..=c.max_degree()).unwrap();
        }
    }

    #[test]
    fn even_subcomplex_rejects_odd_size() {
        assert!(build_plane_even(5).is_err());
    }

    #[test]
    fn even_subcomplex_cell_count() {
        // total cells of the even complex of size 24: one per composition of 12
        let c = build_plane_even(24).unwrap();
        let total: usize = (0..=c.max_degree()).map(|r| c.dim_at(r)).sum();
        assert_eq!(total, 1 << 11);

        let c2 = build_plane_even(2).unwrap();
        let h = c2.cohomology(Coeff::Integers, 0..=1).unwrap();
        assert_eq!(h[&1], AbelianGroup::free(1)); // generated by [2]
    }

    #[test]
    fn sphere_small_tables() {
        let b2 = build_sphere(2);
        let h = b2.cohomology(Coeff::Integers, 0..=2).unwrap();
        assert_eq!(h[&0], AbelianGroup::free(1));
        assert_eq!(h[&1], AbelianGroup::trivial());
        assert_eq!(h[&2], AbelianGroup::cyclic(2));

        let b3 = build_sphere(3);
        let h = b3.cohomology(Coeff::Integers, 0..=3).unwrap();
        assert_eq!(h[&2], AbelianGroup::cyclic(4));
        assert_eq!(h[&3], AbelianGroup::free(1));

        let b1 = build_sphere(1);
        let h = b1.cohomology(Coeff::Integers, 0..=2).unwrap();
        assert_eq!(h[&0], AbelianGroup::free(1));
        assert_eq!(h[&1], AbelianGroup::trivial());
        assert_eq!(h[&2], AbelianGroup::free(1));
    }

    #[test]
    fn sphere_ten_points_has_three_torsion_in_degree_six() {
        let b10 = build_sphere(10);
        let h = b10.cohomology(Coeff::Integers, 6..=6).unwrap();
        let threes = h[&6].torsion_dim_at(3);
        assert_eq!(threes, 1);
    }

    #[test]
    fn decompose_matches_direct_plane() {
        for n in 0..=10 {
            let direct = build_plane(n);
            let full = direct.cohomology(Coeff::Integers, 0..=direct.max_degree()).unwrap();
            let (_, combined) = decompose_plane(n, Coeff::Integers).unwrap();
            for r in 0..=direct.max_degree() {
                let lhs = full.get(&r).cloned().unwrap_or_else(AbelianGroup::trivial);
                let rhs = combined.get(&r).cloned().unwrap_or_else(AbelianGroup::trivial);
                assert_eq!(lhs, rhs, "plane n={n}, degree {r}");
            }
            for p in [2u64, 3, 5] {
                let full = direct.cohomology(Coeff::ModP(p), 0..=direct.max_degree()).unwrap();
                let (_, combined) = decompose_plane(n, Coeff::ModP(p)).unwrap();
                for r in 0..=direct.max_degree() {
                    let lhs = full.get(&r).map(|g| g.free_rank()).unwrap_or(0);
                    let rhs = combined.get(&r).map(|g| g.free_rank()).unwrap_or(0);
                    assert_eq!(lhs, rhs, "plane n={n}, degree {r}, p={p}");
                }
            }
        }
    }

    #[test]
    fn euler_characteristic_is_conserved() {
        for n in 1..=10u64 {
            let c = build_plane(n);
            let h = c.cohomology(Coeff::Integers, 0..=c.max_degree()).unwrap();
            let chi_cells: i64 = (0..=c.max_degree())
                .map(|r| {
                    let sign = if r % 2 == 0 { 1 } else { -1 };
                    sign * c.dim_at(r) as i64
                })
                .sum();
            let chi_h: i64 = h
                .iter()
                .map(|(&r, g)| {
                    let sign = if r % 2 == 0 { 1 } else { -1 };
                    sign * g.free_rank() as i64
                })
                .sum();
            assert_eq!(chi_cells, chi_h, "Euler characteristic at n={n}");
        }
    }
}
