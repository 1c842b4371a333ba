//! Verification suites: the operator identities, the long-exact-sequence
//! rank bookkeeping, periodicity, stability and the absence of higher
//! torsion, each run over an exhaustive grid with the first counterexample
//! reported on failure.

use std::fmt;
use std::str::FromStr;

use crate::chainalg::{
    defect_last_two_formula, delta, homotopy_defect, ins_t, monomial_chain, op_d, Chain,
};
use crate::combinat::{compositions, monomials_of_degree, Composition, Monomial, Y0Filter};
use crate::exactla::Coeff;
use crate::{Error, Result};

use super::{DstarRoute, Engine, Strategy};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Suite {
    /// `delta . delta = 0` on every composition up to the size bound.
    DSquared,
    /// `D . delta = delta . D` on every composition up to the size bound.
    DeltaCommutesD,
    /// The homotopy defect equals its case formula on every composition.
    LemmaE1,
    /// Defect of a padded all-even composition ending in 2.
    InsHomotopy,
    /// Defect on realized monomials, odd primes.
    CorE2,
    /// Defect on realized monomials at p = 2.
    CorE3,
    /// Long-exact-sequence dimension bookkeeping and the two D* routes.
    LesRanks,
    /// Mod-p dimensions of the sphere repeat with period p.
    Periodicity,
    /// Integral plane cohomology is constant in the stable range.
    Stability,
    /// No order-p^2 elements in the sphere groups from degree 4 on.
    SplitNoPSquared,
}

pub const ALL_SUITES: [Suite; 10] = [
    Suite::DSquared,
    Suite::DeltaCommutesD,
    Suite::LemmaE1,
    Suite::InsHomotopy,
    Suite::CorE2,
    Suite::CorE3,
    Suite::LesRanks,
    Suite::Periodicity,
    Suite::Stability,
    Suite::SplitNoPSquared,
];

impl fmt::Display for Suite {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Suite::DSquared => "delta-squared",
            Suite::DeltaCommutesD => "delta-commutes-d",
            Suite::LemmaE1 => "lemma-e1",
            Suite::InsHomotopy => "ins-homotopy",
            Suite::CorE2 => "cor-e2",
            Suite::CorE3 => "cor-e3",
            Suite::LesRanks => "les-ranks",
            Suite::Periodicity => "periodicity",
            Suite::Stability => "stability",
            Suite::SplitNoPSquared => "split-no-p-squared",
        };
        write!(f, "{s}")
    }
}

impl FromStr for Suite {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let key: String = s
            .chars()
            .filter(|c| c.is_ascii_alphanumeric())
            .collect::<String>()
            .to_ascii_lowercase();
        let suite = match key.as_str() {
            "dsquared" | "deltasquared" => Suite::DSquared,
            "deltacommutesd" | "dcommutesdelta" => Suite::DeltaCommutesD,
            "lemmae1" => Suite::LemmaE1,
            "inshomotopy" => Suite::InsHomotopy,
            "core2" => Suite::CorE2,
            "core3" => Suite::CorE3,
            "lesranks" => Suite::LesRanks,
            "periodicity" => Suite::Periodicity,
            "stability" => Suite::Stability,
            "splitnopsquared" | "splitnop2" => Suite::SplitNoPSquared,
            _ => return Err(Error::UnknownSuite(s.to_string())),
        };
        Ok(suite)
    }
}

/// Optional overrides for the per-suite default grids.
#[derive(Debug, Clone, Default)]
pub struct Bounds {
    pub max_size: Option<u64>,
    pub max_n: Option<u64>,
    pub max_r: Option<u64>,
    pub primes: Option<Vec<u64>>,
}

/// Result of one suite run.
#[derive(Debug, Clone)]
pub struct Outcome {
    pub suite: Suite,
    pub cases: usize,
    pub failure: Option<String>,
}

impl Outcome {
    pub fn passed(&self) -> bool {
        self.failure.is_none()
    }
}

impl fmt::Display for Outcome {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.failure {
            None => write!(f, "{}: pass ({} cases)", self.suite, self.cases),
            Some(msg) => write!(f, "{}: FAIL after {} cases: {msg}", self.suite, self.cases),
        }
    }
}

fn all_compositions_up_to(max_size: u64) -> impl Iterator<Item = Composition> {
    (1..=max_size).flat_map(move |n| {
        (1..=n as usize).flat_map(move |q| compositions(n, q).into_iter())
    })
}

fn even_compositions_ending_in_two(max_size: u64) -> Vec<Composition> {
    let mut out = Vec::new();
    let mut m = 2;
    while m <= max_size {
        for q in 1..=(m / 2) as usize {
            for half in compositions(m / 2, q) {
                let parts: Vec<u32> = half.parts().iter().map(|&p| 2 * p).collect();
                if *parts.last().unwrap() == 2 {
                    out.push(Composition::new(parts));
                }
            }
        }
        m += 2;
    }
    out
}

fn sign_pow(exponent: i64) -> i64 {
    if exponent.rem_euclid(2) == 0 {
        1
    } else {
        -1
    }
}

struct Runner {
    suite: Suite,
    cases: usize,
    failure: Option<String>,
}

impl Runner {
    fn new(suite: Suite) -> Self {
        Runner { suite, cases: 0, failure: None }
    }

    /// Record one case; returns false once a failure is present.
    fn check(&mut self, ok: bool, describe: impl FnOnce() -> String) -> bool {
        if self.failure.is_some() {
            return false;
        }
        self.cases += 1;
        if !ok {
            self.failure = Some(describe());
        }
        self.failure.is_none()
    }

    fn finish(self) -> Outcome {
        Outcome { suite: self.suite, cases: self.cases, failure: self.failure }
    }
}

/// Run one suite; bounds not set fall back to the suite's default grid.
pub fn run(engine: &Engine, suite: Suite, bounds: &Bounds) -> Result<Outcome> {
    let mut r = Runner::new(suite);
    match suite {
        Suite::DSquared => {
            let max = bounds.max_size.or(bounds.max_n).unwrap_or(12);
            for c in all_compositions_up_to(max) {
                let dd = delta(&delta(&Chain::from_composition(c.clone())));
                if !r.check(dd.is_zero(), || format!("delta^2 {c} = {dd}")) {
                    break;
                }
            }
        }
        Suite::DeltaCommutesD => {
            let max = bounds.max_size.or(bounds.max_n).unwrap_or(10);
            for c in all_compositions_up_to(max) {
                let chain = Chain::from_composition(c.clone());
                let lhs = op_d(&delta(&chain));
                let rhs = delta(&op_d(&chain));
                if !r.check(lhs == rhs, || {
                    format!("D delta {c} = {lhs} but delta D {c} = {rhs}")
                }) {
                    break;
                }
            }
        }
        Suite::LemmaE1 => {
            let max = bounds.max_size.unwrap_or(10);
            for c in all_compositions_up_to(max) {
                let defect = homotopy_defect(&Chain::from_composition(c.clone()));
                let expected = if *c.parts().last().unwrap() == 2 {
                    defect_last_two_formula(&c)
                } else {
                    Chain::zero()
                };
                if !r.check(defect == expected, || {
                    format!("defect {c} = {defect}, expected {expected}")
                }) {
                    break;
                }
            }
        }
        Suite::InsHomotopy => {
            let max = bounds.max_size.unwrap_or(10);
            'outer: for c in even_compositions_ending_in_two(max) {
                let prefix = Composition::new(c.parts()[..c.len() - 1].to_vec());
                for t in 0..=(max + 2 - c.size()) as usize {
                    let lhs = homotopy_defect(&ins_t(t, &Chain::from_composition(c.clone())));
                    let factor = 2 * (t as i64 + 1) * sign_pow(t as i64 + 1);
                    let rhs =
                        ins_t(t + 1, &Chain::from_composition(prefix.clone())).scale(factor);
                    if !r.check(lhs == rhs, || {
                        format!("defect of Ins_{t} {c} = {lhs}, expected {rhs}")
                    }) {
                        break 'outer;
                    }
                }
            }
        }
        Suite::CorE2 => {
            let max = bounds.max_size.unwrap_or(10);
            let primes = bounds.primes.clone().unwrap_or_else(|| vec![3, 5]);
            'outer2: for &p in primes.iter().filter(|&&p| p > 2) {
                for deg in 0..=max {
                    for m in monomials_of_degree(p, deg, max, Y0Filter::Forbid) {
                        if !check_defect_corollaries(&mut r, &m, p, max, false) {
                            break 'outer2;
                        }
                    }
                }
            }
        }
        Suite::CorE3 => {
            let max = bounds.max_size.unwrap_or(10);
            'outer3: for deg in 0..=max {
                for m in monomials_of_degree(2, deg, max, Y0Filter::Forbid) {
                    if !check_defect_corollaries(&mut r, &m, 2, max, true) {
                        break 'outer3;
                    }
                }
            }
        }
        Suite::LesRanks => {
            let max_n = bounds.max_n.unwrap_or(10);
            let primes = bounds.primes.clone().unwrap_or_else(|| vec![2, 3, 5]);
            'outer4: for &p in &primes {
                for n in 1..=max_n {
                    let sphere = engine.cohomology_sphere(n, Coeff::ModP(p), Strategy::Matrix)?;
                    let plane_n = engine.cohomology_plane(n, Coeff::ModP(p), Strategy::Matrix)?;
                    let plane_prev =
                        engine.cohomology_plane(n - 1, Coeff::ModP(p), Strategy::Matrix)?;
                    for rr in 0..=sphere.max_degree() as u64 {
                        let formula = engine.rank_dstar(n, rr, p, DstarRoute::Formula)?;
                        let matrix = engine.rank_dstar(n, rr, p, DstarRoute::Matrix)?;
                        if !r.check(formula == matrix, || {
                            format!("rank D* mismatch at n={n}, r={rr}, p={p}: formula {formula}, matrix {matrix}")
                        }) {
                            break 'outer4;
                        }
                        let lhs = sphere.dim(rr as usize);
                        let a_here = plane_n.dim(rr as usize);
                        let a_prev = if rr >= 2 { plane_prev.dim(rr as usize - 2) } else { 0 };
                        let d_here = matrix;
                        let d_below = if rr >= 1 {
                            engine.rank_dstar(n, rr - 1, p, DstarRoute::Matrix)?
                        } else {
                            0
                        };
                        let rhs = a_here + a_prev - d_here - d_below;
                        if !r.check(lhs == rhs, || {
                            format!("long exact sequence at n={n}, r={rr}, p={p}: dim {lhs} != {a_here} + {a_prev} - {d_here} - {d_below}")
                        }) {
                            break 'outer4;
                        }
                    }
                }
            }
        }
        Suite::Periodicity => {
            let max_r = bounds.max_r.unwrap_or(8);
            let max_n = bounds.max_n.unwrap_or(40);
            let primes = bounds.primes.clone().unwrap_or_else(|| vec![2, 3, 5]);
            'outer5: for &p in &primes {
                for deg in 0..=max_r {
                    for n in (2 * deg)..=max_n.saturating_sub(p) {
                        let a = crate::combinat::dim_sphere_mod_p(p, n, deg)?;
                        let b = crate::combinat::dim_sphere_mod_p(p, n + p, deg)?;
                        if !r.check(a == b, || {
                            format!("dim H^{deg}(sphere, Z/{p}) differs between n={n} ({a}) and n={} ({b})", n + p)
                        }) {
                            break 'outer5;
                        }
                    }
                }
            }
        }
        Suite::Stability => {
            let max_i = bounds.max_r.unwrap_or(5);
            let max_n = bounds.max_n.unwrap_or(12);
            'outer6: for i in 0..=max_i {
                // the degree-one group only settles once two points are present
                let start = (2 * i).saturating_sub(2).max(2);
                for n in start..max_n {
                    let here = engine
                        .cohomology_plane(n, Coeff::Integers, Strategy::Reconstructed)?
                        .group(i as usize);
                    let next = engine
                        .cohomology_plane(n + 1, Coeff::Integers, Strategy::Reconstructed)?
                        .group(i as usize);
                    if !r.check(here == next, || {
                        format!("H^{i} changes from {here} at n={n} to {next} at n={}", n + 1)
                    }) {
                        break 'outer6;
                    }
                }
            }
        }
        Suite::SplitNoPSquared => {
            let max_n = bounds.max_n.unwrap_or(10);
            'outer7: for n in 1..=max_n {
                let table = engine.cohomology_sphere(n, Coeff::Integers, Strategy::Matrix)?;
                for (&deg, entry) in &table.rows {
                    if deg < 4 {
                        continue;
                    }
                    let g = entry.group().expect("integral table");
                    if !r.check(g.is_squarefree(), || {
                        format!("H^{deg}(sphere, Z) at n={n} is {g}, not squarefree")
                    }) {
                        break 'outer7;
                    }
                }
            }
        }
    }
    Ok(r.finish())
}

/// The defect identities on realized monomials. `m` carries no `y_0`. For odd
/// primes: the defect of `m` vanishes and the defect of `m y_0` is
/// `2 (-1)^{n-s+1} (n-s+1)` times `m`, where `s` is the size of `m y_0`. At
/// `p = 2` the defect of `m` instead produces `m / x_1 * y_0` with factor
/// `2 (-1)^{n-s+3} (n-s+3)` when `x_1` divides `m`.
fn check_defect_corollaries(
    r: &mut Runner,
    m: &Monomial,
    p: u64,
    max: u64,
    two_adic: bool,
) -> bool {
    let with_y0 = Monomial::new(
        p,
        m.x_exponents().clone(),
        m.y_indices().iter().copied().chain([0]).collect(),
    );
    let s = with_y0.size();
    for n in s..=(max + 2) {
        // defect of the plain monomial
        let plain = homotopy_defect(&monomial_chain(m, n).expect("size bounded"));
        if two_adic {
            let x1 = m.x_exponents().get(&1).copied().unwrap_or(0);
            if x1 == 0 {
                if !r.check(plain.is_zero(), || {
                    format!("defect of {m} at n={n} is {plain}, expected 0")
                }) {
                    return false;
                }
            } else {
                let mut xs = m.x_exponents().clone();
                if x1 == 1 {
                    xs.remove(&1);
                } else {
                    xs.insert(1, x1 - 1);
                }
                let shifted = Monomial::new(
                    2,
                    xs,
                    m.y_indices().iter().copied().chain([0]).collect(),
                );
                let factor = 2 * (n as i64 - s as i64 + 3) * sign_pow(n as i64 - s as i64 + 3);
                let rhs = monomial_chain(&shifted, n - 1)
                    .expect("size shrinks")
                    .scale(factor);
                if !r.check(plain == rhs, || {
                    format!("defect of {m} at n={n} is {plain}, expected {factor} * {shifted}")
                }) {
                    return false;
                }
            }
        } else if !r.check(plain.is_zero(), || {
            format!("defect of {m} at n={n} is {plain}, expected 0")
        }) {
            return false;
        }
        // defect of the monomial with y_0
        let defect = homotopy_defect(&monomial_chain(&with_y0, n).expect("size bounded"));
        let factor = 2 * (n as i64 - s as i64 + 1) * sign_pow(n as i64 - s as i64 + 1);
        let rhs = monomial_chain(m, n - 1).expect("size shrinks").scale(factor);
        if !r.check(defect == rhs, || {
            format!("defect of {with_y0} at n={n} is {defect}, expected {factor} * {m}")
        }) {
            return false;
        }
    }
    true
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn suite_names_parse() {
        assert_eq!("lemmaE1".parse::<Suite>().unwrap(), Suite::LemmaE1);
        assert_eq!("delta-squared".parse::<Suite>().unwrap(), Suite::DSquared);
        assert_eq!("split-no-p-squared".parse::<Suite>().unwrap(), Suite::SplitNoPSquared);
        assert!("frobnicate".parse::<Suite>().is_err());
        for s in ALL_SUITES {
            assert_eq!(s.to_string().parse::<Suite>().unwrap(), s);
        }
    }

    #[test]
    fn operator_identity_suites_pass() {
        let e = Engine::new();
        let small = Bounds { max_size: Some(8), ..Default::default() };
        for suite in [Suite::DSquared, Suite::DeltaCommutesD, Suite::LemmaE1, Suite::InsHomotopy] {
            let outcome = run(&e, suite, &small).unwrap();
            assert!(outcome.passed(), "{outcome}");
            assert!(outcome.cases > 0);
        }
    }

    #[test]
    fn defect_corollary_suites_pass() {
        let e = Engine::new();
        let small = Bounds { max_size: Some(8), ..Default::default() };
        for suite in [Suite::CorE2, Suite::CorE3] {
            let outcome = run(&e, suite, &small).unwrap();
            assert!(outcome.passed(), "{outcome}");
            assert!(outcome.cases > 0);
        }
    }

    #[test]
    fn table_level_suites_pass() {
        let e = Engine::new();
        let bounds = Bounds { max_n: Some(7), ..Default::default() };
        for suite in [Suite::LesRanks, Suite::Stability, Suite::SplitNoPSquared] {
            let outcome = run(&e, suite, &bounds).unwrap();
            assert!(outcome.passed(), "{outcome}");
        }
        let outcome = run(&e, Suite::Periodicity, &Bounds::default()).unwrap();
        assert!(outcome.passed(), "{outcome}");
    }
}
