//! No-signalling polytope: exact optimization of Bell functionals,
//! triviality and facet (tightness) certificates.
//!
//! The linear program is solved in its dual form: one nonnegative variable
//! λ(a|x) per positivity constraint p(a|x) ≥ 0 and one equality per
//! Collins–Gisin coordinate. Every optimum is returned with both a primal
//! box and the dual λ, and both are checked in exact arithmetic.

mod cg;
mod rank;
mod simplex;

use std::fmt;

use num_traits::{One, Signed, Zero};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::bellgen::{BellInequality, CorrelationBox, DeterministicStrategy, Scenario};
use crate::rational::Rational;

pub use cg::CgLayout;
pub use rank::{bareiss_rank, exact_affine_rank, modular_affine_rank, random_prime, rational_rank};

/// Seed used when the caller does not supply one.
pub const DEFAULT_SEED: u64 = 0x5eed;

/// Largest number of deterministic strategies the tightness check scans.
pub const MAX_STRATEGIES: u128 = 1 << 24;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum NsError {
    #[error("the no-signalling linear program is infeasible")]
    Infeasible,
    #[error("the no-signalling linear program is unbounded")]
    Unbounded,
    #[error("affine rank of an empty point set")]
    EmptyInput,
    #[error("points have different lengths")]
    RaggedInput,
    #[error("scenario has {0} deterministic strategies, above the supported maximum")]
    TooManyStrategies(u128),
    #[error("exact verification of the optimum failed: {0}")]
    VerificationFailed(String),
}

/// d = ∏ (m_i + 1) − 1 for two outcomes per setting.
pub fn polytope_dimension(scenario: &Scenario) -> usize {
    scenario.settings().iter().map(|m| m + 1).product::<usize>() - 1
}

#[derive(Clone, Debug)]
pub struct NsOptimum {
    pub value: Rational,
    pub optimal_box: CorrelationBox<Rational>,
    /// λ(a|x) ≥ 0 indexed like box entries; Σ λ(a|x) p(a|x) bounds the
    /// functional on every no-signalling box.
    pub dual: Vec<Rational>,
    pub pivots: usize,
}

/// Maximum of the functional over the no-signalling polytope.
pub fn ns_maximum(ineq: &BellInequality) -> Result<NsOptimum, NsError> {
    optimize(ineq, true)
}

/// Minimum of the functional over the no-signalling polytope.
pub fn ns_minimum(ineq: &BellInequality) -> Result<NsOptimum, NsError> {
    optimize(ineq, false)
}

/// True iff no no-signalling box exceeds the classical bound.
///
/// A violating [`dyadic_witness_box`] settles the question without the
/// linear program.
pub fn is_trivial(ineq: &BellInequality) -> Result<bool, NsError> {
    if dyadic_witness_box(ineq).is_some() {
        return Ok(false);
    }
    Ok(ns_maximum(ineq)?.value == ineq.classical_bound)
}

/// Exact witness box of the terms read as qubit product vectors, with the
/// two bases of every party at angles 0 and π/4.
///
/// Local overlaps are then 0, 1/2 or 1, so every entry is rational. The box
/// is returned only when it passes the exact no-signalling check and
/// exceeds the classical bound.
pub fn dyadic_witness_box(ineq: &BellInequality) -> Option<CorrelationBox<Rational>> {
    let sc = &ineq.scenario;
    let n = sc.parties();
    if n > 30 || sc.settings().iter().any(|&m| m > 2) || sc.box_len()? > 1 << 22 {
        return None;
    }
    // Overlap of outcome a at setting x with term t, in units of 2^-n.
    let overlap = |a: &[u8], x: &[usize], t: &crate::bellgen::BellTerm| -> i64 {
        let mut halves = 0u32;
        for i in 0..n {
            if x[i] != t.settings[i] {
                halves += 1;
            } else if a[i] != t.outcomes[i] {
                return 0;
            }
        }
        1i64 << (n as u32 - halves)
    };
    let mut counts = Vec::with_capacity(sc.box_len()?);
    let per = sc.outcome_combinations();
    for e in 0..sc.box_len()? {
        let (a, x) = (sc.outcome_list(e % per), sc.setting_list(e / per));
        counts.push(ineq.terms.iter().map(|t| overlap(&a, &x, t)).sum::<i64>());
    }
    let eps = *counts.iter().min()?;
    let size = ineq.terms.len() as i64;
    if eps == 0 || eps >= size {
        return None;
    }
    let den = Rational::from_integer(((size - eps) << n).into());
    let b = CorrelationBox {
        scenario: sc.clone(),
        values: counts
            .iter()
            .map(|&c| Rational::from_integer((c - eps).into()) / &den)
            .collect(),
    };
    let exceeds = ineq.evaluate(&b).ok()? > ineq.classical_bound;
    (exceeds && b.is_valid(true)).then_some(b)
}

/// True iff the functional takes one value on the whole polytope.
pub fn is_constant_on_polytope(ineq: &BellInequality) -> Result<bool, NsError> {
    Ok(ns_maximum(ineq)?.value == ns_minimum(ineq)?.value)
}

fn optimize(ineq: &BellInequality, maximize: bool) -> Result<NsOptimum, NsError> {
    let sc = &ineq.scenario;
    let layout = CgLayout::new(sc);
    let dim = layout.len();
    let sgn = if maximize { Rational::one() } else { -Rational::one() };
    let mut objective = vec![Rational::zero(); dim];
    for t in &ineq.terms {
        let w = &t.weight * &sgn;
        for (k, s) in layout.expand(&t.outcomes, &t.settings) {
            if s > 0 {
                objective[k] += &w;
            } else {
                objective[k] -= &w;
            }
        }
    }
    let entries = sc.box_len().expect("scenario fits");
    let per = sc.outcome_combinations();
    let mut rows = vec![vec![Rational::zero(); entries]; dim - 1];
    let mut cost = vec![Rational::zero(); entries];
    for e in 0..entries {
        let x = sc.setting_list(e / per);
        let a = sc.outcome_list(e % per);
        for (k, s) in layout.expand(&a, &x) {
            let v = Rational::from_integer(s.into());
            if k == 0 {
                cost[e] += v;
            } else {
                rows[k - 1][e] -= v;
            }
        }
    }
    let lp = simplex::StandardLp {
        rows,
        rhs: objective[1..].to_vec(),
        cost,
    };
    let sol = match simplex::solve(&lp) {
        simplex::LpOutcome::Optimal(s) => s,
        simplex::LpOutcome::Infeasible => return Err(NsError::Unbounded),
        simplex::LpOutcome::Unbounded => return Err(NsError::Infeasible),
    };
    let mut y = Vec::with_capacity(dim);
    y.push(Rational::one());
    y.extend(sol.duals.iter().cloned());
    let optimal_box = layout.to_box(sc, &y);
    let value = (&sol.value + &objective[0]) * &sgn;
    verify(ineq, &optimal_box, &value, &lp, &sol.x)?;
    Ok(NsOptimum {
        value,
        optimal_box,
        dual: sol.x,
        pivots: sol.pivots,
    })
}

fn verify(
    ineq: &BellInequality,
    b: &CorrelationBox<Rational>,
    value: &Rational,
    lp: &simplex::StandardLp,
    lambda: &[Rational],
) -> Result<(), NsError> {
    let fail = |m: &str| Err(NsError::VerificationFailed(m.to_string()));
    if !b.is_valid(true) {
        return fail("optimal box violates a no-signalling constraint");
    }
    let at_box = ineq.evaluate(b).expect("same scenario");
    if at_box != *value {
        return fail("box value differs from the optimum");
    }
    if lambda.iter().any(|l| l.is_negative()) {
        return fail("negative dual multiplier");
    }
    for (row, rhs) in lp.rows.iter().zip(&lp.rhs) {
        let lhs = row
            .iter()
            .zip(lambda)
            .filter(|(a, _)| !a.is_zero())
            .fold(Rational::zero(), |acc, (a, l)| acc + a * l);
        if lhs != *rhs {
            return fail("dual multipliers do not reproduce the functional");
        }
    }
    Ok(())
}

/// Affine dimension of a set of points: rank of differences to the first.
pub fn affine_rank(points: &[Vec<Rational>]) -> Result<usize, NsError> {
    let base = points.first().ok_or(NsError::EmptyInput)?;
    if points.iter().any(|p| p.len() != base.len()) {
        return Err(NsError::RaggedInput);
    }
    let diffs: Vec<Vec<Rational>> = points[1..]
        .iter()
        .map(|p| p.iter().zip(base).map(|(a, b)| a - b).collect())
        .collect();
    Ok(rational_rank(&diffs))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Verdict {
    Tight,
    NotTight,
    Trivial,
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Verdict::Tight => "Tight",
            Verdict::NotTight => "NotTight",
            Verdict::Trivial => "Trivial",
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum RankMethod {
    /// Rank modulo a prime reached d − 1, which bounds the rational rank
    /// from below; d − 1 is also an upper bound once some strategy misses.
    Modular { prime: u64 },
    /// Fraction-free elimination over the integers.
    Exact,
}

#[derive(Clone, Debug)]
pub struct TightnessCertificate {
    pub saturating: Vec<DeterministicStrategy>,
    pub strategy_count: u128,
    pub affine_dimension: usize,
    pub polytope_dimension: usize,
    pub verdict: Verdict,
    pub method: RankMethod,
}

pub fn is_tight(ineq: &BellInequality) -> Result<TightnessCertificate, NsError> {
    is_tight_with_seed(ineq, DEFAULT_SEED)
}

/// Collects the strategies attaining the classical bound and measures the
/// affine dimension of their Collins–Gisin vectors.
pub fn is_tight_with_seed(ineq: &BellInequality, seed: u64) -> Result<TightnessCertificate, NsError> {
    let sc = &ineq.scenario;
    let total = sc
        .strategy_count()
        .filter(|&c| c <= MAX_STRATEGIES)
        .ok_or(NsError::TooManyStrategies(sc.strategy_count().unwrap_or(u128::MAX)))?;
    let d = polytope_dimension(sc);
    let saturating = saturating_strategies(ineq);
    let layout = CgLayout::new(sc);
    let points: Vec<Vec<i64>> = saturating
        .iter()
        .map(|s| layout.strategy(s).into_iter().map(i64::from).collect())
        .collect();
    if saturating.len() as u128 == total {
        return Ok(TightnessCertificate {
            saturating,
            strategy_count: total,
            affine_dimension: d,
            polytope_dimension: d,
            verdict: Verdict::Trivial,
            method: RankMethod::Exact,
        });
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let prime = random_prime(&mut rng);
    let modular = modular_affine_rank(&points, prime, d - 1);
    let (affine_dimension, method) = if modular >= d - 1 {
        (d - 1, RankMethod::Modular { prime })
    } else {
        (exact_affine_rank(&points), RankMethod::Exact)
    };
    let verdict = if affine_dimension == d - 1 {
        Verdict::Tight
    } else {
        Verdict::NotTight
    };
    Ok(TightnessCertificate {
        saturating,
        strategy_count: total,
        affine_dimension,
        polytope_dimension: d,
        verdict,
        method,
    })
}

/// Deterministic strategies whose value equals the classical bound.
pub fn saturating_strategies(ineq: &BellInequality) -> Vec<DeterministicStrategy> {
    let mut out = Vec::new();
    let mut tables = Vec::new();
    let alive: Vec<usize> = (0..ineq.terms.len()).collect();
    collect_saturating(ineq, 0, &alive, &mut tables, &mut out);
    out
}

fn collect_saturating(
    ineq: &BellInequality,
    party: usize,
    alive: &[usize],
    tables: &mut Vec<Vec<u8>>,
    out: &mut Vec<DeterministicStrategy>,
) {
    let sum = alive
        .iter()
        .fold(Rational::zero(), |acc, &k| acc + &ineq.terms[k].weight);
    if sum < ineq.classical_bound {
        return;
    }
    let sc = &ineq.scenario;
    if party == sc.parties() {
        out.push(DeterministicStrategy {
            tables: tables.clone(),
        });
        return;
    }
    let m = sc.settings()[party];
    for code in 0u64..1 << m {
        let table: Vec<u8> = (0..m).map(|x| (code >> x & 1) as u8).collect();
        let next: Vec<usize> = alive
            .iter()
            .copied()
            .filter(|&k| {
                let t = &ineq.terms[k];
                table[t.settings[party]] == t.outcomes[party]
            })
            .collect();
        tables.push(table);
        collect_saturating(ineq, party + 1, &next, tables, out);
        tables.pop();
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bellgen::{build_inequality, strategies, BellTerm};
    use crate::pvset::ProductVectorSet;
    use crate::rational::{int, rat};

    fn ineq(words: &[&str]) -> BellInequality {
        build_inequality(&ProductVectorSet::from_symbols(words).unwrap(), None).unwrap()
    }

    #[test]
    fn dimensions() {
        assert_eq!(polytope_dimension(&Scenario::new(vec![1]).unwrap()), 1);
        assert_eq!(polytope_dimension(&Scenario::new(vec![2, 2, 2]).unwrap()), 26);
        assert_eq!(polytope_dimension(&Scenario::new(vec![2, 2, 2, 3]).unwrap()), 107);
    }

    #[test]
    fn deterministic_cloud_spans_polytope() {
        for m in [vec![1], vec![2, 2, 2], vec![2, 3]] {
            let sc = Scenario::new(m).unwrap();
            let pts: Vec<Vec<Rational>> = strategies(&sc)
                .map(|s| s.to_box::<Rational>(&sc).values)
                .collect();
            assert_eq!(affine_rank(&pts).unwrap(), polytope_dimension(&sc));
        }
    }

    #[test]
    fn affine_rank_examples() {
        assert_eq!(affine_rank(&[vec![int(3), int(4)]]).unwrap(), 0);
        let tri = [vec![int(0), int(0)], vec![int(1), int(0)], vec![int(0), int(1)]];
        assert_eq!(affine_rank(&tri).unwrap(), 2);
        assert_eq!(affine_rank(&[]), Err(NsError::EmptyInput));
    }

    #[test]
    fn shifts_ns_value_and_tightness() {
        let b = ineq(&["000", "1ēe", "e1ē", "ēe1"]);
        let opt = ns_maximum(&b).unwrap();
        assert_eq!(opt.value, rat(4, 3));
        assert!(!is_trivial(&b).unwrap());
        let cert = is_tight(&b).unwrap();
        assert_eq!(cert.verdict, Verdict::Tight);
        assert_eq!(cert.affine_dimension, 25);
        assert_eq!(cert.polytope_dimension, 26);
    }

    #[test]
    fn dyadic_witness_on_shifts() {
        let b = ineq(&["000", "1ēe", "e1ē", "ēe1"]);
        let w = dyadic_witness_box(&b).unwrap();
        assert_eq!(b.evaluate(&w).unwrap(), rat(7, 6));
        assert!(w.is_valid(true));
        let full = ineq(&["000", "e01", "01e", "01ē", "1e0", "ē01", "1ē0", "111"]);
        assert!(dyadic_witness_box(&full).is_none());
        assert!(dyadic_witness_box(&ineq(&["00"])).is_none());
    }

    #[test]
    fn full_basis_is_trivial() {
        let b = ineq(&["000", "e01", "01e", "01ē", "1e0", "ē01", "1ē0", "111"]);
        assert_eq!(ns_maximum(&b).unwrap().value, int(1));
        assert!(is_trivial(&b).unwrap());
        assert!(is_constant_on_polytope(&b).unwrap());
        assert_eq!(is_tight(&b).unwrap().verdict, Verdict::Trivial);
    }

    #[test]
    fn single_term_is_trivial() {
        let b = ineq(&["00"]);
        assert!(is_trivial(&b).unwrap());
        assert_eq!(ns_minimum(&b).unwrap().value, int(0));
    }

    #[test]
    fn empty_inequality() {
        let b = BellInequality::new(Scenario::new(vec![2, 2]).unwrap(), vec![]).unwrap();
        assert_eq!(ns_maximum(&b).unwrap().value, int(0));
        assert_eq!(is_tight(&b).unwrap().verdict, Verdict::Trivial);
    }

    #[test]
    fn chsh_like_two_party_value() {
        // p(00|00)+p(11|00)+p(00|01)+p(11|01)+p(00|10)+p(11|10)+p(01|11)+p(10|11) ≤ 3
        let sc = Scenario::new(vec![2, 2]).unwrap();
        let mut terms = Vec::new();
        for x in 0..2usize {
            for y in 0..2usize {
                for a in 0..2u8 {
                    let b = a ^ u8::from(x & y == 1);
                    terms.push(BellTerm::unit(vec![a, b], vec![x, y]));
                }
            }
        }
        let b = BellInequality::new(sc, terms).unwrap();
        assert_eq!(b.classical_bound, int(3));
        assert_eq!(ns_maximum(&b).unwrap().value, int(4));
        assert_eq!(is_tight(&b).unwrap().verdict, Verdict::Tight);
    }
}
