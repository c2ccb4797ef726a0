//! Bell inequalities built from orthogonal product-vector sets, and their
//! classical values.

use std::collections::HashSet;
use std::fmt;

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use thiserror::Error;

use crate::pvset::{ProductVectorSet, PvsError};
use crate::rational::{format_rational, to_f64, Rational};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum BellError {
    #[error("a scenario needs at least one party with at least one setting each")]
    EmptyScenario,
    #[error("scenario has too many settings or strategies to index")]
    ScenarioTooLarge,
    #[error("box and inequality belong to different scenarios")]
    ScenarioMismatch,
    #[error("term {term}: {reason}")]
    InvalidTerm { term: usize, reason: String },
    #[error("terms {0} and {1} share the same outcome and setting lists")]
    DuplicateTerm(usize, usize),
    #[error("weight {0} lies outside [0, 1]")]
    InvalidWeight(String),
    #[error("{expected} weights expected, {found} given")]
    WeightCount { expected: usize, found: usize },
    #[error(transparent)]
    Pvs(#[from] PvsError),
}

/// Party count, settings per party and two outcomes per setting.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Scenario {
    settings: Vec<usize>,
}

impl Scenario {
    pub fn new(settings_per_party: Vec<usize>) -> Result<Self, BellError> {
        if settings_per_party.is_empty() || settings_per_party.contains(&0) {
            return Err(BellError::EmptyScenario);
        }
        let s = Self {
            settings: settings_per_party,
        };
        s.box_len().ok_or(BellError::ScenarioTooLarge)?;
        Ok(s)
    }

    pub fn parties(&self) -> usize {
        self.settings.len()
    }

    pub fn settings(&self) -> &[usize] {
        &self.settings
    }

    /// Number of joint setting lists.
    pub fn setting_combinations(&self) -> usize {
        self.settings.iter().product()
    }

    pub fn outcome_combinations(&self) -> usize {
        1 << self.parties()
    }

    /// Length of a full probability table, if it fits in memory indices.
    pub fn box_len(&self) -> Option<usize> {
        let mut len = 1usize.checked_shl(self.parties() as u32)?;
        for &m in &self.settings {
            len = len.checked_mul(m)?;
        }
        Some(len)
    }

    /// Count of deterministic local strategies, 2^(Σ m_i).
    pub fn strategy_count(&self) -> Option<u128> {
        let total: usize = self.settings.iter().sum();
        1u128.checked_shl(total as u32)
    }

    pub fn setting_index(&self, x: &[usize]) -> usize {
        x.iter()
            .zip(&self.settings)
            .fold(0, |acc, (&xi, &m)| acc * m + xi)
    }

    pub fn outcome_index(&self, a: &[u8]) -> usize {
        a.iter().fold(0, |acc, &ai| acc * 2 + ai as usize)
    }

    pub fn setting_list(&self, mut index: usize) -> Vec<usize> {
        let mut x = vec![0; self.parties()];
        for i in (0..self.parties()).rev() {
            x[i] = index % self.settings[i];
            index /= self.settings[i];
        }
        x
    }

    pub fn outcome_list(&self, index: usize) -> Vec<u8> {
        let n = self.parties();
        (0..n).map(|i| ((index >> (n - 1 - i)) & 1) as u8).collect()
    }

    /// Position of p(a|x) in a full table: settings major, outcomes minor,
    /// party 0 most significant in both.
    pub fn entry_index(&self, a: &[u8], x: &[usize]) -> usize {
        self.setting_index(x) * self.outcome_combinations() + self.outcome_index(a)
    }
}

impl fmt::Display for Scenario {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let m: Vec<String> = self.settings.iter().map(|m| m.to_string()).collect();
        write!(f, "({})", m.join(","))
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct BellTerm {
    pub outcomes: Vec<u8>,
    pub settings: Vec<usize>,
    pub weight: Rational,
}

impl BellTerm {
    pub fn new(outcomes: Vec<u8>, settings: Vec<usize>, weight: Rational) -> Self {
        Self {
            outcomes,
            settings,
            weight,
        }
    }

    pub fn unit(outcomes: Vec<u8>, settings: Vec<usize>) -> Self {
        Self::new(outcomes, settings, Rational::one())
    }

    /// Parses `a1…an|x1…xn` with single-digit settings.
    pub fn parse_label(label: &str, weight: Rational) -> Option<Self> {
        let (a, x) = label.split_once('|')?;
        let outcomes = a
            .chars()
            .map(|c| match c {
                '0' => Some(0u8),
                '1' => Some(1u8),
                _ => None,
            })
            .collect::<Option<Vec<_>>>()?;
        let settings = x
            .chars()
            .map(|c| c.to_digit(10).map(|d| d as usize))
            .collect::<Option<Vec<_>>>()?;
        (outcomes.len() == settings.len()).then(|| Self::new(outcomes, settings, weight))
    }

    /// `a1…an|x1…xn`; settings above 9 are separated by commas.
    pub fn label(&self) -> String {
        let a: String = self.outcomes.iter().map(|b| char::from(b'0' + b)).collect();
        let x = if self.settings.iter().all(|&s| s < 10) {
            self.settings.iter().map(|s| s.to_string()).collect::<String>()
        } else {
            self.settings
                .iter()
                .map(|s| s.to_string())
                .collect::<Vec<_>>()
                .join(",")
        };
        format!("{a}|{x}")
    }

    /// Two terms exclude each other when some party has the same setting and
    /// a different outcome in them.
    pub fn excludes(&self, other: &BellTerm) -> bool {
        (0..self.outcomes.len())
            .any(|i| self.settings[i] == other.settings[i] && self.outcomes[i] != other.outcomes[i])
    }

    fn key(&self) -> (&[u8], &[usize]) {
        (&self.outcomes, &self.settings)
    }
}

/// A deterministic local strategy: an outcome bit for every setting of every party.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct DeterministicStrategy {
    pub tables: Vec<Vec<u8>>,
}

impl DeterministicStrategy {
    pub fn outcome(&self, party: usize, setting: usize) -> u8 {
        self.tables[party][setting]
    }

    /// The `index`-th strategy, with party 0 in the most significant bits
    /// and each table read with setting 0 as its least significant bit.
    pub fn from_index(scenario: &Scenario, mut index: u128) -> Self {
        let mut tables = vec![Vec::new(); scenario.parties()];
        for i in (0..scenario.parties()).rev() {
            let m = scenario.settings[i];
            tables[i] = (0..m).map(|x| ((index >> x) & 1) as u8).collect();
            index >>= m;
        }
        Self { tables }
    }

    pub fn satisfies(&self, term: &BellTerm) -> bool {
        term.settings
            .iter()
            .zip(&term.outcomes)
            .enumerate()
            .all(|(i, (&x, &a))| self.tables[i][x] == a)
    }

    /// The 0/1 table p(a|x) = ∏ [a_i = s_i(x_i)].
    pub fn to_box<T: Scalar>(&self, scenario: &Scenario) -> CorrelationBox<T> {
        let mut values = vec![T::zero(); scenario.box_len().expect("scenario fits")];
        for xi in 0..scenario.setting_combinations() {
            let x = scenario.setting_list(xi);
            let a: Vec<u8> = x.iter().enumerate().map(|(i, &s)| self.tables[i][s]).collect();
            values[scenario.entry_index(&a, &x)] = T::one();
        }
        CorrelationBox {
            scenario: scenario.clone(),
            values,
        }
    }
}

/// Numbers a box can hold: exact rationals or floats.
pub trait Scalar:
    Clone
    + fmt::Debug
    + PartialOrd
    + Zero
    + One
    + std::ops::Sub<Output = Self>
    + std::ops::Mul<Output = Self>
    + std::ops::Div<Output = Self>
{
    fn from_rational(r: &Rational) -> Self;
    /// Equality up to the tolerance appropriate to the number kind.
    fn close(&self, other: &Self) -> bool;
}

impl Scalar for Rational {
    fn from_rational(r: &Rational) -> Self {
        r.clone()
    }

    fn close(&self, other: &Self) -> bool {
        self == other
    }
}

impl Scalar for f64 {
    fn from_rational(r: &Rational) -> Self {
        to_f64(r)
    }

    fn close(&self, other: &Self) -> bool {
        (self - other).abs() <= 1e-9
    }
}

/// A full conditional-probability table p(a|x).
#[derive(Clone, Debug, PartialEq)]
pub struct CorrelationBox<T> {
    pub scenario: Scenario,
    pub values: Vec<T>,
}

impl<T: Scalar> CorrelationBox<T> {
    pub fn from_fn(scenario: &Scenario, mut f: impl FnMut(&[u8], &[usize]) -> T) -> Self {
        let len = scenario.box_len().expect("scenario fits");
        let per = scenario.outcome_combinations();
        let values = (0..len)
            .map(|k| {
                let x = scenario.setting_list(k / per);
                let a = scenario.outcome_list(k % per);
                f(&a, &x)
            })
            .collect();
        Self {
            scenario: scenario.clone(),
            values,
        }
    }

    /// p(a|x) = 2^-n everywhere.
    pub fn uniform(scenario: &Scenario) -> Self {
        let p = T::one() / T::from_rational(&Rational::from_integer(BigInt::from(scenario.outcome_combinations())));
        Self::from_fn(scenario, |_, _| p.clone())
    }

    pub fn get(&self, a: &[u8], x: &[usize]) -> &T {
        &self.values[self.scenario.entry_index(a, x)]
    }

    pub fn is_nonnegative(&self) -> bool {
        let tol = T::zero();
        self.values.iter().all(|v| *v >= tol || v.close(&tol))
    }

    pub fn is_normalized(&self) -> bool {
        let per = self.scenario.outcome_combinations();
        self.values.chunks(per).all(|chunk| {
            let s = chunk.iter().cloned().fold(T::zero(), |acc, v| acc + v);
            s.close(&T::one())
        })
    }

    /// Every marginal of every party subset is independent of the settings
    /// of the parties summed over.
    pub fn is_no_signalling(&self) -> bool {
        let sc = &self.scenario;
        let n = sc.parties();
        for i in 0..n {
            // marginal over party i must not depend on x_i
            for xi in 0..sc.setting_combinations() {
                let x = sc.setting_list(xi);
                if x[i] != 0 {
                    continue;
                }
                for ai in 0..sc.outcome_combinations() {
                    let a = sc.outcome_list(ai);
                    if a[i] != 0 {
                        continue;
                    }
                    let marginal = |xs: &[usize]| {
                        let mut a0 = a.clone();
                        let p0 = self.get(&a0, xs).clone();
                        a0[i] = 1;
                        p0 + self.get(&a0, xs).clone()
                    };
                    let base = marginal(&x);
                    for s in 1..sc.settings[i] {
                        let mut y = x.clone();
                        y[i] = s;
                        if !marginal(&y).close(&base) {
                            return false;
                        }
                    }
                }
            }
        }
        true
    }

    pub fn is_valid(&self, no_signalling: bool) -> bool {
        self.is_nonnegative() && self.is_normalized() && (!no_signalling || self.is_no_signalling())
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BellInequality {
    pub scenario: Scenario,
    pub terms: Vec<BellTerm>,
    pub classical_bound: Rational,
}

impl BellInequality {
    /// Validates the terms and computes the classical bound.
    pub fn new(scenario: Scenario, terms: Vec<BellTerm>) -> Result<Self, BellError> {
        check_terms(&scenario, &terms)?;
        let bound = max_over_strategies(&scenario, &terms).0;
        Ok(Self {
            scenario,
            terms,
            classical_bound: bound,
        })
    }

    /// Accepts a stored classical bound without recomputing it in release builds.
    pub fn with_bound(
        scenario: Scenario,
        terms: Vec<BellTerm>,
        classical_bound: Rational,
    ) -> Result<Self, BellError> {
        check_terms(&scenario, &terms)?;
        debug_assert_eq!(max_over_strategies(&scenario, &terms).0, classical_bound);
        Ok(Self {
            scenario,
            terms,
            classical_bound,
        })
    }

    pub fn evaluate<T: Scalar>(&self, b: &CorrelationBox<T>) -> Result<T, BellError> {
        if b.scenario != self.scenario {
            return Err(BellError::ScenarioMismatch);
        }
        Ok(self.terms.iter().fold(T::zero(), |acc, t| {
            acc + T::from_rational(&t.weight) * b.get(&t.outcomes, &t.settings).clone()
        }))
    }

    /// Sum of weights of the terms a deterministic strategy satisfies.
    pub fn strategy_value(&self, s: &DeterministicStrategy) -> Rational {
        self.terms
            .iter()
            .filter(|t| s.satisfies(t))
            .fold(Rational::zero(), |acc, t| acc + &t.weight)
    }

    /// Term sets compared as sets of (a, x, weight), ignoring order.
    pub fn same_terms(&self, other: &BellInequality) -> bool {
        let a: HashSet<&BellTerm> = self.terms.iter().collect();
        let b: HashSet<&BellTerm> = other.terms.iter().collect();
        self.scenario == other.scenario && self.terms.len() == other.terms.len() && a == b
    }

    pub fn max_weight(&self) -> Rational {
        self.terms
            .iter()
            .map(|t| t.weight.clone())
            .max()
            .unwrap_or_else(Rational::zero)
    }
}

impl fmt::Display for BellInequality {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            f.write_str("0")?;
        }
        for (k, t) in self.terms.iter().enumerate() {
            if k > 0 {
                f.write_str(" + ")?;
            }
            if !t.weight.is_one() {
                write!(f, "{} ", format_rational(&t.weight))?;
            }
            write!(f, "p({})", t.label())?;
        }
        write!(f, " ≤ {}", format_rational(&self.classical_bound))
    }
}

fn check_terms(scenario: &Scenario, terms: &[BellTerm]) -> Result<(), BellError> {
    let n = scenario.parties();
    for (k, t) in terms.iter().enumerate() {
        let bad = |reason: &str| BellError::InvalidTerm {
            term: k,
            reason: reason.to_string(),
        };
        if t.outcomes.len() != n || t.settings.len() != n {
            return Err(bad("wrong number of parties"));
        }
        if t.outcomes.iter().any(|&a| a > 1) {
            return Err(bad("outcomes must be bits"));
        }
        if t.settings.iter().zip(scenario.settings()).any(|(&x, &m)| x >= m) {
            return Err(bad("setting index out of range"));
        }
        if t.weight.is_negative() || t.weight > Rational::one() {
            return Err(BellError::InvalidWeight(format_rational(&t.weight)));
        }
    }
    let mut seen = std::collections::HashMap::new();
    for (k, t) in terms.iter().enumerate() {
        if let Some(j) = seen.insert(t.key(), k) {
            return Err(BellError::DuplicateTerm(j, k));
        }
    }
    Ok(())
}

/// Builds the inequality of a product-vector set: the setting of a vector
/// at a party is the index of its local subset, the outcome its element.
pub fn build_inequality(
    set: &ProductVectorSet,
    weights: Option<&[Rational]>,
) -> Result<BellInequality, BellError> {
    set.validate()?;
    if let Some(w) = weights {
        if w.len() != set.len() {
            return Err(BellError::WeightCount {
                expected: set.len(),
                found: w.len(),
            });
        }
    }
    let maps = set.setting_maps();
    let settings: Vec<usize> = maps.iter().map(|m| m.len().max(1)).collect();
    let scenario = Scenario::new(settings)?;
    let terms = set
        .vectors()
        .iter()
        .enumerate()
        .map(|(j, v)| {
            let x = v
                .locals()
                .iter()
                .zip(&maps)
                .map(|(l, m)| m[&l.basis])
                .collect();
            let a = v.locals().iter().map(|l| l.element).collect();
            let q = weights.map_or_else(Rational::one, |w| w[j].clone());
            BellTerm::new(a, x, q)
        })
        .collect();
    BellInequality::new(scenario, terms)
}

/// Exact maximum of the functional over deterministic strategies.
pub fn classical_bound(ineq: &BellInequality) -> Rational {
    max_over_strategies(&ineq.scenario, &ineq.terms).0
}

/// A strategy attaining the classical bound.
pub fn optimal_strategy(ineq: &BellInequality) -> DeterministicStrategy {
    max_over_strategies(&ineq.scenario, &ineq.terms).1
}

fn max_over_strategies(scenario: &Scenario, terms: &[BellTerm]) -> (Rational, DeterministicStrategy) {
    let den = terms
        .iter()
        .fold(BigInt::one(), |acc, t| num_integer::Integer::lcm(&acc, t.weight.denom()));
    let scaled: Vec<BigInt> = terms
        .iter()
        .map(|t| (t.weight.clone() * Rational::from_integer(den.clone())).to_integer())
        .collect();
    let mut search = BoundSearch {
        scenario,
        terms,
        scaled: &scaled,
        best: BigInt::from(-1),
        best_tables: Vec::new(),
        tables: Vec::with_capacity(scenario.parties()),
    };
    let alive: Vec<usize> = (0..terms.len()).collect();
    let total = alive.iter().fold(BigInt::zero(), |acc, &k| acc + &scaled[k]);
    search.run(0, &alive, &total);
    let mut tables = search.best_tables;
    for &m in &scenario.settings()[tables.len()..] {
        tables.push(vec![0; m]);
    }
    (
        Rational::new(search.best, den),
        DeterministicStrategy { tables },
    )
}

struct BoundSearch<'a> {
    scenario: &'a Scenario,
    terms: &'a [BellTerm],
    scaled: &'a [BigInt],
    best: BigInt,
    best_tables: Vec<Vec<u8>>,
    tables: Vec<Vec<u8>>,
}

impl BoundSearch<'_> {
    fn run(&mut self, party: usize, alive: &[usize], bound: &BigInt) {
        if *bound <= self.best {
            return;
        }
        if party == self.scenario.parties() || alive.is_empty() {
            self.best = bound.clone();
            self.best_tables = self.tables.clone();
            return;
        }
        let m = self.scenario.settings()[party];
        let mut used = vec![false; m];
        for &k in alive {
            used[self.terms[k].settings[party]] = true;
        }
        for code in 0u64..(1u64 << m) {
            // settings no alive term uses are fixed to 0
            if (0..m).any(|x| !used[x] && (code >> x) & 1 == 1) {
                continue;
            }
            let table: Vec<u8> = (0..m).map(|x| ((code >> x) & 1) as u8).collect();
            let next: Vec<usize> = alive
                .iter()
                .copied()
                .filter(|&k| {
                    let t = &self.terms[k];
                    table[t.settings[party]] == t.outcomes[party]
                })
                .collect();
            let sum = next.iter().fold(BigInt::zero(), |acc, &k| acc + &self.scaled[k]);
            self.tables.push(table);
            self.run(party + 1, &next, &sum);
            self.tables.pop();
        }
    }
}

/// All deterministic strategies of a scenario, in index order.
pub fn strategies(scenario: &Scenario) -> impl Iterator<Item = DeterministicStrategy> + '_ {
    let count = scenario.strategy_count().expect("strategy count fits in u128");
    (0..count).map(move |k| DeterministicStrategy::from_index(scenario, k))
}

/// All deterministic strategies together with their 0/1 boxes.
pub fn enumerate_strategies(
    scenario: &Scenario,
) -> impl Iterator<Item = (DeterministicStrategy, CorrelationBox<Rational>)> + '_ {
    strategies(scenario).map(move |s| {
        let b = s.to_box(scenario);
        (s, b)
    })
}
