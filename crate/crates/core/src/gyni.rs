//! Guess-your-neighbour's-input (GYNI) vectors and inequalities, and the
//! strategy calculus over {0, 1, i, f} that certifies tightness for odd n.

use std::collections::btree_map::Entry;
use std::collections::{BTreeMap, HashMap};
use std::fmt;

use num_traits::{One, Signed, Zero};
use thiserror::Error;

use crate::bellgen::{BellError, BellInequality, BellTerm, DeterministicStrategy, Scenario};
use crate::nspoly::polytope_dimension;
use crate::pvset::{LocalVector, ProductVector, ProductVectorSet};
use crate::rational::Rational;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GyniError {
    #[error("GYNI needs at least 3 parties, got {0}")]
    TooFewParties(usize),
    #[error("strategy {0} has no numeric symbol")]
    NoNumericSymbol(String),
    #[error("symbol at position {position} of {strategy} is not f")]
    NotAnF { strategy: String, position: usize },
    #[error("strategy {0} already saturates the inequality")]
    AlreadySaturating(String),
    #[error("congruence certificates exist only for odd n, got {0}")]
    EvenParties(usize),
    #[error("certificate construction failed for {0}")]
    CertificateFailure(String),
    #[error("invalid strategy string {0:?}")]
    BadStrategy(String),
    #[error(transparent)]
    Bell(#[from] BellError),
}

fn check_n(n: usize) -> Result<(), GyniError> {
    if n < 3 {
        Err(GyniError::TooFewParties(n))
    } else {
        Ok(())
    }
}

/// Admissible input strings: even parity for odd n; for even n the parity of
/// x_2 … x_n is even. Party 1 is the most significant bit of the ordering.
pub fn admissible_inputs(n: usize) -> Vec<Vec<u8>> {
    (0u64..1 << n)
        .map(|k| (0..n).map(|i| (k >> (n - 1 - i) & 1) as u8).collect::<Vec<u8>>())
        .filter(|x| {
            let from = if n % 2 == 1 { 0 } else { 1 };
            x[from..].iter().filter(|&&b| b == 1).count() % 2 == 0
        })
        .collect()
}

/// 2^(n−1) vectors: for input x the local vector at party j lies in basis x_j
/// and carries element x_(j+1), indices cyclic.
pub fn gyni_vectors(n: usize) -> Result<ProductVectorSet, GyniError> {
    check_n(n)?;
    let vectors = admissible_inputs(n)
        .into_iter()
        .map(|x| {
            ProductVector::new(
                (0..n)
                    .map(|j| LocalVector::new(x[j] as usize, x[(j + 1) % n]))
                    .collect(),
            )
        })
        .collect();
    Ok(ProductVectorSet::new(vec![2; n], vectors).expect("GYNI vectors are orthogonal"))
}

/// One unit-weight term per admissible x with outcomes a_j = x_(j+1).
pub fn gyni_inequality(n: usize) -> Result<BellInequality, GyniError> {
    check_n(n)?;
    let terms = admissible_inputs(n)
        .into_iter()
        .map(|x| {
            let a = (0..n).map(|j| x[(j + 1) % n]).collect();
            BellTerm::unit(a, x.into_iter().map(usize::from).collect())
        })
        .collect();
    Ok(BellInequality::new(Scenario::new(vec![2; n])?, terms)?)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Sym {
    Zero,
    One,
    I,
    F,
}

impl Sym {
    pub fn apply(self, input: u8) -> u8 {
        match self {
            Sym::Zero => 0,
            Sym::One => 1,
            Sym::I => input,
            Sym::F => input ^ 1,
        }
    }

    pub fn is_numeric(self) -> bool {
        matches!(self, Sym::Zero | Sym::One)
    }

    fn from_bit(b: u8) -> Sym {
        if b == 0 {
            Sym::Zero
        } else {
            Sym::One
        }
    }

    fn char(self) -> char {
        match self {
            Sym::Zero => '0',
            Sym::One => '1',
            Sym::I => 'i',
            Sym::F => 'f',
        }
    }

    /// Local Collins–Gisin vector (1, [s(0) = 0], [s(1) = 0]).
    fn local(self) -> [i64; 3] {
        [1, i64::from(self.apply(0) == 0), i64::from(self.apply(1) == 0)]
    }
}

/// A deterministic GYNI strategy: party j answers s_j(x_j).
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct StrategyString(pub Vec<Sym>);

impl StrategyString {
    pub fn parse(text: &str) -> Result<Self, GyniError> {
        let body = text.trim().trim_start_matches('[').trim_end_matches(']');
        body.chars()
            .map(|c| match c {
                '0' => Ok(Sym::Zero),
                '1' => Ok(Sym::One),
                'i' => Ok(Sym::I),
                'f' => Ok(Sym::F),
                _ => Err(GyniError::BadStrategy(text.to_string())),
            })
            .collect::<Result<Vec<_>, _>>()
            .map(Self)
    }

    pub fn ones(n: usize) -> Self {
        Self(vec![Sym::One; n])
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn is_constant(&self) -> bool {
        self.0.iter().all(|s| s.is_numeric())
    }

    /// All 4^n strategies in lexicographic order of symbols.
    pub fn all(n: usize) -> impl Iterator<Item = StrategyString> {
        const SYMS: [Sym; 4] = [Sym::Zero, Sym::One, Sym::I, Sym::F];
        (0u64..1 << (2 * n)).map(move |k| {
            Self((0..n).map(|j| SYMS[(k >> (2 * (n - 1 - j)) & 3) as usize]).collect())
        })
    }

    /// The constant string reached by propagating s'_j = s_j(s'_(j−1))
    /// around the cycle from a numeric position.
    pub fn evaluate(&self) -> Result<StrategyString, GyniError> {
        let n = self.len();
        let start = self
            .0
            .iter()
            .position(|s| s.is_numeric())
            .ok_or_else(|| GyniError::NoNumericSymbol(self.to_string()))?;
        let mut out = vec![Sym::Zero; n];
        let mut prev = self.0[start].apply(0);
        out[start] = Sym::from_bit(prev);
        for step in 1..n {
            let j = (start + step) % n;
            prev = self.0[j].apply(prev);
            out[j] = Sym::from_bit(prev);
        }
        Ok(Self(out))
    }

    fn parity(&self) -> usize {
        self.0.iter().filter(|&&s| s == Sym::One).count() % 2
    }

    /// Saturation for odd n: an even-parity evaluation, or no numeric symbol
    /// and an even number of f's. Even n falls back to input enumeration.
    pub fn saturates(&self) -> bool {
        if self.len() % 2 == 0 {
            return self.saturates_by_enumeration();
        }
        match self.evaluate() {
            Ok(e) => e.parity() == 0,
            Err(_) => self.0.iter().filter(|&&s| s == Sym::F).count() % 2 == 0,
        }
    }

    /// Some admissible x has x_(j+1) = s_j(x_j) at every party.
    pub fn saturates_by_enumeration(&self) -> bool {
        let n = self.len();
        admissible_inputs(n)
            .iter()
            .any(|x| (0..n).all(|j| x[(j + 1) % n] == self.0[j].apply(x[j])))
    }

    pub fn to_strategy(&self) -> DeterministicStrategy {
        DeterministicStrategy {
            tables: self.0.iter().map(|s| vec![s.apply(0), s.apply(1)]).collect(),
        }
    }

    /// Collins–Gisin vector of the strategy's box.
    pub fn cg_vector(&self) -> Vec<i64> {
        let mut v = vec![1i64];
        for s in &self.0 {
            let l = s.local();
            v = v.iter().flat_map(|a| l.iter().map(move |b| a * b)).collect();
        }
        v
    }

    fn with(&self, position: usize, sym: Sym) -> Self {
        let mut s = self.clone();
        s.0[position] = sym;
        s
    }

    /// [… f …] = [… 0 …] + [… 1 …] − [… i …].
    pub fn expand_f(&self, position: usize) -> Result<Combination, GyniError> {
        if self.len() < 3 || self.0.get(position) != Some(&Sym::F) {
            return Err(GyniError::NotAnF {
                strategy: self.to_string(),
                position,
            });
        }
        let mut c = Combination::default();
        c.add(self.with(position, Sym::Zero), Rational::one());
        c.add(self.with(position, Sym::One), Rational::one());
        c.add(self.with(position, Sym::I), -Rational::one());
        Ok(c)
    }

    /// [… i …] = [… 0 …] + [… 1 …] − [… f …].
    fn expand_i(&self, position: usize) -> Combination {
        let mut c = Combination::default();
        c.add(self.with(position, Sym::Zero), Rational::one());
        c.add(self.with(position, Sym::One), Rational::one());
        c.add(self.with(position, Sym::F), -Rational::one());
        c
    }
}

impl fmt::Display for StrategyString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let body: String = self.0.iter().map(|s| s.char()).collect();
        write!(f, "[{body}]")
    }
}

/// A formal rational combination of strategy strings.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Combination(pub BTreeMap<StrategyString, Rational>);

impl Combination {
    pub fn single(s: StrategyString) -> Self {
        let mut c = Self::default();
        c.add(s, Rational::one());
        c
    }

    pub fn add(&mut self, s: StrategyString, coef: Rational) {
        if coef.is_zero() {
            return;
        }
        match self.0.entry(s) {
            Entry::Occupied(mut o) => {
                *o.get_mut() += coef;
                if o.get().is_zero() {
                    o.remove();
                }
            }
            Entry::Vacant(v) => {
                v.insert(coef);
            }
        }
    }

    pub fn add_scaled(&mut self, other: &Combination, factor: &Rational) {
        for (s, c) in &other.0 {
            self.add(s.clone(), c * factor);
        }
    }

    /// Σ c_j · CG(s_j).
    pub fn cg_vector(&self, n: usize) -> Vec<Rational> {
        let mut out = vec![Rational::zero(); 3usize.pow(n as u32)];
        for (s, c) in &self.0 {
            for (o, v) in out.iter_mut().zip(s.cg_vector()) {
                if v != 0 {
                    *o += c * Rational::from_integer(v.into());
                }
            }
        }
        out
    }
}

/// Rewrites every non-saturating, non-constant term: an f is expanded
/// directly; otherwise an i followed by a numeric symbol is expanded, which
/// leaves one non-saturating term with one fewer i.
fn reduce_to_constants(expr: &mut Combination) {
    loop {
        let next = expr
            .0
            .iter()
            .find(|(s, _)| !s.is_constant() && !s.saturates())
            .map(|(s, c)| (s.clone(), c.clone()));
        let Some((s, coef)) = next else {
            return;
        };
        let n = s.len();
        let replacement = if let Some(p) = s.0.iter().position(|&x| x == Sym::F) {
            s.expand_f(p).expect("position holds f")
        } else {
            let p = (0..n)
                .find(|&p| s.0[p] == Sym::I && s.0[(p + 1) % n].is_numeric())
                .expect("a non-saturating string without f has i before a numeric symbol");
            s.expand_i(p)
        };
        expr.add(s, -coef.clone());
        expr.add_scaled(&replacement, &coef);
    }
}

/// A certificate that box(target) = Σ c_j box(s_j) + residual · box([1…1])
/// with every s_j saturating.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CongruenceCertificate {
    pub target: StrategyString,
    pub combination: Vec<(Rational, StrategyString)>,
    pub residual: Rational,
}

impl CongruenceCertificate {
    /// Exact check of the box identity and of saturation of every term.
    pub fn verify(&self) -> bool {
        let n = self.target.len();
        if self.combination.iter().any(|(_, s)| !s.saturates() || s.len() != n) {
            return false;
        }
        let mut rhs = Combination::default();
        for (c, s) in &self.combination {
            rhs.add(s.clone(), c.clone());
        }
        rhs.add(StrategyString::ones(n), self.residual.clone());
        let lhs = Combination::single(self.target.clone());
        lhs.cg_vector(n) == rhs.cg_vector(n)
    }

    /// One line per term `coef string`, the residual last.
    pub fn dump(&self) -> String {
        let mut out = String::new();
        for (c, s) in &self.combination {
            out.push_str(&format!("{} {}\n", crate::rational::format_rational(c), s));
        }
        out.push_str(&format!(
            "{} {}\n",
            crate::rational::format_rational(&self.residual),
            StrategyString::ones(self.target.len())
        ));
        out
    }
}

/// Reusable congruence machinery for one odd n.
pub struct CongruenceEngine {
    n: usize,
    /// For each odd-parity constant string c: box(c) = α box([1…1]) + box(sat).
    constants: HashMap<StrategyString, (Rational, Combination)>,
}

impl CongruenceEngine {
    pub fn new(n: usize) -> Result<Self, GyniError> {
        check_n(n)?;
        if n % 2 == 0 {
            return Err(GyniError::EvenParties(n));
        }
        let odd: Vec<StrategyString> = (0u64..1 << n)
            .map(|k| StrategyString((0..n).map(|j| Sym::from_bit((k >> j & 1) as u8)).collect()))
            .filter(|s| s.parity() == 1)
            .collect();
        let index: HashMap<&StrategyString, usize> =
            odd.iter().enumerate().map(|(k, s)| (s, k)).collect();
        // zero identities: a saturating {i,f} string minus its expansion
        let mut relations: Vec<(Vec<Rational>, Combination)> = Vec::new();
        for k in 0u64..1 << n {
            let s = StrategyString(
                (0..n)
                    .map(|j| if k >> j & 1 == 1 { Sym::F } else { Sym::I })
                    .collect(),
            );
            if !s.saturates() {
                continue;
            }
            for p in 0..n {
                let mut z = if s.0[p] == Sym::F {
                    s.expand_f(p).expect("f at p")
                } else if s.0[(p + 1) % n] == Sym::F {
                    s.expand_i(p)
                } else {
                    continue;
                };
                reduce_to_constants(&mut z);
                z.add(s.clone(), -Rational::one());
                let mut vec = vec![Rational::zero(); odd.len()];
                let mut sat = Combination::default();
                for (t, c) in &z.0 {
                    if t.saturates() {
                        sat.add(t.clone(), c.clone());
                    } else {
                        match index.get(t) {
                            Some(&i) => vec[i] += c,
                            None => return Err(GyniError::CertificateFailure(s.to_string())),
                        }
                    }
                }
                if vec.iter().any(|v| !v.is_zero()) {
                    relations.push((vec, sat));
                }
            }
        }
        let ones = index[&StrategyString::ones(n)];
        let mut columns: Vec<Vec<Rational>> = relations.iter().map(|(v, _)| v.clone()).collect();
        let mut e = vec![Rational::zero(); odd.len()];
        e[ones] = Rational::one();
        columns.push(e);
        let solver = LinearSolver::new(&columns);
        let mut constants = HashMap::new();
        for (i, c) in odd.iter().enumerate() {
            let mut rhs = vec![Rational::zero(); odd.len()];
            rhs[i] = Rational::one();
            let mu = solver
                .solve(&rhs)
                .ok_or_else(|| GyniError::CertificateFailure(c.to_string()))?;
            // c = α·[1…1] + Σ μ_k R_k and R_k ≡ −sat_k
            let alpha = mu[columns.len() - 1].clone();
            let mut sat = Combination::default();
            for (k, m) in mu[..relations.len()].iter().enumerate() {
                if !m.is_zero() {
                    sat.add_scaled(&relations[k].1, &-m.clone());
                }
            }
            constants.insert(c.clone(), (alpha, sat));
        }
        Ok(Self { n, constants })
    }

    pub fn certify(&self, target: &StrategyString) -> Result<CongruenceCertificate, GyniError> {
        if target.len() != self.n {
            return Err(GyniError::BadStrategy(target.to_string()));
        }
        if target.saturates() {
            return Err(GyniError::AlreadySaturating(target.to_string()));
        }
        let mut expr = Combination::single(target.clone());
        reduce_to_constants(&mut expr);
        let mut sat = Combination::default();
        let mut residual = Rational::zero();
        for (s, c) in &expr.0 {
            if s.saturates() {
                sat.add(s.clone(), c.clone());
                continue;
            }
            let (alpha, rep) = self
                .constants
                .get(s)
                .ok_or_else(|| GyniError::CertificateFailure(target.to_string()))?;
            residual += alpha * c;
            sat.add_scaled(rep, c);
        }
        Ok(CongruenceCertificate {
            target: target.clone(),
            combination: sat.0.into_iter().map(|(s, c)| (c, s)).collect(),
            residual,
        })
    }
}

/// Certificate for one non-saturating strategy (odd n).
pub fn congruence_reduce(s: &StrategyString) -> Result<CongruenceCertificate, GyniError> {
    CongruenceEngine::new(s.len())?.certify(s)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GyniTightness {
    pub n: usize,
    pub strategies: usize,
    pub saturating: usize,
    pub certified: usize,
    pub polytope_dimension: usize,
    pub affine_dimension: usize,
    pub tight: bool,
}

/// Certifies every non-saturating strategy. Together with [1…1] the
/// saturating boxes then span all deterministic boxes, so they span a face
/// of dimension d − 1.
pub fn tightness_certificate(n: usize) -> Result<GyniTightness, GyniError> {
    use rayon::prelude::*;
    let engine = CongruenceEngine::new(n)?;
    let all: Vec<StrategyString> = StrategyString::all(n).collect();
    let nonsat: Vec<&StrategyString> = all.iter().filter(|s| !s.saturates()).collect();
    nonsat.par_iter().try_for_each(|s| {
        let cert = engine.certify(s)?;
        if cert.verify() {
            Ok(())
        } else {
            Err(GyniError::CertificateFailure(s.to_string()))
        }
    })?;
    let d = polytope_dimension(&Scenario::new(vec![2; n])?);
    Ok(GyniTightness {
        n,
        strategies: all.len(),
        saturating: all.len() - nonsat.len(),
        certified: nonsat.len(),
        polytope_dimension: d,
        affine_dimension: d - 1,
        tight: true,
    })
}

/// Exact solver for x with Σ x_k columns_k = rhs, via reduced row echelon form.
struct LinearSolver {
    /// RREF of [columns | I]; rows carry the row operations applied.
    rref: Vec<Vec<Rational>>,
    pivots: Vec<usize>,
    vars: usize,
}

impl LinearSolver {
    fn new(columns: &[Vec<Rational>]) -> Self {
        let vars = columns.len();
        let dims = columns.first().map_or(0, Vec::len);
        let mut m: Vec<Vec<Rational>> = (0..dims)
            .map(|r| {
                let mut row: Vec<Rational> = columns.iter().map(|c| c[r].clone()).collect();
                row.extend((0..dims).map(|k| if k == r { Rational::one() } else { Rational::zero() }));
                row
            })
            .collect();
        let mut pivots = Vec::new();
        let mut r = 0;
        for c in 0..vars {
            let Some(p) = (r..dims).find(|&i| !m[i][c].is_zero()) else {
                continue;
            };
            m.swap(r, p);
            let pv = m[r][c].clone();
            for v in m[r].iter_mut() {
                *v = &*v / &pv;
            }
            let prow = m[r].clone();
            for (i, row) in m.iter_mut().enumerate() {
                if i == r || row[c].is_zero() {
                    continue;
                }
                let f = row[c].clone();
                for (x, y) in row.iter_mut().zip(&prow) {
                    if !y.is_zero() {
                        *x -= &f * y;
                    }
                }
            }
            pivots.push(c);
            r += 1;
        }
        Self {
            rref: m,
            pivots,
            vars,
        }
    }

    fn solve(&self, rhs: &[Rational]) -> Option<Vec<Rational>> {
        let transformed: Vec<Rational> = self
            .rref
            .iter()
            .map(|row| {
                row[self.vars..]
                    .iter()
                    .zip(rhs)
                    .fold(Rational::zero(), |acc, (a, b)| acc + a * b)
            })
            .collect();
        if transformed[self.pivots.len()..].iter().any(|v| !v.is_zero()) {
            return None;
        }
        let mut x = vec![Rational::zero(); self.vars];
        for (r, &c) in self.pivots.iter().enumerate() {
            x[c] = transformed[r].clone();
        }
        Some(x)
    }
}

/// Count of terms with negative coefficient, for reporting.
pub fn negative_terms(c: &CongruenceCertificate) -> usize {
    c.combination.iter().filter(|(q, _)| q.is_negative()).count()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bellgen::build_inequality;

    fn s(t: &str) -> StrategyString {
        StrategyString::parse(t).unwrap()
    }

    #[test]
    fn gyni3_is_shifts() {
        let g = gyni_vectors(3).unwrap();
        assert_eq!(g.to_symbols(), vec!["000", "1ēe", "e1ē", "ēe1"]);
        let b = gyni_inequality(3).unwrap();
        let labels: Vec<String> = b.terms.iter().map(|t| t.label()).collect();
        assert_eq!(labels, vec!["000|000", "110|011", "011|101", "101|110"]);
        assert!(b.same_terms(&build_inequality(&g, None).unwrap()));
    }

    #[test]
    fn too_small() {
        assert_eq!(gyni_vectors(2), Err(GyniError::TooFewParties(2)));
    }

    #[test]
    fn evaluation_examples() {
        assert_eq!(s("[i0f]").evaluate().unwrap(), s("[101]"));
        assert_eq!(s("[000]").evaluate().unwrap(), s("[000]"));
        assert_eq!(s("[1ii]").evaluate().unwrap(), s("[111]"));
        assert!(s("[iif]").evaluate().is_err());
    }

    #[test]
    fn saturation_examples() {
        assert!(s("[101]").saturates());
        assert!(!s("[iif]").saturates());
        assert!(s("[fif]").saturates());
        for n in [3, 5] {
            for st in StrategyString::all(n) {
                assert_eq!(st.saturates(), st.saturates_by_enumeration(), "{st}");
            }
        }
    }

    #[test]
    fn expand_f_examples() {
        let c = s("[i0f]").expand_f(2).unwrap();
        let mut expected = Combination::default();
        expected.add(s("[i00]"), Rational::one());
        expected.add(s("[i01]"), Rational::one());
        expected.add(s("[i0i]"), -Rational::one());
        assert_eq!(c, expected);
        assert!(s("[i0f]").expand_f(0).is_err());
        let c = s("[ff0]").expand_f(0).unwrap();
        assert_eq!(c.cg_vector(3), Combination::single(s("[ff0]")).cg_vector(3));
    }

    #[test]
    fn certificates_for_three_parties() {
        for t in ["[100]", "[111]", "[if0]", "[fii]"] {
            let cert = congruence_reduce(&s(t)).unwrap();
            assert!(cert.verify(), "{t}");
        }
        let id = congruence_reduce(&s("[111]")).unwrap();
        assert!(id.combination.is_empty());
        assert_eq!(id.residual, Rational::one());
        assert!(matches!(
            congruence_reduce(&s("[101]")),
            Err(GyniError::AlreadySaturating(_))
        ));
        assert!(matches!(
            congruence_reduce(&s("[1010]")),
            Err(GyniError::EvenParties(4))
        ));
    }

    #[test]
    fn tightness_for_three_parties() {
        let t = tightness_certificate(3).unwrap();
        assert_eq!(t.polytope_dimension, 26);
        assert_eq!(t.affine_dimension, 25);
        assert!(t.tight);
        assert_eq!(t.strategies, 64);
    }

    #[test]
    fn strategy_box_matches_string_vector() {
        let sc = Scenario::new(vec![2; 3]).unwrap();
        let layout = crate::nspoly::CgLayout::new(&sc);
        for st in StrategyString::all(3) {
            let v: Vec<i64> = layout.strategy(&st.to_strategy()).into_iter().map(i64::from).collect();
            assert_eq!(v, st.cg_vector());
        }
    }
}
