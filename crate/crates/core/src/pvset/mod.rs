//! Combinatorial model of orthogonal n-qubit product-vector sets.
//!
//! In a qubit space orthogonality of local vectors is an equivalence
//! relation, so a local vector is fully described by the local basis it
//! belongs to and its position inside that basis. Distinct bases at one
//! party are assumed generic: they share no vector and no vector of one
//! basis is orthogonal to a vector of another.

mod canon;
mod complete;
mod search;

use std::collections::HashMap;
use std::fmt;

use thiserror::Error;

use crate::bits::Bits;
pub use complete::{Classification, ClassificationKind, DEFAULT_NODE_BUDGET};
pub use search::{search_upbs, UpbSearch};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PvsError {
    #[error("a product-vector set needs at least one party")]
    NoParties,
    #[error("vector {vector} has {found} local factors, expected {expected}")]
    LengthMismatch {
        vector: usize,
        expected: usize,
        found: usize,
    },
    #[error("vector {vector}: element {element} at party {party} is not a bit")]
    ElementOutOfRange {
        vector: usize,
        party: usize,
        element: u8,
    },
    #[error("vector {vector}: basis {basis} at party {party} is outside 0..{bases}")]
    BasisIndexOutOfRange {
        vector: usize,
        party: usize,
        basis: usize,
        bases: usize,
    },
    #[error("vectors {0} and {1} are not orthogonal")]
    NonOrthogonalPair(usize, usize),
    #[error("{count} vectors do not fit in a space of dimension {max}")]
    TooManyVectors { count: usize, max: usize },
    #[error("backtracking search exceeded its budget of {0} nodes")]
    SearchBudgetExceeded(u64),
    #[error("invalid product-vector symbol {0:?}")]
    BadSymbol(String),
    #[error("{0}")]
    InvalidArgument(String),
}

/// One local factor: basis index at its party and position (0 or 1) in that basis.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct LocalVector {
    pub basis: usize,
    pub element: u8,
}

impl LocalVector {
    pub const fn new(basis: usize, element: u8) -> Self {
        Self { basis, element }
    }

    pub const fn complement(self) -> Self {
        Self {
            basis: self.basis,
            element: self.element ^ 1,
        }
    }

    pub const fn is_orthogonal(self, other: LocalVector) -> bool {
        self.basis == other.basis && self.element != other.element
    }

    /// Conventional symbol: `0`/`1` for basis 0, `e`/`ē` for basis 1,
    /// `f`/`f̄` for basis 2, and so on through the alphabet.
    pub fn symbol(self) -> String {
        match (self.basis, self.element) {
            (0, 0) => "0".into(),
            (0, _) => "1".into(),
            (1, 0) => "e".into(),
            (1, _) => "ē".into(),
            (b, e) if b < 22 => {
                let c = (b'd' + b as u8) as char;
                if e == 0 {
                    c.to_string()
                } else {
                    format!("{c}\u{304}")
                }
            }
            (b, e) => format!("[{b}:{e}]"),
        }
    }
}

impl fmt::Display for LocalVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.basis, self.element)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ProductVector(Vec<LocalVector>);

impl ProductVector {
    pub fn new(locals: Vec<LocalVector>) -> Self {
        Self(locals)
    }

    /// Builds a vector from `(basis, element)` pairs.
    pub fn from_pairs(pairs: &[(usize, u8)]) -> Self {
        Self(pairs.iter().map(|&(b, e)| LocalVector::new(b, e)).collect())
    }

    pub fn locals(&self) -> &[LocalVector] {
        &self.0
    }

    pub fn parties(&self) -> usize {
        self.0.len()
    }

    /// Orthogonal iff some party carries two different elements of one basis.
    /// Both vectors must have the same length.
    pub fn is_orthogonal(&self, other: &ProductVector) -> bool {
        debug_assert_eq!(self.0.len(), other.0.len());
        self.0
            .iter()
            .zip(&other.0)
            .any(|(u, v)| u.is_orthogonal(*v))
    }

    /// First party at which the two vectors are orthogonal.
    pub fn orthogonal_at(&self, other: &ProductVector) -> Option<usize> {
        self.0
            .iter()
            .zip(&other.0)
            .position(|(u, v)| u.is_orthogonal(*v))
    }

    pub fn concat(&self, other: &ProductVector) -> ProductVector {
        let mut locals = self.0.clone();
        locals.extend_from_slice(&other.0);
        ProductVector(locals)
    }

    pub fn to_symbols(&self) -> String {
        self.0.iter().map(|l| l.symbol()).collect()
    }

    /// Parses a word such as `1ēe`, `1Ee` or `e01f̄`. Uppercase letters and a
    /// trailing combining macron both denote the second element of a basis.
    pub fn parse_symbols(word: &str) -> Result<Self, PvsError> {
        let bad = || PvsError::BadSymbol(word.to_string());
        let mut locals: Vec<LocalVector> = Vec::new();
        for c in word.chars() {
            let local = match c {
                '0' => LocalVector::new(0, 0),
                '1' => LocalVector::new(0, 1),
                'ē' => LocalVector::new(1, 1),
                '\u{304}' => {
                    let last = locals.last_mut().ok_or_else(bad)?;
                    if last.basis == 0 || last.element == 1 {
                        return Err(bad());
                    }
                    last.element = 1;
                    continue;
                }
                'e'..='z' => LocalVector::new(c as usize - 'd' as usize, 0),
                'E'..='Z' => LocalVector::new(c as usize - 'D' as usize, 1),
                _ => return Err(bad()),
            };
            locals.push(local);
        }
        Ok(Self(locals))
    }
}

impl fmt::Display for ProductVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "|{}⟩", self.to_symbols())
    }
}

/// Orthogonality with a length check.
pub fn orthogonal(u: &ProductVector, v: &ProductVector) -> Result<bool, PvsError> {
    if u.parties() != v.parties() {
        return Err(PvsError::LengthMismatch {
            vector: 1,
            expected: u.parties(),
            found: v.parties(),
        });
    }
    Ok(u.is_orthogonal(v))
}

/// The vectors of one basis that occur at a party, in order of element.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LocalSubset {
    pub basis: usize,
    pub elements: Vec<u8>,
}

/// A validated set of mutually orthogonal product vectors.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct ProductVectorSet {
    bases: Vec<usize>,
    vectors: Vec<ProductVector>,
}

impl ProductVectorSet {
    pub fn new(
        bases_per_party: Vec<usize>,
        vectors: Vec<ProductVector>,
    ) -> Result<Self, PvsError> {
        let set = Self {
            bases: bases_per_party,
            vectors,
        };
        set.validate()?;
        Ok(set)
    }

    /// Builds a set from symbolic words, taking as many bases per party as
    /// the largest basis index used there requires.
    pub fn from_symbols<S: AsRef<str>>(words: &[S]) -> Result<Self, PvsError> {
        let vectors = words
            .iter()
            .map(|w| ProductVector::parse_symbols(w.as_ref()))
            .collect::<Result<Vec<_>, _>>()?;
        let parties = vectors.first().map_or(0, |v| v.parties());
        let mut bases = vec![1; parties];
        for v in &vectors {
            for (m, l) in bases.iter_mut().zip(v.locals()) {
                *m = (*m).max(l.basis + 1);
            }
        }
        Self::new(bases, vectors)
    }

    /// Empty set on `parties` qubits with the given basis counts.
    pub fn empty(bases_per_party: Vec<usize>) -> Result<Self, PvsError> {
        Self::new(bases_per_party, Vec::new())
    }

    pub fn parties(&self) -> usize {
        self.bases.len()
    }

    pub fn bases_per_party(&self) -> &[usize] {
        &self.bases
    }

    pub fn vectors(&self) -> &[ProductVector] {
        &self.vectors
    }

    pub fn len(&self) -> usize {
        self.vectors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vectors.is_empty()
    }

    /// Dimension 2^n of the ambient space, saturating at `usize::MAX`.
    pub fn dimension(&self) -> usize {
        1usize.checked_shl(self.parties() as u32).unwrap_or(usize::MAX)
    }

    pub fn validate(&self) -> Result<(), PvsError> {
        let n = self.parties();
        if n == 0 {
            return Err(PvsError::NoParties);
        }
        if self.vectors.len() > self.dimension() {
            return Err(PvsError::TooManyVectors {
                count: self.vectors.len(),
                max: self.dimension(),
            });
        }
        for (j, v) in self.vectors.iter().enumerate() {
            if v.parties() != n {
                return Err(PvsError::LengthMismatch {
                    vector: j,
                    expected: n,
                    found: v.parties(),
                });
            }
            for (i, l) in v.locals().iter().enumerate() {
                if l.element > 1 {
                    return Err(PvsError::ElementOutOfRange {
                        vector: j,
                        party: i,
                        element: l.element,
                    });
                }
                if l.basis >= self.bases[i] {
                    return Err(PvsError::BasisIndexOutOfRange {
                        vector: j,
                        party: i,
                        basis: l.basis,
                        bases: self.bases[i],
                    });
                }
            }
        }
        for j in 0..self.vectors.len() {
            for k in j + 1..self.vectors.len() {
                if !self.vectors[j].is_orthogonal(&self.vectors[k]) {
                    return Err(PvsError::NonOrthogonalPair(j, k));
                }
            }
        }
        Ok(())
    }

    pub fn to_symbols(&self) -> Vec<String> {
        self.vectors.iter().map(|v| v.to_symbols()).collect()
    }

    /// Groups the local vectors at every party by basis. Subsets follow the
    /// first appearance of their basis in the set; inside a subset the
    /// position of a vector is its element bit.
    pub fn local_partition(&self) -> Vec<Vec<LocalSubset>> {
        (0..self.parties())
            .map(|i| {
                let mut subsets: Vec<LocalSubset> = Vec::new();
                for v in &self.vectors {
                    let l = v.locals()[i];
                    match subsets.iter_mut().find(|s| s.basis == l.basis) {
                        Some(s) => {
                            if !s.elements.contains(&l.element) {
                                s.elements.push(l.element);
                                s.elements.sort_unstable();
                            }
                        }
                        None => subsets.push(LocalSubset {
                            basis: l.basis,
                            elements: vec![l.element],
                        }),
                    }
                }
                subsets
            })
            .collect()
    }

    /// Setting index of each basis in use, per party, following
    /// [`local_partition`](Self::local_partition).
    pub fn setting_maps(&self) -> Vec<HashMap<usize, usize>> {
        self.local_partition()
            .into_iter()
            .map(|subsets| {
                subsets
                    .iter()
                    .enumerate()
                    .map(|(k, s)| (s.basis, k))
                    .collect()
            })
            .collect()
    }

    /// Every combinatorially distinct product vector orthogonal to all members.
    ///
    /// At each party a candidate either takes the complement of a local
    /// vector already present, which makes it orthogonal to exactly the
    /// members carrying that local vector, or a generic fresh vector, emitted
    /// as element 0 of a new basis.
    pub fn extension_candidates(&self) -> Vec<ProductVector> {
        let mut options: Vec<Vec<(LocalVector, Bits)>> = Vec::with_capacity(self.parties());
        for i in 0..self.parties() {
            let mut seen: Vec<LocalVector> = Vec::new();
            for v in &self.vectors {
                let l = v.locals()[i];
                if !seen.contains(&l) {
                    seen.push(l);
                }
            }
            let mut opts: Vec<(LocalVector, Bits)> = seen
                .into_iter()
                .map(|l| (l.complement(), self.members_with(i, l)))
                .collect();
            opts.push((LocalVector::new(self.bases[i], 0), Bits::new(self.len())));
            options.push(opts);
        }
        cover_product(&options, self.len())
    }

    pub(crate) fn members_with(&self, party: usize, local: LocalVector) -> Bits {
        let mut b = Bits::new(self.len());
        for (j, v) in self.vectors.iter().enumerate() {
            if v.locals()[party] == local {
                b.set(j);
            }
        }
        b
    }

    pub fn classify(&self) -> Result<Classification, PvsError> {
        self.classify_with_budget(DEFAULT_NODE_BUDGET)
    }

    pub fn classify_with_budget(&self, budget: u64) -> Result<Classification, PvsError> {
        complete::classify(self, budget)
    }

    /// All concatenations of a vector of `self` with a vector of `other`.
    pub fn tensor_product(&self, other: &ProductVectorSet) -> ProductVectorSet {
        let mut bases = self.bases.clone();
        bases.extend_from_slice(&other.bases);
        let vectors = self
            .vectors
            .iter()
            .flat_map(|u| other.vectors.iter().map(move |v| u.concat(v)))
            .collect();
        ProductVectorSet { bases, vectors }
    }

    /// Lexicographically smallest encoding under party permutations, basis
    /// relabelings and element flips.
    pub fn canonical_form(&self) -> ProductVectorSet {
        canon::canonical_form(self)
    }

    /// Equality of the vector multisets, ignoring order and declared basis counts.
    pub fn same_vectors(&self, other: &ProductVectorSet) -> bool {
        let mut a = self.vectors.clone();
        let mut b = other.vectors.clone();
        a.sort();
        b.sort();
        a == b
    }

    /// Same set after moving the parties: party `k` of the result is party
    /// `order[k]` of `self`.
    pub fn permute_parties(&self, order: &[usize]) -> Result<ProductVectorSet, PvsError> {
        let n = self.parties();
        let mut seen = vec![false; n];
        if order.len() != n || order.iter().any(|&p| p >= n || std::mem::replace(&mut seen[p], true)) {
            return Err(PvsError::InvalidArgument(format!(
                "{order:?} is not a permutation of {n} parties"
            )));
        }
        let bases = order.iter().map(|&p| self.bases[p]).collect();
        let vectors = self
            .vectors
            .iter()
            .map(|v| ProductVector(order.iter().map(|&p| v.0[p]).collect()))
            .collect();
        Ok(ProductVectorSet { bases, vectors })
    }

    pub(crate) fn from_parts_unchecked(bases: Vec<usize>, vectors: Vec<ProductVector>) -> Self {
        Self { bases, vectors }
    }
}

impl fmt::Display for ProductVectorSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let words: Vec<String> = self.vectors.iter().map(|v| v.to_string()).collect();
        write!(f, "{{{}}}", words.join(", "))
    }
}

/// Enumerates one option per party such that every member is covered by
/// some chosen option.
pub(crate) fn cover_product(options: &[Vec<(LocalVector, Bits)>], members: usize) -> Vec<ProductVector> {
    let n = options.len();
    let mut reach = vec![Bits::new(members); n + 1];
    for i in (0..n).rev() {
        let mut r = reach[i + 1].clone();
        for (_, cov) in &options[i] {
            r.union_with(cov);
        }
        reach[i] = r;
    }
    let mut out = Vec::new();
    if !reach[0].is_full() {
        return out;
    }
    let mut chosen = Vec::with_capacity(n);
    cover_rec(options, &reach, 0, &Bits::new(members), &mut chosen, &mut out);
    out
}

fn cover_rec(
    options: &[Vec<(LocalVector, Bits)>],
    reach: &[Bits],
    party: usize,
    covered: &Bits,
    chosen: &mut Vec<LocalVector>,
    out: &mut Vec<ProductVector>,
) {
    if party == options.len() {
        if covered.is_full() {
            out.push(ProductVector(chosen.clone()));
        }
        return;
    }
    for (local, cov) in &options[party] {
        let next = covered.union(cov);
        if !next.union(&reach[party + 1]).is_full() {
            continue;
        }
        chosen.push(*local);
        cover_rec(options, reach, party + 1, &next, chosen, out);
        chosen.pop();
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn shifts() -> ProductVectorSet {
        ProductVectorSet::from_symbols(&["000", "1ēe", "e1ē", "ēe1"]).unwrap()
    }

    #[test]
    fn symbols_round_trip() {
        let v = ProductVector::parse_symbols("e01f̄").unwrap();
        assert_eq!(
            v,
            ProductVector::from_pairs(&[(1, 0), (0, 0), (0, 1), (2, 1)])
        );
        assert_eq!(v.to_symbols(), "e01f̄");
        assert_eq!(ProductVector::parse_symbols("1Ee").unwrap().to_symbols(), "1ēe");
        assert!(ProductVector::parse_symbols("0\u{304}").is_err());
        assert!(ProductVector::parse_symbols("0x?").is_err());
    }

    #[test]
    fn orthogonality_examples() {
        let s = shifts();
        let a = &s.vectors()[0];
        let b = &s.vectors()[1];
        assert!(orthogonal(a, b).unwrap());
        assert_eq!(a.orthogonal_at(b), Some(0));
        assert!(!orthogonal(a, a).unwrap());
        let u = ProductVector::from_pairs(&[(1, 0), (0, 0)]);
        let v = ProductVector::from_pairs(&[(0, 1), (0, 0)]);
        assert!(!orthogonal(&u, &v).unwrap());
        let w = ProductVector::from_pairs(&[(0, 1)]);
        assert!(orthogonal(&u, &w).is_err());
    }

    #[test]
    fn validation_errors() {
        assert!(shifts().validate().is_ok());
        let err = ProductVectorSet::from_symbols(&["000", "1ēe", "e1ē", "ēe1", "1ēe"]).unwrap_err();
        assert_eq!(err, PvsError::NonOrthogonalPair(1, 4));
        let nine: Vec<String> = (0..9).map(|_| "000".to_string()).collect();
        assert!(matches!(
            ProductVectorSet::from_symbols(&nine),
            Err(PvsError::TooManyVectors { count: 9, max: 8 })
        ));
        let out_of_range = ProductVectorSet::new(
            vec![1, 1],
            vec![ProductVector::from_pairs(&[(0, 0), (1, 0)])],
        );
        assert!(matches!(out_of_range, Err(PvsError::BasisIndexOutOfRange { party: 1, .. })));
        assert_eq!(ProductVectorSet::new(vec![], vec![]), Err(PvsError::NoParties));
        let ragged = ProductVectorSet::new(
            vec![1, 1],
            vec![ProductVector::from_pairs(&[(0, 0)])],
        );
        assert!(matches!(ragged, Err(PvsError::LengthMismatch { .. })));
    }

    #[test]
    fn local_partition_examples() {
        let p = shifts().local_partition();
        assert_eq!(
            p[0],
            vec![
                LocalSubset { basis: 0, elements: vec![0, 1] },
                LocalSubset { basis: 1, elements: vec![0, 1] }
            ]
        );
        let single = ProductVectorSet::from_symbols(&["00"]).unwrap().local_partition();
        assert_eq!(single[1], vec![LocalSubset { basis: 0, elements: vec![0] }]);
        let nwe = ProductVectorSet::from_symbols(&[
            "000", "e01", "01e", "01ē", "1e0", "ē01", "1ē0", "111",
        ])
        .unwrap();
        let p = nwe.local_partition();
        assert_eq!(p[1].iter().map(|s| s.basis).collect::<Vec<_>>(), vec![0, 1]);
        assert!(p.iter().flatten().all(|s| s.elements.len() <= 2));
    }

    #[test]
    fn shifts_has_no_extension() {
        assert!(shifts().extension_candidates().is_empty());
    }

    #[test]
    fn standard_pair_extensions() {
        let s = ProductVectorSet::from_symbols(&["00", "11"]).unwrap();
        let c = s.extension_candidates();
        assert!(c.contains(&ProductVector::from_pairs(&[(0, 0), (0, 1)])));
        assert!(c.contains(&ProductVector::from_pairs(&[(0, 1), (0, 0)])));
        assert!(c.iter().all(|v| s.vectors().iter().all(|m| m.is_orthogonal(v))));
    }

    /// Brute force over an alphabet holding every existing local vector, its
    /// complement and one fresh vector; non-covering entries are collapsed to
    /// the fresh vector since they do not contribute to orthogonality.
    fn brute_candidates(s: &ProductVectorSet) -> Vec<ProductVector> {
        let n = s.parties();
        let alphabets: Vec<Vec<LocalVector>> = (0..n)
            .map(|i| {
                let mut a: Vec<LocalVector> = Vec::new();
                for b in 0..s.bases_per_party()[i] {
                    a.push(LocalVector::new(b, 0));
                    a.push(LocalVector::new(b, 1));
                }
                a.push(LocalVector::new(s.bases_per_party()[i], 0));
                a
            })
            .collect();
        let mut out = std::collections::BTreeSet::new();
        let mut idx = vec![0usize; n];
        loop {
            let v = ProductVector((0..n).map(|i| alphabets[i][idx[i]]).collect());
            if s.vectors().iter().all(|m| m.is_orthogonal(&v)) {
                let collapsed = ProductVector(
                    (0..n)
                        .map(|i| {
                            let l = v.locals()[i];
                            if s.vectors().iter().any(|m| m.locals()[i].is_orthogonal(l)) {
                                l
                            } else {
                                LocalVector::new(s.bases_per_party()[i], 0)
                            }
                        })
                        .collect(),
                );
                out.insert(collapsed);
            }
            let mut k = 0;
            loop {
                if k == n {
                    return out.into_iter().collect();
                }
                idx[k] += 1;
                if idx[k] < alphabets[k].len() {
                    break;
                }
                idx[k] = 0;
                k += 1;
            }
        }
    }

    #[test]
    fn single_vector_candidates_match_brute_force() {
        let s = ProductVectorSet::from_symbols(&["000"]).unwrap();
        let mut c = s.extension_candidates();
        c.sort();
        let oracle = brute_candidates(&s);
        assert_eq!(oracle.len(), 7);
        assert_eq!(c, oracle);
    }

    #[test]
    fn candidates_match_brute_force_on_small_sets() {
        for words in [
            vec!["000", "1ēe"],
            vec!["00", "e1"],
            vec!["000", "e01", "01e", "1e0"],
            vec!["0000", "1eē0", "eē10"],
        ] {
            let s = ProductVectorSet::from_symbols(&words).unwrap();
            let mut c = s.extension_candidates();
            c.sort();
            assert_eq!(c, brute_candidates(&s), "{words:?}");
        }
    }

    #[test]
    fn tensor_product_shapes() {
        let zero = ProductVectorSet::from_symbols(&["0"]).unwrap();
        let t = zero.tensor_product(&zero);
        assert_eq!(t.to_symbols(), vec!["00"]);
        let ss = shifts().tensor_product(&shifts());
        assert_eq!(ss.parties(), 6);
        assert_eq!(ss.len(), 16);
        assert!(ss.validate().is_ok());
    }

    #[test]
    fn permute_parties_rejects_bad_orders() {
        let s = shifts();
        assert!(s.permute_parties(&[0, 0, 1]).is_err());
        let p = s.permute_parties(&[2, 0, 1]).unwrap();
        assert_eq!(p.to_symbols()[1], "e1ē");
    }
}
