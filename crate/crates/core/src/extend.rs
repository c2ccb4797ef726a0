//! Growing n-party sets to n + 1 parties.

use thiserror::Error;

use crate::pvset::{LocalVector, ProductVector, ProductVectorSet, PvsError};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ExtendError {
    #[error("basis {basis} is not used at party {party}")]
    BasisNotPresent { party: usize, basis: usize },
    #[error("basis {basis} is already used at party {party}")]
    BasisInUse { party: usize, basis: usize },
    #[error("party {party} out of range for {parties} parties")]
    PartyOutOfRange { party: usize, parties: usize },
    #[error("vectors {first} of the first set and {second} of the second set are not orthogonal")]
    OrthogonalityRuleViolated { first: usize, second: usize },
    #[error("plan does not partition the input sets")]
    InvalidPlan,
    #[error("sets have {0} and {1} parties")]
    PartyMismatch(usize, usize),
    #[error("lifting needs at least 3 parties, got {0}")]
    TooFewParties(usize),
    #[error(transparent)]
    Pvs(#[from] PvsError),
}

fn check_party(u: &ProductVectorSet, party: usize) -> Result<(), ExtendError> {
    if party >= u.parties() {
        Err(ExtendError::PartyOutOfRange {
            party,
            parties: u.parties(),
        })
    } else {
        Ok(())
    }
}

fn rebuild(
    u: &ProductVectorSet,
    mut bases: Vec<usize>,
    f: impl Fn(usize, LocalVector) -> LocalVector,
) -> Result<ProductVectorSet, ExtendError> {
    let vectors: Vec<ProductVector> = u
        .vectors()
        .iter()
        .map(|v| ProductVector::new(v.locals().iter().enumerate().map(|(i, &l)| f(i, l)).collect()))
        .collect();
    for v in &vectors {
        for (b, l) in bases.iter_mut().zip(v.locals()) {
            *b = (*b).max(l.basis + 1);
        }
    }
    Ok(ProductVectorSet::new(bases, vectors)?)
}

/// Renames `old` to the unused index `new` at one party.
pub fn replace_basis(
    u: &ProductVectorSet,
    party: usize,
    old: usize,
    new: usize,
) -> Result<ProductVectorSet, ExtendError> {
    check_party(u, party)?;
    let used = |b: usize| u.vectors().iter().any(|v| v.locals()[party].basis == b);
    if !used(old) {
        return Err(ExtendError::BasisNotPresent { party, basis: old });
    }
    if used(new) {
        return Err(ExtendError::BasisInUse { party, basis: new });
    }
    rebuild(u, u.bases_per_party().to_vec(), |i, l| {
        if i == party && l.basis == old {
            LocalVector::new(new, l.element)
        } else {
            l
        }
    })
}

/// Replaces every local vector at `party` by its complement.
pub fn flip_elements(u: &ProductVectorSet, party: usize) -> Result<ProductVectorSet, ExtendError> {
    check_party(u, party)?;
    rebuild(u, u.bases_per_party().to_vec(), |i, l| {
        if i == party {
            l.complement()
        } else {
            l
        }
    })
}

/// Aligned partitions of two sets, given as vector indices. Subset j of
/// the first set meets element 0 of new basis j, subset j of the second
/// set element 1.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CombinePlan {
    pub first: Vec<Vec<usize>>,
    pub second: Vec<Vec<usize>>,
}

impl CombinePlan {
    /// Groups both sets by the basis they use at `party`.
    pub fn by_basis(u1: &ProductVectorSet, u2: &ProductVectorSet, party: usize) -> Self {
        let mut used: Vec<usize> = u1
            .vectors()
            .iter()
            .chain(u2.vectors())
            .map(|v| v.locals()[party].basis)
            .collect();
        used.sort_unstable();
        used.dedup();
        let group = |u: &ProductVectorSet| -> Vec<Vec<usize>> {
            used.iter()
                .map(|&b| {
                    (0..u.len())
                        .filter(|&k| u.vectors()[k].locals()[party].basis == b)
                        .collect()
                })
                .collect()
        };
        Self {
            first: group(u1),
            second: group(u2),
        }
    }

    fn covers(parts: &[Vec<usize>], len: usize) -> bool {
        let mut seen = vec![false; len];
        for &k in parts.iter().flatten() {
            if k >= len || seen[k] {
                return false;
            }
            seen[k] = true;
        }
        seen.into_iter().all(|s| s)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Position {
    Front,
    Back,
}

fn attach(v: &ProductVector, local: LocalVector, position: Position) -> ProductVector {
    let mut locals = v.locals().to_vec();
    match position {
        Position::Front => locals.insert(0, local),
        Position::Back => locals.push(local),
    }
    ProductVector::new(locals)
}

fn combine_at(
    u1: &ProductVectorSet,
    u2: &ProductVectorSet,
    plan: &CombinePlan,
    position: Position,
) -> Result<ProductVectorSet, ExtendError> {
    if u1.parties() != u2.parties() {
        return Err(ExtendError::PartyMismatch(u1.parties(), u2.parties()));
    }
    let k = plan.first.len();
    if k == 0
        || plan.second.len() != k
        || !CombinePlan::covers(&plan.first, u1.len())
        || !CombinePlan::covers(&plan.second, u2.len())
    {
        return Err(ExtendError::InvalidPlan);
    }
    for i in 0..k {
        for j in (0..k).filter(|&j| j != i) {
            for &a in &plan.first[i] {
                for &b in &plan.second[j] {
                    if !u1.vectors()[a].is_orthogonal(&u2.vectors()[b]) {
                        return Err(ExtendError::OrthogonalityRuleViolated { first: a, second: b });
                    }
                }
            }
        }
    }
    // both inputs keep their order so settings are numbered as before
    let subset_of = |parts: &[Vec<usize>], len: usize| {
        let mut of = vec![0; len];
        for (j, part) in parts.iter().enumerate() {
            for &a in part {
                of[a] = j;
            }
        }
        of
    };
    let mut vectors = Vec::with_capacity(u1.len() + u2.len());
    for (a, j) in subset_of(&plan.first, u1.len()).into_iter().enumerate() {
        vectors.push(attach(&u1.vectors()[a], LocalVector::new(j, 0), position));
    }
    for (b, j) in subset_of(&plan.second, u2.len()).into_iter().enumerate() {
        vectors.push(attach(&u2.vectors()[b], LocalVector::new(j, 1), position));
    }
    let mut bases: Vec<usize> = u1
        .bases_per_party()
        .iter()
        .zip(u2.bases_per_party())
        .map(|(a, b)| *a.max(b))
        .collect();
    match position {
        Position::Front => bases.insert(0, k),
        Position::Back => bases.push(k),
    }
    Ok(ProductVectorSet::new(bases, vectors)?)
}

/// Prepends a party with one basis per plan subset.
pub fn combine(
    u1: &ProductVectorSet,
    u2: &ProductVectorSet,
    plan: &CombinePlan,
) -> Result<ProductVectorSet, ExtendError> {
    combine_at(u1, u2, plan, Position::Front)
}

#[derive(Clone, Debug)]
pub enum Companion {
    Set(ProductVectorSet),
    FullBasis,
}

/// The computational basis on `n` qubits.
pub fn full_basis(n: usize) -> ProductVectorSet {
    let vectors = (0u64..1 << n)
        .map(|k| {
            ProductVector::new(
                (0..n)
                    .map(|i| LocalVector::new(0, (k >> (n - 1 - i) & 1) as u8))
                    .collect(),
            )
        })
        .collect();
    ProductVectorSet::new(vec![1; n], vectors).expect("standard basis is orthogonal")
}

/// U ⊗ |0⟩ together with companion ⊗ |1⟩, the new party appended.
pub fn lift_method1(u: &ProductVectorSet, companion: &Companion) -> Result<ProductVectorSet, ExtendError> {
    let n = u.parties();
    if n < 3 {
        return Err(ExtendError::TooFewParties(n));
    }
    let c = match companion {
        Companion::Set(c) => c.clone(),
        Companion::FullBasis => full_basis(n),
    };
    let plan = CombinePlan {
        first: vec![(0..u.len()).collect()],
        second: vec![(0..c.len()).collect()],
    };
    combine_at(u, &c, &plan, Position::Back)
}

/// Pairs U with its complement at `party`, grouped by the bases there.
pub fn method2(u: &ProductVectorSet, party: usize, position: Position) -> Result<ProductVectorSet, ExtendError> {
    let flipped = flip_elements(u, party)?;
    let plan = CombinePlan::by_basis(u, &flipped, party);
    combine_at(u, &flipped, &plan, position)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pvset::ClassificationKind;

    fn set(words: &[&str]) -> ProductVectorSet {
        ProductVectorSet::from_symbols(words).unwrap()
    }

    fn shifts() -> ProductVectorSet {
        set(&["000", "1ēe", "e1ē", "ēe1"])
    }

    fn kind(u: &ProductVectorSet) -> ClassificationKind {
        u.classify().unwrap().kind
    }

    #[test]
    fn replace_basis_keeps_upb() {
        let r = replace_basis(&shifts(), 0, 1, 2).unwrap();
        assert_eq!(r.bases_per_party(), &[3, 2, 2]);
        assert_eq!(kind(&r), ClassificationKind::Upb);
        assert_eq!(
            replace_basis(&shifts(), 0, 2, 3),
            Err(ExtendError::BasisNotPresent { party: 0, basis: 2 })
        );
        assert!(matches!(replace_basis(&shifts(), 0, 1, 0), Err(ExtendError::BasisInUse { .. })));
    }

    #[test]
    fn flip_is_an_involution() {
        let f = flip_elements(&shifts(), 1).unwrap();
        assert_eq!(kind(&f), ClassificationKind::Upb);
        assert_eq!(flip_elements(&f, 1).unwrap(), shifts());
    }

    #[test]
    fn single_subset_combine() {
        let a = set(&["000"]);
        let b = set(&["111"]);
        let plan = CombinePlan {
            first: vec![vec![0]],
            second: vec![vec![0]],
        };
        assert_eq!(combine(&a, &b, &plan).unwrap().to_symbols(), vec!["0000", "1111"]);
    }

    #[test]
    fn combine_rejects_bad_plans() {
        let u = shifts();
        let plan = CombinePlan {
            first: vec![vec![0, 1], vec![2, 3]],
            second: vec![vec![2, 3], vec![0, 1]],
        };
        assert!(matches!(
            combine(&u, &u, &plan),
            Err(ExtendError::OrthogonalityRuleViolated { .. })
        ));
        let partial = CombinePlan {
            first: vec![vec![0]],
            second: vec![vec![0, 1, 2, 3]],
        };
        assert_eq!(combine(&u, &u, &partial), Err(ExtendError::InvalidPlan));
    }

    #[test]
    fn gyni4_from_gyni3() {
        let g3 = crate::gyni::gyni_vectors(3).unwrap();
        let f3 = flip_elements(&g3, 2).unwrap();
        let by_last = |e: u8| -> Vec<usize> {
            (0..g3.len()).filter(|&k| g3.vectors()[k].locals()[2].element == e).collect()
        };
        let plan = CombinePlan {
            first: vec![by_last(0), by_last(1)],
            second: vec![by_last(1), by_last(0)],
        };
        let g4 = combine(&g3, &f3, &plan).unwrap();
        assert_eq!(kind(&g4), ClassificationKind::Upb);
        assert_eq!(g4.canonical_form(), crate::gyni::gyni_vectors(4).unwrap().canonical_form());
        let m = method2(&g3, 2, Position::Front).unwrap();
        assert_eq!(kind(&m), ClassificationKind::Upb);
    }

    #[test]
    fn lifts() {
        let u4 = lift_method1(&shifts(), &Companion::FullBasis).unwrap();
        assert!(u4.same_vectors(&set(&[
            "0000", "1ēe0", "e1ē0", "ēe10", "0001", "0011", "0101", "0111", "1001", "1011", "1101", "1111"
        ])));
        let u10 = lift_method1(&shifts(), &Companion::Set(shifts())).unwrap();
        let listed = set(&["0000", "01ēe", "0e1ē", "0ēe1", "1000", "11ēe", "1e1ē", "1ēe1"]);
        assert!(u10.permute_parties(&[3, 0, 1, 2]).unwrap().same_vectors(&listed));
        assert_eq!(
            lift_method1(&set(&["00"]), &Companion::FullBasis),
            Err(ExtendError::TooFewParties(2))
        );
    }

    #[test]
    fn method2_on_shifts() {
        let m = method2(&shifts(), 0, Position::Front).unwrap();
        assert_eq!(m.parties(), 4);
        assert_eq!(m.len(), 8);
        assert_eq!(kind(&m), ClassificationKind::Upb);
    }
}
