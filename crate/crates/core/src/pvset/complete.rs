use std::collections::HashSet;
use std::fmt;

use crate::bits::Bits;
use super::{cover_product, LocalVector, ProductVector, ProductVectorSet, PvsError};

/// Node cap of the completion search.
pub const DEFAULT_NODE_BUDGET: u64 = 10_000_000;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum ClassificationKind {
    FullBasis,
    CompletableToFullBasis,
    Upb,
    ExtendibleOnlyToUpb,
}

impl ClassificationKind {
    pub fn as_str(self) -> &'static str {
        match self {
            Self::FullBasis => "FullBasis",
            Self::CompletableToFullBasis => "CompletableToFullBasis",
            Self::Upb => "UPB",
            Self::ExtendibleOnlyToUpb => "ExtendibleOnlyToUPB",
        }
    }
}

impl fmt::Display for ClassificationKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Classification {
    pub kind: ClassificationKind,
    /// A product vector orthogonal to every member, when one exists.
    pub witness_extension: Option<ProductVector>,
    /// Vectors that, added to the set, give a full product basis.
    pub completion: Option<Vec<ProductVector>>,
}

impl Classification {
    fn bare(kind: ClassificationKind) -> Self {
        Self {
            kind,
            witness_extension: None,
            completion: None,
        }
    }

    /// The set united with its completion, with basis counts widened to
    /// cover any bases the search introduced.
    pub fn completed_set(&self, set: &ProductVectorSet) -> Option<ProductVectorSet> {
        let extra = self.completion.as_ref()?;
        let mut bases = set.bases_per_party().to_vec();
        for v in extra {
            for (m, l) in bases.iter_mut().zip(v.locals()) {
                *m = (*m).max(l.basis + 1);
            }
        }
        let mut vectors = set.vectors().to_vec();
        vectors.extend(extra.iter().cloned());
        Some(ProductVectorSet::from_parts_unchecked(bases, vectors))
    }
}

pub(super) fn classify(set: &ProductVectorSet, budget: u64) -> Result<Classification, PvsError> {
    set.validate()?;
    if set.len() == set.dimension() {
        return Ok(Classification::bare(ClassificationKind::FullBasis));
    }
    let candidates = set.extension_candidates();
    let Some(witness) = candidates.first().cloned() else {
        return Ok(Classification::bare(ClassificationKind::Upb));
    };
    let mut search = Completion {
        target: set.dimension(),
        original: set.bases_per_party().to_vec(),
        budget,
        nodes: 0,
        seen: HashSet::new(),
    };
    let mut current = set.vectors().to_vec();
    let mut fresh = set.bases_per_party().to_vec();
    let found = search.dfs(&mut current, &mut fresh)?;
    Ok(match found {
        Some(full) => Classification {
            kind: ClassificationKind::CompletableToFullBasis,
            witness_extension: Some(full[set.len()].clone()),
            completion: Some(full[set.len()..].to_vec()),
        },
        None => Classification {
            kind: ClassificationKind::ExtendibleOnlyToUpb,
            witness_extension: Some(witness),
            completion: None,
        },
    })
}

struct Completion {
    target: usize,
    original: Vec<usize>,
    budget: u64,
    nodes: u64,
    seen: HashSet<Vec<ProductVector>>,
}

impl Completion {
    fn dfs(
        &mut self,
        current: &mut Vec<ProductVector>,
        fresh: &mut Vec<usize>,
    ) -> Result<Option<Vec<ProductVector>>, PvsError> {
        self.nodes += 1;
        if self.nodes > self.budget {
            return Err(PvsError::SearchBudgetExceeded(self.budget));
        }
        if current.len() == self.target {
            return Ok(Some(current.clone()));
        }
        if !self.seen.insert(state_key(current, &self.original)) {
            return Ok(None);
        }
        for cand in full_alphabet_candidates(current, fresh) {
            let saved = fresh.clone();
            for (i, l) in cand.locals().iter().enumerate() {
                if l.basis == fresh[i] {
                    fresh[i] += 1;
                }
            }
            current.push(cand);
            let r = self.dfs(current, fresh)?;
            current.pop();
            *fresh = saved;
            if r.is_some() {
                return Ok(r);
            }
        }
        Ok(None)
    }
}

/// Every product vector orthogonal to `current`, where each party may use
/// either element of any basis present or one generic fresh vector.
fn full_alphabet_candidates(current: &[ProductVector], fresh: &[usize]) -> Vec<ProductVector> {
    let n = fresh.len();
    let members = current.len();
    let options: Vec<Vec<(LocalVector, Bits)>> = (0..n)
        .map(|i| {
            let mut used: Vec<usize> = current.iter().map(|v| v.locals()[i].basis).collect();
            used.sort_unstable();
            used.dedup();
            let mut opts = Vec::with_capacity(2 * used.len() + 1);
            for b in used {
                for e in 0..2u8 {
                    let mut cov = Bits::new(members);
                    for (j, v) in current.iter().enumerate() {
                        if v.locals()[i] == LocalVector::new(b, e ^ 1) {
                            cov.set(j);
                        }
                    }
                    opts.push((LocalVector::new(b, e), cov));
                }
            }
            opts.push((LocalVector::new(fresh[i], 0), Bits::new(members)));
            opts
        })
        .collect();
    cover_product(&options, members)
}

/// Sorted vectors with search-introduced bases renamed and flipped by first
/// appearance, so that states differing only in those names coincide.
fn state_key(current: &[ProductVector], original: &[usize]) -> Vec<ProductVector> {
    let mut sorted = current.to_vec();
    sorted.sort();
    let n = original.len();
    let mut maps: Vec<Vec<(usize, usize, u8)>> = vec![Vec::new(); n];
    let relabeled: Vec<ProductVector> = sorted
        .iter()
        .map(|v| {
            ProductVector::new(
                v.locals()
                    .iter()
                    .enumerate()
                    .map(|(i, l)| {
                        if l.basis < original[i] {
                            return *l;
                        }
                        let map = &mut maps[i];
                        let (nb, flip) = match map.iter().find(|(ob, _, _)| *ob == l.basis) {
                            Some(&(_, nb, flip)) => (nb, flip),
                            None => {
                                let entry = (l.basis, original[i] + map.len(), l.element);
                                map.push(entry);
                                (entry.1, entry.2)
                            }
                        };
                        LocalVector::new(nb, l.element ^ flip)
                    })
                    .collect(),
            )
        })
        .collect();
    let mut key = relabeled;
    key.sort();
    key
}
