use std::collections::HashSet;

use crate::bits::Bits;
use super::{LocalVector, ProductVector, ProductVectorSet, PvsError};

const MAX_ALPHABET: usize = 1 << 14;

/// Lazy enumeration of UPBs of a given size, one per symmetry class.
///
/// Sets are grown as increasing sequences over the finite alphabet of
/// `(2 m_max)^n` vectors, starting from the all-zero vector. At every party
/// a basis may first appear only as the next unused label and with element
/// 0; the lexicographically least member of each symmetry class obeys both
/// rules, so no class is lost.
pub struct UpbSearch {
    n: usize,
    m_max: usize,
    size: usize,
    budget: u64,
    nodes: u64,
    alphabet: Vec<ProductVector>,
    ortho: Vec<Bits>,
    stack: Vec<Frame>,
    chosen: Vec<usize>,
    seen: HashSet<ProductVectorSet>,
    finished: bool,
}

struct Frame {
    allowed: Bits,
    cursor: usize,
    used: Vec<usize>,
}

pub fn search_upbs(n: usize, m_max: usize, size: usize, budget: u64) -> Result<UpbSearch, PvsError> {
    if n == 0 {
        return Err(PvsError::NoParties);
    }
    if m_max == 0 {
        return Err(PvsError::InvalidArgument("m_max must be at least 1".into()));
    }
    let dim = 1usize.checked_shl(n as u32).unwrap_or(usize::MAX);
    if size == 0 || size >= dim {
        return Err(PvsError::InvalidArgument(format!(
            "size must lie in 1..{dim}"
        )));
    }
    let radix = 2 * m_max;
    let total = radix
        .checked_pow(n as u32)
        .filter(|&t| t <= MAX_ALPHABET)
        .ok_or_else(|| PvsError::InvalidArgument("search alphabet too large".into()))?;
    let alphabet: Vec<ProductVector> = (0..total)
        .map(|mut idx| {
            let mut locals = vec![LocalVector::new(0, 0); n];
            for i in (0..n).rev() {
                let d = idx % radix;
                idx /= radix;
                locals[i] = LocalVector::new(d / 2, (d % 2) as u8);
            }
            ProductVector::new(locals)
        })
        .collect();
    let ortho = alphabet
        .iter()
        .map(|u| {
            let mut b = Bits::new(total);
            for (k, v) in alphabet.iter().enumerate() {
                if u.is_orthogonal(v) {
                    b.set(k);
                }
            }
            b
        })
        .collect();
    let mut search = UpbSearch {
        n,
        m_max,
        size,
        budget,
        nodes: 0,
        alphabet,
        ortho,
        stack: Vec::new(),
        chosen: vec![0],
        seen: HashSet::new(),
        finished: false,
    };
    let root = search.frame_after(&Bits::full(total), 0, vec![1; n]);
    search.stack.push(root);
    Ok(search)
}

impl UpbSearch {
    fn frame_after(&self, allowed: &Bits, idx: usize, used: Vec<usize>) -> Frame {
        let mut next = allowed.clone();
        next.intersect_with(&self.ortho[idx]);
        Frame {
            allowed: next,
            cursor: idx + 1,
            used,
        }
    }

    /// Basis counts after adding `idx`, or `None` if it breaks the
    /// first-appearance rule.
    fn admit(&self, idx: usize, used: &[usize]) -> Option<Vec<usize>> {
        let mut next = used.to_vec();
        for (i, l) in self.alphabet[idx].locals().iter().enumerate() {
            if l.basis >= next[i] {
                if l.basis != next[i] || l.element != 0 {
                    return None;
                }
                next[i] += 1;
            }
        }
        Some(next)
    }

    fn leaf(&mut self) -> Option<ProductVectorSet> {
        let vectors = self.chosen.iter().map(|&i| self.alphabet[i].clone()).collect();
        let set = ProductVectorSet::from_parts_unchecked(vec![self.m_max; self.n], vectors);
        if !set.extension_candidates().is_empty() {
            return None;
        }
        let canon = set.canonical_form();
        self.seen.insert(canon.clone()).then_some(canon)
    }
}

impl Iterator for UpbSearch {
    type Item = Result<ProductVectorSet, PvsError>;

    fn next(&mut self) -> Option<Self::Item> {
        if self.finished {
            return None;
        }
        if self.size == 1 {
            self.finished = true;
            return self.leaf().map(Ok);
        }
        while let Some(top) = self.stack.last_mut() {
            let need = self.size - self.chosen.len();
            let Some(idx) = top.allowed.next_from(top.cursor) else {
                self.stack.pop();
                self.chosen.pop();
                continue;
            };
            top.cursor = idx + 1;
            let used = top.used.clone();
            let Some(used) = self.admit(idx, &used) else {
                continue;
            };
            self.nodes += 1;
            if self.nodes > self.budget {
                self.finished = true;
                return Some(Err(PvsError::SearchBudgetExceeded(self.budget)));
            }
            if need == 1 {
                let mut rest = self.stack.last().unwrap().allowed.clone();
                rest.intersect_with(&self.ortho[idx]);
                if !rest.is_zero() {
                    continue;
                }
                self.chosen.push(idx);
                let found = self.leaf();
                self.chosen.pop();
                if let Some(set) = found {
                    return Some(Ok(set));
                }
                continue;
            }
            self.chosen.push(idx);
            let allowed = self.stack.last().unwrap().allowed.clone();
            let frame = self.frame_after(&allowed, idx, used);
            if frame.allowed.next_from(frame.cursor).is_none() {
                self.chosen.pop();
                continue;
            }
            self.stack.push(frame);
        }
        self.finished = true;
        None
    }
}
