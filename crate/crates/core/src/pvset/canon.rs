use super::{LocalVector, ProductVector, ProductVectorSet};

type Code = Vec<(usize, u8)>;

struct Walk<'a> {
    set: &'a ProductVectorSet,
    perm: Vec<usize>,
    labels: Vec<Vec<Option<(usize, u8)>>>,
    next: Vec<usize>,
    used: Vec<bool>,
    out: Vec<Code>,
}

impl Walk<'_> {
    fn encode(&self, j: usize) -> Code {
        let v = &self.set.vectors()[j];
        self.perm
            .iter()
            .enumerate()
            .map(|(k, &p)| {
                let l = v.locals()[p];
                match self.labels[k][l.basis] {
                    Some((nb, flip)) => (nb, l.element ^ flip),
                    None => (self.next[k], 0),
                }
            })
            .collect()
    }

    fn run(&mut self, best: &mut Option<Vec<Code>>) {
        if let Some(b) = best.as_ref() {
            if self.out.as_slice() > &b[..self.out.len()] {
                return;
            }
        }
        let total = self.set.len();
        if self.out.len() == total {
            if best.as_ref().map_or(true, |b| self.out < *b) {
                *best = Some(self.out.clone());
            }
            return;
        }
        let codes: Vec<(usize, Code)> = (0..total)
            .filter(|&j| !self.used[j])
            .map(|j| (j, self.encode(j)))
            .collect();
        let min = codes.iter().map(|(_, c)| c).min().cloned().unwrap();
        for (j, code) in codes {
            if code != min {
                continue;
            }
            let v = &self.set.vectors()[j];
            let mut assigned = Vec::new();
            for (k, &p) in self.perm.iter().enumerate() {
                let l = v.locals()[p];
                if self.labels[k][l.basis].is_none() {
                    self.labels[k][l.basis] = Some((self.next[k], l.element));
                    self.next[k] += 1;
                    assigned.push((k, l.basis));
                }
            }
            self.used[j] = true;
            self.out.push(code);
            self.run(best);
            self.out.pop();
            self.used[j] = false;
            for (k, b) in assigned {
                self.labels[k][b] = None;
                self.next[k] -= 1;
            }
        }
    }
}

fn permutations(n: usize) -> Vec<Vec<usize>> {
    fn rec(cur: &mut Vec<usize>, free: &mut Vec<bool>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == free.len() {
            out.push(cur.clone());
            return;
        }
        for p in 0..free.len() {
            if free[p] {
                free[p] = false;
                cur.push(p);
                rec(cur, free, out);
                cur.pop();
                free[p] = true;
            }
        }
    }
    let mut out = Vec::new();
    rec(&mut Vec::with_capacity(n), &mut vec![true; n], &mut out);
    out
}

pub(super) fn canonical_form(set: &ProductVectorSet) -> ProductVectorSet {
    let n = set.parties();
    if set.is_empty() {
        return ProductVectorSet::from_parts_unchecked(vec![1; n], Vec::new());
    }
    let mut best: Option<Vec<Code>> = None;
    for perm in permutations(n) {
        let labels = perm
            .iter()
            .map(|&p| vec![None; set.bases_per_party()[p]])
            .collect();
        let mut walk = Walk {
            set,
            perm,
            labels,
            next: vec![0; n],
            used: vec![false; set.len()],
            out: Vec::with_capacity(set.len()),
        };
        walk.run(&mut best);
    }
    let codes = best.expect("nonempty set has a canonical form");
    let mut bases = vec![1; n];
    let vectors = codes
        .into_iter()
        .map(|code| {
            for (m, &(b, _)) in bases.iter_mut().zip(&code) {
                *m = (*m).max(b + 1);
            }
            ProductVector::new(code.into_iter().map(|(b, e)| LocalVector::new(b, e)).collect())
        })
        .collect();
    ProductVectorSet::from_parts_unchecked(bases, vectors)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn permutation_count() {
        assert_eq!(permutations(4).len(), 24);
    }

    #[test]
    fn relabelled_shifts_share_a_form() {
        let a = ProductVectorSet::from_symbols(&["000", "1ēe", "e1ē", "ēe1"]).unwrap();
        let b = ProductVectorSet::from_symbols(&["0e1", "11e", "eēē", "ē00"])
            .unwrap()
            .permute_parties(&[2, 0, 1])
            .unwrap();
        assert_eq!(a.canonical_form(), b.canonical_form());
        let c = a.canonical_form();
        assert_eq!(c.canonical_form(), c);
        assert_eq!(c.vectors()[0].to_symbols(), "000");
    }

    #[test]
    fn different_sizes_differ() {
        let a = ProductVectorSet::from_symbols(&["00", "11"]).unwrap();
        let b = ProductVectorSet::from_symbols(&["00", "01"]).unwrap();
        assert_ne!(a.canonical_form(), b.canonical_form());
    }
}
