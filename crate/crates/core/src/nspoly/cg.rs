//! Collins–Gisin coordinates: for every set T of parties and settings x_T,
//! the probability that all parties in T output 0. The empty set gives the
//! constant coordinate 1. On the affine hull of the no-signalling polytope
//! these coordinates determine the box uniquely.

use crate::bellgen::{CorrelationBox, DeterministicStrategy, Scalar, Scenario};

#[derive(Clone, Debug)]
pub struct CgLayout {
    radix: Vec<usize>,
    len: usize,
}

impl CgLayout {
    pub fn new(scenario: &Scenario) -> Self {
        let radix: Vec<usize> = scenario.settings().iter().map(|m| m + 1).collect();
        let len = radix.iter().product();
        Self { radix, len }
    }

    /// Number of coordinates including the constant one.
    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    /// Digit 0 means the party is absent, digit k its setting k − 1.
    pub fn index(&self, digits: &[usize]) -> usize {
        digits
            .iter()
            .zip(&self.radix)
            .fold(0, |acc, (&d, &r)| acc * r + d)
    }

    pub fn digits(&self, mut index: usize) -> Vec<usize> {
        let mut d = vec![0; self.radix.len()];
        for i in (0..self.radix.len()).rev() {
            d[i] = index % self.radix[i];
            index /= self.radix[i];
        }
        d
    }

    /// p(a|x) as a signed sum of coordinates, by inclusion–exclusion over
    /// the parties that output 1.
    pub fn expand(&self, a: &[u8], x: &[usize]) -> Vec<(usize, i64)> {
        let ones: Vec<usize> = (0..a.len()).filter(|&i| a[i] == 1).collect();
        let base: Vec<usize> = (0..a.len())
            .map(|i| if a[i] == 0 { x[i] + 1 } else { 0 })
            .collect();
        (0u64..1 << ones.len())
            .map(|mask| {
                let mut d = base.clone();
                let mut sign = 1;
                for (k, &i) in ones.iter().enumerate() {
                    if mask >> k & 1 == 1 {
                        d[i] = x[i] + 1;
                        sign = -sign;
                    }
                }
                (self.index(&d), sign)
            })
            .collect()
    }

    /// Coordinates of a deterministic strategy: a tensor product of the
    /// local vectors (1, [s_i(0) = 0], …, [s_i(m_i − 1) = 0]).
    pub fn strategy(&self, s: &DeterministicStrategy) -> Vec<u8> {
        let mut v = vec![1u8];
        for table in &s.tables {
            let local: Vec<u8> = std::iter::once(1)
                .chain(table.iter().map(|&o| u8::from(o == 0)))
                .collect();
            let mut next = Vec::with_capacity(v.len() * local.len());
            for &a in &v {
                for &b in &local {
                    next.push(a & b);
                }
            }
            v = next;
        }
        v
    }

    /// Marginals of a box, with parties outside T read at setting 0.
    pub fn of_box<T: Scalar>(&self, b: &CorrelationBox<T>) -> Vec<T> {
        let sc = &b.scenario;
        let n = sc.parties();
        (0..self.len)
            .map(|k| {
                let d = self.digits(k);
                let x: Vec<usize> = d.iter().map(|&di| di.saturating_sub(1)).collect();
                let members: Vec<usize> = (0..n).filter(|&i| d[i] > 0).collect();
                let free: Vec<usize> = (0..n).filter(|&i| d[i] == 0).collect();
                let mut sum = T::zero();
                for mask in 0u64..1 << free.len() {
                    let mut a = vec![0u8; n];
                    for (j, &i) in free.iter().enumerate() {
                        a[i] = (mask >> j & 1) as u8;
                    }
                    debug_assert!(members.iter().all(|&i| a[i] == 0));
                    sum = sum + b.get(&a, &x).clone();
                }
                sum
            })
            .collect()
    }

    /// The full table determined by coordinates `y` (constant included).
    pub fn to_box<T: Scalar>(&self, scenario: &Scenario, y: &[T]) -> CorrelationBox<T> {
        CorrelationBox::from_fn(scenario, |a, x| {
            self.expand(a, x).into_iter().fold(T::zero(), |acc, (k, s)| {
                if s > 0 {
                    acc + y[k].clone()
                } else {
                    acc - y[k].clone()
                }
            })
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bellgen::strategies;
    use crate::rational::Rational;

    #[test]
    fn strategy_coordinates_match_box_marginals() {
        let sc = Scenario::new(vec![2, 3, 1]).unwrap();
        let cg = CgLayout::new(&sc);
        assert_eq!(cg.len(), 3 * 4 * 2);
        for s in strategies(&sc) {
            let b = s.to_box::<Rational>(&sc);
            let direct: Vec<Rational> = cg.strategy(&s).into_iter().map(|v| Rational::from_integer(v.into())).collect();
            assert_eq!(cg.of_box(&b), direct);
            assert_eq!(cg.to_box(&sc, &direct), b);
        }
    }
}
