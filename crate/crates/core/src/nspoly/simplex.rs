//! Exact two-phase tableau simplex for `min cᵀλ` subject to `Aλ = b`, `λ ≥ 0`.
//!
//! The entering column is the most negative reduced cost while the objective
//! improves; after a run of degenerate pivots the smallest-index rule takes
//! over until the objective moves again, so the method cannot cycle.
//! A floating-point pass supplies a starting basis that is then certified
//! exactly.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::rational::{to_f64, Rational};

const DEGENERATE_RUN: usize = 8;

pub(crate) struct StandardLp {
    pub rows: Vec<Vec<Rational>>,
    pub rhs: Vec<Rational>,
    pub cost: Vec<Rational>,
}

#[derive(Debug)]
pub(crate) struct LpSolution {
    pub value: Rational,
    pub x: Vec<Rational>,
    /// Multipliers π with πᵀA ≤ cᵀ, one per equality row.
    pub duals: Vec<Rational>,
    pub pivots: usize,
}

#[derive(Debug)]
pub(crate) enum LpOutcome {
    Optimal(LpSolution),
    Infeasible,
    Unbounded,
}

struct Tableau {
    n: usize,
    m: usize,
    t: Vec<Vec<Rational>>,
    z: Vec<Rational>,
    basis: Vec<usize>,
    pivots: usize,
}

impl Tableau {
    fn rhs(&self) -> usize {
        self.n + self.m
    }

    fn pivot(&mut self, r: usize, c: usize) {
        let pv = self.t[r][c].clone();
        let nz: Vec<usize> = (0..=self.rhs()).filter(|&j| !self.t[r][j].is_zero()).collect();
        for &j in &nz {
            self.t[r][j] = &self.t[r][j] / &pv;
        }
        let prow: Vec<(usize, Rational)> = nz.iter().map(|&j| (j, self.t[r][j].clone())).collect();
        for i in 0..self.m {
            if i == r || self.t[i][c].is_zero() {
                continue;
            }
            let f = self.t[i][c].clone();
            for (j, v) in &prow {
                self.t[i][*j] -= &f * v;
            }
        }
        if !self.z[c].is_zero() {
            let f = self.z[c].clone();
            for (j, v) in &prow {
                self.z[*j] -= &f * v;
            }
        }
        self.basis[r] = c;
        self.pivots += 1;
    }

    /// Runs to optimality over columns `< limit`. Returns false if unbounded.
    fn optimize(&mut self, limit: usize) -> bool {
        let rhs = self.rhs();
        let mut degenerate = 0;
        loop {
            let entering = if degenerate < DEGENERATE_RUN {
                let mut best: Option<usize> = None;
                for j in 0..limit {
                    if self.z[j].is_negative() && best.map_or(true, |b| self.z[j] < self.z[b]) {
                        best = Some(j);
                    }
                }
                best
            } else {
                (0..limit).find(|&j| self.z[j].is_negative())
            };
            let Some(c) = entering else {
                return true;
            };
            let mut leave: Option<(usize, Rational)> = None;
            for i in 0..self.m {
                if !self.t[i][c].is_positive() {
                    continue;
                }
                let ratio = &self.t[i][rhs] / &self.t[i][c];
                let better = match &leave {
                    None => true,
                    Some((k, r)) => ratio < *r || (ratio == *r && self.basis[i] < self.basis[*k]),
                };
                if better {
                    leave = Some((i, ratio));
                }
            }
            let Some((r, ratio)) = leave else {
                return false;
            };
            if ratio.is_zero() {
                degenerate += 1;
            } else {
                degenerate = 0;
            }
            self.pivot(r, c);
        }
    }
}

fn tableau(lp: &StandardLp) -> (Tableau, Vec<Rational>) {
    let m = lp.rows.len();
    let n = lp.cost.len();
    let mut sign = vec![Rational::one(); m];
    let mut t = Vec::with_capacity(m);
    for (i, row) in lp.rows.iter().enumerate() {
        let neg = lp.rhs[i].is_negative();
        if neg {
            sign[i] = -Rational::one();
        }
        let mut full: Vec<Rational> = row
            .iter()
            .map(|v| if neg { -v.clone() } else { v.clone() })
            .collect();
        full.extend((0..m).map(|k| Rational::from_integer(i64::from(k == i).into())));
        full.push(if neg { -lp.rhs[i].clone() } else { lp.rhs[i].clone() });
        t.push(full);
    }
    let tab = Tableau {
        n,
        m,
        t,
        z: vec![Rational::zero(); n + m + 1],
        basis: (n..n + m).collect(),
        pivots: 0,
    };
    (tab, sign)
}

fn phase_two(mut tab: Tableau, lp: &StandardLp, sign: &[Rational]) -> LpOutcome {
    let (n, m) = (tab.n, tab.m);
    let mut z = vec![Rational::zero(); n + m + 1];
    z[..n].clone_from_slice(&lp.cost);
    for r in 0..m {
        let b = tab.basis[r];
        if b >= n || lp.cost[b].is_zero() {
            continue;
        }
        let cb = lp.cost[b].clone();
        for j in 0..=n + m {
            if !tab.t[r][j].is_zero() {
                z[j] -= &cb * &tab.t[r][j];
            }
        }
    }
    tab.z = z;
    if !tab.optimize(n) {
        return LpOutcome::Unbounded;
    }
    let mut x = vec![Rational::zero(); n];
    for r in 0..m {
        if tab.basis[r] < n {
            x[tab.basis[r]] = tab.t[r][n + m].clone();
        }
    }
    let value = -tab.z[n + m].clone();
    let duals = (0..m).map(|k| -&tab.z[n + k] * &sign[k]).collect();
    LpOutcome::Optimal(LpSolution {
        value,
        x,
        duals,
        pivots: tab.pivots,
    })
}

/// Exact solve. A floating-point run proposes a basis, which is accepted
/// once both feasibility conditions hold exactly; otherwise the exact
/// tableau restarts from that basis, and failing that from scratch.
pub(crate) fn solve(lp: &StandardLp) -> LpOutcome {
    let mut proposed = None;
    for pricing in [Pricing::SteepestEdge, Pricing::Dantzig] {
        if let Some((basis, pivots)) = float_basis(lp, pricing) {
            if let Some(sol) = exact_from_basis(lp, &basis, pivots) {
                return LpOutcome::Optimal(sol);
            }
            proposed.get_or_insert(basis);
        }
    }
    if let Some(out) = proposed.and_then(|basis| warm_start(lp, &basis)) {
        return out;
    }
    solve_cold(lp)
}

pub(crate) fn solve_cold(lp: &StandardLp) -> LpOutcome {
    let (mut tab, sign) = tableau(lp);
    let (n, m) = (tab.n, tab.m);
    // phase 1: minimize the sum of artificials
    for r in 0..m {
        for j in 0..n {
            let v = tab.t[r][j].clone();
            tab.z[j] -= v;
        }
        let v = tab.t[r][n + m].clone();
        tab.z[n + m] -= v;
    }
    tab.optimize(n);
    if !tab.z[n + m].is_zero() {
        return LpOutcome::Infeasible;
    }
    for r in 0..m {
        if tab.basis[r] >= n {
            if let Some(c) = (0..n).find(|&j| !tab.t[r][j].is_zero()) {
                tab.pivot(r, c);
            }
        }
    }
    phase_two(tab, lp, &sign)
}

fn warm_start(lp: &StandardLp, basis: &[usize]) -> Option<LpOutcome> {
    let (mut tab, sign) = tableau(lp);
    let (n, m) = (tab.n, tab.m);
    let mut assigned = vec![false; m];
    for &c in basis {
        if c >= n {
            assigned[c - n] = true;
        }
    }
    for &c in basis.iter().filter(|&&c| c < n) {
        let r = (0..m).find(|&i| !assigned[i] && !tab.t[i][c].is_zero())?;
        assigned[r] = true;
        tab.pivot(r, c);
    }
    if (0..m).any(|r| tab.t[r][n + m].is_negative() || (tab.basis[r] >= n && !tab.t[r][n + m].is_zero())) {
        return None;
    }
    Some(phase_two(tab, lp, &sign))
}

/// Checks a proposed basis in exact arithmetic: basic values nonnegative
/// (artificials zero) and all reduced costs nonnegative.
fn exact_from_basis(lp: &StandardLp, basis: &[usize], pivots: usize) -> Option<LpSolution> {
    let m = lp.rows.len();
    let n = lp.cost.len();
    let column = |j: usize, i: usize| -> Rational {
        if j < n {
            lp.rows[i][j].clone()
        } else if j - n == i {
            if lp.rhs[i].is_negative() {
                -Rational::one()
            } else {
                Rational::one()
            }
        } else {
            Rational::zero()
        }
    };
    let b: Vec<Vec<Rational>> = (0..m).map(|i| basis.iter().map(|&j| column(j, i)).collect()).collect();
    let xb = solve_square(b.clone(), lp.rhs.clone())?;
    if basis
        .iter()
        .zip(&xb)
        .any(|(&j, v)| v.is_negative() || (j >= n && !v.is_zero()))
    {
        return None;
    }
    let bt: Vec<Vec<Rational>> = (0..m).map(|k| (0..m).map(|i| b[i][k].clone()).collect()).collect();
    let cb: Vec<Rational> = basis
        .iter()
        .map(|&j| if j < n { lp.cost[j].clone() } else { Rational::zero() })
        .collect();
    let y = solve_square(bt, cb)?;
    for j in 0..n {
        let dot = (0..m)
            .filter(|&i| !lp.rows[i][j].is_zero() && !y[i].is_zero())
            .fold(Rational::zero(), |acc, i| acc + &lp.rows[i][j] * &y[i]);
        if (&lp.cost[j] - dot).is_negative() {
            return None;
        }
    }
    let mut x = vec![Rational::zero(); n];
    let mut value = Rational::zero();
    for (&j, v) in basis.iter().zip(xb) {
        if j < n {
            value += &lp.cost[j] * &v;
            x[j] = v;
        }
    }
    Some(LpSolution {
        value,
        x,
        duals: y,
        pivots,
    })
}

/// Solves a square system by fraction-free elimination; None if singular.
fn solve_square(a: Vec<Vec<Rational>>, b: Vec<Rational>) -> Option<Vec<Rational>> {
    let m = a.len();
    let mut rows: Vec<Vec<BigInt>> = a
        .into_iter()
        .zip(b)
        .map(|(mut row, r)| {
            row.push(r);
            let den = row.iter().fold(BigInt::one(), |acc, v| acc.lcm(v.denom()));
            row.iter().map(|v| v.numer() * (&den / v.denom())).collect()
        })
        .collect();
    let mut prev = BigInt::one();
    for k in 0..m {
        let p = (k..m).find(|&i| !rows[i][k].is_zero())?;
        rows.swap(k, p);
        let (head, tail) = rows.split_at_mut(k + 1);
        let pr = &head[k];
        for row in tail.iter_mut() {
            let f = row[k].clone();
            for j in k + 1..=m {
                let v = if f.is_zero() {
                    &pr[k] * &row[j]
                } else {
                    &pr[k] * &row[j] - &f * &pr[j]
                };
                row[j] = v / &prev;
            }
            row[k] = BigInt::zero();
        }
        prev = rows[k][k].clone();
    }
    let mut x = vec![Rational::zero(); m];
    for k in (0..m).rev() {
        let mut acc = Rational::from_integer(rows[k][m].clone());
        for j in k + 1..m {
            if !rows[k][j].is_zero() && !x[j].is_zero() {
                acc -= Rational::from_integer(rows[k][j].clone()) * &x[j];
            }
        }
        x[k] = acc / Rational::from_integer(rows[k][k].clone());
    }
    Some(x)
}

const EPS: f64 = 1e-9;
const FLOAT_PIVOT_LIMIT: usize = 500_000;
const PERTURBATION: f64 = 1e-6;
const PIVOT_TOL: f64 = 1e-7;

/// Two-phase simplex in floating point; returns the final basis.
fn float_basis(lp: &StandardLp, pricing: Pricing) -> Option<(Vec<usize>, usize)> {
    let m = lp.rows.len();
    let n = lp.cost.len();
    let w = n + m + 1;
    // b + δ·A·r with r > 0 stays feasible and breaks degeneracy; the
    // exact check runs against the unperturbed b.
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed);
    let r: Vec<f64> = (0..n).map(|_| rng.gen_range(0.5..1.5)).collect();
    let mut t = vec![0.0f64; m * w];
    for i in 0..m {
        let row: Vec<f64> = lp.rows[i].iter().map(to_f64).collect();
        let b = to_f64(&lp.rhs[i]) + PERTURBATION * row.iter().zip(&r).map(|(a, r)| a * r).sum::<f64>();
        let s = if b < 0.0 { -1.0 } else { 1.0 };
        for (j, a) in row.iter().enumerate() {
            t[i * w + j] = s * a;
        }
        t[i * w + n + i] = 1.0;
        t[i * w + n + m] = s * b;
    }
    let mut basis: Vec<usize> = (n..n + m).collect();
    let mut z = vec![0.0f64; w];
    for i in 0..m {
        for j in (0..n).chain(std::iter::once(n + m)) {
            z[j] -= t[i * w + j];
        }
    }
    let mut pivots = 0;
    let mut ft = FloatTableau {
        m,
        w,
        pricing,
        t: &mut t,
        z: &mut z,
        basis: &mut basis,
        pivots: &mut pivots,
    };
    if !ft.optimize(n) || ft.z[n + m].abs() > EPS * m as f64 {
        return None;
    }
    for r in 0..m {
        if ft.basis[r] >= n {
            if let Some(c) = (0..n).find(|&j| ft.t[r * w + j].abs() > EPS) {
                ft.pivot(r, c);
            }
        }
    }
    let mut z2 = vec![0.0f64; w];
    for j in 0..n {
        z2[j] = to_f64(&lp.cost[j]);
    }
    for r in 0..m {
        let b = ft.basis[r];
        if b < n {
            let cb = z2[b];
            if cb != 0.0 {
                for j in 0..w {
                    z2[j] -= cb * ft.t[r * w + j];
                }
            }
        }
    }
    ft.z.copy_from_slice(&z2);
    if !ft.optimize(n) {
        return None;
    }
    Some((ft.basis.to_vec(), *ft.pivots))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Pricing {
    /// Most negative reduced cost per unit column norm.
    SteepestEdge,
    /// Most negative reduced cost.
    Dantzig,
}

struct FloatTableau<'a> {
    m: usize,
    w: usize,
    pricing: Pricing,
    t: &'a mut [f64],
    z: &'a mut [f64],
    basis: &'a mut [usize],
    pivots: &'a mut usize,
}

impl FloatTableau<'_> {
    fn pivot(&mut self, r: usize, c: usize) {
        let w = self.w;
        let pv = self.t[r * w + c];
        for j in 0..w {
            self.t[r * w + j] /= pv;
        }
        let prow: Vec<(usize, f64)> = (0..w)
            .filter_map(|j| {
                let v = self.t[r * w + j];
                (v != 0.0).then_some((j, v))
            })
            .collect();
        for i in 0..self.m {
            let f = self.t[i * w + c];
            if i == r || f == 0.0 {
                continue;
            }
            for &(j, v) in &prow {
                self.t[i * w + j] -= f * v;
            }
            self.t[i * w + c] = 0.0;
        }
        let f = self.z[c];
        if f != 0.0 {
            for &(j, v) in &prow {
                self.z[j] -= f * v;
            }
            self.z[c] = 0.0;
        }
        self.basis[r] = c;
        *self.pivots += 1;
    }

    fn column_norms(&self, limit: usize) -> Vec<f64> {
        match self.pricing {
            Pricing::Dantzig => vec![1.0; limit],
            Pricing::SteepestEdge => {
                let mut norms = vec![1.0f64; limit];
                for row in self.t.chunks(self.w) {
                    for (n, v) in norms.iter_mut().zip(&row[..limit]) {
                        *n += v * v;
                    }
                }
                norms.into_iter().map(f64::sqrt).collect()
            }
        }
    }

    /// Two-pass ratio test: the largest pivot among rows whose ratio is
    /// within tolerance of the minimum.
    fn harris_row(&self, c: usize) -> Option<(usize, f64)> {
        let w = self.w;
        let rhs = w - 1;
        let rows = || {
            (0..self.m).filter_map(move |i| {
                let a = self.t[i * w + c];
                (a > PIVOT_TOL).then(|| (i, a, self.t[i * w + rhs].max(0.0)))
            })
        };
        let bound = rows().map(|(_, a, b)| (b + EPS) / a).min_by(f64::total_cmp)?;
        rows()
            .filter(|&(_, a, b)| b / a <= bound)
            .max_by(|x, y| x.1.total_cmp(&y.1))
            .map(|(i, a, b)| (i, b / a))
    }

    /// Minimum ratio, ties to the smallest basic index.
    fn bland_row(&self, c: usize) -> Option<(usize, f64)> {
        let w = self.w;
        let rhs = w - 1;
        let mut leave: Option<(usize, f64)> = None;
        for i in 0..self.m {
            let a = self.t[i * w + c];
            if a <= PIVOT_TOL {
                continue;
            }
            let ratio = self.t[i * w + rhs].max(0.0) / a;
            let better = match leave {
                None => true,
                Some((k, best)) => ratio < best - EPS || (ratio <= best + EPS && self.basis[i] < self.basis[k]),
            };
            if better {
                leave = Some((i, ratio));
            }
        }
        leave
    }

    fn optimize(&mut self, limit: usize) -> bool {
        let mut degenerate = 0;
        // Columns whose ratio test found no row: rounding noise, skipped.
        let mut skipped = vec![false; limit];
        loop {
            if *self.pivots > FLOAT_PIVOT_LIMIT {
                return false;
            }
            let entering = if degenerate < DEGENERATE_RUN {
                let norms = self.column_norms(limit);
                (0..limit)
                    .filter(|&j| !skipped[j] && self.z[j] < -EPS)
                    .min_by(|&a, &b| (self.z[a] / norms[a]).total_cmp(&(self.z[b] / norms[b])))
            } else {
                (0..limit).find(|&j| !skipped[j] && self.z[j] < -EPS)
            };
            let Some(c) = entering else {
                return true;
            };
            let leave = if degenerate < DEGENERATE_RUN {
                self.harris_row(c)
            } else {
                self.bland_row(c)
            };
            let Some((r, ratio)) = leave else {
                skipped[c] = true;
                continue;
            };
            if ratio <= EPS {
                degenerate += 1;
            } else {
                degenerate = 0;
            }
            self.pivot(r, c);
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{int, rat};

    fn r(v: &[i64]) -> Vec<Rational> {
        v.iter().map(|&x| int(x)).collect()
    }

    #[test]
    fn small_lp() {
        // min -x - y  s.t. x + 2y + s1 = 4, 3x + y + s2 = 6
        let lp = StandardLp {
            rows: vec![r(&[1, 2, 1, 0]), r(&[3, 1, 0, 1])],
            rhs: r(&[4, 6]),
            cost: r(&[-1, -1, 0, 0]),
        };
        let LpOutcome::Optimal(s) = solve(&lp) else { panic!() };
        assert_eq!(s.value, rat(-14, 5));
        assert_eq!(s.x[..2], [rat(8, 5), rat(6, 5)]);
        // dual feasibility: cost - Aᵀπ ≥ 0
        for j in 0..4 {
            let red = lp.cost[j].clone() - (0..2).map(|i| &lp.rows[i][j] * &s.duals[i]).sum::<Rational>();
            assert!(!red.is_negative());
        }
    }

    #[test]
    fn negative_rhs_and_infeasible() {
        // x - y = -1 with x, y ≥ 0, min x
        let lp = StandardLp {
            rows: vec![r(&[1, -1])],
            rhs: r(&[-1]),
            cost: r(&[1, 0]),
        };
        let LpOutcome::Optimal(s) = solve(&lp) else { panic!() };
        assert_eq!(s.value, int(0));
        assert_eq!(s.x, r(&[0, 1]));
        let bad = StandardLp {
            rows: vec![r(&[1, 1])],
            rhs: r(&[-1]),
            cost: r(&[0, 0]),
        };
        assert!(matches!(solve(&bad), LpOutcome::Infeasible));
        let unbounded = StandardLp {
            rows: vec![r(&[1, -1])],
            rhs: r(&[0]),
            cost: r(&[-1, 0]),
        };
        assert!(matches!(solve(&unbounded), LpOutcome::Unbounded));
    }

    #[test]
    fn certified_basis_matches_cold_solve() {
        let lp = StandardLp {
            rows: vec![r(&[1, 1, 1, 0, 0]), r(&[1, -1, 0, 1, 0]), r(&[0, 1, 0, 0, 1])],
            rhs: vec![int(3), int(1), rat(5, 2)],
            cost: r(&[-2, -3, 0, 0, 0]),
        };
        let (basis, _) = float_basis(&lp, Pricing::SteepestEdge).unwrap();
        let certified = exact_from_basis(&lp, &basis, 0).unwrap();
        let LpOutcome::Optimal(cold) = solve_cold(&lp) else { panic!() };
        assert_eq!(certified.value, cold.value);
        assert_eq!(certified.value, rat(-17, 2));
        let LpOutcome::Optimal(warm) = warm_start(&lp, &basis).unwrap() else { panic!() };
        assert_eq!(warm.value, cold.value);
    }

    #[test]
    fn solve_square_exact() {
        let a = vec![r(&[2, 1]), r(&[1, 3])];
        assert_eq!(solve_square(a, vec![int(1), rat(1, 2)]).unwrap(), vec![rat(1, 2), int(0)]);
        assert!(solve_square(vec![r(&[1, 2]), r(&[2, 4])], r(&[1, 1])).is_none());
    }
}
