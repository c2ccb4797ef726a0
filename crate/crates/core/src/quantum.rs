//! Real qubit realizations of product-vector sets: Bell-operator spectra,
//! the bound entangled state of a UPB, and witness-induced boxes.

use std::f64::consts::{FRAC_PI_2, FRAC_PI_4, PI};

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::bellgen::{build_inequality, BellError, BellInequality, CorrelationBox, Scenario};
use crate::pvset::{ClassificationKind, ProductVectorSet, PvsError};

pub const ORTHO_TOL: f64 = 1e-12;
pub const SPECTRAL_TOL: f64 = 1e-9;
pub const MAX_PARTIES: usize = 10;
pub const DEFAULT_RESTARTS: usize = 32;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum QuantumError {
    #[error("bases {first} and {second} at party {party} are equal or orthogonal")]
    DegenerateRealization { party: usize, first: usize, second: usize },
    #[error("party {party} needs {needed} bases but the realization has {available}")]
    RealizationTooSmall { party: usize, needed: usize, available: usize },
    #[error("realization has {found} parties, expected {expected}")]
    PartyMismatch { expected: usize, found: usize },
    #[error("set is {0}, not a UPB")]
    NotAUpb(ClassificationKind),
    #[error("epsilon {epsilon} too large: box entry {entry} is negative")]
    EpsilonTooLarge { epsilon: f64, entry: f64 },
    #[error("epsilon must be positive and finite, got {0}")]
    InvalidEpsilon(f64),
    #[error("{0} parties exceed the dense limit of {MAX_PARTIES}")]
    TooManyParties(usize),
    #[error("realized vectors {0} and {1} are not orthogonal")]
    NotOrthogonal(usize, usize),
    #[error(transparent)]
    Pvs(#[from] PvsError),
    #[error(transparent)]
    Bell(#[from] BellError),
}

/// Angle of basis `k` in the default realization: 0, π/4, then
/// π/4 + π/2^(k+1).
pub fn default_angle(k: usize) -> f64 {
    match k {
        0 => 0.0,
        1 => FRAC_PI_4,
        _ => FRAC_PI_4 + PI / 2f64.powi(k as i32 + 1),
    }
}

/// Per party and basis an angle θ; element 0 is (cos θ, sin θ) and
/// element 1 is (−sin θ, cos θ).
#[derive(Clone, Debug, PartialEq)]
pub struct BasisRealization {
    angles: Vec<Vec<f64>>,
}

impl BasisRealization {
    pub fn new(angles: Vec<Vec<f64>>) -> Result<Self, QuantumError> {
        for (party, a) in angles.iter().enumerate() {
            for i in 0..a.len() {
                for j in i + 1..a.len() {
                    let r = (a[i] - a[j]).rem_euclid(FRAC_PI_2);
                    if r.min(FRAC_PI_2 - r) < SPECTRAL_TOL {
                        return Err(QuantumError::DegenerateRealization { party, first: i, second: j });
                    }
                }
            }
        }
        Ok(Self { angles })
    }

    pub fn default_for(bases_per_party: &[usize]) -> Self {
        Self {
            angles: bases_per_party
                .iter()
                .map(|&m| (0..m).map(default_angle).collect())
                .collect(),
        }
    }

    /// The same angle list at every party.
    pub fn uniform(parties: usize, per_basis: &[f64]) -> Result<Self, QuantumError> {
        Self::new(vec![per_basis.to_vec(); parties])
    }

    /// Angles drawn uniformly from [0, π), redrawn while degenerate.
    pub fn random<R: Rng>(bases_per_party: &[usize], rng: &mut R) -> Self {
        loop {
            let angles = bases_per_party
                .iter()
                .map(|&m| (0..m).map(|_| rng.gen_range(0.0..PI)).collect())
                .collect();
            if let Ok(r) = Self::new(angles) {
                if r.min_separation() > 1e-3 {
                    return r;
                }
            }
        }
    }

    fn min_separation(&self) -> f64 {
        let mut best = f64::INFINITY;
        for a in &self.angles {
            for i in 0..a.len() {
                for j in i + 1..a.len() {
                    let r = (a[i] - a[j]).rem_euclid(FRAC_PI_2);
                    best = best.min(r.min(FRAC_PI_2 - r));
                }
            }
        }
        best
    }

    pub fn angles(&self) -> &[Vec<f64>] {
        &self.angles
    }

    /// Direction of a realized local vector.
    pub fn angle(&self, party: usize, basis: usize, element: u8) -> f64 {
        self.angles[party][basis] + f64::from(element) * FRAC_PI_2
    }

    fn check(&self, needed: &[usize]) -> Result<(), QuantumError> {
        if needed.len() != self.angles.len() {
            return Err(QuantumError::PartyMismatch {
                expected: needed.len(),
                found: self.angles.len(),
            });
        }
        if needed.len() > MAX_PARTIES {
            return Err(QuantumError::TooManyParties(needed.len()));
        }
        for (party, (&n, a)) in needed.iter().zip(&self.angles).enumerate() {
            if a.len() < n {
                return Err(QuantumError::RealizationTooSmall {
                    party,
                    needed: n,
                    available: a.len(),
                });
            }
        }
        Ok(())
    }
}

fn product_state(angles: &[f64]) -> DVector<f64> {
    let mut v = vec![1.0];
    for &a in angles {
        let (s, c) = a.sin_cos();
        v = v.iter().flat_map(|&x| [x * c, x * s]).collect();
    }
    DVector::from_vec(v)
}

fn used_bases(u: &ProductVectorSet) -> Vec<usize> {
    let mut m = vec![0; u.parties()];
    for v in u.vectors() {
        for (k, l) in m.iter_mut().zip(v.locals()) {
            *k = (*k).max(l.basis + 1);
        }
    }
    m
}

fn vector_angles(u: &ProductVectorSet, real: &BasisRealization) -> Vec<Vec<f64>> {
    u.vectors()
        .iter()
        .map(|v| {
            v.locals()
                .iter()
                .enumerate()
                .map(|(i, l)| real.angle(i, l.basis, l.element))
                .collect()
        })
        .collect()
}

/// ⟨ψ|Π_U|ψ⟩ for a product ψ given by local angles.
fn projector_weight(vectors: &[Vec<f64>], psi: &[f64]) -> f64 {
    vectors
        .iter()
        .map(|v| v.iter().zip(psi).map(|(a, b)| (a - b).cos().powi(2)).product::<f64>())
        .sum()
}

/// Concrete state vectors, checked for pairwise orthogonality.
pub fn realize(u: &ProductVectorSet, real: &BasisRealization) -> Result<Vec<DVector<f64>>, QuantumError> {
    real.check(&used_bases(u))?;
    let states: Vec<DVector<f64>> = vector_angles(u, real).iter().map(|a| product_state(a)).collect();
    for i in 0..states.len() {
        for j in i + 1..states.len() {
            if states[i].dot(&states[j]).abs() > ORTHO_TOL {
                return Err(QuantumError::NotOrthogonal(i, j));
            }
        }
    }
    Ok(states)
}

/// Σ_j q_j ⊗_i P_j^(i), setting x at party i measured in basis x.
pub fn bell_operator(ineq: &BellInequality, real: &BasisRealization) -> Result<DMatrix<f64>, QuantumError> {
    let sc = &ineq.scenario;
    real.check(sc.settings())?;
    let dim = 1usize << sc.parties();
    let mut op = DMatrix::zeros(dim, dim);
    for t in &ineq.terms {
        let angles: Vec<f64> = (0..sc.parties())
            .map(|i| real.angle(i, t.settings[i], t.outcomes[i]))
            .collect();
        let phi = product_state(&angles);
        op += (&phi * phi.transpose()) * crate::rational::to_f64(&t.weight);
    }
    Ok(op)
}

/// Eigenvalues in decreasing order.
pub fn bell_operator_spectrum(ineq: &BellInequality, real: &BasisRealization) -> Result<Vec<f64>, QuantumError> {
    Ok(eigenvalues(bell_operator(ineq, real)?))
}

fn eigenvalues(m: DMatrix<f64>) -> Vec<f64> {
    let mut ev: Vec<f64> = SymmetricEigen::new(m).eigenvalues.iter().copied().collect();
    ev.sort_by(|a, b| b.total_cmp(a));
    ev
}

fn require_upb(u: &ProductVectorSet) -> Result<(), QuantumError> {
    let kind = u.classify()?.kind;
    if kind == ClassificationKind::Upb {
        Ok(())
    } else {
        Err(QuantumError::NotAUpb(kind))
    }
}

fn projector(u: &ProductVectorSet, real: &BasisRealization) -> Result<DMatrix<f64>, QuantumError> {
    let dim = 1usize << u.parties();
    let mut p = DMatrix::zeros(dim, dim);
    for s in realize(u, real)? {
        p += &s * s.transpose();
    }
    Ok(p)
}

#[derive(Clone, Debug, PartialEq)]
pub struct PptEntry {
    /// Parties whose indices are transposed.
    pub transposed: Vec<usize>,
    pub min_eigenvalue: f64,
}

#[derive(Clone, Debug)]
pub struct UpbState {
    pub rho: DMatrix<f64>,
    pub trace: f64,
    pub rank: usize,
    pub min_eigenvalue: f64,
    pub ppt: Vec<PptEntry>,
}

impl UpbState {
    pub fn is_ppt(&self) -> bool {
        self.ppt.iter().all(|e| e.min_eigenvalue >= -SPECTRAL_TOL)
    }
}

pub fn partial_transpose(m: &DMatrix<f64>, parties: usize, transposed: &[usize]) -> DMatrix<f64> {
    let mask: usize = transposed.iter().map(|&p| 1 << (parties - 1 - p)).sum();
    let dim = m.nrows();
    DMatrix::from_fn(dim, dim, |i, j| {
        let swap = (i ^ j) & mask;
        m[(i ^ swap, j ^ swap)]
    })
}

/// ρ_U = (1 − Π_U)/(2^n − |U|) with its partial-transpose spectra over
/// every bipartition.
pub fn upb_state(u: &ProductVectorSet, real: &BasisRealization) -> Result<UpbState, QuantumError> {
    require_upb(u)?;
    let n = u.parties();
    let dim = 1usize << n;
    let p = projector(u, real)?;
    let rho = (DMatrix::identity(dim, dim) - p) / (dim - u.len()) as f64;
    let ev = eigenvalues(rho.clone());
    let rank = ev.iter().filter(|&&e| e > SPECTRAL_TOL).count();
    let min_eigenvalue = ev.last().copied().unwrap_or(0.0);
    let ppt = (1usize..1 << (n - 1))
        .map(|mask| {
            let transposed: Vec<usize> = (0..n - 1).filter(|&i| mask >> i & 1 == 1).collect();
            let pt = partial_transpose(&rho, n, &transposed);
            PptEntry {
                min_eigenvalue: eigenvalues(pt).last().copied().unwrap_or(0.0),
                transposed,
            }
        })
        .collect();
    Ok(UpbState {
        trace: rho.trace(),
        rho,
        rank,
        min_eigenvalue,
        ppt,
    })
}

/// Minimum of ⟨ψ|Π_U|ψ⟩ over products of the realized local vectors.
pub fn epsilon_prime(u: &ProductVectorSet, real: &BasisRealization) -> Result<f64, QuantumError> {
    require_upb(u)?;
    Ok(local_minimum(u, real)?.0)
}

fn local_minimum(u: &ProductVectorSet, real: &BasisRealization) -> Result<(f64, Vec<f64>), QuantumError> {
    let m = used_bases(u);
    real.check(&m)?;
    let vectors = vector_angles(u, real);
    let choices: Vec<Vec<f64>> = m
        .iter()
        .enumerate()
        .map(|(i, &k)| (0..2 * k).map(|c| real.angle(i, c / 2, (c % 2) as u8)).collect())
        .collect();
    let mut best = (f64::INFINITY, Vec::new());
    let mut idx = vec![0usize; m.len()];
    loop {
        let psi: Vec<f64> = idx.iter().zip(&choices).map(|(&k, c)| c[k]).collect();
        let w = projector_weight(&vectors, &psi);
        if w < best.0 {
            best = (w, psi);
        }
        let mut i = m.len();
        loop {
            if i == 0 {
                return Ok(best);
            }
            i -= 1;
            idx[i] += 1;
            if idx[i] < choices[i].len() {
                break;
            }
            idx[i] = 0;
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct EpsilonGlobal {
    pub best: f64,
    pub worst: f64,
    pub restarts: usize,
    /// Local angles of the best product state found.
    pub state: Vec<f64>,
}

/// Alternating site-wise minimization over real product states from
/// random starting points.
pub fn epsilon_global(
    u: &ProductVectorSet,
    real: &BasisRealization,
    restarts: usize,
    seed: u64,
) -> Result<EpsilonGlobal, QuantumError> {
    real.check(&used_bases(u))?;
    let vectors = vector_angles(u, real);
    let n = u.parties();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = EpsilonGlobal {
        best: f64::INFINITY,
        worst: f64::NEG_INFINITY,
        restarts: restarts.max(1),
        state: Vec::new(),
    };
    for _ in 0..out.restarts {
        let mut psi: Vec<f64> = (0..n).map(|_| rng.gen_range(0.0..PI)).collect();
        let mut value = projector_weight(&vectors, &psi);
        for _sweep in 0..500 {
            for i in 0..n {
                let (mut a, mut b, mut d) = (0.0, 0.0, 0.0);
                for v in &vectors {
                    let c: f64 = (0..n)
                        .filter(|&k| k != i)
                        .map(|k| (v[k] - psi[k]).cos().powi(2))
                        .product();
                    let (s, co) = v[i].sin_cos();
                    a += c * co * co;
                    b += c * co * s;
                    d += c * s * s;
                }
                psi[i] = 0.5 * (2.0 * b).atan2(a - d) + FRAC_PI_2;
            }
            let next = projector_weight(&vectors, &psi);
            let done = value - next < 1e-15;
            value = next;
            if done {
                break;
            }
        }
        out.worst = out.worst.max(value);
        if value < out.best {
            out.best = value;
            out.state = psi;
        }
    }
    Ok(out)
}

#[derive(Clone, Debug, PartialEq)]
pub struct WitnessReport {
    pub epsilon: f64,
    pub value: f64,
    pub closed_form: f64,
    pub min_entry: f64,
    pub nonnegative: bool,
    pub normalized: bool,
    pub no_signalling: bool,
}

/// Setting index → basis index per party, as assigned by the inequality
/// construction.
fn setting_bases(u: &ProductVectorSet) -> Vec<Vec<usize>> {
    u.setting_maps()
        .into_iter()
        .map(|map| {
            let mut inv = vec![0; map.len()];
            for (b, x) in map {
                inv[x] = b;
            }
            inv
        })
        .collect()
}

/// The box p(a|x) = Tr(W ⊗_i P) / Tr(W) for W = (Π_U − ε·1)/(|U| − 2^n),
/// measured in the set's own local bases.
pub fn witness_box(
    u: &ProductVectorSet,
    epsilon: f64,
    real: &BasisRealization,
) -> Result<(CorrelationBox<f64>, WitnessReport), QuantumError> {
    if !(epsilon.is_finite() && epsilon > 0.0) {
        return Err(QuantumError::InvalidEpsilon(epsilon));
    }
    real.check(&used_bases(u))?;
    let ineq = build_inequality(u, None)?;
    let (b, min_entry) = raw_witness_box(u, &ineq.scenario, epsilon, real);
    if min_entry < -SPECTRAL_TOL {
        return Err(QuantumError::EpsilonTooLarge { epsilon, entry: min_entry });
    }
    let value = ineq.evaluate(&b)?;
    let report = WitnessReport {
        epsilon,
        value,
        closed_form: closed_form(u, epsilon),
        min_entry,
        nonnegative: b.is_nonnegative(),
        normalized: b.is_normalized(),
        no_signalling: b.is_no_signalling(),
    };
    Ok((b, report))
}

/// |U|(1 − ε)/(|U| − ε·2^n).
pub fn closed_form(u: &ProductVectorSet, epsilon: f64) -> f64 {
    let s = u.len() as f64;
    let d = (1u64 << u.parties()) as f64;
    s * (1.0 - epsilon) / (s - epsilon * d)
}

fn raw_witness_box(
    u: &ProductVectorSet,
    scenario: &Scenario,
    epsilon: f64,
    real: &BasisRealization,
) -> (CorrelationBox<f64>, f64) {
    let vectors = vector_angles(u, real);
    let bases = setting_bases(u);
    let s = u.len() as f64;
    let d = (1u64 << u.parties()) as f64;
    let mut min_entry = f64::INFINITY;
    let b = CorrelationBox::from_fn(scenario, |a, x| {
        let psi: Vec<f64> = (0..a.len()).map(|i| real.angle(i, bases[i][x[i]], a[i])).collect();
        let p = (projector_weight(&vectors, &psi) - epsilon) / (s - epsilon * d);
        min_entry = min_entry.min(p);
        p
    });
    (b, min_entry)
}

/// Value of the k-fold product inequality on the k-fold product witness
/// box. Evaluated directly up to six parties in total.
pub fn tensor_power_violation(
    u: &ProductVectorSet,
    k: usize,
    epsilon: f64,
    real: &BasisRealization,
) -> Result<f64, QuantumError> {
    let (single, report) = witness_box(u, epsilon, real)?;
    let k = k.max(1);
    if k * u.parties() > 6 {
        return Ok(report.value.powi(k as i32));
    }
    let mut power = u.clone();
    for _ in 1..k {
        power = power.tensor_product(u);
    }
    let ineq = build_inequality(&power, None)?;
    let n = u.parties();
    let b = CorrelationBox::from_fn(&ineq.scenario, |a, x| {
        (0..k)
            .map(|c| *single.get(&a[c * n..(c + 1) * n], &x[c * n..(c + 1) * n]))
            .product()
    });
    Ok(ineq.evaluate(&b)?)
}

/// Tr(W̃ ρ_U) for the trace-normalized witness W̃ = W / Tr(W).
pub fn witness_expectation(u: &ProductVectorSet, epsilon: f64, real: &BasisRealization) -> Result<f64, QuantumError> {
    let state = upb_state(u, real)?;
    let dim = state.rho.nrows();
    let p = projector(u, real)?;
    let w = (p - DMatrix::identity(dim, dim) * epsilon) / (u.len() as f64 - epsilon * dim as f64);
    Ok((w * state.rho).trace())
}

pub fn entanglement_check(u: &ProductVectorSet, epsilon: f64, real: &BasisRealization) -> Result<bool, QuantumError> {
    Ok(witness_expectation(u, epsilon, real)? < -ORTHO_TOL)
}
