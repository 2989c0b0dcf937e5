//! Statevector simulator for the number-preserving gate set.
//!
//! Gates act by direct amplitude updates keyed on the target bits. Local
//! two-qubit matrices are written in the basis `|b_first + 2·b_second⟩`,
//! i.e. the first listed qubit is the low local bit.

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Binomial, Distribution};
use std::collections::BTreeMap;
use std::f64::consts::FRAC_1_SQRT_2;

use crate::error::{Error, Result};
use crate::rng::stream;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);

/// Normalized amplitudes over `2^qubits` computational basis states.
#[derive(Debug, Clone, PartialEq)]
pub struct Statevector {
    qubits: usize,
    amps: Vec<Complex64>,
}

impl Statevector {
    /// Computational basis state `|word⟩`.
    pub fn basis(qubits: usize, word: u64) -> Self {
        assert!(qubits < 31, "statevector too large");
        assert!((word >> qubits) == 0, "word wider than register");
        let mut amps = vec![ZERO; 1 << qubits];
        amps[word as usize] = ONE;
        Statevector { qubits, amps }
    }

    /// Wraps raw amplitudes; the length must be a power of two and the
    /// vector normalized to 1e-10.
    pub fn from_amplitudes(amps: Vec<Complex64>) -> Result<Self> {
        let len = amps.len();
        if len == 0 || !len.is_power_of_two() {
            return Err(Error::range(
                "amplitudes",
                format!("length {} is not a power of two", len),
            ));
        }
        let s = Statevector {
            qubits: len.trailing_zeros() as usize,
            amps,
        };
        let n = s.norm_sqr();
        if (n - 1.0).abs() > 1e-10 {
            return Err(Error::range("amplitudes", format!("squared norm {} is not 1", n)));
        }
        Ok(s)
    }

    pub fn qubits(&self) -> usize {
        self.qubits
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amps
    }

    pub(crate) fn amplitudes_mut(&mut self) -> &mut [Complex64] {
        &mut self.amps
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amps.iter().map(|a| a.norm_sqr()).sum()
    }

    pub fn probabilities(&self) -> Vec<f64> {
        self.amps.iter().map(|a| a.norm_sqr()).collect()
    }

    /// `|⟨self|other⟩|`.
    pub fn overlap(&self, other: &Statevector) -> f64 {
        self.amps
            .iter()
            .zip(&other.amps)
            .map(|(a, b)| a.conj() * b)
            .sum::<Complex64>()
            .norm()
    }

    /// Basis words with probability above `tol`.
    pub fn support(&self, tol: f64) -> Vec<u64> {
        self.amps
            .iter()
            .enumerate()
            .filter(|(_, a)| a.norm_sqr() > tol)
            .map(|(k, _)| k as u64)
            .collect()
    }
}

/// One gate of the ansatz or measurement circuits.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Gate {
    /// Pauli X; used to prepare occupations.
    X { qubit: usize },
    /// `diag(e^{-iθ}, e^{iθ})`.
    Rz { qubit: usize, slot: usize },
    /// `exp(-i θ/2 (XX + YY))`: `cos θ` and `-i sin θ` on the `{01, 10}` block.
    IswapLike { a: usize, b: usize, slot: usize },
    /// `diag(1, 1, e^{-iθ}, e^{iθ})` in the basis `|target + 2·control⟩`.
    Crz { control: usize, target: usize, slot: usize },
    /// Fixed hopping-basis rotation; `phase` is the bond phase `2πφ/L`.
    /// Local basis `|low + 2·high⟩`.
    HopBasis { low: usize, high: usize, phase: f64 },
}

impl Gate {
    pub fn slot(&self) -> Option<usize> {
        match *self {
            Gate::Rz { slot, .. } | Gate::IswapLike { slot, .. } | Gate::Crz { slot, .. } => Some(slot),
            Gate::X { .. } | Gate::HopBasis { .. } => None,
        }
    }

    pub fn qubits(&self) -> Vec<usize> {
        match *self {
            Gate::X { qubit } | Gate::Rz { qubit, .. } => vec![qubit],
            Gate::IswapLike { a, b, .. } => vec![a, b],
            // local basis index is `target + 2·control`
            Gate::Crz { control, target, .. } => vec![target, control],
            Gate::HopBasis { low, high, .. } => vec![low, high],
        }
    }

    /// CNOTs in the standard decomposition (3 per iSWAP-like or basis
    /// rotation, 2 per controlled-Rz).
    pub fn cnot_cost(&self) -> usize {
        match self {
            Gate::X { .. } | Gate::Rz { .. } => 0,
            Gate::IswapLike { .. } | Gate::HopBasis { .. } => 3,
            Gate::Crz { .. } => 2,
        }
    }

    /// Dense unitary in the gate's local basis (dimension 2 or 4).
    pub fn matrix(&self, theta: f64) -> DMatrix<Complex64> {
        match *self {
            Gate::X { .. } => DMatrix::from_row_slice(2, 2, &[ZERO, ONE, ONE, ZERO]),
            Gate::Rz { .. } => DMatrix::from_diagonal(&nalgebra::DVector::from_vec(vec![cis(-theta), cis(theta)])),
            Gate::IswapLike { .. } => {
                let (cth, sth) = (Complex64::new(theta.cos(), 0.0), Complex64::new(0.0, -theta.sin()));
                DMatrix::from_row_slice(
                    4,
                    4,
                    &[
                        ONE, ZERO, ZERO, ZERO, ZERO, cth, sth, ZERO, ZERO, sth, cth, ZERO, ZERO, ZERO, ZERO, ONE,
                    ],
                )
            }
            Gate::Crz { .. } => {
                DMatrix::from_diagonal(&nalgebra::DVector::from_vec(vec![ONE, ONE, cis(-theta), cis(theta)]))
            }
            Gate::HopBasis { phase, .. } => {
                let (m, p) = hop_basis_entries(phase);
                DMatrix::from_row_slice(
                    4,
                    4,
                    &[
                        ONE, ZERO, ZERO, ZERO, ZERO, m, p, ZERO, ZERO, -m, p, ZERO, ZERO, ZERO, ZERO, ONE,
                    ],
                )
            }
        }
    }

    /// Applies the gate in place. `theta` is ignored by fixed gates.
    pub fn apply(&self, state: &mut Statevector, theta: f64) {
        let amps = state.amplitudes_mut();
        match *self {
            Gate::X { qubit } => {
                let b = 1usize << qubit;
                for k in 0..amps.len() {
                    if k & b == 0 {
                        amps.swap(k, k | b);
                    }
                }
            }
            Gate::Rz { qubit, .. } => {
                let b = 1usize << qubit;
                let (lo, hi) = (cis(-theta), cis(theta));
                for (k, a) in amps.iter_mut().enumerate() {
                    *a *= if k & b == 0 { lo } else { hi };
                }
            }
            Gate::IswapLike { a, b, .. } => {
                let (ba, bb) = (1usize << a, 1usize << b);
                let (c, s) = (theta.cos(), Complex64::new(0.0, -theta.sin()));
                for k in 0..amps.len() {
                    // visit each {01, 10} pair once, from the state with only `a` set
                    if k & ba != 0 && k & bb == 0 {
                        let j = k ^ ba ^ bb;
                        let (x, y) = (amps[k], amps[j]);
                        amps[k] = x * c + y * s;
                        amps[j] = x * s + y * c;
                    }
                }
            }
            Gate::Crz { control, target, .. } => {
                let (bc, bt) = (1usize << control, 1usize << target);
                let (lo, hi) = (cis(-theta), cis(theta));
                for (k, a) in amps.iter_mut().enumerate() {
                    if k & bc != 0 {
                        *a *= if k & bt == 0 { lo } else { hi };
                    }
                }
            }
            Gate::HopBasis { low, high, phase } => {
                let (bl, bh) = (1usize << low, 1usize << high);
                let (m, p) = hop_basis_entries(phase);
                for k in 0..amps.len() {
                    if k & bl != 0 && k & bh == 0 {
                        let j = k ^ bl ^ bh;
                        let (x, y) = (amps[k], amps[j]);
                        amps[k] = m * x + p * y;
                        amps[j] = -m * x + p * y;
                    }
                }
            }
        }
    }

    /// `(-i G)|ψ⟩` where the gate is `exp(-i θ G)`; only for trainable gates.
    pub(crate) fn apply_generator(&self, amps: &mut [Complex64]) {
        let mi = Complex64::new(0.0, -1.0);
        match *self {
            Gate::Rz { qubit, .. } => {
                // G = Z
                let b = 1usize << qubit;
                for (k, a) in amps.iter_mut().enumerate() {
                    *a *= if k & b == 0 { mi } else { -mi };
                }
            }
            Gate::IswapLike { a, b, .. } => {
                // G = (XX + YY)/2 swaps |01⟩ and |10⟩, kills |00⟩, |11⟩
                let (ba, bb) = (1usize << a, 1usize << b);
                for k in 0..amps.len() {
                    let (ha, hb) = (k & ba != 0, k & bb != 0);
                    if ha == hb {
                        amps[k] = ZERO;
                    } else if ha {
                        let j = k ^ ba ^ bb;
                        let (x, y) = (amps[k], amps[j]);
                        amps[k] = mi * y;
                        amps[j] = mi * x;
                    }
                }
            }
            Gate::Crz { control, target, .. } => {
                // G = diag(0, 0, 1, -1)
                let (bc, bt) = (1usize << control, 1usize << target);
                for (k, a) in amps.iter_mut().enumerate() {
                    if k & bc == 0 {
                        *a = ZERO;
                    } else {
                        *a *= if k & bt == 0 { mi } else { -mi };
                    }
                }
            }
            Gate::X { .. } | Gate::HopBasis { .. } => unreachable!("fixed gate has no generator"),
        }
    }
}

#[inline]
fn cis(x: f64) -> Complex64 {
    Complex64::new(x.cos(), x.sin())
}

/// `(e^{-iβ/2}/√2, e^{iβ/2}/√2)`: the first row of the `{01, 10}` block.
fn hop_basis_entries(phase: f64) -> (Complex64, Complex64) {
    (cis(-phase / 2.0) * FRAC_1_SQRT_2, cis(phase / 2.0) * FRAC_1_SQRT_2)
}

/// Ordered gate list with dense parameter slots.
#[derive(Debug, Clone, PartialEq)]
pub struct Circuit {
    qubits: usize,
    gates: Vec<Gate>,
    parameters: usize,
}

impl Circuit {
    pub fn new(qubits: usize) -> Self {
        Circuit {
            qubits,
            gates: Vec::new(),
            parameters: 0,
        }
    }

    pub fn qubits(&self) -> usize {
        self.qubits
    }

    pub fn gates(&self) -> &[Gate] {
        &self.gates
    }

    pub fn parameter_count(&self) -> usize {
        self.parameters
    }

    /// Next free slot index.
    pub fn next_slot(&self) -> usize {
        self.parameters
    }

    /// Appends a gate. Trainable gates must use slot `next_slot()` or an existing one.
    pub fn push(&mut self, gate: Gate) {
        let qs = gate.qubits();
        assert!(qs.iter().all(|&q| q < self.qubits), "gate target out of range");
        if qs.len() == 2 {
            assert_ne!(qs[0], qs[1], "two-qubit gate needs distinct targets");
        }
        if let Some(slot) = gate.slot() {
            assert!(slot <= self.parameters, "parameter slots must be dense");
            self.parameters = self.parameters.max(slot + 1);
        }
        self.gates.push(gate);
    }

    fn check_params(&self, params: &[f64]) -> Result<()> {
        if params.len() != self.parameters {
            return Err(Error::LengthMismatch {
                expected: self.parameters,
                got: params.len(),
            });
        }
        Ok(())
    }

    /// Applies every gate to `state` in place.
    pub fn apply(&self, state: &mut Statevector, params: &[f64]) -> Result<()> {
        self.check_params(params)?;
        for g in &self.gates {
            g.apply(state, g.slot().map_or(0.0, |s| params[s]));
        }
        Ok(())
    }

    /// `U(θ) |initial⟩`.
    pub fn run(&self, params: &[f64], initial: u64) -> Result<Statevector> {
        let mut state = Statevector::basis(self.qubits, initial);
        self.apply(&mut state, params)?;
        Ok(state)
    }

    /// Gradient of `⟨ψ(θ)|H|ψ(θ)⟩` by reverse-mode (adjoint) differentiation;
    /// `apply_h` maps amplitudes to `H·amplitudes`. Returns `(energy, gradient)`.
    pub fn energy_gradient<F>(&self, params: &[f64], initial: u64, apply_h: F) -> Result<(f64, Vec<f64>)>
    where
        F: Fn(&[Complex64]) -> Vec<Complex64>,
    {
        let mut psi = self.run(params, initial)?;
        let mut lambda = apply_h(psi.amplitudes());
        let energy: f64 = psi
            .amplitudes()
            .iter()
            .zip(&lambda)
            .map(|(a, b)| (a.conj() * b).re)
            .sum();
        let mut grad = vec![0.0; self.parameters];
        let mut lam_state = Statevector {
            qubits: self.qubits,
            amps: std::mem::take(&mut lambda),
        };
        let mut scratch = vec![ZERO; psi.amps.len()];
        for g in self.gates.iter().rev() {
            let theta = g.slot().map_or(0.0, |s| params[s]);
            if let Some(slot) = g.slot() {
                scratch.copy_from_slice(&psi.amps);
                g.apply_generator(&mut scratch);
                let d: f64 = lam_state
                    .amps
                    .iter()
                    .zip(&scratch)
                    .map(|(l, m)| (l.conj() * m).re)
                    .sum();
                grad[slot] += 2.0 * d;
            }
            let inv = g.inverse(theta);
            inv.0.apply(&mut psi, inv.1);
            inv.0.apply(&mut lam_state, inv.1);
        }
        Ok((energy, grad))
    }
}

impl Gate {
    /// A gate and angle implementing the inverse.
    fn inverse(&self, theta: f64) -> (Gate, f64) {
        match *self {
            Gate::X { .. } => (*self, 0.0),
            Gate::Rz { .. } | Gate::IswapLike { .. } | Gate::Crz { .. } => (*self, -theta),
            Gate::HopBasis { .. } => unimplemented!("measurement rotations are not differentiated"),
        }
    }
}

/// Von Neumann entropy (nats) of the reduced state on `subset`.
///
/// Amplitudes are reshaped into a `2^|A| × 2^|B|` matrix `M` and the
/// spectrum of the smaller Gram matrix (`M M†` or `M† M`) is used.
pub fn reduced_entropy(state: &Statevector, subset: &[usize]) -> Result<f64> {
    let n = state.qubits();
    let mut mask = 0u64;
    for &q in subset {
        if q >= n || mask & (1 << q) != 0 {
            return Err(Error::range("subset", format!("qubit {} repeated or out of range", q)));
        }
        mask |= 1 << q;
    }
    if subset.is_empty() || subset.len() == n {
        return Err(Error::range("subset", "must be a proper nonempty subset"));
    }
    let inside: Vec<usize> = (0..n).filter(|q| mask & (1 << q) != 0).collect();
    let outside: Vec<usize> = (0..n).filter(|q| mask & (1 << q) == 0).collect();
    // rows index the smaller side
    let (rows_q, cols_q) = if inside.len() <= outside.len() {
        (inside, outside)
    } else {
        (outside, inside)
    };
    let nr = 1usize << rows_q.len();
    let nc = 1usize << cols_q.len();
    let mut m = DMatrix::<Complex64>::zeros(nr, nc);
    for (k, a) in state.amplitudes().iter().enumerate() {
        if *a == ZERO {
            continue;
        }
        let r = gather(k, &rows_q);
        let c = gather(k, &cols_q);
        m[(r, c)] = *a;
    }
    let gram = &m * m.adjoint();
    Ok(entropy_of_spectrum(gram.symmetric_eigenvalues().iter().copied()))
}

/// Packs the bits of `k` at `positions` into a dense index.
pub(crate) fn gather(k: usize, positions: &[usize]) -> usize {
    positions
        .iter()
        .enumerate()
        .fold(0, |acc, (j, &q)| acc | (((k >> q) & 1) << j))
}

pub(crate) fn entropy_of_spectrum(ev: impl Iterator<Item = f64>) -> f64 {
    let s: f64 = ev.filter(|&p| p > 1e-14).map(|p| -p * p.ln()).sum();
    // rounding can leave a tiny negative value for pure states
    s.max(0.0) + 0.0
}

/// Multinomial histogram of `shots` draws over the measured qubits.
///
/// Counts are drawn outcome by outcome from conditional binomials, which
/// is distributed identically to `shots` independent Born-rule draws.
/// Deterministic for a fixed seed.
pub fn sample_counts(state: &Statevector, measured: &[usize], shots: u64, seed: u64) -> Result<BTreeMap<u64, u64>> {
    if shots == 0 {
        return Err(Error::range("shots", "must be >= 1"));
    }
    let mut rng = stream(seed, 0);
    let mut marginal: BTreeMap<u64, f64> = BTreeMap::new();
    for (k, a) in state.amplitudes().iter().enumerate() {
        let p = a.norm_sqr();
        if p > 0.0 {
            *marginal.entry(gather(k, measured) as u64).or_insert(0.0) += p;
        }
    }
    Ok(multinomial(&marginal.into_iter().collect::<Vec<_>>(), shots, &mut rng)
        .into_iter()
        .collect())
}

/// Draws multinomial counts over `(outcome, probability)` pairs.
pub(crate) fn multinomial(probs: &[(u64, f64)], shots: u64, rng: &mut ChaCha8Rng) -> Vec<(u64, u64)> {
    let total: f64 = probs.iter().map(|p| p.1).sum();
    let mut left = shots;
    let mut mass = total;
    let mut out = Vec::new();
    for (k, &(word, p)) in probs.iter().enumerate() {
        if left == 0 {
            break;
        }
        let n = if k + 1 == probs.len() || p >= mass {
            left
        } else {
            let q = (p / mass).clamp(0.0, 1.0);
            Binomial::new(left, q).expect("valid binomial").sample(rng)
        };
        if n > 0 {
            out.push((word, n));
        }
        left -= n;
        mass -= p;
    }
    out
}

/// Single Born-rule draw; used where a word rather than a histogram is wanted.
pub fn sample_once(state: &Statevector, rng: &mut impl Rng) -> u64 {
    let r: f64 = rng.random();
    let mut acc = 0.0;
    for (k, a) in state.amplitudes().iter().enumerate() {
        acc += a.norm_sqr();
        if r < acc {
            return k as u64;
        }
    }
    (state.amplitudes().len() - 1) as u64
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn random_state(qubits: usize, seed: u64) -> Statevector {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut amps: Vec<Complex64> = (0..1 << qubits)
            .map(|_| c(rng.random::<f64>() - 0.5, rng.random::<f64>() - 0.5))
            .collect();
        let n: f64 = amps.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
        amps.iter_mut().for_each(|a| *a /= n);
        Statevector::from_amplitudes(amps).unwrap()
    }

    /// Applies a gate by building the full 2^n matrix from its local matrix.
    fn dense_apply(g: &Gate, theta: f64, s: &Statevector) -> Vec<Complex64> {
        let qs = g.qubits();
        let m = g.matrix(theta);
        let dim = s.amplitudes().len();
        let mut out = vec![ZERO; dim];
        for col in 0..dim {
            let lc = gather(col, &qs);
            for lr in 0..m.nrows() {
                let mut row = col;
                for (j, &q) in qs.iter().enumerate() {
                    row = (row & !(1 << q)) | (((lr >> j) & 1) << q);
                }
                out[row] += m[(lr, lc)] * s.amplitudes()[col];
            }
        }
        out
    }

    fn all_gates(theta_phase: f64) -> Vec<Gate> {
        vec![
            Gate::X { qubit: 1 },
            Gate::Rz { qubit: 2, slot: 0 },
            Gate::IswapLike { a: 0, b: 2, slot: 0 },
            Gate::IswapLike { a: 2, b: 1, slot: 0 },
            Gate::Crz {
                control: 1,
                target: 0,
                slot: 0,
            },
            Gate::Crz {
                control: 0,
                target: 2,
                slot: 0,
            },
            Gate::HopBasis {
                low: 2,
                high: 0,
                phase: theta_phase,
            },
        ]
    }

    #[test]
    fn fast_paths_match_dense_matrices() {
        let s = random_state(3, 7);
        for g in all_gates(0.9) {
            for &theta in &[0.0, 0.3, -1.7, 2.9] {
                let mut fast = s.clone();
                g.apply(&mut fast, theta);
                let want = dense_apply(&g, theta, &s);
                for (a, b) in fast.amplitudes().iter().zip(&want) {
                    assert!((a - b).norm() < 1e-14, "{:?}", g);
                }
                assert!((fast.norm_sqr() - 1.0).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn iswap_examples() {
        let g = Gate::IswapLike { a: 0, b: 1, slot: 0 };
        let s = random_state(2, 1);
        let mut t = s.clone();
        g.apply(&mut t, 0.0);
        assert_eq!(s, t);
        // |01⟩ (qubit 0 set) -> -i|10⟩
        let mut t = Statevector::basis(2, 0b01);
        g.apply(&mut t, std::f64::consts::FRAC_PI_2);
        assert!((t.amplitudes()[0b10] - c(0.0, -1.0)).norm() < 1e-15);
        assert!(t.amplitudes()[0b01].norm() < 1e-15);
    }

    #[test]
    fn crz_examples() {
        let g = Gate::Crz {
            control: 1,
            target: 0,
            slot: 0,
        };
        let th = 0.77;
        let mut t = Statevector::basis(2, 0b11);
        g.apply(&mut t, th);
        assert!((t.amplitudes()[3] - cis(th)).norm() < 1e-15);
        for w in [0b00, 0b01] {
            let mut t = Statevector::basis(2, w);
            g.apply(&mut t, th);
            assert!((t.amplitudes()[w as usize] - ONE).norm() < 1e-15);
        }
        let mut t = Statevector::basis(2, 0b10);
        g.apply(&mut t, th);
        assert!((t.amplitudes()[2] - cis(-th)).norm() < 1e-15);
    }

    #[test]
    fn hop_basis_unitary_and_diagonalizes_pair_hop() {
        for &phase in &[0.0, 0.4, 1.3, -2.2, 3.0] {
            let u = Gate::HopBasis { low: 0, high: 1, phase }.matrix(0.0);
            let id = DMatrix::<Complex64>::identity(4, 4);
            assert!((u.adjoint() * &u - id).norm() < 1e-12);
            // e^{iβ} σ+_low σ-_high + h.c.: maps |high⟩ (index 2) to |low⟩ (index 1)
            let mut hop = DMatrix::<Complex64>::zeros(4, 4);
            hop[(1, 2)] = cis(phase);
            hop[(2, 1)] = cis(-phase);
            let d = &u * hop * u.adjoint();
            let mut want = DMatrix::<Complex64>::zeros(4, 4);
            want[(1, 1)] = ONE;
            want[(2, 2)] = -ONE;
            assert!((d - want).norm() < 1e-12, "phase {}", phase);
        }
        let u0 = Gate::HopBasis {
            low: 0,
            high: 1,
            phase: 0.0,
        }
        .matrix(0.0);
        assert!(u0.iter().all(|z| z.im == 0.0));
    }

    #[test]
    fn gates_preserve_number_sectors() {
        for g in all_gates(0.3).into_iter().filter(|g| !matches!(g, Gate::X { .. })) {
            let m = g.matrix(0.81);
            let dim = m.nrows();
            for r in 0..dim {
                for col in 0..dim {
                    if (r as u32).count_ones() != (col as u32).count_ones() {
                        assert!(m[(r, col)].norm() < 1e-15, "{:?}", g);
                    }
                }
            }
        }
    }

    #[test]
    fn iswap_is_one_parameter_group() {
        let g = Gate::IswapLike { a: 1, b: 0, slot: 0 };
        let (t1, t2) = (0.4, -1.9);
        let prod = g.matrix(t1) * g.matrix(t2);
        assert!((prod - g.matrix(t1 + t2)).norm() < 1e-13);
    }

    #[test]
    fn norm_after_many_random_gates() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let mut s = random_state(5, 9);
        for _ in 0..100 {
            let a = rng.random_range(0..5);
            let b = (a + rng.random_range(1..5)) % 5;
            let th: f64 = rng.random_range(-3.0..3.0);
            let g = match rng.random_range(0..4) {
                0 => Gate::Rz { qubit: a, slot: 0 },
                1 => Gate::IswapLike { a, b, slot: 0 },
                2 => Gate::Crz {
                    control: a,
                    target: b,
                    slot: 0,
                },
                _ => Gate::HopBasis {
                    low: a,
                    high: b,
                    phase: th,
                },
            };
            g.apply(&mut s, th);
            assert!((s.norm_sqr() - 1.0).abs() < 1e-10);
        }
        assert!((s.norm_sqr() - 1.0).abs() < 1e-8);
    }

    #[test]
    fn run_checks_lengths_and_prepares_words() {
        let circ = Circuit::new(3);
        let s = circ.run(&[], 0b101).unwrap();
        assert_eq!(s, Statevector::basis(3, 0b101));
        let mut circ = Circuit::new(2);
        circ.push(Gate::Rz { qubit: 0, slot: 0 });
        assert!(matches!(circ.run(&[], 0), Err(Error::LengthMismatch { .. })));
    }

    #[test]
    fn entropy_examples() {
        assert!(reduced_entropy(&Statevector::basis(4, 0b0110), &[0, 1]).unwrap().abs() < 1e-14);
        let h = FRAC_1_SQRT_2;
        let mut amps = vec![ZERO; 16];
        amps[0b0011] = c(h, 0.0);
        amps[0b1100] = c(h, 0.0);
        let s = Statevector::from_amplitudes(amps).unwrap();
        assert!((reduced_entropy(&s, &[0, 1]).unwrap() - 2f64.ln()).abs() < 1e-12);
        assert!(reduced_entropy(&s, &[]).is_err());
        assert!(reduced_entropy(&s, &[0, 1, 2, 3]).is_err());
    }

    #[test]
    fn entropy_symmetric_under_complement() {
        let s = random_state(6, 11);
        for subset in [vec![0], vec![1, 4], vec![0, 2, 5], vec![0, 1, 2, 3, 4]] {
            let comp: Vec<usize> = (0..6).filter(|q| !subset.contains(q)).collect();
            let a = reduced_entropy(&s, &subset).unwrap();
            let b = reduced_entropy(&s, &comp).unwrap();
            assert!((a - b).abs() < 1e-9);
        }
    }

    #[test]
    fn sampling_examples() {
        let s = Statevector::basis(3, 0b110);
        let h = sample_counts(&s, &[0, 1, 2], 1000, 5).unwrap();
        assert_eq!(h.into_iter().collect::<Vec<_>>(), vec![(0b110, 1000)]);
        let plus = Statevector::from_amplitudes(vec![c(FRAC_1_SQRT_2, 0.0), c(FRAC_1_SQRT_2, 0.0)]).unwrap();
        let shots = 32768;
        let h = sample_counts(&plus, &[0], shots, 42).unwrap();
        let p1 = *h.get(&1).unwrap_or(&0) as f64 / shots as f64;
        assert!((p1 - 0.5).abs() < 3.0 * 0.5 / (shots as f64).sqrt());
        assert_eq!(h, sample_counts(&plus, &[0], shots, 42).unwrap());
        assert!(sample_counts(&plus, &[0], 0, 1).is_err());
    }

    #[test]
    fn adjoint_gradient_matches_finite_differences() {
        use crate::pauli::{PauliHamiltonian, PauliString};
        let mut circ = Circuit::new(3);
        circ.push(Gate::X { qubit: 0 });
        circ.push(Gate::Rz { qubit: 0, slot: 0 });
        circ.push(Gate::IswapLike { a: 0, b: 1, slot: 1 });
        circ.push(Gate::Crz {
            control: 1,
            target: 2,
            slot: 2,
        });
        circ.push(Gate::IswapLike { a: 1, b: 2, slot: 3 });
        circ.push(Gate::Crz {
            control: 0,
            target: 1,
            slot: 4,
        });
        circ.push(Gate::Rz { qubit: 1, slot: 1 });
        let h = PauliHamiltonian::from_terms(
            3,
            vec![
                (c(0.7, 0.0), PauliString::parse("XXI").unwrap()),
                (c(-0.3, 0.0), PauliString::parse("IYY").unwrap()),
                (c(0.2, 0.0), PauliString::parse("XYZ").unwrap()),
                (c(1.1, 0.0), PauliString::parse("ZIZ").unwrap()),
            ],
        );
        let params = [0.3, -0.8, 1.4, 0.6, -2.0];
        let (e, g) = circ.energy_gradient(&params, 0b100, |a| h.apply(a)).unwrap();
        let f = |p: &[f64]| h.expectation(&circ.run(p, 0b100).unwrap()).unwrap();
        assert!((e - f(&params)).abs() < 1e-12);
        for k in 0..params.len() {
            let mut p = params;
            p[k] += 1e-6;
            let up = f(&p);
            p[k] -= 2e-6;
            let dn = f(&p);
            assert!((g[k] - (up - dn) / 2e-6).abs() < 1e-7, "slot {}", k);
        }
    }
}
