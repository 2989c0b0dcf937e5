//! Exact diagonalization in a fixed per-color particle-number sector,
//! built directly from fermionic operators.
//!
//! Modes are ordered `n = i + s·L` and an occupation word stores mode `n`
//! in bit `n`. Reordering signs follow that ordering, so sector vectors here
//! are componentwise comparable with qubit statevectors.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use rand::Rng;
use std::collections::{BTreeMap, HashMap};
use std::f64::consts::PI;

use crate::circuit::{entropy_of_spectrum, gather, Statevector};
use crate::error::{Error, Result};
use crate::lattice::{validate, HubbardModel, SpinSector};
use crate::rng::stream;
pub use crate::sparse::SparseHermitian;

/// Widest occupation word supported.
pub const MAX_MODES: usize = 62;
/// Sectors up to this dimension are diagonalized densely.
pub const DENSE_LIMIT: usize = 512;
/// Ground-state gaps below this are treated as degenerate.
pub const DEGENERACY_GAP: f64 = 1e-8;
/// Flux offset used for one-sided limits at level crossings.
pub const CROSSING_OFFSET: f64 = 1e-6;

/// All occupation words of a sector, ascending.
#[derive(Debug, Clone)]
pub struct SectorBasis {
    sites: usize,
    counts: Vec<usize>,
    words: Vec<u64>,
    index: HashMap<u64, usize>,
}

impl SectorBasis {
    pub fn sites(&self) -> usize {
        self.sites
    }

    pub fn colors(&self) -> usize {
        self.counts.len()
    }

    pub fn modes(&self) -> usize {
        self.sites * self.counts.len()
    }

    pub fn counts(&self) -> &[usize] {
        &self.counts
    }

    pub fn words(&self) -> &[u64] {
        &self.words
    }

    pub fn len(&self) -> usize {
        self.words.len()
    }

    pub fn is_empty(&self) -> bool {
        self.words.is_empty()
    }

    pub fn position(&self, word: u64) -> Option<usize> {
        self.index.get(&word).copied()
    }

    /// Embeds a sector vector into the full `2^(N·L)` register.
    pub fn embed(&self, vector: &[Complex64]) -> Result<Statevector> {
        if vector.len() != self.len() {
            return Err(Error::LengthMismatch {
                expected: self.len(),
                got: vector.len(),
            });
        }
        let mut amps = vec![Complex64::new(0.0, 0.0); 1usize << self.modes()];
        for (w, a) in self.words.iter().zip(vector) {
            amps[*w as usize] = *a;
        }
        Statevector::from_amplitudes(amps)
    }

    /// Sector components of a full-register state.
    pub fn project(&self, state: &Statevector) -> Vec<Complex64> {
        self.words.iter().map(|&w| state.amplitudes()[w as usize]).collect()
    }
}

/// Binomial coefficient as `u128`.
pub fn binomial(n: usize, k: usize) -> u128 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    (0..k).fold(1u128, |acc, j| acc * (n - j) as u128 / (j + 1) as u128)
}

/// Enumerates `Π_s C(L, N_s)` words, sorted ascending.
pub fn enumerate_sector_basis(sites: usize, sector: &SpinSector) -> Result<SectorBasis> {
    let colors = sector.counts.len();
    if sites * colors > MAX_MODES {
        return Err(Error::range(
            "modes",
            format!(
                "N·L = {} exceeds the supported word width {}",
                sites * colors,
                MAX_MODES
            ),
        ));
    }
    for (s, &n) in sector.counts.iter().enumerate() {
        if n > sites {
            return Err(Error::range(format!("counts[{}]", s), format!("{} > L = {}", n, sites)));
        }
    }
    let per_color: Vec<Vec<u64>> = sector
        .counts
        .iter()
        .map(|&n| (0..1u64 << sites).filter(|w| w.count_ones() as usize == n).collect())
        .collect();
    let mut words = vec![0u64];
    for (s, options) in per_color.iter().enumerate() {
        let mut next = Vec::with_capacity(words.len() * options.len());
        for &w in &words {
            for &o in options {
                next.push(w | (o << (s * sites)));
            }
        }
        words = next;
    }
    words.sort_unstable();
    let index = words.iter().enumerate().map(|(k, &w)| (w, k)).collect();
    Ok(SectorBasis {
        sites,
        counts: sector.counts.clone(),
        words,
        index,
    })
}

/// `c†_to c_from |word⟩` as `(new word, sign)`, or `None` if it vanishes.
pub fn hop(word: u64, to: usize, from: usize) -> Option<(u64, f64)> {
    let (bt, bf) = (1u64 << to, 1u64 << from);
    if word & bf == 0 {
        return None;
    }
    if to == from {
        return Some((word, 1.0));
    }
    if word & bt != 0 {
        return None;
    }
    let (lo, hi) = if to < from { (to, from) } else { (from, to) };
    let between = word & ((1u64 << hi) - 1) & !((1u64 << (lo + 1)) - 1);
    let sign = if between.count_ones() % 2 == 0 { 1.0 } else { -1.0 };
    Some((word ^ bf ^ bt, sign))
}

/// Each directed hop `c†_{i,s} c_{i+r,s}` with its coefficient: the
/// `(to, from, coeff)` triples whose sum plus Hermitian conjugate is
/// `Σ coeff_k c†c`. `coeff` is produced by `weight(range, phase)`.
fn directed_hops(model: &HubbardModel, weight: impl Fn(usize, f64) -> Complex64) -> Vec<(usize, usize, Complex64)> {
    let l = model.sites;
    let mut out = Vec::new();
    for s in 0..model.colors {
        for i in 0..l {
            for (k, &t) in model.hopping.iter().enumerate() {
                let r = k + 1;
                let j = (i + r) % l;
                let c = weight(r, t);
                out.push((i + s * l, j + s * l, c));
                out.push((j + s * l, i + s * l, c.conj()));
            }
        }
    }
    out
}

fn hop_phase_angle(model: &HubbardModel, range: usize) -> f64 {
    2.0 * PI * model.flux * range as f64 / model.sites as f64
}

/// Diagonal interaction energy of one occupation word.
pub fn interaction_energy(model: &HubbardModel, word: u64) -> f64 {
    let l = model.sites;
    let occ = |i: usize, s: usize| ((word >> (i + s * l)) & 1) as f64;
    let density: Vec<f64> = (0..l).map(|i| (0..model.colors).map(|s| occ(i, s)).sum()).collect();
    let mut e = 0.0;
    for i in 0..l {
        let d = density[i];
        // Σ_{s<s'} n n = d(d-1)/2 for 0/1 occupations
        e += model.onsite * d * (d - 1.0) / 2.0;
        for (k, &v) in model.density.iter().enumerate() {
            e += v * d * density[(i + k + 1) % l];
        }
    }
    e
}

fn assemble(basis: &SectorBasis, hops: &[(usize, usize, Complex64)], diag: impl Fn(u64) -> f64) -> SparseHermitian {
    let mut triplets = Vec::new();
    for (col, &w) in basis.words().iter().enumerate() {
        let d = diag(w);
        if d != 0.0 {
            triplets.push((col, col, Complex64::new(d, 0.0)));
        }
        for &(to, from, c) in hops {
            if let Some((w2, sign)) = hop(w, to, from) {
                let row = basis.position(w2).expect("hops conserve per-color number");
                triplets.push((row, col, c * sign));
            }
        }
    }
    SparseHermitian::from_triplets(basis.len(), triplets)
}

/// Sector Hamiltonian with explicit fermionic signs.
pub fn build_fermionic_hamiltonian(model: &HubbardModel, basis: &SectorBasis) -> SparseHermitian {
    let hops = directed_hops(model, |r, t| -t * Complex64::from_polar(1.0, hop_phase_angle(model, r)));
    assemble(basis, &hops, |w| interaction_energy(model, w))
}

/// Current operator `I = -∂H/∂φ`; for nearest-neighbor hopping this is
/// `(2π i t/L) Σ (e^{i2πφ/L} c†_{i,s} c_{i+1,s} - h.c.)`.
pub fn build_current_operator(model: &HubbardModel, basis: &SectorBasis) -> SparseHermitian {
    let l = model.sites as f64;
    let hops = directed_hops(model, |r, t| {
        Complex64::new(0.0, 2.0 * PI * r as f64 * t / l) * Complex64::from_polar(1.0, hop_phase_angle(model, r))
    });
    assemble(basis, &hops, |_| 0.0)
}

/// Lowest eigenpair of a sector Hamiltonian.
#[derive(Debug, Clone)]
pub struct GroundState {
    pub energy: f64,
    pub vector: Vec<Complex64>,
    /// Gap to the next eigenvalue (infinite for 1×1).
    pub gap: f64,
    pub degenerate: bool,
}

/// Dense eigensolve up to [`DENSE_LIMIT`], Lanczos beyond.
pub fn ground_state(h: &SparseHermitian) -> Result<GroundState> {
    if h.dim() == 0 {
        return Err(Error::range("dimension", "empty matrix"));
    }
    if h.dim() <= DENSE_LIMIT {
        Ok(dense_ground_state(&h.to_dense()))
    } else {
        lanczos_ground_state(h, 160, 60, 1e-11)
    }
}

pub fn dense_ground_state(m: &DMatrix<Complex64>) -> GroundState {
    let eig = m.clone().symmetric_eigen();
    let mut order: Vec<usize> = (0..eig.eigenvalues.len()).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].partial_cmp(&eig.eigenvalues[b]).unwrap());
    let k = order[0];
    let energy = eig.eigenvalues[k];
    let gap = order.get(1).map_or(f64::INFINITY, |&j| eig.eigenvalues[j] - energy);
    let vector = canonical_phase(eig.eigenvectors.column(k).iter().copied().collect());
    GroundState {
        energy,
        vector,
        gap,
        degenerate: gap < DEGENERACY_GAP * energy.abs().max(1.0),
    }
}

/// Rotates a vector so its largest component is real positive.
fn canonical_phase(mut v: Vec<Complex64>) -> Vec<Complex64> {
    let big = v
        .iter()
        .copied()
        .max_by(|a, b| a.norm_sqr().partial_cmp(&b.norm_sqr()).unwrap())
        .unwrap_or_default();
    if big.norm() > 0.0 {
        let ph = big.conj() / big.norm();
        v.iter_mut().for_each(|a| *a *= ph);
    }
    v
}

fn dot(a: &[Complex64], b: &[Complex64]) -> Complex64 {
    a.iter().zip(b).map(|(x, y)| x.conj() * y).sum()
}

fn norm(a: &[Complex64]) -> f64 {
    a.iter().map(|x| x.norm_sqr()).sum::<f64>().sqrt()
}

/// Restarted Lanczos with full reorthogonalization.
pub fn lanczos_ground_state(h: &SparseHermitian, krylov: usize, restarts: usize, tol: f64) -> Result<GroundState> {
    let dim = h.dim();
    let m = krylov.min(dim);
    let mut rng = stream(0x5eed, 0);
    let mut start: Vec<Complex64> = (0..dim)
        .map(|_| Complex64::new(rng.random::<f64>() - 0.5, rng.random::<f64>() - 0.5))
        .collect();
    let mut residual = f64::INFINITY;
    for _ in 0..restarts {
        let n0 = norm(&start);
        start.iter_mut().for_each(|x| *x /= n0);
        let mut basis: Vec<Vec<Complex64>> = vec![start.clone()];
        let mut alpha = Vec::new();
        let mut beta: Vec<f64> = Vec::new();
        for j in 0..m {
            let mut w = h.matvec(&basis[j]);
            let a = dot(&basis[j], &w).re;
            alpha.push(a);
            // full reorthogonalization, twice
            for _ in 0..2 {
                for q in &basis {
                    let c = dot(q, &w);
                    w.iter_mut().zip(q).for_each(|(x, y)| *x -= c * y);
                }
            }
            let b = norm(&w);
            if j + 1 == m || b < 1e-13 {
                break;
            }
            beta.push(b);
            w.iter_mut().for_each(|x| *x /= b);
            basis.push(w);
        }
        let k = alpha.len();
        let mut t = DMatrix::<f64>::zeros(k, k);
        for i in 0..k {
            t[(i, i)] = alpha[i];
            if i + 1 < k {
                t[(i, i + 1)] = beta[i];
                t[(i + 1, i)] = beta[i];
            }
        }
        let eig = t.symmetric_eigen();
        let mut order: Vec<usize> = (0..k).collect();
        order.sort_by(|&a, &b| eig.eigenvalues[a].partial_cmp(&eig.eigenvalues[b]).unwrap());
        let lowest = order[0];
        let energy = eig.eigenvalues[lowest];
        let coeffs: DVector<f64> = eig.eigenvectors.column(lowest).into_owned();
        let mut v = vec![Complex64::new(0.0, 0.0); dim];
        for (q, &c) in basis.iter().zip(coeffs.iter()) {
            v.iter_mut().zip(q).for_each(|(x, y)| *x += y * c);
        }
        let nv = norm(&v);
        v.iter_mut().for_each(|x| *x /= nv);
        let hv = h.matvec(&v);
        residual = norm(&hv.iter().zip(&v).map(|(a, b)| a - b * energy).collect::<Vec<_>>());
        if residual < tol * energy.abs().max(1.0) {
            let gap = order.get(1).map_or(f64::INFINITY, |&j| eig.eigenvalues[j] - energy);
            return Ok(GroundState {
                energy,
                vector: canonical_phase(v),
                gap,
                degenerate: gap < DEGENERACY_GAP * energy.abs().max(1.0),
            });
        }
        start = v;
    }
    Err(Error::NoConvergence { residual })
}

/// `⟨v|A|v⟩` for a sector vector.
pub fn sector_expectation(a: &SparseHermitian, v: &[Complex64]) -> Complex64 {
    dot(v, &a.matvec(v))
}

/// Persistent current of the sector ground state.
#[derive(Debug, Clone, Copy)]
pub struct CurrentEstimate {
    pub current: f64,
    /// Set when the ground state is degenerate; `current` is then the mean
    /// of the one-sided limits at `φ ± CROSSING_OFFSET`.
    pub at_crossing: bool,
}

fn current_of_nondegenerate(model: &HubbardModel, basis: &SectorBasis) -> Result<(f64, bool)> {
    let gs = ground_state(&build_fermionic_hamiltonian(model, basis))?;
    let i = sector_expectation(&build_current_operator(model, basis), &gs.vector);
    Ok((i.re, gs.degenerate))
}

/// Ground-state expectation of the current operator.
pub fn persistent_current_ed(model: &HubbardModel, sector: &SpinSector) -> Result<CurrentEstimate> {
    let (model, sector) = validate(model.clone(), sector.clone())?;
    let basis = enumerate_sector_basis(model.sites, &sector)?;
    let (current, degenerate) = current_of_nondegenerate(&model, &basis)?;
    if !degenerate {
        return Ok(CurrentEstimate {
            current,
            at_crossing: false,
        });
    }
    let (left, _) = current_of_nondegenerate(&model.with_flux(model.flux - CROSSING_OFFSET), &basis)?;
    let (right, _) = current_of_nondegenerate(&model.with_flux(model.flux + CROSSING_OFFSET), &basis)?;
    Ok(CurrentEstimate {
        current: 0.5 * (left + right),
        at_crossing: true,
    })
}

/// Von Neumann entropy (nats) of a sector vector reduced to the mode subset,
/// computed from the explicit reduced density matrix.
pub fn entanglement_entropy_ed(vector: &[Complex64], basis: &SectorBasis, subset: &[usize]) -> Result<f64> {
    let modes = basis.modes();
    let mut mask = 0u64;
    for &q in subset {
        if q >= modes || mask & (1 << q) != 0 {
            return Err(Error::range("subset", format!("mode {} repeated or out of range", q)));
        }
        mask |= 1 << q;
    }
    if subset.is_empty() || subset.len() == modes {
        return Err(Error::range("subset", "must be a proper nonempty subset"));
    }
    if vector.len() != basis.len() {
        return Err(Error::LengthMismatch {
            expected: basis.len(),
            got: vector.len(),
        });
    }
    let inside: Vec<usize> = (0..modes).filter(|q| mask & (1 << q) != 0).collect();
    // group components by the complement configuration
    let mut blocks: BTreeMap<u64, Vec<(usize, Complex64)>> = BTreeMap::new();
    for (&w, &a) in basis.words().iter().zip(vector) {
        blocks
            .entry(w & !mask)
            .or_default()
            .push((gather(w as usize, &inside), a));
    }
    let da = 1usize << inside.len();
    let mut rho = DMatrix::<Complex64>::zeros(da, da);
    for comps in blocks.values() {
        for &(r, x) in comps {
            for &(c, y) in comps {
                rho[(r, c)] += x * y.conj();
            }
        }
    }
    Ok(entropy_of_spectrum(rho.symmetric_eigenvalues().iter().copied()))
}

/// Everything the oracle reports at one flux value.
#[derive(Debug, Clone)]
pub struct EdPoint {
    pub flux: f64,
    pub energy: f64,
    pub current: f64,
    pub entropy: f64,
    pub gap: f64,
    pub at_crossing: bool,
    pub vector: Vec<Complex64>,
}

/// Solves the sector at the model's flux; entropy over `cut` modes.
///
/// At a degenerate point the ground vector is not unique; `entropy` is then
/// the mean of the one-sided limits at `φ ± CROSSING_OFFSET`, like the current.
pub fn solve_point(model: &HubbardModel, sector: &SpinSector, cut: &[usize]) -> Result<EdPoint> {
    let (model, sector) = validate(model.clone(), sector.clone())?;
    let basis = enumerate_sector_basis(model.sites, &sector)?;
    let gs = ground_state(&build_fermionic_hamiltonian(&model, &basis))?;
    let current = persistent_current_ed(&model, &sector)?;
    let entropy = if gs.degenerate {
        let side = |d: f64| -> Result<f64> {
            let g = ground_state(&build_fermionic_hamiltonian(&model.with_flux(model.flux + d), &basis))?;
            entanglement_entropy_ed(&g.vector, &basis, cut)
        };
        0.5 * (side(-CROSSING_OFFSET)? + side(CROSSING_OFFSET)?)
    } else {
        entanglement_entropy_ed(&gs.vector, &basis, cut)?
    };
    Ok(EdPoint {
        flux: model.flux,
        energy: gs.energy,
        current: current.current,
        entropy,
        gap: gs.gap,
        at_crossing: current.at_crossing,
        vector: gs.vector,
    })
}

/// Default bipartition: the first `⌊N·L/2⌋` modes.
pub fn half_chain(modes: usize) -> Vec<usize> {
    (0..modes / 2).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sparse::hermitian_eigenvalues;

    fn su3(u: f64, v: f64, flux: f64) -> HubbardModel {
        HubbardModel::nearest_neighbor(3, 3, 1.0, u, v, flux)
    }

    #[test]
    fn basis_sizes() {
        let b = enumerate_sector_basis(3, &SpinSector::uniform(3, 1)).unwrap();
        assert_eq!(b.len(), 27);
        assert!(b.words().windows(2).all(|w| w[0] < w[1]));
        assert_eq!(
            enumerate_sector_basis(5, &SpinSector::uniform(3, 1)).unwrap().len(),
            125
        );
        let vac = enumerate_sector_basis(4, &SpinSector::uniform(3, 0)).unwrap();
        assert_eq!(vac.words(), &[0]);
        let b = enumerate_sector_basis(4, &SpinSector::new(vec![2, 1, 3])).unwrap();
        assert_eq!(b.len() as u128, binomial(4, 2) * binomial(4, 1) * binomial(4, 3));
        for &w in b.words() {
            for (s, &n) in b.counts().iter().enumerate() {
                assert_eq!(((w >> (4 * s)) & 0xf).count_ones() as usize, n);
            }
        }
        assert!(enumerate_sector_basis(16, &SpinSector::uniform(4, 1)).is_err());
    }

    #[test]
    fn hop_signs() {
        // c†_2 c_0 on |0,1,2 occupied... bits 0 and 1 set: crosses mode 1
        assert_eq!(hop(0b011, 2, 0), Some((0b110, -1.0)));
        assert_eq!(hop(0b001, 2, 0), Some((0b100, 1.0)));
        assert_eq!(hop(0b001, 0, 2), None);
        assert_eq!(hop(0b101, 2, 0), None);
    }

    #[test]
    fn free_fermions_ground_energy() {
        let m = su3(0.0, 0.0, 0.0);
        let b = enumerate_sector_basis(3, &SpinSector::uniform(3, 1)).unwrap();
        let gs = ground_state(&build_fermionic_hamiltonian(&m, &b)).unwrap();
        assert!((gs.energy + 6.0).abs() < 1e-12);
    }

    #[test]
    fn atomic_limit_is_diagonal() {
        let m = HubbardModel::nearest_neighbor(3, 3, 0.0, 2.0, 0.0, 0.3);
        let b = enumerate_sector_basis(3, &SpinSector::uniform(3, 1)).unwrap();
        let h = build_fermionic_hamiltonian(&m, &b);
        assert!(h.entries().iter().all(|e| e.0 == e.1));
        let gs = ground_state(&h).unwrap();
        assert!(gs.energy.abs() < 1e-14);
        let m = HubbardModel::nearest_neighbor(2, 3, 0.0, 2.0, 0.0, 0.0);
        let b = enumerate_sector_basis(2, &SpinSector::uniform(3, 1)).unwrap();
        // three particles on two sites: one pair must share a site
        assert!((ground_state(&build_fermionic_hamiltonian(&m, &b)).unwrap().energy - 2.0).abs() < 1e-14);
    }

    #[test]
    fn hermitian_for_random_models() {
        for (k, &(l, n)) in [(3, 3), (4, 2), (5, 2), (4, 3)].iter().enumerate() {
            let m = HubbardModel {
                sites: l,
                colors: n,
                hopping: vec![1.0, 0.3][..(l / 2).min(2)].to_vec(),
                onsite: 1.7,
                density: vec![0.4],
                flux: 0.17 * (k + 1) as f64,
            };
            let b = enumerate_sector_basis(l, &SpinSector::uniform(n, 1)).unwrap();
            assert!(build_fermionic_hamiltonian(&m, &b).hermiticity_error() < 1e-12);
            assert!(build_current_operator(&m, &b).hermiticity_error() < 1e-12);
        }
    }

    #[test]
    fn trivial_ground_states() {
        let one = SparseHermitian::from_triplets(1, vec![(0, 0, Complex64::new(-2.5, 0.0))]);
        let gs = ground_state(&one).unwrap();
        assert_eq!(gs.energy, -2.5);
        assert_eq!(gs.vector.len(), 1);
        assert!((gs.vector[0].norm() - 1.0).abs() < 1e-15);
        let diag = SparseHermitian::from_triplets(
            3,
            vec![
                (0, 0, Complex64::new(3.0, 0.0)),
                (1, 1, Complex64::new(-1.0, 0.0)),
                (2, 2, Complex64::new(0.5, 0.0)),
            ],
        );
        assert_eq!(ground_state(&diag).unwrap().energy, -1.0);
    }

    #[test]
    fn lanczos_agrees_with_dense() {
        // SU(2), L=6, two per color: 225 states
        let m = HubbardModel {
            sites: 6,
            colors: 2,
            hopping: vec![1.0, 0.2],
            onsite: 3.0,
            density: vec![0.5],
            flux: 0.3,
        };
        let b = enumerate_sector_basis(6, &SpinSector::uniform(2, 2)).unwrap();
        let h = build_fermionic_hamiltonian(&m, &b);
        let dense = dense_ground_state(&h.to_dense());
        let lz = lanczos_ground_state(&h, 80, 40, 1e-11).unwrap();
        assert!((dense.energy - lz.energy).abs() < 1e-9);
        let ov = dot(&dense.vector, &lz.vector).norm();
        assert!((ov - 1.0).abs() < 1e-8);
    }

    #[test]
    fn su3_matches_full_dense_spectrum() {
        let m = su3(5.0, 0.0, 0.0);
        let b = enumerate_sector_basis(3, &SpinSector::uniform(3, 1)).unwrap();
        let h = build_fermionic_hamiltonian(&m, &b);
        let ev = hermitian_eigenvalues(&h.to_dense());
        let gs = ground_state(&h).unwrap();
        assert!((gs.energy - ev[0]).abs() < 1e-10);
    }

    #[test]
    fn current_vanishes_at_zero_flux_and_is_odd() {
        let sector = SpinSector::uniform(3, 1);
        for (u, v) in [(0.5, 0.0), (5.0, 0.0), (1.0, 0.5)] {
            let i0 = persistent_current_ed(&su3(u, v, 0.0), &sector).unwrap();
            assert!(i0.current.abs() < 1e-12);
            for &phi in &[0.1, 0.27, 0.4] {
                let a = persistent_current_ed(&su3(u, v, phi), &sector).unwrap().current;
                let b = persistent_current_ed(&su3(u, v, -phi), &sector).unwrap().current;
                assert!((a + b).abs() < 1e-9, "U={} φ={}", u, phi);
            }
        }
    }

    #[test]
    fn current_is_minus_energy_slope() {
        let sector = SpinSector::uniform(3, 1);
        let b = enumerate_sector_basis(3, &sector).unwrap();
        let e = |m: &HubbardModel| ground_state(&build_fermionic_hamiltonian(m, &b)).unwrap().energy;
        for (u, v) in [(5.0, 0.0), (1.0, 0.5)] {
            for &phi in &[0.05, 0.2, 0.33] {
                let m = su3(u, v, phi);
                let h = 1e-4;
                let slope = (e(&m.with_flux(phi + h)) - e(&m.with_flux(phi - h))) / (2.0 * h);
                let i = persistent_current_ed(&m, &sector).unwrap();
                assert!(!i.at_crossing);
                assert!(
                    (i.current + slope).abs() < 1e-5,
                    "U={} φ={}: {} vs {}",
                    u,
                    phi,
                    i.current,
                    -slope
                );
            }
        }
    }

    #[test]
    fn entropy_examples() {
        // product ground state of the atomic limit
        let m = HubbardModel::nearest_neighbor(2, 1, 0.0, 0.0, 1.0, 0.0);
        let b = enumerate_sector_basis(2, &SpinSector::uniform(1, 2)).unwrap();
        let gs = ground_state(&build_fermionic_hamiltonian(&m, &b)).unwrap();
        assert!(entanglement_entropy_ed(&gs.vector, &b, &[0]).unwrap().abs() < 1e-12);
        // one particle on two sites, (|01⟩ + |10⟩)/√2
        let b = enumerate_sector_basis(2, &SpinSector::uniform(1, 1)).unwrap();
        let h = std::f64::consts::FRAC_1_SQRT_2;
        let v = vec![Complex64::new(h, 0.0), Complex64::new(h, 0.0)];
        assert!((entanglement_entropy_ed(&v, &b, &[0]).unwrap() - 2f64.ln()).abs() < 1e-12);
    }

    #[test]
    fn entropy_routes_agree() {
        let sector = SpinSector::uniform(3, 1);
        let p = solve_point(&su3(1.0, 0.5, 0.3), &sector, &half_chain(9)).unwrap();
        let b = enumerate_sector_basis(3, &sector).unwrap();
        let full = b.embed(&p.vector).unwrap();
        let s2 = crate::circuit::reduced_entropy(&full, &half_chain(9)).unwrap();
        assert!((p.entropy - s2).abs() < 1e-10);
    }

    #[test]
    fn energy_nondecreasing_in_u() {
        let sector = SpinSector::uniform(3, 1);
        let b = enumerate_sector_basis(3, &sector).unwrap();
        let mut last = f64::NEG_INFINITY;
        for k in 0..12 {
            let m = su3(0.5 * k as f64, 0.25, 0.2);
            let e = ground_state(&build_fermionic_hamiltonian(&m, &b)).unwrap().energy;
            assert!(e >= last - 1e-12);
            last = e;
        }
    }

    #[test]
    fn spectrum_invariant_under_color_relabeling() {
        let m = HubbardModel::nearest_neighbor(4, 3, 1.0, 2.0, 0.7, 0.21);
        let spec = |counts: Vec<usize>| {
            let b = enumerate_sector_basis(4, &SpinSector::new(counts)).unwrap();
            hermitian_eigenvalues(&build_fermionic_hamiltonian(&m, &b).to_dense())
        };
        let a = spec(vec![2, 1, 1]);
        for p in [vec![1, 2, 1], vec![1, 1, 2]] {
            let b = spec(p);
            assert!(a.iter().zip(&b).all(|(x, y)| (x - y).abs() < 1e-10));
        }
    }

    #[test]
    fn energy_even_and_periodic_in_flux() {
        let sector = SpinSector::uniform(3, 1);
        let b = enumerate_sector_basis(3, &sector).unwrap();
        let e = |phi: f64| {
            ground_state(&build_fermionic_hamiltonian(&su3(2.0, 0.3, phi), &b))
                .unwrap()
                .energy
        };
        for &phi in &[0.1, 0.37, 0.5] {
            assert!((e(phi) - e(-phi)).abs() < 1e-10);
            assert!((e(phi) - e(phi + 1.0)).abs() < 1e-10);
        }
    }
}
