//! Commuting measurement groups and shot-based energy estimates.
//!
//! A nearest-neighbor ring needs at most four settings: the computational
//! basis for all Z-type terms, and one hopping-basis rotation per bond for
//! each of the even-odd bonds, the odd-even bonds and the ring-closing bond.

use nalgebra::DMatrix;
use num_complex::Complex64;
use rayon::prelude::*;

use crate::circuit::{multinomial, Gate, Statevector};
use crate::error::{Error, Result};
use crate::lattice::{HubbardModel, SpinSector};
use crate::pauli::{Pauli, PauliHamiltonian, PauliString};
use crate::rng::{derive_seed, stream};

/// Off-diagonal residue tolerated after rotating a group.
pub const DIAGONAL_TOLERANCE: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum GroupLabel {
    Diagonal,
    EvenOddHop,
    OddEvenHop,
    ClosedHop,
}

impl GroupLabel {
    pub fn name(&self) -> &'static str {
        match self {
            GroupLabel::Diagonal => "DIAGONAL",
            GroupLabel::EvenOddHop => "EVEN_ODD_HOP",
            GroupLabel::OddEvenHop => "ODD_EVEN_HOP",
            GroupLabel::ClosedHop => "CLOSED_HOP",
        }
    }

    fn stream_id(&self) -> u64 {
        *self as u64
    }
}

/// A diagonal observable after rotation: `Σ values[b_lo + 2 b_hi] · (-1)^{|w ∧ zmask|}`.
#[derive(Debug, Clone, PartialEq)]
struct Readout {
    pair: Option<(usize, usize)>,
    zmask: u64,
    values: [f64; 4],
}

impl Readout {
    fn eval(&self, w: u64) -> f64 {
        let sign = if (w & self.zmask).count_ones() % 2 == 1 {
            -1.0
        } else {
            1.0
        };
        let idx = match self.pair {
            Some((lo, hi)) => ((w >> lo) & 1) + 2 * ((w >> hi) & 1),
            None => 0,
        };
        sign * self.values[idx as usize]
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct MeasurementGroup {
    pub label: GroupLabel,
    /// Indices into the grouped Hamiltonian's term list.
    pub members: Vec<usize>,
    /// Member terms, copied.
    pub terms: Vec<(Complex64, PauliString)>,
    rotations: Vec<Gate>,
    readout: Vec<Readout>,
}

impl MeasurementGroup {
    /// Hopping-basis rotations applied before a computational-basis readout.
    /// Empty for the diagonal group.
    pub fn basis_change(&self) -> &[Gate] {
        &self.rotations
    }

    /// Rotates a copy of `state` into this group's measurement basis.
    pub fn rotate(&self, state: &Statevector) -> Statevector {
        let mut s = state.clone();
        for g in &self.rotations {
            g.apply(&mut s, 0.0);
        }
        s
    }

    /// Member terms gathered into the units that are read out together:
    /// one operator per bond (and outer Z string) for hopping groups, one
    /// per term for the diagonal group. These commute pairwise.
    pub fn bond_operators(&self) -> Vec<PauliHamiltonian> {
        use std::collections::BTreeMap;
        let q = self.terms.first().map_or(0, |t| t.1.len());
        let mut units: BTreeMap<(u64, u64), Vec<(Complex64, PauliString)>> = BTreeMap::new();
        for (k, &(c, s)) in self.terms.iter().enumerate() {
            let key = if self.label == GroupLabel::Diagonal {
                (k as u64, 0)
            } else {
                let x = s.x_mask();
                (x, s.z_mask() & !x)
            };
            units.entry(key).or_default().push((c, s));
        }
        units
            .into_values()
            .map(|t| PauliHamiltonian::from_terms(q, t))
            .collect()
    }

    /// Value of the group observable on a measured word.
    pub fn eigenvalue(&self, word: u64) -> f64 {
        self.readout.iter().map(|r| r.eval(word)).sum()
    }

    /// Exact group expectation from the rotated probabilities.
    pub fn exact_expectation(&self, state: &Statevector) -> f64 {
        let rotated = self.rotate(state);
        rotated
            .amplitudes()
            .iter()
            .enumerate()
            .filter(|(_, a)| a.norm_sqr() > 0.0)
            .map(|(k, a)| a.norm_sqr() * self.eigenvalue(k as u64))
            .sum()
    }
}

/// Grouping of a Hamiltonian plus its identity coefficient.
#[derive(Debug, Clone, PartialEq)]
pub struct Grouping {
    pub groups: Vec<MeasurementGroup>,
    pub constant: f64,
}

impl Grouping {
    pub fn len(&self) -> usize {
        self.groups.len()
    }

    pub fn is_empty(&self) -> bool {
        self.groups.is_empty()
    }

    /// Infinite-shot limit of [`estimate_energy`].
    pub fn exact_energy(&self, state: &Statevector) -> f64 {
        self.constant + self.groups.iter().map(|g| g.exact_expectation(state)).sum::<f64>()
    }
}

fn bond_label(lo: usize, hi: usize, sites: usize, merge_closed: bool) -> Result<GroupLabel> {
    let (s_lo, s_hi) = (lo / sites, hi / sites);
    if s_lo != s_hi {
        return Err(Error::Unsupported(format!(
            "hopping term couples colors {} and {}",
            s_lo, s_hi
        )));
    }
    let (i, j) = (lo % sites, hi % sites);
    if j == i + 1 {
        Ok(if i % 2 == 0 {
            GroupLabel::EvenOddHop
        } else {
            GroupLabel::OddEvenHop
        })
    } else if i == 0 && j == sites - 1 {
        Ok(if merge_closed {
            GroupLabel::OddEvenHop
        } else {
            GroupLabel::ClosedHop
        })
    } else {
        Err(Error::Unsupported(format!(
            "qubits {} and {} are not a ring bond",
            lo, hi
        )))
    }
}

fn local_letter(p: Pauli) -> DMatrix<Complex64> {
    let (o, z, i) = (
        Complex64::new(1.0, 0.0),
        Complex64::new(0.0, 0.0),
        Complex64::new(0.0, 1.0),
    );
    match p {
        Pauli::I => DMatrix::from_row_slice(2, 2, &[o, z, z, o]),
        Pauli::X => DMatrix::from_row_slice(2, 2, &[z, o, o, z]),
        Pauli::Y => DMatrix::from_row_slice(2, 2, &[z, -i, i, z]),
        Pauli::Z => DMatrix::from_row_slice(2, 2, &[o, z, z, -o]),
    }
}

/// 4×4 matrix of `P_lo ⊗ P_hi` in the basis `|b_lo + 2 b_hi⟩`.
fn pair_matrix(lo: Pauli, hi: Pauli) -> DMatrix<Complex64> {
    local_letter(hi).kronecker(&local_letter(lo))
}

/// Splits the terms of one hopping group into readouts and bond rotations.
fn hop_readouts(terms: &[(Complex64, PauliString)]) -> Result<(Vec<Gate>, Vec<Readout>)> {
    use std::collections::BTreeMap;
    let mut blocks: BTreeMap<(usize, usize, u64), DMatrix<Complex64>> = BTreeMap::new();
    for (c, s) in terms {
        let x = s.x_mask();
        let lo = x.trailing_zeros() as usize;
        let hi = 63 - x.leading_zeros() as usize;
        let outer = s.z_mask() & !(1u64 << lo | 1u64 << hi);
        let m = pair_matrix(s.get(lo), s.get(hi)) * *c;
        *blocks.entry((lo, hi, outer)).or_insert_with(|| DMatrix::zeros(4, 4)) += m;
    }
    let mut phases: BTreeMap<(usize, usize), f64> = BTreeMap::new();
    for (&(lo, hi, _), m) in &blocks {
        if m[(1, 2)].norm() > DIAGONAL_TOLERANCE {
            phases.entry((lo, hi)).or_insert(m[(1, 2)].arg());
        }
    }
    let rotations: Vec<Gate> = phases
        .iter()
        .map(|(&(low, high), &phase)| Gate::HopBasis { low, high, phase })
        .collect();
    let mut readout = Vec::new();
    for ((lo, hi, outer), m) in blocks {
        let Some(&phase) = phases.get(&(lo, hi)) else {
            if m.norm() > DIAGONAL_TOLERANCE {
                return Err(Error::Unsupported(format!(
                    "bond ({}, {}) has no flip amplitude",
                    lo, hi
                )));
            }
            continue;
        };
        let u = Gate::HopBasis {
            low: lo,
            high: hi,
            phase,
        }
        .matrix(0.0);
        let d = &u * m * u.adjoint();
        let mut values = [0.0; 4];
        for k in 0..4 {
            for j in 0..4 {
                if k != j && d[(k, j)].norm() > DIAGONAL_TOLERANCE {
                    return Err(Error::Unsupported(format!("bond ({}, {}) not diagonalized", lo, hi)));
                }
            }
            values[k] = d[(k, k)].re;
        }
        readout.push(Readout {
            pair: Some((lo, hi)),
            zmask: outer,
            values,
        });
    }
    Ok((rotations, readout))
}

/// Partitions a nearest-neighbor ring Hamiltonian into commuting groups.
/// When every color holds an odd number of fermions and `L` is even, the
/// ring-closing bond is read out together with the odd-even bonds.
pub fn group_terms(h: &PauliHamiltonian, model: &HubbardModel, sector: &SpinSector) -> Result<Grouping> {
    if model.hopping.len() > 1 || model.density.len() > 1 {
        return Err(Error::Unsupported(
            "measurement grouping covers nearest-neighbor rings only".into(),
        ));
    }
    if h.qubits() != model.qubits() {
        return Err(Error::LengthMismatch {
            expected: model.qubits(),
            got: h.qubits(),
        });
    }
    let l = model.sites;
    let merge = l % 2 == 0 && l > 2 && sector.counts.iter().all(|&n| n % 2 == 1);
    let mut buckets: std::collections::BTreeMap<GroupLabel, Vec<usize>> = Default::default();
    let mut constant = 0.0;
    for (k, (c, s)) in h.terms().iter().enumerate() {
        if s.is_identity() {
            constant += c.re;
            continue;
        }
        let label = match s.x_mask().count_ones() {
            0 => GroupLabel::Diagonal,
            2 => {
                let x = s.x_mask();
                bond_label(x.trailing_zeros() as usize, 63 - x.leading_zeros() as usize, l, merge)?
            }
            n => return Err(Error::Unsupported(format!("term {} flips {} qubits", s, n))),
        };
        buckets.entry(label).or_default().push(k);
    }
    let mut groups = Vec::new();
    for (label, members) in buckets {
        let terms: Vec<_> = members.iter().map(|&k| h.terms()[k]).collect();
        let (rotations, readout) = if label == GroupLabel::Diagonal {
            let readout = terms
                .iter()
                .map(|(c, s)| Readout {
                    pair: None,
                    zmask: s.z_mask(),
                    values: [c.re; 4],
                })
                .collect();
            (Vec::new(), readout)
        } else {
            hop_readouts(&terms)?
        };
        groups.push(MeasurementGroup {
            label,
            members,
            terms,
            rotations,
            readout,
        });
    }
    Ok(Grouping { groups, constant })
}

/// Hopping-basis unitary of a bond with phase `2πφ/L`, basis `|b_lo + 2 b_hi⟩`.
pub fn hop_basis_matrix(phase: f64) -> DMatrix<Complex64> {
    Gate::HopBasis { low: 0, high: 1, phase }.matrix(0.0)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GroupEstimate {
    pub label: GroupLabel,
    pub mean: f64,
    pub stderr: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ShotEstimate {
    pub mean: f64,
    pub stderr: f64,
    pub shots: u64,
    pub groups: Vec<GroupEstimate>,
}

/// Sampled estimate of the group observable from `shots` readouts.
pub fn estimate_group(group: &MeasurementGroup, state: &Statevector, shots: u64, seed: u64) -> Result<GroupEstimate> {
    if shots == 0 {
        return Err(Error::range("shots", "must be >= 1"));
    }
    let rotated = group.rotate(state);
    let probs: Vec<(u64, f64)> = rotated
        .amplitudes()
        .iter()
        .enumerate()
        .map(|(k, a)| (k as u64, a.norm_sqr()))
        .filter(|p| p.1 > 0.0)
        .collect();
    let mut rng = stream(derive_seed(seed, &[group.label.stream_id()]), 0);
    let (mut sum, mut sq) = (0.0, 0.0);
    for (w, n) in multinomial(&probs, shots, &mut rng) {
        let v = group.eigenvalue(w);
        sum += n as f64 * v;
        sq += n as f64 * v * v;
    }
    let n = shots as f64;
    let mean = sum / n;
    let var = if shots > 1 {
        ((sq - n * mean * mean) / (n - 1.0)).max(0.0)
    } else {
        0.0
    };
    Ok(GroupEstimate {
        label: group.label,
        mean,
        stderr: (var / n).sqrt(),
    })
}

/// Energy estimate with `shots` readouts per group.
pub fn estimate_energy(state: &Statevector, grouping: &Grouping, shots: u64, seed: u64) -> Result<ShotEstimate> {
    let groups = grouping
        .groups
        .par_iter()
        .map(|g| estimate_group(g, state, shots, seed))
        .collect::<Result<Vec<_>>>()?;
    Ok(ShotEstimate {
        mean: grouping.constant + groups.iter().map(|g| g.mean).sum::<f64>(),
        stderr: groups.iter().map(|g| g.stderr * g.stderr).sum::<f64>().sqrt(),
        shots,
        groups,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ansatz::{build_ansatz, AnsatzSpec};
    use crate::jw::{build_qubit_hamiltonian, build_qubit_hamiltonian_with, BoundaryRule};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random_state(model: &HubbardModel, sector: &SpinSector, layers: usize, seed: u64) -> Statevector {
        let spec = AnsatzSpec::new(model, sector, layers);
        let c = build_ansatz(&spec).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let p: Vec<f64> = (0..c.parameter_count()).map(|_| rng.random_range(0.0..6.3)).collect();
        c.run(&p, 0).unwrap()
    }

    #[test]
    fn group_counts() {
        let m = HubbardModel::nearest_neighbor(3, 3, 1.0, 5.0, 0.0, 0.2);
        let s = SpinSector::uniform(3, 1);
        let g = group_terms(&build_qubit_hamiltonian(&m, &s).unwrap(), &m, &s).unwrap();
        assert_eq!(g.len(), 4);
        let m = HubbardModel::nearest_neighbor(4, 2, 1.0, 5.0, 1.0, 0.2);
        let s = SpinSector::uniform(2, 1);
        let g = group_terms(&build_qubit_hamiltonian(&m, &s).unwrap(), &m, &s).unwrap();
        assert_eq!(g.len(), 3);
        let s = SpinSector::new(vec![2, 1]);
        let g = group_terms(&build_qubit_hamiltonian(&m, &s).unwrap(), &m, &s).unwrap();
        assert_eq!(g.len(), 4);
        let m = HubbardModel::nearest_neighbor(3, 3, 0.0, 5.0, 1.0, 0.2);
        let s = SpinSector::uniform(3, 1);
        let g = group_terms(&build_qubit_hamiltonian(&m, &s).unwrap(), &m, &s).unwrap();
        assert_eq!(g.len(), 1);
        assert_eq!(g.groups[0].label, GroupLabel::Diagonal);
    }

    #[test]
    fn long_range_rejected() {
        let m = HubbardModel {
            sites: 5,
            colors: 1,
            hopping: vec![1.0, 0.5],
            onsite: 0.0,
            density: vec![],
            flux: 0.0,
        };
        let s = SpinSector::uniform(1, 1);
        let err = group_terms(&build_qubit_hamiltonian(&m, &s).unwrap(), &m, &s).unwrap_err();
        assert!(err.to_string().contains("nearest-neighbor"));
    }

    #[test]
    fn partition_is_exact_and_commuting() {
        for (l, n, counts) in [
            (3, 3, vec![1, 1, 1]),
            (4, 2, vec![1, 1]),
            (4, 3, vec![2, 1, 1]),
            (6, 2, vec![3, 2]),
        ] {
            let m = HubbardModel::nearest_neighbor(l, n, 1.0, 2.0, 0.5, 0.31);
            let s = SpinSector::new(counts);
            let h = build_qubit_hamiltonian(&m, &s).unwrap();
            let g = group_terms(&h, &m, &s).unwrap();
            let mut all: Vec<usize> = g.groups.iter().flat_map(|g| g.members.clone()).collect();
            all.sort();
            let non_identity: Vec<usize> = (0..h.len()).filter(|&k| !h.terms()[k].1.is_identity()).collect();
            assert_eq!(all, non_identity);
            for grp in &g.groups {
                let ops = grp.bond_operators();
                for a in &ops {
                    for b in &ops {
                        let comm = a.mul(b).add(&b.mul(a).scale(Complex64::new(-1.0, 0.0)));
                        assert!(comm.terms().iter().all(|t| t.0.norm() < 1e-12), "{:?}", grp.label);
                    }
                }
            }
        }
    }

    #[test]
    fn rotation_diagonalizes_pair_term() {
        for phase in [0.0, 0.4, 2.0, -1.1] {
            let u = hop_basis_matrix(phase);
            let w = Complex64::from_polar(1.0, phase);
            let mut m = DMatrix::<Complex64>::zeros(4, 4);
            m[(1, 2)] = w;
            m[(2, 1)] = w.conj();
            let d = &u * m * u.adjoint();
            let want = [0.0, 1.0, -1.0, 0.0];
            for k in 0..4 {
                for j in 0..4 {
                    let e = if k == j { want[k] } else { 0.0 };
                    assert!((d[(k, j)] - Complex64::new(e, 0.0)).norm() < 1e-12);
                }
            }
        }
        let u0 = hop_basis_matrix(0.0);
        assert!(u0.iter().all(|z| z.im.abs() < 1e-15));
    }

    #[test]
    fn rotation_unitary() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        for _ in 0..10 {
            let u = hop_basis_matrix(rng.random_range(-4.0..4.0));
            let e = &u * u.adjoint() - DMatrix::<Complex64>::identity(4, 4);
            assert!(e.norm() < 1e-12);
        }
    }

    #[test]
    fn infinite_shot_limit_is_exact() {
        for (l, n, counts, rule) in [
            (3, 3, vec![1, 1, 1], BoundaryRule::Parity),
            (4, 2, vec![1, 1], BoundaryRule::Parity),
            (4, 2, vec![2, 1], BoundaryRule::ZString),
            (5, 2, vec![2, 2], BoundaryRule::ZString),
        ] {
            let m = HubbardModel::nearest_neighbor(l, n, 1.0, 5.0, 0.7, 0.13);
            let s = SpinSector::new(counts);
            let h = build_qubit_hamiltonian_with(&m, &s, rule).unwrap();
            let g = group_terms(&h, &m, &s).unwrap();
            let psi = random_state(&m, &s, 2, 11);
            let exact = h.expectation(&psi).unwrap();
            assert!((g.exact_energy(&psi) - exact).abs() < 1e-10);
        }
    }

    #[test]
    fn estimate_is_deterministic_and_unbiased() {
        let m = HubbardModel::nearest_neighbor(3, 2, 1.0, 5.0, 0.0, 0.2);
        let s = SpinSector::uniform(2, 1);
        let h = build_qubit_hamiltonian(&m, &s).unwrap();
        let g = group_terms(&h, &m, &s).unwrap();
        let psi = random_state(&m, &s, 1, 3);
        let exact = h.expectation(&psi).unwrap();
        let a = estimate_energy(&psi, &g, 1000, 5).unwrap();
        assert_eq!(a, estimate_energy(&psi, &g, 1000, 5).unwrap());
        let runs: Vec<ShotEstimate> = (0..200).map(|k| estimate_energy(&psi, &g, 1000, k).unwrap()).collect();
        let mean = runs.iter().map(|r| r.mean).sum::<f64>() / 200.0;
        let se = (runs.iter().map(|r| r.stderr * r.stderr).sum::<f64>() / 200.0).sqrt() / (200f64).sqrt();
        assert!((mean - exact).abs() < 4.0 * se, "{} vs {} ({})", mean, exact, se);
        assert!(estimate_energy(&psi, &g, 0, 1).is_err());
    }

    #[test]
    fn stderr_scales_as_inverse_root() {
        let m = HubbardModel::nearest_neighbor(3, 2, 1.0, 5.0, 0.0, 0.2);
        let s = SpinSector::uniform(2, 1);
        let h = build_qubit_hamiltonian(&m, &s).unwrap();
        let g = group_terms(&h, &m, &s).unwrap();
        let psi = random_state(&m, &s, 1, 8);
        let avg = |shots| {
            (0..50)
                .map(|k| estimate_energy(&psi, &g, shots, k).unwrap().stderr)
                .sum::<f64>()
                / 50.0
        };
        let ratio = avg(1024) / avg(4096);
        assert!((ratio - 2.0).abs() < 0.4, "{}", ratio);
    }
}
