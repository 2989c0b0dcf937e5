//! Jordan-Wigner map for N-color fermions on a ring.
//!
//! Mode `(i, s)` goes to qubit `n = i + s·L` (colors in increasing order) and
//!
//! ```text
//! c†_n = (Π_{j<n} Z_j) σ+_n,   c_n = (Π_{j<n} Z_j) σ-_n,   n_n = (1 - Z_n)/2
//! ```
//!
//! with `σ+ = |1⟩⟨0|`. Nearest-neighbor hops that close the ring replace the
//! Z string between `sL` and `sL + L - 1` by its constant value on the
//! sector; every other hop keeps its explicit string.

use num_complex::Complex64;
use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::lattice::{validate, HubbardModel, SpinSector};
use crate::pauli::{Pauli, PauliHamiltonian, PauliString};

/// A fermionic mode and its qubit.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct ModeIndex {
    pub site: usize,
    pub color: usize,
    pub qubit: usize,
}

impl ModeIndex {
    pub fn new(site: usize, color: usize, sites: usize, colors: usize) -> Result<Self> {
        Ok(ModeIndex {
            site,
            color,
            qubit: mode_to_qubit(site, color, sites, colors)?,
        })
    }

    pub fn from_qubit(qubit: usize, sites: usize, colors: usize) -> Result<Self> {
        if sites == 0 || qubit >= sites * colors {
            return Err(Error::range(
                "qubit",
                format!("{} outside [0, {})", qubit, sites * colors),
            ));
        }
        Ok(ModeIndex {
            site: qubit % sites,
            color: qubit / sites,
            qubit,
        })
    }
}

/// `n = i + s·L`.
pub fn mode_to_qubit(site: usize, color: usize, sites: usize, colors: usize) -> Result<usize> {
    if site >= sites {
        return Err(Error::range("site", format!("{} outside [0, {})", site, sites)));
    }
    if color >= colors {
        return Err(Error::range("color", format!("{} outside [0, {})", color, colors)));
    }
    Ok(site + color * sites)
}

/// Sign that replaces the Z string of the ring-closing hop of color `s`.
///
/// On the sector, the string between qubits `sL` and `sL + L - 1` counts the
/// `N_s - 1` other particles of that color, so it equals `(-1)^{N_s - 1}`
/// at `i = L - 1` and `+1` on every other bond.
pub fn parity(site: usize, color: usize, sites: usize, sector: &SpinSector) -> f64 {
    let n = sector.counts[color];
    if site + 1 == sites && n > 0 && (n - 1) % 2 == 1 {
        -1.0
    } else {
        1.0
    }
}

fn ladder(qubits: usize, n: usize, raising: bool) -> PauliHamiltonian {
    let mut string = PauliString::identity(qubits);
    for j in 0..n {
        string.set(j, Pauli::Z);
    }
    let mut x = string;
    x.set(n, Pauli::X);
    let mut y = string;
    y.set(n, Pauli::Y);
    // σ+ = |1⟩⟨0| = (X - iY)/2, σ- = (X + iY)/2
    let iy = if raising { -0.5 } else { 0.5 };
    PauliHamiltonian::from_terms(
        qubits,
        vec![(Complex64::new(0.5, 0.0), x), (Complex64::new(0.0, iy), y)],
    )
}

/// JW image of `c†_n`.
pub fn creation(qubits: usize, n: usize) -> PauliHamiltonian {
    ladder(qubits, n, true)
}

/// JW image of `c_n`.
pub fn annihilation(qubits: usize, n: usize) -> PauliHamiltonian {
    ladder(qubits, n, false)
}

/// `(1 - Z_n)/2`.
pub fn number(qubits: usize, n: usize) -> PauliHamiltonian {
    PauliHamiltonian::from_terms(
        qubits,
        vec![
            (Complex64::new(0.5, 0.0), PauliString::identity(qubits)),
            (Complex64::new(-0.5, 0.0), PauliString::single(qubits, n, Pauli::Z)),
        ],
    )
}

/// `σ+_to σ-_from` on two distinct qubits, no string.
fn bare_hop(qubits: usize, to: usize, from: usize) -> PauliHamiltonian {
    let up = PauliHamiltonian::from_terms(
        qubits,
        vec![
            (Complex64::new(0.5, 0.0), PauliString::single(qubits, to, Pauli::X)),
            (Complex64::new(0.0, -0.5), PauliString::single(qubits, to, Pauli::Y)),
        ],
    );
    let down = PauliHamiltonian::from_terms(
        qubits,
        vec![
            (Complex64::new(0.5, 0.0), PauliString::single(qubits, from, Pauli::X)),
            (Complex64::new(0.0, 0.5), PauliString::single(qubits, from, Pauli::Y)),
        ],
    );
    up.mul(&down)
}

/// How the ring-closing nearest-neighbor hop is represented.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BoundaryRule {
    /// Replace the Z string by [`parity`]; exact on the sector only.
    Parity,
    /// Keep the explicit Z string; exact on the full register.
    ZString,
}

/// `Σ coeff(r)·c†_{i,s} c_{i+r,s} + h.c.` mapped to qubits.
fn hopping_sum(
    model: &HubbardModel,
    sector: &SpinSector,
    rule: BoundaryRule,
    coeff: impl Fn(usize, f64) -> Complex64,
) -> PauliHamiltonian {
    let q = model.qubits();
    let l = model.sites;
    let mut acc: Vec<(Complex64, PauliString)> = Vec::new();
    for s in 0..model.colors {
        for i in 0..l {
            for (k, &t) in model.hopping.iter().enumerate() {
                let r = k + 1;
                let j = (i + r) % l;
                let (to, from) = (i + s * l, j + s * l);
                let c = coeff(r, t);
                let op = if r == 1 && j == 0 && rule == BoundaryRule::Parity {
                    bare_hop(q, to, from).scale(Complex64::new(parity(i, s, l, sector), 0.0))
                } else {
                    creation(q, to).mul(&annihilation(q, from))
                };
                let term = op.scale(c);
                acc.extend(term.terms().iter().copied());
                acc.extend(term.adjoint().terms().iter().copied());
            }
        }
    }
    PauliHamiltonian::from_terms(q, acc)
}

fn interaction(model: &HubbardModel) -> PauliHamiltonian {
    let q = model.qubits();
    let l = model.sites;
    let n = |i: usize, s: usize| number(q, i + s * l);
    let mut acc: Vec<(Complex64, PauliString)> = Vec::new();
    let mut push = |h: PauliHamiltonian| acc.extend(h.terms().iter().copied());
    for i in 0..l {
        for s in 0..model.colors {
            for s2 in s + 1..model.colors {
                if model.onsite != 0.0 {
                    push(n(i, s).mul(&n(i, s2)).scale(Complex64::new(model.onsite, 0.0)));
                }
            }
        }
        for (k, &v) in model.density.iter().enumerate() {
            if v == 0.0 {
                continue;
            }
            let j = (i + k + 1) % l;
            for s in 0..model.colors {
                for s2 in 0..model.colors {
                    push(n(i, s).mul(&n(j, s2)).scale(Complex64::new(v, 0.0)));
                }
            }
        }
    }
    PauliHamiltonian::from_terms(q, acc)
}

fn hop_coefficient(model: &HubbardModel, r: usize, t: f64) -> Complex64 {
    -t * Complex64::from_polar(1.0, 2.0 * PI * model.flux * r as f64 / model.sites as f64)
}

fn current_coefficient(model: &HubbardModel, r: usize, t: f64) -> Complex64 {
    let l = model.sites as f64;
    Complex64::new(0.0, 2.0 * PI * r as f64 * t / l) * Complex64::from_polar(1.0, 2.0 * PI * model.flux * r as f64 / l)
}

/// Qubit Hamiltonian of the model on the given sector.
pub fn build_qubit_hamiltonian(model: &HubbardModel, sector: &SpinSector) -> Result<PauliHamiltonian> {
    build_qubit_hamiltonian_with(model, sector, BoundaryRule::Parity)
}

pub fn build_qubit_hamiltonian_with(
    model: &HubbardModel,
    sector: &SpinSector,
    rule: BoundaryRule,
) -> Result<PauliHamiltonian> {
    let (model, sector) = validate(model.clone(), sector.clone())?;
    if model.qubits() > 63 {
        return Err(Error::range("qubits", "N·L must be at most 63"));
    }
    let hop = hopping_sum(&model, &sector, rule, |r, t| hop_coefficient(&model, r, t));
    Ok(hop.add(&interaction(&model)))
}

/// Qubit image of the current operator `-∂H/∂φ` at the model's flux.
pub fn build_current_operator(model: &HubbardModel, sector: &SpinSector) -> Result<PauliHamiltonian> {
    build_current_operator_with(model, sector, BoundaryRule::Parity)
}

pub fn build_current_operator_with(
    model: &HubbardModel,
    sector: &SpinSector,
    rule: BoundaryRule,
) -> Result<PauliHamiltonian> {
    let (model, sector) = validate(model.clone(), sector.clone())?;
    Ok(hopping_sum(&model, &sector, rule, |r, t| {
        current_coefficient(&model, r, t)
    }))
}
