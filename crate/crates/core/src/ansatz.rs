//! Number-preserving layered ansatz.
//!
//! Layout: X on the occupied qubits, one Rz on each of them, then per layer
//! an iSWAP-like sublayer on the open chain of every color, a controlled-Rz
//! sublayer linking color `s` to `s + 1` on every site, and an Rz on every
//! qubit.

use crate::circuit::{Circuit, Gate};
use crate::error::{Error, Result};
use crate::lattice::{HubbardModel, SpinSector};

/// CNOT depth added by the hopping-basis rotations before measurement.
pub const MEASUREMENT_DEPTH: usize = 3;

#[derive(Debug, Clone, PartialEq)]
pub struct AnsatzSpec {
    pub sites: usize,
    pub colors: usize,
    pub sector: SpinSector,
    pub layers: usize,
    /// Prepared basis word; bit `i + s·L` marks site `i` of color `s`.
    pub occupation: u64,
}

impl AnsatzSpec {
    /// Default preparation: color `s` fills sites `0..N_s`.
    pub fn new(model: &HubbardModel, sector: &SpinSector, layers: usize) -> Self {
        AnsatzSpec {
            sites: model.sites,
            colors: model.colors,
            sector: sector.clone(),
            layers,
            occupation: default_occupation(model.sites, sector),
        }
    }

    pub fn with_occupation(mut self, occupation: u64) -> Self {
        self.occupation = occupation;
        self
    }

    pub fn qubits(&self) -> usize {
        self.sites * self.colors
    }

    pub fn check(&self) -> Result<()> {
        if self.sector.counts.len() != self.colors {
            return Err(Error::LengthMismatch {
                expected: self.colors,
                got: self.sector.counts.len(),
            });
        }
        if self.qubits() > 63 || (self.qubits() < 64 && self.occupation >> self.qubits() != 0) {
            return Err(Error::range("occupation", "bits set outside the register"));
        }
        if !hamming_check(self.occupation, self.sites, &self.sector) {
            return Err(Error::range(
                "occupation",
                "per-color bit counts differ from the sector",
            ));
        }
        Ok(())
    }
}

/// Word with color `s` occupying sites `0..N_s`.
pub fn default_occupation(sites: usize, sector: &SpinSector) -> u64 {
    let mut w = 0u64;
    for (s, &n) in sector.counts.iter().enumerate() {
        for i in 0..n.min(sites) {
            w |= 1 << (i + s * sites);
        }
    }
    w
}

fn push_layer(c: &mut Circuit, sites: usize, colors: usize) {
    for s in 0..colors {
        for i in 0..sites - 1 {
            let slot = c.next_slot();
            c.push(Gate::IswapLike {
                a: i + s * sites,
                b: i + 1 + s * sites,
                slot,
            });
        }
    }
    for i in 0..sites {
        for s in 0..colors - 1 {
            let slot = c.next_slot();
            c.push(Gate::Crz {
                control: i + s * sites,
                target: i + (s + 1) * sites,
                slot,
            });
        }
    }
    for q in 0..sites * colors {
        let slot = c.next_slot();
        c.push(Gate::Rz { qubit: q, slot });
    }
}

pub fn build_ansatz(spec: &AnsatzSpec) -> Result<Circuit> {
    spec.check()?;
    let mut c = Circuit::new(spec.qubits());
    let occupied: Vec<usize> = (0..spec.qubits()).filter(|&q| spec.occupation >> q & 1 == 1).collect();
    for &q in &occupied {
        c.push(Gate::X { qubit: q });
    }
    for &q in &occupied {
        let slot = c.next_slot();
        c.push(Gate::Rz { qubit: q, slot });
    }
    for _ in 0..spec.layers {
        push_layer(&mut c, spec.sites, spec.colors);
    }
    Ok(c)
}

/// Resource counts of an ansatz.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ComplexityReport {
    pub cnot_count: usize,
    pub depth: usize,
    pub parameter_count: usize,
    pub parameters_per_layer: usize,
    pub initial_parameters: usize,
}

/// Closed-form costs for `layers` layers on `colors × sites` qubits with
/// `particles` prepared fermions.
pub fn complexity_report(colors: usize, sites: usize, layers: usize, particles: usize) -> ComplexityReport {
    let (n, l) = (colors, sites);
    let per_layer = 3 * n * l - n - l;
    ComplexityReport {
        cnot_count: layers * (5 * n * l - 3 * n - 2 * l),
        depth: layers * (2 * n + 3 * l - 5),
        parameter_count: particles + layers * per_layer,
        parameters_per_layer: per_layer,
        initial_parameters: particles,
    }
}

/// CNOT depth of a gate sequence under as-soon-as-possible scheduling.
pub fn cnot_depth(qubits: usize, gates: &[Gate]) -> usize {
    let mut free = vec![0usize; qubits];
    for g in gates {
        let qs = g.qubits();
        let start = qs.iter().map(|&q| free[q]).max().unwrap_or(0);
        for q in qs {
            free[q] = start + g.cnot_cost();
        }
    }
    free.into_iter().max().unwrap_or(0)
}

/// Costs counted on the built circuit. Layers are scheduled one after the
/// other; gates inside a layer start as soon as their qubits are free.
pub fn counted_complexity(spec: &AnsatzSpec) -> Result<ComplexityReport> {
    let c = build_ansatz(spec)?;
    let (n, l) = (spec.colors, spec.sites);
    let prep = 2 * spec.sector.particles();
    let per_layer = n * (l - 1) + l * (n - 1) + n * l;
    let gates = c.gates();
    let depth = (0..spec.layers)
        .map(|k| cnot_depth(c.qubits(), &gates[prep + k * per_layer..prep + (k + 1) * per_layer]))
        .sum::<usize>()
        + cnot_depth(c.qubits(), &gates[..prep]);
    let first_layer = gates[prep.min(gates.len())..].iter().filter_map(|g| g.slot()).min();
    Ok(ComplexityReport {
        cnot_count: gates.iter().map(|g| g.cnot_cost()).sum(),
        depth,
        parameter_count: c.parameter_count(),
        parameters_per_layer: if spec.layers > 0 {
            (c.parameter_count() - spec.sector.particles()) / spec.layers
        } else {
            complexity_report(n, l, 0, 0).parameters_per_layer
        },
        initial_parameters: first_layer.unwrap_or(c.parameter_count()),
    })
}

/// True when every color block of `word` holds exactly `N_s` ones.
pub fn hamming_check(word: u64, sites: usize, sector: &SpinSector) -> bool {
    let block = if sites >= 64 { u64::MAX } else { (1u64 << sites) - 1 };
    sector
        .counts
        .iter()
        .enumerate()
        .all(|(s, &n)| ((word >> (s * sites)) & block).count_ones() as usize == n)
        && (sites * sector.counts.len() >= 64 || word >> (sites * sector.counts.len()) == 0)
}
