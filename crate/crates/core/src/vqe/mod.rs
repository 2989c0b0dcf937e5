//! Variational optimization of the ansatz against the ring Hamiltonian.

pub mod bfgs;
pub mod nft;
pub mod sweep;

use std::f64::consts::PI;
use std::sync::atomic::{AtomicU64, Ordering};

use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::ansatz::{build_ansatz, AnsatzSpec};
use crate::circuit::{reduced_entropy, Circuit, Gate, Statevector};
use crate::error::{Error, Result};
use crate::jw::{build_current_operator, build_qubit_hamiltonian};
use crate::lattice::{validate, HubbardModel, SpinSector};
use crate::measurement::{estimate_energy, group_terms, Grouping, ShotEstimate};
use crate::pauli::PauliHamiltonian;
use crate::rng::{derive_seed, stream};

pub use bfgs::{minimize_bfgs, BfgsOptions};
pub use nft::{minimize_nft, NftOptions};
pub use sweep::{sweep_flux, SweepOptions, SweepPoint, SweepResult};

/// Central-difference step for gradients.
pub const FD_STEP: f64 = 1e-7;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum OptimizerKind {
    QuasiNewton,
    Nft,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum GradientMethod {
    /// Central differences with step [`FD_STEP`]; `2n` evaluations.
    FiniteDifference,
    /// Reverse-mode through the simulator; counted as 2 evaluations.
    Adjoint,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum CostMode {
    Exact,
    Sampled { shots: u64 },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VqeConfig {
    pub layers: usize,
    pub optimizer: OptimizerKind,
    pub mode: CostMode,
    pub tolerance: f64,
    /// Cost evaluations per optimization; `None` picks the optimizer default.
    pub max_evaluations: Option<u64>,
    pub seed: u64,
    /// Random starts at the first grid point; the lowest energy wins.
    pub starts: usize,
    pub gradient: GradientMethod,
    pub two_harmonic: bool,
}

impl Default for VqeConfig {
    fn default() -> Self {
        VqeConfig {
            layers: 3,
            optimizer: OptimizerKind::QuasiNewton,
            mode: CostMode::Exact,
            tolerance: 1e-5,
            max_evaluations: None,
            seed: 0,
            starts: 5,
            gradient: GradientMethod::FiniteDifference,
            two_harmonic: false,
        }
    }
}

impl VqeConfig {
    pub fn budget(&self) -> u64 {
        self.max_evaluations.unwrap_or(match self.optimizer {
            OptimizerKind::QuasiNewton => 200_000,
            OptimizerKind::Nft => 65_536,
        })
    }

    pub fn check(&self) -> Result<()> {
        if !(self.tolerance > 0.0) {
            return Err(Error::range("tolerance", "must be > 0"));
        }
        if let CostMode::Sampled { shots: 0 } = self.mode {
            return Err(Error::range("shots", "must be >= 1"));
        }
        if self.mode != CostMode::Exact && self.optimizer == OptimizerKind::QuasiNewton {
            return Err(Error::Unsupported("quasi-Newton runs need exact energies".into()));
        }
        if self.starts == 0 {
            return Err(Error::range("starts", "must be >= 1"));
        }
        Ok(())
    }
}

/// Outcome of one optimizer run.
#[derive(Debug, Clone, PartialEq)]
pub struct OptimResult {
    pub params: Vec<f64>,
    /// Last cost value seen (or fitted) by the optimizer.
    pub value: f64,
    pub evaluations: u64,
    pub iterations: usize,
    pub converged: bool,
    pub gradient_norm: Option<f64>,
}

/// Ansatz, Hamiltonian and current operator for one flux value.
#[derive(Debug, Clone)]
pub struct Problem {
    pub model: HubbardModel,
    pub sector: SpinSector,
    pub circuit: Circuit,
    pub hamiltonian: PauliHamiltonian,
    pub current: PauliHamiltonian,
    grouping: Option<Grouping>,
}

impl Problem {
    pub fn new(model: &HubbardModel, sector: &SpinSector, layers: usize) -> Result<Self> {
        let spec = AnsatzSpec::new(model, sector, layers);
        Self::with_ansatz(model, sector, &spec)
    }

    pub fn with_ansatz(model: &HubbardModel, sector: &SpinSector, spec: &AnsatzSpec) -> Result<Self> {
        let (model, sector) = validate(model.clone(), sector.clone())?;
        let hamiltonian = build_qubit_hamiltonian(&model, &sector)?;
        let grouping = if model.hopping.len() <= 1 && model.density.len() <= 1 {
            Some(group_terms(&hamiltonian, &model, &sector)?)
        } else {
            None
        };
        Ok(Problem {
            circuit: build_ansatz(spec)?,
            current: build_current_operator(&model, &sector)?,
            hamiltonian,
            grouping,
            model,
            sector,
        })
    }

    pub fn parameter_count(&self) -> usize {
        self.circuit.parameter_count()
    }

    pub fn grouping(&self) -> Option<&Grouping> {
        self.grouping.as_ref()
    }

    pub fn state(&self, params: &[f64]) -> Result<Statevector> {
        self.circuit.run(params, 0)
    }

    pub fn energy(&self, params: &[f64]) -> Result<f64> {
        self.hamiltonian.expectation(&self.state(params)?)
    }

    pub fn sampled_energy(&self, params: &[f64], shots: u64, seed: u64) -> Result<ShotEstimate> {
        let g = self
            .grouping
            .as_ref()
            .ok_or_else(|| Error::Unsupported("sampling needs a nearest-neighbor model".into()))?;
        estimate_energy(&self.state(params)?, g, shots, seed)
    }

    /// Central-difference gradient, components in parallel.
    pub fn gradient_fd(&self, params: &[f64]) -> Result<Vec<f64>> {
        (0..params.len())
            .into_par_iter()
            .map(|k| {
                let mut p = params.to_vec();
                p[k] = params[k] + FD_STEP;
                let up = self.energy(&p)?;
                p[k] = params[k] - FD_STEP;
                let down = self.energy(&p)?;
                Ok((up - down) / (2.0 * FD_STEP))
            })
            .collect()
    }

    pub fn gradient_adjoint(&self, params: &[f64]) -> Result<Vec<f64>> {
        Ok(self
            .circuit
            .energy_gradient(params, 0, |a| self.hamiltonian.apply(a))?
            .1)
    }

    /// Three-point fit frequency of each slot: 2 for Rz, 1 otherwise.
    pub fn slot_frequencies(&self) -> Vec<f64> {
        let mut w = vec![1.0; self.parameter_count()];
        for g in self.circuit.gates() {
            if let Gate::Rz { slot, .. } = g {
                w[*slot] = 2.0;
            }
        }
        w
    }

    /// Angles preparing the ground-state image at flux `1 - φ`.
    ///
    /// `H(1-φ) = G H(φ)* G†` with `G = Π_j exp(-i 2π j n_j / L)`. Negating
    /// every angle conjugates the state; `G` is diagonal and is absorbed
    /// into the last Rz on each qubit.
    pub fn mirror_parameters(&self, params: &[f64]) -> Vec<f64> {
        let mut out: Vec<f64> = params.iter().map(|v| -v).collect();
        let l = self.model.sites;
        let mut last = vec![None; self.circuit.qubits()];
        for g in self.circuit.gates() {
            if let Gate::Rz { qubit, slot } = *g {
                last[qubit] = Some(slot);
            }
        }
        for (q, slot) in last.into_iter().enumerate() {
            if let Some(slot) = slot {
                out[slot] -= PI * (q % l) as f64 / l as f64;
            }
        }
        out
    }

    pub fn observables(&self, state: &Statevector, cut: &[usize]) -> Result<Observables> {
        observables_from_state(state, &self.hamiltonian, &self.current, cut)
    }
}

/// Counted cost function.
pub struct Cost<'a> {
    problem: &'a Problem,
    mode: CostMode,
    seed: u64,
    calls: AtomicU64,
}

impl<'a> Cost<'a> {
    pub fn new(problem: &'a Problem, mode: CostMode, seed: u64) -> Self {
        Cost {
            problem,
            mode,
            seed,
            calls: AtomicU64::new(0),
        }
    }

    /// Energy in exact mode, shot estimate mean in sampled mode. Sampled
    /// calls draw from a stream keyed by the call index.
    pub fn eval(&self, params: &[f64]) -> Result<f64> {
        let k = self.calls.fetch_add(1, Ordering::Relaxed);
        match self.mode {
            CostMode::Exact => self.problem.energy(params),
            CostMode::Sampled { shots } => Ok(self
                .problem
                .sampled_energy(params, shots, derive_seed(self.seed, &[k]))?
                .mean),
        }
    }

    pub fn calls(&self) -> u64 {
        self.calls.load(Ordering::Relaxed)
    }
}

/// Uniform draws on `[0, 2π)`.
pub fn random_parameters(count: usize, seed: u64) -> Vec<f64> {
    let mut rng = stream(seed, 0);
    (0..count).map(|_| rng.random_range(0.0..2.0 * PI)).collect()
}

/// One optimizer run from `x0` with the given budget.
pub fn optimize(problem: &Problem, x0: &[f64], config: &VqeConfig, budget: u64, seed: u64) -> Result<OptimResult> {
    config.check()?;
    if x0.len() != problem.parameter_count() {
        return Err(Error::LengthMismatch {
            expected: problem.parameter_count(),
            got: x0.len(),
        });
    }
    match config.optimizer {
        OptimizerKind::QuasiNewton => Ok(optimize_quasi_newton(problem, x0, config, budget)),
        OptimizerKind::Nft => optimize_nft(problem, x0, config, budget, seed),
    }
}

pub fn optimize_quasi_newton(problem: &Problem, x0: &[f64], config: &VqeConfig, budget: u64) -> OptimResult {
    let n = x0.len() as u64;
    let opts = BfgsOptions {
        tolerance: config.tolerance,
        max_evaluations: budget,
        gradient_cost: match config.gradient {
            GradientMethod::FiniteDifference => 2 * n,
            GradientMethod::Adjoint => 2,
        },
    };
    let f = |x: &[f64]| problem.energy(x).expect("parameter length checked");
    match config.gradient {
        GradientMethod::FiniteDifference => minimize_bfgs(
            f,
            |x| problem.gradient_fd(x).expect("parameter length checked"),
            x0,
            &opts,
        ),
        GradientMethod::Adjoint => minimize_bfgs(
            f,
            |x| problem.gradient_adjoint(x).expect("parameter length checked"),
            x0,
            &opts,
        ),
    }
}

pub fn optimize_nft(problem: &Problem, x0: &[f64], config: &VqeConfig, budget: u64, seed: u64) -> Result<OptimResult> {
    let cost = Cost::new(problem, config.mode, seed);
    let opts = NftOptions {
        budget,
        two_harmonic: config.two_harmonic,
    };
    let mut failure = None;
    let r = minimize_nft(
        |x| match cost.eval(x) {
            Ok(v) => v,
            Err(e) => {
                failure.get_or_insert(e);
                f64::NAN
            }
        },
        x0,
        &problem.slot_frequencies(),
        &opts,
    );
    match failure {
        Some(e) => Err(e),
        None => Ok(r),
    }
}

/// Best of `config.starts` random starts; starts run in parallel.
/// Evaluations are summed over starts.
pub fn optimize_from_random(problem: &Problem, config: &VqeConfig, budget: u64) -> Result<OptimResult> {
    let runs = (0..config.starts as u64)
        .into_par_iter()
        .map(|k| {
            let seed = derive_seed(config.seed, &[0x5eed, k]);
            let x0 = random_parameters(problem.parameter_count(), seed);
            let r = optimize(problem, &x0, config, budget, derive_seed(seed, &[1]))?;
            let e = problem.energy(&r.params)?;
            Ok((e, r))
        })
        .collect::<Result<Vec<_>>>()?;
    let total: u64 = runs.iter().map(|r| r.1.evaluations).sum();
    let (_, mut best) = runs
        .into_iter()
        .min_by(|a, b| a.0.total_cmp(&b.0))
        .expect("at least one start");
    best.evaluations = total;
    Ok(best)
}

/// Energy, current and entropy of a state.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Observables {
    pub energy: f64,
    pub current: f64,
    pub entropy: f64,
}

pub fn observables_from_state(
    state: &Statevector,
    hamiltonian: &PauliHamiltonian,
    current: &PauliHamiltonian,
    cut: &[usize],
) -> Result<Observables> {
    Ok(Observables {
        energy: hamiltonian.expectation(state)?,
        current: current.expectation(state)?,
        entropy: reduced_entropy(state, cut)?,
    })
}

/// Parameter file: one `index value` line per slot, full precision.
pub fn params_to_text(params: &[f64]) -> String {
    params
        .iter()
        .enumerate()
        .map(|(k, v)| format!("{} {:.17e}\n", k, v))
        .collect()
}

/// Inverse of [`params_to_text`]; `#` lines and blank lines are skipped,
/// indices must cover `0..n` exactly once.
pub fn params_from_text(text: &str) -> Result<Vec<f64>> {
    let mut pairs = Vec::new();
    for (k, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let err = |m: &str| Error::Parse {
            line: k + 1,
            message: m.into(),
        };
        let mut it = line.split_whitespace();
        let idx: usize = it.next().and_then(|v| v.parse().ok()).ok_or_else(|| err("bad index"))?;
        let val: f64 = it.next().and_then(|v| v.parse().ok()).ok_or_else(|| err("bad value"))?;
        if it.next().is_some() {
            return Err(err("trailing fields"));
        }
        pairs.push((idx, val));
    }
    let mut out = vec![f64::NAN; pairs.len()];
    for (idx, val) in pairs {
        if idx >= out.len() || !out[idx].is_nan() {
            return Err(Error::Parse {
                line: 0,
                message: format!("slot {} duplicated or out of range", idx),
            });
        }
        out[idx] = val;
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fermion_ed::{half_chain, solve_point};

    fn su3(u: f64, v: f64, flux: f64) -> HubbardModel {
        HubbardModel::nearest_neighbor(3, 3, 1.0, u, v, flux)
    }

    #[test]
    fn zero_layer_diagonal_cost() {
        let m = HubbardModel::nearest_neighbor(3, 3, 0.0, 5.0, 1.0, 0.0);
        let s = SpinSector::uniform(3, 1);
        let p = Problem::new(&m, &s, 0).unwrap();
        // all three fermions on site 0
        let e = p.energy(&[0.4, 1.0, -2.0]).unwrap();
        assert!((e - 15.0).abs() < 1e-12);
    }

    #[test]
    fn cost_periodicity() {
        let m = su3(5.0, 0.0, 0.2);
        let s = SpinSector::uniform(3, 1);
        let p = Problem::new(&m, &s, 1).unwrap();
        let x = random_parameters(p.parameter_count(), 3);
        let e = p.energy(&x).unwrap();
        for (k, g) in p.circuit.gates().iter().enumerate() {
            if let Some(slot) = g.slot() {
                if matches!(g, Gate::Rz { .. } | Gate::Crz { .. }) && k % 3 == 0 {
                    let mut y = x.clone();
                    y[slot] += 2.0 * PI;
                    assert!((p.energy(&y).unwrap() - e).abs() < 1e-10);
                }
            }
        }
    }

    #[test]
    fn gradients_agree() {
        let m = su3(5.0, 0.5, 0.13);
        let s = SpinSector::uniform(3, 1);
        let p = Problem::new(&m, &s, 2).unwrap();
        let x = random_parameters(p.parameter_count(), 7);
        let a = p.gradient_fd(&x).unwrap();
        let b = p.gradient_adjoint(&x).unwrap();
        for (u, v) in a.iter().zip(&b) {
            assert!((u - v).abs() < 1e-6, "{} {}", u, v);
        }
    }

    #[test]
    fn ed_state_observables() {
        let m = su3(1.0, 0.5, 0.3);
        let s = SpinSector::uniform(3, 1);
        let p = Problem::new(&m, &s, 0).unwrap();
        let cut = half_chain(9);
        let ed = solve_point(&m, &s, &cut).unwrap();
        let basis = crate::fermion_ed::enumerate_sector_basis(3, &s).unwrap();
        let psi = basis.embed(&ed.vector).unwrap();
        let o = p.observables(&psi, &cut).unwrap();
        assert!((o.energy - ed.energy).abs() < 1e-9);
        assert!((o.current - ed.current).abs() < 1e-9);
        assert!((o.entropy - ed.entropy).abs() < 1e-9);
    }

    #[test]
    fn optimized_energy_is_an_upper_bound() {
        let m = su3(2.0, 0.0, 0.0);
        let s = SpinSector::uniform(3, 1);
        let p = Problem::new(&m, &s, 1).unwrap();
        let cfg = VqeConfig {
            layers: 1,
            starts: 2,
            gradient: GradientMethod::Adjoint,
            ..Default::default()
        };
        let r = optimize_from_random(&p, &cfg, 20_000).unwrap();
        let ed = solve_point(&m, &s, &half_chain(9)).unwrap();
        assert!(p.energy(&r.params).unwrap() >= ed.energy - 1e-9);
        // real Hamiltonian at zero flux: the optimum carries no current
        let st = p.state(&r.params).unwrap();
        assert!(p.current.expectation(&st).unwrap().abs() < 1e-3);
    }

    #[test]
    fn sampled_nft_runs_deterministically() {
        let m = su3(1.0, 0.0, 0.0);
        let s = SpinSector::uniform(3, 1);
        let p = Problem::new(&m, &s, 1).unwrap();
        let cfg = VqeConfig {
            layers: 1,
            optimizer: OptimizerKind::Nft,
            mode: CostMode::Sampled { shots: 256 },
            ..Default::default()
        };
        let x0 = random_parameters(p.parameter_count(), 1);
        let a = optimize(&p, &x0, &cfg, 600, 9).unwrap();
        let b = optimize(&p, &x0, &cfg, 600, 9).unwrap();
        assert_eq!(a, b);
        assert!(a.evaluations <= 600);
        assert!(p.energy(&a.params).unwrap() < p.energy(&x0).unwrap());
    }

    #[test]
    fn config_checks() {
        let mut c = VqeConfig::default();
        assert!(c.check().is_ok());
        c.mode = CostMode::Sampled { shots: 10 };
        assert!(c.check().is_err());
        c.optimizer = OptimizerKind::Nft;
        assert!(c.check().is_ok());
        c.mode = CostMode::Sampled { shots: 0 };
        assert!(c.check().is_err());
        c.mode = CostMode::Exact;
        c.tolerance = 0.0;
        assert!(c.check().is_err());
    }

    #[test]
    fn parameter_text_round_trip() {
        let x = random_parameters(17, 4);
        assert_eq!(params_from_text(&params_to_text(&x)).unwrap(), x);
        assert!(params_from_text("0 1.0\n0 2.0").is_err());
        assert!(params_from_text("1 1.0").is_err());
        assert!(params_from_text("0 x").is_err());
    }
}
