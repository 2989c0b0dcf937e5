//! Flux sweeps with warm starts.

use crate::error::{Error, Result};
use crate::fermion_ed::{half_chain, solve_point};
use crate::lattice::{HubbardModel, SpinSector};

use super::{optimize, optimize_from_random, Problem, VqeConfig};

/// Mirror tolerance when matching `φ` with `1 - φ`.
const MIRROR_MATCH: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq, Default)]
pub struct SweepOptions {
    /// Copy points above one half from their mirror image when available.
    pub mirror: bool,
    /// Entropy bipartition; defaults to the first `⌊N·L/2⌋` qubits.
    pub cut: Option<Vec<usize>>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepPoint {
    pub flux: f64,
    pub params: Vec<f64>,
    pub energy_vqe: f64,
    pub energy_ed: f64,
    pub current_vqe: f64,
    pub current_ed: f64,
    pub entropy_vqe: f64,
    pub entropy_ed: f64,
    /// Final optimizer cost (a shot estimate in sampled mode).
    pub cost: f64,
    pub evaluations: u64,
    pub converged: bool,
    pub mirrored: bool,
    pub at_crossing: bool,
}

impl SweepPoint {
    pub fn relative_error(&self) -> f64 {
        (self.energy_vqe - self.energy_ed).abs() / self.energy_ed.abs().max(f64::MIN_POSITIVE)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepResult {
    pub layers: usize,
    pub seed: u64,
    pub points: Vec<SweepPoint>,
}

impl SweepResult {
    pub fn max_relative_error(&self) -> f64 {
        self.points.iter().map(|p| p.relative_error()).fold(0.0, f64::max)
    }

    pub fn all_converged(&self) -> bool {
        self.points.iter().all(|p| p.converged)
    }
}

/// `count` equally spaced points `k / count` on `[0, 1)`.
pub fn uniform_grid(count: usize) -> Vec<f64> {
    (0..count).map(|k| k as f64 / count as f64).collect()
}

fn check_grid(grid: &[f64]) -> Result<()> {
    if grid.is_empty() {
        return Err(Error::range("grid", "empty"));
    }
    if grid.iter().any(|&f| !(0.0..1.0).contains(&f)) {
        return Err(Error::range("grid", "points must lie in [0, 1)"));
    }
    if grid.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::range("grid", "must be strictly increasing"));
    }
    Ok(())
}

/// Optimizes along the grid. The first point starts from the random
/// initialization policy, every later point from the previous optimum.
/// The point at `φ = 1/2` gets twice the evaluation budget.
pub fn sweep_flux(
    model: &HubbardModel,
    sector: &SpinSector,
    grid: &[f64],
    config: &VqeConfig,
    options: &SweepOptions,
) -> Result<SweepResult> {
    check_grid(grid)?;
    config.check()?;
    let cut = options.cut.clone().unwrap_or_else(|| half_chain(model.qubits()));
    let mut points: Vec<SweepPoint> = Vec::with_capacity(grid.len());
    for (k, &flux) in grid.iter().enumerate() {
        let m = model.with_flux(flux);
        let problem = Problem::new(&m, sector, config.layers)?;
        let ed = solve_point(&m, sector, &cut)?;
        let mirror = if options.mirror && flux > 0.5 {
            points
                .iter()
                .find(|p| (p.flux - (1.0 - flux)).abs() < MIRROR_MATCH)
                .cloned()
        } else {
            None
        };
        let point = if let Some(src) = mirror {
            SweepPoint {
                flux,
                params: problem.mirror_parameters(&src.params),
                energy_ed: ed.energy,
                current_ed: ed.current,
                entropy_ed: ed.entropy,
                current_vqe: -src.current_vqe,
                evaluations: 0,
                mirrored: true,
                at_crossing: ed.at_crossing,
                ..src
            }
        } else {
            let budget = if (flux - 0.5).abs() < 1e-12 {
                2 * config.budget()
            } else {
                config.budget()
            };
            let seed = crate::rng::derive_seed(config.seed, &[k as u64]);
            let r = match points.last() {
                None => optimize_from_random(&problem, config, budget)?,
                Some(prev) => optimize(&problem, &prev.params, config, budget, seed)?,
            };
            let obs = problem.observables(&problem.state(&r.params)?, &cut)?;
            SweepPoint {
                flux,
                energy_vqe: obs.energy,
                current_vqe: obs.current,
                entropy_vqe: obs.entropy,
                energy_ed: ed.energy,
                current_ed: ed.current,
                entropy_ed: ed.entropy,
                cost: r.value,
                evaluations: r.evaluations,
                converged: r.converged,
                mirrored: false,
                at_crossing: ed.at_crossing,
                params: r.params,
            }
        };
        points.push(point);
    }
    Ok(SweepResult {
        layers: config.layers,
        seed: config.seed,
        points,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::vqe::GradientMethod;

    #[test]
    fn grid_validation() {
        assert!(check_grid(&[0.0, 0.5]).is_ok());
        assert!(check_grid(&[0.0, 0.0]).is_err());
        assert!(check_grid(&[0.5, 1.0]).is_err());
        assert!(check_grid(&[]).is_err());
        assert_eq!(uniform_grid(4), vec![0.0, 0.25, 0.5, 0.75]);
    }

    #[test]
    fn single_point_and_mirror() {
        let m = HubbardModel::nearest_neighbor(3, 2, 1.0, 2.0, 0.0, 0.0);
        let s = SpinSector::uniform(2, 1);
        let cfg = VqeConfig {
            layers: 2,
            starts: 2,
            seed: 3,
            gradient: GradientMethod::Adjoint,
            ..Default::default()
        };
        let grid = [0.0, 0.25, 0.75];
        let r = sweep_flux(
            &m,
            &s,
            &grid,
            &cfg,
            &SweepOptions {
                mirror: true,
                cut: None,
            },
        )
        .unwrap();
        assert_eq!(r.points.len(), 3);
        let (a, b) = (&r.points[1], &r.points[2]);
        assert!(b.mirrored);
        assert_eq!(a.energy_vqe, b.energy_vqe);
        assert_eq!(a.current_vqe, -b.current_vqe);
        // the mirrored angles prepare a state of the same energy at 1 - φ
        let p = Problem::new(&m.with_flux(0.75), &s, 2).unwrap();
        let st = p.state(&b.params).unwrap();
        assert!((p.hamiltonian.expectation(&st).unwrap() - b.energy_vqe).abs() < 1e-10);
        assert!((p.current.expectation(&st).unwrap() - b.current_vqe).abs() < 1e-10);
        let again = sweep_flux(
            &m,
            &s,
            &grid,
            &cfg,
            &SweepOptions {
                mirror: true,
                cut: None,
            },
        )
        .unwrap();
        assert_eq!(r, again);
    }
}
