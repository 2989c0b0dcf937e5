//! Warm-started quasi-Newton sweep of a three-layer ansatz for the
//! interacting SU(3) ring, compared against exact diagonalization.

use std::time::Instant;

use sunvqe::vqe::{sweep_flux, GradientMethod, SweepOptions, VqeConfig};
use sunvqe::{HubbardModel, SpinSector};

fn main() -> sunvqe::Result<()> {
    let model = HubbardModel::nearest_neighbor(3, 3, 1.0, 5.0, 0.0, 0.0);
    let sector = SpinSector::uniform(3, 1);
    let grid: Vec<f64> = (0..=10).map(|k| k as f64 / 20.0).collect();
    for layers in [1, 3] {
        let config = VqeConfig {
            layers,
            gradient: GradientMethod::Adjoint,
            seed: 2,
            ..Default::default()
        };
        let t = Instant::now();
        let r = sweep_flux(&model, &sector, &grid, &config, &SweepOptions::default())?;
        println!("{} layer(s), {:.1?}", layers, t.elapsed());
        println!(
            "{:>6}{:>13}{:>13}{:>11}{:>11}{:>9}",
            "phi", "E_vqe", "E_ed", "I_vqe", "I_ed", "evals"
        );
        for p in &r.points {
            println!(
                "{:>6.3}{:>13.7}{:>13.7}{:>11.5}{:>11.5}{:>9}",
                p.flux, p.energy_vqe, p.energy_ed, p.current_vqe, p.current_ed, p.evaluations
            );
        }
        println!("max relative energy error {:.2e}\n", r.max_relative_error());
    }
    Ok(())
}
