//! Half-chain entropy of optimized states against the exact ground state,
//! layer by layer.

use sunvqe::vqe::{sweep_flux, GradientMethod, SweepOptions, VqeConfig};
use sunvqe::{HubbardModel, SpinSector};

fn main() -> sunvqe::Result<()> {
    let model = HubbardModel::nearest_neighbor(3, 3, 1.0, 1.0, 0.5, 0.0);
    let sector = SpinSector::uniform(3, 1);
    let grid = [0.0, 0.1, 0.2, 0.3];
    println!("{:>7}{:>8}{:>11}{:>11}{:>12}", "layers", "phi", "S_vqe", "S_ed", "dE");
    for layers in 1..=3 {
        let config = VqeConfig {
            layers,
            gradient: GradientMethod::Adjoint,
            ..Default::default()
        };
        let r = sweep_flux(&model, &sector, &grid, &config, &SweepOptions::default())?;
        for p in &r.points {
            println!(
                "{:>7}{:>8.2}{:>11.5}{:>11.5}{:>12.2e}",
                layers,
                p.flux,
                p.entropy_vqe,
                p.entropy_ed,
                p.energy_vqe - p.energy_ed
            );
        }
    }
    Ok(())
}
