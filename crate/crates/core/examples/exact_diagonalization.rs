//! Ground energy, persistent current and entropy along the flux for a free
//! and an interacting SU(3) ring.

use sunvqe::fermion_ed::{half_chain, solve_point};
use sunvqe::vqe::sweep::uniform_grid;
use sunvqe::{HubbardModel, SpinSector};

fn main() -> sunvqe::Result<()> {
    let sector = SpinSector::uniform(3, 1);
    let cut = half_chain(9);
    for (u, v) in [(0.0, 0.0), (5.0, 0.0), (5.0, 3.0)] {
        println!("U = {}, V = {}", u, v);
        println!("{:>8}{:>14}{:>14}{:>10}", "phi", "E0", "I", "S");
        let model = HubbardModel::nearest_neighbor(3, 3, 1.0, u, v, 0.0);
        for phi in uniform_grid(12) {
            let p = solve_point(&model.with_flux(phi), &sector, &cut)?;
            println!(
                "{:>8.4}{:>14.8}{:>14.8}{:>10.5}{}",
                phi,
                p.energy,
                p.current,
                p.entropy,
                if p.at_crossing { "  crossing" } else { "" }
            );
        }
        println!();
    }
    Ok(())
}
