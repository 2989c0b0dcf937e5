//! Sequential sinusoidal optimization of a one-layer ansatz driven by
//! sampled energies.

use sunvqe::fermion_ed::{half_chain, solve_point};
use sunvqe::vqe::{optimize, random_parameters, CostMode, OptimizerKind, Problem, VqeConfig};
use sunvqe::{HubbardModel, SpinSector};

fn main() -> sunvqe::Result<()> {
    let model = HubbardModel::nearest_neighbor(3, 3, 1.0, 0.5, 0.2, 0.1);
    let sector = SpinSector::uniform(3, 1);
    let problem = Problem::new(&model, &sector, 1)?;
    let exact = solve_point(&model, &sector, &half_chain(9))?.energy;
    let x0 = random_parameters(problem.parameter_count(), 4);
    println!(
        "start energy {:.6}, exact ground energy {:.6}",
        problem.energy(&x0)?,
        exact
    );
    for (budget, two_harmonic) in [(2_000, false), (8_000, false), (8_000, true)] {
        let config = VqeConfig {
            layers: 1,
            optimizer: OptimizerKind::Nft,
            mode: CostMode::Sampled { shots: 8192 },
            two_harmonic,
            ..Default::default()
        };
        let r = optimize(&problem, &x0, &config, budget, 1)?;
        let e = problem.energy(&r.params)?;
        println!(
            "budget {:>6} {:<11} energy {:.6} (relative deviation {:.3})",
            budget,
            if two_harmonic { "five-point" } else { "three-point" },
            e,
            (e - exact).abs() / exact.abs()
        );
    }
    Ok(())
}
