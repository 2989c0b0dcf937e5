//! CNOT count, depth and parameter count of the layered ansatz, counted on
//! built circuits and compared with the closed forms.

use sunvqe::ansatz::{complexity_report, counted_complexity, AnsatzSpec};
use sunvqe::{HubbardModel, SpinSector};

fn main() -> sunvqe::Result<()> {
    println!(
        "{:>3}{:>3}  {:>7}{:>7}{:>7}  per layer",
        "N", "L", "CNOT", "depth", "params"
    );
    for n in 1..=5 {
        for l in 2..=6 {
            let model = HubbardModel::nearest_neighbor(l, n, 1.0, 0.0, 0.0, 0.0);
            let sector = SpinSector::uniform(n, 1);
            let counted = counted_complexity(&AnsatzSpec::new(&model, &sector, 1))?;
            assert_eq!(counted, complexity_report(n, l, 1, n));
            println!(
                "{:>3}{:>3}  {:>7}{:>7}{:>7}  {}",
                n, l, counted.cnot_count, counted.depth, counted.parameter_count, counted.parameters_per_layer
            );
        }
    }
    Ok(())
}
