//! Measurement groups of the SU(3) ring and the shot-noise scaling of the
//! grouped energy estimator.

use sunvqe::ansatz::{build_ansatz, AnsatzSpec};
use sunvqe::measurement::{estimate_energy, group_terms};
use sunvqe::vqe::random_parameters;
use sunvqe::{jw, HubbardModel, SpinSector};

fn main() -> sunvqe::Result<()> {
    let model = HubbardModel::nearest_neighbor(3, 3, 1.0, 5.0, 0.0, 0.3);
    let sector = SpinSector::uniform(3, 1);
    let h = jw::build_qubit_hamiltonian(&model, &sector)?;
    let grouping = group_terms(&h, &model, &sector)?;
    for g in &grouping.groups {
        let bonds: Vec<String> = g
            .basis_change()
            .iter()
            .map(|gate| format!("{:?}", gate.qubits()))
            .collect();
        println!(
            "{:<14} {:>3} terms  rotations on {}",
            g.label.name(),
            g.terms.len(),
            bonds.join(" ")
        );
    }

    let circuit = build_ansatz(&AnsatzSpec::new(&model, &sector, 2))?;
    let state = circuit.run(&random_parameters(circuit.parameter_count(), 5), 0)?;
    let exact = h.expectation(&state)?;
    println!(
        "\nexact energy {:.8}, infinite-shot grouped value {:.8}",
        exact,
        grouping.exact_energy(&state)
    );
    println!("{:>8}{:>14}{:>12}{:>10}", "shots", "mean", "stderr", "z");
    for shots in [512u64, 2048, 8192, 32768] {
        let e = estimate_energy(&state, &grouping, shots, 17)?;
        println!(
            "{:>8}{:>14.6}{:>12.6}{:>10.2}",
            shots,
            e.mean,
            e.stderr,
            (e.mean - exact) / e.stderr
        );
    }
    Ok(())
}
