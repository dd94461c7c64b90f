//! Simulate the Grover circuit for every (N, M, k) up to N = 16 and compare
//! the marked-outcome mass with sin^2((2k+1) theta).

use cliq::qasm::{Decl, QStmt, QType, QasmProgram};
use cliq::qplp::{grover_circuit, grover_iterations, grover_success_probability, GroverParams};
use cliq::verifier::{interpret_qasm, Mode};

fn simulate(params: &GroverParams) -> f64 {
    let mut stmts = grover_circuit(params, "q");
    stmts.push(QStmt::Measure { bits: "c".into(), qubits: "q".into() });
    let qp = QasmProgram {
        includes: vec!["stdgates.inc".into()],
        decls: vec![Decl::new(QType::Qubit(params.n), "q"), Decl::new(QType::Bit(params.n), "c")],
        stmts,
    };
    let r = interpret_qasm(&qp, Mode::Exact).expect("circuit runs");
    r.branches.iter().filter(|b| params.marked.contains(&b.measurements[0].outcome)).map(|b| b.probability).sum()
}

fn main() {
    let mut worst = 0.0f64;
    for n in 1..=4 {
        let size = 1usize << n;
        for m in 1..=size {
            let mut marked: Vec<usize> = (0..m).map(|j| (5 * j + 3) % size).collect();
            marked.sort();
            for k in 0..=3 {
                let params = GroverParams { n, marked: marked.clone(), k };
                let sim = simulate(&params);
                let model = grover_success_probability(size, m, k);
                worst = worst.max((sim - model).abs());
            }
        }
        let k = grover_iterations(size, 1).unwrap();
        let best = grover_success_probability(size, 1, k);
        println!("N={size:2} M=1  k*={k}  p={best:.6}");
    }
    println!("largest |simulated - model| over the sweep: {worst:.3e}");
}
