//! Execute an OpenQASM program exactly and by seeded sampling.

use cliq::qasm::parse_qasm;
use cliq::verifier::{interpret_qasm, Mode};

const PROGRAM: &str = r#"OPENQASM 3.0;
include "stdgates.inc";
qubit[2] q;
bit[2] c;
output int[32] r;
h q[0];
cx q[0], q[1];
c = measure q;
r = int[32](c);
"#;

fn main() {
    let qp = parse_qasm(PROGRAM).unwrap_or_else(|d| panic!("{d:?}"));

    let exact = interpret_qasm(&qp, Mode::Exact).unwrap();
    println!("exact:");
    print!("{}", exact.render());

    let sampled = interpret_qasm(&qp, Mode::Sampled { shots: 10_000, seed: 7 }).unwrap();
    println!("sampled, 10000 shots, seed 7:");
    print!("{}", sampled.render());
}
