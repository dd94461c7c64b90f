#![allow(dead_code)]

use std::path::{Path, PathBuf};

use cliq::diag::SourceModule;
use cliq::qasm::{GateOp, QStmt};
use cliq::verifier::{Gate, StateVector};

pub fn corpus_dir(kind: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/corpus").join(kind)
}

/// `(file name, source)` for every `.cliq` file under `tests/corpus/<kind>`, sorted.
pub fn corpus(kind: &str) -> Vec<(String, SourceModule)> {
    let mut out: Vec<_> = std::fs::read_dir(corpus_dir(kind))
        .expect("corpus directory")
        .map(|e| e.unwrap().path())
        .filter(|p| p.extension().is_some_and(|x| x == "cliq"))
        .collect();
    out.sort();
    out.into_iter()
        .map(|p| {
            let name = p.file_name().unwrap().to_string_lossy().into_owned();
            let text = std::fs::read_to_string(&p).unwrap();
            (name.clone(), SourceModule::new(name, text))
        })
        .collect()
}

/// Applies the gate statements of a single-register circuit directly to `sv`,
/// bypassing the interpreter. Whole-register operands broadcast.
pub fn apply_gates(sv: &mut StateVector, stmts: &[QStmt]) {
    for s in stmts {
        let QStmt::Gate(GateOp { name, ctrl, operands }) = s else { panic!("not a gate: {s:?}") };
        let gate = match name.as_str() {
            "h" => Gate::H,
            "x" => Gate::X,
            "z" => Gate::Z,
            "cx" => {
                let q: Vec<usize> = operands.iter().map(|a| a.index.unwrap()).collect();
                sv.apply(Gate::X, &q[..q.len() - 1], q[q.len() - 1]);
                continue;
            }
            other => panic!("unexpected gate {other}"),
        };
        if operands.len() == 1 && operands[0].index.is_none() {
            assert_eq!(*ctrl, 0);
            for b in 0..sv.qubits() {
                sv.apply(gate, &[], b);
            }
            continue;
        }
        let q: Vec<usize> = operands.iter().map(|a| a.index.unwrap()).collect();
        let (controls, target) = q.split_at(q.len() - 1);
        assert_eq!(controls.len(), *ctrl);
        sv.apply(gate, controls, target[0]);
    }
}
