//! Verification harness: reference interpreter, OpenQASM interpreter over a
//! state-vector simulator, and the differential check between them.

mod differential;
mod exec;
mod interp;
mod prng;
mod reference;
mod statevector;

pub use crate::qasm::parse_qasm;
pub use differential::{check_typed, differential_check, BlockCheck, CheckOptions, CheckRun, DiffReport, Verdict, TOLERANCE};
pub use exec::{Branch, ExecutionResult, Measurement, Mode, TraceEntry, MAX_BRANCHES, PRUNE_BELOW};
pub use interp::{interpret_qasm, STEP_LIMIT};
pub use prng::Prng;
pub use reference::{reference_eval, reference_run, FoundScript, ReferenceRun};
pub use statevector::{Gate, StateVector, MAX_QUBITS};
