//! Quantum programming language patterns: classical block shapes paired
//! with quantum subroutine templates.

mod grover;
mod matcher;

use serde::Serialize;

pub use grover::{
    grover_circuit, grover_iterations, grover_oracle, grover_success_probability, instantiate_grover, GroverFragment, GroverNames,
    SIMULATOR_QUBIT_LIMIT,
};
pub(crate) use matcher::is_candidate;
pub use matcher::{match_block, NoMatch, SearchBinding};

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct GroverParams {
    /// Qubit count; the search space has `2^n` entries.
    pub n: usize,
    /// Marked indices, ascending.
    pub marked: Vec<usize>,
    /// Grover iteration count.
    pub k: usize,
}

impl GroverParams {
    pub fn size(&self) -> usize {
        1 << self.n
    }

    pub fn success_probability(&self) -> f64 {
        grover_success_probability(self.size(), self.marked.len(), self.k)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum PatternKind {
    /// `found = -1; for i in range(N): if a[i] == t: found = i; break`
    LinearSearch,
    Mean,
    DiscreteLog,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct QplpEntry {
    pub id: &'static str,
    pub kind: PatternKind,
    pub executable: bool,
    pub description: &'static str,
    /// The classical block shape, as written in source.
    pub shape: &'static str,
    pub reference: &'static str,
}

pub const SEARCH_ID: &str = "qplp.search.grover";

static ENTRIES: &[QplpEntry] = &[
    QplpEntry {
        id: SEARCH_ID,
        kind: PatternKind::LinearSearch,
        executable: true,
        description: "linear search over a constant array, replaced by Grover amplitude amplification",
        shape: "found = -1\nfor i in range(0, N):\n    if a[i] == target:\n        found = i\n        break",
        reference: "L. K. Grover, A fast quantum mechanical algorithm for database search, STOC 1996",
    },
    QplpEntry {
        id: "qplp.mean.estimation",
        kind: PatternKind::Mean,
        executable: false,
        description: "mean of an array via quantum mean estimation (metadata only)",
        shape: "s = 0\nfor i in range(0, N):\n    s = s + a[i]\nm = s / N",
        reference: "L. K. Grover, A framework for fast quantum mechanical algorithms, STOC 1998",
    },
    QplpEntry {
        id: "qplp.dlog.shor",
        kind: PatternKind::DiscreteLog,
        executable: false,
        description: "discrete logarithm by exhaustive exponentiation (metadata only)",
        shape: "x = 0\nwhile g ** x % p != h:\n    x = x + 1",
        reference: "P. W. Shor, Polynomial-time algorithms for prime factorization and discrete logarithms, SIAM J. Comput. 1997",
    },
];

/// The immutable pattern catalog.
#[derive(Clone, Copy, Debug)]
pub struct Catalog {
    entries: &'static [QplpEntry],
}

impl Default for Catalog {
    fn default() -> Self {
        Catalog { entries: ENTRIES }
    }
}

impl Catalog {
    pub fn entries(&self) -> &'static [QplpEntry] {
        self.entries
    }

    pub fn get(&self, id: &str) -> Option<&'static QplpEntry> {
        self.entries.iter().find(|e| e.id == id)
    }

    /// One line per entry: `id<TAB>executable<TAB>description`.
    pub fn listing(&self) -> String {
        self.entries.iter().map(|e| format!("{}\t{}\t{}\n", e.id, e.executable, e.description)).collect()
    }
}
