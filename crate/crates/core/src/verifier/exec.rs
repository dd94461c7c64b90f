//! Outcome-tree execution shared by the interpreters.
//!
//! A run is replayed from the start with a script of measurement choices.
//! When it reaches a measurement with more than one possible outcome and the
//! script is exhausted, it stops and reports the options; the drivers below
//! extend the script and run again.

use std::collections::{BTreeMap, HashMap};

use serde::Serialize;

use crate::diag::{Diagnostic, Span};
use crate::value::Value;

use super::prng::Prng;

/// Outcomes at or below this probability are not explored.
pub const PRUNE_BELOW: f64 = 1e-12;

/// Exact mode gives up past this many leaves.
pub const MAX_BRANCHES: usize = 1 << 16;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase", tag = "kind")]
pub enum Mode {
    Exact,
    Sampled { shots: u64, seed: u64 },
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Measurement {
    pub register: String,
    pub outcome: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Branch {
    /// Choices taken at non-deterministic measurements, in order.
    pub choices: Vec<usize>,
    /// Every `measure` statement executed, deterministic ones included.
    pub measurements: Vec<Measurement>,
    pub probability: f64,
    /// Shots that ended in this branch (sampled mode only).
    #[serde(skip_serializing_if = "Option::is_none")]
    pub count: Option<u64>,
    pub outputs: Vec<Option<Value>>,
}

/// Distribution observed at one `measure` statement.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct TraceEntry {
    pub after: Vec<usize>,
    pub register: String,
    pub distribution: Vec<(usize, f64)>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ExecutionResult {
    pub mode: Mode,
    pub output_names: Vec<String>,
    pub branches: Vec<Branch>,
    pub quantum_trace: Vec<TraceEntry>,
}

impl ExecutionResult {
    /// Outputs shared by every branch, if they agree.
    pub fn outputs(&self) -> Option<&[Option<Value>]> {
        let first = &self.branches.first()?.outputs;
        self.branches.iter().all(|b| b.outputs == *first).then_some(first.as_slice())
    }

    pub fn total_probability(&self) -> f64 {
        self.branches.iter().map(|b| b.probability).sum()
    }

    /// Human-readable listing, one line per output and per branch.
    pub fn render(&self) -> String {
        let mut out = String::new();
        let line = |outputs: &[Option<Value>]| {
            self.output_names
                .iter()
                .zip(outputs)
                .map(|(n, v)| format!("{n}={}", v.as_ref().map_or("<unset>".into(), |v| v.to_string())))
                .collect::<Vec<_>>()
                .join(" ")
        };
        if self.quantum_trace.is_empty() && self.branches.len() == 1 {
            out.push_str(&line(&self.branches[0].outputs));
            out.push('\n');
            return out;
        }
        for b in &self.branches {
            let ms: Vec<String> = b.measurements.iter().map(|m| format!("{}={}", m.register, m.outcome)).collect();
            match b.count {
                Some(c) => out.push_str(&format!("count={c} ")),
                None => out.push_str(&format!("p={:.12} ", b.probability)),
            }
            out.push_str(&format!("[{}] {}\n", ms.join(" "), line(&b.outputs)));
        }
        out
    }
}

/// Where a run stopped.
#[derive(Debug)]
pub enum Step {
    Done { outputs: Vec<Option<Value>>, measurements: Vec<Measurement> },
    Pending { options: Vec<(usize, f64)> },
}

/// Interrupts evaluation: a runtime error or a choice the script lacks.
#[derive(Debug)]
pub enum Halt {
    Error(Diagnostic),
    Pending(Vec<(usize, f64)>),
}

impl From<Diagnostic> for Halt {
    fn from(d: Diagnostic) -> Self {
        Halt::Error(d)
    }
}

pub fn runtime(msg: impl Into<String>, span: Span) -> Halt {
    Halt::Error(Diagnostic::error("E060", msg, span))
}

/// Per-run measurement bookkeeping.
#[derive(Debug)]
pub struct Chooser<'a> {
    script: &'a [usize],
    pos: usize,
    ordinal: usize,
    pub measurements: Vec<Measurement>,
    pub trace: Vec<((Vec<usize>, usize), TraceEntry)>,
}

impl<'a> Chooser<'a> {
    pub fn new(script: &'a [usize]) -> Self {
        Chooser { script, pos: 0, ordinal: 0, measurements: vec![], trace: vec![] }
    }

    /// Picks an outcome from a full distribution over `dist.len()` outcomes.
    /// `register` is recorded when the choice comes from a `measure`.
    pub fn choose(&mut self, dist: &[f64], register: Option<&str>) -> Result<usize, Halt> {
        let options: Vec<(usize, f64)> = dist.iter().copied().enumerate().filter(|(_, p)| *p > PRUNE_BELOW).collect();
        if options.is_empty() {
            return Err(runtime("measurement on a zero state", Span::default()));
        }
        if let Some(r) = register {
            let after = self.script[..self.pos].to_vec();
            let entry = TraceEntry { after: after.clone(), register: r.to_string(), distribution: options.clone() };
            self.trace.push(((after, self.ordinal), entry));
            self.ordinal += 1;
        }
        let outcome = if options.len() == 1 {
            options[0].0
        } else if let Some(&o) = self.script.get(self.pos) {
            self.pos += 1;
            o
        } else {
            return Err(Halt::Pending(options));
        };
        if let Some(r) = register {
            self.measurements.push(Measurement { register: r.to_string(), outcome });
        }
        Ok(outcome)
    }
}

pub(crate) type TraceMap = BTreeMap<(Vec<usize>, usize), TraceEntry>;

/// One replay of the program under a choice script.
pub(crate) type Replay<'a> = dyn FnMut(&[usize], &mut TraceMap) -> Result<Step, Diagnostic> + 'a;

/// Runs every branch with probability above the pruning threshold.
pub fn explore_exact(run: &mut Replay<'_>) -> Result<(Vec<Branch>, Vec<TraceEntry>), Diagnostic> {
    let mut trace = TraceMap::new();
    let mut leaves = vec![];
    let mut stack = vec![(vec![], 1.0)];
    while let Some((prefix, p)) = stack.pop() {
        match run(&prefix, &mut trace)? {
            Step::Done { outputs, measurements } => {
                leaves.push(Branch { choices: prefix, measurements, probability: p, count: None, outputs });
                if leaves.len() > MAX_BRANCHES {
                    return Err(Diagnostic::error(
                        "E060",
                        format!("more than {MAX_BRANCHES} measurement branches; use sampled mode"),
                        Span::default(),
                    ));
                }
            }
            Step::Pending { options } => {
                for &(o, q) in options.iter().rev() {
                    if p * q > PRUNE_BELOW {
                        let mut next = prefix.clone();
                        next.push(o);
                        stack.push((next, p * q));
                    }
                }
            }
        }
    }
    Ok((leaves, trace.into_values().collect()))
}

enum Node {
    Leaf(usize),
    Split(Vec<(usize, f64)>),
}

/// Draws `shots` executions; the tree is only expanded where shots land.
/// One PRNG draw is consumed per non-deterministic measurement.
pub fn sample(run: &mut Replay<'_>, shots: u64, seed: u64) -> Result<(Vec<Branch>, Vec<TraceEntry>), Diagnostic> {
    let mut rng = Prng::new(seed);
    let mut trace = TraceMap::new();
    let mut nodes: HashMap<Vec<usize>, Node> = HashMap::new();
    let mut leaves: Vec<Branch> = vec![];
    for _ in 0..shots {
        let mut prefix = vec![];
        loop {
            if !nodes.contains_key(&prefix) {
                let node = match run(&prefix, &mut trace)? {
                    Step::Done { outputs, measurements } => {
                        leaves.push(Branch { choices: prefix.clone(), measurements, probability: 0.0, count: Some(0), outputs });
                        Node::Leaf(leaves.len() - 1)
                    }
                    Step::Pending { options } => Node::Split(options),
                };
                nodes.insert(prefix.clone(), node);
            }
            match &nodes[&prefix] {
                Node::Leaf(i) => {
                    *leaves[*i].count.as_mut().unwrap() += 1;
                    break;
                }
                Node::Split(options) => {
                    let o = rng.pick(options);
                    prefix.push(o);
                }
            }
        }
    }
    for b in &mut leaves {
        b.probability = b.count.unwrap() as f64 / shots as f64;
    }
    leaves.sort_by(|a, b| a.choices.cmp(&b.choices));
    Ok((leaves, trace.into_values().collect()))
}

/// Drives `run` in the given mode.
pub fn execute(mode: Mode, output_names: Vec<String>, run: &mut Replay<'_>) -> Result<ExecutionResult, Diagnostic> {
    let (branches, quantum_trace) = match mode {
        Mode::Exact => explore_exact(run)?,
        Mode::Sampled { shots, seed } => {
            if shots == 0 {
                return Err(Diagnostic::error("E060", "sampled mode needs at least one shot", Span::default()));
            }
            sample(run, shots, seed)?
        }
    };
    Ok(ExecutionResult { mode, output_names, branches, quantum_trace })
}

/// Finishes one run: records its trace and converts the halt reason.
pub fn finish(result: Result<Vec<Option<Value>>, Halt>, chooser: Chooser<'_>, trace: &mut TraceMap) -> Result<Step, Diagnostic> {
    for (k, e) in chooser.trace {
        trace.entry(k).or_insert(e);
    }
    match result {
        Ok(outputs) => Ok(Step::Done { outputs, measurements: chooser.measurements }),
        Err(Halt::Pending(options)) => Ok(Step::Pending { options }),
        Err(Halt::Error(d)) => Err(d),
    }
}
