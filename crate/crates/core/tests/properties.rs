mod common;

use num_complex::Complex64;
use proptest::prelude::*;

use cliq::diag::SourceModule;
use cliq::frontend::{analyze, parse_module};
use cliq::mapping::{default_rules, load_mapping};
use cliq::optimizer::OptimizeMode;
use cliq::qasm::{emit_qasm, parse_qasm};
use cliq::qplp::{grover_oracle, GroverParams};
use cliq::value::Value;
use cliq::verifier::{differential_check, interpret_qasm, reference_eval, CheckOptions, Gate, Mode, StateVector};

#[derive(Clone, Debug)]
enum E {
    Lit(i32),
    Var(usize),
    Neg(Box<E>),
    Bin(&'static str, Box<E>, Box<E>),
}

const VARS: [(&str, i32); 3] = [("p", 7), ("q", -3), ("r", 40000)];

impl E {
    fn text(&self) -> String {
        match self {
            E::Lit(v) if *v < 0 => format!("({v})"),
            E::Lit(v) => v.to_string(),
            E::Var(i) => VARS[*i].0.to_string(),
            E::Neg(e) => format!("-({})", e.text()),
            E::Bin(op, a, b) => format!("({} {op} {})", a.text(), b.text()),
        }
    }

    /// Independent evaluator: 32-bit wrapping, floor division; `None` on division by zero.
    fn eval(&self) -> Option<i32> {
        Some(match self {
            E::Lit(v) => *v,
            E::Var(i) => VARS[*i].1,
            E::Neg(e) => e.eval()?.wrapping_neg(),
            E::Bin(op, a, b) => {
                let (x, y) = (a.eval()?, b.eval()?);
                match *op {
                    "+" => x.wrapping_add(y),
                    "-" => x.wrapping_sub(y),
                    "*" => x.wrapping_mul(y),
                    "//" | "%" => {
                        if y == 0 {
                            return None;
                        }
                        let (mut q, mut r) = (x.wrapping_div(y), x.wrapping_rem(y));
                        if r != 0 && ((r < 0) != (y < 0)) {
                            q = q.wrapping_sub(1);
                            r = r.wrapping_add(y);
                        }
                        if *op == "//" {
                            q
                        } else {
                            r
                        }
                    }
                    _ => unreachable!(),
                }
            }
        })
    }
}

fn expr() -> impl Strategy<Value = E> {
    let leaf = prop_oneof![(-60i32..60).prop_map(E::Lit), (0usize..3).prop_map(E::Var)];
    leaf.prop_recursive(5, 32, 2, |inner| {
        prop_oneof![
            inner.clone().prop_map(|e| E::Neg(Box::new(e))),
            (prop::sample::select(vec!["+", "-", "*", "//", "%"]), inner.clone(), inner).prop_map(|(op, a, b)| E::Bin(
                op,
                Box::new(a),
                Box::new(b)
            )),
        ]
    })
}

/// Variables are reassigned so they are not compile-time constants.
fn program(e: &E) -> String {
    let mut s = String::new();
    for (name, v) in VARS {
        s.push_str(&format!("{name} = 0\n{name} = {v}\n"));
    }
    s.push_str(&format!("print({})\n", e.text()));
    s
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn arithmetic_agrees_with_oracle(e in expr()) {
        let src = SourceModule::new("e.cliq", program(&e));
        let tp = analyze(&src).unwrap();
        let reference = reference_eval(&tp);
        let run = differential_check(&src, &CheckOptions::default()).unwrap();
        match e.eval() {
            Some(v) => {
                let expect = [Some(Value::Int(v))];
                let r = reference.unwrap();
                prop_assert_eq!(r.outputs().unwrap(), &expect[..]);
                let x = run.result.unwrap();
                prop_assert_eq!(x.outputs().unwrap(), &expect[..]);
            }
            None => {
                prop_assert_eq!(reference.unwrap_err().code, "E060");
                prop_assert_eq!(run.result.unwrap_err().code, "E060");
            }
        }
        prop_assert!(run.report.passed());
    }

    #[test]
    fn translation_round_trips(e in expr(), k in 1i32..6) {
        let text = format!("{}t = 0\nfor i in range(0, {k}):\n    if i % 2 == 0:\n        t += {}\n    else:\n        t -= i\nprint(t)\n", program(&E::Lit(0)), e.text());
        let src = SourceModule::new("r.cliq", text);
        let t = cliq::translate(&src, &default_rules(), &OptimizeMode::ReportOnly).unwrap();
        let back = parse_qasm(&t.qasm).unwrap();
        prop_assert_eq!(&back, &t.program);
        prop_assert_eq!(emit_qasm(&back), t.qasm);
    }

    #[test]
    fn parsing_is_deterministic(e in expr()) {
        let src = SourceModule::new("d.cliq", program(&e));
        prop_assert_eq!(parse_module(&src).unwrap(), parse_module(&src).unwrap());
    }

    #[test]
    fn mapping_round_trips(swap in prop::collection::vec(any::<bool>(), 4)) {
        let mut rules = default_rules();
        let keys: [(&str, &[&str]); 4] = [("binop.add", &["int", "int"]), ("binop.sub", &["int", "int"]), ("binop.mul", &["-"]), ("cmp.lt", &["-"])];
        for (on, (kind, sig)) in swap.iter().zip(keys) {
            if *on {
                rules = rules.with_template(kind, sig, "({1} ?? {0}) \\ x").unwrap();
            }
        }
        let again = load_mapping(&rules.to_text()).unwrap();
        prop_assert_eq!(again, rules);
    }
}

fn gate_seq() -> impl Strategy<Value = (usize, Vec<(u8, Vec<usize>, usize)>)> {
    (1usize..=5).prop_flat_map(|n| {
        let op = (0u8..3, prop::collection::vec(0..n, 0..n), 0..n);
        (Just(n), prop::collection::vec(op, 0..40))
    })
}

fn apply(sv: &mut StateVector, (g, controls, target): &(u8, Vec<usize>, usize)) {
    let gate = [Gate::H, Gate::X, Gate::Z][*g as usize];
    let mut cs: Vec<usize> = controls.iter().copied().filter(|c| c != target).collect();
    cs.sort();
    cs.dedup();
    sv.apply(gate, &cs, *target);
}

fn random_state(n: usize, seed: &[f64]) -> StateVector {
    let amps: Vec<Complex64> =
        (0..1 << n).map(|i| Complex64::new(seed[i % seed.len()] + 0.01 * i as f64, seed[(i + 1) % seed.len()])).collect();
    let norm = amps.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
    StateVector::from_amplitudes(amps.into_iter().map(|a| a / norm).collect())
}

fn close(a: &StateVector, b: &StateVector) -> bool {
    a.amplitudes().iter().zip(b.amplitudes()).all(|(x, y)| (x - y).norm() < 1e-10)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn gates_preserve_norm((n, ops) in gate_seq()) {
        let mut sv = StateVector::new(n);
        for op in &ops {
            apply(&mut sv, op);
            prop_assert!((sv.norm_sqr() - 1.0).abs() < 1e-10);
        }
    }

    #[test]
    fn gates_are_involutions((n, ops) in gate_seq(), seed in prop::collection::vec(-1.0f64..1.0, 1..8)) {
        let start = random_state(n, &seed);
        for op in &ops {
            let mut sv = start.clone();
            apply(&mut sv, op);
            apply(&mut sv, op);
            prop_assert!(close(&sv, &start));
        }
    }

    #[test]
    fn circuits_are_unitary((n, ops) in gate_seq(), seed in prop::collection::vec(-1.0f64..1.0, 1..8)) {
        let start = random_state(n, &seed);
        let mut sv = start.clone();
        for op in &ops {
            apply(&mut sv, op);
        }
        for op in ops.iter().rev() {
            apply(&mut sv, op);
        }
        prop_assert!(close(&sv, &start));
    }

    #[test]
    fn oracle_flips_exactly_the_marked((n, mask) in (1usize..=5).prop_flat_map(|n| (Just(n), prop::collection::vec(any::<bool>(), 1 << n))),
                                       seed in prop::collection::vec(-1.0f64..1.0, 1..8)) {
        let marked: Vec<usize> = mask.iter().enumerate().filter(|(_, m)| **m).map(|(i, _)| i).collect();
        let params = GroverParams { n, marked: marked.clone(), k: 0 };
        let oracle = grover_oracle(&params, "q");
        let start = random_state(n, &seed);
        let mut once = start.clone();
        common::apply_gates(&mut once, &oracle);
        for (i, (a, b)) in once.amplitudes().iter().zip(start.amplitudes()).enumerate() {
            let expect = if marked.contains(&i) { -b } else { *b };
            prop_assert!((a - expect).norm() < 1e-10);
        }
        let mut twice = once;
        common::apply_gates(&mut twice, &oracle);
        prop_assert!(close(&twice, &start));
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn sampling_is_a_function_of_the_seed(seed in any::<u64>(), shots in 1u64..400) {
        let qp = parse_qasm("OPENQASM 3.0;\ninclude \"stdgates.inc\";\nqubit[2] q;\nbit[2] c;\nh q;\nc = measure q;\n").unwrap();
        let mode = Mode::Sampled { shots, seed };
        let a = interpret_qasm(&qp, mode).unwrap();
        let b = interpret_qasm(&qp, mode).unwrap();
        prop_assert_eq!(&a, &b);
        prop_assert_eq!(a.branches.iter().map(|b| b.count.unwrap()).sum::<u64>(), shots);
    }
}
