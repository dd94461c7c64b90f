//! Translate a classical program and print the OpenQASM 3.0 text.
//!
//! Run with `cargo run --example translate_basic [file.cliq]`.

use cliq::diag::SourceModule;
use cliq::mapping::default_rules;
use cliq::optimizer::OptimizeMode;

const PROGRAM: &str = "\
def gcd(a: int, b: int) -> int:
    while b != 0:
        t = a % b
        a = b
        b = t
    return a

xs = [12, 18, 27, 45]
g = xs[0]
for i in range(1, len(xs)):
    g = gcd(g, xs[i])
print(g)
print(sum(xs) / len(xs))
";

fn main() {
    let src = match std::env::args().nth(1) {
        Some(path) => {
            let bytes = std::fs::read(&path).expect("readable input");
            SourceModule::from_bytes(path, &bytes).expect("UTF-8 input")
        }
        None => SourceModule::new("gcd.cliq", PROGRAM),
    };
    match cliq::translate(&src, &default_rules(), &OptimizeMode::ReportOnly) {
        Ok(t) => print!("{}", t.qasm),
        Err(d) => {
            eprint!("{}", d.render(&src));
            std::process::exit(1);
        }
    }
}
