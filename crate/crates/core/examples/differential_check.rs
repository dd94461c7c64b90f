//! Run the differential check on a program, then again with one mapping rule
//! deliberately broken.

use cliq::diag::SourceModule;
use cliq::mapping::default_rules;
use cliq::optimizer::OptimizeMode;
use cliq::verifier::{differential_check, CheckOptions};

const PROGRAM: &str = "\
def fib(n: int) -> int:
    a = 0
    b = 1
    for i in range(0, n):
        t = a + b
        a = b
        b = t
    return a

x = 2.5
print(fib(20))
print(x * fib(10) - 1)
";

fn main() {
    let src = SourceModule::new("fib.cliq", PROGRAM);
    let ok = differential_check(&src, &CheckOptions::default()).unwrap();
    println!("intact rules: {:?}", ok.report.verdict);
    print!("{}", ok.report.to_json());

    let broken = default_rules().with_template("binop.add", &["int", "int"], "({0} - {1})").unwrap();
    let opts = CheckOptions { mode: OptimizeMode::ReportOnly, rules: broken };
    let bad = differential_check(&src, &opts).unwrap();
    println!("binop.add rewritten to subtraction: {:?}", bad.report.verdict);
    if let Some(reason) = &bad.report.reason {
        println!("  {reason}");
    }
}
