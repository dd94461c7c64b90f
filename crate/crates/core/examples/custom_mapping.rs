//! Load a mapping file with a changed rule and translate with it.

use cliq::diag::SourceModule;
use cliq::mapping::{load_mapping, DEFAULT_MAPPING};
use cliq::optimizer::OptimizeMode;
use cliq::verifier::{differential_check, CheckOptions};

const PROGRAM: &str = "\
x = 7
y = 3
print(x * y + 1)
";

fn main() {
    // Integer products with their operands swapped.
    let text = DEFAULT_MAPPING.replace("binop.mul | int,int -> int | ({0} * {1})", "binop.mul | int,int -> int | (({1}) * ({0}))");
    let rules = match load_mapping(&text) {
        Ok(r) => r,
        Err(ds) => {
            for d in ds {
                eprintln!("{}: {}", d.code, d.message);
            }
            std::process::exit(1);
        }
    };
    let src = SourceModule::new("mul.cliq", PROGRAM);
    let t = cliq::translate(&src, &rules, &OptimizeMode::ReportOnly).unwrap();
    print!("{}", t.qasm);

    let check = differential_check(&src, &CheckOptions { mode: OptimizeMode::ReportOnly, rules }).unwrap();
    println!("// differential check: {:?}", check.report.verdict);

    match load_mapping("version 1\nbinop.add | int,int -> int | ({0} + {1})\n") {
        Ok(_) => println!("// partial mapping accepted"),
        Err(ds) => println!("// partial mapping rejected: {}", ds[0].code),
    }
}
