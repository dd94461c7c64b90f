//! Find a linear-search block, replace it with a Grover subroutine, and
//! compare the two translations.

use cliq::diag::SourceModule;
use cliq::mapping::default_rules;
use cliq::optimizer::OptimizeMode;

const PROGRAM: &str = "\
a = [10, 20, 30, 40, 50, 60, 70, 80]
found = -1
for i in range(0, 8):
    if a[i] == 60:
        found = i
        break
print(found)
";

fn main() {
    let src = SourceModule::new("search.cliq", PROGRAM);
    let rules = default_rules();

    let plain = cliq::translate(&src, &rules, &OptimizeMode::ReportOnly).unwrap();
    println!("// report-only: {} site(s) found, {} applied", plain.report.sites.len(), plain.report.applied().count());
    print!("{}", plain.report.to_json());

    let opt = cliq::translate(&src, &rules, &OptimizeMode::ApplyAll).unwrap();
    for s in opt.report.applied() {
        println!(
            "// {} ({}): N={} marked={:?} k={} p={:.6}",
            s.site, s.entry, s.bindings.size, s.bindings.params.marked, s.bindings.params.k, s.success_probability
        );
    }
    println!("// unoptimized: {} lines, optimized: {} lines", plain.qasm.lines().count(), opt.qasm.lines().count());
    print!("{}", opt.qasm);
}
