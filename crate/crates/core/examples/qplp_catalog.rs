//! Print the pattern catalog and what the matcher says about a few blocks.

use cliq::diag::SourceModule;
use cliq::frontend::analyze;
use cliq::optimizer::find_sites;
use cliq::qplp::Catalog;

const BLOCKS: &[(&str, &str)] = &[
    ("match", "a = [4, 2, 7, 1]\nfound = -1\nfor i in range(0, 4):\n    if a[i] == 7:\n        found = i\n        break\nprint(found)\n"),
    ("size 6", "a = [4, 2, 7, 1, 0, 9]\nfound = -1\nfor i in range(0, 6):\n    if a[i] == 7:\n        found = i\n        break\nprint(found)\n"),
    ("absent target", "a = [4, 2, 7, 1]\nfound = -1\nfor i in range(0, 4):\n    if a[i] == 3:\n        found = i\n        break\nprint(found)\n"),
    ("mutated array", "a = [4, 2, 7, 1]\na[0] = 7\nfound = -1\nfor i in range(0, 4):\n    if a[i] == 7:\n        found = i\n        break\nprint(found)\n"),
];

fn main() {
    let catalog = Catalog::default();
    print!("{}", catalog.listing());
    println!();
    for (label, text) in BLOCKS {
        let tp = analyze(&SourceModule::new("block.cliq", text)).unwrap();
        let report = find_sites(&tp, &catalog);
        match (report.sites.first(), report.rejected.first()) {
            (Some(s), _) => println!("{label}: {} k={} p={:.4}", s.site, s.bindings.params.k, s.success_probability),
            (None, Some(r)) => println!("{label}: rejected ({})", r.reason),
            (None, None) => println!("{label}: no candidate"),
        }
    }
}
