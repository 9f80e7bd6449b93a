//! Tabulate the internal-energy domain extent zeta_max / theta_max over a
//! range of internal degrees of freedom and truncation tolerances,
//! reproducing the published table.

use frbgk::phase::compute_zeta_max;

fn main() {
    let deltas = [2.0, 3.0, 4.0, 5.0];
    let eps = [1e-2, 1e-4, 1e-6, 1e-8, 1e-10, 1e-12, 1e-14];

    print!("{:>6}", "delta");
    for e in eps {
        print!("{:>10}", format!("{e:.0e}"));
    }
    println!();
    for d in deltas {
        print!("{d:>6}");
        for e in eps {
            let z = compute_zeta_max(d, e, 1.0).unwrap();
            print!("{z:>10.3}");
        }
        println!();
    }
}
