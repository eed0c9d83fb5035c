//! Largest average of e(3^k m / 2^n) over all nonzero m, with its histogram,
//! and the subgroup sums that explain the degenerate generators.
//!
//! ```text
//! cargo run --release --example block_sum_scan -- 20 2
//! ```

use num_bigint::BigUint;
use treecodes::blockcode::{conj1_scan, subgroup_closed_form, subgroup_sum};
use treecodes::numeric::order_of_3;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let args: Vec<u32> = std::env::args()
        .skip(1)
        .map(|s| s.parse())
        .collect::<Result<_, _>>()?;
    let n = args.first().copied().unwrap_or(16);
    let c = args.get(1).copied().unwrap_or(2);

    let scan = conj1_scan(n, c)?;
    println!(
        "n = {n}, c = {c}: max {:.8} at m = {}",
        scan.max, scan.argmax
    );
    let peak = scan.histogram.iter().copied().max().unwrap_or(1).max(1);
    for (lo, hi, count) in scan.bins().filter(|b| b.2 > 0).step_by(5) {
        let bar = "#".repeat((60 * count / peak) as usize);
        println!("[{lo:+.2}, {hi:+.2}) {count:>8} {bar}");
    }

    println!("order of 3 mod 2^{n} = {}", order_of_3(n)?);
    let (sn, r) = (10, 2);
    for m in [1u32, 2, 64, 128, 256] {
        let m = BigUint::from(m);
        let s = subgroup_sum(sn, r, &m)?;
        let f = subgroup_closed_form(sn, r, &m)?;
        println!(
            "subgroup sum n = {sn}, r = {r}, m = {m}: {:+.6}{:+.6}i (closed form {:+.6}{:+.6}i)",
            s.re, s.im, f.re, f.im
        );
    }
    Ok(())
}
