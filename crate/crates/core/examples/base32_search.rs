//! Fewest nonzero digits in a base-3/2 representation of one, over all digit
//! strings and over those that arise from actual trajectories.
//!
//! ```text
//! cargo run --release --example base32_search -- 40
//! ```

use treecodes::base32::{min_nonzero_fraction, nonzero_fraction_over_z, MAX_ENUM_LEVEL};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let top: u32 = std::env::args().nth(1).map_or(Ok(32), |s| s.parse())?;
    println!(
        "{:>4} {:>8} {:>7} {:>10} {:>10}  witness",
        "ℓ", "search", "ratio", "over z", "argmin z"
    );
    for ell in 2..=top {
        let (count, witness) = min_nonzero_fraction(ell)?;
        let (over_z, z) = if ell <= MAX_ENUM_LEVEL {
            let (k, z) = nonzero_fraction_over_z(ell)?;
            (k.to_string(), z.value().to_string())
        } else {
            ("-".into(), "-".into())
        };
        println!(
            "{ell:>4} {count:>8} {:>7.3} {over_z:>10} {z:>10}  {witness}",
            count as f64 / ell as f64
        );
    }
    Ok(())
}
