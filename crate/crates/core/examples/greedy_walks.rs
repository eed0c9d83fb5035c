//! Running averages of the two greedy walks through the tree of square roots.
//!
//! ```text
//! cargo run --release --example greedy_walks
//! ```

use treecodes::verifier::{greedy_positive_re, greedy_sector};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    println!("{:>6} {:>14} {:>14}", "ℓ", "Re > 0 rule", "sector rule");
    for ell in [10, 30, 100, 300, 1000, 3000] {
        println!(
            "{ell:>6} {:>14.5} {:>14.5}",
            greedy_positive_re(ell)?,
            greedy_sector(ell)?
        );
    }
    Ok(())
}
