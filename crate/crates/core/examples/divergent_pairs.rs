//! Two paths that split at the root give the same exponential sum as a single
//! odd residue; this prints the correspondence for short difference sequences.
//!
//! ```text
//! cargo run --example divergent_pairs -- 4
//! ```

use treecodes::treecode::{divergent_pair_sum, y_to_z, z_to_y, DiffSeq};
use treecodes::verifier::conj3_sum;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let len: usize = std::env::args().nth(1).map_or(Ok(3), |s| s.parse())?;
    let mut worst = 0.0f64;
    for y in DiffSeq::all(len) {
        let z = y_to_z(&y);
        let pair = divergent_pair_sum(&y);
        let residue = conj3_sum(&z);
        worst = worst.max((pair - residue).norm());
        if len <= 3 {
            println!(
                "{:?} -> z = {z}  sum {:+.8} {:+.8}i",
                y.values(),
                pair.re,
                pair.im
            );
        }
    }
    println!("largest gap over {len}-step sequences: {worst:e}");

    let z = y_to_z(&DiffSeq::new(vec![1; len])?);
    println!(
        "all-ones sequence maps to {z}, which maps back to {:?}",
        z_to_y(&z).values()
    );
    Ok(())
}
