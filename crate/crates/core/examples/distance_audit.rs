//! Exhaustive tree-code distance at a fixed depth, next to the bound from the
//! worst exponential sum at each tree distance.
//!
//! ```text
//! cargo run --release --example distance_audit -- 10 10
//! ```

use treecodes::treecode::exhaustive_min_distance;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let args: Vec<String> = std::env::args().skip(1).collect();
    let depth: usize = args.first().map_or(Ok(10), |s| s.parse())?;
    let kappa: u32 = args.get(1).map_or(Ok(10), |s| s.parse())?;

    let audit = exhaustive_min_distance(depth, kappa)?;
    println!("depth {depth}, κ = {kappa}");
    println!(
        "{:>4} {:>12} {:>14} {:>10}",
        "d_T", "min hamming", "max Re inner", "bound"
    );
    for row in &audit.by_distance {
        println!(
            "{:>4} {:>12} {:>14.6} {:>10.4}",
            row.tree_distance, row.min_hamming, row.max_mean_inner, row.inner_product_bound
        );
    }
    let w = &audit.worst;
    println!(
        "worst pair {} / {}: {} of {} symbols differ ({:.4})",
        w.x,
        w.x_other,
        w.hamming,
        w.tree_distance,
        audit.min_fraction()
    );
    println!(
        "root-divergent pairs attain the minimum: {}",
        audit.root_reduction_agrees()
    );
    println!(
        "pairs below their own bound: {}",
        audit.pair_bound_violations
    );
    Ok(())
}
