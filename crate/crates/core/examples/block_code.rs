//! Block codes over Z/2^n: codewords, the exhaustive minimum distance and the
//! guaranteed distance for a given exponential-sum bound.
//!
//! ```text
//! cargo run --release --example block_code -- 8 2 14
//! ```

use num_bigint::BigUint;
use treecodes::blockcode::{block_distance_bound, block_encode, block_min_distance, BlockParams};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let args: Vec<u32> = std::env::args()
        .skip(1)
        .map(|s| s.parse())
        .collect::<Result<_, _>>()?;
    let params = BlockParams::new(
        args.first().copied().unwrap_or(8),
        args.get(1).copied().unwrap_or(2),
        args.get(2).copied().unwrap_or(14),
    )?;

    for m in 0..4u32 {
        println!("m = {m}: {}", block_encode(&BigUint::from(m), &params)?);
    }

    let audit = block_min_distance(&params)?;
    println!(
        "n = {}, c = {}, κ = {}: min distance {} of {} (pair {:?})",
        params.n,
        params.c,
        params.kappa,
        audit.min_hamming,
        params.length(),
        audit.worst_pair
    );
    println!(
        "largest Re average {:.6}, bound η·cn = {:.4}",
        audit.max_inner, audit.inner_product_bound
    );

    for delta in [0.1, 0.3, 0.5] {
        match block_distance_bound(&params, delta) {
            Ok(eta) => println!("δ = {delta}: η = {eta:.6}"),
            Err(e) => println!("δ = {delta}: {e}"),
        }
    }
    Ok(())
}
