//! Compute 1 - δ_ℓ by branch and bound, check it against the bundled table and
//! report the alphabet size each value would certify.
//!
//! ```text
//! cargo run --release --example verify_delta -- 60
//! ```

use std::time::Instant;

use treecodes::reference;
use treecodes::verifier::{
    alphabet_bound, bb_delta_with, brute_delta, node_growth_exponent, SearchOptions,
};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let ell_max: u32 = std::env::args().nth(1).map_or(Ok(60), |s| s.parse())?;
    let start = Instant::now();
    println!(
        "{:>4} {:>10} {:>12} {:>12} {:>6}",
        "ℓ", "nodes", "1-δ_ℓ", "table", "κ >"
    );
    let records = bb_delta_with(ell_max, &SearchOptions::default(), |r| {
        let table = reference::value(r.ell).map_or("-".to_string(), |v| format!("{v:.8}"));
        let kappa = alphabet_bound(r.one_minus_delta).map_or("-".to_string(), |k| k.to_string());
        println!(
            "{:>4} {:>10} {:>12.8} {:>12} {:>6}",
            r.ell, r.nodes, r.one_minus_delta, table, kappa
        );
        Ok(())
    })?;
    println!("{} lengths in {:.2?}", records.len(), start.elapsed());

    if records.len() >= 60 {
        println!(
            "node growth 2^(c ℓ) over ℓ = 30..60: c = {:.4}",
            node_growth_exponent(&records[29..60])
        );
    }
    let check = ell_max.min(16);
    let brute = brute_delta(check)?;
    println!(
        "brute force at ℓ = {check}: {:.8}, worst z = {}",
        brute.one_minus_delta, brute.worst_z
    );
    Ok(())
}
