//! Encode a few paths of the binary tree and compare their labels.
//!
//! ```text
//! cargo run --example tree_encode -- 0110100 0111001 12
//! ```

use treecodes::treecode::{alpha_star, beta_prefixes, hamming, tree_distance, PathWord};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let args: Vec<String> = std::env::args().skip(1).collect();
    let x: PathWord = args.first().map_or("0110100", String::as_str).parse()?;
    let y: PathWord = args.get(1).map_or("0111001", String::as_str).parse()?;
    let kappa: u32 = args.get(2).map_or(Ok(12), |s| s.parse())?;

    for path in [&x, &y] {
        let word = alpha_star(path, kappa)?;
        println!("path {path}");
        for (angle, symbol) in beta_prefixes(path).iter().zip(word.symbols()) {
            let p = angle.to_unit_point();
            println!(
                "  {angle:>10}  ({:+.4}, {:+.4})  sector {symbol}",
                p.re, p.im
            );
        }
    }

    let d_tree = tree_distance(&x, &y)?;
    let d_ham = hamming(&alpha_star(&x, kappa)?, &alpha_star(&y, kappa)?)?;
    println!("tree distance {d_tree}, hamming distance {d_ham}");
    Ok(())
}
