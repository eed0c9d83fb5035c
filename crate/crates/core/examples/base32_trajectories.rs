//! Follow odd residues through the five-branch map and check that the branch
//! indices represent one in base 3/2.
//!
//! ```text
//! cargo run --example base32_trajectories -- 6
//! ```

use treecodes::base32::{branch_step, trajectory_coeffs, verify_eq7, SignedResidue};
use treecodes::OddResidue;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let ell: u32 = std::env::args().nth(1).map_or(Ok(6), |s| s.parse())?;

    let mut z = SignedResidue::from(&OddResidue::new(1u32, ell)?);
    print!("1");
    for _ in 1..ell {
        let (next, a) = branch_step(&z)?;
        print!(" -[{a:+}]-> {next}");
        z = next;
    }
    println!();

    for v in (1..(1u64 << ell)).step_by(2).take(16) {
        let coeffs = trajectory_coeffs(&OddResidue::new(v, ell)?)?;
        let check = verify_eq7(&coeffs);
        println!(
            "z = {v:>4}: a = ({coeffs})  residual {}/{}  within 2^{}/3^{}: {}",
            check.residual_numerator,
            check.denominator,
            ell - 1,
            ell - 1,
            check.holds
        );
    }
    Ok(())
}
