//! Write the bundled 1 - δ_ℓ table as plot data and an SVG chart.
//!
//! ```text
//! cargo run --example plot_reference -- /tmp/delta
//! ```

use std::fs::File;
use std::io::BufWriter;
use std::path::PathBuf;

use treecodes::cli::{write_plot_data, write_svg};
use treecodes::reference::{parse_delta_csv, TABLE_CSV};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let stem = PathBuf::from(std::env::args().nth(1).unwrap_or_else(|| "delta".into()));
    let rows = parse_delta_csv(TABLE_CSV)?;
    write_plot_data(
        &rows,
        &mut BufWriter::new(File::create(stem.with_extension("dat"))?),
    )?;
    write_svg(
        &rows,
        &mut BufWriter::new(File::create(stem.with_extension("svg"))?),
    )?;

    let (ell, best) = rows.iter().fold(
        (0, f64::MIN),
        |acc, &(l, v)| if v > acc.1 { (l, v) } else { acc },
    );
    println!("{} values, largest {best:.8} at ℓ = {ell}", rows.len());
    println!(
        "wrote {} and {}",
        stem.with_extension("dat").display(),
        stem.with_extension("svg").display()
    );
    Ok(())
}
