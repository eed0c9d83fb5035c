//! The `treecodes` command-line tool.
//!
//! Every subcommand writes CSV with a header row and LF line endings, except
//! `encode`, which prints one comma-separated symbol line. Exit codes: `0` on
//! success, `2` for usage and parameter errors, `3` when an internal invariant
//! fails, `1` for I/O errors.

use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand, ValueEnum};
use num_bigint::BigUint;

use crate::base32::{min_nonzero_fraction, trajectory_coeffs, verify_eq7};
use crate::blockcode::{block_angles, block_encode, conj1_scan, BlockParams};
use crate::reference::{parse_delta_csv, ParseError, TABLE_CSV};
use crate::treecode::{alpha_star, beta_prefixes, PathWord};
use crate::verifier::{
    bb_delta_with, brute_delta, DeltaRecord, SearchOptions, DEFAULT_SPLIT_DEPTH, MAX_BRUTE_LEVEL,
};
use crate::{Error, OddResidue};

/// Largest `ℓ` for which `base32 --mode trajectory` lists every odd residue.
pub const MAX_TRAJECTORY_TABLE_LEVEL: u32 = 20;

/// Header of the `verify` CSV.
pub const VERIFY_HEADER: [&str; 5] = [
    "ell",
    "nodes",
    "worst_z_numerator",
    "worst_z_denominator_log2",
    "one_minus_delta",
];

#[derive(Debug, Parser)]
#[command(
    name = "treecodes",
    version,
    about = "Tree codes from base-3/2 exponential sums"
)]
pub struct RunConfig {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Compute 1 - δ_ℓ for ℓ = 1..=ell-max, one CSV row per length.
    Verify {
        #[arg(long)]
        ell_max: u32,
        #[arg(long, value_enum, default_value_t = Method::Bb)]
        method: Method,
        /// Worker threads; defaults to the machine's parallelism.
        #[arg(long)]
        workers: Option<usize>,
        /// Search both members of every conjugate pair.
        #[arg(long)]
        no_symmetry: bool,
        #[arg(long)]
        no_pruning: bool,
        /// Start each length from scratch instead of the previous best sum.
        #[arg(long)]
        no_carry_bound: bool,
        #[arg(long, default_value_t = DEFAULT_SPLIT_DEPTH)]
        split_depth: u32,
        #[arg(long, short)]
        output: Option<PathBuf>,
    },
    /// Turn a 1 - δ_ℓ CSV into two-column plot data and an SVG chart.
    Plotdata {
        /// CSV written by `verify`; omit to use the bundled table.
        #[arg(long, short)]
        input: Option<PathBuf>,
        /// Whitespace-separated `ell value` output.
        #[arg(long, short)]
        output: PathBuf,
        /// SVG output; defaults to the data path with an `svg` extension.
        #[arg(long)]
        svg: Option<PathBuf>,
    },
    /// Print the codeword of a tree path or a block message.
    Encode {
        #[arg(long, value_enum)]
        mode: EncodeMode,
        /// Path bits for tree mode, e.g. `0110`; empty or `ε` is the root.
        #[arg(long, allow_hyphen_values = true)]
        bits: Option<String>,
        /// Message integer for block mode.
        #[arg(long)]
        message: Option<String>,
        #[arg(long)]
        n: Option<u32>,
        #[arg(long)]
        c: Option<u32>,
        #[arg(long)]
        kappa: u32,
        /// Also print the exact angle behind each symbol.
        #[arg(long, short)]
        verbose: bool,
    },
    /// Maximise the block-code exponential sum over all nonzero messages.
    ScanConj1 {
        #[arg(long)]
        n: u32,
        #[arg(long, default_value_t = 2)]
        c: u32,
        #[arg(long)]
        workers: Option<usize>,
        /// Histogram CSV output.
        #[arg(long)]
        histogram: Option<PathBuf>,
    },
    /// Branch indices of the five-branch map.
    Base32 {
        #[arg(long)]
        ell: u32,
        #[arg(long, value_enum)]
        mode: Base32Mode,
        /// Trajectory mode: a single odd residue instead of all of them.
        #[arg(long)]
        z: Option<u64>,
        /// Search mode: first level of the range `from..=ell`.
        #[arg(long)]
        from: Option<u32>,
        #[arg(long, short)]
        output: Option<PathBuf>,
    },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Method {
    Bb,
    Brute,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum EncodeMode {
    Tree,
    Block,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Base32Mode {
    Trajectory,
    Search,
}

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error(transparent)]
    Lib(#[from] Error),
    #[error("malformed input, {0}")]
    Parse(#[from] ParseError),
    #[error(transparent)]
    Io(#[from] io::Error),
    #[error(transparent)]
    Csv(#[from] csv::Error),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Lib(Error::Invariant(_)) => 3,
            CliError::Lib(_) | CliError::Parse(_) => 2,
            CliError::Io(_) | CliError::Csv(_) => 1,
        }
    }
}

fn bad(message: impl Into<String>) -> CliError {
    CliError::Lib(Error::InvalidParameter(message.into()))
}

/// Parses `args` (program name first), runs the command, and returns the exit code.
pub fn run<I, T>(args: I, stdout: &mut (dyn Write + Send), stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let config = match RunConfig::try_parse_from(args) {
        Ok(config) => config,
        Err(e) => {
            let code = e.exit_code();
            let text = e.render().to_string();
            let sink: &mut dyn Write = if code == 0 { stdout } else { stderr };
            let _ = sink.write_all(text.as_bytes());
            return code;
        }
    };
    match execute(&config, stdout) {
        Ok(()) => 0,
        Err(e) => {
            let _ = writeln!(stderr, "error: {e}");
            e.exit_code()
        }
    }
}

/// Runs an already parsed command.
pub fn execute(config: &RunConfig, stdout: &mut (dyn Write + Send)) -> Result<(), CliError> {
    match &config.command {
        Command::Verify {
            ell_max,
            method,
            workers,
            no_symmetry,
            no_pruning,
            no_carry_bound,
            split_depth,
            output,
        } => {
            let workers = resolve_workers(*workers)?;
            let options = SearchOptions {
                symmetry: !no_symmetry,
                pruning: !no_pruning,
                carry_bound: !no_carry_bound,
                workers,
                split_depth: *split_depth,
            };
            with_output(output.as_deref(), stdout, |out| {
                in_pool(workers, || cmd_verify(*ell_max, *method, &options, out))
            })
        }
        Command::Plotdata { input, output, svg } => {
            let text = match input {
                Some(path) => std::fs::read_to_string(path)?,
                None => TABLE_CSV.to_string(),
            };
            let svg = svg.clone().unwrap_or_else(|| output.with_extension("svg"));
            let rows = parse_delta_csv(&text)?;
            let mut dat = BufWriter::new(File::create(output)?);
            write_plot_data(&rows, &mut dat)?;
            dat.flush()?;
            let mut chart = BufWriter::new(File::create(&svg)?);
            write_svg(&rows, &mut chart)?;
            chart.flush()?;
            writeln!(
                stdout,
                "{} points written to {} and {}",
                rows.len(),
                output.display(),
                svg.display()
            )?;
            Ok(())
        }
        Command::Encode {
            mode,
            bits,
            message,
            n,
            c,
            kappa,
            verbose,
        } => match mode {
            EncodeMode::Tree => {
                let bits = bits
                    .as_deref()
                    .ok_or_else(|| bad("tree mode needs --bits"))?;
                cmd_encode_tree(bits, *kappa, *verbose, stdout)
            }
            EncodeMode::Block => {
                let message = message
                    .as_deref()
                    .ok_or_else(|| bad("block mode needs --message"))?;
                let n = n.ok_or_else(|| bad("block mode needs --n"))?;
                let c = c.ok_or_else(|| bad("block mode needs --c"))?;
                cmd_encode_block(message, &BlockParams::new(n, c, *kappa)?, *verbose, stdout)
            }
        },
        Command::ScanConj1 {
            n,
            c,
            workers,
            histogram,
        } => {
            let workers = resolve_workers(*workers)?;
            in_pool(workers, || {
                cmd_scan_conj1(*n, *c, histogram.as_deref(), stdout)
            })
        }
        Command::Base32 {
            ell,
            mode,
            z,
            from,
            output,
        } => with_output(output.as_deref(), stdout, |out| match mode {
            Base32Mode::Trajectory => cmd_base32_trajectory(*ell, *z, out),
            Base32Mode::Search => cmd_base32_search(from.unwrap_or(*ell), *ell, out),
        }),
    }
}

fn resolve_workers(workers: Option<usize>) -> Result<usize, CliError> {
    match workers {
        Some(0) => Err(bad("--workers must be positive")),
        Some(w) => Ok(w),
        None => Ok(std::thread::available_parallelism().map_or(1, |n| n.get())),
    }
}

fn in_pool<T: Send>(
    workers: usize,
    f: impl FnOnce() -> Result<T, CliError> + Send,
) -> Result<T, CliError> {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(workers)
        .build()
        .map_err(|e| bad(format!("cannot start {workers} workers: {e}")))?;
    pool.install(f)
}

fn with_output<T>(
    path: Option<&Path>,
    stdout: &mut (dyn Write + Send),
    f: impl FnOnce(&mut (dyn Write + Send)) -> Result<T, CliError>,
) -> Result<T, CliError> {
    match path {
        Some(path) => {
            let mut file = BufWriter::new(File::create(path)?);
            let value = f(&mut file)?;
            file.flush()?;
            Ok(value)
        }
        None => f(stdout),
    }
}

fn verify_row(r: &DeltaRecord) -> [String; 5] {
    [
        r.ell.to_string(),
        r.nodes.to_string(),
        r.worst_z.value().to_string(),
        r.worst_z.level().to_string(),
        format!("{:.8}", r.one_minus_delta),
    ]
}

/// Writes the `verify` CSV, flushing after every length.
pub fn cmd_verify(
    ell_max: u32,
    method: Method,
    options: &SearchOptions,
    out: &mut (dyn Write + Send),
) -> Result<(), CliError> {
    if ell_max == 0 {
        return Err(bad("ℓ_max must be at least 1"));
    }
    if method == Method::Brute && ell_max > MAX_BRUTE_LEVEL {
        return Err(Error::ResourceLimit {
            what: "brute-force level ℓ",
            value: ell_max as u64,
            limit: MAX_BRUTE_LEVEL as u64,
        }
        .into());
    }
    let mut csv = csv::Writer::from_writer(out);
    csv.write_record(VERIFY_HEADER)?;
    csv.flush()?;
    let mut emit = |r: &DeltaRecord| -> crate::Result<()> {
        csv.write_record(verify_row(r))
            .and_then(|_| csv.flush().map_err(csv::Error::from))
            .map_err(|e| Error::Invariant(format!("cannot write row {}: {e}", r.ell)))
    };
    match method {
        Method::Bb => {
            bb_delta_with(ell_max, options, &mut emit)?;
        }
        Method::Brute => {
            for ell in 1..=ell_max {
                emit(&brute_delta(ell)?)?;
            }
        }
    }
    Ok(())
}

/// `ell value` lines, values with 8 decimals.
pub fn write_plot_data(rows: &[(u32, f64)], out: &mut dyn Write) -> io::Result<()> {
    writeln!(out, "# ell one_minus_delta")?;
    for (ell, value) in rows {
        writeln!(out, "{ell} {value:.8}")?;
    }
    Ok(())
}

/// A static line chart of `1 - δ_ℓ` against `ℓ`.
pub fn write_svg(rows: &[(u32, f64)], out: &mut dyn Write) -> io::Result<()> {
    const W: f64 = 640.0;
    const H: f64 = 400.0;
    const PAD: f64 = 48.0;
    let x_min = rows.iter().map(|r| r.0).min().unwrap_or(0) as f64;
    let x_max = rows.iter().map(|r| r.0).max().unwrap_or(1) as f64;
    let (y_min, y_max) = (-1.0f64, 1.0f64);
    let y_min = rows.iter().map(|r| r.1).fold(y_min, f64::min);
    let y_max = rows.iter().map(|r| r.1).fold(y_max, f64::max);
    let sx = |x: f64| {
        if x_max > x_min {
            PAD + (x - x_min) / (x_max - x_min) * (W - 2.0 * PAD)
        } else {
            W / 2.0
        }
    };
    let sy = |y: f64| H - PAD - (y - y_min) / (y_max - y_min) * (H - 2.0 * PAD);
    let points: Vec<String> = rows
        .iter()
        .map(|&(x, y)| format!("{:.2},{:.2}", sx(x as f64), sy(y)))
        .collect();

    writeln!(
        out,
        r#"<svg xmlns="http://www.w3.org/2000/svg" viewBox="0 0 {W} {H}" font-family="sans-serif" font-size="12">"#
    )?;
    writeln!(out, r#"<rect width="{W}" height="{H}" fill="white"/>"#)?;
    writeln!(
        out,
        r##"<line x1="{PAD}" y1="{y0:.2}" x2="{x1}" y2="{y0:.2}" stroke="#999" stroke-dasharray="4 3"/>"##,
        y0 = sy(0.0),
        x1 = W - PAD
    )?;
    writeln!(
        out,
        r#"<polyline points="{PAD},{PAD} {PAD},{b} {r},{b}" fill="none" stroke="black"/>"#,
        b = H - PAD,
        r = W - PAD
    )?;
    for (label, y) in [(y_min, sy(y_min)), (0.0, sy(0.0)), (y_max, sy(y_max))] {
        writeln!(
            out,
            r#"<text x="{}" y="{y:.2}" text-anchor="end">{label:.2}</text>"#,
            PAD - 6.0
        )?;
    }
    writeln!(
        out,
        r#"<text x="{PAD}" y="{}" text-anchor="middle">{x_min}</text>"#,
        H - PAD + 16.0
    )?;
    writeln!(
        out,
        r#"<text x="{}" y="{}" text-anchor="middle">{x_max}</text>"#,
        W - PAD,
        H - PAD + 16.0
    )?;
    writeln!(
        out,
        r#"<text x="{}" y="{}" text-anchor="middle">ℓ</text>"#,
        W / 2.0,
        H - 12.0
    )?;
    writeln!(
        out,
        r#"<text x="{}" y="24" text-anchor="middle">1 − δ_ℓ</text>"#,
        W / 2.0
    )?;
    writeln!(
        out,
        r#"<polyline points="{}" fill="none" stroke="steelblue" stroke-width="1.5"/>"#,
        points.join(" ")
    )?;
    writeln!(out, "</svg>")
}

pub fn cmd_encode_tree(
    bits: &str,
    kappa: u32,
    verbose: bool,
    out: &mut dyn Write,
) -> Result<(), CliError> {
    let path: PathWord = bits.parse()?;
    let word = alpha_star(&path, kappa)?;
    writeln!(out, "{word}")?;
    if verbose {
        for (angle, symbol) in beta_prefixes(&path).iter().zip(word.symbols()) {
            writeln!(out, "{angle} -> {symbol}")?;
        }
    }
    Ok(())
}

pub fn cmd_encode_block(
    message: &str,
    params: &BlockParams,
    verbose: bool,
    out: &mut dyn Write,
) -> Result<(), CliError> {
    let m: BigUint = message
        .trim()
        .parse()
        .map_err(|_| bad(format!("message `{message}` is not a nonnegative integer")))?;
    let word = block_encode(&m, params)?;
    writeln!(out, "{word}")?;
    if verbose {
        for (angle, symbol) in block_angles(&m, params)?.iter().zip(word.symbols()) {
            writeln!(out, "{angle} -> {symbol}")?;
        }
    }
    Ok(())
}

pub fn cmd_scan_conj1(
    n: u32,
    c: u32,
    histogram: Option<&Path>,
    out: &mut dyn Write,
) -> Result<(), CliError> {
    let scan = conj1_scan(n, c)?;
    writeln!(
        out,
        "n={n} c={c} max={:.8} argmax={}",
        scan.max, scan.argmax
    )?;
    if let Some(path) = histogram {
        let mut csv = csv::Writer::from_path(path)?;
        csv.write_record(["bin_lo", "bin_hi", "count"])?;
        for (lo, hi, count) in scan.bins() {
            csv.write_record([format!("{lo:.2}"), format!("{hi:.2}"), count.to_string()])?;
        }
        csv.flush()?;
    }
    Ok(())
}

pub fn cmd_base32_trajectory(
    ell: u32,
    z: Option<u64>,
    out: &mut (dyn Write + Send),
) -> Result<(), CliError> {
    if ell == 0 {
        return Err(bad("ℓ must be at least 1"));
    }
    let residues: Vec<u64> = match z {
        Some(z) => vec![z],
        None => {
            if ell > MAX_TRAJECTORY_TABLE_LEVEL {
                return Err(Error::ResourceLimit {
                    what: "trajectory table level ℓ",
                    value: ell as u64,
                    limit: MAX_TRAJECTORY_TABLE_LEVEL as u64,
                }
                .into());
            }
            (1..(1u64 << ell)).step_by(2).collect()
        }
    };
    let mut csv = csv::Writer::from_writer(out);
    csv.write_record(["z", "coeffs", "nonzero_count", "eq7_holds"])?;
    for z in residues {
        let coeffs = trajectory_coeffs(&OddResidue::new(z, ell)?)?;
        csv.write_record([
            z.to_string(),
            coeffs.to_string(),
            coeffs.nonzero_count().to_string(),
            verify_eq7(&coeffs).holds.to_string(),
        ])?;
    }
    csv.flush()?;
    Ok(())
}

pub fn cmd_base32_search(from: u32, to: u32, out: &mut (dyn Write + Send)) -> Result<(), CliError> {
    if from > to {
        return Err(bad(format!("empty level range {from}..={to}")));
    }
    let mut csv = csv::Writer::from_writer(out);
    csv.write_record(["ell", "min_nonzero", "witness"])?;
    for ell in from..=to {
        let (count, witness) = min_nonzero_fraction(ell)?;
        csv.write_record([ell.to_string(), count.to_string(), witness.to_string()])?;
        csv.flush()?;
    }
    Ok(())
}
