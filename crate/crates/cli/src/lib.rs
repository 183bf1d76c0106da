//! Command-line front end for `sphred`.
//!
//! [`run`] executes one invocation in-process and returns its exit code and
//! output, so the binary is a thin wrapper and tests need no subprocesses.
//!
//! Exit codes: 0 success (for `check` and `search`: reduced), 1 not reduced,
//! 2 gated input, invalid input or usage error.

pub mod commands;
pub mod document;
pub mod error;
pub mod render;

use std::io::Read;
use std::path::PathBuf;

use clap::{Parser, Subcommand};
use sphred::DEFAULT_TOLERANCE;

use crate::document::CoordinateMode;
use crate::render::Projection;

#[derive(Debug, Parser)]
#[command(name = "sphred", version, about = "Widths, thickness and reducedness of spherical convex polygons")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Evaluate the precondition and conditions (a)-(d); exit 0 reduced, 1 not reduced, 2 gated.
    Check {
        /// Polygon document, or `-` for stdin.
        input: PathBuf,
        /// Tolerance for each condition, in radians.
        #[arg(long, default_value_t = DEFAULT_TOLERANCE)]
        tol: f64,
        /// Print the report as JSON.
        #[arg(long, conflicts_with = "text")]
        json: bool,
        /// Print the report as aligned text (default).
        #[arg(long)]
        text: bool,
    },
    /// Generate a regular, perturbed or random odd-gon document.
    Gen {
        #[arg(long)]
        n: usize,
        /// Target thickness in radians (regular polygons).
        #[arg(long, required_unless_present = "random", conflicts_with = "random")]
        thickness: Option<f64>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Largest tangent offset per vertex, in radians.
        #[arg(long, default_value_t = 0.0)]
        perturb: f64,
        /// Draw a random convex odd-gon instead of a regular one.
        #[arg(long)]
        random: bool,
        /// Irregularity of random polygons, in (0, 1].
        #[arg(long, default_value_t = 1.0, requires = "random")]
        irregularity: f64,
        #[arg(long, value_enum, default_value_t = CoordinateMode::Xyz)]
        mode: CoordinateMode,
    },
    /// Per-side widths, thickness and attaining lune as JSON.
    Width {
        input: PathBuf,
        /// Also recompute every width with the sampling oracle.
        #[arg(long)]
        oracle: bool,
        /// Oracle lattice size.
        #[arg(long, default_value_t = commands::DEFAULT_GRID)]
        grid: usize,
    },
    /// Brute-force widths on a Fibonacci lattice, with and without refinement.
    Oracle {
        input: PathBuf,
        #[arg(long, default_value_t = commands::DEFAULT_GRID)]
        grid: usize,
    },
    /// Best-effort search for a non-regular reduced odd-gon near a regular one.
    Search {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        thickness: f64,
        /// Size of the random start offset, in radians.
        #[arg(long, default_value_t = 0.02)]
        perturb: f64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = DEFAULT_TOLERANCE)]
        tol: f64,
        #[arg(long, value_enum, default_value_t = CoordinateMode::Xyz)]
        mode: CoordinateMode,
    },
    /// Draw the polygon as SVG.
    Render {
        input: PathBuf,
        #[arg(long, value_enum, default_value_t = Projection::Ortho)]
        projection: Projection,
        /// Comma-separated overlays: t, o, lunes.
        #[arg(long, default_value = "")]
        show: String,
    },
}

/// Result of one invocation.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Outcome {
    pub code: i32,
    pub stdout: String,
    pub stderr: String,
}

/// Settings taken from the process environment by the binary.
#[derive(Debug, Clone, Copy, Default)]
pub struct Env {
    /// ANSI colors in text reports.
    pub color: bool,
}

pub fn run<I, T>(args: I, stdin: &mut dyn Read, env: Env) -> Outcome
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    match Cli::try_parse_from(args) {
        Ok(cli) => commands::execute(cli.command, stdin, env),
        Err(e) => {
            let text = e.render().to_string();
            if e.use_stderr() {
                Outcome { code: 2, stdout: String::new(), stderr: text }
            } else {
                Outcome { code: 0, stdout: text, stderr: String::new() }
            }
        }
    }
}
