//! `uniqseq`: classify uniqueness sequences, verify witnesses, evaluate and
//! invert transforms, subordinate, and run the property harness.
//!
//! Exit status: 0 success, 1 verification or tolerance failure, 2 usage or
//! input error.

mod commands;
mod config;
mod functions;
mod output;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

#[derive(Parser, Debug)]
#[command(name = "uniqseq", version, about = "Uniqueness sequences for the multidimensional Laplace transform")]
pub struct RunConfig {
    /// Family spec, e.g. "affine:n=2;a=1,1;b=1,1"; repeatable.
    #[arg(long, global = true, value_name = "SPEC")]
    pub family: Vec<String>,
    /// Points as "@file.csv" or inline "x1,x2;y1,y2" (complex as 1+2i).
    #[arg(long, global = true, value_name = "POINTS", allow_hyphen_values = true)]
    pub points: Option<String>,
    #[arg(long, global = true)]
    pub tol: Option<f64>,
    /// Prefix length N (classification, witness points).
    #[arg(long, global = true, value_parser = clap::builder::RangedU64ValueParser::<usize>::new().range(1..))]
    pub prefix: Option<usize>,
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Worker threads for batch evaluation.
    #[arg(long, global = true)]
    pub jobs: Option<usize>,
    /// Output directory; without it the primary output goes to stdout.
    #[arg(long, global = true, value_name = "DIR")]
    pub out: Option<PathBuf>,
    /// Key-value file of defaults; flags given on the command line win.
    #[arg(long, global = true, value_name = "FILE")]
    pub config: Option<PathBuf>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Classify families; one JSON line per family.
    Classify {
        /// Separation constant for the one-dimensional rules.
        #[arg(long)]
        delta: Option<f64>,
        /// Sector half-angle for the one-dimensional rules.
        #[arg(long)]
        theta: Option<f64>,
    },
    /// Build a witness and verify that its transform vanishes on its family
    /// (or on the first --family, as a negative control).
    Witness {
        /// dech, diagonal or ray:c=…;d=…
        id: String,
    },
    /// Evaluate a transform at --points.
    Transform {
        /// exp:…, power:…, g:k, exppoly:@file or witness:ID
        #[arg(long)]
        function: String,
        /// Force numerical integration even when an exact form exists.
        #[arg(long)]
        numeric: bool,
    },
    /// Subordinate a function in some coordinates: values at --t, or the
    /// transform at --points checked against the subordination identity.
    Subordinate {
        #[arg(long)]
        function: String,
        /// Orders in (0,1), one per subordinated coordinate.
        #[arg(long, value_delimiter = ',', required = true)]
        gamma: Vec<f64>,
        /// 1-based coordinates; defaults to the first len(gamma).
        #[arg(long, value_delimiter = ',')]
        subset: Vec<usize>,
        /// Times as "0.5;1" (or "t1,t2;…" in several dimensions).
        #[arg(long, allow_hyphen_values = true)]
        t: Option<String>,
    },
    /// Post–Widder inversion of a rational transform.
    Invert {
        /// pole:c@μ^p;…, rational:@file or laplace:FUNCTION
        #[arg(long)]
        transform: String,
        #[arg(long, allow_hyphen_values = true)]
        t: String,
        #[arg(long, value_delimiter = ',', default_value = "10")]
        k: Vec<u32>,
    },
    /// Run the property suite; exits 1 if any property fails.
    Harness {
        /// small or full
        #[arg(long, default_value = "small")]
        sizes: String,
        /// Inject a fault: dropped-factorial, wrong-gamma or wrong-family.
        #[arg(long)]
        fault: Vec<String>,
    },
}

fn main() -> ExitCode {
    let args = match config::merge_config(std::env::args().collect()) {
        Ok(a) => a,
        Err(e) => {
            eprintln!("error: {e:#}");
            return ExitCode::from(2);
        }
    };
    let cfg = match RunConfig::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    if let Some(j) = cfg.jobs {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(j.max(1)).build_global() {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
    }
    match commands::run(&cfg) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
