//! Number formatting and output sinks.

use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};

use anyhow::{Context, Result};
use num_complex::Complex64;

/// Decimal float with 17 significant digits; exponent notation outside
/// `[1e−5, 1e16)`.
pub fn fmt17(x: f64) -> String {
    if x.is_nan() {
        return "NaN".into();
    }
    if x.is_infinite() {
        return if x > 0.0 { "inf".into() } else { "-inf".into() };
    }
    if x == 0.0 {
        return "0".into();
    }
    let mag = x.abs().log10().floor() as i32;
    if (-5..16).contains(&mag) {
        format!("{:.*}", (16 - mag) as usize, x)
    } else {
        format!("{x:.16e}")
    }
}

/// Header and cells for the real and imaginary parts of a point.
pub fn point_header(prefix: &str, dim: usize) -> Vec<String> {
    (1..=dim).flat_map(|j| [format!("{prefix}{j}_re"), format!("{prefix}{j}_im")]).collect()
}

pub fn point_cells(p: &[Complex64]) -> Vec<String> {
    p.iter().flat_map(|z| [fmt17(z.re), fmt17(z.im)]).collect()
}

/// Writes the primary output to stdout, or to a named file under `--out`.
pub struct Sink {
    dir: Option<PathBuf>,
}

impl Sink {
    pub fn new(dir: Option<&Path>) -> Result<Self> {
        if let Some(d) = dir {
            fs::create_dir_all(d).with_context(|| format!("creating output directory {}", d.display()))?;
        }
        Ok(Sink { dir: dir.map(Path::to_path_buf) })
    }

    /// Primary output: the named file under `--out`, else stdout.
    pub fn primary(&self, name: &str, body: &[u8]) -> Result<()> {
        match &self.dir {
            Some(d) => self.write_file(&d.join(name), body),
            None => {
                let mut out = io::stdout().lock();
                out.write_all(body)?;
                out.flush()?;
                Ok(())
            }
        }
    }

    /// Auxiliary output, written only when `--out` is set.
    pub fn auxiliary(&self, name: &str, body: &[u8]) -> Result<()> {
        match &self.dir {
            Some(d) => self.write_file(&d.join(name), body),
            None => Ok(()),
        }
    }

    fn write_file(&self, path: &Path, body: &[u8]) -> Result<()> {
        fs::write(path, body).with_context(|| format!("writing {}", path.display()))
    }
}

pub fn csv_bytes(header: &[String], rows: &[Vec<String>]) -> Result<Vec<u8>> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(header)?;
    for r in rows {
        w.write_record(r)?;
    }
    Ok(w.into_inner().map_err(|e| e.into_error())?)
}
