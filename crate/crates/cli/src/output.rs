//! Output plumbing: atomic file writes, float formatting, and the run
//! manifest.

use std::fs::{self, File};
use std::io::{BufWriter, Read, Write};
use std::path::{Path, PathBuf};

use serde::Serialize;
use sha2::{Digest, Sha256};

use crate::CliError;

/// Writes a file via a temp sibling and an atomic rename, so an interrupted
/// run never leaves a half-written file. The manifest is written last and
/// marks a run as complete.
pub fn write_atomic<F>(dir: &Path, name: &str, fill: F) -> Result<(), CliError>
where
    F: FnOnce(&mut BufWriter<File>) -> std::io::Result<()>,
{
    fs::create_dir_all(dir)?;
    let tmp: PathBuf = dir.join(format!(".{name}.tmp"));
    let result = (|| {
        let mut w = BufWriter::new(File::create(&tmp)?);
        fill(&mut w)?;
        w.flush()?;
        Ok::<(), std::io::Error>(())
    })();
    if let Err(e) = result {
        let _ = fs::remove_file(&tmp);
        return Err(e.into());
    }
    fs::rename(&tmp, dir.join(name))?;
    log::info!("wrote {}", dir.join(name).display());
    Ok(())
}

pub fn write_json<T: Serialize>(dir: &Path, name: &str, value: &T) -> Result<(), CliError> {
    let bytes = serde_json::to_vec_pretty(value)
        .map_err(|e| CliError::internal(format!("serializing {name}: {e}")))?;
    write_atomic(dir, name, move |w| {
        w.write_all(&bytes)?;
        w.write_all(b"\n")
    })
}

/// Formats with 12 significant digits, plain notation where reasonable
/// (the `%.12g` convention), so text outputs diff stably.
pub fn sig12(x: f64) -> String {
    if x == 0.0 {
        return "0".to_string();
    }
    if !x.is_finite() {
        return x.to_string();
    }
    let exp = x.abs().log10().floor() as i32;
    if (-4..12).contains(&exp) {
        let decimals = (11 - exp).max(0) as usize;
        trim_fraction(format!("{x:.decimals$}"))
    } else {
        let s = format!("{x:.11e}");
        match s.split_once('e') {
            Some((mantissa, e)) => format!("{}e{e}", trim_fraction(mantissa.to_string())),
            None => s,
        }
    }
}

fn trim_fraction(mut s: String) -> String {
    if s.contains('.') {
        while s.ends_with('0') {
            s.pop();
        }
        if s.ends_with('.') {
            s.pop();
        }
    }
    s
}

/// SHA-256 of a file, as lowercase hex.
pub fn file_sha256(path: &Path) -> Result<String, CliError> {
    let mut file = File::open(path)
        .map_err(|e| CliError::input(format!("{}: {e}", path.display())))?;
    let mut hasher = Sha256::new();
    let mut buf = [0u8; 64 * 1024];
    loop {
        let n = file.read(&mut buf)?;
        if n == 0 {
            break;
        }
        hasher.update(&buf[..n]);
    }
    Ok(hasher
        .finalize()
        .iter()
        .map(|b| format!("{b:02x}"))
        .collect())
}

/// Reproducibility record accompanying every command's outputs.
#[derive(Serialize)]
pub struct Manifest<P: Serialize> {
    pub command: &'static str,
    pub tool_version: &'static str,
    pub input: String,
    pub input_sha256: String,
    pub parameters: P,
    pub outputs: Vec<String>,
}

impl<P: Serialize> Manifest<P> {
    pub fn new(
        command: &'static str,
        input: &Path,
        parameters: P,
        outputs: &[&str],
    ) -> Result<Self, CliError> {
        Ok(Manifest {
            command,
            tool_version: env!("CARGO_PKG_VERSION"),
            input: input.display().to_string(),
            input_sha256: file_sha256(input)?,
            parameters,
            outputs: outputs.iter().map(|s| s.to_string()).collect(),
        })
    }

    /// Written last: a directory with a manifest is a completed run.
    pub fn commit(&self, dir: &Path) -> Result<(), CliError> {
        write_json(dir, "manifest.json", self)
    }
}
