use std::fs;
use std::path::{Path, PathBuf};
use std::time::Instant;

use anyhow::{Context, Result};
use serde::Serialize;
use sha2::{Digest, Sha256};

/// Fixed 12-significant-digit rendering shared by every CSV column.
pub fn fmt_f64(x: f64) -> String {
    if x.is_nan() {
        return "nan".into();
    }
    if x.is_infinite() {
        return if x > 0.0 { "inf".into() } else { "-inf".into() };
    }
    if x == 0.0 {
        return "0".into();
    }
    let sci = format!("{x:.11e}");
    let (mantissa, exp) = sci.split_once('e').expect("exponent present");
    let exp: i32 = exp.parse().expect("integer exponent");
    if !(-5..15).contains(&exp) {
        let m = mantissa.trim_end_matches('0').trim_end_matches('.');
        return format!("{m}e{exp}");
    }
    // Re-render the already rounded mantissa in positional notation.
    let negative = mantissa.starts_with('-');
    let digits: String = mantissa.chars().filter(char::is_ascii_digit).collect();
    let mut s = if exp >= 0 {
        let point = exp as usize + 1;
        let int = &digits[..point.min(digits.len())];
        let pad = "0".repeat(point.saturating_sub(digits.len()));
        let frac = digits.get(point..).unwrap_or("");
        format!("{int}{pad}.{frac}")
    } else {
        format!("0.{}{digits}", "0".repeat((-exp - 1) as usize))
    };
    if s.contains('.') {
        s = s.trim_end_matches('0').trim_end_matches('.').to_string();
    }
    if negative {
        s.insert(0, '-');
    }
    s
}

pub fn fmt_opt(x: Option<f64>) -> String {
    x.map(fmt_f64).unwrap_or_default()
}

/// An ordered CSV table.
#[derive(Debug, Clone)]
pub struct Table {
    pub name: String,
    pub header: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

impl Table {
    pub fn new(name: &str, header: &[&str]) -> Self {
        Self {
            name: name.to_string(),
            header: header.iter().map(|h| h.to_string()).collect(),
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<String>) {
        debug_assert_eq!(row.len(), self.header.len());
        self.rows.push(row);
    }

    pub fn to_bytes(&self) -> Result<Vec<u8>> {
        let mut w = csv::WriterBuilder::new()
            .terminator(csv::Terminator::Any(b'\n'))
            .from_writer(Vec::new());
        w.write_record(&self.header)?;
        for r in &self.rows {
            w.write_record(r)?;
        }
        Ok(w.into_inner()?)
    }
}

#[derive(Debug, Serialize)]
struct OutputDigest {
    file: String,
    sha256: String,
    bytes: usize,
}

#[derive(Debug, Serialize)]
struct RunManifest<'a> {
    command: &'a str,
    params: &'a serde_json::Value,
    seed: u64,
    versions: serde_json::Value,
    wall_time_s: f64,
    outputs: Vec<OutputDigest>,
}

/// Collects a command's artifacts and writes them (plus a manifest) to
/// `--out`, or prints them to stdout.
pub struct Sink {
    out: Option<PathBuf>,
    command: String,
    params: serde_json::Value,
    seed: u64,
    started: Instant,
    files: Vec<(String, Vec<u8>)>,
}

impl Sink {
    pub fn new(out: Option<&Path>, command: &str, params: serde_json::Value, seed: u64) -> Self {
        Self {
            out: out.map(Path::to_path_buf),
            command: command.to_string(),
            params,
            seed,
            started: Instant::now(),
            files: Vec::new(),
        }
    }

    pub fn table(&mut self, t: &Table) -> Result<()> {
        let bytes = t.to_bytes()?;
        self.files.push((format!("{}.csv", t.name), bytes));
        Ok(())
    }

    pub fn json<T: Serialize>(&mut self, name: &str, value: &T) -> Result<()> {
        let mut bytes = serde_json::to_vec_pretty(value)?;
        bytes.push(b'\n');
        self.files.push((format!("{name}.json"), bytes));
        Ok(())
    }

    pub fn finish(self) -> Result<()> {
        let Some(dir) = &self.out else {
            // Without --out only the primary artifact is printed.
            use std::io::Write;
            if let Some((_, bytes)) = self.files.first() {
                std::io::stdout().lock().write_all(bytes)?;
            }
            for (name, _) in self.files.iter().skip(1) {
                eprintln!("{name} not written; pass --out to keep it");
            }
            return Ok(());
        };
        fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
        let mut outputs = Vec::new();
        for (name, bytes) in &self.files {
            let path = dir.join(name);
            fs::write(&path, bytes).with_context(|| format!("writing {}", path.display()))?;
            outputs.push(OutputDigest {
                file: name.clone(),
                sha256: hex::encode(Sha256::digest(bytes)),
                bytes: bytes.len(),
            });
        }
        let manifest = RunManifest {
            command: &self.command,
            params: &self.params,
            seed: self.seed,
            versions: serde_json::json!({
                "charlab": env!("CARGO_PKG_VERSION"),
                "format": "csv, 12 significant digits",
            }),
            wall_time_s: self.started.elapsed().as_secs_f64(),
            outputs,
        };
        let path = dir.join(format!("{}.manifest.json", self.command));
        let mut bytes = serde_json::to_vec_pretty(&manifest)?;
        bytes.push(b'\n');
        fs::write(&path, bytes).with_context(|| format!("writing {}", path.display()))?;
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn twelve_significant_digits() {
        assert_eq!(fmt_f64(0.75), "0.75");
        assert_eq!(fmt_f64(1.0 / 3.0), "0.333333333333");
        assert_eq!(fmt_f64(-2.0 / 3.0), "-0.666666666667");
        assert_eq!(fmt_f64(3.0), "3");
        assert_eq!(fmt_f64(123456.789), "123456.789");
        assert_eq!(fmt_f64(1e-3), "0.001");
        assert_eq!(fmt_f64(1.5e-9), "1.5e-9");
        assert_eq!(fmt_f64(0.0), "0");
        assert_eq!(fmt_f64(9.9999999999999e5), "1000000");
    }

    #[test]
    fn csv_quotes_character_specs() {
        let mut t = Table::new("x", &["character", "m"]);
        t.push(vec!["15:1,2".into(), fmt_f64(2.5)]);
        assert_eq!(t.to_bytes().unwrap(), b"character,m\n\"15:1,2\",2.5\n");
    }
}
