//! CSV artifacts: `# key: value` metadata lines, one header line, then rows.
//! Floats carry 17 significant digits so files compare bit-exactly.

use std::fmt::Write as _;
use std::fs;
use std::io::Write as _;
use std::path::Path;
use std::time::{SystemTime, UNIX_EPOCH};

use crate::error::{CliError, Result};

pub const TIMESERIES_HEADER: &str = "t,ge_su2,ge_so2,ext_x,ext_y,ext_z,fidelity";
pub const ENSEMBLE_HEADER: &str = "t,p_su2_mean,p_su2_std,ge_su2_mean";
pub const FIDELITY_HEADER: &str = "t,fidelity";
pub const CLASSICAL_HEADER: &str = "index,theta,phi,lyapunov,label";

/// Ordered `key: value` lines written above the header.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct Metadata {
    entries: Vec<(String, String)>,
}

impl Metadata {
    /// Version line plus the optional timestamp.
    pub fn new(with_timestamp: bool) -> Self {
        let mut m = Metadata::default();
        m.push("generator", concat!("qkt ", env!("CARGO_PKG_VERSION")));
        if with_timestamp {
            let secs = SystemTime::now()
                .duration_since(UNIX_EPOCH)
                .map(|d| d.as_secs())
                .unwrap_or(0);
            m.push("generated_unix", secs.to_string());
        }
        m
    }

    pub fn push(&mut self, key: impl Into<String>, value: impl Into<String>) {
        self.entries.push((key.into(), value.into()));
    }

    pub fn get(&self, key: &str) -> Option<&str> {
        self.entries
            .iter()
            .find(|(k, _)| k == key)
            .map(|(_, v)| v.as_str())
    }

    pub fn entries(&self) -> &[(String, String)] {
        &self.entries
    }
}

pub fn fmt_f64(x: f64) -> String {
    format!("{x:.16e}")
}

/// Renders a full CSV document.
pub fn render(meta: &Metadata, header: &str, rows: &[String]) -> String {
    let mut out = String::new();
    for (k, v) in meta.entries() {
        // keep each entry on one line
        let v = v.replace('\n', " ");
        let _ = writeln!(out, "# {k}: {v}");
    }
    out.push_str(header);
    out.push('\n');
    for r in rows {
        out.push_str(r);
        out.push('\n');
    }
    out
}

/// Writes `contents` to a sibling temp file, then renames it over `path`.
pub fn write_atomic(path: &Path, contents: &str) -> Result<()> {
    if let Some(parent) = path.parent().filter(|p| !p.as_os_str().is_empty()) {
        fs::create_dir_all(parent).map_err(|e| CliError::io(parent, e))?;
    }
    let name = path
        .file_name()
        .ok_or_else(|| CliError::validation("output_path", format!("{} has no file name", path.display())))?;
    let mut tmp_name = std::ffi::OsString::from(".");
    tmp_name.push(name);
    tmp_name.push(format!(".tmp{}", std::process::id()));
    let tmp = path.with_file_name(tmp_name);
    let result = (|| {
        let mut f = fs::File::create(&tmp)?;
        f.write_all(contents.as_bytes())?;
        f.sync_all()?;
        fs::rename(&tmp, path)
    })();
    if let Err(e) = result {
        let _ = fs::remove_file(&tmp);
        return Err(CliError::io(path, e));
    }
    Ok(())
}

/// The CSV without its `#` metadata lines.
pub fn body(csv: &str) -> String {
    csv.lines()
        .filter(|l| !l.starts_with('#'))
        .fold(String::new(), |mut acc, l| {
            acc.push_str(l);
            acc.push('\n');
            acc
        })
}
