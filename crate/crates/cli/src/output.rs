//! CSV tables with a one-line `# key=value` metadata comment.

use std::path::{Path, PathBuf};

use crate::error::{CliError, CliResult};

#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    pub meta: Vec<(String, String)>,
    pub header: Vec<String>,
    pub rows: Vec<Vec<f64>>,
}

/// Integers as integers, everything else with 17 significant digits; both
/// round-trip every `f64` exactly.
pub fn fmt_f64(x: f64) -> String {
    if x.fract() == 0.0 && x.abs() < 1e15 {
        format!("{x}")
    } else {
        format!("{x:.16e}")
    }
}

impl Table {
    pub fn new(header: &[&str]) -> Self {
        Table {
            meta: Vec::new(),
            header: header.iter().map(|s| s.to_string()).collect(),
            rows: Vec::new(),
        }
    }

    pub fn meta(mut self, key: &str, value: impl ToString) -> Self {
        let value = value.to_string().replace(char::is_whitespace, "_");
        self.meta.push((key.to_string(), value));
        self
    }

    pub fn push(&mut self, row: Vec<f64>) {
        debug_assert_eq!(row.len(), self.header.len());
        self.rows.push(row);
    }

    #[cfg(test)]
    pub fn column(&self, name: &str) -> Option<Vec<f64>> {
        let k = self.header.iter().position(|h| h == name)?;
        Some(self.rows.iter().map(|r| r[k]).collect())
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::new();
        if !self.meta.is_empty() {
            let pairs: Vec<String> = self.meta.iter().map(|(k, v)| format!("{k}={v}")).collect();
            out.push_str("# ");
            out.push_str(&pairs.join(" "));
            out.push('\n');
        }
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(&self.header).expect("in-memory write");
        for row in &self.rows {
            w.write_record(row.iter().map(|&x| fmt_f64(x))).expect("in-memory write");
        }
        let bytes = w.into_inner().expect("in-memory flush");
        out.push_str(std::str::from_utf8(&bytes).expect("ascii output"));
        out
    }

    #[cfg(test)]
    pub fn from_csv(text: &str) -> Result<Self, String> {
        let mut meta = Vec::new();
        if let Some(first) = text.lines().next() {
            if let Some(rest) = first.strip_prefix('#') {
                for pair in rest.split_whitespace() {
                    let (k, v) = pair
                        .split_once('=')
                        .ok_or_else(|| format!("bad metadata entry '{pair}'"))?;
                    meta.push((k.to_string(), v.to_string()));
                }
            }
        }
        let mut r = csv::ReaderBuilder::new()
            .comment(Some(b'#'))
            .from_reader(text.as_bytes());
        let header = r
            .headers()
            .map_err(|e| e.to_string())?
            .iter()
            .map(str::to_string)
            .collect();
        let mut rows = Vec::new();
        for rec in r.records() {
            let rec = rec.map_err(|e| e.to_string())?;
            let row = rec
                .iter()
                .map(|s| s.parse::<f64>().map_err(|e| format!("'{s}': {e}")))
                .collect::<Result<Vec<_>, _>>()?;
            rows.push(row);
        }
        Ok(Table { meta, header, rows })
    }
}

/// Files produced by a task, written only after the whole task succeeded.
#[derive(Debug, Default)]
pub struct Artifacts {
    pub files: Vec<(PathBuf, String)>,
    pub stdout: String,
}

impl Artifacts {
    /// `text` goes to `path` when given, otherwise to stdout.
    pub fn primary(&mut self, path: Option<&Path>, text: String) {
        match path {
            Some(p) => self.files.push((p.to_path_buf(), text)),
            None => self.stdout.push_str(&text),
        }
    }

    pub fn file(&mut self, path: PathBuf, text: String) {
        self.files.push((path, text));
    }

    pub fn write(&self) -> CliResult<()> {
        for (path, text) in &self.files {
            if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
                std::fs::create_dir_all(dir).map_err(|e| CliError::io(dir, e))?;
            }
            std::fs::write(path, text).map_err(|e| CliError::io(path, e))?;
        }
        Ok(())
    }
}

/// `path` with its extension replaced by `svg`.
pub fn svg_path(path: &Path) -> PathBuf {
    path.with_extension("svg")
}
