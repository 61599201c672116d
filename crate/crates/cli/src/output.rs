use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use crate::CliError;

/// Fixed-width scientific notation with 16 significant digits.
pub(crate) fn fmt_f64(x: f64) -> String {
    // Normalize negative zero so that sign noise does not change the bytes.
    format!("{:.15e}", x + 0.0)
}

/// In-memory CSV table with a header row.
pub(crate) struct Table {
    header: Vec<String>,
    body: String,
}

impl Table {
    pub(crate) fn new<S: AsRef<str>>(columns: &[S]) -> Self {
        Self { header: columns.iter().map(|c| c.as_ref().to_string()).collect(), body: String::new() }
    }

    pub(crate) fn row(&mut self, values: &[f64]) {
        debug_assert_eq!(values.len(), self.header.len());
        let cells: Vec<String> = values.iter().map(|v| fmt_f64(*v)).collect();
        writeln!(self.body, "{}", cells.join(",")).unwrap();
    }

    /// Row whose leading cells are integer indices.
    pub(crate) fn indexed_row(&mut self, indices: &[usize], values: &[f64]) {
        let mut cells: Vec<String> = indices.iter().map(|i| i.to_string()).collect();
        cells.extend(values.iter().map(|v| fmt_f64(*v)));
        writeln!(self.body, "{}", cells.join(",")).unwrap();
    }

    pub(crate) fn render(&self) -> String {
        format!("{}\n{}", self.header.join(","), self.body)
    }
}

/// Files produced by one run, written in one go once the run has succeeded.
#[derive(Default)]
pub(crate) struct Artifacts {
    files: Vec<(String, String)>,
}

impl Artifacts {
    pub(crate) fn add(&mut self, name: &str, contents: String) {
        self.files.push((name.to_string(), contents));
    }

    pub(crate) fn table(&mut self, name: &str, table: &Table) {
        self.add(name, table.render());
    }

    pub(crate) fn names(&self) -> Vec<String> {
        self.files.iter().map(|(n, _)| n.clone()).collect()
    }

    pub(crate) fn write_all(&self, dir: &Path) -> Result<(), CliError> {
        fs::create_dir_all(dir).map_err(|source| CliError::Io { path: dir.to_path_buf(), source })?;
        for (name, contents) in &self.files {
            let path = dir.join(name);
            fs::write(&path, contents).map_err(|source| CliError::Io { path, source })?;
        }
        Ok(())
    }
}
