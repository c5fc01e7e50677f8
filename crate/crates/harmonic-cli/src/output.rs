//! Output plumbing: RFC-4180 CSV with a mandatory header row and floats at
//! 17 significant digits, JSON summaries, and the resolved-config echo.
//! Every file carries the resolved config hash.

use std::path::{Path, PathBuf};

use anyhow::Context;
use serde::Serialize;

/// A sink directory plus the config hash stamped into every file.
pub struct OutputSink {
    dir: PathBuf,
    hash: String,
}

impl OutputSink {
    pub fn new(dir: &Path, hash: String) -> anyhow::Result<Self> {
        std::fs::create_dir_all(dir)
            .with_context(|| format!("creating output directory {}", dir.display()))?;
        Ok(OutputSink {
            dir: dir.to_path_buf(),
            hash,
        })
    }

    pub fn path(&self, name: &str) -> PathBuf {
        self.dir.join(name)
    }

    /// 17 significant digits, locale-free.
    pub fn fmt(x: f64) -> String {
        format!("{x:.16e}")
    }

    /// Write a table in the configured format: `name.csv` (RFC-4180) or
    /// `name.json` (columns + string rows, same cell rendering).
    pub fn write_table(
        &self,
        format: crate::config::OutputFormat,
        name: &str,
        header: &[&str],
        rows: Vec<Vec<String>>,
    ) -> anyhow::Result<PathBuf> {
        match format {
            crate::config::OutputFormat::Csv => {
                self.write_csv(&format!("{name}.csv"), header, rows)
            }
            crate::config::OutputFormat::Json => {
                #[derive(Serialize)]
                struct Table<'a> {
                    columns: Vec<&'a str>,
                    rows: Vec<Vec<String>>,
                }
                self.write_json(
                    &format!("{name}.json"),
                    &Table {
                        columns: header.to_vec(),
                        rows,
                    },
                )
            }
        }
    }

    /// Write a CSV table; every row gets a trailing `config_hash` column.
    pub fn write_csv(
        &self,
        name: &str,
        header: &[&str],
        rows: impl IntoIterator<Item = Vec<String>>,
    ) -> anyhow::Result<PathBuf> {
        let path = self.path(name);
        let mut w = csv::Writer::from_path(&path)
            .with_context(|| format!("creating {}", path.display()))?;
        let mut head: Vec<&str> = header.to_vec();
        head.push("config_hash");
        w.write_record(&head)?;
        for mut row in rows {
            row.push(self.hash.clone());
            w.write_record(&row)?;
        }
        w.flush()?;
        Ok(path)
    }

    /// Write a JSON document wrapped with the config hash.
    pub fn write_json<T: Serialize>(&self, name: &str, payload: &T) -> anyhow::Result<PathBuf> {
        #[derive(Serialize)]
        struct Wrapped<'a, T> {
            config_hash: &'a str,
            #[serde(flatten)]
            payload: &'a T,
        }
        let path = self.path(name);
        let doc = serde_json::to_string_pretty(&Wrapped {
            config_hash: &self.hash,
            payload,
        })?;
        std::fs::write(&path, doc + "\n")
            .with_context(|| format!("writing {}", path.display()))?;
        Ok(path)
    }

    /// Echo the resolved configuration next to the results.
    pub fn write_resolved_config(&self, canonical_json: &str) -> anyhow::Result<PathBuf> {
        let path = self.path("resolved_config.json");
        std::fs::write(&path, canonical_json).context("writing resolved config")?;
        Ok(path)
    }
}
