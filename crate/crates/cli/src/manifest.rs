//! Run manifest: every command that produces files drops one next to its
//! primary output so the seed and inputs are recoverable.

use anyhow::{Context, Result};
use std::path::{Path, PathBuf};

pub struct RunManifest {
    pub command: &'static str,
    pub seed: u64,
    pub config: Option<PathBuf>,
    pub params: Vec<(String, String)>,
    pub outputs: Vec<PathBuf>,
}

impl RunManifest {
    pub fn new(command: &'static str, seed: u64) -> Self {
        RunManifest {
            command,
            seed,
            config: None,
            params: Vec::new(),
            outputs: Vec::new(),
        }
    }

    pub fn param(&mut self, key: &str, value: impl ToString) -> &mut Self {
        self.params.push((key.to_string(), value.to_string()));
        self
    }

    pub fn output(&mut self, path: impl AsRef<Path>) -> &mut Self {
        self.outputs.push(path.as_ref().to_path_buf());
        self
    }

    /// Writes `<primary output>.manifest`.
    pub fn write(&self) -> Result<()> {
        let primary = self
            .outputs
            .first()
            .expect("manifest needs at least one output");
        let path = PathBuf::from(format!("{}.manifest", primary.display()));
        let mut text = String::new();
        text.push_str(&format!("command = {}\n", self.command));
        text.push_str(&format!("seed = {}\n", self.seed));
        if let Some(cfg) = &self.config {
            text.push_str(&format!("config = {}\n", cfg.display()));
        }
        for (k, v) in &self.params {
            text.push_str(&format!("{k} = {v}\n"));
        }
        for out in &self.outputs {
            text.push_str(&format!("output = {}\n", out.display()));
        }
        std::fs::write(&path, text).with_context(|| format!("writing {}", path.display()))
    }
}
