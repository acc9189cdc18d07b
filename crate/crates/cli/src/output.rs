use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};

use serde::Serialize;

use crate::Failure;

/// Written as `<command>.manifest.json` next to a run's outputs. The
/// timestamp lives only here so result files are reproducible byte for byte.
#[derive(Debug, Serialize)]
pub struct RunManifest {
    pub command: String,
    pub parameters: BTreeMap<String, String>,
    pub tool_version: String,
    pub timestamp: String,
    pub outputs: Vec<String>,
}

/// Files produced by one command, plus where they go.
pub struct Outputs {
    dir: Option<PathBuf>,
    written: Vec<PathBuf>,
}

impl Outputs {
    pub fn new(dir: Option<&Path>) -> Result<Self, Failure> {
        if let Some(d) = dir {
            fs::create_dir_all(d).map_err(|e| Failure::io(d, e))?;
        }
        Ok(Outputs { dir: dir.map(Path::to_path_buf), written: Vec::new() })
    }

    /// Writes `name` inside the output directory; a no-op without one.
    pub fn write(&mut self, name: &str, contents: &str) -> Result<(), Failure> {
        if let Some(dir) = &self.dir {
            let path = dir.join(name);
            fs::write(&path, contents).map_err(|e| Failure::io(&path, e))?;
            self.written.push(path);
        }
        Ok(())
    }

    /// Writes a file at an explicit path; its directory gets the manifest.
    pub fn write_at(&mut self, path: &Path, contents: &str) -> Result<(), Failure> {
        fs::write(path, contents).map_err(|e| Failure::io(path, e))?;
        if self.dir.is_none() {
            self.dir = Some(path.parent().map(Path::to_path_buf).unwrap_or_default());
        }
        self.written.push(path.to_path_buf());
        Ok(())
    }

    pub fn finish(self, command: &str, parameters: BTreeMap<String, String>) -> Result<(), Failure> {
        let Some(dir) = self.dir else { return Ok(()) };
        let manifest = RunManifest {
            command: command.to_string(),
            parameters,
            tool_version: env!("CARGO_PKG_VERSION").to_string(),
            timestamp: chrono::Utc::now().to_rfc3339(),
            outputs: self.written.iter().map(|p| p.display().to_string()).collect(),
        };
        let path = dir.join(format!("{command}.manifest.json"));
        fs::write(&path, to_json(&manifest)?).map_err(|e| Failure::io(&path, e))
    }
}

pub fn to_json<T: Serialize>(value: &T) -> Result<String, Failure> {
    let mut s = serde_json::to_string_pretty(value).map_err(|e| Failure::Computation(format!("serialization: {e}")))?;
    s.push('\n');
    Ok(s)
}
