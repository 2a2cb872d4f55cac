//! `ea.toml`: per-directory defaults. Flags override it.

use std::fs;
use std::io;
use std::path::{Path, PathBuf};

use eac_core::model::{AudienceTier, Phase};
use serde::Deserialize;

use crate::Failure;

pub const CONFIG_FILE: &str = "ea.toml";

#[derive(Debug, Clone, Default, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Config {
    pub phase: Option<Phase>,
    pub tier: Option<AudienceTier>,
    pub threshold: Option<f64>,
}

impl Config {
    /// Reads `ea.toml` from `dir`; a missing file means no defaults.
    pub fn load(dir: &Path) -> Result<Config, Failure> {
        let path = dir.join(CONFIG_FILE);
        let text = match fs::read_to_string(&path) {
            Ok(t) => t,
            Err(e) if e.kind() == io::ErrorKind::NotFound => return Ok(Config::default()),
            Err(e) => return Err(Failure::Io { path, source: e }),
        };
        let config: Config =
            toml::from_str(&text).map_err(|e| Failure::Usage(format!("{}: {}", path.display(), e.message())))?;
        if let Some(t) = config.threshold {
            if !(0.0..=1.0).contains(&t) {
                return Err(Failure::Usage(format!("{}: threshold must lie in [0, 1]", path.display())));
            }
        }
        Ok(config)
    }

    /// The configuration governing `file`: the one in its directory.
    pub fn for_file(file: &Path) -> Result<Config, Failure> {
        Config::load(&dir_of(file))
    }
}

pub fn dir_of(file: &Path) -> PathBuf {
    match file.parent() {
        Some(p) if !p.as_os_str().is_empty() => p.to_path_buf(),
        _ => PathBuf::from("."),
    }
}
