use std::fmt;
use std::path::Path;

use serde::de::DeserializeOwned;

/// A failed command, split by exit code.
#[derive(Debug)]
pub enum Failure {
    /// Bad arguments, config or data files (exit 2).
    Input(anyhow::Error),
    /// Divergence or infeasibility (exit 3).
    Numerical(anyhow::Error),
}

impl Failure {
    pub fn input(msg: impl fmt::Display) -> Self {
        Failure::Input(anyhow::anyhow!("{msg}"))
    }

    pub fn code(&self) -> u8 {
        match self {
            Failure::Input(_) => 2,
            Failure::Numerical(_) => 3,
        }
    }
}

impl fmt::Display for Failure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Failure::Input(e) | Failure::Numerical(e) => write!(f, "{e:#}"),
        }
    }
}

impl From<fedl_core::Error> for Failure {
    fn from(e: fedl_core::Error) -> Self {
        if e.is_numerical() {
            Failure::Numerical(e.into())
        } else {
            Failure::Input(e.into())
        }
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        Failure::Input(e.into())
    }
}

/// Parse a TOML (`.toml`) or JSON (anything else) file.
pub fn read_config<T: DeserializeOwned>(path: &Path) -> Result<T, Failure> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Failure::input(format!("{}: {e}", path.display())))?;
    let parsed = if path.extension().is_some_and(|e| e == "toml") {
        toml::from_str(&text).map_err(|e| e.to_string())
    } else {
        serde_json::from_str(&text).map_err(|e| e.to_string())
    };
    parsed.map_err(|e| Failure::input(format!("{}: {e}", path.display())))
}
