use std::fmt;
use std::path::{Path, PathBuf};

use anyhow::{Context as _, Result};
use serde::Serialize;

use spacelike_core::behavior::BehaviorFile;
use spacelike_core::quantum::QuantumSetupFile;
use spacelike_core::{Behavior, JointBehavior};

/// A usage error detected after argument parsing (exit status 2).
#[derive(Debug)]
pub struct Usage(pub String);

impl fmt::Display for Usage {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for Usage {}

pub enum Loaded {
    Behavior(BehaviorFile),
    Quantum(QuantumSetupFile),
}

fn read(path: &Path) -> Result<String> {
    std::fs::read_to_string(path).map_err(|e| Usage(format!("reading {}: {e}", path.display())).into())
}

/// Behavior files have a `table`, quantum setups a `state`.
pub fn load_any(path: &Path) -> Result<Loaded> {
    let text = read(path)?;
    let value: serde_json::Value = serde_json::from_str(&text)
        .map_err(spacelike_core::Error::from)
        .with_context(|| path.display().to_string())?;
    if value.get("state").is_some() {
        Ok(Loaded::Quantum(load_quantum_text(path, &text)?))
    } else {
        let file = BehaviorFile::from_json(&text).with_context(|| path.display().to_string())?;
        Ok(Loaded::Behavior(file))
    }
}

pub fn load_behavior(path: &Path) -> Result<BehaviorFile> {
    let text = read(path)?;
    BehaviorFile::from_json(&text).with_context(|| path.display().to_string())
}

pub fn load_joint(path: &Path) -> Result<JointBehavior> {
    match load_behavior(path)? {
        BehaviorFile::Joint(jb) => Ok(jb.validated().with_context(|| path.display().to_string())?),
        BehaviorFile::Single(_) => Err(Usage(format!(
            "{} is a single-region behavior; a joint behavior is needed",
            path.display()
        ))
        .into()),
    }
}

pub fn load_single(path: &Path) -> Result<Behavior> {
    match load_behavior(path)? {
        BehaviorFile::Single(b) => Ok(b.validated().with_context(|| path.display().to_string())?),
        BehaviorFile::Joint(_) => Err(Usage(format!(
            "{} is a joint behavior; a single-region behavior is needed",
            path.display()
        ))
        .into()),
    }
}

fn load_quantum_text(path: &Path, text: &str) -> Result<QuantumSetupFile> {
    QuantumSetupFile::from_json(text).with_context(|| path.display().to_string())
}

pub fn load_quantum(path: &Path) -> Result<QuantumSetupFile> {
    load_quantum_text(path, &read(path)?)
}

pub fn to_json<T: Serialize + ?Sized>(value: &T) -> Result<String> {
    Ok(serde_json::to_string_pretty(value)? + "\n")
}

pub fn emit<T: Serialize + ?Sized>(output: &Option<PathBuf>, value: &T) -> Result<()> {
    write_text(output, &to_json(value)?)
}

pub fn write_text(output: &Option<PathBuf>, text: &str) -> Result<()> {
    match output {
        Some(path) => std::fs::write(path, text).with_context(|| format!("writing {}", path.display())),
        None => {
            use std::io::Write;
            let mut stdout = std::io::stdout().lock();
            stdout.write_all(text.as_bytes())?;
            Ok(stdout.flush()?)
        }
    }
}
