//! Input, output and digests. Files are written through a temporary file in
//! the same directory and renamed, so a failed command leaves nothing behind.

use std::io::{Read, Write};
use std::path::Path;

use sha2::{Digest, Sha256};
use thiserror::Error;

use nwr::benchgen::BenchError;
use nwr::collapse::CollapseError;
use nwr::derivpmc::DerivError;
use nwr::pmc::{parse_model, ModelError, Pmc};
use nwr::relations::RelationError;
use nwr::valuefn::ValueError;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}: {1}")]
    Io(String, std::io::Error),
    #[error("{0}")]
    Flag(String),
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error(transparent)]
    Bench(#[from] BenchError),
    #[error(transparent)]
    Collapse(#[from] CollapseError),
    #[error(transparent)]
    Value(#[from] ValueError),
    #[error(transparent)]
    Deriv(#[from] DerivError),
    #[error(transparent)]
    Relation(#[from] RelationError),
}

pub fn read_input(path: &str) -> Result<String, CliError> {
    let mut text = String::new();
    if path == "-" {
        std::io::stdin().read_to_string(&mut text).map_err(|e| CliError::Io("stdin".into(), e))?;
    } else {
        text = std::fs::read_to_string(path).map_err(|e| CliError::Io(path.into(), e))?;
    }
    Ok(text)
}

pub fn read_model(text: &str) -> Result<Pmc, CliError> {
    Ok(parse_model(text)?)
}

pub fn digest(text: &str) -> String {
    format!("{:x}", Sha256::digest(text.as_bytes()))
}

/// Standard output when `path` is `None` or `-`.
pub fn write_output(path: Option<&str>, body: &str) -> Result<(), CliError> {
    fn io(p: &str) -> impl Fn(std::io::Error) -> CliError + '_ {
        move |e| CliError::Io(p.to_string(), e)
    }
    match path {
        None | Some("-") => std::io::stdout().write_all(body.as_bytes()).map_err(io("stdout")),
        Some(p) => {
            let dir = Path::new(p).parent().filter(|d| !d.as_os_str().is_empty()).unwrap_or(Path::new("."));
            let mut tmp = tempfile::NamedTempFile::new_in(dir).map_err(io(p))?;
            tmp.write_all(body.as_bytes()).map_err(io(p))?;
            tmp.persist(p).map_err(|e| CliError::Io(p.to_string(), e.error))?;
            Ok(())
        }
    }
}
