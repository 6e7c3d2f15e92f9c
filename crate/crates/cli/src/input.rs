//! Loading corpus and user files. Every failure names the file and, when
//! serde can tell, the offending field.

use std::fs;
use std::path::{Path, PathBuf};

use noniterate::endo::{EndoFile, LabeledEndofunction};
use noniterate::symbolic::{Materialized, RayMap};
use noniterate::{CircleMap, PlMap, Rational};
use serde::de::DeserializeOwned;
use serde_json::Value;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum InputError {
    #[error("cannot read {path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
    #[error("{path}: {message}")]
    Parse { path: PathBuf, message: String },
    #[error("{0}")]
    Invalid(String),
}

/// What a JSON file describes, decided by its top-level keys.
#[derive(Clone, Debug)]
pub enum MapFile {
    Finite(LabeledEndofunction),
    Rays(RayMap),
    Interval(PlMap),
    Circle(CircleMap),
}

pub fn read_json(path: &Path) -> Result<Value, InputError> {
    let text = fs::read_to_string(path).map_err(|source| InputError::Io { path: path.to_path_buf(), source })?;
    serde_json::from_str(&text).map_err(|e| InputError::Parse { path: path.to_path_buf(), message: e.to_string() })
}

fn decode<T: DeserializeOwned>(path: &Path, value: Value) -> Result<T, InputError> {
    serde_json::from_value(value).map_err(|e| InputError::Parse { path: path.to_path_buf(), message: e.to_string() })
}

pub fn load(path: &Path) -> Result<MapFile, InputError> {
    let value = read_json(path)?;
    let has = |k: &str| value.get(k).is_some();
    if has("families") {
        Ok(MapFile::Rays(decode(path, value)?))
    } else if has("map") {
        let file: EndoFile = decode(path, value)?;
        let f = LabeledEndofunction::try_from(file)
            .map_err(|e| InputError::Parse { path: path.to_path_buf(), message: e.to_string() })?;
        Ok(MapFile::Finite(f))
    } else if has("pieces") {
        Ok(MapFile::Interval(decode(path, value)?))
    } else if has("partition") {
        Ok(MapFile::Circle(decode(path, value)?))
    } else {
        Err(InputError::Parse {
            path: path.to_path_buf(),
            message: "expected one of the keys `map`, `families`, `pieces`, `partition`".into(),
        })
    }
}

/// A finite map from a table file or from a rule file cut off at `top`.
pub fn load_finite(path: &Path, top: i64) -> Result<(LabeledEndofunction, Option<Materialized>), InputError> {
    match load(path)? {
        MapFile::Finite(f) => Ok((f, None)),
        MapFile::Rays(r) => {
            let m = match r.to_finite() {
                Some(m) => m,
                None => r.materialize(top).map_err(|e| InputError::Invalid(e.to_string()))?,
            };
            Ok((m.map.clone(), Some(m)))
        }
        _ => Err(InputError::Invalid(format!("{} is not a finite map or rule file", path.display()))),
    }
}

pub fn load_rays(path: &Path) -> Result<RayMap, InputError> {
    match load(path)? {
        MapFile::Rays(r) => Ok(r),
        _ => Err(InputError::Invalid(format!("{} is not a rule file", path.display()))),
    }
}

pub fn load_interval(path: &Path) -> Result<PlMap, InputError> {
    match load(path)? {
        MapFile::Interval(f) => Ok(f),
        _ => Err(InputError::Invalid(format!("{} is not an interval map", path.display()))),
    }
}

pub fn load_circle(path: &Path) -> Result<CircleMap, InputError> {
    match load(path)? {
        MapFile::Circle(f) => Ok(f),
        _ => Err(InputError::Invalid(format!("{} is not a circle map", path.display()))),
    }
}

pub fn parse_rational(text: &str) -> Result<Rational, InputError> {
    noniterate::scalar::parse_scalar(text)
        .ok_or_else(|| InputError::Invalid(format!("`{text}` is not a rational number")))
}
