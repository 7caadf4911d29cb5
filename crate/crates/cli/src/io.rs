use std::fs;
use std::path::{Path, PathBuf};

use serde::Serialize;

use bloch_tsp_core::fixtures;
use bloch_tsp_core::matrix_io;
use bloch_tsp_core::noise::mix_seed;
use bloch_tsp_core::optimizer::Hyper;
use bloch_tsp_core::tsp::CostMatrix;

use crate::error::{CliError, Result};

/// Environment variable naming the default output directory.
pub const OUT_DIR_ENV: &str = "BLOCH_TSP_OUT_DIR";

/// Prefix selecting a bundled instance instead of a file path.
pub const FIXTURE_PREFIX: &str = "fixture:";

/// Loads `fixture:NAME` or a JSON/CSV matrix file.
pub fn load_instance(spec: &str) -> Result<CostMatrix> {
    if let Some(name) = spec.strip_prefix(FIXTURE_PREFIX) {
        return Ok(fixtures::by_name(name)?);
    }
    let text = fs::read_to_string(spec).map_err(|e| CliError::io(spec, e))?;
    Ok(matrix_io::parse(&text)?)
}

/// Hyper-parameters from an optional JSON file; `seed` overrides the file.
pub fn load_hyper(path: Option<&Path>, seed: Option<u64>) -> Result<Hyper> {
    let mut hyper = match path {
        Some(p) => {
            let text = fs::read_to_string(p).map_err(|e| CliError::io(p, e))?;
            Hyper::from_json(&text)?
        }
        None => Hyper::default(),
    };
    if let Some(s) = seed {
        hyper.seed = s;
    }
    hyper.validate()?;
    Ok(hyper)
}

/// Flag value, else the environment variable, else the working directory.
pub fn resolve_out_dir(flag: Option<PathBuf>) -> PathBuf {
    flag.or_else(|| std::env::var_os(OUT_DIR_ENV).map(PathBuf::from))
        .unwrap_or_else(|| PathBuf::from("."))
}

/// Seed of instance `index` in the `(n, symmetric)` bucket.
pub fn instance_seed(master: u64, n: usize, symmetric: bool, index: usize) -> u64 {
    mix_seed(mix_seed(mix_seed(master, n as u64), symmetric as u64), index as u64)
}

pub fn to_json<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("report serializes");
    s.push('\n');
    s
}

pub fn to_csv<T: Serialize>(rows: &[T]) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    for r in rows {
        w.serialize(r)
            .map_err(|e| CliError::Core(bloch_tsp_core::Error::Io(e.to_string())))?;
    }
    let bytes = w
        .into_inner()
        .map_err(|e| CliError::Core(bloch_tsp_core::Error::Io(e.to_string())))?;
    Ok(String::from_utf8(bytes).expect("csv output is utf-8"))
}

/// Report files accumulated by a command before they are written.
#[derive(Debug, Default, Clone, PartialEq)]
pub struct Artifacts {
    pub files: Vec<(String, String)>,
}

impl Artifacts {
    pub fn add(&mut self, name: &str, contents: String) {
        self.files.push((name.to_string(), contents));
    }

    pub fn get(&self, name: &str) -> Option<&str> {
        self.files
            .iter()
            .find(|(n, _)| n == name)
            .map(|(_, c)| c.as_str())
    }

    pub fn write(&self, dir: &Path) -> Result<Vec<PathBuf>> {
        fs::create_dir_all(dir).map_err(|e| CliError::io(dir, e))?;
        self.files
            .iter()
            .map(|(name, contents)| {
                let path = dir.join(name);
                fs::write(&path, contents).map_err(|e| CliError::io(&path, e))?;
                Ok(path)
            })
            .collect()
    }
}
