//! Bundled example instances (4-city symmetric, 5-city symmetric, 5-city
//! asymmetric, 8-city symmetric).

use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::matrix_io;
use crate::tsp::CostMatrix;

const CM4: &str = include_str!("../fixtures/cm4.json");
const CM1: &str = include_str!("../fixtures/cm1.json");
const CM2: &str = include_str!("../fixtures/cm2.json");
const CM8: &str = include_str!("../fixtures/cm8.json");
const CHECKSUMS: &str = include_str!("../fixtures/SHA256SUMS");

pub const NAMES: [&str; 4] = ["cm4", "cm1", "cm2", "cm8"];

fn source(name: &str) -> Option<&'static str> {
    match name {
        "cm4" => Some(CM4),
        "cm1" => Some(CM1),
        "cm2" => Some(CM2),
        "cm8" => Some(CM8),
        _ => None,
    }
}

pub fn by_name(name: &str) -> Result<CostMatrix> {
    let text = source(name).ok_or_else(|| Error::Parse(format!("unknown fixture {name:?}")))?;
    matrix_io::parse_json(text)
}

/// Checks the embedded fixture files against the shipped SHA-256 sums.
pub fn verify_checksums() -> Result<()> {
    for line in CHECKSUMS.lines().filter(|l| !l.trim().is_empty()) {
        let (sum, file) = line
            .split_once(char::is_whitespace)
            .ok_or_else(|| Error::Parse(format!("bad checksum line {line:?}")))?;
        let name = file.trim().trim_end_matches(".json");
        let text = source(name).ok_or_else(|| Error::Parse(format!("unknown fixture {file}")))?;
        let actual: String = Sha256::digest(text.as_bytes())
            .iter()
            .map(|b| format!("{b:02x}"))
            .collect();
        if actual != sum {
            return Err(Error::Parse(format!("checksum mismatch for {file}")));
        }
    }
    Ok(())
}

pub fn cm4() -> CostMatrix {
    by_name("cm4").expect("bundled fixture")
}

pub fn cm1() -> CostMatrix {
    by_name("cm1").expect("bundled fixture")
}

pub fn cm2() -> CostMatrix {
    by_name("cm2").expect("bundled fixture")
}

pub fn cm8() -> CostMatrix {
    by_name("cm8").expect("bundled fixture")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fixtures_load_and_match_checksums() {
        verify_checksums().unwrap();
        assert_eq!(cm4().n(), 4);
        assert!(cm1().is_symmetric());
        assert!(!cm2().is_symmetric());
        assert!(cm8().is_symmetric());
        assert!(by_name("cm9").is_err());
    }
}
