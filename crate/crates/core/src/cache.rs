//! JSON persistence of the Serre echelon cache.

use std::collections::BTreeSet;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::algebra::{Algebra, SerreBlock};
use crate::error::{Error, Result};
use crate::expr::parse_scalar;

pub const CACHE_VERSION: u32 = 1;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CacheFile {
    pub version: u32,
    /// SHA-256 of the Cartan datum the rows were computed for.
    pub datum: String,
    pub blocks: Vec<CacheBlock>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CacheBlock {
    pub degree: Vec<u32>,
    pub canonical: Vec<Vec<u32>>,
    pub rows: Vec<CacheRow>,
}

/// `pivot = sum terms`, with coefficients in the text grammar.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CacheRow {
    pub pivot: Vec<u32>,
    pub terms: Vec<(Vec<u32>, String)>,
}

pub fn export(alg: &Algebra) -> CacheFile {
    let blocks = alg
        .cached_blocks()
        .iter()
        .map(|b| CacheBlock {
            degree: b.degree.clone(),
            canonical: b.canonical.iter().cloned().collect(),
            rows: b
                .reductions
                .iter()
                .map(|(p, terms)| CacheRow {
                    pivot: p.clone(),
                    terms: terms.iter().map(|(w, c)| (w.clone(), c.to_q_string())).collect(),
                })
                .collect(),
        })
        .collect();
    CacheFile { version: CACHE_VERSION, datum: alg.datum().digest(), blocks }
}

/// Loads every block of `file` into the algebra's cache; returns the block count.
pub fn import(alg: &Algebra, file: &CacheFile) -> Result<usize> {
    if file.version != CACHE_VERSION {
        return Err(Error::Cache(format!("unsupported version {}", file.version)));
    }
    if file.datum != alg.datum().digest() {
        return Err(Error::Cache("the file was written for a different Cartan datum".into()));
    }
    for b in &file.blocks {
        if b.degree.len() != alg.rank() {
            return Err(Error::Cache(format!("degree {:?} has the wrong rank", b.degree)));
        }
        let canonical: BTreeSet<Vec<u32>> = b.canonical.iter().cloned().collect();
        let mut reductions = std::collections::BTreeMap::new();
        for row in &b.rows {
            let mut terms = Vec::with_capacity(row.terms.len());
            for (w, c) in &row.terms {
                if !canonical.contains(w) {
                    return Err(Error::Cache(format!("row for {:?} uses a non-canonical word", row.pivot)));
                }
                terms.push((w.clone(), parse_scalar(c)?));
            }
            reductions.insert(row.pivot.clone(), terms);
        }
        alg.insert_block(SerreBlock { degree: b.degree.clone(), canonical, reductions });
    }
    Ok(file.blocks.len())
}

pub fn write_file(alg: &Algebra, path: &Path) -> Result<usize> {
    let file = export(alg);
    std::fs::write(path, serde_json::to_string_pretty(&file)? + "\n")?;
    Ok(file.blocks.len())
}

pub fn read_file(alg: &Algebra, path: &Path) -> Result<usize> {
    let text = std::fs::read_to_string(path)?;
    let file: CacheFile = serde_json::from_str(&text)?;
    import(alg, &file)
}
