//! The persistent code catalog: append-only JSON lines with a disposable
//! binary offset sidecar, plus entry fingerprints.

use crate::canon::CanonicalForm;
use crate::codeparams::{weight_enumerator, CodeParams, EnumeratorMode};
use crate::mirror::{MirrorSpec, MirrorError};
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use std::fs::{File, OpenOptions};
use std::io::{BufRead, BufReader, Read, Write};
use std::path::{Path, PathBuf};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum CatalogError {
    #[error("catalog I/O: {0}")]
    Io(#[from] std::io::Error),
    #[error("corrupt catalog line {line}: {message}")]
    Corrupt { line: usize, message: String },
    #[error(transparent)]
    Spec(#[from] MirrorError),
}

/// 128-bit gauge-invariant hash of (n, k, truncated weight enumerator up to
/// max check weight + 2, sorted row-weight multiset).
pub fn fingerprint(t: &crate::mirror::StabilizerTableau) -> Result<u128, MirrorError> {
    let k = crate::codeparams::logical_dimension(t);
    let w = t.max_row_weight();
    // full Gray-code enumeration is much cheaper than the collision search
    // at small rank; both routes count the same truncated coefficients
    let cutoff = (w + 2).min(t.n);
    let enumerator = if t.n - k <= 22 {
        let mut e = weight_enumerator(t, EnumeratorMode::Full).expect("rank checked");
        e.coefficients.truncate(cutoff + 1);
        e.truncated_at = Some(cutoff);
        e
    } else {
        weight_enumerator(t, EnumeratorMode::Cutoff(cutoff))
            .expect("cutoff enumerator has no size bound")
    };
    let mut hasher = Sha256::new();
    hasher.update((t.n as u64).to_le_bytes());
    hasher.update((k as u64).to_le_bytes());
    for c in &enumerator.coefficients {
        hasher.update(c.to_bytes_le());
        hasher.update([0xfe]);
    }
    for rw in t.row_weight_multiset() {
        hasher.update((rw as u32).to_le_bytes());
    }
    let digest = hasher.finalize();
    let mut bytes = [0u8; 16];
    bytes.copy_from_slice(&digest[..16]);
    Ok(u128::from_le_bytes(bytes))
}

pub fn fingerprint_spec(spec: &MirrorSpec) -> Result<u128, MirrorError> {
    let t = spec.build_tableau()?;
    fingerprint(&t)
}

/// CSS flags as stored in catalog records.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CssFlags {
    pub equiv_css: bool,
    pub hadamard_css: bool,
    /// Hadamard witness as coordinate tuples, when one exists
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witness: Option<Vec<Vec<u16>>>,
}

/// Where an entry came from: enough to reproduce it.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Provenance {
    pub run_id: String,
    pub unix_time: u64,
    pub seed: u64,
    pub distance_budget: usize,
    pub estimator_trials: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CatalogEntry {
    /// canonical spec as single-line JSON
    pub spec: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub canonical: Option<CanonicalForm>,
    pub params: CodeParams,
    pub css: CssFlags,
    /// hex-encoded 128-bit fingerprint
    pub fingerprint: String,
    pub provenance: Provenance,
}

impl CatalogEntry {
    pub fn spec(&self) -> Result<MirrorSpec, MirrorError> {
        MirrorSpec::from_json(&self.spec)
    }
}

/// Append-only JSON-lines store. The `.idx` sidecar holds little-endian u64
/// byte offsets of each line and is rebuilt whenever it is missing or stale.
pub struct Catalog {
    path: PathBuf,
    offsets: Vec<u64>,
}

impl Catalog {
    pub fn open(path: impl AsRef<Path>) -> Result<Catalog, CatalogError> {
        let path = path.as_ref().to_path_buf();
        let mut cat = Catalog { path, offsets: Vec::new() };
        cat.load_or_rebuild_index()?;
        Ok(cat)
    }

    fn idx_path(&self) -> PathBuf {
        let mut p = self.path.clone().into_os_string();
        p.push(".idx");
        PathBuf::from(p)
    }

    fn load_or_rebuild_index(&mut self) -> Result<(), CatalogError> {
        if !self.path.exists() {
            self.offsets.clear();
            return Ok(());
        }
        let file_len = std::fs::metadata(&self.path)?.len();
        if let Ok(mut f) = File::open(self.idx_path()) {
            let mut raw = Vec::new();
            f.read_to_end(&mut raw)?;
            if raw.len() % 8 == 0 {
                let offsets: Vec<u64> = raw
                    .chunks_exact(8)
                    .map(|c| u64::from_le_bytes(c.try_into().unwrap()))
                    .collect();
                // stale detection: last offset must be within the file
                if offsets.last().map_or(true, |&o| o < file_len) {
                    // cheap consistency: count lines
                    let count = BufReader::new(File::open(&self.path)?).lines().count();
                    if count == offsets.len() {
                        self.offsets = offsets;
                        return Ok(());
                    }
                }
            }
        }
        self.rebuild_index()
    }

    fn rebuild_index(&mut self) -> Result<(), CatalogError> {
        self.offsets.clear();
        let f = File::open(&self.path)?;
        let mut reader = BufReader::new(f);
        let mut offset = 0u64;
        let mut line = String::new();
        loop {
            line.clear();
            let n = reader.read_line(&mut line)?;
            if n == 0 {
                break;
            }
            if !line.trim().is_empty() {
                self.offsets.push(offset);
            }
            offset += n as u64;
        }
        let mut idx = File::create(self.idx_path())?;
        for &o in &self.offsets {
            idx.write_all(&o.to_le_bytes())?;
        }
        Ok(())
    }

    pub fn len(&self) -> usize {
        self.offsets.len()
    }

    pub fn is_empty(&self) -> bool {
        self.offsets.is_empty()
    }

    pub fn append(&mut self, entry: &CatalogEntry) -> Result<(), CatalogError> {
        let json = serde_json::to_string(entry).expect("entry serializes");
        let mut f = OpenOptions::new().create(true).append(true).open(&self.path)?;
        let offset = f.metadata()?.len();
        writeln!(f, "{json}")?;
        self.offsets.push(offset);
        let mut idx = OpenOptions::new()
            .create(true)
            .append(true)
            .open(self.idx_path())?;
        idx.write_all(&offset.to_le_bytes())?;
        Ok(())
    }

    pub fn entries(&self) -> Result<Vec<CatalogEntry>, CatalogError> {
        if !self.path.exists() {
            return Ok(Vec::new());
        }
        let reader = BufReader::new(File::open(&self.path)?);
        let mut out = Vec::new();
        for (i, line) in reader.lines().enumerate() {
            let line = line?;
            if line.trim().is_empty() {
                continue;
            }
            let entry: CatalogEntry = serde_json::from_str(&line).map_err(|e| {
                CatalogError::Corrupt { line: i + 1, message: e.to_string() }
            })?;
            out.push(entry);
        }
        Ok(out)
    }
}

/// Query filter over the catalog.
#[derive(Clone, Debug, Default, Serialize, Deserialize)]
pub struct CatalogFilter {
    pub n_min: Option<usize>,
    pub n_max: Option<usize>,
    pub min_k: Option<usize>,
    pub min_d: Option<usize>,
    pub hadamard_css: Option<bool>,
    pub max_weight: Option<usize>,
}

/// Matching entries sorted by (n, −k, −d).
pub fn catalog_query(
    catalog: &Catalog,
    filter: &CatalogFilter,
) -> Result<Vec<CatalogEntry>, CatalogError> {
    let mut out: Vec<CatalogEntry> = catalog
        .entries()?
        .into_iter()
        .filter(|e| {
            let p = &e.params;
            let d = p.d.value().unwrap_or(0);
            filter.n_min.map_or(true, |v| p.n >= v)
                && filter.n_max.map_or(true, |v| p.n <= v)
                && filter.min_k.map_or(true, |v| p.k >= v)
                && filter.min_d.map_or(true, |v| d >= v)
                && filter.hadamard_css.map_or(true, |v| e.css.hadamard_css == v)
                && filter.max_weight.map_or(true, |v| p.max_check_weight <= v)
        })
        .collect();
    out.sort_by(|a, b| {
        (a.params.n, std::cmp::Reverse(a.params.k), std::cmp::Reverse(a.params.d.value()))
            .cmp(&(b.params.n, std::cmp::Reverse(b.params.k), std::cmp::Reverse(b.params.d.value())))
    });
    Ok(out)
}
