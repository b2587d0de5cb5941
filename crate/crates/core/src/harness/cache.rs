//! Enumerated catalogs and their on-disk cache.
//!
//! Layout: `<cache>/v<FORMAT_VERSION>/<class>/size-<k>.txt` holds the
//! members of size `k` as concatenated matroid files, and `manifest.json`
//! records their fingerprints. Bumping the format version orphans old
//! directories, which invalidates them.

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use super::HarnessError;
use crate::algebra::Scalar;
use crate::format::{read_matroid, write_matroid};
use crate::fragility::{next_level, ClassId};
use crate::iso::{dedup, fingerprint, Fingerprint};
use crate::matroid::LinearMatroid;

pub const FORMAT_VERSION: u32 = 1;

/// Largest catalog size the CLI will enumerate.
pub const MAX_CATALOG_SIZE: usize = 12;

#[derive(Clone, Debug)]
pub struct CatalogEntry<S: Scalar> {
    pub name: String,
    pub matroid: LinearMatroid<S>,
    pub size: usize,
    pub class: ClassId,
    pub fingerprint: Fingerprint,
}

/// Isomorphism classes of 3-connected class members, by size.
#[derive(Clone, Debug)]
pub struct Catalog<S: Scalar> {
    pub class: ClassId,
    pub levels: BTreeMap<usize, Vec<LinearMatroid<S>>>,
}

#[derive(Serialize, Deserialize)]
struct Manifest {
    format_version: u32,
    class: String,
    fingerprints: BTreeMap<usize, Vec<String>>,
}

pub fn entry_name(class: ClassId, size: usize, index: usize) -> String {
    format!("{class}:{size}:{index}")
}

impl<S: Scalar> Catalog<S> {
    pub fn seeds(class: ClassId, seeds: Vec<LinearMatroid<S>>) -> Self {
        let size = seeds[0].size();
        Catalog { class, levels: BTreeMap::from([(size, dedup(seeds))]) }
    }

    pub fn min_size(&self) -> usize {
        *self.levels.keys().next().expect("seeded")
    }

    pub fn max_size(&self) -> usize {
        *self.levels.keys().next_back().expect("seeded")
    }

    pub fn level(&self, size: usize) -> &[LinearMatroid<S>] {
        self.levels.get(&size).map(Vec::as_slice).unwrap_or(&[])
    }

    pub fn counts(&self) -> BTreeMap<usize, usize> {
        self.levels.iter().map(|(k, v)| (*k, v.len())).collect()
    }

    /// Breadth-first growth by single-element extensions and coextensions.
    pub fn extend_to(&mut self, max_size: usize) -> Result<(), HarnessError> {
        if max_size > MAX_CATALOG_SIZE {
            return Err(HarnessError::ResourceGuard(max_size));
        }
        while self.max_size() < max_size {
            let next = next_level(self.level(self.max_size()), self.class)?;
            self.levels.insert(self.max_size() + 1, next);
        }
        Ok(())
    }

    pub fn entries(&self) -> Vec<CatalogEntry<S>> {
        self.levels
            .iter()
            .flat_map(|(&size, ms)| {
                ms.iter().enumerate().map(move |(i, m)| CatalogEntry {
                    name: entry_name(self.class, size, i),
                    matroid: m.clone(),
                    size,
                    class: self.class,
                    fingerprint: fingerprint(m),
                })
            })
            .collect()
    }

    /// Index of the member isomorphic to `m`.
    pub fn index_of(&self, m: &LinearMatroid<S>) -> Option<usize> {
        let fp = fingerprint(m);
        self.level(m.size()).iter().position(|x| fingerprint(x) == fp && crate::iso::is_isomorphic(x, m))
    }

    /// Hash of the serialized catalog; ties cached derivations to content.
    pub fn digest(&self) -> String {
        let mut h = Sha256::new();
        for ms in self.levels.values() {
            for m in ms {
                h.update(write_matroid(m).as_bytes());
            }
        }
        hex::encode(h.finalize())
    }

    fn dir(root: &Path, class: ClassId) -> PathBuf {
        root.join(format!("v{FORMAT_VERSION}")).join(class.name())
    }

    pub fn save(&self, root: &Path) -> Result<(), HarnessError> {
        let dir = Self::dir(root, self.class);
        fs::create_dir_all(&dir)?;
        let mut fingerprints = BTreeMap::new();
        for (size, ms) in &self.levels {
            let text: String = ms.iter().map(write_matroid).collect();
            fs::write(dir.join(format!("size-{size}.txt")), text)?;
            fingerprints.insert(*size, ms.iter().map(|m| fingerprint(m).short_hex()).collect());
        }
        let manifest = Manifest { format_version: FORMAT_VERSION, class: self.class.name().into(), fingerprints };
        fs::write(dir.join("manifest.json"), serde_json::to_string_pretty(&manifest)?)?;
        Ok(())
    }

    /// `Ok(None)` when nothing usable is cached; corrupt files are errors.
    pub fn load(root: &Path, class: ClassId) -> Result<Option<Self>, HarnessError> {
        let dir = Self::dir(root, class);
        let Ok(text) = fs::read_to_string(dir.join("manifest.json")) else { return Ok(None) };
        let manifest: Manifest = serde_json::from_str(&text)?;
        if manifest.format_version != FORMAT_VERSION
            || manifest.class != class.name()
            || manifest.fingerprints.is_empty()
        {
            return Ok(None);
        }
        let mut levels = BTreeMap::new();
        for (size, fps) in &manifest.fingerprints {
            let text = fs::read_to_string(dir.join(format!("size-{size}.txt")))?;
            let ms = split_files(&text).into_iter().map(read_matroid::<S>).collect::<Result<Vec<_>, _>>()?;
            let found: Vec<String> = ms.iter().map(|m| fingerprint(m).short_hex()).collect();
            if &found != fps {
                return Err(HarnessError::Cache(format!("{class} size {size}: fingerprints disagree with manifest")));
            }
            levels.insert(*size, ms);
        }
        Ok(Some(Catalog { class, levels }))
    }
}

/// Splits concatenated matroid files after each checksum line.
pub fn split_files(text: &str) -> Vec<&str> {
    let mut out = Vec::new();
    let mut start = 0;
    let mut pos = 0;
    for line in text.split_inclusive('\n') {
        pos += line.len();
        if line.starts_with("sha256 ") {
            out.push(&text[start..pos]);
            start = pos;
        }
    }
    out
}
