//! On-disk census slices keyed by a content hash of (curve, D1, n, d).

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use anyhow::Context;
use hcfl_core::census::{class_counts, CensusTable};
use hcfl_core::curve::CurveModel;
use hcfl_core::jacobian::JacobianGroup;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::spec::{divisor_spec, CurveSpec, TermSpec};

pub const CACHE_ENV: &str = "HCFL_CACHE_DIR";
const FORMAT: u32 = 1;

#[derive(Serialize)]
struct Key<'a> {
    format: u32,
    curve: &'a CurveSpec,
    d1: &'a [TermSpec],
    n: u32,
    d: u32,
}

#[derive(Serialize, Deserialize)]
struct Entry {
    key: String,
    order: usize,
    counts: Vec<u64>,
}

pub struct Cache {
    dir: Option<PathBuf>,
}

impl Cache {
    /// `--cache-dir` wins over the environment; without either, nothing is cached.
    pub fn new(flag: Option<PathBuf>, disabled: bool) -> Self {
        let dir = if disabled { None } else { flag.or_else(|| std::env::var_os(CACHE_ENV).map(PathBuf::from)) };
        Cache { dir }
    }

    fn key(model: &CurveModel, group: &JacobianGroup, d: u32) -> String {
        let mut curve = CurveSpec::of_model(model);
        curve.label.clear();
        let d1 = divisor_spec(group.base().divisor());
        let key = Key { format: FORMAT, curve: &curve, d1: &d1, n: group.level(), d };
        let text = serde_json::to_string(&key).expect("key serializes");
        hex::encode(Sha256::digest(text.as_bytes()))
    }

    fn read(path: &Path, key: &str, order: usize) -> Option<Vec<u64>> {
        let text = fs::read_to_string(path).ok()?;
        let e: Entry = serde_json::from_str(&text).ok()?;
        (e.key == key && e.order == order && e.counts.len() == order).then_some(e.counts)
    }

    fn write(dir: &Path, path: &Path, entry: &Entry) -> anyhow::Result<()> {
        fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
        let tmp = dir.join(format!(".{}.{}.tmp", entry.key, std::process::id()));
        let mut f = fs::File::create(&tmp)?;
        f.write_all(serde_json::to_string(entry)?.as_bytes())?;
        f.sync_all()?;
        fs::rename(&tmp, path)?;
        Ok(())
    }

    /// N(x, d) for one degree, from the cache when present.
    pub fn slice(&self, model: &CurveModel, group: &JacobianGroup, d: u32) -> anyhow::Result<Vec<u64>> {
        let Some(dir) = &self.dir else {
            return Ok(class_counts(model, group, d)?);
        };
        let key = Self::key(model, group, d);
        let path = dir.join(format!("{key}.json"));
        if let Some(c) = Self::read(&path, &key, group.order()) {
            return Ok(c);
        }
        let counts = class_counts(model, group, d)?;
        let entry = Entry { key, order: group.order(), counts };
        Self::write(dir, &path, &entry)?;
        Ok(entry.counts)
    }

    /// The census through `max_degree`.
    pub fn census(&self, model: &CurveModel, group: &JacobianGroup, max_degree: u32) -> anyhow::Result<CensusTable> {
        let counts = (0..=max_degree).map(|d| self.slice(model, group, d)).collect::<anyhow::Result<_>>()?;
        Ok(CensusTable {
            level: group.level(),
            genus: model.genus(),
            field_size: model.q().pow(group.level()),
            max_degree,
            counts,
        })
    }
}
