//! Curve, divisor and map files.

use std::path::Path;

use anyhow::{bail, Context};
use hcfl_core::curve::{CurveModel, Place, PointKind};
use hcfl_core::field::{canonical_image, make_field, Elem};
use hcfl_core::jacobian::{BasePointConfig, Divisor};
use hcfl_core::recovery::{CrossCurveMap, LevelMap};
use serde::{Deserialize, Serialize};

/// `y^2 + h(x) y = f(x)` over F_{p^a}. Coefficients are low degree first and
/// each is the index Σ c_i p^i of Σ c_i t^i in F_p[t]/(modulus). An empty
/// modulus selects the canonical one.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CurveSpec {
    pub p: u32,
    pub a: u32,
    #[serde(default)]
    pub modulus: Vec<u32>,
    #[serde(default)]
    pub h: Vec<u32>,
    pub f: Vec<u32>,
    #[serde(default)]
    pub label: String,
}

impl CurveSpec {
    pub fn load(path: &Path) -> anyhow::Result<Self> {
        let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
        serde_json::from_str(&text).with_context(|| format!("parsing curve file {}", path.display()))
    }

    pub fn model(&self) -> anyhow::Result<CurveModel> {
        let (field, image) = if self.modulus.is_empty() {
            let k = make_field(self.p, self.a)?;
            let id = k.elements().collect();
            (k, id)
        } else {
            if self.modulus.len() as u32 != self.a + 1 {
                bail!("modulus of degree {} for a field of degree {}", self.modulus.len().saturating_sub(1), self.a);
            }
            canonical_image(self.p, &self.modulus)?
        };
        let map = |v: &[u32]| -> anyhow::Result<Vec<Elem>> {
            v.iter()
                .map(|&c| image.get(c as usize).copied().with_context(|| format!("coefficient {c} outside F_{}^{}", self.p, self.a)))
                .collect()
        };
        Ok(CurveModel::new(field, map(&self.h)?, map(&self.f)?, self.label.clone())?)
    }

    /// The same curve written over the canonical modulus.
    pub fn of_model(model: &CurveModel) -> Self {
        let k = model.base();
        CurveSpec {
            p: k.characteristic(),
            a: k.degree(),
            modulus: k.modulus().to_vec(),
            h: model.h().to_vec(),
            f: model.f().to_vec(),
            label: model.label().to_string(),
        }
    }
}

/// A place of C over F_q; `x`, `y` are the coordinates of the least point of
/// the orbit in F_{q^degree}, canonical encoding.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PlaceSpec {
    pub kind: PointKind,
    pub degree: u32,
    pub x: u32,
    pub y: u32,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TermSpec {
    pub place: PlaceSpec,
    pub mult: i64,
}

pub fn divisor_spec(d: &Divisor) -> Vec<TermSpec> {
    d.terms()
        .iter()
        .map(|&(p, mult)| TermSpec { place: PlaceSpec { kind: p.kind, degree: p.degree, x: p.x, y: p.y }, mult })
        .collect()
}

pub fn base_from_spec(model: &CurveModel, terms: &[TermSpec]) -> anyhow::Result<BasePointConfig> {
    let mut out = Vec::new();
    for t in terms {
        let s = t.place;
        let place = Place { level: 1, degree: s.degree, kind: s.kind, x: s.x, y: s.y };
        if !model.places_of_degree(1, s.degree)?.contains(&place) {
            bail!("{s:?} is not a place of {}", model.label());
        }
        out.push((place, t.mult));
    }
    Ok(BasePointConfig::custom(Divisor::from_terms(1, out)?)?)
}

/// The isomorphisms ψ_n together with the degree-one divisors they refer to.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct MapFile {
    pub schema_version: u32,
    pub d1: Vec<TermSpec>,
    pub d1_prime: Vec<TermSpec>,
    pub levels: Vec<LevelMap>,
}

impl MapFile {
    pub fn load(path: &Path) -> anyhow::Result<Self> {
        let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
        serde_json::from_str(&text).with_context(|| format!("parsing map file {}", path.display()))
    }

    pub fn map(&self) -> CrossCurveMap {
        CrossCurveMap { levels: self.levels.clone() }
    }
}
