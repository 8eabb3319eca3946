//! Reconstruction of the Abel-Jacobi image of the rational points from the
//! group structure and the L-data alone, and comparisons between curves.

mod cross;
mod search;

pub use cross::{
    cross_curve_check, level_isomorphisms, twist_map, CrossCurveMap, CrossReport, LevelMap, LevelVerdict,
};
pub use search::{are_isomorphic_hyperelliptic, search_f3_example, ExampleSurvivor};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::census::{census, CensusTable};
use crate::characters::{all_characters, Character};
use crate::curve::CurveModel;
use crate::cyclotomic::{CyclotomicInteger, ExponentReducer};
use crate::error::{Error, Result};
use crate::jacobian::{BasePointConfig, GroupLaw, JacobianGroup, DEFAULT_GROUP_CAP};
use crate::lfun::{apply_character, DivisorSum, LSeriesMethod};

/// The L-series coefficients c_0..c_D of one character.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct BundleEntry {
    pub character: Vec<u64>,
    pub coeffs: Vec<CyclotomicInteger>,
}

/// Group structure and L-data of `C ⊗ F_{q^n}`; nothing else about the curve.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct LDataBundle {
    pub level: u32,
    pub invariants: Vec<u64>,
    pub entries: Vec<BundleEntry>,
}

impl LDataBundle {
    pub fn order(&self) -> u64 {
        self.invariants.iter().product()
    }

    /// The bundle with every coefficient above `degree` removed.
    pub fn truncated(&self, degree: usize) -> Self {
        let mut b = self.clone();
        for e in b.entries.iter_mut() {
            e.coeffs.truncate(degree + 1);
        }
        b
    }

    /// Coordinates of every element in mixed-radix order (first coordinate fastest).
    pub fn elements(&self) -> Vec<Vec<u64>> {
        (0..self.order())
            .map(|mut code| {
                self.invariants
                    .iter()
                    .map(|&d| {
                        let c = code % d;
                        code /= d;
                        c
                    })
                    .collect()
            })
            .collect()
    }
}

/// Builds the bundle from geometry: coefficients through `degree` of every L-series.
/// The trivial character contributes the zeta series.
pub fn build_bundle(
    model: &CurveModel,
    group: &JacobianGroup,
    census: &CensusTable,
    degree: u32,
) -> Result<LDataBundle> {
    let series = DivisorSum.class_series(model, group, Some(census), degree)?;
    let chars = all_characters(group.invariants(), DEFAULT_GROUP_CAP)?;
    let entries = chars
        .par_iter()
        .map(|chi| BundleEntry { character: chi.exponents.clone(), coeffs: apply_character(group, chi, &series) })
        .collect();
    Ok(LDataBundle { level: group.level(), invariants: group.invariants().to_vec(), entries })
}

/// N(x, d) for every x (in the bundle's element order) by Fourier inversion in Z[ζ_N].
pub fn invert_counts(bundle: &LDataBundle, d: usize) -> Result<Vec<(Vec<u64>, u64)>> {
    let order = bundle.order();
    if bundle.entries.len() as u64 != order {
        return Err(Error::Inconsistent(format!("bundle has {} characters for a group of order {order}", bundle.entries.len())));
    }
    let modulus = bundle.invariants.last().copied().unwrap_or(1);
    let chars: Vec<(Character, Vec<(usize, i128)>)> = bundle
        .entries
        .iter()
        .map(|e| {
            if e.character.len() != bundle.invariants.len()
                || e.character.iter().zip(&bundle.invariants).any(|(a, d)| a >= d)
            {
                return Err(Error::Inconsistent(format!("malformed character {:?}", e.character)));
            }
            let c = e.coeffs.get(d).ok_or_else(|| Error::Precondition(format!("bundle lacks degree {d}")))?;
            let c = if c.order as u64 == modulus { c.clone() } else { c.lift(modulus as u32) };
            let nz = c.coeffs.iter().copied().enumerate().filter(|&(_, v)| v != 0).collect();
            Ok((Character { invariants: bundle.invariants.clone(), exponents: e.character.clone() }, nz))
        })
        .collect::<Result<_>>()?;
    let mut seen: Vec<&Vec<u64>> = chars.iter().map(|(c, _)| &c.exponents).collect();
    seen.sort();
    seen.dedup();
    if seen.len() as u64 != order {
        return Err(Error::Inconsistent("bundle repeats a character".into()));
    }
    let reducer = ExponentReducer::new(modulus as u32);
    let n = modulus as usize;
    bundle
        .elements()
        .into_par_iter()
        .map(|x| {
            let mut acc = vec![0i128; n];
            for (chi, nz) in &chars {
                // χ(-x) = ζ^(-e)
                let k = (n - chi.value_exponent(&x) as usize) % n;
                for &(j, v) in nz {
                    acc[(j + k) % n] += v;
                }
            }
            let total = reducer.reduce(acc);
            let value = total
                .as_integer()
                .ok_or_else(|| Error::Inconsistent(format!("inversion at {x:?} is not a rational integer")))?;
            if value % order as i128 != 0 {
                return Err(Error::Inconsistent(format!("inversion at {x:?} is not divisible by |G| = {order}")));
            }
            let count = value / order as i128;
            if count < 0 {
                return Err(Error::Inconsistent(format!("negative count {count} at {x:?}")));
            }
            Ok((x, count as u64))
        })
        .collect()
}

/// S = {x : N(x, 1) = 1}, using only the degree-one coefficients.
pub fn recover_point_classes(bundle: &LDataBundle) -> Result<Vec<Vec<u64>>> {
    let counts = invert_counts(bundle, 1)?;
    if let Some((x, c)) = counts.iter().find(|(_, c)| *c > 1) {
        return Err(Error::Inconsistent(format!("class {x:?} holds {c} points of degree one")));
    }
    let mut s: Vec<Vec<u64>> = counts.into_iter().filter(|(_, c)| *c == 1).map(|(x, _)| x).collect();
    s.sort();
    Ok(s)
}

/// Outcome of recovering the point classes from L-data.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct RecoveryReport {
    pub level: u32,
    pub group_order: u64,
    pub invariants: Vec<u64>,
    pub point_count: u64,
    pub recovered: Vec<Vec<u64>>,
    pub expected: Vec<Vec<u64>>,
    pub recovered_from_degree_one: Vec<Vec<u64>>,
    pub passed: bool,
}

/// Coordinates of the classes [P - D1] of the rational points.
pub fn point_classes(model: &CurveModel, group: &JacobianGroup) -> Result<Vec<Vec<u64>>> {
    let places = model.places_of_degree(group.level(), 1)?;
    let mut out: Vec<Vec<u64>> =
        places.iter().map(|p| Ok(group.coords(group.place_class(model, p)?).to_vec())).collect::<Result<_>>()?;
    out.sort();
    Ok(out)
}

/// Census, bundle and inversion with the geometry stripped in between.
pub fn verify_recovery(
    model: &CurveModel,
    base: &BasePointConfig,
    law: std::sync::Arc<dyn GroupLaw>,
    n: u32,
) -> Result<RecoveryReport> {
    let group = JacobianGroup::build(model, base, law, n, DEFAULT_GROUP_CAP)?;
    let degree = (2 * model.genus()).saturating_sub(2).max(1);
    let table = census(model, &group, degree)?;
    let bundle = build_bundle(model, &group, &table, degree)?;
    // the recovery side sees only serialized group and L-data
    let text = serde_json::to_string(&bundle).map_err(|e| Error::Inconsistent(e.to_string()))?;
    let bundle: LDataBundle = serde_json::from_str(&text).map_err(|e| Error::Inconsistent(e.to_string()))?;
    let recovered = recover_point_classes(&bundle)?;
    let recovered_from_degree_one = recover_point_classes(&bundle.truncated(1))?;
    let expected = point_classes(model, &group)?;
    let passed = recovered == expected && recovered_from_degree_one == expected;
    Ok(RecoveryReport {
        level: n,
        group_order: group.order() as u64,
        invariants: group.invariants().to_vec(),
        point_count: model.point_count(n)?,
        recovered,
        expected,
        recovered_from_degree_one,
        passed,
    })
}
