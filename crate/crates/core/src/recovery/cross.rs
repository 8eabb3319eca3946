//! Comparison of L-data of two curves under supplied group isomorphisms.

use std::sync::Arc;

use serde::{Deserialize, Serialize};

use super::point_classes;
use crate::census::{census, CensusTable};
use crate::characters::{all_characters, Character};
use crate::curve::{CurveModel, GeometricPoint, Place};
use crate::cyclotomic::ExponentReducer;
use crate::error::{Error, Result};
use crate::jacobian::{include_class, BasePointConfig, Divisor, GroupLaw, JacobianGroup, DEFAULT_GROUP_CAP};
use crate::lfun::{character_exponents, exponent_counts, DivisorSum, LSeriesMethod};

/// ψ_n on generators: `images[i]` are the coordinates in J_{C'} of ψ_n(g_i).
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct LevelMap {
    pub level: u32,
    pub images: Vec<Vec<u64>>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CrossCurveMap {
    pub levels: Vec<LevelMap>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct LevelVerdict {
    pub level: u32,
    pub zeta_equal: bool,
    pub characters_checked: usize,
    /// Exponent vectors (characters of J_C) whose L-data differ.
    pub failing: Vec<Vec<u64>>,
    pub points_match: bool,
    pub all_equal: bool,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct CrossReport {
    pub n_max: u32,
    pub levels: Vec<LevelVerdict>,
    pub equal: bool,
    pub first_failure: Option<(u32, Vec<u64>)>,
}

/// The table x -> ψ(x) of a level map, after checking it is an isomorphism.
fn resolve(g: &JacobianGroup, h: &JacobianGroup, map: &LevelMap) -> Result<Vec<usize>> {
    if g.order() != h.order() {
        return Err(Error::Precondition(format!("groups of orders {} and {} at level {}", g.order(), h.order(), map.level)));
    }
    if map.images.len() != g.invariants().len() {
        return Err(Error::Precondition(format!("level {} map has {} images for {} generators", map.level, map.images.len(), g.invariants().len())));
    }
    let images: Vec<usize> = map
        .images
        .iter()
        .map(|c| {
            if c.len() != h.invariants().len() {
                return Err(Error::Precondition("image coordinates of the wrong length".into()));
            }
            Ok(h.from_coords(c))
        })
        .collect::<Result<_>>()?;
    for (&img, &d) in images.iter().zip(g.invariants()) {
        if h.mul(img, d as i64) != h.zero() {
            return Err(Error::Precondition(format!("level {} map is not a homomorphism", map.level)));
        }
    }
    let table: Vec<usize> = (0..g.order())
        .map(|x| {
            g.coords(x).iter().zip(&images).fold(h.zero(), |acc, (&e, &img)| h.add(acc, h.mul(img, e as i64)))
        })
        .collect();
    let mut seen = vec![false; h.order()];
    for &y in &table {
        if std::mem::replace(&mut seen[y], true) {
            return Err(Error::Precondition(format!("level {} map is not injective", map.level)));
        }
    }
    Ok(table)
}

struct Level {
    n: u32,
    g: JacobianGroup,
    h: JacobianGroup,
    table: Vec<usize>,
}

/// Index in `big` of the image of each generator of `small` under inclusion.
fn include_generators(model: &CurveModel, small: &JacobianGroup, big: &JacobianGroup) -> Result<Vec<usize>> {
    let m = big.level() / small.level();
    small
        .generator_indices()
        .iter()
        .map(|&i| {
            let x = include_class(model, small.base(), small.law().as_ref(), small.element(i), m)?;
            big.index_of(&x).ok_or_else(|| Error::Inconsistent("included class missing".into()))
        })
        .collect()
}

fn series_of(model: &CurveModel, g: &JacobianGroup) -> Result<(CensusTable, crate::lfun::ClassSeries)> {
    let deg = (2 * model.genus()).saturating_sub(2);
    let t = census(model, g, deg)?;
    let s = DivisorSum.class_series(model, g, Some(&t), deg)?;
    Ok((t, s))
}

/// Compares `L(t, C ⊗ F_{q^n}, χ)` with `L(t, C' ⊗ F_{q^n}, χ ∘ ψ_n^(-1))` for all χ and n ≤ n_max.
#[allow(clippy::too_many_arguments)]
pub fn cross_curve_check(
    c: &CurveModel,
    base: &BasePointConfig,
    c2: &CurveModel,
    base2: &BasePointConfig,
    law: Arc<dyn GroupLaw>,
    psi: &CrossCurveMap,
    n_max: u32,
) -> Result<CrossReport> {
    if c.genus() != c2.genus() || c.base() != c2.base() {
        return Err(Error::Precondition("curves over different fields or of different genus".into()));
    }
    let mut levels: Vec<Level> = Vec::new();
    let mut verdicts = Vec::new();
    for n in 1..=n_max {
        let map = psi
            .levels
            .iter()
            .find(|m| m.level == n)
            .ok_or_else(|| Error::Precondition(format!("no map supplied for level {n}")))?;
        let g = JacobianGroup::build(c, base, law.clone(), n, DEFAULT_GROUP_CAP)?;
        let h = JacobianGroup::build(c2, base2, law.clone(), n, DEFAULT_GROUP_CAP)?;
        let table = resolve(&g, &h, map)?;
        for low in levels.iter().filter(|l| n % l.n == 0) {
            let inc = include_generators(c, &low.g, &g)?;
            let inc2 = include_generators(c2, &low.h, &h)?;
            for (k, &gen) in low.g.generator_indices().iter().enumerate() {
                // ψ_n(incl g) = incl'(ψ_low g), with incl' linear on generators of low.h
                let img = low.table[gen];
                let via = low.h.coords(img).iter().zip(&inc2).fold(h.zero(), |acc, (&e, &y)| h.add(acc, h.mul(y, e as i64)));
                if table[inc[k]] != via {
                    return Err(Error::Precondition(format!("maps at levels {} and {n} are not compatible", low.n)));
                }
            }
        }

        let (_, s1) = series_of(c, &g)?;
        let (_, s2) = series_of(c2, &h)?;
        let mut inverse = vec![0usize; h.order()];
        for (x, &y) in table.iter().enumerate() {
            inverse[y] = x;
        }
        let chars: Vec<Character> = all_characters(g.invariants(), DEFAULT_GROUP_CAP)?;
        let modulus = g.exponent();
        let reducer = ExponentReducer::new(modulus as u32);
        let mut failing = Vec::new();
        for chi in &chars {
            let e1 = character_exponents(&g, chi);
            let e2: Vec<u32> = inverse.iter().map(|&x| e1[x]).collect();
            let v1 = exponent_counts(&e1, modulus, &s1);
            let v2 = exponent_counts(&e2, modulus, &s2);
            let same = v1 == v2
                || v1.into_iter().zip(v2).all(|(a, b)| reducer.reduce(a) == reducer.reduce(b));
            if !same {
                failing.push(chi.exponents.clone());
            }
        }
        let zeta_equal = c.level_zeta_numerator(n)? == c2.level_zeta_numerator(n)?;
        let mut mapped: Vec<Vec<u64>> =
            point_classes(c, &g)?.iter().map(|x| h.coords(table[g.from_coords(x)]).to_vec()).collect();
        mapped.sort();
        let points_match = mapped == point_classes(c2, &h)?;
        let all_equal = zeta_equal && failing.is_empty() && points_match;
        verdicts.push(LevelVerdict { level: n, zeta_equal, characters_checked: chars.len(), failing, points_match, all_equal });
        levels.push(Level { n, g, h, table });
    }
    let first_failure = verdicts.iter().find_map(|v| v.failing.first().map(|f| (v.level, f.clone())));
    let equal = verdicts.iter().all(|v| v.all_equal);
    Ok(CrossReport { n_max, levels: verdicts, equal, first_failure })
}

fn transport_place(c: &CurveModel, twisted: &CurveModel, place: &Place, m: u32) -> Result<Place> {
    let pt = place.point();
    let l = c.level_field(pt.m)?;
    let image = GeometricPoint { m: pt.m, kind: pt.kind, x: l.frobenius(pt.x, m), y: l.frobenius(pt.y, m) };
    twisted.place_of_point(place.level, &image)
}

fn transport(c: &CurveModel, twisted: &CurveModel, d: &Divisor, m: u32) -> Result<Divisor> {
    let terms = d.terms().iter().map(|&(p, k)| Ok((transport_place(c, twisted, &p, m)?, k))).collect::<Result<Vec<_>>>()?;
    Divisor::from_terms(d.level(), terms)
}

/// The Frobenius twist of C with D1 and the class maps induced by `(x, y) -> (x^(p^m), y^(p^m))`.
pub fn twist_map(
    c: &CurveModel,
    base: &BasePointConfig,
    law: Arc<dyn GroupLaw>,
    m: u32,
    n_max: u32,
) -> Result<(CurveModel, BasePointConfig, CrossCurveMap)> {
    let twisted = c.frobenius_twist(m);
    let base2 = BasePointConfig::custom(transport(c, &twisted, base.divisor(), m)?)?;
    let mut levels = Vec::new();
    for n in 1..=n_max {
        let g = JacobianGroup::build(c, base, law.clone(), n, DEFAULT_GROUP_CAP)?;
        let h = JacobianGroup::build(&twisted, &base2, law.clone(), n, DEFAULT_GROUP_CAP)?;
        let images = g
            .generator_indices()
            .iter()
            .map(|&i| {
                let d = transport(c, &twisted, g.element(i).representative(), m)?;
                Ok(h.coords(h.class_index(&twisted, &d)?).to_vec())
            })
            .collect::<Result<_>>()?;
        levels.push(LevelMap { level: n, images });
    }
    Ok((twisted, base2, CrossCurveMap { levels }))
}

/// All isomorphisms J_C(F_{q^n}) -> J_{C'}(F_{q^n}) as level maps, up to `cap` candidates tried.
pub fn level_isomorphisms(g: &JacobianGroup, h: &JacobianGroup, cap: u64) -> Result<Vec<LevelMap>> {
    if g.invariants() != h.invariants() {
        return Ok(Vec::new());
    }
    // candidate images of each generator: elements of order dividing d_i
    let cands: Vec<Vec<usize>> = g
        .invariants()
        .iter()
        .map(|&d| (0..h.order()).filter(|&y| h.mul(y, d as i64) == h.zero()).collect())
        .collect();
    let total: u64 = cands.iter().map(|c| c.len() as u64).product();
    if total > cap {
        return Err(Error::CapExceeded { what: "isomorphism candidates", value: total as u128, cap: cap as u128 });
    }
    let mut out = Vec::new();
    for mut code in 0..total {
        let images: Vec<Vec<u64>> = cands
            .iter()
            .map(|c| {
                let y = c[(code % c.len() as u64) as usize];
                code /= c.len() as u64;
                h.coords(y).to_vec()
            })
            .collect();
        let map = LevelMap { level: g.level(), images };
        if resolve(g, h, &map).is_ok() {
            out.push(map);
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::make_field;
    use crate::jacobian::group_law;
    use crate::recovery::search_f3_example;

    #[test]
    fn level_one_agreement_does_not_survive_level_two() {
        let found = search_f3_example().unwrap();
        let a = &found.iter().find(|s| s.family == 0).unwrap().model;
        let b = &found.iter().find(|s| s.family == 1).unwrap().model;
        let law = group_law("riemann-roch").unwrap();
        let (ba, bb) = (BasePointConfig::default_for(a).unwrap(), BasePointConfig::default_for(b).unwrap());
        let build = |c, base, n| JacobianGroup::build(c, base, law.clone(), n, DEFAULT_GROUP_CAP).unwrap();
        let ones = level_isomorphisms(&build(a, &ba, 1), &build(b, &bb, 1), 1000).unwrap();
        let twos = level_isomorphisms(&build(a, &ba, 2), &build(b, &bb, 2), 1000).unwrap();
        assert_eq!((ones.len(), twos.len()), (4, 48));
        let mut level_one_equal = 0;
        let mut compatible = 0;
        for m1 in &ones {
            for m2 in &twos {
                let psi = CrossCurveMap { levels: vec![m1.clone(), m2.clone()] };
                let Ok(r) = cross_curve_check(a, &ba, b, &bb, law.clone(), &psi, 2) else { continue };
                compatible += 1;
                assert!(!r.levels[1].all_equal);
                if r.levels[0].all_equal {
                    level_one_equal += 1;
                    assert!(!r.levels[1].failing.is_empty());
                    assert_eq!(r.first_failure.as_ref().unwrap().0, 2);
                }
            }
        }
        assert_eq!(compatible, 48);
        assert_eq!(level_one_equal, 12);
    }

    #[test]
    fn twist_over_f9_is_indistinguishable() {
        let k = make_field(3, 2).unwrap();
        let g = k.generator();
        let c = [vec![g, 1, 0, 0, 0, 1], vec![g, 0, 1, 0, 0, 1], vec![g, 1, 1, 0, 0, 1], vec![g, 2, 0, 1, 0, 1]]
            .into_iter()
            .find_map(|f| CurveModel::new(k.clone(), vec![], f, "c").ok())
            .unwrap();
        let base = BasePointConfig::default_for(&c).unwrap();
        let law = group_law("riemann-roch").unwrap();
        let (tw, base2, psi) = twist_map(&c, &base, law.clone(), 1, 1).unwrap();
        assert_ne!(tw.f(), c.f());
        assert_eq!(tw.frobenius_twist(1).f(), c.f());
        let r = cross_curve_check(&c, &base, &tw, &base2, law, &psi, 1).unwrap();
        assert!(r.equal, "{r:?}");
    }
}
