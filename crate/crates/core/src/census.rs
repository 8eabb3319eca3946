//! Effective divisors and the class-count tables `N(x, d) = #{D >= 0 : D ~ x + d D1}`.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::curve::{CurveModel, Place};
use crate::error::{Error, Result};
use crate::jacobian::{Divisor, JacobianGroup};

/// Class counts indexed by degree, then by element index of the group.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CensusTable {
    pub level: u32,
    pub genus: u32,
    /// q^level
    pub field_size: u64,
    pub max_degree: u32,
    pub counts: Vec<Vec<u64>>,
}

impl CensusTable {
    /// N(x, d), using the closed form above the enumerated range when d > 2g - 2.
    pub fn count(&self, x: usize, d: u32) -> Result<u64> {
        if d <= self.max_degree {
            return Ok(self.counts[d as usize][x]);
        }
        closed_form(self.genus, self.field_size, d)
    }

    /// The full slice of degree d.
    pub fn slice(&self, d: u32, order: usize) -> Result<Vec<u64>> {
        if d <= self.max_degree {
            return Ok(self.counts[d as usize].clone());
        }
        Ok(vec![closed_form(self.genus, self.field_size, d)?; order])
    }
}

fn closed_form(g: u32, qn: u64, d: u32) -> Result<u64> {
    if (d as i64) <= 2 * g as i64 - 2 {
        return Err(Error::Precondition(format!("closed form needs d > 2g - 2, got d = {d}")));
    }
    let e = d + 1 - g;
    let top = (qn as u128).checked_pow(e).ok_or(Error::CapExceeded { what: "census count", value: u128::MAX, cap: u64::MAX as u128 })?;
    u64::try_from((top - 1) / (qn as u128 - 1))
        .map_err(|_| Error::CapExceeded { what: "census count", value: top, cap: u64::MAX as u128 })
}

/// `(q_n^(d-g+1) - 1) / (q_n - 1)`, the size of every class of degree d > 2g - 2.
pub fn class_count_closed_form(model: &CurveModel, d: u32, n: u32) -> Result<u64> {
    closed_form(model.genus(), model.q().pow(n), d)
}

/// Coefficients of `P_n(t) / ((1 - t)(1 - q^n t))` through degree `dmax`.
pub fn effective_divisor_counts(model: &CurveModel, n: u32, dmax: usize) -> Result<Vec<i128>> {
    let p = model.level_zeta_numerator(n)?;
    let qn = model.q().pow(n) as i128;
    let mut out = Vec::with_capacity(dmax + 1);
    for d in 0..=dmax {
        // 1/((1-t)(1-qt)) has coefficients (q^(k+1) - 1)/(q - 1)
        let mut s: i128 = 0;
        for (i, &c) in p.iter().enumerate().take(d + 1) {
            let k = (d - i) as u32;
            s += c * ((qn.pow(k + 1) - 1) / (qn - 1));
        }
        out.push(s);
    }
    Ok(out)
}

fn places_for(model: &CurveModel, n: u32, d: u32) -> Result<Vec<Place>> {
    model.places_up_to(n, d.max(1))
}

/// All effective divisors of degree d on `C ⊗ F_{q^n}` in a fixed order.
pub fn effective_divisors(model: &CurveModel, n: u32, d: u32, bound: u32) -> Result<Vec<Divisor>> {
    if d > bound {
        return Err(Error::CapExceeded { what: "effective-divisor degree", value: d as u128, cap: bound as u128 });
    }
    let places = places_for(model, n, d)?;
    let mut out = Vec::new();
    let mut stack: Vec<usize> = Vec::new();
    fn walk(places: &[Place], start: usize, left: u32, stack: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if left == 0 {
            out.push(stack.clone());
            return;
        }
        for i in start..places.len() {
            if places[i].degree > left {
                break;
            }
            stack.push(i);
            walk(places, i, left - places[i].degree, stack, out);
            stack.pop();
        }
    }
    let mut picks = Vec::new();
    walk(&places, 0, d, &mut stack, &mut picks);
    for pick in picks {
        out.push(Divisor::from_terms(n, pick.into_iter().map(|i| (places[i], 1)))?);
    }
    Ok(out)
}

/// Histogram of classes of effective divisors of degree d, indexed like the group.
pub fn class_counts(model: &CurveModel, group: &JacobianGroup, d: u32) -> Result<Vec<u64>> {
    let order = group.order();
    if d == 0 {
        let mut h = vec![0; order];
        h[group.zero()] = 1;
        return Ok(h);
    }
    let places = places_for(model, group.level(), d)?;
    let classes: Vec<usize> = places.iter().map(|p| group.place_class(model, p)).collect::<Result<_>>()?;

    // multisets listed by a non-increasing index sequence, split on the first index
    fn walk(
        group: &JacobianGroup,
        places: &[Place],
        classes: &[usize],
        end: usize,
        left: u32,
        acc: usize,
        hist: &mut [u64],
    ) -> Result<()> {
        if left == 0 {
            hist[acc] = hist[acc].checked_add(1).ok_or(Error::CapExceeded {
                what: "census count",
                value: u128::MAX,
                cap: u64::MAX as u128,
            })?;
            return Ok(());
        }
        for i in 0..end {
            if places[i].degree > left {
                break;
            }
            walk(group, places, classes, i + 1, left - places[i].degree, group.add(acc, classes[i]), hist)?;
        }
        Ok(())
    }
    let parts: Vec<Vec<u64>> = (0..classes.len())
        .into_par_iter()
        .map(|top| {
            let mut hist = vec![0u64; order];
            walk(group, &places, &classes, top + 1, d - places[top].degree, classes[top], &mut hist)?;
            Ok(hist)
        })
        .collect::<Result<_>>()?;
    let mut total = vec![0u64; order];
    for part in parts {
        for (t, c) in total.iter_mut().zip(part) {
            *t += c;
        }
    }
    Ok(total)
}

/// Class counts for every degree 0..=max_degree.
pub fn census(model: &CurveModel, group: &JacobianGroup, max_degree: u32) -> Result<CensusTable> {
    let counts = (0..=max_degree).map(|d| class_counts(model, group, d)).collect::<Result<_>>()?;
    Ok(CensusTable {
        level: group.level(),
        genus: model.genus(),
        field_size: model.q().pow(group.level()),
        max_degree,
        counts,
    })
}

/// Census through degree 2g - 2, the range not covered by the closed form.
pub fn default_census(model: &CurveModel, group: &JacobianGroup) -> Result<CensusTable> {
    census(model, group, (2 * model.genus()).saturating_sub(2))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::make_field;
    use crate::jacobian::{group_law, BasePointConfig};

    fn setup(p: u32, f: Vec<u32>, n: u32) -> (CurveModel, JacobianGroup) {
        let c = CurveModel::new(make_field(p, 1).unwrap(), vec![], f, "t").unwrap();
        let base = BasePointConfig::default_for(&c).unwrap();
        let g = JacobianGroup::build(&c, &base, group_law("riemann-roch").unwrap(), n, 5000).unwrap();
        (c, g)
    }

    #[test]
    fn counts_match_zeta_series_and_closed_form() {
        for (p, f, n) in [(3, vec![1, 2, 0, 0, 0, 1], 1), (3, vec![1, 2, 0, 0, 0, 1], 2), (3, vec![1, 0, 1, 1, 0, 0, 1], 1)] {
            let (c, g) = setup(p, f, n);
            let gen = c.genus();
            let table = census(&c, &g, 2 * gen).unwrap();
            let series = effective_divisor_counts(&c, n, 2 * gen as usize).unwrap();
            for d in 0..=2 * gen {
                let s: u64 = table.counts[d as usize].iter().sum();
                assert_eq!(s as i128, series[d as usize], "degree {d}");
                let direct = effective_divisors(&c, n, d, 2 * gen).unwrap();
                assert_eq!(direct.len() as u64, s);
                if d > 2 * gen - 2 {
                    let cf = class_count_closed_form(&c, d, n).unwrap();
                    assert!(table.counts[d as usize].iter().all(|&x| x == cf));
                }
            }
            assert!(table.counts[1].iter().all(|&x| x <= 1));
        }
    }

    #[test]
    fn enumeration_matches_reduction_per_class() {
        let (c, g) = setup(3, vec![1, 2, 0, 0, 0, 1], 1);
        for d in 0..=3 {
            let mut h = vec![0u64; g.order()];
            for e in effective_divisors(&c, 1, d, 4).unwrap() {
                h[g.class_index(&c, &e).unwrap()] += 1;
            }
            assert_eq!(h, class_counts(&c, &g, d).unwrap());
        }
    }

    #[test]
    fn closed_form_examples() {
        assert_eq!(closed_form(2, 3, 3).unwrap(), 4);
        assert_eq!(closed_form(1, 7, 1).unwrap(), 1);
        assert!(closed_form(2, 3, 2).is_err());
    }
}
