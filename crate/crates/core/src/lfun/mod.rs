//! Character L-functions of `C ⊗ F_{q^n}`.
//!
//! Both series methods first build a series with coefficients in the group
//! ring Z[J]: the coefficient of t^d at x counts effective divisors of degree
//! d in the class x (divisor sum), or comes from expanding the Euler product
//! over places (Euler product). Applying a character to that series gives the
//! L-series of the character.

mod artin;
mod product;

pub use artin::{change_of_variable_check, splitting_records, ChangeOfVariableReport, SplitRecord};
pub use product::{character_table_product, TableProduct, DEFAULT_PRODUCT_CAP};

use std::sync::Arc;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::census::CensusTable;
use crate::characters::Character;
use crate::curve::CurveModel;
use crate::cyclotomic::{CyclotomicInteger, ExponentReducer};
use crate::error::{Error, Result};
use crate::jacobian::JacobianGroup;

/// `series[d][x]` for d = 0..=trunc and x an element index.
pub type ClassSeries = Vec<Vec<i128>>;

/// L(t, C ⊗ F_{q^n}, χ) for a nontrivial χ: a polynomial of degree 2g - 2.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct LPolynomial {
    pub level: u32,
    pub character: Character,
    pub coeffs: Vec<CyclotomicInteger>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum LFunction {
    /// The zeta function `numerator / denominator` of `C ⊗ F_{q^n}`.
    Zeta { level: u32, numerator: Vec<i128>, denominator: Vec<i128> },
    Character(LPolynomial),
}

impl LFunction {
    pub fn level(&self) -> u32 {
        match self {
            LFunction::Zeta { level, .. } => *level,
            LFunction::Character(l) => l.level,
        }
    }
}

pub trait LSeriesMethod: Send + Sync {
    fn name(&self) -> &'static str;

    /// The group-ring series through degree `trunc`.
    fn class_series(
        &self,
        model: &CurveModel,
        group: &JacobianGroup,
        census: Option<&CensusTable>,
        trunc: u32,
    ) -> Result<ClassSeries>;
}

pub fn method_names() -> &'static [&'static str] {
    &["divisor-sum", "euler-product"]
}

pub fn series_method(name: &str) -> Result<Arc<dyn LSeriesMethod>> {
    match name {
        "divisor-sum" => Ok(Arc::new(DivisorSum)),
        "euler-product" => Ok(Arc::new(EulerProduct)),
        other => Err(Error::Unsupported(format!(
            "unknown L-series method '{other}' (known: {})",
            method_names().join(", ")
        ))),
    }
}

/// Coefficients from the census, with the closed form above degree 2g - 2.
pub struct DivisorSum;

impl LSeriesMethod for DivisorSum {
    fn name(&self) -> &'static str {
        "divisor-sum"
    }

    fn class_series(
        &self,
        _model: &CurveModel,
        group: &JacobianGroup,
        census: Option<&CensusTable>,
        trunc: u32,
    ) -> Result<ClassSeries> {
        let census = census.ok_or_else(|| Error::Precondition("the divisor sum needs a census".into()))?;
        if census.level != group.level() {
            return Err(Error::Precondition("census and group levels differ".into()));
        }
        (0..=trunc)
            .map(|d| {
                let slice = census.slice(d, group.order()).map_err(|_| {
                    Error::Precondition(format!("census is missing degree {d} (enumerated through {})", census.max_degree))
                })?;
                Ok(slice.into_iter().map(|c| c as i128).collect())
            })
            .collect()
    }
}

/// Expansion of Π_P (1 - [P] t^deg P)^(-1) through Newton's identities.
pub struct EulerProduct;

/// Group-ring product restricted to nonzero entries.
pub(crate) fn ring_mul(group: &JacobianGroup, a: &[i128], b: &[i128]) -> Vec<i128> {
    let nz_b: Vec<(usize, i128)> = b.iter().copied().enumerate().filter(|&(_, c)| c != 0).collect();
    let mut out = vec![0i128; a.len()];
    for (x, &ca) in a.iter().enumerate() {
        if ca == 0 {
            continue;
        }
        for &(y, cb) in &nz_b {
            out[group.add(x, y)] += ca * cb;
        }
    }
    out
}

impl LSeriesMethod for EulerProduct {
    fn name(&self) -> &'static str {
        "euler-product"
    }

    fn class_series(
        &self,
        model: &CurveModel,
        group: &JacobianGroup,
        _census: Option<&CensusTable>,
        trunc: u32,
    ) -> Result<ClassSeries> {
        let order = group.order();
        let places = if trunc == 0 { Vec::new() } else { model.places_up_to(group.level(), trunc)? };
        let classes: Vec<(u32, usize)> =
            places.par_iter().map(|p| Ok((p.degree, group.place_class(model, p)?))).collect::<Result<_>>()?;
        // power sums S_m = Σ_{deg P | m} deg P · [(m / deg P) P]
        let mut sums = vec![vec![0i128; order]; trunc as usize + 1];
        for &(d, x) in &classes {
            for k in 1..=trunc / d {
                sums[(k * d) as usize][group.mul(x, k as i64)] += d as i128;
            }
        }
        let mut series: ClassSeries = Vec::with_capacity(trunc as usize + 1);
        let mut one = vec![0i128; order];
        one[group.zero()] = 1;
        series.push(one);
        for m in 1..=trunc as usize {
            let mut acc = vec![0i128; order];
            for i in 1..=m {
                for (a, b) in acc.iter_mut().zip(ring_mul(group, &sums[i], &series[m - i])) {
                    *a += b;
                }
            }
            let mut next = Vec::with_capacity(order);
            for a in acc {
                if a % m as i128 != 0 {
                    return Err(Error::Inconsistent(format!("Newton step {m} is not integral")));
                }
                next.push(a / m as i128);
            }
            series.push(next);
        }
        Ok(series)
    }
}

/// Exponents k with χ(x) = ζ_N^k for every element of the group.
pub fn character_exponents(group: &JacobianGroup, chi: &Character) -> Vec<u32> {
    (0..group.order()).map(|x| chi.value_exponent(group.coords(x)) as u32).collect()
}

/// Σ_x series[d][x] χ(x) for each degree, as exponent-count vectors of length N.
pub fn exponent_counts(exps: &[u32], modulus: u64, series: &ClassSeries) -> Vec<Vec<i128>> {
    series
        .iter()
        .map(|row| {
            let mut acc = vec![0i128; modulus as usize];
            for (&k, &c) in exps.iter().zip(row) {
                acc[k as usize] += c;
            }
            acc
        })
        .collect()
}

/// The χ-series of a group-ring series.
pub fn apply_character(group: &JacobianGroup, chi: &Character, series: &ClassSeries) -> Vec<CyclotomicInteger> {
    let reducer = ExponentReducer::new(chi.modulus() as u32);
    let exps = character_exponents(group, chi);
    exponent_counts(&exps, chi.modulus(), series).into_iter().map(|v| reducer.reduce(v)).collect()
}

/// The Euler product of χ through degree `trunc`.
pub fn euler_product_truncation(
    model: &CurveModel,
    group: &JacobianGroup,
    chi: &Character,
    trunc: u32,
) -> Result<Vec<CyclotomicInteger>> {
    let series = EulerProduct.class_series(model, group, None, trunc)?;
    Ok(apply_character(group, chi, &series))
}

fn zeta_of(model: &CurveModel, n: u32) -> Result<LFunction> {
    let qn = model.q().pow(n) as i128;
    Ok(LFunction::Zeta { level: n, numerator: model.level_zeta_numerator(n)?, denominator: vec![1, -1 - qn, qn] })
}

fn polynomial_from(model: &CurveModel, group: &JacobianGroup, chi: &Character, series: &ClassSeries) -> Result<LFunction> {
    let deg = (2 * model.genus() as usize).saturating_sub(2);
    let coeffs: Vec<CyclotomicInteger> = apply_character(group, chi, series).into_iter().take(deg + 1).collect();
    if coeffs[0] != CyclotomicInteger::one(chi.modulus() as u32) {
        return Err(Error::Inconsistent("L-polynomial with constant term different from 1".into()));
    }
    Ok(LFunction::Character(LPolynomial { level: group.level(), character: chi.clone(), coeffs }))
}

/// L(t, C ⊗ F_{q^n}, χ) by the chosen series method.
pub fn l_polynomial(
    model: &CurveModel,
    group: &JacobianGroup,
    census: Option<&CensusTable>,
    chi: &Character,
    method: &dyn LSeriesMethod,
) -> Result<LFunction> {
    if chi.is_trivial() {
        return zeta_of(model, group.level());
    }
    let deg = (2 * model.genus()).saturating_sub(2);
    let series = method.class_series(model, group, census, deg)?;
    polynomial_from(model, group, chi, &series)
}

/// L-functions of every character in the given order.
pub fn all_l_functions(
    model: &CurveModel,
    group: &JacobianGroup,
    census: Option<&CensusTable>,
    chars: &[Character],
    method: &dyn LSeriesMethod,
) -> Result<Vec<LFunction>> {
    let deg = (2 * model.genus()).saturating_sub(2);
    let series = method.class_series(model, group, census, deg)?;
    chars
        .par_iter()
        .map(|chi| if chi.is_trivial() { zeta_of(model, group.level()) } else { polynomial_from(model, group, chi, &series) })
        .collect()
}

/// Whether Σ_x N(x, d) χ(x) vanishes at d = 2g - 1 and 2g for a nontrivial χ.
pub fn tail_vanishes(group: &JacobianGroup, census: &CensusTable, chi: &Character) -> Result<bool> {
    let g = census.genus;
    let series: ClassSeries = (2 * g - 1..=2 * g)
        .map(|d| Ok(census.slice(d, group.order())?.into_iter().map(|c| c as i128).collect()))
        .collect::<Result<_>>()?;
    Ok(apply_character(group, chi, &series).iter().all(|c| c.is_zero()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::census::{census, effective_divisor_counts};
    use crate::characters::all_characters;
    use crate::field::make_field;
    use crate::jacobian::{group_law, BasePointConfig};

    #[test]
    fn methods_agree_and_trivial_character_gives_zeta() {
        let c = CurveModel::new(make_field(3, 1).unwrap(), vec![], vec![1, 2, 0, 0, 0, 1], "t").unwrap();
        let base = BasePointConfig::default_for(&c).unwrap();
        for n in 1..=2 {
            let g = JacobianGroup::build(&c, &base, group_law("riemann-roch").unwrap(), n, 5000).unwrap();
            let t = census(&c, &g, 2).unwrap();
            let a = DivisorSum.class_series(&c, &g, Some(&t), 4).unwrap();
            let b = EulerProduct.class_series(&c, &g, None, 4).unwrap();
            assert_eq!(a, b);
            let zeta = effective_divisor_counts(&c, n, 4).unwrap();
            for d in 0..=4 {
                assert_eq!(b[d].iter().sum::<i128>(), zeta[d]);
            }
            for chi in all_characters(g.invariants(), 5000).unwrap().iter().skip(1) {
                assert!(tail_vanishes(&g, &t, chi).unwrap());
                let LFunction::Character(l) = l_polynomial(&c, &g, Some(&t), chi, &EulerProduct).unwrap() else {
                    panic!()
                };
                assert_eq!(l.coeffs.len(), 3);
            }
        }
    }
}
