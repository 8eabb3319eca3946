//! The change of variable relating L-functions over F_{q^n} to products over
//! the places of C: `L(t^n, C ⊗ F_{q^n}, χ)` equals the product over places P
//! of C of `Π_{Q | P} (1 - χ(Frob_Q) t^(n deg Q))^(-1)`.

use serde::{Deserialize, Serialize};

use super::{apply_character, ClassSeries, DivisorSum, LSeriesMethod};
use crate::arith;
use crate::census::CensusTable;
use crate::characters::Character;
use crate::curve::{CurveModel, Place};
use crate::error::{Error, Result};
use crate::jacobian::JacobianGroup;

/// How one place of C splits over F_{q^n}.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SplitRecord {
    pub place_degree: u32,
    pub split_degrees: Vec<u32>,
    pub law_holds: bool,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ChangeOfVariableReport {
    pub level: u32,
    pub trunc: u32,
    pub passed: bool,
    /// (character exponents, series agree)
    pub per_character: Vec<(Vec<u64>, bool)>,
    pub splitting: Vec<SplitRecord>,
    pub splitting_law_holds: bool,
}

fn split_record(degree: u32, n: u32, above: &[Place]) -> SplitRecord {
    let g = arith::gcd(n as u64, degree as u64) as u32;
    let split_degrees: Vec<u32> = above.iter().map(|q| q.degree).collect();
    let law_holds = above.len() as u32 == g && split_degrees.iter().all(|&e| e == degree / g);
    SplitRecord { place_degree: degree, split_degrees, law_holds }
}

/// How every place of C of degree at most `max_degree` splits over F_{q^n}.
pub fn splitting_records(model: &CurveModel, n: u32, max_degree: u32) -> Result<Vec<SplitRecord>> {
    let places = if max_degree == 0 { Vec::new() } else { model.places_up_to(1, max_degree)? };
    places.iter().map(|p| Ok(split_record(p.degree, n, &model.split_place(p, n)?))).collect()
}

pub fn change_of_variable_check(
    model: &CurveModel,
    group: &JacobianGroup,
    census: &CensusTable,
    chars: &[Character],
    trunc: u32,
) -> Result<ChangeOfVariableReport> {
    let n = group.level();
    let order = group.order();

    // left side: the level-n series in t^n
    let inner = DivisorSum.class_series(model, group, Some(census), trunc / n)?;
    let mut lhs: ClassSeries = vec![vec![0; order]; trunc as usize + 1];
    for (d, row) in inner.into_iter().enumerate() {
        lhs[d * n as usize] = row;
    }

    // right side: grouped Euler factors over the places of C
    let mut rhs: ClassSeries = vec![vec![0; order]; trunc as usize + 1];
    rhs[0][group.zero()] = 1;
    let places = if trunc == 0 { Vec::new() } else { model.places_up_to(1, trunc)? };
    let mut splitting = Vec::new();
    for p in &places {
        // every place above has t-degree lcm(n, deg p)
        if arith::lcm(n as u64, p.degree as u64) > trunc as u64 {
            continue;
        }
        let above = model.split_place(p, n)?;
        splitting.push(split_record(p.degree, n, &above));
        for q in &above {
            let e = (n * q.degree) as usize;
            let x = group.place_class(model, q)?;
            for m in e..=trunc as usize {
                let prev = rhs[m - e].clone();
                for (y, &c) in prev.iter().enumerate() {
                    if c != 0 {
                        rhs[m][group.add(y, x)] += c;
                    }
                }
            }
        }
    }
    let splitting_law_holds = splitting.iter().all(|s| s.law_holds);

    let per_character: Vec<(Vec<u64>, bool)> = chars
        .iter()
        .map(|chi| {
            if chi.invariants != group.invariants() {
                return Err(Error::Precondition("character of a different group".into()));
            }
            Ok((chi.exponents.clone(), apply_character(group, chi, &lhs) == apply_character(group, chi, &rhs)))
        })
        .collect::<Result<_>>()?;
    let passed = splitting_law_holds && lhs == rhs && per_character.iter().all(|(_, ok)| *ok);
    Ok(ChangeOfVariableReport { level: n, trunc, passed, per_character, splitting, splitting_law_holds })
}
