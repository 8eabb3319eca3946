//! Genus-2 curves over F_3 whose n = 1 L-data are forced, and an isomorphism
//! test for genus-2 hyperelliptic models.

use rayon::prelude::*;

use crate::census::census;
use crate::characters::all_characters;
use crate::curve::{CurveModel, Place};
use crate::cyclotomic::CyclotomicInteger;
use crate::error::{Error, Result};
use crate::field::{make_field, Elem, FieldDescriptor};
use crate::jacobian::{group_law, BasePointConfig, JacobianGroup, DEFAULT_GROUP_CAP};
use crate::lfun::{apply_character, DivisorSum, LSeriesMethod};
use crate::poly::{self, Poly};

#[derive(Clone, Debug)]
pub struct ExampleSurvivor {
    pub model: CurveModel,
    pub zeta_numerator: Vec<i128>,
    pub points_base: u64,
    pub points_quadratic: u64,
    pub jacobian_order: u64,
    /// The rational points, P < Q; D1 = P.
    pub p: Place,
    pub q: Place,
    /// Whether every nontrivial χ has L = 1 + (1 + ζ)t + 3ζt² with ζ = χ([Q - P]).
    pub l_data_match: bool,
    /// Isomorphism class among the survivors, numbered in order of appearance.
    pub family: usize,
}

fn has_factor_of_degree_at_most_two(k: &FieldDescriptor, f: &[Elem]) -> bool {
    // gcd(f, x^(q^2) - x) collects every irreducible factor of degree 1 or 2
    let q2 = (k.size() as u128).pow(2);
    let xp = poly::powmod(k, &poly::x(), q2, f);
    let g = poly::gcd(k, f, &poly::sub(k, &xp, &poly::x()));
    poly::degree(&g).map_or(true, |d| d > 0)
}

fn split_fibres(k: &FieldDescriptor, f: &[Elem]) -> usize {
    let lead = *f.last().unwrap();
    let affine = k.elements().filter(|&x| {
        let v = poly::eval(k, f, x);
        v != 0 && k.is_square(v)
    });
    affine.count() + usize::from(k.is_square(lead))
}

fn l_data_match(model: &CurveModel, base: &BasePointConfig, p: &Place, q: &Place) -> Result<bool> {
    let g = JacobianGroup::build(model, base, group_law("riemann-roch")?, 1, DEFAULT_GROUP_CAP)?;
    let table = census(model, &g, 2)?;
    let series = DivisorSum.class_series(model, &g, Some(&table), 2)?;
    let qp = g.place_class(model, q)?;
    if g.place_class(model, p)? != g.zero() {
        return Err(Error::Inconsistent("D1 = P but [P - D1] is nonzero".into()));
    }
    for chi in all_characters(g.invariants(), DEFAULT_GROUP_CAP)?.iter().skip(1) {
        let order = chi.modulus() as u32;
        let e = chi.value_exponent(g.coords(qp)) as i64;
        let zeta = CyclotomicInteger::zeta_power(order, e);
        let one = CyclotomicInteger::one(order);
        let expected = vec![one.clone(), one.add(&zeta), zeta.scalar_mul(3)];
        if apply_character(&g, chi, &series) != expected {
            return Ok(false);
        }
    }
    Ok(true)
}

/// All real genus-2 models y^2 = f(x), deg f = 6, over F_3 with no Weierstrass
/// point of degree at most 2, exactly one split rational fibre and |J(F_3)| = 5.
pub fn search_f3_example() -> Result<Vec<ExampleSurvivor>> {
    let k = make_field(3, 1)?;
    let candidates: Vec<Poly> = (0..2 * 3u32.pow(6))
        .map(|code| {
            let mut f: Vec<Elem> = (0..6).map(|i| code / 3u32.pow(i) % 3).collect();
            f.push(1 + code / 3u32.pow(6));
            f
        })
        .collect();
    let found: Vec<Option<ExampleSurvivor>> = candidates
        .par_iter()
        .map(|f| {
            if has_factor_of_degree_at_most_two(&k, f) || split_fibres(&k, f) != 1 {
                return Ok(None);
            }
            let label = format!("y^2 = f{:?}", f);
            let model = match CurveModel::new(k.clone(), vec![], f.clone(), label) {
                Ok(m) => m,
                Err(Error::SingularCurve(_)) => return Ok(None),
                Err(e) => return Err(e),
            };
            let order = model.jacobian_order(1)?;
            if order != 5 {
                return Ok(None);
            }
            let pts = model.places_of_degree(1, 1)?;
            if pts.len() != 2 {
                return Err(Error::Inconsistent(format!("survivor with {} rational points", pts.len())));
            }
            let (p, q) = (pts[0], pts[1]);
            let base = BasePointConfig::default_for(&model)?;
            let l_data_match = l_data_match(&model, &base, &p, &q)?;
            Ok(Some(ExampleSurvivor {
                zeta_numerator: model.level_zeta_numerator(1)?,
                points_base: model.point_count(1)?,
                points_quadratic: model.point_count(2)?,
                jacobian_order: order,
                p,
                q,
                l_data_match,
                family: 0,
                model,
            }))
        })
        .collect::<Result<_>>()?;
    let mut survivors: Vec<ExampleSurvivor> = found.into_iter().flatten().collect();
    let mut reps: Vec<CurveModel> = Vec::new();
    for s in survivors.iter_mut() {
        let mut family = None;
        for (i, r) in reps.iter().enumerate() {
            if are_isomorphic_hyperelliptic(r, &s.model)? {
                family = Some(i);
                break;
            }
        }
        s.family = family.unwrap_or_else(|| {
            reps.push(s.model.clone());
            reps.len() - 1
        });
    }
    Ok(survivors)
}

/// h^2 + 4f as a binary form of degree 6, low degree first.
fn sextic_form(model: &CurveModel) -> Poly {
    let k = model.base();
    poly::trimmed(poly::add(k, &poly::mul(k, model.h(), model.h()), &poly::scale(k, model.f(), k.from_int(4))))
}

/// Σ s_i (ax + b)^i (cx + d)^(6 - i).
fn transform(k: &FieldDescriptor, s: &[Elem], [a, b, c, d]: [Elem; 4]) -> Poly {
    let num = vec![b, a];
    let den = vec![d, c];
    let mut out: Poly = Vec::new();
    for (i, &si) in s.iter().enumerate().take(7) {
        if si == 0 {
            continue;
        }
        let term = poly::mul(k, &poly::pow(k, &num, i as u32), &poly::pow(k, &den, (6 - i) as u32));
        out = poly::add(k, &out, &poly::scale(k, &term, si));
    }
    poly::trimmed(out)
}

/// Whether some x -> (ax + b)/(cx + d), y -> e y/(cx + d)^3 carries A to B.
pub fn are_isomorphic_hyperelliptic(a: &CurveModel, b: &CurveModel) -> Result<bool> {
    if a.genus() != 2 || b.genus() != 2 {
        return Err(Error::Unsupported("the isomorphism test covers genus 2 only".into()));
    }
    if a.base() != b.base() {
        return Err(Error::Precondition("models over different fields".into()));
    }
    let k = a.base();
    if k.characteristic() == 2 {
        return Err(Error::Unsupported("the isomorphism test needs odd characteristic".into()));
    }
    let sa = sextic_form(a);
    let sb = sextic_form(b);
    let elems: Vec<Elem> = k.elements().collect();
    let squares: Vec<Elem> = elems.iter().filter(|&&e| e != 0).map(|&e| k.mul(e, e)).collect();
    for &ma in &elems {
        for &mb in &elems {
            for &mc in &elems {
                for &md in &elems {
                    if k.sub(k.mul(ma, md), k.mul(mb, mc)) == 0 {
                        continue;
                    }
                    let t = transform(k, &sa, [ma, mb, mc, md]);
                    if squares.iter().any(|&l| poly::trimmed(poly::scale(k, &t, l)) == sb) {
                        return Ok(true);
                    }
                }
            }
        }
    }
    Ok(false)
}
