//! Mumford representation and Cantor composition on imaginary models.

use super::{BasePointConfig, Divisor, DivisorClass, GroupLaw};
use crate::curve::{CurveModel, GeometricPoint, ModelKind, Place, PointKind};
use crate::error::{Error, Result};
use crate::field::{self, Elem, FieldDescriptor};
use crate::poly::{self, Poly};

/// Cantor's algorithm; needs one point at infinity used as the base point.
pub struct CantorLaw;

type Mumford = (Poly, Poly);

fn mumford_of_place(model: &CurveModel, place: &Place) -> Result<Mumford> {
    let n = place.level;
    let k = model.level_field(n)?;
    let pt = place.point();
    let l = model.level_field(pt.m)?;
    let step = model.base().degree() * n;
    let mut orbit: Vec<(Elem, Elem)> = vec![(pt.x, pt.y)];
    loop {
        let &(x, y) = orbit.last().unwrap();
        let next = (l.frobenius(x, step), l.frobenius(y, step));
        if next == (pt.x, pt.y) {
            break;
        }
        orbit.push(next);
    }
    let distinct_x = {
        let mut xs: Vec<Elem> = orbit.iter().map(|p| p.0).collect();
        xs.sort();
        xs.dedup();
        xs.len()
    };
    if distinct_x < orbit.len() {
        // the place is a whole x-fiber, hence the divisor of a polynomial in x
        return Ok((vec![1], Vec::new()));
    }
    let mut a: Poly = vec![1];
    let mut b: Poly = Vec::new();
    for (i, &(xi, yi)) in orbit.iter().enumerate() {
        let mut basis: Poly = vec![1];
        let mut denom = 1;
        for (j, &(xj, _)) in orbit.iter().enumerate() {
            if i != j {
                basis = poly::mul(&l, &basis, &[l.neg(xj), 1]);
                denom = l.mul(denom, l.sub(xi, xj));
            }
        }
        b = poly::add(&l, &b, &poly::scale(&l, &basis, l.mul(yi, l.inv(denom).unwrap())));
        a = poly::mul(&l, &a, &[l.neg(xi), 1]);
    }
    let emb = field::embedding(&k, &l)?;
    let down = |p: &Poly| -> Result<Poly> {
        p.iter()
            .map(|&c| emb.preimage(c).ok_or_else(|| Error::Inconsistent("interpolant outside the base".into())))
            .collect()
    };
    Ok((down(&a)?, down(&b)?))
}

fn exact_div(k: &FieldDescriptor, a: &[Elem], b: &[Elem]) -> Result<Poly> {
    let (q, r) = poly::divrem(k, a, b);
    if !r.is_empty() {
        return Err(Error::Inconsistent("inexact division in Cantor composition".into()));
    }
    Ok(q)
}

fn compose(model: &CurveModel, n: u32, d1: &Mumford, d2: &Mumford) -> Result<Mumford> {
    let cf = model.coeffs(n)?;
    let k = &cf.field;
    let (h, f) = (&cf.h, &cf.f);
    let (a1, b1) = d1;
    let (a2, b2) = d2;
    let (d0, e1, e2) = poly::ext_gcd(k, a1, a2);
    let sum = poly::add(k, &poly::add(k, b1, b2), h);
    let (d, c1, c2) = poly::ext_gcd(k, &d0, &sum);
    let s1 = poly::mul(k, &c1, &e1);
    let s2 = poly::mul(k, &c1, &e2);
    let a = exact_div(k, &poly::mul(k, a1, a2), &poly::mul(k, &d, &d))?;
    let num = poly::add(
        k,
        &poly::add(k, &poly::mul(k, &s1, &poly::mul(k, a1, b2)), &poly::mul(k, &s2, &poly::mul(k, a2, b1))),
        &poly::mul(k, &c2, &poly::add(k, &poly::mul(k, b1, b2), f)),
    );
    let b = poly::rem(k, &exact_div(k, &num, &d)?, &a);
    reduce_mumford(model, n, (a, b))
}

fn reduce_mumford(model: &CurveModel, n: u32, (mut a, mut b): Mumford) -> Result<Mumford> {
    let cf = model.coeffs(n)?;
    let k = &cf.field;
    let g = model.genus() as usize;
    while poly::degree(&a).unwrap_or(0) > g {
        let top = poly::sub(k, &poly::sub(k, &cf.f, &poly::mul(k, &cf.h, &b)), &poly::mul(k, &b, &b));
        let na = poly::monic(k, &exact_div(k, &top, &a)?);
        let nb = poly::rem(k, &poly::sub(k, &[], &poly::add(k, &cf.h, &b)), &na);
        a = na;
        b = nb;
    }
    Ok((poly::monic(k, &a), b))
}

fn divisor_of_mumford(model: &CurveModel, n: u32, (a, b): &Mumford) -> Result<Divisor> {
    let k = model.level_field(n)?;
    let step = model.base().degree() * n;
    let mut terms: Vec<(Place, i64)> = Vec::new();
    for (part, e) in poly::distinct_factors_by_degree(&k, a) {
        let m = n * e as u32;
        let l = model.level_field(m)?;
        let emb = field::embedding(&k, &l)?;
        let part_l = poly::map_coeffs(&part, |c| emb.apply(c));
        let b_l = poly::map_coeffs(b, |c| emb.apply(c));
        let mut seen: Vec<Place> = Vec::new();
        for x0 in poly::roots_in_field(&l, &part_l) {
            let pt = GeometricPoint { m, kind: PointKind::Affine, x: x0, y: poly::eval(&l, &b_l, x0) };
            let place = model.place_of_point(n, &pt)?;
            if seen.contains(&place) {
                continue;
            }
            seen.push(place);
            // multiplicity of the x-minimal polynomial in a
            let mut pi: Poly = vec![1];
            let mut z = x0;
            loop {
                pi = poly::mul(&l, &pi, &[l.neg(z), 1]);
                z = l.frobenius(z, step);
                if z == x0 {
                    break;
                }
            }
            let pi: Poly = pi.iter().map(|&c| emb.preimage(c).unwrap()).collect();
            let mut mult = 0i64;
            let mut rest = a.clone();
            loop {
                let (q, r) = poly::divrem(&k, &rest, &pi);
                if !r.is_empty() {
                    break;
                }
                mult += 1;
                rest = q;
            }
            terms.push((place, mult));
        }
    }
    Divisor::from_terms(n, terms)
}

impl GroupLaw for CantorLaw {
    fn name(&self) -> &'static str {
        "cantor"
    }

    fn check(&self, model: &CurveModel, base: &BasePointConfig) -> Result<()> {
        if model.kind() != ModelKind::Imaginary {
            return Err(Error::Unsupported("the Cantor law needs a model with one point at infinity".into()));
        }
        match base.rational_place(model, 1)? {
            Some(p) if p.is_infinite() => Ok(()),
            _ => Err(Error::Unsupported("the Cantor law needs D1 to be the point at infinity".into())),
        }
    }

    fn reduce(&self, model: &CurveModel, base: &BasePointConfig, d: &Divisor) -> Result<DivisorClass> {
        self.check(model, base)?;
        let n = d.level();
        let mut acc: Mumford = (vec![1], Vec::new());
        for &(p, m) in d.terms() {
            if p.is_infinite() {
                continue;
            }
            let p = if m < 0 { model.place_of_point(n, &model.involution(&p.point())?)? } else { p };
            let single = mumford_of_place(model, &p)?;
            if single.0.len() == 1 {
                continue;
            }
            for _ in 0..m.unsigned_abs() {
                acc = compose(model, n, &acc, &single)?;
            }
        }
        Ok(DivisorClass::from_canonical(divisor_of_mumford(model, n, &acc)?))
    }
}

/// Whether `(a, b)` satisfies `a | b^2 + h b - f` with a monic.
#[cfg(test)]
pub(crate) fn is_valid_mumford(model: &CurveModel, n: u32, (a, b): &Mumford) -> bool {
    let cf = model.coeffs(n).unwrap();
    let k = &cf.field;
    let t = poly::sub(k, &poly::add(k, &poly::mul(k, b, b), &poly::mul(k, &cf.h, b)), &cf.f);
    poly::rem(k, &t, a).is_empty() && a.last() == Some(&1)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::make_field;
    use crate::jacobian::{group_law, JacobianGroup};
    use std::sync::Arc;

    #[test]
    fn mumford_of_places_is_valid() {
        let c = CurveModel::new(make_field(5, 1).unwrap(), vec![], vec![2, 0, 1, 0, 0, 1], "c5").unwrap();
        for place in c.places_up_to(1, 2).unwrap().iter().filter(|p| !p.is_infinite()) {
            let m = mumford_of_place(&c, place).unwrap();
            assert!(is_valid_mumford(&c, 1, &m));
        }
    }

    #[test]
    fn cantor_matches_riemann_roch() {
        let c = CurveModel::new(make_field(3, 1).unwrap(), vec![], vec![1, 2, 0, 0, 0, 1], "c3").unwrap();
        let base = BasePointConfig::default_for(&c).unwrap();
        let rr = JacobianGroup::build(&c, &base, group_law("riemann-roch").unwrap(), 1, 100).unwrap();
        let ca = JacobianGroup::build(&c, &base, Arc::new(CantorLaw), 1, 100).unwrap();
        assert_eq!(rr.elements(), ca.elements());
    }
}
