//! Riemann-Roch spaces by exact linear algebra on local expansions.
//!
//! A function is written `(u(x) + v(x) y) / w(x)`. For `L(D)` the
//! denominator `w` is a product of x-polynomials clearing every finite pole
//! allowed by D, so the numerator is integral over `F_{q^n}[x]` and its
//! degree is bounded by the allowed pole order at infinity. The remaining
//! vanishing conditions are linear in the coefficients of `u` and `v`; each
//! condition over a residue field is descended to `F_{q^n}` by traces.

use std::collections::HashSet;
use super::Divisor;
use crate::curve::{poly_at_series, series_mul, CurveModel, GeometricPoint, ModelKind, Place, PointKind};
use crate::error::{Error, Result};
use crate::field::{self, Elem, Embedding, FieldDescriptor};
use crate::linalg;
use crate::poly::{self, Poly};

/// `(u + v y) / w` over `F_{q^level}`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FunctionElt {
    pub level: u32,
    pub u: Poly,
    pub v: Poly,
    pub w: Poly,
}

impl FunctionElt {
    pub fn constant(level: u32, c: Elem) -> Self {
        FunctionElt { level, u: poly::constant(c), v: Vec::new(), w: vec![1] }
    }

    pub fn is_zero(&self) -> bool {
        self.u.is_empty() && self.v.is_empty()
    }
}

/// A basis of L(D) over `F_{q^n}` sharing the denominator `w`.
#[derive(Clone, Debug)]
pub struct RrSpace {
    pub level: u32,
    pub w: Poly,
    pub basis: Vec<(Poly, Poly)>,
}

impl RrSpace {
    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn element(&self, i: usize) -> FunctionElt {
        let (u, v) = self.basis[i].clone();
        FunctionElt { level: self.level, u, v, w: self.w.clone() }
    }

    /// sum c_i b_i over `F_{q^n}`.
    pub fn combination(&self, k: &FieldDescriptor, c: &[Elem]) -> FunctionElt {
        let mut u = Vec::new();
        let mut v = Vec::new();
        for (ci, (bu, bv)) in c.iter().zip(&self.basis) {
            u = poly::add(k, &u, &poly::scale(k, bu, *ci));
            v = poly::add(k, &v, &poly::scale(k, bv, *ci));
        }
        FunctionElt { level: self.level, u, v, w: self.w.clone() }
    }
}

/// Minimal polynomial over `F_{q^n}` of the x-coordinate of a finite place,
/// and every place lying over its roots.
pub(crate) fn x_fiber(model: &CurveModel, place: &Place) -> Result<(Poly, Vec<Place>)> {
    let n = place.level;
    let pt = place.point();
    let k = model.level_field(n)?;
    let l = model.level_field(pt.m)?;
    let step = model.base().degree() * n;
    let mut xs = vec![pt.x];
    loop {
        let nx = l.frobenius(*xs.last().unwrap(), step);
        if nx == pt.x {
            break;
        }
        xs.push(nx);
    }
    let mut pi: Poly = vec![1];
    for &x in &xs {
        pi = poly::mul(&l, &pi, &[l.neg(x), 1]);
    }
    let emb = field::embedding(&k, &l)?;
    let pi = pi
        .iter()
        .map(|&c| emb.preimage(c).ok_or_else(|| Error::Inconsistent("minimal polynomial outside the base".into())))
        .collect::<Result<Poly>>()?;
    let conj = model.place_of_point(n, &model.involution(&pt)?)?;
    let mut above = vec![*place];
    if conj != *place {
        above.push(conj);
    }
    above.sort();
    Ok((pi, above))
}

fn ramification(model: &CurveModel, place: &Place) -> Result<i64> {
    Ok(if model.is_ramified(&place.point())? { 2 } else { 1 })
}

/// Appends the `F_{q^n}`-rows equivalent to `row = 0` with entries in the
/// residue field `l` (relative degree `rel`).
fn descend(
    l: &FieldDescriptor,
    emb: &Embedding,
    rel: u32,
    step: u32,
    row: &[Elem],
    out: &mut Vec<Vec<Elem>>,
) -> Result<()> {
    if rel == 1 {
        let r = row.iter().map(|&c| emb.preimage(c).unwrap()).collect();
        out.push(r);
        return Ok(());
    }
    let theta = l.generator();
    let mut basis = l.from_int(1);
    for _ in 0..rel {
        let mut r = Vec::with_capacity(row.len());
        for &c in row {
            let z = l.mul(basis, c);
            let mut tr = 0;
            for i in 0..rel {
                tr = l.add(tr, l.frobenius(z, step * i));
            }
            let t = emb.preimage(tr).ok_or_else(|| Error::Inconsistent("trace outside the base field".into()))?;
            r.push(t);
        }
        out.push(r);
        basis = l.mul(basis, theta);
    }
    Ok(())
}

/// Degree bounds (deg u, deg v) for numerators with pole order at most M at
/// every point at infinity.
fn numerator_bounds(model: &CurveModel, m: i64) -> (i64, i64) {
    let g = model.genus() as i64;
    match model.kind() {
        ModelKind::Imaginary => (m.div_euclid(2), (m - 2 * g - 1).div_euclid(2)),
        ModelKind::Real => (m, m - g - 1),
    }
}

fn powers(l: &FieldDescriptor, s: &[Elem], upto: usize, prec: usize) -> Vec<Vec<Elem>> {
    let mut out = Vec::with_capacity(upto + 1);
    let mut one = vec![0; prec];
    one[0] = 1;
    out.push(one);
    for i in 1..=upto {
        let next = series_mul(l, &out[i - 1], s, prec);
        out.push(next);
    }
    out
}

/// A basis of L(D) = { f : div(f) + D >= 0 } over `F_{q^n}`.
pub fn riemann_roch_space(model: &CurveModel, d: &Divisor) -> Result<RrSpace> {
    let n = d.level();
    let k = model.level_field(n)?;
    let g = model.genus() as i64;
    let e_inf = model.infinity_ramification() as i64;
    let step = model.base().degree() * n;

    // group finite support by x-fiber and choose the clearing exponent of each
    let mut fibers: Vec<(Poly, Vec<Place>, i64)> = Vec::new();
    for &(p, m) in d.terms() {
        if p.is_infinite() {
            continue;
        }
        let idx = match fibers.iter().position(|f| f.1.contains(&p)) {
            Some(i) => i,
            None => {
                let (pi, above) = x_fiber(model, &p)?;
                fibers.push((pi, above, 0));
                fibers.len() - 1
            }
        };
        if m > 0 {
            let e = ramification(model, &p)?;
            fibers[idx].2 = fibers[idx].2.max((m + e - 1) / e);
        }
    }
    let mut w: Poly = vec![1];
    for (pi, _, c) in &fibers {
        for _ in 0..*c {
            w = poly::mul(&k, &w, pi);
        }
    }
    let deg_w = poly::degree(&w).unwrap() as i64;

    let mut conditions: Vec<(Place, i64)> = Vec::new();
    for (_, above, c) in &fibers {
        for q in above {
            let r = c * ramification(model, q)? - d.multiplicity(q);
            if r > 0 {
                conditions.push((*q, r));
            }
        }
    }
    let infinite = model.infinite_places(n)?;
    let allowed: Vec<i64> = infinite.iter().map(|i| d.multiplicity(i) + e_inf * deg_w).collect();
    let m = *allowed.iter().max().unwrap();
    let (du, dv) = numerator_bounds(model, m);
    if du < 0 && dv < 0 {
        return Ok(RrSpace { level: n, w, basis: Vec::new() });
    }
    let shift = du.max(dv + g + 1);
    for (i, &mi) in infinite.iter().zip(&allowed) {
        let r = shift * e_inf - mi;
        if r > 0 {
            conditions.push((*i, r));
        }
    }

    let nu = (du + 1).max(0) as usize;
    let nv = (dv + 1).max(0) as usize;
    let ncols = nu + nv;
    let mut rows: Vec<Vec<Elem>> = Vec::new();
    for (q, r) in &conditions {
        let prec = *r as usize;
        let lp = model.local_param(q, prec)?;
        let l = &lp.field;
        let x: Vec<Elem> = lp.x[..prec].to_vec();
        let y: Vec<Elem> = lp.y[..prec].to_vec();
        let mut cols: Vec<Vec<Elem>> = Vec::with_capacity(ncols);
        if q.kind == PointKind::Affine {
            let pw = powers(l, &x, (du.max(dv)).max(0) as usize, prec);
            for i in 0..nu {
                cols.push(pw[i].clone());
            }
            for i in 0..nv {
                cols.push(series_mul(l, &pw[i], &y, prec));
            }
        } else {
            let pw = powers(l, &x, shift as usize, prec);
            for i in 0..nu {
                cols.push(pw[shift as usize - i].clone());
            }
            for i in 0..nv {
                cols.push(series_mul(l, &pw[(shift - g - 1) as usize - i], &y, prec));
            }
        }
        let emb = field::embedding(&k, l)?;
        for j in 0..prec {
            let row: Vec<Elem> = cols.iter().map(|c| c[j]).collect();
            descend(l, &emb, q.degree, step, &row, &mut rows)?;
        }
    }
    let basis = linalg::nullspace(&k, rows, ncols)
        .into_iter()
        .map(|vec| (poly::trimmed(vec[..nu].to_vec()), poly::trimmed(vec[nu..].to_vec())))
        .collect();
    Ok(RrSpace { level: n, w, basis })
}

/// Order of vanishing of `u + v y` at a place, searched up to `prec` terms.
fn valuation(model: &CurveModel, place: &Place, u: &[Elem], v: &[Elem], prec: usize) -> Result<i64> {
    let g = model.genus() as i64;
    let k = model.level_field(place.level)?;
    let lp = model.local_param(place, prec)?;
    let l = &lp.field;
    let emb = field::embedding(&k, l)?;
    let (x, y) = (&lp.x[..prec], &lp.y[..prec]);
    let up = poly::map_coeffs(u, |c| emb.apply(c));
    let vp = poly::map_coeffs(v, |c| emb.apply(c));
    let (series, offset) = if place.kind == PointKind::Affine {
        let s = poly_at_series(l, &up, x, prec);
        let t = series_mul(l, &poly_at_series(l, &vp, x, prec), y, prec);
        (s.iter().zip(&t).map(|(&a, &b)| l.add(a, b)).collect::<Vec<_>>(), 0)
    } else {
        let du = poly::degree(&up).map_or(-1, |d| d as i64);
        let dv = poly::degree(&vp).map_or(-1, |d| d as i64);
        let shift = du.max(dv + g + 1);
        let mut uh = vec![0; shift as usize + 1];
        for (i, &c) in up.iter().enumerate() {
            uh[shift as usize - i] = c;
        }
        let mut vh = vec![0; (shift - g) as usize];
        for (i, &c) in vp.iter().enumerate() {
            vh[(shift - g - 1) as usize - i] = c;
        }
        let s = poly_at_series(l, &uh, x, prec);
        let t = series_mul(l, &poly_at_series(l, &vh, x, prec), y, prec);
        (s.iter().zip(&t).map(|(&a, &b)| l.add(a, b)).collect(), shift * lp.ramification as i64)
    };
    match series.iter().position(|&c| c != 0) {
        Some(i) => Ok(i as i64 - offset),
        None => Err(Error::Inconsistent(format!("valuation exceeds its bound {prec} at {place:?}"))),
    }
}

/// Places over the roots of `a(x)` with the multiplicity of each x-root.
fn places_over_roots(model: &CurveModel, n: u32, a: &[Elem]) -> Result<Vec<(Place, u32)>> {
    let k = model.level_field(n)?;
    let step = model.base().degree() * n;
    let mut out: Vec<(Place, u32)> = Vec::new();
    for (part, e) in poly::distinct_factors_by_degree(&k, a) {
        let m = n * e as u32;
        let l = model.level_field(m)?;
        let emb = field::embedding(&k, &l)?;
        let part_l = poly::map_coeffs(&part, |c| emb.apply(c));
        let mut covered: HashSet<Elem> = HashSet::new();
        for x0 in poly::roots_in_field(&l, &part_l) {
            if covered.contains(&x0) {
                continue;
            }
            let mut pi: Poly = vec![1];
            let mut z = x0;
            loop {
                covered.insert(z);
                pi = poly::mul(&l, &pi, &[l.neg(z), 1]);
                z = l.frobenius(z, step);
                if z == x0 {
                    break;
                }
            }
            let pi: Poly = pi.iter().map(|&c| emb.preimage(c).unwrap()).collect();
            let mut mult = 0u32;
            let mut rest = a.to_vec();
            loop {
                let (q, r) = poly::divrem(&k, &rest, &pi);
                if !r.is_empty() {
                    break;
                }
                mult += 1;
                rest = q;
            }
            let cf = model.coeffs(m)?;
            let (hv, fv) = (poly::eval(&l, &cf.h, x0), poly::eval(&l, &cf.f, x0));
            let mut pts: Vec<GeometricPoint> = crate::curve::fiber_points(&l, hv, fv)
                .into_iter()
                .map(|y| GeometricPoint { m, kind: PointKind::Affine, x: x0, y })
                .collect();
            if pts.is_empty() {
                let l2 = model.level_field(2 * m)?;
                let up = field::embedding(&l, &l2)?;
                let cf2 = model.coeffs(2 * m)?;
                let x2 = up.apply(x0);
                let (hv, fv) = (poly::eval(&l2, &cf2.h, x2), poly::eval(&l2, &cf2.f, x2));
                pts = crate::curve::fiber_points(&l2, hv, fv)
                    .into_iter()
                    .map(|y| GeometricPoint { m: 2 * m, kind: PointKind::Affine, x: x2, y })
                    .collect();
            }
            for pt in pts {
                let place = model.place_of_point(n, &pt)?;
                if !out.iter().any(|(p, _)| *p == place) {
                    out.push((place, mult));
                }
            }
        }
    }
    Ok(out)
}

/// div(f) for a nonzero function.
pub fn divisor_of(model: &CurveModel, f: &FunctionElt) -> Result<Divisor> {
    if f.is_zero() || f.w.is_empty() {
        return Err(Error::Precondition("divisor of the zero function".into()));
    }
    let n = f.level;
    let k = model.level_field(n)?;
    let cf = model.coeffs(n)?;
    let g = model.genus() as i64;
    let e_inf = model.infinity_ramification() as i64;
    let (u, v) = (&f.u, &f.v);
    let uu = poly::mul(&k, u, u);
    let huv = poly::mul(&k, &cf.h, &poly::mul(&k, u, v));
    let fvv = poly::mul(&k, &cf.f, &poly::mul(&k, v, v));
    let norm = poly::sub(&k, &poly::sub(&k, &uu, &huv), &fvv);
    let mut terms: Vec<(Place, i64)> = Vec::new();
    for (p, mult) in places_over_roots(model, n, &norm)? {
        let e = ramification(model, &p)?;
        let bound = (e * mult as i64) as usize + 1;
        terms.push((p, valuation(model, &p, u, v, bound)?));
    }
    for (p, mult) in places_over_roots(model, n, &f.w)? {
        terms.push((p, -ramification(model, &p)? * mult as i64));
    }
    let du = poly::degree(u).map_or(-1, |d| d as i64);
    let dv = poly::degree(v).map_or(-1, |d| d as i64);
    let shift = du.max(dv + g + 1);
    let deg_w = poly::degree(&f.w).unwrap() as i64;
    for i in model.infinite_places(n)? {
        let bound = (2 * shift * e_inf + 1) as usize;
        terms.push((i, valuation(model, &i, u, v, bound)? + e_inf * deg_w));
    }
    let d = Divisor::from_terms(n, terms)?;
    if d.degree() != 0 {
        return Err(Error::Inconsistent(format!("principal divisor of degree {}", d.degree())));
    }
    Ok(d)
}

/// Whether a degree-zero divisor is principal, with a function having that divisor.
pub fn is_principal(model: &CurveModel, e: &Divisor) -> Result<Option<FunctionElt>> {
    if e.degree() != 0 {
        return Err(Error::Precondition(format!("divisor of degree {} cannot be principal", e.degree())));
    }
    // a nonzero f with div(f) >= E and deg E = 0 has div(f) = E
    let space = riemann_roch_space(model, &e.scale(-1))?;
    Ok((space.dim() > 0).then(|| space.element(0)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::make_field;

    fn curve5() -> CurveModel {
        CurveModel::new(make_field(5, 1).unwrap(), vec![], vec![2, 0, 1, 0, 0, 1], "c5").unwrap()
    }

    fn real3() -> CurveModel {
        CurveModel::new(make_field(3, 1).unwrap(), vec![], vec![1, 0, 1, 1, 0, 0, 1], "r3").unwrap()
    }

    #[test]
    fn dimensions_follow_riemann_roch() {
        for c in [curve5(), real3()] {
            let g = c.genus() as i64;
            let zero = Divisor::zero(1);
            assert_eq!(riemann_roch_space(&c, &zero).unwrap().dim(), 1);
            let pts = c.places_up_to(1, 2).unwrap();
            for p in pts.iter().filter(|p| p.degree == 1) {
                assert_eq!(riemann_roch_space(&c, &Divisor::place(*p)).unwrap().dim(), 1);
            }
            // nonspecial range
            for (i, p) in pts.iter().enumerate() {
                let q = pts[(i + 1) % pts.len()];
                let d = Divisor::place(*p).scale(2).add(&Divisor::place(q).scale(g));
                if d.degree() > 2 * g - 2 {
                    let dim = riemann_roch_space(&c, &d).unwrap().dim() as i64;
                    assert_eq!(dim, d.degree() - g + 1, "{d:?}");
                }
            }
        }
    }

    #[test]
    fn divisors_of_basis_functions_are_bounded_below() {
        for c in [curve5(), real3()] {
            let pts = c.places_up_to(1, 2).unwrap();
            for w in pts.windows(3) {
                let d = Divisor::place(w[0]).scale(3).add(&Divisor::place(w[1])).sub(&Divisor::place(w[2]));
                let space = riemann_roch_space(&c, &d).unwrap();
                for i in 0..space.dim() {
                    let div = divisor_of(&c, &space.element(i)).unwrap();
                    assert!(div.add(&d).is_effective() || div.add(&d).is_zero(), "{div:?} + {d:?}");
                }
            }
        }
    }

    #[test]
    fn principal_divisors() {
        let c = curve5();
        let pts = c.places_of_degree(1, 1).unwrap();
        assert!(is_principal(&c, &Divisor::zero(1)).unwrap().is_some());
        let (a, b) = (Divisor::place(pts[1]), Divisor::place(pts[2]));
        assert!(is_principal(&c, &a.sub(&b)).unwrap().is_none());
        // div(x - a) = P + iota(P) - 2 inf on an imaginary model
        let p = pts.iter().find(|p| !p.is_infinite() && !c.is_ramified(&p.point()).unwrap()).unwrap();
        let conj = c.place_of_point(1, &c.involution(&p.point()).unwrap()).unwrap();
        let inf = c.infinite_places(1).unwrap()[0];
        let e = Divisor::place(*p).add(&Divisor::place(conj)).sub(&Divisor::place(inf).scale(2));
        let f = is_principal(&c, &e).unwrap().unwrap();
        assert_eq!(divisor_of(&c, &f).unwrap(), e);
        let k = make_field(5, 1).unwrap();
        let direct = FunctionElt { level: 1, u: vec![k.neg(p.x), 1], v: vec![], w: vec![1] };
        assert_eq!(divisor_of(&c, &direct).unwrap(), e);
    }
}
