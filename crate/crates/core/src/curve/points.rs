use std::sync::Arc;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{CurveModel, LevelCoeffs};
use crate::arith;
use crate::error::{Error, Result};
use crate::field::{self, Elem, FieldDescriptor};
use crate::poly;

/// Which chart a point lives on. Points at infinity sort first.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum PointKind {
    Infinity,
    Affine,
}

/// A point with coordinates in F_{q^m}. For points at infinity `x` is the
/// chart coordinate X = 0 and `y` is Y.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct GeometricPoint {
    pub m: u32,
    pub kind: PointKind,
    pub x: Elem,
    pub y: Elem,
}

/// A closed point of `C ⊗ F_{q^level}`: a Frobenius orbit of `degree`
/// geometric points, represented by the least orbit member with
/// coordinates in F_{q^(level*degree)}.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Place {
    pub level: u32,
    pub degree: u32,
    pub kind: PointKind,
    pub x: Elem,
    pub y: Elem,
}

impl Place {
    /// Degree of the residue field over F_q.
    pub fn field_degree(&self) -> u32 {
        self.level * self.degree
    }

    pub fn point(&self) -> GeometricPoint {
        GeometricPoint { m: self.field_degree(), kind: self.kind, x: self.x, y: self.y }
    }

    pub fn is_infinite(&self) -> bool {
        self.kind == PointKind::Infinity
    }
}

/// Roots y of y^2 + a y - b in the field, ascending.
pub(crate) fn fiber(k: &FieldDescriptor, a: Elem, b: Elem) -> Vec<Elem> {
    if k.characteristic() != 2 {
        let disc = k.add(k.mul(a, a), k.mul(k.from_int(4), b));
        let inv2 = k.inv(k.from_int(2)).unwrap();
        match k.sqrt(disc) {
            None => Vec::new(),
            Some(0) => vec![k.mul(k.neg(a), inv2)],
            Some(s) => {
                let mut v = vec![k.mul(k.sub(s, a), inv2), k.mul(k.sub(k.neg(s), a), inv2)];
                v.sort_unstable();
                v
            }
        }
    } else if a == 0 {
        vec![k.sqrt(b).unwrap()]
    } else {
        poly::roots_in_field(k, &[k.neg(b), a, 1])
    }
}

fn fiber_count(k: &FieldDescriptor, a: Elem, b: Elem) -> u64 {
    if k.characteristic() != 2 {
        let disc = k.add(k.mul(a, a), k.mul(k.from_int(4), b));
        if disc == 0 {
            1
        } else if k.is_square(disc) {
            2
        } else {
            0
        }
    } else {
        fiber(k, a, b).len() as u64
    }
}

impl CurveModel {
    fn chart_values(c: &LevelCoeffs, kind: super::PointKind, x: Elem) -> (Elem, Elem) {
        let (h, f) = c.chart(kind);
        (poly::eval(&c.field, h, x), poly::eval(&c.field, f, x))
    }

    /// All points of C(F_{q^m}): points at infinity first, then affine
    /// points ordered by (x, y).
    pub fn points_over(&self, m: u32) -> Result<Vec<GeometricPoint>> {
        let c = self.coeffs(m)?;
        let k = &c.field;
        let (a, b) = Self::chart_values(&c, PointKind::Infinity, 0);
        let mut pts: Vec<GeometricPoint> =
            fiber(k, a, b).into_iter().map(|y| GeometricPoint { m, kind: PointKind::Infinity, x: 0, y }).collect();
        let affine: Vec<GeometricPoint> = (0..k.size())
            .into_par_iter()
            .flat_map_iter(|x| {
                let (a, b) = Self::chart_values(&c, PointKind::Affine, x);
                fiber(k, a, b).into_iter().map(move |y| GeometricPoint { m, kind: PointKind::Affine, x, y })
            })
            .collect();
        pts.extend(affine);
        Ok(pts)
    }

    pub fn rational_points(&self, n: u32) -> Result<Vec<GeometricPoint>> {
        self.points_over(n)
    }

    /// #C(F_{q^m}).
    pub fn point_count(&self, m: u32) -> Result<u64> {
        if let Some(&n) = self.caches.counts.lock().unwrap().get(&m) {
            return Ok(n);
        }
        let c = self.coeffs(m)?;
        let k = &c.field;
        let (a, b) = Self::chart_values(&c, PointKind::Infinity, 0);
        let inf = fiber_count(k, a, b);
        let aff: u64 = (0..k.size())
            .into_par_iter()
            .map(|x| {
                let (a, b) = Self::chart_values(&c, PointKind::Affine, x);
                fiber_count(k, a, b)
            })
            .sum();
        let n = inf + aff;
        self.caches.counts.lock().unwrap().insert(m, n);
        Ok(n)
    }

    /// Applies z -> z^(q^j) to both coordinates.
    pub fn frobenius_point(&self, pt: &GeometricPoint, j: u32) -> Result<GeometricPoint> {
        let k = self.level_field(pt.m)?;
        let e = self.base.degree() * j;
        Ok(GeometricPoint { m: pt.m, kind: pt.kind, x: k.frobenius(pt.x, e), y: k.frobenius(pt.y, e) })
    }

    /// Orbit of `pt` under the q^n-power Frobenius, in orbit order.
    pub fn orbit(&self, pt: &GeometricPoint, n: u32) -> Result<Vec<GeometricPoint>> {
        let mut out = vec![*pt];
        loop {
            let next = self.frobenius_point(out.last().unwrap(), n)?;
            if next == *pt {
                return Ok(out);
            }
            out.push(next);
        }
    }

    /// The place of `C ⊗ F_{q^n}` through `pt` (requires n | pt.m).
    pub fn place_of_point(&self, n: u32, pt: &GeometricPoint) -> Result<Place> {
        if pt.m % n != 0 {
            return Err(Error::Precondition(format!("level {n} does not divide the point's field degree {}", pt.m)));
        }
        let d = self.orbit(pt, n)?.len() as u32;
        let target = n * d;
        let pt = if target == pt.m {
            *pt
        } else {
            let small = self.level_field(target)?;
            let big = self.level_field(pt.m)?;
            let emb = field::embedding(&small, &big)?;
            let down = |z: Elem| emb.preimage(z).ok_or_else(|| Error::Inconsistent("orbit coordinate outside its field".into()));
            GeometricPoint { m: target, kind: pt.kind, x: down(pt.x)?, y: down(pt.y)? }
        };
        let rep = self.orbit(&pt, n)?.into_iter().min().unwrap();
        Ok(Place { level: n, degree: d, kind: rep.kind, x: rep.x, y: rep.y })
    }

    /// The geometric points of a place.
    pub fn place_points(&self, place: &Place) -> Result<Vec<GeometricPoint>> {
        self.orbit(&place.point(), place.level)
    }

    /// All places of exact degree d on `C ⊗ F_{q^n}`, in increasing order.
    pub fn places_of_degree(&self, n: u32, d: u32) -> Result<Arc<Vec<Place>>> {
        if n == 0 || d == 0 {
            return Err(Error::Precondition("level and degree must be positive".into()));
        }
        if let Some(p) = self.caches.places.lock().unwrap().get(&(n, d)) {
            return Ok(p.clone());
        }
        let pts = self.points_over(n * d)?;
        let k = self.level_field(n * d)?;
        let step = self.base.degree() * n;
        let places: Vec<Place> = pts
            .par_iter()
            .filter_map(|pt| {
                // keep exactly the least member of each orbit of size d
                let (mut x, mut y) = (pt.x, pt.y);
                for i in 1..=d {
                    x = k.frobenius(x, step);
                    y = k.frobenius(y, step);
                    if x == pt.x && y == pt.y {
                        return (i == d).then_some(Place { level: n, degree: d, kind: pt.kind, x: pt.x, y: pt.y });
                    }
                    if (pt.kind, x, y) < (pt.kind, pt.x, pt.y) {
                        return None;
                    }
                }
                None
            })
            .collect();
        let places = Arc::new(places);
        Ok(self.caches.places.lock().unwrap().entry((n, d)).or_insert(places).clone())
    }

    /// All places of degree <= d.
    pub fn places_up_to(&self, n: u32, d: u32) -> Result<Vec<Place>> {
        let mut out = Vec::new();
        for e in 1..=d {
            out.extend(self.places_of_degree(n, e)?.iter().copied());
        }
        Ok(out)
    }

    /// Image of a place under the q^j-power Frobenius (another place at the same level).
    pub fn frobenius_place(&self, place: &Place, j: u32) -> Result<Place> {
        let pt = self.frobenius_point(&place.point(), j)?;
        self.place_of_point(place.level, &pt)
    }

    /// The places of `C ⊗ F_{q^(n m)}` lying over a place of `C ⊗ F_{q^n}`.
    /// A degree-d place splits into gcd(m, d) places of degree d / gcd(m, d).
    pub fn split_place(&self, place: &Place, m: u32) -> Result<Vec<Place>> {
        let d = place.degree;
        let g = arith::gcd(m as u64, d as u64) as u32;
        let l = arith::lcm(m as u64, d as u64) as u32;
        let small = self.level_field(place.field_degree())?;
        let big = self.level_field(place.level * l)?;
        let emb = field::embedding(&small, &big)?;
        let pt = GeometricPoint { m: place.level * l, kind: place.kind, x: emb.apply(place.x), y: emb.apply(place.y) };
        let mut out = Vec::with_capacity(g as usize);
        let mut cur = pt;
        for _ in 0..g {
            out.push(self.place_of_point(place.level * m, &cur)?);
            cur = self.frobenius_point(&cur, place.level)?;
        }
        out.sort();
        out.dedup();
        if out.len() != g as usize {
            return Err(Error::Inconsistent("place did not split into gcd(m, d) places".into()));
        }
        Ok(out)
    }

    /// Places over x = infinity at level n (one or two).
    pub fn infinite_places(&self, n: u32) -> Result<Vec<Place>> {
        let mut out = Vec::new();
        for m in [n, 2 * n] {
            let c = self.coeffs(m)?;
            let (a, b) = Self::chart_values(&c, PointKind::Infinity, 0);
            for y in fiber(&c.field, a, b) {
                let pl = self.place_of_point(n, &GeometricPoint { m, kind: PointKind::Infinity, x: 0, y })?;
                if !out.contains(&pl) {
                    out.push(pl);
                }
            }
            if !out.is_empty() {
                break;
            }
        }
        out.sort();
        Ok(out)
    }

    /// The conjugate point (x, -h(x) - y) on the same chart.
    pub fn involution(&self, pt: &GeometricPoint) -> Result<GeometricPoint> {
        let c = self.coeffs(pt.m)?;
        let k = &c.field;
        let (h, _) = c.chart(pt.kind);
        let y = k.sub(k.neg(poly::eval(k, h, pt.x)), pt.y);
        Ok(GeometricPoint { y, ..*pt })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::make_field;

    fn curve(p: u32, f: Vec<u32>) -> CurveModel {
        CurveModel::new(make_field(p, 1).unwrap(), vec![], f, "t").unwrap()
    }

    #[test]
    fn imaginary_model_has_one_point_at_infinity() {
        let c = curve(3, vec![1, 2, 0, 0, 0, 1]);
        for m in 1..=3 {
            let pts = c.points_over(m).unwrap();
            assert_eq!(pts.iter().filter(|p| p.kind == PointKind::Infinity).count(), 1);
            assert_eq!(pts.len() as u64, c.point_count(m).unwrap());
        }
    }

    #[test]
    fn brute_force_point_count() {
        // naive double loop over (x, y) in F_9
        let c = curve(3, vec![1, 2, 0, 0, 0, 1]);
        let k = make_field(3, 2).unwrap();
        let cf = c.coeffs(2).unwrap();
        let mut n = 1u64;
        for x in k.elements() {
            for y in k.elements() {
                if k.mul(y, y) == poly::eval(&k, &cf.f, x) {
                    n += 1;
                }
            }
        }
        assert_eq!(c.point_count(2).unwrap(), n);
    }

    #[test]
    fn orbit_counting_identity() {
        let c = curve(5, vec![2, 0, 1, 0, 0, 1]);
        for n in 1..=2 {
            for d in 1..=3 {
                let mut total = 0u64;
                for e in 1..=d {
                    if d % e == 0 {
                        total += e as u64 * c.places_of_degree(n, e).unwrap().len() as u64;
                    }
                }
                assert_eq!(total, c.point_count(n * d).unwrap(), "n={n} d={d}");
            }
        }
    }

    #[test]
    fn splitting_law() {
        let c = curve(3, vec![1, 2, 0, 0, 0, 1]);
        for d in 1..=4 {
            for place in c.places_of_degree(1, d).unwrap().iter() {
                for m in 1..=3 {
                    let parts = c.split_place(place, m).unwrap();
                    let g = arith::gcd(m as u64, d as u64) as usize;
                    assert_eq!(parts.len(), g);
                    assert!(parts.iter().all(|p| p.degree as usize == d as usize / g && p.level == m));
                }
            }
        }
    }

    #[test]
    fn frobenius_preserves_places() {
        let c = curve(3, vec![2, 1, 0, 1, 0, 0, 1]);
        for place in c.places_of_degree(2, 2).unwrap().iter() {
            let img = c.frobenius_place(place, 1).unwrap();
            assert!(c.places_of_degree(2, 2).unwrap().contains(&img));
            assert_eq!(c.frobenius_place(&img, 1).unwrap(), *place);
        }
    }
}
