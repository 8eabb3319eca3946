//! Truncated power-series parametrizations of the curve at a point.

use std::sync::Arc;

use super::{CurveModel, GeometricPoint, Place};
use crate::error::{Error, Result};
use crate::field::{Elem, FieldDescriptor};
use crate::poly;

/// Truncated product of two series.
pub fn series_mul(k: &FieldDescriptor, a: &[Elem], b: &[Elem], prec: usize) -> Vec<Elem> {
    let mut out = vec![0; prec];
    for (i, &x) in a.iter().enumerate().take(prec) {
        if x == 0 {
            continue;
        }
        for (j, &y) in b.iter().enumerate().take(prec - i) {
            out[i + j] = k.add(out[i + j], k.mul(x, y));
        }
    }
    out
}

/// p(s) for a polynomial p and a series s, truncated.
pub fn poly_at_series(k: &FieldDescriptor, p: &[Elem], s: &[Elem], prec: usize) -> Vec<Elem> {
    let mut acc = vec![0; prec];
    for &c in p.iter().rev() {
        acc = series_mul(k, &acc, s, prec);
        if prec > 0 {
            acc[0] = k.add(acc[0], c);
        }
    }
    acc
}

/// A point of one chart with series `x(t)`, `y(t)` in a uniformizer `t`.
#[derive(Debug)]
pub struct LocalParam {
    pub field: Arc<FieldDescriptor>,
    pub point: GeometricPoint,
    pub x: Vec<Elem>,
    pub y: Vec<Elem>,
    /// Order of vanishing of `x - x0` at the point.
    pub ramification: u32,
    pub prec: usize,
}

impl CurveModel {
    /// Whether the chart coordinate `x` ramifies at the point (the tangent is vertical).
    pub fn is_ramified(&self, pt: &GeometricPoint) -> Result<bool> {
        let c = self.coeffs(pt.m)?;
        let k = &c.field;
        let (h, _) = c.chart(pt.kind);
        Ok(k.add(k.mul(k.from_int(2), pt.y), poly::eval(k, h, pt.x)) == 0)
    }

    /// Local expansion at the representative point of a place, cached.
    pub fn local_param(&self, place: &Place, prec: usize) -> Result<Arc<LocalParam>> {
        let prec = prec.max(1);
        if let Some(lp) = self.caches.local.lock().unwrap().get(place) {
            if lp.prec >= prec {
                return Ok(lp.clone());
            }
        }
        let lp = Arc::new(self.expand(&place.point(), prec.max(4))?);
        self.caches.local.lock().unwrap().insert(*place, lp.clone());
        Ok(lp)
    }

    fn expand(&self, pt: &GeometricPoint, prec: usize) -> Result<LocalParam> {
        let c = self.coeffs(pt.m)?;
        let k = c.field.clone();
        let (h, f) = c.chart(pt.kind);
        let (x0, y0) = (pt.x, pt.y);
        let fy = k.add(k.mul(k.from_int(2), y0), poly::eval(&k, h, x0));
        let (x, y, ramification) = if fy != 0 {
            // uniformizer x - x0; solve for y coefficient by coefficient
            let xs: Vec<Elem> = (0..prec).map(|i| [x0, 1].get(i).copied().unwrap_or(0)).collect();
            let ht = poly_at_series(&k, h, &xs, prec);
            let ft = poly_at_series(&k, f, &xs, prec);
            let inv = k.inv(fy).unwrap();
            let mut ys = vec![0; prec];
            ys[0] = y0;
            for n in 1..prec {
                let mut r = ft[n];
                for i in 1..n {
                    r = k.sub(r, k.mul(ys[i], ys[n - i]));
                }
                for i in 1..=n {
                    r = k.sub(r, k.mul(ht[i], ys[n - i]));
                }
                ys[n] = k.mul(r, inv);
            }
            (xs, ys, 1)
        } else {
            // uniformizer y - y0; solve G(x0 + X(s), y0 + s) = 0 for X
            let fx = k.sub(
                k.mul(poly::eval(&k, &poly::derivative(&k, h), x0), y0),
                poly::eval(&k, &poly::derivative(&k, f), x0),
            );
            let inv = k.inv(fx).ok_or_else(|| Error::SingularCurve("singular point met during expansion".into()))?;
            let ys: Vec<Elem> = (0..prec).map(|i| [y0, 1].get(i).copied().unwrap_or(0)).collect();
            let mut xs = vec![0; prec];
            xs[0] = x0;
            for n in 1..prec {
                let p = n + 1;
                let hx = poly_at_series(&k, h, &xs[..p], p);
                let fxs = poly_at_series(&k, f, &xs[..p], p);
                let yy = series_mul(&k, &ys[..p], &ys[..p], p);
                let hy = series_mul(&k, &hx, &ys[..p], p);
                let r = k.sub(k.add(yy[n], hy[n]), fxs[n]);
                xs[n] = k.neg(k.mul(r, inv));
            }
            (xs, ys, 2)
        };
        Ok(LocalParam { field: k, point: *pt, x, y, ramification, prec })
    }
}
