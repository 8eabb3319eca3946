//! Hyperelliptic curves `y^2 + h(x) y = f(x)` over F_q.
//!
//! The smooth projective model is covered by two charts: the affine one in
//! `(x, y)` and the one at infinity in `(X, Y) = (1/x, y/x^(g+1))`, where the
//! curve reads `Y^2 + h~(X) Y = f~(X)` with `h~(X) = X^(g+1) h(1/X)` and
//! `f~(X) = X^(2g+2) f(1/X)`. Points at infinity are the points with `X = 0`.

mod local;
mod points;
mod zeta;

pub use local::{poly_at_series, series_mul, LocalParam};
pub(crate) use points::fiber as fiber_points;
pub use points::{GeometricPoint, Place, PointKind};
pub use zeta::{coefficients_from_power_sums, det_one_minus_power, level_numerator, power_sums};

use std::collections::HashMap;
use std::fmt;
use std::sync::{Arc, Mutex, OnceLock};

use crate::error::{Error, Result};
use crate::field::{self, Elem, FieldDescriptor};
use crate::poly::{self, Poly};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ModelKind {
    /// One ramified point at infinity (`deg f = 2g+1` in odd characteristic).
    Imaginary,
    /// Two points at infinity over the algebraic closure (`deg f = 2g+2`).
    Real,
}

/// Curve coefficients pushed into F_{q^m}.
#[derive(Debug)]
pub struct LevelCoeffs {
    pub field: Arc<FieldDescriptor>,
    pub h: Poly,
    pub f: Poly,
    pub h_inf: Poly,
    pub f_inf: Poly,
}

impl LevelCoeffs {
    /// (h, f) of the requested chart.
    pub fn chart(&self, kind: PointKind) -> (&[Elem], &[Elem]) {
        match kind {
            PointKind::Affine => (&self.h, &self.f),
            PointKind::Infinity => (&self.h_inf, &self.f_inf),
        }
    }
}

#[derive(Default)]
struct Caches {
    coeffs: Mutex<HashMap<u32, Arc<LevelCoeffs>>>,
    places: Mutex<HashMap<(u32, u32), Arc<Vec<Place>>>>,
    counts: Mutex<HashMap<u32, u64>>,
    local: Mutex<HashMap<Place, Arc<LocalParam>>>,
    zeta: OnceLock<Vec<i128>>,
}

pub struct CurveModel {
    base: Arc<FieldDescriptor>,
    h: Poly,
    f: Poly,
    genus: u32,
    kind: ModelKind,
    label: String,
    caches: Caches,
}

impl fmt::Debug for CurveModel {
    fn fmt(&self, fm: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(fm, "CurveModel({}: y^2 + {:?} y = {:?} over {:?})", self.label, self.h, self.f, self.base)
    }
}

impl Clone for CurveModel {
    fn clone(&self) -> Self {
        CurveModel {
            base: self.base.clone(),
            h: self.h.clone(),
            f: self.f.clone(),
            genus: self.genus,
            kind: self.kind,
            label: self.label.clone(),
            caches: Caches::default(),
        }
    }
}

impl PartialEq for CurveModel {
    fn eq(&self, other: &Self) -> bool {
        self.base == other.base && self.h == other.h && self.f == other.f
    }
}

impl CurveModel {
    /// Validates `y^2 + h y = f` over the canonical field `base`.
    pub fn new(base: Arc<FieldDescriptor>, h: Poly, f: Poly, label: impl Into<String>) -> Result<Self> {
        let h = poly::trimmed(h);
        let f = poly::trimmed(f);
        if h.iter().chain(&f).any(|&c| c >= base.size()) {
            return Err(Error::InvalidCurve("coefficient outside the base field".into()));
        }
        let fd = &*base;
        let (genus, kind) = if fd.characteristic() != 2 {
            let four = fd.from_int(4);
            let disc = poly::add(fd, &poly::mul(fd, &h, &h), &poly::scale(fd, &f, four));
            let d = poly::degree(&disc).ok_or_else(|| Error::SingularCurve("h^2 + 4f vanishes identically".into()))?;
            if d <= 2 {
                return Err(Error::InvalidCurve("genus 0".into()));
            }
            let g = (d as u32 + 1) / 2 - 1;
            if poly::degree(&h).map_or(false, |dh| dh as u32 > g + 1) || poly::degree(&f).map_or(0, |df| df) as u32 > 2 * g + 2 {
                return Err(Error::InvalidCurve("model is not in minimal degree form".into()));
            }
            let dd = poly::derivative(fd, &disc);
            if poly::degree(&poly::gcd(fd, &disc, &dd)) != Some(0) {
                return Err(Error::SingularCurve("h^2 + 4f is not squarefree".into()));
            }
            (g, if d % 2 == 1 { ModelKind::Imaginary } else { ModelKind::Real })
        } else {
            let dh = poly::degree(&h).ok_or_else(|| Error::Unsupported("characteristic 2 requires h != 0".into()))? as u32;
            let df = poly::degree(&f).map_or(0, |d| d as u32);
            let g = ((df + 1) / 2).saturating_sub(1).max(dh.saturating_sub(1));
            if g == 0 {
                return Err(Error::InvalidCurve("genus 0".into()));
            }
            let hp = poly::derivative(fd, &h);
            let fp = poly::derivative(fd, &f);
            let test = poly::add(fd, &poly::mul(fd, &fp, &fp), &poly::mul(fd, &poly::mul(fd, &hp, &hp), &f));
            if poly::degree(&poly::gcd(fd, &h, &test)) != Some(0) {
                return Err(Error::SingularCurve("singular affine point".into()));
            }
            (g, if dh == g + 1 { ModelKind::Real } else { ModelKind::Imaginary })
        };
        let model = CurveModel { base, h, f, genus, kind, label: label.into(), caches: Caches::default() };
        model.check_infinity()?;
        Ok(model)
    }

    fn check_infinity(&self) -> Result<()> {
        let fd = &*self.base;
        let (hi, fi) = (self.chart_inf_h(), self.chart_inf_f());
        let at = |a: &Poly, i: usize| *a.get(i).unwrap_or(&0);
        if fd.characteristic() != 2 {
            // (2Y + h~)^2 = h~^2 + 4 f~ must not have a double root at X = 0
            let disc = poly::add(fd, &poly::mul(fd, &hi, &hi), &poly::scale(fd, &fi, fd.from_int(4)));
            if at(&disc, 0) == 0 && at(&disc, 1) == 0 {
                return Err(Error::SingularCurve("singular point at infinity".into()));
            }
        } else if at(&hi, 0) == 0 {
            let y0 = fd.sqrt(at(&fi, 0)).unwrap();
            if fd.mul(at(&hi, 1), y0) == at(&fi, 1) {
                return Err(Error::SingularCurve("singular point at infinity".into()));
            }
        }
        Ok(())
    }

    fn chart_inf_h(&self) -> Poly {
        let g = self.genus as usize;
        poly::trimmed((0..=g + 1).map(|i| *self.h.get(g + 1 - i).unwrap_or(&0)).collect())
    }

    fn chart_inf_f(&self) -> Poly {
        let g = self.genus as usize;
        poly::trimmed((0..=2 * g + 2).map(|i| *self.f.get(2 * g + 2 - i).unwrap_or(&0)).collect())
    }

    pub fn base(&self) -> &Arc<FieldDescriptor> {
        &self.base
    }

    /// Size q of the base field.
    pub fn q(&self) -> u64 {
        self.base.size() as u64
    }

    pub fn characteristic(&self) -> u32 {
        self.base.characteristic()
    }

    pub fn genus(&self) -> u32 {
        self.genus
    }

    pub fn kind(&self) -> ModelKind {
        self.kind
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn h(&self) -> &[Elem] {
        &self.h
    }

    pub fn f(&self) -> &[Elem] {
        &self.f
    }

    /// The field F_{q^m}.
    pub fn level_field(&self, m: u32) -> Result<Arc<FieldDescriptor>> {
        field::make_field(self.base.characteristic(), self.base.degree() * m)
    }

    /// Coefficients of both charts over F_{q^m}.
    pub fn coeffs(&self, m: u32) -> Result<Arc<LevelCoeffs>> {
        if let Some(c) = self.caches.coeffs.lock().unwrap().get(&m) {
            return Ok(c.clone());
        }
        let k = self.level_field(m)?;
        let e = field::embedding(&self.base, &k)?;
        let map = |a: &Poly| poly::map_coeffs(a, |c| e.apply(c));
        let c = Arc::new(LevelCoeffs {
            field: k,
            h: map(&self.h),
            f: map(&self.f),
            h_inf: map(&self.chart_inf_h()),
            f_inf: map(&self.chart_inf_f()),
        });
        Ok(self.caches.coeffs.lock().unwrap().entry(m).or_insert(c).clone())
    }

    /// Order of vanishing of X = 1/x at the points at infinity (1 or 2).
    pub fn infinity_ramification(&self) -> u32 {
        match self.kind {
            ModelKind::Imaginary => 2,
            ModelKind::Real => 1,
        }
    }

    /// Applies `c -> c^(p^m)` to every coefficient.
    pub fn frobenius_twist(&self, m: u32) -> CurveModel {
        let fd = &self.base;
        let tw = |a: &Poly| poly::map_coeffs(a, |c| fd.frobenius(c, m));
        CurveModel {
            base: self.base.clone(),
            h: tw(&self.h),
            f: tw(&self.f),
            genus: self.genus,
            kind: self.kind,
            label: format!("{}^(p^{m})", self.label),
            caches: Caches::default(),
        }
    }
}
