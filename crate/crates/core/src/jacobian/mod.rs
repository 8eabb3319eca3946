//! Divisors, the Abel-Jacobi map and the group J_C(F_{q^n}).

mod cantor;
mod class;
mod group;
mod law;
mod riemann_roch;

pub use cantor::CantorLaw;
pub use class::{class_of, frobenius_class, frobenius_on_class, include_class};
pub use group::{enumerate_group, GroupStructure, JacobianGroup, DEFAULT_GROUP_CAP};
pub use law::{group_law, law_names, GroupLaw, RiemannRochLaw};
pub use riemann_roch::{divisor_of, is_principal, riemann_roch_space, FunctionElt, RrSpace};

use crate::curve::{CurveModel, Place};
use crate::error::{Error, Result};

/// A formal sum of places of `C ⊗ F_{q^level}`; terms sorted, nonzero.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Divisor {
    level: u32,
    terms: Vec<(Place, i64)>,
}

impl Divisor {
    pub fn zero(level: u32) -> Self {
        Divisor { level, terms: Vec::new() }
    }

    pub fn from_terms(level: u32, terms: impl IntoIterator<Item = (Place, i64)>) -> Result<Self> {
        let mut v: Vec<(Place, i64)> = terms.into_iter().collect();
        if let Some((p, _)) = v.iter().find(|(p, _)| p.level != level) {
            return Err(Error::Precondition(format!("place at level {} in a level-{level} divisor", p.level)));
        }
        v.sort_by(|a, b| a.0.cmp(&b.0));
        let mut out: Vec<(Place, i64)> = Vec::with_capacity(v.len());
        for (p, m) in v {
            match out.last_mut() {
                Some((q, acc)) if *q == p => *acc += m,
                _ => out.push((p, m)),
            }
        }
        out.retain(|&(_, m)| m != 0);
        Ok(Divisor { level, terms: out })
    }

    pub fn place(p: Place) -> Self {
        Divisor { level: p.level, terms: vec![(p, 1)] }
    }

    pub fn level(&self) -> u32 {
        self.level
    }

    pub fn terms(&self) -> &[(Place, i64)] {
        &self.terms
    }

    pub fn degree(&self) -> i64 {
        self.terms.iter().map(|(p, m)| m * p.degree as i64).sum()
    }

    pub fn is_effective(&self) -> bool {
        self.terms.iter().all(|&(_, m)| m > 0)
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn multiplicity(&self, p: &Place) -> i64 {
        self.terms.binary_search_by(|(q, _)| q.cmp(p)).map_or(0, |i| self.terms[i].1)
    }

    pub fn add(&self, other: &Divisor) -> Divisor {
        debug_assert_eq!(self.level, other.level);
        Divisor::from_terms(self.level, self.terms.iter().chain(&other.terms).copied()).unwrap()
    }

    pub fn scale(&self, k: i64) -> Divisor {
        Divisor::from_terms(self.level, self.terms.iter().map(|&(p, m)| (p, k * m))).unwrap()
    }

    pub fn sub(&self, other: &Divisor) -> Divisor {
        self.add(&other.scale(-1))
    }

    pub fn positive_part(&self) -> Divisor {
        Divisor { level: self.level, terms: self.terms.iter().copied().filter(|&(_, m)| m > 0).collect() }
    }

    pub fn negative_part(&self) -> Divisor {
        Divisor { level: self.level, terms: self.terms.iter().filter(|&&(_, m)| m < 0).map(|&(p, m)| (p, -m)).collect() }
    }

    /// The same divisor viewed on `C ⊗ F_{q^(level*m)}`.
    pub fn lift(&self, model: &CurveModel, m: u32) -> Result<Divisor> {
        let mut terms = Vec::new();
        for &(p, k) in &self.terms {
            for q in model.split_place(&p, m)? {
                terms.push((q, k));
            }
        }
        Divisor::from_terms(self.level * m, terms)
    }

    /// Image under the q^j-power Frobenius.
    pub fn frobenius(&self, model: &CurveModel, j: u32) -> Result<Divisor> {
        let mut terms = Vec::with_capacity(self.terms.len());
        for &(p, k) in &self.terms {
            terms.push((model.frobenius_place(&p, j)?, k));
        }
        Divisor::from_terms(self.level, terms)
    }
}

/// The fixed degree-one divisor D1 defining the Abel-Jacobi map.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct BasePointConfig {
    d1: Divisor,
}

impl BasePointConfig {
    /// The least rational place of C.
    pub fn default_for(model: &CurveModel) -> Result<Self> {
        let places = model.places_of_degree(1, 1)?;
        let p = places.first().ok_or_else(|| {
            Error::Precondition("C(F_q) is empty; supply a degree-one divisor explicitly".into())
        })?;
        Ok(BasePointConfig { d1: Divisor::place(*p) })
    }

    /// A user-supplied combination of places of C (level 1) of degree one.
    pub fn custom(d1: Divisor) -> Result<Self> {
        if d1.level() != 1 {
            return Err(Error::Precondition("D1 must be built from places of C over F_q".into()));
        }
        if d1.degree() != 1 {
            return Err(Error::Precondition(format!("D1 has degree {}, expected 1", d1.degree())));
        }
        Ok(BasePointConfig { d1 })
    }

    pub fn divisor(&self) -> &Divisor {
        &self.d1
    }

    /// D1 viewed at level n.
    pub fn at_level(&self, model: &CurveModel, n: u32) -> Result<Divisor> {
        self.d1.lift(model, n)
    }

    /// The rational place when D1 is a single rational place (lifted to level n).
    pub fn rational_place(&self, model: &CurveModel, n: u32) -> Result<Option<Place>> {
        let d = self.at_level(model, n)?;
        Ok(match d.terms() {
            [(p, 1)] if p.degree == 1 => Some(*p),
            _ => None,
        })
    }
}

/// The degree-zero class `[E - deg(E) D1]` with E in canonical form.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct DivisorClass {
    rep: Divisor,
}

impl DivisorClass {
    pub(crate) fn from_canonical(rep: Divisor) -> Self {
        DivisorClass { rep }
    }

    pub fn zero(level: u32) -> Self {
        DivisorClass { rep: Divisor::zero(level) }
    }

    pub fn representative(&self) -> &Divisor {
        &self.rep
    }

    /// m = deg E.
    pub fn weight(&self) -> i64 {
        self.rep.degree()
    }

    pub fn level(&self) -> u32 {
        self.rep.level()
    }

    pub fn is_zero(&self) -> bool {
        self.rep.is_zero()
    }
}

impl PartialOrd for DivisorClass {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for DivisorClass {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        (self.weight(), &self.rep).cmp(&(other.weight(), &other.rep))
    }
}
