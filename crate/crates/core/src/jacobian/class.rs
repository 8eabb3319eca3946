use super::{BasePointConfig, Divisor, DivisorClass, GroupLaw};
use crate::curve::{CurveModel, Place};
use crate::error::{Error, Result};

/// Canonical class of `[D - deg(D) D1]`.
pub fn class_of(model: &CurveModel, base: &BasePointConfig, law: &dyn GroupLaw, d: &Divisor) -> Result<DivisorClass> {
    law.reduce(model, base, d)
}

/// The class `[P - deg(P) D1]` of a place.
pub fn frobenius_class(
    model: &CurveModel,
    base: &BasePointConfig,
    law: &dyn GroupLaw,
    place: &Place,
) -> Result<DivisorClass> {
    law.reduce(model, base, &Divisor::place(*place))
}

/// Image of a class under the q^m-power Frobenius.
pub fn frobenius_on_class(
    model: &CurveModel,
    base: &BasePointConfig,
    law: &dyn GroupLaw,
    x: &DivisorClass,
    m: u32,
) -> Result<DivisorClass> {
    let n = x.level();
    let d1 = base.at_level(model, n)?;
    if d1.frobenius(model, m)? != d1 {
        return Err(Error::Precondition("D1 is not Frobenius-stable".into()));
    }
    law.reduce(model, base, &x.representative().frobenius(model, m)?)
}

/// The image of a class of level n in the group of level n*m.
pub fn include_class(
    model: &CurveModel,
    base: &BasePointConfig,
    law: &dyn GroupLaw,
    x: &DivisorClass,
    m: u32,
) -> Result<DivisorClass> {
    law.reduce(model, base, &x.representative().lift(model, m)?)
}
