use std::sync::Arc;

use super::riemann_roch::{divisor_of, riemann_roch_space, RrSpace};
use super::{BasePointConfig, CantorLaw, Divisor, DivisorClass};
use crate::curve::CurveModel;
use crate::error::{Error, Result};
use crate::field::Elem;

/// Projective spaces larger than this are not scanned for the least divisor.
pub const PROJECTIVE_SCAN_CAP: u64 = 100_000;

/// A way of computing canonical class representatives.
pub trait GroupLaw: Send + Sync {
    fn name(&self) -> &'static str;

    /// Errors unless the law can handle this curve and base divisor.
    fn check(&self, model: &CurveModel, base: &BasePointConfig) -> Result<()>;

    /// The canonical class of `[D - deg(D) D1]` at the level of D.
    fn reduce(&self, model: &CurveModel, base: &BasePointConfig, d: &Divisor) -> Result<DivisorClass>;

    fn add(&self, model: &CurveModel, base: &BasePointConfig, a: &DivisorClass, b: &DivisorClass) -> Result<DivisorClass> {
        self.reduce(model, base, &a.representative().add(b.representative()))
    }

    fn neg(&self, model: &CurveModel, base: &BasePointConfig, a: &DivisorClass) -> Result<DivisorClass> {
        self.reduce(model, base, &a.representative().scale(-1))
    }
}

pub fn law_names() -> &'static [&'static str] {
    &["riemann-roch", "cantor"]
}

/// Looks up a group law by name.
pub fn group_law(name: &str) -> Result<Arc<dyn GroupLaw>> {
    match name {
        "riemann-roch" => Ok(Arc::new(RiemannRochLaw)),
        "cantor" => Ok(Arc::new(CantorLaw)),
        other => Err(Error::Unsupported(format!("unknown group law '{other}' (known: {})", law_names().join(", ")))),
    }
}

/// Reduction by Riemann-Roch spaces; works for every model and base divisor.
pub struct RiemannRochLaw;

fn effective_part(model: &CurveModel, f: &super::FunctionElt, shift: &Divisor) -> Result<Divisor> {
    let e = divisor_of(model, f)?.add(shift);
    if !e.is_effective() && !e.is_zero() {
        return Err(Error::Inconsistent(format!("reduction produced a non-effective divisor {e:?}")));
    }
    Ok(e)
}

/// The least effective divisor `div(f) + shift` over nonzero f in the space.
fn least_in_space(model: &CurveModel, space: &RrSpace, shift: &Divisor) -> Result<Divisor> {
    if space.dim() == 1 {
        return effective_part(model, &space.element(0), shift);
    }
    let k = model.level_field(space.level)?;
    let q = k.size() as u64;
    let r = space.dim() as u32;
    let count = (q.pow(r) - 1) / (q - 1);
    if count > PROJECTIVE_SCAN_CAP {
        return Err(Error::CapExceeded { what: "projective scan", value: count as u128, cap: PROJECTIVE_SCAN_CAP as u128 });
    }
    let mut best: Option<Divisor> = None;
    // normalized vectors: leading nonzero coordinate equal to 1
    for lead in 0..r as usize {
        let tail = r as usize - lead - 1;
        for code in 0..q.pow(tail as u32) {
            let mut c: Vec<Elem> = vec![0; r as usize];
            c[lead] = 1;
            let mut rest = code;
            for slot in c.iter_mut().skip(lead + 1) {
                *slot = (rest % q) as Elem;
                rest /= q;
            }
            let e = effective_part(model, &space.combination(&k, &c), shift)?;
            if best.as_ref().map_or(true, |b| e < *b) {
                best = Some(e);
            }
        }
    }
    Ok(best.unwrap())
}

impl GroupLaw for RiemannRochLaw {
    fn name(&self) -> &'static str {
        "riemann-roch"
    }

    fn check(&self, _model: &CurveModel, _base: &BasePointConfig) -> Result<()> {
        Ok(())
    }

    fn reduce(&self, model: &CurveModel, base: &BasePointConfig, d: &Divisor) -> Result<DivisorClass> {
        let n = d.level();
        let g = model.genus() as i64;
        let k = d.degree();
        if let Some(p0) = base.rational_place(model, n)? {
            // largest j with L(D - j P0) != 0; dimensions drop by at most one per step
            let p0 = Divisor::place(p0);
            let mut j = k - g;
            let mut space = riemann_roch_space(model, &d.sub(&p0.scale(j)))?;
            if space.dim() == 0 {
                return Err(Error::Inconsistent("Riemann-Roch space of degree g is empty".into()));
            }
            loop {
                if space.dim() > 1 {
                    j += space.dim() as i64 - 1;
                    space = riemann_roch_space(model, &d.sub(&p0.scale(j)))?;
                    continue;
                }
                let next = riemann_roch_space(model, &d.sub(&p0.scale(j + 1)))?;
                if next.dim() == 0 {
                    break;
                }
                j += 1;
                space = next;
            }
            let shift = d.sub(&p0.scale(j));
            return Ok(DivisorClass::from_canonical(effective_part(model, &space.element(0), &shift)?));
        }
        let d1 = base.at_level(model, n)?;
        for m in 0..=g {
            let shift = d.sub(&d1.scale(k - m));
            let space = riemann_roch_space(model, &shift)?;
            if space.dim() > 0 {
                return Ok(DivisorClass::from_canonical(least_in_space(model, &space, &shift)?));
            }
        }
        Err(Error::Inconsistent("no effective representative of degree <= g".into()))
    }
}
