//! The product of L(t, χ) over the whole character table.
//!
//! For small groups the product is formed exactly in Z[ζ_N]. Otherwise it is
//! computed modulo primes l = 1 mod N, where ζ_N becomes an element of order N
//! in F_l, and lifted by the Chinese remainder theorem. Each prime is used
//! with two different primitive roots; a product with irrational coefficients
//! would generally differ between the two.

use num_bigint::BigInt;
use num_complex::Complex64;

use super::{apply_character, character_exponents, exponent_counts, DivisorSum, LSeriesMethod};
use crate::arith;
use crate::census::CensusTable;
use crate::characters::{all_characters, Character};
use crate::curve::CurveModel;
use crate::cyclotomic::CyclotomicInteger;
use crate::error::{Error, Result};
use crate::jacobian::JacobianGroup;
use crate::numeric;

pub const DEFAULT_PRODUCT_CAP: u64 = 1000;
const EXACT_LIMIT: usize = 40;

#[derive(Clone, Debug)]
pub struct TableProduct {
    pub level: u32,
    pub group_order: u64,
    /// Integer coefficients, low degree first.
    pub coeffs: Vec<BigInt>,
    /// Whether the product was formed in Z[ζ_N] rather than modularly.
    pub exact: bool,
    /// Largest | |root| - q^(-n/2) | over the roots of every factor.
    pub max_root_deviation: f64,
}

impl TableProduct {
    pub fn degree(&self) -> usize {
        self.coeffs.len() - 1
    }
}

fn poly_mul_mod(a: &[u64], b: &[u64], l: u64) -> Vec<u64> {
    let mut out = vec![0u64; a.len() + b.len() - 1];
    for (i, &x) in a.iter().enumerate() {
        for (j, &y) in b.iter().enumerate() {
            out[i + j] = (out[i + j] + arith::mul_mod(x, y, l)) % l;
        }
    }
    out
}

fn primitive_root_of_unity(n: u64, l: u64) -> u64 {
    let factors = arith::prime_factors(n);
    for g in 2..l {
        let w = arith::pow_mod(g, (l - 1) / n, l);
        if factors.iter().all(|&r| arith::pow_mod(w, n / r, l) != 1) {
            return w;
        }
    }
    unreachable!("F_l* is cyclic")
}

/// Primes l = 1 mod n below 2^62, largest first.
fn primes_one_mod(n: u64) -> impl Iterator<Item = u64> {
    let top = (1u64 << 62) / n * n + 1;
    (0..).map(move |k| top - k * n).take_while(move |&l| l > n).filter(|&l| arith::is_prime(l))
}

pub fn character_table_product(
    model: &CurveModel,
    group: &JacobianGroup,
    census: &CensusTable,
    cap: u64,
) -> Result<TableProduct> {
    let h = group.order();
    if h as u64 > cap {
        return Err(Error::CapExceeded { what: "character-table product", value: h as u128, cap: cap as u128 });
    }
    let n = group.level();
    let qn = model.q().pow(n);
    let g = model.genus() as usize;
    let deg_l = (2 * g).saturating_sub(2);
    let zeta = model.level_zeta_numerator(n)?;
    let chars: Vec<Character> = all_characters(group.invariants(), cap)?.into_iter().skip(1).collect();
    let series = DivisorSum.class_series(model, group, Some(census), deg_l as u32)?;
    let modulus = group.exponent();
    let expected_degree = (h - 1) * deg_l + 2 * g;

    // roots of every factor
    let target = (qn as f64).powf(-0.5);
    let mut deviation = numeric::modulus_deviation(&numeric::integer_roots(&zeta), target);
    let mut factors: Vec<Vec<CyclotomicInteger>> = Vec::with_capacity(chars.len());
    for chi in &chars {
        let f = apply_character(group, chi, &series);
        let c: Vec<Complex64> = f.iter().map(|z| z.to_complex()).collect();
        deviation = deviation.max(numeric::modulus_deviation(&numeric::roots(&c), target));
        factors.push(f);
    }

    let coeffs: Vec<BigInt> = if h <= EXACT_LIMIT {
        let order = modulus as u32;
        let mut acc: Vec<CyclotomicInteger> = zeta.iter().map(|&c| CyclotomicInteger::from_int(order, c)).collect();
        for f in &factors {
            let mut next = vec![CyclotomicInteger::zero(order); acc.len() + f.len() - 1];
            for (i, a) in acc.iter().enumerate() {
                for (j, b) in f.iter().enumerate() {
                    next[i + j] = next[i + j].add(&a.mul(b));
                }
            }
            acc = next;
        }
        acc.iter()
            .map(|c| {
                c.as_integer()
                    .map(BigInt::from)
                    .ok_or_else(|| Error::Inconsistent("character-table product has an irrational coefficient".into()))
            })
            .collect::<Result<_>>()?
    } else {
        modular_product(group, &chars, &series, &zeta, modulus, qn, expected_degree)?
    };
    let mut coeffs = coeffs;
    while coeffs.len() > 1 && coeffs.last() == Some(&BigInt::from(0)) {
        coeffs.pop();
    }
    if coeffs[0] != BigInt::from(1) {
        return Err(Error::Inconsistent("character-table product has constant term different from 1".into()));
    }
    if coeffs.len() - 1 != expected_degree {
        return Err(Error::Inconsistent(format!(
            "character-table product has degree {}, expected {expected_degree}",
            coeffs.len() - 1
        )));
    }
    Ok(TableProduct { level: n, group_order: h as u64, coeffs, exact: h <= EXACT_LIMIT, max_root_deviation: deviation })
}

fn modular_product(
    group: &JacobianGroup,
    chars: &[Character],
    series: &super::ClassSeries,
    zeta: &[i128],
    modulus: u64,
    qn: u64,
    degree: usize,
) -> Result<Vec<BigInt>> {
    // |coefficient| <= 2^D q^(D/2)
    let bits = degree as f64 * (1.0 + (qn as f64).log2() / 2.0) + 2.0;
    let counts: Vec<Vec<Vec<i128>>> =
        chars.iter().map(|chi| exponent_counts(&character_exponents(group, chi), modulus, series)).collect();
    let second = (2..modulus.max(2)).find(|&u| arith::gcd(u, modulus) == 1).unwrap_or(1);
    let mut residue = vec![BigInt::from(0); degree + 1];
    let mut m = BigInt::from(1);
    let mut have = 0.0;
    for l in primes_one_mod(modulus) {
        if have > bits {
            break;
        }
        let w = primitive_root_of_unity(modulus, l);
        let image = |w: u64| -> Vec<u64> {
            let powers: Vec<u64> = (0..modulus).map(|k| arith::pow_mod(w, k, l)).collect();
            let mut acc: Vec<u64> = zeta.iter().map(|&c| c.rem_euclid(l as i128) as u64).collect();
            for per_degree in &counts {
                let f: Vec<u64> = per_degree
                    .iter()
                    .map(|v| {
                        v.iter().zip(&powers).fold(0u64, |s, (&c, &p)| {
                            (s + arith::mul_mod(c.rem_euclid(l as i128) as u64, p, l)) % l
                        })
                    })
                    .collect();
                acc = poly_mul_mod(&acc, &f, l);
            }
            acc.resize(degree + 1, 0);
            acc
        };
        let a = image(w);
        if second != 1 && image(arith::pow_mod(w, second, l)) != a {
            return Err(Error::Inconsistent("character-table product has an irrational coefficient".into()));
        }
        // incremental CRT
        let lb = BigInt::from(l);
        let m_mod = u64::try_from(&(&m % &lb)).unwrap();
        let inv = arith::pow_mod(m_mod, l - 2, l);
        for (r, &ai) in residue.iter_mut().zip(&a) {
            let cur = u64::try_from(&(&*r % &lb)).unwrap();
            let t = arith::mul_mod((ai + l - cur) % l, inv, l);
            *r += &m * BigInt::from(t);
        }
        m *= lb;
        have += (l as f64).log2();
    }
    let half = &m / 2;
    Ok(residue.into_iter().map(|r| if r > half { r - &m } else { r }).collect())
}
