//! Characters of a finite abelian group `Z/d_1 + ... + Z/d_r` with values in Z[ζ_N].

use serde::{Deserialize, Serialize};

use crate::cyclotomic::{CyclotomicInteger, ExponentReducer};
use crate::error::{Error, Result};

pub const DEFAULT_CHARACTER_CAP: u64 = 5000;

/// χ(Σ e_i g_i) = ζ_N^(Σ a_i e_i N / d_i) with N = d_r.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Character {
    pub invariants: Vec<u64>,
    pub exponents: Vec<u64>,
}

impl Character {
    pub fn trivial(invariants: &[u64]) -> Self {
        Character { invariants: invariants.to_vec(), exponents: vec![0; invariants.len()] }
    }

    /// N, the order of the value ring.
    pub fn modulus(&self) -> u64 {
        self.invariants.last().copied().unwrap_or(1)
    }

    pub fn is_trivial(&self) -> bool {
        self.exponents.iter().all(|&a| a == 0)
    }

    /// k with χ(x) = ζ_N^k for x given by coordinates.
    pub fn value_exponent(&self, coords: &[u64]) -> u64 {
        let n = self.modulus();
        let mut k = 0u64;
        for ((&a, &e), &d) in self.exponents.iter().zip(coords).zip(&self.invariants) {
            k = (k + (a * (e % d)) % d * (n / d)) % n;
        }
        k
    }

    pub fn evaluate(&self, coords: &[u64]) -> CyclotomicInteger {
        CyclotomicInteger::zeta_power(self.modulus() as u32, self.value_exponent(coords) as i64)
    }

    /// χ^a.
    pub fn power(&self, a: u64) -> Self {
        Character {
            invariants: self.invariants.clone(),
            exponents: self.exponents.iter().zip(&self.invariants).map(|(&e, &d)| (e * (a % d)) % d).collect(),
        }
    }

    /// Order of χ in the dual group.
    pub fn order(&self) -> u64 {
        self.exponents
            .iter()
            .zip(&self.invariants)
            .map(|(&e, &d)| d / crate::arith::gcd(e, d))
            .fold(1, crate::arith::lcm)
    }
}

/// Every character, trivial first, in mixed-radix order of the exponent vector
/// (first coordinate varying fastest).
pub fn all_characters(invariants: &[u64], cap: u64) -> Result<Vec<Character>> {
    let order: u64 = invariants.iter().product();
    if order > cap {
        return Err(Error::CapExceeded { what: "character count", value: order as u128, cap: cap as u128 });
    }
    let mut out = Vec::with_capacity(order as usize);
    for mut code in 0..order {
        let mut exps = Vec::with_capacity(invariants.len());
        for &d in invariants {
            exps.push(code % d);
            code /= d;
        }
        out.push(Character { invariants: invariants.to_vec(), exponents: exps });
    }
    Ok(out)
}

/// Σ_x weights(x) χ(x) over elements given by their coordinates.
pub fn character_sum<'a>(
    chi: &Character,
    reducer: &ExponentReducer,
    elements: impl IntoIterator<Item = (&'a [u64], i128)>,
) -> CyclotomicInteger {
    let n = chi.modulus() as usize;
    let mut acc = vec![0i128; n];
    for (c, w) in elements {
        if w != 0 {
            acc[chi.value_exponent(c) as usize] += w;
        }
    }
    reducer.reduce(acc)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn coords_of(invariants: &[u64]) -> Vec<Vec<u64>> {
        all_characters(invariants, 10_000).unwrap().into_iter().map(|c| c.exponents).collect()
    }

    #[test]
    fn counts_and_trivial_first() {
        assert_eq!(all_characters(&[], 10).unwrap().len(), 1);
        let z5 = all_characters(&[5], 10).unwrap();
        assert_eq!(z5.len(), 5);
        assert!(z5[0].is_trivial());
        assert_eq!(z5[1].evaluate(&[1]), CyclotomicInteger::zeta_power(5, 1));
        assert!(all_characters(&[100, 100], 5000).is_err());
    }

    #[test]
    fn orthogonality_and_multiplicativity() {
        for inv in [vec![5u64], vec![2, 6], vec![3, 3, 9]] {
            let n = *inv.last().unwrap() as u32;
            let red = ExponentReducer::new(n);
            let elems = coords_of(&inv);
            let size = elems.len() as i128;
            for chi in all_characters(&inv, 10_000).unwrap() {
                let s = character_sum(&chi, &red, elems.iter().map(|c| (c.as_slice(), 1)));
                let expect = if chi.is_trivial() { size } else { 0 };
                assert_eq!(s, CyclotomicInteger::from_int(n, expect));
                for (a, b) in elems.iter().zip(elems.iter().rev()).take(5) {
                    let sum: Vec<u64> = a.iter().zip(b).zip(&inv).map(|((x, y), d)| (x + y) % d).collect();
                    assert_eq!(chi.evaluate(&sum), chi.evaluate(a).mul(&chi.evaluate(b)));
                }
            }
        }
    }

    #[test]
    fn pairing_is_nondegenerate() {
        let inv = vec![2u64, 4];
        let elems = coords_of(&inv);
        let chars = all_characters(&inv, 100).unwrap();
        for x in elems.iter().skip(1) {
            assert!(chars.iter().any(|c| c.value_exponent(x) != 0));
        }
    }
}
