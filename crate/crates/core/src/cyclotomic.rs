//! Exact arithmetic in Z[ζ_N], reduced modulo the N-th cyclotomic polynomial.

use std::collections::HashMap;
use std::sync::{Arc, Mutex, OnceLock};

use serde::{Deserialize, Serialize};

use crate::arith;

/// Φ_N by dividing x^N - 1 by Φ_m for the proper divisors m of N.
pub fn cyclotomic_polynomial(n: u32) -> Arc<Vec<i128>> {
    static CACHE: OnceLock<Mutex<HashMap<u32, Arc<Vec<i128>>>>> = OnceLock::new();
    let cache = CACHE.get_or_init(Default::default);
    if let Some(p) = cache.lock().unwrap().get(&n) {
        return p.clone();
    }
    assert!(n >= 1);
    let mut p = vec![0i128; n as usize + 1];
    p[0] = -1;
    p[n as usize] = 1;
    for m in 1..n {
        if n % m == 0 {
            p = exact_div(&p, &cyclotomic_polynomial(m));
        }
    }
    let p = Arc::new(p);
    cache.lock().unwrap().insert(n, p.clone());
    p
}

fn exact_div(a: &[i128], b: &[i128]) -> Vec<i128> {
    let mut r = a.to_vec();
    let db = b.len() - 1;
    let mut q = vec![0i128; a.len() - db];
    for i in (0..q.len()).rev() {
        let c = r[i + db];
        q[i] = c;
        if c != 0 {
            for (j, &bj) in b.iter().enumerate() {
                r[i + j] -= c * bj;
            }
        }
    }
    debug_assert!(r.iter().all(|&x| x == 0));
    q
}

/// Reduces a polynomial in ζ modulo Φ_N, in place; returns the first φ(N) coefficients.
fn reduce(n: u32, mut v: Vec<i128>) -> Vec<i128> {
    let phi = cyclotomic_polynomial(n);
    let deg = phi.len() - 1;
    let support: Vec<(usize, i128)> = phi[..deg].iter().copied().enumerate().filter(|&(_, c)| c != 0).collect();
    for i in (deg..v.len()).rev() {
        let c = v[i];
        if c != 0 {
            v[i] = 0;
            for &(j, pj) in &support {
                v[i - deg + j] -= c * pj;
            }
        }
    }
    v.resize(deg, 0);
    v
}

/// An element of Z[ζ_N] in the power basis 1, ζ, ..., ζ^(φ(N)-1).
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct CyclotomicInteger {
    pub order: u32,
    pub coeffs: Vec<i128>,
}

impl CyclotomicInteger {
    pub fn zero(order: u32) -> Self {
        CyclotomicInteger { order, coeffs: vec![0; arith::totient(order as u64) as usize] }
    }

    pub fn from_int(order: u32, c: i128) -> Self {
        let mut z = Self::zero(order);
        z.coeffs[0] = c;
        z
    }

    pub fn one(order: u32) -> Self {
        Self::from_int(order, 1)
    }

    /// ζ_N^k.
    pub fn zeta_power(order: u32, k: i64) -> Self {
        let k = k.rem_euclid(order as i64) as usize;
        let mut v = vec![0; k + 1];
        v[k] = 1;
        CyclotomicInteger { order, coeffs: reduce(order, v) }
    }

    /// Σ counts[k] ζ^k for a vector indexed by exponents mod N.
    pub fn from_exponent_counts(order: u32, counts: &[i128]) -> Self {
        let mut v = vec![0i128; order as usize];
        for (k, &c) in counts.iter().enumerate() {
            v[k % order as usize] += c;
        }
        CyclotomicInteger { order, coeffs: reduce(order, v) }
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|&c| c == 0)
    }

    /// The value as a rational integer, if it is one.
    pub fn as_integer(&self) -> Option<i128> {
        self.coeffs[1..].iter().all(|&c| c == 0).then(|| self.coeffs[0])
    }

    pub fn add(&self, o: &Self) -> Self {
        let (a, b) = lift_pair(self, o);
        CyclotomicInteger { order: a.order, coeffs: a.coeffs.iter().zip(&b.coeffs).map(|(x, y)| x + y).collect() }
    }

    pub fn sub(&self, o: &Self) -> Self {
        self.add(&o.scalar_mul(-1))
    }

    pub fn scalar_mul(&self, k: i128) -> Self {
        CyclotomicInteger { order: self.order, coeffs: self.coeffs.iter().map(|c| c * k).collect() }
    }

    pub fn mul(&self, o: &Self) -> Self {
        let (a, b) = lift_pair(self, o);
        let mut v = vec![0i128; a.coeffs.len() + b.coeffs.len()];
        for (i, &x) in a.coeffs.iter().enumerate() {
            if x == 0 {
                continue;
            }
            for (j, &y) in b.coeffs.iter().enumerate() {
                v[i + j] += x * y;
            }
        }
        CyclotomicInteger { order: a.order, coeffs: reduce(a.order, v) }
    }

    /// Multiplication by ζ^k.
    pub fn mul_zeta(&self, k: i64) -> Self {
        let n = self.order as usize;
        let k = k.rem_euclid(n as i64) as usize;
        let mut v = vec![0i128; n];
        for (i, &c) in self.coeffs.iter().enumerate() {
            v[(i + k) % n] += c;
        }
        CyclotomicInteger { order: self.order, coeffs: reduce(self.order, v) }
    }

    /// Exact division by a rational integer, if it divides every coefficient.
    pub fn div_exact(&self, k: i128) -> Option<Self> {
        self.coeffs
            .iter()
            .all(|c| c % k == 0)
            .then(|| CyclotomicInteger { order: self.order, coeffs: self.coeffs.iter().map(|c| c / k).collect() })
    }

    /// The same element viewed in Z[ζ_M] for a multiple M of N.
    pub fn lift(&self, m: u32) -> Self {
        assert_eq!(m % self.order, 0, "lift to a non-multiple order");
        let s = (m / self.order) as usize;
        let mut v = vec![0i128; (self.coeffs.len().max(1) - 1) * s + 1];
        for (i, &c) in self.coeffs.iter().enumerate() {
            v[i * s] = c;
        }
        CyclotomicInteger { order: m, coeffs: reduce(m, v) }
    }

    /// Image under ζ ↦ ζ^a for a unit a mod N.
    pub fn galois(&self, a: u64) -> Self {
        let n = self.order as usize;
        let mut v = vec![0i128; n];
        for (i, &c) in self.coeffs.iter().enumerate() {
            v[(i * a as usize) % n] += c;
        }
        CyclotomicInteger { order: self.order, coeffs: reduce(self.order, v) }
    }

    /// Value under ζ_N ↦ exp(2πi/N).
    pub fn to_complex(&self) -> num_complex::Complex64 {
        let w = 2.0 * std::f64::consts::PI / self.order as f64;
        self.coeffs
            .iter()
            .enumerate()
            .map(|(i, &c)| num_complex::Complex64::from_polar(c as f64, w * i as f64))
            .sum()
    }
}

fn lift_pair(a: &CyclotomicInteger, b: &CyclotomicInteger) -> (CyclotomicInteger, CyclotomicInteger) {
    if a.order == b.order {
        return (a.clone(), b.clone());
    }
    let m = arith::lcm(a.order as u64, b.order as u64) as u32;
    (a.lift(m), b.lift(m))
}

/// Reduction of exponent-count vectors for one fixed order, with a reusable buffer.
pub struct ExponentReducer {
    order: u32,
    support: Vec<(usize, i128)>,
    deg: usize,
}

impl ExponentReducer {
    pub fn new(order: u32) -> Self {
        let phi = cyclotomic_polynomial(order);
        let deg = phi.len() - 1;
        let support = phi[..deg].iter().copied().enumerate().filter(|&(_, c)| c != 0).collect();
        ExponentReducer { order, support, deg }
    }

    pub fn order(&self) -> u32 {
        self.order
    }

    /// Reduces a length-N exponent-count vector (consumed as scratch).
    pub fn reduce(&self, mut v: Vec<i128>) -> CyclotomicInteger {
        for i in (self.deg..v.len()).rev() {
            let c = v[i];
            if c != 0 {
                v[i] = 0;
                for &(j, pj) in &self.support {
                    v[i - self.deg + j] -= c * pj;
                }
            }
        }
        v.truncate(self.deg);
        v.resize(self.deg, 0);
        CyclotomicInteger { order: self.order, coeffs: v }
    }
}
