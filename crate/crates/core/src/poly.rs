//! Dense univariate polynomials over a `FieldDescriptor`.
//!
//! A polynomial is a `Vec<Elem>` of coefficients, low degree first, with no
//! trailing zeros; the zero polynomial is the empty vector.

use crate::field::{Elem, FieldDescriptor};

pub type Poly = Vec<Elem>;

pub fn trim(a: &mut Poly) {
    while a.last() == Some(&0) {
        a.pop();
    }
}

pub fn trimmed(mut a: Poly) -> Poly {
    trim(&mut a);
    a
}

pub fn degree(a: &[Elem]) -> Option<usize> {
    let mut n = a.len();
    while n > 0 && a[n - 1] == 0 {
        n -= 1;
    }
    n.checked_sub(1)
}

pub fn x() -> Poly {
    vec![0, 1]
}

pub fn constant(c: Elem) -> Poly {
    trimmed(vec![c])
}

pub fn add(f: &FieldDescriptor, a: &[Elem], b: &[Elem]) -> Poly {
    let n = a.len().max(b.len());
    let out = (0..n)
        .map(|i| f.add(*a.get(i).unwrap_or(&0), *b.get(i).unwrap_or(&0)))
        .collect();
    trimmed(out)
}

pub fn sub(f: &FieldDescriptor, a: &[Elem], b: &[Elem]) -> Poly {
    let n = a.len().max(b.len());
    let out = (0..n)
        .map(|i| f.sub(*a.get(i).unwrap_or(&0), *b.get(i).unwrap_or(&0)))
        .collect();
    trimmed(out)
}

pub fn scale(f: &FieldDescriptor, a: &[Elem], c: Elem) -> Poly {
    trimmed(a.iter().map(|&x| f.mul(x, c)).collect())
}

pub fn mul(f: &FieldDescriptor, a: &[Elem], b: &[Elem]) -> Poly {
    if a.is_empty() || b.is_empty() {
        return Vec::new();
    }
    let mut out = vec![0; a.len() + b.len() - 1];
    for (i, &x) in a.iter().enumerate() {
        if x == 0 {
            continue;
        }
        for (j, &y) in b.iter().enumerate() {
            out[i + j] = f.add(out[i + j], f.mul(x, y));
        }
    }
    trimmed(out)
}

pub fn pow(f: &FieldDescriptor, a: &[Elem], e: u32) -> Poly {
    let mut acc = vec![1];
    for _ in 0..e {
        acc = mul(f, &acc, a);
    }
    acc
}

/// Quotient and remainder; panics if `b` is zero.
pub fn divrem(f: &FieldDescriptor, a: &[Elem], b: &[Elem]) -> (Poly, Poly) {
    let db = degree(b).expect("division by the zero polynomial");
    let inv_lc = f.inv(b[db]).unwrap();
    let mut r: Poly = trimmed(a.to_vec());
    if r.len() <= db {
        return (Vec::new(), r);
    }
    let mut q = vec![0; r.len() - db];
    while let Some(dr) = degree(&r) {
        if dr < db {
            break;
        }
        let c = f.mul(r[dr], inv_lc);
        q[dr - db] = c;
        for i in 0..=db {
            r[dr - db + i] = f.sub(r[dr - db + i], f.mul(c, b[i]));
        }
        trim(&mut r);
    }
    (trimmed(q), r)
}

pub fn rem(f: &FieldDescriptor, a: &[Elem], b: &[Elem]) -> Poly {
    divrem(f, a, b).1
}

pub fn monic(f: &FieldDescriptor, a: &[Elem]) -> Poly {
    match degree(a) {
        None => Vec::new(),
        Some(d) => scale(f, a, f.inv(a[d]).unwrap()),
    }
}

/// Monic gcd.
pub fn gcd(f: &FieldDescriptor, a: &[Elem], b: &[Elem]) -> Poly {
    let (mut a, mut b) = (trimmed(a.to_vec()), trimmed(b.to_vec()));
    while !b.is_empty() {
        let r = rem(f, &a, &b);
        a = b;
        b = r;
    }
    monic(f, &a)
}

/// Extended gcd: returns (g, s, t) with g = s a + t b and g monic (or zero).
pub fn ext_gcd(f: &FieldDescriptor, a: &[Elem], b: &[Elem]) -> (Poly, Poly, Poly) {
    let (mut r0, mut r1) = (trimmed(a.to_vec()), trimmed(b.to_vec()));
    let (mut s0, mut s1): (Poly, Poly) = (vec![1], Vec::new());
    let (mut t0, mut t1): (Poly, Poly) = (Vec::new(), vec![1]);
    while !r1.is_empty() {
        let (q, r) = divrem(f, &r0, &r1);
        let s2 = sub(f, &s0, &mul(f, &q, &s1));
        let t2 = sub(f, &t0, &mul(f, &q, &t1));
        r0 = std::mem::replace(&mut r1, r);
        s0 = std::mem::replace(&mut s1, s2);
        t0 = std::mem::replace(&mut t1, t2);
    }
    match degree(&r0) {
        None => (r0, s0, t0),
        Some(d) => {
            let c = f.inv(r0[d]).unwrap();
            (scale(f, &r0, c), scale(f, &s0, c), scale(f, &t0, c))
        }
    }
}

pub fn mulmod(f: &FieldDescriptor, a: &[Elem], b: &[Elem], m: &[Elem]) -> Poly {
    rem(f, &mul(f, a, b), m)
}

pub fn powmod(f: &FieldDescriptor, base: &[Elem], mut e: u128, m: &[Elem]) -> Poly {
    let mut acc = rem(f, &[1], m);
    let mut b = rem(f, base, m);
    while e > 0 {
        if e & 1 == 1 {
            acc = mulmod(f, &acc, &b, m);
        }
        b = mulmod(f, &b, &b, m);
        e >>= 1;
    }
    acc
}

pub fn eval(f: &FieldDescriptor, a: &[Elem], x: Elem) -> Elem {
    a.iter().rev().fold(0, |acc, &c| f.add(f.mul(acc, x), c))
}

pub fn derivative(f: &FieldDescriptor, a: &[Elem]) -> Poly {
    trimmed(
        a.iter()
            .enumerate()
            .skip(1)
            .map(|(i, &c)| f.mul(c, f.from_int(i as i64)))
            .collect(),
    )
}

/// Apply a coefficient map (e.g. an embedding) termwise.
pub fn map_coeffs(a: &[Elem], g: impl Fn(Elem) -> Elem) -> Poly {
    trimmed(a.iter().map(|&c| g(c)).collect())
}

/// x^(q^j) mod m by repeated q-th powering.
fn frobenius_x(f: &FieldDescriptor, j: u32, m: &[Elem]) -> Poly {
    let q = f.size() as u128;
    let mut h = rem(f, &x(), m);
    for _ in 0..j {
        h = powmod(f, &h, q, m);
    }
    h
}

/// Rabin's irreducibility test over the field `f`.
pub fn is_irreducible(f: &FieldDescriptor, a: &[Elem]) -> bool {
    let n = match degree(a) {
        None | Some(0) => return false,
        Some(n) => n as u32,
    };
    if n == 1 {
        return true;
    }
    let a = monic(f, a);
    if sub(f, &frobenius_x(f, n, &a), &x()).len() != 0 {
        return false;
    }
    for l in crate::arith::prime_factors(n as u64) {
        let h = sub(f, &frobenius_x(f, n / l as u32, &a), &x());
        if degree(&gcd(f, &a, &h)) != Some(0) {
            return false;
        }
    }
    true
}

/// Distinct irreducible factors grouped by degree: each entry is the
/// squarefree product of all monic irreducible factors of degree `i`.
/// Multiplicities are discarded.
pub fn distinct_factors_by_degree(f: &FieldDescriptor, a: &[Elem]) -> Vec<(Poly, usize)> {
    let mut r = monic(f, a);
    let mut out = Vec::new();
    let mut h = x();
    let q = f.size() as u128;
    let mut i = 0usize;
    while degree(&r).unwrap_or(0) > 0 {
        i += 1;
        h = powmod(f, &h, q, &r);
        let g = gcd(f, &r, &sub(f, &h, &x()));
        if degree(&g).unwrap_or(0) > 0 {
            loop {
                let c = gcd(f, &r, &g);
                if degree(&c).unwrap_or(0) == 0 {
                    break;
                }
                r = divrem(f, &r, &c).0;
            }
            h = rem(f, &h, &r);
            out.push((g, i));
        }
    }
    out
}

/// All roots lying in the field itself, ascending, without multiplicity.
pub fn roots_in_field(f: &FieldDescriptor, a: &[Elem]) -> Vec<Elem> {
    let d = match degree(a) {
        None => return f.elements().collect(),
        Some(0) => return Vec::new(),
        Some(d) => d,
    };
    if (f.size() as usize) <= 64.max(4 * d) {
        return f.elements().filter(|&x| eval(f, a, x) == 0).collect();
    }
    let q = f.size() as u128;
    let split = gcd(f, a, &sub(f, &powmod(f, &x(), q, a), &x()));
    let mut roots = Vec::new();
    split_linear(f, &split, &mut roots);
    roots.sort_unstable();
    roots
}

/// Equal-degree splitting of a squarefree product of linear factors.
fn split_linear(f: &FieldDescriptor, g: &[Elem], out: &mut Vec<Elem>) {
    match degree(g) {
        None | Some(0) => return,
        Some(1) => {
            out.push(f.neg(f.mul(g[0], f.inv(g[1]).unwrap())));
            return;
        }
        _ => {}
    }
    let q = f.size() as u128;
    for delta in 1..f.size() {
        let d = if f.characteristic() == 2 {
            // absolute trace of delta * x
            let mut t = rem(f, &[0, delta], g);
            let mut term = t.clone();
            for _ in 1..f.degree() {
                term = mulmod(f, &term, &term, g);
                t = add(f, &t, &term);
            }
            gcd(f, g, &t)
        } else {
            let s = powmod(f, &[delta, 1], (q - 1) / 2, g);
            gcd(f, g, &sub(f, &s, &[1]))
        };
        let dd = degree(&d).unwrap_or(0);
        if dd > 0 && dd < degree(g).unwrap() {
            let other = divrem(f, g, &d).0;
            split_linear(f, &d, out);
            split_linear(f, &other, out);
            return;
        }
    }
    // Field too small for random splitting; fall back to evaluation.
    out.extend(f.elements().filter(|&x| eval(f, g, x) == 0));
}
