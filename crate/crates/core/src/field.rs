//! Exact arithmetic in F_{p^k}.
//!
//! Elements are stored as their index `c_0 + c_1 p + ... + c_{k-1} p^{k-1}`
//! where `(c_i)` are the power-basis coordinates modulo the field's
//! irreducible polynomial. Index order is the enumeration order, so 0 and 1
//! come first. Multiplication goes through discrete-log tables.
//!
//! Canonical fields are interned: `make_field(p, k)` always returns the same
//! descriptor, whose modulus is the lexicographically least (low-degree
//! coefficient first) monic irreducible of degree k.

use std::collections::HashMap;
use std::fmt;
use std::sync::atomic::{AtomicU64, Ordering};
use std::sync::{Arc, Mutex, OnceLock};

use crate::arith;
use crate::error::{Error, Result};
use crate::poly;

/// Element index inside a field.
pub type Elem = u32;

/// Default cap on field size (3^12).
pub const DEFAULT_FIELD_CAP: u64 = 531_441;

static FIELD_CAP: AtomicU64 = AtomicU64::new(DEFAULT_FIELD_CAP);

pub fn field_size_cap() -> u64 {
    FIELD_CAP.load(Ordering::Relaxed)
}

pub fn set_field_size_cap(cap: u64) {
    FIELD_CAP.store(cap, Ordering::Relaxed);
}

pub struct FieldDescriptor {
    p: u32,
    k: u32,
    size: u32,
    modulus: Vec<u32>,
    pow_p: Vec<u32>,
    exp: Vec<u32>,
    log: Vec<u32>,
}

impl fmt::Debug for FieldDescriptor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "F_{}^{}{:?}", self.p, self.k, self.modulus)
    }
}

impl PartialEq for FieldDescriptor {
    fn eq(&self, other: &Self) -> bool {
        self.p == other.p && self.k == other.k && self.modulus == other.modulus
    }
}

impl Eq for FieldDescriptor {}

fn registry() -> &'static Mutex<HashMap<(u32, u32), Arc<FieldDescriptor>>> {
    static REG: OnceLock<Mutex<HashMap<(u32, u32), Arc<FieldDescriptor>>>> = OnceLock::new();
    REG.get_or_init(|| Mutex::new(HashMap::new()))
}

/// The canonical field F_{p^k}.
pub fn make_field(p: u32, k: u32) -> Result<Arc<FieldDescriptor>> {
    if !arith::is_prime(p as u64) {
        return Err(Error::NotPrime(p as u64));
    }
    if k < 1 {
        return Err(Error::BadDegree(k));
    }
    let size = arith::checked_pow(p as u64, k).unwrap_or(u64::MAX);
    if size > field_size_cap() {
        return Err(Error::CapExceeded { what: "field size", value: size as u128, cap: field_size_cap() as u128 });
    }
    if let Some(f) = registry().lock().unwrap().get(&(p, k)) {
        return Ok(f.clone());
    }
    let modulus = if k == 1 { vec![0, 1] } else { least_irreducible(p, k)? };
    let f = Arc::new(FieldDescriptor::build(p, modulus)?);
    let mut reg = registry().lock().unwrap();
    Ok(reg.entry((p, k)).or_insert(f).clone())
}

/// A field with a caller-chosen modulus. Not interned; used to ingest
/// coefficients written in a non-canonical basis.
pub fn field_with_modulus(p: u32, modulus: &[u32]) -> Result<FieldDescriptor> {
    if !arith::is_prime(p as u64) {
        return Err(Error::NotPrime(p as u64));
    }
    if modulus.len() < 2 || *modulus.last().unwrap() != 1 || modulus.iter().any(|&c| c >= p) {
        return Err(Error::InvalidModulus(format!("{modulus:?} is not a reduced monic polynomial")));
    }
    let k = (modulus.len() - 1) as u32;
    let size = arith::checked_pow(p as u64, k).unwrap_or(u64::MAX);
    if size > field_size_cap() {
        return Err(Error::CapExceeded { what: "field size", value: size as u128, cap: field_size_cap() as u128 });
    }
    if k == 1 {
        if modulus != [0, 1] {
            return Err(Error::InvalidModulus("degree-1 modulus must be x".into()));
        }
    } else {
        let fp = make_field(p, 1)?;
        if !poly::is_irreducible(&fp, modulus) {
            return Err(Error::InvalidModulus(format!("{modulus:?} is reducible over F_{p}")));
        }
    }
    FieldDescriptor::build(p, modulus.to_vec())
}

/// The canonical field isomorphic to F_p[x]/(modulus) and the image of each
/// element of the latter, indexed by its encoding. The least root of the
/// modulus in the canonical field is used as the image of x.
pub fn canonical_image(p: u32, modulus: &[u32]) -> Result<(Arc<FieldDescriptor>, Vec<Elem>)> {
    let src = field_with_modulus(p, modulus)?;
    let dst = make_field(p, src.degree())?;
    if src.modulus() == dst.modulus() {
        return Ok((dst.clone(), dst.elements().collect()));
    }
    let root = *poly::roots_in_field(&dst, modulus).first().ok_or_else(|| Error::Inconsistent("modulus has no root".into()))?;
    let powers: Vec<Elem> = (0..src.degree()).map(|i| dst.pow(root, i as u128)).collect();
    let image = src
        .elements()
        .map(|a| src.coords(a).iter().zip(&powers).fold(0, |acc, (&c, &pw)| dst.add(acc, dst.mul(dst.from_int(c as i64), pw))))
        .collect();
    Ok((dst, image))
}

fn least_irreducible(p: u32, k: u32) -> Result<Vec<u32>> {
    let fp = make_field(p, 1)?;
    // c_0 is the most significant digit of the search counter.
    let total = (p as u64).pow(k);
    for counter in 0..total {
        let mut m = vec![0u32; k as usize + 1];
        m[k as usize] = 1;
        let mut c = counter;
        for i in (0..k as usize).rev() {
            m[i] = (c % p as u64) as u32;
            c /= p as u64;
        }
        if m[0] == 0 {
            continue;
        }
        if poly::is_irreducible(&fp, &m) {
            return Ok(m);
        }
    }
    Err(Error::InvalidModulus(format!("no irreducible of degree {k} over F_{p}")))
}

impl FieldDescriptor {
    fn build(p: u32, modulus: Vec<u32>) -> Result<Self> {
        let k = (modulus.len() - 1) as u32;
        let size = p.pow(k);
        let pow_p: Vec<u32> = (0..=k).map(|i| p.pow(i)).collect();
        let mut f = FieldDescriptor { p, k, size, modulus, pow_p, exp: Vec::new(), log: Vec::new() };
        let order = (size - 1) as u64;
        let factors = arith::prime_factors(order);
        let gen = (1..size)
            .find(|&g| factors.iter().all(|&l| f.slow_pow(g, order / l) != 1))
            .ok_or_else(|| Error::InvalidModulus("no primitive element".into()))?;
        let mut exp = Vec::with_capacity(order as usize);
        let mut log = vec![0u32; size as usize];
        let mut cur = 1u32;
        for i in 0..order as u32 {
            exp.push(cur);
            log[cur as usize] = i;
            cur = f.slow_mul(cur, gen);
        }
        if cur != 1 || (order > 0 && exp.iter().skip(1).any(|&e| e == 1)) {
            return Err(Error::InvalidModulus("modulus is not irreducible".into()));
        }
        f.exp = exp;
        f.log = log;
        Ok(f)
    }

    fn slow_mul(&self, a: Elem, b: Elem) -> Elem {
        let k = self.k as usize;
        let (ca, cb) = (self.coords(a), self.coords(b));
        let p = self.p as u64;
        let mut prod = vec![0u64; 2 * k - 1];
        for i in 0..k {
            for j in 0..k {
                prod[i + j] = (prod[i + j] + ca[i] as u64 * cb[j] as u64) % p;
            }
        }
        for d in (k..2 * k - 1).rev() {
            let c = prod[d];
            if c != 0 {
                for i in 0..k {
                    let sub = c * self.modulus[i] as u64 % p;
                    prod[d - k + i] = (prod[d - k + i] + p - sub) % p;
                }
                prod[d] = 0;
            }
        }
        let coords: Vec<u32> = prod[..k].iter().map(|&c| c as u32).collect();
        self.from_coords(&coords)
    }

    fn slow_pow(&self, a: Elem, mut e: u64) -> Elem {
        let (mut base, mut acc) = (a, 1);
        while e > 0 {
            if e & 1 == 1 {
                acc = self.slow_mul(acc, base);
            }
            base = self.slow_mul(base, base);
            e >>= 1;
        }
        acc
    }

    pub fn characteristic(&self) -> u32 {
        self.p
    }

    /// Degree over the prime field.
    pub fn degree(&self) -> u32 {
        self.k
    }

    pub fn size(&self) -> u32 {
        self.size
    }

    pub fn modulus(&self) -> &[u32] {
        &self.modulus
    }

    pub fn coords(&self, a: Elem) -> Vec<u32> {
        let mut a = a;
        (0..self.k)
            .map(|_| {
                let c = a % self.p;
                a /= self.p;
                c
            })
            .collect()
    }

    pub fn from_coords(&self, coords: &[u32]) -> Elem {
        coords.iter().enumerate().map(|(i, &c)| (c % self.p) * self.pow_p[i]).sum()
    }

    /// Image of an integer in the prime field.
    pub fn from_int(&self, c: i64) -> Elem {
        c.rem_euclid(self.p as i64) as Elem
    }

    /// Generator of the power basis (the class of x).
    pub fn generator(&self) -> Elem {
        if self.k == 1 {
            // x = 0 mod x; the "generator" of a prime field is 1.
            1
        } else {
            self.p
        }
    }

    #[inline]
    pub fn add(&self, a: Elem, b: Elem) -> Elem {
        if self.p == 2 {
            return a ^ b;
        }
        if self.k == 1 {
            let s = a + b;
            return if s >= self.p { s - self.p } else { s };
        }
        let (mut a, mut b) = (a, b);
        let mut out = 0;
        for i in 0..self.k as usize {
            let s = (a % self.p + b % self.p) % self.p;
            out += s * self.pow_p[i];
            a /= self.p;
            b /= self.p;
        }
        out
    }

    #[inline]
    pub fn neg(&self, a: Elem) -> Elem {
        if self.p == 2 {
            return a;
        }
        if self.k == 1 {
            return if a == 0 { 0 } else { self.p - a };
        }
        let mut a = a;
        let mut out = 0;
        for i in 0..self.k as usize {
            let c = a % self.p;
            if c != 0 {
                out += (self.p - c) * self.pow_p[i];
            }
            a /= self.p;
        }
        out
    }

    #[inline]
    pub fn sub(&self, a: Elem, b: Elem) -> Elem {
        self.add(a, self.neg(b))
    }

    #[inline]
    pub fn mul(&self, a: Elem, b: Elem) -> Elem {
        if a == 0 || b == 0 {
            return 0;
        }
        let order = self.size - 1;
        let s = self.log[a as usize] + self.log[b as usize];
        self.exp[(if s >= order { s - order } else { s }) as usize]
    }

    /// Multiplicative inverse; `None` for zero.
    #[inline]
    pub fn inv(&self, a: Elem) -> Option<Elem> {
        if a == 0 {
            return None;
        }
        let order = self.size - 1;
        let l = self.log[a as usize];
        Some(self.exp[(if l == 0 { 0 } else { order - l }) as usize])
    }

    pub fn pow(&self, a: Elem, e: u128) -> Elem {
        if e == 0 {
            return 1;
        }
        if a == 0 {
            return 0;
        }
        let order = (self.size - 1) as u128;
        let l = self.log[a as usize] as u128 * (e % order) % order;
        self.exp[l as usize]
    }

    /// a^(p^j).
    pub fn frobenius(&self, a: Elem, j: u32) -> Elem {
        let j = j % self.k;
        if a == 0 || j == 0 {
            return a;
        }
        let order = (self.size - 1) as u64;
        let l = self.log[a as usize] as u64 * (self.p as u64).pow(j) % order;
        self.exp[l as usize]
    }

    pub fn is_square(&self, a: Elem) -> bool {
        a == 0 || self.p == 2 || self.log[a as usize] % 2 == 0
    }

    /// Some square root when one exists (odd characteristic uses the log table).
    pub fn sqrt(&self, a: Elem) -> Option<Elem> {
        if a == 0 {
            return Some(0);
        }
        if self.p == 2 {
            // squaring is a bijection; invert it through the log table
            let order = self.size - 1;
            let l = self.log[a as usize];
            let half = if l % 2 == 0 { l / 2 } else { (l + order) / 2 };
            return Some(self.exp[half as usize]);
        }
        let l = self.log[a as usize];
        if l % 2 == 1 {
            None
        } else {
            Some(self.exp[(l / 2) as usize])
        }
    }

    /// Discrete log relative to the table's primitive element.
    pub fn log(&self, a: Elem) -> Option<u32> {
        (a != 0).then(|| self.log[a as usize])
    }

    pub fn elements(&self) -> impl Iterator<Item = Elem> {
        0..self.size
    }

    /// Smallest j in 1..=k with a^(p^j) = a, i.e. the degree of a over F_p.
    pub fn element_degree(&self, a: Elem) -> u32 {
        (1..=self.k).find(|&j| self.k % j == 0 && self.frobenius(a, j) == a).unwrap_or(self.k)
    }
}

/// Public value type pairing an index with its field.
#[derive(Clone, PartialEq, Eq)]
pub struct FieldElement {
    field: Arc<FieldDescriptor>,
    value: Elem,
}

impl fmt::Debug for FieldElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?}", self.field.coords(self.value))
    }
}

impl FieldElement {
    pub fn new(field: &Arc<FieldDescriptor>, value: Elem) -> Self {
        assert!(value < field.size, "element index out of range");
        FieldElement { field: field.clone(), value }
    }

    pub fn from_coords(field: &Arc<FieldDescriptor>, coords: &[u32]) -> Result<Self> {
        if coords.len() != field.k as usize || coords.iter().any(|&c| c >= field.p) {
            return Err(Error::Parse(format!("coordinates {coords:?} do not describe an element of {field:?}")));
        }
        Ok(Self::new(field, field.from_coords(coords)))
    }

    pub fn field(&self) -> &Arc<FieldDescriptor> {
        &self.field
    }

    pub fn value(&self) -> Elem {
        self.value
    }

    pub fn coords(&self) -> Vec<u32> {
        self.field.coords(self.value)
    }

    fn same(&self, other: &Self) -> Result<()> {
        if Arc::ptr_eq(&self.field, &other.field) || *self.field == *other.field {
            Ok(())
        } else {
            Err(Error::MixedFields)
        }
    }

    pub fn add(&self, o: &Self) -> Result<Self> {
        self.same(o)?;
        Ok(Self::new(&self.field, self.field.add(self.value, o.value)))
    }

    pub fn sub(&self, o: &Self) -> Result<Self> {
        self.same(o)?;
        Ok(Self::new(&self.field, self.field.sub(self.value, o.value)))
    }

    pub fn mul(&self, o: &Self) -> Result<Self> {
        self.same(o)?;
        Ok(Self::new(&self.field, self.field.mul(self.value, o.value)))
    }

    pub fn inv(&self) -> Result<Self> {
        let v = self.field.inv(self.value).ok_or(Error::DivisionByZero)?;
        Ok(Self::new(&self.field, v))
    }

    pub fn pow(&self, e: u128) -> Self {
        Self::new(&self.field, self.field.pow(self.value, e))
    }

    /// e^(q^m) where q is a power of the characteristic dividing the field size.
    pub fn frobenius_power(&self, q: u64, m: u32) -> Result<Self> {
        let p = self.field.p as u64;
        let mut j = 0u32;
        let mut t = 1u64;
        while t < q {
            t *= p;
            j += 1;
        }
        if t != q || q < p {
            return Err(Error::Precondition(format!("{q} is not a power of {p}")));
        }
        if self.field.k % j != 0 {
            return Err(Error::Precondition(format!("F_{q} is not a subfield of {:?}", self.field)));
        }
        let total = (j as u64 * m as u64 % self.field.k as u64) as u32;
        Ok(Self::new(&self.field, self.field.frobenius(self.value, total)))
    }

    pub fn embed(&self, target: &Arc<FieldDescriptor>) -> Result<Self> {
        let e = embedding(&self.field, target)?;
        Ok(Self::new(target, e.apply(self.value)))
    }
}

/// All elements in enumeration order.
pub fn enumerate_elements(field: &Arc<FieldDescriptor>) -> Vec<FieldElement> {
    field.elements().map(|a| FieldElement::new(field, a)).collect()
}

/// A fixed ring embedding F_{p^s} -> F_{p^t}.
pub struct Embedding {
    src: Arc<FieldDescriptor>,
    dst: Arc<FieldDescriptor>,
    image: Vec<Elem>,
    inverse: HashMap<Elem, Elem>,
}

impl fmt::Debug for Embedding {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Embedding({:?} -> {:?})", self.src, self.dst)
    }
}

impl Embedding {
    fn from_root(src: &Arc<FieldDescriptor>, dst: &Arc<FieldDescriptor>, root: Elem) -> Self {
        let k = src.k as usize;
        let mut powers = vec![1u32; k];
        for i in 1..k {
            powers[i] = dst.mul(powers[i - 1], root);
        }
        let image: Vec<Elem> = src
            .elements()
            .map(|a| {
                src.coords(a).iter().zip(&powers).fold(0, |acc, (&c, &pw)| dst.add(acc, dst.mul(dst.from_int(c as i64), pw)))
            })
            .collect();
        let inverse = image.iter().enumerate().map(|(i, &b)| (b, i as Elem)).collect();
        Embedding { src: src.clone(), dst: dst.clone(), image, inverse }
    }

    #[inline]
    pub fn apply(&self, a: Elem) -> Elem {
        self.image[a as usize]
    }

    /// The source element mapping to `b`, if `b` lies in the image.
    pub fn preimage(&self, b: Elem) -> Option<Elem> {
        self.inverse.get(&b).copied()
    }

    pub fn source(&self) -> &Arc<FieldDescriptor> {
        &self.src
    }

    pub fn target(&self) -> &Arc<FieldDescriptor> {
        &self.dst
    }

    /// Image of the power-basis generator.
    pub fn generator_image(&self) -> Elem {
        self.apply(self.src.generator())
    }
}

fn embedding_cache() -> &'static Mutex<HashMap<(u32, u32, u32), Arc<Embedding>>> {
    static CACHE: OnceLock<Mutex<HashMap<(u32, u32, u32), Arc<Embedding>>>> = OnceLock::new();
    CACHE.get_or_init(|| Mutex::new(HashMap::new()))
}

/// The embedding between canonical fields. Embeddings form a compatible
/// system: for s | r | t the composite F_{p^s} -> F_{p^r} -> F_{p^t} equals
/// the direct map. Each one is the least-index root of the source modulus
/// that is compatible with the embeddings of all maximal proper subfields.
pub fn embedding(src: &Arc<FieldDescriptor>, dst: &Arc<FieldDescriptor>) -> Result<Arc<Embedding>> {
    let (p, s, t) = (src.p, src.k, dst.k);
    if src.p != dst.p || t % s != 0 {
        return Err(Error::NotSubfield { p, src: s, dst: t });
    }
    let canonical_src = make_field(p, s)?;
    let canonical_dst = make_field(p, t)?;
    if *canonical_src != **src || *canonical_dst != **dst {
        return Err(Error::Precondition("embeddings are defined between canonical fields only".into()));
    }
    if let Some(e) = embedding_cache().lock().unwrap().get(&(p, s, t)) {
        return Ok(e.clone());
    }
    let emb = if s == 1 {
        Embedding::from_root(src, dst, 1)
    } else {
        let roots = poly::roots_in_field(dst, &src.modulus.clone());
        let mut chosen = None;
        'roots: for &r in &roots {
            for l in arith::prime_factors(s as u64) {
                let sub_k = s / l as u32;
                if sub_k == 1 {
                    continue;
                }
                let sub = make_field(p, sub_k)?;
                let sub_to_src = embedding(&sub, src)?;
                let sub_to_dst = embedding(&sub, dst)?;
                let z = sub_to_src.generator_image();
                let candidate = Embedding::from_root(src, dst, r);
                if candidate.apply(z) != sub_to_dst.generator_image() {
                    continue 'roots;
                }
            }
            chosen = Some(r);
            break;
        }
        let r = chosen.ok_or_else(|| Error::Inconsistent(format!("no compatible embedding F_{p}^{s} -> F_{p}^{t}")))?;
        Embedding::from_root(src, dst, r)
    };
    let emb = Arc::new(emb);
    let mut cache = embedding_cache().lock().unwrap();
    Ok(cache.entry((p, s, t)).or_insert(emb).clone())
}
