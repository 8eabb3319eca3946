use hcfl_core::characters::all_characters;
use hcfl_core::cyclotomic::{CyclotomicInteger, ExponentReducer};
use hcfl_core::field::make_field;
use hcfl_core::linalg::smith;
use proptest::prelude::*;

const FIELDS: [(u32, u32); 7] = [(2, 1), (2, 3), (2, 5), (3, 2), (3, 4), (5, 2), (7, 1)];

// Integer polynomials, low degree first.
fn poly_div_exact(mut num: Vec<i128>, den: &[i128]) -> Vec<i128> {
    let dd = den.len() - 1;
    let mut q = vec![0i128; num.len() - dd];
    for i in (0..q.len()).rev() {
        let c = num[i + dd] / den[dd];
        q[i] = c;
        for (j, &d) in den.iter().enumerate() {
            num[i + j] -= c * d;
        }
    }
    assert!(num.iter().all(|&c| c == 0));
    q
}

fn phi(n: u32) -> Vec<i128> {
    let mut num = vec![0i128; n as usize + 1];
    num[0] = -1;
    num[n as usize] = 1;
    for d in 1..n {
        if n % d == 0 {
            num = poly_div_exact(num, &phi(d));
        }
    }
    num
}

/// Multiplication by ζ on the power basis, as a matrix acting on columns.
fn companion(n: u32) -> Vec<Vec<i128>> {
    let p = phi(n);
    let m = p.len() - 1;
    let mut c = vec![vec![0i128; m]; m];
    for j in 0..m {
        if j + 1 < m {
            c[j + 1][j] = 1;
        } else {
            for (i, row) in c.iter_mut().enumerate() {
                row[j] = -p[i];
            }
        }
    }
    c
}

fn mat_vec(a: &[Vec<i128>], v: &[i128]) -> Vec<i128> {
    a.iter().map(|row| row.iter().zip(v).map(|(x, y)| x * y).sum()).collect()
}

/// Σ_k c_k ζ^k applied to v by Horner's rule in the companion matrix.
fn act(n: u32, c: &[i128], v: &[i128]) -> Vec<i128> {
    let z = companion(n);
    let mut acc = vec![0i128; v.len()];
    for &ck in c.iter().rev() {
        acc = mat_vec(&z, &acc);
        for (a, x) in acc.iter_mut().zip(v) {
            *a += ck * x;
        }
    }
    acc
}

fn unit(n: u32) -> Vec<i128> {
    let mut e = vec![0i128; phi(n).len() - 1];
    e[0] = 1;
    e
}

fn cyclo_pair() -> impl Strategy<Value = (u32, Vec<i128>, Vec<i128>)> {
    prop::sample::select(vec![1u32, 2, 3, 4, 5, 6, 8, 9, 12, 15]).prop_flat_map(|n| {
        let m = phi(n).len() - 1;
        (Just(n), prop::collection::vec(-20i128..20, m), prop::collection::vec(-20i128..20, m))
    })
}

proptest! {
    #[test]
    fn field_axioms(fi in 0..FIELDS.len(), a in any::<u32>(), b in any::<u32>(), c in any::<u32>()) {
        let (p, k) = FIELDS[fi];
        let f = make_field(p, k).unwrap();
        let (a, b, c) = (a % f.size(), b % f.size(), c % f.size());
        prop_assert_eq!(f.add(f.add(a, b), c), f.add(a, f.add(b, c)));
        prop_assert_eq!(f.mul(f.mul(a, b), c), f.mul(a, f.mul(b, c)));
        prop_assert_eq!(f.add(a, b), f.add(b, a));
        prop_assert_eq!(f.mul(a, b), f.mul(b, a));
        prop_assert_eq!(f.mul(a, f.add(b, c)), f.add(f.mul(a, b), f.mul(a, c)));
        prop_assert_eq!(f.add(a, f.neg(a)), 0);
        prop_assert_eq!(f.sub(f.add(a, b), b), a);
        prop_assert_eq!(f.mul(a, 1), a);
        match f.inv(a) {
            Some(i) => prop_assert_eq!(f.mul(a, i), 1),
            None => prop_assert_eq!(a, 0),
        }
    }

    #[test]
    fn frobenius_is_the_p_power_automorphism(fi in 0..FIELDS.len(), a in any::<u32>(), b in any::<u32>(), j in 0u32..6) {
        let (p, k) = FIELDS[fi];
        let f = make_field(p, k).unwrap();
        let (a, b) = (a % f.size(), b % f.size());
        let fr = |x| f.frobenius(x, j);
        prop_assert_eq!(fr(a), f.pow(a, (p as u128).pow(j)));
        prop_assert_eq!(fr(f.add(a, b)), f.add(fr(a), fr(b)));
        prop_assert_eq!(fr(f.mul(a, b)), f.mul(fr(a), fr(b)));
        prop_assert_eq!(f.frobenius(a, k), a);
        prop_assert_eq!(f.is_square(a), f.sqrt(a).is_some());
        if let Some(r) = f.sqrt(a) {
            prop_assert_eq!(f.mul(r, r), a);
        }
    }

    #[test]
    fn cyclotomic_product_matches_companion_matrix((n, a, b) in cyclo_pair()) {
        let x = CyclotomicInteger { order: n, coeffs: a.clone() };
        let y = CyclotomicInteger { order: n, coeffs: b.clone() };
        prop_assert_eq!(x.mul(&y).coeffs, act(n, &a, &b));
        prop_assert_eq!(x.mul(&y), y.mul(&x));
        prop_assert_eq!(x.add(&y).coeffs, a.iter().zip(&b).map(|(s, t)| s + t).collect::<Vec<_>>());
    }

    #[test]
    fn exponent_counts_reduce_like_powers_of_zeta(n in prop::sample::select(vec![1u32, 3, 4, 5, 6, 10, 12]), counts in prop::collection::vec(-9i128..9, 0..30)) {
        let direct = CyclotomicInteger::from_exponent_counts(n, &counts);
        prop_assert_eq!(&direct.coeffs, &act(n, &counts, &unit(n)));
        let mut folded = vec![0i128; n as usize];
        for (k, &c) in counts.iter().enumerate() {
            folded[k % n as usize] += c;
        }
        prop_assert_eq!(ExponentReducer::new(n).reduce(folded), direct);
    }

    #[test]
    fn galois_action_is_a_ring_automorphism((n, a, b) in cyclo_pair(), u in 1u64..40) {
        prop_assume!(hcfl_core::arith::gcd(u, n as u64) == 1);
        let x = CyclotomicInteger { order: n, coeffs: a };
        let y = CyclotomicInteger { order: n, coeffs: b };
        prop_assert_eq!(x.mul(&y).galois(u), x.galois(u).mul(&y.galois(u)));
        prop_assert_eq!(x.add(&y).galois(u), x.galois(u).add(&y.galois(u)));
        let m = 2 * n;
        prop_assert_eq!(x.mul(&y).lift(m), x.lift(m).mul(&y.lift(m)));
    }

    #[test]
    fn characters_are_homomorphisms(inv in prop::sample::select(vec![vec![7u64], vec![2, 4], vec![3, 6], vec![2, 2, 8]]), seed in any::<u64>()) {
        let chars = all_characters(&inv, 1000).unwrap();
        let chi = &chars[seed as usize % chars.len()];
        let psi = &chars[(seed / 7) as usize % chars.len()];
        let n = chi.modulus();
        let x: Vec<u64> = inv.iter().enumerate().map(|(i, &d)| (seed >> (8 * i)) % d).collect();
        let y: Vec<u64> = inv.iter().enumerate().map(|(i, &d)| (seed >> (8 * i + 4)) % d).collect();
        let s: Vec<u64> = x.iter().zip(&y).zip(&inv).map(|((a, b), d)| (a + b) % d).collect();
        prop_assert_eq!(chi.value_exponent(&s), (chi.value_exponent(&x) + chi.value_exponent(&y)) % n);
        // chi * psi is the character with summed exponents
        let prod_exps: Vec<u64> = chi.exponents.iter().zip(&psi.exponents).zip(&inv).map(|((a, b), d)| (a + b) % d).collect();
        let prod = chars.iter().find(|c| c.exponents == prod_exps).unwrap();
        prop_assert_eq!(prod.value_exponent(&x), (chi.value_exponent(&x) + psi.value_exponent(&x)) % n);
        prop_assert_eq!(chi.power(chi.order()).is_trivial(), true);
    }

    #[test]
    fn smith_form_is_a_divisibility_chain(rows in prop::collection::vec(prop::collection::vec(-12i128..12, 3), 1..5)) {
        let s = smith(rows.clone());
        let (m, n) = (rows.len(), 3);
        for i in 0..m {
            for j in 0..n {
                let mut v = 0i128;
                for k in 0..m {
                    for l in 0..n {
                        v += s.u[i][k] * rows[k][l] * s.v[l][j];
                    }
                }
                let want = if i == j { s.diagonal.get(i).copied().unwrap_or(0) } else { 0 };
                prop_assert_eq!(v, want, "entry ({}, {})", i, j);
            }
        }
        let d = &s.diagonal;
        prop_assert!(d.iter().all(|&x| x >= 0));
        for w in d.windows(2) {
            prop_assert!(w[1] == 0 || (w[0] != 0 && w[1] % w[0] == 0), "{:?}", d);
        }
    }
}

#[test]
fn character_orthogonality() {
    for inv in [vec![6u64], vec![2, 6], vec![2, 2, 4]] {
        let chars = all_characters(&inv, 1000).unwrap();
        let n = chars[0].modulus() as u32;
        let elems: Vec<Vec<u64>> = chars.iter().map(|c| c.exponents.clone()).collect();
        for a in &chars {
            for b in &chars {
                let mut counts = vec![0i128; n as usize];
                for x in &elems {
                    let k = (a.value_exponent(x) + n as u64 - b.value_exponent(x)) % n as u64;
                    counts[k as usize] += 1;
                }
                let s = CyclotomicInteger::from_exponent_counts(n, &counts);
                let want = if a == b { elems.len() as i128 } else { 0 };
                assert_eq!(s.as_integer(), Some(want), "{:?} {:?}", a.exponents, b.exponents);
            }
        }
    }
}
