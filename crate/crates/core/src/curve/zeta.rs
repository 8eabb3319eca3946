//! Zeta numerators from point counts.

use super::CurveModel;
use crate::error::{Error, Result};
use crate::numeric;

/// Newton's identities: P(T) = sum a_k T^k = prod (1 - alpha_i T) from the
/// power sums `s[k-1] = sum alpha_i^k`, k = 1..=len.
pub fn coefficients_from_power_sums(s: &[i128]) -> Result<Vec<i128>> {
    // e_k elementary symmetric, a_k = (-1)^k e_k
    let mut e = vec![1i128];
    for k in 1..=s.len() {
        let mut acc = 0i128;
        for i in 1..=k {
            let term = e[k - i].checked_mul(s[i - 1]).ok_or_else(overflow)?;
            acc = if i % 2 == 1 { acc.checked_add(term) } else { acc.checked_sub(term) }.ok_or_else(overflow)?;
        }
        if acc % k as i128 != 0 {
            return Err(Error::Inconsistent("power sums do not come from an integer polynomial".into()));
        }
        e.push(acc / k as i128);
    }
    Ok(e.iter().enumerate().map(|(k, &v)| if k % 2 == 0 { v } else { -v }).collect())
}

/// Power sums S_1..S_m of the inverse roots of P(T) = sum a_k T^k with a_0 = 1.
pub fn power_sums(p: &[i128], m: usize) -> Result<Vec<i128>> {
    let a = |j: usize| *p.get(j).unwrap_or(&0);
    let mut s: Vec<i128> = Vec::with_capacity(m);
    for j in 1..=m {
        let mut v = (j as i128).checked_mul(a(j)).ok_or_else(overflow)?;
        for i in 1..j {
            v = v.checked_add(a(i).checked_mul(s[j - i - 1]).ok_or_else(overflow)?).ok_or_else(overflow)?;
        }
        s.push(-v);
    }
    Ok(s)
}

fn overflow() -> Error {
    Error::CapExceeded { what: "integer size", value: i128::MAX as u128, cap: i128::MAX as u128 }
}

#[cfg(test)]
/// P(1) as an exact integer.
pub(crate) fn eval_at_one(p: &[i128]) -> i128 {
    p.iter().sum()
}

/// det(I - M^n) for the companion matrix M of T^deg P(1/T), by Bareiss elimination.
pub fn det_one_minus_power(p: &[i128], n: u32) -> Result<i128> {
    let d = p.len() - 1;
    if d == 0 {
        return Ok(1);
    }
    // monic reverse polynomial T^d + a_1 T^(d-1) + ... + a_d
    let mut m = vec![vec![0i128; d]; d];
    for i in 1..d {
        m[i][i - 1] = 1;
    }
    for i in 0..d {
        m[i][d - 1] = -p[d - i];
    }
    let mul = |a: &Vec<Vec<i128>>, b: &Vec<Vec<i128>>| -> Result<Vec<Vec<i128>>> {
        let mut c = vec![vec![0i128; d]; d];
        for i in 0..d {
            for k in 0..d {
                if a[i][k] == 0 {
                    continue;
                }
                for j in 0..d {
                    let t = a[i][k].checked_mul(b[k][j]).ok_or_else(overflow)?;
                    c[i][j] = c[i][j].checked_add(t).ok_or_else(overflow)?;
                }
            }
        }
        Ok(c)
    };
    let mut pw = m.clone();
    for _ in 1..n {
        pw = mul(&pw, &m)?;
    }
    let mut a: Vec<Vec<i128>> = (0..d).map(|i| (0..d).map(|j| i128::from(i == j) - pw[i][j]).collect()).collect();
    bareiss(&mut a)
}

/// Determinant of an integer matrix (fraction-free elimination, destroys input).
pub fn bareiss(a: &mut [Vec<i128>]) -> Result<i128> {
    let n = a.len();
    let mut sign = 1i128;
    let mut prev = 1i128;
    for k in 0..n {
        if a[k][k] == 0 {
            match (k + 1..n).find(|&r| a[r][k] != 0) {
                Some(r) => {
                    a.swap(k, r);
                    sign = -sign;
                }
                None => return Ok(0),
            }
        }
        for i in k + 1..n {
            for j in k + 1..n {
                let v = a[i][j]
                    .checked_mul(a[k][k])
                    .and_then(|x| a[i][k].checked_mul(a[k][j]).and_then(|y| x.checked_sub(y)))
                    .ok_or_else(overflow)?;
                a[i][j] = v / prev;
            }
            a[i][k] = 0;
        }
        prev = a[k][k];
    }
    Ok(sign * a[n - 1][n - 1])
}

impl CurveModel {
    /// P(T) of degree 2g with P(0) = 1 and leading coefficient q^g.
    pub fn zeta_numerator(&self) -> Result<Vec<i128>> {
        if let Some(z) = self.caches.zeta.get() {
            return Ok(z.clone());
        }
        let g = self.genus as usize;
        let q = self.q() as i128;
        let mut s = Vec::with_capacity(g);
        for m in 1..=g as u32 {
            s.push(q.pow(m) + 1 - self.point_count(m)? as i128);
        }
        let low = coefficients_from_power_sums(&s)?;
        let mut p = vec![0i128; 2 * g + 1];
        p[..=g].copy_from_slice(&low);
        for k in 0..g {
            p[2 * g - k] = q.pow((g - k) as u32) * p[k];
        }
        Ok(self.caches.zeta.get_or_init(|| p).clone())
    }

    /// Zeta numerator of `C ⊗ F_{q^n}`.
    pub fn level_zeta_numerator(&self, n: u32) -> Result<Vec<i128>> {
        level_numerator(&self.zeta_numerator()?, n)
    }

    /// #C(F_{q^m}) predicted by the zeta numerator.
    pub fn count_from_zeta(&self, m: u32) -> Result<i128> {
        let s = power_sums(&self.zeta_numerator()?, m as usize)?;
        Ok((self.q() as i128).pow(m) + 1 - s[m as usize - 1])
    }

    /// |J(F_{q^n})| = det(I - M^n).
    pub fn jacobian_order(&self, n: u32) -> Result<u64> {
        let d = det_one_minus_power(&self.zeta_numerator()?, n)?;
        u64::try_from(d).map_err(|_| Error::Inconsistent(format!("non-positive Jacobian order {d}")))
    }

    /// Largest deviation of |root of P| from q^(-1/2).
    pub fn weil_deviation(&self) -> Result<f64> {
        let r = numeric::integer_roots(&self.zeta_numerator()?);
        Ok(numeric::modulus_deviation(&r, (self.q() as f64).powf(-0.5)))
    }
}

/// Given P for C, returns P_n for C ⊗ F_{q^n} (built from S_{kn}).
pub fn level_numerator(p: &[i128], n: u32) -> Result<Vec<i128>> {
    let d = p.len() - 1;
    let s = power_sums(p, d * n as usize)?;
    let sn: Vec<i128> = (1..=d).map(|k| s[k * n as usize - 1]).collect();
    coefficients_from_power_sums(&sn)
}
