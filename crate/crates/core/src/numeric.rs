//! Floating-point polynomial roots, used only for diagnostics.

use num_complex::Complex64;

fn horner(c: &[Complex64], z: Complex64) -> Complex64 {
    c.iter().rev().fold(Complex64::new(0.0, 0.0), |acc, &a| acc * z + a)
}

/// Complex roots of `sum c_i z^i` (low degree first) by Durand-Kerner.
/// Nearly coincident roots are replaced by their cluster mean, which is far
/// more accurate than the individual approximations of a multiple root.
pub fn roots(coeffs: &[Complex64]) -> Vec<Complex64> {
    let mut c: Vec<Complex64> = coeffs.to_vec();
    while c.last().map_or(false, |z| z.norm() == 0.0) {
        c.pop();
    }
    let n = c.len().saturating_sub(1);
    if n == 0 {
        return Vec::new();
    }
    let lead = c[n];
    let c: Vec<Complex64> = c.iter().map(|&a| a / lead).collect();
    let radius = 1.0 + c[..n].iter().map(|a| a.norm()).fold(0.0, f64::max);
    let seed = Complex64::new(0.4, 0.9);
    let mut z: Vec<Complex64> = (0..n).map(|k| seed.powu(k as u32) * (radius / 2.0)).collect();
    for _ in 0..10_000 {
        let mut delta: f64 = 0.0;
        for i in 0..n {
            let mut den = Complex64::new(1.0, 0.0);
            for j in 0..n {
                if i != j {
                    den *= z[i] - z[j];
                }
            }
            if den.norm() == 0.0 {
                den = Complex64::new(1e-12, 0.0);
            }
            let step = horner(&c, z[i]) / den;
            z[i] -= step;
            delta = delta.max(step.norm() / (1.0 + z[i].norm()));
        }
        if delta < 1e-15 {
            break;
        }
    }
    cluster(z, 1e-4)
}

fn cluster(z: Vec<Complex64>, tol: f64) -> Vec<Complex64> {
    let n = z.len();
    let mut group: Vec<usize> = (0..n).collect();
    for i in 0..n {
        for j in 0..i {
            if (z[i] - z[j]).norm() < tol * (1.0 + z[i].norm()) {
                group[i] = group[j];
                break;
            }
        }
    }
    (0..n)
        .map(|i| {
            let members: Vec<Complex64> = (0..n).filter(|&j| group[j] == group[i]).map(|j| z[j]).collect();
            members.iter().sum::<Complex64>() / members.len() as f64
        })
        .collect()
}

/// Roots of an integer polynomial.
pub fn integer_roots(coeffs: &[i128]) -> Vec<Complex64> {
    roots(&coeffs.iter().map(|&a| Complex64::new(a as f64, 0.0)).collect::<Vec<_>>())
}

/// Largest deviation of |root| from `target` over all roots.
pub fn modulus_deviation(roots: &[Complex64], target: f64) -> f64 {
    roots.iter().map(|r| (r.norm() - target).abs()).fold(0.0, f64::max)
}
