//! Small dense linear algebra: nullspaces over finite fields and Smith
//! normal form over the integers.

use crate::field::{Elem, FieldDescriptor};

/// Basis of `{x : A x = 0}` for a matrix given by rows of length `ncols`.
/// Basis vectors have a 1 in their free column and are returned in
/// increasing order of that column.
pub fn nullspace(k: &FieldDescriptor, mut rows: Vec<Vec<Elem>>, ncols: usize) -> Vec<Vec<Elem>> {
    let mut pivots: Vec<usize> = Vec::new();
    let mut r = 0;
    for c in 0..ncols {
        let Some(pr) = (r..rows.len()).find(|&i| rows[i][c] != 0) else { continue };
        rows.swap(r, pr);
        let inv = k.inv(rows[r][c]).unwrap();
        for x in rows[r].iter_mut() {
            *x = k.mul(*x, inv);
        }
        let pivot_row = rows[r].clone();
        for (i, row) in rows.iter_mut().enumerate() {
            if i != r && row[c] != 0 {
                let f = row[c];
                for (x, &p) in row.iter_mut().zip(&pivot_row).skip(c) {
                    *x = k.sub(*x, k.mul(f, p));
                }
            }
        }
        pivots.push(c);
        r += 1;
        if r == rows.len() {
            break;
        }
    }
    let mut basis = Vec::new();
    let mut pi = 0;
    for free in 0..ncols {
        if pi < pivots.len() && pivots[pi] == free {
            pi += 1;
            continue;
        }
        let mut v = vec![0; ncols];
        v[free] = 1;
        for (row, &pc) in pivots.iter().enumerate() {
            v[pc] = k.neg(rows[row][free]);
        }
        basis.push(v);
    }
    basis
}

/// Smith normal form `U A V = diag(s_1 | s_2 | ...)` with unimodular U, V.
pub struct Smith {
    pub diagonal: Vec<i128>,
    pub u: Vec<Vec<i128>>,
    pub v: Vec<Vec<i128>>,
}

fn identity(n: usize) -> Vec<Vec<i128>> {
    (0..n).map(|i| (0..n).map(|j| i128::from(i == j)).collect()).collect()
}

pub fn smith(mut a: Vec<Vec<i128>>) -> Smith {
    let m = a.len();
    let n = if m == 0 { 0 } else { a[0].len() };
    let mut u = identity(m);
    let mut v = identity(n);
    let add_row = |a: &mut Vec<Vec<i128>>, u: &mut Vec<Vec<i128>>, dst: usize, src: usize, f: i128| {
        for j in 0..a[0].len() {
            a[dst][j] -= f * a[src][j];
        }
        for j in 0..u[0].len() {
            u[dst][j] -= f * u[src][j];
        }
    };
    let add_col = |a: &mut Vec<Vec<i128>>, v: &mut Vec<Vec<i128>>, dst: usize, src: usize, f: i128| {
        for row in a.iter_mut() {
            row[dst] -= f * row[src];
        }
        for row in v.iter_mut() {
            row[dst] -= f * row[src];
        }
    };
    for t in 0..m.min(n) {
        loop {
            // smallest nonzero entry of the trailing block becomes the pivot
            let mut best: Option<(usize, usize)> = None;
            for i in t..m {
                for j in t..n {
                    if a[i][j] != 0 && best.map_or(true, |(bi, bj)| a[i][j].abs() < a[bi][bj].abs()) {
                        best = Some((i, j));
                    }
                }
            }
            let Some((bi, bj)) = best else {
                return finish(a, u, v);
            };
            a.swap(t, bi);
            u.swap(t, bi);
            for row in a.iter_mut() {
                row.swap(t, bj);
            }
            for row in v.iter_mut() {
                row.swap(t, bj);
            }
            let mut clean = true;
            for i in t + 1..m {
                let f = a[i][t] / a[t][t];
                add_row(&mut a, &mut u, i, t, f);
                clean &= a[i][t] == 0;
            }
            for j in t + 1..n {
                let f = a[t][j] / a[t][t];
                add_col(&mut a, &mut v, j, t, f);
                clean &= a[t][j] == 0;
            }
            if !clean {
                continue;
            }
            let bad = (t + 1..m).find(|&i| (t + 1..n).any(|j| a[i][j] % a[t][t] != 0));
            match bad {
                Some(i) => add_row(&mut a, &mut u, t, i, -1),
                None => break,
            }
        }
        if a[t][t] < 0 {
            for x in a[t].iter_mut() {
                *x = -*x;
            }
            for x in u[t].iter_mut() {
                *x = -*x;
            }
        }
    }
    finish(a, u, v)
}

fn finish(a: Vec<Vec<i128>>, u: Vec<Vec<i128>>, v: Vec<Vec<i128>>) -> Smith {
    let r = a.len().min(a.first().map_or(0, |row| row.len()));
    Smith { diagonal: (0..r).map(|i| a[i][i]).collect(), u, v }
}
