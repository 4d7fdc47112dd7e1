//! Smith normal form of polynomial matrices over an exact field.

use super::poly::Poly;
use crate::scalar::ExactField;

/// Nonzero invariant factors `d₁ | d₂ | … | d_ρ` (monic), where `ρ` is the
/// rank of the matrix over the fraction field.
pub fn invariant_factors<F: ExactField>(mut a: Vec<Vec<Poly<F>>>) -> Vec<Poly<F>> {
    let rows = a.len();
    let cols = if rows == 0 { 0 } else { a[0].len() };
    let mut diag = Vec::new();
    for k in 0..rows.min(cols) {
        loop {
            let Some((pi, pj)) = min_degree_entry(&a, k) else {
                return diag;
            };
            a.swap(k, pi);
            for row in a.iter_mut() {
                row.swap(k, pj);
            }
            let mut dirty = false;
            for i in k + 1..rows {
                if a[i][k].is_zero() {
                    continue;
                }
                let (q, r) = a[i][k].div_rem(&a[k][k]);
                for j in k..cols {
                    let t = q.mul(&a[k][j]);
                    a[i][j] = a[i][j].sub(&t);
                }
                dirty |= !r.is_zero();
            }
            for j in k + 1..cols {
                if a[k][j].is_zero() {
                    continue;
                }
                let (q, r) = a[k][j].div_rem(&a[k][k]);
                for row in a.iter_mut().skip(k) {
                    let t = q.mul(&row[k]);
                    row[j] = row[j].sub(&t);
                }
                dirty |= !r.is_zero();
            }
            if dirty {
                continue;
            }
            // row and column k are clear; enforce divisibility of the rest
            let bad = (k + 1..rows).find(|&i| (k + 1..cols).any(|j| !a[k][k].divides(&a[i][j])));
            match bad {
                Some(i) => {
                    for j in k..cols {
                        let v = a[i][j].clone();
                        a[k][j] = a[k][j].add(&v);
                    }
                }
                None => break,
            }
        }
        diag.push(a[k][k].monic());
    }
    diag
}

fn min_degree_entry<F: ExactField>(a: &[Vec<Poly<F>>], k: usize) -> Option<(usize, usize)> {
    let mut best: Option<(usize, usize, usize)> = None;
    for (i, row) in a.iter().enumerate().skip(k) {
        for (j, p) in row.iter().enumerate().skip(k) {
            if let Some(d) = p.degree() {
                if best.map_or(true, |(bd, _, _)| d < bd) {
                    best = Some((d, i, j));
                }
            }
        }
    }
    best.map(|(_, i, j)| (i, j))
}
