//! Exact Gaussian elimination over a [`Field`].

use crate::field::Field;

/// Reduced row echelon form with pivots chosen left to right. Zero rows are
/// dropped; returns the nonzero rows and their pivot columns.
pub fn rref<F: Field>(f: &F, rows: &[Vec<F::Elem>]) -> (Vec<Vec<F::Elem>>, Vec<usize>) {
    let mut m: Vec<Vec<F::Elem>> = rows.to_vec();
    let ncols = m.first().map_or(0, Vec::len);
    let mut pivots = Vec::new();
    let mut r = 0;
    for col in 0..ncols {
        let Some(p) = (r..m.len()).find(|&i| !f.is_zero(&m[i][col])) else {
            continue;
        };
        m.swap(r, p);
        let inv = f.inv(&m[r][col]).expect("pivot is nonzero");
        m[r] = m[r].iter().map(|x| f.mul(x, &inv)).collect();
        for i in 0..m.len() {
            if i != r && !f.is_zero(&m[i][col]) {
                let factor = m[i][col].clone();
                m[i] = m[i]
                    .iter()
                    .zip(&m[r])
                    .map(|(x, y)| f.sub(x, &f.mul(&factor, y)))
                    .collect();
            }
        }
        pivots.push(col);
        r += 1;
        if r == m.len() {
            break;
        }
    }
    m.truncate(r);
    (m, pivots)
}

pub fn rank<F: Field>(f: &F, rows: &[Vec<F::Elem>]) -> usize {
    rref(f, rows).1.len()
}

/// Basis of {x : M x = 0}, one vector per free column, each with a 1 in its
/// free column.
pub fn kernel<F: Field>(f: &F, rows: &[Vec<F::Elem>], ncols: usize) -> Vec<Vec<F::Elem>> {
    let (r, pivots) = rref(f, rows);
    (0..ncols)
        .filter(|c| !pivots.contains(c))
        .map(|free| {
            let mut v = vec![f.zero(); ncols];
            v[free] = f.one();
            for (row, &p) in r.iter().zip(&pivots) {
                v[p] = f.neg(&row[free]);
            }
            v
        })
        .collect()
}

/// Canonical basis of the span of `vectors`: its reduced echelon form.
pub fn span_basis<F: Field>(f: &F, vectors: &[Vec<F::Elem>]) -> Vec<Vec<F::Elem>> {
    rref(f, vectors).0
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::{FieldSpec, FiniteField, Rationals};

    #[test]
    fn kernel_over_gf7() {
        let f = FiniteField::new(FieldSpec::prime(7).unwrap());
        // b = 0, 2a - d = 0
        let rows = vec![vec![0, 1, 0, 0], vec![2, 0, 0, 6]];
        let k = kernel(&f, &rows, 4);
        assert_eq!(k.len(), 2);
        for v in &k {
            for row in &rows {
                let dot = row
                    .iter()
                    .zip(v)
                    .fold(0, |acc, (x, y)| f.add(&acc, &f.mul(x, y)));
                assert_eq!(dot, 0);
            }
        }
        assert_eq!(span_basis(&f, &k), vec![vec![1, 0, 0, 2], vec![0, 0, 1, 0]]);
    }

    #[test]
    fn rank_over_rationals() {
        let f = Rationals::new();
        let q = |s: &str| f.parse(s).unwrap();
        let rows = vec![
            vec![q("1"), q("2"), q("3")],
            vec![q("2"), q("4"), q("6")],
            vec![q("1/2"), q("0"), q("-1")],
        ];
        assert_eq!(rank(&f, &rows), 2);
        assert_eq!(kernel(&f, &rows, 3).len(), 1);
        assert!(rref(&f, &[]).0.is_empty());
    }
}
