use num_bigint::BigInt;
use num_traits::{One, Zero};

use super::{clear_to_integers, Rational};

/// Dense rectangular matrix of rationals, row-major.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RatMatrix {
    rows: usize,
    cols: usize,
    data: Vec<Rational>,
}

impl RatMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        RatMatrix {
            rows,
            cols,
            data: vec![Rational::zero(); rows * cols],
        }
    }

    pub fn from_rows(rows: Vec<Vec<Rational>>) -> Self {
        let r = rows.len();
        let c = rows.first().map_or(0, |row| row.len());
        assert!(rows.iter().all(|row| row.len() == c), "ragged matrix");
        RatMatrix {
            rows: r,
            cols: c,
            data: rows.into_iter().flatten().collect(),
        }
    }

    pub fn from_fn(rows: usize, cols: usize, f: impl Fn(usize, usize) -> Rational) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        RatMatrix { rows, cols, data }
    }

    pub fn identity(n: usize) -> Self {
        RatMatrix::from_fn(n, n, |i, j| {
            if i == j {
                Rational::one()
            } else {
                Rational::zero()
            }
        })
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> &Rational {
        &self.data[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: Rational) {
        self.data[i * self.cols + j] = v;
    }

    pub fn row(&self, i: usize) -> &[Rational] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn mul_vec(&self, v: &[Rational]) -> Vec<Rational> {
        assert_eq!(v.len(), self.cols);
        (0..self.rows)
            .map(|i| {
                self.row(i)
                    .iter()
                    .zip(v)
                    .filter(|(a, b)| !a.is_zero() && !b.is_zero())
                    .fold(Rational::zero(), |acc, (a, b)| acc + a * b)
            })
            .collect()
    }

    pub fn mul(&self, o: &RatMatrix) -> RatMatrix {
        assert_eq!(self.cols, o.rows);
        RatMatrix::from_fn(self.rows, o.cols, |i, j| {
            (0..self.cols).fold(Rational::zero(), |acc, k| acc + self.get(i, k) * o.get(k, j))
        })
    }

    pub fn transpose(&self) -> RatMatrix {
        RatMatrix::from_fn(self.cols, self.rows, |i, j| self.get(j, i).clone())
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|x| x.is_zero())
    }
}

/// Row echelon form over Z by fraction-free (Bareiss) elimination. Each pivot
/// is the entry of smallest bit length in its column. Returns the echelon
/// rows and their pivot columns.
fn bareiss_echelon(m: &RatMatrix) -> (Vec<Vec<BigInt>>, Vec<usize>) {
    let mut a: Vec<Vec<BigInt>> = (0..m.rows).map(|i| clear_to_integers(m.row(i))).collect();
    let mut pivots = Vec::new();
    let mut prev = BigInt::one();
    let mut r = 0;
    for c in 0..m.cols {
        if r == a.len() {
            break;
        }
        let best = (r..a.len())
            .filter(|&i| !a[i][c].is_zero())
            .min_by_key(|&i| a[i][c].bits());
        let Some(p) = best else { continue };
        a.swap(r, p);
        let (head, tail) = a.split_at_mut(r + 1);
        let pivot_row = &head[r];
        let piv = &pivot_row[c];
        for row in tail.iter_mut() {
            if row[c].is_zero() {
                // a_ij <- a_kk a_ij / prev, exact by Bareiss.
                for x in row.iter_mut().skip(c + 1) {
                    if !x.is_zero() {
                        *x = &*x * piv / &prev;
                    }
                }
                continue;
            }
            let factor = row[c].clone();
            for j in c + 1..m.cols {
                let v = piv * &row[j] - &factor * &pivot_row[j];
                row[j] = v / &prev;
            }
            row[c] = BigInt::zero();
        }
        prev = a[r][c].clone();
        pivots.push(c);
        r += 1;
    }
    a.truncate(r);
    (a, pivots)
}

/// Rank over the rationals.
pub fn rank(m: &RatMatrix) -> usize {
    bareiss_echelon(m).1.len()
}

/// Basis of the right nullspace `{v : m v = 0}`, one vector per free column,
/// each scaled so its first nonzero entry is 1. Empty iff `m` has full column
/// rank; the zero matrix gives the standard basis.
pub fn kernel_basis(m: &RatMatrix) -> Vec<Vec<Rational>> {
    assert!(m.cols > 0, "kernel_basis of an empty matrix");
    let (ech, pivots) = bareiss_echelon(m);
    let mut is_pivot = vec![false; m.cols];
    for &c in &pivots {
        is_pivot[c] = true;
    }
    let mut basis = Vec::new();
    for f in (0..m.cols).filter(|&c| !is_pivot[c]) {
        let mut x = vec![Rational::zero(); m.cols];
        x[f] = Rational::one();
        for (row, &pc) in ech.iter().zip(&pivots).rev() {
            let mut s = Rational::zero();
            for j in pc + 1..m.cols {
                if !row[j].is_zero() && !x[j].is_zero() {
                    s += Rational::from_integer(row[j].clone()) * &x[j];
                }
            }
            x[pc] = -s / Rational::from_integer(row[pc].clone());
        }
        let lead = x.iter().find(|v| !v.is_zero()).unwrap().clone();
        if !lead.is_one() {
            for v in x.iter_mut() {
                *v /= &lead;
            }
        }
        basis.push(x);
    }
    basis
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactalg::{int, rat};
    use proptest::prelude::*;

    fn m(rows: &[&[i64]]) -> RatMatrix {
        RatMatrix::from_rows(
            rows.iter()
                .map(|r| r.iter().map(|&x| int(x)).collect())
                .collect(),
        )
    }

    #[test]
    fn rank_one_row() {
        assert_eq!(kernel_basis(&m(&[&[1, -1]])), vec![vec![int(1), int(1)]]);
    }

    #[test]
    fn identity_has_trivial_kernel() {
        assert!(kernel_basis(&RatMatrix::identity(3)).is_empty());
    }

    #[test]
    fn dependent_rows() {
        assert_eq!(
            kernel_basis(&m(&[&[2, 4], &[1, 2]])),
            vec![vec![int(1), rat(-1, 2)]]
        );
    }

    #[test]
    fn zero_matrix_gives_standard_basis() {
        let k = kernel_basis(&RatMatrix::zeros(2, 3));
        assert_eq!(k.len(), 3);
        assert_eq!(k[1], vec![int(0), int(1), int(0)]);
    }

    proptest! {
        #[test]
        fn kernel_vectors_annihilate(
            rows in 1usize..5, cols in 1usize..6,
            entries in proptest::collection::vec(-3i64..4, 30),
        ) {
            let mat = RatMatrix::from_fn(rows, cols, |i, j| int(entries[i * cols + j]));
            let ker = kernel_basis(&mat);
            prop_assert_eq!(ker.len(), cols - rank(&mat));
            for v in &ker {
                prop_assert!(mat.mul_vec(v).iter().all(|x| x.is_zero()));
                prop_assert!(v.iter().find(|x| !x.is_zero()).unwrap().is_one());
            }
        }
    }
}
