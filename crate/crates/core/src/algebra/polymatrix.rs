//! Matrices with polynomial entries and fraction-free elimination.

use std::fmt;

use super::field::{Field, Scalar};
use super::linear::ScalarMatrix;
use super::poly::Polynomial;
use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PolyMatrix {
    field: Field,
    nvars: usize,
    rows: usize,
    cols: usize,
    entries: Vec<Polynomial>,
}

/// Outcome of fraction-free elimination: the rank and the original row and
/// column indices of the pivots, in pivot order.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Elimination {
    pub rank: usize,
    pub pivot_rows: Vec<usize>,
    pub pivot_cols: Vec<usize>,
    /// Determinant up to sign when the matrix is square and of full rank:
    /// the last Bareiss pivot.
    last_pivot: Option<Polynomial>,
    sign_flips: usize,
}

impl PolyMatrix {
    pub fn zeros(field: &Field, nvars: usize, rows: usize, cols: usize) -> Self {
        PolyMatrix {
            field: field.clone(),
            nvars,
            rows,
            cols,
            entries: vec![Polynomial::zero(field, nvars); rows * cols],
        }
    }

    pub fn identity(field: &Field, nvars: usize, n: usize) -> Self {
        let mut m = Self::zeros(field, nvars, n, n);
        for i in 0..n {
            m.set(i, i, Polynomial::one(field, nvars));
        }
        m
    }

    pub fn from_rows(field: &Field, nvars: usize, rows: Vec<Vec<Polynomial>>) -> Result<Self> {
        let r = rows.len();
        let c = rows.first().map_or(0, Vec::len);
        let mut entries = Vec::with_capacity(r * c);
        for row in rows {
            if row.len() != c {
                return Err(Error::dim("ragged matrix rows"));
            }
            for p in row {
                if p.nvars() != nvars {
                    return Err(Error::dim("matrix entries in different variable contexts"));
                }
                if p.field() != field {
                    return Err(Error::FieldMismatch {
                        left: field.to_string(),
                        right: p.field().to_string(),
                    });
                }
                entries.push(p);
            }
        }
        Ok(PolyMatrix {
            field: field.clone(),
            nvars,
            rows: r,
            cols: c,
            entries,
        })
    }

    /// Constant matrix with the given scalar entries.
    pub fn from_scalars(m: &ScalarMatrix, nvars: usize) -> Self {
        let mut out = Self::zeros(m.field(), nvars, m.rows(), m.cols());
        for i in 0..m.rows() {
            for j in 0..m.cols() {
                out.set(
                    i,
                    j,
                    Polynomial::constant(m.field(), nvars, m.get(i, j).clone()),
                );
            }
        }
        out
    }

    pub fn field(&self) -> &Field {
        &self.field
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> &Polynomial {
        &self.entries[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, p: Polynomial) {
        self.entries[i * self.cols + j] = p;
    }

    pub fn is_zero(&self) -> bool {
        self.entries.iter().all(Polynomial::is_zero)
    }

    pub fn map_entries(&self, f: impl Fn(&Polynomial) -> Polynomial) -> PolyMatrix {
        let entries: Vec<Polynomial> = self.entries.iter().map(f).collect();
        let nvars = entries.first().map_or(self.nvars, Polynomial::nvars);
        PolyMatrix {
            field: self.field.clone(),
            nvars,
            rows: self.rows,
            cols: self.cols,
            entries,
        }
    }

    pub fn try_map_entries(
        &self,
        f: impl Fn(&Polynomial) -> Result<Polynomial>,
    ) -> Result<PolyMatrix> {
        let entries: Vec<Polynomial> = self.entries.iter().map(f).collect::<Result<_>>()?;
        let nvars = entries.first().map_or(self.nvars, Polynomial::nvars);
        Ok(PolyMatrix {
            field: self.field.clone(),
            nvars,
            rows: self.rows,
            cols: self.cols,
            entries,
        })
    }

    pub fn mul(&self, other: &PolyMatrix) -> Result<PolyMatrix> {
        if self.cols != other.rows {
            return Err(Error::dim(format!(
                "cannot multiply {}x{} by {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        if self.nvars != other.nvars {
            return Err(Error::dim("matrix entries in different variable contexts"));
        }
        let mut out = Self::zeros(&self.field, self.nvars, self.rows, other.cols);
        for i in 0..self.rows {
            for j in 0..other.cols {
                let mut acc = Polynomial::zero(&self.field, self.nvars);
                for k in 0..self.cols {
                    let (a, b) = (self.get(i, k), other.get(k, j));
                    if !a.is_zero() && !b.is_zero() {
                        acc = &acc + &(a * b);
                    }
                }
                out.set(i, j, acc);
            }
        }
        Ok(out)
    }

    pub fn add(&self, other: &PolyMatrix) -> Result<PolyMatrix> {
        if self.rows != other.rows || self.cols != other.cols || self.nvars != other.nvars {
            return Err(Error::dim("matrices of different shapes"));
        }
        let mut out = self.clone();
        for (o, b) in out.entries.iter_mut().zip(&other.entries) {
            *o = &*o + b;
        }
        Ok(out)
    }

    pub fn evaluate(&self, point: &[Scalar]) -> Result<ScalarMatrix> {
        let mut out = ScalarMatrix::zeros(&self.field, self.rows, self.cols);
        for i in 0..self.rows {
            for j in 0..self.cols {
                out.set(i, j, self.get(i, j).evaluate(point)?);
            }
        }
        Ok(out)
    }

    pub fn submatrix(&self, rows: &[usize], cols: &[usize]) -> PolyMatrix {
        let mut out = Self::zeros(&self.field, self.nvars, rows.len(), cols.len());
        for (a, &i) in rows.iter().enumerate() {
            for (b, &j) in cols.iter().enumerate() {
                out.set(a, b, self.get(i, j).clone());
            }
        }
        out
    }

    pub fn to_field(&self, field: &Field) -> Result<PolyMatrix> {
        let mut out = self.try_map_entries(|p| p.to_field(field))?;
        out.field = field.clone();
        Ok(out)
    }

    /// Fraction-free (Bareiss) elimination with full pivoting. The pivot is
    /// the nonzero entry with the fewest terms; ties go to the lowest row,
    /// then the lowest column.
    pub fn eliminate(&self) -> Elimination {
        let mut a = self.clone();
        let mut row_idx: Vec<usize> = (0..self.rows).collect();
        let mut col_idx: Vec<usize> = (0..self.cols).collect();
        let mut prev = Polynomial::one(&self.field, self.nvars);
        let mut flips = 0;
        let mut rank = 0;
        let mut last_pivot = None;
        for k in 0..self.rows.min(self.cols) {
            let mut best: Option<(usize, usize, usize)> = None;
            for i in k..self.rows {
                for j in k..self.cols {
                    let p = a.get(i, j);
                    if p.is_zero() {
                        continue;
                    }
                    let key = (p.nterms(), row_idx[i], col_idx[j]);
                    let better = match best {
                        None => true,
                        Some((bi, bj, bt)) => key < (bt, row_idx[bi], col_idx[bj]),
                    };
                    if better {
                        best = Some((i, j, p.nterms()));
                    }
                }
            }
            let Some((pi, pj, _)) = best else { break };
            if pi != k {
                a.swap_rows(k, pi);
                row_idx.swap(k, pi);
                flips += 1;
            }
            if pj != k {
                a.swap_cols(k, pj);
                col_idx.swap(k, pj);
                flips += 1;
            }
            let pivot = a.get(k, k).clone();
            for i in k + 1..self.rows {
                let aik = a.get(i, k).clone();
                for j in k + 1..self.cols {
                    let num = &(&pivot * a.get(i, j)) - &(&aik * a.get(k, j));
                    let v = num.div_exact(&prev).expect("Bareiss division is exact");
                    a.set(i, j, v);
                }
                a.set(i, k, Polynomial::zero(&self.field, self.nvars));
            }
            prev = pivot.clone();
            last_pivot = Some(pivot);
            rank += 1;
        }
        Elimination {
            rank,
            pivot_rows: row_idx[..rank].to_vec(),
            pivot_cols: col_idx[..rank].to_vec(),
            last_pivot,
            sign_flips: flips,
        }
    }

    pub fn rank(&self) -> usize {
        self.eliminate().rank
    }

    pub fn determinant(&self) -> Result<Polynomial> {
        if !self.is_square() {
            return Err(Error::dim("determinant of a non-square matrix"));
        }
        if self.rows == 0 {
            return Ok(Polynomial::one(&self.field, self.nvars));
        }
        let e = self.eliminate();
        if e.rank < self.rows {
            return Ok(Polynomial::zero(&self.field, self.nvars));
        }
        let d = e.last_pivot.expect("full rank");
        Ok(if e.sign_flips % 2 == 1 { -d } else { d })
    }

    /// `M^k` for `k = 1..=n`, stopping after the first zero power. Returns
    /// the least `k` with `M^k = 0`, if any.
    pub fn nilpotency_index(&self) -> Result<Option<usize>> {
        if !self.is_square() {
            return Err(Error::dim("nilpotency of a non-square matrix"));
        }
        if self.is_zero() {
            return Ok(Some(if self.rows == 0 { 0 } else { 1 }));
        }
        let mut power = self.clone();
        for k in 2..=self.rows {
            power = power.mul(self)?;
            if power.is_zero() {
                return Ok(Some(k));
            }
        }
        Ok(None)
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        for j in 0..self.cols {
            self.entries.swap(a * self.cols + j, b * self.cols + j);
        }
    }

    fn swap_cols(&mut self, a: usize, b: usize) {
        for i in 0..self.rows {
            self.entries.swap(i * self.cols + a, i * self.cols + b);
        }
    }
}

impl fmt::Display for PolyMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for i in 0..self.rows {
            if i > 0 {
                writeln!(f)?;
            }
            write!(f, "[")?;
            for j in 0..self.cols {
                if j > 0 {
                    write!(f, ", ")?;
                }
                write!(f, "{}", self.get(i, j))?;
            }
            write!(f, "]")?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q() -> Field {
        Field::rational()
    }

    fn mono(c: i64, e: &[u32]) -> Polynomial {
        Polynomial::monomial(&q(), q().from_i64(c), e.to_vec())
    }

    #[test]
    fn determinant_matches_cofactor_expansion() {
        // [[x1, x2], [x2, x1]] has determinant x1^2 - x2^2
        let m = PolyMatrix::from_rows(
            &q(),
            2,
            vec![
                vec![mono(1, &[1, 0]), mono(1, &[0, 1])],
                vec![mono(1, &[0, 1]), mono(1, &[1, 0])],
            ],
        )
        .unwrap();
        assert_eq!(
            m.determinant().unwrap(),
            &mono(1, &[2, 0]) - &mono(1, &[0, 2])
        );
    }

    #[test]
    fn nilpotent_ab_block() {
        // [[x1 x2, -x2^2], [x1^2, -x1 x2]]
        let m = PolyMatrix::from_rows(
            &q(),
            2,
            vec![
                vec![mono(1, &[1, 1]), mono(-1, &[0, 2])],
                vec![mono(1, &[2, 0]), mono(-1, &[1, 1])],
            ],
        )
        .unwrap();
        assert_eq!(m.nilpotency_index().unwrap(), Some(2));
        assert_eq!(m.rank(), 1);
        assert!(m.determinant().unwrap().is_zero());
        assert_eq!(
            PolyMatrix::identity(&q(), 2, 2).nilpotency_index().unwrap(),
            None
        );
    }

    #[test]
    fn pivot_prefers_sparse_entries() {
        let m = PolyMatrix::from_rows(
            &q(),
            2,
            vec![
                vec![&mono(1, &[1, 0]) + &mono(1, &[0, 1]), mono(0, &[0, 0])],
                vec![mono(0, &[0, 0]), mono(1, &[0, 1])],
            ],
        )
        .unwrap();
        let e = m.eliminate();
        assert_eq!(e.rank, 2);
        assert_eq!(e.pivot_rows, vec![1, 0]);
        assert_eq!(e.pivot_cols, vec![1, 0]);
    }
}
