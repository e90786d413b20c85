//! Dense matrices over the coefficient field and invertible linear changes
//! of variables.

use std::fmt;

use super::field::{Field, Scalar};
use crate::error::{Error, Result};

/// A dense `rows x cols` matrix of scalars.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ScalarMatrix {
    field: Field,
    rows: usize,
    cols: usize,
    data: Vec<Scalar>,
}

/// Reduced row echelon form together with its pivot columns.
#[derive(Clone, Debug)]
pub struct Echelon {
    pub reduced: ScalarMatrix,
    pub pivots: Vec<usize>,
    /// Invertible `rows x rows` matrix `U` with `U * input = reduced`.
    pub transform: ScalarMatrix,
}

impl ScalarMatrix {
    pub fn zeros(field: &Field, rows: usize, cols: usize) -> Self {
        ScalarMatrix {
            field: field.clone(),
            rows,
            cols,
            data: vec![field.zero(); rows * cols],
        }
    }

    pub fn identity(field: &Field, n: usize) -> Self {
        let mut m = Self::zeros(field, n, n);
        for i in 0..n {
            m.set(i, i, field.one());
        }
        m
    }

    pub fn from_rows(field: &Field, rows: Vec<Vec<Scalar>>) -> Result<Self> {
        let r = rows.len();
        let c = rows.first().map_or(0, Vec::len);
        let mut data = Vec::with_capacity(r * c);
        for row in rows {
            if row.len() != c {
                return Err(Error::dim("ragged matrix rows"));
            }
            for s in row {
                if s.field() != *field {
                    return Err(Error::FieldMismatch {
                        left: field.to_string(),
                        right: s.field().to_string(),
                    });
                }
                data.push(s);
            }
        }
        Ok(ScalarMatrix {
            field: field.clone(),
            rows: r,
            cols: c,
            data,
        })
    }

    /// Integer entries, convenient for tests and generators.
    pub fn from_i64(field: &Field, rows: &[Vec<i64>]) -> Result<Self> {
        Self::from_rows(
            field,
            rows.iter()
                .map(|r| r.iter().map(|&v| field.from_i64(v)).collect())
                .collect(),
        )
    }

    pub fn from_columns(field: &Field, cols: &[Vec<Scalar>]) -> Result<Self> {
        Ok(Self::from_rows(field, cols.to_vec())?.transpose())
    }

    pub fn field(&self) -> &Field {
        &self.field
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

    pub fn get(&self, i: usize, j: usize) -> &Scalar {
        &self.data[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: Scalar) {
        self.data[i * self.cols + j] = v;
    }

    pub fn row(&self, i: usize) -> Vec<Scalar> {
        self.data[i * self.cols..(i + 1) * self.cols].to_vec()
    }

    pub fn column(&self, j: usize) -> Vec<Scalar> {
        (0..self.rows).map(|i| self.get(i, j).clone()).collect()
    }

    pub fn to_rows(&self) -> Vec<Vec<Scalar>> {
        (0..self.rows).map(|i| self.row(i)).collect()
    }

    pub fn transpose(&self) -> ScalarMatrix {
        let mut t = Self::zeros(&self.field, self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                t.set(j, i, self.get(i, j).clone());
            }
        }
        t
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(Scalar::is_zero)
    }

    pub fn is_identity(&self) -> bool {
        self.is_square()
            && (0..self.rows).all(|i| {
                (0..self.cols).all(|j| {
                    let v = self.get(i, j);
                    if i == j {
                        v.is_one()
                    } else {
                        v.is_zero()
                    }
                })
            })
    }

    pub fn mul(&self, other: &ScalarMatrix) -> Result<ScalarMatrix> {
        if self.cols != other.rows {
            return Err(Error::dim(format!(
                "cannot multiply {}x{} by {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        let mut out = Self::zeros(&self.field, self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(i, k);
                if a.is_zero() {
                    continue;
                }
                for j in 0..other.cols {
                    let b = other.get(k, j);
                    if b.is_zero() {
                        continue;
                    }
                    let v = out.get(i, j) + &(a * b);
                    out.set(i, j, v);
                }
            }
        }
        Ok(out)
    }

    pub fn mul_vec(&self, v: &[Scalar]) -> Result<Vec<Scalar>> {
        if v.len() != self.cols {
            return Err(Error::dim("vector length"));
        }
        Ok((0..self.rows)
            .map(|i| {
                (0..self.cols).fold(self.field.zero(), |acc, j| &acc + &(self.get(i, j) * &v[j]))
            })
            .collect())
    }

    /// Gauss-Jordan elimination. The pivot in each column is the first
    /// nonzero entry at or below the current row.
    pub fn echelon(&self) -> Echelon {
        let mut a = self.clone();
        let mut u = Self::identity(&self.field, self.rows);
        let mut pivots = Vec::new();
        let mut r = 0;
        for c in 0..self.cols {
            if r == self.rows {
                break;
            }
            let Some(p) = (r..self.rows).find(|&i| !a.get(i, c).is_zero()) else {
                continue;
            };
            a.swap_rows(r, p);
            u.swap_rows(r, p);
            let inv = a.get(r, c).inv().expect("nonzero pivot");
            a.scale_row(r, &inv);
            u.scale_row(r, &inv);
            for i in 0..self.rows {
                if i != r && !a.get(i, c).is_zero() {
                    let f = a.get(i, c).clone();
                    a.add_row_multiple(i, r, &-&f);
                    u.add_row_multiple(i, r, &-&f);
                }
            }
            pivots.push(c);
            r += 1;
        }
        Echelon {
            reduced: a,
            pivots,
            transform: u,
        }
    }

    pub fn rank(&self) -> usize {
        self.echelon().pivots.len()
    }

    /// Basis of the right null space `{v : A v = 0}`, one vector per free
    /// column in increasing order, each with a 1 in its free column.
    pub fn kernel(&self) -> Vec<Vec<Scalar>> {
        let ech = self.echelon();
        let free: Vec<usize> = (0..self.cols).filter(|c| !ech.pivots.contains(c)).collect();
        free.iter()
            .map(|&f| {
                let mut v = vec![self.field.zero(); self.cols];
                v[f] = self.field.one();
                for (row, &pc) in ech.pivots.iter().enumerate() {
                    v[pc] = -ech.reduced.get(row, f);
                }
                v
            })
            .collect()
    }

    pub fn determinant(&self) -> Result<Scalar> {
        if !self.is_square() {
            return Err(Error::dim("determinant of a non-square matrix"));
        }
        let mut a = self.clone();
        let mut det = self.field.one();
        for c in 0..self.cols {
            let Some(p) = (c..self.rows).find(|&i| !a.get(i, c).is_zero()) else {
                return Ok(self.field.zero());
            };
            if p != c {
                a.swap_rows(c, p);
                det = -det;
            }
            let piv = a.get(c, c).clone();
            det = &det * &piv;
            let inv = piv.inv().expect("nonzero pivot");
            for i in c + 1..self.rows {
                if !a.get(i, c).is_zero() {
                    let f = a.get(i, c) * &inv;
                    a.add_row_multiple(i, c, &-&f);
                }
            }
        }
        Ok(det)
    }

    pub fn inverse(&self) -> Result<ScalarMatrix> {
        if !self.is_square() {
            return Err(Error::dim("inverse of a non-square matrix"));
        }
        let ech = self.echelon();
        if ech.pivots.len() != self.rows {
            return Err(Error::Hypothesis("matrix is singular".into()));
        }
        Ok(ech.transform)
    }

    /// Rows of `self` (assumed independent) extended by standard basis
    /// vectors to a basis of the whole space.
    pub fn complete_rows(&self) -> Result<ScalarMatrix> {
        let mut rows = self.to_rows();
        if self.rank() != self.rows {
            return Err(Error::Hypothesis("rows are linearly dependent".into()));
        }
        for j in 0..self.cols {
            if rows.len() == self.cols {
                break;
            }
            let mut e = vec![self.field.zero(); self.cols];
            e[j] = self.field.one();
            let mut trial = rows.clone();
            trial.push(e);
            let t = ScalarMatrix::from_rows(&self.field, trial.clone())?;
            if t.rank() == trial.len() {
                rows = trial;
            }
        }
        ScalarMatrix::from_rows(&self.field, rows)
    }

    /// Square diagonal block matrix `diag(self, other)`.
    pub fn block_diag(&self, other: &ScalarMatrix) -> ScalarMatrix {
        let n = self.rows + other.rows;
        let m = self.cols + other.cols;
        let mut out = Self::zeros(&self.field, n, m);
        for i in 0..self.rows {
            for j in 0..self.cols {
                out.set(i, j, self.get(i, j).clone());
            }
        }
        for i in 0..other.rows {
            for j in 0..other.cols {
                out.set(self.rows + i, self.cols + j, other.get(i, j).clone());
            }
        }
        out
    }

    /// Permutation matrix `P` with `P e_j = e_{perm[j]}`.
    pub fn permutation(field: &Field, perm: &[usize]) -> ScalarMatrix {
        let n = perm.len();
        let mut m = Self::zeros(field, n, n);
        for (j, &i) in perm.iter().enumerate() {
            m.set(i, j, field.one());
        }
        m
    }

    pub fn to_field(&self, field: &Field) -> Result<ScalarMatrix> {
        Ok(ScalarMatrix {
            field: field.clone(),
            rows: self.rows,
            cols: self.cols,
            data: self
                .data
                .iter()
                .map(|s| field.embed(s))
                .collect::<Result<_>>()?,
        })
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for j in 0..self.cols {
            self.data.swap(a * self.cols + j, b * self.cols + j);
        }
    }

    fn scale_row(&mut self, i: usize, f: &Scalar) {
        for j in 0..self.cols {
            let v = self.get(i, j) * f;
            self.set(i, j, v);
        }
    }

    /// row[i] += f * row[k]
    fn add_row_multiple(&mut self, i: usize, k: usize, f: &Scalar) {
        for j in 0..self.cols {
            let src = self.get(k, j);
            if src.is_zero() {
                continue;
            }
            let v = self.get(i, j) + &(src * f);
            self.set(i, j, v);
        }
    }
}

impl fmt::Display for ScalarMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[")?;
        for i in 0..self.rows {
            if i > 0 {
                write!(f, ", ")?;
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
        write!(f, "]")
    }
}

/// An invertible square matrix with its exact inverse, acting on variables
/// by `x -> M x`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LinearMap {
    matrix: ScalarMatrix,
    inverse: ScalarMatrix,
}

impl LinearMap {
    pub fn new(matrix: ScalarMatrix) -> Result<Self> {
        let inverse = matrix.inverse()?;
        Ok(LinearMap { matrix, inverse })
    }

    pub fn identity(field: &Field, n: usize) -> Self {
        let id = ScalarMatrix::identity(field, n);
        LinearMap {
            matrix: id.clone(),
            inverse: id,
        }
    }

    pub fn matrix(&self) -> &ScalarMatrix {
        &self.matrix
    }

    pub fn inverse_matrix(&self) -> &ScalarMatrix {
        &self.inverse
    }

    pub fn dim(&self) -> usize {
        self.matrix.rows
    }

    pub fn field(&self) -> &Field {
        &self.matrix.field
    }

    pub fn inverse(&self) -> LinearMap {
        LinearMap {
            matrix: self.inverse.clone(),
            inverse: self.matrix.clone(),
        }
    }

    /// `self * other` as matrices.
    pub fn then(&self, other: &LinearMap) -> Result<LinearMap> {
        Ok(LinearMap {
            matrix: self.matrix.mul(&other.matrix)?,
            inverse: other.inverse.mul(&self.inverse)?,
        })
    }

    pub fn is_identity(&self) -> bool {
        self.matrix.is_identity()
    }

    /// Checks `matrix * inverse = I` exactly.
    pub fn verify(&self) -> bool {
        self.matrix
            .mul(&self.inverse)
            .map(|p| p.is_identity())
            .unwrap_or(false)
    }

    pub fn to_field(&self, field: &Field) -> Result<LinearMap> {
        Ok(LinearMap {
            matrix: self.matrix.to_field(field)?,
            inverse: self.inverse.to_field(field)?,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn inverse_and_determinant() {
        let q = Field::rational();
        let m = ScalarMatrix::from_i64(&q, &[vec![2, 1], vec![7, 4]]).unwrap();
        assert_eq!(m.determinant().unwrap(), q.one());
        let lm = LinearMap::new(m.clone()).unwrap();
        assert!(lm.verify());
        assert_eq!(
            lm.inverse_matrix(),
            &ScalarMatrix::from_i64(&q, &[vec![4, -1], vec![-7, 2]]).unwrap()
        );
    }

    #[test]
    fn singular_is_rejected() {
        let q = Field::rational();
        let m = ScalarMatrix::from_i64(&q, &[vec![1, 2], vec![2, 4]]).unwrap();
        assert!(LinearMap::new(m.clone()).is_err());
        assert_eq!(m.rank(), 1);
        let k = m.kernel();
        assert_eq!(k.len(), 1);
        assert!(m.mul_vec(&k[0]).unwrap().iter().all(Scalar::is_zero));
    }

    #[test]
    fn echelon_transform() {
        let f7 = Field::prime(7).unwrap();
        let m =
            ScalarMatrix::from_i64(&f7, &[vec![0, 3, 1], vec![2, 1, 1], vec![2, 4, 2]]).unwrap();
        let e = m.echelon();
        assert_eq!(e.transform.mul(&m).unwrap(), e.reduced);
        assert_eq!(e.pivots, vec![0, 1]);
    }

    #[test]
    fn completion_to_basis() {
        let q = Field::rational();
        let m = ScalarMatrix::from_i64(&q, &[vec![0, 1, 1]]).unwrap();
        let c = m.complete_rows().unwrap();
        assert_eq!(c.rows(), 3);
        assert_eq!(c.rank(), 3);
        assert_eq!(c.row(0), m.row(0));
    }
}
