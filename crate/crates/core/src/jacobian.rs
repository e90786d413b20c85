//! Jacobian matrices, rank over the function field, nilpotency, bounded
//! search for algebraic relations, and the exponent-matrix test for monomial
//! maps.

use std::collections::HashMap;

use num_bigint::BigInt;
use num_traits::Zero;
use serde::Serialize;

use crate::algebra::{Field, Monomial, PolyMap, PolyMatrix, Polynomial, Scalar, ScalarMatrix};
use crate::error::{Error, Result};

/// Default total-degree cap for [`find_dependence`].
pub const DEFAULT_DEPENDENCE_CAP: u32 = 6;

/// `(dH_i / dx_j)`, an `m x n` matrix.
pub fn jacobian(h: &PolyMap) -> PolyMatrix {
    jacobian_wrt(h, &(0..h.nvars()).collect::<Vec<_>>())
}

/// Jacobian with respect to a subset of the variables, columns in the given
/// order.
pub fn jacobian_wrt(h: &PolyMap, vars: &[usize]) -> PolyMatrix {
    let rows = h
        .components()
        .iter()
        .map(|c| {
            vars.iter()
                .map(|&j| c.derivative(j).expect("variable in range"))
                .collect()
        })
        .collect();
    PolyMatrix::from_rows(h.field(), h.nvars(), rows).expect("consistent shape")
}

/// Rank of a polynomial matrix over `K(x)` with a nonzero maximal minor.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RankCertificate {
    pub rank: usize,
    pub minor_rows: Vec<usize>,
    pub minor_cols: Vec<usize>,
    pub minor_value: Polynomial,
}

impl RankCertificate {
    /// Recompute the witness minor and check every bordering `(r+1)`-minor
    /// vanishes.
    pub fn verify(&self, m: &PolyMatrix) -> bool {
        let sub = m.submatrix(&self.minor_rows, &self.minor_cols);
        let Ok(det) = sub.determinant() else {
            return false;
        };
        if det != self.minor_value || (self.rank > 0 && det.is_zero()) {
            return false;
        }
        for i in (0..m.rows()).filter(|i| !self.minor_rows.contains(i)) {
            for j in (0..m.cols()).filter(|j| !self.minor_cols.contains(j)) {
                let mut rows = self.minor_rows.clone();
                rows.push(i);
                let mut cols = self.minor_cols.clone();
                cols.push(j);
                match m.submatrix(&rows, &cols).determinant() {
                    Ok(d) if d.is_zero() => {}
                    _ => return false,
                }
            }
        }
        true
    }
}

/// Rank over the rational function field by fraction-free elimination; the
/// certificate minor is recomputed from the original entries.
pub fn rank_over_function_field(m: &PolyMatrix) -> RankCertificate {
    let e = m.eliminate();
    let mut rows = e.pivot_rows.clone();
    let mut cols = e.pivot_cols.clone();
    rows.sort_unstable();
    cols.sort_unstable();
    let minor_value = m
        .submatrix(&rows, &cols)
        .determinant()
        .expect("square minor");
    RankCertificate {
        rank: e.rank,
        minor_rows: rows,
        minor_cols: cols,
        minor_value,
    }
}

/// Rank of the Jacobian matrix of `h`.
pub fn jacobian_rank(h: &PolyMap) -> usize {
    jacobian(h).rank()
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Nilpotency {
    pub nilpotent: bool,
    /// Least `k` with `M^k = 0`.
    pub index: Option<usize>,
}

/// Whether `M^n = 0`, computing successive powers and stopping at the first
/// zero one.
pub fn is_nilpotent(m: &PolyMatrix) -> Result<Nilpotency> {
    let index = m.nilpotency_index()?;
    Ok(Nilpotency {
        nilpotent: index.is_some(),
        index,
    })
}

/// A nonzero `P(t_1, ..., t_m)` with `P(H) = 0`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DependenceRelation {
    pub relation: Polynomial,
    pub degree_bound_used: u32,
}

impl DependenceRelation {
    pub fn verify(&self, h: &PolyMap) -> bool {
        !self.relation.is_zero()
            && self
                .relation
                .compose(h.components())
                .is_ok_and(|p| p.is_zero())
    }
}

/// Search for an algebraic relation among the components of `h` of total
/// degree at most `cap`, by exact linear algebra on the coefficients of all
/// products of components.
///
/// For a map whose nonzero components share one degree, each total degree of
/// `P` is solved separately; otherwise all monomials up to the current degree
/// are used at once. Within a degree the candidate monomials are ordered
/// ascending, and the relation returned is the kernel vector attached to the
/// first dependent monomial, scaled to leading coefficient one. `None` only
/// means no relation exists up to `cap`.
pub fn find_dependence(h: &PolyMap, cap: u32) -> Result<Option<DependenceRelation>> {
    if cap == 0 {
        return Err(Error::Hypothesis("degree cap must be at least 1".into()));
    }
    let m = h.ncomponents();
    let field = h.field();
    if m == 0 {
        return Ok(None);
    }
    let homogeneous = h.homogeneous_degree().is_some() || h.is_zero();
    let mut images: HashMap<Monomial, Polynomial> = HashMap::new();
    images.insert(Monomial::one(m), Polynomial::one(field, h.nvars()));
    for k in 1..=cap {
        let mut cols: Vec<Monomial> = if homogeneous {
            Monomial::all_of_degree(m, k)
        } else {
            (0..=k)
                .flat_map(|d| Monomial::all_of_degree(m, d))
                .collect()
        };
        cols.sort();
        let polys: Vec<Polynomial> = cols.iter().map(|t| image_of(t, h, &mut images)).collect();
        let mut rows: Vec<Monomial> = polys
            .iter()
            .flat_map(|p| p.terms().map(|(mon, _)| mon.clone()))
            .collect();
        rows.sort();
        rows.dedup();
        let mut mat = ScalarMatrix::zeros(field, rows.len(), cols.len());
        for (j, p) in polys.iter().enumerate() {
            for (mon, c) in p.terms() {
                let i = rows.binary_search(mon).expect("row present");
                mat.set(i, j, c.clone());
            }
        }
        let kernel = mat.kernel();
        if let Some(v) = kernel.first() {
            let relation =
                Polynomial::from_terms(field, m, cols.iter().cloned().zip(v.iter().cloned()))
                    .monic();
            return Ok(Some(DependenceRelation {
                relation,
                degree_bound_used: k,
            }));
        }
    }
    Ok(None)
}

fn image_of(t: &Monomial, h: &PolyMap, memo: &mut HashMap<Monomial, Polynomial>) -> Polynomial {
    if let Some(p) = memo.get(t) {
        return p.clone();
    }
    let i = t
        .exponents()
        .iter()
        .position(|&e| e > 0)
        .expect("constant monomial is memoized");
    let prev = t.with_exponent(i, t.exponent(i) - 1);
    let p = &image_of(&prev, h, memo) * h.component(i);
    memo.insert(t.clone(), p.clone());
    p
}

/// Exponent-matrix test for maps whose components are single monomials.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DegreeMatrixReport {
    /// Entry `(j, i)` is the exponent of `x_i` in `H_j`.
    pub matrix: Vec<Vec<u32>>,
    pub det_over_z: BigInt,
    pub det_in_field: Scalar,
    /// Nonzero over the integers but zero in the field.
    pub anomalous: bool,
}

pub fn degree_matrix_criterion(h: &PolyMap) -> Result<DegreeMatrixReport> {
    let mut matrix = Vec::new();
    for (j, c) in h.components().iter().enumerate() {
        if c.nterms() != 1 || !c.leading_coefficient().is_some_and(Scalar::is_one) {
            return Err(Error::Hypothesis(format!(
                "component H{} is not a monomial with coefficient 1",
                j + 1
            )));
        }
        matrix.push(c.leading_term().unwrap().0.exponents().to_vec());
    }
    if !h.is_square() {
        return Err(Error::dim("the exponent matrix is not square"));
    }
    let det_over_z = integer_determinant(&matrix);
    let det_in_field = h.field().from_bigint(&det_over_z);
    let anomalous = !det_over_z.is_zero() && det_in_field.is_zero();
    Ok(DegreeMatrixReport {
        matrix,
        det_over_z,
        det_in_field,
        anomalous,
    })
}

/// Determinant of a small integer matrix by fraction-free elimination.
pub fn integer_determinant(rows: &[Vec<u32>]) -> BigInt {
    let n = rows.len();
    let mut a: Vec<Vec<BigInt>> = rows
        .iter()
        .map(|r| r.iter().map(|&v| BigInt::from(v)).collect())
        .collect();
    let mut prev = BigInt::from(1);
    let mut sign = BigInt::from(1);
    for k in 0..n {
        let Some(p) = (k..n).find(|&i| !a[i][k].is_zero()) else {
            return BigInt::zero();
        };
        if p != k {
            a.swap(p, k);
            sign = -sign;
        }
        for i in k + 1..n {
            for j in k + 1..n {
                let v = (&a[k][k] * &a[i][j] - &a[i][k] * &a[k][j]) / &prev;
                a[i][j] = v;
            }
            a[i][k] = BigInt::zero();
        }
        prev = a[k][k].clone();
    }
    if n == 0 {
        return BigInt::from(1);
    }
    sign * &a[n - 1][n - 1]
}

/// `H(x_1, ..., x_s, x_1 x_{s+1}, ..., x_1 x_n)`; `s` counts from 1.
pub fn detdep_reduce(h: &PolyMap, s: usize) -> Result<PolyMap> {
    let n = h.nvars();
    if s == 0 || s > n {
        return Err(Error::VariableOutOfRange { index: s, nvars: n });
    }
    let field = h.field();
    let x1 = Polynomial::var(field, n, 0);
    let images: Vec<Polynomial> = (0..n)
        .map(|j| {
            let xj = Polynomial::var(field, n, j);
            if j < s {
                xj
            } else {
                &x1 * &xj
            }
        })
        .collect();
    crate::algebra::compose_maps(h, &PolyMap::new(field, n, images)?)
}

/// The three conditions compared for maps with Jacobian rank at most one.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Trdeg1Report {
    pub rank: usize,
    /// Every pair of components has a relation of degree at most the cap.
    pub pairwise_dependence_found: bool,
    pub det_jf_is_one: bool,
    pub jh_nilpotent: bool,
    pub split_product_zero: bool,
    pub all_equivalent: bool,
}

/// Evaluate `det JF = 1`, nilpotency of `JH`, and `JH(x) JH(y) = 0` for
/// `F = x + H` independently.
///
/// The transcendence-degree-one hypothesis is approximated by Jacobian rank
/// at most one, with bounded pairwise relation search recorded as evidence.
pub fn trdeg1_equivalences(h: &PolyMap, cap: u32) -> Result<Trdeg1Report> {
    h.require_square()?;
    let n = h.nvars();
    let field = h.field();
    let jh = jacobian(h);
    let rank = jh.rank();
    if rank > 1 {
        return Err(Error::Hypothesis(format!("Jacobian rank {rank} exceeds 1")));
    }
    let mut pairwise = true;
    for i in 0..n {
        for j in i + 1..n {
            let pair = PolyMap::new(
                field,
                n,
                vec![h.component(i).clone(), h.component(j).clone()],
            )?;
            if find_dependence(&pair, cap)?.is_none() {
                pairwise = false;
            }
        }
    }
    let jf = PolyMatrix::identity(field, n, n).add(&jh)?;
    let det_jf_is_one = jf
        .determinant()?
        .constant_value()
        .is_some_and(|c| c.is_one());
    let jh_nilpotent = jh.nilpotency_index()?.is_some();
    let split_product_zero = split_product(&jh)?.is_zero();
    Ok(Trdeg1Report {
        rank,
        pairwise_dependence_found: pairwise,
        det_jf_is_one,
        jh_nilpotent,
        split_product_zero,
        all_equivalent: det_jf_is_one == jh_nilpotent && jh_nilpotent == split_product_zero,
    })
}

/// `M(x) * M(y)` in the doubled context `x_1..x_n, y_1..y_n`.
pub fn split_product(m: &PolyMatrix) -> Result<PolyMatrix> {
    let n = m.nvars();
    let mx = m.map_entries(|p| p.embed(2 * n, 0));
    let my = m.map_entries(|p| p.embed(2 * n, n));
    mx.mul(&my)
}

/// Map whose components are the monomials with the given exponents, each
/// padded to `nvars`.
pub fn monomial_map(field: &Field, nvars: usize, exps: &[&[u32]]) -> PolyMap {
    let comps = exps
        .iter()
        .map(|e| {
            let mut v = e.to_vec();
            v.resize(nvars, 0);
            Polynomial::monomial(field, field.one(), v)
        })
        .collect();
    PolyMap::new(field, nvars, comps).expect("consistent")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::text::parse_map;

    fn map(text: &str) -> PolyMap {
        parse_map(text, None).unwrap().map
    }

    #[test]
    fn jacobian_of_veronese() {
        let h = map("H1 = x3*x1^2; H2 = x3*x1*x2; H3 = x3*x2^2");
        let j = jacobian(&h);
        assert_eq!(j.get(0, 0).to_string(), "2*x1^1*x3^1");
        assert!(j.get(0, 1).is_zero());
        assert_eq!(j.get(1, 2).to_string(), "1*x1^1*x2^1");
        let cert = rank_over_function_field(&j);
        assert_eq!(cert.rank, 2);
        assert!(cert.verify(&j));
        assert!(j.determinant().unwrap().is_zero());
    }

    #[test]
    fn characteristic_five_jacobian() {
        let f5 = Field::prime(5).unwrap();
        let h = parse_map("H1 = x1^3*x2; H2 = x1*x2^2", Some(&f5))
            .unwrap()
            .map;
        let j = jacobian(&h);
        assert_eq!(j.get(0, 0).to_string(), "3*x1^2*x2^1");
        assert_eq!(j.get(1, 1).to_string(), "2*x1^1*x2^1");
        assert!(j.determinant().unwrap().is_zero());
    }

    #[test]
    fn rank_edge_cases() {
        let z = PolyMatrix::zeros(&Field::rational(), 2, 2, 3);
        assert_eq!(rank_over_function_field(&z).rank, 0);
        let h = map("H1 = x1^3; H2 = x2^3; H3 = x3^3");
        assert_eq!(jacobian_rank(&h), 3);
    }

    #[test]
    fn relations() {
        let cusp = map("H1 = x1^2; H2 = x1^3");
        let r = find_dependence(&cusp, 6).unwrap().unwrap();
        assert_eq!(r.relation.to_string(), "1*x1^3 - 1*x2^2");
        assert_eq!(r.degree_bound_used, 3);

        let ver = map("H1 = x3*x1^2; H2 = x3*x1*x2; H3 = x3*x2^2");
        let r = find_dependence(&ver, 6).unwrap().unwrap();
        assert_eq!(r.relation.to_string(), "1*x1^1*x3^1 - 1*x2^2");
        assert!(r.verify(&ver));

        let free = map("H1 = x1^3; H2 = x2^3");
        assert!(find_dependence(&free, 6).unwrap().is_none());
    }

    #[test]
    fn exponent_matrices() {
        let f5 = Field::prime(5).unwrap();
        let r = degree_matrix_criterion(&monomial_map(&f5, 2, &[&[3, 1], &[1, 2]])).unwrap();
        assert_eq!(r.det_over_z, BigInt::from(5));
        assert!(r.anomalous);
        let r = degree_matrix_criterion(&monomial_map(&f5, 2, &[&[3, 0], &[0, 3]])).unwrap();
        assert_eq!(r.det_over_z, BigInt::from(9));
        assert!(!r.anomalous);
        let f7 = Field::prime(7).unwrap();
        let r =
            degree_matrix_criterion(&monomial_map(&f7, 3, &[&[3, 0, 1], &[1, 3, 0], &[0, 1, 3]]))
                .unwrap();
        assert_eq!(r.det_over_z, BigInt::from(28));
        assert!(r.anomalous);
    }

    #[test]
    fn gadget() {
        let h = map("H1 = x1*x3; vars: 3");
        assert_eq!(detdep_reduce(&h, 3).unwrap(), h);
        assert_eq!(
            detdep_reduce(&h, 2).unwrap().component(0).to_string(),
            "1*x1^2*x3^1"
        );
        assert!(detdep_reduce(&h, 4).is_err());
    }

    #[test]
    fn trdeg_one_examples() {
        let r = trdeg1_equivalences(&map("H1 = x2^3; H2 = 0"), 6).unwrap();
        assert!(r.det_jf_is_one && r.jh_nilpotent && r.split_product_zero && r.all_equivalent);
        let r = trdeg1_equivalences(&map("H1 = x1^3; H2 = 0; vars: 2"), 6).unwrap();
        assert!(!r.det_jf_is_one && !r.jh_nilpotent && !r.split_product_zero && r.all_equivalent);
    }
}
