//! Monomial maps whose Jacobian determinant vanishes in positive
//! characteristic although the components are algebraically independent,
//! and the weighted derivations of three-variable cubic monomial pairs.

use std::collections::BTreeSet;

use num_bigint::BigInt;
use rayon::prelude::*;

use crate::algebra::{Field, Monomial, PolyMap, PolyMatrix, Polynomial, Scalar};
use crate::error::{Error, Result};
use crate::jacobian::{degree_matrix_criterion, jacobian, monomial_map};
use crate::keller::Derivation;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AnomalyRecord {
    pub name: String,
    pub map: PolyMap,
    pub characteristic: u64,
    /// Determinant over the integers of the exponent matrix.
    pub degree_det_z: BigInt,
    pub homogeneous: bool,
    pub homogenization: Option<PolyMap>,
    /// `degree_det_z` is nonzero and divisible by the characteristic.
    pub degree_check: bool,
    /// `det JH = 0` computed symbolically over the prime field.
    pub jacobian_check: bool,
}

impl AnomalyRecord {
    pub fn passes(&self) -> bool {
        self.degree_check && self.jacobian_check
    }

    /// The two checks give the same answer.
    pub fn checks_agree(&self) -> bool {
        self.degree_check == self.jacobian_check
    }
}

/// Multiply every component by a power of a new last variable up to the
/// largest degree, then append that power of the new variable.
pub fn homogenize(h: &PolyMap) -> Result<PolyMap> {
    let field = h.field();
    let n = h.nvars();
    let d = h
        .components()
        .iter()
        .filter_map(|c| c.degree().finite())
        .max()
        .unwrap_or(0);
    let mut comps = Vec::new();
    for c in h.components() {
        let terms = c.terms().map(|(m, s)| {
            let mut e = m.exponents().to_vec();
            e.push(d - m.degree());
            (Monomial::new(e), s.clone())
        });
        comps.push(Polynomial::from_terms(
            field,
            n + 1,
            terms.collect::<Vec<_>>(),
        ));
    }
    let mut last = vec![0; n + 1];
    last[n] = d;
    comps.push(Polynomial::monomial(field, field.one(), last));
    PolyMap::new(field, n + 1, comps)
}

/// Both checks on a square monomial map over `F_p`.
pub fn check_monomial_map(name: &str, h: &PolyMap) -> Result<AnomalyRecord> {
    let p = h.field().characteristic();
    let deg = degree_matrix_criterion(h)?;
    let jac_zero = jacobian(h).determinant()?.is_zero();
    Ok(AnomalyRecord {
        name: name.to_string(),
        map: h.clone(),
        characteristic: p,
        degree_check: deg.anomalous,
        degree_det_z: deg.det_over_z,
        homogeneous: h.homogeneous_degree().is_some(),
        homogenization: None,
        jacobian_check: jac_zero,
    })
}

/// The published examples: two non-homogeneous maps and their
/// homogenizations in characteristic 5, two homogeneous maps in
/// characteristic 5, one in characteristic 7, and `(x1^d, x1^(d-p) x2^p)`
/// at `(d, p) = (3, 3)` and `(5, 5)`.
pub fn verify_known_examples() -> Result<Vec<AnomalyRecord>> {
    let f5 = Field::prime(5)?;
    let f7 = Field::prime(7)?;
    let mut out = Vec::new();
    let nonhom: [(&str, usize, &[&[u32]]); 2] = [
        ("(x1^3 x2, x1 x2^2)", 2, &[&[3, 1], &[1, 2]]),
        (
            "(x1^2 x2, x1 x3^2, x2 x3)",
            3,
            &[&[2, 1, 0], &[1, 0, 2], &[0, 1, 1]],
        ),
    ];
    for (name, n, exps) in nonhom {
        let h = monomial_map(&f5, n, exps);
        let hom = homogenize(&h)?;
        let mut rec = check_monomial_map(name, &h)?;
        rec.homogenization = Some(hom.clone());
        out.push(rec);
        out.push(check_monomial_map(
            &format!("homogenization of {name}"),
            &hom,
        )?);
    }
    let hom: [(&str, &Field, usize, &[&[u32]]); 3] = [
        (
            "(x1^2 x3^2, x1 x2^3, x2 x3^3)",
            &f5,
            3,
            &[&[2, 0, 2], &[1, 3, 0], &[0, 1, 3]],
        ),
        (
            "(x4 x1^2, x1 x2^2, x2 x3^2, x3 x4^2)",
            &f5,
            4,
            &[&[2, 0, 0, 1], &[1, 2, 0, 0], &[0, 1, 2, 0], &[0, 0, 1, 2]],
        ),
        (
            "(x3 x1^3, x1 x2^3, x2 x3^3)",
            &f7,
            3,
            &[&[3, 0, 1], &[1, 3, 0], &[0, 1, 3]],
        ),
    ];
    for (name, field, n, exps) in hom {
        out.push(check_monomial_map(name, &monomial_map(field, n, exps))?);
    }
    for (d, p) in [(3u32, 3u64), (5, 5)] {
        let f = Field::prime(p)?;
        let h = monomial_map(&f, 2, &[&[d, 0], &[d - p as u32, p as u32]]);
        out.push(check_monomial_map(
            &format!("(x1^{d}, x1^{} x2^{p}) at p = {p}", d - p as u32),
            &h,
        )?);
    }
    Ok(out)
}

pub const SEARCH_MAX_VARS: usize = 4;
pub const SEARCH_MAX_DEGREE: u32 = 6;
const SEARCH_MAX_CANDIDATES: u128 = 400_000_000;

fn det_i64(rows: &[Vec<u32>]) -> i64 {
    let n = rows.len();
    let mut a: Vec<Vec<i64>> = rows
        .iter()
        .map(|r| r.iter().map(|&v| v as i64).collect())
        .collect();
    let mut prev = 1i64;
    let mut sign = 1i64;
    for k in 0..n {
        let Some(p) = (k..n).find(|&i| a[i][k] != 0) else {
            return 0;
        };
        if p != k {
            a.swap(p, k);
            sign = -sign;
        }
        for i in k + 1..n {
            for j in k + 1..n {
                a[i][j] = (a[k][k] * a[i][j] - a[i][k] * a[k][j]) / prev;
            }
            a[i][k] = 0;
        }
        prev = a[k][k];
    }
    sign * a[n - 1][n - 1]
}

fn permutations(n: usize) -> Vec<Vec<usize>> {
    if n == 0 {
        return vec![Vec::new()];
    }
    let mut out = Vec::new();
    for p in permutations(n - 1) {
        for pos in 0..=p.len() {
            let mut q = p.clone();
            q.insert(pos, n - 1);
            out.push(q);
        }
    }
    out.sort();
    out
}

/// Lexicographically least exponent matrix over all row and column
/// permutations.
pub fn canonical_exponent_matrix(rows: &[Vec<u32>]) -> Vec<Vec<u32>> {
    let n = rows.first().map_or(0, Vec::len);
    permutations(n)
        .iter()
        .map(|perm| {
            let mut m: Vec<Vec<u32>> = rows
                .iter()
                .map(|r| perm.iter().map(|&j| r[j]).collect())
                .collect();
            m.sort();
            m
        })
        .min()
        .unwrap_or_default()
}

fn exponent_vectors(n: usize, max_degree: u32) -> Vec<Vec<u32>> {
    let mut out = Vec::new();
    for d in 1..=max_degree {
        for m in Monomial::all_of_degree(n, d) {
            out.push(m.exponents().to_vec());
        }
    }
    out.sort();
    out
}

fn binomial(n: u128, k: u128) -> u128 {
    (0..k).fold(1u128, |acc, i| acc * (n - i) / (i + 1))
}

fn for_each_combination(
    items: usize,
    k: usize,
    start: usize,
    chosen: &mut Vec<usize>,
    f: &mut impl FnMut(&[usize]),
) {
    if chosen.len() == k {
        f(chosen);
        return;
    }
    for i in start..items {
        chosen.push(i);
        for_each_combination(items, k, i + 1, chosen, f);
        chosen.pop();
    }
}

/// Sets of `n` distinct monomials in `n` variables of degree at most
/// `max_degree` whose exponent matrix has a nonzero integer determinant
/// divisible by `p`, one per symmetry class, in canonical order. Each hit is
/// cross-checked with the symbolic Jacobian determinant over `F_p`.
pub fn search_monomial_anomalies(n: usize, max_degree: u32, p: u64) -> Result<Vec<AnomalyRecord>> {
    if n == 0 {
        return Err(Error::Hypothesis("need at least one variable".into()));
    }
    if n > SEARCH_MAX_VARS || max_degree > SEARCH_MAX_DEGREE {
        return Err(Error::ResourceCap(format!(
            "search limited to n <= {SEARCH_MAX_VARS} and degree <= {SEARCH_MAX_DEGREE}"
        )));
    }
    let field = Field::prime(p)?;
    let monos = exponent_vectors(n, max_degree);
    if binomial(monos.len() as u128, n as u128) > SEARCH_MAX_CANDIDATES {
        return Err(Error::ResourceCap("too many candidate maps".into()));
    }
    let pi = p as i64;
    let classes: BTreeSet<Vec<Vec<u32>>> = (0..monos.len())
        .into_par_iter()
        .map(|first| {
            let mut found = BTreeSet::new();
            let mut chosen = vec![first];
            for_each_combination(monos.len(), n, first + 1, &mut chosen, &mut |idx| {
                let rows: Vec<Vec<u32>> = idx.iter().map(|&i| monos[i].clone()).collect();
                let d = det_i64(&rows);
                if d != 0 && d % pi == 0 {
                    found.insert(canonical_exponent_matrix(&rows));
                }
            });
            found
        })
        .reduce(BTreeSet::new, |mut a, b| {
            a.extend(b);
            a
        });
    let records: Vec<AnomalyRecord> = classes
        .into_par_iter()
        .map(|rows| {
            let refs: Vec<&[u32]> = rows.iter().map(Vec::as_slice).collect();
            let h = monomial_map(&field, n, &refs);
            let name = crate::text::component_strings(&h).join(", ");
            check_monomial_map(&format!("({name})"), &h)
        })
        .collect::<Result<_>>()?;
    Ok(records)
}

/// Cubic monomials `u` in `weights.len()` variables with
/// `sum_i weights[i] deg_{x_i} u = 0` in `field`, in descending order.
pub fn weighted_cubic_kernel(weights: &[i64], field: &Field) -> Vec<Monomial> {
    Monomial::all_of_degree(weights.len(), 3)
        .into_iter()
        .filter(|m| {
            let s: i64 = weights
                .iter()
                .zip(m.exponents())
                .map(|(w, &e)| w * e as i64)
                .sum();
            field.from_i64(s).is_zero()
        })
        .collect()
}

/// `D(f) = x1 x2 x3 det J(f, h2, h3) / (h2 h3)`, computed on the generators
/// by exact division. The result must scale every variable.
pub fn weight_derivation(h2: &Polynomial, h3: &Polynomial) -> Result<Derivation> {
    let field = h2.field().clone();
    let n = 3;
    if h2.nvars() != n || h3.nvars() != n {
        return Err(Error::dim("expected polynomials in three variables"));
    }
    let x123 = Polynomial::monomial(&field, field.one(), vec![1, 1, 1]);
    let denom = h2 * h3;
    let mut images = Vec::new();
    for i in 0..n {
        let f = Polynomial::var(&field, n, i);
        let m = PolyMap::new(&field, n, vec![f, h2.clone(), h3.clone()])?;
        let det: Polynomial = jacobian(&m).determinant()?;
        let num = &x123 * &det;
        let image = num.div_exact(&denom).ok_or_else(|| {
            Error::Hypothesis("determinant formula does not divide exactly".into())
        })?;
        let xi = Polynomial::var(&field, n, i);
        let scaled = image.div_exact(&xi).filter(Polynomial::is_constant);
        if scaled.is_none() && !image.is_zero() {
            return Err(Error::Hypothesis(format!(
                "D(x{}) = {image} is not a multiple of x{}",
                i + 1,
                i + 1
            )));
        }
        images.push(image);
    }
    Derivation::new(&field, n, images)
}

/// Weights `c_i` of a derivation with `D(x_i) = c_i x_i`.
pub fn diagonal_weights(d: &Derivation) -> Option<Vec<Scalar>> {
    let field = d.field();
    d.images()
        .iter()
        .enumerate()
        .map(|(i, p)| {
            if p.is_zero() {
                return Some(field.zero());
            }
            p.div_exact(&Polynomial::var(field, d.nvars(), i))?
                .constant_value()
        })
        .collect()
}

/// Symbolic determinant of the Jacobian, as a convenience for reports.
pub fn jacobian_determinant(h: &PolyMap) -> Result<Polynomial> {
    let jm: PolyMatrix = jacobian(h);
    jm.determinant()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn mon(e: &[u32]) -> Monomial {
        Monomial::new(e.to_vec())
    }

    #[test]
    fn known_examples_pass() {
        let recs = verify_known_examples().unwrap();
        assert_eq!(recs.len(), 9);
        for r in &recs {
            assert!(r.passes(), "{}", r.name);
        }
        let dets: Vec<i64> = recs
            .iter()
            .map(|r| r.degree_det_z.to_string().parse().unwrap())
            .collect();
        assert_eq!(dets, vec![5, 20, -5, -15, 20, 15, 28, 9, 25]);
        assert_eq!(
            crate::text::component_strings(recs[0].homogenization.as_ref().unwrap()),
            vec!["1*x1^3*x2^1", "1*x1^1*x2^2*x3^1", "1*x3^4"]
        );
    }

    #[test]
    fn kernels() {
        let q = Field::rational();
        assert_eq!(
            weighted_cubic_kernel(&[1, -2, 4], &q),
            vec![mon(&[2, 1, 0]), mon(&[0, 2, 1])]
        );
        assert_eq!(
            weighted_cubic_kernel(&[-2, -2, 4], &q),
            vec![mon(&[2, 0, 1]), mon(&[1, 1, 1]), mon(&[0, 2, 1])]
        );
        assert_eq!(weighted_cubic_kernel(&[0, 0, 0], &q).len(), 10);
    }

    #[test]
    fn weight_derivations() {
        let q = Field::rational();
        let p = |e: &[u32]| Polynomial::monomial(&q, q.one(), e.to_vec());
        let d = weight_derivation(&p(&[2, 1, 0]), &p(&[0, 2, 1])).unwrap();
        assert_eq!(
            diagonal_weights(&d).unwrap(),
            vec![q.from_i64(1), q.from_i64(-2), q.from_i64(4)]
        );
        let d = weight_derivation(&p(&[2, 0, 1]), &p(&[0, 2, 1])).unwrap();
        assert_eq!(
            diagonal_weights(&d).unwrap(),
            vec![q.from_i64(-2), q.from_i64(-2), q.from_i64(4)]
        );
        assert!(d.apply(&p(&[2, 0, 1])).is_zero() && d.apply(&p(&[0, 2, 1])).is_zero());
    }

    #[test]
    fn search_small() {
        let hits = search_monomial_anomalies(2, 4, 5).unwrap();
        let want = canonical_exponent_matrix(&[vec![3, 1], vec![1, 2]]);
        assert!(hits.iter().any(|r| r
            .map
            .components()
            .iter()
            .map(|c| c.leading_term().unwrap().0.exponents().to_vec())
            .collect::<Vec<_>>()
            == want));
        assert!(hits.iter().all(AnomalyRecord::passes));
        assert!(search_monomial_anomalies(2, 4, 11).unwrap().is_empty());
        let one = search_monomial_anomalies(1, 6, 3).unwrap();
        assert_eq!(one.len(), 2);
    }
}
