//! Nilpotent 2x2 polynomial matrices and simultaneous triangularization.

use crate::algebra::gcd::{gcd, square_part};
use crate::algebra::{
    compose_linear, LinearMap, PolyMap, PolyMatrix, Polynomial, Scalar, ScalarMatrix, Side,
};
use crate::error::{Error, Result};
use crate::jacobian::{jacobian, jacobian_wrt};

/// `N = c [[a b, -b^2], [a^2, -a b]]`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Nilpotent2x2Factorization {
    pub a: Polynomial,
    pub b: Polynomial,
    pub c: Polynomial,
    /// `a` and `b` are linearly dependent over the field, equivalently `N`
    /// is similar over the field to a triangular matrix.
    pub triangularizable: bool,
}

impl Nilpotent2x2Factorization {
    pub fn rebuild(&self) -> Result<PolyMatrix> {
        let (a, b, c) = (&self.a, &self.b, &self.c);
        let ab = &(a * b) * c;
        PolyMatrix::from_rows(
            a.field(),
            a.nvars(),
            vec![vec![ab.clone(), -&(&(b * b) * c)], vec![&(a * a) * c, -&ab]],
        )
    }
}

/// Whether two polynomials are linearly dependent over the field.
pub fn linearly_dependent(a: &Polynomial, b: &Polynomial) -> bool {
    if a.is_zero() || b.is_zero() {
        return true;
    }
    let (m, ca) = a.leading_term().expect("nonzero");
    let cb = b.coefficient(m);
    !cb.is_zero() && a.scale(&cb) == b.scale(ca)
}

/// Factor a nilpotent 2x2 matrix.
///
/// With `g = gcd(n11, n21)`, `a = n21 / g`, `b = n11 / g` and `c = g / a`;
/// then `a` is scaled to leading coefficient one with the scalar moved
/// into `c`. A zero first column means `N = [[0, n12], [0, 0]]`, factored
/// with `a = 0` and `b` the square part of `n12`. `N = 0` gives `(0, 0, 0)`.
pub fn factor_nilpotent_2x2(n: &PolyMatrix) -> Result<Nilpotent2x2Factorization> {
    if n.rows() != 2 || n.cols() != 2 {
        return Err(Error::dim("expected a 2x2 matrix"));
    }
    let [n11, n12, n21, n22] = [n.get(0, 0), n.get(0, 1), n.get(1, 0), n.get(1, 1)];
    if !(n11 + n22).is_zero() || !(&(n11 * n22) - &(n12 * n21)).is_zero() {
        return Err(Error::NotNilpotent);
    }
    let field = n.field();
    let zero = Polynomial::zero(field, n.nvars());
    let f = if n.is_zero() {
        Nilpotent2x2Factorization {
            a: zero.clone(),
            b: zero.clone(),
            c: zero,
            triangularizable: true,
        }
    } else if n21.is_zero() {
        let b = square_part(n12).monic();
        let c = (-n12).div_exact(&(&b * &b)).expect("square part divides");
        Nilpotent2x2Factorization {
            a: zero,
            b,
            c,
            triangularizable: true,
        }
    } else {
        let g = gcd(n11, n21);
        let a = n21.div_exact(&g).expect("gcd divides");
        let b = n11.div_exact(&g).expect("gcd divides");
        let c = g.div_exact(&a).ok_or_else(|| {
            Error::TheoremViolation("gcd of the first column is not divisible by a".into())
        })?;
        let lc = a.leading_coefficient().expect("nonzero").clone();
        let inv = lc.inv().expect("nonzero");
        let (a, b) = (a.scale(&inv), b.scale(&inv));
        let c = c.scale(&(&lc * &lc));
        let triangularizable = linearly_dependent(&a, &b);
        Nilpotent2x2Factorization {
            a,
            b,
            c,
            triangularizable,
        }
    };
    if &f.rebuild()? != n {
        return Err(Error::TheoremViolation(
            "nilpotent 2x2 factorization does not rebuild the matrix".into(),
        ));
    }
    Ok(f)
}

/// Scalar matrices `M_alpha` with `M = sum M_alpha x^alpha`.
fn coefficient_matrices(m: &PolyMatrix) -> Vec<ScalarMatrix> {
    let mut mons: Vec<_> = (0..m.rows())
        .flat_map(|i| (0..m.cols()).map(move |j| (i, j)))
        .flat_map(|(i, j)| m.get(i, j).terms().map(|(mon, _)| mon.clone()))
        .collect();
    mons.sort();
    mons.dedup();
    mons.iter()
        .map(|mon| {
            let mut c = ScalarMatrix::zeros(m.field(), m.rows(), m.cols());
            for i in 0..m.rows() {
                for j in 0..m.cols() {
                    c.set(i, j, m.get(i, j).coefficient(mon));
                }
            }
            c
        })
        .collect()
}

/// `T` with `T^{-1} M_k T` strictly lower triangular for every `k`, or
/// `None` when no such `T` exists.
///
/// Builds the flag `W_0 = 0`, `W_{j+1} = { v : M_k v in W_j for all k }`
/// and orders a compatible basis with `W_1` last.
pub fn simultaneous_triangularization(
    mats: &[ScalarMatrix],
    n: usize,
) -> Result<Option<LinearMap>> {
    let Some(first) = mats.first() else {
        return Ok(None);
    };
    let field = first.field().clone();
    let mut flag: Vec<Vec<Scalar>> = Vec::new();
    let mut groups: Vec<Vec<Vec<Scalar>>> = Vec::new();
    while flag.len() < n {
        // rows spanning the annihilator of the current subspace
        let proj = if flag.is_empty() {
            ScalarMatrix::identity(&field, n)
        } else {
            let k = ScalarMatrix::from_rows(&field, flag.clone())?.kernel();
            ScalarMatrix::from_rows(&field, k)?
        };
        let mut rows = Vec::new();
        for m in mats {
            rows.extend(proj.mul(m)?.to_rows());
        }
        let next = ScalarMatrix::from_rows(&field, rows)?.kernel();
        let mut group = Vec::new();
        for v in next {
            let mut trial = flag.clone();
            trial.push(v.clone());
            if ScalarMatrix::from_rows(&field, trial.clone())?.rank() == trial.len() {
                flag = trial;
                group.push(v);
            }
        }
        if group.is_empty() {
            return Ok(None);
        }
        groups.push(group);
    }
    let cols: Vec<Vec<Scalar>> = groups.into_iter().rev().flatten().collect();
    Ok(Some(LinearMap::new(ScalarMatrix::from_columns(
        &field, &cols,
    )?)?))
}

/// `T^{-1} H(T x)`.
pub fn conjugate(h: &PolyMap, t: &LinearMap) -> Result<PolyMap> {
    compose_linear(
        &compose_linear(h, t.matrix(), Side::Right)?,
        t.inverse_matrix(),
        Side::Left,
    )
}

/// `T` with `J(T^{-1} H(T x))` strictly lower triangular, if one exists.
pub fn linear_triangularization(h: &PolyMap) -> Result<Option<LinearMap>> {
    h.require_square()?;
    let jm = jacobian(h);
    if jm.is_zero() {
        return Ok(Some(LinearMap::identity(h.field(), h.nvars())));
    }
    simultaneous_triangularization(&coefficient_matrices(&jm), h.nvars())
}

pub fn is_strictly_lower_triangular(m: &PolyMatrix) -> bool {
    (0..m.rows()).all(|i| (i..m.cols()).all(|j| m.get(i, j).is_zero()))
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Nilpotent2x2Outcome {
    /// `J_{x1,x2} H~` is strictly lower triangular.
    Triangular,
    /// `J_{x1,x2} H~ = [[a b, -b^2], [a^2, -a b]]` with `a`, `b` independent
    /// linear forms free of `x1`, `x2`.
    ConstantJacobianAb { a: Polynomial, b: Polynomial },
    /// Same shape but `J_{x1,x2}(a, b) = [[0, 1], [1, 0]]`; only possible in
    /// characteristic 3 and reported rather than normalized further.
    Char3Reject { a: Polynomial, b: Polynomial },
}

impl Nilpotent2x2Outcome {
    pub fn tag(&self) -> &'static str {
        match self {
            Nilpotent2x2Outcome::Triangular => "TRIANGULAR",
            Nilpotent2x2Outcome::ConstantJacobianAb { .. } => "CASE2_CONSTANT_JACOBIAN_AB",
            Nilpotent2x2Outcome::Char3Reject { .. } => "CASE3_CHAR3_REJECT",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Nilpotent2x2Normalization {
    /// Acts on `(x1, x2)`; the remaining variables are fixed.
    pub t: LinearMap,
    pub outcome: Nilpotent2x2Outcome,
    /// `T^{-1} H(T(x1, x2), x3, ..., xn)`.
    pub h_tilde: PolyMap,
}

fn embed_block(t: &LinearMap, n: usize) -> Result<LinearMap> {
    let rest = ScalarMatrix::identity(t.field(), n - t.dim());
    LinearMap::new(t.matrix().block_diag(&rest))
}

/// `T^{-1} H(T(x1, x2), x3, ...)` for a two-component `h` and a 2x2 `t`.
pub fn conjugate_2x2(h: &PolyMap, t: &LinearMap) -> Result<PolyMap> {
    let big = embed_block(t, h.nvars())?;
    compose_linear(
        &compose_linear(h, big.matrix(), Side::Right)?,
        t.inverse_matrix(),
        Side::Left,
    )
}

/// Normalize a cubic homogeneous two-component map whose Jacobian with
/// respect to `x1, x2` is nilpotent.
pub fn normalize_nilpotent_2x2_cubic(h: &PolyMap) -> Result<Nilpotent2x2Normalization> {
    let field = h.field().clone();
    if field.characteristic() == 2 {
        return Err(Error::UnsupportedCharacteristic(2));
    }
    if h.ncomponents() != 2 || h.nvars() < 2 {
        return Err(Error::dim(
            "expected two components in at least two variables",
        ));
    }
    if !h.is_cubic_homogeneous() {
        return Err(Error::Hypothesis("map is not cubic homogeneous".into()));
    }
    let n_mat = jacobian_wrt(h, &[0, 1]);
    let fac = factor_nilpotent_2x2(&n_mat).map_err(|e| match e {
        Error::NotNilpotent => {
            Error::Hypothesis("Jacobian with respect to x1, x2 is not nilpotent".into())
        }
        e => e,
    })?;
    if fac.triangularizable {
        let t = if n_mat.is_zero() {
            LinearMap::identity(&field, 2)
        } else {
            simultaneous_triangularization(&coefficient_matrices(&n_mat), 2)?.ok_or_else(|| {
                Error::TheoremViolation("dependent a, b but no triangularizing T".into())
            })?
        };
        let h_tilde = conjugate_2x2(h, &t)?;
        if !is_strictly_lower_triangular(&jacobian_wrt(&h_tilde, &[0, 1])) {
            return Err(Error::TheoremViolation(
                "2x2 block failed to triangularize".into(),
            ));
        }
        return Ok(Nilpotent2x2Normalization {
            t,
            outcome: Nilpotent2x2Outcome::Triangular,
            h_tilde,
        });
    }
    let c = fac
        .c
        .constant_value()
        .filter(|c| !c.is_zero())
        .ok_or_else(|| Error::TheoremViolation("factor c is not a nonzero constant".into()))?;
    let nv = h.nvars();
    let scaled = |p: &Polynomial| -> Result<Polynomial> {
        p.substitute(&[(0, Polynomial::var(&field, nv, 0).scale(&c))])
    };
    // with T = diag(c, 1): a~ = c a(c x1, ...), b~ = b(c x1, ...)
    let mut a = scaled(&fac.a)?.scale(&c);
    let mut b = scaled(&fac.b)?;
    let mut t = LinearMap::new(ScalarMatrix::from_rows(
        &field,
        vec![
            vec![c.clone(), field.zero()],
            vec![field.zero(), field.one()],
        ],
    )?)?;
    let coeff = |p: &Polynomial, v: usize| p.linear_coefficients()[v].clone();
    if !a.is_homogeneous(1) || !b.is_homogeneous(1) {
        return Err(Error::TheoremViolation("a, b are not linear forms".into()));
    }
    if !coeff(&b, 1).is_zero() || !coeff(&a, 0).is_zero() {
        return Err(Error::TheoremViolation(
            "x2 coefficient of b or x1 coefficient of a is nonzero".into(),
        ));
    }
    let (lambda, mu) = (coeff(&a, 1), coeff(&b, 0));
    let outcome = if lambda.is_zero() && mu.is_zero() {
        Nilpotent2x2Outcome::ConstantJacobianAb {
            a: a.clone(),
            b: b.clone(),
        }
    } else if field.characteristic() == 3 && lambda == mu {
        // replace H~ by lambda H~(lambda^{-1} (x1, x2), x3, ...)
        let li = lambda.inv().expect("nonzero");
        let shrink = |p: &Polynomial| {
            p.substitute(&[
                (0, Polynomial::var(&field, nv, 0).scale(&li)),
                (1, Polynomial::var(&field, nv, 1).scale(&li)),
            ])
        };
        a = shrink(&a)?;
        b = shrink(&b)?;
        let s = LinearMap::new(ScalarMatrix::from_rows(
            &field,
            vec![
                vec![li.clone(), field.zero()],
                vec![field.zero(), li.clone()],
            ],
        )?)?;
        t = t.then(&s)?;
        Nilpotent2x2Outcome::Char3Reject {
            a: a.clone(),
            b: b.clone(),
        }
    } else {
        return Err(Error::TheoremViolation(format!(
            "coefficients lambda = {lambda}, mu = {mu} fit no case"
        )));
    };
    let h_tilde = conjugate_2x2(h, &t)?;
    let expect = Nilpotent2x2Factorization {
        a,
        b,
        c: Polynomial::one(&field, nv),
        triangularizable: false,
    };
    if jacobian_wrt(&h_tilde, &[0, 1]) != expect.rebuild()? {
        return Err(Error::TheoremViolation(
            "normalized 2x2 block does not have the product form".into(),
        ));
    }
    Ok(Nilpotent2x2Normalization {
        t,
        outcome,
        h_tilde,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::Field;
    use crate::text::{parse_map, parse_polynomial};

    fn pm(rows: [[&str; 2]; 2], nvars: usize) -> PolyMatrix {
        let q = Field::rational();
        let p = |s: &str| parse_polynomial(s, &q, nvars).unwrap();
        PolyMatrix::from_rows(
            &q,
            nvars,
            rows.iter()
                .map(|r| r.iter().map(|s| p(s)).collect())
                .collect(),
        )
        .unwrap()
    }

    #[test]
    fn factor_displayed_form() {
        let n = pm([["x1*x2", "-x2^2"], ["x1^2", "-x1*x2"]], 2);
        let f = factor_nilpotent_2x2(&n).unwrap();
        assert_eq!(
            (f.a.to_string(), f.b.to_string(), f.c.to_string()),
            ("1*x1^1".into(), "1*x2^1".into(), "1".into())
        );
        assert!(!f.triangularizable);
    }

    #[test]
    fn factor_degenerate() {
        let z = factor_nilpotent_2x2(&pm([["0", "0"], ["0", "0"]], 3)).unwrap();
        assert!(z.a.is_zero() && z.b.is_zero() && z.c.is_zero() && z.triangularizable);
        let u = factor_nilpotent_2x2(&pm([["0", "-x3^2"], ["0", "0"]], 3)).unwrap();
        assert!(u.a.is_zero());
        assert_eq!(
            (u.b.to_string(), u.c.to_string()),
            ("1*x3^1".into(), "1".into())
        );
        assert!(u.triangularizable);
        assert_eq!(
            factor_nilpotent_2x2(&pm([["x1", "0"], ["0", "0"]], 1)),
            Err(Error::NotNilpotent)
        );
    }

    #[test]
    fn factor_scalar_moves_into_c() {
        let n = pm([["-6*x1*x2", "6*x2^2"], ["-6*x1^2", "6*x1*x2"]], 2);
        let f = factor_nilpotent_2x2(&n).unwrap();
        assert_eq!(f.a.to_string(), "1*x1^1");
        assert_eq!(f.c.to_string(), "-6");
    }

    #[test]
    fn case2_block() {
        let h = parse_map("H1 = x1*x3*x4 - x2*x4^2; H2 = x1*x3^2 - x2*x3*x4", None)
            .unwrap()
            .map;
        let r = normalize_nilpotent_2x2_cubic(&h).unwrap();
        let Nilpotent2x2Outcome::ConstantJacobianAb { a, b } = &r.outcome else {
            panic!("{:?}", r.outcome)
        };
        assert_eq!(
            (a.to_string(), b.to_string()),
            ("1*x3^1".into(), "1*x4^1".into())
        );
        assert!(r.t.is_identity());
    }

    #[test]
    fn case2_with_scaling() {
        // c = 2: J = 2 [[x3 x4, -x4^2], [x3^2, -x3 x4]]
        let h = parse_map(
            "H1 = 2*x1*x3*x4 - 2*x2*x4^2; H2 = 2*x1*x3^2 - 2*x2*x3*x4",
            None,
        )
        .unwrap()
        .map;
        let r = normalize_nilpotent_2x2_cubic(&h).unwrap();
        assert_eq!(r.outcome.tag(), "CASE2_CONSTANT_JACOBIAN_AB");
    }

    #[test]
    fn triangular_block() {
        let h = parse_map("H1 = x3^3; H2 = x1*x3^2", None).unwrap().map;
        let r = normalize_nilpotent_2x2_cubic(&h).unwrap();
        assert_eq!(r.outcome, Nilpotent2x2Outcome::Triangular);
        let cube = "x1^3 - 3*x1^2*x2 + 3*x1*x2^2 - x2^3";
        let h = parse_map(&format!("H1 = {cube}; H2 = {cube}"), None)
            .unwrap()
            .map;
        let r = normalize_nilpotent_2x2_cubic(&h).unwrap();
        assert_eq!(r.outcome, Nilpotent2x2Outcome::Triangular);
    }

    #[test]
    fn char3_case_is_reported() {
        let f3 = Field::prime(3).unwrap();
        let h = parse_map("H1 = 2*x1^2*x2; H2 = x1*x2^2", Some(&f3))
            .unwrap()
            .map;
        let r = normalize_nilpotent_2x2_cubic(&h).unwrap();
        let Nilpotent2x2Outcome::Char3Reject { a, b } = &r.outcome else {
            panic!("{:?}", r.outcome)
        };
        assert_eq!(
            (a.to_string(), b.to_string()),
            ("1*x2^1".into(), "1*x1^1".into())
        );
    }

    #[test]
    fn triangularization_flag() {
        let q = Field::rational();
        let h = parse_map("H1 = 0; H2 = x1^3; H3 = x1*x2^2", None)
            .unwrap()
            .map;
        let t = linear_triangularization(&h).unwrap().unwrap();
        assert!(is_strictly_lower_triangular(&jacobian(
            &conjugate(&h, &t).unwrap()
        )));
        let scramble = LinearMap::new(
            ScalarMatrix::from_i64(&q, &[vec![1, 2, 0], vec![0, 1, 3], vec![1, 0, 1]]).unwrap(),
        )
        .unwrap();
        let hs = conjugate(&h, &scramble).unwrap();
        let t = linear_triangularization(&hs).unwrap().unwrap();
        assert!(is_strictly_lower_triangular(&jacobian(
            &conjugate(&hs, &t).unwrap()
        )));
        let form2 = parse_map(
            "H1 = x1*x3*x4 - x2*x4^2; H2 = x1*x3^2 - x2*x3*x4; H3 = 0; H4 = 0",
            None,
        )
        .unwrap()
        .map;
        assert!(linear_triangularization(&form2).unwrap().is_none());
    }
}
