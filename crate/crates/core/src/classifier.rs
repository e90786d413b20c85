//! Classification of cubic homogeneous maps whose Jacobian has rank at most
//! two into three linear-equivalence types:
//!
//! 1. all but the first `r` components can be made zero;
//! 2. the map can be written in two variables;
//! 3. the components span `K x3 x1^2 + K x3 x1 x2 + K x3 x2^2` after a change
//!    of variables.

use std::fmt;

use serde::Serialize;

use crate::algebra::gcd::gcd_all;
use crate::algebra::univariate::roots;
use crate::algebra::{
    compose_linear, LinearMap, Monomial, PolyMap, Polynomial, Scalar, ScalarMatrix, Side,
};
use crate::error::{Error, Result};
use crate::jacobian::jacobian_rank;
use crate::normalizer::essential_variables;

#[derive(Copy, Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub enum CaseTag {
    #[serde(rename = "CASE1_ZERO_TAIL")]
    ZeroTail,
    #[serde(rename = "CASE2_TWO_VARIABLES")]
    TwoVariables,
    #[serde(rename = "CASE3_X3_QUADRIC")]
    X3Quadric,
}

impl fmt::Display for CaseTag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            CaseTag::ZeroTail => "CASE1_ZERO_TAIL",
            CaseTag::TwoVariables => "CASE2_TWO_VARIABLES",
            CaseTag::X3Quadric => "CASE3_X3_QUADRIC",
        })
    }
}

/// `H_i = c_i f` for a single form `f`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Rank1Form {
    pub common_form: Polynomial,
    pub coefficients: Vec<Scalar>,
}

/// For Jacobian rank at most one the components are pairwise linearly
/// dependent; returns the common form (the first nonzero component scaled to
/// leading coefficient one) or `None` when the rank exceeds one.
pub fn pairwise_dependence_rank1(h: &PolyMap) -> Result<Option<Rank1Form>> {
    h.field().require_cubic_theory()?;
    if jacobian_rank(h) > 1 {
        return Ok(None);
    }
    let field = h.field();
    let Some(first) = h.components().iter().find(|c| !c.is_zero()) else {
        return Ok(Some(Rank1Form {
            common_form: Polynomial::zero(field, h.nvars()),
            coefficients: vec![field.zero(); h.ncomponents()],
        }));
    };
    let f = first.monic();
    let (lm, _) = f.leading_term().expect("nonzero");
    let mut coefficients = Vec::new();
    for c in h.components() {
        let k = c.coefficient(lm);
        if &f.scale(&k) != c {
            return Err(Error::TheoremViolation(
                "rank one map with linearly independent components".into(),
            ));
        }
        coefficients.push(k);
    }
    Ok(Some(Rank1Form {
        common_form: f,
        coefficients,
    }))
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ClassificationReport {
    pub case_tag: CaseTag,
    pub rank: usize,
    pub s: LinearMap,
    pub t: LinearMap,
    pub h_tilde: PolyMap,
    pub span_dim: usize,
    pub essential_count: usize,
    /// Every case whose defining property holds; more than one entry means
    /// the selected tag was decided by priority.
    pub cases_holding: Vec<CaseTag>,
    /// The common linear factor in case 3, in the original variables.
    pub linear_factor: Option<Polynomial>,
}

/// Coefficient matrix of the components over the cubic monomials that occur
/// (columns in descending monomial order).
fn coefficient_matrix(h: &PolyMap) -> (ScalarMatrix, Vec<Monomial>) {
    let mut mons: Vec<Monomial> = h
        .components()
        .iter()
        .flat_map(|c| c.terms().map(|(m, _)| m.clone()))
        .collect();
    mons.sort();
    mons.dedup();
    mons.reverse();
    let mut a = ScalarMatrix::zeros(h.field(), h.ncomponents(), mons.len());
    for (i, c) in h.components().iter().enumerate() {
        for (j, m) in mons.iter().enumerate() {
            a.set(i, j, c.coefficient(m));
        }
    }
    (a, mons)
}

/// Dimension of the linear span of the components.
pub fn span_dimension(h: &PolyMap) -> usize {
    coefficient_matrix(h).0.rank()
}

/// Invertible `S` putting the components in reduced echelon form: the first
/// `span_dim` components of `S H` are a basis of the span, the rest zero.
fn echelon_s(h: &PolyMap) -> Result<LinearMap> {
    let (a, _) = coefficient_matrix(h);
    if a.cols() == 0 {
        return Ok(LinearMap::identity(h.field(), h.ncomponents()));
    }
    LinearMap::new(a.echelon().transform)
}

fn apply(h: &PolyMap, s: &LinearMap, t: &LinearMap) -> Result<PolyMap> {
    compose_linear(
        &compose_linear(h, t.matrix(), Side::Right)?,
        s.matrix(),
        Side::Left,
    )
}

/// Decide the case for a cubic homogeneous `h` with Jacobian rank at most two.
pub fn classify_rank_le2(h: &PolyMap) -> Result<ClassificationReport> {
    let field = h.field().clone();
    field.require_cubic_theory()?;
    if !h.is_cubic_homogeneous() {
        return Err(Error::Hypothesis("map is not cubic homogeneous".into()));
    }
    let r = jacobian_rank(h);
    if r > 2 {
        return Err(Error::RankTooLarge(r));
    }
    let m = h.ncomponents();
    let n = h.nvars();
    let d0 = span_dimension(h);
    let ess = essential_variables(h)?;
    let e = ess.essential_count;
    let mut holding = Vec::new();
    if d0 <= r {
        holding.push(CaseTag::ZeroTail);
    }
    if r == 2 && e <= 2 {
        holding.push(CaseTag::TwoVariables);
    }
    let square = m == n;
    let report = if d0 <= r {
        let s = echelon_s(h)?;
        let t = if square {
            s.inverse()
        } else {
            LinearMap::identity(&field, n)
        };
        ClassificationReport {
            case_tag: CaseTag::ZeroTail,
            rank: r,
            h_tilde: apply(h, &s, &t)?,
            s,
            t,
            span_dim: d0,
            essential_count: e,
            cases_holding: holding,
            linear_factor: None,
        }
    } else if e <= 2 {
        let t = ess.t.clone();
        let s = if square {
            t.inverse()
        } else {
            echelon_s(&compose_linear(h, t.matrix(), Side::Right)?)?
        };
        ClassificationReport {
            case_tag: CaseTag::TwoVariables,
            rank: r,
            h_tilde: apply(h, &s, &t)?,
            s,
            t,
            span_dim: d0,
            essential_count: e,
            cases_holding: holding,
            linear_factor: None,
        }
    } else {
        let (t, factor) = x3_quadric_transform(h, &ess.t, e, d0)?;
        holding.push(CaseTag::X3Quadric);
        let s = if square {
            t.inverse()
        } else {
            echelon_s(&compose_linear(h, t.matrix(), Side::Right)?)?
        };
        ClassificationReport {
            case_tag: CaseTag::X3Quadric,
            rank: r,
            h_tilde: apply(h, &s, &t)?,
            s,
            t,
            span_dim: d0,
            essential_count: e,
            cases_holding: holding,
            linear_factor: Some(factor),
        }
    };
    if !report.verify(h)? {
        return Err(Error::TheoremViolation(format!(
            "{} predicate failed on the normalized map",
            report.case_tag
        )));
    }
    Ok(report)
}

/// Case 3: returns `T` with `H(T x)` spanning the three `x3`-quadric
/// monomials, plus the common linear factor.
fn x3_quadric_transform(
    h: &PolyMap,
    t_ess: &LinearMap,
    e: usize,
    d0: usize,
) -> Result<(LinearMap, Polynomial)> {
    let fail = |why: &str| {
        Err(Error::TheoremViolation(format!(
            "rank 2 map fits no case (essential variables {e}, span dimension {d0}): {why}"
        )))
    };
    if e != 3 || d0 != 3 {
        return fail("case 3 needs three essential variables and a 3-dimensional span");
    }
    let field = h.field().clone();
    let n = h.nvars();
    let g = compose_linear(h, t_ess.matrix(), Side::Right)?;
    let (a, mons) = coefficient_matrix(&g);
    let ech = a.echelon();
    let basis: Vec<Polynomial> = (0..d0)
        .map(|i| Polynomial::from_terms(&field, n, mons.iter().cloned().zip(ech.reduced.row(i))))
        .collect();
    let Some(l) = extract_common_linear_factor(&basis)? else {
        return fail("no common linear factor");
    };
    let quotients: Vec<Polynomial> = basis
        .iter()
        .map(|b| b.div_exact(&l).expect("factor divides"))
        .collect();
    // W is spanned by the first partials of the quotients
    let mut partials = Vec::new();
    for q in &quotients {
        for j in 0..n {
            partials.push(q.derivative(j)?.linear_coefficients());
        }
    }
    let w_ech = ScalarMatrix::from_rows(&field, partials)?.echelon();
    if w_ech.pivots.len() != 2 {
        return fail("quotients are not quadrics in two linear forms");
    }
    let w: Vec<Polynomial> = (0..2)
        .map(|i| Polynomial::linear_form(&field, &w_ech.reduced.row(i)))
        .collect();
    let sym2 = [&w[0] * &w[0], &w[0] * &w[1], &w[1] * &w[1]];
    let quad_basis = Monomial::all_of_degree(n, 2);
    let rows: Vec<Vec<Scalar>> = sym2
        .iter()
        .chain(quotients.iter())
        .map(|p| p.coordinates(&quad_basis).expect("quadratic"))
        .collect();
    if ScalarMatrix::from_rows(&field, rows)?.rank() != 3 {
        return fail("quotients do not span the symmetric square");
    }
    let mut lin_rows = vec![
        w[0].linear_coefficients(),
        w[1].linear_coefficients(),
        l.linear_coefficients(),
    ];
    if ScalarMatrix::from_rows(&field, lin_rows.clone())?.rank() != 3 {
        return fail("the common factor lies in the span of the quadric variables");
    }
    for j in 3..n {
        let mut ej = vec![field.zero(); n];
        ej[j] = field.one();
        lin_rows.push(ej);
    }
    let a = LinearMap::new(ScalarMatrix::from_rows(&field, lin_rows)?)?;
    // substituting x -> A^{-1} x sends w1, w2, L to x1, x2, x3
    let t = t_ess.then(&a.inverse())?;
    let factor = compose_linear(
        &PolyMap::new(&field, n, vec![l])?,
        t_ess.inverse_matrix(),
        Side::Right,
    )?
    .into_components()
    .remove(0);
    Ok((t, factor))
}

impl ClassificationReport {
    /// Checks `H~ = S H(T x)`, the case predicate on `H~`, and `S T = I`
    /// for square maps.
    pub fn verify(&self, h: &PolyMap) -> Result<bool> {
        if apply(h, &self.s, &self.t)? != self.h_tilde {
            return Ok(false);
        }
        if h.is_square() && !self.s.matrix().mul(self.t.matrix())?.is_identity() {
            return Ok(false);
        }
        if self.round_trip()? != *h {
            return Ok(false);
        }
        Ok(case_predicate(self.case_tag, &self.h_tilde, self.rank))
    }

    /// `S^{-1} H~(T^{-1} x)`.
    pub fn round_trip(&self) -> Result<PolyMap> {
        compose_linear(
            &compose_linear(&self.h_tilde, self.t.inverse_matrix(), Side::Right)?,
            self.s.inverse_matrix(),
            Side::Left,
        )
    }

    pub fn is_overlapping(&self) -> bool {
        self.cases_holding.len() > 1
    }
}

/// Syntactic check of a case's defining property on a normalized map.
pub fn case_predicate(tag: CaseTag, h_tilde: &PolyMap, r: usize) -> bool {
    match tag {
        CaseTag::ZeroTail => h_tilde.components().iter().skip(r).all(Polynomial::is_zero),
        CaseTag::TwoVariables => {
            r == 2
                && h_tilde
                    .components()
                    .iter()
                    .all(|c| (2..h_tilde.nvars()).all(|v| !c.uses_var(v)))
        }
        CaseTag::X3Quadric => {
            let n = h_tilde.nvars();
            if r != 2 || n < 3 {
                return false;
            }
            let field = h_tilde.field();
            let mut target = Vec::new();
            for e in [[2, 0, 1], [1, 1, 1], [0, 2, 1]] {
                let mut v = e.to_vec();
                v.resize(n, 0);
                target.push(Monomial::new(v));
            }
            let coords: Option<Vec<Vec<Scalar>>> = h_tilde
                .components()
                .iter()
                .map(|c| c.coordinates(&target))
                .collect();
            match coords {
                Some(rows) if !rows.is_empty() => ScalarMatrix::from_rows(field, rows)
                    .map(|m| m.rank() == 3)
                    .unwrap_or(false),
                _ => false,
            }
        }
    }
}

/// A linear form dividing every polynomial in `basis`, or `None`.
///
/// The GCD of the basis is computed first; a linear GCD is the answer, and
/// for a GCD of higher degree its linear factors are searched for.
pub fn extract_common_linear_factor(basis: &[Polynomial]) -> Result<Option<Polynomial>> {
    let Some(g) = gcd_all(basis.iter()) else {
        return Ok(None);
    };
    match g.degree().finite() {
        None | Some(0) => Ok(None),
        Some(1) if g.is_homogeneous(1) => Ok(Some(g)),
        _ => Ok(linear_factors(&g)?.into_iter().next()),
    }
}

/// Linear forms `x_k + sum_{j>k} c_j x_j` dividing a homogeneous `g`.
///
/// Candidate coefficients come from the roots of the restrictions of `g` to
/// coordinate planes `(x_k, x_j)`, confirmed by exact division. A plane on
/// which `g` vanishes gives no candidates, so factors are only found when
/// every such restriction is nonzero.
pub fn linear_factors(g: &Polynomial) -> Result<Vec<Polynomial>> {
    let field = g.field().clone();
    let n = g.nvars();
    let Some(d) = g.homogeneous_degree() else {
        return Ok(Vec::new());
    };
    if d == 0 {
        return Ok(Vec::new());
    }
    let used: Vec<usize> = (0..n).filter(|&v| g.uses_var(v)).collect();
    let mut found: Vec<Polynomial> = Vec::new();
    'lead: for (pos, &k) in used.iter().enumerate() {
        let mut choices: Vec<(usize, Vec<Scalar>)> = Vec::new();
        for &j in &used[pos + 1..] {
            let mut u = vec![field.zero(); d as usize + 1];
            let mut any = false;
            for (mon, c) in g.terms() {
                let ex = mon.exponents();
                if ex
                    .iter()
                    .enumerate()
                    .all(|(v, &x)| v == k || v == j || x == 0)
                {
                    u[ex[k] as usize] = c.clone();
                    any = true;
                }
            }
            if !any {
                continue 'lead;
            }
            // x_k + c x_j divides the restriction iff u(-c) = 0
            let mut cs: Vec<Scalar> = roots(&u, &field)?.iter().map(|t| -t).collect();
            if !cs.iter().any(Scalar::is_zero) {
                cs.push(field.zero());
            }
            choices.push((j, cs));
        }
        let mut idx = vec![0usize; choices.len()];
        loop {
            let mut coeffs = vec![field.zero(); n];
            coeffs[k] = field.one();
            for (c, (j, cs)) in choices.iter().enumerate() {
                coeffs[*j] = cs[idx[c]].clone();
            }
            let l = Polynomial::linear_form(&field, &coeffs);
            if g.div_exact(&l).is_some() && !found.contains(&l) {
                found.push(l);
            }
            let mut c = choices.len();
            loop {
                if c == 0 {
                    break;
                }
                c -= 1;
                idx[c] += 1;
                if idx[c] < choices[c].1.len() {
                    break;
                }
                idx[c] = 0;
                if c == 0 {
                    c = usize::MAX;
                    break;
                }
            }
            if c == usize::MAX || choices.is_empty() {
                break;
            }
        }
    }
    Ok(found)
}

/// Classification input check used by generators and the CLI: the field and
/// degree hypotheses, without computing anything else.
pub fn check_input(h: &PolyMap) -> Result<()> {
    h.field().require_cubic_theory()?;
    if !h.is_cubic_homogeneous() {
        return Err(Error::Hypothesis("map is not cubic homogeneous".into()));
    }
    Ok(())
}
