//! Exact inversion of Keller maps by fixed-point iteration.

use crate::algebra::{compose_maps, Degree, PolyMap, Polynomial};
use crate::error::{Error, Result};

use super::normal_form::{is_keller, keller_part, parameter_count};

/// `(g, params)`: `g` padded with the identity on the parameter variables so
/// that it can be substituted into maps over all variables.
fn with_parameters(g: &PolyMap) -> Result<PolyMap> {
    let n = g.ncomponents();
    let mut comps = g.components().to_vec();
    for j in n..g.nvars() {
        comps.push(Polynomial::var(g.field(), g.nvars(), j));
    }
    PolyMap::new(g.field(), g.nvars(), comps)
}

/// Default truncation degree `(deg F)^(n - 1)`.
pub fn default_degree_bound(f: &PolyMap) -> u32 {
    let d = match f.degree() {
        Degree::Finite(d) => d.max(1),
        Degree::NegInfinity => 1,
    };
    let n = f.ncomponents().max(1) as u32;
    d.saturating_pow(n - 1)
}

/// `F o G = x` for maps with trailing parameter variables.
pub fn compose_with_parameters(f: &PolyMap, g: &PolyMap) -> Result<PolyMap> {
    let c = compose_maps(f, &with_parameters(g)?)?;
    PolyMap::new(c.field(), c.nvars(), c.components().to_vec())
}

/// The inverse of a Keller map `F = x + H`, from `G <- x - H(G)` truncated
/// above `degree_bound` and iterated until two successive iterates agree.
///
/// Trailing variables beyond the number of components are inert parameters.
/// The result is returned only after `F o G = G o F = x` is checked exactly.
pub fn invert_keller(f: &PolyMap, degree_bound: Option<u32>) -> Result<PolyMap> {
    if !is_keller(f)? {
        return Err(Error::Hypothesis("F is not a Keller map".into()));
    }
    let p = parameter_count(f)?;
    let n = f.ncomponents();
    let field = f.field().clone();
    let h = keller_part(f)?;
    let bound = degree_bound
        .unwrap_or_else(|| default_degree_bound(f))
        .max(1);
    let ord = h
        .components()
        .iter()
        .flat_map(|c| c.terms().map(|(m, _)| m.degree()))
        .min()
        .unwrap_or(2);
    if ord < 2 && !h.is_zero() {
        return Err(Error::Hypothesis(
            "F - x has linear or constant terms; only x + (terms of degree >= 2) is supported"
                .into(),
        ));
    }
    // every iteration fixes at least ord - 1 more degrees
    let step = ord.saturating_sub(1).max(1);
    let cap = bound.div_ceil(step) as usize + 2;
    let x = PolyMap::identity(&field, n + p);
    let x_n = PolyMap::new(&field, n + p, x.components()[..n].to_vec())?;
    let mut g = x_n.clone();
    let mut stable = false;
    for _ in 0..cap {
        let hg = h.compose_truncated(&with_parameters(&g)?, bound)?;
        let next = x_n.sub(&hg)?;
        if next == g {
            stable = true;
            break;
        }
        g = next;
    }
    if !stable {
        return Err(Error::ResourceCap(format!(
            "fixed-point iteration did not stabilize below degree {bound}"
        )));
    }
    if compose_with_parameters(f, &g)? != x_n || compose_with_parameters(&g, f)? != x_n {
        return Err(Error::TheoremViolation(format!(
            "no polynomial inverse of degree at most {bound}"
        )));
    }
    Ok(g)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::text::parse_map;

    fn f(s: &str) -> PolyMap {
        parse_map(s, None).unwrap().f().unwrap()
    }

    #[test]
    fn elementary_inverse() {
        let g = invert_keller(&f("F1 = x1 + x2^3; F2 = x2"), None).unwrap();
        assert_eq!(g, f("F1 = x1 - x2^3; F2 = x2"));
    }

    #[test]
    fn form_ii_inverse_is_x_minus_h() {
        let h = parse_map(
            "H1 = x4*x3*x1 - x4^2*x2; H2 = x3^2*x1 - x3*x4*x2; H3 = 0; H4 = 0",
            None,
        )
        .unwrap()
        .map;
        let g = invert_keller(&h.plus_identity().unwrap(), None).unwrap();
        assert_eq!(
            g,
            h.minus_identity().unwrap().scale(&h.field().from_i64(-1))
        );
    }

    #[test]
    fn triangular_inverse_has_higher_degree() {
        let g = invert_keller(&f("F1 = x1; F2 = x2 + x1^3; F3 = x3 + x1*x2^2"), None).unwrap();
        assert_eq!(g.degree(), Degree::Finite(7));
    }

    #[test]
    fn parametric_inverse() {
        // x + t H over Q[t], t = x5
        let full = parse_map(
            "F1 = x1 + x5*x4*x3*x1 - x5*x4^2*x2\nF2 = x2 + x5*x3^2*x1 - x5*x3*x4*x2\nF5 = x5",
            None,
        )
        .unwrap()
        .map;
        let fm = PolyMap::new(full.field(), 5, full.components()[..4].to_vec()).unwrap();
        let g = invert_keller(&fm, None).unwrap();
        assert_eq!(g.ncomponents(), 4);
        assert_eq!(
            g.component(0).to_string(),
            "-1*x1^1*x3^1*x4^1*x5^1 + 1*x2^1*x4^2*x5^1 + 1*x1^1"
        );
    }

    #[test]
    fn not_keller() {
        assert!(matches!(
            invert_keller(&f("F1 = x1 + x1^3; F2 = x2"), None),
            Err(Error::Hypothesis(_))
        ));
    }
}
