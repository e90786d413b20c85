//! Keller detection and the normal forms of cubic homogeneous Keller maps
//! with Jacobian rank at most two.

use crate::algebra::{LinearMap, PolyMap, PolyMatrix, Polynomial, ScalarMatrix};
use crate::classifier::{classify_rank_le2, CaseTag};
use crate::error::{Error, Result};
use crate::jacobian::{jacobian, jacobian_wrt};

use super::nilpotent::{
    conjugate, is_strictly_lower_triangular, linear_triangularization,
    normalize_nilpotent_2x2_cubic, Nilpotent2x2Outcome,
};

/// Number of trailing inert parameter variables of `f`: a map with `m`
/// components in `m + p` variables is a map in `x_1..x_m` over the
/// coefficient ring extended by the last `p` variables.
pub fn parameter_count(f: &PolyMap) -> Result<usize> {
    f.nvars()
        .checked_sub(f.ncomponents())
        .ok_or_else(|| Error::dim("more components than variables"))
}

/// `f - x` over the first `ncomponents` variables.
pub fn keller_part(f: &PolyMap) -> Result<PolyMap> {
    parameter_count(f)?;
    let x = PolyMap::identity(f.field(), f.nvars());
    let comps = f
        .components()
        .iter()
        .zip(x.components())
        .map(|(c, xi)| c - xi)
        .collect();
    PolyMap::new(f.field(), f.nvars(), comps)
}

/// Jacobian with respect to the non-parameter variables.
pub fn jacobian_x(h: &PolyMap) -> PolyMatrix {
    let vars: Vec<usize> = (0..h.ncomponents()).collect();
    jacobian_wrt(h, &vars)
}

/// Whether `F = x + H` has Jacobian determinant a nonzero constant.
///
/// For `H` homogeneous of degree at least 2 this is decided by nilpotency of
/// `JH`, otherwise by computing the determinant.
pub fn is_keller(f: &PolyMap) -> Result<bool> {
    let h = keller_part(f)?;
    let jh = jacobian_x(&h);
    if h.homogeneous_degree().is_some_and(|d| d >= 2) {
        return Ok(jh.nilpotency_index()?.is_some());
    }
    let jf = jacobian_x(f);
    Ok(jf
        .determinant()?
        .constant_value()
        .is_some_and(|c| !c.is_zero()))
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, Hash)]
pub enum KellerVariant {
    FormIRank1,
    Triangularizable,
    FormIIExceptional,
}

impl KellerVariant {
    pub fn tag(&self) -> &'static str {
        match self {
            KellerVariant::FormIRank1 => "FORM_I_RANK1",
            KellerVariant::Triangularizable => "TRIANGULARIZABLE",
            KellerVariant::FormIIExceptional => "FORM_II_EXCEPTIONAL",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct KellerNormalForm {
    pub variant: KellerVariant,
    pub t: LinearMap,
    /// `T^{-1} H(T x)`.
    pub h_tilde: PolyMap,
    /// In form II, `H~` minus the `x1 x3 x4 - x2 x4^2`, `x1 x3^2 - x2 x3 x4`
    /// parts; zero otherwise.
    pub residual: PolyMap,
}

/// The leading parts of form II in `n` variables.
pub fn form_ii_core(h: &PolyMap) -> PolyMap {
    let field = h.field();
    let n = h.nvars();
    let x = |i: usize| Polynomial::var(field, n, i);
    let w = &(&x(0) * &x(2)) - &(&x(1) * &x(3));
    let mut comps = vec![&x(3) * &w, &x(2) * &w];
    comps.resize(n, Polynomial::zero(field, n));
    PolyMap::new(field, n, comps).expect("square")
}

impl KellerNormalForm {
    /// Checks `H~ = T^{-1} H(T x)` and the invariants of the variant.
    pub fn verify(&self, h: &PolyMap) -> Result<bool> {
        if conjugate(h, &self.t)? != self.h_tilde || !self.t.verify() {
            return Ok(false);
        }
        let ht = &self.h_tilde;
        let n = ht.nvars();
        Ok(match self.variant {
            KellerVariant::FormIRank1 => {
                !ht.component(0).uses_var(0) && ht.components()[1..].iter().all(Polynomial::is_zero)
            }
            KellerVariant::Triangularizable => is_strictly_lower_triangular(&jacobian(ht)),
            KellerVariant::FormIIExceptional => {
                if n < 4 || ht.sub(&form_ii_core(ht))? != self.residual {
                    return Ok(false);
                }
                let tail_ok = self
                    .residual
                    .components()
                    .iter()
                    .take(2)
                    .all(|r| !r.uses_var(0) && !r.uses_var(1))
                    && self.residual.components()[2..]
                        .iter()
                        .all(Polynomial::is_zero);
                let jm = jacobian(ht);
                tail_ok && jm.rank() == 2 && jm.nilpotency_index()?.is_some_and(|k| k <= 3)
            }
        })
    }
}

/// Normal form of a cubic homogeneous `H` with `JH` nilpotent and rank at
/// most two.
pub fn keller_normal_form(h: &PolyMap) -> Result<KellerNormalForm> {
    let field = h.field().clone();
    field.require_cubic_theory()?;
    h.require_square()?;
    if !h.is_cubic_homogeneous() {
        return Err(Error::Hypothesis("map is not cubic homogeneous".into()));
    }
    let n = h.nvars();
    let jm = jacobian(h);
    if jm.nilpotency_index()?.is_none() {
        return Err(Error::Hypothesis(
            "JH is not nilpotent, so x + H is not Keller".into(),
        ));
    }
    let rank = jm.rank();
    if rank > 2 {
        return Err(Error::RankTooLarge(rank));
    }
    let zero = PolyMap::zero(&field, n, n);
    let id = LinearMap::identity(&field, n);
    // inputs already in normal form keep T = I
    for variant in [
        KellerVariant::FormIRank1,
        KellerVariant::Triangularizable,
        KellerVariant::FormIIExceptional,
    ] {
        if (variant == KellerVariant::FormIRank1) != (rank <= 1) {
            continue;
        }
        let residual = match variant {
            KellerVariant::FormIIExceptional if n >= 4 => h.sub(&form_ii_core(h))?,
            _ => zero.clone(),
        };
        let nf = KellerNormalForm {
            variant,
            t: id.clone(),
            h_tilde: h.clone(),
            residual,
        };
        if nf.verify(h)? {
            return Ok(nf);
        }
    }
    let nf = match rank {
        0 => KellerNormalForm {
            variant: KellerVariant::FormIRank1,
            t: LinearMap::identity(&field, n),
            h_tilde: h.clone(),
            residual: zero,
        },
        1 => {
            let c = classify_rank_le2(h)?;
            if c.case_tag != CaseTag::ZeroTail {
                return Err(Error::TheoremViolation(format!(
                    "rank one map classified as {}",
                    c.case_tag
                )));
            }
            KellerNormalForm {
                variant: KellerVariant::FormIRank1,
                h_tilde: conjugate(h, &c.t)?,
                t: c.t,
                residual: zero,
            }
        }
        _ => match linear_triangularization(h)? {
            Some(t) => KellerNormalForm {
                variant: KellerVariant::Triangularizable,
                h_tilde: conjugate(h, &t)?,
                t,
                residual: zero,
            },
            None => form_ii(h)?,
        },
    };
    if !nf.verify(h)? {
        return Err(Error::TheoremViolation(format!(
            "{} invariants failed on the normalized map",
            nf.variant.tag()
        )));
    }
    Ok(nf)
}

fn form_ii(h: &PolyMap) -> Result<KellerNormalForm> {
    let field = h.field().clone();
    let n = h.nvars();
    let c = classify_rank_le2(h)?;
    if c.case_tag != CaseTag::ZeroTail {
        return Err(Error::TheoremViolation(format!(
            "non-triangularizable rank 2 Keller map classified as {}",
            c.case_tag
        )));
    }
    let t1 = c.t;
    let h1 = conjugate(h, &t1)?;
    let block = PolyMap::new(&field, n, h1.components()[..2].to_vec())?;
    let norm = normalize_nilpotent_2x2_cubic(&block)?;
    let Nilpotent2x2Outcome::ConstantJacobianAb { a, b } = norm.outcome else {
        return Err(Error::TheoremViolation(format!(
            "2x2 block of a non-triangularizable map normalized to {}",
            norm.outcome.tag()
        )));
    };
    let t2 = LinearMap::new(
        norm.t
            .matrix()
            .block_diag(&ScalarMatrix::identity(&field, n - 2)),
    )?;
    // rows e1, e2, a, b and a completion: substituting P^{-1} x sends a, b
    // to x3, x4
    let mut rows = vec![
        unit(&field, n, 0),
        unit(&field, n, 1),
        a.linear_coefficients(),
        b.linear_coefficients(),
    ];
    for j in 2..n {
        if rows.len() == n {
            break;
        }
        let mut trial = rows.clone();
        trial.push(unit(&field, n, j));
        if ScalarMatrix::from_rows(&field, trial.clone())?.rank() == trial.len() {
            rows = trial;
        }
    }
    let p = LinearMap::new(ScalarMatrix::from_rows(&field, rows)?)?;
    let t = t1.then(&t2)?.then(&p.inverse())?;
    let h_tilde = conjugate(h, &t)?;
    let residual = h_tilde.sub(&form_ii_core(&h_tilde))?;
    Ok(KellerNormalForm {
        variant: KellerVariant::FormIIExceptional,
        t,
        h_tilde,
        residual,
    })
}

fn unit(field: &crate::algebra::Field, n: usize, j: usize) -> Vec<crate::algebra::Scalar> {
    let mut v = vec![field.zero(); n];
    v[j] = field.one();
    v
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::Field;
    use crate::text::parse_map;

    fn map(s: &str) -> PolyMap {
        parse_map(s, None).unwrap().map
    }

    const FORM_II: &str = "H1 = x4*x3*x1 - x4^2*x2; H2 = x3^2*x1 - x3*x4*x2; H3 = 0; H4 = 0";

    #[test]
    fn keller_detection() {
        let x = |s: &str| map(s).plus_identity().unwrap();
        assert!(is_keller(&x("H1 = x2^3; H2 = 0")).unwrap());
        assert!(!is_keller(&x("H1 = x1^3; H2 = 0")).unwrap());
        assert!(is_keller(&x(FORM_II)).unwrap());
        // not homogeneous: x + (x2^2 + x2^3, 0)
        assert!(is_keller(&x("H1 = x2^2 + x2^3; H2 = 0")).unwrap());
        assert!(!is_keller(&x("H1 = x1^2 + x2^3; H2 = 0")).unwrap());
    }

    #[test]
    fn form_i() {
        let nf = keller_normal_form(&map("H1 = x2^3; H2 = 0; H3 = 0")).unwrap();
        assert_eq!(nf.variant, KellerVariant::FormIRank1);
        assert!(nf.t.is_identity());
    }

    #[test]
    fn form_ii_representative() {
        let nf = keller_normal_form(&map(FORM_II)).unwrap();
        assert_eq!(nf.variant, KellerVariant::FormIIExceptional);
        assert!(nf.t.is_identity());
        assert!(nf.residual.is_zero());
    }

    #[test]
    fn form_ii_scrambled() {
        let q = Field::rational();
        let h = map(FORM_II);
        let s = LinearMap::new(
            ScalarMatrix::from_i64(
                &q,
                &[
                    vec![1, 2, 0, -1],
                    vec![0, 1, 3, 0],
                    vec![2, 0, 1, 1],
                    vec![0, -1, 0, 1],
                ],
            )
            .unwrap(),
        )
        .unwrap();
        let hs = conjugate(&h, &s).unwrap();
        let nf = keller_normal_form(&hs).unwrap();
        assert_eq!(nf.variant, KellerVariant::FormIIExceptional);
        assert!(nf.verify(&hs).unwrap());
    }

    #[test]
    fn triangularizable() {
        let nf = keller_normal_form(&map("H1 = 0; H2 = x1^3; H3 = x1*x2^2")).unwrap();
        assert_eq!(nf.variant, KellerVariant::Triangularizable);
    }

    #[test]
    fn rejects_non_keller() {
        assert!(matches!(
            keller_normal_form(&map("H1 = x1^3; H2 = 0")),
            Err(Error::Hypothesis(_))
        ));
    }
}
