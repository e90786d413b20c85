//! Decomposition of Keller maps in normal form into elementary maps.

use crate::algebra::{compose_maps, Field, LinearMap, PolyMap, Polynomial, Scalar};
use crate::error::{Error, Result};

use super::derivation::Derivation;
use super::normal_form::{keller_normal_form, keller_part, parameter_count};

/// `(x_1, ..., c x_i + a, ..., x_N)` with `a` free of `x_i`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ElementaryStep {
    pub index: usize,
    pub scale: Scalar,
    pub shift: Polynomial,
}

impl ElementaryStep {
    pub fn new(index: usize, scale: Scalar, shift: Polynomial) -> Result<Self> {
        if scale.is_zero() {
            return Err(Error::Hypothesis("elementary step with zero scale".into()));
        }
        if index >= shift.nvars() || shift.uses_var(index) {
            return Err(Error::Hypothesis(format!(
                "shift of an elementary step on x{} involves x{}",
                index + 1,
                index + 1
            )));
        }
        Ok(ElementaryStep {
            index,
            scale,
            shift,
        })
    }

    fn shift_only(index: usize, shift: Polynomial) -> Result<Self> {
        let one = shift.field().one();
        Self::new(index, one, shift)
    }

    pub fn to_map(&self) -> PolyMap {
        let field = self.shift.field();
        let n = self.shift.nvars();
        let mut comps = PolyMap::identity(field, n).into_components();
        comps[self.index] = &comps[self.index].scale(&self.scale) + &self.shift;
        PolyMap::new(field, n, comps).expect("square")
    }

    /// Variables the step reads or writes, 0-based and sorted.
    pub fn touched_vars(&self) -> Vec<usize> {
        let mut v: Vec<usize> = (0..self.shift.nvars())
            .filter(|&j| j == self.index || self.shift.uses_var(j))
            .collect();
        v.dedup();
        v
    }
}

/// Composition of the steps, the first step applied first.
pub fn recompose(field: &Field, nvars: usize, steps: &[ElementaryStep]) -> Result<PolyMap> {
    let mut acc = PolyMap::identity(field, nvars);
    for s in steps {
        acc = compose_maps(&s.to_map(), &acc)?;
    }
    Ok(acc)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TameDecomposition {
    pub steps: Vec<ElementaryStep>,
    /// Variables of the ambient ring, including an added variable.
    pub nvars: usize,
    /// Index of the variable appended to the ring, if any.
    pub extra_variable: Option<usize>,
    /// Variable borrowed as scratch space by the exponential factorization.
    pub spare_variable: Option<usize>,
}

/// Elementary steps composing to `x -> M x` on the first `M.dim()` of
/// `nvars` variables, by Gauss-Jordan elimination without row swaps.
pub fn linear_steps(m: &LinearMap, nvars: usize) -> Result<Vec<ElementaryStep>> {
    let field = m.field().clone();
    let n = m.dim();
    let mut a = m.matrix().to_rows();
    let x = |j: usize| Polynomial::var(&field, nvars, j);
    // inverse operations, in the order they are recorded
    let mut inv_ops: Vec<ElementaryStep> = Vec::new();
    let add_row = |a: &mut Vec<Vec<Scalar>>, i: usize, j: usize, l: &Scalar| {
        for k in 0..n {
            let v = &a[i][k] + &(l * &a[j][k]);
            a[i][k] = v;
        }
    };
    for k in 0..n {
        if a[k][k].is_zero() {
            let r = (k + 1..n)
                .find(|&r| !a[r][k].is_zero())
                .ok_or_else(|| Error::Hypothesis("singular linear map".into()))?;
            add_row(&mut a, k, r, &field.one());
            inv_ops.push(ElementaryStep::shift_only(k, -&x(r))?);
        }
        let p = a[k][k].clone();
        let pinv = p.inv().expect("nonzero pivot");
        for c in 0..n {
            a[k][c] = &a[k][c] * &pinv;
        }
        inv_ops.push(ElementaryStep::new(k, p, Polynomial::zero(&field, nvars))?);
        for r in 0..n {
            if r != k && !a[r][k].is_zero() {
                let l = -&a[r][k];
                add_row(&mut a, r, k, &l);
                inv_ops.push(ElementaryStep::shift_only(r, x(k).scale(&-&l))?);
            }
        }
    }
    // M = E_1^{-1} ... E_k^{-1}, so E_k^{-1} is applied first
    inv_ops.reverse();
    inv_ops.retain(|s| !(s.scale.is_one() && s.shift.is_zero()));
    Ok(inv_ops)
}

/// Steps for `x + h` when `J_x h` is strictly triangular (either way).
fn triangular_steps(h: &PolyMap, n: usize) -> Result<Option<Vec<ElementaryStep>>> {
    let lower = (0..n).all(|i| (i..n).all(|j| !h.component(i).uses_var(j)));
    let upper = (0..n).all(|i| (0..=i).all(|j| !h.component(i).uses_var(j)));
    let order: Vec<usize> = if lower {
        (0..n).rev().collect()
    } else if upper {
        (0..n).collect()
    } else {
        return Ok(None);
    };
    let mut steps = Vec::new();
    for i in order {
        if !h.component(i).is_zero() {
            steps.push(ElementaryStep::shift_only(i, h.component(i).clone())?);
        }
    }
    Ok(Some(steps))
}

/// Recognizes `h = (x4 w + r1, x3 w + r2, 0, ...)` with `r1, r2` free of
/// `x1, x2` and `w` in the kernel of `D = x4 d/dx1 + x3 d/dx2`, so that
/// `x + h = (x + r) o exp(w D)`.
fn exponential_pattern(h: &PolyMap, n: usize) -> Option<(Polynomial, Polynomial, Polynomial)> {
    if n < 4 || h.components()[2..n].iter().any(|c| !c.is_zero()) {
        return None;
    }
    let field = h.field();
    let nv = h.nvars();
    let zero = Polynomial::zero(field, nv);
    let kill = |p: &Polynomial| p.substitute(&[(0, zero.clone()), (1, zero.clone())]).ok();
    let (h1, h2) = (h.component(0), h.component(1));
    let (r1, r2) = (kill(h1)?, kill(h2)?);
    let x = |j: usize| Polynomial::var(field, nv, j);
    let w = (h1 - &r1).div_exact(&x(3))?;
    if w.is_zero() || (h2 - &r2) != (&x(2) * &w) {
        return None;
    }
    let d = Derivation::new(field, nv, vec![x(3), x(2)]).ok()?;
    d.apply(&w).is_zero().then_some((w, r1, r2))
}

/// Steps for `(exp(w D), z)` conjugated by the shift `z -> z + w`, then the
/// residual shifts.
fn exponential_steps(
    w: &Polynomial,
    r1: &Polynomial,
    r2: &Polynomial,
    z: usize,
) -> Result<Vec<ElementaryStep>> {
    let field = w.field();
    let nv = w.nvars();
    let x = |j: usize| Polynomial::var(field, nv, j);
    let zx4 = &x(z) * &x(3);
    let zx3 = &x(z) * &x(2);
    let mut steps = vec![
        ElementaryStep::shift_only(z, w.clone())?,
        ElementaryStep::shift_only(0, zx4.clone())?,
        ElementaryStep::shift_only(1, zx3.clone())?,
        ElementaryStep::shift_only(z, -w)?,
        ElementaryStep::shift_only(0, -&zx4)?,
        ElementaryStep::shift_only(1, -&zx3)?,
    ];
    if !r1.is_zero() {
        steps.push(ElementaryStep::shift_only(0, r1.clone())?);
    }
    if !r2.is_zero() {
        steps.push(ElementaryStep::shift_only(1, r2.clone())?);
    }
    Ok(steps)
}

/// `f` as a square map on `nvars` variables: its components, then the
/// identity on the parameters and any appended variable.
fn as_square(f: &PolyMap, nvars: usize) -> Result<PolyMap> {
    let field = f.field();
    let mut comps: Vec<Polynomial> = f.components().iter().map(|c| c.embed(nvars, 0)).collect();
    for j in f.ncomponents()..nvars {
        comps.push(Polynomial::var(field, nvars, j));
    }
    PolyMap::new(field, nvars, comps)
}

/// Elementary steps composing to `F = x + H`.
///
/// `H` strictly triangular (form I included) gives one step per nonzero
/// component. `H` of the form `(x4 w + r1, x3 w + r2, 0, ...)` is factored as
/// `exp(w D)` followed by the residual shifts, using a variable `z` that `F`
/// fixes and `w` omits: `z += w`, `x1 += z x4`, `x2 += z x3`, `z -= w`,
/// `x1 -= z x4`, `x2 -= z x3`. Without such a variable (form II in dimension
/// four) a variable is appended when `allow_extra_variable` is set and the
/// case is reported open otherwise. Any other cubic homogeneous Keller map
/// without parameters is first brought to normal form and the linear change
/// of variables is decomposed as well.
pub fn tame_decompose(f: &PolyMap, allow_extra_variable: bool) -> Result<TameDecomposition> {
    let field = f.field().clone();
    let p = parameter_count(f)?;
    let n = f.ncomponents();
    let nv = f.nvars();
    let h = keller_part(f)?;
    let mut out = TameDecomposition {
        steps: Vec::new(),
        nvars: nv,
        extra_variable: None,
        spare_variable: None,
    };
    if let Some(steps) = triangular_steps(&h, n)? {
        out.steps = steps;
    } else if let Some((w, r1, r2)) = exponential_pattern(&h, n) {
        decompose_exponential(&mut out, &w, &r1, &r2, n, allow_extra_variable)?;
    } else if p == 0 && h.is_cubic_homogeneous() {
        let nf = keller_normal_form(&h)?;
        let inner = nf.h_tilde.plus_identity()?;
        let inner_dec = tame_decompose(&inner, allow_extra_variable)?;
        let total = inner_dec.nvars;
        let mut steps = linear_steps(&nf.t.inverse(), total)?;
        steps.extend(inner_dec.steps);
        steps.extend(linear_steps(&nf.t, total)?);
        out = TameDecomposition { steps, ..inner_dec };
    } else {
        return Err(Error::Hypothesis(
            "F - x is neither triangular, of exponential form, nor a cubic homogeneous Keller map"
                .into(),
        ));
    }
    if recompose(&field, out.nvars, &out.steps)? != as_square(f, out.nvars)? {
        return Err(Error::TheoremViolation(
            "elementary steps do not recompose to F".into(),
        ));
    }
    Ok(out)
}

fn decompose_exponential(
    out: &mut TameDecomposition,
    w: &Polynomial,
    r1: &Polynomial,
    r2: &Polynomial,
    n: usize,
    allow_extra_variable: bool,
) -> Result<()> {
    let nv = out.nvars;
    let spare = (4..n).find(|&z| !w.uses_var(z));
    let (z, total) = match spare {
        Some(z) => {
            out.spare_variable = Some(z);
            (z, nv)
        }
        None if allow_extra_variable => {
            out.extra_variable = Some(nv);
            (nv, nv + 1)
        }
        None => {
            return Err(Error::OpenCase(format!(
                "form II in dimension {n} has no spare variable; tameness without an extra \
                 variable is open in dimension 4 (pass --extra-variable for the stable version)"
            )))
        }
    };
    let up = |p: &Polynomial| p.embed(total, 0);
    out.steps = exponential_steps(&up(w), &up(r1), &up(r2), z)?;
    out.nvars = total;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::ScalarMatrix;
    use crate::text::parse_map;

    const FORM_II: &str = "H1 = x4*x3*x1 - x4^2*x2; H2 = x3^2*x1 - x3*x4*x2";

    fn f(s: &str, vars: usize) -> PolyMap {
        parse_map(&format!("vars: {vars}\n{s}\nH{vars} = 0"), None)
            .unwrap()
            .map
            .plus_identity()
            .unwrap()
    }

    #[test]
    fn identity_is_empty() {
        let d = tame_decompose(&PolyMap::identity(&Field::rational(), 3), false).unwrap();
        assert!(d.steps.is_empty());
    }

    #[test]
    fn form_i_single_step() {
        let d = tame_decompose(&f("H1 = x2^3", 3), false).unwrap();
        assert_eq!(d.steps.len(), 1);
        assert_eq!(d.steps[0].index, 0);
    }

    #[test]
    fn form_ii_dimension_five_uses_spare() {
        let fm = f(FORM_II, 5);
        let d = tame_decompose(&fm, false).unwrap();
        assert_eq!(d.spare_variable, Some(4));
        assert_eq!(d.nvars, 5);
        assert!(d.steps.len() >= 4);
        assert_eq!(recompose(&Field::rational(), 5, &d.steps).unwrap(), fm);
    }

    #[test]
    fn form_ii_dimension_four() {
        let fm = f(FORM_II, 4);
        assert!(matches!(
            tame_decompose(&fm, false),
            Err(Error::OpenCase(_))
        ));
        let d = tame_decompose(&fm, true).unwrap();
        assert_eq!((d.extra_variable, d.nvars), (Some(4), 5));
        let r = recompose(&Field::rational(), 5, &d.steps).unwrap();
        assert_eq!(r.components()[..4], fm.embed_vars(5).components()[..4]);
    }

    #[test]
    fn linear_steps_recompose() {
        let q = Field::rational();
        let m = LinearMap::new(
            ScalarMatrix::from_i64(&q, &[vec![0, 2, 1], vec![1, 0, 0], vec![3, 1, -1]]).unwrap(),
        )
        .unwrap();
        let steps = linear_steps(&m, 3).unwrap();
        assert_eq!(
            recompose(&q, 3, &steps).unwrap(),
            PolyMap::from_matrix(m.matrix())
        );
    }

    #[test]
    fn scrambled_form_ii() {
        let q = Field::rational();
        let h = parse_map(&format!("{FORM_II}; H5 = 0"), None).unwrap().map;
        let s = LinearMap::new(
            ScalarMatrix::from_i64(
                &q,
                &[
                    vec![1, 1, 0, 0, 0],
                    vec![0, 1, 0, 2, 0],
                    vec![0, 0, 1, 0, 1],
                    vec![1, 0, 0, 1, 0],
                    vec![0, 0, 0, 0, 1],
                ],
            )
            .unwrap(),
        )
        .unwrap();
        let fm = super::super::conjugate(&h, &s)
            .unwrap()
            .plus_identity()
            .unwrap();
        let d = tame_decompose(&fm, false).unwrap();
        assert_eq!(recompose(&q, 5, &d.steps).unwrap(), fm);
    }
}
