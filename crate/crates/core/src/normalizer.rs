//! Linear normalization of a polynomial map so that its Jacobian at a
//! standard basis vector is the block matrix `[[I_r, 0], [0, 0]]`, and the
//! computation of essential variables.

use crate::algebra::{
    compose_linear, Field, LinearMap, PolyMap, Polynomial, Scalar, ScalarMatrix, Side,
};
use crate::error::{Error, Result};
use crate::jacobian::jacobian;

/// Upper bound on evaluated candidate points in one witness search.
pub const WITNESS_SEARCH_LIMIT: usize = 1 << 18;

/// How the base point and the first column of `T` are chosen.
#[derive(Copy, Clone, Debug, PartialEq, Eq)]
pub enum WitnessMode {
    /// `JH x = 0`: `w` lies in the kernel of `JH(w)` and becomes column
    /// `r + 1` of `T`; the base point is `e_{r+1}`.
    KernelContainsX,
    /// General position: `w` becomes column 1 of `T`; the base point is `e_1`.
    General,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NormalizationResult {
    /// The field the normalization lives in (an extension of the input
    /// field when the input field was too small).
    pub field: Field,
    pub rank: usize,
    pub s: LinearMap,
    pub t: LinearMap,
    pub h_tilde: PolyMap,
    /// Index (0-based) of the standard basis vector used as base point.
    pub base_point: usize,
    pub mode: WitnessMode,
    pub witness: Vec<Scalar>,
}

/// `JH x`, the vector with entries `sum_j x_j dH_i/dx_j`.
pub fn euler_vector(h: &PolyMap) -> Vec<Polynomial> {
    let j = jacobian(h);
    let field = h.field();
    let n = h.nvars();
    (0..h.ncomponents())
        .map(|i| {
            (0..n).fold(Polynomial::zero(field, n), |acc, k| {
                &acc + &(j.get(i, k) * &Polynomial::var(field, n, k))
            })
        })
        .collect()
}

/// Coordinates `1, 2, ...` as field elements; for finite fields the
/// coordinate `c` is the element with index `c mod q`.
fn coordinate(field: &Field, c: u64) -> Scalar {
    match field.order() {
        None => field.from_u64(c),
        Some(q) => field.element_at(c as u128 % q).expect("index below order"),
    }
}

/// Deterministic sweep over points with coordinates in `{1, ..., B}` for
/// `B = 2, 4, 8, ...`, each point visited once, starting at `(1, ..., 1)`.
pub fn find_witness(h: &PolyMap, mode: WitnessMode) -> Result<Vec<Scalar>> {
    let field = h.field().clone();
    let n = h.nvars();
    let jm = jacobian(h);
    let r = jm.rank();
    let euler = euler_vector(h);
    if mode == WitnessMode::KernelContainsX && euler.iter().any(|p| !p.is_zero()) {
        return Err(Error::Hypothesis("JH x is not zero".into()));
    }
    let need_euler = mode == WitnessMode::General && euler.iter().any(|p| !p.is_zero());
    let accept = |w: &[Scalar]| -> Result<bool> {
        if jm.evaluate(w)?.rank() != r {
            return Ok(false);
        }
        if need_euler {
            for p in &euler {
                if !p.evaluate(w)?.is_zero() {
                    return Ok(true);
                }
            }
            return Ok(false);
        }
        Ok(true)
    };
    if n == 0 {
        return Ok(Vec::new());
    }
    let max_coord: u64 = match field.order() {
        Some(q) => u64::try_from(q).unwrap_or(u64::MAX),
        None => u64::MAX,
    };
    let mut visited = 0usize;
    let mut prev_b = 0u64;
    let mut b = 1u64;
    loop {
        b = (b * 2).min(max_coord);
        // points in {1..b}^n with at least one coordinate above prev_b
        let mut digits = vec![1u64; n];
        loop {
            if digits.iter().any(|&d| d > prev_b) {
                visited += 1;
                if visited > WITNESS_SEARCH_LIMIT {
                    return Err(Error::ResourceCap(format!(
                        "witness search exceeded {WITNESS_SEARCH_LIMIT} points"
                    )));
                }
                let w: Vec<Scalar> = digits.iter().map(|&d| coordinate(&field, d)).collect();
                if accept(&w)? {
                    return Ok(w);
                }
            }
            if !advance(&mut digits, b) {
                break;
            }
        }
        if b >= max_coord {
            return Err(Error::FieldTooSmall(format!(
                "no witness point over {field}"
            )));
        }
        prev_b = b;
    }
}

/// Odometer step over `{1..b}^n`, last coordinate fastest.
fn advance(digits: &mut [u64], b: u64) -> bool {
    for d in digits.iter_mut().rev() {
        if *d < b {
            *d += 1;
            return true;
        }
        *d = 1;
    }
    false
}

/// Find `S`, `T` with `S H(T x)` having Jacobian `[[I_r, 0], [0, 0]]` at a
/// standard basis vector. Over a finite field where the search fails, the
/// computation moves to `F_{p^2}` and then `F_{p^3}`.
pub fn normalize_rkform(h: &PolyMap) -> Result<NormalizationResult> {
    match normalize_over(h) {
        Err(Error::FieldTooSmall(msg)) => {
            let p = h.field().characteristic();
            let base_degree = match h.field() {
                Field::Extension(e) => e.degree(),
                _ => 1,
            };
            if p == 0 || base_degree != 1 {
                return Err(Error::FieldTooSmall(msg));
            }
            for k in [2, 3] {
                let ext = Field::extension(p, k)?;
                match normalize_over(&h.to_field(&ext)?) {
                    Err(Error::FieldTooSmall(_)) => continue,
                    other => return other,
                }
            }
            Err(Error::FieldTooSmall(format!(
                "{msg}; extensions up to degree 3 also failed"
            )))
        }
        other => other,
    }
}

fn normalize_over(h: &PolyMap) -> Result<NormalizationResult> {
    let field = h.field().clone();
    let n = h.nvars();
    let m = h.ncomponents();
    let r = jacobian(h).rank();
    let euler_zero = euler_vector(h).iter().all(Polynomial::is_zero);
    if h.is_cubic_homogeneous() && field.characteristic() != 3 {
        debug_assert_eq!(euler_zero, h.is_zero(), "JH x = 3H for cubic forms");
    }
    let mode = if euler_zero {
        WitnessMode::KernelContainsX
    } else {
        WitnessMode::General
    };
    if r == 0 {
        let out = NormalizationResult {
            field: field.clone(),
            rank: 0,
            s: LinearMap::identity(&field, m),
            t: LinearMap::identity(&field, n),
            h_tilde: h.clone(),
            base_point: 0,
            mode,
            witness: vec![field.one(); n],
        };
        return Ok(out);
    }
    let w = find_witness(h, mode)?;
    let a = jacobian(h).evaluate(&w)?;
    let kernel = a.kernel();
    let mut cols: Vec<Vec<Scalar>> = Vec::with_capacity(n);
    let base_point;
    match mode {
        WitnessMode::General => {
            // w first, then a completion, then the kernel
            let mut head = vec![w.clone()];
            head.extend(complete_columns(
                &field,
                n,
                &[vec![w.clone()], kernel.clone()].concat(),
                r - 1,
            )?);
            cols.extend(head);
            cols.extend(kernel);
            base_point = 0;
        }
        WitnessMode::KernelContainsX => {
            // kernel basis starting with w
            let mut ker = vec![w.clone()];
            for v in &kernel {
                let mut trial = ker.clone();
                trial.push(v.clone());
                if ScalarMatrix::from_columns(&field, &trial)?.rank() == trial.len() {
                    ker = trial;
                }
            }
            cols.extend(complete_columns(&field, n, &ker, r)?);
            cols.extend(ker);
            base_point = r;
        }
    }
    let t = LinearMap::new(ScalarMatrix::from_columns(&field, &cols)?)?;
    // S maps the images A v_1, ..., A v_r to e_1, ..., e_r
    let images: Vec<Vec<Scalar>> = (0..r).map(|k| a.mul_vec(&cols[k])).collect::<Result<_>>()?;
    let basis_cols = [images.clone(), complete_columns(&field, m, &images, m - r)?].concat();
    let s = LinearMap::new(ScalarMatrix::from_columns(&field, &basis_cols)?)?.inverse();
    let h_tilde = compose_linear(
        &compose_linear(h, t.matrix(), Side::Right)?,
        s.matrix(),
        Side::Left,
    )?;
    let out = NormalizationResult {
        field,
        rank: r,
        s,
        t,
        h_tilde,
        base_point,
        mode,
        witness: w,
    };
    if !out.verify(h)? {
        return Err(Error::TheoremViolation(
            "normalization failed its own verification".into(),
        ));
    }
    Ok(out)
}

/// `count` standard basis vectors extending the independent `vectors` of
/// length `n`.
fn complete_columns(
    field: &Field,
    n: usize,
    vectors: &[Vec<Scalar>],
    count: usize,
) -> Result<Vec<Vec<Scalar>>> {
    let mut have = vectors.to_vec();
    let mut out = Vec::new();
    for j in 0..n {
        if out.len() == count {
            break;
        }
        let mut e = vec![field.zero(); n];
        e[j] = field.one();
        have.push(e.clone());
        if ScalarMatrix::from_columns(field, &have)?.rank() == have.len() {
            out.push(e);
        } else {
            have.pop();
        }
    }
    if out.len() != count {
        return Err(Error::TheoremViolation("basis completion failed".into()));
    }
    Ok(out)
}

impl NormalizationResult {
    /// Checks `H~ = S H(T x)` and that the Jacobian of `H~` at the base
    /// point is the block identity of size `rank`.
    pub fn verify(&self, h: &PolyMap) -> Result<bool> {
        let h = if h.field() != &self.field {
            h.to_field(&self.field)?
        } else {
            h.clone()
        };
        let recomputed = compose_linear(
            &compose_linear(&h, self.t.matrix(), Side::Right)?,
            self.s.matrix(),
            Side::Left,
        )?;
        if recomputed != self.h_tilde || !self.s.verify() || !self.t.verify() {
            return Ok(false);
        }
        let n = h.nvars();
        let mut e = vec![self.field.zero(); n];
        if n > 0 {
            e[self.base_point] = self.field.one();
        }
        let jv = jacobian(&self.h_tilde).evaluate(&e)?;
        Ok(is_block_identity(&jv, self.rank))
    }

    /// `S^{-1} H~(T^{-1} x)`, which must reproduce the input.
    pub fn round_trip(&self) -> Result<PolyMap> {
        compose_linear(
            &compose_linear(&self.h_tilde, self.t.inverse_matrix(), Side::Right)?,
            self.s.inverse_matrix(),
            Side::Left,
        )
    }
}

fn is_block_identity(m: &ScalarMatrix, r: usize) -> bool {
    (0..m.rows()).all(|i| {
        (0..m.cols()).all(|j| {
            let v = m.get(i, j);
            if i == j && i < r {
                v.is_one()
            } else {
                v.is_zero()
            }
        })
    })
}

/// The space `N` of directions along which every component is constant,
/// and a change of variables moving it to the last coordinates.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EssentialVariables {
    pub subspace_basis: Vec<Vec<Scalar>>,
    pub essential_count: usize,
    /// Columns: a completion by standard vectors, then the basis of `N`.
    /// `H(T x)` involves only the first `essential_count` variables.
    pub t: LinearMap,
}

/// Solve `sum_j v_j dH_i/dx_j = 0` for all `i` over the coefficient field.
///
/// For forms of degree 3 this characterizes the directions `H` is invariant
/// along only when the characteristic is 0 or above 3.
pub fn essential_variables(h: &PolyMap) -> Result<EssentialVariables> {
    h.field().require_cubic_theory()?;
    let field = h.field();
    let n = h.nvars();
    let jm = jacobian(h);
    let mut row_keys = Vec::new();
    for i in 0..h.ncomponents() {
        for j in 0..n {
            for (mon, _) in jm.get(i, j).terms() {
                row_keys.push((i, mon.clone()));
            }
        }
    }
    row_keys.sort();
    row_keys.dedup();
    let mut a = ScalarMatrix::zeros(field, row_keys.len(), n);
    for (row, (i, mon)) in row_keys.iter().enumerate() {
        for j in 0..n {
            a.set(row, j, jm.get(*i, j).coefficient(mon));
        }
    }
    let basis = if row_keys.is_empty() {
        (0..n)
            .map(|j| {
                let mut e = vec![field.zero(); n];
                e[j] = field.one();
                e
            })
            .collect()
    } else {
        a.kernel()
    };
    let e = n - basis.len();
    let completion = complete_columns(field, n, &basis, e)?;
    let t = LinearMap::new(ScalarMatrix::from_columns(
        field,
        &[completion, basis.clone()].concat(),
    )?)?;
    Ok(EssentialVariables {
        subspace_basis: basis,
        essential_count: e,
        t,
    })
}

/// Whether `H(T x)` involves only the first `count` variables.
pub fn compresses_to(h: &PolyMap, t: &LinearMap, count: usize) -> Result<bool> {
    let g = compose_linear(h, t.matrix(), Side::Right)?;
    Ok(g.components()
        .iter()
        .all(|c| (count..h.nvars()).all(|v| !c.uses_var(v))))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::text::parse_map;

    fn map(text: &str) -> PolyMap {
        parse_map(text, None).unwrap().map
    }

    #[test]
    fn witness_for_veronese() {
        let h = map("H1 = x3*x1^2; H2 = x3*x1*x2; H3 = x3*x2^2");
        let w = find_witness(&h, WitnessMode::General).unwrap();
        let q = Field::rational();
        assert_eq!(w, vec![q.one(), q.one(), q.one()]);
        assert_eq!(jacobian(&h).evaluate(&w).unwrap().rank(), 2);
    }

    #[test]
    fn zero_map_normalizes_trivially() {
        let h = map("H1 = 0; H2 = 0");
        let r = normalize_rkform(&h).unwrap();
        assert_eq!(r.rank, 0);
        assert!(r.verify(&h).unwrap());
    }

    #[test]
    fn rank_two_normalization() {
        let h = map("H1 = x1^2*x2 + x3^3; H2 = x1*x2*x3 - 2*x2^3; H3 = x1^2*x2 + x3^3");
        let r = normalize_rkform(&h).unwrap();
        assert_eq!(r.rank, 2);
        assert_eq!(r.mode, WitnessMode::General);
        assert!(r.verify(&h).unwrap());
        assert_eq!(r.round_trip().unwrap(), h);
    }

    #[test]
    fn small_field_extends() {
        // over F5 with r = 2 the prime field suffices
        let f5 = Field::prime(5).unwrap();
        let h = parse_map("H1 = x1^3; H2 = x2^3", Some(&f5)).unwrap().map;
        let r = normalize_rkform(&h).unwrap();
        assert_eq!(r.field, f5);
        assert!(r.verify(&h).unwrap());
    }

    #[test]
    fn essential_counts() {
        let e = essential_variables(&map("H1 = x1^3; H2 = x1^2*x2; H3 = x2^3; vars: 4")).unwrap();
        assert_eq!(e.essential_count, 2);
        assert_eq!(e.subspace_basis.len(), 2);
        let e = essential_variables(&map("H1 = x3*x1^2; H2 = x3*x1*x2; H3 = x3*x2^2")).unwrap();
        assert_eq!(e.essential_count, 3);
        let h = map("H1 = x1^3 + 3*x1^2*x2 + 3*x1*x2^2 + x2^3");
        let e = essential_variables(&h).unwrap();
        assert_eq!(e.essential_count, 1);
        assert!(compresses_to(&h, &e.t, 1).unwrap());
    }
}
