//! Polynomial maps `K^n -> K^m` and their composition.

use std::collections::HashMap;
use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Zero};

use super::field::{Field, Scalar};
use super::linear::ScalarMatrix;
use super::monomial::{Degree, Monomial};
use super::poly::Polynomial;
use crate::error::{Error, Result};

/// An ordered list of `m` polynomials in a common set of `n` variables.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PolyMap {
    field: Field,
    nvars: usize,
    components: Vec<Polynomial>,
}

/// Which side a linear map acts on in [`compose_linear`].
#[derive(Copy, Clone, Debug, PartialEq, Eq)]
pub enum Side {
    /// `H(T x)`: substitute `x_j -> (T x)_j`.
    Right,
    /// `S H`: matrix-vector product with the components.
    Left,
}

impl PolyMap {
    pub fn new(field: &Field, nvars: usize, components: Vec<Polynomial>) -> Result<Self> {
        for c in &components {
            if c.nvars() != nvars {
                return Err(Error::dim(format!(
                    "component in {} variables, map in {nvars}",
                    c.nvars()
                )));
            }
            if c.field() != field {
                return Err(Error::FieldMismatch {
                    left: field.to_string(),
                    right: c.field().to_string(),
                });
            }
        }
        Ok(PolyMap {
            field: field.clone(),
            nvars,
            components,
        })
    }

    pub fn zero(field: &Field, nvars: usize, ncomponents: usize) -> Self {
        PolyMap {
            field: field.clone(),
            nvars,
            components: vec![Polynomial::zero(field, nvars); ncomponents],
        }
    }

    pub fn identity(field: &Field, n: usize) -> Self {
        PolyMap {
            field: field.clone(),
            nvars: n,
            components: (0..n).map(|i| Polynomial::var(field, n, i)).collect(),
        }
    }

    /// The linear map `x -> M x` as a polynomial map.
    pub fn from_matrix(m: &ScalarMatrix) -> Self {
        let field = m.field();
        PolyMap {
            field: field.clone(),
            nvars: m.cols(),
            components: (0..m.rows())
                .map(|i| Polynomial::linear_form(field, &m.row(i)))
                .collect(),
        }
    }

    pub fn field(&self) -> &Field {
        &self.field
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn ncomponents(&self) -> usize {
        self.components.len()
    }

    pub fn components(&self) -> &[Polynomial] {
        &self.components
    }

    pub fn component(&self, i: usize) -> &Polynomial {
        &self.components[i]
    }

    pub fn into_components(self) -> Vec<Polynomial> {
        self.components
    }

    pub fn is_square(&self) -> bool {
        self.nvars == self.components.len()
    }

    pub fn is_zero(&self) -> bool {
        self.components.iter().all(Polynomial::is_zero)
    }

    pub fn degree(&self) -> Degree {
        self.components
            .iter()
            .map(Polynomial::degree)
            .max()
            .unwrap_or(Degree::NegInfinity)
    }

    /// Every nonzero component is homogeneous of degree 3.
    pub fn is_cubic_homogeneous(&self) -> bool {
        self.is_homogeneous_of(3)
    }

    pub fn is_homogeneous_of(&self, d: u32) -> bool {
        self.components.iter().all(|c| c.is_homogeneous(d))
    }

    /// Common degree of the nonzero components, when there is one.
    pub fn homogeneous_degree(&self) -> Option<u32> {
        let d = self
            .components
            .iter()
            .find(|c| !c.is_zero())?
            .homogeneous_degree()?;
        self.is_homogeneous_of(d).then_some(d)
    }

    pub fn require_square(&self) -> Result<()> {
        if self.is_square() {
            Ok(())
        } else {
            Err(Error::dim(format!(
                "expected a map K^n -> K^n, got {} components in {} variables",
                self.components.len(),
                self.nvars
            )))
        }
    }

    /// `x + self` for a square map.
    pub fn plus_identity(&self) -> Result<PolyMap> {
        self.require_square()?;
        self.zip_with(&PolyMap::identity(&self.field, self.nvars), |h, x| x + h)
    }

    /// `self - x` for a square map.
    pub fn minus_identity(&self) -> Result<PolyMap> {
        self.require_square()?;
        self.zip_with(&PolyMap::identity(&self.field, self.nvars), |f, x| f - x)
    }

    pub fn add(&self, other: &PolyMap) -> Result<PolyMap> {
        self.zip_with(other, |a, b| a + b)
    }

    pub fn sub(&self, other: &PolyMap) -> Result<PolyMap> {
        self.zip_with(other, |a, b| a - b)
    }

    pub fn scale(&self, c: &Scalar) -> PolyMap {
        self.map_components(|p| p.scale(c))
    }

    fn zip_with(
        &self,
        other: &PolyMap,
        f: impl Fn(&Polynomial, &Polynomial) -> Polynomial,
    ) -> Result<PolyMap> {
        if self.nvars != other.nvars || self.ncomponents() != other.ncomponents() {
            return Err(Error::dim("maps of different shapes"));
        }
        if self.field != other.field {
            return Err(Error::FieldMismatch {
                left: self.field.to_string(),
                right: other.field.to_string(),
            });
        }
        Ok(PolyMap {
            field: self.field.clone(),
            nvars: self.nvars,
            components: self
                .components
                .iter()
                .zip(&other.components)
                .map(|(a, b)| f(a, b))
                .collect(),
        })
    }

    pub fn map_components(&self, f: impl Fn(&Polynomial) -> Polynomial) -> PolyMap {
        let components: Vec<Polynomial> = self.components.iter().map(f).collect();
        let nvars = components.first().map_or(self.nvars, Polynomial::nvars);
        PolyMap {
            field: self.field.clone(),
            nvars,
            components,
        }
    }

    pub fn truncate(&self, max_degree: u32) -> PolyMap {
        self.map_components(|p| p.truncate(max_degree))
    }

    /// Embed into `nvars` variables (new variables at the end) and append
    /// identity components so the map stays square: `(F, x_{n+1}, ...)`.
    pub fn extend_identity(&self, nvars: usize) -> Result<PolyMap> {
        self.require_square()?;
        if nvars < self.nvars {
            return Err(Error::dim("cannot shrink a map"));
        }
        let mut components: Vec<Polynomial> =
            self.components.iter().map(|c| c.embed(nvars, 0)).collect();
        for i in self.nvars..nvars {
            components.push(Polynomial::var(&self.field, nvars, i));
        }
        Ok(PolyMap {
            field: self.field.clone(),
            nvars,
            components,
        })
    }

    /// Embed the components into `nvars` variables without adding any.
    pub fn embed_vars(&self, nvars: usize) -> PolyMap {
        PolyMap {
            field: self.field.clone(),
            nvars,
            components: self.components.iter().map(|c| c.embed(nvars, 0)).collect(),
        }
    }

    /// Image under a coefficient-field embedding.
    pub fn to_field(&self, field: &Field) -> Result<PolyMap> {
        Ok(PolyMap {
            field: field.clone(),
            nvars: self.nvars,
            components: self
                .components
                .iter()
                .map(|c| c.to_field(field))
                .collect::<Result<_>>()?,
        })
    }

    pub fn evaluate(&self, point: &[Scalar]) -> Result<Vec<Scalar>> {
        self.components.iter().map(|c| c.evaluate(point)).collect()
    }

    /// `self(G)` with terms above `max_degree` discarded throughout.
    pub fn compose_truncated(&self, g: &PolyMap, max_degree: u32) -> Result<PolyMap> {
        self.check_composable(g)?;
        Ok(compose_shared(self, g, Some(max_degree)))
    }

    fn check_composable(&self, g: &PolyMap) -> Result<()> {
        if self.nvars != g.ncomponents() {
            return Err(Error::dim(format!(
                "cannot compose a map in {} variables with a map of {} components",
                self.nvars,
                g.ncomponents()
            )));
        }
        if self.field != g.field {
            return Err(Error::FieldMismatch {
                left: self.field.to_string(),
                right: g.field.to_string(),
            });
        }
        Ok(())
    }
}

/// `F(G)`, componentwise substitution.
pub fn compose_maps(f: &PolyMap, g: &PolyMap) -> Result<PolyMap> {
    f.check_composable(g)?;
    Ok(compose_shared(f, g, None))
}

/// Substitution with the images of monomials cached across components.
fn compose_shared(f: &PolyMap, g: &PolyMap, cap: Option<u32>) -> PolyMap {
    if f.field.characteristic() == 0 {
        return compose_rational(f, g, cap);
    }
    let mut memo: HashMap<Monomial, Polynomial> = HashMap::new();
    let components = f
        .components
        .iter()
        .map(|c| {
            let mut out = Polynomial::zero(&f.field, g.nvars);
            for (m, coeff) in c.terms() {
                let image = monomial_image(m, g, cap, &mut memo);
                out = &out + &image.scale(coeff);
            }
            out
        })
        .collect();
    PolyMap {
        field: f.field.clone(),
        nvars: g.nvars,
        components,
    }
}

type IntTerms = HashMap<Monomial, BigInt>;

fn rational(c: &Scalar) -> &BigRational {
    c.as_rational().expect("rational coefficient")
}

fn int_mul(a: &IntTerms, b: &IntTerms, cap: Option<u32>) -> IntTerms {
    let mut out = IntTerms::with_capacity(a.len() * b.len() / 2 + 1);
    for (m, x) in a {
        for (n, y) in b {
            if cap.is_none_or(|d| m.degree() + n.degree() <= d) {
                *out.entry(m.mul(n)).or_default() += x * y;
            }
        }
    }
    out.retain(|_, c| !c.is_zero());
    out
}

/// Composition over Q carried out over Z: with `G = G' / d` for integral
/// `G'`, a monomial `m` maps to `m(G') / d^deg(m)`.
fn compose_rational(f: &PolyMap, g: &PolyMap, cap: Option<u32>) -> PolyMap {
    let d = g
        .components
        .iter()
        .flat_map(|c| c.terms())
        .fold(BigInt::one(), |acc, (_, c)| acc.lcm(rational(c).denom()));
    let images: Vec<IntTerms> = g
        .components
        .iter()
        .map(|c| {
            c.terms()
                .map(|(m, x)| {
                    let r = rational(x);
                    (m.clone(), r.numer() * &d / r.denom())
                })
                .collect()
        })
        .collect();
    let mut memo: HashMap<Monomial, IntTerms> = HashMap::new();
    let components = f
        .components
        .iter()
        .map(|c| {
            let top = c.terms().map(|(m, _)| m.degree()).max().unwrap_or(0);
            let l = c
                .terms()
                .fold(BigInt::one(), |acc, (_, x)| acc.lcm(rational(x).denom()));
            let mut acc = IntTerms::new();
            for (m, x) in c.terms() {
                let r = rational(x);
                let scale = r.numer() * &l / r.denom() * d.pow(top - m.degree());
                for (n, y) in int_image(m, g.nvars, &images, cap, &mut memo) {
                    *acc.entry(n.clone()).or_default() += &scale * y;
                }
            }
            let den = l * d.pow(top);
            Polynomial::from_terms(
                &f.field,
                g.nvars,
                acc.into_iter()
                    .filter(|(_, x)| !x.is_zero())
                    .map(|(m, x)| (m, Scalar::Rational(BigRational::new(x, den.clone())))),
            )
        })
        .collect();
    PolyMap {
        field: f.field.clone(),
        nvars: g.nvars,
        components,
    }
}

fn int_image<'a>(
    m: &Monomial,
    nvars: usize,
    images: &[IntTerms],
    cap: Option<u32>,
    memo: &'a mut HashMap<Monomial, IntTerms>,
) -> &'a IntTerms {
    if !memo.contains_key(m) {
        let p = match (0..m.nvars()).rev().find(|&i| m.exponent(i) > 0) {
            None => IntTerms::from([(Monomial::one(nvars), BigInt::one())]),
            Some(i) => {
                let prev = int_image(
                    &m.with_exponent(i, m.exponent(i) - 1),
                    nvars,
                    images,
                    cap,
                    memo,
                );
                int_mul(prev, &images[i], cap)
            }
        };
        memo.insert(m.clone(), p);
    }
    &memo[m]
}

fn monomial_image(
    m: &Monomial,
    g: &PolyMap,
    cap: Option<u32>,
    memo: &mut HashMap<Monomial, Polynomial>,
) -> Polynomial {
    if let Some(p) = memo.get(m) {
        return p.clone();
    }
    let Some(i) = (0..m.nvars()).rev().find(|&i| m.exponent(i) > 0) else {
        return Polynomial::one(&g.field, g.nvars);
    };
    let prev = monomial_image(&m.with_exponent(i, m.exponent(i) - 1), g, cap, memo);
    let p = match cap {
        Some(d) => prev.mul_truncated(&g.components[i], d),
        None => &prev * &g.components[i],
    };
    memo.insert(m.clone(), p.clone());
    p
}

/// `H(M x)` for `Side::Right`, `M H` for `Side::Left`.
pub fn compose_linear(h: &PolyMap, m: &ScalarMatrix, side: Side) -> Result<PolyMap> {
    if m.field() != h.field() {
        return Err(Error::FieldMismatch {
            left: h.field.to_string(),
            right: m.field().to_string(),
        });
    }
    match side {
        Side::Right => {
            if m.rows() != h.nvars {
                return Err(Error::dim(format!(
                    "{}x{} matrix acting on {} variables",
                    m.rows(),
                    m.cols(),
                    h.nvars
                )));
            }
            compose_maps(h, &PolyMap::from_matrix(m))
        }
        Side::Left => {
            if m.cols() != h.ncomponents() {
                return Err(Error::dim(format!(
                    "{}x{} matrix acting on {} components",
                    m.rows(),
                    m.cols(),
                    h.ncomponents()
                )));
            }
            let components = (0..m.rows())
                .map(|i| {
                    let mut acc = Polynomial::zero(&h.field, h.nvars);
                    for (j, c) in h.components.iter().enumerate() {
                        let s = m.get(i, j);
                        if !s.is_zero() {
                            acc = &acc + &c.scale(s);
                        }
                    }
                    acc
                })
                .collect();
            Ok(PolyMap {
                field: h.field.clone(),
                nvars: h.nvars,
                components,
            })
        }
    }
}

/// One component per line, `H<i> = ...` (1-based).
impl fmt::Display for PolyMap {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, c) in self.components.iter().enumerate() {
            if i > 0 {
                writeln!(f)?;
            }
            write!(f, "H{} = {}", i + 1, c)?;
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

    fn mono(e: &[u32]) -> Polynomial {
        Polynomial::monomial(&q(), q().one(), e.to_vec())
    }

    #[test]
    fn identity_substitution() {
        let h = PolyMap::new(&q(), 2, vec![mono(&[2, 1])]).unwrap();
        let id = ScalarMatrix::identity(&q(), 2);
        assert_eq!(compose_linear(&h, &id, Side::Right).unwrap(), h);
    }

    #[test]
    fn permutation_substitution() {
        let h = PolyMap::new(&q(), 2, vec![mono(&[2, 1])]).unwrap();
        let swap = ScalarMatrix::from_i64(&q(), &[vec![0, 1], vec![1, 0]]).unwrap();
        let g = compose_linear(&h, &swap, Side::Right).unwrap();
        assert_eq!(g.component(0), &mono(&[1, 2]));
    }

    #[test]
    fn row_scaling() {
        let h = PolyMap::new(&q(), 2, vec![mono(&[2, 1]), mono(&[0, 3])]).unwrap();
        let s = ScalarMatrix::from_i64(&q(), &[vec![5, 0], vec![0, 1]]).unwrap();
        let g = compose_linear(&h, &s, Side::Left).unwrap();
        assert_eq!(g.component(0), &mono(&[2, 1]).scale(&q().from_u64(5)));
        assert_eq!(g.component(1), h.component(1));
    }

    #[test]
    fn exceptional_map_inverse_is_x_minus_h() {
        // H = (x4 w, x3 w, 0, 0) with w = x3 x1 - x4 x2
        let w = &mono(&[1, 0, 1, 0]) - &mono(&[0, 1, 0, 1]);
        let h = PolyMap::new(
            &q(),
            4,
            vec![
                &mono(&[0, 0, 0, 1]) * &w,
                &mono(&[0, 0, 1, 0]) * &w,
                Polynomial::zero(&q(), 4),
                Polynomial::zero(&q(), 4),
            ],
        )
        .unwrap();
        let f = h.plus_identity().unwrap();
        let g = PolyMap::identity(&q(), 4).sub(&h).unwrap();
        assert_eq!(compose_maps(&f, &g).unwrap(), PolyMap::identity(&q(), 4));
        assert_eq!(compose_maps(&g, &f).unwrap(), PolyMap::identity(&q(), 4));
    }

    #[test]
    fn shape_errors() {
        let h = PolyMap::new(&q(), 2, vec![mono(&[2, 1])]).unwrap();
        assert!(compose_maps(&h, &h).is_err());
        let t3 = ScalarMatrix::identity(&q(), 3);
        assert!(compose_linear(&h, &t3, Side::Right).is_err());
    }
}
