//! Sparse multivariate polynomials over a [`Field`].

use std::collections::btree_map::Entry;
use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Zero};

use super::field::{Field, Scalar};
use super::monomial::{Degree, Monomial};
use crate::error::{Error, Result};

/// A polynomial in `nvars` variables. Terms are kept in a map ordered by the
/// graded-lex monomial order; zero coefficients are never stored.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Polynomial {
    field: Field,
    nvars: usize,
    terms: BTreeMap<Monomial, Scalar>,
}

/// Operation selector for [`poly_arith`].
#[derive(Copy, Clone, Debug, PartialEq, Eq)]
pub enum ArithOp {
    Add,
    Sub,
    Mul,
}

/// Checked binary arithmetic: fails on mismatched variable count or field.
pub fn poly_arith(a: &Polynomial, b: &Polynomial, op: ArithOp) -> Result<Polynomial> {
    a.check_compatible(b)?;
    Ok(match op {
        ArithOp::Add => a + b,
        ArithOp::Sub => a - b,
        ArithOp::Mul => a * b,
    })
}

impl Polynomial {
    pub fn zero(field: &Field, nvars: usize) -> Self {
        Polynomial {
            field: field.clone(),
            nvars,
            terms: BTreeMap::new(),
        }
    }

    pub fn constant(field: &Field, nvars: usize, c: Scalar) -> Self {
        Self::from_terms(field, nvars, [(Monomial::one(nvars), c)])
    }

    pub fn one(field: &Field, nvars: usize) -> Self {
        Self::constant(field, nvars, field.one())
    }

    /// The variable `x_{index+1}` (indices are 0-based).
    pub fn var(field: &Field, nvars: usize, index: usize) -> Self {
        Self::from_terms(field, nvars, [(Monomial::var(nvars, index), field.one())])
    }

    pub fn monomial(field: &Field, coeff: Scalar, exponents: Vec<u32>) -> Self {
        let nvars = exponents.len();
        Self::from_terms(field, nvars, [(Monomial::new(exponents), coeff)])
    }

    /// Builds a polynomial summing like terms and dropping zeros.
    pub fn from_terms(
        field: &Field,
        nvars: usize,
        terms: impl IntoIterator<Item = (Monomial, Scalar)>,
    ) -> Self {
        let mut p = Polynomial::zero(field, nvars);
        for (m, c) in terms {
            assert_eq!(m.nvars(), nvars, "monomial arity");
            p.add_term(m, c);
        }
        p
    }

    /// Linear form `sum coeffs[j] * x_{j+1}`.
    pub fn linear_form(field: &Field, coeffs: &[Scalar]) -> Self {
        let n = coeffs.len();
        Self::from_terms(
            field,
            n,
            coeffs
                .iter()
                .enumerate()
                .map(|(j, c)| (Monomial::var(n, j), c.clone())),
        )
    }

    fn add_term(&mut self, m: Monomial, c: Scalar) {
        if c.is_zero() {
            return;
        }
        match self.terms.entry(m) {
            Entry::Vacant(v) => {
                v.insert(c);
            }
            Entry::Occupied(mut o) => {
                let s = o.get() + &c;
                if s.is_zero() {
                    o.remove();
                } else {
                    *o.get_mut() = s;
                }
            }
        }
    }

    pub fn field(&self) -> &Field {
        &self.field
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn nterms(&self) -> usize {
        self.terms.len()
    }

    /// Terms in ascending monomial order.
    pub fn terms(&self) -> impl DoubleEndedIterator<Item = (&Monomial, &Scalar)> {
        self.terms.iter()
    }

    pub fn coefficient(&self, m: &Monomial) -> Scalar {
        self.terms
            .get(m)
            .cloned()
            .unwrap_or_else(|| self.field.zero())
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_constant(&self) -> bool {
        self.terms.keys().all(Monomial::is_one)
    }

    /// Constant value, if the polynomial is constant.
    pub fn constant_value(&self) -> Option<Scalar> {
        if self.is_zero() {
            return Some(self.field.zero());
        }
        if self.is_constant() {
            return self.terms.values().next().cloned();
        }
        None
    }

    pub fn leading_term(&self) -> Option<(&Monomial, &Scalar)> {
        self.terms.iter().next_back()
    }

    pub fn leading_coefficient(&self) -> Option<&Scalar> {
        self.leading_term().map(|(_, c)| c)
    }

    pub fn degree(&self) -> Degree {
        self.terms
            .keys()
            .map(Monomial::degree)
            .max()
            .map_or(Degree::NegInfinity, Degree::Finite)
    }

    pub fn degree_in(&self, var: usize) -> Degree {
        self.terms
            .keys()
            .map(|m| m.exponent(var))
            .max()
            .map_or(Degree::NegInfinity, Degree::Finite)
    }

    /// True when every term has total degree `d` (the zero polynomial is
    /// homogeneous of every degree).
    pub fn is_homogeneous(&self, d: u32) -> bool {
        self.terms.keys().all(|m| m.degree() == d)
    }

    /// Common degree of all terms, `None` for zero or inhomogeneous input.
    pub fn homogeneous_degree(&self) -> Option<u32> {
        let d = self.terms.keys().next()?.degree();
        self.is_homogeneous(d).then_some(d)
    }

    pub fn uses_var(&self, var: usize) -> bool {
        self.terms.keys().any(|m| m.exponent(var) > 0)
    }

    /// Whether the polynomial only involves variables in `vars`.
    pub fn only_uses(&self, vars: &[usize]) -> bool {
        (0..self.nvars).all(|v| vars.contains(&v) || !self.uses_var(v))
    }

    pub(crate) fn check_compatible(&self, other: &Polynomial) -> Result<()> {
        if self.field != other.field {
            return Err(Error::FieldMismatch {
                left: self.field.to_string(),
                right: other.field.to_string(),
            });
        }
        if self.nvars != other.nvars {
            return Err(Error::dim(format!(
                "{} vs {} variables",
                self.nvars, other.nvars
            )));
        }
        Ok(())
    }

    pub fn scale(&self, c: &Scalar) -> Polynomial {
        if c.is_zero() {
            return Polynomial::zero(&self.field, self.nvars);
        }
        Polynomial {
            field: self.field.clone(),
            nvars: self.nvars,
            terms: self
                .terms
                .iter()
                .map(|(m, a)| (m.clone(), a * c))
                .filter(|(_, a)| !a.is_zero())
                .collect(),
        }
    }

    pub fn mul_term(&self, m: &Monomial, c: &Scalar) -> Polynomial {
        Polynomial {
            field: self.field.clone(),
            nvars: self.nvars,
            terms: self
                .terms
                .iter()
                .map(|(n, a)| (n.mul(m), a * c))
                .filter(|(_, a)| !a.is_zero())
                .collect(),
        }
    }

    /// Product with all terms of total degree above `max_degree` dropped.
    pub fn mul_truncated(&self, other: &Polynomial, max_degree: u32) -> Polynomial {
        self.product(other, Some(max_degree))
    }

    fn product(&self, other: &Polynomial, cap: Option<u32>) -> Polynomial {
        let keep = |m: &Monomial, n: &Monomial| cap.is_none_or(|d| m.degree() + n.degree() <= d);
        if self.field.characteristic() == 0 {
            // multiply over Z after clearing denominators; one reduction per term
            let (da, ia) = integer_terms(self);
            let (db, ib) = integer_terms(other);
            let mut acc: HashMap<Monomial, BigInt> = HashMap::new();
            for (m, a) in &ia {
                for (n, b) in &ib {
                    if keep(m, n) {
                        *acc.entry(m.mul(n)).or_default() += a * b;
                    }
                }
            }
            let den = da * db;
            let terms = acc
                .into_iter()
                .filter(|(_, c)| !c.is_zero())
                .map(|(m, c)| (m, Scalar::Rational(BigRational::new(c, den.clone()))))
                .collect();
            return Polynomial {
                field: self.field.clone(),
                nvars: self.nvars,
                terms,
            };
        }
        let mut out = Polynomial::zero(&self.field, self.nvars);
        for (m, a) in &self.terms {
            for (n, b) in &other.terms {
                if keep(m, n) {
                    out.add_term(m.mul(n), a * b);
                }
            }
        }
        out
    }

    pub fn truncate(&self, max_degree: u32) -> Polynomial {
        Polynomial {
            field: self.field.clone(),
            nvars: self.nvars,
            terms: self
                .terms
                .iter()
                .filter(|(m, _)| m.degree() <= max_degree)
                .map(|(m, c)| (m.clone(), c.clone()))
                .collect(),
        }
    }

    pub fn pow(&self, e: u32) -> Polynomial {
        let mut acc = Polynomial::one(&self.field, self.nvars);
        for _ in 0..e {
            acc = &acc * self;
        }
        acc
    }

    /// Scale so the leading coefficient is one. Zero stays zero.
    pub fn monic(&self) -> Polynomial {
        match self.leading_coefficient() {
            Some(c) if !c.is_one() => self.scale(&c.inv().expect("nonzero")),
            _ => self.clone(),
        }
    }

    /// Formal partial derivative with respect to `x_{var+1}`.
    pub fn derivative(&self, var: usize) -> Result<Polynomial> {
        if var >= self.nvars {
            return Err(Error::VariableOutOfRange {
                index: var,
                nvars: self.nvars,
            });
        }
        let mut out = Polynomial::zero(&self.field, self.nvars);
        for (m, c) in &self.terms {
            let e = m.exponent(var);
            if e == 0 {
                continue;
            }
            let coeff = c * &self.field.from_u64(e as u64);
            out.add_term(m.with_exponent(var, e - 1), coeff);
        }
        Ok(out)
    }

    pub fn evaluate(&self, point: &[Scalar]) -> Result<Scalar> {
        if point.len() != self.nvars {
            return Err(Error::dim(format!(
                "point of length {} for {} variables",
                point.len(),
                self.nvars
            )));
        }
        for s in point {
            if s.field() != self.field {
                return Err(Error::FieldMismatch {
                    left: self.field.to_string(),
                    right: s.field().to_string(),
                });
            }
        }
        let mut acc = self.field.zero();
        for (m, c) in &self.terms {
            let mut t = c.clone();
            for (x, &e) in point.iter().zip(m.exponents()) {
                if e > 0 {
                    t = &t * &x.pow(e as u64);
                }
            }
            acc = &acc + &t;
        }
        Ok(acc)
    }

    /// Simultaneous substitution `x_i -> images[i]` for all variables.
    /// The result lives in the variable context of the images.
    pub fn compose(&self, images: &[Polynomial]) -> Result<Polynomial> {
        self.compose_inner(images, None)
    }

    /// Like [`Polynomial::compose`], discarding terms above `max_degree`.
    pub fn compose_truncated(&self, images: &[Polynomial], max_degree: u32) -> Result<Polynomial> {
        self.compose_inner(images, Some(max_degree))
    }

    fn compose_inner(&self, images: &[Polynomial], cap: Option<u32>) -> Result<Polynomial> {
        if images.len() != self.nvars {
            return Err(Error::dim(format!(
                "{} images for {} variables",
                images.len(),
                self.nvars
            )));
        }
        let target = match images.first() {
            Some(g) => g.nvars,
            None => 0,
        };
        for g in images {
            if g.field != self.field {
                return Err(Error::FieldMismatch {
                    left: self.field.to_string(),
                    right: g.field.to_string(),
                });
            }
            if g.nvars != target {
                return Err(Error::dim("images live in different variable contexts"));
            }
        }
        let mul = |a: &Polynomial, b: &Polynomial| match cap {
            Some(d) => a.mul_truncated(b, d),
            None => a * b,
        };
        // powers[i][e] = images[i]^e, filled lazily
        let mut powers: Vec<Vec<Polynomial>> = images
            .iter()
            .map(|_| vec![Polynomial::one(&self.field, target)])
            .collect();
        let mut out = Polynomial::zero(&self.field, target);
        for (m, c) in &self.terms {
            let mut t = Polynomial::constant(&self.field, target, c.clone());
            for (i, &e) in m.exponents().iter().enumerate() {
                if e == 0 {
                    continue;
                }
                while powers[i].len() <= e as usize {
                    let next = mul(powers[i].last().unwrap(), &images[i]);
                    powers[i].push(next);
                }
                t = mul(&t, &powers[i][e as usize]);
                if t.is_zero() {
                    break;
                }
            }
            out = &out + &t;
        }
        Ok(out)
    }

    /// Partial substitution. Unassigned variables are kept (embedded into the
    /// context of the assigned polynomials, which may have more variables).
    pub fn substitute(&self, assignments: &[(usize, Polynomial)]) -> Result<Polynomial> {
        if assignments.is_empty() {
            return Ok(self.clone());
        }
        let target = assignments[0].1.nvars;
        if target < self.nvars {
            return Err(Error::dim(
                "substituted polynomials need at least as many variables",
            ));
        }
        let mut images: Vec<Polynomial> = (0..self.nvars)
            .map(|i| Polynomial::var(&self.field, target, i))
            .collect();
        for (var, g) in assignments {
            if *var >= self.nvars {
                return Err(Error::VariableOutOfRange {
                    index: *var,
                    nvars: self.nvars,
                });
            }
            if g.nvars != target {
                return Err(Error::dim(
                    "substituted polynomials live in different contexts",
                ));
            }
            images[*var] = g.clone();
        }
        self.compose(&images)
    }

    /// Embed into `nvars` variables, old variable `i` becoming `i + offset`.
    pub fn embed(&self, nvars: usize, offset: usize) -> Polynomial {
        assert!(offset + self.nvars <= nvars);
        Polynomial {
            field: self.field.clone(),
            nvars,
            terms: self
                .terms
                .iter()
                .map(|(m, c)| (m.resized(nvars, offset), c.clone()))
                .collect(),
        }
    }

    /// Drop trailing variables that do not occur.
    pub fn restrict_vars(&self, nvars: usize) -> Result<Polynomial> {
        if (nvars..self.nvars).any(|v| self.uses_var(v)) {
            return Err(Error::dim("polynomial uses a variable being dropped"));
        }
        Ok(Polynomial {
            field: self.field.clone(),
            nvars,
            terms: self
                .terms
                .iter()
                .map(|(m, c)| (Monomial::new(m.exponents()[..nvars].to_vec()), c.clone()))
                .collect(),
        })
    }

    /// Image under the embedding of coefficient fields.
    pub fn to_field(&self, field: &Field) -> Result<Polynomial> {
        let mut out = Polynomial::zero(field, self.nvars);
        for (m, c) in &self.terms {
            out.add_term(m.clone(), field.embed(c)?);
        }
        Ok(out)
    }

    /// Exact quotient `self / divisor`, or `None` when the division leaves a
    /// remainder (or the divisor is zero).
    pub fn div_exact(&self, divisor: &Polynomial) -> Option<Polynomial> {
        let (lm, lc) = divisor.leading_term()?;
        let lc_inv = lc.inv()?;
        let mut rem = self.clone();
        let mut quot = Polynomial::zero(&self.field, self.nvars);
        while let Some((m, c)) = rem.leading_term() {
            let qm = m.div(lm)?;
            let qc = c * &lc_inv;
            rem = &rem - &divisor.mul_term(&qm, &qc);
            quot.add_term(qm, qc);
        }
        Some(quot)
    }

    /// Coefficients with respect to one variable: `result[k]` is the
    /// coefficient of `x_var^k`, a polynomial free of `x_var`.
    pub fn coefficients_in(&self, var: usize) -> Vec<Polynomial> {
        let deg = match self.degree_in(var) {
            Degree::NegInfinity => return Vec::new(),
            Degree::Finite(d) => d as usize,
        };
        let mut out = vec![Polynomial::zero(&self.field, self.nvars); deg + 1];
        for (m, c) in &self.terms {
            let e = m.exponent(var) as usize;
            out[e].add_term(m.with_exponent(var, 0), c.clone());
        }
        out
    }

    /// Inverse of [`Polynomial::coefficients_in`].
    pub fn from_coefficients_in(
        field: &Field,
        nvars: usize,
        var: usize,
        coeffs: &[Polynomial],
    ) -> Self {
        let mut out = Polynomial::zero(field, nvars);
        for (k, c) in coeffs.iter().enumerate() {
            for (m, a) in &c.terms {
                out.add_term(m.with_exponent(var, m.exponent(var) + k as u32), a.clone());
            }
        }
        out
    }

    /// Coefficients of the linear part as a vector of length `nvars`.
    pub fn linear_coefficients(&self) -> Vec<Scalar> {
        (0..self.nvars)
            .map(|j| self.coefficient(&Monomial::var(self.nvars, j)))
            .collect()
    }

    /// Coefficient vector over the given monomial basis; `None` when the
    /// polynomial has a term outside the basis.
    pub fn coordinates(&self, basis: &[Monomial]) -> Option<Vec<Scalar>> {
        if self.terms.keys().any(|m| !basis.contains(m)) {
            return None;
        }
        Some(basis.iter().map(|m| self.coefficient(m)).collect())
    }
}

impl<'a> Add<&'a Polynomial> for &'a Polynomial {
    type Output = Polynomial;
    fn add(self, rhs: &'a Polynomial) -> Polynomial {
        debug_assert_eq!(self.nvars, rhs.nvars);
        let mut out = self.clone();
        for (m, c) in &rhs.terms {
            out.add_term(m.clone(), c.clone());
        }
        out
    }
}

impl<'a> Sub<&'a Polynomial> for &'a Polynomial {
    type Output = Polynomial;
    fn sub(self, rhs: &'a Polynomial) -> Polynomial {
        debug_assert_eq!(self.nvars, rhs.nvars);
        let mut out = self.clone();
        for (m, c) in &rhs.terms {
            out.add_term(m.clone(), -c);
        }
        out
    }
}

/// Common denominator and integer numerators of a rational polynomial.
fn integer_terms(p: &Polynomial) -> (BigInt, Vec<(&Monomial, BigInt)>) {
    let den = p.terms.values().fold(BigInt::one(), |acc, c| {
        acc.lcm(c.as_rational().expect("rational").denom())
    });
    let nums = p
        .terms
        .iter()
        .map(|(m, c)| {
            let r = c.as_rational().expect("rational");
            (m, r.numer() * &den / r.denom())
        })
        .collect();
    (den, nums)
}

impl<'a> Mul<&'a Polynomial> for &'a Polynomial {
    type Output = Polynomial;
    fn mul(self, rhs: &'a Polynomial) -> Polynomial {
        debug_assert_eq!(self.nvars, rhs.nvars);
        self.product(rhs, None)
    }
}

impl Neg for &Polynomial {
    type Output = Polynomial;
    fn neg(self) -> Polynomial {
        Polynomial {
            field: self.field.clone(),
            nvars: self.nvars,
            terms: self.terms.iter().map(|(m, c)| (m.clone(), -c)).collect(),
        }
    }
}

macro_rules! forward_owned {
    ($tr:ident, $m:ident) => {
        impl $tr<Polynomial> for Polynomial {
            type Output = Polynomial;
            fn $m(self, rhs: Polynomial) -> Polynomial {
                (&self).$m(&rhs)
            }
        }
        impl<'a> $tr<&'a Polynomial> for Polynomial {
            type Output = Polynomial;
            fn $m(self, rhs: &'a Polynomial) -> Polynomial {
                (&self).$m(rhs)
            }
        }
    };
}

forward_owned!(Add, add);
forward_owned!(Sub, sub);
forward_owned!(Mul, mul);

impl Neg for Polynomial {
    type Output = Polynomial;
    fn neg(self) -> Polynomial {
        -&self
    }
}

/// Canonical text: terms in descending order, each written `c*x1^a*x2^b`
/// with the coefficient and every exponent spelled out.
impl fmt::Display for Polynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        for (k, (m, c)) in self.terms.iter().rev().enumerate() {
            let neg = c.is_negative();
            let abs = if neg { -c } else { c.clone() };
            match (k, neg) {
                (0, true) => write!(f, "-")?,
                (0, false) => {}
                (_, true) => write!(f, " - ")?,
                (_, false) => write!(f, " + ")?,
            }
            write!(f, "{abs}")?;
            for (i, &e) in m.exponents().iter().enumerate() {
                if e > 0 {
                    write!(f, "*x{}^{}", i + 1, e)?;
                }
            }
        }
        Ok(())
    }
}
