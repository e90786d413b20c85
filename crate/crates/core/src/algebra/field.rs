//! Exact coefficient fields: the rationals, prime fields and small extensions
//! of prime fields.
//!
//! A [`Scalar`] carries enough information to do arithmetic on its own (the
//! modulus, or a shared handle to the extension field), so polynomials can use
//! plain operator syntax. Mixing scalars from different fields is a logic
//! error and panics; the polynomial layer checks fields at its API boundary.

use std::fmt;
use std::hash::{Hash, Hasher};
use std::ops::{Add, Mul, Neg, Sub};
use std::sync::Arc;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};

/// Largest prime accepted for `F_p`. Products are formed in `u128`.
pub const MAX_PRIME: u64 = (1 << 62) - 57;

/// `F_{p^k}` realised as `F_p[g] / (m(g))` for the lexicographically first
/// monic irreducible `m` of degree `k`.
#[derive(Debug, PartialEq, Eq, Hash)]
pub struct ExtensionField {
    p: u64,
    degree: usize,
    /// Monic modulus, lowest coefficient first, length `degree + 1`.
    modulus: Vec<u64>,
}

impl ExtensionField {
    pub fn characteristic(&self) -> u64 {
        self.p
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn modulus(&self) -> &[u64] {
        &self.modulus
    }

    fn order(&self) -> u128 {
        (self.p as u128).pow(self.degree as u32)
    }

    fn reduce(&self, mut prod: Vec<u64>) -> Vec<u64> {
        let p = self.p as u128;
        let k = self.degree;
        while prod.len() > k {
            let top = prod.pop().unwrap();
            if top == 0 {
                continue;
            }
            let shift = prod.len() - k;
            for (i, &m) in self.modulus[..k].iter().enumerate() {
                let sub = (top as u128 * m as u128) % p;
                let cur = prod[shift + i] as u128;
                prod[shift + i] = ((cur + p - sub) % p) as u64;
            }
        }
        prod.resize(k, 0);
        prod
    }

    fn mul(&self, a: &[u64], b: &[u64]) -> Vec<u64> {
        let p = self.p as u128;
        let mut prod = vec![0u64; 2 * self.degree - 1];
        for (i, &x) in a.iter().enumerate() {
            if x == 0 {
                continue;
            }
            for (j, &y) in b.iter().enumerate() {
                let cur = prod[i + j] as u128;
                prod[i + j] = ((cur + x as u128 * y as u128) % p) as u64;
            }
        }
        self.reduce(prod)
    }
}

/// A coefficient field.
#[derive(Debug, Clone)]
pub enum Field {
    Rational,
    Prime(u64),
    Extension(Arc<ExtensionField>),
}

impl PartialEq for Field {
    fn eq(&self, other: &Self) -> bool {
        match (self, other) {
            (Field::Rational, Field::Rational) => true,
            (Field::Prime(p), Field::Prime(q)) => p == q,
            (Field::Extension(a), Field::Extension(b)) => Arc::ptr_eq(a, b) || a == b,
            _ => false,
        }
    }
}

impl Eq for Field {}

impl fmt::Display for Field {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Field::Rational => write!(f, "Q"),
            Field::Prime(p) => write!(f, "F{p}"),
            Field::Extension(e) => write!(f, "F{}^{}", e.p, e.degree),
        }
    }
}

pub(crate) fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    for small in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        if n.is_multiple_of(small) {
            return n == small;
        }
    }
    // Deterministic Miller-Rabin for 64-bit inputs.
    let mut d = n - 1;
    let mut s = 0;
    while d.is_multiple_of(2) {
        d /= 2;
        s += 1;
    }
    'witness: for a in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        let mut x = pow_mod(a, d, n);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 1..s {
            x = mul_mod(x, x, n);
            if x == n - 1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

fn mul_mod(a: u64, b: u64, m: u64) -> u64 {
    ((a as u128 * b as u128) % m as u128) as u64
}

fn pow_mod(mut base: u64, mut exp: u64, m: u64) -> u64 {
    let mut acc = 1 % m;
    base %= m;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = mul_mod(acc, base, m);
        }
        base = mul_mod(base, base, m);
        exp >>= 1;
    }
    acc
}

impl Field {
    pub fn rational() -> Self {
        Field::Rational
    }

    pub fn prime(p: u64) -> Result<Self> {
        if !is_prime(p) || p > MAX_PRIME {
            return Err(Error::Hypothesis(format!("{p} is not a supported prime")));
        }
        Ok(Field::Prime(p))
    }

    /// `F_{p^k}`; `k = 1` gives the prime field itself.
    pub fn extension(p: u64, k: usize) -> Result<Self> {
        let base = Field::prime(p)?;
        if k == 0 {
            return Err(Error::Hypothesis(
                "extension degree must be positive".into(),
            ));
        }
        if k == 1 {
            return Ok(base);
        }
        let order = (p as u128).checked_pow(k as u32);
        if order.is_none_or(|q| q > (1u128 << 40)) {
            return Err(Error::ResourceCap(format!("F{p}^{k} is too large")));
        }
        let modulus = first_irreducible(p, k);
        Ok(Field::Extension(Arc::new(ExtensionField {
            p,
            degree: k,
            modulus,
        })))
    }

    pub fn characteristic(&self) -> u64 {
        match self {
            Field::Rational => 0,
            Field::Prime(p) => *p,
            Field::Extension(e) => e.p,
        }
    }

    /// Number of elements, `None` for the rationals.
    pub fn order(&self) -> Option<u128> {
        match self {
            Field::Rational => None,
            Field::Prime(p) => Some(*p as u128),
            Field::Extension(e) => Some(e.order()),
        }
    }

    /// Characteristic 0 or greater than 3.
    pub fn supports_cubic_theory(&self) -> bool {
        let c = self.characteristic();
        c == 0 || c > 3
    }

    pub fn require_cubic_theory(&self) -> Result<()> {
        if self.supports_cubic_theory() {
            Ok(())
        } else {
            Err(Error::UnsupportedCharacteristic(self.characteristic()))
        }
    }

    pub fn zero(&self) -> Scalar {
        self.from_u64(0)
    }

    pub fn one(&self) -> Scalar {
        self.from_u64(1)
    }

    pub fn from_u64(&self, v: u64) -> Scalar {
        match self {
            Field::Rational => Scalar::Rational(BigRational::from_integer(BigInt::from(v))),
            Field::Prime(p) => Scalar::Prime {
                value: v % p,
                p: *p,
            },
            Field::Extension(e) => {
                let mut coeffs = vec![0; e.degree];
                coeffs[0] = v % e.p;
                Scalar::Extension {
                    coeffs,
                    field: e.clone(),
                }
            }
        }
    }

    pub fn from_i64(&self, v: i64) -> Scalar {
        let s = self.from_u64(v.unsigned_abs());
        if v < 0 {
            -s
        } else {
            s
        }
    }

    pub fn from_bigint(&self, v: &BigInt) -> Scalar {
        match self {
            Field::Rational => Scalar::Rational(BigRational::from_integer(v.clone())),
            _ => {
                let p = BigInt::from(self.characteristic());
                let r = v.mod_floor(&p).to_u64().unwrap();
                self.from_u64(r)
            }
        }
    }

    /// Image of a rational number; fails when the denominator vanishes in the
    /// field.
    pub fn from_rational(&self, v: &BigRational) -> Result<Scalar> {
        let num = self.from_bigint(v.numer());
        let den = self.from_bigint(v.denom());
        let inv = den
            .inv()
            .ok_or_else(|| Error::Hypothesis(format!("denominator of {v} vanishes in {self}")))?;
        Ok(num * inv)
    }

    /// The `index`-th element in a fixed enumeration of a finite field
    /// (base-`p` digits of `index` as coefficients). `None` for the rationals
    /// or an index past the field order.
    pub fn element_at(&self, index: u128) -> Option<Scalar> {
        match self {
            Field::Rational => None,
            Field::Prime(p) => (index < *p as u128).then(|| self.from_u64(index as u64)),
            Field::Extension(e) => {
                if index >= e.order() {
                    return None;
                }
                let mut rest = index;
                let coeffs = (0..e.degree)
                    .map(|_| {
                        let d = (rest % e.p as u128) as u64;
                        rest /= e.p as u128;
                        d
                    })
                    .collect();
                Some(Scalar::Extension {
                    coeffs,
                    field: e.clone(),
                })
            }
        }
    }

    /// Embed a scalar of this field's prime subfield (or of this field).
    pub fn embed(&self, s: &Scalar) -> Result<Scalar> {
        if s.field() == *self {
            return Ok(s.clone());
        }
        match (self, s) {
            (Field::Extension(e), Scalar::Prime { value, p }) if e.p == *p => {
                Ok(self.from_u64(*value))
            }
            (_, Scalar::Rational(r)) if !matches!(self, Field::Rational) => self.from_rational(r),
            _ => Err(Error::FieldMismatch {
                left: self.to_string(),
                right: s.field().to_string(),
            }),
        }
    }
}

fn first_irreducible(p: u64, k: usize) -> Vec<u64> {
    // Enumerate monic polynomials of degree k; lower coefficients as base-p digits.
    let total = (p as u128).pow(k as u32);
    for idx in 0..total {
        let mut rest = idx;
        let mut poly: Vec<u64> = (0..k)
            .map(|_| {
                let d = (rest % p as u128) as u64;
                rest /= p as u128;
                d
            })
            .collect();
        poly.push(1);
        if poly[0] != 0 && is_irreducible(&poly, p) {
            return poly;
        }
    }
    unreachable!("irreducible polynomials exist in every degree")
}

fn poly_rem_mod(a: &[u64], b: &[u64], p: u64) -> Vec<u64> {
    // b monic
    let mut r = a.to_vec();
    let db = b.len() - 1;
    while r.len() > db {
        let top = r.pop().unwrap();
        if top == 0 {
            continue;
        }
        let shift = r.len() - db;
        for i in 0..db {
            let sub = mul_mod(top, b[i], p);
            r[shift + i] = (r[shift + i] + p - sub) % p;
        }
    }
    while r.last() == Some(&0) {
        r.pop();
    }
    r
}

fn is_irreducible(poly: &[u64], p: u64) -> bool {
    let k = poly.len() - 1;
    for d in 1..=k / 2 {
        let count = (p as u128).pow(d as u32);
        for idx in 0..count {
            let mut rest = idx;
            let mut div: Vec<u64> = (0..d)
                .map(|_| {
                    let c = (rest % p as u128) as u64;
                    rest /= p as u128;
                    c
                })
                .collect();
            div.push(1);
            if poly_rem_mod(poly, &div, p).is_empty() {
                return false;
            }
        }
    }
    true
}

/// An element of a [`Field`].
#[derive(Debug, Clone)]
pub enum Scalar {
    Rational(BigRational),
    Prime {
        value: u64,
        p: u64,
    },
    Extension {
        coeffs: Vec<u64>,
        field: Arc<ExtensionField>,
    },
}

impl PartialEq for Scalar {
    fn eq(&self, other: &Self) -> bool {
        match (self, other) {
            (Scalar::Rational(a), Scalar::Rational(b)) => a == b,
            (Scalar::Prime { value: a, p }, Scalar::Prime { value: b, p: q }) => a == b && p == q,
            (
                Scalar::Extension {
                    coeffs: a,
                    field: f,
                },
                Scalar::Extension {
                    coeffs: b,
                    field: g,
                },
            ) => a == b && (Arc::ptr_eq(f, g) || f == g),
            _ => false,
        }
    }
}

impl Eq for Scalar {}

impl Hash for Scalar {
    fn hash<H: Hasher>(&self, state: &mut H) {
        match self {
            Scalar::Rational(r) => r.hash(state),
            Scalar::Prime { value, p } => (value, p).hash(state),
            Scalar::Extension { coeffs, field } => (coeffs, field.p).hash(state),
        }
    }
}

fn mismatch(a: &Scalar, b: &Scalar) -> ! {
    panic!("scalar field mismatch: {} vs {}", a.field(), b.field())
}

impl Scalar {
    pub fn field(&self) -> Field {
        match self {
            Scalar::Rational(_) => Field::Rational,
            Scalar::Prime { p, .. } => Field::Prime(*p),
            Scalar::Extension { field, .. } => Field::Extension(field.clone()),
        }
    }

    pub fn is_zero(&self) -> bool {
        match self {
            Scalar::Rational(r) => r.is_zero(),
            Scalar::Prime { value, .. } => *value == 0,
            Scalar::Extension { coeffs, .. } => coeffs.iter().all(|&c| c == 0),
        }
    }

    pub fn is_one(&self) -> bool {
        match self {
            Scalar::Rational(r) => r.is_one(),
            Scalar::Prime { value, .. } => *value == 1,
            Scalar::Extension { coeffs, .. } => {
                coeffs[0] == 1 && coeffs[1..].iter().all(|&c| c == 0)
            }
        }
    }

    pub fn inv(&self) -> Option<Scalar> {
        if self.is_zero() {
            return None;
        }
        Some(match self {
            Scalar::Rational(r) => Scalar::Rational(r.recip()),
            Scalar::Prime { value, p } => Scalar::Prime {
                value: pow_mod(*value, p - 2, *p),
                p: *p,
            },
            Scalar::Extension { field, .. } => {
                let q = field.order();
                self.pow_u128(q - 2)
            }
        })
    }

    pub fn pow(&self, e: u64) -> Scalar {
        self.pow_u128(e as u128)
    }

    fn pow_u128(&self, mut e: u128) -> Scalar {
        let mut acc = self.field().one();
        let mut base = self.clone();
        while e > 0 {
            if e & 1 == 1 {
                acc = &acc * &base;
            }
            base = &base * &base;
            e >>= 1;
        }
        acc
    }

    /// The rational value, if this is a rational scalar.
    pub fn as_rational(&self) -> Option<&BigRational> {
        match self {
            Scalar::Rational(r) => Some(r),
            _ => None,
        }
    }

    /// Whether printing this scalar needs a leading minus sign.
    pub fn is_negative(&self) -> bool {
        matches!(self, Scalar::Rational(r) if r.is_negative())
    }

    /// Index of a finite-field element in [`Field::element_at`] order.
    pub fn enumeration_index(&self) -> Option<u128> {
        match self {
            Scalar::Rational(_) => None,
            Scalar::Prime { value, .. } => Some(*value as u128),
            Scalar::Extension { coeffs, field } => Some(
                coeffs
                    .iter()
                    .rev()
                    .fold(0u128, |acc, &c| acc * field.p as u128 + c as u128),
            ),
        }
    }
}

impl fmt::Display for Scalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Scalar::Rational(r) => {
                if r.is_integer() {
                    write!(f, "{}", r.numer())
                } else {
                    write!(f, "{}/{}", r.numer(), r.denom())
                }
            }
            Scalar::Prime { value, .. } => write!(f, "{value}"),
            Scalar::Extension { coeffs, .. } => {
                let parts: Vec<String> = coeffs
                    .iter()
                    .enumerate()
                    .filter(|(_, &c)| c != 0)
                    .map(|(i, &c)| match i {
                        0 => c.to_string(),
                        1 => format!("{c}*g"),
                        _ => format!("{c}*g^{i}"),
                    })
                    .collect();
                match parts.len() {
                    0 => write!(f, "0"),
                    1 => write!(f, "{}", parts[0]),
                    _ => write!(f, "({})", parts.join("+")),
                }
            }
        }
    }
}

impl<'a> Add<&'a Scalar> for &'a Scalar {
    type Output = Scalar;
    fn add(self, rhs: &'a Scalar) -> Scalar {
        match (self, rhs) {
            (Scalar::Rational(a), Scalar::Rational(b)) => Scalar::Rational(a + b),
            (Scalar::Prime { value: a, p }, Scalar::Prime { value: b, p: q }) if p == q => {
                Scalar::Prime {
                    value: ((*a as u128 + *b as u128) % *p as u128) as u64,
                    p: *p,
                }
            }
            (
                Scalar::Extension { coeffs: a, field },
                Scalar::Extension {
                    coeffs: b,
                    field: g,
                },
            ) if field.p == g.p && field.modulus == g.modulus => Scalar::Extension {
                coeffs: a
                    .iter()
                    .zip(b)
                    .map(|(x, y)| ((*x as u128 + *y as u128) % field.p as u128) as u64)
                    .collect(),
                field: field.clone(),
            },
            _ => mismatch(self, rhs),
        }
    }
}

impl Neg for &Scalar {
    type Output = Scalar;
    fn neg(self) -> Scalar {
        match self {
            Scalar::Rational(a) => Scalar::Rational(-a),
            Scalar::Prime { value, p } => Scalar::Prime {
                value: (p - value) % p,
                p: *p,
            },
            Scalar::Extension { coeffs, field } => Scalar::Extension {
                coeffs: coeffs.iter().map(|c| (field.p - c) % field.p).collect(),
                field: field.clone(),
            },
        }
    }
}

impl<'a> Sub<&'a Scalar> for &'a Scalar {
    type Output = Scalar;
    fn sub(self, rhs: &'a Scalar) -> Scalar {
        match (self, rhs) {
            (Scalar::Rational(a), Scalar::Rational(b)) => Scalar::Rational(a - b),
            _ => self + &(-rhs),
        }
    }
}

impl<'a> Mul<&'a Scalar> for &'a Scalar {
    type Output = Scalar;
    fn mul(self, rhs: &'a Scalar) -> Scalar {
        match (self, rhs) {
            (Scalar::Rational(a), Scalar::Rational(b)) => Scalar::Rational(a * b),
            (Scalar::Prime { value: a, p }, Scalar::Prime { value: b, p: q }) if p == q => {
                Scalar::Prime {
                    value: mul_mod(*a, *b, *p),
                    p: *p,
                }
            }
            (
                Scalar::Extension { coeffs: a, field },
                Scalar::Extension {
                    coeffs: b,
                    field: g,
                },
            ) if field.p == g.p && field.modulus == g.modulus => Scalar::Extension {
                coeffs: field.mul(a, b),
                field: field.clone(),
            },
            _ => mismatch(self, rhs),
        }
    }
}

macro_rules! forward_owned {
    ($tr:ident, $m:ident) => {
        impl $tr<Scalar> for Scalar {
            type Output = Scalar;
            fn $m(self, rhs: Scalar) -> Scalar {
                (&self).$m(&rhs)
            }
        }
        impl<'a> $tr<&'a Scalar> for Scalar {
            type Output = Scalar;
            fn $m(self, rhs: &'a Scalar) -> Scalar {
                (&self).$m(rhs)
            }
        }
    };
}

forward_owned!(Add, add);
forward_owned!(Sub, sub);
forward_owned!(Mul, mul);

impl Neg for Scalar {
    type Output = Scalar;
    fn neg(self) -> Scalar {
        -&self
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn prime_field_inverse_and_negation() {
        let f = Field::prime(7).unwrap();
        for v in 1..7 {
            let a = f.from_u64(v);
            assert!((&a * &a.inv().unwrap()).is_one());
            assert!((&a + &(-&a)).is_zero());
        }
        assert!(f.zero().inv().is_none());
    }

    #[test]
    fn rejects_composites() {
        assert!(Field::prime(9).is_err());
        assert!(Field::prime(1).is_err());
        assert!(Field::prime(1_000_000_007).is_ok());
    }

    #[test]
    fn extension_field_is_a_field() {
        let f = Field::extension(5, 2).unwrap();
        assert_eq!(f.order(), Some(25));
        let one = f.one();
        for i in 1..25 {
            let a = f.element_at(i).unwrap();
            assert!((&a * &a.inv().unwrap()) == one, "element {a}");
            assert_eq!(a.enumeration_index(), Some(i));
        }
        assert!(f.element_at(25).is_none());
    }

    #[test]
    fn cubic_extension_has_primitive_size() {
        let f = Field::extension(5, 3).unwrap();
        // Every nonzero element satisfies a^(q-1) = 1.
        let a = f.element_at(7).unwrap();
        assert!(a.pow(124).is_one());
    }

    #[test]
    fn rational_image_in_prime_field() {
        let f = Field::prime(5).unwrap();
        let half = BigRational::new(1.into(), 2.into());
        assert_eq!(f.from_rational(&half).unwrap(), f.from_u64(3));
        let fifth = BigRational::new(1.into(), 5.into());
        assert!(f.from_rational(&fifth).is_err());
    }

    #[test]
    fn characteristic_kills_coefficient() {
        let f = Field::prime(5).unwrap();
        assert!(f.from_i64(5).is_zero());
        assert_eq!(f.from_i64(-1), f.from_u64(4));
    }
}
