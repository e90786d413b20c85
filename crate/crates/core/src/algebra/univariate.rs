//! Roots of univariate polynomials in the coefficient field.
//!
//! Dense coefficient vectors, lowest degree first.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use super::field::{Field, Scalar};
use crate::error::{Error, Result};

/// Finite fields up to this order are searched exhaustively.
const ENUMERATION_LIMIT: u128 = 1 << 16;

/// Trial division bound when enumerating divisors for rational roots.
const TRIAL_DIVISION_LIMIT: u64 = 1 << 22;

fn trim(mut a: Vec<Scalar>) -> Vec<Scalar> {
    while a.last().is_some_and(Scalar::is_zero) {
        a.pop();
    }
    a
}

fn horner(a: &[Scalar], x: &Scalar, field: &Field) -> Scalar {
    a.iter().rev().fold(field.zero(), |acc, c| &(&acc * x) + c)
}

/// Distinct roots of `a` in `field`, in a deterministic order. The zero
/// polynomial is rejected since every element is a root.
pub fn roots(a: &[Scalar], field: &Field) -> Result<Vec<Scalar>> {
    let a = trim(a.to_vec());
    if a.is_empty() {
        return Err(Error::Hypothesis("roots of the zero polynomial".into()));
    }
    if a.len() == 1 {
        return Ok(Vec::new());
    }
    match field.order() {
        None => rational_roots(&a, field),
        Some(q) if q <= ENUMERATION_LIMIT => Ok((0..q)
            .map(|i| field.element_at(i).expect("index below order"))
            .filter(|x| horner(&a, x, field).is_zero())
            .collect()),
        Some(q) => finite_field_roots(&a, field, q),
    }
}

fn rational_roots(a: &[Scalar], field: &Field) -> Result<Vec<Scalar>> {
    let rats: Vec<&BigRational> = a
        .iter()
        .map(|s| s.as_rational().expect("rational"))
        .collect();
    let lcm = rats.iter().fold(BigInt::one(), |acc, r| acc.lcm(r.denom()));
    let mut ints: Vec<BigInt> = rats
        .iter()
        .map(|r| (r.numer() * &lcm) / r.denom())
        .collect();
    let mut out = Vec::new();
    if ints[0].is_zero() {
        out.push(field.zero());
        let skip = ints.iter().take_while(|c| c.is_zero()).count();
        ints.drain(..skip);
    }
    if ints.len() > 1 {
        let lead = ints.last().unwrap().abs();
        let tail = ints[0].abs();
        let nums = divisors(&tail)?;
        let dens = divisors(&lead)?;
        let mut cands: Vec<BigRational> = Vec::new();
        for n in &nums {
            for d in &dens {
                let r = BigRational::new(n.clone(), d.clone());
                for c in [r.clone(), -r] {
                    if !cands.contains(&c) {
                        cands.push(c);
                    }
                }
            }
        }
        cands.sort();
        for c in cands {
            let x = Scalar::Rational(c);
            if horner(a, &x, field).is_zero() {
                out.push(x);
            }
        }
    }
    Ok(out)
}

fn divisors(n: &BigInt) -> Result<Vec<BigInt>> {
    let Some(mut m) = n.to_u64() else {
        return Err(Error::ResourceCap(format!(
            "coefficient {n} too large for rational root search"
        )));
    };
    let mut primes: Vec<(u64, u32)> = Vec::new();
    let mut p = 2u64;
    while p * p <= m {
        if p > TRIAL_DIVISION_LIMIT {
            return Err(Error::ResourceCap(format!(
                "coefficient {n} too large for rational root search"
            )));
        }
        if m % p == 0 {
            let mut e = 0;
            while m % p == 0 {
                m /= p;
                e += 1;
            }
            primes.push((p, e));
        }
        p += 1;
    }
    if m > 1 {
        primes.push((m, 1));
    }
    let mut divs = vec![1u64];
    for (p, e) in primes {
        let mut next = Vec::new();
        for d in &divs {
            let mut x = *d;
            for _ in 0..=e {
                next.push(x);
                x = x.saturating_mul(p);
            }
        }
        divs = next;
    }
    divs.sort_unstable();
    Ok(divs.into_iter().map(BigInt::from).collect())
}

fn rem(a: &[Scalar], b: &[Scalar]) -> Vec<Scalar> {
    let mut r = trim(a.to_vec());
    let db = b.len() - 1;
    let inv = b[db].inv().expect("nonzero leading coefficient");
    while r.len() > db {
        let top = r.last().unwrap() * &inv;
        let shift = r.len() - 1 - db;
        for (i, c) in b.iter().enumerate() {
            r[shift + i] = &r[shift + i] - &(&top * c);
        }
        r = trim(r);
    }
    r
}

fn mul_mod(a: &[Scalar], b: &[Scalar], m: &[Scalar], field: &Field) -> Vec<Scalar> {
    if a.is_empty() || b.is_empty() {
        return Vec::new();
    }
    let mut prod = vec![field.zero(); a.len() + b.len() - 1];
    for (i, x) in a.iter().enumerate() {
        for (j, y) in b.iter().enumerate() {
            prod[i + j] = &prod[i + j] + &(x * y);
        }
    }
    rem(&prod, m)
}

fn pow_mod(base: &[Scalar], mut e: u128, m: &[Scalar], field: &Field) -> Vec<Scalar> {
    let mut acc = rem(&[field.one()], m);
    let mut b = rem(base, m);
    while e > 0 {
        if e & 1 == 1 {
            acc = mul_mod(&acc, &b, m, field);
        }
        b = mul_mod(&b, &b, m, field);
        e >>= 1;
    }
    acc
}

fn monic(a: Vec<Scalar>) -> Vec<Scalar> {
    let a = trim(a);
    match a.last() {
        Some(l) => {
            let inv = l.inv().expect("nonzero");
            a.iter().map(|c| c * &inv).collect()
        }
        None => a,
    }
}

fn poly_gcd(a: &[Scalar], b: &[Scalar]) -> Vec<Scalar> {
    let (mut a, mut b) = (trim(a.to_vec()), trim(b.to_vec()));
    while !b.is_empty() {
        let r = rem(&a, &b);
        a = b;
        b = r;
    }
    monic(a)
}

fn sub(a: &[Scalar], b: &[Scalar], field: &Field) -> Vec<Scalar> {
    let n = a.len().max(b.len());
    let z = field.zero();
    trim(
        (0..n)
            .map(|i| a.get(i).unwrap_or(&z) - b.get(i).unwrap_or(&z))
            .collect(),
    )
}

fn finite_field_roots(a: &[Scalar], field: &Field, q: u128) -> Result<Vec<Scalar>> {
    if field.characteristic() == 2 {
        return Err(Error::UnsupportedCharacteristic(2));
    }
    let f = monic(a.to_vec());
    let x = vec![field.zero(), field.one()];
    // product of the distinct linear factors: gcd(f, x^q - x)
    let xq = pow_mod(&x, q, &f, field);
    let split = poly_gcd(&f, &sub(&xq, &x, field));
    let mut found = Vec::new();
    equal_degree_split(split, field, q, &mut found);
    found.sort_by_key(|s| s.enumeration_index());
    Ok(found)
}

/// Splits a product of distinct monic linear factors with the
/// deterministic choice of shifts `x + 0, x + 1, ...`.
fn equal_degree_split(f: Vec<Scalar>, field: &Field, q: u128, out: &mut Vec<Scalar>) {
    match f.len() {
        0 | 1 => return,
        2 => {
            out.push(-&f[0]);
            return;
        }
        _ => {}
    }
    for shift in 1u64.. {
        let base = vec![field.from_u64(shift - 1), field.one()];
        let h = pow_mod(&base, (q - 1) / 2, &f, field);
        let g = poly_gcd(&f, &sub(&h, &[field.one()], field));
        if g.len() > 1 && g.len() < f.len() {
            let other = div_exact(&f, &g);
            equal_degree_split(g, field, q, out);
            equal_degree_split(other, field, q, out);
            return;
        }
    }
}

fn div_exact(a: &[Scalar], b: &[Scalar]) -> Vec<Scalar> {
    let mut r = a.to_vec();
    let db = b.len() - 1;
    let inv = b[db].inv().expect("nonzero");
    let mut q = vec![b[0].field().zero(); a.len() - db];
    while r.len() > db {
        let top = r.last().unwrap() * &inv;
        let shift = r.len() - 1 - db;
        for (i, c) in b.iter().enumerate() {
            r[shift + i] = &r[shift + i] - &(&top * c);
        }
        q[shift] = top;
        r.pop();
    }
    q
}

#[cfg(test)]
mod tests {
    use super::*;

    fn coeffs(field: &Field, v: &[i64]) -> Vec<Scalar> {
        v.iter().map(|&c| field.from_i64(c)).collect()
    }

    #[test]
    fn rational_roots_found() {
        let q = Field::rational();
        // (2x - 1)(x + 3) x = 2x^3 + 5x^2 - 3x
        let r = roots(&coeffs(&q, &[0, -3, 5, 2]), &q).unwrap();
        let half = Scalar::Rational(BigRational::new(1.into(), 2.into()));
        assert_eq!(r, vec![q.zero(), q.from_i64(-3), half]);
    }

    #[test]
    fn no_rational_roots() {
        let q = Field::rational();
        assert!(roots(&coeffs(&q, &[-2, 0, 1]), &q).unwrap().is_empty());
    }

    #[test]
    fn large_prime_field() {
        let p = 1_000_000_009;
        let f = Field::prime(p).unwrap();
        // (x - 5)(x - 7)(x^2 + 1) has roots 5, 7 and the two square roots of -1
        let lin = |r: i64| coeffs(&f, &[-r, 1]);
        let mut poly = vec![f.one()];
        for factor in [lin(5), lin(7), coeffs(&f, &[1, 0, 1])] {
            let mut prod = vec![f.zero(); poly.len() + factor.len() - 1];
            for (i, a) in poly.iter().enumerate() {
                for (j, b) in factor.iter().enumerate() {
                    prod[i + j] = &prod[i + j] + &(a * b);
                }
            }
            poly = prod;
        }
        let r = roots(&poly, &f).unwrap();
        assert_eq!(r.len(), 4);
        for x in &r {
            assert!(horner(&poly, x, &f).is_zero());
        }
    }
}
