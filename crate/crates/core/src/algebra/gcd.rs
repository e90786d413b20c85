//! Multivariate polynomial GCD. Over Q the heuristic integer GCD (evaluate
//! at a large integer, recurse, lift back by xi-adic expansion, confirm by
//! division) is tried first; the fallback is recursive content/primitive-part
//! splitting with the subresultant remainder sequence.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use super::field::{Field, Scalar};
use super::monomial::{Degree, Monomial};
use super::poly::Polynomial;

/// Greatest common divisor, normalized to leading coefficient one.
/// `gcd(0, 0) = 0`.
pub fn gcd(a: &Polynomial, b: &Polynomial) -> Polynomial {
    debug_assert_eq!(a.nvars(), b.nvars());
    if a.is_zero() {
        return b.monic();
    }
    if b.is_zero() {
        return a.monic();
    }
    if a.is_constant() || b.is_constant() {
        return Polynomial::one(a.field(), a.nvars());
    }
    if a.field().characteristic() == 0 {
        let (ia, ib) = (to_integer(a), to_integer(b));
        if let Some(g) = heuristic_gcd(&ia, &ib, HEURISTIC_TRIES) {
            return from_integer(a.field(), a.nvars(), &g).monic();
        }
    }
    let Some(v) = (0..a.nvars()).find(|&i| a.uses_var(i) || b.uses_var(i)) else {
        return Polynomial::one(a.field(), a.nvars());
    };
    match (a.uses_var(v), b.uses_var(v)) {
        (true, false) => gcd(&content(a, v), b),
        (false, true) => gcd(a, &content(b, v)),
        _ => {
            let (ca, cb) = (content(a, v), content(b, v));
            let pa = a.div_exact(&ca).expect("content divides");
            let pb = b.div_exact(&cb).expect("content divides");
            let g = primitive_gcd(&pa, &pb, v);
            (&gcd(&ca, &cb) * &g).monic()
        }
    }
}

/// Integer polynomial keyed by exponent vector.
type IntPoly = BTreeMap<Vec<u32>, BigInt>;

const HEURISTIC_TRIES: usize = 6;

/// Clears denominators of a rational polynomial.
fn to_integer(a: &Polynomial) -> IntPoly {
    let lcm = a.terms().fold(BigInt::one(), |acc, (_, c)| {
        acc.lcm(c.as_rational().expect("rational").denom())
    });
    a.terms()
        .map(|(m, c)| {
            let r = c.as_rational().expect("rational");
            (m.exponents().to_vec(), r.numer() * &lcm / r.denom())
        })
        .collect()
}

fn from_integer(field: &Field, nvars: usize, p: &IntPoly) -> Polynomial {
    Polynomial::from_terms(
        field,
        nvars,
        p.iter().map(|(e, c)| {
            (
                Monomial::new(e.clone()),
                Scalar::Rational(BigRational::from_integer(c.clone())),
            )
        }),
    )
}

fn int_content(p: &IntPoly) -> BigInt {
    p.values().fold(BigInt::zero(), |acc, c| acc.gcd(c))
}

fn max_norm(p: &IntPoly) -> BigInt {
    p.values().map(BigInt::abs).max().unwrap_or_default()
}

fn evaluate_at(p: &IntPoly, v: usize, xi: &BigInt) -> IntPoly {
    let mut out = IntPoly::new();
    for (e, c) in p {
        let mut key = e.clone();
        key[v] = 0;
        *out.entry(key).or_insert_with(BigInt::zero) += c * xi.pow(e[v]);
    }
    out.retain(|_, c| !c.is_zero());
    out
}

/// Integer GCD including content, or `None` when the heuristic gives up.
fn heuristic_gcd(a: &IntPoly, b: &IntPoly, tries: usize) -> Option<IntPoly> {
    let (ca, cb) = (int_content(a), int_content(b));
    let c = ca.gcd(&cb);
    let pa: IntPoly = a.iter().map(|(e, x)| (e.clone(), x / &ca)).collect();
    let pb: IntPoly = b.iter().map(|(e, x)| (e.clone(), x / &cb)).collect();
    let nvars = a.keys().next()?.len();
    let Some(v) = (0..nvars)
        .rev()
        .find(|&i| pa.keys().chain(pb.keys()).any(|e| e[i] > 0))
    else {
        let mut g = IntPoly::new();
        g.insert(vec![0; nvars], c);
        return Some(g);
    };
    let deg = |p: &IntPoly| p.keys().map(|e| e[v]).max().unwrap_or(0);
    let max_deg = deg(&pa).min(deg(&pb));
    let mut xi = 2 * max_norm(&pa).min(max_norm(&pb)) + 29;
    let q = Field::rational();
    let (qa, qb) = (from_integer(&q, nvars, &pa), from_integer(&q, nvars, &pb));
    for _ in 0..tries {
        let (ea, eb) = (evaluate_at(&pa, v, &xi), evaluate_at(&pb, v, &xi));
        if !ea.is_empty() && !eb.is_empty() {
            let gamma = heuristic_gcd(&ea, &eb, tries)?;
            if let Some(g) = lift(gamma, v, &xi, max_deg) {
                let gq = from_integer(&q, nvars, &g);
                if qa.div_exact(&gq).is_some() && qb.div_exact(&gq).is_some() {
                    return Some(g.into_iter().map(|(e, x)| (e, x * &c)).collect());
                }
            }
        }
        xi = xi * 73794 / 27011;
    }
    None
}

/// Rebuilds `G` from `G(x_v = xi)` by symmetric xi-adic expansion, made
/// primitive with positive leading coefficient.
fn lift(mut gamma: IntPoly, v: usize, xi: &BigInt, max_deg: u32) -> Option<IntPoly> {
    let half = xi / 2;
    let mut out = IntPoly::new();
    let mut k = 0;
    while !gamma.is_empty() {
        if k > max_deg {
            return None;
        }
        let mut next = IntPoly::new();
        for (e, c) in &gamma {
            let mut r = c.mod_floor(xi);
            if r > half {
                r -= xi;
            }
            if !r.is_zero() {
                let mut key = e.clone();
                key[v] = k;
                out.insert(key, r.clone());
            }
            let q = (c - &r) / xi;
            if !q.is_zero() {
                next.insert(e.clone(), q);
            }
        }
        gamma = next;
        k += 1;
    }
    let cont = int_content(&out);
    if cont.is_zero() {
        return None;
    }
    let sign = if out.values().next_back()?.is_negative() {
        -cont
    } else {
        cont
    };
    Some(out.into_iter().map(|(e, c)| (e, c / &sign)).collect())
}

/// GCD of a list; zero for an empty or all-zero list.
pub fn gcd_all<'a>(polys: impl IntoIterator<Item = &'a Polynomial>) -> Option<Polynomial> {
    let mut acc: Option<Polynomial> = None;
    for p in polys {
        acc = Some(match acc {
            None => p.monic(),
            Some(g) => gcd(&g, p),
        });
    }
    acc
}

/// GCD of the coefficients of `a` viewed as a polynomial in `x_var`.
pub fn content(a: &Polynomial, var: usize) -> Polynomial {
    let coeffs = a.coefficients_in(var);
    let mut g = Polynomial::zero(a.field(), a.nvars());
    for c in coeffs.iter().rev() {
        if c.is_zero() {
            continue;
        }
        g = gcd(&g, c);
        if g.is_constant() {
            break;
        }
    }
    g
}

fn deg_in(a: &Polynomial, var: usize) -> u32 {
    match a.degree_in(var) {
        Degree::Finite(d) => d,
        Degree::NegInfinity => 0,
    }
}

fn lead_in(a: &Polynomial, var: usize) -> Polynomial {
    a.coefficients_in(var)
        .pop()
        .unwrap_or_else(|| Polynomial::zero(a.field(), a.nvars()))
}

fn var_power(a: &Polynomial, var: usize, e: u32) -> Polynomial {
    let mut ex = vec![0; a.nvars()];
    ex[var] = e;
    Polynomial::monomial(a.field(), a.field().one(), ex)
}

/// Pseudo-remainder `lc(b)^(deg a - deg b + 1) a mod b` in `x_var`.
fn pseudo_remainder(a: &Polynomial, b: &Polynomial, var: usize) -> Polynomial {
    let db = deg_in(b, var);
    if db == 0 {
        return Polynomial::zero(a.field(), a.nvars());
    }
    let lb = lead_in(b, var);
    let delta = deg_in(a, var) - db;
    let mut r = a.clone();
    let mut steps = 0;
    while !r.is_zero() && r.uses_var(var) && deg_in(&r, var) >= db {
        let lr = lead_in(&r, var);
        let shift = var_power(a, var, deg_in(&r, var) - db);
        r = &(&lb * &r) - &(&(&lr * &shift) * b);
        steps += 1;
    }
    for _ in steps..delta + 1 {
        r = &r * &lb;
    }
    r
}

/// GCD of two polynomials primitive with respect to `x_var`, both involving it.
fn primitive_gcd(a: &Polynomial, b: &Polynomial, var: usize) -> Polynomial {
    let (mut a, mut b) = if deg_in(a, var) >= deg_in(b, var) {
        (a.clone(), b.clone())
    } else {
        (b.clone(), a.clone())
    };
    let one = Polynomial::one(a.field(), a.nvars());
    let mut g = one.clone();
    let mut h = one.clone();
    loop {
        let delta = deg_in(&a, var) - deg_in(&b, var);
        let r = pseudo_remainder(&a, &b, var);
        if r.is_zero() {
            break;
        }
        if !r.uses_var(var) {
            return one;
        }
        let divisor = &g * &h.pow(delta);
        a = b;
        b = r
            .div_exact(&divisor)
            .expect("subresultant division is exact");
        g = lead_in(&a, var);
        h = match delta {
            0 => h,
            1 => g.clone(),
            _ => g
                .pow(delta)
                .div_exact(&h.pow(delta - 1))
                .expect("subresultant division is exact"),
        };
    }
    let c = content(&b, var);
    b.div_exact(&c).expect("content divides").monic()
}

/// The largest `s` (up to scalars) with `s^2` dividing `f`, from the chain
/// of repeated GCDs with all partial derivatives. Exact in characteristic 0
/// and whenever every multiplicity is below the characteristic.
pub fn square_part(f: &Polynomial) -> Polynomial {
    let one = Polynomial::one(f.field(), f.nvars());
    if f.is_zero() {
        return Polynomial::zero(f.field(), f.nvars());
    }
    // levels[k] = product of the irreducible factors of multiplicity > k
    let mut current = f.monic();
    let mut levels = Vec::new();
    while !current.is_constant() {
        let mut g = current.clone();
        for v in 0..f.nvars() {
            let d = current.derivative(v).expect("in range");
            g = gcd(&g, &d);
        }
        if g == current {
            break;
        }
        levels.push(current.div_exact(&g).expect("gcd divides"));
        current = g;
    }
    levels
        .iter()
        .skip(1)
        .step_by(2)
        .fold(one, |acc, r| &acc * r)
        .monic()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::field::Field;

    fn q() -> Field {
        Field::rational()
    }

    fn x(i: usize) -> Polynomial {
        Polynomial::var(&q(), 3, i)
    }

    fn c(v: i64) -> Polynomial {
        Polynomial::constant(&q(), 3, q().from_i64(v))
    }

    #[test]
    fn monomial_gcd() {
        let a = &(&x(2) * &x(0)) * &x(0);
        let b = &(&x(2) * &x(0)) * &x(1);
        assert_eq!(gcd(&a, &b), &x(2) * &x(0));
    }

    #[test]
    fn coprime_forms() {
        let a = x(0).pow(3);
        let b = x(1).pow(3);
        assert!(gcd(&a, &b).is_constant());
    }

    #[test]
    fn shared_linear_factor() {
        let l = &(&x(0) + &x(1)) - &(&c(2) * &x(2));
        let a = &l * &(&x(0).pow(2) + &x(2).pow(2));
        let b = &l * &(&(&x(0) * &x(1)) - &x(1).pow(2));
        assert_eq!(gcd(&a, &b), l.monic());
    }

    #[test]
    fn gcd_with_zero() {
        let a = &c(3) * &x(1);
        assert_eq!(gcd(&a, &Polynomial::zero(&q(), 3)), x(1));
    }

    #[test]
    fn squares() {
        let f = &(&c(-1) * &x(2).pow(2)) * &x(0);
        assert_eq!(square_part(&f), x(2));
        let l = &x(0) - &x(1);
        let g = &l.pow(5) * &x(2).pow(2);
        assert_eq!(square_part(&g), &l.pow(2) * &x(2));
    }
}
