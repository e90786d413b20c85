use std::cmp::Ordering;
use std::fmt;

/// Exponent vector of a power product `x1^e1 * ... * xn^en`.
///
/// Ordered graded-lexicographically with `x1 > x2 > ... > xn`: total degree
/// first, then the exponent of `x1`, then `x2`, and so on.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Monomial(Vec<u32>);

/// Total or partial degree, with `NegInfinity` for the zero polynomial.
#[derive(Copy, Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Degree {
    NegInfinity,
    Finite(u32),
}

impl Degree {
    pub fn finite(self) -> Option<u32> {
        match self {
            Degree::NegInfinity => None,
            Degree::Finite(d) => Some(d),
        }
    }
}

impl fmt::Display for Degree {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Degree::NegInfinity => write!(f, "-inf"),
            Degree::Finite(d) => write!(f, "{d}"),
        }
    }
}

impl Monomial {
    pub fn new(exponents: Vec<u32>) -> Self {
        Monomial(exponents)
    }

    pub fn one(nvars: usize) -> Self {
        Monomial(vec![0; nvars])
    }

    pub fn var(nvars: usize, index: usize) -> Self {
        let mut e = vec![0; nvars];
        e[index] = 1;
        Monomial(e)
    }

    pub fn exponents(&self) -> &[u32] {
        &self.0
    }

    pub fn nvars(&self) -> usize {
        self.0.len()
    }

    pub fn degree(&self) -> u32 {
        self.0.iter().sum()
    }

    pub fn exponent(&self, index: usize) -> u32 {
        self.0[index]
    }

    pub fn is_one(&self) -> bool {
        self.0.iter().all(|&e| e == 0)
    }

    pub fn mul(&self, other: &Monomial) -> Monomial {
        Monomial(self.0.iter().zip(&other.0).map(|(a, b)| a + b).collect())
    }

    /// `self / other` when `other` divides `self`.
    pub fn div(&self, other: &Monomial) -> Option<Monomial> {
        self.0
            .iter()
            .zip(&other.0)
            .map(|(a, b)| a.checked_sub(*b))
            .collect::<Option<Vec<_>>>()
            .map(Monomial)
    }

    pub fn with_exponent(&self, index: usize, e: u32) -> Monomial {
        let mut v = self.0.clone();
        v[index] = e;
        Monomial(v)
    }

    pub(crate) fn resized(&self, nvars: usize, offset: usize) -> Monomial {
        let mut v = vec![0; nvars];
        v[offset..offset + self.0.len()].copy_from_slice(&self.0);
        Monomial(v)
    }

    /// All monomials of total degree exactly `d` in `nvars` variables,
    /// descending in the graded-lex order.
    pub fn all_of_degree(nvars: usize, d: u32) -> Vec<Monomial> {
        fn rec(nvars: usize, left: u32, prefix: &mut Vec<u32>, out: &mut Vec<Monomial>) {
            if prefix.len() + 1 == nvars {
                prefix.push(left);
                out.push(Monomial(prefix.clone()));
                prefix.pop();
                return;
            }
            for e in (0..=left).rev() {
                prefix.push(e);
                rec(nvars, left - e, prefix, out);
                prefix.pop();
            }
        }
        let mut out = Vec::new();
        if nvars == 0 {
            if d == 0 {
                out.push(Monomial(Vec::new()));
            }
            return out;
        }
        rec(nvars, d, &mut Vec::with_capacity(nvars), &mut out);
        out
    }
}

impl Ord for Monomial {
    fn cmp(&self, other: &Self) -> Ordering {
        self.degree()
            .cmp(&other.degree())
            .then_with(|| self.0.cmp(&other.0))
    }
}

impl PartialOrd for Monomial {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn graded_lex_order() {
        let a = Monomial::new(vec![2, 1, 0]);
        let b = Monomial::new(vec![0, 0, 4]);
        let c = Monomial::new(vec![1, 2, 0]);
        assert!(b > a, "higher degree wins");
        assert!(a > c, "x1 exponent breaks ties");
    }

    #[test]
    fn enumerate_cubics() {
        let all = Monomial::all_of_degree(3, 3);
        assert_eq!(all.len(), 10);
        assert!(all.windows(2).all(|w| w[0] > w[1]));
        assert_eq!(all[0].exponents(), &[3, 0, 0]);
    }
}
