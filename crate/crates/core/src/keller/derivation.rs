//! Derivations of the polynomial ring and their exponentials.

use crate::algebra::{Field, PolyMap, Polynomial};
use crate::error::{Error, Result};

/// `D = sum_i images[i] d/dx_i`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Derivation {
    field: Field,
    nvars: usize,
    images: Vec<Polynomial>,
}

impl Derivation {
    pub fn new(field: &Field, nvars: usize, images: Vec<Polynomial>) -> Result<Self> {
        if images.len() > nvars {
            return Err(Error::dim(format!(
                "{} images for {} variables",
                images.len(),
                nvars
            )));
        }
        for p in &images {
            if p.nvars() != nvars || p.field() != field {
                return Err(Error::dim("derivation image in the wrong ring"));
            }
        }
        let mut images = images;
        images.resize(nvars, Polynomial::zero(field, nvars));
        Ok(Derivation {
            field: field.clone(),
            nvars,
            images,
        })
    }

    pub fn field(&self) -> &Field {
        &self.field
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn images(&self) -> &[Polynomial] {
        &self.images
    }

    /// `D(x_i) in K[x_{i+1}, ..., x_n]` for every `i`.
    pub fn is_triangular(&self) -> bool {
        self.images
            .iter()
            .enumerate()
            .all(|(i, p)| (0..=i).all(|v| !p.uses_var(v)))
    }

    /// Least `k` with `D^k(x_i) = 0` for every generator, if at most `bound`.
    pub fn nilpotency_order(&self, bound: usize) -> Option<usize> {
        let mut worst = 0;
        for i in 0..self.nvars {
            let mut f = Polynomial::var(&self.field, self.nvars, i);
            let mut k = 0;
            while !f.is_zero() {
                if k == bound {
                    return None;
                }
                f = self.apply(&f);
                k += 1;
            }
            worst = worst.max(k);
        }
        Some(worst)
    }

    /// Certified by iterating on each generator, with bound `n + 1`.
    pub fn is_locally_nilpotent(&self) -> bool {
        self.nilpotency_order(self.nvars + 1).is_some()
    }

    /// `f D`.
    pub fn scaled_by(&self, f: &Polynomial) -> Derivation {
        Derivation {
            field: self.field.clone(),
            nvars: self.nvars,
            images: self.images.iter().map(|p| f * p).collect(),
        }
    }

    /// `sum_i D(x_i) df/dx_i`.
    pub fn apply(&self, f: &Polynomial) -> Polynomial {
        let mut out = Polynomial::zero(&self.field, self.nvars);
        for (i, p) in self.images.iter().enumerate() {
            if p.is_zero() || !f.uses_var(i) {
                continue;
            }
            let d = f.derivative(i).expect("variable in range");
            out = &out + &(p * &d);
        }
        out
    }
}

pub fn derivation_apply(d: &Derivation, f: &Polynomial) -> Result<Polynomial> {
    if f.nvars() != d.nvars || f.field() != &d.field {
        return Err(Error::dim(
            "polynomial and derivation live in different rings",
        ));
    }
    Ok(d.apply(f))
}

/// The automorphism `exp(w D)` given by its values on the generators.
///
/// Requires `D(w) = 0`, so that `(w D)^k (x_i) = w^k D^k(x_i)` and the
/// series stops once `D^k(x_i) = 0`.
pub fn exp_derivation(d: &Derivation, w: &Polynomial) -> Result<PolyMap> {
    let field = &d.field;
    if !d.apply(w).is_zero() {
        return Err(Error::Hypothesis(
            "the multiplier is not in the kernel of D".into(),
        ));
    }
    let bound = d.nvars + 1;
    let order = d
        .nilpotency_order(bound)
        .ok_or_else(|| Error::Hypothesis(format!("D is not nilpotent within {bound} steps")))?;
    let p = field.characteristic();
    if p != 0 && order > p as usize {
        return Err(Error::UnsupportedCharacteristic(p));
    }
    let mut comps = Vec::with_capacity(d.nvars);
    for i in 0..d.nvars {
        let mut term = Polynomial::var(field, d.nvars, i);
        let mut sum = term.clone();
        let mut k = 1u64;
        loop {
            // term = w^k D^k(x_i) / k!
            term = &d.apply(&term) * w;
            if term.is_zero() {
                break;
            }
            let inv = field
                .from_u64(k)
                .inv()
                .expect("factorial invertible below the characteristic");
            term = term.scale(&inv);
            sum = &sum + &term;
            k += 1;
        }
        comps.push(sum);
    }
    PolyMap::new(field, d.nvars, comps)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::compose_maps;
    use crate::text::parse_polynomial;

    fn poly(s: &str, n: usize) -> Polynomial {
        parse_polynomial(s, &Field::rational(), n).unwrap()
    }

    fn smith_d(n: usize) -> Derivation {
        Derivation::new(&Field::rational(), n, vec![poly("x4", n), poly("x3", n)]).unwrap()
    }

    #[test]
    fn apply_examples() {
        let d = smith_d(4);
        assert!(d.apply(&poly("x3*x1 - x4*x2", 4)).is_zero());
        let w = Derivation::new(
            &Field::rational(),
            3,
            vec![poly("x1", 3), poly("-2*x2", 3), poly("4*x3", 3)],
        )
        .unwrap();
        assert!(w.apply(&poly("x1^2*x2", 3)).is_zero());
        assert!(w.apply(&poly("x2^2*x3", 3)).is_zero());
        assert_eq!(w.apply(&poly("x1*x2", 3)), poly("-x1*x2", 3));
        assert!(d.apply(&poly("7", 4)).is_zero());
    }

    #[test]
    fn leibniz_rule() {
        let d = smith_d(4);
        let (f, g) = (poly("x1^2 + x2*x3", 4), poly("x1*x4 - x2^3", 4));
        assert_eq!(
            d.apply(&(&f * &g)),
            &(&d.apply(&f) * &g) + &(&f * &d.apply(&g))
        );
    }

    #[test]
    fn triangular_and_nilpotent() {
        let d = smith_d(4);
        assert!(d.is_triangular());
        assert!(d.is_locally_nilpotent());
        let e = Derivation::new(&Field::rational(), 2, vec![poly("x2", 2), poly("x1", 2)]).unwrap();
        assert!(!e.is_triangular());
        assert!(!e.is_locally_nilpotent());
    }

    #[test]
    fn exponential_of_smith_derivation() {
        let d = smith_d(4);
        let w = poly("x3*x1 - x4*x2", 4);
        let f = exp_derivation(&d, &w).unwrap();
        let comps: Vec<String> = f.components().iter().map(|c| c.to_string()).collect();
        assert_eq!(
            comps[0],
            (&poly("x1", 4) + &(&w * &poly("x4", 4))).to_string()
        );
        assert_eq!(
            comps[1],
            (&poly("x2", 4) + &(&w * &poly("x3", 4))).to_string()
        );
        let g = exp_derivation(&d, &-&w).unwrap();
        assert_eq!(
            compose_maps(&f, &g).unwrap(),
            PolyMap::identity(&Field::rational(), 4)
        );
        assert_eq!(w.compose(f.components()).unwrap(), w);
        let zero = exp_derivation(&d, &Polynomial::zero(&Field::rational(), 4)).unwrap();
        assert_eq!(zero, PolyMap::identity(&Field::rational(), 4));
    }

    #[test]
    fn exponential_series_with_higher_terms() {
        // D = x2 d/dx1 + d/dx2 on x1: exp(D) x1 = x1 + x2 + 1/2
        let n = 2;
        let d = Derivation::new(&Field::rational(), n, vec![poly("x2", n), poly("1", n)]).unwrap();
        let f = exp_derivation(&d, &poly("1", n)).unwrap();
        assert_eq!(f.component(0), &poly("x1 + x2 + 1/2", n));
        assert!(matches!(
            exp_derivation(&d, &poly("x1", n)),
            Err(Error::Hypothesis(_))
        ));
    }
}
