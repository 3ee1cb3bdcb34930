use std::collections::BTreeMap;

use crate::scalar::{Cx, Real};

use super::{LinearForm, Point};

/// Sparse polynomial in `n` complex variables.
///
/// Keys are exponent vectors of length `dim`; zero coefficients are never stored.
#[derive(Debug, Clone, PartialEq)]
pub struct MultiPoly<T: Real> {
    dim: usize,
    terms: BTreeMap<Vec<u32>, Cx<T>>,
}

impl<T: Real> MultiPoly<T> {
    pub fn zero(dim: usize) -> Self {
        Self {
            dim,
            terms: BTreeMap::new(),
        }
    }

    pub fn constant(dim: usize, c: Cx<T>) -> Self {
        let mut p = Self::zero(dim);
        p.add_term(vec![0; dim], c);
        p
    }

    /// The coordinate `z_axis` (zero-based).
    pub fn var(dim: usize, axis: usize) -> Self {
        assert!(axis < dim, "axis {axis} out of range for dimension {dim}");
        let mut exp = vec![0; dim];
        exp[axis] = 1;
        let mut p = Self::zero(dim);
        p.add_term(exp, Cx::new(T::one(), T::zero()));
        p
    }

    pub fn from_terms(dim: usize, terms: impl IntoIterator<Item = (Vec<u32>, Cx<T>)>) -> Self {
        let mut p = Self::zero(dim);
        for (exp, c) in terms {
            assert_eq!(
                exp.len(),
                dim,
                "exponent vector length must equal dimension"
            );
            p.add_term(exp, c);
        }
        p
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Vec<u32>, &Cx<T>)> {
        self.terms.iter()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn coeff(&self, exp: &[u32]) -> Cx<T> {
        self.terms
            .get(exp)
            .copied()
            .unwrap_or_else(|| Cx::new(T::zero(), T::zero()))
    }

    fn add_term(&mut self, exp: Vec<u32>, c: Cx<T>) {
        let entry = self
            .terms
            .entry(exp)
            .or_insert_with(|| Cx::new(T::zero(), T::zero()));
        *entry = *entry + c;
        self.prune();
    }

    fn prune(&mut self) {
        self.terms
            .retain(|_, c| c.re != T::zero() || c.im != T::zero());
    }

    pub fn total_degree(&self) -> u32 {
        self.terms.keys().map(|e| e.iter().sum()).max().unwrap_or(0)
    }

    /// `Some(c)` if the polynomial has no non-constant term.
    pub fn as_constant(&self) -> Option<Cx<T>> {
        match self.terms.len() {
            0 => Some(Cx::new(T::zero(), T::zero())),
            1 => {
                let (exp, c) = self.terms.iter().next().unwrap();
                exp.iter().all(|&e| e == 0).then_some(*c)
            }
            _ => None,
        }
    }

    pub fn add(&self, other: &Self) -> Self {
        assert_eq!(self.dim, other.dim);
        let mut out = self.clone();
        for (e, c) in &other.terms {
            let entry = out
                .terms
                .entry(e.clone())
                .or_insert_with(|| Cx::new(T::zero(), T::zero()));
            *entry = *entry + *c;
        }
        out.prune();
        out
    }

    pub fn scale(&self, s: Cx<T>) -> Self {
        let mut out = Self {
            dim: self.dim,
            terms: self
                .terms
                .iter()
                .map(|(e, c)| (e.clone(), *c * s))
                .collect(),
        };
        out.prune();
        out
    }

    pub fn mul(&self, other: &Self) -> Self {
        assert_eq!(self.dim, other.dim);
        let mut out = BTreeMap::new();
        for (ea, ca) in &self.terms {
            for (eb, cb) in &other.terms {
                let e: Vec<u32> = ea.iter().zip(eb).map(|(x, y)| x + y).collect();
                let entry = out
                    .entry(e)
                    .or_insert_with(|| Cx::new(T::zero(), T::zero()));
                *entry = *entry + *ca * *cb;
            }
        }
        let mut p = Self {
            dim: self.dim,
            terms: out,
        };
        p.prune();
        p
    }

    pub fn pow(&self, k: u32) -> Self {
        let mut acc = Self::constant(self.dim, Cx::new(T::one(), T::zero()));
        let mut base = self.clone();
        let mut k = k;
        while k > 0 {
            if k & 1 == 1 {
                acc = acc.mul(&base);
            }
            base = base.mul(&base);
            k >>= 1;
        }
        acc
    }

    /// `Σ h_k s^k` for the linear form `s`.
    pub fn univariate_in(form: &LinearForm<T>, coeffs: &[Cx<T>]) -> Self {
        let s = form.to_poly();
        let dim = form.dim();
        // Horner in polynomial arithmetic
        let mut acc = Self::zero(dim);
        for &h in coeffs.iter().rev() {
            acc = acc.mul(&s).add(&Self::constant(dim, h));
        }
        acc
    }

    pub fn eval(&self, z: &Point<T>) -> Cx<T> {
        assert_eq!(z.dim(), self.dim, "point dimension mismatch");
        let max_exp: Vec<u32> = (0..self.dim)
            .map(|j| self.terms.keys().map(|e| e[j]).max().unwrap_or(0))
            .collect();
        let powers: Vec<Vec<Cx<T>>> = z
            .coords()
            .iter()
            .zip(&max_exp)
            .map(|(&zj, &m)| {
                let mut v = Vec::with_capacity(m as usize + 1);
                let mut p = Cx::new(T::one(), T::zero());
                v.push(p);
                for _ in 0..m {
                    p = p * zj;
                    v.push(p);
                }
                v
            })
            .collect();
        self.terms
            .iter()
            .fold(Cx::new(T::zero(), T::zero()), |acc, (e, c)| {
                let mono = e
                    .iter()
                    .enumerate()
                    .fold(Cx::new(T::one(), T::zero()), |m, (j, &k)| {
                        m * powers[j][k as usize]
                    });
                acc + *c * mono
            })
    }

    /// `p(z + c)` re-expanded by the binomial theorem.
    pub fn shift(&self, c: &Point<T>) -> Self {
        assert_eq!(c.dim(), self.dim, "shift dimension mismatch");
        let mut out = Self::zero(self.dim);
        for (exp, coef) in &self.terms {
            // product over coordinates of Σ_k C(e,k) z^k c^(e-k)
            let mut partial: Vec<(Vec<u32>, Cx<T>)> = vec![(vec![0; self.dim], *coef)];
            for (j, &e) in exp.iter().enumerate() {
                if e == 0 {
                    continue;
                }
                let cj = c.coords()[j];
                let mut next = Vec::with_capacity(partial.len() * (e as usize + 1));
                for (pe, pc) in &partial {
                    for k in 0..=e {
                        let binom = T::from_u128(binomial(e, k)).expect("binomial fits");
                        let factor = cj.powu(e - k) * binom;
                        let mut ne = pe.clone();
                        ne[j] = k;
                        next.push((ne, *pc * factor));
                    }
                }
                partial = next;
            }
            for (e, c) in partial {
                let entry = out
                    .terms
                    .entry(e)
                    .or_insert_with(|| Cx::new(T::zero(), T::zero()));
                *entry = *entry + c;
            }
        }
        out.prune();
        out
    }

    pub fn derivative(&self, axis: usize) -> Self {
        assert!(axis < self.dim, "axis out of range");
        let mut out = Self::zero(self.dim);
        for (exp, c) in &self.terms {
            let e = exp[axis];
            if e == 0 {
                continue;
            }
            let mut ne = exp.clone();
            ne[axis] = e - 1;
            let entry = out
                .terms
                .entry(ne)
                .or_insert_with(|| Cx::new(T::zero(), T::zero()));
            *entry = *entry + *c * T::from_u32(e).unwrap();
        }
        out.prune();
        out
    }

    /// Majorant `Σ |c_α| r^{|α|}` bounding `|p|` on the polydisc of radius `r`.
    pub fn majorant(&self, r: T) -> T {
        self.terms.iter().fold(T::zero(), |acc, (e, c)| {
            acc + c.norm() * r.powi(e.iter().sum::<u32>() as i32)
        })
    }
}

/// Binomial coefficient in exact integer arithmetic.
pub fn binomial(n: u32, k: u32) -> u128 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k) as u128;
    let n = n as u128;
    (0..k).fold(1u128, |acc, i| acc * (n - i) / (i + 1))
}

#[cfg(test)]
mod tests {
    use super::*;

    type C = Cx<f64>;

    fn c(re: f64) -> C {
        C::new(re, 0.0)
    }

    #[test]
    fn binomials() {
        assert_eq!(binomial(5, 2), 10);
        assert_eq!(binomial(10, 0), 1);
        assert_eq!(binomial(30, 15), 155117520);
        assert_eq!(binomial(3, 4), 0);
    }

    #[test]
    fn shift_square_by_unit() {
        let z1 = MultiPoly::<f64>::var(2, 0);
        let sq = z1.pow(2);
        let shifted = sq.shift(&Point::new(vec![c(1.0), c(0.0)]));
        let expect = MultiPoly::from_terms(
            2,
            [
                (vec![2, 0], c(1.0)),
                (vec![1, 0], c(2.0)),
                (vec![0, 0], c(1.0)),
            ],
        );
        assert_eq!(shifted, expect);
    }

    #[test]
    fn no_zero_terms_are_stored() {
        let z1 = MultiPoly::<f64>::var(1, 0);
        let d = z1.add(&z1.scale(c(-1.0)));
        assert!(d.is_empty());
        assert_eq!(d.as_constant(), Some(c(0.0)));
    }

    #[test]
    fn univariate_composition_matches_power() {
        let form = LinearForm::new(vec![c(2.0), c(-4.0), c(1.0)]);
        let p = MultiPoly::univariate_in(&form, &[c(0.0), c(0.0), c(1.0)]);
        assert_eq!(p, form.to_poly().pow(2));
        let z = Point::new(vec![C::new(0.1, 0.2), C::new(-0.3, 0.0), C::new(0.5, -0.5)]);
        let s = form.eval(&z);
        assert!((p.eval(&z) - s * s).norm() < 1e-14);
    }

    #[test]
    fn derivative_of_monomial() {
        let p = MultiPoly::<f64>::from_terms(2, [(vec![3, 1], c(2.0))]);
        assert_eq!(
            p.derivative(0),
            MultiPoly::from_terms(2, [(vec![2, 1], c(6.0))])
        );
        assert_eq!(
            p.derivative(1),
            MultiPoly::from_terms(2, [(vec![3, 0], c(2.0))])
        );
    }
}
