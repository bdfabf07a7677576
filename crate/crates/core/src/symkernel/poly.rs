//! Sparse multivariate polynomials over ℚ(i).
//!
//! Terms are kept in a `BTreeMap` keyed by [`Monomial`], whose ordering is
//! graded lexicographic with respect to the declared variable order, so the
//! last entry of the map is always the leading term.

use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use num_complex::Complex64;
use num_traits::{One, Zero};

use super::scalar::ExactScalar;

/// Exponent vector, ordered graded-lexicographically.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Monomial(pub Vec<u32>);

impl Monomial {
    pub fn one(nvars: usize) -> Self {
        Monomial(vec![0; nvars])
    }

    pub fn degree(&self) -> u32 {
        self.0.iter().sum()
    }

    pub fn divides(&self, other: &Monomial) -> bool {
        self.0.iter().zip(&other.0).all(|(a, b)| a <= b)
    }

    fn mul(&self, other: &Monomial) -> Monomial {
        Monomial(self.0.iter().zip(&other.0).map(|(a, b)| a + b).collect())
    }

    fn div(&self, other: &Monomial) -> Monomial {
        Monomial(self.0.iter().zip(&other.0).map(|(a, b)| a - b).collect())
    }
}

impl Ord for Monomial {
    fn cmp(&self, other: &Self) -> Ordering {
        self.degree().cmp(&other.degree()).then_with(|| self.0.cmp(&other.0))
    }
}

impl PartialOrd for Monomial {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

pub type Vars = Arc<[String]>;

pub fn vars_from<S: AsRef<str>>(names: &[S]) -> Vars {
    names.iter().map(|s| s.as_ref().to_string()).collect()
}

#[derive(Clone, Debug)]
pub struct Poly {
    vars: Vars,
    terms: BTreeMap<Monomial, ExactScalar>,
}

impl PartialEq for Poly {
    fn eq(&self, other: &Self) -> bool {
        if self.vars == other.vars {
            return self.terms == other.terms;
        }
        let (a, b) = Poly::align(self, other);
        a.terms == b.terms
    }
}

impl Eq for Poly {}

impl Poly {
    pub fn zero(vars: Vars) -> Self {
        Poly {
            vars,
            terms: BTreeMap::new(),
        }
    }

    pub fn one(vars: Vars) -> Self {
        Poly::constant(vars, ExactScalar::one())
    }

    pub fn constant(vars: Vars, c: ExactScalar) -> Self {
        let mut p = Poly::zero(vars);
        let n = p.vars.len();
        p.add_term(Monomial::one(n), c);
        p
    }

    /// The variable at position `idx`.
    pub fn var(vars: Vars, idx: usize) -> Self {
        let mut e = vec![0; vars.len()];
        e[idx] = 1;
        let mut p = Poly::zero(vars);
        p.add_term(Monomial(e), ExactScalar::one());
        p
    }

    pub fn monomial(vars: Vars, exps: Vec<u32>, c: ExactScalar) -> Self {
        assert_eq!(exps.len(), vars.len());
        let mut p = Poly::zero(vars);
        p.add_term(Monomial(exps), c);
        p
    }

    pub fn from_terms(vars: Vars, terms: impl IntoIterator<Item = (Vec<u32>, ExactScalar)>) -> Self {
        let mut p = Poly::zero(vars);
        for (e, c) in terms {
            assert_eq!(e.len(), p.vars.len());
            p.add_term(Monomial(e), c);
        }
        p
    }

    fn add_term(&mut self, m: Monomial, c: ExactScalar) {
        if c.is_zero() {
            return;
        }
        match self.terms.entry(m) {
            std::collections::btree_map::Entry::Vacant(v) => {
                v.insert(c);
            }
            std::collections::btree_map::Entry::Occupied(mut o) => {
                *o.get_mut() += &c;
                if o.get().is_zero() {
                    o.remove();
                }
            }
        }
    }

    pub fn vars(&self) -> &Vars {
        &self.vars
    }

    pub fn nvars(&self) -> usize {
        self.vars.len()
    }

    pub fn var_index(&self, name: &str) -> Option<usize> {
        self.vars.iter().position(|v| v == name)
    }

    /// Terms in ascending graded-lex order.
    pub fn terms(&self) -> impl DoubleEndedIterator<Item = (&Monomial, &ExactScalar)> {
        self.terms.iter()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn coeff(&self, m: &Monomial) -> ExactScalar {
        self.terms.get(m).cloned().unwrap_or_else(ExactScalar::zero)
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_constant(&self) -> bool {
        self.terms.keys().all(|m| m.degree() == 0)
    }

    pub fn is_one(&self) -> bool {
        self.is_constant() && self.constant_value().is_one()
    }

    /// Constant coefficient.
    pub fn constant_value(&self) -> ExactScalar {
        self.coeff(&Monomial::one(self.nvars()))
    }

    pub fn total_degree(&self) -> Option<u32> {
        self.terms.keys().map(Monomial::degree).max()
    }

    pub fn degree_in(&self, idx: usize) -> u32 {
        self.terms.keys().map(|m| m.0[idx]).max().unwrap_or(0)
    }

    pub fn is_homogeneous(&self) -> bool {
        let mut degs = self.terms.keys().map(Monomial::degree);
        match degs.next() {
            None => true,
            Some(d) => degs.all(|e| e == d),
        }
    }

    pub fn leading_term(&self) -> Option<(&Monomial, &ExactScalar)> {
        self.terms.iter().next_back()
    }

    pub fn leading_coeff(&self) -> ExactScalar {
        self.leading_term()
            .map(|(_, c)| c.clone())
            .unwrap_or_else(ExactScalar::zero)
    }

    /// Divide by the leading coefficient. Zero stays zero.
    pub fn monic(&self) -> Poly {
        match self.leading_coeff().inv() {
            Some(inv) => self.scale(&inv),
            None => self.clone(),
        }
    }

    pub fn scale(&self, c: &ExactScalar) -> Poly {
        if c.is_zero() {
            return Poly::zero(self.vars.clone());
        }
        Poly {
            vars: self.vars.clone(),
            terms: self.terms.iter().map(|(m, a)| (m.clone(), a * c)).collect(),
        }
    }

    /// Re-express over `vars`, which must contain every variable actually used.
    pub fn with_vars(&self, vars: &Vars) -> Poly {
        if &self.vars == vars {
            return self.clone();
        }
        let map: Vec<usize> = self
            .vars
            .iter()
            .map(|v| vars.iter().position(|w| w == v).unwrap_or(usize::MAX))
            .collect();
        let mut out = Poly::zero(vars.clone());
        for (m, c) in &self.terms {
            let mut e = vec![0; vars.len()];
            for (i, &k) in m.0.iter().enumerate() {
                if k > 0 {
                    assert!(map[i] != usize::MAX, "variable {} not in target ring", self.vars[i]);
                    e[map[i]] = k;
                }
            }
            out.add_term(Monomial(e), c.clone());
        }
        out
    }

    /// Bring two polynomials into a common ring: `a`'s variables first, then
    /// any new ones from `b` in their order.
    pub fn align(a: &Poly, b: &Poly) -> (Poly, Poly) {
        if a.vars == b.vars {
            return (a.clone(), b.clone());
        }
        let mut names: Vec<String> = a.vars.to_vec();
        for v in b.vars.iter() {
            if !names.contains(v) {
                names.push(v.clone());
            }
        }
        let vars: Vars = names.into();
        (a.with_vars(&vars), b.with_vars(&vars))
    }

    fn binary(&self, other: &Poly, f: impl FnOnce(&Poly, &Poly) -> Poly) -> Poly {
        if self.vars == other.vars {
            f(self, other)
        } else {
            let (a, b) = Poly::align(self, other);
            f(&a, &b)
        }
    }

    pub fn add(&self, other: &Poly) -> Poly {
        self.binary(other, |a, b| {
            let mut out = a.clone();
            for (m, c) in &b.terms {
                out.add_term(m.clone(), c.clone());
            }
            out
        })
    }

    pub fn sub(&self, other: &Poly) -> Poly {
        self.binary(other, |a, b| {
            let mut out = a.clone();
            for (m, c) in &b.terms {
                out.add_term(m.clone(), -c);
            }
            out
        })
    }

    pub fn mul(&self, other: &Poly) -> Poly {
        self.binary(other, |a, b| {
            let mut out = Poly::zero(a.vars.clone());
            for (ma, ca) in &a.terms {
                for (mb, cb) in &b.terms {
                    out.add_term(ma.mul(mb), ca * cb);
                }
            }
            out
        })
    }

    pub fn neg(&self) -> Poly {
        Poly {
            vars: self.vars.clone(),
            terms: self.terms.iter().map(|(m, c)| (m.clone(), -c)).collect(),
        }
    }

    pub fn pow(&self, e: u32) -> Poly {
        let mut acc = Poly::one(self.vars.clone());
        for _ in 0..e {
            acc = acc.mul(self);
        }
        acc
    }

    /// Formal partial derivative with respect to the variable at `idx`.
    pub fn derivative(&self, idx: usize) -> Poly {
        let mut out = Poly::zero(self.vars.clone());
        for (m, c) in &self.terms {
            let k = m.0[idx];
            if k == 0 {
                continue;
            }
            let mut e = m.0.clone();
            e[idx] -= 1;
            out.add_term(Monomial(e), c * &ExactScalar::from_int(k as i64));
        }
        out
    }

    /// Partial derivative by variable name; zero if the variable is absent.
    pub fn derivative_by(&self, name: &str) -> Poly {
        match self.var_index(name) {
            Some(i) => self.derivative(i),
            None => Poly::zero(self.vars.clone()),
        }
    }

    /// Division by a single divisor in graded-lex order. `{d}` is a Gröbner
    /// basis of `(d)`, so the remainder is zero exactly when `d | self`.
    pub fn div_rem(&self, d: &Poly) -> (Poly, Poly) {
        let (a, d) = Poly::align(self, d);
        assert!(!d.is_zero(), "division by zero polynomial");
        let (lm, lc) = d.leading_term().map(|(m, c)| (m.clone(), c.clone())).unwrap();
        let lc_inv = lc.inv().unwrap();
        let mut q = Poly::zero(a.vars.clone());
        let mut r = Poly::zero(a.vars.clone());
        let mut p = a;
        while let Some((m, c)) = p.leading_term().map(|(m, c)| (m.clone(), c.clone())) {
            if lm.divides(&m) {
                let tm = m.div(&lm);
                let tc = &c * &lc_inv;
                q.add_term(tm.clone(), tc.clone());
                for (dm, dc) in &d.terms {
                    p.add_term(dm.mul(&tm), -(dc * &tc));
                }
            } else {
                p.terms.remove(&m);
                r.add_term(m, c);
            }
        }
        (q, r)
    }

    pub fn exact_div(&self, d: &Poly) -> Option<Poly> {
        let (q, r) = self.div_rem(d);
        r.is_zero().then_some(q)
    }

    pub fn divides(&self, other: &Poly) -> bool {
        other.div_rem(self).1.is_zero()
    }

    /// Replace the variable at `idx` by `value` (which must live in a ring
    /// alignable with this one).
    pub fn substitute(&self, idx: usize, value: &Poly) -> Poly {
        let (base, value) = Poly::align(self, value);
        let mut out = Poly::zero(base.vars.clone());
        let maxk = self.degree_in(idx);
        let powers: Vec<Poly> = std::iter::successors(Some(Poly::one(base.vars.clone())), |p| Some(p.mul(&value)))
            .take(maxk as usize + 1)
            .collect();
        for (m, c) in &base.terms {
            let k = m.0[idx] as usize;
            let mut e = m.0.clone();
            e[idx] = 0;
            let rest = Poly::monomial(base.vars.clone(), e, c.clone());
            out = out.add(&rest.mul(&powers[k]));
        }
        out
    }

    pub fn eval(&self, point: &[ExactScalar]) -> ExactScalar {
        assert_eq!(point.len(), self.nvars());
        let mut acc = ExactScalar::zero();
        for (m, c) in &self.terms {
            let mut t = c.clone();
            for (x, &k) in point.iter().zip(&m.0) {
                if k > 0 {
                    t = &t * &x.pow(k);
                }
            }
            acc += &t;
        }
        acc
    }

    pub fn compile(&self) -> NumPoly {
        NumPoly {
            terms: self.terms.iter().map(|(m, c)| (m.0.clone(), c.to_complex())).collect(),
        }
    }

    pub fn eval_complex(&self, point: &[Complex64]) -> Complex64 {
        self.compile().eval(point)
    }

    /// Coefficients in `x_idx`, each a polynomial in the same ring free of `x_idx`.
    pub fn to_univariate(&self, idx: usize) -> Vec<Poly> {
        let deg = self.degree_in(idx) as usize;
        let mut out = vec![Poly::zero(self.vars.clone()); deg + 1];
        for (m, c) in &self.terms {
            let k = m.0[idx] as usize;
            let mut e = m.0.clone();
            e[idx] = 0;
            out[k].add_term(Monomial(e), c.clone());
        }
        out
    }

    pub fn from_univariate(vars: &Vars, idx: usize, coeffs: &[Poly]) -> Poly {
        let mut out = Poly::zero(vars.clone());
        for (k, c) in coeffs.iter().enumerate() {
            for (m, a) in &c.with_vars(vars).terms {
                let mut e = m.0.clone();
                e[idx] += k as u32;
                out.add_term(Monomial(e), a.clone());
            }
        }
        out
    }

    /// Set `x_idx = 1`.
    pub fn dehomogenize(&self, idx: usize) -> Poly {
        let mut out = Poly::zero(self.vars.clone());
        for (m, c) in &self.terms {
            let mut e = m.0.clone();
            e[idx] = 0;
            out.add_term(Monomial(e), c.clone());
        }
        out
    }

    /// Drop variables that do not occur (keeping declared order).
    pub fn drop_var(&self, idx: usize) -> Poly {
        assert_eq!(self.degree_in(idx), 0);
        let vars: Vars = self
            .vars
            .iter()
            .enumerate()
            .filter(|(i, _)| *i != idx)
            .map(|(_, v)| v.clone())
            .collect();
        let mut out = Poly::zero(vars);
        for (m, c) in &self.terms {
            let mut e = m.0.clone();
            e.remove(idx);
            out.add_term(Monomial(e), c.clone());
        }
        out
    }
}

/// Floating evaluator produced by [`Poly::compile`].
#[derive(Clone, Debug)]
pub struct NumPoly {
    terms: Vec<(Vec<u32>, Complex64)>,
}

impl NumPoly {
    pub fn eval(&self, point: &[Complex64]) -> Complex64 {
        let mut acc = Complex64::new(0.0, 0.0);
        for (e, c) in &self.terms {
            let mut t = *c;
            for (x, &k) in point.iter().zip(e) {
                if k > 0 {
                    t *= x.powu(k);
                }
            }
            acc += t;
        }
        acc
    }
}

impl fmt::Display for Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        for (pos, (m, c)) in self.terms.iter().rev().enumerate() {
            let mono: Vec<String> =
                m.0.iter()
                    .enumerate()
                    .filter(|(_, &k)| k > 0)
                    .map(|(i, &k)| {
                        if k == 1 {
                            self.vars[i].clone()
                        } else {
                            format!("{}^{}", self.vars[i], k)
                        }
                    })
                    .collect();
            let mono = mono.join("*");
            let (neg, body) = c.coefficient_text();
            let body = if mono.is_empty() {
                body
            } else if body == "1" {
                mono
            } else {
                format!("{body}*{mono}")
            };
            match (pos, neg) {
                (0, false) => write!(f, "{body}")?,
                (0, true) => write!(f, "-{body}")?,
                (_, false) => write!(f, " + {body}")?,
                (_, true) => write!(f, " - {body}")?,
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn xy() -> Vars {
        vars_from(&["x", "y"])
    }

    #[test]
    fn difference_of_squares() {
        let v = xy();
        let x = Poly::var(v.clone(), 0);
        let one = Poly::one(v.clone());
        let p = x.add(&one).mul(&x.sub(&one));
        assert_eq!(p.to_string(), "x^2 - 1");
    }

    #[test]
    fn add_zero_is_identity() {
        let v = xy();
        let x = Poly::var(v.clone(), 0);
        assert_eq!(x.add(&Poly::zero(v)), x);
    }

    #[test]
    fn product_of_distinct_rings_unions_variables() {
        let z1 = Poly::var(vars_from(&["z1"]), 0);
        let z2 = Poly::var(vars_from(&["z2"]), 0);
        let p = z1.mul(&z2);
        assert_eq!(p.vars().len(), 2);
        assert_eq!(p.to_string(), "z1*z2");
    }

    #[test]
    fn derivatives() {
        let v = xy();
        let x = Poly::var(v.clone(), 0);
        let y = Poly::var(v.clone(), 1);
        let x2 = x.pow(2);
        assert_eq!(x2.derivative(0), x.scale(&ExactScalar::from_int(2)));
        assert!(x2.derivative(1).is_zero());
        let p = x2.mul(&y).add(&x);
        let expect = x.mul(&y).scale(&ExactScalar::from_int(2)).add(&Poly::one(v));
        assert_eq!(p.derivative(0), expect);
    }

    #[test]
    fn grlex_leading_term() {
        let v = xy();
        let x = Poly::var(v.clone(), 0);
        let y = Poly::var(v.clone(), 1);
        // x*y and y^2 have degree 2; x*y > y^2 lexicographically
        let p = y.pow(2).add(&x.mul(&y)).add(&x);
        assert_eq!(p.leading_term().unwrap().0, &Monomial(vec![1, 1]));
        assert_eq!(p.to_string(), "x*y + y^2 + x");
    }

    #[test]
    fn division_remainder() {
        let v = xy();
        let x = Poly::var(v.clone(), 0);
        let (q, r) = x.scale(&ExactScalar::from_int(2)).div_rem(&x.pow(2));
        assert!(q.is_zero());
        assert_eq!(r, x.scale(&ExactScalar::from_int(2)));
        assert_eq!(x.pow(3).exact_div(&x).unwrap(), x.pow(2));
    }

    #[test]
    fn substitution() {
        let v = xy();
        let x = Poly::var(v.clone(), 0);
        let y = Poly::var(v.clone(), 1);
        let p = x.pow(2).add(&y);
        let s = p.substitute(0, &y.add(&Poly::one(v.clone())));
        assert_eq!(s, y.pow(2).add(&y.scale(&ExactScalar::from_int(3))).add(&Poly::one(v)));
    }
}
