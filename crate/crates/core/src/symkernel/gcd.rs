//! Multivariate gcd and square-free decomposition over ℚ(i).
//!
//! The gcd is the classical recursive one: pick a main variable, split off
//! contents (gcds of coefficients, one variable fewer), and run a primitive
//! pseudo-remainder sequence on the primitive parts. Square-free structure
//! follows Yun's algorithm on the primitive part, with the content handled
//! recursively.

use num_traits::Zero;

use super::poly::Poly;
use super::scalar::ExactScalar;

fn main_var(a: &Poly, b: &Poly) -> Option<usize> {
    (0..a.nvars()).find(|&i| a.degree_in(i) > 0 || b.degree_in(i) > 0)
}

fn trim(mut u: Vec<Poly>) -> Vec<Poly> {
    while u.len() > 1 && u.last().is_some_and(Poly::is_zero) {
        u.pop();
    }
    u
}

fn content(coeffs: &[Poly]) -> Poly {
    let mut g = Poly::zero(coeffs[0].vars().clone());
    for c in coeffs {
        g = gcd_rec(&g, c);
        if g.is_constant() && !g.is_zero() {
            return Poly::one(g.vars().clone());
        }
    }
    g
}

/// Divided by the content and scaled by a unit so the leading scalar is 1;
/// without the scaling the rationals in the remainder sequence blow up.
fn primitive_part(coeffs: &[Poly]) -> Vec<Poly> {
    let c = content(coeffs);
    let pp: Vec<Poly> = coeffs
        .iter()
        .map(|p| p.exact_div(&c).expect("content divides every coefficient"))
        .collect();
    let unit = pp
        .iter()
        .rev()
        .find(|p| !p.is_zero())
        .and_then(|p| p.leading_coeff().inv())
        .unwrap_or_else(|| ExactScalar::from_int(1));
    pp.iter().map(|p| p.scale(&unit)).collect()
}

/// `lc(q)^k * p mod q` in the main variable, for whatever `k` the loop needs.
fn pseudo_rem(p: &[Poly], q: &[Poly]) -> Vec<Poly> {
    let dq = q.len() - 1;
    let lc = &q[dq];
    let mut r: Vec<Poly> = p.to_vec();
    while r.len() > dq && !(r.len() == 1 && r[0].is_zero()) {
        let dr = r.len() - 1;
        let t = r[dr].clone();
        let shift = dr - dq;
        for c in r.iter_mut() {
            *c = c.mul(lc);
        }
        for (k, qc) in q.iter().enumerate() {
            r[k + shift] = r[k + shift].sub(&t.mul(qc));
        }
        debug_assert!(r[dr].is_zero());
        r.pop();
        if r.is_empty() {
            r.push(Poly::zero(lc.vars().clone()));
        }
        r = trim(r);
    }
    r
}

fn gcd_rec(a: &Poly, b: &Poly) -> Poly {
    if a.is_zero() {
        return b.clone();
    }
    if b.is_zero() {
        return a.clone();
    }
    if a.is_constant() || b.is_constant() {
        return Poly::one(a.vars().clone());
    }
    let (a, b) = Poly::align(a, b);
    let v = main_var(&a, &b).expect("non-constant polynomial has a variable");
    let ua = a.to_univariate(v);
    let ub = b.to_univariate(v);
    let c = gcd_rec(&content(&ua), &content(&ub));
    let mut p = primitive_part(&ua);
    let mut q = primitive_part(&ub);
    if p.len() < q.len() {
        std::mem::swap(&mut p, &mut q);
    }
    let g = loop {
        if q.len() == 1 {
            break vec![Poly::one(a.vars().clone())];
        }
        let r = pseudo_rem(&p, &q);
        if r.len() == 1 && r[0].is_zero() {
            break q;
        }
        p = q;
        q = primitive_part(&r);
    };
    let g = Poly::from_univariate(a.vars(), v, &primitive_part(&g));
    c.mul(&g)
}

/// Monic greatest common divisor. `gcd(0, 0)` is the zero polynomial.
pub fn poly_gcd(a: &Poly, b: &Poly) -> Poly {
    gcd_rec(a, b).monic()
}

/// A square-free decomposition `p = unit * prod(factor^mult)`.
#[derive(Clone, Debug, PartialEq)]
pub struct SquareFree {
    pub unit: ExactScalar,
    /// Monic, pairwise coprime, square-free; sorted by multiplicity.
    pub factors: Vec<(Poly, u32)>,
}

impl SquareFree {
    pub fn reassemble(&self, like: &Poly) -> Poly {
        let mut acc = Poly::constant(like.vars().clone(), self.unit.clone());
        for (f, m) in &self.factors {
            acc = acc.mul(&f.pow(*m));
        }
        acc
    }

    pub fn is_reduced(&self) -> bool {
        self.factors.iter().all(|(_, m)| *m == 1)
    }
}

fn push_merge(out: &mut Vec<(Poly, u32)>, f: Poly, m: u32) {
    if f.is_constant() {
        return;
    }
    if let Some(slot) = out.iter_mut().find(|(_, k)| *k == m) {
        slot.0 = slot.0.mul(&f);
    } else {
        out.push((f, m));
    }
}

fn squarefree_rec(p: &Poly, out: &mut Vec<(Poly, u32)>) {
    if p.is_constant() {
        return;
    }
    let v = main_var(p, p).unwrap();
    let u = p.to_univariate(v);
    let cont = content(&u);
    squarefree_rec(&cont, out);
    let pp = p.exact_div(&cont).expect("content divides");

    // Yun on the primitive part; every factor of `pp` involves `v`.
    let d = pp.derivative(v);
    let g = poly_gcd(&pp, &d);
    let mut a = pp.exact_div(&g).unwrap();
    let b = d.exact_div(&g).unwrap();
    let mut c = b.sub(&a.derivative(v));
    let mut mult = 1;
    while !a.is_constant() {
        let h = poly_gcd(&a, &c);
        a = a.exact_div(&h).unwrap();
        let b = c.exact_div(&h).unwrap();
        c = b.sub(&a.derivative(v));
        push_merge(out, h, mult);
        mult += 1;
    }
}

/// Yun-style square-free decomposition. Panics on the zero polynomial.
pub fn squarefree_decompose(p: &Poly) -> SquareFree {
    assert!(!p.is_zero(), "square-free decomposition of zero");
    let mut raw = Vec::new();
    squarefree_rec(p, &mut raw);
    let mut factors: Vec<(Poly, u32)> = raw.into_iter().map(|(f, m)| (f.monic(), m)).collect();
    factors.sort_by_key(|(_, m)| *m);
    let mut prod = Poly::one(p.vars().clone());
    for (f, m) in &factors {
        prod = prod.mul(&f.pow(*m));
    }
    let q = p.exact_div(&prod).expect("factors reassemble");
    debug_assert!(q.is_constant() && !q.constant_value().is_zero());
    SquareFree {
        unit: q.constant_value(),
        factors,
    }
}
