use divisorial::cone::{class_equal, class_project, normal_form, LatticeData};
use divisorial::fields::{bracket, Chart, FieldBasis, VectorField};
use divisorial::metric::{build_metric, HermitianMatrix};
use divisorial::symkernel::linalg::to_ratmatrix;
use divisorial::symkernel::{
    parse_poly_in, poly_gcd, ratmat_inverse, ratmat_mul, squarefree_decompose, vars_from, ExactScalar, Poly, RatFunc,
    RatMatrix, Vars,
};
use nalgebra::DMatrix;
use num_complex::Complex64;
use proptest::prelude::*;

type Terms = Vec<(u32, u32, i64, i64)>;

fn vars() -> Vars {
    vars_from(&["x", "y"])
}

fn poly(t: &Terms) -> Poly {
    Poly::from_terms(
        vars(),
        t.iter()
            .map(|&(a, b, re, im)| (vec![a, b], ExactScalar::gaussian(re, im))),
    )
}

fn terms(max_deg: u32, max_terms: usize) -> impl Strategy<Value = Terms> {
    prop::collection::vec((0..=max_deg, 0..=max_deg, -3i64..=3, -2i64..=2), 0..=max_terms)
}

fn nonzero(max_deg: u32, max_terms: usize) -> impl Strategy<Value = Terms> {
    terms(max_deg, max_terms).prop_filter("nonzero", |t| !poly(t).is_zero())
}

fn field(t: &[Terms; 2]) -> VectorField {
    VectorField::new(Chart::affine(&["x", "y"]), vec![poly(&t[0]), poly(&t[1])]).unwrap()
}

fn field_strategy() -> impl Strategy<Value = [Terms; 2]> {
    [terms(2, 3), terms(2, 3)]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn ring_axioms(a in terms(2, 4), b in terms(2, 4), c in terms(2, 4)) {
        let (a, b, c) = (poly(&a), poly(&b), poly(&c));
        prop_assert_eq!(a.add(&b), b.add(&a));
        prop_assert_eq!(a.mul(&b), b.mul(&a));
        prop_assert_eq!(a.add(&b).add(&c), a.add(&b.add(&c)));
        prop_assert_eq!(a.mul(&b).mul(&c), a.mul(&b.mul(&c)));
        prop_assert_eq!(a.mul(&b.add(&c)), a.mul(&b).add(&a.mul(&c)));
        prop_assert!(a.sub(&a).is_zero());
        prop_assert_eq!(a.mul(&Poly::one(vars())), a.clone());
    }

    #[test]
    fn division_identity(a in terms(3, 5), d in nonzero(2, 3)) {
        let (a, d) = (poly(&a), poly(&d));
        let (q, r) = a.div_rem(&d);
        prop_assert_eq!(q.mul(&d).add(&r), a);
    }

    #[test]
    fn gcd_divides_and_captures_common_factor(a in nonzero(2, 3), b in nonzero(2, 3), c in nonzero(1, 3)) {
        let (a, b, c) = (poly(&a), poly(&b), poly(&c));
        let (ac, bc) = (a.mul(&c), b.mul(&c));
        let g = poly_gcd(&ac, &bc);
        prop_assert!(g.divides(&ac) && g.divides(&bc));
        prop_assert!(c.divides(&g), "gcd {} misses common factor {}", g, c);
    }

    #[test]
    fn squarefree_reassembles(a in nonzero(1, 3), b in nonzero(1, 3), e in 1u32..=3) {
        let p = poly(&a).pow(e).mul(&poly(&b));
        let sf = squarefree_decompose(&p);
        prop_assert_eq!(sf.reassemble(&p), p.clone());
        // square-free in characteristic 0: no common factor with all partials
        for (f, _) in &sf.factors {
            let g = (0..2).fold(f.clone(), |g, k| poly_gcd(&g, &f.derivative(k)));
            prop_assert!(g.is_constant(), "{} is not square-free", f);
        }
        for i in 0..sf.factors.len() {
            for j in i + 1..sf.factors.len() {
                prop_assert!(poly_gcd(&sf.factors[i].0, &sf.factors[j].0).is_constant());
            }
        }
    }

    #[test]
    fn print_parse_round_trip(a in terms(3, 5)) {
        let p = poly(&a);
        prop_assert_eq!(parse_poly_in(&p.to_string(), &vars()).unwrap(), p);
    }

    #[test]
    fn inverse_times_matrix_is_identity(entries in prop::collection::vec(terms(1, 2), 4)) {
        let m: RatMatrix = (0..2)
            .map(|i| (0..2).map(|j| RatFunc::from_poly(poly(&entries[2 * i + j]))).collect())
            .collect();
        if let Ok(inv) = ratmat_inverse(&m) {
            let prod = ratmat_mul(&inv, &m);
            for (i, row) in prod.iter().enumerate() {
                for (j, e) in row.iter().enumerate() {
                    let want = if i == j { RatFunc::one(vars()) } else { RatFunc::zero(vars()) };
                    prop_assert_eq!(e, &want);
                }
            }
        }
    }

    #[test]
    fn bracket_antisymmetric_and_jacobi(u in field_strategy(), v in field_strategy(), w in field_strategy()) {
        let (u, v, w) = (field(&u), field(&v), field(&w));
        let uv = bracket(&u, &v).unwrap();
        prop_assert!(uv.add(&bracket(&v, &u).unwrap()).unwrap().is_zero());
        let jacobi = bracket(&u, &bracket(&v, &w).unwrap()).unwrap()
            .add(&bracket(&v, &bracket(&w, &u).unwrap()).unwrap()).unwrap()
            .add(&bracket(&w, &uv).unwrap()).unwrap();
        prop_assert!(jacobi.is_zero());
    }

    #[test]
    fn sigma_inverts_s(s in field_strategy(), t in field_strategy()) {
        let b = FieldBasis::new(vec![field(&s), field(&t)]).unwrap();
        if let Ok(m) = build_metric(&b) {
            let prod = ratmat_mul(&to_ratmatrix(&b.matrix()), m.sigma());
            for (i, row) in prod.iter().enumerate() {
                for (j, e) in row.iter().enumerate() {
                    let want = if i == j { RatFunc::one(vars()) } else { RatFunc::zero(vars()) };
                    prop_assert_eq!(e, &want);
                }
            }
        }
    }

    #[test]
    fn class_equality_is_an_equivalence(
        base in prop::array::uniform4(-3.0f64..3.0),
        shifts in prop::collection::vec(prop::array::uniform3(-3.0f64..3.0), 3),
    ) {
        let nf = normal_form(&LatticeData::torus_type(2));
        let omega = |s: [f64; 3]| {
            let w = DMatrix::from_row_slice(2, 2, &[
                Complex64::new(base[0] + s[0], 0.0), Complex64::new(base[2] + s[1], base[3]),
                Complex64::new(base[2] + s[1], -base[3]), Complex64::new(base[1] + s[2], 0.0),
            ]);
            class_project(&HermitianMatrix::new(w).unwrap(), &nf).unwrap()
        };
        let c: Vec<_> = shifts.iter().map(|s| omega(*s)).collect();
        for x in &c {
            prop_assert!(class_equal(x, x));
            for y in &c {
                prop_assert_eq!(class_equal(x, y), class_equal(y, x));
                prop_assert!(class_equal(x, y));
                for z in &c {
                    prop_assert!(!(class_equal(x, y) && class_equal(y, z)) || class_equal(x, z));
                }
            }
        }
        // moving the imaginary part leaves the class
        let other = {
            let w = DMatrix::from_row_slice(2, 2, &[
                Complex64::new(base[0], 0.0), Complex64::new(base[2], base[3] + 1.0),
                Complex64::new(base[2], -base[3] - 1.0), Complex64::new(base[1], 0.0),
            ]);
            class_project(&HermitianMatrix::new(w).unwrap(), &nf).unwrap()
        };
        prop_assert!(!class_equal(&c[0], &other));
    }
}
