use std::sync::{Arc, OnceLock};

use proptest::prelude::*;
use qdeform::abgroup::{
    add_coboundary, add_cohomologous, coboundary, cohomologous, skew_invariant, AdditiveCochain, AdditiveCocycle, BilinearCocycle,
    GrpElt, MVec, OneCochain,
};
use qdeform::cleft::{pair_equivalent, PairSigmaMu};
use qdeform::freealg::{Element, Mono, Presentation};
use qdeform::hopf::{coproduct, group_samples, sample_basis, tensor_mul, CoactionSpec};
use qdeform::scalars::rat_frac;
use qdeform::uq::{build_borel, build_uq, resolve, uq_datum, LambdaMode, UqInput};
use qdeform::Scalar;

fn poly(coeffs: &[i64]) -> Scalar {
    coeffs.iter().enumerate().fold(Scalar::zero(), |acc, (k, &c)| acc.add(&Scalar::from_int(c).mul(&Scalar::q_pow(k as i64 - 1))))
}

fn scalar() -> impl Strategy<Value = Scalar> {
    (prop::collection::vec(-4i64..=4, 1..4), prop::collection::vec(-3i64..=3, 1..3)).prop_map(|(n, d)| {
        let den = poly(&d);
        let den = if den.is_zero() { Scalar::one() } else { den };
        poly(&n).div(&den).unwrap()
    })
}

fn nonzero_scalar() -> impl Strategy<Value = Scalar> {
    scalar().prop_map(|s| if s.is_zero() { Scalar::from_int(7) } else { s })
}

fn grp(m: usize) -> impl Strategy<Value = GrpElt> {
    prop::collection::vec(-3i32..=3, m).prop_map(|v| GrpElt::from_slice(&v))
}

/// Nonzero multiplicative values of the form `c q^k` keep the cocycle tests cheap.
fn unit() -> impl Strategy<Value = Scalar> + Clone {
    (prop::sample::select(vec![1i64, -1, 2, -3]), -3i64..=3).prop_map(|(c, k)| Scalar::from_int(c).mul(&Scalar::q_pow(k)))
}

fn square<T: Clone + std::fmt::Debug>(m: usize, s: impl Strategy<Value = T> + Clone) -> impl Strategy<Value = Vec<Vec<T>>> {
    prop::collection::vec(prop::collection::vec(s, m), m)
}

fn mvec(d: usize) -> impl Strategy<Value = MVec> + Clone {
    prop::collection::vec((-5i64..=5).prop_map(Scalar::from_int), d).prop_map(MVec)
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 64, ..ProptestConfig::default() })]

    #[test]
    fn scalar_field_axioms(a in scalar(), b in scalar(), c in scalar()) {
        prop_assert_eq!(a.add(&b), b.add(&a));
        prop_assert_eq!(a.mul(&b), b.mul(&a));
        prop_assert_eq!(a.add(&b).add(&c), a.add(&b.add(&c)));
        prop_assert_eq!(a.mul(&b).mul(&c), a.mul(&b.mul(&c)));
        prop_assert_eq!(a.mul(&b.add(&c)), a.mul(&b).add(&a.mul(&c)));
        prop_assert!(a.sub(&a).is_zero());
        if !a.is_zero() {
            prop_assert!(a.mul(&a.inv().unwrap()).is_one());
            prop_assert_eq!(b.div(&a).unwrap().mul(&a), b.clone());
        }
    }

    #[test]
    fn scalar_text_round_trip(a in scalar()) {
        let back: Scalar = a.to_string().parse().unwrap();
        prop_assert_eq!(back, a);
    }

    #[test]
    fn specialization_is_a_ring_map(a in scalar(), b in scalar()) {
        let q0 = rat_frac(5, 2);
        if let (Ok(x), Ok(y)) = (a.specialize(&q0), b.specialize(&q0)) {
            prop_assert_eq!(a.mul(&b).specialize(&q0).unwrap(), x.clone() * y.clone());
            prop_assert_eq!(a.add(&b).specialize(&q0).unwrap(), x + y);
        }
    }

    #[test]
    fn bilinear_cocycles_satisfy_the_cocycle_identity(mat in square(3, unit()), a in grp(3), b in grp(3), c in grp(3)) {
        let s = BilinearCocycle::from_matrix(mat);
        let lhs = s.eval(&a, &b).mul(&s.eval(&a.add(&b), &c));
        let rhs = s.eval(&b, &c).mul(&s.eval(&a, &b.add(&c)));
        prop_assert_eq!(lhs, rhs);
    }

    #[test]
    fn coboundaries_have_trivial_skew_invariant(lin in prop::collection::vec(unit(), 3), sym in square(3, unit()), mat in square(3, unit())) {
        // Only the upper triangle of the symmetric part is read.
        let eta = OneCochain { linear: lin, symmetric: sym };
        prop_assert!(skew_invariant(&coboundary(&eta)).is_trivial());
        let sigma = BilinearCocycle::from_matrix(mat);
        let twisted = sigma.mul(&coboundary(&eta));
        prop_assert_eq!(skew_invariant(&twisted), skew_invariant(&sigma));
        let w = cohomologous(&sigma, &twisted).unwrap();
        for a in group_samples(3).iter().chain([GrpElt::from_slice(&[2, -1, 3])].iter()) {
            for b in group_samples(3) {
                prop_assert_eq!(sigma.mul(&coboundary(&w)).eval(a, &b), twisted.eval(a, &b));
            }
        }
    }

    #[test]
    fn additive_cocycle_identity_and_witnesses(mat in square(2, mvec(2)), lin in prop::collection::vec(mvec(2), 2), sym in square(2, mvec(2)),
                                                a in grp(2), b in grp(2), c in grp(2)) {
        let s = AdditiveCocycle { matrix: mat };
        prop_assert_eq!(s.eval(&a.add(&b), &c).add(&s.eval(&a, &b)), s.eval(&a, &b.add(&c)).add(&s.eval(&b, &c)));
        let t = AdditiveCochain { linear: lin, symmetric: sym };
        let s2 = s.add(&add_coboundary(&t));
        let w = add_cohomologous(&s, &s2).unwrap();
        prop_assert_eq!(s.add(&add_coboundary(&w)).eval(&a, &b), s2.eval(&a, &b));
        prop_assert!(add_coboundary(&t).is_symmetric());
    }
}

struct Algebras {
    uq_sl2: Arc<Presentation<Scalar>>,
    borel_sl3: Arc<Presentation<Scalar>>,
    uq_sl2_basis: Vec<Mono>,
    borel_sl3_basis: Vec<Mono>,
}

fn algebras() -> &'static Algebras {
    static CELL: OnceLock<Algebras> = OnceLock::new();
    CELL.get_or_init(|| {
        let a1 = resolve(&UqInput::preset("A1").unwrap()).unwrap();
        let a2 = resolve(&UqInput::preset("A2").unwrap()).unwrap();
        let uq_sl2 = build_uq(&a1, LambdaMode::Standard).unwrap().presentation;
        let borel_sl3 = build_borel(&a2).unwrap().presentation;
        let uq_sl2_basis = sample_basis(&uq_sl2, 3, &group_samples(1));
        let borel_sl3_basis = sample_basis(&borel_sl3, 3, &group_samples(2));
        Algebras { uq_sl2, borel_sl3, uq_sl2_basis, borel_sl3_basis }
    })
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 48, ..ProptestConfig::default() })]

    #[test]
    fn multiplication_is_associative(i in 0usize..1000, j in 0usize..1000, k in 0usize..1000, sl3 in any::<bool>()) {
        let al = algebras();
        let (p, basis) = if sl3 { (&al.borel_sl3, &al.borel_sl3_basis) } else { (&al.uq_sl2, &al.uq_sl2_basis) };
        let pick = |n: usize| Element::from_mono(basis[n % basis.len()].clone());
        let (a, b, c) = (pick(i), pick(j), pick(k));
        prop_assert_eq!(p.mul(&p.mul(&a, &b), &c), p.mul(&a, &p.mul(&b, &c)));
    }

    #[test]
    fn coproduct_is_multiplicative(i in 0usize..1000, j in 0usize..1000) {
        let al = algebras();
        let p = &al.uq_sl2;
        let spec = CoactionSpec::hopf(p.clone());
        let basis = &al.uq_sl2_basis;
        let a = Element::from_mono(basis[i % basis.len()].clone());
        let b = Element::from_mono(basis[j % basis.len()].clone());
        let lhs = coproduct(&p.mul(&a, &b), &spec);
        let rhs = tensor_mul(&coproduct(&a, &spec), &coproduct(&b, &spec), &[p, p]);
        prop_assert!(lhs.sub(&rhs).is_zero());
    }

    #[test]
    fn mu_times_a_square_is_equivalent(mu in nonzero_scalar(), w in nonzero_scalar()) {
        let u = resolve(&UqInput::preset("A1").unwrap()).unwrap();
        let d = uq_datum(&u).unwrap();
        let pair = |m: Scalar| PairSigmaMu { sigma: BilinearCocycle::trivial(1), mu: [((1, 0), m)].into_iter().collect() };
        let p = pair(mu.clone());
        let p2 = pair(mu.mul(&w).mul(&w));
        let res = pair_equivalent(&d, &p, &p2);
        prop_assert!(res.is_equivalent());
        let zero = PairSigmaMu { sigma: BilinearCocycle::trivial(1), mu: Default::default() };
        prop_assert!(!pair_equivalent(&d, &p, &zero).is_equivalent());
    }
}
