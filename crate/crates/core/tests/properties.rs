use proptest::prelude::*;

use superint_core::laurent::{DerivMonomial, LaurentMonomial, LaurentPoly, Metric};
use superint_core::model::{build_C, ModelParams};
use superint_core::phase::{poisson_bracket, PhasePoly};
use superint_core::racah3::{
    energy_from_rep, find_representations, find_spectrum, m_values, rep_parameter_u, roots, structure_function_eval,
    SignMode,
};
use superint_core::specsolver::{analytic_spectrum_h2, analytic_spectrum_s2};
use superint_core::{HbarPoly, Rational, WeylOp};

const DIM: usize = 3;

fn rat() -> impl Strategy<Value = Rational> {
    (-5i64..=5, 1i64..=4).prop_map(|(n, d)| Rational::new(n, d))
}

fn nonzero_rat() -> impl Strategy<Value = Rational> {
    (1i64..=5, 1i64..=4, any::<bool>()).prop_map(|(n, d, neg)| Rational::new(if neg { -n } else { n }, d))
}

fn hbar_poly() -> impl Strategy<Value = HbarPoly> {
    prop::collection::vec((0u32..=2, rat()), 1..=2).prop_map(HbarPoly::from_terms)
}

fn weyl_term() -> impl Strategy<Value = WeylOp> {
    (
        hbar_poly(),
        prop::collection::vec(-2i32..=2, DIM),
        prop::collection::vec(0u32..=2, DIM),
    )
        .prop_map(|(c, s, d)| WeylOp::term(c, LaurentMonomial::new(s), DerivMonomial::new(d)))
}

fn weyl_op() -> impl Strategy<Value = WeylOp> {
    prop::collection::vec(weyl_term(), 1..=5)
        .prop_map(|ts| ts.iter().fold(WeylOp::zero(DIM), |acc, t| acc.add(t)))
}

fn small_op() -> impl Strategy<Value = WeylOp> {
    prop::collection::vec(weyl_term(), 1..=3)
        .prop_map(|ts| ts.iter().fold(WeylOp::zero(DIM), |acc, t| acc.add(t)))
}

fn test_monomial() -> impl Strategy<Value = LaurentMonomial> {
    prop::collection::vec(-2i32..=3, DIM)
        .prop_filter("total degree ≤ 4", |e| e.iter().sum::<i32>() <= 4)
        .prop_map(LaurentMonomial::new)
}

fn phase_poly() -> impl Strategy<Value = PhasePoly> {
    let term = (
        rat(),
        prop::collection::vec(-2i32..=2, DIM),
        prop::collection::vec(0u32..=1, DIM),
    )
        .prop_map(|(c, s, p)| PhasePoly::term(c, LaurentMonomial::new(s), DerivMonomial::new(p)));
    prop::collection::vec(term, 1..=3).prop_map(|ts| ts.iter().fold(PhasePoly::zero(DIM), |acc, t| acc.add(t)))
}

fn indefinite_metric() -> impl Strategy<Value = Metric> {
    prop::sample::select(
        Metric::all_patterns(DIM)
            .into_iter()
            .filter(|m| m.diag().contains(&-1))
            .collect::<Vec<_>>(),
    )
}

/// Second intersection of the line `e_k + t v` with `g(s, s) = -1`, where
/// `g_kk = -1` makes `e_k` a point of the quadric.
fn surface_point(metric: &Metric, v: &[Rational]) -> Option<Vec<Rational>> {
    let k = metric.diag().iter().position(|&g| g == -1)?;
    let q: Rational = v.iter().enumerate().map(|(i, x)| metric.g_rat(i) * x * x).sum();
    if q.is_zero() {
        return None;
    }
    let t = Rational::from_int(2) * &v[k] / &q;
    let mut pt: Vec<Rational> = v.iter().map(|x| &t * x).collect();
    pt[k] += &Rational::one();
    (metric.on_surface(&pt) && pt.iter().all(|x| !x.is_zero())).then_some(pt)
}

fn l_triple() -> impl Strategy<Value = [Rational; 3]> {
    (1i64..=12, 1i64..=12, 1i64..=12, 1i64..=4).prop_map(|(a, b, c, d)| {
        [Rational::new(a, d), Rational::new(b, 2 * d), Rational::new(c, d)]
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn compose_matches_successive_application(x in weyl_op(), y in weyl_op(), f in test_monomial()) {
        let f = LaurentPoly::monomial(f, Rational::one());
        for hbar in [Rational::one(), Rational::new(1, 3)] {
            let (xs, ys) = (x.specialize_hbar(&hbar), y.specialize_hbar(&hbar));
            let lhs = xs.compose(&ys).apply(&f).unwrap();
            let rhs = xs.apply(&ys.apply(&f).unwrap()).unwrap();
            prop_assert_eq!(lhs, rhs);
        }
    }

    #[test]
    fn commutator_antisymmetric(x in weyl_op(), y in weyl_op()) {
        prop_assert_eq!(x.commutator(&y), y.commutator(&x).neg());
        prop_assert!(x.commutator(&x).is_zero());
    }

    #[test]
    fn composition_associative(x in small_op(), y in small_op(), z in small_op()) {
        prop_assert_eq!(x.compose(&y.compose(&z)), x.compose(&y).compose(&z));
    }

    #[test]
    fn reduction_idempotent(x in weyl_op(), m in indefinite_metric()) {
        let r = x.reduce_mod_constraint(&m).unwrap();
        prop_assert_eq!(r.reduce_mod_constraint(&m).unwrap(), r);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn jacobi_identity(x in small_op(), y in small_op(), z in small_op()) {
        let j = x.commutator(&y.commutator(&z))
            .add(&y.commutator(&z.commutator(&x)))
            .add(&z.commutator(&x.commutator(&y)));
        prop_assert!(j.is_zero());
    }

    #[test]
    fn reduction_agrees_on_surface(
        x in weyl_op(),
        f in test_monomial(),
        m in indefinite_metric(),
        vs in prop::collection::vec(prop::collection::vec(nonzero_rat(), DIM), 24),
    ) {
        let x = x.specialize_hbar(&Rational::new(1, 2));
        let r = x.reduce_mod_constraint(&m).unwrap();
        let f = LaurentPoly::monomial(f, Rational::one());
        let (xf, rf) = (x.apply(&f).unwrap(), r.apply(&f).unwrap());
        let fr = f.reduce_mod_constraint(&m).unwrap();
        let pts: Vec<_> = vs.iter().filter_map(|v| surface_point(&m, v)).collect();
        prop_assume!(pts.len() >= 20);
        for pt in &pts {
            prop_assert_eq!(xf.eval(pt), rf.eval(pt));
            prop_assert_eq!(f.eval(pt), fr.eval(pt));
        }
    }

    #[test]
    fn bracket_bilinear_antisymmetric(f in phase_poly(), g in phase_poly(), h in phase_poly(), a in rat(), b in rat()) {
        let lhs = poisson_bracket(&f.scale(&a).add(&g.scale(&b)), &h);
        let rhs = poisson_bracket(&f, &h).scale(&a).add(&poisson_bracket(&g, &h).scale(&b));
        prop_assert_eq!(lhs, rhs);
        prop_assert_eq!(poisson_bracket(&f, &g), poisson_bracket(&g, &f).neg());
    }

    #[test]
    fn bracket_leibniz_jacobi(f in phase_poly(), g in phase_poly(), h in phase_poly()) {
        let lhs = poisson_bracket(&f.mul(&g), &h);
        let rhs = f.mul(&poisson_bracket(&g, &h)).add(&poisson_bracket(&f, &h).mul(&g));
        prop_assert_eq!(lhs, rhs);
        let j = poisson_bracket(&f, &poisson_bracket(&g, &h))
            .add(&poisson_bracket(&g, &poisson_bracket(&h, &f)))
            .add(&poisson_bracket(&h, &poisson_bracket(&f, &g)));
        prop_assert!(j.is_zero());
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn c_cyclic_antisymmetric(a in prop::collection::vec(rat(), 4), m in prop::sample::select(Metric::all_patterns(4))) {
        let p = ModelParams::from_a(a);
        for (i, j, k) in [(1, 2, 3), (2, 4, 1), (4, 3, 2)] {
            let c = build_C(&m, &p, i, j, k).unwrap();
            prop_assert_eq!(&c, &build_C(&m, &p, j, k, i).unwrap());
            prop_assert_eq!(&c, &build_C(&m, &p, j, i, k).unwrap().neg());
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn u_is_a_lower_root(l in l_triple(), e1 in prop::sample::select(vec![1i8, -1]), e2 in prop::sample::select(vec![1i8, -1])) {
        let p = ModelParams::from_l(l.to_vec());
        let u = rep_parameter_u((e1, e2), &p).unwrap();
        let m = m_values(&p).unwrap();
        prop_assert!(roots(&m, &Rational::from_int(3))[..4].contains(&u));
        prop_assert!(structure_function_eval(&u, &Rational::new(7, 3), &p).unwrap().is_zero());
    }

    #[test]
    fn emitted_reps_are_consistent(l in l_triple()) {
        let p = ModelParams::from_l(l.to_vec());
        let m = m_values(&p).unwrap();
        for r in find_representations(&p, 6, SignMode::All).unwrap() {
            let (et, e) = energy_from_rep(r.signs, r.p, &m);
            prop_assert_eq!(&r.etilde, &et);
            prop_assert_eq!(&r.energy, &((Rational::one() - &et * &et) * Rational::new(1, 4)));
            prop_assert_eq!(&r.energy, &e);
            prop_assert_eq!(r.degeneracy, r.p + 1);
            prop_assert!(structure_function_eval(&(&r.u + Rational::from_int(r.p as i64 + 1)), &et, &p).unwrap().is_zero());
        }
    }

    #[test]
    fn spectra_reproduced_by_sign_patterns(l in l_triple()) {
        let p = ModelParams::from_l(l.to_vec());
        let h2: Vec<_> = analytic_spectrum_h2(&l, 100).into_iter().map(|v| (v.energy, v.degeneracy as u32)).collect();
        let alg: Vec<_> = find_spectrum(&p, 12, SignMode::Fixed([1, 1, -1])).unwrap()
            .into_iter().map(|r| (r.energy, r.degeneracy)).collect();
        prop_assert_eq!(h2, alg);
        let s2: Vec<_> = analytic_spectrum_s2(&l, 6).into_iter().map(|v| (v.energy, v.degeneracy as u32)).collect();
        let alg: Vec<_> = find_spectrum(&p, 5, SignMode::Fixed([1, 1, 1])).unwrap()
            .into_iter().map(|r| (-r.energy, r.degeneracy)).collect();
        prop_assert_eq!(s2, alg);
    }

    #[test]
    fn degeneracy_law_and_threshold(l in l_triple()) {
        for lv in analytic_spectrum_h2(&l, 50) {
            prop_assert_eq!(lv.degeneracy as u32, lv.p + 1);
            prop_assert!(lv.states.iter().all(|(n, m)| n + m == lv.p));
            prop_assert!(lv.energy < Rational::new(1, 4));
        }
        for lv in analytic_spectrum_s2(&l, 5) {
            prop_assert_eq!(lv.degeneracy as u32, lv.p + 1);
        }
    }
}
