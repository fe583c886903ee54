use proptest::prelude::*;
use zpg::classifier::{
    case7_concrete, classify, concrete_invariants, descriptor_precisions, dispatch, equivalent,
    measure_classification, validate_descriptor, ClassifyError, ExtensionDescriptor,
};
use zpg::group_ring::RingContext;
use zpg::invariants::{measure_report, PPower};
use zpg::presentation::{free_module, pres_make};
use zpg::spaces::{make_w, CaseId, FormalSpaceParams};

fn residual_other(p: u64, n: u32, a: u32, b: u32, m: u32, kappa: i64) -> ExtensionDescriptor {
    let mut d = ExtensionDescriptor::new(p, n, a, b, m, kappa);
    d.residual_char_is_p = false;
    d
}

fn violations(d: &ExtensionDescriptor) -> Vec<String> {
    match validate_descriptor(d) {
        Err(ClassifyError::Invalid(v)) => v,
        other => panic!("expected rejection, got {other:?}"),
    }
}

#[test]
fn validation_examples() {
    assert!(violations(&ExtensionDescriptor::new(3, 2, 1, 2, 0, 1))
        .contains(&"b ≤ min(a,n)".to_string()));
    let mut d = ExtensionDescriptor::new(3, 2, 1, 0, 1, 1);
    d.d = 2;
    assert_eq!(validate_descriptor(&d).unwrap().mu_f_exponent, 2);
    assert!(violations(&residual_other(3, 2, 1, 0, 1, 1)).contains(&"n = m+b".to_string()));
}

#[test]
fn dispatch_examples() {
    assert_eq!(
        dispatch(&ExtensionDescriptor::new(3, 1, 0, 0, 0, 1)),
        CaseId::Case1
    );
    let mut d = ExtensionDescriptor::new(2, 1, 1, 0, 1, -1);
    d.l = Some(2);
    assert!(validate_descriptor(&d).is_ok());
    assert_eq!(dispatch(&d), CaseId::Case3_3a);
    d.d = 2;
    assert_eq!(dispatch(&d), CaseId::Case3_3b);
    assert_eq!(
        dispatch(&ExtensionDescriptor::new(3, 2, 1, 0, 2, 1)),
        CaseId::Case3_2
    );
    assert_eq!(
        dispatch(&ExtensionDescriptor::new(3, 2, 1, 0, 0, 1)),
        CaseId::Case2
    );
    assert_eq!(
        dispatch(&ExtensionDescriptor::new(3, 2, 1, 1, 0, 1)),
        CaseId::Case4
    );
    assert_eq!(dispatch(&residual_other(3, 1, 1, 1, 0, 1)), CaseId::Case7);
}

#[test]
fn case_one_is_free_plus_trivial() {
    let d = ExtensionDescriptor::new(3, 1, 0, 0, 0, 1);
    let c = classify(&d).unwrap();
    assert_eq!(c.case, CaseId::Case1);
    let (k1, k2) = descriptor_precisions(&d);
    let got = measure_classification(&c, k1, k2).unwrap();
    let ctx = RingContext::exact(3, 1).unwrap();
    let trivial = pres_make(ctx, vec!["E".into()], vec![], vec![0]).unwrap();
    let model = free_module(ctx, &["U"])
        .unwrap()
        .direct_sum(&trivial)
        .unwrap();
    let want = measure_report(&model, k1, k2, None).unwrap();
    assert_eq!(
        (
            got.zp_rank,
            &got.torsion_divisors,
            got.h0_order,
            got.h1_order,
            &got.character
        ),
        (
            want.zp_rank,
            &want.torsion_divisors,
            want.h0_order,
            want.h1_order,
            &want.character
        )
    );
}

#[test]
fn case_five_with_a_free_summand() {
    let mut d = ExtensionDescriptor::new(3, 2, 1, 1, 1, 1);
    d.d = 2;
    let c = classify(&d).unwrap();
    assert_eq!(c.case, CaseId::Case5);
    let w = make_w(&FormalSpaceParams::new(3, 2, 1, 1, 1, 1)).unwrap();
    let model = w.with_free_summands(1).unwrap();
    assert_eq!(c.presentation.relations(), model.relations());
    assert_eq!(c.presentation.g(), 4);
    let (k1, k2) = descriptor_precisions(&d);
    let got = measure_classification(&c, k1, k2).unwrap();
    assert!(
        got.same_invariants(&c.expected),
        "{:?}",
        got.diff(&c.expected)
    );
    assert_eq!(got.character, vec![3, 2, 2]);
}

#[test]
fn equivalence_examples() {
    let d = ExtensionDescriptor::new(3, 2, 2, 1, 1, 1);
    assert!(equivalent(&d, &d).equivalent);
    let mut other = d.clone();
    other.b = 0;
    assert!(!equivalent(&d, &other).equivalent);
    let r1 = residual_other(3, 1, 1, 1, 0, 1);
    let p1 = ExtensionDescriptor::new(3, 1, 1, 1, 0, 1);
    let e = equivalent(&r1, &p1);
    assert!(!e.equivalent && e.reason.is_some());
}

#[test]
fn concrete_model_examples() {
    let m = case7_concrete(&residual_other(3, 2, 2, 1, 1, 1)).unwrap();
    assert_eq!((m.delta, m.torsion_modulus()), (1, 27));

    // with b = 1 the generator-level twist must vanish for σ to have order 2^n
    let mut d = residual_other(2, 2, 1, 1, 1, 1);
    d.procyclic = true;
    d.l = Some(3);
    let m = case7_concrete(&d).unwrap();
    assert_eq!((m.delta, m.torsion_modulus()), (0, 8));
    assert_eq!(m.action_order(), 4);

    let m = case7_concrete(&residual_other(3, 1, 1, 0, 1, 1)).unwrap();
    assert_eq!(m.delta, 1);
    assert_eq!(m.act(1, 0), (1, 3));
}

#[test]
fn concrete_report_on_the_small_model() {
    let d = residual_other(3, 1, 1, 1, 0, 1);
    let m = case7_concrete(&d).unwrap();
    let (k1, _) = descriptor_precisions(&d);
    let r = concrete_invariants(&m, k1).unwrap();
    assert_eq!((r.torsion_divisors.clone(), r.zp_rank), (vec![1], 1));
    // |H^0| / |H^1| is the Herbrand quotient of Z_p plus a finite module
    assert_eq!(
        (r.h0_order, r.h1_order),
        (PPower::new(3, 1), PPower::new(3, 0))
    );
    let c = classify(&d).unwrap();
    let got = measure_classification(&c, k1, k1 + 2).unwrap();
    assert!(r.same_invariants(&got), "{:?}", r.diff(&got));
}

/// Residual characteristic ≠ 2 with p = 2, a = 1, m = 0: the relation
/// S^{1-σ+2κ} X^{-κ} carries torsion 2^{1+v_2(κ+1)}, but μ_F = μ_2.
fn two_adic_m_zero_gap(d: &ExtensionDescriptor) -> bool {
    !d.residual_char_is_p && d.p == 2 && d.a == 1 && d.m == 0
}

#[test]
fn case_seven_relation_overstates_torsion_when_m_is_zero_at_two() {
    for kappa in [1i64, 3, 5, 7, -3] {
        let d = residual_other(2, 1, 1, 1, 0, kappa);
        assert!(two_adic_m_zero_gap(&d));
        let c = classify(&d).unwrap();
        let (k1, k2) = descriptor_precisions(&d);
        let got = measure_classification(&c, k1, k2).unwrap();
        let v2 = (kappa + 1).trailing_zeros();
        assert_eq!(got.torsion_divisors, vec![1 + v2], "κ={kappa}");
        let concrete = concrete_invariants(&case7_concrete(&d).unwrap(), k1).unwrap();
        assert_eq!(concrete.torsion_divisors, vec![1]);
        assert_eq!(c.expected.torsion_divisors, vec![1]);
    }
}

fn descriptor() -> impl Strategy<Value = ExtensionDescriptor> {
    (
        prop_oneof![Just(2u64), Just(3)],
        1u32..=2,
        0u32..=3,
        0u32..=2,
        0u32..=2,
        prop_oneof![Just(1i64), Just(3), Just(4), Just(-3)],
        1u32..=2,
        any::<bool>(),
        prop_oneof![Just(None), Just(Some(2u32)), Just(Some(3))],
        any::<bool>(),
        prop_oneof![Just(None), Just(Some(true)), Just(Some(false))],
    )
        .prop_map(|(p, n, a, b, m, kappa, dd, res, l, procyclic, norm)| {
            let mut d = ExtensionDescriptor::new(p, n, a, b, m, kappa);
            d.d = dd;
            d.residual_char_is_p = res;
            d.l = l;
            d.procyclic = procyclic;
            d.minus_one_is_norm = norm;
            d
        })
        .prop_filter("valid", |d| validate_descriptor(d).is_ok())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn classify_is_total_and_deterministic(d in descriptor()) {
        let c1 = classify(&d).unwrap();
        let c2 = classify(&d).unwrap();
        prop_assert_eq!(c1.case, c2.case);
        prop_assert_eq!(c1.presentation.rows(), c2.presentation.rows());
        prop_assert_eq!(c1.splitting, d.b == 0);
    }

    #[test]
    fn emitted_presentation_has_expected_invariants(d in descriptor()) {
        prop_assume!(!two_adic_m_zero_gap(&d));
        let c = classify(&d).unwrap();
        let (k1, k2) = descriptor_precisions(&d);
        let got = measure_classification(&c, k1, k2).unwrap();
        prop_assert!(got.same_invariants(&c.expected), "{:?}", got.diff(&c.expected));
    }

    #[test]
    fn equivalent_descriptors_give_identical_reports(d in descriptor(), shift in 1i64..3) {
        let mut e = d.clone();
        let v = validate_descriptor(&d).unwrap();
        // moving κ by |μ_F|/p^a keeps k_σ mod |μ_F| fixed
        e.kappa = d.kappa + shift * (d.p as i64).pow(v.mu_f_exponent.saturating_sub(d.a)) * d.p as i64;
        prop_assume!(validate_descriptor(&e).is_ok());
        prop_assume!(equivalent(&d, &e).equivalent);
        let (k1, k2) = descriptor_precisions(&d);
        let r1 = measure_classification(&classify(&d).unwrap(), k1, k2).unwrap();
        let r2 = measure_classification(&classify(&e).unwrap(), k1, k2).unwrap();
        prop_assert!(r1.same_invariants(&r2), "{:?}", r1.diff(&r2));
    }

    #[test]
    fn descriptor_json_round_trip(d in descriptor()) {
        let back: ExtensionDescriptor = serde_json::from_str(&serde_json::to_string(&d).unwrap()).unwrap();
        prop_assert_eq!(back, d);
    }
}
