use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use zpg::group_ring::{GroupRingElem, RingContext, Special};

/// Plain double loop over the coefficient lists, folded mod X^q - 1 and
/// reduced mod p^K afterwards.
fn schoolbook(u: &[i128], v: &[i128], q: usize, modulus: i128) -> Vec<i128> {
    let mut full = vec![0i128; 2 * q];
    for (i, &a) in u.iter().enumerate() {
        for (j, &b) in v.iter().enumerate() {
            full[i + j] += a * b;
        }
    }
    let mut out = vec![0i128; q];
    for (k, c) in full.into_iter().enumerate() {
        out[k % q] += c;
    }
    out.into_iter().map(|c| c.rem_euclid(modulus)).collect()
}

fn pn_configs() -> Vec<(u64, u32)> {
    vec![(2, 1), (2, 2), (2, 3), (3, 1), (3, 2), (5, 1)]
}

#[test]
fn convolution_matches_schoolbook_on_random_pairs() {
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed);
    for (p, n) in pn_configs() {
        let k = 6;
        let ctx = RingContext::truncated(p, n, k).unwrap();
        let m = ctx.modulus().unwrap();
        let q = ctx.order();
        for _ in 0..1000 {
            let u: Vec<i128> = (0..q).map(|_| rng.gen_range(0..m)).collect();
            let v: Vec<i128> = (0..q).map(|_| rng.gen_range(0..m)).collect();
            let got = GroupRingElem::new(ctx, &u)
                .unwrap()
                .mul(&GroupRingElem::new(ctx, &v).unwrap())
                .unwrap();
            assert_eq!(
                got.coeffs(),
                schoolbook(&u, &v, q, m).as_slice(),
                "p={p} n={n}"
            );
        }
    }
}

#[test]
fn make_examples() {
    let ctx = RingContext::truncated(2, 1, 3).unwrap();
    assert_eq!(
        GroupRingElem::new(ctx, &[1, 1]).unwrap(),
        GroupRingElem::special(ctx, Special::Norm).unwrap()
    );
    assert_eq!(
        GroupRingElem::new(ctx, &[0, 1, 0, 1]).unwrap().coeffs(),
        &[0, 2]
    );
    let ctx = RingContext::truncated(3, 1, 2).unwrap();
    assert_eq!(GroupRingElem::new(ctx, &[10]).unwrap().coeffs(), &[1, 0, 0]);
}

#[test]
fn special_examples() {
    let c21 = RingContext::exact(2, 1).unwrap();
    assert_eq!(
        GroupRingElem::special(c21, Special::Abel).unwrap().coeffs(),
        &[0, 1]
    );
    let c22 = RingContext::exact(2, 2).unwrap();
    assert_eq!(
        GroupRingElem::special(c22, Special::Nm(1))
            .unwrap()
            .coeffs(),
        &[1, 0, 1, 0]
    );
    let c32 = RingContext::exact(3, 2).unwrap();
    let s1 = GroupRingElem::special(c32, Special::S(1)).unwrap();
    assert_eq!(&s1.coeffs()[..4], &[1, 1, 1, 0]);
    let a = GroupRingElem::special(c32, Special::Abel).unwrap();
    assert_eq!(a.eval_one().unwrap(), 9 * 8 / 2);
}

#[test]
fn divmod_examples() {
    let ctx = RingContext::exact(2, 1).unwrap();
    let sigma = GroupRingElem::sigma_pow(ctx, 1);
    let norm = GroupRingElem::special(ctx, Special::Norm).unwrap();
    let (q, r) = sigma.divmod(&norm).unwrap();
    assert_eq!(
        (q.coeffs(), r.coeffs()),
        (&[1i128, 0][..], &[-1i128, 0][..])
    );
    let (q, r) = norm.divmod(&norm).unwrap();
    assert_eq!(q, GroupRingElem::one(ctx));
    assert!(r.is_zero());
}

#[test]
fn component_evaluation() {
    let ctx = RingContext::exact(3, 2).unwrap();
    let one_minus = GroupRingElem::from_terms(ctx, &[(0, 1), (1, -1)]).unwrap();
    assert!(one_minus.eval_component(0).unwrap().is_zero());
    for k in 1..=2 {
        assert!(!one_minus.eval_component(k).unwrap().is_zero());
    }
    for kappa in [1i128, 2, 4, -1] {
        let p = GroupRingElem::from_terms(ctx, &[(1, -1), (0, 1 + 3 * kappa)]).unwrap();
        for k in 0..=2 {
            assert!(!p.eval_component(k).unwrap().is_zero());
        }
    }
}

fn small_pn() -> impl Strategy<Value = (u64, u32)> {
    prop_oneof![
        Just((2u64, 1u32)),
        Just((2, 2)),
        Just((2, 3)),
        Just((3, 1)),
        Just((3, 2)),
        Just((5, 1))
    ]
}

fn elem_in(ctx: RingContext) -> impl Strategy<Value = GroupRingElem> {
    let q = ctx.order();
    prop::collection::vec(-50i128..50, q).prop_map(move |c| GroupRingElem::new(ctx, &c).unwrap())
}

fn exact_pair() -> impl Strategy<Value = (GroupRingElem, GroupRingElem)> {
    small_pn().prop_flat_map(|(p, n)| {
        let ctx = RingContext::exact(p, n).unwrap();
        (elem_in(ctx), elem_in(ctx))
    })
}

proptest! {
    #[test]
    fn abel_identity((p, n) in prop_oneof![Just((2u64, 1u32)), Just((2, 2)), Just((2, 3)), Just((3, 1)), Just((3, 2)), Just((3, 3)), Just((5, 1)), Just((5, 2)), Just((5, 3))]) {
        let ctx = RingContext::exact(p, n).unwrap();
        let a = GroupRingElem::special(ctx, Special::Abel).unwrap();
        let one_minus = GroupRingElem::from_terms(ctx, &[(0, 1), (1, -1)]).unwrap();
        let lhs = a.mul(&one_minus).unwrap();
        let rhs = GroupRingElem::special(ctx, Special::Norm).unwrap().sub(&GroupRingElem::constant(ctx, (p as i128).pow(n))).unwrap();
        prop_assert_eq!(lhs, rhs);
    }

    #[test]
    fn tower_identities((p, n) in small_pn(), m_frac in 0u32..=3) {
        let m = m_frac.min(n);
        let ctx = RingContext::exact(p, n).unwrap();
        let pm = p.pow(m) as i64;
        let s = GroupRingElem::special(ctx, Special::S(m)).unwrap();
        let one_minus = GroupRingElem::from_terms(ctx, &[(0, 1), (1, -1)]).unwrap();
        let one_minus_pm = GroupRingElem::from_terms(ctx, &[(0, 1), (pm, -1)]).unwrap();
        prop_assert_eq!(one_minus.mul(&s).unwrap(), one_minus_pm.clone());
        let am = GroupRingElem::special(ctx, Special::Am(m)).unwrap();
        let nm = GroupRingElem::special(ctx, Special::Nm(m)).unwrap();
        let rhs = nm.sub(&GroupRingElem::constant(ctx, (p as i128).pow(n - m))).unwrap();
        prop_assert_eq!(am.mul(&one_minus_pm).unwrap(), rhs);
        prop_assert_eq!(nm.mul(&s).unwrap(), GroupRingElem::special(ctx, Special::Norm).unwrap());
    }

    #[test]
    fn eval_one_is_multiplicative((u, v) in exact_pair()) {
        let uv = u.mul(&v).unwrap();
        prop_assert_eq!(uv.eval_one().unwrap(), u.eval_one().unwrap() * v.eval_one().unwrap());
        prop_assert_eq!(u.add(&v).unwrap().eval_one().unwrap(), u.eval_one().unwrap() + v.eval_one().unwrap());
    }

    #[test]
    fn divmod_round_trip((u, v) in exact_pair(), lead in prop_oneof![Just(1i128), Just(-1)]) {
        let ctx = u.ctx();
        let d = v.degree().unwrap_or(0);
        let mut f = v.coeffs().to_vec();
        f[d] = lead;
        let f = GroupRingElem::new(ctx, &f).unwrap();
        let (q, r) = u.divmod(&f).unwrap();
        prop_assert_eq!(f.mul(&q).unwrap().add(&r).unwrap(), u);
        let df = f.degree().unwrap();
        prop_assert!(r.degree().is_none_or(|dr| dr < df));
    }

    #[test]
    fn truncated_mul_commutes_with_reduction((u, v) in exact_pair(), k in 2u32..8) {
        let ctx = u.ctx();
        let t = RingContext::truncated(ctx.p(), ctx.n(), k).unwrap();
        let lhs = u.mul(&v).unwrap().truncate(t).unwrap();
        let rhs = u.truncate(t).unwrap().mul(&v.truncate(t).unwrap()).unwrap();
        prop_assert_eq!(lhs, rhs);
    }

    #[test]
    fn text_round_trip(u in small_pn().prop_flat_map(|(p, n)| elem_in(RingContext::exact(p, n).unwrap()))) {
        let back = GroupRingElem::parse_text(u.ctx(), &u.to_text()).unwrap();
        prop_assert_eq!(back, u);
    }
}
