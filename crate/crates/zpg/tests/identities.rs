use zpg::group_ring::RingContext;
use zpg::identities::{
    check_abel, check_case5_radical, check_case6_relations, check_lemma_321, check_lemma_357,
    check_tower, check_tower_with_fault, Fault, IdentityCheck,
};
use zpg::spaces::FormalSpaceParams;

// Exponent vectors as plain coefficient lists over Z[σ]/(σ^q - 1).
type Poly = Vec<i128>;

fn pw(p: u64, e: u32) -> i128 {
    (p as i128).pow(e)
}

fn mono(q: usize, i: usize, c: i128) -> Poly {
    let mut v = vec![0; q];
    v[i % q] += c;
    v
}

fn add(u: &Poly, v: &Poly) -> Poly {
    u.iter().zip(v).map(|(a, b)| a + b).collect()
}

fn scale(u: &Poly, c: i128) -> Poly {
    u.iter().map(|a| a * c).collect()
}

fn mul(u: &Poly, v: &Poly) -> Poly {
    let q = u.len();
    let mut out = vec![0; q];
    for (i, a) in u.iter().enumerate() {
        for (j, b) in v.iter().enumerate() {
            out[(i + j) % q] += a * b;
        }
    }
    out
}

fn one_minus_sigma(q: usize) -> Poly {
    add(&mono(q, 0, 1), &mono(q, 1, -1))
}

fn norm(q: usize) -> Poly {
    vec![1; q]
}

fn abel(q: usize) -> Poly {
    (0..q as i128).collect()
}

/// Σ_{k < p^m} σ^k
fn s_m(q: usize, pm: usize) -> Poly {
    (0..q).map(|i| (i < pm) as i128).collect()
}

/// Σ_j σ^{j p^m}
fn n_m(q: usize, pm: usize) -> Poly {
    (0..q).map(|i| (i % pm == 0) as i128).collect()
}

/// Σ_j j σ^{j p^m}; any A_m with A_m(1 - σ^{p^m}) = N_m - p^{n-m} serves,
/// since two choices differ by a multiple of N_m.
fn a_m(q: usize, pm: usize) -> Poly {
    (0..q)
        .map(|i| if i % pm == 0 { (i / pm) as i128 } else { 0 })
        .collect()
}

/// Re-multiplies Σ λ_i·row_i with schoolbook products and compares with the
/// target modulo p^K.
fn witness_reproduces(
    p: u64,
    rows: &[Vec<Poly>],
    lambda: &[Poly],
    target: &[Poly],
    k: u32,
) -> bool {
    let m = pw(p, k);
    if rows.len() != lambda.len() {
        return false;
    }
    let q = target[0].len();
    let mut acc = vec![vec![0i128; q]; target.len()];
    for (row, lam) in rows.iter().zip(lambda) {
        for (slot, e) in acc.iter_mut().zip(row) {
            *slot = add(slot, &mul(e, lam));
        }
    }
    acc.iter()
        .zip(target)
        .all(|(a, t)| a.iter().zip(t).all(|(x, y)| (x - y).rem_euclid(m) == 0))
}

fn check_witnesses(check: &IdentityCheck, p: u64, rows: &[Vec<Poly>], targets: &[Vec<Poly>]) {
    assert!(check.pass, "{}: {}", check.name, check.detail);
    assert_eq!(check.witnesses.len(), targets.len(), "{}", check.detail);
    for (w, t) in check.witnesses.iter().zip(targets) {
        let lambda: Vec<Poly> = w.lambda.iter().map(|l| l.coeffs().to_vec()).collect();
        assert!(
            witness_reproduces(p, rows, &lambda, t, w.precision),
            "{:?}",
            check.params
        );
    }
}

fn lemma_grid() -> Vec<(u64, u32, u32)> {
    let mut out = Vec::new();
    for p in [2u64, 3] {
        for n in 1..=2 {
            for a in 1..=3 {
                out.push((p, n, a));
            }
        }
    }
    out
}

#[test]
fn abel_and_tower_pass() {
    for (p, n) in [(2u64, 1u32), (3, 1), (2, 3)] {
        let ctx = RingContext::exact(p, n).unwrap();
        assert!(check_abel(ctx).pass);
        for m in 0..=n {
            assert!(check_tower(ctx, m).pass, "p={p} n={n} m={m}");
        }
    }
}

#[test]
fn inclusive_s_m_is_caught() {
    let ctx = RingContext::exact(2, 2).unwrap();
    assert!(!check_tower_with_fault(ctx, 1, Fault::SmInclusive).pass);
}

#[test]
fn lemma_321_examples() {
    for (p, n, a) in [(2, 1, 1), (3, 2, 1), (2, 1, 2)] {
        let c = check_lemma_321(p, n, a);
        assert!(c.pass, "{}", c.detail);
        assert_eq!(c.params.c, Some(n.min(a)));
    }
}

#[test]
fn lemma_321_targets_rebuilt_independently() {
    for (p, n, a) in lemma_grid() {
        let q = p.pow(n) as usize;
        let c = n.min(a);
        let rows = vec![vec![
            mono(q, 0, pw(p, a)),
            add(&mono(q, 1, 1), &mono(q, 0, -1)),
        ]];
        let om = one_minus_sigma(q);
        let t1 = vec![
            scale(
                &add(&mul(&abel(q), &om), &scale(&norm(q), -1)),
                pw(p, a - c),
            ),
            scale(&om, pw(p, n - c)),
        ];
        let t2 = vec![
            scale(&abel(q), -pw(p, a)),
            add(&norm(q), &mono(q, 0, -pw(p, n))),
        ];
        check_witnesses(&check_lemma_321(p, n, a), p, &rows, &[t1, t2]);
    }
}

#[test]
fn lemma_357_examples() {
    for (p, n, a) in [(3, 1, 1), (2, 2, 1)] {
        let c = check_lemma_357(p, n, a);
        assert!(c.pass, "{}", c.detail);
    }
    // p^n(p^n - 1)/2 at p = 2, n = 1
    let pn = pw(2, 1);
    assert_eq!(-(pn * (pn - 1) / 2), -1);
}

#[test]
fn lemma_357_targets_rebuilt_independently() {
    for (p, n, a) in lemma_grid() {
        let q = p.pow(n) as usize;
        let c = n.min(a);
        let om = one_minus_sigma(q);
        let rows = vec![
            vec![
                mono(q, 0, -1),
                mono(q, 0, pw(p, a)),
                add(&mono(q, 1, 1), &mono(q, 0, -1)),
            ],
            vec![om.clone(), vec![0; q], vec![0; q]],
        ];
        let pn = pw(p, n);
        let t1 = vec![
            mono(q, 0, pw(p, n - c)),
            scale(
                &add(&mul(&abel(q), &om), &scale(&norm(q), -1)),
                pw(p, a - c),
            ),
            scale(&om, pw(p, n - c)),
        ];
        let t2 = vec![
            mono(q, 0, pn * (pn - 1) / 2),
            scale(&abel(q), -pw(p, a)),
            add(&norm(q), &mono(q, 0, -pn)),
        ];
        check_witnesses(&check_lemma_357(p, n, a), p, &rows, &[t1, t2]);
    }
}

#[test]
fn radical_examples() {
    for (a, b) in [(1, 0), (1, 1), (2, 0)] {
        let p = if b == 1 { 2 } else { 3 };
        let c = check_case5_radical(&FormalSpaceParams::new(p, 2, a, b, 1, 1));
        assert!(c.pass, "{}", c.detail);
    }
    assert!(!check_case5_radical(&FormalSpaceParams::new(3, 1, 1, 0, 1, 1)).pass);
}

#[test]
fn radical_target_rebuilt_independently() {
    for p in [2u64, 3] {
        for n in 2..=2u32 {
            for a in 0..=3 {
                for b in 0..=n {
                    for kappa in [1i64, 1 + p as i64] {
                        let m = 1;
                        let params = FormalSpaceParams::new(p, n, a, b, m, kappa);
                        if params.validate_w().is_err() {
                            continue;
                        }
                        let q = p.pow(n) as usize;
                        let pm = p.pow(m) as usize;
                        let c = (n - m).min(a);
                        let kap = kappa as i128;
                        let om = one_minus_sigma(q);
                        let p_entry = add(&mono(q, 1, -1), &mono(q, 0, 1 + kap * pw(p, a)));
                        let r_entry = add(&mono(q, pm, 1), &mono(q, 0, -1));
                        let rows = vec![
                            vec![mono(q, 0, -kap * pw(p, a - b)), p_entry, r_entry],
                            vec![om.clone(), vec![0; q], vec![0; q]],
                        ];
                        let r_s = add(
                            &scale(&mul(&s_m(q, pm), &a_m(q, pm)), kap * pw(p, a - c)),
                            &mono(q, 0, -pw(p, n - m - c)),
                        );
                        let r_t = scale(&s_m(q, pm), pw(p, n - m - c));
                        let xi = [mono(q, 0, -pw(p, n - m - b)), n_m(q, pm), vec![0; q]];
                        let f = -kap * pw(p, a - c);
                        let target = vec![
                            scale(&xi[0], f),
                            add(&mul(&om, &r_s), &scale(&xi[1], f)),
                            mul(&om, &r_t),
                        ];
                        let check = check_case5_radical(&params);
                        if !check.pass || check.witnesses.is_empty() {
                            panic!("{params:?}: {}", check.detail);
                        }
                        let lambda: Vec<Poly> = check.witnesses[0]
                            .lambda
                            .iter()
                            .map(|l| l.coeffs().to_vec())
                            .collect();
                        assert!(
                            witness_reproduces(
                                p,
                                &rows,
                                &lambda,
                                &target,
                                check.witnesses[0].precision
                            ),
                            "{params:?}"
                        );
                    }
                }
            }
        }
    }
}

#[test]
fn case6_relations_pass() {
    for l in [2, 3] {
        for norm in [true, false] {
            let c = check_case6_relations(l, 2, norm);
            assert!(c.pass, "l={l} norm={norm}: {}", c.detail);
        }
    }
}
