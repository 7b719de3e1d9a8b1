use std::sync::Arc;

use proptest::prelude::*;

use quadperm::criteria::{
    canonical_r, check_c_properties, classify_geometry, composed_trace, condition_b2, conditions, eta_trace_relation,
    u_divides_a, verify_identities, zeta_eta_theta, CriterionError, FastCriterion, QuadInput,
};
use quadperm::field::{default_ctx, gcd, gcd_power_rule, ord2, FieldCtx, FieldElem, Sign};
use quadperm::oracle::{is_perm_fq2, reduce_lemma_old, SparsePoly};
use quadperm::poly::Poly;

fn ctx(p: u32, n: u32) -> Arc<FieldCtx> {
    default_ctx(p, n).unwrap()
}

fn input(ctx: &FieldCtx, k: u32, l: u32, t: [FieldElem; 4]) -> QuadInput {
    let r = canonical_r(1 << k, 1 << l).unwrap();
    QuadInput::new(ctx.characteristic(), k, l, r, t)
}

fn tuples(elems: &[FieldElem]) -> impl Iterator<Item = [FieldElem; 4]> + '_ {
    let n = elems.len();
    (0..n.pow(4)).map(move |i| [elems[i % n], elems[i / n % n], elems[i / n / n % n], elems[i / n / n / n]])
}

#[test]
fn frobenius_and_power_fix_every_element() {
    for (p, n) in [(2, 1), (2, 4), (2, 8), (3, 2), (3, 4), (5, 2), (7, 2)] {
        let f = ctx(p, n);
        let size = f.size() as u64;
        for z in f.elements() {
            assert_eq!(f.frobenius(z, n as u64), z);
            assert_eq!(f.pow_u64(z, size), z);
        }
    }
}

#[test]
fn encodings_round_trip() {
    for (p, n) in [(2, 16), (3, 9), (5, 6)] {
        let f = ctx(p, n);
        for enc in (0..f.size() as u64).step_by(7) {
            let z = f.elem(enc).unwrap();
            assert_eq!(z.encoding() as u64, enc);
            assert_eq!(f.from_digits(&f.digits(z)).unwrap(), z);
        }
        assert!(f.elem(f.size() as u64).is_err());
    }
}

#[test]
fn relative_trace_lands_in_target() {
    for (p, n) in [(2, 8), (3, 4), (2, 6)] {
        let f = ctx(p, n);
        for d in (1..=n).filter(|d| n % d == 0) {
            for m in (1..=d).filter(|m| d % m == 0) {
                for z in f.subfield_elements(d).unwrap() {
                    let t = f.rel_trace(z, d, m).unwrap();
                    assert!(f.in_subfield(t, m), "p={p} d={d} m={m}");
                }
            }
        }
    }
}

#[test]
fn composed_trace_rule_for_q_up_to_256() {
    for k in 1..=8 {
        let f = ctx(2, k);
        for l in 1..=8 {
            for z in f.elements() {
                let (got, want) = composed_trace(&f, z, k, l);
                assert_eq!(got, want, "k={k} l={l}");
            }
        }
    }
}

#[test]
fn gcd_power_rule_matches_integers() {
    for i in 1..=30u64 {
        for j in 1..=30u64 {
            let plus = gcd((1 << i) + 1, (1 << j) + 1) == 1;
            let minus = gcd((1 << i) - 1, (1 << j) + 1) == 1;
            assert_eq!(gcd_power_rule(i, j, Sign::Plus), plus, "{i} {j}");
            assert_eq!(gcd_power_rule(i, j, Sign::Minus), minus, "{i} {j}");
        }
    }
}

#[test]
fn degree_one_scr_roots_lie_in_mu() {
    let f = ctx(2, 4);
    let q = 4;
    for a in f.elements() {
        for b in f.elements().filter(|b| !b.is_zero()) {
            let p = Poly::new(&f, vec![a, b]);
            if p.is_scr(q).unwrap() {
                assert_eq!(p.roots_in_mu(q).unwrap().len(), 1, "{a:?} {b:?}");
            }
        }
    }
}

#[test]
fn theta_and_division_exhaustive() {
    for (k, l) in [(1, 1), (1, 2), (2, 1), (2, 2)] {
        let f = ctx(2, 2 * k);
        let elems: Vec<FieldElem> = f.elements().collect();
        let mut admissible = 0;
        for t in tuples(&elems) {
            let inp = input(&f, k, l, t);
            let (_, _, theta) = match zeta_eta_theta(&f, &inp) {
                Ok(v) => v,
                Err(_) => continue,
            };
            admissible += 1;
            assert!(theta == FieldElem::ZERO || theta == FieldElem::ONE, "{t:?}");
            assert!(eta_trace_relation(&f, &inp).unwrap(), "{t:?}");
            if !(t[1].is_zero() && t[2].is_zero() && t[3].is_zero()) {
                assert_eq!(u_divides_a(&f, &inp).unwrap(), theta == FieldElem::ONE, "k={k} l={l} {t:?}");
            }
        }
        assert!(admissible > 0);
    }
}

#[test]
fn mu_reduction_exhaustive_over_f4() {
    let f = ctx(2, 2);
    let q = 2;
    let elems: Vec<FieldElem> = f.elements().collect();
    for coeffs in tuples(&elems) {
        let a = Poly::new(&f, coeffs.to_vec());
        if a.is_zero() {
            continue;
        }
        for r in 1..=6u64 {
            let terms: Vec<(u64, FieldElem)> =
                coeffs.iter().enumerate().map(|(i, &c)| (r + (q - 1) * i as u64, c)).collect();
            let direct = is_perm_fq2(&f, &SparsePoly::new(&f, &terms), q).unwrap().is_permutation;
            let (gcd_ok, g0) = reduce_lemma_old(r, &a, q).unwrap();
            let reduced = gcd_ok && g0.permutes_mu().unwrap().is_permutation;
            assert_eq!(direct, reduced, "r={r} {coeffs:?}");
        }
    }
}

#[test]
fn geometry_labels_nonempty_and_c_properties() {
    for l in [1, 2] {
        let f = ctx(2, 4);
        let small = f.subfield_elements(2).unwrap();
        let mut b2_cases = 0;
        for t in tuples(&small) {
            if t.iter().all(|z| z.is_zero()) {
                continue;
            }
            let inp = input(&f, 1, l, t);
            let labels = classify_geometry(&f, &inp).unwrap();
            assert!(!labels.labels.is_empty(), "{t:?}");
            if condition_b2(&f, &inp).unwrap() {
                match check_c_properties(&f, &inp) {
                    Ok(rep) => {
                        b2_cases += 1;
                        assert!(rep.all(), "l={l} {t:?} {rep:?}");
                    }
                    Err(CriterionError::Poly(_)) => {}
                    Err(e) => panic!("{e}"),
                }
            }
        }
        assert!(b2_cases > 0);
    }
}

fn elem_in(size: u32) -> impl Strategy<Value = u32> {
    0..size
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(400))]

    #[test]
    fn identities_hold_for_any_tuple(k in 1u32..=3, l in 1u32..=3, raw in prop::array::uniform4(any::<u32>())) {
        let f = ctx(2, 2 * k);
        let t = raw.map(|x| f.elem((x % f.size()) as u64).unwrap());
        let inp = input(&f, k, l, t);
        let check = verify_identities(&f, &inp).unwrap();
        prop_assert!(check.all(), "{:?}", check);
    }

    #[test]
    fn fast_criterion_matches_conditions(l in 1u32..=4, raw in prop::array::uniform4(elem_in(64))) {
        let f = ctx(2, 6);
        let r = canonical_r(8, 1 << l).unwrap();
        let fast = FastCriterion::new(&f, 3, l, r).unwrap();
        let t = raw.map(|x| f.elem(x as u64).unwrap());
        let inp = QuadInput::new(2, 3, l, r, t);
        prop_assert_eq!(fast.verdict(t), conditions(&f, &inp).verdict());
    }

    #[test]
    fn criterion_matches_oracle_q8(l in 1u32..=3, raw in prop::array::uniform4(elem_in(64))) {
        prop_assume!(raw != [0; 4]);
        let f = ctx(2, 6);
        let t = raw.map(|x| f.elem(x as u64).unwrap());
        let inp = input(&f, 3, l, t);
        let oracle = is_perm_fq2(&f, &SparsePoly::quad(&f, &inp), 8).unwrap().is_permutation;
        prop_assert_eq!(conditions(&f, &inp).verdict(), oracle);
    }

    #[test]
    fn hat_equals_reversed_conjugate(coeffs in prop::collection::vec(elem_in(16), 1..8)) {
        let f = ctx(2, 4);
        let a = Poly::new(&f, coeffs.iter().map(|&c| f.elem(c as u64).unwrap()).collect());
        prop_assume!(!a.is_zero());
        let n = a.degree().unwrap();
        let conj = a.conj(4);
        let manual: Vec<FieldElem> = (0..=n).map(|i| conj.coeff(n - i)).collect();
        prop_assert_eq!(a.hat(4).unwrap(), Poly::new(&f, manual));
        prop_assert_eq!(a.hat(4).unwrap().hat(4).unwrap().degree(), a.degree().map(|d| d - a.coeffs().iter().take_while(|c| c.is_zero()).count()));
    }

    #[test]
    fn ord2_is_trailing_zero_count(n in 1u64..1_000_000) {
        let o = ord2(n);
        prop_assert_eq!(n % (1 << o), 0);
        prop_assert_eq!((n >> o) % 2, 1);
    }
}
