//! Randomized algebraic invariants.

use std::sync::Arc;

use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use brauer_casimir::brauer::{all_diagrams, diagram_to_word, BrauerElement, Diagram};
use brauer_casimir::casimir::{build_casimir, build_casimir_naive, CasimirSpec, OmegaMode, Projector, Shifts, TraceSide};
use brauer_casimir::liealg::{Enveloping, Uea};
use brauer_casimir::ring::{int, rat, MPoly, Poly, RatFunc, Rational, Var};
use brauer_casimir::suites::shared_env;
use brauer_casimir::tensor::{rep_diagram, ActionConfig};

fn poly() -> impl Strategy<Value = Poly> {
    prop::collection::vec(-6i64..=6, 0..4).prop_map(|v| Poly::from_ints(&v))
}

fn ratfunc() -> impl Strategy<Value = RatFunc> {
    (poly(), poly()).prop_filter_map("zero denominator", |(a, b)| RatFunc::new(a, b).ok())
}

fn mpoly() -> impl Strategy<Value = MPoly> {
    prop::collection::vec(((0u32..3, 0u32..3, 0u32..2), -5i64..=5), 0..5).prop_map(|terms| {
        let mut out = MPoly::zero();
        for ((eu, e1, e2), c) in terms {
            let t = &(&MPoly::var(Var::U).pow(eu) * &MPoly::var(Var::Lambda(1)).pow(e1)) * &MPoly::var(Var::Lambda(2)).pow(e2);
            out = &out + &t.scale(&RatFunc::constant(int(c)));
        }
        out
    })
}

fn diagram(m: usize) -> impl Strategy<Value = Diagram> {
    let all = all_diagrams(m);
    (0..all.len()).prop_map(move |i| all[i].clone())
}

fn word(len: usize, letters: u8) -> impl Strategy<Value = Vec<u8>> {
    prop::collection::vec(0..letters, 0..=len)
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 64, ..ProptestConfig::default() })]

    #[test]
    fn ratfunc_field_axioms(a in ratfunc(), b in ratfunc(), c in ratfunc()) {
        prop_assert_eq!(&(&a + &b) + &c, &a + &(&b + &c));
        prop_assert_eq!(&a * &b, &b * &a);
        prop_assert_eq!(&a * &(&b + &c), &(&a * &b) + &(&a * &c));
        if !b.is_zero() {
            prop_assert_eq!(&a.checked_div(&b).unwrap() * &b, a.clone());
        }
    }

    #[test]
    fn ratfunc_reduce_idempotent(p in poly(), q in poly()) {
        if let Ok(f) = RatFunc::new(p, q) {
            prop_assert_eq!(RatFunc::new(f.numer().clone(), f.denom().clone()).unwrap(), f);
        }
    }

    #[test]
    fn evaluation_is_additive(a in ratfunc(), b in ratfunc(), x in -5i64..=5) {
        let x = int(x);
        if let (Ok(va), Ok(vb)) = (a.eval(&x), b.eval(&x)) {
            prop_assert_eq!((&a + &b).eval(&x).unwrap(), va + vb);
        }
    }

    #[test]
    fn removable_singularity(p in poly(), q in poly(), c in -4i64..=4) {
        let lin = Poly::linear(int(-c));
        if let (Ok(f), Ok(g)) = (RatFunc::new(&p * &lin, &q * &lin), RatFunc::new(p.clone(), q.clone())) {
            prop_assert_eq!(f.eval(&int(c)).ok(), g.eval(&int(c)).ok());
        }
    }

    #[test]
    fn mpoly_ring_axioms(a in mpoly(), b in mpoly(), c in mpoly()) {
        prop_assert_eq!(&(&a * &b) * &c, &a * &(&b * &c));
        prop_assert_eq!(&a * &b, &b * &a);
        prop_assert_eq!(&a * &(&b + &c), &(&a * &b) + &(&a * &c));
        prop_assert!((&a - &a).is_zero());
    }

    #[test]
    fn brauer_associativity(d1 in diagram(4), d2 in diagram(4), d3 in diagram(4)) {
        let (x, b1) = (BrauerElement::from_diagram(d1), BrauerElement::from_diagram(d2));
        let y = BrauerElement::from_diagram(d3);
        prop_assert_eq!(x.mul(&b1).unwrap().mul(&y).unwrap(), x.mul(&b1.mul(&y).unwrap()).unwrap());
    }

    #[test]
    fn word_round_trip(d in diagram(5)) {
        prop_assert_eq!(diagram_to_word(&d).eval(5).unwrap(), BrauerElement::from_diagram(d));
    }

    #[test]
    fn representation_homomorphism(d1 in diagram(4), d2 in diagram(4), which in 0usize..5) {
        let cfg = [
            ActionConfig::orthogonal(3),
            ActionConfig::orthogonal(4),
            ActionConfig::orthogonal(5),
            ActionConfig::symplectic(4),
            ActionConfig::symplectic(6),
        ][which];
        prop_assume!(cfg.dim.pow(4) <= 1296);
        let (prod, loops) = d1.compose(&d2).unwrap();
        let lhs = rep_diagram(&cfg, &d1).unwrap().mul(&rep_diagram(&cfg, &d2).unwrap()).unwrap();
        let mut w = int(1);
        for _ in 0..loops {
            w *= cfg.omega();
        }
        prop_assert_eq!(lhs, rep_diagram(&cfg, &prod).unwrap().scale(&w));
    }

    #[test]
    fn uea_associativity(a in word(3, 10), b in word(3, 10), c in word(2, 10)) {
        let env = shared_env(ActionConfig::symplectic(4));
        let (x, y, z) = (env.normal_form(&a), env.normal_form(&b), env.normal_form(&c));
        prop_assert_eq!(env.mul(&env.mul(&x, &y), &z), env.mul(&x, &env.mul(&y, &z)));
    }

    #[test]
    fn rewriting_is_confluent(w in word(4, 10), seed in any::<u64>()) {
        let env = shared_env(ActionConfig::orthogonal(5));
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        prop_assert_eq!(env.normal_form(&w), env.normal_form_random(&w, &mut rng));
    }
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 24, ..ProptestConfig::default() })]

    #[test]
    fn contraction_matches_entrywise_product(
        shifts in prop::collection::vec((-4i64..=4, 1i64..=2), 2),
        sym in any::<bool>(),
        sp in any::<bool>(),
    ) {
        let cfg = if sp { ActionConfig::symplectic(4) } else { ActionConfig::orthogonal(3) };
        let projector = if sym { Projector::Sym } else { Projector::Asym };
        let shifts: Vec<Rational> = shifts.into_iter().map(|(n, d)| rat(n, d)).collect();
        let spec = CasimirSpec::new(cfg, projector, 2, Shifts::Explicit(shifts));
        let env = shared_env(cfg);
        let fast = build_casimir(&spec, &env).unwrap();
        prop_assert_eq!(&fast, &build_casimir_naive(&spec, &env, TraceSide::Left).unwrap());
        prop_assert_eq!(&fast, &build_casimir(&spec.clone().with_mode(OmegaMode::Direct), &env).unwrap());
        prop_assert!(env.is_central(&fast).is_ok());
    }
}

#[test]
fn harish_chandra_is_multiplicative() {
    for cfg in [ActionConfig::orthogonal(3), ActionConfig::orthogonal(4), ActionConfig::symplectic(4)] {
        let env: Arc<Enveloping> = shared_env(cfg);
        let z1 = build_casimir(&CasimirSpec::theorem(cfg, Projector::Sym, 1), &env).unwrap();
        let z2 = build_casimir(&CasimirSpec::theorem(cfg, Projector::Asym, 1), &env).unwrap();
        let h1 = env.hc_image(&z1).unwrap();
        let h2 = env.hc_image(&z2).unwrap();
        assert_eq!(env.hc_image(&env.mul(&z1, &z1)).unwrap(), &h1 * &h1);
        assert_eq!(env.hc_image(&env.mul(&z1, &z2)).unwrap(), &h1 * &h2);
    }
}

#[test]
fn non_central_products_are_detected() {
    let env = shared_env(ActionConfig::orthogonal(3));
    let z = build_casimir(&CasimirSpec::theorem(ActionConfig::orthogonal(3), Projector::Sym, 1), &env).unwrap();
    let x = Uea::<MPoly>::generator(0);
    assert!(env.is_central(&env.mul(&z, &x)).is_err());
}
