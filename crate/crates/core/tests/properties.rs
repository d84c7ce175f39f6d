use proptest::prelude::*;

use walsh_greedy::dirichlet::{dirichlet_pow2, dirichlet_step, lebesgue_constant};
use walsh_greedy::greedy::{
    coeff_compare, greedy_approximant, greedy_gap_norm, greedy_order, Coefficient, Expansion, Term,
};
use walsh_greedy::walsh::{synthesize, walsh_sign, walsh_step};
use walsh_greedy::{DyadicStep, Rational};

fn rational() -> impl Strategy<Value = Rational> {
    (-40i64..=40, 1i64..=12).prop_map(|(p, q)| Rational::new(p, q).unwrap())
}

fn step(max_level: u32) -> impl Strategy<Value = DyadicStep> {
    (0..=max_level).prop_flat_map(|level| {
        proptest::collection::vec(rational(), 1usize << level)
            .prop_map(move |v| DyadicStep::new(level, v).unwrap())
    })
}

fn expansion(max_index: u64) -> impl Strategy<Value = Expansion> {
    proptest::collection::btree_map(0..max_index, rational(), 1..12).prop_map(|m| {
        Expansion::new(
            m.into_iter()
                .map(|(n, c)| Term::new(n, Coefficient::Explicit(c)))
                .collect(),
        )
        .unwrap()
    })
}

proptest! {
    #[test]
    fn refine_composes(f in step(3), a in 0u32..3, b in 0u32..3) {
        let a = f.level() + a;
        let b = a + b;
        prop_assert_eq!(f.refine(a).unwrap().refine(b).unwrap(), f.refine(b).unwrap());
    }

    #[test]
    fn refine_keeps_norms(f in step(4), extra in 0u32..4) {
        let g = f.refine(f.level() + extra).unwrap();
        prop_assert_eq!(g.l1_norm(), f.l1_norm());
        prop_assert_eq!(g.integral(), f.integral());
    }

    #[test]
    fn triangle_inequality(f in step(4), g in step(4)) {
        prop_assert!((&f + &g).l1_norm() <= f.l1_norm() + g.l1_norm());
    }

    #[test]
    fn sign_products_keep_norm(f in step(4), n in 0u64..16) {
        let w = walsh_step(n, 4).unwrap();
        prop_assert_eq!(f.pointwise_product(&w).unwrap().l1_norm(), f.l1_norm());
    }

    #[test]
    fn combine_commutes_with_refine(f in step(3), g in step(3), a in rational(), b in rational(), extra in 0u32..3) {
        let top = f.level().max(g.level()) + extra;
        let combined = DyadicStep::linear_combine(&[(a.clone(), &f), (b.clone(), &g)]).unwrap().refine(top).unwrap();
        let fr = f.refine(top).unwrap();
        let gr = g.refine(top).unwrap();
        prop_assert_eq!(combined, DyadicStep::linear_combine(&[(a, &fr), (b, &gr)]).unwrap());
    }

    #[test]
    fn combine_order_irrelevant(f in step(3), g in step(3), a in rational(), b in rational()) {
        prop_assert_eq!(
            DyadicStep::linear_combine(&[(a.clone(), &f), (b.clone(), &g)]).unwrap(),
            DyadicStep::linear_combine(&[(b, &g), (a, &f)]).unwrap()
        );
    }

    #[test]
    fn walsh_nested_levels(n in 0u64..64, extra in 0u32..4, cell in 0u64..64) {
        let coarse = 6;
        let fine = coarse + extra;
        let base = walsh_sign(n, coarse, cell).unwrap();
        for sub in 0..1u64 << extra {
            prop_assert_eq!(walsh_sign(n, fine, (cell << extra) | sub).unwrap(), base);
        }
    }

    #[test]
    fn synthesis_matches_direct_sum(e in expansion(32)) {
        let level = 5;
        let fast = synthesize(
            e.terms().iter().map(|t| match &t.coeff {
                Coefficient::Explicit(c) => (t.index.0, c.clone()),
                Coefficient::Symbolic { .. } => unreachable!(),
            }),
            level,
        ).unwrap();
        let steps: Vec<DyadicStep> = e.terms().iter().map(|t| walsh_step(t.index.0, level).unwrap()).collect();
        let pairs: Vec<(Rational, &DyadicStep)> = e.terms().iter().zip(&steps).map(|(t, s)| match &t.coeff {
            Coefficient::Explicit(c) => (c.clone(), s),
            Coefficient::Symbolic { .. } => unreachable!(),
        }).collect();
        prop_assert_eq!(fast, DyadicStep::linear_combine(&pairs).unwrap());
    }

    #[test]
    fn greedy_order_is_monotone_permutation(e in expansion(64)) {
        let order = greedy_order(&e).unwrap();
        let mut sorted = order.clone();
        sorted.sort_unstable();
        prop_assert_eq!(sorted, (0..e.len()).collect::<Vec<_>>());
        let mag = |p: usize| match &e.terms()[p].coeff {
            Coefficient::Explicit(c) => c.abs(),
            Coefficient::Symbolic { .. } => unreachable!(),
        };
        for w in order.windows(2) {
            prop_assert!(mag(w[0]) >= mag(w[1]));
            if mag(w[0]) == mag(w[1]) {
                prop_assert!(e.terms()[w[0]].index < e.terms()[w[1]].index);
            }
        }
    }

    #[test]
    fn full_approximant_is_the_sum(e in expansion(16)) {
        let level = 4;
        let g = greedy_approximant(&e, e.len(), level).unwrap().step;
        let direct = synthesize(e.terms().iter().map(|t| match &t.coeff {
            Coefficient::Explicit(c) => (t.index.0, c.clone()),
            Coefficient::Symbolic { .. } => unreachable!(),
        }), level).unwrap();
        prop_assert_eq!(g, direct);
    }

    #[test]
    fn gap_is_difference_of_approximants(e in expansion(16), a in 0usize..12, b in 0usize..12) {
        let level = 4;
        let (m1, m2) = (a.min(b).min(e.len()), a.max(b).min(e.len()));
        let g1 = greedy_approximant(&e, m1, level).unwrap().step;
        let g2 = greedy_approximant(&e, m2, level).unwrap().step;
        prop_assert_eq!(greedy_gap_norm(&e, m1, m2, level).unwrap().value, (&g2 - &g1).l1_norm());
    }

    #[test]
    fn symbolic_order_matches_exact_values(nu1 in 1u64..6, nu2 in 1u64..6, n1 in 4u64..40, n2 in 4u64..40) {
        let a = Coefficient::Symbolic { nu: nu1, n: n1 };
        let b = Coefficient::Symbolic { nu: nu2, n: n2 };
        let va = Rational::inverse_square(nu1) + Rational::pow2(-(n1 as i64));
        let vb = Rational::inverse_square(nu2) + Rational::pow2(-(n2 as i64));
        match coeff_compare(&a, &b) {
            Ok(ord) => prop_assert_eq!(ord, va.cmp(&vb)),
            Err(_) => prop_assert!(nu1 != nu2),
        }
    }

    #[test]
    fn symbolic_vs_explicit_is_exact(nu in 1u64..6, n in 0u64..30, c in rational()) {
        let a = Coefficient::Symbolic { nu, n };
        let va = Rational::inverse_square(nu) + Rational::pow2(-(n as i64));
        prop_assert_eq!(coeff_compare(&a, &Coefficient::Explicit(c.clone())).unwrap(), va.cmp(&c));
    }

    #[test]
    fn expansion_text_round_trip(e in expansion(1 << 20), sym in proptest::collection::vec((1u64..9, 0u64..200), 0..4)) {
        let mut terms = e.terms().to_vec();
        let mut next = 1u64 << 20;
        for (nu, n) in sym {
            terms.push(Term::new(next, Coefficient::Symbolic { nu, n }));
            next += 3;
        }
        let e = Expansion::new(terms).unwrap();
        prop_assert_eq!(Expansion::parse_text(&e.to_text()).unwrap(), e);
    }
}

#[test]
fn multiplicativity_small() {
    for k in 0..=6u32 {
        for j in 0..1u64 << k {
            let level = k + 1;
            let lhs = walsh_step((1 << k) + j, level).unwrap();
            let rhs = walsh_step(1 << k, level)
                .unwrap()
                .pointwise_product(&walsh_step(j, level).unwrap())
                .unwrap();
            assert_eq!(lhs, rhs, "k={k} j={j}");
        }
    }
}

#[test]
fn dirichlet_recursion_on_grids() {
    for k in 0..=8u32 {
        let level = k + 1;
        let d_pow = dirichlet_step(1 << k, level).unwrap();
        let w = walsh_step(1 << k, level).unwrap();
        for j in 0..1u64 << k {
            let lhs = dirichlet_step((1 << k) + j, level).unwrap();
            let prod = w
                .pointwise_product(&dirichlet_step(j, level).unwrap())
                .unwrap();
            assert_eq!(lhs, &d_pow + &prod, "k={k} j={j}");
        }
    }
}

#[test]
fn closed_form_kernels_small() {
    for level in 0..=8u32 {
        for j in 0..=level {
            assert_eq!(
                dirichlet_pow2(j, level).unwrap(),
                dirichlet_step(1 << j, level).unwrap()
            );
        }
    }
}

#[test]
fn lebesgue_recursion_small() {
    for m in 0..=256u64 {
        assert_eq!(
            lebesgue_constant(m),
            dirichlet_step(m, 8).unwrap().l1_norm(),
            "m={m}"
        );
    }
}
