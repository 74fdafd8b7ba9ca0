use proptest::prelude::*;
use revcert_core::lp::{lp_solve, LinearProgram, LpOutcome, Relation, Sense};
use revcert_core::scalar::{dot, ivec, Scalar};

fn relation() -> impl Strategy<Value = Relation> {
    prop_oneof![Just(Relation::Le), Just(Relation::Eq), Just(Relation::Ge)]
}

fn program() -> impl Strategy<Value = LinearProgram> {
    (1usize..=4, 1usize..=5).prop_flat_map(|(n, m)| {
        (
            prop::collection::vec((prop::collection::vec(-3i64..=3, n), relation(), -5i64..=5), m),
            prop::collection::vec(-3i64..=3, n),
            prop::collection::vec((prop::option::of(-2i64..=1), prop::option::of(0i64..=3)), n),
            any::<bool>(),
        )
            .prop_map(move |(rows, c, bounds, maximize)| {
                let mut lp = LinearProgram::new(n);
                for (a, rel, b) in rows {
                    lp.add(ivec(&a), rel, Scalar::from_int(b));
                }
                for (j, (lo, hi)) in bounds.into_iter().enumerate() {
                    if let Some(l) = lo {
                        lp.set_lower(j, Scalar::from_int(l));
                    }
                    if let Some(u) = hi {
                        lp.set_upper(j, Scalar::from_int(u));
                    }
                }
                let sense = if maximize { Sense::Maximize } else { Sense::Minimize };
                lp.set_objective(sense, ivec(&c));
                lp
            })
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(400))]

    #[test]
    fn every_outcome_carries_a_valid_certificate(lp in program()) {
        let out = lp_solve(&lp).unwrap();
        prop_assert!(lp.verify_outcome(&out), "{:?}", out);
        match &out {
            LpOutcome::Optimal { x, value, dual } => {
                prop_assert_eq!(&dot(&lp.objective, x), value);
                prop_assert!(lp.verify_optimal(x, value, dual));
            }
            LpOutcome::Infeasible { farkas } => prop_assert!(lp.verify_farkas(farkas)),
            LpOutcome::Unbounded { point, ray } => prop_assert!(lp.verify_unbounded(point, ray)),
        }
    }

    #[test]
    fn solving_is_deterministic(lp in program()) {
        prop_assert_eq!(lp_solve(&lp).unwrap(), lp_solve(&lp).unwrap());
    }
}
