use proptest::prelude::*;
use revcert_core::certificates::{
    recheck_witness, union_member_rop, verify, EpsPrimeSweep, InapplicableReason, Mode,
    VerdictStatus,
};
use revcert_core::oracle::{box_minimizer, boundary_projection, brute_eps_argmin, GridSpec, OracleMode};
use revcert_core::pareto::{eff_set, ParetoSample, SigmaKind};
use revcert_core::scalar::{ivec, Extended, Scalar};
use revcert_core::{lp_solve, AffineForm, LinearProgram, LpOutcome, PolyhedralConvexFunction, Relation, ReverseProblem};

fn function(n: usize, max_pieces: usize) -> impl Strategy<Value = PolyhedralConvexFunction> {
    prop::collection::vec((prop::collection::vec(-3i64..=3, n), -3i64..=3), 1..=max_pieces).prop_map(
        move |pieces| {
            let forms = pieces
                .into_iter()
                .map(|(a, b)| AffineForm::new(ivec(&a), Scalar::from_int(b)))
                .collect();
            PolyhedralConvexFunction::new(n, forms, None).unwrap()
        },
    )
}

/// `h` shifted so that `h(x̄) = 0`.
fn through(h: &PolyhedralConvexFunction, x: &[Scalar]) -> PolyhedralConvexFunction {
    let hx = h.max_piece(x);
    let forms = h
        .pieces()
        .iter()
        .map(|p| AffineForm::new(p.a.clone(), &p.b - &hx))
        .collect();
    PolyhedralConvexFunction::new(h.dim(), forms, None).unwrap()
}

fn problem() -> impl Strategy<Value = ReverseProblem> {
    (1usize..=2).prop_flat_map(|n| {
        (
            function(n, 4),
            function(n, 4),
            prop::collection::vec(-2i64..=2, n),
            0i64..=4,
        )
            .prop_map(move |(f, h, x, e)| {
                let x = ivec(&x);
                let h = through(&h, &x);
                ReverseProblem::new(n, f, h, Vec::new(), x, Scalar::frac(e, 2)).unwrap()
            })
    })
}

/// Exact `inf f` over `{h ≥ 0}`, or over `{h = 0}` when `equality` is set,
/// as the smallest of one LP per piece of `h`.
fn exact_min(p: &ReverseProblem, equality: bool) -> Extended {
    let n = p.dim();
    let mut best = Extended::PosInfinity;
    for i in 0..p.reverse().pieces().len() {
        let mut lp = LinearProgram::new(n + 1);
        for q in p.objective().pieces() {
            let mut row = q.a.clone();
            row.push(-Scalar::one());
            lp.add(row, Relation::Le, -&q.b);
        }
        for (j, other) in p.reverse().pieces().iter().enumerate() {
            let rel = match (i == j, equality) {
                (true, true) => Relation::Eq,
                (true, false) => Relation::Ge,
                (false, true) => Relation::Le,
                (false, false) => continue,
            };
            let mut row = other.a.clone();
            row.push(Scalar::zero());
            lp.add(row, rel, -&other.b);
        }
        let mut c = vec![Scalar::zero(); n + 1];
        c[n] = Scalar::one();
        let out = lp_solve(&lp.minimize(c)).unwrap();
        let v = match out {
            LpOutcome::Optimal { value, .. } => Extended::Finite(value),
            LpOutcome::Unbounded { .. } => Extended::NegInfinity,
            LpOutcome::Infeasible { .. } => Extended::PosInfinity,
        };
        best = best.min(v);
    }
    best
}

fn small_sweep() -> EpsPrimeSweep {
    EpsPrimeSweep::explicit(vec![Scalar::frac(1, 2), Scalar::one(), Scalar::from_int(2), Scalar::from_int(4)]).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn refutations_recheck(p in problem()) {
        let v = verify(&p, Mode::Rop, &EpsPrimeSweep::default_for(p.epsilon(), 0)).unwrap();
        if let Some(w) = v.witness() {
            prop_assert!(recheck_witness(&p, Mode::Rop, w).unwrap());
        }
    }

    #[test]
    fn refutations_are_exactly_sound(p in problem()) {
        let sweep = EpsPrimeSweep::default_for(p.epsilon(), 0);
        let fx = p.objective().max_piece(p.point());
        for (mode, equality) in [(Mode::Rop, false), (Mode::Equality, true)] {
            if verify(&p, mode, &sweep).unwrap().is_refuted() {
                prop_assert!(exact_min(&p, equality) < Extended::Finite(&fx - p.epsilon()));
            }
        }
    }

    #[test]
    fn union_is_convex(
        f in function(2, 4),
        x in prop::collection::vec(-2i64..=2, 2),
        e in 0i64..=4,
        ep in 0i64..=4,
        s1 in prop::collection::vec(-6i64..=6, 2),
        s2 in prop::collection::vec(-6i64..=6, 2),
    ) {
        let x = ivec(&x);
        let (eps, eps_prime) = (Scalar::frac(e, 2), Scalar::frac(ep, 2));
        let s1: Vec<Scalar> = s1.iter().map(|&v| Scalar::frac(v, 2)).collect();
        let s2: Vec<Scalar> = s2.iter().map(|&v| Scalar::frac(v, 2)).collect();
        let a = union_member_rop(&f, &x, &eps, &eps_prime, &s1).unwrap().accepted;
        let b = union_member_rop(&f, &x, &eps, &eps_prime, &s2).unwrap().accepted;
        if a && b {
            for t in [Scalar::frac(1, 4), Scalar::frac(1, 2), Scalar::frac(3, 4)] {
                let mid: Vec<Scalar> = s1.iter().zip(&s2).map(|(u, v)| &t * u + (Scalar::one() - &t) * v).collect();
                prop_assert!(union_member_rop(&f, &x, &eps, &eps_prime, &mid).unwrap().accepted);
            }
        }
    }

    #[test]
    fn larger_eps_never_refutes_a_certificate(p in problem(), extra in 1i64..=4) {
        let sweep = small_sweep();
        let v = verify(&p, Mode::Rop, &sweep).unwrap();
        if v.status == VerdictStatus::CertifiedOnGrid {
            let wider = p.with_epsilon(p.epsilon() + Scalar::frac(extra, 2)).unwrap();
            let w = verify(&wider, Mode::Rop, &sweep).unwrap();
            prop_assert!(
                w.status == VerdictStatus::CertifiedOnGrid
                    || w.reason == Some(InapplicableReason::EssentialAssumptionFails)
            );
        }
    }

    #[test]
    fn constrained_with_h_matches_equality(p in problem()) {
        let sweep = small_sweep();
        let eq = verify(&p, Mode::Equality, &sweep).unwrap();
        let with_h = p.with_constraints(vec![p.reverse().clone()]).unwrap();
        let con = verify(&with_h, Mode::Constrained, &sweep).unwrap();
        if eq.status != VerdictStatus::Inapplicable && con.status != VerdictStatus::Inapplicable {
            prop_assert_eq!(eq.status, con.status);
        }
    }

    #[test]
    fn boundary_projection_postconditions(p in problem(), xi in 0usize..81) {
        let f = p.objective();
        let h = p.reverse();
        let n = p.dim();
        let grid = GridSpec::cube(n, Scalar::from_int(-4), Scalar::from_int(4), Scalar::one()).unwrap();
        let x = grid.point(xi % grid.len());
        let y = box_minimizer(f, &grid).unwrap().unwrap();
        if h.max_piece(&x).is_positive() && h.max_piece(&y).is_negative() && f.max_piece(&y) < f.max_piece(&x) {
            let pi = boundary_projection(f, h, &x, &y).unwrap();
            prop_assert!(h.max_piece(&pi).is_zero());
            prop_assert!(f.max_piece(&pi) < f.max_piece(&x));
        }
    }

    #[test]
    fn boundary_part_of_reverse_argmin_within_equality_argmin(p in problem()) {
        let grid = GridSpec::cube(p.dim(), Scalar::from_int(-3), Scalar::from_int(3), Scalar::frac(1, 2)).unwrap();
        let eq = brute_eps_argmin(&p, OracleMode::Equality, &grid).unwrap();
        let rev = brute_eps_argmin(&p, OracleMode::Reverse, &grid).unwrap();
        for g in rev.eps_argmin.iter().filter(|g| p.reverse().max_piece(&g.point).is_zero()) {
            prop_assert!(eq.eps_argmin.iter().any(|e| e.point == g.point));
        }
        for g in &eq.eps_argmin {
            prop_assert!(p.reverse().max_piece(&g.point).is_zero());
        }
    }
}

fn sample_strategy() -> impl Strategy<Value = (ParetoSample, Vec<Scalar>)> {
    (
        prop::collection::vec(prop::option::weighted(0.9, prop::collection::vec(-5i64..=5, 2)), 1..=30),
        prop::collection::vec(-2i64..=3, 2),
    )
        .prop_map(|(imgs, eps)| {
            let points = (0..imgs.len()).map(|i| ivec(&[i as i64])).collect();
            let images = imgs.iter().map(|y| y.as_ref().map(|v| ivec(v))).collect();
            (ParetoSample::new(2, points, images).unwrap(), ivec(&eps))
        })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn efficiency_chain((s, eps) in sample_strategy()) {
        let strong = eff_set(&s, &eps, SigmaKind::S).unwrap();
        let eff = eff_set(&s, &eps, SigmaKind::E).unwrap();
        let weak = eff_set(&s, &eps, SigmaKind::W).unwrap();
        prop_assert!(strong.iter().all(|i| eff.contains(i)));
        prop_assert!(eff.iter().all(|i| weak.contains(i)));
    }

    #[test]
    fn nonempty_sets_bound_eps((s, eps) in sample_strategy()) {
        let zero = [Scalar::zero(), Scalar::zero()];
        if !eff_set(&s, &eps, SigmaKind::S).unwrap().is_empty() {
            prop_assert!(eps.iter().all(|e| !e.is_negative()));
        }
        if !eff_set(&s, &eps, SigmaKind::E).unwrap().is_empty() {
            let le_ne = eps.iter().zip(&zero).all(|(a, b)| a <= b) && eps.iter().any(|e| !e.is_zero());
            prop_assert!(!le_ne);
        }
        if !eff_set(&s, &eps, SigmaKind::W).unwrap().is_empty() {
            prop_assert!(!eps.iter().all(|e| e.is_negative()));
        }
    }

    #[test]
    fn single_criterion_matches_oracle(p in problem()) {
        let grid = GridSpec::cube(p.dim(), Scalar::from_int(-2), Scalar::from_int(2), Scalar::frac(1, 2)).unwrap();
        let brute = brute_eps_argmin(&p, OracleMode::Reverse, &grid).unwrap();
        let feasible: Vec<Vec<Scalar>> = grid
            .points()
            .into_iter()
            .filter(|x| !p.reverse().max_piece(x).is_negative())
            .collect();
        let sample = ParetoSample::from_functions(&[p.objective().clone()], feasible).unwrap();
        let ids = eff_set(&sample, &[p.epsilon().clone()], SigmaKind::E).unwrap();
        let from_scan: Vec<Vec<Scalar>> = ids.iter().map(|&i| sample.points()[i].clone()).collect();
        let from_oracle: Vec<Vec<Scalar>> = brute.eps_argmin.iter().map(|g| g.point.clone()).collect();
        prop_assert_eq!(from_scan, from_oracle);
    }
}
