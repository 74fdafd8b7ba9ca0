//! Fixed workloads for the engine benchmarks.

use revcert_core::oracle::GridSpec;
use revcert_core::pareto::ParetoSample;
use revcert_core::scalar::ivec;
use revcert_core::{AffineForm, PolyhedralConvexFunction, ReverseProblem, Scalar};

fn function(n: usize, pieces: &[(Vec<i64>, i64)]) -> PolyhedralConvexFunction {
    let forms = pieces
        .iter()
        .map(|(a, b)| AffineForm::new(ivec(a), Scalar::from_int(*b)))
        .collect();
    PolyhedralConvexFunction::new(n, forms, None).expect("valid fixture")
}

/// `f = max(2x, -x)`, `h = |x| - 1`, `x̄ = 1`: refuted at `ε′ = 2`.
pub fn example_b(eps: Scalar) -> ReverseProblem {
    ReverseProblem::new(
        1,
        function(1, &[(vec![2], 0), (vec![-1], 0)]),
        function(1, &[(vec![1], -1), (vec![-1], -1)]),
        Vec::new(),
        ivec(&[1]),
        eps,
    )
    .expect("valid fixture")
}

/// `h = max_i |x_i| - 1` as `2n` pieces.
pub fn box_norm(n: usize) -> PolyhedralConvexFunction {
    let pieces: Vec<(Vec<i64>, i64)> = (0..n)
        .flat_map(|i| {
            [1, -1].into_iter().map(move |s| {
                let mut a = vec![0; n];
                a[i] = s;
                (a, -1)
            })
        })
        .collect();
    function(n, &pieces)
}

/// A planar instance with a four-piece objective and the box norm as `h`.
pub fn planar(eps: Scalar) -> ReverseProblem {
    let f = function(
        2,
        &[(vec![1, 2], 0), (vec![-2, 1], 1), (vec![1, -3], -1), (vec![-1, -1], 2)],
    );
    ReverseProblem::new(2, f, box_norm(2), Vec::new(), ivec(&[1, 0]), eps).expect("valid fixture")
}

pub fn cube(n: usize, half_width: i64, step: Scalar) -> GridSpec {
    GridSpec::cube(n, Scalar::from_int(-half_width), Scalar::from_int(half_width), step).expect("valid grid")
}

/// `len` points with deterministic bicriteria images in `[-5, 5]²`.
pub fn pareto_sample(len: usize) -> ParetoSample {
    let points = (0..len).map(|i| ivec(&[i as i64])).collect();
    let images = (0..len as i64)
        .map(|i| Some(ivec(&[(i * 7) % 11 - 5, (i * 5) % 11 - 5])))
        .collect();
    ParetoSample::new(2, points, images).expect("valid sample")
}
