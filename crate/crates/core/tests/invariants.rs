use clustered_vandermonde::cluster_spectrum::{kernel_chain, micchelli_cross, micchelli_form};
use clustered_vandermonde::dd_bases::divided_difference;
use clustered_vandermonde::linalg::{
    frobenius_norm, hermitian_eigs, lstsq_solve, max_norm, product_singular_bounds, pseudoinverse, singular_values,
    spectral_norm,
};
use clustered_vandermonde::lsq::row_norm_product_bound_check;
use clustered_vandermonde::nodes::{generate_multi_cluster, measure_stats};
use clustered_vandermonde::subspace::{cluster_angle_matrix, principal_angle_min};
use clustered_vandermonde::vandermonde::{build_centered, build_vandermonde, gram_matrix, GramSpec};
use clustered_vandermonde::{ClusterConfig, ClusterSpec, Complex64, ComplexMatrix, DVector, NodeSet};
use proptest::prelude::*;

fn matrix(rows: usize, cols: usize) -> impl Strategy<Value = ComplexMatrix> {
    prop::collection::vec((-1.0..1.0f64, -1.0..1.0f64), rows * cols)
        .prop_map(move |v| ComplexMatrix::from_fn(rows, cols, |i, j| Complex64::new(v[i * cols + j].0, v[i * cols + j].1)))
}

fn dims() -> impl Strategy<Value = (usize, usize)> {
    (1..7usize, 1..7usize)
}

/// Well-separated angles in `[-1, 1]`.
fn spread_angles(max: usize) -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(-1.0..1.0f64, 1..=max).prop_filter("separated", |v| {
        v.iter().enumerate().all(|(i, a)| v[..i].iter().all(|b| (a - b).abs() > 0.05))
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn adjoint_has_same_singular_values(a in dims().prop_flat_map(|(r, c)| matrix(r, c))) {
        let s = singular_values(&a).unwrap();
        let t = singular_values(&a.adjoint()).unwrap();
        for (x, y) in s.values().iter().zip(t.values()) {
            prop_assert!((x - y).abs() <= 1e-12 * s.max().max(1.0));
        }
    }

    #[test]
    fn norm_chain(a in dims().prop_flat_map(|(r, c)| matrix(r, c))) {
        let spec = spectral_norm(&a).unwrap();
        let fro = frobenius_norm(&a);
        let rank = singular_values(&a).unwrap().values().iter().filter(|v| **v > 1e-13 * spec).count() as f64;
        let tol = 1e-12 * (1.0 + fro);
        prop_assert!(max_norm(&a) <= spec + tol);
        prop_assert!(spec <= fro + tol);
        prop_assert!(fro <= rank.sqrt() * spec + tol);
    }

    #[test]
    fn product_singular_value_bounds(
        (b, a) in (1..5usize).prop_flat_map(|n| (n..6usize).prop_map(move |p| (n, p)))
            .prop_flat_map(|(n, p)| (p..8usize).prop_map(move |m| (m, p, n)))
            .prop_flat_map(|(m, p, n)| (matrix(m, p), matrix(p, n)))
    ) {
        prop_assert_eq!(product_singular_bounds(&b, &a).unwrap().violations(1e-10), 0);
    }

    #[test]
    fn row_norm_product_bound((b, c) in (dims(), 1..7usize).prop_flat_map(|((m, p), n)| (matrix(m, p), matrix(p, n)))) {
        prop_assert!(row_norm_product_bound_check(&b, &c).unwrap().ok());
    }

    #[test]
    fn least_squares_residual_is_orthogonal((a, b) in (3..8usize, 1..4usize).prop_flat_map(|(m, n)| (matrix(m, n), matrix(m, 1)))) {
        prop_assume!(singular_values(&a).unwrap().condition_number() < 1e6);
        let b: DVector<Complex64> = b.column(0).into_owned();
        let x = lstsq_solve(&a, &b).unwrap();
        let normal = a.adjoint() * (&a * &x - &b);
        prop_assert!(normal.norm() <= 1e-10 * (1.0 + b.norm()));
        let p = pseudoinverse(&a).unwrap();
        prop_assert!(frobenius_norm(&(&a * &p * &a - &a)) <= 1e-10 * frobenius_norm(&a));
        prop_assert!(frobenius_norm(&(&p * &a * &p - &p)) <= 1e-10 * frobenius_norm(&p));
    }

    #[test]
    fn divided_difference_is_symmetric(pts in spread_angles(6), seed in any::<u64>()) {
        let f = |t: f64| Complex64::cis(3.0 * t) + Complex64::new(t.powi(4), 0.0);
        let mut shuffled = pts.clone();
        let k = shuffled.len();
        shuffled.rotate_left((seed % k as u64) as usize);
        if seed % 2 == 0 { shuffled.reverse(); }
        let a = divided_difference(&pts, f).unwrap();
        let b = divided_difference(&shuffled, f).unwrap();
        prop_assert!((a - b).norm() <= 1e-9 * (1.0 + a.norm()));
    }

    #[test]
    fn gram_is_centered_product(x in spread_angles(5), m in 2..80usize) {
        let nodes = NodeSet::new(x).unwrap();
        let n = 2 * m;
        let g = gram_matrix(&GramSpec::new(&nodes, n).unwrap());
        let vt = build_centered(&nodes, n).unwrap();
        let diff = (vt.adjoint() * vt - &g).iter().map(|z| z.norm()).fold(0.0, f64::max);
        prop_assert!(diff <= 1e-12);
        let mut lambda = hermitian_eigs(&g).unwrap();
        lambda.reverse();
        let sv = singular_values(&build_vandermonde(&nodes, n).unwrap()).unwrap();
        let floor = 1e-13 * sv.max();
        for (s, l) in sv.values().iter().zip(&lambda) {
            prop_assert!((s - (n as f64 * l.max(0.0)).sqrt()).abs() <= 1e-8 * s + floor * 1e3);
        }
    }

    /// Angles between column spaces do not depend on the basis chosen.
    #[test]
    fn principal_angle_is_basis_invariant(
        (a, b, r, s) in (4..9usize, 1..3usize, 1..3usize)
            .prop_flat_map(|(m, p, q)| (matrix(m, p), matrix(m, q), matrix(p, p), matrix(q, q)))
    ) {
        prop_assume!(singular_values(&r).unwrap().condition_number() < 1e3);
        prop_assume!(singular_values(&s).unwrap().condition_number() < 1e3);
        prop_assume!(singular_values(&a).unwrap().condition_number() < 1e4);
        prop_assume!(singular_values(&b).unwrap().condition_number() < 1e4);
        let x = principal_angle_min(&a, &b).unwrap();
        let y = principal_angle_min(&(&a * r), &(&b * s)).unwrap();
        prop_assert!((x.beta - y.beta).abs() <= 1e-9);
        prop_assert!((x.min_angle + x.beta - std::f64::consts::FRAC_PI_2).abs() <= 1e-15);
    }

    /// Rotating every node multiplies `V_N` by a unitary diagonal matrix.
    #[test]
    fn cluster_angles_are_rotation_invariant(shift in -3.0..3.0f64, nh in 1e-6..1e-1f64, n in 50..400usize) {
        let h = nh / n as f64;
        let cfg = |c: f64| ClusterConfig {
            clusters: vec![ClusterSpec::equispaced(c, h, 3), ClusterSpec::equispaced(c + 1.0, h, 2)],
            theta: 0.5,
        };
        let a = cluster_angle_matrix(&generate_multi_cluster(&cfg(0.0), 0).unwrap(), n).unwrap();
        let b = cluster_angle_matrix(&generate_multi_cluster(&cfg(shift), 0).unwrap(), n).unwrap();
        prop_assert!((a.alpha - b.alpha).abs() <= 1e-8 * a.alpha + 1e-14);
    }

    #[test]
    fn micchelli_positive_and_orthogonal(y in spread_angles(6).prop_map(|v| v.iter().map(|t| t / 2.0).collect::<Vec<_>>()), coeffs in prop::collection::vec((-1.0..1.0f64, -1.0..1.0f64), 12)) {
        let s = y.len();
        let chain = kernel_chain(&y).unwrap();
        for m in 0..s {
            let level = &chain.levels[m];
            let k = level.ker_prev.ncols();
            let c = DVector::from_fn(k, |i, _| Complex64::new(coeffs[i].0, coeffs[i].1));
            let a = &level.ker_prev * c;
            prop_assert!(micchelli_form(&y, m, &a).unwrap() >= -1e-12 * a.norm_squared());
            if level.ker.ncols() > 0 {
                let d = DVector::from_fn(level.ker.ncols(), |i, _| Complex64::new(coeffs[i + 6].1, coeffs[i + 6].0));
                let b = &level.ker * d;
                prop_assert!(micchelli_cross(&y, m, &a, &b).unwrap().norm() <= 1e-10 * a.norm() * b.norm());
            }
        }
    }

    #[test]
    fn generated_configs_meet_their_separation(
        mult in prop::collection::vec(1..4usize, 2..5),
        nh in 1e-4..1e-1f64,
        theta in 0.2..1.0f64,
    ) {
        let h = nh / 500.0;
        let mut next = 0.0;
        let clusters = mult.iter().map(|&s| {
            let c = next;
            next += h + theta;
            ClusterSpec::equispaced(c, h, s)
        }).collect();
        let nodes = generate_multi_cluster(&ClusterConfig { clusters, theta }, 1).unwrap();
        let stats = measure_stats(&nodes).unwrap();
        prop_assert!(stats.theta.unwrap() >= theta * (1.0 - 1e-12));
        for (hj, &s) in stats.h.iter().zip(&mult) {
            if s > 1 { prop_assert!((hj - h).abs() <= 1e-12 * h); }
        }
    }
}
