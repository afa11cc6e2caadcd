//! Cross-module property tests: algebraic invariants of the cost forms and
//! transforms on generated inputs.

use centric_kit::dataset::{centroid, dist_sq};
use centric_kit::kmeans::{cost, cost_pairwise_forms, clustering_error};
use centric_kit::transforms::{
    centric_set_transform, distance_matrix, gamma_plus_plus, is_kleinberg_gamma_transform,
};
use centric_kit::{Dataset, Partition};
use proptest::prelude::*;

fn rel_err(a: f64, b: f64) -> f64 {
    (a - b).abs() / a.abs().max(b.abs()).max(1.0)
}

fn arb_points(max_n: usize, max_d: usize) -> impl Strategy<Value = Vec<Vec<f64>>> {
    (1..=max_n, 1..=max_d).prop_flat_map(|(n, d)| {
        proptest::collection::vec(
            proptest::collection::vec(-100.0f64..100.0, d..=d),
            n..=n,
        )
    })
}

/// Points plus a valid partition of them.
fn arb_instance(
    max_n: usize,
    max_d: usize,
    max_k: usize,
) -> impl Strategy<Value = (Vec<Vec<f64>>, Vec<usize>, usize)> {
    arb_points(max_n, max_d).prop_flat_map(move |points| {
        let n = points.len();
        let k_max = n.min(max_k);
        (Just(points), 1..=k_max).prop_flat_map(move |(points, k)| {
            let n = points.len();
            (
                Just(points),
                proptest::collection::vec(0..k, n..=n),
                Just(k),
            )
                .prop_map(move |(points, mut labels, k)| {
                    for c in 0..k {
                        labels[c] = c; // pin one member per cluster
                    }
                    (points, labels, k)
                })
        })
    })
}

proptest! {
    #[test]
    fn centroid_is_translation_equivariant(
        points in arb_points(12, 4),
        shift in proptest::collection::vec(-50.0f64..50.0, 4),
    ) {
        let d = points[0].len();
        let dataset = Dataset::new(points.clone()).unwrap();
        let shifted = Dataset::new(
            points.iter().map(|p| p.iter().zip(&shift).map(|(c, s)| c + s).collect()).collect(),
        ).unwrap();
        let subset: Vec<usize> = (0..points.len()).collect();
        let mu = centroid(&dataset, &subset).unwrap();
        let mu_shifted = centroid(&shifted, &subset).unwrap();
        for j in 0..d {
            prop_assert!((mu[j] + shift[j] - mu_shifted[j]).abs() <= 1e-12 * mu[j].abs().max(shift[j].abs()).max(1.0));
        }
    }

    #[test]
    fn centroid_is_scale_equivariant(points in arb_points(12, 4), alpha in -10.0f64..10.0) {
        let dataset = Dataset::new(points.clone()).unwrap();
        let scaled = Dataset::new(
            points.iter().map(|p| p.iter().map(|c| alpha * c).collect()).collect(),
        ).unwrap();
        let subset: Vec<usize> = (0..points.len()).collect();
        let mu = centroid(&dataset, &subset).unwrap();
        let mu_scaled = centroid(&scaled, &subset).unwrap();
        for (m, ms) in mu.iter().zip(&mu_scaled) {
            prop_assert!((alpha * m - ms).abs() <= 1e-12 * (alpha * m).abs().max(1.0));
        }
    }

    #[test]
    fn cost_forms_agree((points, labels, k) in arb_instance(16, 4, 4)) {
        let dataset = Dataset::new(points).unwrap();
        let partition = Partition::new(labels, k);
        let q = cost(&dataset, &partition).unwrap();
        let (unordered, ordered) = cost_pairwise_forms(&dataset, &partition).unwrap();
        prop_assert!(rel_err(q, unordered) <= 1e-9);
        prop_assert!(rel_err(q, ordered) <= 1e-9);
    }

    #[test]
    fn centric_transform_fixes_subset_centroid(
        (points, labels, k) in arb_instance(14, 3, 3),
        lambda in 0.01f64..=1.0,
    ) {
        let dataset = Dataset::new(points).unwrap();
        let partition = Partition::new(labels, k);
        let members = partition.cluster_members(0);
        let dataset_mu = centroid(&dataset, &members).unwrap();
        let out = centric_set_transform(&dataset, &members, lambda).unwrap();
        let out_mu = centroid(&out, &members).unwrap();
        for (a, b) in dataset_mu.iter().zip(&out_mu) {
            prop_assert!((a - b).abs() <= 1e-12 * a.abs().max(1.0));
        }
    }

    #[test]
    fn clustering_error_is_symmetric_and_reflexive(
        labels_a in proptest::collection::vec(0usize..4, 1..20),
        labels_b in proptest::collection::vec(0usize..4, 1..20),
    ) {
        let n = labels_a.len().min(labels_b.len());
        let a = Partition::new(labels_a[..n].to_vec(), 4);
        let b = Partition::new(labels_b[..n].to_vec(), 4);
        prop_assert_eq!(clustering_error(&a, &a).unwrap(), 0);
        prop_assert_eq!(
            clustering_error(&a, &b).unwrap(),
            clustering_error(&b, &a).unwrap()
        );
    }
}

/// A Γ⁺⁺ transform may stretch a within-cluster distance while shrinking a
/// cross-cluster distance, which no Kleinberg Γ-transformation can do. The
/// instance is verified with the checker and by hand.
#[test]
fn gamma_plus_plus_defies_kleinberg_monotonicity() {
    // T = {0, 4, 5}, Z = {10}; contracting P = {0, 4} about μ(P) = 2 with
    // λ = 1/2 sends 0 ↦ 1 and 4 ↦ 3.
    let dataset =
        Dataset::new(vec![vec![0.0], vec![4.0], vec![5.0], vec![10.0]]).unwrap();
    let partition = Partition::new(vec![0, 0, 0, 1], 2);

    // the reference partition is the exact 2-means optimum with a clear gap
    let ideal = centric_kit::kmeans::kmeans_ideal(&dataset, 2).unwrap();
    assert_eq!(clustering_error(&ideal.partition, &partition).unwrap(), 0);
    assert!(ideal.optimality_gap.unwrap() > 1.0);

    let (transformed, _) = gamma_plus_plus(&dataset, &partition, 0, &[0, 1], 0.5).unwrap();
    assert_eq!(transformed.point(0), &[1.0]);
    assert_eq!(transformed.point(1), &[3.0]);

    // within-cluster pair (1, 2): |4 − 5| = 1 grows to |3 − 5| = 2
    let within_before = dist_sq(dataset.point(1), dataset.point(2)).sqrt();
    let within_after = dist_sq(transformed.point(1), transformed.point(2)).sqrt();
    assert!(within_after > within_before + 0.5);

    // cross pair (0, 3): |0 − 10| = 10 shrinks to |1 − 10| = 9
    let cross_before = dist_sq(dataset.point(0), dataset.point(3)).sqrt();
    let cross_after = dist_sq(transformed.point(0), transformed.point(3)).sqrt();
    assert!(cross_after < cross_before - 0.5);

    let check = is_kleinberg_gamma_transform(
        &distance_matrix(&dataset),
        &distance_matrix(&transformed),
        &partition,
    )
    .unwrap();
    assert!(!check.valid);
    assert!(check.violations.iter().any(|v| v.same_cluster && (v.i, v.j) == (1, 2)));
    assert!(check.violations.iter().any(|v| !v.same_cluster && (v.i, v.j) == (0, 3)));

    // and yet the optimum is preserved
    let after = centric_kit::kmeans::kmeans_ideal(&transformed, 2).unwrap();
    assert_eq!(clustering_error(&ideal.partition, &after.partition).unwrap(), 0);
}

/// Composing centric transforms on one subset multiplies the factors.
#[test]
fn centric_composition_over_random_draws() {
    use rand::{Rng, SeedableRng};
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(19);
    for _ in 0..200 {
        let n = rng.random_range(2..15);
        let d = rng.random_range(1..4);
        let dataset = Dataset::new(
            (0..n).map(|_| (0..d).map(|_| rng.random::<f64>() * 20.0 - 10.0).collect()).collect(),
        )
        .unwrap();
        let size = rng.random_range(1..=n);
        let subset: Vec<usize> =
            rand::seq::index::sample(&mut rng, n, size).iter().collect();
        let mut sorted = subset.clone();
        sorted.sort_unstable();
        let l1 = rng.random::<f64>().max(0.05);
        let l2 = rng.random::<f64>().max(0.05);
        let stepwise = centric_set_transform(
            &centric_set_transform(&dataset, &sorted, l1).unwrap(),
            &sorted,
            l2,
        )
        .unwrap();
        let direct = centric_set_transform(&dataset, &sorted, l1 * l2).unwrap();
        for (a, b) in stepwise.flat().iter().zip(direct.flat()) {
            assert!((a - b).abs() <= 1e-12 * a.abs().max(1.0));
        }
    }
}
