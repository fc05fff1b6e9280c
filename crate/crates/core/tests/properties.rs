//! Property tests for the invariants that tie the modules together.

use std::f64::consts::FRAC_1_SQRT_2;

use num_traits::Zero;
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use magicstate::analysis;
use magicstate::bloch::{classify_region, h_directions, h_fidelity, twirl_h, BlochVector, OctahedralRotation};
use magicstate::codes::{self, pair_weight_table, steane_s, weight_distribution};
use magicstate::distill::{self, distillation_map};
use magicstate::oracle::{self, measure_postselect, DenseState, PauliProduct};

fn ball() -> impl Strategy<Value = BlochVector> {
    (-1.0f64..1.0, -1.0f64..1.0, -1.0f64..1.0)
        .prop_filter("inside the ball", |(x, y, z)| x * x + y * y + z * z <= 1.0)
        .prop_map(|(x, y, z)| BlochVector::new(x, y, z))
}

fn valid_s() -> impl Strategy<Value = codes::CodewordSet> {
    (any::<u64>(), 2usize..=10).prop_map(|(seed, n)| codes::random_valid_s(&mut ChaCha8Rng::seed_from_u64(seed), n, 3))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn fidelity_is_rotation_invariant(v in ball()) {
        let f = h_fidelity(&v);
        for r in OctahedralRotation::all() {
            prop_assert!((h_fidelity(&r.apply(&v)) - f).abs() < 1e-12);
        }
    }

    #[test]
    fn fidelity_squared_is_best_edge_overlap(v in ball()) {
        let best = h_directions().iter().map(|h| v.dot(h)).fold(f64::MIN, f64::max);
        prop_assert!((h_fidelity(&v).powi(2) - (1.0 + best) / 2.0).abs() < 1e-12);
    }

    #[test]
    fn twirl_is_idempotent_and_contracting(v in ball()) {
        let t = twirl_h(&v);
        let tt = twirl_h(&t);
        prop_assert!((t.x - tt.x).abs() < 1e-14 && (t.y - tt.y).abs() < 1e-14 && (t.z - tt.z).abs() < 1e-14);
        prop_assert!(t.norm() <= v.norm() + 1e-15);
    }

    #[test]
    fn simulable_excludes_distillable(v in ball()) {
        let r = classify_region(&v).unwrap();
        if r.simulable {
            prop_assert!(r.flags().is_empty());
        }
    }

    #[test]
    fn pair_table_sums_and_symmetries(s in valid_s()) {
        let t = pair_weight_table(&s).unwrap();
        let size = s.len() as u64;
        prop_assert_eq!(t.total(), size * size);
        let wd = weight_distribution(&s);
        for (w, c) in t.marginal_a() {
            prop_assert_eq!(c, wd.count(w) * size);
        }
        for ((a, b, c), n) in t.entries() {
            prop_assert_eq!(t.count(b, a, c), n);
            prop_assert_eq!(t.count(a, c, b), n);
        }
    }

    #[test]
    fn half_is_always_a_fixed_point(s in valid_s()) {
        prop_assert!(analysis::appendix_a_identity(&s).unwrap().is_zero());
        let r = analysis::appendix_a_instability(&s).unwrap();
        prop_assert!(r.consistent());
        let m = distillation_map(&s).unwrap();
        let fps = analysis::fixed_points(&m);
        prop_assert!(fps.iter().any(|f| (f.x_star - 0.5).abs() < 1e-10), "{:?}", fps);
        let h = m.h_map();
        for f in &fps {
            prop_assert!((h.eval_f64(f.x_star) - f.x_star).abs() < 1e-12);
        }
        // no sign change of f(x) - x is left between consecutive roots
        let g = |x: f64| h.eval_f64(x) - x;
        for w in fps.windows(2) {
            let grid = distill::linear_grid(w[0].x_star, w[1].x_star, 200);
            let inner = &grid[1..grid.len() - 1];
            let signs: Vec<bool> = inner.iter().map(|&x| g(x)).filter(|v| v.abs() > 1e-14).map(|v| v > 0.0).collect();
            prop_assert!(signs.windows(2).all(|p| p[0] == p[1]));
        }
    }

    #[test]
    fn overlaps_obey_cauchy_schwarz(v in ball()) {
        let ov = distill::overlap_general(&steane_s(), &v.to_density()).unwrap();
        prop_assert!(ov.a01.norm_sqr() <= ov.a00 * ov.a11 + 1e-15);
        prop_assert!(ov.accept() > 0.0 && ov.accept() <= 1.0 + 1e-15);
    }

    #[test]
    fn acceptance_in_unit_interval(x in 0.0f64..FRAC_1_SQRT_2) {
        for s in [codes::steane_s(), codes::golay_s()] {
            let pt = distill::evaluate_map(&distillation_map(&s).unwrap(), x).unwrap();
            prop_assert!(pt.p_accept > 0.0 && pt.p_accept <= 1.0);
        }
    }

    #[test]
    fn conjugation_preserves_commutation(seed in any::<u64>()) {
        use rand::Rng;
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let n = 4;
        let p = PauliProduct::from_masks(n, rng.random_range(0..16), rng.random_range(0..16), 0).unwrap();
        let q = PauliProduct::from_masks(n, rng.random_range(0..16), rng.random_range(0..16), 0).unwrap();
        let circuit = oracle::random_clifford(n, &mut rng);
        let (mut pc, mut qc) = (p, q);
        for g in &circuit {
            pc = pc.conjugate(g);
            qc = qc.conjugate(g);
        }
        prop_assert_eq!(p.commutes(&q), pc.commutes(&qc));
        prop_assert!(pc.is_hermitian());
    }

    #[test]
    fn complementary_outcomes_sum_to_one(seed in any::<u64>()) {
        use rand::Rng;
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let psi = oracle::random_state(3, &mut rng);
        let p = PauliProduct::from_masks(3, rng.random_range(0..8), rng.random_range(1..8), 0).unwrap();
        let prob = |o: i8| measure_postselect(&psi, &p, o).map(|r| r.0).unwrap_or(0.0);
        prop_assert!((prob(1) + prob(-1) - 1.0).abs() < 1e-12);
    }

    #[test]
    fn cliffords_preserve_norm(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let psi: DenseState = oracle::random_state(4, &mut rng);
        let out = oracle::apply_circuit(&psi, &oracle::random_clifford(4, &mut rng)).unwrap();
        prop_assert!((out.norm_sqr() - 1.0).abs() < 1e-14);
    }
}
