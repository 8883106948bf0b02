use super::*;
use crate::catalog;
use crate::metric::ParamCurve;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

#[test]
fn exponent_record_hand_values() {
    // α = 0.5, C = 1: m = ⌊2·(2·1)^2⌋ + 1 = 9, C_g = 4,
    // q♯ = ln 9 / ln 7, q* = (1 + q♯)/2, cap = 1.5,
    // α* = 1 − q̃/2, p* = (2 − α*)/(1 − α*)
    let rec = compute_exponents(0.5, 1.0, 0.1, 1.0, 2, None).unwrap();
    assert_eq!(rec.m, 9);
    assert_eq!(rec.c_g, 4.0);
    let q_sharp = 9f64.ln() / 7f64.ln();
    assert!((rec.q_sharp - q_sharp).abs() < 1e-9, "q_sharp {}", rec.q_sharp);
    assert!((rec.q_star - 0.5 * (1.0 + q_sharp)).abs() < 1e-12);
    assert!((rec.q_tilde - rec.q_star).abs() < 1e-12, "cap 1.5 not binding");
    assert!((rec.alpha_star - 0.4677).abs() < 1e-4, "alpha_star {}", rec.alpha_star);
    assert!((rec.p_star - 2.879).abs() < 1e-3, "p_star {}", rec.p_star);
}

#[test]
fn depth_matches_brute_force_oracle() {
    // independent oracle: scan k upward until 2 e^{2C} s (1 − 1/m)^k ≤ ε
    for (alpha, c, eps, s) in
        [(0.5, 1.0, 1.0, 1.0), (0.5, 1.0, 0.1, 1.0), (0.3, 2.0, 0.05, 0.7), (0.7, 1.5, 0.4, 0.2)]
    {
        let rec = compute_exponents(alpha, c, eps, s, 2, None).unwrap();
        let m = rec.m as f64;
        let mut k_oracle = 1u64;
        while 2.0 * (2.0 * c).exp() * s * (1.0 - 1.0 / m).powi(k_oracle as i32) > eps {
            k_oracle += 1;
            assert!(k_oracle < 1_000_000);
        }
        assert_eq!(rec.k, k_oracle, "alpha {alpha} c {c} eps {eps} s {s}");
    }
    // frozen value for the ε = ‖x−y‖ case: 2e²(8/9)^k ≤ 1 first holds at k = 23
    let rec = compute_exponents(0.5, 1.0, 1.0, 1.0, 2, None).unwrap();
    assert_eq!(rec.k, 23);
}

#[test]
fn exponent_invariants_random_sweep() {
    let mut rng = ChaCha8Rng::seed_from_u64(31);
    for _ in 0..300 {
        let alpha: f64 = rng.gen_range(0.05..0.95);
        let c: f64 = rng.gen_range(1.0..10.0);
        let n = if rng.gen_bool(0.5) { 2 } else { 3 };
        let rec = match compute_exponents(alpha, c, 0.2, 1.0, n, None) {
            Ok(r) => r,
            Err(_) => continue, // arity overflow for extreme (α, C)
        };
        assert!(rec.m >= 3);
        assert!(rec.q_sharp > 1.0);
        assert!(rec.q_star > 1.0);
        assert!(rec.q_tilde > 1.0 && rec.q_tilde <= rec.q_star + 1e-15);
        assert!(rec.alpha_star > 0.0 && rec.alpha_star < alpha);
        let p = (n as f64 - alpha) / (1.0 - alpha);
        assert!(rec.p_star > n as f64 && rec.p_star < p, "p* {} p {}", rec.p_star, p);
        assert!(rec.delta > 0.0 || rec.delta == 0.0); // may underflow, never negative
    }
}

#[test]
fn delta_uses_supplied_distance_when_smaller() {
    let rec_upper = compute_exponents(0.5, 1.0, 0.5, 1.0, 2, None).unwrap();
    let rec_tight = compute_exponents(0.5, 1.0, 0.5, 1.0, 2, Some(1e-30)).unwrap();
    assert!(rec_tight.delta <= rec_upper.delta);
    assert!((rec_tight.delta - 1e-30).abs() < 1e-42);
}

fn hard_pair_decomposition() -> (crate::geometry::PlanarDomain, CantorDecomposition) {
    let sq = catalog::square();
    let x = crate::geometry::Point::new(0.3, 0.04);
    let y = crate::geometry::Point::new(0.62, 0.05);
    let params = DecomposeParams::new(1.0 / 64.0);
    let dec = cantor_decompose(&sq, 0.5, 4.0, x, y, 0.1 * x.dist_euclid(y), &params).unwrap();
    (sq, dec)
}

#[test]
fn square_hard_pair_decomposition_verifies() {
    let (sq, dec) = hard_pair_decomposition();
    let eps = 0.1 * dec.record.xy_dist;
    let rep = verify_decomposition(&sq, &dec, None, eps);
    assert!(rep.e_measure_formula_ok, "removed measure mismatch: {}", rep.e_measure);
    assert_eq!(rep.oscillation_violations, 0, "max osc {}", rep.max_oscillation);
    assert!(rep.max_oscillation <= rep.oscillation_bound + 1e-9);
    assert_eq!(rep.porosity_violations, 0, "max porosity {}", rep.porosity_max_ratio);
    assert!(rep.chain_margin <= 1.0 + 1e-9, "chain margin {}", rep.chain_margin);
    assert!(rep.removed_small_at_record_k);
    // τ table: finite constants across the grid, consistent at the α endpoint
    for e in &rep.tau_table {
        assert!(e.c_measured.is_finite() && e.c_measured > 0.0);
    }
    let at_alpha = rep.tau_table.last().unwrap();
    assert!((at_alpha.tau - dec.record.alpha).abs() < 1e-12);
    let total = crate::metric::weighted_length(&dec.curve, 0.5, &sq).unwrap();
    assert!(at_alpha.integral <= total * (1.0 + 1e-6));
    assert!(rep.e_integral <= total * (1.0 + 1e-6));
    // ball regularity measured and finite
    assert!(rep.ball_regularity_max.is_finite());
}

#[test]
fn decomposition_is_deterministic() {
    let (_, dec1) = hard_pair_decomposition();
    let (_, dec2) = hard_pair_decomposition();
    let k1: Vec<(u32, u64)> = dec1.selection.selected.iter().map(|s| (s.level, s.index)).collect();
    let k2: Vec<(u32, u64)> = dec2.selection.selected.iter().map(|s| (s.level, s.index)).collect();
    assert_eq!(k1, k2);
}

#[test]
fn decomposition_requires_hard_stratum() {
    let sq = catalog::square();
    let params = DecomposeParams::new(1.0 / 32.0);
    let r = cantor_decompose(
        &sq,
        0.5,
        2.0,
        crate::geometry::Point::new(0.5, 0.5),
        crate::geometry::Point::new(0.55, 0.5),
        0.01,
        &params,
    );
    assert!(matches!(r, Err(crate::Error::PreconditionNotMet(_))));
}

#[test]
fn tau_formula_hand_values() {
    // τ = q(α−1) + 1: q = 1.05 at α = 0.5 gives 0.475; the constant-weight
    // cap q = 1.5 gives 0.25
    assert!((1.05f64 * (0.5 - 1.0) + 1.0 - 0.475).abs() < 1e-12);
    assert!((1.5f64 * (0.5 - 1.0) + 1.0 - 0.25).abs() < 1e-12);
}

#[test]
fn constant_weight_corridor_caps_q() {
    // thin box: a mid-height segment has constant clearance
    let corridor = crate::geometry::PlanarDomain::new(
        "corridor",
        vec![
            crate::geometry::Point::new(0.0, 0.0),
            crate::geometry::Point::new(4.0, 0.0),
            crate::geometry::Point::new(4.0, 0.2),
            crate::geometry::Point::new(0.0, 0.2),
        ],
        vec![],
    )
    .unwrap();
    let curve = ParamCurve::new(
        &corridor,
        vec![crate::geometry::Point::new(0.3, 0.1), crate::geometry::Point::new(3.7, 0.1)],
        crate::geometry::Norm::Euclidean,
    )
    .unwrap();
    let rep = self_improve_tau(&corridor, 0.5, &[curve], 20.0).unwrap();
    let row = &rep.per_curve[0];
    assert!((row.q_used - 1.5).abs() < 1e-12, "q_used {}", row.q_used);
    assert!((row.tau - 0.25).abs() < 1e-12, "tau {}", row.tau);
    assert!((row.c_tilde - 1.0).abs() < 1e-6, "c_tilde {}", row.c_tilde);
    assert!(row.margin <= 1.0, "margin {}", row.margin);
}

#[test]
fn boundary_hugging_curve_fails_strong_check() {
    let sq = catalog::square();
    let curve = ParamCurve::new(
        &sq,
        vec![crate::geometry::Point::new(0.2, 0.002), crate::geometry::Point::new(0.8, 0.002)],
        crate::geometry::Norm::Euclidean,
    )
    .unwrap();
    match self_improve_tau(&sq, 0.5, &[curve], 3.0) {
        Err(crate::Error::NotStronglySubhyperbolic { measured_c, .. }) => {
            assert!(measured_c > 3.0);
        }
        other => panic!("expected NotStronglySubhyperbolic, got {other:?}"),
    }
}

#[test]
fn near_geodesic_family_improves_exponent() {
    let sq = catalog::square();
    let gp = crate::metric::GeoParams::new(0.5, 1.0 / 64.0);
    let mut curves = Vec::new();
    for (x, y) in [
        (crate::geometry::Point::new(0.2, 0.05), crate::geometry::Point::new(0.7, 0.05)),
        (crate::geometry::Point::new(0.1, 0.3), crate::geometry::Point::new(0.45, 0.6)),
    ] {
        curves.push(crate::metric::near_geodesic(&sq, 0.5, x, y, 1e-3, &gp).unwrap());
    }
    // generous constant: every sub-arc of a near-geodesic on the square obeys
    // the weighted bound with a moderate constant
    let rep = self_improve_tau(&sq, 0.5, &curves, 8.0).unwrap();
    assert!(rep.tau > 0.0 && rep.tau < 0.5, "tau {}", rep.tau);
    for row in &rep.per_curve {
        assert!(row.margin <= 1.0 + 1e-9, "margin {}", row.margin);
        assert!(row.q_used > 1.0);
    }
}
