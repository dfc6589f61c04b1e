//! Acceptance suite: one test per criterion, each printing a pass/fail line.
//!
//! Tolerances and thresholds are pinned here; runtime-limited criteria
//! measure their own wall clock.

use std::time::Instant;

use kakeya_core::charts::{
    bilipschitz_scan, gnomonic_fwd, gnomonic_inv, klein_fwd, klein_inv, klein_segment_length,
    projective_nikodym_to_kakeya, straighten_geodesic, straighten_points, ChartMap,
};
use kakeya_core::conditions::{
    self, bourgain_residual, check_bourgain, check_h1, check_h2, check_straight,
    check_translation_invariant, trace_curve, BourgainMode,
};
use kakeya_core::expr::{PhaseFunction, PhasePoint};
use kakeya_core::linalg;
use kakeya_core::measure::{
    box_count_grid, box_count_points, compression_family, compression_surface_points,
    curved_maximal, kakeya_maximal, nikodym_maximal, rasterize_tubes,
    straight_family_from_y_lattice, y_lattice, GeodesicSource, GridSpec, OccupancyGrid, RasterMode,
    ScalarGrid,
};
use kakeya_core::sample;
use kakeya_core::space_forms::{random_geodesic, SFTangent, SpaceForm};
use kakeya_core::straighten::{
    straighten_phase, symmetric_grid, verify_straightened, Kappa, StraightenParams,
};

fn passline(criterion: &str, detail: String) {
    println!("[PASS] {criterion}: {detail}");
}

fn quadratic_phase() -> PhaseFunction {
    PhaseFunction::parse("x1*y1 + x2*y2 + t*(y1^2 + y2^2)/2", 3, 0.25).unwrap()
}

fn bourgain_phase() -> PhaseFunction {
    PhaseFunction::parse("x1*y1 + x2*y2 + t*y1*y2 + (t^2/2)*y1^2", 3, 0.25).unwrap()
}

fn exp_phase() -> PhaseFunction {
    PhaseFunction::parse("x1*y1 + x2*y2 + (exp(t) - 1)*(y1^2 + y2^2)/2", 3, 0.25).unwrap()
}

fn exp_drift_phase() -> PhaseFunction {
    PhaseFunction::parse(
        "x1*y1 + x2*y2 + (exp(t) - 1)*(y1^2 + y2^2)/2 + (t^2/2)*y1",
        3,
        0.25,
    )
    .unwrap()
}

#[test]
fn criterion_01_geodesic_straightening() {
    let start = Instant::now();
    let grid: Vec<f64> = (0..33).map(|i| -0.5 + i as f64 / 32.0).collect();
    let mut worst_closed = 0.0_f64;
    let mut worst_numeric = 0.0_f64;
    for form in [
        SpaceForm::sphere(2).unwrap(),
        SpaceForm::hyperbolic(2).unwrap(),
    ] {
        let chart = ChartMap::for_form(form);
        let mut rng = sample::rng(2024);
        for _ in 0..100 {
            let geo = random_geodesic(&form, &mut rng, 0.3);
            let closed = straighten_geodesic(&chart, &geo, &grid).unwrap();
            worst_closed = worst_closed.max(closed.residual);
            let pts = form.geodesic_ode_samples(&geo, &grid).unwrap();
            let numeric = straighten_points(&chart, &pts).unwrap();
            worst_numeric = worst_numeric.max(numeric.residual);
        }
    }
    let elapsed = start.elapsed();
    assert!(
        worst_closed < 1e-10,
        "closed-form residual {worst_closed:e}"
    );
    assert!(
        worst_numeric < 1e-7,
        "integrator residual {worst_numeric:e}"
    );
    assert!(elapsed.as_secs_f64() < 5.0, "took {elapsed:?}");
    passline(
        "criterion 1 (geodesic straightening)",
        format!(
            "closed {worst_closed:.2e} < 1e-10, integrator {worst_numeric:.2e} < 1e-7, {:.2}s < 5s",
            elapsed.as_secs_f64()
        ),
    );
}

#[test]
fn criterion_02_chart_roundtrips_and_klein_length() {
    let sphere = SpaceForm::sphere(3).unwrap();
    let hyper = SpaceForm::hyperbolic(3).unwrap();
    let mut rng = sample::rng(7);
    let mut worst_roundtrip = 0.0_f64;
    for _ in 0..10_000 {
        let u = sample::ball_point(&mut rng, 3, 2.0);
        let fwd = gnomonic_fwd(&gnomonic_inv(&sphere, &u)).unwrap();
        worst_roundtrip = worst_roundtrip.max(linalg::dist(&fwd, &u));
        let w = sample::ball_point(&mut rng, 3, 0.9);
        let fwd = klein_fwd(&klein_inv(&hyper, &w).unwrap()).unwrap();
        worst_roundtrip = worst_roundtrip.max(linalg::dist(&fwd, &w));
    }
    assert!(worst_roundtrip < 1e-12, "roundtrip {worst_roundtrip:e}");

    let h2 = SpaceForm::hyperbolic(2).unwrap();
    let mut rng = sample::rng(8);
    let mut worst_len = 0.0_f64;
    for _ in 0..1000 {
        let a = random_geodesic(&h2, &mut rng, 0.8).base;
        let b = random_geodesic(&h2, &mut rng, 0.8).base;
        let d_model = h2.distance(&a, &b).unwrap();
        let quad = klein_segment_length(&klein_fwd(&a).unwrap(), &klein_fwd(&b).unwrap()).unwrap();
        worst_len = worst_len.max((d_model - quad).abs());
    }
    assert!(worst_len < 1e-6, "length mismatch {worst_len:e}");
    passline(
        "criterion 2 (chart roundtrips)",
        format!("roundtrip {worst_roundtrip:.2e} < 1e-12 on 10⁴ points, Klein length {worst_len:.2e} < 1e-6 on 10³ pairs"),
    );
}

#[test]
fn criterion_03_hyperplane_images() {
    let mut lattice = Vec::new();
    for i in 0..9 {
        for j in 0..9 {
            lattice.push(vec![-0.32 + 0.08 * i as f64, -0.32 + 0.08 * j as f64]);
        }
    }
    let mut worst = 0.0_f64;
    for form in [
        SpaceForm::sphere(3).unwrap(),
        SpaceForm::hyperbolic(3).unwrap(),
    ] {
        let chart = ChartMap::for_form(form);
        let mut rng = sample::rng(15);
        for _ in 0..20 {
            let p = random_geodesic(&form, &mut rng, 0.25).base;
            let frame = form.tangent_frame(&p);
            let cloud = form
                .geodesic_submanifold_sample(&p, &frame[..2], &lattice)
                .unwrap();
            let images: Vec<Vec<f64>> = cloud.iter().map(|q| chart.forward(q).unwrap()).collect();
            worst = worst.max(linalg::hyperplane_residual(&images));
        }
    }
    assert!(worst < 1e-9, "hyperplane residual {worst:e}");
    passline(
        "criterion 3 (hyperplane images)",
        format!("residual {worst:.2e} < 1e-9 on both curved models"),
    );
}

#[test]
fn criterion_04_projective_duality() {
    let mut rng = sample::rng(21);
    let mut worst_invol = 0.0_f64;
    let mut worst_coll = 0.0_f64;
    for _ in 0..2000 {
        // involution on {x_d > 0}
        let mut p = sample::ball_point(&mut rng, 3, 1.0);
        p[2] = 0.05 + p[2].abs();
        let twice =
            projective_nikodym_to_kakeya(&projective_nikodym_to_kakeya(&p).unwrap()).unwrap();
        worst_invol = worst_invol.max(linalg::dist(&twice, &p));

        // collinear triples stay collinear
        let base = sample::ball_point(&mut rng, 3, 0.5);
        let dir = sample::ball_point(&mut rng, 3, 0.5);
        let triple: Vec<Vec<f64>> = [0.0, 0.4, 0.9]
            .iter()
            .map(|&s| {
                let mut q = base.clone();
                linalg::axpy(&mut q, s, &dir);
                q[2] += 1.5; // keep x_d comfortably positive
                q
            })
            .collect();
        let images: Vec<Vec<f64>> = triple
            .iter()
            .map(|q| projective_nikodym_to_kakeya(q).unwrap())
            .collect();
        worst_coll = worst_coll.max(linalg::collinearity_residual(&images));
    }
    assert!(worst_invol < 1e-12, "involution {worst_invol:e}");
    assert!(worst_coll < 1e-10, "collinearity {worst_coll:e}");
    passline(
        "criterion 4 (projective duality)",
        format!("involution {worst_invol:.2e} < 1e-12, collinear triples {worst_coll:.2e} < 1e-10"),
    );
}

#[test]
fn criterion_05_condition_checkers() {
    let start = Instant::now();

    // the standard phase passes everything; defect-type residuals < 1e-8
    let quad = quadratic_phase();
    let lattice = conditions::phase_lattice(&quad, 5);
    let y0 = vec![0.0, 0.0];
    let xt = conditions::xt_lattice(&quad, &y0, 5);
    let straight_y = conditions::default_straight_y(&quad);
    let xt_straight = conditions::xt_lattice(&quad, &straight_y, 5);

    let h1 = check_h1(&quad, &lattice, conditions::DEFAULT_TOL_H1).unwrap();
    let h2 = check_h2(&quad, &y0, &xt, conditions::DEFAULT_TOL_H2).unwrap();
    let ti =
        check_translation_invariant(&quad, &lattice, conditions::DEFAULT_TOL_TRANSLATION).unwrap();
    let bg = check_bourgain(
        &quad,
        &lattice,
        conditions::DEFAULT_TOL_BOURGAIN,
        BourgainMode::Frozen,
    )
    .unwrap();
    let st = check_straight(&quad, &xt_straight, conditions::DEFAULT_TOL_STRAIGHT).unwrap();
    assert!(h1.pass && h2.pass && ti.pass && bg.pass && st.pass);
    assert!(ti.max_residual < 1e-8, "translation {:e}", ti.max_residual);
    assert!(bg.max_residual < 1e-8, "bourgain {:e}", bg.max_residual);
    assert!(st.max_residual < 1e-8, "straight {:e}", st.max_residual);

    // the compression example passes H1/translation, fails Bourgain with the
    // reference residual at (t,y) = (0.1, 0), and fails the straight condition
    let bex = bourgain_phase();
    assert!(
        check_h1(&bex, &lattice, conditions::DEFAULT_TOL_H1)
            .unwrap()
            .pass
    );
    assert!(
        check_translation_invariant(&bex, &lattice, conditions::DEFAULT_TOL_TRANSLATION)
            .unwrap()
            .pass
    );
    let at = PhasePoint::new(vec![0.0, 0.0], 0.1, vec![0.0, 0.0]);
    let sample = bourgain_residual(&bex, &at, BourgainMode::Frozen).unwrap();
    assert!(
        (sample.residual - 0.990).abs() <= 0.005,
        "reference residual {}",
        sample.residual
    );
    let bex_xt = conditions::xt_lattice(&bex, &straight_y, 5);
    assert!(
        !check_straight(&bex, &bex_xt, conditions::DEFAULT_TOL_STRAIGHT)
            .unwrap()
            .pass
    );
    assert!(
        !check_bourgain(
            &bex,
            &lattice,
            conditions::DEFAULT_TOL_BOURGAIN,
            BourgainMode::Frozen
        )
        .unwrap()
        .pass
    );

    let elapsed = start.elapsed();
    assert!(elapsed.as_secs_f64() < 1.0, "took {elapsed:?}");
    passline(
        "criterion 5 (condition checkers)",
        format!(
            "standard phase all-pass (defect residuals < 1e-8); compression example residual {:.4} = 0.990 ± 0.005, straight fails; {:.2}s < 1s",
            sample.residual,
            elapsed.as_secs_f64()
        ),
    );
}

#[test]
fn criterion_06_straightening_pipeline() {
    let params = StraightenParams::default();

    // α = log(1+t) to 1e-6; end-to-end residual < 1e-6; h = |y|²/2 to 1e-6
    let result = straighten_phase(&exp_phase(), &params).unwrap();
    let mut worst_alpha = 0.0_f64;
    for (t, a) in result.alpha.ts.iter().zip(&result.alpha.alpha) {
        worst_alpha = worst_alpha.max((a - (1.0 + t).ln()).abs());
    }
    assert!(worst_alpha < 1e-6, "alpha error {worst_alpha:e}");
    assert!(
        result.verify.straighten_residual < 1e-6,
        "residual {:e}",
        result.verify.straighten_residual
    );
    let mut worst_h = 0.0_f64;
    for (y, h) in result.hqf.ys.iter().zip(&result.hqf.h) {
        worst_h = worst_h.max((h - 0.5 * linalg::dot(y, y)).abs());
    }
    assert!(worst_h < 1e-6, "h error {worst_h:e}");

    // the A ≠ 0 corpus case: B(t) = −(t²/2)e₁ within 1e-6
    let drift = straighten_phase(&exp_drift_phase(), &params).unwrap();
    let mut worst_b = 0.0_f64;
    for (k, t) in drift.b.ts.iter().enumerate() {
        worst_b = worst_b.max((drift.b.comps[0][k] + t * t / 2.0).abs());
        worst_b = worst_b.max(drift.b.comps[1][k].abs());
    }
    assert!(worst_b < 1e-6, "B error {worst_b:e}");

    // negative control: the identity κ leaves residual ≳ 0.1·|y|
    let identity = Kappa::identity(2, params.t_max, params.dt);
    let control = verify_straightened(&exp_phase(), &identity, &params).unwrap();
    let y_max = params.y_radius;
    assert!(
        control.straighten_residual >= 0.1 * y_max,
        "negative control residual {} vs {}",
        control.straighten_residual,
        0.1 * y_max
    );
    passline(
        "criterion 6 (straightening pipeline)",
        format!(
            "α err {worst_alpha:.2e}, residual {:.2e}, h err {worst_h:.2e}, B err {worst_b:.2e} (all < 1e-6); identity-κ control {:.3} ≥ {:.3}",
            result.verify.straighten_residual,
            control.straighten_residual,
            0.1 * y_max
        ),
    );
}

#[test]
fn criterion_07_straightened_curves() {
    // post-κ curve traces are collinear to 1e-6 for the Bourgain-class corpus
    let params = StraightenParams::default();
    let grid = symmetric_grid(0.09, 3e-3);
    let mut worst = 0.0_f64;
    for phi in [exp_phase(), exp_drift_phase(), quadratic_phase()] {
        let result = straighten_phase(&phi, &params).unwrap();
        for y in [[0.1, 0.05], [0.15, -0.1], [0.0, 0.12], [-0.08, -0.14]] {
            let base = PhasePoint::new(vec![0.02, -0.03], 0.0, y.to_vec());
            let traced = trace_curve(&phi, &y, &base, &grid).unwrap();
            assert!(traced.completed);
            let straightened: Vec<Vec<f64>> = traced
                .points
                .iter()
                .map(|p| {
                    let (x, t) = result.kappa.inverse(&p[..2], p[2]).unwrap();
                    let mut v = x;
                    v.push(t);
                    v
                })
                .collect();
            worst = worst.max(linalg::collinearity_residual(&straightened));
        }
    }
    assert!(worst < 1e-6, "post-κ collinearity {worst:e}");

    // pre-κ compression curves satisfy x₁ = t·x₂ to 1e-10
    let bex = bourgain_phase();
    let t_grid: Vec<f64> = (0..49).map(|i| -0.24 + 0.01 * i as f64).collect();
    let mut worst_surface = 0.0_f64;
    for y in [[0.1, 0.05], [0.2, -0.12], [-0.15, 0.18]] {
        let base = PhasePoint::new(vec![0.0, -y[1]], 0.0, y.to_vec());
        let traced = trace_curve(&bex, &y, &base, &t_grid).unwrap();
        for p in &traced.points {
            worst_surface = worst_surface.max((p[0] - p[2] * p[1]).abs());
        }
    }
    assert!(worst_surface < 1e-10, "surface identity {worst_surface:e}");
    passline(
        "criterion 7 (straightened curves)",
        format!("post-κ collinearity {worst:.2e} < 1e-6; x₁ = t·x₂ to {worst_surface:.2e} < 1e-10"),
    );
}

#[test]
fn criterion_08_box_counting_calibration() {
    let start = Instant::now();

    // unit segment (diagonal) at n = 1024, k = 4..10: slope 1 ± 0.05
    let spec = GridSpec::new(0.5, 1024, 2).unwrap();
    let mut seg = OccupancyGrid::empty(spec);
    for i in 0..300_000 {
        let s = -0.5 + i as f64 / 299_999.0;
        if let Some(flat) = spec.flat_of_point(&[s, s]) {
            seg.set(flat);
        }
    }
    let seg_report = box_count_grid(&seg, 4, 10).unwrap();
    assert!(
        (seg_report.slope - 1.0).abs() <= 0.05,
        "segment slope {}",
        seg_report.slope
    );

    // filled square: slope 2 ± 0.05
    let square = OccupancyGrid::full(spec);
    let square_report = box_count_grid(&square, 4, 10).unwrap();
    assert!(
        (square_report.slope - 2.0).abs() <= 0.05,
        "square slope {}",
        square_report.slope
    );

    // compression surface {x₁ = t·x₂} in ℝ³ as a point cloud: slope 2 ± 0.1
    let pts = compression_surface_points(0.25, 0.25, 1024);
    let surf_report = box_count_points(&pts, 0.5, 4, 10).unwrap();
    assert!(
        (surf_report.slope - 2.0).abs() <= 0.1,
        "surface slope {}",
        surf_report.slope
    );

    let elapsed = start.elapsed();
    assert!(elapsed.as_secs_f64() < 60.0, "took {elapsed:?}");
    passline(
        "criterion 8 (box counting)",
        format!(
            "segment {:.3}, square {:.3}, surface {:.3}; {:.1}s < 60s",
            seg_report.slope,
            square_report.slope,
            surf_report.slope,
            elapsed.as_secs_f64()
        ),
    );
}

#[test]
fn criterion_09_compression_contrast() {
    let start = Instant::now();
    let delta = 2.0_f64.powi(-6);
    let spec = GridSpec::new(1.0, 512, 3).unwrap();
    // shared y-lattice: 64 × 64 cube of half-width 0.17 (inside the ε₀ ball)
    let ys = y_lattice(2, 64, 0.17);

    let phi = bourgain_phase();
    let t_grid: Vec<f64> = (0..65).map(|i| -0.245 + 0.49 * i as f64 / 64.0).collect();
    let comp = compression_family(&phi, &ys, &t_grid, delta).unwrap();
    let comp_grid = rasterize_tubes(&comp, &spec, RasterMode::Center).unwrap();
    let comp_report = box_count_grid(&comp_grid.grid, 4, 7).unwrap();

    let straight = straight_family_from_y_lattice(&ys, 0.5, 0.2, 11, delta);
    let straight_grid = rasterize_tubes(&straight, &spec, RasterMode::Center).unwrap();
    let straight_report = box_count_grid(&straight_grid.grid, 4, 7).unwrap();

    let elapsed = start.elapsed();
    assert!(
        comp_report.slope <= 2.2,
        "compression slope {}",
        comp_report.slope
    );
    assert!(
        straight_report.slope >= 2.6,
        "straight slope {}",
        straight_report.slope
    );
    assert!(elapsed.as_secs_f64() < 300.0, "took {elapsed:?}");
    passline(
        "criterion 9 (compression contrast)",
        format!(
            "compression {:.3} ≤ 2.2, straight {:.3} ≥ 2.6 (n=512, δ=2⁻⁶, shared 64² y-lattice); {:.0}s < 300s",
            comp_report.slope,
            straight_report.slope,
            elapsed.as_secs_f64()
        ),
    );
}

#[test]
fn criterion_10_maximal_calibration() {
    // (a) f ≡ 1 in d = 2: K_δ and N_δ values are 2 + πδ within 5%
    let delta = 0.1;
    let spec = GridSpec::new(0.75, 512, 2).unwrap();
    let f = ScalarGrid::uniform(spec, 1.0);
    let exact = 2.0 + std::f64::consts::PI * delta;
    let dirs = sample::direction_net(2, 16);
    let kscan = kakeya_maximal(&f, delta, &dirs).unwrap();
    for v in &kscan.values {
        assert!((v - exact).abs() <= 0.05 * exact, "K value {v} vs {exact}");
    }
    let positions = vec![vec![0.0, 0.0], vec![0.12, -0.07], vec![-0.2, 0.15]];
    let nscan = nikodym_maximal(&f, delta, &positions, &GeodesicSource::Euclidean, 16).unwrap();
    for v in &nscan.values {
        assert!((v - exact).abs() <= 0.05 * exact, "N value {v} vs {exact}");
    }

    // (b) space-form mode within 15% of Euclidean on the radius-0.3 ball
    // (f = indicator of the ball, positions inside)
    let fball = ScalarGrid::ball_indicator(spec, 0.3);
    let delta_b = 0.05;
    let mut positions = Vec::new();
    for i in 0..5 {
        for j in 0..5 {
            let p = vec![-0.12 + 0.06 * i as f64, -0.12 + 0.06 * j as f64];
            positions.push(p);
        }
    }
    let euclid =
        nikodym_maximal(&fball, delta_b, &positions, &GeodesicSource::Euclidean, 32).unwrap();
    let mut worst_rel = 0.0_f64;
    for form in [
        SpaceForm::sphere(2).unwrap(),
        SpaceForm::hyperbolic(2).unwrap(),
    ] {
        let curved = nikodym_maximal(
            &fball,
            delta_b,
            &positions,
            &GeodesicSource::SpaceForm(form),
            32,
        )
        .unwrap();
        for (e, c) in euclid.values.iter().zip(&curved.values) {
            worst_rel = worst_rel.max((e - c).abs() / e);
        }
    }
    assert!(worst_rel <= 0.15, "space-form deviation {worst_rel}");

    // (c) curved 𝒦_δ matches K_δ under the direction reparametrization
    // ω(y) = (−∇h(y), 1)/|·| within 10% (ε₀ = 0.5 so tube spans match)
    let phi = PhaseFunction::parse("x1*y1 + x2*y2 + t*(y1^2 + y2^2)/2", 3, 0.5).unwrap();
    let spec3 = GridSpec::new(0.55, 64, 3).unwrap();
    let f3 = ScalarGrid::uniform(spec3, 1.0);
    let delta3 = 1.0 / 16.0;
    let y_net = vec![vec![0.1, 0.05], vec![-0.12, 0.08]];
    let curved = curved_maximal(&phi, &f3, delta3, &y_net).unwrap();
    let matched_dirs: Vec<Vec<f64>> = y_net
        .iter()
        .map(|y| linalg::normalize(&[-y[0], -y[1], 1.0]))
        .collect();
    let kakeya3 = kakeya_maximal(&f3, delta3, &matched_dirs).unwrap();
    let mut worst_curved = 0.0_f64;
    for (c, k) in curved.values.iter().zip(&kakeya3.values) {
        worst_curved = worst_curved.max((c - k).abs() / k);
    }
    assert!(worst_curved <= 0.10, "curved deviation {worst_curved}");

    passline(
        "criterion 10 (maximal calibration)",
        format!(
            "K/N within 5% of 2+πδ; space-form within {:.1}% ≤ 15%; curved within {:.1}% ≤ 10%",
            100.0 * worst_rel,
            100.0 * worst_curved
        ),
    );
}

#[test]
fn criterion_11_determinism() {
    // identical seeds and configs give byte-identical artifacts
    let params = StraightenParams::default();
    let a = serde_json::to_string(&straighten_phase(&exp_phase(), &params).unwrap()).unwrap();
    let b = serde_json::to_string(&straighten_phase(&exp_phase(), &params).unwrap()).unwrap();
    assert_eq!(a, b, "straightening JSON must be byte-identical");

    let spec = GridSpec::new(0.75, 128, 2).unwrap();
    let f = ScalarGrid::uniform(spec, 1.0);
    let dirs = sample::direction_net(2, 12);
    let s1 = kakeya_maximal(&f, 0.1, &dirs).unwrap().to_csv();
    let s2 = kakeya_maximal(&f, 0.1, &dirs).unwrap().to_csv();
    assert_eq!(s1, s2, "scan CSV must be byte-identical");

    let ys = y_lattice(2, 8, 0.17);
    let fam1 = straight_family_from_y_lattice(&ys, 0.5, 0.2, 11, 0.03);
    let fam2 = straight_family_from_y_lattice(&ys, 0.5, 0.2, 11, 0.03);
    let gspec = GridSpec::new(0.75, 128, 3).unwrap();
    let g1 = rasterize_tubes(&fam1, &gspec, RasterMode::Center)
        .unwrap()
        .grid
        .to_json();
    let g2 = rasterize_tubes(&fam2, &gspec, RasterMode::Center)
        .unwrap()
        .grid
        .to_json();
    assert_eq!(g1, g2, "grid JSON must be byte-identical");

    // bi-Lipschitz scans and geodesic sampling share the seeded stream
    let form = SpaceForm::sphere(2).unwrap();
    let r1 = serde_json::to_string(&bilipschitz_scan(&form, 0.3, 500, 5).unwrap()).unwrap();
    let r2 = serde_json::to_string(&bilipschitz_scan(&form, 0.3, 500, 5).unwrap()).unwrap();
    assert_eq!(r1, r2);

    passline(
        "criterion 11 (determinism)",
        "straightening JSON, scan CSV, grid JSON, and ratio scans byte-identical across reruns"
            .to_string(),
    );
}

// criterion 10 uses a tangent helper indirectly through nikodym scans; keep
// the import exercised explicitly so dimension mismatches fail loudly here
#[test]
fn space_form_tangents_reach_grid_dimension() {
    let form = SpaceForm::sphere(2).unwrap();
    let p = form.chart_center();
    let frame = form.tangent_frame(&p);
    assert_eq!(frame.len(), 2);
    let v = SFTangent {
        base: p.clone(),
        vector: frame[0].vector.clone(),
    };
    assert!(form.exp_map(&p, &v).is_ok());
}
