mod common;

use common::{optimal_partition, partition_cost, step_series};
use gcode_forensics::postprocess::{DEFAULT_PELT_MIN_SEGMENT, DEFAULT_PELT_PENALTY};
use gcode_forensics::{
    build_gcode, compare_programs, compute_extrusion, detect_z_changepoints, emit_program, extract_skeleton, gen_shape, inject_noise,
    parse_program, CompareOptions, ExtrusionMode, MoveClass, PrinterProfile, ShapeKind, ShapeSpec, TrajectoryPrediction,
};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};

proptest! {
    #![proptest_config(ProptestConfig::with_cases(300))]

    #[test]
    fn pelt_is_optimal(series in prop::collection::vec(-1.0..1.0f64, 0..40), penalty in 0.0..2.0f64, min_seg in 1usize..5) {
        let cps = detect_z_changepoints(&series, penalty, min_seg).unwrap();
        let (best, _) = optimal_partition(&series, penalty, min_seg);
        let got = partition_cost(&series, &cps, penalty);
        prop_assert!((got - best).abs() <= 1e-9 * (1.0 + best.abs()), "{} vs {}", got, best);
        let mut bounds = vec![0];
        bounds.extend(&cps);
        bounds.push(series.len());
        if !series.is_empty() {
            prop_assert!(bounds.windows(2).all(|w| w[1] - w[0] >= min_seg.min(series.len())));
        }
    }

    #[test]
    fn extrusion_is_additive(lengths in prop::collection::vec(0.0..30.0f64, 1..50)) {
        let p = PrinterProfile::default();
        let total: f64 = lengths.iter().map(|&l| compute_extrusion(&p, l).unwrap()).sum();
        let whole = compute_extrusion(&p, lengths.iter().sum()).unwrap();
        prop_assert!((total - whole).abs() <= 1e-9);
    }
}

#[test]
fn noisy_steps_are_localized() {
    let clean = step_series(60, &[20, 40], 0.3, 0.3);
    let noise = Normal::new(0.0, 0.03).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for _ in 0..20 {
        let series: Vec<f64> = clean.iter().map(|z| z + noise.sample(&mut rng)).collect();
        let cps = detect_z_changepoints(&series, DEFAULT_PELT_PENALTY, DEFAULT_PELT_MIN_SEGMENT).unwrap();
        assert_eq!(cps.len(), 2, "{cps:?}");
        assert!(cps[0].abs_diff(20) <= 1 && cps[1].abs_diff(40) <= 1, "{cps:?}");
    }
}

fn polyline(rng: &mut ChaCha8Rng, n: usize) -> Vec<TrajectoryPrediction> {
    let step = Normal::new(0.0, 4.0).unwrap();
    let (mut x, mut y) = (125.0, 125.0);
    (0..n)
        .map(|_| {
            x += step.sample(rng);
            y += step.sample(rng);
            TrajectoryPrediction {
                command_class: MoveClass::G1,
                x,
                y,
                z_raw: 0.3,
            }
        })
        .collect()
}

#[test]
fn extrusion_totals_match_path_length() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for mode in [ExtrusionMode::Absolute, ExtrusionMode::Relative] {
        let profile = PrinterProfile {
            extrusion_mode: mode,
            ..Default::default()
        };
        for n in [2, 10, 57] {
            let preds = polyline(&mut rng, n);
            let prog = build_gcode(&preds, &profile, DEFAULT_PELT_PENALTY, DEFAULT_PELT_MIN_SEGMENT).unwrap();
            let pts: Vec<_> = prog.instructions.iter().map(|i| (i.x.unwrap(), i.y.unwrap())).collect();
            let length: f64 = pts
                .windows(2)
                .map(|w| ((w[1].0 - w[0].0).powi(2) + (w[1].1 - w[0].1).powi(2)).sqrt())
                .sum();
            let es: Vec<f64> = prog.instructions.iter().filter_map(|i| i.e).collect();
            let total = match mode {
                ExtrusionMode::Absolute => *es.last().unwrap(),
                ExtrusionMode::Relative => es.iter().sum(),
            };
            assert!((total - compute_extrusion(&profile, length).unwrap()).abs() < 1e-9);
        }
    }
}

#[test]
fn clean_predictions_rebuild_the_object() {
    let spec = ShapeSpec {
        kind: ShapeKind::StarPrism { points: 5 },
        num_layers: 6,
        ..Default::default()
    };
    let gt = gen_shape(&spec, 5).unwrap();
    let preds = inject_noise(&gt, 0.0, 0.0, 1).unwrap();
    let rebuilt = build_gcode(&preds, &PrinterProfile::default(), DEFAULT_PELT_PENALTY, DEFAULT_PELT_MIN_SEGMENT).unwrap();
    let a = extract_skeleton(&gt);
    let b = extract_skeleton(&parse_program(&emit_program(&rebuilt)).unwrap());
    assert!(a.max_deviation(&b).unwrap() <= 1e-9);
}

#[test]
fn z_noise_keeps_layer_assignment() {
    let spec = ShapeSpec {
        kind: ShapeKind::AsymmetricL,
        num_layers: 10,
        ..Default::default()
    };
    let gt = gen_shape(&spec, 2).unwrap();
    let clean = inject_noise(&gt, 0.0, 0.0, 0).unwrap();
    let noisy = inject_noise(&gt, 0.0, 0.03, 9).unwrap();
    let rebuilt = build_gcode(&noisy, &PrinterProfile::default(), DEFAULT_PELT_PENALTY, DEFAULT_PELT_MIN_SEGMENT).unwrap();
    let hits = clean
        .iter()
        .zip(&rebuilt.instructions)
        .filter(|(c, r)| (c.z_raw - r.z.unwrap()).abs() < 1e-9)
        .count();
    assert!(hits as f64 >= 0.99 * clean.len() as f64, "{hits}/{}", clean.len());
    let report = compare_programs(&gt, &rebuilt, &CompareOptions::default()).unwrap();
    assert_eq!(report.gt_layer_count, report.cand_layer_count);
}
