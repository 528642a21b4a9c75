use std::hint::black_box;

use criterion::{criterion_group, criterion_main, Criterion};
use gcode_forensics::{
    compare, convex_hull, detect_z_changepoints, extract_skeleton, gen_shape, rotate_gcode, subsequence_dtw, Infill, ShapeKind, ShapeSpec,
};

fn shape(kind: ShapeKind, layers: usize) -> ShapeSpec {
    ShapeSpec {
        kind,
        num_layers: layers,
        footprint_size: 20.0,
        infill: Infill::Concentric,
        points_per_layer: 40,
    }
}

fn bench_compare(c: &mut Criterion) {
    let src = gen_shape(&shape(ShapeKind::AsymmetricL, 10), 1).unwrap();
    let rotated = rotate_gcode(&src, 35.0).unwrap();
    let (gt, cand) = (extract_skeleton(&src), extract_skeleton(&rotated));
    c.bench_function("compare_asymmetric_l_10_layers", |b| {
        b.iter(|| compare(black_box(&gt), black_box(&cand)).unwrap())
    });
}

fn bench_dtw(c: &mut Criterion) {
    let skel = extract_skeleton(&gen_shape(&shape(ShapeKind::StarPrism { points: 5 }, 1), 2).unwrap());
    let pts = &skel.layers[0].points;
    let query = &pts[pts.len() / 4..];
    c.bench_function("subsequence_dtw_star_layer", |b| {
        b.iter(|| subsequence_dtw(black_box(pts), black_box(query)))
    });
}

fn bench_hull(c: &mut Criterion) {
    let skel = extract_skeleton(&gen_shape(&shape(ShapeKind::PolygonPrism { sides: 8 }, 20), 3).unwrap());
    let pts: Vec<_> = skel.all_points().collect();
    c.bench_function("convex_hull_octagon_prism", |b| b.iter(|| convex_hull(black_box(&pts)).unwrap()));
}

fn bench_pelt(c: &mut Criterion) {
    let series: Vec<f64> = (0..5000)
        .map(|i| 0.3 * (1 + i / 250) as f64 + 0.02 * ((i * 7919) % 13) as f64 / 13.0)
        .collect();
    c.bench_function("pelt_5000", |b| {
        b.iter(|| detect_z_changepoints(black_box(&series), 0.05, 3).unwrap())
    });
}

criterion_group!(benches, bench_compare, bench_dtw, bench_hull, bench_pelt);
criterion_main!(benches);
