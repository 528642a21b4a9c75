mod common;

use gcode_forensics::{emit_program, extract_skeleton, parse_program, Command, GcodeProgram, Instruction};
use proptest::prelude::*;

const CUBE: &str = include_str!("fixtures/cube.gcode");

#[test]
fn cube_fixture_layer_count_matches_scan() {
    let program = parse_program(CUBE).unwrap();
    let skeleton = extract_skeleton(&program);
    assert_eq!(skeleton.len(), common::count_layers_by_scan(CUBE));
    assert_eq!(skeleton.len(), 6);
    assert!(skeleton.is_monotonic());
    assert!(skeleton.layers.iter().all(|l| !l.points.is_empty()));
}

#[test]
fn cube_fixture_round_trips_moves() {
    let program = parse_program(CUBE).unwrap();
    let emitted = emit_program(&program);
    assert!(!emitted.contains('\r'));
    let again = parse_program(&emitted).unwrap();
    assert_eq!(again.instructions, program.instructions);
    assert_eq!(emit_program(&again), emitted);
}

#[test]
fn canonical_lines_are_byte_identical() {
    let text = "G1 X30.651 Y15.1125 Z4.5 E1.63\nG0 X1.07 Y10.5 Z3\nG1 X-0.5 Y249.999 E0.00001 F3600\n";
    assert_eq!(emit_program(&parse_program(text).unwrap()), text);
}

#[test]
fn cube_fixture_retractions_are_opaque() {
    let program = parse_program(CUBE).unwrap();
    let retracts = program
        .instructions
        .iter()
        .filter(|i| matches!(&i.command, Command::Other(t) if t.starts_with("G1 F2700 E")))
        .count();
    assert_eq!(retracts, 13);
}

fn coord() -> impl Strategy<Value = Option<f64>> {
    prop::option::of((-20_000i64..270_000).prop_map(|v| v as f64 / 1e3))
}

fn instruction() -> impl Strategy<Value = Instruction> {
    prop_oneof![
        4 => (any::<bool>(), coord(), coord(), coord(), prop::option::of(0u32..100_000), prop::option::of(1u32..10_000))
            .prop_filter("positional", |(_, x, y, z, _, _)| x.is_some() || y.is_some() || z.is_some())
            .prop_map(|(g1, x, y, z, e, f)| {
                let cmd = if g1 { Command::G1 } else { Command::G0 };
                Instruction::movement(cmd, x, y, z, e.map(|v| f64::from(v) / 1e4), f.map(f64::from))
            }),
        1 => prop_oneof![
            Just("M104 S200".to_string()),
            Just(";LAYER:3".to_string()),
            Just("G92 E0".to_string()),
            Just(String::new()),
        ]
        .prop_map(Instruction::other),
    ]
}

fn program() -> impl Strategy<Value = GcodeProgram> {
    prop::collection::vec(instruction(), 0..60).prop_map(GcodeProgram::new)
}

proptest! {
    #[test]
    fn emit_parse_emit_is_fixed_point(p in program()) {
        let once = emit_program(&p);
        let parsed = parse_program(&once).unwrap();
        prop_assert_eq!(&parsed.instructions, &p.instructions);
        prop_assert_eq!(emit_program(&parsed), once);
    }

    #[test]
    fn skeleton_point_count_matches_print_moves(p in program()) {
        let s = extract_skeleton(&p);
        let g1 = p.instructions.iter().filter(|i| i.command == Command::G1).count();
        prop_assert_eq!(s.point_count(), g1);
        prop_assert!(s.layers.iter().all(|l| !l.points.is_empty()));
    }

    #[test]
    fn skeleton_ignores_non_movement_lines(p in program(), seed in any::<u64>()) {
        let mut noisy = Vec::new();
        for (i, inst) in p.instructions.iter().enumerate() {
            if (seed >> (i % 64)) & 1 == 1 {
                noisy.push(Instruction::other("M106 S255 ; fan"));
            }
            noisy.push(inst.clone());
        }
        prop_assert_eq!(extract_skeleton(&GcodeProgram::new(noisy)), extract_skeleton(&p));
    }
}
