use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use meshlift::cli::{EXIT_ARGUMENT, EXIT_DATA, EXIT_OK};
use meshlift::volume::{read_volume, SUBBAND_OFFSET};

fn meshlift(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_meshlift"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn code(args: &[&str]) -> i32 {
    meshlift(args).status.code().expect("exit code")
}

fn path(dir: &Path, name: &str) -> String {
    dir.join(name).to_string_lossy().into_owned()
}

fn phantom(dir: &Path, name: &str, extra: &[&str]) -> String {
    let out = path(dir, name);
    let mut args = vec![
        "phantom", "--width", "48", "--height", "40", "--output", &out,
    ];
    args.extend_from_slice(extra);
    assert_eq!(code(&args), EXIT_OK);
    out
}

#[test]
fn phantom_is_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    let a = phantom(dir.path(), "a.raw", &["--steps", "4", "--seed", "9"]);
    let b = phantom(dir.path(), "b.raw", &["--steps", "4", "--seed", "9"]);
    assert_eq!(fs::read(&a).unwrap(), fs::read(&b).unwrap());
    assert_eq!(
        fs::read(dir.path().join("a.json")).unwrap(),
        fs::read(dir.path().join("b.json")).unwrap()
    );
}

#[test]
fn equal_scales_give_identical_slices() {
    let dir = tempfile::tempdir().unwrap();
    let p = phantom(
        dir.path(),
        "p.raw",
        &["--steps", "2", "--scales", "1.0,1.0", "--seed", "7"],
    );
    let (seq, header) = read_volume(&p).unwrap();
    assert_eq!((header.width, header.height, header.slices), (48, 40, 2));
    assert_eq!(seq.slices()[0], seq.slices()[1]);
}

#[test]
fn odd_steps_accepted_but_not_transformed() {
    let dir = tempfile::tempdir().unwrap();
    let p = phantom(dir.path(), "odd.raw", &["--steps", "3"]);
    let out = meshlift(&[
        "transform",
        "--input",
        &p,
        "--output",
        &path(dir.path(), "t"),
    ]);
    assert_eq!(out.status.code(), Some(EXIT_ARGUMENT));
    assert!(String::from_utf8_lossy(&out.stderr).contains("even number of slices"));
}

#[test]
fn bad_arguments_exit_2() {
    let dir = tempfile::tempdir().unwrap();
    let out = path(dir.path(), "x.raw");
    assert_eq!(
        code(&["phantom", "--steps", "2", "--scales", "1.0", "--output", &out]),
        EXIT_ARGUMENT
    );
    assert_eq!(
        code(&["phantom", "--width", "0", "--output", &out]),
        EXIT_ARGUMENT
    );
    assert_eq!(
        code(&[
            "transform",
            "--input",
            &out,
            "--output",
            &out,
            "--method",
            "hex"
        ]),
        EXIT_ARGUMENT
    );
    assert_eq!(code(&["frobnicate"]), EXIT_ARGUMENT);
    assert_eq!(code(&["--help"]), EXIT_OK);
}

#[test]
fn static_pair_with_no_motion_has_offset_zero_highpass() {
    let dir = tempfile::tempdir().unwrap();
    let p = phantom(
        dir.path(),
        "s.raw",
        &["--steps", "2", "--scales", "1.0,1.0"],
    );
    let stem = path(dir.path(), "bands");
    assert_eq!(
        code(&[
            "transform",
            "--input",
            &p,
            "--output",
            &stem,
            "--method",
            "none"
        ]),
        EXIT_OK
    );
    let raw = fs::read(format!("{stem}.raw")).unwrap();
    let hp = &raw[raw.len() / 2..];
    let offset = (SUBBAND_OFFSET as u16).to_le_bytes();
    assert!(hp.chunks_exact(2).all(|c| c == offset));
}

#[test]
fn transform_then_reconstruct_is_byte_identical() {
    let dir = tempfile::tempdir().unwrap();
    let p = phantom(dir.path(), "in.raw", &["--steps", "4", "--seed", "5"]);
    for (method, extra) in [
        ("none", vec![]),
        ("block", vec!["--grid-size", "8"]),
        ("tri", vec!["--schedule", "par"]),
        ("quad", vec!["--no-coarse", "--iterations", "5"]),
    ] {
        let stem = path(dir.path(), &format!("bands_{method}"));
        let mut args = vec![
            "transform",
            "--input",
            &p,
            "--output",
            &stem,
            "--method",
            method,
        ];
        args.extend(extra);
        assert_eq!(code(&args), EXIT_OK, "{method}");
        for t in 0..2 {
            assert!(Path::new(&format!("{stem}.pair{t}.mvf")).exists());
        }
        let back = path(dir.path(), &format!("back_{method}.raw"));
        assert_eq!(
            code(&[
                "reconstruct",
                "--input",
                &format!("{stem}.raw"),
                "--output",
                &back
            ]),
            EXIT_OK
        );
        assert_eq!(fs::read(&p).unwrap(), fs::read(&back).unwrap(), "{method}");
    }
}

#[test]
fn missing_or_mismatched_sidecars_exit_3() {
    let dir = tempfile::tempdir().unwrap();
    let p = phantom(dir.path(), "in.raw", &["--steps", "2"]);
    let stem = path(dir.path(), "bands");
    assert_eq!(
        code(&["transform", "--input", &p, "--output", &stem]),
        EXIT_OK
    );
    let bands = format!("{stem}.raw");
    let back = path(dir.path(), "back.raw");

    let mvf = format!("{stem}.pair0.mvf");
    let saved = fs::read(&mvf).unwrap();
    fs::remove_file(&mvf).unwrap();
    assert_eq!(
        code(&["reconstruct", "--input", &bands, "--output", &back]),
        EXIT_DATA
    );

    // A mesh for a larger slice.
    let other = dir.path().join("other");
    fs::create_dir(&other).unwrap();
    let big = path(&other, "big.raw");
    assert_eq!(
        code(&["phantom", "--width", "96", "--height", "96", "--steps", "2", "--output", &big]),
        EXIT_OK
    );
    let big_stem = path(&other, "bands");
    assert_eq!(
        code(&["transform", "--input", &big, "--output", &big_stem]),
        EXIT_OK
    );
    fs::copy(format!("{big_stem}.pair0.mvf"), &mvf).unwrap();
    assert_eq!(
        code(&["reconstruct", "--input", &bands, "--output", &back]),
        EXIT_DATA
    );

    fs::write(&mvf, saved).unwrap();
    fs::remove_file(dir.path().join("bands.json")).unwrap();
    assert_eq!(
        code(&["reconstruct", "--input", &bands, "--output", &back]),
        EXIT_DATA
    );
    assert_eq!(
        code(&[
            "transform",
            "--input",
            &path(dir.path(), "nothing.raw"),
            "--output",
            &stem
        ]),
        EXIT_DATA
    );
}

#[test]
fn evaluate_writes_reports_and_padded_traces() {
    let dir = tempfile::tempdir().unwrap();
    let p = phantom(dir.path(), "in.raw", &["--steps", "4"]);
    let out_dir = path(dir.path(), "eval");
    assert_eq!(
        code(&[
            "evaluate",
            "--input",
            &p,
            "--methods",
            "none,block,tri,quad",
            "--output-dir",
            &out_dir
        ]),
        EXIT_OK
    );
    let csv = fs::read_to_string(Path::new(&out_dir).join("report.csv")).unwrap();
    let mut lines = csv.lines();
    assert_eq!(
        lines.next(),
        Some("pair,method,hp_bytes,lp_bytes,mv_bytes,lp_psnr_db,hp_energy")
    );
    assert_eq!(lines.count(), 4 * 2);

    let json: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(Path::new(&out_dir).join("report.json")).unwrap())
            .unwrap();
    assert_eq!(json.as_array().unwrap().len(), 4);
    assert_eq!(json[3]["method"], "quad");

    for method in ["tri", "quad"] {
        for t in 0..2 {
            let trace =
                fs::read_to_string(Path::new(&out_dir).join(format!("trace_{method}_pair{t}.csv")))
                    .unwrap();
            let mut lines = trace.lines();
            assert_eq!(
                lines.next(),
                Some("iter,active_points,comp_psnr_db,inv_psnr_db")
            );
            assert_eq!(lines.count(), 15);
        }
    }
    assert!(!Path::new(&out_dir).join("trace_block_pair0.csv").exists());
}

#[test]
fn evaluate_on_static_input_reports_zero_energy() {
    let dir = tempfile::tempdir().unwrap();
    let p = phantom(
        dir.path(),
        "s.raw",
        &["--steps", "2", "--scales", "1.0,1.0"],
    );
    let out_dir = path(dir.path(), "eval");
    assert_eq!(
        code(&["evaluate", "--input", &p, "--output-dir", &out_dir]),
        EXIT_OK
    );
    let csv = fs::read_to_string(Path::new(&out_dir).join("report.csv")).unwrap();
    for row in csv.lines().skip(1) {
        assert!(row.ends_with(",inf,0"), "{row}");
    }
}
