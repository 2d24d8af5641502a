//! Runs the `radoppler` binary end to end.

mod common;

use std::path::Path;
use std::process::{Command, Output};

use radoppler::io::{self, load_matrix};
use radoppler::kv::KvFile;
use radoppler::simulator::{preset, Preset, ScattererSpec, Scenario};
use radoppler::{RadarCube, RadarParams};

fn radoppler(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_radoppler"))
        .args(args)
        .current_dir(dir)
        .env_remove("RADOPPLER_LOG")
        .output()
        .unwrap()
}

fn ok(dir: &Path, args: &[&str]) {
    let out = radoppler(dir, args);
    assert!(
        out.status.success(),
        "{args:?} failed: {}",
        String::from_utf8_lossy(&out.stderr)
    );
}

fn manifest(path: &Path) -> KvFile {
    KvFile::read(path).unwrap()
}

fn short_params() -> RadarParams {
    RadarParams {
        num_chirps: 1024,
        ..RadarParams::default()
    }
}

/// Constant-velocity target whose Doppler falls exactly on signed bin `k`.
fn tone_scenario(k: i64) -> Scenario {
    let p = short_params();
    let bin_hz = p.chirp_repetition_freq / 256.0;
    let v = k as f64 * bin_hz / (2.0 * p.center_freq / radoppler::config::SPEED_OF_LIGHT);
    Scenario {
        params: p,
        scatterers: vec![ScattererSpec {
            base_velocity: v,
            ..ScattererSpec::fixed(2.0, 1.0)
        }],
        noise_power: 0.0,
        seed: 1,
    }
}

fn write_scenario(dir: &Path, name: &str, s: &Scenario) {
    s.to_kv().write(&dir.join(name)).unwrap();
}

#[test]
fn simulate_preset_writes_cube_and_manifest() {
    let dir = tempfile::tempdir().unwrap();
    ok(
        dir.path(),
        &["simulate", "--preset", "limp_like", "--out", "limp"],
    );
    for f in ["limp.iq", "limp.meta", "limp.manifest"] {
        assert!(dir.path().join(f).exists(), "{f}");
    }
    let m = manifest(&dir.path().join("limp.manifest"));
    assert_eq!(m.get("preset"), Some("limp_like"));
    let digest = radoppler::manifest::sha256_file(&dir.path().join("limp.iq")).unwrap();
    assert_eq!(m.get("output.cube.sha256"), Some(digest.as_str()));
    let cube = io::load_radar_cube(&dir.path().join("limp.iq")).unwrap();
    assert_eq!(
        cube,
        radoppler::simulator::synthesize(&preset(Preset::LimpLike)).unwrap()
    );
}

#[test]
fn repeated_simulation_has_identical_hash() {
    let dir = tempfile::tempdir().unwrap();
    write_scenario(dir.path(), "walk.scn", &preset(Preset::WalkLike));
    ok(
        dir.path(),
        &["simulate", "--scenario", "walk.scn", "--out", "a"],
    );
    ok(
        dir.path(),
        &["simulate", "--scenario", "walk.scn", "--out", "b.iq"],
    );
    let (a, b) = (
        manifest(&dir.path().join("a.manifest")),
        manifest(&dir.path().join("b.manifest")),
    );
    assert_eq!(a.get("output.cube.sha256"), b.get("output.cube.sha256"));
    assert_eq!(
        a.get("input.scenario.sha256"),
        b.get("input.scenario.sha256")
    );
}

#[test]
fn aliasing_scenario_exits_2_naming_scatterer() {
    let dir = tempfile::tempdir().unwrap();
    let mut s = tone_scenario(3);
    s.scatterers.push(ScattererSpec {
        base_velocity: 4.0,
        ..ScattererSpec::fixed(1.0, 1.0)
    });
    write_scenario(dir.path(), "bad.scn", &s);
    let out = radoppler(
        dir.path(),
        &["simulate", "--scenario", "bad.scn", "--out", "x"],
    );
    assert_eq!(out.status.code(), Some(2));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("scatterer 1"), "{err}");
    assert!(!dir.path().join("x.manifest").exists());
}

#[test]
fn tone_pgm_has_one_bright_row() {
    let dir = tempfile::tempdir().unwrap();
    let k = 23;
    write_scenario(dir.path(), "tone.scn", &tone_scenario(k));
    ok(
        dir.path(),
        &["simulate", "--scenario", "tone.scn", "--out", "tone"],
    );
    ok(
        dir.path(),
        &[
            "spectrogram",
            "--cube",
            "tone.iq",
            "--out",
            "tone.pgm",
            "--format",
            "pgm",
        ],
    );
    let img = load_matrix(&dir.path().join("tone.pgm"))
        .unwrap()
        .into_real()
        .unwrap();
    assert_eq!(img.nrows(), 256);
    let expect_row = 255 - (k + 128) as usize;
    for t in 0..img.ncols() {
        let col = img.column(t);
        assert_eq!(common::argmax(col.iter().copied()), expect_row, "frame {t}");
        assert!(col[expect_row] >= 240.0);
    }
    let axis = KvFile::read(&dir.path().join("tone.pgm.axis")).unwrap();
    assert_eq!(axis.get("kind"), Some("linear"));
}

#[test]
fn spectrogram_missing_sidecar_exits_2() {
    let dir = tempfile::tempdir().unwrap();
    write_scenario(dir.path(), "tone.scn", &tone_scenario(5));
    ok(
        dir.path(),
        &["simulate", "--scenario", "tone.scn", "--out", "c"],
    );
    std::fs::remove_file(dir.path().join("c.meta")).unwrap();
    let out = radoppler(
        dir.path(),
        &["spectrogram", "--cube", "c.iq", "--out", "s.csv"],
    );
    assert_eq!(out.status.code(), Some(2));
    assert!(!dir.path().join("s.csv").exists());
}

#[test]
fn bin_and_csv_outputs_agree() {
    let dir = tempfile::tempdir().unwrap();
    write_scenario(dir.path(), "tone.scn", &tone_scenario(-9));
    ok(
        dir.path(),
        &["simulate", "--scenario", "tone.scn", "--out", "c"],
    );
    ok(
        dir.path(),
        &[
            "spectrogram",
            "--cube",
            "c.iq",
            "--out",
            "s.bin",
            "--format",
            "bin",
        ],
    );
    ok(
        dir.path(),
        &[
            "spectrogram",
            "--cube",
            "c.iq",
            "--out",
            "s.csv",
            "--format",
            "csv",
        ],
    );
    let a = load_matrix(&dir.path().join("s.bin"))
        .unwrap()
        .into_real()
        .unwrap();
    let b = load_matrix(&dir.path().join("s.csv"))
        .unwrap()
        .into_real()
        .unwrap();
    assert_eq!(a.dim(), b.dim());
    for (x, y) in a.iter().zip(b.iter()) {
        assert!((x - y).abs() <= 1e-9 * x.abs().max(1e-300));
    }
}

#[test]
fn ra_from_cube_equals_ra_from_spectrogram() {
    let dir = tempfile::tempdir().unwrap();
    ok(
        dir.path(),
        &["simulate", "--preset", "walk_like", "--out", "w"],
    );
    ok(
        dir.path(),
        &[
            "spectrogram",
            "--cube",
            "w.iq",
            "--out",
            "s.bin",
            "--format",
            "bin",
        ],
    );
    ok(
        dir.path(),
        &[
            "ra", "--input", "s.bin", "--out", "r1.bin", "--format", "bin",
        ],
    );
    ok(
        dir.path(),
        &["ra", "--input", "w", "--out", "r2.bin", "--format", "bin"],
    );
    let r1 = std::fs::read(dir.path().join("r1.bin")).unwrap();
    let r2 = std::fs::read(dir.path().join("r2.bin")).unwrap();
    assert_eq!(r1, r2);
    let m = manifest(&dir.path().join("r1.bin.manifest"));
    assert_eq!(m.get("corner.source"), Some("detected"));
    for key in [
        "corner.f_nc",
        "corner.f_pc",
        "corner.f_c",
        "corner.break_points",
    ] {
        assert!(m.get(key).is_some(), "{key}");
    }
    assert_eq!(m.require_f64_list("corner.break_points").unwrap().len(), 66);
}

#[test]
fn limp_corner_below_walk_corner() {
    let dir = tempfile::tempdir().unwrap();
    let mut f_c = Vec::new();
    for name in ["limp_like", "walk_like"] {
        ok(dir.path(), &["simulate", "--preset", name, "--out", name]);
        let out = format!("{name}.ra.csv");
        ok(
            dir.path(),
            &["ra", "--input", &format!("{name}.iq"), "--out", &out],
        );
        let m = manifest(&dir.path().join(format!("{out}.manifest")));
        f_c.push(m.require_parsed::<f64>("corner.f_c_hz").unwrap());
    }
    assert!(f_c[0] < f_c[1], "{f_c:?}");
}

#[test]
fn forced_corner_skips_detection() {
    let dir = tempfile::tempdir().unwrap();
    ok(
        dir.path(),
        &["simulate", "--preset", "fall_like", "--out", "f"],
    );
    ok(
        dir.path(),
        &[
            "ra",
            "--input",
            "f.iq",
            "--out",
            "r.csv",
            "--force-fc",
            "50",
            "-M",
            "32",
        ],
    );
    let m = manifest(&dir.path().join("r.csv.manifest"));
    assert_eq!(m.get("corner.source"), Some("forced"));
    assert_eq!(m.get("corner.f_c_hz"), Some("50"));
    assert_eq!(m.get("corner.f_nc"), None);
    assert_eq!(m.get("config.num_filters"), Some("32"));
    let r = load_matrix(&dir.path().join("r.csv")).unwrap();
    assert_eq!(r.dim().1, 64);
}

#[test]
fn all_zero_cube_is_degenerate() {
    let dir = tempfile::tempdir().unwrap();
    let p = short_params();
    let cube = RadarCube::new(
        p,
        vec![Default::default(); p.num_fast_samples * p.num_chirps],
    )
    .unwrap();
    io::write_radar_cube(&cube, &dir.path().join("zero")).unwrap();
    let out = radoppler(dir.path(), &["ra", "--input", "zero.iq", "--out", "r.csv"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("degenerate input"));
}

#[test]
fn pgm_input_refused() {
    let dir = tempfile::tempdir().unwrap();
    write_scenario(dir.path(), "tone.scn", &tone_scenario(4));
    ok(
        dir.path(),
        &["simulate", "--scenario", "tone.scn", "--out", "c"],
    );
    ok(
        dir.path(),
        &[
            "spectrogram",
            "--cube",
            "c.iq",
            "--out",
            "s.pgm",
            "--format",
            "pgm",
        ],
    );
    for sub in ["ra", "track"] {
        let out = radoppler(dir.path(), &[sub, "--input", "s.pgm", "--out", "o.csv"]);
        assert_eq!(out.status.code(), Some(2), "{sub}");
    }
}

fn read_track(path: &Path) -> Vec<[f64; 3]> {
    let text = std::fs::read_to_string(path).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("frame_time,raw_peak,smoothed"));
    lines
        .map(|l| {
            let v: Vec<f64> = l.split(',').map(|c| c.parse().unwrap()).collect();
            [v[0], v[1], v[2]]
        })
        .collect()
}

#[test]
fn constant_tone_track_is_flat() {
    let dir = tempfile::tempdir().unwrap();
    let k = 17;
    write_scenario(dir.path(), "tone.scn", &tone_scenario(k));
    ok(
        dir.path(),
        &["simulate", "--scenario", "tone.scn", "--out", "c"],
    );
    ok(
        dir.path(),
        &["spectrogram", "--cube", "c.iq", "--out", "s.csv"],
    );
    ok(dir.path(), &["track", "--input", "s.csv", "--out", "t.csv"]);
    let rows = read_track(&dir.path().join("t.csv"));
    let expect = k as f64 * 4000.0 / 256.0;
    assert!(rows.len() > 20);
    for r in &rows[20..] {
        assert!((r[2] - expect).abs() < 1e-6, "{r:?}");
        assert_eq!(r[1], expect);
    }
    assert!(rows.windows(2).all(|w| w[1][0] > w[0][0]));
}

#[test]
fn track_defaults_match_explicit_flags() {
    let dir = tempfile::tempdir().unwrap();
    ok(
        dir.path(),
        &["simulate", "--preset", "walk_like", "--out", "w"],
    );
    ok(
        dir.path(),
        &[
            "spectrogram",
            "--cube",
            "w.iq",
            "--out",
            "s.bin",
            "--format",
            "bin",
        ],
    );
    ok(dir.path(), &["track", "--input", "s.bin", "--out", "a.csv"]);
    ok(
        dir.path(),
        &[
            "track", "--input", "s.bin", "--out", "b.csv", "--q", "10", "--r", "4",
        ],
    );
    assert_eq!(
        std::fs::read(dir.path().join("a.csv")).unwrap(),
        std::fs::read(dir.path().join("b.csv")).unwrap()
    );
}

#[test]
fn track_missing_input_exits_2() {
    let dir = tempfile::tempdir().unwrap();
    let out = radoppler(
        dir.path(),
        &["track", "--input", "nope.csv", "--out", "t.csv"],
    );
    assert_eq!(out.status.code(), Some(2));
    assert!(!String::from_utf8_lossy(&out.stderr).is_empty());
}

#[test]
fn logging_goes_to_stderr_only() {
    let dir = tempfile::tempdir().unwrap();
    let out = Command::new(env!("CARGO_BIN_EXE_radoppler"))
        .args(["simulate", "--preset", "limp_like", "--out", "l"])
        .current_dir(dir.path())
        .env("RADOPPLER_LOG", "debug")
        .output()
        .unwrap();
    assert!(out.status.success());
    assert!(out.stdout.is_empty());
    assert!(String::from_utf8_lossy(&out.stderr).contains("synthesizing"));
}
