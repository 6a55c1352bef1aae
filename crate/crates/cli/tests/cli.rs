use std::process::{Command, Output, Stdio};

use serde_json::Value;

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_monodromy")).args(args).stdin(Stdio::null()).output().expect("binary runs")
}

fn json(o: &Output) -> Value {
    assert!(o.status.success(), "stderr: {}", String::from_utf8_lossy(&o.stderr));
    serde_json::from_slice(&o.stdout).expect("stdout is JSON")
}

fn stderr_kind(o: &Output) -> String {
    let v: Value = serde_json::from_slice(&o.stderr).expect("stderr is JSON");
    v["error"]["kind"].as_str().unwrap().to_string()
}

const CUBIC: &str = r#"{"numerator":[-1,0,0,1]}"#;

#[test]
fn unknown_command_exits_2_without_output() {
    let o = run(&["frobnicate"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(o.stdout.is_empty());
    assert_eq!(stderr_kind(&o), "validation");
}

#[test]
fn unknown_flag_exits_2() {
    let o = run(&["analyze", "--bogus", "--input", CUBIC]);
    assert_eq!(o.status.code(), Some(2));
    assert!(o.stdout.is_empty());
}

#[test]
fn malformed_input_is_a_validation_error() {
    let o = run(&["analyze", "--input", r#"{"numerator":[1],"extra":0}"#]);
    assert_eq!(o.status.code(), Some(2));
    assert!(o.stdout.is_empty());
    assert_eq!(stderr_kind(&o), "validation");
}

#[test]
fn cubic_monodromy_has_regular_coordinates_and_no_degeneracy() {
    let v = json(&run(&["monodromy", "--input", CUBIC]));
    let r = &v["result"];
    let coords = r["coordinates"].as_object().unwrap();
    assert_eq!(coords.len(), 2);
    for c in coords.values() {
        let (re, im) = (c["re"].as_f64().unwrap(), c["im"].as_f64().unwrap());
        assert!(re.is_finite() && im.is_finite() && re.hypot(im) > 1e-8);
    }
    assert_eq!(r["verdict"]["verdict"], "None");
    assert_eq!(v["config"]["integrator"]["rel_tol"].as_f64(), Some(1e-10));
}

#[test]
fn mutate_twice_restores_the_input() {
    let t = json(&run(&["triangulate", "--input", r#"{"boundary":[5]}"#]));
    let tri = t["result"]["triangulation"].to_string();
    let input =
        format!(r#"{{"triangulation":{tri},"coordinates":{{"0":{{"re":1.5,"im":0.25}},"1":{{"re":-0.5,"im":2.0}}}}}}"#);
    let once = run(&["mutate", "--arc", "1", "--input", &input]);
    let once_text = String::from_utf8(once.stdout.clone()).unwrap();
    json(&once);
    let twice = json(&run(&["mutate", "--arc", "1", "--input", &once_text]));
    let back = &twice["result"]["coordinates"];
    for (k, want) in [("0", (1.5, 0.25)), ("1", (-0.5, 2.0))] {
        let (re, im) = (back[k]["re"].as_f64().unwrap(), back[k]["im"].as_f64().unwrap());
        assert!((re - want.0).abs() < 1e-14 && (im - want.1).abs() < 1e-14, "{k}: {re} {im}");
    }
    let original: Value = serde_json::from_str(&tri).unwrap();
    assert_eq!(
        twice["result"]["triangulation"]["triangles"].as_array().unwrap().len(),
        original["triangles"].as_array().unwrap().len()
    );
}

#[test]
fn selftest_is_byte_identical_across_runs() {
    let a = run(&["selftest"]);
    let b = run(&["selftest"]);
    assert_eq!(a.status.code(), Some(0), "{}", String::from_utf8_lossy(&a.stdout));
    assert_eq!(a.stdout, b.stdout);
    let v: Value = serde_json::from_slice(&a.stdout).unwrap();
    assert_eq!(v["result"]["criteria"].as_array().unwrap().len(), 10);
    assert_eq!(v["result"]["passed"], true);
}

#[test]
fn flags_override_the_config_file() {
    let dir = std::env::temp_dir().join(format!("monodromy-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("run.toml");
    std::fs::write(&path, "[integrator]\nrel_tol = 1e-8\nwkb_decay_target = 30.0\n").unwrap();
    let p = path.to_str().unwrap();
    let o = run(&["--emit-config", "--config", p, "--rel-tol", "1e-9"]);
    assert!(o.status.success());
    let text = String::from_utf8(o.stdout).unwrap();
    let v: toml::Value = toml::from_str(&text).unwrap();
    assert_eq!(v["integrator"]["rel_tol"].as_float(), Some(1e-9));
    assert_eq!(v["integrator"]["wkb_decay_target"].as_float(), Some(30.0));
    std::fs::remove_dir_all(&dir).unwrap();
}

#[test]
fn coords_of_reconstruct_round_trip_in_csv() {
    let t = json(&run(&["triangulate", "--input", r#"{"boundary":[1],"punctures":1}"#]));
    let tri = t["result"]["triangulation"].to_string();
    let input = format!(r#"{{"triangulation":{tri},"coordinates":{{"0":{{"re":2.0,"im":1.0}}}}}}"#);
    let f = run(&["reconstruct", "--input", &input]);
    let f_text = String::from_utf8(f.stdout.clone()).unwrap();
    json(&f);
    let csv = run(&["coords", "--format", "csv", "--input", &f_text]);
    assert!(csv.status.success());
    let text = String::from_utf8(csv.stdout).unwrap();
    let row: Vec<&str> = text.lines().nth(1).unwrap().split(',').collect();
    assert_eq!(row[0], "0");
    assert!((row[1].parse::<f64>().unwrap() - 2.0).abs() < 1e-12);
    assert!((row[2].parse::<f64>().unwrap() - 1.0).abs() < 1e-12);
}

#[test]
fn degeneracy_and_find_good_on_a_reconstructed_system() {
    let t = json(&run(&["triangulate", "--input", r#"{"boundary":[6]}"#]));
    let tri = t["result"]["triangulation"].to_string();
    let input = format!(
        r#"{{"triangulation":{tri},"coordinates":{{"0":{{"re":1.2,"im":0.3}},"1":{{"re":-2.0,"im":0.1}},"2":{{"re":0.4,"im":-0.9}}}}}}"#
    );
    let f = run(&["reconstruct", "--input", &input]);
    let f_text = String::from_utf8(f.stdout.clone()).unwrap();
    json(&f);
    let d = json(&run(&["degeneracy", "--input", &f_text]));
    assert_eq!(d["result"]["verdict"], "None");
    let g = json(&run(&["find-good", "--input", &f_text]));
    assert_eq!(g["result"]["moves"], 0);
    assert!(g["result"]["tagged"]["signing"].as_object().unwrap().values().all(|s| s == 1));
}

#[test]
fn flips_and_exchange_matrix() {
    let t = json(&run(&["triangulate", "--input", r#"{"boundary":[5]}"#]));
    let tri = t["result"]["triangulation"].to_string();
    let m = json(&run(&["exchange-matrix", "--input", &tri]));
    let rows = m["result"]["rows"].as_array().unwrap();
    assert_eq!(rows.len(), 2);
    assert_eq!(rows[0][1].as_i64().unwrap(), -rows[1][0].as_i64().unwrap());
    let f = json(&run(&["flip", "--arc", "0", "--input", &tri]));
    assert_eq!(f["result"]["edges"].as_array().unwrap().len(), 7);
    let tagged = format!(r#"{{"triangulation":{tri}}}"#);
    json(&run(&["tagged-flip", "--arc", "0", "--input", &tagged]));
}

#[test]
fn analyze_writes_an_svg_and_surface_reports_rank() {
    let dir = std::env::temp_dir().join(format!("monodromy-svg-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("poles.svg");
    let a = json(&run(&["analyze", "--input", CUBIC, "--svg", path.to_str().unwrap()]));
    assert_eq!(a["result"]["poles"][0]["order"], 7);
    assert!(std::fs::read_to_string(&path).unwrap().contains("<svg"));
    std::fs::remove_dir_all(&dir).unwrap();
    let s = json(&run(&["surface", "--input", CUBIC]));
    assert_eq!(s["result"]["rank"], 2);
    assert_eq!(s["result"]["surface"]["boundary"][0], 5);
}

#[test]
fn csv_is_rejected_where_unsupported() {
    let o = run(&["analyze", "--format", "csv", "--input", CUBIC]);
    assert_eq!(o.status.code(), Some(2));
    assert!(o.stdout.is_empty());
}

#[test]
fn regular_potential_without_realization_is_a_validation_error() {
    let o = run(&["monodromy", "--input", r#"{"numerator":[1],"denominator":[0,0,1]}"#]);
    assert_eq!(o.status.code(), Some(2));
    assert_eq!(stderr_kind(&o), "validation");
}

#[test]
fn wkb_sweep_reports_a_slope_per_arc() {
    let v = json(&run(&["wkb-sweep", "--hbar", "1,0.5,0.25", "--input", r#"{"numerator":[-1,0,1]}"#]));
    let slopes = v["result"]["slopes"].as_object().unwrap();
    assert!(!slopes.is_empty());
    assert_eq!(v["result"]["rows"].as_array().unwrap().len(), 3);
}

#[test]
fn resonant_regular_pole_is_a_numerical_failure() {
    let input =
        r#"{"numerator":[-0.25,0,0,1],"denominator":[0,0,1],"realization":{"punctured_polygon":{"radius":1.0}}}"#;
    let o = run(&["monodromy", "--input", input]);
    assert_eq!(o.status.code(), Some(3));
    assert!(o.stdout.is_empty());
    assert_eq!(stderr_kind(&o), "numerical");
}

#[test]
fn punctured_polygon_signings_give_finite_coordinates() {
    let base = r#""numerator":[0.3,0,0,1],"denominator":[0,0,1],"realization":{"punctured_polygon":{"radius":1.0}}"#;
    let plus = json(&run(&["monodromy", "--input", &format!("{{{base}}}")]));
    let p = plus["result"]["triangulation"]["vertices"]
        .as_array()
        .unwrap()
        .iter()
        .position(|v| v["kind"] == "puncture")
        .unwrap();
    let minus = json(&run(&["monodromy", "--input", &format!(r#"{{{base},"signing":{{"{p}":-1}}}}"#)]));
    for v in [&plus, &minus] {
        let coords = v["result"]["coordinates"].as_object().unwrap();
        assert_eq!(coords.len() as i64, v["result"]["rank"].as_i64().unwrap());
        assert!(coords.values().all(|c| c["re"].as_f64().is_some()));
    }
    assert_ne!(plus["result"]["coordinates"], minus["result"]["coordinates"]);
}
