//! End-to-end driver tests against the built binary: exit codes, the
//! documented output values, and byte-identical JSON across runs.

use std::process::Command;

fn run(args: &[&str]) -> (i32, String, String) {
    let out = Command::new(env!("CARGO_BIN_EXE_saito-forge"))
        .args(args)
        .output()
        .expect("spawn saito-forge");
    (
        out.status.code().unwrap_or(-1),
        String::from_utf8_lossy(&out.stdout).into_owned(),
        String::from_utf8_lossy(&out.stderr).into_owned(),
    )
}

#[test]
fn saito_flat_json_has_table_entry() {
    let (code, stdout, _) = run(&["saito", "G(3,3,2)", "--flat", "--json"]);
    assert_eq!(code, 0);
    // C_y carries the 9y entry
    let v: serde_json::Value = serde_json::from_str(&stdout).unwrap();
    let c2 = &v["C"][1]["entries"];
    let coeff = &c2[1]["terms"][0]["coeff"]["coeffs"][0];
    assert_eq!(coeff, "9");
    assert_eq!(v["degrees"], serde_json::json!([3, 2]));
}

#[test]
fn test_e_nonexistence_exit_code() {
    let (code, stdout, _) = run(&["test-e", "G12", "--e", "1,0"]);
    assert_eq!(code, 1, "nonexistence must exit nonzero");
    assert!(stdout.contains("FailsASS2"), "stdout: {}", stdout);
}

#[test]
fn test_e_natural() {
    let (code, stdout, _) = run(&["test-e", "G4", "--e", "1,0"]);
    assert_eq!(code, 0);
    assert!(stdout.contains("Natural"));
}

#[test]
fn search_e_prints_lines() {
    let (code, stdout, _) = run(&["search-e", "G7"]);
    assert_eq!(code, 0);
    assert!(stdout.contains("3 admissible line(s)"), "stdout: {}", stdout);
}

#[test]
fn usage_error_exit_code() {
    let (code, _, _) = run(&["frobnicate"]);
    assert_eq!(code, 2);
    let (code, _, stderr) = run(&["group", "info", "G31"]);
    assert_eq!(code, 1);
    assert!(stderr.contains("unsupported group"), "stderr: {}", stderr);
    let (code, _, stderr) = run(&["group", "info", "G(2,2,2)"]);
    assert_eq!(code, 1);
    assert!(stderr.contains("reducible"), "stderr: {}", stderr);
}

#[test]
fn cover_row_runs() {
    let (code, stdout, _) = run(&["cover", "G(4,2,2)", "--row", "2"]);
    assert_eq!(code, 0);
    assert!(stdout.contains("verified"));
}

#[test]
fn tables_are_deterministic() {
    let base = std::env::temp_dir().join("saito_forge_cli_tables");
    let d1 = base.join("run1");
    let d2 = base.join("run2");
    for d in [&d1, &d2] {
        std::fs::create_dir_all(d).unwrap();
        let (code, _, _) = run(&[
            "tables",
            "--out",
            d.to_str().unwrap(),
            "--only",
            "G(3,1,2)",
            "--only",
            "G4",
        ]);
        assert_eq!(code, 0);
    }
    let j1 = std::fs::read(d1.join("natural_structures.json")).unwrap();
    let j2 = std::fs::read(d2.join("natural_structures.json")).unwrap();
    assert_eq!(j1, j2, "JSON output must be byte-identical across runs");
    let t1 = std::fs::read(d1.join("natural_structures.txt")).unwrap();
    let t2 = std::fs::read(d2.join("natural_structures.txt")).unwrap();
    assert_eq!(t1, t2);
}

#[test]
fn verify_stored_structure() {
    let dir = std::env::temp_dir().join("saito_forge_cli_verify");
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("g4.json");
    let st = saito_forge::saito::natural_saito("G4").unwrap();
    saito_forge::cli::store(&path, "SaitoData", &st.saito).unwrap();
    let (code, _, stderr) = run(&["verify", path.to_str().unwrap()]);
    assert_eq!(code, 0, "stderr: {}", stderr);
    // corrupt the C_y unit-row entry (breaks multiplication symmetry
    // against C_x = I) and watch verification fail
    let text = std::fs::read_to_string(&path).unwrap();
    let mut v: serde_json::Value = serde_json::from_str(&text).unwrap();
    v["payload"]["c_mats"][1]["entries"][2]["terms"][0]["coeff"]["coeffs"][0] =
        serde_json::json!("2");
    std::fs::write(&path, serde_json::to_string_pretty(&v).unwrap()).unwrap();
    let (code, _, _) = run(&["verify", path.to_str().unwrap()]);
    assert_eq!(code, 1);
}
