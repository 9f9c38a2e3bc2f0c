use defcohom_cli::{run, EXIT_INPUT, EXIT_OK, EXIT_USAGE};
use serde_json::Value;

fn corpus(rel: &str) -> String {
    format!("{}/corpus/{rel}", env!("CARGO_MANIFEST_DIR"))
}

fn exec(args: &[&str]) -> (i32, String, String) {
    let mut argv = vec!["defcohom"];
    argv.extend_from_slice(args);
    let (mut out, mut err) = (Vec::new(), Vec::new());
    let code = run(argv, &mut out, &mut err);
    (code, String::from_utf8(out).unwrap(), String::from_utf8(err).unwrap())
}

fn json(args: &[&str]) -> Value {
    let (code, out, err) = exec(args);
    assert_eq!(code, EXIT_OK, "{err}");
    serde_json::from_str(&out).unwrap()
}

#[test]
fn usage_errors_exit_one() {
    assert_eq!(exec(&[]).0, EXIT_USAGE);
    assert_eq!(exec(&["frobnicate"]).0, EXIT_USAGE);
    assert_eq!(exec(&["cohomology", "--model", "iwasawa", "--bidegree", "1"]).0, EXIT_USAGE);
    assert_eq!(exec(&["hodge", "--model", "iwasawa", "--seed", "zz"]).0, EXIT_USAGE);
    let (code, out, _) = exec(&["--help"]);
    assert_eq!(code, EXIT_OK);
    assert!(out.contains("mc-solve"));
}

#[test]
fn input_errors_exit_two() {
    let (code, out, err) = exec(&["validate", "--model", &corpus("broken.json")]);
    assert_eq!(code, EXIT_INPUT);
    assert!(out.is_empty());
    assert!(err.contains("d^2"), "{err}");
    assert_eq!(exec(&["validate", "--model", "/nonexistent/model.json"]).0, EXIT_INPUT);
    let bad = corpus("deformations/bad-omega3bar.json");
    assert_eq!(exec(&["cohomology", "--model", "iwasawa", "--tangent", "1", "--order", "2"]).0, EXIT_OK);
    assert_eq!(exec(&["extend", "--model", "iwasawa", "--deformation", &bad, "--bidegree", "1,0"]).0, EXIT_INPUT);
    let kt = corpus("deformations/kodaira-thurston-t21.json");
    assert_eq!(exec(&["mc-check", "--model", "kodaira_thurston", "--deformation", &kt, "--holomorphic"]).0, EXIT_INPUT);
    let torus = corpus("deformations/torus3-mixed.json");
    assert_eq!(exec(&["mc-check", "--model", "kodaira_thurston", "--deformation", &torus]).0, EXIT_INPUT);
}

#[test]
fn bundled_names_and_paths_agree() {
    let a = exec(&["cohomology", "--model", "iwasawa"]);
    let b = exec(&["cohomology", "--model", &corpus("iwasawa.json")]);
    assert_eq!(a, b);
    assert_eq!(a.0, EXIT_OK);
}

#[test]
fn solved_series_round_trips_through_mc_check() {
    let dir = std::env::temp_dir().join(format!("defcohom-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("solved.json");
    let phi1 = corpus("deformations/nakamura-phi1.json");
    let (code, out, err) = exec(&["mc-solve", "--model", "iwasawa", "--deformation", &phi1, "--out", path.to_str().unwrap()]);
    assert_eq!(code, EXIT_OK, "{err}");
    assert!(out.is_empty());
    assert!(err.contains("solved to order 4 of 4"), "{err}");
    let v = json(&["mc-check", "--model", "iwasawa", "--deformation", path.to_str().unwrap()]);
    assert_eq!(v["mc"], true);
    assert_eq!(v["order"], 4);
    std::fs::remove_dir_all(&dir).unwrap();
}

#[test]
fn order_flag_overrides_document() {
    let naka = corpus("deformations/nakamura.json");
    assert_eq!(json(&["mc-check", "--model", "iwasawa", "--deformation", &naka])["order"], 3);
    assert_eq!(json(&["mc-check", "--model", "iwasawa", "--deformation", &naka, "--order", "2"])["order"], 2);
}

#[test]
fn output_is_deterministic() {
    let t11 = corpus("deformations/iwasawa-t11.json");
    let args = ["hodge", "--model", "iwasawa", "--deformation", &t11, "--mode", "all"];
    let first = exec(&args);
    assert_eq!(first.0, EXIT_OK);
    assert_eq!(first, exec(&args));
    let args = ["obstruct", "--model", "iwasawa", "--deformation", &t11, "--bidegree", "1,1"];
    assert_eq!(exec(&args), exec(&args));
}

#[test]
fn seed_flag_is_used_and_reported() {
    let t11 = corpus("deformations/iwasawa-t11.json");
    let a = json(&["hodge", "--model", "iwasawa", "--deformation", &t11, "--bidegree", "1,0", "--seed", "7"]);
    let b = json(&["hodge", "--model", "iwasawa", "--deformation", &t11, "--bidegree", "1,0", "--seed", "0x7"]);
    assert_eq!(a, b);
    assert_eq!(a["seed"], 7);
    assert_eq!(a["entries"][0]["sampled"], 2);
    let c = json(&["hodge", "--model", "iwasawa", "--deformation", &t11, "--bidegree", "1,0", "--seed", "8"]);
    assert_ne!(a["samples"], c["samples"]);
}

#[test]
fn text_format_renders_formulas() {
    let bad = corpus("deformations/bad-omega3bar.json");
    let (code, out, _) = exec(&["mc-check", "--model", "iwasawa", "--deformation", &bad, "--format", "text"]);
    assert_eq!(code, EXIT_OK);
    assert!(out.contains("defect: (-1) t11 ~w1^~w2 X1"), "{out}");
    assert!(out.contains("mc: false"));
}

#[test]
fn identity_report_passes_on_corpus() {
    for (model, def) in [
        ("torus3", "torus3-mixed.json"),
        ("iwasawa", "iwasawa-t11.json"),
        ("kodaira_thurston", "kodaira-thurston-t21.json"),
    ] {
        let v = json(&["verify-identities", "--model", model, "--deformation", &corpus(&format!("deformations/{def}"))]);
        let checks = v["checks"].as_array().unwrap().iter().chain(v["deformation"]["checks"].as_array().unwrap());
        for c in checks {
            assert_eq!(c["ok"], true, "{model}: {c}");
        }
        assert_eq!(v["deformation"]["conjugation"].as_array().unwrap().len(), 2);
    }
}
