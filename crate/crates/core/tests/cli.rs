use pareto_persistence::cli::{parse_complex_spec, run, EXIT_INPUT, EXIT_OK, EXIT_USAGE};

const TRIANGLE: &str = "\
# filtered triangle: a b c, ab bc at 1, ca at 2, face at 3
field 2
cell 0 0 0
cell 1 0 0
cell 2 0 0
cell 3 1 1
cell 4 1 1
cell 5 1 2
cell 6 2 3
entry 1 0 3 1
entry 1 1 3 1
entry 1 1 4 1
entry 1 2 4 1
entry 1 0 5 1
entry 1 2 5 1
entry 2 3 6 1
entry 2 4 6 1
entry 2 5 6 1
";

fn write_temp(name: &str, text: &str) -> String {
    let dir = std::env::temp_dir().join(format!("pareto-ph-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join(name);
    std::fs::write(&path, text).unwrap();
    path.to_string_lossy().into_owned()
}

fn call(args: &[&str]) -> (i32, String, String) {
    let mut out = Vec::new();
    let mut err = Vec::new();
    let argv = std::iter::once("pareto-ph").chain(args.iter().copied());
    let code = run(argv, &mut out, &mut err);
    (code, String::from_utf8(out).unwrap(), String::from_utf8(err).unwrap())
}

#[test]
fn triangle_barcode() {
    let path = write_temp("triangle.txt", TRIANGLE);
    for morse in ["on", "off"] {
        let (code, out, _) = call(&["barcode", &path, "--input-format", "complex-spec", "--morse", morse]);
        assert_eq!(code, EXIT_OK);
        assert_eq!(out, "0\t0\t1\n0\t0\t1\n0\t0\tinf\n1\t2\t3\n");
    }
}

#[test]
fn triangle_generators() {
    let path = write_temp("triangle-gen.txt", TRIANGLE);
    let (code, out, _) = call(&["generators", &path, "--input-format", "complex-spec"]);
    assert_eq!(code, EXIT_OK);
    let last = out.lines().last().unwrap();
    assert_eq!(last, "1\t2\t3\t3:1,4:1,5:1\t6:1");
    let (code, json, _) = call(&["generators", &path, "--input-format", "complex-spec", "--format", "json"]);
    assert_eq!(code, EXIT_OK);
    let v: serde_json::Value = serde_json::from_str(&json).unwrap();
    assert_eq!(v["intervals"].as_array().unwrap().len(), 4);
    assert!(v["intervals"][2]["death"].is_null());
}

#[test]
fn lower_distance_input() {
    let path = write_temp("three.txt", "1.0\n2.0,3.0\n");
    let (code, out, _) = call(&["barcode", &path, "--dim-max", "1"]);
    assert_eq!(code, EXIT_OK);
    assert_eq!(out, "0\t0\t1\n0\t0\t2\n0\t0\tinf\n");
    let (code, out, _) = call(&["barcode", &path, "--threshold", "1.5", "--format", "json"]);
    assert_eq!(code, EXIT_OK);
    assert!(out.contains("\"death\": 1.0"));
}

#[test]
fn square_has_a_loop() {
    // Four corners of a unit square; the diagonals enter at sqrt 2.
    let path = write_temp("square.txt", "0 0\n1 0\n1 1\n0 1\n");
    let (code, out, _) = call(&["barcode", &path, "--input-format", "point-cloud", "--dim-max", "1"]);
    assert_eq!(code, EXIT_OK);
    let dim1: Vec<&str> = out.lines().filter(|l| l.starts_with("1\t")).collect();
    assert_eq!(dim1, vec![format!("1\t1\t{}", 2f64.sqrt())]);
}

#[test]
fn validate_dump_round_trips() {
    let path = write_temp("rt.txt", TRIANGLE);
    let (code, dump, _) = call(&["validate", &path, "--input-format", "complex-spec", "--dump"]);
    assert_eq!(code, EXIT_OK);
    let a = parse_complex_spec(TRIANGLE, None).unwrap().complex;
    let b = parse_complex_spec(&dump, None).unwrap().complex;
    assert_eq!(a, b);

    let cloud = write_temp("cloud.txt", "0 0\n1 0\n0.2 0.9\n0.7 0.7\n");
    let (code, dump, _) = call(&["validate", &cloud, "--input-format", "point-cloud", "--dim-max", "1", "--morse", "off", "--dump"]);
    assert_eq!(code, EXIT_OK);
    let again = write_temp("cloud-dump.txt", &dump);
    let (code, dump2, _) = call(&["validate", &again, "--input-format", "complex-spec", "--dump"]);
    assert_eq!(code, EXIT_OK);
    assert_eq!(dump, dump2);

    let (code, out, _) = call(&["validate", &path, "--input-format", "complex-spec"]);
    assert_eq!(code, EXIT_OK);
    assert!(out.starts_with("valid"));
}

#[test]
fn oracle_check_random_seeds() {
    let (code, out, _) = call(&["oracle-check", "--seeds", "20"]);
    assert_eq!(code, EXIT_OK, "{out}");
    assert_eq!(out.lines().count(), 20);
    let path = write_temp("oc.txt", TRIANGLE);
    let (code, out, _) = call(&["oracle-check", &path, "--input-format", "complex-spec"]);
    assert_eq!((code, out.as_str()), (EXIT_OK, "ok\n"));
}

#[test]
fn output_is_stable() {
    let path = write_temp("stable.txt", "0 0 0\n1 0 0\n0 1 0\n0 0 1\n1 1 1\n0.5 0.5 0.2\n");
    let args = ["generators", &path, "--input-format", "point-cloud", "--dim-max", "2"];
    let first = call(&args);
    assert_eq!(first.0, EXIT_OK);
    assert_eq!(first, call(&args));
}

#[test]
fn bench_small() {
    let (code, out, _) = call(&["bench", "--points", "5", "--ambient-dim", "3", "--dim-max", "2", "--seeds", "1"]);
    assert_eq!(code, EXIT_OK);
    let row: Vec<&str> = out.lines().nth(3).unwrap().split('\t').collect();
    assert_eq!(&row[..3], &["5", "2", "10"]);
}

#[test]
fn error_exit_codes() {
    assert_eq!(call(&["barcode", "/definitely/missing"]).0, EXIT_INPUT);
    assert_eq!(call(&["barcode", "x", "--field", "4"]).0, EXIT_USAGE);
    assert_eq!(call(&["barcode"]).0, EXIT_USAGE);
    assert_eq!(call(&["frobnicate"]).0, EXIT_USAGE);
    let ragged = write_temp("ragged.txt", "1.0,2.0\n");
    let (code, _, err) = call(&["barcode", &ragged]);
    assert_eq!(code, EXIT_INPUT);
    assert!(err.contains("line 1"));
    let bad = write_temp("bad.txt", "cell 0 0 5\ncell 1 1 0\nentry 1 0 1 1\n");
    assert_eq!(call(&["barcode", &bad, "--input-format", "complex-spec"]).0, EXIT_INPUT);
}
