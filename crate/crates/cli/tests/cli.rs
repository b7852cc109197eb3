//! End-to-end tests of the `cubiclass` binary: document shapes, exit
//! codes, determinism, and conformance of every produced JSON document to
//! the schemas shipped under `schemas/`.

use serde_json::Value;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_cubiclass"))
}

fn workspace_root() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR"))
        .ancestors()
        .nth(2)
        .expect("workspace root")
        .to_path_buf()
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("exit code")
}

fn parse_file(path: &Path) -> Value {
    let text = std::fs::read_to_string(path).expect("document readable");
    serde_json::from_str(&text).expect("document is JSON")
}

// ---------------------------------------------------------------------------
// Minimal JSON Schema validator covering the subset the shipped schemas
// use: type, const, enum, required, properties, additionalProperties:
// false, items, prefixItems (+ items: false), minItems/maxItems, pattern,
// anyOf, oneOf, and local $ref into $defs.
// ---------------------------------------------------------------------------

fn resolve<'a>(root: &'a Value, reference: &str) -> &'a Value {
    let path = reference
        .strip_prefix("#/")
        .unwrap_or_else(|| panic!("only local refs supported: {reference}"));
    let mut cur = root;
    for part in path.split('/') {
        cur = cur.get(part).unwrap_or_else(|| panic!("bad ref {reference}"));
    }
    cur
}

fn type_matches(name: &str, v: &Value) -> bool {
    match name {
        "object" => v.is_object(),
        "array" => v.is_array(),
        "string" => v.is_string(),
        "boolean" => v.is_boolean(),
        "null" => v.is_null(),
        "number" => v.is_number(),
        other => panic!("unsupported type {other}"),
    }
}

fn pattern_matches(pattern: &str, s: &str) -> bool {
    // The shipped schemas use three anchored patterns; match them
    // structurally instead of pulling in a regex engine.
    let decimal = |t: &str, signed: bool| -> bool {
        let t = if signed { t.strip_prefix('-').unwrap_or(t) } else { t };
        !t.is_empty()
            && t.bytes().all(|b| b.is_ascii_digit())
            && (t == "0" || !t.starts_with('0'))
    };
    match pattern {
        "^-?(0|[1-9][0-9]*)$" => decimal(s, true),
        "^(0|[1-9][0-9]*)$" => decimal(s, false),
        "^-?(0|[1-9][0-9]*)(/[1-9][0-9]*)?$" => {
            let mut it = s.splitn(2, '/');
            let num = it.next().unwrap_or("");
            let den = it.next();
            decimal(num, true)
                && den.map_or(true, |d| decimal(d, false) && d != "0")
        }
        "^[0-9a-f]{64}$" => {
            s.len() == 64 && s.bytes().all(|b| b.is_ascii_hexdigit() && !b.is_ascii_uppercase())
        }
        other => panic!("unsupported pattern {other}"),
    }
}

fn validate(root: &Value, schema: &Value, v: &Value, at: &str) -> Result<(), String> {
    if let Some(r) = schema.get("$ref").and_then(Value::as_str) {
        return validate(root, resolve(root, r), v, at);
    }
    if let Some(c) = schema.get("const") {
        if v != c {
            return Err(format!("{at}: expected const {c}, got {v}"));
        }
    }
    if let Some(options) = schema.get("enum").and_then(Value::as_array) {
        if !options.contains(v) {
            return Err(format!("{at}: {v} not in enum"));
        }
    }
    if let Some(t) = schema.get("type").and_then(Value::as_str) {
        if !type_matches(t, v) {
            return Err(format!("{at}: expected type {t}, got {v}"));
        }
    }
    if let Some(p) = schema.get("pattern").and_then(Value::as_str) {
        let s = v.as_str().ok_or_else(|| format!("{at}: pattern on non-string"))?;
        if !pattern_matches(p, s) {
            return Err(format!("{at}: {s:?} fails pattern {p}"));
        }
    }
    if let Some(variants) = schema.get("anyOf").and_then(Value::as_array) {
        if !variants
            .iter()
            .any(|s| validate(root, s, v, at).is_ok())
        {
            return Err(format!("{at}: no anyOf variant matched"));
        }
    }
    if let Some(variants) = schema.get("oneOf").and_then(Value::as_array) {
        let hits = variants
            .iter()
            .filter(|s| validate(root, s, v, at).is_ok())
            .count();
        if hits != 1 {
            return Err(format!("{at}: {hits} oneOf variants matched, need 1"));
        }
    }
    if let Some(req) = schema.get("required").and_then(Value::as_array) {
        let obj = v.as_object().ok_or_else(|| format!("{at}: required on non-object"))?;
        for key in req {
            let key = key.as_str().unwrap();
            if !obj.contains_key(key) {
                return Err(format!("{at}: missing required {key}"));
            }
        }
    }
    if let Some(props) = schema.get("properties").and_then(Value::as_object) {
        let obj = v.as_object().ok_or_else(|| format!("{at}: properties on non-object"))?;
        for (key, sub) in props {
            if let Some(val) = obj.get(key) {
                validate(root, sub, val, &format!("{at}/{key}"))?;
            }
        }
        if schema.get("additionalProperties") == Some(&Value::Bool(false)) {
            for key in obj.keys() {
                if !props.contains_key(key) {
                    return Err(format!("{at}: unexpected property {key}"));
                }
            }
        }
    }
    if let Some(arr) = v.as_array() {
        if let Some(min) = schema.get("minItems").and_then(Value::as_u64) {
            if (arr.len() as u64) < min {
                return Err(format!("{at}: fewer than {min} items"));
            }
        }
        if let Some(max) = schema.get("maxItems").and_then(Value::as_u64) {
            if (arr.len() as u64) > max {
                return Err(format!("{at}: more than {max} items"));
            }
        }
        let prefix = schema.get("prefixItems").and_then(Value::as_array);
        if let Some(prefix) = prefix {
            for (i, sub) in prefix.iter().enumerate() {
                if let Some(val) = arr.get(i) {
                    validate(root, sub, val, &format!("{at}/{i}"))?;
                }
            }
            match schema.get("items") {
                Some(Value::Bool(false)) => {
                    if arr.len() > prefix.len() {
                        return Err(format!("{at}: items beyond prefixItems"));
                    }
                }
                None => {}
                other => panic!("unsupported items after prefixItems: {other:?}"),
            }
        } else if let Some(items) = schema.get("items") {
            for (i, val) in arr.iter().enumerate() {
                validate(root, items, val, &format!("{at}/{i}"))?;
            }
        }
    }
    Ok(())
}

fn assert_valid(doc_path: &Path, schema_name: &str) {
    let schema_path = workspace_root().join("schemas").join(schema_name);
    let schema = parse_file(&schema_path);
    let doc = parse_file(doc_path);
    if let Err(e) = validate(&schema, &schema, &doc, "") {
        panic!("{} does not validate against {schema_name}: {e}", doc_path.display());
    }
}

/// The document with the meta block's timestamp blanked: everything that
/// must be deterministic.
fn deterministic_view(path: &Path) -> Value {
    let mut v = parse_file(path);
    v["meta"]["generated_unix"] = Value::String(String::new());
    v
}

// ---------------------------------------------------------------------------
// Tests
// ---------------------------------------------------------------------------

#[test]
fn construct_document_shape_and_determinism() {
    let dir = tempfile::tempdir().unwrap();
    let out1 = dir.path().join("a.json");
    let out2 = dir.path().join("b.json");
    for out in [&out1, &out2] {
        let r = run(&[
            "construct", "--d", "-7", "--n", "3", "--s", "1", "--a", "1",
            "--out", out.to_str().unwrap(),
        ]);
        assert_eq!(code(&r), 0, "stderr: {}", String::from_utf8_lossy(&r.stderr));
    }
    let doc = parse_file(&out1);
    assert_eq!(doc["schema"], "cubiclass/instance/1");
    assert_eq!(doc["body"]["m"], "-62505");
    assert_eq!(doc["body"]["three_divides_d"], Value::Bool(false));
    assert_eq!(
        doc["meta"]["config_hash"].as_str().unwrap().len(),
        64,
        "config hash is hex sha-256"
    );
    assert_valid(&out1, "instance.schema.json");
    assert_eq!(
        deterministic_view(&out1),
        deterministic_view(&out2),
        "same config must give identical bodies"
    );

    // The 3 | d branch marker.
    let out3 = dir.path().join("c.json");
    let r = run(&[
        "construct", "--d", "-3", "--n", "3", "--out", out3.to_str().unwrap(),
    ]);
    assert_eq!(code(&r), 0);
    let doc3 = parse_file(&out3);
    assert_eq!(doc3["body"]["three_divides_d"], Value::Bool(true));
    assert_valid(&out3, "instance.schema.json");
}

#[test]
fn parameter_and_usage_errors_exit_two() {
    // Missing required flag: usage error from the parser.
    assert_eq!(code(&run(&["construct", "--n", "3"])), 2);
    // d not ≡ 1 (mod 4).
    assert_eq!(code(&run(&["construct", "--d", "-5", "--n", "3"])), 2);
    // Non-integer d.
    assert_eq!(code(&run(&["construct", "--d", "x", "--n", "3"])), 2);
    // Even n.
    assert_eq!(code(&run(&["verify", "--d", "-7", "--n", "2"])), 2);
    // Bad precision env var.
    let r = bin()
        .args(["construct", "--d", "-7", "--n", "3"])
        .env("CUBICLASS_PRECISION", "zero")
        .output()
        .unwrap();
    assert_eq!(code(&r), 2);
    // Good precision env var still works.
    let r = bin()
        .args(["selftest"])
        .env("CUBICLASS_PRECISION", "128")
        .output()
        .unwrap();
    assert_eq!(code(&r), 0, "stderr: {}", String::from_utf8_lossy(&r.stderr));
}

#[test]
fn verify_trivial_n_certifies_immediately() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("v.json");
    let r = run(&[
        "verify", "--d", "-7", "--n", "1", "--out", out.to_str().unwrap(),
    ]);
    assert_eq!(code(&r), 0, "stderr: {}", String::from_utf8_lossy(&r.stderr));
    let doc = parse_file(&out);
    assert_eq!(doc["body"]["certificate"]["verdict"], "certified");
    assert_valid(&out, "divisibility.schema.json");
}

#[test]
fn search_solve_report_pipeline() {
    let dir = tempfile::tempdir().unwrap();
    let cert1 = dir.path().join("s1.json");
    let cert2 = dir.path().join("s2.json");
    let progress = dir.path().join("progress.json");

    // Too-small bound: certificate still written, exit 3.
    let small = dir.path().join("small.json");
    let r = run(&[
        "search", "--a-tilde", "1", "--n", "5", "--s", "1", "--d", "-7",
        "--q-bound", "500", "--out", small.to_str().unwrap(),
    ]);
    assert_eq!(code(&r), 3, "tiny bound must report exhaustion");
    assert_valid(&small, "search.schema.json");

    // Full run, no resume.
    let r = run(&[
        "search", "--a-tilde", "1", "--n", "5", "--s", "1", "--d", "-7",
        "--q-bound", "40000", "--out", cert1.to_str().unwrap(),
    ]);
    assert_eq!(code(&r), 0, "stderr: {}", String::from_utf8_lossy(&r.stderr));

    // Second run with a resume file and more workers: identical body.
    let r = run(&[
        "search", "--a-tilde", "1", "--n", "5", "--s", "1", "--d", "-7",
        "--q-bound", "40000", "--workers", "3",
        "--resume", progress.to_str().unwrap(),
        "--out", cert2.to_str().unwrap(),
    ]);
    assert_eq!(code(&r), 0);
    assert!(progress.exists(), "resume file written");
    let body1 = parse_file(&cert1)["body"].clone();
    let body2 = parse_file(&cert2)["body"].clone();
    assert_eq!(body1, body2, "worker count must not change the result");
    assert_valid(&cert1, "search.schema.json");

    // Resumed re-run reuses completed segments and agrees again.
    let cert3 = dir.path().join("s3.json");
    let r = run(&[
        "search", "--a-tilde", "1", "--n", "5", "--s", "1", "--d", "-7",
        "--q-bound", "40000",
        "--resume", progress.to_str().unwrap(),
        "--out", cert3.to_str().unwrap(),
    ]);
    assert_eq!(code(&r), 0);
    assert_eq!(body1, parse_file(&cert3)["body"]);

    // Solve the congruences, adjoining two extra ramified primes.
    let sol = dir.path().join("sol.json");
    let r = run(&[
        "solve", cert1.to_str().unwrap(), "--effort", "2",
        "--out", sol.to_str().unwrap(),
    ]);
    assert_eq!(code(&r), 0, "stderr: {}", String::from_utf8_lossy(&r.stderr));
    assert_valid(&sol, "solution.schema.json");
    let sol_doc = parse_file(&sol);
    assert_eq!(sol_doc["body"]["solution"]["ramification"].as_array().unwrap().len(), 2);

    // Tampered certificate must be rejected.
    let tampered = dir.path().join("tampered.json");
    let mut doc = parse_file(&cert1);
    let trip = &mut doc["body"]["triples"][2]["outcome"];
    if trip["q1"]["value"] == "1" {
        trip["q1"]["value"] = Value::String("2".into());
    } else {
        trip["q1"]["value"] = Value::String("1".into());
    }
    std::fs::write(&tampered, serde_json::to_string(&doc).unwrap()).unwrap();
    let r = run(&["solve", tampered.to_str().unwrap()]);
    assert_ne!(code(&r), 0, "tampered certificate must not solve");

    // TSV report over mixed documents.
    let tsv = dir.path().join("report.tsv");
    let r = run(&[
        "report", cert1.to_str().unwrap(), sol.to_str().unwrap(),
        "--out", tsv.to_str().unwrap(),
    ]);
    assert_eq!(code(&r), 0);
    let text = std::fs::read_to_string(&tsv).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines.len(), 3, "header plus one row per certificate");
    assert_eq!(
        lines[0],
        "file\tkind\td\tn\ts\ta\ta_tilde\tq_bound\tstatus\tdetail"
    );
    assert!(lines[1].contains("\tsearch\t") && lines[1].contains("complete"));
    assert!(lines[2].contains("\tsolution\t"));
}

#[test]
fn selftest_passes() {
    let r = run(&["selftest"]);
    assert_eq!(code(&r), 0, "stderr: {}", String::from_utf8_lossy(&r.stderr));
    let text = String::from_utf8_lossy(&r.stdout);
    assert!(text.contains("selftest passed"));
}
