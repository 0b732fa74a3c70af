use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;
use tempfile::TempDir;

fn coopstore(args: &[&str], dir: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_coopstore"))
        .args(args)
        .current_dir(dir)
        .env_remove("COOPSTORE_SEED")
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

fn json_of(o: &Output) -> Value {
    serde_json::from_slice(&o.stdout).unwrap_or_else(|e| panic!("bad json ({e}): {}", stdout(o)))
}

fn sample_input(dir: &Path, len: usize) -> std::path::PathBuf {
    let path = dir.join("input.bin");
    let data: Vec<u8> = (0..len).map(|i| (i * 131 + 17) as u8).collect();
    fs::write(&path, data).unwrap();
    path
}

#[test]
fn encode_repair_decode_round_trip() {
    let tmp = TempDir::new().unwrap();
    let d = tmp.path();
    sample_input(d, 777);
    let enc = coopstore(&["encode", "input.bin", "--out", "shards"], d);
    assert_eq!(enc.status.code(), Some(0), "{}{}", stdout(&enc), stderr(&enc));

    let original1 = fs::read(d.join("shards/node-001.shard")).unwrap();
    let original4 = fs::read(d.join("shards/node-004.shard")).unwrap();
    fs::remove_file(d.join("shards/node-001.shard")).unwrap();
    fs::remove_file(d.join("shards/node-004.shard")).unwrap();

    let rep = coopstore(&["repair", "shards", "--group", "1,4", "--helpers", "2,5,6", "--format", "json"], d);
    assert_eq!(rep.status.code(), Some(0), "{}{}", stdout(&rep), stderr(&rep));
    let report = json_of(&rep);
    assert_eq!(report["schema"], "coopstore.report/v1");
    let gens = report["sections"]["repair"]["generations"].as_u64().unwrap();
    // per generation: t*d*beta = 6 downloads, t(t-1)*beta' = 2 exchanges
    assert_eq!(report["sections"]["repair"]["downloaded"].as_u64().unwrap(), 6 * gens);
    assert_eq!(report["sections"]["repair"]["exchanged"].as_u64().unwrap(), 2 * gens);
    assert_eq!(fs::read(d.join("shards/node-001.shard")).unwrap(), original1);
    assert_eq!(fs::read(d.join("shards/node-004.shard")).unwrap(), original4);

    for n in [2, 3, 6] {
        fs::remove_file(d.join(format!("shards/node-00{n}.shard"))).unwrap();
    }
    let dec = coopstore(&["decode", "shards", "--out", "back.bin"], d);
    assert_eq!(dec.status.code(), Some(0), "{}{}", stdout(&dec), stderr(&dec));
    assert_eq!(fs::read(d.join("back.bin")).unwrap(), fs::read(d.join("input.bin")).unwrap());
}

#[test]
fn code_b_shards_repair_too() {
    let tmp = TempDir::new().unwrap();
    let d = tmp.path();
    sample_input(d, 90);
    assert_eq!(coopstore(&["encode", "input.bin", "--out", "s", "--variant", "code-b"], d).status.code(), Some(0));
    let original = fs::read(d.join("s/node-002.shard")).unwrap();
    fs::remove_file(d.join("s/node-002.shard")).unwrap();
    let rep = coopstore(&["repair", "s", "--group", "2,3"], d);
    assert_eq!(rep.status.code(), Some(0), "{}", stdout(&rep));
    assert_eq!(fs::read(d.join("s/node-002.shard")).unwrap(), original);
    assert!(stdout(&rep).contains("existing shard ignored"));
}

#[test]
fn encoding_is_deterministic() {
    let tmp = TempDir::new().unwrap();
    let d = tmp.path();
    sample_input(d, 300);
    coopstore(&["encode", "input.bin", "--out", "a", "--field", "m=8"], d);
    coopstore(&["encode", "input.bin", "--out", "b", "--field", "m=8", "--seed", "99"], d);
    for n in 1..=6 {
        let name = format!("node-00{n}.shard");
        assert_eq!(fs::read(d.join("a").join(&name)).unwrap(), fs::read(d.join("b").join(&name)).unwrap());
    }
}

#[test]
fn twelve_symbol_input_gives_two_generations() {
    let tmp = TempDir::new().unwrap();
    let d = tmp.path();
    // 8-byte length prefix + 4 bytes = 12 byte-wide symbols over GF(2^8)
    sample_input(d, 4);
    let enc = coopstore(&["encode", "input.bin", "--out", "s", "--field", "m=8", "--format", "json"], d);
    assert_eq!(enc.status.code(), Some(0));
    assert_eq!(json_of(&enc)["sections"]["manifest"]["generations"], 2);
    let bytes = fs::read(d.join("s/node-003.shard")).unwrap();
    assert_eq!(bytes.len(), 64 + 4);
    assert_eq!(&bytes[..4], b"CRCS");
}

#[test]
fn empty_input_is_rejected() {
    let tmp = TempDir::new().unwrap();
    fs::write(tmp.path().join("empty"), b"").unwrap();
    let out = coopstore(&["encode", "empty", "--out", "s"], tmp.path());
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr(&out).contains("empty"));
}

#[test]
fn overlapping_context_is_rejected() {
    let tmp = TempDir::new().unwrap();
    let d = tmp.path();
    sample_input(d, 20);
    coopstore(&["encode", "input.bin", "--out", "s"], d);
    let out = coopstore(&["repair", "s", "--group", "1,2", "--helpers", "2,3,4"], d);
    assert_eq!(out.status.code(), Some(2), "{}", stderr(&out));
    assert!(stderr(&out).contains("invalid repair context"));
}

#[test]
fn corrupted_shard_fails_the_run_but_decodes() {
    let tmp = TempDir::new().unwrap();
    let d = tmp.path();
    sample_input(d, 50);
    coopstore(&["encode", "input.bin", "--out", "s"], d);
    let path = d.join("s/node-002.shard");
    let mut bytes = fs::read(&path).unwrap();
    let last = bytes.len() - 1;
    bytes[last] ^= 1;
    fs::write(&path, bytes).unwrap();
    let out = coopstore(&["decode", "s", "--out", "back.bin"], d);
    assert_eq!(out.status.code(), Some(1));
    assert!(stdout(&out).contains("payload checksum mismatch"));
    assert_eq!(fs::read(d.join("back.bin")).unwrap(), fs::read(d.join("input.bin")).unwrap());
}

#[test]
fn attacks_recover_everything() {
    let tmp = TempDir::new().unwrap();
    let a = coopstore(&["attack", "--variant", "code-a", "--params", "d=3", "--field", "p=11", "--omega", "2"], tmp.path());
    assert_eq!(a.status.code(), Some(0), "{}{}", stdout(&a), stderr(&a));
    assert!(stdout(&a).contains("EXACT, leaked 6/6 symbols"));

    let b = coopstore(&["attack", "--variant", "code-b", "--params", "n=6,k=3,t=2", "--format", "json"], tmp.path());
    assert_eq!(b.status.code(), Some(0));
    let r = json_of(&b);
    assert_eq!(r["sections"]["attack"]["original"], r["sections"]["attack"]["recovered"]);
    assert_eq!(r["sections"]["attack"]["leaked_entropy"], 6);
    assert!(r["sections"]["attack"]["observations"].as_array().unwrap().iter().all(|o| o["label"].is_string()));
}

#[test]
fn inadmissible_omega_is_reported() {
    let tmp = TempDir::new().unwrap();
    let out = coopstore(&["attack", "--variant", "code-a", "--field", "p=13", "--omega", "2"], tmp.path());
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr(&out).contains("condition value 9"), "{}", stderr(&out));
}

#[test]
fn stable_attack_is_a_usage_error() {
    let tmp = TempDir::new().unwrap();
    assert_eq!(coopstore(&["attack"], tmp.path()).status.code(), Some(2));
    assert_eq!(coopstore(&["attack", "--params", "n=6,x=1"], tmp.path()).status.code(), Some(2));
}

#[test]
fn sweep_matches_capacity_table() {
    let tmp = TempDir::new().unwrap();
    let out = coopstore(&["sweep", "--format", "json", "--csv", "cap.csv"], tmp.path());
    assert_eq!(out.status.code(), Some(0));
    let r = json_of(&out);
    let table: Vec<(u64, u64, u64, Value)> = r["capacity_table"]
        .as_array()
        .unwrap()
        .iter()
        .map(|row| {
            assert_eq!(row["measured_min"], row["measured_max"]);
            (row["l1"].as_u64().unwrap(), row["l2"].as_u64().unwrap(), row["measured_min"].as_u64().unwrap(), row["predicted"].clone())
        })
        .collect();
    let want = [(0, 0, 6), (1, 0, 4), (0, 1, 2), (2, 0, 2), (1, 1, 1), (0, 2, 0)];
    assert_eq!(table.len(), want.len());
    for ((l1, l2, m, p), (a, b, c)) in table.into_iter().zip(want) {
        assert_eq!((l1, l2, m), (a, b, c));
        assert_eq!(p, c);
    }
    let csv = fs::read_to_string(tmp.path().join("cap.csv")).unwrap();
    assert!(csv.starts_with("l1,l2,placements,measured_min,measured_max,predicted,mismatches\n"));
    assert!(csv.contains("1,1,30,1,1,1,0\n"));
}

#[test]
fn empty_sweep_range_passes() {
    let tmp = TempDir::new().unwrap();
    fs::write(tmp.path().join("cfg.json"), r#"{"sweep": []}"#).unwrap();
    let out = coopstore(&["sweep", "--config", "cfg.json", "--format", "json"], tmp.path());
    assert_eq!(out.status.code(), Some(0));
    assert!(json_of(&out).get("capacity_table").is_none());
}

#[test]
fn code_b_sweep_is_measured_only() {
    let tmp = TempDir::new().unwrap();
    let out = coopstore(&["sweep", "--variant", "code-b", "--size", "0,1", "--format", "json"], tmp.path());
    assert_eq!(out.status.code(), Some(0));
    let row = &json_of(&out)["capacity_table"][0];
    assert_eq!(row["predicted"], Value::Null);
    assert_eq!(row["measured_min"], 0);
}

#[test]
fn verify_stable_passes_and_code_b_fails() {
    let tmp = TempDir::new().unwrap();
    let ok = coopstore(&["verify", "--params", "n=6,k=3,d=3,t=2", "--field", "p=11"], tmp.path());
    assert_eq!(ok.status.code(), Some(0), "{}", stdout(&ok));
    assert!(stdout(&ok).contains("MSCR 8 < MSR 12"));
    assert!(!stdout(&ok).contains("FAIL "));

    let bad = coopstore(&["verify", "--variant", "code-b", "--format", "json"], tmp.path());
    assert_eq!(bad.status.code(), Some(1));
    let w = &json_of(&bad)["sections"]["stability_witness"];
    assert_ne!(w["first_context"], w["second_context"]);
    assert_ne!(w["first"], w["second"]);
}

#[test]
fn verify_binary_field_checks_secrecy() {
    let tmp = TempDir::new().unwrap();
    let out = coopstore(&["verify", "--field", "m=4"], tmp.path());
    assert_eq!(out.status.code(), Some(0), "{}", stdout(&out));
    assert!(stdout(&out).contains("secure (1, 1)"));
    assert!(stdout(&out).contains("I(s;e) = 0 on 30/30 placements"));
}

#[test]
fn seed_precedence() {
    let tmp = TempDir::new().unwrap();
    let d = tmp.path();
    let run = |extra: &[&str], env: Option<&str>| {
        let mut cmd = Command::new(env!("CARGO_BIN_EXE_coopstore"));
        cmd.args(["attack", "--variant", "code-b", "--format", "json"]).args(extra).current_dir(d);
        match env {
            Some(v) => cmd.env("COOPSTORE_SEED", v),
            None => cmd.env_remove("COOPSTORE_SEED"),
        };
        let r: Value = serde_json::from_slice(&cmd.output().unwrap().stdout).unwrap();
        (r["config"]["seed"].as_u64().unwrap(), r["config"]["seed_source"].as_str().unwrap().to_string())
    };
    fs::write(d.join("cfg.json"), r#"{"seed": 5}"#).unwrap();
    assert_eq!(run(&[], None), (0, "default".into()));
    assert_eq!(run(&[], Some("7")), (7, "env".into()));
    assert_eq!(run(&["--config", "cfg.json"], Some("7")), (5, "config".into()));
    assert_eq!(run(&["--config", "cfg.json", "--seed", "9"], Some("7")), (9, "flag".into()));
}

#[test]
fn report_file_is_written() {
    let tmp = TempDir::new().unwrap();
    let out = coopstore(&["attack", "--variant", "code-a", "--report", "r.json"], tmp.path());
    assert_eq!(out.status.code(), Some(0));
    let r: Value = serde_json::from_str(&fs::read_to_string(tmp.path().join("r.json")).unwrap()).unwrap();
    assert_eq!(r["passed"], true);
    assert_eq!(r["sections"]["attack"]["content_granted"], true);
}
