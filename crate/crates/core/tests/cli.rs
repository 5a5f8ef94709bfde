use std::process::{Command, Output};

fn ssgraph(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_ssgraph"))
        .args(args)
        .env_remove("SSGRAPH_MODPOLY_DIR")
        .output()
        .unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn code(o: &Output) -> i32 {
    o.status.code().unwrap()
}

#[test]
fn enumerate_fixtures() {
    let o = ssgraph(&["--json", "enumerate", "-p", "11"]);
    assert_eq!(code(&o), 0);
    assert_eq!(stdout(&o), "{\"p\":11,\"d\":2,\"classes\":[{\"j\":[0,0],\"w\":3},{\"j\":[1,0],\"w\":2}]}\n");

    let o = ssgraph(&["--json", "enumerate", "-p", "13"]);
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["classes"].as_array().unwrap().len(), 1);
    assert_eq!(v["classes"][0]["w"], 1);
}

#[test]
fn invalid_level_is_usage_error() {
    let o = ssgraph(&["enumerate", "-p", "4"]);
    assert_eq!(code(&o), 2);
    assert!(String::from_utf8_lossy(&o.stderr).contains("p must be a prime ≥ 5"));
    assert_eq!(code(&ssgraph(&["enumerate", "-p", "91"])), 2);
    assert_eq!(code(&ssgraph(&["component", "-p", "11", "--ells", "11"])), 2);
    assert_eq!(code(&ssgraph(&["component", "-p", "11", "--ells", "5"])), 2);
    assert_eq!(code(&ssgraph(&["enumerate"])), 2);
}

#[test]
fn component_fixtures() {
    let o = ssgraph(&["--json", "component", "-p", "11"]);
    assert_eq!(code(&o), 0);
    assert_eq!(
        stdout(&o),
        "[{\"eigenvalues\":{\"2\":-2},\"lambda\":[1,-1],\"phi\":[5],\"psi\":5,\"coker\":1,\"degree\":1}]\n"
    );
    assert_eq!(stdout(&ssgraph(&["--json", "component", "-p", "13"])), "[]\n");
    let o = ssgraph(&["--json", "component", "-p", "23"]);
    assert_eq!(code(&o), 0);
    assert_eq!(stdout(&o), "[]\n{\"unsplit\":[2]}\n");
}

#[test]
fn other_subcommands() {
    let o = ssgraph(&["--json", "hecke", "-p", "11", "-l", "2"]);
    assert_eq!(stdout(&o), "{\"p\":11,\"l\":2,\"matrix\":[[0,3],[2,1]]}\n");
    let o = ssgraph(&["--json", "phi", "-p", "101"]);
    assert_eq!(stdout(&o), "{\"p\":101,\"phi\":[25],\"order\":25}\n");
    let o = ssgraph(&["--json", "eigenforms", "-p", "37", "--ells", "2,3"]);
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["eigenforms"].as_array().unwrap().len(), 2);
    assert_eq!(v["unsplit"], serde_json::json!([]));
}

#[test]
fn sweep_exit_codes() {
    let o = ssgraph(&["sweep", "--pmax", "7"]);
    assert_eq!(code(&o), 0);
    assert!(stdout(&o).contains("mass formula"));
    assert_eq!(code(&ssgraph(&["sweep", "--pmax", "4"])), 2);
    let o = ssgraph(&["sweep", "--pmin", "5", "--pmax", "199"]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
}

#[test]
fn sweep_names_failures() {
    let dir = tempfile::tempdir().unwrap();
    let phi3 = include_str!("../data/phi_3.txt").replace("[3,2] 2232", "[3,2] 2235");
    std::fs::write(dir.path().join("phi_3.txt"), phi3).unwrap();
    let o = ssgraph(&["--modpoly-dir", dir.path().to_str().unwrap(), "sweep", "--pmin", "97", "--pmax", "113"]);
    assert_eq!(code(&o), 3);
    assert!(String::from_utf8_lossy(&o.stderr).contains("FAILED p = "));
}

#[test]
fn cache_is_bit_identical() {
    let dir = tempfile::tempdir().unwrap();
    let cache = dir.path().to_str().unwrap();
    let fresh = ssgraph(&["--json", "component", "-p", "37", "--ells", "2,3"]);
    let first = ssgraph(&["--json", "--cache-dir", cache, "component", "-p", "37", "--ells", "2,3"]);
    let second = ssgraph(&["--json", "--cache-dir", cache, "component", "-p", "37", "--ells", "2,3"]);
    assert_eq!(fresh.stdout, first.stdout);
    assert_eq!(first.stdout, second.stdout);
    let entries: Vec<_> = std::fs::read_dir(dir.path()).unwrap().collect();
    assert_eq!(entries.len(), 1);
    let path = entries[0].as_ref().unwrap().path();
    let cached = std::fs::read_to_string(&path).unwrap();
    assert_eq!(cached, stdout(&ssgraph(&["--json", "enumerate", "-p", "37"])));

    std::fs::write(&path, cached.replace("\"w\":1", "\"w\":2")).unwrap();
    assert_eq!(code(&ssgraph(&["--cache-dir", cache, "enumerate", "-p", "37"])), 3);
}

#[test]
fn modpoly_dir_from_flag_and_env() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::write(dir.path().join("phi_2.txt"), include_str!("../data/phi_2.txt")).unwrap();
    let d = dir.path().to_str().unwrap();
    let base = stdout(&ssgraph(&["--json", "hecke", "-p", "47", "-l", "2"]));
    assert_eq!(stdout(&ssgraph(&["--modpoly-dir", d, "--json", "hecke", "-p", "47", "-l", "2"])), base);

    std::fs::write(dir.path().join("phi_2.txt"), "[3,0] 1\n[2,1] oops\n").unwrap();
    let o = Command::new(env!("CARGO_BIN_EXE_ssgraph"))
        .args(["hecke", "-p", "47", "-l", "2"])
        .env("SSGRAPH_MODPOLY_DIR", d)
        .output()
        .unwrap();
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("line 2"));
}
