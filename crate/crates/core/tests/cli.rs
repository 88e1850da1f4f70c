use std::process::{Command, Output};

fn qeuler(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_qeuler")).args(args).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn json_lines(o: &Output) -> Vec<serde_json::Value> {
    stdout(o).lines().map(|l| serde_json::from_str(l).unwrap()).collect()
}

fn values(o: &Output) -> Vec<String> {
    json_lines(o).iter().map(|v| v["value"].as_str().unwrap().to_string()).collect()
}

#[test]
fn numbers_at_q_one_are_the_classical_values() {
    let o = qeuler(&["numbers", "--q", "1", "--n-max", "5", "--format", "json"]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(values(&o), ["1", "-1/2", "0", "1/4", "0", "-1/2"]);
}

#[test]
fn numbers_at_q_four() {
    let o = qeuler(&["numbers", "--q", "4", "--n-max", "2", "--format", "json"]);
    assert_eq!(values(&o), ["5/2", "-1/2", "3/34"]);
    let o = qeuler(&["numbers", "--n-max", "0", "--q", "7", "--format", "json"]);
    assert_eq!(values(&o), ["4"]);
}

#[test]
fn numbers_with_valuations() {
    let o = qeuler(&["numbers", "--q", "4", "--n-max", "2", "--p", "3", "--format", "csv"]);
    assert_eq!(stdout(&o), "n,value,v_p\n0,5/2,0\n1,-1/2,0\n2,3/34,1\n");
}

#[test]
fn numbers_reject_minus_one() {
    assert_eq!(qeuler(&["numbers", "--q", "-1", "--n-max", "3"]).status.code(), Some(2));
}

#[test]
fn theorem1_range_passes() {
    let o = qeuler(&["verify", "theorem1", "--p", "3", "--q", "4", "--n-max", "30", "--format", "json"]);
    assert_eq!(o.status.code(), Some(0));
    let reports = json_lines(&o);
    assert_eq!(reports.len(), 31);
    assert!(reports.iter().all(|r| r["verdict"] == "PASS"));
}

#[test]
fn q_outside_the_disc_is_a_usage_error() {
    let o = qeuler(&["verify", "theorem1", "--p", "3", "--q", "5"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("disc"));
}

#[test]
fn kummer_with_default_k_prime() {
    let o = qeuler(&["verify", "kummer", "--p", "3", "--q", "4", "--chi", "1:0", "--k", "1", "--n", "1", "--format", "json"]);
    assert_eq!(o.status.code(), Some(0));
    let r = &json_lines(&o)[0];
    assert_eq!(r["params"]["k_prime"], "7");
    assert_eq!(r["verdict"], "PASS");
}

#[test]
fn kummer_with_incongruent_exponents_is_a_usage_error() {
    let o = qeuler(&["verify", "kummer", "--p", "3", "--q", "4", "--k", "1", "--k-prime", "2"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn lvalue_at_zero_vanishes() {
    let o = qeuler(&["lvalue", "--s", "0", "--chi", "1:0", "--p", "3", "--q", "4", "--format", "json"]);
    assert_eq!(o.status.code(), Some(0));
    let v = &json_lines(&o)[0];
    assert_eq!(v["certified"], true);
    assert_eq!(v["closed_form"], "0");
    assert_eq!(v["value"]["unit"], "0");
}

#[test]
fn lvalue_at_minus_one_matches_closed_form() {
    let o = qeuler(&["lvalue", "--s", "-1", "--chi", "1:0", "--p", "3", "--q", "4", "--format", "json"]);
    assert_eq!(o.status.code(), Some(0));
    let v = &json_lines(&o)[0];
    assert_eq!(v["closed_form"], "8/65");
    assert_eq!(v["chi"], "3:1");
    let prec: u32 = v["value"]["prec"].as_str().unwrap().parse().unwrap();
    assert!(prec >= 3);
    // 8/65 mod 3^prec
    let m = 3u64.pow(prec);
    let inv65 = (1..m).find(|x| x * 65 % m == 1).unwrap();
    assert_eq!(v["value"]["unit"].as_str().unwrap(), (8 * inv65 % m).to_string());
}

#[test]
fn lvalue_with_unembeddable_character_is_a_usage_error() {
    let o = qeuler(&["lvalue", "--s", "0", "--chi", "5:1", "--p", "3", "--q", "4"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn lvalue_uncertified_exits_three() {
    let args = ["lvalue", "--s", "-1", "--p", "3", "--q", "4", "--rho-max", "2"];
    let o = qeuler(&args);
    assert_eq!(o.status.code(), Some(3));
    let mut relaxed = args.to_vec();
    relaxed.push("--allow-uncertified");
    assert_eq!(qeuler(&relaxed).status.code(), Some(0));
    assert_eq!(qeuler(&["lvalue", "--s", "-1", "--p", "3", "--q", "4", "--rho-max", "1"]).status.code(), Some(2));
}

#[test]
fn chars_lists_the_group() {
    let o = qeuler(&["chars", "--d", "5", "--format", "csv"]);
    assert_eq!(
        stdout(&o),
        "id,modulus,order,conductor,parity,primitive\n5:0,5,1,1,1,false\n5:1,5,4,5,-1,true\n5:2,5,2,5,1,true\n5:3,5,4,5,-1,true\n"
    );
    assert_eq!(qeuler(&["chars", "--d", "4"]).status.code(), Some(2));
}

#[test]
fn json_output_is_byte_identical_across_runs() {
    let args = ["verify", "stability", "--p", "3", "--q", "4", "--n-max", "4", "--format", "json"];
    let a = qeuler(&args);
    let b = qeuler(&args);
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(a.stdout, b.stdout);
}

#[test]
fn out_writes_to_a_file() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("e.csv");
    let o = qeuler(&["numbers", "--q", "1", "--n-max", "2", "--format", "csv", "--out", path.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    assert!(o.stdout.is_empty());
    assert_eq!(std::fs::read_to_string(path).unwrap(), "n,value\n0,1\n1,-1/2\n2,0\n");
}

#[test]
fn bad_arguments_exit_two() {
    assert_eq!(qeuler(&["frobnicate"]).status.code(), Some(2));
    assert_eq!(qeuler(&["numbers", "--q", "x"]).status.code(), Some(2));
    assert_eq!(qeuler(&["lvalue", "--s", "0", "--chi", "7", "--p", "3", "--q", "4"]).status.code(), Some(2));
    assert_eq!(qeuler(&["--help"]).status.code(), Some(0));
}
