use opinv_core::C64;
use opinv_core::harness::*;

fn cfg() -> RunConfig {
    RunConfig::default()
}

fn check<'a>(r: &'a Report, name: &str) -> &'a CheckRecord {
    r.checks.iter().find(|c| c.check_name == name).unwrap_or_else(|| panic!("no check {name}"))
}

#[test]
fn reports_are_byte_identical_across_runs() {
    let mut c = cfg();
    c.input = InputSeries::Random { scale: 1.0 };
    for cmd in [Command::VerifyPair, Command::Roundtrip, Command::RemarkCheck] {
        let a = run_command(cmd, &c).unwrap().to_json();
        let b = run_command(cmd, &c).unwrap().to_json();
        assert_eq!(a, b, "{}", cmd.name());
    }
}

#[test]
fn config_parsing_and_validation() {
    let c = RunConfig::from_json(r#"{"x": [0.3, 0.1], "nu": [-1.5, 0.0], "truncation_n": 10}"#).unwrap();
    assert_eq!(c.x, C64::new(0.3, 0.1));
    assert_eq!(c.truncation_n, 10);
    assert_eq!(c.seed, cfg().seed);
    assert!(RunConfig::from_json(r#"{"x": [0.3, 0.1], "bogus": 1}"#).is_err());
    assert!(RunConfig::from_json(r#"{"x": 0.3}"#).is_err());
    let bad = [
        r#"{"truncation_n": 0}"#,
        r#"{"contour_c0": 1.0}"#,
        r#"{"input": {"kind": "monomial", "power": 0}}"#,
        r#"{"input": {"kind": "coefficients", "coeffs": []}}"#,
    ];
    for text in bad {
        assert!(RunConfig::from_json(text).unwrap().validate().is_err(), "{text}");
    }
    let text = serde_json::to_string(&cfg()).unwrap();
    assert_eq!(RunConfig::from_json(&text).unwrap(), cfg());
}

#[test]
fn verify_pair_examples() {
    let mut c = cfg();
    c.x = C64::new(0.3, 0.1);
    c.nu = C64::new(-1.5, 0.0);
    c.truncation_n = 10;
    let r = cmd_verify_pair(&c).unwrap();
    assert!(r.all_pass, "{}", r.to_json());
    assert!(check(&r, "pair.ba_identity").max_residual < 1e-10);

    c.truncation_n = 1;
    let r = cmd_verify_pair(&c).unwrap();
    assert_eq!(check(&r, "pair.ba_identity").max_residual, 0.0);

    // ν = 0 is admissible for the matrix pair
    c.truncation_n = 8;
    c.nu = C64::new(0.0, 0.0);
    assert!(cmd_verify_pair(&c).unwrap().all_pass);
}

#[test]
fn roundtrip_default_and_zero_input() {
    let r = cmd_roundtrip(&cfg()).unwrap();
    assert!(r.all_pass, "{}", r.to_json());
    let mut c = cfg();
    c.input = InputSeries::Zero;
    let r = cmd_roundtrip(&c).unwrap();
    assert!(r.all_pass);
    // the branch-tracker check does not depend on the input
    for ch in r.checks.iter().filter(|ch| !ch.check_name.starts_with("branch.")) {
        assert!(ch.max_residual < 1e-12, "{}: {}", ch.check_name, ch.max_residual);
    }
}

#[test]
fn roundtrip_rejects_nonnegative_nu() {
    let mut c = cfg();
    c.nu = C64::new(0.5, 0.0);
    assert!(cmd_roundtrip(&c).is_err());
    assert!(cmd_volterra(&c).is_err());
    // `all` records the failures instead of aborting
    let r = cmd_all(&c).unwrap();
    assert!(!r.all_pass);
    assert!(r.checks.iter().any(|ch| ch.check_name == "roundtrip.setup" && ch.error.is_some()));
}

#[test]
fn volterra_default_passes() {
    let r = cmd_volterra(&cfg()).unwrap();
    assert!(r.all_pass, "{}", r.to_json());
}

#[test]
fn remark_check_separates_stated_and_corrected_forms() {
    let r = cmd_remark_check(&cfg()).unwrap();
    assert!(!r.all_pass);
    assert!(!check(&r, "remark.as_stated").pass);
    assert!(check(&r, "remark.corrected").pass);
    assert!(check(&r, "remark.triangular_system").pass);
}

#[test]
fn pass_flag_is_max_below_tolerance() {
    let mut c = cfg();
    c.input = InputSeries::Random { scale: 0.5 };
    let r = cmd_all(&c).unwrap();
    for ch in &r.checks {
        let max = ch.samples.iter().map(|s| s.residual).fold(0.0, f64::max);
        if ch.error.is_none() {
            assert_eq!(ch.max_residual, max, "{}", ch.check_name);
            assert_eq!(ch.pass, max < ch.tolerance, "{}", ch.check_name);
        } else {
            assert!(!ch.pass);
        }
    }
    assert_eq!(r.all_pass, r.checks.iter().all(|ch| ch.pass));
    let names: Vec<&str> = r.checks.iter().map(|ch| ch.check_name.as_str()).collect();
    let mut sorted = names.clone();
    sorted.sort();
    assert_eq!(names, sorted);
}
