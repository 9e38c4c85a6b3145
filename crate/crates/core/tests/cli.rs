use std::fs;
use std::process::{Command, Output};

fn nhqfi(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_nhqfi"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).unwrap()
}

#[test]
fn validate_exits_zero() {
    let out = nhqfi(&["validate"]);
    assert_eq!(out.status.code(), Some(0));
    assert!(stdout(&out).contains("all checks passed"));
}

#[test]
fn spec_errors_exit_two() {
    for args in [
        &["sweep", "--theta-max", "1"][..],
        &["sweep", "--preset", "nope"],
        &["sweep", "--preset", "fig1a", "--theta-steps", "1"],
        &["sweep", "--preset", "fig1a", "--quantity", "entropy"],
        &["channel-qfi", "--s", "1"],
        &["regime", "--r", "1", "--s", "-1"],
    ] {
        assert_eq!(nhqfi(args).status.code(), Some(2), "{args:?}");
    }
}

#[test]
fn csv_shape_and_gaps() {
    let out = nhqfi(&["sweep", "--preset", "fig6a", "--theta-steps", "5"]);
    assert_eq!(out.status.code(), Some(0));
    let text = stdout(&out);
    let lines: Vec<_> = text.lines().collect();
    assert_eq!(lines[0], "theta,expectation,slope,status");
    assert_eq!(lines.len(), 6);

    let at_ep = stdout(&nhqfi(&[
        "sweep",
        "--preset",
        "fig6a",
        "--s",
        "2",
        "--theta-steps",
        "3",
    ]));
    assert!(at_ep.lines().skip(1).all(|l| l.contains("NA")), "{at_ep}");
}

#[test]
fn flags_override_config_and_preset() {
    let dir = std::env::temp_dir().join(format!("nhqfi-cli-{}", std::process::id()));
    fs::create_dir_all(&dir).unwrap();
    let config = dir.join("sweep.toml");
    fs::write(
        &config,
        "r = 1.0\ns = 0.25\nm = -1.0\ntheta_max = 2.0\nsteps = 3\n",
    )
    .unwrap();
    let cfg = config.to_str().unwrap();

    let from_file = stdout(&nhqfi(&["sweep", "--preset", "fig1a", "--config", cfg]));
    assert_eq!(from_file.lines().nth(1).unwrap(), "0,6.25,ok");
    assert_eq!(
        from_file.lines().last().unwrap().split(',').next(),
        Some("2")
    );

    let flagged = stdout(&nhqfi(&[
        "sweep",
        "--preset",
        "fig1a",
        "--config",
        cfg,
        "--m",
        "1",
        "--theta-max",
        "4",
    ]));
    assert_eq!(flagged.lines().nth(1).unwrap(), "0,2.25,ok");
    assert_eq!(flagged.lines().last().unwrap().split(',').next(), Some("4"));

    let out_path = dir.join("out.json");
    let out = nhqfi(&[
        "sweep",
        "--preset",
        "fig2b",
        "--format",
        "json",
        "--out",
        out_path.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0));
    let json: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(&out_path).unwrap()).unwrap();
    assert_eq!(json["records"].as_array().unwrap().len(), 101);
    assert!(json["metadata"]["columns"].is_array());
    fs::remove_dir_all(&dir).unwrap();
}

#[test]
fn regime_and_channel_reports() {
    let regime = stdout(&nhqfi(&["regime", "--r", "2", "--s", "2"]));
    assert!(regime.contains("regime,exceptional-point"));
    let broken = stdout(&nhqfi(&[
        "regime", "--r", "1", "--s", "0.25", "--format", "json",
    ]));
    let json: serde_json::Value = serde_json::from_str(&broken).unwrap();
    assert_eq!(json["regime"], "broken");
    assert_eq!(
        json["overlap"].as_str().map(|s| s.starts_with("0.25")),
        Some(true)
    );

    let channel = stdout(&nhqfi(&["channel-qfi", "--r", "0.25", "--s", "1"]));
    assert!(channel.contains("closed_form,6.25\n"));
    assert!(channel.contains("numeric,6.25"));
}
