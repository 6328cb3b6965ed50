use cqednet_cli::{sweep, Scenario};

const THERMAL: &str = r#"
engine = "two_node_mme"
outputs = ["cc", "qd", "eof"]
[time_grid]
t_max = 60.0
n_samples = 61
[params]
omega_0 = 0.9
omega_f = 1.0
g = 0.005
j = 0.005
gamma = 0.001
n_max = 1
temp = 1.0
[initial_state]
kind = "bare"
label = "gg000"
[detector]
measures = []
"#;

// Steady discord between the atoms driven only by equal-temperature baths:
// it grows from zero with T, peaks, then is washed out again.
#[test]
fn steady_discord_rises_then_falls_with_temperature() {
    let s = Scenario::from_toml_str(THERMAL, "thermal").unwrap();
    let dir = std::env::temp_dir().join(format!("cqednet-sweep-{}", std::process::id()));
    let temps = [0.1, 0.5, 1.2, 4.0];
    let points = sweep(&s, "temp", &temps, &dir).unwrap();
    let qd: Vec<f64> = points
        .iter()
        .map(|p| p.result.as_ref().unwrap().summary.get_f64("late.qd").unwrap())
        .collect();
    assert!(qd[0] < 1e-3, "{qd:?}");
    assert!(qd[0] < qd[1] && qd[1] < qd[2], "{qd:?}");
    assert!(qd[3] < 0.6 * qd[2], "{qd:?}");
    assert!(dir.join("sweep.csv").exists());
    std::fs::remove_dir_all(&dir).ok();
}

#[test]
fn temperature_forms_are_exclusive() {
    let text = THERMAL.replace("temp = 1.0", "temp = 1.0\ntemps = [1.0, 1.0, 1.0]");
    let s = Scenario::from_toml_str(&text, "thermal").unwrap();
    assert!(cqednet_cli::run_scenario(&s).is_err());
}
