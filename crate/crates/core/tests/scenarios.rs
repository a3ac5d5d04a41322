use cavent::experiments::{list_scenarios, render_scenario, scenario};

/// Small grids and horizons keep every scenario cheap.
const QUICK: &[&str] = &[
    "r_step=0.25",
    "d_step=0.05",
    "t_max=5",
    "sample_count=11",
    "ratios=1,0.5",
    "drives=0.05",
];

#[test]
fn every_scenario_renders_its_declared_schema() {
    let overrides: Vec<String> = QUICK.iter().map(|s| s.to_string()).collect();
    for (name, _) in list_scenarios() {
        let info = scenario(name).unwrap();
        let files = render_scenario(name, &overrides, Some(2)).unwrap();
        assert_eq!(files.len(), info.outputs.len(), "{name}");
        for ((file, text), (stem, columns)) in files.iter().zip(info.outputs) {
            assert_eq!(file, &format!("{stem}.csv"));
            assert!(text.starts_with("# cavent "), "{name}");
            assert!(text.contains(&format!("# scenario={name}\n")));
            let header = text.lines().find(|l| !l.starts_with('#')).unwrap();
            assert_eq!(header, columns.join(","), "{name}");
            let rows = text.lines().filter(|l| !l.starts_with('#')).skip(1).count();
            assert!(rows > 0, "{name} produced no rows");
            assert!(!text.contains("\r\n"));
            assert!(!text.contains("inf"), "{name}");
        }
    }
}

#[test]
fn unknown_scenario_is_rejected() {
    assert!(scenario("nope").is_err());
    assert!(render_scenario("nope", &[], None).is_err());
}
