use invarprob::scenario::{bundled, run_scenario, RunOptions, Scenario, ScenarioError, BUNDLED};
use invarprob::{run_table, Status};

#[test]
fn every_bundled_scenario_meets_its_expectations() {
    for (name, _) in BUNDLED {
        let sc = bundled(name).unwrap().unwrap();
        assert!(!sc.expected.is_empty(), "{name} expects nothing");
        let rep = run_scenario(&sc, RunOptions::default());
        for o in &rep.outcomes {
            assert_ne!(o.matched, Some(false), "{name}/{}:\n{}", o.id, rep.to_text());
        }
        assert!(!rep.failed(false), "{name}:\n{}", rep.to_text());
    }
}

#[test]
fn seeds_do_not_change_exact_results() {
    let sc = bundled("finite-space").unwrap().unwrap();
    let a = run_scenario(&sc, RunOptions { seed: 1, ..Default::default() });
    let b = run_scenario(&sc, RunOptions { seed: 99, ..Default::default() });
    for (x, y) in a.outcomes.iter().zip(&b.outcomes) {
        assert_eq!(x.values, y.values, "{}", x.id);
    }
}

#[test]
fn rejects_unknown_checks_and_fields() {
    let bad_op = r#"{"name":"x","space":{"omega_star":"Z","omega":"all"},"checks":[{"id":"a","op":"nope"}]}"#;
    assert!(matches!(Scenario::from_json(bad_op), Err(ScenarioError::UnknownCheck(_))));
    let bad_field = r#"{"name":"x","space":{"omega_star":"Z","omega":"all"},"checks":[],"extra":1}"#;
    assert!(Scenario::from_json(bad_field).is_err());
    let bad_word = r#"{"name":"x","space":{"omega_star":"Z","omega":"all"},"generators":["shift:1"],
        "checks":[{"id":"a","op":"orbit","params":{"point":"bits:[0]","moves":["g1"]}}]}"#;
    assert!(Scenario::from_json(bad_word).is_err());
    let dup = r#"{"name":"x","space":{"omega_star":"Z","omega":"all"},"checks":[
        {"id":"a","op":"gamma","params":{"a":"finite:[1]","b":"finite:[1]"}},
        {"id":"a","op":"gamma","params":{"a":"finite:[1]","b":"finite:[1]"}}]}"#;
    assert!(Scenario::from_json(dup).is_err());
}

#[test]
fn budget_exhaustion_is_undetermined_not_a_failure() {
    let sc = Scenario::from_json(
        r#"{"name":"x","space":{"omega_star":"Z","omega":"all"},"generators":["translate:1"],
        "checks":[{"id":"lf","op":"localfinite","params":{"points":["0"]}}]}"#,
    )
    .unwrap();
    let rep = run_scenario(&sc, RunOptions { seed: 0, budget: 20 });
    assert_eq!(rep.outcomes[0].status, Status::Undetermined);
    assert!(!rep.failed(false));
    assert!(rep.failed(true));
}

#[test]
fn table_cells_are_confirmed_or_cited() {
    let t = run_table(RunOptions::default());
    assert!(!t.failed(false), "{}", t.to_text());
    assert_eq!(t.rows.len(), 15);
    assert!(t.cells().all(|c| c.confirmed()));
}
