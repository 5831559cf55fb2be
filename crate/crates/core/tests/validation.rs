use cs_minimax::validation::{criteria, run_criterion, run_validation, ValidationOptions};

#[test]
fn biased_risk_is_caught() {
    let opts = ValidationOptions { mse0_bias: 1.1, ..Default::default() };
    let reports = run_validation(&["A1".to_string(), "A5".to_string()], &opts).unwrap();
    assert_eq!(reports.len(), 2);
    for r in &reports {
        assert!(!r.passed_except_known(), "{r}");
    }
}

#[test]
fn subset_runs_only_named_criteria() {
    let reports = run_validation(&["A3".to_string()], &ValidationOptions::default()).unwrap();
    assert_eq!(reports.len(), 1);
    assert_eq!(reports[0].id, "A3");
    assert!(reports[0].passed(), "{}", reports[0]);
    assert!(run_validation(&["A11".to_string()], &ValidationOptions::default()).is_err());
    assert!(run_criterion("nope", &ValidationOptions::default()).is_err());
}

#[test]
fn criteria_are_listed_in_order() {
    let ids: Vec<&str> = criteria().iter().map(|c| c.0).collect();
    let expect: Vec<String> = (1..=10).map(|k| format!("A{k}")).collect();
    assert_eq!(ids, expect);
}
