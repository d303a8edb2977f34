use super::*;

#[test]
fn eleven_unique_cases() {
    let cases = builtin_configs();
    assert_eq!(cases.len(), 11);
    let mut names: Vec<_> = cases.iter().map(|c| c.name.clone()).collect();
    names.sort();
    names.dedup();
    assert_eq!(names.len(), 11);
}

#[test]
fn configs_round_trip() {
    for cfg in builtin_configs() {
        let case = Case::from_config(cfg.clone()).unwrap();
        let back = CaseConfig::from_json(&cfg.to_json()).unwrap();
        assert_eq!(back, cfg);
        assert_eq!(Case::from_config(back).unwrap(), case);
    }
}

#[test]
fn invalid_parameters_are_rejected() {
    let mut c = find_config("nsw").unwrap();
    c.params.insert("tau0".into(), "0".into());
    assert!(matches!(Case::from_config(c), Err(Error::Config(_))));
    let mut c = find_config("diffusion").unwrap();
    c.params.insert("D".into(), "-1/10".into());
    assert!(matches!(Case::from_config(c), Err(Error::Config(_))));
    assert_eq!(find_config("nope"), Err(Error::UnknownCase("nope".into())));
}

#[test]
fn checks_reference_declared_densities() {
    let mut c = find_config("airy").unwrap();
    c.densities.retain(|d| d != "mass");
    assert!(matches!(Case::from_config(c), Err(Error::Config(_))));
}

#[test]
fn merge_patch_overrides() {
    let c = find_config("telegraph").unwrap();
    let p = c.patched(&serde_json::json!({"params": {"d0": "1/3"}, "grid": {"n": 64}})).unwrap();
    assert_eq!(p.params["d0"], "1/3");
    assert_eq!(p.grid.n, 64);
    assert_eq!(p.grid.length, c.grid.length);
    assert!(c.patched(&serde_json::json!({"grid": {"n": "many"}})).is_err());
}

#[test]
fn nsw_derived_data_formula() {
    use crate::field::{apply_spatial, l2_distance};
    let case = Case::from_config(find_config("nsw").unwrap()).unwrap();
    let ics = crate::solver::ic_from_source(&case.operator, &case.source).unwrap();
    let all = checks::derived_initial_data(&case.operator, &ics, 6).unwrap();
    let lap = |f: &Field| apply_spatial(&DiffOp::laplacian(1), f).unwrap().to_physical();
    let (tau0, tau1) = (0.5, 0.25);
    for j in 3..6 {
        let want = all[j - 1]
            .scaled((-1.0).into())
            .add(&lap(&all[j - 3]))
            .unwrap()
            .add(&lap(&all[j - 2]).scaled(tau1.into()))
            .unwrap()
            .scaled((1.0 / tau0).into());
        let d = l2_distance(&all[j], &want).unwrap();
        assert!(d <= 1e-10 * crate::field::l2_norm(&want), "u{j}: {d}");
    }
    let direct = crate::solver::initial_derivatives(&case.operator, &case.source, 5).unwrap();
    for j in 0..6 {
        assert!(l2_distance(&all[j], &direct[j]).unwrap() <= 1e-9 * crate::field::l2_norm(&direct[j]).max(1.0));
    }
}
