use modschatten::bench::{
    build_cases, evaluate, replay, run_suite, sharpness_probe, ExperimentConfig, Measurement, Report, SUITES,
};
use modschatten::weights_lattices::Exponent;
use modschatten::Error;

fn e(p: f64) -> Exponent {
    Exponent::new(p).unwrap()
}

/// Every suite with instance counts cut down to a few cases.
fn small_config() -> ExperimentConfig {
    ExperimentConfig::from_toml_str(
        r#"
seed = 5
suites = ["all"]
[trials]
factorization = 12
hilbert_schmidt = 4
embedding = 3
embedding_probe = 2
continuity_matrices = 2
continuity_vectors = 3
reconstruction = 2
op_symbols = 2
op_functions = 2
identities = 2
convolution = 2
family = 2
[sizes]
gabor_n = [64]
stability_even = [32, 64]
stability_odd = [33, 63]
"#,
    )
    .unwrap()
}

#[test]
fn empty_suite_list_passes() {
    let out = run_suite(&ExperimentConfig::default()).unwrap();
    assert!(out.report.pass);
    assert!(out.report.records.is_empty());
    assert!(out.timing.is_empty());
}

#[test]
fn matrix_schatten_defaults() {
    let cfg = ExperimentConfig::from_toml_str("suites = [\"matrix-schatten\"]").unwrap();
    assert_eq!(cfg.seed, 1);
    let r = run_suite(&cfg).unwrap().report;
    assert!(r.pass, "{:#?}", r.aggregates);
    assert!(r.records.len() >= 1000);
}

#[test]
fn config_errors_name_the_field() {
    let field = |text: &str| match ExperimentConfig::from_toml_str(text) {
        Err(Error::Config { field, .. }) => field,
        other => panic!("expected a config error, got {other:?}"),
    };
    assert_eq!(field("seed = ["), "<file>");
    assert_eq!(field("[sizes]\ngabor_n = []\n"), "sizes.gabor_n");
    assert_eq!(field("[sizes]\ninvolution_n = 64\n"), "sizes.involution_n");
    assert_eq!(field("[trials]\nwhatever = 3\n"), "trials.whatever");
    assert_eq!(field("[tolerances]\nrank_one = 1e-20\n"), "tolerances.rank_one");
    assert_eq!(field("[tolerances]\nstability_factor = 8.0\n"), "tolerances.stability_factor");
    assert!(matches!(
        ExperimentConfig::from_toml_str("suites = [\"factorisation\"]"),
        Err(Error::UnknownSuite(s)) if s == "factorisation"
    ));
}

#[test]
fn every_suite_builds_and_evaluates() {
    let cfg = small_config();
    assert_eq!(cfg.suites.len(), SUITES.len());
    for suite in &cfg.suites {
        let cases = build_cases(suite, &cfg).unwrap();
        assert!(!cases.is_empty(), "{suite}");
        let ms: Vec<Measurement> = evaluate(&cases[0]).unwrap();
        assert!(!ms.is_empty(), "{suite}");
    }
}

#[test]
fn small_run_is_deterministic_and_replays() {
    let cfg = small_config();
    let a = run_suite(&cfg).unwrap().report;
    let b = run_suite(&cfg).unwrap().report;
    assert!(a.pass, "{:#?}\n{:#?}", a.aggregates, a.errors);
    assert_eq!(a.records_csv(), b.records_csv());
    assert_eq!(a.to_json(), b.to_json());

    let back = Report::from_json(&a.to_json()).unwrap();
    assert_eq!(back, a);
    let o = replay(&back).unwrap();
    assert_eq!(o.records, a.records.len());
    assert!(o.mismatches.is_empty(), "{:?}", o.mismatches);

    let mut seeds = small_config();
    seeds.seed = 6;
    let c = run_suite(&seeds).unwrap().report;
    assert_ne!(c.records_csv(), a.records_csv());
}

#[test]
fn replay_detects_tampering() {
    let cfg = ExperimentConfig::from_toml_str("suites = [\"factorization\"]\n[trials]\nfactorization = 3\n").unwrap();
    let mut r = run_suite(&cfg).unwrap().report;
    let lhs = &mut r.records[0].measurement.lhs;
    *lhs = f64::from_bits(lhs.to_bits() + 1);
    let o = replay(&r).unwrap();
    assert_eq!(o.mismatches, vec![r.records[0].digest.clone()]);
}

#[test]
fn records_are_sorted_and_tagged() {
    let cfg = ExperimentConfig::from_toml_str("suites = [\"gabor-reconstruction\"]\n[trials]\nreconstruction = 3\n").unwrap();
    let r = run_suite(&cfg).unwrap().report;
    assert!(r.records.windows(2).all(|w| w[0].digest < w[1].digest));
    assert!(r.records.iter().all(|x| !x.measurement.check.is_empty() && !x.measurement.relation.is_empty()));
    let csv = r.records_csv();
    assert!(csv.starts_with("# modschatten records schema=1 seed=1\n"));
    assert_eq!(csv.lines().count(), r.records.len() + 2);
}

#[test]
fn report_rejects_other_schemas() {
    let cfg = ExperimentConfig::from_toml_str("suites = [\"factorization\"]\n[trials]\nfactorization = 1\n").unwrap();
    let json = run_suite(&cfg).unwrap().report.to_json().replace("\"schema_version\": 1", "\"schema_version\": 99");
    assert!(Report::from_json(&json).is_err());
}

#[test]
fn sharpness_probe_grows() {
    let t = sharpness_probe(e(2.0), e(2.0), e(1.0), &[16, 32, 64], 64, false).unwrap();
    assert_eq!(t.rows.len(), 3);
    for w in t.rows.windows(2) {
        assert!(w[1].schatten_r >= w[0].schatten_r, "{:?}", t.rows);
        assert!(w[1].coeff_r > w[0].coeff_r);
    }
    let csv = t.to_csv();
    assert!(csv.starts_with("terms,coeff_q,coeff_r,symbol_norm,schatten_r\n"));

    let control = sharpness_probe(e(2.0), e(2.0), e(1.0), &[16, 32, 64], 64, true).unwrap();
    let first = control.rows[0].schatten_r;
    assert!(control.rows.iter().all(|r| r.schatten_r <= 2.0 * first), "{:?}", control.rows);

    assert!(sharpness_probe(e(2.0), e(1.0), e(1.0), &[4], 64, false).is_err());
    assert!(sharpness_probe(e(2.0), e(2.0), e(1.0), &[0], 64, false).is_err());
    assert!(sharpness_probe(e(2.0), e(2.0), e(1.0), &[4], 30, false).is_err());
}
