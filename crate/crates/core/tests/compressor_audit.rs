use ncd_core::audit::{audit, compressor_audit, short_corpus, verify_witness, AuditOptions, Axiom};
use ncd_core::{CompressorHandle, LengthCache, MetricKind, MetricSpec};

#[test]
fn gzip_violates_every_axiom_and_witnesses_recheck() {
    let report = compressor_audit(CompressorHandle::gzip(), &LengthCache::new()).unwrap();
    assert!(report.violates_every_axiom());
    for axiom in Axiom::ALL {
        let r = report.report(axiom);
        assert!(!r.witnesses.is_empty());
        for w in &r.witnesses {
            assert!(
                verify_witness(axiom, w, &report.metric, report.tolerance).unwrap(),
                "{axiom} {:?}",
                w.inputs
            );
        }
    }
}

#[test]
fn gzip_sign_patterns() {
    let report = compressor_audit(CompressorHandle::gzip(), &LengthCache::new()).unwrap();
    let neg = report.report(Axiom::NonNegativity);
    assert!(neg.witnesses.iter().all(|w| w.values[0] < 0.0));
    let zero = report.report(Axiom::Zero);
    assert!(zero
        .witnesses
        .iter()
        .any(|w| w.inputs[0] == w.inputs[1] && w.values[0] > 0.0));
}

#[test]
fn levenshtein_is_a_metric_on_the_corpus() {
    let corpus = short_corpus(60);
    let report = audit(
        &corpus,
        &MetricSpec::new(MetricKind::Levenshtein),
        AuditOptions::default(),
        &LengthCache::new(),
    )
    .unwrap();
    assert_eq!(report.total_violations(), 0);
}
