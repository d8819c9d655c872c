//! Decoder fuzz: projectional-tree data JSON. Validation must reject
//! incomplete tables, and accepted data must round-trip and keep the
//! pairing sweep total.

#![no_main]

use libfuzzer_sys::fuzz_target;
use treelat::projtree::ProjTreeData;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else {
        return;
    };
    let Ok(d) = serde_json::from_str::<ProjTreeData>(text) else {
        return;
    };
    let encoded = serde_json::to_string(&d).expect("data serializes");
    let again: ProjTreeData = serde_json::from_str(&encoded).expect("emitted form re-parses");
    assert_eq!(again, d, "serialization round trip");

    if data.len() > 2048 {
        return;
    }
    let _ = d.norm_bound();
    let report = d.verify_biorthogonality();
    assert!(
        report.violations.len() <= report.pairs_checked,
        "violations are a subset of the checked pairs"
    );
});
