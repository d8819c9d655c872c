//! Decoder fuzz: element JSON. Decoded values must round-trip through
//! serialization and keep the norm inequalities exact.

#![no_main]

use libfuzzer_sys::fuzz_target;
use treelat::treespace::Element;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else {
        return;
    };
    let Ok(a) = serde_json::from_str::<Element>(text) else {
        return;
    };
    let encoded = serde_json::to_string(&a).expect("elements serialize");
    let again: Element = serde_json::from_str(&encoded).expect("emitted form re-parses");
    assert_eq!(again, a, "serialization round trip");

    if data.len() > 2048 {
        return;
    }
    let norm = a.lambda_norm();
    let pos = a.pos_part_norm();
    assert!(pos <= norm, "positive-part norm is dominated");
    assert_eq!(a.pos_part().lambda_norm(), pos, "two routes to the same norm");
    assert_eq!(a.abs_val().lambda_norm(), norm, "modulus preserves the norm");
});
