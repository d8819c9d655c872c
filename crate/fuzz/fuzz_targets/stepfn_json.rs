//! Decoder fuzz: binary step-function JSON. Canonical form must be
//! stable under round trips, and the embedding inverse must be exact.

#![no_main]

use libfuzzer_sys::fuzz_target;
use treelat::cantor::{embed, inverse_embed, StepFunction};

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else {
        return;
    };
    let Ok(f) = serde_json::from_str::<StepFunction>(text) else {
        return;
    };
    let encoded = serde_json::to_string(&f).expect("step functions serialize");
    let again: StepFunction = serde_json::from_str(&encoded).expect("emitted form re-parses");
    assert_eq!(again, f, "serialization round trip");

    if data.len() > 2048 {
        return;
    }
    let norm = f.sup_norm();
    assert!(f.pos_part().sup_norm() <= norm, "positive part is dominated");
    let a = inverse_embed(&f).expect("every step function has a preimage");
    let back = embed(&a).expect("full dyadic elements embed");
    assert_eq!(back, f, "embedding round trip");
    assert_eq!(a.lambda_norm(), norm, "the embedding is isometric");
});
