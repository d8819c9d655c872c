//! Decoder fuzz: ordinal step-function JSON. Partitions must stay
//! contiguous and merged after a round trip, and evaluation total on
//! the declared domain.

#![no_main]

use libfuzzer_sys::fuzz_target;
use num_traits::Signed;
use treelat::ordfun::OrdStepFunction;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else {
        return;
    };
    let Ok(f) = serde_json::from_str::<OrdStepFunction>(text) else {
        return;
    };
    let encoded = serde_json::to_string(&f).expect("ordinal step functions serialize");
    let again: OrdStepFunction =
        serde_json::from_str(&encoded).expect("emitted form re-parses");
    assert_eq!(again, f, "serialization round trip");

    if data.len() > 2048 {
        return;
    }
    let norm = f.sup_norm();
    assert!(!norm.is_negative(), "norms are nonnegative");
    assert!(f.pos_part().sup_norm() <= norm, "positive part is dominated");
    for (_, hi, value) in f.pieces() {
        let v = f.eval(hi).expect("piece endpoints are in the domain");
        assert_eq!(&v, value, "evaluation matches the piece table");
        assert!(v.abs() <= norm, "no value exceeds the supremum");
    }
});
