//! Parser fuzz: ordinal text syntax. A successful parse must survive a
//! display round trip and keep basic arithmetic total.

#![no_main]

use libfuzzer_sys::fuzz_target;
use treelat::ordinal::Ordinal;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else {
        return;
    };
    let Ok(a) = text.parse::<Ordinal>() else {
        return;
    };
    let shown = a.to_string();
    let again: Ordinal = shown.parse().expect("printed form re-parses");
    assert_eq!(again, a, "display round trip");

    if data.len() > 4096 {
        return;
    }
    let _ = a.add(&a);
    let _ = a.nat_mul(3u32);
    assert!(a.add(&Ordinal::one()) > a, "strictly larger after +1");
    if !a.is_zero() {
        let _ = a.point_rank().expect("defined for nonzero ordinals");
        let _ = a.interval_form().expect("defined for nonzero ordinals");
    }
    if a.is_limit() {
        let below = a.fundamental_sequence(2).expect("defined for limits");
        assert!(below < a, "fundamental sequence stays below its limit");
    }
});
