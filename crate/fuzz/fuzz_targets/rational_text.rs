//! Parser fuzz: `p/q` rational syntax round-trips exactly.

#![no_main]

use libfuzzer_sys::fuzz_target;
use treelat::rat;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else {
        return;
    };
    let Ok(q) = rat::parse_rational(text) else {
        return;
    };
    let shown = rat::format_rational(&q);
    let again = rat::parse_rational(&shown).expect("printed form re-parses");
    assert_eq!(again, q, "format round trip");
});
