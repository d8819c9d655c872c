//! Decoder fuzz for the small wire types: tree schemas, nodes, trunks,
//! regions, and extractions. Each accepted value must survive a
//! serialization round trip; trunks must come back downward closed.

#![no_main]

use libfuzzer_sys::fuzz_target;
use treelat::holfin::Extraction;
use treelat::trees::{Node, TreeSchema, Trunk};
use treelat::treespace::Region;

fn round_trip<T>(text: &str)
where
    T: serde::de::DeserializeOwned + serde::Serialize + PartialEq + std::fmt::Debug,
{
    let Ok(value) = serde_json::from_str::<T>(text) else {
        return;
    };
    let encoded = serde_json::to_string(&value).expect("wire values serialize");
    let again: T = serde_json::from_str(&encoded).expect("emitted form re-parses");
    assert_eq!(again, value, "serialization round trip");
}

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else {
        return;
    };
    round_trip::<TreeSchema>(text);
    round_trip::<Node>(text);
    round_trip::<Region>(text);
    round_trip::<Extraction>(text);

    if let Ok(trunk) = serde_json::from_str::<Trunk>(text) {
        for node in trunk.iter() {
            for prefix in node.prefixes() {
                assert!(trunk.contains(&prefix), "trunks are downward closed");
            }
        }
        round_trip::<Trunk>(text);
    }
});
