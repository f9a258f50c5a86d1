#![no_main]

use iontrap::config::parse_nbar_list;
use iontrap::heisenberg::{classicality, critical_q};
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else {
        return;
    };
    if let Ok(list) = parse_nbar_list(text) {
        assert!(!list.is_empty());
        for n in list {
            assert!(n.is_finite() && n >= 0.0);
            let qc = critical_q(n);
            assert!(qc >= 1.0);
            if n < 1e6 {
                assert!(classicality(n, qc).unwrap().abs() < 1e-9 * (1.0 + n));
            }
        }
    }
});
