#![no_main]

use iontrap::config::Config;
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else {
        return;
    };
    let Ok(cfg) = Config::from_toml_str(text) else {
        return;
    };
    // anything accepted must describe a usable run
    assert!(cfg.simulation.tau_end > 0.0 && cfg.simulation.samples >= 2);
    assert!(cfg.thermal.nbar >= 0.0 && cfg.thermal.omega0 == 1.0);
    if let Some(p) = &cfg.protocol {
        if let Ok(w2) = p.omega_squared(0.0) {
            assert!(w2 > 0.0);
        }
    }
});
