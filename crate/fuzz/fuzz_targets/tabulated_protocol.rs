#![no_main]

use iontrap::model::{Interpolation, TabulatedProtocol};
use iontrap::{Error, FrequencyProtocol};
use libfuzzer_sys::fuzz_target;

// Input: one mode byte, then little-endian (tau, w^2) f64 pairs.
fuzz_target!(|data: &[u8]| {
    let Some((&mode, rest)) = data.split_first() else {
        return;
    };
    let interpolation = if mode & 1 == 0 {
        Interpolation::MonotoneCubic
    } else {
        Interpolation::Linear
    };
    let floats: Vec<f64> = rest
        .chunks_exact(8)
        .map(|c| f64::from_le_bytes(c.try_into().unwrap()))
        .collect();
    let taus: Vec<f64> = floats.iter().step_by(2).copied().collect();
    let values: Vec<f64> = floats.iter().skip(1).step_by(2).copied().collect();
    let n = taus.len().min(values.len());
    let Ok(table) = TabulatedProtocol::new(taus[..n].to_vec(), values[..n].to_vec(), interpolation) else {
        return;
    };
    let (start, end) = (table.start(), table.end());
    let p = FrequencyProtocol::Tabulated(table);
    for k in 0..=16 {
        let tau = start + (end - start) * k as f64 / 16.0;
        if !(tau >= start && tau <= end) {
            continue;
        }
        // inside the table the only admissible failure is a non-positive value
        match p.omega_squared(tau) {
            Ok(w2) => assert!(w2 > 0.0),
            Err(Error::NonPositiveFrequency { .. }) => {}
            Err(e) => panic!("unexpected error inside the table at {tau}: {e}"),
        }
    }
    assert!(matches!(p.omega_squared(end + (end - start).abs() + 1.0), Err(_)));
});
