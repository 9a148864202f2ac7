//! Fixtures shared by the benchmarks in `benches/`.

use ternega::{LinearCode, NegaPair};

/// First code of the bundled length-40 list.
pub fn length40_code() -> LinearCode {
    NegaPair::from_trits(&[0, 0, 0, 0, 1, 1, 1, 1, 1, 0], &[1, 1, 2, 1, 0, 0, 1, 0, 1, 0])
        .expect("valid rows")
        .code()
}

/// An extremal self-dual code of length 24.
pub fn length24_code() -> LinearCode {
    let spec = ternega::SearchSpec::new(24).expect("valid length");
    let result = ternega::classify_length(&spec, &Default::default())
        .expect("search runs")
        .expect("runs to completion");
    result.representatives[0].pair.code()
}
