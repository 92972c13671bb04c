//! The three reference loops used throughout the test suite and by
//! `waterbed verify-paper`.

use num_complex::Complex64;

use crate::lti::RationalSystem;
use crate::mimo::TransferMatrix;

fn re(x: f64) -> Complex64 {
    Complex64::new(x, 0.0)
}

/// Process-control loop, open-loop stable and minimum phase:
/// `L = 0.2628 (z - 0.7)(z + 0.8752) / ((z + 0.5)(z - 0.8187)^2)`.
pub fn process_control() -> RationalSystem {
    RationalSystem::from_zpk(&[re(0.7), re(-0.8752)], &[re(-0.5), re(0.8187), re(0.8187)], re(0.2628))
        .expect("process-control loop is proper")
}

/// Magnetic-levitation loop with one unstable pole at 1.2214 and a zero on
/// the unit circle at -1:
/// `L = 0.301 (z - 0.7)(z + 1) / ((z + 0.5)(z - 0.8187)(z - 1.2214))`.
pub fn magnetic_levitation() -> RationalSystem {
    RationalSystem::from_zpk(&[re(0.7), re(-1.0)], &[re(-0.5), re(0.8187), re(1.2214)], re(0.301))
        .expect("magnetic-levitation loop is proper")
}

/// Two-channel loop
/// `[[0.1/(z-0.9), 0.2/(z-0.7)], [0.1/(z-0.9), 0.1/(z-0.9)]]`
/// with open-loop poles {0.9, 0.9, 0.7} and a transmission zero at 1.1.
pub fn coupled_two_channel() -> TransferMatrix {
    let entry = |k: f64, p: f64| RationalSystem::from_zpk(&[], &[re(p)], re(k)).expect("first-order entry is proper");
    TransferMatrix::new(vec![
        vec![entry(0.1, 0.9), entry(0.2, 0.7)],
        vec![entry(0.1, 0.9), entry(0.1, 0.9)],
    ])
    .expect("square")
}
