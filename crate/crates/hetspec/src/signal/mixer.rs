//! 50/50 beamsplitter: unitary mixing of signal and LO envelopes.

use std::f64::consts::FRAC_1_SQRT_2;

use crate::error::Result;
use crate::signal::FieldTrace;

/// Mix two fields on a lossless 50/50 splitter: outputs (s+l)/√2 and
/// (s−l)/√2. Total power is conserved sample by sample.
pub fn mix_50_50(signal: &FieldTrace, lo: &FieldTrace) -> Result<(FieldTrace, FieldTrace)> {
    signal.check_compatible(lo)?;
    let n = signal.len();
    let mut out1 = Vec::with_capacity(n);
    let mut out2 = Vec::with_capacity(n);
    for (s, l) in signal.samples.iter().zip(&lo.samples) {
        out1.push((s + l) * FRAC_1_SQRT_2);
        out2.push((s - l) * FRAC_1_SQRT_2);
    }
    Ok((
        FieldTrace {
            samples: out1,
            sample_rate: signal.sample_rate,
            center_offset_hz: signal.center_offset_hz,
        },
        FieldTrace {
            samples: out2,
            sample_rate: signal.sample_rate,
            center_offset_hz: signal.center_offset_hz,
        },
    ))
}
