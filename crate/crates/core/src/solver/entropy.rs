//! Exact entropy solution of the unforced inviscid problem started from
//! `sin(2πx)`: a stationary shock at `x = ½` once characteristics cross.

use std::f64::consts::PI;

/// `u(t, x)` for `t ≥ 0`. Zero on the shock itself.
pub fn sine_entropy_solution(t: f64, x: f64) -> f64 {
    debug_assert!(t >= 0.0, "time {t} must be nonnegative");
    // Characteristics from ξ ∈ [0, ξc] are the ones that have not yet
    // entered the shock; x(ξ) = ξ + t sin(2πξ) is increasing there.
    let xi_c = if 2.0 * PI * t <= 1.0 {
        0.5
    } else {
        (-1.0 / (2.0 * PI * t)).acos() / (2.0 * PI)
    };
    let left = |x: f64| -> f64 {
        let (mut lo, mut hi) = (0.0, xi_c);
        while hi - lo > 1e-16 {
            let mid = 0.5 * (lo + hi);
            if mid + t * (2.0 * PI * mid).sin() < x {
                lo = mid;
            } else {
                hi = mid;
            }
            if mid == lo && mid == hi {
                break;
            }
        }
        (PI * (lo + hi)).sin()
    };
    let x = x.rem_euclid(1.0);
    match x.partial_cmp(&0.5) {
        Some(std::cmp::Ordering::Less) => left(x),
        Some(std::cmp::Ordering::Greater) => -left(1.0 - x),
        _ => 0.0,
    }
}
