//! Bessel and Hankel functions of integer order and positive real argument.
//!
//! Orders 0 and 1 are the workhorses of the 2D Helmholtz fundamental solution
//! and are evaluated together by [`bessel01`]. For `x <= ASYMPTOTIC_SWITCH`
//! the first kind is obtained by Miller's backward recurrence normalised with
//! `1 = J0 + 2 * sum J_2k`, and the second kind from the Neumann series in the
//! same recurrence values. Larger arguments use the Hankel asymptotic
//! expansion. Higher orders come from downward (J) and upward (Y) recurrence.

use num_complex::Complex64;
use std::f64::consts::{FRAC_1_SQRT_2, PI};
use thiserror::Error;

/// Euler–Mascheroni constant.
pub const EULER_GAMMA: f64 = 0.577_215_664_901_532_9;

/// Argument above which the Hankel asymptotic expansion is used.
pub const ASYMPTOTIC_SWITCH: f64 = 25.0;

#[derive(Debug, Clone, Copy, PartialEq, Error)]
pub enum SpecfunError {
    #[error("negative order {0}")]
    NegativeOrder(i32),
    #[error("argument must be positive, got {0}")]
    NonpositiveArgument(f64),
}

/// `J0, J1, Y0, Y1` at one argument.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Bessel01 {
    pub j0: f64,
    pub j1: f64,
    pub y0: f64,
    pub y1: f64,
}

impl Bessel01 {
    pub fn h0(&self) -> Complex64 {
        Complex64::new(self.j0, self.y0)
    }

    pub fn h1(&self) -> Complex64 {
        Complex64::new(self.j1, self.y1)
    }
}

/// Evaluates `J0, J1, Y0, Y1` at `x > 0`.
///
/// This is the hot path of kernel assembly and field evaluation, so it does no
/// argument validation; `x` must be positive and finite.
pub fn bessel01(x: f64) -> Bessel01 {
    debug_assert!(x > 0.0 && x.is_finite());
    if x > ASYMPTOTIC_SWITCH {
        asymptotic01(x)
    } else {
        miller01(x)
    }
}

/// Starting order for Miller's recurrence so that `J_start(x)` is far below
/// double precision relative to the normalisation sum.
fn miller_start(x: f64, order: usize) -> usize {
    let base = x + 8.0 * x.cbrt() + 24.0;
    let n = base.max(order as f64 + 20.0).ceil() as usize;
    n + (n % 2)
}

/// Backward recurrence returning `(J0, J1, Y0, Y1)`.
fn miller01(x: f64) -> Bessel01 {
    let start = miller_start(x, 1);
    let two_over_x = 2.0 / x;

    // f[m+1], f[m]
    let mut f_next = 0.0_f64;
    let mut f_cur = 1e-30_f64;
    // Normalisation sum J0 + 2 sum J_{2k}, Neumann sums for Y0 and Y1.
    let mut norm = 0.0_f64;
    let mut y0_sum = 0.0_f64; // sum_{k>=1} (-1)^k J_{2k} / k
    let mut y1_sum = 0.0_f64; // sum_{k>=1} (-1)^k (J_{2k-1} - J_{2k+1}) / k
    let mut j1 = 0.0;

    let mut m = start;
    // Invariant at the top: f_cur = J_m (unnormalised), f_next = J_{m+1}.
    loop {
        if m.is_multiple_of(2) {
            if m == 0 {
                norm += f_cur;
            } else {
                let k = (m / 2) as f64;
                let sign = if (m / 2).is_multiple_of(2) { 1.0 } else { -1.0 };
                norm += 2.0 * f_cur;
                y0_sum += sign * f_cur / k;
            }
        } else {
            // odd m = 2k-1 contributes +J_{2k-1}/k * (-1)^k, and as J_{2k'+1}
            // with k' = k-1 contributes -J_{2k'+1}/k' * (-1)^{k'}.
            let k = m.div_ceil(2) as f64;
            let sign_k = if m.div_ceil(2).is_multiple_of(2) { 1.0 } else { -1.0 };
            y1_sum += sign_k * f_cur / k;
            if m >= 3 {
                let kp = ((m - 1) / 2) as f64;
                let sign_kp = -sign_k;
                y1_sum -= sign_kp * f_cur / kp;
            }
            if m == 1 {
                j1 = f_cur;
            }
        }
        if m == 0 {
            break;
        }
        let f_prev = (m as f64) * two_over_x * f_cur - f_next;
        f_next = f_cur;
        f_cur = f_prev;
        m -= 1;
        if f_cur.abs() > 1e250 {
            let s = 1e-250;
            f_cur *= s;
            f_next *= s;
            norm *= s;
            y0_sum *= s;
            y1_sum *= s;
            j1 *= s;
        }
    }
    let j0 = f_cur / norm;
    let j1 = j1 / norm;
    let y0_sum = y0_sum / norm;
    let y1_sum = y1_sum / norm;
    let log_term = (0.5 * x).ln() + EULER_GAMMA;
    let y0 = 2.0 / PI * log_term * j0 - 4.0 / PI * y0_sum;
    let y1 = -2.0 / (PI * x) * j0 + 2.0 / PI * log_term * j1 + 2.0 / PI * y1_sum;
    Bessel01 { j0, j1, y0, y1 }
}

/// Hankel asymptotic expansion `(P, Q)` for integer order `nu`.
fn asymptotic_pq(nu: u32, x: f64) -> (f64, f64) {
    let mu = 4.0 * (nu as f64).powi(2);
    let mut p = 1.0;
    let mut q = 0.0;
    let mut term = 1.0_f64;
    let mut last = f64::INFINITY;
    let eight_x = 8.0 * x;
    for k in 1..60 {
        let odd = (2 * k - 1) as f64;
        term *= (mu - odd * odd) / (k as f64 * eight_x);
        let mag = term.abs();
        if mag > last {
            break;
        }
        last = mag;
        // a_k / x^k: k odd goes to Q with sign (-1)^((k-1)/2), even to P with (-1)^(k/2)
        if k % 2 == 1 {
            let sign = if ((k - 1) / 2) % 2 == 0 { 1.0 } else { -1.0 };
            q += sign * term;
        } else {
            let sign = if (k / 2) % 2 == 0 { 1.0 } else { -1.0 };
            p += sign * term;
        }
        if mag < 1e-18 {
            break;
        }
    }
    (p, q)
}

fn asymptotic01(x: f64) -> Bessel01 {
    let (s, c) = x.sin_cos();
    let amp = (2.0 / (PI * x)).sqrt();
    // chi0 = x - pi/4, chi1 = x - 3pi/4
    let cos0 = (c + s) * FRAC_1_SQRT_2;
    let sin0 = (s - c) * FRAC_1_SQRT_2;
    let cos1 = (s - c) * FRAC_1_SQRT_2;
    let sin1 = -(s + c) * FRAC_1_SQRT_2;
    let (p0, q0) = asymptotic_pq(0, x);
    let (p1, q1) = asymptotic_pq(1, x);
    Bessel01 {
        j0: amp * (p0 * cos0 - q0 * sin0),
        y0: amp * (p0 * sin0 + q0 * cos0),
        j1: amp * (p1 * cos1 - q1 * sin1),
        y1: amp * (p1 * sin1 + q1 * cos1),
    }
}

/// `J_n(x)` for `n >= 0`, `x >= 0`.
pub fn bessel_j(n: i32, x: f64) -> Result<f64, SpecfunError> {
    if n < 0 {
        return Err(SpecfunError::NegativeOrder(n));
    }
    if x < 0.0 || !x.is_finite() {
        return Err(SpecfunError::NonpositiveArgument(x));
    }
    if x == 0.0 {
        return Ok(if n == 0 { 1.0 } else { 0.0 });
    }
    match n {
        0 => Ok(bessel01(x).j0),
        1 => Ok(bessel01(x).j1),
        _ => Ok(bessel_j_orders(n as usize, x)[n as usize]),
    }
}

/// `J_0(x) .. J_nmax(x)` by normalised downward recurrence, `x > 0`.
pub fn bessel_j_orders(nmax: usize, x: f64) -> Vec<f64> {
    let start = miller_start(x, nmax);
    let mut out = vec![0.0; nmax + 1];
    let two_over_x = 2.0 / x;
    let mut f_next = 0.0_f64;
    let mut f_cur = 1e-30_f64;
    let mut norm = 0.0;
    let mut m = start;
    loop {
        if m <= nmax {
            out[m] = f_cur;
        }
        if m.is_multiple_of(2) {
            norm += if m == 0 { f_cur } else { 2.0 * f_cur };
        }
        if m == 0 {
            break;
        }
        let f_prev = (m as f64) * two_over_x * f_cur - f_next;
        f_next = f_cur;
        f_cur = f_prev;
        m -= 1;
        if f_cur.abs() > 1e250 {
            let s = 1e-250;
            f_cur *= s;
            f_next *= s;
            norm *= s;
            for v in out.iter_mut() {
                *v *= s;
            }
        }
    }
    for v in out.iter_mut() {
        *v /= norm;
    }
    // For large x the normalisation sum is slowly convergent in cancellation;
    // anchor the low orders on the dedicated evaluation instead.
    if x > ASYMPTOTIC_SWITCH {
        let b = bessel01(x);
        if out[0].abs() > out[1].abs() {
            let scale = b.j0 / out[0];
            out.iter_mut().for_each(|v| *v *= scale);
        } else {
            let scale = b.j1 / out[1];
            out.iter_mut().for_each(|v| *v *= scale);
        }
    }
    out
}

/// `Y_0(x) .. Y_nmax(x)` by upward recurrence, `x > 0`.
pub fn bessel_y_orders(nmax: usize, x: f64) -> Vec<f64> {
    let b = bessel01(x);
    let mut out = Vec::with_capacity(nmax + 1);
    out.push(b.y0);
    if nmax >= 1 {
        out.push(b.y1);
    }
    for n in 1..nmax {
        let next = (2.0 * n as f64 / x) * out[n] - out[n - 1];
        out.push(next);
    }
    out
}

/// `Y_n(x)` for `n >= 0`, `x > 0`.
pub fn bessel_y(n: i32, x: f64) -> Result<f64, SpecfunError> {
    if n < 0 {
        return Err(SpecfunError::NegativeOrder(n));
    }
    if !(x > 0.0) || !x.is_finite() {
        return Err(SpecfunError::NonpositiveArgument(x));
    }
    Ok(bessel_y_orders(n as usize, x)[n as usize])
}

/// Hankel function of the first kind `H_n^(1)(x) = J_n(x) + i Y_n(x)`.
pub fn hankel1(n: i32, x: f64) -> Result<Complex64, SpecfunError> {
    let y = bessel_y(n, x)?;
    let j = bessel_j(n, x)?;
    Ok(Complex64::new(j, y))
}

/// `H_0^(1)(x), ..., H_nmax^(1)(x)`.
pub fn hankel1_orders(nmax: usize, x: f64) -> Vec<Complex64> {
    let j = bessel_j_orders(nmax, x);
    let y = bessel_y_orders(nmax, x);
    j.into_iter()
        .zip(y)
        .map(|(re, im)| Complex64::new(re, im))
        .collect()
}

/// Smallest positive zero of `J0` after `guess`, found by Newton's method on
/// `J0` with `J0' = -J1`.
pub fn bessel_j0_zero_near(guess: f64) -> f64 {
    let mut x = guess;
    for _ in 0..50 {
        let b = bessel01(x);
        let step = b.j0 / (-b.j1);
        x -= step;
        if step.abs() < 1e-15 * x {
            break;
        }
    }
    x
}

/// `m`-th positive zero of `J0` (1-based), via McMahon's estimate and Newton.
pub fn bessel_j0_zero(m: usize) -> f64 {
    let beta = (m as f64 - 0.25) * PI;
    let guess = beta + 1.0 / (8.0 * beta) - 31.0 / (384.0 * beta.powi(3));
    bessel_j0_zero_near(guess)
}
