//! Exact power sums `sum_{k=0}^N k^p` and the cancellation bound for
//! `sum_{k=0}^N k^m z^k` on the unit circle.

use num_bigint::BigInt;
use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{invalid, Result};

/// `sum_{k=0}^{n} k^p` by direct integer summation, with `0^0 = 1`.
pub fn power_sum(n: u64, p: u32) -> BigInt {
    let mut total = BigInt::zero();
    for k in 0..=n {
        total += BigInt::from(k).pow(p);
    }
    total
}

/// Bernoulli numbers `B_0..=B_n` with `B_1 = -1/2`.
pub fn bernoulli_numbers(n: usize) -> Vec<BigRational> {
    // Akiyama-Tanigawa algorithm produces B_1 = +1/2; flip it afterwards.
    let mut a: Vec<BigRational> = Vec::with_capacity(n + 1);
    let mut out = Vec::with_capacity(n + 1);
    for m in 0..=n {
        a.push(BigRational::new(BigInt::one(), BigInt::from(m + 1)));
        for j in (1..=m).rev() {
            let diff = &a[j - 1] - &a[j];
            a[j - 1] = diff * BigRational::from_integer(BigInt::from(j));
        }
        out.push(a[0].clone());
    }
    if n >= 1 {
        out[1] = -out[1].clone();
    }
    out
}

fn factorial(n: usize) -> BigInt {
    (1..=n).fold(BigInt::one(), |acc, v| acc * BigInt::from(v))
}

/// Closed form
/// `N^{p+1}/(p+1) + N^p/2 + sum_{k=2}^{p} B_k/k! * p!/(p-k+1)! * N^{p-k+1}`,
/// in exact rational arithmetic. For `p = 0` the `0^0` term is included, so
/// the result is `N + 1`.
pub fn faulhaber(n: u64, p: u32) -> BigRational {
    let nn = BigRational::from_integer(BigInt::from(n));
    let pu = p as usize;
    if p == 0 {
        return nn + BigRational::one();
    }
    let bern = bernoulli_numbers(pu);
    let mut total = nn.pow(p as i32 + 1) / BigRational::from_integer(BigInt::from(p + 1))
        + nn.pow(p as i32) / BigRational::from_integer(BigInt::from(2));
    let p_fact = factorial(pu);
    for (k, b) in bern.iter().enumerate().take(pu + 1).skip(2) {
        if b.is_zero() {
            continue;
        }
        let falling = BigRational::new(p_fact.clone(), factorial(pu - k + 1));
        let term = b / BigRational::from_integer(factorial(k)) * falling * nn.pow((p as usize - k + 1) as i32);
        total += term;
    }
    total
}

/// Whether `N^{p+1}/(p+1) <= sum <= N^{p+1}` holds exactly (`p >= 1`).
pub fn power_sum_bounds_hold(n: u64, p: u32) -> Result<bool> {
    if p == 0 {
        return Err(invalid("power sum bounds need p >= 1"));
    }
    let sum = BigRational::from_integer(power_sum(n, p));
    let top = BigRational::from_integer(BigInt::from(n).pow(p + 1));
    let low = top.clone() / BigRational::from_integer(BigInt::from(p + 1));
    Ok(low <= sum && sum <= top)
}

/// Outcome of comparing a trigonometric power sum with its bound.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CancellationCheck {
    pub value: f64,
    pub bound: f64,
}

impl CancellationCheck {
    pub fn holds(&self, rel_tol: f64) -> bool {
        self.value <= self.bound * (1.0 + rel_tol)
    }
}

/// `|sum_{k=0}^N k^m z^k|` against `2 N^m / |1 - z|` for `|z| = 1`, `z != 1`.
pub fn trig_cancellation(n: u64, m: u32, z: Complex64) -> Result<CancellationCheck> {
    if (z.norm() - 1.0).abs() > 1e-12 {
        return Err(invalid("z must lie on the unit circle"));
    }
    let gap = (Complex64::new(1.0, 0.0) - z).norm();
    if gap == 0.0 {
        return Err(invalid("z = 1 is excluded"));
    }
    let mut sum = Complex64::new(0.0, 0.0);
    let mut zk = Complex64::new(1.0, 0.0);
    for k in 0..=n {
        let weight = if m == 0 { 1.0 } else { (k as f64).powi(m as i32) };
        sum += zk * weight;
        zk *= z;
    }
    Ok(CancellationCheck { value: sum.norm(), bound: 2.0 * (n as f64).powi(m as i32) / gap })
}

/// Lossy conversion for reporting.
pub fn rational_to_f64(r: &BigRational) -> f64 {
    let (num, den) = (r.numer(), r.denom());
    match (num.to_f64(), den.to_f64()) {
        (Some(a), Some(b)) if b.is_finite() && a.is_finite() => a / b,
        _ => {
            let sign = if r.is_negative() { -1.0 } else { 1.0 };
            sign * f64::INFINITY
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_power_sums() {
        assert_eq!(power_sum(4, 3), BigInt::from(100));
        assert_eq!(power_sum(5, 0), BigInt::from(6));
        assert_eq!(power_sum(10, 1), BigInt::from(55));
        assert_eq!(faulhaber(4, 3), BigRational::from_integer(BigInt::from(100)));
    }

    #[test]
    fn bernoulli_values() {
        let b = bernoulli_numbers(8);
        let r = |p: i64, q: i64| BigRational::new(BigInt::from(p), BigInt::from(q));
        assert_eq!(b[0], r(1, 1));
        assert_eq!(b[1], r(-1, 2));
        assert_eq!(b[2], r(1, 6));
        assert_eq!(b[3], r(0, 1));
        assert_eq!(b[4], r(-1, 30));
        assert_eq!(b[6], r(1, 42));
        assert_eq!(b[8], r(-1, 30));
    }

    #[test]
    fn faulhaber_matches_direct_sums() {
        for p in 0..=10 {
            for n in [0u64, 1, 2, 7, 100, 1234] {
                assert_eq!(faulhaber(n, p), BigRational::from_integer(power_sum(n, p)), "n={n} p={p}");
            }
        }
    }

    #[test]
    fn power_sum_bounds() {
        for p in 1..=10 {
            for n in [1u64, 3, 50, 999] {
                assert!(power_sum_bounds_hold(n, p).unwrap());
            }
        }
    }

    #[test]
    fn cancellation_example() {
        let c = trig_cancellation(3, 1, Complex64::new(-1.0, 0.0)).unwrap();
        assert!((c.value - 2.0).abs() < 1e-15);
        assert!((c.bound - 3.0).abs() < 1e-15);
        assert!(c.holds(0.0));
        assert!(trig_cancellation(3, 1, Complex64::new(1.0, 0.0)).is_err());
        assert!(trig_cancellation(3, 1, Complex64::new(0.5, 0.0)).is_err());
    }

    #[test]
    fn rational_conversion() {
        let r = BigRational::new(BigInt::from(1), BigInt::from(4));
        assert_eq!(rational_to_f64(&r), 0.25);
    }
}
