//! Test-only oracles, independent of the library's evaluation paths.
#![allow(dead_code)]

use num::bigint::BigInt;
use num::rational::BigRational;
use num::{One, Signed, ToPrimitive, Zero};

pub fn rat(n: i64, d: i64) -> BigRational {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

/// `c_k = (t - k + 1) / (K - k + 1)` as exact rationals.
pub fn exact_coefficients(k_ens: usize, t_d: usize) -> Vec<BigRational> {
    (1..=t_d)
        .map(|k| rat((t_d - k + 1) as i64, (k_ens - k + 1) as i64))
        .collect()
}

/// `prod_{j != i} (c_i - c_j)`.
fn partial_fraction_denominator(c: &[BigRational], i: usize) -> BigRational {
    c.iter()
        .enumerate()
        .filter(|&(j, _)| j != i)
        .fold(BigRational::one(), |acc, (_, cj)| acc * (&c[i] - cj))
}

fn factorial(m: usize) -> BigInt {
    (1..=m).fold(BigInt::one(), |acc, j| acc * BigInt::from(j))
}

/// `f(t_d, m)` from its defining sum, in exact arithmetic.
pub fn exact_series_coefficient(k_ens: usize, t_d: usize, m: usize) -> BigRational {
    let c = exact_coefficients(k_ens, t_d);
    let exponent = t_d as i32 - 1 - m as i32;
    let sum = (0..t_d).fold(BigRational::zero(), |acc, i| {
        acc + c[i].pow(exponent) / partial_fraction_denominator(&c, i)
    });
    let signed = if m.is_multiple_of(2) { sum } else { -sum };
    signed / BigRational::from_integer(factorial(m))
}

pub fn to_f64(x: &BigRational) -> f64 {
    x.to_f64().expect("finite rational")
}

/// `e^{-x}` for rational `x >= 0` by Taylor series, truncated once the
/// alternating terms fall below `2^-300`.
pub fn exact_exp_neg(x: &BigRational) -> BigRational {
    let tol = BigRational::new(BigInt::one(), BigInt::one() << 300);
    let mut term = BigRational::one();
    let mut sum = BigRational::one();
    let mut n = 1i64;
    loop {
        term = -term * x / BigRational::from_integer(BigInt::from(n));
        sum += &term;
        if term.abs() < tol && BigRational::from_integer(BigInt::from(n)) > *x {
            return sum;
        }
        n += 1;
    }
}

/// Partial-fraction closed form `1 - sum_i w_i e^{-T/c_i}` evaluated with
/// exact rational weights and a 300-bit exponential.
pub fn extended_closed_form(k_ens: usize, t_d: usize, threshold: f64) -> f64 {
    let t = BigRational::from_float(threshold).unwrap();
    let c = exact_coefficients(k_ens, t_d);
    let survival = (0..t_d).fold(BigRational::zero(), |acc, i| {
        let w = c[i].pow(t_d as i32 - 1) / partial_fraction_denominator(&c, i);
        acc + w * exact_exp_neg(&(&t / &c[i]))
    });
    to_f64(&(BigRational::one() - survival))
}

/// Two-sample Kolmogorov-Smirnov statistic.
pub fn ks_statistic(mut a: Vec<f64>, mut b: Vec<f64>) -> f64 {
    a.sort_by(f64::total_cmp);
    b.sort_by(f64::total_cmp);
    let (n, m) = (a.len() as f64, b.len() as f64);
    let (mut i, mut j, mut d) = (0usize, 0usize, 0.0f64);
    while i < a.len() && j < b.len() {
        let x = a[i].min(b[j]);
        while i < a.len() && a[i] <= x {
            i += 1;
        }
        while j < b.len() && b[j] <= x {
            j += 1;
        }
        d = d.max((i as f64 / n - j as f64 / m).abs());
    }
    d
}

/// 1% critical value of the two-sample KS statistic (asymptotic).
pub fn ks_critical_1pct(n: usize, m: usize) -> f64 {
    let c = (-(0.005f64).ln() / 2.0).sqrt();
    c * ((n + m) as f64 / (n * m) as f64).sqrt()
}

/// Number of partitions of `j` into at most `parts` parts each at most
/// `max_part`, for every `j <= total`, by the Gaussian-binomial recurrence
/// `p(j, parts, max) = p(j, parts - 1, max) + p(j - parts, parts, max - 1)`.
pub fn bounded_partition_counts(total: usize, parts: usize, max_part: usize) -> Vec<u64> {
    // table[a][b][j]: partitions of j into at most a parts each <= b
    let mut table = vec![vec![vec![0u64; total + 1]; max_part + 1]; parts + 1];
    for a in 0..=parts {
        for b in 0..=max_part {
            table[a][b][0] = 1;
            for j in 1..=total {
                if a == 0 || b == 0 {
                    continue;
                }
                let without_full_column = table[a - 1][b][j];
                let with = if j >= a { table[a][b - 1][j - a] } else { 0 };
                table[a][b][j] = without_full_column + with;
            }
        }
    }
    table[parts][max_part].clone()
}
