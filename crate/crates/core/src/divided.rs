//! Divided differences `[f | x_0, ..., x_r]` over distinct nodes.
//!
//! Three routes are provided. [`divided_difference`] runs the recursive
//! Newton table and is the one the outage engine uses. [`partial_fractions`]
//! is the explicit sum `sum_i f(x_i) / prod_{j != i} (x_i - x_j)` and also
//! reports the magnitude of its largest intermediate terms for cancellation
//! tracking. [`determinant_ratio`] evaluates `|A| / |B|` with `A` the
//! Vandermonde matrix whose last column is replaced by `f(x_i)`; it is only
//! meant for small orders. Power functions `z^p` additionally have an exact
//! symmetric-function form, [`power_divided_difference`].

use crate::error::{invalid, Error, Result};

/// Relative gap below which two nodes count as coincident.
pub const DISTINCT_REL_TOL: f64 = 1e-9;

/// Rejects node sets with (nearly) coincident entries.
pub fn check_distinct(nodes: &[f64]) -> Result<()> {
    for (i, &a) in nodes.iter().enumerate() {
        for &b in &nodes[i + 1..] {
            let scale = a.abs().max(b.abs());
            if (a - b).abs() <= DISTINCT_REL_TOL * scale {
                return Err(Error::CoincidentCoefficients(a, b));
            }
        }
    }
    Ok(())
}

fn check_shape(nodes: &[f64], values: &[f64]) -> Result<()> {
    if nodes.is_empty() {
        return Err(invalid("divided difference needs at least one node"));
    }
    if nodes.len() != values.len() {
        return Err(invalid(format!(
            "{} nodes but {} values",
            nodes.len(),
            values.len()
        )));
    }
    check_distinct(nodes)
}

/// Highest-order divided difference via the recursive table.
pub fn divided_difference(nodes: &[f64], values: &[f64]) -> Result<f64> {
    check_shape(nodes, values)?;
    Ok(newton_table(nodes, values)[nodes.len() - 1])
}

/// Newton coefficients `[f | x_0..x_k]` for `k = 0..n`. Nodes are assumed distinct.
pub fn newton_table(nodes: &[f64], values: &[f64]) -> Vec<f64> {
    let n = nodes.len();
    let mut col = values.to_vec();
    for level in 1..n {
        for i in (level..n).rev() {
            col[i] = (col[i] - col[i - 1]) / (nodes[i] - nodes[i - level]);
        }
    }
    col
}

/// Complete homogeneous symmetric polynomial `h_degree(vars)`.
pub fn complete_homogeneous(vars: &[f64], degree: usize) -> f64 {
    // h[j] over the variables seen so far; adding y maps h_j -> h_j + y h_{j-1}
    let mut h = vec![0.0; degree + 1];
    h[0] = 1.0;
    for &y in vars {
        for j in 1..=degree {
            h[j] += y * h[j - 1];
        }
    }
    h[degree]
}

/// `[z^p | x_1..x_n]` through symmetric functions, free of cancellation:
/// `h_{p-n+1}(x)` for `p >= 0` (zero when `p < n - 1`) and
/// `(-1)^(n-1) h_{k-1}(1/x) / prod x_i` for `p = -k < 0`.
pub fn power_divided_difference(nodes: &[f64], p: i32) -> Result<f64> {
    if nodes.is_empty() {
        return Err(invalid("divided difference needs at least one node"));
    }
    check_distinct(nodes)?;
    let n = nodes.len() as i32;
    if p >= 0 {
        let degree = p - (n - 1);
        return Ok(if degree < 0 {
            0.0
        } else {
            complete_homogeneous(nodes, degree as usize)
        });
    }
    if nodes.contains(&0.0) {
        return Err(invalid("negative power at a zero node"));
    }
    let recip: Vec<f64> = nodes.iter().map(|x| 1.0 / x).collect();
    let sign = if n % 2 == 1 { 1.0 } else { -1.0 };
    let prod: f64 = recip.iter().product();
    Ok(sign * prod * complete_homogeneous(&recip, (-p - 1) as usize))
}

/// Explicit partial-fraction form of the divided difference.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PartialFractionSum {
    pub value: f64,
    /// `sum_i |f(x_i) / prod_{j != i} (x_i - x_j)|`.
    pub abs_sum: f64,
}

pub fn partial_fractions(nodes: &[f64], values: &[f64]) -> Result<PartialFractionSum> {
    check_shape(nodes, values)?;
    let mut value = 0.0;
    let mut abs_sum = 0.0;
    for (i, (&xi, &fi)) in nodes.iter().zip(values).enumerate() {
        let denom: f64 = nodes
            .iter()
            .enumerate()
            .filter(|&(j, _)| j != i)
            .map(|(_, &xj)| xi - xj)
            .product();
        let term = fi / denom;
        value += term;
        abs_sum += term.abs();
    }
    Ok(PartialFractionSum { value, abs_sum })
}

/// `|A| / |B|` with `B` the Vandermonde matrix of the nodes.
pub fn determinant_ratio(nodes: &[f64], values: &[f64]) -> Result<f64> {
    check_shape(nodes, values)?;
    let n = nodes.len();
    let vandermonde = |last: Option<&[f64]>| -> Vec<Vec<f64>> {
        nodes
            .iter()
            .enumerate()
            .map(|(row, &x)| {
                let mut r: Vec<f64> = (0..n).map(|p| x.powi(p as i32)).collect();
                if let Some(f) = last {
                    r[n - 1] = f[row];
                }
                r
            })
            .collect()
    };
    let a = determinant(vandermonde(Some(values)));
    let b = determinant(vandermonde(None));
    Ok(a / b)
}

/// Determinant by Gaussian elimination with partial pivoting.
pub fn determinant(mut m: Vec<Vec<f64>>) -> f64 {
    let n = m.len();
    let mut det = 1.0;
    for col in 0..n {
        let pivot = (col..n)
            .max_by(|&a, &b| m[a][col].abs().total_cmp(&m[b][col].abs()))
            .unwrap();
        if m[pivot][col] == 0.0 {
            return 0.0;
        }
        if pivot != col {
            m.swap(pivot, col);
            det = -det;
        }
        det *= m[col][col];
        for row in col + 1..n {
            let factor = m[row][col] / m[col][col];
            let (upper, lower) = m.split_at_mut(row);
            for (x, y) in lower[0][col..].iter_mut().zip(&upper[col][col..]) {
                *x -= factor * y;
            }
        }
    }
    det
}
