//! Centered second-order difference operators.
//!
//! All operators take an array with at least one ghost ring and return an
//! array shrunk by one ring on every side: output index `(i, j)` is centered
//! at input index `(i + 1, j + 1)`. Nesting two operators therefore consumes
//! exactly the two ghost rings carried by padded states.

use ndarray::Array2;

/// Centered x-derivative.
#[must_use]
pub fn ddx(w: &Array2<f64>, dx: f64) -> Array2<f64> {
    let (n0, n1) = w.dim();
    let mut out = Array2::zeros((n0 - 2, n1 - 2));
    let inv = 1.0 / (2.0 * dx);
    for i in 0..n0 - 2 {
        for j in 0..n1 - 2 {
            out[(i, j)] = (w[(i + 2, j + 1)] - w[(i, j + 1)]) * inv;
        }
    }
    out
}

/// Centered y-derivative.
#[must_use]
pub fn ddy(w: &Array2<f64>, dy: f64) -> Array2<f64> {
    let (n0, n1) = w.dim();
    let mut out = Array2::zeros((n0 - 2, n1 - 2));
    let inv = 1.0 / (2.0 * dy);
    for i in 0..n0 - 2 {
        for j in 0..n1 - 2 {
            out[(i, j)] = (w[(i + 1, j + 2)] - w[(i + 1, j)]) * inv;
        }
    }
    out
}

/// Compact conservative form of `div(k grad q)`: face fluxes use the
/// arithmetic mean of `k` on the two adjacent cells, so the cell sums
/// telescope exactly on periodic domains.
#[must_use]
pub fn div_k_grad(k: &Array2<f64>, q: &Array2<f64>, dx: f64, dy: f64) -> Array2<f64> {
    let (n0, n1) = k.dim();
    assert_eq!(q.dim(), (n0, n1));
    let mut out = Array2::zeros((n0 - 2, n1 - 2));
    let ix = 1.0 / (dx * dx);
    let iy = 1.0 / (dy * dy);
    for i in 0..n0 - 2 {
        for j in 0..n1 - 2 {
            let (ci, cj) = (i + 1, j + 1);
            let c = (ci, cj);
            let xr = 0.5 * (k[(ci + 1, cj)] + k[c]) * (q[(ci + 1, cj)] - q[c]);
            let xl = 0.5 * (k[c] + k[(ci - 1, cj)]) * (q[c] - q[(ci - 1, cj)]);
            let yr = 0.5 * (k[(ci, cj + 1)] + k[c]) * (q[(ci, cj + 1)] - q[c]);
            let yl = 0.5 * (k[c] + k[(ci, cj - 1)]) * (q[c] - q[(ci, cj - 1)]);
            out[(i, j)] = (xr - xl) * ix + (yr - yl) * iy;
        }
    }
    out
}

/// Classic five-point Laplacian.
#[must_use]
pub fn laplacian(q: &Array2<f64>, dx: f64, dy: f64) -> Array2<f64> {
    let (n0, n1) = q.dim();
    let mut out = Array2::zeros((n0 - 2, n1 - 2));
    let ix = 1.0 / (dx * dx);
    let iy = 1.0 / (dy * dy);
    for i in 0..n0 - 2 {
        for j in 0..n1 - 2 {
            let (ci, cj) = (i + 1, j + 1);
            out[(i, j)] = (q[(ci + 1, cj)] - 2.0 * q[(ci, cj)] + q[(ci - 1, cj)]) * ix
                + (q[(ci, cj + 1)] - 2.0 * q[(ci, cj)] + q[(ci, cj - 1)]) * iy;
        }
    }
    out
}

/// Drop one ghost ring.
#[must_use]
pub fn shrink(w: &Array2<f64>, rings: usize) -> Array2<f64> {
    let (n0, n1) = w.dim();
    let mut out = Array2::zeros((n0 - 2 * rings, n1 - 2 * rings));
    for i in 0..n0 - 2 * rings {
        for j in 0..n1 - 2 * rings {
            out[(i, j)] = w[(i + rings, j + rings)];
        }
    }
    out
}
