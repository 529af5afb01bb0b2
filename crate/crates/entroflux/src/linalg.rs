//! Symmetric 2×2 matrices with closed-form spectral helpers.
//!
//! Everything the entropy analysis needs from linear algebra is 2×2 and
//! symmetric, so the eigenvalue work is done analytically instead of pulling in
//! a matrix library.

/// A symmetric 2×2 matrix `[[a11, a12], [a12, a22]]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Sym2 {
    pub a11: f64,
    pub a12: f64,
    pub a22: f64,
}

impl Sym2 {
    pub fn new(a11: f64, a12: f64, a22: f64) -> Self {
        Self { a11, a12, a22 }
    }

    #[must_use]
    pub fn det(&self) -> f64 {
        self.a11 * self.a22 - self.a12 * self.a12
    }

    #[must_use]
    pub fn trace(&self) -> f64 {
        self.a11 + self.a22
    }

    /// Value of the quadratic form `(x, y) · A · (x, y)ᵀ`.
    #[must_use]
    pub fn quad(&self, x: f64, y: f64) -> f64 {
        self.a11 * x * x + 2.0 * self.a12 * x * y + self.a22 * y * y
    }

    /// Eigenvalues in ascending order, from the closed form
    /// `(a11+a22)/2 ± √(((a11−a22)/2)² + a12²)`.
    #[must_use]
    pub fn eigenvalues(&self) -> (f64, f64) {
        let mean = 0.5 * (self.a11 + self.a22);
        let disc =
            (0.25 * (self.a11 - self.a22) * (self.a11 - self.a22) + self.a12 * self.a12).sqrt();
        (mean - disc, mean + disc)
    }

    /// A unit eigenvector for the given eigenvalue.
    ///
    /// `lambda` must be an eigenvalue of `self`; for (numerically) repeated
    /// eigenvalues any unit vector is valid and `(1, 0)` is returned.
    #[must_use]
    pub fn eigenvector(&self, lambda: f64) -> (f64, f64) {
        // (A - lambda I) v = 0; pick the row with the larger residual entries.
        let r1 = (self.a11 - lambda, self.a12);
        let r2 = (self.a12, self.a22 - lambda);
        let (rx, ry) = if r1.0.hypot(r1.1) >= r2.0.hypot(r2.1) {
            r1
        } else {
            r2
        };
        let n = rx.hypot(ry);
        if n == 0.0 {
            return (1.0, 0.0);
        }
        // v is orthogonal to the chosen row.
        (-ry / n, rx / n)
    }

    /// Negative semi-definiteness via the spectrum: both eigenvalues ≤ `tol`.
    ///
    /// `tol` absorbs rounding in the entries; it scales nothing, so pass a
    /// tolerance already scaled to the matrix at hand.
    #[must_use]
    pub fn negative_semidefinite_eigen(&self, tol: f64) -> bool {
        let (_, hi) = self.eigenvalues();
        hi <= tol
    }
}
