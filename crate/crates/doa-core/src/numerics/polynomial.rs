//! Laurent polynomials of the form `D(z) = sum_l c_l z^{-l}` and their roots.
//!
//! Rooting goes through the companion matrix of the normalized (nonnegative
//! power) polynomial: the matrix is balanced and its eigenvalues extracted
//! with a shifted QR iteration specialized to complex upper Hessenberg form.

use ndarray::Array2;
use num_complex::Complex64;

use super::COEFFICIENT_STRIP_REL_TOL;
use crate::error::{DoaError, Result};

/// Coefficients `c_{-h} ... c_h` of `D(z) = sum_{l=-h}^{h} c_l z^{-l}`,
/// stored in that order (index `i` holds `c_{i-h}`).
///
/// When built from a Hermitian matrix the coefficients are conjugate
/// symmetric, `c_{-l} = conj(c_l)`, which makes `D` real on the unit circle.
#[derive(Debug, Clone, PartialEq)]
pub struct ComplexPolynomial {
    coefficients: Vec<Complex64>,
}

impl ComplexPolynomial {
    /// Build from the centered coefficient list; the length must be odd.
    pub fn from_coefficients(coefficients: Vec<Complex64>) -> Result<Self> {
        if coefficients.is_empty() || coefficients.len().is_multiple_of(2) {
            return Err(DoaError::DimensionMismatch(format!(
                "centered coefficient list must have odd length, got {}",
                coefficients.len()
            )));
        }
        Ok(Self { coefficients })
    }

    /// Half-order `h`; the index range is `-h ..= h`.
    pub fn half_order(&self) -> usize {
        (self.coefficients.len() - 1) / 2
    }

    pub fn coefficients(&self) -> &[Complex64] {
        &self.coefficients
    }

    /// Coefficient of `z^{-l}`; zero outside the stored range.
    pub fn coefficient(&self, l: isize) -> Complex64 {
        let h = self.half_order() as isize;
        if l < -h || l > h {
            Complex64::new(0.0, 0.0)
        } else {
            self.coefficients[(l + h) as usize]
        }
    }

    /// Largest deviation from `c_{-l} = conj(c_l)`, relative to the largest
    /// coefficient magnitude (0 for the zero polynomial).
    pub fn conjugate_symmetry_defect(&self) -> f64 {
        let h = self.half_order() as isize;
        let max_mag = self
            .coefficients
            .iter()
            .map(|c| c.norm())
            .fold(0.0f64, f64::max);
        if max_mag == 0.0 {
            return 0.0;
        }
        let mut worst = 0.0f64;
        for l in 0..=h {
            let d = (self.coefficient(-l) - self.coefficient(l).conj()).norm();
            worst = worst.max(d);
        }
        worst / max_mag
    }

    /// Coefficients of `z^h D(z)` in ascending powers of `z`
    /// (degree `2h`): simply the centered list reversed.
    pub fn normalized_ascending(&self) -> Vec<Complex64> {
        let mut out = self.coefficients.clone();
        out.reverse();
        out
    }

    /// Evaluate `D(z)` for `z != 0`.
    pub fn evaluate_laurent(&self, z: Complex64) -> Complex64 {
        let h = self.half_order();
        let ascending = self.normalized_ascending();
        let p = horner(&ascending, z);
        p * z.powi(-(h as i32))
    }

    /// Evaluate `D(e^{j omega})`; exactly the Laurent sum with unit-modulus
    /// powers, so it is stable for any `omega`.
    pub fn evaluate_on_unit_circle(&self, omega: f64) -> Complex64 {
        let h = self.half_order() as isize;
        let mut acc = Complex64::new(0.0, 0.0);
        for l in -h..=h {
            acc += self.coefficient(l) * Complex64::from_polar(1.0, -(l as f64) * omega);
        }
        acc
    }
}

/// Horner evaluation of an ascending-power coefficient slice.
pub(crate) fn horner(ascending: &[Complex64], z: Complex64) -> Complex64 {
    let mut acc = Complex64::new(0.0, 0.0);
    for &c in ascending.iter().rev() {
        acc = acc * z + c;
    }
    acc
}

/// Roots of `D(z)`, multiplicities counted.
#[derive(Debug, Clone, PartialEq)]
pub struct RootSet {
    roots: Vec<Complex64>,
}

impl RootSet {
    /// Wrap an explicit root list (used when roots come from elsewhere,
    /// e.g. synthetic test fixtures).
    pub fn from_roots(roots: Vec<Complex64>) -> Self {
        Self { roots }
    }

    pub fn roots(&self) -> &[Complex64] {
        &self.roots
    }

    pub fn len(&self) -> usize {
        self.roots.len()
    }

    pub fn is_empty(&self) -> bool {
        self.roots.is_empty()
    }

    /// How far the root multiset is from being closed under
    /// `z -> 1/conj(z)`: the worst relative distance between a mapped root
    /// and its nearest neighbour in the set.
    pub fn conjugate_reciprocal_defect(&self) -> f64 {
        let mut worst = 0.0f64;
        for &z in &self.roots {
            if z.norm() == 0.0 {
                return f64::INFINITY;
            }
            let partner = z.conj().inv();
            let nearest = self
                .roots
                .iter()
                .map(|w| (w - partner).norm())
                .fold(f64::INFINITY, f64::min);
            worst = worst.max(nearest / partner.norm().max(1.0));
        }
        worst
    }
}

/// Roots of `D(z)` via the balanced companion matrix of the stripped,
/// nonnegative-power normalization.
///
/// Coefficients at or below the relative strip tolerance are removed from
/// both ends of the index range first; normalization factors `z^k` never
/// contribute roots. An all-zero input is rejected, and a polynomial that
/// strips down to a single term carries no signal structure to root.
pub fn find_roots(poly: &ComplexPolynomial) -> Result<RootSet> {
    let h = poly.half_order() as isize;
    let max_mag = poly
        .coefficients()
        .iter()
        .map(|c| c.norm())
        .fold(0.0f64, f64::max);
    if max_mag == 0.0 {
        return Err(DoaError::ZeroPolynomial);
    }
    let strip = max_mag * COEFFICIENT_STRIP_REL_TOL;

    let mut l_min = h + 1;
    let mut l_max = -h - 1;
    for l in -h..=h {
        if poly.coefficient(l).norm() > strip {
            l_min = l_min.min(l);
            l_max = l_max.max(l);
        }
    }
    if l_min > l_max {
        return Err(DoaError::ZeroPolynomial);
    }
    if l_min == l_max {
        return Err(DoaError::NoSignalRoots);
    }

    // q(z) = z^{l_max} D(z) restricted to surviving terms: ascending
    // coefficient k is c_{l_max - k}, constant term nonzero by construction.
    let degree = (l_max - l_min) as usize;
    let leading = poly.coefficient(l_min);
    let mut companion = Array2::zeros((degree, degree));
    for i in 1..degree {
        companion[[i, i - 1]] = Complex64::new(1.0, 0.0);
    }
    for row in 0..degree {
        let monic = poly.coefficient(l_max - row as isize) / leading;
        companion[[row, degree - 1]] = -monic;
    }

    balance_in_place(&mut companion);
    let roots = hessenberg_eigenvalues(companion)?;
    Ok(RootSet { roots })
}

/// One-norm magnitude `|re| + |im|`, the customary balancing and deflation
/// measure (no square root).
#[inline]
fn mag1(z: Complex64) -> f64 {
    z.re.abs() + z.im.abs()
}

/// Parlett-Reinsch balancing: diagonal similarity with powers of two that
/// evens out row and column norms. Exact in floating point (scale factors
/// are powers of the radix), and it sharpens companion-matrix eigenvalues
/// for badly scaled coefficients.
fn balance_in_place(a: &mut Array2<Complex64>) {
    const RADIX: f64 = 2.0;
    let sqrdx = RADIX * RADIX;
    let n = a.nrows();
    loop {
        let mut done = true;
        for i in 0..n {
            let mut col_norm = 0.0;
            let mut row_norm = 0.0;
            for j in 0..n {
                if j != i {
                    col_norm += mag1(a[[j, i]]);
                    row_norm += mag1(a[[i, j]]);
                }
            }
            if col_norm == 0.0 || row_norm == 0.0 {
                continue;
            }
            let total = col_norm + row_norm;
            let mut factor = 1.0;
            let mut c = col_norm;
            let mut g = row_norm / RADIX;
            while c < g {
                factor *= RADIX;
                c *= sqrdx;
            }
            g = row_norm * RADIX;
            while c > g {
                factor /= RADIX;
                c /= sqrdx;
            }
            if (c + row_norm) / factor < 0.95 * total {
                done = false;
                let inv = 1.0 / factor;
                for j in 0..n {
                    a[[i, j]] *= inv;
                }
                for j in 0..n {
                    a[[j, i]] *= factor;
                }
            }
        }
        if done {
            break;
        }
    }
}

/// Eigenvalues of a complex upper Hessenberg matrix by explicit
/// single-shift QR with Givens rotations (Wilkinson shifts, occasional
/// exceptional shifts, trailing 1x1/2x2 deflation).
///
/// Works on a flat row-major buffer: this runs inside every rooted
/// estimation, so the inner loops stay free of 2-D index arithmetic.
fn hessenberg_eigenvalues(h_matrix: Array2<Complex64>) -> Result<Vec<Complex64>> {
    let n = h_matrix.nrows();
    let mut eigenvalues = vec![Complex64::new(0.0, 0.0); n];
    if n == 0 {
        return Ok(eigenvalues);
    }
    let mut h = h_matrix.into_raw_vec_and_offset().0;
    debug_assert_eq!(h.len(), n * n);
    let at = |i: usize, j: usize| i * n + j;
    let overall: f64 = h.iter().map(|&z| mag1(z)).fold(0.0, f64::max).max(1e-300);

    let mut hi = n;
    let mut stalled = 0usize;
    let mut total = 0usize;
    let max_total = 80 * n;
    let mut rotations: Vec<(f64, Complex64)> = Vec::with_capacity(n);

    while hi > 0 {
        // Look for a negligible subdiagonal entry to split the active block.
        let mut lo = hi - 1;
        while lo > 0 {
            let local = mag1(h[at(lo - 1, lo - 1)]) + mag1(h[at(lo, lo)]);
            let threshold = f64::EPSILON * if local > 0.0 { local } else { overall };
            if mag1(h[at(lo, lo - 1)]) <= threshold {
                h[at(lo, lo - 1)] = Complex64::new(0.0, 0.0);
                break;
            }
            lo -= 1;
        }

        if lo == hi - 1 {
            eigenvalues[hi - 1] = h[at(hi - 1, hi - 1)];
            hi -= 1;
            stalled = 0;
            continue;
        }
        if lo == hi - 2 {
            let (e1, e2) = eigenvalues_2x2(
                h[at(lo, lo)],
                h[at(lo, lo + 1)],
                h[at(lo + 1, lo)],
                h[at(lo + 1, lo + 1)],
            );
            eigenvalues[lo] = e1;
            eigenvalues[lo + 1] = e2;
            hi -= 2;
            stalled = 0;
            continue;
        }

        total += 1;
        stalled += 1;
        if total > max_total {
            return Err(DoaError::ConvergenceFailure("Hessenberg QR stalled"));
        }

        let shift = if stalled.is_multiple_of(16) {
            // Exceptional shift breaks symmetric stagnation.
            let mut s = h[at(hi - 1, hi - 2)].norm();
            if hi >= 3 {
                s += h[at(hi - 2, hi - 3)].norm();
            }
            Complex64::new(s, 0.0)
        } else {
            wilkinson_shift(
                h[at(hi - 2, hi - 2)],
                h[at(hi - 2, hi - 1)],
                h[at(hi - 1, hi - 2)],
                h[at(hi - 1, hi - 1)],
            )
        };

        for i in lo..hi {
            h[at(i, i)] -= shift;
        }
        // QR sweep: eliminate the subdiagonal with Givens rotations...
        rotations.clear();
        for k in lo..hi - 1 {
            let (c, s, r) = givens(h[at(k, k)], h[at(k + 1, k)]);
            h[at(k, k)] = r;
            h[at(k + 1, k)] = Complex64::new(0.0, 0.0);
            let (upper, lower) = h.split_at_mut(at(k + 1, 0));
            let top_row = &mut upper[at(k, k + 1)..at(k, hi)];
            let bottom_row = &mut lower[k + 1..hi];
            for (top, bottom) in top_row.iter_mut().zip(bottom_row) {
                let t = *top;
                let b = *bottom;
                *top = c * t + s * b;
                *bottom = -s.conj() * t + c * b;
            }
            rotations.push((c, s));
        }
        // ...then recombine as R Q, which restores Hessenberg form.
        for (offset, &(c, s)) in rotations.iter().enumerate() {
            let k = lo + offset;
            let s_conj = s.conj();
            for i in lo..=k + 1 {
                let row = at(i, 0);
                let left = h[row + k];
                let right = h[row + k + 1];
                h[row + k] = c * left + s_conj * right;
                h[row + k + 1] = -s * left + c * right;
            }
        }
        for i in lo..hi {
            h[at(i, i)] += shift;
        }
    }
    Ok(eigenvalues)
}

/// Complex Givens rotation `G = [[c, s], [-conj(s), c]]` (c real) with
/// `G [a, b]^T = [r, 0]^T`.
fn givens(a: Complex64, b: Complex64) -> (f64, Complex64, Complex64) {
    let b_norm = b.norm();
    if b_norm == 0.0 {
        return (1.0, Complex64::new(0.0, 0.0), a);
    }
    let a_norm = a.norm();
    if a_norm == 0.0 {
        return (0.0, b.conj() / b_norm, Complex64::new(b_norm, 0.0));
    }
    let scale = a_norm.hypot(b_norm);
    let alpha = a / a_norm;
    let c = a_norm / scale;
    let s = alpha * b.conj() / scale;
    (c, s, alpha * scale)
}

/// Both eigenvalues of `[[a, b], [c, d]]`.
fn eigenvalues_2x2(
    a: Complex64,
    b: Complex64,
    c: Complex64,
    d: Complex64,
) -> (Complex64, Complex64) {
    let mean = (a + d) / 2.0;
    let disc = ((a - d) / 2.0).powi(2) + b * c;
    let sq = disc.sqrt();
    (mean + sq, mean - sq)
}

/// Wilkinson shift: the eigenvalue of the trailing 2x2 block closest to its
/// bottom-right entry.
fn wilkinson_shift(a: Complex64, b: Complex64, c: Complex64, d: Complex64) -> Complex64 {
    let (e1, e2) = eigenvalues_2x2(a, b, c, d);
    if (e1 - d).norm() <= (e2 - d).norm() {
        e1
    } else {
        e2
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn hand_factored_quadratic() {
        // (z - 2)(z - 1/2) = z^2 - 2.5 z + 1, centered as c_{-1} z + c_0 + c_1/z.
        let poly =
            ComplexPolynomial::from_coefficients(vec![c(1.0, 0.0), c(-2.5, 0.0), c(1.0, 0.0)])
                .unwrap();
        let roots = find_roots(&poly).unwrap();
        assert_eq!(roots.len(), 2);
        let mut mags: Vec<f64> = roots.roots().iter().map(|z| z.norm()).collect();
        mags.sort_by(|x, y| x.partial_cmp(y).unwrap());
        assert!((mags[0] - 0.5).abs() < 1e-10);
        assert!((mags[1] - 2.0).abs() < 1e-10);
        for z in roots.roots() {
            assert!(z.im.abs() < 1e-10);
        }
        // A conjugate-reciprocal pair on the real axis.
        assert!(roots.conjugate_reciprocal_defect() < 1e-9);
    }

    #[test]
    fn constant_polynomial_has_no_signal_roots() {
        let poly = ComplexPolynomial::from_coefficients(vec![
            c(0.0, 0.0),
            c(0.0, 0.0),
            c(3.0, 0.0),
            c(0.0, 0.0),
            c(0.0, 0.0),
        ])
        .unwrap();
        assert_eq!(find_roots(&poly), Err(DoaError::NoSignalRoots));
    }

    #[test]
    fn zero_polynomial_is_rejected() {
        let poly = ComplexPolynomial::from_coefficients(vec![c(0.0, 0.0); 5]).unwrap();
        assert_eq!(find_roots(&poly), Err(DoaError::ZeroPolynomial));
    }

    #[test]
    fn leading_zero_coefficients_reduce_the_degree() {
        // c_{-2} = 0 so the normalized polynomial drops from degree 4 to 3.
        let poly = ComplexPolynomial::from_coefficients(vec![
            c(0.0, 0.0),
            c(1.0, 0.0),
            c(-1.0, 0.0),
            c(0.25, 0.0),
            c(0.5, -0.5),
        ])
        .unwrap();
        let roots = find_roots(&poly).unwrap();
        assert_eq!(roots.len(), 3);
        let ascending = poly.normalized_ascending();
        for &z in roots.roots() {
            let residual = horner(&ascending, z).norm();
            let bound = 1e-6 * 1.0 * z.norm().max(1.0).powi(4);
            assert!(residual <= bound, "residual {residual} above {bound}");
        }
    }

    #[test]
    fn odd_length_is_enforced() {
        assert!(ComplexPolynomial::from_coefficients(vec![c(1.0, 0.0), c(2.0, 0.0)]).is_err());
        assert!(ComplexPolynomial::from_coefficients(vec![]).is_err());
    }

    #[test]
    fn unit_circle_evaluation_matches_laurent_form() {
        let poly = ComplexPolynomial::from_coefficients(vec![
            c(0.5, 0.25),
            c(-1.0, 1.0),
            c(4.0, 0.0),
            c(-1.0, -1.0),
            c(0.5, -0.25),
        ])
        .unwrap();
        for k in 0..17 {
            let omega = -3.0 + 0.4 * k as f64;
            let z = Complex64::from_polar(1.0, omega);
            let direct = poly.evaluate_laurent(z);
            let circle = poly.evaluate_on_unit_circle(omega);
            assert!((direct - circle).norm() < 1e-12);
        }
    }

    #[test]
    fn conjugate_symmetric_input_reports_zero_defect() {
        let poly = ComplexPolynomial::from_coefficients(vec![
            c(0.5, 0.25),
            c(-1.0, 1.0),
            c(4.0, 0.0),
            c(-1.0, -1.0),
            c(0.5, -0.25),
        ])
        .unwrap();
        assert_eq!(poly.conjugate_symmetry_defect(), 0.0);
    }
}
