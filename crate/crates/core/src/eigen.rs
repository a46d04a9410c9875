//! Symmetric band eigensolver.
//!
//! The Fock-space Hamiltonian only couples states whose basis indices differ
//! by at most a few positions, so everything here works on the lower band:
//! Givens bulge chasing reduces the band to tridiagonal form, Sturm-sequence
//! bisection (or implicit QL for the whole spectrum) gives the eigenvalues,
//! and inverse iteration on the original band recovers eigenvectors.

use nalgebra::DMatrix;

use crate::error::{Error, Result};

/// Real symmetric matrix stored as its lower band, diagonal by diagonal.
#[derive(Clone, Debug, PartialEq)]
pub struct SymmetricBand {
    n: usize,
    bandwidth: usize,
    // data[d * n + j] = A[j + d, j]
    data: Vec<f64>,
}

impl SymmetricBand {
    pub fn zeros(n: usize, bandwidth: usize) -> Self {
        Self {
            n,
            bandwidth,
            data: vec![0.0; (bandwidth + 1) * n],
        }
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn bandwidth(&self) -> usize {
        self.bandwidth
    }

    /// Entry `(i, j)`; zero outside the band.
    pub fn get(&self, i: usize, j: usize) -> f64 {
        let (i, j) = if i >= j { (i, j) } else { (j, i) };
        let d = i - j;
        if d > self.bandwidth || i >= self.n {
            0.0
        } else {
            self.data[d * self.n + j]
        }
    }

    /// Sets entries `(i, j)` and `(j, i)`.
    ///
    /// Panics if the position lies outside the band.
    pub fn set(&mut self, i: usize, j: usize, value: f64) {
        let (i, j) = if i >= j { (i, j) } else { (j, i) };
        let d = i - j;
        assert!(
            d <= self.bandwidth && i < self.n,
            "({i}, {j}) is outside a band of width {}",
            self.bandwidth
        );
        self.data[d * self.n + j] = value;
    }

    pub fn diagonal(&self) -> &[f64] {
        &self.data[..self.n]
    }

    pub fn to_dense(&self) -> DMatrix<f64> {
        DMatrix::from_fn(self.n, self.n, |i, j| self.get(i, j))
    }

    pub fn matvec(&self, x: &[f64]) -> Vec<f64> {
        assert_eq!(x.len(), self.n);
        let n = self.n;
        let mut y: Vec<f64> = (0..n).map(|i| self.data[i] * x[i]).collect();
        for d in 1..=self.bandwidth.min(n.saturating_sub(1)) {
            let diag = &self.data[d * n..d * n + n - d];
            for (j, &a) in diag.iter().enumerate() {
                if a != 0.0 {
                    y[j + d] += a * x[j];
                    y[j] += a * x[j + d];
                }
            }
        }
        y
    }

    /// Maximum absolute row sum.
    pub fn inf_norm(&self) -> f64 {
        (0..self.n)
            .map(|i| {
                let lo = i.saturating_sub(self.bandwidth);
                let hi = (i + self.bandwidth).min(self.n - 1);
                (lo..=hi).map(|j| self.get(i, j).abs()).sum::<f64>()
            })
            .fold(0.0, f64::max)
    }
}

/// Symmetric tridiagonal matrix: `diag` of length n, `off` of length n - 1.
#[derive(Clone, Debug, PartialEq)]
pub struct Tridiagonal {
    pub diag: Vec<f64>,
    pub off: Vec<f64>,
}

struct BandWork {
    n: usize,
    w: usize,
    data: Vec<f64>,
}

impl BandWork {
    #[inline]
    fn at(&self, i: usize, j: usize) -> f64 {
        // caller guarantees i >= j
        let d = i - j;
        if d > self.w {
            0.0
        } else {
            self.data[d * self.n + j]
        }
    }

    #[inline]
    fn put(&mut self, i: usize, j: usize, v: f64) {
        let d = i - j;
        if d > self.w {
            debug_assert!(v == 0.0, "fill outside working band at ({i}, {j})");
            return;
        }
        self.data[d * self.n + j] = v;
    }

    /// Similarity transform with the plane rotation acting on rows/columns
    /// `p` and `p + 1`.
    fn rotate(&mut self, p: usize, c: f64, s: f64) {
        let q = p + 1;
        let app = self.at(p, p);
        let aqq = self.at(q, q);
        let apq = self.at(q, p);
        self.put(p, p, c * c * app + 2.0 * c * s * apq + s * s * aqq);
        self.put(q, q, s * s * app - 2.0 * c * s * apq + c * c * aqq);
        self.put(q, p, (c * c - s * s) * apq + c * s * (aqq - app));

        for i in p.saturating_sub(self.w)..p {
            let x = self.at(p, i);
            let y = self.at(q, i);
            if x != 0.0 || y != 0.0 {
                self.put(p, i, c * x + s * y);
                self.put(q, i, -s * x + c * y);
            }
        }
        let hi = (p + self.w).min(self.n - 1);
        for i in (q + 1)..=hi {
            let x = self.at(i, p);
            let y = self.at(i, q);
            if x != 0.0 || y != 0.0 {
                self.put(i, p, c * x + s * y);
                self.put(i, q, -s * x + c * y);
            }
        }
    }
}

/// Reduces a symmetric band matrix to tridiagonal form by Givens bulge
/// chasing, one outer diagonal at a time. Cost is O(n² · bandwidth).
pub fn band_to_tridiagonal(a: &SymmetricBand) -> Tridiagonal {
    let n = a.n;
    if n == 0 {
        return Tridiagonal {
            diag: vec![],
            off: vec![],
        };
    }
    let b = a.bandwidth.min(n - 1);
    let w = b + 1;
    let mut work = BandWork {
        n,
        w,
        data: vec![0.0; (w + 1) * n],
    };
    for d in 0..=b {
        work.data[d * n..d * n + n - d].copy_from_slice(&a.data[d * n..d * n + n - d]);
    }

    for k in (2..=b).rev() {
        for j in 0..n.saturating_sub(k) {
            let mut r = j;
            let mut t = j + k;
            while t < n {
                let y = work.at(t, r);
                if y == 0.0 {
                    break;
                }
                let x = work.at(t - 1, r);
                let rho = x.hypot(y);
                work.rotate(t - 1, x / rho, y / rho);
                work.put(t, r, 0.0);
                r = t - 1;
                t += k;
            }
        }
    }

    Tridiagonal {
        diag: work.data[..n].to_vec(),
        off: work.data[n..2 * n - 1].to_vec(),
    }
}

impl Tridiagonal {
    pub fn dim(&self) -> usize {
        self.diag.len()
    }

    /// Number of eigenvalues strictly below `x` (Sturm sequence count).
    pub fn count_below(&self, x: f64) -> usize {
        let n = self.diag.len();
        if n == 0 {
            return 0;
        }
        let tiny = f64::MIN_POSITIVE.sqrt() * (1.0 + x.abs());
        let mut count = 0;
        let mut q = self.diag[0] - x;
        for i in 0..n {
            if i > 0 {
                let e = self.off[i - 1];
                q = self.diag[i] - x - e * e / q;
            }
            if q == 0.0 {
                q = -tiny;
            }
            if q < 0.0 {
                count += 1;
            }
        }
        count
    }

    fn gershgorin(&self) -> (f64, f64) {
        let n = self.diag.len();
        let mut lo = f64::INFINITY;
        let mut hi = f64::NEG_INFINITY;
        for i in 0..n {
            let left = if i > 0 { self.off[i - 1].abs() } else { 0.0 };
            let right = if i + 1 < n { self.off[i].abs() } else { 0.0 };
            lo = lo.min(self.diag[i] - left - right);
            hi = hi.max(self.diag[i] + left + right);
        }
        (lo, hi)
    }

    /// The `k` smallest eigenvalues in ascending order, by bisection.
    pub fn lowest(&self, k: usize) -> Vec<f64> {
        let n = self.dim();
        let k = k.min(n);
        if k == 0 {
            return vec![];
        }
        let (glo, ghi) = self.gershgorin();
        let scale = glo.abs().max(ghi.abs()).max(f64::MIN_POSITIVE);
        let lo0 = glo - 2.0 * f64::EPSILON * scale;
        let hi0 = ghi + 2.0 * f64::EPSILON * scale;
        let mut out = Vec::with_capacity(k);
        let mut lower = lo0;
        for idx in 0..k {
            // find x with count_below(x) <= idx < count_below(x')
            let mut lo = lower;
            let mut hi = hi0;
            for _ in 0..200 {
                let mid = 0.5 * (lo + hi);
                if mid <= lo || mid >= hi {
                    break;
                }
                if hi - lo <= 4.0 * f64::EPSILON * (lo.abs().max(hi.abs())) + f64::EPSILON * scale {
                    break;
                }
                if self.count_below(mid) > idx {
                    hi = mid;
                } else {
                    lo = mid;
                }
            }
            let value = 0.5 * (lo + hi);
            out.push(value);
            lower = lo;
        }
        out
    }

    /// All eigenvalues, ascending, by implicit QL with Wilkinson shifts.
    pub fn all_eigenvalues(&self) -> Result<Vec<f64>> {
        let n = self.dim();
        let mut d = self.diag.clone();
        let mut e = self.off.clone();
        e.push(0.0);
        for l in 0..n {
            let mut iter = 0;
            loop {
                let mut m = l;
                while m + 1 < n {
                    let dd = d[m].abs() + d[m + 1].abs();
                    if e[m].abs() <= f64::EPSILON * dd {
                        break;
                    }
                    m += 1;
                }
                if m == l {
                    break;
                }
                iter += 1;
                if iter > 60 {
                    return Err(Error::NoConvergence(format!(
                        "implicit QL stalled at index {l} of {n} after 60 sweeps"
                    )));
                }
                let mut g = (d[l + 1] - d[l]) / (2.0 * e[l]);
                let mut r = g.hypot(1.0);
                g = d[m] - d[l] + e[l] / (g + r.copysign(g));
                let (mut s, mut c, mut p) = (1.0, 1.0, 0.0);
                let mut i = m;
                let mut underflow = false;
                while i > l {
                    i -= 1;
                    let f = s * e[i];
                    let b = c * e[i];
                    r = f.hypot(g);
                    e[i + 1] = r;
                    if r == 0.0 {
                        d[i + 1] -= p;
                        e[m] = 0.0;
                        underflow = true;
                        break;
                    }
                    s = f / r;
                    c = g / r;
                    g = d[i + 1] - p;
                    r = (d[i] - g) * s + 2.0 * c * b;
                    p = s * r;
                    d[i + 1] = g + p;
                    g = c * r - b;
                }
                if underflow {
                    continue;
                }
                d[l] -= p;
                e[l] = g;
                e[m] = 0.0;
            }
        }
        d.sort_by(f64::total_cmp);
        Ok(d)
    }
}

/// LU factorization with partial pivoting of `A - shift·I` for a band `A`.
struct ShiftedBandLu {
    // row k of U: values for columns k, k+1, ...
    upper: Vec<Vec<f64>>,
    // multipliers of elimination step k for positions k+1..=k+b
    lower: Vec<Vec<f64>>,
    pivots: Vec<usize>,
}

/// A matrix row holding columns `start..start + vals.len()`.
struct SparseRow {
    start: usize,
    vals: Vec<f64>,
}

impl SparseRow {
    fn get(&self, col: usize) -> f64 {
        if col < self.start || col >= self.start + self.vals.len() {
            0.0
        } else {
            self.vals[col - self.start]
        }
    }

    fn end(&self) -> usize {
        self.start + self.vals.len()
    }

    fn extend_to(&mut self, end: usize) {
        if end > self.end() {
            self.vals.resize(end - self.start, 0.0);
        }
    }
}

impl ShiftedBandLu {
    fn new(a: &SymmetricBand, shift: f64, pivot_floor: f64) -> Self {
        let n = a.n;
        let b = a.bandwidth.min(n.saturating_sub(1));
        let mut rows: Vec<SparseRow> = (0..n)
            .map(|i| {
                let start = i.saturating_sub(b);
                let end = (i + b).min(n - 1);
                let vals = (start..=end)
                    .map(|j| if i == j { a.get(i, j) - shift } else { a.get(i, j) })
                    .collect();
                SparseRow { start, vals }
            })
            .collect();

        let mut upper = Vec::with_capacity(n);
        let mut lower = Vec::with_capacity(n);
        let mut pivots = vec![0; n];
        for k in 0..n {
            let last = (k + b).min(n - 1);
            let mut p = k;
            let mut best = rows[k].get(k).abs();
            for (i, row) in rows.iter().enumerate().take(last + 1).skip(k + 1) {
                let v = row.get(k).abs();
                if v > best {
                    best = v;
                    p = i;
                }
            }
            pivots[k] = p;
            rows.swap(k, p);
            let mut piv = rows[k].get(k);
            if piv.abs() < pivot_floor {
                piv = if piv < 0.0 { -pivot_floor } else { pivot_floor };
            }
            let row_end = rows[k].end().max(k + 1);
            let mut urow: Vec<f64> = (k..row_end).map(|j| rows[k].get(j)).collect();
            urow[0] = piv;

            let mut mult = Vec::with_capacity(last - k);
            for row in rows.iter_mut().take(last + 1).skip(k + 1) {
                let factor = row.get(k) / piv;
                mult.push(factor);
                if factor != 0.0 {
                    row.extend_to(row_end);
                    let start = row.start;
                    for (off, &u) in urow.iter().enumerate().skip(1) {
                        row.vals[k + off - start] -= factor * u;
                    }
                    row.vals[k - start] = 0.0;
                }
            }
            upper.push(urow);
            lower.push(mult);
        }
        Self { upper, lower, pivots }
    }

    fn solve(&self, rhs: &mut [f64]) {
        let n = rhs.len();
        for k in 0..n {
            rhs.swap(k, self.pivots[k]);
            let xk = rhs[k];
            for (off, &l) in self.lower[k].iter().enumerate() {
                rhs[k + 1 + off] -= l * xk;
            }
        }
        for k in (0..n).rev() {
            let row = &self.upper[k];
            let mut s = rhs[k];
            for (off, &u) in row.iter().enumerate().skip(1) {
                s -= u * rhs[k + off];
            }
            rhs[k] = s / row[0];
        }
    }
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn normalize(v: &mut [f64]) -> f64 {
    let norm = dot(v, v).sqrt();
    if norm > 0.0 {
        v.iter_mut().for_each(|x| *x /= norm);
    }
    norm
}

/// Eigenvectors of `a` for the given (ascending) eigenvalues by inverse
/// iteration. Vectors belonging to a cluster of nearby eigenvalues are
/// orthogonalized against each other.
///
/// Returns the vectors and the largest residual `‖A v − λ v‖`.
pub fn inverse_iteration(a: &SymmetricBand, eigenvalues: &[f64], residual_tol: f64) -> Result<(Vec<Vec<f64>>, f64)> {
    let n = a.n;
    let norm = a.inf_norm().max(f64::MIN_POSITIVE);
    let cluster_tol = 1e-3 * norm;
    let pivot_floor = f64::EPSILON * norm;
    let mut vectors: Vec<Vec<f64>> = Vec::with_capacity(eigenvalues.len());
    let mut worst = 0.0f64;

    for (idx, &lambda) in eigenvalues.iter().enumerate() {
        let lu = ShiftedBandLu::new(a, lambda, pivot_floor);
        let cluster: Vec<usize> = (0..idx)
            .filter(|&j| (eigenvalues[j] - lambda).abs() < cluster_tol)
            .collect();
        // deterministic, generic starting vector
        let mut x: Vec<f64> = (0..n)
            .map(|i| {
                let t = (i as f64 + 1.0) * 0.618_033_988_749_895 + idx as f64 * 0.414_213_562_373;
                (t - t.floor()) - 0.5
            })
            .collect();
        normalize(&mut x);
        let mut residual = f64::INFINITY;
        for _ in 0..8 {
            lu.solve(&mut x);
            for _ in 0..2 {
                for &j in &cluster {
                    let c = dot(&x, &vectors[j]);
                    x.iter_mut().zip(&vectors[j]).for_each(|(xi, vj)| *xi -= c * vj);
                }
            }
            if normalize(&mut x) == 0.0 || x.iter().any(|v| !v.is_finite()) {
                return Err(Error::NoConvergence(format!(
                    "inverse iteration broke down for eigenvalue #{idx} ({lambda:e})"
                )));
            }
            let ax = a.matvec(&x);
            residual = ax
                .iter()
                .zip(&x)
                .map(|(u, v)| (u - lambda * v).powi(2))
                .sum::<f64>()
                .sqrt();
            if residual <= 1e-3 * residual_tol {
                break;
            }
        }
        if residual > residual_tol {
            return Err(Error::NoConvergence(format!(
                "inverse iteration residual {residual:e} exceeds {residual_tol:e} for eigenvalue #{idx} ({lambda:e})"
            )));
        }
        worst = worst.max(residual);
        vectors.push(x);
    }
    Ok((vectors, worst))
}
