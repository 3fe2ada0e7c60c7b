//! Dense symmetric eigendecomposition, singular value decomposition, and the
//! nearest orthonormal-matrix kernel.
//!
//! The eigensolver reduces the matrix to tridiagonal form with Householder
//! reflections and diagonalizes it with the implicit-shift QL iteration, in
//! the classic EISPACK/Jama formulation. The SVD is a one-sided Jacobi
//! sweep. Both are deterministic: identical input produces bit-identical
//! output.

use nalgebra::DMatrix;

use crate::{Error, Result};

/// Eigendecomposition of a symmetric matrix: `a = vectors * diag(values) *
/// vectors^T` with `values` nonincreasing and orthonormal columns.
///
/// Column signs are normalized so that each eigenvector's entry of largest
/// absolute value is positive (ties broken by lowest index).
#[derive(Debug, Clone)]
pub struct SpectralFactorization {
    pub values: Vec<f64>,
    pub vectors: DMatrix<f64>,
}

/// Full singular value decomposition `m = left * sigma~ * right^T` with
/// `sigma` nonnegative and nonincreasing, `left` and `right` orthogonal.
#[derive(Debug, Clone)]
pub struct SvdFactorization {
    pub left: DMatrix<f64>,
    pub sigma: Vec<f64>,
    pub right: DMatrix<f64>,
}

fn max_abs(m: &DMatrix<f64>) -> f64 {
    m.iter().fold(0.0f64, |acc, &v| acc.max(v.abs()))
}

fn all_finite(m: &DMatrix<f64>) -> bool {
    m.iter().all(|v| v.is_finite())
}

/// Symmetric eigendecomposition. The input must be square and symmetric
/// within `1e-12` relative asymmetry; it is symmetrized as `(a + a^T)/2`
/// before factorization.
pub fn eigh(a: &DMatrix<f64>) -> Result<SpectralFactorization> {
    let n = a.nrows();
    if n != a.ncols() {
        return Err(Error::SizeMismatch(format!(
            "matrix is {}x{}",
            a.nrows(),
            a.ncols()
        )));
    }
    if !all_finite(a) {
        return Err(Error::NonFinite);
    }
    let scale = max_abs(a);
    let mut asym = 0.0f64;
    for i in 0..n {
        for j in (i + 1)..n {
            asym = asym.max((a[(i, j)] - a[(j, i)]).abs());
        }
    }
    if asym > 1e-12 * scale.max(1.0) {
        return Err(Error::SizeMismatch(format!(
            "matrix asymmetry {:.3e} exceeds tolerance",
            asym
        )));
    }

    if n == 0 {
        return Ok(SpectralFactorization {
            values: Vec::new(),
            vectors: DMatrix::zeros(0, 0),
        });
    }

    let mut v = DMatrix::zeros(n, n);
    for i in 0..n {
        for j in 0..n {
            v[(i, j)] = 0.5 * (a[(i, j)] + a[(j, i)]);
        }
    }
    let mut d = vec![0.0f64; n];
    let mut e = vec![0.0f64; n];

    tred2(&mut v, &mut d, &mut e);
    tql2(&mut v, &mut d, &mut e)?;

    // Reorder nonincreasing (tql2 sorts ascending) and fix column signs.
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| d[j].partial_cmp(&d[i]).expect("finite eigenvalues"));
    let mut values = Vec::with_capacity(n);
    let mut vectors = DMatrix::zeros(n, n);
    for (newcol, &old) in order.iter().enumerate() {
        values.push(d[old]);
        for r in 0..n {
            vectors[(r, newcol)] = v[(r, old)];
        }
    }
    normalize_column_signs(&mut vectors);

    Ok(SpectralFactorization { values, vectors })
}

/// Makes the entry of largest absolute value in each column positive,
/// ties broken by lowest row index.
fn normalize_column_signs(m: &mut DMatrix<f64>) {
    let (rows, cols) = m.shape();
    for c in 0..cols {
        let mut best = 0usize;
        let mut best_abs = 0.0f64;
        for r in 0..rows {
            let v = m[(r, c)].abs();
            if v > best_abs {
                best_abs = v;
                best = r;
            }
        }
        if m[(best, c)] < 0.0 {
            for r in 0..rows {
                m[(r, c)] = -m[(r, c)];
            }
        }
    }
}

/// Householder reduction to symmetric tridiagonal form, after
/// Bowdler-Martin-Reinsch-Wilkinson (Handbook for Automatic Computation)
/// by way of EISPACK `tred2`.
fn tred2(v: &mut DMatrix<f64>, d: &mut [f64], e: &mut [f64]) {
    let n = d.len();
    for j in 0..n {
        d[j] = v[(n - 1, j)];
    }

    for i in (1..n).rev() {
        let mut scale = 0.0f64;
        let mut h = 0.0f64;
        for item in d.iter().take(i) {
            scale += item.abs();
        }
        if scale == 0.0 {
            e[i] = d[i - 1];
            for j in 0..i {
                d[j] = v[(i - 1, j)];
                v[(i, j)] = 0.0;
                v[(j, i)] = 0.0;
            }
        } else {
            for k in 0..i {
                d[k] /= scale;
                h += d[k] * d[k];
            }
            let f = d[i - 1];
            let mut g = h.sqrt();
            if f > 0.0 {
                g = -g;
            }
            e[i] = scale * g;
            h -= f * g;
            d[i - 1] = f - g;
            for item in e.iter_mut().take(i) {
                *item = 0.0;
            }

            for j in 0..i {
                let f = d[j];
                v[(j, i)] = f;
                let mut g = e[j] + v[(j, j)] * f;
                for k in (j + 1)..i {
                    g += v[(k, j)] * d[k];
                    e[k] += v[(k, j)] * f;
                }
                e[j] = g;
            }
            let mut f = 0.0f64;
            for j in 0..i {
                e[j] /= h;
                f += e[j] * d[j];
            }
            let hh = f / (h + h);
            for j in 0..i {
                e[j] -= hh * d[j];
            }
            for j in 0..i {
                let f = d[j];
                let g = e[j];
                for k in j..i {
                    v[(k, j)] -= f * e[k] + g * d[k];
                }
                d[j] = v[(i - 1, j)];
                v[(i, j)] = 0.0;
            }
        }
        d[i] = h;
    }

    // Accumulate transformations.
    for i in 0..(n - 1) {
        v[(n - 1, i)] = v[(i, i)];
        v[(i, i)] = 1.0;
        let h = d[i + 1];
        if h != 0.0 {
            for k in 0..=i {
                d[k] = v[(k, i + 1)] / h;
            }
            for j in 0..=i {
                let mut g = 0.0f64;
                for k in 0..=i {
                    g += v[(k, i + 1)] * v[(k, j)];
                }
                for k in 0..=i {
                    v[(k, j)] -= g * d[k];
                }
            }
        }
        for k in 0..=i {
            v[(k, i + 1)] = 0.0;
        }
    }
    for j in 0..n {
        d[j] = v[(n - 1, j)];
        v[(n - 1, j)] = 0.0;
    }
    v[(n - 1, n - 1)] = 1.0;
    e[0] = 0.0;
}

/// Implicit-shift QL iteration on the tridiagonal form, accumulating the
/// rotations into `v` (EISPACK `tql2`). Eigenvalues come out ascending.
fn tql2(v: &mut DMatrix<f64>, d: &mut [f64], e: &mut [f64]) -> Result<()> {
    let n = d.len();
    for i in 1..n {
        e[i - 1] = e[i];
    }
    e[n - 1] = 0.0;

    let sweep_cap = 30 * n.max(1);
    let mut sweeps = 0usize;
    let mut f = 0.0f64;
    let mut tst1 = 0.0f64;
    let eps = 2.0f64.powi(-52);

    for l in 0..n {
        tst1 = tst1.max(d[l].abs() + e[l].abs());
        let mut m = l;
        while m < n {
            if e[m].abs() <= eps * tst1 {
                break;
            }
            m += 1;
        }
        if m >= n {
            m = n - 1;
        }

        if m > l {
            loop {
                sweeps += 1;
                if sweeps > sweep_cap {
                    return Err(Error::NoConvergence {
                        sweeps: sweep_cap,
                        residual: e[l].abs(),
                    });
                }

                let g = d[l];
                let mut p = (d[l + 1] - g) / (2.0 * e[l]);
                let mut r = p.hypot(1.0);
                if p < 0.0 {
                    r = -r;
                }
                d[l] = e[l] / (p + r);
                d[l + 1] = e[l] * (p + r);
                let dl1 = d[l + 1];
                let mut h = g - d[l];
                for item in d.iter_mut().take(n).skip(l + 2) {
                    *item -= h;
                }
                f += h;

                p = d[m];
                let mut c = 1.0f64;
                let mut c2 = c;
                let mut c3 = c;
                let el1 = e[l + 1];
                let mut s = 0.0f64;
                let mut s2 = 0.0f64;
                for i in (l..m).rev() {
                    c3 = c2;
                    c2 = c;
                    s2 = s;
                    let g = c * e[i];
                    h = c * p;
                    r = p.hypot(e[i]);
                    e[i + 1] = s * r;
                    s = e[i] / r;
                    c = p / r;
                    p = c * d[i] - s * g;
                    d[i + 1] = h + s * (c * g + s * d[i]);

                    rotate_adjacent_columns(v, i, c, s);
                }
                p = -s * s2 * c3 * el1 * e[l] / dl1;
                e[l] = s * p;
                d[l] = c * p;

                if e[l].abs() <= eps * tst1 {
                    break;
                }
            }
        }
        d[l] += f;
        e[l] = 0.0;
    }

    // Sort eigenvalues ascending, swapping eigenvector columns along.
    for i in 0..n.saturating_sub(1) {
        let mut k = i;
        let mut p = d[i];
        for j in (i + 1)..n {
            if d[j] < p {
                k = j;
                p = d[j];
            }
        }
        if k != i {
            d[k] = d[i];
            d[i] = p;
            for r in 0..n {
                let tmp = v[(r, i)];
                v[(r, i)] = v[(r, k)];
                v[(r, k)] = tmp;
            }
        }
    }
    Ok(())
}

/// Applies a Givens rotation to columns `i` and `i + 1` of `v`. Columns are
/// contiguous in memory, so this works on two column slices.
#[inline]
fn rotate_adjacent_columns(v: &mut DMatrix<f64>, i: usize, c: f64, s: f64) {
    let n = v.nrows();
    let data = v.as_mut_slice();
    let (left, right) = data[i * n..(i + 2) * n].split_at_mut(n);
    for (a, b) in left.iter_mut().zip(right.iter_mut()) {
        let h = *b;
        *b = s * *a + c * h;
        *a = c * *a - s * h;
    }
}

/// One-sided Jacobi singular value decomposition.
pub fn svd(m: &DMatrix<f64>) -> Result<SvdFactorization> {
    if !all_finite(m) {
        return Err(Error::NonFinite);
    }
    let (rows, cols) = m.shape();
    if rows < cols {
        let f = svd(&m.transpose())?;
        return Ok(SvdFactorization {
            left: f.right,
            sigma: f.sigma,
            right: f.left,
        });
    }
    if cols == 0 {
        return Ok(SvdFactorization {
            left: complete_orthonormal_basis(Vec::new(), rows),
            sigma: Vec::new(),
            right: DMatrix::zeros(0, 0),
        });
    }

    let mut a = m.clone();
    let mut v = DMatrix::<f64>::identity(cols, cols);
    let tol = 1e-15;
    let sweep_cap = 60;
    let mut sweep = 0;
    loop {
        sweep += 1;
        if sweep > sweep_cap {
            return Err(Error::NoConvergence {
                sweeps: sweep_cap,
                residual: off_diag_residual(&a),
            });
        }
        let mut rotated = false;
        for p in 0..cols - 1 {
            for q in (p + 1)..cols {
                let (alpha, beta, gamma) = column_moments(&a, p, q);
                if gamma == 0.0 || gamma.abs() <= tol * (alpha * beta).sqrt() {
                    continue;
                }
                rotated = true;
                let zeta = (beta - alpha) / (2.0 * gamma);
                let t = zeta.signum() / (zeta.abs() + (1.0 + zeta * zeta).sqrt());
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = c * t;
                rotate_column_pair(&mut a, p, q, c, s);
                rotate_column_pair(&mut v, p, q, c, s);
            }
        }
        if !rotated {
            break;
        }
    }

    // Column norms are the singular values; sort nonincreasing.
    let mut norms: Vec<f64> = (0..cols).map(|j| a.column(j).norm()).collect();
    let mut order: Vec<usize> = (0..cols).collect();
    order.sort_by(|&i, &j| norms[j].partial_cmp(&norms[i]).expect("finite norms"));
    let sorted_a = reorder_columns(&a, &order);
    let right = reorder_columns(&v, &order);
    norms.sort_by(|x, y| y.partial_cmp(x).expect("finite norms"));

    let sigma_max = norms.first().copied().unwrap_or(0.0);
    let rank_tol = sigma_max * 1e-13 * (rows.max(cols) as f64);
    let mut thin_cols: Vec<Option<Vec<f64>>> = Vec::with_capacity(cols);
    for (j, &sj) in norms.iter().enumerate() {
        if sj > rank_tol && sj > 0.0 {
            thin_cols.push(Some(
                (0..rows).map(|r| sorted_a[(r, j)] / sj).collect(),
            ));
        } else {
            thin_cols.push(None);
        }
    }
    let left = assemble_left_basis(thin_cols, rows);
    let mut fact = SvdFactorization {
        left,
        sigma: norms,
        right,
    };
    normalize_svd_signs(&mut fact, rank_tol);
    Ok(fact)
}

fn off_diag_residual(a: &DMatrix<f64>) -> f64 {
    let cols = a.ncols();
    let mut worst = 0.0f64;
    for p in 0..cols {
        for q in (p + 1)..cols {
            let (_, _, gamma) = column_moments(a, p, q);
            worst = worst.max(gamma.abs());
        }
    }
    worst
}

fn column_moments(a: &DMatrix<f64>, p: usize, q: usize) -> (f64, f64, f64) {
    let cp = a.column(p);
    let cq = a.column(q);
    let mut alpha = 0.0;
    let mut beta = 0.0;
    let mut gamma = 0.0;
    for (x, y) in cp.iter().zip(cq.iter()) {
        alpha += x * x;
        beta += y * y;
        gamma += x * y;
    }
    (alpha, beta, gamma)
}

fn rotate_column_pair(a: &mut DMatrix<f64>, p: usize, q: usize, c: f64, s: f64) {
    let rows = a.nrows();
    for r in 0..rows {
        let x = a[(r, p)];
        let y = a[(r, q)];
        a[(r, p)] = c * x - s * y;
        a[(r, q)] = s * x + c * y;
    }
}

fn reorder_columns(a: &DMatrix<f64>, order: &[usize]) -> DMatrix<f64> {
    let (rows, cols) = a.shape();
    let mut out = DMatrix::zeros(rows, cols);
    for (newcol, &old) in order.iter().enumerate() {
        for r in 0..rows {
            out[(r, newcol)] = a[(r, old)];
        }
    }
    out
}

/// Fills a full orthonormal `rows x rows` basis: provided columns first
/// (where present), remaining slots filled deterministically by picking, at
/// each step, the standard basis vector with the largest residual after
/// Gram-Schmidt against the columns built so far.
fn assemble_left_basis(thin: Vec<Option<Vec<f64>>>, rows: usize) -> DMatrix<f64> {
    let mut built: Vec<Vec<f64>> = Vec::with_capacity(rows);
    let mut slots: Vec<Option<usize>> = Vec::new(); // index into `built` per output column
    for col in thin.into_iter() {
        match col {
            Some(c) => {
                slots.push(Some(built.len()));
                built.push(c);
            }
            None => slots.push(None),
        }
    }
    let total = rows;
    while built.len() < total {
        let mut best_res: Option<(f64, Vec<f64>)> = None;
        for k in 0..rows {
            let mut cand = vec![0.0f64; rows];
            cand[k] = 1.0;
            // two Gram-Schmidt passes for stability
            for _ in 0..2 {
                for b in &built {
                    let dot: f64 = cand.iter().zip(b.iter()).map(|(x, y)| x * y).sum();
                    for (c, bv) in cand.iter_mut().zip(b.iter()) {
                        *c -= dot * bv;
                    }
                }
            }
            let norm = cand.iter().map(|x| x * x).sum::<f64>().sqrt();
            if best_res.as_ref().map_or(true, |(bn, _)| norm > *bn) {
                best_res = Some((norm, cand));
            }
        }
        let (norm, mut cand) = best_res.expect("rows > 0");
        for c in cand.iter_mut() {
            *c /= norm;
        }
        built.push(cand);
    }
    // remaining output columns (rank-deficient slots and columns beyond the
    // thin part) take the completion vectors in order
    let mut next_fill = slots.iter().filter(|s| s.is_some()).count();
    let mut out = DMatrix::zeros(rows, rows);
    for c in 0..rows {
        let src = if c < slots.len() {
            match slots[c] {
                Some(idx) => idx,
                None => {
                    let idx = next_fill;
                    next_fill += 1;
                    idx
                }
            }
        } else {
            let idx = next_fill;
            next_fill += 1;
            idx
        };
        for r in 0..rows {
            out[(r, c)] = built[src][r];
        }
    }
    out
}

fn complete_orthonormal_basis(start: Vec<Vec<f64>>, rows: usize) -> DMatrix<f64> {
    assemble_left_basis(start.into_iter().map(Some).collect(), rows)
}

/// Same largest-entry-positive convention as the eigensolver; left and right
/// singular vectors flip together so the product is unchanged.
fn normalize_svd_signs(f: &mut SvdFactorization, rank_tol: f64) {
    let rows = f.left.nrows();
    let cols = f.right.nrows();
    for j in 0..f.sigma.len().min(cols) {
        let mut best = 0usize;
        let mut best_abs = 0.0f64;
        for r in 0..rows {
            let v = f.left[(r, j)].abs();
            if v > best_abs {
                best_abs = v;
                best = r;
            }
        }
        if f.left[(best, j)] < 0.0 {
            for r in 0..rows {
                f.left[(r, j)] = -f.left[(r, j)];
            }
            if f.sigma[j] > rank_tol {
                for r in 0..cols {
                    f.right[(r, j)] = -f.right[(r, j)];
                }
            }
        }
    }
    // completion columns beyond the thin part
    for j in f.sigma.len()..rows {
        let mut best = 0usize;
        let mut best_abs = 0.0f64;
        for r in 0..rows {
            let v = f.left[(r, j)].abs();
            if v > best_abs {
                best_abs = v;
                best = r;
            }
        }
        if f.left[(best, j)] < 0.0 {
            for r in 0..rows {
                f.left[(r, j)] = -f.left[(r, j)];
            }
        }
    }
}

/// Nearest matrix with orthonormal columns (rows, when the input is wide) in
/// the Frobenius norm: replaces every singular value by one.
pub fn closest_orthogonal(m: &DMatrix<f64>) -> Result<DMatrix<f64>> {
    let (rows, cols) = m.shape();
    if rows < cols {
        return Ok(closest_orthogonal(&m.transpose())?.transpose());
    }
    let f = svd(m)?;
    let mut out = DMatrix::zeros(rows, cols);
    // P * Q^T with P the first `cols` left singular vectors
    for i in 0..rows {
        for j in 0..cols {
            let mut acc = 0.0;
            for k in 0..cols {
                acc += f.left[(i, k)] * f.right[(j, k)];
            }
            out[(i, j)] = acc;
        }
    }
    Ok(out)
}

/// Product with the flip (anti-diagonal permutation) matrix: the columns of
/// `m` in reversed order.
pub fn flip_product(m: &DMatrix<f64>) -> DMatrix<f64> {
    let (rows, cols) = m.shape();
    let mut out = DMatrix::zeros(rows, cols);
    for c in 0..cols {
        for r in 0..rows {
            out[(r, c)] = m[(r, cols - 1 - c)];
        }
    }
    out
}


#[cfg(test)]
mod tests {
    use super::test_support::random_orthogonal;
    use super::*;
    use rand::Rng;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn random_matrix(rows: usize, cols: usize, rng: &mut ChaCha8Rng) -> DMatrix<f64> {
        DMatrix::from_fn(rows, cols, |_, _| rng.gen::<f64>() * 2.0 - 1.0)
    }

    fn random_symmetric(n: usize, rng: &mut ChaCha8Rng) -> DMatrix<f64> {
        let m = random_matrix(n, n, rng);
        let mt = m.transpose();
        (m + mt) * 0.5
    }

    fn orthonormality_residual(m: &DMatrix<f64>) -> f64 {
        let g = m.transpose() * m;
        let mut worst = 0.0f64;
        for i in 0..g.nrows() {
            for j in 0..g.ncols() {
                let target = if i == j { 1.0 } else { 0.0 };
                worst = worst.max((g[(i, j)] - target).abs());
            }
        }
        worst
    }

    #[test]
    fn eigh_diagonal() {
        let a = DMatrix::from_diagonal(&nalgebra::DVector::from_vec(vec![3.0, 1.0, -2.0]));
        let f = eigh(&a).unwrap();
        assert_eq!(f.values, vec![3.0, 1.0, -2.0]);
        // eigenvectors are the identity columns up to order/sign
        for c in 0..3 {
            let col = f.vectors.column(c);
            let ones = col.iter().filter(|v| (v.abs() - 1.0).abs() < 1e-12).count();
            let zeros = col.iter().filter(|v| v.abs() < 1e-12).count();
            assert_eq!((ones, zeros), (1, 2));
        }
    }

    #[test]
    fn eigh_two_cycle() {
        let a = DMatrix::from_row_slice(2, 2, &[0.0, 1.0, 1.0, 0.0]);
        let f = eigh(&a).unwrap();
        assert!((f.values[0] - 1.0).abs() < 1e-14);
        assert!((f.values[1] + 1.0).abs() < 1e-14);
    }

    #[test]
    fn eigh_reconstruction_residual() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let a = random_symmetric(50, &mut rng);
        let f = eigh(&a).unwrap();
        let lam_max = f.values.iter().fold(0.0f64, |m, v| m.max(v.abs()));

        let d = DMatrix::from_diagonal(&nalgebra::DVector::from_vec(f.values.clone()));
        let rebuilt = &f.vectors * d * f.vectors.transpose();
        let residual = max_abs(&(&rebuilt - &a));
        assert!(
            residual <= 1e-10 * 50.0 * lam_max,
            "residual {:.3e}",
            residual
        );
        assert!(orthonormality_residual(&f.vectors) <= 1e-10 * 50.0);
    }

    #[test]
    fn eigh_values_nonincreasing_and_deterministic() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let a = random_symmetric(17, &mut rng);
        let f1 = eigh(&a).unwrap();
        let f2 = eigh(&a).unwrap();
        assert!(f1.values.windows(2).all(|w| w[0] >= w[1]));
        assert_eq!(f1.values, f2.values);
        assert_eq!(f1.vectors, f2.vectors);
    }

    #[test]
    fn eigh_rejects_bad_input() {
        let a = DMatrix::from_row_slice(2, 2, &[0.0, 1.0, 2.0, 0.0]);
        assert!(eigh(&a).is_err());
        let nan = DMatrix::from_row_slice(1, 1, &[f64::NAN]);
        assert!(eigh(&nan).is_err());
    }

    #[test]
    fn eigh_one_by_one() {
        let a = DMatrix::from_row_slice(1, 1, &[4.5]);
        let f = eigh(&a).unwrap();
        assert_eq!(f.values, vec![4.5]);
        assert_eq!(f.vectors[(0, 0)], 1.0);
    }

    #[test]
    fn svd_identity() {
        let id = DMatrix::<f64>::identity(4, 4);
        let f = svd(&id).unwrap();
        for s in &f.sigma {
            assert!((s - 1.0).abs() < 1e-14);
        }
    }

    #[test]
    fn svd_diagonal() {
        let a = DMatrix::from_row_slice(2, 2, &[2.0, 0.0, 0.0, 0.5]);
        let f = svd(&a).unwrap();
        assert!((f.sigma[0] - 2.0).abs() < 1e-14);
        assert!((f.sigma[1] - 0.5).abs() < 1e-14);
    }

    #[test]
    fn svd_matches_gram_eigenvalues() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let m = random_matrix(8, 5, &mut rng);
        let f = svd(&m).unwrap();
        let gram = m.transpose() * &m;
        let ge = eigh(&gram).unwrap();
        for (s, lam) in f.sigma.iter().zip(ge.values.iter()) {
            assert!((s - lam.max(0.0).sqrt()).abs() < 1e-10, "{} vs {}", s, lam);
        }
    }

    #[test]
    fn svd_full_reconstruction() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for &(rows, cols) in &[(6usize, 6usize), (8, 5), (5, 8), (7, 3)] {
            let m = random_matrix(rows, cols, &mut rng);
            let f = svd(&m).unwrap();
            assert_eq!(f.left.shape(), (rows, rows));
            assert_eq!(f.right.shape(), (cols, cols));
            let k = rows.min(cols);
            let mut sig = DMatrix::zeros(rows, cols);
            for i in 0..k {
                sig[(i, i)] = f.sigma[i];
            }
            let rebuilt = &f.left * sig * f.right.transpose();
            let s1 = f.sigma[0];
            let res = max_abs(&(&rebuilt - &m));
            assert!(res <= 1e-10 * (rows.max(cols) as f64) * s1.max(1.0));
            assert!(orthonormality_residual(&f.left) < 1e-12);
            assert!(orthonormality_residual(&f.right) < 1e-12);
        }
    }

    #[test]
    fn svd_rank_deficient() {
        // rank-1 3x3
        let u = DMatrix::from_column_slice(3, 1, &[1.0, 2.0, 2.0]);
        let m = &u * u.transpose();
        let f = svd(&m).unwrap();
        assert!((f.sigma[0] - 9.0).abs() < 1e-12);
        assert!(f.sigma[1].abs() < 1e-12);
        assert!(orthonormality_residual(&f.left) < 1e-12);
    }

    #[test]
    fn closest_orthogonal_fixes_orthogonal_input() {
        // a rotation matrix maps to itself
        let th = 0.7f64;
        let q = DMatrix::from_row_slice(2, 2, &[th.cos(), -th.sin(), th.sin(), th.cos()]);
        let p = closest_orthogonal(&q).unwrap();
        assert!(max_abs(&(&p - &q)) < 1e-12);
    }

    #[test]
    fn closest_orthogonal_of_diagonal_is_identity() {
        let a = DMatrix::from_row_slice(2, 2, &[2.0, 0.0, 0.0, 0.5]);
        let p = closest_orthogonal(&a).unwrap();
        let id = DMatrix::<f64>::identity(2, 2);
        assert!(max_abs(&(&p - &id)) < 1e-12);
    }

    #[test]
    fn closest_orthogonal_beats_random_samples() {
        let mut rng = ChaCha8Rng::seed_from_u64(13);
        let m = random_matrix(6, 6, &mut rng);
        let p = closest_orthogonal(&m).unwrap();
        assert!(orthonormality_residual(&p) < 1e-10);
        let dist = (&p - &m).norm();
        for _ in 0..10_000 {
            let r = random_orthogonal(6, &mut rng);
            assert!(dist <= (&r - &m).norm() + 1e-12);
        }
    }

    #[test]
    fn closest_orthogonal_tall_input() {
        let mut rng = ChaCha8Rng::seed_from_u64(17);
        let m = random_matrix(7, 3, &mut rng);
        let p = closest_orthogonal(&m).unwrap();
        assert_eq!(p.shape(), (7, 3));
        assert!(orthonormality_residual(&p) < 1e-10);
    }

    #[test]
    fn flip_reverses_columns() {
        let m = DMatrix::from_row_slice(2, 3, &[1.0, 2.0, 3.0, 4.0, 5.0, 6.0]);
        let flipped = flip_product(&m);
        assert_eq!(flipped, DMatrix::from_row_slice(2, 3, &[3.0, 2.0, 1.0, 6.0, 5.0, 4.0]));
        assert_eq!(flip_product(&flipped), m);
        let single = DMatrix::from_row_slice(2, 1, &[1.0, 2.0]);
        assert_eq!(flip_product(&single), single);
    }

    #[test]
    fn symmetric_spectrum_exponential_sums_match() {
        // For an exactly symmetric multiset {±λ}, the multisets {e^{-λ}} and
        // {e^{λ}} coincide, so their sorted element lists match bitwise.
        let lam: [f64; 5] = [1.5, 0.25, 0.0, -0.25, -1.5];
        let mut neg: Vec<f64> = lam.iter().map(|v| (-v).exp()).collect();
        let mut pos: Vec<f64> = lam.iter().map(|v| v.exp()).collect();
        neg.sort_by(|a, b| a.partial_cmp(b).unwrap());
        pos.sort_by(|a, b| a.partial_cmp(b).unwrap());
        for (a, b) in neg.iter().zip(pos.iter()) {
            assert_eq!(a.to_bits(), b.to_bits());
        }
    }

    #[test]
    fn spectra_of_reconstruction_match_values() {
        let mut rng = ChaCha8Rng::seed_from_u64(23);
        let a = random_symmetric(12, &mut rng);
        let f = eigh(&a).unwrap();
        let d = DMatrix::from_diagonal(&nalgebra::DVector::from_vec(f.values.clone()));
        let rebuilt = &f.vectors * d * f.vectors.transpose();
        let f2 = eigh(&rebuilt).unwrap();
        let scale = f.values[0].abs().max(f.values[11].abs()).max(1.0);
        for (x, y) in f.values.iter().zip(f2.values.iter()) {
            assert!((x - y).abs() <= 1e-9 * scale);
        }
    }
}
