//! Dense vector helpers and the orthonormalization routines used to build
//! the orthogonal-shift direction.
//!
//! Vectors are plain `[f64]` slices; a matrix is a list of column vectors.

use crate::error::LinalgError;

/// Norm below which a vector is treated as zero during orthogonalization.
pub const DEGENERATE_NORM: f64 = 1e-12;

pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub fn norm(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

/// `a - b`
pub fn sub(a: &[f64], b: &[f64]) -> Vec<f64> {
    a.iter().zip(b).map(|(x, y)| x - y).collect()
}

/// `x + t * u`
pub fn axpy(x: &[f64], t: f64, u: &[f64]) -> Vec<f64> {
    x.iter().zip(u).map(|(xi, ui)| xi + t * ui).collect()
}

pub fn scale(a: &[f64], s: f64) -> Vec<f64> {
    a.iter().map(|x| x * s).collect()
}

pub fn distance(a: &[f64], b: &[f64]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y) * (x - y))
        .sum::<f64>()
        .sqrt()
}

/// Returns `a / |a|`, or `None` when `|a|` is zero or not finite.
pub fn normalized(a: &[f64]) -> Option<Vec<f64>> {
    let n = norm(a);
    if n > 0.0 && n.is_finite() {
        Some(scale(a, 1.0 / n))
    } else {
        None
    }
}

/// The `i`-th coordinate axis in `R^n`.
pub fn unit_axis(n: usize, i: usize) -> Vec<f64> {
    let mut e = vec![0.0; n];
    e[i] = 1.0;
    e
}

/// An ordered set of unit search directions, one per problem dimension.
#[derive(Debug, Clone, PartialEq)]
pub struct DirectionSet {
    dirs: Vec<Vec<f64>>,
}

impl DirectionSet {
    /// The coordinate axes `e_1, ..., e_n`.
    pub fn coordinate(n: usize) -> Self {
        Self {
            dirs: (0..n).map(|i| unit_axis(n, i)).collect(),
        }
    }

    /// Builds a set from unit vectors.
    ///
    /// Every vector must have length `n = dirs.len()` and unit norm within 1e-12.
    pub fn from_unit_vectors(dirs: Vec<Vec<f64>>) -> Result<Self, LinalgError> {
        let n = dirs.len();
        for (i, d) in dirs.iter().enumerate() {
            if d.len() != n {
                return Err(LinalgError::Dimension {
                    expected: n,
                    got: d.len(),
                });
            }
            let len = norm(d);
            if (len - 1.0).abs() > 1e-12 {
                return Err(LinalgError::DegenerateSet {
                    column: i,
                    norm: len,
                });
            }
        }
        Ok(Self { dirs })
    }

    pub fn len(&self) -> usize {
        self.dirs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.dirs.is_empty()
    }

    pub fn get(&self, i: usize) -> &[f64] {
        &self.dirs[i]
    }

    pub fn as_slice(&self) -> &[Vec<f64>] {
        &self.dirs
    }

    /// Replaces direction `i`. The vector is renormalized.
    pub(crate) fn set(&mut self, i: usize, dir: Vec<f64>) {
        debug_assert_eq!(dir.len(), self.dirs.len());
        self.dirs[i] = normalized(&dir).unwrap_or(dir);
    }

    /// Circular shift to the left: `u_2 -> u_1, ..., u_1 -> u_n`.
    pub(crate) fn rotate_left(&mut self) {
        self.dirs.rotate_left(1);
    }

    pub fn iter(&self) -> impl Iterator<Item = &[f64]> {
        self.dirs.iter().map(Vec::as_slice)
    }
}

/// Modified Gram-Schmidt orthonormalization, preserving order.
pub fn gram_schmidt(vs: &[Vec<f64>]) -> Result<Vec<Vec<f64>>, LinalgError> {
    let mut out: Vec<Vec<f64>> = Vec::with_capacity(vs.len());
    for (j, v) in vs.iter().enumerate() {
        let mut w = v.clone();
        for q in &out {
            let p = dot(q, &w);
            for (wi, qi) in w.iter_mut().zip(q) {
                *wi -= p * qi;
            }
        }
        let len = norm(&w);
        if !(len >= DEGENERATE_NORM) {
            return Err(LinalgError::DegenerateSet {
                column: j,
                norm: len,
            });
        }
        out.push(scale(&w, 1.0 / len));
    }
    Ok(out)
}

/// Thin QR decomposition by Householder reflections.
///
/// `columns` holds `k <= n` column vectors of length `n`; the returned list
/// holds the first `k` columns of `Q`. Columns of `Q` span the same nested
/// subspaces as the input columns, each up to sign.
pub fn householder_qr(columns: &[Vec<f64>]) -> Result<Vec<Vec<f64>>, LinalgError> {
    let k = columns.len();
    if k == 0 {
        return Ok(Vec::new());
    }
    let n = columns[0].len();
    if let Some(bad) = columns.iter().find(|c| c.len() != n) {
        return Err(LinalgError::Dimension {
            expected: n,
            got: bad.len(),
        });
    }
    if k > n {
        return Err(LinalgError::DegenerateSet {
            column: n,
            norm: 0.0,
        });
    }

    let mut a: Vec<Vec<f64>> = columns.to_vec();
    let mut reflectors: Vec<Vec<f64>> = Vec::with_capacity(k);
    for j in 0..k {
        let tail = &a[j][j..];
        let len = norm(tail);
        if !(len >= DEGENERATE_NORM) {
            return Err(LinalgError::DegenerateSet {
                column: j,
                norm: len,
            });
        }
        let alpha = if tail[0] >= 0.0 { -len } else { len };
        let mut v = tail.to_vec();
        v[0] -= alpha;
        // v is nonzero: |v0| >= len because alpha has the opposite sign of tail[0]
        let vn = norm(&v);
        for vi in v.iter_mut() {
            *vi /= vn;
        }
        for col in a.iter_mut().skip(j) {
            let p = 2.0 * dot(&v, &col[j..]);
            for (ci, vi) in col[j..].iter_mut().zip(&v) {
                *ci -= p * vi;
            }
        }
        reflectors.push(v);
    }

    // Q e_c = H_0 H_1 ... H_{k-1} e_c
    let q = (0..k)
        .map(|c| {
            let mut e = unit_axis(n, c);
            for (j, v) in reflectors.iter().enumerate().rev() {
                let p = 2.0 * dot(v, &e[j..]);
                for (ei, vi) in e[j..].iter_mut().zip(v) {
                    *ei -= p * vi;
                }
            }
            e
        })
        .collect();
    Ok(q)
}

/// Unit vector orthogonal to every vector in `dirs`, taken as the last
/// column of `Q` in the QR decomposition of `(dirs..., probe)`.
///
/// The result is oriented to have a non-negative projection on the column
/// that produced it. If `probe` is dependent on `dirs`, the coordinate axes
/// `e_1, e_2, ...` are substituted in turn.
pub fn orthogonal_shift_direction(
    dirs: &[Vec<f64>],
    probe: &[f64],
) -> Result<Vec<f64>, LinalgError> {
    let n = probe.len();
    if dirs.len() >= n {
        return Err(LinalgError::DegenerateSet {
            column: dirs.len(),
            norm: 0.0,
        });
    }
    let mut columns: Vec<Vec<f64>> = dirs.to_vec();
    columns.push(probe.to_vec());
    let candidates = std::iter::once(probe.to_vec()).chain((0..n).map(|i| unit_axis(n, i)));
    let mut last_err = None;
    for candidate in candidates {
        *columns.last_mut().expect("non-empty") = candidate.clone();
        match householder_qr(&columns) {
            Ok(q) => {
                let mut dir = q.into_iter().last().expect("non-empty");
                if dot(&dir, &candidate) < 0.0 {
                    dir.iter_mut().for_each(|x| *x = -*x);
                }
                return Ok(dir);
            }
            Err(e @ LinalgError::DegenerateSet { column, .. }) if column == dirs.len() => {
                last_err = Some(e);
            }
            Err(e) => return Err(e),
        }
    }
    Err(last_err.expect("at least one candidate"))
}

/// Unit vector orthogonal to `span(dirs)` even when `dirs` is itself
/// rank-deficient: dependent members are dropped before projecting axes.
pub(crate) fn complement_direction(dirs: &[Vec<f64>], n: usize) -> Option<Vec<f64>> {
    let mut basis: Vec<Vec<f64>> = Vec::new();
    for d in dirs {
        let mut trial = basis.clone();
        trial.push(d.clone());
        if let Ok(q) = gram_schmidt(&trial) {
            basis = q;
        }
    }
    (0..n).find_map(|i| {
        let mut all = basis.clone();
        all.push(unit_axis(n, i));
        gram_schmidt(&all).ok().and_then(|q| q.last().cloned())
    })
}
