//! Shape-vector algebra: the two linear constraints every shape satisfies,
//! the kernel of their matrix, candidate extremal shapes, and classification.
//!
//! Stacking the constraints `sum h[m] = C(n,2)` and `sum m*h[m] = c*C(k,2)`
//! gives a 2x(r+1) matrix `H`; two shapes for the same `(n,k,r,c)` differ by
//! a vector in `ker H`, which is spanned by the second-difference vectors
//! `(..., 1, -2, 1, ...)`. Variance differences between shapes reduce to a
//! weighted sum of a kernel vector against a [`GTable`].

use num::{BigInt, BigRational, Signed};
use serde::{Deserialize, Serialize};

use crate::assignment::ShapeVector;
use crate::combinatorics::binom;
use crate::moments::GTable;
use crate::{Error, Result};

/// An integer vector in the kernel of the shape-constraint matrix:
/// entries sum to zero and index-weighted entries sum to zero.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct KernelVector {
    entries: Vec<i64>,
}

impl KernelVector {
    pub fn new(entries: Vec<i64>) -> Result<Self> {
        let sum: i64 = entries.iter().sum();
        let weighted: i64 = entries.iter().enumerate().map(|(m, &e)| m as i64 * e).sum();
        if sum != 0 || weighted != 0 {
            return Err(Error::InvalidShape(format!(
                "not a kernel vector: entry sum {sum}, weighted sum {weighted}"
            )));
        }
        Ok(KernelVector { entries })
    }

    pub fn entries(&self) -> &[i64] {
        &self.entries
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// Difference `a - b` of two shape vectors over the same instance.
    pub fn between(a: &ShapeVector, b: &ShapeVector) -> Result<Self> {
        if (a.n(), a.k(), a.r(), a.c()) != (b.n(), b.k(), b.r(), b.c()) {
            return Err(Error::DimensionMismatch(
                "shape vectors belong to different instances".into(),
            ));
        }
        let entries = a
            .counts()
            .iter()
            .zip(b.counts())
            .map(|(&x, &y)| x as i64 - y as i64)
            .collect();
        KernelVector::new(entries)
    }
}

/// Basis of `ker H` for replication degree `r`: the `r-1` second-difference
/// vectors, the `i`-th (1-based) holding `1, -2, 1` at positions
/// `i-1, i, i+1`.
pub fn kernel_basis(r: usize) -> Result<Vec<KernelVector>> {
    if r < 2 {
        return Err(Error::ParameterDomain(format!(
            "kernel basis needs r >= 2, got r={r}"
        )));
    }
    Ok((1..r)
        .map(|i| {
            let mut entries = vec![0i64; r + 1];
            entries[i - 1] = 1;
            entries[i] = -2;
            entries[i + 1] = 1;
            KernelVector { entries }
        })
        .collect())
}

/// Coefficients expressing `v` over the [`kernel_basis`]: forward recurrence
/// `a[1] = v[0]`, `a[2] = v[1] + 2 a[1]`, `a[i+1] = v[i] + 2 a[i] - a[i-1]`.
/// The reconstruction `sum a_i h_i = v` is verified before returning.
pub fn decompose(v: &KernelVector) -> Result<Vec<i64>> {
    let r = v.len().saturating_sub(1);
    if r < 2 {
        return Err(Error::ParameterDomain(format!(
            "decomposition needs r >= 2, got vector of length {}",
            v.len()
        )));
    }
    let e = v.entries();
    let mut alpha = vec![0i64; r - 1]; // alpha[i] holds a_{i+1}
    alpha[0] = e[0];
    if r >= 3 {
        alpha[1] = e[1] + 2 * alpha[0];
        for i in 2..r - 1 {
            alpha[i] = e[i] + 2 * alpha[i - 1] - alpha[i - 2];
        }
    }
    // reconstruction check doubles as the ker-H membership test
    let mut rebuilt = vec![0i64; r + 1];
    for (i, &a) in alpha.iter().enumerate() {
        rebuilt[i] += a;
        rebuilt[i + 1] -= 2 * a;
        rebuilt[i + 2] += a;
    }
    if rebuilt != e {
        return Err(Error::InvalidShape(
            "vector is not in the kernel of the constraint matrix".into(),
        ));
    }
    Ok(alpha)
}

/// Index of the smallest nonzero entry of the (unique) proximally compact
/// candidate: `floor(r(k-1)/(n-1))`.
pub fn proximal_ell(n: usize, k: usize, r: usize, c: usize) -> Result<usize> {
    check_instance(n, k, r, c)?;
    Ok(r * (k - 1) / (n - 1))
}

fn check_instance(n: usize, k: usize, r: usize, c: usize) -> Result<()> {
    if n < 2 || k == 0 || r == 0 || c == 0 || k > n || r > c {
        return Err(Error::ParameterDomain(format!(
            "invalid instance ({n},{k},{r},{c}); need n >= 2, 1 <= k <= n, 1 <= r <= c"
        )));
    }
    let (nr, kc) = ((n * r) as u64, (k * c) as u64);
    if nr != kc {
        return Err(Error::Consistency { nr, kc });
    }
    Ok(())
}

/// The unique candidate shape of a proximally compact assignment: all mass on
/// positions `l` and `l+1` with `l = floor(r(k-1)/(n-1))`.
///
/// This is a *candidate* only; whether an assignment realizes it is a search
/// question. `None` would indicate a negative entry, which cannot occur for
/// the computed `l`.
pub fn proximal_shape(n: usize, k: usize, r: usize, c: usize) -> Result<Option<ShapeVector>> {
    let ell = proximal_ell(n, k, r, c)?;
    let pairs = binom(n as i64, 2);
    let load = BigInt::from(c as u64) * binom(k as i64, 2);
    let upper = load - BigInt::from(ell as u64) * &pairs;
    if upper.is_negative() || upper > pairs {
        return Ok(None);
    }
    let upper: u64 = upper.try_into().expect("desk-scale count");
    let total: u64 = pairs.try_into().expect("desk-scale count");
    let mut counts = vec![0u64; r + 1];
    counts[ell] = total - upper;
    if upper > 0 {
        counts[ell + 1] = upper;
    }
    Ok(Some(ShapeVector::new(n, k, r, c, counts)?))
}

/// The unique candidate shape of a stretched compact assignment:
/// `[n(n-k)/2, 0, ..., 0, n(k-1)/2]`. `None` when those entries are not
/// integers (n odd and k even), in which case no such assignment can exist.
pub fn stretched_shape(n: usize, k: usize, r: usize, c: usize) -> Result<Option<ShapeVector>> {
    check_instance(n, k, r, c)?;
    let first = n as u64 * (n - k) as u64;
    let last = n as u64 * (k - 1) as u64;
    if !first.is_multiple_of(2) || !last.is_multiple_of(2) {
        return Ok(None);
    }
    let mut counts = vec![0u64; r + 1];
    counts[0] = first / 2;
    counts[r] += last / 2;
    Ok(Some(ShapeVector::new(n, k, r, c, counts)?))
}

/// Shape classes, most specific first.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum ShapeClass {
    /// Single nonzero entry: every job pair shares the same number of servers.
    Bibd,
    /// Exactly two consecutive nonzero entries (the BIBD case is reported
    /// separately above).
    ProximallyCompact,
    /// Nonzero only in the first and last entries.
    StretchedCompact,
    /// At most two nonzero entries, not of the previous kinds.
    Compact,
    General,
}

impl std::fmt::Display for ShapeClass {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let s = match self {
            ShapeClass::Bibd => "BIBD",
            ShapeClass::ProximallyCompact => "proximally-compact",
            ShapeClass::StretchedCompact => "stretched-compact",
            ShapeClass::Compact => "compact",
            ShapeClass::General => "general",
        };
        f.write_str(s)
    }
}

/// Classifies a shape vector, checking BIBD, then proximally compact, then
/// stretched compact, then compact, then general.
pub fn classify(h: &ShapeVector) -> ShapeClass {
    let nz = h.nonzero_positions();
    match nz.len() {
        0 | 1 => ShapeClass::Bibd,
        2 => {
            if nz[1] == nz[0] + 1 {
                ShapeClass::ProximallyCompact
            } else if nz[0] == 0 && nz[1] == h.r() {
                ShapeClass::StretchedCompact
            } else {
                ShapeClass::Compact
            }
        }
        _ => ShapeClass::General,
    }
}

/// Whether the shape is proximally compact in the inclusive sense (one
/// nonzero entry, or two consecutive ones).
pub fn is_proximally_compact(counts: &[u64]) -> bool {
    let nz: Vec<usize> = counts
        .iter()
        .enumerate()
        .filter(|(_, &v)| v > 0)
        .map(|(m, _)| m)
        .collect();
    match nz.len() {
        0 | 1 => true,
        2 => nz[1] == nz[0] + 1,
        _ => false,
    }
}

/// Exact variance difference `var(h + v, x) - var(h, x)` for any shape `h`
/// over the table's instance: `2 * sum_m v[m] g(m, x) / C(c, x)`.
pub fn delta_variance(v: &KernelVector, c: usize, x: usize, g: &GTable) -> Result<BigRational> {
    if g.c() != c {
        return Err(Error::DimensionMismatch(format!(
            "g table is for c={}, requested c={c}",
            g.c()
        )));
    }
    if g.x() != x {
        return Err(Error::DimensionMismatch(format!(
            "g table is for x={}, requested x={x}",
            g.x()
        )));
    }
    if v.len() != g.values().len() {
        return Err(Error::DimensionMismatch(format!(
            "kernel vector has {} entries, g table has {}",
            v.len(),
            g.values().len()
        )));
    }
    let mass: BigInt = v
        .entries()
        .iter()
        .zip(g.values())
        .map(|(&vm, gm)| BigInt::from(vm) * gm)
        .sum();
    Ok(BigRational::new(
        BigInt::from(2) * mass,
        binom(c as i64, x as i64),
    ))
}
