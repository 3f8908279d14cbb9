//! Exact closed-form mean and variance of the number of distinct jobs
//! recovered, for fixed and random non-straggler counts.
//!
//! For a fixed count `x` of reporting servers (every `x`-subset equally
//! likely), the mean is the same for every balanced assignment:
//! `E = n*(1 - C(c-r,x)/C(c,x))`. The variance depends on the assignment only
//! through its shape vector `h`:
//!
//! ```text
//! var = (2 * sum_m h[m]*g(m,x) + T2) / C(c,x) - T1^2
//! T1  = n*C(c-r,x)/C(c,x) + n*(r*x/c - 1)
//! T2  = n * sum_quadratic(r, c, x)
//! ```
//!
//! where `g(m,x)` is the duplicate-product mass contributed by one job pair
//! sharing `m` servers, summed over all `x`-subsets. Random non-straggler
//! counts are handled by the law of total variance.

use std::collections::HashMap;
use std::sync::{Arc, LazyLock, Mutex};

use num::{BigInt, BigRational, One, Signed, Zero};

use crate::assignment::ShapeVector;
use crate::combinatorics::{binom, int_ratio, sum_quadratic, ExactRational};
use crate::{Error, Result};

/// Exact values `g(0,x) .. g(r,x)` for fixed `(c, r, x)`.
///
/// `g(m, x)` is meaningful for `m >= max(0, 2r-c)` (a pair sharing fewer
/// servers cannot exist); entries below that index never meet a nonzero shape
/// count.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GTable {
    c: usize,
    r: usize,
    x: usize,
    values: Vec<BigInt>,
}

impl GTable {
    pub fn c(&self) -> usize {
        self.c
    }
    pub fn r(&self) -> usize {
        self.r
    }
    pub fn x(&self) -> usize {
        self.x
    }
    pub fn values(&self) -> &[BigInt] {
        &self.values
    }
    pub fn value(&self, m: usize) -> &BigInt {
        &self.values[m]
    }
}

type GCache = HashMap<(usize, usize, usize), Arc<GTable>>;

static G_CACHE: LazyLock<Mutex<GCache>> = LazyLock::new(|| Mutex::new(HashMap::new()));

/// `g(m, x)` by splitting the subset across the four server categories of a
/// job pair sharing `m` servers (`m` shared, `r-m` exclusive to each job,
/// `c-2r+m` holding neither). Every binomial argument is non-negative, so no
/// zero-extension corner cases arise. Used as the recursion anchor when
/// `m = 2r-c > 0`, where the usual `g(0, x)` closed form leaves its domain.
fn g_by_categories(c: usize, r: usize, m: usize, x: usize) -> BigInt {
    debug_assert!(2 * r <= c + m && m <= r);
    let spare = (c + m - 2 * r) as i64;
    let excl = (r - m) as i64;
    let mut total = BigInt::zero();
    for a in 0..=m as i64 {
        for b in 0..=excl {
            let ni = a + b;
            if ni < 2 {
                continue;
            }
            for e in 0..=excl {
                let nj = a + e;
                if nj < 2 {
                    continue;
                }
                let rest = x as i64 - a - b - e;
                total += BigInt::from((ni - 1) * (nj - 1))
                    * binom(m as i64, a)
                    * binom(excl, b)
                    * binom(excl, e)
                    * binom(spare, rest);
            }
        }
    }
    total
}

/// Computes (or fetches from the process-wide cache) the table of
/// `g(m, x)` values for `m = 0..=r`.
///
/// Anchor: for `2r <= c` the closed form
/// `g(0,x) = r^2 C(c-2,x-2) - 2r C(c-1,x-1) + C(c,x) - 2 C(c-r,x)
///           + 2r C(c-r-1,x-1) + C(c-2r,x)`;
/// for `c < 2r` the anchor sits at `m = 2r-c` (the smallest overlap a pair
/// can have) and is evaluated by [`g_by_categories`]. The rest of the table
/// follows `g(m+1,x) - g(m,x) = C(c-2,x-1) - 2 C(c-r-1,x-1) + C(c-2r+m,x-1)`
/// in both directions; entries below the anchor describe impossible overlaps
/// and only exist to keep the difference identity total.
pub fn g_table(c: usize, r: usize, x: usize) -> Result<Arc<GTable>> {
    if r < 1 || r > c {
        return Err(Error::ParameterDomain(format!(
            "g table needs 1 <= r <= c, got r={r}, c={c}"
        )));
    }
    if x > c {
        return Err(Error::ParameterDomain(format!(
            "g table needs x <= c, got x={x}, c={c}"
        )));
    }
    if let Some(hit) = G_CACHE.lock().unwrap().get(&(c, r, x)) {
        return Ok(Arc::clone(hit));
    }

    let (ci, ri, xi) = (c as i64, r as i64, x as i64);
    let diff = |m: i64| -> BigInt {
        binom(ci - 2, xi - 1) - 2 * binom(ci - ri - 1, xi - 1) + binom(ci - 2 * ri + m, xi - 1)
    };
    let m0 = (2 * r).saturating_sub(c);
    let anchor = if m0 == 0 {
        BigInt::from(ri) * BigInt::from(ri) * binom(ci - 2, xi - 2)
            - BigInt::from(2 * ri) * binom(ci - 1, xi - 1)
            + binom(ci, xi)
            - 2 * binom(ci - ri, xi)
            + BigInt::from(2 * ri) * binom(ci - ri - 1, xi - 1)
            + binom(ci - 2 * ri, xi)
    } else {
        g_by_categories(c, r, m0, x)
    };
    let mut values = vec![BigInt::zero(); r + 1];
    values[m0] = anchor;
    for m in m0..r {
        values[m + 1] = &values[m] + diff(m as i64);
    }
    for m in (0..m0).rev() {
        values[m] = &values[m + 1] - diff(m as i64);
    }
    let table = Arc::new(GTable { c, r, x, values });
    G_CACHE
        .lock()
        .unwrap()
        .entry((c, r, x))
        .or_insert_with(|| Arc::clone(&table));
    Ok(table)
}

fn check_balanced(n: usize, k: usize, r: usize, c: usize) -> Result<()> {
    if n == 0 || k == 0 || r == 0 || c == 0 || k > n || r > c {
        return Err(Error::ParameterDomain(format!(
            "invalid balanced parameters ({n},{k},{r},{c})"
        )));
    }
    let (nr, kc) = ((n * r) as u64, (k * c) as u64);
    if nr != kc {
        return Err(Error::Consistency { nr, kc });
    }
    Ok(())
}

/// Mean number of distinct jobs when a uniform `x`-subset of servers reports:
/// `n*(1 - C(c-r,x)/C(c,x))`. Identical for every balanced assignment.
pub fn mean_uniform(n: usize, k: usize, r: usize, c: usize, x: usize) -> Result<ExactRational> {
    check_balanced(n, k, r, c)?;
    if x > c {
        return Err(Error::ParameterDomain(format!("x={x} exceeds c={c}")));
    }
    let miss = BigRational::new(binom((c - r) as i64, x as i64), binom(c as i64, x as i64));
    Ok(int_ratio(BigInt::from(n as u64)) * (BigRational::one() - miss))
}

/// Variance of the distinct-job count for the assignment class with shape
/// vector `h`, when a uniform `x`-subset of servers reports.
pub fn variance_uniform(h: &ShapeVector, x: usize) -> Result<ExactRational> {
    let (n, r, c) = (h.n(), h.r(), h.c());
    if x > c {
        return Err(Error::ParameterDomain(format!("x={x} exceeds c={c}")));
    }
    let g = g_table(c, r, x)?;
    let pair_mass: BigInt = h
        .counts()
        .iter()
        .zip(g.values())
        .map(|(&hm, gm)| BigInt::from(hm) * gm)
        .sum();
    let t2 = BigInt::from(n as u64) * sum_quadratic(r, c, x)?;
    let cx = binom(c as i64, x as i64);
    let nr = int_ratio(BigInt::from(n as u64));
    let t1 = nr.clone() * BigRational::new(binom((c - r) as i64, x as i64), cx.clone())
        + nr * (BigRational::new(BigInt::from((r * x) as u64), BigInt::from(c as u64))
            - BigRational::one());
    let var = BigRational::new(BigInt::from(2) * pair_mass + t2, cx) - &t1 * &t1;
    debug_assert!(!var.is_negative(), "variance must be non-negative");
    Ok(var)
}

/// A model of which servers manage to report back.
#[derive(Clone, Debug, PartialEq)]
pub enum StragglerModel {
    /// Exactly `x` servers report; every `x`-subset equally likely.
    UniformSubset(usize),
    /// Each server independently *straggles* (fails to report) with
    /// probability `p`, so the reporting count is `Binomial(c, 1-p)`.
    BernoulliStraggle(ExactRational),
    /// Explicit distribution over the reporting count `x = 0..=c`
    /// (entry `x` is `P[X = x]`); conditioned on `x`, the subset is uniform.
    ExplicitX(Vec<ExactRational>),
}

impl StragglerModel {
    /// Checks the model against a server count `c`.
    pub fn validate(&self, c: usize) -> Result<()> {
        match self {
            StragglerModel::UniformSubset(x) => {
                if *x > c {
                    return Err(Error::InvalidModel(format!(
                        "uniform subset size {x} exceeds c={c}"
                    )));
                }
            }
            StragglerModel::BernoulliStraggle(p) => {
                if p.is_negative() || *p > BigRational::one() {
                    return Err(Error::InvalidModel(format!(
                        "straggle probability {p} outside [0, 1]"
                    )));
                }
            }
            StragglerModel::ExplicitX(pmf) => {
                if pmf.len() != c + 1 {
                    return Err(Error::InvalidModel(format!(
                        "pmf has {} entries, expected c+1 = {}",
                        pmf.len(),
                        c + 1
                    )));
                }
                if pmf.iter().any(|p| p.is_negative()) {
                    return Err(Error::InvalidModel("pmf has a negative entry".into()));
                }
                let total: BigRational = pmf.iter().sum();
                if !total.is_one() {
                    return Err(Error::InvalidModel(format!("pmf sums to {total}, not 1")));
                }
            }
        }
        Ok(())
    }

    /// Expands the model into an exact pmf over `x = 0..=c`.
    pub fn x_pmf(&self, c: usize) -> Result<Vec<ExactRational>> {
        self.validate(c)?;
        Ok(match self {
            StragglerModel::UniformSubset(x) => {
                let mut pmf = vec![BigRational::zero(); c + 1];
                pmf[*x] = BigRational::one();
                pmf
            }
            StragglerModel::BernoulliStraggle(p) => {
                let q = BigRational::one() - p;
                (0..=c)
                    .map(|x| {
                        int_ratio(binom(c as i64, x as i64))
                            * num::pow::pow(q.clone(), x)
                            * num::pow::pow(p.clone(), c - x)
                    })
                    .collect()
            }
            StragglerModel::ExplicitX(pmf) => pmf.clone(),
        })
    }

    /// Human-readable descriptor for reports.
    pub fn describe(&self) -> String {
        match self {
            StragglerModel::UniformSubset(x) => format!("uniform x={x}"),
            StragglerModel::BernoulliStraggle(p) => {
                format!("bernoulli straggle p={}", crate::combinatorics::rational_string(p))
            }
            StragglerModel::ExplicitX(_) => "explicit x distribution".to_string(),
        }
    }
}

/// Mean distinct jobs when every server independently straggles with
/// probability `p`: `n*(1 - p^r)`.
///
/// Equals the Binomial(c, 1-p) mixture of [`mean_uniform`] by the tower rule.
pub fn mean_bernoulli(n: usize, r: usize, p: &ExactRational) -> Result<ExactRational> {
    if p.is_negative() || *p > BigRational::one() {
        return Err(Error::InvalidModel(format!(
            "straggle probability {p} outside [0, 1]"
        )));
    }
    let pr = num::pow::pow(p.clone(), r);
    Ok(int_ratio(BigInt::from(n as u64)) * (BigRational::one() - pr))
}

/// Mean distinct jobs under an arbitrary straggler model (mixture of the
/// per-x means).
pub fn mean_random(
    n: usize,
    k: usize,
    r: usize,
    c: usize,
    model: &StragglerModel,
) -> Result<ExactRational> {
    check_balanced(n, k, r, c)?;
    let pmf = model.x_pmf(c)?;
    let mut acc = BigRational::zero();
    for (x, w) in pmf.iter().enumerate() {
        if !w.is_zero() {
            acc += w * mean_uniform(n, k, r, c, x)?;
        }
    }
    Ok(acc)
}

/// Variance of the distinct-job count when the reporting count is itself
/// random: `Var = E_P[var(x)] + Var_P[mean(x)]` (law of total variance).
///
/// A point-mass model reduces exactly to [`variance_uniform`].
pub fn variance_random(h: &ShapeVector, model: &StragglerModel) -> Result<ExactRational> {
    let (n, k, r, c) = (h.n(), h.k(), h.r(), h.c());
    let pmf = model.x_pmf(c)?;
    let mut e_var = BigRational::zero();
    let mut e_mean = BigRational::zero();
    let mut e_mean_sq = BigRational::zero();
    for (x, w) in pmf.iter().enumerate() {
        if w.is_zero() {
            continue;
        }
        let m = mean_uniform(n, k, r, c, x)?;
        let v = variance_uniform(h, x)?;
        e_var += w * v;
        e_mean_sq += w * (&m * &m);
        e_mean += w * m;
    }
    Ok(e_var + e_mean_sq - &e_mean * &e_mean)
}

/// Distribution of the number of servers shared by a uniformly random job
/// pair: `P[Y = m] = h[m] / C(n,2)` for `m = 0..=r`.
pub fn yd_distribution(h: &ShapeVector) -> Vec<ExactRational> {
    let pairs = binom(h.n() as i64, 2);
    h.counts()
        .iter()
        .map(|&hm| BigRational::new(BigInt::from(hm), pairs.clone()))
        .collect()
}

/// Variance of the distinct-job count at `x = 2`, routed through the shared-
/// server distribution of a random job pair:
///
/// ```text
/// var_2(d) = [C(n,2) Var(Y) + (c C(k,2))^2 / C(n,2) + n C(r,2) - c C(k,2)]
///              / C(c,2)  -  (n C(r,2) / C(c,2))^2
/// ```
///
/// Always equals `variance_uniform(h, 2)`; when `n = c` both also equal
/// `Var(Y)` itself.
pub fn variance_via_yd(h: &ShapeVector) -> Result<ExactRational> {
    let (n, k, r, c) = (h.n(), h.k(), h.r(), h.c());
    let pairs = binom(n as i64, 2);
    if pairs.is_zero() {
        return Err(Error::ParameterDomain("need n >= 2 for a job pair".into()));
    }
    let y = yd_distribution(h);
    let mut e_y = BigRational::zero();
    let mut e_y2 = BigRational::zero();
    for (m, w) in y.iter().enumerate() {
        let mq = int_ratio(BigInt::from(m as u64));
        e_y += w * &mq;
        e_y2 += w * &mq * &mq;
    }
    let var_y = e_y2 - &e_y * &e_y;

    let ck2 = int_ratio(BigInt::from(c as u64) * binom(k as i64, 2));
    let nr2 = int_ratio(BigInt::from(n as u64) * binom(r as i64, 2));
    let pairs_q = int_ratio(pairs);
    let c2 = int_ratio(binom(c as i64, 2));
    let numer = &pairs_q * var_y + &ck2 * &ck2 / &pairs_q + &nr2 - &ck2;
    let ratio = &nr2 / &c2;
    Ok(numer / c2 - &ratio * &ratio)
}

/// Exact moments plus the model they were computed under.
#[derive(Clone, Debug, PartialEq)]
pub struct MomentReport {
    pub mean: ExactRational,
    pub variance: ExactRational,
    pub descriptor: String,
}

impl MomentReport {
    pub fn new(mean: ExactRational, variance: ExactRational, descriptor: String) -> Self {
        debug_assert!(!variance.is_negative());
        MomentReport { mean, variance, descriptor }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::assignment::fixture;
    use crate::combinatorics::ratio;

    /// Direct evaluation of the defining sum for `g(m, x)`: place one job on
    /// servers `{0..r}`, the other on `{r-m..2r-m}`, then sum the duplicate
    /// products over every x-subset of the c servers.
    fn g_direct(c: usize, r: usize, m: usize, x: usize) -> BigInt {
        assert!(2 * r <= c + m && m <= r);
        let first: Vec<bool> = (0..c).map(|s| s < r).collect();
        let second: Vec<bool> = (0..c).map(|s| s >= r - m && s < 2 * r - m).collect();
        let mut total = BigInt::zero();
        for bits in 0u32..(1 << c) {
            if bits.count_ones() as usize != x {
                continue;
            }
            let mut ni = 0i64;
            let mut nj = 0i64;
            for s in 0..c {
                if bits >> s & 1 == 1 {
                    if first[s] {
                        ni += 1;
                    }
                    if second[s] {
                        nj += 1;
                    }
                }
            }
            if ni > 1 && nj > 1 {
                total += BigInt::from((ni - 1) * (nj - 1));
            }
        }
        total
    }

    #[test]
    fn g_matches_definition_on_small_grid() {
        for c in 1..=8usize {
            for r in 1..=c {
                for x in 0..=c {
                    let table = g_table(c, r, x).unwrap();
                    let m_min = (2 * r).saturating_sub(c);
                    for m in m_min..=r {
                        assert_eq!(
                            *table.value(m),
                            g_direct(c, r, m, x),
                            "c={c} r={r} m={m} x={x}"
                        );
                    }
                }
            }
        }
    }

    #[test]
    fn g_values_nonnegative_and_differences_nondecreasing() {
        for c in 1..=8usize {
            for r in 1..=c {
                for x in 0..=c {
                    let table = g_table(c, r, x).unwrap();
                    let m_min = (2 * r).saturating_sub(c);
                    for m in m_min..=r {
                        assert!(!table.value(m).is_negative(), "c={c} r={r} m={m} x={x}");
                    }
                    let v = table.values();
                    for m in 0..r.saturating_sub(1) {
                        let d1 = &v[m + 1] - &v[m];
                        let d2 = &v[m + 2] - &v[m + 1];
                        assert!(d2 >= d1, "c={c} r={r} x={x} m={m}");
                    }
                }
            }
        }
    }

    #[test]
    fn g_quadratic_at_x_two() {
        for c in 4..=9usize {
            for r in 2..=c / 2 {
                let table = g_table(c, r, 2).unwrap();
                for m in 0..=r {
                    let expected = (m * m.saturating_sub(1) / 2) as u64;
                    assert_eq!(*table.value(m), BigInt::from(expected), "c={c} r={r} m={m}");
                }
            }
        }
    }

    #[test]
    fn g_examples() {
        let t = g_table(6, 2, 3).unwrap();
        assert_eq!(t.values(), &[BigInt::zero(), BigInt::one(), BigInt::from(4)]);
        let t = g_table(9, 3, 1).unwrap();
        assert!(t.values().iter().all(|v| v.is_zero()));
    }

    #[test]
    fn g_cache_returns_same_table() {
        let a = g_table(6, 2, 3).unwrap();
        let b = g_table(6, 2, 3).unwrap();
        assert!(Arc::ptr_eq(&a, &b));
    }

    #[test]
    fn mean_uniform_examples() {
        assert_eq!(mean_uniform(9, 3, 2, 6, 1).unwrap(), ratio(3, 1));
        assert_eq!(mean_uniform(9, 3, 2, 6, 5).unwrap(), ratio(9, 1));
        assert_eq!(mean_uniform(9, 3, 2, 6, 2).unwrap(), ratio(27, 5));
        assert_eq!(mean_uniform(9, 3, 2, 6, 0).unwrap(), ratio(0, 1));
        assert!(mean_uniform(9, 3, 2, 6, 7).is_err());
        assert!(mean_uniform(9, 3, 2, 7, 2).is_err());
    }

    #[test]
    fn variance_uniform_examples() {
        let table1 = fixture("table1").unwrap().shape_vector();
        assert_eq!(variance_uniform(&table1, 2).unwrap(), ratio(16, 25));
        assert_eq!(variance_uniform(&table1, 1).unwrap(), ratio(0, 1));
        assert_eq!(variance_uniform(&table1, 5).unwrap(), ratio(0, 1));
        assert_eq!(variance_uniform(&table1, 6).unwrap(), ratio(0, 1));

        let table2 = fixture("table2").unwrap().shape_vector();
        assert_eq!(variance_uniform(&table2, 2).unwrap(), ratio(3, 16));

        let table3 = fixture("table3").unwrap().shape_vector();
        assert_eq!(variance_uniform(&table3, 2).unwrap(), ratio(36, 25));
    }

    #[test]
    fn mean_bernoulli_examples() {
        assert_eq!(mean_bernoulli(9, 2, &ratio(0, 1)).unwrap(), ratio(9, 1));
        assert_eq!(mean_bernoulli(9, 2, &ratio(1, 1)).unwrap(), ratio(0, 1));
        assert_eq!(mean_bernoulli(9, 2, &ratio(1, 2)).unwrap(), ratio(27, 4));
        assert!(mean_bernoulli(9, 2, &ratio(3, 2)).is_err());
    }

    #[test]
    fn mean_bernoulli_equals_binomial_mixture() {
        for p in [ratio(0, 1), ratio(1, 4), ratio(1, 2), ratio(3, 4), ratio(1, 1)] {
            let direct = mean_bernoulli(9, 2, &p).unwrap();
            let model = StragglerModel::BernoulliStraggle(p.clone());
            let mixed = mean_random(9, 3, 2, 6, &model).unwrap();
            assert_eq!(direct, mixed, "p={p}");
        }
    }

    #[test]
    fn variance_random_point_mass_reduces_to_uniform() {
        let h = fixture("table1").unwrap().shape_vector();
        let mut pmf = vec![ratio(0, 1); 7];
        pmf[2] = ratio(1, 1);
        let v = variance_random(&h, &StragglerModel::ExplicitX(pmf)).unwrap();
        assert_eq!(v, ratio(16, 25));

        let mut pmf1 = vec![ratio(0, 1); 7];
        pmf1[1] = ratio(1, 1);
        let v1 = variance_random(&h, &StragglerModel::ExplicitX(pmf1)).unwrap();
        assert_eq!(v1, ratio(0, 1));
    }

    #[test]
    fn variance_random_rejects_bad_pmf() {
        let h = fixture("table1").unwrap().shape_vector();
        let pmf = vec![ratio(1, 2); 7];
        assert!(matches!(
            variance_random(&h, &StragglerModel::ExplicitX(pmf)),
            Err(Error::InvalidModel(_))
        ));
    }

    #[test]
    fn yd_distribution_examples() {
        let table2 = fixture("table2").unwrap().shape_vector();
        assert_eq!(
            yd_distribution(&table2),
            vec![ratio(1, 4), ratio(3, 4), ratio(0, 1), ratio(0, 1)]
        );
        let stretched = crate::assignment::Assignment::stretched(10, 5, 4)
            .unwrap()
            .shape_vector();
        assert_eq!(
            yd_distribution(&stretched),
            vec![ratio(5, 9), ratio(0, 1), ratio(0, 1), ratio(0, 1), ratio(4, 9)]
        );
        let table1 = fixture("table1").unwrap().shape_vector();
        assert_eq!(
            yd_distribution(&table1),
            vec![ratio(21, 36), ratio(12, 36), ratio(3, 36)]
        );
    }

    #[test]
    fn yd_mean_is_pair_load() {
        for name in crate::assignment::FIXTURE_NAMES {
            let h = fixture(name).unwrap().shape_vector();
            let y = yd_distribution(&h);
            let mut e_y = BigRational::zero();
            for (m, w) in y.iter().enumerate() {
                e_y += w * int_ratio(BigInt::from(m as u64));
            }
            let expected = BigRational::new(
                BigInt::from(h.c() as u64) * binom(h.k() as i64, 2),
                binom(h.n() as i64, 2),
            );
            assert_eq!(e_y, expected, "{name}");
        }
    }

    #[test]
    fn variance_via_yd_matches_x2() {
        let table1 = fixture("table1").unwrap().shape_vector();
        assert_eq!(variance_via_yd(&table1).unwrap(), ratio(16, 25));

        // n = c: the detour equals Var(Y) itself
        let table2 = fixture("table2").unwrap().shape_vector();
        assert_eq!(variance_via_yd(&table2).unwrap(), ratio(3, 16));
        assert_eq!(
            variance_via_yd(&table2).unwrap(),
            variance_uniform(&table2, 2).unwrap()
        );

        // single nonzero entry: Var(Y) = 0, remaining terms carry the value
        let bibd = ShapeVector::new(7, 3, 3, 7, vec![0, 21, 0, 0]).unwrap();
        let y = yd_distribution(&bibd);
        assert!(y[1].is_one());
        assert_eq!(
            variance_via_yd(&bibd).unwrap(),
            variance_uniform(&bibd, 2).unwrap()
        );
    }
}
