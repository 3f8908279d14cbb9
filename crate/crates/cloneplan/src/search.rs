//! Exhaustive enumeration and backtracking over balanced assignments at desk
//! scale: the brute-force oracle, shape realizability, and computational
//! verification of the extremal-variance properties.
//!
//! Canonical form: servers are generated as a non-decreasing lexicographic
//! sequence of sorted k-subsets, so each assignment is visited exactly once
//! up to server reordering. Job relabeling is *not* quotiented by
//! [`for_each_balanced`]; searches that only care about relabeling-invariant
//! answers (shape sets, realizability) additionally restrict to first-use
//! job order, which keeps exactly one representative per relabeling class.

use std::collections::BTreeSet;
use std::time::{Duration, Instant};

use num::{BigInt, BigRational};
use serde::{Deserialize, Serialize};

use crate::assignment::{Assignment, ShapeVector};
use crate::combinatorics::{decimal_string, rational_string};
use crate::moments::{variance_uniform, MomentReport};
use crate::shapes::{is_proximally_compact, proximal_shape, stretched_shape};
use crate::{Error, Result};

/// Caps on a single search call. A search that hits any cap reports itself
/// as incomplete rather than silently returning partial answers as final.
#[derive(Clone, Debug)]
pub struct EnumerationBudget {
    pub max_assignments: u64,
    pub max_nodes: u64,
    pub time_cap: Duration,
}

impl Default for EnumerationBudget {
    fn default() -> Self {
        EnumerationBudget {
            max_assignments: 50_000_000,
            max_nodes: 2_000_000_000,
            time_cap: Duration::from_secs(600),
        }
    }
}

impl EnumerationBudget {
    fn validate(&self) -> Result<()> {
        if self.max_assignments == 0 || self.max_nodes == 0 || self.time_cap.is_zero() {
            return Err(Error::ParameterDomain(
                "budget caps must all be positive".into(),
            ));
        }
        Ok(())
    }
}

/// What a search did and whether it ran to exhaustion.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct SearchStats {
    pub nodes: u64,
    pub assignments: u64,
    pub complete: bool,
}

fn check_instance(n: usize, k: usize, r: usize, c: usize) -> Result<()> {
    if n == 0 || k == 0 || r == 0 || c == 0 || k > n || r > c {
        return Err(Error::ParameterDomain(format!(
            "invalid instance ({n},{k},{r},{c})"
        )));
    }
    let (nr, kc) = ((n * r) as u64, (k * c) as u64);
    if nr != kc {
        return Err(Error::Consistency { nr, kc });
    }
    if n > 64 {
        return Err(Error::ParameterDomain(format!(
            "enumeration supports n <= 64, got n={n}"
        )));
    }
    Ok(())
}

/// All k-subsets of `0..n` as sorted index lists, in lexicographic order.
fn k_subsets(n: usize, k: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut cur: Vec<usize> = (0..k).collect();
    if k == 0 || k > n {
        return out;
    }
    loop {
        out.push(cur.clone());
        // advance to the next combination
        let mut i = k;
        loop {
            if i == 0 {
                return out;
            }
            i -= 1;
            if cur[i] != i + n - k {
                break;
            }
            if i == 0 {
                return out;
            }
        }
        cur[i] += 1;
        for j in i + 1..k {
            cur[j] = cur[j - 1] + 1;
        }
    }
}

fn mask_of(subset: &[usize]) -> u64 {
    subset.iter().fold(0u64, |m, &j| m | 1 << j)
}

fn lowest_set_bits(mut m: u64, count: u32) -> u64 {
    let mut out = 0u64;
    for _ in 0..count {
        let b = m & m.wrapping_neg();
        out |= b;
        m ^= b;
    }
    out
}

struct Enumerator<'a> {
    n: usize,
    k: usize,
    r: usize,
    c: usize,
    subsets: Vec<Vec<usize>>,
    masks: Vec<u64>,
    canonical_jobs: bool,
    deadline: Instant,
    budget: &'a EnumerationBudget,
    stats: SearchStats,
    stop: bool,
}

impl<'a> Enumerator<'a> {
    fn new(n: usize, k: usize, r: usize, c: usize, budget: &'a EnumerationBudget, canonical_jobs: bool) -> Self {
        let subsets = k_subsets(n, k);
        let masks = subsets.iter().map(|s| mask_of(s)).collect();
        Enumerator {
            n,
            k,
            r,
            c,
            subsets,
            masks,
            canonical_jobs,
            deadline: Instant::now() + budget.time_cap,
            budget,
            stats: SearchStats { nodes: 0, assignments: 0, complete: true },
            stop: false,
        }
    }

    fn tick(&mut self) -> bool {
        self.stats.nodes += 1;
        if self.stats.nodes >= self.budget.max_nodes
            || (self.stats.nodes.is_multiple_of(4096) && Instant::now() >= self.deadline)
        {
            self.stats.complete = false;
            self.stop = true;
        }
        self.stop
    }

    fn run(&mut self, f: &mut dyn FnMut(&Assignment) -> bool) {
        let mut remaining = vec![self.r; self.n];
        let mut chosen = Vec::with_capacity(self.c);
        self.recurse(0, 0, 0u64, &mut remaining, &mut chosen, f);
    }

    fn recurse(
        &mut self,
        depth: usize,
        start: usize,
        used: u64,
        remaining: &mut Vec<usize>,
        chosen: &mut Vec<usize>,
        f: &mut dyn FnMut(&Assignment) -> bool,
    ) {
        if self.stop {
            return;
        }
        if depth == self.c {
            debug_assert!(remaining.iter().all(|&d| d == 0));
            let servers = chosen.iter().map(|&i| self.subsets[i].clone()).collect();
            let a = Assignment::from_servers(self.n, self.k, self.r, self.c, servers)
                .expect("search maintains balance invariants");
            self.stats.assignments += 1;
            if !f(&a) || self.stats.assignments >= self.budget.max_assignments {
                // either way the space was not exhausted
                self.stats.complete = false;
                self.stop = true;
            }
            return;
        }
        let servers_left = self.c - depth;
        let jmin = match remaining.iter().position(|&d| d > 0) {
            Some(j) => j,
            None => return, // all jobs saturated but servers remain: dead end
        };
        let avail = remaining.iter().enumerate().fold(0u64, |m, (j, &d)| {
            if d > 0 {
                m | 1 << j
            } else {
                m
            }
        });
        let unused = !used & (u64::MAX >> (64 - self.n));
        for idx in start..self.subsets.len() {
            if self.tick() {
                return;
            }
            // later subsets are lex-greater, so none can still serve jmin
            if self.subsets[idx][0] > jmin {
                break;
            }
            let mask = self.masks[idx];
            if mask & !avail != 0 {
                continue;
            }
            if self.canonical_jobs {
                let fresh = mask & unused;
                let want = lowest_set_bits(unused, fresh.count_ones());
                if fresh != want {
                    continue;
                }
            }
            for pos in 0..self.k {
                remaining[self.subsets[idx][pos]] -= 1;
            }
            // a job cannot appear twice on one server
            let feasible = remaining.iter().all(|&d| d < servers_left);
            if feasible {
                chosen.push(idx);
                self.recurse(depth + 1, idx, used | mask, remaining, chosen, f);
                chosen.pop();
            }
            for pos in 0..self.k {
                remaining[self.subsets[idx][pos]] += 1;
            }
            if self.stop {
                return;
            }
        }
    }
}

/// Visits every balanced assignment exactly once up to server reordering,
/// in deterministic lexicographic order. The callback returns `false` to
/// stop early (the run is then reported incomplete).
pub fn for_each_balanced(
    n: usize,
    k: usize,
    r: usize,
    c: usize,
    budget: &EnumerationBudget,
    mut f: impl FnMut(&Assignment) -> bool,
) -> Result<SearchStats> {
    check_instance(n, k, r, c)?;
    budget.validate()?;
    let mut e = Enumerator::new(n, k, r, c, budget, false);
    e.run(&mut f);
    Ok(e.stats)
}

/// Like [`for_each_balanced`] but visits one representative per job-relabeling
/// class (first-use job order). Only for relabeling-invariant questions.
pub fn for_each_balanced_canonical(
    n: usize,
    k: usize,
    r: usize,
    c: usize,
    budget: &EnumerationBudget,
    mut f: impl FnMut(&Assignment) -> bool,
) -> Result<SearchStats> {
    check_instance(n, k, r, c)?;
    budget.validate()?;
    let mut e = Enumerator::new(n, k, r, c, budget, true);
    e.run(&mut f);
    Ok(e.stats)
}

/// Collects every balanced assignment (up to server reordering).
pub fn enumerate_balanced(
    n: usize,
    k: usize,
    r: usize,
    c: usize,
    budget: &EnumerationBudget,
) -> Result<(Vec<Assignment>, SearchStats)> {
    let mut out = Vec::new();
    let stats = for_each_balanced(n, k, r, c, budget, |a| {
        out.push(a.clone());
        true
    })?;
    Ok((out, stats))
}

/// The exact set of shape vectors attained by at least one balanced
/// assignment of the instance.
pub fn realizable_shapes(
    n: usize,
    k: usize,
    r: usize,
    c: usize,
    budget: &EnumerationBudget,
) -> Result<(BTreeSet<ShapeVector>, SearchStats)> {
    let mut shapes = BTreeSet::new();
    let stats = for_each_balanced_canonical(n, k, r, c, budget, |a| {
        shapes.insert(a.shape_vector());
        true
    })?;
    Ok((shapes, stats))
}

/// Result of a bounded realizability search.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum RealizeOutcome {
    /// A witness assignment whose shape vector equals the target.
    Found(Box<Assignment>),
    /// The complete (symmetry-reduced) search space was exhausted.
    NotFound,
    /// The budget ran out before the search finished.
    Unknown,
}

impl RealizeOutcome {
    pub fn label(&self) -> &'static str {
        match self {
            RealizeOutcome::Found(_) => "Found",
            RealizeOutcome::NotFound => "NotFound",
            RealizeOutcome::Unknown => "Unknown",
        }
    }
}

struct Realizer<'a> {
    n: usize,
    k: usize,
    r: usize,
    c: usize,
    cap: usize,
    subsets: Vec<Vec<usize>>,
    masks: Vec<u64>,
    subset_pairs: Vec<Vec<u32>>,
    required_cum: Vec<u64>, // required_cum[m] = number of pairs ending with count >= m
    chosen: Vec<usize>,
    deadline: Instant,
    budget: &'a EnumerationBudget,
    stats: SearchStats,
    stop: bool,
    witness: Option<Assignment>,
}

impl<'a> Realizer<'a> {
    fn tick(&mut self) -> bool {
        self.stats.nodes += 1;
        if self.stats.nodes >= self.budget.max_nodes
            || (self.stats.nodes.is_multiple_of(4096) && Instant::now() >= self.deadline)
        {
            self.stats.complete = false;
            self.stop = true;
        }
        self.stop
    }

    /// Both-sided dominance check on final pair counts. Counts only grow, and
    /// a pair can gain at most `min(rem_i, rem_j)` more co-occurrences, so for
    /// the target to stay reachable we need, for every threshold m:
    /// `#pairs(count >= m) <= required_cum[m] <= #pairs(count + headroom >= m)`.
    fn reachable(&self, paircnt: &[u8], remaining: &[usize]) -> bool {
        let mut ub_hist = vec![0u64; self.cap + 2];
        for a in 0..self.n {
            for b in a + 1..self.n {
                let bound = paircnt[a * self.n + b] as usize
                    + remaining[a].min(remaining[b]);
                ub_hist[bound.min(self.cap + 1)] += 1;
            }
        }
        let mut ub_cum = ub_hist[self.cap + 1];
        for m in (1..=self.cap).rev() {
            ub_cum += ub_hist[m];
            if ub_cum < self.required_cum[m] {
                return false;
            }
        }
        true
    }

    fn recurse(
        &mut self,
        depth: usize,
        start: usize,
        used: u64,
        remaining: &mut Vec<usize>,
        paircnt: &mut Vec<u8>,
        cum: &mut Vec<u64>,
    ) {
        if self.stop {
            return;
        }
        if depth == self.c {
            let servers = self.chosen.iter().map(|&i| self.subsets[i].clone()).collect();
            let a = Assignment::from_servers(self.n, self.k, self.r, self.c, servers)
                .expect("search maintains balance invariants");
            self.stats.assignments += 1;
            self.witness = Some(a);
            self.stop = true;
            return;
        }
        let servers_left = self.c - depth;
        let jmin = match remaining.iter().position(|&d| d > 0) {
            Some(j) => j,
            None => return,
        };
        let avail = remaining.iter().enumerate().fold(0u64, |m, (j, &d)| {
            if d > 0 {
                m | 1 << j
            } else {
                m
            }
        });
        let unused = !used & (u64::MAX >> (64 - self.n));
        for idx in start..self.subsets.len() {
            if self.tick() {
                return;
            }
            if self.subsets[idx][0] > jmin {
                break;
            }
            let mask = self.masks[idx];
            if mask & !avail != 0 {
                continue;
            }
            let fresh = mask & unused;
            if fresh != lowest_set_bits(unused, fresh.count_ones()) {
                continue;
            }
            // apply pair increments, rolling back on the first violation
            let pair_total = self.subset_pairs[idx].len();
            let mut applied = 0usize;
            let mut ok = true;
            for step in 0..pair_total {
                let pi = self.subset_pairs[idx][step] as usize;
                let new = paircnt[pi] as usize + 1;
                if new > self.cap {
                    ok = false;
                    applied = step;
                    break;
                }
                paircnt[pi] = new as u8;
                cum[new] += 1;
                if cum[new] > self.required_cum[new] {
                    ok = false;
                    applied = step + 1;
                    break;
                }
            }
            if ok {
                applied = pair_total;
                for pos in 0..self.k {
                    remaining[self.subsets[idx][pos]] -= 1;
                }
                let feasible = remaining.iter().all(|&d| d < servers_left)
                    && self.reachable(paircnt, remaining);
                if feasible {
                    self.chosen.push(idx);
                    self.recurse(depth + 1, idx, used | mask, remaining, paircnt, cum);
                    self.chosen.pop();
                }
                for pos in 0..self.k {
                    remaining[self.subsets[idx][pos]] += 1;
                }
            }
            for step in 0..applied {
                let pi = self.subset_pairs[idx][step] as usize;
                cum[paircnt[pi] as usize] -= 1;
                paircnt[pi] -= 1;
            }
            if self.stop {
                return;
            }
        }
    }
}

/// Searches for a balanced assignment realizing the exact shape vector `h`.
///
/// The search is exhaustive over server multisets with first-use job
/// canonicalization (shape vectors are invariant under job relabeling), and
/// prunes on running pair-co-occurrence counts: a branch dies as soon as some
/// pair exceeds the largest allowed count or the two-sided dominance bound on
/// the final histogram fails.
pub fn realize_shape(h: &ShapeVector, budget: &EnumerationBudget) -> Result<RealizeOutcome> {
    let (n, k, r, c) = (h.n(), h.k(), h.r(), h.c());
    check_instance(n, k, r, c)?;
    budget.validate()?;
    let cap = h.nonzero_positions().last().copied().unwrap_or(0);
    let mut required_cum = vec![0u64; cap + 2];
    for m in (1..=cap).rev() {
        required_cum[m] = required_cum[m + 1] + h.counts()[m];
    }
    let subsets = k_subsets(n, k);
    let masks: Vec<u64> = subsets.iter().map(|s| mask_of(s)).collect();
    let subset_pairs = subsets
        .iter()
        .map(|s| {
            let mut v = Vec::with_capacity(k * (k - 1) / 2);
            for (i, &a) in s.iter().enumerate() {
                for &b in &s[i + 1..] {
                    v.push((a * n + b) as u32);
                }
            }
            v
        })
        .collect();
    let mut rz = Realizer {
        n,
        k,
        r,
        c,
        cap,
        subsets,
        masks,
        subset_pairs,
        required_cum,
        chosen: Vec::with_capacity(c),
        deadline: Instant::now() + budget.time_cap,
        budget,
        stats: SearchStats { nodes: 0, assignments: 0, complete: true },
        stop: false,
        witness: None,
    };
    let mut remaining = vec![r; n];
    let mut paircnt = vec![0u8; n * n];
    let mut cum = vec![0u64; cap + 2];
    rz.recurse(0, 0, 0, &mut remaining, &mut paircnt, &mut cum);
    if let Some(a) = rz.witness {
        debug_assert_eq!(&a.shape_vector(), h);
        Ok(RealizeOutcome::Found(Box::new(a)))
    } else if rz.stats.complete {
        Ok(RealizeOutcome::NotFound)
    } else {
        Ok(RealizeOutcome::Unknown)
    }
}

/// Result of [`nearest_realizable`].
#[derive(Clone, Debug)]
pub struct NearestResult {
    /// L1 distance from the target to the returned shapes.
    pub distance: u64,
    /// Every realizable shape at that distance, sorted.
    pub shapes: Vec<ShapeVector>,
    /// False when some realizability question at or below this distance hit
    /// the budget, so a closer shape might have been missed.
    pub complete: bool,
}

/// Finds the realizable shape vectors minimizing L1 distance to `h`,
/// scanning outward distance by distance (kernel offsets preserve the two
/// constraint sums, so candidates at each distance are finitely enumerable).
/// The budget applies to each realizability question individually.
pub fn nearest_realizable(h: &ShapeVector, budget: &EnumerationBudget) -> Result<NearestResult> {
    let (n, k, r, c) = (h.n(), h.k(), h.r(), h.c());
    check_instance(n, k, r, c)?;
    let mut complete = true;
    let max_distance = (n * (n - 1)) as u64; // 2 * C(n,2) bounds any shape difference
    let mut dist = 0u64;
    loop {
        let mut found = Vec::new();
        for candidate in shapes_at_distance(h, dist) {
            match realize_shape(&candidate, budget)? {
                RealizeOutcome::Found(_) => found.push(candidate),
                RealizeOutcome::NotFound => {}
                RealizeOutcome::Unknown => complete = false,
            }
        }
        if !found.is_empty() {
            found.sort();
            return Ok(NearestResult { distance: dist, shapes: found, complete });
        }
        dist += 2;
        if dist > max_distance {
            return Ok(NearestResult { distance: dist, shapes: Vec::new(), complete: false });
        }
    }
}

/// All valid shape vectors at exact L1 distance `d` from `h` (offsets lie in
/// the constraint kernel: entries sum to 0 and weighted entries sum to 0).
fn shapes_at_distance(h: &ShapeVector, d: u64) -> Vec<ShapeVector> {
    if d == 0 {
        return vec![h.clone()];
    }
    let r = h.r();
    let counts = h.counts();
    let mut out = Vec::new();
    let mut entry = vec![0i64; r + 1];
    fn rec(
        pos: usize,
        l1_left: i64,
        sum: i64,
        weighted: i64,
        counts: &[u64],
        entry: &mut Vec<i64>,
        out: &mut Vec<Vec<u64>>,
    ) {
        let r = counts.len() - 1;
        if pos > r {
            if l1_left == 0 && sum == 0 && weighted == 0 {
                out.push(
                    entry
                        .iter()
                        .zip(counts)
                        .map(|(&e, &h)| (h as i64 + e) as u64)
                        .collect(),
                );
            }
            return;
        }
        // remaining positions must be able to cancel the running sums
        if sum.abs() > l1_left || weighted.abs() > l1_left * r as i64 {
            return;
        }
        let lo = -(counts[pos] as i64).min(l1_left);
        for e in lo..=l1_left {
            entry[pos] = e;
            rec(
                pos + 1,
                l1_left - e.abs(),
                sum + e,
                weighted + pos as i64 * e,
                counts,
                entry,
                out,
            );
            entry[pos] = 0;
        }
    }
    let mut raw = Vec::new();
    rec(0, d as i64, 0, 0, counts, &mut entry, &mut raw);
    for counts_new in raw {
        if let Ok(sv) = ShapeVector::new(h.n(), h.k(), r, h.c(), counts_new) {
            out.push(sv);
        }
    }
    out
}

/// Exact mean and variance of the distinct-job count over all `C(c, x)`
/// server subsets, by direct enumeration. Independent of the closed forms.
pub fn brute_moments(a: &Assignment, x: usize) -> Result<MomentReport> {
    let c = a.c();
    if x > c {
        return Err(Error::ParameterDomain(format!("x={x} exceeds c={c}")));
    }
    let masks = a.server_masks();
    let words = masks.first().map(|m| m.len()).unwrap_or(0);
    let mut sum = 0u128;
    let mut sum_sq = 0u128;
    let mut count = 0u64;
    let mut acc = vec![0u64; words];
    for subset in k_subsets(c, x) {
        acc.iter_mut().for_each(|w| *w = 0);
        for &s in &subset {
            for (w, m) in acc.iter_mut().zip(&masks[s]) {
                *w |= m;
            }
        }
        let d = acc.iter().map(|w| w.count_ones() as u128).sum::<u128>();
        sum += d;
        sum_sq += d * d;
        count += 1;
    }
    if x == 0 {
        // k_subsets yields nothing for k = 0; the empty subset counts once
        sum = 0;
        sum_sq = 0;
        count = 1;
    }
    let total = BigInt::from(count);
    let mean = BigRational::new(BigInt::from(sum), total.clone());
    let second = BigRational::new(BigInt::from(sum_sq), total);
    let variance = second - &mean * &mean;
    Ok(MomentReport::new(mean, variance, format!("brute force, uniform x={x}")))
}

/// Verdict of one verification clause.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Verdict {
    Pass,
    Fail,
    NotApplicable,
    Unknown,
}

impl std::fmt::Display for Verdict {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let s = match self {
            Verdict::Pass => "PASS",
            Verdict::Fail => "FAIL",
            Verdict::NotApplicable => "N/A",
            Verdict::Unknown => "UNKNOWN",
        };
        f.write_str(s)
    }
}

/// Variance extremes among realizable shapes at one subset size. Rationals
/// are authoritative; the decimal fields are derived renderings.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ExtremesAtX {
    pub x: usize,
    pub min_variance: String,
    pub min_variance_decimal: String,
    pub max_variance: String,
    pub max_variance_decimal: String,
    pub min_shapes: Vec<Vec<u64>>,
    pub max_shapes: Vec<Vec<u64>>,
}

/// Outcome of [`verify_extremal`] on one instance.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ExtremalReport {
    pub n: usize,
    pub k: usize,
    pub r: usize,
    pub c: usize,
    pub enumeration_complete: bool,
    pub assignments_enumerated: u64,
    pub realizable_shapes: Vec<Vec<u64>>,
    pub proximal_candidate: Option<Vec<u64>>,
    pub proximal_realized: bool,
    pub stretched_candidate: Option<Vec<u64>>,
    pub stretched_realized: bool,
    pub per_x: Vec<ExtremesAtX>,
    pub min_variance_verdict: Verdict,
    pub max_variance_verdict: Verdict,
    pub duality_verdict: Verdict,
    pub counterexamples: Vec<String>,
    pub overall: Verdict,
}

impl ExtremalReport {
    /// CLI exit code: 0 pass, 3 counterexample, 4 budget-limited.
    pub fn exit_code(&self) -> i32 {
        match self.overall {
            Verdict::Fail => 3,
            Verdict::Unknown => 4,
            _ => 0,
        }
    }
}

/// Enumerates every balanced assignment of the instance and checks that
/// (a) the proximally compact candidate shape, when realizable, attains the
/// minimum variance for every x, (b) the stretched candidate, when
/// realizable, attains the maximum, and (c) for n = c, an assignment's
/// job-pair histogram is proximally compact exactly when its server-pair
/// histogram is.
pub fn verify_extremal(
    n: usize,
    k: usize,
    r: usize,
    c: usize,
    budget: &EnumerationBudget,
) -> Result<ExtremalReport> {
    check_instance(n, k, r, c)?;
    let mut shapes: BTreeSet<ShapeVector> = BTreeSet::new();
    let mut counterexamples: Vec<String> = Vec::new();
    let mut duality_ok = true;
    let duality_applicable = n == c;
    let stats = for_each_balanced_canonical(n, k, r, c, budget, |a| {
        let shape = a.shape_vector();
        if duality_applicable {
            let job_pc = is_proximally_compact(shape.counts());
            let server_pc = is_proximally_compact(&a.server_shape_vector());
            if job_pc != server_pc {
                duality_ok = false;
                counterexamples.push(format!(
                    "duality: job shape {:?} proximally-compact={} but server shape {:?} proximally-compact={} for {}",
                    shape.counts(),
                    job_pc,
                    a.server_shape_vector(),
                    server_pc,
                    a.to_json()
                ));
            }
        }
        shapes.insert(shape);
        true
    })?;

    let proximal = proximal_shape(n, k, r, c)?;
    let stretched = stretched_shape(n, k, r, c)?;
    let proximal_realized = proximal.as_ref().is_some_and(|h| shapes.contains(h));
    let stretched_realized = stretched.as_ref().is_some_and(|h| shapes.contains(h));

    if shapes.is_empty() {
        if stats.complete {
            return Err(Error::ParameterDomain(
                "no balanced assignment exists for the instance".into(),
            ));
        }
        // budget ran out before the first assignment surfaced
        return Ok(ExtremalReport {
            n,
            k,
            r,
            c,
            enumeration_complete: false,
            assignments_enumerated: 0,
            realizable_shapes: Vec::new(),
            proximal_candidate: proximal.map(|h| h.counts().to_vec()),
            proximal_realized: false,
            stretched_candidate: stretched.map(|h| h.counts().to_vec()),
            stretched_realized: false,
            per_x: Vec::new(),
            min_variance_verdict: Verdict::Unknown,
            max_variance_verdict: Verdict::Unknown,
            duality_verdict: if duality_applicable { Verdict::Unknown } else { Verdict::NotApplicable },
            counterexamples,
            overall: Verdict::Unknown,
        });
    }

    let mut per_x = Vec::new();
    let mut min_ok = true;
    let mut max_ok = true;
    for x in 1..=c {
        let mut best: Option<(BigRational, Vec<Vec<u64>>)> = None;
        let mut worst: Option<(BigRational, Vec<Vec<u64>>)> = None;
        for h in &shapes {
            let v = variance_uniform(h, x)?;
            match &mut best {
                Some((bv, list)) => {
                    if v < *bv {
                        *bv = v.clone();
                        *list = vec![h.counts().to_vec()];
                    } else if v == *bv {
                        list.push(h.counts().to_vec());
                    }
                }
                None => best = Some((v.clone(), vec![h.counts().to_vec()])),
            }
            match &mut worst {
                Some((wv, list)) => {
                    if v > *wv {
                        *wv = v.clone();
                        *list = vec![h.counts().to_vec()];
                    } else if v == *wv {
                        list.push(h.counts().to_vec());
                    }
                }
                None => worst = Some((v, vec![h.counts().to_vec()])),
            }
        }
        let (min_v, min_shapes) = best.expect("shape set checked nonempty above");
        let (max_v, max_shapes) = worst.expect("shape set checked nonempty above");
        if proximal_realized {
            let cand = proximal.as_ref().unwrap().counts().to_vec();
            if !min_shapes.contains(&cand) {
                min_ok = false;
                counterexamples.push(format!(
                    "min variance: x={x}, proximal candidate {:?} has variance above minimum {}",
                    cand,
                    rational_string(&min_v)
                ));
            }
        }
        if stretched_realized {
            let cand = stretched.as_ref().unwrap().counts().to_vec();
            if !max_shapes.contains(&cand) {
                max_ok = false;
                counterexamples.push(format!(
                    "max variance: x={x}, stretched candidate {:?} has variance below maximum {}",
                    cand,
                    rational_string(&max_v)
                ));
            }
        }
        per_x.push(ExtremesAtX {
            x,
            min_variance: rational_string(&min_v),
            min_variance_decimal: decimal_string(&min_v, 12),
            max_variance: rational_string(&max_v),
            max_variance_decimal: decimal_string(&max_v, 12),
            min_shapes,
            max_shapes,
        });
    }

    let verdict_of = |applicable: bool, ok: bool| -> Verdict {
        if !applicable {
            Verdict::NotApplicable
        } else if !ok {
            Verdict::Fail
        } else if !stats.complete {
            Verdict::Unknown
        } else {
            Verdict::Pass
        }
    };
    let min_variance_verdict = verdict_of(proximal_realized, min_ok);
    let max_variance_verdict = verdict_of(stretched_realized, max_ok);
    let duality_verdict = verdict_of(duality_applicable, duality_ok);
    let verdicts = [min_variance_verdict, max_variance_verdict, duality_verdict];
    let overall = if verdicts.contains(&Verdict::Fail) {
        Verdict::Fail
    } else if !stats.complete {
        Verdict::Unknown
    } else {
        Verdict::Pass
    };

    Ok(ExtremalReport {
        n,
        k,
        r,
        c,
        enumeration_complete: stats.complete,
        assignments_enumerated: stats.assignments,
        realizable_shapes: shapes.iter().map(|h| h.counts().to_vec()).collect(),
        proximal_candidate: proximal.map(|h| h.counts().to_vec()),
        proximal_realized,
        stretched_candidate: stretched.map(|h| h.counts().to_vec()),
        stretched_realized,
        per_x,
        min_variance_verdict,
        max_variance_verdict,
        duality_verdict,
        counterexamples,
        overall,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::combinatorics::ratio;
    use crate::moments::mean_uniform;

    fn shapes_of(n: usize, k: usize, r: usize, c: usize) -> Vec<Vec<u64>> {
        let (set, stats) = realizable_shapes(n, k, r, c, &EnumerationBudget::default()).unwrap();
        assert!(stats.complete);
        set.iter().map(|h| h.counts().to_vec()).collect()
    }

    #[test]
    fn enumerate_4224() {
        let (all, stats) = enumerate_balanced(4, 2, 2, 4, &EnumerationBudget::default()).unwrap();
        assert!(stats.complete);
        // 3 four-cycles plus 3 doubled perfect matchings
        assert_eq!(all.len(), 6);
        let shapes: BTreeSet<Vec<u64>> =
            all.iter().map(|a| a.shape_vector().counts().to_vec()).collect();
        assert_eq!(
            shapes.into_iter().collect::<Vec<_>>(),
            vec![vec![2, 4, 0], vec![4, 0, 2]]
        );
        // distinct server lists: no duplicates under server reordering
        let unique: BTreeSet<Vec<Vec<usize>>> =
            all.iter().map(|a| a.servers().to_vec()).collect();
        assert_eq!(unique.len(), all.len());
    }

    #[test]
    fn enumerate_2112() {
        let (all, _) = enumerate_balanced(2, 1, 1, 2, &EnumerationBudget::default()).unwrap();
        assert_eq!(all.len(), 1);
        assert_eq!(all[0].shape_vector().counts(), &[1, 0]);
    }

    #[test]
    fn enumerate_3223_triangle_only() {
        let (all, _) = enumerate_balanced(3, 2, 2, 3, &EnumerationBudget::default()).unwrap();
        assert_eq!(all.len(), 1);
        assert_eq!(all[0].shape_vector().counts(), &[0, 3, 0]);
    }

    #[test]
    fn realizable_shape_sets() {
        assert_eq!(shapes_of(4, 2, 2, 4), vec![vec![2, 4, 0], vec![4, 0, 2]]);
        assert_eq!(shapes_of(3, 2, 2, 3), vec![vec![0, 3, 0]]);
    }

    #[test]
    fn canonical_enumeration_preserves_shape_set() {
        for (n, k, r, c) in [(4, 2, 2, 4), (3, 2, 2, 3), (6, 2, 2, 6), (6, 3, 2, 4), (5, 4, 4, 5)] {
            let budget = EnumerationBudget::default();
            let mut strict = BTreeSet::new();
            for_each_balanced(n, k, r, c, &budget, |a| {
                strict.insert(a.shape_vector());
                true
            })
            .unwrap();
            let (canonical, _) = realizable_shapes(n, k, r, c, &budget).unwrap();
            assert_eq!(strict, canonical, "({n},{k},{r},{c})");
        }
    }

    #[test]
    fn budget_truncation_is_reported() {
        let budget = EnumerationBudget { max_nodes: 5, ..Default::default() };
        let (_, stats) = enumerate_balanced(6, 2, 2, 6, &budget).unwrap();
        assert!(!stats.complete);
    }

    #[test]
    fn realize_finds_table2_shape() {
        let h = ShapeVector::new(9, 3, 3, 9, vec![9, 27, 0, 0]).unwrap();
        match realize_shape(&h, &EnumerationBudget::default()).unwrap() {
            RealizeOutcome::Found(a) => assert_eq!(a.shape_vector(), h),
            other => panic!("expected Found, got {other:?}"),
        }
    }

    #[test]
    fn realize_rejects_unrealizable_4224_shape() {
        let h = ShapeVector::new(4, 2, 2, 4, vec![3, 2, 1]).unwrap();
        assert_eq!(
            realize_shape(&h, &EnumerationBudget::default()).unwrap(),
            RealizeOutcome::NotFound
        );
    }

    #[test]
    fn realize_agrees_with_enumeration_on_6226() {
        // all count vectors satisfying both sums: [9+t, 6-2t, t] for t = 0..3
        let budget = EnumerationBudget::default();
        let (realizable, _) = realizable_shapes(6, 2, 2, 6, &budget).unwrap();
        for t in 0..=3u64 {
            let h = ShapeVector::new(6, 2, 2, 6, vec![9 + t, 6 - 2 * t, t]).unwrap();
            let outcome = realize_shape(&h, &budget).unwrap();
            if realizable.contains(&h) {
                assert!(matches!(outcome, RealizeOutcome::Found(_)), "t={t}");
            } else {
                assert_eq!(outcome, RealizeOutcome::NotFound, "t={t}");
            }
        }
        // doubled-edge counts 0, 1, 3 occur; exactly two doubled edges cannot
        assert!(!realizable
            .contains(&ShapeVector::new(6, 2, 2, 6, vec![11, 2, 2]).unwrap()));
    }

    #[test]
    fn realize_finds_the_fano_plane() {
        let h = ShapeVector::new(7, 3, 3, 7, vec![0, 21, 0, 0]).unwrap();
        match realize_shape(&h, &EnumerationBudget::default()).unwrap() {
            RealizeOutcome::Found(a) => {
                assert_eq!(a.shape_vector(), h);
                // every server pair shares exactly one job in the dual view
                assert_eq!(a.server_shape_vector()[1], 21);
            }
            other => panic!("expected Found, got {other:?}"),
        }
    }

    #[test]
    fn realize_reports_unknown_on_tiny_budget() {
        let h = ShapeVector::new(9, 3, 3, 9, vec![9, 27, 0, 0]).unwrap();
        let budget = EnumerationBudget { max_nodes: 3, ..Default::default() };
        assert_eq!(realize_shape(&h, &budget).unwrap(), RealizeOutcome::Unknown);
    }

    #[test]
    fn nearest_identity_when_realizable() {
        let h = ShapeVector::new(4, 2, 2, 4, vec![2, 4, 0]).unwrap();
        let res = nearest_realizable(&h, &EnumerationBudget::default()).unwrap();
        assert_eq!(res.distance, 0);
        assert_eq!(res.shapes, vec![h]);
        assert!(res.complete);
    }

    #[test]
    fn nearest_ties_both_returned() {
        let h = ShapeVector::new(4, 2, 2, 4, vec![3, 2, 1]).unwrap();
        let res = nearest_realizable(&h, &EnumerationBudget::default()).unwrap();
        assert_eq!(res.distance, 4);
        let got: Vec<Vec<u64>> = res.shapes.iter().map(|s| s.counts().to_vec()).collect();
        assert_eq!(got, vec![vec![2, 4, 0], vec![4, 0, 2]]);
    }

    #[test]
    fn brute_moments_table1() {
        let a = crate::assignment::fixture("table1").unwrap();
        let m = brute_moments(&a, 2).unwrap();
        assert_eq!(m.mean, ratio(27, 5));
        assert_eq!(m.variance, ratio(16, 25));

        let full = brute_moments(&a, 6).unwrap();
        assert_eq!(full.mean, ratio(9, 1));
        assert_eq!(full.variance, ratio(0, 1));

        let none = brute_moments(&a, 0).unwrap();
        assert_eq!(none.mean, ratio(0, 1));
        assert_eq!(none.variance, ratio(0, 1));
    }

    #[test]
    fn oracle_equivalence_small() {
        let budget = EnumerationBudget::default();
        for (n, k, r, c) in [(4, 2, 2, 4), (3, 2, 2, 3)] {
            let (all, _) = enumerate_balanced(n, k, r, c, &budget).unwrap();
            for a in &all {
                let shape = a.shape_vector();
                for x in 0..=c {
                    let brute = brute_moments(a, x).unwrap();
                    assert_eq!(brute.mean, mean_uniform(n, k, r, c, x).unwrap());
                    assert_eq!(brute.variance, variance_uniform(&shape, x).unwrap());
                }
            }
        }
    }

    #[test]
    fn verify_extremal_4224() {
        let report = verify_extremal(4, 2, 2, 4, &EnumerationBudget::default()).unwrap();
        assert_eq!(report.overall, Verdict::Pass);
        assert!(report.proximal_realized);
        assert!(report.stretched_realized);
        assert_eq!(report.proximal_candidate, Some(vec![2, 4, 0]));
        assert_eq!(report.stretched_candidate, Some(vec![4, 0, 2]));
        assert_eq!(report.exit_code(), 0);
    }

    #[test]
    fn verify_extremal_3223_single_shape() {
        let report = verify_extremal(3, 2, 2, 3, &EnumerationBudget::default()).unwrap();
        assert_eq!(report.overall, Verdict::Pass);
        assert_eq!(report.realizable_shapes, vec![vec![0, 3, 0]]);
        // single realizable shape: min and max coincide at every x
        for ex in &report.per_x {
            assert_eq!(ex.min_variance, ex.max_variance);
        }
    }

    #[test]
    fn verify_extremal_unknown_on_tiny_budget() {
        let budget = EnumerationBudget { max_nodes: 2, ..Default::default() };
        let report = verify_extremal(4, 2, 2, 4, &budget).unwrap();
        assert_eq!(report.overall, Verdict::Unknown);
        assert_eq!(report.exit_code(), 4);
    }
}
