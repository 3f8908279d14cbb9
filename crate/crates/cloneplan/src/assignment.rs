//! Balanced `(n, k, r, c)` assignments of jobs to servers.
//!
//! Jobs and servers are 0-indexed contiguous integers. An assignment is an
//! ordered list of `c` job-sets of size `k` in which every job appears in
//! exactly `r` sets; `n*r = k*c` follows. Equality of [`Assignment`]s is
//! order-sensitive (they are matrices); the semantic equivalence that
//! determines recovery moments is equality of [`ShapeVector`]s.

use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::combinatorics::binom;
use crate::{Error, Result};

/// A validated balanced `(n, k, r, c)` job-to-server assignment.
///
/// Each server's job set is stored sorted ascending; the server list order is
/// preserved as given.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Assignment {
    n: usize,
    k: usize,
    r: usize,
    c: usize,
    servers: Vec<Vec<usize>>,
}

impl Assignment {
    /// Validates and wraps an explicit server list.
    pub fn from_servers(
        n: usize,
        k: usize,
        r: usize,
        c: usize,
        servers: Vec<Vec<usize>>,
    ) -> Result<Self> {
        if n == 0 || k == 0 || r == 0 || c == 0 {
            return Err(Error::ParameterDomain(format!(
                "all of n, k, r, c must be positive, got ({n},{k},{r},{c})"
            )));
        }
        if k > n {
            return Err(Error::ParameterDomain(format!("k={k} exceeds n={n}")));
        }
        if r > c {
            return Err(Error::ParameterDomain(format!("r={r} exceeds c={c}")));
        }
        let (nr, kc) = ((n * r) as u64, (k * c) as u64);
        if nr != kc {
            return Err(Error::Consistency { nr, kc });
        }
        if servers.len() != c {
            return Err(Error::Balance(format!(
                "expected {c} servers, got {}",
                servers.len()
            )));
        }
        let mut sorted: Vec<Vec<usize>> = Vec::with_capacity(c);
        let mut degree = vec![0usize; n];
        for (j, jobs) in servers.into_iter().enumerate() {
            for &job in &jobs {
                if job >= n {
                    return Err(Error::IndexOutOfRange(format!(
                        "job {job} on server {j} exceeds n-1={}",
                        n - 1
                    )));
                }
            }
            let mut jobs = jobs;
            jobs.sort_unstable();
            jobs.dedup();
            if jobs.len() != k {
                return Err(Error::Balance(format!(
                    "server {j} has {} distinct jobs, expected k={k}",
                    jobs.len()
                )));
            }
            for &job in &jobs {
                degree[job] += 1;
            }
            sorted.push(jobs);
        }
        for (job, &d) in degree.iter().enumerate() {
            if d != r {
                return Err(Error::Balance(format!(
                    "job {job} appears on {d} servers, expected r={r}"
                )));
            }
        }
        Ok(Assignment { n, k, r, c, servers: sorted })
    }

    /// Cyclic construction: server `j` gets jobs `{j, j+1, ..., j+k-1 mod n}`,
    /// giving a balanced `(n, k, k, n)` assignment.
    pub fn cyclic(n: usize, k: usize) -> Result<Self> {
        if k > n {
            return Err(Error::ParameterDomain(format!(
                "cyclic construction needs k <= n, got k={k}, n={n}"
            )));
        }
        let servers = (0..n)
            .map(|j| (0..k).map(|i| (j + i) % n).collect())
            .collect();
        Self::from_servers(n, k, k, n, servers)
    }

    /// Repetition construction: partitions the jobs into `n/k` groups of `k`
    /// and assigns each group verbatim to `r` servers (so `c = n*r/k`). The
    /// resulting shape vector is nonzero only at positions `0` and `r`.
    pub fn stretched(n: usize, k: usize, r: usize) -> Result<Self> {
        if k == 0 || !n.is_multiple_of(k) {
            return Err(Error::Divisibility(format!(
                "repetition construction needs k | n, got n={n}, k={k}"
            )));
        }
        let c = n / k * r;
        let mut servers = Vec::with_capacity(c);
        for g in 0..n / k {
            let group: Vec<usize> = (g * k..(g + 1) * k).collect();
            for _ in 0..r {
                servers.push(group.clone());
            }
        }
        Self::from_servers(n, k, r, c, servers)
    }

    pub fn n(&self) -> usize {
        self.n
    }
    pub fn k(&self) -> usize {
        self.k
    }
    pub fn r(&self) -> usize {
        self.r
    }
    pub fn c(&self) -> usize {
        self.c
    }

    /// Server job-sets, each sorted ascending.
    pub fn servers(&self) -> &[Vec<usize>] {
        &self.servers
    }

    /// Job membership bitmask per server, `(n+63)/64` words each.
    pub fn server_masks(&self) -> Vec<Vec<u64>> {
        let words = self.n.div_ceil(64);
        self.servers
            .iter()
            .map(|jobs| {
                let mut mask = vec![0u64; words];
                for &j in jobs {
                    mask[j / 64] |= 1 << (j % 64);
                }
                mask
            })
            .collect()
    }

    /// Number of distinct jobs held by the given set of servers.
    ///
    /// Duplicate indices in `subset` are ignored (it denotes a set).
    pub fn distinct_jobs(&self, subset: &[usize]) -> Result<usize> {
        let words = self.n.div_ceil(64);
        let mut acc = vec![0u64; words];
        for &s in subset {
            if s >= self.c {
                return Err(Error::IndexOutOfRange(format!(
                    "server {s} exceeds c-1={}",
                    self.c - 1
                )));
            }
            for &j in &self.servers[s] {
                acc[j / 64] |= 1 << (j % 64);
            }
        }
        Ok(acc.iter().map(|w| w.count_ones() as usize).sum())
    }

    /// Histogram of job-pair co-assignment frequencies: entry `m` counts the
    /// unordered job pairs that share exactly `m` servers.
    pub fn shape_vector(&self) -> ShapeVector {
        let n = self.n;
        let mut pair = vec![0u32; n * n];
        for jobs in &self.servers {
            for (i, &a) in jobs.iter().enumerate() {
                for &b in &jobs[i + 1..] {
                    pair[a * n + b] += 1;
                }
            }
        }
        let mut counts = vec![0u64; self.r + 1];
        for a in 0..n {
            for b in a + 1..n {
                counts[pair[a * n + b] as usize] += 1;
            }
        }
        ShapeVector::new(self.n, self.k, self.r, self.c, counts)
            .expect("shape of a valid assignment satisfies its own constraints")
    }

    /// Histogram of server-pair shared-job counts: entry `m` counts the
    /// unordered server pairs with exactly `m` jobs in common (length `k+1`).
    pub fn server_shape_vector(&self) -> Vec<u64> {
        let masks = self.server_masks();
        let mut counts = vec![0u64; self.k + 1];
        for i in 0..self.c {
            for j in i + 1..self.c {
                let shared: u32 = masks[i]
                    .iter()
                    .zip(&masks[j])
                    .map(|(a, b)| (a & b).count_ones())
                    .sum();
                counts[shared as usize] += 1;
            }
        }
        counts
    }

    /// Serializes to the canonical JSON form
    /// `{"n":..,"k":..,"r":..,"c":..,"servers":[[..],..]}`.
    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("assignment serialization cannot fail")
    }

    /// Parses and validates the canonical JSON form.
    pub fn from_json(s: &str) -> Result<Self> {
        Ok(serde_json::from_str(s)?)
    }

    /// Emits the header-free 0/1 incidence matrix, `n` rows by `c` columns,
    /// comma-separated.
    pub fn to_csv_matrix(&self) -> String {
        let mut rows = vec![vec![b'0'; self.c]; self.n];
        for (j, jobs) in self.servers.iter().enumerate() {
            for &job in jobs {
                rows[job][j] = b'1';
            }
        }
        let mut out = String::new();
        for row in rows {
            let cells: Vec<String> = row.iter().map(|b| (*b as char).to_string()).collect();
            out.push_str(&cells.join(","));
            out.push('\n');
        }
        out
    }

    /// Parses the header-free 0/1 incidence matrix; infers `(n, k, r, c)`.
    pub fn from_csv_matrix(s: &str) -> Result<Self> {
        let mut rows: Vec<Vec<u8>> = Vec::new();
        for (ln, line) in s.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() {
                continue;
            }
            let row: Vec<u8> = line
                .split(',')
                .map(|cell| match cell.trim() {
                    "0" => Ok(0u8),
                    "1" => Ok(1u8),
                    other => Err(Error::Parse(format!(
                        "line {}: expected 0 or 1, got `{other}`",
                        ln + 1
                    ))),
                })
                .collect::<Result<_>>()?;
            rows.push(row);
        }
        if rows.is_empty() {
            return Err(Error::Parse("empty CSV matrix".into()));
        }
        let c = rows[0].len();
        if rows.iter().any(|r| r.len() != c) {
            return Err(Error::Parse("ragged CSV matrix".into()));
        }
        let n = rows.len();
        let mut servers = vec![Vec::new(); c];
        for (job, row) in rows.iter().enumerate() {
            for (srv, &bit) in row.iter().enumerate() {
                if bit == 1 {
                    servers[srv].push(job);
                }
            }
        }
        // infer (k, r) from the first column/row; from_servers flags any
        // job or server that disagrees
        let k = servers.first().map(|s| s.len()).unwrap_or(0);
        let r = rows[0].iter().map(|&b| b as usize).sum::<usize>();
        Self::from_servers(n, k, r, c, servers)
    }
}

#[derive(Serialize, Deserialize)]
struct AssignmentRepr {
    n: usize,
    k: usize,
    r: usize,
    c: usize,
    servers: Vec<Vec<usize>>,
}

impl Serialize for Assignment {
    fn serialize<S: Serializer>(&self, ser: S) -> std::result::Result<S::Ok, S::Error> {
        AssignmentRepr {
            n: self.n,
            k: self.k,
            r: self.r,
            c: self.c,
            servers: self.servers.clone(),
        }
        .serialize(ser)
    }
}

impl<'de> Deserialize<'de> for Assignment {
    fn deserialize<D: Deserializer<'de>>(de: D) -> std::result::Result<Self, D::Error> {
        let repr = AssignmentRepr::deserialize(de)?;
        Assignment::from_servers(repr.n, repr.k, repr.r, repr.c, repr.servers)
            .map_err(D::Error::custom)
    }
}

/// Job-pair co-assignment histogram of a balanced `(n, k, r, c)` assignment:
/// `counts[m]` is the number of unordered job pairs sharing exactly `m`
/// servers. Always satisfies `sum counts = C(n,2)` and
/// `sum m*counts[m] = c*C(k,2)`.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct ShapeVector {
    n: usize,
    k: usize,
    r: usize,
    c: usize,
    counts: Vec<u64>,
}

impl ShapeVector {
    pub fn new(n: usize, k: usize, r: usize, c: usize, counts: Vec<u64>) -> Result<Self> {
        if n == 0 || k == 0 || r == 0 || c == 0 || k > n || r > c {
            return Err(Error::ParameterDomain(format!(
                "invalid balanced parameters ({n},{k},{r},{c})"
            )));
        }
        let (nr, kc) = ((n * r) as u64, (k * c) as u64);
        if nr != kc {
            return Err(Error::Consistency { nr, kc });
        }
        if counts.len() != r + 1 {
            return Err(Error::InvalidShape(format!(
                "length {} but r+1 = {}",
                counts.len(),
                r + 1
            )));
        }
        let total: u64 = counts.iter().sum();
        let expected_total = binom(n as i64, 2);
        if num::BigInt::from(total) != expected_total {
            return Err(Error::InvalidShape(format!(
                "entries sum to {total}, expected C(n,2) = {expected_total}"
            )));
        }
        let weighted: u64 = counts.iter().enumerate().map(|(m, &v)| m as u64 * v).sum();
        let expected_weighted = num::BigInt::from(c as u64) * binom(k as i64, 2);
        if num::BigInt::from(weighted) != expected_weighted {
            return Err(Error::InvalidShape(format!(
                "weighted sum is {weighted}, expected c*C(k,2) = {expected_weighted}"
            )));
        }
        Ok(ShapeVector { n, k, r, c, counts })
    }

    pub fn n(&self) -> usize {
        self.n
    }
    pub fn k(&self) -> usize {
        self.k
    }
    pub fn r(&self) -> usize {
        self.r
    }
    pub fn c(&self) -> usize {
        self.c
    }

    pub fn counts(&self) -> &[u64] {
        &self.counts
    }

    /// Indices of the nonzero entries, ascending.
    pub fn nonzero_positions(&self) -> Vec<usize> {
        self.counts
            .iter()
            .enumerate()
            .filter(|(_, &v)| v > 0)
            .map(|(m, _)| m)
            .collect()
    }
}

#[derive(Serialize, Deserialize)]
struct ShapeVectorRepr {
    n: usize,
    k: usize,
    r: usize,
    c: usize,
    counts: Vec<u64>,
}

impl Serialize for ShapeVector {
    fn serialize<S: Serializer>(&self, ser: S) -> std::result::Result<S::Ok, S::Error> {
        ShapeVectorRepr {
            n: self.n,
            k: self.k,
            r: self.r,
            c: self.c,
            counts: self.counts.clone(),
        }
        .serialize(ser)
    }
}

impl<'de> Deserialize<'de> for ShapeVector {
    fn deserialize<D: Deserializer<'de>>(de: D) -> std::result::Result<Self, D::Error> {
        let repr = ShapeVectorRepr::deserialize(de)?;
        ShapeVector::new(repr.n, repr.k, repr.r, repr.c, repr.counts).map_err(D::Error::custom)
    }
}

/// Worked examples shipped as fixtures for golden tests and the CLI.
///
/// - `table1`: balanced `(9,3,2,6)`, shape `[21,12,3]`
/// - `table2`: proximally compact `(9,3,3,9)`, shape `[9,27,0,0]`
/// - `table3`: repetition `(9,3,2,6)`, shape `[27,0,9]`
/// - `table4`: `(14,6,3,7)` whose *server* pairs all share exactly 2 jobs
pub fn fixture(name: &str) -> Result<Assignment> {
    let (n, k, r, c, servers): (usize, usize, usize, usize, Vec<Vec<usize>>) = match name {
        "table1" => (
            9,
            3,
            2,
            6,
            vec![
                vec![0, 5, 6],
                vec![0, 1, 6],
                vec![1, 2, 7],
                vec![2, 3, 7],
                vec![3, 4, 8],
                vec![4, 5, 8],
            ],
        ),
        "table2" => (
            9,
            3,
            3,
            9,
            vec![
                vec![0, 3, 6],
                vec![0, 4, 7],
                vec![0, 5, 8],
                vec![1, 3, 8],
                vec![1, 4, 6],
                vec![1, 5, 7],
                vec![2, 3, 7],
                vec![2, 4, 8],
                vec![2, 5, 6],
            ],
        ),
        "table3" => (
            9,
            3,
            2,
            6,
            vec![
                vec![0, 1, 2],
                vec![0, 1, 2],
                vec![3, 4, 5],
                vec![3, 4, 5],
                vec![6, 7, 8],
                vec![6, 7, 8],
            ],
        ),
        "table4" => (
            14,
            6,
            3,
            7,
            vec![
                vec![1, 3, 5, 7, 10, 11],
                vec![0, 3, 4, 8, 10, 12],
                vec![2, 3, 6, 9, 10, 13],
                vec![0, 1, 2, 7, 8, 9],
                vec![1, 4, 6, 8, 11, 13],
                vec![0, 5, 6, 7, 12, 13],
                vec![2, 4, 5, 9, 11, 12],
            ],
        ),
        other => return Err(Error::UnknownFixture(other.to_string())),
    };
    Assignment::from_servers(n, k, r, c, servers)
}

/// Names accepted by [`fixture`].
pub const FIXTURE_NAMES: &[&str] = &["table1", "table2", "table3", "table4"];
