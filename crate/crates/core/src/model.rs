//! Interval representations and the brute-force reference answers.
//!
//! A [`UniversalRep`] stores, for each vertex `i` in `1..=n`, the right
//! endpoint `e_i` of its interval `[i, e_i]`. Every structure in this crate is
//! checked against [`UniversalRep::adj`] and [`UniversalRep::deg`].

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result, Violation};

/// Interval graph in universal interval representation. Vertices are 1-based.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct UniversalRep {
    e: Vec<usize>,
}

/// Checks the universal-representation invariants for `n` vertices.
pub fn validate_universal(e: &[usize], n: usize) -> Result<()> {
    if e.len() != n {
        let index = e.len().min(n) + 1;
        return Err(Error::InvalidRep {
            index,
            reason: Violation::WrongLength {
                expected: n,
                actual: e.len(),
            },
        });
    }
    for (k, &ei) in e.iter().enumerate() {
        let i = k + 1;
        if ei < i {
            return Err(Error::InvalidRep {
                index: i,
                reason: Violation::BeforeLeft,
            });
        }
        if ei > n {
            return Err(Error::InvalidRep {
                index: i,
                reason: Violation::PastEnd,
            });
        }
    }
    Ok(())
}

impl UniversalRep {
    /// Builds a representation from right endpoints `e_1..e_n`.
    pub fn new(e: Vec<usize>) -> Result<Self> {
        if e.is_empty() {
            return Err(Error::ZeroVertices);
        }
        validate_universal(&e, e.len())?;
        Ok(Self { e })
    }

    pub(crate) fn from_trusted(e: Vec<usize>) -> Self {
        debug_assert!(validate_universal(&e, e.len()).is_ok());
        Self { e }
    }

    /// Draws each `e_i` independently and uniformly from `[i, n]`.
    pub fn sample<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Result<Self> {
        if n == 0 {
            return Err(Error::ZeroVertices);
        }
        let e = (1..=n).map(|i| rng.random_range(i..=n)).collect();
        Ok(Self { e })
    }

    pub fn complete(n: usize) -> Result<Self> {
        Self::new(vec![n; n])
    }

    pub fn edgeless(n: usize) -> Result<Self> {
        Self::new((1..=n).collect())
    }

    pub fn n(&self) -> usize {
        self.e.len()
    }

    /// Right endpoints, `endpoints()[i - 1] == e_i`.
    pub fn endpoints(&self) -> &[usize] {
        &self.e
    }

    pub fn endpoint(&self, i: usize) -> Result<usize> {
        self.check_vertex(i)?;
        Ok(self.e[i - 1])
    }

    pub(crate) fn check_vertex(&self, i: usize) -> Result<()> {
        check_vertex(i, self.n())
    }

    /// `adj(i, j)`; a vertex is adjacent to itself.
    pub fn adj(&self, i: usize, j: usize) -> Result<bool> {
        self.check_vertex(i)?;
        self.check_vertex(j)?;
        let (a, b) = (i.min(j), i.max(j));
        Ok(self.e[a - 1] >= b)
    }

    /// Number of neighbours of `i`, computed from the endpoint list in O(n).
    pub fn deg(&self, i: usize) -> Result<usize> {
        self.check_vertex(i)?;
        let left = self.e[..i - 1].iter().filter(|&&ej| ej >= i).count();
        Ok(left + self.e[i - 1] - i)
    }

    /// All degrees in O(n) using a sweep over right endpoints.
    pub fn degrees(&self) -> Vec<usize> {
        let n = self.n();
        // ends[p] = number of intervals with right endpoint p
        let mut ends = vec![0usize; n + 2];
        for &ej in &self.e {
            ends[ej] += 1;
        }
        let mut open = 0usize; // intervals j < i with e_j >= i
        let mut out = Vec::with_capacity(n);
        for (i, &ei) in (1..=n).zip(&self.e) {
            out.push(open + ei - i);
            // interval i becomes a crossing interval for i+1 if e_i > i
            open += 1;
            open -= ends[i];
        }
        out
    }

    /// UIR v1 text form.
    pub fn to_text(&self) -> String {
        let body = self
            .e
            .iter()
            .map(|v| v.to_string())
            .collect::<Vec<_>>()
            .join(" ");
        format!("UIR 1\n{}\n{}\n", self.n(), body)
    }

    pub fn from_text(text: &str) -> Result<Self> {
        let mut lines = text.lines();
        match lines.next().map(str::trim) {
            Some("UIR 1") => {}
            other => {
                return Err(Error::Format(format!(
                    "expected header `UIR 1`, found {other:?}"
                )))
            }
        }
        let n: usize = lines
            .next()
            .ok_or_else(|| Error::Format("missing vertex count".into()))?
            .trim()
            .parse()
            .map_err(|e| Error::Format(format!("bad vertex count: {e}")))?;
        let e = lines
            .next()
            .unwrap_or("")
            .split_whitespace()
            .map(|t| {
                t.parse::<usize>()
                    .map_err(|err| Error::Format(format!("bad endpoint {t:?}: {err}")))
            })
            .collect::<Result<Vec<_>>>()?;
        if lines.any(|l| !l.trim().is_empty()) {
            return Err(Error::Format("trailing content after endpoint line".into()));
        }
        if n == 0 {
            return Err(Error::ZeroVertices);
        }
        validate_universal(&e, n)?;
        Ok(Self { e })
    }

    /// Binary form: `UIR1`, u64 LE n, then n u64 LE endpoints.
    pub fn to_binary(&self) -> Vec<u8> {
        let mut out = Vec::with_capacity(12 + 8 * self.n());
        out.extend_from_slice(b"UIR1");
        out.extend_from_slice(&(self.n() as u64).to_le_bytes());
        for &v in &self.e {
            out.extend_from_slice(&(v as u64).to_le_bytes());
        }
        out
    }

    pub fn from_binary(bytes: &[u8]) -> Result<Self> {
        if bytes.len() < 12 || &bytes[..4] != b"UIR1" {
            return Err(Error::Format("missing UIR1 magic".into()));
        }
        let n = u64::from_le_bytes(bytes[4..12].try_into().unwrap()) as usize;
        let body = &bytes[12..];
        if body.len() != n.checked_mul(8).ok_or(Error::Overflow("vertex count"))? {
            return Err(Error::Format(format!(
                "expected {} endpoint bytes, found {}",
                n * 8,
                body.len()
            )));
        }
        let e = body
            .chunks_exact(8)
            .map(|c| u64::from_le_bytes(c.try_into().unwrap()) as usize)
            .collect::<Vec<_>>();
        if n == 0 {
            return Err(Error::ZeroVertices);
        }
        validate_universal(&e, n)?;
        Ok(Self { e })
    }
}

pub(crate) fn check_vertex(i: usize, n: usize) -> Result<()> {
    if i == 0 || i > n {
        Err(Error::VertexOutOfRange { vertex: i, n })
    } else {
        Ok(())
    }
}

/// Seeded uniform sample; identical seeds give identical representations.
pub fn sample_uniform(n: usize, seed: u64) -> Result<UniversalRep> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    UniversalRep::sample(n, &mut rng)
}

/// Closed intervals with pairwise distinct integer endpoints drawn from `[1, 2n]`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ClassicRep {
    intervals: Vec<(usize, usize)>,
}

impl ClassicRep {
    pub fn new(intervals: Vec<(usize, usize)>) -> Result<Self> {
        let n = intervals.len();
        if n == 0 {
            return Err(Error::EmptyInput);
        }
        let mut seen = vec![false; 2 * n + 1];
        for (idx, &(l, r)) in intervals.iter().enumerate() {
            if l >= r {
                return Err(Error::InvalidClassic(format!(
                    "interval {} has left {l} >= right {r}",
                    idx + 1
                )));
            }
            for p in [l, r] {
                if p == 0 || p > 2 * n {
                    return Err(Error::InvalidClassic(format!(
                        "endpoint {p} outside [1, {}]",
                        2 * n
                    )));
                }
                if std::mem::replace(&mut seen[p], true) {
                    return Err(Error::InvalidClassic(format!("endpoint {p} repeated")));
                }
            }
        }
        Ok(Self { intervals })
    }

    pub fn intervals(&self) -> &[(usize, usize)] {
        &self.intervals
    }

    pub fn n(&self) -> usize {
        self.intervals.len()
    }

    /// Closed-interval intersection test between intervals `a` and `b` (0-based).
    pub fn intersects(&self, a: usize, b: usize) -> bool {
        let (la, ra) = self.intervals[a];
        let (lb, rb) = self.intervals[b];
        la.max(lb) <= ra.min(rb)
    }
}

/// Maps arbitrary closed intervals onto distinct integer endpoints in `[1, 2n]`.
///
/// Endpoints are ranked by value; equal values put left endpoints before right
/// endpoints (so touching intervals stay adjacent) and then order by input
/// position.
pub fn normalize_to_classic(raw: &[(f64, f64)]) -> Result<ClassicRep> {
    if raw.is_empty() {
        return Err(Error::EmptyInput);
    }
    for (idx, &(l, r)) in raw.iter().enumerate() {
        if !l.is_finite() || !r.is_finite() {
            return Err(Error::InvalidClassic(format!(
                "interval {} has a non-finite endpoint",
                idx + 1
            )));
        }
        if l > r {
            return Err(Error::InvalidClassic(format!(
                "interval {} has left {l} > right {r}",
                idx + 1
            )));
        }
    }
    // (value, side: 0 = left / 1 = right, interval index)
    let mut points: Vec<(f64, u8, usize)> = raw
        .iter()
        .enumerate()
        .flat_map(|(k, &(l, r))| [(l, 0u8, k), (r, 1u8, k)])
        .collect();
    points.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)).then(a.2.cmp(&b.2)));
    let mut out = vec![(0usize, 0usize); raw.len()];
    for (rank, &(_, side, k)) in points.iter().enumerate() {
        if side == 0 {
            out[k].0 = rank + 1;
        } else {
            out[k].1 = rank + 1;
        }
    }
    ClassicRep::new(out)
}

/// Converts to universal form; also returns `label[k]`, the new vertex of
/// input interval `k` (0-based input, 1-based vertex).
///
/// The vertex with the k-th smallest left endpoint becomes vertex k and
/// `e_k = |{ j : L_j < R_k }|`.
pub fn classic_to_universal_labeled(c: &ClassicRep) -> (UniversalRep, Vec<usize>) {
    let n = c.n();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by_key(|&k| c.intervals[k].0);
    let lefts: Vec<usize> = order.iter().map(|&k| c.intervals[k].0).collect();
    let mut label = vec![0usize; n];
    let mut e = Vec::with_capacity(n);
    for (pos, &k) in order.iter().enumerate() {
        label[k] = pos + 1;
        let r = c.intervals[k].1;
        e.push(lefts.partition_point(|&l| l < r));
    }
    (UniversalRep::from_trusted(e), label)
}

pub fn classic_to_universal(c: &ClassicRep) -> UniversalRep {
    classic_to_universal_labeled(c).0
}

/// Recovers `e_i` by binary search over `adj(i, ·)`.
///
/// Uses at most `ceil(log2(n - i + 1))` callback invocations; `adj(i, i)` is
/// known to be true and never asked.
pub fn endpoint_via_adj<F>(mut adj: F, i: usize, n: usize) -> Result<usize>
where
    F: FnMut(usize, usize) -> Result<bool>,
{
    check_vertex(i, n)?;
    let (mut lo, mut hi) = (i, n);
    while lo < hi {
        let mid = lo + (hi - lo).div_ceil(2);
        if adj(i, mid)? {
            lo = mid;
        } else {
            hi = mid - 1;
        }
    }
    Ok(lo)
}

/// Rebuilds the representation from the `n` degree answers.
///
/// Decodes left to right with `e_k = k + deg(k) - k'`, where `k'` counts
/// already-decoded intervals `j < k` with `e_j >= k`.
pub fn reconstruct_from_degrees<F>(mut deg: F, n: usize) -> Result<UniversalRep>
where
    F: FnMut(usize) -> Result<usize>,
{
    if n == 0 {
        return Err(Error::ZeroVertices);
    }
    let mut e = Vec::with_capacity(n);
    // expire[p] = decoded intervals whose last covered point is p
    let mut expire = vec![0usize; n + 2];
    let mut crossing = 0usize;
    for k in 1..=n {
        let d = deg(k)?;
        let derived = k as i128 + d as i128 - crossing as i128;
        if derived < k as i128 || derived > n as i128 {
            return Err(Error::InconsistentDegrees { index: k, derived });
        }
        let ek = derived as usize;
        e.push(ek);
        expire[ek] += 1;
        // crossing for k+1: intervals j <= k with e_j >= k+1
        crossing += 1;
        crossing -= expire[k];
    }
    Ok(UniversalRep::from_trusted(e))
}
