//! Space and probe measurements against the `log₂(n!)` benchmark.

use std::fmt;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::adj::AdjCode;
use crate::bits::WordProbes;
use crate::cellprobe::CellProbeCode;
use crate::deg::DegCode;
use crate::error::{Error, Result};
use crate::model::sample_uniform;

pub const CSV_HEADER: &str = "n,kind,measured_bits,benchmark_bits,redundancy,normalized_redundancy,probe_min,probe_mean,probe_max,meta_bits";

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Kind {
    Adj,
    Deg,
    CellProbe,
}

impl Kind {
    pub const ALL: [Kind; 3] = [Kind::Adj, Kind::Deg, Kind::CellProbe];

    pub fn as_str(self) -> &'static str {
        match self {
            Kind::Adj => "adj",
            Kind::Deg => "deg",
            Kind::CellProbe => "cellprobe",
        }
    }

    /// `√n·log₂n`, `n^{2/3}·log₂n` or `1`.
    pub fn normalizer(self, n: usize) -> f64 {
        let n = n as f64;
        match self {
            Kind::Adj => n.sqrt() * n.log2(),
            Kind::Deg => n.powf(2.0 / 3.0) * n.log2(),
            Kind::CellProbe => 1.0,
        }
    }
}

impl fmt::Display for Kind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Kind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "adj" => Ok(Kind::Adj),
            "deg" => Ok(Kind::Deg),
            "cellprobe" => Ok(Kind::CellProbe),
            other => Err(Error::Format(format!(
                "unknown structure kind {other:?} (expected adj, deg or cellprobe)"
            ))),
        }
    }
}

/// `log₂(n!)` by Neumaier-compensated summation of `log₂ k`.
pub fn log_factorial_bits(n: usize) -> f64 {
    let (mut sum, mut comp) = (0.0f64, 0.0f64);
    for k in 2..=n {
        let term = (k as f64).log2();
        let t = sum + term;
        if sum.abs() >= term.abs() {
            comp += (sum - t) + term;
        } else {
            comp += (term - t) + sum;
        }
        sum = t;
    }
    sum + comp
}

#[derive(Clone, Debug, PartialEq)]
pub struct AuditReport {
    pub n: usize,
    pub kind: Kind,
    pub measured_bits: usize,
    pub benchmark_bits: f64,
    pub redundancy: f64,
    pub normalized_redundancy: f64,
    pub probe_min: usize,
    pub probe_mean: f64,
    pub probe_max: usize,
    /// Plan tables held outside the data bits (cellprobe only).
    pub meta_bits: Option<usize>,
}

impl AuditReport {
    pub fn csv_row(&self) -> String {
        format!(
            "{},{},{},{:.6},{:.6},{:.6},{},{:.4},{},{}",
            self.n,
            self.kind,
            self.measured_bits,
            self.benchmark_bits,
            self.redundancy,
            self.normalized_redundancy,
            self.probe_min,
            self.probe_mean,
            self.probe_max,
            self.meta_bits.map(|m| m.to_string()).unwrap_or_default()
        )
    }
}

/// Builds `kind` over `sample_uniform(n, seed)` and measures it with
/// `query_samples` random queries.
pub fn redundancy_report(
    kind: Kind,
    n: usize,
    seed: u64,
    query_samples: usize,
) -> Result<AuditReport> {
    let rep = sample_uniform(n, seed)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x9e37_79b9_7f4a_7c15);
    let mut probes = WordProbes::new();
    let mut counts = Vec::with_capacity(query_samples);
    let pair = |rng: &mut ChaCha8Rng| (rng.random_range(1..=n), rng.random_range(1..=n));

    let (measured_bits, meta_bits) = match kind {
        Kind::Adj => {
            let code = AdjCode::build(&rep)?;
            for _ in 0..query_samples {
                let (i, j) = pair(&mut rng);
                probes.reset();
                check(
                    code.query_probed(i, j, &mut probes)?,
                    rep.adj(i, j)?,
                    kind,
                    n,
                )?;
                counts.push(probes.count());
            }
            (code.measured_bits(), None)
        }
        Kind::Deg => {
            let code = DegCode::build(&rep)?;
            let degrees = rep.degrees();
            for _ in 0..query_samples {
                let i = rng.random_range(1..=n);
                probes.reset();
                check(code.query_probed(i, &mut probes)?, degrees[i - 1], kind, n)?;
                counts.push(probes.count());
            }
            (code.measured_bits(), None)
        }
        Kind::CellProbe => {
            let code = CellProbeCode::build(&rep)?;
            for _ in 0..query_samples {
                let (i, j) = pair(&mut rng);
                probes.reset();
                check(
                    code.query_probed(i, j, &mut probes)?,
                    rep.adj(i, j)?,
                    kind,
                    n,
                )?;
                counts.push(probes.count());
            }
            (code.data_bits(), Some(code.meta_bits()))
        }
    };

    let benchmark_bits = log_factorial_bits(n);
    let redundancy = measured_bits as f64 - benchmark_bits;
    if redundancy < -1.0 {
        return Err(Error::Internal(format!(
            "{kind} at n={n} stores {measured_bits} bits, below the benchmark {benchmark_bits:.3}"
        )));
    }
    let (probe_min, probe_max, probe_mean) = if counts.is_empty() {
        (0, 0, 0.0)
    } else {
        (
            *counts.iter().min().unwrap(),
            *counts.iter().max().unwrap(),
            counts.iter().sum::<usize>() as f64 / counts.len() as f64,
        )
    };
    Ok(AuditReport {
        n,
        kind,
        measured_bits,
        benchmark_bits,
        redundancy,
        normalized_redundancy: redundancy / kind.normalizer(n).max(1.0),
        probe_min,
        probe_mean,
        probe_max,
        meta_bits,
    })
}

fn check<T: PartialEq + fmt::Debug>(got: T, want: T, kind: Kind, n: usize) -> Result<()> {
    if got != want {
        return Err(Error::Internal(format!(
            "{kind} at n={n} answered {got:?}, reference says {want:?}"
        )));
    }
    Ok(())
}

/// One report per `n`, all with the same seed.
pub fn redundancy_curve(
    kind: Kind,
    n_list: &[usize],
    seed: u64,
    query_samples: usize,
) -> Result<Vec<AuditReport>> {
    if n_list.is_empty() {
        return Err(Error::EmptyInput);
    }
    n_list
        .iter()
        .map(|&n| redundancy_report(kind, n, seed, query_samples))
        .collect()
}

/// Header plus one line per report.
pub fn to_csv(reports: &[AuditReport]) -> String {
    let mut out = String::from(CSV_HEADER);
    out.push('\n');
    for r in reports {
        out.push_str(&r.csv_row());
        out.push('\n');
    }
    out
}
