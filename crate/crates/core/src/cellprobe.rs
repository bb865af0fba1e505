//! Adjacency in `log₂(n!) + O(1)` data bits.
//!
//! The lengths `x_i = e_i − i ∈ [n − i + 1]` are stored as one grouped spill
//! chain. The group plan is a function of `n` alone. It is kept in memory and
//! reported as [`CellProbeCode::meta_bits`], separate from the data bits; the
//! `*_recomputed` queries derive it on the fly instead and read no metadata.

use crate::adj::read_header;
use crate::bits::ProbeSink;
use crate::chain::{access_recomputed, GroupPlan, SpillCode, DEFAULT_TARGET};
use crate::error::{Error, Result};
use crate::model::{check_vertex, UniversalRep};

pub const CPA_MAGIC: &[u8; 4] = b"CPA1";

fn universes(n: usize) -> impl Iterator<Item = u128> + Clone {
    (1..=n as u128).rev()
}

/// The deterministic group plan for `n` vertices.
pub fn plan_for(n: usize) -> Result<GroupPlan> {
    GroupPlan::new(&universes(n).collect::<Vec<_>>(), DEFAULT_TARGET)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CellProbeCode {
    n: usize,
    data: SpillCode,
}

impl CellProbeCode {
    pub fn build(rep: &UniversalRep) -> Result<Self> {
        let n = rep.n();
        let lengths: Vec<u128> = rep
            .endpoints()
            .iter()
            .enumerate()
            .map(|(k, &ei)| (ei - k - 1) as u128)
            .collect();
        let data = SpillCode::encode(&lengths, plan_for(n)?)?;
        Ok(Self { n, data })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn data(&self) -> &SpillCode {
        &self.data
    }

    /// Body plus tail bits.
    pub fn data_bits(&self) -> usize {
        self.data.data_bits()
    }

    /// Size of the materialized plan tables.
    pub fn meta_bits(&self) -> usize {
        self.data.plan().meta_bits()
    }

    pub fn meta_bytes(&self) -> Vec<u8> {
        self.data.plan().to_meta_bytes()
    }

    /// `x_i = e_i − i`.
    pub fn length_probed<P: ProbeSink>(&self, i: usize, probes: &mut P) -> Result<usize> {
        check_vertex(i, self.n)?;
        Ok(self.data.get_probed(i - 1, probes)? as usize)
    }

    pub fn endpoint(&self, i: usize) -> Result<usize> {
        Ok(i + self.length_probed(i, &mut ())?)
    }

    pub fn query(&self, i: usize, j: usize) -> Result<bool> {
        self.query_probed(i, j, &mut ())
    }

    /// Only data words are reported to `probes`; plan lookups are free.
    pub fn query_probed<P: ProbeSink>(&self, i: usize, j: usize, probes: &mut P) -> Result<bool> {
        check_vertex(i, self.n)?;
        check_vertex(j, self.n)?;
        let (a, b) = (i.min(j), i.max(j));
        Ok(a + self.length_probed(a, probes)? >= b)
    }

    /// Like [`query_probed`](Self::query_probed) but re-derives the plan
    /// from `n` instead of reading the stored tables.
    pub fn query_recomputed<P: ProbeSink>(
        &self,
        i: usize,
        j: usize,
        probes: &mut P,
    ) -> Result<bool> {
        check_vertex(i, self.n)?;
        check_vertex(j, self.n)?;
        let (a, b) = (i.min(j), i.max(j));
        let x = access_recomputed(
            self.data.bits(),
            universes(self.n),
            DEFAULT_TARGET,
            a - 1,
            probes,
        )?;
        Ok(a + x as usize >= b)
    }

    pub fn decode(&self) -> Result<UniversalRep> {
        let e = (1..=self.n)
            .map(|i| self.endpoint(i))
            .collect::<Result<Vec<_>>>()?;
        UniversalRep::new(e)
    }

    /// Magic, `n`, then the data bitstream. The plan is never written.
    pub fn to_bytes(&self) -> Vec<u8> {
        let mut out = CPA_MAGIC.to_vec();
        out.extend((self.n as u64).to_le_bytes());
        out.extend(self.data.to_bytes());
        out
    }

    pub fn from_bytes(bytes: &[u8]) -> Result<Self> {
        let n = read_header(bytes, CPA_MAGIC)?;
        let (data, used) = SpillCode::from_bytes(&bytes[12..], plan_for(n)?)?;
        if 12 + used != bytes.len() {
            return Err(Error::Format(format!(
                "{} trailing bytes",
                bytes.len() - 12 - used
            )));
        }
        let code = Self { n, data };
        for i in 1..=n {
            if code.endpoint(i)? > n {
                return Err(Error::Corrupt(format!("vertex {i} decodes past n")));
            }
        }
        Ok(code)
    }
}
