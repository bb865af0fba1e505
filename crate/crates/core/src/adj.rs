//! Constant-time adjacency in `log₂(n!) + O(√n log n)` bits.
//!
//! Vertices are cut into blocks of `B = ⌈√n⌉`. A vertex `i` in block `k`
//! (1-based) has `e_i ∈ ((k−1)B, n]`, so `e_i − (k−1)B − 1` fits the alphabet
//! `(K − k + 1)·B` with `K = ⌈n/B⌉`; read as a pair it is
//! (right-endpoint block, offset) = `(v / B, v mod B)`. Each block is one
//! [`FixedLayout`] code. A packed table of block start offsets is kept in
//! memory and counted in [`AdjCode::measured_bits`]; it is not serialized
//! because it follows from `n`.

use crate::bits::{bits_for_universe, BitBuf, PackedInts, ProbeSink};
use crate::error::{Error, Result};
use crate::fixed::{read_split, write_split, FixedLayout};
use crate::model::{check_vertex, endpoint_via_adj, UniversalRep};
use crate::spill::ceil_sqrt;

pub const ADJ_MAGIC: &[u8; 4] = b"ADJ1";
/// Below this many vertices the endpoints are stored as a plain array.
pub const ADJ_PLAIN_BELOW: usize = 16;

#[derive(Clone, Debug, PartialEq, Eq)]
enum Body {
    /// `e_i − 1` in `⌈log₂ n⌉` bits each.
    Plain(PackedInts),
    Blocked {
        offsets: PackedInts,
        payload: BitBuf,
    },
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AdjCode {
    n: usize,
    block: usize,
    body: Body,
}

impl AdjCode {
    pub fn build(rep: &UniversalRep) -> Result<Self> {
        let n = rep.n();
        let e = rep.endpoints();
        if n < ADJ_PLAIN_BELOW {
            let vals: Vec<u64> = e.iter().map(|&x| x as u64 - 1).collect();
            let plain = PackedInts::from_values(&vals, bits_for_universe(n as u128));
            return Ok(Self {
                n,
                block: n,
                body: Body::Plain(plain),
            });
        }
        let block = ceil_sqrt(n as u128) as usize;
        let blocks = n.div_ceil(block);
        let mut payload = BitBuf::new();
        let mut starts = Vec::with_capacity(blocks);
        let mut vals = Vec::with_capacity(block);
        for k in 1..=blocks {
            let layout = block_layout(n, block, k)?;
            let lo = (k - 1) * block;
            vals.clear();
            vals.extend(
                e[lo..lo + layout.len()]
                    .iter()
                    .map(|&x| (x - lo - 1) as u64),
            );
            starts.push(payload.len() as u64);
            layout.encode_into(&vals, &mut payload)?;
        }
        let offsets =
            PackedInts::from_values(&starts, bits_for_universe(payload.len() as u128 + 1));
        Ok(Self {
            n,
            block,
            body: Body::Blocked { offsets, payload },
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// Block size `B` (equal to `n` for the plain fallback).
    pub fn block_size(&self) -> usize {
        self.block
    }

    /// All stored bits: block payloads, the offset table and the 64-bit `n`.
    pub fn measured_bits(&self) -> usize {
        64 + match &self.body {
            Body::Plain(p) => p.size_bits(),
            Body::Blocked { offsets, payload } => offsets.size_bits() + payload.len(),
        }
    }

    pub fn endpoint(&self, i: usize) -> Result<usize> {
        self.endpoint_probed(i, &mut ())
    }

    pub fn endpoint_probed<P: ProbeSink>(&self, i: usize, probes: &mut P) -> Result<usize> {
        check_vertex(i, self.n)?;
        match &self.body {
            Body::Plain(p) => Ok(p.get_probed(i - 1, probes) as usize + 1),
            Body::Blocked { offsets, payload } => {
                let k = (i - 1) / self.block + 1;
                let layout = block_layout(self.n, self.block, k)?;
                let base = offsets.get_probed(k - 1, probes) as usize;
                let v = layout.get_probed(payload, base, (i - 1) % self.block, probes)?;
                Ok((k - 1) * self.block + 1 + v as usize)
            }
        }
    }

    pub fn query(&self, i: usize, j: usize) -> Result<bool> {
        self.query_probed(i, j, &mut ())
    }

    /// `adj(i, j)` by decoding one endpoint.
    pub fn query_probed<P: ProbeSink>(&self, i: usize, j: usize, probes: &mut P) -> Result<bool> {
        check_vertex(i, self.n)?;
        check_vertex(j, self.n)?;
        let (a, b) = (i.min(j), i.max(j));
        Ok(self.endpoint_probed(a, probes)? >= b)
    }

    /// Full decode of all endpoints.
    pub fn decode(&self) -> Result<UniversalRep> {
        let e = (1..=self.n)
            .map(|i| self.endpoint(i))
            .collect::<Result<Vec<_>>>()?;
        UniversalRep::new(e)
    }

    /// Rebuilds the representation using adjacency answers only.
    pub fn reconstruct_via_queries(&self) -> Result<UniversalRep> {
        let e = (1..=self.n)
            .map(|i| endpoint_via_adj(|a, b| self.query(a, b), i, self.n))
            .collect::<Result<Vec<_>>>()?;
        UniversalRep::new(e)
    }

    pub fn to_bytes(&self) -> Vec<u8> {
        let mut out = ADJ_MAGIC.to_vec();
        out.extend((self.n as u64).to_le_bytes());
        match &self.body {
            Body::Plain(p) => out.extend(p.bits().to_bytes()),
            Body::Blocked { offsets, payload } => {
                for k in 1..=offsets.len() {
                    let layout =
                        block_layout(self.n, self.block, k).expect("layout valid at build");
                    out.extend(write_split(payload, offsets.get(k - 1) as usize, &layout));
                }
            }
        }
        out
    }

    pub fn from_bytes(bytes: &[u8]) -> Result<Self> {
        let n = read_header(bytes, ADJ_MAGIC)?;
        let rest = &bytes[12..];
        let code = if n < ADJ_PLAIN_BELOW {
            let width = bits_for_universe(n as u128);
            let bits = BitBuf::from_bytes(rest, width as usize * n)?;
            let plain = PackedInts::from_bits(bits, width, n)?;
            Self {
                n,
                block: n,
                body: Body::Plain(plain),
            }
        } else {
            let block = ceil_sqrt(n as u128) as usize;
            let blocks = n.div_ceil(block);
            let mut payload = BitBuf::new();
            let mut starts = Vec::with_capacity(blocks);
            let mut pos = 0;
            for k in 1..=blocks {
                let layout = block_layout(n, block, k)?;
                starts.push(payload.len() as u64);
                pos += read_split(&rest[pos..], &layout, &mut payload)?;
            }
            if pos != rest.len() {
                return Err(Error::Format(format!(
                    "{} trailing bytes",
                    rest.len() - pos
                )));
            }
            let offsets =
                PackedInts::from_values(&starts, bits_for_universe(payload.len() as u128 + 1));
            Self {
                n,
                block,
                body: Body::Blocked { offsets, payload },
            }
        };
        // a code that decodes outside [i, n] is corrupt
        for i in 1..=n {
            let ei = code.endpoint(i)?;
            if ei < i || ei > n {
                return Err(Error::Corrupt(format!(
                    "vertex {i} decodes to endpoint {ei}"
                )));
            }
        }
        Ok(code)
    }
}

/// Layout of block `k` (1-based).
fn block_layout(n: usize, block: usize, k: usize) -> Result<FixedLayout> {
    let blocks = n.div_ceil(block);
    let len = block.min(n - (k - 1) * block);
    FixedLayout::new(((blocks - k + 1) * block) as u64, len)
}

/// Checks `magic` and returns the vertex count from a 12-byte header.
pub(crate) fn read_header(bytes: &[u8], magic: &[u8; 4]) -> Result<usize> {
    if bytes.len() < 12 || &bytes[..4] != magic {
        return Err(Error::Format(format!(
            "missing {} header",
            String::from_utf8_lossy(magic)
        )));
    }
    let n = u64::from_le_bytes(bytes[4..12].try_into().unwrap());
    if n == 0 {
        return Err(Error::ZeroVertices);
    }
    usize::try_from(n).map_err(|_| Error::Format(format!("vertex count {n} too large")))
}
