//! Constant-time degree in `log₂(n!) + O(n^{2/3} log n)` bits.
//!
//! Blocks have size `B = ⌈n^{1/3}⌉`. For block `k`, `span[k]` counts intervals
//! starting at or before `(k−1)B` and ending after `kB`; those are neighbours of
//! every vertex in the block. The rest of `deg(i)` is stored as
//! `loc_i = deg(i) − span[k]`, which is below `n − (k−1)B + bcount[k]` where
//! `bcount[k]` is the number of right endpoints inside block `k`. Each block is a
//! [`FixedLayout`] code over that alphabet.

use crate::adj::read_header;
use crate::bits::{bits_for_universe, BitBuf, PackedInts, ProbeSink};
use crate::error::{Error, Result};
use crate::fixed::{read_split, write_split, FixedLayout};
use crate::model::{check_vertex, reconstruct_from_degrees, UniversalRep};

pub const DEG_MAGIC: &[u8; 4] = b"DEG1";
/// Below this many vertices the degrees are stored as a plain array.
pub const DEG_PLAIN_BELOW: usize = 64;

pub(crate) fn ceil_cbrt(n: usize) -> usize {
    let mut r = (n as f64).cbrt().round() as usize;
    while r * r * r > n {
        r -= 1;
    }
    while r * r * r < n {
        r += 1;
    }
    r
}

/// Per-block records `(span, bcount, offset)` laid out back to back, so a
/// query reads one contiguous run of at most three words.
#[derive(Clone, Debug, PartialEq, Eq)]
struct BlockTable {
    bits: BitBuf,
    count_width: u32,
    offset_width: u32,
    len: usize,
}

impl BlockTable {
    fn new(
        span: &[u64],
        bcount: &[u64],
        starts: &[u64],
        count_width: u32,
        offset_width: u32,
    ) -> Self {
        let mut bits = BitBuf::new();
        for k in 0..span.len() {
            bits.push(span[k] as u128, count_width);
            bits.push(bcount[k] as u128, count_width);
            bits.push(starts[k] as u128, offset_width);
        }
        Self {
            bits,
            count_width,
            offset_width,
            len: span.len(),
        }
    }

    fn record_width(&self) -> usize {
        2 * self.count_width as usize + self.offset_width as usize
    }

    fn size_bits(&self) -> usize {
        self.bits.len()
    }

    /// `(span, bcount, offset)` of block `k` (0-based).
    #[inline]
    fn get<P: ProbeSink>(&self, k: usize, probes: &mut P) -> (u64, u64, usize) {
        let at = k * self.record_width();
        let cw = self.count_width;
        let span = self.bits.get_probed(at, cw, probes) as u64;
        let bcount = self.bits.get_probed(at + cw as usize, cw, probes) as u64;
        let off = self
            .bits
            .get_probed(at + 2 * cw as usize, self.offset_width, probes) as usize;
        (span, bcount, off)
    }

    fn column(&self, field: usize) -> Vec<u64> {
        (0..self.len)
            .map(|k| {
                let (s, b, o) = self.get(k, &mut ());
                [s, b, o as u64][field]
            })
            .collect()
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
enum Body {
    Plain(PackedInts),
    Blocked { table: BlockTable, payload: BitBuf },
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DegCode {
    n: usize,
    block: usize,
    body: Body,
}

impl DegCode {
    pub fn build(rep: &UniversalRep) -> Result<Self> {
        let n = rep.n();
        let deg = rep.degrees();
        let width = bits_for_universe(n as u128 + 1);
        if n < DEG_PLAIN_BELOW {
            let vals: Vec<u64> = deg.iter().map(|&d| d as u64).collect();
            return Ok(Self {
                n,
                block: n,
                body: Body::Plain(PackedInts::from_values(&vals, width)),
            });
        }
        let block = ceil_cbrt(n);
        let blocks = n.div_ceil(block);
        let e = rep.endpoints();

        let mut bcount = vec![0u64; blocks];
        for &ej in e {
            bcount[(ej - 1) / block] += 1;
        }
        // span[k] via a difference array over blocks strictly between the
        // start block and the end block of each interval
        let mut diff = vec![0i64; blocks + 1];
        for (idx, &ej) in e.iter().enumerate() {
            let first = idx / block + 1; // first block starting after j
            let last = (ej - 1) / block; // blocks ending before e_j
            if first < last {
                diff[first] += 1;
                diff[last] -= 1;
            }
        }
        let mut span = Vec::with_capacity(blocks);
        let mut run = 0i64;
        for d in &diff[..blocks] {
            run += d;
            span.push(run as u64);
        }

        let mut payload = BitBuf::new();
        let mut starts = Vec::with_capacity(blocks);
        let mut loc = Vec::with_capacity(block);
        for k in 1..=blocks {
            let layout = block_layout(n, block, k, bcount[k - 1])?;
            let lo = (k - 1) * block;
            loc.clear();
            for (off, &d) in deg[lo..lo + layout.len()].iter().enumerate() {
                let l = d as u64 - span[k - 1];
                if l >= layout.sigma() {
                    return Err(Error::Internal(format!(
                        "local degree {l} of vertex {} exceeds block alphabet {}",
                        lo + off + 1,
                        layout.sigma()
                    )));
                }
                loc.push(l);
            }
            starts.push(payload.len() as u64);
            layout.encode_into(&loc, &mut payload)?;
        }
        let table = BlockTable::new(
            &span,
            &bcount,
            &starts,
            width,
            bits_for_universe(payload.len() as u128 + 1),
        );
        Ok(Self {
            n,
            block,
            body: Body::Blocked { table, payload },
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// Block size `B` (equal to `n` for the plain fallback).
    pub fn block_size(&self) -> usize {
        self.block
    }

    /// All stored bits: payloads, the span/bcount/offset table and the
    /// 64-bit `n`.
    pub fn measured_bits(&self) -> usize {
        64 + match &self.body {
            Body::Plain(p) => p.size_bits(),
            Body::Blocked { table, payload } => table.size_bits() + payload.len(),
        }
    }

    /// Bits outside the per-block codes.
    pub fn aux_bits(&self) -> usize {
        match &self.body {
            Body::Plain(_) => 64,
            Body::Blocked { payload, .. } => self.measured_bits() - payload.len(),
        }
    }

    pub fn query(&self, i: usize) -> Result<usize> {
        self.query_probed(i, &mut ())
    }

    pub fn query_probed<P: ProbeSink>(&self, i: usize, probes: &mut P) -> Result<usize> {
        check_vertex(i, self.n)?;
        match &self.body {
            Body::Plain(p) => Ok(p.get_probed(i - 1, probes) as usize),
            Body::Blocked { table, payload } => {
                let k = (i - 1) / self.block + 1;
                let (span, b, base) = table.get(k - 1, probes);
                let layout = block_layout(self.n, self.block, k, b)?;
                let loc = layout.get_probed(payload, base, (i - 1) % self.block, probes)?;
                Ok((span + loc) as usize)
            }
        }
    }

    /// Decodes the representation from the `n` degree answers.
    pub fn reconstruct(&self) -> Result<UniversalRep> {
        reconstruct_from_degrees(|i| self.query(i), self.n)
    }

    pub fn to_bytes(&self) -> Vec<u8> {
        let mut out = DEG_MAGIC.to_vec();
        out.extend((self.n as u64).to_le_bytes());
        match &self.body {
            Body::Plain(p) => out.extend(p.bits().to_bytes()),
            Body::Blocked { table, payload } => {
                let width = table.count_width;
                let bcount = table.column(1);
                out.extend(
                    PackedInts::from_values(&table.column(0), width)
                        .bits()
                        .to_bytes(),
                );
                out.extend(PackedInts::from_values(&bcount, width).bits().to_bytes());
                for (k, start) in table.column(2).into_iter().enumerate() {
                    let layout = block_layout(self.n, self.block, k + 1, bcount[k])
                        .expect("layout valid at build");
                    out.extend(write_split(payload, start as usize, &layout));
                }
            }
        }
        out
    }

    pub fn from_bytes(bytes: &[u8]) -> Result<Self> {
        let n = read_header(bytes, DEG_MAGIC)?;
        let rest = &bytes[12..];
        let width = bits_for_universe(n as u128 + 1);
        let packed = |slice: &[u8], len: usize| -> Result<PackedInts> {
            let bits = BitBuf::from_bytes(slice, width as usize * len)?;
            PackedInts::from_bits(bits, width, len)
        };
        let code = if n < DEG_PLAIN_BELOW {
            Self {
                n,
                block: n,
                body: Body::Plain(packed(rest, n)?),
            }
        } else {
            let block = ceil_cbrt(n);
            let blocks = n.div_ceil(block);
            let arr = (width as usize * blocks).div_ceil(8);
            if rest.len() < 2 * arr {
                return Err(Error::Format("truncated span/bcount arrays".into()));
            }
            let values = |p: PackedInts| (0..blocks).map(|k| p.get(k)).collect::<Vec<_>>();
            let span = values(packed(&rest[..arr], blocks)?);
            let bcount = values(packed(&rest[arr..2 * arr], blocks)?);
            if bcount.iter().sum::<u64>() != n as u64 {
                return Err(Error::Corrupt(
                    "block endpoint counts do not sum to n".into(),
                ));
            }
            let mut payload = BitBuf::new();
            let mut starts = Vec::with_capacity(blocks);
            let mut pos = 2 * arr;
            for k in 1..=blocks {
                let layout = block_layout(n, block, k, bcount[k - 1])?;
                starts.push(payload.len() as u64);
                pos += read_split(&rest[pos..], &layout, &mut payload)?;
            }
            if pos != rest.len() {
                return Err(Error::Format(format!(
                    "{} trailing bytes",
                    rest.len() - pos
                )));
            }
            let table = BlockTable::new(
                &span,
                &bcount,
                &starts,
                width,
                bits_for_universe(payload.len() as u128 + 1),
            );
            Self {
                n,
                block,
                body: Body::Blocked { table, payload },
            }
        };
        Ok(code)
    }
}

/// Layout of block `k` (1-based) whose block holds `b` right endpoints.
fn block_layout(n: usize, block: usize, k: usize, b: u64) -> Result<FixedLayout> {
    let lo = (k - 1) * block;
    let len = block.min(n - lo);
    FixedLayout::new((n - lo) as u64 + b, len)
}
