//! Fixed-alphabet arrays: `N` symbols over `[Σ]` in `N·log₂Σ + O(1)` bits with
//! constant-time access and no stored layout tables.
//!
//! Symbols are packed `k` at a time into group values `x_g ∈ [X]`, `X = Σ^k`,
//! and the groups are threaded through a spill chain like
//! [`crate::chain`]. The difference is that every link parameter here is a
//! closed-form function of the group index: with `Λ` a fixed-point value just
//! above `log₂X` and `L = ⌊log₂X⌋ / 2`,
//!
//! * bits written through group `g` is `P_g = ⌊gΛ⌋ − L`,
//! * the spill after group `g` lives in `[S_g]`, `S_g ≈ 2^(L + frac(gΛ))`,
//! * `m_g` is `M_g = P_g − P_{g−1}` bits and `D_g = ⌊2^{M_g} / S_{g−1}⌋`.
//!
//! The margin `Λ − log₂X = 16·2^{−L} + 2^{−38}` guarantees `D_g·S_g ≥ X` for
//! every link (checked again during encoding). The last group is written
//! together with its incoming spill as one tail number.
//!
//! Groups are capped at `2^48` so that an access touches at most 3 words;
//! alphabets in `(2^24, 2^32)` cannot reach `X ≥ 2^32` under that cap and use
//! groups up to `2^62` instead (at most 4 words). The stored size is at most
//! `N·log₂Σ + 2 + (G−1)·(Λ − log₂X)` bits for `G` groups.

use crate::bits::{bits_for_universe, BitBuf, ProbeSink};
use crate::error::{Error, Result};
use crate::spill::SpillParams;

const ONE_Q64: u128 = 1 << 64;
/// ln 2 in Q64, rounded down.
const LN2_Q64: u128 = 0xb172_17f7_d1cf_79ab;
const GROUP_CAP: u128 = 1 << 48;
const WIDE_GROUP_CAP: u128 = 1 << 62;
/// Smallest group universe the margin argument covers.
const MIN_GROUP: u128 = 1 << 32;

/// Largest `(k, Σ^k)` with `Σ^k ≤ cap`, at least `k = 1`.
fn pack_power(sigma: u128, cap: u128) -> (usize, u128) {
    let (mut k, mut x) = (1usize, sigma);
    while x.checked_mul(sigma).is_some_and(|next| next <= cap) {
        x *= sigma;
        k += 1;
    }
    (k, x)
}

/// `log₂ x` in Q64 fixed point, rounded down. `1 ≤ x ≤ 2^64`.
pub(crate) fn log2_q64(x: u128) -> u128 {
    debug_assert!((1..=ONE_Q64).contains(&x));
    let ip = 127 - x.leading_zeros();
    // mantissa in Q63, in [2^63, 2^64)
    let mut m = if ip <= 63 {
        x << (63 - ip)
    } else {
        x >> (ip - 63)
    };
    let mut frac = 0u128;
    for bit in (0..64).rev() {
        m = (m * m) >> 63;
        if m >= ONE_Q64 {
            m >>= 1;
            frac |= 1 << bit;
        }
    }
    ((ip as u128) << 64) | frac
}

/// `2^(t / 2^64)` in Q64, rounded down.
pub(crate) fn exp2_frac_q64(t: u64) -> u128 {
    let x = (t as u128 * LN2_Q64) >> 64;
    let mut sum = ONE_Q64;
    let mut term = ONE_Q64;
    for k in 1..=24u128 {
        term = ((term * x) >> 64) / k;
        if term == 0 {
            break;
        }
        sum += term;
    }
    sum
}

/// Closed-form layout of a fixed-alphabet code of `len` symbols over `[sigma]`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct FixedLayout {
    sigma: u64,
    len: usize,
    /// Symbols per group.
    k: usize,
    /// `Σ^k`.
    x: u128,
    groups: usize,
    /// Universe of the final (possibly short) group.
    last_x: u128,
    /// Λ in Q64.
    lambda: u128,
    l: u32,
    body_bits: usize,
    tail_bits: u32,
}

impl FixedLayout {
    pub fn new(sigma: u64, len: usize) -> Result<Self> {
        if sigma == 0 {
            return Err(Error::ValueOutOfRange {
                value: 0,
                universe: 0,
            });
        }
        let mut layout = Self {
            sigma,
            len,
            k: 1,
            x: 1,
            groups: 0,
            last_x: 1,
            lambda: 0,
            l: 0,
            body_bits: 0,
            tail_bits: 0,
        };
        if sigma == 1 || len == 0 {
            return Ok(layout);
        }
        let s = sigma as u128;
        let (mut k, mut x) = pack_power(s, GROUP_CAP);
        if x < MIN_GROUP {
            (k, x) = pack_power(s, WIDE_GROUP_CAP);
        }
        let groups = len.div_ceil(k);
        let last_len = len - (groups - 1) * k;
        let lg = log2_q64(x);
        let l = ((lg >> 64) / 2) as u32;
        let margin = (16u128 << 64 >> l) + (1u128 << (64 - 38));
        layout.k = k;
        layout.x = x;
        layout.groups = groups;
        layout.last_x = s.pow(last_len as u32);
        layout.lambda = lg + margin;
        layout.l = l;
        layout.body_bits = layout.prefix_bits(groups - 1);
        layout.tail_bits = bits_for_universe(layout.spill_universe(groups - 1) * layout.last_x);
        Ok(layout)
    }

    pub fn sigma(&self) -> u64 {
        self.sigma
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn symbols_per_group(&self) -> usize {
        self.k
    }

    pub fn n_groups(&self) -> usize {
        self.groups
    }

    pub fn body_bits(&self) -> usize {
        self.body_bits
    }

    pub fn tail_bits(&self) -> u32 {
        self.tail_bits
    }

    /// Total encoded size.
    pub fn size_bits(&self) -> usize {
        self.body_bits + self.tail_bits as usize
    }

    /// Bits written by groups `1..=g` (1-based).
    #[inline]
    fn prefix_bits(&self, g: usize) -> usize {
        if g == 0 {
            0
        } else {
            ((g as u128 * self.lambda) >> 64) as usize - self.l as usize
        }
    }

    /// Universe of the spill leaving group `g` (`S_0 = 1`).
    #[inline]
    fn spill_universe(&self, g: usize) -> u128 {
        if g == 0 {
            return 1;
        }
        let t = (g as u128 * self.lambda) as u64;
        ((exp2_frac_q64(t) << self.l) >> 64) + 2
    }

    /// Link parameters for group `g` in `1..groups`.
    fn link(&self, g: usize) -> Result<SpillParams> {
        let m = (self.prefix_bits(g) - self.prefix_bits(g - 1)) as u32;
        let y = self.spill_universe(g - 1);
        let d = (1u128 << m) / y;
        SpillParams::from_parts(self.x, y, m, d, self.spill_universe(g))
    }

    /// Appends the code for `values` to `out`.
    pub fn encode_into(&self, values: &[u64], out: &mut BitBuf) -> Result<()> {
        if values.len() != self.len {
            return Err(Error::PlanMismatch(format!(
                "{} values for a layout of {}",
                values.len(),
                self.len
            )));
        }
        if let Some(&v) = values.iter().find(|&&v| v >= self.sigma) {
            return Err(Error::ValueOutOfRange {
                value: v as u128,
                universe: self.sigma as u128,
            });
        }
        if self.groups == 0 {
            return Ok(());
        }
        let start = out.len();
        let s = self.sigma as u128;
        let pack = |chunk: &[u64]| chunk.iter().fold(0u128, |acc, &v| acc * s + v as u128);
        let mut spill = 0u128;
        for (idx, chunk) in values.chunks(self.k).enumerate() {
            let g = idx + 1;
            let xg = pack(chunk);
            if g == self.groups {
                out.push(spill * self.last_x + xg, self.tail_bits);
            } else {
                let p = self.link(g)?;
                let (m, s_next) = p.encode(xg, spill)?;
                out.push(m, p.m);
                spill = s_next;
            }
        }
        debug_assert_eq!(out.len() - start, self.size_bits());
        Ok(())
    }

    /// Symbol `i` of a code stored at bit `base` of `bits`.
    #[inline]
    pub fn get_probed<P: ProbeSink>(
        &self,
        bits: &BitBuf,
        base: usize,
        i: usize,
        probes: &mut P,
    ) -> Result<u64> {
        if i >= self.len {
            return Err(Error::IndexOutOfRange {
                index: i,
                len: self.len,
            });
        }
        if self.groups == 0 {
            return Ok(0);
        }
        let g = i / self.k + 1;
        let slot = i % self.k;
        let tail_at = base + self.body_bits;
        let xg = if g == self.groups {
            bits.get_probed(tail_at, self.tail_bits, probes) % self.last_x
        } else {
            let p0 = self.prefix_bits(g - 1);
            let p1 = self.prefix_bits(g);
            let s_prev = self.spill_universe(g - 1);
            let s_here = self.spill_universe(g);
            let mg = (p1 - p0) as u32;
            let m = bits.get_probed(base + p0, mg, probes);
            let a = m % ((1u128 << mg) / s_prev);
            let spill = if g + 1 == self.groups {
                bits.get_probed(tail_at, self.tail_bits, probes) / self.last_x
            } else {
                let mn = (self.prefix_bits(g + 1) - p1) as u32;
                bits.get_probed(base + p1, mn, probes) / ((1u128 << mn) / s_here)
            };
            a * s_here + spill
        };
        let group_len = if g == self.groups {
            self.len - (self.groups - 1) * self.k
        } else {
            self.k
        };
        let below = (self.sigma as u128).pow((group_len - 1 - slot) as u32);
        Ok(((xg / below) % self.sigma as u128) as u64)
    }
}

/// A fixed-alphabet code that owns its bits.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FixedArray {
    layout: FixedLayout,
    bits: BitBuf,
}

impl FixedArray {
    pub fn encode(values: &[u64], sigma: u64) -> Result<Self> {
        let layout = FixedLayout::new(sigma, values.len())?;
        let mut bits = BitBuf::with_capacity(layout.size_bits());
        layout.encode_into(values, &mut bits)?;
        Ok(Self { layout, bits })
    }

    pub fn layout(&self) -> &FixedLayout {
        &self.layout
    }

    pub fn len(&self) -> usize {
        self.layout.len
    }

    pub fn is_empty(&self) -> bool {
        self.layout.len == 0
    }

    pub fn size_bits(&self) -> usize {
        self.bits.len()
    }

    pub fn get(&self, i: usize) -> Result<u64> {
        self.layout.get_probed(&self.bits, 0, i, &mut ())
    }

    pub fn get_probed<P: ProbeSink>(&self, i: usize, probes: &mut P) -> Result<u64> {
        self.layout.get_probed(&self.bits, 0, i, probes)
    }

    /// `n_groups` (u64 LE), body bytes, tail bytes.
    pub fn to_bytes(&self) -> Vec<u8> {
        write_split(&self.bits, 0, &self.layout)
    }

    pub fn from_bytes(bytes: &[u8], sigma: u64, len: usize) -> Result<(Self, usize)> {
        let layout = FixedLayout::new(sigma, len)?;
        let mut bits = BitBuf::with_capacity(layout.size_bits());
        let used = read_split(bytes, &layout, &mut bits)?;
        Ok((Self { layout, bits }, used))
    }
}

/// Serializes the code at `base` as group count, padded body, padded tail.
pub(crate) fn write_split(bits: &BitBuf, base: usize, layout: &FixedLayout) -> Vec<u8> {
    let mut out = (layout.groups as u64).to_le_bytes().to_vec();
    for (start, len) in [
        (base, layout.body_bits),
        (base + layout.body_bits, layout.tail_bits as usize),
    ] {
        let mut part = BitBuf::with_capacity(len);
        let mut pos = 0;
        while pos < len {
            let w = (len - pos).min(128) as u32;
            part.push(bits.get(start + pos, w), w);
            pos += w as usize;
        }
        out.extend(part.to_bytes());
    }
    out
}

/// Parses [`write_split`] output, appending the code bits to `out`.
pub(crate) fn read_split(bytes: &[u8], layout: &FixedLayout, out: &mut BitBuf) -> Result<usize> {
    let body = layout.body_bits;
    let tail = layout.tail_bits as usize;
    let need = 8 + body.div_ceil(8) + tail.div_ceil(8);
    if bytes.len() < need {
        return Err(Error::Format(format!(
            "fixed code needs {need} bytes, found {}",
            bytes.len()
        )));
    }
    let groups = u64::from_le_bytes(bytes[..8].try_into().unwrap()) as usize;
    if groups != layout.groups {
        return Err(Error::Format(format!(
            "group count {groups} does not match layout ({})",
            layout.groups
        )));
    }
    let body_end = 8 + body.div_ceil(8);
    out.append(&BitBuf::from_bytes(&bytes[8..body_end], body)?);
    out.append(&BitBuf::from_bytes(&bytes[body_end..need], tail)?);
    Ok(need)
}
