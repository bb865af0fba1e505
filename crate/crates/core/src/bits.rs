//! Packed bit storage with an instrumented read path.
//!
//! Every structure in this crate keeps its payload in [`BitBuf`]s and reads
//! through [`BitBuf::get_probed`], which reports each 64-bit memory word it
//! touches to a [`ProbeSink`]. Passing `&mut ()` disables counting at zero
//! cost; passing a [`WordProbes`] counts distinct words for one query.

use crate::error::{Error, Result};

pub const WORD_BITS: usize = 64;

/// Receives the address of every memory word a read touches.
pub trait ProbeSink {
    fn touch(&mut self, addr: usize);
}

impl ProbeSink for () {
    #[inline(always)]
    fn touch(&mut self, _addr: usize) {}
}

/// Distinct-word counter for a single query.
#[derive(Debug, Default, Clone)]
pub struct WordProbes {
    seen: Vec<usize>,
}

impl WordProbes {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn count(&self) -> usize {
        self.seen.len()
    }

    pub fn reset(&mut self) {
        self.seen.clear();
    }
}

impl ProbeSink for WordProbes {
    #[inline]
    fn touch(&mut self, addr: usize) {
        if !self.seen.contains(&addr) {
            self.seen.push(addr);
        }
    }
}

#[inline]
fn low_mask(width: u32) -> u128 {
    if width >= 128 {
        u128::MAX
    } else {
        (1u128 << width) - 1
    }
}

/// Number of bits needed to write any value in `[0, universe)`.
#[inline]
pub fn bits_for_universe(universe: u128) -> u32 {
    if universe <= 1 {
        0
    } else {
        128 - (universe - 1).leading_zeros()
    }
}

/// Append-only bit vector, little-endian within words.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct BitBuf {
    words: Vec<u64>,
    len: usize,
}

impl BitBuf {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn with_capacity(bits: usize) -> Self {
        Self {
            words: Vec::with_capacity(bits.div_ceil(WORD_BITS)),
            len: 0,
        }
    }

    /// Length in bits.
    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn words(&self) -> &[u64] {
        &self.words
    }

    /// Appends the low `width` bits of `value`.
    pub fn push(&mut self, value: u128, width: u32) {
        debug_assert!(width <= 128);
        debug_assert!(
            width == 128 || value >> width == 0,
            "value wider than field"
        );
        let mut remaining = width;
        let mut value = value & low_mask(width);
        while remaining > 0 {
            let bit = self.len % WORD_BITS;
            if bit == 0 {
                self.words.push(0);
            }
            let take = remaining.min((WORD_BITS - bit) as u32);
            let chunk = (value & low_mask(take)) as u64;
            *self.words.last_mut().unwrap() |= chunk << bit;
            value = if take == 128 { 0 } else { value >> take };
            remaining -= take;
            self.len += take as usize;
        }
    }

    pub fn append(&mut self, other: &BitBuf) {
        let mut pos = 0;
        while pos < other.len {
            let take = (other.len - pos).min(128) as u32;
            self.push(other.get(pos, take), take);
            pos += take as usize;
        }
    }

    #[inline]
    pub fn get(&self, offset: usize, width: u32) -> u128 {
        self.get_probed(offset, width, &mut ())
    }

    /// Reads `width <= 128` bits starting at bit `offset`, reporting each
    /// touched word to `probes`.
    #[inline]
    pub fn get_probed<P: ProbeSink>(&self, offset: usize, width: u32, probes: &mut P) -> u128 {
        debug_assert!(width <= 128);
        debug_assert!(offset + width as usize <= self.len, "read past end");
        let base = self.words.as_ptr() as usize;
        let mut acc = 0u128;
        let mut got = 0u32;
        let mut pos = offset;
        while got < width {
            let w = pos / WORD_BITS;
            let bit = pos % WORD_BITS;
            let take = (width - got).min((WORD_BITS - bit) as u32);
            probes.touch(base + w * 8);
            let chunk = (self.words[w] >> bit) as u128 & low_mask(take);
            acc |= chunk << got;
            got += take;
            pos += take as usize;
        }
        acc
    }

    /// Serializes to bytes, least significant bit first, zero padded.
    pub fn to_bytes(&self) -> Vec<u8> {
        let n = self.len.div_ceil(8);
        self.words
            .iter()
            .flat_map(|w| w.to_le_bytes())
            .take(n)
            .collect()
    }

    /// Inverse of [`to_bytes`](Self::to_bytes). Padding bits must be zero.
    pub fn from_bytes(bytes: &[u8], len: usize) -> Result<Self> {
        if bytes.len() != len.div_ceil(8) {
            return Err(Error::Format(format!(
                "expected {} bytes for {len} bits, found {}",
                len.div_ceil(8),
                bytes.len()
            )));
        }
        let words = bytes
            .chunks(8)
            .map(|c| {
                let mut b = [0u8; 8];
                b[..c.len()].copy_from_slice(c);
                u64::from_le_bytes(b)
            })
            .collect::<Vec<_>>();
        let buf = Self { words, len };
        if !len.is_multiple_of(WORD_BITS) {
            let last = *buf.words.last().unwrap();
            if last >> (len % WORD_BITS) != 0 {
                return Err(Error::Format("nonzero padding bits".into()));
            }
        }
        Ok(buf)
    }
}

/// Fixed-width integer array on top of [`BitBuf`].
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct PackedInts {
    bits: BitBuf,
    width: u32,
    len: usize,
}

impl PackedInts {
    pub fn from_values(values: &[u64], width: u32) -> Self {
        let mut bits = BitBuf::with_capacity(values.len() * width as usize);
        for &v in values {
            bits.push(v as u128, width);
        }
        Self {
            bits,
            width,
            len: values.len(),
        }
    }

    /// Smallest width that holds every value in `values`.
    pub fn fit(values: &[u64]) -> Self {
        let max = values.iter().copied().max().unwrap_or(0);
        Self::from_values(values, bits_for_universe(max as u128 + 1))
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn width(&self) -> u32 {
        self.width
    }

    pub fn size_bits(&self) -> usize {
        self.bits.len()
    }

    #[inline]
    pub fn get(&self, i: usize) -> u64 {
        self.get_probed(i, &mut ())
    }

    #[inline]
    pub fn get_probed<P: ProbeSink>(&self, i: usize, probes: &mut P) -> u64 {
        debug_assert!(i < self.len);
        self.bits
            .get_probed(i * self.width as usize, self.width, probes) as u64
    }

    pub fn bits(&self) -> &BitBuf {
        &self.bits
    }

    pub fn from_bits(bits: BitBuf, width: u32, len: usize) -> Result<Self> {
        if bits.len() != width as usize * len {
            return Err(Error::Format("packed array length mismatch".into()));
        }
        Ok(Self { bits, width, len })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn universe_widths() {
        assert_eq!(bits_for_universe(0), 0);
        assert_eq!(bits_for_universe(1), 0);
        assert_eq!(bits_for_universe(2), 1);
        assert_eq!(bits_for_universe(5), 3);
        assert_eq!(bits_for_universe(256), 8);
        assert_eq!(bits_for_universe(257), 9);
    }

    #[test]
    fn probe_counts_distinct_words() {
        let mut b = BitBuf::new();
        for _ in 0..4 {
            b.push(u64::MAX as u128, 64);
        }
        let mut p = WordProbes::new();
        b.get_probed(60, 10, &mut p);
        assert_eq!(p.count(), 2);
        b.get_probed(64, 64, &mut p);
        assert_eq!(p.count(), 2);
        b.get_probed(100, 128, &mut p);
        assert_eq!(p.count(), 4);
        b.get_probed(0, 0, &mut p);
        assert_eq!(p.count(), 4);
    }

    #[test]
    fn padding_must_be_zero() {
        assert!(BitBuf::from_bytes(&[0b1000_0000], 7).is_err());
        assert!(BitBuf::from_bytes(&[0b0100_0000], 7).is_ok());
    }

    proptest! {
        #[test]
        fn push_get_roundtrip(fields in prop::collection::vec((any::<u128>(), 0u32..=128), 0..40)) {
            let mut b = BitBuf::new();
            let mut expect = Vec::new();
            let mut off = 0;
            for (v, w) in fields {
                let v = v & low_mask(w);
                b.push(v, w);
                expect.push((off, w, v));
                off += w as usize;
            }
            prop_assert_eq!(b.len(), off);
            for (o, w, v) in &expect {
                prop_assert_eq!(b.get(*o, *w), *v);
            }
            let back = BitBuf::from_bytes(&b.to_bytes(), b.len()).unwrap();
            prop_assert_eq!(back, b);
        }
    }
}
