//! Grouped spill chain over per-position universes.
//!
//! Elements `y_i ∈ [U_i]` are greedily packed into groups whose product
//! universe stays within a target capacity, each group is written as one
//! mixed-radix number (most significant element first), and consecutive group
//! values are threaded through [`SpillParams`]: group `g` is the split
//! coordinate and the spill left over by group `g − 1` is the coordinate kept
//! whole in `m_g`. The memory blocks `m_1 … m_{n'}` are written back to back
//! followed by the final spill in `⌈log₂ S_{n'}⌉` bits.
//!
//! Reading element `i` of group `g` needs `m_g` (for `m_g mod D_g`) and the
//! spill `s_g`, which is `m_{g+1} / D_{g+1}` or the tail.
//!
//! The plan is a function of the universe sequence alone.

use std::iter::{Enumerate, Peekable};

use crate::bits::{bits_for_universe, BitBuf, ProbeSink};
use crate::error::{Error, Result};
use crate::spill::{SpillParams, MAX_UNIVERSE};

/// Default group capacity. Keeps every `m_g` within about 67 bits.
pub const DEFAULT_TARGET: u128 = 1 << 64;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Group {
    /// Index of the first element in the group.
    pub first: usize,
    pub len: usize,
    /// Product of the member universes.
    pub universe: u128,
    /// Link parameters: `X` is this group's universe, `Y` the incoming spill universe.
    pub params: SpillParams,
    /// Bit offset of `m_g` in the body.
    pub offset: usize,
}

/// Walks a universe sequence and produces the groups one at a time.
pub struct GroupWalker<I: Iterator<Item = u128>> {
    it: Peekable<Enumerate<I>>,
    target: u128,
    spill: u128,
    offset: usize,
    failed: bool,
}

impl<I: Iterator<Item = u128>> GroupWalker<I> {
    pub fn new(universes: I, target: u128) -> Result<Self> {
        if !(1..=MAX_UNIVERSE).contains(&target) {
            return Err(Error::Overflow("group target must be in [1, 2^64]"));
        }
        Ok(Self {
            it: universes.enumerate().peekable(),
            target,
            spill: 1,
            offset: 0,
            failed: false,
        })
    }

    /// Universe of the spill left after the groups yielded so far.
    pub fn spill_universe(&self) -> u128 {
        self.spill
    }

    /// Body bits consumed by the groups yielded so far.
    pub fn offset(&self) -> usize {
        self.offset
    }
}

impl<I: Iterator<Item = u128>> Iterator for GroupWalker<I> {
    type Item = Result<Group>;

    fn next(&mut self) -> Option<Self::Item> {
        if self.failed {
            return None;
        }
        let (first, u) = self.it.next()?;
        if u == 0 || u > self.target {
            self.failed = true;
            return Some(Err(Error::UniverseTooLarge {
                universe: u,
                target: self.target,
            }));
        }
        let mut product = u;
        let mut len = 1;
        while let Some(&(_, next)) = self.it.peek() {
            match product.checked_mul(next) {
                Some(p) if next >= 1 && p <= self.target => {
                    product = p;
                    len += 1;
                    self.it.next();
                }
                _ => break,
            }
        }
        let params = match SpillParams::new(product, self.spill) {
            Ok(p) => p,
            Err(e) => {
                self.failed = true;
                return Some(Err(e));
            }
        };
        let group = Group {
            first,
            len,
            universe: product,
            params,
            offset: self.offset,
        };
        self.offset += params.m as usize;
        self.spill = params.s;
        Some(Ok(group))
    }
}

/// Materialized grouping of a universe sequence.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GroupPlan {
    target: u128,
    universes: Vec<u128>,
    groups: Vec<Group>,
    elem_group: Vec<u32>,
    /// Product of the universes after element i inside its group.
    radix_below: Vec<u128>,
    body_bits: usize,
    tail_universe: u128,
}

impl GroupPlan {
    pub fn new(universes: &[u128], target: u128) -> Result<Self> {
        let mut walker = GroupWalker::new(universes.iter().copied(), target)?;
        let groups = walker.by_ref().collect::<Result<Vec<_>>>()?;
        if groups.len() > u32::MAX as usize {
            return Err(Error::Overflow("group count"));
        }
        let mut elem_group = vec![0u32; universes.len()];
        let mut radix_below = vec![1u128; universes.len()];
        for (g, grp) in groups.iter().enumerate() {
            let mut r = 1u128;
            for k in (grp.first..grp.first + grp.len).rev() {
                elem_group[k] = g as u32;
                radix_below[k] = r;
                r *= universes[k];
            }
        }
        Ok(Self {
            target,
            universes: universes.to_vec(),
            groups,
            elem_group,
            radix_below,
            body_bits: walker.offset(),
            tail_universe: walker.spill_universe(),
        })
    }

    pub fn target(&self) -> u128 {
        self.target
    }

    pub fn len(&self) -> usize {
        self.universes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.universes.is_empty()
    }

    pub fn universes(&self) -> &[u128] {
        &self.universes
    }

    pub fn groups(&self) -> &[Group] {
        &self.groups
    }

    pub fn n_groups(&self) -> usize {
        self.groups.len()
    }

    /// Per-group universes `U'_g`.
    pub fn group_universes(&self) -> Vec<u128> {
        self.groups.iter().map(|g| g.universe).collect()
    }

    /// `(group, slot)` of element `i`.
    pub fn locate(&self, i: usize) -> Option<(usize, usize)> {
        let g = *self.elem_group.get(i)? as usize;
        Some((g, i - self.groups[g].first))
    }

    pub fn body_bits(&self) -> usize {
        self.body_bits
    }

    pub fn tail_universe(&self) -> u128 {
        self.tail_universe
    }

    pub fn tail_bits(&self) -> u32 {
        bits_for_universe(self.tail_universe)
    }

    /// Body plus tail.
    pub fn data_bits(&self) -> usize {
        self.body_bits + self.tail_bits() as usize
    }

    /// Deterministic byte image of the materialized tables.
    pub fn to_meta_bytes(&self) -> Vec<u8> {
        let mut out = Vec::new();
        out.extend_from_slice(&self.target.to_le_bytes());
        out.extend_from_slice(&(self.groups.len() as u64).to_le_bytes());
        for g in &self.groups {
            out.extend_from_slice(&(g.first as u64).to_le_bytes());
            out.extend_from_slice(&(g.len as u64).to_le_bytes());
            out.extend_from_slice(&g.universe.to_le_bytes());
            out.extend_from_slice(&g.params.m.to_le_bytes());
            out.extend_from_slice(&g.params.d.to_le_bytes());
            out.extend_from_slice(&g.params.s.to_le_bytes());
            out.extend_from_slice(&(g.offset as u64).to_le_bytes());
        }
        for (&g, &r) in self.elem_group.iter().zip(&self.radix_below) {
            out.extend_from_slice(&g.to_le_bytes());
            out.extend_from_slice(&r.to_le_bytes());
        }
        out
    }

    /// Size of the materialized tables in bits.
    pub fn meta_bits(&self) -> usize {
        self.to_meta_bytes().len() * 8
    }
}

/// A value sequence stored as a grouped spill chain.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SpillCode {
    plan: GroupPlan,
    bits: BitBuf,
}

impl SpillCode {
    pub fn encode(values: &[u128], plan: GroupPlan) -> Result<Self> {
        if values.len() != plan.len() {
            return Err(Error::PlanMismatch(format!(
                "{} values for a plan over {} universes",
                values.len(),
                plan.len()
            )));
        }
        for (&v, &u) in values.iter().zip(&plan.universes) {
            if v >= u {
                return Err(Error::ValueOutOfRange {
                    value: v,
                    universe: u,
                });
            }
        }
        let mut bits = BitBuf::with_capacity(plan.data_bits());
        let mut spill = 0u128;
        for g in &plan.groups {
            let x = values[g.first..g.first + g.len]
                .iter()
                .zip(&plan.universes[g.first..])
                .fold(0u128, |acc, (&v, &u)| acc * u + v);
            let (m, s) = g.params.encode(x, spill)?;
            bits.push(m, g.params.m);
            spill = s;
        }
        bits.push(spill, plan.tail_bits());
        debug_assert_eq!(bits.len(), plan.data_bits());
        Ok(Self { plan, bits })
    }

    pub fn plan(&self) -> &GroupPlan {
        &self.plan
    }

    pub fn bits(&self) -> &BitBuf {
        &self.bits
    }

    pub fn len(&self) -> usize {
        self.plan.len()
    }

    pub fn is_empty(&self) -> bool {
        self.plan.is_empty()
    }

    pub fn data_bits(&self) -> usize {
        self.bits.len()
    }

    pub fn get(&self, i: usize) -> Result<u128> {
        self.get_probed(i, &mut ())
    }

    /// Element `i`; only body/tail reads are reported to `probes`.
    pub fn get_probed<P: ProbeSink>(&self, i: usize, probes: &mut P) -> Result<u128> {
        let (g, _) = self.plan.locate(i).ok_or(Error::IndexOutOfRange {
            index: i,
            len: self.len(),
        })?;
        let x = group_value(
            &self.bits,
            &self.plan.groups[g],
            self.plan.groups.get(g + 1),
            self.plan.body_bits,
            self.plan.tail_bits(),
            probes,
        );
        Ok((x / self.plan.radix_below[i]) % self.plan.universes[i])
    }

    pub fn decode_all(&self) -> Vec<u128> {
        (0..self.len()).map(|i| self.get(i).unwrap()).collect()
    }

    /// `n_groups` (u64 LE), body bytes, tail bytes.
    pub fn to_bytes(&self) -> Vec<u8> {
        let mut out = (self.plan.n_groups() as u64).to_le_bytes().to_vec();
        let body = self.plan.body_bits;
        let mut b = BitBuf::with_capacity(body);
        let mut pos = 0;
        while pos < body {
            let w = (body - pos).min(128) as u32;
            b.push(self.bits.get(pos, w), w);
            pos += w as usize;
        }
        out.extend(b.to_bytes());
        let mut t = BitBuf::new();
        let tb = self.plan.tail_bits();
        t.push(self.bits.get(body, tb), tb);
        out.extend(t.to_bytes());
        out
    }

    /// Parses the layout written by [`to_bytes`](Self::to_bytes) against a
    /// plan rebuilt by the caller. Returns the code and the bytes consumed.
    pub fn from_bytes(bytes: &[u8], plan: GroupPlan) -> Result<(Self, usize)> {
        let body = plan.body_bits;
        let tb = plan.tail_bits() as usize;
        let need = 8 + body.div_ceil(8) + tb.div_ceil(8);
        if bytes.len() < need {
            return Err(Error::Format(format!(
                "spill code needs {need} bytes, found {}",
                bytes.len()
            )));
        }
        let groups = u64::from_le_bytes(bytes[..8].try_into().unwrap()) as usize;
        if groups != plan.n_groups() {
            return Err(Error::Format(format!(
                "group count {groups} does not match plan ({})",
                plan.n_groups()
            )));
        }
        let body_end = 8 + body.div_ceil(8);
        let body_buf = BitBuf::from_bytes(&bytes[8..body_end], body)?;
        let tail_buf = BitBuf::from_bytes(&bytes[body_end..need], tb)?;
        let mut bits = body_buf;
        bits.append(&tail_buf);
        if tb > 0 && bits.get(body, tb as u32) >= plan.tail_universe {
            return Err(Error::Corrupt("tail spill outside its universe".into()));
        }
        Ok((Self { plan, bits }, need))
    }
}

/// Recovers the value of group `g` from `m_g` and the following block (or the tail).
#[inline]
pub(crate) fn group_value<P: ProbeSink>(
    bits: &BitBuf,
    g: &Group,
    next: Option<&Group>,
    body_bits: usize,
    tail_bits: u32,
    probes: &mut P,
) -> u128 {
    let m = bits.get_probed(g.offset, g.params.m, probes);
    let spill = match next {
        Some(n) => bits.get_probed(n.offset, n.params.m, probes) / n.params.d,
        None => bits.get_probed(body_bits, tail_bits, probes),
    };
    g.params.decode_x_unchecked(m, spill)
}

/// Element `i` of a chain whose plan is re-derived from `universes` on the
/// fly instead of read from a materialized table. Costs `O(g)` arithmetic
/// for an element in group `g`; touches the same data words as
/// [`SpillCode::get_probed`].
pub fn access_recomputed<I, P>(
    bits: &BitBuf,
    universes: I,
    target: u128,
    i: usize,
    probes: &mut P,
) -> Result<u128>
where
    I: Iterator<Item = u128> + Clone,
    P: ProbeSink,
{
    let mut walker = GroupWalker::new(universes.clone(), target)?;
    let group = loop {
        match walker.next() {
            Some(g) => {
                let g = g?;
                if i < g.first + g.len {
                    break g;
                }
            }
            None => return Err(Error::IndexOutOfRange { index: i, len: i }),
        }
    };
    let next = walker.next().transpose()?;
    let tail = if next.is_none() {
        bits_for_universe(walker.spill_universe())
    } else {
        0
    };
    let body_bits = group.offset + group.params.m as usize;
    let x = group_value(bits, &group, next.as_ref(), body_bits, tail, probes);
    // digits after i inside the group
    let members: Vec<u128> = universes.skip(group.first).take(group.len).collect();
    let slot = i - group.first;
    let below: u128 = members[slot + 1..].iter().product();
    Ok((x / below) % members[slot])
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bits::WordProbes;
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn log2_sum(u: &[u128]) -> f64 {
        u.iter().map(|&x| (x as f64).log2()).sum()
    }

    #[test]
    fn plan_greedy_example() {
        let u: Vec<u128> = (1..=6).rev().collect();
        let plan = GroupPlan::new(&u, 36).unwrap();
        let bounds: Vec<(usize, usize)> = plan.groups().iter().map(|g| (g.first, g.len)).collect();
        assert_eq!(bounds, vec![(0, 2), (2, 4)]);
        assert_eq!(plan.group_universes(), vec![30, 24]);
    }

    #[test]
    fn plan_edge_cases() {
        let plan = GroupPlan::new(&[1; 10], DEFAULT_TARGET).unwrap();
        assert_eq!(plan.n_groups(), 1);
        assert_eq!(plan.data_bits(), 0);

        let big = 1u128 << 40;
        let plan = GroupPlan::new(&[big; 3], DEFAULT_TARGET).unwrap();
        assert_eq!(plan.n_groups(), 3);

        assert!(matches!(
            GroupPlan::new(&[5, 100], 50),
            Err(Error::UniverseTooLarge {
                universe: 100,
                target: 50
            })
        ));
        assert!(GroupPlan::new(&[5], 0).is_err());
        assert!(GroupPlan::new(&[5], MAX_UNIVERSE + 1).is_err());

        let empty = GroupPlan::new(&[], DEFAULT_TARGET).unwrap();
        let code = SpillCode::encode(&[], empty).unwrap();
        assert_eq!(code.data_bits(), 0);
        assert!(code.get(0).is_err());
    }

    #[test]
    fn plan_is_value_independent_and_deterministic() {
        let u: Vec<u128> = (1..=500u128).rev().collect();
        let a = GroupPlan::new(&u, DEFAULT_TARGET).unwrap();
        let b = GroupPlan::new(&u, DEFAULT_TARGET).unwrap();
        assert_eq!(a.to_meta_bytes(), b.to_meta_bytes());
        let zeros = SpillCode::encode(&vec![0; 500], a.clone()).unwrap();
        let maxes: Vec<u128> = u.iter().map(|x| x - 1).collect();
        let full = SpillCode::encode(&maxes, a).unwrap();
        assert_eq!(zeros.plan(), full.plan());
        assert_eq!(zeros.data_bits(), full.data_bits());
        assert!(zeros.decode_all().iter().all(|&v| v == 0));
        assert_eq!(full.decode_all(), maxes);
    }

    #[test]
    fn encode_rejects_mismatch() {
        let plan = GroupPlan::new(&[3, 4], DEFAULT_TARGET).unwrap();
        assert!(matches!(
            SpillCode::encode(&[0], plan.clone()),
            Err(Error::PlanMismatch(_))
        ));
        assert!(matches!(
            SpillCode::encode(&[3, 0], plan),
            Err(Error::ValueOutOfRange { .. })
        ));
    }

    #[test]
    fn small_universes_roundtrip_trials() {
        let u: Vec<u128> = vec![6, 5, 4, 3, 2, 1];
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for target in [6u128, 36, 720, DEFAULT_TARGET] {
            let plan = GroupPlan::new(&u, target).unwrap();
            for _ in 0..10_000 {
                let v: Vec<u128> = u.iter().map(|&x| rng.random_range(0..x)).collect();
                let code = SpillCode::encode(&v, plan.clone()).unwrap();
                assert_eq!(code.decode_all(), v);
            }
        }
    }

    #[test]
    fn chain_space_on_factorial_universes() {
        for n in [64u128, 256, 1024] {
            let u: Vec<u128> = (1..=n).rev().collect();
            let plan = GroupPlan::new(&u, DEFAULT_TARGET).unwrap();
            let bound = log2_sum(&u).ceil() as usize + 2;
            assert!(
                plan.data_bits() <= bound,
                "n={n}: {} > {bound}",
                plan.data_bits()
            );
        }
    }

    #[test]
    fn chain_space_theorem_plan() {
        for p in 10..=20 {
            let n = 1u128 << p;
            let u: Vec<u128> = (1..=n).rev().collect();
            let plan = GroupPlan::new(&u, DEFAULT_TARGET).unwrap();
            let excess = plan.data_bits() as f64 - log2_sum(&u);
            assert!(excess <= 3.0, "n=2^{p}: excess {excess}");
        }
    }

    #[test]
    fn access_probes_on_large_chain() {
        let n = 1usize << 20;
        let u: Vec<u128> = (1..=n as u128).rev().collect();
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let v: Vec<u128> = u.iter().map(|&x| rng.random_range(0..x)).collect();
        let code = SpillCode::encode(&v, GroupPlan::new(&u, DEFAULT_TARGET).unwrap()).unwrap();
        let mut probes = WordProbes::new();
        for _ in 0..100_000 {
            let i = rng.random_range(0..n);
            probes.reset();
            assert_eq!(code.get_probed(i, &mut probes).unwrap(), v[i]);
            assert!(probes.count() <= 4, "{} probes", probes.count());
        }
    }

    #[test]
    fn recomputed_access_matches() {
        let u: Vec<u128> = (1..=300u128).rev().collect();
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let v: Vec<u128> = u.iter().map(|&x| rng.random_range(0..x)).collect();
        let code = SpillCode::encode(&v, GroupPlan::new(&u, DEFAULT_TARGET).unwrap()).unwrap();
        for (i, &want) in v.iter().enumerate() {
            let mut a = WordProbes::new();
            let mut b = WordProbes::new();
            let got = access_recomputed(code.bits(), u.iter().copied(), DEFAULT_TARGET, i, &mut a)
                .unwrap();
            assert_eq!(got, want);
            code.get_probed(i, &mut b).unwrap();
            assert_eq!(a.count(), b.count());
        }
    }

    #[test]
    fn serialized_layout() {
        let u: Vec<u128> = (1..=50u128).rev().collect();
        let v: Vec<u128> = u.iter().map(|x| x / 2).collect();
        let plan = GroupPlan::new(&u, DEFAULT_TARGET).unwrap();
        let code = SpillCode::encode(&v, plan.clone()).unwrap();
        let bytes = code.to_bytes();
        assert_eq!(
            u64::from_le_bytes(bytes[..8].try_into().unwrap()) as usize,
            plan.n_groups()
        );
        assert_eq!(
            bytes.len(),
            8 + plan.body_bits().div_ceil(8) + (plan.tail_bits() as usize).div_ceil(8)
        );
        let (back, used) = SpillCode::from_bytes(&bytes, plan.clone()).unwrap();
        assert_eq!(used, bytes.len());
        assert_eq!(back, code);
        assert!(SpillCode::from_bytes(&bytes[..bytes.len() - 1], plan).is_err());
    }

    proptest! {
        #[test]
        fn roundtrip_arbitrary_universes(
            spec in prop::collection::vec((1u128..=(1u128 << 40), any::<u64>()), 0..120),
            target_shift in 40u32..=64,
        ) {
            let u: Vec<u128> = spec.iter().map(|(x, _)| *x).collect();
            let v: Vec<u128> = spec.iter().map(|(x, r)| (*r as u128) % x).collect();
            let plan = GroupPlan::new(&u, 1u128 << target_shift).unwrap();
            let code = SpillCode::encode(&v, plan).unwrap();
            prop_assert_eq!(code.decode_all(), v);
        }
    }
}
