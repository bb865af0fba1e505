//! The two-coordinate spill map.
//!
//! A pair `(x, y) ∈ [X] × [Y]` is mapped injectively to `(m, s) ∈ [2^M] × [S]`
//! with `m = y·D + ⌊x / S⌋` and `s = x mod S`. `y` comes back from `m` alone
//! (`m / D`) while `x` needs both halves (`(m mod D)·S + s`). With `D ≈ √X`
//! the spill universe `S` is `O(√X)` and the loss
//! `M + log₂S − log₂X − log₂Y` is `O(1/√X)` bits.

use crate::bits::bits_for_universe;
use crate::error::{Error, Result};

/// Largest accepted value for either universe.
pub const MAX_UNIVERSE: u128 = 1 << 64;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct SpillParams {
    /// Universe of the coordinate split across `m` and `s`.
    pub x: u128,
    /// Universe of the coordinate recoverable from `m` alone.
    pub y: u128,
    /// Bit width of `m`.
    pub m: u32,
    /// Multiplier: `m = y·D + a` with `a < D`.
    pub d: u128,
    /// Output spill universe.
    pub s: u128,
}

pub(crate) fn ceil_sqrt(x: u128) -> u128 {
    let r = x.isqrt();
    if r * r < x {
        r + 1
    } else {
        r
    }
}

impl SpillParams {
    /// Parameters for `X = x_universe`, `Y = y_universe`.
    ///
    /// With `M₀ = ⌈log₂(Y·⌈√X⌉)⌉`, the width is picked from `{M₀−1, M₀, M₀+1}`
    /// to minimise `2^M · S`; ties go to the smaller width.
    pub fn new(x_universe: u128, y_universe: u128) -> Result<Self> {
        if x_universe == 0 || y_universe == 0 {
            return Err(Error::ValueOutOfRange {
                value: 0,
                universe: 0,
            });
        }
        if x_universe > MAX_UNIVERSE || y_universe > MAX_UNIVERSE {
            return Err(Error::Overflow("spill universe exceeds 2^64"));
        }
        let root = ceil_sqrt(x_universe);
        let m0 = bits_for_universe(root * y_universe);
        let mut best: Option<Self> = None;
        for m in m0.saturating_sub(1)..=m0 + 1 {
            let d = (1u128 << m) / y_universe;
            if d == 0 {
                continue;
            }
            let cand = Self {
                x: x_universe,
                y: y_universe,
                m,
                d,
                s: x_universe.div_ceil(d),
            };
            // compare 2^m·s exactly; widths differ by at most 2
            let better = match &best {
                None => true,
                Some(b) => {
                    let base = cand.m.min(b.m);
                    (cand.s << (cand.m - base)) < (b.s << (b.m - base))
                }
            };
            if better {
                best = Some(cand);
            }
        }
        Ok(best.expect("M0 always yields D >= 1"))
    }

    /// Explicit parameters; checks `Y·D ≤ 2^M` and `D·S ≥ X`.
    pub fn from_parts(x: u128, y: u128, m: u32, d: u128, s: u128) -> Result<Self> {
        if m > 126 || d == 0 || y.checked_mul(d).is_none_or(|yd| yd > 1u128 << m) {
            return Err(Error::Internal(format!(
                "spill parameters overflow the m field: Y={y} D={d} M={m}"
            )));
        }
        if d.checked_mul(s).is_none_or(|ds| ds < x) {
            return Err(Error::Internal(format!(
                "spill parameters not injective: X={x} D={d} S={s}"
            )));
        }
        Ok(Self { x, y, m, d, s })
    }

    pub fn encode(&self, x: u128, y: u128) -> Result<(u128, u128)> {
        if x >= self.x {
            return Err(Error::ValueOutOfRange {
                value: x,
                universe: self.x,
            });
        }
        if y >= self.y {
            return Err(Error::ValueOutOfRange {
                value: y,
                universe: self.y,
            });
        }
        Ok(self.encode_unchecked(x, y))
    }

    #[inline]
    pub(crate) fn encode_unchecked(&self, x: u128, y: u128) -> (u128, u128) {
        let (a, b) = (x / self.s, x % self.s);
        (y * self.d + a, b)
    }

    pub fn decode_y(&self, m: u128) -> Result<u128> {
        let y = m / self.d;
        if y >= self.y {
            return Err(Error::Corrupt(format!(
                "m={m} decodes to y={y} >= Y={}",
                self.y
            )));
        }
        Ok(y)
    }

    pub fn decode_x(&self, m: u128, s: u128) -> Result<u128> {
        if s >= self.s {
            return Err(Error::Corrupt(format!("spill {s} >= S={}", self.s)));
        }
        let x = self.decode_x_unchecked(m, s);
        if x >= self.x {
            return Err(Error::Corrupt(format!("decoded x={x} >= X={}", self.x)));
        }
        Ok(x)
    }

    #[inline]
    pub(crate) fn decode_x_unchecked(&self, m: u128, s: u128) -> u128 {
        (m % self.d) * self.s + s
    }

    /// `M + log₂S − log₂X − log₂Y`, in bits.
    pub fn redundancy(&self) -> f64 {
        self.m as f64 + (self.s as f64).log2() - (self.x as f64).log2() - (self.y as f64).log2()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn params_example() {
        let p = SpillParams::new(9, 5).unwrap();
        assert_eq!((p.m, p.d, p.s), (4, 3, 3));
        assert!((p.redundancy() - (48.0f64 / 45.0).log2()).abs() < 1e-12);
        assert!((p.redundancy() - 0.093).abs() < 1e-3);
    }

    #[test]
    fn degenerate_spill() {
        for y0 in [1u128, 2, 3, 7, 8, 1000] {
            let p = SpillParams::new(1, y0).unwrap();
            assert_eq!(p.s, 1);
            assert_eq!(p.m, bits_for_universe(y0));
        }
    }

    #[test]
    fn encode_examples() {
        let p = SpillParams::new(9, 5).unwrap();
        assert_eq!(p.encode(7, 4).unwrap(), (14, 1));
        assert_eq!(p.encode(0, 0).unwrap(), (0, 0));
        assert_eq!(p.decode_y(14).unwrap(), 4);
        assert_eq!(p.decode_y(0).unwrap(), 0);
        assert_eq!(p.decode_x(14, 1).unwrap(), 7);
        assert_eq!(p.decode_x(0, 0).unwrap(), 0);
        assert!(p.encode(9, 0).is_err());
        assert!(p.encode(0, 5).is_err());
        assert!(p.decode_y(15).is_err());
        assert!(p.decode_x(2, 3).is_err());
    }

    #[test]
    fn rejects_oversized_universes() {
        assert!(SpillParams::new(MAX_UNIVERSE + 1, 2).is_err());
        assert!(SpillParams::new(2, MAX_UNIVERSE + 1).is_err());
        assert!(SpillParams::new(0, 2).is_err());
        let p = SpillParams::new(MAX_UNIVERSE, MAX_UNIVERSE).unwrap();
        let (m, s) = p.encode(MAX_UNIVERSE - 1, MAX_UNIVERSE - 1).unwrap();
        assert_eq!(p.decode_y(m).unwrap(), MAX_UNIVERSE - 1);
        assert_eq!(p.decode_x(m, s).unwrap(), MAX_UNIVERSE - 1);
    }

    #[test]
    fn exhaustive_injective_roundtrip() {
        for xu in 1..=64u128 {
            for yu in 1..=64u128 {
                let p = SpillParams::new(xu, yu).unwrap();
                let mut seen = std::collections::HashSet::new();
                for x in 0..xu {
                    for y in 0..yu {
                        let (m, s) = p.encode(x, y).unwrap();
                        assert!(m < 1u128 << p.m && s < p.s);
                        assert!(seen.insert((m, s)));
                        assert_eq!(p.decode_y(m).unwrap(), y);
                        assert_eq!(p.decode_x(m, s).unwrap(), x);
                    }
                }
            }
        }
    }

    #[test]
    fn growth_bounds() {
        for xu in 1..=2000u128 {
            for yu in (1..=2000u128).step_by(37) {
                let p = SpillParams::new(xu, yu).unwrap();
                let root = ceil_sqrt(xu);
                assert!(p.d >= 1 && p.d * p.s >= xu && yu * p.d <= 1 << p.m);
                assert!(p.s <= 4 * root, "X={xu} Y={yu} S={}", p.s);
                assert!(1u128 << p.m <= 4 * yu * root);
                if xu >= 4 {
                    let bound = (1.0 + 3.0 / (xu as f64).sqrt()).log2();
                    assert!(p.redundancy() <= bound + 1e-12, "X={xu} Y={yu}");
                }
            }
        }
    }
}
