use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

/// A pair of equal-length Unicode blocks; code points in `from` shift by a
/// constant offset into `to`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct BlockPair {
    from_start: u32,
    from_end: u32,
    to_start: u32,
}

impl BlockPair {
    /// Inclusive ranges. The target range must not touch surrogates or
    /// run past U+10FFFF.
    pub fn new(from_start: u32, from_end: u32, to_start: u32, to_end: u32) -> Result<Self, String> {
        if from_start > from_end || to_start > to_end {
            return Err(format!("empty block range {from_start:04X}-{from_end:04X}"));
        }
        if from_end - from_start != to_end - to_start {
            return Err(format!(
                "blocks differ in length: {from_start:04X}-{from_end:04X} vs {to_start:04X}-{to_end:04X}"
            ));
        }
        for (lo, hi) in [(from_start, from_end), (to_start, to_end)] {
            if hi > 0x10FFFF || (lo <= 0xDFFF && hi >= 0xD800) {
                return Err(format!("block {lo:04X}-{hi:04X} is not all scalar values"));
            }
        }
        Ok(BlockPair {
            from_start,
            from_end,
            to_start,
        })
    }

    pub fn inverse(self) -> Self {
        BlockPair {
            from_start: self.to_start,
            from_end: self.to_start + (self.from_end - self.from_start),
            to_start: self.from_start,
        }
    }

    fn map(&self, c: char) -> Option<char> {
        let cp = c as u32;
        (self.from_start..=self.from_end)
            .contains(&cp)
            .then(|| char::from_u32(cp - self.from_start + self.to_start))
            .flatten()
    }

    pub fn to_range(&self) -> (u32, u32) {
        (self.to_start, self.to_start + (self.from_end - self.from_start))
    }
}

impl fmt::Display for BlockPair {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let (to_start, to_end) = self.to_range();
        write!(
            f,
            "{:04X}-{:04X}:{:04X}-{:04X}",
            self.from_start, self.from_end, to_start, to_end
        )
    }
}

impl FromStr for BlockPair {
    type Err = String;

    /// `0B00-0B7F:0900-097F`
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let range = |r: &str| -> Result<(u32, u32), String> {
            let (lo, hi) = r
                .split_once('-')
                .ok_or_else(|| format!("expected `LO-HI`, got {r:?}"))?;
            let hex = |h: &str| {
                let h = h.trim().trim_start_matches("U+").trim_start_matches("u+");
                u32::from_str_radix(h, 16).map_err(|e| format!("bad code point {h:?}: {e}"))
            };
            Ok((hex(lo)?, hex(hi)?))
        };
        let (from, to) = s
            .split_once(':')
            .ok_or_else(|| format!("expected `FROM:TO`, got {s:?}"))?;
        let (fs, fe) = range(from)?;
        let (ts, te) = range(to)?;
        BlockPair::new(fs, fe, ts, te)
    }
}

impl Serialize for BlockPair {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for BlockPair {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// Shift every code point lying in a source block into its target block.
/// The first matching pair wins; other characters pass through.
pub fn script_pivot(surface: &str, blocks: &[BlockPair]) -> String {
    surface
        .chars()
        .map(|c| blocks.iter().find_map(|b| b.map(c)).unwrap_or(c))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn odia_to_devanagari() -> BlockPair {
        "0B00-0B7F:0900-097F".parse().unwrap()
    }

    #[test]
    fn odia_o_maps_to_devanagari_o() {
        assert_eq!(script_pivot("\u{0B13}", &[odia_to_devanagari()]), "\u{0913}");
    }

    #[test]
    fn ascii_is_untouched() {
        assert_eq!(script_pivot("Chilika", &[odia_to_devanagari()]), "Chilika");
    }

    #[test]
    fn inverse_round_trip() {
        let pair = odia_to_devanagari();
        let odia = "ଚିଲିକା ହ୍ରଦ";
        let hindi = script_pivot(odia, &[pair]);
        assert_eq!(hindi, "चिलिका ह्रद");
        assert_eq!(script_pivot(&hindi, &[pair.inverse()]), odia);
    }

    #[test]
    fn rejects_unequal_or_invalid_blocks() {
        assert!("0B00-0B7F:0900-09FF".parse::<BlockPair>().is_err());
        assert!("0B00-0B7F:D800-D87F".parse::<BlockPair>().is_err());
        assert!("0B7F-0B00:0900-097F".parse::<BlockPair>().is_err());
        assert!("0B00:0900".parse::<BlockPair>().is_err());
    }

    #[test]
    fn display_round_trips() {
        let pair = odia_to_devanagari();
        assert_eq!(pair.to_string(), "0B00-0B7F:0900-097F");
        assert_eq!(pair.to_string().parse::<BlockPair>().unwrap(), pair);
    }

    proptest! {
        // strings holding no code points of the target block
        #[test]
        fn pivot_then_inverse_is_identity(s in "[a-zA-Z \u{0B00}-\u{0B7F}\u{0C00}-\u{0C7F}]{0,24}") {
            let pair = odia_to_devanagari();
            let there = script_pivot(&s, &[pair]);
            prop_assert_eq!(script_pivot(&there, &[pair.inverse()]), s);
        }
    }
}
