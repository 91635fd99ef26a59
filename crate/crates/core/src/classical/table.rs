use std::fmt;
use std::str::FromStr;

use super::SchemeError;

const FILE_MAGIC: &str = "bitprobe-table v1";

/// The stored bit string `x(S)`.
///
/// Bit 0 is the leftmost character of the textual rendering; the file format
/// packs bit `j` into byte `j / 8` at position `j % 8` (least significant first).
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct BitTable {
    len: usize,
    words: Vec<u64>,
}

impl BitTable {
    pub fn zeros(len: usize) -> Self {
        Self { len, words: vec![0; len.div_ceil(64)] }
    }

    pub fn from_bits(bits: &[bool]) -> Self {
        let mut table = Self::zeros(bits.len());
        for (j, &bit) in bits.iter().enumerate() {
            table.set(j, bit);
        }
        table
    }

    /// Table of length `len <= 64` whose bit `j` is bit `j` of `mask`.
    pub fn from_mask(mask: u64, len: usize) -> Self {
        assert!(len <= 64, "mask tables hold at most 64 bits");
        let mut table = Self::zeros(len);
        if len > 0 {
            let keep = if len == 64 { u64::MAX } else { (1u64 << len) - 1 };
            table.words[0] = mask & keep;
        }
        table
    }

    /// Inverse of [`BitTable::from_mask`]; `None` when longer than 64 bits.
    pub fn to_mask(&self) -> Option<u64> {
        match self.len {
            0 => Some(0),
            1..=64 => Some(self.words[0]),
            _ => None,
        }
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    #[inline]
    pub fn get(&self, j: usize) -> bool {
        assert!(j < self.len, "bit {j} out of range for table of {} bits", self.len);
        self.words[j / 64] >> (j % 64) & 1 == 1
    }

    #[inline]
    pub fn set(&mut self, j: usize, value: bool) {
        assert!(j < self.len, "bit {j} out of range for table of {} bits", self.len);
        if value {
            self.words[j / 64] |= 1 << (j % 64);
        } else {
            self.words[j / 64] &= !(1 << (j % 64));
        }
    }

    pub fn count_ones(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn iter(&self) -> impl Iterator<Item = bool> + '_ {
        (0..self.len).map(|j| self.get(j))
    }

    /// Writes `value` into `width` consecutive bits starting at `offset`, most significant first.
    pub fn write_uint(&mut self, offset: usize, width: usize, value: u64) {
        for i in 0..width {
            let bit = value >> (width - 1 - i) & 1 == 1;
            self.set(offset + i, bit);
        }
    }

    pub fn to_bit_string(&self) -> String {
        self.iter().map(|b| if b { '1' } else { '0' }).collect()
    }

    pub fn parse_bit_string(text: &str) -> Result<Self, SchemeError> {
        let bits = text
            .trim()
            .chars()
            .map(|c| match c {
                '0' => Ok(false),
                '1' => Ok(true),
                other => Err(SchemeError::Format(format!("unexpected character {other:?}"))),
            })
            .collect::<Result<Vec<_>, _>>()?;
        Ok(Self::from_bits(&bits))
    }

    fn packed_bytes(&self) -> Vec<u8> {
        let mut bytes = vec![0u8; self.len.div_ceil(8)];
        for j in 0..self.len {
            if self.get(j) {
                bytes[j / 8] |= 1 << (j % 8);
            }
        }
        bytes
    }

    /// The table file: header line `bitprobe-table v1 s=<len>`, then lowercase hex.
    pub fn to_file_string(&self) -> String {
        let hex: String = self.packed_bytes().iter().map(|b| format!("{b:02x}")).collect();
        format!("{FILE_MAGIC} s={}\n{hex}\n", self.len)
    }

    pub fn from_file_str(text: &str) -> Result<Self, SchemeError> {
        let mut lines = text.lines();
        let header = lines.next().ok_or_else(|| SchemeError::Format("empty table file".into()))?;
        let len: usize = header
            .strip_prefix(FILE_MAGIC)
            .and_then(|rest| rest.strip_prefix(" s="))
            .ok_or_else(|| SchemeError::Format(format!("bad table header {header:?}")))?
            .parse()
            .map_err(|e| SchemeError::Format(format!("bad table length: {e}")))?;
        let hex = lines.next().unwrap_or("").trim();
        if lines.any(|l| !l.trim().is_empty()) {
            return Err(SchemeError::Format("trailing content after table payload".into()));
        }
        let byte_count = len.div_ceil(8);
        if hex.len() != 2 * byte_count {
            return Err(SchemeError::Format(format!(
                "expected {} hex digits for s={len}, found {}",
                2 * byte_count,
                hex.len()
            )));
        }
        let mut table = Self::zeros(len);
        for i in 0..byte_count {
            let byte = u8::from_str_radix(&hex[2 * i..2 * i + 2], 16)
                .map_err(|e| SchemeError::Format(format!("bad hex byte: {e}")))?;
            for bit in 0..8 {
                if byte >> bit & 1 == 1 {
                    let j = 8 * i + bit;
                    if j >= len {
                        return Err(SchemeError::Format("non-zero padding bits".into()));
                    }
                    table.set(j, true);
                }
            }
        }
        Ok(table)
    }
}

impl fmt::Display for BitTable {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_bit_string())
    }
}

impl fmt::Debug for BitTable {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "BitTable({})", self.to_bit_string())
    }
}

impl FromStr for BitTable {
    type Err = SchemeError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Self::parse_bit_string(s)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn rendering_and_file_format() {
        let t: BitTable = "0010".parse().unwrap();
        assert!(t.get(2) && !t.get(0));
        assert_eq!(t.to_string(), "0010");
        assert_eq!(t.to_file_string(), "bitprobe-table v1 s=4\n04\n");
        let long: BitTable = "1000000001".parse().unwrap();
        assert_eq!(long.to_file_string(), "bitprobe-table v1 s=10\n0102\n");
    }

    #[test]
    fn strict_reader() {
        assert!(BitTable::from_file_str("bitprobe-table v2 s=4\n04\n").is_err());
        assert!(BitTable::from_file_str("bitprobe-table v1 s=4\n0400\n").is_err());
        // bit 4 is padding for s=4
        assert!(BitTable::from_file_str("bitprobe-table v1 s=4\n10\n").is_err());
        assert!(BitTable::from_file_str("bitprobe-table v1 s=4\nzz\n").is_err());
        assert!(BitTable::from_file_str("bitprobe-table v1 s=4\n04\nextra\n").is_err());
        assert!("01x".parse::<BitTable>().is_err());
    }

    #[test]
    fn masks() {
        let t = BitTable::from_mask(0b0110, 4);
        assert_eq!(t.to_string(), "0110");
        assert_eq!(t.to_mask(), Some(0b0110));
        assert_eq!(BitTable::zeros(65).to_mask(), None);
        let mut w = BitTable::zeros(8);
        w.write_uint(2, 4, 0b1011);
        assert_eq!(w.to_string(), "00101100");
    }

    proptest! {
        #[test]
        fn file_round_trip(bits in proptest::collection::vec(any::<bool>(), 0..300)) {
            let t = BitTable::from_bits(&bits);
            let back = BitTable::from_file_str(&t.to_file_string()).unwrap();
            prop_assert_eq!(&back, &t);
            prop_assert_eq!(back.to_bit_string().parse::<BitTable>().unwrap(), t);
        }
    }
}
