use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};

/// Threshold-detector outcome: one bit per mode, `true` = click.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ClickPattern(Vec<bool>);

impl ClickPattern {
    pub fn new(bits: Vec<bool>) -> Self {
        Self(bits)
    }

    pub fn zeros(modes: usize) -> Self {
        Self(vec![false; modes])
    }

    /// Pattern of length `modes` with clicks on `clicked`.
    pub fn from_clicked(modes: usize, clicked: &[usize]) -> Result<Self> {
        let mut bits = vec![false; modes];
        for &c in clicked {
            if c >= modes {
                return Err(Error::InvalidArgument(format!("mode {c} out of range for {modes} modes")));
            }
            bits[c] = true;
        }
        Ok(Self(bits))
    }

    /// Bits of the integer `mask`, mode `i` taken from bit `i`.
    pub fn from_mask(modes: usize, mask: u64) -> Self {
        Self((0..modes).map(|i| mask >> i & 1 == 1).collect())
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn bits(&self) -> &[bool] {
        &self.0
    }

    pub fn clicks(&self) -> usize {
        self.0.iter().filter(|&&b| b).count()
    }

    /// Indices of the clicked modes, ascending.
    pub fn clicked(&self) -> Vec<usize> {
        self.0.iter().enumerate().filter(|(_, &b)| b).map(|(i, _)| i).collect()
    }
}

impl fmt::Display for ClickPattern {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for &b in &self.0 {
            f.write_str(if b { "1" } else { "0" })?;
        }
        Ok(())
    }
}

impl FromStr for ClickPattern {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        s.chars()
            .map(|c| match c {
                '0' => Ok(false),
                '1' => Ok(true),
                other => Err(format!("unexpected character {other:?} in pattern")),
            })
            .collect::<std::result::Result<Vec<_>, _>>()
            .map(Self)
    }
}
