use alloc::vec::Vec;

use num_complex::Complex64;

use crate::error::{Error, Result};

/// Gray-mapped square QAM with unit average symbol energy.
///
/// Symbol index bits are split into an in-phase half (high bits) and a
/// quadrature half (low bits); each half is Gray-coded onto a PAM axis.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Qam {
    order: usize,
    bits_per_axis: u32,
}

impl Qam {
    pub fn new(order: usize) -> Result<Self> {
        let bits = order.trailing_zeros();
        if order < 4 || !order.is_power_of_two() || !bits.is_multiple_of(2) {
            return Err(Error::UnsupportedConstellation(order));
        }
        Ok(Qam {
            order,
            bits_per_axis: bits / 2,
        })
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn bits_per_symbol(&self) -> usize {
        2 * self.bits_per_axis as usize
    }

    fn levels(&self) -> usize {
        1 << self.bits_per_axis
    }

    fn scale(&self) -> f64 {
        // Mean energy of the odd-integer grid is 2(M-1)/3.
        (1.5 / (self.order as f64 - 1.0)).sqrt()
    }

    fn axis_value(&self, gray: usize) -> f64 {
        let pos = gray_decode(gray);
        (2 * pos) as f64 - (self.levels() - 1) as f64
    }

    fn axis_decide(&self, x: f64) -> usize {
        let l = self.levels() as f64;
        let pos = ((x + l - 1.0) / 2.0).round().clamp(0.0, l - 1.0) as usize;
        pos ^ (pos >> 1)
    }

    /// Unit-energy constellation point of symbol `index`.
    pub fn symbol(&self, index: usize) -> Complex64 {
        let i_bits = index >> self.bits_per_axis;
        let q_bits = index & (self.levels() - 1);
        Complex64::new(self.axis_value(i_bits), self.axis_value(q_bits)) * self.scale()
    }

    /// Minimum-distance decision on the unit-energy constellation.
    pub fn decide(&self, z: Complex64) -> usize {
        let s = self.scale();
        (self.axis_decide(z.re / s) << self.bits_per_axis) | self.axis_decide(z.im / s)
    }

    /// Maps a bit stream (MSB first per symbol) to unit-energy symbols.
    pub fn map(&self, bits: &[bool]) -> Result<Vec<Complex64>> {
        let bps = self.bits_per_symbol();
        if !bits.len().is_multiple_of(bps) {
            return Err(Error::DimensionMismatch {
                expected: bits.len().next_multiple_of(bps),
                got: bits.len(),
            });
        }
        Ok(bits
            .chunks(bps)
            .map(|c| self.symbol(c.iter().fold(0, |acc, &b| (acc << 1) | b as usize)))
            .collect())
    }

    /// Hard-decision demapping of unit-energy symbols to bits.
    pub fn demap(&self, symbols: &[Complex64]) -> Vec<bool> {
        let bps = self.bits_per_symbol();
        symbols
            .iter()
            .flat_map(|&z| {
                let idx = self.decide(z);
                (0..bps).rev().map(move |b| (idx >> b) & 1 == 1)
            })
            .collect()
    }
}

fn gray_decode(mut g: usize) -> usize {
    let mut b = g;
    while g > 0 {
        g >>= 1;
        b ^= g;
    }
    b
}
