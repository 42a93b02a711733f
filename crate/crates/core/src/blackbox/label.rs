use core::fmt;

use crate::error::{Error, Result};

/// Widest label the simulator supports; keeps every register space small
/// enough to enumerate exhaustively.
pub const MAX_WIDTH: u8 = 12;

/// A fixed-width bit string naming a (possibly invalid) group element.
///
/// Labels of equal width order lexicographically on their bits, which for a
/// fixed width coincides with numeric order.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Label {
    width: u8,
    bits: u16,
}

impl Label {
    pub fn new(bits: u32, width: u8) -> Result<Self> {
        check_width(width)?;
        if bits >> width != 0 {
            return Err(Error::LabelOutOfRange { value: bits, width });
        }
        Ok(Label {
            width,
            bits: bits as u16,
        })
    }

    /// The all-zero string; the initial value of every ancilla register.
    pub fn zero(width: u8) -> Self {
        debug_assert!((1..=MAX_WIDTH).contains(&width));
        Label { width, bits: 0 }
    }

    pub(crate) fn from_raw(bits: u16, width: u8) -> Self {
        debug_assert!(u32::from(bits) >> width == 0);
        Label { width, bits }
    }

    pub fn bits(self) -> u16 {
        self.bits
    }

    pub fn width(self) -> u8 {
        self.width
    }

    /// Iterates every label of the given width in lexicographic order.
    pub fn all(width: u8) -> impl Iterator<Item = Label> {
        (0u32..(1u32 << width)).map(move |b| Label::from_raw(b as u16, width))
    }
}

pub(crate) fn check_width(width: u8) -> Result<()> {
    if width == 0 || width > MAX_WIDTH {
        return Err(Error::UnsupportedWidth(width));
    }
    Ok(())
}

impl fmt::Display for Label {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for i in (0..self.width).rev() {
            let bit = (self.bits >> i) & 1;
            f.write_str(if bit == 1 { "1" } else { "0" })?;
        }
        Ok(())
    }
}

impl fmt::Debug for Label {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Label({})", self)
    }
}

impl fmt::LowerHex for Label {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::LowerHex::fmt(&self.bits, f)
    }
}
