use std::io::{Read, Write};

use crate::error::{Error, Result};

pub const DEFAULT_UV_SIZE: usize = 128;
pub const DEFAULT_CHANNELS: usize = 8;

const MAGIC: &[u8; 4] = b"UVLT";

/// A `height x width x channels` grid of finite features in UV layout.
///
/// Storage is row-major with channels innermost.
#[derive(Clone, PartialEq)]
pub struct UvLatent {
    height: usize,
    width: usize,
    channels: usize,
    data: Vec<f32>,
}

impl std::fmt::Debug for UvLatent {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("UvLatent")
            .field("height", &self.height)
            .field("width", &self.width)
            .field("channels", &self.channels)
            .finish_non_exhaustive()
    }
}

impl UvLatent {
    pub fn zeros(height: usize, width: usize, channels: usize) -> Self {
        Self {
            height,
            width,
            channels,
            data: vec![0.0; height * width * channels],
        }
    }

    /// Zero latent at the default corpus resolution.
    pub fn standard_zeros() -> Self {
        Self::zeros(DEFAULT_UV_SIZE, DEFAULT_UV_SIZE, DEFAULT_CHANNELS)
    }

    pub fn from_vec(height: usize, width: usize, channels: usize, data: Vec<f32>) -> Result<Self> {
        if height == 0 || width == 0 || channels == 0 {
            return Err(Error::invalid("latent dimensions must be nonzero"));
        }
        if data.len() != height * width * channels {
            return Err(Error::invalid(format!(
                "latent data has {} values, expected {}",
                data.len(),
                height * width * channels
            )));
        }
        if let Some(i) = data.iter().position(|v| !v.is_finite()) {
            return Err(Error::invalid(format!("non-finite latent value at index {i}")));
        }
        Ok(Self {
            height,
            width,
            channels,
            data,
        })
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn channels(&self) -> usize {
        self.channels
    }

    pub fn dims(&self) -> (usize, usize, usize) {
        (self.height, self.width, self.channels)
    }

    pub fn same_dims(&self, other: &UvLatent) -> bool {
        self.dims() == other.dims()
    }

    #[inline]
    pub fn texel(&self, row: usize, col: usize) -> &[f32] {
        let start = (row * self.width + col) * self.channels;
        &self.data[start..start + self.channels]
    }

    /// Writes must stay finite; callers own that invariant.
    #[inline]
    pub fn texel_mut(&mut self, row: usize, col: usize) -> &mut [f32] {
        let start = (row * self.width + col) * self.channels;
        &mut self.data[start..start + self.channels]
    }

    pub fn as_slice(&self) -> &[f32] {
        &self.data
    }

    pub fn write_to<W: Write>(&self, mut w: W) -> Result<()> {
        w.write_all(MAGIC)?;
        for d in [self.height, self.width, self.channels] {
            w.write_all(&(d as u32).to_le_bytes())?;
        }
        let mut buf = Vec::with_capacity(self.data.len() * 4);
        for v in &self.data {
            buf.extend_from_slice(&v.to_le_bytes());
        }
        w.write_all(&buf)?;
        Ok(())
    }

    pub fn read_from<R: Read>(mut r: R) -> Result<Self> {
        let mut header = [0u8; 16];
        r.read_exact(&mut header)
            .map_err(|e| Error::CorruptCorpus(format!("latent header: {e}")))?;
        if &header[..4] != MAGIC {
            return Err(Error::CorruptCorpus("bad latent magic".into()));
        }
        let dim = |i: usize| u32::from_le_bytes(header[4 + 4 * i..8 + 4 * i].try_into().unwrap()) as usize;
        let (h, w, c) = (dim(0), dim(1), dim(2));
        let n = h
            .checked_mul(w)
            .and_then(|x| x.checked_mul(c))
            .filter(|&n| n > 0 && n <= 1 << 28)
            .ok_or_else(|| Error::CorruptCorpus(format!("implausible latent dims {h}x{w}x{c}")))?;
        let mut bytes = vec![0u8; n * 4];
        r.read_exact(&mut bytes)
            .map_err(|e| Error::CorruptCorpus(format!("latent body: {e}")))?;
        let data = bytes
            .chunks_exact(4)
            .map(|b| f32::from_le_bytes(b.try_into().unwrap()))
            .collect();
        Self::from_vec(h, w, c, data).map_err(|e| Error::CorruptCorpus(e.to_string()))
    }

    pub fn to_bytes(&self) -> Vec<u8> {
        let mut out = Vec::with_capacity(16 + self.data.len() * 4);
        self.write_to(&mut out).expect("writing to a Vec cannot fail");
        out
    }

    pub fn from_bytes(bytes: &[u8]) -> Result<Self> {
        let latent = Self::read_from(bytes)?;
        let expected = 16 + latent.data.len() * 4;
        if bytes.len() != expected {
            return Err(Error::CorruptCorpus(format!(
                "latent file has {} trailing bytes",
                bytes.len() - expected
            )));
        }
        Ok(latent)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn rejects_non_finite_values() {
        let err = UvLatent::from_vec(1, 1, 2, vec![0.0, f32::NAN]).unwrap_err();
        assert_eq!(err.code(), "invalid-argument");
    }

    #[test]
    fn header_layout_is_little_endian() {
        let z = UvLatent::zeros(2, 3, 4);
        let b = z.to_bytes();
        assert_eq!(&b[..4], b"UVLT");
        assert_eq!(&b[4..8], &2u32.to_le_bytes());
        assert_eq!(&b[8..12], &3u32.to_le_bytes());
        assert_eq!(&b[12..16], &4u32.to_le_bytes());
        assert_eq!(b.len(), 16 + 2 * 3 * 4 * 4);
    }

    #[test]
    fn truncated_file_is_corrupt() {
        let b = UvLatent::zeros(4, 4, 2).to_bytes();
        let err = UvLatent::from_bytes(&b[..b.len() - 3]).unwrap_err();
        assert_eq!(err.code(), "corrupt-corpus");
    }

    proptest! {
        #[test]
        fn file_round_trip_is_bit_exact(h in 1usize..6, w in 1usize..6, c in 1usize..4, seed in any::<u64>()) {
            let mut x = seed;
            let data: Vec<f32> = (0..h * w * c).map(|_| {
                x = x.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
                ((x >> 40) as f32 / (1u64 << 24) as f32) * 8.0 - 4.0
            }).collect();
            let z = UvLatent::from_vec(h, w, c, data).unwrap();
            let back = UvLatent::from_bytes(&z.to_bytes()).unwrap();
            prop_assert_eq!(back.as_slice().iter().map(|v| v.to_bits()).collect::<Vec<_>>(),
                            z.as_slice().iter().map(|v| v.to_bits()).collect::<Vec<_>>());
            prop_assert_eq!(back.dims(), z.dims());
        }
    }
}
