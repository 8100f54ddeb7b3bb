//! Little-endian binary containers for volumes (`LPSV`) and masks (`LPSM`).
//!
//! Layout: 4-byte magic, `u32` version (1), `u32` nx, ny, nz, then payload.
//! Volumes carry `nx·ny·nz` interleaved `(f64 re, f64 im)` pairs walking the
//! `(nx·ny) × nz` Casorati matrix in column-major order. Masks carry `nx·ny`
//! bytes of 0/1 in column-major order over the `nx × ny` grid, with nz = 1.

use std::fs;
use std::path::Path;

use ndarray::{Array2, ShapeBuilder};
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::operators::mask::SamplingMask;
use crate::volume::{Dims, DynamicVolume};

pub const VOLUME_MAGIC: &[u8; 4] = b"LPSV";
pub const MASK_MAGIC: &[u8; 4] = b"LPSM";
pub const FORMAT_VERSION: u32 = 1;
const HEADER_LEN: usize = 20;

fn write_header(buf: &mut Vec<u8>, magic: &[u8; 4], nx: usize, ny: usize, nz: usize) -> Result<()> {
    buf.extend_from_slice(magic);
    buf.extend_from_slice(&FORMAT_VERSION.to_le_bytes());
    for d in [nx, ny, nz] {
        let d = u32::try_from(d).map_err(|_| Error::Invalid(format!("dimension {d} exceeds u32")))?;
        buf.extend_from_slice(&d.to_le_bytes());
    }
    Ok(())
}

fn read_u32(bytes: &[u8], at: usize) -> u32 {
    u32::from_le_bytes(bytes[at..at + 4].try_into().unwrap())
}

type Header<'a> = ((usize, usize, usize), &'a [u8]);

/// Validates magic and version, returns `(nx, ny, nz)` and the payload.
fn read_header<'a>(bytes: &'a [u8], magic: &[u8; 4]) -> Result<Header<'a>> {
    if bytes.len() < HEADER_LEN {
        return Err(Error::Format(format!(
            "file is {} bytes, shorter than the {HEADER_LEN}-byte header",
            bytes.len()
        )));
    }
    if &bytes[..4] != magic {
        return Err(Error::Format(format!(
            "bad magic {:?}, expected {:?}",
            String::from_utf8_lossy(&bytes[..4]),
            String::from_utf8_lossy(magic)
        )));
    }
    let version = read_u32(bytes, 4);
    if version != FORMAT_VERSION {
        return Err(Error::Format(format!("unsupported version {version}")));
    }
    let dims = (
        read_u32(bytes, 8) as usize,
        read_u32(bytes, 12) as usize,
        read_u32(bytes, 16) as usize,
    );
    if dims.0 == 0 || dims.1 == 0 || dims.2 == 0 {
        return Err(Error::Dimension(format!(
            "zero dimension in header: {}x{}x{}",
            dims.0, dims.1, dims.2
        )));
    }
    Ok((dims, &bytes[HEADER_LEN..]))
}

fn check_payload(payload: &[u8], expected: usize) -> Result<()> {
    match payload.len().cmp(&expected) {
        std::cmp::Ordering::Less => Err(Error::Truncated {
            expected,
            found: payload.len(),
        }),
        std::cmp::Ordering::Greater => Err(Error::Dimension(format!(
            "payload has {} bytes but header dimensions imply {expected}",
            payload.len()
        ))),
        std::cmp::Ordering::Equal => Ok(()),
    }
}

pub fn encode_volume(v: &DynamicVolume) -> Result<Vec<u8>> {
    let d = v.dims();
    let mut buf = Vec::with_capacity(HEADER_LEN + 16 * d.len());
    write_header(&mut buf, VOLUME_MAGIC, d.nx, d.ny, d.nz)?;
    // `t()` iterates a row-major view of the transpose, i.e. column-major here.
    for z in v.data().t().iter() {
        buf.extend_from_slice(&z.re.to_le_bytes());
        buf.extend_from_slice(&z.im.to_le_bytes());
    }
    Ok(buf)
}

pub fn decode_volume(bytes: &[u8]) -> Result<DynamicVolume> {
    let ((nx, ny, nz), payload) = read_header(bytes, VOLUME_MAGIC)?;
    let dims = Dims::new(nx, ny, nz)?;
    check_payload(payload, 16 * dims.len())?;
    let values: Vec<Complex64> = payload
        .chunks_exact(16)
        .map(|c| {
            Complex64::new(
                f64::from_le_bytes(c[..8].try_into().unwrap()),
                f64::from_le_bytes(c[8..].try_into().unwrap()),
            )
        })
        .collect();
    let data = Array2::from_shape_vec(dims.casorati_shape().f(), values)
        .map_err(|e| Error::Dimension(e.to_string()))?;
    DynamicVolume::new(data, dims)
}

pub fn save_volume(path: impl AsRef<Path>, v: &DynamicVolume) -> Result<()> {
    fs::write(path, encode_volume(v)?)?;
    Ok(())
}

pub fn load_volume(path: impl AsRef<Path>) -> Result<DynamicVolume> {
    decode_volume(&fs::read(path)?)
}

pub fn encode_mask(mask: &SamplingMask) -> Result<Vec<u8>> {
    let p = mask.pattern();
    let (nx, ny) = p.dim();
    let mut buf = Vec::with_capacity(HEADER_LEN + nx * ny);
    write_header(&mut buf, MASK_MAGIC, nx, ny, 1)?;
    buf.extend(p.t().iter().map(|&b| b as u8));
    Ok(buf)
}

pub fn decode_mask(bytes: &[u8]) -> Result<SamplingMask> {
    let ((nx, ny, nz), payload) = read_header(bytes, MASK_MAGIC)?;
    if nz != 1 {
        return Err(Error::Dimension(format!("mask header has nz = {nz}, expected 1")));
    }
    check_payload(payload, nx * ny)?;
    let bits = payload
        .iter()
        .map(|&b| match b {
            0 => Ok(false),
            1 => Ok(true),
            other => Err(Error::Format(format!("mask byte {other} is not 0 or 1"))),
        })
        .collect::<Result<Vec<_>>>()?;
    let pattern = Array2::from_shape_vec((nx, ny).f(), bits).map_err(|e| Error::Dimension(e.to_string()))?;
    SamplingMask::from_pattern(pattern)
}

pub fn save_mask(path: impl AsRef<Path>, mask: &SamplingMask) -> Result<()> {
    fs::write(path, encode_mask(mask)?)?;
    Ok(())
}

pub fn load_mask(path: impl AsRef<Path>) -> Result<SamplingMask> {
    decode_mask(&fs::read(path)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random_volume(dims: Dims, seed: u64) -> DynamicVolume {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let data = Array2::from_shape_fn(dims.casorati_shape(), |_| {
            Complex64::new(rng.gen::<f64>() - 0.5, rng.gen::<f64>() * 1e-300)
        });
        DynamicVolume::new(data, dims).unwrap()
    }

    fn same_bits(a: &DynamicVolume, b: &DynamicVolume) -> bool {
        a.dims() == b.dims()
            && a.data()
                .iter()
                .zip(b.data().iter())
                .all(|(x, y)| x.re.to_bits() == y.re.to_bits() && x.im.to_bits() == y.im.to_bits())
    }

    #[test]
    fn file_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("v.lpsv");
        let v = random_volume(Dims::new(8, 8, 4).unwrap(), 1);
        save_volume(&path, &v).unwrap();
        assert!(same_bits(&v, &load_volume(&path).unwrap()));
    }

    #[test]
    fn header_layout() {
        let v = random_volume(Dims::new(2, 3, 1).unwrap(), 2);
        let bytes = encode_volume(&v).unwrap();
        assert_eq!(&bytes[..4], b"LPSV");
        assert_eq!(read_u32(&bytes, 4), 1);
        assert_eq!(
            (read_u32(&bytes, 8), read_u32(&bytes, 12), read_u32(&bytes, 16)),
            (2, 3, 1)
        );
        assert_eq!(bytes.len(), 20 + 6 * 16);
        // second element in column-major order is row 1 of column 0
        let re = f64::from_le_bytes(bytes[36..44].try_into().unwrap());
        assert_eq!(re, v.data()[[1, 0]].re);
    }

    #[test]
    fn wrong_magic() {
        let v = random_volume(Dims::new(2, 2, 1).unwrap(), 3);
        let mut bytes = encode_volume(&v).unwrap();
        bytes[..4].copy_from_slice(b"NOPE");
        assert!(matches!(decode_volume(&bytes), Err(Error::Format(_))));
        // a mask file is not a volume
        assert!(matches!(
            decode_volume(&{
                let mut b = bytes.clone();
                b[..4].copy_from_slice(b"LPSM");
                b
            }),
            Err(Error::Format(_))
        ));
    }

    #[test]
    fn truncated_payload() {
        let v = random_volume(Dims::new(4, 4, 2).unwrap(), 4);
        let bytes = encode_volume(&v).unwrap();
        let short = &bytes[..bytes.len() - 5];
        assert!(matches!(decode_volume(short), Err(Error::Truncated { .. })));
        assert!(matches!(decode_volume(&bytes[..10]), Err(Error::Format(_))));
    }

    #[test]
    fn oversized_payload_and_zero_dims() {
        let v = random_volume(Dims::new(2, 2, 1).unwrap(), 5);
        let mut bytes = encode_volume(&v).unwrap();
        bytes.extend_from_slice(&[0u8; 16]);
        assert!(matches!(decode_volume(&bytes), Err(Error::Dimension(_))));
        let mut zero = encode_volume(&v).unwrap();
        zero[8..12].copy_from_slice(&0u32.to_le_bytes());
        assert!(matches!(decode_volume(&zero), Err(Error::Dimension(_))));
    }

    #[test]
    fn mask_round_trip_and_bad_byte() {
        let mut pattern = Array2::from_elem((4, 6), false);
        pattern[[1, 5]] = true;
        pattern[[3, 0]] = true;
        let mask = SamplingMask::from_pattern(pattern).unwrap();
        let bytes = encode_mask(&mask).unwrap();
        assert_eq!(&bytes[..4], b"LPSM");
        assert_eq!(decode_mask(&bytes).unwrap(), mask);
        let mut bad = bytes.clone();
        bad[20] = 7;
        assert!(matches!(decode_mask(&bad), Err(Error::Format(_))));
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(32))]
        #[test]
        fn round_trip_is_bit_exact(nx in 1usize..7, ny in 1usize..7, nz in 1usize..4, seed: u64) {
            let v = random_volume(Dims::new(nx, ny, nz).unwrap(), seed);
            let back = decode_volume(&encode_volume(&v).unwrap()).unwrap();
            prop_assert!(same_bits(&v, &back));
        }
    }
}
