//! Kernel serialization.
//!
//! JSON: `{"degree": n, "dim": N, "coeffs": [[re, im], …]}` in row-major order.
//! Binary: little-endian `u32 degree`, `u32 dim`, then `N^n` pairs of `f64`
//! `(re, im)`. Both formats round-trip bit-exactly.

use std::fs;
use std::path::Path;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::QKernel;
use crate::error::{Error, Result};

#[derive(Serialize, Deserialize)]
struct KernelJson {
    degree: usize,
    dim: usize,
    coeffs: Vec<[f64; 2]>,
}

impl Serialize for QKernel {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        KernelJson {
            degree: self.degree,
            dim: self.dim,
            coeffs: self.coeffs.iter().map(|z| [z.re, z.im]).collect(),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for QKernel {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let raw = KernelJson::deserialize(d)?;
        let coeffs = raw
            .coeffs
            .into_iter()
            .map(|[re, im]| Complex64::new(re, im))
            .collect();
        QKernel::from_coeffs(raw.dim, raw.degree, coeffs).map_err(serde::de::Error::custom)
    }
}

const HEADER: usize = 8;

impl QKernel {
    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string(self)?)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }

    pub fn to_bytes(&self) -> Vec<u8> {
        let mut out = Vec::with_capacity(HEADER + 16 * self.coeffs.len());
        out.extend_from_slice(&(self.degree as u32).to_le_bytes());
        out.extend_from_slice(&(self.dim as u32).to_le_bytes());
        for z in &self.coeffs {
            out.extend_from_slice(&z.re.to_le_bytes());
            out.extend_from_slice(&z.im.to_le_bytes());
        }
        out
    }

    pub fn from_bytes(bytes: &[u8]) -> Result<Self> {
        if bytes.len() < HEADER {
            return Err(Error::Format(format!(
                "binary kernel needs an 8-byte header, got {} bytes",
                bytes.len()
            )));
        }
        let word = |i: usize| u32::from_le_bytes(bytes[i..i + 4].try_into().unwrap()) as usize;
        let (degree, dim) = (word(0), word(4));
        let payload = &bytes[HEADER..];
        if !payload.len().is_multiple_of(16) {
            return Err(Error::Format("payload is not a whole number of f64 pairs".into()));
        }
        let coeffs = payload
            .chunks_exact(16)
            .map(|c| {
                Complex64::new(
                    f64::from_le_bytes(c[..8].try_into().unwrap()),
                    f64::from_le_bytes(c[8..].try_into().unwrap()),
                )
            })
            .collect();
        QKernel::from_coeffs(dim, degree, coeffs)
    }
}

fn is_json(path: &Path) -> bool {
    path.extension().is_some_and(|e| e.eq_ignore_ascii_case("json"))
}

/// Reads a kernel; `.json` files are parsed as JSON, anything else as binary.
pub fn read_kernel(path: &Path) -> Result<QKernel> {
    if is_json(path) {
        QKernel::from_json(&fs::read_to_string(path)?)
    } else {
        QKernel::from_bytes(&fs::read(path)?)
    }
}

pub fn write_kernel(path: &Path, kernel: &QKernel) -> Result<()> {
    if is_json(path) {
        fs::write(path, kernel.to_json()?)?;
    } else {
        fs::write(path, kernel.to_bytes())?;
    }
    Ok(())
}
