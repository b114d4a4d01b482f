//! Text encodings of bit vectors, one vector per line.

use crate::args::BitFormat;
use crate::error::{CliError, CliResult};

pub fn parse_bits(line: &str, len: usize, format: BitFormat) -> CliResult<Vec<u8>> {
    match format {
        BitFormat::Bin => {
            let bits: Vec<u8> = line
                .chars()
                .map(|c| match c {
                    '0' => Ok(0),
                    '1' => Ok(1),
                    _ => Err(CliError::validation(format!("invalid bit character '{c}'"))),
                })
                .collect::<CliResult<_>>()?;
            if bits.len() != len {
                return Err(CliError::validation(format!(
                    "expected {len} bits per line, got {}",
                    bits.len()
                )));
            }
            Ok(bits)
        }
        BitFormat::Hex => {
            let digits = len.div_ceil(4);
            if line.len() != digits {
                return Err(CliError::validation(format!(
                    "expected {digits} hex digits for {len} bits, got {}",
                    line.len()
                )));
            }
            let mut bits = Vec::with_capacity(4 * digits);
            for c in line.chars() {
                let v = c
                    .to_digit(16)
                    .ok_or_else(|| CliError::validation(format!("invalid hex digit '{c}'")))?;
                bits.extend((0..4).rev().map(|s| ((v >> s) & 1) as u8));
            }
            if bits[len..].iter().any(|&b| b != 0) {
                return Err(CliError::validation(
                    "nonzero padding bits in last hex digit",
                ));
            }
            bits.truncate(len);
            Ok(bits)
        }
    }
}

pub fn format_bits(bits: &[u8], format: BitFormat) -> String {
    match format {
        BitFormat::Bin => bits
            .iter()
            .map(|&b| if b == 0 { '0' } else { '1' })
            .collect(),
        BitFormat::Hex => bits
            .chunks(4)
            .map(|chunk| {
                let v = (0..4).fold(0u32, |acc, j| {
                    (acc << 1) | u32::from(*chunk.get(j).unwrap_or(&0))
                });
                char::from_digit(v, 16).expect("nibble")
            })
            .collect(),
    }
}

pub fn parse_llrs(line: &str, len: usize) -> CliResult<Vec<f64>> {
    let llrs: Vec<f64> = line
        .split(',')
        .map(|t| {
            let t = t.trim();
            t.parse::<f64>()
                .ok()
                .filter(|v| !v.is_nan())
                .ok_or_else(|| CliError::validation(format!("invalid LLR '{t}'")))
        })
        .collect::<CliResult<_>>()?;
    if llrs.len() != len {
        return Err(CliError::validation(format!(
            "expected {len} LLRs per line, got {}",
            llrs.len()
        )));
    }
    Ok(llrs)
}
