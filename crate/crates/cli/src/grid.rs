//! Parsing of numeric value lists: `0.1,0.2,0.5` or inclusive `start:end:step`.

use anyhow::{bail, Context, Result};
use std::str::FromStr;

pub fn parse_f64_list(text: &str) -> Result<Vec<f64>> {
    if let Some((start, end, step)) = split_range(text) {
        let (start, end, step): (f64, f64, f64) = (
            parse_one(start)?,
            parse_one(end)?,
            parse_one(step)?,
        );
        if !(step > 0.0) || end < start {
            bail!("bad range {text:?}: need step > 0 and end >= start");
        }
        let count = ((end - start) / step + 1e-9).floor() as usize;
        // multiply rather than accumulate so the values stay exact-ish
        return Ok((0..=count)
            .map(|i| round_decimal(start + i as f64 * step))
            .collect());
    }
    text.split(',').map(|t| parse_one(t.trim())).collect()
}

pub fn parse_u32_list(text: &str) -> Result<Vec<u32>> {
    if let Some((start, end, step)) = split_range(text) {
        let (start, end, step): (u32, u32, u32) = (
            parse_one(start)?,
            parse_one(end)?,
            parse_one(step)?,
        );
        if step == 0 || end < start {
            bail!("bad range {text:?}: need step > 0 and end >= start");
        }
        return Ok((start..=end).step_by(step as usize).collect());
    }
    text.split(',').map(|t| parse_one(t.trim())).collect()
}

fn split_range(text: &str) -> Option<(&str, &str, &str)> {
    let mut parts = text.split(':');
    let out = (parts.next()?, parts.next()?, parts.next()?);
    parts.next().is_none().then_some(out)
}

fn parse_one<T: FromStr>(text: &str) -> Result<T>
where
    T::Err: std::error::Error + Send + Sync + 'static,
{
    text.trim()
        .parse()
        .with_context(|| format!("invalid number {text:?}"))
}

/// Snaps `0.30000000000000004` style drift back to the nearest 12-digit
/// decimal.
fn round_decimal(x: f64) -> f64 {
    let scale = 1e12;
    (x * scale).round() / scale
}
