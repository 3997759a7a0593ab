//! The graph6 format (short and long headers).
//!
//! The body packs the upper triangle column by column: `x(0,1), x(0,2),
//! x(1,2), x(0,3), ...`, six bits per byte, each byte offset by 63.

use crate::error::{Error, Result};
use crate::graph::Graph;

const HEADER: &[u8] = b">>graph6<<";
const MAX_NODES: usize = 68_719_476_735;

pub fn parse_graph6(bytes: &[u8]) -> Result<Graph> {
    let mut pos = 0;
    if bytes.starts_with(HEADER) {
        pos = HEADER.len();
    }
    let end = bytes
        .iter()
        .rposition(|b| !b.is_ascii_whitespace())
        .map_or(0, |i| i + 1);
    let data = &bytes[..end];

    let (n, body_start) = parse_size(data, pos)?;
    let bit_count = n * n.saturating_sub(1) / 2;
    let needed = bit_count.div_ceil(6);
    let body = &data[body_start..];
    if body.len() < needed {
        return Err(Error::Graph6 {
            offset: data.len(),
            reason: format!(
                "expected {needed} edge bytes for n = {n}, found {}",
                body.len()
            ),
        });
    }
    if body.len() > needed {
        return Err(Error::Graph6 {
            offset: body_start + needed,
            reason: "trailing bytes after edge data".into(),
        });
    }
    for (k, &b) in body.iter().enumerate() {
        if !(63..=126).contains(&b) {
            return Err(Error::Graph6 {
                offset: body_start + k,
                reason: format!("byte {b:#04x} outside the graph6 range"),
            });
        }
    }

    let mut g = Graph::empty(n);
    let mut bit = 0usize;
    for j in 1..n {
        for i in 0..j {
            let byte = body[bit / 6] - 63;
            if byte & (1 << (5 - bit % 6)) != 0 {
                g.add_edge(i, j)?;
            }
            bit += 1;
        }
    }
    Ok(g)
}

fn parse_size(data: &[u8], pos: usize) -> Result<(usize, usize)> {
    let byte_at = |k: usize| -> Result<usize> {
        let b = *data.get(k).ok_or(Error::Graph6 {
            offset: k,
            reason: "truncated size header".into(),
        })?;
        if !(63..=126).contains(&b) {
            return Err(Error::Graph6 {
                offset: k,
                reason: format!("byte {b:#04x} outside the graph6 range"),
            });
        }
        Ok((b - 63) as usize)
    };
    let first = *data.get(pos).ok_or(Error::Graph6 {
        offset: pos,
        reason: "empty input".into(),
    })?;
    if first != b'~' {
        return Ok((byte_at(pos)?, pos + 1));
    }
    if data.get(pos + 1) == Some(&b'~') {
        let mut n = 0;
        for k in 0..6 {
            n = (n << 6) | byte_at(pos + 2 + k)?;
        }
        Ok((n, pos + 8))
    } else {
        let mut n = 0;
        for k in 0..3 {
            n = (n << 6) | byte_at(pos + 1 + k)?;
        }
        Ok((n, pos + 4))
    }
}

pub fn write_graph6(g: &Graph) -> Result<Vec<u8>> {
    let n = g.n();
    if n == 0 || n > MAX_NODES {
        return Err(Error::Unsupported(format!(
            "graph6 encoding requires 1 <= n <= {MAX_NODES}, got {n}"
        )));
    }
    let mut out = Vec::new();
    if n <= 62 {
        out.push(n as u8 + 63);
    } else if n <= 258_047 {
        out.push(b'~');
        for shift in [12, 6, 0] {
            out.push(((n >> shift) & 63) as u8 + 63);
        }
    } else {
        out.extend_from_slice(b"~~");
        for shift in [30, 24, 18, 12, 6, 0] {
            out.push(((n >> shift) & 63) as u8 + 63);
        }
    }

    let mut acc = 0u8;
    let mut filled = 0;
    for j in 1..n {
        for i in 0..j {
            acc = (acc << 1) | g.has_edge(i, j) as u8;
            filled += 1;
            if filled == 6 {
                out.push(acc + 63);
                acc = 0;
                filled = 0;
            }
        }
    }
    if filled > 0 {
        out.push((acc << (6 - filled)) + 63);
    }
    Ok(out)
}

/// Convenience wrapper returning the encoding as a `String`.
pub fn to_graph6_string(g: &Graph) -> Result<String> {
    Ok(String::from_utf8(write_graph6(g)?).expect("graph6 is ASCII"))
}
