//! Plain-text instance files: one drop's layout, power split and rate table.
//!
//! ```text
//! hetnet-instance v1
//! roster <mbs> <pbs> <cellular> <pairs>
//! rate_floor <bps>
//! pair_map <tx ordinal of D2D RX 0> <... of RX 1> ...
//! mbs <x> <y>            one line per MBS, in index order
//! pbs <x> <y>
//! cell <x> <y>
//! d2d_tx <x> <y>
//! d2d_rx <x> <y>
//! power <p1> <p2> <p3>   one line per transmitter, mW
//! entry <n> <s> <k> <sinr> <rate>
//! end
//! ```
//!
//! `#` starts a comment. After the `roster` line, lines may come in any order;
//! lines of one kind are taken in index order. Every available
//! (transmitter, subband, receiver) triple needs exactly one `entry` line.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use hetnet_core::{Link, NetworkLayout, Point, PowerAllocation, RateTable, Roster, Subband};

use crate::error::{HarnessError, Result};
use crate::experiment::Instance;

pub const HEADER: &str = "hetnet-instance v1";

pub fn to_text(instance: &Instance) -> String {
    let roster = instance.rates.roster();
    let rates = &instance.rates;
    let mut out = String::new();
    let _ = writeln!(out, "{HEADER}");
    let _ = writeln!(out, "roster {} {} {} {}", roster.mbs, roster.pbs, roster.cellular, roster.pairs);
    let _ = writeln!(out, "rate_floor {:e}", rates.rate_floor());
    out.push_str("pair_map");
    for tx in rates.pair_map() {
        let _ = write!(out, " {tx}");
    }
    out.push('\n');
    let layout = &instance.layout;
    for (key, points) in [
        ("mbs", &layout.mbs_positions),
        ("pbs", &layout.pbs_positions),
        ("cell", &layout.cellular_user_positions),
        ("d2d_tx", &layout.d2d_tx_positions),
        ("d2d_rx", &layout.d2d_rx_positions),
    ] {
        for p in points {
            let _ = writeln!(out, "{key} {:e} {:e}", p.x, p.y);
        }
    }
    for row in instance.power.rows() {
        let _ = writeln!(out, "power {:e} {:e} {:e}", row[0], row[1], row[2]);
    }
    for (link, k, sinr, rate) in rates.entries() {
        let _ = writeln!(out, "entry {} {} {} {:e} {:e}", link.tx, link.subband.number(), k, sinr, rate);
    }
    out.push_str("end\n");
    out
}

pub fn write_file(path: &Path, instance: &Instance) -> Result<()> {
    fs::write(path, to_text(instance)).map_err(HarnessError::io(path))
}

pub fn read_file(path: &Path) -> Result<Instance> {
    let text = fs::read_to_string(path).map_err(HarnessError::io(path))?;
    parse(&text)
}

struct Line<'a> {
    offset: usize,
    key: &'a str,
    fields: Vec<(usize, &'a str)>,
}

impl Line<'_> {
    fn err(&self, message: impl Into<String>) -> HarnessError {
        HarnessError::Parse {
            offset: self.offset,
            message: message.into(),
        }
    }

    fn expect_len(&self, n: usize) -> Result<()> {
        if self.fields.len() == n {
            Ok(())
        } else {
            Err(self.err(format!("`{}` takes {n} fields, found {}", self.key, self.fields.len())))
        }
    }

    fn parse<T: std::str::FromStr>(&self, i: usize) -> Result<T> {
        let (offset, text) = self.fields[i];
        text.parse().map_err(|_| HarnessError::Parse {
            offset,
            message: format!("cannot parse {text:?} in `{}` line", self.key),
        })
    }

    fn point(&self) -> Result<Point> {
        self.expect_len(2)?;
        Ok(Point {
            x: self.parse(0)?,
            y: self.parse(1)?,
        })
    }
}

/// Splits `text` into non-empty, comment-stripped lines with byte offsets.
fn lines(text: &str) -> impl Iterator<Item = Line<'_>> {
    let origin = text.as_ptr() as usize;
    text.split_inclusive('\n').filter_map(move |raw| {
        let content = raw.split('#').next().unwrap_or("");
        let mut tokens = content
            .split_ascii_whitespace()
            .map(|t| (t.as_ptr() as usize - origin, t));
        let (offset, key) = tokens.next()?;
        Some(Line {
            offset,
            key,
            fields: tokens.collect(),
        })
    })
}

pub fn parse(text: &str) -> Result<Instance> {
    let mut it = lines(text);
    let eof = |message: &str| HarnessError::Parse {
        offset: text.len(),
        message: message.to_string(),
    };

    let header = it.next().ok_or_else(|| eof("empty file"))?;
    let header_text: Vec<&str> = std::iter::once(header.key).chain(header.fields.iter().map(|f| f.1)).collect();
    if header_text.join(" ") != HEADER {
        return Err(header.err(format!("expected header `{HEADER}`")));
    }

    let line = it.next().ok_or_else(|| eof("missing `roster` line"))?;
    if line.key != "roster" {
        return Err(line.err(format!("expected `roster`, found `{}`", line.key)));
    }
    line.expect_len(4)?;
    let roster = Roster::new(line.parse(0)?, line.parse(1)?, line.parse(2)?, line.parse(3)?);

    let mut rate_floor: Option<f64> = None;
    let mut pair_map: Option<Vec<usize>> = None;
    let mut layout = NetworkLayout {
        mbs_positions: Vec::new(),
        pbs_positions: Vec::new(),
        cellular_user_positions: Vec::new(),
        d2d_tx_positions: Vec::new(),
        d2d_rx_positions: Vec::new(),
        pair_map: Vec::new(),
    };
    let mut power = Vec::new();
    let mut entries = Vec::new();
    let mut end_offset = None;

    for line in it.by_ref() {
        match line.key {
            "rate_floor" => {
                line.expect_len(1)?;
                if rate_floor.replace(line.parse(0)?).is_some() {
                    return Err(line.err("duplicate `rate_floor`"));
                }
            }
            "pair_map" => {
                line.expect_len(roster.pairs)?;
                let map = (0..roster.pairs).map(|i| line.parse(i)).collect::<Result<Vec<usize>>>()?;
                if pair_map.replace(map).is_some() {
                    return Err(line.err("duplicate `pair_map`"));
                }
            }
            "mbs" => layout.mbs_positions.push(line.point()?),
            "pbs" => layout.pbs_positions.push(line.point()?),
            "cell" => layout.cellular_user_positions.push(line.point()?),
            "d2d_tx" => layout.d2d_tx_positions.push(line.point()?),
            "d2d_rx" => layout.d2d_rx_positions.push(line.point()?),
            "power" => {
                line.expect_len(3)?;
                power.push([line.parse(0)?, line.parse(1)?, line.parse(2)?]);
            }
            "entry" => {
                line.expect_len(5)?;
                let tx: usize = line.parse(0)?;
                let s: u8 = line.parse(1)?;
                let subband = Subband::from_number(s)
                    .ok_or_else(|| HarnessError::Parse {
                        offset: line.fields[1].0,
                        message: format!("subband must be 1, 2 or 3, found {s}"),
                    })?;
                let k: usize = line.parse(2)?;
                if tx >= roster.n_tx() || k >= roster.n_rx() {
                    return Err(line.err(format!("entry ({tx}, {s}, {k}) is outside the roster")));
                }
                entries.push((Link::new(tx, subband), k, line.parse::<f64>(3)?, line.parse::<f64>(4)?));
            }
            "end" => {
                line.expect_len(0)?;
                end_offset = Some(line.offset);
                break;
            }
            other => return Err(line.err(format!("unknown line kind `{other}`"))),
        }
    }
    let end_offset = end_offset.ok_or_else(|| eof("truncated file: missing `end`"))?;
    if let Some(extra) = it.next() {
        return Err(extra.err("content after `end`"));
    }
    let at_end = |message: String| HarnessError::Parse {
        offset: end_offset,
        message,
    };

    let rate_floor = rate_floor.ok_or_else(|| at_end("missing `rate_floor`".into()))?;
    let pair_map = match pair_map {
        Some(m) => m,
        None if roster.pairs == 0 => Vec::new(),
        None => return Err(at_end("missing `pair_map`".into())),
    };
    for (key, found, expected) in [
        ("mbs", layout.mbs_positions.len(), roster.mbs),
        ("pbs", layout.pbs_positions.len(), roster.pbs),
        ("cell", layout.cellular_user_positions.len(), roster.cellular),
        ("d2d_tx", layout.d2d_tx_positions.len(), roster.pairs),
        ("d2d_rx", layout.d2d_rx_positions.len(), roster.pairs),
        ("power", power.len(), roster.n_tx()),
    ] {
        if found != expected {
            return Err(at_end(format!("expected {expected} `{key}` lines, found {found}")));
        }
    }
    layout.pair_map = pair_map.clone();
    layout.validate()?;
    let power = PowerAllocation::from_values(roster, power)?;
    let rates = RateTable::from_entries(roster, pair_map, rate_floor, entries)?;
    Ok(Instance { layout, power, rates })
}

#[cfg(test)]
mod tests {
    use super::*;

    const TINY: &str = "\
hetnet-instance v1
roster 1 0 1 0
rate_floor 1e-20
mbs 0 0
cell 100 0
power 39810.7 0 0
entry 0 1 0 12.5 2.0e6
end
";

    #[test]
    fn parses_minimal_instance() {
        let inst = parse(TINY).unwrap();
        assert_eq!(inst.rates.roster(), &Roster::new(1, 0, 1, 0));
        assert_eq!(inst.rates.rate(Link::new(0, Subband::One), 0), 2.0e6);
        assert_eq!(inst.layout.cellular_user_positions[0], Point { x: 100.0, y: 0.0 });
    }

    #[test]
    fn comments_and_blank_lines_are_ignored() {
        let text = TINY.replace("mbs 0 0\n", "# the only BS\n\nmbs 0 0   # origin\n");
        assert_eq!(parse(&text).unwrap(), parse(TINY).unwrap());
    }

    #[test]
    fn truncation_reports_eof_offset() {
        let cut = &TINY[..TINY.find("end").unwrap()];
        match parse(cut) {
            Err(HarnessError::Parse { offset, message }) => {
                assert_eq!(offset, cut.len());
                assert!(message.contains("end"));
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn bad_number_reports_its_offset() {
        let text = TINY.replace("12.5", "twelve");
        match parse(&text) {
            Err(HarnessError::Parse { offset, .. }) => assert_eq!(offset, text.find("twelve").unwrap()),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn structural_errors() {
        assert!(parse("").is_err());
        assert!(parse(&TINY.replace("v1", "v2")).is_err());
        assert!(parse(&TINY.replace("cell 100 0\n", "")).is_err());
        assert!(parse(&TINY.replace("entry 0 1 0", "entry 0 4 0")).is_err());
        assert!(parse(&TINY.replace("entry 0 1 0 12.5 2.0e6\n", "")).is_err());
        assert!(parse(&format!("{TINY}mbs 1 1\n")).is_err());
        assert!(parse(&TINY.replace("power", "pwr")).is_err());
    }
}
