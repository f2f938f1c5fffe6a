//! Minimal reader for the CSV files this crate writes: `#` comment lines
//! carrying `key=value` config echoes, one header row, then data rows.

use crate::analysis::BifurcationRecord;
use crate::map_core::Branch;
use crate::{Error, Result};

#[derive(Debug, Clone, PartialEq, Default)]
pub struct Table {
    /// `key=value` pairs from the leading comment lines, in order.
    pub config: Vec<(String, String)>,
    pub header: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

impl Table {
    pub fn column(&self, name: &str) -> Option<usize> {
        self.header.iter().position(|h| h == name)
    }

    pub fn config_value(&self, key: &str) -> Option<&str> {
        self.config.iter().find(|(k, _)| k == key).map(|(_, v)| v.as_str())
    }
}

pub fn read_table(text: &str) -> Result<Table> {
    let mut table = Table::default();
    for (i, line) in text.lines().enumerate() {
        if let Some(rest) = line.strip_prefix('#') {
            if let Some((k, v)) = rest.trim().split_once('=') {
                table.config.push((k.trim().to_string(), v.trim().to_string()));
            }
            continue;
        }
        if line.trim().is_empty() {
            continue;
        }
        let fields: Vec<String> = line.split(',').map(str::to_string).collect();
        if table.header.is_empty() {
            table.header = fields;
        } else if fields.len() != table.header.len() {
            return Err(Error::Parse {
                line: i + 1,
                msg: format!("{} fields, header has {}", fields.len(), table.header.len()),
            });
        } else {
            table.rows.push(fields);
        }
    }
    Ok(table)
}

/// Parses a float written by [`crate::analysis::fmt17`], including `nan`.
pub fn parse_f64(s: &str, line: usize) -> Result<f64> {
    s.parse().map_err(|_| Error::Parse {
        line,
        msg: format!("not a number: {s:?}"),
    })
}

fn parse_usize(s: &str, line: usize) -> Result<usize> {
    s.parse().map_err(|_| Error::Parse {
        line,
        msg: format!("not an index: {s:?}"),
    })
}

/// Reads back the bifurcation schema `r,init,iter,theta,phi,w1,w2,branch`.
pub fn read_bifurcation(text: &str) -> Result<Vec<BifurcationRecord>> {
    let t = read_table(text)?;
    let expected = ["r", "init", "iter", "theta", "phi", "w1", "w2", "branch"];
    if t.header != expected {
        return Err(Error::Parse {
            line: 0,
            msg: format!("unexpected header {:?}", t.header),
        });
    }
    t.rows
        .iter()
        .enumerate()
        .map(|(i, f)| {
            let branch = if f[7].is_empty() {
                None
            } else {
                let c = f[7].chars().next().unwrap_or('?');
                Some(Branch::from_char(c)?)
            };
            Ok(BifurcationRecord {
                r: parse_f64(&f[0], i)?,
                init_index: parse_usize(&f[1], i)?,
                iter_index: parse_usize(&f[2], i)?,
                theta: parse_f64(&f[3], i)?,
                phi: parse_f64(&f[4], i)?,
                w1: parse_f64(&f[5], i)?,
                w2: parse_f64(&f[6], i)?,
                branch,
            })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn comments_and_rows() {
        let t = read_table("# command=windows\n# digits=64\nn,lower\n1,0.5\n").unwrap();
        assert_eq!(t.config_value("digits"), Some("64"));
        assert_eq!(t.column("lower"), Some(1));
        assert_eq!(t.rows, vec![vec!["1".to_string(), "0.5".to_string()]]);
        assert!(read_table("a,b\n1\n").is_err());
    }
}
