//! Config file parsing and state serialization.
//!
//! Config files are TOML:
//!
//! ```toml
//! [fluid]
//! g = 9.81
//! rho = 1000.0
//! h0 = 2.0
//!
//! [geometry]
//! l = 1.0
//! L = 10.0
//! L_prime = 10.0
//! h_eq = "flat:1.0"      # or an odd-length array sampled from -l to l
//!
//! [grid]
//! cells = 200            # optional, cells per exterior side
//! ```

use std::collections::BTreeMap;
use std::io::Write;

use serde::Deserialize;

use super::config::{HeqProfile, RawConfig};
use super::grid::{Grid, Side, DEFAULT_CELLS};
use super::state::State;
use crate::error::{Error, Result};
use crate::scalar::Real;

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct FileFluid {
    g: f64,
    rho: f64,
    h0: f64,
}

#[derive(Debug, Deserialize)]
#[serde(untagged)]
enum FileProfile {
    Token(String),
    Samples(Vec<f64>),
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct FileGeometry {
    l: f64,
    #[serde(rename = "L")]
    big_l: f64,
    #[serde(rename = "L_prime")]
    l_prime: f64,
    h_eq: FileProfile,
}

#[derive(Debug, Deserialize, Default)]
#[serde(deny_unknown_fields)]
struct FileGrid {
    cells: Option<usize>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct ConfigDoc {
    fluid: FileFluid,
    geometry: FileGeometry,
    #[serde(default)]
    grid: FileGrid,
}

/// Parsed config file: raw physical inputs plus the grid resolution.
#[derive(Debug, Clone, PartialEq)]
pub struct ConfigFile {
    pub raw: RawConfig<f64>,
    pub cells: usize,
}

pub fn parse_config(text: &str) -> Result<ConfigFile> {
    let doc: ConfigDoc = toml::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
    let h_eq = match doc.geometry.h_eq {
        FileProfile::Token(s) => HeqProfile::parse_token(&s)?,
        FileProfile::Samples(v) => HeqProfile::Sampled(v),
    };
    Ok(ConfigFile {
        raw: RawConfig {
            g: doc.fluid.g,
            rho: doc.fluid.rho,
            h0: doc.fluid.h0,
            l: doc.geometry.l,
            big_l: doc.geometry.big_l,
            l_prime: doc.geometry.l_prime,
            h_eq,
        },
        cells: doc.grid.cells.unwrap_or(DEFAULT_CELLS),
    })
}

/// Fixed 17-significant-digit formatting used by every CSV writer.
pub fn fmt_num<T: Real>(v: T) -> String {
    format!("{:.16e}", v.as_f64())
}

/// Writes `# key = value` metadata lines.
pub fn write_meta<W: Write>(w: &mut W, meta: &[(&str, String)]) -> Result<()> {
    for (k, v) in meta {
        writeln!(w, "# {k} = {v}")?;
    }
    Ok(())
}

/// Splits `#` metadata lines from the CSV body.
pub fn split_meta(text: &str) -> (BTreeMap<String, String>, String) {
    let mut meta = BTreeMap::new();
    let mut body = String::new();
    for line in text.lines() {
        if let Some(rest) = line.strip_prefix('#') {
            if let Some((k, v)) = rest.split_once('=') {
                meta.insert(k.trim().to_string(), v.trim().to_string());
            }
        } else if !line.trim().is_empty() {
            body.push_str(line);
            body.push('\n');
        }
    }
    (meta, body)
}

fn meta_num(meta: &BTreeMap<String, String>, key: &str) -> Result<f64> {
    meta.get(key)
        .ok_or_else(|| Error::Parse(format!("missing metadata `{key}`")))?
        .parse()
        .map_err(|_| Error::Parse(format!("bad metadata `{key}`")))
}

/// CSV: metadata block, then `x,zeta,q` rows in increasing x. Node rows
/// carry zeta, midpoint rows carry q; the other column is empty.
pub fn write_state_csv<T: Real, W: Write>(z: &State<T>, w: &mut W) -> Result<()> {
    let g = &z.grid;
    write_meta(
        w,
        &[
            ("kind", "state".into()),
            ("cells_left", g.cells_left.to_string()),
            ("cells_right", g.cells_right.to_string()),
            ("l", fmt_num(g.l)),
            ("L", fmt_num(g.big_l)),
            ("L_prime", fmt_num(g.l_prime)),
            ("q_i_avg", fmt_num(z.q_i_avg)),
            ("delta", fmt_num(z.delta)),
            ("eta", fmt_num(z.eta)),
        ],
    )?;
    writeln!(w, "x,zeta,q")?;
    for side in [Side::Left, Side::Right] {
        let (zeta, q) = (z.zeta(side), z.q(side));
        for j in 0..zeta.len() {
            writeln!(w, "{},{},", fmt_num(g.node_x(side, j)), fmt_num(zeta[j]))?;
            if j < q.len() {
                writeln!(w, "{},,{}", fmt_num(g.face_x(side, j)), fmt_num(q[j]))?;
            }
        }
    }
    Ok(())
}

pub fn read_state_csv<T: Real>(text: &str) -> Result<State<T>> {
    let (meta, body) = split_meta(text);
    let cells = |k: &str| -> Result<usize> { Ok(meta_num(&meta, k)? as usize) };
    let grid = Grid {
        l: T::lit(meta_num(&meta, "l")?),
        big_l: T::lit(meta_num(&meta, "L")?),
        l_prime: T::lit(meta_num(&meta, "L_prime")?),
        cells_left: cells("cells_left")?,
        cells_right: cells("cells_right")?,
    };
    let mut z = State::zeros(grid);
    z.q_i_avg = T::lit(meta_num(&meta, "q_i_avg")?);
    z.delta = T::lit(meta_num(&meta, "delta")?);
    z.eta = T::lit(meta_num(&meta, "eta")?);
    let mut rdr = csv::ReaderBuilder::new().flexible(true).from_reader(body.as_bytes());
    let (mut zl, mut ql, mut zr, mut qr) = (vec![], vec![], vec![], vec![]);
    let left_rows = 2 * grid.cells_left + 1;
    for (i, rec) in rdr.records().enumerate() {
        let rec = rec.map_err(|e| Error::Parse(e.to_string()))?;
        let field = |k: usize| rec.get(k).map(str::trim).unwrap_or("");
        let num = |s: &str| s.parse::<f64>().map(T::lit).map_err(|_| Error::Parse(format!("row {i}: bad number `{s}`")));
        let (zs, qs) = (field(1), field(2));
        let left = i < left_rows;
        match (zs.is_empty(), qs.is_empty()) {
            (false, true) => {
                if left {
                    zl.push(num(zs)?)
                } else {
                    zr.push(num(zs)?)
                }
            }
            (true, false) => {
                if left {
                    ql.push(num(qs)?)
                } else {
                    qr.push(num(qs)?)
                }
            }
            _ => return Err(Error::Parse(format!("row {i}: exactly one of zeta, q must be set"))),
        }
    }
    z.zeta_left = zl;
    z.q_left = ql;
    z.zeta_right = zr;
    z.q_right = qr;
    z.validate_shape().map_err(|_| Error::Parse("row count does not match the grid".into()))?;
    Ok(z)
}

pub fn state_to_json<T: Real>(z: &State<T>) -> Result<String> {
    serde_json::to_string_pretty(z).map_err(|e| Error::Parse(e.to_string()))
}

pub fn state_from_json<T: Real>(text: &str) -> Result<State<T>> {
    let z: State<T> = serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
    z.validate_shape()?;
    Ok(z)
}
