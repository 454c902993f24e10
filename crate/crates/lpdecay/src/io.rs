//! Artifact formats.
//!
//! Grid fields use a small binary container:
//!
//! | bytes | content |
//! |-------|---------|
//! | 0..4  | magic `ALGF` |
//! | 4     | byte order of everything below, `b'<'` little or `b'>'` big |
//! | 5     | format version (1) |
//! | 6..8  | dimension, u16 |
//! | 8..16 | points per axis `N`, u64 |
//! | 16..24| box length `L`, f64 |
//! | 24..  | `dim * N^dim` coefficients as interleaved `(re, im)` f64 pairs, component-major |
//!
//! Writers always emit little-endian; readers accept both tags.
//!
//! Tables are CSV with floats in shortest round-trip scientific notation, so
//! the same values always produce the same bytes.

use std::fmt;
use std::fs::File;
use std::io::{BufReader, BufWriter, Read, Write};
use std::path::Path;

use lpdecay_core::dyadic::DyadicSpectrum;
use lpdecay_core::fit::DecayCertificate;
use lpdecay_core::grid::{Grid, GridField};
use lpdecay_core::{Backend, DecayProfile};
use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, IoContext, Result};
use crate::nse::SimTrace;

pub const MAGIC: [u8; 4] = *b"ALGF";
pub const FORMAT_VERSION: u8 = 1;
const HEADER_LEN: usize = 24;

pub fn write_field<W: Write>(mut w: W, field: &GridField) -> std::io::Result<()> {
    let grid = field.grid();
    let mut header = [0u8; HEADER_LEN];
    header[0..4].copy_from_slice(&MAGIC);
    header[4] = b'<';
    header[5] = FORMAT_VERSION;
    header[6..8].copy_from_slice(&(grid.dim as u16).to_le_bytes());
    header[8..16].copy_from_slice(&(grid.n as u64).to_le_bytes());
    header[16..24].copy_from_slice(&grid.length.to_le_bytes());
    w.write_all(&header)?;
    let mut buf = Vec::with_capacity(16 * field.coefficients().len());
    for c in field.coefficients() {
        buf.extend_from_slice(&c.re.to_le_bytes());
        buf.extend_from_slice(&c.im.to_le_bytes());
    }
    w.write_all(&buf)?;
    w.flush()
}

pub fn read_field<R: Read>(mut r: R) -> Result<GridField> {
    let bad = |m: &str| Error::Format(m.to_string());
    let mut header = [0u8; HEADER_LEN];
    r.read_exact(&mut header).map_err(|_| bad("truncated header"))?;
    if header[0..4] != MAGIC {
        return Err(bad("bad magic"));
    }
    let little = match header[4] {
        b'<' => true,
        b'>' => false,
        _ => return Err(bad("unknown byte-order tag")),
    };
    if header[5] != FORMAT_VERSION {
        return Err(Error::Format(format!("unsupported version {}", header[5])));
    }
    let u16_at = |b: [u8; 2]| if little { u16::from_le_bytes(b) } else { u16::from_be_bytes(b) };
    let u64_at = |b: [u8; 8]| if little { u64::from_le_bytes(b) } else { u64::from_be_bytes(b) };
    let f64_at = |b: [u8; 8]| if little { f64::from_le_bytes(b) } else { f64::from_be_bytes(b) };
    let dim = u16_at(header[6..8].try_into().unwrap()) as usize;
    let n = u64_at(header[8..16].try_into().unwrap());
    let length = f64_at(header[16..24].try_into().unwrap());
    let n = usize::try_from(n).map_err(|_| bad("grid too large"))?;
    let grid = Grid::new(dim, length, n)?;
    let count = grid
        .points()
        .checked_mul(dim)
        .ok_or_else(|| bad("grid too large"))?;
    let mut payload = Vec::new();
    r.read_to_end(&mut payload).map_err(|e| Error::Format(e.to_string()))?;
    if payload.len() != 16 * count {
        return Err(Error::Format(format!(
            "payload holds {} bytes, expected {}",
            payload.len(),
            16 * count
        )));
    }
    let coeffs = payload
        .chunks_exact(16)
        .map(|c| {
            Complex64::new(
                f64_at(c[0..8].try_into().unwrap()),
                f64_at(c[8..16].try_into().unwrap()),
            )
        })
        .collect();
    Ok(GridField::from_coefficients(grid, coeffs)?)
}

pub fn save_field(path: &Path, field: &GridField) -> Result<()> {
    let f = File::create(path).at(path)?;
    write_field(BufWriter::new(f), field).at(path)
}

pub fn load_field(path: &Path) -> Result<GridField> {
    let f = File::open(path).at(path)?;
    read_field(BufReader::new(f))
}

/// Shortest representation that parses back to the same `f64`.
pub fn fmt_f64(x: f64) -> String {
    format!("{x:e}")
}

fn parse_f64(s: &str) -> Result<f64> {
    s.trim()
        .parse()
        .map_err(|_| Error::Format(format!("not a number: {s:?}")))
}

fn backend_name(b: Backend) -> &'static str {
    match b {
        Backend::Radial => "radial",
        Backend::Grid => "grid",
    }
}

/// Columns `j, block_energy, ratio_for_alpha`; the last is empty without
/// `alpha`.
pub fn write_blocks_csv<W: Write>(w: W, s: &DyadicSpectrum, alpha: Option<f64>) -> Result<()> {
    let mut out = csv::Writer::from_writer(w);
    out.write_record(["j", "block_energy", "ratio_for_alpha"])?;
    for j in s.indices() {
        let ratio = alpha.map(|a| fmt_f64(s.ratio(j, a))).unwrap_or_default();
        out.write_record([j.to_string(), fmt_f64(s.energy(j)), ratio])?;
    }
    out.flush().map_err(|e| Error::Format(e.to_string()))?;
    Ok(())
}

/// Block energies back from [`write_blocks_csv`].
pub fn read_blocks_csv<R: Read>(r: R) -> Result<DyadicSpectrum> {
    let mut rdr = csv::Reader::from_reader(r);
    let mut j_min = None;
    let mut energies = Vec::new();
    for rec in rdr.records() {
        let rec = rec?;
        let j: i32 = rec[0]
            .parse()
            .map_err(|_| Error::Format(format!("bad block index {:?}", &rec[0])))?;
        let first = *j_min.get_or_insert(j);
        if j != first + energies.len() as i32 {
            return Err(Error::Format("block indices are not consecutive".into()));
        }
        energies.push(parse_f64(&rec[1])?);
    }
    let j_min = j_min.ok_or_else(|| Error::Format("no blocks".into()))?;
    Ok(DyadicSpectrum::from_blocks(j_min, energies))
}

/// Columns `t, l2, hdot1, hdot2, backend, horizon_flag`; the flag is `1`
/// for samples past the validity horizon.
pub fn write_profile_csv<W: Write>(w: W, p: &DecayProfile) -> Result<()> {
    let mut out = csv::Writer::from_writer(w);
    out.write_record(["t", "l2", "hdot1", "hdot2", "backend", "horizon_flag"])?;
    for i in 0..p.len() {
        out.write_record([
            fmt_f64(p.times[i]),
            fmt_f64(p.l2[i]),
            fmt_f64(p.hdot1[i]),
            fmt_f64(p.hdot2[i]),
            backend_name(p.backend).to_string(),
            if p.within_horizon(i) { "0" } else { "1" }.to_string(),
        ])?;
    }
    out.flush().map_err(|e| Error::Format(e.to_string()))?;
    Ok(())
}

/// Reads [`write_profile_csv`] output. The validity horizon is not stored;
/// it comes back as `None`.
pub fn read_profile_csv<R: Read>(r: R) -> Result<DecayProfile> {
    let mut rdr = csv::Reader::from_reader(r);
    let mut p = DecayProfile {
        times: Vec::new(),
        l2: Vec::new(),
        hdot1: Vec::new(),
        hdot2: Vec::new(),
        backend: Backend::Radial,
        validity_horizon: None,
    };
    for rec in rdr.records() {
        let rec = rec?;
        if rec.len() != 6 {
            return Err(Error::Format("profile rows need 6 columns".into()));
        }
        p.times.push(parse_f64(&rec[0])?);
        p.l2.push(parse_f64(&rec[1])?);
        p.hdot1.push(parse_f64(&rec[2])?);
        p.hdot2.push(parse_f64(&rec[3])?);
        p.backend = match &rec[4] {
            "radial" => Backend::Radial,
            "grid" => Backend::Grid,
            other => return Err(Error::Format(format!("unknown backend {other:?}"))),
        };
    }
    Ok(p)
}

/// Columns `t, l2_u, l2_v, theta, hdot1, hdot2, energy_residual` with the
/// derivative norms taken from `u`.
pub fn write_trace_csv<W: Write>(w: W, tr: &SimTrace) -> Result<()> {
    let mut out = csv::Writer::from_writer(w);
    out.write_record(["t", "l2_u", "l2_v", "theta", "hdot1", "hdot2", "energy_residual"])?;
    let res = tr.energy_residuals();
    for i in 0..tr.u.len() {
        out.write_record([
            fmt_f64(tr.u.times[i]),
            fmt_f64(tr.u.l2[i]),
            fmt_f64(tr.v.l2[i]),
            fmt_f64(tr.theta_l2[i]),
            fmt_f64(tr.u.hdot1[i]),
            fmt_f64(tr.u.hdot2[i]),
            fmt_f64(res[i]),
        ])?;
    }
    out.flush().map_err(|e| Error::Format(e.to_string()))?;
    Ok(())
}

pub fn to_json<T: Serialize>(value: &T) -> Result<String> {
    Ok(serde_json::to_string_pretty(value)?)
}

/// Writes `contents` to `path` in one go.
pub fn write_text(path: &Path, contents: &str) -> Result<()> {
    std::fs::write(path, contents).at(path)
}

/// Key/value lines with the values aligned in one column.
#[derive(Debug, Clone, Default)]
pub struct TextReport {
    title: String,
    rows: Vec<(String, String)>,
}

impl TextReport {
    pub fn new(title: impl Into<String>) -> Self {
        TextReport {
            title: title.into(),
            rows: Vec::new(),
        }
    }

    pub fn line(&mut self, key: impl Into<String>, value: impl fmt::Display) -> &mut Self {
        self.rows.push((key.into(), value.to_string()));
        self
    }
}

impl fmt::Display for TextReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "{}", self.title)?;
        let width = self.rows.iter().map(|r| r.0.len()).max().unwrap_or(0);
        for (k, v) in &self.rows {
            writeln!(f, "  {k:<width$}  {v}")?;
        }
        Ok(())
    }
}

pub fn certificate_text(title: &str, c: &DecayCertificate) -> TextReport {
    let mut t = TextReport::new(title);
    t.line("verdict", c.verdict)
        .line("sigma_hat", format!("{:.6}", c.sigma_hat))
        .line("alpha_32", format!("{:.6}", c.convention.alpha_32))
        .line("mass_exponent", format!("{:.6}", c.convention.mass_exponent))
        .line("c_lower", fmt_f64(c.c_lower))
        .line("c_upper", fmt_f64(c.c_upper))
        .line("ratio", format!("{:.4}", c.ratio()))
        .line("residual", format!("{:.3e}", c.residual))
        .line("window", format!("[{:e}, {:e}]", c.window.0, c.window.1))
        .line("samples", c.samples);
    t
}

#[cfg(test)]
mod tests {
    use super::*;
    use lpdecay_core::radial::Amplitude;
    use lpdecay_core::synthesis::make_random_div_free;

    #[test]
    fn header_layout() {
        let grid = Grid::new(2, 3.0, 16).unwrap();
        let mut buf = Vec::new();
        write_field(&mut buf, &GridField::zeros(grid)).unwrap();
        assert_eq!(&buf[0..4], b"ALGF");
        assert_eq!(buf[4], b'<');
        assert_eq!(u16::from_le_bytes([buf[6], buf[7]]), 2);
        assert_eq!(buf.len(), HEADER_LEN + 256 * 2 * 16);
    }

    #[test]
    fn big_endian_files_are_read() {
        let grid = Grid::new(2, 8.0, 16).unwrap();
        let f = make_random_div_free(grid, 5, &Amplitude::GaussianSwirl);
        let mut buf = Vec::new();
        buf.extend_from_slice(b"ALGF>");
        buf.push(FORMAT_VERSION);
        buf.extend_from_slice(&2u16.to_be_bytes());
        buf.extend_from_slice(&16u64.to_be_bytes());
        buf.extend_from_slice(&8.0f64.to_be_bytes());
        for c in f.coefficients() {
            buf.extend_from_slice(&c.re.to_be_bytes());
            buf.extend_from_slice(&c.im.to_be_bytes());
        }
        let g = read_field(&buf[..]).unwrap();
        assert_eq!(g, f);
    }

    #[test]
    fn corrupt_containers_are_rejected() {
        let grid = Grid::new(2, 1.0, 16).unwrap();
        let mut buf = Vec::new();
        write_field(&mut buf, &GridField::zeros(grid)).unwrap();
        let mut bad_magic = buf.clone();
        bad_magic[0] = b'X';
        assert!(matches!(read_field(&bad_magic[..]), Err(Error::Format(_))));
        let mut bad_tag = buf.clone();
        bad_tag[4] = b'?';
        assert!(matches!(read_field(&bad_tag[..]), Err(Error::Format(_))));
        assert!(matches!(read_field(&buf[..buf.len() - 1]), Err(Error::Format(_))));
        assert!(matches!(read_field(&buf[..10]), Err(Error::Format(_))));
    }

    #[test]
    fn float_format_round_trips() {
        for x in [0.0, -0.0, 1.0, 1e-300, 1.234_567_890_123_456_7, 6.02e23, f64::MIN_POSITIVE] {
            assert_eq!(fmt_f64(x).parse::<f64>().unwrap().to_bits(), x.to_bits());
        }
    }

    #[test]
    fn text_report_aligns_values() {
        let mut t = TextReport::new("demo");
        t.line("a", 1).line("longer", 2);
        let s = t.to_string();
        assert_eq!(s, "demo\n  a       1\n  longer  2\n");
    }
}
