//! Artifact formats: trajectory CSV (plus an auxiliary CSV with the
//! certified sup bound and the exact Dirichlet rate), per-time convergence
//! flags and binary field snapshots. Files are written atomically.

use std::fs;
use std::io::Write as _;
use std::path::{Path, PathBuf};

use num_complex::Complex64;

use crate::dynamics::Trajectory;
use crate::error::{Error, Result};
use crate::field::{FourierField, NormBundle, SpectralField};

pub const TRAJECTORY_HEADER: &str = "t,l2,dirichlet,laplacian_l2,sup,vt_l2";
pub const AUX_HEADER: &str = "t,sup_bound,dirichlet_rate";
pub const FLAGS_HEADER: &str = "t,converged";
const SNAPSHOT_MAGIC: &[u8; 4] = b"NSLF";
const SNAPSHOT_VERSION: u32 = 1;

/// Full-precision rendering (17 significant digits).
pub fn fmt_f64(x: f64) -> String {
    format!("{x:.16e}")
}

/// Write `bytes` to `path` via a temporary sibling and a rename.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> Result<()> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        fs::create_dir_all(dir)?;
    }
    let mut tmp: PathBuf = path.to_path_buf();
    let mut name = path.file_name().map(|n| n.to_os_string()).unwrap_or_default();
    name.push(".tmp");
    tmp.set_file_name(name);
    {
        let mut f = fs::File::create(&tmp)?;
        f.write_all(bytes)?;
        f.sync_all()?;
    }
    fs::rename(&tmp, path)?;
    Ok(())
}

pub fn trajectory_csv(traj: &Trajectory) -> String {
    let mut s = String::with_capacity(64 * (traj.len() + 1));
    s.push_str(TRAJECTORY_HEADER);
    s.push('\n');
    for sample in &traj.samples {
        let n = &sample.norms;
        let vt = n.vt_l2.map(fmt_f64).unwrap_or_default();
        s.push_str(&format!(
            "{},{},{},{},{},{}\n",
            fmt_f64(n.t),
            fmt_f64(n.l2),
            fmt_f64(n.dirichlet),
            fmt_f64(n.laplacian_l2),
            fmt_f64(n.sup),
            vt
        ));
    }
    s
}

pub fn aux_csv(traj: &Trajectory) -> String {
    let mut s = String::from(AUX_HEADER);
    s.push('\n');
    for sample in &traj.samples {
        let rate = sample.dirichlet_rate.map(fmt_f64).unwrap_or_default();
        s.push_str(&format!("{},{},{}\n", fmt_f64(sample.norms.t), fmt_f64(sample.norms.sup_bound), rate));
    }
    s
}

fn parse_rows(text: &str, header: &str, what: &str) -> Result<Vec<(usize, Vec<Option<f64>>)>> {
    let mut lines = text.lines().enumerate().filter(|(_, l)| !l.trim().is_empty());
    match lines.next() {
        Some((_, h)) if h.trim() == header => {}
        Some((_, h)) => {
            return Err(Error::Parse(format!("{what}: expected header `{header}`, found `{}`", h.trim())))
        }
        None => return Err(Error::Parse(format!("{what}: empty file"))),
    }
    let width = header.split(',').count();
    let mut rows = Vec::new();
    let mut last_t = f64::NEG_INFINITY;
    for (i, line) in lines {
        let lineno = i + 1;
        let cells: Vec<&str> = line.split(',').map(str::trim).collect();
        if cells.len() != width {
            return Err(Error::Parse(format!(
                "{what} line {lineno}: expected {width} columns, found {}",
                cells.len()
            )));
        }
        let mut vals = Vec::with_capacity(width);
        for (c, cell) in cells.iter().enumerate() {
            if cell.is_empty() {
                vals.push(None);
                continue;
            }
            let v: f64 = cell
                .parse()
                .map_err(|_| Error::Parse(format!("{what} line {lineno}, column {}: bad number `{cell}`", c + 1)))?;
            if !v.is_finite() {
                return Err(Error::Parse(format!("{what} line {lineno}: non-finite value `{cell}`")));
            }
            vals.push(Some(v));
        }
        let t = vals[0].ok_or_else(|| Error::Parse(format!("{what} line {lineno}: missing time")))?;
        if !(t > last_t) {
            return Err(Error::Parse(format!(
                "{what} line {lineno}: time {t} does not increase (previous {last_t})"
            )));
        }
        last_t = t;
        rows.push((lineno, vals));
    }
    Ok(rows)
}

/// Parse a trajectory CSV. Times must increase strictly.
pub fn parse_trajectory_csv(text: &str) -> Result<Trajectory> {
    let rows = parse_rows(text, TRAJECTORY_HEADER, "trajectory")?;
    let mut norms = Vec::with_capacity(rows.len());
    for (lineno, v) in rows {
        let need = |i: usize| {
            v[i].ok_or_else(|| Error::Parse(format!("trajectory line {lineno}: missing column {}", i + 1)))
        };
        let lap = need(3)?;
        let sup = need(4)?;
        norms.push(NormBundle {
            t: need(0)?,
            l2: need(1)?,
            dirichlet: need(2)?,
            laplacian_l2: lap,
            d2_l2: lap,
            sup,
            sup_bound: sup,
            vt_l2: v[5],
        });
    }
    Ok(Trajectory::from_norms(norms))
}

/// Merge an auxiliary CSV into a parsed trajectory (same sample times).
pub fn merge_aux_csv(traj: &mut Trajectory, text: &str) -> Result<()> {
    let rows = parse_rows(text, AUX_HEADER, "aux")?;
    if rows.len() != traj.len() {
        return Err(Error::GridMismatch(format!("aux has {} rows for {} samples", rows.len(), traj.len())));
    }
    for ((lineno, v), s) in rows.into_iter().zip(&mut traj.samples) {
        let t = v[0].unwrap_or(f64::NAN);
        if (t - s.norms.t).abs() > 1e-12 * (1.0 + t.abs()) {
            return Err(Error::GridMismatch(format!("aux line {lineno}: time {t} vs {}", s.norms.t)));
        }
        if let Some(b) = v[1] {
            s.norms.sup_bound = b;
        }
        s.dirichlet_rate = v[2];
    }
    Ok(())
}

/// Read `path` and, when present, its auxiliary file [`aux_path`].
pub fn read_trajectory(path: &Path) -> Result<Trajectory> {
    let text = fs::read_to_string(path)?;
    let mut traj = parse_trajectory_csv(&text)?;
    let aux = aux_path(path);
    if aux.exists() {
        merge_aux_csv(&mut traj, &fs::read_to_string(aux)?)?;
    }
    Ok(traj)
}

/// `dir/name.csv` -> `dir/name.aux.csv`.
pub fn aux_path(path: &Path) -> PathBuf {
    let stem = path.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default();
    path.with_file_name(format!("{stem}.aux.csv"))
}

pub fn write_trajectory(path: &Path, traj: &Trajectory) -> Result<()> {
    write_atomic(path, trajectory_csv(traj).as_bytes())?;
    write_atomic(&aux_path(path), aux_csv(traj).as_bytes())
}

pub fn flags_csv(times: &[f64], flags: &[bool]) -> String {
    let mut s = String::from(FLAGS_HEADER);
    s.push('\n');
    for (t, f) in times.iter().zip(flags) {
        s.push_str(&format!("{},{}\n", fmt_f64(*t), u8::from(*f)));
    }
    s
}

pub fn parse_flags_csv(text: &str) -> Result<(Vec<f64>, Vec<bool>)> {
    let rows = parse_rows(text, FLAGS_HEADER, "flags")?;
    let mut times = Vec::with_capacity(rows.len());
    let mut flags = Vec::with_capacity(rows.len());
    for (lineno, v) in rows {
        times.push(v[0].unwrap_or(f64::NAN));
        flags.push(match v[1] {
            Some(0.0) => false,
            Some(1.0) => true,
            _ => return Err(Error::Parse(format!("flags line {lineno}: flag must be 0 or 1"))),
        });
    }
    Ok((times, flags))
}

/// Align convergence flags with a trajectory's samples. Samples beyond the
/// flagged span, or at times with no flag, are invalid.
pub fn align_flags(traj: &Trajectory, times: &[f64], flags: &[bool]) -> Vec<bool> {
    let mut out = Vec::with_capacity(traj.len());
    let mut k = 0;
    for t in traj.times() {
        while k < times.len() && times[k] < t - 1e-12 * (1.0 + t.abs()) {
            k += 1;
        }
        out.push(k < times.len() && (times[k] - t).abs() <= 1e-12 * (1.0 + t.abs()) && flags[k]);
    }
    out
}

/// Binary snapshot: magic `NSLF`, then little-endian `u32` version, `u32`
/// resolution `N`, `f64` time, `u32` tag length and the UTF-8 scheme tag,
/// followed by every mode `k` with `-N/2 < k_i <= N/2` in lexicographic
/// `(k1, k2, k3)` order as six `f64` (re, im of each component).
pub fn encode_snapshot(field: &SpectralField, time: f64, tag: &str) -> Vec<u8> {
    let n = field.resolution();
    let mut out = Vec::with_capacity(24 + tag.len() + 48 * n * n * n);
    out.extend_from_slice(SNAPSHOT_MAGIC);
    out.extend_from_slice(&SNAPSHOT_VERSION.to_le_bytes());
    out.extend_from_slice(&(n as u32).to_le_bytes());
    out.extend_from_slice(&time.to_le_bytes());
    out.extend_from_slice(&(tag.len() as u32).to_le_bytes());
    out.extend_from_slice(tag.as_bytes());
    for k in lexicographic_modes(n) {
        for z in field.get(k) {
            out.extend_from_slice(&z.re.to_le_bytes());
            out.extend_from_slice(&z.im.to_le_bytes());
        }
    }
    out
}

pub fn decode_snapshot(bytes: &[u8]) -> Result<(SpectralField, f64, String)> {
    let bad = |m: &str| Error::Parse(format!("snapshot: {m}"));
    let mut pos = 0usize;
    let mut take = |len: usize| -> Result<&[u8]> {
        let s = bytes.get(pos..pos + len).ok_or_else(|| bad("truncated"))?;
        pos += len;
        Ok(s)
    };
    if take(4)? != SNAPSHOT_MAGIC {
        return Err(bad("bad magic"));
    }
    let u32_at = |b: &[u8]| u32::from_le_bytes(b.try_into().expect("4 bytes"));
    let f64_at = |b: &[u8]| f64::from_le_bytes(b.try_into().expect("8 bytes"));
    let version = u32_at(take(4)?);
    if version != SNAPSHOT_VERSION {
        return Err(bad(&format!("unsupported version {version}")));
    }
    let n = u32_at(take(4)?) as usize;
    let time = f64_at(take(8)?);
    let tag_len = u32_at(take(4)?) as usize;
    let tag = String::from_utf8(take(tag_len)?.to_vec()).map_err(|_| bad("tag is not UTF-8"))?;
    let mut f = FourierField::zeros(n)?;
    for k in lexicographic_modes(n) {
        let raw = take(48)?;
        let v: [Complex64; 3] = std::array::from_fn(|c| {
            Complex64::new(f64_at(&raw[16 * c..16 * c + 8]), f64_at(&raw[16 * c + 8..16 * c + 16]))
        });
        f.set(k, v)?;
    }
    if take(1).is_ok() {
        return Err(bad("trailing bytes"));
    }
    Ok((SpectralField::from_raw(f), time, tag))
}

fn lexicographic_modes(n: usize) -> impl Iterator<Item = [i64; 3]> {
    let h = (n / 2) as i64;
    (1 - h..=h).flat_map(move |a| (1 - h..=h).flat_map(move |b| (1 - h..=h).map(move |c| [a, b, c])))
}
