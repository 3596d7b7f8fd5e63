//! CSV emission with fixed 17-significant-digit formatting, so round-off
//! level claims survive serialization and repeated runs produce identical
//! bytes.

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::Path;

use crate::error::Result;
use crate::integrators::Trajectory;

pub fn fmt_float(v: f64) -> String {
    format!("{v:.16e}")
}

pub struct CsvWriter {
    out: BufWriter<File>,
}

impl CsvWriter {
    pub fn create(path: &Path) -> Result<Self> {
        Ok(CsvWriter {
            out: BufWriter::new(File::create(path)?),
        })
    }

    pub fn row<I, S>(&mut self, cells: I) -> Result<()>
    where
        I: IntoIterator<Item = S>,
        S: AsRef<str>,
    {
        let mut first = true;
        for c in cells {
            if !first {
                self.out.write_all(b",")?;
            }
            self.out.write_all(c.as_ref().as_bytes())?;
            first = false;
        }
        self.out.write_all(b"\n")?;
        Ok(())
    }

    pub fn finish(mut self) -> Result<()> {
        self.out.flush()?;
        Ok(())
    }
}

/// Trace file: t, state components, then the listed channels. Rows a channel
/// does not cover (windowed energies, per-step residuals) are left empty.
pub fn write_trace(
    path: &Path,
    traj: &Trajectory<f64>,
    channel_names: &[String],
    stride: usize,
) -> Result<()> {
    let mut w = CsvWriter::create(path)?;
    let dim = traj.states.first().map(|s| s.len()).unwrap_or(0);
    let mut header = vec!["t".to_string()];
    header.extend((0..dim).map(|i| format!("y{i}")));
    header.extend(channel_names.iter().cloned());
    w.row(&header)?;
    let channels: Vec<_> = channel_names
        .iter()
        .map(|n| traj.channel(n))
        .collect();
    for row in (0..traj.len()).step_by(stride.max(1)) {
        let mut cells = Vec::with_capacity(1 + dim + channels.len());
        cells.push(fmt_float(traj.times[row]));
        cells.extend(traj.states[row].iter().map(|&v| fmt_float(v)));
        for ch in &channels {
            cells.push(
                ch.and_then(|c| c.value_at_row(row))
                    .map(fmt_float)
                    .unwrap_or_default(),
            );
        }
        w.row(&cells)?;
    }
    w.finish()
}
