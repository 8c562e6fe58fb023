//! Flat CSV outputs: proxy summaries and attack trajectories.

use std::io::Write;

use crate::adversary::TrajectoryPoint;
use crate::error::Result;

/// `owner,proxy,count` rows, optionally prefixed with a `seed` column.
pub fn write_proxy_summary_csv<W: Write>(
    out: W,
    rows: &[(usize, usize, u64)],
    seed: Option<u64>,
) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    match seed {
        Some(_) => w.write_record(["seed", "owner", "proxy", "count"])?,
        None => w.write_record(["owner", "proxy", "count"])?,
    }
    for &(owner, proxy, count) in rows {
        let fields = [owner.to_string(), proxy.to_string(), count.to_string()];
        match seed {
            Some(s) => w.write_record(std::iter::once(s.to_string()).chain(fields))?,
            None => w.write_record(fields)?,
        }
    }
    w.flush()?;
    Ok(())
}

/// `observation_index,candidate_count` rows.
pub fn write_trajectory_csv<W: Write>(out: W, trajectory: &[TrajectoryPoint]) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["observation_index", "candidate_count"])?;
    for point in trajectory {
        w.write_record([point.observation_index.to_string(), point.candidate_count.to_string()])?;
    }
    w.flush()?;
    Ok(())
}
