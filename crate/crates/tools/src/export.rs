//! Trajectory export. Values use the shortest representation that parses
//! back to the same `f64`.

use anyhow::Result;
use crn_core::simulate::Trajectory;

use crate::report::TrajectoryJson;

/// CSV with header `t,x1..xn`. With more than one run a leading `run`
/// column tells them apart.
pub fn trajectories_csv(runs: &[Trajectory]) -> Result<Vec<u8>> {
    let n = runs.first().map_or(0, |t| t.states[0].len());
    let multi = runs.len() > 1;
    let mut w = csv::Writer::from_writer(Vec::new());
    let mut header: Vec<String> = Vec::with_capacity(n + 2);
    if multi {
        header.push("run".into());
    }
    header.push("t".into());
    header.extend((1..=n).map(|i| format!("x{i}")));
    w.write_record(&header)?;
    for (r, traj) in runs.iter().enumerate() {
        for (t, x) in traj.times.iter().zip(&traj.states) {
            let mut row = Vec::with_capacity(n + 2);
            if multi {
                row.push(r.to_string());
            }
            row.push(format!("{t:?}"));
            row.extend(x.iter().map(|v| format!("{v:?}")));
            w.write_record(&row)?;
        }
    }
    Ok(w.into_inner().map_err(|e| e.into_error())?)
}

pub fn trajectories_json(species: Vec<String>, runs: &[Trajectory]) -> Result<Vec<u8>> {
    let mut bytes = serde_json::to_vec_pretty(&TrajectoryJson::new(species, runs))?;
    bytes.push(b'\n');
    Ok(bytes)
}
