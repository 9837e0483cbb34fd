use super::TimeGrid;
use crate::stats::{self, MeanEstimate};
use crate::{Error, Result};
use serde::{Deserialize, Serialize};
use std::io::Write;

/// Simulated trajectories on a shared grid, stored path-major.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "PathSetRepr", into = "PathSetRepr")]
pub struct PathSet {
    grid: TimeGrid,
    values: Vec<f64>,
    n_paths: usize,
    seed: u64,
    label: String,
}

#[derive(Serialize, Deserialize)]
struct PathSetRepr {
    times: Vec<f64>,
    values: Vec<Vec<f64>>,
    seed: u64,
    label: String,
}

impl PathSet {
    /// Builds from path-major rows; every row must have one value per grid time.
    pub fn from_rows(grid: TimeGrid, rows: Vec<Vec<f64>>, seed: u64, label: impl Into<String>) -> Result<Self> {
        let n_times = grid.len();
        let n_paths = rows.len();
        let mut values = Vec::with_capacity(n_paths * n_times);
        for (p, row) in rows.into_iter().enumerate() {
            if row.len() != n_times {
                return Err(Error::Domain(format!("path {p} has {} values, grid has {n_times}", row.len())));
            }
            if let Some((k, v)) = row.iter().enumerate().find(|(_, v)| !v.is_finite()) {
                return Err(Error::PathNumeric { path: p, step: k, value: *v });
            }
            values.extend(row);
        }
        Ok(Self { grid, values, n_paths, seed, label: label.into() })
    }

    pub fn grid(&self) -> &TimeGrid {
        &self.grid
    }

    pub fn times(&self) -> &[f64] {
        self.grid.times()
    }

    pub fn n_paths(&self) -> usize {
        self.n_paths
    }

    pub fn n_times(&self) -> usize {
        self.grid.len()
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn path(&self, i: usize) -> &[f64] {
        let n = self.n_times();
        &self.values[i * n..(i + 1) * n]
    }

    pub fn paths(&self) -> impl Iterator<Item = &[f64]> {
        self.values.chunks_exact(self.n_times())
    }

    pub fn value(&self, path: usize, time_index: usize) -> f64 {
        self.values[path * self.n_times() + time_index]
    }

    /// Cross-section of all paths at one grid index.
    pub fn column(&self, time_index: usize) -> Vec<f64> {
        self.paths().map(|p| p[time_index]).collect()
    }

    pub fn terminal(&self) -> Vec<f64> {
        self.column(self.n_times() - 1)
    }

    pub fn mean_at(&self, time_index: usize) -> MeanEstimate {
        MeanEstimate::of(&self.column(time_index))
    }

    /// Sample means and standard errors at every grid time.
    pub fn time_profile(&self) -> Vec<MeanEstimate> {
        (0..self.n_times()).map(|k| self.mean_at(k)).collect()
    }

    /// Smallest and largest value visited by any path.
    pub fn range(&self) -> (f64, f64) {
        self.values.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &v| (lo.min(v), hi.max(v)))
    }

    pub fn variance_at(&self, time_index: usize) -> f64 {
        stats::variance(&self.column(time_index))
    }

    /// CSV with header `t,path_0,...` and one row per grid time.
    pub fn write_csv<W: Write>(&self, mut w: W) -> Result<()> {
        write!(w, "t")?;
        for p in 0..self.n_paths {
            write!(w, ",path_{p}")?;
        }
        writeln!(w)?;
        for (k, t) in self.times().iter().enumerate() {
            write!(w, "{}", fmt17(*t))?;
            for p in 0..self.n_paths {
                write!(w, ",{}", fmt17(self.value(p, k)))?;
            }
            writeln!(w)?;
        }
        Ok(())
    }

    pub fn to_json(&self) -> Result<String> {
        serde_json::to_string(self).map_err(|e| Error::Parse(e.to_string()))
    }

    pub fn from_json(s: &str) -> Result<Self> {
        serde_json::from_str(s).map_err(|e| Error::Parse(e.to_string()))
    }
}

/// Round-trippable decimal formatting with 17 significant digits.
pub fn fmt17(x: f64) -> String {
    format!("{x:.16e}")
}

impl TryFrom<PathSetRepr> for PathSet {
    type Error = Error;
    fn try_from(r: PathSetRepr) -> Result<Self> {
        PathSet::from_rows(TimeGrid::new(r.times)?, r.values, r.seed, r.label)
    }
}

impl From<PathSet> for PathSetRepr {
    fn from(p: PathSet) -> Self {
        let values = p.paths().map(<[f64]>::to_vec).collect();
        PathSetRepr { times: p.grid.times().to_vec(), values, seed: p.seed, label: p.label }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample() -> PathSet {
        let g = TimeGrid::new(vec![0.0, 0.5, 1.0]).unwrap();
        PathSet::from_rows(g, vec![vec![1.0, 2.0, 3.0], vec![1.0, 0.0, -1.0]], 9, "demo").unwrap()
    }

    #[test]
    fn accessors() {
        let p = sample();
        assert_eq!(p.column(1), vec![2.0, 0.0]);
        assert_eq!(p.terminal(), vec![3.0, -1.0]);
        assert_eq!(p.range(), (-1.0, 3.0));
        assert_eq!(p.mean_at(2).mean, 1.0);
    }

    #[test]
    fn rejects_bad_rows() {
        let g = TimeGrid::new(vec![0.0, 1.0]).unwrap();
        assert!(PathSet::from_rows(g.clone(), vec![vec![1.0]], 0, "").is_err());
        let e = PathSet::from_rows(g, vec![vec![1.0, 1.0], vec![1.0, f64::NAN]], 0, "").unwrap_err();
        assert!(matches!(e, Error::PathNumeric { path: 1, step: 1, .. }));
    }

    #[test]
    fn csv_and_json_round_trip() {
        let p = sample();
        let mut buf = Vec::new();
        p.write_csv(&mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let mut lines = text.lines();
        assert_eq!(lines.next(), Some("t,path_0,path_1"));
        let row: Vec<f64> = lines.nth(2).unwrap().split(',').map(|s| s.parse().unwrap()).collect();
        assert_eq!(row, vec![1.0, 3.0, -1.0]);
        let back = PathSet::from_json(&p.to_json().unwrap()).unwrap();
        assert_eq!(back, p);
        let v: serde_json::Value = serde_json::from_str(&p.to_json().unwrap()).unwrap();
        assert_eq!(v["seed"], 9);
        assert_eq!(v["label"], "demo");
    }

    #[test]
    fn fmt17_round_trips() {
        for x in [0.1, 1.0 / 3.0, std::f64::consts::PI * 1e-300, -2.5e17] {
            assert_eq!(fmt17(x).parse::<f64>().unwrap(), x);
        }
    }
}
