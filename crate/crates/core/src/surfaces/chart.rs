//! Structured chart descriptors: n-dimensional parameter grids (optionally
//! with collapsed pole rows) and one-dimensional rotational profiles.

use std::collections::HashMap;

use serde::{Deserialize, Serialize};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GridAxis {
    pub start: f64,
    pub spacing: f64,
    pub count: usize,
    pub periodic: bool,
}

impl GridAxis {
    pub fn coord(&self, k: i64) -> f64 {
        self.start + k as f64 * self.spacing
    }
}

/// How lattice indices past the ends of an axis are identified.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Topology {
    /// Each axis is open or periodic on its own.
    Box,
    /// Two-dimensional latitude/longitude vertex grid. Axis 0 is the polar
    /// angle including both poles; its first and last rows collapse to single
    /// samples. Axis 1 is a periodic longitude with an even node count.
    LatLong,
    /// Hyperspherical angles: axes `0..polar` are cell-centred polar angles
    /// on (0, pi), axis `polar` is a periodic azimuth with an even node
    /// count, any further axes are independent.
    Polar { polar: usize },
}

#[derive(Clone, Debug, Serialize, Deserialize)]
struct GridChartData {
    axes: Vec<GridAxis>,
    topology: Topology,
    nodes: Vec<u64>,
}

/// Parameter-space grid. Sample `s` sits at lattice node `nodes[s]`
/// (row-major, first axis slowest). Lattice nodes without a sample are
/// outside the sampled region.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(from = "GridChartData", into = "GridChartData")]
pub struct GridChart {
    pub axes: Vec<GridAxis>,
    pub topology: Topology,
    pub nodes: Vec<u64>,
    lookup: HashMap<u64, usize>,
}

impl From<GridChartData> for GridChart {
    fn from(d: GridChartData) -> Self {
        GridChart::new(d.axes, d.topology, d.nodes)
    }
}

impl From<GridChart> for GridChartData {
    fn from(g: GridChart) -> Self {
        GridChartData {
            axes: g.axes,
            topology: g.topology,
            nodes: g.nodes,
        }
    }
}

impl PartialEq for GridChart {
    fn eq(&self, other: &Self) -> bool {
        self.axes == other.axes && self.topology == other.topology && self.nodes == other.nodes
    }
}

impl GridChart {
    pub fn new(axes: Vec<GridAxis>, topology: Topology, nodes: Vec<u64>) -> Self {
        let lookup = nodes.iter().enumerate().map(|(s, &l)| (l, s)).collect();
        GridChart {
            axes,
            topology,
            nodes,
            lookup,
        }
    }

    pub fn dim(&self) -> usize {
        self.axes.len()
    }

    pub fn lattice_len(&self) -> u64 {
        self.axes.iter().map(|a| a.count as u64).product()
    }

    pub fn linear(&self, idx: &[i64]) -> u64 {
        let mut lin = 0u64;
        for (a, &i) in self.axes.iter().zip(idx) {
            lin = lin * a.count as u64 + i as u64;
        }
        lin
    }

    pub fn multi(&self, mut lin: u64) -> Vec<i64> {
        let mut idx = vec![0i64; self.axes.len()];
        for (d, a) in self.axes.iter().enumerate().rev() {
            idx[d] = (lin % a.count as u64) as i64;
            lin /= a.count as u64;
        }
        idx
    }

    /// Canonical in-range lattice index, or `None` when the index leaves an
    /// open axis.
    pub fn normalize(&self, idx: &[i64]) -> Option<Vec<i64>> {
        let mut out = idx.to_vec();
        match self.topology {
            Topology::Box => {}
            Topology::LatLong => {
                let last = self.axes[0].count as i64 - 1;
                let nphi = self.axes[1].count as i64;
                let mut j = out[0];
                if j < 0 {
                    j = -j;
                    out[1] += nphi / 2;
                } else if j > last {
                    j = 2 * last - j;
                    out[1] += nphi / 2;
                }
                if j < 0 || j > last {
                    return None;
                }
                out[0] = j;
                if j == 0 || j == last {
                    out[1] = 0;
                }
            }
            Topology::Polar { polar } => {
                let naz = self.axes[polar].count as i64;
                for d in 0..polar {
                    let c = self.axes[d].count as i64;
                    let j = out[d];
                    let r = if j < 0 {
                        -1 - j
                    } else if j >= c {
                        2 * c - 1 - j
                    } else {
                        continue;
                    };
                    if r < 0 || r >= c {
                        return None;
                    }
                    // Crossing a polar end maps the remaining angles to the
                    // antipode of the smaller sphere.
                    out[d] = r;
                    for e in d + 1..polar {
                        out[e] = self.axes[e].count as i64 - 1 - out[e];
                    }
                    out[polar] += naz / 2;
                }
            }
        }
        for (d, a) in self.axes.iter().enumerate() {
            let c = a.count as i64;
            if a.periodic {
                out[d] = out[d].rem_euclid(c);
            } else if out[d] < 0 || out[d] >= c {
                return None;
            }
        }
        Some(out)
    }

    pub fn sample_at(&self, idx: &[i64]) -> Option<usize> {
        let idx = self.normalize(idx)?;
        self.lookup.get(&self.linear(&idx)).copied()
    }

    pub fn index_of(&self, sample: usize) -> Vec<i64> {
        self.multi(self.nodes[sample])
    }

    pub fn neighbor(&self, sample: usize, axis: usize, offset: i64) -> Option<usize> {
        let mut idx = self.index_of(sample);
        idx[axis] += offset;
        self.sample_at(&idx)
    }

    /// Sample reached by moving `oa` steps along axis `a` and `ob` along `b`.
    pub fn shifted(&self, sample: usize, a: usize, oa: i64, b: usize, ob: i64) -> Option<usize> {
        let mut idx = self.index_of(sample);
        idx[a] += oa;
        idx[b] += ob;
        self.sample_at(&idx)
    }

    pub fn params(&self, sample: usize) -> Vec<f64> {
        self.params_of(&self.index_of(sample))
    }

    pub fn params_of(&self, idx: &[i64]) -> Vec<f64> {
        self.axes.iter().zip(idx).map(|(a, &i)| a.coord(i)).collect()
    }

    pub fn is_pole(&self, sample: usize) -> bool {
        if self.topology != Topology::LatLong {
            return false;
        }
        let j = self.index_of(sample)[0];
        j == 0 || j == self.axes[0].count as i64 - 1
    }

    /// True when every lattice neighbor in the 3^n block around the sample is
    /// present.
    pub fn has_full_neighborhood(&self, sample: usize) -> bool {
        let base = self.index_of(sample);
        if self.is_pole(sample) {
            // Pole neighborhood: the first two rings.
            let j = base[0];
            let dir = if j == 0 { 1 } else { -1 };
            let nphi = self.axes[1].count as i64;
            return (1..=2).all(|r| (0..nphi).all(|k| self.sample_at(&[j + dir * r, k]).is_some()));
        }
        let n = base.len();
        let total = 3usize.pow(n as u32);
        let mut idx = vec![0i64; n];
        for code in 0..total {
            let mut c = code;
            for d in 0..n {
                idx[d] = base[d] + (c % 3) as i64 - 1;
                c /= 3;
            }
            if self.sample_at(&idx).is_none() {
                return false;
            }
        }
        true
    }

    /// Restrict to the given samples (in order); returns the new chart.
    pub fn restrict(&self, keep: &[usize]) -> GridChart {
        GridChart::new(
            self.axes.clone(),
            self.topology,
            keep.iter().map(|&s| self.nodes[s]).collect(),
        )
    }

    /// Lower-corner multi-indices of every lattice cell.
    pub fn cell_corners(&self) -> Vec<Vec<i64>> {
        let n = self.dim();
        let ranges: Vec<i64> = self
            .axes
            .iter()
            .map(|a| if a.periodic { a.count as i64 } else { a.count as i64 - 1 })
            .collect();
        let total: i64 = ranges.iter().product();
        let mut out = Vec::with_capacity(total.max(0) as usize);
        for code in 0..total {
            let mut c = code;
            let mut idx = vec![0i64; n];
            for d in (0..n).rev() {
                idx[d] = c % ranges[d];
                c /= ranges[d];
            }
            out.push(idx);
        }
        out
    }
}

/// Which way the unit normal of a rotational profile points relative to the
/// axis e_{n+1} near the tip.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ProfileOrientation {
    /// n = (-u' e_r + e_{n+1}) / W
    Up,
    /// n = (u' e_r - e_{n+1}) / W
    Down,
}

/// Rotationally symmetric hypersurface x_{n+1} = u(|p|) sampled along one
/// meridian; each sample stands for its whole S^{n-1} orbit.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ProfileChart {
    pub spacing: f64,
    /// Heights at radial nodes r_i = i * spacing.
    pub u: Vec<f64>,
    /// Slopes u'(r_i).
    pub du: Vec<f64>,
    pub orientation: ProfileOrientation,
    /// Radial node index of each sample.
    pub nodes: Vec<u64>,
}

impl ProfileChart {
    pub fn radius(&self, node: usize) -> f64 {
        node as f64 * self.spacing
    }

    pub fn node_count(&self) -> usize {
        self.u.len()
    }

    pub fn sample_of_node(&self, node: usize) -> Option<usize> {
        // Samples are kept sorted by node.
        self.nodes.binary_search(&(node as u64)).ok()
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Chart {
    Grid(GridChart),
    Profile(ProfileChart),
}
