//! Finite-difference formulas on lines of samples and their application to
//! grid and profile charts.

use crate::surfaces::{GridChart, ProfileChart};

/// Accuracy class of a stencil evaluation.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub enum Accuracy {
    /// Fourth-order centred.
    High,
    /// Second-order centred.
    Centered,
    /// One-sided (rim) formula.
    OneSided,
}

/// First derivative from values at integer offsets along a line.
pub fn d1_line(at: impl Fn(i64) -> Option<f64>, h: f64) -> Option<(f64, Accuracy)> {
    let f0 = at(0)?;
    let (m2, m1, p1, p2) = (at(-2), at(-1), at(1), at(2));
    Some(match (m2, m1, p1, p2) {
        (Some(m2), Some(m1), Some(p1), Some(p2)) => ((m2 - 8.0 * m1 + 8.0 * p1 - p2) / (12.0 * h), Accuracy::High),
        (_, Some(m1), Some(p1), _) => ((p1 - m1) / (2.0 * h), Accuracy::Centered),
        (_, None, Some(p1), Some(p2)) => ((-3.0 * f0 + 4.0 * p1 - p2) / (2.0 * h), Accuracy::OneSided),
        (Some(m2), Some(m1), None, _) => ((3.0 * f0 - 4.0 * m1 + m2) / (2.0 * h), Accuracy::OneSided),
        _ => return None,
    })
}

/// Second derivative along a line.
pub fn d2_line(at: impl Fn(i64) -> Option<f64>, h: f64) -> Option<(f64, Accuracy)> {
    let f0 = at(0)?;
    let h2 = h * h;
    let (m2, m1, p1, p2) = (at(-2), at(-1), at(1), at(2));
    Some(match (m2, m1, p1, p2) {
        (Some(m2), Some(m1), Some(p1), Some(p2)) => (
            (-m2 + 16.0 * m1 - 30.0 * f0 + 16.0 * p1 - p2) / (12.0 * h2),
            Accuracy::High,
        ),
        (_, Some(m1), Some(p1), _) => ((m1 - 2.0 * f0 + p1) / h2, Accuracy::Centered),
        (_, None, Some(p1), Some(p2)) => {
            let p3 = at(3)?;
            ((2.0 * f0 - 5.0 * p1 + 4.0 * p2 - p3) / h2, Accuracy::OneSided)
        }
        (Some(m2), Some(m1), None, _) => {
            let m3 = at(-3)?;
            ((2.0 * f0 - 5.0 * m1 + 4.0 * m2 - m3) / h2, Accuracy::OneSided)
        }
        _ => return None,
    })
}

const OFFS: [i64; 4] = [-2, -1, 1, 2];
const W4: [f64; 4] = [1.0 / 12.0, -8.0 / 12.0, 8.0 / 12.0, -1.0 / 12.0];

/// Derivatives of a per-sample field on a grid chart.
pub struct GridDiff<'a> {
    pub chart: &'a GridChart,
}

impl<'a> GridDiff<'a> {
    pub fn d1(&self, f: &[f64], s: usize, axis: usize) -> Option<(f64, Accuracy)> {
        let h = self.chart.axes[axis].spacing;
        d1_line(|o| self.chart.neighbor(s, axis, o).map(|t| f[t]), h)
    }

    pub fn d2(&self, f: &[f64], s: usize, axis: usize) -> Option<(f64, Accuracy)> {
        let h = self.chart.axes[axis].spacing;
        d2_line(|o| self.chart.neighbor(s, axis, o).map(|t| f[t]), h)
    }

    /// Mixed derivative along two distinct axes: a fourth-order tensor
    /// stencil when the full 4x4 block exists, otherwise nested first
    /// differences.
    pub fn mixed(&self, f: &[f64], s: usize, a: usize, b: usize) -> Option<(f64, Accuracy)> {
        let ha = self.chart.axes[a].spacing;
        let hb = self.chart.axes[b].spacing;
        let mut acc = 0.0;
        let mut full = true;
        'outer: for (i, &oa) in OFFS.iter().enumerate() {
            for (j, &ob) in OFFS.iter().enumerate() {
                match self.chart.shifted(s, a, oa, b, ob) {
                    Some(t) => acc += W4[i] * W4[j] * f[t],
                    None => {
                        full = false;
                        break 'outer;
                    }
                }
            }
        }
        if full {
            return Some((acc / (ha * hb), Accuracy::High));
        }
        let mut worst = Accuracy::Centered;
        let inner = |o: i64| -> Option<f64> {
            let t = self.chart.neighbor(s, a, o)?;
            self.d1(f, t, b).map(|(v, _)| v)
        };
        let (v, acc1) = d1_line(inner, ha)?;
        worst = worst.max(acc1);
        Some((v, worst.max(Accuracy::Centered)))
    }
}

/// Derivatives along the radial node line of a profile chart. Values at
/// negative nodes come from reflection: even for ordinary fields, odd for
/// slopes.
pub struct ProfileDiff<'a> {
    pub chart: &'a ProfileChart,
}

impl<'a> ProfileDiff<'a> {
    fn line<'b>(&'b self, f: &'b [f64], node: usize, odd: bool) -> impl Fn(i64) -> Option<f64> + 'b {
        let chart = self.chart;
        move |o: i64| {
            let m = node as i64 + o;
            let s = chart.sample_of_node(m.unsigned_abs() as usize)?;
            let v = f[s];
            Some(if odd && m < 0 { -v } else { v })
        }
    }

    pub fn d1(&self, f: &[f64], node: usize, odd: bool) -> Option<(f64, Accuracy)> {
        d1_line(self.line(f, node, odd), self.chart.spacing)
    }

    pub fn d2(&self, f: &[f64], node: usize, odd: bool) -> Option<(f64, Accuracy)> {
        d2_line(self.line(f, node, odd), self.chart.spacing)
    }
}

/// Derivative of an array indexed by every profile node (not only sampled
/// ones).
pub fn node_d1(vals: &[f64], node: usize, h: f64, odd: bool) -> Option<(f64, Accuracy)> {
    d1_line(
        |o| {
            let m = node as i64 + o;
            let v = *vals.get(m.unsigned_abs() as usize)?;
            Some(if odd && m < 0 { -v } else { v })
        },
        h,
    )
}
