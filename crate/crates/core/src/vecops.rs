//! Small helpers for ambient vectors stored as plain slices.

pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub fn norm(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

pub fn norm2(a: &[f64]) -> f64 {
    dot(a, a)
}

pub fn sub(a: &[f64], b: &[f64]) -> Vec<f64> {
    a.iter().zip(b).map(|(x, y)| x - y).collect()
}

pub fn add(a: &[f64], b: &[f64]) -> Vec<f64> {
    a.iter().zip(b).map(|(x, y)| x + y).collect()
}

pub fn scale(a: &[f64], s: f64) -> Vec<f64> {
    a.iter().map(|x| x * s).collect()
}

/// `y += s * x`
pub fn axpy(y: &mut [f64], s: f64, x: &[f64]) {
    for (yi, xi) in y.iter_mut().zip(x) {
        *yi += s * xi;
    }
}

pub fn unit(dim: usize, i: usize) -> Vec<f64> {
    let mut e = vec![0.0; dim];
    e[i] = 1.0;
    e
}

pub fn dist(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum::<f64>().sqrt()
}

/// Orthonormal basis of the complement of `v` (assumed nonzero), built by
/// Gram-Schmidt over the standard basis.
pub fn orthonormal_complement(v: &[f64]) -> Vec<Vec<f64>> {
    let dim = v.len();
    let vn = scale(v, 1.0 / norm(v));
    let mut basis: Vec<Vec<f64>> = Vec::with_capacity(dim - 1);
    // Standard vectors ordered by how little they overlap with v.
    let mut order: Vec<usize> = (0..dim).collect();
    order.sort_by(|&a, &b| vn[a].abs().partial_cmp(&vn[b].abs()).unwrap());
    for &i in &order {
        if basis.len() == dim - 1 {
            break;
        }
        let mut w = unit(dim, i);
        let c = dot(&w, &vn);
        axpy(&mut w, -c, &vn);
        for b in &basis {
            let c = dot(&w, b);
            axpy(&mut w, -c, b);
        }
        let len = norm(&w);
        if len > 1e-8 {
            basis.push(scale(&w, 1.0 / len));
        }
    }
    // Keep the standard ordering when v is a coordinate axis.
    basis.sort_by(|a, b| {
        let ia = a.iter().position(|x| x.abs() > 0.5).unwrap_or(dim);
        let ib = b.iter().position(|x| x.abs() > 0.5).unwrap_or(dim);
        ia.cmp(&ib)
    });
    basis
}

/// Volume of the unit ball in R^n.
pub fn unit_ball_volume(n: usize) -> f64 {
    match n {
        0 => 1.0,
        1 => 2.0,
        _ => unit_ball_volume(n - 2) * 2.0 * std::f64::consts::PI / n as f64,
    }
}

/// Area of the unit sphere S^m ⊂ R^{m+1}.
pub fn unit_sphere_area(m: usize) -> f64 {
    (m + 1) as f64 * unit_ball_volume(m + 1)
}
