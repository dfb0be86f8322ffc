//! Incremental convex hull in three dimensions.

use crate::error::{Error, Result};

pub type P3 = [f64; 3];

pub fn sub(a: &P3, b: &P3) -> P3 {
    [a[0] - b[0], a[1] - b[1], a[2] - b[2]]
}

pub fn cross(a: &P3, b: &P3) -> P3 {
    [a[1] * b[2] - a[2] * b[1], a[2] * b[0] - a[0] * b[2], a[0] * b[1] - a[1] * b[0]]
}

pub fn dot3(a: &P3, b: &P3) -> f64 {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
}

/// Triangulated boundary, faces oriented counter-clockwise seen from outside.
#[derive(Debug, Clone)]
pub struct Hull3 {
    pub points: Vec<P3>,
    pub faces: Vec<[usize; 3]>,
}

/// One planar facet of the hull: merged coplanar triangles.
#[derive(Debug, Clone)]
pub struct HullFacet {
    pub normal: P3,
    pub area: f64,
    pub offset: f64,
}

impl Hull3 {
    /// `(1/6) Σ det(a, b, c)` over faces.
    pub fn volume(&self) -> f64 {
        self.faces
            .iter()
            .map(|f| {
                let [a, b, c] = f.map(|i| self.points[i]);
                dot3(&a, &cross(&b, &c))
            })
            .sum::<f64>()
            / 6.0
    }

    /// Facets with unit outer normals, merging triangles whose normals agree
    /// to `1e-9`.
    pub fn facets(&self) -> Vec<HullFacet> {
        let mut out: Vec<HullFacet> = Vec::new();
        for f in &self.faces {
            let [a, b, c] = f.map(|i| self.points[i]);
            let nrm = cross(&sub(&b, &a), &sub(&c, &a));
            let len = dot3(&nrm, &nrm).sqrt();
            if len == 0.0 {
                continue;
            }
            let u = nrm.map(|x| x / len);
            let area = 0.5 * len;
            match out.iter_mut().find(|h| dot3(&h.normal, &u) > 1.0 - 1e-9) {
                Some(h) => h.area += area,
                None => out.push(HullFacet { normal: u, area, offset: dot3(&u, &a) }),
            }
        }
        out
    }
}

/// Convex hull of a point set with a nondegenerate (3-dimensional) span.
pub fn convex_hull_3d(points: &[P3]) -> Result<Hull3> {
    if points.len() < 4 {
        return Err(Error::Degenerate("hull needs at least four points".into()));
    }
    let scale = points.iter().flat_map(|p| p.iter()).fold(0.0f64, |m, x| m.max(x.abs()));
    let eps = 1e-11 * scale.max(f64::MIN_POSITIVE);
    let far = |from: &dyn Fn(&P3) -> f64| {
        (0..points.len())
            .max_by(|&i, &j| from(&points[i]).total_cmp(&from(&points[j])))
            .unwrap()
    };
    let i0 = 0;
    let i1 = far(&|p| dot3(&sub(p, &points[i0]), &sub(p, &points[i0])));
    let e = sub(&points[i1], &points[i0]);
    let i2 = far(&|p| {
        let c = cross(&e, &sub(p, &points[i0]));
        dot3(&c, &c)
    });
    let nrm = cross(&e, &sub(&points[i2], &points[i0]));
    let i3 = far(&|p| dot3(&nrm, &sub(p, &points[i0])).abs());
    let vol = dot3(&nrm, &sub(&points[i3], &points[i0]));
    if !(vol.abs() > 1e-12 * scale.powi(3)) {
        return Err(Error::Degenerate("points do not span three dimensions".into()));
    }
    let centre = [i0, i1, i2, i3]
        .iter()
        .fold([0.0; 3], |acc, &i| [acc[0] + points[i][0] / 4.0, acc[1] + points[i][1] / 4.0, acc[2] + points[i][2] / 4.0]);

    struct Face {
        v: [usize; 3],
        n: P3,
        d: f64,
        alive: bool,
    }
    let make = |v: [usize; 3]| -> Face {
        let [a, b, c] = v.map(|i| points[i]);
        let mut n = cross(&sub(&b, &a), &sub(&c, &a));
        let mut v = v;
        if dot3(&n, &sub(&centre, &a)) > 0.0 {
            v.swap(1, 2);
            n = n.map(|x| -x);
        }
        let len = dot3(&n, &n).sqrt();
        let n = n.map(|x| x / len);
        Face { v, n, d: dot3(&n, &points[v[0]]), alive: true }
    };
    let mut faces = vec![
        make([i0, i1, i2]),
        make([i0, i1, i3]),
        make([i0, i2, i3]),
        make([i1, i2, i3]),
    ];
    let initial = [i0, i1, i2, i3];
    for (pi, p) in points.iter().enumerate() {
        if initial.contains(&pi) {
            continue;
        }
        let visible: Vec<usize> = (0..faces.len())
            .filter(|&f| faces[f].alive && dot3(&faces[f].n, p) - faces[f].d > eps)
            .collect();
        if visible.is_empty() {
            continue;
        }
        let mut edges = std::collections::HashSet::new();
        for &f in &visible {
            let v = faces[f].v;
            for k in 0..3 {
                edges.insert((v[k], v[(k + 1) % 3]));
            }
        }
        let mut horizon: Vec<(usize, usize)> = edges.iter().copied().filter(|&(a, b)| !edges.contains(&(b, a))).collect();
        // set order is randomized per process; sort for reproducible output
        horizon.sort_unstable();
        for &f in &visible {
            faces[f].alive = false;
        }
        for (a, b) in horizon {
            let [pa, pb] = [points[a], points[b]];
            let n = cross(&sub(&pb, &pa), &sub(p, &pa));
            let len = dot3(&n, &n).sqrt();
            let n = n.map(|x| x / len);
            faces.push(Face { v: [a, b, pi], n, d: dot3(&n, &pa), alive: true });
        }
    }
    let faces: Vec<[usize; 3]> = faces.into_iter().filter(|f| f.alive).map(|f| f.v).collect();
    Ok(Hull3 { points: points.to_vec(), faces })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cube_points() -> Vec<P3> {
        let mut v = Vec::new();
        for i in 0..8 {
            v.push([(i & 1) as f64 - 0.5, ((i >> 1) & 1) as f64 - 0.5, ((i >> 2) & 1) as f64 - 0.5]);
        }
        v
    }

    #[test]
    fn cube_hull() {
        let h = convex_hull_3d(&cube_points()).unwrap();
        assert!((h.volume() - 1.0).abs() < 1e-14);
        let f = h.facets();
        assert_eq!(f.len(), 6);
        assert!(f.iter().all(|x| (x.area - 1.0).abs() < 1e-14 && (x.offset - 0.5).abs() < 1e-14));
    }

    #[test]
    fn interior_and_duplicate_points_ignored() {
        let mut p = cube_points();
        p.push([0.1, 0.0, -0.2]);
        p.push(p[3]);
        p.push([0.5, 0.0, 0.0]);
        let h = convex_hull_3d(&p).unwrap();
        assert!((h.volume() - 1.0).abs() < 1e-14);
        assert_eq!(h.facets().len(), 6);
    }

    #[test]
    fn octahedron() {
        let p = vec![
            [1.0, 0.0, 0.0],
            [-1.0, 0.0, 0.0],
            [0.0, 1.0, 0.0],
            [0.0, -1.0, 0.0],
            [0.0, 0.0, 1.0],
            [0.0, 0.0, -1.0],
        ];
        let h = convex_hull_3d(&p).unwrap();
        assert!((h.volume() - 4.0 / 3.0).abs() < 1e-14);
        assert_eq!(h.facets().len(), 8);
    }

    #[test]
    fn flat_input_rejected() {
        let p = vec![[0.0, 0.0, 0.0], [1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [1.0, 1.0, 0.0]];
        assert!(convex_hull_3d(&p).is_err());
    }
}
