//! Level-set geometry of sampled fields: marching-squares contours, the
//! contour that encloses the origin, directional extents, isotropy and
//! power-law fits against `k`.

use alloc::collections::{BTreeMap, BinaryHeap};
use alloc::vec;
use alloc::vec::Vec;
use core::cmp::Ordering;
use core::f64::consts::TAU;
#[allow(unused_imports)] // unused only when another crate links std into num-traits
use num_traits::Float;

use crate::wigner::ScalarField;
use crate::{Error, Result};

/// Polyline in `(x, p)` coordinates. A closed contour does not repeat its
/// first vertex.
#[derive(Debug, Clone, PartialEq)]
pub struct Contour {
    pub points: Vec<(f64, f64)>,
    pub closed: bool,
    pub field_level: f64,
}

impl Contour {
    /// Signed shoelace area; zero for open contours.
    pub fn signed_area(&self) -> f64 {
        if !self.closed {
            return 0.0;
        }
        let n = self.points.len();
        let mut s = 0.0;
        for i in 0..n {
            let (x0, y0) = self.points[i];
            let (x1, y1) = self.points[(i + 1) % n];
            s += x0 * y1 - x1 * y0;
        }
        0.5 * s
    }

    pub fn area(&self) -> f64 {
        self.signed_area().abs()
    }

    /// Even-odd point-in-polygon test. Open contours contain nothing.
    pub fn contains(&self, x: f64, p: f64) -> bool {
        if !self.closed {
            return false;
        }
        let n = self.points.len();
        let mut inside = false;
        let mut j = n - 1;
        for i in 0..n {
            let (xi, yi) = self.points[i];
            let (xj, yj) = self.points[j];
            if (yi > p) != (yj > p) && x < (xj - xi) * (p - yi) / (yj - yi) + xi {
                inside = !inside;
            }
            j = i;
        }
        inside
    }

    fn segments(&self) -> impl Iterator<Item = ((f64, f64), (f64, f64))> + '_ {
        let n = self.points.len();
        let count = if self.closed { n } else { n.saturating_sub(1) };
        (0..count).map(move |i| (self.points[i], self.points[(i + 1) % n]))
    }
}

/// Marching squares at `level`.
///
/// Cells with a masked-out corner are skipped, so level lines that run into
/// the mask or the grid edge come out as open polylines. Ambiguous saddle
/// cells are resolved with the average of the four corners.
pub fn zero_contours(field: &ScalarField, level: f64) -> Vec<Contour> {
    let g = field.grid();
    let (nx, np) = (g.nx(), g.np());
    let v = field.values();
    let at = |i: usize, j: usize| v[g.index(i, j)];

    // Edge ids: horizontal edge from node (i,j) to (i+1,j) is 2·idx, vertical
    // edge from (i,j) to (i,j+1) is 2·idx+1.
    let h_edge = |i: usize, j: usize| 2 * g.index(i, j);
    let v_edge = |i: usize, j: usize| 2 * g.index(i, j) + 1;
    let crossing = |e: usize| -> (f64, f64) {
        let idx = e / 2;
        let (i, j) = g.coords(idx);
        let (i2, j2) = if e.is_multiple_of(2) {
            (i + 1, j)
        } else {
            (i, j + 1)
        };
        let (a, b) = (at(i, j), at(i2, j2));
        let t = if a == b {
            0.5
        } else {
            ((level - a) / (b - a)).clamp(0.0, 1.0)
        };
        let (x0, p0) = (g.x(i), g.p(j));
        let (x1, p1) = (g.x(i2), g.p(j2));
        (x0 + t * (x1 - x0), p0 + t * (p1 - p0))
    };

    let mut segments: Vec<(usize, usize)> = Vec::new();
    for j in 0..np - 1 {
        for i in 0..nx - 1 {
            let c = [at(i, j), at(i + 1, j), at(i + 1, j + 1), at(i, j + 1)];
            if c.iter().any(|x| x.is_nan()) {
                continue;
            }
            let above = |x: f64| x > level;
            let case = (above(c[0]) as u8)
                | (above(c[1]) as u8) << 1
                | (above(c[2]) as u8) << 2
                | (above(c[3]) as u8) << 3;
            let (b, r, t, l) = (
                h_edge(i, j),
                v_edge(i + 1, j),
                h_edge(i, j + 1),
                v_edge(i, j),
            );
            let centre_above = above(0.25 * (c[0] + c[1] + c[2] + c[3]));
            match case {
                0 | 15 => {}
                1 | 14 => segments.push((l, b)),
                2 | 13 => segments.push((b, r)),
                3 | 12 => segments.push((l, r)),
                4 | 11 => segments.push((r, t)),
                6 | 9 => segments.push((b, t)),
                7 | 8 => segments.push((l, t)),
                // corners 0 and 2 above
                5 => {
                    if centre_above {
                        segments.push((l, t));
                        segments.push((b, r));
                    } else {
                        segments.push((l, b));
                        segments.push((r, t));
                    }
                }
                // corners 1 and 3 above
                10 => {
                    if centre_above {
                        segments.push((l, b));
                        segments.push((r, t));
                    } else {
                        segments.push((b, r));
                        segments.push((l, t));
                    }
                }
                _ => unreachable!(),
            }
        }
    }

    chain_segments(&segments)
        .into_iter()
        .map(|(edges, closed)| Contour {
            points: edges.into_iter().map(crossing).collect(),
            closed,
            field_level: level,
        })
        .collect()
}

/// Joins segments that share an edge id into maximal chains. Open chains are
/// started from their free ends so that they come out whole.
fn chain_segments(segments: &[(usize, usize)]) -> Vec<(Vec<usize>, bool)> {
    let mut by_edge: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
    for (s, &(a, b)) in segments.iter().enumerate() {
        by_edge.entry(a).or_default().push(s);
        by_edge.entry(b).or_default().push(s);
    }
    let mut used = vec![false; segments.len()];
    let mut out = Vec::new();

    let walk = |start_seg: usize, start_edge: usize, used: &mut Vec<bool>| -> (Vec<usize>, bool) {
        let mut edges = vec![start_edge];
        let mut seg = start_seg;
        let mut edge = start_edge;
        loop {
            used[seg] = true;
            let (a, b) = segments[seg];
            let next = if a == edge { b } else { a };
            if next == start_edge {
                return (edges, true);
            }
            edges.push(next);
            edge = next;
            match by_edge[&next].iter().find(|&&s| !used[s]) {
                Some(&s) => seg = s,
                None => return (edges, false),
            }
        }
    };

    for (&edge, segs) in &by_edge {
        if segs.len() == 1 && !used[segs[0]] {
            let chain = walk(segs[0], edge, &mut used);
            out.push(chain);
        }
    }
    for s in 0..segments.len() {
        if !used[s] {
            let chain = walk(s, segments[s].0, &mut used);
            out.push(chain);
        }
    }
    out
}

/// The closed contour of smallest area that encloses `origin`.
pub fn central_contour(contours: &[Contour], origin: (f64, f64)) -> Result<Contour> {
    contours
        .iter()
        .filter(|c| c.closed && c.points.len() >= 4 && c.contains(origin.0, origin.1))
        .min_by(|a, b| a.area().total_cmp(&b.area()))
        .cloned()
        .ok_or(Error::NoEnclosingContour)
}

/// Distance from the origin to the nearest crossing of the ray at angle
/// `theta` with the contour.
pub fn radial_extent(c: &Contour, theta: f64) -> Result<f64> {
    let (ux, uy) = (theta.cos(), theta.sin());
    let mut best = f64::INFINITY;
    for ((x0, y0), (x1, y1)) in c.segments() {
        let (dx, dy) = (x1 - x0, y1 - y0);
        let denom = ux * dy - uy * dx;
        if denom == 0.0 {
            continue;
        }
        // origin + t·u = p0 + s·(p1 − p0)
        let t = (x0 * dy - y0 * dx) / denom;
        let s = (x0 * uy - y0 * ux) / denom;
        if t > 0.0 && (0.0..=1.0).contains(&s) && t < best {
            best = t;
        }
    }
    if best.is_finite() {
        Ok(best)
    } else {
        Err(Error::NoIntersection { theta })
    }
}

/// Default number of rays for [`isotropy_ratio`].
pub const DEFAULT_DIRECTIONS: usize = 360;

/// `max_θ r(θ) / min_θ r(θ)` over `n_dirs` equally spaced rays.
pub fn isotropy_ratio(c: &Contour, n_dirs: usize) -> Result<f64> {
    if n_dirs == 0 {
        return Err(Error::invalid("need at least one direction"));
    }
    let mut lo = f64::INFINITY;
    let mut hi: f64 = 0.0;
    for m in 0..n_dirs {
        let r = radial_extent(c, TAU * m as f64 / n_dirs as f64)?;
        lo = lo.min(r);
        hi = hi.max(r);
    }
    Ok(hi / lo)
}

/// Least-squares line through `(ln k, ln extent)`.
#[derive(Debug, Clone, PartialEq)]
pub struct ScalingFit {
    pub samples: Vec<(f64, f64)>,
    pub slope: f64,
    pub intercept: f64,
    pub rms_residual: f64,
}

pub fn scaling_exponent(samples: &[(f64, f64)]) -> Result<ScalingFit> {
    if samples.len() < 3 {
        return Err(Error::invalid("a scaling fit needs at least 3 samples"));
    }
    if samples
        .iter()
        .any(|&(k, e)| !(k > 0.0 && e > 0.0 && k.is_finite() && e.is_finite()))
    {
        return Err(Error::invalid(
            "scaling samples must be finite and positive",
        ));
    }
    let n = samples.len() as f64;
    let pts: Vec<(f64, f64)> = samples.iter().map(|&(k, e)| (k.ln(), e.ln())).collect();
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx) * (p.0 - mx)).sum();
    if sxx == 0.0 {
        return Err(Error::invalid(
            "scaling samples need at least two distinct k",
        ));
    }
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let rss: f64 = pts
        .iter()
        .map(|p| (p.1 - intercept - slope * p.0).powi(2))
        .sum();
    Ok(ScalingFit {
        samples: samples.to_vec(),
        slope,
        intercept,
        rms_residual: (rss / n).sqrt(),
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
struct Entry {
    bottleneck: f64,
    idx: usize,
}

impl Eq for Entry {}

impl Ord for Entry {
    fn cmp(&self, other: &Self) -> Ordering {
        self.bottleneck
            .total_cmp(&other.bottleneck)
            .then_with(|| other.idx.cmp(&self.idx))
    }
}

impl PartialOrd for Entry {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Grid node closest to the origin.
fn origin_node(field: &ScalarField) -> (usize, usize) {
    let g = field.grid();
    let nearest = |n: usize, f: &dyn Fn(usize) -> f64| {
        (0..n)
            .min_by(|&a, &b| f(a).abs().total_cmp(&f(b).abs()))
            .unwrap()
    };
    (nearest(g.nx(), &|i| g.x(i)), nearest(g.np(), &|j| g.p(j)))
}

/// Level at which the feature around the origin first becomes a closed
/// island.
///
/// Descending from the origin value, the region `{s·W > L}` that contains the
/// origin (with `s` the sign of `W` there) grows until one of three things
/// happens. If `L` reaches zero first, the zero contour closes and the level is
/// `0`. If the region first merges with another peak through a saddle, the
/// level sits just above that saddle value. If it first reaches the mask or the
/// grid edge, there is no enclosing contour.
///
/// Connectivity matches [`zero_contours`]: diagonal neighbours are joined only
/// through the cell-centre average.
pub fn closing_level(field: &ScalarField) -> Result<f64> {
    let g = field.grid();
    let (nx, np) = (g.nx(), g.np());
    let (i0, j0) = origin_node(field);
    let w0 = field.get(i0, j0).ok_or(Error::NoEnclosingContour)?;
    if w0 == 0.0 {
        return Err(Error::NoEnclosingContour);
    }
    let s = w0.signum();
    let val = |i: usize, j: usize| field.get(i, j).map(|v| s * v);

    let mut best = vec![f64::NEG_INFINITY; g.len()];
    let mut done = vec![false; g.len()];
    let mut heap = BinaryHeap::new();
    let start = g.index(i0, j0);
    best[start] = s * w0;
    heap.push(Entry {
        bottleneck: s * w0,
        idx: start,
    });

    while let Some(Entry { bottleneck: b, idx }) = heap.pop() {
        if done[idx] {
            continue;
        }
        done[idx] = true;
        let (i, j) = g.coords(idx);
        if b <= 0.0 {
            return Ok(0.0);
        }
        let own = val(i, j).ok_or(Error::NoEnclosingContour)?;
        if own > b {
            // climbing straight out of the origin: it is not an extremum
            if b >= s * w0 {
                return Err(Error::NoEnclosingContour);
            }
            return Ok(s * (b + 1e-9 * w0.abs()));
        }
        if i == 0 || j == 0 || i == nx - 1 || j == np - 1 {
            return Err(Error::NoEnclosingContour);
        }
        for dj in -1i64..=1 {
            for di in -1i64..=1 {
                if di == 0 && dj == 0 {
                    continue;
                }
                let (ni, nj) = ((i as i64 + di) as usize, (j as i64 + dj) as usize);
                let Some(vn) = val(ni, nj) else {
                    return Err(Error::NoEnclosingContour);
                };
                let mut nb = b.min(vn);
                if di != 0 && dj != 0 {
                    let (a, c) = (val(ni, j), val(i, nj));
                    match (a, c) {
                        (Some(a), Some(c)) => nb = nb.min(0.25 * (own + vn + a + c)),
                        _ => return Err(Error::NoEnclosingContour),
                    }
                }
                let nidx = g.index(ni, nj);
                if !done[nidx] && nb > best[nidx] {
                    best[nidx] = nb;
                    heap.push(Entry {
                        bottleneck: nb,
                        idx: nidx,
                    });
                }
            }
        }
    }
    Err(Error::NoEnclosingContour)
}

/// The central feature's boundary: the origin-enclosing contour at
/// [`closing_level`].
pub fn central_feature(field: &ScalarField) -> Result<Contour> {
    let level = closing_level(field)?;
    central_contour(&zero_contours(field, level), (0.0, 0.0))
}

/// Tensor-product Lagrange interpolation of `order` points per axis around
/// `(x, p)`. Errors when the stencil touches a masked cell or leaves the grid.
pub fn interpolate(field: &ScalarField, x: f64, p: f64, order: usize) -> Result<f64> {
    let g = field.grid();
    if order < 2 {
        return Err(Error::invalid("interpolation order must be at least 2"));
    }
    let stencil = |t: f64, n: usize, h: f64, origin: f64| -> Result<(usize, Vec<f64>)> {
        let u = (t - origin) / h;
        let first = (u.floor() as i64) - (order as i64 - 1) / 2;
        if first < 0 || first as usize + order > n {
            return Err(Error::invalid("interpolation stencil leaves the grid"));
        }
        let first = first as usize;
        let w = (0..order)
            .map(|a| {
                let mut w = 1.0;
                for b in 0..order {
                    if a != b {
                        w *= (u - (first + b) as f64) / (a as f64 - b as f64);
                    }
                }
                w
            })
            .collect();
        Ok((first, w))
    };
    let (fi, wx) = stencil(x, g.nx(), g.dx(), g.x(0))?;
    let (fj, wp) = stencil(p, g.np(), g.dp(), g.p(0))?;
    let mut acc = 0.0;
    for (b, wb) in wp.iter().enumerate() {
        for (a, wa) in wx.iter().enumerate() {
            let v = field
                .get(fi + a, fj + b)
                .ok_or_else(|| Error::invalid("interpolation stencil touches the mask"))?;
            acc += wa * wb * v;
        }
    }
    Ok(acc)
}
