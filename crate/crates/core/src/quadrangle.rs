//! PG(3,q), the symplectic quadrangle W(q) and its Payne derivation at
//! `P = <(1,0,0,0)>`.

use rustc_hash::FxHashMap;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::gf::{FieldCtx, FieldElem};
use crate::group::{act, GroupElem, Triple};

pub type Vec4 = [FieldElem; 4];

/// `(x,y) = x1 y4 - x4 y1 + x2 y3 - x3 y2`.
pub fn form(ctx: &FieldCtx, x: &Vec4, y: &Vec4) -> FieldElem {
    let t1 = ctx.sub(ctx.mul(x[0], y[3]), ctx.mul(x[3], y[0]));
    let t2 = ctx.sub(ctx.mul(x[1], y[2]), ctx.mul(x[2], y[1]));
    ctx.add(t1, t2)
}

/// Scales so that the first nonzero coordinate is 1; `None` for the zero vector.
pub fn normalize(ctx: &FieldCtx, x: &Vec4) -> Option<Vec4> {
    let lead = x.iter().find(|v| !v.is_zero())?;
    let inv = ctx.inv(*lead)?;
    Some(x.map(|v| ctx.mul(v, inv)))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum LineKind {
    /// A totally isotropic line of PG(3,q).
    Isotropic,
    /// A line `<P,Q>` through the derivation point.
    ThroughP,
}

/// A finite point-line geometry with both incidence directions stored.
#[derive(Clone, Debug)]
pub struct Quadrangle {
    q: u32,
    order: (u32, u32),
    points: Vec<Vec4>,
    lines: Vec<Vec<u32>>,
    kinds: Vec<LineKind>,
    point_lines: Vec<Vec<u32>>,
    index: FxHashMap<u64, u32>,
    by_pair: FxHashMap<(u32, u32), u32>,
}

impl Quadrangle {
    fn new(q: u32, order: (u32, u32), points: Vec<Vec4>, lines: Vec<(Vec<u32>, LineKind)>) -> Self {
        let index = points
            .iter()
            .enumerate()
            .map(|(i, p)| (point_key(q, p), i as u32))
            .collect();
        let mut point_lines = vec![Vec::new(); points.len()];
        let mut by_pair = FxHashMap::default();
        let mut pts_of = Vec::with_capacity(lines.len());
        let mut kinds = Vec::with_capacity(lines.len());
        for (li, (mut pts, kind)) in lines.into_iter().enumerate() {
            pts.sort_unstable();
            for &p in &pts {
                point_lines[p as usize].push(li as u32);
            }
            if pts.len() >= 2 {
                by_pair.insert((pts[0], pts[1]), li as u32);
            }
            pts_of.push(pts);
            kinds.push(kind);
        }
        Quadrangle {
            q,
            order,
            points,
            lines: pts_of,
            kinds,
            point_lines,
            index,
            by_pair,
        }
    }

    pub fn q(&self) -> u32 {
        self.q
    }

    /// The nominal order `(s,t)` of the construction.
    pub fn order(&self) -> (u32, u32) {
        self.order
    }

    pub fn num_points(&self) -> usize {
        self.points.len()
    }

    pub fn num_lines(&self) -> usize {
        self.lines.len()
    }

    pub fn point(&self, i: usize) -> &Vec4 {
        &self.points[i]
    }

    pub fn line(&self, i: usize) -> &[u32] {
        &self.lines[i]
    }

    pub fn line_kind(&self, i: usize) -> LineKind {
        self.kinds[i]
    }

    pub fn lines_through(&self, p: usize) -> &[u32] {
        &self.point_lines[p]
    }

    pub fn index_of(&self, x: &Vec4) -> Option<usize> {
        self.index.get(&point_key(self.q, x)).map(|&i| i as usize)
    }

    /// Index of the affine point `<(a,b,c,1)>`.
    pub fn index_of_affine(&self, pt: &Triple) -> Option<usize> {
        self.index_of(&[pt[0], pt[1], pt[2], FieldElem::ONE])
    }

    /// The line whose point set is exactly `pts`, if any.
    pub fn find_line(&self, pts: &[u32]) -> Option<usize> {
        let mut s = pts.to_vec();
        s.sort_unstable();
        if s.len() < 2 {
            return None;
        }
        let li = *self.by_pair.get(&(s[0], s[1]))? as usize;
        (self.lines[li] == s).then_some(li)
    }

    /// Image of a line of the derived quadrangle under a group element.
    pub fn image_of_line(&self, ctx: &FieldCtx, g: &GroupElem, line: usize) -> Option<usize> {
        let img: Option<Vec<u32>> = self.lines[line]
            .iter()
            .map(|&p| {
                let v = self.points[p as usize];
                let pt = act(ctx, g, [v[0], v[1], v[2]]);
                self.index_of_affine(&pt).map(|i| i as u32)
            })
            .collect();
        self.find_line(&img?)
    }
}

fn point_key(q: u32, x: &Vec4) -> u64 {
    x.iter().fold(0u64, |acc, v| acc * q as u64 + v.0 as u64)
}

/// All points of PG(3,q) in normalized form.
pub fn projective_points(ctx: &FieldCtx) -> Vec<Vec4> {
    let q = ctx.q();
    let z = FieldElem::ZERO;
    let mut out = Vec::new();
    for lead in 0..4 {
        let free = 3 - lead;
        for n in 0..q.pow(free as u32) {
            let mut v = [z; 4];
            v[lead] = FieldElem::ONE;
            let mut k = n;
            for slot in v.iter_mut().skip(lead + 1) {
                *slot = FieldElem((k % q) as u16);
                k /= q;
            }
            out.push(v);
        }
    }
    out
}

/// Every 2-dimensional subspace of F_q^4 as an RREF basis pair.
fn two_spaces(ctx: &FieldCtx) -> impl Iterator<Item = (Vec4, Vec4)> + '_ {
    let q = ctx.q();
    (0..4).flat_map(move |i| {
        ((i + 1)..4).flat_map(move |j| {
            // free entries: row 1 after i except j, row 2 after j
            let f1: Vec<usize> = ((i + 1)..4).filter(|&k| k != j).collect();
            let f2: Vec<usize> = ((j + 1)..4).collect();
            let nfree = (f1.len() + f2.len()) as u32;
            (0..q.pow(nfree)).map(move |n| {
                let mut r1 = [FieldElem::ZERO; 4];
                let mut r2 = [FieldElem::ZERO; 4];
                r1[i] = FieldElem::ONE;
                r2[j] = FieldElem::ONE;
                let mut k = n;
                for &pos in &f1 {
                    r1[pos] = FieldElem((k % q) as u16);
                    k /= q;
                }
                for &pos in &f2 {
                    r2[pos] = FieldElem((k % q) as u16);
                    k /= q;
                }
                (r1, r2)
            })
        })
    })
}

fn line_points(ctx: &FieldCtx, r1: &Vec4, r2: &Vec4) -> Vec<Vec4> {
    let mut pts = vec![*r1];
    for lam in ctx.elements() {
        let v: Vec4 = std::array::from_fn(|k| ctx.add(ctx.mul(lam, r1[k]), r2[k]));
        pts.push(normalize(ctx, &v).expect("independent rows"));
    }
    pts
}

/// Default ceiling on materialized point counts.
pub const DEFAULT_POINT_CAP: usize = 30_000;

/// W(q): all points of PG(3,q) and the totally isotropic lines.
pub fn build_wq(ctx: &FieldCtx, point_cap: usize) -> Result<Quadrangle> {
    let q = ctx.q();
    let npts = (q as u64 + 1) * (q as u64 * q as u64 + 1);
    if npts > point_cap as u64 {
        return Err(Error::TooLarge(format!("W({q}) has {npts} points, cap is {point_cap}")));
    }
    let points = projective_points(ctx);
    let index: FxHashMap<u64, u32> = points
        .iter()
        .enumerate()
        .map(|(i, p)| (point_key(q, p), i as u32))
        .collect();
    let lines: Vec<(Vec<u32>, LineKind)> = two_spaces(ctx)
        .filter(|(r1, r2)| form(ctx, r1, r2).is_zero())
        .map(|(r1, r2)| {
            let pts = line_points(ctx, &r1, &r2)
                .iter()
                .map(|p| index[&point_key(q, p)])
                .collect();
            (pts, LineKind::Isotropic)
        })
        .collect();
    Ok(Quadrangle::new(q, (q, q), points, lines))
}

/// The Payne derivation of `wq` at `P = <(1,0,0,0)>`: points off `P^perp`,
/// isotropic lines avoiding `P`, and the lines `<P,Q>`.
pub fn build_payne(ctx: &FieldCtx, wq: &Quadrangle) -> Result<Quadrangle> {
    let q = ctx.q();
    let p_vec: Vec4 = [FieldElem::ONE, FieldElem::ZERO, FieldElem::ZERO, FieldElem::ZERO];
    let p_idx = wq
        .index_of(&p_vec)
        .ok_or_else(|| Error::InvalidParams("W(q) does not contain P".into()))? as u32;
    let keep: Vec<Option<u32>> = {
        let mut next = 0u32;
        (0..wq.num_points())
            .map(|i| {
                if form(ctx, wq.point(i), &p_vec).is_zero() {
                    None
                } else {
                    next += 1;
                    Some(next - 1)
                }
            })
            .collect()
    };
    let points: Vec<Vec4> = (0..wq.num_points())
        .filter(|&i| keep[i].is_some())
        .map(|i| {
            let v = wq.point(i);
            // last coordinate nonzero; rescale to 1
            let inv = ctx.inv(v[3]).expect("off P^perp");
            v.map(|x| ctx.mul(x, inv))
        })
        .collect();
    let mut lines = Vec::new();
    for li in 0..wq.num_lines() {
        let pts = wq.line(li);
        if pts.contains(&p_idx) {
            continue;
        }
        let kept: Vec<u32> = pts.iter().filter_map(|&p| keep[p as usize]).collect();
        lines.push((kept, LineKind::Isotropic));
    }
    // <P,Q> for Q = (0,b,c,1): its affine points are (a,b,c,1), a in F_q
    let tmp = Quadrangle::new(q, (0, 0), points.clone(), Vec::new());
    for b in ctx.elements() {
        for c in ctx.elements() {
            let pts: Vec<u32> = ctx
                .elements()
                .map(|a| tmp.index_of_affine(&[a, b, c]).expect("affine point") as u32)
                .collect();
            lines.push((pts, LineKind::ThroughP));
        }
    }
    Ok(Quadrangle::new(q, (q - 1, q + 1), points, lines))
}

#[derive(Clone, Debug, Serialize)]
pub struct GqReport {
    pub points: usize,
    pub lines: usize,
    pub s: u32,
    pub t: u32,
    pub passed: bool,
    pub failure: Option<String>,
}

/// Checks the generalized-quadrangle axioms for order `(s,t)` exhaustively.
pub fn verify_gq(g: &Quadrangle, s: u32, t: u32) -> GqReport {
    let failure = gq_failure(g, s, t);
    GqReport {
        points: g.num_points(),
        lines: g.num_lines(),
        s,
        t,
        passed: failure.is_none(),
        failure,
    }
}

fn gq_failure(g: &Quadrangle, s: u32, t: u32) -> Option<String> {
    for (li, pts) in g.lines.iter().enumerate() {
        if pts.len() != s as usize + 1 {
            return Some(format!(
                "parameter mismatch: line {li} has {} points, expected s+1 = {}",
                pts.len(),
                s + 1
            ));
        }
    }
    for (pi, ls) in g.point_lines.iter().enumerate() {
        if ls.len() != t as usize + 1 {
            return Some(format!(
                "parameter mismatch: point {pi} is on {} lines, expected t+1 = {}",
                ls.len(),
                t + 1
            ));
        }
    }
    let n = g.num_points();
    // stamp[x] = 1 + index of the point whose neighbourhood is marked
    let mut stamp = vec![0u32; n];
    for p in 0..n {
        let tag = p as u32 + 1;
        stamp[p] = tag;
        for &l in &g.point_lines[p] {
            for &x in &g.lines[l as usize] {
                if x as usize == p {
                    continue;
                }
                if stamp[x as usize] == tag {
                    return Some(format!("points {p} and {x} lie on two common lines"));
                }
                stamp[x as usize] = tag;
            }
        }
        for (li, pts) in g.lines.iter().enumerate() {
            if pts.binary_search(&(p as u32)).is_ok() {
                continue;
            }
            let collinear = pts.iter().filter(|&&x| stamp[x as usize] == tag).count();
            if collinear != 1 {
                return Some(format!(
                    "point {p} and line {li}: {collinear} collinear points on the line, expected 1"
                ));
            }
        }
    }
    None
}
