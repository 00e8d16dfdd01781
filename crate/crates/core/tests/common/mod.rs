#![allow(dead_code)]

use std::sync::Arc;

use payne_quad::group::ETuple;
use payne_quad::linpoly::LinPoly;
use payne_quad::{Construction, ConstructionParams, FieldCtx, FieldElem, Variant};

pub fn field(spec: &str) -> Arc<FieldCtx> {
    Arc::new(FieldCtx::parse(spec).expect("field"))
}

pub fn poly(ctx: &FieldCtx, s: &str) -> LinPoly {
    LinPoly::parse(ctx, s).expect("polynomial")
}

pub fn build(ctx: &Arc<FieldCtx>, variant: Variant, s1: Option<&str>) -> Construction {
    let mut params = ConstructionParams::new(variant);
    if let Some(s) = s1 {
        params = params.with_s1(poly(ctx, s));
    }
    Construction::build(ctx.clone(), params).expect("construction")
}

pub type Mat = [[FieldElem; 4]; 4];

/// The 4x4 matrix of `E(a,b,c,t)`, written out entry by entry.
pub fn dense(ctx: &FieldCtx, e: ETuple) -> Mat {
    let [a, b, c, t] = e;
    let (o, z) = (FieldElem::ONE, FieldElem::ZERO);
    [
        [o, z, z, z],
        [ctx.neg(c), o, z, z],
        [ctx.sub(b, ctx.mul(c, t)), t, o, z],
        [a, b, c, o],
    ]
}

pub fn mat_mul(ctx: &FieldCtx, x: &Mat, y: &Mat) -> Mat {
    let mut r = [[FieldElem::ZERO; 4]; 4];
    for i in 0..4 {
        for j in 0..4 {
            r[i][j] = ctx.sum((0..4).map(|k| ctx.mul(x[i][k], y[k][j])));
        }
    }
    r
}

pub fn identity() -> Mat {
    let mut r = [[FieldElem::ZERO; 4]; 4];
    for (i, row) in r.iter_mut().enumerate() {
        row[i] = FieldElem::ONE;
    }
    r
}

/// Counts `(f_0, .., f_{m-1}, s_0)` with `f_0 = 0`, `mu f_i = (mu f_{m-i})^(2^i)`
/// and a consistent cyclic recursion `omega s_{i+1} + s_i^2 = f_i^2`, by
/// trying every tuple.
pub fn even_tuples_brute(ctx: &FieldCtx, omega: FieldElem, mu: FieldElem) -> u64 {
    let m = ctx.m();
    let q = ctx.q() as u64;
    let oi = ctx.inv(omega).unwrap();
    let sq = |x: FieldElem| ctx.mul(x, x);
    let mut count = 0;
    for code in 0..q.pow(m as u32) {
        let mut f = vec![FieldElem::ZERO; m];
        let mut x = code;
        for fi in f.iter_mut().skip(1) {
            *fi = FieldElem((x % q) as u16);
            x /= q;
        }
        let s0 = FieldElem(x as u16);
        if !(1..m).all(|i| ctx.mul(mu, f[i]) == ctx.frob(ctx.mul(mu, f[m - i]), i)) {
            continue;
        }
        let mut s = s0;
        for fi in &f[..m - 1] {
            s = ctx.mul(oi, ctx.add(sq(*fi), sq(s)));
        }
        if ctx.add(ctx.mul(omega, s0), sq(s)) == sq(f[m - 1]) {
            count += 1;
        }
    }
    count
}
