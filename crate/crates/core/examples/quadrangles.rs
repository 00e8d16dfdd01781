//! W(q) and its Payne derivation, with the generalized-quadrangle axioms.

use payne_quad::quadrangle::{build_payne, build_wq, verify_gq, DEFAULT_POINT_CAP};
use payne_quad::FieldCtx;

fn main() -> payne_quad::Result<()> {
    for spec in ["3^1", "5^1", "3^2"] {
        let k = FieldCtx::parse(spec)?;
        let q = k.q();
        let wq = build_wq(&k, DEFAULT_POINT_CAP)?;
        let qp = build_payne(&k, &wq)?;
        let a = verify_gq(&wq, q, q);
        let b = verify_gq(&qp, q - 1, q + 1);
        println!(
            "q={q}: W(q) {} points {} lines ({}), Q^P {} points {} lines ({})",
            a.points,
            a.lines,
            if a.passed { "GQ" } else { "not a GQ" },
            b.points,
            b.lines,
            if b.passed { "GQ" } else { "not a GQ" },
        );
    }
    Ok(())
}
