//! Linearized polynomials and the coefficient-tuple conditions.

use payne_quad::gf::FieldElem;
use payne_quad::linpoly::{LinPoly, TupleKind, TupleParams, TupleSolver};
use payne_quad::FieldCtx;

fn main() -> payne_quad::Result<()> {
    let k = FieldCtx::parse("3^6")?;
    let s = LinPoly::parse(&k, "X^3 + X^243")?;
    println!("S = {}, trace dual {}, rank {}", s.display(&k), s.trace_dual(&k).display(&k), s.rank(&k));
    println!("(1-g)^2 applied to X^81 with l = 2: {}", LinPoly::monomial(6, 4, FieldElem::ONE).one_minus_g_pow(&k, 2, 2).display(&k));

    let params = TupleParams {
        l: 2,
        mu_b: FieldElem::ONE,
        ..Default::default()
    };
    let solver = TupleSolver::new(&k, TupleKind::S1Symmetric, params)?;
    println!("{} tuples at q = 729: {} (dimension {})", solver.kind(), solver.count(), solver.dim());

    let k8 = FieldCtx::parse("2^3")?;
    let even = TupleParams {
        omega: FieldElem::ONE,
        mu: FieldElem::ONE,
        ..Default::default()
    };
    let solver = TupleSolver::new(&k8, TupleKind::EvenFTuple, even)?;
    println!("{} tuples at q = 8: {}", solver.kind(), solver.count());
    for t in solver.all(16)?.iter().step_by(5) {
        let f: Vec<String> = t.f.as_ref().unwrap().iter().map(|&x| k8.fmt_elem(x)).collect();
        println!("f = ({}), S_1 = {}", f.join(", "), t.s1(&k8).display(&k8));
    }
    Ok(())
}
