//! Arithmetic in GF(3^6), its Frobenius, traces and an Artin-Schreier equation.

use payne_quad::FieldCtx;

fn main() -> payne_quad::Result<()> {
    let k = FieldCtx::parse("3^6")?;
    println!("field {} with modulus {:?}", k.spec_string(), k.modulus());

    let g = k.primitive();
    let x = k.pow(g, 100);
    let y = k.add(x, k.scalar(2));
    println!("x = {}, x + 2 = {}, x * (x + 2) = {}", k.fmt_elem(x), k.fmt_elem(y), k.fmt_elem(k.mul(x, y)));
    println!("x^3 = {}, absolute trace {}", k.fmt_elem(k.frob(x, 1)), k.trace(x));

    // beta^9 - beta = alpha is solvable exactly when tr_{F_729/F_9}(alpha) = 0
    for alpha in [x, k.sub(x, k.frob(x, 2))] {
        match k.artin_schreier_solve(alpha, 2) {
            Ok(beta) => println!("beta^9 - beta = {}: beta = {}", k.fmt_elem(alpha), k.fmt_elem(beta)),
            Err(e) => println!("beta^9 - beta = {}: {e}", k.fmt_elem(alpha)),
        }
    }
    Ok(())
}
