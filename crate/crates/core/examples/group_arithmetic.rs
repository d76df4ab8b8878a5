//! Loading an algebra from structure constants and computing in the group,
//! both in floating point and in exact rational arithmetic.

use nilcone::algebra::{AlgebraSpec, GroupElement};
use nilcone::scalar::{ratio, Exact};

const FREE3: &str = r#"{
    "n": 6, "p": 3,
    "brackets": [
        {"i": 1, "j": 2, "k": 4, "c": 1.0},
        {"i": 1, "j": 3, "k": 5, "c": 1.0},
        {"i": 2, "j": 3, "k": 6, "c": 1.0}
    ],
    "names": ["X1", "X2", "X3", "Z12", "Z13", "Z23"]
}"#;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let alg = AlgebraSpec::from_json(FREE3)?.validate()?;
    println!("n = {}, p = {}, centre dimension {}", alg.n(), alg.p(), alg.center_dim());

    let g = GroupElement::new(vec![1.0, 2.0, 0.0, 0.5, 0.0, 0.0]);
    let h = GroupElement::new(vec![-1.0, 0.0, 3.0, 0.0, 0.0, 1.0]);
    println!("g·h       = {:?}", alg.multiply(&g, &h)?.coords);
    println!("[g, h]    = {:?}", alg.commutator(&g, &h)?.coords);
    println!("g⁻¹       = {:?}", alg.inverse(&g).coords);
    println!("δ_2(g)    = {:?}", alg.dilate(2.0, &g)?.coords);
    println!("π(g·h)    = {:?}", alg.project(&alg.multiply(&g, &h)?).coeffs);

    // exact mode: associativity holds with equality
    let q = |v: [(i64, i64); 6]| GroupElement::<Exact> { coords: v.iter().map(|&(a, b)| ratio(a, b)).collect() };
    let a = q([(1, 3), (-2, 5), (7, 2), (0, 1), (1, 7), (-3, 4)]);
    let b = q([(5, 6), (1, 1), (-1, 9), (2, 3), (0, 1), (1, 2)]);
    let c = q([(-4, 3), (2, 7), (3, 5), (1, 1), (-5, 2), (0, 1)]);
    let left = alg.multiply(&alg.multiply(&a, &b)?, &c)?;
    let right = alg.multiply(&a, &alg.multiply(&b, &c)?)?;
    let shown: Vec<String> = left.coords.iter().map(ToString::to_string).collect();
    println!("(ab)c      = [{}]", shown.join(", "));
    println!("(ab)c == a(bc): {}", left == right);
    Ok(())
}
