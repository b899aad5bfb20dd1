//! Populations are multisets; reactions are built from four operations.

use achem::{ms, Multiset};

fn main() {
    let p = ms! {"a" => 2, "a1" => 1};
    let q = ms! {"a" => 1, "c" => 3};

    println!("P         = {p}");
    println!("Q         = {q}");
    println!("P ∪ Q     = {}", p.union(&q));
    println!("P ∩ Q     = {}", p.intersect(&q));
    println!("P - Q     = {}", p.subtract(&q));
    println!("P ⊇ {{a}}  = {}", p.contains(&ms! {"a" => 1}));
    println!("support P = {:?}", p.support());

    // firing r1: a + a1 -> 2 c on P
    let input = ms! {"a" => 1, "a1" => 1};
    let output = ms! {"c" => 2};
    println!("(P - in) ∪ out = {}", p.subtract(&input).union(&output));

    let empty = Multiset::new();
    assert_eq!(p.union(&empty), p);
    assert_eq!(p.union(&q), q.union(&p));
    println!("canonical bytes of P: {}", p.canonical_encode().len());
}
