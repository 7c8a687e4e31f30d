//! Print the first mutant an operator produces for a program.
//!
//!     cargo run --example show_mutant -- program.py BoundaryShift [seed]

use testdrift::mutation::{first_change, OperatorId};

fn main() {
    let mut args = std::env::args().skip(1);
    let path = args
        .next()
        .expect("usage: show_mutant <program.py> <Operator> [seed]");
    let op: OperatorId = args.next().expect("operator").parse().unwrap();
    let seed = args.next().map_or(0, |s| s.parse().unwrap());
    let src = std::fs::read_to_string(&path).unwrap();
    match first_change("p", &src, op, seed).unwrap() {
        Some(c) => {
            println!(
                "# lines_changed={} mutated={:?} original={:?}",
                c.lines_changed, c.mutated_region, c.original_region
            );
            print!("{}", c.new_source);
        }
        None => println!("{op} does not apply"),
    }
}
