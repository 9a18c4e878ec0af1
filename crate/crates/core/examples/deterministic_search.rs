//! Exhaustive search over the 16 memoryless deterministic strategy pairs.
//!
//! cargo run --example deterministic_search

use nonlocal_games::analysis::{coordinated_deterministic_max, enumerate_deterministic};
use nonlocal_games::games::GameSpec;

fn main() {
    for spec in [
        GameSpec::game1(3).unwrap(),
        GameSpec::game2(3).unwrap(),
        GameSpec::game3(),
    ] {
        let best = coordinated_deterministic_max(&spec);
        println!("{spec}: best deterministic value {best}");
        for (pair, p) in enumerate_deterministic(&spec) {
            if p == best {
                println!("  {pair}");
            }
        }
    }
}
