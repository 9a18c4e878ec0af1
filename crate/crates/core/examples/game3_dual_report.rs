//! Game 3 with Φ⁺ players: the sampled answers always satisfy a·b = 1 and
//! never b = −a, while σx⊗σx still has eigenvalue +1 on the shared state.
//!
//! cargo run --example game3_dual_report

use nonlocal_games::harness::game3_dual_report;

fn main() {
    let dual = game3_dual_report(10_000, 0).unwrap();
    println!("trials                 {}", dual.report.trials);
    println!("wins (both clauses)    {}", dual.report.wins);
    println!("a*b = 1                {:.4}", dual.product_condition_rate);
    println!("b = -a                 {:.4}", dual.inverse_condition_rate);
    println!(
        "{} |{}> = {:+} |{}>   residual {:.1e}",
        dual.eigen_check.observable,
        dual.eigen_check.state,
        dual.eigen_check.eigenvalue,
        dual.eigen_check.state,
        dual.eigen_check.residual
    );
}
