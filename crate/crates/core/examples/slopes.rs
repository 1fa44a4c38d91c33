//! Runs the four Monte-Carlo study designs at moderate sizes and prints
//! their MSE tables with fitted log-log slopes.

use ortree_core::simlab::{run_scenario, LambdaRule, Scenario, ScenarioKind};
use ortree_core::Family;

fn main() {
    let studies = vec![
        Scenario {
            kind: ScenarioKind::Twopiece2d,
            sizes: vec![16, 32, 64, 128],
            sigma: 1.0,
            reps: 20,
            lambda_rule: LambdaRule::Log2Size,
            order: 0,
            family: Family::Rdp,
            seed: 0,
        },
        Scenario {
            kind: ScenarioKind::Smooth2d,
            sizes: vec![16, 32, 64, 128],
            sigma: 1.0,
            reps: 20,
            lambda_rule: LambdaRule::Log2Size,
            order: 0,
            family: Family::Rdp,
            seed: 0,
        },
        Scenario {
            kind: ScenarioKind::Pwlinear1d,
            sizes: vec![128, 256, 512, 1024, 2048, 4096],
            sigma: 1.0,
            reps: 20,
            lambda_rule: LambdaRule::Log2Size,
            order: 1,
            family: Family::Rdp,
            seed: 0,
        },
        Scenario {
            kind: ScenarioKind::Pinwheel2d,
            sizes: vec![12, 18, 24, 30],
            sigma: 0.1,
            reps: 10,
            lambda_rule: LambdaRule::Fixed(0.1),
            order: 0,
            family: Family::Hier,
            seed: 0,
        },
    ];
    for s in studies {
        let start = std::time::Instant::now();
        let table = run_scenario(&s).expect("scenario runs");
        println!(
            "--- {} ({}, order {}, lambda {}) in {:.2?}",
            s.kind,
            s.family,
            s.order,
            s.lambda_rule,
            start.elapsed()
        );
        print!("{}", table.to_csv());
    }
}
