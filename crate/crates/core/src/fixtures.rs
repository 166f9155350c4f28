//! Small worked instances used by tests, documentation and the CLI.

use crate::model::{MarginalProfile, SecurityGame, SignMode, Target};
use crate::optimizer::{IntervalSpec, PayoffInterval};
use crate::rational::{int, ratio, Rational};

fn game(k_a: usize, k_d: usize, targets: Vec<Target>) -> SecurityGame {
    SecurityGame::new(k_a, k_d, targets, SignMode::Permissive).expect("fixture game is valid")
}

/// Four targets, `k_a = 3`, `k_d = 2`; unique interior equilibrium with
/// `c1 = 1`.
pub fn example1() -> SecurityGame {
    let uau = [ratio(8, 7), ratio(6, 5), ratio(4, 3), int(2)];
    let uac = [ratio(2, 3), ratio(4, 5), ratio(1, 2), ratio(3, 4)];
    let udu = [ratio(-8, 5), ratio(-27, 10), ratio(-39, 10), ratio(-24, 5)];
    let udc = [int(-1), int(-2), int(-3), int(-4)];
    let targets = (0..4)
        .map(|i| Target::new(uac[i].clone(), uau[i].clone(), udc[i].clone(), udu[i].clone()))
        .collect();
    game(3, 2, targets)
}

pub fn example1_profile() -> MarginalProfile {
    MarginalProfile::new(
        vec![ratio(252, 275), ratio(216, 275), ratio(168, 275), ratio(189, 275)],
        vec![ratio(3, 10), ratio(1, 2), ratio(2, 5), ratio(4, 5)],
    )
}

pub const EXAMPLE2_UDU: [i64; 6] = [-5, -10, -7, -8, -4, -1];
pub const EXAMPLE2_LB: [i64; 6] = [1, 2, 9, 4, 6, 10];
pub const EXAMPLE2_UB: [i64; 6] = [7, 3, 13, 5, 8, 11];

/// Fully protective game on six targets with `k_a = 2`, `k_d = 3` and the
/// given attacker uncovered payoffs.
pub fn example2_game(uau: &[i64; 6]) -> SecurityGame {
    let targets = (0..6)
        .map(|i| Target::new(int(0), int(uau[i]), int(0), int(EXAMPLE2_UDU[i])))
        .collect();
    game(2, 3, targets)
}

pub fn example2_spec() -> IntervalSpec {
    IntervalSpec::new(
        (0..6)
            .map(|i| PayoffInterval {
                uac: (int(0), int(0)),
                uau: (int(EXAMPLE2_LB[i]), int(EXAMPLE2_UB[i])),
            })
            .collect(),
    )
}

/// Defender payoffs `(udc, udu)` of the five-target optimization instance.
pub fn example3_defender() -> Vec<(Rational, Rational)> {
    [(-1, -7), (-4, -6), (-9, -12), (-3, -8), (-2, -9)]
        .iter()
        .map(|&(c, u)| (int(c), int(u)))
        .collect()
}

pub fn example3_spec() -> IntervalSpec {
    let rows = [
        ((10, 17), (20, 35)),
        ((48, 49), (51, 60)),
        ((5, 9), (41, 42)),
        ((31, 40), (63, 70)),
        ((25, 29), (90, 95)),
    ];
    IntervalSpec::new(
        rows.iter()
            .map(|&((cl, cu), (ul, uu))| PayoffInterval {
                uac: (int(cl), int(cu)),
                uau: (int(ul), int(uu)),
            })
            .collect(),
    )
}

pub const EXAMPLE3_K_A: usize = 3;
pub const EXAMPLE3_K_D: usize = 2;
