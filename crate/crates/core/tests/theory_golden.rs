//! Closed-form constants against values computed independently at 30
//! significant digits.

// Reference digits are kept as computed.
#![allow(clippy::excessive_precision, clippy::approx_constant)]

use ong_core::theory::gain_leading_coefficient;
use ong_core::{gain_leading, lln_constant, mu_1d, unit_ball_volume, OngError};

fn rel(a: f64, b: f64) -> f64 {
    (a / b - 1.0).abs()
}

#[test]
fn unit_ball_volumes() {
    let golden = [
        (1, 2.0),
        (2, 3.141_592_653_589_793_238_5),
        (3, 4.188_790_204_786_390_984_6),
        (4, 4.934_802_200_544_679_309_4),
        (5, 5.263_789_013_914_324_596_7),
        (6, 5.167_712_780_049_970_029_2),
    ];
    for (d, v) in golden {
        assert!(rel(unit_ball_volume(d).unwrap(), v) < 1e-12, "d = {d}");
    }
    assert!(matches!(unit_ball_volume(0), Err(OngError::InvalidArgument(_))));
}

#[test]
fn lln_constants() {
    let golden = [
        (2, 1.0, 1.0),
        (1, 0.5, 1.253_314_137_315_500_251_2),
        (3, 1.0, 0.830_940_417_547_635_307_05),
        (3, 2.0, 1.042_223_227_437_112_870_1),
        (2, 0.5, 0.907_762_738_776_890_342_04),
        (4, 3.0, 1.110_331_696_927_305_414),
        (5, 1.5, 0.778_991_457_423_259_911_6),
    ];
    for (d, a, c) in golden {
        assert!(rel(lln_constant(d, a).unwrap(), c) < 1e-12, "d = {d}, alpha = {a}");
    }
    assert!(matches!(lln_constant(2, 2.0), Err(OngError::Regime(_))));
    assert!(matches!(lln_constant(1, 3.0), Err(OngError::Regime(_))));
}

#[test]
fn lln_constant_blows_up_at_alpha_equal_d() {
    let grid = [1.0, 1.5, 1.9, 1.99, 1.999];
    let vals: Vec<f64> = grid.iter().map(|&a| lln_constant(2, a).unwrap()).collect();
    assert!(vals.windows(2).all(|w| w[1] > w[0]));
    assert!(vals[4] > 500.0);
}

#[test]
fn mu_limits() {
    let golden = [
        (1.5, 0.910_456_949_966_158_679_68),
        (2.0, 0.416_666_666_666_666_666_67),
        (3.0, 0.177_083_333_333_333_333_33),
        (4.5, 0.081_828_436_913_689_101_767),
    ];
    for (a, m) in golden {
        assert!(rel(mu_1d(a).unwrap(), m) < 1e-12, "alpha = {a}");
    }
    assert!(mu_1d(1.0).is_err());
    assert!(mu_1d(200.0).unwrap() < 1e-4);
}

#[test]
fn gain_coefficients() {
    let golden = [
        (1, 1.0, 0.5),
        (2, 2.0, 0.318_309_886_183_790_671_54),
        (3, 1.0, 0.553_960_278_365_090_204_7),
        (2, 0.5, 0.680_822_054_082_667_756_53),
        (3, 3.0, 0.238_732_414_637_843_003_65),
    ];
    for (d, a, g) in golden {
        assert!(rel(gain_leading_coefficient(d, a).unwrap(), g) < 1e-12, "d = {d}, alpha = {a}");
        assert!(rel(gain_leading(d, a, 1).unwrap(), g) < 1e-12);
    }
    assert!(rel(gain_leading(1, 1.0, 100).unwrap(), 0.005) < 1e-12);
    assert!(rel(gain_leading(2, 2.0, 100).unwrap(), 0.003_183_098_861_837_906_7) < 1e-12);
    assert!(gain_leading(1, 1.5, 10).is_err());
}
