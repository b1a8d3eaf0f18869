use levyint_core::numkernel::{bessel_j, gamma, pochhammer};
use levyint_core::PrecisionCtx;
use proptest::prelude::*;
use rug::Float;

fn rel(a: &Float, b: &Float) -> f64 {
    let d = Float::with_val(a.prec(), a - b);
    (d / b).to_f64().abs()
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 200, ..ProptestConfig::default() })]

    #[test]
    fn gamma_recurrence(x in 1e-3f64..30.0) {
        let c = PrecisionCtx::new(30);
        let x = c.real(x);
        let g = gamma(&x, &c).unwrap();
        let g1 = gamma(&Float::with_val(c.bits(), &x + 1u32), &c).unwrap();
        prop_assert!(rel(&g1, &(g * &x)) <= 4.0 * c.eps);
    }
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 60, ..ProptestConfig::default() })]

    #[test]
    fn pochhammer_is_a_gamma_ratio(x in 0.01f64..20.0, n in 0u32..25) {
        let c = PrecisionCtx::new(30);
        let x = c.real(x);
        let want = gamma(&Float::with_val(c.bits(), &x + n), &c).unwrap() / gamma(&x, &c).unwrap();
        prop_assert!(rel(&pochhammer(&x, n), &want) <= 4.0 * c.eps);
    }

    #[test]
    fn bessel_recurrence(k in 128u32..1536, x in 0.05f64..80.0) {
        // dyadic order so that ν ± 1 is exact in f64
        let nu = f64::from(k) / 256.0;
        let c = PrecisionCtx::new(30);
        let xr = c.real(x);
        let lo = bessel_j(nu - 1.0, &xr, &c).unwrap();
        let mid = bessel_j(nu, &xr, &c).unwrap();
        let hi = bessel_j(nu + 1.0, &xr, &c).unwrap();
        let lhs = Float::with_val(c.bits(), &lo + &hi);
        let rhs = mid * Float::with_val(c.bits(), 2.0 * nu) / &xr;
        let envelope = (2.0 / (std::f64::consts::PI * x)).sqrt().max(1.0) * (1.0 + 2.0 * nu / x);
        prop_assert!(Float::with_val(c.bits(), &lhs - &rhs).abs().to_f64() <= 10.0 * c.eps * envelope);
    }

    #[test]
    fn more_digits_do_not_move_values(x in 0.05f64..25.0) {
        let lo = PrecisionCtx::new(30);
        let hi = PrecisionCtx::new(60);
        let g30 = gamma(&lo.real(x), &lo).unwrap();
        let g60 = gamma(&hi.real(x), &hi).unwrap();
        prop_assert!(rel(&Float::with_val(hi.bits(), &g30), &g60) <= lo.eps);
        let j30 = bessel_j(1.5, &lo.real(x), &lo).unwrap();
        let j60 = bessel_j(1.5, &hi.real(x), &hi).unwrap();
        prop_assert!(Float::with_val(hi.bits(), &j60 - &j30).abs().to_f64() <= lo.eps);
    }
}

#[test]
fn gamma_of_one_third() {
    let c = PrecisionCtx::default();
    let g = gamma(&(c.real(1) / 3u32), &c).unwrap();
    let want = c.parse("2.67893853470774763365569294097467764412868937795730110095043").unwrap();
    assert!(rel(&g, &want) <= c.eps);
}

#[test]
fn bessel_j0_at_one() {
    let c = PrecisionCtx::default();
    let j = bessel_j(0.0, &c.real(1), &c).unwrap();
    let want = c.parse("0.765197686557966551449717526102663220909274289755325241861548").unwrap();
    assert!(Float::with_val(c.bits(), &j - &want).abs().to_f64() <= 10.0 * c.eps);
}
