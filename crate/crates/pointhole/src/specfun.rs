//! Bessel and modified Bessel functions of orders 0..2, their zeros, and the
//! Euler–Mascheroni constant.
//!
//! Every function is evaluated by one of two regimes: a power series for small
//! arguments and a scaled Chebyshev expansion (K, I) or a normalized downward
//! recurrence with a Neumann-series companion (J, Y) for large arguments. The
//! regime boundaries are exposed so the seam agreement can be tested.

use crate::error::{Error, Result};

/// Euler–Mascheroni constant.
pub const EULER_GAMMA: f64 = 0.577_215_664_901_532_9;

/// Switch point between the series and Chebyshev regimes for K0/K1.
pub const K_SWITCH: f64 = 2.0;
/// Switch point between the series and Chebyshev regimes for I0/I1.
pub const I_SWITCH: f64 = 8.0;
/// Switch point between the series and recurrence regimes for J/Y.
pub const JY_SWITCH: f64 = 5.0;

const SERIES_EPS: f64 = 1e-18;
const MAX_SERIES: usize = 60;

/// A function value paired with a conservative absolute error estimate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpecialValue {
    pub value: f64,
    pub abs_err: f64,
}

impl SpecialValue {
    fn new(value: f64) -> Self {
        // Both regimes deliver a few ulps; 8 ulps of max(1,|v|) is a safe bound.
        SpecialValue {
            value,
            abs_err: 8.0 * f64::EPSILON * value.abs().max(1.0),
        }
    }
}

/// Function selector for the checked entry point.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BesselKind {
    K0,
    K1,
    I0,
    I1,
    J0,
    J1,
    J2,
    Y0,
    Y1,
    Y2,
}

/// Checked evaluation with domain validation and an error estimate.
pub fn bessel(kind: BesselKind, x: f64) -> Result<SpecialValue> {
    use BesselKind::*;
    match kind {
        K0 | K1 | Y0 | Y1 | Y2 => {
            if !(x > 0.0) {
                return Err(Error::domain(format!(
                    "{kind:?} requires x > 0, got {x}"
                )));
            }
        }
        I0 | I1 | J0 | J1 | J2 => {
            if !(x >= 0.0) {
                return Err(Error::domain(format!(
                    "{kind:?} requires x >= 0, got {x}"
                )));
            }
        }
    }
    if !x.is_finite() {
        return Err(Error::domain(format!("{kind:?} requires finite x")));
    }
    let v = match kind {
        K0 => k0(x),
        K1 => k1(x),
        I0 => i0(x),
        I1 => i1(x),
        J0 => j0(x),
        J1 => j1(x),
        J2 => jm(2, x),
        Y0 => y0(x),
        Y1 => y1(x),
        Y2 => ym(2, x),
    };
    Ok(SpecialValue::new(v))
}

fn clenshaw(coeffs: &[f64], u: f64) -> f64 {
    let mut b0 = 0.0;
    let mut b1 = 0.0;
    for &c in coeffs[1..].iter().rev() {
        let t = 2.0 * u * b0 - b1 + c;
        b1 = b0;
        b0 = t;
    }
    u * b0 - b1 + coeffs[0] / 2.0
}

// Chebyshev tables for the scaled functions on u in [-1, 1]:
//   K: u = 4/x - 1,  x in [2, inf),  f = K_n(x) e^x sqrt(x)
//   I: u = 16/x - 1, x in [8, inf),  f = I_n(x) e^-x sqrt(x)
const CHEB_K0E: [f64; 32] = [
    2.440303082065955455,
    -0.03144810131196450054,
    0.001569883885730053375,
    -0.0001284954958162780264,
    0.00001394981371887649936,
    -1.831755522719119485e-6,
    2.766813639445015076e-7,
    -4.660489897687947666e-8,
    8.574034017414226086e-9,
    -1.697534509389061516e-9,
    3.577397281400328447e-10,
    -7.957489244477397037e-11,
    1.855949114954926554e-11,
    -4.514597883374519156e-12,
    1.140340588207344188e-12,
    -2.980096923148177241e-13,
    8.032890775068347421e-14,
    -2.227513326746230748e-14,
    6.340076476275038004e-15,
    -1.848593377916940055e-15,
    5.512055999305779481e-16,
    -1.678231125508316042e-16,
    5.210391771428434774e-17,
    -1.647580578199863783e-17,
    5.300433367149325558e-18,
    -1.733170157986260679e-18,
    5.755082071933793688e-19,
    -1.939024387350694771e-19,
    6.622724153963124445e-20,
    -2.288176205883460265e-20,
    7.902569216604706480e-21,
    -2.480587955667582176e-21,
];
const CHEB_K1E: [f64; 32] = [
    2.720626190484442669,
    0.1039237365768172384,
    -0.002857816859622779387,
    0.0001952155184713516311,
    -0.00001936197974166082960,
    2.406484947837217117e-6,
    -3.501960603087812542e-7,
    5.741084125450049292e-8,
    -1.034576246567809703e-8,
    2.015049755197034616e-9,
    -4.190354759341925584e-10,
    9.218315187605314125e-11,
    -2.129967838427791021e-11,
    5.139639673482343520e-12,
    -1.289173960949822887e-12,
    3.348419666052241950e-13,
    -8.976705182010117728e-14,
    2.477154424219529625e-14,
    -7.019837089213075181e-15,
    2.038703166235678923e-15,
    -6.057047270539039146e-16,
    1.838093574982659847e-16,
    -5.689462842624688249e-17,
    1.794051031187445392e-17,
    -5.756744054212516246e-18,
    1.877864084920999672e-18,
    -6.221616495020340742e-19,
    2.091836862106551391e-19,
    -7.130706354498002905e-20,
    2.459203624299055670e-20,
    -8.479272954759775593e-21,
    2.658193446022798996e-21,
];
const CHEB_I0E: [f64; 28] = [
    0.8044904110141088316,
    0.003369116478255694090,
    0.00006889758346916823984,
    2.891370520834756483e-6,
    2.048918589469063742e-7,
    2.266668990498178065e-8,
    3.396232025708386333e-9,
    4.940602388224969653e-10,
    1.188914710784647874e-11,
    -3.149916527963249824e-11,
    -1.321581184044776104e-11,
    -1.794178531506385103e-12,
    7.180124451379977193e-13,
    3.852778382729006892e-13,
    1.540086217851674370e-14,
    -4.150569347128702653e-14,
    -9.554846715438468653e-15,
    3.811680682040718717e-15,
    1.772560194066510084e-15,
    -3.425486884873102654e-16,
    -2.827625482650154857e-16,
    3.461298365947654859e-17,
    4.465620151999111953e-17,
    -4.834191418228008375e-18,
    -7.229909672864161656e-18,
    1.008167090289119556e-18,
    1.164790374883089861e-18,
    -3.133175506888151693e-19,
];
const CHEB_I1E: [f64; 28] = [
    0.7785762350182801205,
    -0.009761097491361468408,
    -0.0001105889387626237163,
    -3.882564808877690393e-6,
    -2.512236237870208925e-7,
    -2.631468846889519507e-8,
    -3.835380385964237010e-9,
    -5.589743462196583878e-10,
    -1.897495812350545280e-11,
    3.252603583015496973e-11,
    1.412580743661382558e-11,
    2.035628544146661793e-12,
    -7.198551776241967805e-13,
    -4.083551111079102741e-13,
    -2.101541843113620098e-14,
    4.272440016568891746e-14,
    1.042027700103717967e-14,
    -3.814403086199805433e-15,
    -1.880354836677331077e-15,
    3.308203629146215031e-16,
    2.962630450436847335e-16,
    -3.209603521968540434e-17,
    -4.650299581451931236e-17,
    4.418100341019644283e-18,
    7.513735396877794896e-18,
    -9.475463052492031169e-19,
    -1.211695150671160016e-18,
    3.053703438281758317e-19,
];

/// Modified Bessel function I0. Defined for all real x (even function).
pub fn i0(x: f64) -> f64 {
    let ax = x.abs();
    if ax <= I_SWITCH {
        i0_series(ax)
    } else {
        i0_large(ax)
    }
}

/// Modified Bessel function I1. Odd function.
pub fn i1(x: f64) -> f64 {
    let ax = x.abs();
    let v = if ax <= I_SWITCH {
        i1_series(ax)
    } else {
        i1_large(ax)
    };
    if x < 0.0 {
        -v
    } else {
        v
    }
}

pub(crate) fn i0_series(x: f64) -> f64 {
    let t = x * x / 4.0;
    let mut term = 1.0;
    let mut sum = 1.0;
    for m in 1..MAX_SERIES {
        term *= t / ((m * m) as f64);
        sum += term;
        if term < SERIES_EPS * sum {
            break;
        }
    }
    sum
}

pub(crate) fn i1_series(x: f64) -> f64 {
    let t = x * x / 4.0;
    let mut term = 1.0;
    let mut sum = 1.0;
    for m in 1..MAX_SERIES {
        term *= t / ((m * (m + 1)) as f64);
        sum += term;
        if term < SERIES_EPS * sum {
            break;
        }
    }
    sum * x / 2.0
}

pub(crate) fn i0_large(x: f64) -> f64 {
    clenshaw(&CHEB_I0E, 16.0 / x - 1.0) * x.exp() / x.sqrt()
}

pub(crate) fn i1_large(x: f64) -> f64 {
    clenshaw(&CHEB_I1E, 16.0 / x - 1.0) * x.exp() / x.sqrt()
}

/// Modified Bessel function K0 for x > 0.
pub fn k0(x: f64) -> f64 {
    assert!(x > 0.0, "k0 requires x > 0, got {x}");
    if x <= K_SWITCH {
        k0_series(x)
    } else {
        k0_large(x)
    }
}

/// Modified Bessel function K1 for x > 0.
pub fn k1(x: f64) -> f64 {
    assert!(x > 0.0, "k1 requires x > 0, got {x}");
    if x <= K_SWITCH {
        k1_series(x)
    } else {
        k1_large(x)
    }
}

pub(crate) fn k0_series(x: f64) -> f64 {
    let t = x * x / 4.0;
    let lg = (x / 2.0).ln() + EULER_GAMMA;
    let mut term = 1.0;
    let mut i0s = 1.0;
    let mut hsum = 0.0;
    let mut h = 0.0;
    for m in 1..MAX_SERIES {
        term *= t / ((m * m) as f64);
        h += 1.0 / m as f64;
        i0s += term;
        hsum += term * h;
        if term * (1.0 + h) < SERIES_EPS {
            break;
        }
    }
    -lg * i0s + hsum
}

pub(crate) fn k1_series(x: f64) -> f64 {
    let t = x * x / 4.0;
    let mut term = 1.0;
    let mut sum = 0.0;
    let mut hk = 0.0; // H_k
    for k in 0..MAX_SERIES {
        let hk1 = hk + 1.0 / (k + 1) as f64;
        let c = term * (hk + hk1 - 2.0 * EULER_GAMMA);
        sum += c;
        term *= t / ((k + 1) as f64 * (k + 2) as f64);
        hk = hk1;
        if term * (2.0 * hk + 2.0) < SERIES_EPS {
            break;
        }
    }
    1.0 / x + (x / 2.0).ln() * i1_series(x) - (x / 4.0) * sum
}

pub(crate) fn k0_large(x: f64) -> f64 {
    clenshaw(&CHEB_K0E, 4.0 / x - 1.0) * (-x).exp() / x.sqrt()
}

pub(crate) fn k1_large(x: f64) -> f64 {
    clenshaw(&CHEB_K1E, 4.0 / x - 1.0) * (-x).exp() / x.sqrt()
}

/// Bessel function J0. Even function.
pub fn j0(x: f64) -> f64 {
    let ax = x.abs();
    if ax < JY_SWITCH {
        j_series(0, ax)
    } else {
        miller_jy(ax).j[0]
    }
}

/// Bessel function J1. Odd function.
pub fn j1(x: f64) -> f64 {
    let ax = x.abs();
    let v = if ax < JY_SWITCH {
        j_series(1, ax)
    } else {
        miller_jy(ax).j[1]
    };
    if x < 0.0 {
        -v
    } else {
        v
    }
}

/// Bessel function J_m for m in {0, 1, 2}.
pub fn jm(m: u32, x: f64) -> f64 {
    match m {
        0 => j0(x),
        1 => j1(x),
        2 => {
            let ax = x.abs();
            if ax < JY_SWITCH {
                j_series(2, ax)
            } else {
                let t = miller_jy(ax);
                2.0 * t.j[1] / ax - t.j[0]
            }
        }
        _ => panic!("jm supports m in 0..=2, got {m}"),
    }
}

/// Bessel function Y0 for x > 0.
pub fn y0(x: f64) -> f64 {
    assert!(x > 0.0, "y0 requires x > 0, got {x}");
    if x < JY_SWITCH {
        y0_series(x)
    } else {
        miller_jy(x).y0
    }
}

/// Bessel function Y1 for x > 0.
pub fn y1(x: f64) -> f64 {
    assert!(x > 0.0, "y1 requires x > 0, got {x}");
    if x < JY_SWITCH {
        y1_series(x)
    } else {
        miller_jy(x).y1
    }
}

/// Bessel function Y_m for m in {0, 1, 2}.
pub fn ym(m: u32, x: f64) -> f64 {
    match m {
        0 => y0(x),
        1 => y1(x),
        // upward recurrence; stable for Y
        2 => 2.0 * y1(x) / x - y0(x),
        _ => panic!("ym supports m in 0..=2, got {m}"),
    }
}

pub(crate) fn j_series(m: u32, x: f64) -> f64 {
    let t = x * x / 4.0;
    let mut term = 1.0;
    for k in 1..=m {
        term *= x / (2.0 * k as f64);
    }
    let mut sum = term;
    for k in 1..MAX_SERIES {
        term *= -t / (k as f64 * (k + m as usize) as f64);
        sum += term;
        if term.abs() < SERIES_EPS * sum.abs().max(1e-300) {
            break;
        }
    }
    sum
}

pub(crate) fn y0_series(x: f64) -> f64 {
    let t = x * x / 4.0;
    let lg = (x / 2.0).ln() + EULER_GAMMA;
    let mut term = 1.0;
    let mut hsum = 0.0;
    let mut h = 0.0;
    for m in 1..MAX_SERIES {
        term *= -t / ((m * m) as f64);
        h += 1.0 / m as f64;
        hsum -= term * h; // (-1)^{m+1} H_m t^m/(m!)^2
        if term.abs() * (1.0 + h) < SERIES_EPS {
            break;
        }
    }
    (2.0 / std::f64::consts::PI) * (lg * j_series(0, x) + hsum)
}

pub(crate) fn y1_series(x: f64) -> f64 {
    let t = x * x / 4.0;
    let mut term = 1.0;
    let mut sum = 0.0;
    let mut hk = 0.0;
    for k in 0..MAX_SERIES {
        let hk1 = hk + 1.0 / (k + 1) as f64;
        sum += term * (hk + hk1 - 2.0 * EULER_GAMMA);
        term *= -t / ((k + 1) as f64 * (k + 2) as f64);
        hk = hk1;
        if term.abs() * (2.0 * hk + 2.0) < SERIES_EPS {
            break;
        }
    }
    let pi = std::f64::consts::PI;
    (2.0 / pi) * (x / 2.0).ln() * j_series(1, x) - 2.0 / (pi * x) - (x / (2.0 * pi)) * sum
}

struct JyTable {
    j: [f64; 2],
    y0: f64,
    y1: f64,
}

/// Normalized downward recurrence for J_k(x) with the Neumann-series
/// companion for Y0 and Y1. Used for x >= JY_SWITCH.
fn miller_jy(x: f64) -> JyTable {
    let m_top = {
        let m = (1.4 * x + 42.0) as usize;
        m + (m & 1) // even start index
    };
    let mut jj = vec![0.0f64; m_top + 2];
    jj[m_top + 1] = 0.0;
    jj[m_top] = 1e-30;
    let mut norm = 0.0;
    for k in (1..=m_top).rev() {
        jj[k - 1] = (2.0 * k as f64 / x) * jj[k] - jj[k + 1];
        if (k - 1) % 2 == 0 && k - 1 > 0 {
            norm += jj[k - 1];
        }
        if jj[k - 1].abs() > 1e250 {
            let s = 1e-250;
            for v in jj[k - 1..].iter_mut() {
                *v *= s;
            }
            norm *= s;
        }
    }
    norm = 2.0 * norm + jj[0];
    let scale = 1.0 / norm;
    for v in jj.iter_mut() {
        *v *= scale;
    }
    // Y0 = (2/pi)[(ln(x/2)+g) J0 + 2 sum (-1)^{k+1} J_{2k}/k]
    // Y1 = -Y0', differentiated term by term with J' = (J_{m-1} - J_{m+1})/2.
    let lg = (x / 2.0).ln() + EULER_GAMMA;
    let mut s = 0.0;
    let mut sp = 0.0;
    let mut sign = 1.0; // (-1)^{k+1} for k = 1
    let kmax = (m_top - 1) / 2;
    for k in 1..=kmax {
        s += sign * jj[2 * k] / k as f64;
        sp += sign * (jj[2 * k - 1] - jj[2 * k + 1]) / (2.0 * k as f64);
        sign = -sign;
    }
    let pi = std::f64::consts::PI;
    let y0 = (2.0 / pi) * (lg * jj[0] + 2.0 * s);
    let y0p = (2.0 / pi) * (jj[0] / x - lg * jj[1] + 2.0 * sp);
    JyTable {
        j: [jj[0], jj[1]],
        y0,
        y1: -y0p,
    }
}

/// Derivative J_m'(x) for m in {0, 1, 2}.
pub fn jm_prime(m: u32, x: f64) -> f64 {
    match m {
        0 => -j1(x),
        1 => j0(x) - j1(x) / x,
        2 => j1(x) - 2.0 * jm(2, x) / x,
        _ => panic!("jm_prime supports m in 0..=2, got {m}"),
    }
}

/// k-th positive zero of J_m, for m in {0, 1, 2} and k >= 1.
///
/// Bracketed from the McMahon estimate and polished by bisection + Newton
/// to full double precision.
pub fn bessel_zero(m: u32, k: u32) -> Result<f64> {
    if m > 2 {
        return Err(Error::domain(format!("bessel_zero supports m in 0..=2, got {m}")));
    }
    if k == 0 {
        return Err(Error::domain("bessel_zero requires k >= 1".to_string()));
    }
    let mf = m as f64;
    let beta = (k as f64 + mf / 2.0 - 0.25) * std::f64::consts::PI;
    let mu = 4.0 * mf * mf;
    // McMahon expansion, two terms
    let est = beta - (mu - 1.0) / (8.0 * beta)
        - 4.0 * (mu - 1.0) * (7.0 * mu - 31.0) / (3.0 * (8.0 * beta).powi(3));
    let mut lo = est - 0.6;
    let mut hi = est + 0.6;
    let f = |x: f64| jm(m, x);
    let mut flo = f(lo);
    let mut fhi = f(hi);
    let mut widen = 0;
    while flo * fhi > 0.0 {
        lo -= 0.3;
        hi += 0.3;
        flo = f(lo);
        fhi = f(hi);
        widen += 1;
        if widen > 8 {
            return Err(Error::numerical(format!(
                "failed to bracket zero j_{m},{k} near {est}"
            )));
        }
    }
    for _ in 0..80 {
        let mid = 0.5 * (lo + hi);
        let fm = f(mid);
        if flo * fm <= 0.0 {
            hi = mid;
        } else {
            lo = mid;
            flo = fm;
        }
    }
    let mut x = 0.5 * (lo + hi);
    for _ in 0..4 {
        let d = jm(m, x) / jm_prime(m, x);
        x -= d;
        if d.abs() < 1e-15 * x {
            break;
        }
    }
    Ok(x)
}
