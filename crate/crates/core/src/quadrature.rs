//! Globally adaptive Gauss-Kronrod (10/21) quadrature over a list of panels.
//!
//! The caller supplies the initial panel boundaries; the worst panel (largest
//! error estimate) is bisected until the summed error meets the tolerance.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tolerance {
    pub abs: f64,
    pub rel: f64,
}

impl Default for Tolerance {
    fn default() -> Self {
        Tolerance {
            abs: 1e-10,
            rel: 1e-8,
        }
    }
}

impl Tolerance {
    pub fn new(abs: f64, rel: f64) -> Result<Self> {
        if !(abs >= 0.0 && rel >= 0.0) || (abs == 0.0 && rel == 0.0) {
            return Err(Error::invalid(
                "tolerance",
                format!("abs = {abs}, rel = {rel} (need non-negative, not both zero)"),
            ));
        }
        Ok(Tolerance { abs, rel })
    }

    pub fn target(&self, value: f64) -> f64 {
        self.abs.max(self.rel * value.abs())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Estimate {
    pub value: f64,
    pub abs_error: f64,
    pub intervals: usize,
}

#[allow(clippy::excessive_precision)]
const XGK: [f64; 11] = [
    0.995_657_163_025_808_080_735_527_280_689_003,
    0.973_906_528_517_171_720_077_964_012_084_452,
    0.930_157_491_355_708_226_001_207_180_059_508,
    0.865_063_366_688_984_510_732_096_688_423_493,
    0.780_817_726_586_416_897_063_717_578_345_042,
    0.679_409_568_299_024_406_234_327_365_114_874,
    0.562_757_134_668_604_683_339_000_099_272_694,
    0.433_395_394_129_247_190_799_265_943_165_784,
    0.294_392_862_701_460_198_131_126_603_103_866,
    0.148_874_338_981_631_210_884_826_001_129_720,
    0.0,
];

#[allow(clippy::excessive_precision)]
const WG: [f64; 5] = [
    0.066_671_344_308_688_137_593_568_809_893_332,
    0.149_451_349_150_580_593_145_776_339_657_697,
    0.219_086_362_515_982_043_995_534_934_228_163,
    0.269_266_719_309_996_355_091_226_921_569_469,
    0.295_524_224_714_752_870_173_892_994_651_338,
];

#[allow(clippy::excessive_precision)]
const WGK: [f64; 11] = [
    0.011_694_638_867_371_874_278_064_396_062_192,
    0.032_558_162_307_964_727_478_818_972_459_390,
    0.054_755_896_574_351_996_031_381_300_244_580,
    0.075_039_674_810_919_952_767_043_140_916_190,
    0.093_125_454_583_697_605_535_065_465_083_366,
    0.109_387_158_802_297_641_899_210_590_325_805,
    0.123_491_976_262_065_851_077_958_109_831_074,
    0.134_709_217_311_473_325_928_054_001_771_707,
    0.142_775_938_577_060_080_797_094_273_138_717,
    0.147_739_104_901_338_491_374_841_515_972_068,
    0.149_445_554_002_916_905_664_936_468_389_821,
];

/// One 21-point Kronrod evaluation with the QUADPACK error rescaling.
fn gk21<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64) -> (f64, f64) {
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let f_center = f(center);

    let mut res_gauss = 0.0;
    let mut res_kronrod = f_center * WGK[10];
    let mut res_abs = res_kronrod.abs();
    let mut fv1 = [0.0; 10];
    let mut fv2 = [0.0; 10];

    for (j, wg) in WG.iter().enumerate() {
        let k = 2 * j + 1;
        let dx = half * XGK[k];
        let (f1, f2) = (f(center - dx), f(center + dx));
        fv1[k] = f1;
        fv2[k] = f2;
        res_gauss += wg * (f1 + f2);
        res_kronrod += WGK[k] * (f1 + f2);
        res_abs += WGK[k] * (f1.abs() + f2.abs());
    }
    for j in 0..5 {
        let k = 2 * j;
        let dx = half * XGK[k];
        let (f1, f2) = (f(center - dx), f(center + dx));
        fv1[k] = f1;
        fv2[k] = f2;
        res_kronrod += WGK[k] * (f1 + f2);
        res_abs += WGK[k] * (f1.abs() + f2.abs());
    }

    let mean = 0.5 * res_kronrod;
    let mut res_asc = WGK[10] * (f_center - mean).abs();
    for k in 0..10 {
        res_asc += WGK[k] * ((fv1[k] - mean).abs() + (fv2[k] - mean).abs());
    }

    let width = half.abs();
    let result = res_kronrod * half;
    res_abs *= width;
    res_asc *= width;

    let mut err = ((res_kronrod - res_gauss) * half).abs();
    if res_asc != 0.0 && err != 0.0 {
        err = res_asc * (200.0 * err / res_asc).powf(1.5).min(1.0);
    }
    if res_abs > f64::MIN_POSITIVE / (50.0 * f64::EPSILON) {
        err = err.max(50.0 * f64::EPSILON * res_abs);
    }
    (result, err)
}

struct Segment {
    a: f64,
    b: f64,
    value: f64,
    error: f64,
}

impl PartialEq for Segment {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}

impl Eq for Segment {}

impl PartialOrd for Segment {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Segment {
    fn cmp(&self, other: &Self) -> Ordering {
        self.error
            .total_cmp(&other.error)
            .then_with(|| other.a.total_cmp(&self.a))
    }
}

/// Integrates `f` over `[breakpoints[0], breakpoints[last]]`.
///
/// `breakpoints` must be strictly increasing with at least two entries.
/// At most `max_intervals` segments are ever held.
pub fn integrate_panels<F: Fn(f64) -> f64>(
    f: F,
    breakpoints: &[f64],
    tol: Tolerance,
    max_intervals: usize,
) -> Result<Estimate> {
    if breakpoints.len() < 2 {
        return Err(Error::invalid("breakpoints", "need at least two"));
    }
    if breakpoints.windows(2).any(|w| !(w[1] > w[0])) {
        return Err(Error::invalid("breakpoints", "must be strictly increasing"));
    }

    let mut heap = BinaryHeap::with_capacity(breakpoints.len());
    let mut frozen = Vec::new();
    let mut total = 0.0;
    let mut total_err = 0.0;
    for w in breakpoints.windows(2) {
        let (value, error) = gk21(&f, w[0], w[1]);
        total += value;
        total_err += error;
        heap.push(Segment {
            a: w[0],
            b: w[1],
            value,
            error,
        });
    }

    let max_intervals = max_intervals.max(breakpoints.len() - 1);
    let mut count = heap.len();
    while total_err > tol.target(total) {
        let Some(worst) = heap.pop() else { break };
        let mid = 0.5 * (worst.a + worst.b);
        let too_narrow = (worst.b - worst.a) <= 64.0 * f64::EPSILON * worst.a.abs().max(worst.b.abs());
        if too_narrow || count >= max_intervals {
            frozen.push(worst);
            if count >= max_intervals {
                break;
            }
            continue;
        }
        let (lv, le) = gk21(&f, worst.a, mid);
        let (rv, re) = gk21(&f, mid, worst.b);
        total += lv + rv - worst.value;
        total_err += le + re - worst.error;
        heap.push(Segment {
            a: worst.a,
            b: mid,
            value: lv,
            error: le,
        });
        heap.push(Segment {
            a: mid,
            b: worst.b,
            value: rv,
            error: re,
        });
        count += 1;
    }

    // Re-sum in domain order so the result does not depend on heap layout.
    let mut segments: Vec<Segment> = heap.into_vec();
    segments.extend(frozen);
    segments.sort_by(|x, y| x.a.total_cmp(&y.a));
    let value: f64 = segments.iter().map(|s| s.value).sum();
    let abs_error: f64 = segments.iter().map(|s| s.error).sum();
    let estimate = Estimate {
        value,
        abs_error,
        intervals: segments.len(),
    };
    if !value.is_finite() || abs_error > tol.target(value) {
        return Err(Error::NoConvergence {
            value,
            abs_error,
            intervals: estimate.intervals,
        });
    }
    Ok(estimate)
}

/// Plain adaptive integral over `[a, b]`.
pub fn integrate<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, tol: Tolerance) -> Result<Estimate> {
    if a == b {
        return Ok(Estimate {
            value: 0.0,
            abs_error: 0.0,
            intervals: 0,
        });
    }
    integrate_panels(f, &[a, b], tol, 10_000)
}
