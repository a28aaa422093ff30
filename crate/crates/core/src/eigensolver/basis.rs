//! Fundamental solutions of `y'' = V y` on one segment and their exact
//! quadratic integrals.

/// Below this `|V| h²` the Taylor branch is used.
pub(crate) const TAYLOR_THRESHOLD: f64 = 1e-3;
/// Below this `|V| h²` the integral series is used.
const SERIES_THRESHOLD: f64 = 1.0;

/// `C, S` with `C(0) = 1, C'(0) = 0, S(0) = 0, S'(0) = 1`, evaluated at `h`
/// and scaled by `exp(-shift)`.
#[derive(Debug, Clone, Copy)]
pub(crate) struct Basis {
    pub c: f64,
    pub s: f64,
    /// `C'(h) = V S(h)`.
    pub dc: f64,
    /// `S'(h) = C(h)`.
    pub ds: f64,
    pub shift: f64,
}

pub(crate) fn basis(v: f64, h: f64) -> Basis {
    let z = v * h * h;
    if z.abs() < TAYLOR_THRESHOLD {
        // C = Σ z^k/(2k)!, S = h Σ z^k/(2k+1)!
        let c = 1.0 + z / 2.0 * (1.0 + z / 12.0 * (1.0 + z / 30.0 * (1.0 + z / 56.0)));
        let s = h * (1.0 + z / 6.0 * (1.0 + z / 20.0 * (1.0 + z / 42.0 * (1.0 + z / 72.0))));
        Basis {
            c,
            s,
            dc: v * s,
            ds: c,
            shift: 0.0,
        }
    } else if v < 0.0 {
        let w = (-v).sqrt();
        let (sn, cs) = (w * h).sin_cos();
        Basis {
            c: cs,
            s: sn / w,
            dc: -w * sn,
            ds: cs,
            shift: 0.0,
        }
    } else {
        let k = v.sqrt();
        let e = (-2.0 * k * h).exp();
        let ch = 0.5 * (1.0 + e);
        let sh = 0.5 * (1.0 - e);
        Basis {
            c: ch,
            s: sh / k,
            dc: k * sh,
            ds: ch,
            shift: k * h,
        }
    }
}

/// `(∫₀ʰ C², ∫₀ʰ C S, ∫₀ʰ S²)` for `y'' = V y`.
pub(crate) fn quadratic_integrals(v: f64, h: f64) -> (f64, f64, f64) {
    let z = v * h * h;
    if z.abs() <= SERIES_THRESHOLD {
        // ∫S² = h³ Σ_{k≥1} z^{k-1} 2^{2k-1}/(2k+1)!,  ∫C² = h (1 + z Σ ...),
        // ∫CS = h² Σ_{k≥0} z^k 2^{2k}/(2k+2)!
        let (mut ss, mut cs) = (0.0, 0.0);
        let (mut t, mut u) = (1.0 / 3.0, 0.5);
        for k in 1..40 {
            let kf = k as f64;
            ss += t;
            cs += u;
            t *= 4.0 * z / ((2.0 * kf + 2.0) * (2.0 * kf + 3.0));
            u *= 4.0 * z / ((2.0 * kf + 1.0) * (2.0 * kf + 2.0));
            if t.abs() < 1e-18 && u.abs() < 1e-18 {
                break;
            }
        }
        let cc = 1.0 + z * ss;
        return (h * cc, h * h * cs, h * h * h * ss);
    }
    if v < 0.0 {
        let w = (-v).sqrt();
        let (s2, _) = (2.0 * w * h).sin_cos();
        let sn = (w * h).sin();
        (
            h / 2.0 + s2 / (4.0 * w),
            sn * sn / (2.0 * w * w),
            h / (2.0 * w * w) - s2 / (4.0 * w * w * w),
        )
    } else {
        let k = v.sqrt();
        let sh2 = (2.0 * k * h).sinh();
        let sh = (k * h).sinh();
        (
            h / 2.0 + sh2 / (4.0 * k),
            sh * sh / (2.0 * k * k),
            sh2 / (4.0 * k * k * k) - h / (2.0 * k * k),
        )
    }
}

/// `∫₀ᵗ y²` for the solution with `y(0) = y0`, `y'(0) = dy0`.
pub(crate) fn square_integral(y0: f64, dy0: f64, v: f64, t: f64) -> f64 {
    let (cc, cs, ss) = quadratic_integrals(v, t);
    (y0 * y0 * cc + 2.0 * y0 * dy0 * cs + dy0 * dy0 * ss).max(0.0)
}

/// `(y(t), y'(t))` from `(y0, dy0)` with constant `V` on `[0, t]`.
pub(crate) fn advance(y0: f64, dy0: f64, v: f64, t: f64) -> (f64, f64) {
    let b = basis(v, t);
    let scale = b.shift.exp();
    (
        (y0 * b.c + dy0 * b.s) * scale,
        (y0 * b.dc + dy0 * b.ds) * scale,
    )
}
