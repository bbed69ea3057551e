//! Adaptive Gauss-Kronrod quadrature and the integral form of the spherical
//! solutions, independent of the library's closed forms.

use compact_wave::oracles::{ProfileKind, RadialRole};

/// 7-point Gauss / 15-point Kronrod pair on `[a, b]`: `(kronrod, |kronrod - gauss|)`.
pub fn gk15(f: &dyn Fn(f64) -> f64, a: f64, b: f64) -> (f64, f64) {
    const XK: [f64; 8] = [
        0.991455371120812639206854697526329,
        0.949107912342758524526189684047851,
        0.864864423359769072789712788640926,
        0.741531185599394439863864773280788,
        0.586087235467691130294144845693013,
        0.405845151377397166906606412076961,
        0.207784955007898467600689403773245,
        0.000000000000000000000000000000000,
    ];
    const WK: [f64; 8] = [
        0.022935322010529224963732008058970,
        0.063092092629978553290700663189204,
        0.104790010322250183839876322541518,
        0.140653259715525918745189590510238,
        0.169004726639267902826583426598550,
        0.190350578064785409913256402421014,
        0.204432940075298892414161999234649,
        0.209482141084727828012999174891714,
    ];
    const WG: [f64; 4] = [
        0.129484966168869693270611432679082,
        0.279705391489276667901467771423780,
        0.381830050505118944950369775488975,
        0.417959183673469387755102040816327,
    ];
    let (c, h) = (0.5 * (a + b), 0.5 * (b - a));
    let fc = f(c);
    let mut k = WK[7] * fc;
    let mut g = WG[3] * fc;
    for i in 0..7 {
        let s = f(c - h * XK[i]) + f(c + h * XK[i]);
        k += WK[i] * s;
        if i % 2 == 1 {
            g += WG[i / 2] * s;
        }
    }
    (k * h, ((k - g) * h).abs())
}

pub fn adaptive(f: &dyn Fn(f64) -> f64, a: f64, b: f64, tol: f64, depth: u32) -> f64 {
    let (k, err) = gk15(f, a, b);
    if err <= tol || depth == 0 || (b - a).abs() < 1e-15 {
        return k;
    }
    let m = 0.5 * (a + b);
    adaptive(f, a, m, 0.5 * tol, depth - 1) + adaptive(f, m, b, 0.5 * tol, depth - 1)
}

/// Integral over `[a, b]` split at every breakpoint inside it.
pub fn integrate(f: &dyn Fn(f64) -> f64, a: f64, b: f64, breaks: &[f64], tol: f64) -> f64 {
    let (lo, hi, sign) = if a <= b { (a, b, 1.0) } else { (b, a, -1.0) };
    let mut pts = vec![lo];
    pts.extend(breaks.iter().copied().filter(|&p| p > lo && p < hi));
    pts.push(hi);
    pts.sort_by(f64::total_cmp);
    sign * pts
        .windows(2)
        .map(|w| adaptive(f, w[0], w[1], tol, 40))
        .sum::<f64>()
}

/// The d'Alembert-type representation evaluated by quadrature, with the data
/// written out directly from their piecewise definitions.
pub fn quadrature_solution(role: RadialRole, kind: ProfileKind, r0: f64, a: f64, r: f64, t: f64) -> f64 {
    let w = move |q: f64| -> f64 {
        let q = q.abs();
        let s = q / r0;
        match kind {
            ProfileKind::W0 => (q < r0) as u8 as f64,
            ProfileKind::W1 => if q <= r0 { 1.0 - s } else { 0.0 },
            ProfileKind::W2 => if q <= r0 { s * s * (1.0 - s).powi(2) } else { 0.0 },
        }
    };
    let breaks = [-r0, 0.0, r0];
    let at = a * t;
    let tol = 1e-15;
    match role {
        RadialRole::InitialValue => {
            ((r - at) * w(r - at) + (r + at) * w(r + at)) / (2.0 * r)
        }
        RadialRole::InitialVelocity => {
            integrate(&|q| q * w(q), r - at, r + at, &breaks, tol) / (2.0 * a * r)
        }
        RadialRole::Source => {
            let inner = |tau: f64| {
                let d = a * (t - tau);
                integrate(&|q| q * w(q), r - d, r + d, &breaks, tol)
            };
            // The inner limits cross a breakpoint when r ± a(t - τ) hits one.
            let mut tau_breaks = Vec::new();
            for b in breaks {
                let d = (r - b).abs();
                tau_breaks.push(t - d / a);
            }
            integrate(&inner, 0.0, t, &tau_breaks, 1e-14) / (2.0 * a * r)
        }
    }
}
