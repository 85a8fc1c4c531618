//! Small quadrature toolbox: panel-doubling Gauss–Legendre for smooth
//! integrands, cumulative trapezoid sums on the solver grids, and a
//! fourth-order cumulative rule on uniform grids.

/// 10-point Gauss–Legendre abscissae on (0,1), symmetric about 1/2.
/// Values from the standard tabulation (Abramowitz & Stegun 25.4.30).
const GL_X: [f64; 5] = [
    0.013046735741414128,
    0.067468316655507744,
    0.160295215850487796,
    0.283302302935376404,
    0.425562830509184395,
];
const GL_W: [f64; 5] = [
    0.033335672154344069,
    0.074725674575290296,
    0.109543181257991021,
    0.134633359654998177,
    0.147762112357376435,
];

fn gl10<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64) -> f64 {
    let h = b - a;
    let mut s = 0.0;
    for i in 0..5 {
        s += GL_W[i] * (f(a + GL_X[i] * h) + f(b - GL_X[i] * h));
    }
    s * h
}

fn adapt<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64, whole: f64, tol: f64, depth: u32) -> f64 {
    let m = 0.5 * (a + b);
    let left = gl10(f, a, m);
    let right = gl10(f, m, b);
    let split = left + right;
    // Gauss-Legendre converges so fast on smooth panels that the halved-panel
    // difference is a safely pessimistic error estimate.
    if depth == 0 || (split - whole).abs() <= tol.max(1e-300) {
        return split;
    }
    adapt(f, a, m, left, 0.5 * tol, depth - 1) + adapt(f, m, b, right, 0.5 * tol, depth - 1)
}

/// Adaptive integral of `f` over `[a, b]` by panel doubling, absolute
/// tolerance `tol`. Intended for smooth, possibly boundary-decaying
/// integrands; max recursion depth 40 keeps runaway subdivision bounded.
pub fn adaptive_gauss<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, tol: f64) -> f64 {
    if a == b {
        return 0.0;
    }
    adapt(&f, a, b, gl10(&f, a, b), tol, 40)
}

/// Cumulative trapezoid sums of samples `y` on the (ascending) grid `t`,
/// anchored at zero at the first node.
pub fn cumtrapz(t: &[f64], y: &[f64]) -> Vec<f64> {
    assert_eq!(t.len(), y.len());
    let mut out = Vec::with_capacity(t.len());
    let mut acc = 0.0;
    out.push(0.0);
    for i in 1..t.len() {
        acc += 0.5 * (y[i - 1] + y[i]) * (t[i] - t[i - 1]);
        out.push(acc);
    }
    out
}

/// Composite-trapezoid weight of node `j` within the prefix `t[0..=i]`.
/// Summing `w(i,j) * y[j]` over `j ≤ i` reproduces the trapezoid integral
/// over `[t[0], t[i]]`; the kernel iterations use these for integrands that
/// depend on the target node as well as the source node.
#[inline]
pub fn prefix_trap_weight(t: &[f64], i: usize, j: usize) -> f64 {
    if i == 0 {
        return 0.0;
    }
    if j == 0 {
        0.5 * (t[1] - t[0])
    } else if j == i {
        0.5 * (t[i] - t[i - 1])
    } else {
        0.5 * (t[j + 1] - t[j - 1])
    }
}

/// Cumulative integral on a uniform grid with fourth-order local rules:
/// composite Simpson to even nodes, a 3-point Newton–Cotes half-panel to odd
/// nodes. `y.len()` must be odd so the grid has an even panel count.
pub fn cumsimpson_uniform(h: f64, y: &[f64]) -> Vec<f64> {
    assert!(y.len() >= 3 && y.len() % 2 == 1, "need an odd sample count");
    let mut out = vec![0.0; y.len()];
    for j in (2..y.len()).step_by(2) {
        out[j] = out[j - 2] + h / 3.0 * (y[j - 2] + 4.0 * y[j - 1] + y[j]);
    }
    for j in (1..y.len()).step_by(2) {
        out[j] = out[j - 1] + h / 12.0 * (5.0 * y[j - 1] + 8.0 * y[j] - y[j + 1]);
    }
    out
}
