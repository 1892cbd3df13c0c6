use std::cmp::Ordering;
use std::collections::BinaryHeap;
use std::f64::consts::{FRAC_PI_2, PI, SQRT_2};

use crate::error::{Error, Result};

/// Order used for `E_Phi[.]` evaluations unless a caller asks otherwise.
pub const DEFAULT_HERMITE_ORDER: usize = 64;
pub const MAX_HERMITE_ORDER: usize = 256;

/// Nodes and positive weights of an interpolatory rule, nodes ascending.
#[derive(Debug, Clone, PartialEq)]
pub struct QuadratureRule {
    nodes: Vec<f64>,
    weights: Vec<f64>,
}

impl QuadratureRule {
    pub fn new(nodes: Vec<f64>, weights: Vec<f64>) -> Result<Self> {
        if nodes.is_empty() || nodes.len() != weights.len() {
            return Err(Error::InvalidParameter(format!(
                "quadrature rule needs matching non-empty node/weight lists ({} vs {})",
                nodes.len(),
                weights.len()
            )));
        }
        if nodes.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::InvalidParameter("quadrature nodes must be strictly increasing".into()));
        }
        if weights.iter().any(|&w| !(w > 0.0)) {
            return Err(Error::InvalidParameter("quadrature weights must be positive".into()));
        }
        Ok(Self { nodes, weights })
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }
}

/// Physicists' Gauss-Hermite rule (weight `exp(-x²)`) of order `n`, `1 <= n <= 256`.
///
/// Starting points are the eigenvalues of the symmetric Jacobi matrix
/// (Golub-Welsch); each is then polished by Newton's method on the orthonormal
/// Hermite recurrence, which also yields the weight `2 / H'_n(x)²`.
pub fn gauss_hermite(n: usize) -> Result<QuadratureRule> {
    if !(1..=MAX_HERMITE_ORDER).contains(&n) {
        return Err(Error::InvalidParameter(format!(
            "Gauss-Hermite order must be in 1..={MAX_HERMITE_ORDER}, got {n}"
        )));
    }
    const PI_M4: f64 = 0.751_125_544_464_942_5; // pi^(-1/4)
    let nf = n as f64;
    let mut offdiag: Vec<f64> = (1..n).map(|k| (k as f64 / 2.0).sqrt()).collect();
    let mut nodes = vec![0.0; n];
    tridiagonal_eigenvalues(&mut nodes, &mut offdiag);
    nodes.sort_by(f64::total_cmp);
    // Exact symmetry: mirror the positive half.
    for i in 0..n / 2 {
        let z = 0.5 * (nodes[n - 1 - i] - nodes[i]);
        nodes[i] = -z;
        nodes[n - 1 - i] = z;
    }
    if n % 2 == 1 {
        nodes[n / 2] = 0.0;
    }
    let mut weights = vec![0.0; n];
    for i in (n / 2)..n {
        let mut z = nodes[i];
        for _ in 0..20 {
            let (p1, p2) = hermite_orthonormal(n, z, PI_M4);
            let step = p1 / ((2.0 * nf).sqrt() * p2);
            z -= step;
            if step.abs() <= 1e-15 * z.abs().max(1.0) {
                break;
            }
        }
        if nodes[i] == 0.0 {
            z = 0.0;
        }
        let (_, p2) = hermite_orthonormal(n, z, PI_M4);
        let pp = (2.0 * nf).sqrt() * p2;
        nodes[i] = z;
        nodes[n - 1 - i] = -z;
        weights[i] = 2.0 / (pp * pp);
        weights[n - 1 - i] = weights[i];
    }
    QuadratureRule::new(nodes, weights)
}

/// Eigenvalues of a symmetric tridiagonal matrix with diagonal `d` and
/// sub-diagonal `e` (length `n - 1`) by implicit QL; results overwrite `d`.
fn tridiagonal_eigenvalues(d: &mut [f64], e: &mut Vec<f64>) {
    let n = d.len();
    e.push(0.0);
    for l in 0..n {
        let mut iter = 0;
        loop {
            let mut m = l;
            while m + 1 < n {
                let dd = d[m].abs() + d[m + 1].abs();
                if e[m].abs() <= f64::EPSILON * dd {
                    break;
                }
                m += 1;
            }
            if m == l {
                break;
            }
            iter += 1;
            if iter > 60 {
                break;
            }
            let mut g = (d[l + 1] - d[l]) / (2.0 * e[l]);
            let mut r = g.hypot(1.0);
            g = d[m] - d[l] + e[l] / (g + r.copysign(g));
            let (mut s, mut c, mut p) = (1.0, 1.0, 0.0);
            let mut i = m;
            let mut deflated = false;
            while i > l {
                i -= 1;
                let f = s * e[i];
                let b = c * e[i];
                r = f.hypot(g);
                e[i + 1] = r;
                if r == 0.0 {
                    d[i + 1] -= p;
                    e[m] = 0.0;
                    deflated = true;
                    break;
                }
                s = f / r;
                c = g / r;
                g = d[i + 1] - p;
                r = (d[i] - g) * s + 2.0 * c * b;
                p = s * r;
                d[i + 1] = g + p;
                g = c * r - b;
            }
            if deflated {
                continue;
            }
            d[l] -= p;
            e[l] = g;
            e[m] = 0.0;
        }
    }
}

/// Values of the orthonormal Hermite functions of degree `n` and `n - 1` at `z`.
fn hermite_orthonormal(n: usize, z: f64, start: f64) -> (f64, f64) {
    let mut p1 = start;
    let mut p2 = 0.0;
    for j in 0..n {
        let p3 = p2;
        p2 = p1;
        let jf = j as f64;
        p1 = z * (2.0 / (jf + 1.0)).sqrt() * p2 - (jf / (jf + 1.0)).sqrt() * p3;
    }
    (p1, p2)
}

/// `E[g(Z)]` for `Z ~ N(0, 1)` via `(1/sqrt(pi)) sum w_i g(sqrt(2) x_i)`.
pub fn expect_std_normal<G: Fn(f64) -> f64>(g: G, rule: &QuadratureRule) -> f64 {
    let sum: f64 = rule
        .nodes
        .iter()
        .zip(&rule.weights)
        .map(|(&x, &w)| w * g(SQRT_2 * x))
        .sum();
    sum / PI.sqrt()
}

// 15-point Kronrod extension of the 7-point Gauss rule.
const XGK: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_4,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_5,
    0.0,
];
const WGK: [f64; 8] = [
    0.022_935_322_010_529_22,
    0.063_092_092_629_978_55,
    0.104_790_010_322_250_2,
    0.140_653_259_715_525_9,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_4,
    0.204_432_940_075_298_9,
    0.209_482_141_084_727_8,
];
const WG: [f64; 4] = [
    0.129_484_966_168_869_7,
    0.279_705_391_489_276_7,
    0.381_830_050_505_118_9,
    0.417_959_183_673_469_4,
];

const MAX_INTERVALS: usize = 8_000;
const INITIAL_PIECES: usize = 16;

struct Piece {
    a: f64,
    b: f64,
    value: f64,
    error: f64,
}

impl PartialEq for Piece {
    fn eq(&self, other: &Self) -> bool {
        self.error == other.error
    }
}
impl Eq for Piece {}
impl PartialOrd for Piece {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Piece {
    fn cmp(&self, other: &Self) -> Ordering {
        self.error.total_cmp(&other.error)
    }
}

fn kronrod<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64) -> Piece {
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let fc = f(center);
    let mut kronrod = WGK[7] * fc;
    let mut gauss = WG[3] * fc;
    for j in 0..7 {
        let dx = half * XGK[j];
        let pair = f(center - dx) + f(center + dx);
        kronrod += WGK[j] * pair;
        if j % 2 == 1 {
            gauss += WG[j / 2] * pair;
        }
    }
    let value = kronrod * half;
    let error = ((kronrod - gauss) * half).abs();
    Piece { a, b, value, error }
}

fn adaptive_finite<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, tol: f64) -> Result<f64> {
    let mut heap = BinaryHeap::new();
    let width = (b - a) / INITIAL_PIECES as f64;
    for i in 0..INITIAL_PIECES {
        let lo = a + width * i as f64;
        let hi = if i + 1 == INITIAL_PIECES { b } else { lo + width };
        heap.push(kronrod(&f, lo, hi));
    }
    loop {
        let value: f64 = heap.iter().map(|p| p.value).sum();
        let error: f64 = heap.iter().map(|p| p.error).sum();
        if !value.is_finite() {
            return Err(Error::QuadratureTolerance { tol, estimate: f64::INFINITY });
        }
        if error <= tol * value.abs().max(1.0) {
            return Ok(value);
        }
        if heap.len() >= MAX_INTERVALS {
            return Err(Error::QuadratureTolerance { tol, estimate: error });
        }
        let worst = heap.pop().expect("heap is never empty");
        let mid = 0.5 * (worst.a + worst.b);
        if mid <= worst.a || mid >= worst.b {
            // Interval cannot be split further in floating point.
            return Err(Error::QuadratureTolerance { tol, estimate: error });
        }
        heap.push(kronrod(&f, worst.a, mid));
        heap.push(kronrod(&f, mid, worst.b));
    }
}

/// Globally adaptive Gauss-Kronrod (7/15) quadrature of `f` over `[a, b]`.
///
/// Stops when the summed `|K15 - G7|` estimate is below `tol * max(1, |I|)`,
/// i.e. when either the absolute or the relative error target is met.
/// Infinite endpoints are mapped with `x = c ± tan(u)`; the doubly infinite
/// case is split at zero first.
pub fn adaptive_quad<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, tol: f64) -> Result<f64> {
    adaptive_dyn(&f, a, b, tol)
}

fn adaptive_dyn(f: &dyn Fn(f64) -> f64, a: f64, b: f64, tol: f64) -> Result<f64> {
    if !(tol > 0.0) || a.is_nan() || b.is_nan() {
        return Err(Error::InvalidParameter(format!(
            "adaptive_quad needs tol > 0 and ordered endpoints, got [{a}, {b}], tol {tol}"
        )));
    }
    if a == b {
        return Ok(0.0);
    }
    if a > b {
        return adaptive_dyn(f, b, a, tol).map(|v| -v);
    }
    match (a.is_finite(), b.is_finite()) {
        (true, true) => adaptive_finite(f, a, b, tol),
        (true, false) => adaptive_finite(
            |u: f64| {
                let c = u.cos();
                f(a + u.tan()) / (c * c)
            },
            0.0,
            FRAC_PI_2,
            tol,
        ),
        (false, true) => adaptive_finite(
            |u: f64| {
                let c = u.cos();
                f(b - u.tan()) / (c * c)
            },
            0.0,
            FRAC_PI_2,
            tol,
        ),
        (false, false) => {
            let left = adaptive_dyn(f, f64::NEG_INFINITY, 0.0, tol)?;
            let right = adaptive_dyn(f, 0.0, f64::INFINITY, tol)?;
            Ok(left + right)
        }
    }
}

/// `int f(x) dx` over the real line, split at `center` with both halves mapped
/// by `x = center ± scale tan(u)`; use when the mass sits far from the origin
/// or on a scale very different from one.
pub fn integrate_real_line<F: Fn(f64) -> f64>(f: F, center: f64, scale: f64, tol: f64) -> Result<f64> {
    if !(scale > 0.0) {
        return Err(Error::InvalidParameter(format!("scale must be positive, got {scale}")));
    }
    let right = adaptive_quad(|t| scale * f(center + scale * t), 0.0, f64::INFINITY, tol)?;
    let left = adaptive_quad(|t| scale * f(center - scale * t), 0.0, f64::INFINITY, tol)?;
    Ok(left + right)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::std_normal_pdf;

    #[test]
    fn low_order_rules() {
        let r1 = gauss_hermite(1).unwrap();
        assert_eq!(r1.nodes(), &[0.0]);
        assert!((r1.weights()[0] - PI.sqrt()).abs() < 1e-14);
        let r2 = gauss_hermite(2).unwrap();
        let h = std::f64::consts::FRAC_1_SQRT_2;
        assert!((r2.nodes()[0] + h).abs() < 1e-15 && (r2.nodes()[1] - h).abs() < 1e-15);
        for w in r2.weights() {
            assert!((w - PI.sqrt() / 2.0).abs() < 1e-14);
        }
    }

    #[test]
    fn weights_sum_to_sqrt_pi() {
        for n in [1, 2, 3, 7, 20, 64, 100, 128, 200, 256] {
            let rule = gauss_hermite(n).unwrap();
            let total: f64 = rule.weights().iter().sum();
            assert!((total - PI.sqrt()).abs() < 1e-12, "n = {n}: {total}");
            assert!(rule.nodes().windows(2).all(|w| w[0] < w[1]));
        }
    }

    #[test]
    fn order_range_checked() {
        assert!(gauss_hermite(0).is_err());
        assert!(gauss_hermite(257).is_err());
    }

    #[test]
    fn exact_for_polynomials_up_to_degree_2n_minus_1() {
        // int x^{2k} e^{-x²} dx = Gamma(k + 1/2)
        let n = 6;
        let rule = gauss_hermite(n).unwrap();
        for k in 0..n {
            let exact = crate::numerics::gamma_half_integer(2 * k as u32 + 1);
            let approx: f64 = rule
                .nodes()
                .iter()
                .zip(rule.weights())
                .map(|(x, w)| w * x.powi(2 * k as i32))
                .sum();
            assert!((approx - exact).abs() < 1e-12 * exact.max(1.0), "k = {k}");
        }
    }

    #[test]
    fn expectations_under_the_standard_normal() {
        let r2 = gauss_hermite(2).unwrap();
        assert!((expect_std_normal(|_| 1.0, &r2) - 1.0).abs() < 1e-15);
        assert!((expect_std_normal(|z| z * z, &r2) - 1.0).abs() < 1e-15);
        let r32 = gauss_hermite(32).unwrap();
        let cosh = expect_std_normal(f64::cosh, &r32);
        assert!(((cosh - 0.5f64.exp()) / 0.5f64.exp()).abs() <= 1e-10);
    }

    #[test]
    fn hermite_matches_adaptive_for_even_moments() {
        for n in [32, 64, 128] {
            let rule = gauss_hermite(n).unwrap();
            for k in [0, 2, 4, 6] {
                let gh = expect_std_normal(|z| z.powi(k), &rule);
                let aq = adaptive_quad(|z| z.powi(k) * std_normal_pdf(z), f64::NEG_INFINITY, f64::INFINITY, 1e-13)
                    .unwrap();
                assert!((gh - aq).abs() < 1e-10, "n = {n}, k = {k}: {gh} vs {aq}");
            }
        }
    }

    #[test]
    fn adaptive_examples() {
        assert!((adaptive_quad(|x| x, 0.0, 1.0, 1e-14).unwrap() - 0.5).abs() < 1e-15);
        let total = adaptive_quad(std_normal_pdf, f64::NEG_INFINITY, f64::INFINITY, 1e-12).unwrap();
        assert!((total - 1.0).abs() < 1e-10);
        let second = adaptive_quad(|x| x * x * std_normal_pdf(x), f64::NEG_INFINITY, f64::INFINITY, 1e-12).unwrap();
        assert!((second - 1.0).abs() < 1e-10);
        let reversed = adaptive_quad(|x| x, 1.0, 0.0, 1e-14).unwrap();
        assert!((reversed + 0.5).abs() < 1e-15);
    }

    #[test]
    fn half_infinite_ranges() {
        let upper = adaptive_quad(std_normal_pdf, 1.0, f64::INFINITY, 1e-13).unwrap();
        assert!((upper - crate::numerics::std_normal_sf(1.0)).abs() < 1e-13);
        let lower = adaptive_quad(std_normal_pdf, f64::NEG_INFINITY, -2.0, 1e-13).unwrap();
        assert!((lower - crate::numerics::std_normal_cdf(-2.0)).abs() < 1e-13);
    }

    #[test]
    fn shifted_real_line() {
        let f = |x: f64| std_normal_pdf((x - 250.0) / 0.01) / 0.01;
        let total = integrate_real_line(f, 250.0, 0.01, 1e-12).unwrap();
        assert!((total - 1.0).abs() < 1e-10);
    }

    #[test]
    fn reports_unreachable_tolerance() {
        let err = adaptive_quad(|x: f64| 1.0 / x.abs(), -1.0, 1.0, 1e-10).unwrap_err();
        assert!(matches!(err, Error::QuadratureTolerance { .. }));
    }
}
