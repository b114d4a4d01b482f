//! Reference implementations used only by tests. None of these share code
//! paths with the library: integrals use adaptive Gauss–Kronrod, the
//! decoder works on likelihood ratios, and the encoder multiplies by an
//! explicit generator matrix.

#![allow(dead_code)]

use std::f64::consts::PI;

// Gauss–Kronrod 7/15 abscissae and weights on [-1, 1].
const XGK: [f64; 8] = [
    0.991455371120812639206854697526329,
    0.949107912342758524526189684047851,
    0.864864423359769072789712788640926,
    0.741531185599394439863864773280788,
    0.586087235467691130294144845693013,
    0.405845151377397166906606412076961,
    0.207784955007898467600689403773245,
    0.000000000000000000000000000000000,
];
const WGK: [f64; 8] = [
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

/// Returns (integral, error estimate, integral of |f|).
fn gk15<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64) -> (f64, f64, f64) {
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let fc = f(c);
    let mut kronrod = fc * WGK[7];
    let mut gauss = fc * WG[3];
    let mut abs = fc.abs() * WGK[7];
    for j in 0..7 {
        let dx = h * XGK[j];
        let (l, r) = (f(c - dx), f(c + dx));
        kronrod += WGK[j] * (l + r);
        abs += WGK[j] * (l.abs() + r.abs());
        if j % 2 == 1 {
            gauss += WG[j / 2] * (l + r);
        }
    }
    (kronrod * h, (kronrod - gauss).abs() * h, abs * h.abs())
}

fn adapt<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64, tol: f64, depth: u32) -> f64 {
    let (value, err, abs) = gk15(f, a, b);
    // Below this the estimate is rounding noise.
    let floor = 50.0 * f64::EPSILON * abs;
    if err <= tol.max(floor) || depth == 0 {
        return value;
    }
    let m = 0.5 * (a + b);
    adapt(f, a, m, 0.5 * tol, depth - 1) + adapt(f, m, b, 0.5 * tol, depth - 1)
}

/// Adaptive Gauss–Kronrod over [a, b] with user-supplied breakpoints.
pub fn integrate<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, breaks: &[f64], tol: f64) -> f64 {
    let mut pts = vec![a];
    pts.extend(breaks.iter().copied().filter(|&p| p > a && p < b));
    pts.push(b);
    pts.sort_by(f64::total_cmp);
    pts.windows(2).map(|w| adapt(&f, w[0], w[1], tol, 40)).sum()
}

fn gaussian_kernel(x: f64) -> impl Fn(f64) -> f64 {
    move |u: f64| (-(u - x) * (u - x) / (4.0 * x)).exp() / (4.0 * PI * x).sqrt()
}

/// Exact GA φ by the literal integral, integrated over x ± 20·√(2x).
pub fn phi_exact_oracle(x: f64) -> f64 {
    if x == 0.0 {
        return 1.0;
    }
    let k = gaussian_kernel(x);
    let half = 20.0 * (2.0 * x).sqrt();
    1.0 - integrate(
        |u| (u / 2.0).tanh() * k(u),
        x - half,
        x + half,
        &[0.0, x],
        1e-12,
    )
}

/// Published PGA inner function, written literally.
pub fn pga_inner_literal(v: f64) -> f64 {
    let (a, b, c, d) = (1.9e7, 8.4e-9, -1.8e7, -8.5e-9);
    if v > 3.1 {
        1.0
    } else if v < -3.1 {
        -1.0
    } else {
        a * (b * v).exp() + c * (d * v).exp()
    }
}

/// Piecewise φ by the literal integral, splitting at the clamp points.
pub fn phi_p_exact_oracle(x: f64) -> f64 {
    if x == 0.0 {
        return 1.0;
    }
    let k = gaussian_kernel(x);
    let half = 20.0 * (2.0 * x).sqrt();
    1.0 - integrate(
        |u| pga_inner_literal(u / 2.0) * k(u),
        x - half,
        x + half,
        &[-6.2, 6.2, x],
        1e-12,
    )
}

/// Inverse of a decreasing function on [0, hi] by `steps` bisections.
pub fn bisect_decreasing<F: Fn(f64) -> f64>(f: F, y: f64, mut hi: f64, steps: u32) -> f64 {
    while f(hi) > y {
        hi *= 2.0;
    }
    let mut lo = 0.0;
    for _ in 0..steps {
        let mid = 0.5 * (lo + hi);
        if f(mid) > y {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

/// Mean LLR of subchannel `i` of a length-`n` code by top-down recursion:
/// the physical channel is split first, and the upper half of the indices
/// is the length-`n/2` code over the variable-node child.
pub fn recursive_mean<F: Fn(f64) -> (f64, f64) + Copy>(
    n: usize,
    i: usize,
    root: f64,
    pair: F,
) -> f64 {
    if n == 1 {
        return root;
    }
    let h = n / 2;
    let (minus, plus) = pair(root);
    if i < h {
        recursive_mean(h, i, minus, pair)
    } else {
        recursive_mean(h, i - h, plus, pair)
    }
}

/// Generator matrix F^{⊗n} as rows of bits.
pub fn kronecker_generator(n: usize) -> Vec<Vec<u8>> {
    let mut g = vec![vec![1u8]];
    while g.len() < n {
        let m = g.len();
        let mut next = vec![vec![0u8; 2 * m]; 2 * m];
        // F = [[1, 0], [1, 1]]  ->  [[G, 0], [G, G]]
        for r in 0..m {
            for c in 0..m {
                next[r][c] = g[r][c];
                next[m + r][c] = g[r][c];
                next[m + r][m + c] = g[r][c];
            }
        }
        g = next;
    }
    g
}

pub fn matrix_encode(u: &[u8], g: &[Vec<u8>]) -> Vec<u8> {
    let n = u.len();
    (0..n)
        .map(|col| (0..n).fold(0u8, |acc, row| acc ^ (u[row] & g[row][col])))
        .collect()
}

/// SC decoding written directly with likelihood ratios:
/// f(a, b) = (1 + ab)/(a + b), g(a, b, s) = a^{1−2s}·b, decide 0 iff LR ≥ 1.
/// Returns (u_hat, re-encoded x_hat).
pub fn sc_decode_lr(lr: &[f64], frozen: &[bool]) -> (Vec<u8>, Vec<u8>) {
    let n = lr.len();
    if n == 1 {
        let u = if frozen[0] || lr[0] >= 1.0 { 0 } else { 1 };
        return (vec![u], vec![u]);
    }
    let h = n / 2;
    let upper: Vec<f64> = (0..h)
        .map(|i| (1.0 + lr[i] * lr[i + h]) / (lr[i] + lr[i + h]))
        .collect();
    let (u1, x1) = sc_decode_lr(&upper, &frozen[..h]);
    let lower: Vec<f64> = (0..h)
        .map(|i| lr[i].powi(1 - 2 * i32::from(x1[i])) * lr[i + h])
        .collect();
    let (u2, x2) = sc_decode_lr(&lower, &frozen[h..]);
    let mut u = u1;
    u.extend_from_slice(&u2);
    let mut x: Vec<u8> = x1.iter().zip(&x2).map(|(a, b)| a ^ b).collect();
    x.extend_from_slice(&x2);
    (u, x)
}

/// Small deterministic generator for test inputs.
pub struct TestRng(u64);

impl TestRng {
    pub fn new(seed: u64) -> Self {
        TestRng(seed ^ 0x2545_f491_4f6c_dd1d)
    }

    pub fn next_u64(&mut self) -> u64 {
        self.0 ^= self.0 << 13;
        self.0 ^= self.0 >> 7;
        self.0 ^= self.0 << 17;
        self.0
    }

    pub fn bit(&mut self) -> u8 {
        (self.next_u64() >> 40) as u8 & 1
    }

    pub fn bits(&mut self, n: usize) -> Vec<u8> {
        (0..n).map(|_| self.bit()).collect()
    }

    /// Uniform in [lo, hi).
    pub fn uniform(&mut self, lo: f64, hi: f64) -> f64 {
        lo + (hi - lo) * ((self.next_u64() >> 11) as f64 / (1u64 << 53) as f64)
    }
}
