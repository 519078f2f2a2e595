//! Zooming grid search over `(alpha, beta)` for the Gaussian cascade program.

const N: usize = 800;
const LEVELS: usize = 5;
const WINDOW: usize = 3;

struct Inst {
    a: f64,
    b: f64,
    d2: f64,
    k: f64,
}

impl Inst {
    /// Returns `alpha^2 a` when `(alpha, beta)` is feasible.
    fn cost(&self, alpha: f64, beta: f64) -> Option<f64> {
        let ua = alpha * alpha * self.a;
        let power = ua + beta * beta * self.b;
        if power > self.k * (1.0 + 1e-12) {
            return None;
        }
        // Var(A+B | U) = Var(A+B) - Cov(A+B, U)^2 / Var(U), unit noise.
        let cov = alpha * self.a + beta * self.b;
        let cond = self.a + self.b - cov * cov / (power + 1.0);
        (cond <= self.d2 * (1.0 + 1e-12)).then_some(ua)
    }
}

fn logspace(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    (0..n)
        .map(|i| (lo.ln() + (hi.ln() - lo.ln()) * i as f64 / (n - 1) as f64).exp())
        .collect()
}

fn linspace(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    (0..n).map(|i| lo + (hi - lo) * i as f64 / (n - 1) as f64).collect()
}

/// Minimum first-hop rate found by an `N x N` grid refined `LEVELS - 1` times
/// around the best cell.
pub fn cascade_r1(a: f64, b: f64, d1: f64, d2: f64, r2: f64) -> f64 {
    let inst = Inst {
        a,
        b,
        d2,
        k: 2f64.powf(2.0 * r2) - 1.0,
    };
    let mut alphas = vec![0.0];
    alphas.extend(logspace(1e-4, 1e4, N - 1));
    let half = logspace(1e-4, 1e4, N / 2 - 1);
    let mut betas: Vec<f64> = half.iter().rev().map(|v| -v).collect();
    betas.push(0.0);
    betas.extend(half.iter().copied());
    // At the R2 threshold the feasible set shrinks to the single point where
    // the power constraint is tight and alpha = beta, so seed it explicitly.
    let tight = (inst.k / (a + b)).sqrt();
    alphas.push(tight);
    alphas.sort_by(f64::total_cmp);
    betas.push(tight);
    betas.sort_by(f64::total_cmp);

    let mut best = f64::INFINITY;
    for _ in 0..LEVELS {
        let mut arg = None;
        for (i, &al) in alphas.iter().enumerate() {
            for (j, &be) in betas.iter().enumerate() {
                if let Some(c) = inst.cost(al, be) {
                    if c < best {
                        best = c;
                        arg = Some((i, j));
                    }
                }
            }
        }
        let Some((i, j)) = arg else { break };
        let alo = alphas[i.saturating_sub(WINDOW)];
        let ahi = alphas[(i + WINDOW).min(alphas.len() - 1)];
        let blo = betas[j.saturating_sub(WINDOW)];
        let bhi = betas[(j + WINDOW).min(betas.len() - 1)];
        alphas = linspace(alo, ahi, N);
        betas = linspace(blo, bhi, N);
    }
    assert!(best.is_finite(), "oracle found no feasible cell");
    let floor = if a > 0.0 { 0.5 * (a / d1).log2() } else { 0.0 };
    floor.max(0.5 * (1.0 + best).log2()).max(0.0)
}
