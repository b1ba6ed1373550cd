//! Local optimizers over R^k: Nelder–Mead, Powell and a finite-difference
//! Levenberg–Marquardt for least-squares residuals.

use std::cell::Cell;
use std::time::Instant;

use nalgebra::{DMatrix, DVector};

#[derive(Clone, Debug)]
pub struct OptOptions {
    pub max_evals: usize,
    /// Stop as soon as the objective reaches this value.
    pub target: f64,
    pub xtol: f64,
    pub ftol: f64,
    /// Initial simplex edge / line-search scale.
    pub step: f64,
    pub deadline: Option<Instant>,
}

impl Default for OptOptions {
    fn default() -> Self {
        OptOptions { max_evals: 10_000, target: 0.0, xtol: 1e-10, ftol: 1e-14, step: 0.1, deadline: None }
    }
}

impl OptOptions {
    fn out_of_time(&self) -> bool {
        self.deadline.is_some_and(|d| Instant::now() >= d)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct OptOutcome {
    pub x: Vec<f64>,
    pub f: f64,
    pub evals: usize,
}

struct Counted<'a> {
    f: &'a dyn Fn(&[f64]) -> f64,
    n: Cell<usize>,
}

impl Counted<'_> {
    fn call(&self, x: &[f64]) -> f64 {
        self.n.set(self.n.get() + 1);
        let v = (self.f)(x);
        if v.is_nan() {
            f64::INFINITY
        } else {
            v
        }
    }
}

/// Simplex search with reflection 1, expansion 2, contraction 0.5, shrink 0.5.
pub fn nelder_mead(f: &dyn Fn(&[f64]) -> f64, x0: &[f64], opts: &OptOptions) -> OptOutcome {
    let k = x0.len();
    assert!(k >= 1, "nelder_mead needs at least one coordinate");
    let cf = Counted { f, n: Cell::new(0) };
    let (alpha, gamma, rho, sigma) = (1.0, 2.0, 0.5, 0.5);

    let mut pts: Vec<Vec<f64>> = Vec::with_capacity(k + 1);
    pts.push(x0.to_vec());
    for i in 0..k {
        let mut p = x0.to_vec();
        p[i] += opts.step;
        pts.push(p);
    }
    let mut vals: Vec<f64> = pts.iter().map(|p| cf.call(p)).collect();

    let along =
        |c: &[f64], p: &[f64], t: f64| -> Vec<f64> { c.iter().zip(p).map(|(ci, pi)| ci + t * (pi - ci)).collect() };

    loop {
        let mut order: Vec<usize> = (0..=k).collect();
        order.sort_by(|&a, &b| vals[a].total_cmp(&vals[b]).then(a.cmp(&b)));
        pts = order.iter().map(|&i| pts[i].clone()).collect();
        vals = order.iter().map(|&i| vals[i]).collect();

        if vals[0] <= opts.target || cf.n.get() >= opts.max_evals || opts.out_of_time() {
            break;
        }
        let diameter = pts[1..]
            .iter()
            .map(|p| p.iter().zip(&pts[0]).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max))
            .fold(0.0, f64::max);
        if diameter < opts.xtol || (vals[k] - vals[0]).abs() < opts.ftol {
            break;
        }

        let mut c = vec![0.0; k];
        for p in &pts[..k] {
            for (ci, pi) in c.iter_mut().zip(p) {
                *ci += pi / k as f64;
            }
        }
        let xr = along(&c, &pts[k], -alpha);
        let fr = cf.call(&xr);
        if fr < vals[0] {
            let xe = along(&c, &xr, gamma);
            let fe = cf.call(&xe);
            if fe < fr {
                pts[k] = xe;
                vals[k] = fe;
            } else {
                pts[k] = xr;
                vals[k] = fr;
            }
            continue;
        }
        if fr < vals[k - 1] {
            pts[k] = xr;
            vals[k] = fr;
            continue;
        }
        let (xc, fc, accept) = if fr < vals[k] {
            let xc = along(&c, &xr, rho);
            let fc = cf.call(&xc);
            let ok = fc <= fr;
            (xc, fc, ok)
        } else {
            let xc = along(&c, &pts[k], rho);
            let fc = cf.call(&xc);
            let ok = fc < vals[k];
            (xc, fc, ok)
        };
        if accept {
            pts[k] = xc;
            vals[k] = fc;
            continue;
        }
        for i in 1..=k {
            pts[i] = along(&pts[0].clone(), &pts[i], sigma);
            vals[i] = cf.call(&pts[i]);
        }
    }
    OptOutcome { x: pts[0].clone(), f: vals[0], evals: cf.n.get() }
}

const GOLD: f64 = 1.618_033_988_749_895;
const CGOLD: f64 = 0.381_966_011_250_105;

/// Minimizes g(t) = f(x + t·dir) by bracketing then Brent's method.
/// Returns (t, g(t)).
fn line_min(g: &dyn Fn(f64) -> f64, g0: f64, scale: f64, tol: f64, budget: usize) -> (f64, f64, usize) {
    let used = Cell::new(0usize);
    let eval = |t: f64| {
        used.set(used.get() + 1);
        g(t)
    };
    // Bracket.
    let (mut a, mut fa) = (0.0, g0);
    let (mut b, mut fb) = (scale, eval(scale));
    if fb > fa {
        std::mem::swap(&mut a, &mut b);
        std::mem::swap(&mut fa, &mut fb);
    }
    let mut c = b + GOLD * (b - a);
    let mut fc = eval(c);
    while fb > fc && used.get() < budget {
        let nc = c + GOLD * (c - b);
        let nfc = eval(nc);
        a = b;
        fa = fb;
        b = c;
        fb = fc;
        c = nc;
        fc = nfc;
    }
    let _ = fa;
    let (mut lo, mut hi) = if a < c { (a, c) } else { (c, a) };

    // Brent.
    let (mut x, mut w, mut v) = (b, b, b);
    let (mut fx, mut fw, mut fv) = (fb, fb, fb);
    let mut d: f64 = 0.0;
    let mut e: f64 = 0.0;
    while used.get() < budget {
        let xm = 0.5 * (lo + hi);
        let tol1 = tol * x.abs() + 1e-12;
        let tol2 = 2.0 * tol1;
        if (x - xm).abs() <= tol2 - 0.5 * (hi - lo) {
            break;
        }
        let mut golden = true;
        if e.abs() > tol1 {
            let r = (x - w) * (fx - fv);
            let mut q = (x - v) * (fx - fw);
            let mut p = (x - v) * q - (x - w) * r;
            q = 2.0 * (q - r);
            if q > 0.0 {
                p = -p;
            }
            q = q.abs();
            let etemp = e;
            e = d;
            if p.abs() < (0.5 * q * etemp).abs() && p > q * (lo - x) && p < q * (hi - x) {
                d = p / q;
                let u = x + d;
                if u - lo < tol2 || hi - u < tol2 {
                    d = tol1.copysign(xm - x);
                }
                golden = false;
            }
        }
        if golden {
            e = if x >= xm { lo - x } else { hi - x };
            d = CGOLD * e;
        }
        let u = if d.abs() >= tol1 { x + d } else { x + tol1.copysign(d) };
        let fu = eval(u);
        if fu <= fx {
            if u >= x {
                lo = x;
            } else {
                hi = x;
            }
            v = w;
            fv = fw;
            w = x;
            fw = fx;
            x = u;
            fx = fu;
        } else {
            if u < x {
                lo = u;
            } else {
                hi = u;
            }
            if fu <= fw || w == x {
                v = w;
                fv = fw;
                w = u;
                fw = fu;
            } else if fu <= fv || v == x || v == w {
                v = u;
                fv = fu;
            }
        }
    }
    (x, fx, used.get())
}

/// Powell's conjugate-direction method with Brent line searches.
pub fn powell(f: &dyn Fn(&[f64]) -> f64, x0: &[f64], opts: &OptOptions) -> OptOutcome {
    let k = x0.len();
    assert!(k >= 1, "powell needs at least one coordinate");
    let cf = Counted { f, n: Cell::new(0) };
    let mut dirs: Vec<Vec<f64>> = (0..k)
        .map(|i| {
            let mut d = vec![0.0; k];
            d[i] = 1.0;
            d
        })
        .collect();
    let mut x = x0.to_vec();
    let mut fx = cf.call(&x);

    let search = |x: &mut Vec<f64>, fx: &mut f64, dir: &[f64]| {
        let remaining = opts.max_evals.saturating_sub(cf.n.get()).max(1);
        let base = x.clone();
        let g = |t: f64| {
            let p: Vec<f64> = base.iter().zip(dir).map(|(b, d)| b + t * d).collect();
            cf.call(&p)
        };
        let (t, ft, _) = line_min(&g, *fx, opts.step, 1e-8, remaining.min(200));
        if ft < *fx {
            for (xi, di) in x.iter_mut().zip(dir) {
                *xi += t * di;
            }
            *fx = ft;
        }
    };

    while fx > opts.target && cf.n.get() < opts.max_evals && !opts.out_of_time() {
        let fstart = fx;
        let xstart = x.clone();
        let (mut biggest, mut ibig) = (0.0, 0);
        for (i, dir) in dirs.clone().iter().enumerate() {
            let fold = fx;
            search(&mut x, &mut fx, dir);
            if fold - fx > biggest {
                biggest = fold - fx;
                ibig = i;
            }
            if fx <= opts.target || cf.n.get() >= opts.max_evals {
                break;
            }
        }
        let moved = x.iter().zip(&xstart).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
        if 2.0 * (fstart - fx) <= opts.ftol * (fstart.abs() + fx.abs()) + 1e-300 || moved < opts.xtol {
            break;
        }
        let newdir: Vec<f64> = x.iter().zip(&xstart).map(|(a, b)| a - b).collect();
        let xe: Vec<f64> = x.iter().zip(&newdir).map(|(a, d)| a + d).collect();
        let fe = cf.call(&xe);
        if fe < fstart {
            let t = 2.0 * (fstart - 2.0 * fx + fe) * (fstart - fx - biggest).powi(2) - biggest * (fstart - fe).powi(2);
            if t < 0.0 {
                search(&mut x, &mut fx, &newdir);
                dirs[ibig] = dirs[k - 1].clone();
                dirs[k - 1] = newdir;
            }
        }
    }
    OptOutcome { x, f: fx, evals: cf.n.get() }
}

/// Levenberg–Marquardt on a residual vector of length m, with a central
/// finite-difference Jacobian. The reported objective is the residual 2-norm.
pub fn levenberg_marquardt(
    residual: &dyn Fn(&[f64], &mut [f64]),
    m: usize,
    x0: &[f64],
    fd_step: f64,
    opts: &OptOptions,
) -> OptOutcome {
    let k = x0.len();
    assert!(k >= 1 && m >= 1, "levenberg_marquardt needs parameters and residuals");
    let evals = Cell::new(0usize);
    let eval = |x: &[f64], r: &mut [f64]| {
        evals.set(evals.get() + 1);
        residual(x, r);
    };
    let sq = |r: &[f64]| r.iter().map(|v| v * v).sum::<f64>();

    let mut x = x0.to_vec();
    let mut r = vec![0.0; m];
    eval(&x, &mut r);
    let mut f = sq(&r);
    if !f.is_finite() {
        return OptOutcome { x, f: f64::INFINITY, evals: evals.get() };
    }
    let target_sq = opts.target * opts.target;
    let mut mu: Option<f64> = None;
    let mut jac = DMatrix::<f64>::zeros(m, k);
    let (mut rp, mut rm) = (vec![0.0; m], vec![0.0; m]);
    let mut stalls = 0;

    while f > target_sq && evals.get() + 2 * k < opts.max_evals && !opts.out_of_time() {
        for j in 0..k {
            let orig = x[j];
            x[j] = orig + fd_step;
            eval(&x, &mut rp);
            x[j] = orig - fd_step;
            eval(&x, &mut rm);
            x[j] = orig;
            for i in 0..m {
                jac[(i, j)] = (rp[i] - rm[i]) / (2.0 * fd_step);
            }
        }
        let rv = DVector::from_column_slice(&r);
        let jtj = jac.transpose() * &jac;
        let g = jac.transpose() * rv;
        let lambda = *mu.get_or_insert_with(|| 1e-3 * (0..k).map(|i| jtj[(i, i)]).fold(0.0, f64::max).max(1e-12));
        let mut lam = lambda;

        let mut improved = false;
        let mut step_norm = 0.0;
        let mut x_new = vec![0.0; k];
        while evals.get() < opts.max_evals {
            let mut a = jtj.clone();
            for i in 0..k {
                a[(i, i)] += lam;
            }
            let Some(ch) = a.cholesky() else {
                lam *= 10.0;
                if lam > 1e16 {
                    break;
                }
                continue;
            };
            let delta = ch.solve(&(-&g));
            for i in 0..k {
                x_new[i] = x[i] + delta[i];
            }
            eval(&x_new, &mut rp);
            let f_new = sq(&rp);
            if f_new.is_finite() && f_new < f {
                step_norm = delta.amax();
                let rel = (f - f_new) / f;
                x.copy_from_slice(&x_new);
                r.copy_from_slice(&rp);
                f = f_new;
                lam = (lam / 3.0).max(1e-15);
                improved = true;
                stalls = if rel < 1e-10 { stalls + 1 } else { 0 };
                break;
            }
            lam *= 4.0;
            if lam > 1e16 {
                break;
            }
        }
        mu = Some(lam);
        if !improved || stalls >= 5 || step_norm < opts.xtol * (1.0 + x.iter().map(|v| v.abs()).fold(0.0, f64::max)) {
            break;
        }
    }
    OptOutcome { x, f: f.sqrt(), evals: evals.get() }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn bowl(x: &[f64]) -> f64 {
        x.iter().map(|v| (v - 1.0).powi(2)).sum()
    }

    #[test]
    fn nelder_mead_quadratic() {
        let opts = OptOptions { max_evals: 20_000, ..Default::default() };
        let out = nelder_mead(&bowl, &[0.0; 4], &opts);
        assert!(out.x.iter().all(|v| (v - 1.0).abs() < 1e-6), "{:?}", out.x);
        let again = nelder_mead(&bowl, &[0.0; 4], &opts);
        assert_eq!(out, again);
    }

    #[test]
    fn nelder_mead_respects_budget() {
        let opts = OptOptions { max_evals: 50, ..Default::default() };
        let out = nelder_mead(&bowl, &[5.0; 6], &opts);
        assert!(out.evals <= 50 + 6);
    }

    #[test]
    fn powell_quadratic_and_rosenbrock() {
        let opts = OptOptions { max_evals: 50_000, ..Default::default() };
        let out = powell(&bowl, &[0.0; 4], &opts);
        assert!(out.x.iter().all(|v| (v - 1.0).abs() < 1e-6), "{:?}", out.x);
        let rosen = |x: &[f64]| 100.0 * (x[1] - x[0] * x[0]).powi(2) + (1.0 - x[0]).powi(2);
        let out = powell(&rosen, &[-1.2, 1.0], &opts);
        assert!((out.x[0] - 1.0).abs() < 1e-4 && (out.x[1] - 1.0).abs() < 1e-4, "{:?}", out);
    }

    #[test]
    fn lm_fits_exponential() {
        let ts: Vec<f64> = (0..20).map(|i| i as f64 * 0.1).collect();
        let res = |p: &[f64], r: &mut [f64]| {
            for (ri, t) in r.iter_mut().zip(&ts) {
                *ri = p[0] * (p[1] * t).exp() - 2.0 * (-0.7 * t).exp();
            }
        };
        let out = levenberg_marquardt(
            &res,
            ts.len(),
            &[1.0, 0.0],
            1e-6,
            &OptOptions { max_evals: 5000, ..Default::default() },
        );
        assert!(out.f < 1e-10, "{out:?}");
        assert!((out.x[0] - 2.0).abs() < 1e-8 && (out.x[1] + 0.7).abs() < 1e-8);
    }
}
