//! Bracketed scalar maximization: golden-section steps accelerated by
//! parabolic interpolation (Brent's method).

const CGOLD: f64 = 0.381_966_011_250_105_1;

/// Maximizes `f` on `[lo, hi]` to an abscissa tolerance `xtol`. Returns the
/// best `(x, f(x))` seen.
pub fn golden_max(mut f: impl FnMut(f64) -> f64, lo: f64, hi: f64, xtol: f64, max_iter: usize) -> (f64, f64) {
    // Brent's minimizer applied to -f.
    let (mut a, mut b) = (lo.min(hi), lo.max(hi));
    let mut x = a + CGOLD * (b - a);
    let (mut w, mut v) = (x, x);
    let mut fx = -f(x);
    let (mut fw, mut fv) = (fx, fx);
    let mut d: f64 = 0.0;
    let mut e: f64 = 0.0;
    for _ in 0..max_iter {
        let xm = 0.5 * (a + b);
        let tol1 = xtol * 0.5 + 1e-3 * f64::EPSILON.sqrt() * x.abs();
        let tol2 = 2.0 * tol1;
        if (x - xm).abs() <= tol2 - 0.5 * (b - a) {
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
            if p.abs() < (0.5 * q * etemp).abs() && p > q * (a - x) && p < q * (b - x) {
                d = p / q;
                let u = x + d;
                if u - a < tol2 || b - u < tol2 {
                    d = tol1.copysign(xm - x);
                }
                golden = false;
            }
        }
        if golden {
            e = if x >= xm { a - x } else { b - x };
            d = CGOLD * e;
        }
        let u = if d.abs() >= tol1 { x + d } else { x + tol1.copysign(d) };
        let fu = -f(u);
        if fu <= fx {
            if u >= x {
                a = x;
            } else {
                b = x;
            }
            v = w;
            fv = fw;
            w = x;
            fw = fx;
            x = u;
            fx = fu;
        } else {
            if u < x {
                a = u;
            } else {
                b = u;
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
    (x, -fx)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn finds_parabola_peak() {
        let mut calls = 0;
        let (x, fx) = golden_max(
            |x| {
                calls += 1;
                -(x - 0.3) * (x - 0.3) + 2.0
            },
            -1.0,
            1.0,
            1e-10,
            200,
        );
        assert!((x - 0.3).abs() < 1e-7);
        assert!((fx - 2.0).abs() < 1e-15);
        assert!(calls < 50, "{calls} evaluations");
    }

    #[test]
    fn finds_cosine_peak() {
        let (x, fx) = golden_max(|x| (x - 1.0).cos(), 0.5, 1.7, 1e-10, 200);
        assert!((x - 1.0).abs() < 1e-7);
        assert!((fx - 1.0).abs() < 1e-14);
    }

    #[test]
    fn monotone_function_goes_to_the_edge() {
        let (x, _) = golden_max(|x| x, 0.0, 1.0, 1e-9, 200);
        assert!(x > 1.0 - 1e-8);
    }
}
