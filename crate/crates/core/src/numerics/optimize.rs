/// Golden-section search for the maximum of `f` on `[a, b]`.
///
/// Assumes `f` is unimodal on the bracket. Returns `(argmax, max)`; the
/// endpoints are included as candidates so a monotone `f` is handled.
pub fn golden_section_max(f: impl Fn(f64) -> f64, mut a: f64, mut b: f64, x_tol: f64) -> (f64, f64) {
    let (lo, hi) = (a, b);
    let (f_lo, f_hi) = (f(lo), f(hi));
    let inv_phi = (5f64.sqrt() - 1.0) / 2.0;
    let mut c = b - inv_phi * (b - a);
    let mut d = a + inv_phi * (b - a);
    let mut fc = f(c);
    let mut fd = f(d);
    let mut iter = 0;
    while (b - a).abs() > x_tol && iter < 200 {
        if fc >= fd {
            b = d;
            d = c;
            fd = fc;
            c = b - inv_phi * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + inv_phi * (b - a);
            fd = f(d);
        }
        iter += 1;
    }
    let (mut x, mut fx) = if fc >= fd { (c, fc) } else { (d, fd) };
    if f_lo > fx {
        x = lo;
        fx = f_lo;
    }
    if f_hi > fx {
        x = hi;
        fx = f_hi;
    }
    (x, fx)
}
