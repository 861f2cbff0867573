//! Small numeric helpers shared across modules.

/// Bisection for a monotone function with a sign change on `[lo, hi]`.
///
/// Works for increasing or decreasing `f`; the bracket orientation is read
/// off the endpoint values. Runs until the interval collapses at floating
/// point resolution or `max_iter` is hit, so the returned point is the
/// machine root whenever `f` is monotone on the bracket.
pub(crate) fn bisect<F: Fn(f64) -> f64>(f: F, lo: f64, hi: f64, max_iter: usize) -> f64 {
    debug_assert!(lo <= hi);
    let flo = f(lo);
    let fhi = f(hi);
    if flo == 0.0 {
        return lo;
    }
    if fhi == 0.0 {
        return hi;
    }
    let (mut a, mut b) = (lo, hi);
    let mut fa = flo;
    let _ = fhi;
    for _ in 0..max_iter {
        let m = 0.5 * (a + b);
        if m <= a || m >= b {
            break;
        }
        let fm = f(m);
        if fm == 0.0 {
            return m;
        }
        // Keep a sign change between a and b whatever the orientation.
        if (fm < 0.0) == (fa < 0.0) {
            a = m;
            fa = fm;
        } else {
            b = m;
        }
    }
    0.5 * (a + b)
}

/// Merge a sorted list of (position, weight) pairs: positions closer than
/// `tol` collapse into a single atom at the weighted mean with summed weight.
pub(crate) fn merge_sorted_atoms(pairs: &[(f64, f64)], tol: f64) -> (Vec<f64>, Vec<f64>) {
    let mut atoms: Vec<f64> = Vec::with_capacity(pairs.len());
    let mut weights: Vec<f64> = Vec::with_capacity(pairs.len());
    for &(x, w) in pairs {
        if w <= 0.0 {
            continue;
        }
        match atoms.last() {
            Some(&last) if x - last <= tol => {
                let n = atoms.len() - 1;
                let wt = weights[n] + w;
                atoms[n] = (atoms[n] * weights[n] + x * w) / wt;
                weights[n] = wt;
            }
            _ => {
                atoms.push(x);
                weights.push(w);
            }
        }
    }
    (atoms, weights)
}
