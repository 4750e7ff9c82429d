//! Exact squared Euclidean distance transform (lower envelope of parabolas,
//! one pass along rows and one along columns).

/// Squared distance, in cell units, from every cell to the nearest cell with
/// `feature` set. `f64::INFINITY` everywhere when there is no feature.
pub fn squared_distance(nx: usize, ny: usize, feature: impl Fn(usize, usize) -> bool) -> Vec<f64> {
    let mut grid = vec![f64::INFINITY; nx * ny];
    for j in 0..ny {
        for i in 0..nx {
            if feature(i, j) {
                grid[j * nx + i] = 0.0;
            }
        }
    }
    let mut buf = Vec::new();
    let mut out = Vec::new();
    for j in 0..ny {
        buf.clear();
        buf.extend_from_slice(&grid[j * nx..(j + 1) * nx]);
        transform_1d(&buf, &mut out);
        grid[j * nx..(j + 1) * nx].copy_from_slice(&out);
    }
    for i in 0..nx {
        buf.clear();
        buf.extend((0..ny).map(|j| grid[j * nx + i]));
        transform_1d(&buf, &mut out);
        for j in 0..ny {
            grid[j * nx + i] = out[j];
        }
    }
    grid
}

fn transform_1d(f: &[f64], out: &mut Vec<f64>) {
    let n = f.len();
    out.clear();
    out.resize(n, f64::INFINITY);
    // positions and left boundaries of the parabolas on the lower envelope
    let mut v: Vec<usize> = Vec::with_capacity(n);
    let mut z: Vec<f64> = Vec::with_capacity(n + 1);
    for q in 0..n {
        if !f[q].is_finite() {
            continue;
        }
        loop {
            match v.last() {
                None => {
                    v.push(q);
                    z.push(f64::NEG_INFINITY);
                    break;
                }
                Some(&p) => {
                    let (qf, pf) = (q as f64, p as f64);
                    let s = ((f[q] + qf * qf) - (f[p] + pf * pf)) / (2.0 * (qf - pf));
                    if s <= *z.last().expect("z tracks v") {
                        v.pop();
                        z.pop();
                    } else {
                        v.push(q);
                        z.push(s);
                        break;
                    }
                }
            }
        }
    }
    if v.is_empty() {
        return;
    }
    let mut k = 0;
    for (q, o) in out.iter_mut().enumerate() {
        let qf = q as f64;
        while k + 1 < v.len() && z[k + 1] < qf {
            k += 1;
        }
        let dq = qf - v[k] as f64;
        *o = dq * dq + f[v[k]];
    }
}
