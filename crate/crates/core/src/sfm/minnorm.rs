//! Fujishige–Wolfe minimum-norm base point in exact arithmetic.

use crate::error::{PspError, Result};
use crate::rational::Rational;

fn dot(a: &[Rational], b: &[Rational]) -> Rational {
    a.iter().zip(b).map(|(x, y)| *x * *y).sum()
}

/// Extreme point of the base polytope minimizing `<w, ·>`.
fn greedy(m: usize, w: &[Rational], h: &mut dyn FnMut(&[bool]) -> Rational) -> Vec<Rational> {
    let mut order: Vec<usize> = (0..m).collect();
    order.sort_by(|a, b| w[*a].cmp(&w[*b]).then(a.cmp(b)));
    let mut mask = vec![false; m];
    let mut prev = Rational::ZERO;
    let mut v = vec![Rational::ZERO; m];
    for i in order {
        mask[i] = true;
        let cur = h(&mask);
        v[i] = cur - prev;
        prev = cur;
    }
    v
}

/// Coefficients (summing to one) of the point of least norm in the affine
/// hull of `pts`.
fn affine_minimizer(pts: &[Vec<Rational>]) -> Result<Vec<Rational>> {
    let k = pts.len();
    // [G 1; 1ᵀ 0] [μ; ν] = [0; 1]
    let mut a: Vec<Vec<Rational>> = (0..=k)
        .map(|i| {
            let mut row: Vec<Rational> = (0..=k)
                .map(|j| match (i < k, j < k) {
                    (true, true) => dot(&pts[i], &pts[j]),
                    (false, false) => Rational::ZERO,
                    _ => Rational::ONE,
                })
                .collect();
            row.push(if i == k { Rational::ONE } else { Rational::ZERO });
            row
        })
        .collect();
    let n = k + 1;
    for col in 0..n {
        let piv = (col..n)
            .find(|r| !a[*r][col].is_zero())
            .ok_or_else(|| PspError::Internal("affinely dependent corral".into()))?;
        a.swap(col, piv);
        let p = a[col][col];
        for j in col..=n {
            a[col][j] = a[col][j] / p;
        }
        for r in 0..n {
            if r != col && !a[r][col].is_zero() {
                let f = a[r][col];
                for j in col..=n {
                    let t = a[col][j];
                    a[r][j] -= f * t;
                }
            }
        }
    }
    Ok((0..k).map(|i| a[i][n]).collect())
}

fn combine(pts: &[Vec<Rational>], coef: &[Rational]) -> Vec<Rational> {
    let m = pts[0].len();
    (0..m).map(|e| pts.iter().zip(coef).map(|(p, c)| p[e] * *c).sum()).collect()
}

/// Minimum-norm point of the base polytope of a normalized submodular `h`
/// on `m` elements. Its negative support is the minimal minimizer of `h`
/// and its nonpositive support the maximal one.
pub fn min_norm_point(m: usize, h: &mut dyn FnMut(&[bool]) -> Rational) -> Result<Vec<Rational>> {
    if m == 0 {
        return Ok(Vec::new());
    }
    let mut x = greedy(m, &vec![Rational::ZERO; m], h);
    let mut corral = vec![x.clone()];
    let mut lam = vec![Rational::ONE];
    loop {
        let q = greedy(m, &x, h);
        if dot(&x, &x) <= dot(&x, &q) || corral.contains(&q) {
            return Ok(x);
        }
        corral.push(q);
        lam.push(Rational::ZERO);
        loop {
            let mu = affine_minimizer(&corral)?;
            if mu.iter().all(|c| c.signum() > 0) {
                x = combine(&corral, &mu);
                lam = mu;
                break;
            }
            let theta = lam
                .iter()
                .zip(&mu)
                .filter(|(_, m)| m.signum() <= 0)
                .map(|(l, m)| *l / (*l - *m))
                .min()
                .expect("some coefficient is nonpositive");
            lam = lam.iter().zip(&mu).map(|(l, m)| theta * *m + (Rational::ONE - theta) * *l).collect();
            let keep: Vec<bool> = lam.iter().map(|l| l.signum() > 0).collect();
            corral = corral.into_iter().zip(&keep).filter(|(_, k)| **k).map(|(p, _)| p).collect();
            lam = lam.into_iter().zip(&keep).filter(|(_, k)| **k).map(|(l, _)| l).collect();
        }
    }
}
