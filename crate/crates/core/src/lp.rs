//! Exact two-phase simplex over ℚ (Bland's rule), used for cone membership.

use rug::Rational;

#[derive(Debug, Clone, PartialEq)]
pub enum LpResult {
    Optimal { x: Vec<Rational>, value: Rational },
    Infeasible,
    Unbounded,
}

struct Tableau {
    rows: Vec<Vec<Rational>>,
    basis: Vec<usize>,
    width: usize,
}

impl Tableau {
    fn pivot(&mut self, r: usize, c: usize) {
        let inv = Rational::from(self.rows[r][c].recip_ref());
        for v in self.rows[r].iter_mut() {
            *v *= &inv;
        }
        let pivot_row = self.rows[r].clone();
        for (i, row) in self.rows.iter_mut().enumerate() {
            if i == r || row[c].cmp0().is_eq() {
                continue;
            }
            let f = row[c].clone();
            for (v, p) in row.iter_mut().zip(&pivot_row) {
                if p.cmp0().is_ne() {
                    *v -= Rational::from(&f * p);
                }
            }
        }
        self.basis[r] = c;
    }

    fn reduced_costs(&self, cost: &[Rational]) -> Vec<Rational> {
        let mut red: Vec<Rational> = cost.to_vec();
        for (row, &b) in self.rows.iter().zip(&self.basis) {
            if cost[b].cmp0().is_eq() {
                continue;
            }
            for j in 0..self.width {
                red[j] -= Rational::from(&cost[b] * &row[j]);
            }
        }
        red
    }

    /// Runs the simplex loop; `allowed` restricts entering columns.
    fn optimize(&mut self, cost: &[Rational], allowed: usize) -> bool {
        loop {
            let red = self.reduced_costs(cost);
            let Some(enter) = (0..allowed).find(|&j| red[j].cmp0().is_lt()) else {
                return true;
            };
            let mut best: Option<(Rational, usize, usize)> = None;
            for (i, row) in self.rows.iter().enumerate() {
                if row[enter].cmp0().is_gt() {
                    let ratio = Rational::from(&row[self.width] / &row[enter]);
                    let better = match &best {
                        None => true,
                        Some((r, _, b)) => ratio < *r || (ratio == *r && self.basis[i] < *b),
                    };
                    if better {
                        best = Some((ratio, i, self.basis[i]));
                    }
                }
            }
            match best {
                None => return false,
                Some((_, r, _)) => self.pivot(r, enter),
            }
        }
    }
}

/// Minimizes `c·x` subject to `A x = b`, `x ≥ 0`.
pub fn minimize(a: &[Vec<Rational>], b: &[Rational], c: &[Rational]) -> LpResult {
    let m = a.len();
    let n = c.len();
    let width = n + m;
    let mut rows = Vec::with_capacity(m);
    for (i, (ai, bi)) in a.iter().zip(b).enumerate() {
        let flip = bi.cmp0().is_lt();
        let mut row: Vec<Rational> = ai.iter().map(|v| if flip { Rational::from(-v) } else { v.clone() }).collect();
        row.extend((0..m).map(|k| Rational::from(i32::from(k == i))));
        row.push(if flip { Rational::from(-bi) } else { bi.clone() });
        rows.push(row);
    }
    let mut t = Tableau { rows, basis: (n..n + m).collect(), width };

    let phase1: Vec<Rational> = (0..width).map(|j| Rational::from(i32::from(j >= n))).collect();
    t.optimize(&phase1, width);
    let infeas: Rational = t.rows.iter().zip(&t.basis).filter(|(_, &b)| b >= n).map(|(r, _)| r[width].clone()).sum();
    if infeas.cmp0().is_gt() {
        return LpResult::Infeasible;
    }
    // drive remaining artificials out of the basis; drop redundant rows
    let mut i = 0;
    while i < t.rows.len() {
        if t.basis[i] >= n {
            match (0..n).find(|&j| t.rows[i][j].cmp0().is_ne()) {
                Some(j) => t.pivot(i, j),
                None => {
                    t.rows.remove(i);
                    t.basis.remove(i);
                    continue;
                }
            }
        }
        i += 1;
    }
    let mut cost: Vec<Rational> = c.to_vec();
    cost.extend((0..m).map(|_| Rational::new()));
    if !t.optimize(&cost, n) {
        return LpResult::Unbounded;
    }
    let mut x = vec![Rational::new(); n];
    for (row, &b) in t.rows.iter().zip(&t.basis) {
        if b < n {
            x[b] = row[width].clone();
        }
    }
    let value = x.iter().zip(c).map(|(xi, ci)| Rational::from(xi * ci)).sum();
    LpResult::Optimal { x, value }
}

/// Some `x ≥ 0` with `A x = b`, if one exists.
pub fn feasible_point(a: &[Vec<Rational>], b: &[Rational]) -> Option<Vec<Rational>> {
    let n = a.first().map_or(0, Vec::len);
    match minimize(a, b, &vec![Rational::new(); n]) {
        LpResult::Optimal { x, .. } => Some(x),
        _ => None,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(v: i64) -> Rational {
        Rational::from(v)
    }

    #[test]
    fn small_programs() {
        // x + y = 4, x - y = 2 → (3, 1)
        let a = vec![vec![q(1), q(1)], vec![q(1), q(-1)]];
        assert_eq!(feasible_point(&a, &[q(4), q(2)]), Some(vec![q(3), q(1)]));
        // x + y = 4 with y ≥ 0 forced, x - y = 6 → x = 5, y = -1 infeasible
        assert_eq!(feasible_point(&a, &[q(4), q(6)]), None);
        // minimize -x - 2y subject to x + y + s = 4, x ≤ 3 via x + t = 3
        let a = vec![vec![q(1), q(1), q(1), q(0)], vec![q(1), q(0), q(0), q(1)]];
        let r = minimize(&a, &[q(4), q(3)], &[q(-1), q(-2), q(0), q(0)]);
        assert_eq!(r, LpResult::Optimal { x: vec![q(0), q(4), q(0), q(3)], value: q(-8) });
        // unbounded: minimize -x subject to x - y = 0
        assert_eq!(minimize(&[vec![q(1), q(-1)]], &[q(0)], &[q(-1), q(0)]), LpResult::Unbounded);
    }
}
