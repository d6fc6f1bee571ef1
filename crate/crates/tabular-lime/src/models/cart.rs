use super::{Cell, ModelSpec, Rectangle};

/// Fit a regression tree by exhaustive variance-reduction splits and return
/// its leaves as a partition of the training bounding box.
///
/// Candidate thresholds are midpoints between consecutive distinct values;
/// points with x_j ≤ threshold go left. Ties in gain keep the first
/// candidate in (feature, threshold) order.
pub fn fit_cart(train: &[Vec<f64>], targets: &[f64], max_depth: usize) -> ModelSpec {
    assert_eq!(train.len(), targets.len(), "one target per training row");
    assert!(!train.is_empty(), "CART needs at least one sample");
    let d = train[0].len();
    let lower: Vec<f64> = (0..d).map(|j| train.iter().map(|r| r[j]).fold(f64::INFINITY, f64::min)).collect();
    let mut upper: Vec<f64> = (0..d).map(|j| train.iter().map(|r| r[j]).fold(f64::NEG_INFINITY, f64::max)).collect();
    for j in 0..d {
        if upper[j] <= lower[j] {
            upper[j] = lower[j] + 1.0;
        }
    }
    let idx: Vec<usize> = (0..train.len()).collect();
    let mut cells = Vec::new();
    grow(train, targets, idx, Rectangle { lower, upper }, max_depth, &mut cells);
    ModelSpec::Partition { cells }
}

fn mean(targets: &[f64], idx: &[usize]) -> f64 {
    idx.iter().map(|&i| targets[i]).sum::<f64>() / idx.len() as f64
}

fn grow(train: &[Vec<f64>], targets: &[f64], idx: Vec<usize>, rect: Rectangle, depth: usize, out: &mut Vec<Cell>) {
    let leaf = mean(targets, &idx);
    let split = if depth == 0 || idx.len() < 2 { None } else { best_split(train, targets, &idx) };
    let Some((j, thr)) = split else {
        out.push(Cell { rect, value: leaf });
        return;
    };
    let (left, right): (Vec<usize>, Vec<usize>) = idx.into_iter().partition(|&i| train[i][j] <= thr);
    let mut lrect = rect.clone();
    lrect.upper[j] = thr;
    let mut rrect = rect;
    rrect.lower[j] = thr;
    grow(train, targets, left, lrect, depth - 1, out);
    grow(train, targets, right, rrect, depth - 1, out);
}

fn best_split(train: &[Vec<f64>], targets: &[f64], idx: &[usize]) -> Option<(usize, f64)> {
    let n = idx.len() as f64;
    let total: f64 = idx.iter().map(|&i| targets[i]).sum();
    let mut best: Option<(f64, usize, f64)> = None;
    for j in 0..train[0].len() {
        let mut order = idx.to_vec();
        order.sort_by(|&a, &b| train[a][j].total_cmp(&train[b][j]));
        let mut left_sum = 0.0;
        for k in 0..order.len() - 1 {
            left_sum += targets[order[k]];
            let (a, b) = (train[order[k]][j], train[order[k + 1]][j]);
            if b <= a {
                continue;
            }
            let nl = (k + 1) as f64;
            let nr = n - nl;
            let right_sum = total - left_sum;
            // SSE reduction equals this quantity minus total²/n
            let gain = left_sum * left_sum / nl + right_sum * right_sum / nr - total * total / n;
            if gain > 1e-12 * (1.0 + total.abs()) && best.is_none_or(|(g, _, _)| gain > g) {
                best = Some((gain, j, 0.5 * (a + b)));
            }
        }
    }
    best.map(|(_, j, t)| (j, t))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn mse(m: &ModelSpec, x: &[Vec<f64>], y: &[f64]) -> f64 {
        x.iter().zip(y).map(|(r, t)| (m.evaluate(r) - t).powi(2)).sum::<f64>() / y.len() as f64
    }

    #[test]
    fn constant_targets_give_one_leaf() {
        let x: Vec<Vec<f64>> = (0..10).map(|i| vec![i as f64]).collect();
        let ModelSpec::Partition { cells } = fit_cart(&x, &[3.0; 10], 4) else { unreachable!() };
        assert_eq!(cells.len(), 1);
        assert_eq!(cells[0].value, 3.0);
    }

    #[test]
    fn depth_zero_is_global_mean() {
        let x: Vec<Vec<f64>> = (0..4).map(|i| vec![i as f64]).collect();
        let ModelSpec::Partition { cells } = fit_cart(&x, &[1.0, 2.0, 3.0, 6.0], 0) else { unreachable!() };
        assert_eq!(cells.len(), 1);
        assert_eq!(cells[0].value, 3.0);
    }

    #[test]
    fn step_function_split() {
        let x: Vec<Vec<f64>> = (0..10).map(|i| vec![i as f64]).collect();
        let y: Vec<f64> = (0..10).map(|i| if i >= 5 { 1.0 } else { 0.0 }).collect();
        let ModelSpec::Partition { cells } = fit_cart(&x, &y, 1) else { unreachable!() };
        assert_eq!(cells.len(), 2);
        let thr = cells[0].rect.upper[0];
        assert!(thr > 4.0 && thr < 5.0);
        assert_eq!((cells[0].value, cells[1].value), (0.0, 1.0));
    }

    #[test]
    fn training_error_non_increasing_in_depth() {
        let x: Vec<Vec<f64>> = (0..60).map(|i| vec![(i as f64 * 0.37).sin() * 5.0, (i as f64 * 0.11).cos()]).collect();
        let y: Vec<f64> = x.iter().map(|r| r[0] * r[0] - r[1]).collect();
        let mut prev = f64::INFINITY;
        for depth in 0..6 {
            let e = mse(&fit_cart(&x, &y, depth), &x, &y);
            assert!(e <= prev + 1e-12);
            prev = e;
        }
    }
}
