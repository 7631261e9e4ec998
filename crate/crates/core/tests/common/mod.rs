use monoindex::ScatterPoint;

/// Best nondecreasing fit by enumerating every split of the pooled abscissae
/// into consecutive blocks.
pub fn brute_force_isotonic(points: &[ScatterPoint], w: &[f64]) -> Vec<f64> {
    let mut idx: Vec<usize> = (0..points.len()).collect();
    idx.sort_by(|&a, &b| points[a].t.total_cmp(&points[b].t));
    let mut ts: Vec<f64> = Vec::new();
    let mut sw: Vec<f64> = Vec::new();
    let mut swy: Vec<f64> = Vec::new();
    for &i in &idx {
        if ts.last() == Some(&points[i].t) {
            *sw.last_mut().unwrap() += w[i];
            *swy.last_mut().unwrap() += w[i] * points[i].y;
        } else {
            ts.push(points[i].t);
            sw.push(w[i]);
            swy.push(w[i] * points[i].y);
        }
    }
    let m = ts.len();
    let mut best: Option<(f64, Vec<f64>)> = None;
    for mask in 0u32..(1 << (m - 1)) {
        let mut levels = vec![0.0; m];
        let mut start = 0;
        for end in 1..=m {
            if end == m || mask & (1 << (end - 1)) != 0 {
                let mean = swy[start..end].iter().sum::<f64>() / sw[start..end].iter().sum::<f64>();
                levels[start..end].iter_mut().for_each(|l| *l = mean);
                start = end;
            }
        }
        if levels.windows(2).any(|p| p[0] > p[1]) {
            continue;
        }
        let value_at = |t: f64| levels[ts.iter().position(|&s| s == t).unwrap()];
        let loss: f64 = points
            .iter()
            .zip(w)
            .map(|(p, wi)| wi * (p.y - value_at(p.t)).powi(2))
            .sum();
        if best.as_ref().is_none_or(|(b, _)| loss < *b) {
            best = Some((loss, points.iter().map(|p| value_at(p.t)).collect()));
        }
    }
    best.unwrap().1
}
