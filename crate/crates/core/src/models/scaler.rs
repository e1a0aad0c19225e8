/// Per-column affine standardization. Columns whose training values are all
/// 0 or 1 pass through unchanged.
#[derive(Debug, Clone, PartialEq)]
pub struct Scaler {
    pub mean: Vec<f64>,
    pub scale: Vec<f64>,
}

impl Scaler {
    pub fn identity(width: usize) -> Self {
        Scaler {
            mean: vec![0.0; width],
            scale: vec![1.0; width],
        }
    }

    pub fn fit(rows: &[Vec<f64>]) -> Self {
        let width = rows.first().map_or(0, Vec::len);
        let mut s = Scaler::identity(width);
        let n = rows.len() as f64;
        for j in 0..width {
            if rows.iter().all(|r| r[j] == 0.0 || r[j] == 1.0) {
                continue;
            }
            let mean = rows.iter().map(|r| r[j]).sum::<f64>() / n;
            let var = rows.iter().map(|r| (r[j] - mean).powi(2)).sum::<f64>() / n;
            s.mean[j] = mean;
            s.scale[j] = if var > 0.0 { var.sqrt() } else { 1.0 };
        }
        s
    }

    pub fn apply(&self, v: &[f64]) -> Vec<f64> {
        v.iter()
            .zip(self.mean.iter().zip(&self.scale))
            .map(|(x, (m, s))| (x - m) / s)
            .collect()
    }
}
