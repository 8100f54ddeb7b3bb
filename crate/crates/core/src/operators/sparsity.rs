use crate::support::SupportSet;
use crate::volume::CMatrix;

/// Indices of entries whose magnitude exceeds `support_eps · max|W|`.
pub fn extract_support(w: &CMatrix, support_eps: f64) -> SupportSet {
    let peak = w.iter().map(|z| z.norm()).fold(0.0, f64::max);
    if peak == 0.0 {
        return SupportSet::new();
    }
    let cut = support_eps * peak;
    w.indexed_iter()
        .filter(|(_, z)| z.norm() > cut)
        .map(|(idx, _)| idx)
        .collect()
}
