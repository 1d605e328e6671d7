use super::EntityIndex;

pub const EARTH_RADIUS_KM: f64 = 6371.0;

/// Great-circle distance in kilometres between two points in decimal degrees.
pub fn haversine_km(lat1: f64, lon1: f64, lat2: f64, lon2: f64) -> f64 {
    let (p1, p2) = (lat1.to_radians(), lat2.to_radians());
    let dp = p2 - p1;
    let dl = (lon2 - lon1).to_radians();
    let a = (dp / 2.0).sin().powi(2) + p1.cos() * p2.cos() * (dl / 2.0).sin().powi(2);
    2.0 * EARTH_RADIUS_KM * a.sqrt().min(1.0).asin()
}

/// Entities within `radius_km` of the centre, nearest first (ties by id).
pub fn geo_within<'a>(
    index: &'a EntityIndex,
    lat: f64,
    lon: f64,
    radius_km: f64,
    kb_type: Option<&str>,
) -> Vec<(&'a str, f64)> {
    let mut out: Vec<(&str, f64)> = index
        .records()
        .iter()
        .filter(|r| kb_type.map_or(true, |t| r.kb_type == t))
        .map(|r| (r.id.as_str(), haversine_km(lat, lon, r.lat, r.lon)))
        .filter(|&(_, d)| d <= radius_km)
        .collect();
    out.sort_by(|a, b| a.1.total_cmp(&b.1).then_with(|| a.0.cmp(b.0)));
    out
}
