//! Number formatting shared by the CSV and text emitters.

/// Shortest decimal representation that round-trips to the same `f64`
/// (at most 17 significant digits), with negative zero printed as `0`.
pub fn num(x: f64) -> String {
    if x == 0.0 {
        return "0".to_string();
    }
    if x.is_infinite() {
        return if x > 0.0 { "inf" } else { "-inf" }.to_string();
    }
    format!("{x}")
}
