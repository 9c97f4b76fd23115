//! Resource guards for the exhaustive operations.
//!
//! Every guard can be raised (or lowered) with the `LATRES_MAX_ELEMENTS`
//! environment variable, which replaces all defaults at once.

/// Default cap on `census` target size.
pub const CENSUS_MAX: usize = 14;

/// Default cap on the poset enumerator.
pub const ENUMERATE_MAX: usize = 10;

/// Default cap on the start-diagram size of the non-diminishing search.
pub const NONDIM_MAX: usize = 24;

/// Effective limit: the default unless `LATRES_MAX_ELEMENTS` is set to a
/// parseable integer.
pub fn effective(default: usize) -> usize {
    match std::env::var("LATRES_MAX_ELEMENTS") {
        Ok(v) => v.trim().parse().unwrap_or(default),
        Err(_) => default,
    }
}
