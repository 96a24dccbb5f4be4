//! Benchmark fixtures shared by the criterion targets.

use std::sync::Arc;

use hzbound_core::{ClassNumberCache, HzParams, HzSurface};

/// A fresh surface for `p` with an empty class-number cache.
pub fn fresh_surface(p: u64) -> HzSurface {
    let params = HzParams::with_p(p).expect("benchmark prime");
    HzSurface::new(params, Arc::new(ClassNumberCache::new()))
}
