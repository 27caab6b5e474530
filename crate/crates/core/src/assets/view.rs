//! Read access to a consistent set of assets.
//!
//! Both the committed world state and the recording snapshot used during
//! transaction processing implement this; ACL resolution and queries are
//! written against the trait so they run identically on either.

use super::{Asset, AssetKey};

pub trait AssetView {
    /// Decoded asset under `key`, if present.
    fn get_asset(&self, key: &AssetKey) -> Option<Asset>;

    /// Every entry, in key order. Used by full scans (directory listings,
    /// emptiness checks, audits); scans are not version-recorded.
    fn scan_assets(&self) -> Vec<(AssetKey, Asset)>;
}
