//! Access control list resolution.
//!
//! An ACL is a list of references to participants or groups; groups may
//! nest groups. Access is granted to the asset owner, to directly listed
//! participants, and to members reachable through any listed group.

use super::view::AssetView;
use super::{AclRef, AclRefKind, Asset, AssetError, AssetKey};
use std::collections::BTreeSet;

/// Result of an access check, with diagnostics for dangling references.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AccessOutcome {
    pub allowed: bool,
    /// Human-readable notes about ACL entries that referenced missing
    /// assets; such entries never match.
    pub warnings: Vec<String>,
}

/// Transitive closure of a group's membership: every participant reachable
/// through the member graph. Pure; cycles cannot occur in committed state
/// (mutations reject them) but the walk is guarded anyway.
pub fn expand_group(view: &dyn AssetView, group_id: &str) -> Result<BTreeSet<String>, AssetError> {
    let root = view
        .get_asset(&AssetKey::group(group_id))
        .ok_or_else(|| AssetError::UnknownGroup(group_id.to_string()))?;
    let root = match root {
        Asset::Group(g) => g,
        other => {
            return Err(AssetError::WrongType {
                key: AssetKey::group(group_id).to_string(),
                expected: "group",
                actual: other.type_name(),
            })
        }
    };

    let mut members = BTreeSet::new();
    let mut seen_groups = BTreeSet::new();
    seen_groups.insert(group_id.to_string());
    let mut stack = root.members;
    while let Some(entry) = stack.pop() {
        match entry.kind {
            AclRefKind::Participant => {
                members.insert(entry.id);
            }
            AclRefKind::Group => {
                if !seen_groups.insert(entry.id.clone()) {
                    continue;
                }
                if let Some(Asset::Group(g)) = view.get_asset(&AssetKey::group(&entry.id)) {
                    stack.extend(g.members);
                }
                // Dangling nested groups contribute nothing.
            }
        }
    }
    Ok(members)
}

/// Every group reachable from `group_id` through nested membership,
/// excluding `group_id` itself. Used for cycle rejection on mutation.
pub fn reachable_groups(view: &dyn AssetView, group_id: &str) -> BTreeSet<String> {
    let mut seen = BTreeSet::new();
    let mut stack = vec![group_id.to_string()];
    while let Some(id) = stack.pop() {
        if let Some(Asset::Group(g)) = view.get_asset(&AssetKey::group(&id)) {
            for m in g.members {
                if m.kind == AclRefKind::Group && seen.insert(m.id.clone()) {
                    stack.push(m.id);
                }
            }
        }
    }
    seen
}

/// True iff `participant_id` is the owner, is listed directly, or is a
/// member of any group in the list.
pub fn check_access(
    view: &dyn AssetView,
    participant_id: &str,
    acl: &[AclRef],
    owner: &str,
) -> bool {
    evaluate_access(view, participant_id, acl, owner).allowed
}

pub fn evaluate_access(
    view: &dyn AssetView,
    participant_id: &str,
    acl: &[AclRef],
    owner: &str,
) -> AccessOutcome {
    let mut warnings = Vec::new();
    if participant_id == owner {
        return AccessOutcome { allowed: true, warnings };
    }
    for entry in acl {
        match entry.kind {
            AclRefKind::Participant => {
                if view.get_asset(&AssetKey::participant(&entry.id)).is_none() {
                    warnings.push(format!("dangling acl ref {entry}"));
                    continue;
                }
                if entry.id == participant_id {
                    return AccessOutcome { allowed: true, warnings };
                }
            }
            AclRefKind::Group => match expand_group(view, &entry.id) {
                Ok(members) => {
                    if members.contains(participant_id) {
                        return AccessOutcome { allowed: true, warnings };
                    }
                }
                Err(_) => warnings.push(format!("dangling acl ref {entry}")),
            },
        }
    }
    AccessOutcome { allowed: false, warnings }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::assets::{GroupAsset, Participant};
    use std::collections::BTreeMap;

    /// Toy view over a fixed asset map.
    struct MapView(BTreeMap<AssetKey, Asset>);

    impl AssetView for MapView {
        fn get_asset(&self, key: &AssetKey) -> Option<Asset> {
            self.0.get(key).cloned()
        }
        fn scan_assets(&self) -> Vec<(AssetKey, Asset)> {
            self.0.iter().map(|(k, v)| (k.clone(), v.clone())).collect()
        }
    }

    fn participant(id: &str) -> Asset {
        Asset::Participant(Participant {
            participant_id: id.into(),
            display_name: id.into(),
            org_id: "org1".into(),
            verify_token: vec![],
            roles: Default::default(),
        })
    }

    fn group(id: &str, members: Vec<AclRef>) -> Asset {
        Asset::Group(GroupAsset {
            group_id: id.into(),
            name: id.into(),
            owner: "alice".into(),
            members,
        })
    }

    fn view(assets: Vec<Asset>) -> MapView {
        MapView(assets.into_iter().map(|a| (a.key(), a)).collect())
    }

    #[test]
    fn empty_group_expands_to_nothing() {
        let v = view(vec![group("g1", vec![])]);
        assert!(expand_group(&v, "g1").unwrap().is_empty());
    }

    #[test]
    fn nested_groups_expand_transitively() {
        // G1{alice, G2}, G2{bob} → {alice, bob}
        let v = view(vec![
            participant("alice"),
            participant("bob"),
            group("g2", vec![AclRef::participant("bob")]),
            group("g1", vec![AclRef::participant("alice"), AclRef::group("g2")]),
        ]);
        let got = expand_group(&v, "g1").unwrap();
        let want: BTreeSet<String> = ["alice".to_string(), "bob".to_string()].into();
        assert_eq!(got, want);
    }

    #[test]
    fn expansion_terminates_on_deep_chains() {
        let v = view(vec![
            participant("carol"),
            group("g3", vec![AclRef::participant("carol")]),
            group("g2", vec![AclRef::group("g3")]),
            group("g1", vec![AclRef::group("g2")]),
        ]);
        let got = expand_group(&v, "g1").unwrap();
        assert_eq!(got.len(), 1);
        assert!(got.contains("carol"));
    }

    #[test]
    fn unknown_group_is_an_error() {
        let v = view(vec![]);
        assert_eq!(
            expand_group(&v, "nope").unwrap_err(),
            AssetError::UnknownGroup("nope".into())
        );
    }

    #[test]
    fn owner_always_passes_empty_acl() {
        let v = view(vec![participant("alice")]);
        assert!(check_access(&v, "alice", &[], "alice"));
    }

    #[test]
    fn group_membership_decides() {
        let v = view(vec![
            participant("alice"),
            participant("bob"),
            group("g", vec![AclRef::participant("bob")]),
        ]);
        let acl = vec![AclRef::group("g")];
        assert!(!check_access(&v, "alice", &acl, "owner"));
        assert!(check_access(&v, "bob", &acl, "owner"));
    }

    #[test]
    fn dangling_refs_warn_and_do_not_match() {
        let v = view(vec![participant("bob")]);
        let acl = vec![AclRef::group("ghost"), AclRef::participant("bob")];
        let out = evaluate_access(&v, "bob", &acl, "owner");
        assert!(out.allowed);
        assert_eq!(out.warnings, vec!["dangling acl ref grp:ghost".to_string()]);

        let out = evaluate_access(&v, "carol", &acl, "owner");
        assert!(!out.allowed);
    }
}
