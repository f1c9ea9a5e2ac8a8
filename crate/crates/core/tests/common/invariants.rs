use std::collections::{BTreeMap, BTreeSet};

use vndn::forwarder::TraceLine;
use vndn::ndn::Name;

/// Checks the trace-level forwarding rules over a whole packet trace:
/// no Nack leaves a node under the vanet strategy, Data only leaves a node
/// that satisfied a PIT entry or hit its CS for it, and localhop interests
/// are only ever transmitted by the node whose app sent them.
pub fn check_trace(lines: &[String], vanet: bool) -> Result<(), String> {
    let mut licensed: BTreeMap<u32, Vec<Name>> = BTreeMap::new();
    let mut own_localhop: BTreeSet<(u32, Name, u32)> = BTreeSet::new();
    for (i, raw) in lines.iter().enumerate() {
        let l: TraceLine = raw.parse().map_err(|e| format!("line {i}: {e}: {raw}"))?;
        let fail = |why: &str| Err(format!("line {i}: {why}: {raw}"));
        let localhop = l.name.component_str(0) == Some("localhop");
        match (l.dir.as_str(), l.kind.as_str(), l.verdict.as_str()) {
            ("in", "data", "satisfied") | ("in", "interest", "cs_hit") => {
                licensed.entry(l.node).or_default().push(l.name.clone());
            }
            ("in", "interest", _) if l.face_kind == "app" && localhop => {
                own_localhop.insert((l.node, l.name.clone(), l.nonce.unwrap_or(0)));
            }
            ("out", "nack", _) if vanet => return fail("nack sent under the vanet strategy"),
            ("out", "data", _) => {
                let ok = licensed
                    .get(&l.node)
                    .is_some_and(|names| names.iter().any(|n| n.is_prefix_of(&l.name)));
                if !ok {
                    return fail("data sent without a satisfied entry or cs hit");
                }
            }
            ("out", "interest", "sent")
                if localhop && !own_localhop.contains(&(l.node, l.name.clone(), l.nonce.unwrap_or(0))) =>
            {
                return fail("localhop interest relayed");
            }
            _ => {}
        }
    }
    Ok(())
}
