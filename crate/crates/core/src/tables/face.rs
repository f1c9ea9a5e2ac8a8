use std::fmt;

/// Per-node face identifier. Face 0 is always the wireless ad-hoc face.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct FaceId(pub u32);

impl FaceId {
    pub const WIRELESS: FaceId = FaceId(0);
}

impl fmt::Display for FaceId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum FaceKind {
    App,
    WirelessAdhoc,
}

impl FaceKind {
    pub fn as_str(self) -> &'static str {
        match self {
            FaceKind::App => "app",
            FaceKind::WirelessAdhoc => "wireless",
        }
    }
}

impl fmt::Display for FaceKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Face {
    pub id: FaceId,
    pub kind: FaceKind,
    pub owner_node: u32,
}
