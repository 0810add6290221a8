//! Gadget style identifiers and their per-stabilizer cost sheet.

use serde::{Deserialize, Serialize};

/// The five syndrome-extraction styles, in increasing fault-tolerance /
/// overhead order (superdense sits beside bare on overhead).
#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SecStyle {
    /// 1 ancilla, no extra 2q gates; a single mid-gadget ancilla X fault can
    /// propagate to 2+ data qubits
    Bare,
    /// 2 ancillae, +2 CX: one flag loop around the data couplings
    Loop,
    /// 1 ancilla and +1 CZ per stabilizer: paired stabilizers flag each
    /// other through their own syndrome outcomes
    Superdense,
    /// 3 ancillae, +4 CX: cat line with two uncomputed flags; fault-tolerant
    /// for weight-≤6 pure-X/pure-Z rows (basis-reflected for all-Z)
    CssFt6,
    /// 6 ancillae, +7 CX: three X-measured cat lines (syndrome = parity of
    /// the three) with two pair checks and a shadow flag; fault-tolerant for
    /// any weight-≤6 stabilizer
    Ft6,
}

impl SecStyle {
    pub fn parse(s: &str) -> Option<SecStyle> {
        match s {
            "bare" => Some(SecStyle::Bare),
            "loop" => Some(SecStyle::Loop),
            "superdense" => Some(SecStyle::Superdense),
            "css_ft6" | "css-ft6" => Some(SecStyle::CssFt6),
            "ft6" => Some(SecStyle::Ft6),
            _ => None,
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            SecStyle::Bare => "bare",
            SecStyle::Loop => "loop",
            SecStyle::Superdense => "superdense",
            SecStyle::CssFt6 => "css_ft6",
            SecStyle::Ft6 => "ft6",
        }
    }

    pub fn all() -> [SecStyle; 5] {
        [
            SecStyle::Bare,
            SecStyle::Loop,
            SecStyle::Superdense,
            SecStyle::CssFt6,
            SecStyle::Ft6,
        ]
    }
}
