//! Configuration files shipped with the binary.

pub const PRESETS: [(&str, &str); 6] = [
    ("harmonic", include_str!("../presets/harmonic.cfg")),
    ("doublewell_fig1", include_str!("../presets/doublewell_fig1.cfg")),
    ("spinor_fig2", include_str!("../presets/spinor_fig2.cfg")),
    ("selftrap_sweep", include_str!("../presets/selftrap_sweep.cfg")),
    ("twobit_phase", include_str!("../presets/twobit_phase.cfg")),
    ("pairfield_fig1", include_str!("../presets/pairfield_fig1.cfg")),
];

/// Preset text by name, with or without the `.cfg` suffix.
pub fn preset(name: &str) -> Option<&'static str> {
    let name = name.strip_suffix(".cfg").unwrap_or(name);
    PRESETS.iter().find(|(n, _)| *n == name).map(|(_, text)| *text)
}
