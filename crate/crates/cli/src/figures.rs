//! Checked-in configs behind figures 1 to 7.

const RECIPES: [&str; 7] = [
    include_str!("../configs/fig1.toml"),
    include_str!("../configs/fig2.toml"),
    include_str!("../configs/fig3.toml"),
    include_str!("../configs/fig4.toml"),
    include_str!("../configs/fig5.toml"),
    include_str!("../configs/fig6.toml"),
    include_str!("../configs/fig7.toml"),
];

/// Config text for figure `n` (1-based; the CLI restricts the range).
pub fn recipe(n: u8) -> &'static str {
    RECIPES[n as usize - 1]
}
