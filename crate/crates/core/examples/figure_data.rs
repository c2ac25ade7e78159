//! Regenerate a figure preset into a directory, as `oofsk figure` does.
//!
//! cargo run --release --example figure_data -- fig4 out/

use clap::ValueEnum;
use oofsk::cli::{run_figure, FigurePreset};

fn main() -> oofsk::Result<()> {
    let args: Vec<String> = std::env::args().collect();
    let preset = args.get(1).and_then(|s| FigurePreset::from_str(s, true).ok()).unwrap_or(FigurePreset::Fig8);
    let dir = args.get(2).map_or("figures", String::as_str);
    for path in run_figure(preset, dir.as_ref(), 50_000, 1, 20, &args)? {
        println!("{}", path.display());
    }
    Ok(())
}
